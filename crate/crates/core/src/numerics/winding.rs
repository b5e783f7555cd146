use num_complex::Complex64;

/// Total change of `arg(curve(s))` over the sorted parameter list `breaks`,
/// divided by `2 pi`. Intervals are bisected until each step turns by at most
/// `max_step` radians. Returns `None` if the curve passes through (or within
/// `1e-14` relative of) the origin, where the count is undefined.
pub fn winding_number<F>(curve: F, breaks: &[f64], max_step: f64) -> Option<f64>
where
    F: Fn(f64) -> Complex64,
{
    let mut total = 0.0;
    let scale = breaks.iter().map(|&s| curve(s).norm()).fold(0.0, f64::max).max(1e-300);
    let mut stack: Vec<(f64, Complex64, f64, Complex64, u32)> = Vec::new();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (curve(a), curve(b));
        stack.push((a, fa, b, fb, 0));
        while let Some((a, fa, b, fb, depth)) = stack.pop() {
            if !(fa.norm() > 1e-14 * scale && fb.norm() > 1e-14 * scale) || !fa.is_finite() || !fb.is_finite() {
                return None;
            }
            let step = (fb / fa).arg();
            if step.abs() <= max_step {
                total += step;
                continue;
            }
            if depth >= 50 {
                return None;
            }
            let m = 0.5 * (a + b);
            let fm = curve(m);
            // push the right half first so the left half is processed first
            stack.push((m, fm, b, fb, depth + 1));
            stack.push((a, fa, m, fm, depth + 1));
        }
    }
    Some(total / (2.0 * std::f64::consts::PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn counts_zeros_inside_the_unit_circle() {
        let f = |w: Complex64| (w - 0.3) * (w + Complex64::new(0.0, 0.5)) * (w - 2.0);
        let breaks: Vec<f64> = (0..=8).map(|k| 2.0 * PI * k as f64 / 8.0).collect();
        let n = winding_number(|s| f(Complex64::from_polar(1.0, s)), &breaks, 0.3).unwrap();
        assert!((n - 2.0).abs() < 1e-12);
    }

    #[test]
    fn passing_through_zero_is_undefined() {
        let breaks = [0.0, 1.0, 2.0];
        assert!(winding_number(|s| Complex64::new(s - 1.0, 0.0), &breaks, 0.3).is_none());
    }
}
