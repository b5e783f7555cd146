//! Scalar root finding: bracketed Brent iteration and closed-form cubics.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Root of `f` in `[lo, hi]` by Brent's bisection/secant/inverse-quadratic
/// hybrid. Stops once `|f(x)| <= tol` or the bracket collapses to rounding.
pub fn find_root_1d<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = c;
    let mut bisected = true;

    for _ in 0..500 {
        if fb.abs() <= tol || (b - a).abs() <= 4.0 * f64::EPSILON * b.abs().max(f64::MIN_POSITIVE) {
            return Ok(b);
        }
        let mut s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };

        let quarter = (3.0 * a + b) / 4.0;
        let outside = !((s > quarter.min(b)) && (s < quarter.max(b)));
        let delta = 2.0 * f64::EPSILON * b.abs();
        if outside
            || (bisected && (s - b).abs() >= (b - c).abs() / 2.0)
            || (!bisected && (s - b).abs() >= (c - d).abs() / 2.0)
            || (bisected && (b - c).abs() < delta)
            || (!bisected && (c - d).abs() < delta)
        {
            s = 0.5 * (a + b);
            bisected = true;
        } else {
            bisected = false;
        }

        let fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if fa.signum() != fs.signum() {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    Ok(b)
}

fn eval_cubic(c: [f64; 4], x: Complex64) -> (Complex64, Complex64) {
    let p = ((x * c[0] + c[1]) * x + c[2]) * x + c[3];
    let dp = (x * (3.0 * c[0]) + 2.0 * c[1]) * x + c[2];
    (p, dp)
}

/// The three roots (with multiplicity) of `c3 x^3 + c2 x^2 + c1 x + c0`,
/// each Newton-polished once. Sorted by descending real part, then imaginary.
pub fn cubic_roots(c3: f64, c2: f64, c1: f64, c0: f64) -> Result<Vec<Complex64>> {
    if c3 == 0.0 {
        return Err(Error::DegenerateLeadingCoefficient);
    }
    let coeffs = [c3, c2, c1, c0];
    let (b, c, d) = (c2 / c3, c1 / c3, c0 / c3);
    let shift = -b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);

    let mut roots: Vec<Complex64> = if p == 0.0 && q == 0.0 {
        vec![Complex64::new(shift, 0.0); 3]
    } else if p == 0.0 {
        let y = (-q).cbrt();
        let rot = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        vec![
            Complex64::new(y + shift, 0.0),
            rot * y + shift,
            rot.conj() * y + shift,
        ]
    } else if disc > 0.0 {
        // one real root and a conjugate pair; pick the non-cancelling branch
        let sq = disc.sqrt();
        let u = (-q / 2.0 - q.signum() * sq).cbrt();
        let v = if u != 0.0 { -p / (3.0 * u) } else { 0.0 };
        let re = -(u + v) / 2.0 + shift;
        let im = 3f64.sqrt() / 2.0 * (u - v);
        vec![
            Complex64::new(u + v + shift, 0.0),
            Complex64::new(re, im.abs()),
            Complex64::new(re, -im.abs()),
        ]
    } else {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| {
                let y = m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos();
                Complex64::new(y + shift, 0.0)
            })
            .collect()
    };

    for r in roots.iter_mut() {
        let (val, der) = eval_cubic(coeffs, *r);
        if der.norm() > 0.0 {
            let cand = *r - val / der;
            let (cval, _) = eval_cubic(coeffs, cand);
            if cval.norm() < val.norm() {
                *r = if r.im == 0.0 { Complex64::new(cand.re, 0.0) } else { cand };
            }
        }
    }
    roots.sort_by(|x, y| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)));
    Ok(roots)
}

/// Discriminant `18abcd - 4b^3 d + b^2 c^2 - 4ac^3 - 27a^2 d^2` of a cubic.
pub fn cubic_discriminant(c3: f64, c2: f64, c1: f64, c0: f64) -> f64 {
    let (a, b, c, d) = (c3, c2, c1, c0);
    18.0 * a * b * c * d - 4.0 * b.powi(3) * d + b * b * c * c - 4.0 * a * c.powi(3) - 27.0 * a * a * d * d
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn brent_examples() {
        let x = find_root_1d(|x| x * x - 2.0, 1.0, 2.0, 1e-14).unwrap();
        assert_abs_diff_eq!(x, 2f64.sqrt(), epsilon = 1e-12);
        // positive root of a + a^2/4 - 1, quadratic formula 2(sqrt 2 - 1)
        let x = find_root_1d(|a| a + a * a / 4.0 - 1.0, 0.0, 1.0, 1e-14).unwrap();
        assert_abs_diff_eq!(x, 2.0 * (2f64.sqrt() - 1.0), epsilon = 1e-12);
        let x = find_root_1d(|x| x, -1.0, 1.0, 1e-14).unwrap();
        assert_abs_diff_eq!(x, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn brent_rejects_bad_bracket() {
        let err = find_root_1d(|x| x * x + 1.0, -1.0, 1.0, 1e-12).unwrap_err();
        assert!(matches!(err, Error::NoSignChange { .. }));
    }

    #[test]
    fn cubic_examples() {
        let r = cubic_roots(1.0, 0.0, 0.0, -8.0).unwrap();
        let s3 = 3f64.sqrt();
        let expect = [Complex64::new(2.0, 0.0), Complex64::new(-1.0, s3), Complex64::new(-1.0, -s3)];
        for (got, want) in r.iter().zip(expect.iter()) {
            assert_abs_diff_eq!((got - want).norm(), 0.0, epsilon = 1e-12);
        }
        let r = cubic_roots(1.0, -3.0, 3.0, -1.0).unwrap();
        for root in r {
            assert_abs_diff_eq!((root - 1.0).norm(), 0.0, epsilon = 1e-12);
        }
        let a = 0.3;
        let r = cubic_roots(8.0 * a, -4.0, 0.0, a * a).unwrap();
        assert!(r.iter().all(|z| z.im == 0.0));
        assert!(r[0].re > 1.0);
    }

    #[test]
    fn cubic_rejects_zero_leading_coefficient() {
        assert_eq!(cubic_roots(0.0, 1.0, 1.0, 1.0), Err(Error::DegenerateLeadingCoefficient));
    }

    fn residual_ok(c: [f64; 4], roots: &[Complex64]) -> bool {
        let scale = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        roots.iter().all(|r| {
            let (p, _) = eval_cubic(c, *r);
            // relative to the size of the individual terms at this root
            let terms = c[0].abs() * r.norm().powi(3) + c[1].abs() * r.norm_sqr() + c[2].abs() * r.norm() + c[3].abs();
            p.norm() <= 1e-10 * scale.max(terms)
        })
    }

    proptest! {
        #[test]
        fn vieta_relations_hold(
            c3 in prop_oneof![-10.0..-0.1f64, 0.1..10.0f64],
            c2 in -10.0..10.0f64,
            c1 in -10.0..10.0f64,
            c0 in -10.0..10.0f64,
        ) {
            let r = cubic_roots(c3, c2, c1, c0).unwrap();
            prop_assert!(residual_ok([c3, c2, c1, c0], &r));
            let sum: Complex64 = r.iter().sum();
            let prod: Complex64 = r.iter().product();
            let want_sum = -c2 / c3;
            let want_prod = -c0 / c3;
            let mag = r.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
            prop_assert!((sum - want_sum).norm() <= 1e-8 * mag);
            prop_assert!((prod - want_prod).norm() <= 1e-8 * mag.powi(3));
        }
    }
}
