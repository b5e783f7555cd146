//! Cauchy transforms of compactly supported densities and the three-point
//! kernel that decays like `|zeta|^-3`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ToleranceSpec;
use crate::par;

/// Piecewise-constant density on an `nx` by `ny` grid over a rectangle,
/// zero outside. `values` is row-major from the bottom-left cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompactDensity {
    lo: Complex64,
    hi: Complex64,
    nx: usize,
    ny: usize,
    values: Vec<Complex64>,
}

impl CompactDensity {
    pub fn new(corner_a: Complex64, corner_b: Complex64, nx: usize, ny: usize, values: Vec<Complex64>) -> Result<Self> {
        let lo = Complex64::new(corner_a.re.min(corner_b.re), corner_a.im.min(corner_b.im));
        let hi = Complex64::new(corner_a.re.max(corner_b.re), corner_a.im.max(corner_b.im));
        if !(lo.is_finite() && hi.is_finite() && hi.re > lo.re && hi.im > lo.im) {
            return Err(Error::InvalidDensity(format!("degenerate rectangle {corner_a} .. {corner_b}")));
        }
        if nx == 0 || ny == 0 || values.len() != nx * ny {
            return Err(Error::InvalidDensity(format!(
                "grid {nx} x {ny} does not match {} values",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDensity("non-finite density value".into()));
        }
        Ok(Self { lo, hi, nx, ny, values })
    }

    /// Samples `f` at the cell centres.
    pub fn from_fn<F>(corner_a: Complex64, corner_b: Complex64, nx: usize, ny: usize, f: F) -> Result<Self>
    where
        F: Fn(Complex64) -> Complex64,
    {
        let shell = Self::new(corner_a, corner_b, nx, ny, vec![Complex64::new(0.0, 0.0); nx * ny])?;
        let values = (0..nx * ny).map(|i| f(shell.cell_center(i % nx, i / nx))).collect();
        Self::new(corner_a, corner_b, nx, ny, values)
    }

    pub fn corners(&self) -> (Complex64, Complex64) {
        (self.lo, self.hi)
    }

    pub fn grid(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    fn cell_size(&self) -> (f64, f64) {
        ((self.hi.re - self.lo.re) / self.nx as f64, (self.hi.im - self.lo.im) / self.ny as f64)
    }

    fn cell_center(&self, ix: usize, iy: usize) -> Complex64 {
        let (dx, dy) = self.cell_size();
        Complex64::new(self.lo.re + (ix as f64 + 0.5) * dx, self.lo.im + (iy as f64 + 0.5) * dy)
    }

    /// Whether `z` lies in the closed support rectangle.
    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.lo.re && z.re <= self.hi.re && z.im >= self.lo.im && z.im <= self.hi.im
    }

    /// `int g dA`.
    pub fn total(&self) -> Complex64 {
        let (dx, dy) = self.cell_size();
        self.values.iter().sum::<Complex64>() * (dx * dy)
    }

    /// The density `conj(g(conj zeta))`, supported on the mirrored rectangle.
    pub fn reflected(&self) -> Self {
        let mut values = Vec::with_capacity(self.values.len());
        for iy in (0..self.ny).rev() {
            values.extend(self.values[iy * self.nx..(iy + 1) * self.nx].iter().map(|v| v.conj()));
        }
        Self {
            lo: Complex64::new(self.lo.re, -self.hi.im),
            hi: Complex64::new(self.hi.re, -self.lo.im),
            nx: self.nx,
            ny: self.ny,
            values,
        }
    }

    /// Midpoint rule with `m x m` sub-cells per grid cell.
    fn midpoint<H: Fn(Complex64) -> Complex64 + Sync>(&self, h: &H, m: usize) -> Complex64 {
        let (dx, dy) = self.cell_size();
        let (sx, sy) = (dx / m as f64, dy / m as f64);
        let rows = par::map_range(self.ny, |iy| {
            let mut acc = Complex64::new(0.0, 0.0);
            for ix in 0..self.nx {
                let v = self.values[iy * self.nx + ix];
                if v == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let x0 = self.lo.re + ix as f64 * dx;
                let y0 = self.lo.im + iy as f64 * dy;
                let mut cell = Complex64::new(0.0, 0.0);
                for j in 0..m {
                    for i in 0..m {
                        cell += h(Complex64::new(x0 + (i as f64 + 0.5) * sx, y0 + (j as f64 + 0.5) * sy));
                    }
                }
                acc += v * cell;
            }
            acc
        });
        rows.into_iter().sum::<Complex64>() * (sx * sy)
    }

    /// `int h(zeta) g(zeta) dA` for smooth `h`: midpoint sums with `m x m`
    /// sub-cells, `m = 1, 2, 4, ...`, extrapolated by a Romberg table until
    /// successive diagonal entries agree.
    pub fn integrate_against<H>(&self, h: H, tol: &ToleranceSpec) -> Result<Complex64>
    where
        H: Fn(Complex64) -> Complex64 + Sync,
    {
        tol.validate()?;
        let mut table: Vec<Vec<Complex64>> = vec![vec![self.midpoint(&h, 1)]];
        let mut m = 1;
        while m < 64 {
            m *= 2;
            let mut row = vec![self.midpoint(&h, m)];
            let prev = table.last().unwrap();
            let mut factor = 1.0;
            for j in 0..prev.len() {
                factor *= 4.0;
                row.push((row[j] * factor - prev[j]) / (factor - 1.0));
            }
            let best = *row.last().unwrap();
            if !best.is_finite() {
                return Err(Error::NonFiniteEvaluation { at: self.lo });
            }
            let err = (best - prev.last().unwrap()).norm();
            if table.len() >= 2 && err <= tol.abs_tol.max(tol.rel_tol * best.norm()) {
                return Ok(best);
            }
            table.push(row);
        }
        let last = table.last().unwrap();
        let best = *last.last().unwrap();
        Err(Error::SubdivisionLimit {
            subdivisions: m * m * self.nx * self.ny,
            estimate: best,
            error: (best - table[table.len() - 2].last().unwrap()).norm(),
        })
    }
}

/// `(1/pi) [1/(zeta - z) + (z - b)/((b - a)(zeta - a)) + (z - a)/((a - b)(zeta - b))]`,
/// evaluated in the factored form `(z - a)(z - b) / (pi (zeta - z)(zeta - a)(zeta - b))`.
pub fn cauchy_kernel(zeta: Complex64, z: Complex64, a: Complex64, b: Complex64) -> Result<Complex64> {
    if (a - b).norm() < 1e-12 {
        return Err(Error::CoincidentAuxPoints);
    }
    if zeta == z || zeta == a || zeta == b {
        return Err(Error::SingularArgument { w: zeta });
    }
    Ok((z - a) * (z - b) / ((zeta - z) * (zeta - a) * (zeta - b) * PI))
}

/// `(1/pi) int g(zeta) / (zeta - z) dA` for `z` outside the support.
pub fn cauchy_transform_compact(g: &CompactDensity, z: Complex64, tol: &ToleranceSpec) -> Result<Complex64> {
    if g.contains(z) {
        return Err(Error::InsideSupport { z });
    }
    Ok(g.integrate_against(|zeta| 1.0 / (zeta - z), tol)? / PI)
}

/// `int K(zeta, z, a, b) g(zeta) dA` with `z`, `a`, `b` outside the support.
pub fn generalized_cauchy_transform(
    g: &CompactDensity,
    z: Complex64,
    a: Complex64,
    b: Complex64,
    tol: &ToleranceSpec,
) -> Result<Complex64> {
    if (a - b).norm() < 1e-12 {
        return Err(Error::CoincidentAuxPoints);
    }
    if let Some(p) = [z, a, b].into_iter().find(|p| g.contains(*p)) {
        return Err(Error::InsideSupport { z: p });
    }
    let scale = (z - a) * (z - b) / PI;
    Ok(g.integrate_against(|zeta| 1.0 / ((zeta - z) * (zeta - a) * (zeta - b)), tol)? * scale)
}

/// Chain weights `c_k = gamma_1 + ... + gamma_k` turning
/// `sum gamma_k Log(w - d_k)` into `sum c_k Log((w - d_k)/(w - d_{k+1}))`.
pub fn log_to_segments(gammas: &[Complex64], nodes: &[Complex64]) -> Result<Vec<Complex64>> {
    if gammas.len() != nodes.len() || nodes.len() < 2 {
        return Err(Error::InvalidSpec(format!(
            "need matching charges and nodes, at least two (got {} and {})",
            gammas.len(),
            nodes.len()
        )));
    }
    for (i, d) in nodes.iter().enumerate() {
        if nodes[..i].contains(d) {
            return Err(Error::InvalidSpec(format!("node {d} is repeated")));
        }
    }
    let total: Complex64 = gammas.iter().sum();
    if total.norm() >= 1e-12 {
        return Err(Error::NonzeroTotalCharge { total });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    Ok(gammas[..gammas.len() - 1]
        .iter()
        .map(|g| {
            acc += g;
            acc
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::confmap::segment_log_term;
    use crate::numerics::integrate_segment;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tol() -> ToleranceSpec {
        ToleranceSpec::new(1e-13, 1e-11, 4000).unwrap()
    }

    /// `int_rect dA / (zeta - p)` from the antiderivative `-i (u Log u - u)`, `u = zeta - p`,
    /// valid when the rectangle avoids the cut `p + (-inf, 0]`.
    fn rect_inverse(lo: Complex64, hi: Complex64, p: Complex64) -> Complex64 {
        let f = |x: f64, y: f64| {
            let u = c(x, y) - p;
            -Complex64::i() * (u * u.ln() - u)
        };
        f(hi.re, hi.im) - f(lo.re, hi.im) - f(hi.re, lo.im) + f(lo.re, lo.im)
    }

    fn unit_square(n: usize) -> CompactDensity {
        CompactDensity::from_fn(c(0.0, 0.0), c(1.0, 1.0), n, n, |_| c(1.0, 0.0)).unwrap()
    }

    #[test]
    fn kernel_vanishes_at_the_auxiliary_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (a, b) = (c(0.3, -1.0), c(-2.0, 0.5));
        for _ in 0..100 {
            let zeta = c(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
            assert_eq!(cauchy_kernel(zeta, a, a, b).unwrap(), c(0.0, 0.0));
            assert_eq!(cauchy_kernel(zeta, b, a, b).unwrap(), c(0.0, 0.0));
        }
        assert_eq!(cauchy_kernel(c(1.0, 1.0), c(0.0, 0.0), a, a), Err(Error::CoincidentAuxPoints));
        assert!(cauchy_kernel(a, c(0.0, 0.0), a, b).is_err());
    }

    #[test]
    fn kernel_matches_three_term_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let r = |rng: &mut ChaCha8Rng| c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let (zeta, z, a, b) = (r(&mut rng), r(&mut rng), r(&mut rng), r(&mut rng));
            let three = (1.0 / (zeta - z) + (z - b) / ((b - a) * (zeta - a)) + (z - a) / ((a - b) * (zeta - b))) / PI;
            let k = cauchy_kernel(zeta, z, a, b).unwrap();
            let size = 1.0 / (zeta - z).norm() + ((z - b) / ((b - a) * (zeta - a))).norm() + ((z - a) / ((a - b) * (zeta - b))).norm();
            assert!((k - three).norm() <= 1e-12 * size);
        }
    }

    #[test]
    fn kernel_decays_like_inverse_cube() {
        let (z, a, b) = (c(0.5, 0.2), c(-1.0, 0.0), c(0.0, 2.0));
        let ratios: Vec<f64> = (2..=6)
            .map(|m| {
                let zeta = c(1.0, 1.0) * 10f64.powi(m);
                cauchy_kernel(zeta, z, a, b).unwrap().norm() * zeta.norm().powi(3)
            })
            .collect();
        let limit = ((z - a) * (z - b)).norm() / PI;
        for r in ratios {
            assert!((r / limit - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn transform_of_the_unit_disk() {
        let n = 400;
        let disk = CompactDensity::from_fn(c(-1.0, -1.0), c(1.0, 1.0), n, n, |z| {
            if z.norm() <= 1.0 {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
        .unwrap();
        let v = cauchy_transform_compact(&disk, c(3.0, 0.0), &ToleranceSpec::new(1e-12, 1e-9, 4000).unwrap()).unwrap();
        assert!((v - c(-1.0 / 3.0, 0.0)).norm() < 2e-3, "{v}");
        assert!(matches!(
            cauchy_transform_compact(&disk, c(0.5, 0.0), &tol()),
            Err(Error::InsideSupport { .. })
        ));
    }

    #[test]
    fn transform_of_a_square_matches_closed_form() {
        let g = unit_square(4);
        let z = c(-2.5, 0.4);
        let v = cauchy_transform_compact(&g, z, &tol()).unwrap();
        let want = rect_inverse(c(0.0, 0.0), c(1.0, 1.0), z) / PI;
        assert!((v - want).norm() < 1e-10 * want.norm(), "{v} vs {want}");
    }

    #[test]
    fn generalized_transform_is_compact_transform_plus_linear_terms() {
        let g = unit_square(4);
        let (z, a, b) = (c(-600.0, 800.0), c(-5.0, 0.3), c(-7.0, -2.0));
        let (lo, hi) = g.corners();
        let plain = cauchy_transform_compact(&g, z, &tol()).unwrap();
        let correction = ((z - b) / (b - a) * rect_inverse(lo, hi, a) + (z - a) / (a - b) * rect_inverse(lo, hi, b)) / PI;
        let v = generalized_cauchy_transform(&g, z, a, b, &tol()).unwrap();
        let want = plain + correction;
        assert!((v - want).norm() < 1e-9 * plain.norm().max(want.norm()), "{v} vs {want}");
    }

    #[test]
    fn zero_density_and_linearity() {
        let zero = CompactDensity::new(c(0.0, 0.0), c(1.0, 2.0), 3, 2, vec![c(0.0, 0.0); 6]).unwrap();
        let (z, a, b) = (c(3.0, 1.0), c(-2.0, 0.0), c(-2.0, 3.0));
        assert_eq!(cauchy_transform_compact(&zero, z, &tol()).unwrap(), c(0.0, 0.0));
        assert_eq!(generalized_cauchy_transform(&zero, z, a, b, &tol()).unwrap(), c(0.0, 0.0));

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut rand_vals = || (0..6).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect::<Vec<_>>();
        let (u, v) = (rand_vals(), rand_vals());
        let w: Vec<Complex64> = u.iter().zip(&v).map(|(x, y)| x + y).collect();
        let mk = |vals: Vec<Complex64>| CompactDensity::new(c(0.0, 0.0), c(1.0, 2.0), 3, 2, vals).unwrap();
        let (gu, gv, gw) = (mk(u), mk(v), mk(w));
        let t = |g: &CompactDensity| cauchy_transform_compact(g, z, &tol()).unwrap();
        assert!((t(&gw) - t(&gu) - t(&gv)).norm() < 1e-10 * t(&gw).norm().max(1.0));
    }

    #[test]
    fn conjugate_reflection() {
        let g = CompactDensity::from_fn(c(0.0, 0.5), c(1.0, 1.5), 6, 5, |z| z * z + c(0.0, 1.0)).unwrap();
        let r = g.reflected();
        let (lo, hi) = r.corners();
        assert_eq!((lo, hi), (c(0.0, -1.5), c(1.0, -0.5)));
        let (z, a, b) = (c(2.0, 3.0), c(-1.0, 0.2), c(3.0, -2.0));
        let v = generalized_cauchy_transform(&g, z, a, b, &tol()).unwrap();
        let w = generalized_cauchy_transform(&r, z.conj(), a.conj(), b.conj(), &tol()).unwrap();
        assert!((w - v.conj()).norm() < 1e-12 * v.norm());
    }

    #[test]
    fn dbar_of_the_transform_is_minus_the_density() {
        // oint_{dQ} C(z) dz = 2i int_Q dbar C dA = -2i int g dA
        let g = CompactDensity::from_fn(c(0.0, 0.0), c(1.0, 1.0), 8, 8, |z| c(1.0 + z.re, z.im * z.re)).unwrap();
        let (a, b) = (c(5.0, 5.0), c(-4.0, 6.0));
        let t = ToleranceSpec::new(1e-13, 1e-10, 4000).unwrap();
        let corners = [c(-0.5, -0.5), c(1.5, -0.5), c(1.5, 1.5), c(-0.5, 1.5), c(-0.5, -0.5)];
        let mut loop_integral = c(0.0, 0.0);
        for w in corners.windows(2) {
            loop_integral += integrate_segment(|z| generalized_cauchy_transform(&g, z, a, b, &t).unwrap(), w[0], w[1], &t).unwrap();
        }
        let want = c(0.0, -2.0) * g.total();
        assert!((loop_integral - want).norm() < 1e-8 * want.norm(), "{loop_integral} vs {want}");
    }

    #[test]
    fn invalid_densities_are_rejected() {
        assert!(CompactDensity::new(c(0.0, 0.0), c(0.0, 1.0), 1, 1, vec![c(1.0, 0.0)]).is_err());
        assert!(CompactDensity::new(c(0.0, 0.0), c(1.0, 1.0), 2, 1, vec![c(1.0, 0.0)]).is_err());
        assert!(CompactDensity::new(c(0.0, 0.0), c(1.0, 1.0), 1, 1, vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn log_to_segments_examples() {
        let n = [c(0.0, 1.0), c(0.0, 2.0), c(1.0, 1.0)];
        assert_eq!(log_to_segments(&[c(1.0, 0.0), c(-1.0, 0.0)], &n[..2]).unwrap(), vec![c(1.0, 0.0)]);
        assert_eq!(
            log_to_segments(&[c(1.0, 0.0), c(1.0, 0.0), c(-2.0, 0.0)], &n).unwrap(),
            vec![c(1.0, 0.0), c(2.0, 0.0)]
        );
        assert!(matches!(
            log_to_segments(&[c(1.0, 0.0), c(1.0, 0.0)], &n[..2]),
            Err(Error::NonzeroTotalCharge { .. })
        ));
    }

    #[test]
    fn telescoped_chain_reproduces_the_log_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let n = rng.gen_range(2..6);
            let nodes: Vec<Complex64> = (0..n).map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(0.2..3.0))).collect();
            let mut gammas: Vec<Complex64> = (0..n - 1).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            gammas.push(-gammas.iter().sum::<Complex64>());
            let cs = log_to_segments(&gammas, &nodes).unwrap();
            for _ in 0..50 {
                let w = c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..-0.01));
                let direct: Complex64 = gammas.iter().zip(&nodes).map(|(g, d)| g * (w - d).ln()).sum();
                let chain: Complex64 = cs
                    .iter()
                    .zip(nodes.windows(2))
                    .map(|(ck, d)| ck * segment_log_term(d[0], d[1], w).unwrap())
                    .sum();
                assert!((direct - chain).norm() < 1e-12 * direct.norm().max(1.0));
            }
        }
    }
}
