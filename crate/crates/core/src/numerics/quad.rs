//! Adaptive Gauss-Kronrod (G10/K21) quadrature for complex-valued integrands
//! along segments, circles and the whole real line.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Convergence control for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

const MIN_TOL: f64 = 100.0 * f64::EPSILON;

impl ToleranceSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let tol = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol.is_finite() && self.abs_tol >= MIN_TOL) {
            return Err(Error::InvalidTolerance(format!(
                "abs_tol {} must be finite and >= {MIN_TOL:e}",
                self.abs_tol
            )));
        }
        if !(self.rel_tol.is_finite() && self.rel_tol >= MIN_TOL) {
            return Err(Error::InvalidTolerance(format!(
                "rel_tol {} must be finite and >= {MIN_TOL:e}",
                self.rel_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidTolerance(
                "max_subdivisions must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Same limits with both tolerances replaced.
    pub fn with_tols(&self, abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol: abs_tol.max(MIN_TOL),
            rel_tol: rel_tol.max(MIN_TOL),
            max_subdivisions: self.max_subdivisions,
        }
    }
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_subdivisions: 4000,
        }
    }
}

// Kronrod abscissae (descending) and weights; odd indices are the Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_525_600_960,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: Complex64,
    error: f64,
    resabs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<G, L>(g: &G, loc: &L, lo: f64, hi: f64) -> Result<Panel>
where
    G: Fn(f64) -> Complex64,
    L: Fn(f64) -> Complex64,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let eval = |u: f64| -> Result<Complex64> {
        let v = g(u);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteEvaluation { at: loc(u) })
        }
    };

    let fc = eval(center)?;
    let mut kronrod = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut resabs = fc.norm() * WGK[10];
    for i in 0..10 {
        let dx = half * XGK[i];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        let sum = f1 + f2;
        kronrod += sum * WGK[i];
        resabs += (f1.norm() + f2.norm()) * WGK[i];
        if i % 2 == 1 {
            gauss += sum * WG[i / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).norm();
    Ok(Panel {
        lo,
        hi,
        value,
        error,
        resabs: resabs * half.abs(),
    })
}

/// Result of an adaptive run.
#[derive(Debug, Clone, Copy)]
pub(crate) struct QuadOutcome {
    pub value: Complex64,
}

/// Globally adaptive integration of `g` over the parameter range spanned by
/// `breaks` (sorted). `loc` maps a parameter to the point reported on failure.
pub(crate) fn adaptive<G, L>(g: G, loc: L, breaks: &[f64], tol: &ToleranceSpec) -> Result<QuadOutcome>
where
    G: Fn(f64) -> Complex64,
    L: Fn(f64) -> Complex64,
{
    tol.validate()?;
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            heap.push(gk21(&g, &loc, w[0], w[1])?);
        }
    }

    let totals = |heap: &BinaryHeap<Panel>, frozen: &[Panel]| {
        let mut v = Complex64::new(0.0, 0.0);
        let mut e = 0.0;
        let mut a = 0.0;
        for p in heap.iter().chain(frozen.iter()) {
            v += p.value;
            e += p.error;
            a += p.resabs;
        }
        (v, e, a)
    };

    loop {
        let (value, error, resabs) = totals(&heap, &frozen);
        let target = tol
            .abs_tol
            .max(tol.rel_tol * value.norm())
            .max(50.0 * f64::EPSILON * resabs);
        if error <= target || heap.is_empty() {
            return Ok(QuadOutcome { value });
        }
        if heap.len() + frozen.len() >= tol.max_subdivisions {
            return Err(Error::SubdivisionLimit {
                subdivisions: tol.max_subdivisions,
                estimate: value,
                error,
            });
        }
        let worst = heap.pop().expect("heap checked non-empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        let scale = worst.lo.abs().max(worst.hi.abs()).max(1e-300);
        if (worst.hi - worst.lo) <= 1e-13 * scale || mid <= worst.lo || mid >= worst.hi {
            // cannot be resolved further in double precision
            frozen.push(worst);
            continue;
        }
        heap.push(gk21(&g, &loc, worst.lo, mid)?);
        heap.push(gk21(&g, &loc, mid, worst.hi)?);
    }
}

/// Integral of `f` along the straight segment from `a` to `b`.
pub fn integrate_segment<F>(f: F, a: Complex64, b: Complex64, tol: &ToleranceSpec) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    Ok(integrate_segment_outcome(f, a, b, tol)?.value)
}

pub(crate) fn integrate_segment_outcome<F>(
    f: F,
    a: Complex64,
    b: Complex64,
    tol: &ToleranceSpec,
) -> Result<QuadOutcome>
where
    F: Fn(Complex64) -> Complex64,
{
    let d = b - a;
    adaptive(|u| f(a + d * u) * d, |u| a + d * u, &[0.0, 0.5, 1.0], tol)
}

/// Counterclockwise contour integral over `|w - center| = radius`.
pub fn integrate_circle<F>(f: F, center: Complex64, radius: f64, tol: &ToleranceSpec) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidTolerance(format!("circle radius {radius} must be positive")));
    }
    let point = |th: f64| center + Complex64::from_polar(radius, th);
    let g = |th: f64| {
        let e = Complex64::from_polar(radius, th);
        f(center + e) * Complex64::new(0.0, 1.0) * e
    };
    let breaks = [0.0, 0.5 * PI, PI, 1.5 * PI, 2.0 * PI];
    Ok(adaptive(g, point, &breaks, tol)?.value)
}

/// Integral of `f` over the whole real line via `t = tan(theta)`.
///
/// The caller promises `|f(t)| = O(|t|^-2)`; this is screened by sampling
/// `|f(t)| t^2` at `|t| = 1e5` and `1e6`.
pub fn integrate_real_line<F>(f: F, tol: &ToleranceSpec) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    Ok(integrate_real_line_outcome(f, tol)?.value)
}

pub(crate) fn integrate_real_line_outcome<F>(f: F, tol: &ToleranceSpec) -> Result<QuadOutcome>
where
    F: Fn(f64) -> Complex64,
{
    check_decay(&f)?;
    let g = |th: f64| {
        let t = th.tan();
        f(t) * (1.0 + t * t)
    };
    let breaks = [-FRAC_PI_2, -FRAC_PI_4, 0.0, FRAC_PI_4, FRAC_PI_2];
    adaptive(g, |th| Complex64::new(th.tan(), 0.0), &breaks, tol)
}

fn check_decay<F: Fn(f64) -> Complex64>(f: &F) -> Result<()> {
    let weighted = |t: f64| (f(t).norm() * t * t).max(f(-t).norm() * t * t);
    let at_1e5 = weighted(1e5);
    let at_1e6 = weighted(1e6);
    if !at_1e5.is_finite() || !at_1e6.is_finite() {
        return Err(Error::NonFiniteEvaluation {
            at: Complex64::new(1e6, 0.0),
        });
    }
    if at_1e6 > 2.0 * at_1e5 && at_1e6 > 1e-300 {
        return Err(Error::SlowDecay { at_1e5, at_1e6 });
    }
    Ok(())
}

/// Residue of `g` at `pole` as `(1/2 pi i)` times the circle integral.
pub fn residue_numeric<F>(g: F, pole: Complex64, radius: f64, tol: &ToleranceSpec) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    let loop_integral = integrate_circle(g, pole, radius, tol)?;
    Ok(loop_integral / Complex64::new(0.0, 2.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kronrod_weights_sum_to_two() {
        let k: f64 = WGK[10] + 2.0 * WGK[..10].iter().sum::<f64>();
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert_abs_diff_eq!(k, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn single_panel_is_exact_for_high_degree_polynomials() {
        // K21 integrates degree 31, G10 degree 19.
        let g = |x: f64| c(x.powi(30) + x.powi(18), 0.0);
        let p = gk21(&g, &|x| c(x, 0.0), -1.0, 1.0).unwrap();
        assert_abs_diff_eq!(p.value.re, 2.0 / 31.0 + 2.0 / 19.0, epsilon = 1e-14);
        let g = |x: f64| c(x.powi(18), 0.0);
        let p = gk21(&g, &|x| c(x, 0.0), -1.0, 1.0).unwrap();
        assert!(p.error < 1e-14);
    }

    #[test]
    fn segment_examples() {
        let tol = ToleranceSpec::default();
        let v = integrate_segment(|_| c(1.0, 0.0), c(0.0, 0.0), c(1.0, 1.0), &tol).unwrap();
        assert_abs_diff_eq!((v - c(1.0, 1.0)).norm(), 0.0, epsilon = 1e-14);
        let v = integrate_segment(|s| s, c(0.0, 0.0), c(2.0, 0.0), &tol).unwrap();
        assert_abs_diff_eq!((v - c(2.0, 0.0)).norm(), 0.0, epsilon = 1e-14);

        // closed-form antiderivative -Log(3i - s)
        let v = integrate_segment(|s| 1.0 / (c(0.0, 3.0) - s), c(0.0, 0.0), c(1.0, 0.0), &tol).unwrap();
        let exact = c(0.0, 3.0).ln() - c(-1.0, 3.0).ln();
        assert_abs_diff_eq!((v - exact).norm(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn circle_examples() {
        let tol = ToleranceSpec::default();
        let v = integrate_circle(|w| 1.0 / w, c(0.0, 0.0), 1.0, &tol).unwrap();
        assert_abs_diff_eq!((v - c(0.0, 2.0 * PI)).norm(), 0.0, epsilon = 1e-12);
        let v = integrate_circle(|_| c(1.0, 0.0), c(0.3, -2.0), 0.7, &tol).unwrap();
        assert_abs_diff_eq!(v.norm(), 0.0, epsilon = 1e-13);
        let v = integrate_circle(|w| 1.0 / ((w - 0.5) * (w - 0.5)), c(0.5, 0.0), 0.1, &tol).unwrap();
        assert_abs_diff_eq!(v.norm(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn real_line_examples() {
        let tol = ToleranceSpec::default();
        let v = integrate_real_line(|t| c(1.0 / (1.0 + t * t), 0.0), &tol).unwrap();
        assert_abs_diff_eq!(v.re, PI, epsilon = 1e-12);
        let v = integrate_real_line(|t| c(t / (1.0 + t * t).powi(2), 0.0), &tol).unwrap();
        assert_abs_diff_eq!(v.norm(), 0.0, epsilon = 1e-12);
        // residue at 2i of 1/(t^2+4)^2 gives pi/(2 * 2^3)
        let v = integrate_real_line(|t| c(1.0 / (t * t + 4.0).powi(2), 0.0), &tol).unwrap();
        assert_abs_diff_eq!(v.re, PI / 16.0, epsilon = 1e-13);
    }

    #[test]
    fn slow_decay_is_rejected() {
        let tol = ToleranceSpec::default();
        let err = integrate_real_line(|t| c(1.0 / (1.0 + t.abs()), 0.0), &tol).unwrap_err();
        assert!(matches!(err, Error::SlowDecay { .. }));
    }

    #[test]
    fn residue_examples() {
        let tol = ToleranceSpec::default();
        let r = residue_numeric(|w| 1.0 / (w - c(0.0, 1.0)), c(0.0, 1.0), 0.5, &tol).unwrap();
        assert_abs_diff_eq!((r - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
        let r = residue_numeric(|w| 3.0 / (w + c(0.0, 2.0)).powi(2), c(0.0, -2.0), 0.3, &tol).unwrap();
        assert_abs_diff_eq!(r.norm(), 0.0, epsilon = 1e-11);
        // e^w / w: the residue is the constant Taylor coefficient of e^w, here
        // recovered as the discrete circle mean of the truncated series.
        let n = 16;
        let oracle: Complex64 = (0..n)
            .map(|k| {
                let w = Complex64::from_polar(0.1, 2.0 * PI * k as f64 / n as f64);
                let mut term = c(1.0, 0.0);
                let mut sum = term;
                for m in 1..30 {
                    term *= w / m as f64;
                    sum += term;
                }
                sum
            })
            .sum::<Complex64>()
            / n as f64;
        let r = residue_numeric(|w| w.exp() / w, c(0.0, 0.0), 0.1, &tol).unwrap();
        assert_abs_diff_eq!((r - oracle).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((r - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let tol = ToleranceSpec::default();
        let err = integrate_segment(|_| c(f64::NAN, 0.0), c(0.0, 0.0), c(1.0, 0.0), &tol).unwrap_err();
        assert!(matches!(err, Error::NonFiniteEvaluation { .. }));
    }

    #[test]
    fn subdivision_limit_is_reported() {
        let tol = ToleranceSpec::new(1e-13, 1e-13, 3).unwrap();
        let err = integrate_segment(
            |s| 1.0 / (s - c(0.5, 1e-6)),
            c(0.0, 0.0),
            c(1.0, 0.0),
            &tol,
        )
        .unwrap_err();
        assert!(matches!(err, Error::SubdivisionLimit { .. }));
    }

    #[test]
    fn tolerance_floor_is_enforced() {
        assert!(ToleranceSpec::new(1e-16, 1e-10, 10).is_err());
        assert!(ToleranceSpec::new(1e-10, 1e-10, 0).is_err());
        assert!(ToleranceSpec::new(1e-10, 1e-10, 10).is_ok());
    }
}
