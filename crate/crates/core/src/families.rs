//! Three one-parameter families of maps with a single simple pole at `ib`
//! whose image domains are quadrature domains for a point mass at the origin.
//!
//! * Conchoid: `psi = w + ih + a/(w - ib)`, line asymptote.
//! * Parabola family: `psi = iw^2 + 2w + ih + a/(w - ib)`, parabola asymptote.
//! * Ray family: `psi = w^2 + h - ia/(w - ib)`, ray asymptote.
//!
//! In each case `h` is fixed by `psi(-ib) = 0` and `a` (or `b`) by requiring
//! the Schwarz function to have residue one at the origin.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::confmap::{check_univalence_boundary, trace_boundary_dense, ConformalMapSpec, PoleGroup, QuadraticPoly};
use crate::error::{Error, Result};
use crate::numerics::{cubic_roots, hausdorff_points};
use crate::par;

/// Largest `a` for which the ray-family cubic has positive roots, `(4/27)^(1/4)`.
pub fn family3_a_max() -> f64 {
    (4.0f64 / 27.0).powf(0.25)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Conchoid,
    ParabolaFamily,
    RayFamily,
}

impl FamilyKind {
    /// 1, 2 or 3.
    pub fn number(&self) -> u8 {
        match self {
            FamilyKind::Conchoid => 1,
            FamilyKind::ParabolaFamily => 2,
            FamilyKind::RayFamily => 3,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(FamilyKind::Conchoid),
            2 => Some(FamilyKind::ParabolaFamily),
            3 => Some(FamilyKind::RayFamily),
            _ => None,
        }
    }
}

/// Ray-family boundary shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family3Type {
    /// `b^3 < a < 4 b^3`: the horizontal coordinate has critical points off `t = 0`.
    TypeOne,
    /// `a < b^3`: the horizontal coordinate is monotone on each side of `t = 0`.
    TypeTwo,
}

/// A solved family member.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySolution {
    pub kind: FamilyKind,
    pub a: f64,
    pub b: f64,
    pub h: f64,
    pub derived: BTreeMap<String, f64>,
    pub type_tag: Option<Family3Type>,
    pub univalent: bool,
    pub spec: ConformalMapSpec,
}

impl FamilySolution {
    /// `psi(-ib)`, zero for a valid member.
    pub fn origin_residual(&self) -> Result<Complex64> {
        self.spec.eval_map(Complex64::new(0.0, -self.b))
    }

    /// Residual of the scalar equation fixing `a`.
    pub fn constraint_residual(&self) -> f64 {
        let (a, b) = (self.a, self.b);
        match self.kind {
            FamilyKind::Conchoid => a + a * a / (4.0 * b * b) - 1.0,
            FamilyKind::ParabolaFamily => 2.0 * a + 2.0 * a * b + a * a / (4.0 * b * b) - 1.0,
            FamilyKind::RayFamily => 8.0 * a * b.powi(3) - 4.0 * b * b + a * a,
        }
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            name,
            value: v,
            reason: "must be positive and finite",
        })
    }
}

fn simple_pole_spec(q: QuadraticPoly, b: f64, coeff: Complex64) -> Result<ConformalMapSpec> {
    ConformalMapSpec::new(q, vec![PoleGroup::simple(Complex64::new(0.0, b), coeff)?], vec![])
}

const SCREEN_POINTS: usize = 2048;
const SCREEN_SPAN: f64 = 1e3;

fn screen(spec: &ConformalMapSpec) -> Result<bool> {
    Ok(check_univalence_boundary(spec, SCREEN_POINTS, SCREEN_SPAN)?.passed())
}

/// Conchoid member for pole height `b > 0`: `a` is the positive root of
/// `a + a^2/(4 b^2) = 1` and `h = b - a/(2b)`. Also records `r = a/(2b)`
/// and `alpha = b` of the implicit form.
pub fn solve_family1(b: f64) -> Result<FamilySolution> {
    positive("b", b)?;
    let a = 2.0 / ((1.0 + 1.0 / (b * b)).sqrt() + 1.0);
    let h = b - a / (2.0 * b);
    let spec = simple_pole_spec(
        QuadraticPoly::new(Complex64::new(0.0, h), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
        b,
        Complex64::new(a, 0.0),
    )?;
    let derived = BTreeMap::from([("alpha".to_string(), b), ("r".to_string(), a / (2.0 * b))]);
    Ok(FamilySolution {
        kind: FamilyKind::Conchoid,
        a,
        b,
        h,
        derived,
        type_tag: None,
        univalent: screen(&spec)?,
        spec,
    })
}

/// Conchoid member with shape parameter `r` in `(0, 1)`: `b = (1/r - r)/2`.
pub fn solve_family1_from_r(r: f64) -> Result<FamilySolution> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::ParameterOutOfRange {
            name: "r",
            value: r,
            reason: "must lie in (0, 1)",
        });
    }
    solve_family1(0.5 * (1.0 / r - r))
}

/// `(y + r - alpha)(x^2 + (y + r)^2) - 2 r (y + r)^2`.
pub fn conchoid_residual(x: f64, y: f64, alpha: f64, r: f64) -> f64 {
    let yr = y + r;
    (yr - alpha) * (x * x + yr * yr) - 2.0 * r * yr * yr
}

/// Parabola-family member for `b > 0`: `a` is the positive root of
/// `2a + 2ab + a^2/(4 b^2) = 1` and `h = 2b + b^2 - a/(2b)`.
pub fn solve_family2(b: f64) -> Result<FamilySolution> {
    positive("b", b)?;
    let lin = 2.0 * (1.0 + b);
    let a = 2.0 / (lin + (lin * lin + 1.0 / (b * b)).sqrt());
    let h = 2.0 * b + b * b - a / (2.0 * b);
    let spec = simple_pole_spec(
        QuadraticPoly::new(Complex64::new(0.0, h), Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0)),
        b,
        Complex64::new(a, 0.0),
    )?;
    let derived = BTreeMap::from([("a_over_b".to_string(), a / b)]);
    Ok(FamilySolution {
        kind: FamilyKind::ParabolaFamily,
        a,
        b,
        h,
        derived,
        type_tag: None,
        univalent: screen(&spec)?,
        spec,
    })
}

/// Critical parameters `t^2` of the parabola-family boundary coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Family2Critical {
    /// Non-negative roots of `X'(t) = 0` in `t^2`, ascending.
    pub x_crit_tsq: Vec<f64>,
    /// Non-negative root of `Y'(t) = 0` in `t^2` other than `t = 0`.
    pub y_crit_tsq: Option<f64>,
}

/// `X` critical at `t^2 = (a - 4b^2 +- sqrt(a^2 - 16 a b^2))/4`, `Y` at `t^2 = sqrt(ab) - b^2`.
pub fn family2_critical_points(a: f64, b: f64) -> Family2Critical {
    let disc = a * a - 16.0 * a * b * b;
    let mut x_crit_tsq = Vec::new();
    if disc >= 0.0 {
        let s = disc.sqrt();
        for v in [(a - 4.0 * b * b - s) / 4.0, (a - 4.0 * b * b + s) / 4.0] {
            if v >= 0.0 {
                x_crit_tsq.push(v);
            }
        }
    }
    let y = (a * b).sqrt() - b * b;
    Family2Critical {
        x_crit_tsq,
        y_crit_tsq: (y >= 0.0).then_some(y),
    }
}

/// The boundary of `2w + iw^2 + ih + a/(w - ib)` has a loop for `t > 0`
/// exactly when the `Y` critical point lies strictly between two `X` critical points.
pub fn family2_loop_free(a: f64, b: f64) -> bool {
    let c = family2_critical_points(a, b);
    match (c.x_crit_tsq.as_slice(), c.y_crit_tsq) {
        ([lo, hi], Some(y)) if lo < hi => !(*lo < y && y < *hi),
        _ => true,
    }
}

/// Map `2w + iw^2 + ih + a/(w - ib)` with `h` chosen so that `psi(-ib) = 0`,
/// for arbitrary `(a, b)` off the residue constraint.
pub fn family2_map(a: f64, b: f64) -> Result<ConformalMapSpec> {
    positive("b", b)?;
    let h = 2.0 * b + b * b - a / (2.0 * b);
    simple_pole_spec(
        QuadraticPoly::new(Complex64::new(0.0, h), Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0)),
        b,
        Complex64::new(a, 0.0),
    )
}

/// Shape type of a ray-family pair `(a, b)`.
pub fn family3_type(a: f64, b: f64) -> Result<Family3Type> {
    positive("a", a)?;
    positive("b", b)?;
    let cube = b.powi(3);
    let near = |x: f64, y: f64| (x - y).abs() <= 1e-10 * x.abs().max(y.abs()).max(1.0);
    if near(a, cube) || near(a, 4.0 * cube) {
        return Err(Error::UnclassifiedBoundary { a, b });
    }
    if a < cube {
        Ok(Family3Type::TypeTwo)
    } else if a < 4.0 * cube {
        Ok(Family3Type::TypeOne)
    } else {
        Err(Error::LoopedRegime { a, b })
    }
}

/// A positive root of the ray-family cubic that did not yield a valid member.
#[derive(Debug, Clone, PartialEq)]
pub struct RejectedRoot {
    pub b: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Family3Roots {
    pub solutions: Vec<FamilySolution>,
    pub rejected: Vec<RejectedRoot>,
}

/// Positive real roots `b` of `8 a b^3 - 4 b^2 + a^2 = 0`, descending.
pub fn family3_pole_heights(a: f64) -> Result<Vec<f64>> {
    let roots = cubic_roots(8.0 * a, -4.0, 0.0, a * a)?;
    let scale = roots.iter().map(|z| z.norm()).fold(1.0, f64::max);
    Ok(roots
        .iter()
        .filter(|z| z.im.abs() <= 1e-12 * scale && z.re > 0.0)
        .map(|z| z.re)
        .collect())
}

/// Ray-family members for `0 < a <= (4/27)^(1/4)`: one candidate per positive
/// cubic root, with `h = b^2 - a/(2b)`. Candidates outside the two shape
/// types or failing the univalence screen are returned as rejected.
pub fn solve_family3(a: f64) -> Result<Family3Roots> {
    if !(a > 0.0 && a <= family3_a_max() + 1e-12) {
        return Err(Error::ParameterOutOfRange {
            name: "a",
            value: a,
            reason: "must lie in (0, (4/27)^(1/4)]",
        });
    }
    let mut solutions = Vec::new();
    let mut rejected = Vec::new();
    for b in family3_pole_heights(a)? {
        if !(b * b + a / (2.0 * b) > 0.0) {
            rejected.push(RejectedRoot {
                b,
                reason: "sign condition fails".into(),
            });
            continue;
        }
        let h = b * b - a / (2.0 * b);
        let spec = simple_pole_spec(
            QuadraticPoly::new(Complex64::new(h, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
            b,
            Complex64::new(0.0, -a),
        )?;
        let tag = match family3_type(a, b) {
            Ok(t) => t,
            Err(e) => {
                rejected.push(RejectedRoot { b, reason: e.to_string() });
                continue;
            }
        };
        if !screen(&spec)? {
            rejected.push(RejectedRoot {
                b,
                reason: "boundary fails the univalence screen".into(),
            });
            continue;
        }
        solutions.push(FamilySolution {
            kind: FamilyKind::RayFamily,
            a,
            b,
            h,
            derived: BTreeMap::new(),
            type_tag: Some(tag),
            univalent: true,
            spec,
        });
    }
    Ok(Family3Roots { solutions, rejected })
}

/// Half-width of the window used for limit distances.
pub const LIMIT_WINDOW: f64 = 5.0;
const LIMIT_SPACING: f64 = 0.005;

/// Hausdorff distance from a family member to its limit set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitPoint {
    pub param: f64,
    pub hausdorff: f64,
}

fn sample_curve<F: Fn(f64) -> Complex64>(curve: F, t0: f64, t1: f64, spacing: f64) -> Vec<Complex64> {
    // arc-length refinement of a uniform start
    let n = (((t1 - t0) / spacing).ceil() as usize).max(2);
    let mut out = Vec::new();
    for i in 0..n {
        let (ta, tb) = (t0 + (t1 - t0) * i as f64 / n as f64, t0 + (t1 - t0) * (i + 1) as f64 / n as f64);
        let (za, zb) = (curve(ta), curve(tb));
        let m = ((zb - za).norm() / spacing).ceil().max(1.0) as usize;
        for j in 0..m {
            out.push(curve(ta + (tb - ta) * j as f64 / m as f64));
        }
    }
    out.push(curve(t1));
    out
}

/// Dense samples of the limit set inside `|x| <= window`: the unit circle
/// together with the line `y = -1` (conchoids) or the parabola `y = (x/2)^2 - 1`.
pub fn limit_set_samples(kind: FamilyKind, window: f64) -> Result<Vec<Complex64>> {
    let mut pts = sample_curve(|s| Complex64::from_polar(1.0, s), 0.0, 2.0 * PI, LIMIT_SPACING);
    match kind {
        FamilyKind::Conchoid => pts.extend(sample_curve(|x| Complex64::new(x, -1.0), -window, window, LIMIT_SPACING)),
        FamilyKind::ParabolaFamily => pts.extend(sample_curve(
            |x| Complex64::new(x, 0.25 * x * x - 1.0),
            -window,
            window,
            LIMIT_SPACING,
        )),
        FamilyKind::RayFamily => return Err(Error::UnsupportedKind),
    }
    Ok(pts)
}

/// Boundary samples of a member with spacing at most `0.005`, clipped to `|x| <= window`.
pub fn clipped_boundary(spec: &ConformalMapSpec, window: f64, n_trace: usize) -> Result<Vec<Complex64>> {
    let span = 20.0 * (window + spec.feature_scale());
    let trace = trace_boundary_dense(spec, -span, span, n_trace, LIMIT_SPACING)?;
    Ok(trace.points.into_iter().filter(|z| z.re.abs() <= window).collect())
}

/// Window-clipped Hausdorff distance from each member to the family's limit
/// set. Parameters are `r` for conchoids and `b` for the parabola family.
pub fn family_limit_report(kind: FamilyKind, params: &[f64], n_trace: usize) -> Result<Vec<LimitPoint>> {
    let limit = limit_set_samples(kind, LIMIT_WINDOW)?;
    params
        .iter()
        .map(|&param| {
            let member = match kind {
                FamilyKind::Conchoid => solve_family1_from_r(param)?,
                FamilyKind::ParabolaFamily => solve_family2(param)?,
                FamilyKind::RayFamily => return Err(Error::UnsupportedKind),
            };
            let pts = clipped_boundary(&member.spec, LIMIT_WINDOW, n_trace)?;
            Ok(LimitPoint {
                param,
                hausdorff: hausdorff_points(&pts, &limit),
            })
        })
        .collect()
}

/// Solves a list of members in parallel, keeping input order.
pub fn solve_many(kind: FamilyKind, params: &[f64]) -> Vec<Result<Vec<FamilySolution>>> {
    par::map(params, |&p| match kind {
        FamilyKind::Conchoid => solve_family1_from_r(p).map(|s| vec![s]),
        FamilyKind::ParabolaFamily => solve_family2(p).map(|s| vec![s]),
        FamilyKind::RayFamily => solve_family3(p).map(|r| r.solutions),
    })
}
