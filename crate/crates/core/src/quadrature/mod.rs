//! Quadrature identities `int_Omega f dA = T(f)` for `Omega = psi(H-)`.
//!
//! The distribution `T` is read off the map: each pole group of `psi` at `b`
//! contributes derivatives of `f` at `psi(conj b)`, each segment chain
//! contributes line integrals between the images of its reflected nodes.
//! Three routes to `int_Omega f dA` are provided: `T(f)`, the boundary
//! integral over `psi(R)`, and a brute-force pullback over a half-disk.

mod cauchy;

pub use cauchy::{
    cauchy_kernel, cauchy_transform_compact, generalized_cauchy_transform, log_to_segments, CompactDensity,
};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::confmap::{distance_to_segment, lower_half_disk_breaks, lower_half_disk_contour, ConformalMapSpec};
use crate::error::{Error, Result};
use crate::numerics::quad::{adaptive, integrate_real_line_outcome};
use crate::numerics::winding::winding_number;
use crate::numerics::{integrate_segment, residue_numeric, ToleranceSpec};
use crate::par;

/// `weights[j]` multiplies `f^(j)(beta)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointNode {
    pub beta: Complex64,
    pub weights: Vec<Complex64>,
}

/// `weight * int f(s) ds` along the straight segment `delta_from -> delta_to`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentNode {
    pub delta_from: Complex64,
    pub delta_to: Complex64,
    pub weight: Complex64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct QuadratureDistribution {
    pub points: Vec<PointNode>,
    pub segments: Vec<SegmentNode>,
}

impl QuadratureDistribution {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.segments.is_empty()
    }
}

/// `f(z) = (z - z0)^(-k)` with `k >= 3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub z0: Complex64,
    pub k: u32,
}

impl TestFunction {
    pub fn new(z0: Complex64, k: u32) -> Result<Self> {
        if !z0.is_finite() {
            return Err(Error::InvalidTestFunction(format!("pole {z0} is not finite")));
        }
        if k < 3 {
            return Err(Error::InvalidTestFunction(format!("decay order {k} must be at least 3")));
        }
        Ok(Self { z0, k })
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        (z - self.z0).powi(-(self.k as i32))
    }

    /// `f^(j)(z) = (-1)^j k (k+1) ... (k+j-1) (z - z0)^(-k-j)`.
    pub fn derivative(&self, j: usize, z: Complex64) -> Complex64 {
        let mut coef = 1.0;
        for i in 0..j {
            coef *= -((self.k as usize + i) as f64);
        }
        (z - self.z0).powi(-(self.k as i32) - j as i32) * coef
    }

    /// Antiderivative `(z - z0)^(1-k) / (1-k)`.
    pub fn antiderivative(&self, z: Complex64) -> Complex64 {
        let e = 1 - self.k as i32;
        (z - self.z0).powi(e) / e as f64
    }
}

/// Reads `T` off the map.
///
/// For the pole group at `b` with coefficients `a_j`, the node is
/// `beta = psi(conj b)` and the weights solve
/// `pi sum_j conj(a_j) Res[(f o psi) psi' / (w - conj b)^(j+1)] = sum_j alpha_j f^(j)(beta)`.
/// Probing with `f_i = (z - beta)^i` isolates `alpha_i = L(f_i) / i!`.
/// Each chain segment `d_k -> d_{k+1}` with weight `c_k` becomes
/// `psi(conj d_k) -> psi(conj d_{k+1})` with weight `pi conj(c_k)`.
pub fn derive_distribution(spec: &ConformalMapSpec, tol: &ToleranceSpec) -> Result<QuadratureDistribution> {
    tol.validate()?;
    let groups: Vec<usize> = (0..spec.poles().len()).collect();
    let points = par::try_map(&groups, |&k| derive_point_node(spec, k, tol))?;

    let mut segments = Vec::new();
    for chain in spec.segments() {
        for (from, to, c) in chain.segments() {
            segments.push(SegmentNode {
                delta_from: spec.eval_map(from.conj())?,
                delta_to: spec.eval_map(to.conj())?,
                weight: c.conj() * PI,
            });
        }
    }
    Ok(QuadratureDistribution { points, segments })
}

fn derive_point_node(spec: &ConformalMapSpec, k: usize, tol: &ToleranceSpec) -> Result<PointNode> {
    let group = &spec.poles()[k];
    let center = group.location().conj();
    let beta = spec.eval_map(center)?;
    let slope = spec.eval_map_derivative(center)?.norm();
    if slope < 1e-10 {
        return Err(Error::IllConditionedJetSystem {
            pole_index: k,
            derivative: slope,
        });
    }
    let radius = spec.residue_radius(k)?;
    let mut weights = Vec::with_capacity(group.coeffs().len());
    let mut factorial = 1.0;
    for i in 0..group.coeffs().len() {
        if i > 0 {
            factorial *= i as f64;
        }
        let mut functional = Complex64::new(0.0, 0.0);
        for (j, a) in group.coeffs().iter().enumerate() {
            let g = |w: Complex64| {
                let psi = spec.eval_map(w).unwrap_or(Complex64::new(f64::NAN, 0.0));
                let dpsi = spec.eval_map_derivative(w).unwrap_or(Complex64::new(f64::NAN, 0.0));
                (psi - beta).powi(i as i32) * dpsi / (w - center).powi(j as i32 + 1)
            };
            functional += a.conj() * residue_numeric(g, center, radius, tol)?;
        }
        weights.push(functional * PI / factorial);
    }
    Ok(PointNode { beta, weights })
}

/// `T(f)` with exact derivatives of `f` and adaptive segment integrals.
pub fn evaluate_distribution(dist: &QuadratureDistribution, f: &TestFunction) -> Result<Complex64> {
    const NODE_GAP: f64 = 1e-10;
    let tol = ToleranceSpec::default();
    let mut sum = Complex64::new(0.0, 0.0);
    for node in &dist.points {
        if (node.beta - f.z0).norm() < NODE_GAP {
            return Err(Error::NodeAtPole { z0: f.z0 });
        }
        for (j, alpha) in node.weights.iter().enumerate() {
            sum += alpha * f.derivative(j, node.beta);
        }
    }
    for seg in &dist.segments {
        if distance_to_segment(f.z0, seg.delta_from, seg.delta_to) < NODE_GAP {
            return Err(Error::NodeAtPole { z0: f.z0 });
        }
        sum += seg.weight * integrate_segment(|s| f.eval(s), seg.delta_from, seg.delta_to, &tol)?;
    }
    Ok(sum)
}

/// `int_Omega f dA` as the boundary integral
/// `-(1/2i) int_R conj(psi(t)) f(psi(t)) psi'(t) dt`.
///
/// The parameter runs left to right, which traverses the boundary of
/// `psi(H-)` clockwise; the leading minus restores the positive orientation.
pub fn boundary_quadrature_integral(spec: &ConformalMapSpec, f: &TestFunction, tol: &ToleranceSpec) -> Result<Complex64> {
    let g = |t: f64| {
        let w = Complex64::new(t, 0.0);
        match (spec.eval_star(w), spec.eval_map(w), spec.eval_map_derivative(w)) {
            (Ok(star), Ok(psi), Ok(d)) => star * f.eval(psi) * d,
            _ => Complex64::new(f64::NAN, f64::NAN),
        }
    };
    let out = integrate_real_line_outcome(g, tol)?;
    Ok(-out.value / Complex64::new(0.0, 2.0))
}

/// Radius of a lower half-disk whose complement maps far away from `z0`.
fn screening_radius(spec: &ConformalMapSpec, z0: Complex64) -> f64 {
    let q = spec.q();
    let reach = z0.norm() + q.a0.norm() + 1.0;
    let scale = spec.feature_scale();
    let grow = if q.a2.norm() > 0.0 {
        (reach / q.a2.norm()).sqrt() + q.a1.norm() / q.a2.norm()
    } else {
        reach / q.a1.norm().max(1e-300)
    };
    8.0 * (1.0 + scale + grow)
}

/// Number of preimages of `z0` in the lower half-plane, counted by the
/// argument principle on a large half-disk, or `None` if `z0` is on the
/// traced boundary.
pub fn preimage_count(spec: &ConformalMapSpec, z0: Complex64) -> Option<f64> {
    let r = screening_radius(spec, z0);
    let breaks = lower_half_disk_breaks(r, spec.feature_scale(), 512);
    let curve = |s: f64| {
        spec.eval_map(lower_half_disk_contour(r, s))
            .map(|p| p - z0)
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    };
    // the contour runs clockwise around the half-disk
    winding_number(curve, &breaks, 0.25).map(|n| -n)
}

/// `Ok` iff `z0` lies outside the closure of `psi(H-)`.
pub fn check_admissible(spec: &ConformalMapSpec, f: &TestFunction) -> Result<()> {
    match preimage_count(spec, f.z0) {
        Some(n) if n.abs() < 0.5 => Ok(()),
        _ => Err(Error::InadmissibleTestFunction { z0: f.z0 }),
    }
}

/// Half-disk pullback integral with its truncation estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PullbackOutcome {
    pub value: Complex64,
    pub tail: f64,
}

/// `int f(psi(w)) |psi'(w)|^2 dA_w` over the lower half-disk of radius `r`,
/// in polar coordinates with adaptive rules in both directions.
///
/// The neglected exterior is estimated as `pi r^2 max|g(r e^{i theta})| / (p - 2)`
/// with `p = k deg(q) - 2 (deg(q) - 1)` the decay order of the integrand.
/// Raises [`Error::TruncationDominates`] when this exceeds the tolerance.
pub fn pullback_area_integral(
    spec: &ConformalMapSpec,
    f: &TestFunction,
    r: f64,
    tol: &ToleranceSpec,
) -> Result<PullbackOutcome> {
    tol.validate()?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidTestFunction(format!("radius {r} must be positive")));
    }
    let integrand = |w: Complex64| -> Complex64 {
        match (spec.eval_map(w), spec.eval_map_derivative(w)) {
            (Ok(psi), Ok(d)) => f.eval(psi) * d.norm_sqr(),
            _ => Complex64::new(f64::NAN, f64::NAN),
        }
    };
    let inner_tol = tol.with_tols(tol.abs_tol * 1e-3, tol.rel_tol * 1e-2);
    let ring = |rho: f64| -> Result<Complex64> {
        if rho == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let breaks = [-PI, -0.75 * PI, -0.5 * PI, -0.25 * PI, 0.0];
        let out = adaptive(
            |th| integrand(Complex64::from_polar(rho, th)),
            |th| Complex64::from_polar(rho, th),
            &breaks,
            &inner_tol,
        )?;
        Ok(out.value * rho)
    };

    let scale = spec.feature_scale();
    let mut radii = vec![0.0];
    let mut s = scale / 8.0;
    while s < r {
        radii.push(s);
        s *= 2.0;
    }
    radii.push(r);
    let panels: Vec<(f64, f64)> = radii.windows(2).map(|w| (w[0], w[1])).collect();
    let panel_tol = tol.with_tols(tol.abs_tol / panels.len() as f64, tol.rel_tol * 0.1);
    let pieces = par::try_map(&panels, |&(lo, hi)| {
        let failure = std::cell::Cell::new(None);
        let out = adaptive(
            |rho| match ring(rho) {
                Ok(v) => v,
                Err(e) => {
                    failure.set(Some(e));
                    Complex64::new(f64::NAN, f64::NAN)
                }
            },
            |rho| Complex64::new(rho, 0.0),
            &[lo, 0.5 * (lo + hi), hi],
            &panel_tol,
        );
        match (failure.into_inner(), out) {
            (Some(e), _) => Err(e),
            (None, out) => out.map(|o| o.value),
        }
    })?;
    let value: Complex64 = pieces.into_iter().sum();

    let deg = if spec.q().a2.norm() > 0.0 { 2.0 } else { 1.0 };
    let p = f.k as f64 * deg - 2.0 * (deg - 1.0);
    let edge = (0..=64)
        .map(|i| integrand(Complex64::from_polar(r, -PI * i as f64 / 64.0)).norm())
        .fold(0.0, f64::max);
    let tail = PI * r * r * edge / (p - 2.0);
    let allowed = tol.abs_tol.max(tol.rel_tol * value.norm());
    if !(tail <= allowed) {
        return Err(Error::TruncationDominates { tail, tolerance: allowed });
    }
    Ok(PullbackOutcome { value, tail })
}

/// One line of a verification report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub z0: Complex64,
    pub k: u32,
    #[serde(rename = "T_of_f")]
    pub t_of_f: Complex64,
    pub boundary_integral: Complex64,
    pub abs_gap: f64,
    pub rel_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub records: Vec<VerificationRecord>,
    pub threshold: f64,
    pub pass: bool,
}

/// Compares `T(f)` with the boundary integral for each admissible `f`.
/// A record passes when its relative gap is below `threshold`, or its
/// absolute gap when `|T(f)| < 1e-12`.
pub fn verify_quadrature_identity(
    spec: &ConformalMapSpec,
    dist: &QuadratureDistribution,
    fs: &[TestFunction],
    threshold: f64,
    tol: &ToleranceSpec,
) -> Result<VerificationReport> {
    for f in fs {
        check_admissible(spec, f)?;
    }
    let records = par::try_map(fs, |f| {
        let t_of_f = evaluate_distribution(dist, f)?;
        let boundary_integral = boundary_quadrature_integral(spec, f, tol)?;
        let abs_gap = (t_of_f - boundary_integral).norm();
        let rel_gap = if t_of_f.norm() > 0.0 { abs_gap / t_of_f.norm() } else { f64::INFINITY };
        Ok::<_, Error>(VerificationRecord {
            z0: f.z0,
            k: f.k,
            t_of_f,
            boundary_integral,
            abs_gap,
            rel_gap,
        })
    })?;
    let pass = records.iter().all(|r| {
        if r.t_of_f.norm() < 1e-12 {
            r.abs_gap < threshold
        } else {
            r.rel_gap < threshold
        }
    });
    Ok(VerificationReport {
        records,
        threshold,
        pass,
    })
}

/// `(psi(conj b_k), (1/2 pi i) oint psi* psi' dw)` around `conj b_k`, the
/// residue of the Schwarz function at the image of the reflected pole.
pub fn schwarz_residue(spec: &ConformalMapSpec, pole_index: usize, tol: &ToleranceSpec) -> Result<(Complex64, Complex64)> {
    let radius = spec.residue_radius(pole_index)?;
    schwarz_residue_with_radius(spec, pole_index, radius, tol)
}

/// [`schwarz_residue`] on a circle of the given radius.
pub fn schwarz_residue_with_radius(
    spec: &ConformalMapSpec,
    pole_index: usize,
    radius: f64,
    tol: &ToleranceSpec,
) -> Result<(Complex64, Complex64)> {
    let center = spec.poles().get(pole_index).ok_or(Error::NoSuchPole(pole_index))?.location().conj();
    let location = spec.eval_map(center)?;
    let g = |w: Complex64| match (spec.eval_star(w), spec.eval_map_derivative(w)) {
        (Ok(s), Ok(d)) => s * d,
        _ => Complex64::new(f64::NAN, f64::NAN),
    };
    Ok((location, residue_numeric(g, center, radius, tol)?))
}
