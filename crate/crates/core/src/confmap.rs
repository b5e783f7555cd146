//! Conformal maps `psi(w) = q(w) + phi(w)` from the lower half-plane.
//!
//! `q` is a quadratic polynomial and the perturbation `phi` is a sum of pole
//! groups `a_j / (w - b)^(j+1)` with `b` in the upper half-plane and of
//! logarithmic segment chains `c_k * int_{d_k}^{d_{k+1}} ds / (w - s)` along
//! straight segments in the upper half-plane. The boundary of the image is
//! the curve `psi(t)`, `t` real, which approaches `q(t)` as `|t| -> inf`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::winding::winding_number;
use crate::numerics::{polyline_self_intersects, Polyline};
use crate::par;

const SINGULAR_DIST: f64 = 1e-12;

/// `q(w) = a2 w^2 + a1 w + a0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticPoly {
    #[serde(rename = "A0")]
    pub a0: Complex64,
    #[serde(rename = "A1")]
    pub a1: Complex64,
    #[serde(rename = "A2")]
    pub a2: Complex64,
}

impl QuadraticPoly {
    pub fn new(a0: Complex64, a1: Complex64, a2: Complex64) -> Self {
        Self { a0, a1, a2 }
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        (self.a2 * w + self.a1) * w + self.a0
    }

    pub fn derivative(&self, w: Complex64) -> Complex64 {
        self.a2 * w * 2.0 + self.a1
    }

    fn conj(&self) -> Self {
        Self::new(self.a0.conj(), self.a1.conj(), self.a2.conj())
    }

    fn is_finite(&self) -> bool {
        [self.a0, self.a1, self.a2].iter().all(|c| c.is_finite())
    }
}

/// Terms `coeffs[j] / (w - b)^(j+1)` for one pole `b` in the upper half-plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleGroup {
    b: Complex64,
    coeffs: Vec<Complex64>,
}

impl PoleGroup {
    pub fn new(b: Complex64, coeffs: Vec<Complex64>) -> Result<Self> {
        if !(b.is_finite() && b.im > 0.0) {
            return Err(Error::InvalidSpec(format!("pole {b} must lie in the open upper half-plane")));
        }
        match coeffs.last() {
            None => return Err(Error::InvalidSpec(format!("pole {b} has no coefficients"))),
            Some(last) if *last == Complex64::new(0.0, 0.0) => {
                return Err(Error::InvalidSpec(format!("pole {b}: highest-order coefficient is zero")))
            }
            _ => {}
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidSpec(format!("pole {b} has a non-finite coefficient")));
        }
        Ok(Self { b, coeffs })
    }

    /// Simple pole `a / (w - b)`.
    pub fn simple(b: Complex64, a: Complex64) -> Result<Self> {
        Self::new(b, vec![a])
    }

    pub fn location(&self) -> Complex64 {
        self.b
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Highest power index `m` (the group has `m + 1` terms).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// Chain of straight segments `d_1 -> d_2 -> ... -> d_{n+1}` with weights `c_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentChain {
    nodes: Vec<Complex64>,
    coeffs: Vec<Complex64>,
}

impl SegmentChain {
    pub fn new(nodes: Vec<Complex64>, coeffs: Vec<Complex64>) -> Result<Self> {
        if nodes.len() < 2 || coeffs.len() + 1 != nodes.len() {
            return Err(Error::InvalidSpec(format!(
                "segment chain needs n+1 nodes for n coefficients (got {} nodes, {} coefficients)",
                nodes.len(),
                coeffs.len()
            )));
        }
        if let Some(d) = nodes.iter().find(|d| !(d.is_finite() && d.im > 0.0)) {
            return Err(Error::InvalidSpec(format!("chain node {d} must lie in the open upper half-plane")));
        }
        for (i, d) in nodes.iter().enumerate() {
            if nodes[..i].contains(d) {
                return Err(Error::InvalidSpec(format!("chain node {d} is repeated")));
            }
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidSpec("chain has a non-finite coefficient".into()));
        }
        Ok(Self { nodes, coeffs })
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `(d_k, d_{k+1}, c_k)` for each segment.
    pub fn segments(&self) -> impl Iterator<Item = (Complex64, Complex64, Complex64)> + '_ {
        self.nodes.windows(2).zip(self.coeffs.iter()).map(|(w, c)| (w[0], w[1], *c))
    }
}

/// Distance from `w` to the closed segment `[a, b]`.
pub fn distance_to_segment(w: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (w - a).norm();
    }
    let s = ((w - a) * d.conj()).re / len2;
    let s = s.clamp(0.0, 1.0);
    (w - (a + d * s)).norm()
}

/// `int_{d_from}^{d_to} ds / (w - s)` along the straight segment, evaluated as
/// the principal `Log((w - d_from) / (w - d_to))`. The ratio is a negative real
/// only for `w` on the open segment, so this is single-valued off it.
pub fn segment_log_term(d_from: Complex64, d_to: Complex64, w: Complex64) -> Result<Complex64> {
    if distance_to_segment(w, d_from, d_to) < SINGULAR_DIST {
        return Err(Error::OnSegment {
            w,
            from: d_from,
            to: d_to,
        });
    }
    Ok(((w - d_from) / (w - d_to)).ln())
}

/// `psi = q + phi` with pole groups and segment chains.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalMapSpec {
    q: QuadraticPoly,
    poles: Vec<PoleGroup>,
    segments: Vec<SegmentChain>,
}

impl ConformalMapSpec {
    pub fn new(q: QuadraticPoly, poles: Vec<PoleGroup>, segments: Vec<SegmentChain>) -> Result<Self> {
        if !q.is_finite() {
            return Err(Error::InvalidSpec("polynomial coefficients must be finite".into()));
        }
        for (i, p) in poles.iter().enumerate() {
            if poles[..i].iter().any(|o| o.b == p.b) {
                return Err(Error::InvalidSpec(format!("pole {} is repeated", p.b)));
            }
            for chain in &segments {
                if chain.nodes.contains(&p.b) {
                    return Err(Error::InvalidSpec(format!("pole {} coincides with a chain node", p.b)));
                }
                if chain
                    .segments()
                    .any(|(a, b, _)| distance_to_segment(p.b, a, b) < SINGULAR_DIST)
                {
                    return Err(Error::InvalidSpec(format!("chain passes through pole {}", p.b)));
                }
            }
        }
        Ok(Self { q, poles, segments })
    }

    /// `psi(w) = q(w)` with no perturbation.
    pub fn polynomial(q: QuadraticPoly) -> Self {
        Self {
            q,
            poles: Vec::new(),
            segments: Vec::new(),
        }
    }

    /// The identity map `psi(w) = w`.
    pub fn identity() -> Self {
        Self::polynomial(QuadraticPoly::new(
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ))
    }

    pub fn q(&self) -> &QuadraticPoly {
        &self.q
    }

    pub fn poles(&self) -> &[PoleGroup] {
        &self.poles
    }

    pub fn segments(&self) -> &[SegmentChain] {
        &self.segments
    }

    /// All singular points of `psi` (poles and chain nodes), in the upper half-plane.
    pub fn singular_points(&self) -> Vec<Complex64> {
        self.poles
            .iter()
            .map(|p| p.b)
            .chain(self.segments.iter().flat_map(|c| c.nodes.iter().copied()))
            .collect()
    }

    /// Characteristic length of the perturbation: the largest `|b|` or `|d|`,
    /// or 1 for a pure polynomial.
    pub fn feature_scale(&self) -> f64 {
        let m = self.singular_points().iter().map(|z| z.norm()).fold(0.0, f64::max);
        if m > 0.0 {
            m
        } else {
            1.0
        }
    }

    /// Smallest imaginary part over poles and chain nodes, or `None` if `phi = 0`.
    pub fn min_singular_height(&self) -> Option<f64> {
        self.singular_points().iter().map(|z| z.im).reduce(f64::min)
    }

    fn check_argument(&self, w: Complex64) -> Result<()> {
        if !w.is_finite() {
            return Err(Error::SingularArgument { w });
        }
        if self.poles.iter().any(|p| (w - p.b).norm() < SINGULAR_DIST) {
            return Err(Error::SingularArgument { w });
        }
        Ok(())
    }

    /// Perturbation `phi(w) = psi(w) - q(w)`.
    pub fn perturbation(&self, w: Complex64) -> Result<Complex64> {
        self.check_argument(w)?;
        let mut sum = Complex64::new(0.0, 0.0);
        for p in &self.poles {
            let inv = 1.0 / (w - p.b);
            let mut pow = inv;
            for a in &p.coeffs {
                sum += a * pow;
                pow *= inv;
            }
        }
        for chain in &self.segments {
            for (from, to, c) in chain.segments() {
                let term = segment_log_term(from, to, w).map_err(|_| Error::SingularArgument { w })?;
                sum += c * term;
            }
        }
        Ok(sum)
    }

    /// `psi(w)`.
    pub fn eval_map(&self, w: Complex64) -> Result<Complex64> {
        Ok(self.q.eval(w) + self.perturbation(w)?)
    }

    /// `psi'(w)` in closed form.
    pub fn eval_map_derivative(&self, w: Complex64) -> Result<Complex64> {
        self.check_argument(w)?;
        let mut sum = self.q.derivative(w);
        for p in &self.poles {
            let inv = 1.0 / (w - p.b);
            let mut pow = inv * inv;
            for (j, a) in p.coeffs.iter().enumerate() {
                sum -= a * pow * (j as f64 + 1.0);
                pow *= inv;
            }
        }
        for chain in &self.segments {
            for (from, to, c) in chain.segments() {
                if distance_to_segment(w, from, to) < SINGULAR_DIST {
                    return Err(Error::SingularArgument { w });
                }
                sum += c * (1.0 / (w - from) - 1.0 / (w - to));
            }
        }
        Ok(sum)
    }

    /// `psi*(w) = conj(psi(conj w))`, evaluated directly from the conjugated
    /// coefficients and nodes. Its singularities lie in the lower half-plane.
    pub fn eval_star(&self, w: Complex64) -> Result<Complex64> {
        if !w.is_finite() {
            return Err(Error::SingularArgument { w });
        }
        let mut sum = self.q.conj().eval(w);
        for p in &self.poles {
            let bc = p.b.conj();
            if (w - bc).norm() < SINGULAR_DIST {
                return Err(Error::SingularArgument { w });
            }
            let inv = 1.0 / (w - bc);
            let mut pow = inv;
            for a in &p.coeffs {
                sum += a.conj() * pow;
                pow *= inv;
            }
        }
        for chain in &self.segments {
            for (from, to, c) in chain.segments() {
                let term = segment_log_term(from.conj(), to.conj(), w).map_err(|_| Error::SingularArgument { w })?;
                sum += c.conj() * term;
            }
        }
        Ok(sum)
    }

    /// Radius for a residue circle around `conj(b_k)`: half the distance to the
    /// real axis and to every other reflected singularity.
    pub fn residue_radius(&self, k: usize) -> Result<f64> {
        let p = self.poles.get(k).ok_or(Error::NoSuchPole(k))?;
        let center = p.b.conj();
        let mut r = p.b.im;
        for (j, o) in self.poles.iter().enumerate() {
            if j != k {
                r = r.min((o.b.conj() - center).norm());
            }
        }
        for chain in &self.segments {
            for (from, to, _) in chain.segments() {
                r = r.min(distance_to_segment(center, from.conj(), to.conj()));
            }
        }
        Ok(0.5 * r)
    }
}

/// Asymptotic curve `{q(t)}` of the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum AsymptoteClass {
    Line {
        direction: Complex64,
        offset: Complex64,
    },
    Parabola {
        #[serde(rename = "A2")]
        a2: Complex64,
        #[serde(rename = "A1")]
        a1: Complex64,
        #[serde(rename = "A0")]
        a0: Complex64,
    },
    Ray {
        #[serde(rename = "A2")]
        a2: Complex64,
        #[serde(rename = "A1")]
        a1: Complex64,
        #[serde(rename = "A0")]
        a0: Complex64,
    },
}

impl AsymptoteClass {
    pub fn name(&self) -> &'static str {
        match self {
            AsymptoteClass::Line { .. } => "line",
            AsymptoteClass::Parabola { .. } => "parabola",
            AsymptoteClass::Ray { .. } => "ray",
        }
    }
}

/// Default relative threshold on `|A2|`.
pub const A2_TOL: f64 = 1e-12;
/// Default threshold on `|Im(A1/A2)|`.
pub const RATIO_TOL: f64 = 1e-10;

/// Classification with a flag raised when a deciding quantity is within a
/// factor 100 of its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoteVerdict {
    pub class: AsymptoteClass,
    pub near_threshold: bool,
}

/// Line if `|A2| <= a2_tol (1 + |A1|)`, else parabola if `|Im(A1/A2)| > ratio_tol`, else ray.
pub fn classify_asymptote_with(spec: &ConformalMapSpec, a2_tol: f64, ratio_tol: f64) -> AsymptoteVerdict {
    let QuadraticPoly { a0, a1, a2 } = *spec.q();
    let near = |x: f64, thr: f64| x != 0.0 && x > thr / 100.0 && x < thr * 100.0;
    let a2_thr = a2_tol * (1.0 + a1.norm());
    if a2.norm() <= a2_thr {
        return AsymptoteVerdict {
            class: AsymptoteClass::Line {
                direction: a1,
                offset: a0,
            },
            near_threshold: near(a2.norm(), a2_thr),
        };
    }
    let ratio = (a1 / a2).im.abs();
    let class = if ratio > ratio_tol {
        AsymptoteClass::Parabola { a2, a1, a0 }
    } else {
        AsymptoteClass::Ray { a2, a1, a0 }
    };
    AsymptoteVerdict {
        class,
        near_threshold: near(a2.norm(), a2_thr) || near(ratio, ratio_tol),
    }
}

/// Classification using `tol` for both thresholds.
pub fn classify_asymptote(spec: &ConformalMapSpec, tol: f64) -> AsymptoteClass {
    classify_asymptote_with(spec, tol, tol).class
}

/// Parameter spacing for [`trace_boundary`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grading {
    Uniform,
    /// `t = s tan(theta)` with `theta` uniform and `s` the map's feature scale.
    TanGraded,
}

/// Sampled boundary `psi(t_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTrace {
    pub params: Vec<f64>,
    pub points: Vec<Complex64>,
}

impl BoundaryTrace {
    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// The trace as a polyline (consecutive duplicates dropped).
    pub fn to_polyline(&self) -> Result<Polyline> {
        Polyline::from_points_dedup(self.points.clone())
    }
}

/// Sample parameters on `[t_min, t_max]`.
pub fn sample_params(t_min: f64, t_max: f64, n: usize, grading: Grading, scale: f64) -> Vec<f64> {
    let last = (n - 1) as f64;
    let mut ts: Vec<f64> = match grading {
        Grading::Uniform => (0..n).map(|i| t_min + (t_max - t_min) * i as f64 / last).collect(),
        Grading::TanGraded => {
            let (lo, hi) = ((t_min / scale).atan(), (t_max / scale).atan());
            (0..n)
                .map(|i| scale * (lo + (hi - lo) * i as f64 / last).tan())
                .collect()
        }
    };
    ts[0] = t_min;
    ts[n - 1] = t_max;
    ts
}

/// Samples the boundary `psi(t)` at `n >= 2` parameters in `[t_min, t_max]`.
pub fn trace_boundary(
    spec: &ConformalMapSpec,
    t_min: f64,
    t_max: f64,
    n: usize,
    grading: Grading,
) -> Result<BoundaryTrace> {
    if n < 2 || !(t_min < t_max) || !t_min.is_finite() || !t_max.is_finite() {
        return Err(Error::InvalidSpec(format!(
            "trace needs n >= 2 and a finite range t_min < t_max (got n = {n}, [{t_min}, {t_max}])"
        )));
    }
    let params = sample_params(t_min, t_max, n, grading, spec.feature_scale());
    let points = par::try_map(&params, |&t| spec.eval_map(Complex64::new(t, 0.0)))?;
    Ok(BoundaryTrace { params, points })
}

/// Boundary samples refined until consecutive image points are at most
/// `max_gap` apart (starting from a tan-graded trace of `n0` points).
pub fn trace_boundary_dense(
    spec: &ConformalMapSpec,
    t_min: f64,
    t_max: f64,
    n0: usize,
    max_gap: f64,
) -> Result<BoundaryTrace> {
    let coarse = trace_boundary(spec, t_min, t_max, n0.max(2), Grading::TanGraded)?;
    let pieces = par::try_map(&(0..coarse.len() - 1).collect::<Vec<_>>(), |&i| {
        let mut out = Vec::new();
        let mut stack = vec![(coarse.params[i], coarse.points[i], coarse.params[i + 1], coarse.points[i + 1], 0u32)];
        while let Some((ta, za, tb, zb, depth)) = stack.pop() {
            if (zb - za).norm() <= max_gap || depth >= 40 {
                out.push((ta, za));
                continue;
            }
            let tm = 0.5 * (ta + tb);
            let zm = spec.eval_map(Complex64::new(tm, 0.0))?;
            stack.push((tm, zm, tb, zb, depth + 1));
            stack.push((ta, za, tm, zm, depth + 1));
        }
        Ok::<_, Error>(out)
    })?;
    let mut params = Vec::new();
    let mut points = Vec::new();
    for (t, z) in pieces.into_iter().flatten() {
        params.push(t);
        points.push(z);
    }
    params.push(*coarse.params.last().unwrap());
    points.push(*coarse.points.last().unwrap());
    Ok(BoundaryTrace { params, points })
}

/// Why a univalence screen failed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnivalenceFailure {
    /// The traced boundary meets itself.
    SelfIntersection,
    /// `psi'` vanishes somewhere in the sampled lower half-disk.
    CriticalPoint,
}

/// Outcome of [`check_univalence_boundary`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum UnivalenceVerdict {
    Pass,
    Fail {
        location: Complex64,
        reason: UnivalenceFailure,
    },
}

impl UnivalenceVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, UnivalenceVerdict::Pass)
    }
}

/// Closed contour bounding the lower half-disk of radius `r`: the real
/// segment `[-r, r]` for `s` in `[0, 1]`, then the lower semicircle back.
pub(crate) fn lower_half_disk_contour(r: f64, s: f64) -> Complex64 {
    if s <= 1.0 {
        Complex64::new(-r + 2.0 * r * s, 0.0)
    } else {
        Complex64::from_polar(r, -PI * (s - 1.0))
    }
}

/// Parameter breaks for [`lower_half_disk_contour`], graded toward `t = 0`.
pub(crate) fn lower_half_disk_breaks(r: f64, scale: f64, n: usize) -> Vec<f64> {
    let mut breaks: Vec<f64> = sample_params(-r, r, n, Grading::TanGraded, scale.min(r))
        .into_iter()
        .map(|t| (t + r) / (2.0 * r))
        .collect();
    breaks.extend((1..=n / 4).map(|i| 1.0 + i as f64 / (n / 4) as f64));
    breaks
}

/// Necessary-condition screen for univalence on the lower half-plane.
///
/// Traces the boundary with tan-graded sampling on `[-t_span, t_span]` (at
/// least 1024 points) and checks it for self-intersections, then counts the
/// zeros of `psi'` inside the lower half-disk of radius `t_span` by the
/// argument principle. Passing is not a proof of univalence.
pub fn check_univalence_boundary(spec: &ConformalMapSpec, n: usize, t_span: f64) -> Result<UnivalenceVerdict> {
    let n = n.max(1024);
    let trace = trace_boundary(spec, -t_span, t_span, n, Grading::TanGraded)?;
    if let Some(hit) = polyline_self_intersects(&trace.to_polyline()?) {
        return Ok(UnivalenceVerdict::Fail {
            location: hit.location,
            reason: UnivalenceFailure::SelfIntersection,
        });
    }

    let breaks = lower_half_disk_breaks(t_span, spec.feature_scale(), 512);
    let contour = |s: f64| lower_half_disk_contour(t_span, s);
    let derivative = |s: f64| {
        spec.eval_map_derivative(contour(s))
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    };
    let zeros = winding_number(derivative, &breaks, 0.25);
    match zeros {
        Some(w) if w.abs() < 0.5 => Ok(UnivalenceVerdict::Pass),
        _ => {
            // locate the smallest |psi'| on a coarse grid of the half-disk
            let location = critical_point_hint(spec, t_span);
            Ok(UnivalenceVerdict::Fail {
                location,
                reason: UnivalenceFailure::CriticalPoint,
            })
        }
    }
}

fn critical_point_hint(spec: &ConformalMapSpec, r: f64) -> Complex64 {
    let scale = spec.feature_scale();
    let mut best = (f64::INFINITY, Complex64::new(0.0, 0.0));
    for i in 0..200 {
        for j in 1..100 {
            let t = sample_params(-r, r, 200, Grading::TanGraded, scale)[i];
            let y = scale * (j as f64 / 100.0 * 20.0).exp() * 1e-4;
            let w = Complex64::new(t, -y);
            if let Ok(d) = spec.eval_map_derivative(w) {
                if d.norm() < best.0 {
                    best = (d.norm(), w);
                }
            }
        }
    }
    spec.eval_map(best.1).unwrap_or(best.1)
}

/// `max |psi(t) - q(t)|` over `|t|` in `[T, 10 T]` (log-spaced samples).
pub fn asymptote_deviation(spec: &ConformalMapSpec, t: f64) -> Result<f64> {
    let n = 256;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let s = t * 10f64.powf(i as f64 / (n - 1) as f64);
        for sign in [-1.0, 1.0] {
            let v = spec.perturbation(Complex64::new(sign * s, 0.0))?;
            worst = worst.max(v.norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `w + ih + a/(w - ib)` with the first-family constraint solved by hand.
    fn conchoid_map(b: f64) -> (ConformalMapSpec, f64, f64) {
        let a = 2.0 / ((1.0 + 1.0 / (b * b)).sqrt() + 1.0);
        let h = b - a / (2.0 * b);
        let spec = ConformalMapSpec::new(
            QuadraticPoly::new(c(0.0, h), c(1.0, 0.0), c(0.0, 0.0)),
            vec![PoleGroup::simple(c(0.0, b), c(a, 0.0)).unwrap()],
            vec![],
        )
        .unwrap();
        (spec, a, h)
    }

    fn mixed_spec() -> ConformalMapSpec {
        ConformalMapSpec::new(
            QuadraticPoly::new(c(0.1, 0.2), c(1.5, -0.3), c(0.2, 0.4)),
            vec![
                PoleGroup::new(c(0.3, 1.0), vec![c(0.2, 0.1), c(-0.05, 0.02), c(0.01, 0.0)]).unwrap(),
                PoleGroup::simple(c(-1.0, 0.5), c(0.1, -0.1)).unwrap(),
            ],
            vec![SegmentChain::new(vec![c(1.0, 1.0), c(2.0, 1.5), c(2.5, 0.8)], vec![c(0.2, 0.0), c(-0.1, 0.1)]).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn conchoid_map_sends_reflected_pole_to_origin() {
        let (spec, a, h) = conchoid_map(1.0);
        assert_abs_diff_eq!(a, 2.0 * (2f64.sqrt() - 1.0), epsilon = 1e-15);
        assert_abs_diff_eq!(h, 1.0 - a / 2.0, epsilon = 1e-15);
        assert!(spec.eval_map(c(0.0, -1.0)).unwrap().norm() < 1e-15);
    }

    #[test]
    fn identity_map() {
        let spec = ConformalMapSpec::identity();
        for w in [c(0.3, -2.0), c(-5.0, 0.0), c(1.0, 1.0)] {
            assert_eq!(spec.eval_map(w).unwrap(), w);
        }
    }

    #[test]
    fn derivative_examples() {
        let spec = ConformalMapSpec::polynomial(QuadraticPoly::new(c(0.0, 0.0), c(2.0, 0.0), c(0.0, 1.0)));
        assert_eq!(spec.eval_map_derivative(c(0.0, 0.0)).unwrap(), c(2.0, 0.0));
        let (spec, a, _) = conchoid_map(1.0);
        let d = spec.eval_map_derivative(c(0.0, -1.0)).unwrap();
        assert_abs_diff_eq!((d - c(1.0 + a / 4.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.re, 1.207_106_78, epsilon = 1e-8);
    }

    #[test]
    fn derivative_matches_central_differences() {
        let spec = mixed_spec();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let w = c(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..-0.05));
            let h = 1e-6 * (1.0 + w.norm());
            let fd = (spec.eval_map(w + h).unwrap() - spec.eval_map(w - h).unwrap()) / (2.0 * h);
            let d = spec.eval_map_derivative(w).unwrap();
            assert!((fd - d).norm() <= 1e-6 * d.norm().max(1.0), "w={w} fd={fd} d={d}");
        }
    }

    #[test]
    fn star_agrees_with_conjugation_on_the_real_line() {
        let spec = mixed_spec();
        for i in 0..200 {
            let t = -20.0 + 0.2 * i as f64 + 0.013;
            let w = c(t, 0.0);
            let s = spec.eval_star(w).unwrap();
            let p = spec.eval_map(w).unwrap().conj();
            assert!((s - p).norm() <= 1e-14 * p.norm().max(1.0));
        }
    }

    #[test]
    fn star_examples() {
        let spec = ConformalMapSpec::polynomial(QuadraticPoly::new(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)));
        assert_abs_diff_eq!((spec.eval_star(c(1.0, 1.0)).unwrap() - c(2.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        let (spec, _, _) = conchoid_map(1.0);
        // psi has its pole at +i; psi* is regular there and singular at -i
        assert!(spec.eval_star(c(0.0, 1.0)).unwrap().is_finite());
        assert!(spec.eval_star(c(0.0, -1.0)).is_err());
        assert!(spec.eval_map(c(0.0, 1.0)).is_err());
    }

    #[test]
    fn segment_log_examples() {
        assert_eq!(segment_log_term(c(0.0, 1.0), c(0.0, 1.0), c(3.0, 0.0)).unwrap(), c(0.0, 0.0));
        let v = segment_log_term(c(0.0, 1.0), c(0.0, 2.0), c(10.0, 0.0)).unwrap();
        let tol = crate::numerics::ToleranceSpec::default();
        let oracle = crate::numerics::integrate_segment(|s| 1.0 / (c(10.0, 0.0) - s), c(0.0, 1.0), c(0.0, 2.0), &tol).unwrap();
        assert!((v - oracle).norm() < 1e-12);
        assert!(matches!(
            segment_log_term(c(0.0, 1.0), c(0.0, 2.0), c(0.0, 1.5)),
            Err(Error::OnSegment { .. })
        ));
        for r in [1e3, 1e4] {
            let w = c(r * 0.6, -r * 0.8);
            let v = segment_log_term(c(0.0, 1.0), c(0.0, 2.0), w).unwrap();
            assert!(v.norm() <= 1.0 / (r - 2.0));
        }
    }

    #[test]
    fn segment_log_matches_quadrature_at_random_points() {
        let tol = crate::numerics::ToleranceSpec::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (d0, d1) = (c(-0.5, 0.5), c(1.0, 2.0));
        let mut tested = 0;
        while tested < 100 {
            let w = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..4.0));
            if distance_to_segment(w, d0, d1) < 0.05 {
                continue;
            }
            let v = segment_log_term(d0, d1, w).unwrap();
            let oracle = crate::numerics::integrate_segment(|s| 1.0 / (w - s), d0, d1, &tol).unwrap();
            assert!((v - oracle).norm() < 1e-12, "w={w}");
            tested += 1;
        }
    }

    #[test]
    fn classification_of_the_three_model_maps() {
        let (line, _, _) = conchoid_map(1.0);
        assert!(matches!(classify_asymptote(&line, 1e-10), AsymptoteClass::Line { .. }));
        let parabola = ConformalMapSpec::polynomial(QuadraticPoly::new(c(0.0, 0.5), c(2.0, 0.0), c(0.0, 1.0)));
        assert!(matches!(classify_asymptote(&parabola, 1e-10), AsymptoteClass::Parabola { .. }));
        let ray = ConformalMapSpec::polynomial(QuadraticPoly::new(c(0.7, 0.0), c(0.0, 0.0), c(1.0, 0.0)));
        assert!(matches!(classify_asymptote(&ray, 1e-10), AsymptoteClass::Ray { .. }));
    }

    #[test]
    fn classification_ignores_translation_and_parameter_flip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a2 = if rng.gen_bool(0.3) { c(0.0, 0.0) } else { c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)) };
            let a1 = if rng.gen_bool(0.3) { a2 * rng.gen_range(-2.0..2.0) } else { c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)) };
            let q = QuadraticPoly::new(c(0.0, 0.0), a1, a2);
            let base = classify_asymptote(&ConformalMapSpec::polynomial(q), 1e-10).name();
            let moved = QuadraticPoly::new(c(rng.gen_range(-9.0..9.0), rng.gen_range(-9.0..9.0)), a1, a2);
            let flipped = QuadraticPoly::new(c(0.0, 0.0), -a1, a2);
            assert_eq!(classify_asymptote(&ConformalMapSpec::polynomial(moved), 1e-10).name(), base);
            assert_eq!(classify_asymptote(&ConformalMapSpec::polynomial(flipped), 1e-10).name(), base);
        }
    }

    #[test]
    fn near_threshold_is_flagged() {
        let q = QuadraticPoly::new(c(0.0, 0.0), c(1.0, 0.0), c(1e-13, 0.0));
        let v = classify_asymptote_with(&ConformalMapSpec::polynomial(q), A2_TOL, RATIO_TOL);
        assert!(matches!(v.class, AsymptoteClass::Line { .. }));
        assert!(v.near_threshold);
    }

    #[test]
    fn trace_examples() {
        let tr = trace_boundary(&ConformalMapSpec::identity(), -1.0, 1.0, 3, Grading::Uniform).unwrap();
        assert_eq!(tr.params, vec![-1.0, 0.0, 1.0]);
        assert_eq!(tr.points, vec![c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);

        let (spec, a, h) = conchoid_map(1.0);
        let tr = trace_boundary(&spec, -1.0, 1.0, 3, Grading::TanGraded).unwrap();
        assert!((tr.points[1] - c(0.0, h + a)).norm() < 1e-15);
        assert_abs_diff_eq!(tr.points[1].im, 2f64.sqrt(), epsilon = 1e-8);

        let tr = trace_boundary(&spec, -50.0, 50.0, 101, Grading::TanGraded).unwrap();
        assert!(tr.params.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn reflected_spec_trace_is_the_mirror_image() {
        let spec = mixed_spec();
        let tr = trace_boundary(&spec, -30.0, 30.0, 301, Grading::TanGraded).unwrap();
        for (t, z) in tr.params.iter().zip(tr.points.iter()) {
            let star = spec.eval_star(c(*t, 0.0)).unwrap();
            assert!((star - z.conj()).norm() <= 1e-14 * z.norm().max(1.0));
        }
    }

    #[test]
    fn univalence_screen_examples() {
        assert!(check_univalence_boundary(&ConformalMapSpec::identity(), 1024, 1e3).unwrap().passed());
        let (spec, _, _) = conchoid_map(1.0);
        assert!(check_univalence_boundary(&spec, 2048, 1e3).unwrap().passed());
        // a = -10 at b = 0.1i: the boundary crosses itself on the imaginary axis
        let bad = ConformalMapSpec::new(
            QuadraticPoly::new(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)),
            vec![PoleGroup::simple(c(0.0, 0.1), c(-10.0, 0.0)).unwrap()],
            vec![],
        )
        .unwrap();
        let v = check_univalence_boundary(&bad, 2048, 1e3).unwrap();
        match v {
            UnivalenceVerdict::Fail { location, reason } => {
                assert_eq!(reason, UnivalenceFailure::SelfIntersection);
                assert!(location.re.abs() < 1e-2, "{location}");
            }
            UnivalenceVerdict::Pass => panic!("expected failure"),
        }
    }

    #[test]
    fn critical_point_in_lower_half_plane_is_detected() {
        // q(w) = w^2 + 2i w has psi' = 0 at w = -i; the boundary t^2 + 2it is simple
        let spec = ConformalMapSpec::polynomial(QuadraticPoly::new(c(0.0, 0.0), c(0.0, 2.0), c(1.0, 0.0)));
        match check_univalence_boundary(&spec, 1024, 100.0).unwrap() {
            UnivalenceVerdict::Fail { reason, .. } => assert_eq!(reason, UnivalenceFailure::CriticalPoint),
            UnivalenceVerdict::Pass => panic!("expected a critical point"),
        }
    }

    #[test]
    fn deviation_examples() {
        assert_eq!(asymptote_deviation(&ConformalMapSpec::identity(), 100.0).unwrap(), 0.0);
        let (spec, a, _) = conchoid_map(1.0);
        let d100 = asymptote_deviation(&spec, 100.0).unwrap();
        assert!(d100 <= a / 100.0);
        assert!(asymptote_deviation(&spec, 200.0).unwrap() < d100);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(PoleGroup::simple(c(0.0, -1.0), c(1.0, 0.0)).is_err());
        assert!(PoleGroup::new(c(0.0, 1.0), vec![c(1.0, 0.0), c(0.0, 0.0)]).is_err());
        assert!(SegmentChain::new(vec![c(0.0, 1.0)], vec![]).is_err());
        assert!(SegmentChain::new(vec![c(0.0, 1.0), c(0.0, 1.0)], vec![c(1.0, 0.0)]).is_err());
        let q = QuadraticPoly::new(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        let p = PoleGroup::simple(c(0.0, 1.5), c(1.0, 0.0)).unwrap();
        let chain = SegmentChain::new(vec![c(0.0, 1.0), c(0.0, 2.0)], vec![c(1.0, 0.0)]).unwrap();
        assert!(ConformalMapSpec::new(q, vec![p.clone(), p.clone()], vec![]).is_err());
        assert!(ConformalMapSpec::new(q, vec![p], vec![chain]).is_err());
    }
}
