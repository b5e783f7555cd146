//! External field of a contact surface between two constant-density layers.
//!
//! The surface is a curve `Gamma` inside a horizontal strip `h1 < y < h2`
//! that approaches the line `y = h` at both ends. Its field above the strip
//! is the Cauchy integral
//! `F(z) = (sigma / 2 pi i) oint_Gamma (conj zeta - zeta + 2ih) / (zeta - z) dzeta`
//! with `Gamma` oriented as the boundary of the region below it. When
//! `Gamma = psi(R)` this equals `sigma` times the sum of residues of
//! `S(zeta) / (zeta - z)` over the singularities of the Schwarz function `S`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::confmap::{asymptote_deviation, trace_boundary, ConformalMapSpec, Grading};
use crate::error::{Error, Result};
use crate::numerics::quad::{adaptive, integrate_real_line_outcome};
use crate::numerics::winding::winding_number;
use crate::numerics::{integrate_circle, Polyline, ToleranceSpec};
use crate::par;

#[derive(Debug, Clone, PartialEq)]
pub enum ContactCurve {
    Map(ConformalMapSpec),
    /// Samples of `Gamma` in increasing parameter order.
    Polyline(Polyline),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContactConfig {
    pub sigma: f64,
    pub h: f64,
    pub strip: (f64, f64),
    pub curve: ContactCurve,
}

/// Vertical extent of `psi(R)`, padded by `1e-6` of its height.
fn trace_extent(spec: &ConformalMapSpec) -> Result<(f64, f64)> {
    let span = 1e4 * spec.feature_scale();
    let tr = trace_boundary(spec, -span, span, 16385, Grading::TanGraded)?;
    let (lo, hi) = tr
        .points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), z| (lo.min(z.im), hi.max(z.im)));
    let pad = 1e-6 * (1.0 + hi - lo);
    Ok((lo - pad, hi + pad))
}

impl ContactConfig {
    /// Curve `psi(R)` for a map with a horizontal line asymptote `q(t) = A1 t + A0`,
    /// `A1 > 0`. Then `h = Im A0` and the strip is the traced vertical extent.
    pub fn from_map(spec: ConformalMapSpec, sigma: f64) -> Result<Self> {
        let q = *spec.q();
        if q.a2 != Complex64::new(0.0, 0.0) || q.a1.im != 0.0 || q.a1.re <= 0.0 {
            return Err(Error::NonHorizontalAsymptote);
        }
        let strip = trace_extent(&spec)?;
        Ok(Self {
            sigma,
            h: q.a0.im,
            strip,
            curve: ContactCurve::Map(spec),
        })
    }

    /// Like [`ContactConfig::from_map`] with a declared strip that must contain the curve.
    pub fn from_map_in_strip(spec: ConformalMapSpec, sigma: f64, strip: (f64, f64)) -> Result<Self> {
        let mut cfg = Self::from_map(spec, sigma)?;
        let (lo, hi) = cfg.strip;
        if !(strip.0 < strip.1) || lo < strip.0 || hi > strip.1 {
            return Err(Error::CurveOutsideStrip(format!(
                "traced extent [{lo}, {hi}] is not inside [{}, {}]",
                strip.0, strip.1
            )));
        }
        cfg.strip = strip;
        Ok(cfg)
    }

    /// Sampled curve with asymptote height `h`; the strip is the sample extent.
    pub fn from_polyline(points: Polyline, sigma: f64, h: f64) -> Result<Self> {
        let pts = points.points();
        let (lo, hi) = pts
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), z| (lo.min(z.im), hi.max(z.im)));
        for end in [pts[0], pts[pts.len() - 1]] {
            if (end.im - h).abs() > 1e-2 * (1.0 + (hi - lo)) {
                return Err(Error::CurveOutsideStrip(format!(
                    "curve end {end} is not near the asymptote y = {h}"
                )));
            }
        }
        Ok(Self {
            sigma,
            h,
            strip: (lo.min(h), hi.max(h)),
            curve: ContactCurve::Polyline(points),
        })
    }

    pub fn with_sigma(&self, sigma: f64) -> Self {
        Self { sigma, ..self.clone() }
    }

    fn check_above(&self, z: Complex64) -> Result<()> {
        if !(z.im > self.strip.1) || !z.is_finite() {
            return Err(Error::EvaluationBelowStrip { z, top: self.strip.1 });
        }
        Ok(())
    }
}

/// Field above the strip from the Cauchy integral along the curve. A map
/// curve is integrated adaptively over `t`; a polyline by the trapezoid rule.
pub fn contact_field_boundary(cfg: &ContactConfig, z: Complex64, tol: &ToleranceSpec) -> Result<Complex64> {
    cfg.check_above(z)?;
    let two_ih = Complex64::new(0.0, 2.0 * cfg.h);
    let pref = -cfg.sigma / Complex64::new(0.0, 2.0 * PI);
    match &cfg.curve {
        ContactCurve::Map(spec) => {
            let scale = spec.feature_scale();
            let (d1, d2) = (asymptote_deviation(spec, 1e4 * scale)?, asymptote_deviation(spec, 1e5 * scale)?);
            if d2 > 0.5 * d1 && d2 > 1e-300 {
                return Err(Error::SlowDecay { at_1e5: d1, at_1e6: d2 });
            }
            let g = |t: f64| {
                let w = Complex64::new(t, 0.0);
                match (spec.eval_map(w), spec.eval_map_derivative(w)) {
                    (Ok(psi), Ok(d)) => (psi.conj() - psi + two_ih) * d / (psi - z),
                    _ => Complex64::new(f64::NAN, f64::NAN),
                }
            };
            Ok(pref * integrate_real_line_outcome(g, tol)?.value)
        }
        ContactCurve::Polyline(p) => {
            let g = |s: Complex64| (s.conj() - s + two_ih) / (s - z);
            let sum: Complex64 = p
                .points()
                .windows(2)
                .map(|w| (g(w[0]) + g(w[1])) * 0.5 * (w[1] - w[0]))
                .sum();
            Ok(pref * sum)
        }
    }
}

/// Counterclockwise ellipse with foci at the ends of `[p, q]` and semi-minor axis `minor`.
fn ellipse_integral<F>(f: F, p: Complex64, q: Complex64, minor: f64, tol: &ToleranceSpec) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    let mid = 0.5 * (p + q);
    let half = 0.5 * (q - p);
    let rho = (minor / half.norm()).asinh();
    let shift = Complex64::new(0.0, rho);
    let point = |th: f64| mid + half * (Complex64::new(th, 0.0) - shift).cos();
    let g = |th: f64| f(point(th)) * half * -(Complex64::new(th, 0.0) - shift).sin();
    let breaks: Vec<f64> = (0..=8).map(|i| PI * i as f64 / 4.0).collect();
    Ok(adaptive(g, point, &breaks, tol)?.value)
}

/// Field above the strip as `sigma` times the residues of `S(zeta)/(zeta - z)`,
/// pulled back to circles around the reflected poles and ellipses around the
/// reflected chain segments.
pub fn contact_field_residue(cfg: &ContactConfig, z: Complex64, tol: &ToleranceSpec) -> Result<Complex64> {
    cfg.check_above(z)?;
    let spec = match &cfg.curve {
        ContactCurve::Map(spec) => spec,
        ContactCurve::Polyline(_) => return Err(Error::RequiresMap),
    };
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let mut total = Complex64::new(0.0, 0.0);

    for (k, pole) in spec.poles().iter().enumerate() {
        let center = pole.location().conj();
        let radius = spec.residue_radius(k)?;
        let around = |th: f64| center + Complex64::from_polar(radius, th);
        let breaks: Vec<f64> = (0..=8).map(|i| PI * i as f64 / 4.0).collect();
        let gap = |th: f64| spec.eval_map(around(th)).map(|p| p - z).unwrap_or(nan);
        match winding_number(gap, &breaks, 0.25) {
            Some(n) if n.abs() < 0.5 => {}
            _ => return Err(Error::ContourCollision { z }),
        }
        let g = |w: Complex64| match (spec.eval_star(w), spec.eval_map(w), spec.eval_map_derivative(w)) {
            (Ok(s), Ok(p), Ok(d)) => s * d / (p - z),
            _ => nan,
        };
        total += integrate_circle(g, center, radius, tol)?;
    }

    let singular = spec.singular_points();
    for chain in spec.segments() {
        for (from, to, c) in chain.segments() {
            let (p, q) = (from.conj(), to.conj());
            let mut room = p.im.abs().min(q.im.abs());
            for s in &singular {
                let sc = s.conj();
                if sc != p && sc != q {
                    room = room.min(crate::confmap::distance_to_segment(sc, p, q));
                }
            }
            let minor = 0.3 * room;
            let g = |w: Complex64| {
                let log = ((w - p) / (w - q)).ln();
                match (spec.eval_map(w), spec.eval_map_derivative(w)) {
                    (Ok(v), Ok(d)) => c.conj() * log * d / (v - z),
                    _ => nan,
                }
            };
            total += ellipse_integral(g, p, q, minor, tol)?;
        }
    }
    Ok(total * cfg.sigma / Complex64::new(0.0, 2.0 * PI))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldRow {
    pub z: Complex64,
    pub boundary: Complex64,
    pub residue: Complex64,
    pub abs_gap: f64,
    pub rel_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactReport {
    pub rows: Vec<FieldRow>,
    pub max_rel_gap: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Both field routes at each `z`, with the largest relative gap.
pub fn contact_equivalence_report(
    cfg: &ContactConfig,
    zs: &[Complex64],
    threshold: f64,
    tol: &ToleranceSpec,
) -> Result<ContactReport> {
    for z in zs {
        cfg.check_above(*z)?;
    }
    let rows = par::try_map(zs, |&z| {
        let boundary = contact_field_boundary(cfg, z, tol)?;
        let residue = contact_field_residue(cfg, z, tol)?;
        let abs_gap = (boundary - residue).norm();
        let size = boundary.norm().max(residue.norm());
        let rel_gap = if size > 1e-300 { abs_gap / size } else { 0.0 };
        Ok::<_, Error>(FieldRow {
            z,
            boundary,
            residue,
            abs_gap,
            rel_gap,
        })
    })?;
    let max_rel_gap = rows.iter().map(|r| r.rel_gap).fold(0.0, f64::max);
    Ok(ContactReport {
        pass: max_rel_gap < threshold,
        rows,
        max_rel_gap,
        threshold,
    })
}

/// Fields of several curves at common points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub zs: Vec<Complex64>,
    /// `fields[m][i]`: boundary-route field of member `m` at `zs[i]`.
    pub fields: Vec<Vec<Complex64>>,
    /// Largest `|F_m(z) - F_0(z)| / |F_0(z)|` over members and points.
    pub max_deviation: f64,
}

/// Evaluates every member at every `z` (which must lie above all strips).
pub fn family_invariance(members: &[ContactConfig], zs: &[Complex64], tol: &ToleranceSpec) -> Result<InvarianceReport> {
    let fields = par::try_map(members, |cfg| {
        zs.iter().map(|&z| contact_field_boundary(cfg, z, tol)).collect::<Result<Vec<_>>>()
    })?;
    let mut max_deviation: f64 = 0.0;
    if let Some(base) = fields.first() {
        for other in &fields[1..] {
            for (a, b) in base.iter().zip(other) {
                max_deviation = max_deviation.max((a - b).norm() / a.norm().max(1e-300));
            }
        }
    }
    Ok(InvarianceReport {
        zs: zs.to_vec(),
        fields,
        max_deviation,
    })
}
