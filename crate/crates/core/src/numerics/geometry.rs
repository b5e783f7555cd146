//! Polyline predicates: self-intersection and Hausdorff distance.

use num_complex::Complex64;
use robust::{orient2d, Coord};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

/// An ordered chain of at least two finite points, no two consecutive equal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    points: Vec<Complex64>,
}

impl Polyline {
    pub fn new(points: Vec<Complex64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidPolyline(format!(
                "need at least 2 points, got {}",
                points.len()
            )));
        }
        if let Some(i) = points.iter().position(|p| !(p.re.is_finite() && p.im.is_finite())) {
            return Err(Error::InvalidPolyline(format!("point {i} is not finite")));
        }
        if let Some(i) = points.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::InvalidPolyline(format!(
                "points {i} and {} coincide",
                i + 1
            )));
        }
        Ok(Self { points })
    }

    /// Builds a polyline after dropping consecutive duplicates.
    pub fn from_points_dedup(mut points: Vec<Complex64>) -> Result<Self> {
        points.dedup();
        Self::new(points)
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn segment_count(&self) -> usize {
        self.points.len() - 1
    }
}

/// Where a polyline first meets itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfIntersection {
    /// Index of the earlier segment (points `first`, `first + 1`).
    pub first: usize,
    pub second: usize,
    pub location: Complex64,
}

fn coord(p: Complex64) -> Coord<f64> {
    Coord { x: p.re, y: p.im }
}

fn orient(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    orient2d(coord(a), coord(b), coord(c))
}

fn within_box(a: Complex64, b: Complex64, p: Complex64) -> bool {
    p.re >= a.re.min(b.re) && p.re <= a.re.max(b.re) && p.im >= a.im.min(b.im) && p.im <= a.im.max(b.im)
}

/// Exact segment-segment test (touching and collinear overlap count).
fn segments_meet(p1: Complex64, p2: Complex64, p3: Complex64, p4: Complex64) -> Option<Complex64> {
    let o1 = orient(p1, p2, p3);
    let o2 = orient(p1, p2, p4);
    let o3 = orient(p3, p4, p1);
    let o4 = orient(p3, p4, p2);

    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        let d1 = p2 - p1;
        let d2 = p4 - p3;
        let denom = d1.re * d2.im - d1.im * d2.re;
        let s = ((p3 - p1).re * d2.im - (p3 - p1).im * d2.re) / denom;
        return Some(p1 + d1 * s);
    }
    if o1 == 0.0 && within_box(p1, p2, p3) {
        return Some(p3);
    }
    if o2 == 0.0 && within_box(p1, p2, p4) {
        return Some(p4);
    }
    if o3 == 0.0 && within_box(p3, p4, p1) {
        return Some(p1);
    }
    if o4 == 0.0 && within_box(p3, p4, p2) {
        return Some(p2);
    }
    None
}

#[derive(Clone, Copy)]
struct Bbox {
    min_x: f64,
    max_x: f64,
    min_y: f64,
    max_y: f64,
}

impl Bbox {
    fn of(a: Complex64, b: Complex64) -> Self {
        Self {
            min_x: a.re.min(b.re),
            max_x: a.re.max(b.re),
            min_y: a.im.min(b.im),
            max_y: a.im.max(b.im),
        }
    }

    fn overlaps(&self, o: &Bbox) -> bool {
        self.min_x <= o.max_x && o.min_x <= self.max_x && self.min_y <= o.max_y && o.min_y <= self.max_y
    }
}

/// First pair of non-adjacent segments that meet, if any.
///
/// Pairwise O(n^2) with a bounding-box prefilter; the orientation tests use
/// adaptive exact arithmetic. The earliest pair (by first, then second index)
/// is reported regardless of thread scheduling.
pub fn polyline_self_intersects(p: &Polyline) -> Option<SelfIntersection> {
    let pts = p.points();
    let nseg = p.segment_count();
    if nseg < 3 {
        return None;
    }
    let boxes: Vec<Bbox> = pts.windows(2).map(|w| Bbox::of(w[0], w[1])).collect();

    let hits = par::map_range(nseg, |i| {
        for j in (i + 2)..nseg {
            if !boxes[i].overlaps(&boxes[j]) {
                continue;
            }
            if let Some(location) = segments_meet(pts[i], pts[i + 1], pts[j], pts[j + 1]) {
                return Some(SelfIntersection {
                    first: i,
                    second: j,
                    location,
                });
            }
        }
        None
    });
    hits.into_iter().flatten().next()
}

fn directed_hausdorff(from: &[Complex64], to: &[Complex64]) -> f64 {
    let nearest = par::map(from, |a| {
        to.iter().map(|b| (a - b).norm_sqr()).fold(f64::INFINITY, f64::min)
    });
    nearest.into_iter().fold(0.0, f64::max).sqrt()
}

/// Symmetric Hausdorff distance between the vertex sets.
pub fn hausdorff_distance(p: &Polyline, q: &Polyline) -> f64 {
    hausdorff_points(p.points(), q.points())
}

/// Hausdorff distance between two finite point sets (both non-empty).
pub fn hausdorff_points(p: &[Complex64], q: &[Complex64]) -> f64 {
    directed_hausdorff(p, q).max(directed_hausdorff(q, p))
}
