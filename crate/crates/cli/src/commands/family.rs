use std::path::PathBuf;

use clap::Args;
use num_complex::Complex64;
use serde::Serialize;

use quaddom::confmap::trace_boundary_dense;
use quaddom::families::{
    clipped_boundary, limit_set_samples, solve_family1, solve_family1_from_r, solve_family2, solve_family3,
    Family3Type, FamilyKind, FamilySolution, LIMIT_WINDOW,
};
use quaddom::numerics::{hausdorff_points, ToleranceSpec};
use quaddom::par;
use quaddom::quadrature::derive_distribution;

use crate::args::{self, Grid, Window};
use crate::failure::{CmdResult, Failure};
use crate::output::{csv_text, emit, json, num};
use crate::svg::{Curve, Figure};

#[derive(Debug, Args)]
pub struct FamilyArgs {
    /// 1 (conchoids), 2 (parabola family) or 3 (ray family).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    kind: u8,
    /// `r=...` or `b=...` for kind 1, `b=...` for kind 2, `a=...` for kind 3.
    #[arg(long, value_parser = args::grid)]
    grid: Grid,
    /// Sweep CSV path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG overlay of the members and the limit set.
    #[arg(long)]
    figure: Option<PathBuf>,
    /// JSON report of distances to the limit set (kinds 1 and 2).
    #[arg(long)]
    limits: Option<PathBuf>,
    /// Figure window `xmin,xmax,ymin,ymax`.
    #[arg(long, value_parser = args::window, allow_hyphen_values = true)]
    window: Option<Window>,
    #[arg(long, default_value_t = 512)]
    n_trace: usize,
}

struct Row {
    param: f64,
    b: Option<f64>,
    solution: Option<FamilySolution>,
    weight: Option<Complex64>,
    hausdorff: Option<f64>,
    status: String,
}

fn type_name(t: Option<Family3Type>) -> &'static str {
    match t {
        Some(Family3Type::TypeOne) => "type_one",
        Some(Family3Type::TypeTwo) => "type_two",
        None => "",
    }
}

fn failed(param: f64, b: Option<f64>, status: String) -> Row {
    Row {
        param,
        b,
        solution: None,
        weight: None,
        hausdorff: None,
        status,
    }
}

fn solve(kind: FamilyKind, grid_name: &str, param: f64, tol: &ToleranceSpec) -> Vec<Row> {
    let solved = match (kind, grid_name) {
        (FamilyKind::Conchoid, "r") => solve_family1_from_r(param).map(|s| (vec![s], vec![])),
        (FamilyKind::Conchoid, _) => solve_family1(param).map(|s| (vec![s], vec![])),
        (FamilyKind::ParabolaFamily, _) => solve_family2(param).map(|s| (vec![s], vec![])),
        (FamilyKind::RayFamily, _) => solve_family3(param).map(|r| (r.solutions, r.rejected)),
    };
    let (solutions, rejected) = match solved {
        Ok(v) => v,
        Err(e) => return vec![failed(param, None, format!("error: {e}"))],
    };
    let mut rows: Vec<Row> = solutions
        .into_iter()
        .map(|s| match derive_distribution(&s.spec, tol) {
            Ok(d) => Row {
                param,
                b: Some(s.b),
                weight: d.points.first().and_then(|p| p.weights.first().copied()),
                solution: Some(s),
                hausdorff: None,
                status: "ok".into(),
            },
            Err(e) => failed(param, Some(s.b), format!("error: {e}")),
        })
        .collect();
    rows.extend(rejected.into_iter().map(|r| failed(param, Some(r.b), format!("rejected: {}", r.reason))));
    if rows.is_empty() {
        rows.push(failed(param, None, "rejected: no positive root".into()));
    }
    rows
}

#[derive(Serialize)]
struct LimitReport {
    kind: FamilyKind,
    parameter: String,
    window: f64,
    n_trace: usize,
    points: Vec<LimitEntry>,
    strictly_decreasing: bool,
}

#[derive(Serialize)]
struct LimitEntry {
    param: f64,
    b: f64,
    hausdorff: f64,
}

fn default_window(curves: &[Curve]) -> Window {
    let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for z in curves.iter().flat_map(|c| &c.points) {
        if z.re.abs() <= LIMIT_WINDOW && z.im.abs() <= LIMIT_WINDOW {
            x0 = x0.min(z.re);
            x1 = x1.max(z.re);
            y0 = y0.min(z.im);
            y1 = y1.max(z.im);
        }
    }
    let min_half = 0.15 * (x1 - x0).max(y1 - y0).max(1.0);
    let (xc, yc) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
    let (x0, x1) = (x0.min(xc - min_half), x1.max(xc + min_half));
    let (y0, y1) = (y0.min(yc - min_half), y1.max(yc + min_half));
    let pad = 0.05 * (x1 - x0).max(y1 - y0);
    Window {
        x_min: x0 - pad,
        x_max: x1 + pad,
        y_min: y0 - pad,
        y_max: y1 + pad,
    }
}

pub fn run(a: FamilyArgs) -> CmdResult {
    let kind = FamilyKind::from_number(a.kind).expect("range checked by clap");
    let allowed: &[&str] = match kind {
        FamilyKind::Conchoid => &["r", "b"],
        FamilyKind::ParabolaFamily => &["b"],
        FamilyKind::RayFamily => &["a"],
    };
    if !allowed.contains(&a.grid.name.as_str()) {
        return Err(Failure::schema(format!(
            "grid: kind {} takes {}, got `{}`",
            a.kind,
            allowed.join(" or "),
            a.grid.name
        )));
    }
    if a.limits.is_some() && kind == FamilyKind::RayFamily {
        return Err(Failure::schema("limits: only kinds 1 and 2 have a limit set"));
    }
    let tol = args::tolerance()?;
    let name = a.grid.name.clone();
    let mut rows: Vec<Row> = par::map(&a.grid.values, |&p| solve(kind, &name, p, &tol))
        .into_iter()
        .flatten()
        .collect();

    if let Some(path) = &a.limits {
        let limit = limit_set_samples(kind, LIMIT_WINDOW)?;
        let n_trace = a.n_trace;
        let dists = par::map(&rows, |r| {
            r.solution
                .as_ref()
                .map(|s| clipped_boundary(&s.spec, LIMIT_WINDOW, n_trace).map(|pts| hausdorff_points(&pts, &limit)))
        });
        let mut points = Vec::new();
        for (r, d) in rows.iter_mut().zip(dists) {
            match d {
                Some(Ok(h)) => {
                    r.hausdorff = Some(h);
                    points.push(LimitEntry {
                        param: r.param,
                        b: r.b.unwrap_or(f64::NAN),
                        hausdorff: h,
                    });
                }
                Some(Err(e)) => r.status = format!("error: {e}"),
                None => {}
            }
        }
        let report = LimitReport {
            kind,
            parameter: name.clone(),
            window: LIMIT_WINDOW,
            n_trace,
            strictly_decreasing: points.windows(2).all(|w| w[1].hausdorff < w[0].hausdorff),
            points,
        };
        emit(&json(&report)?, Some(path))?;
    }

    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let s = r.solution.as_ref();
            vec![
                kind.number().to_string(),
                num(r.param),
                s.map(|s| num(s.a)).unwrap_or_default(),
                r.b.map(num).unwrap_or_default(),
                s.map(|s| num(s.h)).unwrap_or_default(),
                type_name(s.and_then(|s| s.type_tag)).to_string(),
                s.map(|s| s.univalent.to_string()).unwrap_or_default(),
                r.weight.map(|w| num(w.re)).unwrap_or_default(),
                r.weight.map(|w| num(w.im)).unwrap_or_default(),
                r.hausdorff.map(num).unwrap_or_default(),
                r.status.clone(),
            ]
        })
        .collect();
    let header = [
        "kind", "param", "a", "b", "h", "type", "univalent", "weight_re", "weight_im", "hausdorff", "status",
    ];
    emit(&csv_text(&header, &table)?, a.out.as_deref())?;

    if let Some(path) = &a.figure {
        let members: Vec<&Row> = rows.iter().filter(|r| r.solution.is_some()).collect();
        let traces = par::map(&members, |r| {
            let spec = &r.solution.as_ref().unwrap().spec;
            let span = 20.0 * (LIMIT_WINDOW + spec.feature_scale());
            trace_boundary_dense(spec, -span, span, a.n_trace, 0.01).map(|t| t.points)
        });
        let mut curves = Vec::new();
        for (r, t) in members.iter().zip(traces) {
            let s = r.solution.as_ref().unwrap();
            let mut label = format!("{} = {}", name, r.param);
            if kind == FamilyKind::RayFamily {
                label = format!("{label}, b = {:.4} ({})", s.b, type_name(s.type_tag).replace('_', " "));
            }
            curves.push(Curve {
                points: t?,
                label,
                dashed: false,
                color: None,
            });
        }
        if kind != FamilyKind::RayFamily {
            let limit = limit_set_samples(kind, LIMIT_WINDOW)?;
            // circle first, then the outer curve; split so no chord joins them
            let split = limit
                .windows(2)
                .position(|w| (w[1] - w[0]).norm() > 0.1)
                .map_or(limit.len(), |i| i + 1);
            for (part, label) in [(&limit[..split], "limit set"), (&limit[split..], "")] {
                curves.push(Curve {
                    points: part.to_vec(),
                    label: label.into(),
                    dashed: true,
                    color: Some("#000000"),
                });
            }
        }
        let window = a.window.unwrap_or_else(|| default_window(&curves));
        let title = format!("family {} over {} = {:?}", kind.number(), name, a.grid.values);
        emit(&Figure { window, title, curves }.render(), Some(path))?;
    }

    if rows.iter().all(|r| r.solution.is_none()) {
        return Err(Failure::numeric("every family member failed"));
    }
    Ok(())
}
