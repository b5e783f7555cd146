use std::path::PathBuf;

use clap::Args;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use quaddom::contact::{contact_equivalence_report, contact_field_boundary, family_invariance, ContactConfig};
use quaddom::families::{solve_family1, solve_family1_from_r};
use quaddom::numerics::Polyline;

use crate::args::{self, Grid};
use crate::failure::{CmdResult, Failure};
use crate::output::{csv_text, emit, json, num, re_im, read, read_spec};

#[derive(Debug, Args)]
pub struct ContactArgs {
    /// Curve as a map specification.
    #[arg(long, conflicts_with_all = ["csv", "sweep"], required_unless_present_any = ["csv", "sweep"])]
    spec: Option<PathBuf>,
    /// Curve samples as CSV with columns t, x, y.
    #[arg(long, conflicts_with = "sweep")]
    csv: Option<PathBuf>,
    /// Conchoid members `b=...` or `r=...` compared at the same points.
    #[arg(long, value_parser = args::grid)]
    sweep: Option<Grid>,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    sigma: f64,
    /// Evaluation point `re,im`, repeatable.
    #[arg(long = "z", value_parser = args::complex, allow_hyphen_values = true, default_value = "0,5")]
    zs: Vec<Complex64>,
    /// Asymptote height for CSV curves (default: height of the first sample).
    #[arg(long, allow_hyphen_values = true)]
    h: Option<f64>,
    #[arg(long, default_value_t = 1e-7)]
    threshold: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Deserialize)]
struct Sample {
    #[allow(dead_code)]
    t: f64,
    x: f64,
    y: f64,
}

const HEADER: [&str; 8] = ["z_re", "z_im", "F_re", "F_im", "F_residue_re", "F_residue_im", "abs_gap", "rel_gap"];

fn read_curve(path: &PathBuf) -> CmdResult<Polyline> {
    let text = read(path)?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut pts = Vec::new();
    for (i, rec) in rdr.deserialize::<Sample>().enumerate() {
        let s = rec.map_err(|e| Failure::schema(format!("{}: row {}: {e}", path.display(), i + 1)))?;
        pts.push(Complex64::new(s.x, s.y));
    }
    Polyline::new(pts).map_err(|e| Failure::schema(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct SweepReport {
    parameter: String,
    params: Vec<f64>,
    sigma: f64,
    zs: Vec<Complex64>,
    fields: Vec<Vec<Complex64>>,
    max_deviation: f64,
    threshold: f64,
    pass: bool,
}

pub fn run(a: ContactArgs) -> CmdResult {
    let tol = args::tolerance()?;
    if let Some(grid) = &a.sweep {
        let members = grid
            .values
            .iter()
            .map(|&p| {
                let sol = match grid.name.as_str() {
                    "b" => solve_family1(p)?,
                    "r" => solve_family1_from_r(p)?,
                    other => return Err(Failure::schema(format!("sweep: expected b=... or r=..., got `{other}`"))),
                };
                Ok(ContactConfig::from_map(sol.spec, a.sigma)?)
            })
            .collect::<CmdResult<Vec<_>>>()?;
        let inv = family_invariance(&members, &a.zs, &tol)?;
        let report = SweepReport {
            parameter: grid.name.clone(),
            params: grid.values.clone(),
            sigma: a.sigma,
            pass: inv.max_deviation < a.threshold,
            zs: inv.zs,
            fields: inv.fields,
            max_deviation: inv.max_deviation,
            threshold: a.threshold,
        };
        emit(&json(&report)?, a.out.as_deref())?;
        return if report.pass {
            Ok(())
        } else {
            Err(Failure::numeric(format!(
                "members disagree by {:e} (threshold {:e})",
                report.max_deviation, report.threshold
            )))
        };
    }

    if let Some(path) = &a.csv {
        let curve = read_curve(path)?;
        let h = a.h.unwrap_or(curve.points()[0].im);
        let cfg = ContactConfig::from_polyline(curve, a.sigma, h)?;
        let rows = a
            .zs
            .iter()
            .map(|&z| {
                let f = contact_field_boundary(&cfg, z, &tol)?;
                let [zr, zi] = re_im(z);
                let [fr, fi] = re_im(f);
                Ok(vec![zr, zi, fr, fi, String::new(), String::new(), String::new(), String::new()])
            })
            .collect::<CmdResult<Vec<_>>>()?;
        return emit(&csv_text(&HEADER, &rows)?, a.out.as_deref());
    }

    let spec = read_spec(a.spec.as_ref().expect("clap requires one curve source"))?;
    let cfg = ContactConfig::from_map(spec, a.sigma)?;
    let report = contact_equivalence_report(&cfg, &a.zs, a.threshold, &tol)?;
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            let mut v = Vec::with_capacity(8);
            v.extend(re_im(r.z));
            v.extend(re_im(r.boundary));
            v.extend(re_im(r.residue));
            v.push(num(r.abs_gap));
            v.push(num(r.rel_gap));
            v
        })
        .collect();
    emit(&csv_text(&HEADER, &rows)?, a.out.as_deref())?;
    if report.pass {
        Ok(())
    } else {
        Err(Failure::numeric(format!(
            "field routes disagree by {:e} (threshold {:e})",
            report.max_rel_gap, report.threshold
        )))
    }
}
