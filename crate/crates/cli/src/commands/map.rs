use std::path::PathBuf;

use clap::Subcommand;
use num_complex::Complex64;
use serde::Serialize;

use quaddom::confmap::{check_univalence_boundary, classify_asymptote, trace_boundary, Grading, UnivalenceVerdict};

use crate::args;
use crate::failure::{CmdResult, Failure, EXIT_GEOMETRY};
use crate::output::{csv_text, emit, json, num, read_spec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum GradingArg {
    Uniform,
    Tan,
}

#[derive(Debug, Subcommand)]
pub enum MapCmd {
    /// Print psi(w) and psi'(w).
    Eval {
        spec: PathBuf,
        #[arg(long, value_parser = args::complex, allow_hyphen_values = true)]
        w: Complex64,
    },
    /// Write boundary samples as CSV (t, x, y).
    Trace {
        spec: PathBuf,
        #[arg(long, default_value_t = 1001)]
        n: usize,
        #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
        tmin: f64,
        #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
        tmax: f64,
        #[arg(long, value_enum, default_value_t = GradingArg::Uniform)]
        grading: GradingArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the asymptote class and curve coefficients.
    Classify {
        spec: PathBuf,
        #[arg(long, default_value_t = quaddom::confmap::A2_TOL)]
        tol: f64,
    },
    /// Screen the map for univalence; exits 5 on failure.
    Univalence {
        spec: PathBuf,
        #[arg(long, default_value_t = 4096)]
        n: usize,
        #[arg(long, default_value_t = 1e3)]
        span: f64,
    },
}

#[derive(Serialize)]
struct EvalOut {
    w: Complex64,
    psi: Complex64,
    dpsi: Complex64,
}

pub fn run(cmd: MapCmd) -> CmdResult {
    match cmd {
        MapCmd::Eval { spec, w } => {
            let spec = read_spec(&spec)?;
            let out = EvalOut {
                w,
                psi: spec.eval_map(w)?,
                dpsi: spec.eval_map_derivative(w)?,
            };
            emit(&json(&out)?, None)
        }
        MapCmd::Trace {
            spec,
            n,
            tmin,
            tmax,
            grading,
            out,
        } => {
            let spec = read_spec(&spec)?;
            let grading = match grading {
                GradingArg::Uniform => Grading::Uniform,
                GradingArg::Tan => Grading::TanGraded,
            };
            let tr = trace_boundary(&spec, tmin, tmax, n, grading)?;
            let rows: Vec<_> = tr
                .params
                .iter()
                .zip(&tr.points)
                .map(|(t, z)| vec![num(*t), num(z.re), num(z.im)])
                .collect();
            emit(&csv_text(&["t", "x", "y"], &rows)?, out.as_deref())
        }
        MapCmd::Classify { spec, tol } => {
            let spec = read_spec(&spec)?;
            emit(&json(&classify_asymptote(&spec, tol))?, None)
        }
        MapCmd::Univalence { spec, n, span } => {
            let spec = read_spec(&spec)?;
            let verdict = check_univalence_boundary(&spec, n, span)?;
            emit(&json(&verdict)?, None)?;
            match verdict {
                UnivalenceVerdict::Pass => Ok(()),
                UnivalenceVerdict::Fail { location, reason } => Err(Failure::new(
                    EXIT_GEOMETRY,
                    format!("univalence screen failed ({reason:?}) near {location}"),
                )),
            }
        }
    }
}
