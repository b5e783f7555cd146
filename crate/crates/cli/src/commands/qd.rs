use std::path::PathBuf;

use clap::Subcommand;
use num_complex::Complex64;

use quaddom::quadrature::{derive_distribution, verify_quadrature_identity, TestFunction};

use crate::args;
use crate::failure::{CmdResult, Failure};
use crate::output::{emit, json, read_spec};

#[derive(Debug, Subcommand)]
pub enum QdCmd {
    /// Print the quadrature distribution as JSON.
    Derive {
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the distribution with boundary integrals of (z - z0)^-k.
    Verify {
        spec: PathBuf,
        /// `re,im,k`, repeatable.
        #[arg(long = "testfn", required = true, value_parser = args::test_function, allow_hyphen_values = true)]
        testfns: Vec<(Complex64, u32)>,
        #[arg(long, default_value_t = 1e-7)]
        threshold: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn run(cmd: QdCmd) -> CmdResult {
    let tol = args::tolerance()?;
    match cmd {
        QdCmd::Derive { spec, out } => {
            let spec = read_spec(&spec)?;
            let dist = derive_distribution(&spec, &tol)?;
            emit(&json(&dist)?, out.as_deref())
        }
        QdCmd::Verify {
            spec,
            testfns,
            threshold,
            out,
        } => {
            let spec = read_spec(&spec)?;
            let fs = testfns
                .iter()
                .map(|&(z0, k)| TestFunction::new(z0, k))
                .collect::<Result<Vec<_>, _>>()?;
            let dist = derive_distribution(&spec, &tol)?;
            let report = verify_quadrature_identity(&spec, &dist, &fs, threshold, &tol)?;
            emit(&json(&report)?, out.as_deref())?;
            if report.pass {
                Ok(())
            } else {
                Err(Failure::numeric(format!(
                    "quadrature identity not verified to {threshold:e}"
                )))
            }
        }
    }
}
