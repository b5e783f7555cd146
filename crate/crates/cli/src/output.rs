use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::failure::{CmdResult, Failure};

/// Writes `text` to `out`, or to stdout when no path is given.
pub fn emit(text: &str, out: Option<&Path>) -> CmdResult {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::schema(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::schema(format!("stdout: {e}")))
        }
    }
}

pub fn json<T: Serialize>(value: &T) -> CmdResult<String> {
    let mut s = quaddom::io::versioned_json(value).map_err(|e| Failure::numeric(format!("serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn read(path: &Path) -> CmdResult<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::schema(format!("{}: {e}", path.display())))
}

pub fn read_spec(path: &Path) -> CmdResult<quaddom::confmap::ConformalMapSpec> {
    quaddom::io::parse_map_spec(&read(path)?).map_err(|e| {
        let f: Failure = e.into();
        Failure::new(f.code, format!("{}: {}", path.display(), f.message))
    })
}

/// Shortest round-trip form of a float, in exponent form for extreme magnitudes.
pub fn num(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    if v != 0.0 && v.is_finite() && !(1e-5..1e16).contains(&v.abs()) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

pub fn re_im(z: Complex64) -> [String; 2] {
    [num(z.re), num(z.im)]
}

/// CSV text from a header and rows of preformatted fields.
pub fn csv_text(header: &[&str], rows: &[Vec<String>]) -> CmdResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| Failure::numeric(format!("csv: {e}"));
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.write_record(r).map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::numeric(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Failure::numeric(format!("csv: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(num(-1.0), "-1");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(0.25), "0.25");
        assert_eq!(num(1.5e-17), "1.5e-17");
        assert_eq!(num(2e20), "2e20");
        assert_eq!("1.5e-17".parse::<f64>().unwrap(), 1.5e-17);
    }
}
