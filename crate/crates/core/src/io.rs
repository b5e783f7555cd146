//! JSON documents for map specifications and reports.
//!
//! Complex numbers are `[re, im]` arrays. Canonical output has sorted keys
//! and shortest round-trip floats.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::confmap::{ConformalMapSpec, PoleGroup, QuadraticPoly, SegmentChain};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoleDocument {
    pub b: Complex64,
    pub coeffs: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainDocument {
    pub nodes: Vec<Complex64>,
    pub coeffs: Vec<Complex64>,
}

/// On-disk form of a [`ConformalMapSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpecDocument {
    pub version: u32,
    pub q: QuadraticPoly,
    #[serde(default)]
    pub poles: Vec<PoleDocument>,
    #[serde(default)]
    pub segments: Vec<ChainDocument>,
}

impl MapSpecDocument {
    pub fn from_spec(spec: &ConformalMapSpec) -> Self {
        Self {
            version: FORMAT_VERSION,
            q: *spec.q(),
            poles: spec
                .poles()
                .iter()
                .map(|p| PoleDocument {
                    b: p.location(),
                    coeffs: p.coeffs().to_vec(),
                })
                .collect(),
            segments: spec
                .segments()
                .iter()
                .map(|c| ChainDocument {
                    nodes: c.nodes().to_vec(),
                    coeffs: c.coeffs().to_vec(),
                })
                .collect(),
        }
    }

    pub fn to_spec(&self) -> Result<ConformalMapSpec> {
        if self.version != FORMAT_VERSION {
            return Err(Error::InvalidSpec(format!(
                "version: expected {FORMAT_VERSION}, got {}",
                self.version
            )));
        }
        let poles = self
            .poles
            .iter()
            .enumerate()
            .map(|(i, p)| {
                PoleGroup::new(p.b, p.coeffs.clone()).map_err(|e| Error::InvalidSpec(format!("poles[{i}]: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let segments = self
            .segments
            .iter()
            .enumerate()
            .map(|(i, c)| {
                SegmentChain::new(c.nodes.clone(), c.coeffs.clone())
                    .map_err(|e| Error::InvalidSpec(format!("segments[{i}]: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        ConformalMapSpec::new(self.q, poles, segments)
    }
}

/// Why a document could not be read.
#[derive(Debug)]
pub enum ReadError {
    /// Malformed JSON or a field of the wrong shape.
    Schema(serde_json::Error),
    /// Well-formed document describing an invalid map.
    Spec(Error),
}

impl std::fmt::Display for ReadError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReadError::Schema(e) => write!(f, "schema error: {e}"),
            ReadError::Spec(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ReadError {}

pub fn parse_map_spec(text: &str) -> std::result::Result<ConformalMapSpec, ReadError> {
    let doc: MapSpecDocument = serde_json::from_str(text).map_err(ReadError::Schema)?;
    doc.to_spec().map_err(ReadError::Spec)
}

/// Pretty JSON with sorted keys.
pub fn canonical_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    // serde_json's default map is ordered by key
    let v = serde_json::to_value(value)?;
    serde_json::to_string_pretty(&v)
}

pub fn map_spec_to_json(spec: &ConformalMapSpec) -> String {
    canonical_json(&MapSpecDocument::from_spec(spec)).expect("map documents always serialize")
}

/// `value` serialized as an object with a `version` field added.
pub fn versioned_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut v = serde_json::to_value(value)?;
    if let serde_json::Value::Object(map) = &mut v {
        map.insert("version".into(), FORMAT_VERSION.into());
    }
    serde_json::to_string_pretty(&v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn reads_a_document() {
        let text = r#"{"version":1,"q":{"A0":[0,0.5],"A1":[1,0],"A2":[0,0]},
            "poles":[{"b":[0,1],"coeffs":[[0.8,0]]}]}"#;
        let spec = parse_map_spec(text).unwrap();
        assert_eq!(spec.poles().len(), 1);
        assert_eq!(spec.q().a0, c(0.0, 0.5));
    }

    #[test]
    fn schema_and_spec_errors_are_distinguished() {
        assert!(matches!(parse_map_spec("{\"version\":1}"), Err(ReadError::Schema(_))));
        assert!(matches!(
            parse_map_spec(r#"{"version":1,"q":{"A0":[0,0],"A1":[1,0],"A2":[0,0]},"extra":1}"#),
            Err(ReadError::Schema(_))
        ));
        let bad_pole = r#"{"version":1,"q":{"A0":[0,0],"A1":[1,0],"A2":[0,0]},"poles":[{"b":[0,-1],"coeffs":[[1,0]]}]}"#;
        match parse_map_spec(bad_pole) {
            Err(ReadError::Spec(e)) => assert!(e.to_string().contains("poles[0]")),
            other => panic!("{other:?}"),
        }
        let bad_version = r#"{"version":2,"q":{"A0":[0,0],"A1":[1,0],"A2":[0,0]}}"#;
        assert!(matches!(parse_map_spec(bad_version), Err(ReadError::Spec(_))));
    }

    #[test]
    fn canonical_output_sorts_keys() {
        let s = map_spec_to_json(&ConformalMapSpec::identity());
        let a0 = s.find("\"A0\"").unwrap();
        let a2 = s.find("\"A2\"").unwrap();
        let poles = s.find("\"poles\"").unwrap();
        let version = s.find("\"version\"").unwrap();
        assert!(a0 < a2 && poles < version);
    }

    fn cplx() -> impl Strategy<Value = Complex64> {
        (-1e3..1e3f64, -1e3..1e3f64).prop_map(|(a, b)| c(a, b))
    }

    proptest! {
        #[test]
        fn round_trip_is_byte_identical(
            q in (cplx(), cplx(), cplx()),
            b in (-5.0..5.0f64, 0.01..5.0f64),
            coeffs in prop::collection::vec(cplx(), 1..4),
        ) {
            prop_assume!(coeffs.last().unwrap().norm() > 0.0);
            let spec = ConformalMapSpec::new(
                QuadraticPoly::new(q.0, q.1, q.2),
                vec![PoleGroup::new(c(b.0, b.1), coeffs).unwrap()],
                vec![SegmentChain::new(vec![c(0.0, 7.0), c(1.0, 8.0)], vec![c(0.5, 0.25)]).unwrap()],
            ).unwrap();
            let once = map_spec_to_json(&spec);
            let back = parse_map_spec(&once).unwrap();
            prop_assert_eq!(&back, &spec);
            prop_assert_eq!(map_spec_to_json(&back), once);
        }
    }
}
