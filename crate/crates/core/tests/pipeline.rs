use num_complex::Complex64;

use quaddom::confmap::{check_univalence_boundary, classify_asymptote, AsymptoteClass, A2_TOL};
use quaddom::families::{family_limit_report, solve_many, FamilyKind};
use quaddom::io::{map_spec_to_json, parse_map_spec};
use quaddom::numerics::ToleranceSpec;
use quaddom::quadrature::{derive_distribution, verify_quadrature_identity, TestFunction};

const MIXED: &str = r#"{
  "version": 1,
  "q": {"A0": [0.1, -0.2], "A1": [1, 0], "A2": [0, 0]},
  "poles": [{"b": [0.3, 1], "coeffs": [[0.05, 0.02], [0.02, -0.01]]}],
  "segments": [{"nodes": [[-1, 1.5], [0.5, 2], [1.5, 1.2]], "coeffs": [[0.05, 0.01], [-0.03, 0.02]]}]
}"#;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn document_to_verified_identity() {
    let spec = parse_map_spec(MIXED).unwrap();
    assert!(check_univalence_boundary(&spec, 2048, 1e3).unwrap().passed());
    assert!(matches!(classify_asymptote(&spec, A2_TOL), AsymptoteClass::Line { .. }));

    let tol = ToleranceSpec::new(1e-13, 1e-10, 4000).unwrap();
    let dist = derive_distribution(&spec, &tol).unwrap();
    assert_eq!(dist.points.len(), 1);
    assert_eq!(dist.segments.len(), 2);
    let fs: Vec<_> = [(c(0.0, 3.0), 3), (c(2.0, 4.0), 4), (c(-3.0, 2.5), 6)]
        .into_iter()
        .map(|(z0, k)| TestFunction::new(z0, k).unwrap())
        .collect();
    let report = verify_quadrature_identity(&spec, &dist, &fs, 1e-7, &tol).unwrap();
    assert!(report.pass, "{report:?}");

    let again = parse_map_spec(&map_spec_to_json(&spec)).unwrap();
    assert_eq!(again, spec);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let params = [0.5, 0.7, 0.9];
    let run = || {
        let members: Vec<_> = solve_many(FamilyKind::Conchoid, &params)
            .into_iter()
            .map(|r| r.unwrap()[0].a)
            .collect();
        let limits = family_limit_report(FamilyKind::Conchoid, &params, 256).unwrap();
        (members, limits)
    };
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let pooled = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    assert_eq!(single.install(run), pooled.install(run));
}
