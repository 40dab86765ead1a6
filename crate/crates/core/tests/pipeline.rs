//! Cross-module pipeline checks: optimizer output instantiated as concrete
//! configurations, verified pairwise, and re-checked by the sampled oracle.

use conewidth::diameter::{diameter_oracle, verify_configuration, Configuration};
use conewidth::geometry::ConeParams;
use conewidth::optimizer::evaluate;
use conewidth::sphere::generate_annulus_code;

#[test]
fn feasible_records_instantiate_as_valid_configurations() {
    // optimum-shaped, baseline-shaped, and an interior feasible point
    for (r, d) in [(0.9050650, 1.8101300), (1.0, 1.95), (0.95, 1.93)] {
        let rec = evaluate(r, d);
        assert!(rec.feasible, "({r}, {d}) expected feasible");
        let params = ConeParams::derive(r, d).unwrap();
        let psi = rec.psi_required + 1e-6;
        let gen = generate_annulus_code(3, psi, 64, 50_000, 7).unwrap();
        assert!(!gen.code.is_empty());
        let config = Configuration::from_annulus_code(&gen.code, params).unwrap();
        let verdict = verify_configuration(&config).unwrap();
        assert!(
            verdict.ok,
            "configuration from feasible record ({r}, {d}) fails: {:?}",
            verdict.failures
        );
        let est = diameter_oracle(&config, 128, 7);
        assert!(
            est.diameter <= d * (1.0 + 1e-9),
            "oracle {} above d = {d}",
            est.diameter
        );
    }
}

#[test]
fn annulus_code_json_schema_is_stable() {
    let gen = generate_annulus_code(2, 1.0, 2, 10_000, 1).unwrap();
    let text = serde_json::to_string(&gen.code).unwrap();
    // field order is part of the file format
    let d = text.find("\"dimension\"").unwrap();
    let p = text.find("\"psi\"").unwrap();
    let pts = text.find("\"points\"").unwrap();
    assert!(d < p && p < pts);
    let back: conewidth::AnnulusCode = serde_json::from_str(&text).unwrap();
    assert_eq!(back, gen.code);
}
