mod common;

use gftpl::{verify, ExperimentConfig};

#[test]
fn every_example_passes_its_invariant_suite() {
    for entry in std::fs::read_dir(common::example("")).unwrap() {
        let path = entry.unwrap().path();
        let report = verify(&ExperimentConfig::from_path(&path).unwrap()).unwrap();
        assert!(report.passed(), "{}: {:?}", path.display(), report.checks);
        let names: Vec<&str> = report.checks.iter().map(|c| c.name.as_str()).collect();
        assert!(names.contains(&"implementability") && names.contains(&"decomposition"));
    }
}

#[test]
fn oracle_configs_check_equivalence() {
    let report = verify(&common::parse(&common::example_text("vcg_minimal.toml"))).unwrap();
    assert!(report
        .checks
        .iter()
        .any(|c| c.name == "oracle equivalence" && c.pass));
}

#[test]
fn contextual_config_checks_the_separator() {
    let report = verify(&common::parse(&common::example_text("contextual.toml"))).unwrap();
    assert!(report
        .checks
        .iter()
        .any(|c| c.name == "separator" && c.pass));
    let text = common::example_text("contextual.toml").replace("[1, 2, 4, 0]", "[1, 2, 4]");
    let report = verify(&common::parse(&text)).unwrap();
    assert!(!report.passed());
}
