mod common;

use std::fs;

use qosroute::scenario::{emit_csv, parse_config, run_matrix, ScenarioConfig};
use qosroute::PolicyKind;

use common::scenario_path;

fn short_config(dir: &std::path::Path, id: &str) -> ScenarioConfig {
    let topology = scenario_path("../data/nttnet.topo");
    let text = format!(
        "[scenario]\nid = {id}\ntopology = {}\nduration = 10\nwindow = 2\nseeds = 1,2,3,4,5\n\n[routing]\npolicy = spf\n\n[traffic]\nlambda = 800\n",
        topology.display()
    );
    parse_config(&text, dir).unwrap()
}

#[test]
fn low_load_scenario_matches_golden_canonical_form() {
    let cfg = ScenarioConfig::from_file(&scenario_path("nttnet-low.cfg")).unwrap();
    let golden = include_str!("golden/nttnet-low.canonical.cfg");
    assert_eq!(cfg.to_text(), golden);
    let again = parse_config(golden, &cfg.base_dir).unwrap();
    assert_eq!(again, cfg);
}

#[test]
fn bundled_scenarios_parse() {
    let dir = scenario_path("");
    let mut found = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "cfg") {
            let cfg = ScenarioConfig::from_file(&path).unwrap();
            assert!(cfg.seeds.len() >= 5, "{}", path.display());
            assert!(cfg.topology_path().exists());
            found += 1;
        }
    }
    assert_eq!(found, 3);
}

#[test]
fn matrix_yields_one_record_per_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = short_config(dir.path(), "short");
    let outcome = run_matrix(&[cfg], &PolicyKind::ALL, None);
    assert!(outcome.failures.is_empty());
    assert_eq!(outcome.records.len(), 20);
}

#[test]
fn matrix_results_ignore_execution_order() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (short_config(dir.path(), "a"), short_config(dir.path(), "b"));
    let forward = run_matrix(
        &[a.clone(), b.clone()],
        &[PolicyKind::Spf, PolicyKind::Koqra],
        Some(&[1, 2, 3]),
    );
    let backward = run_matrix(&[b, a], &[PolicyKind::Koqra, PolicyKind::Spf], Some(&[3, 2, 1]));
    let mut x = emit_csv(&forward.records).unwrap().lines().map(String::from).collect::<Vec<_>>();
    let mut y = emit_csv(&backward.records).unwrap().lines().map(String::from).collect::<Vec<_>>();
    x.sort();
    y.sort();
    assert_eq!(x, y);
}

#[test]
fn low_load_control_overhead() {
    let cfg = ScenarioConfig::from_file(&scenario_path("nttnet-low.cfg")).unwrap();
    let outcome = run_matrix(&[cfg], &[PolicyKind::Spf, PolicyKind::Kspqr], Some(&[1]));
    let bits = |p| {
        outcome
            .records
            .iter()
            .find(|r| r.policy == p)
            .unwrap()
            .metrics
            .totals
            .control_bits
    };
    assert_eq!(bits(PolicyKind::Spf), 0);
    assert!(bits(PolicyKind::Kspqr) > 0);
}
