//! Batch execution of scenario × policy × seed runs.

use std::fs;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::kpaths::{all_pairs_candidates, CandidateTable};
use crate::policy::{PolicyKind, PolicyState};
use crate::sim::{self, InFlight, MetricsSeries};
use crate::topology::{load_topology, Graph};

use super::config::ScenarioConfig;

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub scenario: String,
    pub policy: PolicyKind,
    pub seed: u64,
    pub metrics: MetricsSeries,
    pub in_flight: InFlight,
    pub wall_clock: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub scenario: String,
    pub policy: Option<PolicyKind>,
    pub seed: Option<u64>,
    pub message: String,
}

#[derive(Debug, Default)]
pub struct MatrixOutcome {
    pub records: Vec<RunRecord>,
    pub failures: Vec<RunFailure>,
}

/// Graph and candidate table shared by every run of one scenario.
#[derive(Debug, Clone)]
pub struct PreparedScenario {
    pub config: ScenarioConfig,
    pub graph: Arc<Graph>,
    pub table: Arc<CandidateTable>,
}

impl PreparedScenario {
    pub fn new(config: ScenarioConfig) -> Result<Self, String> {
        let path = config.topology_path();
        let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        let graph = load_topology(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let table = all_pairs_candidates(&graph, config.k, &config.coefficients).map_err(|e| e.to_string())?;
        Ok(PreparedScenario {
            config,
            graph: Arc::new(graph),
            table: Arc::new(table),
        })
    }

    pub fn run(&self, policy: PolicyKind, seed: u64) -> Result<RunRecord, String> {
        let started = Instant::now();
        let state = PolicyState::new(policy, self.config.params.clone(), self.table.clone()).map_err(|e| e.to_string())?;
        let out = sim::run(&self.graph, state, &self.config.traffic, &self.config.settings, seed)
            .map_err(|e| e.to_string())?;
        Ok(RunRecord {
            scenario: self.config.id.clone(),
            policy,
            seed,
            metrics: out.metrics,
            in_flight: out.in_flight,
            wall_clock: started.elapsed(),
        })
    }
}

/// One record per (scenario, policy, seed), ordered by scenario position,
/// policy, then seed. Runs execute in parallel; a failing run is reported
/// and the others continue. `seeds` overrides each scenario's own list.
pub fn run_matrix(configs: &[ScenarioConfig], policies: &[PolicyKind], seeds: Option<&[u64]>) -> MatrixOutcome {
    let mut outcome = MatrixOutcome::default();
    let mut prepared = Vec::new();
    for c in configs {
        match PreparedScenario::new(c.clone()) {
            Ok(p) => prepared.push(p),
            Err(message) => outcome.failures.push(RunFailure {
                scenario: c.id.clone(),
                policy: None,
                seed: None,
                message,
            }),
        }
    }
    let mut jobs = Vec::new();
    for (si, p) in prepared.iter().enumerate() {
        let mut policy_list = policies.to_vec();
        policy_list.sort();
        policy_list.dedup();
        let mut seed_list = seeds.map_or_else(|| p.config.seeds.clone(), |s| s.to_vec());
        seed_list.sort();
        seed_list.dedup();
        for policy in &policy_list {
            for seed in &seed_list {
                jobs.push((si, *policy, *seed));
            }
        }
    }
    let results: Vec<_> = jobs
        .par_iter()
        .map(|(si, policy, seed)| (*si, *policy, *seed, prepared[*si].run(*policy, *seed)))
        .collect();
    for (si, policy, seed, result) in results {
        match result {
            Ok(r) => outcome.records.push(r),
            Err(message) => outcome.failures.push(RunFailure {
                scenario: prepared[si].config.id.clone(),
                policy: Some(policy),
                seed: Some(seed),
                message,
            }),
        }
    }
    outcome
}
