//! Path selection policies over a candidate table.
//!
//! * `Spf` always uses the cheapest candidate.
//! * `Somr` splits statically over all candidates, weights ∝ 1/static cost,
//!   realized as a smooth weighted round-robin.
//! * `Kspqr` learns an end-to-end delay estimate per candidate from
//!   acknowledgements and gives `p_max` to the current best estimate, the
//!   rest shared evenly.
//! * `Koqra` draws from a power-law desirability over learned delay plus a
//!   queue waiting-time proxy.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::kpaths::{CandidateSet, CandidateTable};
use crate::topology::NodeId;

/// Tolerance on distribution sums.
pub const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum PolicyError {
    #[error("measured delay must be positive and finite, got {0}")]
    BadMeasurement(f64),
    #[error("malformed distribution: {0}")]
    MalformedDistribution(String),
    #[error("no candidate paths for {0}->{1}")]
    NoCandidates(NodeId, NodeId),
    #[error("path index {index} out of range for {count} candidates")]
    BadPathIndex { index: usize, count: usize },
    #[error("invalid policy parameter: {0}")]
    BadParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolicyKind {
    Spf,
    Somr,
    Kspqr,
    Koqra,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] = [PolicyKind::Spf, PolicyKind::Somr, PolicyKind::Kspqr, PolicyKind::Koqra];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::Spf => "spf",
            PolicyKind::Somr => "somr",
            PolicyKind::Kspqr => "kspqr",
            PolicyKind::Koqra => "koqra",
        }
    }

    /// Learning policies consume acknowledgements.
    pub fn is_adaptive(self) -> bool {
        matches!(self, PolicyKind::Kspqr | PolicyKind::Koqra)
    }

    pub fn uses_queue_state(self) -> bool {
        self == PolicyKind::Koqra
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "spf" => Ok(PolicyKind::Spf),
            "somr" => Ok(PolicyKind::Somr),
            "kspqr" => Ok(PolicyKind::Kspqr),
            "koqra" => Ok(PolicyKind::Koqra),
            other => Err(format!("unknown policy `{other}`")),
        }
    }
}

/// How delay estimates start before the first acknowledgement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialEstimate {
    /// Zero, replaced wholesale by the first sample.
    OptimisticZero,
    /// Static cost times the nominal per-hop delay.
    StaticCostSeeded,
}

impl InitialEstimate {
    pub fn as_str(self) -> &'static str {
        match self {
            InitialEstimate::OptimisticZero => "optimistic-zero-replaced",
            InitialEstimate::StaticCostSeeded => "static-cost-seeded",
        }
    }
}

impl FromStr for InitialEstimate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "optimistic-zero-replaced" => Ok(InitialEstimate::OptimisticZero),
            "static-cost-seeded" => Ok(InitialEstimate::StaticCostSeeded),
            other => Err(format!("unknown initial estimate mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyParams {
    /// Probability of the best-estimate path under KSPQR, in (0, 1].
    pub p_max: f64,
    /// Learning rate of the delay estimator, in (0, 1].
    pub eta: f64,
    /// Desirability exponent under KOQRA, > 0.
    pub alpha: f64,
    /// Weight of the queue waiting proxy under KOQRA, ≥ 0.
    pub beta: f64,
    pub initial_estimate: InitialEstimate,
    /// Seconds of delay per unit of static cost for seeded estimates.
    pub nominal_hop_delay: f64,
}

impl Default for PolicyParams {
    fn default() -> Self {
        PolicyParams {
            p_max: 0.9,
            eta: 0.3,
            alpha: 2.0,
            beta: 1.0,
            initial_estimate: InitialEstimate::StaticCostSeeded,
            nominal_hop_delay: 0.005,
        }
    }
}

impl PolicyParams {
    pub fn validate(&self) -> Result<(), PolicyError> {
        let bad = |m: &str| Err(PolicyError::BadParameter(m.to_string()));
        if !(self.p_max > 0.0 && self.p_max <= 1.0) {
            return bad("p_max must lie in (0, 1]");
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return bad("eta must lie in (0, 1]");
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha must be positive");
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return bad("beta must be non-negative");
        }
        if !(self.nominal_hop_delay > 0.0 && self.nominal_hop_delay.is_finite()) {
            return bad("nominal_hop_delay must be positive");
        }
        Ok(())
    }
}

/// Learned end-to-end delay of one candidate path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathStats {
    pub delay_estimate: f64,
    pub sample_count: u64,
}

impl PathStats {
    pub fn new(initial: f64) -> Self {
        PathStats {
            delay_estimate: initial,
            sample_count: 0,
        }
    }
}

/// Exponential moving average of measured delays; the first sample
/// replaces the initial estimate.
pub fn q_update(stats: PathStats, measured_delay: f64, eta: f64) -> Result<PathStats, PolicyError> {
    if !(measured_delay > 0.0 && measured_delay.is_finite()) {
        return Err(PolicyError::BadMeasurement(measured_delay));
    }
    let delay_estimate = if stats.sample_count == 0 {
        measured_delay
    } else {
        (1.0 - eta) * stats.delay_estimate + eta * measured_delay
    };
    Ok(PathStats {
        delay_estimate,
        sample_count: stats.sample_count + 1,
    })
}

fn argmin_estimate(stats: &[PathStats]) -> usize {
    let mut best = 0;
    for (i, s) in stats.iter().enumerate().skip(1) {
        if s.delay_estimate < stats[best].delay_estimate {
            best = i;
        }
    }
    best
}

/// `p_max` on the lowest delay estimate (first index on ties), the remainder
/// split evenly across the other K−1 paths.
pub fn kspqr_distribution(stats: &[PathStats], p_max: f64) -> Vec<f64> {
    match stats.len() {
        0 => Vec::new(),
        1 => vec![1.0],
        k => {
            let best = argmin_estimate(stats);
            let rest = (1.0 - p_max) / (k - 1) as f64;
            (0..k).map(|i| if i == best { p_max } else { rest }).collect()
        }
    }
}

/// Waiting-time proxy per candidate path, in seconds.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QueueSnapshot(pub Vec<f64>);

/// Desirability τ = 1 / (delay + β·wait), probability ∝ τ^α.
///
/// Paths with a zero denominator (only possible before any sample under
/// optimistic initialization) share the mass evenly, the limit of the
/// formula as their denominator tends to zero.
pub fn koqra_distribution(stats: &[PathStats], waiting: &QueueSnapshot, alpha: f64, beta: f64) -> Vec<f64> {
    if stats.is_empty() {
        return Vec::new();
    }
    let denominators: Vec<f64> = stats
        .iter()
        .enumerate()
        .map(|(i, s)| s.delay_estimate + beta * waiting.0.get(i).copied().unwrap_or(0.0))
        .collect();
    let zeros = denominators.iter().filter(|d| **d <= 0.0).count();
    if zeros > 0 {
        let share = 1.0 / zeros as f64;
        return denominators
            .iter()
            .map(|d| if *d <= 0.0 { share } else { 0.0 })
            .collect();
    }
    // Normalizing by the smallest denominator keeps the powers near 1.
    let floor = denominators.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = denominators.iter().map(|d| (floor / d).powf(alpha)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter().map(|w| w / total).collect()
}

fn check_distribution(distribution: &[f64]) -> Result<(), PolicyError> {
    if distribution.is_empty() {
        return Err(PolicyError::MalformedDistribution("empty".into()));
    }
    if distribution.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(PolicyError::MalformedDistribution(
            "entries must be finite and non-negative".into(),
        ));
    }
    let sum: f64 = distribution.iter().sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(PolicyError::MalformedDistribution(format!("sums to {sum}")));
    }
    Ok(())
}

/// Inverse-CDF draw over the list order; consumes one uniform variate.
pub fn select_path<R: Rng + ?Sized>(distribution: &[f64], rng: &mut R) -> Result<usize, PolicyError> {
    check_distribution(distribution)?;
    let u: f64 = rng.gen();
    let mut cumulative = 0.0;
    let mut last_positive = 0;
    for (i, p) in distribution.iter().enumerate() {
        if *p > 0.0 {
            last_positive = i;
        }
        cumulative += p;
        if u < cumulative && *p > 0.0 {
            return Ok(i);
        }
    }
    // u fell in the rounding gap above the cumulative sum.
    Ok(last_positive)
}

pub fn spf_select(_candidates: &CandidateSet) -> usize {
    0
}

/// Smooth weighted round-robin cursor for one source-destination pair.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SomrCursor {
    credit: Vec<f64>,
    calls: u64,
}

impl SomrCursor {
    pub fn calls(&self) -> u64 {
        self.calls
    }
}

fn somr_weights(candidates: &CandidateSet) -> Vec<f64> {
    let costs: Vec<f64> = candidates.paths.iter().map(|p| p.static_cost()).collect();
    if costs.iter().any(|c| *c <= 0.0) {
        return costs.iter().map(|c| if *c <= 0.0 { 1.0 } else { 0.0 }).collect();
    }
    costs.iter().map(|c| 1.0 / c).collect()
}

/// Next index of the static split, weights ∝ 1/static cost.
pub fn somr_select(candidates: &CandidateSet, cursor: &mut SomrCursor) -> usize {
    let weights = somr_weights(candidates);
    if weights.len() <= 1 {
        cursor.calls += 1;
        return 0;
    }
    if cursor.credit.len() != weights.len() {
        cursor.credit = vec![0.0; weights.len()];
    }
    let total: f64 = weights.iter().sum();
    let mut best = 0;
    for (i, w) in weights.iter().enumerate() {
        cursor.credit[i] += w;
        if cursor.credit[i] > cursor.credit[best] {
            best = i;
        }
    }
    cursor.credit[best] -= total;
    cursor.calls += 1;
    best
}

/// Per-pair routing state of one simulation.
#[derive(Debug, Clone)]
pub struct PolicyState {
    kind: PolicyKind,
    params: PolicyParams,
    table: Arc<CandidateTable>,
    stats: Vec<Vec<PathStats>>,
    cursors: Vec<SomrCursor>,
}

impl PolicyState {
    pub fn new(kind: PolicyKind, params: PolicyParams, table: Arc<CandidateTable>) -> Result<Self, PolicyError> {
        params.validate()?;
        let n = table.node_count();
        let stats = (0..n * n)
            .map(|i| {
                table
                    .by_index(i)
                    .paths
                    .iter()
                    .map(|p| {
                        PathStats::new(match params.initial_estimate {
                            InitialEstimate::OptimisticZero => 0.0,
                            InitialEstimate::StaticCostSeeded => p.static_cost() * params.nominal_hop_delay,
                        })
                    })
                    .collect()
            })
            .collect();
        let cursors = vec![SomrCursor::default(); if kind == PolicyKind::Somr { n * n } else { 0 }];
        Ok(PolicyState {
            kind,
            params,
            table,
            stats,
            cursors,
        })
    }

    pub fn kind(&self) -> PolicyKind {
        self.kind
    }

    pub fn params(&self) -> &PolicyParams {
        &self.params
    }

    pub fn table(&self) -> &CandidateTable {
        &self.table
    }

    pub fn candidates(&self, s: NodeId, t: NodeId) -> Option<&CandidateSet> {
        self.table.get(s, t)
    }

    pub fn stats(&self, s: NodeId, t: NodeId) -> &[PathStats] {
        &self.stats[self.table.pair_index(s, t)]
    }

    /// Selection distribution for the probabilistic policies; `None` for the
    /// deterministic baselines.
    pub fn distribution(&self, s: NodeId, t: NodeId, waiting: Option<&QueueSnapshot>) -> Option<Vec<f64>> {
        let stats = self.stats(s, t);
        match self.kind {
            PolicyKind::Spf | PolicyKind::Somr => None,
            PolicyKind::Kspqr => Some(kspqr_distribution(stats, self.params.p_max)),
            PolicyKind::Koqra => {
                let empty = QueueSnapshot::default();
                Some(koqra_distribution(
                    stats,
                    waiting.unwrap_or(&empty),
                    self.params.alpha,
                    self.params.beta,
                ))
            }
        }
    }

    /// Picks a candidate index for a packet from s to t.
    pub fn select<R: Rng + ?Sized>(
        &mut self,
        s: NodeId,
        t: NodeId,
        waiting: Option<&QueueSnapshot>,
        rng: &mut R,
    ) -> Result<usize, PolicyError> {
        let candidates = self.table.get(s, t).ok_or(PolicyError::NoCandidates(s, t))?;
        if candidates.is_empty() {
            return Err(PolicyError::NoCandidates(s, t));
        }
        match self.kind {
            PolicyKind::Spf => Ok(spf_select(candidates)),
            PolicyKind::Somr => {
                let pair = self.table.pair_index(s, t);
                Ok(somr_select(candidates, &mut self.cursors[pair]))
            }
            PolicyKind::Kspqr | PolicyKind::Koqra => {
                let dist = self.distribution(s, t, waiting).expect("adaptive policies have a distribution");
                select_path(&dist, rng)
            }
        }
    }

    /// Feeds a measured end-to-end delay back into the estimate of one
    /// candidate. Baselines ignore acknowledgements.
    pub fn on_ack(&mut self, s: NodeId, t: NodeId, path: usize, measured_delay: f64) -> Result<(), PolicyError> {
        if !self.kind.is_adaptive() {
            return Ok(());
        }
        let pair = self.table.pair_index(s, t);
        let stats = &mut self.stats[pair];
        let count = stats.len();
        let slot = stats
            .get_mut(path)
            .ok_or(PolicyError::BadPathIndex { index: path, count })?;
        *slot = q_update(*slot, measured_delay, self.params.eta)?;
        Ok(())
    }
}
