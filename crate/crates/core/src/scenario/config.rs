//! Scenario files: flat `key = value` lines grouped under `[scenario]`,
//! `[routing]` and `[traffic]` headers.
//!
//! ```text
//! [scenario]
//! id = nttnet-low
//! topology = ../data/nttnet.topo
//! duration = 300
//!
//! [routing]
//! policy = kspqr
//!
//! [traffic]
//! lambda = 40
//! ```
//!
//! Keys before the first header may belong to any section. `lambda` is
//! shorthand for a single-phase `phases = 0:<lambda>`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::policy::{InitialEstimate, PolicyKind, PolicyParams};
use crate::sim::traffic::{PairSelection, Phase, TrafficSource};
use crate::sim::SimSettings;
use crate::topology::{CostCoefficients, NodeId};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("`{key}`: {message}")]
    Range { key: &'static str, message: String },
    #[error("topology file {path} is not readable: {message}")]
    Topology { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Scenario,
    Routing,
    Traffic,
}

const KEYS: &[(&str, Section)] = &[
    ("id", Section::Scenario),
    ("topology", Section::Scenario),
    ("duration", Section::Scenario),
    ("window", Section::Scenario),
    ("seeds", Section::Scenario),
    ("data_size", Section::Scenario),
    ("ack_size", Section::Scenario),
    ("constraints", Section::Scenario),
    ("policy", Section::Routing),
    ("k", Section::Routing),
    ("coefficients", Section::Routing),
    ("p_max", Section::Routing),
    ("eta", Section::Routing),
    ("alpha", Section::Routing),
    ("beta", Section::Routing),
    ("initial_estimate", Section::Routing),
    ("nominal_hop_delay", Section::Routing),
    ("lambda", Section::Traffic),
    ("phases", Section::Traffic),
    ("pairs", Section::Traffic),
];

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub id: String,
    /// As written in the file.
    pub topology: String,
    /// Directory relative topology paths resolve against.
    pub base_dir: PathBuf,
    pub policy: PolicyKind,
    pub params: PolicyParams,
    pub k: usize,
    pub coefficients: CostCoefficients,
    pub traffic: TrafficSource,
    pub settings: SimSettings,
    pub seeds: Vec<u64>,
    /// QoS constraint vector, carried as metadata only.
    pub constraints: Option<Vec<f64>>,
}

impl ScenarioConfig {
    pub fn topology_path(&self) -> PathBuf {
        self.base_dir.join(&self.topology)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|e| ConfigError::Syntax {
            line: 0,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        parse_config(&text, base)
    }

    /// Canonical text form; parsing it yields an equal config.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let _ = writeln!(out, "[scenario]");
        let _ = writeln!(out, "id = {}", self.id);
        let _ = writeln!(out, "topology = {}", self.topology);
        let _ = writeln!(out, "duration = {}", self.settings.duration);
        let _ = writeln!(out, "window = {}", self.settings.window);
        let seeds: Vec<String> = self.seeds.iter().map(|s| s.to_string()).collect();
        let _ = writeln!(out, "seeds = {}", seeds.join(","));
        let _ = writeln!(out, "data_size = {}", self.settings.data_size_bits);
        let _ = writeln!(out, "ack_size = {}", self.settings.ack_size_bits);
        if let Some(c) = &self.constraints {
            let _ = writeln!(out, "constraints = {}", list(c));
        }
        let _ = writeln!(out, "\n[routing]");
        let _ = writeln!(out, "policy = {}", self.policy);
        let _ = writeln!(out, "k = {}", self.k);
        let _ = writeln!(out, "coefficients = {}", list(self.coefficients.values()));
        let _ = writeln!(out, "p_max = {}", self.params.p_max);
        let _ = writeln!(out, "eta = {}", self.params.eta);
        let _ = writeln!(out, "alpha = {}", self.params.alpha);
        let _ = writeln!(out, "beta = {}", self.params.beta);
        let _ = writeln!(out, "initial_estimate = {}", self.params.initial_estimate.as_str());
        let _ = writeln!(out, "nominal_hop_delay = {}", self.params.nominal_hop_delay);
        let _ = writeln!(out, "\n[traffic]");
        let phases: Vec<String> = self
            .traffic
            .phases
            .iter()
            .map(|p| format!("{}:{}", p.start, p.lambda))
            .collect();
        let _ = writeln!(out, "phases = {}", phases.join(","));
        if let PairSelection::Fixed(pairs) = &self.traffic.pairs {
            let pairs: Vec<String> = pairs.iter().map(|(s, t)| format!("{s}>{t}")).collect();
            let _ = writeln!(out, "pairs = {}", pairs.join(","));
        }
        out
    }
}

struct Entry {
    line: usize,
    value: String,
}

struct Raw(Vec<(&'static str, Entry)>);

impl Raw {
    fn get(&self, key: &str) -> Option<&Entry> {
        self.0.iter().find(|(k, _)| *k == key).map(|(_, e)| e)
    }

    fn parse<T: std::str::FromStr>(&self, key: &'static str) -> Result<Option<T>, ConfigError> {
        self.get(key)
            .map(|e| {
                e.value.parse::<T>().map_err(|_| ConfigError::Syntax {
                    line: e.line,
                    message: format!("invalid value `{}` for `{key}`", e.value),
                })
            })
            .transpose()
    }

    fn list<T: std::str::FromStr>(&self, key: &'static str) -> Result<Option<Vec<T>>, ConfigError> {
        self.get(key)
            .map(|e| {
                e.value
                    .split(',')
                    .map(|v| {
                        v.trim().parse::<T>().map_err(|_| ConfigError::Syntax {
                            line: e.line,
                            message: format!("invalid list item `{}` for `{key}`", v.trim()),
                        })
                    })
                    .collect()
            })
            .transpose()
    }
}

fn range(key: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Range {
        key,
        message: message.into(),
    }
}

/// Parses and validates a scenario, filling defaults. Relative topology
/// paths resolve against `base_dir`, and the file must be readable.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<ScenarioConfig, ConfigError> {
    let mut section: Option<Section> = None;
    let mut raw = Raw(Vec::new());
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = Some(match name.trim() {
                "scenario" => Section::Scenario,
                "routing" => Section::Routing,
                "traffic" => Section::Traffic,
                other => {
                    return Err(ConfigError::Syntax {
                        line: line_no,
                        message: format!("unknown section `[{other}]`"),
                    })
                }
            });
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: line_no,
            message: "expected `key = value`".into(),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let known = KEYS
            .iter()
            .find(|(k, s)| *k == key && section.is_none_or(|cur| cur == *s))
            .map(|(k, _)| *k)
            .ok_or_else(|| ConfigError::UnknownKey {
                line: line_no,
                key: key.to_string(),
            })?;
        if raw.get(known).is_some() {
            return Err(ConfigError::DuplicateKey {
                line: line_no,
                key: key.to_string(),
            });
        }
        raw.0.push((
            known,
            Entry {
                line: line_no,
                value: value.to_string(),
            },
        ));
    }

    let id = raw.get("id").map_or_else(|| "scenario".to_string(), |e| e.value.clone());
    if id.is_empty() || !id.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
        return Err(range("id", "use letters, digits, `-`, `_` or `.`"));
    }
    let topology = raw.get("topology").ok_or(ConfigError::Missing("topology"))?.value.clone();
    let policy_entry = raw.get("policy").ok_or(ConfigError::Missing("policy"))?;
    let policy: PolicyKind = policy_entry.value.parse().map_err(|m: String| ConfigError::Syntax {
        line: policy_entry.line,
        message: m,
    })?;

    let defaults = SimSettings::default();
    let duration: f64 = raw.parse("duration")?.ok_or(ConfigError::Missing("duration"))?;
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(range("duration", "must be positive"));
    }
    let window: f64 = raw.parse("window")?.unwrap_or(defaults.window);
    if !(window > 0.0 && window.is_finite()) {
        return Err(range("window", "must be positive"));
    }
    let data_size: u64 = raw.parse("data_size")?.unwrap_or(defaults.data_size_bits);
    let ack_size: u64 = raw.parse("ack_size")?.unwrap_or(defaults.ack_size_bits);
    if ack_size == 0 {
        return Err(range("ack_size", "must be positive"));
    }
    if data_size < ack_size {
        return Err(range("data_size", "must be at least ack_size"));
    }
    let seeds: Vec<u64> = raw.list("seeds")?.unwrap_or_else(|| vec![1]);
    let constraints: Option<Vec<f64>> = raw.list("constraints")?;

    let pd = PolicyParams::default();
    let initial_estimate = match raw.get("initial_estimate") {
        Some(e) => e
            .value
            .parse::<InitialEstimate>()
            .map_err(|m| ConfigError::Syntax { line: e.line, message: m })?,
        None => pd.initial_estimate,
    };
    let params = PolicyParams {
        p_max: raw.parse("p_max")?.unwrap_or(pd.p_max),
        eta: raw.parse("eta")?.unwrap_or(pd.eta),
        alpha: raw.parse("alpha")?.unwrap_or(pd.alpha),
        beta: raw.parse("beta")?.unwrap_or(pd.beta),
        initial_estimate,
        nominal_hop_delay: raw.parse("nominal_hop_delay")?.unwrap_or(pd.nominal_hop_delay),
    };
    if !(params.p_max > 0.0 && params.p_max <= 1.0) {
        return Err(range("p_max", format!("{} is outside (0, 1]", params.p_max)));
    }
    if !(params.eta > 0.0 && params.eta <= 1.0) {
        return Err(range("eta", format!("{} is outside (0, 1]", params.eta)));
    }
    if !(params.alpha > 0.0 && params.alpha.is_finite()) {
        return Err(range("alpha", "must be positive"));
    }
    if !(params.beta >= 0.0 && params.beta.is_finite()) {
        return Err(range("beta", "must be non-negative"));
    }
    if !(params.nominal_hop_delay > 0.0 && params.nominal_hop_delay.is_finite()) {
        return Err(range("nominal_hop_delay", "must be positive"));
    }
    let k: usize = raw.parse("k")?.unwrap_or(3);
    if k == 0 {
        return Err(range("k", "must be at least 1"));
    }
    let coefficients = match raw.list::<f64>("coefficients")? {
        Some(c) => CostCoefficients::new(c).map_err(|m| range("coefficients", m))?,
        None => CostCoefficients::unit(),
    };

    let phases = match (raw.get("lambda"), raw.list::<String>("phases")?) {
        (Some(_), Some(_)) => return Err(range("phases", "give either `lambda` or `phases`, not both")),
        (Some(_), None) => vec![Phase {
            start: 0.0,
            lambda: raw.parse("lambda")?.expect("present"),
        }],
        (None, Some(items)) => {
            let line = raw.get("phases").expect("present").line;
            items
                .iter()
                .map(|item| {
                    let parsed = item
                        .split_once(':')
                        .and_then(|(s, l)| Some((s.trim().parse().ok()?, l.trim().parse().ok()?)));
                    parsed
                        .map(|(start, lambda)| Phase { start, lambda })
                        .ok_or_else(|| ConfigError::Syntax {
                            line,
                            message: format!("phase `{item}` is not `<start>:<lambda>`"),
                        })
                })
                .collect::<Result<_, _>>()?
        }
        (None, None) => return Err(ConfigError::Missing("lambda")),
    };
    let pairs = match raw.list::<String>("pairs")? {
        None => PairSelection::Uniform,
        Some(items) => {
            let line = raw.get("pairs").expect("present").line;
            PairSelection::Fixed(
                items
                    .iter()
                    .map(|item| {
                        item.split_once('>')
                            .and_then(|(s, t)| Some((NodeId(s.trim().parse().ok()?), NodeId(t.trim().parse().ok()?))))
                            .ok_or_else(|| ConfigError::Syntax {
                                line,
                                message: format!("pair `{item}` is not `<s>><t>`"),
                            })
                    })
                    .collect::<Result<_, _>>()?,
            )
        }
    };
    let traffic = TrafficSource { phases, pairs };
    traffic
        .validate(usize::MAX)
        .map_err(|m| range("phases", m))?;

    let config = ScenarioConfig {
        id,
        topology,
        base_dir: base_dir.to_path_buf(),
        policy,
        params,
        k,
        coefficients,
        traffic,
        settings: SimSettings {
            duration,
            window,
            data_size_bits: data_size,
            ack_size_bits: ack_size,
            record_deliveries: false,
        },
        seeds,
        constraints,
    };
    let path = config.topology_path();
    fs::File::open(&path).map_err(|e| ConfigError::Topology {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dir_with_topology() -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("t.topo"), "nodes 2\n0 1 cap=1e6 prop=0.001 q=10 w=1\n").unwrap();
        dir
    }

    const MINIMAL: &str = "topology = t.topo\npolicy = kspqr\nlambda = 10\nduration = 60\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let dir = dir_with_topology();
        let c = parse_config(MINIMAL, dir.path()).unwrap();
        assert_eq!(c.k, 3);
        assert_eq!(c.params.p_max, 0.9);
        assert_eq!(c.params.eta, 0.3);
        assert_eq!(c.params.alpha, 2.0);
        assert_eq!(c.params.beta, 1.0);
        assert_eq!(c.params.initial_estimate, InitialEstimate::StaticCostSeeded);
        assert_eq!(c.settings.window, 5.0);
        assert_eq!(c.traffic.phases, vec![Phase { start: 0.0, lambda: 10.0 }]);
        assert_eq!(c.seeds, vec![1]);
    }

    #[test]
    fn p_max_out_of_range() {
        let dir = dir_with_topology();
        let err = parse_config(&format!("{MINIMAL}p_max = 1.5\n"), dir.path()).unwrap_err();
        assert!(matches!(err, ConfigError::Range { key: "p_max", .. }), "{err}");
    }

    #[test]
    fn unknown_and_misplaced_keys() {
        let dir = dir_with_topology();
        let err = parse_config(&format!("{MINIMAL}colour = red\n"), dir.path()).unwrap_err();
        assert_eq!(err, ConfigError::UnknownKey { line: 5, key: "colour".into() });
        let err = parse_config("[traffic]\npolicy = spf\n", dir.path()).unwrap_err();
        assert!(matches!(err, ConfigError::UnknownKey { line: 2, .. }));
    }

    #[test]
    fn missing_required_key() {
        let dir = dir_with_topology();
        let err = parse_config("topology = t.topo\nlambda = 1\nduration = 5\n", dir.path()).unwrap_err();
        assert_eq!(err, ConfigError::Missing("policy"));
    }

    #[test]
    fn unreadable_topology() {
        let dir = tempfile::tempdir().unwrap();
        let err = parse_config(MINIMAL, dir.path()).unwrap_err();
        assert!(matches!(err, ConfigError::Topology { .. }));
    }

    #[test]
    fn phases_and_pairs() {
        let dir = dir_with_topology();
        let text = "topology = t.topo\npolicy = koqra\nduration = 60\nphases = 0:10, 20:50, 30:10\npairs = 0>1\n\
                    constraints = 0.05,2\n";
        let c = parse_config(text, dir.path()).unwrap();
        assert_eq!(c.traffic.phases.len(), 3);
        assert_eq!(c.traffic.phases[1], Phase { start: 20.0, lambda: 50.0 });
        assert_eq!(c.traffic.pairs, PairSelection::Fixed(vec![(NodeId(0), NodeId(1))]));
        assert_eq!(c.constraints, Some(vec![0.05, 2.0]));
        let again = parse_config(&c.to_text(), dir.path()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn both_lambda_and_phases_is_ambiguous() {
        let dir = dir_with_topology();
        let err = parse_config(&format!("{MINIMAL}phases = 0:1\n"), dir.path()).unwrap_err();
        assert!(matches!(err, ConfigError::Range { key: "phases", .. }));
    }

    #[test]
    fn serialization_is_a_fixed_point() {
        let dir = dir_with_topology();
        let c = parse_config(MINIMAL, dir.path()).unwrap();
        let text = c.to_text();
        let c2 = parse_config(&text, dir.path()).unwrap();
        assert_eq!(c2, c);
        assert_eq!(c2.to_text(), text);
    }
}
