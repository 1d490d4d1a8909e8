//! CSV emission of windowed metrics and generated plotting scripts.

use std::collections::BTreeSet;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Duration;

use thiserror::Error;

use crate::policy::PolicyKind;
use crate::sim::metrics::{InFlight, MetricsSeries, Totals, Window};

use super::matrix::RunRecord;

pub const CSV_HEADER: &str =
    "scenario,policy,seed,window_start_s,window_mean_delay_s,delivered,dropped,control_bits";

#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    #[error("no records to emit")]
    Empty,
    #[error("a plot needs at least two policies, found {0}")]
    TooFewPolicies(usize),
    #[error("CSV line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error("CSV holds several scenarios ({0}); pick one")]
    AmbiguousScenario(String),
    #[error("scenario `{0}` not found in CSV")]
    UnknownScenario(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Panel {
    Low,
    Heavy,
    Peak,
}

impl Panel {
    fn title(self) -> &'static str {
        match self {
            Panel::Low => "Low traffic",
            Panel::Heavy => "Heavy traffic",
            Panel::Peak => "Traffic peak",
        }
    }
}

impl fmt::Display for Panel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Panel::Low => "low",
            Panel::Heavy => "heavy",
            Panel::Peak => "peak",
        })
    }
}

impl FromStr for Panel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "low" => Ok(Panel::Low),
            "heavy" => Ok(Panel::Heavy),
            "peak" => Ok(Panel::Peak),
            other => Err(format!("unknown panel `{other}` (low, heavy, peak)")),
        }
    }
}

fn sorted(records: &[RunRecord]) -> Vec<&RunRecord> {
    let mut refs: Vec<&RunRecord> = records.iter().collect();
    refs.sort_by(|a, b| {
        a.scenario
            .cmp(&b.scenario)
            .then(a.policy.cmp(&b.policy))
            .then(a.seed.cmp(&b.seed))
    });
    refs
}

/// One row per window per record, ordered by scenario, policy, seed and
/// window. Windows without deliveries leave the mean field empty.
pub fn emit_csv(records: &[RunRecord]) -> Result<String, ReportError> {
    if records.is_empty() {
        return Err(ReportError::Empty);
    }
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in sorted(records) {
        for w in &r.metrics.windows {
            let mean = w.mean_delay().map(|m| format!("{m:.9}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{:.3},{},{},{},{}",
                r.scenario, r.policy, r.seed, w.start, mean, w.delivered, w.dropped, w.control_bits
            );
        }
    }
    Ok(out)
}

/// Rebuilds per-run window series from emitted CSV. Only the CSV columns
/// survive: totals, in-flight counts and timings are zero.
pub fn records_from_csv(text: &str) -> Result<Vec<RunRecord>, ReportError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == CSV_HEADER => {}
        _ => {
            return Err(ReportError::Csv {
                line: 1,
                message: "unexpected header".into(),
            })
        }
    }
    let mut records: Vec<RunRecord> = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let err = |m: &str| ReportError::Csv {
            line: line_no,
            message: m.to_string(),
        };
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 8 {
            return Err(err("expected 8 fields"));
        }
        let policy: PolicyKind = f[1].parse().map_err(|m: String| err(&m))?;
        let seed: u64 = f[2].parse().map_err(|_| err("bad seed"))?;
        let start: f64 = f[3].parse().map_err(|_| err("bad window start"))?;
        let mean: Option<f64> = if f[4].is_empty() {
            None
        } else {
            Some(f[4].parse().map_err(|_| err("bad mean delay"))?)
        };
        let delivered: u64 = f[5].parse().map_err(|_| err("bad delivered count"))?;
        let dropped: u64 = f[6].parse().map_err(|_| err("bad dropped count"))?;
        let control_bits: u64 = f[7].parse().map_err(|_| err("bad control bits"))?;
        let window = Window {
            start,
            end: start,
            delivered,
            dropped,
            control_bits,
            delay_sum: mean.map_or(0.0, |m| m * delivered as f64),
            totals: Totals::default(),
            in_flight: InFlight::default(),
        };
        let same_run = records
            .last()
            .is_some_and(|r| r.scenario == f[0] && r.policy == policy && r.seed == seed);
        if !same_run {
            records.push(RunRecord {
                scenario: f[0].to_string(),
                policy,
                seed,
                metrics: MetricsSeries {
                    window_length: 0.0,
                    windows: Vec::new(),
                    totals: Totals::default(),
                    phase_changes: Vec::new(),
                },
                in_flight: InFlight::default(),
                wall_clock: Duration::ZERO,
            });
        }
        let run = records.last_mut().expect("pushed above");
        if let Some(prev) = run.metrics.windows.last_mut() {
            prev.end = start;
            run.metrics.window_length = start - prev.start;
        }
        run.metrics.windows.push(window);
    }
    Ok(records)
}

/// Picks the records of one scenario; `None` requires the records to hold
/// exactly one.
pub fn select_scenario<'r>(records: &'r [RunRecord], scenario: Option<&str>) -> Result<Vec<&'r RunRecord>, ReportError> {
    let names: BTreeSet<&str> = records.iter().map(|r| r.scenario.as_str()).collect();
    let name = match scenario {
        Some(s) if names.contains(s) => s,
        Some(s) => return Err(ReportError::UnknownScenario(s.to_string())),
        None if names.len() == 1 => *names.iter().next().expect("one name"),
        None if names.is_empty() => return Err(ReportError::Empty),
        None => return Err(ReportError::AmbiguousScenario(names.into_iter().collect::<Vec<_>>().join(","))),
    };
    Ok(records.iter().filter(|r| r.scenario == name).collect())
}

fn py_str(s: &str) -> String {
    format!("{s:?}")
}

/// A standalone matplotlib script drawing delay against simulation time,
/// one curve per policy with seeds averaged per window, read from
/// `csv_path`. Phase changes recorded in the runs (or given in
/// `markers`) are drawn as vertical lines on the peak panel.
pub fn emit_plot_script(
    records: &[&RunRecord],
    panel: Panel,
    csv_path: &str,
    image_path: &str,
    markers: &[f64],
) -> Result<String, ReportError> {
    let policies: BTreeSet<PolicyKind> = records.iter().map(|r| r.policy).collect();
    if policies.len() < 2 {
        return Err(ReportError::TooFewPolicies(policies.len()));
    }
    let scenario = &records[0].scenario;
    let mut marks: Vec<f64> = if panel == Panel::Peak {
        records
            .iter()
            .flat_map(|r| r.metrics.phase_changes.iter().copied())
            .chain(markers.iter().copied())
            .collect()
    } else {
        Vec::new()
    };
    marks.sort_by(f64::total_cmp);
    marks.dedup();

    let policy_list: Vec<String> = policies.iter().map(|p| py_str(p.as_str())).collect();
    let marker_list: Vec<String> = marks.iter().map(|m| format!("{m}")).collect();
    let mut s = String::new();
    let _ = writeln!(s, "#!/usr/bin/env python3");
    let _ = writeln!(s, "# Generated by `qosroute plot --panel {panel}`.");
    let _ = writeln!(s, "import collections");
    let _ = writeln!(s, "import csv");
    let _ = writeln!(s);
    let _ = writeln!(s, "import matplotlib");
    let _ = writeln!(s, "matplotlib.use(\"Agg\")");
    let _ = writeln!(s, "import matplotlib.pyplot as plt");
    let _ = writeln!(s);
    let _ = writeln!(s, "CSV_PATH = {}", py_str(csv_path));
    let _ = writeln!(s, "IMAGE_PATH = {}", py_str(image_path));
    let _ = writeln!(s, "SCENARIO = {}", py_str(scenario));
    let _ = writeln!(s, "TITLE = {}", py_str(panel.title()));
    let _ = writeln!(s, "POLICIES = [{}]", policy_list.join(", "));
    let _ = writeln!(s, "PHASE_CHANGES = [{}]", marker_list.join(", "));
    s.push_str(
        r#"
sums = collections.defaultdict(lambda: [0.0, 0])
with open(CSV_PATH, newline="") as f:
    for row in csv.DictReader(f):
        if row["scenario"] != SCENARIO or row["window_mean_delay_s"] == "":
            continue
        key = (row["policy"], float(row["window_start_s"]))
        sums[key][0] += float(row["window_mean_delay_s"])
        sums[key][1] += 1

fig, ax = plt.subplots(figsize=(7, 4))
for policy in POLICIES:
    points = sorted((t, total / n) for (p, t), (total, n) in sums.items() if p == policy)
    ax.plot([t for t, _ in points], [1e3 * d for _, d in points], label=policy.upper())
for t in PHASE_CHANGES:
    ax.axvline(t, color="grey", linestyle="--", linewidth=0.8)
ax.set_xlabel("simulation time (s)")
ax.set_ylabel("mean end-to-end delay (ms)")
ax.set_title(TITLE)
ax.legend()
fig.savefig(IMAGE_PATH, dpi=150, bbox_inches="tight")
"#,
    );
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(policy: PolicyKind, seed: u64, means: &[Option<f64>]) -> RunRecord {
        let windows = means
            .iter()
            .enumerate()
            .map(|(i, m)| Window {
                start: i as f64 * 5.0,
                end: (i + 1) as f64 * 5.0,
                delivered: if m.is_some() { 2 } else { 0 },
                dropped: 0,
                control_bits: 64 * i as u64,
                delay_sum: m.map_or(0.0, |m| 2.0 * m),
                totals: Totals::default(),
                in_flight: InFlight::default(),
            })
            .collect();
        RunRecord {
            scenario: "s".into(),
            policy,
            seed,
            metrics: MetricsSeries {
                window_length: 5.0,
                windows,
                totals: Totals::default(),
                phase_changes: vec![100.0, 130.0],
            },
            in_flight: InFlight::default(),
            wall_clock: Duration::from_millis(seed),
        }
    }

    #[test]
    fn header_and_empty_windows() {
        let csv = emit_csv(&[record(PolicyKind::Spf, 1, &[Some(0.01), None])]).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "s,spf,1,0.000,0.010000000,2,0,0");
        assert_eq!(lines[2], "s,spf,1,5.000,,0,0,64");
    }

    #[test]
    fn rows_are_ordered_and_stable() {
        let recs = vec![
            record(PolicyKind::Koqra, 2, &[Some(0.02)]),
            record(PolicyKind::Spf, 2, &[Some(0.01)]),
            record(PolicyKind::Spf, 1, &[Some(0.01)]),
        ];
        let a = emit_csv(&recs).unwrap();
        let b = emit_csv(&recs).unwrap();
        assert_eq!(a, b);
        let keys: Vec<&str> = a.lines().skip(1).map(|l| &l[..l.find(",0.000").unwrap()]).collect();
        assert_eq!(keys, vec!["s,spf,1", "s,spf,2", "s,koqra,2"]);
        assert_eq!(emit_csv(&[]), Err(ReportError::Empty));
    }

    #[test]
    fn csv_reads_back() {
        let recs = vec![
            record(PolicyKind::Spf, 1, &[Some(0.01), None, Some(0.03)]),
            record(PolicyKind::Kspqr, 1, &[Some(0.02), Some(0.04), None]),
        ];
        let csv = emit_csv(&recs).unwrap();
        let back = records_from_csv(&csv).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(emit_csv(&back).unwrap(), csv);
    }

    #[test]
    fn plot_has_one_curve_per_policy() {
        let recs: Vec<RunRecord> = PolicyKind::ALL
            .iter()
            .map(|p| record(*p, 1, &[Some(0.01)]))
            .collect();
        let refs: Vec<&RunRecord> = recs.iter().collect();
        let script = emit_plot_script(&refs, Panel::Heavy, "out.csv", "out.png", &[]).unwrap();
        assert!(script.contains("POLICIES = [\"spf\", \"somr\", \"kspqr\", \"koqra\"]"));
        assert!(script.contains("ax.set_ylabel(\"mean end-to-end delay (ms)\")"));
        assert!(script.contains("PHASE_CHANGES = []"));
    }

    #[test]
    fn peak_plot_marks_phase_changes() {
        let recs = [record(PolicyKind::Spf, 1, &[None]), record(PolicyKind::Koqra, 1, &[None])];
        let refs: Vec<&RunRecord> = recs.iter().collect();
        let script = emit_plot_script(&refs, Panel::Peak, "x.csv", "x.png", &[]).unwrap();
        assert!(script.contains("PHASE_CHANGES = [100, 130]"));
    }

    #[test]
    fn single_policy_cannot_be_plotted() {
        let recs = [record(PolicyKind::Spf, 1, &[None]), record(PolicyKind::Spf, 2, &[None])];
        let refs: Vec<&RunRecord> = recs.iter().collect();
        assert_eq!(
            emit_plot_script(&refs, Panel::Low, "x.csv", "x.png", &[]),
            Err(ReportError::TooFewPolicies(1))
        );
    }
}
