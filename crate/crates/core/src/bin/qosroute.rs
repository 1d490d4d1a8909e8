use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use qosroute::scenario::{
    emit_csv, emit_plot_script, records_from_csv, report::select_scenario, run_matrix, Panel, ScenarioConfig,
};
use qosroute::{k_shortest_paths, load_topology, validate_graph, CostCoefficients, NodeId, PolicyKind};

#[derive(Parser)]
#[command(name = "qosroute", version, about = "K-best-path adaptive routing simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a topology file for broken invariants and connectivity.
    Validate { topology: PathBuf },
    /// Print the K cheapest loopless paths between two nodes.
    Paths {
        topology: PathBuf,
        source: usize,
        destination: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Comma-separated cost coefficients, one per metric.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        coefficients: Vec<f64>,
    },
    /// Run one scenario and write its windowed metrics as CSV.
    Run {
        config: PathBuf,
        /// Overrides the policy named in the scenario.
        #[arg(long)]
        policy: Option<PolicyKind>,
        /// Runs only this seed instead of the scenario's seed list.
        #[arg(long)]
        seed: Option<u64>,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every `*.cfg` scenario of a directory under several policies.
    Matrix {
        dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "spf,somr,kspqr,koqra")]
        policies: Vec<PolicyKind>,
        /// Overrides every scenario's seed list.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
    },
    /// Generate a matplotlib script plotting delay over time from a CSV.
    Plot {
        csv: PathBuf,
        #[arg(long)]
        panel: Panel,
        /// Scenario to plot when the CSV holds several.
        #[arg(long)]
        scenario: Option<String>,
        /// Scenario file whose traffic phase changes are marked.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Script destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Image the script writes.
        #[arg(long, default_value = "delay.png")]
        image: String,
    },
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_graph(path: &Path) -> Result<qosroute::Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    load_topology(&text).with_context(|| path.display().to_string())
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate { topology } => {
            let graph = load_graph(&topology)?;
            let violations = validate_graph(&graph);
            if violations.is_empty() {
                println!(
                    "ok: {} nodes, {} directed links",
                    graph.node_count(),
                    graph.link_count()
                );
                Ok(())
            } else {
                for v in &violations {
                    println!("{v}");
                }
                bail!("{} violation(s) in {}", violations.len(), topology.display())
            }
        }
        Command::Paths {
            topology,
            source,
            destination,
            k,
            coefficients,
        } => {
            let graph = load_graph(&topology)?;
            let coefficients = CostCoefficients::new(coefficients).map_err(anyhow::Error::msg)?;
            let set = k_shortest_paths(&graph, NodeId(source), NodeId(destination), k, &coefficients)?;
            if set.is_empty() {
                bail!("{destination} is unreachable from {source}");
            }
            for (i, p) in set.paths.iter().enumerate() {
                let nodes: Vec<String> = p.nodes().iter().map(|n| n.to_string()).collect();
                println!("{i}\t{}\t{}", p.static_cost(), nodes.join(" "));
            }
            Ok(())
        }
        Command::Run {
            config,
            policy,
            seed,
            out,
        } => {
            let cfg = ScenarioConfig::from_file(&config).with_context(|| config.display().to_string())?;
            let policies = [policy.unwrap_or(cfg.policy)];
            let seeds = seed.map(|s| vec![s]);
            let outcome = run_matrix(std::slice::from_ref(&cfg), &policies, seeds.as_deref());
            if let Some(f) = outcome.failures.first() {
                bail!("{}: {}", f.scenario, f.message);
            }
            for r in &outcome.records {
                let mean = r.metrics.mean_delay().map_or("-".to_string(), |m| format!("{:.3} ms", 1e3 * m));
                let t = &r.metrics.totals;
                eprintln!(
                    "{} {} seed {}: mean delay {mean}, delivered {}, dropped {}, control bits {} ({:.2?})",
                    r.scenario, r.policy, r.seed, t.data.delivered, t.data.dropped, t.control_bits, r.wall_clock
                );
            }
            write_or_print(out.as_deref(), &emit_csv(&outcome.records)?)
        }
        Command::Matrix {
            dir,
            out,
            policies,
            seeds,
        } => {
            let mut files: Vec<PathBuf> = fs::read_dir(&dir)
                .with_context(|| format!("reading {}", dir.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "cfg"))
                .collect();
            files.sort();
            if files.is_empty() {
                bail!("no .cfg files in {}", dir.display());
            }
            let configs = files
                .iter()
                .map(|f| ScenarioConfig::from_file(f).with_context(|| f.display().to_string()))
                .collect::<Result<Vec<_>>>()?;
            let outcome = run_matrix(&configs, &policies, seeds.as_deref());
            for f in &outcome.failures {
                eprintln!(
                    "run failed: {} {} seed {}: {}",
                    f.scenario,
                    f.policy.map_or("-".into(), |p| p.to_string()),
                    f.seed.map_or("-".into(), |s| s.to_string()),
                    f.message
                );
            }
            if outcome.records.is_empty() {
                bail!("every run failed");
            }
            fs::write(&out, emit_csv(&outcome.records)?).with_context(|| format!("writing {}", out.display()))?;
            eprintln!("{} runs written to {}", outcome.records.len(), out.display());
            if !outcome.failures.is_empty() {
                bail!("{} run(s) failed", outcome.failures.len());
            }
            Ok(())
        }
        Command::Plot {
            csv,
            panel,
            scenario,
            config,
            out,
            image,
        } => {
            let text = fs::read_to_string(&csv).with_context(|| format!("reading {}", csv.display()))?;
            let records = records_from_csv(&text)?;
            let selected = select_scenario(&records, scenario.as_deref())?;
            let markers: Vec<f64> = match config {
                Some(path) => {
                    let cfg = ScenarioConfig::from_file(&path).with_context(|| path.display().to_string())?;
                    cfg.traffic.phases.iter().skip(1).map(|p| p.start).collect()
                }
                None => Vec::new(),
            };
            let script = emit_plot_script(&selected, panel, &csv.display().to_string(), &image, &markers)?;
            write_or_print(out.as_deref(), &script)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
