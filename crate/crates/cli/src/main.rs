//! Command-line front end: run experiments, generate synthetic streams,
//! rebuild reports from a results file.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use driftsel::data::{generate_drift_stream, write_csv, DriftScenario};
use driftsel::harness::{aggregate, emit_report, run_experiment, ExperimentConfig, ResultsTable};
use driftsel::learners::Family;
use driftsel::par;
use driftsel::selection::Mechanism;

#[derive(Parser)]
#[command(name = "driftsel", version, about = "Rank historical models on drifting data")]
struct Cli {
    /// Worker threads (defaults to one per core).
    #[arg(long, global = true, env = "DRIFTSEL_WORKERS")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its report.
    Run(RunArgs),
    /// Write a synthetic periodized stream to CSV.
    Generate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recompute summary and plots from an existing results.csv.
    Report {
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Flags given here override the config file.
#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    family: Option<Family>,
    /// Comma-separated, e.g. `tbm,rtbm,sbm`.
    #[arg(long, value_delimiter = ',')]
    mechanisms: Option<Vec<Mechanism>>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    jaccard_k: Option<Vec<usize>>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    folds: Option<usize>,
    /// Tune on every window instead of only the first.
    #[arg(long)]
    per_window: bool,
    #[arg(long)]
    hausdorff_cap: Option<usize>,
}

impl RunArgs {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(f) = self.family {
            cfg.family = f;
            if cfg.spec.as_ref().is_some_and(|s| s.family() != f) {
                cfg.spec = None;
            }
        }
        if let Some(m) = &self.mechanisms {
            cfg.mechanisms = m.clone();
        }
        if let Some(r) = self.repeats {
            cfg.repeats = r;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(k) = &self.jaccard_k {
            cfg.jaccard_k = k.clone();
        }
        if let Some(d) = &self.output_dir {
            cfg.output_dir = d.clone();
        }
        if let Some(b) = self.budget {
            cfg.tuning.budget = b;
        }
        if let Some(f) = self.folds {
            cfg.tuning.folds = f;
        }
        if self.per_window {
            cfg.tuning.per_window = true;
        }
        if let Some(c) = self.hausdorff_cap {
            cfg.hausdorff_cap = c;
        }
    }
}

fn run(args: &RunArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    args.apply(&mut cfg);
    cfg.validate()?;

    let table = run_experiment(&cfg)?;
    let summary = aggregate(&table)?;
    let written = emit_report(&summary, &table, &cfg.output_dir)?;
    let resolved = cfg.output_dir.join("config.toml");
    std::fs::write(&resolved, cfg.to_toml_string()?).with_context(|| format!("writing {}", resolved.display()))?;

    println!("{} rows, {} runs", table.rows.len(), cfg.repeats);
    for m in &cfg.mechanisms {
        if let Some(row) = summary.pooled(*m) {
            println!(
                "{:<10} mean top-1 AUC {}  group {}",
                m.to_string(),
                row.mean_auc.map(|a| format!("{a:.4}")).unwrap_or_else(|| "-".into()),
                row.sk_group.map(|g| g.to_string()).unwrap_or_else(|| "-".into())
            );
        }
    }
    for p in written.iter().chain([&resolved]) {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if n == 0 {
            bail!("--workers must be at least 1");
        }
        par::init_workers(n);
    }
    match &cli.command {
        Command::Run(args) => run(args),
        Command::Generate { scenario, out } => {
            let sc = DriftScenario::load(scenario)?;
            sc.validate()?;
            let ds = generate_drift_stream(&sc)?;
            write_csv(&ds, out)?;
            println!(
                "wrote {} ({} periods, {} samples)",
                out.display(),
                ds.period_count(),
                ds.sample_count()
            );
            Ok(())
        }
        Command::Report { results, out } => {
            let table = ResultsTable::read_csv(results)?;
            if table.rows.is_empty() {
                bail!("{} has no rows", results.display());
            }
            let summary = aggregate(&table)?;
            for p in emit_report(&summary, &table, out)? {
                println!("wrote {}", p.display());
            }
            Ok(())
        }
    }
}
