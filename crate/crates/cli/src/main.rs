use std::path::{Path, PathBuf};
use std::process::ExitCode;

use abstain::datagen::{generate, InstanceFile, InstanceSpec};
use abstain::harness::{
    run_experiment, sweep_risk_coverage, verify_bounds, write_json, BoundKind, BoundReport, ExperimentConfig,
};
use abstain::Error;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "abstain", version, about = "Run abstaining-classifier experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an online learner against an adversary.
    KwikRun(Common),
    /// Fit a selective classifier and score it on fresh points.
    SelectiveRun(Common),
    /// Risk-coverage sweep over the `[sweep]` grid.
    Sweep(Common),
    /// Generate the configured instance and save it as JSON.
    GenInstance(Common),
    /// Check every bound; exits with 3 if one is violated.
    VerifyBounds(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
}

impl Common {
    fn load(&self) -> abstain::Result<(ExperimentConfig, PathBuf)> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        cfg.validate("command line")?;
        let out = self
            .out
            .clone()
            .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("abstain-out"));
        Ok((cfg, out))
    }
}

enum Failure {
    Error(Error),
    Violated(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn print_bounds(bounds: &[BoundReport]) {
    for b in bounds {
        let status = match (b.satisfied, b.enforced) {
            (true, _) => "ok",
            (false, true) => "VIOLATED",
            (false, false) => "exceeded (not enforced)",
        };
        let kind = match b.kind {
            BoundKind::Hard => "hard",
            BoundKind::Statistical => "statistical",
            BoundKind::Shape => "shape",
        };
        println!(
            "{status}: {} [{kind}] bound={} observed={} trials={}",
            b.name, b.bound_value, b.observed_worst, b.trials
        );
    }
}

fn kind_mismatch(cfg: &ExperimentConfig, want_selective: bool) -> Error {
    let cmd = if want_selective { "selective-run" } else { "kwik-run" };
    Error::config("algorithm.name", format!("`{}` cannot be run by {cmd}", cfg.algorithm.name()))
}

fn execute(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::KwikRun(c) => run(&c, false)?,
        Command::SelectiveRun(c) => run(&c, true)?,
        Command::Sweep(c) => {
            let (cfg, out) = c.load()?;
            let Some(s) = &cfg.sweep else {
                return Err(Error::config("sweep", "config has no [sweep] section").into());
            };
            let result = sweep_risk_coverage(&cfg, s.param, &s.values)?;
            std::fs::create_dir_all(&out).map_err(Error::from)?;
            write_json(&out.join("sweep.json"), &result)?;
            for p in &result.points {
                let risk = p.point.risk_on_predicted.map_or("undefined".to_string(), |r| r.to_string());
                println!("{} coverage={} risk={} {}", p.point.params, p.point.coverage, risk, p.tags.join(" "));
            }
            print_bounds(&result.bounds);
        }
        Command::GenInstance(c) => {
            let (cfg, out) = c.load()?;
            let spec = InstanceSpec {
                params: cfg.instance.params.clone(),
                seed: c.seed.unwrap_or(cfg.instance.seed),
            };
            let file = InstanceFile {
                instance: generate(&spec)?,
                spec,
            };
            std::fs::create_dir_all(&out).map_err(Error::from)?;
            let path = out.join("instance.json");
            file.save(&path)?;
            println!("wrote {}", path.display());
        }
        Command::VerifyBounds(c) => {
            let (cfg, out) = c.load()?;
            let bounds = verify_bounds(&cfg)?;
            std::fs::create_dir_all(&out).map_err(Error::from)?;
            write_json(&out.join("bounds.json"), &bounds)?;
            print_bounds(&bounds);
            let violated = bounds.iter().filter(|b| b.violated()).count();
            if violated > 0 {
                return Err(Failure::Violated(violated));
            }
        }
    }
    Ok(())
}

fn run(c: &Common, selective: bool) -> Result<(), Failure> {
    let (cfg, out) = c.load()?;
    if cfg.algorithm.is_selective() != selective {
        return Err(kind_mismatch(&cfg, selective).into());
    }
    let result = run_experiment(&cfg)?;
    result.write(Path::new(&out), cfg.output.summary_only)?;
    let t = result.summary.totals;
    println!(
        "{} on {}: trials={} rounds={} predictions={} mistakes={} abstentions={}",
        result.summary.algorithm, result.summary.instance, cfg.trials, t.rounds, t.predictions, t.mistakes, t.abstentions
    );
    print_bounds(&result.summary.bounds);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violated(n)) => {
            eprintln!("{n} bound(s) violated");
            ExitCode::from(3)
        }
        Err(Failure::Error(e @ Error::Config { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
