//! Command-line experiment runner.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use kissme_stream::experiment::{run_experiment, ExperimentConfig};
use kissme_stream::Result;

/// Prequential A/B experiment: learned-metric k-NN stream classifier (A)
/// against its identity-metric ablation (B).
#[derive(Debug, Parser)]
#[command(name = "kissme-stream", version)]
struct Args {
    /// key=value configuration file; flags override its settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Generator name (sea, sea-drift, hyperplane, rbf, random-tree,
    /// waveform, gaussian) or csv:<path>.
    #[arg(long)]
    stream: Option<String>,
    /// Column schema for csv streams.
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Class column of csv streams; defaults to the last column.
    #[arg(long)]
    class_column: Option<String>,
    /// Instance budget, or `all` to read a csv stream to its end.
    #[arg(long)]
    instances: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fading factor of every estimator.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    max_base: Option<usize>,
    /// relative:<scale> or absolute:<value>.
    #[arg(long)]
    ridge: Option<String>,
    /// inverse-distance or majority.
    #[arg(long)]
    voting: Option<String>,
    /// identity or none.
    #[arg(long)]
    baseline: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write accuracy.svg and qstat.svg.
    #[arg(long)]
    plot: bool,
    /// Emit every stride-th row of the series.
    #[arg(long)]
    stride: Option<u64>,
    /// Emit every row (stride 1).
    #[arg(long)]
    full_resolution: bool,
    /// Run both classifiers on separate threads.
    #[arg(long)]
    parallel: bool,
    #[arg(long)]
    ddm_min_observations: Option<u64>,
    #[arg(long)]
    ddm_warning_level: Option<f64>,
    #[arg(long)]
    ddm_drift_level: Option<f64>,
}

impl Args {
    fn overrides(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut push = |key: &'static str, value: Option<String>| {
            if let Some(v) = value {
                out.push((key, v));
            }
        };
        // stream first so csv-only settings apply to the final stream
        push("stream", self.stream.clone());
        push("schema", self.schema.as_ref().map(|p| p.display().to_string()));
        push("class_column", self.class_column.clone());
        push("instances", self.instances.clone());
        push("seed", self.seed.map(|v| v.to_string()));
        push("alpha", self.alpha.map(|v| v.to_string()));
        push("k", self.k.map(|v| v.to_string()));
        push("max_base", self.max_base.map(|v| v.to_string()));
        push("ridge", self.ridge.clone());
        push("voting", self.voting.clone());
        push("baseline", self.baseline.clone());
        push("out", self.out.as_ref().map(|p| p.display().to_string()));
        push("plot", self.plot.then(|| "true".into()));
        push("stride", self.stride.map(|v| v.to_string()));
        push("full_resolution", self.full_resolution.then(|| "true".into()));
        push("parallel", self.parallel.then(|| "true".into()));
        push("ddm_min_observations", self.ddm_min_observations.map(|v| v.to_string()));
        push("ddm_warning_level", self.ddm_warning_level.map(|v| v.to_string()));
        push("ddm_drift_level", self.ddm_drift_level.map(|v| v.to_string()));
        out
    }

    fn into_config(self) -> Result<ExperimentConfig> {
        let mut config = ExperimentConfig::default();
        if let Some(path) = &self.config {
            config.apply_file(path)?;
        }
        for (key, value) in self.overrides() {
            config.set(key, &value)?;
        }
        Ok(config)
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = args.into_config().and_then(|config| {
        let report = run_experiment(&config)?;
        Ok((config, report))
    });
    match result {
        Ok((config, report)) => {
            let last = report.last();
            match last.acc_b {
                Some(b) => println!(
                    "{} instances: acc_a={:.4} acc_b={:.4}, output in {}",
                    report.summary.instances,
                    last.acc_a,
                    b,
                    config.out.display()
                ),
                None => println!(
                    "{} instances: acc_a={:.4}, output in {}",
                    report.summary.instances,
                    last.acc_a,
                    config.out.display()
                ),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
