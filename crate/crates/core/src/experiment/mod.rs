//! Prequential A/B experiments: both classifiers predict-then-train on the
//! identical instance in lockstep while the evaluation trackers follow.

mod config;
mod plot;
mod report;

use std::time::Instant;

pub use config::{
    format_ridge, parse_ridge, Baseline, ExperimentConfig, StreamSpec, DEFAULT_ALPHA, DEFAULT_INSTANCES, DEFAULT_STRIDE,
};
pub use plot::{accuracy_svg, qstat_svg};
pub use report::{format_value, write_report, ExperimentReport, SeriesRow, Summary};

use crate::classifier::{OnlineKissmeStream, Step};
use crate::drift::DriftLevel;
use crate::error::{Error, Result};
use crate::evaluation::{FadingEstimator, McNemarCounter, QTracker};
use crate::instance_base::Instance;
use crate::streams::{load_csv, CsvSchema, Generator, GeneratorConfig, InstanceStream};

/// Opens the configured stream.
pub fn open_stream(config: &ExperimentConfig) -> Result<Box<dyn InstanceStream>> {
    Ok(match &config.stream {
        StreamSpec::Generator(kind) => Box::new(Generator::new(GeneratorConfig::new(kind.clone(), config.seed))?),
        StreamSpec::Csv {
            path,
            schema,
            class_column,
        } => {
            let schema = schema
                .as_ref()
                .ok_or_else(|| Error::Config("csv streams need a schema file".into()))?;
            let schema = CsvSchema::from_file(schema)?;
            Box::new(load_csv(path, &schema, class_column.as_deref())?)
        }
    })
}

struct Side {
    model: OnlineKissmeStream,
    fading: FadingEstimator,
    drift_events: Vec<u64>,
    /// Steps spent at the warning level.
    warnings: u64,
}

impl Side {
    fn new(model: OnlineKissmeStream, alpha: f64) -> Result<Self> {
        Ok(Side {
            model,
            fading: FadingEstimator::new(alpha)?,
            drift_events: Vec::new(),
            warnings: 0,
        })
    }

    /// Returns `(loss, error estimate, step)`.
    fn record(&mut self, index: u64, step: Step) -> Result<(f64, f64, Step)> {
        let loss = if step.prediction.correct { 0.0 } else { 1.0 };
        let err = self.fading.update(loss)?;
        if step.reset {
            self.drift_events.push(index);
        }
        if step.drift_level == Some(DriftLevel::Warning) {
            self.warnings += 1;
        }
        Ok((loss, err, step))
    }
}

fn process_pair(
    a: &mut OnlineKissmeStream,
    b: Option<&mut OnlineKissmeStream>,
    inst: &Instance,
    parallel: bool,
) -> (Result<Step>, Option<Result<Step>>) {
    match b {
        Some(b) if parallel => {
            let (ra, rb) = rayon::join(|| a.process(inst), || b.process(inst));
            (ra, Some(rb))
        }
        Some(b) => (a.process(inst), Some(b.process(inst))),
        None => (a.process(inst), None),
    }
}

/// Runs the experiment in memory; nothing is written.
pub fn simulate(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let started = Instant::now();
    let mut stream = open_stream(config)?;
    let schema = stream.schema().clone();
    let dim = schema.encoded_dim();
    let n_classes = schema.n_classes();

    let mut a = Side::new(
        OnlineKissmeStream::new(dim, n_classes, config.classifier.clone())?,
        config.alpha,
    )?;
    let mut b = match config.baseline {
        Baseline::Identity => Some(Side::new(
            OnlineKissmeStream::new(dim, n_classes, config.classifier.identity_baseline())?,
            config.alpha,
        )?),
        Baseline::None => None,
    };
    let mut q = QTracker::new(config.alpha)?;
    let mut mcnemar = McNemarCounter::default();

    let mut series = Vec::with_capacity(config.instances.unwrap_or(0).min(1 << 24) as usize);
    let mut index = 0u64;
    while config.instances.is_none_or(|n| index < n) {
        let inst = match stream.next_instance() {
            Some(inst) => inst?,
            None if config.instances.is_none() => break,
            None => {
                return Err(Error::Config(format!(
                    "stream ended after {index} of {} instances",
                    config.instances.unwrap_or(0)
                )))
            }
        };
        index += 1;
        let (step_a, step_b) = process_pair(&mut a.model, b.as_mut().map(|s| &mut s.model), &inst, config.parallel);
        let (loss_a, err_a, step_a) = a.record(index, step_a?)?;
        let mut row = SeriesRow {
            index,
            loss_a,
            acc_a: 1.0 - err_a,
            err_a,
            drift_a: step_a.drift_level,
            loss_b: None,
            acc_b: None,
            err_b: None,
            q: None,
            mcnemar: None,
            reject: None,
            drift_b: None,
        };
        if let (Some(b), Some(step_b)) = (b.as_mut(), step_b) {
            let (loss_b, err_b, step_b) = b.record(index, step_b?)?;
            let (stat, reject) = mcnemar.update(step_a.prediction.correct, step_b.prediction.correct);
            row.loss_b = Some(loss_b);
            row.acc_b = Some(1.0 - err_b);
            row.err_b = Some(err_b);
            row.q = q.update(loss_a, loss_b)?;
            row.mcnemar = Some(stat);
            row.reject = Some(reject);
            row.drift_b = Some(step_b.drift_level);
        }
        series.push(row);
    }
    if series.is_empty() {
        return Err(Error::Config("stream produced no instances".into()));
    }

    let summary = Summary {
        instances: index,
        drift_events_a: a.drift_events,
        drift_events_b: b.as_ref().map(|s| s.drift_events.clone()),
        warnings_a: a.warnings,
        warnings_b: b.as_ref().map(|s| s.warnings),
        metric_updates_a: a.model.metric_updates(),
        metric_updates_b: b.as_ref().map(|s| s.model.metric_updates()),
        final_base_a: a.model.base().len(),
        final_base_b: b.as_ref().map(|s| s.model.base().len()),
        mcnemar_counts: b.as_ref().map(|_| mcnemar.counts()),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        config_echo: config.echo(),
    };
    Ok(ExperimentReport {
        paired: b.is_some(),
        series,
        summary,
    })
}

/// Runs the experiment and writes `series.csv`, `summary.txt` and, when
/// plotting, the SVG files into the output directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let report = simulate(config)?;
    write_report(&report, &config.out, config.stride, config.plot)?;
    Ok(report)
}
