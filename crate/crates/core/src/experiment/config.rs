//! Experiment configuration: key=value files and flag overrides share one
//! parser.

use std::path::{Path, PathBuf};

use crate::classifier::{ClassifierConfig, Voting};
use crate::error::{Error, Result};
use crate::metric::Ridge;
use crate::streams::GeneratorKind;

pub const DEFAULT_INSTANCES: u64 = 100_000;
pub const DEFAULT_STRIDE: u64 = 100;
pub const DEFAULT_ALPHA: f64 = 0.999;

#[derive(Debug, Clone, PartialEq)]
pub enum StreamSpec {
    Generator(GeneratorKind),
    Csv {
        path: PathBuf,
        schema: Option<PathBuf>,
        class_column: Option<String>,
    },
}

impl StreamSpec {
    /// `csv:<path>` or a generator name.
    pub fn parse(value: &str) -> Result<Self> {
        match value.strip_prefix("csv:") {
            Some(path) if !path.is_empty() => Ok(StreamSpec::Csv {
                path: PathBuf::from(path),
                schema: None,
                class_column: None,
            }),
            Some(_) => Err(Error::Config("csv stream needs a path".into())),
            None => GeneratorKind::from_name(value).map(StreamSpec::Generator),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            StreamSpec::Generator(kind) => kind.name().to_string(),
            StreamSpec::Csv { path, .. } => format!("csv:{}", path.display()),
        }
    }
}

/// Second classifier of a paired run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baseline {
    /// Classifier A's configuration with the metric frozen at identity.
    Identity,
    None,
}

impl Baseline {
    pub fn parse(value: &str) -> Result<Self> {
        match value {
            "identity" => Ok(Baseline::Identity),
            "none" => Ok(Baseline::None),
            other => Err(Error::Config(format!("unknown baseline {other:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Baseline::Identity => "identity",
            Baseline::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub stream: StreamSpec,
    pub seed: u64,
    /// `None` runs a CSV stream to its end.
    pub instances: Option<u64>,
    pub classifier: ClassifierConfig,
    pub baseline: Baseline,
    pub alpha: f64,
    pub out: PathBuf,
    pub plot: bool,
    pub stride: u64,
    /// Run A and B on separate threads, joined at every instance.
    pub parallel: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            stream: StreamSpec::Generator(GeneratorKind::Waveform),
            seed: 1,
            instances: Some(DEFAULT_INSTANCES),
            classifier: ClassifierConfig::default(),
            baseline: Baseline::Identity,
            alpha: DEFAULT_ALPHA,
            out: PathBuf::from("out"),
            plot: false,
            stride: DEFAULT_STRIDE,
            parallel: false,
        }
    }
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

fn flag(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected true or false, got {value:?}"))),
    }
}

/// `relative:<scale>`, `absolute:<value>` or a bare number (absolute).
pub fn parse_ridge(value: &str) -> Result<Ridge> {
    let ridge = if let Some(v) = value.strip_prefix("relative:") {
        Ridge::Relative(number("ridge", v)?)
    } else if let Some(v) = value.strip_prefix("absolute:") {
        Ridge::Absolute(number("ridge", v)?)
    } else {
        Ridge::Absolute(number("ridge", value)?)
    };
    ridge.validate()?;
    Ok(ridge)
}

pub fn format_ridge(ridge: Ridge) -> String {
    match ridge {
        Ridge::Relative(v) => format!("relative:{v:e}"),
        Ridge::Absolute(v) => format!("absolute:{v:e}"),
    }
}

impl ExperimentConfig {
    /// Applies one `key=value` setting. Keys use underscores; dashes are
    /// accepted as well.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        let c = &mut self.classifier;
        match key.as_str() {
            "stream" => {
                let (schema, class_column) = match &self.stream {
                    StreamSpec::Csv {
                        schema, class_column, ..
                    } => (schema.clone(), class_column.clone()),
                    StreamSpec::Generator(_) => (None, None),
                };
                self.stream = StreamSpec::parse(value)?;
                if let StreamSpec::Csv {
                    schema: s,
                    class_column: cc,
                    ..
                } = &mut self.stream
                {
                    *s = schema;
                    *cc = class_column;
                }
            }
            "schema" | "class_column" => match &mut self.stream {
                StreamSpec::Csv {
                    schema, class_column, ..
                } => {
                    if key == "schema" {
                        *schema = Some(PathBuf::from(value));
                    } else {
                        *class_column = Some(value.to_string());
                    }
                }
                StreamSpec::Generator(_) => {
                    return Err(Error::Config(format!("{key} only applies to csv streams")));
                }
            },
            "seed" => self.seed = number(&key, value)?,
            "instances" => {
                self.instances = if value == "all" {
                    None
                } else {
                    Some(number(&key, value)?)
                };
            }
            "alpha" => self.alpha = number(&key, value)?,
            "k" => c.k = number(&key, value)?,
            "max_base" => c.max_base = number(&key, value)?,
            "ridge" => c.ridge = parse_ridge(value)?,
            "voting" => c.voting = Voting::from_name(value)?,
            "learn_metric" => c.learn_metric = flag(&key, value)?,
            "ddm_min_observations" => c.drift.min_observations = number(&key, value)?,
            "ddm_warning_level" => c.drift.warning_level = number(&key, value)?,
            "ddm_drift_level" => c.drift.drift_level = number(&key, value)?,
            "ddm_warning_edges_only" => c.drift.warning_edges_only = flag(&key, value)?,
            "baseline" => self.baseline = Baseline::parse(value)?,
            "out" => self.out = PathBuf::from(value),
            "plot" => self.plot = flag(&key, value)?,
            "stride" => self.stride = number(&key, value)?,
            "full_resolution" => {
                if flag(&key, value)? {
                    self.stride = 1;
                }
            }
            "parallel" => self.parallel = flag(&key, value)?,
            _ => return Err(Error::Config(format!("unknown setting {key:?}"))),
        }
        Ok(())
    }

    /// Applies every `key=value` line of `text`; blank lines and `#`
    /// comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("expected key=value, got {line:?}"),
            })?;
            self.set(key, value).map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.apply_text(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.classifier.validate()?;
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if self.instances == Some(0) {
            return Err(Error::Config("instances must be at least 1".into()));
        }
        if self.stride == 0 {
            return Err(Error::Config("stride must be at least 1".into()));
        }
        match &self.stream {
            StreamSpec::Generator(_) if self.instances.is_none() => {
                Err(Error::Config("generator streams need a finite instance budget".into()))
            }
            StreamSpec::Csv { schema: None, .. } => Err(Error::Config("csv streams need a schema file".into())),
            _ => Ok(()),
        }
    }

    /// Flat `key=value` echo of the configuration.
    pub fn echo(&self) -> Vec<(String, String)> {
        let c = &self.classifier;
        let mut out = vec![("stream".to_string(), self.stream.describe())];
        if let StreamSpec::Csv {
            schema, class_column, ..
        } = &self.stream
        {
            if let Some(s) = schema {
                out.push(("schema".into(), s.display().to_string()));
            }
            if let Some(cc) = class_column {
                out.push(("class_column".into(), cc.clone()));
            }
        }
        let instances = self.instances.map_or("all".to_string(), |n| n.to_string());
        out.extend([
            ("seed".to_string(), self.seed.to_string()),
            ("instances".into(), instances),
            ("alpha".into(), self.alpha.to_string()),
            ("k".into(), c.k.to_string()),
            ("max_base".into(), c.max_base.to_string()),
            ("ridge".into(), format_ridge(c.ridge)),
            ("voting".into(), c.voting.name().to_string()),
            ("learn_metric".into(), c.learn_metric.to_string()),
            ("ddm_min_observations".into(), c.drift.min_observations.to_string()),
            ("ddm_warning_level".into(), c.drift.warning_level.to_string()),
            ("ddm_drift_level".into(), c.drift.drift_level.to_string()),
            ("ddm_warning_edges_only".into(), c.drift.warning_edges_only.to_string()),
            ("baseline".into(), self.baseline.name().to_string()),
            ("stride".into(), self.stride.to_string()),
            ("parallel".into(), self.parallel.to_string()),
        ]);
        out
    }
}
