//! DDM drift detector over the prediction-correctness stream.
//!
//! Tracks the running error rate `p` and its standard error
//! `s = sqrt(p(1 − p)/n)`, remembers the pair `(p_min, s_min)` at which
//! `p + s` was smallest, and compares the current `p + s` against
//! `p_min + 2·s_min` (warning) and `p_min + 3·s_min` (out of control).

use std::fmt;

/// Detector output for one observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub enum DriftLevel {
    #[default]
    InControl,
    Warning,
    OutOfControl,
}

impl DriftLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            DriftLevel::InControl => "in_control",
            DriftLevel::Warning => "warning",
            DriftLevel::OutOfControl => "out_of_control",
        }
    }
}

impl fmt::Display for DriftLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftConfig {
    /// Observations before minima are recorded and levels can leave `InControl`.
    pub min_observations: u64,
    /// Multiple of `s_min` above `p_min` that signals a warning.
    pub warning_level: f64,
    /// Multiple of `s_min` above `p_min` that signals drift.
    pub drift_level: f64,
    /// When set, only the first observation of a warning episode is a
    /// warning trigger.
    pub warning_edges_only: bool,
}

impl Default for DriftConfig {
    fn default() -> Self {
        DriftConfig {
            min_observations: 30,
            warning_level: 2.0,
            drift_level: 3.0,
            warning_edges_only: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftState {
    config: DriftConfig,
    n: u64,
    errors: u64,
    p: f64,
    s: f64,
    p_min: f64,
    s_min: f64,
    level: DriftLevel,
    previous_level: DriftLevel,
}

impl Default for DriftState {
    fn default() -> Self {
        Self::new(DriftConfig::default())
    }
}

impl DriftState {
    pub fn new(config: DriftConfig) -> Self {
        DriftState {
            config,
            n: 0,
            errors: 0,
            p: 0.0,
            s: 0.0,
            p_min: f64::INFINITY,
            s_min: f64::INFINITY,
            level: DriftLevel::InControl,
            previous_level: DriftLevel::InControl,
        }
    }

    pub fn config(&self) -> &DriftConfig {
        &self.config
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn error_rate(&self) -> f64 {
        self.p
    }

    pub fn std_error(&self) -> f64 {
        self.s
    }

    /// `(p_min, s_min)`, once recorded.
    pub fn minima(&self) -> Option<(f64, f64)> {
        self.p_min.is_finite().then_some((self.p_min, self.s_min))
    }

    pub fn level(&self) -> DriftLevel {
        self.level
    }

    /// Feeds one prediction outcome and returns the new level.
    pub fn update(&mut self, correct: bool) -> DriftLevel {
        self.n += 1;
        if !correct {
            self.errors += 1;
        }
        let n = self.n as f64;
        self.p = self.errors as f64 / n;
        self.s = (self.p * (1.0 - self.p) / n).sqrt();
        self.previous_level = self.level;

        if self.n < self.config.min_observations {
            self.level = DriftLevel::InControl;
            return self.level;
        }
        let current = self.p + self.s;
        if current < self.p_min + self.s_min {
            self.p_min = self.p;
            self.s_min = self.s;
        }
        // Strict comparisons: with p_min = s_min = 0 an error-free stream
        // would otherwise sit at the warning boundary forever.
        self.level = if current > self.p_min + self.config.drift_level * self.s_min {
            DriftLevel::OutOfControl
        } else if current > self.p_min + self.config.warning_level * self.s_min {
            DriftLevel::Warning
        } else {
            DriftLevel::InControl
        };
        self.level
    }

    /// Whether the latest observation should trigger a warning action.
    pub fn warning_triggered(&self) -> bool {
        self.level == DriftLevel::Warning
            && (!self.config.warning_edges_only || self.previous_level != DriftLevel::Warning)
    }

    pub fn reset(&mut self) {
        *self = DriftState::new(self.config);
    }
}
