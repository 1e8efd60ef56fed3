//! Prequential estimators with fading factors, the Q statistic and the
//! McNemar test for comparing two stream classifiers.

use crate::error::{Error, Result};

/// Critical value of χ²(1) at the 0.99 confidence level.
pub const MCNEMAR_THRESHOLD_99: f64 = 6.635;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Config(format!("fading factor must lie in (0, 1], got {alpha}")));
    }
    Ok(())
}

/// Fading-factor prequential estimate `S/B` with `S ← L + αS`, `B ← 1 + αB`.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingEstimator {
    alpha: f64,
    loss_sum: f64,
    count: f64,
}

impl FadingEstimator {
    pub fn new(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(FadingEstimator {
            alpha,
            loss_sum: 0.0,
            count: 0.0,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn update(&mut self, loss: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&loss) {
            return Err(Error::InvalidLoss(loss));
        }
        self.loss_sum = loss + self.alpha * self.loss_sum;
        self.count = 1.0 + self.alpha * self.count;
        Ok(self.estimate().unwrap_or(0.0))
    }

    /// `None` before the first update.
    pub fn estimate(&self) -> Option<f64> {
        (self.count > 0.0).then(|| self.loss_sum / self.count)
    }

    pub fn faded_loss(&self) -> f64 {
        self.loss_sum
    }

    pub fn faded_count(&self) -> f64 {
        self.count
    }
}

/// Fading accumulated losses of two algorithms and their log ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct QTracker {
    alpha: f64,
    loss_a: f64,
    loss_b: f64,
}

impl QTracker {
    pub fn new(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(QTracker {
            alpha,
            loss_a: 0.0,
            loss_b: 0.0,
        })
    }

    /// Updates both accumulations and returns `log(S_A / S_B)`, or `None`
    /// while either accumulation is zero. Negative values favor A.
    pub fn update(&mut self, loss_a: f64, loss_b: f64) -> Result<Option<f64>> {
        for loss in [loss_a, loss_b] {
            if !(loss >= 0.0 && loss.is_finite()) {
                return Err(Error::InvalidLoss(loss));
            }
        }
        self.loss_a = loss_a + self.alpha * self.loss_a;
        self.loss_b = loss_b + self.alpha * self.loss_b;
        Ok(self.value())
    }

    pub fn value(&self) -> Option<f64> {
        (self.loss_a > 0.0 && self.loss_b > 0.0).then(|| (self.loss_a / self.loss_b).ln())
    }

    pub fn accumulated(&self) -> (f64, f64) {
        (self.loss_a, self.loss_b)
    }
}

/// Cumulative McNemar test over paired predictions, without continuity
/// correction.
#[derive(Debug, Clone, PartialEq)]
pub struct McNemarCounter {
    /// A wrong, B right.
    n01: u64,
    /// A right, B wrong.
    n10: u64,
    threshold: f64,
}

impl Default for McNemarCounter {
    fn default() -> Self {
        Self::new(MCNEMAR_THRESHOLD_99)
    }
}

impl McNemarCounter {
    pub fn new(threshold: f64) -> Self {
        McNemarCounter {
            n01: 0,
            n10: 0,
            threshold,
        }
    }

    pub fn from_counts(n01: u64, n10: u64) -> Self {
        McNemarCounter {
            n01,
            n10,
            ..Self::default()
        }
    }

    pub fn counts(&self) -> (u64, u64) {
        (self.n01, self.n10)
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// `(n01 − n10)² / (n01 + n10)`, zero without disagreements.
    pub fn statistic(&self) -> f64 {
        let total = self.n01 + self.n10;
        if total == 0 {
            return 0.0;
        }
        let diff = self.n01 as f64 - self.n10 as f64;
        diff * diff / total as f64
    }

    pub fn rejects(&self) -> bool {
        self.statistic() > self.threshold
    }

    pub fn update(&mut self, correct_a: bool, correct_b: bool) -> (f64, bool) {
        match (correct_a, correct_b) {
            (false, true) => self.n01 += 1,
            (true, false) => self.n10 += 1,
            _ => {}
        }
        (self.statistic(), self.rejects())
    }
}
