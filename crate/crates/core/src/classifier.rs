//! Online-KISSME-Stream: a k-NN stream classifier whose Mahalanobis metric
//! is learned online from same-class / different-class pair constraints.
//!
//! Life cycle of the model:
//!
//! * **Bootstrap** (`learned == false`): every arriving instance is stored
//!   and paired with all instances already in the base. When the base
//!   reaches `max_base`, the metric is computed and the model is `learned`.
//! * **Learned**: each instance is classified with the current metric, paired
//!   with its retrieved neighbors, and its correctness fed to the drift
//!   detector. A warning recomputes the metric from the accumulated pairs;
//!   out-of-control clears the base, the pairs and the detector and returns
//!   to bootstrap while keeping the metric. After a correct prediction the
//!   same-label neighbors are removed. The instance is then stored and the
//!   oldest instances evicted down to `max_base`.
//!
//! Prediction is test-then-train from the first instance: while
//! bootstrapping, the classifier predicts with the initial identity metric
//! (or the metric inherited across a reset).

use crate::drift::{DriftConfig, DriftLevel, DriftState};
use crate::error::{Error, Result};
use crate::instance_base::{ClassId, Instance, InstanceBase, Neighbor};
use crate::metric::{ConstraintAccumulator, MetricMatrix, Ridge};

/// Added to neighbor distances before inverting them into vote weights.
pub const VOTE_EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Voting {
    /// Each neighbor votes `1 / (distance + VOTE_EPSILON)`.
    #[default]
    InverseDistance,
    /// Each neighbor votes 1.
    Majority,
}

impl Voting {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "inverse-distance" => Ok(Voting::InverseDistance),
            "majority" => Ok(Voting::Majority),
            other => Err(Error::Config(format!("unknown voting mode {other:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Voting::InverseDistance => "inverse-distance",
            Voting::Majority => "majority",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierConfig {
    pub k: usize,
    pub max_base: usize,
    pub ridge: Ridge,
    pub voting: Voting,
    pub drift: DriftConfig,
    /// `false` freezes the metric at identity: plain Euclidean k-NN with the
    /// same editing and drift handling.
    pub learn_metric: bool,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            k: 10,
            max_base: 500,
            ridge: Ridge::default(),
            voting: Voting::default(),
            drift: DriftConfig::default(),
            learn_metric: true,
        }
    }
}

impl ClassifierConfig {
    /// Same pipeline with the metric frozen at identity.
    pub fn identity_baseline(&self) -> Self {
        ClassifierConfig {
            learn_metric: false,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be positive".into()));
        }
        if self.max_base == 0 {
            return Err(Error::Config("max_base must be positive".into()));
        }
        self.ridge.validate()?;
        let d = &self.drift;
        if d.min_observations == 0 || !(d.warning_level > 0.0 && d.drift_level >= d.warning_level) {
            return Err(Error::Config(
                "drift detector needs min_observations > 0 and 0 < warning_level <= drift_level".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    /// `None` when the base was empty.
    pub predicted_label: Option<ClassId>,
    /// Normalized class weights; all zero when abstaining.
    pub distribution: Vec<f64>,
    pub correct: bool,
}

impl Prediction {
    pub fn abstained(&self) -> bool {
        self.predicted_label.is_none()
    }

    fn abstain(n_classes: usize) -> Self {
        Prediction {
            predicted_label: None,
            distribution: vec![0.0; n_classes],
            correct: false,
        }
    }
}

/// Everything that happened while processing one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub prediction: Prediction,
    /// Detector output; `None` while bootstrapping (the detector is not fed).
    pub drift_level: Option<DriftLevel>,
    pub metric_updated: bool,
    /// Out-of-control reset performed this step.
    pub reset: bool,
    pub learned: bool,
}

/// Distance-weighted vote over retrieved neighbors. Ties go to the smallest
/// class id.
pub fn make_distribution(neighbors: &[Neighbor<'_>], n_classes: usize, voting: Voting) -> Prediction {
    if neighbors.is_empty() {
        return Prediction::abstain(n_classes);
    }
    let mut weights = vec![0.0; n_classes];
    for n in neighbors {
        weights[n.instance.label] += match voting {
            Voting::InverseDistance => 1.0 / (n.distance + VOTE_EPSILON),
            Voting::Majority => 1.0,
        };
    }
    let mut best = 0;
    for (c, &w) in weights.iter().enumerate() {
        if w > weights[best] {
            best = c;
        }
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    Prediction {
        predicted_label: Some(best),
        distribution: weights,
        correct: false,
    }
}

/// Pairs `inst` with each retrieved neighbor as a similar or dissimilar
/// constraint.
pub fn accumulate_post_learning(acc: &mut ConstraintAccumulator, inst: &Instance, neighbors: &[Neighbor<'_>]) {
    for n in neighbors {
        acc.accumulate_unchecked(
            inst.encoded.as_slice(),
            n.instance.encoded.as_slice(),
            inst.label == n.instance.label,
        );
    }
}

#[derive(Debug, Clone)]
pub struct OnlineKissmeStream {
    config: ClassifierConfig,
    dim: usize,
    n_classes: usize,
    base: InstanceBase,
    acc: ConstraintAccumulator,
    metric: MetricMatrix,
    learned: bool,
    detector: DriftState,
    metric_updates: u64,
    resets: u64,
}

impl OnlineKissmeStream {
    pub fn new(dim: usize, n_classes: usize, config: ClassifierConfig) -> Result<Self> {
        config.validate()?;
        if dim == 0 || n_classes < 2 {
            return Err(Error::Config(format!(
                "need a positive dimension and at least 2 classes, got d={dim}, classes={n_classes}"
            )));
        }
        Ok(OnlineKissmeStream {
            base: InstanceBase::new(config.max_base),
            acc: ConstraintAccumulator::new(dim),
            metric: MetricMatrix::identity(dim),
            detector: DriftState::new(config.drift),
            config,
            dim,
            n_classes,
            learned: false,
            metric_updates: 0,
            resets: 0,
        })
    }

    pub fn config(&self) -> &ClassifierConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn base(&self) -> &InstanceBase {
        &self.base
    }

    pub fn accumulator(&self) -> &ConstraintAccumulator {
        &self.acc
    }

    pub fn metric(&self) -> &MetricMatrix {
        &self.metric
    }

    pub fn learned(&self) -> bool {
        self.learned
    }

    pub fn detector(&self) -> &DriftState {
        &self.detector
    }

    /// Metric computations performed so far (bootstrap and warning).
    pub fn metric_updates(&self) -> u64 {
        self.metric_updates
    }

    pub fn resets(&self) -> u64 {
        self.resets
    }

    fn check(&self, inst: &Instance) -> Result<()> {
        if inst.encoded.dim() != self.dim {
            return Err(Error::Schema(format!(
                "instance has dimension {}, model expects {}",
                inst.encoded.dim(),
                self.dim
            )));
        }
        if inst.label >= self.n_classes {
            return Err(Error::Schema(format!(
                "label {} outside {} classes",
                inst.label, self.n_classes
            )));
        }
        if !inst.encoded.is_finite() {
            return Err(Error::NonFinite("instance features"));
        }
        if let Some(last) = self.base.last_arrival_index() {
            if inst.arrival_index <= last {
                return Err(Error::Schema(format!(
                    "arrival index {} is not after stored index {last}",
                    inst.arrival_index
                )));
            }
        }
        Ok(())
    }

    /// Classifies `inst` with the current base and metric; the true label
    /// is only used to fill in `correct`.
    pub fn predict(&self, inst: &Instance) -> Prediction {
        match self.base.knn(&inst.encoded, self.config.k, &self.metric) {
            Ok(hits) => {
                let mut p = make_distribution(&hits, self.n_classes, self.config.voting);
                p.correct = p.predicted_label == Some(inst.label);
                p
            }
            Err(_) => Prediction::abstain(self.n_classes),
        }
    }

    /// Test-then-train on one instance. On error the model is unchanged.
    pub fn process(&mut self, inst: &Instance) -> Result<Step> {
        self.check(inst)?;
        if self.learned {
            self.learned_step(inst)
        } else {
            self.bootstrap_step(inst)
        }
    }

    fn compute_metric(&self, acc: &ConstraintAccumulator) -> Result<Option<MetricMatrix>> {
        if !self.config.learn_metric {
            return Ok(None);
        }
        match acc.compute_metric(self.config.ridge) {
            Ok(m) => Ok(Some(m)),
            // one-class bootstrap or warning: keep the current metric
            Err(Error::InsufficientConstraints { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn bootstrap_step(&mut self, inst: &Instance) -> Result<Step> {
        let prediction = self.predict(inst);
        let completes = self.base.len() + 1 >= self.config.max_base;

        let mut metric_updated = false;
        if completes {
            let mut acc = self.acc.clone();
            for stored in self.base.iter() {
                acc.accumulate_unchecked(
                    inst.encoded.as_slice(),
                    stored.encoded.as_slice(),
                    inst.label == stored.label,
                );
            }
            if let Some(m) = self.compute_metric(&acc)? {
                self.metric = m;
                self.metric_updates += 1;
                metric_updated = true;
            }
            self.acc = acc;
            self.learned = true;
        } else {
            for stored in self.base.iter() {
                self.acc.accumulate_unchecked(
                    inst.encoded.as_slice(),
                    stored.encoded.as_slice(),
                    inst.label == stored.label,
                );
            }
        }
        self.base.insert(inst.clone())?;
        Ok(Step {
            prediction,
            drift_level: None,
            metric_updated,
            reset: false,
            learned: self.learned,
        })
    }

    fn learned_step(&mut self, inst: &Instance) -> Result<Step> {
        let (prediction, neighbor_keys) = match self.base.knn(&inst.encoded, self.config.k, &self.metric) {
            Ok(hits) => {
                let mut p = make_distribution(&hits, self.n_classes, self.config.voting);
                p.correct = p.predicted_label == Some(inst.label);
                let keys: Vec<(u64, ClassId)> = hits
                    .iter()
                    .map(|n| (n.instance.arrival_index, n.instance.label))
                    .collect();
                (p, keys)
            }
            Err(_) => (Prediction::abstain(self.n_classes), Vec::new()),
        };

        let mut detector = self.detector.clone();
        let level = detector.update(prediction.correct);
        let recompute = detector.warning_triggered() && self.config.learn_metric;

        // Stage the accumulator only when a fallible metric computation follows.
        let mut staged = recompute.then(|| self.acc.clone());
        {
            let target = staged.as_mut().unwrap_or(&mut self.acc);
            for (idx, _) in &neighbor_keys {
                let n = self.base.get(*idx).expect("neighbor is stored");
                target.accumulate_unchecked(inst.encoded.as_slice(), n.encoded.as_slice(), inst.label == n.label);
            }
        }
        let mut metric_updated = false;
        if let Some(acc) = staged {
            if let Some(m) = self.compute_metric(&acc)? {
                self.metric = m;
                self.metric_updates += 1;
                metric_updated = true;
            }
            self.acc = acc;
        }
        self.detector = detector;

        let reset = level == DriftLevel::OutOfControl;
        if reset {
            self.reset_learning();
        }
        if prediction.correct {
            self.base.edit_after_correct(inst.label, &neighbor_keys);
        }
        self.base.insert(inst.clone())?;
        self.base.evict_to_capacity();
        Ok(Step {
            prediction,
            drift_level: Some(level),
            metric_updated,
            reset,
            learned: self.learned,
        })
    }

    /// Back to bootstrap: empty base, no pairs, fresh detector. The metric
    /// is kept.
    fn reset_learning(&mut self) {
        self.base.clear();
        self.acc.clear();
        self.detector.reset();
        self.learned = false;
        self.resets += 1;
    }
}
