//! Synthetic stream generators.
//!
//! All generators are infinite and a pure function of `(kind, parameters,
//! seed)`. The model (tree, centroids, hyperplane weights) is drawn first
//! from the same random source, then instances follow.

use crate::error::{Error, Result};
use crate::instance_base::{ClassId, Instance};
use crate::streams::rng::StreamRng;
use crate::streams::schema::{AttrValue, Attribute, StreamSchema};
use crate::streams::InstanceStream;

/// SEA concepts: three attributes on `[0, 10]`, class 0 iff `x₁ + x₂ ≤ θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeaParams {
    /// Threshold per block, used in order and then cycled.
    pub thresholds: Vec<f64>,
    /// Instances per block; `None` keeps the first threshold forever.
    pub block_len: Option<u64>,
    /// Fraction of labels flipped.
    pub noise: f64,
}

impl Default for SeaParams {
    fn default() -> Self {
        SeaParams {
            thresholds: vec![8.0],
            block_len: None,
            noise: 0.1,
        }
    }
}

impl SeaParams {
    /// The four classic concepts θ ∈ {8, 9, 7, 9.5} in blocks of `block_len`.
    pub fn drifting(block_len: u64) -> Self {
        SeaParams {
            thresholds: vec![8.0, 9.0, 7.0, 9.5],
            block_len: Some(block_len),
            noise: 0.1,
        }
    }
}

/// Rotating hyperplane over `[0, 1]^d`: class 1 iff `Σ wᵢxᵢ > Σ wᵢ / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperplaneParams {
    pub dim: usize,
    /// Number of leading weights that drift.
    pub drift_attributes: usize,
    /// Weight change per instance.
    pub magnitude: f64,
    /// Per-instance probability that a drifting weight reverses direction.
    pub reverse_probability: f64,
    pub noise: f64,
}

impl Default for HyperplaneParams {
    fn default() -> Self {
        HyperplaneParams {
            dim: 10,
            drift_attributes: 10,
            magnitude: 0.001,
            reverse_probability: 0.1,
            noise: 0.05,
        }
    }
}

/// Random radial basis functions with optionally moving centroids.
#[derive(Debug, Clone, PartialEq)]
pub struct RbfParams {
    pub dim: usize,
    pub classes: usize,
    pub centroids: usize,
    /// Number of centroids that move.
    pub drift_centroids: usize,
    /// Distance a drifting centroid moves per instance.
    pub speed: f64,
    pub noise: f64,
}

impl Default for RbfParams {
    fn default() -> Self {
        RbfParams {
            dim: 10,
            classes: 2,
            centroids: 50,
            drift_centroids: 50,
            speed: 0.001,
            noise: 0.0,
        }
    }
}

/// Random decision tree over numeric and nominal attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomTreeParams {
    pub numeric: usize,
    pub nominal: usize,
    pub categories: usize,
    pub classes: usize,
    pub max_depth: usize,
    /// Depth from which nodes may become leaves early.
    pub first_leaf_level: usize,
    /// Probability of an early leaf at or below `first_leaf_level`.
    pub leaf_fraction: f64,
}

impl Default for RandomTreeParams {
    fn default() -> Self {
        RandomTreeParams {
            numeric: 5,
            nominal: 5,
            categories: 5,
            classes: 2,
            max_depth: 5,
            first_leaf_level: 3,
            leaf_fraction: 0.15,
        }
    }
}

/// Two Gaussian classes separated along a few informative dimensions,
/// padded with high-variance class-independent dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianParams {
    pub informative: usize,
    pub noise_dims: usize,
    /// Distance between the class means along each informative axis.
    pub separation: f64,
    /// Standard deviation of the noise dimensions (informative ones use 1).
    pub noise_std: f64,
}

impl Default for GaussianParams {
    fn default() -> Self {
        GaussianParams {
            informative: 2,
            noise_dims: 8,
            separation: 1.5,
            noise_std: 3.0,
        }
    }
}

/// Noise-free SEA label: class 0 iff `x₁ + x₂ ≤ θ`.
pub fn sea_concept(x1: f64, x2: f64, threshold: f64) -> ClassId {
    usize::from(x1 + x2 > threshold)
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorKind {
    Sea(SeaParams),
    Hyperplane(HyperplaneParams),
    RandomRbf(RbfParams),
    RandomTree(RandomTreeParams),
    Waveform,
    Gaussian(GaussianParams),
}

impl GeneratorKind {
    /// Parses a kind name into its default parameterization.
    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "sea" => GeneratorKind::Sea(SeaParams::default()),
            "sea-drift" => GeneratorKind::Sea(SeaParams::drifting(25_000)),
            "hyperplane" => GeneratorKind::Hyperplane(HyperplaneParams::default()),
            "rbf" => GeneratorKind::RandomRbf(RbfParams::default()),
            "random-tree" => GeneratorKind::RandomTree(RandomTreeParams::default()),
            "waveform" => GeneratorKind::Waveform,
            "gaussian" => GeneratorKind::Gaussian(GaussianParams::default()),
            other => return Err(Error::Config(format!("unknown generator kind {other:?}"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            GeneratorKind::Sea(p) if p.block_len.is_some() && p.thresholds.len() > 1 => "sea-drift",
            GeneratorKind::Sea(_) => "sea",
            GeneratorKind::Hyperplane(_) => "hyperplane",
            GeneratorKind::RandomRbf(_) => "rbf",
            GeneratorKind::RandomTree(_) => "random-tree",
            GeneratorKind::Waveform => "waveform",
            GeneratorKind::Gaussian(_) => "gaussian",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub kind: GeneratorKind,
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn new(kind: GeneratorKind, seed: u64) -> Self {
        GeneratorConfig { kind, seed }
    }
}

fn check_fraction(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Config(format!("{name} must lie in [0, 1], got {v}")));
    }
    Ok(())
}

fn check_positive(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        return Err(Error::Config(format!("{name} must be positive")));
    }
    Ok(())
}

#[derive(Debug, Clone)]
enum TreeNode {
    Leaf(ClassId),
    Numeric {
        attr: usize,
        threshold: f64,
        below: Box<TreeNode>,
        above: Box<TreeNode>,
    },
    Nominal {
        attr: usize,
        children: Vec<TreeNode>,
    },
}

impl TreeNode {
    fn classify(&self, numeric: &[f64], nominal: &[usize]) -> ClassId {
        match self {
            TreeNode::Leaf(c) => *c,
            TreeNode::Numeric {
                attr,
                threshold,
                below,
                above,
            } => {
                if numeric[*attr] < *threshold {
                    below.classify(numeric, nominal)
                } else {
                    above.classify(numeric, nominal)
                }
            }
            TreeNode::Nominal { attr, children } => children[nominal[*attr]].classify(numeric, nominal),
        }
    }
}

fn grow_tree(
    p: &RandomTreeParams,
    rng: &mut StreamRng,
    depth: usize,
    ranges: &mut Vec<(f64, f64)>,
    nominal_used: &mut Vec<bool>,
) -> TreeNode {
    let free_nominals: Vec<usize> = (0..p.nominal).filter(|&i| !nominal_used[i]).collect();
    let candidates = p.numeric + free_nominals.len();
    let leaf =
        depth >= p.max_depth || candidates == 0 || (depth >= p.first_leaf_level && rng.bernoulli(p.leaf_fraction));
    if leaf {
        return TreeNode::Leaf(rng.below(p.classes));
    }
    let pick = rng.below(candidates);
    if pick < p.numeric {
        let (lo, hi) = ranges[pick];
        let threshold = rng.uniform_in(lo, hi);
        ranges[pick] = (lo, threshold);
        let below = grow_tree(p, rng, depth + 1, ranges, nominal_used);
        ranges[pick] = (threshold, hi);
        let above = grow_tree(p, rng, depth + 1, ranges, nominal_used);
        ranges[pick] = (lo, hi);
        TreeNode::Numeric {
            attr: pick,
            threshold,
            below: Box::new(below),
            above: Box::new(above),
        }
    } else {
        let attr = free_nominals[pick - p.numeric];
        nominal_used[attr] = true;
        let children = (0..p.categories)
            .map(|_| grow_tree(p, rng, depth + 1, ranges, nominal_used))
            .collect();
        nominal_used[attr] = false;
        TreeNode::Nominal { attr, children }
    }
}

/// Triangular base waves of the classic waveform problem.
const WAVES: [[f64; 21]; 3] = [
    [
        0., 1., 2., 3., 4., 5., 6., 5., 4., 3., 2., 1., 0., 0., 0., 0., 0., 0., 0., 0., 0.,
    ],
    [
        0., 0., 0., 0., 0., 1., 2., 3., 4., 5., 6., 5., 4., 3., 2., 1., 0., 0., 0., 0., 0.,
    ],
    [
        0., 0., 0., 0., 0., 0., 0., 0., 0., 1., 2., 3., 4., 5., 6., 5., 4., 3., 2., 1., 0.,
    ],
];
const WAVE_PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

#[derive(Debug, Clone)]
struct Centroid {
    centre: Vec<f64>,
    label: ClassId,
    std_dev: f64,
    velocity: Vec<f64>,
}

#[derive(Debug, Clone)]
enum Model {
    Sea,
    Hyperplane {
        weights: Vec<f64>,
        direction: Vec<f64>,
    },
    Rbf {
        centroids: Vec<Centroid>,
        cumulative_weights: Vec<f64>,
    },
    Tree(TreeNode),
    Waveform,
    Gaussian,
}

/// A seeded synthetic stream.
#[derive(Debug, Clone)]
pub struct Generator {
    config: GeneratorConfig,
    schema: StreamSchema,
    rng: StreamRng,
    model: Model,
    emitted: u64,
}

fn random_unit(rng: &mut StreamRng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.normal()).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

impl Generator {
    pub fn new(config: GeneratorConfig) -> Result<Self> {
        let mut rng = StreamRng::new(config.seed);
        let (schema, model) = match &config.kind {
            GeneratorKind::Sea(p) => {
                check_fraction("noise", p.noise)?;
                if p.thresholds.is_empty() {
                    return Err(Error::Config("SEA needs at least one threshold".into()));
                }
                if p.block_len == Some(0) {
                    return Err(Error::Config("SEA block length must be positive".into()));
                }
                (StreamSchema::numeric(3, 2)?, Model::Sea)
            }
            GeneratorKind::Hyperplane(p) => {
                check_positive("dimension", p.dim)?;
                check_fraction("noise", p.noise)?;
                check_fraction("reverse probability", p.reverse_probability)?;
                if p.drift_attributes > p.dim || p.magnitude < 0.0 {
                    return Err(Error::Config("invalid hyperplane drift parameters".into()));
                }
                let weights = (0..p.dim).map(|_| rng.uniform()).collect();
                let direction = (0..p.dim)
                    .map(|i| if i < p.drift_attributes { 1.0 } else { 0.0 })
                    .collect();
                (
                    StreamSchema::numeric(p.dim, 2)?,
                    Model::Hyperplane { weights, direction },
                )
            }
            GeneratorKind::RandomRbf(p) => {
                check_positive("dimension", p.dim)?;
                check_positive("centroids", p.centroids)?;
                check_fraction("noise", p.noise)?;
                if p.classes < 2 || p.drift_centroids > p.centroids || p.speed < 0.0 {
                    return Err(Error::Config("invalid random RBF parameters".into()));
                }
                let mut centroids = Vec::with_capacity(p.centroids);
                let mut cumulative_weights = Vec::with_capacity(p.centroids);
                let mut total = 0.0;
                for _ in 0..p.centroids {
                    let centre = (0..p.dim).map(|_| rng.uniform()).collect();
                    let label = rng.below(p.classes);
                    let std_dev = rng.uniform();
                    total += rng.uniform();
                    cumulative_weights.push(total);
                    centroids.push(Centroid {
                        centre,
                        label,
                        std_dev,
                        velocity: vec![0.0; p.dim],
                    });
                }
                for c in centroids.iter_mut().take(p.drift_centroids) {
                    c.velocity = random_unit(&mut rng, p.dim);
                }
                (
                    StreamSchema::numeric(p.dim, p.classes)?,
                    Model::Rbf {
                        centroids,
                        cumulative_weights,
                    },
                )
            }
            GeneratorKind::RandomTree(p) => {
                check_positive("categories", p.categories)?;
                check_fraction("leaf fraction", p.leaf_fraction)?;
                if p.classes < 2 || p.numeric + p.nominal == 0 {
                    return Err(Error::Config("invalid random tree parameters".into()));
                }
                let mut attributes: Vec<Attribute> =
                    (1..=p.numeric).map(|i| Attribute::numeric(format!("num{i}"))).collect();
                attributes.extend(
                    (1..=p.nominal)
                        .map(|i| Attribute::nominal(format!("nom{i}"), (1..=p.categories).map(|c| format!("v{c}")))),
                );
                let schema = StreamSchema::new(attributes, (0..p.classes).map(|c| c.to_string()))?;
                let tree = grow_tree(
                    p,
                    &mut rng,
                    0,
                    &mut vec![(0.0, 1.0); p.numeric],
                    &mut vec![false; p.nominal],
                );
                (schema, Model::Tree(tree))
            }
            GeneratorKind::Waveform => (StreamSchema::numeric(21, 3)?, Model::Waveform),
            GeneratorKind::Gaussian(p) => {
                check_positive("informative dimensions", p.informative)?;
                if !(p.noise_std >= 0.0 && p.separation.is_finite()) {
                    return Err(Error::Config("invalid gaussian parameters".into()));
                }
                (StreamSchema::numeric(p.informative + p.noise_dims, 2)?, Model::Gaussian)
            }
        };
        Ok(Generator {
            config,
            schema,
            rng,
            model,
            emitted: 0,
        })
    }

    pub fn config(&self) -> &GeneratorConfig {
        &self.config
    }

    pub fn schema(&self) -> &StreamSchema {
        &self.schema
    }

    /// Raw attributes and label of the next instance.
    fn draw(&mut self) -> (Vec<AttrValue>, ClassId) {
        let rng = &mut self.rng;
        let numeric = |v: Vec<f64>| v.into_iter().map(AttrValue::Numeric).collect::<Vec<_>>();
        match (&self.config.kind, &mut self.model) {
            (GeneratorKind::Sea(p), Model::Sea) => {
                let x: Vec<f64> = (0..3).map(|_| rng.uniform_in(0.0, 10.0)).collect();
                let block = match p.block_len {
                    Some(len) => (self.emitted / len) as usize % p.thresholds.len(),
                    None => 0,
                };
                let mut label = sea_concept(x[0], x[1], p.thresholds[block]);
                if rng.bernoulli(p.noise) {
                    label = 1 - label;
                }
                (numeric(x), label)
            }
            (GeneratorKind::Hyperplane(p), Model::Hyperplane { weights, direction }) => {
                let x: Vec<f64> = (0..p.dim).map(|_| rng.uniform()).collect();
                let dot: f64 = x.iter().zip(weights.iter()).map(|(a, w)| a * w).sum();
                let total: f64 = weights.iter().sum();
                let mut label = usize::from(dot > 0.5 * total);
                if rng.bernoulli(p.noise) {
                    label = 1 - label;
                }
                for i in 0..p.drift_attributes {
                    weights[i] += direction[i] * p.magnitude;
                    if rng.bernoulli(p.reverse_probability) {
                        direction[i] = -direction[i];
                    }
                }
                (numeric(x), label)
            }
            (
                GeneratorKind::RandomRbf(p),
                Model::Rbf {
                    centroids,
                    cumulative_weights,
                },
            ) => {
                let total = *cumulative_weights.last().unwrap();
                let target = rng.uniform() * total;
                let idx = cumulative_weights
                    .iter()
                    .position(|&w| target < w)
                    .unwrap_or(centroids.len() - 1);
                let c = &centroids[idx];
                let dir = random_unit(rng, p.dim);
                let magnitude = rng.normal() * c.std_dev;
                let x: Vec<f64> = c.centre.iter().zip(&dir).map(|(m, u)| m + u * magnitude).collect();
                let mut label = c.label;
                if rng.bernoulli(p.noise) {
                    // uniformly among the other classes
                    label = (label + 1 + rng.below(p.classes - 1)) % p.classes;
                }
                for c in centroids.iter_mut().take(p.drift_centroids) {
                    for (m, v) in c.centre.iter_mut().zip(c.velocity.iter_mut()) {
                        *m += *v * p.speed;
                        if *m > 1.0 || *m < 0.0 {
                            *m = m.clamp(0.0, 1.0);
                            *v = -*v;
                        }
                    }
                }
                (numeric(x), label)
            }
            (GeneratorKind::RandomTree(p), Model::Tree(tree)) => {
                let num: Vec<f64> = (0..p.numeric).map(|_| rng.uniform()).collect();
                let nom: Vec<usize> = (0..p.nominal).map(|_| rng.below(p.categories)).collect();
                let label = tree.classify(&num, &nom);
                let mut raw = numeric(num);
                raw.extend(nom.into_iter().map(AttrValue::Nominal));
                (raw, label)
            }
            (GeneratorKind::Waveform, Model::Waveform) => {
                let label = rng.below(3);
                let (a, b) = WAVE_PAIRS[label];
                let u = rng.uniform();
                let x: Vec<f64> = (0..21)
                    .map(|i| u * WAVES[a][i] + (1.0 - u) * WAVES[b][i] + rng.normal())
                    .collect();
                (numeric(x), label)
            }
            (GeneratorKind::Gaussian(p), Model::Gaussian) => {
                let label = rng.below(2);
                let offset = if label == 0 { -0.5 } else { 0.5 } * p.separation;
                let mut x: Vec<f64> = (0..p.informative).map(|_| offset + rng.normal()).collect();
                x.extend((0..p.noise_dims).map(|_| p.noise_std * rng.normal()));
                (numeric(x), label)
            }
            _ => unreachable!("generator model does not match its kind"),
        }
    }

    pub fn next_instance(&mut self) -> Instance {
        let (raw, label) = self.draw();
        let encoded = self
            .schema
            .encode(&raw)
            .expect("generators emit schema-conforming values");
        self.emitted += 1;
        Instance {
            raw_attributes: raw,
            encoded,
            label,
            arrival_index: self.emitted,
        }
    }
}

impl Iterator for Generator {
    type Item = Instance;

    fn next(&mut self) -> Option<Instance> {
        Some(self.next_instance())
    }
}

impl InstanceStream for Generator {
    fn schema(&self) -> &StreamSchema {
        &self.schema
    }

    fn next_instance(&mut self) -> Option<Result<Instance>> {
        Some(Ok(Generator::next_instance(self)))
    }
}
