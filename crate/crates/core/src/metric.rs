//! Mahalanobis metric: distance evaluation, online accumulation of pair
//! constraints and the closed-form KISSME metric with spectral clipping.
//!
//! The metric is learned from two Gaussian models of pairwise differences,
//! one for same-class pairs and one for different-class pairs. With `Σ₁` and
//! `Σ₀` the (count-normalized) covariances of the two difference populations,
//! the metric is the projection of `Σ₁⁻¹ − Σ₀⁻¹` onto the PSD cone.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Quadratic forms in `(-QUAD_FORM_SLACK, 0)` are treated as rounding noise.
const QUAD_FORM_SLACK: f64 = 1e-12;

/// Real-valued encoding of an instance.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Self {
        FeatureVector(values)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl From<Vec<f64>> for FeatureVector {
    fn from(values: Vec<f64>) -> Self {
        FeatureVector(values)
    }
}

impl std::ops::Index<usize> for FeatureVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

fn check_pair(dim: usize, x: &FeatureVector, y: &FeatureVector) -> Result<()> {
    for v in [x, y] {
        if v.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.dim(),
            });
        }
    }
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::NonFinite("feature vector"));
    }
    Ok(())
}

/// Symmetric positive semi-definite `d × d` matrix parameterizing a
/// Mahalanobis distance.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricMatrix {
    entries: DMatrix<f64>,
}

impl MetricMatrix {
    /// The Euclidean metric.
    pub fn identity(dim: usize) -> Self {
        MetricMatrix {
            entries: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        MetricMatrix {
            entries: DMatrix::zeros(dim, dim),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::from_matrix(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    /// Wraps a user-supplied matrix. The matrix must be square, exactly
    /// symmetric and finite; positive semi-definiteness is not checked here.
    pub fn from_matrix(entries: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows != cols {
            return Err(Error::DimensionMismatch {
                expected: rows,
                found: cols,
            });
        }
        if rows == 0 {
            return Err(Error::Config("metric dimension must be positive".into()));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("metric matrix"));
        }
        for i in 0..rows {
            for j in (i + 1)..rows {
                if entries[(i, j)] != entries[(j, i)] {
                    return Err(Error::Numeric(format!("metric matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(MetricMatrix { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[(row, col)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.entries.clone())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `(x − y)ᵀ M (x − y)` without dimension or finiteness checks.
    ///
    /// Callers must guarantee `x.len() == y.len() == self.dim()`.
    pub(crate) fn quad_form(&self, x: &[f64], y: &[f64], diff: &mut Vec<f64>) -> f64 {
        diff.clear();
        diff.extend(x.iter().zip(y).map(|(a, b)| a - b));
        let d = diff.len();
        let m = self.entries.as_slice();
        let mut total = 0.0;
        // column-major storage: column j is contiguous
        for (j, col) in m.chunks_exact(d).enumerate() {
            let dj = diff[j];
            if dj == 0.0 {
                continue;
            }
            let mut acc = 0.0;
            for (mij, di) in col.iter().zip(diff.iter()) {
                acc += mij * di;
            }
            total += acc * dj;
        }
        total
    }

    /// Mahalanobis distance `sqrt((x − y)ᵀ M (x − y))`.
    pub fn distance(&self, x: &FeatureVector, y: &FeatureVector) -> Result<f64> {
        check_pair(self.dim(), x, y)?;
        let q = self.quad_form(x.as_slice(), y.as_slice(), &mut Vec::with_capacity(x.dim()));
        if !q.is_finite() {
            return Err(Error::NonFinite("quadratic form"));
        }
        if q < -QUAD_FORM_SLACK {
            return Err(Error::Numeric(format!(
                "negative quadratic form {q:e}: metric is not positive semi-definite"
            )));
        }
        Ok(q.max(0.0).sqrt())
    }
}

/// Mahalanobis distance between `x` and `y` under `metric`.
pub fn mahalanobis_distance(metric: &MetricMatrix, x: &FeatureVector, y: &FeatureVector) -> Result<f64> {
    metric.distance(x, y)
}

/// Ridge added to both normalized covariances before inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ridge {
    /// `scale · (tr Σ₁ + tr Σ₀) / (2d)`, shared by both covariances.
    Relative(f64),
    /// A fixed value.
    Absolute(f64),
}

impl Default for Ridge {
    fn default() -> Self {
        Ridge::Relative(1e-6)
    }
}

impl Ridge {
    fn value(self, similar: &DMatrix<f64>, dissimilar: &DMatrix<f64>) -> f64 {
        match self {
            Ridge::Absolute(v) => v,
            Ridge::Relative(scale) => {
                let d = similar.nrows() as f64;
                scale * (similar.trace() + dissimilar.trace()) / (2.0 * d)
            }
        }
    }

    pub(crate) fn validate(self) -> Result<()> {
        let v = match self {
            Ridge::Absolute(v) | Ridge::Relative(v) => v,
        };
        if !v.is_finite() || v < 0.0 {
            return Err(Error::Config(format!("ridge must be finite and >= 0, got {v}")));
        }
        Ok(())
    }
}

/// Running outer-product sums of similar and dissimilar pair differences.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintAccumulator {
    similar_sum: DMatrix<f64>,
    dissimilar_sum: DMatrix<f64>,
    similar_count: u64,
    dissimilar_count: u64,
}

impl ConstraintAccumulator {
    pub fn new(dim: usize) -> Self {
        ConstraintAccumulator {
            similar_sum: DMatrix::zeros(dim, dim),
            dissimilar_sum: DMatrix::zeros(dim, dim),
            similar_count: 0,
            dissimilar_count: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.similar_sum.nrows()
    }

    pub fn similar_sum(&self) -> &DMatrix<f64> {
        &self.similar_sum
    }

    pub fn dissimilar_sum(&self) -> &DMatrix<f64> {
        &self.dissimilar_sum
    }

    pub fn similar_count(&self) -> u64 {
        self.similar_count
    }

    pub fn dissimilar_count(&self) -> u64 {
        self.dissimilar_count
    }

    pub fn clear(&mut self) {
        self.similar_sum.fill(0.0);
        self.dissimilar_sum.fill(0.0);
        self.similar_count = 0;
        self.dissimilar_count = 0;
    }

    /// Adds `(x − y)(x − y)ᵀ` to the similar or dissimilar sum.
    pub fn accumulate_pair(&mut self, x: &FeatureVector, y: &FeatureVector, same_class: bool) -> Result<()> {
        check_pair(self.dim(), x, y)?;
        self.accumulate_unchecked(x.as_slice(), y.as_slice(), same_class);
        Ok(())
    }

    pub(crate) fn accumulate_unchecked(&mut self, x: &[f64], y: &[f64], same_class: bool) {
        let (sum, count) = if same_class {
            (&mut self.similar_sum, &mut self.similar_count)
        } else {
            (&mut self.dissimilar_sum, &mut self.dissimilar_count)
        };
        let d = x.len();
        let mut diff = [0.0f64; 64];
        let mut heap;
        let diff: &mut [f64] = if d <= diff.len() {
            &mut diff[..d]
        } else {
            heap = vec![0.0; d];
            &mut heap
        };
        for (o, (a, b)) in diff.iter_mut().zip(x.iter().zip(y)) {
            *o = a - b;
        }
        // diff[i] * diff[j] == diff[j] * diff[i] exactly, so the sum stays symmetric
        for (j, col) in sum.as_mut_slice().chunks_exact_mut(d).enumerate() {
            let dj = diff[j];
            if dj == 0.0 {
                continue;
            }
            for (s, di) in col.iter_mut().zip(diff.iter()) {
                *s += di * dj;
            }
        }
        *count += 1;
    }

    fn check_counts(&self) -> Result<()> {
        if self.similar_count == 0 || self.dissimilar_count == 0 {
            return Err(Error::InsufficientConstraints {
                similar: self.similar_count,
                dissimilar: self.dissimilar_count,
            });
        }
        Ok(())
    }

    /// Count-normalized covariances `(Σ₁, Σ₀)` of the similar and dissimilar
    /// difference populations, without ridge.
    pub fn covariances(&self) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        self.check_counts()?;
        Ok((
            &self.similar_sum / self.similar_count as f64,
            &self.dissimilar_sum / self.dissimilar_count as f64,
        ))
    }

    /// KISSME metric: `clip₊((Σ₁ + εI)⁻¹ − (Σ₀ + εI)⁻¹)`.
    pub fn compute_metric(&self, ridge: Ridge) -> Result<MetricMatrix> {
        ridge.validate()?;
        let (mut similar, mut dissimilar) = self.covariances()?;
        let eps = ridge.value(&similar, &dissimilar);
        for i in 0..self.dim() {
            similar[(i, i)] += eps;
            dissimilar[(i, i)] += eps;
        }
        let mhat = spd_inverse(similar, "similar")? - spd_inverse(dissimilar, "dissimilar")?;
        let entries = clip_spectrum(mhat);
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite metric after spectral clipping".into()));
        }
        Ok(MetricMatrix { entries })
    }
}

fn spd_inverse(m: DMatrix<f64>, which: &str) -> Result<DMatrix<f64>> {
    let inv = m
        .cholesky()
        .ok_or_else(|| {
            Error::Numeric(format!(
                "{which} covariance is not positive definite (ridge too small for input scale)"
            ))
        })?
        .inverse();
    if inv.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric(format!(
            "{which} covariance inverse is not finite (ridge too small for input scale)"
        )));
    }
    Ok(inv)
}

/// Projects a square matrix onto the PSD cone: symmetrize, zero the
/// negative eigenvalues, rebuild, and mirror the result so it is exactly
/// symmetric.
pub fn clip_spectrum(m: DMatrix<f64>) -> DMatrix<f64> {
    let sym = (&m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let clipped = eig.eigenvalues.map(|l| l.max(0.0));
    let v = &eig.eigenvectors;
    let mut out = v * DMatrix::from_diagonal(&clipped) * v.transpose();
    let d = out.nrows();
    for j in 0..d {
        for i in (j + 1)..d {
            let avg = 0.5 * (out[(i, j)] + out[(j, i)]);
            out[(i, j)] = avg;
            out[(j, i)] = avg;
        }
    }
    out
}

/// Log-likelihood ratio `log N(x − y; 0, Σ₀) − log N(x − y; 0, Σ₁)`.
///
/// Large values favor the dissimilar hypothesis. Diagnostic only; the
/// classifier never calls it.
pub fn log_likelihood_ratio(
    sigma_similar: &DMatrix<f64>,
    sigma_dissimilar: &DMatrix<f64>,
    x: &FeatureVector,
    y: &FeatureVector,
) -> Result<f64> {
    let d = sigma_similar.nrows();
    if sigma_similar.shape() != (d, d) || sigma_dissimilar.shape() != (d, d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: sigma_dissimilar.nrows(),
        });
    }
    check_pair(d, x, y)?;
    let z = DVector::from_iterator(d, x.as_slice().iter().zip(y.as_slice()).map(|(a, b)| a - b));

    let log_density_terms = |sigma: &DMatrix<f64>| -> Result<(f64, f64)> {
        let chol = sigma
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Numeric("singular covariance".into()))?;
        let log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>();
        let quad = z.dot(&chol.solve(&z));
        Ok((log_det, quad))
    };
    let (log_det1, quad1) = log_density_terms(sigma_similar)?;
    let (log_det0, quad0) = log_density_terms(sigma_dissimilar)?;
    let delta = 0.5 * (log_det1 - log_det0) + 0.5 * (quad1 - quad0);
    if !delta.is_finite() {
        return Err(Error::Numeric("non-finite log-likelihood ratio".into()));
    }
    Ok(delta)
}
