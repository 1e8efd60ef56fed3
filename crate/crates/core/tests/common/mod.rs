//! Reference implementations used as test oracles. Plain nested `Vec`s and
//! textbook algorithms, deliberately sharing nothing with the library's
//! linear algebra.

#![allow(dead_code, clippy::needless_range_loop)]

pub type Mat = Vec<Vec<f64>>;

pub fn zeros(d: usize) -> Mat {
    vec![vec![0.0; d]; d]
}

pub fn identity(d: usize) -> Mat {
    let mut m = zeros(d);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

/// Gauss-Jordan inversion with partial pivoting.
pub fn gauss_jordan_inverse(a: &Mat) -> Option<Mat> {
    let d = a.len();
    let mut left = a.clone();
    let mut right = identity(d);
    for col in 0..d {
        let pivot = (col..d).max_by(|&i, &j| left[i][col].abs().total_cmp(&left[j][col].abs()))?;
        if left[pivot][col].abs() < 1e-300 {
            return None;
        }
        left.swap(col, pivot);
        right.swap(col, pivot);
        let p = left[col][col];
        for j in 0..d {
            left[col][j] /= p;
            right[col][j] /= p;
        }
        for i in 0..d {
            if i != col {
                let f = left[i][col];
                if f != 0.0 {
                    for j in 0..d {
                        left[i][j] -= f * left[col][j];
                        right[i][j] -= f * right[col][j];
                    }
                }
            }
        }
    }
    Some(right)
}

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix. Returns the
/// eigenvalues and the eigenvectors as columns.
pub fn jacobi_eigen(a: &Mat) -> (Vec<f64>, Mat) {
    let d = a.len();
    let mut m = a.clone();
    let mut v = identity(d);
    for _sweep in 0..100 {
        let off: f64 = (0..d)
            .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        let scale: f64 = m.iter().flatten().map(|x| x * x).sum();
        if off <= 1e-30 * scale.max(1e-300) {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                if m[p][q] == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..d {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..d).map(|i| m[i][i]).collect(), v)
}

/// Projects a symmetric matrix onto the PSD cone by zeroing negative
/// eigenvalues.
pub fn psd_projection(a: &Mat) -> Mat {
    let d = a.len();
    let (vals, vecs) = jacobi_eigen(a);
    let mut out = zeros(d);
    for (k, &lambda) in vals.iter().enumerate() {
        if lambda <= 0.0 {
            continue;
        }
        for i in 0..d {
            for j in 0..d {
                out[i][j] += lambda * vecs[i][k] * vecs[j][k];
            }
        }
    }
    out
}

pub fn min_eigenvalue(a: &Mat) -> f64 {
    jacobi_eigen(a).0.into_iter().fold(f64::INFINITY, f64::min)
}

/// Batch metric from an explicit pair list: normalized similar and
/// dissimilar covariances, a shared ridge `scale · (tr Σ₁ + tr Σ₀) / (2d)`
/// (or an absolute one), inverse difference, PSD projection.
pub fn batch_kissme(points: &[Vec<f64>], pairs: &[(usize, usize, bool)], ridge: Ridge) -> Mat {
    let d = points[0].len();
    let mut sim = zeros(d);
    let mut dis = zeros(d);
    let (mut ns, mut nd) = (0.0, 0.0);
    for &(a, b, same) in pairs {
        let diff: Vec<f64> = (0..d).map(|i| points[a][i] - points[b][i]).collect();
        let (target, n) = if same { (&mut sim, &mut ns) } else { (&mut dis, &mut nd) };
        *n += 1.0;
        for i in 0..d {
            for j in 0..d {
                target[i][j] += diff[i] * diff[j];
            }
        }
    }
    for i in 0..d {
        for j in 0..d {
            sim[i][j] /= ns;
            dis[i][j] /= nd;
        }
    }
    let eps = match ridge {
        Ridge::Relative(s) => s * ((0..d).map(|i| sim[i][i] + dis[i][i]).sum::<f64>()) / (2.0 * d as f64),
        Ridge::Absolute(v) => v,
    };
    for i in 0..d {
        sim[i][i] += eps;
        dis[i][i] += eps;
    }
    let inv_s = gauss_jordan_inverse(&sim).expect("similar covariance invertible");
    let inv_d = gauss_jordan_inverse(&dis).expect("dissimilar covariance invertible");
    let mut diff = zeros(d);
    for i in 0..d {
        for j in 0..d {
            diff[i][j] = inv_s[i][j] - inv_d[i][j];
        }
    }
    let sym: Mat = (0..d)
        .map(|i| (0..d).map(|j| 0.5 * (diff[i][j] + diff[j][i])).collect())
        .collect();
    psd_projection(&sym)
}

#[derive(Debug, Clone, Copy)]
pub enum Ridge {
    Relative(f64),
    Absolute(f64),
}

/// `sqrt((x − y)ᵀ M (x − y))` by explicit double sum.
pub fn mahalanobis(m: &Mat, x: &[f64], y: &[f64]) -> f64 {
    let d = x.len();
    let mut q = 0.0;
    for i in 0..d {
        for j in 0..d {
            q += (x[i] - y[i]) * m[i][j] * (x[j] - y[j]);
        }
    }
    q.max(0.0).sqrt()
}

/// Small deterministic generator (SplitMix64) for test data, independent
/// of the library's stream RNG.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform().max(f64::MIN_POSITIVE);
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }
}

/// Two-class Gaussian sample: class 1 is shifted along every axis by
/// `shift`, axis `i` has standard deviation `1 + i/2`.
pub fn gaussian_dataset(n: usize, d: usize, shift: f64, seed: u64) -> Vec<(Vec<f64>, usize)> {
    let mut rng = SplitMix(seed);
    (0..n)
        .map(|_| {
            let label = (rng.next_u64() & 1) as usize;
            let x = (0..d)
                .map(|i| rng.normal() * (1.0 + i as f64 / 2.0) + shift * label as f64)
                .collect();
            (x, label)
        })
        .collect()
}

pub fn max_abs_diff(a: &Mat, b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max)
}

pub const GOLDEN_SEED: u64 = 42;
pub const GOLDEN_GENERATORS: [&str; 7] = [
    "sea",
    "sea-drift",
    "hyperplane",
    "rbf",
    "random-tree",
    "waveform",
    "gaussian",
];

pub fn golden_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

/// First 100 instances of a generator as `index,label,features...` lines,
/// features in shortest round-trip notation.
pub fn render_generator(kind: &str, seed: u64) -> String {
    use kissme_stream::streams::{Generator, GeneratorConfig, GeneratorKind};
    use std::fmt::Write as _;
    let mut generator = Generator::new(GeneratorConfig::new(GeneratorKind::from_name(kind).unwrap(), seed)).unwrap();
    let mut out = String::new();
    for _ in 0..100 {
        let inst = generator.next_instance();
        let _ = write!(out, "{},{}", inst.arrival_index, inst.label);
        for v in inst.encoded.as_slice() {
            let _ = write!(out, ",{v:?}");
        }
        out.push('\n');
    }
    out
}

/// Compares `actual` with the golden file `name`, or rewrites the file
/// when `UPDATE_GOLDEN` is set.
pub fn check_golden(name: &str, actual: &str) -> Result<(), String> {
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).map_err(|e| format!("{}: {e}", path.display()))?;
        return Ok(());
    }
    let expected = std::fs::read_to_string(&path)
        .map_err(|e| format!("{}: {e} (run with UPDATE_GOLDEN=1 to create)", path.display()))?;
    if expected == actual {
        Ok(())
    } else {
        let line = expected
            .lines()
            .zip(actual.lines())
            .position(|(a, b)| a != b)
            .map_or(expected.lines().count().min(actual.lines().count()) + 1, |i| i + 1);
        Err(format!("{name} differs from the golden file at line {line}"))
    }
}
