//! Metric learning and neighbor search checked against independent
//! reference implementations.

#![allow(clippy::needless_range_loop)]

mod common;

use common::{Mat, SplitMix};
use kissme_stream::metric::{clip_spectrum, ConstraintAccumulator, FeatureVector, MetricMatrix, Ridge};
use kissme_stream::{Instance, InstanceBase};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn to_dmatrix(m: &Mat) -> DMatrix<f64> {
    let d = m.len();
    DMatrix::from_fn(d, d, |i, j| m[i][j])
}

fn to_mat(m: &DMatrix<f64>) -> Mat {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn random_symmetric(rng: &mut SplitMix, d: usize) -> Mat {
    let mut m = common::zeros(d);
    for i in 0..d {
        for j in i..d {
            let v = rng.normal();
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    m
}

#[test]
fn oracle_inverse_and_eigen_are_consistent() {
    let mut rng = SplitMix(7);
    for d in [1, 2, 5, 9] {
        let a = random_symmetric(&mut rng, d);
        let inv = common::gauss_jordan_inverse(&a).unwrap();
        for i in 0..d {
            for j in 0..d {
                let v: f64 = (0..d).map(|k| a[i][k] * inv[k][j]).sum();
                assert!((v - f64::from(i == j)).abs() < 1e-9);
            }
        }
        let (vals, vecs) = common::jacobi_eigen(&a);
        for i in 0..d {
            for j in 0..d {
                let v: f64 = (0..d).map(|k| vals[k] * vecs[i][k] * vecs[j][k]).sum();
                assert!((v - a[i][j]).abs() < 1e-10, "d={d}");
            }
        }
    }
}

#[test]
fn spectral_clipping_matches_reference_projection() {
    let mut rng = SplitMix(11);
    for d in [1, 3, 6, 12] {
        for _ in 0..5 {
            let a = random_symmetric(&mut rng, d);
            let ours = clip_spectrum(to_dmatrix(&a));
            let reference = common::psd_projection(&a);
            assert!(common::max_abs_diff(&to_mat(&ours), &reference) < 1e-10);
            assert!(common::min_eigenvalue(&to_mat(&ours)) > -1e-10);
        }
    }
}

#[test]
fn streaming_accumulation_matches_batch_metric() {
    for (seed, d) in [(1, 2), (2, 5), (3, 8)] {
        let data = common::gaussian_dataset(120, d, 1.0, seed);
        let points: Vec<Vec<f64>> = data.iter().map(|(x, _)| x.clone()).collect();
        let mut pairs = Vec::new();
        let mut acc = ConstraintAccumulator::new(d);
        for i in 0..data.len() {
            for j in 0..i {
                let same = data[i].1 == data[j].1;
                pairs.push((i, j, same));
                acc.accumulate_pair(
                    &FeatureVector::new(points[i].clone()),
                    &FeatureVector::new(points[j].clone()),
                    same,
                )
                .unwrap();
            }
        }
        for (ours, reference) in [
            (Ridge::Relative(1e-6), common::Ridge::Relative(1e-6)),
            (Ridge::Absolute(0.0), common::Ridge::Absolute(0.0)),
            (Ridge::Absolute(0.5), common::Ridge::Absolute(0.5)),
        ] {
            let m = acc.compute_metric(ours).unwrap();
            let expected = common::batch_kissme(&points, &pairs, reference);
            let err = common::max_abs_diff(&to_mat(m.as_matrix()), &expected);
            assert!(err < 1e-8, "d={d} ridge={ours:?}: {err}");
        }
    }
}

#[test]
fn mahalanobis_matches_explicit_double_sum() {
    let mut rng = SplitMix(5);
    let d = 6;
    let l: Mat = (0..d).map(|_| (0..d).map(|_| rng.normal()).collect()).collect();
    let m: Mat = (0..d)
        .map(|i| (0..d).map(|j| (0..d).map(|k| l[i][k] * l[j][k]).sum()).collect())
        .collect();
    let metric = MetricMatrix::from_matrix(to_dmatrix(&m)).unwrap();
    for _ in 0..50 {
        let x: Vec<f64> = (0..d).map(|_| rng.normal()).collect();
        let y: Vec<f64> = (0..d).map(|_| rng.normal()).collect();
        let ours = metric
            .distance(&FeatureVector::new(x.clone()), &FeatureVector::new(y.clone()))
            .unwrap();
        let reference = common::mahalanobis(&m, &x, &y);
        assert!((ours - reference).abs() < 1e-9 * reference.max(1.0));
    }
}

fn psd_from(entries: &[f64], d: usize) -> Mat {
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| (0..d).map(|k| entries[i * d + k] * entries[j * d + k]).sum())
                .collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn knn_agrees_with_brute_force_scan(
        d in 1usize..5,
        n in 1usize..60,
        k in 1usize..15,
        seed in any::<u64>(),
        grid in any::<bool>(),
    ) {
        let mut rng = SplitMix(seed);
        let factor: Vec<f64> = (0..d * d).map(|_| rng.normal()).collect();
        let m = psd_from(&factor, d);
        let metric = MetricMatrix::from_matrix(to_dmatrix(&m)).unwrap();
        let mut base = InstanceBase::new(n);
        let mut points = Vec::new();
        for i in 0..n {
            // a coarse grid produces many exactly tied distances
            let x: Vec<f64> = (0..d)
                .map(|_| if grid { (rng.next_u64() % 3) as f64 } else { rng.normal() })
                .collect();
            points.push(x.clone());
            base.insert(Instance::from_encoded(x, i % 2, i as u64 + 1)).unwrap();
        }
        let query: Vec<f64> = (0..d).map(|_| if grid { 1.0 } else { rng.normal() }).collect();
        let hits = base.knn(&FeatureVector::new(query.clone()), k, &metric).unwrap();

        let dist: Vec<f64> = points.iter().map(|p| common::mahalanobis(&m, &query, p)).collect();
        prop_assert_eq!(hits.len(), k.min(n));
        for w in hits.windows(2) {
            prop_assert!(w[0].distance <= w[1].distance);
            if w[0].distance == w[1].distance {
                prop_assert!(w[0].instance.arrival_index > w[1].instance.arrival_index);
            }
        }
        let returned: Vec<u64> = hits.iter().map(|h| h.instance.arrival_index).collect();
        let worst = hits.last().unwrap().distance;
        for (i, &dd) in dist.iter().enumerate() {
            let idx = i as u64 + 1;
            if !returned.contains(&idx) {
                prop_assert!(dd >= worst - 1e-9, "left out {} at {} < {}", idx, dd, worst);
            }
        }
        for h in &hits {
            let reference = dist[h.instance.arrival_index as usize - 1];
            prop_assert!((h.distance - reference).abs() < 1e-9 * reference.max(1.0));
        }
    }
}
