//! Pinned outputs: generator prefixes and a paired SEA run.

mod common;

use kissme_stream::experiment::{simulate, Baseline, ExperimentConfig};

#[test]
fn generator_prefixes_match_golden_files() {
    for kind in common::GOLDEN_GENERATORS {
        let actual = common::render_generator(kind, common::GOLDEN_SEED);
        assert_eq!(actual.lines().count(), 100);
        common::check_golden(&format!("{kind}.csv"), &actual).unwrap();
    }
}

/// Sign of Q every 100 instances: `-` favors the learned metric, `+` the
/// identity baseline, `0` a tie, `.` undefined.
fn sea_profile() -> String {
    let mut config = ExperimentConfig::default();
    config.set("stream", "sea").unwrap();
    config.set("instances", "20000").unwrap();
    config.set("seed", "7").unwrap();
    config.baseline = Baseline::Identity;
    let report = simulate(&config).unwrap();
    let signs: String = report
        .sampled(100)
        .map(|r| match r.q {
            None => '.',
            Some(q) if q < 0.0 => '-',
            Some(q) if q > 0.0 => '+',
            Some(_) => '0',
        })
        .collect();
    let last = report.last();
    format!(
        "final_acc_a={:?}\nfinal_acc_b={:?}\nsigns={signs}\n",
        last.acc_a,
        last.acc_b.unwrap()
    )
}

#[test]
fn sea_run_matches_archived_profile() {
    let first = sea_profile();
    assert_eq!(first, sea_profile(), "re-run differs");
    common::check_golden("sea_q_profile.txt", &first).unwrap();
}
