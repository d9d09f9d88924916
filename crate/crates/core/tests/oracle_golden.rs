//! The committed golden file is produced by the dense engine alone
//! (`qwalk golden`). These tests pin the oracle to it and check the fast
//! engine against every record.

use qwalk::oracle::{golden_cases, golden_text, GoldenRecord, GOLDEN_HEADER};
use qwalk::CoinOperator;

const GOLDEN: &str = include_str!("golden/oracle_golden.txt");

fn records() -> Vec<GoldenRecord> {
    GOLDEN
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| GoldenRecord::parse_line(l).unwrap())
        .collect()
}

#[test]
fn regenerated_file_is_byte_identical() {
    assert!(GOLDEN.starts_with(GOLDEN_HEADER));
    assert_eq!(golden_text(&CoinOperator::hadamard()).unwrap(), GOLDEN);
}

#[test]
fn fast_engine_reproduces_golden_values() {
    let h = CoinOperator::hadamard();
    let cases = golden_cases().unwrap();
    let recs = records();
    assert!(recs.len() > 100);
    for record in &recs {
        let (_, initial, _) = cases.iter().find(|(label, _, _)| *label == record.label).unwrap();
        assert_eq!(initial.statistics(), record.statistics);
        let state = initial.evolve_all(&h, record.time);
        let p = state.joint_probability(&record.sites).unwrap();
        assert!((p - record.value).abs() < 1e-12, "{}", record.to_line());
    }
}

#[test]
fn hand_derived_values_are_in_the_file() {
    let find = |label: &str, t: usize, sites: &[i64]| {
        records()
            .into_iter()
            .find(|r| r.label == label && r.time == t && r.sites == sites)
            .unwrap()
            .value
    };
    assert_eq!(find("walker_L", 1, &[-1]), 0.5);
    assert_eq!(find("walker_L", 2, &[0]), 0.5);
    assert_eq!(find("separable_LL", 1, &[1, -1]), 0.25);
    assert_eq!(find("psi+", 1, &[1, 1]), 0.5);
    assert_eq!(find("psi-", 1, &[1, -1]), 0.5);
    assert_eq!(find("fermions_LR", 1, &[1, -1]), 1.0);
    // Meeting total of the separable pair at t = 2.
    let total: f64 = [-2, 0, 2].iter().map(|&m| find("separable_LL", 2, &[m, m])).sum();
    assert!((total - 0.375).abs() < 1e-15);
}
