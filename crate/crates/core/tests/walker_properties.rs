mod common;

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use proptest::prelude::*;
use qwalk::multiwalk::make_product_state;
use qwalk::oracle::dense_init;
use qwalk::{init_walker, CoinOperator, Statistics, WalkerState};

/// Random unitary `e^{iφ} [[a, b], [-e^{iχ} b̄, e^{iχ} ā]]` with |a|² + |b|² = 1.
fn unitary_coin() -> impl Strategy<Value = CoinOperator> {
    (0.0..std::f64::consts::TAU, 0.0..std::f64::consts::TAU, 0.0..std::f64::consts::TAU, 0.0..1.0f64, 0.0..std::f64::consts::TAU)
        .prop_map(|(phase, chi, arg_b, r, arg_a)| {
            let a = Complex64::from_polar(r.sqrt(), arg_a);
            let b = Complex64::from_polar((1.0 - r).sqrt(), arg_b);
            let g = Complex64::from_polar(1.0, phase);
            let e = Complex64::from_polar(1.0, chi);
            CoinOperator::from_entries([[g * a, g * b], [-g * e * b.conj(), g * e * a.conj()]]).unwrap()
        })
}

fn spinor() -> impl Strategy<Value = [Complex64; 2]> {
    (0.0..1.0f64, 0.0..std::f64::consts::TAU, 0.0..std::f64::consts::TAU).prop_map(|(r, p, q)| {
        [Complex64::from_polar(r.sqrt(), p), Complex64::from_polar((1.0 - r).sqrt(), q)]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn norm_is_conserved(coin in unitary_coin(), s in spinor(), origin in -5i64..5) {
        let mut w = init_walker(origin, s).unwrap();
        for _ in 0..1000 {
            w = w.step(&coin);
        }
        prop_assert!((w.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn parity_forbidden_sites_are_exactly_zero(coin in unitary_coin(), s in spinor(), origin in -5i64..5, t in 0usize..40) {
        let w = init_walker(origin, s).unwrap().evolve(&coin, t);
        let (lo, hi) = w.window();
        for x in lo..=hi {
            if (x - origin + t as i64) % 2 != 0 {
                prop_assert_eq!(w.site_probability(x), 0.0);
            }
        }
    }

    #[test]
    fn evolution_is_linear(coin in unitary_coin(), s1 in spinor(), s2 in spinor(),
                           a in (-1.0..1.0f64, -1.0..1.0f64), b in (-1.0..1.0f64, -1.0..1.0f64), t in 0usize..30) {
        let (a, b) = (Complex64::new(a.0, a.1), Complex64::new(b.0, b.1));
        let w1 = init_walker(0, s1).unwrap();
        let w2 = init_walker(0, s2).unwrap();
        let combined = WalkerState::linear_combination(a, &w1, b, &w2).unwrap().evolve(&coin, t);
        let separate = WalkerState::linear_combination(a, &w1.evolve(&coin, t), b, &w2.evolve(&coin, t)).unwrap();
        for (x, y) in combined.amplitudes().iter().zip(separate.amplitudes()) {
            prop_assert!((x[0] - y[0]).norm() < 1e-12 && (x[1] - y[1]).norm() < 1e-12);
        }
    }

    #[test]
    fn matches_dense_oracle(coin in unitary_coin(), s in spinor(), t in 0usize..=10) {
        let state = make_product_state(1, &[(common::ONE, vec![(0, s)])], Statistics::Distinguishable).unwrap();
        let dense = dense_init(&state, t).unwrap().evolve(&coin, t).unwrap();
        let fast = init_walker(0, s).unwrap().evolve(&coin, t);
        for x in -(t as i64)..=(t as i64) {
            let p = dense.joint_probability(&[x]).unwrap();
            prop_assert!((fast.site_probability(x) - p).abs() < 1e-12);
        }
    }
}

#[test]
fn symmetric_spinor_gives_symmetric_distribution() {
    let s = [Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(0.0, FRAC_1_SQRT_2)];
    let h = CoinOperator::hadamard();
    let mut w = init_walker(0, s).unwrap();
    for t in 0..=100 {
        for (x, p) in w.site_distribution() {
            assert!((p - w.site_probability(-x)).abs() < 1e-10, "t = {t}, x = {x}");
        }
        w = w.step(&h);
    }
}

#[test]
fn distribution_sums_to_norm() {
    let w = init_walker(2, common::right()).unwrap().evolve(&CoinOperator::hadamard(), 57);
    let total: f64 = w.site_distribution().values().sum();
    assert!((total - 1.0).abs() < 1e-10);
}
