#![allow(dead_code)]

use num_complex::Complex64;
use qwalk::multiwalk::ParticleInit;
use qwalk::{make_product_state, CoinLabel, MultiState, Spinor, Statistics};

pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

pub fn left() -> Spinor {
    CoinLabel::L.spinor()
}

pub fn right() -> Spinor {
    CoinLabel::R.spinor()
}

/// Every walker at site 0 in `|L⟩`.
pub fn all_left(m: usize, statistics: Statistics) -> MultiState {
    let init: Vec<ParticleInit> = vec![(0, left()); m];
    make_product_state(m, &[(ONE, init)], statistics).unwrap()
}

/// Single product term with walker `i` at site 0 in the `i`-th label of `pattern`.
pub fn product_of(pattern: &str, statistics: Statistics) -> MultiState {
    let init: Vec<ParticleInit> = pattern
        .chars()
        .map(|c| (0, if c == 'L' { left() } else { right() }))
        .collect();
    make_product_state(init.len(), &[(ONE, init)], statistics).unwrap()
}

/// All strictly decreasing tuples of length `m` drawn from `[-w, w]`.
pub fn decreasing_tuples(m: usize, w: i64) -> Vec<Vec<i64>> {
    fn rec(m: usize, upper: i64, lo: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if prefix.len() == m {
            out.push(prefix.clone());
            return;
        }
        for s in (lo..=upper).rev() {
            prefix.push(s);
            rec(m, s - 1, lo, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, w, -w, &mut Vec::new(), &mut out);
    out
}

/// Every tuple of length `m` over `[-w, w]`.
pub fn all_tuples(m: usize, w: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (-w..=w).map(move |s| {
                    let mut next = prefix.clone();
                    next.push(s);
                    next
                })
            })
            .collect();
    }
    out
}
