//! Single-particle coined walk on the integer line.
//!
//! A [`WalkerState`] stores the dense light-cone window `[x0 - t, x0 + t]`,
//! including the parity-forbidden sites, which stay exactly zero.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::coin::{CoinOperator, Spinor};
use crate::error::{Result, WalkError};

/// Tolerance on spinor normalization at initialization.
pub const NORM_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq)]
pub struct WalkerState {
    origin: i64,
    time: usize,
    amplitudes: Vec<Spinor>,
}

impl WalkerState {
    /// A walker localized at `origin` with a normalized coin spinor.
    pub fn new(origin: i64, spinor: Spinor) -> Result<Self> {
        let norm = spinor[0].norm_sqr() + spinor[1].norm_sqr();
        if !((norm - 1.0).abs() <= NORM_TOL) {
            return Err(WalkError::Config(format!(
                "spinor not normalized: |a_L|^2 + |a_R|^2 = {norm}"
            )));
        }
        Ok(WalkerState {
            origin,
            time: 0,
            amplitudes: vec![spinor],
        })
    }

    /// Builds a state from a raw window of length `2 t + 1`. No normalization
    /// is required, which makes this usable for linear combinations.
    pub fn from_window(origin: i64, time: usize, amplitudes: Vec<Spinor>) -> Result<Self> {
        if amplitudes.len() != 2 * time + 1 {
            return Err(WalkError::Config(format!(
                "window length {} does not match t = {time}",
                amplitudes.len()
            )));
        }
        Ok(WalkerState {
            origin,
            time,
            amplitudes,
        })
    }

    pub fn origin(&self) -> i64 {
        self.origin
    }

    pub fn time(&self) -> usize {
        self.time
    }

    /// Inclusive site bounds of the stored window.
    pub fn window(&self) -> (i64, i64) {
        let t = self.time as i64;
        (self.origin - t, self.origin + t)
    }

    pub fn amplitudes(&self) -> &[Spinor] {
        &self.amplitudes
    }

    /// Spinor at `site`; zero outside the window.
    #[inline]
    pub fn spinor(&self, site: i64) -> Spinor {
        let (lo, hi) = self.window();
        if site < lo || site > hi {
            [ZERO, ZERO]
        } else {
            self.amplitudes[(site - lo) as usize]
        }
    }

    /// Amplitude for coin label `label` (0 = L, 1 = R) at `site`.
    #[inline]
    pub fn amplitude(&self, site: i64, label: usize) -> Complex64 {
        self.spinor(site)[label]
    }

    /// Whether `site` can carry amplitude: inside the light cone and of the right parity.
    pub fn supports(&self, site: i64) -> bool {
        let (lo, hi) = self.window();
        site >= lo && site <= hi && (site - lo) % 2 == 0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|s| s[0].norm_sqr() + s[1].norm_sqr())
            .sum()
    }

    /// `⟨self|other⟩` over position and coin. Both states must be at the same time.
    pub fn inner(&self, other: &WalkerState) -> Complex64 {
        debug_assert_eq!(self.time, other.time);
        let (lo_a, hi_a) = self.window();
        let (lo_b, hi_b) = other.window();
        let (lo, hi) = (lo_a.max(lo_b), hi_a.min(hi_b));
        let mut acc = ZERO;
        let mut site = lo;
        while site <= hi {
            let a = self.amplitudes[(site - lo_a) as usize];
            let b = other.amplitudes[(site - lo_b) as usize];
            acc += a[0].conj() * b[0] + a[1].conj() * b[1];
            site += 1;
        }
        acc
    }

    /// `a·s1 + b·s2` for states sharing origin and time.
    pub fn linear_combination(
        a: Complex64,
        s1: &WalkerState,
        b: Complex64,
        s2: &WalkerState,
    ) -> Result<WalkerState> {
        if s1.origin != s2.origin || s1.time != s2.time {
            return Err(WalkError::Config(
                "linear combination needs states with equal origin and time".into(),
            ));
        }
        let amplitudes = s1
            .amplitudes
            .iter()
            .zip(&s2.amplitudes)
            .map(|(x, y)| [a * x[0] + b * y[0], a * x[1] + b * y[1]])
            .collect();
        Ok(WalkerState {
            origin: s1.origin,
            time: s1.time,
            amplitudes,
        })
    }

    /// One application of coin-then-shift: L moves to `x - 1`, R to `x + 1`.
    pub fn step(&self, coin: &CoinOperator) -> WalkerState {
        let n = self.amplitudes.len();
        let mut next = vec![[ZERO, ZERO]; n + 2];
        // Old index i (site lo + i) maps to new index i + 1 for the same site.
        for (i, spinor) in self.amplitudes.iter().enumerate() {
            if spinor[0] == ZERO && spinor[1] == ZERO {
                continue;
            }
            let out = coin.apply(spinor);
            next[i][0] += out[0];
            next[i + 2][1] += out[1];
        }
        WalkerState {
            origin: self.origin,
            time: self.time + 1,
            amplitudes: next,
        }
    }

    pub fn evolve(&self, coin: &CoinOperator, steps: usize) -> WalkerState {
        let mut state = self.clone();
        for _ in 0..steps {
            state = state.step(coin);
        }
        state
    }

    /// `P(x) = |a_L(x)|² + |a_R(x)|²` on every parity-allowed site of the window.
    pub fn site_distribution(&self) -> BTreeMap<i64, f64> {
        let (lo, _) = self.window();
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i % 2 == 0)
            .map(|(i, s)| (lo + i as i64, s[0].norm_sqr() + s[1].norm_sqr()))
            .collect()
    }

    /// Probability at a single site.
    pub fn site_probability(&self, site: i64) -> f64 {
        let s = self.spinor(site);
        s[0].norm_sqr() + s[1].norm_sqr()
    }
}

pub fn init_walker(origin: i64, spinor: Spinor) -> Result<WalkerState> {
    WalkerState::new(origin, spinor)
}

pub fn step(state: &WalkerState, coin: &CoinOperator) -> WalkerState {
    state.step(coin)
}

pub fn evolve(state: &WalkerState, coin: &CoinOperator, steps: usize) -> WalkerState {
    state.evolve(coin, steps)
}

pub fn site_distribution(state: &WalkerState) -> BTreeMap<i64, f64> {
    state.site_distribution()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const LEFT: Spinor = [Complex64 { re: 1.0, im: 0.0 }, ZERO];
    const RIGHT: Spinor = [ZERO, Complex64 { re: 1.0, im: 0.0 }];

    #[test]
    fn init_places_spinor_at_origin() {
        let w = init_walker(0, LEFT).unwrap();
        assert_eq!(w.time(), 0);
        assert_eq!(w.amplitude(0, 0), c(1.0, 0.0));
        assert_eq!(w.amplitude(0, 1), ZERO);
        assert_eq!(w.amplitude(1, 0), ZERO);

        let w = init_walker(5, RIGHT).unwrap();
        assert_eq!(w.amplitude(5, 1), c(1.0, 0.0));
    }

    #[test]
    fn init_rejects_unnormalized() {
        let err = init_walker(0, [c(1.0, 0.0), c(1.0, 0.0)]).unwrap_err();
        assert!(matches!(err, WalkError::Config(_)));
    }

    #[test]
    fn hadamard_single_step() {
        let w = init_walker(0, LEFT).unwrap().step(&CoinOperator::hadamard());
        assert_eq!(w.window(), (-1, 1));
        assert!((w.amplitude(-1, 0) - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((w.amplitude(1, 1) - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert_eq!(w.amplitude(-1, 1), ZERO);
        assert_eq!(w.amplitude(1, 0), ZERO);
        assert_eq!(w.spinor(0), [ZERO, ZERO]);
    }

    #[test]
    fn identity_moves_left() {
        let w = init_walker(0, LEFT).unwrap().step(&CoinOperator::identity());
        assert_eq!(w.amplitude(-1, 0), c(1.0, 0.0));
        assert!((w.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn swap_flips_then_moves_right() {
        let w = init_walker(0, LEFT).unwrap().step(&CoinOperator::swap());
        assert_eq!(w.amplitude(1, 1), c(1.0, 0.0));
    }

    #[test]
    fn swap_returns_after_two_steps() {
        let w = init_walker(0, LEFT).unwrap().evolve(&CoinOperator::swap(), 2);
        assert_eq!(w.amplitude(0, 0), c(1.0, 0.0));
        assert!((w.site_probability(0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn evolve_zero_steps_is_identity() {
        let w = init_walker(3, [c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        assert_eq!(w.evolve(&CoinOperator::hadamard(), 0), w);
    }

    #[test]
    fn hadamard_two_step_distribution() {
        let w = init_walker(0, LEFT).unwrap().evolve(&CoinOperator::hadamard(), 2);
        let d = w.site_distribution();
        let expected = [(-2, 0.25), (0, 0.5), (2, 0.25)];
        assert_eq!(d.len(), 3);
        for (site, p) in expected {
            assert!((d[&site] - p).abs() < 1e-12, "site {site}");
        }
    }

    #[test]
    fn distribution_at_t0() {
        let d = init_walker(0, LEFT).unwrap().site_distribution();
        assert_eq!(d.into_iter().collect::<Vec<_>>(), vec![(0, 1.0)]);
    }

    #[test]
    fn window_length_checked() {
        assert!(WalkerState::from_window(0, 2, vec![[ZERO, ZERO]; 4]).is_err());
    }

    #[test]
    fn inner_product_of_orthogonal_walkers() {
        let h = CoinOperator::hadamard();
        let a = init_walker(0, LEFT).unwrap().evolve(&h, 7);
        let b = init_walker(0, RIGHT).unwrap().evolve(&h, 7);
        assert!(a.inner(&b).norm() < 1e-12);
        assert!((a.inner(&a).re - 1.0).abs() < 1e-12);
    }
}
