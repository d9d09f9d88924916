//! Dense reference engine.
//!
//! Stores the full M-particle amplitude tensor over `[-W, W]^M × {L, R}^M`
//! and applies coin-then-shift to every particle axis, with no factorization
//! assumption. Everything here is brute force and only meant for small `M`
//! and short horizons.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::coin::CoinOperator;
use crate::error::{Result, WalkError};
use crate::multiwalk::{
    make_bell_state, make_product_state, require_strictly_decreasing, BellKind, CoinLabel,
    CoinPattern, MultiState, Statistics,
};

/// Default cap on the number of complex values held by one dense state.
pub const DEFAULT_VALUE_CAP: usize = 100_000_000;

/// Tolerance used by `oracle-check` and the equivalence tests.
pub const ENGINE_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq)]
pub struct DenseJointState {
    particles: usize,
    time: usize,
    half_width: usize,
    /// Largest `|x0| + t` over all particles; the light cone must stay inside the window.
    reach: usize,
    statistics: Statistics,
    /// Norm of the symmetrized tensor before renormalization. 1 for distinguishable states.
    symmetrization_norm: f64,
    amplitudes: Vec<Complex64>,
}

fn checked_footprint(particles: usize, half_width: usize, cap: usize) -> Result<usize> {
    let per_particle = 2 * (2 * half_width + 1);
    let mut total: usize = 1;
    for _ in 0..particles {
        total = total
            .checked_mul(per_particle)
            .filter(|&n| n <= cap)
            .ok_or_else(|| {
                WalkError::Resource(format!(
                    "dense tensor for M = {particles}, W = {half_width} exceeds {cap} values"
                ))
            })?;
    }
    Ok(total)
}

impl DenseJointState {
    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn symmetrization_norm(&self) -> f64 {
        self.symmetrization_norm
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn per_particle(&self) -> usize {
        2 * (2 * self.half_width + 1)
    }

    /// Flat index of `(sites, labels)`, or `None` when a site lies outside the window.
    fn index(&self, sites: &[i64], labels: &[CoinLabel]) -> Option<usize> {
        let w = self.half_width as i64;
        let d = self.per_particle();
        let mut idx = 0usize;
        for (&site, label) in sites.iter().zip(labels) {
            if site < -w || site > w {
                return None;
            }
            idx = idx * d + ((site + w) as usize) * 2 + label.index();
        }
        Some(idx)
    }

    /// Raw tensor entry. For symmetrized states this is the renormalized entry.
    pub fn entry(&self, sites: &[i64], pattern: &CoinPattern) -> Complex64 {
        self.index(sites, pattern.labels())
            .map_or(ZERO, |i| self.amplitudes[i])
    }

    /// Flat index of the particle-reversed configuration.
    fn reversed_index(&self, mut idx: usize) -> usize {
        let d = self.per_particle();
        let mut out = 0;
        for _ in 0..self.particles {
            out = out * d + idx % d;
            idx /= d;
        }
        out
    }

    /// Joint probability with no factorization shortcut.
    ///
    /// Symmetrized states undo their renormalization so the value matches
    /// `Σ_r |ψ_r(m) ± ψ_{rev r}(rev m)|²` of the underlying amplitude.
    pub fn joint_probability(&self, sites: &[i64]) -> Result<f64> {
        if sites.len() != self.particles {
            return Err(WalkError::Domain(format!(
                "expected {} sites, got {}",
                self.particles,
                sites.len()
            )));
        }
        let m = self.particles;
        match self.statistics.exchange_sign() {
            None => Ok(CoinPattern::all(m)
                .map(|p| self.entry(sites, &p).norm_sqr())
                .sum()),
            Some(sign) => {
                require_strictly_decreasing(sites)?;
                let reversed: Vec<i64> = sites.iter().rev().copied().collect();
                let scale = self.symmetrization_norm * self.symmetrization_norm;
                Ok(CoinPattern::all(m)
                    .map(|p| {
                        let direct = self.entry(sites, &p);
                        let swapped = self.entry(&reversed, &p.reversed());
                        scale * (direct + swapped * sign).norm_sqr()
                    })
                    .sum())
            }
        }
    }

    /// One application of `U_w`: coin then shift on every particle axis.
    pub fn step(&self, coin: &CoinOperator) -> Result<DenseJointState> {
        if self.reach + 1 > self.half_width {
            return Err(WalkError::Resource(format!(
                "light cone at t = {} would leave the window [-{w}, {w}]",
                self.time + 1,
                w = self.half_width
            )));
        }
        let d = self.per_particle();
        let u = coin.entries();
        let mut current = self.amplitudes.clone();
        for axis in 0..self.particles {
            let stride = d.pow((self.particles - 1 - axis) as u32);
            let mut next = vec![ZERO; current.len()];
            for (idx, &a_l) in current.iter().enumerate() {
                let local = (idx / stride) % d;
                if !local.is_multiple_of(2) {
                    continue;
                }
                let a_r = current[idx + stride];
                if a_l == ZERO && a_r == ZERO {
                    continue;
                }
                // local = 2 * (site + W) + coin; the reach check keeps site ± 1 inside.
                next[idx - 2 * stride] += u[0][0] * a_l + u[0][1] * a_r;
                next[idx + 3 * stride] += u[1][0] * a_l + u[1][1] * a_r;
            }
            current = next;
        }
        Ok(DenseJointState {
            amplitudes: current,
            time: self.time + 1,
            reach: self.reach + 1,
            ..self.clone()
        })
    }

    pub fn evolve(&self, coin: &CoinOperator, steps: usize) -> Result<DenseJointState> {
        let mut state = self.clone();
        for _ in 0..steps {
            state = state.step(coin)?;
        }
        Ok(state)
    }
}

/// Materializes `state` densely with a window wide enough for `horizon` more steps.
pub fn dense_init(state: &MultiState, horizon: usize) -> Result<DenseJointState> {
    dense_init_with(state, None, horizon, DEFAULT_VALUE_CAP)
}

/// Like [`dense_init`], with an explicit window half-width (`None` sizes it
/// from the horizon) and value cap.
pub fn dense_init_with(
    state: &MultiState,
    half_width: Option<usize>,
    horizon: usize,
    cap: usize,
) -> Result<DenseJointState> {
    let m = state.particles();
    let reach = state
        .terms()
        .iter()
        .flat_map(|t| &t.factors)
        .map(|f| f.origin().unsigned_abs() as usize + f.time())
        .max()
        .unwrap_or(0);
    let half_width = half_width.unwrap_or(reach + horizon);
    if reach > half_width {
        return Err(WalkError::Resource(format!(
            "initial support reaches {reach}, beyond window half-width {half_width}"
        )));
    }
    let len = checked_footprint(m, half_width, cap)?;
    let mut dense = DenseJointState {
        particles: m,
        time: state.time(),
        half_width,
        reach,
        statistics: state.statistics(),
        symmetrization_norm: 1.0,
        amplitudes: vec![ZERO; len],
    };

    let d = dense.per_particle();
    let w = half_width as i64;
    for term in state.terms() {
        // Outer product of the factor windows, accumulated particle by particle.
        let mut partial: Vec<(usize, Complex64)> = vec![(0, term.coefficient)];
        for factor in &term.factors {
            let (lo, hi) = factor.window();
            let mut grown = Vec::with_capacity(partial.len() * 2 * (hi - lo + 1) as usize);
            for &(idx, amp) in &partial {
                for site in lo..=hi {
                    let spinor = factor.spinor(site);
                    for (label, value) in spinor.iter().enumerate() {
                        if *value != ZERO {
                            let local = ((site + w) as usize) * 2 + label;
                            grown.push((idx * d + local, amp * value));
                        }
                    }
                }
            }
            partial = grown;
        }
        for (idx, amp) in partial {
            dense.amplitudes[idx] += amp;
        }
    }

    if let Some(sign) = dense.statistics.exchange_sign() {
        let raw = &dense.amplitudes;
        let symmetrized: Vec<Complex64> = (0..raw.len())
            .map(|i| (raw[i] + raw[dense.reversed_index(i)] * sign) * 0.5)
            .collect();
        let norm = symmetrized.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        dense.symmetrization_norm = norm;
        dense.amplitudes = if norm > 0.0 {
            symmetrized.into_iter().map(|a| a / norm).collect()
        } else {
            symmetrized
        };
    }
    Ok(dense)
}

pub fn dense_step(state: &DenseJointState, coin: &CoinOperator) -> Result<DenseJointState> {
    state.step(coin)
}

pub fn dense_joint_probability(state: &DenseJointState, sites: &[i64]) -> Result<f64> {
    state.joint_probability(sites)
}

/// Calls `visit` with every tuple in `[-w, w]^m`, last particle varying fastest.
pub(crate) fn for_each_tuple(m: usize, w: i64, mut visit: impl FnMut(&[i64])) {
    let mut sites = vec![-w; m];
    loop {
        visit(&sites);
        let mut axis = m;
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            if sites[axis] < w {
                sites[axis] += 1;
                break;
            }
            sites[axis] = -w;
        }
    }
}

/// Evolves the fast and dense engines side by side for `t ≤ horizon` and
/// returns the largest absolute deviation over every legal joint
/// probability query (and, for distinguishable walkers, every amplitude).
pub fn compare_engines(spec: &MultiState, coin: &CoinOperator, horizon: usize) -> Result<f64> {
    let mut dense = dense_init(spec, horizon)?;
    let mut fast = spec.clone();
    let m = spec.particles();
    let w = dense.half_width() as i64;
    let patterns: Vec<CoinPattern> = CoinPattern::all(m).collect();
    let mut worst = 0.0_f64;
    for t in 0..=horizon {
        if t > 0 {
            fast = fast.step_all(coin);
            dense = dense.step(coin)?;
        }
        let mut failure = None;
        for_each_tuple(m, w, |sites| {
            let symmetric = spec.statistics() != Statistics::Distinguishable;
            if symmetric && !sites.windows(2).all(|p| p[0] > p[1]) {
                return;
            }
            match (fast.joint_probability(sites), dense.joint_probability(sites)) {
                (Ok(a), Ok(b)) => worst = worst.max((a - b).abs()),
                (Err(e), _) | (_, Err(e)) => failure = Some(e),
            }
            if !symmetric {
                for p in &patterns {
                    let a = fast.amplitude_unchecked(sites, p.labels());
                    let b = dense.entry(sites, p);
                    worst = worst.max((a - b).norm());
                }
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
    }
    Ok(worst)
}

/// One golden-file record: `label, t, sites…, statistics, value`.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldenRecord {
    pub label: String,
    pub time: usize,
    pub sites: Vec<i64>,
    pub statistics: Statistics,
    pub value: f64,
}

impl GoldenRecord {
    pub fn to_line(&self) -> String {
        let mut line = format!("{}, {}", self.label, self.time);
        for s in &self.sites {
            let _ = write!(line, ", {s}");
        }
        let _ = write!(line, ", {}, {:.14e}", self.statistics, self.value);
        line
    }

    pub fn parse_line(line: &str) -> Result<GoldenRecord> {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = || WalkError::Config(format!("malformed golden record: {line}"));
        if fields.len() < 5 {
            return Err(bad());
        }
        let n = fields.len();
        Ok(GoldenRecord {
            label: fields[0].to_string(),
            time: fields[1].parse().map_err(|_| bad())?,
            sites: fields[2..n - 2]
                .iter()
                .map(|s| s.parse().map_err(|_| bad()))
                .collect::<Result<_>>()?,
            statistics: fields[n - 2].parse()?,
            value: fields[n - 1].parse().map_err(|_| bad())?,
        })
    }
}

/// Named reference states used for the committed golden values.
pub fn golden_cases() -> Result<Vec<(&'static str, MultiState, usize)>> {
    let l = CoinLabel::L.spinor();
    let r = CoinLabel::R.spinor();
    let one = Complex64::new(1.0, 0.0);
    let dist = Statistics::Distinguishable;
    Ok(vec![
        ("walker_L", make_product_state(1, &[(one, vec![(0, l)])], dist)?, 4),
        ("separable_LL", make_product_state(2, &[(one, vec![(0, l), (0, l)])], dist)?, 3),
        ("psi+", make_bell_state(2, BellKind::PsiPlus, 0, dist)?, 2),
        ("psi-", make_bell_state(2, BellKind::PsiMinus, 0, dist)?, 2),
        ("phi+", make_bell_state(2, BellKind::PhiPlus, 0, dist)?, 2),
        ("phi-", make_bell_state(2, BellKind::PhiMinus, 0, dist)?, 2),
        (
            "bosons_LR",
            make_product_state(2, &[(one, vec![(0, l), (0, r)])], Statistics::Bosonic)?,
            3,
        ),
        (
            "fermions_LR",
            make_product_state(2, &[(one, vec![(0, l), (0, r)])], Statistics::Fermionic)?,
            3,
        ),
        ("psi+_M3", make_bell_state(3, BellKind::PsiPlus, 0, dist)?, 2),
        (
            "bosons_LRL",
            make_product_state(3, &[(one, vec![(0, l), (0, r), (0, l)])], Statistics::Bosonic)?,
            2,
        ),
    ])
}

/// Golden records computed by the dense engine alone, for every parity-allowed
/// (and, for symmetrized states, strictly decreasing) tuple.
pub fn golden_records(coin: &CoinOperator) -> Result<Vec<GoldenRecord>> {
    let mut records = Vec::new();
    for (label, state, horizon) in golden_cases()? {
        let m = state.particles();
        let mut dense = dense_init(&state, horizon)?;
        for t in 0..=horizon {
            if t > 0 {
                dense = dense.step(coin)?;
            }
            let tt = t as i64;
            for_each_tuple(m, tt, |sites| {
                if sites.iter().any(|s| (s + tt) % 2 != 0) {
                    return;
                }
                if state.statistics() != Statistics::Distinguishable
                    && !sites.windows(2).all(|p| p[0] > p[1])
                {
                    return;
                }
                let value = dense.joint_probability(sites).unwrap_or(f64::NAN);
                records.push(GoldenRecord {
                    label: label.to_string(),
                    time: t,
                    sites: sites.to_vec(),
                    statistics: state.statistics(),
                    value,
                });
            });
        }
    }
    Ok(records)
}

pub const GOLDEN_HEADER: &str = "# label, t, sites..., statistics, value";

/// Text of the golden file: a header line plus one record per line.
pub fn golden_text(coin: &CoinOperator) -> Result<String> {
    let mut out = String::from(GOLDEN_HEADER);
    out.push('\n');
    for record in golden_records(coin)? {
        out.push_str(&record.to_line());
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use super::*;
    use crate::multiwalk::ParticleInit;

    const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

    fn all_left(m: usize) -> MultiState {
        let init: Vec<ParticleInit> = vec![(0, CoinLabel::L.spinor()); m];
        make_product_state(m, &[(ONE, init)], Statistics::Distinguishable).unwrap()
    }

    fn pat(s: &str) -> CoinPattern {
        s.parse().unwrap()
    }

    #[test]
    fn single_walker_tensor() {
        let d = dense_init(&all_left(1), 0).unwrap();
        assert_eq!(d.amplitudes().len(), 2);
        assert_eq!(d.entry(&[0], &pat("L")), ONE);
        assert_eq!(d.entry(&[0], &pat("R")), ZERO);
    }

    #[test]
    fn bell_tensor() {
        let s = make_bell_state(2, BellKind::PsiPlus, 0, Statistics::Distinguishable).unwrap();
        let d = dense_init(&s, 0).unwrap();
        assert!((d.entry(&[0, 0], &pat("LR")).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((d.entry(&[0, 0], &pat("RL")).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(d.entry(&[0, 0], &pat("LL")), ZERO);
    }

    #[test]
    fn window_overflow_is_resource_error() {
        let d = dense_init_with(&all_left(3), Some(2), 0, DEFAULT_VALUE_CAP).unwrap();
        let d = d.evolve(&CoinOperator::hadamard(), 2).unwrap();
        assert!(matches!(d.step(&CoinOperator::hadamard()), Err(WalkError::Resource(_))));
    }

    #[test]
    fn cap_is_enforced() {
        let err = dense_init_with(&all_left(3), None, 200, DEFAULT_VALUE_CAP).unwrap_err();
        assert!(matches!(err, WalkError::Resource(_)));
        assert!(dense_init_with(&all_left(2), None, 2, 10).is_err());
    }

    #[test]
    fn separable_one_step() {
        let d = dense_init(&all_left(2), 1).unwrap().step(&CoinOperator::hadamard()).unwrap();
        assert_eq!(d.amplitudes().len(), 36);
        for sites in [[-1, -1], [-1, 1], [1, -1], [1, 1]] {
            assert!((d.joint_probability(&sites).unwrap() - 0.25).abs() < 1e-15);
        }
        assert!((d.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_coin_translates() {
        let d = dense_init(&all_left(2), 2).unwrap().evolve(&CoinOperator::identity(), 2).unwrap();
        assert!((d.joint_probability(&[-2, -2]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn outside_window_is_zero() {
        let d = dense_init(&all_left(2), 1).unwrap();
        assert_eq!(d.joint_probability(&[0, 0]).unwrap(), 1.0);
        assert_eq!(d.joint_probability(&[5, 0]).unwrap(), 0.0);
        assert_eq!(d.joint_probability(&[1, 0]).unwrap(), 0.0);
    }

    #[test]
    fn symmetrized_domain() {
        let s = make_product_state(
            2,
            &[(ONE, vec![(0, CoinLabel::L.spinor()), (0, CoinLabel::R.spinor())])],
            Statistics::Bosonic,
        )
        .unwrap();
        let d = dense_init(&s, 1).unwrap();
        assert!((d.norm_sqr() - 1.0).abs() < 1e-15);
        assert!(matches!(d.joint_probability(&[0, 0]), Err(WalkError::Domain(_))));
    }

    #[test]
    fn golden_record_round_trip() {
        let r = GoldenRecord {
            label: "psi+".into(),
            time: 1,
            sites: vec![-1, -1],
            statistics: Statistics::Distinguishable,
            value: 0.5,
        };
        let line = r.to_line();
        assert_eq!(line, "psi+, 1, -1, -1, distinguishable, 5.00000000000000e-1");
        assert_eq!(GoldenRecord::parse_line(&line).unwrap(), r);
    }

    #[test]
    fn tuple_enumeration_order() {
        let mut seen = Vec::new();
        for_each_tuple(2, 1, |s| seen.push(s.to_vec()));
        assert_eq!(seen.len(), 9);
        assert_eq!(seen[0], vec![-1, -1]);
        assert_eq!(seen[1], vec![-1, 0]);
        assert_eq!(seen[8], vec![1, 1]);
    }
}
