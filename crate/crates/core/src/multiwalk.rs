//! M-particle states built as superpositions of product terms.
//!
//! Walkers do not interact, so each product term evolves factor by factor
//! and the joint amplitude is `Σ_α c_α ∏_i ψ^α_i(m_i, k_i)`. Bosonic and
//! fermionic statistics are applied at query time by pairing an amplitude
//! with its particle-reversed counterpart.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::coin::{CoinOperator, Spinor};
use crate::error::{Result, WalkError};
use crate::walker::WalkerState;

/// Below this squared norm a superposition is treated as cancelled.
const ZERO_NORM_TOL: f64 = 1e-20;

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CoinLabel {
    L,
    R,
}

impl CoinLabel {
    #[inline]
    pub fn index(self) -> usize {
        match self {
            CoinLabel::L => 0,
            CoinLabel::R => 1,
        }
    }

    pub fn spinor(self) -> Spinor {
        match self {
            CoinLabel::L => [ONE, ZERO],
            CoinLabel::R => [ZERO, ONE],
        }
    }

    fn flip(self) -> Self {
        match self {
            CoinLabel::L => CoinLabel::R,
            CoinLabel::R => CoinLabel::L,
        }
    }
}

/// A coin basis pattern `k_1 … k_M`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoinPattern(Vec<CoinLabel>);

impl CoinPattern {
    pub fn new(labels: Vec<CoinLabel>) -> Self {
        CoinPattern(labels)
    }

    pub fn uniform(m: usize, label: CoinLabel) -> Self {
        CoinPattern(vec![label; m])
    }

    /// `L R L R …` when `first` is L, `R L R L …` otherwise.
    pub fn alternating(m: usize, first: CoinLabel) -> Self {
        let mut label = first;
        let mut labels = Vec::with_capacity(m);
        for _ in 0..m {
            labels.push(label);
            label = label.flip();
        }
        CoinPattern(labels)
    }

    /// The pattern encoded by the bits of `code`, particle 0 in the highest bit.
    pub fn from_index(m: usize, code: usize) -> Self {
        CoinPattern(
            (0..m)
                .map(|i| {
                    if (code >> (m - 1 - i)) & 1 == 0 {
                        CoinLabel::L
                    } else {
                        CoinLabel::R
                    }
                })
                .collect(),
        )
    }

    /// All `2^M` patterns in lexicographic order (L < R).
    pub fn all(m: usize) -> impl Iterator<Item = CoinPattern> {
        (0..1usize << m).map(move |code| CoinPattern::from_index(m, code))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn labels(&self) -> &[CoinLabel] {
        &self.0
    }

    pub fn reversed(&self) -> Self {
        CoinPattern(self.0.iter().rev().copied().collect())
    }

    pub fn is_uniform(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }
}

impl fmt::Display for CoinPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for label in &self.0 {
            f.write_str(match label {
                CoinLabel::L => "L",
                CoinLabel::R => "R",
            })?;
        }
        Ok(())
    }
}

impl FromStr for CoinPattern {
    type Err = WalkError;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|ch| match ch {
                'L' | 'l' => Ok(CoinLabel::L),
                'R' | 'r' => Ok(CoinLabel::R),
                other => Err(WalkError::Config(format!(
                    "coin pattern '{s}' contains '{other}', expected only L or R"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(CoinPattern)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistics {
    Distinguishable,
    Bosonic,
    Fermionic,
}

impl Statistics {
    pub fn as_str(self) -> &'static str {
        match self {
            Statistics::Distinguishable => "distinguishable",
            Statistics::Bosonic => "bosonic",
            Statistics::Fermionic => "fermionic",
        }
    }

    /// `+1` for bosons, `-1` for fermions, `None` for distinguishable walkers.
    pub fn exchange_sign(self) -> Option<f64> {
        match self {
            Statistics::Distinguishable => None,
            Statistics::Bosonic => Some(1.0),
            Statistics::Fermionic => Some(-1.0),
        }
    }
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Statistics {
    type Err = WalkError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "distinguishable" => Ok(Statistics::Distinguishable),
            "bosonic" | "bosons" => Ok(Statistics::Bosonic),
            "fermionic" | "fermions" => Ok(Statistics::Fermionic),
            other => Err(WalkError::Config(format!(
                "unknown statistics '{other}' (expected distinguishable, bosonic or fermionic)"
            ))),
        }
    }
}

/// The four Bell-type coin states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellKind {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl BellKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BellKind::PsiPlus => "psi+",
            BellKind::PsiMinus => "psi-",
            BellKind::PhiPlus => "phi+",
            BellKind::PhiMinus => "phi-",
        }
    }
}

impl FromStr for BellKind {
    type Err = WalkError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "psi+" => Ok(BellKind::PsiPlus),
            "psi-" => Ok(BellKind::PsiMinus),
            "phi+" => Ok(BellKind::PhiPlus),
            "phi-" => Ok(BellKind::PhiMinus),
            other => Err(WalkError::Config(format!(
                "unknown Bell state '{other}' (expected psi+, psi-, phi+ or phi-)"
            ))),
        }
    }
}

/// One term `c_α ψ^α_1 ⊗ … ⊗ ψ^α_M`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductTerm {
    pub coefficient: Complex64,
    pub factors: Vec<WalkerState>,
}

impl ProductTerm {
    #[inline]
    fn amplitude(&self, sites: &[i64], labels: &[CoinLabel]) -> Complex64 {
        let mut acc = self.coefficient;
        for ((factor, &site), label) in self.factors.iter().zip(sites).zip(labels) {
            acc *= factor.amplitude(site, label.index());
            if acc == ZERO {
                break;
            }
        }
        acc
    }
}

/// Initializer for one particle of one term: a site and a normalized spinor.
pub type ParticleInit = (i64, Spinor);

#[derive(Debug, Clone, PartialEq)]
pub struct MultiState {
    particles: usize,
    statistics: Statistics,
    terms: Vec<ProductTerm>,
    time: usize,
}

impl MultiState {
    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn terms(&self) -> &[ProductTerm] {
        &self.terms
    }

    pub fn time(&self) -> usize {
        self.time
    }

    /// Same amplitudes, different statistics tag.
    pub fn with_statistics(mut self, statistics: Statistics) -> Self {
        self.statistics = statistics;
        self
    }

    /// `⟨ψ|ψ⟩` of the distinguishable-sector state, from factor inner products.
    pub fn norm_sqr(&self) -> f64 {
        gram_norm_sqr(&self.terms)
    }

    /// Smallest and largest site any factor can occupy.
    pub fn site_bounds(&self) -> (i64, i64) {
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for factor in self.terms.iter().flat_map(|t| &t.factors) {
            let (a, b) = factor.window();
            lo = lo.min(a);
            hi = hi.max(b);
        }
        (lo, hi)
    }

    /// Whether some term has every particle on a parity-allowed site of its light cone.
    pub fn supports(&self, sites: &[i64]) -> bool {
        self.terms.iter().any(|term| {
            term.factors
                .iter()
                .zip(sites)
                .all(|(factor, &site)| factor.supports(site))
        })
    }

    fn check_sites(&self, sites: &[i64]) -> Result<()> {
        if sites.len() != self.particles {
            return Err(WalkError::Domain(format!(
                "expected {} sites, got {}",
                self.particles,
                sites.len()
            )));
        }
        Ok(())
    }

    /// `ψ_{k_1…k_M}(m_1,…,m_M; t) = Σ_α c_α ∏_i ψ^α_{i k_i}(m_i, t)`.
    ///
    /// This is the distinguishable-sector amplitude; the statistics tag is ignored.
    pub fn joint_amplitude(&self, sites: &[i64], pattern: &CoinPattern) -> Result<Complex64> {
        self.check_sites(sites)?;
        if pattern.len() != self.particles {
            return Err(WalkError::Domain(format!(
                "pattern {pattern} has {} labels, state has {} particles",
                pattern.len(),
                self.particles
            )));
        }
        Ok(self.amplitude_unchecked(sites, pattern.labels()))
    }

    #[inline]
    pub(crate) fn amplitude_unchecked(&self, sites: &[i64], labels: &[CoinLabel]) -> Complex64 {
        self.terms
            .iter()
            .map(|term| term.amplitude(sites, labels))
            .sum()
    }

    /// Joint probability of finding the walkers at `sites`.
    ///
    /// Distinguishable: `Σ_k |ψ_k(m)|²`. Bosonic/fermionic:
    /// `Σ_r |ψ_r(m) ± ψ_{rev r}(rev m)|²`, defined only for strictly
    /// decreasing site tuples.
    pub fn joint_probability(&self, sites: &[i64]) -> Result<f64> {
        self.check_sites(sites)?;
        let m = self.particles;
        match self.statistics.exchange_sign() {
            None => Ok(CoinPattern::all(m)
                .map(|p| self.amplitude_unchecked(sites, p.labels()).norm_sqr())
                .sum()),
            Some(sign) => {
                require_strictly_decreasing(sites)?;
                let reversed_sites: Vec<i64> = sites.iter().rev().copied().collect();
                Ok(CoinPattern::all(m)
                    .map(|p| {
                        let direct = self.amplitude_unchecked(sites, p.labels());
                        let swapped =
                            self.amplitude_unchecked(&reversed_sites, p.reversed().labels());
                        (direct + swapped * sign).norm_sqr()
                    })
                    .sum())
            }
        }
    }

    /// Single-particle marginal `P_i(m)` for the 1-based particle `index`.
    ///
    /// Uses `P_i(m) = Σ_{α,β} c̄_α c_β ⟨ψ^α_i(m)|ψ^β_i(m)⟩_coin ∏_{j≠i} ⟨ψ^α_j|ψ^β_j⟩`.
    pub fn marginal_distribution(&self, index: usize) -> Result<BTreeMap<i64, f64>> {
        if self.statistics != Statistics::Distinguishable {
            return Err(WalkError::Domain(format!(
                "marginals are defined for distinguishable walkers, state is {}",
                self.statistics
            )));
        }
        if index == 0 || index > self.particles {
            return Err(WalkError::Domain(format!(
                "particle index {index} outside 1..={}",
                self.particles
            )));
        }
        let i = index - 1;
        let n = self.terms.len();
        // weights[a][b] = c̄_a c_b ∏_{j≠i} ⟨f^a_j|f^b_j⟩
        let mut weights = vec![vec![ZERO; n]; n];
        for (a, ta) in self.terms.iter().enumerate() {
            for (b, tb) in self.terms.iter().enumerate() {
                let mut w = ta.coefficient.conj() * tb.coefficient;
                for j in (0..self.particles).filter(|&j| j != i) {
                    w *= ta.factors[j].inner(&tb.factors[j]);
                }
                weights[a][b] = w;
            }
        }
        let mut out = BTreeMap::new();
        let (lo, hi) = self
            .terms
            .iter()
            .map(|t| t.factors[i].window())
            .fold((i64::MAX, i64::MIN), |(lo, hi), (a, b)| (lo.min(a), hi.max(b)));
        for site in lo..=hi {
            if !self.terms.iter().any(|t| t.factors[i].supports(site)) {
                continue;
            }
            let mut p = ZERO;
            for (a, ta) in self.terms.iter().enumerate() {
                let sa = ta.factors[i].spinor(site);
                for (b, tb) in self.terms.iter().enumerate() {
                    let sb = tb.factors[i].spinor(site);
                    let local = sa[0].conj() * sb[0] + sa[1].conj() * sb[1];
                    p += weights[a][b] * local;
                }
            }
            out.insert(site, p.re.max(0.0));
        }
        Ok(out)
    }

    /// Advance every factor of every term by `steps` single-particle steps.
    pub fn evolve_all(&self, coin: &CoinOperator, steps: usize) -> MultiState {
        if steps == 0 {
            return self.clone();
        }
        let terms = self
            .terms
            .iter()
            .map(|term| ProductTerm {
                coefficient: term.coefficient,
                factors: term.factors.iter().map(|f| f.evolve(coin, steps)).collect(),
            })
            .collect();
        MultiState {
            particles: self.particles,
            statistics: self.statistics,
            terms,
            time: self.time + steps,
        }
    }

    pub fn step_all(&self, coin: &CoinOperator) -> MultiState {
        self.evolve_all(coin, 1)
    }
}

/// Fails unless `sites` is strictly decreasing.
pub fn require_strictly_decreasing(sites: &[i64]) -> Result<()> {
    if sites.windows(2).all(|w| w[0] > w[1]) {
        Ok(())
    } else {
        Err(WalkError::Domain(format!(
            "symmetrized probability needs strictly decreasing sites, got {sites:?}"
        )))
    }
}

fn gram_norm_sqr(terms: &[ProductTerm]) -> f64 {
    let mut acc = ZERO;
    for a in terms {
        for b in terms {
            let mut w = a.coefficient.conj() * b.coefficient;
            for (fa, fb) in a.factors.iter().zip(&b.factors) {
                w *= fa.inner(fb);
            }
            acc += w;
        }
    }
    acc.re
}

fn normalized(particles: usize, statistics: Statistics, mut terms: Vec<ProductTerm>) -> Result<MultiState> {
    let norm_sqr = gram_norm_sqr(&terms);
    if !(norm_sqr > ZERO_NORM_TOL) {
        return Err(WalkError::Config(format!(
            "initial state has zero norm (|ψ|² = {norm_sqr:e})"
        )));
    }
    let scale = 1.0 / norm_sqr.sqrt();
    for term in &mut terms {
        term.coefficient *= scale;
    }
    Ok(MultiState {
        particles,
        statistics,
        terms,
        time: 0,
    })
}

/// Builds a `t = 0` state from explicit product terms and normalizes it.
pub fn make_product_state(
    particles: usize,
    terms: &[(Complex64, Vec<ParticleInit>)],
    statistics: Statistics,
) -> Result<MultiState> {
    if particles == 0 {
        return Err(WalkError::Config("particle count must be at least 1".into()));
    }
    if terms.is_empty() {
        return Err(WalkError::Config("initial state needs at least one term".into()));
    }
    let mut built = Vec::with_capacity(terms.len());
    for (n, (coefficient, inits)) in terms.iter().enumerate() {
        if inits.len() != particles {
            return Err(WalkError::Config(format!(
                "term {n} has {} particles, expected {particles}",
                inits.len()
            )));
        }
        let factors = inits
            .iter()
            .map(|&(site, spinor)| WalkerState::new(site, spinor))
            .collect::<Result<Vec<_>>>()?;
        built.push(ProductTerm {
            coefficient: *coefficient,
            factors,
        });
    }
    normalized(particles, statistics, built)
}

/// Superposition of signed coin patterns, all walkers at `site`.
///
/// Repeated patterns accumulate before normalization.
pub fn make_pattern_state(
    particles: usize,
    entries: &[(f64, CoinPattern)],
    site: i64,
    statistics: Statistics,
) -> Result<MultiState> {
    if particles == 0 {
        return Err(WalkError::Config("particle count must be at least 1".into()));
    }
    if entries.is_empty() {
        return Err(WalkError::Config("pattern state needs at least one entry".into()));
    }
    let mut merged: BTreeMap<CoinPattern, f64> = BTreeMap::new();
    for (sign, pattern) in entries {
        if pattern.len() != particles {
            return Err(WalkError::Config(format!(
                "pattern {pattern} has {} labels, expected {particles}",
                pattern.len()
            )));
        }
        *merged.entry(pattern.clone()).or_insert(0.0) += sign;
    }
    let terms = merged
        .into_iter()
        .filter(|(_, weight)| *weight != 0.0)
        .map(|(pattern, weight)| -> Result<ProductTerm> {
            Ok(ProductTerm {
                coefficient: Complex64::new(weight, 0.0),
                factors: pattern
                    .labels()
                    .iter()
                    .map(|label| WalkerState::new(site, label.spinor()))
                    .collect::<Result<Vec<_>>>()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if terms.is_empty() {
        return Err(WalkError::Config(
            "pattern entries cancel to a zero-norm state".into(),
        ));
    }
    normalized(particles, statistics, terms)
}

/// Bell-type coin states at a common site.
///
/// `phi±` is `(|L…L⟩ ± |R…R⟩)/√2`; `psi±` is `(|LRLR…⟩ ± |RLRL…⟩)/√2`.
pub fn make_bell_state(
    particles: usize,
    which: BellKind,
    site: i64,
    statistics: Statistics,
) -> Result<MultiState> {
    if particles < 2 {
        return Err(WalkError::Config(format!(
            "Bell states need at least 2 particles, got {particles}"
        )));
    }
    let (first, second, sign) = match which {
        BellKind::PsiPlus => (alt_l(particles), alt_r(particles), 1.0),
        BellKind::PsiMinus => (alt_l(particles), alt_r(particles), -1.0),
        BellKind::PhiPlus => (all_l(particles), all_r(particles), 1.0),
        BellKind::PhiMinus => (all_l(particles), all_r(particles), -1.0),
    };
    make_pattern_state(particles, &[(1.0, first), (sign, second)], site, statistics)
}

fn alt_l(m: usize) -> CoinPattern {
    CoinPattern::alternating(m, CoinLabel::L)
}

fn alt_r(m: usize) -> CoinPattern {
    CoinPattern::alternating(m, CoinLabel::R)
}

fn all_l(m: usize) -> CoinPattern {
    CoinPattern::uniform(m, CoinLabel::L)
}

fn all_r(m: usize) -> CoinPattern {
    CoinPattern::uniform(m, CoinLabel::R)
}

/// The mixed (non-uniform) patterns entering the symmetrized meeting
/// probability: the alternating patterns and their reverses, deduplicated.
pub fn mixed_patterns(m: usize) -> Vec<CoinPattern> {
    let mut out: Vec<CoinPattern> = Vec::new();
    for p in [alt_l(m), alt_r(m), alt_l(m).reversed(), alt_r(m).reversed()] {
        if !p.is_uniform() && !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

pub fn evolve_all(state: &MultiState, coin: &CoinOperator, steps: usize) -> MultiState {
    state.evolve_all(coin, steps)
}

pub fn joint_amplitude(state: &MultiState, sites: &[i64], pattern: &CoinPattern) -> Result<Complex64> {
    state.joint_amplitude(sites, pattern)
}

pub fn joint_probability(state: &MultiState, sites: &[i64]) -> Result<f64> {
    state.joint_probability(sites)
}

pub fn marginal_distribution(state: &MultiState, index: usize) -> Result<BTreeMap<i64, f64>> {
    state.marginal_distribution(index)
}
