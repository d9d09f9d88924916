//! Meeting probabilities and the long-time localization estimate.
//!
//! The stationary profile is estimated by a Cesàro average over a trailing
//! window of the meeting series, because the pointwise limit generally does
//! not exist for oscillating amplitudes.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::coin::CoinOperator;
use crate::error::{Result, WalkError};
use crate::multiwalk::{mixed_patterns, CoinLabel, CoinPattern, MultiState, Statistics};

/// Slack allowed above 1 for stored probabilities.
pub const PROBABILITY_SLACK: f64 = 1e-10;

pub const DEFAULT_EPSILON: f64 = 0.05;
pub const DEFAULT_TAIL_FRACTION: f64 = 0.5;

/// Probability that all walkers are found at `site`.
///
/// Distinguishable walkers use `Σ_k |ψ_k(m,…,m)|²`. Bosons use
/// `M|ψ_{L…L}|² + M|ψ_{R…R}|² + |Σ_p ψ_p|²` and fermions `|ψ_{p_0} − Σ_{p≠p_0} ψ_p|²`,
/// where `p` runs over the mixed alternating patterns (see [`mixed_patterns`]).
pub fn meeting_probability(state: &MultiState, site: i64) -> f64 {
    let m = state.particles();
    let sites = vec![site; m];
    let amp = |p: &CoinPattern| state.amplitude_unchecked(&sites, p.labels());
    match state.statistics() {
        Statistics::Distinguishable => CoinPattern::all(m).map(|p| amp(&p).norm_sqr()).sum(),
        Statistics::Bosonic => {
            let weight = m as f64;
            let uniform = weight * amp(&CoinPattern::uniform(m, CoinLabel::L)).norm_sqr()
                + weight * amp(&CoinPattern::uniform(m, CoinLabel::R)).norm_sqr();
            let mixed: Complex64 = mixed_patterns(m).iter().map(amp).sum();
            uniform + mixed.norm_sqr()
        }
        Statistics::Fermionic => {
            let mixed: Complex64 = mixed_patterns(m)
                .iter()
                .enumerate()
                .map(|(n, p)| if n == 0 { amp(p) } else { -amp(p) })
                .sum();
            mixed.norm_sqr()
        }
    }
}

/// Sites where all walkers can meet: parity-allowed in every factor of at least one term.
fn meeting_sites(state: &MultiState) -> Vec<i64> {
    let (lo, hi) = state.site_bounds();
    let m = state.particles();
    (lo..=hi)
        .filter(|&site| state.supports(&vec![site; m]))
        .collect()
}

/// Meeting probability on one time slice, per site and summed.
#[derive(Debug, Clone, PartialEq)]
pub struct MeetingProfile {
    pub sites: BTreeMap<i64, f64>,
    pub total: f64,
}

pub fn meeting_profile(state: &MultiState) -> MeetingProfile {
    let sites: BTreeMap<i64, f64> = meeting_sites(state)
        .into_iter()
        .map(|site| (site, meeting_probability(state, site)))
        .collect();
    let total = sites.values().sum();
    MeetingProfile { sites, total }
}

/// Meeting profiles for `t = 0..=T`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeetingSeries {
    profiles: Vec<MeetingProfile>,
}

impl MeetingSeries {
    /// Wraps precomputed profiles, enforcing the `[0, 1 + slack]` bounds.
    pub fn from_profiles(profiles: Vec<MeetingProfile>) -> Result<Self> {
        if profiles.is_empty() {
            return Err(WalkError::Domain("meeting series needs at least one profile".into()));
        }
        for (t, profile) in profiles.iter().enumerate() {
            let bad = profile
                .sites.values().map(|p| *p)
                .chain(std::iter::once(profile.total))
                .find(|p| !(*p >= 0.0 && *p <= 1.0 + PROBABILITY_SLACK));
            if let Some(p) = bad {
                return Err(WalkError::Numerical(format!(
                    "meeting probability {p} at t = {t} outside [0, 1]"
                )));
            }
        }
        Ok(MeetingSeries { profiles })
    }

    /// Horizon `T`; the series holds `T + 1` profiles.
    pub fn horizon(&self) -> usize {
        self.profiles.len() - 1
    }

    pub fn profiles(&self) -> &[MeetingProfile] {
        &self.profiles
    }

    pub fn totals(&self) -> Vec<f64> {
        self.profiles.iter().map(|p| p.total).collect()
    }

    /// Meeting probability at `site` and time `t`; zero where the site is not in the profile.
    pub fn at(&self, t: usize, site: i64) -> f64 {
        self.profiles[t].sites.get(&site).copied().unwrap_or(0.0)
    }
}

/// Evolves `initial` once, step by step, recording the profile at every `t ≤ horizon`.
pub fn meeting_series(initial: &MultiState, coin: &CoinOperator, horizon: usize) -> Result<MeetingSeries> {
    let mut state = initial.clone();
    let mut profiles = Vec::with_capacity(horizon + 1);
    profiles.push(meeting_profile(&state));
    for _ in 0..horizon {
        state = state.step_all(coin);
        profiles.push(meeting_profile(&state));
    }
    MeetingSeries::from_profiles(profiles)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryEstimate {
    pub sites: BTreeMap<i64, f64>,
    pub total: f64,
    /// Mean of the later half of the window over the earlier half; 0/0 is 1.
    pub trend: f64,
    /// Inclusive time bounds of the averaging window.
    pub window: (usize, usize),
}

/// Running mean `m_k = m_{k-1} + (x_k - m_{k-1}) / k`; exact for constant input.
fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let mut avg = 0.0;
    for (k, v) in values.enumerate() {
        avg += (v - avg) / (k + 1) as f64;
    }
    avg
}

/// Cesàro average over `t ∈ [⌈(1 − tail_fraction)·T⌉, T]`.
pub fn stationary_estimate(series: &MeetingSeries, tail_fraction: f64) -> Result<StationaryEstimate> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(WalkError::Domain(format!(
            "tail fraction {tail_fraction} outside (0, 1]"
        )));
    }
    let horizon = series.horizon();
    if horizon < 4 {
        return Err(WalkError::Domain(format!(
            "horizon {horizon} too short for a stationary estimate (need at least 4)"
        )));
    }
    // The small offset keeps e.g. (1 - 0.1) * 10 = 9.000000000000002 from rounding up to 10.
    let lo = ((1.0 - tail_fraction) * horizon as f64 - 1e-9).ceil().max(0.0) as usize;
    let lo = lo.min(horizon);
    if horizon - lo < 1 {
        return Err(WalkError::Domain(format!(
            "tail fraction {tail_fraction} leaves fewer than two samples"
        )));
    }
    let window = &series.profiles()[lo..=horizon];
    let keys: std::collections::BTreeSet<i64> =
        window.iter().flat_map(|p| p.sites.keys().copied()).collect();
    let sites: BTreeMap<i64, f64> = keys
        .into_iter()
        .map(|site| {
            let avg = mean(window.iter().map(|p| p.sites.get(&site).copied().unwrap_or(0.0)));
            (site, avg)
        })
        .collect();
    let total = mean(window.iter().map(|p| p.total));

    let half = window.len() / 2;
    let earlier = mean(window[..half].iter().map(|p| p.total));
    let later = mean(window[half..].iter().map(|p| p.total));
    let trend = if earlier == 0.0 && later == 0.0 {
        1.0
    } else {
        later / earlier
    };

    Ok(StationaryEstimate {
        sites,
        total,
        trend,
        window: (lo, horizon),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationReport {
    pub m0: i64,
    pub estimate: f64,
    pub total_estimate: f64,
    pub epsilon: f64,
    pub window: (usize, usize),
    pub trend: f64,
    /// `estimate ≥ epsilon`.
    pub localized: bool,
}

pub fn localization_report(
    series: &MeetingSeries,
    m0: i64,
    epsilon: f64,
    tail_fraction: f64,
) -> Result<LocalizationReport> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(WalkError::Domain(format!("threshold {epsilon} outside (0, 1)")));
    }
    let estimate = stationary_estimate(series, tail_fraction)?;
    let at_m0 = estimate.sites.get(&m0).copied().unwrap_or(0.0);
    Ok(LocalizationReport {
        m0,
        estimate: at_m0,
        total_estimate: estimate.total,
        epsilon,
        window: estimate.window,
        trend: estimate.trend,
        localized: at_m0 >= epsilon,
    })
}
