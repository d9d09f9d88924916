//! Command execution and deterministic output files.
//!
//! Probabilities are printed in fixed notation with 15 decimals, rows are
//! sorted by time then site, and JSON keys are emitted in sorted order, so
//! repeated runs of one config produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::config::{Command, RunConfig};
use crate::error::{Result, WalkError};
use crate::meetloc::{localization_report, meeting_series, MeetingSeries};
use crate::multiwalk::{MultiState, Statistics};
use crate::oracle::{compare_engines, ENGINE_TOL};

/// Allowed drift of the distinguishable-sector norm during `simulate`.
pub const NORM_GATE: f64 = 1e-10;

/// Upper bound on site tuples enumerated per time step by `simulate`.
const MAX_TUPLES_PER_STEP: u128 = 10_000_000;

/// Fixed-point probability format shared by every text output.
pub fn format_probability(p: f64) -> String {
    // Adding 0.0 turns -0.0 into 0.0.
    format!("{:.15}", p + 0.0)
}

/// What a successful run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    /// `false` when the run completed but failed its own check (oracle-check above tolerance).
    pub passed: bool,
    pub summary: String,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| WalkError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn output_path(dir: &Path, name: &Option<String>) -> Option<PathBuf> {
    name.as_ref().map(|n| dir.join(n))
}

pub fn run(config: &RunConfig, out_dir: &Path) -> Result<RunOutcome> {
    match config.command {
        Command::Simulate => run_simulate(config, out_dir),
        Command::Meet => run_meet(config, out_dir),
        Command::Localize => run_localize(config, out_dir),
        Command::OracleCheck => run_oracle_check(config, out_dir),
    }
}

fn check_norm(state: &MultiState) -> Result<()> {
    let norm = state.norm_sqr();
    if (norm - 1.0).abs() > NORM_GATE {
        return Err(WalkError::Numerical(format!(
            "norm drifted to {norm} at t = {}",
            state.time()
        )));
    }
    Ok(())
}

/// Visits every site tuple of `state` with structural support, in lexicographic order.
fn for_each_supported_tuple(state: &MultiState, mut visit: impl FnMut(&[i64]) -> Result<()>) -> Result<()> {
    let m = state.particles();
    let (lo, hi) = state.site_bounds();
    let span = (hi - lo + 1) as u128;
    if span.checked_pow(m as u32).is_none_or(|n| n > MAX_TUPLES_PER_STEP) {
        return Err(WalkError::Resource(format!(
            "joint table for M = {m} over {span} sites is too large to write"
        )));
    }
    let mut sites = vec![lo; m];
    loop {
        if state.supports(&sites) {
            visit(&sites)?;
        }
        let mut axis = m;
        loop {
            if axis == 0 {
                return Ok(());
            }
            axis -= 1;
            if sites[axis] < hi {
                sites[axis] += 1;
                break;
            }
            sites[axis] = lo;
        }
    }
}

fn run_simulate(config: &RunConfig, out_dir: &Path) -> Result<RunOutcome> {
    let coin = config.coin_operator()?;
    let mut state = config.initial_state()?;
    let m = state.particles();
    let symmetric = state.statistics() != Statistics::Distinguishable;

    let mut joint = String::from("t");
    for i in 1..=m {
        let _ = write!(joint, ",m{i}");
    }
    joint.push_str(",probability\n");
    let mut marginal = String::from("t,particle,site,probability\n");

    for t in 0..=config.steps {
        if t > 0 {
            state = state.step_all(&coin);
        }
        check_norm(&state)?;
        for_each_supported_tuple(&state, |sites| {
            if symmetric && !sites.windows(2).all(|w| w[0] > w[1]) {
                return Ok(());
            }
            let p = state.joint_probability(sites)?;
            let _ = write!(joint, "{t}");
            for s in sites {
                let _ = write!(joint, ",{s}");
            }
            let _ = writeln!(joint, ",{}", format_probability(p));
            Ok(())
        })?;
        if !symmetric {
            for i in 1..=m {
                for (site, p) in state.marginal_distribution(i)? {
                    let _ = writeln!(marginal, "{t},{i},{site},{}", format_probability(p));
                }
            }
        }
    }

    let mut files = Vec::new();
    if let Some(path) = output_path(out_dir, &config.output.data) {
        write_file(&path, &joint)?;
        files.push(path);
    }
    if !symmetric {
        if let Some(path) = output_path(out_dir, &config.output.marginal) {
            write_file(&path, &marginal)?;
            files.push(path);
        }
    }
    Ok(RunOutcome {
        files,
        passed: true,
        summary: format!("simulated M = {m} for {} steps", config.steps),
    })
}

/// `t,site,meeting_prob` rows, with a `t,*,total` row closing each time slice.
pub fn meeting_csv(series: &MeetingSeries) -> String {
    let mut out = String::from("t,site,meeting_prob\n");
    for (t, profile) in series.profiles().iter().enumerate() {
        for (site, p) in &profile.sites {
            let _ = writeln!(out, "{t},{site},{}", format_probability(*p));
        }
        let _ = writeln!(out, "{t},*,{}", format_probability(profile.total));
    }
    out
}

/// Two whitespace-separated columns: `t` and the total meeting probability.
pub fn plot_data(series: &MeetingSeries) -> String {
    let mut out = String::new();
    for (t, total) in series.totals().into_iter().enumerate() {
        let _ = writeln!(out, "{t} {}", format_probability(total));
    }
    out
}

pub fn emit_plot_data(series: &MeetingSeries, path: &Path) -> Result<()> {
    write_file(path, &plot_data(series))
}

fn run_meet(config: &RunConfig, out_dir: &Path) -> Result<RunOutcome> {
    let coin = config.coin_operator()?;
    let state = config.initial_state()?;
    let series = meeting_series(&state, &coin, config.steps)?;
    let mut files = Vec::new();
    if let Some(path) = output_path(out_dir, &config.output.data) {
        write_file(&path, &meeting_csv(&series))?;
        files.push(path);
    }
    if let Some(path) = output_path(out_dir, &config.output.plot) {
        emit_plot_data(&series, &path)?;
        files.push(path);
    }
    let last = series.totals().last().copied().unwrap_or(0.0);
    Ok(RunOutcome {
        files,
        passed: true,
        summary: format!("meeting total at t = {}: {}", series.horizon(), format_probability(last)),
    })
}

fn run_localize(config: &RunConfig, out_dir: &Path) -> Result<RunOutcome> {
    let coin = config.coin_operator()?;
    let state = config.initial_state()?;
    let series = meeting_series(&state, &coin, config.steps)?;
    let loc = &config.localization;
    let report = localization_report(&series, loc.m0, loc.epsilon, loc.tail_fraction)?;
    // serde_json's default map is ordered, so keys come out sorted.
    let doc = json!({
        "m0": report.m0,
        "estimate": report.estimate,
        "total_estimate": report.total_estimate,
        "trend": report.trend,
        "epsilon": report.epsilon,
        "window": [report.window.0, report.window.1],
        "decision": report.localized,
    });
    let text = serde_json::to_string_pretty(&doc).expect("report serializes") + "\n";
    let mut files = Vec::new();
    if let Some(path) = output_path(out_dir, &config.output.data) {
        write_file(&path, &text)?;
        files.push(path);
    }
    if let Some(path) = output_path(out_dir, &config.output.plot) {
        emit_plot_data(&series, &path)?;
        files.push(path);
    }
    Ok(RunOutcome {
        files,
        passed: true,
        summary: format!(
            "localization at m0 = {}: estimate {} (epsilon {}), decision {}",
            report.m0,
            format_probability(report.estimate),
            report.epsilon,
            report.localized
        ),
    })
}

fn run_oracle_check(config: &RunConfig, out_dir: &Path) -> Result<RunOutcome> {
    let coin = config.coin_operator()?;
    let state = config.initial_state()?;
    let deviation = compare_engines(&state, &coin, config.steps)?;
    let passed = deviation <= ENGINE_TOL;
    let doc = json!({
        "deviation": deviation,
        "tolerance": ENGINE_TOL,
        "passed": passed,
        "particles": config.particles,
        "steps": config.steps,
        "statistics": config.statistics.as_str(),
    });
    let text = serde_json::to_string_pretty(&doc).expect("summary serializes") + "\n";
    let mut files = Vec::new();
    if let Some(path) = output_path(out_dir, &config.output.data) {
        write_file(&path, &text)?;
        files.push(path);
    }
    Ok(RunOutcome {
        files,
        passed,
        summary: format!("max deviation {deviation:.3e} (tolerance {ENGINE_TOL:e})"),
    })
}
