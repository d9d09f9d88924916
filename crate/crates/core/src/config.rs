//! Run configuration documents.
//!
//! Configs are JSON. Omitted fields take defaults: Hadamard coin,
//! distinguishable statistics, every walker at site 0 in `|L⟩`,
//! `epsilon = 0.05`, `tail_fraction = 0.5`, and per-command output file names.
//!
//! ```json
//! {
//!   "command": "localize",
//!   "coin": "swap",
//!   "particles": 2,
//!   "steps": 100,
//!   "bell": { "which": "psi+", "site": 0 },
//!   "localization": { "m0": 0, "epsilon": 0.05, "tail_fraction": 0.5 }
//! }
//! ```

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coin::{make_coin, CoinOperator, CoinSpec};
use crate::error::{Result, WalkError};
use crate::meetloc::{DEFAULT_EPSILON, DEFAULT_TAIL_FRACTION};
use crate::multiwalk::{
    make_bell_state, make_pattern_state, make_product_state, BellKind, CoinLabel, CoinPattern,
    MultiState, ParticleInit, Statistics,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    Meet,
    Localize,
    OracleCheck,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Meet => "meet",
            Command::Localize => "localize",
            Command::OracleCheck => "oracle-check",
        }
    }

    fn default_outputs(self) -> OutputPaths {
        let owned = |s: &str| Some(s.to_string());
        match self {
            Command::Simulate => OutputPaths {
                data: owned("simulate_joint.csv"),
                marginal: owned("simulate_marginal.csv"),
                plot: None,
            },
            Command::Meet => OutputPaths {
                data: owned("meet.csv"),
                marginal: None,
                plot: owned("meet_plot.dat"),
            },
            Command::Localize => OutputPaths {
                data: owned("localize.json"),
                marginal: None,
                plot: None,
            },
            Command::OracleCheck => OutputPaths {
                data: owned("oracle_check.json"),
                marginal: None,
                plot: None,
            },
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Command {
    type Err = WalkError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simulate" => Ok(Command::Simulate),
            "meet" => Ok(Command::Meet),
            "localize" => Ok(Command::Localize),
            "oracle-check" => Ok(Command::OracleCheck),
            other => Err(WalkError::Config(format!("unknown command '{other}'"))),
        }
    }
}

/// A complex number written as `[re, im]`.
pub type ComplexPair = [f64; 2];

fn to_complex([re, im]: ComplexPair) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoinConfig {
    Named(String),
    /// `u_LL, u_LR, u_RL, u_RR`.
    Entries([ComplexPair; 4]),
}

impl CoinConfig {
    pub fn to_spec(&self) -> CoinSpec {
        match self {
            CoinConfig::Named(name) => CoinSpec::Named(name.clone()),
            CoinConfig::Entries(e) => CoinSpec::Entries(e.map(to_complex)),
        }
    }
}

impl Default for CoinConfig {
    fn default() -> Self {
        CoinConfig::Named("hadamard".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BellConfig {
    pub which: String,
    #[serde(default)]
    pub site: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternEntry {
    /// `+1` or `-1`.
    pub sign: i8,
    pub pattern: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternConfig {
    #[serde(default)]
    pub site: i64,
    pub entries: Vec<PatternEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleConfig {
    pub site: i64,
    pub spinor: [ComplexPair; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub coeff: ComplexPair,
    pub particles: Vec<ParticleConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalizationConfig {
    #[serde(default)]
    pub m0: i64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_tail_fraction")]
    pub tail_fraction: f64,
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

fn default_tail_fraction() -> f64 {
    DEFAULT_TAIL_FRACTION
}

impl Default for LocalizationConfig {
    fn default() -> Self {
        LocalizationConfig {
            m0: 0,
            epsilon: DEFAULT_EPSILON,
            tail_fraction: DEFAULT_TAIL_FRACTION,
        }
    }
}

/// Output file names, relative to the `--out` directory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marginal: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot: Option<String>,
}

/// On-disk document shape; every field optional so defaults can be applied.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coin: Option<CoinConfig>,
    particles: Option<usize>,
    steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    statistics: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bell: Option<BellConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    patterns: Option<PatternConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    terms: Option<Vec<TermConfig>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    localization: Option<LocalizationConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output: Option<OutputPaths>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    /// Every walker at site 0 in `|L⟩`.
    Default,
    Bell(BellConfig),
    Patterns(PatternConfig),
    Terms(Vec<TermConfig>),
}

/// A validated run configuration with all defaults filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub coin: CoinConfig,
    pub particles: usize,
    pub steps: usize,
    pub statistics: Statistics,
    pub initial: InitialState,
    pub localization: LocalizationConfig,
    pub output: OutputPaths,
}

fn field_error(field: &str, err: WalkError) -> WalkError {
    let msg = match err {
        WalkError::Config(m) | WalkError::Domain(m) => m,
        other => other.to_string(),
    };
    WalkError::Config(format!("{field}: {msg}"))
}

impl RunConfig {
    pub fn coin_operator(&self) -> Result<CoinOperator> {
        make_coin(&self.coin.to_spec()).map_err(|e| field_error("coin", e))
    }

    /// Builds the `t = 0` state described by the config.
    pub fn initial_state(&self) -> Result<MultiState> {
        let m = self.particles;
        let stats = self.statistics;
        match &self.initial {
            InitialState::Default => {
                let init: Vec<ParticleInit> = vec![(0, CoinLabel::L.spinor()); m];
                make_product_state(m, &[(Complex64::new(1.0, 0.0), init)], stats)
                    .map_err(|e| field_error("particles", e))
            }
            InitialState::Bell(bell) => {
                let which: BellKind = bell.which.parse().map_err(|e| field_error("bell.which", e))?;
                make_bell_state(m, which, bell.site, stats).map_err(|e| field_error("bell", e))
            }
            InitialState::Patterns(cfg) => {
                let mut entries = Vec::with_capacity(cfg.entries.len());
                for (n, entry) in cfg.entries.iter().enumerate() {
                    let sign = match entry.sign {
                        1 => 1.0,
                        -1 => -1.0,
                        other => {
                            return Err(WalkError::Config(format!(
                                "patterns.entries[{n}].sign: expected 1 or -1, got {other}"
                            )))
                        }
                    };
                    let pattern: CoinPattern = entry
                        .pattern
                        .parse()
                        .map_err(|e| field_error(&format!("patterns.entries[{n}].pattern"), e))?;
                    entries.push((sign, pattern));
                }
                make_pattern_state(m, &entries, cfg.site, stats).map_err(|e| field_error("patterns", e))
            }
            InitialState::Terms(terms) => {
                let mut built = Vec::with_capacity(terms.len());
                for (n, term) in terms.iter().enumerate() {
                    let mut inits = Vec::with_capacity(term.particles.len());
                    for (k, p) in term.particles.iter().enumerate() {
                        let spinor = p.spinor.map(to_complex);
                        // Validate each spinor here so the error names its field.
                        crate::walker::WalkerState::new(p.site, spinor).map_err(|e| {
                            field_error(&format!("terms[{n}].particles[{k}].spinor"), e)
                        })?;
                        inits.push((p.site, spinor));
                    }
                    built.push((to_complex(term.coeff), inits));
                }
                make_product_state(m, &built, stats).map_err(|e| field_error("terms", e))
            }
        }
    }

    /// Canonical JSON document; `parse_config` of it yields `self` again.
    pub fn to_json(&self) -> String {
        let (bell, patterns, terms) = match &self.initial {
            InitialState::Default => (None, None, None),
            InitialState::Bell(b) => (Some(b.clone()), None, None),
            InitialState::Patterns(p) => (None, Some(p.clone()), None),
            InitialState::Terms(t) => (None, None, Some(t.clone())),
        };
        let raw = RawConfig {
            command: Some(self.command),
            coin: Some(self.coin.clone()),
            particles: Some(self.particles),
            steps: Some(self.steps),
            statistics: Some(self.statistics.as_str().to_string()),
            bell,
            patterns,
            terms,
            localization: Some(self.localization.clone()),
            output: Some(self.output.clone()),
        };
        serde_json::to_string_pretty(&raw).expect("config serializes")
    }
}

/// Parses a config document that must name its own command.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_for(text, None)
}

/// Parses a config document. `command` comes from the command line; when the
/// document also names one, the two must agree.
pub fn parse_config_for(text: &str, command: Option<Command>) -> Result<RunConfig> {
    let raw: RawConfig = serde_json::from_str(text)
        .map_err(|e| WalkError::Config(format!("invalid config document: {e}")))?;

    let command = match (raw.command, command) {
        (Some(doc), Some(cli)) if doc != cli => {
            return Err(WalkError::Config(format!(
                "command: document says '{doc}' but '{cli}' was requested"
            )))
        }
        (Some(c), _) | (None, Some(c)) => c,
        (None, None) => return Err(WalkError::Config("command: missing".into())),
    };
    let particles = raw
        .particles
        .ok_or_else(|| WalkError::Config("particles: missing".into()))?;
    if particles == 0 {
        return Err(WalkError::Config("particles: must be at least 1".into()));
    }
    let steps = raw
        .steps
        .ok_or_else(|| WalkError::Config("steps: missing".into()))?;
    let statistics = match &raw.statistics {
        Some(s) => s.parse().map_err(|e| field_error("statistics", e))?,
        None => Statistics::Distinguishable,
    };

    let forms = [raw.bell.is_some(), raw.patterns.is_some(), raw.terms.is_some()];
    if forms.iter().filter(|&&f| f).count() > 1 {
        return Err(WalkError::Config(
            "initial state: exactly one initial-state form (bell, patterns or terms) may be given".into(),
        ));
    }
    let initial = if let Some(b) = raw.bell {
        InitialState::Bell(b)
    } else if let Some(p) = raw.patterns {
        InitialState::Patterns(p)
    } else if let Some(t) = raw.terms {
        InitialState::Terms(t)
    } else {
        InitialState::Default
    };

    let localization = raw.localization.unwrap_or_default();
    if !(localization.epsilon > 0.0 && localization.epsilon < 1.0) {
        return Err(WalkError::Config(format!(
            "localization.epsilon: {} outside (0, 1)",
            localization.epsilon
        )));
    }
    if !(localization.tail_fraction > 0.0 && localization.tail_fraction <= 1.0) {
        return Err(WalkError::Config(format!(
            "localization.tail_fraction: {} outside (0, 1]",
            localization.tail_fraction
        )));
    }

    let defaults = command.default_outputs();
    let given = raw.output.unwrap_or_default();
    let output = OutputPaths {
        data: given.data.or(defaults.data),
        marginal: given.marginal.or(defaults.marginal),
        plot: given.plot.or(defaults.plot),
    };

    let config = RunConfig {
        command,
        coin: raw.coin.unwrap_or_default(),
        particles,
        steps,
        statistics,
        initial,
        localization,
        output,
    };
    config.coin_operator()?;
    config.initial_state()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config_msg(text: &str) -> String {
        match parse_config(text) {
            Err(WalkError::Config(m)) => m,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_document_gets_defaults() {
        let cfg = parse_config(r#"{"command": "simulate", "particles": 1, "steps": 2}"#).unwrap();
        assert_eq!(cfg.command, Command::Simulate);
        assert_eq!(cfg.coin, CoinConfig::Named("hadamard".into()));
        assert_eq!(cfg.statistics, Statistics::Distinguishable);
        assert_eq!(cfg.initial, InitialState::Default);
        assert_eq!(cfg.localization.epsilon, 0.05);
        assert_eq!(cfg.localization.tail_fraction, 0.5);
        assert_eq!(cfg.output.data.as_deref(), Some("simulate_joint.csv"));
    }

    #[test]
    fn non_unitary_coin() {
        let msg = config_msg(
            r#"{"command": "simulate", "particles": 1, "steps": 2,
                "coin": [[1,0],[0,0],[0,0],[0.5,0]]}"#,
        );
        assert!(msg.contains("coin not unitary"), "{msg}");
        assert!(msg.starts_with("coin:"));
    }

    #[test]
    fn two_initial_forms() {
        let msg = config_msg(
            r#"{"command": "meet", "particles": 2, "steps": 2,
                "bell": {"which": "psi+"},
                "terms": [{"coeff": [1,0], "particles": [
                    {"site": 0, "spinor": [[1,0],[0,0]]}, {"site": 0, "spinor": [[1,0],[0,0]]}]}]}"#,
        );
        assert!(msg.contains("exactly one initial-state form"), "{msg}");
    }

    #[test]
    fn syntax_error_reports_position() {
        let msg = config_msg("{\n  \"command\": \"meet\",\n  \"particles\": 2,,\n}");
        assert!(msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn unknown_field_is_named() {
        let msg = config_msg(r#"{"command": "meet", "particles": 2, "steps": 2, "stpes": 3}"#);
        assert!(msg.contains("stpes"), "{msg}");
    }

    #[test]
    fn bad_spinor_names_field() {
        let msg = config_msg(
            r#"{"command": "meet", "particles": 1, "steps": 2,
                "terms": [{"coeff": [1,0], "particles": [{"site": 0, "spinor": [[1,0],[1,0]]}]}]}"#,
        );
        assert!(msg.starts_with("terms[0].particles[0].spinor"), "{msg}");
    }

    #[test]
    fn range_checks() {
        assert!(config_msg(r#"{"command": "meet", "particles": 0, "steps": 2}"#).starts_with("particles"));
        assert!(config_msg(r#"{"command": "meet", "particles": 2, "steps": -1}"#).contains("invalid"));
        assert!(config_msg(
            r#"{"command": "localize", "particles": 2, "steps": 9, "localization": {"epsilon": 1.0}}"#
        )
        .starts_with("localization.epsilon"));
        assert!(config_msg(
            r#"{"command": "localize", "particles": 2, "steps": 9, "localization": {"tail_fraction": 0}}"#
        )
        .starts_with("localization.tail_fraction"));
        assert!(config_msg(r#"{"command": "meet", "particles": 1, "steps": 2, "bell": {"which": "psi+"}}"#)
            .starts_with("bell"));
        assert!(config_msg(r#"{"command": "meet", "particles": 2, "steps": 2, "statistics": "anyons"}"#)
            .starts_with("statistics"));
    }

    #[test]
    fn command_must_agree() {
        let text = r#"{"command": "meet", "particles": 2, "steps": 2}"#;
        assert!(parse_config_for(text, Some(Command::Localize)).is_err());
        assert!(parse_config_for(text, Some(Command::Meet)).is_ok());
        let text = r#"{"particles": 2, "steps": 2}"#;
        assert_eq!(parse_config_for(text, Some(Command::OracleCheck)).unwrap().command, Command::OracleCheck);
        assert!(parse_config(text).is_err());
    }

    #[test]
    fn pattern_form() {
        let cfg = parse_config(
            r#"{"command": "meet", "particles": 2, "steps": 2,
                "patterns": {"site": 1, "entries": [{"sign": 1, "pattern": "LR"}, {"sign": -1, "pattern": "RL"}]}}"#,
        )
        .unwrap();
        let state = cfg.initial_state().unwrap();
        assert_eq!(state.terms().len(), 2);
        assert!(config_msg(
            r#"{"command": "meet", "particles": 2, "steps": 2,
                "patterns": {"entries": [{"sign": 2, "pattern": "LR"}]}}"#
        )
        .contains("sign"));
    }
}
