//! Exact simulation of non-interacting M-particle discrete-time quantum walks
//! on the integer line.
//!
//! - [`coin`] and [`walker`]: 2×2 unitary coins and the single-particle walk.
//! - [`multiwalk`]: separable, entangled and Bell-type M-particle states with
//!   distinguishable, bosonic or fermionic statistics.
//! - [`meetloc`]: meeting probabilities and Cesàro estimates of the long-time
//!   meeting profile used to decide localization.
//! - [`oracle`]: a dense brute-force engine used to cross-check everything else.
//! - [`config`] and [`run`]: the JSON-driven command-line front end.

pub mod coin;
pub mod config;
pub mod error;
pub mod meetloc;
pub mod multiwalk;
pub mod oracle;
pub mod run;
pub mod walker;

pub use coin::{make_coin, CoinOperator, CoinSpec, Spinor};
pub use error::{Result, WalkError};
pub use meetloc::{
    localization_report, meeting_probability, meeting_profile, meeting_series, stationary_estimate,
    LocalizationReport, MeetingProfile, MeetingSeries, StationaryEstimate,
};
pub use multiwalk::{
    make_bell_state, make_pattern_state, make_product_state, BellKind, CoinLabel, CoinPattern,
    MultiState, ProductTerm, Statistics,
};
pub use oracle::{compare_engines, dense_init, DenseJointState};
pub use walker::{init_walker, WalkerState};
