//! 2×2 unitary coin operators.
//!
//! Entries are indexed by (output label, input label), so the coin maps a
//! spinor `(a_L, a_R)` to `(u_LL a_L + u_LR a_R, u_RL a_L + u_RR a_R)`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Result, WalkError};

/// Tolerance on `U†U − I` (max-abs entry) accepted as unitary.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Internal (coin) state amplitudes, ordered `[L, R]`.
pub type Spinor = [Complex64; 2];

#[derive(Clone, Copy, PartialEq)]
pub struct CoinOperator {
    entries: [[Complex64; 2]; 2],
    name: Option<&'static str>,
}

/// How a coin is requested: by name or by its four entries in row-major
/// order `u_LL, u_LR, u_RL, u_RR`.
#[derive(Debug, Clone, PartialEq)]
pub enum CoinSpec {
    Named(String),
    Entries([Complex64; 4]),
}

impl CoinOperator {
    /// Builds a coin from explicit entries, rejecting non-unitary matrices.
    pub fn from_entries(entries: [[Complex64; 2]; 2]) -> Result<Self> {
        let coin = CoinOperator {
            entries,
            name: None,
        };
        let deviation = coin.unitarity_deviation();
        if !(deviation <= UNITARITY_TOL) {
            return Err(WalkError::Config(format!(
                "coin not unitary (max |U†U - I| entry = {deviation:.3e})"
            )));
        }
        Ok(coin)
    }

    pub fn hadamard() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        CoinOperator {
            entries: [[h, h], [h, -h]],
            name: Some("hadamard"),
        }
    }

    pub fn identity() -> Self {
        let (one, zero) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        CoinOperator {
            entries: [[one, zero], [zero, one]],
            name: Some("identity"),
        }
    }

    pub fn swap() -> Self {
        let (one, zero) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        CoinOperator {
            entries: [[zero, one], [one, zero]],
            name: Some("swap"),
        }
    }

    pub fn named(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "hadamard" => Ok(Self::hadamard()),
            "identity" => Ok(Self::identity()),
            "swap" => Ok(Self::swap()),
            other => Err(WalkError::Config(format!(
                "unknown coin name '{other}' (expected hadamard, identity or swap)"
            ))),
        }
    }

    pub fn entries(&self) -> &[[Complex64; 2]; 2] {
        &self.entries
    }

    pub fn name(&self) -> Option<&'static str> {
        self.name
    }

    /// Max-abs entry of `U†U − I`.
    pub fn unitarity_deviation(&self) -> f64 {
        let u = &self.entries;
        let mut worst = 0.0_f64;
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..2 {
                    acc += u[k][i].conj() * u[k][j];
                }
                if i == j {
                    acc -= 1.0;
                }
                let dev = acc.norm();
                if dev.is_nan() {
                    return f64::INFINITY;
                }
                worst = worst.max(dev);
            }
        }
        worst
    }

    #[inline]
    pub fn apply(&self, spinor: &Spinor) -> Spinor {
        let u = &self.entries;
        [
            u[0][0] * spinor[0] + u[0][1] * spinor[1],
            u[1][0] * spinor[0] + u[1][1] * spinor[1],
        ]
    }
}

impl fmt::Debug for CoinOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoinOperator")
            .field("name", &self.name)
            .field("entries", &self.entries)
            .finish()
    }
}

/// Resolves a [`CoinSpec`] into a validated coin.
pub fn make_coin(spec: &CoinSpec) -> Result<CoinOperator> {
    match spec {
        CoinSpec::Named(name) => CoinOperator::named(name),
        CoinSpec::Entries([ll, lr, rl, rr]) => CoinOperator::from_entries([[*ll, *lr], [*rl, *rr]]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn hadamard_entries() {
        let h = make_coin(&CoinSpec::Named("hadamard".into())).unwrap();
        let e = h.entries();
        for row in e {
            for v in row {
                assert!((v.norm() - FRAC_1_SQRT_2).abs() < 1e-15);
            }
        }
        assert!((e[1][1] - c(-FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!(h.unitarity_deviation() < 1e-15);
    }

    #[test]
    fn identity_leaves_spinor_alone() {
        let id = make_coin(&CoinSpec::Named("identity".into())).unwrap();
        let s = [Complex64::new(0.3, -0.1), Complex64::new(0.2, 0.9)];
        assert_eq!(id.apply(&s), s);
    }

    #[test]
    fn swap_exchanges_labels() {
        let sw = CoinOperator::swap();
        assert_eq!(sw.apply(&[c(1.0), c(0.0)]), [c(0.0), c(1.0)]);
    }

    #[test]
    fn rejects_non_unitary() {
        let err = make_coin(&CoinSpec::Entries([c(1.0), c(0.0), c(0.0), c(0.5)])).unwrap_err();
        assert!(matches!(err, WalkError::Config(ref m) if m.contains("not unitary")));
    }

    #[test]
    fn rejects_nan_entries() {
        assert!(make_coin(&CoinSpec::Entries([c(f64::NAN), c(0.0), c(0.0), c(1.0)])).is_err());
    }

    #[test]
    fn accepts_complex_unitary() {
        let i = Complex64::new(0.0, FRAC_1_SQRT_2);
        let coin = make_coin(&CoinSpec::Entries([c(FRAC_1_SQRT_2), i, i, c(FRAC_1_SQRT_2)])).unwrap();
        assert!(coin.name().is_none());
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(
            make_coin(&CoinSpec::Named("grover".into())),
            Err(WalkError::Config(_))
        ));
    }
}
