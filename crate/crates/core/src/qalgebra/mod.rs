//! Representation theory of `U_q(sl_2)` at `q = exp(i gamma)`.
//!
//! Spins are stored as twice their value so half-integers stay exact.
//! Single-site bases are ordered `omega_S, omega_{S-1}, ..., omega_{-S}` and
//! tensor products are lexicographic with site 1 the slowest index.

mod casimir;
mod operator;
mod rep;
mod rmatrix;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use casimir::{
    coproduct_action, isotypic_projectors, multiplicities, projector, singlet_projector,
    singlet_vector, tensor_casimir, tensor_casimir_closed_form, total_casimir, Generator,
    IsotypicComponent, IsotypicData,
};
pub use operator::{
    apply_pair_left, basis_digits, embed_pair, embed_pair_into, permutation_operator,
    site_permutation, total_weights_twice, weight_sectors, ChainOperator,
};
pub use rep::SpinRep;
pub use rmatrix::{r_matrix, r_matrix_fused, FusedFactor, RSign};

/// Magnitude below which a q-number denominator is treated as zero.
pub const SINGULAR_EPS: f64 = 1e-8;

/// A spin label `S` stored as the integer `2S`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spin(u32);

impl Spin {
    pub const HALF: Spin = Spin(1);
    pub const ONE: Spin = Spin(2);
    pub const THREE_HALVES: Spin = Spin(3);

    pub fn from_twice(twice: u32) -> Self {
        Spin(twice)
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Dimension `2S + 1` of the irreducible module.
    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }

    pub fn is_integer(self) -> bool {
        self.0.is_multiple_of(2)
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for Spin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || {
            Error::Parse(format!(
                "invalid spin `{s}` (expected e.g. \"1/2\", \"1\", \"3/2\")"
            ))
        };
        let twice = match s.split_once('/') {
            Some((num, den)) => {
                let num: u32 = num.trim().parse().map_err(|_| bad())?;
                match den.trim() {
                    "2" => num,
                    "1" => 2 * num,
                    _ => return Err(bad()),
                }
            }
            None => 2 * s.parse::<u32>().map_err(|_| bad())?,
        };
        if twice == 0 {
            return Err(Error::Parse("spin must be positive".into()));
        }
        Ok(Spin(twice))
    }
}

impl Serialize for Spin {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Spin {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(u32),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Int(0) => Err(serde::de::Error::custom("spin must be positive")),
            Raw::Int(n) => Ok(Spin(2 * n)),
        }
    }
}

/// Deformation `q = exp(i gamma)` together with the site spin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeformationParams {
    pub gamma: f64,
    pub spin: Spin,
}

impl DeformationParams {
    pub fn new(spin: Spin, gamma: f64) -> Self {
        Self { gamma, spin }
    }

    pub fn q(&self) -> crate::linalg::C64 {
        crate::linalg::phase(self.gamma)
    }

    /// `2S |gamma| < pi`, the range where the representation is unitary-like.
    pub fn check_range(&self) -> Result<()> {
        if !self.gamma.is_finite() {
            return Err(Error::Domain(format!(
                "gamma = {} is not finite",
                self.gamma
            )));
        }
        if self.spin.twice() as f64 * self.gamma.abs() >= std::f64::consts::PI {
            return Err(Error::Domain(format!(
                "2S|gamma| = {} must be below pi (S = {}, gamma = {})",
                self.spin.twice() as f64 * self.gamma.abs(),
                self.spin,
                self.gamma
            )));
        }
        Ok(())
    }
}

/// The q-number `[t] = sin(gamma t) / sin(gamma)`, equal to `t` at `gamma = 0`.
pub fn q_number(t: f64, gamma: f64) -> f64 {
    if gamma == 0.0 {
        t
    } else {
        (gamma * t).sin() / gamma.sin()
    }
}

/// `{t} = 2 cos(gamma t)`.
pub fn q_bracket(t: f64, gamma: f64) -> f64 {
    2.0 * (gamma * t).cos()
}

/// `[n]! = [1][2]...[n]`.
pub fn q_factorial(n: usize, gamma: f64) -> f64 {
    (1..=n).map(|k| q_number(k as f64, gamma)).product()
}

/// Fails with `SingularGamma` when `|value| <= SINGULAR_EPS`.
pub(crate) fn guard_denominator(
    value: f64,
    gamma: f64,
    what: impl FnOnce() -> String,
) -> Result<f64> {
    if value.abs() <= SINGULAR_EPS || !value.is_finite() {
        Err(Error::SingularGamma {
            gamma,
            what: what(),
        })
    } else {
        Ok(value)
    }
}
