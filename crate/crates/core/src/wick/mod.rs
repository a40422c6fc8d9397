//! Gaussian moments of matrix-entry monomials and trace invariants via Wick
//! contraction, for the real, complex and complex-symmetric ensembles.
//!
//! Every elementary contraction carries `1/N`, so `<(M M^dagger)_{ij}> =
//! delta_ij` for the real and complex ensembles; the two-term COE rule gives
//! `(N + 1)/N delta_ij`.

mod expansion;
mod invariant;
mod kernel;
mod moments;
mod monomial;

pub use expansion::{DeltaExpansion, DeltaPattern};
pub use invariant::GramClassExpansion;
pub use kernel::{Factor, Integrand};
pub use moments::{
    connected_moment, elementary_contraction, gaussian_entry_moment, gaussian_moment,
    gaussian_trace_moment, gram_delta_product, gram_entries,
};
pub(crate) use moments::cumulant;
pub use monomial::{Label, MonomialSpec, Slot};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Polynomial, RationalFunction};
use crate::combinatorics::PairingKind;

/// Target ensemble; fixes the contraction rule and the adjoint used in
/// invariants (`M^T`, `M^dagger`, or `S^*` for symmetric `S`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    /// Real Gaussian matrices standing in for Haar O(N).
    Orthogonal,
    /// Complex Gaussian matrices standing in for Haar U(N).
    Unitary,
    /// Complex symmetric Gaussian matrices standing in for the COE, with
    /// `<conj(S_ij) S_kl> = (d_ik d_jl + d_il d_jk) / N`.
    Coe,
    /// As [`Ensemble::Coe`] with the contraction divided by `N + 1`
    /// instead, so that `<(S S^*)_{ij}> = delta_ij`.
    CoeNormalized,
}

impl Ensemble {
    pub const ALL: [Ensemble; 4] =
        [Ensemble::Orthogonal, Ensemble::Unitary, Ensemble::Coe, Ensemble::CoeNormalized];

    pub fn pairing_kind(self) -> PairingKind {
        match self {
            Ensemble::Orthogonal => PairingKind::Perfect,
            _ => PairingKind::Bipartite,
        }
    }

    /// Symmetric matrices, contracted with the two-term rule.
    pub fn is_symmetric(self) -> bool {
        matches!(self, Ensemble::Coe | Ensemble::CoeNormalized)
    }

    /// The factor carried by every elementary contraction.
    pub fn variance(self) -> RationalFunction {
        match self {
            Ensemble::CoeNormalized => RationalFunction::new(Polynomial::one(), Polynomial::from_i64s(&[1, 1]))
                .expect("N + 1 is nonzero"),
            _ => RationalFunction::n_pow(-1),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Ensemble::Orthogonal => "orthogonal",
            Ensemble::Unitary => "unitary",
            Ensemble::Coe => "coe",
            Ensemble::CoeNormalized => "coe-normalized",
        }
    }

    /// Coefficient symbol used in printed weight tables.
    pub fn coefficient_symbol(self) -> char {
        match self {
            Ensemble::Orthogonal => 'a',
            Ensemble::Unitary => 'b',
            Ensemble::Coe | Ensemble::CoeNormalized => 'c',
        }
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Ensemble {
    type Err = WickError;
    fn from_str(s: &str) -> Result<Self, WickError> {
        match s {
            "orthogonal" => Ok(Ensemble::Orthogonal),
            "unitary" => Ok(Ensemble::Unitary),
            "coe" => Ok(Ensemble::Coe),
            "coe-normalized" => Ok(Ensemble::CoeNormalized),
            other => Err(WickError::UnknownEnsemble(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WickError {
    #[error("conjugated entries are not allowed for the orthogonal ensemble")]
    ConjugateInRealEnsemble,
    #[error("integrand has {0} slots; at most 64 are supported")]
    TooManySlots(usize),
    #[error("integrand has {0} distinct free labels; at most 25 are supported")]
    TooManyOpenLabels(usize),
    #[error("malformed index label {0:?}")]
    BadLabel(String),
    #[error("malformed monomial factor {0:?}; expected M[i,j] or Mc[i,j]")]
    BadMonomial(String),
    #[error("unknown ensemble {0:?}; expected orthogonal, unitary, coe or coe-normalized")]
    UnknownEnsemble(String),
}
