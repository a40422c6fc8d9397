//! Weight functions `w_kappa = a_0 + sum_k a_k I_k(M)` over trace invariants.
//!
//! The coefficients solve the Gram system `sum_k a_k <I_k I_k'> = B_k'`,
//! where `<.>` is the Gaussian average and `B_k' = N^{#parts of k'}` is the
//! value of the invariant on a unitary target. The Gram matrix is a moment
//! matrix of linearly independent polynomials, hence nonsingular.

mod cache;

pub use cache::{WeightCache, CACHE_ENV_VAR};

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{solve_linear_system, AlgebraError, RationalFunction};
use crate::combinatorics::{enumerate_partitions, Partition};
use crate::wick::{
    gaussian_moment, gaussian_trace_moment, gram_delta_product, gram_entries, DeltaExpansion,
    Ensemble, GramClassExpansion, Integrand, WickError,
};

#[derive(Debug, Error)]
pub enum WeightError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Wick(#[from] WickError),
    #[error("invalid weight function: {0}")]
    Invalid(String),
    #[error("weight cache I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("weight JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Gram matrix of invariant cross-moments and its right-hand side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramSystem {
    pub ensemble: Ensemble,
    pub kappa: u32,
    /// Row and column labels, in canonical order.
    pub partitions: Vec<Partition>,
    pub matrix: Vec<Vec<RationalFunction>>,
    pub rhs: Vec<RationalFunction>,
}

impl GramSystem {
    pub fn is_symmetric(&self) -> bool {
        let n = self.matrix.len();
        (0..n).all(|i| (0..i).all(|j| self.matrix[i][j] == self.matrix[j][i]))
    }

    /// Leading principal minors of the matrix evaluated at `N = n`, in exact
    /// rational arithmetic.
    pub fn leading_minors_at(&self, n: &BigRational) -> Result<Vec<BigRational>, AlgebraError> {
        let mut a: Vec<Vec<BigRational>> = self
            .matrix
            .iter()
            .map(|row| row.iter().map(|x| x.eval(n)).collect::<Result<_, _>>())
            .collect::<Result<_, _>>()?;
        // Gaussian elimination without pivoting: minor_k = prod of first k pivots
        let size = a.len();
        let mut minors = Vec::with_capacity(size);
        let mut det = BigRational::from_integer(1.into());
        for k in 0..size {
            let pivot = a[k][k].clone();
            det *= &pivot;
            minors.push(det.clone());
            if pivot.is_zero() {
                // later minors are not determined by this elimination; report zeros
                minors.extend(std::iter::repeat_n(BigRational::zero(), size - k - 1));
                break;
            }
            for i in k + 1..size {
                let f = &a[i][k] / &pivot;
                for j in k..size {
                    let v = &f * &a[k][j];
                    a[i][j] -= v;
                }
            }
        }
        Ok(minors)
    }

    /// Positive definiteness at `N = n` by Sylvester's criterion.
    pub fn is_positive_definite_at(&self, n: &BigRational) -> Result<bool, AlgebraError> {
        Ok(self.leading_minors_at(n)?.iter().all(|m| m.is_positive()))
    }
}

pub fn build_gram_system(ensemble: Ensemble, kappa: u32) -> GramSystem {
    let partitions = enumerate_partitions(kappa);
    let n = partitions.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let values: Vec<RationalFunction> = pairs
        .par_iter()
        .map(|&(i, j)| gaussian_trace_moment(ensemble, &[partitions[i].clone(), partitions[j].clone()]))
        .collect();
    let mut matrix = vec![vec![RationalFunction::zero(); n]; n];
    for (&(i, j), v) in pairs.iter().zip(values) {
        matrix[j][i] = v.clone();
        matrix[i][j] = v;
    }
    let rhs = partitions.iter().map(|p| RationalFunction::n_pow(p.len() as i64)).collect();
    GramSystem { ensemble, kappa, partitions, matrix, rhs }
}

/// Weight function for one ensemble and order `kappa`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightFunction {
    ensemble: Ensemble,
    kappa: u32,
    coefficients: Vec<WeightCoefficient>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightCoefficient {
    pub partition: Partition,
    pub value: RationalFunction,
}

impl WeightFunction {
    /// `w = 1`, the order-zero weight.
    pub fn trivial(ensemble: Ensemble) -> Self {
        Self {
            ensemble,
            kappa: 0,
            coefficients: vec![WeightCoefficient { partition: Partition::empty(), value: RationalFunction::one() }],
        }
    }

    /// Assembles a weight from a coefficient list, checking that the keys are
    /// exactly the canonical partitions up to `kappa` in order.
    pub fn from_coefficients(
        ensemble: Ensemble,
        kappa: u32,
        coefficients: Vec<WeightCoefficient>,
    ) -> Result<Self, WeightError> {
        let expected = enumerate_partitions(kappa);
        let keys: Vec<&Partition> = coefficients.iter().map(|c| &c.partition).collect();
        if keys.len() != expected.len() || keys.iter().zip(&expected).any(|(a, b)| *a != b) {
            return Err(WeightError::Invalid(format!(
                "coefficient keys do not match the partitions up to {kappa}"
            )));
        }
        Ok(Self { ensemble, kappa, coefficients })
    }

    pub fn ensemble(&self) -> Ensemble {
        self.ensemble
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    pub fn coefficients(&self) -> &[WeightCoefficient] {
        &self.coefficients
    }

    pub fn coefficient(&self, partition: &Partition) -> Option<&RationalFunction> {
        self.coefficients.iter().find(|c| &c.partition == partition).map(|c| &c.value)
    }

    /// `<w * integrand>` under the Gaussian measure.
    pub fn weighted_moment(&self, integrand: &Integrand) -> Result<DeltaExpansion, WickError> {
        let mut total = DeltaExpansion::zero();
        for c in &self.coefficients {
            if c.value.is_zero() {
                continue;
            }
            let with_invariant = integrand.with_factors(Integrand::traces(c.partition.parts()).factors);
            total = total.add(&gaussian_moment(self.ensemble, &with_invariant)?.scale(&c.value));
        }
        Ok(total)
    }

    /// `<w * prod_j tr((MM^dagger)^{parts_j})>`, through the cached trace moments.
    pub fn weighted_trace_moment(&self, parts: &[u32]) -> RationalFunction {
        let extra = Partition::from_unsorted(parts.to_vec()).expect("trace powers are positive");
        self.coefficients
            .iter()
            .filter(|c| !c.value.is_zero())
            .map(|c| &c.value * &gaussian_trace_moment(self.ensemble, &[c.partition.clone(), extra.clone()]))
            .sum()
    }

    /// `<w prod_{nu<=k} (MM^dagger)_{i_nu l_nu}>` by matching class, computed
    /// from trace moments alone.
    pub fn gram_classes(&self, k: usize) -> GramClassExpansion {
        GramClassExpansion::compute(self.ensemble, k, |parts| Ok(self.weighted_trace_moment(parts)))
            .expect("trace moments are infallible")
    }

    /// One line per coefficient, e.g. `a[2,1] = -N^4/(...)`.
    pub fn to_text(&self) -> String {
        let sym = self.ensemble.coefficient_symbol();
        self.coefficients
            .iter()
            .map(|c| {
                let idx: Vec<String> = c.partition.parts().iter().map(|p| p.to_string()).collect();
                format!("{sym}[{}] = {}\n", idx.join(","), c.value.to_factored_string())
            })
            .collect()
    }
}

impl<'de> Deserialize<'de> for WeightFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            ensemble: Ensemble,
            kappa: u32,
            coefficients: Vec<WeightCoefficient>,
        }
        let raw = Raw::deserialize(d)?;
        WeightFunction::from_coefficients(raw.ensemble, raw.kappa, raw.coefficients)
            .map_err(serde::de::Error::custom)
    }
}

/// Solves the Gram system and checks its residual vanishes identically.
pub fn solve_weight(ensemble: Ensemble, kappa: u32) -> Result<WeightFunction, WeightError> {
    let gram = build_gram_system(ensemble, kappa);
    let x = solve_linear_system(&gram.matrix, &gram.rhs)?;
    for (row, b) in gram.matrix.iter().zip(&gram.rhs) {
        let lhs: RationalFunction = row.iter().zip(&x).map(|(a, xi)| a * xi).sum();
        if lhs != *b {
            return Err(WeightError::Invalid("Gram residual does not vanish".into()));
        }
    }
    let coefficients = gram
        .partitions
        .into_iter()
        .zip(x)
        .map(|(partition, value)| WeightCoefficient { partition, value })
        .collect();
    WeightFunction::from_coefficients(ensemble, kappa, coefficients)
}

/// Outcome of checking `<w prod_nu (MM^dagger)_{i_nu l_nu}> = prod_nu delta(i_nu, l_nu)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub k: usize,
    pub passed: bool,
    /// Left side minus the delta product; empty when the condition holds.
    pub residual: DeltaExpansion,
}

pub fn verify_conditions(weight: &WeightFunction, k: usize) -> Result<ConditionReport, WickError> {
    let actual = weight.weighted_moment(&Integrand::new(gram_entries(k)))?;
    let residual = actual.sub(&gram_delta_product(k));
    Ok(ConditionReport { k, passed: residual.is_zero(), residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Polynomial;

    fn rf(num: &[i64], den: &[i64]) -> RationalFunction {
        RationalFunction::new(Polynomial::from_i64s(num), Polynomial::from_i64s(den)).unwrap()
    }

    fn part(p: &[u32]) -> Partition {
        Partition::new(p.to_vec()).unwrap()
    }

    #[test]
    fn gram_entries_small() {
        let g = build_gram_system(Ensemble::Orthogonal, 2);
        assert_eq!(g.matrix[0][0], RationalFunction::one());
        assert_eq!(g.matrix[0][1], RationalFunction::n());
        assert_eq!(g.rhs[3], RationalFunction::n_pow(2));
        assert!(g.is_symmetric());
    }

    #[test]
    fn kappa_one_real_and_complex_are_trivial() {
        for e in [Ensemble::Orthogonal, Ensemble::Unitary] {
            let w = solve_weight(e, 1).unwrap();
            assert_eq!(w.coefficient(&Partition::empty()), Some(&RationalFunction::one()));
            assert!(w.coefficient(&part(&[1])).unwrap().is_zero());
        }
    }

    #[test]
    fn kappa_one_coe_by_hand() {
        // 2x2 system from <T> = N+1, <T^2> = (N+1)^2 + 2(N+1)/N:
        //   c0 + c1 (N+1) = 1,  c0 (N+1) + c1 <T^2> = N
        let w = solve_weight(Ensemble::Coe, 1).unwrap();
        assert_eq!(w.coefficient(&Partition::empty()), Some(&rf(&[2, 1], &[2])));
        assert_eq!(w.coefficient(&part(&[1])), Some(&rf(&[0, -1], &[2, 2])));
    }

    #[test]
    fn normalized_coe_kappa_one_is_trivial() {
        let w = solve_weight(Ensemble::CoeNormalized, 1).unwrap();
        assert_eq!(w.coefficient(&Partition::empty()), Some(&RationalFunction::one()));
        assert!(w.coefficient(&part(&[1])).unwrap().is_zero());
    }

    #[test]
    fn conditions_hold_up_to_kappa() {
        let w = solve_weight(Ensemble::Orthogonal, 2).unwrap();
        for k in 1..=2 {
            assert!(verify_conditions(&w, k).unwrap().passed, "k = {k}");
        }
        assert!(!verify_conditions(&w, 3).unwrap().passed);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let w = solve_weight(Ensemble::Unitary, 2).unwrap();
        let s = serde_json::to_string(&w).unwrap();
        assert!(s.starts_with(r#"{"ensemble":"unitary","kappa":2,"coefficients":[{"partition":[],"value":"#));
        let back: WeightFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
        let broken = s.replace(r#""partition":[1,1]"#, r#""partition":[2]"#);
        assert!(serde_json::from_str::<WeightFunction>(&broken).is_err());
    }

    #[test]
    fn minors_positive_at_ten() {
        let ten = BigRational::from_integer(10.into());
        for e in Ensemble::ALL {
            assert!(build_gram_system(e, 2).is_positive_definite_at(&ten).unwrap());
        }
    }
}
