//! Weighted Gaussian integrals `<w_kappa X>` and their deviation from the
//! exact group values.

use serde::Serialize;

use crate::algebra::{AsymptoticOrder, RationalFunction};
use crate::weight::WeightFunction;
use crate::wick::{
    connected_moment, cumulant, gaussian_moment, gram_entries, DeltaExpansion, Ensemble,
    Integrand, MonomialSpec, WickError,
};

/// `<w_kappa * monomial>`. Exact group integral whenever `degree <= 2 kappa`.
pub fn integrate_monomial(weight: &WeightFunction, monomial: &MonomialSpec) -> Result<DeltaExpansion, WickError> {
    monomial.validate(weight.ensemble())?;
    weight.weighted_moment(&Integrand::from(monomial))
}

/// `<w_kappa prod_{nu<=k} (MM^dagger)_{i_nu l_nu}>` with distinct free labels.
pub fn integrate_gram_product(weight: &WeightFunction, k: usize) -> Result<DeltaExpansion, WickError> {
    weight.weighted_moment(&Integrand::new(gram_entries(k)))
}

/// Lower bound `[kappa/2] + 1` on the decay of the weighted error.
pub fn error_order_bound(kappa: u32) -> i64 {
    i64::from(kappa / 2) + 1
}

/// Lower bound `[(k+1)/2]` on the decay of the weighted connected part.
pub fn weighted_connected_bound(k: usize) -> i64 {
    (k as i64 + 1) / 2
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderReport {
    pub k: usize,
    pub observed: AsymptoticOrder,
    pub bound: i64,
    pub passed: bool,
}

/// Decay order of `<w_kappa prod_{nu<=k} (MM^dagger)_{i_nu l_nu}> - prod_nu
/// delta(i_nu, l_nu)`, the smallest over its delta terms.
pub fn error_order(weight: &WeightFunction, k: usize) -> OrderReport {
    let observed = weight
        .gram_classes(k)
        .minus_delta_product()
        .classes()
        .iter()
        .map(|(_, c)| c.asymptotic_order())
        .min_by_key(|o| match o {
            AsymptoticOrder::Zero => i64::MAX,
            AsymptoticOrder::Decay(b) => *b,
        })
        .unwrap_or(AsymptoticOrder::Zero);
    let bound = error_order_bound(weight.kappa());
    OrderReport { k, observed, bound, passed: observed.at_least(bound) }
}

/// `<w_kappa tr((MM^dagger)^k)> - N`. The trace sums `k` outer indices, so
/// this can grow with `N` even when every entry of the Gram product is
/// accurate.
pub fn trace_deviation(weight: &WeightFunction, k: u32) -> RationalFunction {
    &weight.weighted_trace_moment(&[k]) - &RationalFunction::n()
}

/// Smallest decay order over the delta terms of the connected part of
/// `prod_{nu<=k} (MM^dagger)_{i_nu l_nu}` under the plain Gaussian measure.
pub fn connected_order(ensemble: Ensemble, k: usize) -> Result<AsymptoticOrder, WickError> {
    Ok(connected_moment(ensemble, &gram_entries(k))?.min_order())
}

/// Connected part of `<w_kappa prod_{nu<=k} (MM^dagger)_{i_nu l_nu}>`,
/// treating `w_kappa` as one additional block.
pub fn weighted_connected_moment(weight: &WeightFunction, k: usize) -> Result<DeltaExpansion, WickError> {
    let factors = gram_entries(k);
    if factors.len() + 1 > 16 {
        return Err(WickError::TooManySlots(factors.len()));
    }
    cumulant(k + 1, |mask| {
        let chosen: Vec<_> = factors
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (2 << i) != 0)
            .map(|(_, f)| f.clone())
            .collect();
        let integrand = Integrand::new(chosen);
        if mask & 1 != 0 {
            weight.weighted_moment(&integrand)
        } else {
            gaussian_moment(weight.ensemble(), &integrand)
        }
    })
}

/// Observed decay of the weighted connected part against `[(k+1)/2]`.
pub fn weighted_connected_order(weight: &WeightFunction, k: usize) -> Result<OrderReport, WickError> {
    let observed = weighted_connected_moment(weight, k)?.min_order();
    let bound = weighted_connected_bound(k);
    Ok(OrderReport { k, observed, bound, passed: observed.at_least(bound) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Polynomial;
    use crate::weight::solve_weight;
    use crate::wick::gram_delta_product;

    fn rf(num: &[i64], den: &[i64]) -> RationalFunction {
        RationalFunction::new(Polynomial::from_i64s(num), Polynomial::from_i64s(den)).unwrap()
    }

    fn scalar(w: &WeightFunction, m: &str) -> RationalFunction {
        integrate_monomial(w, &MonomialSpec::parse(m).unwrap()).unwrap().as_scalar().unwrap()
    }

    #[test]
    fn concrete_monomials_real() {
        let w = solve_weight(Ensemble::Orthogonal, 2).unwrap();
        assert!(scalar(&w, "M[1,1] M[1,2]").is_zero());
        assert_eq!(scalar(&w, "M[1,1] M[1,1]"), RationalFunction::n_pow(-1));
        assert_eq!(scalar(&w, "M[1,1] M[1,1] M[1,1] M[1,1]"), rf(&[3], &[0, 2, 1]));
        assert_eq!(scalar(&w, "M[1,1] M[1,1] M[1,2] M[1,2]"), rf(&[1], &[0, 2, 1]));
    }

    #[test]
    fn unitary_fourth_moment() {
        let w = solve_weight(Ensemble::Unitary, 2).unwrap();
        assert_eq!(scalar(&w, "M[1,1] M[1,1] Mc[1,1] Mc[1,1]"), rf(&[2], &[0, 1, 1]));
    }

    #[test]
    fn unweighted_gram_pair() {
        let w = WeightFunction::trivial(Ensemble::Orthogonal);
        let got = integrate_gram_product(&w, 2).unwrap();
        let fluct = DeltaExpansion::delta_product(&[("i1", "i2"), ("l1", "l2")])
            .add(&DeltaExpansion::delta_product(&[("i1", "l2"), ("l1", "i2")]));
        assert_eq!(got, gram_delta_product(2).add(&fluct.scale(&RationalFunction::n_pow(-1))));
    }

    #[test]
    fn gram_product_exact_then_bounded() {
        let w = solve_weight(Ensemble::Orthogonal, 2).unwrap();
        assert_eq!(integrate_gram_product(&w, 2).unwrap(), gram_delta_product(2));
        let resid = integrate_gram_product(&w, 3).unwrap().sub(&gram_delta_product(3));
        assert!(!resid.is_zero());
        assert!(resid.min_order().at_least(2));
    }

    #[test]
    fn error_order_real_kappa_two() {
        let w = solve_weight(Ensemble::Orthogonal, 2).unwrap();
        let r = error_order(&w, 3);
        assert!(r.passed, "{r:?}");
        assert_eq!(r.bound, 2);
        let direct = integrate_gram_product(&w, 3).unwrap().sub(&gram_delta_product(3));
        assert_eq!(r.observed, direct.min_order());
        // the trace sums three outer indices and grows like N
        assert_eq!(trace_deviation(&w, 3).asymptotic_order(), AsymptoticOrder::Decay(-1));
    }

    #[test]
    fn weighted_connected_vanishes_for_single_entry() {
        for e in [Ensemble::Orthogonal, Ensemble::Unitary] {
            let w = solve_weight(e, 2).unwrap();
            assert!(weighted_connected_moment(&w, 1).unwrap().is_zero());
        }
    }

    #[test]
    fn weighted_connected_kappa_two() {
        let w = solve_weight(Ensemble::Orthogonal, 2).unwrap();
        assert!(weighted_connected_order(&w, 2).unwrap().passed);
    }
}
