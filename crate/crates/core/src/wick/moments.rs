use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use super::kernel::{contract, Wiring};
use super::{DeltaExpansion, Ensemble, Factor, Integrand, Label, MonomialSpec, Slot, WickError};
use crate::algebra::RationalFunction;
use crate::combinatorics::Partition;

/// Gaussian second moment of two entries.
///
/// Real: `<M_ij M_kl> = d_ik d_jl / N`. Complex: `<M_ij conj(M_kl)>` has
/// the same form and unmatched conjugations vanish. COE:
/// `<conj(S_ij) S_kl> = (d_ik d_jl + d_il d_jk) / N`, or over `N + 1` when
/// normalized.
pub fn elementary_contraction(ensemble: Ensemble, a: &Slot, b: &Slot) -> DeltaExpansion {
    let inv_n = ensemble.variance();
    let direct = || DeltaExpansion::delta_product(&[(a.row.clone(), b.row.clone()), (a.col.clone(), b.col.clone())]);
    match ensemble {
        Ensemble::Orthogonal => direct().scale(&inv_n),
        Ensemble::Unitary if a.conj != b.conj => direct().scale(&inv_n),
        Ensemble::Coe | Ensemble::CoeNormalized if a.conj != b.conj => {
            let crossed = DeltaExpansion::delta_product(&[
                (a.row.clone(), b.col.clone()),
                (a.col.clone(), b.row.clone()),
            ]);
            direct().add(&crossed).scale(&inv_n)
        }
        _ => DeltaExpansion::zero(),
    }
}

/// Gaussian average of an arbitrary product of factors.
pub fn gaussian_moment(ensemble: Ensemble, integrand: &Integrand) -> Result<DeltaExpansion, WickError> {
    let wiring = Wiring::compile(ensemble, integrand)?;
    if wiring.is_closed() && integrand.factors.iter().all(|f| matches!(f, Factor::Trace(_))) {
        let parts: Vec<u32> = integrand.factors.iter().map(|f| match f {
            Factor::Trace(k) => *k,
            _ => unreachable!(),
        }).collect();
        return Ok(DeltaExpansion::scalar(trace_moment_cached(ensemble, parts, &wiring)));
    }
    Ok(contract(ensemble, &wiring))
}

/// Gaussian average of a monomial in the entries; summed labels are
/// contracted into powers of `N`, free labels remain as deltas.
pub fn gaussian_entry_moment(ensemble: Ensemble, monomial: &MonomialSpec) -> Result<DeltaExpansion, WickError> {
    monomial.validate(ensemble)?;
    gaussian_moment(ensemble, &Integrand::from(monomial))
}

type TraceKey = (Ensemble, Vec<u32>);

fn trace_cache() -> &'static Mutex<HashMap<TraceKey, RationalFunction>> {
    static CACHE: OnceLock<Mutex<HashMap<TraceKey, RationalFunction>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn trace_moment_cached(ensemble: Ensemble, mut parts: Vec<u32>, wiring: &Wiring) -> RationalFunction {
    parts.sort_unstable_by(|a, b| b.cmp(a));
    let key = (ensemble, parts);
    if let Some(v) = trace_cache().lock().unwrap().get(&key) {
        return v.clone();
    }
    // computed outside the lock; concurrent duplicates insert equal values
    let v = contract(ensemble, wiring)
        .as_scalar()
        .expect("closed integrand has no free deltas");
    trace_cache().lock().unwrap().insert(key, v.clone());
    v
}

/// `< prod_i tr((M M^dagger)^{k_i}) >` over every part of every partition.
pub fn gaussian_trace_moment(ensemble: Ensemble, invariants: &[Partition]) -> RationalFunction {
    let parts: Vec<u32> = invariants.iter().flat_map(|p| p.parts().iter().copied()).collect();
    gaussian_moment(ensemble, &Integrand::traces(&parts))
        .expect("trace integrands always compile")
        .as_scalar()
        .expect("closed integrand has no free deltas")
}

/// Joint cumulant of `n` blocks from the moments of every sub-collection,
/// through `m(S) = sum_{B contains min S} k(B) m(S \ B)`.
pub(crate) fn cumulant<F>(n: usize, mut moment: F) -> Result<DeltaExpansion, WickError>
where
    F: FnMut(u32) -> Result<DeltaExpansion, WickError>,
{
    if n == 0 {
        return Ok(DeltaExpansion::one());
    }
    let size = 1usize << n;
    let mut m: Vec<Option<DeltaExpansion>> = vec![None; size];
    let mut k: Vec<Option<DeltaExpansion>> = vec![None; size];
    m[0] = Some(DeltaExpansion::one());
    for s in 1..size as u32 {
        m[s as usize] = Some(moment(s)?);
    }
    // ascending masks visit every proper subset before its superset
    for s in 1..size as u32 {
        let low = s & s.wrapping_neg();
        let rest = s & !low;
        let mut acc = m[s as usize].clone().unwrap();
        // proper blocks B = low | sub with sub a proper subset of rest
        let mut sub = rest;
        loop {
            sub = sub.wrapping_sub(1) & rest;
            if sub == rest {
                break;
            }
            let block = low | sub;
            let other = s & !block;
            let prod = k[block as usize].as_ref().unwrap().mul(m[other as usize].as_ref().unwrap());
            acc = acc.sub(&prod);
            if sub == 0 {
                break;
            }
        }
        k[s as usize] = Some(acc);
    }
    Ok(k[size - 1].take().unwrap())
}

/// Connected (fully correlated) part of a product of factors: the full
/// moment minus all products of connected parts over proper groupings of the
/// factors. One factor gives the full moment.
pub fn connected_moment(ensemble: Ensemble, factors: &[Factor]) -> Result<DeltaExpansion, WickError> {
    if factors.len() > 16 {
        return Err(WickError::TooManySlots(factors.len()));
    }
    cumulant(factors.len(), |mask| {
        let subset: Vec<Factor> = factors
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, f)| f.clone())
            .collect();
        gaussian_moment(ensemble, &Integrand::new(subset))
    })
}

/// `prod_nu delta(i_nu, l_nu)` over the labels used by [`gram_entries`].
pub fn gram_delta_product(k: usize) -> DeltaExpansion {
    let pairs: Vec<(Label, Label)> = (1..=k)
        .map(|i| (Label::Name(format!("i{i}")), Label::Name(format!("l{i}"))))
        .collect();
    DeltaExpansion::delta_product(&pairs)
}

/// `(MM^dagger)_{i1 l1} ... (MM^dagger)_{ik lk}` with distinct free labels.
pub fn gram_entries(k: usize) -> Vec<Factor> {
    (1..=k)
        .map(|i| Factor::GramEntry(format!("i{i}").as_str().into(), format!("l{i}").as_str().into()))
        .collect()
}
