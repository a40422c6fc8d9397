//! Gram products under an invariant weight, reduced to trace moments.
//!
//! For the real ensemble `W = MM^T` is symmetric and the measure is
//! `O(N)`-invariant, so `<X prod_nu W_{i_nu l_nu}>` is a combination of
//! perfect matchings of the `2k` labels. For the complex ensembles only
//! matchings of row labels with column labels occur. When `X` is a function
//! of traces, the coefficient of a matching depends only on the cycle type it
//! forms together with the pairs `(i_nu, l_nu)`. Contracting with one
//! matching of each type turns the product into trace moments, and a square
//! system indexed by partitions of `k` recovers the coefficients.
//!
//! This costs trace moments of degree `2k + deg X` instead of a Wick sum with
//! `2k` open labels.

use super::{DeltaExpansion, DeltaPattern, Ensemble, Label, WickError};
use crate::algebra::{solve_linear_system, RationalFunction};
use crate::combinatorics::{enumerate_pairings, partitions_of, PairingKind, Partition};

/// Coefficient of every matching class in `<X prod_{nu<=k} W_{i_nu l_nu}>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramClassExpansion {
    ensemble: Ensemble,
    k: usize,
    classes: Vec<(Partition, RationalFunction)>,
}

impl GramClassExpansion {
    /// `closed(parts)` must return `<X prod_j tr(W^{parts_j})>`.
    pub fn compute<F>(ensemble: Ensemble, k: usize, mut closed: F) -> Result<Self, WickError>
    where
        F: FnMut(&[u32]) -> Result<RationalFunction, WickError>,
    {
        let types = partitions_of(k as u32);
        let matchings = matchings(ensemble, k);
        let ends = pair_ends(k);
        let reps: Vec<Vec<usize>> = types.iter().map(|t| representative(k, t)).collect();
        let mut tally = vec![vec![vec![0u64; k + 1]; types.len()]; types.len()];
        for m in &matchings {
            let class = cycle_type(&ends, m);
            let col = types.iter().position(|t| *t == class).expect("cycle type is a partition of k");
            for (row, q) in reps.iter().enumerate() {
                tally[row][col][cycle_lengths(m, q).len()] += 1;
            }
        }
        let matrix: Vec<Vec<RationalFunction>> = tally
            .iter()
            .map(|row| row.iter().map(|c| RationalFunction::from_counts_over_n_power(c, 0)).collect())
            .collect();
        let rhs = types.iter().map(|t| closed(t.parts())).collect::<Result<Vec<_>, _>>()?;
        let coeffs = solve_linear_system(&matrix, &rhs).expect("class matrix is nonsingular");
        Ok(Self { ensemble, k, classes: types.into_iter().zip(coeffs).collect() })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `(cycle type, coefficient)` in canonical partition order.
    pub fn classes(&self) -> &[(Partition, RationalFunction)] {
        &self.classes
    }

    pub fn coefficient(&self, class: &Partition) -> Option<&RationalFunction> {
        self.classes.iter().find(|(c, _)| c == class).map(|(_, v)| v)
    }

    /// The same expression minus `prod_nu delta(i_nu, l_nu)`, the class of
    /// all ones.
    pub fn minus_delta_product(&self) -> Self {
        let identity = Partition::new(vec![1; self.k]).expect("ones form a partition");
        let mut out = self.clone();
        for (c, v) in &mut out.classes {
            if *c == identity {
                *v = &*v - &RationalFunction::one();
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.classes.iter().all(|(_, v)| v.is_zero())
    }

    /// Expands over the labels `i1..ik, l1..lk`.
    pub fn to_expansion(&self) -> DeltaExpansion {
        let label = |p: usize| {
            if p < self.k {
                Label::Name(format!("i{}", p + 1))
            } else {
                Label::Name(format!("l{}", p - self.k + 1))
            }
        };
        let ends = pair_ends(self.k);
        let mut out = DeltaExpansion::zero();
        for m in matchings(self.ensemble, self.k) {
            let class = cycle_type(&ends, &m);
            let c = self.coefficient(&class).expect("every class is present");
            let pairs: Vec<(Label, Label)> =
                (0..2 * self.k).filter(|&p| p < m[p]).map(|p| (label(p), label(m[p]))).collect();
            let pattern = DeltaPattern::from_pairs(&pairs).expect("symbolic labels never conflict");
            out.add_term(pattern, c.clone());
        }
        out
    }
}

/// Points `0..k` are the row labels `i`, `k..2k` the column labels `l`;
/// a matching is stored as a partner array.
fn matchings(ensemble: Ensemble, k: usize) -> Vec<Vec<usize>> {
    let conj: Vec<bool> = (0..2 * k).map(|p| p >= k).collect();
    let kind = match ensemble {
        Ensemble::Orthogonal => PairingKind::Perfect,
        _ => PairingKind::Bipartite,
    };
    enumerate_pairings(&conj, kind)
        .map(|pairing| {
            let mut partner = vec![0; 2 * k];
            for (a, b) in pairing {
                partner[a] = b;
                partner[b] = a;
            }
            partner
        })
        .collect()
}

fn pair_ends(k: usize) -> Vec<usize> {
    (0..2 * k).map(|p| if p < k { p + k } else { p - k }).collect()
}

/// Contraction `l_nu = i_{nu+1}` cyclically within each part, which turns
/// the product into `prod_j tr(W^{parts_j})`.
fn representative(k: usize, class: &Partition) -> Vec<usize> {
    let mut partner = vec![0; 2 * k];
    let mut start = 0;
    for &len in class.parts() {
        let len = len as usize;
        for nu in start..start + len {
            let next = if nu + 1 == start + len { start } else { nu + 1 };
            partner[k + nu] = next;
            partner[next] = k + nu;
        }
        start += len;
    }
    partner
}

/// Cycles of the union of two matchings, each measured in edges of `a`.
fn cycle_lengths(a: &[usize], b: &[usize]) -> Vec<u32> {
    let mut seen = vec![false; a.len()];
    let mut lengths = Vec::new();
    for start in 0..a.len() {
        if seen[start] {
            continue;
        }
        let mut p = start;
        let mut len = 0;
        loop {
            seen[p] = true;
            let q = a[p];
            seen[q] = true;
            len += 1;
            p = b[q];
            if p == start {
                break;
            }
        }
        lengths.push(len);
    }
    lengths
}

fn cycle_type(ends: &[usize], m: &[usize]) -> Partition {
    Partition::from_unsorted(cycle_lengths(ends, m)).expect("cycle lengths are positive")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wick::{gaussian_moment, gaussian_trace_moment, gram_entries, Integrand};

    fn plain(ensemble: Ensemble, k: usize) -> GramClassExpansion {
        GramClassExpansion::compute(ensemble, k, |parts| {
            let p = Partition::from_unsorted(parts.to_vec()).unwrap();
            Ok(gaussian_trace_moment(ensemble, &[p]))
        })
        .unwrap()
    }

    #[test]
    fn representatives_have_their_type() {
        for k in 1..=5 {
            for t in partitions_of(k as u32) {
                assert_eq!(cycle_type(&pair_ends(k), &representative(k, &t)), t);
            }
        }
    }

    #[test]
    fn matches_direct_wick_sum() {
        for e in Ensemble::ALL {
            for k in 1..=3 {
                let direct = gaussian_moment(e, &Integrand::new(gram_entries(k))).unwrap();
                assert_eq!(plain(e, k).to_expansion(), direct, "{e} k = {k}");
            }
        }
    }

    #[test]
    fn single_entry() {
        let c = plain(Ensemble::Orthogonal, 1);
        assert_eq!(c.classes(), &[(Partition::new(vec![1]).unwrap(), RationalFunction::one())]);
        assert!(c.minus_delta_product().is_zero());
    }
}
