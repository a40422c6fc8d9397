//! The pairing-sum kernel shared by every Gaussian moment.
//!
//! An integrand is compiled into slots over dense label ids (open labels
//! first, summed labels after). A depth-first search walks all admissible
//! pairings while maintaining an undoable union-find over labels, so each
//! leaf costs a constant number of unions plus one pattern lookup. The top
//! two levels of the search are split into independent tasks for rayon;
//! per-task tallies are integer counts merged by addition, so the result does
//! not depend on scheduling.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::{DeltaExpansion, DeltaPattern, Ensemble, Label, MonomialSpec, Slot, WickError};
use crate::algebra::RationalFunction;
use crate::combinatorics::{PairingKind, RollbackUnionFind};

/// Open labels are packed 5 bits each into the pattern key.
const MAX_OPEN_LABELS: usize = 25;
const MAX_SLOTS: usize = 64;

/// One factor of a Gaussian integrand.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Factor {
    /// `tr((M M^dagger)^k)`, all indices summed.
    Trace(u32),
    /// `(M M^dagger)_{row, col}` with a private summed inner index.
    GramEntry(Label, Label),
    /// A single matrix entry.
    Entry(Slot),
}

/// Product of factors plus the user labels to sum over.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Integrand {
    pub factors: Vec<Factor>,
    pub summed: BTreeSet<String>,
}

impl Integrand {
    pub fn new(factors: Vec<Factor>) -> Self {
        Self { factors, summed: BTreeSet::new() }
    }

    /// Product of `tr((MM^dagger)^p)` over the given parts.
    pub fn traces(parts: &[u32]) -> Self {
        Self::new(parts.iter().map(|&p| Factor::Trace(p)).collect())
    }

    pub fn with_factors(&self, extra: impl IntoIterator<Item = Factor>) -> Self {
        let mut out = self.clone();
        out.factors.extend(extra);
        out
    }
}

impl From<&MonomialSpec> for Integrand {
    fn from(m: &MonomialSpec) -> Self {
        Self {
            factors: m.slots.iter().cloned().map(Factor::Entry).collect(),
            summed: m.summed.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Open(Label),
    UserSummed(String),
    Internal(u32),
}

/// Compiled integrand.
#[derive(Clone, Debug)]
pub(crate) struct Wiring {
    rows: Vec<u16>,
    cols: Vec<u16>,
    conj: Vec<bool>,
    summed: Vec<bool>,
    open: Vec<Label>,
}

impl Wiring {
    pub(crate) fn compile(ensemble: Ensemble, integrand: &Integrand) -> Result<Self, WickError> {
        let mut next_internal = 0u32;
        let mut fresh = || {
            next_internal += 1;
            Key::Internal(next_internal - 1)
        };
        let user = |l: &Label| match l {
            Label::Name(s) if integrand.summed.contains(s) => Key::UserSummed(s.clone()),
            other => Key::Open(other.clone()),
        };
        let mut raw: Vec<(Key, Key, bool)> = Vec::new();
        let gram = |row: Key, col: Key, inner: Key, raw: &mut Vec<(Key, Key, bool)>| match ensemble {
            Ensemble::Orthogonal => {
                raw.push((row, inner.clone(), false));
                raw.push((col, inner, false));
            }
            Ensemble::Unitary => {
                raw.push((row, inner.clone(), false));
                raw.push((col, inner, true));
            }
            Ensemble::Coe | Ensemble::CoeNormalized => {
                raw.push((row, inner.clone(), false));
                raw.push((inner, col, true));
            }
        };
        for f in &integrand.factors {
            match f {
                Factor::Trace(k) => {
                    let k = *k as usize;
                    let outer: Vec<Key> = (0..k).map(|_| fresh()).collect();
                    for nu in 0..k {
                        let inner = fresh();
                        gram(outer[nu].clone(), outer[(nu + 1) % k].clone(), inner, &mut raw);
                    }
                }
                Factor::GramEntry(r, c) => {
                    let inner = fresh();
                    gram(user(r), user(c), inner, &mut raw);
                }
                Factor::Entry(s) => {
                    if ensemble == Ensemble::Orthogonal && s.conj {
                        return Err(WickError::ConjugateInRealEnsemble);
                    }
                    raw.push((user(&s.row), user(&s.col), s.conj));
                }
            }
        }
        if raw.len() > MAX_SLOTS {
            return Err(WickError::TooManySlots(raw.len()));
        }
        let keys: BTreeSet<Key> = raw.iter().flat_map(|(r, c, _)| [r.clone(), c.clone()]).collect();
        // BTreeSet order puts every Open key first
        let ids: BTreeMap<&Key, u16> = keys.iter().enumerate().map(|(i, k)| (k, i as u16)).collect();
        let open: Vec<Label> = keys
            .iter()
            .filter_map(|k| match k {
                Key::Open(l) => Some(l.clone()),
                _ => None,
            })
            .collect();
        if open.len() > MAX_OPEN_LABELS {
            return Err(WickError::TooManyOpenLabels(open.len()));
        }
        let summed = keys.iter().map(|k| !matches!(k, Key::Open(_))).collect();
        Ok(Self {
            rows: raw.iter().map(|(r, _, _)| ids[r]).collect(),
            cols: raw.iter().map(|(_, c, _)| ids[c]).collect(),
            conj: raw.iter().map(|(_, _, j)| *j).collect(),
            summed,
            open,
        })
    }

    #[cfg(test)]
    fn slot_count(&self) -> usize {
        self.rows.len()
    }

    pub(crate) fn is_closed(&self) -> bool {
        self.open.is_empty()
    }
}

/// Pattern key -> tally of pairings by number of closed loops.
type Tally = FxHashMap<u128, Vec<u64>>;

#[derive(Clone, Copy)]
struct Choice {
    a: u8,
    b: u8,
    crossed: bool,
}

struct Search<'w> {
    w: &'w Wiring,
    kind: PairingKind,
    two_terms: bool,
    plain: Vec<u8>,
    full: u64,
    used: u64,
    uf: RollbackUnionFind,
    concrete: u32,
    tally: Tally,
    width: usize,
}

impl<'w> Search<'w> {
    fn new(w: &'w Wiring, ensemble: Ensemble) -> Self {
        let n = w.rows.len();
        let concrete = w
            .open
            .iter()
            .enumerate()
            .filter(|(_, l)| l.is_concrete())
            .fold(0u32, |m, (i, _)| m | (1 << i));
        Self {
            w,
            kind: ensemble.pairing_kind(),
            two_terms: ensemble.is_symmetric(),
            plain: (0..n as u8).filter(|&i| !w.conj[i as usize]).collect(),
            full: if n == 64 { u64::MAX } else { (1u64 << n) - 1 },
            used: 0,
            uf: RollbackUnionFind::new(&w.summed),
            concrete,
            tally: Tally::default(),
            width: w.summed.iter().filter(|&&s| s).count() + 1,
        }
    }

    /// Admissible choices at the current state.
    fn choices(&self, depth: usize, out: &mut Vec<Choice>) {
        out.clear();
        let free = !self.used & self.full;
        let (a, candidates) = match self.kind {
            PairingKind::Perfect => {
                let a = free.trailing_zeros() as u8;
                (a, free & !(1u64 << a))
            }
            PairingKind::Bipartite => {
                let a = self.plain[depth];
                let conj_free = (0..self.w.rows.len())
                    .filter(|&i| self.w.conj[i] && free & (1 << i) != 0)
                    .fold(0u64, |m, i| m | (1 << i));
                (a, conj_free)
            }
        };
        let mut rest = candidates;
        while rest != 0 {
            let b = rest.trailing_zeros() as u8;
            rest &= rest - 1;
            out.push(Choice { a, b, crossed: false });
            if self.two_terms {
                out.push(Choice { a, b, crossed: true });
            }
        }
    }

    #[inline]
    fn apply(&mut self, c: Choice) {
        let (a, b) = (c.a as usize, c.b as usize);
        self.used |= (1 << a) | (1 << b);
        let w = self.w;
        if c.crossed {
            self.uf.union(w.rows[a] as usize, w.cols[b] as usize);
            self.uf.union(w.cols[a] as usize, w.rows[b] as usize);
        } else {
            self.uf.union(w.rows[a] as usize, w.rows[b] as usize);
            self.uf.union(w.cols[a] as usize, w.cols[b] as usize);
        }
    }

    fn run(&mut self, depth: usize) {
        if self.used == self.full {
            self.leaf();
            return;
        }
        let mut buf = Vec::new();
        self.choices(depth, &mut buf);
        for c in buf {
            let (cp, used) = (self.uf.checkpoint(), self.used);
            self.apply(c);
            self.run(depth + 1);
            self.uf.rollback(cp);
            self.used = used;
        }
    }

    #[inline]
    fn leaf(&mut self) {
        let loops = self.uf.closed_loops() as usize;
        let open = self.w.open.len();
        let mut key = 0u128;
        if open > 0 {
            let mut roots = [0u16; MAX_OPEN_LABELS];
            let mut has_concrete = [false; MAX_OPEN_LABELS];
            let mut blocks = 0usize;
            for i in 0..open {
                let r = self.uf.find(i) as u16;
                let j = match roots[..blocks].iter().position(|&x| x == r) {
                    Some(j) => j,
                    None => {
                        roots[blocks] = r;
                        blocks += 1;
                        blocks - 1
                    }
                };
                if self.concrete & (1 << i) != 0 {
                    if has_concrete[j] {
                        // two different concrete indices forced equal
                        return;
                    }
                    has_concrete[j] = true;
                }
                key |= (j as u128) << (5 * i);
            }
        }
        let width = self.width;
        self.tally.entry(key).or_insert_with(|| vec![0; width])[loops] += 1;
    }
}

fn merge_tallies(mut a: Tally, b: Tally) -> Tally {
    for (k, v) in b {
        match a.get_mut(&k) {
            Some(acc) => acc.iter_mut().zip(v).for_each(|(x, y)| *x += y),
            None => {
                a.insert(k, v);
            }
        }
    }
    a
}

fn feasible(ensemble: Ensemble, w: &Wiring) -> bool {
    let n = w.rows.len();
    match ensemble.pairing_kind() {
        PairingKind::Perfect => n % 2 == 0,
        PairingKind::Bipartite => 2 * w.conj.iter().filter(|&&c| c).count() == n,
    }
}

/// Sums all pairings of a compiled integrand.
pub(crate) fn contract(ensemble: Ensemble, w: &Wiring) -> DeltaExpansion {
    if !feasible(ensemble, w) {
        return DeltaExpansion::zero();
    }
    let pairs = w.rows.len() / 2;
    let tally = if pairs < 6 {
        let mut s = Search::new(w, ensemble);
        s.run(0);
        s.tally
    } else {
        // split the first two levels into tasks
        let root = Search::new(w, ensemble);
        let mut first = Vec::new();
        root.choices(0, &mut first);
        let mut prefixes = Vec::new();
        let mut probe = Search::new(w, ensemble);
        let mut second = Vec::new();
        for &c in &first {
            let cp = probe.uf.checkpoint();
            probe.apply(c);
            probe.choices(1, &mut second);
            prefixes.extend(second.iter().map(|&d| [c, d]));
            probe.uf.rollback(cp);
            probe.used = 0;
        }
        prefixes
            .par_iter()
            .map(|prefix| {
                let mut s = Search::new(w, ensemble);
                for &c in prefix {
                    s.apply(c);
                }
                s.run(2);
                s.tally
            })
            .reduce(Tally::default, merge_tallies)
    };
    to_expansion(ensemble, w, tally, pairs)
}

fn to_expansion(ensemble: Ensemble, w: &Wiring, tally: Tally, pairs: usize) -> DeltaExpansion {
    // counts over N^pairs, rescaled when the variance is not 1/N
    let rescale = (ensemble.variance() * RationalFunction::n()).pow(pairs as u32);
    let mut out = DeltaExpansion::zero();
    for (key, counts) in tally {
        let mut groups: Vec<Vec<Label>> = Vec::new();
        for (i, label) in w.open.iter().enumerate() {
            let j = ((key >> (5 * i)) & 31) as usize;
            if groups.len() <= j {
                groups.resize(j + 1, Vec::new());
            }
            groups[j].push(label.clone());
        }
        let pattern = DeltaPattern::new(groups).expect("conflicting patterns are filtered at the leaf");
        let c = RationalFunction::from_counts_over_n_power(&counts, pairs);
        out.add_term(pattern, if rescale.is_one() { c } else { c * rescale.clone() });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{count_loops, enumerate_pairings, DeltaGraph};

    /// Reference path: streamed pairings, explicit delta graphs and
    /// non-incremental loop counting, one pairing at a time.
    fn naive(ensemble: Ensemble, w: &Wiring) -> DeltaExpansion {
        let summed: BTreeSet<usize> = (0..w.summed.len()).filter(|&i| w.summed[i]).collect();
        let pairs = w.rows.len() / 2;
        let mut out = DeltaExpansion::zero();
        for pairing in enumerate_pairings(&w.conj, ensemble.pairing_kind()) {
            let terms: usize = if ensemble.is_symmetric() { 1 << pairing.len() } else { 1 };
            for mask in 0..terms {
                let mut edges = Vec::new();
                for (t, &(a, b)) in pairing.iter().enumerate() {
                    let (ra, ca, rb, cb) =
                        (w.rows[a] as usize, w.cols[a] as usize, w.rows[b] as usize, w.cols[b] as usize);
                    if mask & (1 << t) != 0 {
                        edges.push((ra, cb));
                        edges.push((ca, rb));
                    } else {
                        edges.push((ra, rb));
                        edges.push((ca, cb));
                    }
                }
                let lc = count_loops(&DeltaGraph::new(edges), &summed);
                let groups = lc
                    .blocks
                    .iter()
                    .map(|b| b.iter().map(|&i| w.open[i].clone()).collect())
                    .collect();
                if let Some(p) = DeltaPattern::new(groups) {
                    out.add_term(p, RationalFunction::n_pow(lc.power as i64) * ensemble.variance().pow(pairs as u32));
                }
            }
        }
        out
    }

    fn gram_entries(k: usize) -> Vec<Factor> {
        (1..=k)
            .map(|i| Factor::GramEntry(Label::name(format!("i{i}")), Label::name(format!("l{i}"))))
            .collect()
    }

    #[test]
    fn fused_kernel_matches_naive_route() {
        let cases = vec![
            Integrand::traces(&[2, 1]),
            Integrand::traces(&[3, 1, 1]),
            Integrand::new(gram_entries(3)),
            Integrand::traces(&[2]).with_factors(gram_entries(2)),
            Integrand::new(vec![
                Factor::Entry(Slot::plain(1, 1)),
                Factor::Entry(Slot::conj(1, 2)),
                Factor::Entry(Slot::plain("a", 2)),
                Factor::Entry(Slot::conj("a", 1)),
            ]),
        ];
        for ensemble in Ensemble::ALL {
            for integrand in &cases {
                let Ok(w) = Wiring::compile(ensemble, integrand) else { continue };
                assert_eq!(contract(ensemble, &w), naive(ensemble, &w), "{ensemble:?} {integrand:?}");
            }
        }
    }

    #[test]
    fn parallel_split_matches_naive_route() {
        // 12 slots: above the sequential threshold
        let integrand = Integrand::traces(&[1]).with_factors(gram_entries(2)).with_factors([Factor::Trace(3)]);
        for ensemble in Ensemble::ALL {
            let w = Wiring::compile(ensemble, &integrand).unwrap();
            assert_eq!(w.slot_count(), 12);
            assert_eq!(contract(ensemble, &w), naive(ensemble, &w), "{ensemble:?}");
        }
    }
}
