use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Label;
use crate::algebra::{AsymptoticOrder, RationalFunction};

/// Product of Kronecker deltas over free labels, stored as blocks of labels
/// forced equal.
///
/// Canonical: every block has at least two labels, blocks are sorted and
/// disjoint, and no block holds two different concrete indices (such a
/// product is zero and has no pattern).
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DeltaPattern {
    blocks: Vec<Vec<Label>>,
}

impl DeltaPattern {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Canonicalizes arbitrary (possibly overlapping) groups. `None` when
    /// two distinct concrete indices are forced equal.
    pub fn new(groups: Vec<Vec<Label>>) -> Option<Self> {
        let mut blocks: Vec<Vec<Label>> = Vec::new();
        for g in groups {
            let mut merged: Vec<Label> = g;
            let mut keep = Vec::with_capacity(blocks.len());
            for b in blocks.drain(..) {
                if b.iter().any(|l| merged.contains(l)) {
                    merged.extend(b);
                } else {
                    keep.push(b);
                }
            }
            merged.sort();
            merged.dedup();
            keep.push(merged);
            blocks = keep;
        }
        blocks.retain(|b| b.len() > 1);
        for b in &blocks {
            if b.iter().filter(|l| l.is_concrete()).count() > 1 {
                return None;
            }
        }
        blocks.sort();
        Some(Self { blocks })
    }

    /// `prod delta(a, b)` over the given pairs.
    pub fn from_pairs<L: Into<Label> + Clone>(pairs: &[(L, L)]) -> Option<Self> {
        Self::new(pairs.iter().map(|(a, b)| vec![a.clone().into(), b.clone().into()]).collect())
    }

    pub fn blocks(&self) -> &[Vec<Label>] {
        &self.blocks
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Product with another pattern.
    pub fn merge(&self, other: &Self) -> Option<Self> {
        let mut groups = self.blocks.clone();
        groups.extend(other.blocks.iter().cloned());
        Self::new(groups)
    }

    /// Spanning pairs: the first label of each block paired with each of the others.
    pub fn pairs(&self) -> Vec<(Label, Label)> {
        self.blocks
            .iter()
            .flat_map(|b| b[1..].iter().map(move |l| (b[0].clone(), l.clone())))
            .collect()
    }
}

impl fmt::Display for DeltaPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.blocks.is_empty() {
            return write!(f, "1");
        }
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "d(")?;
            for (j, l) in b.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{l}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Linear combination of delta patterns with rational-function coefficients.
/// Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DeltaExpansion {
    terms: BTreeMap<DeltaPattern, RationalFunction>,
}

impl DeltaExpansion {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scalar(c: RationalFunction) -> Self {
        Self::term(DeltaPattern::empty(), c)
    }

    pub fn one() -> Self {
        Self::scalar(RationalFunction::one())
    }

    pub fn term(pattern: DeltaPattern, c: RationalFunction) -> Self {
        let mut e = Self::zero();
        e.add_term(pattern, c);
        e
    }

    /// `prod delta(a, b)` with unit coefficient; zero if the deltas conflict.
    pub fn delta_product<L: Into<Label> + Clone>(pairs: &[(L, L)]) -> Self {
        match DeltaPattern::from_pairs(pairs) {
            Some(p) => Self::term(p, RationalFunction::one()),
            None => Self::zero(),
        }
    }

    pub fn add_term(&mut self, pattern: DeltaPattern, c: RationalFunction) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(pattern) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DeltaPattern, &RationalFunction)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, pattern: &DeltaPattern) -> RationalFunction {
        self.terms.get(pattern).cloned().unwrap_or_else(RationalFunction::zero)
    }

    /// The value when no delta survives (all indices concrete or summed).
    pub fn as_scalar(&self) -> Option<RationalFunction> {
        match self.terms.len() {
            0 => Some(RationalFunction::zero()),
            1 => self.terms.get(&DeltaPattern::empty()).cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, c: &RationalFunction) -> Self {
        let mut out = Self::zero();
        for (p, v) in &self.terms {
            out.add_term(p.clone(), v * c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (p, v) in &other.terms {
            out.add_term(p.clone(), v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (p, v) in &other.terms {
            out.add_term(p.clone(), -v);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (p, a) in &self.terms {
            for (q, b) in &other.terms {
                if let Some(pq) = p.merge(q) {
                    out.add_term(pq, a * b);
                }
            }
        }
        out
    }

    /// Smallest decay exponent among the coefficients.
    pub fn min_order(&self) -> AsymptoticOrder {
        self.terms
            .values()
            .map(|c| c.asymptotic_order())
            .min_by_key(|o| match o {
                AsymptoticOrder::Zero => i64::MAX,
                AsymptoticOrder::Decay(b) => *b,
            })
            .unwrap_or(AsymptoticOrder::Zero)
    }
}

impl fmt::Display for DeltaExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (p, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "[{}] {p}", c.to_factored_string())?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    deltas: Vec<(Label, Label)>,
    coeff: RationalFunction,
}

impl Serialize for DeltaExpansion {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<TermJson> = self
            .terms
            .iter()
            .map(|(p, c)| TermJson { deltas: p.pairs(), coeff: c.clone() })
            .collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DeltaExpansion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let terms = Vec::<TermJson>::deserialize(d)?;
        let mut out = DeltaExpansion::zero();
        for t in terms {
            if let Some(p) = DeltaPattern::from_pairs(&t.deltas) {
                out.add_term(p, t.coeff);
            }
        }
        Ok(out)
    }
}
