use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Ensemble, WickError};

/// Matrix index: a concrete value or a symbolic name.
///
/// Concrete indices sort before names, and names never start with a digit,
/// so the string form is unambiguous.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Index(u64),
    Name(String),
}

impl Label {
    pub fn name(s: impl Into<String>) -> Self {
        Label::Name(s.into())
    }

    pub fn is_concrete(&self) -> bool {
        matches!(self, Label::Index(_))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Index(i) => write!(f, "{i}"),
            Label::Name(s) => write!(f, "{s}"),
        }
    }
}

impl FromStr for Label {
    type Err = WickError;

    fn from_str(s: &str) -> Result<Self, WickError> {
        let bad = || WickError::BadLabel(s.to_string());
        let first = s.chars().next().ok_or_else(bad)?;
        if first.is_ascii_digit() {
            return s.parse().map(Label::Index).map_err(|_| bad());
        }
        let ident = (first.is_ascii_alphabetic() || first == '_')
            && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if ident {
            Ok(Label::Name(s.to_string()))
        } else {
            Err(bad())
        }
    }
}

impl From<u64> for Label {
    fn from(i: u64) -> Self {
        Label::Index(i)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::Name(s.to_string())
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// One matrix entry `M[row, col]`, conjugated when `conj` is set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Slot {
    pub row: Label,
    pub col: Label,
    pub conj: bool,
}

impl Slot {
    pub fn plain(row: impl Into<Label>, col: impl Into<Label>) -> Self {
        Self { row: row.into(), col: col.into(), conj: false }
    }

    pub fn conj(row: impl Into<Label>, col: impl Into<Label>) -> Self {
        Self { row: row.into(), col: col.into(), conj: true }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = if self.conj { "Mc" } else { "M" };
        write!(f, "{m}[{},{}]", self.row, self.col)
    }
}

/// Ordered product of matrix entries.
///
/// Symbolic labels are free unless listed in `summed`, in which case the
/// integrand is summed over them from 1 to `N`. Concrete indices are never
/// summed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MonomialSpec {
    pub slots: Vec<Slot>,
    pub summed: BTreeSet<String>,
}

impl MonomialSpec {
    pub fn new(slots: Vec<Slot>) -> Self {
        Self { slots, summed: BTreeSet::new() }
    }

    pub fn with_summed<I, S>(mut self, labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.summed.extend(labels.into_iter().map(Into::into));
        self
    }

    pub fn degree(&self) -> usize {
        self.slots.len()
    }

    pub fn is_concrete(&self) -> bool {
        self.slots.iter().all(|s| s.row.is_concrete() && s.col.is_concrete())
    }

    pub fn validate(&self, ensemble: Ensemble) -> Result<(), WickError> {
        if ensemble == Ensemble::Orthogonal && self.slots.iter().any(|s| s.conj) {
            return Err(WickError::ConjugateInRealEnsemble);
        }
        Ok(())
    }

    /// Parses whitespace-separated factors `M[i,j]` and `Mc[i,j]`, where
    /// each index is a nonnegative integer or an identifier.
    pub fn parse(text: &str) -> Result<Self, WickError> {
        let mut slots = Vec::new();
        for tok in text.split_whitespace() {
            let bad = || WickError::BadMonomial(tok.to_string());
            let (conj, rest) = if let Some(r) = tok.strip_prefix("Mc[") {
                (true, r)
            } else if let Some(r) = tok.strip_prefix("M[") {
                (false, r)
            } else {
                return Err(bad());
            };
            let inner = rest.strip_suffix(']').ok_or_else(bad)?;
            let (r, c) = inner.split_once(',').ok_or_else(bad)?;
            let row: Label = r.parse().map_err(|_| bad())?;
            let col: Label = c.parse().map_err(|_| bad())?;
            slots.push(Slot { row, col, conj });
        }
        if slots.is_empty() {
            return Err(WickError::BadMonomial(text.to_string()));
        }
        Ok(Self::new(slots))
    }
}

impl fmt::Display for MonomialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.slots.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_grammar() {
        let m = MonomialSpec::parse("M[1,1] Mc[i,j2]  M[a_b,10]").unwrap();
        assert_eq!(
            m.slots,
            vec![Slot::plain(1, 1), Slot::conj("i", "j2"), Slot::plain("a_b", 10)]
        );
        assert_eq!(m.to_string(), "M[1,1] Mc[i,j2] M[a_b,10]");
        for bad in ["", "M[1]", "M[1,1", "X[1,1]", "M[1,2,3]", "M[1a,1]", "M[-1,1]", "M[1, 1]"] {
            assert!(MonomialSpec::parse(bad).is_err(), "{bad:?} should be rejected");
        }
    }

    #[test]
    fn real_ensemble_rejects_conjugates() {
        let m = MonomialSpec::parse("M[1,1] Mc[1,1]").unwrap();
        assert_eq!(m.validate(Ensemble::Orthogonal), Err(WickError::ConjugateInRealEnsemble));
        assert!(m.validate(Ensemble::Unitary).is_ok());
    }

    #[test]
    fn label_strings() {
        assert_eq!("17".parse::<Label>().unwrap(), Label::Index(17));
        assert_eq!("i1".parse::<Label>().unwrap(), Label::name("i1"));
        assert!("1x".parse::<Label>().is_err());
        assert!(Label::Index(5) < Label::name("a"));
    }
}
