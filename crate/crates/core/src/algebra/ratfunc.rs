use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{AlgebraError, Polynomial};

/// Exact rational function of `N` in canonical form.
///
/// Numerator and denominator are integer polynomials, coprime over the
/// rationals, with no common integer content and a positive leading
/// coefficient in the denominator. Zero is `0/1`. Two values are equal as
/// functions exactly when their representations are identical.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

/// Decay exponent of a rational function as `N -> infinity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AsymptoticOrder {
    /// The function is identically zero.
    Zero,
    /// `f = Theta(N^-beta)`.
    Decay(i64),
}

impl AsymptoticOrder {
    /// True when the function vanishes or decays at least like `N^-bound`.
    pub fn at_least(self, bound: i64) -> bool {
        match self {
            AsymptoticOrder::Zero => true,
            AsymptoticOrder::Decay(b) => b >= bound,
        }
    }
}

impl fmt::Display for AsymptoticOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AsymptoticOrder::Zero => write!(f, "zero"),
            AsymptoticOrder::Decay(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl RationalFunction {
    /// Canonicalizes `num / den`.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(Self::normalize(num, den))
    }

    fn normalize(num: Polynomial, den: Polynomial) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let (mut num, mut den) = if den.degree() == Some(0) {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.degree() == Some(0) {
                (num, den)
            } else {
                (num.div_exact(&g).expect("gcd divides numerator"),
                 den.div_exact(&g).expect("gcd divides denominator"))
            }
        };
        let mut c = num.content().gcd(&den.content());
        if den.leading().unwrap().is_negative() {
            c = -c;
        }
        if !c.is_one() {
            num = num.div_scalar(&c);
            den = den.div_scalar(&c);
        }
        Self { num, den }
    }

    pub fn zero() -> Self {
        Self { num: Polynomial::zero(), den: Polynomial::one() }
    }

    pub fn one() -> Self {
        Self::from_poly(Polynomial::one())
    }

    /// The indeterminate `N`.
    pub fn n() -> Self {
        Self::from_poly(Polynomial::n())
    }

    /// `N^e` for any integer `e`.
    pub fn n_pow(e: i64) -> Self {
        if e >= 0 {
            Self::from_poly(Polynomial::monomial(1, e as usize))
        } else {
            Self { num: Polynomial::one(), den: Polynomial::monomial(1, (-e) as usize) }
        }
    }

    pub fn from_int(c: impl Into<BigInt>) -> Self {
        Self::from_poly(Polynomial::constant(c))
    }

    pub fn from_rational(q: &BigRational) -> Self {
        Self::normalize(Polynomial::constant(q.numer().clone()), Polynomial::constant(q.denom().clone()))
    }

    pub fn from_poly(p: Polynomial) -> Self {
        Self { num: p, den: Polynomial::one() }
    }

    /// `sum_e counts[e] N^e / N^shift`, the shape every pairing sum takes.
    pub fn from_counts_over_n_power(counts: &[u64], shift: usize) -> Self {
        Self::normalize(Polynomial::from_counts(counts), Polynomial::monomial(1, shift))
    }

    pub fn numer(&self) -> &Polynomial {
        &self.num
    }

    pub fn denom(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// The polynomial itself when the denominator is 1.
    pub fn as_polynomial(&self) -> Option<&Polynomial> {
        self.den.is_one().then_some(&self.num)
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        if rhs.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(Self::normalize(&self.num * &rhs.den, &self.den * &rhs.num))
    }

    pub fn inv(&self) -> Result<Self, AlgebraError> {
        Self::one().checked_div(self)
    }

    pub fn arith(&self, rhs: &Self, op: ArithOp) -> Result<Self, AlgebraError> {
        Ok(match op {
            ArithOp::Add => self + rhs,
            ArithOp::Sub => self - rhs,
            ArithOp::Mul => self * rhs,
            ArithOp::Div => self.checked_div(rhs)?,
        })
    }

    pub fn pow(&self, e: u32) -> Self {
        Self { num: self.num.pow(e), den: self.den.pow(e) }
    }

    /// `deg(den) - deg(num)`, so that `f = Theta(N^-beta)`.
    pub fn asymptotic_order(&self) -> AsymptoticOrder {
        match (self.num.degree(), self.den.degree()) {
            (None, _) => AsymptoticOrder::Zero,
            (Some(n), Some(d)) => AsymptoticOrder::Decay(d as i64 - n as i64),
            (Some(_), None) => unreachable!("canonical denominator is nonzero"),
        }
    }

    /// Exact value at a rational point.
    pub fn eval(&self, at: &BigRational) -> Result<BigRational, AlgebraError> {
        let d = self.den.eval(at);
        if d.is_zero() {
            // name the linear factor (q N - p) that vanishes
            let factor = Polynomial::from_coeffs(vec![-at.numer().clone(), at.denom().clone()]);
            return Err(AlgebraError::Pole { factor: factor.to_string(), at: at.to_string() });
        }
        Ok(self.num.eval(at) / d)
    }

    pub fn eval_f64(&self, at: &BigRational) -> Result<f64, AlgebraError> {
        use num_traits::ToPrimitive;
        let v = self.eval(at)?;
        Ok(v.to_f64().unwrap_or(f64::NAN))
    }

    /// Human-oriented form with the denominator split into small integer
    /// root factors, e.g. `-N^3/(4*(N - 1)*(N + 2))`.
    pub fn to_factored_string(&self) -> String {
        if self.den.is_one() {
            return self.num.to_string();
        }
        let num_s = numerator_string(&self.num);
        let (den_roots, den_rest) = self.den.split_integer_roots();
        let mut den_factors = factor_strings(&den_roots);
        if !(den_rest.is_one() && !den_factors.is_empty()) {
            den_factors.insert(0, paren_if_sum(&den_rest));
        }
        let den_s = if den_factors.len() == 1 {
            den_factors.pop().unwrap()
        } else {
            format!("({})", den_factors.join("*"))
        };
        format!("{num_s}/{den_s}")
    }
}

/// Pulls out the power of `N` only, e.g. `-N^7*(5*N + 6)`.
fn numerator_string(num: &Polynomial) -> String {
    let terms = num.coeffs().iter().filter(|c| !c.is_zero()).count();
    let v = num.valuation().unwrap_or(0);
    if terms <= 1 || v == 0 {
        return paren_if_sum(num);
    }
    let rest = Polynomial::from_coeffs(num.coeffs()[v..].to_vec());
    let (sign, rest) = if rest.leading().is_some_and(|l| l.is_negative()) {
        ("-", -rest)
    } else {
        ("", rest)
    };
    let power = if v == 1 { "N".to_string() } else { format!("N^{v}") };
    format!("{sign}{power}*({rest})")
}

fn paren_if_sum(p: &Polynomial) -> String {
    let s = p.to_string();
    if p.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 {
        format!("({s})")
    } else {
        s
    }
}

fn factor_strings(roots: &[i64]) -> Vec<String> {
    let mut sorted = roots.to_vec();
    sorted.sort_by_key(|&r| (r != 0, r.abs(), -r));
    let mut out = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let r = sorted[i];
        let mut mult = 1;
        while i + mult < sorted.len() && sorted[i + mult] == r {
            mult += 1;
        }
        let base = match r.cmp(&0) {
            std::cmp::Ordering::Equal => "N".to_string(),
            std::cmp::Ordering::Greater => format!("(N - {r})"),
            std::cmp::Ordering::Less => format!("(N + {})", -r),
        };
        out.push(if mult > 1 { format!("{base}^{mult}") } else { base });
        i += mult;
    }
    out
}

impl Default for RationalFunction {
    fn default() -> Self {
        Self::zero()
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        write!(f, "{}/{}", paren_if_sum(&self.num), paren_if_sum(&self.den))
    }
}

impl From<Polynomial> for RationalFunction {
    fn from(p: Polynomial) -> Self {
        Self::from_poly(p)
    }
}

impl From<i64> for RationalFunction {
    fn from(c: i64) -> Self {
        Self::from_int(c)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RationalFunction::normalize(&self.num + &rhs.num, self.den.clone());
        }
        RationalFunction::normalize(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero();
        }
        RationalFunction::normalize(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr for RationalFunction {
            type Output = RationalFunction;
            fn $method(self, rhs: RationalFunction) -> RationalFunction {
                (&self).$method(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl std::iter::Sum for RationalFunction {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| &acc + &x)
    }
}

#[derive(Serialize, Deserialize)]
struct RationalFunctionJson {
    num: Vec<String>,
    den: Vec<String>,
}

impl Serialize for RationalFunction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let enc = |p: &Polynomial| p.coeffs().iter().map(|c| c.to_string()).collect();
        RationalFunctionJson { num: enc(&self.num), den: enc(&self.den) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = RationalFunctionJson::deserialize(d)?;
        let dec = |v: &[String]| -> Result<Polynomial, D::Error> {
            v.iter()
                .map(|s| s.parse::<BigInt>().map_err(D::Error::custom))
                .collect::<Result<Vec<_>, _>>()
                .map(Polynomial::from_coeffs)
        };
        RationalFunction::new(dec(&raw.num)?, dec(&raw.den)?).map_err(D::Error::custom)
    }
}
