//! Monte Carlo estimates of exact Haar and COE averages, used as an
//! independent numerical check on the symbolic results.
//!
//! This is the only floating-point code in the crate.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{AlgebraError, RationalFunction};
use crate::wick::{Ensemble, Label, MonomialSpec, WickError};

/// Samples per independent random stream.
const CHUNK: u64 = 1 << 14;
pub const MIN_SAMPLES: u64 = 10_000;
/// Agreement threshold in standard errors.
pub const Z_TOLERANCE: f64 = 5.0;

#[derive(Debug, Error)]
pub enum HaarError {
    #[error("matrix dimension must be at least 1")]
    EmptyDimension,
    #[error("at least {MIN_SAMPLES} samples are required, got {0}")]
    TooFewSamples(u64),
    #[error("index {index} is outside 1..={n}")]
    IndexOutOfRange { index: u64, n: usize },
    #[error("label '{0}' is symbolic; sampling needs concrete indices")]
    SymbolicIndex(String),
    #[error(transparent)]
    Wick(#[from] WickError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Draws one matrix: Haar orthogonal, Haar unitary, or `U^T U` for the COE.
/// Orthogonal samples have zero imaginary part.
pub fn sample_matrix<R: Rng>(ensemble: Ensemble, n: usize, rng: &mut R) -> DMatrix<Complex64> {
    match ensemble {
        Ensemble::Orthogonal => haar_orthogonal(n, rng).map(|x| Complex64::new(x, 0.0)),
        Ensemble::Unitary => haar_unitary(n, rng),
        Ensemble::Coe | Ensemble::CoeNormalized => {
            let u = haar_unitary(n, rng);
            u.transpose() * u
        }
    }
}

/// [`sample_matrix`] from a fresh generator seeded with `seed`.
pub fn sample_haar(ensemble: Ensemble, n: usize, seed: u64) -> Result<DMatrix<Complex64>, HaarError> {
    if n == 0 {
        return Err(HaarError::EmptyDimension);
    }
    Ok(sample_matrix(ensemble, n, &mut ChaCha8Rng::seed_from_u64(seed)))
}

fn haar_orthogonal<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    // without this sign fix the distribution is not Haar
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

fn haar_unitary<R: Rng>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    let g = DMatrix::<Complex64>::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let norm = d.norm();
        if norm > 0.0 {
            let phase = d / norm;
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Largest entry of `|A A^dagger - I|`.
pub fn unitarity_residual(a: &DMatrix<Complex64>) -> f64 {
    let n = a.nrows();
    let prod = a * a.adjoint();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Largest entry of `|A - A^T|`.
pub fn symmetry_residual(a: &DMatrix<Complex64>) -> f64 {
    (a - a.transpose()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Sample mean of a monomial with its standard error.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    /// Mean of the real part.
    pub mean: f64,
    pub standard_error: f64,
    /// Mean of the imaginary part; near zero whenever the exact value is real.
    pub imag_mean: f64,
    pub samples: u64,
    pub seed: u64,
    pub n: usize,
}

/// Running moments of one chunk, merged in a fixed order.
#[derive(Clone, Copy, Default)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
    imag_sum: f64,
}

impl Moments {
    fn push(&mut self, z: Complex64) {
        self.count += 1.0;
        let d = z.re - self.mean;
        self.mean += d / self.count;
        self.m2 += d * (z.re - self.mean);
        self.imag_sum += z.im;
    }

    fn merge(self, other: Self) -> Self {
        if self.count == 0.0 {
            return other;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        Self {
            count,
            mean: self.mean + d * other.count / count,
            m2: self.m2 + other.m2 + d * d * self.count * other.count / count,
            imag_sum: self.imag_sum + other.imag_sum,
        }
    }
}

/// Zero-based `(row, col, conj)` for every factor.
fn concrete_slots(monomial: &MonomialSpec, n: usize) -> Result<Vec<(usize, usize, bool)>, HaarError> {
    let index = |l: &Label| match l {
        Label::Index(i) if (1..=n as u64).contains(i) => Ok(*i as usize - 1),
        Label::Index(i) => Err(HaarError::IndexOutOfRange { index: *i, n }),
        Label::Name(s) => Err(HaarError::SymbolicIndex(s.clone())),
    };
    monomial
        .slots
        .iter()
        .map(|s| Ok((index(&s.row)?, index(&s.col)?, s.conj)))
        .collect()
}

/// Estimates the group average of a monomial with concrete indices.
///
/// Chunk `c` of the samples uses stream `c` of a ChaCha8 generator seeded
/// with `seed`, and chunks are merged in index order, so the estimate does not
/// depend on the thread count.
pub fn mc_integrate(
    ensemble: Ensemble,
    monomial: &MonomialSpec,
    n: usize,
    samples: u64,
    seed: u64,
) -> Result<McEstimate, HaarError> {
    monomial.validate(ensemble)?;
    if n == 0 {
        return Err(HaarError::EmptyDimension);
    }
    if samples < MIN_SAMPLES {
        return Err(HaarError::TooFewSamples(samples));
    }
    let slots = concrete_slots(monomial, n)?;
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = CHUNK.min(samples - c * CHUNK);
            let mut acc = Moments::default();
            for _ in 0..count {
                let m = sample_matrix(ensemble, n, &mut rng);
                let value = slots.iter().fold(Complex64::new(1.0, 0.0), |p, &(i, j, conj)| {
                    let x = m[(i, j)];
                    p * if conj { x.conj() } else { x }
                });
                acc.push(value);
            }
            acc
        })
        .collect();
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);
    let variance = total.m2 / (total.count - 1.0);
    Ok(McEstimate {
        mean: total.mean,
        standard_error: (variance / total.count).sqrt(),
        imag_mean: total.imag_sum / total.count,
        samples,
        seed,
        n,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossCheck {
    pub exact: f64,
    pub mc_mean: f64,
    pub stderr: f64,
    pub z: f64,
    pub pass: bool,
    pub seed: u64,
}

/// Compares a symbolic value at `N = n` with a Monte Carlo estimate.
pub fn cross_check(
    symbolic: &RationalFunction,
    ensemble: Ensemble,
    monomial: &MonomialSpec,
    n: usize,
    samples: u64,
    seed: u64,
) -> Result<CrossCheck, HaarError> {
    let exact = symbolic.eval_f64(&BigRational::from_integer(BigInt::from(n)))?;
    let est = mc_integrate(ensemble, monomial, n, samples, seed)?;
    let diff = (est.mean - exact).abs();
    let z = if est.standard_error > 0.0 {
        diff / est.standard_error
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(CrossCheck {
        exact,
        mc_mean: est.mean,
        stderr: est.standard_error,
        z,
        pass: diff <= Z_TOLERANCE * est.standard_error,
        seed,
    })
}
