//! Exact integration of matrix-element monomials over O(N), U(N) and the
//! circular orthogonal ensemble by weighted Wick contraction.
//!
//! Integrals over the compact space are replaced by Gaussian integrals with a
//! polynomial weight `w_kappa` built from trace invariants. The weight is
//! fixed by requiring that every invariant of degree at most `2 kappa` takes
//! its exact value; monomials up to that degree then integrate exactly, and
//! higher ones with an error that is a fixed power of `1/N`. All symbolic
//! results are exact rational functions of the dimension `N`.
//!
//! Modules, bottom-up:
//!
//! - [`algebra`]: polynomials and rational functions in `N`, exact solving.
//! - [`combinatorics`]: partitions, pairings, delta loop counting.
//! - [`wick`]: Gaussian moments, trace moments, connected parts.
//! - [`weight`]: Gram systems and weight functions.
//! - [`integrator`]: weighted integrals and `1/N` error orders.
//! - [`haar`]: Monte Carlo cross-checks against sampled Haar/COE matrices.
//! - [`cli`]: the `wickint` command line.

pub mod algebra;
pub mod cli;
pub mod combinatorics;
pub mod haar;
pub mod integrator;
pub mod weight;
pub mod wick;

pub use algebra::{AsymptoticOrder, Polynomial, RationalFunction};
pub use combinatorics::Partition;
pub use weight::{solve_weight, WeightFunction};
pub use wick::{DeltaExpansion, Ensemble, Label, MonomialSpec};
