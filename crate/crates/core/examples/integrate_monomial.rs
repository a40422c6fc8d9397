//! Exact group integrals of matrix-entry monomials, concrete and symbolic.

use num_bigint::BigInt;
use num_rational::BigRational;
use wickint::integrator::integrate_monomial;
use wickint::{solve_weight, Ensemble, MonomialSpec};

fn main() {
    let cases = [
        (Ensemble::Orthogonal, "M[1,1] M[1,1] M[1,1] M[1,1]"),
        (Ensemble::Orthogonal, "M[1,1] M[1,1] M[2,2] M[2,2]"),
        (Ensemble::Orthogonal, "M[i,j] M[k,l]"),
        (Ensemble::Unitary, "M[1,1] M[2,2] Mc[1,2] Mc[2,1]"),
        (Ensemble::Coe, "M[1,2] Mc[1,2]"),
    ];
    let at = BigRational::from_integer(BigInt::from(4));
    for (e, text) in cases {
        let spec = MonomialSpec::parse(text).unwrap();
        // degree 2 kappa is integrated exactly
        let w = solve_weight(e, spec.degree().div_ceil(2) as u32).unwrap();
        let value = integrate_monomial(&w, &spec).unwrap();
        match value.as_scalar() {
            Some(v) => println!("{e} <{text}> = {} (N = 4: {})", v.to_factored_string(), v.eval(&at).unwrap()),
            None => println!("{e} <{text}> = {value}"),
        }
    }
}
