//! The two COE normalizations give different weights but the same group
//! integrals.

use wickint::integrator::integrate_monomial;
use wickint::{solve_weight, Ensemble, MonomialSpec, Partition};

fn main() {
    let spec = MonomialSpec::parse("M[1,1] M[1,2] Mc[1,1] Mc[1,2]").unwrap();
    for e in [Ensemble::Coe, Ensemble::CoeNormalized] {
        let w = solve_weight(e, 2).unwrap();
        let c0 = w.coefficient(&Partition::empty()).unwrap();
        let v = integrate_monomial(&w, &spec).unwrap().as_scalar().unwrap();
        println!("{e}: c0 = {}, <S11 S12 conj(S11 S12)> = {}", c0.to_factored_string(), v.to_factored_string());
    }
}
