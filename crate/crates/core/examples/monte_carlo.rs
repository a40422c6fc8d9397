//! Haar sampling and a Monte Carlo check of an exact integral.

use wickint::haar::{cross_check, sample_haar, symmetry_residual, unitarity_residual};
use wickint::integrator::integrate_monomial;
use wickint::{solve_weight, Ensemble, MonomialSpec};

fn main() {
    let s = sample_haar(Ensemble::Coe, 6, 7).unwrap();
    println!("COE sample: unitarity {:.1e}, symmetry {:.1e}", unitarity_residual(&s), symmetry_residual(&s));

    let spec = MonomialSpec::parse("M[1,1] M[1,1] Mc[1,1] Mc[1,1]").unwrap();
    let w = solve_weight(Ensemble::Unitary, 2).unwrap();
    let exact = integrate_monomial(&w, &spec).unwrap().as_scalar().unwrap();
    let r = cross_check(&exact, Ensemble::Unitary, &spec, 6, 200_000, 1).unwrap();
    println!(
        "<|U11|^4> at N=6: exact {:.6}, sampled {:.6} +- {:.6}, z = {:.2}, {}",
        r.exact,
        r.mc_mean,
        r.stderr,
        r.z,
        if r.pass { "agree" } else { "disagree" }
    );
}
