//! How fast the weighted Gram products approach the group value beyond the
//! exact range.

use wickint::integrator::{error_order, trace_deviation};
use wickint::{solve_weight, Ensemble};

fn main() {
    for e in [Ensemble::Orthogonal, Ensemble::Unitary] {
        for kappa in 1..=3u32 {
            let w = solve_weight(e, kappa).unwrap();
            for k in kappa as usize + 1..=kappa as usize + 2 {
                let r = error_order(&w, k);
                println!(
                    "{e} kappa={kappa} k={k}: decay {} (bound {}) {}",
                    r.observed,
                    r.bound,
                    if r.passed { "ok" } else { "below bound" }
                );
            }
        }
    }
    let w = solve_weight(Ensemble::Orthogonal, 2).unwrap();
    println!("trace deviation at k=3: {}", trace_deviation(&w, 3).to_factored_string());
}
