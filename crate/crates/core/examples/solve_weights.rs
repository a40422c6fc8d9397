//! Solves the weight functions for each ensemble and prints their
//! coefficients.

use wickint::weight::verify_conditions;
use wickint::{solve_weight, Ensemble};

fn main() {
    let kappa: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    for e in Ensemble::ALL {
        let w = solve_weight(e, kappa).expect("gram system is nonsingular");
        println!("{e}, kappa = {kappa}");
        print!("{}", w.to_text());
        let ok = (1..=kappa as usize).all(|k| verify_conditions(&w, k).is_ok_and(|r| r.passed));
        println!("conditions hold up to k = {kappa}: {ok}\n");
    }
}
