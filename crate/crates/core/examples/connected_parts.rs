//! Connected parts of Gram products, with and without a weight.

use wickint::integrator::{connected_order, weighted_connected_moment, weighted_connected_order};
use wickint::{solve_weight, Ensemble};

fn main() {
    for e in Ensemble::ALL {
        let orders: Vec<String> = (1..=4).map(|k| connected_order(e, k).unwrap().to_string()).collect();
        println!("{e}: plain connected orders k=1..4: {}", orders.join(" "));
    }
    let w = solve_weight(Ensemble::Unitary, 3).unwrap();
    println!("\nweighted connected part, unitary kappa=3, k=2:");
    println!("{}", weighted_connected_moment(&w, 2).unwrap());
    for k in 2..=3 {
        let r = weighted_connected_order(&w, k).unwrap();
        println!("k={k}: decay {} (bound {})", r.observed, r.bound);
    }
}
