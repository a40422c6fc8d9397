//! Gaussian and weighted moments of trace invariants.

use wickint::wick::gaussian_trace_moment;
use wickint::{solve_weight, Ensemble, Partition};

fn main() {
    let w = solve_weight(Ensemble::Orthogonal, 3).unwrap();
    for parts in [vec![1], vec![2], vec![1, 1], vec![3], vec![2, 1]] {
        let p = Partition::from_unsorted(parts.clone()).unwrap();
        let plain = gaussian_trace_moment(Ensemble::Orthogonal, &[p]);
        let weighted = w.weighted_trace_moment(&parts);
        println!("{parts:?}: gaussian {plain}   weighted {weighted}");
    }
}
