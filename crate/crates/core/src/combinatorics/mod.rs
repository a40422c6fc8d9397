//! Partitions, Wick pairings and Kronecker-delta loop counting.

mod loops;
mod pairing;
mod partition;

pub use loops::{count_loops, DeltaGraph, LoopCount, RollbackUnionFind};
pub use pairing::{double_factorial_odd, enumerate_pairings, Pairing, PairingKind, Pairings};
pub use partition::{enumerate_partitions, partitions_of, InvalidPartition, Partition};
