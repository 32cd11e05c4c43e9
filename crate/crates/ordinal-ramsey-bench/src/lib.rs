//! Shared fixtures for the criterion benchmarks.

use ordinal_ramsey::front::make_uniform;
use ordinal_ramsey::parse::ord;
use ordinal_ramsey::sample::{FuzzConfig, Sampler};
use ordinal_ramsey::{BaseStream, Front, Ordinal};

/// Ordinals with fundamental sequences of increasing cost.
pub fn fs_inputs() -> Vec<(&'static str, Ordinal)> {
    vec![
        ("w^(w)", ord("w^(w)")),
        ("eps(0)", ord("eps(0)")),
        ("phi(w,1)", ord("phi(w,1)")),
        ("G(1)", ord("G(1)")),
    ]
}

/// `count` seeded ordered pairs `(γ, β)` with `γ < β`.
pub fn ordered_pairs(seed: u64, count: usize) -> Vec<(Ordinal, Ordinal)> {
    let mut smp = Sampler::new(FuzzConfig { seed, ..Default::default() });
    (0..count).map(|_| smp.ordered_pair()).collect()
}

/// `count` seeded strictly decreasing tuples of length 3 and depth 3.
pub fn peel_tuples(seed: u64, count: usize) -> Vec<Vec<Ordinal>> {
    let mut smp = Sampler::new(FuzzConfig { seed, max_depth: 3, ..Default::default() });
    (0..count).map(|_| smp.decreasing_tuple(3, None)).collect()
}

/// `k` copies of the uniform front of `n`-sets.
pub fn uniform_fronts(n: u64, k: usize) -> Vec<Front> {
    vec![make_uniform(n, BaseStream::AllFrom(0)); k]
}
