//! Seeded generators for ordinals, sets and tuples, plus shrinking.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ordinal::{add, compare, gamma, mul_nat, omega_pow, veblen, BaseIdx, Head, Ordinal, Term};

/// Parameters of a reproducible sample stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FuzzConfig {
    /// Stream seed.
    pub seed: u64,
    /// Number of samples.
    pub samples: u64,
    /// Maximum representation depth.
    pub max_depth: u32,
    /// Probability that a principal head is `Γ_ξ`.
    pub gamma_prob: f64,
    /// `Γ_ξ` heads use `ξ < max_gamma_index`.
    pub max_gamma_index: u64,
    /// Largest coefficient drawn.
    pub max_coeff: u64,
    /// Inclusive range of `n` for fundamental sequences.
    pub n_range: (u64, u64),
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            seed: 0,
            samples: 1000,
            max_depth: 6,
            gamma_prob: 0.1,
            max_gamma_index: 3,
            max_coeff: 3,
            n_range: (2, 9),
        }
    }
}

/// A sample stream bound to a [`FuzzConfig`].
#[derive(Debug, Clone)]
pub struct Sampler {
    /// The configuration.
    pub cfg: FuzzConfig,
    rng: ChaCha8Rng,
}

impl Sampler {
    /// A stream seeded from `cfg.seed`.
    pub fn new(cfg: FuzzConfig) -> Self {
        Sampler { cfg, rng: ChaCha8Rng::seed_from_u64(cfg.seed) }
    }

    /// The underlying generator.
    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// An `n` from the configured range.
    pub fn n(&mut self) -> u64 {
        let (lo, hi) = self.cfg.n_range;
        self.rng.gen_range(lo..=hi)
    }

    /// An ordinal of depth at most `cfg.max_depth`.
    pub fn ordinal(&mut self) -> Ordinal {
        let d = self.cfg.max_depth;
        self.ordinal_depth(d)
    }

    /// An ordinal of depth at most `depth`.
    pub fn ordinal_depth(&mut self, depth: u32) -> Ordinal {
        if depth <= 1 || self.rng.gen_bool(0.15) {
            return Ordinal::nat(self.rng.gen_range(0..=self.cfg.max_coeff + 2));
        }
        let terms = self.rng.gen_range(1..=3);
        let mut acc = Ordinal::zero();
        let mut parts: Vec<Ordinal> = (0..terms).map(|_| self.principal(depth - 1)).collect();
        parts.sort_by(|a, b| compare(b, a));
        for p in parts {
            let c = self.rng.gen_range(1..=self.cfg.max_coeff.max(1));
            acc = add(&acc, &mul_nat(&p, c));
        }
        if self.rng.gen_bool(0.3) {
            acc = add(&acc, &Ordinal::nat(self.rng.gen_range(1..=self.cfg.max_coeff.max(1))));
        }
        acc
    }

    /// A principal ordinal built from arguments of depth below `depth`.
    pub fn principal(&mut self, depth: u32) -> Ordinal {
        if self.cfg.max_gamma_index > 0 && self.rng.gen_bool(self.cfg.gamma_prob) {
            return gamma(BaseIdx::Fin(self.rng.gen_range(0..self.cfg.max_gamma_index)));
        }
        let sub = depth.saturating_sub(1).max(1);
        let a = if self.rng.gen_bool(0.6) { Ordinal::zero() } else { self.ordinal_depth(sub.min(2)) };
        let b = self.ordinal_depth(sub);
        veblen(&a, &b)
    }

    /// A pair `(γ, β)` with `γ < β`.
    pub fn ordered_pair(&mut self) -> (Ordinal, Ordinal) {
        loop {
            let x = self.ordinal();
            let y = self.ordinal();
            match compare(&x, &y) {
                std::cmp::Ordering::Less => return (x, y),
                std::cmp::Ordering::Greater => return (y, x),
                std::cmp::Ordering::Equal => continue,
            }
        }
    }

    /// A finite set of at most `max_len` elements drawn from `[lo, hi)`.
    pub fn finite_set(&mut self, lo: u64, hi: u64, max_len: usize) -> Vec<u64> {
        let mut pool: Vec<u64> = (lo..hi).collect();
        pool.shuffle(&mut self.rng);
        let len = self.rng.gen_range(0..=max_len.min(pool.len()));
        let mut v = pool[..len].to_vec();
        v.sort_unstable();
        v
    }

    /// A strictly decreasing tuple of `len` ordinals, each below `bound`
    /// when `bound` is given.
    pub fn decreasing_tuple(&mut self, len: usize, bound: Option<&Ordinal>) -> Vec<Ordinal> {
        let mut v: Vec<Ordinal> = Vec::with_capacity(len);
        let mut guard = 0;
        while v.len() < len && guard < 50 * len + 50 {
            guard += 1;
            let x = self.ordinal();
            if bound.map(|b| compare(&x, b).is_lt()).unwrap_or(true) && !v.contains(&x) {
                v.push(x);
            }
        }
        v.sort_by(|a, b| compare(b, a));
        v
    }
}

/// All increasing subsets of `ground` with at most `max_len` elements, in
/// lexicographic order.
pub fn subsets_of(ground: &[u64], max_len: usize) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    fn rec(ground: &[u64], from: usize, cur: &mut Vec<u64>, max_len: usize, out: &mut Vec<Vec<u64>>) {
        if cur.len() == max_len {
            return;
        }
        for i in from..ground.len() {
            cur.push(ground[i]);
            out.push(cur.clone());
            rec(ground, i + 1, cur, max_len, out);
            cur.pop();
        }
    }
    rec(ground, 0, &mut Vec::new(), max_len, &mut out);
    out
}

/// Corner cases shrinking aims for, in increasing order.
pub fn corner_cases() -> Vec<Ordinal> {
    vec![Ordinal::zero(), Ordinal::one(), Ordinal::omega(), Ordinal::epsilon(0), gamma(BaseIdx::Fin(0))]
}

/// Smaller candidates for `x`: dropped terms, lowered coefficients, heads
/// replaced by their arguments, and corner cases below `x`.
pub fn shrink_candidates(x: &Ordinal) -> Vec<Ordinal> {
    let mut out = Vec::new();
    let terms = x.terms();
    for i in 0..terms.len() {
        let mut t: Vec<Term> = terms.to_vec();
        t.remove(i);
        out.push(Ordinal::from_terms(t));
        if terms[i].coeff > 1 {
            let mut t = terms.to_vec();
            t[i].coeff -= 1;
            out.push(Ordinal::from_terms(t));
        }
    }
    if let Some(h) = x.as_principal() {
        match h {
            Head::Veb(a, b) => {
                out.push(b.clone());
                out.push(a.clone());
                for b2 in shrink_candidates(b) {
                    out.push(veblen(a, &b2));
                }
                for a2 in shrink_candidates(a) {
                    out.push(veblen(&a2, b));
                }
                if !a.is_zero() {
                    out.push(omega_pow(b));
                }
            }
            Head::Gam(BaseIdx::Fin(k)) if *k > 0 => out.push(gamma(BaseIdx::Fin(k - 1))),
            Head::Gam(_) => {}
        }
    }
    out.extend(corner_cases());
    out.retain(|y| compare(y, x).is_lt());
    out.sort_by(compare);
    out.dedup();
    out
}

/// Greedily shrinks `x` while `still_fails` holds, trying smaller candidates
/// first; at most `max_steps` successful steps.
pub fn shrink_while(x: &Ordinal, mut still_fails: impl FnMut(&Ordinal) -> bool, max_steps: usize) -> Ordinal {
    let mut cur = x.clone();
    for _ in 0..max_steps {
        match shrink_candidates(&cur).into_iter().find(|c| still_fails(c)) {
            Some(next) => cur = next,
            None => break,
        }
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::ord;

    #[test]
    fn streams_are_reproducible() {
        let cfg = FuzzConfig { seed: 7, ..Default::default() };
        let a: Vec<Ordinal> = { let mut s = Sampler::new(cfg); (0..50).map(|_| s.ordinal()).collect() };
        let b: Vec<Ordinal> = { let mut s = Sampler::new(cfg); (0..50).map(|_| s.ordinal()).collect() };
        assert_eq!(a, b);
        let mut s = Sampler::new(cfg);
        for _ in 0..200 {
            assert!(s.ordinal().depth() <= cfg.max_depth + 1);
            let (x, y) = s.ordered_pair();
            assert!(compare(&x, &y).is_lt());
        }
    }

    #[test]
    fn subsets_and_shrinking() {
        assert_eq!(subsets_of(&[1, 2, 3], 2).len(), 7);
        let x = ord("eps(0)+w^(w)*2");
        let c = shrink_candidates(&x);
        assert!(c.iter().all(|y| compare(y, &x).is_lt()));
        let small = shrink_while(&x, |y| compare(y, &ord("w")).is_gt(), 100);
        assert_eq!(small, ord("w^(w)"));
    }
}
