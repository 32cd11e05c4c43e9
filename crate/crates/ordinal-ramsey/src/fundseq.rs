//! The induced system of fundamental sequences on `Γ_ζ`, descent along finite
//! sets, largeness, the `⇒_n` relation and norms.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ctx::{NormStrategy, SeqCtx};
use crate::ordinal::{
    add, compare, gamma, left_sub, mul_nat, omega_pow, sub_multiset, succ, veblen, BaseIdx, Head,
    Ordinal,
};

/// Applies `f` to `x` exactly `times` times.
fn iterate(times: u64, mut x: Ordinal, f: impl Fn(&Ordinal) -> Ordinal) -> Ordinal {
    for _ in 0..times {
        x = f(&x);
    }
    x
}

/// `Γ_ξ[n]` for an index `ξ` whose base sequence is given by `below`
/// (`None` when `ξ = 0`).
fn gamma_step(below: Option<BaseIdx>, n: u64) -> Ordinal {
    let start = match below {
        None => Ordinal::zero(),
        Some(i) => succ(&gamma(i)),
    };
    iterate(n + 1, start, |x| veblen(x, &Ordinal::zero()))
}

fn principal_step(h: &Head, n: u64, ctx: &SeqCtx) -> Ordinal {
    match h {
        Head::Veb(d, a) if d.is_zero() => {
            if a.is_zero() {
                Ordinal::zero()
            } else {
                mul_nat(&omega_pow(&fs_step(a, n, ctx)), n)
            }
        }
        Head::Veb(d, a) => {
            let dn = fs_step(d, n, ctx);
            let start = if a.is_zero() {
                Ordinal::zero()
            } else {
                succ(&veblen(d, &fs_step(a, n, ctx)))
            };
            iterate(n + 1, start, |x| veblen(&dn, x))
        }
        Head::Gam(xi) => gamma_step(SeqCtx::base_fs(xi, n), n),
    }
}

/// `α[n]`.
///
/// Panics only if a coefficient leaves the `u64` range.
pub fn fs_step(alpha: &Ordinal, n: u64, ctx: &SeqCtx) -> Ordinal {
    if alpha.is_zero() {
        return Ordinal::zero();
    }
    // Hashing walks the unshared tree, so large ordinals bypass the cache.
    let cached = !alpha.node_count_exceeds(MEMO_NODES);
    let key = (alpha.clone(), n);
    if cached {
        if let Some(v) = ctx.memo_get(&key) {
            return v;
        }
    }
    let out = match alpha.as_principal() {
        Some(h) => principal_step(h, n, ctx),
        None => {
            let (prefix, last) = alpha.split_last().expect("nonzero");
            add(&prefix, &principal_step(&last, n, ctx))
        }
    };
    if cached {
        ctx.memo_put(key, out.clone());
    }
    out
}

/// Largest representation, in term nodes, kept in the `α[n]` cache.
const MEMO_NODES: u64 = 256;

/// `Γ_ζ[n]` for the context's top ordinal.
pub fn fs_top(n: u64, ctx: &SeqCtx) -> Ordinal {
    gamma_step(ctx.top_base_fs(n), n)
}

/// `α[s] = α[s₀][s₁]…`.
pub fn fs_path(alpha: &Ordinal, s: &[u64], ctx: &SeqCtx) -> Ordinal {
    s.iter().fold(alpha.clone(), |a, &n| fs_step(&a, n, ctx))
}

/// Three-way largeness classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// Descent does not reach 0.
    Small,
    /// Descent reaches 0 exactly at the last element.
    Size,
    /// Descent reaches 0 before the last element.
    Large,
}

/// Result of classifying a finite set against an ordinal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LargenessVerdict {
    /// The classification.
    pub verdict: Verdict,
    /// `α[s]` (for `⊎` the residual of the composite descent).
    pub residual: Ordinal,
    /// Length of the size prefix when one exists.
    pub prefix_len: Option<usize>,
}

impl LargenessVerdict {
    /// Whether the set is large (Size sets are large too).
    pub fn is_large(&self) -> bool {
        self.verdict != Verdict::Small
    }
}

/// Walks the descent of `α` along `s`, returning the residual and the length
/// of the first prefix that reaches 0.
fn descend(alpha: &Ordinal, s: &[u64], ctx: &SeqCtx) -> (Ordinal, Option<usize>) {
    let mut cur = alpha.clone();
    if cur.is_zero() {
        return (cur, Some(0));
    }
    for (i, &n) in s.iter().enumerate() {
        cur = fs_step(&cur, n, ctx);
        if cur.is_zero() {
            return (cur, Some(i + 1));
        }
    }
    (cur, None)
}

/// Classifies `s` as `α`-small, `α`-size or strictly `α`-large.
///
/// The Size tag is reported whenever `s` itself is the size prefix, so
/// `(ω, ⟨2,5,8⟩)` is Size with prefix length 3.
pub fn classify_large(alpha: &Ordinal, s: &[u64], ctx: &SeqCtx) -> LargenessVerdict {
    let (residual, prefix_len) = descend(alpha, s, ctx);
    let verdict = match prefix_len {
        None => Verdict::Small,
        Some(p) if p == s.len() => Verdict::Size,
        Some(_) => Verdict::Large,
    };
    LargenessVerdict { verdict, residual, prefix_len }
}

/// Classifies `s` against `α ⊎ β`: a `β`-size prefix followed by an
/// `α`-large remainder.
pub fn uplus_classify(alpha: &Ordinal, beta: &Ordinal, s: &[u64], ctx: &SeqCtx) -> LargenessVerdict {
    let (res_b, pre_b) = descend(beta, s, ctx);
    let Some(pb) = pre_b else {
        return LargenessVerdict { verdict: Verdict::Small, residual: add(alpha, &res_b), prefix_len: None };
    };
    let inner = classify_large(alpha, &s[pb..], ctx);
    LargenessVerdict {
        verdict: inner.verdict,
        residual: inner.residual,
        prefix_len: inner.prefix_len.map(|p| p + pb),
    }
}

/// Outcome of a fueled `⇒_n` query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Implies {
    /// `β` lies on the `n`-descent from `α`.
    True,
    /// The descent passes below `β` without hitting it.
    False,
    /// The step budget ran out first.
    FuelExhausted,
}

/// Decides `α ⇒_n β`, i.e. whether `β = α[n,…,n]` for some number of `n`s.
///
/// Descent through a decomposable `x₀ + P` is split exactly: it runs through
/// `x₀ + (P's descent)` and then reaches `x₀`, so only steps on principal
/// ordinals consume fuel.
pub fn implies_n(alpha: &Ordinal, beta: &Ordinal, n: u64, ctx: &SeqCtx) -> Implies {
    let mut cur = alpha.clone();
    let mut target = beta.clone();
    let mut fuel = ctx.fuel.max_descent_steps;
    loop {
        match compare(&cur, &target) {
            Ordering::Equal => return Implies::True,
            Ordering::Less => return Implies::False,
            Ordering::Greater => {}
        }
        if target.is_zero() {
            return Implies::True;
        }
        match cur.as_principal() {
            Some(_) => {
                if fuel == 0 {
                    return Implies::FuelExhausted;
                }
                fuel -= 1;
                cur = fs_step(&cur, n, ctx);
                if cur.node_count_exceeds(ctx.fuel.max_nodes) {
                    return Implies::FuelExhausted;
                }
            }
            None => {
                let (x0, last) = cur.split_last().expect("nonzero");
                if compare(&target, &x0) != Ordering::Less {
                    target = left_sub(&target, &x0).expect("target ≥ prefix");
                    cur = Ordinal::from_head(last);
                } else {
                    cur = x0;
                }
            }
        }
    }
}

/// `Γ_ζ ⇒_n β` for the context's top ordinal.
pub fn top_implies_n(beta: &Ordinal, n: u64, ctx: &SeqCtx) -> Implies {
    implies_n(&fs_top(n, ctx), beta, n, ctx)
}

/// The structural norm: 2 plus the largest coefficient (finite `Γ` indices
/// included) plus the number of term nodes.
pub fn structural_norm(beta: &Ordinal) -> u64 {
    2 + beta.max_coeff() + beta.node_count()
}

/// Outcome of the canonical norm search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CanonicalNorm {
    /// The least `n > 1` with `Γ_ζ ⇒_n β`.
    Found(u64),
    /// Some `n` below any success ran out of fuel, or no `n` up to the search
    /// limit succeeded.
    Exhausted,
}

/// `min {n > 1 : Γ_ζ ⇒_n β}` under the context's fuel.
pub fn canonical_norm(beta: &Ordinal, ctx: &SeqCtx) -> CanonicalNorm {
    for n in 2..=ctx.fuel.max_search_n.max(2) {
        match top_implies_n(beta, n, ctx) {
            Implies::True => return CanonicalNorm::Found(n),
            Implies::False => {}
            Implies::FuelExhausted => return CanonicalNorm::Exhausted,
        }
    }
    CanonicalNorm::Exhausted
}

/// `|β|` under the context's norm strategy.
///
/// The canonical strategy falls back to the structural value when its search
/// does not finish, so the result always satisfies the goodness contract
/// checked by the test suite.
pub fn good_norm(beta: &Ordinal, ctx: &SeqCtx) -> u64 {
    match ctx.norm {
        NormStrategy::Structural => structural_norm(beta),
        NormStrategy::Canonical => match canonical_norm(beta, ctx) {
            CanonicalNorm::Found(n) => n,
            CanonicalNorm::Exhausted => structural_norm(beta),
        },
    }
}

/// Outcome of [`estimation_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EstimationVerdict {
    /// No strictly decreasing norm-bounded `h` exists among the candidates.
    NotFound {
        /// Size of the candidate pool.
        candidates: usize,
        /// Search nodes visited.
        nodes: u64,
    },
    /// A counterexample `h(s₀) > h(s₁) > …`.
    Found(Vec<Ordinal>),
    /// The node budget ran out.
    BudgetExhausted,
}

/// Precondition failure of [`estimation_check`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("precondition violated: s* is not {0}-large")]
pub struct EstimationPrecondition(pub String);

/// Searches for a strictly decreasing `h : s → α` with `|h(sᵢ)| ≤ sᵢ`.
///
/// Candidate values are the descent values `α[s₀,…,sᵢ]`, the values `α[m]`
/// for `m ≤ max s`, every member of the `Sub` multisets of those values and
/// of `α`, and the naturals up to `max s`, all restricted to ordinals below
/// `α`.
pub fn estimation_check(
    alpha: &Ordinal,
    s: &[u64],
    ctx: &SeqCtx,
    budget: u64,
) -> Result<EstimationVerdict, EstimationPrecondition> {
    let star = &s[..s.len().saturating_sub(1)];
    if s.is_empty() || !classify_large(alpha, star, ctx).is_large() {
        return Err(EstimationPrecondition(alpha.to_string()));
    }
    let top = *s.last().expect("nonempty");
    let mut seeds = vec![alpha.clone()];
    let mut cur = alpha.clone();
    for &x in s {
        cur = fs_step(&cur, x, ctx);
        seeds.push(cur.clone());
    }
    for m in 0..=top.min(64) {
        seeds.push(fs_step(alpha, m, ctx));
    }
    let mut pool: Vec<Ordinal> = (0..=top.min(64)).map(Ordinal::nat).collect();
    for x in &seeds {
        pool.extend(sub_multiset(x).distinct());
        pool.push(x.clone());
    }
    pool.retain(|x| compare(x, alpha) == Ordering::Less);
    pool.sort_by(|a, b| compare(b, a));
    pool.dedup();
    let norms: Vec<u64> = pool.iter().map(|x| good_norm(x, ctx)).collect();

    let mut nodes = 0u64;
    let mut chosen: Vec<usize> = Vec::new();
    // Pool is sorted descending, so a strictly decreasing h picks strictly
    // increasing pool positions.
    fn dfs(
        i: usize,
        start: usize,
        s: &[u64],
        norms: &[u64],
        chosen: &mut Vec<usize>,
        nodes: &mut u64,
        budget: u64,
    ) -> Option<bool> {
        if i == s.len() {
            return Some(true);
        }
        for j in start..norms.len() {
            *nodes += 1;
            if *nodes > budget {
                return None;
            }
            if norms[j] > s[i] {
                continue;
            }
            chosen.push(j);
            if dfs(i + 1, j + 1, s, norms, chosen, nodes, budget)? {
                return Some(true);
            }
            chosen.pop();
        }
        Some(false)
    }
    match dfs(0, 0, s, &norms, &mut chosen, &mut nodes, budget) {
        None => Ok(EstimationVerdict::BudgetExhausted),
        Some(true) => Ok(EstimationVerdict::Found(chosen.iter().map(|&j| pool[j].clone()).collect())),
        Some(false) => Ok(EstimationVerdict::NotFound { candidates: pool.len(), nodes }),
    }
}
