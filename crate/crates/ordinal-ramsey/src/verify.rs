//! Deterministic property campaigns over sampled inputs, with replayable
//! witnesses and machine-readable reports.
//!
//! Every property is a [`Check`]: a self-contained input that evaluates to
//! holds, violated or not applicable. Campaigns draw checks from a seeded
//! [`Sampler`], shrink violating inputs toward small corner cases and store
//! them as JSON witnesses that [`replay`] evaluates again.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::ctx::{Fuel, NormStrategy, SeqCtx};
use crate::finite_set::FiniteSet;
use crate::front::{make_alpha_size, smooth_check, tail, BaseStream, Class, Front, SmoothSampler};
use crate::fundseq::{canonical_norm, classify_large, fs_path, fs_step, structural_norm, CanonicalNorm, Verdict};
use crate::lower::{s_set, DPartition, PeelMode, Peeler};
use crate::ordinal::{add, compare, geqq, mul_nat, omega_pow, philog_apply, sub_multiset, veblen, Ordinal};
use crate::parse::ord;
use crate::sample::{shrink_candidates, FuzzConfig, Sampler};

/// Stored witnesses per report.
const WITNESS_CAP: usize = 16;
/// Random-walk length in the smoothness sampler; classification cost grows
/// quickly with the walk length for large `α`.
const SMOOTH_WALK: usize = 16;
/// Size limit for intermediate values of `α[s]` in the subset check.
const PATH_NODES: u64 = 20_000;
/// Successful shrinking steps per witness.
const SHRINK_STEPS: usize = 40;

/// The property families a campaign can exercise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CampaignKind {
    /// Nestedness clauses (A) and (B).
    Nested,
    /// The regularity identity on decomposable ordinals.
    Regular,
    /// Goodness of the norm, and canonical against structural norms.
    Goodness,
    /// Monotone descent under pointwise smaller sets.
    Subset,
    /// Peeling laws, the convergence shortcut and d-partitions.
    Peeling,
    /// `ζ_A` membership and the linear scan.
    Zeta,
    /// Height annotations, tails, the trichotomy and smoothness of `B^α`.
    FrontLaws,
}

impl CampaignKind {
    /// All kinds in CLI order.
    pub const ALL: [CampaignKind; 7] = [
        CampaignKind::Nested,
        CampaignKind::Regular,
        CampaignKind::Goodness,
        CampaignKind::Subset,
        CampaignKind::Peeling,
        CampaignKind::Zeta,
        CampaignKind::FrontLaws,
    ];

    /// The kebab-case name.
    pub fn name(self) -> &'static str {
        match self {
            CampaignKind::Nested => "nested",
            CampaignKind::Regular => "regular",
            CampaignKind::Goodness => "goodness",
            CampaignKind::Subset => "subset",
            CampaignKind::Peeling => "peeling",
            CampaignKind::Zeta => "zeta",
            CampaignKind::FrontLaws => "front-laws",
        }
    }
}

impl fmt::Display for CampaignKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CampaignKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CampaignKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| format!("unknown campaign kind {s:?}"))
    }
}

/// Overall result of a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    /// Every applicable check held.
    Pass,
    /// Some check was violated; witnesses are attached.
    Violation,
    /// The budget ran out before the configured work was done.
    Exhausted,
}

impl Outcome {
    /// Process exit code: 0 pass, 1 violation, 3 budget exhaustion.
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Violation => 1,
            Outcome::Exhausted => 3,
        }
    }
}

/// A machine-readable run summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    /// The command that produced the report.
    pub command: String,
    /// Its parameters.
    pub params: Value,
    /// Overall verdict.
    pub verdict: Outcome,
    /// Replayable witnesses (for campaigns, serialized [`Check`]s).
    pub witnesses: Vec<Value>,
    /// Named counters.
    pub counters: BTreeMap<String, u64>,
    /// Wall time.
    pub seconds: f64,
}

impl Report {
    /// The JSON rendering with the wall time zeroed, identical across runs
    /// with the same command and seed.
    pub fn deterministic_json(&self) -> String {
        let mut r = self.clone();
        r.seconds = 0.0;
        serde_json::to_string(&r).expect("report serializes")
    }
}

/// Result of evaluating one [`Check`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckResult {
    /// The property holds on this input.
    Holds,
    /// The property fails; the string explains how.
    Violated(String),
    /// The input does not meet the property's hypothesis.
    NotApplicable,
}

impl CheckResult {
    fn from_bool(ok: bool, why: impl FnOnce() -> String) -> Self {
        if ok {
            CheckResult::Holds
        } else {
            CheckResult::Violated(why())
        }
    }

    /// Whether the result is a violation.
    pub fn is_violated(&self) -> bool {
        matches!(self, CheckResult::Violated(_))
    }
}

/// One property instance. Serializes with a `check` tag and ordinals in text
/// syntax, so witnesses can be stored and replayed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "kebab-case")]
pub enum Check {
    /// For `γ < β`: not `γ[n] < β[n] < γ`.
    NestedA { gamma: Ordinal, beta: Ordinal, n: u64 },
    /// If `γ < φ_δ(γ)`: not `γ[n] < φ_δ(β[n]) < γ < φ_δ(β)`.
    NestedB { gamma: Ordinal, beta: Ordinal, delta: Ordinal, n: u64 },
    /// `(β₀ + ω^{β₁})[n] = β₀ + ω^{β₁}[n]` for `alpha` with two or more
    /// expanded terms.
    Regular { alpha: Ordinal, n: u64 },
    /// `|s| ≤ |t|` and `1 < t(i) ≤ s(i)` imply `α[t] ≤ α[s]`.
    Subset { alpha: Ordinal, s: Vec<u64>, t: Vec<u64> },
    /// `β < δ` implies `β ≤ δ[|β|]` for the structural norm.
    Goodness { beta: Ordinal, delta: Ordinal },
    /// When the canonical search completes, canonical `≤` structural, and
    /// the canonical value is good against `delta`.
    CanonicalNorm { beta: Ordinal, delta: Ordinal },
    /// For `ν < ρ`, each entry of `p̄_ρ(A)` is in `Sub` of the entry of `p̄_ν(A)`.
    PeelSub { rho: Ordinal, nu: Ordinal, tuple: Vec<Ordinal> },
    /// Entries below `φ_δ(β)` peel under `p̄_{ω^δ}` to 0 or below `β`.
    PeelPowerBound { delta: Ordinal, beta: Ordinal, tuple: Vec<Ordinal> },
    /// Entries below `φ_{log δ}(β)` peel under `p̄_δ` to 0 or below `β`.
    PeelLogBound { delta: Ordinal, beta: Ordinal, tuple: Vec<Ordinal> },
    /// `p̄_ρ(A)⁻ = p̄_ρ(A⁻)`.
    PeelSuffix { rho: Ordinal, tuple: Vec<Ordinal> },
    /// The early-exit limit agrees with literal composition.
    PeelShortcut { rho: Ordinal, tuple: Vec<Ordinal> },
    /// `ζ_A ∈ S(A(0))`.
    ZetaMember { tuple: Vec<Ordinal>, gamma: Ordinal },
    /// `ζ_A` over `S(A(0))` agrees with the scan over `0..=γ`.
    ZetaLinear { tuple: Vec<Ordinal>, gamma: u64 },
    /// For limit `ζ_A = ζ' + ω^δ`: `p̄_{<ζ_A}(A)` starts `φ_δ(0), 0`.
    LimitCase { tuple: Vec<Ordinal>, gamma: Ordinal },
    /// The d-partition classifies, `π_i` is increasing on a class and
    /// `π_i⁻¹ ∘ π_i` is the identity.
    DPartition { alpha: Ordinal, k: u64, x: Ordinal, y: Ordinal },
    /// `ht_{B^α}(t) = α[t]`.
    FrontHeight { alpha: Ordinal, t: Vec<u64> },
    /// `s` classifies in `tail(B^α, t)` exactly as against `α[t]`.
    FrontTail { alpha: Ordinal, t: Vec<u64>, s: Vec<u64> },
    /// For Size `u` split as `t⌢s` with `α = β₀ + ω^{β₁}`: `ht(t) = β₀` iff
    /// `t` is `ω^{β₁}`-size iff `s` is `β₀`-size.
    FrontTrichotomy { alpha: Ordinal, u: Vec<u64>, split: usize },
    /// Smoothness sampling of `B^α` finds no violating pair.
    FrontSmooth { alpha: Ordinal, seed: u64, trials: u64 },
    /// `β > γ > β[n] > γ[n]`: the Bachmann property fails at this input.
    BachmannChain { beta: Ordinal, gamma: Ordinal, n: u64 },
}

fn lt(a: &Ordinal, b: &Ordinal) -> bool {
    compare(a, b) == Ordering::Less
}

fn le(a: &Ordinal, b: &Ordinal) -> bool {
    compare(a, b) != Ordering::Greater
}

fn is_increasing(v: &[u64]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

/// `α[s]`, or `None` once an intermediate value exceeds [`PATH_NODES`] term
/// nodes.
fn fs_path_capped(alpha: &Ordinal, s: &[u64], ctx: &SeqCtx) -> Option<Ordinal> {
    let mut cur = alpha.clone();
    for &n in s {
        cur = fs_step(&cur, n, ctx);
        if cur.node_count_exceeds(PATH_NODES) {
            return None;
        }
    }
    Some(cur)
}

fn alpha_front(alpha: &Ordinal, ctx: &SeqCtx) -> Front {
    make_alpha_size(alpha, BaseStream::AllFrom(2), ctx).expect("base starts at 2")
}

fn render(v: &[Ordinal]) -> String {
    let parts: Vec<String> = v.iter().map(Ordinal::to_string).collect();
    format!("({})", parts.join(", "))
}

impl Check {
    /// Short name, equal to the serialized `check` tag.
    pub fn name(&self) -> String {
        match serde_json::to_value(self) {
            Ok(Value::Object(m)) => m.get("check").and_then(Value::as_str).unwrap_or("check").to_string(),
            _ => "check".into(),
        }
    }

    /// Evaluates the property.
    pub fn eval(&self, ctx: &SeqCtx) -> CheckResult {
        match self.eval_inner(ctx) {
            Ok(r) => r,
            Err(e) => CheckResult::Violated(format!("error: {e}")),
        }
    }

    fn eval_inner(&self, ctx: &SeqCtx) -> Result<CheckResult, String> {
        let err = |e: &dyn fmt::Display| e.to_string();
        Ok(match self {
            Check::NestedA { gamma, beta, n } => {
                if !lt(gamma, beta) || *n < 2 {
                    return Ok(CheckResult::NotApplicable);
                }
                let (gn, bn) = (fs_step(gamma, *n, ctx), fs_step(beta, *n, ctx));
                CheckResult::from_bool(!(lt(&gn, &bn) && lt(&bn, gamma)), || format!("γ[n] = {gn} < β[n] = {bn} < γ"))
            }
            Check::NestedB { gamma, beta, delta, n } => {
                if *n < 2 || !lt(gamma, &veblen(delta, gamma)) {
                    return Ok(CheckResult::NotApplicable);
                }
                let gn = fs_step(gamma, *n, ctx);
                let mid = veblen(delta, &fs_step(beta, *n, ctx));
                let top = veblen(delta, beta);
                let chain = lt(&gn, &mid) && lt(&mid, gamma) && lt(gamma, &top);
                CheckResult::from_bool(!chain, || format!("γ[n] = {gn} < φ_δ(β[n]) = {mid} < γ < φ_δ(β) = {top}"))
            }
            Check::Regular { alpha, n } => {
                let Some((b0, head)) = alpha.split_last() else { return Ok(CheckResult::NotApplicable) };
                if b0.is_zero() || *n < 2 {
                    return Ok(CheckResult::NotApplicable);
                }
                let w = Ordinal::from_head(head);
                let lhs = fs_step(alpha, *n, ctx);
                let rhs = add(&b0, &fs_step(&w, *n, ctx));
                CheckResult::from_bool(lhs == rhs, || format!("{lhs} ≠ {rhs}"))
            }
            Check::Subset { alpha, s, t } => {
                let pre = is_increasing(s)
                    && is_increasing(t)
                    && s.len() <= t.len()
                    && s.iter().zip(t).all(|(si, ti)| 1 < *ti && ti <= si);
                if !pre {
                    return Ok(CheckResult::NotApplicable);
                }
                let (Some(at), Some(as_)) = (fs_path_capped(alpha, t, ctx), fs_path_capped(alpha, s, ctx)) else {
                    return Ok(CheckResult::NotApplicable);
                };
                CheckResult::from_bool(le(&at, &as_), || format!("α[t] = {at} > α[s] = {as_}"))
            }
            Check::Goodness { beta, delta } => {
                if !lt(beta, delta) {
                    return Ok(CheckResult::NotApplicable);
                }
                let n = structural_norm(beta);
                let dn = fs_step(delta, n, ctx);
                CheckResult::from_bool(le(beta, &dn), || format!("δ[{n}] = {dn} < β"))
            }
            Check::CanonicalNorm { beta, delta } => {
                let cctx = SeqCtx::with_zeta(ctx.zeta)
                    .with_norm(NormStrategy::Canonical)
                    .with_fuel(Fuel { max_descent_steps: 1_000_000, ..ctx.fuel });
                match canonical_norm(beta, &cctx) {
                    CanonicalNorm::Exhausted => CheckResult::NotApplicable,
                    CanonicalNorm::Found(c) => {
                        let s = structural_norm(beta);
                        if c > s {
                            CheckResult::Violated(format!("canonical {c} > structural {s}"))
                        } else if lt(beta, delta) && lt(&fs_step(delta, c, ctx), beta) {
                            CheckResult::Violated(format!("δ[{c}] < β for the canonical norm"))
                        } else {
                            CheckResult::Holds
                        }
                    }
                }
            }
            Check::PeelSub { rho, nu, tuple } => {
                if !lt(nu, rho) {
                    return Ok(CheckResult::NotApplicable);
                }
                let mut p = Peeler::new(ctx);
                let hi = p.peel(rho, tuple).map_err(|e| err(&e))?;
                let lo = p.peel(nu, tuple).map_err(|e| err(&e))?;
                let bad = hi.iter().zip(&lo).position(|(x, y)| !sub_multiset(y).contains(x));
                CheckResult::from_bool(bad.is_none(), || format!("entry {} of {} not a subterm of {}", bad.unwrap_or(0), render(&hi), render(&lo)))
            }
            Check::PeelPowerBound { delta, beta, tuple } => {
                let bound = veblen(delta, beta);
                if !tuple.iter().all(|x| lt(x, &bound)) {
                    return Ok(CheckResult::NotApplicable);
                }
                let out = Peeler::new(ctx).peel(&omega_pow(delta), tuple).map_err(|e| err(&e))?;
                CheckResult::from_bool(out.iter().all(|x| x.is_zero() || lt(x, beta)), || format!("p̄ = {}", render(&out)))
            }
            Check::PeelLogBound { delta, beta, tuple } => {
                let bound = philog_apply(delta, beta);
                if !tuple.iter().all(|x| lt(x, &bound)) {
                    return Ok(CheckResult::NotApplicable);
                }
                let out = Peeler::new(ctx).peel(delta, tuple).map_err(|e| err(&e))?;
                CheckResult::from_bool(out.iter().all(|x| x.is_zero() || lt(x, beta)), || format!("p̄ = {}", render(&out)))
            }
            Check::PeelSuffix { rho, tuple } => {
                if tuple.is_empty() {
                    return Ok(CheckResult::NotApplicable);
                }
                let mut p = Peeler::new(ctx);
                let full = p.peel(rho, tuple).map_err(|e| err(&e))?;
                let tail = p.peel(rho, &tuple[1..]).map_err(|e| err(&e))?;
                CheckResult::from_bool(full[1..] == tail[..], || format!("{} vs {}", render(&full), render(&tail)))
            }
            Check::PeelShortcut { rho, tuple } => {
                let fast = Peeler::new(ctx).peel(rho, tuple).map_err(|e| err(&e))?;
                let slow = Peeler::new(ctx).with_mode(PeelMode::Literal { extra: 0 }).peel(rho, tuple).map_err(|e| err(&e))?;
                CheckResult::from_bool(fast == slow, || format!("shortcut {} vs literal {}", render(&fast), render(&slow)))
            }
            Check::ZetaMember { tuple, gamma } => {
                let Some(z) = Peeler::new(ctx).zeta(tuple, gamma).map_err(|e| err(&e))? else {
                    return Ok(CheckResult::NotApplicable);
                };
                let first = tuple.first().cloned().unwrap_or_default();
                CheckResult::from_bool(s_set(&first).contains(&z) && le(&z, gamma), || format!("ζ = {z} outside S({first})"))
            }
            Check::ZetaLinear { tuple, gamma } => {
                let mut p = Peeler::new(ctx);
                let a = p.zeta(tuple, &Ordinal::nat(*gamma)).map_err(|e| err(&e))?;
                let b = p.zeta_linear(tuple, *gamma).map_err(|e| err(&e))?;
                CheckResult::from_bool(a == b, || format!("S-scan {a:?} vs linear {b:?}"))
            }
            Check::LimitCase { tuple, gamma } => {
                let mut p = Peeler::new(ctx);
                let Some(z) = p.zeta(tuple, gamma).map_err(|e| err(&e))? else {
                    return Ok(CheckResult::NotApplicable);
                };
                if !z.is_limit() {
                    return Ok(CheckResult::NotApplicable);
                }
                let (prefix, head) = z.split_last().expect("limit is nonzero");
                let delta = Ordinal::from_head(head).terms()[0].head.exponent();
                let mid = p.peel(&prefix, tuple).map_err(|e| err(&e))?;
                let b = p.peel_below(&delta, &mid).map_err(|e| err(&e))?;
                let b0 = b.first().cloned().unwrap_or_default();
                let b1 = b.get(1).cloned().unwrap_or_default();
                let want = veblen(&delta, &Ordinal::zero());
                CheckResult::from_bool(b0 == want && b1.is_zero(), || format!("ζ = {z}: p̄_<ζ = {}", render(&b)))
            }
            Check::DPartition { alpha, k, x, y } => {
                let dp = DPartition::new(alpha, *k).map_err(|e| err(&e))?;
                let dom = dp.domain();
                if !lt(x, &dom) || !lt(y, &dom) {
                    return Ok(CheckResult::NotApplicable);
                }
                let (cx, cy) = (dp.classify(x).map_err(|e| err(&e))?, dp.classify(y).map_err(|e| err(&e))?);
                let (px, py) = (dp.pi(x).map_err(|e| err(&e))?, dp.pi(y).map_err(|e| err(&e))?);
                if cx >= *k || !lt(&px, alpha) {
                    return Ok(CheckResult::Violated(format!("d({x}) = {cx}, π = {px}")));
                }
                if dp.pi_inv(cx, &px).map_err(|e| err(&e))? != *x {
                    return Ok(CheckResult::Violated(format!("π⁻¹(π({x})) ≠ {x}")));
                }
                let monotone = cx != cy || compare(x, y) == compare(&px, &py);
                CheckResult::from_bool(monotone, || format!("π not increasing on {x}, {y}"))
            }
            Check::FrontHeight { alpha, t } => {
                let b = alpha_front(alpha, ctx);
                if !b.in_tree(t).map_err(|e| err(&e))? {
                    return Ok(CheckResult::NotApplicable);
                }
                let h = b.height_at(t).map_err(|e| err(&e))?.unwrap_or_default();
                let want = fs_path(alpha, t, ctx);
                CheckResult::from_bool(h == want, || format!("ht = {h}, α[t] = {want}"))
            }
            Check::FrontTail { alpha, t, s } => {
                let b = alpha_front(alpha, ctx);
                let above = t.last().map(|m| s.first().map(|x| x > m).unwrap_or(true)).unwrap_or(true);
                if !above || !is_increasing(s) || b.classify(t).map_err(|e| err(&e))? == Class::Large {
                    return Ok(CheckResult::NotApplicable);
                }
                let tb = tail(&b, &FiniteSet::from_sorted(t.clone())).map_err(|e| err(&e))?;
                let got = tb.classify(s).map_err(|e| err(&e))?;
                let want = classify_large(&fs_path(alpha, t, ctx), s, ctx).verdict;
                let same = matches!(
                    (got, want),
                    (Class::Small, Verdict::Small) | (Class::Size, Verdict::Size) | (Class::Large, Verdict::Large)
                );
                CheckResult::from_bool(same, || format!("tail says {got:?}, α[t]-largeness says {want:?}"))
            }
            Check::FrontTrichotomy { alpha, u, split } => {
                let b = alpha_front(alpha, ctx);
                if *split > u.len() || b.classify(u).map_err(|e| err(&e))? != Class::Size {
                    return Ok(CheckResult::NotApplicable);
                }
                let Some((b0, head)) = alpha.split_last() else { return Ok(CheckResult::NotApplicable) };
                let w = Ordinal::from_head(head);
                let (t, s) = u.split_at(*split);
                let ht = b.height_at(t).map_err(|e| err(&e))?.unwrap_or_default();
                let x = ht == b0;
                let y = classify_large(&w, t, ctx).verdict == Verdict::Size;
                let z = classify_large(&b0, s, ctx).verdict == Verdict::Size;
                CheckResult::from_bool(x == y && y == z, || format!("ht(t) = β₀: {x}, t ω^β₁-size: {y}, s β₀-size: {z}"))
            }
            Check::FrontSmooth { alpha, seed, trials } => {
                let b = alpha_front(alpha, ctx);
                let rep = smooth_check(&b, SmoothSampler { seed: *seed, max_len: SMOOTH_WALK, ..Default::default() }, *trials).map_err(|e| err(&e))?;
                CheckResult::from_bool(rep.violation_count == 0, || {
                    let (s, t) = &rep.violations[0];
                    format!("{} violations, first ({s}, {t})", rep.violation_count)
                })
            }
            Check::BachmannChain { beta, gamma, n } => {
                let (bn, gn) = (fs_step(beta, *n, ctx), fs_step(gamma, *n, ctx));
                let chain = lt(gamma, beta) && lt(&bn, gamma) && lt(&gn, &bn);
                CheckResult::from_bool(chain, || format!("β[n] = {bn}, γ[n] = {gn}"))
            }
        })
    }

    fn ordinal_slots(&mut self) -> Vec<&mut Ordinal> {
        match self {
            Check::NestedA { gamma, beta, .. } => vec![beta, gamma],
            Check::NestedB { gamma, beta, delta, .. } => vec![beta, gamma, delta],
            Check::Regular { alpha, .. } | Check::Subset { alpha, .. } => vec![alpha],
            Check::Goodness { beta, delta } | Check::CanonicalNorm { beta, delta } => vec![delta, beta],
            Check::PeelSub { rho, nu, tuple } => {
                let mut v = vec![rho, nu];
                v.extend(tuple.iter_mut());
                v
            }
            Check::PeelPowerBound { delta, beta, tuple } | Check::PeelLogBound { delta, beta, tuple } => {
                let mut v = vec![delta, beta];
                v.extend(tuple.iter_mut());
                v
            }
            Check::PeelSuffix { rho, tuple } | Check::PeelShortcut { rho, tuple } => {
                let mut v = vec![rho];
                v.extend(tuple.iter_mut());
                v
            }
            Check::ZetaMember { tuple, gamma } | Check::LimitCase { tuple, gamma } => {
                let mut v: Vec<&mut Ordinal> = tuple.iter_mut().collect();
                v.push(gamma);
                v
            }
            Check::ZetaLinear { tuple, .. } => tuple.iter_mut().collect(),
            Check::DPartition { alpha, x, y, .. } => vec![x, y, alpha],
            Check::FrontHeight { .. }
            | Check::FrontTail { .. }
            | Check::FrontTrichotomy { .. }
            | Check::FrontSmooth { .. } => Vec::new(),
            Check::BachmannChain { beta, gamma, .. } => vec![beta, gamma],
        }
    }

    /// Greedily replaces ordinals by smaller candidates while the check stays
    /// violated, and returns the smallest violating input found.
    pub fn shrink(&self, ctx: &SeqCtx) -> Check {
        let mut cur = self.clone();
        let mut steps = 0;
        'outer: while steps < SHRINK_STEPS {
            let slots = cur.clone().ordinal_slots().len();
            for i in 0..slots {
                let x = cur.clone().ordinal_slots()[i].clone();
                for cand in shrink_candidates(&x) {
                    let mut next = cur.clone();
                    *next.ordinal_slots()[i] = cand;
                    if next.eval(ctx).is_violated() {
                        cur = next;
                        steps += 1;
                        continue 'outer;
                    }
                }
            }
            break;
        }
        cur
    }
}

/// Re-evaluates a stored witness.
pub fn replay(witness: &Value, ctx: &SeqCtx) -> Result<CheckResult, serde_json::Error> {
    let check: Check = serde_json::from_value(witness.clone())?;
    Ok(check.eval(ctx))
}

/// Accumulates check results into a [`Report`].
#[derive(Debug)]
pub struct Tally {
    ctx: SeqCtx,
    counters: BTreeMap<String, u64>,
    witnesses: Vec<Value>,
    violations: u64,
    checks: u64,
    budget: Option<u64>,
    exhausted: bool,
}

impl Tally {
    /// An empty tally; `budget` caps the number of evaluated checks.
    pub fn new(ctx: &SeqCtx, budget: Option<u64>) -> Self {
        Tally {
            ctx: ctx.clone(),
            counters: BTreeMap::new(),
            witnesses: Vec::new(),
            violations: 0,
            checks: 0,
            budget,
            exhausted: false,
        }
    }

    /// The context checks run under.
    pub fn ctx(&self) -> &SeqCtx {
        &self.ctx
    }

    /// Whether the budget has run out.
    pub fn exhausted(&self) -> bool {
        self.exhausted
    }

    /// Increments a named counter.
    pub fn bump(&mut self, name: &str, by: u64) {
        *self.counters.entry(name.to_string()).or_default() += by;
    }

    /// Evaluates a check, shrinking and storing it when violated.
    pub fn record(&mut self, check: Check) -> CheckResult {
        if let Some(b) = self.budget {
            if self.checks >= b {
                self.exhausted = true;
                return CheckResult::NotApplicable;
            }
        }
        self.checks += 1;
        let name = check.name();
        let r = check.eval(&self.ctx);
        match &r {
            CheckResult::Holds => self.bump(&format!("{name}.holds"), 1),
            CheckResult::NotApplicable => self.bump(&format!("{name}.skipped"), 1),
            CheckResult::Violated(_) => {
                self.bump(&format!("{name}.violated"), 1);
                self.violations += 1;
                if self.witnesses.len() < WITNESS_CAP {
                    let small = check.shrink(&self.ctx);
                    let why = match small.eval(&self.ctx) {
                        CheckResult::Violated(w) => w,
                        _ => String::new(),
                    };
                    let mut v = serde_json::to_value(&small).expect("check serializes");
                    v["violation"] = Value::String(why);
                    self.witnesses.push(v);
                }
            }
        }
        r
    }

    /// The finished report.
    pub fn finish(mut self, command: &str, params: Value, started: Instant) -> Report {
        self.counters.insert("checks".into(), self.checks);
        self.counters.insert("violations".into(), self.violations);
        let verdict = if self.violations > 0 {
            Outcome::Violation
        } else if self.exhausted {
            Outcome::Exhausted
        } else {
            Outcome::Pass
        };
        Report {
            command: command.to_string(),
            params,
            verdict,
            witnesses: self.witnesses,
            counters: self.counters,
            seconds: started.elapsed().as_secs_f64(),
        }
    }
}

/// Extra knobs for campaigns beyond the shared [`FuzzConfig`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignOptions {
    /// Maximum number of checks before the run reports exhaustion.
    pub budget: Option<u64>,
    /// Heights `α` of the fronts `B^α` used by `front-laws`.
    pub front_alphas: Vec<Ordinal>,
    /// Samples (out of `cfg.samples`) that also compare the peeling
    /// shortcut with literal composition.
    pub shortcut_samples: u64,
    /// Random-phase trials per front in the smoothness sampler.
    pub smooth_trials: u64,
}

impl Default for CampaignOptions {
    fn default() -> Self {
        CampaignOptions {
            budget: None,
            front_alphas: vec![ord("w"), ord("w^(2)"), ord("w^(w)"), ord("eps(0)")],
            shortcut_samples: 1000,
            smooth_trials: 2000,
        }
    }
}

/// Runs a campaign of the given kind.
pub fn fuzz_campaign(kind: CampaignKind, cfg: &FuzzConfig, opts: &CampaignOptions, ctx: &SeqCtx) -> Report {
    let started = Instant::now();
    let mut tally = Tally::new(ctx, opts.budget);
    let mut smp = Sampler::new(*cfg);
    match kind {
        CampaignKind::Nested => nested(&mut smp, &mut tally),
        CampaignKind::Regular => regular(&mut smp, &mut tally),
        CampaignKind::Goodness => goodness(&mut smp, &mut tally),
        CampaignKind::Subset => subset(&mut smp, &mut tally),
        CampaignKind::Peeling => peeling(&mut smp, opts, &mut tally),
        CampaignKind::Zeta => zeta(&mut smp, &mut tally),
        CampaignKind::FrontLaws => front_laws(&mut smp, opts, &mut tally, ctx),
    }
    let params = json!({ "kind": kind, "config": cfg, "options": opts });
    tally.finish(&format!("verify {kind}"), params, started)
}

/// The pinned input showing that clause (B) needs its hypothesis: with
/// `λ = ω`, `n = 2`, `δ = λ[2] = 2`, `β = φ_ω(0)` and `γ = φ_3(0)`, both
/// ordinals are fixed points of `φ_2`.
pub fn clause_b_remark() -> Check {
    Check::NestedB { gamma: ord("phi(3,0)"), beta: ord("phi(w,0)"), delta: ord("2"), n: 2 }
}

/// The unguarded chain `γ[n] < φ_δ(β[n]) < γ < φ_δ(β)` at the remark input.
pub fn clause_b_remark_chain(ctx: &SeqCtx) -> bool {
    let Check::NestedB { gamma, beta, delta, n } = clause_b_remark() else { unreachable!() };
    let gn = fs_step(&gamma, n, ctx);
    let mid = veblen(&delta, &fs_step(&beta, n, ctx));
    lt(&gn, &mid) && lt(&mid, &gamma) && lt(&gamma, &veblen(&delta, &beta))
}

fn nested(smp: &mut Sampler, tally: &mut Tally) {
    let remark = tally.record(clause_b_remark());
    tally.bump("remark.not-flagged", u64::from(remark == CheckResult::NotApplicable));
    for _ in 0..smp.cfg.samples {
        if tally.exhausted() {
            break;
        }
        let (gamma, beta) = smp.ordered_pair();
        let n = smp.n();
        let delta = smp.ordinal_depth(3);
        tally.record(Check::NestedA { gamma: gamma.clone(), beta: beta.clone(), n });
        tally.record(Check::NestedB { gamma, beta, delta, n });
    }
}

fn regular(smp: &mut Sampler, tally: &mut Tally) {
    let mut done = 0;
    let mut tries = 0;
    while done < smp.cfg.samples && tries < 20 * smp.cfg.samples && !tally.exhausted() {
        tries += 1;
        let alpha = smp.ordinal();
        let n = smp.n();
        match alpha.split_last() {
            Some((b0, head)) if !b0.is_zero() => {
                debug_assert!(geqq(&b0, &Ordinal::from_head(head)));
                tally.record(Check::Regular { alpha, n });
                done += 1;
            }
            _ => {}
        }
    }
}

fn goodness(smp: &mut Sampler, tally: &mut Tally) {
    for _ in 0..smp.cfg.samples {
        if tally.exhausted() {
            break;
        }
        let (beta, delta) = smp.ordered_pair();
        tally.record(Check::Goodness { beta: beta.clone(), delta: delta.clone() });
        tally.record(Check::CanonicalNorm { beta, delta: delta.clone() });
        let near_top = descent_from_top(smp, tally.ctx());
        tally.record(Check::CanonicalNorm { beta: near_top, delta });
    }
}

/// A few `⇒_n` steps down from the top ordinal, where the canonical norm
/// search can finish.
fn descent_from_top(smp: &mut Sampler, ctx: &SeqCtx) -> Ordinal {
    let n = smp.rng().gen_range(2..=4);
    let steps = smp.rng().gen_range(0..=3);
    let mut cur = crate::fundseq::fs_top(n, ctx);
    for _ in 0..steps {
        let next = fs_step(&cur, n, ctx);
        if next.node_count_exceeds(64) {
            break;
        }
        cur = next;
    }
    cur
}

fn subset(smp: &mut Sampler, tally: &mut Tally) {
    for _ in 0..smp.cfg.samples {
        if tally.exhausted() {
            break;
        }
        let alpha = smp.ordinal();
        let mut t = Vec::new();
        while t.is_empty() {
            t = smp.finite_set(2, 14, 5);
        }
        let m = smp.rng().gen_range(0..=t.len());
        let mut s: Vec<u64> = Vec::with_capacity(m);
        for &ti in &t[..m] {
            let bump = smp.rng().gen_range(0..4);
            let floor = s.last().map(|x| x + 1).unwrap_or(0);
            s.push((ti + bump).max(floor));
        }
        tally.record(Check::Subset { alpha, s, t });
    }
}

/// A nonzero ordinal below `ω^(ω·(max_a+1))`: one to three terms `ω^(ω·a+b)·c`.
fn small_index(smp: &mut Sampler, max_a: u64) -> Ordinal {
    let terms = smp.rng().gen_range(1..=3);
    let mut parts: Vec<Ordinal> = (0..terms)
        .map(|_| {
            let a = smp.rng().gen_range(0..=max_a);
            let b = smp.rng().gen_range(0..=3);
            omega_pow(&add(&mul_nat(&Ordinal::omega(), a), &Ordinal::nat(b)))
        })
        .collect();
    parts.sort_by(|x, y| compare(y, x));
    parts.iter().fold(Ordinal::zero(), |acc, p| add(&acc, &mul_nat(p, smp.rng().gen_range(1..=2))))
}

fn tuple(smp: &mut Sampler, bound: Option<&Ordinal>) -> Vec<Ordinal> {
    let len = smp.rng().gen_range(1..=4);
    smp.decreasing_tuple(len, bound)
}

fn peeling(smp: &mut Sampler, opts: &CampaignOptions, tally: &mut Tally) {
    let depth = smp.cfg.max_depth.min(4);
    let mut cfg = smp.cfg;
    cfg.max_depth = depth;
    let mut inner = Sampler::new(cfg);
    for i in 0..smp.cfg.samples {
        if tally.exhausted() {
            break;
        }
        let smp = &mut inner;
        let a = tuple(smp, None);
        let rho = small_index(smp, 2);
        let nu = small_index(smp, 2);
        let (nu, rho) = if lt(&nu, &rho) { (nu, rho) } else { (Ordinal::nat(smp.rng().gen_range(0..3)), rho) };
        tally.record(Check::PeelSub { rho: rho.clone(), nu, tuple: a.clone() });
        tally.record(Check::PeelSuffix { rho: rho.clone(), tuple: a.clone() });
        if i < opts.shortcut_samples {
            tally.record(Check::PeelShortcut { rho, tuple: a.clone() });
        }
        let beta = smp.ordinal_depth(3);
        let (a, b) = (smp.rng().gen_range(0..=2), smp.rng().gen_range(0..=3));
        let delta = add(&mul_nat(&Ordinal::omega(), a), &Ordinal::nat(b));
        let bounded = tuple(smp, Some(&veblen(&delta, &beta)));
        tally.record(Check::PeelPowerBound { delta, beta: beta.clone(), tuple: bounded });
        let delta = small_index(smp, 1);
        let bounded = tuple(smp, Some(&philog_apply(&delta, &beta)));
        tally.record(Check::PeelLogBound { delta, beta, tuple: bounded });
        let alpha = smp.ordinal_depth(3);
        if alpha.is_zero() {
            continue;
        }
        let k = smp.rng().gen_range(1..=3);
        let dom = crate::ordinal::nat_prod_fin(&alpha, k);
        let pair = smp.decreasing_tuple(2, Some(&dom));
        if pair.len() == 2 {
            tally.record(Check::DPartition { alpha, k, x: pair[0].clone(), y: pair[1].clone() });
        }
    }
}

fn zeta(smp: &mut Sampler, tally: &mut Tally) {
    let depth = smp.cfg.max_depth.min(4);
    let mut cfg = smp.cfg;
    cfg.max_depth = depth;
    let mut inner = Sampler::new(cfg);
    let smp = &mut inner;
    let gammas = [ord("w"), ord("w*2+1"), ord("w^(2)")];
    for _ in 0..cfg.samples {
        if tally.exhausted() {
            break;
        }
        let a = zeta_tuple(smp);
        let g = smp.rng().gen_range(0..=6);
        tally.record(Check::ZetaLinear { tuple: a.clone(), gamma: g });
        tally.record(Check::ZetaMember { tuple: a.clone(), gamma: Ordinal::nat(g) });
        let big = gammas[smp.rng().gen_range(0..gammas.len())].clone();
        tally.record(Check::ZetaMember { tuple: a.clone(), gamma: big.clone() });
        tally.record(Check::LimitCase { tuple: a, gamma: big });
    }
}

/// A strictly decreasing tuple whose entries are small indices, possibly
/// wrapped in `φ_1` or `φ_2`, so that `ζ_A` often lies below `ω²`.
fn zeta_tuple(smp: &mut Sampler) -> Vec<Ordinal> {
    let len = smp.rng().gen_range(1..=4);
    let mut v: Vec<Ordinal> = (0..len)
        .map(|_| {
            let x = small_index(smp, 2);
            match smp.rng().gen_range(0..4) {
                0 => veblen(&Ordinal::one(), &x),
                1 => veblen(&Ordinal::nat(2), &Ordinal::nat(smp.rng().gen_range(0..3))),
                _ => x,
            }
        })
        .collect();
    v.sort_by(|x, y| compare(y, x));
    v.dedup();
    v
}

fn random_node(smp: &mut Sampler, b: &Front, max_len: usize) -> Vec<u64> {
    let mut t: Vec<u64> = Vec::new();
    let target = smp.rng().gen_range(0..=max_len);
    while t.len() < target {
        if b.classify(&t).map(|c| c != Class::Small).unwrap_or(true) {
            break;
        }
        let from = t.last().map(|x| x + 1).unwrap_or(2);
        let step = smp.rng().gen_range(0..6);
        t.push(from + step);
    }
    t
}

fn front_laws(smp: &mut Sampler, opts: &CampaignOptions, tally: &mut Tally, ctx: &SeqCtx) {
    if opts.front_alphas.is_empty() {
        return;
    }
    for (j, alpha) in opts.front_alphas.iter().enumerate() {
        tally.record(Check::FrontSmooth { alpha: alpha.clone(), seed: smp.cfg.seed + j as u64, trials: opts.smooth_trials });
    }
    let fronts: Vec<Front> = opts.front_alphas.iter().map(|a| alpha_front(a, ctx)).collect();
    for i in 0..smp.cfg.samples {
        if tally.exhausted() {
            break;
        }
        let j = (i as usize) % fronts.len();
        let alpha = opts.front_alphas[j].clone();
        let t = random_node(smp, &fronts[j], 6);
        tally.record(Check::FrontHeight { alpha: alpha.clone(), t: t.clone() });
        let lo = t.last().map(|x| x + 1).unwrap_or(2);
        let s = smp.finite_set(lo, lo + 12, 5);
        tally.record(Check::FrontTail { alpha: alpha.clone(), t: t.clone(), s });
        let u = random_node(smp, &fronts[j], 12);
        if fronts[j].classify(&u).map(|c| c == Class::Size).unwrap_or(false) {
            let split = smp.rng().gen_range(0..=u.len());
            tally.record(Check::FrontTrichotomy { alpha, u, split });
        }
    }
}

/// The Bachmann failure: `β = ε₁`, `γ = ω^(ω^(ω^(ε₀+1)))` and `n = 1` give
/// `β > γ > β[1] > γ[1]`. The report carries the four values.
pub fn bachmann_remark(ctx: &SeqCtx) -> Report {
    let started = Instant::now();
    let beta = ord("eps(1)");
    let gamma = ord("w^(w^(w^(eps(0)+1)))");
    let check = Check::BachmannChain { beta: beta.clone(), gamma: gamma.clone(), n: 1 };
    let holds = check.eval(ctx) == CheckResult::Holds;
    let mut counters = BTreeMap::new();
    counters.insert("checks".to_string(), 1);
    let witness = json!({
        "beta": beta,
        "gamma": gamma,
        "beta[1]": fs_step(&beta, 1, ctx),
        "gamma[1]": fs_step(&gamma, 1, ctx),
        "chain": holds,
    });
    Report {
        command: "verify bachmann-remark".into(),
        params: json!({ "n": 1 }),
        verdict: if holds { Outcome::Pass } else { Outcome::Violation },
        witnesses: vec![witness],
        counters,
        seconds: started.elapsed().as_secs_f64(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(samples: u64) -> FuzzConfig {
        FuzzConfig { seed: 3, samples, ..Default::default() }
    }

    #[test]
    fn campaigns_pass_on_small_runs() {
        let ctx = SeqCtx::default();
        let opts = CampaignOptions { shortcut_samples: 20, smooth_trials: 50, ..Default::default() };
        for kind in CampaignKind::ALL {
            let rep = fuzz_campaign(kind, &small(60), &opts, &ctx);
            assert_eq!(rep.verdict, Outcome::Pass, "{kind}: {:?}", rep.witnesses);
            assert!(rep.counters["checks"] > 0);
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let ctx = SeqCtx::default();
        let opts = CampaignOptions::default();
        let a = fuzz_campaign(CampaignKind::Nested, &small(200), &opts, &ctx);
        let b = fuzz_campaign(CampaignKind::Nested, &small(200), &opts, &ctx);
        assert_eq!(a.deterministic_json(), b.deterministic_json());
    }

    #[test]
    fn budget_exhaustion() {
        let ctx = SeqCtx::default();
        let opts = CampaignOptions { budget: Some(5), ..Default::default() };
        let rep = fuzz_campaign(CampaignKind::Regular, &small(100), &opts, &ctx);
        assert_eq!(rep.verdict, Outcome::Exhausted);
        assert_eq!(rep.verdict.exit_code(), 3);
    }

    #[test]
    fn remark_input_is_not_flagged() {
        let ctx = SeqCtx::default();
        assert_eq!(clause_b_remark().eval(&ctx), CheckResult::NotApplicable);
    }

    #[test]
    fn bachmann_chain_reproduces() {
        let ctx = SeqCtx::default();
        let rep = bachmann_remark(&ctx);
        assert_eq!(rep.verdict, Outcome::Pass);
        assert_eq!(rep.witnesses[0]["gamma[1]"], "phi(1,0)");
    }

    #[test]
    fn witnesses_replay_and_shrink() {
        let ctx = SeqCtx::default();
        let c = Check::BachmannChain { beta: ord("eps(1)"), gamma: ord("w^(w^(w^(eps(0)+1)))"), n: 1 };
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["check"], "bachmann-chain");
        assert_eq!(replay(&v, &ctx).unwrap(), CheckResult::Holds);
        // The chain fails at these inputs, so shrinking must keep it failing.
        let bad = Check::BachmannChain { beta: ord("w^(w)+w*3"), gamma: ord("w^(3)+5"), n: 1 };
        assert!(bad.eval(&ctx).is_violated());
        let shrunk = bad.shrink(&ctx);
        assert!(shrunk.eval(&ctx).is_violated());
        let Check::BachmannChain { beta, gamma, .. } = &shrunk else { unreachable!() };
        assert!(le(beta, &ord("w^(w)+w*3")) && le(gamma, &ord("w^(3)+5")));
        assert_eq!(shrunk, Check::BachmannChain { beta: ord("0"), gamma: ord("0"), n: 1 });
        let replayed = replay(&serde_json::to_value(&shrunk).unwrap(), &ctx).unwrap();
        assert!(replayed.is_violated());
    }

    #[test]
    fn kinds_round_trip() {
        for k in CampaignKind::ALL {
            assert_eq!(k.name().parse::<CampaignKind>().unwrap(), k);
        }
        assert!("bogus".parse::<CampaignKind>().is_err());
    }
}
