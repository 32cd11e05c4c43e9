//! The lower-bound machinery: overline, peeling functions, `S(τ)`, `ζ_A`,
//! the `d`-partition, the double norm, the witness set `M`, the
//! `(k+3)`-coloring and bounded homogeneous-set search.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ctx::SeqCtx;
use crate::finite_set::FiniteSet;
use crate::fundseq::{classify_large, fs_path, fs_step, good_norm, uplus_classify, Verdict};
use crate::ordinal::{
    add, compare, left_sub, mul_nat, nat_prod_fin, omega_pow, philog_apply, sub_multiset, Head, OrdError,
    Ordinal,
};
use crate::pigeon::Coloring;

/// Failures of the lower-bound machinery.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LowerError {
    /// A limit entry is not in the range of `φ_σ` when it is stripped.
    #[error("entry {entry} is not in the range of phi_{sigma} at strip time")]
    NotInRange {
        /// The offending entry.
        entry: String,
        /// The Veblen index being stripped.
        sigma: String,
    },
    /// `β ≥ α ⨰ k` was given to the `d`-partition.
    #[error("{0} is outside the d-partition domain")]
    OutOfDomain(String),
    /// A search budget ran out.
    #[error("budget exhausted after {0} nodes")]
    Budget(u64),
    /// A documented precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Ordinal arithmetic failed.
    #[error(transparent)]
    Ord(#[from] OrdError),
}

/// `overline(β, δ)`: the exponent of `β` at the first expanded Cantor term
/// where `β` and `δ` differ, or 0 when `β ≤ δ`.
pub fn overline(beta: &Ordinal, delta: &Ordinal) -> Ordinal {
    if compare(beta, delta) != Ordering::Greater {
        return Ordinal::zero();
    }
    let expand = |x: &Ordinal| -> Vec<Ordinal> {
        x.exponents().into_iter().flat_map(|(e, c)| std::iter::repeat_n(e, c as usize)).collect()
    };
    let (b, d) = (expand(beta), expand(delta));
    for (i, e) in b.iter().enumerate() {
        match d.get(i) {
            Some(f) if f == e => continue,
            _ => return e.clone(),
        }
    }
    Ordinal::zero()
}

/// `S(τ)`, sorted ascending without duplicates.
pub fn s_set(tau: &Ordinal) -> Vec<Ordinal> {
    let mut out = BTreeSet::new();
    s_set_into(tau, &mut out);
    let mut v: Vec<Ordinal> = out.into_iter().collect();
    v.sort_by(compare);
    v
}

fn s_set_into(tau: &Ordinal, out: &mut BTreeSet<Ordinal>) {
    out.insert(Ordinal::zero());
    if tau.is_zero() {
        return;
    }
    out.insert(Ordinal::one());
    match tau.as_principal() {
        Some(h) => {
            let (delta, sigma) = match h {
                Head::Veb(a, b) => (a.clone(), b.clone()),
                Head::Gam(_) => (tau.clone(), Ordinal::zero()),
            };
            let w = omega_pow(&delta);
            if sigma.is_zero() {
                out.insert(w);
            } else {
                for xi in s_set(&sigma) {
                    if !xi.is_zero() {
                        out.insert(add(&w, &xi));
                    }
                }
            }
        }
        None => {
            for t in tau.terms() {
                s_set_into(&Ordinal::from_head(t.head.clone()), out);
            }
        }
    }
}

/// The coloring `d : α ⨰ k → k` built from Cantor bands, with the order
/// isomorphisms `π_i : d⁻¹(i) → α`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DPartition {
    /// `α`.
    pub alpha: Ordinal,
    /// Number of classes.
    pub k: u64,
    bands: Vec<Band>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Band {
    exp: Ordinal,
    coeff: u64,
    /// Start of the band inside `α ⨰ k`.
    base: Ordinal,
    /// Start of the matching band inside `α`.
    alpha_base: Ordinal,
}

impl DPartition {
    /// The band construction for `α > 0` and `k ≥ 1`.
    pub fn new(alpha: &Ordinal, k: u64) -> Result<Self, LowerError> {
        if alpha.is_zero() || k == 0 {
            return Err(LowerError::Precondition("d-partition needs alpha > 0 and k >= 1".into()));
        }
        let mut bands = Vec::new();
        let (mut base, mut alpha_base) = (Ordinal::zero(), Ordinal::zero());
        for (exp, coeff) in alpha.exponents() {
            let w = omega_pow(&exp);
            bands.push(Band { exp: exp.clone(), coeff, base: base.clone(), alpha_base: alpha_base.clone() });
            base = add(&base, &mul_nat(&w, coeff * k));
            alpha_base = add(&alpha_base, &mul_nat(&w, coeff));
        }
        Ok(DPartition { alpha: alpha.clone(), k, bands })
    }

    /// `α ⨰ k`.
    pub fn domain(&self) -> Ordinal {
        nat_prod_fin(&self.alpha, self.k)
    }

    fn locate(&self, beta: &Ordinal) -> Result<(usize, u64, Ordinal), LowerError> {
        for (j, band) in self.bands.iter().enumerate() {
            let w = omega_pow(&band.exp);
            let end = add(&band.base, &mul_nat(&w, band.coeff * self.k));
            if compare(beta, &end) == Ordering::Less {
                let rest = left_sub(beta, &band.base)?;
                let (q, r) = match rest.terms().first() {
                    Some(t) if t.head.exponent() == band.exp => {
                        let tail = Ordinal::from_terms(rest.terms()[1..].to_vec());
                        (t.coeff, tail)
                    }
                    _ => (0, rest),
                };
                return Ok((j, q, r));
            }
        }
        Err(LowerError::OutOfDomain(beta.to_string()))
    }

    /// `d(β)`.
    pub fn classify(&self, beta: &Ordinal) -> Result<u64, LowerError> {
        let (_, q, _) = self.locate(beta)?;
        Ok(q % self.k)
    }

    /// `π_{d(β)}(β)`.
    pub fn pi(&self, beta: &Ordinal) -> Result<Ordinal, LowerError> {
        let (j, q, r) = self.locate(beta)?;
        let band = &self.bands[j];
        Ok(add(&add(&band.alpha_base, &mul_nat(&omega_pow(&band.exp), q / self.k)), &r))
    }

    /// `π_i⁻¹(x)` for `x < α`.
    pub fn pi_inv(&self, i: u64, x: &Ordinal) -> Result<Ordinal, LowerError> {
        if i >= self.k {
            return Err(LowerError::Precondition(format!("class {i} out of range")));
        }
        for band in &self.bands {
            let w = omega_pow(&band.exp);
            let end = add(&band.alpha_base, &mul_nat(&w, band.coeff));
            if compare(x, &end) == Ordering::Less {
                let rest = left_sub(x, &band.alpha_base)?;
                let (q, r) = match rest.terms().first() {
                    Some(t) if t.head.exponent() == band.exp => (t.coeff, Ordinal::from_terms(rest.terms()[1..].to_vec())),
                    _ => (0, rest),
                };
                return Ok(add(&add(&band.base, &mul_nat(&w, q * self.k + i)), &r));
            }
        }
        Err(LowerError::OutOfDomain(x.to_string()))
    }
}

/// `make_d_partition(α, k)`.
pub fn make_d_partition(alpha: &Ordinal, k: u64) -> Result<DPartition, LowerError> {
    DPartition::new(alpha, k)
}

/// `||β||`: one plus the maximum of the subterm norms, `|Sub(β)|`, the norms
/// over `S(β)` and, when a partition is given, the norms of `π_{d(δ)}(δ)`
/// for subterms `δ < α ⨰ k`.
pub fn double_norm(beta: &Ordinal, dpart: Option<&DPartition>, ctx: &SeqCtx) -> u64 {
    let sub = sub_multiset(beta);
    let mut m = sub.cardinality();
    let domain = dpart.map(DPartition::domain);
    for (delta, _) in sub.iter() {
        m = m.max(good_norm(delta, ctx));
        if let (Some(dp), Some(dom)) = (dpart, domain.as_ref()) {
            if compare(delta, dom) == Ordering::Less {
                if let Ok(p) = dp.pi(delta) {
                    m = m.max(good_norm(&p, ctx));
                }
            }
        }
    }
    for nu in s_set(beta) {
        m = m.max(good_norm(&nu, ctx));
    }
    m + 1
}

/// How the limit `p̄_{<ω^σ}` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PeelMode {
    /// `N` applications of `p̄_{ω^{σ[N]}}`, stopping once an application
    /// leaves the tuple unchanged.
    #[default]
    Shortcut,
    /// `N + extra` applications with no early exit.
    Literal {
        /// Additional applications beyond `N`.
        extra: u64,
    },
}

/// Evaluator for the peeling functions with memoized limit stages.
#[derive(Debug, Clone)]
pub struct Peeler {
    ctx: SeqCtx,
    dpart: Option<DPartition>,
    mode: PeelMode,
    memo: HashMap<(Ordinal, Vec<Ordinal>), Vec<Ordinal>>,
    norms: HashMap<Ordinal, u64>,
}

impl Peeler {
    /// A peeler whose limit bound is the double norm without the partition
    /// term.
    pub fn new(ctx: &SeqCtx) -> Self {
        Peeler { ctx: ctx.clone(), dpart: None, mode: PeelMode::default(), memo: HashMap::new(), norms: HashMap::new() }
    }

    /// A peeler using the full double norm of a session.
    pub fn with_partition(ctx: &SeqCtx, dpart: DPartition) -> Self {
        Peeler { dpart: Some(dpart), ..Peeler::new(ctx) }
    }

    /// The same peeler with another limit mode.
    pub fn with_mode(mut self, mode: PeelMode) -> Self {
        self.mode = mode;
        self.memo.clear();
        self
    }

    fn norm(&mut self, x: &Ordinal) -> u64 {
        if let Some(&n) = self.norms.get(x) {
            return n;
        }
        let n = double_norm(x, self.dpart.as_ref(), &self.ctx);
        self.norms.insert(x.clone(), n);
        n
    }

    /// `p̄_ρ(A)`.
    pub fn peel(&mut self, rho: &Ordinal, a: &[Ordinal]) -> Result<Vec<Ordinal>, LowerError> {
        let mut cur = a.to_vec();
        for (e, c) in rho.exponents() {
            for _ in 0..c {
                cur = self.peel_power(&e, &cur)?;
            }
        }
        Ok(cur)
    }

    /// `p_ρ(A)`, the first entry of `p̄_ρ(A)` (0 for the empty tuple).
    pub fn p(&mut self, rho: &Ordinal, a: &[Ordinal]) -> Result<Ordinal, LowerError> {
        Ok(self.peel(rho, a)?.into_iter().next().unwrap_or_default())
    }

    /// `p̄_{ω^σ}(A)`.
    pub fn peel_power(&mut self, sigma: &Ordinal, a: &[Ordinal]) -> Result<Vec<Ordinal>, LowerError> {
        if sigma.is_zero() {
            return Ok(peel_one(a));
        }
        let key = (sigma.clone(), a.to_vec());
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let lim = self.peel_below(sigma, a)?;
        let out = lim.iter().map(|x| strip(sigma, x)).collect::<Result<Vec<_>, _>>()?;
        self.memo.insert(key, out.clone());
        Ok(out)
    }

    /// `p̄_{<ω^σ}(A)` for `σ > 0`.
    pub fn peel_below(&mut self, sigma: &Ordinal, a: &[Ordinal]) -> Result<Vec<Ordinal>, LowerError> {
        if self.mode == PeelMode::Shortcut && fixed_below(sigma, a) {
            return Ok(a.to_vec());
        }
        let n = a.iter().map(|x| self.norm(x)).max().unwrap_or(1).max(1);
        let step = fs_step(sigma, n, &self.ctx);
        let (reps, early) = match self.mode {
            PeelMode::Shortcut => (n, true),
            PeelMode::Literal { extra } => (n + extra, false),
        };
        let mut cur = a.to_vec();
        for _ in 0..reps {
            let next = self.peel_power(&step, &cur)?;
            if early && next == cur {
                break;
            }
            cur = next;
        }
        Ok(cur)
    }

    /// `ζ_A`: the least `ζ ∈ S(A(0))`, `ζ ≤ γ`, with `p_ζ(A) ≤ p_ζ(A⁻)`.
    /// A missing second entry counts as 0.
    pub fn zeta(&mut self, a: &[Ordinal], gamma: &Ordinal) -> Result<Option<Ordinal>, LowerError> {
        let first = a.first().cloned().unwrap_or_default();
        for z in s_set(&first) {
            if compare(&z, gamma) == Ordering::Greater {
                break;
            }
            if self.zeta_test(&z, a)? {
                return Ok(Some(z));
            }
        }
        Ok(None)
    }

    /// The brute-force `ζ_A` scan over `0..=γ` for finite `γ`.
    pub fn zeta_linear(&mut self, a: &[Ordinal], gamma: u64) -> Result<Option<Ordinal>, LowerError> {
        for z in 0..=gamma {
            let z = Ordinal::nat(z);
            if self.zeta_test(&z, a)? {
                return Ok(Some(z));
            }
        }
        Ok(None)
    }

    fn zeta_test(&mut self, z: &Ordinal, a: &[Ordinal]) -> Result<bool, LowerError> {
        let p = self.peel(z, a)?;
        let first = p.first().cloned().unwrap_or_default();
        let second = p.get(1).cloned().unwrap_or_default();
        Ok(compare(&first, &second) != Ordering::Greater)
    }
}

/// Whether every `p̄_{ω^τ}` with `τ < σ` leaves `a` unchanged: each nonzero
/// entry is a fixed point of every `φ_τ` (`τ < σ`) and exceeds the next entry.
fn fixed_below(sigma: &Ordinal, a: &[Ordinal]) -> bool {
    let zero = Ordinal::zero();
    a.iter().enumerate().all(|(i, x)| {
        if x.is_zero() {
            return true;
        }
        let fixed = match x.as_principal() {
            Some(Head::Veb(c, _)) => compare(c, sigma) != Ordering::Less && !c.is_zero(),
            Some(Head::Gam(_)) => compare(x, sigma) != Ordering::Less,
            None => false,
        };
        fixed && compare(x, a.get(i + 1).unwrap_or(&zero)) == Ordering::Greater
    })
}

/// `p̄_1`: pairwise overline, pairing the last entry with 0.
pub fn peel_one(a: &[Ordinal]) -> Vec<Ordinal> {
    let zero = Ordinal::zero();
    (0..a.len()).map(|i| overline(&a[i], a.get(i + 1).unwrap_or(&zero))).collect()
}

/// `φ_σ⁻¹(x)` for `x` zero or in the range of `φ_σ`.
pub fn strip(sigma: &Ordinal, x: &Ordinal) -> Result<Ordinal, LowerError> {
    if x.is_zero() {
        return Ok(Ordinal::zero());
    }
    let err = || LowerError::NotInRange { entry: x.to_string(), sigma: sigma.to_string() };
    match x.as_principal().ok_or_else(err)? {
        Head::Veb(c, d) => match compare(c, sigma) {
            Ordering::Equal => Ok(d.clone()),
            Ordering::Greater => Ok(x.clone()),
            Ordering::Less => Err(err()),
        },
        Head::Gam(_) => match compare(x, sigma) {
            Ordering::Greater => Ok(x.clone()),
            Ordering::Equal => Ok(Ordinal::zero()),
            Ordering::Less => Err(err()),
        },
    }
}

/// `peel(ρ, A)` with a default peeler.
pub fn peel(rho: &Ordinal, a: &[Ordinal], ctx: &SeqCtx) -> Result<Vec<Ordinal>, LowerError> {
    Peeler::new(ctx).peel(rho, a)
}

/// `zeta(A, γ)` with a default peeler.
pub fn zeta(a: &[Ordinal], gamma: &Ordinal, ctx: &SeqCtx) -> Result<Option<Ordinal>, LowerError> {
    Peeler::new(ctx).zeta(a, gamma)
}

/// Parameters `(α, γ, k, μ)` of a lower-bound instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerParams {
    /// Target height.
    pub alpha: Ordinal,
    /// Exponent parameter; colored sets are `(1+γ)`-size.
    pub gamma: Ordinal,
    /// Base number of colors (the coloring uses `k+3`).
    pub k: u64,
    /// The ordinal driving `T`.
    pub mu: Ordinal,
}

impl LowerParams {
    /// `φ_{log γ}(α ⨰ k)`.
    pub fn bound(&self) -> Ordinal {
        philog_apply(&self.gamma, &nat_prod_fin(&self.alpha, self.k))
    }

    /// `1 + γ`.
    pub fn one_plus_gamma(&self) -> Ordinal {
        add(&Ordinal::one(), &self.gamma)
    }

    /// Advisory notes on the hypotheses `k > 0`, `γ < α`, `α ≥ ω` and
    /// `μ < φ_{log γ}(α ⨰ k)`.
    pub fn advisories(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.k == 0 {
            out.push("k must be positive".into());
        }
        if compare(&self.gamma, &self.alpha) != Ordering::Less {
            out.push(format!("gamma = {} is not below alpha = {}", self.gamma, self.alpha));
        }
        if compare(&self.alpha, &Ordinal::omega()) == Ordering::Less {
            out.push(format!("alpha = {} is finite", self.alpha));
        }
        if compare(&self.mu, &self.bound()) != Ordering::Less {
            out.push(format!("mu = {} is not below {}", self.mu, self.bound()));
        }
        out
    }
}

/// The generated prefix of `M` with per-element certificates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MWitness {
    /// `M(0) < M(1) < …`.
    pub elements: Vec<u64>,
    /// For each element, the bound `b` with `b < M(n)` it was chosen above.
    pub certificates: Vec<u64>,
}

fn m_bound(n: usize, prior: &[u64], params: &LowerParams, dpart: &DPartition, ctx: &SeqCtx) -> u64 {
    let dn = |x: &Ordinal| double_norm(x, Some(dpart), ctx);
    if n == 0 {
        let g1 = add(&params.gamma, &Ordinal::one());
        return dn(&params.mu).max(dn(&Ordinal::omega())).max(dn(&g1)) + 2;
    }
    let mut best = 0;
    for mask in 0u64..(1u64 << prior.len()) {
        let s: Vec<u64> = prior.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &x)| x).collect();
        best = best.max(dn(&fs_path(&params.mu, &s, ctx)) + 2);
    }
    best
}

/// Generates `count` elements of `M`, each the least admissible value.
pub fn build_m(params: &LowerParams, count: usize, ctx: &SeqCtx) -> Result<MWitness, LowerError> {
    if count > 20 {
        return Err(LowerError::Precondition("the subset sweep is limited to 20 elements".into()));
    }
    let dpart = DPartition::new(&params.alpha, params.k)?;
    let mut elements: Vec<u64> = Vec::with_capacity(count);
    let mut certificates = Vec::with_capacity(count);
    for n in 0..count {
        let bound = m_bound(n, &elements, params, &dpart, ctx);
        let base = if n == 0 { m_bound(0, &[], params, &dpart, ctx) } else { bound };
        let next = (base + 1).max(elements.last().map(|x| x + 1).unwrap_or(0)).max(2);
        elements.push(next);
        certificates.push(base);
    }
    Ok(MWitness { elements, certificates })
}

/// Recomputes every certificate of `m`.
pub fn verify_m(m: &MWitness, params: &LowerParams, ctx: &SeqCtx) -> Result<bool, LowerError> {
    let dpart = DPartition::new(&params.alpha, params.k)?;
    for (n, &x) in m.elements.iter().enumerate() {
        let b = m_bound(n, &m.elements[..n], params, &dpart, ctx);
        let b0 = m_bound(0, &[], params, &dpart, ctx);
        if m.certificates[n] != b || x <= b || x <= b0 || (n > 0 && x <= m.elements[n - 1]) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The `(k+3)`-coloring of the `(1+γ)`-size subsets of `s`, with `T(s(i)) =
/// μ[s↾i]`.
pub struct LowerColoring {
    params: LowerParams,
    ctx: SeqCtx,
    s: Vec<u64>,
    t: Vec<Ordinal>,
    dpart: DPartition,
    peeler: Peeler,
}

impl LowerColoring {
    /// Prepares the coloring for the ground set `s`.
    pub fn new(s: &[u64], params: &LowerParams, ctx: &SeqCtx) -> Result<Self, LowerError> {
        let dpart = DPartition::new(&params.alpha, params.k)?;
        let t = (0..s.len()).map(|i| fs_path(&params.mu, &s[..i], ctx)).collect();
        Ok(LowerColoring {
            params: params.clone(),
            ctx: ctx.clone(),
            s: s.to_vec(),
            t,
            peeler: Peeler::with_partition(ctx, dpart.clone()),
            dpart,
        })
    }

    /// `T(u)` for `u ⊆ s`.
    pub fn t_of(&self, u: &[u64]) -> Result<Vec<Ordinal>, LowerError> {
        u.iter()
            .map(|x| {
                self.s
                    .binary_search(x)
                    .map(|i| self.t[i].clone())
                    .map_err(|_| LowerError::Precondition(format!("{x} is not in the ground set")))
            })
            .collect()
    }

    /// `c(A)` for a tuple of ordinals.
    pub fn color_tuple(&mut self, a: &[Ordinal]) -> Result<u64, LowerError> {
        let k = self.params.k;
        let gamma = self.params.gamma.clone();
        let za = self.peeler.zeta(a, &gamma)?;
        let tail = if a.is_empty() { a } else { &a[1..] };
        Ok(match za {
            None => {
                let p = self.peeler.p(&gamma, a)?;
                self.dpart.classify(&p)?
            }
            Some(za) => match self.peeler.zeta(tail, &gamma)? {
                Some(zm) => match compare(&za, &zm) {
                    Ordering::Greater => k,
                    Ordering::Equal => k + 1,
                    Ordering::Less => k + 2,
                },
                None => k + 2,
            },
        })
    }

    /// `c̄(u) = c(T(u))` for `u ⊆ s`.
    pub fn color_set(&mut self, u: &[u64]) -> Result<u64, LowerError> {
        let a = self.t_of(u)?;
        self.color_tuple(&a)
    }

    /// All `(1+γ)`-size subsets of `s` with their colors.
    pub fn table(&mut self) -> Result<Coloring, LowerError> {
        let opg = self.params.one_plus_gamma();
        let mut pairs = Vec::new();
        let mut stack: Vec<(Vec<u64>, usize)> = vec![(Vec::new(), 0)];
        while let Some((u, from)) = stack.pop() {
            for i in from..self.s.len() {
                let mut v = u.clone();
                v.push(self.s[i]);
                match classify_large(&opg, &v, &self.ctx).verdict {
                    Verdict::Size => {
                        let c = self.color_set(&v)?;
                        pairs.push((FiniteSet::from_sorted(v), c as usize));
                    }
                    Verdict::Small => stack.push((v, i + 1)),
                    Verdict::Large => {}
                }
            }
        }
        Ok(Coloring::new((self.params.k + 3) as usize, pairs))
    }

    /// Checks on every `(1+γ)`-large `u ⊆ s` that `c̄(u)` equals the color
    /// of its size prefix; returns the first counterexample.
    pub fn prefix_invariance(&mut self) -> Result<Option<FiniteSet>, LowerError> {
        self.prefix_sweep(|me, u, v| Ok(me.color_set(u)? == me.color_set(v)?))
    }

    /// Checks on every `(1+γ)`-large `u ⊆ s` that `p_γ(T(u))` equals
    /// `p_γ` of its size prefix; returns the first counterexample.
    pub fn prefix_peel_invariance(&mut self) -> Result<Option<FiniteSet>, LowerError> {
        let gamma = self.params.gamma.clone();
        self.prefix_sweep(|me, u, v| {
            let (a, b) = (me.t_of(u)?, me.t_of(v)?);
            Ok(me.peeler.p(&gamma, &a)? == me.peeler.p(&gamma, &b)?)
        })
    }

    fn prefix_sweep(
        &mut self,
        mut agree: impl FnMut(&mut Self, &[u64], &[u64]) -> Result<bool, LowerError>,
    ) -> Result<Option<FiniteSet>, LowerError> {
        let opg = self.params.one_plus_gamma();
        let n = self.s.len();
        if n > 20 {
            return Err(LowerError::Precondition("prefix sweep limited to 20 points".into()));
        }
        for mask in 1u64..(1u64 << n) {
            let u: Vec<u64> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| self.s[i]).collect();
            let v = classify_large(&opg, &u, &self.ctx);
            if v.verdict == Verdict::Large {
                let p = v.prefix_len.expect("large sets have a prefix");
                if !agree(self, &u, &u[..p])? {
                    return Ok(Some(FiniteSet::from_sorted(u)));
                }
            }
        }
        Ok(None)
    }
}

/// `color_sets(s, μ, γ, α, k)`.
pub fn color_sets(s: &[u64], params: &LowerParams, ctx: &SeqCtx) -> Result<Coloring, LowerError> {
    LowerColoring::new(s, params, ctx)?.table()
}

/// Outcome of [`homog_absence_check`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "result")]
pub enum HomogSearch {
    /// No homogeneous set of the target size exists in `s`.
    NoneFound {
        /// Search nodes visited.
        nodes: u64,
    },
    /// A homogeneous `((1+γ)⊎α)`-size set.
    Found {
        /// The set.
        witness: FiniteSet,
        /// Its color.
        color: usize,
        /// Search nodes visited.
        nodes: u64,
    },
}

struct HomogDfs<'a> {
    s: &'a [u64],
    coloring: &'a Coloring,
    opg: Ordinal,
    alpha: Ordinal,
    ctx: &'a SeqCtx,
    budget: u64,
    nodes: u64,
}

impl HomogDfs<'_> {
    /// Colors of the `(1+γ)`-size sets of `h⌢⟨x⟩` that contain `x`.
    fn new_colors(&self, h: &[u64], x: u64) -> Option<BTreeSet<usize>> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<(Vec<u64>, usize)> = vec![(Vec::new(), 0)];
        while let Some((u, from)) = stack.pop() {
            let mut ux = u.clone();
            ux.push(x);
            match classify_large(&self.opg, &ux, self.ctx).verdict {
                Verdict::Size => {
                    out.insert(self.coloring.get(&ux)?);
                }
                Verdict::Small | Verdict::Large => {}
            }
            if classify_large(&self.opg, &u, self.ctx).verdict != Verdict::Small {
                continue;
            }
            for (i, &hv) in h.iter().enumerate().skip(from) {
                let mut v = u.clone();
                v.push(hv);
                stack.push((v, i + 1));
            }
        }
        Some(out)
    }

    fn dfs(&mut self, h: &mut Vec<u64>, from: usize, color: usize, seen: bool) -> Result<Option<(FiniteSet, usize)>, LowerError> {
        for i in from..self.s.len() {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(LowerError::Budget(self.nodes));
            }
            let x = self.s[i];
            let Some(cols) = self.new_colors(h, x) else { continue };
            if cols.iter().any(|&c| c != color) {
                continue;
            }
            let now_seen = seen || !cols.is_empty();
            h.push(x);
            let v = uplus_classify(&self.opg, &self.alpha, h, self.ctx).verdict;
            match v {
                Verdict::Size if now_seen => return Ok(Some((FiniteSet::from_sorted(h.clone()), color))),
                Verdict::Small => {
                    if let Some(w) = self.dfs(h, i + 1, color, now_seen)? {
                        return Ok(Some(w));
                    }
                }
                _ => {}
            }
            h.pop();
        }
        Ok(None)
    }
}

/// Bounded search for a homogeneous `((1+γ)⊎α)`-size subset of `s`, one
/// color class at a time.
pub fn homog_absence_check(
    s: &[u64],
    coloring: &Coloring,
    gamma: &Ordinal,
    alpha: &Ordinal,
    ctx: &SeqCtx,
    budget: u64,
) -> Result<HomogSearch, LowerError> {
    let mut search = HomogDfs {
        s,
        coloring,
        opg: add(&Ordinal::one(), gamma),
        alpha: alpha.clone(),
        ctx,
        budget,
        nodes: 0,
    };
    if budget == 0 {
        return Err(LowerError::Budget(0));
    }
    for color in 0..coloring.k {
        if let Some((witness, color)) = search.dfs(&mut Vec::new(), 0, color, false)? {
            return Ok(HomogSearch::Found { witness, color, nodes: search.nodes });
        }
    }
    Ok(HomogSearch::NoneFound { nodes: search.nodes })
}

/// Whether `w` is homogeneous for `coloring` and `((1+γ)⊎α)`-size, checked
/// directly.
pub fn verify_homogeneous(w: &[u64], coloring: &Coloring, gamma: &Ordinal, alpha: &Ordinal, ctx: &SeqCtx) -> bool {
    let opg = add(&Ordinal::one(), gamma);
    if uplus_classify(&opg, alpha, w, ctx).verdict != Verdict::Size {
        return false;
    }
    let n = w.len().min(24);
    let mut color = None;
    for mask in 1u64..(1u64 << n) {
        let u: Vec<u64> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| w[i]).collect();
        if classify_large(&opg, &u, ctx).verdict == Verdict::Size {
            let Some(c) = coloring.get(&u) else { return false };
            if color.is_some_and(|x| x != c) {
                return false;
            }
            color = Some(c);
        }
    }
    color.is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::ord;

    fn c() -> SeqCtx {
        SeqCtx::default()
    }

    fn tuple(xs: &[&str]) -> Vec<Ordinal> {
        xs.iter().map(|x| ord(x)).collect()
    }

    #[test]
    fn overline_cases() {
        assert_eq!(overline(&ord("w^(2)+w"), &ord("w^(2)+1")), ord("1"));
        assert_eq!(overline(&ord("w^(w)"), &ord("w^(3)")), ord("w"));
        assert_eq!(overline(&ord("w"), &ord("w")), ord("0"));
        assert_eq!(overline(&ord("w*2"), &ord("w")), ord("1"));
    }

    #[test]
    fn peel_one_cases() {
        assert_eq!(peel_one(&tuple(&["w^(2)+w", "w"])), tuple(&["2", "1"]));
        assert_eq!(peel_one(&tuple(&["w", "w"])), tuple(&["0", "1"]));
        let ctx = c();
        let a = tuple(&["eps(0)", "w^(3)"]);
        assert_eq!(peel(&ord("0"), &a, &ctx).unwrap(), a);
    }

    #[test]
    fn peel_limits() {
        let ctx = c();
        // p̄_ω strips φ₁ after every φ₀ layer is gone.
        assert_eq!(peel(&ord("w"), &tuple(&["eps(0)", "0"]), &ctx).unwrap(), tuple(&["0", "0"]));
        assert_eq!(peel(&ord("w"), &tuple(&["phi(1,1)"]), &ctx).unwrap(), tuple(&["1"]));
        assert_eq!(peel(&ord("w"), &tuple(&["w^(w)"]), &ctx).unwrap(), tuple(&["0"]));
        let g0 = ord("G(0)");
        assert_eq!(strip(&g0, &g0).unwrap(), ord("0"));
        assert!(strip(&ord("2"), &ord("eps(0)")).is_err());
    }

    #[test]
    fn s_sets() {
        assert_eq!(s_set(&ord("0")), tuple(&["0"]));
        assert_eq!(s_set(&ord("w^(2)")), tuple(&["0", "1", "2"]));
        assert_eq!(s_set(&ord("phi(1,0)")), tuple(&["0", "1", "w"]));
    }

    #[test]
    fn zeta_cases() {
        let ctx = c();
        assert_eq!(zeta(&tuple(&["w^(2)", "w"]), &ord("2"), &ctx).unwrap(), Some(ord("2")));
        assert_eq!(zeta(&tuple(&["1", "w"]), &ord("2"), &ctx).unwrap(), Some(ord("0")));
        assert_eq!(zeta(&tuple(&["w", "0"]), &ord("0"), &ctx).unwrap(), None);
    }

    #[test]
    fn d_partition_bands() {
        let d = make_d_partition(&ord("w"), 2).unwrap();
        assert_eq!(d.classify(&ord("5")).unwrap(), 0);
        assert_eq!(d.pi(&ord("5")).unwrap(), ord("5"));
        assert_eq!(d.classify(&ord("w+3")).unwrap(), 1);
        assert_eq!(d.pi(&ord("w+3")).unwrap(), ord("3"));
        assert_eq!(d.pi_inv(1, &ord("3")).unwrap(), ord("w+3"));
        assert!(d.classify(&ord("w*2")).is_err());
        let one = make_d_partition(&ord("w^(2)+w"), 1).unwrap();
        assert_eq!(one.classify(&ord("w^(2)+5")).unwrap(), 0);
        assert_eq!(one.pi(&ord("w^(2)+5")).unwrap(), ord("w^(2)+5"));
    }

    #[test]
    fn double_norms() {
        let ctx = c();
        let d0 = double_norm(&ord("0"), None, &ctx);
        assert_eq!(d0, 1 + good_norm(&ord("0"), &ctx).max(1));
        assert!(double_norm(&ord("2"), None, &ctx) <= double_norm(&ord("w^(2)"), None, &ctx));
    }

    #[test]
    fn constant_coloring_is_found() {
        let ctx = c();
        let s: Vec<u64> = (2..12).collect();
        let pairs: Vec<(FiniteSet, usize)> = crate::sample::subsets_of(&s, 2)
            .into_iter()
            .filter(|u| u.len() == 2)
            .map(|u| (FiniteSet::from_sorted(u), 0))
            .collect();
        let col = Coloring::new(1, pairs);
        let r = homog_absence_check(&s, &col, &ord("1"), &ord("3"), &ctx, 100_000).unwrap();
        match r {
            HomogSearch::Found { witness, .. } => assert!(verify_homogeneous(&witness, &col, &ord("1"), &ord("3"), &ctx)),
            other => panic!("expected a witness, got {other:?}"),
        }
        assert!(matches!(homog_absence_check(&s, &col, &ord("1"), &ord("3"), &ctx, 0), Err(LowerError::Budget(0))));
    }
}
#[cfg(test)]
mod instance_tests {
    use super::*;
    use crate::parse::ord;

    fn pinned() -> LowerParams {
        LowerParams { alpha: ord("w"), gamma: ord("1"), k: 1, mu: ord("w*3") }
    }

    #[test]
    fn pinned_instance() {
        let ctx = SeqCtx::default();
        let p = pinned();
        assert!(p.advisories().is_empty());
        let m = build_m(&p, 8, &ctx).unwrap();
        assert_eq!(m.elements, vec![14, 39, 89, 189, 389, 789, 1589, 3189]);
        assert!(verify_m(&m, &p, &ctx).unwrap());
        let s = &m.elements[..6];
        let mut lc = LowerColoring::new(s, &p, &ctx).unwrap();
        assert_eq!(lc.t_of(&s[..2]).unwrap(), vec![ord("w*3"), ord("w*2+14")]);
        let col = lc.table().unwrap();
        assert_eq!(col.entries.len(), 15);
        assert!(col.colors_in_range());
        assert_eq!(lc.prefix_peel_invariance().unwrap(), None);
        // For finite γ the color of a large set also depends on ζ of its tail.
        assert_eq!(lc.prefix_invariance().unwrap(), Some(FiniteSet::from_sorted(vec![14, 39, 89])));
        let r = homog_absence_check(s, &col, &p.gamma, &p.alpha, &ctx, 1_000_000).unwrap();
        assert!(matches!(r, HomogSearch::NoneFound { .. }));
    }

    #[test]
    fn infinite_gamma_is_prefix_invariant() {
        let ctx = SeqCtx::default();
        let p = LowerParams { alpha: ord("w*2"), gamma: ord("w"), k: 1, mu: ord("w^(2)") };
        let m = build_m(&p, 7, &ctx).unwrap();
        let mut lc = LowerColoring::new(&m.elements, &p, &ctx).unwrap();
        assert_eq!(lc.prefix_invariance().unwrap(), None);
        assert_eq!(lc.prefix_peel_invariance().unwrap(), None);
    }
}
