//! Normal-form ordinal notation below `Γ_ζ`.
//!
//! An [`Ordinal`] is a descending sum of additively indecomposable heads with
//! positive finite coefficients. A head is either a Veblen term `φ_a(b)` kept in
//! the unique form `b < φ_a(b)`, or a `Γ_ξ` term whose index is a [`BaseIdx`].
//! Structural equality coincides with ordinal equality because every
//! constructor normalizes.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Finite coefficient of a CNF term.
pub type Coeff = u64;

/// Errors raised by ordinal arithmetic and construction.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrdError {
    /// A coefficient left the machine-width range.
    #[error("coefficient overflow")]
    CoeffOverflow,
    /// A `Γ` index is not below the configured `ζ`.
    #[error("Γ index {0} is not below ζ = {1}")]
    GammaIndexOutOfRange(BaseIdx, String),
    /// Left subtraction `a - b` was requested with `b > a`.
    #[error("cannot subtract {1} from the smaller ordinal {0}")]
    NegativeDifference(String, String),
}

/// Index of a `Γ` head: a natural number or the symbol for `ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BaseIdx {
    /// A finite index `k`.
    Fin(u64),
    /// The index `ω`.
    Omega,
}

impl fmt::Display for BaseIdx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseIdx::Fin(k) => write!(f, "{k}"),
            BaseIdx::Omega => write!(f, "w"),
        }
    }
}

/// An additively indecomposable ordinal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Head {
    /// `φ_index(arg)` with `arg < φ_index(arg)`; `ω^e` is `Veb(0, e)`.
    Veb(Ordinal, Ordinal),
    /// `Γ_ξ`.
    Gam(BaseIdx),
}

/// One CNF term `head · coeff`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    /// The indecomposable part.
    pub head: Head,
    /// Its multiplicity, always at least 1.
    pub coeff: Coeff,
}

/// A normalized ordinal below `Γ_ζ`. The empty term list is zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ordinal(Arc<[Term]>);

impl Default for Ordinal {
    fn default() -> Self {
        Ordinal::zero()
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ordinal({self})")
    }
}

impl Head {
    /// The CNF exponent `e` with `ω^e` equal to this head.
    pub fn exponent(&self) -> Ordinal {
        match self {
            Head::Veb(a, b) if a.is_zero() => b.clone(),
            _ => Ordinal::from_head(self.clone()),
        }
    }

    /// The least index `c` such that this head lies in the range of `φ_c`
    /// and is not a fixed point of it, as an ordinal. `Γ_ξ` is its own index.
    pub fn veblen_index(&self) -> Ordinal {
        match self {
            Head::Veb(a, _) => a.clone(),
            Head::Gam(_) => Ordinal::from_head(self.clone()),
        }
    }
}

impl Ordinal {
    /// Zero.
    pub fn zero() -> Self {
        Ordinal(Arc::from(Vec::new()))
    }

    /// The finite ordinal `n`.
    pub fn nat(n: u64) -> Self {
        if n == 0 {
            Ordinal::zero()
        } else {
            Ordinal::from_terms(vec![Term { head: Head::Veb(Ordinal::zero(), Ordinal::zero()), coeff: n }])
        }
    }

    /// One.
    pub fn one() -> Self {
        Ordinal::nat(1)
    }

    /// `ω`.
    pub fn omega() -> Self {
        omega_pow(&Ordinal::one())
    }

    /// `ε_k = φ_1(k)`.
    pub fn epsilon(k: u64) -> Self {
        veblen(&Ordinal::one(), &Ordinal::nat(k))
    }

    /// Builds an ordinal from terms that are already in strictly decreasing
    /// head order with positive coefficients.
    pub fn from_terms(terms: Vec<Term>) -> Self {
        debug_assert!(terms.iter().all(|t| t.coeff > 0));
        debug_assert!(terms.windows(2).all(|w| cmp_head(&w[0].head, &w[1].head) == Ordering::Greater));
        Ordinal(Arc::from(terms))
    }

    /// The single-term ordinal `h`.
    pub fn from_head(h: Head) -> Self {
        Ordinal::from_terms(vec![Term { head: h, coeff: 1 }])
    }

    /// The CNF terms, leading first.
    pub fn terms(&self) -> &[Term] {
        &self.0
    }

    /// Whether this is zero.
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Whether this is a natural number, returning it.
    pub fn as_nat(&self) -> Option<u64> {
        match self.terms() {
            [] => Some(0),
            [t] if t.head.is_one() => Some(t.coeff),
            _ => None,
        }
    }

    /// The head when this ordinal is additively indecomposable.
    pub fn as_principal(&self) -> Option<&Head> {
        match self.terms() {
            [t] if t.coeff == 1 => Some(&t.head),
            _ => None,
        }
    }

    /// Whether this ordinal is a successor.
    pub fn is_successor(&self) -> bool {
        self.terms().last().map(|t| t.head.is_one()).unwrap_or(false)
    }

    /// Whether this ordinal is a limit (nonzero and not a successor).
    pub fn is_limit(&self) -> bool {
        !self.is_zero() && !self.is_successor()
    }

    /// The predecessor of a successor ordinal.
    pub fn pred(&self) -> Option<Ordinal> {
        if !self.is_successor() {
            return None;
        }
        let mut terms = self.terms().to_vec();
        let last = terms.last_mut().expect("successor is nonzero");
        if last.coeff == 1 {
            terms.pop();
        } else {
            last.coeff -= 1;
        }
        Some(Ordinal::from_terms(terms))
    }

    /// Number of CNF terms counted with multiplicity.
    pub fn expanded_len(&self) -> u128 {
        self.terms().iter().map(|t| t.coeff as u128).sum()
    }

    /// The exponents of the CNF terms with multiplicities, leading first.
    pub fn exponents(&self) -> Vec<(Ordinal, Coeff)> {
        self.terms().iter().map(|t| (t.head.exponent(), t.coeff)).collect()
    }

    /// Splits `α = α₀ + ω^{a}` at its last expanded term, returning `(α₀, head)`.
    pub fn split_last(&self) -> Option<(Ordinal, Head)> {
        let last = self.terms().last()?;
        let mut terms = self.terms().to_vec();
        let l = terms.last_mut().expect("nonempty");
        if l.coeff == 1 {
            terms.pop();
        } else {
            l.coeff -= 1;
        }
        Some((Ordinal::from_terms(terms), last.head.clone()))
    }

    /// Maximum coefficient appearing anywhere in the representation, including
    /// finite `Γ` indices.
    pub fn max_coeff(&self) -> u64 {
        let mut m = 0;
        for t in self.terms() {
            m = m.max(t.coeff);
            match &t.head {
                Head::Veb(a, b) => m = m.max(a.max_coeff()).max(b.max_coeff()),
                Head::Gam(BaseIdx::Fin(k)) => m = m.max(*k),
                Head::Gam(BaseIdx::Omega) => {}
            }
        }
        m
    }

    /// Total number of term nodes in the representation tree.
    pub fn node_count(&self) -> u64 {
        self.terms()
            .iter()
            .map(|t| {
                1 + match &t.head {
                    Head::Veb(a, b) => a.node_count() + b.node_count(),
                    Head::Gam(_) => 0,
                }
            })
            .sum()
    }

    /// Whether the representation has more than `cap` term nodes; visits at
    /// most `cap + 1` nodes.
    pub fn node_count_exceeds(&self, cap: u64) -> bool {
        fn walk(x: &Ordinal, budget: &mut u64) -> bool {
            for t in x.terms() {
                if *budget == 0 {
                    return true;
                }
                *budget -= 1;
                if let Head::Veb(a, b) = &t.head {
                    if walk(a, budget) || walk(b, budget) {
                        return true;
                    }
                }
            }
            false
        }
        let mut budget = cap;
        walk(self, &mut budget)
    }

    /// Nesting depth of the representation tree (zero has depth 0).
    pub fn depth(&self) -> u32 {
        self.terms()
            .iter()
            .map(|t| {
                1 + match &t.head {
                    Head::Veb(a, b) => a.depth().max(b.depth()),
                    Head::Gam(_) => 0,
                }
            })
            .max()
            .unwrap_or(0)
    }

    /// Largest finite `Γ` index used, if any `Γ` head occurs.
    pub fn gamma_indices(&self, out: &mut Vec<BaseIdx>) {
        for t in self.terms() {
            match &t.head {
                Head::Veb(a, b) => {
                    a.gamma_indices(out);
                    b.gamma_indices(out);
                }
                Head::Gam(i) => out.push(i.clone()),
            }
        }
    }
}

impl Head {
    fn is_one(&self) -> bool {
        matches!(self, Head::Veb(a, b) if a.is_zero() && b.is_zero())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::cmp::Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        compare(self, other)
    }
}

/// Head comparisons tried before switching to the memoized comparator.
const FAST_CMP_STEPS: u64 = 4096;

/// Total ordinal comparison of normal forms.
pub fn compare(a: &Ordinal, b: &Ordinal) -> Ordering {
    Cmp::run(|c| c.ord(a, b))
}

/// Compares two indecomposable heads.
pub fn cmp_head(x: &Head, y: &Head) -> Ordering {
    Cmp::run(|c| c.head(x, y))
}

/// Compares an ordinal with the single-term ordinal `h`.
fn cmp_ord_head(o: &Ordinal, h: &Head) -> Ordering {
    Cmp::run(|c| c.ord_head(o, h))
}

/// Comparison state. Shared subterms make plain recursion exponential on
/// large terms, so after [`FAST_CMP_STEPS`] steps the comparison restarts
/// with results cached by node address.
struct Cmp {
    steps: u64,
    memo: Option<HashMap<(usize, usize), Ordering>>,
    gammas: HashMap<(usize, BaseIdx), bool>,
}

impl Cmp {
    fn run(f: impl Fn(&mut Cmp) -> Option<Ordering>) -> Ordering {
        let mut fast = Cmp { steps: FAST_CMP_STEPS, memo: None, gammas: HashMap::new() };
        if let Some(o) = f(&mut fast) {
            return o;
        }
        let mut slow = Cmp { steps: u64::MAX, memo: Some(HashMap::new()), gammas: HashMap::new() };
        f(&mut slow).expect("the memoized comparison has no step limit")
    }

    fn tick(&mut self) -> Option<()> {
        self.steps = self.steps.checked_sub(1)?;
        Some(())
    }

    fn ord(&mut self, a: &Ordinal, b: &Ordinal) -> Option<Ordering> {
        if Arc::ptr_eq(&a.0, &b.0) {
            return Some(Ordering::Equal);
        }
        let key = (a.0.as_ptr() as usize, b.0.as_ptr() as usize);
        if let Some(o) = self.memo.as_ref().and_then(|m| m.get(&key)) {
            return Some(*o);
        }
        let mut out = a.terms().len().cmp(&b.terms().len());
        for (x, y) in a.terms().iter().zip(b.terms()) {
            match self.head(&x.head, &y.head)?.then(x.coeff.cmp(&y.coeff)) {
                Ordering::Equal => {}
                o => {
                    out = o;
                    break;
                }
            }
        }
        if let Some(m) = self.memo.as_mut() {
            m.insert(key, out);
        }
        Some(out)
    }

    fn ord_head(&mut self, o: &Ordinal, h: &Head) -> Option<Ordering> {
        Some(match o.terms() {
            [] => Ordering::Less,
            [t, rest @ ..] => match self.head(&t.head, h)? {
                Ordering::Equal if t.coeff == 1 && rest.is_empty() => Ordering::Equal,
                Ordering::Equal => Ordering::Greater,
                other => other,
            },
        })
    }

    fn head(&mut self, x: &Head, y: &Head) -> Option<Ordering> {
        self.tick()?;
        Some(match (x, y) {
            (Head::Gam(i), Head::Gam(j)) => i.cmp(j),
            (Head::Veb(a, b), Head::Veb(c, d)) => match self.ord(a, c)? {
                Ordering::Equal => self.ord(b, d)?,
                // φ_c(d) is a fixed point of φ_a: φ_a(b) < φ_c(d) iff b < φ_c(d).
                Ordering::Less => self.ord_head(b, y)?,
                // φ_a(b) is a fixed point of φ_c: φ_c(d) < φ_a(b) iff d < φ_a(b).
                Ordering::Greater => self.ord_head(d, x)?.reverse(),
            },
            // Every subterm of φ_c(d) is at most φ_c(d), and Γ_i is closed
            // under φ and +, so φ_c(d) < Γ_i iff every Γ head inside has
            // index below i.
            (Head::Gam(i), Head::Veb(c, d)) => {
                if self.gammas_below(c, i)? && self.gammas_below(d, i)? {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
            (Head::Veb(..), Head::Gam(_)) => self.head(y, x)?.reverse(),
        })
    }

    /// Whether every `Γ` head occurring in `x` has index below `i`.
    fn gammas_below(&mut self, x: &Ordinal, i: &BaseIdx) -> Option<bool> {
        let key = (x.0.as_ptr() as usize, i.clone());
        if let Some(v) = self.gammas.get(&key) {
            return Some(*v);
        }
        let mut out = true;
        for t in x.terms() {
            self.tick()?;
            let ok = match &t.head {
                Head::Gam(j) => j < i,
                Head::Veb(a, b) => self.gammas_below(a, i)? && self.gammas_below(b, i)?,
            };
            if !ok {
                out = false;
                break;
            }
        }
        if self.memo.is_some() {
            self.gammas.insert(key, out);
        }
        Some(out)
    }
}

/// `φ_a(b)` in normal form, collapsing fixed points.
pub fn veblen(a: &Ordinal, b: &Ordinal) -> Ordinal {
    if let Some(h) = b.as_principal() {
        let absorbed = match h {
            Head::Veb(c, _) => compare(c, a) == Ordering::Greater,
            Head::Gam(_) => cmp_ord_head(a, h) == Ordering::Less,
        };
        if absorbed {
            return b.clone();
        }
    }
    if b.is_zero() {
        if let Some(Head::Gam(_)) = a.as_principal() {
            return a.clone();
        }
    }
    Ordinal::from_head(Head::Veb(a.clone(), b.clone()))
}

/// `ω^e`.
pub fn omega_pow(e: &Ordinal) -> Ordinal {
    veblen(&Ordinal::zero(), e)
}

/// `Γ_ξ` without a range check; see [`crate::SeqCtx::gamma`] for the checked form.
pub fn gamma(xi: BaseIdx) -> Ordinal {
    Ordinal::from_head(Head::Gam(xi))
}

/// Ordinal sum `a + b`, reporting coefficient overflow.
pub fn try_add(a: &Ordinal, b: &Ordinal) -> Result<Ordinal, OrdError> {
    let Some(lead) = b.terms().first() else {
        return Ok(a.clone());
    };
    let mut out: Vec<Term> = Vec::with_capacity(a.terms().len() + b.terms().len());
    let mut merged = None;
    for t in a.terms() {
        match cmp_head(&t.head, &lead.head) {
            Ordering::Greater => out.push(t.clone()),
            Ordering::Equal => {
                merged = Some(t.coeff.checked_add(lead.coeff).ok_or(OrdError::CoeffOverflow)?);
                break;
            }
            Ordering::Less => break,
        }
    }
    match merged {
        Some(c) => {
            out.push(Term { head: lead.head.clone(), coeff: c });
            out.extend(b.terms()[1..].iter().cloned());
        }
        None => out.extend(b.terms().iter().cloned()),
    }
    Ok(Ordinal::from_terms(out))
}

/// Ordinal sum `a + b`. Panics on coefficient overflow; use [`try_add`] to
/// handle it.
pub fn add(a: &Ordinal, b: &Ordinal) -> Ordinal {
    try_add(a, b).expect("coefficient overflow in ordinal addition")
}

/// `a + 1`.
pub fn succ(a: &Ordinal) -> Ordinal {
    add(a, &Ordinal::one())
}

/// Natural (Hessenberg) sum `a # b`, reporting coefficient overflow.
pub fn try_nat_sum(a: &Ordinal, b: &Ordinal) -> Result<Ordinal, OrdError> {
    let (x, y) = (a.terms(), b.terms());
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(x.len() + y.len());
    while i < x.len() && j < y.len() {
        match cmp_head(&x[i].head, &y[j].head) {
            Ordering::Greater => {
                out.push(x[i].clone());
                i += 1;
            }
            Ordering::Less => {
                out.push(y[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                let c = x[i].coeff.checked_add(y[j].coeff).ok_or(OrdError::CoeffOverflow)?;
                out.push(Term { head: x[i].head.clone(), coeff: c });
                i += 1;
                j += 1;
            }
        }
    }
    out.extend(x[i..].iter().cloned());
    out.extend(y[j..].iter().cloned());
    Ok(Ordinal::from_terms(out))
}

/// Natural sum `a # b`. Panics on coefficient overflow.
pub fn nat_sum(a: &Ordinal, b: &Ordinal) -> Ordinal {
    try_nat_sum(a, b).expect("coefficient overflow in natural sum")
}

/// `a ⨰ k = a # … # a` (k copies), reporting coefficient overflow.
pub fn try_nat_prod_fin(a: &Ordinal, k: u64) -> Result<Ordinal, OrdError> {
    if k == 0 {
        return Ok(Ordinal::zero());
    }
    let terms = a
        .terms()
        .iter()
        .map(|t| {
            Ok(Term { head: t.head.clone(), coeff: t.coeff.checked_mul(k).ok_or(OrdError::CoeffOverflow)? })
        })
        .collect::<Result<Vec<_>, OrdError>>()?;
    Ok(Ordinal::from_terms(terms))
}

/// `a ⨰ k`. Panics on coefficient overflow.
pub fn nat_prod_fin(a: &Ordinal, k: u64) -> Ordinal {
    try_nat_prod_fin(a, k).expect("coefficient overflow in natural product")
}

/// Ordinal product `a · c` for a natural number `c`, reporting overflow.
pub fn try_mul_nat(a: &Ordinal, c: u64) -> Result<Ordinal, OrdError> {
    if c == 0 || a.is_zero() {
        return Ok(Ordinal::zero());
    }
    let mut terms = a.terms().to_vec();
    terms[0].coeff = terms[0].coeff.checked_mul(c).ok_or(OrdError::CoeffOverflow)?;
    Ok(Ordinal::from_terms(terms))
}

/// `a · c`. Panics on coefficient overflow.
pub fn mul_nat(a: &Ordinal, c: u64) -> Ordinal {
    try_mul_nat(a, c).expect("coefficient overflow in ordinal product")
}

/// `a · ω`, which is `ω^{e+1}` for the leading exponent `e` of a nonzero `a`.
pub fn times_omega(a: &Ordinal) -> Ordinal {
    match a.terms().first() {
        None => Ordinal::zero(),
        Some(t) => omega_pow(&succ(&t.head.exponent())),
    }
}

/// The unique `ρ` with `b + ρ = a`, defined when `b ≤ a`.
pub fn left_sub(a: &Ordinal, b: &Ordinal) -> Result<Ordinal, OrdError> {
    if compare(b, a) == Ordering::Greater {
        return Err(OrdError::NegativeDifference(a.to_string(), b.to_string()));
    }
    let (x, y) = (a.terms(), b.terms());
    let mut i = 0;
    while i < y.len() && x[i] == y[i] {
        i += 1;
    }
    if i == y.len() {
        return Ok(Ordinal::from_terms(x[i..].to_vec()));
    }
    if x[i].head == y[i].head {
        let mut out = vec![Term { head: x[i].head.clone(), coeff: x[i].coeff - y[i].coeff }];
        out.extend(x[i + 1..].iter().cloned());
        Ok(Ordinal::from_terms(out))
    } else {
        Ok(Ordinal::from_terms(x[i..].to_vec()))
    }
}

/// The `≥≥` relation: the last exponent of `a` is at least the first exponent
/// of `b`; true when either side is zero.
pub fn geqq(a: &Ordinal, b: &Ordinal) -> bool {
    match (a.terms().last(), b.terms().first()) {
        (Some(x), Some(y)) => cmp_head(&x.head, &y.head) != Ordering::Less,
        _ => true,
    }
}

/// `φ_{log γ}(x)`: applies `φ_{δ₀} ∘ … ∘ φ_{δₙ}` for the CNF exponents of `γ`,
/// repeating a factor once per unit of coefficient.
pub fn philog_apply(gamma: &Ordinal, x: &Ordinal) -> Ordinal {
    let mut acc = x.clone();
    for t in gamma.terms().iter().rev() {
        let e = t.head.exponent();
        for _ in 0..t.coeff {
            acc = veblen(&e, &acc);
        }
    }
    acc
}

/// A finite multiset of ordinals.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SubMultiset {
    counts: BTreeMap<Ordinal, u64>,
}

impl SubMultiset {
    /// Adds `n` copies of `x`.
    pub fn insert(&mut self, x: Ordinal, n: u64) {
        if n > 0 {
            *self.counts.entry(x).or_insert(0) += n;
        }
    }

    /// Multiset sum in place.
    pub fn absorb(&mut self, other: &SubMultiset, times: u64) {
        for (k, v) in &other.counts {
            self.insert(k.clone(), v * times);
        }
    }

    /// Multiplicity of `x`.
    pub fn multiplicity(&self, x: &Ordinal) -> u64 {
        self.counts.get(x).copied().unwrap_or(0)
    }

    /// Whether `x` occurs.
    pub fn contains(&self, x: &Ordinal) -> bool {
        self.multiplicity(x) > 0
    }

    /// Total number of elements counted with multiplicity.
    pub fn cardinality(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Distinct elements in ascending order with their multiplicities.
    pub fn iter(&self) -> impl Iterator<Item = (&Ordinal, u64)> {
        self.counts.iter().map(|(k, v)| (k, *v))
    }

    /// Distinct elements in ascending order.
    pub fn distinct(&self) -> Vec<Ordinal> {
        self.counts.keys().cloned().collect()
    }
}

/// The multiset `Sub(β)` of subterms.
pub fn sub_multiset(beta: &Ordinal) -> SubMultiset {
    let mut out = SubMultiset::default();
    match beta.as_principal() {
        None if beta.is_zero() => out.insert(Ordinal::zero(), 1),
        Some(h) => {
            out.insert(beta.clone(), 1);
            let arg = match h {
                Head::Veb(_, b) => b.clone(),
                Head::Gam(_) => Ordinal::zero(),
            };
            out.absorb(&sub_multiset(&arg), 1);
        }
        None => {
            out.insert(beta.clone(), 1);
            for t in beta.terms() {
                let single = Ordinal::from_head(t.head.clone());
                out.absorb(&sub_multiset(&single), t.coeff);
            }
        }
    }
    out
}

/// Cardinality of `Sub(β)` without materializing the multiset.
pub fn sub_cardinality(beta: &Ordinal) -> u64 {
    match beta.as_principal() {
        None if beta.is_zero() => 1,
        Some(Head::Veb(_, b)) => 1 + sub_cardinality(b),
        Some(Head::Gam(_)) => 2,
        None => {
            1 + beta
                .terms()
                .iter()
                .map(|t| t.coeff.saturating_mul(sub_cardinality(&Ordinal::from_head(t.head.clone()))))
                .fold(0u64, |a, b| a.saturating_add(b))
        }
    }
}
