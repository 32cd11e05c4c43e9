//! Fronts, blocks and barriers as lazy classifiers over infinite bases.
//!
//! A [`Front`] answers, for a finite set `t` inside its base, whether `t` is
//! Small (a proper prefix of a member), Size (a member) or Large (extends a
//! member). Fronts built from known constructions also carry exact node
//! heights `ht_B(t)` for `t` in the prefix tree `T(B)`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::ctx::SeqCtx;
use crate::finite_set::FiniteSet;
use crate::fundseq::{classify_large, fs_path};
pub use crate::fundseq::Verdict as Class;
use crate::ordinal::{add, compare, left_sub, Ordinal};

/// Failures of front construction and classification.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontError {
    /// The queried set leaves the front's base.
    #[error("{0} is not contained in the base")]
    NotInBase(FiniteSet),
    /// The queried set is not in the prefix tree `T(B)`.
    #[error("{0} is not in the tree of the front")]
    NotInTree(FiniteSet),
    /// An explicit base was asked about elements beyond its generated part.
    #[error("base stream exhausted beyond {0}")]
    BaseExhausted(u64),
    /// A search budget ran out; the classification is unknown.
    #[error("budget exhausted: {0}")]
    Budget(String),
    /// The two operands have incompatible bases.
    #[error("base mismatch: {0}")]
    BaseMismatch(String),
    /// A height annotation was required but the front has none.
    #[error("front {0} carries no height annotation")]
    NoHeight(String),
    /// The front's height is a single Cantor term.
    #[error("already atomic: height {0} has a single Cantor normal form term")]
    AlreadyAtomic(String),
    /// A documented precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// A strictly increasing infinite set of naturals, possibly known only up to
/// a generated prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseStream {
    /// `{n : n ≥ m}`.
    AllFrom(u64),
    /// An explicitly generated prefix of an infinite set; membership above
    /// the last generated element is unknown.
    Explicit(Arc<Vec<u64>>),
}

impl Default for BaseStream {
    fn default() -> Self {
        BaseStream::AllFrom(0)
    }
}

impl BaseStream {
    /// An explicit stream from strictly increasing elements.
    pub fn explicit(elems: Vec<u64>) -> Result<Self, FrontError> {
        if elems.is_empty() || elems.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FrontError::Precondition("explicit base must be nonempty and increasing".into()));
        }
        Ok(BaseStream::Explicit(Arc::new(elems)))
    }

    /// The least element.
    pub fn min(&self) -> u64 {
        match self {
            BaseStream::AllFrom(m) => *m,
            BaseStream::Explicit(v) => v[0],
        }
    }

    /// Whether `n` belongs to the stream.
    pub fn contains(&self, n: u64) -> Result<bool, FrontError> {
        match self {
            BaseStream::AllFrom(m) => Ok(n >= *m),
            BaseStream::Explicit(v) => {
                let last = *v.last().expect("nonempty");
                if n > last {
                    Err(FrontError::BaseExhausted(last))
                } else {
                    Ok(v.binary_search(&n).is_ok())
                }
            }
        }
    }

    /// Whether every element of `t` belongs to the stream.
    pub fn contains_all(&self, t: &[u64]) -> Result<bool, FrontError> {
        for &x in t {
            if !self.contains(x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The least element `≥ n`.
    pub fn next_at_least(&self, n: u64) -> Result<u64, FrontError> {
        match self {
            BaseStream::AllFrom(m) => Ok(n.max(*m)),
            BaseStream::Explicit(v) => {
                let i = v.partition_point(|&x| x < n);
                v.get(i).copied().ok_or(FrontError::BaseExhausted(*v.last().expect("nonempty")))
            }
        }
    }

    /// The first `count` elements `≥ from`.
    pub fn take_from(&self, from: u64, count: usize) -> Result<Vec<u64>, FrontError> {
        let mut out = Vec::with_capacity(count);
        let mut n = from;
        while out.len() < count {
            let x = self.next_at_least(n)?;
            out.push(x);
            n = x + 1;
        }
        Ok(out)
    }

    /// The intersection of two streams.
    pub fn intersect(&self, other: &BaseStream) -> Result<BaseStream, FrontError> {
        match (self, other) {
            (BaseStream::AllFrom(a), BaseStream::AllFrom(b)) => Ok(BaseStream::AllFrom(*a.max(b))),
            (BaseStream::AllFrom(m), BaseStream::Explicit(v))
            | (BaseStream::Explicit(v), BaseStream::AllFrom(m)) => {
                BaseStream::explicit(v.iter().copied().filter(|x| x >= m).collect())
            }
            (BaseStream::Explicit(a), BaseStream::Explicit(b)) => {
                let cap = (*a.last().expect("nonempty")).min(*b.last().expect("nonempty"));
                BaseStream::explicit(a.iter().copied().filter(|x| *x <= cap && b.binary_search(x).is_ok()).collect())
            }
        }
        .map_err(|_| FrontError::BaseMismatch("bases have no common elements".into()))
    }

    /// The part of the stream strictly above `n`.
    pub fn above(&self, n: Option<u64>) -> Result<BaseStream, FrontError> {
        match n {
            None => Ok(self.clone()),
            Some(n) => self.intersect(&BaseStream::AllFrom(n + 1)),
        }
    }

    /// Whether `self` is `other ∩ [m, ∞)` for some `m`, judged on the
    /// generated part.
    pub fn is_final_segment_of(&self, other: &BaseStream) -> bool {
        match (self, other) {
            (BaseStream::AllFrom(a), BaseStream::AllFrom(b)) => a >= b,
            (BaseStream::AllFrom(_), BaseStream::Explicit(_)) => false,
            (BaseStream::Explicit(v), BaseStream::AllFrom(b)) => {
                v[0] >= *b && v.windows(2).all(|w| w[1] == w[0] + 1)
            }
            (BaseStream::Explicit(a), BaseStream::Explicit(b)) => {
                b.iter().position(|x| *x == a[0]).map(|i| b[i..].starts_with(&a[..a.len().min(b.len() - i)])).unwrap_or(false)
            }
        }
    }
}

impl fmt::Display for BaseStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseStream::AllFrom(m) => write!(f, "[{m},inf)"),
            BaseStream::Explicit(v) => write!(f, "{{{} generated, first {}}}", v.len(), v[0]),
        }
    }
}

/// Which construction produced a front.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// `{⟨⟩}`.
    Degenerate,
    /// All `n`-element sets.
    Uniform,
    /// `{s : |s| = s(0)+1}`.
    Schreier,
    /// The `α`-size sets of the fundamental-sequence system.
    AlphaSize,
    /// `A ⊕ B`.
    Oplus,
    /// `A ⊔ B`.
    Sqcup,
    /// `B ↾ X`.
    Restrict,
    /// `B_s`.
    Tail,
    /// The Lower Part (threshold rule).
    LowerPart,
    /// The Upper Part (leaves beyond the Lower Part).
    UpperPart,
    /// The pigeonhole front `B(A₀,…,A_{k−1})`.
    Pigeon,
    /// A Ramsey closure.
    Closure,
    /// Any other hand-built front.
    Custom,
}

/// A front implemented outside this module.
pub trait FrontImpl: Send + Sync {
    /// The base stream.
    fn base(&self) -> &BaseStream;
    /// Classification of a set already known to lie in the base.
    fn classify(&self, t: &[u64]) -> Result<Class, FrontError>;
    /// `ht_B(t)` for `t` in the tree, or `None` without annotation.
    fn height_at(&self, _t: &[u64]) -> Result<Option<Ordinal>, FrontError> {
        Ok(None)
    }
    /// Short description in front-expression style.
    fn describe(&self) -> String;
    /// Provenance tag.
    fn provenance(&self) -> Provenance {
        Provenance::Custom
    }
}

enum Kind {
    Degenerate,
    Uniform(u64),
    Schreier,
    AlphaSize(Ordinal, SeqCtx),
    Oplus(Front, Front),
    Sqcup(Front, Front),
    Restrict(Front),
    Tail(Front, FiniteSet),
    Custom(Arc<dyn FrontImpl>),
}

struct Node {
    base: BaseStream,
    kind: Kind,
}

/// A front, block or barrier presented as a classifier.
#[derive(Clone)]
pub struct Front(Arc<Node>);

impl fmt::Debug for Front {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Front({})", self.describe())
    }
}

impl fmt::Display for Front {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

fn node(base: BaseStream, kind: Kind) -> Front {
    Front(Arc::new(Node { base, kind }))
}

/// The degenerate front `{⟨⟩}` over `ℕ`.
pub fn make_degenerate() -> Front {
    make_degenerate_on(BaseStream::AllFrom(0))
}

/// The degenerate front over a given base.
pub fn make_degenerate_on(base: BaseStream) -> Front {
    node(base, Kind::Degenerate)
}

/// `[base]^n`, the `n`-element subsets.
pub fn make_uniform(n: u64, base: BaseStream) -> Front {
    if n == 0 {
        return make_degenerate_on(base);
    }
    node(base, Kind::Uniform(n))
}

/// The Schreier barrier `{s : |s| = s(0)+1}`.
pub fn make_schreier(base: BaseStream) -> Front {
    node(base, Kind::Schreier)
}

/// `B^α`, the `α`-size sets over `M`; requires `min M > 1`.
pub fn make_alpha_size(alpha: &Ordinal, m: BaseStream, ctx: &SeqCtx) -> Result<Front, FrontError> {
    if m.min() <= 1 {
        return Err(FrontError::Precondition("the base of an alpha-size front must have min > 1".into()));
    }
    Ok(node(m, Kind::AlphaSize(alpha.clone(), ctx.clone())))
}

/// `A ⊕ B = {s⌢t : s ∈ B, t ∈ A}`: walk `B` to its member, then `A`.
pub fn oplus(a: &Front, b: &Front) -> Result<Front, FrontError> {
    let base = a.base().intersect(b.base())?;
    Ok(node(base, Kind::Oplus(a.clone(), b.clone())))
}

/// `A ⊔ B`, the leaves of `T(A) ∪ T(B)`; the bases must coincide.
pub fn sqcup(a: &Front, b: &Front) -> Result<Front, FrontError> {
    if a.base() != b.base() {
        return Err(FrontError::BaseMismatch(format!("{} vs {}", a.base(), b.base())));
    }
    Ok(node(a.base().clone(), Kind::Sqcup(a.clone(), b.clone())))
}

/// `B ↾ X` for `X ⊆ base(B)`.
pub fn restrict(b: &Front, x: BaseStream) -> Result<Front, FrontError> {
    let probe = x.take_from(x.min(), 16).unwrap_or_default();
    if !b.base().contains_all(&probe).unwrap_or(false) {
        return Err(FrontError::BaseMismatch(format!("{x} is not inside {}", b.base())));
    }
    Ok(node(x, Kind::Restrict(b.clone())))
}

/// `B_s = {t : max s < min t, s⌢t ∈ B}` for `s ∈ T(B)`.
pub fn tail(b: &Front, s: &FiniteSet) -> Result<Front, FrontError> {
    if b.classify(s)? == Class::Large {
        return Err(FrontError::NotInTree(s.clone()));
    }
    let base = b.base().above(s.last().copied())?;
    Ok(node(base, Kind::Tail(b.clone(), s.clone())))
}

impl Front {
    /// Wraps an external implementation.
    pub fn custom(imp: Arc<dyn FrontImpl>) -> Front {
        node(imp.base().clone(), Kind::Custom(imp))
    }

    /// The base stream.
    pub fn base(&self) -> &BaseStream {
        &self.0.base
    }

    /// Provenance tag.
    pub fn provenance(&self) -> Provenance {
        match &self.0.kind {
            Kind::Degenerate => Provenance::Degenerate,
            Kind::Uniform(_) => Provenance::Uniform,
            Kind::Schreier => Provenance::Schreier,
            Kind::AlphaSize(..) => Provenance::AlphaSize,
            Kind::Oplus(..) => Provenance::Oplus,
            Kind::Sqcup(..) => Provenance::Sqcup,
            Kind::Restrict(_) => Provenance::Restrict,
            Kind::Tail(..) => Provenance::Tail,
            Kind::Custom(c) => c.provenance(),
        }
    }

    /// Front-expression style description.
    pub fn describe(&self) -> String {
        match &self.0.kind {
            Kind::Degenerate => "deg".into(),
            Kind::Uniform(n) => format!("unif:{n}"),
            Kind::Schreier => "schreier".into(),
            Kind::AlphaSize(a, _) => format!("size:{a}@{}", self.base().min()),
            Kind::Oplus(a, b) => format!("({} + {})", a.describe(), b.describe()),
            Kind::Sqcup(a, b) => format!("({} | {})", a.describe(), b.describe()),
            Kind::Restrict(b) => format!("restr({}; {})", b.describe(), self.base().min()),
            Kind::Tail(b, s) => {
                let elems: Vec<String> = s.iter().map(u64::to_string).collect();
                format!("tail({}; {})", b.describe(), elems.join(","))
            }
            Kind::Custom(c) => c.describe(),
        }
    }

    /// Classifies `t` as Small, Size or Large.
    pub fn classify(&self, t: &[u64]) -> Result<Class, FrontError> {
        if !self.base().contains_all(t)? {
            return Err(FrontError::NotInBase(FiniteSet::from_unsorted(t.to_vec())));
        }
        self.classify_in_base(t)
    }

    fn classify_in_base(&self, t: &[u64]) -> Result<Class, FrontError> {
        Ok(match &self.0.kind {
            Kind::Degenerate => {
                if t.is_empty() {
                    Class::Size
                } else {
                    Class::Large
                }
            }
            Kind::Uniform(n) => match (t.len() as u64).cmp(n) {
                Ordering::Less => Class::Small,
                Ordering::Equal => Class::Size,
                Ordering::Greater => Class::Large,
            },
            Kind::Schreier => match t.first() {
                None => Class::Small,
                Some(&t0) => match (t.len() as u64).cmp(&(t0.saturating_add(1))) {
                    Ordering::Less => Class::Small,
                    Ordering::Equal => Class::Size,
                    Ordering::Greater => Class::Large,
                },
            },
            Kind::AlphaSize(a, ctx) => classify_large(a, t, ctx).verdict,
            Kind::Oplus(a, b) => match b.classify(t)? {
                Class::Small => Class::Small,
                Class::Size => a.classify(&[])?,
                Class::Large => {
                    let p = b.size_prefix_len(t)?.expect("large sets have a size prefix");
                    a.classify(&t[p..])?
                }
            },
            Kind::Sqcup(a, b) => {
                let (x, y) = (a.classify(t)?, b.classify(t)?);
                if x == Class::Small || y == Class::Small {
                    Class::Small
                } else if x == Class::Size || y == Class::Size {
                    Class::Size
                } else {
                    Class::Large
                }
            }
            Kind::Restrict(b) => b.classify(t)?,
            Kind::Tail(b, s) => {
                let joined = s.concat(t).ok_or_else(|| FrontError::NotInBase(FiniteSet::from_unsorted(t.to_vec())))?;
                b.classify(&joined)?
            }
            Kind::Custom(c) => c.classify(t)?,
        })
    }

    /// Length of the Size prefix of `t`, if `t` is Size or Large.
    pub fn size_prefix_len(&self, t: &[u64]) -> Result<Option<usize>, FrontError> {
        match self.classify(t)? {
            Class::Small => Ok(None),
            Class::Size => Ok(Some(t.len())),
            Class::Large => {
                for i in 0..t.len() {
                    if self.classify(&t[..i])? == Class::Size {
                        return Ok(Some(i));
                    }
                }
                Err(FrontError::Precondition(format!("{} is Large without a Size prefix", self.describe())))
            }
        }
    }

    /// Whether `t ∈ T(B)`.
    pub fn in_tree(&self, t: &[u64]) -> Result<bool, FrontError> {
        Ok(self.classify(t)? != Class::Large)
    }

    /// `ht(B) = ht_B(⟨⟩)` when annotated.
    pub fn height(&self) -> Result<Option<Ordinal>, FrontError> {
        self.height_at(&[])
    }

    /// `ht(B)`, failing when the front has no annotation.
    pub fn height_required(&self) -> Result<Ordinal, FrontError> {
        self.height()?.ok_or_else(|| FrontError::NoHeight(self.describe()))
    }

    /// `ht_B(t)` for `t ∈ T(B)`, or `None` without annotation.
    pub fn height_at(&self, t: &[u64]) -> Result<Option<Ordinal>, FrontError> {
        let class = self.classify(t)?;
        if class == Class::Large {
            return Err(FrontError::NotInTree(FiniteSet::from_unsorted(t.to_vec())));
        }
        if class == Class::Size {
            return Ok(Some(Ordinal::zero()));
        }
        Ok(match &self.0.kind {
            Kind::Degenerate => Some(Ordinal::zero()),
            Kind::Uniform(n) => Some(Ordinal::nat(n - t.len() as u64)),
            Kind::Schreier => match t.first() {
                None => Some(Ordinal::omega()),
                Some(&t0) => Some(Ordinal::nat(t0 + 1 - t.len() as u64)),
            },
            Kind::AlphaSize(a, ctx) => Some(fs_path(a, t, ctx)),
            Kind::Oplus(a, b) => match b.classify(t)? {
                Class::Small => match (a.height()?, b.height_at(t)?) {
                    (Some(ha), Some(hb)) => Some(add(&ha, &hb)),
                    _ => None,
                },
                Class::Size => a.height()?,
                Class::Large => {
                    let p = b.size_prefix_len(t)?.expect("large sets have a size prefix");
                    a.height_at(&t[p..])?
                }
            },
            Kind::Sqcup(a, b) => {
                let ha = if a.in_tree(t)? { a.height_at(t)? } else { Some(Ordinal::zero()) };
                let hb = if b.in_tree(t)? { b.height_at(t)? } else { Some(Ordinal::zero()) };
                match (ha, hb) {
                    (Some(x), Some(y)) => Some(if compare(&x, &y) == Ordering::Less { y } else { x }),
                    _ => None,
                }
            }
            Kind::Restrict(b) => b.height_at(t)?,
            Kind::Tail(b, s) => {
                let joined = s.concat(t).ok_or_else(|| FrontError::NotInBase(FiniteSet::from_unsorted(t.to_vec())))?;
                b.height_at(&joined)?
            }
            Kind::Custom(c) => c.height_at(t)?,
        })
    }

    /// All Size sets built from `ground` (sorted), visiting at most `cap`
    /// tree nodes.
    pub fn size_sets_within(&self, ground: &[u64], cap: u64) -> Result<Vec<FiniteSet>, FrontError> {
        let mut out = Vec::new();
        let mut visited = 0u64;
        let mut stack: Vec<(Vec<u64>, usize)> = vec![(Vec::new(), 0)];
        if self.classify(&[])? == Class::Size {
            return Ok(vec![FiniteSet::empty()]);
        }
        while let Some((t, from)) = stack.pop() {
            for i in (from..ground.len()).rev() {
                visited += 1;
                if visited > cap {
                    return Err(FrontError::Budget(format!("size-set enumeration beyond {cap} nodes")));
                }
                let mut u = t.clone();
                u.push(ground[i]);
                match self.classify(&u)? {
                    Class::Size => out.push(FiniteSet::from_sorted(u)),
                    Class::Small => stack.push((u, i + 1)),
                    Class::Large => {}
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// The Size prefix reached by greedily extending `start` with the least
    /// base elements, if one exists within `max_len` elements.
    pub fn greedy_size_set(&self, start: &[u64], max_len: usize) -> Result<Option<FiniteSet>, FrontError> {
        let mut t = start.to_vec();
        loop {
            match self.classify(&t)? {
                Class::Size => return Ok(Some(FiniteSet::from_sorted(t))),
                Class::Large => return Ok(None),
                Class::Small => {}
            }
            if t.len() >= max_len {
                return Ok(None);
            }
            let next = self.base().next_at_least(t.last().map(|x| x + 1).unwrap_or(0))?;
            t.push(next);
        }
    }
}

/// `β^B_s[n] = ht_B(s⌢⟨m⟩)` with `m` the least base element
/// `≥ max(max s + 1, n)`; 0 when `s` is Size.
pub fn induced_fs(b: &Front, s: &[u64], n: u64) -> Result<Ordinal, FrontError> {
    match b.classify(s)? {
        Class::Large => return Err(FrontError::NotInTree(FiniteSet::from_unsorted(s.to_vec()))),
        Class::Size => return Ok(Ordinal::zero()),
        Class::Small => {}
    }
    let lo = s.last().map(|x| x + 1).unwrap_or(0).max(n);
    let m = b.base().next_at_least(lo)?;
    let mut child = s.to_vec();
    child.push(m);
    b.height_at(&child)?.ok_or_else(|| FrontError::NoHeight(b.describe()))
}

/// `x ∸ β₀`: removes a leading `β₀`, or 0 when `x < β₀`.
fn dot_minus(x: &Ordinal, b0: &Ordinal) -> Ordinal {
    if compare(x, b0) == Ordering::Less {
        Ordinal::zero()
    } else {
        left_sub(x, b0).expect("x ≥ β₀")
    }
}

fn split_height(b: &Front) -> Result<(Ordinal, Ordinal), FrontError> {
    let h = b.height_required()?;
    let (b0, last) = h.split_last().ok_or_else(|| FrontError::AlreadyAtomic(h.to_string()))?;
    if b0.is_zero() {
        return Err(FrontError::AlreadyAtomic(h.to_string()));
    }
    Ok((b0, Ordinal::from_head(last)))
}

struct LowerPart {
    b: Front,
    beta0: Ordinal,
}

impl FrontImpl for LowerPart {
    fn base(&self) -> &BaseStream {
        self.b.base()
    }

    fn classify(&self, t: &[u64]) -> Result<Class, FrontError> {
        if t.is_empty() {
            return Ok(Class::Small);
        }
        if !self.b.in_tree(t)? {
            return Ok(Class::Large);
        }
        let h = self.b.height_at(t)?.ok_or_else(|| FrontError::NoHeight(self.b.describe()))?;
        if compare(&h, &self.beta0) == Ordering::Greater {
            return Ok(Class::Small);
        }
        let hs = self.b.height_at(&t[..t.len() - 1])?.ok_or_else(|| FrontError::NoHeight(self.b.describe()))?;
        Ok(if compare(&hs, &self.beta0) == Ordering::Greater { Class::Size } else { Class::Large })
    }

    fn height_at(&self, t: &[u64]) -> Result<Option<Ordinal>, FrontError> {
        Ok(self.b.height_at(t)?.map(|h| dot_minus(&h, &self.beta0)))
    }

    fn describe(&self) -> String {
        format!("lower({})", self.b.describe())
    }

    fn provenance(&self) -> Provenance {
        Provenance::LowerPart
    }
}

struct UpperPart {
    b: Front,
    beta0: Ordinal,
}

impl UpperPart {
    /// Members `t` of the Lower Part with `max t < m`, found by DFS over the
    /// base below `m`.
    fn lower_members_below(&self, m: u64) -> Result<Vec<Vec<u64>>, FrontError> {
        let mut ground = Vec::new();
        let mut x = self.b.base().min();
        while x < m {
            let y = self.b.base().next_at_least(x)?;
            if y >= m {
                break;
            }
            ground.push(y);
            x = y + 1;
        }
        let mut out = Vec::new();
        let mut stack: Vec<(Vec<u64>, usize)> = vec![(Vec::new(), 0)];
        while let Some((t, from)) = stack.pop() {
            for (i, &y0) in ground.iter().enumerate().skip(from) {
                let mut u = t.clone();
                u.push(y0);
                if !self.b.in_tree(&u)? {
                    continue;
                }
                let h = self.b.height_at(&u)?.ok_or_else(|| FrontError::NoHeight(self.b.describe()))?;
                if compare(&h, &self.beta0) == Ordering::Greater {
                    stack.push((u, i + 1));
                } else {
                    out.push(u);
                }
            }
        }
        Ok(out)
    }
}

impl FrontImpl for UpperPart {
    fn base(&self) -> &BaseStream {
        self.b.base()
    }

    fn classify(&self, r: &[u64]) -> Result<Class, FrontError> {
        let Some(&m) = r.first() else {
            return Ok(Class::Small);
        };
        let mut in_some_tree = false;
        for t in self.lower_members_below(m)? {
            let mut tr = t;
            tr.extend_from_slice(r);
            match self.b.classify(&tr)? {
                Class::Small => return Ok(Class::Small),
                Class::Size => in_some_tree = true,
                Class::Large => {}
            }
        }
        if in_some_tree || r.len() == 1 {
            // A singleton outside every T(B_t) is an uncovered base point.
            return Ok(Class::Size);
        }
        Ok(Class::Large)
    }

    fn height_at(&self, r: &[u64]) -> Result<Option<Ordinal>, FrontError> {
        let Some(&m) = r.first() else {
            return Ok(Some(self.beta0.clone()));
        };
        let mut best: Option<Ordinal> = None;
        for t in self.lower_members_below(m)? {
            let mut tr = t;
            tr.extend_from_slice(r);
            if self.b.in_tree(&tr)? {
                let h = self.b.height_at(&tr)?.ok_or_else(|| FrontError::NoHeight(self.b.describe()))?;
                if best.as_ref().map(|b| compare(&h, b) == Ordering::Greater).unwrap_or(true) {
                    best = Some(h);
                }
            }
        }
        Ok(Some(best.unwrap_or_else(Ordinal::zero)))
    }

    fn describe(&self) -> String {
        format!("upper({})", self.b.describe())
    }

    fn provenance(&self) -> Provenance {
        Provenance::UpperPart
    }
}

/// Splits an annotated front of height `β₀ + ω^{β₁}` (with `β₀ ≠ 0`) into
/// its Upper Part (height `β₀`) and Lower Part (height `ω^{β₁}`), returned
/// as `(upper, lower)`.
pub fn lower_upper_parts(b: &Front) -> Result<(Front, Front), FrontError> {
    let (beta0, _) = split_height(b)?;
    let lower = Front::custom(Arc::new(LowerPart { b: b.clone(), beta0: beta0.clone() }));
    let upper = Front::custom(Arc::new(UpperPart { b: b.clone(), beta0 }));
    Ok((upper, lower))
}

/// A decomposition `B₀ ⊕ … ⊕ B_{n−1}` whose part heights are the Cantor
/// normal form terms of the composite height, leading term first.
#[derive(Debug, Clone)]
pub struct Decomposition {
    /// Parts in Cantor normal form order.
    pub parts: Vec<Front>,
}

impl Decomposition {
    /// `B₀ ⊕ (B₁ ⊕ (… ⊕ B_{n−1}))`; the last part is walked first.
    pub fn compose(&self) -> Result<Front, FrontError> {
        let mut it = self.parts.iter().rev();
        let mut acc = it.next().cloned().ok_or_else(|| FrontError::Precondition("empty decomposition".into()))?;
        for p in it {
            acc = oplus(p, &acc)?;
        }
        Ok(acc)
    }

    /// Heights of the parts.
    pub fn heights(&self) -> Result<Vec<Ordinal>, FrontError> {
        self.parts.iter().map(Front::height_required).collect()
    }
}

/// Iterates [`lower_upper_parts`] along the Cantor normal form of `ht(B)`.
pub fn sd_decompose(b: &Front) -> Result<Decomposition, FrontError> {
    let mut parts = Vec::new();
    let mut cur = b.clone();
    loop {
        match lower_upper_parts(&cur) {
            Ok((upper, lower)) => {
                parts.push(lower);
                cur = upper;
            }
            Err(FrontError::AlreadyAtomic(_)) => {
                parts.push(cur);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    parts.reverse();
    Ok(Decomposition { parts })
}

/// The front `{⟨0,k⟩ : k ≥ 1} ∪ {⟨n⟩ : n ≥ 1}` over `ℕ`, which is not
/// smooth.
pub fn make_non_smooth_example() -> Front {
    struct NonSmooth(BaseStream);
    impl FrontImpl for NonSmooth {
        fn base(&self) -> &BaseStream {
            &self.0
        }
        fn classify(&self, t: &[u64]) -> Result<Class, FrontError> {
            Ok(match t {
                [] | [0] => Class::Small,
                [_] | [0, _] => Class::Size,
                _ => Class::Large,
            })
        }
        fn describe(&self) -> String {
            "nonsmooth".into()
        }
    }
    Front::custom(Arc::new(NonSmooth(BaseStream::AllFrom(0))))
}

/// Parameters for [`smooth_check`].
#[derive(Debug, Clone, Copy)]
pub struct SmoothSampler {
    /// Seed for the random phase.
    pub seed: u64,
    /// Exhaustive phase: Size sets over the first `window` base elements.
    pub window: usize,
    /// Node cap for the exhaustive enumeration.
    pub enum_cap: u64,
    /// Random phase: base span from which random walks draw elements.
    pub span: u64,
    /// Random phase: walks give up after this many elements.
    pub max_len: usize,
}

impl Default for SmoothSampler {
    fn default() -> Self {
        SmoothSampler { seed: 0, window: 10, enum_cap: 200_000, span: 40, max_len: 64 }
    }
}

/// Outcome of [`smooth_check`].
#[derive(Debug, Clone, Default, Serialize)]
pub struct SmoothReport {
    /// Pairs of Size sets compared.
    pub pairs_checked: u64,
    /// Pairs of equal-length tree nodes compared under the height criterion.
    pub tree_pairs_checked: u64,
    /// Violating pairs `(s, t)` with `|s| < |t|` (or equal length and
    /// `ht(s) < ht(t)`) and no `i` with `s(i) < t(i)`; capped at 64.
    pub violations: Vec<(FiniteSet, FiniteSet)>,
    /// Total violations found.
    pub violation_count: u64,
}

fn dominated_somewhere(s: &[u64], t: &[u64]) -> bool {
    s.iter().zip(t).any(|(a, b)| a < b)
}

fn random_size_set(b: &Front, rng: &mut ChaCha8Rng, span: u64, max_len: usize) -> Result<Option<FiniteSet>, FrontError> {
    let lo = b.base().min();
    let mut t: Vec<u64> = Vec::new();
    for _ in 0..=max_len {
        match b.classify(&t)? {
            Class::Size => return Ok(Some(FiniteSet::from_sorted(t))),
            Class::Large => return Ok(None),
            Class::Small => {}
        }
        let from = t.last().map(|x| x + 1).unwrap_or(lo);
        let step = rng.gen_range(0..span.max(1));
        t.push(b.base().next_at_least(from + step / 4)?);
    }
    Ok(None)
}

/// Samples pairs of Size sets and equal-length tree nodes and reports
/// violations of smoothness.
pub fn smooth_check(b: &Front, sampler: SmoothSampler, trials: u64) -> Result<SmoothReport, FrontError> {
    let mut rep = SmoothReport::default();
    let record = |rep: &mut SmoothReport, s: &FiniteSet, t: &FiniteSet| {
        rep.violation_count += 1;
        if rep.violations.len() < 64 {
            rep.violations.push((s.clone(), t.clone()));
        }
    };
    let ground = b.base().take_from(b.base().min(), sampler.window)?;
    let sizes = b.size_sets_within(&ground, sampler.enum_cap)?;
    for s in &sizes {
        for t in &sizes {
            if s.len() < t.len() {
                rep.pairs_checked += 1;
                if !dominated_somewhere(s, t) {
                    record(&mut rep, s, t);
                }
            }
        }
    }
    if b.height()?.is_some() {
        let mut nodes: Vec<FiniteSet> = Vec::new();
        for s in &sizes {
            for k in 0..=s.len() {
                nodes.push(s.prefix(k));
            }
        }
        nodes.sort();
        nodes.dedup();
        let hs: Vec<Ordinal> = nodes.iter().map(|t| b.height_at(t).map(|h| h.unwrap_or_default())).collect::<Result<_, _>>()?;
        for (i, s) in nodes.iter().enumerate() {
            for (j, t) in nodes.iter().enumerate() {
                if s.len() == t.len() && compare(&hs[i], &hs[j]) == Ordering::Less {
                    rep.tree_pairs_checked += 1;
                    if !dominated_somewhere(s, t) {
                        record(&mut rep, s, t);
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
    for _ in 0..trials {
        let (Some(s), Some(t)) = (random_size_set(b, &mut rng, sampler.span, sampler.max_len)?, random_size_set(b, &mut rng, sampler.span, sampler.max_len)?) else {
            continue;
        };
        let (s, t) = if s.len() <= t.len() { (s, t) } else { (t, s) };
        if s.len() < t.len() {
            rep.pairs_checked += 1;
            if !dominated_somewhere(&s, &t) {
                record(&mut rep, &s, &t);
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::ord;

    fn all() -> BaseStream {
        BaseStream::AllFrom(0)
    }

    fn ctx() -> SeqCtx {
        SeqCtx::default()
    }

    #[test]
    fn basic_fronts() {
        let u2 = make_uniform(2, all());
        assert_eq!(u2.classify(&[3]).unwrap(), Class::Small);
        assert_eq!(u2.classify(&[3, 7]).unwrap(), Class::Size);
        assert_eq!(u2.classify(&[3, 7, 9]).unwrap(), Class::Large);
        let sch = make_schreier(all());
        assert_eq!(sch.classify(&[2, 5, 8]).unwrap(), Class::Size);
        let d = make_degenerate();
        assert_eq!(d.classify(&[]).unwrap(), Class::Size);
        assert_eq!(d.classify(&[4]).unwrap(), Class::Large);
        assert_eq!(sch.height().unwrap(), Some(ord("w")));
    }

    #[test]
    fn alpha_size() {
        let c = ctx();
        let bw = make_alpha_size(&ord("w"), BaseStream::AllFrom(2), &c).unwrap();
        assert_eq!(bw.classify(&[2, 5, 8]).unwrap(), Class::Size);
        let bw2 = make_alpha_size(&ord("w^(2)"), BaseStream::AllFrom(2), &c).unwrap();
        assert_eq!(bw2.height_at(&[3]).unwrap(), Some(ord("w*3")));
        let b0 = make_alpha_size(&ord("0"), BaseStream::AllFrom(2), &c).unwrap();
        assert_eq!(b0.classify(&[]).unwrap(), Class::Size);
        assert!(make_alpha_size(&ord("w"), all(), &c).is_err());
        assert!(matches!(bw.classify(&[1]), Err(FrontError::NotInBase(_))));
    }

    #[test]
    fn sums_and_unions() {
        let one = make_uniform(1, all());
        let u2 = make_uniform(2, all());
        let s = oplus(&one, &u2).unwrap();
        assert_eq!(s.height().unwrap(), Some(ord("3")));
        assert_eq!(s.classify(&[1, 2, 3]).unwrap(), Class::Size);
        let c = make_schreier(all());
        let dc = oplus(&make_degenerate(), &c).unwrap();
        for t in [&[2u64, 5, 8][..], &[1, 2], &[3, 4], &[]] {
            assert_eq!(dc.classify(t).unwrap(), c.classify(t).unwrap());
        }
        let u = sqcup(&one, &u2).unwrap();
        assert_eq!(u.classify(&[3, 7]).unwrap(), Class::Size);
        assert_eq!(u.classify(&[3]).unwrap(), Class::Small);
        assert_eq!(u.height().unwrap(), Some(ord("2")));
    }

    #[test]
    fn tails_and_restrictions() {
        let c = ctx();
        let bw = make_alpha_size(&ord("w"), BaseStream::AllFrom(2), &c).unwrap();
        let t = tail(&bw, &FiniteSet::new(vec![3]).unwrap()).unwrap();
        assert_eq!(t.classify(&[5, 6, 7]).unwrap(), Class::Size);
        let r = restrict(&make_schreier(all()), BaseStream::AllFrom(10)).unwrap();
        let ten: Vec<u64> = (10..20).collect();
        assert_eq!(r.classify(&ten).unwrap(), Class::Small);
        let eleven: Vec<u64> = (10..21).collect();
        assert_eq!(r.classify(&eleven).unwrap(), Class::Size);
        let u2 = make_uniform(2, all());
        let dt = tail(&u2, &FiniteSet::new(vec![1, 4]).unwrap()).unwrap();
        assert_eq!(dt.classify(&[]).unwrap(), Class::Size);
        assert_eq!(dt.classify(&[9]).unwrap(), Class::Large);
        assert!(tail(&u2, &FiniteSet::new(vec![1, 4, 5]).unwrap()).is_err());
    }

    #[test]
    fn lower_and_upper_parts() {
        let c = ctx();
        // ht = ω + 1 on ℕ: lower part is the singleton barrier.
        let b = oplus(&make_schreier(all()), &make_uniform(1, all())).unwrap();
        assert_eq!(b.height().unwrap(), Some(ord("w+1")));
        let (upper, lower) = lower_upper_parts(&b).unwrap();
        assert_eq!(lower.height().unwrap(), Some(ord("1")));
        assert_eq!(upper.height().unwrap(), Some(ord("w")));
        for n in 0..6 {
            assert_eq!(lower.classify(&[n]).unwrap(), Class::Size);
        }
        let composite = oplus(&upper, &lower).unwrap();
        let ground: Vec<u64> = (0..9).collect();
        for s in composite.size_sets_within(&ground, 100_000).unwrap() {
            assert!(b.classify(&s).unwrap() != Class::Small, "{s} extends no member");
        }
        let atomic = make_alpha_size(&ord("w^(2)"), BaseStream::AllFrom(2), &c).unwrap();
        assert!(matches!(lower_upper_parts(&atomic), Err(FrontError::AlreadyAtomic(_))));
    }

    #[test]
    fn decompositions() {
        let c = ctx();
        let b = make_alpha_size(&ord("w^(2)+w"), BaseStream::AllFrom(2), &c).unwrap();
        let d = sd_decompose(&b).unwrap();
        assert_eq!(d.heights().unwrap(), vec![ord("w^(2)"), ord("w")]);
        let u2 = sd_decompose(&make_uniform(2, all())).unwrap();
        assert_eq!(u2.heights().unwrap(), vec![ord("1"), ord("1")]);
        let single = sd_decompose(&make_schreier(all())).unwrap();
        assert_eq!(single.parts.len(), 1);
    }

    #[test]
    fn induced_sequences() {
        let c = ctx();
        let b = make_alpha_size(&ord("w^(2)"), BaseStream::AllFrom(2), &c).unwrap();
        assert_eq!(induced_fs(&b, &[], 5).unwrap(), ord("w*5"));
        assert_eq!(induced_fs(&b, &[], 0).unwrap(), ord("w*2"));
    }

    #[test]
    fn smoothness() {
        let c = ctx();
        let bw = make_alpha_size(&ord("w"), BaseStream::AllFrom(2), &c).unwrap();
        let rep = smooth_check(&bw, SmoothSampler::default(), 2000).unwrap();
        assert_eq!(rep.violation_count, 0);
        let rep = smooth_check(&make_uniform(3, all()), SmoothSampler::default(), 500).unwrap();
        assert_eq!(rep.violation_count, 0);
        let ns = make_non_smooth_example();
        let rep = smooth_check(&ns, SmoothSampler { window: 4, ..Default::default() }, 0).unwrap();
        let want = (FiniteSet::new(vec![1]).unwrap(), FiniteSet::new(vec![0, 2]).unwrap());
        assert!(rep.violations.contains(&want));
    }
}
