//! Ramsey-closure fronts, prehomogeneous extraction, homogeneous extraction
//! from prehomogeneous sets, and the upper-bound evaluators.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::finite_set::FiniteSet;
use crate::front::{make_uniform, oplus, BaseStream, Class, Front, FrontError, FrontImpl, Provenance};
use crate::ordinal::{nat_prod_fin, philog_apply, times_omega, Ordinal};
use crate::pigeon::{arrow_check, homogeneous_color, pigeon_front, ArrowVerdict, Coloring};

/// Failures of the upper-bound pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UpperError {
    /// A front operation failed.
    #[error(transparent)]
    Front(#[from] FrontError),
    /// The ground set admits no prehomogeneous set of the requested shape
    /// for this coloring.
    #[error("no prehomogeneous set found: {0}")]
    Contract(String),
    /// A produced set failed its exhaustive re-verification.
    #[error("verification failed: {0}")]
    Verification(String),
    /// The coloring does not cover a set the pipeline needs.
    #[error("coloring has no entry for {0}")]
    Uncolored(FiniteSet),
    /// The search budget ran out.
    #[error("budget exhausted after {0} nodes")]
    Budget(u64),
}

struct Closure {
    a: Vec<Front>,
    c: Front,
    base: BaseStream,
    budget: u64,
    memo: Mutex<HashMap<Vec<u64>, bool>>,
}

impl Closure {
    fn holds(&self, t: &[u64]) -> Result<bool, FrontError> {
        if let Some(&h) = self.memo.lock().expect("closure memo").get(t) {
            return Ok(h);
        }
        let h = arrow_check(t, &self.a, &self.c, self.budget)?.verdict == ArrowVerdict::Holds;
        self.memo.lock().expect("closure memo").insert(t.to_vec(), h);
        Ok(h)
    }
}

impl FrontImpl for Closure {
    fn base(&self) -> &BaseStream {
        &self.base
    }

    fn classify(&self, t: &[u64]) -> Result<Class, FrontError> {
        for i in 0..=t.len() {
            if self.holds(&t[..i])? {
                return Ok(if i == t.len() { Class::Size } else { Class::Large });
            }
        }
        Ok(Class::Small)
    }

    fn describe(&self) -> String {
        let parts: Vec<String> = self.a.iter().map(Front::describe).collect();
        format!("closure({}; {})", parts.join(", "), self.c.describe())
    }

    fn provenance(&self) -> Provenance {
        Provenance::Closure
    }
}

/// The front whose Size sets are the minimal `t` with `t → (A)^C_k`: every
/// `k`-coloring of `[t]^C` has a homogeneous `(C⊕A_i)`-size subset of color
/// `i`. A single front in `a` is used for every color. Classifications that
/// exceed `budget` surface as [`FrontError::Budget`].
pub fn ramsey_closure(a: &[Front], c: &Front, k: usize, budget: u64) -> Result<Front, FrontError> {
    let a: Vec<Front> = match a.len() {
        1 => vec![a[0].clone(); k],
        n if n == k && k > 0 => a.to_vec(),
        n => return Err(FrontError::Precondition(format!("{n} fronts given for {k} colors"))),
    };
    let mut base = c.base().clone();
    for f in &a {
        base = base.intersect(f.base())?;
    }
    Ok(Front::custom(Arc::new(Closure { a, c: c.clone(), base, budget, memo: Mutex::new(HashMap::new()) })))
}

/// The three fronts a prehomogeneity question is phrased in.
#[derive(Clone)]
pub struct PrehomShape {
    /// `𝟙⊕C⊕D`: the colored sets.
    pub colored: Front,
    /// `𝟙⊕D`: the prefixes colors may depend on.
    pub prefix: Front,
    /// `𝟙⊕C⊕A`: the shape of the extracted set.
    pub target: Front,
}

impl PrehomShape {
    /// Builds the shape from `A`, `C` and `D`.
    pub fn new(a: &Front, c: &Front, d: &Front) -> Result<Self, FrontError> {
        let one = make_uniform(1, c.base().clone());
        let one_c = oplus(&one, c)?;
        Ok(PrehomShape { colored: oplus(&one_c, d)?, prefix: oplus(&one, d)?, target: oplus(&one_c, a)? })
    }
}

/// One stage of the extraction: the chosen point `f_n` and the pool `F_n`
/// left after restricting to one function-table class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    /// `f_n`.
    pub f: u64,
    /// New `(𝟙⊕D)`-size prefixes ending at `f_n`.
    pub prefixes: usize,
    /// Number of distinct function-table codes among pool points.
    pub codes: usize,
    /// `F_n`.
    pub pool: FiniteSet,
}

/// Result of [`prehomog_extract`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrehomReport {
    /// The extracted `(𝟙⊕C⊕A)`-size set.
    pub t: FiniteSet,
    /// The stage trace along the successful branch.
    pub stages: Vec<Stage>,
    /// The verified map from `(𝟙⊕D)`-size prefix to color.
    pub dependence: Vec<(FiniteSet, usize)>,
    /// Search nodes visited.
    pub nodes: u64,
}

struct Extract<'a> {
    coloring: &'a Coloring,
    shape: &'a PrehomShape,
    budget: u64,
    nodes: u64,
}

/// Sets `r ⊆ pool` with `q⌢r` a Size set of `colored`.
fn completions(colored: &Front, q: &[u64], pool: &[u64]) -> Result<Vec<Vec<u64>>, FrontError> {
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<u64>, usize)> = vec![(Vec::new(), 0)];
    while let Some((r, from)) = stack.pop() {
        for (i, &p) in pool.iter().enumerate().skip(from) {
            let mut w = q.to_vec();
            w.extend_from_slice(&r);
            w.push(p);
            match colored.classify(&w)? {
                Class::Size => {
                    let mut r2 = r.clone();
                    r2.push(p);
                    out.push(r2);
                }
                Class::Small => {
                    let mut r2 = r.clone();
                    r2.push(p);
                    stack.push((r2, i + 1));
                }
                Class::Large => {}
            }
        }
    }
    Ok(out)
}

impl Extract<'_> {
    fn color(&self, q: &[u64], r: &[u64]) -> Result<usize, UpperError> {
        let mut w = q.to_vec();
        w.extend_from_slice(r);
        self.coloring.get(&w).ok_or_else(|| UpperError::Uncolored(FiniteSet::from_sorted(w)))
    }

    /// Candidate pools `F_n ⊆ pool` on which every new prefix has a
    /// constant color, largest first.
    fn classes(&self, u: &[u64], pool: &[u64]) -> Result<(usize, usize, Vec<Vec<u64>>), UpperError> {
        let f = *u.last().expect("stage point");
        let prefixes: Vec<Vec<u64>> = self
            .shape
            .prefix
            .size_sets_within(u, 1 << 20)?
            .into_iter()
            .filter(|q| q.as_slice().last() == Some(&f))
            .map(|q| q.as_slice().to_vec())
            .collect();
        let mut table: Vec<Vec<(Vec<u64>, usize)>> = Vec::with_capacity(prefixes.len());
        let mut singletons = true;
        for q in &prefixes {
            let mut row = Vec::new();
            for r in completions(&self.shape.colored, q, pool)? {
                singletons &= r.len() == 1;
                let c = self.color(q, &r)?;
                row.push((r, c));
            }
            table.push(row);
        }
        let mut out: Vec<Vec<u64>> = if singletons {
            // Function-table codes: one color (or none) per new prefix.
            let mut by_code: BTreeMap<Vec<Option<usize>>, Vec<u64>> = BTreeMap::new();
            for &x in pool {
                let code = table
                    .iter()
                    .map(|row| row.iter().find(|(r, _)| r[0] == x).map(|(_, c)| *c))
                    .collect();
                by_code.entry(code).or_default().push(x);
            }
            by_code.into_values().collect()
        } else {
            maximal_consistent(pool, &table)
        };
        let codes = out.len();
        out.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        Ok((prefixes.len(), codes, out))
    }

    fn dfs(&mut self, u: &mut Vec<u64>, pool: &[u64], stages: &mut Vec<Stage>) -> Result<bool, UpperError> {
        match self.shape.target.classify(u)? {
            Class::Size => return Ok(true),
            Class::Large => return Ok(false),
            Class::Small => {}
        }
        for (i, &f) in pool.iter().enumerate() {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(UpperError::Budget(self.nodes));
            }
            u.push(f);
            let rest = &pool[i + 1..];
            let (prefixes, codes, classes) = self.classes(u, rest)?;
            let classes = if classes.is_empty() { vec![Vec::new()] } else { classes };
            for class in classes {
                stages.push(Stage { f, prefixes, codes, pool: FiniteSet::from_sorted(class.clone()) });
                if self.dfs(u, &class, stages)? {
                    return Ok(true);
                }
                stages.pop();
            }
            u.pop();
        }
        Ok(false)
    }
}

/// Maximal subsets of `pool` on which each row of `table` (completions of
/// one prefix with their colors) is constant; at most 64 of them.
fn maximal_consistent(pool: &[u64], table: &[Vec<(Vec<u64>, usize)>]) -> Vec<Vec<u64>> {
    fn consistent(y: &[u64], table: &[Vec<(Vec<u64>, usize)>]) -> bool {
        table.iter().all(|row| {
            let mut seen = None;
            row.iter().filter(|(r, _)| r.iter().all(|x| y.binary_search(x).is_ok())).all(|(_, c)| {
                let ok = seen.is_none_or(|s| s == *c);
                seen = Some(*c);
                ok
            })
        })
    }
    let mut found: Vec<Vec<u64>> = Vec::new();
    let mut stack: Vec<(Vec<u64>, usize)> = vec![(Vec::new(), 0)];
    while let Some((y, i)) = stack.pop() {
        if found.len() >= 64 {
            break;
        }
        if i == pool.len() {
            let maximal = pool.iter().all(|x| {
                y.contains(x) || {
                    let mut z = y.clone();
                    z.push(*x);
                    z.sort_unstable();
                    !consistent(&z, table)
                }
            });
            if maximal && !found.contains(&y) {
                found.push(y);
            }
            continue;
        }
        stack.push((y.clone(), i + 1));
        let mut z = y;
        z.push(pool[i]);
        if consistent(&z, table) {
            stack.push((z, i + 1));
        }
    }
    found
}

/// Checks that on `t` the color of every `(𝟙⊕C⊕D)`-size set depends only on
/// its `(𝟙⊕D)`-size prefix; returns the dependence map.
pub fn verify_prehomogeneous(
    t: &[u64],
    coloring: &Coloring,
    shape: &PrehomShape,
) -> Result<Vec<(FiniteSet, usize)>, UpperError> {
    let mut map: BTreeMap<FiniteSet, usize> = BTreeMap::new();
    for w in shape.colored.size_sets_within(t, 1 << 22)? {
        let p = shape
            .prefix
            .size_prefix_len(w.as_slice())?
            .ok_or_else(|| UpperError::Verification(format!("{w} has no prefix of the required shape")))?;
        let c = coloring.get(w.as_slice()).ok_or_else(|| UpperError::Uncolored(w.clone()))?;
        let q = w.prefix(p);
        if let Some(&old) = map.get(&q) {
            if old != c {
                return Err(UpperError::Verification(format!("sets extending {q} get colors {old} and {c}")));
            }
        }
        map.insert(q, c);
    }
    Ok(map.into_iter().collect())
}

/// Searches `s` for a `(𝟙⊕C⊕A)`-size set that is `(𝟙⊕D)`-prehomogeneous for
/// `coloring` of `[s]^{𝟙⊕C⊕D}`, following the stage recursion with
/// backtracking over the choice of `f_n` and of the code class `F_n`.
pub fn prehomog_extract(
    s: &[u64],
    coloring: &Coloring,
    a: &Front,
    c: &Front,
    d: &Front,
    budget: u64,
) -> Result<PrehomReport, UpperError> {
    let shape = PrehomShape::new(a, c, d)?;
    let mut ex = Extract { coloring, shape: &shape, budget, nodes: 0 };
    let mut u = Vec::new();
    let mut stages = Vec::new();
    if !ex.dfs(&mut u, s, &mut stages)? {
        return Err(UpperError::Contract(format!(
            "no (1+C+A)-size prehomogeneous subset of {} after {} nodes",
            FiniteSet::from_sorted(s.to_vec()),
            ex.nodes
        )));
    }
    let dependence = verify_prehomogeneous(&u, coloring, &shape)?;
    Ok(PrehomReport { t: FiniteSet::from_sorted(u), stages, dependence, nodes: ex.nodes })
}

/// Result of [`homog_from_prehomog`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomogReport {
    /// The homogeneous set `u⌢t₁`.
    pub set: FiniteSet,
    /// Its color.
    pub color: usize,
    /// `t₀`, the `(𝟙⊕B(A))`-size part.
    pub t0: FiniteSet,
    /// `t₁`, the rest.
    pub t1: FiniteSet,
    /// The induced point coloring `c̄` on `t₀`.
    pub point_colors: Vec<(u64, usize)>,
}

/// From a `𝟙`-prehomogeneous `(𝟙⊕C′⊕B(A))`-size set, with `B(A)` the
/// pigeonhole front for `k` copies of `A`, builds a homogeneous set for a
/// coloring of `[·]^{𝟙⊕C′}` and verifies it exhaustively.
pub fn homog_from_prehomog(
    t: &[u64],
    coloring: &Coloring,
    c_prime: &Front,
    a: &Front,
    k: usize,
) -> Result<HomogReport, UpperError> {
    let pa = pigeon_front(&vec![a.clone(); k])?;
    let p = pa
        .size_prefix_len(t)?
        .ok_or_else(|| UpperError::Verification("t has no B(A)-size prefix".into()))?;
    if p >= t.len() {
        return Err(UpperError::Verification("t ends inside its B(A)-size prefix".into()));
    }
    let (t0, t1) = (&t[..=p], &t[p + 1..]);
    let one = make_uniform(1, c_prime.base().clone());
    let one_c = oplus(&one, c_prime)?;
    let mut point_colors = Vec::with_capacity(t0.len());
    for &n in t0 {
        let above: Vec<u64> = t.iter().copied().filter(|&x| x > n).collect();
        let r = completions(&one_c, &[n], &above)?
            .into_iter()
            .next()
            .ok_or_else(|| UpperError::Verification(format!("no (1+C')-size set starts at {n}")))?;
        let mut w = vec![n];
        w.extend(r);
        let col = coloring.get(&w).ok_or_else(|| UpperError::Uncolored(FiniteSet::from_sorted(w)))?;
        point_colors.push((n, col));
    }
    let one_a = oplus(&one, a)?;
    let color_of = |x: u64| point_colors.iter().find(|(n, _)| *n == x).map(|(_, c)| *c);
    let u = one_a
        .size_sets_within(t0, 1 << 22)?
        .into_iter()
        .find(|u| {
            let first = color_of(u.as_slice()[0]);
            u.as_slice().iter().all(|&x| color_of(x) == first)
        })
        .ok_or_else(|| UpperError::Verification("no (1+A)-size set is homogeneous for the point coloring".into()))?;
    let mut set = u.as_slice().to_vec();
    set.extend_from_slice(t1);
    let color = homogeneous_color(coloring, &set, &one_c)?
        .ok_or_else(|| UpperError::Verification(format!("{} is not homogeneous", FiniteSet::from_sorted(set.clone()))))?;
    Ok(HomogReport {
        set: FiniteSet::from_sorted(set),
        color,
        t0: FiniteSet::from_sorted(t0.to_vec()),
        t1: FiniteSet::from_sorted(t1.to_vec()),
        point_colors,
    })
}

/// `φ_{log γ}(α ⨰ k)`.
pub fn ram_upper(alpha: &Ordinal, gamma: &Ordinal, k: u64) -> Ordinal {
    philog_apply(gamma, &nat_prod_fin(alpha, k))
}

/// `φ_{log γ}(α · ω)`.
pub fn ram_limit(alpha: &Ordinal, gamma: &Ordinal) -> Ordinal {
    philog_apply(gamma, &times_omega(alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::front::make_degenerate;
    use crate::ordinal::compare;
    use crate::parse::ord;

    fn u(n: u64) -> Front {
        make_uniform(n, BaseStream::AllFrom(0))
    }

    fn pair_coloring(s: &[u64], bits: u64) -> Coloring {
        let mut pairs = Vec::new();
        let mut i = 0;
        for (x, &a) in s.iter().enumerate() {
            for &b in &s[x + 1..] {
                pairs.push((FiniteSet::from_sorted(vec![a, b]), (bits >> i & 1) as usize));
                i += 1;
            }
        }
        Coloring::new(2, pairs)
    }

    #[test]
    fn closure_examples() {
        let f = ramsey_closure(&[u(1)], &u(1), 2, 1 << 20).unwrap();
        assert_eq!(f.classify(&[1, 2]).unwrap(), Class::Small);
        assert_eq!(f.classify(&[1, 2, 3]).unwrap(), Class::Size);
        assert_eq!(f.classify(&[1, 2, 3, 4]).unwrap(), Class::Large);
        let deg = ramsey_closure(&[make_degenerate()], &u(2), 2, 1 << 20).unwrap();
        assert_eq!(deg.classify(&[4, 9]).unwrap(), Class::Size);
        let cdeg = ramsey_closure(&[u(3)], &make_degenerate(), 2, 1 << 20).unwrap();
        assert_eq!(cdeg.classify(&[1, 2, 3]).unwrap(), Class::Size);
        let tri = ramsey_closure(&[u(1)], &u(2), 2, 1 << 22).unwrap();
        assert_eq!(tri.classify(&[0, 1, 2, 3, 4, 5]).unwrap(), Class::Size);
        assert_eq!(tri.describe(), "closure(unif:1, unif:1; unif:2)");
        assert!(ramsey_closure(&[u(1), u(1)], &u(1), 3, 10).is_err());
    }

    #[test]
    fn pair_prehomogeneity() {
        let s: Vec<u64> = (0..6).collect();
        let deg = make_degenerate();
        for bits in [0u64, 0b101_0110_0111_0001, 0x7fff] {
            let col = pair_coloring(&s, bits);
            let r = prehomog_extract(&s, &col, &u(1), &u(1), &deg, 1 << 20).unwrap();
            assert_eq!(r.t.len(), 3);
            let t = r.t.as_slice();
            assert_eq!(col.get(&[t[0], t[1]]), col.get(&[t[0], t[2]]));
        }
        let constant = pair_coloring(&s, 0);
        let r = prehomog_extract(&s, &constant, &u(1), &u(1), &deg, 1 << 20).unwrap();
        assert_eq!(r.t.as_slice(), &[0, 1, 2]);
        assert!(r.dependence.iter().all(|(_, c)| *c == 0));
    }

    #[test]
    fn pipeline_on_eight_points() {
        let s: Vec<u64> = (0..8).collect();
        let deg = make_degenerate();
        let pa = pigeon_front(&[u(1), u(1)]).unwrap();
        for bits in [0u64, 0x00f0_f0f0, 0x0555_5555, 0xabc_def1] {
            let col = pair_coloring(&s, bits);
            let r = prehomog_extract(&s, &col, &pa, &u(1), &deg, 1 << 20).unwrap();
            assert_eq!(r.t.len(), 4);
            let h = homog_from_prehomog(r.t.as_slice(), &col, &u(1), &u(1), 2).unwrap();
            assert_eq!(h.set.len(), 3);
        }
    }

    #[test]
    fn bounds() {
        assert_eq!(ram_limit(&ord("w^(2)"), &ord("1")), ord("w^(w^(3))"));
        assert_eq!(ram_limit(&ord("w"), &ord("w")), ord("phi(1,w^(2))"));
        assert_eq!(ram_upper(&ord("w+1"), &ord("0"), 3), ord("w*3+3"));
        let (a, g) = (ord("w^(2)+w"), ord("w"));
        assert!(compare(&ram_upper(&a, &g, 2), &ram_upper(&a, &g, 3)).is_lt());
        assert!(compare(&ram_upper(&a, &g, 3), &ram_limit(&a, &g)).is_lt());
    }
}
