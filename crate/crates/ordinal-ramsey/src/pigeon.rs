//! Bad colorings, the pigeonhole front `B(A₀,…,A_{k−1})`, brute-force arrow
//! checks and the pigeonhole Ramsey ordinals.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::finite_set::FiniteSet;
use crate::front::{make_uniform, oplus, BaseStream, Class, Front, FrontError, FrontImpl, Provenance};
use crate::ordinal::{compare, nat_sum, Ordinal};

/// One entry of a coloring table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorEntry {
    /// The colored set.
    pub set: FiniteSet,
    /// Its color.
    pub color: usize,
}

/// A `k`-coloring of finitely many sets, stored sorted by set.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Coloring {
    /// Number of colors.
    pub k: usize,
    /// The table, sorted by set.
    pub entries: Vec<ColorEntry>,
}

impl Coloring {
    /// Builds a coloring from `(set, color)` pairs.
    pub fn new(k: usize, pairs: impl IntoIterator<Item = (FiniteSet, usize)>) -> Self {
        let mut entries: Vec<ColorEntry> = pairs.into_iter().map(|(set, color)| ColorEntry { set, color }).collect();
        entries.sort_by(|a, b| a.set.cmp(&b.set));
        entries.dedup_by(|a, b| a.set == b.set);
        Coloring { k, entries }
    }

    /// The color of `set`, if tabulated.
    pub fn get(&self, set: &[u64]) -> Option<usize> {
        self.entries.binary_search_by(|e| e.set.as_slice().cmp(set)).ok().map(|i| self.entries[i].color)
    }

    /// Whether every color is below `k`.
    pub fn colors_in_range(&self) -> bool {
        self.entries.iter().all(|e| e.color < self.k)
    }
}

/// The single color shared by all `C`-size subsets of `u`, or `None` when
/// `u` is not homogeneous, has no `C`-size subsets, or meets an untabulated
/// set.
pub fn homogeneous_color(coloring: &Coloring, u: &[u64], c: &Front) -> Result<Option<usize>, FrontError> {
    let subsets = c.size_sets_within(u, 1 << 22)?;
    let mut color = None;
    for v in subsets {
        let Some(x) = coloring.get(&v) else { return Ok(None) };
        match color {
            None => color = Some(x),
            Some(y) if y != x => return Ok(None),
            _ => {}
        }
    }
    Ok(color)
}

/// Searches `ground` for a Size set of `f`.
pub fn find_size_subset(ground: &[u64], f: &Front) -> Result<Option<FiniteSet>, FrontError> {
    if f.classify(&[])? == Class::Size {
        return Ok(Some(FiniteSet::empty()));
    }
    let mut stack: Vec<(Vec<u64>, usize)> = vec![(Vec::new(), 0)];
    while let Some((t, from)) = stack.pop() {
        for i in (from..ground.len()).rev() {
            let mut u = t.clone();
            u.push(ground[i]);
            match f.classify(&u)? {
                Class::Size => return Ok(Some(FiniteSet::from_sorted(u))),
                Class::Small => stack.push((u, i + 1)),
                Class::Large => {}
            }
        }
    }
    Ok(None)
}

fn all_equal(a: &[Front]) -> bool {
    a.windows(2).all(|w| w[0].describe() == w[1].describe())
}

/// Shared state for bad-coloring searches over a fixed list of fronts.
struct BadSearch {
    targets: Vec<Front>,
    symmetric: bool,
    free_memo: HashMap<(usize, Vec<u64>), bool>,
}

impl BadSearch {
    fn new(a: &[Front]) -> Result<Self, FrontError> {
        let targets = a
            .iter()
            .map(|ai| oplus(&make_uniform(1, ai.base().clone()), ai))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(BadSearch { targets, symmetric: all_equal(a), free_memo: HashMap::new() })
    }

    /// Whether `class` has no `(𝟙⊕A_i)`-size subset.
    fn class_free(&mut self, i: usize, class: &[u64]) -> Result<bool, FrontError> {
        if let Some(&v) = self.free_memo.get(&(i, class.to_vec())) {
            return Ok(v);
        }
        let v = find_size_subset(class, &self.targets[i])?.is_none();
        self.free_memo.insert((i, class.to_vec()), v);
        Ok(v)
    }

    fn search(&mut self, s: &[u64]) -> Result<Option<Vec<usize>>, FrontError> {
        let k = self.targets.len();
        if k == 0 {
            return Ok(if s.is_empty() { Some(Vec::new()) } else { None });
        }
        let mut colors: Vec<usize> = Vec::with_capacity(s.len());
        let mut classes: Vec<Vec<u64>> = vec![Vec::new(); k];
        self.dfs(s, &mut colors, &mut classes)
    }

    fn dfs(&mut self, s: &[u64], colors: &mut Vec<usize>, classes: &mut [Vec<u64>]) -> Result<Option<Vec<usize>>, FrontError> {
        let p = colors.len();
        if p == s.len() {
            return Ok(Some(colors.clone()));
        }
        let k = classes.len();
        let limit = if self.symmetric { colors.iter().max().map(|m| m + 2).unwrap_or(1).min(k) } else { k };
        for i in 0..limit {
            classes[i].push(s[p]);
            if self.class_free(i, &classes[i].clone())? {
                colors.push(i);
                if let Some(w) = self.dfs(s, colors, classes)? {
                    return Ok(Some(w));
                }
                colors.pop();
            }
            classes[i].pop();
        }
        Ok(None)
    }
}

/// A `k`-coloring of the points of `s` (with `k = A.len()`) having no
/// homogeneous `(𝟙⊕A_i)`-size subset of color `i`, if one exists.
pub fn has_bad_coloring(s: &[u64], a: &[Front]) -> Result<Option<Vec<usize>>, FrontError> {
    for ai in a {
        if !ai.base().contains_all(s)? {
            return Err(FrontError::NotInBase(FiniteSet::from_unsorted(s.to_vec())));
        }
    }
    BadSearch::new(a)?.search(s)
}

/// Re-verifies a point coloring as bad by a direct subset search.
pub fn verify_bad_coloring(s: &[u64], colors: &[usize], a: &[Front]) -> Result<bool, FrontError> {
    if colors.len() != s.len() || colors.iter().any(|&c| c >= a.len()) {
        return Ok(false);
    }
    for (i, ai) in a.iter().enumerate() {
        let class: Vec<u64> = s.iter().zip(colors).filter(|(_, &c)| c == i).map(|(&x, _)| x).collect();
        let target = oplus(&make_uniform(1, ai.base().clone()), ai)?;
        if find_size_subset(&class, &target)?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

struct Pigeon {
    a: Vec<Front>,
    base: BaseStream,
    probes: usize,
    bad_memo: Mutex<HashMap<Vec<u64>, bool>>,
}

impl Pigeon {
    fn bad(&self, t: &[u64]) -> Result<bool, FrontError> {
        if let Some(&v) = self.bad_memo.lock().expect("memo lock").get(t) {
            return Ok(v);
        }
        let v = has_bad_coloring(t, &self.a)?.is_some();
        self.bad_memo.lock().expect("memo lock").insert(t.to_vec(), v);
        Ok(v)
    }

    /// `max` over colorings with every class in `T(A_j)` of the natural sum
    /// of `ht_{A_j}(class_j)`.
    fn annotated_height(&self, t: &[u64]) -> Result<Option<Ordinal>, FrontError> {
        let k = self.a.len();
        let mut best: Option<Ordinal> = None;
        let mut classes: Vec<Vec<u64>> = vec![Vec::new(); k];
        fn rec(
            me: &Pigeon,
            t: &[u64],
            p: usize,
            classes: &mut [Vec<u64>],
            best: &mut Option<Ordinal>,
        ) -> Result<bool, FrontError> {
            if p == t.len() {
                let mut sum = Ordinal::zero();
                for (j, cls) in classes.iter().enumerate() {
                    match me.a[j].height_at(cls)? {
                        Some(h) => sum = nat_sum(&sum, &h),
                        None => return Ok(false),
                    }
                }
                if best.as_ref().map(|b| compare(&sum, b).is_gt()).unwrap_or(true) {
                    *best = Some(sum);
                }
                return Ok(true);
            }
            for j in 0..classes.len() {
                classes[j].push(t[p]);
                if me.a[j].in_tree(&classes[j])? && !rec(me, t, p + 1, classes, best)? {
                    return Ok(false);
                }
                classes[j].pop();
            }
            Ok(true)
        }
        if k == 0 || !rec(self, t, 0, &mut classes, &mut best)? {
            return Ok(None);
        }
        Ok(best)
    }
}

impl FrontImpl for Pigeon {
    fn base(&self) -> &BaseStream {
        &self.base
    }

    fn classify(&self, t: &[u64]) -> Result<Class, FrontError> {
        if !self.bad(t)? {
            return Ok(Class::Large);
        }
        let mut from = t.last().map(|x| x + 1).unwrap_or(self.base.min());
        for _ in 0..self.probes {
            let n = self.base.next_at_least(from)?;
            let mut ext = t.to_vec();
            ext.push(n);
            if self.bad(&ext)? {
                return Ok(Class::Small);
            }
            from = n + 1;
        }
        Ok(Class::Size)
    }

    fn height_at(&self, t: &[u64]) -> Result<Option<Ordinal>, FrontError> {
        self.annotated_height(t)
    }

    fn describe(&self) -> String {
        let parts: Vec<String> = self.a.iter().map(Front::describe).collect();
        format!("pigeon({})", parts.join(", "))
    }

    fn provenance(&self) -> Provenance {
        Provenance::Pigeon
    }
}

/// `B(A₀,…,A_{k−1})`: the leaves of the tree of sets with a bad coloring.
/// Size detection probes the least admissible extension point.
pub fn pigeon_front(a: &[Front]) -> Result<Front, FrontError> {
    pigeon_front_probing(a, 1)
}

/// [`pigeon_front`] testing `probes` extension points before declaring a
/// set Size.
pub fn pigeon_front_probing(a: &[Front], probes: usize) -> Result<Front, FrontError> {
    let mut it = a.iter();
    let first = it.next().ok_or_else(|| FrontError::Precondition("pigeon front needs at least one front".into()))?;
    let mut base = first.base().clone();
    for f in it {
        base = base.intersect(f.base())?;
    }
    Ok(Front::custom(Arc::new(Pigeon { a: a.to_vec(), base, probes: probes.max(1), bad_memo: Mutex::new(HashMap::new()) })))
}

/// The Hessenberg sum `α₀ # … # α_{k−1}`.
pub fn ram_pigeon(alphas: &[Ordinal]) -> Ordinal {
    alphas.iter().fold(Ordinal::zero(), |acc, a| nat_sum(&acc, a))
}

/// Outcome of [`arrow_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArrowVerdict {
    /// Every coloring has a homogeneous set of the right size and color.
    Holds,
    /// Some coloring is bad.
    Fails,
}

/// Report of [`arrow_check`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArrowReport {
    /// The verdict.
    pub verdict: ArrowVerdict,
    /// A bad coloring when the arrow fails.
    pub witness: Option<Coloring>,
    /// Search nodes visited.
    pub searched: u64,
    /// Subtrees cut because a homogeneous set was already complete.
    pub pruned: u64,
    /// Wall-clock seconds.
    pub seconds: f64,
}

struct Candidate {
    color: usize,
    subsets: Vec<usize>,
}

struct ArrowSearch {
    k: usize,
    symmetric: bool,
    candidates: Vec<Candidate>,
    by_set: Vec<Vec<usize>>,
    budget: u64,
    searched: u64,
    pruned: u64,
}

impl ArrowSearch {
    /// Returns a bad coloring, or `None` if every completion of the current
    /// assignment has a homogeneous candidate.
    fn dfs(
        &mut self,
        colors: &mut Vec<usize>,
        hits: &mut [usize],
        dead: &mut [u32],
        alive: &mut usize,
        max_used: Option<usize>,
    ) -> Result<Option<Vec<usize>>, FrontError> {
        self.searched += 1;
        if self.searched > self.budget {
            return Err(FrontError::Budget(format!("arrow search beyond {} nodes", self.budget)));
        }
        let p = colors.len();
        if *alive == 0 {
            let mut w = colors.clone();
            w.resize(self.by_set.len(), 0);
            return Ok(Some(w));
        }
        if p == self.by_set.len() {
            return Ok(Some(colors.clone()));
        }
        let limit = if self.symmetric { max_used.map(|m| m + 2).unwrap_or(1).min(self.k) } else { self.k };
        for col in 0..limit {
            let mut completed = false;
            let idxs = self.by_set[p].clone();
            for &ci in &idxs {
                let cand = &self.candidates[ci];
                if cand.color == col {
                    if dead[ci] == 0 {
                        hits[ci] += 1;
                        if hits[ci] == cand.subsets.len() {
                            completed = true;
                        }
                    } else {
                        hits[ci] += 1;
                    }
                } else {
                    if dead[ci] == 0 {
                        *alive -= 1;
                    }
                    dead[ci] += 1;
                }
            }
            let result = if completed {
                self.pruned += 1;
                None
            } else {
                colors.push(col);
                let r = self.dfs(colors, hits, dead, alive, Some(max_used.map_or(col, |m| m.max(col))))?;
                colors.pop();
                r
            };
            for &ci in &idxs {
                if self.candidates[ci].color == col {
                    hits[ci] -= 1;
                } else {
                    dead[ci] -= 1;
                    if dead[ci] == 0 {
                        *alive += 1;
                    }
                }
            }
            if result.is_some() {
                return Ok(result);
            }
        }
        Ok(None)
    }
}

/// Tests every `k`-coloring of `[s]^C` (with `k = A.len()`) for a
/// homogeneous `(C⊕A_i)`-size subset of color `i`.
pub fn arrow_check(s: &[u64], a: &[Front], c: &Front, budget: u64) -> Result<ArrowReport, FrontError> {
    let start = Instant::now();
    let k = a.len();
    if k == 0 {
        return Err(FrontError::Precondition("at least one color is required".into()));
    }
    let sets = c.size_sets_within(s, budget.max(1 << 16))?;
    let index: HashMap<&[u64], usize> = sets.iter().enumerate().map(|(i, v)| (v.as_slice(), i)).collect();
    let mut candidates = Vec::new();
    for (i, ai) in a.iter().enumerate() {
        let target = oplus(c, ai)?;
        for u in target.size_sets_within(s, budget.max(1 << 16))? {
            let subsets: Vec<usize> = c.size_sets_within(&u, 1 << 20)?.iter().map(|v| index[v.as_slice()]).collect();
            if !subsets.is_empty() {
                candidates.push(Candidate { color: i, subsets });
            }
        }
    }
    let mut by_set = vec![Vec::new(); sets.len()];
    for (ci, cand) in candidates.iter().enumerate() {
        for &si in &cand.subsets {
            by_set[si].push(ci);
        }
    }
    let mut search =
        ArrowSearch { k, symmetric: all_equal(a), candidates, by_set, budget, searched: 0, pruned: 0 };
    let mut hits = vec![0usize; search.candidates.len()];
    let mut dead = vec![0u32; search.candidates.len()];
    let mut alive = search.candidates.len();
    let bad = search.dfs(&mut Vec::new(), &mut hits, &mut dead, &mut alive, None)?;
    let witness = bad.map(|colors| Coloring::new(k, sets.iter().cloned().zip(colors)));
    Ok(ArrowReport {
        verdict: if witness.is_some() { ArrowVerdict::Fails } else { ArrowVerdict::Holds },
        witness,
        searched: search.searched,
        pruned: search.pruned,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Whether `coloring` of `[s]^C` has no homogeneous `(C⊕A_i)`-size subset of
/// color `i`, checked by direct enumeration.
pub fn verify_arrow_witness(s: &[u64], coloring: &Coloring, a: &[Front], c: &Front) -> Result<bool, FrontError> {
    for sub in c.size_sets_within(s, 1 << 22)? {
        if coloring.get(&sub).map(|x| x >= a.len()).unwrap_or(true) {
            return Ok(false);
        }
    }
    for (i, ai) in a.iter().enumerate() {
        let target = oplus(c, ai)?;
        for u in target.size_sets_within(s, 1 << 22)? {
            if homogeneous_color(coloring, &u, c)? == Some(i) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A witness that `D ↛ (A₀,…,A_{k−1})^𝟙_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BadExtension {
    /// A `D`-size set.
    pub s: FiniteSet,
    /// The extension point, above `max s`.
    pub n: u64,
    /// A bad coloring of the points of `s⌢⟨n⟩`.
    pub coloring: Vec<usize>,
}

/// For `ht(D) < ht(A₀) # … # ht(A_{k−1})`, finds `s ∈ D` and `n > max s`
/// such that `s⌢⟨n⟩` has a bad coloring.
pub fn find_bad_extension(d: &Front, a: &[Front], window: usize) -> Result<BadExtension, FrontError> {
    let hd = d.height_required()?;
    let mut target = Ordinal::zero();
    for ai in a {
        target = nat_sum(&target, &ai.height_required()?);
    }
    if !compare(&hd, &target).is_lt() {
        return Err(FrontError::Precondition(format!("ht(D) = {hd} is not below {target}")));
    }
    let b = pigeon_front(a)?;
    let base = d.base().intersect(b.base())?;
    let ground = base.take_from(base.min(), window)?;
    for t in b.size_sets_within(&ground, 1 << 22)? {
        let Some(p) = d.size_prefix_len(&t)? else { continue };
        if p < t.len() {
            let ext = &t[..=p];
            if let Some(coloring) = has_bad_coloring(ext, a)? {
                return Ok(BadExtension { s: FiniteSet::from_sorted(t[..p].to_vec()), n: t[p], coloring });
            }
        }
    }
    Err(FrontError::Budget(format!("no bad extension among Size sets over {window} base points")))
}

/// Tabulates the `(C⊕A)`-size homogeneous subsets for every color, keyed by
/// color; used by reports.
pub fn homogeneous_sets(s: &[u64], coloring: &Coloring, a: &[Front], c: &Front) -> Result<BTreeMap<usize, Vec<FiniteSet>>, FrontError> {
    let mut out: BTreeMap<usize, Vec<FiniteSet>> = BTreeMap::new();
    for (i, ai) in a.iter().enumerate() {
        let target = oplus(c, ai)?;
        for u in target.size_sets_within(s, 1 << 22)? {
            if homogeneous_color(coloring, &u, c)? == Some(i) {
                out.entry(i).or_default().push(u);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::front::{make_degenerate, make_uniform, sqcup, tail};
    use crate::parse::ord;

    fn unif(n: u64) -> Front {
        make_uniform(n, BaseStream::AllFrom(0))
    }

    #[test]
    fn bad_colorings_small_cases() {
        let a = [unif(2), unif(2)];
        let w = has_bad_coloring(&[0, 1, 2, 3], &a).unwrap().unwrap();
        assert!(verify_bad_coloring(&[0, 1, 2, 3], &w, &a).unwrap());
        assert_eq!(w.iter().filter(|&&c| c == 0).count(), 2);
        assert!(has_bad_coloring(&[0, 1, 2, 3, 4], &a).unwrap().is_none());
        let with_deg = [unif(2), make_degenerate()];
        let w = has_bad_coloring(&[3, 4], &with_deg).unwrap().unwrap();
        assert!(w.iter().all(|&c| c == 0));
    }

    #[test]
    fn pigeon_front_sizes_and_heights() {
        let b = pigeon_front(&[unif(2), unif(2)]).unwrap();
        let ground: Vec<u64> = (0..6).collect();
        let sizes = b.size_sets_within(&ground, 100_000).unwrap();
        assert!(sizes.iter().all(|s| s.len() == 4));
        assert_eq!(sizes.len(), 15);
        assert_eq!(b.height().unwrap(), Some(ord("4")));
        let b3 = pigeon_front(&[unif(1), unif(1), unif(1)]).unwrap();
        assert_eq!(b3.classify(&[2, 5, 9]).unwrap(), Class::Size);
        assert_eq!(b3.height().unwrap(), Some(ord("3")));
        let deg = pigeon_front(&[make_degenerate(), make_degenerate()]).unwrap();
        assert_eq!(deg.classify(&[]).unwrap(), Class::Size);
    }

    #[test]
    fn recursive_identity_on_uniform_pairs() {
        let a = [unif(2), unif(3)];
        let b = pigeon_front(&a).unwrap();
        for n in 0..3u64 {
            let left = tail(&b, &FiniteSet::new(vec![n]).unwrap()).unwrap();
            let one = FiniteSet::new(vec![n]).unwrap();
            let p0 = pigeon_front(&[tail(&a[0], &one).unwrap(), a[1].clone()]).unwrap();
            let p1 = pigeon_front(&[a[0].clone(), tail(&a[1], &one).unwrap()]).unwrap();
            let right = sqcup(&restrict_above(&p0, n), &restrict_above(&p1, n)).unwrap();
            let ground: Vec<u64> = (n + 1..n + 7).collect();
            for t in crate::sample::subsets_of(&ground, 5) {
                assert_eq!(left.classify(&t).unwrap(), right.classify(&t).unwrap(), "n={n} t={t:?}");
            }
        }
    }

    fn restrict_above(f: &Front, n: u64) -> Front {
        crate::front::restrict(f, BaseStream::AllFrom(n + 1)).unwrap()
    }

    #[test]
    fn arrow_small_cases() {
        let a = [unif(2), unif(2)];
        let c = unif(1);
        let r6 = arrow_check(&[0, 1, 2, 3, 4, 5], &a, &c, 1_000_000).unwrap();
        assert_eq!(r6.verdict, ArrowVerdict::Holds);
        let r4 = arrow_check(&[0, 1, 2, 3], &a, &c, 1_000_000).unwrap();
        assert_eq!(r4.verdict, ArrowVerdict::Fails);
        assert!(verify_arrow_witness(&[0, 1, 2, 3], r4.witness.as_ref().unwrap(), &a, &c).unwrap());
        let single = arrow_check(&[0, 1], &[unif(2)], &c, 1000).unwrap();
        assert_eq!(single.verdict, ArrowVerdict::Fails);
        let single = arrow_check(&[0, 1, 2], &[unif(2)], &c, 1000).unwrap();
        assert_eq!(single.verdict, ArrowVerdict::Holds);
    }

    #[test]
    fn bad_extensions() {
        let a = [unif(2), unif(2)];
        let w = find_bad_extension(&unif(3), &a, 8).unwrap();
        assert_eq!(w.s.len(), 3);
        let mut pts = w.s.to_vec();
        pts.push(w.n);
        assert!(verify_bad_coloring(&pts, &w.coloring, &a).unwrap());
        let w = find_bad_extension(&unif(1), &[unif(1), unif(1)], 6).unwrap();
        assert_eq!(w.s.len(), 1);
        let b = pigeon_front(&a).unwrap();
        assert!(matches!(find_bad_extension(&b, &a, 8), Err(FrontError::Precondition(_))));
    }

    #[test]
    fn ram_pigeon_values() {
        assert_eq!(ram_pigeon(&[ord("2"), ord("2")]), ord("4"));
        assert_eq!(ram_pigeon(&[ord("w"), ord("w")]), ord("w*2"));
        assert_eq!(ram_pigeon(&[ord("w^(2)+1")]), ord("w^(2)+1"));
    }
}
