//! Growing good hypergraphs one point at a time.
//!
//! A good hypergraph on `n` points with at most `e` edges always has a point
//! of degree at least `ceil(3e/n)`. Deleting the point of largest degree (ties
//! broken by largest `f_v`) leaves a good hypergraph with at most
//! `e - ceil(3e/n)` edges, so every class is reached by extending class
//! representatives along a chain of `(n, e_max)` levels and keeping only
//! extensions whose new point wins that comparison.
//!
//! The extensions of a hypergraph `G` on `0..p` by point `p` are found by
//! collapsing the interval `[∅, all candidates]` against one constraint per
//! quadruple `{i, j, k, p}`. When a chosen extension is extended again by
//! `p + 1`, the interval set for `p` already satisfies every quadruple
//! `{i, j, k, p + 1}` with `i, j, k < p` once candidate `{x, y, p}` is read as
//! `{x, y, p + 1}`. Only the candidates `{x, p, p + 1}` are new and only the
//! quadruples `{x, y, p, p + 1}` remain to be applied.

use std::ops::ControlFlow;

use rayon::prelude::*;

use crate::canonical::{canonical_form, CanonicalForm, ClassSet};
use crate::error::{Error, Result};
use crate::hypergraph::{
    binom, pair_unrank, rank_unordered, triples, EdgeBits, Hypergraph, Point, MAX_POINTS,
};
use crate::interval::{
    compile_chain_constraints, compile_constraints, constraint_order_with, for_each_member_sized,
    propagate_bounded, CandidateNumbering, CandidateSet, Interval, IntervalSet, OrderStrategy,
    QuadConstraint,
};

/// Per-level edge bounds, ascending and consecutive in `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathBounds {
    levels: Vec<(usize, usize)>,
}

/// Bounds from `(n_target, e_target)` down to `n_start` by `e <- e - ceil(3e/n)`.
///
/// `e_target` above `C(n_target, 3)` is clamped.
pub fn path_bounds(n_target: usize, e_target: usize, n_start: usize) -> Result<PathBounds> {
    if !(3..=n_target).contains(&n_start) || n_target > MAX_POINTS {
        return Err(Error::BadBounds(format!(
            "need 3 <= n_start ({n_start}) <= n_target ({n_target}) <= 13"
        )));
    }
    let mut e = e_target.min(triples(n_target));
    let mut levels = vec![(n_target, e)];
    for n in (n_start + 1..=n_target).rev() {
        e -= (3 * e).div_ceil(n);
        levels.push((n - 1, e));
    }
    levels.reverse();
    Ok(PathBounds { levels })
}

impl PathBounds {
    /// Every level bounded only by `C(n,3)`.
    pub fn unbounded(n_start: usize, n_target: usize) -> Result<Self> {
        path_bounds(n_target, triples(n_target), n_start)
    }

    /// A user-supplied list; only shape is checked, not the recurrence.
    pub fn explicit(levels: Vec<(usize, usize)>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::BadBounds("no levels".into()));
        }
        for w in levels.windows(2) {
            if w[1].0 != w[0].0 + 1 {
                return Err(Error::BadBounds(format!(
                    "levels {} and {} are not consecutive",
                    w[0].0, w[1].0
                )));
            }
        }
        let (lo, hi) = (levels[0].0, levels[levels.len() - 1].0);
        if lo < 3 || hi > MAX_POINTS {
            return Err(Error::BadBounds(format!(
                "levels {lo}..={hi} outside 3..=13"
            )));
        }
        Ok(Self { levels })
    }

    pub fn levels(&self) -> &[(usize, usize)] {
        &self.levels
    }

    pub fn first_n(&self) -> usize {
        self.levels[0].0
    }

    pub fn last_n(&self) -> usize {
        self.levels[self.levels.len() - 1].0
    }

    pub fn max_edges(&self, n: usize) -> Option<usize> {
        let i = n.checked_sub(self.first_n())?;
        self.levels.get(i).map(|&(_, e)| e)
    }

    /// The levels from `n` upward.
    pub fn from_level(&self, n: usize) -> Result<Self> {
        let i = n
            .checked_sub(self.first_n())
            .filter(|&i| i < self.levels.len())
            .ok_or_else(|| Error::BadBounds(format!("no level {n}")))?;
        Ok(Self {
            levels: self.levels[i..].to_vec(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct ExtensionOptions {
    pub order: OrderStrategy,
    /// Keep only extensions whose new point has maximum `d_v`, then maximum `f_v`.
    pub filter: bool,
    /// Start each point after the first from the previous point's intervals.
    pub reuse: bool,
    /// Triples left uncoloured: never selected, and quadruples containing one
    /// are not constrained.
    pub omitted: EdgeBits,
}

impl Default for ExtensionOptions {
    fn default() -> Self {
        Self {
            order: OrderStrategy::default(),
            filter: true,
            reuse: true,
            omitted: EdgeBits::EMPTY,
        }
    }
}

/// The point `v` has maximum degree, and maximum `f_v` among points of that degree.
pub fn last_point_filter(g: &Hypergraph, v: usize) -> bool {
    let p = g.degree_profile();
    let dv = p.d[v];
    p.d.iter()
        .zip(&p.f)
        .all(|(&d, &f)| d < dv || (d == dv && f <= p.f[v]))
}

/// Goodness, ignoring quadruples that contain an omitted triple.
pub fn is_good_except(g: &Hypergraph, omitted: &EdgeBits) -> bool {
    if omitted.is_empty() {
        return g.is_good();
    }
    crate::hypergraph::QUADS[..binom(g.n(), 4)].iter().all(|q| {
        if q.iter().any(|&r| omitted.contains(r as usize)) {
            return true;
        }
        let c = q.iter().filter(|&&r| g.has_rank(r as usize)).count();
        (1..=3).contains(&c)
    })
}

struct Extender<'a> {
    opts: &'a ExtensionOptions,
}

impl Extender<'_> {
    fn suppressed(&self, c: &QuadConstraint, apex: usize) -> bool {
        let om = &self.opts.omitted;
        if om.is_empty() {
            return false;
        }
        if om.contains(c.base().index()) {
            return true;
        }
        let (x, y, z) = c.base().points();
        let a = apex as Point;
        [(x, y), (x, z), (y, z)]
            .iter()
            .any(|&(u, v)| om.contains(rank_unordered(u, v, a)))
    }

    /// Candidate bits of point `p` that are omitted triples.
    fn omitted_candidates(&self, p: usize) -> u128 {
        if self.opts.omitted.is_empty() {
            return 0;
        }
        self.opts.omitted.extract(binom(p, 3), binom(p, 2))
    }

    fn touches_omitted(&self, point: usize) -> bool {
        self.opts.omitted.iter().any(|r| {
            crate::hypergraph::TripleRank::new(r).map_or(false, |t| {
                let (a, b, c) = t.points();
                [a, b, c].contains(&(point as Point))
            })
        })
    }

    fn run_constraints(
        &self,
        start: IntervalSet,
        mut cs: Vec<QuadConstraint>,
        apex: usize,
        window: Option<(u32, u32)>,
    ) -> IntervalSet {
        if !self.opts.omitted.is_empty() {
            cs.retain(|c| !self.suppressed(c, apex));
        }
        let order = constraint_order_with(&cs, self.opts.order);
        propagate_bounded(start, &cs, &order, window)
    }

    /// All extensions of `g` by point `g.n()`, from scratch.
    fn fresh(&self, g: &Hypergraph, window: Option<(u32, u32)>) -> IntervalSet {
        let p = g.n();
        let top = CandidateSet::full(binom(p, 2)).0 & !self.omitted_candidates(p);
        let start =
            IntervalSet::single(Interval::new(CandidateSet(0), CandidateSet(top)).expect("0 ⊆ T"));
        let numbering = CandidateNumbering::colex(p).expect("3 <= p < 13");
        let cs = compile_constraints(g, &numbering).expect("colex numbering matches");
        self.run_constraints(start, cs, p, window)
    }

    /// All extensions of `g` by point `g.n()`, given the intervals `prev` that
    /// produced the edges of point `g.n() - 1`.
    fn chained(
        &self,
        prev: &IntervalSet,
        g: &Hypergraph,
        window: Option<(u32, u32)>,
    ) -> IntervalSet {
        let p = g.n();
        let fresh_bits = CandidateSet::full(binom(p, 2)).0 & !CandidateSet::full(binom(p - 1, 2)).0;
        let hi = window.map_or(u32::MAX, |(_, hi)| hi);
        let start = IntervalSet::from_intervals(
            prev.iter()
                .filter(|iv| iv.bottom().len() <= hi)
                .map(|iv| iv.widen(CandidateSet(fresh_bits)))
                .collect(),
        );
        self.run_constraints(start, compile_chain_constraints(g), p, window)
    }

    fn can_reuse(&self, p: usize) -> bool {
        self.opts.reuse && !self.touches_omitted(p) && !self.touches_omitted(p - 1)
    }

    /// Visits every accepted extension of `g` built from members of `ivs` with
    /// size in `lo..=hi`.
    fn for_each_accepted<F>(
        &self,
        g: &Hypergraph,
        ivs: &IntervalSet,
        lo: u32,
        hi: u32,
        mut visit: F,
    ) -> ControlFlow<()>
    where
        F: FnMut(Hypergraph) -> ControlFlow<()>,
    {
        let p = g.n();
        let offset = binom(p, 3);
        let base_deg = g.degrees();
        let mut stopped = false;
        for iv in ivs {
            let cont = for_each_member_sized(iv, lo, hi, |s| {
                let mut edges = *g.bits();
                edges.or_shifted(s.0, offset);
                let h = Hypergraph::from_raw(p + 1, edges);
                if self.opts.filter && !new_point_wins(&h, &base_deg, s) {
                    return true;
                }
                if visit(h).is_break() {
                    stopped = true;
                    return false;
                }
                true
            });
            if !cont || stopped {
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    }

    fn size_window(&self, g: &Hypergraph, e_max: Option<usize>) -> Option<(u32, u32)> {
        let p = g.n();
        let width = binom(p, 2) as u32;
        let hi = match e_max {
            Some(e) => {
                let e_g = g.edge_count();
                if e < e_g {
                    return None;
                }
                ((e - e_g) as u32).min(width)
            }
            None => width,
        };
        let lo = if self.opts.filter {
            g.degrees()[..p].iter().copied().max().unwrap_or(0)
        } else {
            0
        };
        (lo <= hi).then_some((lo, hi))
    }

    fn descend<F>(
        &self,
        g: &Hypergraph,
        prev: Option<&IntervalSet>,
        bounds: &PathBounds,
        sink: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&Hypergraph) -> ControlFlow<()>,
    {
        let p = g.n();
        if p == bounds.last_n() {
            return sink(g);
        }
        let Some((lo, hi)) = self.size_window(g, bounds.max_edges(p + 1)) else {
            return ControlFlow::Continue(());
        };
        // Intervals handed to children must stay unpruned, so the size
        // window only applies at the last level.
        let last = p + 1 == bounds.last_n();
        let window = last.then_some((lo, hi));
        let ivs = match prev {
            Some(prev) if self.can_reuse(p) => self.chained(prev, g, window),
            _ => self.fresh(g, window),
        };
        if last {
            return self.for_each_accepted(g, &ivs, lo, hi, |h| sink(&h));
        }
        for h in collect_accepted(self, g, &ivs, lo, hi) {
            self.descend(&h, Some(&ivs), bounds, sink)?;
        }
        ControlFlow::Continue(())
    }
}

fn collect_accepted(
    ext: &Extender<'_>,
    g: &Hypergraph,
    ivs: &IntervalSet,
    lo: u32,
    hi: u32,
) -> Vec<Hypergraph> {
    let mut out = Vec::new();
    let _ = ext.for_each_accepted(g, ivs, lo, hi, |h| {
        out.push(h);
        ControlFlow::Continue(())
    });
    out
}

/// The last point of `h` has maximum degree and, among points of that
/// degree, maximum `f_v`. `base_deg` holds the degrees before the new edges `s`.
fn new_point_wins(h: &Hypergraph, base_deg: &[u32; MAX_POINTS], s: CandidateSet) -> bool {
    let p = h.n() - 1;
    let mut deg = *base_deg;
    for b in s.iter() {
        let (x, y) = pair_unrank(b);
        deg[x as usize] += 1;
        deg[y as usize] += 1;
    }
    let dp = s.len();
    deg[p] = dp;
    let mut tied = false;
    for &d in &deg[..p] {
        if d > dp {
            return false;
        }
        tied |= d == dp;
    }
    if !tied {
        return true;
    }
    let mut f = [0u64; MAX_POINTS];
    for (a, b, c) in h.edges() {
        let prod = deg[a as usize] as u64 * deg[b as usize] as u64 * deg[c as usize] as u64;
        f[a as usize] += prod;
        f[b as usize] += prod;
        f[c as usize] += prod;
    }
    (0..p).all(|w| deg[w] != dp || f[w] <= f[p])
}

/// Every good extension of `g` by one point with at most `e_max` edges in
/// total, subject to the options' filter and omitted triples.
pub fn extend_one(
    g: &Hypergraph,
    e_max: Option<usize>,
    opts: &ExtensionOptions,
) -> Vec<Hypergraph> {
    let ext = Extender { opts };
    if g.n() >= MAX_POINTS {
        return Vec::new();
    }
    let Some((lo, hi)) = ext.size_window(g, e_max) else {
        return Vec::new();
    };
    let ivs = ext.fresh(g, Some((lo, hi)));
    collect_accepted(&ext, g, &ivs, lo, hi)
}

/// The unpruned interval set describing every good extension of `g` by
/// point `g.n()`.
pub fn extension_intervals(g: &Hypergraph, opts: &ExtensionOptions) -> IntervalSet {
    Extender { opts }.fresh(g, None)
}

/// Depth-first extension of `seed` through every level of `bounds`, calling
/// `sink` on each hypergraph reaching the last level. `sink` may stop the
/// search by returning `Break`.
pub fn extend_chain<F>(
    seed: &Hypergraph,
    bounds: &PathBounds,
    opts: &ExtensionOptions,
    mut sink: F,
) -> Result<ControlFlow<()>>
where
    F: FnMut(&Hypergraph) -> ControlFlow<()>,
{
    if seed.n() != bounds.first_n() {
        return Err(Error::BadBounds(format!(
            "seed has {} points, bounds start at {}",
            seed.n(),
            bounds.first_n()
        )));
    }
    if seed.edge_count() > bounds.levels()[0].1 {
        return Err(Error::BadBounds(format!(
            "seed has {} edges, first level allows {}",
            seed.edge_count(),
            bounds.levels()[0].1
        )));
    }
    if !is_good_except(seed, &opts.omitted) {
        return Err(Error::SeedNotGood);
    }
    if !seed.bits().and(&opts.omitted).is_empty() {
        return Err(Error::Omitted("seed colours an omitted triple".into()));
    }
    Ok(Extender { opts }.descend(seed, None, bounds, &mut sink))
}

/// Canonical forms of everything `seed` reaches, sorted and deduplicated.
pub fn classes_from_seed(
    seed: &Hypergraph,
    bounds: &PathBounds,
    opts: &ExtensionOptions,
) -> Result<Vec<CanonicalForm>> {
    let mut out = Vec::new();
    let _ = extend_chain(seed, bounds, opts, |h| {
        out.push(canonical_form(h));
        ControlFlow::Continue(())
    })?;
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct EnumerateOptions {
    pub extension: ExtensionOptions,
    /// Canonical dedup continues level by level while a level has at most
    /// this many classes; past it, the remaining levels are chained.
    pub dedup_threshold: usize,
    /// Overrides the derived path bounds. Must end at the target `n`.
    pub bounds: Option<PathBounds>,
    /// Seeds per parallel batch in the final stage.
    pub batch: usize,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        Self {
            extension: ExtensionOptions::default(),
            dedup_threshold: 100_000_000,
            bounds: None,
            batch: 512,
        }
    }
}

/// Seeds for the final chained stage, and the bounds from their level up.
#[derive(Clone, Debug)]
pub struct Stage {
    pub seeds: Vec<Hypergraph>,
    pub bounds: PathBounds,
    /// `(n, classes)` for every deduplicated level.
    pub level_sizes: Vec<(usize, usize)>,
}

fn resolve_bounds(n: usize, e_max: Option<usize>, opts: &EnumerateOptions) -> Result<PathBounds> {
    if !(3..=MAX_POINTS).contains(&n) {
        return Err(Error::BadPointCount(n));
    }
    match &opts.bounds {
        Some(b) => {
            if b.last_n() != n || b.first_n() != 3 {
                return Err(Error::BadBounds(format!(
                    "explicit bounds must cover levels 3..={n}"
                )));
            }
            Ok(b.clone())
        }
        None => path_bounds(n, e_max.unwrap_or(triples(n)), 3),
    }
}

/// Builds class representatives level by level from the two 3-point
/// hypergraphs, deduplicating while levels stay under the threshold.
/// `e_max` is the bound searched; see [`searched_bound`].
pub fn bootstrap(n: usize, e_max: Option<usize>, opts: &EnumerateOptions) -> Result<Stage> {
    let bounds = resolve_bounds(n, e_max, opts)?;
    let e3 = bounds.max_edges(3).expect("level 3 present");
    let mut reps: Vec<Hypergraph> = [
        Hypergraph::empty(3)?,
        Hypergraph::from_triples(3, [(0, 1, 2)])?,
    ]
    .into_iter()
    .filter(|g| g.edge_count() <= e3)
    .collect();
    let mut level = 3;
    let mut level_sizes = vec![(3, reps.len())];
    while level < n && reps.len() <= opts.dedup_threshold {
        let next = level + 1;
        if next == n {
            break;
        }
        let e = bounds.max_edges(next);
        let per_rep: Vec<Vec<CanonicalForm>> = reps
            .par_iter()
            .map(|g| {
                let mut v: Vec<CanonicalForm> = extend_one(g, e, &opts.extension)
                    .iter()
                    .map(canonical_form)
                    .collect();
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect();
        let mut set = ClassSet::new();
        for v in per_rep {
            set.extend(v);
        }
        reps = set.into_sorted();
        level = next;
        level_sizes.push((level, reps.len()));
    }
    Ok(Stage {
        seeds: reps,
        bounds: bounds.from_level(level)?,
        level_sizes,
    })
}

/// Result of a complete enumeration.
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub n: usize,
    pub bounds: PathBounds,
    /// One representative per class, in `Hypergraph` order.
    pub classes: Vec<Hypergraph>,
    pub level_sizes: Vec<(usize, usize)>,
}

impl Enumeration {
    /// Class counts by edge count, ascending.
    pub fn counts_by_edges(&self) -> Vec<(usize, usize)> {
        let mut m = std::collections::BTreeMap::new();
        for g in &self.classes {
            *m.entry(g.edge_count()).or_insert(0) += 1;
        }
        m.into_iter().collect()
    }
}

/// Whether an enumeration stops at half the triples and recovers the rest
/// by complementing.
pub fn uses_complements(e_max: Option<usize>, opts: &EnumerateOptions) -> bool {
    e_max.is_none() && opts.bounds.is_none()
}

/// The edge bound actually searched for a target of `e_max`.
pub fn searched_bound(n: usize, e_max: Option<usize>, opts: &EnumerateOptions) -> Option<usize> {
    if uses_complements(e_max, opts) {
        Some(triples(n) / 2)
    } else {
        e_max
    }
}

/// Adds the class of the complement of every class below half the triples.
/// `classes` must hold canonical forms, as every enumeration returns.
///
/// Complementing maps good hypergraphs to good hypergraphs and preserves
/// isomorphism, so a list holding every class with `e <= C(n,3)/2` becomes
/// a list of every class.
pub fn add_complements(classes: Vec<Hypergraph>) -> Vec<Hypergraph> {
    let mut set = ClassSet::new();
    let extra: Vec<CanonicalForm> = classes
        .par_iter()
        .filter(|g| 2 * g.edge_count() < g.width())
        .map(|g| canonical_form(&g.complement()))
        .collect();
    set.extend(classes.into_iter().map(CanonicalForm::assume_canonical));
    set.extend(extra);
    set.into_sorted()
}

/// One representative of every class of good `n`-point hypergraphs with at
/// most `e_max` edges. Without a bound, classes above half the triples come
/// from complements of those below.
pub fn enumerate_all(
    n: usize,
    e_max: Option<usize>,
    opts: &EnumerateOptions,
) -> Result<Enumeration> {
    let searched = searched_bound(n, e_max, opts);
    let stage = bootstrap(n, searched, opts)?;
    let mut set = ClassSet::new();
    for chunk in stage.seeds.chunks(opts.batch.max(1)) {
        let forms: Vec<Vec<CanonicalForm>> = chunk
            .par_iter()
            .map(|s| classes_from_seed(s, &stage.bounds, &opts.extension))
            .collect::<Result<_>>()?;
        for v in forms {
            set.extend(v);
        }
    }
    let mut classes = set.into_sorted();
    let mut level_sizes = stage.level_sizes;
    if level_sizes.last().map(|&(l, _)| l) != Some(n) {
        level_sizes.push((n, classes.len()));
    }
    if uses_complements(e_max, opts) {
        classes = add_complements(classes);
    }
    Ok(Enumeration {
        n,
        bounds: resolve_bounds(n, searched, opts)?,
        classes,
        level_sizes,
    })
}
