//! Families of candidate edge-sets as disjoint intervals `[B, T]`, collapsed
//! one quadruple constraint at a time.
//!
//! When point `p` is added to a hypergraph on `0..p`, its candidate edges are
//! the triples `{x, y, p}`. Candidate `{x, y, p}` lives at bit `pair_rank(x, y)`
//! of a [`CandidateSet`], which is also its offset from `C(p,3)` in the triple
//! ranking. The bit for a pair never changes as more points are added, which
//! is what lets an interval set computed for one point be reused for the next.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::hypergraph::{binom, pair_rank, rank_unordered, Hypergraph, Point, TripleRank};

/// Largest candidate width: `C(12, 2)` new edges for a 13th point.
pub const MAX_CANDIDATES: usize = 66;
pub const DEFAULT_MEMBER_CAP: u32 = 30;

/// A set of candidate edges for one added point.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CandidateSet(pub u128);

impl CandidateSet {
    pub const EMPTY: Self = Self(0);

    /// The first `width` candidates.
    pub fn full(width: usize) -> Self {
        debug_assert!(width <= MAX_CANDIDATES);
        Self((1u128 << width) - 1)
    }

    pub fn single(i: usize) -> Self {
        Self(1 << i)
    }

    #[inline]
    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    #[inline]
    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut w = self.0;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(b)
            }
        })
    }
}

impl fmt::Debug for CandidateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// All sets `S` with `bottom ⊆ S ⊆ top`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    bottom: CandidateSet,
    top: CandidateSet,
}

impl Interval {
    pub fn new(bottom: CandidateSet, top: CandidateSet) -> Result<Self> {
        if !bottom.is_subset(top) {
            return Err(Error::Encoding(format!(
                "interval bottom {bottom:?} is not inside top {top:?}"
            )));
        }
        Ok(Self { bottom, top })
    }

    #[inline]
    fn raw(bottom: u128, top: u128) -> Self {
        debug_assert_eq!(bottom & !top, 0);
        Self {
            bottom: CandidateSet(bottom),
            top: CandidateSet(top),
        }
    }

    /// `[∅, first width candidates]`.
    pub fn full(width: usize) -> Self {
        Self::raw(0, CandidateSet::full(width).0)
    }

    #[inline]
    pub fn bottom(&self) -> CandidateSet {
        self.bottom
    }

    #[inline]
    pub fn top(&self) -> CandidateSet {
        self.top
    }

    /// Number of undecided candidates, `|T| - |B|`.
    #[inline]
    pub fn free_width(&self) -> u32 {
        self.top.len() - self.bottom.len()
    }

    /// Number of member sets, `2^(|T|-|B|)`.
    pub fn cardinality(&self) -> u128 {
        1u128 << self.free_width()
    }

    pub fn contains(&self, s: CandidateSet) -> bool {
        self.bottom.is_subset(s) && s.is_subset(self.top)
    }

    /// Adds candidates to `top` without deciding them.
    pub fn widen(&self, extra: CandidateSet) -> Self {
        Self::raw(self.bottom.0, self.top.0 | extra.0)
    }

    /// Debug dump `B:<hex>/T:<hex>`, nibbles most significant first, padded
    /// to `width` candidates.
    pub fn dump(&self, width: usize) -> String {
        let digits = width.div_ceil(4).max(1);
        format!(
            "B:{:0digits$X}/T:{:0digits$X}",
            self.bottom.0,
            self.top.0,
            digits = digits
        )
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.bottom, self.top)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    /// The base triple is not an edge: some member of `X` must be selected.
    AtLeastOneIn,
    /// The base triple is an edge: some member of `X` must stay unselected.
    AtLeastOneOut,
}

/// One quadruple condition, compiled to a mask over candidate indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadConstraint {
    members: CandidateSet,
    polarity: Polarity,
    base: TripleRank,
}

impl QuadConstraint {
    pub fn new(members: CandidateSet, polarity: Polarity, base: TripleRank) -> Result<Self> {
        if !(1..=3).contains(&members.len()) {
            return Err(Error::NumberingMismatch(format!(
                "constraint must name 1 to 3 candidates, got {members:?}"
            )));
        }
        Ok(Self {
            members,
            polarity,
            base,
        })
    }

    #[inline]
    pub fn members(&self) -> CandidateSet {
        self.members
    }

    #[inline]
    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    /// The already-decided triple of the quadruple; the rest are candidates.
    pub fn base(&self) -> TripleRank {
        self.base
    }

    pub fn is_satisfied_by(&self, s: CandidateSet) -> bool {
        match self.polarity {
            Polarity::AtLeastOneIn => s.0 & self.members.0 != 0,
            Polarity::AtLeastOneOut => self.members.0 & !s.0 != 0,
        }
    }
}

/// An ordered list of pairwise disjoint intervals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(iv: Interval) -> Self {
        Self {
            intervals: vec![iv],
        }
    }

    pub fn from_intervals(intervals: Vec<Interval>) -> Self {
        Self { intervals }
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.intervals.iter()
    }

    pub fn as_slice(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn push(&mut self, iv: Interval) {
        self.intervals.push(iv);
    }

    /// Total number of member sets.
    pub fn member_count(&self) -> u128 {
        self.intervals.iter().map(Interval::cardinality).sum()
    }
}

impl<'a> IntoIterator for &'a IntervalSet {
    type Item = &'a Interval;
    type IntoIter = std::slice::Iter<'a, Interval>;

    fn into_iter(self) -> Self::IntoIter {
        self.intervals.iter()
    }
}

#[inline]
fn collapse_into(iv: Interval, c: &QuadConstraint, out: &mut Vec<Interval>) {
    let b = iv.bottom.0;
    let t = iv.top.0;
    let x = c.members.0;
    match c.polarity {
        Polarity::AtLeastOneIn => {
            if b & x != 0 {
                out.push(iv);
                return;
            }
            let mut free = t & x;
            let mut removed = 0u128;
            while free != 0 {
                let bit = free & free.wrapping_neg();
                out.push(Interval::raw(b | bit, t & !removed));
                removed |= bit;
                free &= free - 1;
            }
        }
        Polarity::AtLeastOneOut => {
            if x & !t != 0 {
                out.push(iv);
                return;
            }
            let mut free = x & !b;
            let mut added = 0u128;
            while free != 0 {
                let bit = free & free.wrapping_neg();
                out.push(Interval::raw(b | added, t & !bit));
                added |= bit;
                free &= free - 1;
            }
        }
    }
}

/// Replaces `iv` by 0 to 3 disjoint intervals covering exactly its members
/// that satisfy `c`. Undecided members of `X` are taken lowest index first.
pub fn collapse(iv: &Interval, c: &QuadConstraint) -> Vec<Interval> {
    let mut out = Vec::with_capacity(3);
    collapse_into(*iv, c, &mut out);
    out
}

/// Applies every constraint, in the given order, one pass per constraint.
pub fn propagate(ivs: IntervalSet, cs: &[QuadConstraint], order: &[usize]) -> IntervalSet {
    propagate_bounded(ivs, cs, order, None)
}

/// [`propagate`], additionally discarding intervals whose members all fall
/// outside `window = (min, max)` set sizes. `B` only grows and `T` only
/// shrinks under collapsing, so the test is exact for pruning.
pub fn propagate_bounded(
    ivs: IntervalSet,
    cs: &[QuadConstraint],
    order: &[usize],
    window: Option<(u32, u32)>,
) -> IntervalSet {
    let mut cur = ivs.intervals;
    let mut next = Vec::with_capacity(cur.len() * 2);
    for &k in order {
        let c = &cs[k];
        next.clear();
        for &iv in &cur {
            collapse_into(iv, c, &mut next);
        }
        if let Some((lo, hi)) = window {
            next.retain(|iv| iv.bottom.len() <= hi && iv.top.len() >= lo);
        }
        std::mem::swap(&mut cur, &mut next);
        if cur.is_empty() {
            break;
        }
    }
    IntervalSet { intervals: cur }
}

/// All members of `iv`, by increasing numeric value of the free part.
pub fn enumerate_members(iv: &Interval, cap: u32) -> Result<Vec<CandidateSet>> {
    let free = iv.free_width();
    if free > cap {
        return Err(Error::MemberCapExceeded { free, cap });
    }
    let f = iv.top.0 & !iv.bottom.0;
    let mut out = Vec::with_capacity(1usize << free);
    let mut sub = 0u128;
    loop {
        out.push(CandidateSet(iv.bottom.0 | sub));
        if sub == f {
            break;
        }
        sub = (sub.wrapping_sub(f)) & f;
    }
    Ok(out)
}

/// Calls `visit` on every member of `iv` whose size lies in `lo..=hi`,
/// stopping early if `visit` returns `false`. Returns `false` when stopped.
pub fn for_each_member_sized<F>(iv: &Interval, lo: u32, hi: u32, mut visit: F) -> bool
where
    F: FnMut(CandidateSet) -> bool,
{
    let base = iv.bottom.0;
    let nb = iv.bottom.len();
    if nb > hi || iv.top.len() < lo {
        return true;
    }
    let free: Vec<u128> = CandidateSet(iv.top.0 & !base)
        .iter()
        .map(|b| 1u128 << b)
        .collect();
    let kmin = lo.saturating_sub(nb) as usize;
    let kmax = ((hi - nb) as usize).min(free.len());
    for k in kmin..=kmax {
        if !for_each_combination(&free, k, base, &mut visit) {
            return false;
        }
    }
    true
}

fn for_each_combination<F>(free: &[u128], k: usize, base: u128, visit: &mut F) -> bool
where
    F: FnMut(CandidateSet) -> bool,
{
    let m = free.len();
    if k > m {
        return true;
    }
    if k == 0 {
        return visit(CandidateSet(base));
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let s = idx.iter().fold(base, |acc, &i| acc | free[i]);
        if !visit(CandidateSet(s)) {
            return false;
        }
        // advance to the next k-combination
        let mut i = k;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            if idx[i] < m - k + i {
                break;
            }
            if i == 0 {
                return true;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Quadruple processing orders.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum OrderStrategy {
    /// Ascending base-triple rank.
    Lex,
    /// Grouped by lowest shared candidate, then base-triple rank.
    #[default]
    Grouped,
    /// Descending base-triple rank.
    Reverse,
}

impl FromStr for OrderStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lex" => Ok(Self::Lex),
            "grouped" => Ok(Self::Grouped),
            "reverse" => Ok(Self::Reverse),
            _ => Err(Error::Config(format!(
                "unknown order {s:?}; expected lex, grouped or reverse"
            ))),
        }
    }
}

impl fmt::Display for OrderStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Lex => "lex",
            Self::Grouped => "grouped",
            Self::Reverse => "reverse",
        })
    }
}

/// A processing order for `cs` under the default strategy.
pub fn constraint_order(cs: &[QuadConstraint]) -> Vec<usize> {
    constraint_order_with(cs, OrderStrategy::default())
}

pub fn constraint_order_with(cs: &[QuadConstraint], strategy: OrderStrategy) -> Vec<usize> {
    let mut order: Vec<usize> = (0..cs.len()).collect();
    match strategy {
        OrderStrategy::Lex => order.sort_by_key(|&i| (cs[i].base, i)),
        OrderStrategy::Reverse => order.sort_by_key(|&i| (std::cmp::Reverse(cs[i].base), i)),
        OrderStrategy::Grouped => {
            order.sort_by_key(|&i| (cs[i].members.0.trailing_zeros(), cs[i].base, i))
        }
    }
    order
}

/// The candidate triples `{x, y, p}` of a new point `p`, in bit order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateNumbering {
    new_point: Point,
    triples: Vec<TripleRank>,
    // rank offset from C(p,3) -> bit
    bit_of: Vec<u8>,
}

impl CandidateNumbering {
    /// The colex numbering: candidate `{x, y, p}` at bit `pair_rank(x, y)`.
    pub fn colex(new_point: usize) -> Result<Self> {
        if !(3..crate::hypergraph::MAX_POINTS).contains(&new_point) {
            return Err(Error::BadPointCount(new_point + 1));
        }
        let triples = (0..binom(new_point, 2))
            .map(|r| TripleRank::new(binom(new_point, 3) + r).expect("rank in range"))
            .collect();
        Self::new(new_point as Point, triples)
    }

    /// An explicit numbering: bit `i` is `triples[i]`.
    pub fn new(new_point: Point, triples: Vec<TripleRank>) -> Result<Self> {
        let p = new_point as usize;
        let width = binom(p, 2);
        if triples.len() != width {
            return Err(Error::NumberingMismatch(format!(
                "{} candidates given, point {p} has {width}",
                triples.len()
            )));
        }
        let offset = binom(p, 3);
        let mut bit_of = vec![u8::MAX; width];
        for (bit, t) in triples.iter().enumerate() {
            let r = t.index();
            if r < offset || r >= offset + width {
                let (a, b, c) = t.points();
                return Err(Error::NumberingMismatch(format!(
                    "triple {{{a},{b},{c}}} is not a candidate for point {p}"
                )));
            }
            if bit_of[r - offset] != u8::MAX {
                return Err(Error::NumberingMismatch(format!(
                    "triple rank {r} numbered twice"
                )));
            }
            bit_of[r - offset] = bit as u8;
        }
        Ok(Self {
            new_point,
            triples,
            bit_of,
        })
    }

    pub fn new_point(&self) -> usize {
        self.new_point as usize
    }

    pub fn width(&self) -> usize {
        self.triples.len()
    }

    pub fn triples(&self) -> &[TripleRank] {
        &self.triples
    }

    /// Bit carrying candidate `{x, y, p}`.
    #[inline]
    pub fn bit(&self, x: usize, y: usize) -> usize {
        let (x, y) = if x < y { (x, y) } else { (y, x) };
        self.bit_of[pair_rank(x, y)] as usize
    }

    pub fn is_colex(&self) -> bool {
        self.bit_of
            .iter()
            .enumerate()
            .all(|(i, &b)| i == b as usize)
    }
}

/// One constraint per quadruple `{i, j, k, p}` with `i < j < k < p`, where `p`
/// is the numbering's new point and must equal `base.n()`.
pub fn compile_constraints(
    base: &Hypergraph,
    numbering: &CandidateNumbering,
) -> Result<Vec<QuadConstraint>> {
    let n = base.n();
    if numbering.new_point() != n {
        return Err(Error::NumberingMismatch(format!(
            "numbering adds point {}, base has {n} points",
            numbering.new_point()
        )));
    }
    let mut out = Vec::with_capacity(binom(n, 3));
    for r in 0..binom(n, 3) {
        let base_rank = TripleRank::new(r)?;
        let (i, j, k) = base_rank.points();
        let (i, j, k) = (i as usize, j as usize, k as usize);
        let members = (1u128 << numbering.bit(i, j))
            | (1u128 << numbering.bit(i, k))
            | (1u128 << numbering.bit(j, k));
        let polarity = if base.has_rank(r) {
            Polarity::AtLeastOneOut
        } else {
            Polarity::AtLeastOneIn
        };
        out.push(QuadConstraint {
            members: CandidateSet(members),
            polarity,
            base: base_rank,
        });
    }
    Ok(out)
}

/// Constraints for the quadruples `{x, y, q, q+1}`, where `q = partial.n() - 1`
/// is the most recently added point and `q + 1` the next one, in the colex
/// numbering. Together with an interval set already satisfying every
/// quadruple `{x, y, z, q}` (renamed to `q + 1`), these are all that remain.
pub fn compile_chain_constraints(partial: &Hypergraph) -> Vec<QuadConstraint> {
    let n = partial.n();
    let q = n - 1;
    let mut out = Vec::with_capacity(binom(q, 2));
    for y in 1..q {
        for x in 0..y {
            let r = rank_unordered(x as Point, y as Point, q as Point);
            let members = (1u128 << pair_rank(x, y))
                | (1u128 << pair_rank(x, q))
                | (1u128 << pair_rank(y, q));
            let polarity = if partial.has_rank(r) {
                Polarity::AtLeastOneOut
            } else {
                Polarity::AtLeastOneIn
            };
            out.push(QuadConstraint {
                members: CandidateSet(members),
                polarity,
                base: TripleRank::new(r).expect("rank in range"),
            });
        }
    }
    out
}
