//! Small 3-uniform hypergraphs on at most 13 points.
//!
//! Triples are ranked in colex order: `{i, j, k}` with `i < j < k` has rank
//! `C(i,1) + C(j,2) + C(k,3)`. The triples of an `n`-point set are therefore
//! exactly the ranks `0..C(n,3)`, and adding point `n` appends the block
//! `C(n,3)..C(n+1,3)`, whose offsets are the colex ranks of the pairs below `n`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub type Point = u8;

pub const MAX_POINTS: usize = 13;
/// `C(13, 3)`.
pub const MAX_TRIPLES: usize = 286;
/// `C(13, 4)`.
pub const MAX_QUADS: usize = 715;
const WORDS: usize = 9;

pub const fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r = 1;
    let mut i = 0;
    while i < k {
        r = r * (n - i) / (i + 1);
        i += 1;
    }
    r
}

/// Number of triples on `n` points.
pub const fn triples(n: usize) -> usize {
    binom(n, 3)
}

/// Colex rank of the pair `{x, y}`, `x < y`.
#[inline]
pub const fn pair_rank(x: usize, y: usize) -> usize {
    x + y * (y.wrapping_sub(1)) / 2
}

const PAIR_UNRANK: [[Point; 2]; 78] = {
    let mut t = [[0u8; 2]; 78];
    let mut y = 1;
    while y < MAX_POINTS {
        let mut x = 0;
        while x < y {
            t[pair_rank(x, y)] = [x as u8, y as u8];
            x += 1;
        }
        y += 1;
    }
    t
};

/// Inverse of [`pair_rank`].
#[inline]
pub fn pair_unrank(r: usize) -> (Point, Point) {
    let [x, y] = PAIR_UNRANK[r];
    (x, y)
}

const UNRANK: [[Point; 3]; MAX_TRIPLES] = {
    let mut t = [[0u8; 3]; MAX_TRIPLES];
    let mut k = 2;
    while k < MAX_POINTS {
        let mut j = 1;
        while j < k {
            let mut i = 0;
            while i < j {
                t[i + binom(j, 2) + binom(k, 3)] = [i as u8, j as u8, k as u8];
                i += 1;
            }
            j += 1;
        }
        k += 1;
    }
    t
};

// Rank lookup for any ordered distinct triple, indexed [a][b][c].
const RANK3: [[[u16; MAX_POINTS]; MAX_POINTS]; MAX_POINTS] = {
    let mut t = [[[u16::MAX; MAX_POINTS]; MAX_POINTS]; MAX_POINTS];
    let mut r = 0;
    while r < MAX_TRIPLES {
        let [i, j, k] = UNRANK[r];
        let (i, j, k) = (i as usize, j as usize, k as usize);
        t[i][j][k] = r as u16;
        t[i][k][j] = r as u16;
        t[j][i][k] = r as u16;
        t[j][k][i] = r as u16;
        t[k][i][j] = r as u16;
        t[k][j][i] = r as u16;
        r += 1;
    }
    t
};

/// The four triples of every quadruple, quadruples in colex order, so the
/// quadruples of an `n`-point set are the first `C(n,4)` rows.
pub(crate) const QUADS: [[u16; 4]; MAX_QUADS] = {
    let mut t = [[0u16; 4]; MAX_QUADS];
    let mut idx = 0;
    let mut d = 3;
    while d < MAX_POINTS {
        let mut c = 2;
        while c < d {
            let mut b = 1;
            while b < c {
                let mut a = 0;
                while a < b {
                    t[idx] = [
                        RANK3[a][b][c],
                        RANK3[a][b][d],
                        RANK3[a][c][d],
                        RANK3[b][c][d],
                    ];
                    idx += 1;
                    a += 1;
                }
                b += 1;
            }
            c += 1;
        }
        d += 1;
    }
    t
};

/// Rank of an unordered triple of distinct points, in any argument order.
#[inline]
pub(crate) fn rank_unordered(a: Point, b: Point, c: Point) -> usize {
    RANK3[a as usize][b as usize][c as usize] as usize
}

/// Colex index of a 3-subset of `{0..12}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TripleRank(u16);

impl TripleRank {
    pub fn new(r: usize) -> Result<Self> {
        if r < MAX_TRIPLES {
            Ok(Self(r as u16))
        } else {
            Err(Error::RankOutOfRange(r))
        }
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn points(self) -> (Point, Point, Point) {
        let [i, j, k] = UNRANK[self.index()];
        (i, j, k)
    }
}

pub fn triple_rank(i: Point, j: Point, k: Point) -> Result<TripleRank> {
    if !(i < j && j < k && (k as usize) < MAX_POINTS) {
        return Err(Error::BadTriple(i, j, k));
    }
    Ok(TripleRank(RANK3[i as usize][j as usize][k as usize]))
}

pub fn triple_unrank(r: usize) -> Result<(Point, Point, Point)> {
    Ok(TripleRank::new(r)?.points())
}

/// Fixed-width bitset over all 286 triple ranks, stored in 288 bits.
///
/// Ordering is numeric: bit `r` weighs `2^r`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct EdgeBits([u32; WORDS]);

impl EdgeBits {
    pub const EMPTY: Self = Self([0; WORDS]);

    /// All ranks below `width`.
    pub fn low_mask(width: usize) -> Self {
        let mut w = [0u32; WORDS];
        for (i, word) in w.iter_mut().enumerate() {
            let lo = i * 32;
            if width >= lo + 32 {
                *word = u32::MAX;
            } else if width > lo {
                *word = (1u32 << (width - lo)) - 1;
            }
        }
        Self(w)
    }

    #[inline]
    pub fn contains(&self, r: usize) -> bool {
        self.0[r >> 5] >> (r & 31) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, r: usize) {
        self.0[r >> 5] |= 1 << (r & 31);
    }

    #[inline]
    pub fn remove(&mut self, r: usize) {
        self.0[r >> 5] &= !(1 << (r & 31));
    }

    #[inline]
    pub fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn and(&self, other: &Self) -> Self {
        let mut w = self.0;
        for (a, b) in w.iter_mut().zip(other.0) {
            *a &= b;
        }
        Self(w)
    }

    pub fn or(&self, other: &Self) -> Self {
        let mut w = self.0;
        for (a, b) in w.iter_mut().zip(other.0) {
            *a |= b;
        }
        Self(w)
    }

    pub fn and_not(&self, other: &Self) -> Self {
        let mut w = self.0;
        for (a, b) in w.iter_mut().zip(other.0) {
            *a &= !b;
        }
        Self(w)
    }

    /// ORs `bits` in at rank offset `offset`.
    #[inline]
    pub fn or_shifted(&mut self, bits: u128, offset: usize) {
        let mut rest = bits;
        let mut pos = offset;
        while rest != 0 {
            let word = pos >> 5;
            let shift = pos & 31;
            let take = 32 - shift;
            let chunk = if take >= 128 {
                rest
            } else {
                rest & ((1u128 << take) - 1)
            };
            self.0[word] |= (chunk as u32) << shift;
            rest = if take >= 128 { 0 } else { rest >> take };
            pos += take;
        }
    }

    /// Extracts `width` bits starting at rank `offset`.
    pub fn extract(&self, offset: usize, width: usize) -> u128 {
        debug_assert!(width <= 128);
        let mut out = 0u128;
        for b in 0..width {
            if self.contains(offset + b) {
                out |= 1 << b;
            }
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * 32 + b)
                }
            })
        })
    }

    /// The low 128 bits, when nothing above them is set.
    pub fn as_u128(&self) -> Option<u128> {
        if self.0[4..].iter().any(|&w| w != 0) {
            return None;
        }
        Some(
            self.0[..4]
                .iter()
                .rev()
                .fold(0u128, |acc, &w| (acc << 32) | w as u128),
        )
    }

    pub fn from_u128(bits: u128) -> Self {
        let mut e = Self::EMPTY;
        e.or_shifted(bits, 0);
        e
    }
}

impl Ord for EdgeBits {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.iter().rev().cmp(other.0.iter().rev())
    }
}

impl PartialOrd for EdgeBits {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for EdgeBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A 3-uniform hypergraph on points `0..n`, `3 <= n <= 13`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Hypergraph {
    n: u8,
    edges: EdgeBits,
}

/// Per-point degree `d_v` and weighted sum `f_v = sum over edges {v,w,x} of d_v d_w d_x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeProfile {
    pub d: Vec<u32>,
    pub f: Vec<u64>,
}

fn check_n(n: usize) -> Result<()> {
    if (3..=MAX_POINTS).contains(&n) {
        Ok(())
    } else {
        Err(Error::BadPointCount(n))
    }
}

impl Hypergraph {
    pub fn empty(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self {
            n: n as u8,
            edges: EdgeBits::EMPTY,
        })
    }

    pub fn complete(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self {
            n: n as u8,
            edges: EdgeBits::low_mask(triples(n)),
        })
    }

    /// Builds from an edge bitset; bits at or above `C(n,3)` are rejected.
    pub fn from_bits(n: usize, edges: EdgeBits) -> Result<Self> {
        check_n(n)?;
        if !edges.and_not(&EdgeBits::low_mask(triples(n))).is_empty() {
            return Err(Error::Encoding(format!(
                "edge bits beyond C({n},3) = {}",
                triples(n)
            )));
        }
        Ok(Self { n: n as u8, edges })
    }

    /// Builds from a list of triples; each triple may be given in any order.
    pub fn from_triples<I>(n: usize, triples_iter: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Point, Point, Point)>,
    {
        let mut g = Self::empty(n)?;
        for (a, b, c) in triples_iter {
            let mut t = [a, b, c];
            t.sort_unstable();
            if t[2] as usize >= n {
                return Err(Error::PointOutOfRange {
                    point: t[2] as usize,
                    n,
                });
            }
            let r = triple_rank(t[0], t[1], t[2])?;
            g.edges.insert(r.index());
        }
        Ok(g)
    }

    #[inline]
    pub(crate) fn from_raw(n: usize, edges: EdgeBits) -> Self {
        debug_assert!((3..=MAX_POINTS).contains(&n));
        Self { n: n as u8, edges }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn bits(&self) -> &EdgeBits {
        &self.edges
    }

    /// Number of triples, `C(n,3)`.
    pub fn width(&self) -> usize {
        triples(self.n())
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.count()
    }

    #[inline]
    pub fn has_rank(&self, r: usize) -> bool {
        self.edges.contains(r)
    }

    /// Membership test for three distinct points in any order.
    #[inline]
    pub fn has_edge(&self, a: Point, b: Point, c: Point) -> bool {
        self.edges.contains(rank_unordered(a, b, c))
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point, Point)> + '_ {
        self.edges.iter().map(|r| TripleRank(r as u16).points())
    }

    pub fn is_good(&self) -> bool {
        QUADS[..binom(self.n(), 4)].iter().all(|q| {
            let c = q
                .iter()
                .filter(|&&r| self.edges.contains(r as usize))
                .count();
            (1..=3).contains(&c)
        })
    }

    /// Quadruples spanning 0 or 4 edges, in colex order.
    pub fn violating_quadruples(&self) -> Vec<[Point; 4]> {
        let mut out = Vec::new();
        let n = self.n;
        for d in 3..n {
            for c in 2..d {
                for b in 1..c {
                    for a in 0..b {
                        let c_in = [
                            self.has_edge(a, b, c),
                            self.has_edge(a, b, d),
                            self.has_edge(a, c, d),
                            self.has_edge(b, c, d),
                        ]
                        .iter()
                        .filter(|&&x| x)
                        .count();
                        if c_in == 0 || c_in == 4 {
                            out.push([a, b, c, d]);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn complement(&self) -> Self {
        Self {
            n: self.n,
            edges: EdgeBits::low_mask(self.width()).and_not(&self.edges),
        }
    }

    /// Removes point `v` and relabels the survivors `0..n-1` in order.
    pub fn delete_point(&self, v: usize) -> Result<Self> {
        let n = self.n();
        if n == 3 {
            return Err(Error::TooFewPoints);
        }
        if v >= n {
            return Err(Error::PointOutOfRange { point: v, n });
        }
        let shift = |x: Point| if (x as usize) > v { x - 1 } else { x };
        let mut edges = EdgeBits::EMPTY;
        for (a, b, c) in self.edges() {
            if [a, b, c].contains(&(v as Point)) {
                continue;
            }
            edges.insert(rank_unordered(shift(a), shift(b), shift(c)));
        }
        Ok(Self {
            n: self.n - 1,
            edges,
        })
    }

    /// The sub-hypergraph induced on the first `m` points.
    pub fn restrict(&self, m: usize) -> Result<Self> {
        check_n(m)?;
        if m > self.n() {
            return Err(Error::PointOutOfRange {
                point: m,
                n: self.n(),
            });
        }
        Ok(Self {
            n: m as u8,
            edges: self.edges.and(&EdgeBits::low_mask(triples(m))),
        })
    }

    /// Applies a relabelling: point `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[Point]) -> Result<Self> {
        validate_perm(perm, self.n())?;
        Ok(self.relabel_unchecked(perm))
    }

    pub(crate) fn relabel_unchecked(&self, perm: &[Point]) -> Self {
        let mut edges = EdgeBits::EMPTY;
        for (a, b, c) in self.edges() {
            edges.insert(rank_unordered(
                perm[a as usize],
                perm[b as usize],
                perm[c as usize],
            ));
        }
        Self { n: self.n, edges }
    }

    pub fn degrees(&self) -> [u32; MAX_POINTS] {
        let mut d = [0u32; MAX_POINTS];
        for (a, b, c) in self.edges() {
            d[a as usize] += 1;
            d[b as usize] += 1;
            d[c as usize] += 1;
        }
        d
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        let n = self.n();
        let d = self.degrees();
        let mut f = vec![0u64; n];
        for (a, b, c) in self.edges() {
            let p = d[a as usize] as u64 * d[b as usize] as u64 * d[c as usize] as u64;
            f[a as usize] += p;
            f[b as usize] += p;
            f[c as usize] += p;
        }
        DegreeProfile {
            d: d[..n].to_vec(),
            f,
        }
    }

    /// Text encoding `n e H`, with `H` the edge bitset in `ceil(C(n,3)/4)`
    /// uppercase hex digits, most significant nibble first.
    pub fn encode(&self) -> String {
        self.to_string()
    }

    /// Packs `n` and the edge bits into one integer when `C(n,3) <= 120`
    /// (`n <= 10`). Ordering of packed values matches `Ord` for equal `n`.
    pub fn pack(&self) -> Option<u128> {
        if self.n() > 10 {
            return None;
        }
        let bits = self.edges.as_u128()?;
        Some(bits | (self.n as u128) << 120)
    }

    pub fn unpack(key: u128) -> Self {
        let n = (key >> 120) as usize;
        Self::from_raw(n, EdgeBits::from_u128(key & ((1u128 << 120) - 1)))
    }
}

pub(crate) fn validate_perm(perm: &[Point], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::BadPermutation(format!(
            "length {} for {n} points",
            perm.len()
        )));
    }
    let mut seen = [false; MAX_POINTS];
    for &p in perm {
        if p as usize >= n || seen[p as usize] {
            return Err(Error::BadPermutation(format!(
                "{perm:?} is not a bijection"
            )));
        }
        seen[p as usize] = true;
    }
    Ok(())
}

impl Ord for Hypergraph {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.edges.cmp(&other.edges))
    }
}

impl PartialOrd for Hypergraph {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub(crate) fn hex_digits(n: usize) -> usize {
    triples(n).div_ceil(4)
}

impl fmt::Display for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} ", self.n, self.edge_count())?;
        for nib in (0..hex_digits(self.n())).rev() {
            let mut v = 0u8;
            for b in 0..4 {
                let r = nib * 4 + b;
                if r < MAX_TRIPLES && self.edges.contains(r) {
                    v |= 1 << b;
                }
            }
            write!(f, "{v:X}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hypergraph({self})")
    }
}

impl FromStr for Hypergraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split_whitespace();
        let (Some(n), Some(e), Some(hex), None) =
            (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(Error::Encoding(format!("expected `n e H`, got {s:?}")));
        };
        let n: usize = n
            .parse()
            .map_err(|_| Error::Encoding(format!("bad point count {n:?}")))?;
        check_n(n)?;
        let e: usize = e
            .parse()
            .map_err(|_| Error::Encoding(format!("bad edge count {e:?}")))?;
        let digits = hex_digits(n);
        if hex.len() != digits {
            return Err(Error::Encoding(format!(
                "expected {digits} hex digits for n={n}, got {}",
                hex.len()
            )));
        }
        let mut edges = EdgeBits::EMPTY;
        for (pos, ch) in hex.chars().enumerate() {
            if ch.is_ascii_lowercase() {
                return Err(Error::Encoding(format!("lowercase hex digit {ch:?}")));
            }
            let v = ch
                .to_digit(16)
                .ok_or_else(|| Error::Encoding(format!("bad hex digit {ch:?}")))?;
            let nib = digits - 1 - pos;
            for b in 0..4 {
                if v >> b & 1 == 1 {
                    let r = nib * 4 + b;
                    if r >= triples(n) {
                        return Err(Error::Encoding(format!("bit {r} set beyond C({n},3)")));
                    }
                    edges.insert(r);
                }
            }
        }
        let g = Self::from_bits(n, edges)?;
        if g.edge_count() != e {
            return Err(Error::Encoding(format!(
                "edge count {e} disagrees with bitset popcount {}",
                g.edge_count()
            )));
        }
        Ok(g)
    }
}
