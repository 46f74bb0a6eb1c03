//! Canonical labelling, automorphism groups and isomorph rejection.
//!
//! The search is individualisation-refinement. Each point starts coloured by
//! `(d_v, f_v, sorted co-degree row)`, colours are refined until every point
//! in a cell sees the same multiset of coloured pairs through its edges, and
//! the remaining ties are broken by individualising points of the smallest
//! cell. Every leaf of the search tree is a labelling; the canonical form is
//! the numerically smallest relabelled edge bitset over all leaves.
//!
//! Leaves that produce the same bitset yield automorphisms. Those are used to
//! skip children equivalent under the pointwise stabiliser of the current
//! path, and the group order is the product, over the nodes of the first
//! path, of the orbit length of the first child under that stabiliser.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::hypergraph::{rank_unordered, EdgeBits, Hypergraph, Point, MAX_POINTS};

const N: usize = MAX_POINTS;
const PAIR_SLOTS: usize = N * (N + 1) / 2;

/// The relabelled representative of an isomorphism class.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm(Hypergraph);

impl CanonicalForm {
    /// Wraps a hypergraph already known to be in canonical form.
    pub(crate) fn assume_canonical(g: Hypergraph) -> Self {
        Self(g)
    }

    pub fn graph(&self) -> &Hypergraph {
        &self.0
    }

    pub fn into_graph(self) -> Hypergraph {
        self.0
    }

    /// The canonical text encoding, as bytes.
    pub fn encoding(&self) -> Vec<u8> {
        self.0.encode().into_bytes()
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalForm({})", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutInfo {
    pub order: u64,
    pub orbit_count: usize,
    /// Point orbits, each sorted, ordered by least element.
    pub orbits: Vec<Vec<Point>>,
}

/// Everything the labelling search produces.
#[derive(Clone, Debug)]
pub struct Canonical {
    pub form: CanonicalForm,
    /// `labelling[v]` is the canonical label of point `v`.
    pub labelling: Vec<Point>,
    pub aut: AutInfo,
    /// Automorphisms found during the search; they generate the group.
    pub generators: Vec<Vec<Point>>,
}

pub fn canonicalize(g: &Hypergraph) -> Canonical {
    let mut s = Search::new(g);
    s.run();
    let n = g.n();
    let best = s.best.expect("search visits at least one leaf");
    let orbits = orbits_of(n, s.autos.iter());
    Canonical {
        form: CanonicalForm(Hypergraph::from_raw(n, best.bits)),
        labelling: best.lab[..n].to_vec(),
        aut: AutInfo {
            order: s.order,
            orbit_count: orbits.len(),
            orbits,
        },
        generators: s.autos.iter().map(|a| a[..n].to_vec()).collect(),
    }
}

pub fn canonical_form(g: &Hypergraph) -> CanonicalForm {
    canonicalize(g).form
}

pub fn aut_info(g: &Hypergraph) -> AutInfo {
    canonicalize(g).aut
}

pub fn is_self_complementary(g: &Hypergraph) -> bool {
    g.edge_count() * 2 == g.width() && canonical_form(g) == canonical_form(&g.complement())
}

/// One entry per isomorphism class with its number of occurrences.
pub fn dedup<I>(graphs: I) -> BTreeMap<CanonicalForm, u64>
where
    I: IntoIterator<Item = Hypergraph>,
{
    let mut map: HashMap<CanonicalForm, u64> = HashMap::new();
    for g in graphs {
        *map.entry(canonical_form(&g)).or_default() += 1;
    }
    map.into_iter().collect()
}

/// A set of canonical representatives sized for millions of classes.
///
/// Forms on at most 10 points are held as packed 128-bit keys. Insertion is
/// append-only; duplicates are removed by periodic sort-and-dedup passes.
#[derive(Clone, Debug, Default)]
pub struct ClassSet {
    packed: Vec<u128>,
    packed_clean: usize,
    wide: Vec<Hypergraph>,
    wide_clean: usize,
}

impl ClassSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, form: CanonicalForm) {
        match form.0.pack() {
            Some(k) => self.packed.push(k),
            None => self.wide.push(form.0),
        }
        self.maybe_compact();
    }

    pub fn extend<I: IntoIterator<Item = CanonicalForm>>(&mut self, forms: I) {
        for f in forms {
            self.insert(f);
        }
    }

    pub fn merge(&mut self, other: ClassSet) {
        self.packed.extend(other.packed);
        self.wide.extend(other.wide);
        self.maybe_compact();
    }

    fn maybe_compact(&mut self) {
        if self.packed.len() > 2 * self.packed_clean + (1 << 20) {
            self.packed.sort_unstable();
            self.packed.dedup();
            self.packed_clean = self.packed.len();
        }
        if self.wide.len() > 2 * self.wide_clean + (1 << 18) {
            self.wide.sort_unstable();
            self.wide.dedup();
            self.wide_clean = self.wide.len();
        }
    }

    /// Number of distinct classes.
    pub fn len(&mut self) -> usize {
        self.compact();
        self.packed.len() + self.wide.len()
    }

    pub fn is_empty(&self) -> bool {
        self.packed.is_empty() && self.wide.is_empty()
    }

    fn compact(&mut self) {
        self.packed.sort_unstable();
        self.packed.dedup();
        self.packed_clean = self.packed.len();
        self.wide.sort_unstable();
        self.wide.dedup();
        self.wide_clean = self.wide.len();
    }

    /// The distinct representatives in `Hypergraph` order.
    pub fn into_sorted(mut self) -> Vec<Hypergraph> {
        self.compact();
        let mut out: Vec<Hypergraph> = self.packed.into_iter().map(Hypergraph::unpack).collect();
        out.extend(self.wide);
        out.sort_unstable();
        out
    }
}

#[derive(Clone, Copy)]
struct Leaf {
    lab: [Point; N],
    bits: EdgeBits,
}

enum Flow {
    Continue,
    /// Unwind to the first-path node at this depth.
    BackTo(usize),
}

struct Search {
    n: usize,
    edges: Vec<[u8; 3]>,
    first: Option<Leaf>,
    best: Option<Leaf>,
    autos: Vec<[Point; N]>,
    order: u64,
}

impl Search {
    fn new(g: &Hypergraph) -> Self {
        Self {
            n: g.n(),
            edges: g.edges().map(|(a, b, c)| [a, b, c]).collect(),
            first: None,
            best: None,
            autos: Vec::new(),
            order: 1,
        }
    }

    fn run(&mut self) {
        let (mut col, k) = self.initial_colouring();
        let k = self.refine(&mut col, k);
        let mut seq = Vec::with_capacity(self.n);
        self.search(col, k, &mut seq, true, 0);
    }

    fn initial_colouring(&self) -> ([u8; N], usize) {
        let n = self.n;
        let mut codeg = [[0u8; N]; N];
        let mut d = [0u32; N];
        for &[a, b, c] in &self.edges {
            let (a, b, c) = (a as usize, b as usize, c as usize);
            d[a] += 1;
            d[b] += 1;
            d[c] += 1;
            for (x, y) in [(a, b), (a, c), (b, c)] {
                codeg[x][y] += 1;
                codeg[y][x] += 1;
            }
        }
        let mut f = [0u64; N];
        for &[a, b, c] in &self.edges {
            let p = d[a as usize] as u64 * d[b as usize] as u64 * d[c as usize] as u64;
            f[a as usize] += p;
            f[b as usize] += p;
            f[c as usize] += p;
        }
        for row in codeg.iter_mut().take(n) {
            row[..n].sort_unstable();
        }
        let key = |v: usize| (d[v], f[v], &codeg[v][..n]);
        let mut verts: Vec<usize> = (0..n).collect();
        verts.sort_unstable_by(|&u, &v| key(u).cmp(&key(v)));
        let mut col = [0u8; N];
        let mut c = 0u8;
        for i in 0..n {
            if i > 0 && key(verts[i]) != key(verts[i - 1]) {
                c += 1;
            }
            col[verts[i]] = c;
        }
        (col, c as usize + 1)
    }

    /// Refines `col` (with `k` cells) until stable; returns the new cell count.
    fn refine(&self, col: &mut [u8; N], mut k: usize) -> usize {
        let n = self.n;
        let mut sig = [[0u8; PAIR_SLOTS]; N];
        let mut verts = [0u8; N];
        loop {
            if k == n {
                return k;
            }
            let m = k * (k + 1) / 2;
            for row in sig.iter_mut().take(n) {
                row[..m].fill(0);
            }
            for &[a, b, c] in &self.edges {
                let (a, b, c) = (a as usize, b as usize, c as usize);
                let (ca, cb, cc) = (col[a] as usize, col[b] as usize, col[c] as usize);
                sig[a][slot(cb, cc)] += 1;
                sig[b][slot(ca, cc)] += 1;
                sig[c][slot(ca, cb)] += 1;
            }
            for (i, v) in verts.iter_mut().enumerate().take(n) {
                *v = i as u8;
            }
            let cmp = |u: &u8, v: &u8| {
                let (u, v) = (*u as usize, *v as usize);
                col[u]
                    .cmp(&col[v])
                    .then_with(|| sig[u][..m].cmp(&sig[v][..m]))
            };
            verts[..n].sort_unstable_by(cmp);
            let mut new = [0u8; N];
            let mut c = 0u8;
            for i in 0..n {
                if i > 0 && cmp(&verts[i - 1], &verts[i]).is_ne() {
                    c += 1;
                }
                new[verts[i] as usize] = c;
            }
            *col = new;
            let nk = c as usize + 1;
            if nk == k {
                return k;
            }
            k = nk;
        }
    }

    fn individualise(&self, col: &[u8; N], w: usize) -> [u8; N] {
        let cw = col[w];
        let mut out = [0u8; N];
        for v in 0..self.n {
            // cells after w's shift up by one; w sorts before its cell mates
            out[v] = if col[v] > cw || (col[v] == cw && v != w) {
                col[v] + 1
            } else {
                col[v]
            };
        }
        out
    }

    fn target_cell(&self, col: &[u8; N], k: usize) -> Vec<usize> {
        let mut size = [0usize; N];
        for v in 0..self.n {
            size[col[v] as usize] += 1;
        }
        let target = (0..k)
            .filter(|&c| size[c] > 1)
            .min_by_key(|&c| (size[c], c))
            .expect("partition is not discrete");
        (0..self.n).filter(|&v| col[v] as usize == target).collect()
    }

    fn search(
        &mut self,
        col: [u8; N],
        k: usize,
        seq: &mut Vec<u8>,
        on_first: bool,
        anchor: usize,
    ) -> Flow {
        if k == self.n {
            return self.leaf(&col, anchor);
        }
        let depth = seq.len();
        let cell = self.target_cell(&col, k);
        let mut explored: Vec<usize> = Vec::with_capacity(cell.len());
        for &w in &cell {
            if !explored.is_empty() && self.equivalent_to_explored(w, &explored, seq) {
                continue;
            }
            explored.push(w);
            let child_first = on_first && explored.len() == 1;
            let child_anchor = if on_first { depth } else { anchor };
            let mut child = self.individualise(&col, w);
            let ck = self.refine(&mut child, k + 1);
            seq.push(w as u8);
            let flow = self.search(child, ck, seq, child_first, child_anchor);
            seq.pop();
            if let Flow::BackTo(d) = flow {
                if d < depth {
                    return flow;
                }
            }
        }
        if on_first {
            let orbit = self.orbit_len(explored[0], seq);
            self.order *= orbit as u64;
        }
        Flow::Continue
    }

    fn leaf(&mut self, col: &[u8; N], anchor: usize) -> Flow {
        let mut bits = EdgeBits::EMPTY;
        for &[a, b, c] in &self.edges {
            bits.insert(rank_unordered(
                col[a as usize],
                col[b as usize],
                col[c as usize],
            ));
        }
        let leaf = Leaf { lab: *col, bits };
        let Some(first) = self.first else {
            self.first = Some(leaf);
            self.best = Some(leaf);
            return Flow::Continue;
        };
        if bits == first.bits {
            self.record_auto(&first, &leaf);
            return Flow::BackTo(anchor);
        }
        let best = self.best.expect("best set with first");
        match bits.cmp(&best.bits) {
            std::cmp::Ordering::Less => self.best = Some(leaf),
            std::cmp::Ordering::Equal => self.record_auto(&best, &leaf),
            std::cmp::Ordering::Greater => {}
        }
        Flow::Continue
    }

    /// Records `v -> other^-1(this(v))`.
    fn record_auto(&mut self, this: &Leaf, other: &Leaf) {
        let mut inv = [0u8; N];
        for v in 0..self.n {
            inv[other.lab[v] as usize] = v as u8;
        }
        let mut gamma = [0u8; N];
        for v in 0..self.n {
            gamma[v] = inv[this.lab[v] as usize];
        }
        self.autos.push(gamma);
    }

    fn stabiliser<'a>(&'a self, seq: &'a [u8]) -> impl Iterator<Item = &'a [Point; N]> + 'a {
        self.autos
            .iter()
            .filter(move |a| seq.iter().all(|&p| a[p as usize] == p))
    }

    fn equivalent_to_explored(&self, w: usize, explored: &[usize], seq: &[u8]) -> bool {
        if self.autos.is_empty() {
            return false;
        }
        let mut uf = UnionFind::new(self.n);
        for a in self.stabiliser(seq) {
            for v in 0..self.n {
                uf.union(v, a[v] as usize);
            }
        }
        let rw = uf.find(w);
        explored.iter().any(|&u| uf.find(u) == rw)
    }

    fn orbit_len(&self, v: usize, seq: &[u8]) -> usize {
        let mut uf = UnionFind::new(self.n);
        for a in self.stabiliser(seq) {
            for x in 0..self.n {
                uf.union(x, a[x] as usize);
            }
        }
        let r = uf.find(v);
        (0..self.n).filter(|&x| uf.find(x) == r).count()
    }
}

#[inline]
fn slot(a: usize, b: usize) -> usize {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    b * (b + 1) / 2 + a
}

struct UnionFind {
    parent: [u8; N],
}

impl UnionFind {
    fn new(n: usize) -> Self {
        let mut parent = [0u8; N];
        for (i, p) in parent.iter_mut().enumerate().take(n) {
            *p = i as u8;
        }
        Self { parent }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let p = self.parent[x] as usize;
            self.parent[x] = self.parent[p];
            x = p;
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo as u8;
        }
    }
}

fn orbits_of<'a, I>(n: usize, autos: I) -> Vec<Vec<Point>>
where
    I: Iterator<Item = &'a [Point; N]>,
{
    let mut uf = UnionFind::new(n);
    for a in autos {
        for v in 0..n {
            uf.union(v, a[v] as usize);
        }
    }
    let mut groups: BTreeMap<usize, Vec<Point>> = BTreeMap::new();
    for v in 0..n {
        groups.entry(uf.find(v)).or_default().push(v as Point);
    }
    groups.into_values().collect()
}
