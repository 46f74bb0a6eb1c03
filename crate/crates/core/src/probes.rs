//! Constructions and colourings near the extremal order.
//!
//! Points are written as letters in two alphabets. The 12-point construction
//! uses `abcdefABCDEF` (a..f are 0..5, A..F are 6..11). Colourings of 13
//! points use `a..m` for 0..12.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::extension::{extend_chain, is_good_except, ExtensionOptions, PathBounds};
use crate::hypergraph::{
    rank_unordered, triples, EdgeBits, Hypergraph, Point, TripleRank, MAX_POINTS,
};
use crate::interval::OrderStrategy;

/// Letters of the 12-point construction, by index.
pub const ISBELL_ALPHABET: &str = "abcdefABCDEF";
/// Letters of 13-point colourings, by index.
pub const COLOURING_ALPHABET: &str = "abcdefghijklm";

pub const DEFAULT_GROUP_CAP: usize = 1_000_000;

const ISBELL_GENERATORS: [&str; 3] = ["(cd)(ef)(CD)(EF)", "(bc)(de)(BC)(DE)", "(ab)(ef)(AB)(EF)"];
const ISBELL_SEEDS: [&str; 5] = ["abe", "ABE", "abC", "aAB", "cAB"];
const ISBELL_COMPLEMENT: &str = "(aD)(bC)(cB)(dA)(eF)(fE)";

fn letter_index(alphabet: &str, ch: char) -> Option<Point> {
    alphabet.chars().position(|c| c == ch).map(|i| i as Point)
}

/// A bijection of `0..n`; point `v` goes to `images[v]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointPermutation {
    images: Vec<Point>,
}

impl PointPermutation {
    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n as Point).collect(),
        }
    }

    pub fn new(images: Vec<Point>) -> Result<Self> {
        let n = images.len();
        if n > MAX_POINTS {
            return Err(Error::BadPermutation(format!("{n} points, at most 13")));
        }
        let mut seen = vec![false; n];
        for &p in &images {
            let p = p as usize;
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::BadPermutation(format!(
                    "{images:?} is not a bijection"
                )));
            }
        }
        Ok(Self { images })
    }

    /// Parses cycle notation such as `(ab)(cd)` over `alphabet`; the
    /// permutation acts on as many points as the alphabet has letters.
    pub fn from_cycles(text: &str, alphabet: &str) -> Result<Self> {
        let n = alphabet.chars().count();
        let mut images: Vec<Point> = (0..n as Point).collect();
        let mut moved = vec![false; n];
        let bad = |m: &str| Error::BadPermutation(format!("{text:?}: {m}"));
        let mut rest = text.trim();
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(|| bad("expected '('"))?;
            let end = body.find(')').ok_or_else(|| bad("unclosed cycle"))?;
            let cycle: Vec<Point> = body[..end]
                .chars()
                .map(|c| letter_index(alphabet, c).ok_or_else(|| bad("unknown letter")))
                .collect::<Result<_>>()?;
            for &p in &cycle {
                if std::mem::replace(&mut moved[p as usize], true) {
                    return Err(bad("cycles are not disjoint"));
                }
            }
            for (i, &p) in cycle.iter().enumerate() {
                images[p as usize] = cycle[(i + 1) % cycle.len()];
            }
            rest = body[end + 1..].trim_start();
        }
        Ok(Self { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[Point] {
        &self.images
    }

    pub fn apply(&self, v: Point) -> Point {
        self.images[v as usize]
    }

    /// `self` after `other`: `v` goes to `self(other(v))`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            images: other.images.iter().map(|&v| self.apply(v)).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.len()];
        for (v, &w) in self.images.iter().enumerate() {
            images[w as usize] = v as Point;
        }
        Self { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(v, &w)| v == w as usize)
    }

    pub fn apply_to(&self, g: &Hypergraph) -> Result<Hypergraph> {
        g.relabel(&self.images)
    }
}

impl fmt::Debug for PointPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PointPermutation{:?}", self.images)
    }
}

/// The group generated by `generators` acting on `0..n`.
///
/// The identity comes first; the rest follow in breadth-first order.
pub fn generate_group(
    n: usize,
    generators: &[PointPermutation],
    cap: usize,
) -> Result<Vec<PointPermutation>> {
    if let Some(g) = generators.iter().find(|g| g.len() != n) {
        return Err(Error::BadPermutation(format!(
            "generator on {} points, expected {n}",
            g.len()
        )));
    }
    let id = PointPermutation::identity(n);
    let mut seen = HashSet::from([id.clone()]);
    let mut out = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in generators {
            let y = g.compose(&x);
            if seen.insert(y.clone()) {
                if out.len() == cap {
                    return Err(Error::GroupCapExceeded(cap));
                }
                out.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(out)
}

/// Some element maps every ordered pair of distinct points of `orbit` to every other.
pub fn is_two_transitive(group: &[PointPermutation], orbit: &[Point]) -> bool {
    let Some(&(a, b)) = orbit
        .iter()
        .flat_map(|&a| orbit.iter().map(move |&b| (a, b)))
        .find(|(a, b)| a != b)
        .as_ref()
    else {
        return true;
    };
    let reached: HashSet<(Point, Point)> = group.iter().map(|g| (g.apply(a), g.apply(b))).collect();
    orbit
        .iter()
        .all(|&x| orbit.iter().all(|&y| x == y || reached.contains(&(x, y))))
}

/// The image of the triple `t` under every element of `group`.
pub fn triple_orbit(group: &[PointPermutation], t: TripleRank) -> EdgeBits {
    let (a, b, c) = t.points();
    let mut out = EdgeBits::EMPTY;
    for g in group {
        out.insert(rank_unordered(g.apply(a), g.apply(b), g.apply(c)));
    }
    out
}

fn parse_word(word: &str, alphabet: &str) -> Result<TripleRank> {
    let pts: Vec<Point> = word
        .chars()
        .map(|c| letter_index(alphabet, c))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Colouring(format!("unknown letter in {word:?}")))?;
    match pts[..] {
        [a, b, c] if a != b && a != c && b != c => TripleRank::new(rank_unordered(a, b, c)),
        _ => Err(Error::Colouring(format!(
            "{word:?} is not three distinct letters"
        ))),
    }
}

fn word_of(t: TripleRank, alphabet: &str) -> String {
    let (a, b, c) = t.points();
    let letters: Vec<char> = alphabet.chars().collect();
    [a, b, c].iter().map(|&p| letters[p as usize]).collect()
}

pub fn isbell_generators() -> Vec<PointPermutation> {
    ISBELL_GENERATORS
        .iter()
        .map(|c| PointPermutation::from_cycles(c, ISBELL_ALPHABET).expect("fixed cycles"))
        .collect()
}

/// The relabelling taking the construction onto its complement.
pub fn isbell_complement_map() -> PointPermutation {
    PointPermutation::from_cycles(ISBELL_COMPLEMENT, ISBELL_ALPHABET).expect("fixed cycles")
}

/// Orbit of each seed edge under the generated group, in seed order.
pub fn isbell_orbits() -> Vec<EdgeBits> {
    let group =
        generate_group(12, &isbell_generators(), DEFAULT_GROUP_CAP).expect("group of order 60");
    ISBELL_SEEDS
        .iter()
        .map(|w| triple_orbit(&group, parse_word(w, ISBELL_ALPHABET).expect("fixed word")))
        .collect()
}

/// The 12-point good hypergraph with 110 edges and automorphism group of order 60.
pub fn build_isbell() -> Hypergraph {
    let edges = isbell_orbits()
        .iter()
        .fold(EdgeBits::EMPTY, |acc, o| acc.or(o));
    Hypergraph::from_bits(12, edges).expect("edges lie on 12 points")
}

/// A two-colouring of the triples of `0..n` with some triples left uncoloured.
/// Colour 1 is the edge set; every other non-omitted triple has colour 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialColouring {
    n: usize,
    colour_one: EdgeBits,
    omitted: EdgeBits,
}

impl PartialColouring {
    pub fn new(n: usize, colour_one: EdgeBits, omitted: EdgeBits) -> Result<Self> {
        if !(3..=MAX_POINTS).contains(&n) {
            return Err(Error::BadPointCount(n));
        }
        let outside = EdgeBits::low_mask(triples(n));
        if !colour_one.or(&omitted).and_not(&outside).is_empty() {
            return Err(Error::Colouring(format!("triples beyond {n} points")));
        }
        if !colour_one.and(&omitted).is_empty() {
            return Err(Error::Colouring(
                "a triple is both coloured and omitted".into(),
            ));
        }
        Ok(Self {
            n,
            colour_one,
            omitted,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn colour_one(&self) -> &EdgeBits {
        &self.colour_one
    }

    pub fn omitted(&self) -> &EdgeBits {
        &self.omitted
    }

    /// The colour-1 triples as a hypergraph.
    pub fn graph(&self) -> Hypergraph {
        Hypergraph::from_bits(self.n, self.colour_one).expect("validated on construction")
    }

    /// The colouring induced on the first `m` points.
    pub fn restrict(&self, m: usize) -> Result<Self> {
        if !(3..=self.n).contains(&m) {
            return Err(Error::BadPointCount(m));
        }
        let mask = EdgeBits::low_mask(triples(m));
        Self::new(m, self.colour_one.and(&mask), self.omitted.and(&mask))
    }

    /// Colours every omitted triple, those in `extra` with colour 1.
    pub fn recoloured(&self, extra: &EdgeBits) -> Result<Hypergraph> {
        if !extra.and_not(&self.omitted).is_empty() {
            return Err(Error::Colouring(
                "recolouring a triple that is not omitted".into(),
            ));
        }
        Hypergraph::from_bits(self.n, self.colour_one.or(extra))
    }
}

impl fmt::Display for PartialColouring {
    /// Words in rank order, eight per line, then the omitted trailer.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let words: Vec<String> = self
            .colour_one
            .iter()
            .map(|r| word_of(TripleRank::new(r).expect("stored rank"), COLOURING_ALPHABET))
            .collect();
        for line in words.chunks(8) {
            writeln!(f, "{}", line.join(" "))?;
        }
        let omitted: Vec<String> = self
            .omitted
            .iter()
            .map(|r| word_of(TripleRank::new(r).expect("stored rank"), COLOURING_ALPHABET))
            .collect();
        if omitted.is_empty() {
            writeln!(f, "Omitted edges:")
        } else {
            writeln!(f, "Omitted edges: {}", omitted.join(" "))
        }
    }
}

/// Parses listed colour-1 words followed by an `Omitted edges:` line.
/// The point count is 13 unless `n` says otherwise.
pub fn parse_colouring_n(text: &str, n: usize) -> Result<PartialColouring> {
    let alphabet = &COLOURING_ALPHABET[..n.min(13)];
    let mut colour_one = EdgeBits::EMPTY;
    let mut omitted = EdgeBits::EMPTY;
    let mut in_trailer = false;
    for (i, line) in text.lines().enumerate() {
        let wrap = |e: Error| Error::Line {
            line: i + 1,
            message: e.to_string(),
        };
        let mut body = line.trim();
        if let Some(rest) = body.strip_prefix("Omitted edges:") {
            if in_trailer {
                return Err(wrap(Error::Colouring("second trailer".into())));
            }
            in_trailer = true;
            body = rest;
        }
        for word in body.split_whitespace() {
            let t = parse_word(word, alphabet).map_err(wrap)?;
            if colour_one.contains(t.index()) || omitted.contains(t.index()) {
                return Err(wrap(Error::Colouring(format!("{word} listed twice"))));
            }
            if in_trailer {
                omitted.insert(t.index());
            } else {
                colour_one.insert(t.index());
            }
        }
    }
    PartialColouring::new(n, colour_one, omitted)
}

pub fn parse_colouring(text: &str) -> Result<PartialColouring> {
    parse_colouring_n(text, 13)
}

/// Every quadruple whose four triples are all coloured has 1 to 3 colour-1 triples.
pub fn verify_partial_colouring(pc: &PartialColouring) -> bool {
    is_good_except(&pc.graph(), &pc.omitted)
}

/// Colouring the omitted triples in every possible way gives a bad
/// colouring each time.
pub fn every_completion_bad(pc: &PartialColouring) -> bool {
    let omitted: Vec<usize> = pc.omitted.iter().collect();
    (0u32..1 << omitted.len()).all(|mask| {
        let mut extra = EdgeBits::EMPTY;
        for (i, &r) in omitted.iter().enumerate() {
            if mask >> i & 1 == 1 {
                extra.insert(r);
            }
        }
        !pc.recoloured(&extra).expect("subset of omitted").is_good()
    })
}

/// An omitted-triple search.
#[derive(Clone, Debug)]
pub struct MinusEdgesSearch {
    pub n: usize,
    pub omitted: Vec<TripleRank>,
    /// Start from this colouring of the first points instead of from 3 points.
    pub seed: Option<Hypergraph>,
    pub cap: usize,
    pub order: OrderStrategy,
}

impl MinusEdgesSearch {
    pub fn new(omitted: Vec<TripleRank>, cap: usize) -> Self {
        Self {
            n: 13,
            omitted,
            seed: None,
            cap,
            order: OrderStrategy::default(),
        }
    }

    fn validate(&self) -> Result<EdgeBits> {
        if self.omitted.is_empty() || self.omitted.len() > 3 {
            return Err(Error::Omitted(format!(
                "{} omitted triples, expected 1 to 3",
                self.omitted.len()
            )));
        }
        if !(3..=MAX_POINTS).contains(&self.n) {
            return Err(Error::BadPointCount(self.n));
        }
        let mut bits = EdgeBits::EMPTY;
        for t in &self.omitted {
            if t.index() >= triples(self.n) {
                return Err(Error::Omitted(format!(
                    "{t:?} lies outside {} points",
                    self.n
                )));
            }
            if bits.contains(t.index()) {
                return Err(Error::Omitted(format!("{t:?} repeated")));
            }
            bits.insert(t.index());
        }
        Ok(bits)
    }

    /// Omitted triples that are pairwise disjoint; the open case.
    pub fn omitted_disjoint(&self) -> bool {
        let sets: Vec<[Point; 3]> = self
            .omitted
            .iter()
            .map(|t| {
                let (a, b, c) = t.points();
                [a, b, c]
            })
            .collect();
        sets.len() > 1
            && sets.iter().enumerate().all(|(i, s)| {
                sets[i + 1..]
                    .iter()
                    .all(|o| s.iter().all(|p| !o.contains(p)))
            })
    }

    /// Colourings of `0..n` minus the omitted triples, up to the cap.
    /// Isomorphic colourings are not merged.
    pub fn run(&self) -> Result<Vec<PartialColouring>> {
        let omitted = self.validate()?;
        let opts = ExtensionOptions {
            order: self.order,
            filter: false,
            reuse: true,
            omitted,
        };
        let seeds = match &self.seed {
            Some(s) => {
                if s.n() > self.n {
                    return Err(Error::BadPointCount(s.n()));
                }
                vec![*s]
            }
            None => {
                let mut v = vec![Hypergraph::empty(3)?];
                if !omitted.contains(0) {
                    v.push(Hypergraph::from_triples(3, [(0, 1, 2)])?);
                }
                v
            }
        };
        let mut out = Vec::new();
        if self.cap == 0 {
            return Ok(out);
        }
        for seed in seeds {
            let bounds = PathBounds::unbounded(seed.n(), self.n)?;
            let flow = extend_chain(&seed, &bounds, &opts, |h| {
                out.push(
                    PartialColouring::new(self.n, *h.bits(), omitted)
                        .expect("search respects omissions"),
                );
                if out.len() >= self.cap {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            })?;
            if flow.is_break() {
                break;
            }
        }
        Ok(out)
    }
}

/// [`MinusEdgesSearch`] on 13 points from scratch.
pub fn search_minus_edges(omitted: &[TripleRank], cap: usize) -> Result<Vec<PartialColouring>> {
    MinusEdgesSearch::new(omitted.to_vec(), cap).run()
}

/// Parses a comma- or space-separated list of 13-point words such as `abc,ade`.
pub fn parse_triple_list(text: &str) -> Result<Vec<TripleRank>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|w| !w.is_empty())
        .map(|w| parse_word(w, COLOURING_ALPHABET))
        .collect()
}
