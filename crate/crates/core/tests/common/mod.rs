//! Brute-force oracles shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use r443::canonical::canonical_form;
use r443::extension::{extend_chain, path_bounds, ExtensionOptions};
use r443::hypergraph::{EdgeBits, Hypergraph};
use r443::interval::{CandidateSet, Interval, Polarity, QuadConstraint};
use r443::Point;
use rand::seq::SliceRandom;
use rand::Rng;

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<Point>> {
    let mut p: Vec<Point> = (0..n as Point).collect();
    let mut out = vec![p.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
        out.push(p.clone());
    }
}

fn local_rank(mut t: [Point; 3]) -> u32 {
    t.sort();
    let [a, b, c] = t.map(u32::from);
    a + b * (b.saturating_sub(1)) / 2 + c * c.saturating_sub(1) * c.saturating_sub(2) / 6
}

/// Relabelled edge set as a mask over its own colex ranking (n <= 7).
fn relabelled(g: &Hypergraph, perm: &[Point]) -> u64 {
    g.edges()
        .map(|(a, b, c)| 1u64 << local_rank([perm[a as usize], perm[b as usize], perm[c as usize]]))
        .fold(0, |m, x| m | x)
}

fn edge_set(g: &Hypergraph) -> u64 {
    g.edges()
        .map(|(a, b, c)| 1u64 << local_rank([a, b, c]))
        .fold(0, |m, x| m | x)
}

/// The least relabelled edge mask over all `n!` relabellings.
pub fn brute_min_form(g: &Hypergraph, perms: &[Vec<Point>]) -> u64 {
    perms.iter().map(|p| relabelled(g, p)).min().unwrap()
}

/// Automorphism count and number of point orbits.
pub fn brute_aut(g: &Hypergraph, perms: &[Vec<Point>]) -> (u64, usize) {
    let own = edge_set(g);
    let auts: Vec<&Vec<Point>> = perms.iter().filter(|p| relabelled(g, p) == own).collect();
    let n = g.n();
    let mut orbit_of: Vec<usize> = (0..n).collect();
    for v in 0..n {
        for a in &auts {
            let w = a[v] as usize;
            let (x, y) = (orbit_of[v], orbit_of[w]);
            if x != y {
                let (lo, hi) = (x.min(y), x.max(y));
                orbit_of
                    .iter_mut()
                    .filter(|o| **o == hi)
                    .for_each(|o| *o = lo);
            }
        }
    }
    let orbits: BTreeSet<usize> = orbit_of.into_iter().collect();
    (auts.len() as u64, orbits.len())
}

pub fn brute_isomorphic(g: &Hypergraph, h: &Hypergraph, perms: &[Vec<Point>]) -> bool {
    let target = edge_set(h);
    g.n() == h.n()
        && g.edge_count() == h.edge_count()
        && perms.iter().any(|p| relabelled(g, p) == target)
}

pub fn brute_self_complementary(g: &Hypergraph, perms: &[Vec<Point>]) -> bool {
    brute_isomorphic(g, &g.complement(), perms)
}

/// Goodness by scanning 4-sets with `has_edge`.
pub fn naive_is_good(g: &Hypergraph) -> bool {
    let n = g.n() as Point;
    for d in 3..n {
        for c in 2..d {
            for b in 1..c {
                for a in 0..b {
                    let k = [
                        g.has_edge(a, b, c),
                        g.has_edge(a, b, d),
                        g.has_edge(a, c, d),
                        g.has_edge(b, c, d),
                    ]
                    .iter()
                    .filter(|&&x| x)
                    .count();
                    if k == 0 || k == 4 {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// `(d, f)` per point, from the edge list.
pub fn naive_degrees(g: &Hypergraph) -> (Vec<u64>, Vec<u64>) {
    let n = g.n();
    let edges: Vec<[usize; 3]> = g
        .edges()
        .map(|(a, b, c)| [a as usize, b as usize, c as usize])
        .collect();
    let d: Vec<u64> = (0..n)
        .map(|v| edges.iter().filter(|e| e.contains(&v)).count() as u64)
        .collect();
    let f: Vec<u64> = (0..n)
        .map(|v| {
            let s: u64 = edges
                .iter()
                .filter(|e| e.contains(&v))
                .map(|e| {
                    e.iter()
                        .filter(|&&w| w != v)
                        .map(|&w| d[w])
                        .product::<u64>()
                })
                .sum();
            d[v] * s
        })
        .collect();
    (d, f)
}

pub fn naive_filter(g: &Hypergraph, v: usize) -> bool {
    let (d, f) = naive_degrees(g);
    let dmax = *d.iter().max().unwrap();
    let fmax = (0..g.n())
        .filter(|&w| d[w] == dmax)
        .map(|w| f[w])
        .max()
        .unwrap();
    d[v] == dmax && f[v] == fmax
}

pub fn random_graph<R: Rng>(rng: &mut R, n: usize, density: f64) -> Hypergraph {
    let mut bits = EdgeBits::EMPTY;
    for r in 0..r443::hypergraph::triples(n) {
        if rng.gen_bool(density) {
            bits.insert(r);
        }
    }
    Hypergraph::from_bits(n, bits).unwrap()
}

pub fn random_perm<R: Rng>(rng: &mut R, n: usize) -> Vec<Point> {
    let mut p: Vec<Point> = (0..n as Point).collect();
    p.shuffle(rng);
    p
}

/// Every member of an interval, by brute force over the free bits.
pub fn members(iv: &Interval) -> Vec<u128> {
    let free: Vec<usize> = (0..128)
        .filter(|&i| iv.top().0 >> i & 1 == 1 && iv.bottom().0 >> i & 1 == 0)
        .collect();
    (0u64..1 << free.len())
        .map(|m| {
            let mut s = iv.bottom().0;
            for (k, &i) in free.iter().enumerate() {
                if m >> k & 1 == 1 {
                    s |= 1 << i;
                }
            }
            s
        })
        .collect()
}

pub fn satisfies(c: &QuadConstraint, s: u128) -> bool {
    let hit = s & c.members().0;
    match c.polarity() {
        Polarity::AtLeastOneIn => hit != 0,
        Polarity::AtLeastOneOut => hit != c.members().0,
    }
}

pub fn random_interval<R: Rng>(rng: &mut R, width: usize, max_free: usize) -> Interval {
    let full = CandidateSet::full(width).0;
    let top = (rng.gen::<u128>() | rng.gen::<u128>()) & full;
    let mut bottom = top & rng.gen::<u128>() & rng.gen::<u128>();
    while (top & !bottom).count_ones() as usize > max_free {
        let free = top & !bottom;
        bottom |= free & free.wrapping_neg();
    }
    Interval::new(CandidateSet(bottom), CandidateSet(top)).unwrap()
}

pub fn random_constraint<R: Rng>(rng: &mut R, width: usize) -> QuadConstraint {
    let k = rng.gen_range(1..=3.min(width));
    let mut idx: Vec<usize> = (0..width).collect();
    idx.shuffle(rng);
    let members = idx[..k].iter().fold(0u128, |m, &i| m | 1 << i);
    let polarity = if rng.gen() {
        Polarity::AtLeastOneIn
    } else {
        Polarity::AtLeastOneOut
    };
    QuadConstraint::new(
        CandidateSet(members),
        polarity,
        r443::TripleRank::new(0).unwrap(),
    )
    .unwrap()
}

/// Canonical forms reached from each seed through two more points, with
/// and without interval reuse.
pub fn reuse_forms(seeds: &[Hypergraph], e_target: usize, reuse: bool) -> BTreeSet<Hypergraph> {
    let n = seeds[0].n();
    let bounds = path_bounds(n + 2, e_target, n).unwrap();
    let opts = ExtensionOptions {
        reuse,
        ..ExtensionOptions::default()
    };
    let mut out = BTreeSet::new();
    for s in seeds {
        let _ = extend_chain(s, &bounds, &opts, |h| {
            out.insert(*canonical_form(h).graph());
            ControlFlow::Continue(())
        })
        .unwrap();
    }
    out
}
