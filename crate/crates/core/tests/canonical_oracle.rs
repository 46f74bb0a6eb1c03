mod common;

use std::collections::HashMap;

use common::{
    brute_aut, brute_isomorphic, brute_min_form, brute_self_complementary, permutations,
    random_graph, random_perm,
};
use proptest::prelude::*;
use r443::canonical::{aut_info, canonical_form, canonicalize, is_self_complementary};
use r443::extension::{enumerate_all, EnumerateOptions};
use r443::Hypergraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn perms_by_n() -> Vec<Vec<Vec<u8>>> {
    (0..=7).map(permutations).collect()
}

fn sample<R: Rng>(rng: &mut R, max_n: usize) -> Hypergraph {
    let n = rng.gen_range(3..=max_n);
    let density = [0.05, 0.2, 0.5, 0.8, 0.95][rng.gen_range(0..5)];
    random_graph(rng, n, density)
}

fn good_classes_up_to(n: usize) -> Vec<Hypergraph> {
    (3..=n)
        .flat_map(|k| {
            enumerate_all(k, None, &EnumerateOptions::default())
                .unwrap()
                .classes
        })
        .collect()
}

#[test]
fn forms_partition_like_brute_force_minimum() {
    let perms = perms_by_n();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut by_form: HashMap<Hypergraph, (usize, u64)> = HashMap::new();
    let mut by_min: HashMap<(usize, u64), Hypergraph> = HashMap::new();
    for _ in 0..10_000 {
        let g = sample(&mut rng, 7);
        let h = g.relabel(&random_perm(&mut rng, g.n())).unwrap();
        for x in [g, h] {
            let form = *canonical_form(&x).graph();
            let min = (x.n(), brute_min_form(&x, &perms[x.n()]));
            assert_eq!(*by_form.entry(form).or_insert(min), min, "{x}");
            assert_eq!(*by_min.entry(min).or_insert(form), form, "{x}");
        }
        assert_eq!(canonical_form(&g), canonical_form(&h));
    }
    assert!(by_form.len() > 1_000);
}

#[test]
fn equal_forms_iff_isomorphic() {
    let perms = perms_by_n();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut agreed_iso = 0;
    for _ in 0..5_000 {
        let n = rng.gen_range(4..=5);
        let e = rng.gen_range(0..=r443::hypergraph::triples(n));
        let pick = |rng: &mut ChaCha8Rng| {
            let mut ranks: Vec<usize> = (0..r443::hypergraph::triples(n)).collect();
            rand::seq::SliceRandom::shuffle(&mut ranks[..], rng);
            let mut bits = r443::hypergraph::EdgeBits::EMPTY;
            ranks[..e].iter().for_each(|&r| bits.insert(r));
            Hypergraph::from_bits(n, bits).unwrap()
        };
        let (g, h) = (pick(&mut rng), pick(&mut rng));
        let same = canonical_form(&g) == canonical_form(&h);
        assert_eq!(same, brute_isomorphic(&g, &h, &perms[n]), "{g} {h}");
        agreed_iso += same as usize;
    }
    assert!(agreed_iso > 100);
}

#[test]
fn group_order_and_orbits_match_brute_force() {
    let perms = perms_by_n();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut graphs = good_classes_up_to(6);
    graphs.extend((0..1_000).map(|_| sample(&mut rng, 7)));
    for g in &graphs {
        let aut = aut_info(g);
        assert_eq!(
            (aut.order, aut.orbit_count),
            brute_aut(g, &perms[g.n()]),
            "{g}"
        );
    }
}

#[test]
fn self_complementarity_matches_brute_force() {
    let perms = perms_by_n();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut graphs: Vec<Hypergraph> = good_classes_up_to(6)
        .into_iter()
        .filter(|g| 2 * g.edge_count() == g.width())
        .collect();
    let mut found = 0;
    for _ in 0..300 {
        let n = rng.gen_range(4..=6);
        let g = random_graph(&mut rng, n, 0.5);
        graphs.push(g);
    }
    for g in &graphs {
        let sc = is_self_complementary(g);
        assert_eq!(sc, brute_self_complementary(g, &perms[g.n()]), "{g}");
        found += sc as usize;
    }
    assert!(found > 0);
}

#[test]
fn labelling_reaches_the_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..2_000 {
        let g = sample(&mut rng, 13);
        let c = canonicalize(&g);
        assert_eq!(g.relabel(&c.labelling).unwrap(), *c.form.graph());
        for a in &c.generators {
            assert_eq!(g.relabel(a).unwrap(), g);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn form_ignores_relabelling(n in 3usize..=13, density in 0.0f64..1.0, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n, density);
        let h = g.relabel(&random_perm(&mut rng, n)).unwrap();
        let (cg, ch) = (canonicalize(&g), canonicalize(&h));
        prop_assert_eq!(cg.form, ch.form);
        prop_assert_eq!((cg.aut.order, cg.aut.orbit_count), (ch.aut.order, ch.aut.orbit_count));
        prop_assert_eq!(canonical_form(cg.form.graph()), cg.form);
    }
}
