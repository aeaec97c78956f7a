mod common;

use std::sync::OnceLock;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gemcensus::catalog::{diff, Catalogue};
use gemcensus::invariants::{first_homology, fundamental_group, GroupPresentation, HomologyResult};
use gemcensus::library::{lens_3_1, rp3, s2_x_s1, twisted_s2_bundle};
use gemcensus::moves::{
    add_dipole, cancel_generalized_dipole, delete_dipole, dipole_at, dipole_sites, find_dipoles, find_generalized_dipoles,
    find_rho_pairs, reduce_to_rigid, switch_rho_pair, RhoKind,
};
use gemcensus::seifert::{lst, LstParams, SeifertSpec};
use gemcensus::sum::{connected_sum, prime_pieces, sharp_cuts, split_along, split_condition_sharp};
use gemcensus::{canonical_code, from_code, ColouredGraph};

use common::{homology_oracle, rows_of};

fn census18() -> &'static Vec<gemcensus::catalog::CatalogueEntry> {
    static CENSUS: OnceLock<Vec<gemcensus::catalog::CatalogueEntry>> = OnceLock::new();
    CENSUS.get_or_init(|| common::census(18))
}

fn pool() -> &'static Vec<ColouredGraph> {
    static POOL: OnceLock<Vec<ColouredGraph>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut v = vec![ColouredGraph::sphere(), rp3(), lens_3_1(), s2_x_s1(), twisted_s2_bundle()];
        v.extend(census18().iter().map(|e| from_code(&e.code).unwrap()));
        v
    })
}

fn pair(h: &HomologyResult) -> (usize, Vec<u64>) {
    (h.free_rank, h.torsion.iter().map(|t| t.to_string().parse().unwrap()).collect())
}

fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        p.swap(i, rng.gen_range(0..=i));
    }
    p
}

fn relabel(g: &ColouredGraph, rng: &mut ChaCha8Rng) -> ColouredGraph {
    let c = random_perm(rng, 4);
    g.relabel(&random_perm(rng, g.order()), &[c[0], c[1], c[2], c[3]])
}

/// A gem of the same manifold grown by random dipole insertions.
fn inflate(g: &ColouredGraph, steps: usize, rng: &mut ChaCha8Rng) -> ColouredGraph {
    let mut cur = g.clone();
    for _ in 0..steps {
        let k = rng.gen_range(1..=3);
        let sites = dipole_sites(&cur, k);
        if sites.is_empty() {
            continue;
        }
        cur = add_dipole(&cur, &sites[rng.gen_range(0..sites.len())]).unwrap();
    }
    cur
}

fn graph_and_rng() -> impl Strategy<Value = (ColouredGraph, ChaCha8Rng)> {
    (0..pool().len(), any::<u64>()).prop_map(|(i, s)| (pool()[i].clone(), ChaCha8Rng::seed_from_u64(s)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn code_is_invariant_under_relabelling((g, mut rng) in graph_and_rng()) {
        let code = canonical_code(&g);
        for _ in 0..8 {
            let h = relabel(&g, &mut rng);
            prop_assert_eq!(canonical_code(&h), code.clone());
            prop_assert_eq!(h.is_manifold_gem(), g.is_manifold_gem());
            prop_assert_eq!(first_homology(&h), first_homology(&g));
        }
        let back = from_code(&code).unwrap();
        prop_assert_eq!(canonical_code(&back), code);
    }

    #[test]
    fn residue_euler_characteristics_sum_to_twice_the_count((g, mut rng) in graph_and_rng(), steps in 0usize..4) {
        let g = inflate(&g, steps, &mut rng);
        prop_assert!(g.is_manifold_gem());
        for c in 0..4 {
            let chi = g.residue_euler_characteristics(c);
            prop_assert_eq!(chi.iter().sum::<i64>(), 2 * chi.len() as i64);
        }
    }

    #[test]
    fn homology_agrees_with_cellular_oracle((g, mut rng) in graph_and_rng(), steps in 0usize..4) {
        let g = inflate(&relabel(&g, &mut rng), steps, &mut rng);
        prop_assert_eq!(pair(&first_homology(&g)), homology_oracle(&rows_of(&g)));
    }

    #[test]
    fn dipole_insertion_then_deletion_is_identity((g, mut rng) in graph_and_rng(), k in 1usize..=3) {
        let sites = dipole_sites(&g, k);
        prop_assume!(!sites.is_empty());
        let site = &sites[rng.gen_range(0..sites.len())];
        let big = add_dipole(&g, site).unwrap();
        let n = g.order();
        let d = dipole_at(&big, n, n + 1).expect("inserted pair is a dipole");
        prop_assert_eq!(canonical_code(&delete_dipole(&big, &d).unwrap()), canonical_code(&g));
    }

    #[test]
    fn reduction_is_idempotent_and_keeps_homology((g, mut rng) in graph_and_rng(), steps in 1usize..6) {
        let big = inflate(&g, steps, &mut rng);
        let (r, log) = reduce_to_rigid(&big);
        let (rr, again) = reduce_to_rigid(&r);
        prop_assert!(again.is_empty());
        prop_assert_eq!(canonical_code(&rr), canonical_code(&r));
        let before = pair(&first_homology(&big));
        let after = pair(&first_homology(&r));
        // each ρ₃ switch splits off one handle
        if big.is_bipartite() {
            prop_assert_eq!(before.0, after.0 + log.rho3_count);
        }
        if log.rho3_count == 0 {
            prop_assert_eq!(before, after);
        }
    }

    #[test]
    fn every_move_on_an_inflated_gem_is_sound((g, mut rng) in graph_and_rng(), steps in 1usize..4) {
        let big = inflate(&g, steps, &mut rng);
        let h = first_homology(&big);
        for d in find_dipoles(&big) {
            let x = delete_dipole(&big, &d).unwrap();
            prop_assert!(x.is_manifold_gem());
            prop_assert_eq!(first_homology(&x), h.clone());
        }
        for d in find_generalized_dipoles(&big, 3, 3) {
            if let Ok(x) = cancel_generalized_dipole(&big, &d) {
                prop_assert!(x.is_manifold_gem());
                prop_assert_eq!(first_homology(&x), h.clone());
            }
        }
        for p in find_rho_pairs(&big) {
            // a ρ₃ switch may split off the handle as a separate component unless the gem is contracted
            let Ok((x, rho3)) = switch_rho_pair(&big, &p) else {
                prop_assert!(p.kind == RhoKind::Rho3 && !big.is_crystallization());
                continue;
            };
            prop_assert!(x.is_manifold_gem());
            prop_assert_eq!(rho3, p.kind == RhoKind::Rho3);
            if !rho3 {
                prop_assert_eq!(first_homology(&x), h.clone());
            } else if x.is_connected() && big.is_bipartite() && x.is_bipartite() {
                prop_assert_eq!(h.free_rank, first_homology(&x).free_rank + 1);
            }
        }
    }

    #[test]
    fn sums_split_back_into_their_summands(i in 0usize..64, j in 0usize..64, s in any::<u64>()) {
        let small: Vec<&ColouredGraph> = pool().iter().filter(|g| g.order() <= 16 && g.order() > 2).collect();
        let (a, b) = (small[i % small.len()], small[j % small.len()]);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let sum = connected_sum(a, rng.gen_range(0..a.order()), b, rng.gen_range(0..b.order()));
        let mut want = vec![canonical_code(a), canonical_code(b)];
        want.sort();
        let split_codes = |cut: &[(usize, usize); 4]| {
            let (x, y) = split_along(&sum, cut);
            let mut got = vec![canonical_code(&x), canonical_code(&y)];
            got.sort();
            got
        };
        let cuts = sharp_cuts(&sum);
        prop_assert!(cuts.iter().any(|c| split_codes(c) == want));
        if split_condition_sharp(a).is_none() && split_condition_sharp(b).is_none() {
            // prime summands: the cut is unique up to the scan, so the first one is theirs
            let (x, y) = split_condition_sharp(&sum).unwrap();
            let mut got = vec![canonical_code(&x), canonical_code(&y)];
            got.sort();
            prop_assert_eq!(got, want);
        }
        let pieces = |g: &ColouredGraph| {
            let mut v: Vec<_> = prime_pieces(g).iter().map(canonical_code).collect();
            v.sort();
            v
        };
        let mut both = pieces(a);
        both.extend(pieces(b));
        both.sort();
        prop_assert_eq!(pieces(&sum), both);
    }

    #[test]
    fn relator_order_does_not_change_abelianization((g, mut rng) in graph_and_rng()) {
        let p = fundamental_group(&g);
        let mut rels = p.relators.clone();
        for i in (1..rels.len()).rev() {
            rels.swap(i, rng.gen_range(0..=i));
        }
        let shuffled = GroupPresentation::new(p.generators, rels);
        prop_assert_eq!(shuffled.abelianization(), p.abelianization());
        prop_assert_eq!(p.abelianization(), first_homology(&g));
    }

    #[test]
    fn layered_tori_carry_their_parameters(p in 1i64..30, q in 1i64..30, flip in any::<bool>()) {
        prop_assume!(num_gcd(p, q) == 1);
        let params = if flip { LstParams::new(p, -(p + q), q) } else { LstParams::new(p, q, -(p + q)) }.unwrap();
        let t = lst(params);
        let mut want = [p, q, -(p + q)];
        let mut got = t.params().labels();
        want.sort();
        got.sort();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn catalogue_text_round_trips(mask in any::<u64>()) {
        let all = census18();
        let mut a = Catalogue::new();
        let mut b = Catalogue::new();
        for (k, e) in all.iter().enumerate() {
            if mask >> k & 1 == 1 { a.insert(e.clone()); } else { b.insert(e.clone()); }
            if mask >> (k + 32) & 1 == 1 { b.insert(e.clone()); }
        }
        let text = a.to_text();
        let back = Catalogue::parse(&text).unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(back.to_text(), text);
        prop_assert_eq!(diff(&a, &b), diff(&b, &a).mirrored());
        prop_assert!(diff(&a, &a).is_empty());
    }
}

fn num_gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { num_gcd(b, a % b) }
}

#[test]
fn barycentric_graphs_have_24_flags_per_tetrahedron() {
    for triples in ["(2,1,-3),(4,1,-5),(4,-5,1)", "(3,1,-4),(3,1,-4),(4,-7,3)", "(2,1,-3),(2,1,-3),(3,-4,1)"] {
        let spec = SeifertSpec::from_triples(SeifertSpec::parse_triples(triples).unwrap()).unwrap();
        let b = gemcensus::seifert::build(&spec, false).unwrap();
        assert!(b.triangulation.is_closed());
        assert_eq!(b.graph.order(), 24 * b.triangulation.len());
        assert!(b.graph.is_manifold_gem());
    }
}

#[test]
fn rho3_switch_drops_one_handle() {
    for g in pool().iter().filter(|g| g.is_bipartite() && g.order() > 2 && g.order() <= 16) {
        let mut cur = connected_sum(g, 0, &s2_x_s1(), 0);
        // strip dipoles until the handle shows up as a ρ₃-pair
        let p = loop {
            if let Some(p) = find_rho_pairs(&cur).into_iter().find(|p| p.kind == RhoKind::Rho3) {
                break p;
            }
            let d = find_dipoles(&cur).into_iter().next().expect("a ρ₃-pair appears before the dipoles run out");
            cur = delete_dipole(&cur, &d).unwrap();
        };
        let (x, rho3) = switch_rho_pair(&cur, &p).unwrap();
        assert!(rho3 && x.is_manifold_gem());
        if x.is_connected() && x.is_bipartite() {
            assert_eq!(first_homology(&cur).free_rank, first_homology(&x).free_rank + 1);
        }
    }
    let (r, log) = reduce_to_rigid(&connected_sum(&lens_3_1(), 0, &s2_x_s1(), 0));
    assert_eq!(log.rho3_count, 1);
    assert_eq!(canonical_code(&r), canonical_code(&reduce_to_rigid(&lens_3_1()).0));
}
