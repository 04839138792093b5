//! Smoke tests for the core graph machinery and the decomposition layer.

use matchwall::decomposition::*;
use matchwall::graph_core::*;

fn cycle(k: usize) -> BipartiteGraph {
    // C_{2k}: blacks 0..k, whites k..2k, edges i -- k+i and i -- k+(i+1 mod k).
    let mut edges = Vec::new();
    for i in 0..k {
        edges.push((i, k + i));
        edges.push((i, k + (i + 1) % k));
    }
    BipartiteGraph::new(k, k, &edges).unwrap()
}

fn k33() -> BipartiteGraph {
    let mut edges = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            edges.push((i, 3 + j));
        }
    }
    BipartiteGraph::new(3, 3, &edges).unwrap()
}

#[test]
fn cycles_are_matching_covered() {
    for k in 2..6 {
        assert!(is_matching_covered(&cycle(k)), "C_{} should be matching covered", 2 * k);
    }
}

#[test]
fn c4_is_brace_c6_is_not() {
    assert!(is_brace(&cycle(2)).unwrap());
    let cut = find_nontrivial_tight_cut(&cycle(3)).unwrap().expect("C6 has a tight cut");
    assert_eq!(cut.shore.len(), 3);
    // Tightness in the counting sense.
    assert!(crossing_counts_are_one(&cycle(3), &cut.shore));
    let (g, _) = tight_cut_contract(&cycle(3), &cut).unwrap();
    assert!(bipartite_isomorphic(&g, &cycle(2)));
}

#[test]
fn even_cycles_decompose_into_c4s() {
    for k in 2..7 {
        let dec = brace_decomposition(&cycle(k)).unwrap();
        assert_eq!(dec.braces.len(), k - 1, "C_{} should have {} braces", 2 * k, k - 1);
        for b in &dec.braces {
            assert!(bipartite_isomorphic(b, &cycle(2)));
        }
    }
}

#[test]
fn k33_is_a_brace_and_two_extendible() {
    let b = k33();
    assert!(is_brace(&b).unwrap());
    assert!(k_extendible(&b, 1).unwrap());
    assert!(k_extendible(&b, 2).unwrap());
}

#[test]
fn extendibility_matches_strong_connectivity_on_small_cases() {
    for g in [cycle(2), cycle(3), cycle(4), k33()] {
        let m = find_perfect_matching(&g).unwrap();
        let d = m_direction(&g, &m).unwrap();
        for k in 1..=2usize {
            if g.n() < 2 * k + 2 {
                continue;
            }
            assert_eq!(
                k_extendible(&g, k).unwrap(),
                d.is_strongly_k_connected(k),
                "k={k} mismatch"
            );
        }
    }
}

#[test]
fn direction_split_round_trip() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let n = rng.gen_range(1..8);
        let mut arcs = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u != v && rng.gen_bool(0.4) {
                    arcs.push((u, v));
                }
            }
        }
        let d = Digraph::new(n, &arcs).unwrap();
        let (b, m) = split(&d).unwrap();
        let d2 = m_direction(&b, &m).unwrap();
        assert_eq!(d.arcs(), d2.arcs());
        assert_eq!(d.n(), d2.n());
        // And the other composition up to relabelling of the second class.
        let (b2, m2) = split(&d2).unwrap();
        assert!(bipartite_isomorphic(&b, &b2));
        assert_eq!(m.edges(), m2.edges());
    }
}

#[test]
fn labels_survive_direction_round_trip() {
    let mut b = cycle(3);
    b.set_labels((0..6).map(|i| format!("x{i}")).collect());
    let m = find_perfect_matching(&b).unwrap();
    let d = m_direction(&b, &m).unwrap();
    assert!(d.label(0).unwrap().contains('~'));
    let (b2, _) = split(&d).unwrap();
    let l: Vec<&str> = (0..6).map(|v| b2.label(v).unwrap()).collect();
    assert!(l.contains(&"x0"));
}

#[test]
fn alternating_queries_on_c6() {
    let b = cycle(3);
    let m = find_perfect_matching(&b).unwrap();
    // Same class endpoints are rejected.
    assert!(alternating_query(&b, &m, 0, 1, AlternatingKind::Conformal).is_err());
    // A conformal path between opposite classes exists in an even cycle.
    let p = alternating_query(&b, &m, 0, 4, AlternatingKind::Conformal)
        .unwrap()
        .expect("conformal path");
    assert_eq!(p.first(), Some(&0));
    assert_eq!(p.last(), Some(&4));
    assert_eq!(p.len() % 2, 0);
    // Paths alternate: first and last edges are matching edges.
    assert_eq!(m.partner(p[0]), p[1]);
    assert_eq!(m.partner(p[p.len() - 1]), p[p.len() - 2]);
}

#[test]
fn admissibility_flags_forced_edges() {
    // Path P4 plus an extra vertex pair making one edge inadmissible:
    // blacks {0,1}, whites {2,3}; edges 0-2, 1-2, 1-3. Edge 1-2 lies in no
    // perfect matching.
    let b = BipartiteGraph::new(2, 2, &[(0, 2), (1, 2), (1, 3)]).unwrap();
    let adm = admissible_edges(&b).unwrap();
    let edges = b.edges();
    for ((u, v), ok) in edges.into_iter().zip(adm) {
        assert_eq!(ok, !(u == 1 && v == 2), "edge ({u},{v})");
    }
    assert!(!is_matching_covered(&b));
}

#[test]
fn k33_minor_oracle_ground_truth() {
    assert!(has_k33_matching_minor(&k33()).unwrap());
    assert!(!has_k33_matching_minor(&cycle(4)).unwrap());
    // The Heawood graph contains K_{3,3} as an ordinary minor but not as a
    // matching minor.
    let heawood = {
        let mut edges = Vec::new();
        for i in 0..7 {
            // Standard incidence structure of the Fano plane.
            let lines = [
                [0, 1, 2],
                [0, 3, 4],
                [0, 5, 6],
                [1, 3, 5],
                [1, 4, 6],
                [2, 3, 6],
                [2, 4, 5],
            ];
            for &p in &lines[i] {
                edges.push((p, 7 + i));
            }
        }
        BipartiteGraph::new(7, 7, &edges).unwrap()
    };
    assert!(is_matching_covered(&heawood));
    assert!(!has_k33_matching_minor(&heawood).unwrap());
}

#[test]
fn bicontraction_of_c6_gives_c4() {
    let b = cycle(3);
    // Vertex 0 has degree 2 in the cycle.
    let (g, _) = bicontract(&b, 0).unwrap();
    assert!(bipartite_isomorphic(&g, &cycle(2)));
}

#[test]
fn reduction_minor_search_agrees_with_subdivision_route() {
    // K33 inside K44 both ways.
    let k44 = {
        let mut edges = Vec::new();
        for i in 0..4 {
            for j in 0..4 {
                edges.push((i, 4 + j));
            }
        }
        BipartiteGraph::new(4, 4, &edges).unwrap()
    };
    assert!(has_matching_minor(&k44, &k33(), 100_000).unwrap());
    assert!(has_k33_matching_minor(&k44).unwrap());
    assert!(!has_matching_minor(&cycle(4), &k33(), 100_000).unwrap());
}

#[test]
fn dibraces_of_a_digon_chain() {
    // Three vertices joined in a chain by digons: 0<->1<->2.
    let d = Digraph::new(3, &[(0, 1), (1, 0), (1, 2), (2, 1)]).unwrap();
    let parts = dibraces(&d).unwrap();
    assert_eq!(parts.len(), 2);
    for p in &parts {
        assert_eq!(p.n(), 2);
        assert_eq!(p.m(), 2);
    }
}

#[test]
fn dibrace_brace_correspondence_small() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
    let c4 = cycle(2);
    let mut tested = 0;
    while tested < 20 {
        let n = rng.gen_range(2..7);
        let mut arcs = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u != v && rng.gen_bool(0.5) {
                    arcs.push((u, v));
                }
            }
        }
        let d = Digraph::new(n, &arcs).unwrap();
        if !d.is_strongly_connected() {
            continue;
        }
        tested += 1;
        let (b, _) = split(&d).unwrap();
        let braces: Vec<BipartiteGraph> = brace_decomposition(&b)
            .unwrap()
            .braces
            .into_iter()
            .filter(|g| !bipartite_isomorphic(g, &c4))
            .collect();
        let parts: Vec<Digraph> = dibraces(&d)
            .unwrap()
            .into_iter()
            .filter(|p| p.n() > 2 || p.m() > 2 || p.n() > 2)
            .filter(|p| !(p.n() == 2 && p.m() == 2))
            .collect();
        assert_eq!(braces.len(), parts.len(), "arcs: {:?}", d.arcs());
        let mut bforms: Vec<CanonicalForm> = braces.iter().map(canonical_bipartite).collect();
        let mut pforms: Vec<CanonicalForm> = parts
            .iter()
            .map(|p| canonical_bipartite(&split(p).unwrap().0))
            .collect();
        bforms.sort();
        pforms.sort();
        assert_eq!(bforms, pforms);
    }
}

#[test]
fn brace_multiset_is_order_independent_small() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    for g in [cycle(4), cycle(5)] {
        let reference = brace_decomposition(&g).unwrap().brace_multiset();
        for _ in 0..10 {
            let dec = brace_decomposition_random(&g, &mut rng).unwrap();
            assert_eq!(dec.brace_multiset(), reference);
        }
    }
}

#[test]
fn io_round_trip() {
    use matchwall::io::*;
    let b = cycle(3);
    let m = find_perfect_matching(&b).unwrap();
    let text = write_bipartite(&b, Some(&m));
    let (b2, m2) = parse_bipartite(&text).unwrap();
    assert_eq!(b.edges(), b2.edges());
    assert_eq!(m.edges(), m2.unwrap().edges());
    let d = m_direction(&b, &m).unwrap();
    let dt = write_digraph(&d);
    let d2 = parse_digraph(&dt).unwrap();
    assert_eq!(d.arcs(), d2.arcs());
    assert!(parse_bipartite("p bip 1 1 2\ne 1 2\n").is_err());
    assert!(parse_digraph("garbage").is_err());
}
