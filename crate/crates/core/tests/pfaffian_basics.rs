use matchwall::graph_core::{
    complete_bipartite_pattern, find_conformal_bisubdivision, find_perfect_matching,
    has_k33_matching_minor, is_matching_covered,
};
use matchwall::pfaffian::{
    conformal_cross_search, heawood_graph, is_heawood, is_pfaffian, is_pfaffian_brace,
    verify_cross, TrisumTree,
};
use matchwall::BipartiteGraph;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn cycle(k: usize) -> BipartiteGraph {
    let mut e = Vec::new();
    for i in 0..k {
        e.push((i, k + i));
        e.push((i, k + (i + 1) % k));
    }
    BipartiteGraph::new(k, k, &e).unwrap()
}

fn k33() -> BipartiteGraph {
    let mut e = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            e.push((i, 3 + j));
        }
    }
    BipartiteGraph::new(3, 3, &e).unwrap()
}

fn cube() -> BipartiteGraph {
    // Q3 with bipartition by parity of coordinate sum.
    let v1 = [0b000usize, 0b011, 0b101, 0b110];
    let v2 = [0b001usize, 0b010, 0b100, 0b111];
    let mut e = Vec::new();
    for (i, &a) in v1.iter().enumerate() {
        for (j, &b) in v2.iter().enumerate() {
            if (a ^ b).count_ones() == 1 {
                e.push((i, 4 + j));
            }
        }
    }
    BipartiteGraph::new(4, 4, &e).unwrap()
}

#[test]
fn heawood_recognised_and_pfaffian() {
    let h = heawood_graph();
    assert!(is_heawood(&h));
    assert!(is_matching_covered(&h));
    let (ok, w) = is_pfaffian_brace(&h).unwrap();
    assert!(ok);
    assert!(matches!(w, Some(TrisumTree::HeawoodLeaf(_))));
    assert!(is_pfaffian(&h).unwrap());
    // It has no K3,3 matching minor despite being nonplanar.
    assert!(!has_k33_matching_minor(&h).unwrap());
}

#[test]
fn k33_not_pfaffian() {
    let g = k33();
    let (ok, _) = is_pfaffian_brace(&g).unwrap();
    assert!(!ok);
    assert!(!is_pfaffian(&g).unwrap());
}

#[test]
fn planar_braces_pfaffian() {
    for g in [cube(), cycle(4), cycle(5)] {
        assert!(is_pfaffian(&g).unwrap());
    }
    let (ok, w) = is_pfaffian_brace(&cube()).unwrap();
    assert!(ok);
    assert!(matches!(w, Some(TrisumTree::PlanarLeaf(_))));
}

#[test]
fn k44_not_pfaffian() {
    let mut e = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            e.push((i, 4 + j));
        }
    }
    let g = BipartiteGraph::new(4, 4, &e).unwrap();
    assert!(!is_pfaffian(&g).unwrap());
}

#[test]
fn pfaffian_matches_k33_oracle_on_random_graphs() {
    let mut rng = StdRng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 40 {
        let k = rng.gen_range(3..=6);
        let mut edges: Vec<(usize, usize)> = (0..k).map(|i| (i, k + i)).collect();
        for i in 0..k {
            edges.push((i, k + (i + 1) % k));
        }
        for i in 0..k {
            for j in 0..k {
                let e = (i, k + j);
                if !edges.contains(&e) && rng.gen_bool(0.25) {
                    edges.push(e);
                }
            }
        }
        let g = BipartiteGraph::new(k, k, &edges).unwrap();
        if !is_matching_covered(&g) {
            continue;
        }
        checked += 1;
        let pf = is_pfaffian(&g).unwrap();
        let k33 = has_k33_matching_minor(&g).unwrap();
        assert_eq!(pf, !k33, "disagreement on {} vertices: {:?}", g.n(), edges);
    }
}

#[test]
fn cross_over_4cycle_in_k33() {
    // In K3,3 every 4-cycle carries a conformal cross.
    let g = k33();
    let cyc = vec![0, 3, 1, 4];
    let w = conformal_cross_search(&g, &cyc).unwrap().expect("cross");
    assert!(verify_cross(&g, &w));
}

#[test]
fn no_cross_over_face_of_cube() {
    let g = cube();
    // Any 4-cycle of the cube bounds a face of the unique planar embedding;
    // a cross over it would make the graph non-Pfaffian.
    let a = 0;
    let b1 = g.neighbours(a)[0];
    let b2 = g.neighbours(a)[1];
    let common: Vec<usize> = g
        .neighbours(b1)
        .iter()
        .copied()
        .filter(|&x| x != a && g.has_edge(x, b2))
        .collect();
    let cyc = vec![a, b1, common[0], b2];
    assert!(conformal_cross_search(&g, &cyc).unwrap().is_none());
}

#[test]
fn cross_iff_k33_bisubdivision_through_cycle() {
    // For a 4-cycle of a brace: a conformal cross over it exists exactly
    // when the cycle lies in a conformal K3,3 bisubdivision. Spot-check on
    // small braces by comparing the cross search with a direct
    // bisubdivision search restricted to embeddings containing the cycle.
    let pat = complete_bipartite_pattern(3);
    let mut rng = StdRng::seed_from_u64(5);
    let mut checked = 0;
    while checked < 12 {
        let k = rng.gen_range(3..=5);
        let mut edges: Vec<(usize, usize)> = (0..k).map(|i| (i, k + i)).collect();
        for i in 0..k {
            edges.push((i, k + (i + 1) % k));
        }
        for i in 0..k {
            for j in 0..k {
                let e = (i, k + j);
                if !edges.contains(&e) && rng.gen_bool(0.3) {
                    edges.push(e);
                }
            }
        }
        let g = BipartiteGraph::new(k, k, &edges).unwrap();
        if !is_matching_covered(&g) {
            continue;
        }
        // Pick a conformal 4-cycle if one exists.
        let mut cyc: Option<Vec<usize>> = None;
        'outer: for a1 in 0..k {
            for a2 in a1 + 1..k {
                for b1 in k..2 * k {
                    for b2 in b1 + 1..2 * k {
                        let all = [(a1, b1), (a1, b2), (a2, b1), (a2, b2)];
                        if all.iter().all(|&(x, y)| g.has_edge(x, y)) {
                            let c = vec![a1, b1, a2, b2];
                            if matchable_without(&g, &c) {
                                cyc = Some(c);
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        let Some(cyc) = cyc else { continue };
        checked += 1;
        let cross = conformal_cross_search(&g, &cyc).unwrap();
        let bisub = find_conformal_bisubdivision(&g, &pat)
            .unwrap()
            .map(|emb| {
                let vs = emb.vertices();
                cyc.iter().all(|v| vs.contains(v))
                    && cycle_edges_in(&emb.edges(), &cyc)
            })
            .unwrap_or(false);
        if cross.is_some() {
            // The union of cycle and cross is itself a conformal K3,3
            // bisubdivision containing the cycle, so the host must contain
            // one overall.
            assert!(
                find_conformal_bisubdivision(&g, &pat).unwrap().is_some(),
                "cross without any K3,3 bisubdivision"
            );
        } else {
            // No cross: the first-found bisubdivision (if any) need not
            // avoid the cycle, so only assert the contrapositive when the
            // found embedding does contain the cycle with its edges.
            assert!(
                !bisub,
                "K3,3 bisubdivision through the cycle but no cross found"
            );
        }
    }
}

fn matchable_without(g: &BipartiteGraph, verts: &[usize]) -> bool {
    let mut blocked = vec![false; g.n()];
    for &v in verts {
        blocked[v] = true;
    }
    matchwall::graph_core::is_matchable_avoiding(g, &blocked)
}

fn cycle_edges_in(edges: &[(usize, usize)], cyc: &[usize]) -> bool {
    let norm: Vec<(usize, usize)> = edges
        .iter()
        .map(|&(a, b)| (a.min(b), a.max(b)))
        .collect();
    (0..cyc.len()).all(|i| {
        let (a, b) = (cyc[i], cyc[(i + 1) % cyc.len()]);
        norm.contains(&(a.min(b), a.max(b)))
    })
}

#[test]
fn trisum_witness_recomposes_input() {
    // Build a known trisum: glue three planar braces along a shared 4-cycle.
    // Take the cube and attach a second cube-like piece along one 4-cycle.
    let g = glued_cubes();
    assert!(is_matching_covered(&g));
    let pf = is_pfaffian(&g).unwrap();
    assert!(pf);
    // If the composite happens to be a brace, ask for the witness and check
    // the recomposition.
    if matchwall::decomposition::is_brace(&g).unwrap() {
        let (ok, w) = is_pfaffian_brace(&g).unwrap();
        assert!(ok);
        if let Some(TrisumTree::Sum { .. }) = &w {
            let edges = w.as_ref().unwrap().recomposed_edges();
            let mut host: Vec<(usize, usize)> = g
                .edges()
                .iter()
                .map(|&(a, b)| (a.min(b), a.max(b)))
                .collect();
            host.sort_unstable();
            assert_eq!(edges, host);
        }
    }
}

/// Two 8-vertex planar braces sharing a 4-cycle.
fn glued_cubes() -> BipartiteGraph {
    // Vertices 0..6 black, 6..12 white. Shared 4-cycle on 0,6,1,7.
    // Side A: cube on {0,1,2,3} x {6,7,8,9}; side B adds {4,5} x {10,11}.
    let mut e = vec![
        // cube (side A): black 0,1,2,3, white 6,7,8,9
        (0, 6),
        (0, 7),
        (0, 8),
        (1, 6),
        (1, 7),
        (1, 9),
        (2, 6),
        (2, 8),
        (2, 9),
        (3, 7),
        (3, 8),
        (3, 9),
    ];
    // side B: black 4,5 and white 10,11 glued on the 4-cycle 0-6-1-7.
    e.extend([
        (4, 6),
        (4, 10),
        (4, 11),
        (5, 7),
        (5, 10),
        (5, 11),
        (0, 10),
        (1, 11),
    ]);
    BipartiteGraph::new(6, 6, &e).unwrap()
}

#[test]
fn cross_witness_matching_is_a_perfect_matching() {
    let g = k33();
    let cyc = vec![0, 3, 1, 4];
    let w = conformal_cross_search(&g, &cyc).unwrap().unwrap();
    assert_eq!(w.matching.n(), g.n());
    assert!(find_perfect_matching(&g).is_some());
}
