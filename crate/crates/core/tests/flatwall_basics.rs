//! Attachments, anchors, non-Pfaffian tiles, crosses, flatness
//! certificates, root gadgets and the two-phase pipeline driver.

use matchwall::flatwall::*;
use matchwall::graph_core::{find_perfect_matching, is_conformal_set, is_matching_covered};
use matchwall::walls::gen_matching_wall;
use matchwall::{BipartiteGraph, PerfectMatching};
use std::collections::HashSet;

/// Extends a bare hosted wall by fresh matched pairs and extra edges.
/// Old first-class ids stay, old second-class ids shift by `fresh`.
/// Fresh pair `j` becomes (n1 + j, n1 + fresh + n2 + j), already matched.
/// `extra_edges` are given in the new ids.
fn extend_wall(k: usize, fresh: usize, extra_edges: &[(usize, usize)]) -> HostedWall {
    let mw = gen_matching_wall(k, None).unwrap();
    let (n1, n2) = (mw.graph.n1(), mw.graph.n2());
    let shift = |v: usize| if v < n1 { v } else { v + fresh };
    let mut edges: Vec<(usize, usize)> = mw
        .graph
        .edges()
        .into_iter()
        .map(|(u, v)| (shift(u), shift(v)))
        .collect();
    let mut matching: Vec<(usize, usize)> = mw
        .matching
        .edges()
        .into_iter()
        .map(|(u, v)| (shift(u), shift(v)))
        .collect();
    for j in 0..fresh {
        let (u, v) = (n1 + j, n1 + fresh + n2 + j);
        edges.push((u, v));
        matching.push((u, v));
    }
    edges.extend_from_slice(extra_edges);
    let graph = BipartiteGraph::new(n1 + fresh, n2 + fresh, &edges).unwrap();
    let matching = PerfectMatching::new(&graph, &matching).unwrap();
    HostedWall {
        v1_of: mw.v1_of.clone(),
        v2_of: mw.v2_of.iter().map(|&v| v + fresh).collect(),
        graph,
        matching,
        param: mw.param,
    }
}

fn cell_split_cycle(hw: &HostedWall, gap: usize, pos: usize) -> Vec<usize> {
    let cell = hw.param.cell(gap, pos);
    split_cycle_of_walk(hw, &cell.boundary).unwrap()
}

#[test]
fn split_cycle_of_column_matches_conformal_cycle() {
    let hw = HostedWall::standalone(3).unwrap();
    for c in 1..=3 {
        let walk = hw.param.column_cycle(c);
        let cyc = split_cycle_of_walk(&hw, &walk).unwrap();
        let expect: HashSet<usize> = column_split_cycle(&hw, c).into_iter().collect();
        let got: HashSet<usize> = cyc.iter().copied().collect();
        assert_eq!(got, expect, "column {c}");
        assert!(is_conformal_set(
            &hw.graph,
            &cyc.iter().copied().collect::<Vec<_>>()
        ));
    }
}

#[test]
fn split_cycle_of_cell_is_conformal() {
    let hw = HostedWall::standalone(3).unwrap();
    for cell in hw.param.cells() {
        let cyc = split_cycle_of_walk(&hw, &cell.boundary).unwrap();
        assert!(cyc.len() >= 8, "cell cycle too short: {}", cyc.len());
        assert!(is_conformal_set(&hw.graph, &cyc));
        // Consecutive cycle vertices are adjacent in the host.
        for t in 0..cyc.len() {
            let (u, v) = (cyc[t], cyc[(t + 1) % cyc.len()]);
            assert!(hw.graph.has_edge(u.min(v), u.max(v)));
        }
    }
}

#[test]
fn bare_cell_attachment_is_its_cycle() {
    let hw = HostedWall::standalone(3).unwrap();
    let ctx = attachment_context(&hw, &WallSubgraph::whole(&hw)).unwrap();
    let cyc = cell_split_cycle(&hw, 2, 1);
    let att = attachment(&hw, &ctx, &cyc, &cyc).unwrap();
    // In a bare wall nothing attaches: the component is the remnant of
    // the cell cycle (plus whatever was absorbed into it by
    // bicontraction), a single conformal cycle.
    let att_set: HashSet<usize> = att.b_vertices.iter().copied().collect();
    assert!(cyc.iter().all(|v| att_set.contains(v)));
    assert!(is_matching_covered(&att.graph));
    for v in 0..att.graph.n() {
        assert_eq!(att.graph.neighbours(v).len(), 2, "attachment is a cycle");
    }
}

#[test]
fn gadget_lands_in_the_attachment_of_its_cell() {
    // A fresh matched pair hanging on two adjacent vertices of one
    // interior cell cycle: it must appear in that cell's attachment and in
    // no other cell's.
    let k = 3;
    let bare = HostedWall::standalone(k).unwrap();
    let cyc = cell_split_cycle(&bare, 2, 1);
    // Pick an edge of the cycle: a first-class vertex and its successor.
    let (x, y) = {
        let t = (0..cyc.len())
            .find(|&t| bare.graph.in_v1(cyc[t]) && !bare.graph.in_v1(cyc[(t + 1) % cyc.len()]))
            .unwrap();
        (cyc[t], cyc[(t + 1) % cyc.len()])
    };
    let (n1, n2) = (bare.graph.n1(), bare.graph.n2());
    let (f1, f2) = (n1, n1 + 1 + n2);
    // f1 (first class) sees the cycle's second-class vertex, f2 the first
    // class one; the pair itself is matched.
    let y_new = y + 1;
    let hw = extend_wall(k, 1, &[(f1, y_new), (x, f2)]);
    let ctx = attachment_context(&hw, &WallSubgraph::whole(&hw)).unwrap();
    let cyc_new = cell_split_cycle(&hw, 2, 1);
    let att = attachment(&hw, &ctx, &cyc_new, &cyc_new).unwrap();
    assert!(att.contains_b_vertex(f1));
    assert!(att.contains_b_vertex(f2));
    // A far cell does not attract the gadget.
    let far = cell_split_cycle(&hw, 1, 4);
    let att_far = attachment(&hw, &ctx, &far, &far).unwrap();
    assert!(!att_far.contains_b_vertex(f1));
    assert!(!att_far.contains_b_vertex(f2));
}

#[test]
fn cell_anchors_sit_on_the_bounding_columns() {
    let hw = HostedWall::standalone(3).unwrap();
    for gap in 1..3 {
        for pos in 0..hw.param.n_pos {
            let cell = hw.param.cell(gap, pos);
            let anchors = region_anchors(&hw, &cell.boundary, &[]).unwrap();
            let cols: HashSet<usize> = [anchors.outer_column, anchors.through_column]
                .into_iter()
                .collect();
            assert_eq!(cols, [gap, gap + 1].into_iter().collect::<HashSet<_>>());
            // The outward partners really are off the cycle.
            let on: HashSet<usize> = anchors.cycle.iter().copied().collect();
            assert!(!on.contains(&anchors.c1));
            assert!(!on.contains(&anchors.c2));
            assert!(on.contains(&anchors.a1));
            assert!(on.contains(&anchors.a2));
            assert!(on.contains(&anchors.b1));
            assert!(on.contains(&anchors.b2));
            assert_eq!(hw.matching.partner(anchors.b2), anchors.c1);
            assert_eq!(hw.matching.partner(anchors.a1), anchors.c2);
            // First/second class sides are correct.
            assert!(hw.graph.in_v1(anchors.a1));
            assert!(hw.graph.in_v1(anchors.a2));
            assert!(!hw.graph.in_v1(anchors.b1));
            assert!(!hw.graph.in_v1(anchors.b2));
            // With no seed the region is just the cycle.
            let iset: HashSet<usize> = anchors.i_vertices.iter().copied().collect();
            assert_eq!(iset, on);
        }
    }
}

#[test]
fn wall_subgraph_split_is_conformal() {
    let hw = HostedWall::standalone(3).unwrap();
    let ws = WallSubgraph::slice(&hw, 1, 1).unwrap();
    let hv = ws.split_vertices(&hw);
    assert!(is_conformal_set(&hw.graph, &hv));
    // Each split edge really is an edge of the host.
    for (u, v) in ws.split_edges(&hw) {
        assert!(hw.graph.has_edge(u.min(v), u.max(v)));
    }
    let _ = find_perfect_matching(&hw.graph).unwrap();
}

// ---------------------------------------------------------------------------
// Non-Pfaffian tiles.
// ---------------------------------------------------------------------------

#[test]
fn bare_tile_is_pfaffian_clean() {
    let hw = HostedWall::standalone(6).unwrap();
    let ctx = attachment_context(&hw, &WallSubgraph::whole(&hw)).unwrap();
    let tile = hw.param.tile(2, 1, 1).unwrap();
    let (bad, witness) = is_tile_nonpfaffian(&hw, &ctx, &tile, 200_000).unwrap();
    assert!(!bad);
    assert!(witness.is_none());
}

#[test]
fn chord_in_tile_interior_is_a_short_jump() {
    // A chord between two interior vertices of a tile is a jump with both
    // endpoints inside, so the tile is non-Pfaffian; the attachment of the
    // whole tile then carries a conformal K(3,3) bisubdivision whose
    // branch vertices stay in the tile remnant.
    let bare = HostedWall::standalone(6).unwrap();
    let tile = bare.param.tile(2, 1, 1).unwrap();
    let interior = tile.interior();
    // Two interior vertices on different columns, several rows apart.
    let x = *interior
        .iter()
        .find(|&&v| bare.param.column_of(v) == 3)
        .unwrap();
    let y = *interior
        .iter()
        .find(|&&v| {
            bare.param.column_of(v) == 4
                && bare.param.row_of(v) >= bare.param.row_of(x) + 2
                && !bare.param.digraph.has_arc(x, v)
                && !bare.param.digraph.has_arc(v, x)
        })
        .unwrap();
    let chord = (bare.v1_of[x], bare.v2_of[y]);
    let hw = extend_wall(6, 0, &[chord]);
    let ctx = attachment_context(&hw, &WallSubgraph::whole(&hw)).unwrap();
    let (bad, witness) = is_tile_nonpfaffian(&hw, &ctx, &tile, 200_000).unwrap();
    assert!(bad);
    match witness {
        Some(NonPfaffianWitness::ShortJump(path)) => {
            assert!(path.len() >= 2);
        }
        other => panic!("expected a short jump, got {other:?}"),
    }
    let (att, emb) = short_jump_k33(&hw, &ctx, &tile).unwrap();
    assert_eq!(emb.branch.len(), 6);
    assert!(att.graph.n() >= 6);
}

// ---------------------------------------------------------------------------
// Flatness certificates.
// ---------------------------------------------------------------------------

fn wall_flatness_inputs(
    hw: &HostedWall,
) -> (Vec<usize>, Vec<(usize, usize)>, Vec<Vec<usize>>) {
    let ws = WallSubgraph::whole(hw);
    let hv = ws.split_vertices(hw);
    let he = ws.split_edges(hw);
    let faces = vec![
        column_split_cycle(hw, 1),
        column_split_cycle(hw, hw.param.order),
    ];
    (hv, he, faces)
}

#[test]
fn bare_wall_certifies_flat() {
    for k in [2usize, 3] {
        let hw = HostedWall::standalone(k).unwrap();
        let (hv, he, faces) = wall_flatness_inputs(&hw);
        match verify_flatness(&hw.graph, &[], &hv, &he, &faces).unwrap() {
            FlatnessOutcome::Flat(cert) => {
                cert.recheck(&hw.graph).unwrap();
            }
            FlatnessOutcome::NotFlat { condition, reason, .. } => {
                panic!("bare {k}-wall not flat: condition {condition}: {reason}");
            }
        }
    }
}

/// Plants two four-edge paths on a bare wall out of three fresh matched
/// pairs (g2, g1), (h1, h2), (h3, g3): the path u - g1 - g2 - g3 - w
/// between first-class vertices `u`, `w`, and the path
/// x - h1 - h2 - h3 - y between second-class vertices `x`, `y` (old ids).
/// Returns the host and the six fresh vertices.
fn plant_paths(k: usize, u: usize, w: usize, x: usize, y: usize) -> (HostedWall, Vec<usize>) {
    let bare = HostedWall::standalone(k).unwrap();
    let (n1, n2) = (bare.graph.n1(), bare.graph.n2());
    let shift = 3;
    let fv1 = |j: usize| n1 + j;
    let fv2 = |j: usize| n1 + shift + n2 + j;
    let (g2, g1) = (fv1(0), fv2(0));
    let (h1, h2) = (fv1(1), fv2(1));
    let (h3, g3) = (fv1(2), fv2(2));
    let sh = |v: usize| if v < n1 { v } else { v + shift };
    let extra = vec![
        (u, g1),
        (g2, g3),
        (w, g3),
        (h1, sh(x)),
        (h3, h2),
        (h3, sh(y)),
    ];
    let hw = extend_wall(k, 3, &extra);
    (hw, vec![g2, h1, h3, g1, h2, g3])
}

/// Plants a conformal cross over an interior cell at its anchors: a
/// four-edge path joining the two first-class anchors and a four-edge
/// path joining the two second-class anchors, crossing over the cell.
/// Returns the host, the six fresh vertices, and the cell coordinates.
fn plant_cross_gadget(k: usize, gap: usize, pos: usize) -> (HostedWall, Vec<usize>, (usize, usize)) {
    let bare = HostedWall::standalone(k).unwrap();
    let cell = bare.param.cell(gap, pos);
    let anchors = region_anchors(&bare, &cell.boundary, &[]).unwrap();
    let (hw, fresh) = plant_paths(k, anchors.a1, anchors.a2, anchors.b1, anchors.b2);
    (hw, fresh, (gap, pos))
}

/// Plants two paths whose endpoints interleave along a cell cycle
/// (positions 0 and 4 against 3 and 7), so the paths genuinely cross over
/// the cell and the host stops being planar.
fn plant_interleaved_gadget(k: usize, gap: usize, pos: usize) -> (HostedWall, Vec<usize>) {
    let bare = HostedWall::standalone(k).unwrap();
    let cyc = cell_split_cycle(&bare, gap, pos);
    let r = (0..cyc.len())
        .find(|&t| bare.graph.in_v1(cyc[t]))
        .unwrap();
    let rot = |i: usize| cyc[(r + i) % cyc.len()];
    plant_paths(k, rot(0), rot(4), rot(3), rot(7))
}

#[test]
fn planted_cross_blocks_flatness_and_apex_rescues() {
    let (hw, fresh) = plant_interleaved_gadget(3, 2, 1);
    let (hv, he, faces) = wall_flatness_inputs(&hw);
    match verify_flatness(&hw.graph, &[], &hv, &he, &faces).unwrap() {
        FlatnessOutcome::NotFlat {
            condition, k33, ..
        } => {
            assert_eq!(condition, 2, "hosting brace should be non-Pfaffian");
            let (brace, emb) = k33.expect("expected a K(3,3) witness");
            assert_eq!(emb.branch.len(), 6);
            assert!(brace.n() >= 6);
        }
        FlatnessOutcome::Flat(_) => panic!("planted cross certified flat"),
    }
    // Removing the gadget as an apex set restores flatness.
    match verify_flatness(&hw.graph, &fresh, &hv, &he, &faces).unwrap() {
        FlatnessOutcome::Flat(cert) => {
            assert_eq!(cert.apex, fresh);
            cert.recheck(&hw.graph).unwrap();
        }
        FlatnessOutcome::NotFlat { condition, reason, .. } => {
            panic!("apex removal did not restore flatness: {condition}: {reason}");
        }
    }
}

// ---------------------------------------------------------------------------
// Root gadgets.
// ---------------------------------------------------------------------------

#[test]
fn root_gadget_shape_and_contraction() {
    for t in [1usize, 3, 4] {
        let g = build_root_gadget(t).unwrap();
        assert!(g.check_order(), "order conditions fail for t = {t}");
        if t == 4 {
            assert_eq!(g.path.len(), 8);
            assert_eq!(g.digraph.arcs().len(), 15);
        }
        let (contracted, map) = butterfly_contract_path(&g.digraph, &g.path).unwrap();
        let root = map[g.path[0]];
        assert_eq!(contracted.in_neighbours(root).len(), t);
        assert_eq!(contracted.out_neighbours(root).len(), t);
        // Every stub survives as its own vertex.
        let mut images: Vec<usize> = g
            .in_stubs
            .iter()
            .chain(g.out_stubs.iter())
            .map(|&s| map[s])
            .collect();
        images.sort_unstable();
        images.dedup();
        assert_eq!(images.len(), 2 * t);
    }
}

// ---------------------------------------------------------------------------
// The cross construction.
// ---------------------------------------------------------------------------

#[test]
fn cross_construction_over_a_planted_cell() {
    let (hw, fresh, (gap, pos)) = plant_cross_gadget(3, 2, 1);
    let cell = hw.param.cell(gap, pos);
    let anchors = region_anchors(&hw, &cell.boundary, &[]).unwrap();
    let wprime = WallSubgraph::whole(&hw);
    let cc = construct_cross(&hw, &wprime, &anchors, 500_000).unwrap();
    // The paths run exactly through the planted gadget.
    let fresh_set: std::collections::HashSet<usize> = fresh.iter().copied().collect();
    for path in [&cc.r1, &cc.r2] {
        assert_eq!(path.len(), 5);
        for &v in &path[1..path.len() - 1] {
            assert!(fresh_set.contains(&v), "path strays off the gadget");
        }
    }
    verify_cross_construction(&hw, &wprime, None, &cc).unwrap();
    assert!(check_column_swap(&hw, &cc, 500_000).unwrap());
}

#[test]
fn bare_cell_admits_no_cross() {
    let hw = HostedWall::standalone(3).unwrap();
    let cell = hw.param.cell(2, 1);
    let anchors = region_anchors(&hw, &cell.boundary, &[]).unwrap();
    let wprime = WallSubgraph::whole(&hw);
    assert!(construct_cross(&hw, &wprime, &anchors, 500_000).is_err());
}
