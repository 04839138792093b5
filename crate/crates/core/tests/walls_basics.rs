use matchwall::graph_core::{digraphs_isomorphic, m_direction, Graph};
use matchwall::planarity::is_planar;
use matchwall::walls::{
    gen_cylindrical_grid, gen_cylindrical_wall, gen_matching_grid, gen_matching_wall,
    make_tiling, mixed_matching_twin_walls, tiling_slice_and_tier2,
};
use std::collections::{BTreeMap, BTreeSet, HashSet};

fn underlying(d: &matchwall::graph_core::Digraph) -> Graph {
    let mut edges: Vec<(usize, usize)> = d
        .arcs()
        .into_iter()
        .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
        .collect();
    edges.sort_unstable();
    edges.dedup();
    Graph::new(d.n(), &edges).expect("underlying graph")
}

#[test]
fn cylindrical_wall_counts_and_planarity() {
    for k in 2..=6 {
        let w = gen_cylindrical_wall(k);
        assert_eq!(w.digraph.n(), 8 * k * k, "wall order {k} vertex count");
        let g = underlying(&w.digraph);
        assert_eq!(g.m(), 12 * k * k - 4 * k, "wall order {k} edge count");
        assert!(
            (0..g.n()).all(|v| g.degree(v) <= 3),
            "wall order {k} is subcubic"
        );
        assert!(is_planar(&g), "wall order {k} underlying graph is planar");
    }
}

#[test]
fn cylindrical_grid_counts() {
    for k in 2..=6 {
        let d = gen_cylindrical_grid(k);
        assert_eq!(d.n(), 2 * k * k);
        assert_eq!(d.arcs().len(), 2 * k * k + 2 * k * (k - 1));
    }
}

#[test]
fn matching_grid_direction_is_cylindrical_grid() {
    for k in 2..=5 {
        let (b, m) = gen_matching_grid(k);
        assert_eq!(b.n(), 4 * k * k);
        let d = m_direction(&b, &m).expect("direction");
        let g = gen_cylindrical_grid(k);
        assert!(
            digraphs_isomorphic(&d, &g),
            "matching grid order {k} directs to the cylindrical grid"
        );
    }
}

#[test]
fn matching_wall_splits_back_to_cylindrical_wall() {
    for k in 2..=5 {
        let mw = gen_matching_wall(k, None).expect("matching wall");
        assert_eq!(mw.graph.n(), 16 * k * k, "matching wall order {k}");
        assert!(matchwall::graph_core::is_matching_covered(&mw.graph));
        let d = m_direction(&mw.graph, &mw.matching).expect("direction");
        assert_eq!(
            d.arcs(),
            mw.param.digraph.arcs(),
            "direction of the matching wall is the cylindrical wall"
        );
    }
}

#[test]
fn matching_wall_bisubdivision() {
    let base = gen_cylindrical_wall(2);
    // Pick a non-matching arc: any arc of the digraph works, since split
    // turns arcs into non-matching edges.
    let arc = base.digraph.arcs()[0];
    let mut sub = BTreeMap::new();
    sub.insert(arc, 3usize);
    let mw = gen_matching_wall(2, Some(&sub)).expect("bisubdivided wall");
    // One length-3 path adds one matched pair of inner vertices.
    assert_eq!(mw.graph.n(), 16 * 4 + 2);
    assert!(matchwall::graph_core::is_matching_covered(&mw.graph));
    assert_eq!(mw.subdivisions[&arc].len(), 2);
    for &v in &mw.subdivisions[&arc] {
        assert!(v < mw.graph.n());
    }

    let mut bad = BTreeMap::new();
    bad.insert(arc, 4usize);
    assert!(gen_matching_wall(2, Some(&bad)).is_err(), "even length rejected");
}

#[test]
fn column_cycles_partition_vertices() {
    for k in 2..=4 {
        let w = gen_cylindrical_wall(k);
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        for c in 1..=k {
            let cyc = w.column_cycle(c);
            assert_eq!(cyc.len(), 8 * k, "column cycle length");
            // Consecutive vertices are joined by arcs in some direction.
            for t in 0..cyc.len() {
                let (a, b) = (cyc[t], cyc[(t + 1) % cyc.len()]);
                assert!(
                    w.digraph.has_arc(a, b) || w.digraph.has_arc(b, a),
                    "column {c} is a cycle in the underlying graph"
                );
            }
            for &v in &cyc {
                assert!(seen.insert(v), "column cycles are disjoint");
            }
        }
        assert_eq!(seen.len(), w.digraph.n(), "column cycles cover the wall");
    }
}

#[test]
fn cells_are_faces() {
    let k = 3;
    let w = gen_cylindrical_wall(k);
    let cells = w.cells();
    assert_eq!(cells.len(), (k - 1) * 4 * k);
    for cell in &cells {
        assert_eq!(cell.boundary.len(), 6);
        let distinct: HashSet<usize> = cell.boundary.iter().copied().collect();
        assert_eq!(distinct.len(), 6, "cell boundary has six vertices");
        for t in 0..6 {
            let (a, b) = (cell.boundary[t], cell.boundary[(t + 1) % 6]);
            assert!(
                w.digraph.has_arc(a, b) || w.digraph.has_arc(b, a),
                "cell boundary is a cycle"
            );
        }
    }
}

#[test]
fn slices_and_strips() {
    let w = gen_cylindrical_wall(4);
    let s = w.slice(2, 2).expect("slice");
    assert_eq!(s.order, 3);
    assert_eq!(s.digraph.n(), 8 * 4 * 3 / 2 * 2);
    assert_eq!(s.n_pos, w.n_pos);
    // Slice of a slice composes.
    let s2 = s.slice(1, 1).expect("inner slice");
    assert_eq!(s2.order, 2);

    let st = w.strip(2, 4).expect("strip");
    assert_eq!(st.first_row, 2);
    assert_eq!(st.last_row, 4);
    assert_eq!(st.digraph.n(), 3 * 2 * w.n_layers);

    assert!(w.slice(4, 2).is_err());
    assert!(w.strip(3, 9).is_err());
}

#[test]
fn triadic_partition() {
    let w = gen_cylindrical_wall(6);
    let (slices, strips) = w.triadic().expect("triadic");
    assert_eq!(slices.len(), 3);
    assert_eq!(strips.len(), 3);
    for s in &slices {
        assert_eq!(s.order, 2);
    }
    let total: usize = strips.iter().map(|s| s.digraph.n()).sum();
    assert_eq!(total, w.digraph.n(), "strips partition the vertices");
    assert!(gen_cylindrical_wall(4).triadic().is_err());
}

#[test]
fn tile_structure() {
    let w = gen_cylindrical_wall(6);
    let t = w.tile(2, 3, 1).expect("tile");
    // Width-1 tile: 4 columns by 4 row pairs.
    assert_eq!(t.vertices.len(), 4 * 2 * 4 * 2);
    assert_eq!(t.upper[0], t.corners[0]);
    assert_eq!(*t.upper.last().unwrap(), t.corners[1]);
    assert_eq!(*t.lower.last().unwrap(), t.corners[2]);
    assert_eq!(t.lower[0], t.corners[3]);
    // Corners sit on the boundary columns.
    assert_eq!(w.column_of(t.corners[0]), 2);
    assert_eq!(w.column_of(t.corners[1]), 5);
    // Centre is a cell fully inside the tile.
    for &v in &t.centre {
        assert!(t.contains(v), "centre inside tile");
    }
    let per: HashSet<usize> = t.perimeter().into_iter().collect();
    for &v in &t.centre {
        assert!(!per.contains(&v), "centre avoids the perimeter");
    }
    for &v in &t.internals {
        assert!(!per.contains(&v));
        assert!(!t.centre.contains(&v));
    }
    // Wrapped rows still produce a tile.
    let rows = w.rows();
    let t2 = w.tile(1, rows - 1, 1).expect("wrapped tile");
    assert_eq!(t2.vertices.len(), t.vertices.len());
}

#[test]
fn tiling_offsets_and_colours() {
    // Wall of order 15 = 3 * 5; width 1, offsets 1: second tile column is 9.
    let w = gen_cylindrical_wall(15);
    let tiling = make_tiling(&w, 1, 1, 1).expect("tiling");
    let cols: BTreeSet<usize> = tiling.tiles.iter().map(|t| t.i).collect();
    assert!(cols.contains(&6) && cols.contains(&9), "columns 6 and 9 used");
    // Interiors are pairwise disjoint.
    let mut seen: HashSet<usize> = HashSet::new();
    for t in &tiling.tiles {
        for v in t.interior() {
            assert!(seen.insert(v), "tile interiors are disjoint");
        }
    }
    // Colours follow the chequerboard of enumeration indices.
    for (t, &c) in tiling.tiles.iter().zip(tiling.colours.iter()) {
        assert!((1..=4).contains(&c), "colour in range");
        let p = (t.i - (15 / 3 + 2 - 1)) / 3 + 1;
        assert_eq!((c as usize - 1) % 2, p % 2, "column parity encoded");
    }
    for c in 1..=4u8 {
        assert!(
            !tiling.tiles_of_colour(c).is_empty(),
            "every colour appears"
        );
    }
}

#[test]
fn tilings_cover_middle_cells() {
    // Order 6 wall, width 1: over all offsets and both parametrisations,
    // every cell of the middle slice lies inside some tile.
    let w = gen_cylindrical_wall(6);
    let mut uncovered: HashSet<(usize, usize)> = (0..w.n_pos).map(|p| (3usize, p)).collect();
    for mirrored in [false, true] {
        let wall = if mirrored { w.mirror() } else { w.clone() };
        for xi in 1..=2 {
            for xi_p in 1..=2 {
                let tiling = make_tiling(&wall, 1, xi, xi_p).expect("tiling");
                for t in &tiling.tiles {
                    uncovered.retain(|&(gap, pos)| {
                        !wall.cell(gap, pos).boundary.iter().all(|&v| t.contains(v))
                    });
                }
            }
        }
    }
    assert!(
        uncovered.is_empty(),
        "cells left uncovered: {:?}",
        uncovered
    );
}

#[test]
fn wall_distance() {
    let w = gen_cylindrical_wall(4);
    let a = w.at(0, 0); // column 1, row 1
    let b = w.at(2, 6); // column 4, row 2
    assert_eq!(w.w_distance(a, b).unwrap(), 3);
    // Row distance is cyclic.
    let c = w.at(w.n_pos - 1, 0); // row 8
    assert_eq!(w.w_distance(a, c).unwrap(), 1);
    assert!(w.w_distance(0, w.digraph.n()).is_err());
}

#[test]
fn twin_walls_from_mixed_matching() {
    for k in 2..=4 {
        let w = gen_cylindrical_wall(k);
        let tw = mixed_matching_twin_walls(&w).expect("twin walls");
        assert_eq!(tw.up_columns.len(), k - k / 2);
        assert_eq!(tw.down_columns.len(), k / 2);
        // Up columns run against the original orientation.
        for cyc in &tw.up_columns {
            for t in 0..cyc.len() {
                let (a, b) = (cyc[t], cyc[(t + 1) % cyc.len()]);
                assert!(tw.direction.has_arc(a, b));
                assert!(w.digraph.has_arc(b, a), "reversed relative to the wall");
            }
        }
        // The mixed matching differs from the canonical one exactly on the
        // flipped columns.
        let (_, m) = matchwall::graph_core::split(&w.digraph).expect("split");
        let me: HashSet<(usize, usize)> = m.edges().into_iter().collect();
        let mx: HashSet<(usize, usize)> = tw.mixed.edges().into_iter().collect();
        let diff: Vec<(usize, usize)> = me.symmetric_difference(&mx).copied().collect();
        let flipped: HashSet<usize> = tw
            .up_columns
            .iter()
            .flat_map(|c| c.iter().copied())
            .collect();
        for &(u, v) in &diff {
            let x = u.min(v) % w.digraph.n();
            assert!(flipped.contains(&x), "difference confined to flipped columns");
        }
    }
}

#[test]
fn tile_matching_is_perfect_and_local() {
    let mw = gen_matching_wall(6, None).expect("matching wall");
    let tile = mw.param.tile(2, 3, 1).expect("tile");
    let mt = mw.tile_matching(&tile).expect("tile matching");
    let me: HashSet<(usize, usize)> = mw.matching.edges().into_iter().collect();
    let mx: HashSet<(usize, usize)> = mt.edges().into_iter().collect();
    let diff: Vec<(usize, usize)> = me.symmetric_difference(&mx).copied().collect();
    let cyc: HashSet<usize> = mw
        .column_conformal_cycle(2)
        .into_iter()
        .collect();
    assert!(!diff.is_empty(), "matching actually changes");
    for &(u, v) in &diff {
        assert!(cyc.contains(&u) && cyc.contains(&v), "change is on the left column");
    }
}

#[test]
fn extension_and_slice_walls() {
    let w = gen_cylindrical_wall(6);
    let tiling = make_tiling(&w, 1, 2, 1).expect("tiling");
    // Colour 3 does not occur among tiles at a single column position, so
    // the tier-II search is skipped and the zoomed walls come back as-is.
    let missing = (1..=4u8)
        .find(|&c| tiling.tiles_of_colour(c).is_empty())
        .expect("a missing colour");
    let (ext, sl, assignment) =
        tiling_slice_and_tier2(&w, (1, 5), &tiling, missing, 1).expect("zoomed walls");
    assert!(assignment.is_empty());
    assert_eq!(ext.param.n_pos, w.n_pos);
    assert!(ext.param.order >= 5);
    assert_eq!(sl.host_columns.len(), sl.param.order);
    // Zoomed walls are walls: right vertex count and subcubic.
    let g = underlying(&sl.param.digraph);
    assert!((0..g.n()).all(|v| g.degree(v) <= 3));
}
