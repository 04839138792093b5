use matchwall::graph_core::Digraph;
use matchwall::routing::{
    build_aux_i, build_aux_ii, enumerate_jumps, integralize_linkage, max_disjoint_paths, x_paths,
    AuxMode, Linkage, XPathsOutcome,
};
use matchwall::walls::{gen_cylindrical_wall, make_tiling};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::collections::HashSet;

fn random_digraph(rng: &mut StdRng, n: usize, p: f64) -> Digraph {
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(p) {
                arcs.push((u, v));
            }
        }
    }
    Digraph::new(n, &arcs).expect("random digraph")
}

/// All simple X-Y paths (endpoints included, vertex lists).
fn all_xy_paths(d: &Digraph, x: &[usize], y: &[usize]) -> Vec<Vec<usize>> {
    let ys: HashSet<usize> = y.iter().copied().collect();
    let mut out = Vec::new();
    fn dfs(d: &Digraph, ys: &HashSet<usize>, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let cur = *path.last().unwrap();
        if ys.contains(&cur) {
            out.push(path.clone());
        }
        for &v in d.out_neighbours(cur) {
            if !path.contains(&v) {
                path.push(v);
                dfs(d, ys, path, out);
                path.pop();
            }
        }
    }
    for &s in x {
        dfs(d, &ys, &mut vec![s], &mut out);
    }
    out
}

/// Maximum number of pairwise vertex-disjoint paths from a candidate list.
fn max_disjoint_packing(paths: &[Vec<usize>], used: &mut HashSet<usize>, from: usize) -> usize {
    let mut best = 0;
    for i in from..paths.len() {
        if paths[i].iter().all(|v| !used.contains(v)) {
            for v in &paths[i] {
                used.insert(*v);
            }
            best = best.max(1 + max_disjoint_packing(paths, used, i + 1));
            for v in &paths[i] {
                used.remove(v);
            }
        }
    }
    best
}

#[test]
fn menger_trivial_cases() {
    // Single vertex in both X and Y: one zero-length path, separator {v}.
    let d = Digraph::new(3, &[(0, 1), (1, 2)]).unwrap();
    let (l, sep) = max_disjoint_paths(&d, &[1], &[1]).unwrap();
    assert_eq!(l.paths, vec![vec![1]]);
    assert_eq!(sep, vec![1]);

    // Digon: one path from u to v.
    let d = Digraph::new(2, &[(0, 1), (1, 0)]).unwrap();
    let (l, sep) = max_disjoint_paths(&d, &[0], &[1]).unwrap();
    assert_eq!(l.paths.len(), 1);
    assert_eq!(sep.len(), 1);
    assert_eq!(l.paths[0], vec![0, 1]);
}

#[test]
fn menger_matches_exhaustive_maximum() {
    let mut rng = StdRng::seed_from_u64(17);
    for trial in 0..30 {
        let n = 4 + (trial % 5);
        let d = random_digraph(&mut rng, n, 0.3);
        let x: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
        let y: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
        let (l, sep) = max_disjoint_paths(&d, &x, &y).unwrap();
        assert_eq!(l.paths.len(), sep.len(), "Menger equality");
        // Paths are valid and pairwise disjoint.
        let mut used: HashSet<usize> = HashSet::new();
        for p in &l.paths {
            assert!(x.contains(&p[0]) && y.contains(p.last().unwrap()));
            for t in 0..p.len() - 1 {
                assert!(d.has_arc(p[t], p[t + 1]));
            }
            for &v in p {
                assert!(used.insert(v), "paths share vertex {v}");
            }
        }
        // Separator verified by deletion.
        let keep: Vec<usize> = (0..n).filter(|v| !sep.contains(v)).collect();
        let (sub, map) = d.induced(&keep);
        let xs: Vec<usize> = (0..sub.n()).filter(|&v| x.contains(&map[v])).collect();
        let ys: Vec<usize> = (0..sub.n()).filter(|&v| y.contains(&map[v])).collect();
        assert!(
            all_xy_paths(&sub, &xs, &ys).is_empty(),
            "separator leaves an X-Y path"
        );
        // Optimality against brute force.
        let candidates = all_xy_paths(&d, &x, &y);
        let brute = max_disjoint_packing(&candidates, &mut HashSet::new(), 0);
        assert_eq!(l.paths.len(), brute, "trial {trial}: maximum matches");
    }
}

/// Exhaustive maximum X-path packing: interiors pairwise disjoint and
/// outside X; each x starts at most one path and ends at most one path.
fn oracle_max_x_paths(d: &Digraph, x: &[usize]) -> usize {
    let xset: HashSet<usize> = x.iter().copied().collect();
    let candidates: Vec<Vec<usize>> = all_xy_paths(d, x, x)
        .into_iter()
        .filter(|p| {
            p.len() >= 2
                && p[0] != *p.last().unwrap()
                && p[1..p.len() - 1].iter().all(|v| !xset.contains(v))
        })
        .collect();
    fn pack(
        c: &[Vec<usize>],
        from: usize,
        interior: &mut HashSet<usize>,
        starts: &mut HashSet<usize>,
        ends: &mut HashSet<usize>,
    ) -> usize {
        let mut best = 0;
        for i in from..c.len() {
            let p = &c[i];
            if starts.contains(&p[0]) || ends.contains(p.last().unwrap()) {
                continue;
            }
            if p[1..p.len() - 1].iter().any(|v| interior.contains(v)) {
                continue;
            }
            starts.insert(p[0]);
            ends.insert(*p.last().unwrap());
            for v in &p[1..p.len() - 1] {
                interior.insert(*v);
            }
            best = best.max(1 + pack(c, i + 1, interior, starts, ends));
            starts.remove(&p[0]);
            ends.remove(p.last().unwrap());
            for v in &p[1..p.len() - 1] {
                interior.remove(v);
            }
        }
        best
    }
    pack(
        &candidates,
        0,
        &mut HashSet::new(),
        &mut HashSet::new(),
        &mut HashSet::new(),
    )
}

/// Interiors pairwise disjoint; each x at most one start and one end.
fn assert_disjoint_x_paths(ps: &[Vec<usize>], _x: &[usize]) {
    let mut interior = HashSet::new();
    let mut starts = HashSet::new();
    let mut ends = HashSet::new();
    for p in ps {
        assert!(starts.insert(p[0]), "start reused");
        assert!(ends.insert(*p.last().unwrap()), "end reused");
        for &v in &p[1..p.len() - 1] {
            assert!(interior.insert(v), "interior vertex {v} reused");
        }
    }
}

#[test]
fn x_paths_cycle_example() {
    // Directed 4-cycle, X = two opposite vertices, k = 2.
    let d = Digraph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
    match x_paths(&d, &[0, 2], 2).unwrap() {
        XPathsOutcome::Paths(ps) => {
            assert_eq!(ps.len(), 2);
            assert_disjoint_x_paths(&ps, &[0, 2]);
        }
        XPathsOutcome::HittingSet(_) => panic!("two disjoint X-paths exist"),
    }
}

#[test]
fn x_paths_empty_hitting_set() {
    // No X-path at all: two isolated cycles through single X vertices.
    let d = Digraph::new(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
    match x_paths(&d, &[0, 3], 1).unwrap() {
        XPathsOutcome::HittingSet(h) => assert!(h.is_empty()),
        XPathsOutcome::Paths(_) => panic!("no X-path exists"),
    }
}

#[test]
fn x_paths_dichotomy_matches_exhaustive() {
    let mut rng = StdRng::seed_from_u64(23);
    for trial in 0..25 {
        let n = 5 + (trial % 5);
        let d = random_digraph(&mut rng, n, 0.25);
        let x: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
        if x.len() < 2 {
            continue;
        }
        let maximum = oracle_max_x_paths(&d, &x);
        for k in 1..=3usize {
            match x_paths(&d, &x, k).unwrap() {
                XPathsOutcome::Paths(ps) => {
                    assert_eq!(ps.len(), k);
                    assert!(maximum >= k, "trial {trial}: claimed paths beyond maximum");
                    let xset: HashSet<usize> = x.iter().copied().collect();
                    for p in &ps {
                        assert!(p.len() >= 2);
                        assert!(xset.contains(&p[0]) && xset.contains(p.last().unwrap()));
                        assert!(p[1..p.len() - 1].iter().all(|v| !xset.contains(v)));
                        for t in 0..p.len() - 1 {
                            assert!(d.has_arc(p[t], p[t + 1]));
                        }
                    }
                    assert_disjoint_x_paths(&ps, &x);
                }
                XPathsOutcome::HittingSet(h) => {
                    assert!(maximum < k, "trial {trial}: hitting set despite {maximum} paths");
                    assert!(h.len() <= 2 * k);
                    // Verified by deletion.
                    let keep: Vec<usize> = (0..n).filter(|v| !h.contains(v)).collect();
                    let (sub, map) = d.induced(&keep);
                    let xs: Vec<usize> =
                        (0..sub.n()).filter(|&v| x.contains(&map[v])).collect();
                    assert_eq!(oracle_max_x_paths(&sub, &xs), 0);
                }
            }
        }
    }
}

#[test]
fn integralize_small_examples() {
    // Two vertex-disjoint paths, k = 1: either path works.
    let d = Digraph::new(6, &[(0, 1), (1, 2), (3, 4), (4, 5)]).unwrap();
    let l = Linkage {
        paths: vec![vec![0, 1, 2], vec![3, 4, 5]],
        multiplicity: 2,
    };
    let out = integralize_linkage(&d, &l, 1, &[0, 3], &[2, 5]).unwrap();
    assert_eq!(out.paths.len(), 1);
    assert_eq!(out.multiplicity, 1);

    // Two paths sharing one vertex, k = 1.
    let d = Digraph::new(5, &[(0, 2), (2, 3), (1, 2), (2, 4)]).unwrap();
    let l = Linkage {
        paths: vec![vec![0, 2, 3], vec![1, 2, 4]],
        multiplicity: 2,
    };
    let out = integralize_linkage(&d, &l, 1, &[0, 1], &[3, 4]).unwrap();
    assert_eq!(out.paths.len(), 1);

    // Order mismatch rejected.
    assert!(integralize_linkage(&d, &l, 2, &[0, 1], &[3, 4]).is_err());
}

#[test]
fn integralize_random_half_integral_families() {
    let mut rng = StdRng::seed_from_u64(31);
    let mut done = 0;
    'outer: for _ in 0..200 {
        if done >= 12 {
            break;
        }
        let n = 8 + (rng.gen_range(0..5));
        let d = random_digraph(&mut rng, n, 0.3);
        let x: Vec<usize> = (0..n / 2).collect();
        let y: Vec<usize> = (n / 2..n).collect();
        // Build a half-integral linkage of order 2 (k = 1) by sampling two
        // X-Y paths whose shared vertices stay within multiplicity 2.
        let candidates = all_xy_paths(&d, &x, &y);
        if candidates.len() < 2 {
            continue;
        }
        for i in 0..candidates.len().min(8) {
            for j in i + 1..candidates.len().min(8) {
                let l = Linkage {
                    paths: vec![candidates[i].clone(), candidates[j].clone()],
                    multiplicity: 2,
                };
                if l.actual_multiplicity() > 2 {
                    continue;
                }
                let out = integralize_linkage(&d, &l, 1, &x, &y).unwrap();
                assert_eq!(out.paths.len(), 1);
                let allowed: HashSet<usize> = l.vertices().into_iter().collect();
                for &v in &out.paths[0] {
                    assert!(allowed.contains(&v), "output stays inside the linkage");
                }
                done += 1;
                continue 'outer;
            }
        }
    }
    assert!(done >= 12, "enough random instances exercised");
}

#[test]
fn jumps_on_standalone_wall_are_empty() {
    let w = gen_cylindrical_wall(6);
    let embed: Vec<usize> = (0..w.digraph.n()).collect();
    let (reports, truncated) = enumerate_jumps(&w.digraph, &w, &embed, 1, 100_000).unwrap();
    assert!(reports.is_empty());
    assert!(!truncated);
}

#[test]
fn planted_jumps_classified() {
    // Wall of order 6 with width-1 tilings (ξ, ξ' ∈ [1,2]).
    let w = gen_cylindrical_wall(6);
    let n = w.digraph.n();
    let embed: Vec<usize> = (0..n).collect();

    // Long jump: a chord between far-apart rows whose endpoints lie in
    // columns covered by every width-1 tiling (columns 3..5).
    let a = w.at(0, 4); // column 3, row 1
    let b = w.at(12, 8); // column 5, row 7
    let mut arcs = w.digraph.arcs();
    arcs.push((a, b));
    let d = Digraph::new(n, &arcs).unwrap();
    let (reports, _) = enumerate_jumps(&d, &w, &embed, 1, 100_000).unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0].classification, "w-long");
    assert!(reports[0].witness.is_none());
    assert_eq!(reports[0].path, vec![a, b]);

    // Short jump: chord inside a single cell.
    let cell = w.cell(3, 5);
    let (u, v) = (cell.boundary[0], cell.boundary[2]);
    let chord = if d.has_arc(u, v) { (v, u) } else { (u, v) };
    let mut arcs = w.digraph.arcs();
    arcs.push(chord);
    let d = Digraph::new(n, &arcs).unwrap();
    let (reports, _) = enumerate_jumps(&d, &w, &embed, 1, 100_000).unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0].classification, "short");
    assert!(reports[0].witness.is_some());
}

#[test]
fn aux_i_structure() {
    let w = gen_cylindrical_wall(6);
    let embed: Vec<usize> = (0..w.digraph.n()).collect();
    let tiling = make_tiling(&w, 1, 2, 1).unwrap();

    // A colour with no tiles in the slice leaves the digraph unchanged.
    let missing = (1..=4u8)
        .find(|&c| tiling.tiles_of_colour(c).is_empty())
        .unwrap();
    let (aux, x_out, x_in, y_i) =
        build_aux_i(&w.digraph, &w, &embed, &tiling, missing, (1, 6)).unwrap();
    assert_eq!(aux.mode, AuxMode::I);
    assert!(x_out.is_empty() && x_in.is_empty());
    assert_eq!(aux.digraph.n(), w.digraph.n());
    assert_eq!(aux.digraph.arcs().len(), w.digraph.arcs().len());
    // |Y_I| = 4 * floor(3k/4) on an untouched wall (order 6 = 3k, k = 2).
    assert_eq!(y_i.len(), 4 * ((3 * 2) / 4));

    // A present colour: 2 added vertices per tile, internals deleted.
    let present = tiling.colours[0];
    let tiles = tiling.tiles_of_colour(present).len();
    let (aux, x_out, x_in, _) =
        build_aux_i(&w.digraph, &w, &embed, &tiling, present, (1, 6)).unwrap();
    assert_eq!(x_out.len(), tiles);
    assert_eq!(x_in.len(), tiles);
    assert_eq!(aux.added.len(), 2 * tiles);
    assert!(!aux.deleted.is_empty());
    // Terminal degrees equal the centre size (6 vertices per cell).
    for &xo in &x_out {
        assert_eq!(aux.digraph.out_neighbours(xo).len(), 6);
        assert_eq!(aux.digraph.in_neighbours(xo).len(), 0);
    }
    for &xi in &x_in {
        assert_eq!(aux.digraph.in_neighbours(xi).len(), 6);
        assert_eq!(aux.digraph.out_neighbours(xi).len(), 0);
    }
    for &a in &aux.added {
        assert!(aux.tile_map.contains_key(&a));
    }
}

#[test]
fn aux_ii_structure_and_jump_correspondence() {
    let w = gen_cylindrical_wall(6);
    let n = w.digraph.n();
    let embed: Vec<usize> = (0..n).collect();
    let tiling = make_tiling(&w, 1, 2, 1).unwrap();
    let colour = tiling.colours[0];

    // Perimeter violation rejected: tiles start at column 2, so a slice
    // with boundary column 3 meets them.
    assert!(build_aux_ii(&w.digraph, &w, &embed, &tiling, colour, (3, 6)).is_err());

    // Valid slice covering the whole wall: tiles span columns 2..5.
    let (aux, x_ii) = build_aux_ii(&w.digraph, &w, &embed, &tiling, colour, (1, 6)).unwrap();
    assert_eq!(aux.mode, AuxMode::II);
    let tiles: Vec<usize> = (0..tiling.tiles.len())
        .filter(|&t| tiling.colours[t] == colour)
        .collect();
    assert_eq!(x_ii.len(), tiles.len());
    // Symmetric wiring to interior + centre.
    for &x in &x_ii {
        let outs: HashSet<usize> = aux.digraph.out_neighbours(x).iter().copied().collect();
        let ins: HashSet<usize> = aux.digraph.in_neighbours(x).iter().copied().collect();
        assert_eq!(outs, ins);
        assert!(!outs.is_empty());
    }
    // Everything outside the chosen tiles was deleted.
    assert!(!aux.deleted.is_empty());

    // No X-path between two x_T's on the bare wall.
    assert_eq!(oracle_has_x_path(&aux.digraph, &x_ii), false);

    // Plant a jump joining the interiors of two colour-i tiles: now an
    // X-path appears.
    let t1 = &tiling.tiles[tiles[0]];
    let t2 = &tiling.tiles[tiles[1]];
    let (u, v) = (t1.internals[0], t2.internals[0]);
    let mut arcs = w.digraph.arcs();
    arcs.push((u, v));
    let d2 = Digraph::new(n, &arcs).unwrap();
    let (aux2, x_ii2) = build_aux_ii(&d2, &w, &embed, &tiling, colour, (1, 6)).unwrap();
    assert!(oracle_has_x_path(&aux2.digraph, &x_ii2));
}

fn oracle_has_x_path(d: &Digraph, x: &[usize]) -> bool {
    // BFS from each x through non-X vertices to another x.
    let xset: HashSet<usize> = x.iter().copied().collect();
    for &s in x {
        let mut seen = HashSet::new();
        seen.insert(s);
        let mut q = vec![s];
        while let Some(u) = q.pop() {
            for &v in d.out_neighbours(u) {
                if xset.contains(&v) {
                    if v != s {
                        return true;
                    }
                    continue;
                }
                if seen.insert(v) {
                    q.push(v);
                }
            }
        }
    }
    false
}
