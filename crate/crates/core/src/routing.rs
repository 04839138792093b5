//! Path-routing kernels: Menger-style disjoint paths with separators,
//! directed X-paths with the `2k` hitting-set dichotomy, half-integral to
//! integral linkage extraction, jump enumeration over walls, and the two
//! auxiliary digraph constructions used by the flat-wall pipeline.

use crate::error::{Error, Result};
use crate::graph_core::Digraph;
use crate::walls::{make_tiling, Tiling, WallParametrization};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{HashMap, HashSet, VecDeque};

/// A family of directed paths with a declared per-vertex multiplicity
/// bound (1 = integral, 2 = half-integral).
#[derive(Debug, Clone, Serialize)]
pub struct Linkage {
    pub paths: Vec<Vec<usize>>,
    pub multiplicity: usize,
}

impl Linkage {
    /// Largest number of paths any vertex lies on.
    pub fn actual_multiplicity(&self) -> usize {
        let mut count: HashMap<usize, usize> = HashMap::new();
        for p in &self.paths {
            for &v in p {
                *count.entry(v).or_insert(0) += 1;
            }
        }
        count.values().copied().max().unwrap_or(0)
    }

    pub fn vertices(&self) -> Vec<usize> {
        let mut vs: Vec<usize> = self.paths.iter().flatten().copied().collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }
}

// ---------------------------------------------------------------------------
// Unit-capacity max flow on an explicit network (Edmonds-Karp).
// ---------------------------------------------------------------------------

const INF: i64 = i64::MAX / 4;

struct Flow {
    to: Vec<usize>,
    cap: Vec<i64>,
    adj: Vec<Vec<usize>>,
}

impl Flow {
    fn new(n: usize) -> Flow {
        Flow {
            to: Vec::new(),
            cap: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    fn add(&mut self, u: usize, v: usize, c: i64) -> usize {
        let e = self.to.len();
        self.to.push(v);
        self.cap.push(c);
        self.adj[u].push(e);
        self.to.push(u);
        self.cap.push(0);
        self.adj[v].push(e + 1);
        e
    }

    fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        loop {
            let n = self.adj.len();
            let mut pred: Vec<Option<usize>> = vec![None; n];
            let mut q = VecDeque::new();
            q.push_back(s);
            let mut seen = vec![false; n];
            seen[s] = true;
            while let Some(u) = q.pop_front() {
                for &e in &self.adj[u] {
                    let v = self.to[e];
                    if !seen[v] && self.cap[e] > 0 {
                        seen[v] = true;
                        pred[v] = Some(e);
                        q.push_back(v);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            let mut bottleneck = INF;
            let mut v = t;
            while v != s {
                let e = pred[v].unwrap();
                bottleneck = bottleneck.min(self.cap[e]);
                v = self.to[e ^ 1];
            }
            let mut v = t;
            while v != s {
                let e = pred[v].unwrap();
                self.cap[e] -= bottleneck;
                self.cap[e ^ 1] += bottleneck;
                v = self.to[e ^ 1];
            }
            total += bottleneck;
        }
    }

    /// Flow sent along edge `e` (forward edge id as returned by `add`).
    fn flow_on(&self, e: usize) -> i64 {
        self.cap[e ^ 1]
    }

    /// Vertices reachable from `s` in the residual network.
    fn residual_reachable(&self, s: usize) -> Vec<bool> {
        let n = self.adj.len();
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut q = VecDeque::new();
        q.push_back(s);
        while let Some(u) = q.pop_front() {
            for &e in &self.adj[u] {
                let v = self.to[e];
                if !seen[v] && self.cap[e] > 0 {
                    seen[v] = true;
                    q.push_back(v);
                }
            }
        }
        seen
    }
}

/// Walks positive flow from `s` to `t`, consuming it, and returns the node
/// sequences of the resulting paths.
fn decompose_paths(f: &mut Flow, s: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    loop {
        // Find an outgoing edge from s with positive flow.
        let mut cur = s;
        let mut nodes = Vec::new();
        let mut moved = false;
        'walk: loop {
            for ei in 0..f.adj[cur].len() {
                let e = f.adj[cur][ei];
                if e % 2 == 0 && f.flow_on(e) > 0 {
                    f.cap[e] += 1;
                    f.cap[e ^ 1] -= 1;
                    cur = f.to[e];
                    moved = true;
                    if cur == t {
                        break 'walk;
                    }
                    nodes.push(cur);
                    continue 'walk;
                }
            }
            break 'walk;
        }
        if !moved || cur != t {
            return out;
        }
        out.push(nodes);
    }
}

// ---------------------------------------------------------------------------
// Menger: max vertex-disjoint X-Y paths with an equal-size separator.
// ---------------------------------------------------------------------------

/// Maximum family of pairwise vertex-disjoint directed X-Y paths together
/// with a vertex separator of the same size (vertices whose removal leaves
/// no X-Y path). Zero-length paths (a vertex in both X and Y) count.
pub fn max_disjoint_paths(
    d: &Digraph,
    x: &[usize],
    y: &[usize],
) -> Result<(Linkage, Vec<usize>)> {
    let n = d.n();
    for &v in x.iter().chain(y.iter()) {
        if v >= n {
            return Err(Error::VertexOutOfRange(v, n));
        }
    }
    let (s, t) = (2 * n, 2 * n + 1);
    let mut f = Flow::new(2 * n + 2);
    let vin = |v: usize| 2 * v;
    let vout = |v: usize| 2 * v + 1;
    let mut vertex_edge = vec![usize::MAX; n];
    for v in 0..n {
        vertex_edge[v] = f.add(vin(v), vout(v), 1);
    }
    for (u, v) in d.arcs() {
        f.add(vout(u), vin(v), INF);
    }
    for &v in x {
        f.add(s, vin(v), INF);
    }
    for &v in y {
        f.add(vout(v), t, INF);
    }
    f.max_flow(s, t);
    let reach = f.residual_reachable(s);
    let separator: Vec<usize> = (0..n)
        .filter(|&v| reach[vin(v)] && !reach[vout(v)])
        .collect();
    let mut paths = Vec::new();
    for nodes in decompose_paths(&mut f, s, t) {
        // Node sequence alternates in/out copies; keep one per vertex.
        let mut p: Vec<usize> = nodes.iter().filter(|&&u| u % 2 == 0).map(|&u| u / 2).collect();
        p.dedup();
        paths.push(p);
    }
    debug_assert_eq!(paths.len(), separator.len());
    Ok((
        Linkage {
            paths,
            multiplicity: 1,
        },
        separator,
    ))
}

// ---------------------------------------------------------------------------
// Directed X-paths: k disjoint paths or a verified hitting set of size ≤ 2k.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub enum XPathsOutcome {
    /// `k` pairwise vertex-disjoint directed X-paths.
    Paths(Vec<Vec<usize>>),
    /// Vertices whose removal leaves no directed X-path; size ≤ 2k.
    HittingSet(Vec<usize>),
}

/// Either `k` pairwise disjoint directed X-paths, or a verified hitting
/// set of size at most `2k`. An X-path has length ≥ 1, both endpoints in
/// `X`, and interior outside `X`. Two X-paths are disjoint when they share
/// no non-X vertex, and across the family each x ∈ X starts at most one
/// path and ends at most one path (so a directed cycle through two X
/// vertices yields two disjoint X-paths). The path search is exact up to
/// the enumeration cap: a hitting set is only returned when no `k`
/// disjoint X-paths exist.
pub fn x_paths(d: &Digraph, x: &[usize], k: usize) -> Result<XPathsOutcome> {
    if k == 0 {
        return Err(Error::Precondition("x_paths needs k >= 1".into()));
    }
    let mut xs: Vec<usize> = x.to_vec();
    xs.sort_unstable();
    xs.dedup();
    for &v in &xs {
        if v >= d.n() {
            return Err(Error::VertexOutOfRange(v, d.n()));
        }
    }
    // Fast path: a vertex-disjoint flow with every x playing both the
    // source and the sink role; degenerate paths (a cycle back to the
    // same x) are discarded.
    let fast = flow_x_paths(d, &xs);
    if fast.len() >= k {
        return Ok(XPathsOutcome::Paths(fast.into_iter().take(k).collect()));
    }
    // Exact search: enumerate all feasible X-paths and pack them subject
    // to the disjointness rules.
    let mut cap = 200_000usize;
    let candidates = enumerate_all_x_paths(d, &xs, &mut cap)?;
    let mut chosen: Vec<usize> = Vec::new();
    if pack_x_paths(&candidates, &xs, k, 0, &mut chosen) {
        return Ok(XPathsOutcome::Paths(
            chosen.iter().map(|&i| candidates[i].clone()).collect(),
        ));
    }
    // Fewer than k disjoint X-paths exist; find a hitting set of size at
    // most 2k by bounded branching on the vertices of shortest X-paths.
    for budget in 0..=2 * k {
        if let Some(h) = hitting_set_search(d, &xs, &mut Vec::new(), budget) {
            return Ok(XPathsOutcome::HittingSet(h));
        }
    }
    Err(Error::InconclusiveAtCaps(
        "no hitting set of size at most 2k found".into(),
    ))
}

/// Vertex-disjoint flow over split interior vertices with unit source and
/// sink capacities at every x; returns the non-degenerate paths.
fn flow_x_paths(d: &Digraph, xs: &[usize]) -> Vec<Vec<usize>> {
    let n = d.n();
    let xset: HashSet<usize> = xs.iter().copied().collect();
    let (s, t) = (2 * n, 2 * n + 1);
    let mut f = Flow::new(2 * n + 2);
    let vin = |v: usize| 2 * v;
    let vout = |v: usize| 2 * v + 1;
    for v in 0..n {
        if !xset.contains(&v) {
            f.add(vin(v), vout(v), 1);
        }
    }
    for (u, v) in d.arcs() {
        f.add(vout(u), vin(v), INF);
    }
    for &v in xs {
        // x participates only as the tail of its out-arcs (source side)
        // and the head of its in-arcs (sink side).
        f.add(s, vout(v), 1);
        f.add(vin(v), t, 1);
    }
    f.max_flow(s, t);
    let mut paths = Vec::new();
    for nodes in decompose_paths(&mut f, s, t) {
        let mut p = Vec::new();
        for &u in &nodes {
            let v = u / 2;
            if p.last() != Some(&v) {
                p.push(v);
            }
        }
        if p.len() >= 2 && p[0] != *p.last().unwrap() {
            paths.push(p);
        }
    }
    paths
}

/// All directed X-paths, canonically sorted; `budget` counts DFS steps.
fn enumerate_all_x_paths(
    d: &Digraph,
    xs: &[usize],
    budget: &mut usize,
) -> Result<Vec<Vec<usize>>> {
    let xset: HashSet<usize> = xs.iter().copied().collect();
    let mut out = Vec::new();
    fn dfs(
        d: &Digraph,
        xset: &HashSet<usize>,
        start: usize,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        budget: &mut usize,
    ) -> Result<()> {
        if *budget == 0 {
            return Err(Error::CapExceeded(
                "X-path enumeration exceeded its step budget".into(),
            ));
        }
        *budget -= 1;
        let cur = *path.last().unwrap();
        for &v in d.out_neighbours(cur) {
            if xset.contains(&v) {
                if v != start {
                    let mut p = path.clone();
                    p.push(v);
                    out.push(p);
                }
                continue;
            }
            if path.contains(&v) {
                continue;
            }
            path.push(v);
            dfs(d, xset, start, path, out, budget)?;
            path.pop();
        }
        Ok(())
    }
    for &s in xs {
        dfs(d, &xset, s, &mut vec![s], &mut out, budget)?;
    }
    out.sort_unstable();
    Ok(out)
}

/// Packs `k` candidate paths subject to the disjointness rules by ordered
/// branching over the candidate list.
fn pack_x_paths(
    candidates: &[Vec<usize>],
    xs: &[usize],
    k: usize,
    from: usize,
    chosen: &mut Vec<usize>,
) -> bool {
    if chosen.len() == k {
        return true;
    }
    if candidates.len() - from < k - chosen.len() {
        return false;
    }
    let xset: HashSet<usize> = xs.iter().copied().collect();
    let mut interior: HashSet<usize> = HashSet::new();
    let mut starts: HashSet<usize> = HashSet::new();
    let mut ends: HashSet<usize> = HashSet::new();
    for &i in chosen.iter() {
        let p = &candidates[i];
        starts.insert(p[0]);
        ends.insert(*p.last().unwrap());
        interior.extend(p[1..p.len() - 1].iter().copied());
    }
    for i in from..candidates.len() {
        let p = &candidates[i];
        if starts.contains(&p[0]) || ends.contains(p.last().unwrap()) {
            continue;
        }
        if p[1..p.len() - 1]
            .iter()
            .any(|v| interior.contains(v) || xset.contains(v))
        {
            continue;
        }
        chosen.push(i);
        if pack_x_paths(candidates, xs, k, i + 1, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Shortest directed X-path avoiding `blocked`, or None.
fn shortest_x_path(d: &Digraph, xs: &[usize], blocked: &[usize]) -> Option<Vec<usize>> {
    let xset: HashSet<usize> = xs.iter().copied().collect();
    let bset: HashSet<usize> = blocked.iter().copied().collect();
    let mut best: Option<Vec<usize>> = None;
    for &start in xs {
        if bset.contains(&start) {
            continue;
        }
        // BFS over non-X interior vertices.
        let mut pred: HashMap<usize, usize> = HashMap::new();
        let mut q = VecDeque::new();
        q.push_back(start);
        let mut found: Option<usize> = None;
        let mut seen: HashSet<usize> = HashSet::new();
        seen.insert(start);
        'bfs: while let Some(u) = q.pop_front() {
            for &v in d.out_neighbours(u) {
                if bset.contains(&v) || seen.contains(&v) {
                    continue;
                }
                if xset.contains(&v) {
                    if v != start {
                        pred.insert(v, u);
                        found = Some(v);
                        break 'bfs;
                    }
                    continue;
                }
                seen.insert(v);
                pred.insert(v, u);
                q.push_back(v);
            }
        }
        if let Some(end) = found {
            let mut p = vec![end];
            let mut cur = end;
            while cur != start {
                cur = pred[&cur];
                p.push(cur);
            }
            p.reverse();
            if best.as_ref().map_or(true, |b| p.len() < b.len()) {
                best = Some(p);
            }
        }
    }
    best
}

fn hitting_set_search(
    d: &Digraph,
    xs: &[usize],
    chosen: &mut Vec<usize>,
    budget: usize,
) -> Option<Vec<usize>> {
    match shortest_x_path(d, xs, chosen) {
        None => Some(chosen.clone()),
        Some(p) => {
            if budget == 0 {
                return None;
            }
            for &v in &p {
                chosen.push(v);
                if let Some(h) = hitting_set_search(d, xs, chosen, budget - 1) {
                    return Some(h);
                }
                chosen.pop();
            }
            None
        }
    }
}

// ---------------------------------------------------------------------------
// Half-integral to integral linkages.
// ---------------------------------------------------------------------------

/// From a half-integral X-Y linkage of order `2k` extracts `k` pairwise
/// vertex-disjoint X-Y paths whose vertices all lie inside the linkage.
pub fn integralize_linkage(
    d: &Digraph,
    linkage: &Linkage,
    k: usize,
    x: &[usize],
    y: &[usize],
) -> Result<Linkage> {
    if linkage.paths.len() != 2 * k {
        return Err(Error::Precondition(format!(
            "linkage has {} paths, expected 2k = {}",
            linkage.paths.len(),
            2 * k
        )));
    }
    let xset: HashSet<usize> = x.iter().copied().collect();
    let yset: HashSet<usize> = y.iter().copied().collect();
    for p in &linkage.paths {
        if p.is_empty() || !xset.contains(&p[0]) || !yset.contains(p.last().unwrap()) {
            return Err(Error::Precondition(
                "linkage path does not run from X to Y".into(),
            ));
        }
        for t in 0..p.len() - 1 {
            if !d.has_arc(p[t], p[t + 1]) {
                return Err(Error::Precondition(format!(
                    "({}, {}) is not an arc of the digraph",
                    p[t],
                    p[t + 1]
                )));
            }
        }
    }
    if linkage.actual_multiplicity() > 2 {
        return Err(Error::Precondition(
            "linkage is not half-integral: a vertex lies on three paths".into(),
        ));
    }
    let keep = linkage.vertices();
    let (sub, map) = d.induced(&keep);
    let back: HashMap<usize, usize> = map.iter().enumerate().map(|(a, &b)| (b, a)).collect();
    let xs: Vec<usize> = x.iter().filter_map(|v| back.get(v).copied()).collect();
    let ys: Vec<usize> = y.iter().filter_map(|v| back.get(v).copied()).collect();
    let (integral, _) = max_disjoint_paths(&sub, &xs, &ys)?;
    if integral.paths.len() < k {
        return Err(Error::Precondition(format!(
            "only {} disjoint paths inside the linkage, expected {}",
            integral.paths.len(),
            k
        )));
    }
    let paths: Vec<Vec<usize>> = integral
        .paths
        .into_iter()
        .take(k)
        .map(|p| p.into_iter().map(|v| map[v]).collect())
        .collect();
    Ok(Linkage {
        paths,
        multiplicity: 1,
    })
}

// ---------------------------------------------------------------------------
// Jump enumeration and classification.
// ---------------------------------------------------------------------------

/// Where the endpoints of a jump land under one tiling.
#[derive(Debug, Clone, Serialize)]
pub struct TilePlacement {
    pub xi: usize,
    pub xi_prime: usize,
    pub mirrored: bool,
    /// Indices (into the tiling's tile list) of tiles containing the start.
    pub start_tiles: Vec<usize>,
    pub end_tiles: Vec<usize>,
}

/// A directed V(W)-path edge-disjoint from the wall, classified against
/// all width-`w` tilings of the wall.
#[derive(Debug, Clone, Serialize)]
pub struct JumpReport {
    /// Path in digraph vertex ids; endpoints lie on the wall.
    pub path: Vec<usize>,
    pub placements: Vec<TilePlacement>,
    /// "w-long" if for every tiling the endpoints lie in tiles and never
    /// share one; otherwise "short".
    pub classification: String,
    /// For short jumps, the (ξ, ξ', mirrored) tiling witnessing shortness.
    pub witness: Option<(usize, usize, bool)>,
}

/// Enumerates directed V(W)-paths that are edge-disjoint from the wall
/// (jumps), each classified short or w-long against every tiling
/// T_{ξ,ξ'} with ξ, ξ' ∈ [1, w+1] in both parametrisations. `embed` maps
/// wall vertices to digraph vertices. Returns the reports plus a flag set
/// when the enumeration cap truncated the list.
pub fn enumerate_jumps(
    d: &Digraph,
    wall: &WallParametrization,
    embed: &[usize],
    w: usize,
    cap: usize,
) -> Result<(Vec<JumpReport>, bool)> {
    if embed.len() != wall.digraph.n() {
        return Err(Error::Precondition(
            "embedding must map every wall vertex".into(),
        ));
    }
    let wall_vertex: HashMap<usize, usize> = embed
        .iter()
        .enumerate()
        .map(|(wv, &dv)| (dv, wv))
        .collect();
    let wall_arcs: HashSet<(usize, usize)> = wall
        .digraph
        .arcs()
        .into_iter()
        .map(|(a, b)| (embed[a], embed[b]))
        .collect();
    // Tilings for classification, over both parametrisations.
    let mut tilings: Vec<(Tiling, bool)> = Vec::new();
    for mirrored in [false, true] {
        let host = if mirrored { wall.mirror() } else { wall.clone() };
        for xi in 1..=w + 1 {
            for xi_p in 1..=w + 1 {
                tilings.push((make_tiling(&host, w, xi, xi_p)?, mirrored));
            }
        }
    }
    // Enumerate simple paths start -> wall with interior off the wall,
    // parallel over start vertices; each worker reports (paths, truncated).
    let starts: Vec<usize> = embed.to_vec();
    let results: Vec<(Vec<Vec<usize>>, bool)> = starts
        .par_iter()
        .map(|&s| {
            let mut found = Vec::new();
            let mut truncated = false;
            let mut budget = cap;
            let mut stack = vec![s];
            let mut used: HashSet<usize> = HashSet::new();
            used.insert(s);
            jump_dfs(
                d,
                &wall_vertex,
                &wall_arcs,
                s,
                &mut stack,
                &mut used,
                &mut found,
                &mut budget,
                &mut truncated,
            );
            (found, truncated)
        })
        .collect();
    let mut paths: Vec<Vec<usize>> = Vec::new();
    let mut truncated = false;
    for (ps, tr) in results {
        paths.extend(ps);
        truncated |= tr;
    }
    paths.sort_unstable();
    paths.dedup();
    let reports = paths
        .into_iter()
        .map(|p| classify_jump(p, &wall_vertex, embed, &tilings))
        .collect();
    Ok((reports, truncated))
}

#[allow(clippy::too_many_arguments)]
fn jump_dfs(
    d: &Digraph,
    wall_vertex: &HashMap<usize, usize>,
    wall_arcs: &HashSet<(usize, usize)>,
    start: usize,
    stack: &mut Vec<usize>,
    used: &mut HashSet<usize>,
    found: &mut Vec<Vec<usize>>,
    budget: &mut usize,
    truncated: &mut bool,
) {
    if *budget == 0 {
        *truncated = true;
        return;
    }
    *budget -= 1;
    let cur = *stack.last().unwrap();
    for &v in d.out_neighbours(cur) {
        if wall_arcs.contains(&(cur, v)) || used.contains(&v) {
            continue;
        }
        if wall_vertex.contains_key(&v) {
            if v != start {
                let mut p = stack.clone();
                p.push(v);
                found.push(p);
            }
            continue;
        }
        stack.push(v);
        used.insert(v);
        jump_dfs(
            d, wall_vertex, wall_arcs, start, stack, used, found, budget, truncated,
        );
        used.remove(&v);
        stack.pop();
    }
}

fn classify_jump(
    path: Vec<usize>,
    wall_vertex: &HashMap<usize, usize>,
    _embed: &[usize],
    tilings: &[(Tiling, bool)],
) -> JumpReport {
    let a = wall_vertex[&path[0]];
    let b = wall_vertex[path.last().unwrap()];
    let mut placements = Vec::new();
    let mut witness = None;
    for (tiling, mirrored) in tilings {
        let start_tiles: Vec<usize> = tiling
            .tiles
            .iter()
            .enumerate()
            .filter(|(_, t)| t.contains(a))
            .map(|(i, _)| i)
            .collect();
        let end_tiles: Vec<usize> = tiling
            .tiles
            .iter()
            .enumerate()
            .filter(|(_, t)| t.contains(b))
            .map(|(i, _)| i)
            .collect();
        let distinct = !start_tiles.is_empty()
            && !end_tiles.is_empty()
            && start_tiles.iter().all(|t| !end_tiles.contains(t));
        if !distinct && witness.is_none() {
            witness = Some((tiling.xi, tiling.xi_prime, *mirrored));
        }
        placements.push(TilePlacement {
            xi: tiling.xi,
            xi_prime: tiling.xi_prime,
            mirrored: *mirrored,
            start_tiles,
            end_tiles,
        });
    }
    let classification = if witness.is_none() { "w-long" } else { "short" };
    JumpReport {
        path,
        placements,
        classification: classification.into(),
        witness,
    }
}

// ---------------------------------------------------------------------------
// Auxiliary digraphs.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AuxMode {
    I,
    II,
}

/// A digraph derived from a host by adding per-tile terminals and deleting
/// tile internals (mode I) or the remaining slice (mode II).
#[derive(Debug, Clone)]
pub struct AuxDigraph {
    pub digraph: Digraph,
    pub mode: AuxMode,
    /// Aux ids of the added terminal vertices.
    pub added: Vec<usize>,
    /// Host digraph ids that were deleted.
    pub deleted: Vec<usize>,
    /// Added aux id -> index of its tile in the tiling.
    pub tile_map: HashMap<usize, usize>,
    /// Host id -> aux id (None if deleted).
    pub to_aux: Vec<Option<usize>>,
    /// Aux id -> host id (None for added vertices).
    pub from_aux: Vec<Option<usize>>,
}

/// Assembles the aux digraph from the host plus extension arcs, deleting
/// the marked host vertices. Extended ids `host.n() + t` are the added
/// terminals in order.
fn assemble_aux(
    host: &Digraph,
    extra_arcs: &[(usize, usize)],
    n_added: usize,
    deleted: &HashSet<usize>,
    mode: AuxMode,
    tile_of_added: &[usize],
) -> AuxDigraph {
    let n_ext = host.n() + n_added;
    let mut arcs = host.arcs();
    arcs.extend_from_slice(extra_arcs);
    arcs.retain(|&(a, b)| !deleted.contains(&a) && !deleted.contains(&b));
    let keep: Vec<usize> = (0..n_ext).filter(|v| !deleted.contains(v)).collect();
    let ext = Digraph::new(n_ext, &arcs).expect("extended digraph");
    let (digraph, map) = ext.induced(&keep);
    let mut to_aux: Vec<Option<usize>> = vec![None; host.n()];
    let mut from_aux: Vec<Option<usize>> = vec![None; digraph.n()];
    let mut added = Vec::new();
    let mut tile_map = HashMap::new();
    for (aux, &old) in map.iter().enumerate() {
        if old < host.n() {
            to_aux[old] = Some(aux);
            from_aux[aux] = Some(old);
        } else {
            added.push(aux);
            tile_map.insert(aux, tile_of_added[old - host.n()]);
        }
    }
    AuxDigraph {
        digraph,
        mode,
        added,
        deleted: deleted.iter().copied().filter(|&v| v < host.n()).collect(),
        tile_map,
        to_aux,
        from_aux,
    }
}

/// Type-I auxiliary digraph: for every colour-`i` tile sharing a vertex
/// with the slice (columns `slice_cols`, inclusive), add `x_T^in`/`x_T^out`
/// wired to the tile centre and delete the tile internals. Also returns
/// `X_I^out`, `X_I^in`, and the perimeter landmark set `Y_I` (one vertex,
/// lexicographically least, per prescribed perimeter/row intersection of
/// the middle third, pruned by deletions).
pub fn build_aux_i(
    d: &Digraph,
    wall: &WallParametrization,
    embed: &[usize],
    tiling: &Tiling,
    colour: u8,
    slice_cols: (usize, usize),
) -> Result<(AuxDigraph, Vec<usize>, Vec<usize>, Vec<usize>)> {
    check_embed(d, wall, embed)?;
    if wall.order % 3 != 0 {
        return Err(Error::Precondition("wall order must be 3k".into()));
    }
    let (a, b) = slice_cols;
    if a < 1 || b < a || b > wall.order {
        return Err(Error::IndexOutOfRange(format!("slice columns {a}..{b}")));
    }
    let chosen: Vec<usize> = (0..tiling.tiles.len())
        .filter(|&t| {
            tiling.colours[t] == colour
                && tiling.tiles[t]
                    .vertices
                    .iter()
                    .any(|&v| (a..=b).contains(&wall.column_of(v)))
        })
        .collect();
    let mut extra = Vec::new();
    let mut deleted: HashSet<usize> = HashSet::new();
    let mut tile_of_added = Vec::new();
    let mut x_out_ext = Vec::new();
    let mut x_in_ext = Vec::new();
    for (idx, &t) in chosen.iter().enumerate() {
        let tile = &tiling.tiles[t];
        let x_in = d.n() + 2 * idx;
        let x_out = d.n() + 2 * idx + 1;
        tile_of_added.push(t);
        tile_of_added.push(t);
        for &u in &tile.centre {
            extra.push((embed[u], x_in));
            extra.push((x_out, embed[u]));
        }
        for &u in &tile.internals {
            deleted.insert(embed[u]);
        }
        x_in_ext.push(x_in);
        x_out_ext.push(x_out);
    }
    let aux = assemble_aux(d, &extra, 2 * chosen.len(), &deleted, AuxMode::I, &tile_of_added);
    // Landmarks on the perimeter of the middle third W_2: its boundary
    // cycles are the column cycles k+1 and 2k.
    let k = wall.order / 3;
    let rows = wall.rows();
    let mut y_i = Vec::new();
    for j in 1..=(3 * k) / 4 {
        for &(c, row) in &[
            (k + 1, 4 * j),
            (k + 1, 4 * j + 2),
            (2 * k, 4 * j),
            (2 * k, 4 * j + 2),
        ] {
            let r = (row - 1) % rows + 1;
            // Intersection of the column cycle with the row's spokes: the
            // two vertices of the row pair on that column's layers; side 1
            // for the 4j rows, side 2 for the 4j+2 rows.
            let side = if row % 4 == 0 { 0 } else { 1 };
            let pos = 2 * (r - 1) + side;
            let v1 = wall.at(pos, 2 * (c - 1));
            let v2 = wall.at(pos, 2 * (c - 1) + 1);
            let v = embed[v1.min(v2)];
            if let Some(auxv) = aux.to_aux[v] {
                y_i.push(auxv);
            }
        }
    }
    y_i.sort_unstable();
    y_i.dedup();
    // Added vertices are never deleted and keep their relative order, so
    // extended id d.n() + t maps to the t-th entry of the added list.
    let map_added =
        |ext_ids: &[usize]| -> Vec<usize> { ext_ids.iter().map(|&e| aux.added[e - d.n()]).collect() };
    let x_out = map_added(&x_out_ext);
    let x_in = map_added(&x_in_ext);
    Ok((aux, x_out, x_in, y_i))
}

/// Type-II auxiliary digraph: requires that no colour-`i` tile meets the
/// perimeter of the slice. Per colour-`i` tile meeting the slice, adds a
/// vertex `x_T` bidirectionally wired to the tile's interior and centre;
/// then deletes all slice vertices outside those tiles. Returns the aux
/// digraph and `X_II`.
pub fn build_aux_ii(
    d: &Digraph,
    wall: &WallParametrization,
    embed: &[usize],
    tiling: &Tiling,
    colour: u8,
    slice_cols: (usize, usize),
) -> Result<(AuxDigraph, Vec<usize>)> {
    check_embed(d, wall, embed)?;
    let (a, b) = slice_cols;
    if a < 1 || b < a || b > wall.order {
        return Err(Error::IndexOutOfRange(format!("slice columns {a}..{b}")));
    }
    let in_slice = |v: usize| (a..=b).contains(&wall.column_of(v));
    let chosen: Vec<usize> = (0..tiling.tiles.len())
        .filter(|&t| {
            tiling.colours[t] == colour && tiling.tiles[t].vertices.iter().any(|&v| in_slice(v))
        })
        .collect();
    for &t in &chosen {
        if tiling.tiles[t]
            .vertices
            .iter()
            .any(|&v| wall.column_of(v) == a || wall.column_of(v) == b)
        {
            return Err(Error::Precondition(
                "a colour-i tile meets the slice perimeter".into(),
            ));
        }
    }
    let mut extra = Vec::new();
    let mut tile_of_added = Vec::new();
    let mut in_chosen_tiles: HashSet<usize> = HashSet::new();
    for (idx, &t) in chosen.iter().enumerate() {
        let tile = &tiling.tiles[t];
        let x_t = d.n() + idx;
        tile_of_added.push(t);
        for v in tile.interior() {
            extra.push((x_t, embed[v]));
            extra.push((embed[v], x_t));
        }
        in_chosen_tiles.extend(tile.vertices.iter().map(|&v| embed[v]));
    }
    let deleted: HashSet<usize> = (0..wall.digraph.n())
        .filter(|&v| in_slice(v))
        .map(|v| embed[v])
        .filter(|v| !in_chosen_tiles.contains(v))
        .collect();
    let aux = assemble_aux(d, &extra, chosen.len(), &deleted, AuxMode::II, &tile_of_added);
    let x_ii = aux.added.clone();
    Ok((aux, x_ii))
}

fn check_embed(d: &Digraph, wall: &WallParametrization, embed: &[usize]) -> Result<()> {
    if embed.len() != wall.digraph.n() {
        return Err(Error::Precondition(
            "embedding must map every wall vertex".into(),
        ));
    }
    for &v in embed {
        if v >= d.n() {
            return Err(Error::VertexOutOfRange(v, d.n()));
        }
    }
    Ok(())
}
