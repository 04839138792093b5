//! Matching minor testing.
//!
//! For subcubic patterns, containment as a matching minor coincides with
//! containment of a conformal bisubdivision, which is found by placing
//! branch vertices and routing internally disjoint alternating-parity paths.
//! For general patterns a memoized reduction search over matching-minor
//! moves (edge deletion, conformal pair deletion, bicontraction) is used,
//! guarded by a state cap.

use super::graph::{BipartiteGraph, Graph};
use super::iso::{canonical_bipartite, bipartite_isomorphic, CanonicalForm};
use super::matching::{bicontract, find_perfect_matching, is_matchable_avoiding};
use crate::error::{Error, Result};
use std::collections::HashSet;

/// A conformal bisubdivision of a pattern inside a host.
#[derive(Debug, Clone)]
pub struct SubdivisionEmbedding {
    /// `branch[i]` is the host vertex representing pattern vertex `i`.
    pub branch: Vec<usize>,
    /// `paths[j]` is the host path (vertex sequence including both branch
    /// endpoints) realising the `j`-th pattern edge, in the order of the
    /// pattern's edge list.
    pub paths: Vec<Vec<usize>>,
}

impl SubdivisionEmbedding {
    /// All host vertices used by the embedding.
    pub fn vertices(&self) -> Vec<usize> {
        let mut vs: Vec<usize> = self.paths.iter().flatten().copied().collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// All host edges used by the embedding, normalised `(min, max)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut es: Vec<(usize, usize)> = Vec::new();
        for p in &self.paths {
            for w in p.windows(2) {
                es.push((w[0].min(w[1]), w[0].max(w[1])));
            }
        }
        es.sort_unstable();
        es.dedup();
        es
    }
}

/// Checks that `emb` is a conformal bisubdivision of `pattern` in `host`:
/// branch placement is injective and class-consistent, each path realises
/// its pattern edge with odd length, paths are internally disjoint from each
/// other and from branch vertices, and the union subgraph is conformal.
pub fn verify_bisubdivision(
    host: &BipartiteGraph,
    pattern: &Graph,
    emb: &SubdivisionEmbedding,
) -> bool {
    let pedges = pattern.edges();
    if emb.branch.len() != pattern.n() || emb.paths.len() != pedges.len() {
        return false;
    }
    let mut seen = HashSet::new();
    if !emb.branch.iter().all(|&v| v < host.n() && seen.insert(v)) {
        return false;
    }
    let branch_set: HashSet<usize> = emb.branch.iter().copied().collect();
    let mut internal_used: HashSet<usize> = HashSet::new();
    for (j, &(a, b)) in pedges.iter().enumerate() {
        let p = &emb.paths[j];
        if p.len() < 2 || p.len() % 2 != 0 {
            return false; // even vertex count <=> odd edge count
        }
        if p[0] != emb.branch[a] || p[p.len() - 1] != emb.branch[b] {
            return false;
        }
        for w in p.windows(2) {
            if !host.has_edge(w[0], w[1]) {
                return false;
            }
        }
        for &v in &p[1..p.len() - 1] {
            if branch_set.contains(&v) || !internal_used.insert(v) {
                return false;
            }
        }
    }
    // Conformality: the subdivision has a perfect matching and the host
    // minus its vertices has one.
    let vs = emb.vertices();
    let (sub, _) = host.induced(&vs);
    // Restrict to the embedding's own edges.
    let own: HashSet<(usize, usize)> = emb.edges().into_iter().collect();
    let mut pos = vec![usize::MAX; host.n()];
    // induced() orders V1 vertices first; recover old ids to filter edges.
    let (_, order) = host.induced(&vs);
    for (new, &old) in order.iter().enumerate() {
        pos[old] = new;
    }
    let keep: Vec<(usize, usize)> = own
        .iter()
        .map(|&(u, v)| {
            let (a, b) = (pos[u], pos[v]);
            (a.min(b), a.max(b))
        })
        .collect();
    let sub_only = match BipartiteGraph::new(sub.n1(), sub.n2(), &keep) {
        Ok(g) => g,
        Err(_) => return false,
    };
    if find_perfect_matching(&sub_only).is_none() {
        return false;
    }
    let mut blocked = vec![false; host.n()];
    for &v in &vs {
        blocked[v] = true;
    }
    is_matchable_avoiding(host, &blocked)
}

/// Searches for a conformal bisubdivision of a subcubic `pattern` in `host`.
///
/// Requires the pattern to be connected, bipartite and of maximum degree at
/// most 3 (where subdivision containment and matching-minor containment
/// coincide).
pub fn find_conformal_bisubdivision(
    host: &BipartiteGraph,
    pattern: &Graph,
) -> Result<Option<SubdivisionEmbedding>> {
    if pattern.neighbours(0).len() > 3 || (0..pattern.n()).any(|v| pattern.degree(v) > 3) {
        return Err(Error::Precondition(
            "bisubdivision search requires a subcubic pattern".into(),
        ));
    }
    let two = pattern
        .two_colouring()
        .ok_or_else(|| Error::Precondition("pattern is not bipartite".into()))?;
    if host.n() < pattern.n() {
        return Ok(None);
    }
    let pedges = pattern.edges();
    // Try both ways of mapping pattern classes onto host classes.
    for flip in [false, true] {
        let side = |v: usize| (two[v] == 1) ^ flip; // true => host V2
        let mut branch = vec![usize::MAX; pattern.n()];
        let mut used = vec![false; host.n()];
        let mut paths: Vec<Vec<usize>> = vec![Vec::new(); pedges.len()];
        if place_branch(
            host, pattern, &pedges, &side, &mut branch, &mut used, &mut paths, 0,
        ) {
            let emb = SubdivisionEmbedding { branch, paths };
            debug_assert!(verify_bisubdivision(host, pattern, &emb));
            return Ok(Some(emb));
        }
    }
    Ok(None)
}

/// Places pattern vertex `i` and, once all are placed, routes the paths.
#[allow(clippy::too_many_arguments)]
fn place_branch(
    host: &BipartiteGraph,
    pattern: &Graph,
    pedges: &[(usize, usize)],
    side: &dyn Fn(usize) -> bool,
    branch: &mut Vec<usize>,
    used: &mut Vec<bool>,
    paths: &mut Vec<Vec<usize>>,
    i: usize,
) -> bool {
    if i == pattern.n() {
        return route_paths(host, pedges, branch, used, paths, 0);
    }
    for v in 0..host.n() {
        if used[v] || (!host.in_v1(v)) != side(i) || host.degree(v) < pattern.degree(i) {
            continue;
        }
        branch[i] = v;
        used[v] = true;
        if place_branch(host, pattern, pedges, side, branch, used, paths, i + 1) {
            return true;
        }
        used[v] = false;
        branch[i] = usize::MAX;
    }
    false
}

/// Routes internally disjoint host paths for pattern edges `j..`, then
/// checks conformality of the union.
fn route_paths(
    host: &BipartiteGraph,
    pedges: &[(usize, usize)],
    branch: &[usize],
    used: &mut Vec<bool>,
    paths: &mut Vec<Vec<usize>>,
    j: usize,
) -> bool {
    if j == pedges.len() {
        // Conformality of the union: host minus used vertices matchable, and
        // the union subgraph itself matchable.
        let blocked: Vec<bool> = used.clone();
        if !is_matchable_avoiding(host, &blocked) {
            return false;
        }
        let emb = SubdivisionEmbedding {
            branch: branch.to_vec(),
            paths: paths.clone(),
        };
        let vs = emb.vertices();
        let (sub, order) = host.induced(&vs);
        let mut pos = vec![usize::MAX; host.n()];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        let keep: Vec<(usize, usize)> = emb
            .edges()
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (pos[u], pos[v]);
                (a.min(b), a.max(b))
            })
            .collect();
        let sub_only = BipartiteGraph::new(sub.n1(), sub.n2(), &keep).expect("valid subgraph");
        return find_perfect_matching(&sub_only).is_some();
    }
    let (a, b) = pedges[j];
    let (s, t) = (branch[a], branch[b]);
    // DFS over simple s-t paths whose internal vertices are unused.
    let mut stack = vec![s];
    let mut ok = false;
    dfs_path(host, t, used, &mut stack, &mut |p: &[usize], used: &mut Vec<bool>| {
        paths[j] = p.to_vec();
        for &v in &p[1..p.len() - 1] {
            used[v] = true;
        }
        let done = route_paths(host, pedges, branch, used, paths, j + 1);
        for &v in &p[1..p.len() - 1] {
            used[v] = false;
        }
        if !done {
            paths[j].clear();
        }
        done
    }, &mut ok);
    ok
}

/// Enumerates simple paths from the top of `stack` to `t` with unused
/// internals, invoking `on_path`; stops once it returns true.
fn dfs_path(
    host: &BipartiteGraph,
    t: usize,
    used: &mut Vec<bool>,
    stack: &mut Vec<usize>,
    on_path: &mut dyn FnMut(&[usize], &mut Vec<bool>) -> bool,
    found: &mut bool,
) {
    if *found {
        return;
    }
    let v = *stack.last().unwrap();
    for idx in 0..host.neighbours(v).len() {
        let w = host.neighbours(v)[idx];
        if w == t {
            if stack.len() >= 1 {
                stack.push(w);
                if on_path(stack, used) {
                    *found = true;
                }
                stack.pop();
                if *found {
                    return;
                }
            }
            continue;
        }
        if used[w] || stack.contains(&w) {
            continue;
        }
        stack.push(w);
        dfs_path(host, t, used, stack, on_path, found);
        stack.pop();
        if *found {
            return;
        }
    }
}

/// The complete bipartite pattern `K_{t,t}` as an uncoloured graph.
pub fn complete_bipartite_pattern(t: usize) -> Graph {
    let mut edges = Vec::new();
    for i in 0..t {
        for j in 0..t {
            edges.push((i, t + j));
        }
    }
    Graph::new(2 * t, &edges).expect("valid K_{t,t}")
}

/// True iff `host` has a `K_{3,3}` matching minor, via the conformal
/// bisubdivision characterisation for subcubic patterns.
pub fn has_k33_matching_minor(host: &BipartiteGraph) -> Result<bool> {
    Ok(find_conformal_bisubdivision(host, &complete_bipartite_pattern(3))?.is_some())
}

/// General matching-minor test via memoized reduction search.
///
/// States are canonical forms of graphs reachable from `host` by the three
/// matching-minor moves; `cap` bounds the number of distinct states visited.
pub fn has_matching_minor(
    host: &BipartiteGraph,
    pattern: &BipartiteGraph,
    cap: usize,
) -> Result<bool> {
    if find_perfect_matching(pattern).is_none() {
        return Err(Error::Precondition(
            "pattern has no perfect matching".into(),
        ));
    }
    // Subcubic patterns go through the subdivision route, which scales far
    // better than the reduction search.
    if (0..pattern.n()).all(|v| pattern.degree(v) <= 3) {
        let adj: Vec<(usize, usize)> = pattern.edges();
        let g = Graph::new(pattern.n(), &adj).expect("pattern as plain graph");
        if g.is_connected() {
            return Ok(find_conformal_bisubdivision(host, &g)?.is_some());
        }
    }
    let target = canonical_bipartite(pattern);
    let mut seen: HashSet<CanonicalForm> = HashSet::new();
    reduction_search(host, pattern, &target, &mut seen, cap)
}

fn reduction_search(
    g: &BipartiteGraph,
    pattern: &BipartiteGraph,
    target: &CanonicalForm,
    seen: &mut HashSet<CanonicalForm>,
    cap: usize,
) -> Result<bool> {
    if g.n() < pattern.n() || g.m() < pattern.m() {
        return Ok(false);
    }
    let form = canonical_bipartite(g);
    if form == *target && bipartite_isomorphic(g, pattern) {
        return Ok(true);
    }
    if !seen.insert(form) {
        return Ok(false);
    }
    if seen.len() > cap {
        return Err(Error::OracleTooLarge {
            size: seen.len(),
            cap,
        });
    }
    // Move (a): delete an edge, keeping a perfect matching.
    for (u, v) in g.edges() {
        let h = g.delete_edges(&[(u, v)]);
        if find_perfect_matching(&h).is_some()
            && reduction_search(&h, pattern, target, seen, cap)?
        {
            return Ok(true);
        }
    }
    // Move (b): delete a conformal pair of vertices, one per class.
    let mut blocked = vec![false; g.n()];
    for u in g.v1() {
        for v in g.v2() {
            blocked[u] = true;
            blocked[v] = true;
            let ok = is_matchable_avoiding(g, &blocked);
            blocked[u] = false;
            blocked[v] = false;
            if ok {
                let (h, _) = g.delete_vertices(&[u, v]);
                if reduction_search(&h, pattern, target, seen, cap)? {
                    return Ok(true);
                }
            }
        }
    }
    // Move (c): bicontract a degree-2 vertex.
    for v in 0..g.n() {
        if g.degree(v) == 2 {
            let (h, _) = bicontract(g, v)?;
            if find_perfect_matching(&h).is_some()
                && reduction_search(&h, pattern, target, seen, cap)?
            {
                return Ok(true);
            }
        }
    }
    Ok(false)
}
