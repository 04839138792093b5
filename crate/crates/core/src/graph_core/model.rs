//! Explicit minor models and their verification.
//!
//! A model maps each pattern vertex to a barycentric subtree of the host and
//! each pattern edge to an odd host path between old vertices of the two
//! trees; the checker enforces disjointness, parity, matchability of the
//! remainder, optional conformality for a fixed matching, and optional
//! grasping by a distinguished vertex set.

use super::graph::{BipartiteGraph, Graph};
use super::matching::{is_matchable_avoiding, PerfectMatching};
use crate::error::{Error, Result};
use std::collections::HashSet;

/// An explicit minor model of a pattern graph in a bipartite host.
#[derive(Debug, Clone)]
pub struct MinorModel {
    /// Per pattern vertex: the vertices and edges of its host subtree.
    pub trees: Vec<(Vec<usize>, Vec<(usize, usize)>)>,
    /// Per pattern edge (in [`Graph::edges`] order): the host path as a
    /// vertex sequence from the tree of the smaller pattern endpoint to the
    /// tree of the larger one.
    pub paths: Vec<Vec<usize>>,
}

impl MinorModel {
    /// All host vertices used by the model.
    pub fn vertices(&self) -> Vec<usize> {
        let mut vs: Vec<usize> = self
            .trees
            .iter()
            .flat_map(|(v, _)| v.iter().copied())
            .chain(self.paths.iter().flatten().copied())
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// All host edges used by the model, normalised `(min, max)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut es: Vec<(usize, usize)> = self
            .trees
            .iter()
            .flat_map(|(_, e)| e.iter().map(|&(a, b)| (a.min(b), a.max(b))))
            .collect();
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

/// Checks a tree on explicit vertices and edges, and returns its set of old
/// vertices if it is barycentric: either a single vertex, or all vertices of
/// degree other than 2 belong to one colour class of the host (those class
/// vertices are the old ones).
fn barycentric_old_vertices(
    host: &BipartiteGraph,
    vs: &[usize],
    es: &[(usize, usize)],
) -> Option<HashSet<usize>> {
    let vset: HashSet<usize> = vs.iter().copied().collect();
    if vset.len() != vs.len() || vs.is_empty() {
        return None;
    }
    if es.len() + 1 != vs.len() {
        return None;
    }
    let mut deg: std::collections::HashMap<usize, usize> = vs.iter().map(|&v| (v, 0)).collect();
    for &(a, b) in es {
        if !vset.contains(&a) || !vset.contains(&b) || !host.has_edge(a, b) {
            return None;
        }
        *deg.get_mut(&a).unwrap() += 1;
        *deg.get_mut(&b).unwrap() += 1;
    }
    // Connectivity: |E| = |V| - 1 plus connectedness makes a tree.
    let mut seen = HashSet::new();
    let mut stack = vec![vs[0]];
    seen.insert(vs[0]);
    let adj: std::collections::HashMap<usize, Vec<usize>> = {
        let mut m: std::collections::HashMap<usize, Vec<usize>> =
            vs.iter().map(|&v| (v, Vec::new())).collect();
        for &(a, b) in es {
            m.get_mut(&a).unwrap().push(b);
            m.get_mut(&b).unwrap().push(a);
        }
        m
    };
    while let Some(u) = stack.pop() {
        for &w in &adj[&u] {
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    if seen.len() != vs.len() {
        return None;
    }
    if vs.len() == 1 {
        return Some(vset);
    }
    // All vertices of degree != 2 must live in one class; old vertices are
    // exactly the tree vertices of that class.
    let specials: Vec<usize> = vs.iter().copied().filter(|&v| deg[&v] != 2).collect();
    let classes: HashSet<bool> = specials.iter().map(|&v| host.in_v1(v)).collect();
    if classes.len() > 1 {
        return None;
    }
    let class = classes.into_iter().next()?;
    Some(vs.iter().copied().filter(|&v| host.in_v1(v) == class).collect())
}

/// Verifies `model` as a minor model of `pattern` in `host`.
///
/// With `matching` given, additionally requires the model's image to be
/// conformal for that matching (every matching edge with one end in the
/// image has both ends in it and is an edge of the image). With `grasp`
/// given (as a host vertex set, together with a perfect matching), requires
/// every pattern-edge image whose pattern edge is not matched within the
/// pattern image to lie inside the grasp set.
pub fn verify_model(
    host: &BipartiteGraph,
    pattern: &Graph,
    model: &MinorModel,
    matching: Option<&PerfectMatching>,
    grasp: Option<&[usize]>,
) -> Result<()> {
    let pedges = pattern.edges();
    if model.trees.len() != pattern.n() || model.paths.len() != pedges.len() {
        return Err(Error::Precondition(
            "model shape does not match the pattern".into(),
        ));
    }
    // Axioms i, ii: barycentric trees, pairwise disjoint.
    let mut olds: Vec<HashSet<usize>> = Vec::with_capacity(pattern.n());
    let mut tree_owner: std::collections::HashMap<usize, usize> = Default::default();
    for (i, (vs, es)) in model.trees.iter().enumerate() {
        if let Some(&v) = vs.iter().find(|&&v| v >= host.n()) {
            return Err(Error::VertexOutOfRange(v, host.n()));
        }
        let old = barycentric_old_vertices(host, vs, es).ok_or_else(|| {
            Error::Precondition(format!("image of pattern vertex {i} is not a barycentric tree"))
        })?;
        for &v in vs {
            if tree_owner.insert(v, i).is_some() {
                return Err(Error::Precondition(format!(
                    "vertex {v} lies in two vertex images"
                )));
            }
        }
        // Axiom v: degree-1 pattern vertices map to single vertices.
        if pattern.degree(i) == 1 && vs.len() != 1 {
            return Err(Error::Precondition(format!(
                "pattern vertex {i} has degree 1 but its image is not a single vertex"
            )));
        }
        olds.push(old);
    }
    // Axioms iii, iv: odd paths, internally disjoint, ends are old vertices.
    let mut internal_used: HashSet<usize> = HashSet::new();
    for (j, &(a, b)) in pedges.iter().enumerate() {
        let p = &model.paths[j];
        if p.len() < 2 || p.len() % 2 != 0 {
            return Err(Error::Precondition(format!(
                "image of pattern edge {j} is not an odd path"
            )));
        }
        for w in p.windows(2) {
            if !host.has_edge(w[0], w[1]) {
                return Err(Error::Precondition(format!(
                    "image of pattern edge {j} uses a non-edge"
                )));
            }
        }
        if !olds[a].contains(&p[0]) || !olds[b].contains(&p[p.len() - 1]) {
            return Err(Error::Precondition(format!(
                "ends of the image of pattern edge {j} are not old vertices of its trees"
            )));
        }
        let mut local = HashSet::new();
        for &v in p {
            if !local.insert(v) {
                return Err(Error::Precondition(format!(
                    "image of pattern edge {j} is not a simple path"
                )));
            }
        }
        for &v in &p[1..p.len() - 1] {
            if tree_owner.contains_key(&v) || !internal_used.insert(v) {
                return Err(Error::Precondition(format!(
                    "image of pattern edge {j} meets another image internally"
                )));
            }
        }
    }
    // Axiom vi: the host minus the model has a perfect matching.
    let used = model.vertices();
    let mut blocked = vec![false; host.n()];
    for &v in &used {
        blocked[v] = true;
    }
    if !is_matchable_avoiding(host, &blocked) {
        return Err(Error::Precondition(
            "host minus the model image has no perfect matching".into(),
        ));
    }
    // Optional conformality for a fixed matching.
    if let Some(m) = matching {
        let edge_set: HashSet<(usize, usize)> = model.edges().into_iter().collect();
        for &v in &used {
            let p = m.partner(v);
            if !blocked[p] || !edge_set.contains(&(v.min(p), v.max(p))) {
                return Err(Error::Precondition(format!(
                    "model image is not conformal for the given matching at vertex {v}"
                )));
            }
        }
        // Grasping: pattern-edge images whose host path is not a single
        // matching edge must lie inside the grasp set.
        if let Some(w) = grasp {
            let wset: HashSet<usize> = w.iter().copied().collect();
            for (j, p) in model.paths.iter().enumerate() {
                let is_matching_edge = p.len() == 2 && m.contains(p[0], p[1]);
                if !is_matching_edge && !p.iter().all(|v| wset.contains(v)) {
                    return Err(Error::Precondition(format!(
                        "image of non-matching pattern edge {j} leaves the grasping set"
                    )));
                }
            }
        }
    } else if grasp.is_some() {
        return Err(Error::Precondition(
            "grasping requires a matching to distinguish matching pattern edges".into(),
        ));
    }
    Ok(())
}
