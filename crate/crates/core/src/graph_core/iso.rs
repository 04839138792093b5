//! Canonical forms and isomorphism tests for graphs, digraphs and
//! coloured variants, via colour refinement with individualization.
//!
//! The canonical form of a (di)graph is the lexicographically smallest
//! relabelled arc list over all leaves of the refinement search tree. Target
//! cells are chosen by an order-invariant rule, so equal canonical forms
//! characterise isomorphism exactly.

use super::graph::{BipartiteGraph, Digraph, Graph};
use std::collections::HashMap;

/// Canonical form: vertex count, initial-colour histogram per canonical
/// position, and relabelled arcs. Two inputs are isomorphic (respecting the
/// initial colouring) iff their canonical forms are equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    pub n: usize,
    /// Initial colour of the vertex placed at each canonical position.
    pub colours: Vec<usize>,
    /// Arcs relabelled by the canonical labelling, sorted.
    pub arcs: Vec<(usize, usize)>,
}

struct Search<'a> {
    n: usize,
    out: &'a [Vec<usize>],
    inn: &'a [Vec<usize>],
    init: &'a [usize],
    best: Option<(Vec<usize>, Vec<(usize, usize)>)>,
}

/// Refines `col` to the coarsest stable colouring finer than it, with colour
/// ids assigned in a canonical (signature-sorted) order.
fn refine(n: usize, out: &[Vec<usize>], inn: &[Vec<usize>], col: &mut Vec<usize>) {
    loop {
        let mut sigs: Vec<(usize, Vec<usize>, Vec<usize>)> = Vec::with_capacity(n);
        for v in 0..n {
            let mut so: Vec<usize> = out[v].iter().map(|&w| col[w]).collect();
            let mut si: Vec<usize> = inn[v].iter().map(|&w| col[w]).collect();
            so.sort_unstable();
            si.sort_unstable();
            sigs.push((col[v], so, si));
        }
        let mut keys: Vec<&(usize, Vec<usize>, Vec<usize>)> = sigs.iter().collect();
        keys.sort_unstable();
        keys.dedup();
        if keys.len() == *col.iter().max().map(|m| m + 1).get_or_insert(0) {
            // Same number of classes as before; check the partition is
            // unchanged (it is: refinement only splits classes).
            let mut id = HashMap::new();
            for (i, k) in keys.iter().enumerate() {
                id.insert(*k, i);
            }
            let newcol: Vec<usize> = (0..n).map(|v| id[&sigs[v]]).collect();
            *col = newcol;
            break;
        }
        let mut id = HashMap::new();
        for (i, k) in keys.iter().enumerate() {
            id.insert(*k, i);
        }
        for v in 0..n {
            col[v] = id[&sigs[v]];
        }
    }
}

impl<'a> Search<'a> {
    fn run(&mut self, mut col: Vec<usize>) {
        refine(self.n, self.out, self.inn, &mut col);
        // First colour class with more than one vertex, None if discrete.
        let mut count = vec![0usize; self.n.max(1)];
        for &c in &col {
            count[c] += 1;
        }
        let target = (0..self.n).find(|&c| count[c] > 1);
        match target {
            None => {
                // Discrete: col is a bijection vertex -> canonical position.
                let mut arcs: Vec<(usize, usize)> = Vec::new();
                for u in 0..self.n {
                    for &v in &self.out[u] {
                        arcs.push((col[u], col[v]));
                    }
                }
                arcs.sort_unstable();
                let mut colours = vec![0usize; self.n];
                for v in 0..self.n {
                    colours[col[v]] = self.init[v];
                }
                let cand = (colours, arcs);
                if self.best.as_ref().map_or(true, |b| cand < *b) {
                    self.best = Some(cand);
                }
            }
            Some(c) => {
                let cell: Vec<usize> = (0..self.n).filter(|&v| col[v] == c).collect();
                for v in cell {
                    let mut next = col.clone();
                    // Individualize v: give it a fresh colour just below its
                    // class, shifting classes >= c up by one.
                    for w in 0..self.n {
                        if next[w] >= c {
                            next[w] += 1;
                        }
                    }
                    next[v] = c;
                    self.run(next);
                }
            }
        }
    }
}

/// Canonical form of an arbitrary arc structure with initial colours.
fn canonical(
    n: usize,
    out: &[Vec<usize>],
    inn: &[Vec<usize>],
    init: &[usize],
) -> CanonicalForm {
    // Normalise initial colours to dense ids in sorted order.
    let mut vals: Vec<usize> = init.to_vec();
    vals.sort_unstable();
    vals.dedup();
    let dense: Vec<usize> = init
        .iter()
        .map(|c| vals.binary_search(c).unwrap())
        .collect();
    let mut s = Search {
        n,
        out,
        inn,
        init: &dense,
        best: None,
    };
    s.run(dense.clone());
    let (colours, arcs) = s.best.unwrap_or((Vec::new(), Vec::new()));
    CanonicalForm { n, colours, arcs }
}

/// Canonical form of a digraph, optionally with vertex colours.
pub fn canonical_digraph(d: &Digraph, init: Option<&[usize]>) -> CanonicalForm {
    let n = d.n();
    let out: Vec<Vec<usize>> = (0..n).map(|v| d.out_neighbours(v).to_vec()).collect();
    let inn: Vec<Vec<usize>> = (0..n).map(|v| d.in_neighbours(v).to_vec()).collect();
    let default = vec![0usize; n];
    canonical(n, &out, &inn, init.unwrap_or(&default))
}

/// Canonical form of an undirected graph, optionally with vertex colours.
pub fn canonical_graph(g: &Graph, init: Option<&[usize]>) -> CanonicalForm {
    let n = g.n();
    let adj: Vec<Vec<usize>> = (0..n).map(|v| g.neighbours(v).to_vec()).collect();
    let default = vec![0usize; n];
    canonical(n, &adj, &adj, init.unwrap_or(&default))
}

/// Canonical form of a bipartite graph, taking the smaller form over the
/// two ways of assigning the colour classes.
pub fn canonical_bipartite(b: &BipartiteGraph) -> CanonicalForm {
    let n = b.n();
    let adj: Vec<Vec<usize>> = (0..n).map(|v| b.neighbours(v).to_vec()).collect();
    let a: Vec<usize> = (0..n).map(|v| if b.in_v1(v) { 0 } else { 1 }).collect();
    let c: Vec<usize> = (0..n).map(|v| if b.in_v1(v) { 1 } else { 0 }).collect();
    let fa = canonical(n, &adj, &adj, &a);
    let fc = canonical(n, &adj, &adj, &c);
    fa.min(fc)
}

/// Isomorphism of undirected graphs.
pub fn graphs_isomorphic(g: &Graph, h: &Graph) -> bool {
    g.n() == h.n() && g.m() == h.m() && canonical_graph(g, None) == canonical_graph(h, None)
}

/// Isomorphism of digraphs.
pub fn digraphs_isomorphic(d: &Digraph, e: &Digraph) -> bool {
    d.n() == e.n() && d.m() == e.m() && canonical_digraph(d, None) == canonical_digraph(e, None)
}

/// Isomorphism of bipartite graphs, allowing the colour classes to swap.
pub fn bipartite_isomorphic(b: &BipartiteGraph, c: &BipartiteGraph) -> bool {
    b.n() == c.n() && b.m() == c.m() && canonical_bipartite(b) == canonical_bipartite(c)
}
