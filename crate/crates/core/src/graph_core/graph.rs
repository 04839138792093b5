//! Fundamental graph representations: bipartite graphs with colour classes,
//! plain undirected graphs, and simple digraphs.
//!
//! Vertices are dense integer identifiers. For a [`BipartiteGraph`] the first
//! colour class `V1` (black) occupies indices `0..n1` and the second class
//! `V2` (white) occupies `n1..n1+n2`. Structured names live in an optional
//! label table; identifier equality is never used as a stand-in for
//! isomorphism.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A simple bipartite graph with named colour classes.
///
/// Invariants enforced on construction: every edge joins `V1` to `V2`, no
/// loops, no parallel edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteGraph {
    n1: usize,
    n2: usize,
    /// Sorted adjacency lists, indexed by vertex.
    adj: Vec<Vec<usize>>,
    /// Optional name per vertex.
    labels: Option<Vec<String>>,
}

impl BipartiteGraph {
    /// Builds a bipartite graph from colour class sizes and an edge list.
    ///
    /// Edges may be given in either endpoint order; they are normalised to
    /// `(V1-end, V2-end)`. Duplicate edges are rejected.
    pub fn new(n1: usize, n2: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let n = n1 + n2;
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::VertexOutOfRange(a.max(b), n));
            }
            let (u, v) = if a < n1 && b >= n1 {
                (a, b)
            } else if b < n1 && a >= n1 {
                (b, a)
            } else {
                return Err(Error::NotBipartite(a, b));
            };
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::NotBipartite(0, 0));
            }
        }
        Ok(Self { n1, n2, adj, labels: None })
    }

    /// Number of vertices in the first (black) colour class.
    pub fn n1(&self) -> usize {
        self.n1
    }

    /// Number of vertices in the second (white) colour class.
    pub fn n2(&self) -> usize {
        self.n2
    }

    /// Total number of vertices.
    pub fn n(&self) -> usize {
        self.n1 + self.n2
    }

    /// Number of edges.
    pub fn m(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// True if `v` belongs to the first colour class.
    pub fn in_v1(&self, v: usize) -> bool {
        v < self.n1
    }

    /// Iterator over `V1`.
    pub fn v1(&self) -> std::ops::Range<usize> {
        0..self.n1
    }

    /// Iterator over `V2`.
    pub fn v2(&self) -> std::ops::Range<usize> {
        self.n1..self.n1 + self.n2
    }

    /// Sorted neighbours of `v`.
    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// Degree of `v`.
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Edge test.
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// All edges, normalised as `(V1-end, V2-end)` and sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m());
        for u in self.v1() {
            for &v in &self.adj[u] {
                out.push((u, v));
            }
        }
        out
    }

    /// Replaces the label table.
    pub fn set_labels(&mut self, labels: Vec<String>) {
        debug_assert_eq!(labels.len(), self.n());
        self.labels = Some(labels);
    }

    /// Label of a vertex, if any.
    pub fn label(&self, v: usize) -> Option<&str> {
        self.labels.as_ref().map(|l| l[v].as_str())
    }

    /// The full label table, if present.
    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// True if the graph is connected (the empty graph counts as connected).
    pub fn is_connected(&self) -> bool {
        let n = self.n();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == n
    }

    /// Induced subgraph on `keep` (a sorted or unsorted vertex list without
    /// duplicates). Returns the subgraph and the map from new ids to old ids.
    ///
    /// Colour classes are preserved; the new `V1` lists the kept `V1`
    /// vertices first.
    pub fn induced(&self, keep: &[usize]) -> (BipartiteGraph, Vec<usize>) {
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        // Old-to-new map; V1 vertices come first to keep classes contiguous.
        let new_v1: Vec<usize> = kept.iter().copied().filter(|&v| self.in_v1(v)).collect();
        let new_v2: Vec<usize> = kept.iter().copied().filter(|&v| !self.in_v1(v)).collect();
        let order: Vec<usize> = new_v1.iter().chain(new_v2.iter()).copied().collect();
        let mut old_to_new = vec![usize::MAX; self.n()];
        for (new, &old) in order.iter().enumerate() {
            old_to_new[old] = new;
        }
        let mut edges = Vec::new();
        for u in self.v1() {
            if old_to_new[u] == usize::MAX {
                continue;
            }
            for &v in &self.adj[u] {
                if old_to_new[v] != usize::MAX {
                    edges.push((old_to_new[u], old_to_new[v]));
                }
            }
        }
        let mut g = BipartiteGraph::new(new_v1.len(), new_v2.len(), &edges)
            .expect("induced subgraph of a bipartite graph is bipartite");
        if let Some(labels) = &self.labels {
            g.set_labels(order.iter().map(|&v| labels[v].clone()).collect());
        }
        (g, order)
    }

    /// The graph obtained by deleting a vertex set. Returns the subgraph and
    /// the new-to-old vertex map.
    pub fn delete_vertices(&self, del: &[usize]) -> (BipartiteGraph, Vec<usize>) {
        let mut gone = vec![false; self.n()];
        for &v in del {
            gone[v] = true;
        }
        let keep: Vec<usize> = (0..self.n()).filter(|&v| !gone[v]).collect();
        self.induced(&keep)
    }

    /// Copy of the graph without the listed edges (endpoint order free).
    pub fn delete_edges(&self, del: &[(usize, usize)]) -> BipartiteGraph {
        use std::collections::HashSet;
        let gone: HashSet<(usize, usize)> = del
            .iter()
            .map(|&(a, b)| if a < b { (a, b) } else { (b, a) })
            .collect();
        let edges: Vec<(usize, usize)> = self
            .edges()
            .into_iter()
            .filter(|&(u, v)| !gone.contains(&(u.min(v), u.max(v))))
            .collect();
        let mut g = BipartiteGraph::new(self.n1, self.n2, &edges).expect("edge deletion");
        if let Some(labels) = &self.labels {
            g.set_labels(labels.clone());
        }
        g
    }

    /// The connected component containing `v`, as a vertex list.
    pub fn component_of(&self, v: usize) -> Vec<usize> {
        let mut seen = vec![false; self.n()];
        let mut stack = vec![v];
        seen[v] = true;
        let mut out = vec![v];
        while let Some(u) = stack.pop() {
            for &w in &self.adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    out.push(w);
                    stack.push(w);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// All connected components as sorted vertex lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for s in 0..self.n() {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(u) = stack.pop() {
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// A simple undirected graph without colour classes.
///
/// Used by the duality module (standard walls, cockades, treewidth) and as
/// the argument of [`bidirect`](crate::graph_core::bidirect).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a simple graph; loops and duplicate edges are rejected.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::VertexOutOfRange(a.max(b), n));
            }
            if a == b {
                return Err(Error::NotBipartite(a, b));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::NotBipartite(0, 0));
            }
        }
        Ok(Self { n, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// All edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m());
        for u in 0..self.n {
            for &v in &self.adj[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Proper 2-colouring if the graph is bipartite: colour per vertex.
    pub fn two_colouring(&self) -> Option<Vec<u8>> {
        let mut colour = vec![u8::MAX; self.n];
        for s in 0..self.n {
            if colour[s] != u8::MAX {
                continue;
            }
            colour[s] = 0;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &v in &self.adj[u] {
                    if colour[v] == u8::MAX {
                        colour[v] = 1 - colour[u];
                        stack.push(v);
                    } else if colour[v] == colour[u] {
                        return None;
                    }
                }
            }
        }
        Some(colour)
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }

    /// Induced subgraph plus new-to-old map.
    pub fn induced(&self, keep: &[usize]) -> (Graph, Vec<usize>) {
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        let mut old_to_new = vec![usize::MAX; self.n];
        for (new, &old) in kept.iter().enumerate() {
            old_to_new[old] = new;
        }
        let mut edges = Vec::new();
        for &u in &kept {
            for &v in &self.adj[u] {
                if u < v && old_to_new[v] != usize::MAX {
                    edges.push((old_to_new[u], old_to_new[v]));
                }
            }
        }
        (Graph::new(kept.len(), &edges).expect("induced"), kept)
    }

    /// Connected components as sorted vertex lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(u) = stack.pop() {
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// A simple digraph: no loops, no duplicate arcs; digons are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Digraph {
    n: usize,
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
    labels: Option<Vec<String>>,
}

impl Digraph {
    /// Builds a digraph from an arc list; loops and duplicates are rejected.
    pub fn new(n: usize, arcs: &[(usize, usize)]) -> Result<Self> {
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        for &(u, v) in arcs {
            if u >= n || v >= n {
                return Err(Error::VertexOutOfRange(u.max(v), n));
            }
            if u == v {
                return Err(Error::NotBipartite(u, v));
            }
            out[u].push(v);
            inn[v].push(u);
        }
        for list in out.iter_mut().chain(inn.iter_mut()) {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::NotBipartite(0, 0));
            }
        }
        Ok(Self { n, out, inn, labels: None })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of arcs.
    pub fn m(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn out_neighbours(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn in_neighbours(&self, v: usize) -> &[usize] {
        &self.inn[v]
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.out[u].binary_search(&v).is_ok()
    }

    /// All arcs, sorted by tail then head.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m());
        for u in 0..self.n {
            for &v in &self.out[u] {
                out.push((u, v));
            }
        }
        out
    }

    pub fn set_labels(&mut self, labels: Vec<String>) {
        debug_assert_eq!(labels.len(), self.n);
        self.labels = Some(labels);
    }

    pub fn label(&self, v: usize) -> Option<&str> {
        self.labels.as_ref().map(|l| l[v].as_str())
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Induced subdigraph plus new-to-old map.
    pub fn induced(&self, keep: &[usize]) -> (Digraph, Vec<usize>) {
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        let mut old_to_new = vec![usize::MAX; self.n];
        for (new, &old) in kept.iter().enumerate() {
            old_to_new[old] = new;
        }
        let mut arcs = Vec::new();
        for &u in &kept {
            for &v in &self.out[u] {
                if old_to_new[v] != usize::MAX {
                    arcs.push((old_to_new[u], old_to_new[v]));
                }
            }
        }
        let mut d = Digraph::new(kept.len(), &arcs).expect("induced");
        if let Some(labels) = &self.labels {
            d.set_labels(kept.iter().map(|&v| labels[v].clone()).collect());
        }
        (d, kept)
    }

    /// The digraph with the listed vertices removed, plus new-to-old map.
    pub fn delete_vertices(&self, del: &[usize]) -> (Digraph, Vec<usize>) {
        let mut gone = vec![false; self.n];
        for &v in del {
            gone[v] = true;
        }
        let keep: Vec<usize> = (0..self.n).filter(|&v| !gone[v]).collect();
        self.induced(&keep)
    }

    /// Strongly connected components in reverse topological order of the
    /// condensation (Tarjan).
    pub fn sccs(&self) -> Vec<Vec<usize>> {
        // Iterative Tarjan to avoid recursion depth limits on large walls.
        let n = self.n;
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack: Vec<usize> = Vec::new();
        let mut next_index = 0usize;
        let mut comps: Vec<Vec<usize>> = Vec::new();
        // Explicit DFS stack of (vertex, next out-neighbour position).
        let mut work: Vec<(usize, usize)> = Vec::new();
        for start in 0..n {
            if index[start] != usize::MAX {
                continue;
            }
            work.push((start, 0));
            index[start] = next_index;
            low[start] = next_index;
            next_index += 1;
            stack.push(start);
            on_stack[start] = true;
            while let Some(&mut (v, ref mut i)) = work.last_mut() {
                if *i < self.out[v].len() {
                    let w = self.out[v][*i];
                    *i += 1;
                    if index[w] == usize::MAX {
                        index[w] = next_index;
                        low[w] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        work.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    work.pop();
                    if let Some(&(p, _)) = work.last() {
                        low[p] = low[p].min(low[v]);
                    }
                    if low[v] == index[v] {
                        let mut comp = Vec::new();
                        loop {
                            let w = stack.pop().expect("tarjan stack");
                            on_stack[w] = false;
                            comp.push(w);
                            if w == v {
                                break;
                            }
                        }
                        comp.sort_unstable();
                        comps.push(comp);
                    }
                }
            }
        }
        comps
    }

    /// True if the digraph is strongly connected (empty and singleton count
    /// as strongly connected).
    pub fn is_strongly_connected(&self) -> bool {
        self.n <= 1 || self.sccs().len() == 1
    }

    /// True if the digraph is strongly `k`-connected: it has more than `k`
    /// vertices and stays strongly connected after deleting any `k - 1`
    /// vertices.
    pub fn is_strongly_k_connected(&self, k: usize) -> bool {
        if k == 0 {
            return true;
        }
        if self.n <= k {
            return false;
        }
        if !self.is_strongly_connected() {
            return false;
        }
        if k == 1 {
            return true;
        }
        // Delete every (k-1)-subset; desk scale only ever asks k <= 3.
        let mut subset: Vec<usize> = (0..k - 1).collect();
        loop {
            let (d, _) = self.delete_vertices(&subset);
            if !d.is_strongly_connected() {
                return false;
            }
            // Next combination.
            let mut i = k - 1;
            loop {
                if i == 0 {
                    return true;
                }
                i -= 1;
                if subset[i] + (k - 1 - i) < self.n {
                    subset[i] += 1;
                    for j in i + 1..k - 1 {
                        subset[j] = subset[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    /// A shortest directed path from `from` to `to` as a vertex sequence.
    pub fn shortest_path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let mut prev = vec![usize::MAX; self.n];
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(from);
        prev[from] = from;
        while let Some(u) = queue.pop_front() {
            if u == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &v in &self.out[u] {
                if prev[v] == usize::MAX {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        None
    }
}

/// Replaces every edge of `g` by a digon, yielding the bidirection of `g`.
pub fn bidirect(g: &Graph) -> Digraph {
    let mut arcs = Vec::with_capacity(2 * g.m());
    for (u, v) in g.edges() {
        arcs.push((u, v));
        arcs.push((v, u));
    }
    Digraph::new(g.n(), &arcs).expect("bidirection of a simple graph is simple")
}

/// Forgets arc directions, yielding the underlying simple graph.
pub fn underlying_graph(d: &Digraph) -> Graph {
    let mut edges: Vec<(usize, usize)> = d
        .arcs()
        .into_iter()
        .map(|(u, v)| (u.min(v), u.max(v)))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    Graph::new(d.n(), &edges).expect("underlying graph")
}
