//! The M-direction of a bipartite graph with a perfect matching, and its
//! inverse splitting of a digraph back into such a pair.
//!
//! Matching edges become digraph vertices. For two matching edges `e`, `f`
//! there is an arc `(e, f)` exactly when a non-matching edge of the host
//! joins the first-class end of `e` to the second-class end of `f`.
//! Directed paths and cycles then correspond to alternating paths and
//! cycles of the host, which is what all downstream structure results use.

use super::graph::{BipartiteGraph, Digraph};
use super::matching::PerfectMatching;
use crate::error::{Error, Result};

/// Builds the M-direction of `(b, m)`.
///
/// Digraph vertex `i` (for `i` in `0..n1`) stands for the matching edge
/// `{i, m.partner(i)}`; if the host carries labels, vertex `i` is labelled
/// `"{label(i)}~{label(partner(i))}"` so that [`split`] can restore them.
pub fn m_direction(b: &BipartiteGraph, m: &PerfectMatching) -> Result<Digraph> {
    if m.n() != b.n() {
        return Err(Error::NotPerfectMatching(
            "matching and host sizes differ".into(),
        ));
    }
    let n1 = b.n1();
    let mut arcs = Vec::new();
    for u in b.v1() {
        for &w in b.neighbours(u) {
            if w != m.partner(u) {
                arcs.push((u, m.partner(w)));
            }
        }
    }
    let mut d = Digraph::new(n1, &arcs)?;
    if let Some(labels) = b.labels() {
        let lab: Vec<String> = (0..n1)
            .map(|i| format!("{}~{}", labels[i], labels[m.partner(i)]))
            .collect();
        d.set_labels(lab);
    }
    Ok(d)
}

/// Splits a digraph into the unique bipartite graph with perfect matching
/// whose M-direction it is.
///
/// Digraph vertex `i` becomes the matching edge `{i, n + i}` with `i` in the
/// first class and `n + i` in the second; each arc `(u, v)` becomes the host
/// edge `{u, n + v}`. Labels of the form `"a~b"` are split back onto the two
/// ends.
pub fn split(d: &Digraph) -> Result<(BipartiteGraph, PerfectMatching)> {
    let n = d.n();
    let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (i, n + i)).collect();
    for (u, v) in d.arcs() {
        if u != v {
            edges.push((u, n + v));
        } else {
            return Err(Error::Precondition("digraph has a loop".into()));
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let mut b = BipartiteGraph::new(n, n, &edges)?;
    if let Some(labels) = d.labels() {
        let mut lab = vec![String::new(); 2 * n];
        for (i, l) in labels.iter().enumerate() {
            match l.split_once('~') {
                Some((a, c)) => {
                    lab[i] = a.to_string();
                    lab[n + i] = c.to_string();
                }
                None => {
                    lab[i] = format!("{l}.1");
                    lab[n + i] = format!("{l}.2");
                }
            }
        }
        b.set_labels(lab);
    }
    let m_edges: Vec<(usize, usize)> = (0..n).map(|i| (i, n + i)).collect();
    let m = PerfectMatching::new(&b, &m_edges)?;
    Ok((b, m))
}
