//! Plain-text graph formats and DOT export.
//!
//! Bipartite graphs: a header `p bip <n1> <n2> <m>` followed by `m` edge
//! lines `e <u> <v>` in 1-based vertex ids, where the first class is
//! `1..=n1` and the second is `n1+1..=n1+n2`. Optional `m <u> <v>` lines
//! declare a perfect matching. Digraphs: `p dig <n> <m>` with arc lines
//! `a <u> <v>`. Lines starting with `c ` (or equal to `c`) are comments;
//! blank lines are ignored. Writers emit edges in sorted order so output is
//! byte-for-byte reproducible.

use crate::error::{Error, Result};
use crate::graph_core::{BipartiteGraph, Digraph, PerfectMatching};
use std::fmt::Write as _;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| parse_err(line, format!("expected a non-negative integer, got {tok:?}")))
}

/// Parses the bipartite text format, returning the graph and the declared
/// perfect matching if `m` lines are present.
pub fn parse_bipartite(text: &str) -> Result<(BipartiteGraph, Option<PerfectMatching>)> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut matching: Vec<(usize, usize)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line == "c" || line.starts_with("c ") {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "p" => {
                if header.is_some() {
                    return Err(parse_err(lineno, "duplicate problem line"));
                }
                if toks.len() != 5 || toks[1] != "bip" {
                    return Err(parse_err(lineno, "expected `p bip <n1> <n2> <m>`"));
                }
                header = Some((
                    parse_usize(toks[2], lineno)?,
                    parse_usize(toks[3], lineno)?,
                    parse_usize(toks[4], lineno)?,
                ));
            }
            "e" | "m" => {
                let (n1, n2, _) =
                    header.ok_or_else(|| parse_err(lineno, "edge before problem line"))?;
                if toks.len() != 3 {
                    return Err(parse_err(lineno, "expected `e <u> <v>`"));
                }
                let u = parse_usize(toks[1], lineno)?;
                let v = parse_usize(toks[2], lineno)?;
                if u == 0 || v == 0 || u > n1 + n2 || v > n1 + n2 {
                    return Err(parse_err(lineno, "vertex id out of range"));
                }
                let pair = (u - 1, v - 1);
                if toks[0] == "e" {
                    edges.push(pair);
                } else {
                    matching.push(pair);
                }
            }
            other => {
                return Err(parse_err(lineno, format!("unknown line type {other:?}")));
            }
        }
    }
    let (n1, n2, m) = header.ok_or_else(|| parse_err(0, "missing problem line"))?;
    if edges.len() != m {
        return Err(parse_err(
            0,
            format!("problem line declares {m} edges, found {}", edges.len()),
        ));
    }
    let b = BipartiteGraph::new(n1, n2, &edges).map_err(|e| parse_err(0, e.to_string()))?;
    let pm = if matching.is_empty() {
        None
    } else {
        Some(
            PerfectMatching::new(&b, &matching)
                .map_err(|e| parse_err(0, e.to_string()))?,
        )
    };
    Ok((b, pm))
}

/// Writes the bipartite text format; inverse of [`parse_bipartite`].
pub fn write_bipartite(b: &BipartiteGraph, m: Option<&PerfectMatching>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "p bip {} {} {}", b.n1(), b.n2(), b.m());
    for (u, v) in b.edges() {
        let _ = writeln!(s, "e {} {}", u + 1, v + 1);
    }
    if let Some(pm) = m {
        for (u, v) in pm.edges() {
            let _ = writeln!(s, "m {} {}", u + 1, v + 1);
        }
    }
    s
}

/// Parses the digraph text format.
pub fn parse_digraph(text: &str) -> Result<Digraph> {
    let mut header: Option<(usize, usize)> = None;
    let mut arcs: Vec<(usize, usize)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line == "c" || line.starts_with("c ") {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "p" => {
                if header.is_some() {
                    return Err(parse_err(lineno, "duplicate problem line"));
                }
                if toks.len() != 4 || toks[1] != "dig" {
                    return Err(parse_err(lineno, "expected `p dig <n> <m>`"));
                }
                header = Some((parse_usize(toks[2], lineno)?, parse_usize(toks[3], lineno)?));
            }
            "a" => {
                let (n, _) = header.ok_or_else(|| parse_err(lineno, "arc before problem line"))?;
                if toks.len() != 3 {
                    return Err(parse_err(lineno, "expected `a <u> <v>`"));
                }
                let u = parse_usize(toks[1], lineno)?;
                let v = parse_usize(toks[2], lineno)?;
                if u == 0 || v == 0 || u > n || v > n {
                    return Err(parse_err(lineno, "vertex id out of range"));
                }
                arcs.push((u - 1, v - 1));
            }
            other => {
                return Err(parse_err(lineno, format!("unknown line type {other:?}")));
            }
        }
    }
    let (n, m) = header.ok_or_else(|| parse_err(0, "missing problem line"))?;
    if arcs.len() != m {
        return Err(parse_err(
            0,
            format!("problem line declares {m} arcs, found {}", arcs.len()),
        ));
    }
    Digraph::new(n, &arcs).map_err(|e| parse_err(0, e.to_string()))
}

/// Writes the digraph text format; inverse of [`parse_digraph`].
pub fn write_digraph(d: &Digraph) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "p dig {} {}", d.n(), d.m());
    for (u, v) in d.arcs() {
        let _ = writeln!(s, "a {} {}", u + 1, v + 1);
    }
    s
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// DOT export of a bipartite graph; the first class is drawn as boxes, the
/// second as circles, and matching edges (if given) are bold.
pub fn bipartite_to_dot(b: &BipartiteGraph, m: Option<&PerfectMatching>) -> String {
    let mut s = String::from("graph bip {\n");
    for v in 0..b.n() {
        let shape = if b.in_v1(v) { "box" } else { "circle" };
        let name = b
            .label(v)
            .map(|l| dot_escape(l))
            .unwrap_or_else(|| (v + 1).to_string());
        let _ = writeln!(s, "  v{} [shape={shape}, label=\"{name}\"];", v + 1);
    }
    for (u, v) in b.edges() {
        let bold = m.map_or(false, |pm| pm.contains(u, v));
        if bold {
            let _ = writeln!(s, "  v{} -- v{} [style=bold];", u + 1, v + 1);
        } else {
            let _ = writeln!(s, "  v{} -- v{};", u + 1, v + 1);
        }
    }
    s.push_str("}\n");
    s
}

/// DOT export of a digraph.
pub fn digraph_to_dot(d: &Digraph) -> String {
    let mut s = String::from("digraph dig {\n");
    for v in 0..d.n() {
        let name = d
            .label(v)
            .map(|l| dot_escape(l))
            .unwrap_or_else(|| (v + 1).to_string());
        let _ = writeln!(s, "  v{} [label=\"{name}\"];", v + 1);
    }
    for (u, v) in d.arcs() {
        let _ = writeln!(s, "  v{} -> v{};", u + 1, v + 1);
    }
    s.push_str("}\n");
    s
}
