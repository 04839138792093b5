//! Planarity testing with an embedding witness.
//!
//! The core routine embeds a biconnected graph face by face: starting from a
//! cycle, every remaining fragment is placed into a face containing all of
//! its attachment vertices, preferring fragments with a unique admissible
//! face; failure to find an admissible face certifies non-planarity. The
//! witness is the list of faces as closed vertex walks. General graphs are
//! planar exactly when all their biconnected blocks are.

use crate::graph_core::Graph;
use std::collections::HashSet;

/// Faces of a planar embedding of a biconnected graph, each a cyclic vertex
/// walk (without repeating the first vertex at the end).
pub type FaceList = Vec<Vec<usize>>;

/// Finds any cycle of `g` via DFS, as a vertex list; `None` for forests.
fn find_cycle(g: &Graph) -> Option<Vec<usize>> {
    let n = g.n();
    let mut parent = vec![usize::MAX; n];
    let mut state = vec![0u8; n]; // 0 unseen, 1 active, 2 done
    for s in 0..n {
        if state[s] != 0 {
            continue;
        }
        let mut stack = vec![(s, 0usize)];
        state[s] = 1;
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            if *i < g.neighbours(v).len() {
                let w = g.neighbours(v)[*i];
                *i += 1;
                if w == parent[v] {
                    continue;
                }
                if state[w] == 1 {
                    // Cycle: walk back from v to w.
                    let mut cyc = vec![v];
                    let mut cur = v;
                    while cur != w {
                        cur = parent[cur];
                        cyc.push(cur);
                    }
                    return Some(cyc);
                }
                if state[w] == 0 {
                    parent[w] = v;
                    state[w] = 1;
                    stack.push((w, 0));
                }
            } else {
                state[v] = 2;
                stack.pop();
            }
        }
    }
    None
}

/// Planar embedding of a biconnected graph as a face list, or `None` if the
/// graph is not planar. Graphs without a cycle are embedded with a single
/// degenerate face.
pub fn planar_embedding_biconnected(g: &Graph) -> Option<FaceList> {
    let n = g.n();
    let m = g.m();
    if n >= 3 && m > 3 * n - 6 {
        return None;
    }
    let cycle = match find_cycle(g) {
        Some(c) => c,
        None => {
            // A tree or forest: trivially planar; a single walk as witness.
            return Some(vec![(0..n).collect()]);
        }
    };
    let mut embedded_vertex = vec![false; n];
    for &v in &cycle {
        embedded_vertex[v] = true;
    }
    let mut embedded_edge: HashSet<(usize, usize)> = HashSet::new();
    for i in 0..cycle.len() {
        let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
        embedded_edge.insert((a.min(b), a.max(b)));
    }
    let mut faces: FaceList = vec![cycle.clone(), cycle.iter().rev().copied().collect()];
    loop {
        // Fragments: chords between embedded vertices, and components of the
        // unembedded part with their attachment edges.
        #[derive(Debug)]
        struct Fragment {
            attachments: Vec<usize>,
            /// Some inner component vertex, or None for a chord.
            inner: Option<Vec<usize>>,
            chord: Option<(usize, usize)>,
        }
        let mut fragments: Vec<Fragment> = Vec::new();
        for (u, v) in g.edges() {
            if embedded_vertex[u] && embedded_vertex[v] && !embedded_edge.contains(&(u, v)) {
                fragments.push(Fragment {
                    attachments: vec![u, v],
                    inner: None,
                    chord: Some((u, v)),
                });
            }
        }
        let mut seen = vec![false; n];
        for s in 0..n {
            if embedded_vertex[s] || seen[s] {
                continue;
            }
            let mut comp = vec![s];
            let mut stack = vec![s];
            seen[s] = true;
            let mut attach: HashSet<usize> = HashSet::new();
            while let Some(u) = stack.pop() {
                for &w in g.neighbours(u) {
                    if embedded_vertex[w] {
                        attach.insert(w);
                    } else if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            let mut attachments: Vec<usize> = attach.into_iter().collect();
            attachments.sort_unstable();
            fragments.push(Fragment {
                attachments,
                inner: Some(comp),
                chord: None,
            });
        }
        if fragments.is_empty() {
            return Some(faces);
        }
        // Admissible faces per fragment.
        let face_sets: Vec<HashSet<usize>> = faces
            .iter()
            .map(|f| f.iter().copied().collect())
            .collect();
        let mut chosen: Option<(usize, Vec<usize>)> = None; // fragment idx, faces
        for (i, fr) in fragments.iter().enumerate() {
            let adm: Vec<usize> = face_sets
                .iter()
                .enumerate()
                .filter(|(_, fs)| fr.attachments.iter().all(|a| fs.contains(a)))
                .map(|(j, _)| j)
                .collect();
            if adm.is_empty() {
                return None;
            }
            let replace = match &chosen {
                None => true,
                Some((_, cur)) => adm.len() < cur.len(),
            };
            if replace {
                chosen = Some((i, adm));
            }
        }
        let (fi, adm) = chosen.expect("non-empty fragment list");
        let fr = &fragments[fi];
        let face_idx = adm[0];
        // An alpha path between two attachments through the fragment.
        let path: Vec<usize> = match fr.chord {
            Some((u, v)) => vec![u, v],
            None => {
                let comp: HashSet<usize> =
                    fr.inner.as_ref().unwrap().iter().copied().collect();
                let a = fr.attachments[0];
                // BFS from a through the component to another attachment;
                // biconnected inputs guarantee at least two attachments.
                let b_target: HashSet<usize> = fr.attachments[1..].iter().copied().collect();
                let mut prev: std::collections::HashMap<usize, usize> = Default::default();
                let mut queue = std::collections::VecDeque::new();
                prev.insert(a, a);
                queue.push_back(a);
                let mut hit = usize::MAX;
                'bfs: while let Some(u) = queue.pop_front() {
                    for &w in g.neighbours(u) {
                        if w != a && b_target.contains(&w) && comp.contains(&u) {
                            prev.insert(w, u);
                            hit = w;
                            break 'bfs;
                        }
                        if comp.contains(&w) && !prev.contains_key(&w) {
                            prev.insert(w, u);
                            queue.push_back(w);
                        }
                    }
                }
                if hit == usize::MAX {
                    // Single attachment: impossible in biconnected inputs.
                    return None;
                }
                let mut p = vec![hit];
                let mut cur = hit;
                while cur != a {
                    cur = prev[&cur];
                    p.push(cur);
                }
                p.reverse();
                p
            }
        };
        // Split the face along the path.
        let face = faces.swap_remove(face_idx);
        let pa = face.iter().position(|&v| v == path[0]).expect("attachment on face");
        let pb = face
            .iter()
            .position(|&v| v == path[path.len() - 1])
            .expect("attachment on face");
        let (i, j, p) = if pa <= pb {
            (pa, pb, path.clone())
        } else {
            (pb, pa, path.iter().rev().copied().collect::<Vec<_>>())
        };
        // face[i..=j] plus the reversed interior of p closes one new face;
        // the remaining arc of the old face plus p's interior closes the
        // other.
        let mut f1: Vec<usize> = face[i..=j].to_vec();
        f1.extend(p[1..p.len() - 1].iter().rev());
        let mut f2: Vec<usize> = face[j..].to_vec();
        f2.extend(face[..=i].iter());
        f2.extend(p[1..p.len() - 1].iter());
        faces.push(f1);
        faces.push(f2);
        for &v in &path {
            embedded_vertex[v] = true;
        }
        for w in path.windows(2) {
            embedded_edge.insert((w[0].min(w[1]), w[0].max(w[1])));
        }
    }
}

/// Biconnected components of `g` as edge lists.
pub fn blocks(g: &Graph) -> Vec<Vec<(usize, usize)>> {
    let n = g.n();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut time = 0usize;
    let mut edge_stack: Vec<(usize, usize)> = Vec::new();
    let mut out: Vec<Vec<(usize, usize)>> = Vec::new();
    for s in 0..n {
        if disc[s] != usize::MAX {
            continue;
        }
        // Iterative DFS: stack of (v, parent, neighbour index).
        let mut stack: Vec<(usize, usize, usize)> = vec![(s, usize::MAX, 0)];
        disc[s] = time;
        low[s] = time;
        time += 1;
        while let Some(&mut (v, parent, ref mut i)) = stack.last_mut() {
            if *i < g.neighbours(v).len() {
                let w = g.neighbours(v)[*i];
                *i += 1;
                if disc[w] == usize::MAX {
                    edge_stack.push((v, w));
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, v, 0));
                } else if w != parent && disc[w] < disc[v] {
                    edge_stack.push((v, w));
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&mut (p, _, _)) = stack.last_mut() {
                    low[p] = low[p].min(low[v]);
                    if low[v] >= disc[p] {
                        // p is an articulation point (or root): pop a block.
                        let mut block = Vec::new();
                        while let Some(&(a, b)) = edge_stack.last() {
                            if disc[a] >= disc[v] || (a == p && b == v) {
                                block.push((a, b));
                                edge_stack.pop();
                                if a == p && b == v {
                                    break;
                                }
                            } else {
                                break;
                            }
                        }
                        if !block.is_empty() {
                            out.push(block);
                        }
                    }
                }
            }
        }
    }
    out
}

/// True iff `g` is planar: every biconnected block admits an embedding.
pub fn is_planar(g: &Graph) -> bool {
    for block in blocks(g) {
        if block.len() <= 2 {
            continue;
        }
        let mut vs: Vec<usize> = block.iter().flat_map(|&(a, b)| [a, b]).collect();
        vs.sort_unstable();
        vs.dedup();
        let mut old_to_new = std::collections::HashMap::new();
        for (i, &v) in vs.iter().enumerate() {
            old_to_new.insert(v, i);
        }
        let edges: Vec<(usize, usize)> = block
            .iter()
            .map(|&(a, b)| (old_to_new[&a], old_to_new[&b]))
            .collect();
        let sub = Graph::new(vs.len(), &edges).expect("block subgraph");
        if planar_embedding_biconnected(&sub).is_none() {
            return false;
        }
    }
    true
}

/// Planar embedding witness for a connected biconnected graph, with faces
/// in original vertex ids, or `None` when non-planar.
pub fn planar_embedding(g: &Graph) -> Option<FaceList> {
    planar_embedding_biconnected(g)
}
