use matchwall::decomposition::brace_decomposition;
use matchwall::flatwall::*;
use matchwall::pfaffian::is_planar_bipartite;
use std::time::Instant;

fn main() {
    let bare = HostedWall::standalone(6).unwrap();
    let tile = bare.param.tile(2, 1, 1).unwrap();
    let interior = tile.interior();
    let x = 97usize;
    for &y in interior.iter() {
        if bare.param.column_of(y) != 4 || y == x {
            continue;
        }
        let chord = (bare.v1_of[x], bare.v2_of[y]);
        let mut edges = bare.graph.edges();
        edges.push(chord);
        let graph =
            matchwall::BipartiteGraph::new(bare.graph.n1(), bare.graph.n2(), &edges).unwrap();
        if is_planar_bipartite(&graph) {
            eprintln!("y {}: host planar", y);
            continue;
        }
        let t = Instant::now();
        let dec = brace_decomposition(&graph).unwrap();
        let nonplanar: Vec<usize> = dec
            .braces
            .iter()
            .enumerate()
            .filter(|(_, br)| !is_planar_bipartite(br))
            .map(|(i, _)| i)
            .collect();
        eprintln!(
            "y {} row {}: braces {} nonplanar {:?} sizes {:?} ({:?})",
            y,
            bare.param.row_of(y),
            dec.braces.len(),
            nonplanar,
            nonplanar
                .iter()
                .map(|&i| dec.braces[i].n())
                .collect::<Vec<_>>(),
            t.elapsed()
        );
    }
}
