//! Generators and index algebra for cylindrical grids/walls and their
//! bipartite (matching) counterparts: slices, strips, triadic partitions,
//! tiles, tilings, colourings, tier-II tilings, wall distance, mixed
//! matchings and twin walls.
//!
//! Coordinates: a wall lives on a cylinder with `n_pos` positions around it
//! (rows) and a number of layers along its axis (columns are layer pairs).
//! A generated cylindrical `k`-wall has `4k` positions and `2k` layers;
//! every position carries a full spoke through all layers (even positions
//! ascend, odd positions descend), every layer keeps every second rung, and
//! the `k` vertical cycles `Q_1..Q_k` are the zigzags of layer pairs.
//! Vertical cycles never wrap along the axis; rows wrap around the
//! cylinder, which is why tile row indices are cyclic.

use crate::error::{Error, Result};
use crate::graph_core::{m_direction, split, BipartiteGraph, Digraph, PerfectMatching};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

/// A cylindrical wall together with its naming scheme: vertical cycles
/// (columns), horizontal paths (row spokes), and per-vertex coordinates.
#[derive(Debug, Clone)]
pub struct WallParametrization {
    /// Number of vertical cycles (the order of the wall).
    pub order: usize,
    /// Positions around the cylinder; row pairs number `n_pos / 2`.
    pub n_pos: usize,
    /// Layers along the axis; always `2 * order` here.
    pub n_layers: usize,
    pub digraph: Digraph,
    /// Vertex of the host wall each vertex came from (identity for
    /// generated walls).
    pub origin: Vec<usize>,
    /// Position (row coordinate) of each vertex.
    pub pos_of: Vec<usize>,
    /// Layer (column coordinate) of each vertex.
    pub layer_of: Vec<usize>,
    /// Whether this parametrisation is the mirrored one.
    pub mirrored: bool,
}

impl WallParametrization {
    /// Vertex at (position, layer); generated walls are dense in these
    /// coordinates.
    pub fn at(&self, pos: usize, layer: usize) -> usize {
        debug_assert!(pos < self.n_pos && layer < self.n_layers);
        let pos = self.internal_pos(pos);
        layer * self.n_pos + pos
    }

    fn internal_pos(&self, pos: usize) -> usize {
        if self.mirrored {
            self.n_pos - 1 - pos
        } else {
            pos
        }
    }

    /// Position of a vertex under the current (possibly mirrored)
    /// parametrisation.
    pub fn position(&self, v: usize) -> usize {
        if self.mirrored {
            self.n_pos - 1 - self.pos_of[v]
        } else {
            self.pos_of[v]
        }
    }

    /// Column index (1-based) of a vertex.
    pub fn column_of(&self, v: usize) -> usize {
        self.layer_of[v] / 2 + 1
    }

    /// Row-pair index (1-based) of a vertex.
    pub fn row_of(&self, v: usize) -> usize {
        self.position(v) / 2 + 1
    }

    /// Number of row pairs.
    pub fn rows(&self) -> usize {
        self.n_pos / 2
    }

    /// The vertical cycle `Q_c` (1-based) as a directed vertex sequence.
    pub fn column_cycle(&self, c: usize) -> Vec<usize> {
        assert!(1 <= c && c <= self.order, "column out of range");
        let (l0, l1) = (2 * (c - 1), 2 * (c - 1) + 1);
        let mut cyc = Vec::with_capacity(2 * self.n_pos);
        let mut p = 0;
        while p < self.n_pos {
            cyc.push(self.at(p, l0));
            cyc.push(self.at(p, l1));
            cyc.push(self.at(p + 1, l1));
            cyc.push(self.at(p + 1, l0));
            p += 2;
        }
        if self.mirrored {
            cyc.reverse();
        }
        cyc
    }

    /// The horizontal path `P^side_j` (side 1 runs from `Q_1` towards
    /// `Q_k`, side 2 the other way), restricted to columns `[c1, c2]`
    /// (1-based, inclusive).
    pub fn horizontal_path(&self, j: usize, side: u8, c1: usize, c2: usize) -> Vec<usize> {
        assert!(side == 1 || side == 2);
        assert!(1 <= j && j <= self.rows());
        assert!(1 <= c1 && c1 <= c2 && c2 <= self.order);
        let pos = 2 * (j - 1) + (side as usize - 1);
        let layers: Vec<usize> = (2 * (c1 - 1)..=2 * (c2 - 1) + 1).collect();
        let mut path: Vec<usize> = layers.iter().map(|&l| self.at(pos, l)).collect();
        // Ascending spokes sit on even internal positions.
        if self.internal_pos(pos) % 2 == 1 {
            path.reverse();
        }
        path
    }

    /// Perimeter: union of the two boundary cycles.
    pub fn perimeter(&self) -> Vec<usize> {
        let mut p = self.column_cycle(1);
        p.extend(self.column_cycle(self.order));
        p.sort_unstable();
        p.dedup();
        p
    }

    /// The mirrored parametrisation of the same wall.
    pub fn mirror(&self) -> WallParametrization {
        let mut w = self.clone();
        w.mirrored = !self.mirrored;
        w
    }

    /// Slice between `Q_i` and `Q_{i+l}` (1-based, inclusive): a wall of
    /// order `l + 1` with the same rows.
    pub fn slice(&self, i: usize, l: usize) -> Result<WallParametrization> {
        if i < 1 || l < 1 || i + l > self.order {
            return Err(Error::IndexOutOfRange(format!(
                "slice({i},{l}) of an order-{} wall",
                self.order
            )));
        }
        let keep: Vec<usize> = (0..self.digraph.n())
            .filter(|&v| {
                let c = self.layer_of[v] / 2;
                c + 1 >= i && c + 1 <= i + l
            })
            .collect();
        let (d, map) = self.digraph.induced(&keep);
        let mut pos_of = vec![0; d.n()];
        let mut layer_of = vec![0; d.n()];
        let mut origin = vec![0; d.n()];
        for v in 0..d.n() {
            let old = map[v];
            pos_of[v] = self.pos_of[old];
            layer_of[v] = self.layer_of[old] - 2 * (i - 1);
            origin[v] = self.origin[old];
        }
        // Re-densify vertex ids to the canonical layout.
        let w = WallParametrization {
            order: l + 1,
            n_pos: self.n_pos,
            n_layers: 2 * (l + 1),
            digraph: d,
            origin,
            pos_of,
            layer_of,
            mirrored: self.mirrored,
        };
        Ok(relayout(w))
    }

    /// Strip between row pairs `i` and `j` (1-based, inclusive): rows do
    /// not wrap within a strip, so the columns degenerate into paths and no
    /// wall parametrisation is returned.
    pub fn strip(&self, i: usize, j: usize) -> Result<StripRegion> {
        if i < 1 || j < i || j > self.rows() {
            return Err(Error::IndexOutOfRange(format!(
                "strip({i},{j}) of a wall with {} rows",
                self.rows()
            )));
        }
        let keep: Vec<usize> = (0..self.digraph.n())
            .filter(|&v| {
                let r = self.position(v) / 2 + 1;
                r >= i && r <= j
            })
            .collect();
        let (d, map) = self.digraph.induced(&keep);
        let origin = map.iter().map(|&v| self.origin[v]).collect();
        Ok(StripRegion {
            digraph: d,
            origin,
            first_row: i,
            last_row: j,
        })
    }

    /// Triadic partition of a wall whose order is divisible by three:
    /// three slices of equal width and three strips of equal height.
    pub fn triadic(&self) -> Result<(Vec<WallParametrization>, Vec<StripRegion>)> {
        if self.order % 3 != 0 {
            return Err(Error::Precondition(
                "triadic partition needs order divisible by 3".into(),
            ));
        }
        let k = self.order / 3;
        let slices = (0..3)
            .map(|i| self.slice(k * i + 1, k - 1))
            .collect::<Result<Vec<_>>>()?;
        let rk = self.rows() / 3;
        let strips = (0..3)
            .map(|i| self.strip(rk * i + 1, rk * (i + 1)))
            .collect::<Result<Vec<_>>>()?;
        Ok((slices, strips))
    }

    /// All cells (inner faces) of the wall, one per (column gap, position).
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for gap in 1..self.order {
            for pos in 0..self.n_pos {
                out.push(self.cell(gap, pos));
            }
        }
        out
    }

    /// The cell in the gap between columns `gap` and `gap + 1` (1-based)
    /// at position `pos`: a six-vertex facial cycle.
    pub fn cell(&self, gap: usize, pos: usize) -> Cell {
        assert!(1 <= gap && gap < self.order);
        let l1 = 2 * gap - 1;
        let l2 = 2 * gap;
        let p2 = (pos + 1) % self.n_pos;
        // The brick detours through the neighbouring layer on the side
        // where the rung between `pos` and `pos + 1` is missing.
        let layers: [usize; 3] = if self.internal_pos(pos) % 2 == 1 {
            [l1 - 1, l1, l2]
        } else {
            [l1, l2, l2 + 1]
        };
        let mut boundary = Vec::with_capacity(6);
        for &l in &layers {
            boundary.push(self.at(pos, l));
        }
        for &l in layers.iter().rev() {
            boundary.push(self.at(p2, l));
        }
        Cell {
            gap,
            pos,
            boundary,
        }
    }

    /// The tile at `(i, j)` of width `d`: columns `i ..= i+2d+1`, row pairs
    /// `j ..= j+2d+1` (cyclically).
    pub fn tile(&self, i: usize, j: usize, d: usize) -> Result<Tile> {
        let span = 2 * d + 1;
        if i < 1 || i + span > self.order {
            return Err(Error::IndexOutOfRange(format!(
                "tile columns {i}..{} exceed order {}",
                i + span,
                self.order
            )));
        }
        let rows = self.rows();
        if j < 1 || j > rows || span + 1 > rows {
            return Err(Error::IndexOutOfRange(format!(
                "tile rows {j}..{} do not fit {} rows",
                j + span,
                rows
            )));
        }
        let row_in = |r: usize| -> bool {
            // 1-based row r in the cyclic interval [j, j+span].
            let off = (r + rows - j) % rows;
            off <= span
        };
        let mut vertices: Vec<usize> = (0..self.digraph.n())
            .filter(|&v| {
                let c = self.column_of(v);
                c >= i && c <= i + span && row_in(self.row_of(v))
            })
            .collect();
        vertices.sort_unstable();
        let left = self.column_path(i, j, span, rows);
        let right = self.column_path(i + span, j, span, rows);
        let upper = self.horizontal_path(j, 1, i, i + span);
        let lower = self.horizontal_path((j + span - 1) % rows + 1, 2, i, i + span);
        let corners = [
            upper[0],
            upper[upper.len() - 1],
            lower[lower.len() - 1],
            lower[0],
        ];
        let centre = self
            .cell(i + d, (2 * (j + d) - 1) % self.n_pos)
            .boundary;
        let mut boundary: HashSet<usize> = HashSet::new();
        boundary.extend(left.iter());
        boundary.extend(right.iter());
        boundary.extend(upper.iter());
        boundary.extend(lower.iter());
        let centre_set: HashSet<usize> = centre.iter().copied().collect();
        let internals: Vec<usize> = vertices
            .iter()
            .copied()
            .filter(|v| !boundary.contains(v) && !centre_set.contains(v))
            .collect();
        Ok(Tile {
            i,
            j,
            d,
            vertices,
            left,
            right,
            upper,
            lower,
            corners,
            centre,
            internals,
        })
    }

    /// Restriction of vertical cycle `c` to the cyclic row interval
    /// `[j, j+span]`, as a path along the cycle.
    fn column_path(&self, c: usize, j: usize, span: usize, rows: usize) -> Vec<usize> {
        let cyc = self.column_cycle(c);
        let row_in = |v: usize| -> bool {
            let off = (self.row_of(v) + rows - j) % rows;
            off <= span
        };
        if span + 1 == rows {
            return cyc;
        }
        // Rotate so the walk starts right after the excluded arc.
        let n = cyc.len();
        let start = (0..n)
            .find(|&t| !row_in(cyc[t]) && row_in(cyc[(t + 1) % n]))
            .expect("cycle leaves the row range");
        let mut path = Vec::new();
        for t in 1..=n {
            let v = cyc[(start + t) % n];
            if row_in(v) {
                path.push(v);
            } else {
                break;
            }
        }
        path
    }

    /// Wall distance between two vertices: the larger of the column gap
    /// and the cyclic row gap.
    pub fn w_distance(&self, u: usize, v: usize) -> Result<usize> {
        if u >= self.digraph.n() || v >= self.digraph.n() {
            return Err(Error::VertexOutOfRange(
                u.max(v),
                self.digraph.n(),
            ));
        }
        let dc = self.column_of(u).abs_diff(self.column_of(v));
        let rows = self.rows();
        let dr_raw = self.row_of(u).abs_diff(self.row_of(v));
        let dr = dr_raw.min(rows - dr_raw);
        Ok(dc.max(dr))
    }
}

/// Rebuilds a parametrisation so vertex ids follow the canonical dense
/// layout `layer * n_pos + pos`.
fn relayout(w: WallParametrization) -> WallParametrization {
    let n = w.digraph.n();
    let mut perm = vec![usize::MAX; n]; // old -> new
    for v in 0..n {
        perm[v] = w.layer_of[v] * w.n_pos + w.pos_of[v];
    }
    let arcs: Vec<(usize, usize)> = w
        .digraph
        .arcs()
        .into_iter()
        .map(|(a, b)| (perm[a], perm[b]))
        .collect();
    let d = Digraph::new(n, &arcs).expect("relayout digraph");
    let mut pos_of = vec![0; n];
    let mut layer_of = vec![0; n];
    let mut origin = vec![0; n];
    for v in 0..n {
        pos_of[perm[v]] = w.pos_of[v];
        layer_of[perm[v]] = w.layer_of[v];
        origin[perm[v]] = w.origin[v];
    }
    WallParametrization {
        order: w.order,
        n_pos: w.n_pos,
        n_layers: w.n_layers,
        digraph: d,
        origin,
        pos_of,
        layer_of,
        mirrored: w.mirrored,
    }
}

/// A strip (horizontal band) of a wall; not itself a wall.
#[derive(Debug, Clone)]
pub struct StripRegion {
    pub digraph: Digraph,
    pub origin: Vec<usize>,
    pub first_row: usize,
    pub last_row: usize,
}

/// An inner face of a wall.
#[derive(Debug, Clone)]
pub struct Cell {
    /// Gap index: the cell lies between columns `gap` and `gap + 1`.
    pub gap: usize,
    /// Position index of the cell's lower spoke.
    pub pos: usize,
    /// Facial cycle (closed walk, six vertices).
    pub boundary: Vec<usize>,
}

/// A tile of a wall: a rectangle of columns and (cyclic) rows with named
/// perimeter paths, corners, a centre cell, and internal vertices.
#[derive(Debug, Clone)]
pub struct Tile {
    pub i: usize,
    pub j: usize,
    pub d: usize,
    pub vertices: Vec<usize>,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub upper: Vec<usize>,
    pub lower: Vec<usize>,
    /// Upper-left, upper-right, lower-right, lower-left.
    pub corners: [usize; 4],
    pub centre: Vec<usize>,
    pub internals: Vec<usize>,
}

impl Tile {
    pub fn perimeter(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self
            .left
            .iter()
            .chain(self.right.iter())
            .chain(self.upper.iter())
            .chain(self.lower.iter())
            .copied()
            .collect();
        p.sort_unstable();
        p.dedup();
        p
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// Vertices not on the perimeter (centre and internals).
    pub fn interior(&self) -> Vec<usize> {
        let per: HashSet<usize> = self.perimeter().into_iter().collect();
        self.vertices
            .iter()
            .copied()
            .filter(|v| !per.contains(v))
            .collect()
    }
}

/// A family of tiles from the standard column/row functions, with the
/// four-colouring.
#[derive(Debug, Clone)]
pub struct Tiling {
    pub width: usize,
    pub xi: usize,
    pub xi_prime: usize,
    pub mirrored: bool,
    pub tiles: Vec<Tile>,
    /// Colour (1..=4) per tile, parallel to `tiles`.
    pub colours: Vec<u8>,
}

impl Tiling {
    pub fn tiles_of_colour(&self, colour: u8) -> Vec<&Tile> {
        self.tiles
            .iter()
            .zip(self.colours.iter())
            .filter(|(_, &c)| c == colour)
            .map(|(t, _)| t)
            .collect()
    }
}

/// The standard tiling of a wall of order `3k`: tiles of width `w` placed
/// at `colF(p) = (k+2-ξ) + (p-1)(2w+1)` and `rowF(q) = ξ' + (q-1)(2w+1)`,
/// with colour `(p mod 2) + 2 (q mod 2) + 1`. Wrapped tiles whose interior
/// would overlap an earlier tile are dropped.
pub fn make_tiling(
    wall: &WallParametrization,
    w: usize,
    xi: usize,
    xi_prime: usize,
) -> Result<Tiling> {
    if wall.order % 3 != 0 {
        return Err(Error::Precondition("tiling needs a wall of order 3k".into()));
    }
    let k = wall.order / 3;
    if xi < 1 || xi > w + 1 || xi_prime < 1 || xi_prime > w + 1 {
        return Err(Error::Precondition("ξ, ξ' must lie in [1, w+1]".into()));
    }
    let step = 2 * w + 1;
    if k + 2 < xi || wall.order < k + 2 - xi + step || wall.rows() < step + 1 {
        return Err(Error::WallTooSmall(format!(
            "order {} cannot host width-{w} tiles",
            wall.order
        )));
    }
    let rows = wall.rows();
    let p_max = (k + xi - 1).div_ceil(step) + 1;
    let q_max = (rows - xi_prime).div_ceil(step) + 1;
    let mut tiles = Vec::new();
    let mut colours = Vec::new();
    let mut taken_interior: HashSet<usize> = HashSet::new();
    for p in 1..=p_max {
        let col = (k + 2 - xi) + (p - 1) * step;
        if col + step > wall.order {
            continue;
        }
        for q in 1..=q_max {
            let row = (xi_prime + (q - 1) * step - 1) % rows + 1;
            let tile = wall.tile(col, row, w)?;
            let interior = tile.interior();
            if interior.iter().any(|v| taken_interior.contains(v)) {
                continue;
            }
            taken_interior.extend(interior.iter());
            colours.push(((p % 2) + 2 * (q % 2) + 1) as u8);
            tiles.push(tile);
        }
    }
    Ok(Tiling {
        width: w,
        xi,
        xi_prime,
        mirrored: wall.mirrored,
        tiles,
        colours,
    })
}

/// The elementary cylindrical grid of order `k`: `k` concentric directed
/// `2k`-cycles joined by alternating inward/outward spokes.
pub fn gen_cylindrical_grid(k: usize) -> Digraph {
    assert!(k >= 1);
    let n_pos = 2 * k;
    let at = |pos: usize, layer: usize| layer * n_pos + pos;
    let mut arcs = Vec::new();
    for l in 0..k {
        for p in 0..n_pos {
            arcs.push((at(p, l), at((p + 1) % n_pos, l)));
        }
    }
    for p in 0..n_pos {
        for l in 0..k.saturating_sub(1) {
            if p % 2 == 0 {
                arcs.push((at(p, l), at(p, l + 1)));
            } else {
                arcs.push((at(p, l + 1), at(p, l)));
            }
        }
    }
    Digraph::new(n_pos * k, &arcs).expect("cylindrical grid")
}

/// The elementary cylindrical `k`-wall: the order-`2k` grid with every
/// second rung deleted in a staggered pattern; `8k²` vertices.
pub fn gen_cylindrical_wall(k: usize) -> WallParametrization {
    assert!(k >= 1);
    let n_pos = 4 * k;
    let n_layers = 2 * k;
    let at = |pos: usize, layer: usize| layer * n_pos + pos;
    let mut arcs = Vec::new();
    // Rungs: even layers keep odd-position starts, odd layers even ones.
    for l in 0..n_layers {
        for p in 0..n_pos {
            if p % 2 != l % 2 {
                arcs.push((at(p, l), at((p + 1) % n_pos, l)));
            }
        }
    }
    // Full spokes, alternating orientation.
    for p in 0..n_pos {
        for l in 0..n_layers - 1 {
            if p % 2 == 0 {
                arcs.push((at(p, l), at(p, l + 1)));
            } else {
                arcs.push((at(p, l + 1), at(p, l)));
            }
        }
    }
    let n = n_pos * n_layers;
    let mut d = Digraph::new(n, &arcs).expect("cylindrical wall");
    let labels: Vec<String> = (0..n)
        .map(|v| {
            let pos = v % n_pos;
            let layer = v / n_pos;
            format!("c{}r{}s{}", layer / 2 + 1, pos / 2 + 1, pos % 2 + 1)
        })
        .collect();
    d.set_labels(labels);
    WallParametrization {
        order: k,
        n_pos,
        n_layers,
        digraph: d,
        origin: (0..n).collect(),
        pos_of: (0..n).map(|v| v % n_pos).collect(),
        layer_of: (0..n).map(|v| v / n_pos).collect(),
        mirrored: false,
    }
}

/// The cylindrical matching grid `CG_k` with its canonical matching: `k`
/// disjoint `4k`-cycles wired so that the matching direction is the
/// cylindrical grid of order `k`.
pub fn gen_matching_grid(k: usize) -> (BipartiteGraph, PerfectMatching) {
    assert!(k >= 1);
    // Cycle i (0-based), position j in [0, 4k): odd 1-based j are black.
    let n1 = 2 * k * k;
    let black = |i: usize, j: usize| i * 2 * k + j / 2; // j even (0-based)
    let white = |i: usize, j: usize| n1 + i * 2 * k + (j - 1) / 2; // j odd
    let mut edges = Vec::new();
    let mut matching = Vec::new();
    for i in 0..k {
        for j0 in (0..4 * k).step_by(2) {
            // 1-based j = j0 + 1 (odd, black); matching edge to j0 + 2.
            edges.push((black(i, j0), white(i, j0 + 1)));
            matching.push((black(i, j0), white(i, j0 + 1)));
            // Cycle edge from j0+2 (white) to j0+3 (black, wraps).
            let jn = (j0 + 2) % (4 * k);
            edges.push((black(i, jn), white(i, j0 + 1)));
        }
        // Cross edges: v_j^i v_{j+1}^{i+1} for 1-based j ≡ 1 (mod 4).
        if i + 1 < k {
            for j0 in (0..4 * k).step_by(4) {
                edges.push((black(i, j0), white(i + 1, j0 + 1)));
            }
        }
        // v_j^i v_{j+1}^{i-1} for 1-based j ≡ 3 (mod 4).
        if i > 0 {
            for j0 in (2..4 * k).step_by(4) {
                edges.push((black(i, j0), white(i - 1, j0 + 1)));
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let b = BipartiteGraph::new(n1, n1, &edges).expect("matching grid");
    let m = PerfectMatching::new(&b, &matching).expect("canonical matching");
    (b, m)
}

/// A matching wall: bipartite graph, canonical matching, and the wall
/// parametrisation of its matching direction. Digraph vertex `u`
/// corresponds to the matching edge `(v1_of[u], v2_of[u])`.
#[derive(Debug, Clone)]
pub struct MatchingWall {
    pub graph: BipartiteGraph,
    pub matching: PerfectMatching,
    pub param: WallParametrization,
    pub v1_of: Vec<usize>,
    pub v2_of: Vec<usize>,
    /// Bisubdivided arcs: digraph arc -> inner path vertices (bipartite).
    pub subdivisions: BTreeMap<(usize, usize), Vec<usize>>,
}

/// The elementary matching `k`-wall (optionally bisubdivided): the split
/// of the elementary cylindrical `k`-wall, so its matching direction under
/// the canonical matching is exactly that wall. Subdivision lengths are
/// odd path lengths per directed arc (1 = untouched).
pub fn gen_matching_wall(
    k: usize,
    subdivision: Option<&BTreeMap<(usize, usize), usize>>,
) -> Result<MatchingWall> {
    let param = gen_cylindrical_wall(k);
    let (b, m) = split(&param.digraph)?;
    let n = param.digraph.n();
    let v1_of: Vec<usize> = (0..n).collect();
    let mut v2_of: Vec<usize> = (0..n).map(|u| n + u).collect();
    let mut subdivisions = BTreeMap::new();
    let (graph, matching) = if let Some(sub) = subdivision {
        let mut edges: Vec<(usize, usize)> = b.edges();
        let mut medges: Vec<(usize, usize)> = m.edges();
        let mut next_black = b.n1();
        let mut next_white_off = 0usize; // new whites appended after shift
        let mut new_whites: Vec<()> = Vec::new();
        let mut extra_edges: Vec<(EdgeEnd, EdgeEnd)> = Vec::new();
        #[derive(Clone, Copy)]
        enum EdgeEnd {
            OldBlack(usize),
            OldWhite(usize),
            NewBlack(usize),
            NewWhite(usize),
        }
        for (&(u, v), &len) in sub {
            if len % 2 == 0 {
                return Err(Error::Precondition(format!(
                    "subdivision length {len} for arc ({u},{v}) is even"
                )));
            }
            if !param.digraph.has_arc(u, v) {
                return Err(Error::Precondition(format!("({u},{v}) is not an arc")));
            }
            if len == 1 {
                continue;
            }
            // Remove the original edge (u, n+v); insert the path
            // u - w1 - b1 - w2 - b2 - ... - (n+v) with (w_i, b_i) matched.
            let eidx = edges
                .iter()
                .position(|&(a, c)| a == u && c == n + v)
                .expect("edge present");
            edges.swap_remove(eidx);
            let inner_pairs = (len - 1) / 2;
            let mut chain: Vec<EdgeEnd> = vec![EdgeEnd::OldBlack(u)];
            for _ in 0..inner_pairs {
                chain.push(EdgeEnd::NewWhite(next_white_off));
                chain.push(EdgeEnd::NewBlack(next_black - b.n1()));
                next_white_off += 1;
                next_black += 1;
                new_whites.push(());
            }
            chain.push(EdgeEnd::OldWhite(n + v));
            for t in 0..chain.len() - 1 {
                extra_edges.push((chain[t], chain[t + 1]));
            }
            subdivisions.insert((u, v), Vec::new());
        }
        // Re-index: blacks 0..n1+newB, whites shifted by newB.
        let new_b = next_black - b.n1();
        let id = |e: EdgeEnd| -> usize {
            match e {
                EdgeEnd::OldBlack(x) => x,
                EdgeEnd::NewBlack(t) => b.n1() + t,
                EdgeEnd::OldWhite(x) => x + new_b,
                EdgeEnd::NewWhite(t) => b.n1() + new_b + b.n2() + t,
            }
        };
        let mut all_edges: Vec<(usize, usize)> = edges
            .iter()
            .map(|&(x, y)| (x, y + new_b))
            .collect();
        let mut all_matching: Vec<(usize, usize)> = medges
            .drain(..)
            .map(|(x, y)| (x, y + new_b))
            .collect();
        for (a, c) in extra_edges {
            let (x, y) = (id(a), id(c));
            let e = if x < y { (x, y) } else { (y, x) };
            all_edges.push(e);
            // Matching edges are the (new white, new black) pairs.
            if let (EdgeEnd::NewWhite(_), EdgeEnd::NewBlack(_)) = (a, c) {
                all_edges.pop();
                all_edges.push((y, x));
                all_matching.push((y, x));
            }
        }
        let g = BipartiteGraph::new(b.n1() + new_b, b.n2() + new_whites.len(), &all_edges)?;
        let pm = PerfectMatching::new(&g, &all_matching)?;
        // Black vertices keep their ids; whites shift past the new blacks.
        for y in v2_of.iter_mut() {
            *y += new_b;
        }
        // Record subdivision paths.
        let mut next_b2 = b.n1();
        let mut next_w2 = b.n1() + new_b + b.n2();
        for (arc, path) in subdivisions.iter_mut() {
            let len = sub[arc];
            let inner_pairs = (len - 1) / 2;
            for _ in 0..inner_pairs {
                path.push(next_w2);
                path.push(next_b2);
                next_w2 += 1;
                next_b2 += 1;
            }
        }
        (g, pm)
    } else {
        (b, m)
    };
    Ok(MatchingWall {
        graph,
        matching,
        param,
        v1_of,
        v2_of,
        subdivisions,
    })
}

impl MatchingWall {
    /// Bipartite vertices forming a digraph-level vertex set, both classes.
    pub fn bip_vertices(&self, dig: &[usize]) -> Vec<usize> {
        let mut out = Vec::with_capacity(2 * dig.len());
        for &u in dig {
            out.push(self.v1_of[u]);
            out.push(self.v2_of[u]);
        }
        out.sort_unstable();
        out
    }

    /// The conformal cycle of the bipartite wall whose matching direction
    /// is the vertical cycle `Q_c`.
    pub fn column_conformal_cycle(&self, c: usize) -> Vec<usize> {
        let cyc = self.param.column_cycle(c);
        let mut out = Vec::with_capacity(2 * cyc.len());
        for t in 0..cyc.len() {
            out.push(self.v1_of[cyc[t]]);
            out.push(self.v2_of[cyc[(t + 1) % cyc.len()]]);
        }
        out
    }

    /// The perfect matching `M_T` for a tile: the canonical matching
    /// flipped along the conformal cycle of the tile's left column.
    pub fn tile_matching(&self, tile: &Tile) -> Result<PerfectMatching> {
        let cyc = self.column_conformal_cycle(
            self.param.column_of(tile.left[0]),
        );
        let mut edges: HashSet<(usize, usize)> =
            self.matching.edges().into_iter().collect();
        for t in 0..cyc.len() {
            let (a, b) = (cyc[t], cyc[(t + 1) % cyc.len()]);
            let e = if self.graph.in_v1(a) { (a, b) } else { (b, a) };
            if edges.contains(&e) {
                edges.remove(&e);
            } else {
                edges.insert(e);
            }
        }
        let list: Vec<(usize, usize)> = edges.into_iter().collect();
        PerfectMatching::new(&self.graph, &list)
    }
}

/// Mixed matching and twin walls of a slice: flip the canonical matching
/// of the split along every second vertical cycle (starting with the
/// first); the resulting direction contains one up-oriented and one
/// down-oriented half-order wall.
#[derive(Debug, Clone)]
pub struct TwinWalls {
    pub bipartite: BipartiteGraph,
    pub mixed: PerfectMatching,
    /// The direction under the mixed matching; vertices are those of the
    /// original slice digraph.
    pub direction: Digraph,
    /// Flipped (reversed) column cycles: the up-wall's vertical cycles.
    pub up_columns: Vec<Vec<usize>>,
    /// Intact column cycles: the down-wall's vertical cycles.
    pub down_columns: Vec<Vec<usize>>,
}

pub fn mixed_matching_twin_walls(slice: &WallParametrization) -> Result<TwinWalls> {
    let (b, m) = split(&slice.digraph)?;
    let n = slice.digraph.n();
    let mut edges: HashSet<(usize, usize)> = m.edges().into_iter().collect();
    let mut up = Vec::new();
    let mut down = Vec::new();
    for c in 1..=slice.order {
        let cyc = slice.column_cycle(c);
        if c % 2 == 1 {
            // Flip M along the conformal image of this cycle.
            for t in 0..cyc.len() {
                let (u, v) = (cyc[t], cyc[(t + 1) % cyc.len()]);
                let me = (u, n + u);
                if edges.contains(&me) {
                    edges.remove(&me);
                }
                edges.insert((u, n + v));
            }
            let mut rev = cyc.clone();
            rev.reverse();
            up.push(rev);
        } else {
            down.push(cyc);
        }
    }
    let list: Vec<(usize, usize)> = edges.into_iter().collect();
    let mixed = PerfectMatching::new(&b, &list)?;
    let raw = m_direction(&b, &mixed)?;
    // Vertices of `raw` are V1 ids of `b`, which coincide with the slice's
    // vertex ids.
    let direction = raw;
    // Sanity: flipped cycles appear reversed, intact ones unchanged.
    for cyc in &up {
        for t in 0..cyc.len() {
            let (x, y) = (cyc[t], cyc[(t + 1) % cyc.len()]);
            if !direction.has_arc(x, y) {
                return Err(Error::Precondition(
                    "flipped column is not reversed in the mixed direction".into(),
                ));
            }
        }
    }
    for cyc in &down {
        for t in 0..cyc.len() {
            let (x, y) = (cyc[t], cyc[(t + 1) % cyc.len()]);
            if !direction.has_arc(x, y) {
                return Err(Error::Precondition(
                    "intact column is missing from the mixed direction".into(),
                ));
            }
        }
    }
    Ok(TwinWalls {
        bipartite: b,
        mixed,
        direction,
        up_columns: up,
        down_columns: down,
    })
}

/// The extension of a slice that covers a tiling, plus the colour-`i`
/// tiling slice and its tier-II tiling.
pub fn tiling_slice_and_tier2(
    wall: &WallParametrization,
    wtilde: (usize, usize),
    tiling: &Tiling,
    colour: u8,
    f: usize,
) -> Result<(ZoomedWall, ZoomedWall, Vec<(usize, Tile)>)> {
    let (wi, wl) = wtilde;
    let wt = wall.slice(wi, wl)?;
    let wt_cols: BTreeSet<usize> = (wi..=wi + wl).collect();
    let wt_perimeter: HashSet<usize> = {
        let per = wt.perimeter();
        per.iter().map(|&v| wt.origin[v]).collect()
    };
    // Tiles meeting the slice.
    let col_of = |v: usize| wall.column_of(v);
    let meets: Vec<usize> = (0..tiling.tiles.len())
        .filter(|&t| {
            tiling.tiles[t]
                .vertices
                .iter()
                .any(|&v| wt_cols.contains(&col_of(v)))
        })
        .collect();
    // Precondition: no colour-i tile meets the slice perimeter.
    for &t in &meets {
        if tiling.colours[t] == colour
            && tiling.tiles[t]
                .vertices
                .iter()
                .any(|v| wt_perimeter.contains(v))
        {
            return Err(Error::Precondition(
                "a colour-i tile meets the slice perimeter".into(),
            ));
        }
    }
    // Extension columns: all columns touched by the meeting tiles.
    let mut iq: BTreeSet<usize> = BTreeSet::new();
    for &t in &meets {
        for &v in &tiling.tiles[t].vertices {
            iq.insert(col_of(v));
        }
    }
    iq.extend(wt_cols.iter());
    let extension = zoomed(wall, &iq.iter().copied().collect::<Vec<_>>(), None);
    // Colour-i columns and rows to drop.
    let mut bad_cols: BTreeSet<usize> = BTreeSet::new();
    let mut bad_rows: BTreeSet<usize> = BTreeSet::new();
    for &t in &meets {
        if tiling.colours[t] == colour {
            for &v in &tiling.tiles[t].vertices {
                bad_cols.insert(col_of(v));
                bad_rows.insert(wall.row_of(v));
            }
        }
    }
    let jq: Vec<usize> = iq.iter().copied().filter(|c| !bad_cols.contains(c)).collect();
    let slice_wall = zoomed(wall, &jq, Some(&bad_rows));
    // Tier-II tiling: search the width-f tilings of the slice wall for the
    // one enclosing every removed tile in a centre.
    let removed: Vec<&Tile> = meets
        .iter()
        .filter(|&&t| tiling.colours[t] == colour)
        .map(|&t| &tiling.tiles[t])
        .collect();
    if removed.is_empty() {
        return Ok((extension, slice_wall, Vec::new()));
    }
    let candidates = tier2_candidates(&slice_wall.param, f);
    for tiles in candidates {
        let mut assignment = Vec::new();
        let mut ok = true;
        'rem: for rt in &removed {
            for (idx, tile) in tiles.iter().enumerate() {
                if centre_encloses(wall, &slice_wall, tile, rt) {
                    assignment.push((idx, tile.clone()));
                    continue 'rem;
                }
            }
            ok = false;
            break;
        }
        if ok {
            return Ok((extension, slice_wall, assignment));
        }
    }
    Err(Error::InconclusiveAtCaps(
        "no tier-II tiling encloses all removed tiles".into(),
    ))
}

/// A wall obtained by forgetting columns (and optionally row connections)
/// of a host wall; keeps the correspondence to host vertices.
#[derive(Debug, Clone)]
pub struct ZoomedWall {
    pub param: WallParametrization,
    /// Host column represented by each zoomed column (1-based, sorted).
    pub host_columns: Vec<usize>,
}

fn zoomed(
    wall: &WallParametrization,
    cols: &[usize],
    dropped_rows: Option<&BTreeSet<usize>>,
) -> ZoomedWall {
    let k = cols.len();
    let n_pos = wall.n_pos;
    let at = |pos: usize, layer: usize| layer * n_pos + pos;
    let mut arcs = Vec::new();
    for (ci, _) in cols.iter().enumerate() {
        for l0 in [2 * ci, 2 * ci + 1] {
            for p in 0..n_pos {
                if p % 2 != l0 % 2 {
                    arcs.push((at(p, l0), at((p + 1) % n_pos, l0)));
                }
            }
        }
        // Spokes within the column pair.
        for p in 0..n_pos {
            if p % 2 == 0 {
                arcs.push((at(p, 2 * ci), at(p, 2 * ci + 1)));
            } else {
                arcs.push((at(p, 2 * ci + 1), at(p, 2 * ci)));
            }
        }
        // Connections to the next kept column (contracting the omitted
        // path through forgotten columns), unless the row was dropped.
        if ci + 1 < k {
            for p in 0..n_pos {
                if let Some(drop) = dropped_rows {
                    if drop.contains(&(p / 2 + 1)) {
                        continue;
                    }
                }
                if p % 2 == 0 {
                    arcs.push((at(p, 2 * ci + 1), at(p, 2 * ci + 2)));
                } else {
                    arcs.push((at(p, 2 * ci + 2), at(p, 2 * ci + 1)));
                }
            }
        }
    }
    let n = n_pos * 2 * k;
    let d = Digraph::new(n, &arcs).expect("zoomed wall");
    let origin: Vec<usize> = (0..n)
        .map(|v| {
            let pos = v % n_pos;
            let layer = v / n_pos;
            let host_col = cols[layer / 2];
            let host_layer = 2 * (host_col - 1) + layer % 2;
            wall.origin[wall.at(pos, host_layer)]
        })
        .collect();
    ZoomedWall {
        param: WallParametrization {
            order: k,
            n_pos,
            n_layers: 2 * k,
            digraph: d,
            origin,
            pos_of: (0..n).map(|v| v % n_pos).collect(),
            layer_of: (0..n).map(|v| v / n_pos).collect(),
            mirrored: wall.mirrored,
        },
        host_columns: cols.to_vec(),
    }
}

/// Candidate width-`f` tilings of a zoomed wall for the tier-II search:
/// all offsets in both parametrisations whose tiles fit.
fn tier2_candidates(wall: &WallParametrization, f: usize) -> Vec<Vec<Tile>> {
    let span = 2 * f + 1;
    let mut out = Vec::new();
    for mirrored in [false, true] {
        let w = if mirrored { wall.mirror() } else { wall.clone() };
        for xi in 1..=wall.order.saturating_sub(span) {
            for xi_p in 1..=w.rows() {
                let mut tiles = Vec::new();
                let mut col = xi;
                while col + span <= w.order {
                    let mut row = xi_p;
                    let mut steps = 0;
                    while steps * (span) < w.rows() {
                        if let Ok(t) = w.tile(col, (row - 1) % w.rows() + 1, f) {
                            tiles.push(t);
                        }
                        row += span;
                        steps += 1;
                    }
                    col += span;
                }
                if !tiles.is_empty() {
                    out.push(tiles);
                }
            }
        }
    }
    out
}

/// Does the centre cell of `tile` (in the zoomed slice wall) strictly
/// enclose the removed tile `rt` (in host coordinates)?
fn centre_encloses(
    host: &WallParametrization,
    slicew: &ZoomedWall,
    tile: &Tile,
    rt: &Tile,
) -> bool {
    // Host columns strictly between the centre's bounding columns.
    let centre_cols: Vec<usize> = {
        let mut c: Vec<usize> = tile
            .centre
            .iter()
            .map(|&v| slicew.param.column_of(v))
            .collect();
        c.sort_unstable();
        c.dedup();
        c
    };
    if centre_cols.len() != 2 {
        return false;
    }
    let lo = slicew.host_columns[centre_cols[0] - 1];
    let hi = slicew.host_columns[centre_cols[1] - 1];
    let rt_cols: BTreeSet<usize> = rt.vertices.iter().map(|&v| host.column_of(v)).collect();
    if !rt_cols.iter().all(|&c| c > lo && c < hi) {
        return false;
    }
    // Host rows of the removed tile must avoid the rows present in the
    // slice wall's centre boundary (strict containment in the gap).
    let centre_rows: BTreeSet<usize> = tile
        .centre
        .iter()
        .map(|&v| {
            let o = slicew.param.origin[v];
            host.row_of(host_vertex_index(host, o))
        })
        .collect();
    let rt_rows: BTreeSet<usize> = rt.vertices.iter().map(|&v| host.row_of(v)).collect();
    rt_rows.is_disjoint(&centre_rows)
}

fn host_vertex_index(host: &WallParametrization, origin: usize) -> usize {
    // Generated walls have identity origin.
    debug_assert!(origin < host.digraph.n());
    origin
}

/// DOT export of a wall with rows and columns in the node label.
pub fn wall_to_dot(w: &WallParametrization) -> String {
    let mut s = String::from("digraph wall {\n  rankdir=LR;\n");
    for v in 0..w.digraph.n() {
        s.push_str(&format!(
            "  v{} [label=\"c{}r{}s{}\"];\n",
            v,
            w.column_of(v),
            w.row_of(v),
            w.position(v) % 2 + 1
        ));
    }
    for (a, b) in w.digraph.arcs() {
        s.push_str(&format!("  v{} -> v{};\n", a, b));
    }
    s.push_str("}\n");
    s
}

/// Map from tile to tile map entries used by callers that pair added
/// vertices with tiles.
pub type TileMap = HashMap<usize, usize>;
