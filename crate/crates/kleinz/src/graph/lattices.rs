//! Bundled lattices in the Klein bottle, with parameterizable weights.
//!
//! Crossing data conventions: the fundamental domain has its horizontal
//! sides glued periodically (curve `a`, crossed by edges leaving through the
//! top or bottom) and its vertical sides glued with a vertical flip (curve
//! `b`, signed left-to-right). The midline `a'` is crossed by edges passing
//! between the lower and upper halves of the domain.

use super::{Curves, Edge, EmbeddedGraph, Surface};

/// 2x1 square lattice: two vertices stacked vertically, one column.
///
/// `x1`, `x2` are the two horizontal (side-wrapping) weights, `y1` the
/// interior vertical weight and `y2` the vertical wrap weight. Bipartite.
pub fn square_2x1(x1: f64, x2: f64, y1: f64, y2: f64) -> EmbeddedGraph {
    EmbeddedGraph {
        name: "square_2x1".into(),
        surface: Surface::Klein,
        vertex_count: 2,
        colors: Some(vec![0, 1]),
        edges: vec![
            Edge::new(0, 1, y1, 0, 1, 0), // y1: interior vertical, crosses a'
            Edge::new(0, 1, y2, 1, 0, 0), // y2: vertical wrap, crosses a
            Edge::new(0, 1, x1, 0, 0, 1), // x1: horizontal wrap, left-to-right
            Edge::new(0, 1, x2, 0, 0, -1), // x2: horizontal wrap, right-to-left
        ],
        // counterclockwise edge-end orders; ends are 2e (u-end) and 2e+1 (v-end)
        rotation: Some(vec![
            vec![0, 6, 2, 4], // v0: y1 up, x2 west, y2 down, x1 east
            vec![3, 5, 1, 7], // v1: y2 up, x1 west, y1 down, x2 east
        ]),
        orientation: Some(vec![1, 1, 1, 1]),
        curves: Some(Curves {
            c: vec![1, 0],
            cp: vec![0, 1],
        }),
    }
}

/// 1x2 square lattice: two vertices side by side, one row.
///
/// The vertical edges are loops through the horizontal identification; this
/// graph is not bipartite. `x1` is the interior horizontal weight, `x2` the
/// side-wrapping one, `y1`/`y2` the loop weights at the two vertices.
pub fn square_1x2(x1: f64, x2: f64, y1: f64, y2: f64) -> EmbeddedGraph {
    EmbeddedGraph {
        name: "square_1x2".into(),
        surface: Surface::Klein,
        vertex_count: 2,
        colors: None,
        edges: vec![
            Edge::new(0, 1, x1, 0, 1, 0),  // x1: interior, crosses a'
            Edge::new(0, 1, x2, 0, 0, -1), // x2: wrap
            Edge::new(0, 0, y1, 1, 1, 0),  // vertical loop at v0
            Edge::new(1, 1, y2, 1, 1, 0),  // vertical loop at v1
        ],
        rotation: Some(vec![
            vec![0, 4, 2, 5], // v0: x1 east, loop up, x2 west, loop down
            vec![3, 6, 1, 7], // v1: x2 east, loop up, x1 west, loop down
        ]),
        orientation: Some(vec![1, 1, 1, 1]),
        curves: None, // too small for disjoint normalisation curves
    }
}

/// Hexagonal lattice with one fundamental hexagon. Bipartite.
pub fn hexagonal(nu1: f64, nu2: f64, nu3: f64) -> EmbeddedGraph {
    EmbeddedGraph {
        name: "hexagonal".into(),
        surface: Surface::Klein,
        vertex_count: 2,
        colors: Some(vec![0, 1]),
        edges: vec![
            Edge::new(0, 1, nu1, 0, 1, 0), // crosses a'
            Edge::new(0, 1, nu2, 0, 0, 1), // crosses b
            Edge::new(0, 1, nu3, 1, 0, 0), // crosses a
        ],
        rotation: Some(vec![
            vec![0, 4, 2], // v0: nu1 up, nu3 down-west, nu2 down-east
            vec![5, 3, 1], // v1
        ]),
        orientation: Some(vec![1, 1, 1]),
        curves: Some(Curves {
            c: vec![2, 0],
            cp: vec![0, 2],
        }),
    }
}

/// Isotropic triangular lattice (all weights 1).
pub fn triangular() -> EmbeddedGraph {
    EmbeddedGraph {
        name: "triangular".into(),
        surface: Surface::Klein,
        vertex_count: 2,
        colors: None,
        edges: vec![
            Edge::new(0, 0, 1.0, 0, 1, -1), // horizontal bond at v0 (loop)
            Edge::new(1, 1, 1.0, 1, 0, 1),  // horizontal bond at v1 (loop)
            Edge::new(0, 1, 1.0, 0, 1, 0),  // vertical interior
            Edge::new(0, 1, 1.0, 1, 0, 0),  // vertical wrap
            Edge::new(0, 1, 1.0, 0, 0, 1),  // diagonal east
            Edge::new(0, 1, 1.0, 0, 0, -1), // diagonal west
        ],
        rotation: Some(vec![
            vec![8, 1, 4, 0, 10, 6], // v0: E, ENE, N, WNW, W, S
            vec![11, 2, 7, 3, 9, 5], // v1: E, ENE, N, WNW, W, S
        ]),
        orientation: Some(vec![1, 1, -1, -1, -1, -1]),
        curves: Some(Curves {
            c: vec![3, 2],
            cp: vec![2, 3],
        }),
    }
}

/// M-by-N square lattice in the Klein bottle with horizontal weight `x` and
/// vertical weight `y`. Row indices grow upward; the right column wraps to
/// the left one through the flip (row `i` to `M-1-i`).
pub fn square_klein(m_rows: usize, n_cols: usize, x: f64, y: f64) -> EmbeddedGraph {
    let nv = m_rows * n_cols;
    let idx = |i: usize, j: usize| i * n_cols + j;
    let mut edges = Vec::new();
    // per-vertex end slots, filled as [north, west, south, east]
    let mut slots: Vec<[usize; 4]> = vec![[usize::MAX; 4]; nv];
    for i in 0..m_rows {
        for j in 0..n_cols {
            // vertical edge upward from (i, j)
            let (ti, a) = if i + 1 == m_rows { (0, 1) } else { (i + 1, 0) };
            let mut ap = 0;
            if m_rows % 2 == 0 && i + 1 == m_rows / 2 {
                ap = 1;
            }
            if m_rows % 2 == 1 && i == (m_rows - 1) / 2 {
                ap = 1;
            }
            let e = edges.len();
            slots[idx(i, j)][0] = 2 * e; // north at source
            slots[idx(ti, j)][2] = 2 * e + 1; // south at target
            edges.push(Edge::new(idx(i, j), idx(ti, j), y, a, ap, 0));

            // horizontal edge eastward from (i, j)
            let (hi, hj, b) = if j + 1 == n_cols {
                (m_rows - 1 - i, 0, 1)
            } else {
                (i, j + 1, 0)
            };
            let mut hap = 0;
            if b == 1 && m_rows % 2 == 1 && i == (m_rows - 1) / 2 {
                hap = 1;
            }
            let e = edges.len();
            slots[idx(i, j)][3] = 2 * e; // east at source
            slots[idx(hi, hj)][1] = 2 * e + 1; // west at target
            edges.push(Edge::new(idx(i, j), idx(hi, hj), x, 0, hap, b));
        }
    }
    let rotation = slots
        .iter()
        .map(|s| vec![s[0], s[1], s[2], s[3]])
        .collect();
    let colors = if m_rows % 2 == 0 && n_cols % 2 == 1 {
        Some(
            (0..nv)
                .map(|k| (((k / n_cols) + (k % n_cols)) % 2) as u8)
                .collect(),
        )
    } else {
        None
    };
    EmbeddedGraph {
        name: format!("square_{}x{}", m_rows, n_cols),
        surface: Surface::Klein,
        vertex_count: nv,
        colors,
        edges,
        rotation: Some(rotation),
        orientation: None,
        curves: None,
    }
}

/// Look a bundled lattice up by name with default (unit) weights.
pub fn by_name(name: &str) -> Option<EmbeddedGraph> {
    match name {
        "square_2x1" => Some(square_2x1(1.0, 1.0, 1.0, 1.0)),
        "square_1x2" => Some(square_1x2(1.0, 1.0, 1.0, 1.0)),
        "hexagonal" => Some(hexagonal(1.0, 1.0, 1.0)),
        "triangular" => Some(triangular()),
        _ => None,
    }
}
