//! Weighted graphs embedded in the Klein bottle or torus, described by
//! fundamental-domain crossing data.
//!
//! A Klein-bottle graph lives in a rectangular fundamental domain whose
//! horizontal sides are glued periodically (curve `a`) and whose vertical
//! sides are glued with a flip (curve `b`). The horizontal midline is the
//! curve `a'`. Each edge records how often (and for `b`, in which direction)
//! it crosses these three curves. Torus graphs record signed intersection
//! numbers with the two torus sides instead.

use crate::{KleinError, Result};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Surface {
    Klein,
    Torus,
}

/// An edge with crossing data, stored with a reference direction `u -> v`.
///
/// Klein surface: `a`, `ap` in {0,1} are unsigned crossing counts of the
/// curves `a` and `a'`; `b` in {-1,0,1} is the signed crossing of the
/// vertical side (+1 for left-to-right along `u -> v`).
///
/// Torus surface: `a` is the signed crossing of the horizontal side (+1 for
/// bottom-to-top), `b` the signed crossing of the vertical side, `ap` unused.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    #[serde(rename = "w")]
    pub weight: f64,
    pub a: i8,
    pub ap: i8,
    pub b: i8,
}

impl Edge {
    pub fn new(u: usize, v: usize, weight: f64, a: i8, ap: i8, b: i8) -> Self {
        Edge {
            u,
            v,
            weight,
            a,
            ap,
            b,
        }
    }

    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }
}

/// Closed edge-paths used to verify the orientation normalisation.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Curves {
    #[serde(rename = "C")]
    pub c: Vec<usize>,
    #[serde(rename = "Cp")]
    pub cp: Vec<usize>,
}

/// A weighted graph embedded in the Klein bottle or the torus.
///
/// `rotation` lists, per vertex, the counterclockwise cyclic order of
/// incident edge-ends; end `2*e` is the `u`-end and `2*e+1` the `v`-end of
/// edge `e`. `orientation` holds one sign per edge (+1 if the reference
/// orientation agrees with the stored `u -> v` direction).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EmbeddedGraph {
    pub name: String,
    pub surface: Surface,
    #[serde(rename = "vertices")]
    pub vertex_count: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub colors: Option<Vec<u8>>,
    pub edges: Vec<Edge>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rotation: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub orientation: Option<Vec<i8>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub curves: Option<Curves>,
}

/// Outcome of `validate`: empty `violations` means the graph is admissible.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl EmbeddedGraph {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_bipartite(&self) -> bool {
        self.colors.is_some()
    }

    /// Adjacency as (edge index, other endpoint) lists; loops appear twice.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.u].push((i, e.v));
            if !e.is_loop() {
                adj[e.v].push((i, e.u));
            } else {
                adj[e.u].push((i, e.u));
            }
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.vertex_count];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &(_, w) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.vertex_count
    }

    /// Half-membership of each vertex relative to the midline `a'`,
    /// propagated from vertex 0 by the rule that crossing `a`, `a'` or the
    /// flipped side `b` toggles the half. Returns an error when the crossing
    /// data is inconsistent along some cycle.
    pub fn half_assignment(&self) -> Result<Vec<u8>> {
        if self.surface != Surface::Klein {
            return Err(KleinError::BadArgument(
                "half assignment is defined for Klein graphs".into(),
            ));
        }
        let adj = self.adjacency();
        let mut half = vec![u8::MAX; self.vertex_count];
        for root in 0..self.vertex_count {
            if half[root] != u8::MAX {
                continue;
            }
            half[root] = 0;
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for &(ei, w) in &adj[v] {
                    let e = &self.edges[ei];
                    let toggle = ((e.a + e.ap + e.b.abs()) & 1) as u8;
                    let expect = half[v] ^ toggle;
                    if half[w] == u8::MAX {
                        half[w] = expect;
                        queue.push_back(w);
                    } else if half[w] != expect {
                        return Err(KleinError::InvalidGraph(format!(
                            "crossing parity inconsistent along a cycle through edge {ei}"
                        )));
                    }
                }
            }
        }
        Ok(half)
    }
}

/// Check all structural invariants; report-style, never fails.
///
/// The homological constraint is that every cycle crosses `a + a' + b` an
/// even number of times in total; it is checked through the half-assignment
/// propagation rather than edge by edge (single edges routinely cross just
/// one of the three curves).
pub fn validate(g: &EmbeddedGraph) -> ValidationReport {
    let mut violations = Vec::new();
    if g.vertex_count % 2 != 0 {
        violations.push(format!("odd vertex count {}", g.vertex_count));
    }
    for (i, e) in g.edges.iter().enumerate() {
        if e.u >= g.vertex_count || e.v >= g.vertex_count {
            violations.push(format!("edge {i} endpoint out of range"));
        }
        if e.weight < 0.0 || !e.weight.is_finite() {
            violations.push(format!("edge {i} has invalid weight {}", e.weight));
        }
        match g.surface {
            Surface::Klein => {
                if !(0..=1).contains(&e.a) || !(0..=1).contains(&e.ap) || !(-1..=1).contains(&e.b)
                {
                    violations.push(format!("edge {i} has out-of-range Klein crossing data"));
                }
            }
            Surface::Torus => {
                if !(-1..=1).contains(&e.a) || !(-1..=1).contains(&e.b) || e.ap != 0 {
                    violations.push(format!("edge {i} has out-of-range torus crossing data"));
                }
            }
        }
    }
    if let Some(colors) = &g.colors {
        if colors.len() != g.vertex_count {
            violations.push("colors length differs from vertex count".into());
        } else {
            for (i, e) in g.edges.iter().enumerate() {
                if e.u < colors.len() && e.v < colors.len() && colors[e.u] == colors[e.v] {
                    violations.push(format!("edge {i} joins two vertices of the same color"));
                }
            }
        }
    }
    if let Some(rot) = &g.rotation {
        if rot.len() != g.vertex_count {
            violations.push("rotation length differs from vertex count".into());
        } else {
            let mut seen = vec![false; 2 * g.edges.len()];
            let mut owner = vec![usize::MAX; 2 * g.edges.len()];
            for (i, e) in g.edges.iter().enumerate() {
                owner[2 * i] = e.u;
                owner[2 * i + 1] = e.v;
            }
            for (v, ends) in rot.iter().enumerate() {
                for &end in ends {
                    if end >= 2 * g.edges.len() {
                        violations.push(format!("rotation at vertex {v} has bad end id {end}"));
                    } else {
                        if owner[end] != v {
                            violations
                                .push(format!("rotation at vertex {v} lists foreign end {end}"));
                        }
                        if seen[end] {
                            violations.push(format!("edge-end {end} listed twice in rotation"));
                        }
                        seen[end] = true;
                    }
                }
            }
            for (end, s) in seen.iter().enumerate() {
                if !s {
                    violations.push(format!("edge-end {end} missing from rotation"));
                }
            }
        }
    }
    if let Some(orient) = &g.orientation {
        if orient.len() != g.edges.len() {
            violations.push("orientation length differs from edge count".into());
        } else if orient.iter().any(|&s| s != 1 && s != -1) {
            violations.push("orientation entries must be +1 or -1".into());
        }
    }
    if !g.is_connected() {
        violations.push("graph is disconnected".into());
    }
    if g.surface == Surface::Klein {
        if let Err(e) = g.half_assignment() {
            violations.push(e.to_string());
        }
    }
    ValidationReport { violations }
}

/// Orientation double cover: a Klein graph's two-sheeted torus cover.
///
/// Sheet 0 reproduces the fundamental domain, sheet 1 its vertical mirror.
/// Vertex `(v, s)` gets index `v + s*|V|`. Crossings of the flipped side `b`
/// switch sheets; crossings of `a` become signed torus crossings whose sign
/// depends on the half of the domain the crossing starts from; crossings of
/// the midline `a'` leave no torus crossing data. When the input carries an
/// orientation, it is lifted and edges with both endpoints in the upper half
/// of the doubled domain have their direction inverted, which makes the
/// lifted orientation a Kasteleyn orientation whenever the input satisfies
/// the Kasteleyn normalisation.
pub fn orientation_cover(g: &EmbeddedGraph) -> Result<EmbeddedGraph> {
    if g.surface != Surface::Klein {
        return Err(KleinError::BadArgument(
            "orientation_cover expects a Klein graph".into(),
        ));
    }
    let half = g.half_assignment()?;
    let nv = g.vertex_count;
    let mut edges = Vec::with_capacity(2 * g.edges.len());
    let mut orientation = g.orientation.as_ref().map(|_| Vec::new());
    // rotation lifts: sheet 0 keeps the cyclic order, sheet 1 reverses it.
    let mut rotation = g.rotation.as_ref().map(|_| vec![Vec::new(); 2 * nv]);
    let mut end_map = vec![[0usize; 2]; 2 * g.edges.len()];

    for s in 0..2usize {
        for (ei, e) in g.edges.iter().enumerate() {
            let lifted = lift_edge(e, &half, s, nv);
            let idx = edges.len();
            end_map[2 * ei][s] = 2 * idx;
            end_map[2 * ei + 1][s] = 2 * idx + 1;
            if let Some(orients) = orientation.as_mut() {
                let mut sign = g.orientation.as_ref().unwrap()[ei];
                // upper half of the doubled domain: sheet-0 copies of upper
                // vertices and sheet-1 copies of lower ones.
                let hu = half[e.u] ^ (s as u8);
                let hv = half[e.v] ^ ((s ^ (e.b.unsigned_abs() as usize)) as u8);
                if hu == 1 && hv == 1 {
                    sign = -sign;
                }
                orients.push(sign);
            }
            edges.push(lifted);
        }
    }
    if let (Some(rot_out), Some(rot_in)) = (rotation.as_mut(), g.rotation.as_ref()) {
        for v in 0..nv {
            for s in 0..2usize {
                let mut ends: Vec<usize> = rot_in[v]
                    .iter()
                    .map(|&end| {
                        let e = end / 2;
                        let which = end % 2;
                        // the u-end of the lift starting on sheet s lives on
                        // sheet s; a v-end on sheet s belongs to the lift
                        // that started on sheet s ^ |b|.
                        let eb = g.edges[e].b.unsigned_abs() as usize;
                        end_map[end][if which == 0 { s } else { s ^ eb }]
                    })
                    .collect();
                if s == 1 {
                    ends.reverse();
                }
                rot_out[v + s * nv] = ends;
            }
        }
    }
    let colors = g
        .colors
        .as_ref()
        .map(|c| c.iter().chain(c.iter()).copied().collect());
    Ok(EmbeddedGraph {
        name: format!("{}~cover", g.name),
        surface: Surface::Torus,
        vertex_count: 2 * nv,
        colors,
        edges,
        rotation,
        orientation,
        curves: None,
    })
}

/// Lift one Klein edge to the orientation cover starting on sheet `s`.
fn lift_edge(e: &Edge, half: &[u8], s: usize, nv: usize) -> Edge {
    let mut sheet = s;
    let mut tb: i8 = 0;
    // the flipped side is crossed first; sheet 1 is the mirrored copy, so
    // only one of the two lifts picks up the torus side crossing.
    if e.b != 0 {
        if e.b > 0 {
            if sheet == 1 {
                tb = 1;
            }
        } else if sheet == 0 {
            tb = -1;
        }
        sheet ^= 1;
    }
    // the a-crossing direction mirrors between the sheets
    let ga = a_crossing_dir(e, half);
    let ta = if s == 0 { ga } else { -ga };
    Edge {
        u: e.u + s * nv,
        v: e.v + sheet * nv,
        weight: e.weight,
        a: ta,
        ap: 0,
        b: tb,
    }
}

/// Klein m-by-n cover: `m` rows and `n` (odd) columns of copies of the
/// fundamental domain, with the right column wrapping to the left one
/// through the orientation-reversing identification (row `i` to `m-1-i`).
///
/// Odd columns hold vertically mirrored copies. Crossing data of the cover:
/// `b` is nonzero only on column-wrap edges, `a` only on the row-wrap
/// interface, and `a'` on the horizontal midline of the large domain (the
/// row seam `m/2-1 | m/2` for even `m`; the base `a'` crossings of the middle
/// row for odd `m`).
pub fn build_cover(g: &EmbeddedGraph, m: usize, n: usize) -> Result<EmbeddedGraph> {
    if g.surface != Surface::Klein {
        return Err(KleinError::BadArgument(
            "build_cover expects a Klein graph".into(),
        ));
    }
    if m == 0 || n == 0 {
        return Err(KleinError::BadArgument("cover size must be positive".into()));
    }
    if n % 2 == 0 {
        return Err(KleinError::BadArgument(
            "n must be odd for Klein covers; use build_torus_cover on the orientation cover".into(),
        ));
    }
    let nv = g.vertex_count;
    let half = g.half_assignment()?;
    let cell = |i: usize, j: usize, v: usize| (i * n + j) * nv + v;
    let mut edges = Vec::with_capacity(m * n * g.edges.len());
    let mut orientation = g.orientation.as_ref().map(|_| Vec::new());
    // copy_idx[cell][ei] = index of that copy in `edges`
    let mut copy_idx = vec![vec![0usize; g.edges.len()]; m * n];
    // source[cell][ei] = cell whose copy of edge ei lands in `cell`
    let mut source = vec![vec![usize::MAX; g.edges.len()]; m * n];

    for i in 0..m {
        for j in 0..n {
            for (ei, e) in g.edges.iter().enumerate() {
                copy_idx[i * n + j][ei] = edges.len();
                let ga = a_crossing_dir(e, &half);
                let (ti, tj, a, ap, b) = cover_move(e, ga, i, j, m, n);
                source[ti * n + tj][ei] = i * n + j;
                edges.push(Edge {
                    u: cell(i, j, e.u),
                    v: cell(ti, tj, e.v),
                    weight: e.weight,
                    a,
                    ap,
                    b,
                });
                if let Some(orients) = orientation.as_mut() {
                    orients.push(g.orientation.as_ref().unwrap()[ei]);
                }
            }
        }
    }
    let rotation = g.rotation.as_ref().map(|rot_in| {
        let mut rot_out = vec![Vec::new(); m * n * nv];
        for i in 0..m {
            for j in 0..n {
                let mirrored = j % 2 == 1;
                for v in 0..nv {
                    let mut ends: Vec<usize> = rot_in[v]
                        .iter()
                        .map(|&end| {
                            let ei = end / 2;
                            if end % 2 == 0 {
                                // u-end: the copy originating in this cell
                                2 * copy_idx[i * n + j][ei]
                            } else {
                                // v-end: the copy landing in this cell
                                2 * copy_idx[source[i * n + j][ei]][ei] + 1
                            }
                        })
                        .collect();
                    if mirrored {
                        ends.reverse();
                    }
                    rot_out[cell(i, j, v)] = ends;
                }
            }
        }
        rot_out
    });
    let colors = g.colors.as_ref().map(|c| {
        let mut out = Vec::with_capacity(m * n * nv);
        for _ in 0..(m * n) {
            out.extend(c.iter().copied());
        }
        out
    });
    Ok(EmbeddedGraph {
        name: format!("{}_{}x{}", g.name, m, n),
        surface: Surface::Klein,
        vertex_count: m * n * nv,
        colors,
        edges,
        rotation,
        orientation,
        curves: None,
    })
}

/// The direction in which an edge crosses the curve `a` (+1 upward, -1
/// downward, 0 when it does not cross). An edge crossing only `a` leaves
/// through the side its tail half dictates (top boundary from the upper
/// half). An edge crossing both `a` and the midline `a'` winds upward by
/// convention, whatever its tail half.
pub fn a_crossing_dir(e: &Edge, half: &[u8]) -> i8 {
    if e.a != 1 {
        return 0;
    }
    if e.ap == 1 || half[e.u] == 1 {
        1
    } else {
        -1
    }
}

/// Sequential lift of one base edge copied into cell (i, j) of the m-by-n
/// grid: the side crossing moves first (columns, with the row reflection on
/// the outer wrap), then the vertical crossing moves by one row in the
/// direction of the a-crossing (inverted in mirrored cells). Returns the
/// target cell and the cover crossing data.
fn cover_move(
    e: &Edge,
    ga: i8,
    i: usize,
    j: usize,
    m: usize,
    n: usize,
) -> (usize, usize, i8, i8, i8) {
    let mut ci = i;
    let mut cj = j;
    let mut a = 0i8;
    let mut ap = 0i8;
    let mut b = 0i8;
    if e.b > 0 {
        if cj + 1 == n {
            b = 1;
            ci = m - 1 - ci;
            cj = 0;
        } else {
            cj += 1;
        }
    } else if e.b < 0 {
        if cj == 0 {
            b = -1;
            ci = m - 1 - ci;
            cj = n - 1;
        } else {
            cj -= 1;
        }
    }
    // midline crossings of the base edge happen in the (post-wrap) source
    // cell; they hit the cover midline only in the middle row of odd m.
    if e.ap == 1 && m % 2 == 1 && ci == (m - 1) / 2 {
        ap = 1;
    }
    if e.a == 1 {
        let mirrored = cj % 2 == 1;
        let up = (ga > 0) != mirrored;
        if up {
            // crossing the horizontal line y = ci + 1
            if m % 2 == 0 && ci + 1 == m / 2 {
                ap ^= 1;
            }
            if ci + 1 == m {
                a = 1;
                ci = 0;
            } else {
                ci += 1;
            }
        } else {
            // crossing the horizontal line y = ci
            if m % 2 == 0 && ci == m / 2 {
                ap ^= 1;
            }
            if ci == 0 {
                a = 1;
                ci = m - 1;
            } else {
                ci -= 1;
            }
        }
    }
    (ci, cj, a, ap, b)
}

/// Torus m-by-n translation cover.
pub fn build_torus_cover(g: &EmbeddedGraph, m: usize, n: usize) -> Result<EmbeddedGraph> {
    if g.surface != Surface::Torus {
        return Err(KleinError::BadArgument(
            "build_torus_cover expects a torus graph".into(),
        ));
    }
    if m == 0 || n == 0 {
        return Err(KleinError::BadArgument("cover size must be positive".into()));
    }
    let nv = g.vertex_count;
    let cell = |i: usize, j: usize, v: usize| (i * n + j) * nv + v;
    let mut edges = Vec::with_capacity(m * n * g.edges.len());
    let mut orientation = g.orientation.as_ref().map(|_| Vec::new());
    for i in 0..m {
        for j in 0..n {
            for (ei, e) in g.edges.iter().enumerate() {
                let ti = (i as i64 + e.a as i64).rem_euclid(m as i64) as usize;
                let tj = (j as i64 + e.b as i64).rem_euclid(n as i64) as usize;
                let a = if e.a > 0 && i + 1 == m {
                    1
                } else if e.a < 0 && i == 0 {
                    -1
                } else {
                    0
                };
                let b = if e.b > 0 && j + 1 == n {
                    1
                } else if e.b < 0 && j == 0 {
                    -1
                } else {
                    0
                };
                edges.push(Edge {
                    u: cell(i, j, e.u),
                    v: cell(ti, tj, e.v),
                    weight: e.weight,
                    a,
                    ap: 0,
                    b,
                });
                if let Some(orients) = orientation.as_mut() {
                    orients.push(g.orientation.as_ref().unwrap()[ei]);
                }
            }
        }
    }
    let colors = g.colors.as_ref().map(|c| {
        let mut out = Vec::with_capacity(m * n * nv);
        for _ in 0..(m * n) {
            out.extend(c.iter().copied());
        }
        out
    });
    Ok(EmbeddedGraph {
        name: format!("{}_t{}x{}", g.name, m, n),
        surface: Surface::Torus,
        vertex_count: m * n * nv,
        colors,
        edges,
        rotation: None,
        orientation,
        curves: None,
    })
}

pub mod fisher;
pub mod lattices;
