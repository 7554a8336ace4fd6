//! Kasteleyn orientations and twisted Kasteleyn matrices.
//!
//! A Klein-bottle graph orientation is admissible when its lift to the
//! orientation double cover (after inverting the edges lying entirely in the
//! upper half of the doubled domain) is a Kasteleyn orientation of the torus
//! graph: every face has an odd number of clockwise boundary edges. A second
//! normalisation condition fixes the orientation class along two curves; it
//! is either checked directly on user-supplied curves or resolved downstream
//! by branch calibration against the Pfaffian formula.

use crate::graph::{orientation_cover, EmbeddedGraph, Surface};
use crate::linalg::CMatrix;
use crate::{KleinError, Result};
use num_complex::Complex64;

/// Edge-direction signs: +1 when the reference orientation agrees with the
/// stored `u -> v` direction of the edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orientation(pub Vec<i8>);

impl Orientation {
    pub fn from_graph(g: &EmbeddedGraph) -> Option<Self> {
        g.orientation.as_ref().map(|o| Orientation(o.clone()))
    }
}

/// Darts are directed edge sides: `2e` traverses edge `e` as `u -> v`,
/// `2e+1` as `v -> u`.
pub type Dart = usize;

#[inline]
fn dart_head(g: &EmbeddedGraph, d: Dart) -> usize {
    let e = &g.edges[d / 2];
    if d % 2 == 0 {
        e.v
    } else {
        e.u
    }
}

/// The edge-end through which a dart arrives at its head.
#[inline]
fn dart_arrival_end(d: Dart) -> usize {
    let e = d / 2;
    if d % 2 == 0 {
        2 * e + 1
    } else {
        2 * e
    }
}

/// The dart leaving a vertex through a given edge-end.
#[inline]
fn dart_leaving(end: usize) -> Dart {
    let e = end / 2;
    if end % 2 == 0 {
        2 * e
    } else {
        2 * e + 1
    }
}

/// Trace the faces of the embedding encoded by the rotation system. Faces
/// are returned as dart cycles; with counterclockwise rotations each face is
/// traversed with its interior on the left.
pub fn faces(g: &EmbeddedGraph) -> Result<Vec<Vec<Dart>>> {
    let rotation = g
        .rotation
        .as_ref()
        .ok_or_else(|| KleinError::MissingRotation(format!("graph {}", g.name)))?;
    let nd = 2 * g.edges.len();
    // position of each end in its vertex rotation
    let mut pos = vec![(usize::MAX, usize::MAX); nd];
    for (v, ends) in rotation.iter().enumerate() {
        for (k, &end) in ends.iter().enumerate() {
            pos[end] = (v, k);
        }
    }
    let mut seen = vec![false; nd];
    let mut out = Vec::new();
    for start in 0..nd {
        if seen[start] {
            continue;
        }
        let mut face = Vec::new();
        let mut d = start;
        loop {
            seen[d] = true;
            face.push(d);
            let w = dart_head(g, d);
            let arr = dart_arrival_end(d);
            let (pv, pk) = pos[arr];
            if pv != w {
                return Err(KleinError::InvalidGraph(format!(
                    "rotation system inconsistent at vertex {w}"
                )));
            }
            let ends = &rotation[w];
            let next_end = ends[(pk + 1) % ends.len()];
            d = dart_leaving(next_end);
            if d == start {
                break;
            }
            if seen[d] {
                return Err(KleinError::InvalidGraph(
                    "rotation system does not close faces".into(),
                ));
            }
        }
        out.push(face);
    }
    Ok(out)
}

/// Euler characteristic of the embedding encoded by the rotation system.
pub fn euler_characteristic(g: &EmbeddedGraph) -> Result<i64> {
    let f = faces(g)?.len() as i64;
    Ok(g.vertex_count as i64 - g.edges.len() as i64 + f)
}

/// Number of boundary darts of `face` whose direction disagrees with the
/// orientation; with counterclockwise face traversal these are the clockwise
/// edges.
fn face_clockwise_count(face: &[Dart], orient: &Orientation) -> usize {
    face.iter()
        .filter(|&&d| {
            let sign = orient.0[d / 2];
            let along = if d % 2 == 0 { 1 } else { -1 };
            sign != along
        })
        .count()
}

/// True iff every face of the torus graph has an odd number of clockwise
/// boundary edges.
pub fn check_kasteleyn(gt: &EmbeddedGraph, orient: &Orientation) -> Result<bool> {
    if gt.surface != Surface::Torus {
        return Err(KleinError::BadArgument(
            "check_kasteleyn expects a torus graph".into(),
        ));
    }
    let fs = faces(gt)?;
    Ok(fs
        .iter()
        .all(|f| face_clockwise_count(f, orient) % 2 == 1))
}

/// Find a Kasteleyn orientation of a torus graph by spanning-tree-of-the-dual
/// propagation: start from an arbitrary orientation, then walk a spanning
/// tree of the dual graph from the leaves inward, flipping the tree edge of
/// each face whose parity is wrong.
pub fn find_orientation(gt: &EmbeddedGraph) -> Result<Orientation> {
    if gt.surface != Surface::Torus {
        return Err(KleinError::BadArgument(
            "find_orientation expects a torus graph".into(),
        ));
    }
    if !gt.is_connected() {
        return Err(KleinError::InvalidGraph("graph is disconnected".into()));
    }
    let fs = faces(gt)?;
    let nf = fs.len();
    let mut orient = Orientation(vec![1; gt.edges.len()]);
    // face of each dart
    let mut dart_face = vec![usize::MAX; 2 * gt.edges.len()];
    for (fi, f) in fs.iter().enumerate() {
        for &d in f {
            dart_face[d] = fi;
        }
    }
    // dual adjacency via shared edges (self-loops dropped)
    let mut dual = vec![Vec::new(); nf];
    for e in 0..gt.edges.len() {
        let f1 = dart_face[2 * e];
        let f2 = dart_face[2 * e + 1];
        if f1 != f2 {
            dual[f1].push((f2, e));
            dual[f2].push((f1, e));
        }
    }
    // BFS spanning tree of the dual
    let mut parent_edge = vec![usize::MAX; nf];
    let mut order = Vec::with_capacity(nf);
    let mut visited = vec![false; nf];
    let mut queue = std::collections::VecDeque::from([0usize]);
    visited[0] = true;
    while let Some(f) = queue.pop_front() {
        order.push(f);
        for &(f2, e) in &dual[f] {
            if !visited[f2] {
                visited[f2] = true;
                parent_edge[f2] = e;
                queue.push_back(f2);
            }
        }
    }
    if order.len() != nf {
        return Err(KleinError::InvalidGraph(
            "dual graph is disconnected; embedding is not cellular".into(),
        ));
    }
    for &f in order.iter().rev() {
        if parent_edge[f] == usize::MAX {
            continue;
        }
        if face_clockwise_count(&fs[f], &orient) % 2 == 0 {
            orient.0[parent_edge[f]] = -orient.0[parent_edge[f]];
        }
    }
    if !check_kasteleyn(gt, &orient)? {
        return Err(KleinError::InvalidGraph(
            "no Kasteleyn orientation found; check vertex parity and embedding".into(),
        ));
    }
    Ok(orient)
}

/// Find a Klein orientation satisfying the Kasteleyn condition on the
/// orientation double cover. Flip variables are per base edge (both lifts
/// flip together), so the parity constraints of the cover faces form a
/// linear system over GF(2).
pub fn find_klein_orientation(g: &EmbeddedGraph) -> Result<Orientation> {
    if g.surface != Surface::Klein {
        return Err(KleinError::BadArgument(
            "find_klein_orientation expects a Klein graph".into(),
        ));
    }
    let ne = g.edges.len();
    let mut work = g.clone();
    if work.orientation.is_none() {
        work.orientation = Some(vec![1; ne]);
    }
    let cover = orientation_cover(&work)?;
    let cover_orient = Orientation::from_graph(&cover).expect("cover keeps orientation");
    let fs = faces(&cover)?;
    // row per face: flip-variable incidence plus current parity
    let words = ne.div_ceil(64);
    let mut rows: Vec<(Vec<u64>, u8)> = Vec::with_capacity(fs.len());
    for f in &fs {
        let mut row = vec![0u64; words];
        for &d in f {
            let base = (d / 2) % ne;
            row[base / 64] ^= 1u64 << (base % 64);
        }
        let rhs = (face_clockwise_count(f, &cover_orient) % 2 == 0) as u8;
        rows.push((row, rhs));
    }
    // Gaussian elimination
    let mut pivot_of_col = vec![usize::MAX; ne];
    let mut used = vec![false; rows.len()];
    for col in 0..ne {
        let mut piv = usize::MAX;
        for (ri, (row, _)) in rows.iter().enumerate() {
            if !used[ri] && (row[col / 64] >> (col % 64)) & 1 == 1 {
                piv = ri;
                break;
            }
        }
        if piv == usize::MAX {
            continue;
        }
        used[piv] = true;
        pivot_of_col[col] = piv;
        let (prow, prhs) = rows[piv].clone();
        for (ri, (row, rhs)) in rows.iter_mut().enumerate() {
            if ri != piv && (row[col / 64] >> (col % 64)) & 1 == 1 {
                for w in 0..words {
                    row[w] ^= prow[w];
                }
                *rhs ^= prhs;
            }
        }
    }
    // inconsistency check: zero rows with rhs 1
    for (ri, (row, rhs)) in rows.iter().enumerate() {
        if !used[ri] && *rhs == 1 && row.iter().all(|&w| w == 0) {
            return Err(KleinError::InvalidGraph(
                "no admissible orientation exists (odd vertex count?)".into(),
            ));
        }
    }
    let mut flips = vec![false; ne];
    for col in 0..ne {
        let piv = pivot_of_col[col];
        if piv != usize::MAX {
            flips[col] = rows[piv].1 == 1;
        }
    }
    let base = work.orientation.unwrap();
    let orient = Orientation(
        base.iter()
            .zip(flips.iter())
            .map(|(&s, &f)| if f { -s } else { s })
            .collect(),
    );
    // sanity: the flipped orientation must pass the cover check
    let mut flipped = g.clone();
    flipped.orientation = Some(orient.0.clone());
    let cover2 = orientation_cover(&flipped)?;
    if !check_kasteleyn(&cover2, &Orientation::from_graph(&cover2).unwrap())? {
        return Err(KleinError::InvalidGraph(
            "orientation solve failed the cover Kasteleyn check".into(),
        ));
    }
    Ok(orient)
}

/// Parity `n^K(C) + n^K(C')` mod 2 of the disagreement counts along the two
/// normalisation curves; the orientation condition holds iff this is 0.
pub fn check_curve_condition(
    g: &EmbeddedGraph,
    orient: &Orientation,
    c: &[usize],
    cp: &[usize],
) -> Result<u8> {
    let n1 = walk_disagreements(g, orient, c)?;
    let n2 = walk_disagreements(g, orient, cp)?;
    Ok(((n1 + n2) % 2) as u8)
}

/// Count edges of a closed walk where the orientation disagrees with the
/// walk direction; the walk direction is inferred from endpoint continuity.
fn walk_disagreements(g: &EmbeddedGraph, orient: &Orientation, walk: &[usize]) -> Result<usize> {
    if walk.is_empty() {
        return Ok(0);
    }
    for &e in walk {
        if e >= g.edges.len() {
            return Err(KleinError::BadArgument(format!("curve edge {e} out of range")));
        }
    }
    // choose directions by backtracking: dirs[i] = true means traversed u->v
    fn rec(
        g: &EmbeddedGraph,
        walk: &[usize],
        i: usize,
        start: usize,
        cur: usize,
        dirs: &mut Vec<bool>,
    ) -> bool {
        if i == walk.len() {
            return cur == start;
        }
        let e = &g.edges[walk[i]];
        for (dir, tail, head) in [(true, e.u, e.v), (false, e.v, e.u)] {
            if tail == cur {
                dirs.push(dir);
                if rec(g, walk, i + 1, start, head, dirs) {
                    return true;
                }
                dirs.pop();
            }
        }
        false
    }
    let e0 = &g.edges[walk[0]];
    for (dir0, tail, head) in [(true, e0.u, e0.v), (false, e0.v, e0.u)] {
        let mut dirs = vec![dir0];
        if rec(g, walk, 1, tail, head, &mut dirs) {
            let count = walk
                .iter()
                .zip(dirs.iter())
                .filter(|(&e, &d)| {
                    let s = orient.0[e];
                    (s == 1) != d
                })
                .count();
            return Ok(count);
        }
    }
    Err(KleinError::BadArgument(
        "curve is not a closed edge-walk".into(),
    ))
}

/// Twisted Kasteleyn matrix of a Klein graph at `(z, w)`, `w = ±1`:
/// entry `(u,v)` sums `sign * i^(a+a') * weight * z^b * w^a` over edges
/// from `u` to `v`; loops contribute once per traversal direction.
pub fn klein_matrix(
    g: &EmbeddedGraph,
    orient: &Orientation,
    z: Complex64,
    w: f64,
) -> Result<CMatrix> {
    if g.surface != Surface::Klein {
        return Err(KleinError::BadArgument("klein_matrix expects a Klein graph".into()));
    }
    if w != 1.0 && w != -1.0 {
        return Err(KleinError::BadArgument(format!("w must be ±1, got {w}")));
    }
    let mut m = CMatrix::zeros(g.vertex_count);
    let i_unit = Complex64::new(0.0, 1.0);
    let zinv = 1.0 / z;
    for (ei, e) in g.edges.iter().enumerate() {
        let sign = orient.0[ei] as f64;
        let iw = i_unit.powu((e.a + e.ap) as u32) * e.weight * w.powi(e.a as i32);
        let zf = match e.b {
            1 => z,
            -1 => zinv,
            _ => Complex64::new(1.0, 0.0),
        };
        m.add(e.u, e.v, iw * zf * sign);
        m.add(e.v, e.u, -iw / zf * sign);
    }
    Ok(m)
}

/// Kasteleyn matrix of a torus graph at `(z, w)`:
/// entry `(u,v)` sums `sign * weight * z^tb * w^ta`.
pub fn torus_matrix(
    gt: &EmbeddedGraph,
    orient: &Orientation,
    z: Complex64,
    w: Complex64,
) -> Result<CMatrix> {
    if gt.surface != Surface::Torus {
        return Err(KleinError::BadArgument("torus_matrix expects a torus graph".into()));
    }
    let mut m = CMatrix::zeros(gt.vertex_count);
    for (ei, e) in gt.edges.iter().enumerate() {
        let sign = orient.0[ei] as f64;
        let fz = z.powi(e.b as i32);
        let fw = w.powi(e.a as i32);
        m.add(e.u, e.v, fz * fw * e.weight * sign);
        m.add(e.v, e.u, -e.weight * sign / (fz * fw));
    }
    Ok(m)
}

/// The white-by-black sub-block of a bipartite matrix under the convention
/// that rows are color-0 vertices in index order and columns color-1.
pub fn bipartite_block(g: &EmbeddedGraph, full: &CMatrix) -> Result<CMatrix> {
    let colors = g
        .colors
        .as_ref()
        .ok_or_else(|| KleinError::BadArgument("graph is not bipartite".into()))?;
    let rows: Vec<usize> = (0..g.vertex_count).filter(|&v| colors[v] == 0).collect();
    let cols: Vec<usize> = (0..g.vertex_count).filter(|&v| colors[v] == 1).collect();
    if rows.len() != cols.len() {
        return Err(KleinError::BadArgument(
            "color classes have different sizes".into(),
        ));
    }
    let k = rows.len();
    let mut b = CMatrix::zeros(k);
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            b.add(i, j, full.get(r, c));
        }
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_cover, lattices, orientation_cover, validate};

    fn lifted(g: &EmbeddedGraph) -> (EmbeddedGraph, Orientation) {
        let cover = orientation_cover(g).unwrap();
        let o = Orientation::from_graph(&cover).unwrap();
        (cover, o)
    }

    #[test]
    fn euler_characteristic_of_covers() {
        for g in [
            lattices::square_2x1(1.0, 1.0, 1.0, 1.0),
            lattices::square_1x2(1.0, 1.0, 1.0, 1.0),
            lattices::hexagonal(1.0, 1.0, 1.0),
            lattices::triangular(),
        ] {
            let (cover, _) = lifted(&g);
            assert_eq!(
                euler_characteristic(&cover).unwrap(),
                0,
                "double cover of {} should be a torus",
                g.name
            );
        }
    }

    #[test]
    fn triangular_cover_faces_are_triangles() {
        let g = lattices::triangular();
        let (cover, _) = lifted(&g);
        let fs = faces(&cover).unwrap();
        assert_eq!(fs.len(), 8);
        assert!(fs.iter().all(|f| f.len() == 3), "{:?}", fs.iter().map(|f| f.len()).collect::<Vec<_>>());
    }

    #[test]
    fn hexagonal_cover_faces_are_hexagons() {
        let g = lattices::hexagonal(1.0, 1.0, 1.0);
        let (cover, _) = lifted(&g);
        let fs = faces(&cover).unwrap();
        assert_eq!(fs.len(), 2);
        assert!(fs.iter().all(|f| f.len() == 6));
    }

    #[test]
    fn bundled_orientations_are_kasteleyn() {
        for g in [
            lattices::square_2x1(1.0, 2.0, 3.0, 4.0),
            lattices::square_1x2(1.0, 2.0, 3.0, 4.0),
            lattices::hexagonal(1.0, 2.0, 3.0),
            lattices::triangular(),
        ] {
            let (cover, o) = lifted(&g);
            assert!(
                check_kasteleyn(&cover, &o).unwrap(),
                "lifted orientation of {} fails the Kasteleyn condition",
                g.name
            );
        }
    }

    #[test]
    fn flipping_one_edge_breaks_kasteleyn() {
        let g = lattices::square_2x1(1.0, 1.0, 1.0, 1.0);
        let (cover, mut o) = lifted(&g);
        o.0[0] = -o.0[0];
        assert!(!check_kasteleyn(&cover, &o).unwrap());
    }

    #[test]
    fn find_orientation_on_covers() {
        for g in [
            lattices::square_2x1(1.0, 1.0, 1.0, 1.0),
            lattices::hexagonal(1.0, 1.0, 1.0),
            lattices::triangular(),
        ] {
            let (cover, _) = lifted(&g);
            let o = find_orientation(&cover).unwrap();
            assert!(check_kasteleyn(&cover, &o).unwrap());
        }
    }

    #[test]
    fn find_klein_orientation_on_bundled_and_covers() {
        for g in [
            lattices::square_2x1(1.0, 1.0, 1.0, 1.0),
            lattices::square_1x2(1.0, 1.0, 1.0, 1.0),
            lattices::hexagonal(1.0, 1.0, 1.0),
            lattices::triangular(),
        ] {
            let mut bare = g.clone();
            bare.orientation = None;
            let o = find_klein_orientation(&bare).unwrap();
            bare.orientation = Some(o.0.clone());
            let cover = orientation_cover(&bare).unwrap();
            assert!(check_kasteleyn(&cover, &Orientation::from_graph(&cover).unwrap()).unwrap());

            let big = build_cover(&g, 2, 3).unwrap();
            assert!(validate(&big).is_valid());
            let mut bare = big.clone();
            bare.orientation = None;
            let o = find_klein_orientation(&bare).unwrap();
            bare.orientation = Some(o.0.clone());
            let cover = orientation_cover(&bare).unwrap();
            assert!(check_kasteleyn(&cover, &Orientation::from_graph(&cover).unwrap()).unwrap());
        }
    }

    #[test]
    fn curve_condition_square() {
        let g = lattices::square_2x1(1.0, 1.0, 1.0, 1.0);
        let o = Orientation::from_graph(&g).unwrap();
        let curves = g.curves.clone().unwrap();
        assert_eq!(check_curve_condition(&g, &o, &curves.c, &curves.cp).unwrap(), 0);
        // x1 lies on neither curve: flipping it leaves the parity alone
        let mut o2 = o.clone();
        o2.0[2] = -1;
        assert_eq!(check_curve_condition(&g, &o2, &curves.c, &curves.cp).unwrap(), 0);
        // flipping y1 toggles the count along C alone
        let base = check_curve_condition(&g, &o, &curves.c, &[]).unwrap();
        let mut o3 = o.clone();
        o3.0[0] = -1;
        let flipped = check_curve_condition(&g, &o3, &curves.c, &[]).unwrap();
        assert_ne!(base, flipped);
    }

    #[test]
    fn klein_matrix_square_entries() {
        // A(z,w) off-diagonal entry is i*y1 + i*y2*w + x1*z + x2/z
        let (x1, x2, y1, y2) = (1.5, 0.7, 2.0, 0.3);
        let g = lattices::square_2x1(x1, x2, y1, y2);
        let o = Orientation::from_graph(&g).unwrap();
        let z = Complex64::from_polar(1.0, 0.83);
        for w in [1.0, -1.0] {
            let m = klein_matrix(&g, &o, z, w).unwrap();
            let expect = Complex64::new(0.0, y1) + Complex64::new(0.0, y2) * w + x1 * z + x2 / z;
            assert!((m.get(0, 1) - expect).norm() < 1e-12);
            assert!((m.get(0, 0)).norm() < 1e-12);
        }
    }

    #[test]
    fn klein_matrix_1x2_loops_cancel() {
        let (x1, x2, y1, y2) = (1.1, 0.9, 2.0, 3.0);
        let g = lattices::square_1x2(x1, x2, y1, y2);
        let o = Orientation::from_graph(&g).unwrap();
        let z = Complex64::from_polar(1.0, 0.3);
        let m = klein_matrix(&g, &o, z, 1.0).unwrap();
        assert!(m.get(0, 0).norm() < 1e-12, "loops must cancel at w=±1");
        let expect = Complex64::new(0.0, x1) + x2 / z;
        assert!((m.get(0, 1) - expect).norm() < 1e-12);
    }

    #[test]
    fn triangular_matrix_matches_reference() {
        let g = lattices::triangular();
        let o = Orientation::from_graph(&g).unwrap();
        let z = Complex64::from_polar(1.0, 1.234);
        let w = 1.0;
        let m = klein_matrix(&g, &o, z, w).unwrap();
        let i = Complex64::new(0.0, 1.0);
        assert!((m.get(0, 0) - (i / z - i * z)).norm() < 1e-12);
        assert!((m.get(1, 1) - (i * w * z - i * w / z)).norm() < 1e-12);
        let a12 = -i - i * w - z - 1.0 / z;
        let a21 = i + i * w + z + 1.0 / z;
        assert!((m.get(0, 1) - a12).norm() < 1e-12);
        assert!((m.get(1, 0) - a21).norm() < 1e-12);
    }

    #[test]
    fn torus_det_real_on_unit_torus() {
        let g = lattices::triangular();
        let (cover, o) = lifted(&g);
        let z = Complex64::from_polar(1.0, 0.71);
        let w = Complex64::from_polar(1.0, -1.2);
        let m = torus_matrix(&cover, &o, z, w).unwrap();
        let d = m.det();
        assert!(d.im.abs() < 1e-9 * d.norm().max(1.0));
    }

    #[test]
    fn star_flip_preserves_det() {
        let g = lattices::square_2x1(1.0, 2.0, 0.5, 0.7);
        let o = Orientation::from_graph(&g).unwrap();
        let z = Complex64::from_polar(1.0, 0.37);
        let d0 = klein_matrix(&g, &o, z, 1.0).unwrap().det();
        // flip all edges around vertex 0
        let mut o2 = o.clone();
        for (ei, e) in g.edges.iter().enumerate() {
            if e.u == 0 || e.v == 0 {
                if e.is_loop() {
                    continue;
                }
                o2.0[ei] = -o2.0[ei];
            }
        }
        let d1 = klein_matrix(&g, &o2, z, 1.0).unwrap().det();
        assert!((d0 - d1).norm() < 1e-9 * d0.norm().max(1.0));
    }
}
