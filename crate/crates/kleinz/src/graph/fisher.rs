//! Fisher correspondence: local gadget substitution turning Ising
//! even-subgraph sums into dimer partition functions.
//!
//! Each vertex of degree d is replaced by a gadget whose internal perfect
//! matchings encode exactly the even subsets of the incident edge-ends, with
//! two internal completions per even subset. Summing matching weights over
//! the decorated graph therefore yields `2^{|V|} * sum over even subgraphs
//! of prod tanh(beta J_e)`, with the original edge carrying weight
//! `tanh(beta J_e)` and all gadget edges weight 1.
//!
//! The gadget is a chain of `d-2` triangle blocks (one triangle plus three
//! pendant attachment points; blocks joined by unit bridges), which realises
//! one matching per even subset, together with a doubled pendant edge that
//! contributes the factor 2 and is connected to the rest by a structurally
//! unmatched edge so the graph stays connected.

use super::{Edge, EmbeddedGraph, Surface};
use crate::{KleinError, Result};

struct GadgetBuilder {
    edges: Vec<Edge>,
    rotation: Vec<Vec<usize>>,
    next_vertex: usize,
}

impl GadgetBuilder {
    fn vertex(&mut self) -> usize {
        let v = self.next_vertex;
        self.next_vertex += 1;
        self.rotation.push(Vec::new());
        v
    }

    fn unit_edge(&mut self, u: usize, v: usize) -> usize {
        let e = self.edges.len();
        self.edges.push(Edge::new(u, v, 1.0, 0, 0, 0));
        e
    }
}

/// Decorate `g` with Fisher gadgets. `couplings[e]` is the Ising coupling of
/// edge `e`; the decorated edge gets weight `tanh(beta * couplings[e])`.
pub fn fisher_graph(g: &EmbeddedGraph, couplings: &[f64], beta: f64) -> Result<EmbeddedGraph> {
    if g.surface != Surface::Klein {
        return Err(KleinError::BadArgument(
            "fisher_graph expects a Klein graph".into(),
        ));
    }
    let rotation = g.rotation.as_ref().ok_or_else(|| {
        KleinError::MissingRotation("fisher_graph needs the cyclic edge order at each vertex".into())
    })?;
    if couplings.len() != g.edges.len() {
        return Err(KleinError::BadArgument(format!(
            "couplings length {} != edge count {}",
            couplings.len(),
            g.edges.len()
        )));
    }

    let mut b = GadgetBuilder {
        edges: Vec::new(),
        rotation: Vec::new(),
        next_vertex: 0,
    };
    // per original edge-end: the attachment vertex it connects to
    let mut attach = vec![usize::MAX; 2 * g.edges.len()];

    for v in 0..g.vertex_count {
        let slots = &rotation[v];
        let d = slots.len();
        let attach_pts = build_gadget(&mut b, d);
        for (s, &end) in slots.iter().enumerate() {
            attach[end] = attach_pts[s];
        }
    }

    // original edges, decorated weight, crossing data preserved
    for (ei, e) in g.edges.iter().enumerate() {
        let au = attach[2 * ei];
        let av = attach[2 * ei + 1];
        let x = (beta * couplings[ei]).tanh();
        let idx = b.edges.len();
        b.edges.push(Edge::new(au, av, x, e.a, e.ap, e.b));
        // the leg slot was reserved first in each attachment's rotation
        b.rotation[au][0] = 2 * idx;
        b.rotation[av][0] = 2 * idx + 1;
    }

    Ok(EmbeddedGraph {
        name: format!("{}^F", g.name),
        surface: Surface::Klein,
        vertex_count: b.next_vertex,
        colors: None,
        edges: b.edges,
        rotation: Some(b.rotation),
        orientation: None,
        curves: None,
    })
}

/// Build one gadget for a vertex of degree `d`; returns the attachment
/// vertex for each of the `d` slots, in the same cyclic order. Every
/// attachment vertex's rotation has its slot 0 reserved for the original
/// (leg) edge.
fn build_gadget(b: &mut GadgetBuilder, d: usize) -> Vec<usize> {
    match d {
        0 => {
            // isolated vertex: the doubled pendant alone gives the factor 2
            let p = b.vertex();
            let q = b.vertex();
            let e1 = b.unit_edge(p, q);
            let e2 = b.unit_edge(p, q);
            b.rotation[p] = vec![2 * e1, 2 * e2];
            b.rotation[q] = vec![2 * e2 + 1, 2 * e1 + 1];
            Vec::new()
        }
        1 => {
            let a = b.vertex();
            let r = b.vertex();
            let e = b.unit_edge(a, r);
            let (p, q, pq) = doubled_pendant(b);
            let conn = b.unit_edge(q, r);
            let _ = (p, pq);
            b.rotation[a] = vec![usize::MAX, 2 * e];
            b.rotation[r] = vec![2 * e + 1, 2 * conn + 1];
            vec![a]
        }
        2 => {
            let a0 = b.vertex();
            let a1 = b.vertex();
            let g01 = b.unit_edge(a0, a1);
            let (_p, q, _pq) = doubled_pendant(b);
            let conn = b.unit_edge(q, a0);
            b.rotation[a0] = vec![usize::MAX, 2 * conn + 1, 2 * g01];
            b.rotation[a1] = vec![usize::MAX, 2 * g01 + 1];
            vec![a0, a1]
        }
        _ => {
            // chain of d-2 triangle blocks
            let blocks = d - 2;
            let mut legs = Vec::with_capacity(d);
            let mut prev_bridge_pt: Option<usize> = None;
            for t in 0..blocks {
                // attachment roles: (left, mid, right)
                // first block: (leg0, leg1, bridge); middle: (bridge, leg, bridge);
                // last: (bridge, leg, leg)
                let x1 = b.vertex();
                let x2 = b.vertex();
                let x3 = b.vertex();
                let a1 = b.vertex();
                let a2 = b.vertex();
                let a3 = b.vertex();
                let t12 = b.unit_edge(x1, x2);
                let t23 = b.unit_edge(x2, x3);
                let t31 = b.unit_edge(x3, x1);
                let s1 = b.unit_edge(a1, x1);
                let s2 = b.unit_edge(a2, x2);
                let s3 = b.unit_edge(a3, x3);
                // triangle laid out counterclockwise with spokes outward
                b.rotation[x1] = vec![2 * s1 + 1, 2 * t12, 2 * t31 + 1];
                b.rotation[x2] = vec![2 * s2 + 1, 2 * t23, 2 * t12 + 1];
                b.rotation[x3] = vec![2 * s3 + 1, 2 * t31, 2 * t23 + 1];
                b.rotation[a1] = vec![usize::MAX, 2 * s1];
                b.rotation[a2] = vec![usize::MAX, 2 * s2];
                b.rotation[a3] = vec![usize::MAX, 2 * s3];
                if let Some(pb) = prev_bridge_pt {
                    let bridge = b.unit_edge(pb, a1);
                    b.rotation[pb][0] = 2 * bridge;
                    b.rotation[a1][0] = 2 * bridge + 1;
                }
                let first = t == 0;
                let last = t + 1 == blocks;
                // a1 of the first block and a3 of the last are legs; the
                // other a1/a3 pairs are bridge endpoints. a2 is always a leg.
                if first {
                    legs.push(a1);
                }
                legs.push(a2);
                if last {
                    legs.push(a3);
                    prev_bridge_pt = None;
                } else {
                    prev_bridge_pt = Some(a3);
                }
            }
            // doubled pendant hangs off the first leg attachment
            let (_p, q, _pq) = doubled_pendant(b);
            let conn = b.unit_edge(q, legs[0]);
            b.rotation[legs[0]].push(2 * conn + 1);
            legs
        }
    }
}

/// Two vertices joined by two parallel unit edges; `p` has no other
/// neighbours, so `p` is always matched to `q` (two ways) and any edge out
/// of `q` is never used by a perfect matching.
fn doubled_pendant(b: &mut GadgetBuilder) -> (usize, usize, (usize, usize)) {
    let p = b.vertex();
    let q = b.vertex();
    let e1 = b.unit_edge(p, q);
    let e2 = b.unit_edge(p, q);
    b.rotation[p] = vec![2 * e1, 2 * e2];
    b.rotation[q] = vec![2 * e2 + 1, 2 * e1 + 1];
    (p, q, (e1, e2))
}
