//! Root and spectral-curve analysis: polynomial roots, zeros on the unit
//! torus with node classification, shape parameters, and the mod-4 root
//! invariants controlling the finite-size correction coefficients.

use crate::poly::{BiLaurentPoly, LaurentPoly};
use crate::{KleinError, Result};
use num_complex::Complex64;
use serde::Serialize;

/// Default residual tolerance for root finding.
pub const ROOT_TOL: f64 = 1e-10;
/// Radius for snapping roots onto the unit circle and onto ±i.
pub const SNAP_TOL: f64 = 1e-8;

/// Roots with multiplicities, as clustered by the solver.
#[derive(Clone, Debug)]
pub struct RootSet {
    pub roots: Vec<(Complex64, usize)>,
    pub tol: f64,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.1).sum()
    }
}

/// All roots of the polynomial part of a Laurent polynomial via
/// Aberth–Ehrlich iteration, with one Newton polish pass, clustering at
/// radius `cluster`, and snapping onto the unit circle / onto ±i.
pub fn roots(p: &LaurentPoly, cluster: f64) -> Result<RootSet> {
    if p.is_zero() {
        return Err(KleinError::BadArgument("root finding on the zero polynomial".into()));
    }
    let coeffs = &p.coeffs; // ascending; first and last nonzero after pruning
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Ok(RootSet {
            roots: vec![],
            tol: cluster,
        });
    }
    let mut zs = initial_guesses(coeffs);
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for c in coeffs.iter().rev() {
            d = d * z + v;
            v = v * z + c;
        }
        (v, d)
    };
    let mut converged = false;
    for _ in 0..400 {
        let mut max_step = 0.0f64;
        let snapshot = zs.clone();
        for k in 0..zs.len() {
            let (v, d) = eval(zs[k]);
            if v.norm() == 0.0 {
                continue;
            }
            let w = if d.norm() > 0.0 { v / d } else { v };
            let mut s = Complex64::new(0.0, 0.0);
            for (j, &zj) in snapshot.iter().enumerate() {
                if j != k {
                    let diff = zs[k] - zj;
                    if diff.norm() > 1e-300 {
                        s += 1.0 / diff;
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - w * s;
            let step = if denom.norm() > 1e-300 { w / denom } else { w };
            zs[k] -= step;
            max_step = max_step.max(step.norm() / zs[k].norm().max(1.0));
        }
        if max_step < 1e-14 {
            converged = true;
            break;
        }
    }
    if !converged {
        // fall through: the polish pass plus the residual check below decide
    }
    // Newton polish
    for z in zs.iter_mut() {
        for _ in 0..3 {
            let (v, d) = eval(*z);
            if d.norm() > 1e-300 {
                let step = v / d;
                if step.norm() < 1.0 {
                    *z -= step;
                }
            }
        }
    }
    // snapping
    let scale = p.max_coeff();
    for z in zs.iter_mut() {
        if (z.norm() - 1.0).abs() < SNAP_TOL {
            *z /= z.norm();
        }
        for target in [Complex64::i(), -Complex64::i()] {
            if (*z - target).norm() < SNAP_TOL {
                *z = target;
            }
        }
    }
    // residual check (multiple roots flatten the polynomial, so allow the
    // residual to scale with the cluster radius)
    for &z in &zs {
        let (v, _) = eval(z);
        let allowed = scale * (ROOT_TOL.max(cluster)).max(1e-12) * (deg as f64);
        if v.norm() > allowed * zs.len() as f64 * 10.0 {
            return Err(KleinError::RootConvergence(400));
        }
    }
    // cluster
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    for &z in &zs {
        if let Some(entry) = out.iter_mut().find(|(c, _)| (*c - z).norm() < cluster) {
            let total = entry.1 as f64;
            entry.0 = (entry.0 * total + z) / (total + 1.0);
            entry.1 += 1;
        } else {
            out.push((z, 1));
        }
    }
    // re-snap cluster centers
    for entry in out.iter_mut() {
        if (entry.0.norm() - 1.0).abs() < SNAP_TOL {
            entry.0 /= entry.0.norm();
        }
        for target in [Complex64::i(), -Complex64::i()] {
            if (entry.0 - target).norm() < SNAP_TOL.max(cluster) {
                entry.0 = target;
            }
        }
    }
    Ok(RootSet {
        roots: out,
        tol: cluster,
    })
}

fn initial_guesses(coeffs: &[Complex64]) -> Vec<Complex64> {
    let deg = coeffs.len() - 1;
    let a0 = coeffs[0].norm().max(1e-300);
    let ad = coeffs[deg].norm().max(1e-300);
    let r = (a0 / ad).powf(1.0 / deg as f64);
    (0..deg)
        .map(|k| {
            Complex64::from_polar(
                r,
                2.0 * std::f64::consts::PI * k as f64 / deg as f64 + 0.3961,
            )
        })
        .collect()
}

/// Components of the mod-4 invariant of a polynomial `R` with
/// `R(iz)` real: `A = lambda + 2p + r_minus - r_plus + (m_minus - m_plus)/2`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ModFourComponents {
    pub lambda: i64,
    pub pairs: i64,
    pub r_plus: i64,
    pub r_minus: i64,
    pub m_plus: i64,
    pub m_minus: i64,
}

impl ModFourComponents {
    pub fn a_mod4(&self) -> i64 {
        (self.lambda + 2 * self.pairs + self.r_minus - self.r_plus
            + (self.m_minus - self.m_plus) / 2)
            .rem_euclid(4)
    }
}

/// The pair of mod-4 invariants determined by `R(z,1)` and `R(z,-1)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ModFourInvariant {
    pub a: i64,
    pub a_prime: i64,
    pub comp: ModFourComponents,
    pub comp_prime: ModFourComponents,
}

fn analyze_r(r: &LaurentPoly) -> Result<ModFourComponents> {
    let lead = r.leading();
    let lam4 = lead.arg() / (std::f64::consts::PI / 2.0);
    let lambda = lam4.round() as i64;
    if (lam4 - lambda as f64).abs() > 1e-6 {
        return Err(KleinError::BadArgument(format!(
            "leading coefficient argument {lam4} is not a multiple of pi/2; \
             the polynomial does not satisfy the reality structure"
        )));
    }
    let mut comp = ModFourComponents {
        lambda: lambda.rem_euclid(4),
        pairs: 0,
        r_plus: 0,
        r_minus: 0,
        m_plus: 0,
        m_minus: 0,
    };
    if r.coeffs.len() == 1 {
        return Ok(comp);
    }
    let rs = roots(r, 1e-7)?;
    let mut off_axis_outside = 0i64;
    for &(z, mult) in &rs.roots {
        let m = mult as i64;
        if z == Complex64::i() {
            comp.m_plus += m;
            continue;
        }
        if z == -Complex64::i() {
            comp.m_minus += m;
            continue;
        }
        if (z.norm() - 1.0).abs() < SNAP_TOL {
            return Err(KleinError::ConjectureViolation {
                z,
                w: Complex64::new(0.0, 0.0),
            });
        }
        if z.norm() > 1.0 {
            if z.re.abs() < SNAP_TOL * z.norm() {
                if z.im > 0.0 {
                    comp.r_plus += m;
                } else {
                    comp.r_minus += m;
                }
            } else {
                off_axis_outside += m;
            }
        }
    }
    if off_axis_outside % 2 != 0 {
        return Err(KleinError::BadArgument(
            "off-axis roots outside the unit disc do not pair up".into(),
        ));
    }
    comp.pairs = off_axis_outside / 2;
    if (comp.m_minus - comp.m_plus) % 2 != 0 {
        return Err(KleinError::BadArgument(
            "multiplicities at i and -i differ by an odd amount".into(),
        ));
    }
    Ok(comp)
}

/// Mod-4 invariants from the two Klein characteristic polynomials.
pub fn mod4_invariants(r1: &LaurentPoly, rm1: &LaurentPoly) -> Result<ModFourInvariant> {
    let comp = analyze_r(r1)?;
    let comp_prime = analyze_r(rm1)?;
    Ok(ModFourInvariant {
        a: comp.a_mod4(),
        a_prime: comp_prime.a_mod4(),
        comp,
        comp_prime,
    })
}

/// Bipartite variant `A = lambda + r` with `r` the number of roots of
/// modulus > 1 counted with multiplicity (mod 4; only its parity is used by
/// the case analysis). Expects the conjugation-normalised `S`.
pub fn bipartite_invariant(s: &LaurentPoly) -> Result<i64> {
    let comp = analyze_r(s)?;
    Ok((comp.lambda + comp.r_plus + comp.r_minus + 2 * comp.pairs).rem_euclid(4))
}

/// A zero of the characteristic polynomial on the unit torus (z = -1 slice).
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub enum ZeroKind {
    /// one of two conjugate zeros (-1, w0), (-1, conj w0)
    PairMember,
    /// real node at (-1, ±1)
    RealNode,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TorusZero {
    pub w_re: f64,
    pub w_im: f64,
    pub psi: f64,
    pub kind: ZeroKind,
    /// quadratic form data of P at the node: A_z, B, A_w
    pub a_z: f64,
    pub b: f64,
    pub a_w: f64,
    /// tau imaginary part per unit m/n
    pub tau_unit: f64,
}

impl TorusZero {
    pub fn w(&self) -> Complex64 {
        Complex64::new(self.w_re, self.w_im)
    }
}

/// Zeros of the spectral polynomial on the unit torus.
#[derive(Clone, Debug, Serialize, Default)]
pub struct NodeReport {
    pub zeros: Vec<TorusZero>,
}

impl NodeReport {
    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }
}

/// Shape parameter of one zero for an m-by-n cover: `i (m/n) tau_unit`.
pub fn tau(zero: &TorusZero, m: usize, n: usize) -> Complex64 {
    Complex64::new(0.0, m as f64 / n as f64 * zero.tau_unit)
}

const SLICE_CLUSTER: f64 = 2e-5;

/// Locate and classify the unit-torus zeros of the (non-bipartite)
/// characteristic polynomial `P`: every zero must be a positive node on the
/// z = -1 slice, either a real node at w = ±1 or a member of a conjugate
/// pair. A coarse scan of the full torus guards the slice assumption.
pub fn unit_torus_zeros(p: &BiLaurentPoly) -> Result<NodeReport> {
    let scale = p.max_coeff();
    let minus_one = Complex64::new(-1.0, 0.0);
    let slice = p.slice_z(minus_one);
    let mut zeros = Vec::new();
    if !slice.is_zero() {
        let rs = roots(&slice, SLICE_CLUSTER)?;
        for &(w, mult) in &rs.roots {
            if (w.norm() - 1.0).abs() > SNAP_TOL.max(SLICE_CLUSTER) {
                continue;
            }
            if mult != 2 {
                return Err(KleinError::ConjectureViolation { z: minus_one, w });
            }
            let kind = if w.im.abs() < SNAP_TOL {
                ZeroKind::RealNode
            } else {
                ZeroKind::PairMember
            };
            let w_snapped = if kind == ZeroKind::RealNode {
                Complex64::new(w.re.signum(), 0.0)
            } else {
                w / w.norm()
            };
            zeros.push(node_data(p, w_snapped, kind)?);
        }
    } else {
        return Err(KleinError::BadArgument(
            "P vanishes identically on the z=-1 slice".into(),
        ));
    }
    grid_guard(p, &zeros, scale)?;
    Ok(NodeReport { zeros })
}

fn node_data(p: &BiLaurentPoly, w0: Complex64, kind: ZeroKind) -> Result<TorusZero> {
    let z0 = Complex64::new(-1.0, 0.0);
    let pzz = p.d2_dz2(z0, w0);
    let pww = p.d2_dw2(z0, w0);
    let pzw = p.d2_dzdw(z0, w0);
    // quadratic form on the torus parameters
    let a_z = (-(z0 * z0) * pzz / 2.0).re;
    let a_w = (-(w0 * w0) * pww / 2.0).re;
    let b = (-(z0 * w0) * pzw / 2.0).re;
    if pww.norm() < 1e-14 * p.max_coeff().max(1.0) {
        return Err(KleinError::BadArgument(
            "vanishing w-derivative at a node".into(),
        ));
    }
    if !(a_z > 0.0 && a_w > 0.0 && a_z * a_w - b * b > 0.0) {
        return Err(KleinError::BadArgument(format!(
            "zero at (-1, {w0}) is not a positive node: A_z={a_z}, B={b}, A_w={a_w}"
        )));
    }
    let tau_unit = (pzz.norm() / pww.norm()).sqrt();
    let psi = w0.arg() / (2.0 * std::f64::consts::PI);
    Ok(TorusZero {
        w_re: w0.re,
        w_im: w0.im,
        psi,
        kind,
        a_z,
        b,
        a_w,
        tau_unit,
    })
}

/// Coarse 64x64 scan: any near-zero of P away from the z = -1 slice zeros is
/// a violation of the node-location assumption.
fn grid_guard(p: &BiLaurentPoly, zeros: &[TorusZero], scale: f64) -> Result<()> {
    let n = 64;
    for k in 0..n {
        for l in 0..n {
            let z = Complex64::from_polar(
                1.0,
                2.0 * std::f64::consts::PI * (k as f64 + 0.37) / n as f64,
            );
            let w = Complex64::from_polar(
                1.0,
                2.0 * std::f64::consts::PI * (l as f64 + 0.59) / n as f64,
            );
            let v = p.eval(z, w).norm();
            if v < 1e-10 * scale {
                let near_known = (z - Complex64::new(-1.0, 0.0)).norm() < 0.2
                    && zeros.iter().any(|t| (w - t.w()).norm() < 0.2);
                if !near_known {
                    return Err(KleinError::ConjectureViolation { z, w });
                }
            }
        }
    }
    Ok(())
}

/// Zeros of the bipartite polynomial `Q` on the unit torus: either none, two
/// conjugate simple zeros at z = -1, or one real node at (-1, ±1). The tau
/// parameter uses first derivatives at simple zeros and second derivatives
/// at the node.
pub fn unit_torus_zeros_bipartite(q: &BiLaurentPoly) -> Result<NodeReport> {
    let scale = q.max_coeff();
    let minus_one = Complex64::new(-1.0, 0.0);
    let slice = q.slice_z(minus_one);
    let mut zeros = Vec::new();
    let rs = roots(&slice, SLICE_CLUSTER)?;
    for &(w, mult) in &rs.roots {
        if (w.norm() - 1.0).abs() > SNAP_TOL.max(SLICE_CLUSTER) {
            continue;
        }
        if w.im.abs() < SNAP_TOL {
            // real node at w = ±1; the w-symmetry makes it a double root
            if mult != 2 {
                return Err(KleinError::ConjectureViolation { z: minus_one, w });
            }
            let w0 = Complex64::new(w.re.signum(), 0.0);
            let qzz = q.d2_dz2(minus_one, w0).norm();
            let qww = q.d2_dw2(minus_one, w0).norm();
            if qww < 1e-14 * scale {
                return Err(KleinError::BadArgument(
                    "vanishing second w-derivative at a bipartite node".into(),
                ));
            }
            zeros.push(TorusZero {
                w_re: w0.re,
                w_im: 0.0,
                psi: w0.arg() / (2.0 * std::f64::consts::PI),
                kind: ZeroKind::RealNode,
                a_z: qzz,
                b: 0.0,
                a_w: qww,
                tau_unit: (qzz / qww).sqrt(),
            });
        } else {
            if mult != 1 {
                return Err(KleinError::ConjectureViolation { z: minus_one, w });
            }
            let w0 = w / w.norm();
            let qz = q.d_dz(minus_one, w0).norm();
            let qw = q.d_dw(minus_one, w0).norm();
            if qw < 1e-14 * scale {
                return Err(KleinError::BadArgument(
                    "vanishing w-derivative at a simple bipartite zero".into(),
                ));
            }
            zeros.push(TorusZero {
                w_re: w0.re,
                w_im: w0.im,
                psi: w0.arg() / (2.0 * std::f64::consts::PI),
                kind: ZeroKind::PairMember,
                a_z: qz,
                b: 0.0,
                a_w: qw,
                tau_unit: qz / qw,
            });
        }
    }
    // grid check: zeros of Q on the unit torus occur only at z = -1
    let n = 64;
    for k in 0..n {
        for l in 0..n {
            let z = Complex64::from_polar(
                1.0,
                2.0 * std::f64::consts::PI * (k as f64 + 0.41) / n as f64,
            );
            let w = Complex64::from_polar(
                1.0,
                2.0 * std::f64::consts::PI * (l as f64 + 0.23) / n as f64,
            );
            if q.eval(z, w).norm() < 1e-8 * scale && (z - minus_one).norm() > 0.2 {
                return Err(KleinError::ConjectureViolation { z, w });
            }
        }
    }
    Ok(NodeReport { zeros })
}

/// True iff the roots of both polynomials are purely imaginary and simple,
/// and their imaginary parts alternate along the axis.
pub fn interlacing_check(s1: &LaurentPoly, sm1: &LaurentPoly) -> Result<bool> {
    let mut tagged: Vec<(f64, u8)> = Vec::new();
    for (tag, s) in [(0u8, s1), (1u8, sm1)] {
        if s.coeffs.len() <= 1 {
            continue;
        }
        let rs = roots(s, 1e-7)?;
        for &(z, mult) in &rs.roots {
            if mult != 1 {
                return Ok(false);
            }
            if z.re.abs() > SNAP_TOL * z.norm().max(1.0) {
                return Ok(false);
            }
            tagged.push((z.im, tag));
        }
    }
    tagged.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(tagged.windows(2).all(|w| w[0].1 != w[1].1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::calibrate;
    use crate::graph::lattices;
    use crate::poly::normalize_bipartite;

    #[test]
    fn simple_roots() {
        // z + 1/z has roots ±i
        let p = LaurentPoly::from_coeffs(
            -1,
            vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        );
        let rs = roots(&p, 1e-8).unwrap();
        assert_eq!(rs.total_multiplicity(), 2);
        assert!(rs.roots.iter().any(|&(z, _)| z == Complex64::i()));
        assert!(rs.roots.iter().any(|&(z, _)| z == -Complex64::i()));
    }

    #[test]
    fn triangular_root_moduli() {
        let g = lattices::triangular();
        let cal = calibrate(&g).unwrap();
        let rs = roots(&cal.polys.r1, 1e-7).unwrap();
        // two roots of modulus (sqrt(3)+1)/sqrt(2) outside, two inside
        let big = (3.0f64.sqrt() + 1.0) / 2.0 * 2.0f64.sqrt();
        let small = (3.0f64.sqrt() - 1.0) / 2.0 * 2.0f64.sqrt();
        let mut outside = 0;
        let mut inside = 0;
        for &(z, mult) in &rs.roots {
            if z.norm() > 1.0 {
                outside += mult;
                assert!((z.norm() - big).abs() < 1e-8, "|z| = {}", z.norm());
            } else {
                inside += mult;
                assert!((z.norm() - small).abs() < 1e-8);
            }
        }
        assert_eq!((outside, inside), (2, 2));
    }

    #[test]
    fn mod4_triangular() {
        let g = lattices::triangular();
        let cal = calibrate(&g).unwrap();
        let inv = mod4_invariants(&cal.polys.r1, &cal.polys.rm1).unwrap();
        assert_eq!(inv.a, 2, "components: {:?}", inv.comp);
        assert_eq!(inv.a_prime, 0);
        assert_eq!(inv.comp.lambda, 0);
        assert_eq!(inv.comp.pairs, 1);
    }

    #[test]
    fn mod4_square_1x2() {
        let g = lattices::square_1x2(1.0, 1.0, 1.0, 1.0);
        let cal = calibrate(&g).unwrap();
        let inv = mod4_invariants(&cal.polys.r1, &cal.polys.rm1).unwrap();
        assert_eq!((inv.a, inv.a_prime), (1, 1));
        assert_eq!(inv.comp.lambda, 1);
        assert_eq!((inv.comp.m_plus, inv.comp.m_minus), (1, 1));
    }

    #[test]
    fn mod4_scaling_invariance() {
        let g = lattices::triangular();
        let cal = calibrate(&g).unwrap();
        let mut scaled = g.clone();
        for e in scaled.edges.iter_mut() {
            e.weight *= 3.7;
        }
        let cal2 = calibrate(&scaled).unwrap();
        let i1 = mod4_invariants(&cal.polys.r1, &cal.polys.rm1).unwrap();
        let i2 = mod4_invariants(&cal2.polys.r1, &cal2.polys.rm1).unwrap();
        assert_eq!((i1.a, i1.a_prime), (i2.a, i2.a_prime));
    }

    #[test]
    fn zeros_square_1x2() {
        let g = lattices::square_1x2(1.0, 1.0, 1.0, 1.0);
        let cal = calibrate(&g).unwrap();
        let report = unit_torus_zeros(&cal.polys.p).unwrap();
        assert_eq!(report.zeros.len(), 2);
        assert!(report.zeros.iter().all(|z| z.kind == ZeroKind::RealNode));
        let mut psis: Vec<f64> = report.zeros.iter().map(|z| z.psi.abs()).collect();
        psis.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(psis[0].abs() < 1e-9 && (psis[1] - 0.5).abs() < 1e-9);
        // tau = i (m/n) x / (4y)
        for z in &report.zeros {
            assert!((z.tau_unit - 0.25).abs() < 1e-8, "tau_unit = {}", z.tau_unit);
        }
    }

    #[test]
    fn zeros_square_1x2_anisotropic_tau() {
        let (x, y) = (1.4, 0.6);
        let g = lattices::square_1x2(x, x, y, y);
        let cal = calibrate(&g).unwrap();
        let report = unit_torus_zeros(&cal.polys.p).unwrap();
        for z in &report.zeros {
            assert!(
                (z.tau_unit - x / (4.0 * y)).abs() < 1e-7,
                "tau_unit = {} vs {}",
                z.tau_unit,
                x / (4.0 * y)
            );
        }
    }

    #[test]
    fn zeros_triangular_none() {
        let g = lattices::triangular();
        let cal = calibrate(&g).unwrap();
        let report = unit_torus_zeros(&cal.polys.p).unwrap();
        assert!(report.is_empty());
    }

    #[test]
    fn zeros_hexagonal_isotropic() {
        let g = lattices::hexagonal(1.0, 1.0, 1.0);
        let cal = calibrate(&g).unwrap();
        let (s1, sm1) = cal.polys.s.as_ref().unwrap();
        let gauge = normalize_bipartite(s1, sm1, cal.polys.q.as_ref().unwrap()).unwrap();
        let report = unit_torus_zeros_bipartite(&gauge.q).unwrap();
        assert_eq!(report.zeros.len(), 2);
        for z in &report.zeros {
            assert_eq!(z.kind, ZeroKind::PairMember);
            assert!((z.psi.abs() - 1.0 / 3.0).abs() < 1e-9, "psi = {}", z.psi);
            assert!((z.tau_unit - 3.0f64.sqrt() / 3.0).abs() < 1e-8, "tau = {}", z.tau_unit);
        }
    }

    #[test]
    fn hexagonal_gas_phase_no_zeros() {
        let g = lattices::hexagonal(0.4, 2.0, 0.5); // nu1 + nu3 < nu2
        let cal = calibrate(&g).unwrap();
        let (s1, sm1) = cal.polys.s.as_ref().unwrap();
        let gauge = normalize_bipartite(s1, sm1, cal.polys.q.as_ref().unwrap()).unwrap();
        let report = unit_torus_zeros_bipartite(&gauge.q).unwrap();
        assert!(report.is_empty());
    }

    #[test]
    fn square_2x1_real_node() {
        let g = lattices::square_2x1(1.0, 1.0, 1.0, 1.0);
        let cal = calibrate(&g).unwrap();
        let (s1, sm1) = cal.polys.s.as_ref().unwrap();
        let gauge = normalize_bipartite(s1, sm1, cal.polys.q.as_ref().unwrap()).unwrap();
        let report = unit_torus_zeros_bipartite(&gauge.q).unwrap();
        assert_eq!(report.zeros.len(), 1);
        assert_eq!(report.zeros[0].kind, ZeroKind::RealNode);
        // node at w = -1, tau_unit = x/y = 1
        assert!((report.zeros[0].w_re + 1.0).abs() < 1e-9);
        assert!((report.zeros[0].tau_unit - 1.0).abs() < 1e-8);
    }

    #[test]
    fn bipartite_s_roots_imaginary_and_interlaced() {
        for g in [
            lattices::square_2x1(1.0, 1.0, 1.0, 1.0),
            lattices::square_2x1(1.2, 0.8, 0.6, 1.7),
            lattices::hexagonal(1.0, 1.0, 1.0),
            lattices::hexagonal(0.9, 1.8, 0.4),
        ] {
            let cal = calibrate(&g).unwrap();
            let (s1, sm1) = cal.polys.s.as_ref().unwrap();
            assert!(
                interlacing_check(s1, sm1).unwrap(),
                "interlacing fails on {}",
                g.name
            );
        }
    }

    #[test]
    fn interlacing_rejects_real_root() {
        // z - 2 has a real root
        let p = LaurentPoly::from_coeffs(
            0,
            vec![Complex64::new(-2.0, 0.0), Complex64::new(1.0, 0.0)],
        );
        let q = LaurentPoly::constant(Complex64::new(1.0, 0.0));
        assert!(!interlacing_check(&p, &q).unwrap());
    }

    #[test]
    fn lemma_alpha_numeric() {
        // Arg(prod_{z^n=1} R(z,1)) approaches the invariant combination
        let n = 101usize;
        for g in [
            lattices::triangular(),
            lattices::square_1x2(1.0, 1.0, 1.0, 1.0),
            lattices::square_2x1(1.0, 1.0, 1.0, 1.0),
        ] {
            let cal = calibrate(&g).unwrap();
            let inv = mod4_invariants(&cal.polys.r1, &cal.polys.rm1).unwrap();
            let c = &inv.comp;
            let predicted = ((c.lambda + 2 * c.pairs + c.r_minus - c.r_plus) % 4) as f64
                * n as f64
                * std::f64::consts::FRAC_PI_2
                + (if (n - 1) / 2 % 2 == 0 { 1.0 } else { -1.0 })
                    * (c.m_minus - c.m_plus) as f64
                    / 2.0
                    * std::f64::consts::FRAC_PI_2;
            let actual = crate::exact::arg_root_product(&cal.polys.r1, n);
            let diff = crate::linalg::wrap_angle(actual - predicted);
            assert!(diff.abs() < 1e-3, "{}: diff {diff}", g.name);
        }
    }

    #[test]
    fn mod4_constant_along_weight_path() {
        // 20-step path keeping P(-1,±1) away from zero
        let steps = 20;
        let mut last: Option<(i64, i64)> = None;
        for k in 0..=steps {
            let t = k as f64 / steps as f64;
            let g = lattices::square_1x2(1.0 + 0.5 * t, 1.0 - 0.3 * t, 1.0 + 0.2 * t, 1.0);
            let cal = calibrate(&g).unwrap();
            let inv = mod4_invariants(&cal.polys.r1, &cal.polys.rm1).unwrap();
            if let Some(prev) = last {
                assert_eq!(prev, (inv.a, inv.a_prime), "jump at t = {t}");
            }
            last = Some((inv.a, inv.a_prime));
        }
    }

    #[test]
    fn bipartite_parity_table() {
        // two distinct zeros or node: A odd, A' even; no zeros: A + A' even
        let cases: Vec<(crate::graph::EmbeddedGraph, &str)> = vec![
            (lattices::hexagonal(1.0, 1.0, 1.0), "two-zeros"),
            (lattices::hexagonal(0.4, 2.0, 0.5), "none"),
            (lattices::square_2x1(1.0, 1.0, 1.0, 1.0), "node"),
        ];
        for (g, regime) in cases {
            let cal = calibrate(&g).unwrap();
            let (s1, sm1) = cal.polys.s.as_ref().unwrap();
            let gauge = normalize_bipartite(s1, sm1, cal.polys.q.as_ref().unwrap()).unwrap();
            let a = bipartite_invariant(&gauge.s1).unwrap();
            let ap = bipartite_invariant(&gauge.sm1).unwrap();
            match regime {
                "none" => assert_eq!((a + ap) % 2, 0, "{}: A={a} A'={ap}", g.name),
                _ => {
                    assert_eq!(a % 2, 1, "{} ({regime}): A={a}", g.name);
                    assert_eq!(ap % 2, 0, "{} ({regime}): A'={ap}", g.name);
                }
            }
        }
    }
}
