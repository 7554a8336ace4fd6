//! Laurent polynomials and characteristic-polynomial extraction.
//!
//! Determinants of the twisted Kasteleyn matrices are polynomials in the
//! twist parameters with known degree windows, so they are recovered exactly
//! by evaluating on slightly rotated roots-of-unity grids and inverting the
//! discrete Fourier transform. The grid offset keeps symmetry-degenerate
//! sample points (such as ±1, ±i) out of the evaluation set.

use crate::graph::{EmbeddedGraph, Surface};
use crate::orient::{bipartite_block, klein_matrix, torus_matrix, Orientation};
use crate::{KleinError, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Relative magnitude below which extracted coefficients are dropped.
pub const PRUNE_TOL: f64 = 1e-12;
/// Relative residual above which extraction reports a degree-window bug.
pub const RESIDUAL_TOL: f64 = 1e-9;

/// One-variable Laurent polynomial with complex coefficients on the
/// exponent window `[lo, lo + coeffs.len() - 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly {
    pub lo: i64,
    pub coeffs: Vec<Complex64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly {
            lo: 0,
            coeffs: vec![],
        }
    }

    pub fn constant(c: Complex64) -> Self {
        LaurentPoly {
            lo: 0,
            coeffs: vec![c],
        }
    }

    pub fn from_coeffs(lo: i64, coeffs: Vec<Complex64>) -> Self {
        let mut p = LaurentPoly { lo, coeffs };
        p.prune(PRUNE_TOL);
        p
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, e: i64) -> Complex64 {
        if e < self.lo || e > self.hi() {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(e - self.lo) as usize]
        }
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drop leading/trailing coefficients below `tol * max |coeff|`.
    pub fn prune(&mut self, tol: f64) {
        let scale = self.max_coeff();
        if scale == 0.0 {
            self.coeffs.clear();
            self.lo = 0;
            return;
        }
        let cut = tol * scale;
        let mut start = 0;
        while start < self.coeffs.len() && self.coeffs[start].norm() <= cut {
            start += 1;
        }
        let mut end = self.coeffs.len();
        while end > start && self.coeffs[end - 1].norm() <= cut {
            end -= 1;
        }
        self.lo += start as i64;
        self.coeffs = self.coeffs[start..end].to_vec();
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        // Horner on the polynomial part, then shift by z^lo
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc * z.powi(self.lo as i32)
    }

    /// Leading coefficient (highest exponent).
    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().unwrap_or(&Complex64::new(0.0, 0.0))
    }

    /// Coefficients with conjugated values (represents the polynomial with
    /// conjugated coefficients, not the conjugate function).
    pub fn conj_coeffs(&self) -> LaurentPoly {
        LaurentPoly {
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    /// The polynomial q(z) = p(-z).
    pub fn negate_z(&self) -> LaurentPoly {
        LaurentPoly {
            lo: self.lo,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    let e = self.lo + k as i64;
                    if e.rem_euclid(2) == 1 {
                        -c
                    } else {
                        *c
                    }
                })
                .collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> LaurentPoly {
        LaurentPoly {
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Distance to another polynomial relative to the larger coefficient scale.
    pub fn rel_distance(&self, other: &LaurentPoly) -> f64 {
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let scale = self.max_coeff().max(other.max_coeff()).max(1e-300);
        let mut worst = 0.0f64;
        for e in lo..=hi {
            let d = (self.coeff(e) - other.coeff(e)).norm() / scale;
            worst = worst.max(d);
        }
        worst
    }

    pub fn terms(&self) -> Vec<PolyTerm> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(k, c)| PolyTerm {
                i: self.lo + k as i64,
                j: 0,
                re: c.re,
                im: c.im,
            })
            .collect()
    }
}

/// Two-variable real Laurent polynomial on a dense exponent window.
#[derive(Clone, Debug, PartialEq)]
pub struct BiLaurentPoly {
    pub lo_i: i64,
    pub lo_j: i64,
    pub ni: usize,
    pub nj: usize,
    /// row-major: coeff of z^(lo_i + r) w^(lo_j + c) at r * nj + c
    pub coeffs: Vec<f64>,
}

impl BiLaurentPoly {
    pub fn constant(c: f64) -> Self {
        BiLaurentPoly {
            lo_i: 0,
            lo_j: 0,
            ni: 1,
            nj: 1,
            coeffs: vec![c],
        }
    }

    pub fn coeff(&self, i: i64, j: i64) -> f64 {
        let r = i - self.lo_i;
        let c = j - self.lo_j;
        if r < 0 || c < 0 || r >= self.ni as i64 || c >= self.nj as i64 {
            0.0
        } else {
            self.coeffs[r as usize * self.nj + c as usize]
        }
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64, w: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for r in (0..self.ni).rev() {
            let mut row = Complex64::new(0.0, 0.0);
            for c in (0..self.nj).rev() {
                row = row * w + self.coeffs[r * self.nj + c];
            }
            acc = acc * z + row;
        }
        acc * z.powi(self.lo_i as i32) * w.powi(self.lo_j as i32)
    }

    /// Partial derivative values at a point, computed from coefficients.
    pub fn d_dz(&self, z: Complex64, w: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..self.ni {
            let e = self.lo_i + r as i64;
            if e == 0 {
                continue;
            }
            let mut row = Complex64::new(0.0, 0.0);
            for c in (0..self.nj).rev() {
                row = row * w + self.coeffs[r * self.nj + c];
            }
            acc += row * (e as f64) * z.powi((e - 1) as i32);
        }
        acc * w.powi(self.lo_j as i32)
    }

    pub fn d_dw(&self, z: Complex64, w: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in 0..self.nj {
            let f = self.lo_j + c as i64;
            if f == 0 {
                continue;
            }
            let mut col = Complex64::new(0.0, 0.0);
            for r in (0..self.ni).rev() {
                col = col * z + self.coeffs[r * self.nj + c];
            }
            acc += col * (f as f64) * w.powi((f - 1) as i32);
        }
        acc * z.powi(self.lo_i as i32)
    }

    pub fn d2_dz2(&self, z: Complex64, w: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..self.ni {
            let e = self.lo_i + r as i64;
            if e == 0 || e == 1 {
                continue;
            }
            for c in 0..self.nj {
                let f = self.lo_j + c as i64;
                acc += self.coeffs[r * self.nj + c]
                    * (e as f64)
                    * ((e - 1) as f64)
                    * z.powi((e - 2) as i32)
                    * w.powi(f as i32);
            }
        }
        acc
    }

    pub fn d2_dw2(&self, z: Complex64, w: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..self.ni {
            let e = self.lo_i + r as i64;
            for c in 0..self.nj {
                let f = self.lo_j + c as i64;
                if f == 0 || f == 1 {
                    continue;
                }
                acc += self.coeffs[r * self.nj + c]
                    * (f as f64)
                    * ((f - 1) as f64)
                    * z.powi(e as i32)
                    * w.powi((f - 2) as i32);
            }
        }
        acc
    }

    pub fn d2_dzdw(&self, z: Complex64, w: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..self.ni {
            let e = self.lo_i + r as i64;
            if e == 0 {
                continue;
            }
            for c in 0..self.nj {
                let f = self.lo_j + c as i64;
                if f == 0 {
                    continue;
                }
                acc += self.coeffs[r * self.nj + c]
                    * (e as f64)
                    * (f as f64)
                    * z.powi((e - 1) as i32)
                    * w.powi((f - 1) as i32);
            }
        }
        acc
    }

    /// Restriction to fixed `z`, as a Laurent polynomial in `w`.
    pub fn slice_z(&self, z: Complex64) -> LaurentPoly {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.nj];
        for c in 0..self.nj {
            let mut acc = Complex64::new(0.0, 0.0);
            for r in (0..self.ni).rev() {
                acc = acc * z + self.coeffs[r * self.nj + c];
            }
            coeffs[c] = acc * z.powi(self.lo_i as i32);
        }
        LaurentPoly::from_coeffs(self.lo_j, coeffs)
    }

    /// Coefficientwise check of the symmetry under `w -> 1/w`.
    pub fn w_symmetric(&self, tol: f64) -> bool {
        let scale = self.max_coeff().max(1e-300);
        for r in 0..self.ni {
            for c in 0..self.nj {
                let i = self.lo_i + r as i64;
                let j = self.lo_j + c as i64;
                if (self.coeffs[r * self.nj + c] - self.coeff(i, -j)).abs() > tol * scale {
                    return false;
                }
            }
        }
        true
    }

    /// Area of the Newton polygon (convex hull of nonzero exponents).
    pub fn newton_polygon_area(&self) -> f64 {
        let scale = self.max_coeff();
        let mut pts: Vec<(f64, f64)> = Vec::new();
        for r in 0..self.ni {
            for c in 0..self.nj {
                if self.coeffs[r * self.nj + c].abs() > PRUNE_TOL * scale {
                    pts.push(((self.lo_i + r as i64) as f64, (self.lo_j + c as i64) as f64));
                }
            }
        }
        convex_hull_area(&mut pts)
    }

    pub fn terms(&self) -> Vec<PolyTerm> {
        let scale = self.max_coeff();
        let mut out = Vec::new();
        for r in 0..self.ni {
            for c in 0..self.nj {
                let v = self.coeffs[r * self.nj + c];
                if v.abs() > PRUNE_TOL * scale {
                    out.push(PolyTerm {
                        i: self.lo_i + r as i64,
                        j: self.lo_j + c as i64,
                        re: v,
                        im: 0.0,
                    });
                }
            }
        }
        out
    }
}

/// JSON-serializable polynomial term.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyTerm {
    pub i: i64,
    pub j: i64,
    pub re: f64,
    pub im: f64,
}

fn convex_hull_area(pts: &mut Vec<(f64, f64)>) -> f64 {
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.len() < 3 {
        return 0.0;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter() {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev() {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    let mut area2 = 0.0;
    for k in 0..hull.len() {
        let (x1, y1) = hull[k];
        let (x2, y2) = hull[(k + 1) % hull.len()];
        area2 += x1 * y2 - x2 * y1;
    }
    area2.abs() / 2.0
}

/// Deterministic quasi-random unit-circle points (golden-angle sequence).
pub fn test_circle_points(count: usize) -> Vec<Complex64> {
    let golden = 0.618_033_988_749_894_9_f64;
    (1..=count)
        .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * ((k as f64 * golden) % 1.0)))
        .collect()
}

fn total_b(g: &EmbeddedGraph) -> usize {
    g.edges.iter().map(|e| e.b.unsigned_abs() as usize).sum()
}

fn total_a(g: &EmbeddedGraph) -> usize {
    g.edges.iter().map(|e| e.a.unsigned_abs() as usize).sum()
}

/// Interpolate a Laurent polynomial with window `[-l, l]` from evaluations
/// of `f` at `2l+1` offset roots of unity; verifies the fit at fresh points.
fn interpolate_1d<F: Fn(Complex64) -> Complex64>(l: usize, f: F) -> Result<LaurentPoly> {
    let n = 2 * l + 1;
    let offset = std::f64::consts::PI / (2.0 * n as f64);
    let points: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(1.0, offset + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    let values: Vec<Complex64> = points.iter().map(|&z| f(z)).collect();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for (idx, e) in (-(l as i64)..=(l as i64)).enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &z) in points.iter().enumerate() {
            acc += values[k] * z.powi(-e as i32);
        }
        coeffs[idx] = acc / n as f64;
    }
    let poly = LaurentPoly::from_coeffs(-(l as i64), coeffs);
    // residual check at fresh points
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    let mut worst = 0.0f64;
    for z in test_circle_points(8) {
        let r = (poly.eval(z) - f(z)).norm() / scale;
        worst = worst.max(r);
    }
    if worst > RESIDUAL_TOL {
        return Err(KleinError::InterpolationResidual {
            residual: worst,
            tol: RESIDUAL_TOL,
        });
    }
    Ok(poly)
}

/// Extract `R(z, 1)` and `R(z, -1)`, the determinants of the twisted
/// Kasteleyn matrix, by evaluation and inverse DFT.
pub fn extract_r(g: &EmbeddedGraph, orient: &Orientation) -> Result<(LaurentPoly, LaurentPoly)> {
    if g.surface != Surface::Klein {
        return Err(KleinError::BadArgument("extract_r expects a Klein graph".into()));
    }
    let l = total_b(g);
    let r1 = interpolate_1d(l, |z| klein_matrix(g, orient, z, 1.0).unwrap().det())?;
    let rm1 = interpolate_1d(l, |z| klein_matrix(g, orient, z, -1.0).unwrap().det())?;
    Ok((r1, rm1))
}

/// Extract the bipartite block determinant `S(z, ±1)` (raw gauge: satisfies
/// `R = S(z,w) S(1/z,w)` exactly).
pub fn extract_s(g: &EmbeddedGraph, orient: &Orientation) -> Result<(LaurentPoly, LaurentPoly)> {
    if g.colors.is_none() {
        return Err(KleinError::BadArgument("extract_s needs a bipartite graph".into()));
    }
    let l = total_b(g);
    let s1 = interpolate_1d(l, |z| {
        let m = klein_matrix(g, orient, z, 1.0).unwrap();
        bipartite_block(g, &m).unwrap().det()
    })?;
    let sm1 = interpolate_1d(l, |z| {
        let m = klein_matrix(g, orient, z, -1.0).unwrap();
        bipartite_block(g, &m).unwrap().det()
    })?;
    Ok((s1, sm1))
}

fn interpolate_2d<F: Fn(Complex64, Complex64) -> Complex64 + Sync>(
    lz: usize,
    lw: usize,
    f: F,
) -> Result<BiLaurentPoly> {
    let n = 2 * lz + 1;
    let m = 2 * lw + 1;
    let offz = std::f64::consts::PI / (2.0 * n as f64);
    let offw = std::f64::consts::PI / (2.0 * m as f64) * 0.7; // distinct offsets
    let zs: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(1.0, offz + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    let ws: Vec<Complex64> = (0..m)
        .map(|k| Complex64::from_polar(1.0, offw + 2.0 * std::f64::consts::PI * k as f64 / m as f64))
        .collect();
    let values: Vec<Complex64> = crate::thread_pool().install(|| {
        use rayon::prelude::*;
        (0..n * m)
            .into_par_iter()
            .map(|idx| f(zs[idx / m], ws[idx % m]))
            .collect()
    });
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    // inverse DFT in two stages: first over w, then over z
    let mut row_coeffs = vec![Complex64::new(0.0, 0.0); n * m];
    for k in 0..n {
        for (jdx, fexp) in (-(lw as i64)..=(lw as i64)).enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (l, &w) in ws.iter().enumerate() {
                acc += values[k * m + l] * w.powi(-fexp as i32);
            }
            row_coeffs[k * m + jdx] = acc / m as f64;
        }
    }
    let mut coeffs = vec![0.0f64; n * m];
    let mut imag_worst = 0.0f64;
    for (idx, eexp) in (-(lz as i64)..=(lz as i64)).enumerate() {
        for jdx in 0..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, &z) in zs.iter().enumerate() {
                acc += row_coeffs[k * m + jdx] * z.powi(-eexp as i32);
            }
            acc /= n as f64;
            imag_worst = imag_worst.max(acc.im.abs() / scale);
            coeffs[idx * m + jdx] = acc.re;
        }
    }
    if imag_worst > RESIDUAL_TOL {
        return Err(KleinError::InterpolationResidual {
            residual: imag_worst,
            tol: RESIDUAL_TOL,
        });
    }
    let poly = BiLaurentPoly {
        lo_i: -(lz as i64),
        lo_j: -(lw as i64),
        ni: n,
        nj: m,
        coeffs,
    };
    let mut worst = 0.0f64;
    let pts = test_circle_points(6);
    for &z in &pts {
        for &w in &pts {
            let r = (poly.eval(z, w) - f(z, w)).norm() / scale;
            worst = worst.max(r);
        }
    }
    if worst > RESIDUAL_TOL {
        return Err(KleinError::InterpolationResidual {
            residual: worst,
            tol: RESIDUAL_TOL,
        });
    }
    Ok(poly)
}

/// Extract the toric characteristic polynomial `P(z, w) = det A~(z, w)`.
pub fn extract_p(gt: &EmbeddedGraph, orient: &Orientation) -> Result<BiLaurentPoly> {
    if gt.surface != Surface::Torus {
        return Err(KleinError::BadArgument("extract_p expects a torus graph".into()));
    }
    interpolate_2d(total_b(gt), total_a(gt), |z, w| {
        torus_matrix(gt, orient, z, w).unwrap().det()
    })
}

/// Extract the bipartite toric polynomial `Q(z, w)` (block determinant).
pub fn extract_q(gt: &EmbeddedGraph, orient: &Orientation) -> Result<BiLaurentPoly> {
    if gt.colors.is_none() {
        return Err(KleinError::BadArgument("extract_q needs a bipartite graph".into()));
    }
    interpolate_2d(total_b(gt), total_a(gt), |z, w| {
        let m = torus_matrix(gt, orient, z, w).unwrap();
        bipartite_block(gt, &m).unwrap().det()
    })
}

/// Gauge-normalised bipartite polynomials, following the legal gauge moves:
/// when the raw block determinant satisfies `S(-z,w) = -conj S(z,w)`, the
/// curve-deformation move `S(z,w) -> i S(z,-w)` (which swaps the two
/// w-slices) restores the `+` sign. The sign of `Q` is then fixed so that
/// `Q(z^2, ±1) = S(z, ±1) S(-z, ±1)`.
pub struct BipartiteGauge {
    pub s1: LaurentPoly,
    pub sm1: LaurentPoly,
    pub q: BiLaurentPoly,
    /// true when the w-slices were exchanged by the gauge move
    pub swapped: bool,
}

pub fn normalize_bipartite(
    s1: &LaurentPoly,
    sm1: &LaurentPoly,
    q: &BiLaurentPoly,
) -> Result<BipartiteGauge> {
    let factor = |s: &LaurentPoly| -> Result<Complex64> {
        let neg = s.negate_z();
        let conj = s.conj_coeffs();
        if neg.rel_distance(&conj) < 1e-8 {
            Ok(Complex64::new(1.0, 0.0))
        } else if neg.rel_distance(&conj.scale(Complex64::new(-1.0, 0.0))) < 1e-8 {
            Ok(Complex64::new(0.0, 1.0))
        } else {
            Err(KleinError::BadArgument(
                "S does not satisfy the conjugation symmetry up to sign".into(),
            ))
        }
    };
    let c1 = factor(s1)?;
    let cm1 = factor(sm1)?;
    // S(z,w) is a single object: both slices must take the same factor. A
    // zero polynomial accepts either.
    let c = if s1.is_zero() {
        cm1
    } else if sm1.is_zero() || c1 == cm1 {
        c1
    } else {
        return Err(KleinError::BadArgument(
            "inconsistent conjugation gauge between S(z,1) and S(z,-1)".into(),
        ));
    };
    let swapped = c == Complex64::new(0.0, 1.0);
    let (s1n, sm1n) = if swapped {
        (sm1.scale(c), s1.scale(c))
    } else {
        (s1.clone(), sm1.clone())
    };
    // fix the sign of Q from one generic point
    let z = Complex64::from_polar(1.0, 0.734);
    let mut q_norm = q.clone();
    let probe = |s: &LaurentPoly, w: f64| -> Complex64 {
        s.eval(z) * s.eval(-z) / q.eval(z * z, Complex64::new(w, 0.0))
    };
    let ratio = if !s1n.is_zero() {
        probe(&s1n, 1.0)
    } else {
        probe(&sm1n, -1.0)
    };
    if (ratio - Complex64::new(-1.0, 0.0)).norm() < 1e-6 {
        for v in q_norm.coeffs.iter_mut() {
            *v = -*v;
        }
    } else if (ratio - Complex64::new(1.0, 0.0)).norm() >= 1e-6 {
        return Err(KleinError::BadArgument(format!(
            "Q is not ± the square-root factorization of S (ratio {ratio})"
        )));
    }
    Ok(BipartiteGauge {
        s1: s1n,
        sm1: sm1n,
        q: q_norm,
        swapped,
    })
}

/// Polynomial identity report entry.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub max_rel_error: f64,
    pub pass: bool,
}

/// All extracted polynomials of a graph in one bundle.
pub struct CharPolys {
    pub r1: LaurentPoly,
    pub rm1: LaurentPoly,
    pub p: BiLaurentPoly,
    pub s: Option<(LaurentPoly, LaurentPoly)>,
    pub q: Option<BiLaurentPoly>,
}

/// Extract R, P and (for bipartite inputs) raw S and Q for a Klein graph
/// with a condition-(i) orientation.
pub fn char_polys(g: &EmbeddedGraph, orient: &Orientation) -> Result<CharPolys> {
    let (r1, rm1) = extract_r(g, orient)?;
    let mut cover = g.clone();
    cover.orientation = Some(orient.0.clone());
    let cover = crate::graph::orientation_cover(&cover)?;
    let co = Orientation::from_graph(&cover).unwrap();
    let p = extract_p(&cover, &co)?;
    let (s, q) = if g.colors.is_some() {
        let s = extract_s(g, orient)?;
        let q = extract_q(&cover, &co)?;
        (Some(s), Some(q))
    } else {
        (None, None)
    };
    Ok(CharPolys { r1, rm1, p, s, q })
}

/// Run the polynomial identity suite at 32 deterministic unit-circle points
/// with tolerance 1e-9 relative.
pub fn poly_identity_suite(g: &EmbeddedGraph, orient: &Orientation) -> Result<Vec<IdentityCheck>> {
    let polys = char_polys(g, orient)?;
    let pts = test_circle_points(32);
    let mut checks = Vec::new();
    let tol = 1e-9;

    let mut record = |name: &str, err: f64| {
        checks.push(IdentityCheck {
            name: name.to_string(),
            max_rel_error: err,
            pass: err < tol,
        });
    };

    // R(-z, w) = conj coefficients of R(z, w)
    for (tag, r) in [("R(.,1)", &polys.r1), ("R(.,-1)", &polys.rm1)] {
        let err = r.negate_z().rel_distance(&r.conj_coeffs());
        record(&format!("{tag}: R(-z) = conj R(z)"), err);
    }
    // P(z, w) = P(z, 1/w)
    record(
        "P(z,w) = P(z,1/w)",
        if polys.p.w_symmetric(tol) { 0.0 } else { 1.0 },
    );
    // R(z^(1/2), w) R(-z^(1/2), w) = P(z, w) at w = ±1
    let scale_p = polys.p.max_coeff().max(1e-300);
    for (wv, r) in [(1.0, &polys.r1), (-1.0, &polys.rm1)] {
        let mut worst = 0.0f64;
        for &zh in &pts {
            let lhs = r.eval(zh) * r.eval(-zh);
            let rhs = polys.p.eval(zh * zh, Complex64::new(wv, 0.0));
            worst = worst.max((lhs - rhs).norm() / scale_p);
        }
        record(&format!("R(z')R(-z') = P(z'^2,{wv})"), worst);
    }
    // P(1, w) = |R(±1, w)|^2
    for (wv, r) in [(1.0, &polys.r1), (-1.0, &polys.rm1)] {
        let p11 = polys.p.eval(Complex64::new(1.0, 0.0), Complex64::new(wv, 0.0));
        let mut worst = 0.0f64;
        for sgn in [1.0, -1.0] {
            let rv = r.eval(Complex64::new(sgn, 0.0));
            worst = worst.max((p11 - Complex64::new(rv.norm_sqr(), 0.0)).norm() / scale_p);
        }
        record(&format!("P(1,{wv}) = |R(±1,{wv})|²"), worst);
    }
    if let (Some((s1, sm1)), Some(q)) = (&polys.s, &polys.q) {
        // R = S(z,w) S(1/z,w)
        for (tag, r, s) in [("w=1", &polys.r1, s1), ("w=-1", &polys.rm1, sm1)] {
            let scale = polys.r1.max_coeff().max(polys.rm1.max_coeff()).max(1e-300);
            let mut worst = 0.0f64;
            for &z in &pts {
                let lhs = s.eval(z) * s.eval(1.0 / z);
                worst = worst.max((lhs - r.eval(z)).norm() / scale);
            }
            record(&format!("R = S(z)S(1/z) [{tag}]"), worst);
        }
        // P = Q(z,w) Q(1/z,1/w)
        let mut worst = 0.0f64;
        for &z in &pts {
            for &w in pts.iter().take(5) {
                let lhs = q.eval(z, w) * q.eval(1.0 / z, 1.0 / w);
                worst = worst.max((lhs - polys.p.eval(z, w)).norm() / scale_p);
            }
        }
        record("P = Q(z,w)Q(1/z,1/w)", worst);
        // normalized gauge: Q(z^2,±1) = S(z)S(-z), |S|^2 = Q on the circle
        let gauge = normalize_bipartite(s1, sm1, q)?;
        for (wv, s) in [(1.0, &gauge.s1), (-1.0, &gauge.sm1)] {
            let mut worst = 0.0f64;
            for &z in &pts {
                let lhs = s.eval(z) * s.eval(-z);
                let rhs = gauge.q.eval(z * z, Complex64::new(wv, 0.0));
                worst = worst.max((lhs - rhs).norm() / scale_p);
                let habs = (s.eval(z).norm_sqr()
                    - gauge.q.eval(z * z, Complex64::new(wv, 0.0)).re)
                    .abs();
                worst = worst.max(habs / scale_p);
            }
            record(&format!("Q(z²,{wv}) = S(z)S(-z), |S|² = Q"), worst);
        }
    }
    Ok(checks)
}
