//! Dense complex linear algebra: just enough for determinant evaluation.
//!
//! Kasteleyn matrices in this crate stay small (at most a few hundred rows),
//! so a dense LU with partial pivoting is sufficient and keeps the crate free
//! of BLAS bindings. Determinants are accumulated in log-modulus/argument
//! form so that products over many pivots cannot overflow.

use num_complex::Complex64;

/// Square dense complex matrix in row-major storage.
#[derive(Clone, Debug)]
pub struct CMatrix {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] += v;
    }

    /// Determinant as (log-modulus, argument). Returns `(f64::NEG_INFINITY, 0)`
    /// for a singular matrix.
    pub fn det_log(&self) -> (f64, f64) {
        let n = self.n;
        if n == 0 {
            return (0.0, 0.0);
        }
        let mut a = self.data.clone();
        let mut log_mod = 0.0f64;
        let mut arg = 0.0f64;
        let mut sign_flips = 0usize;
        for k in 0..n {
            // partial pivot
            let mut piv = k;
            let mut best = a[k * n + k].norm_sqr();
            for i in (k + 1)..n {
                let m = a[i * n + k].norm_sqr();
                if m > best {
                    best = m;
                    piv = i;
                }
            }
            if best == 0.0 {
                return (f64::NEG_INFINITY, 0.0);
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                sign_flips += 1;
            }
            let pivot = a[k * n + k];
            log_mod += pivot.norm().ln();
            arg = wrap_angle(arg + pivot.arg());
            for i in (k + 1)..n {
                let factor = a[i * n + k] / pivot;
                if factor.norm_sqr() == 0.0 {
                    continue;
                }
                for j in (k + 1)..n {
                    let akj = a[k * n + j];
                    a[i * n + j] -= factor * akj;
                }
            }
        }
        if sign_flips % 2 == 1 {
            arg = wrap_angle(arg + std::f64::consts::PI);
        }
        (log_mod, arg)
    }

    /// Determinant as a plain complex number.
    pub fn det(&self) -> Complex64 {
        let (lm, arg) = self.det_log();
        if lm == f64::NEG_INFINITY {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(lm.exp(), arg)
    }
}

/// Wrap an angle into (-pi, pi].
#[inline]
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::PI;
    let mut x = a % (2.0 * PI);
    if x <= -PI {
        x += 2.0 * PI;
    } else if x > PI {
        x -= 2.0 * PI;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_2x2() {
        let mut m = CMatrix::zeros(2);
        m.add(0, 0, Complex64::new(1.0, 0.0));
        m.add(0, 1, Complex64::new(2.0, 0.0));
        m.add(1, 0, Complex64::new(3.0, 0.0));
        m.add(1, 1, Complex64::new(4.0, 0.0));
        let d = m.det();
        assert!((d - Complex64::new(-2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn det_complex_diag() {
        let mut m = CMatrix::zeros(3);
        m.add(0, 0, Complex64::new(0.0, 1.0));
        m.add(1, 1, Complex64::new(0.0, 1.0));
        m.add(2, 2, Complex64::new(2.0, 0.0));
        let d = m.det();
        assert!((d - Complex64::new(-2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn singular() {
        let mut m = CMatrix::zeros(2);
        m.add(0, 0, Complex64::new(1.0, 0.0));
        m.add(0, 1, Complex64::new(1.0, 0.0));
        m.add(1, 0, Complex64::new(1.0, 0.0));
        m.add(1, 1, Complex64::new(1.0, 0.0));
        assert_eq!(m.det_log().0, f64::NEG_INFINITY);
    }

    #[test]
    fn permutation_sign() {
        // 2x2 anti-diagonal: det = -1 exercises the pivot sign bookkeeping.
        let mut m = CMatrix::zeros(2);
        m.add(0, 1, Complex64::new(1.0, 0.0));
        m.add(1, 0, Complex64::new(1.0, 0.0));
        assert!((m.det() - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }
}
