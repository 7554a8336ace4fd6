//! Jacobi theta functions, the Dedekind eta function, and the finite-size
//! kernel built from them.
//!
//! The shape parameters arising here are purely imaginary with imaginary
//! part bounded away from zero by the aspect-ratio guard, so plain series
//! summation converges geometrically; below `tau_im = 0.05` a single modular
//! transformation `tau -> -1/tau` is applied first.

use crate::{KleinError, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

const TRUNC_TOL: f64 = 1e-16;
const MODULAR_CUTOFF: f64 = 0.05;

fn require_upper_half(tau: Complex64) -> Result<()> {
    if !(tau.im > 0.0) {
        return Err(KleinError::BadArgument(format!(
            "tau must lie in the upper half plane, got {tau}"
        )));
    }
    Ok(())
}

/// theta(nu | tau) = sum_j exp(pi i (j^2 tau + 2 j nu)), the 00 theta.
pub fn theta(nu: Complex64, tau: Complex64) -> Result<Complex64> {
    require_upper_half(tau)?;
    if tau.im < MODULAR_CUTOFF {
        // theta(nu|tau) = (-i tau)^(-1/2) exp(-pi i nu^2 / tau) theta(nu/tau | -1/tau)
        let it = (-Complex64::i() * tau).sqrt();
        let pref = (Complex64::i() * PI * (-nu * nu / tau)).exp() / it;
        return Ok(pref * theta_series(nu / tau, -1.0 / tau));
    }
    Ok(theta_series(nu, tau))
}

fn theta_series(nu: Complex64, tau: Complex64) -> Complex64 {
    let mut sum = Complex64::new(1.0, 0.0); // j = 0 term
    let mut j = 1i64;
    loop {
        let jj = (j * j) as f64;
        let t1 = (Complex64::i() * PI * (jj * tau + 2.0 * j as f64 * nu)).exp();
        let t2 = (Complex64::i() * PI * (jj * tau - 2.0 * j as f64 * nu)).exp();
        sum += t1 + t2;
        if t1.norm() + t2.norm() < TRUNC_TOL * sum.norm().max(1e-300) || j > 10_000 {
            break;
        }
        j += 1;
    }
    sum
}

/// theta_01(nu | tau) = theta(nu + 1/2 | tau).
pub fn theta01(nu: Complex64, tau: Complex64) -> Result<Complex64> {
    theta(nu + 0.5, tau)
}

/// theta_10(nu | tau) = exp(pi i (nu + tau/4)) theta(nu + tau/2 | tau).
pub fn theta10(nu: Complex64, tau: Complex64) -> Result<Complex64> {
    let pref = (Complex64::i() * PI * (nu + tau / 4.0)).exp();
    Ok(pref * theta(nu + tau / 2.0, tau)?)
}

/// theta_11(nu | tau) = i exp(pi i (nu + tau/4)) theta(nu + tau/2 + 1/2 | tau).
pub fn theta11(nu: Complex64, tau: Complex64) -> Result<Complex64> {
    let pref = Complex64::i() * (Complex64::i() * PI * (nu + tau / 4.0)).exp();
    Ok(pref * theta(nu + tau / 2.0 + 0.5, tau)?)
}

/// Dedekind eta: exp(pi i tau / 12) prod_{j >= 1} (1 - exp(2 pi i j tau)).
pub fn eta(tau: Complex64) -> Result<Complex64> {
    require_upper_half(tau)?;
    if tau.im < MODULAR_CUTOFF {
        // eta(tau) = eta(-1/tau) / sqrt(-i tau)
        let it = (-Complex64::i() * tau).sqrt();
        return Ok(eta_product(-1.0 / tau) / it);
    }
    Ok(eta_product(tau))
}

fn eta_product(tau: Complex64) -> Complex64 {
    let mut prod = (Complex64::i() * PI * tau / 12.0).exp();
    let q = (2.0 * PI * Complex64::i() * tau).exp();
    let mut qj = q;
    for _ in 1..100_000 {
        prod *= Complex64::new(1.0, 0.0) - qj;
        if qj.norm() < TRUNC_TOL {
            break;
        }
        qj *= q;
    }
    prod
}

/// The positive kernel
/// `Xi(-exp(2 pi i phi), -exp(2 pi i psi) | tau)
///   = | theta(phi tau - psi | tau) exp(pi i tau phi^2) / eta(tau) |`.
pub fn xi(phi: f64, psi: f64, tau: Complex64) -> Result<f64> {
    let nu = tau * phi - Complex64::new(psi, 0.0);
    let t = theta(nu, tau)?;
    let damp = (Complex64::i() * PI * tau * phi * phi).exp();
    Ok((t * damp / eta(tau)?).norm())
}

/// `Xi` with general unit-modulus arguments `u = -exp(2 pi i phi)`,
/// `v = -exp(2 pi i psi)`.
pub fn xi_args(u: Complex64, v: Complex64, tau: Complex64) -> Result<f64> {
    let phi = (-u).arg() / (2.0 * PI);
    let psi = (-v).arg() / (2.0 * PI);
    xi(phi, psi, tau)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn theta_is_even_in_nu() {
        let tau = c(0.0, 1.0);
        let a = theta(c(0.3, 0.0), tau).unwrap();
        let b = theta(c(-0.3, 0.0), tau).unwrap();
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn theta_periodic_in_nu() {
        let tau = c(0.0, 0.8);
        let a = theta(c(0.37, 0.0), tau).unwrap();
        let b = theta(c(1.37, 0.0), tau).unwrap();
        assert!((a - b).norm() < 1e-12 * a.norm());
    }

    #[test]
    fn eta_at_i() {
        // eta(i) = Gamma(1/4) / (2 pi^(3/4)) = 0.768225422326...
        let v = eta(c(0.0, 1.0)).unwrap();
        assert!((v.re - 0.7682254223260566).abs() < 1e-12, "{v}");
        assert!(v.im.abs() < 1e-14);
    }

    #[test]
    fn eta_positive_on_imaginary_axis() {
        for t in [0.1, 0.5, 1.0, 3.0, 10.0] {
            let v = eta(c(0.0, t)).unwrap();
            assert!(v.re > 0.0 && v.im.abs() < 1e-13 * v.re);
        }
    }

    #[test]
    fn triple_product_identity() {
        // 2 eta^3 = theta00(0) theta10(0) theta01(0)
        for t in [0.1, 0.5, 1.0, 2.0, 10.0] {
            let tau = c(0.0, t);
            let zero = c(0.0, 0.0);
            let lhs = 2.0 * eta(tau).unwrap().powu(3);
            let rhs = theta(zero, tau).unwrap()
                * theta10(zero, tau).unwrap()
                * theta01(zero, tau).unwrap();
            assert!((lhs - rhs).norm() < 1e-12 * lhs.norm(), "tau={tau}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn double_argument_identity() {
        // theta00(tau) theta01(tau) / eta^2(tau) = theta01(2 tau) / eta(2 tau)
        for t in [0.1, 0.5, 1.0, 2.0, 10.0] {
            let tau = c(0.0, t);
            let zero = c(0.0, 0.0);
            let lhs = theta(zero, tau).unwrap() * theta01(zero, tau).unwrap()
                / eta(tau).unwrap().powu(2);
            let rhs = theta01(zero, 2.0 * tau).unwrap() / eta(2.0 * tau).unwrap();
            assert!((lhs - rhs).norm() < 1e-12 * lhs.norm());
        }
    }

    #[test]
    fn truncation_stability() {
        // doubling the effective depth by evaluating at tau and comparing
        // against the modular-transformed value
        for t in [0.06, 0.3, 1.7, 19.0] {
            let tau = c(0.0, t);
            let direct = theta_series(c(0.21, 0.0), tau);
            let via = theta(c(0.21, 0.0), tau).unwrap();
            assert!((direct - via).norm() < 1e-13 * direct.norm().max(1.0));
        }
    }

    #[test]
    fn xi_specialisations() {
        let tau = c(0.0, 1.3);
        // phi = 0: Xi = theta(psi|tau)/eta(tau) > 0
        let v = xi(0.0, 0.27, tau).unwrap();
        let expect = (theta(c(0.27, 0.0), tau).unwrap() / eta(tau).unwrap()).norm();
        assert!((v - expect).abs() < 1e-13 * expect);
        assert!(v > 0.0);
        // psi = 1/2 at phi = 0 gives theta01(0)/eta
        let v = xi(0.0, 0.5, tau).unwrap();
        let expect = (theta01(c(0.0, 0.0), tau).unwrap() / eta(tau).unwrap()).norm();
        assert!((v - expect).abs() < 1e-13 * expect);
    }

    #[test]
    fn xi_large_tau_asymptotics() {
        // log Xi(-1,-1|tau) - pi tau_im / 12 -> 0
        let tau = c(0.0, 40.0);
        let v = xi(0.0, 0.0, tau).unwrap().ln();
        assert!((v - PI * 40.0 / 12.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_lower_half_plane() {
        assert!(theta(c(0.0, 0.0), c(0.0, -1.0)).is_err());
        assert!(eta(c(0.1, 0.0)).is_err());
    }
}
