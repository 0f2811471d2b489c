//! Cosine-transform/Bessel identity for truncated power kernels.
//!
//! For dimension d and order `nu` strictly inside the strip
//! `(d-1)/2 < nu < d/2`, the oscillatory integral
//!
//!   I(s, z) = int_z^inf t (t^2 - z^2)^{nu + (1-d)/2 - 1} cos(st) dt
//!
//! is conditionally convergent, and
//!
//!   2^{-2 nu + 1} / (pi^{(d+1)/2} Gamma(nu + (1-d)/2)) * I(s, z)
//!     = pi^{-d/2} 2^{-nu - d/2} s^{d - 2 nu - 1} J_{d/2-1-nu}(s z) / (s z)^{d/2-1-nu}.
//!
//! The left side is evaluated by dyadic refinement at the endpoint
//! singularity plus half-period segmentation with Euler acceleration of the
//! alternating tail; the right side comes from the Bessel module. Outside
//! the strip the integral is no longer a function and is not handled here.

use statrs::function::gamma::gamma;

use super::bessel::bessel_j;
use super::quad::{integrate_endpoint_singular, oscillatory_cosine_tail};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct EnuIdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
}

pub fn verify_enu_identity(d: usize, nu: f64, z_abs: f64, s: f64) -> Result<EnuIdentityCheck> {
    if !(1..=4).contains(&d) {
        return Err(Error::UnsupportedDimension(d));
    }
    let df = d as f64;
    if !(nu > (df - 1.0) / 2.0 && nu < df / 2.0) {
        return Err(Error::InvalidParameter(format!(
            "order {nu} outside the strip (({}-1)/2, {}/2)",
            d, d
        )));
    }
    if !(z_abs > 0.0 && s > 0.0) {
        return Err(Error::InvalidParameter(
            "both s and |z| must be positive".into(),
        ));
    }
    if s * z_abs > 100.0 {
        return Err(Error::InvalidParameter(
            "s * |z| must not exceed 100".into(),
        ));
    }

    // alpha in (-1, -1/2): integrable endpoint singularity at t = z. The
    // singular factor (t-z)^alpha is split off; the remaining part of the
    // integrand is smooth on [z, t0].
    let alpha = nu + (1.0 - df) / 2.0 - 1.0;
    let z2 = z_abs * z_abs;
    let smooth_part = move |t: f64| t * (t + z_abs).powf(alpha) * (s * t).cos();

    // Head: [z, t0] with t0 the second cosine zero past z.
    let first_zero_idx =
        ((z_abs * s - std::f64::consts::FRAC_PI_2) / std::f64::consts::PI).ceil() as i64;
    let t0 = (std::f64::consts::FRAC_PI_2
        + (first_zero_idx.max(0) + 1) as f64 * std::f64::consts::PI)
        / s;
    let head = integrate_endpoint_singular(&smooth_part, z_abs, t0, alpha, 1e-12)?;

    // Oscillatory tail with Euler acceleration; g decays like t^{2 nu - d}.
    let g = move |t: f64| t * (t * t - z2).powf(alpha);
    let tail = oscillatory_cosine_tail(&g, s, t0, 1e-12 * head.abs().max(1.0), 200)?;

    let c_lhs = 2.0f64.powf(-2.0 * nu + 1.0)
        / (std::f64::consts::PI.powf((df + 1.0) / 2.0) * gamma(nu + (1.0 - df) / 2.0));
    let lhs = c_lhs * (head + tail);

    let beta = df / 2.0 - 1.0 - nu;
    let rhs = std::f64::consts::PI.powf(-df / 2.0)
        * 2.0f64.powf(-nu - df / 2.0)
        * s.powf(df - 2.0 * nu - 1.0)
        * bessel_j(beta, s * z_abs)?
        / (s * z_abs).powf(beta);

    Ok(EnuIdentityCheck {
        lhs,
        rhs,
        rel_err: (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_holds_d3() {
        let check = verify_enu_identity(3, 1.2, 1.0, 2.0).unwrap();
        assert!(
            check.rel_err <= 1e-3,
            "lhs {} rhs {} rel {}",
            check.lhs,
            check.rhs,
            check.rel_err
        );
    }

    #[test]
    fn identity_holds_d2() {
        let check = verify_enu_identity(2, 0.75, 0.5, 1.0).unwrap();
        assert!(
            check.rel_err <= 1e-3,
            "lhs {} rhs {} rel {}",
            check.lhs,
            check.rhs,
            check.rel_err
        );
    }

    #[test]
    fn lhs_vanishes_at_bessel_zero() {
        // Locate a zero of J_beta by bisection, then the oscillatory side
        // must vanish there too (absolute scale set by a nearby value).
        let d = 3usize;
        let nu = 1.2f64;
        let beta = d as f64 / 2.0 - 1.0 - nu; // -0.7
        let f = |x: f64| bessel_j(beta, x).unwrap();
        let (mut lo, mut hi) = (1.1f64, 1.3f64);
        assert!(f(lo).signum() != f(hi).signum());
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if f(mid).signum() == f(lo).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x_zero = 0.5 * (lo + hi);
        let z = 1.3f64;
        let s = x_zero / z;
        let at_zero = verify_enu_identity(d, nu, z, s).unwrap();
        let nearby = verify_enu_identity(d, nu, z, s * 0.8).unwrap();
        let scale = nearby.lhs.abs().max(nearby.rhs.abs());
        assert!(
            at_zero.lhs.abs() <= 1e-4 * scale,
            "lhs at Bessel zero: {} (scale {scale})",
            at_zero.lhs
        );
    }

    #[test]
    fn rejects_orders_outside_strip() {
        assert!(verify_enu_identity(3, 1.0, 1.0, 1.0).is_err());
        assert!(verify_enu_identity(3, 1.5, 1.0, 1.0).is_err());
        assert!(verify_enu_identity(2, 0.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn rejects_large_sz() {
        assert!(verify_enu_identity(3, 1.2, 30.0, 10.0).is_err());
    }
}
