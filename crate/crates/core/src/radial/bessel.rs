//! Bessel functions of the first kind for orders in [-1, 6].
//!
//! Small arguments use the ascending power series. Large arguments use the
//! Hankel asymptotic expansion with optimal truncation, evaluated at the
//! fractional base order and walked to the requested order with the
//! three-term recurrence (stable here because every order stays below the
//! argument). Half-integer orders make the asymptotic series terminate, so
//! the classical closed forms hold to machine precision.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

pub const MIN_ORDER: f64 = -1.0;
pub const MAX_ORDER: f64 = 6.0;
const SERIES_CUTOFF: f64 = 12.0;

/// J_nu(x) for nu in [-1, 6] and x >= 0.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    if !nu.is_finite() || !(MIN_ORDER..=MAX_ORDER).contains(&nu) {
        return Err(Error::OrderOutOfRange(nu));
    }
    if !x.is_finite() || x < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "Bessel argument must be a finite nonnegative real, got {x}"
        )));
    }
    Ok(j_known(nu, x))
}

/// Infallible path for pre-validated orders (transform kernels).
pub(crate) fn j_known(nu: f64, x: f64) -> f64 {
    debug_assert!((MIN_ORDER..=MAX_ORDER).contains(&nu) && x >= 0.0);
    if (nu + 1.0).abs() < 1e-14 {
        // J_{-1} = -J_1.
        return -j_known(1.0, x);
    }
    if x == 0.0 {
        return if nu == 0.0 {
            1.0
        } else if nu > 0.0 {
            0.0
        } else {
            // (x/2)^nu / Gamma(nu+1) -> +inf for nu in (-1, 0).
            f64::INFINITY
        };
    }
    if x <= SERIES_CUTOFF {
        series(nu, x)
    } else {
        large_x(nu, x)
    }
}

/// Asymptotic base orders in [0, 1) and [1, 2), then recurrence to nu
/// (stable: every order along the walk stays below the argument).
fn large_x(nu: f64, x: f64) -> f64 {
    let frac = nu - nu.floor();
    let j_lo = asymptotic(frac, x);
    let j_hi = asymptotic(frac + 1.0, x);
    let steps = (nu - frac).round() as i64;
    match steps {
        -1 => (2.0 * frac / x) * j_lo - j_hi,
        0 => j_lo,
        1 => j_hi,
        _ => {
            let mut prev = j_lo;
            let mut cur = j_hi;
            let mut order = frac + 1.0;
            for _ in 1..steps {
                let next = (2.0 * order / x) * cur - prev;
                prev = cur;
                cur = next;
                order += 1.0;
            }
            cur
        }
    }
}

/// Ascending series sum_{j>=0} (-1)^j / (j! Gamma(j+nu+1)) (x/2)^{2j+nu}.
fn series(nu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = half * half;
    let mut term = (nu * half.ln() - ln_gamma(nu + 1.0)).exp();
    let mut sum = term;
    for j in 1..400 {
        let jf = j as f64;
        term *= -q / (jf * (jf + nu));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-30) {
            break;
        }
    }
    sum
}

/// Hankel expansion with optimal truncation:
/// J_nu(x) ~ sqrt(2/(pi x)) (P cos w - Q sin w), w = x - nu pi/2 - pi/4.
fn asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let eight_x = 8.0 * x;
    let mut a = 1.0f64;
    let mut p = 1.0f64;
    let mut q = 0.0f64;
    let mut prev_abs = f64::INFINITY;
    for k in 1usize..=40 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        a *= (mu - odd * odd) / (kf * eight_x);
        let abs = a.abs();
        if abs >= prev_abs {
            break; // past the optimal truncation point
        }
        prev_abs = abs;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * a;
        } else {
            q += sign * a;
        }
        if abs < 1e-18 {
            break;
        }
    }
    let w = x - nu * std::f64::consts::FRAC_PI_2 - std::f64::consts::FRAC_PI_4;
    (2.0 / (std::f64::consts::PI * x)).sqrt() * (p * w.cos() - q * w.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn j_half(x: f64) -> f64 {
        (2.0 / (std::f64::consts::PI * x)).sqrt() * x.sin()
    }

    fn j_neg_half(x: f64) -> f64 {
        (2.0 / (std::f64::consts::PI * x)).sqrt() * x.cos()
    }

    fn j_three_halves(x: f64) -> f64 {
        (2.0 / (std::f64::consts::PI * x)).sqrt() * (x.sin() / x - x.cos())
    }

    #[test]
    fn at_zero() {
        assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(2.5, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j(-1.0, 0.0).unwrap(), 0.0);
        assert!(bessel_j(-0.5, 0.0).unwrap().is_infinite());
    }

    #[test]
    fn order_out_of_range() {
        assert!(bessel_j(6.5, 1.0).is_err());
        assert!(bessel_j(-1.2, 1.0).is_err());
    }

    #[test]
    fn half_integer_closed_forms_across_branches() {
        for &x in &[0.3, 1.0, 4.0, 11.9, 12.1, 25.0, 80.0, 200.0] {
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-12);
            assert!(
                rel(bessel_j(0.5, x).unwrap(), j_half(x)) < 1e-10,
                "J_1/2 at {x}"
            );
            assert!(
                rel(bessel_j(-0.5, x).unwrap(), j_neg_half(x)) < 1e-10,
                "J_-1/2 at {x}"
            );
            assert!(
                rel(bessel_j(1.5, x).unwrap(), j_three_halves(x)) < 1e-10,
                "J_3/2 at {x}"
            );
        }
    }

    #[test]
    fn first_zero_of_j0_by_bisection() {
        // Locate the first zero of J_0 with bisection on the series branch,
        // then compare with the reference value.
        let f = |x: f64| bessel_j(0.0, x).unwrap();
        let (mut lo, mut hi) = (2.0, 3.0);
        assert!(f(lo) > 0.0 && f(hi) < 0.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let zero = 0.5 * (lo + hi);
        assert_abs_diff_eq!(zero, 2.404_825_557_7, epsilon = 1e-8);
        assert!(f(2.404_825_557_7).abs() < 1e-8);
    }

    #[test]
    fn branches_agree_on_overlap() {
        // Both branches are accurate on [12, 16]; they must agree there.
        for &nu in &[0.0f64, 0.3, 1.0, 2.7, 5.5, 6.0, -0.7, -1.0] {
            for &x in &[12.0f64, 13.0, 14.5, 16.0] {
                let s = if (nu + 1.0).abs() < 1e-14 {
                    -series(1.0, x)
                } else {
                    series(nu, x)
                };
                let a = if (nu + 1.0).abs() < 1e-14 {
                    -large_x(1.0, x)
                } else {
                    large_x(nu, x)
                };
                assert!(
                    (s - a).abs() < 1e-9,
                    "branch mismatch for nu={nu}, x={x}: series {s} vs asymptotic {a}"
                );
            }
        }
    }

    #[test]
    fn reference_values() {
        // Abramowitz & Stegun style spot checks.
        assert_abs_diff_eq!(bessel_j(0.0, 1.0).unwrap(), 0.765_197_686_557_966_6, epsilon = 1e-12);
        assert_abs_diff_eq!(bessel_j(1.0, 1.0).unwrap(), 0.440_050_585_744_933_5, epsilon = 1e-12);
        assert_abs_diff_eq!(bessel_j(0.0, 5.0).unwrap(), -0.177_596_771_314_338_3, epsilon = 1e-12);
        assert_abs_diff_eq!(bessel_j(2.0, 1.0).unwrap(), 0.114_903_484_931_900_5, epsilon = 1e-12);
        // Large-argument branch.
        assert_abs_diff_eq!(bessel_j(0.0, 20.0).unwrap(), 0.167_024_664_340_583_2, epsilon = 1e-10);
        assert_abs_diff_eq!(bessel_j(1.0, 30.0).unwrap(), -0.118_751_062_616_622_9, epsilon = 1e-10);
        assert_abs_diff_eq!(bessel_j(6.0, 15.0).unwrap(), 0.206_149_737_479_985_9, epsilon = 1e-9);
        assert_abs_diff_eq!(bessel_j(0.3, 12.1).unwrap(), -0.036_262_204_172_315_04, epsilon = 1e-10);
        assert_abs_diff_eq!(bessel_j(5.5, 12.1).unwrap(), -0.170_760_592_739_937_6, epsilon = 1e-9);
        assert_abs_diff_eq!(bessel_j(-0.7, 20.0).unwrap(), 0.017_849_716_371_451_02, epsilon = 1e-10);
    }
}
