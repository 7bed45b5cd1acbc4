//! Local solution bases at the singular endpoints.
//!
//! At x = 0 the indicial exponents are 0 and -1/(eps f'(0)) = -pi/(2 eps);
//! at x = pi they are 0 and -1/(eps f'(pi)) = +pi/(2 eps). The regular
//! solution carries a first-order jet in the offset,
//!
//! ```text
//! (u, -f u')(delta) = (1, 0) + gamma * delta * (-1, f'(0)) + O(delta^2),
//! gamma = i lambda / (1 + eps f'(0))            (at x = 0)
//! ```
//!
//! and correspondingly at pi with slope i lambda / (1 + eps f'(pi)) in the
//! offset pi - x. The singular solution is the pure power
//! s^{-1/(eps f')} (eps, 1) in the local offset s. These states seed the
//! integrator and provide the extraction map at the far end.

use crate::coeff::{CoefficientProfile, DELTA_MIN};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Truncation-error target for the first-order starting jets; the adaptive
/// offset rule shrinks delta until the estimate meets this.
pub const TOL_FROB: f64 = 1e-9;

/// Estimated remainder above which an explicitly requested offset is
/// refused outright.
pub const SHRINK_TOL: f64 = 1e-6;

/// Largest offset the adaptive rule will pick.
pub const DELTA_MAX: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Zero,
    Pi,
    /// The mirror endpoint at x = -pi, used when the transfer is run over
    /// the negative half-interval.
    MinusPi,
}

/// The 2-vector (u, -f u') propagated by the integrator.
#[derive(Debug, Clone, Copy)]
pub struct ShootingState {
    pub x: f64,
    pub u: Complex64,
    pub v: Complex64,
}

impl ShootingState {
    /// u'(x), recovered from v = -f u'.
    pub fn du(&self, profile: &CoefficientProfile) -> Complex64 {
        -self.v / profile.eval(self.x)
    }
}

/// First-order jet of the regular solution in the local offset s:
/// u = 1 + u1*s, v = v1*s.
#[derive(Debug, Clone, Copy)]
pub struct RegularJet {
    pub u1: Complex64,
    pub v1: Complex64,
}

#[derive(Debug, Clone, Copy)]
pub struct LocalBasis {
    pub endpoint: Endpoint,
    pub regular_jet: RegularJet,
    pub singular_exponent: f64,
    pub delta: f64,
    pub state_regular: ShootingState,
    /// The pure-power singular solution delta^sigma (eps, 1). The power
    /// overflows/underflows once |sigma| ln(1/delta) passes ~709; consumers
    /// that only need the direction should use (eps, 1) directly.
    pub state_singular: ShootingState,
}

/// Indicial exponents (0, -1/(eps f'(e))) at the requested endpoint.
pub fn indicial_exponents(profile: &CoefficientProfile, endpoint: Endpoint) -> (f64, f64) {
    let slope = match endpoint {
        Endpoint::Zero => profile.fprime0(),
        Endpoint::Pi | Endpoint::MinusPi => profile.fprime_pi(),
    };
    (0.0, -1.0 / (profile.eps() * slope))
}

/// Estimated size of the neglected remainder for offset `delta`:
/// C (delta^2 + |f(delta)/delta - f' - delta f''/2|) with
/// C = |lambda| (1 + |lambda|). The jet is exact at lambda = 0, and the
/// second-order term it drops grows like lambda^2.
fn remainder_estimate(
    profile: &CoefficientProfile,
    lam: Complex64,
    endpoint: Endpoint,
    delta: f64,
) -> f64 {
    let scale = lam.norm() * (1.0 + lam.norm());
    let dev = match endpoint {
        Endpoint::Zero => {
            let fsec = profile.fsecond0().unwrap_or(0.0);
            (profile.eval(delta) / delta - profile.fprime0() - 0.5 * delta * fsec).abs()
        }
        Endpoint::Pi => {
            let fsec = profile.fsecond_pi().unwrap_or(0.0);
            (profile.eval(PI - delta) / delta + profile.fprime_pi() - 0.5 * delta * fsec).abs()
        }
        Endpoint::MinusPi => {
            let fsec = profile.fsecond_pi().unwrap_or(0.0);
            (-profile.eval(-PI + delta) / delta + profile.fprime_pi() - 0.5 * delta * fsec).abs()
        }
    };
    // f(pi - delta)/delta carries an ulp(pi)/delta evaluation noise; do not
    // let it masquerade as a genuine deviation from linearity
    let noise = f64::EPSILON * (1.0 + PI / delta);
    scale * (delta * delta + (dev - noise).max(0.0))
}

/// Truncation tolerance targeted by the adaptive rule: TOL_FROB, relaxed to
/// what is attainable at the minimum offset for this lambda (relevant only
/// for very large |lambda|).
fn effective_tol(lam: Complex64) -> f64 {
    let floor = 4.0 * lam.norm() * (1.0 + lam.norm()) * DELTA_MIN * DELTA_MIN;
    TOL_FROB.max(floor)
}

/// Largest delta <= DELTA_MAX whose estimated remainder meets the tolerance,
/// floored at DELTA_MIN.
pub fn default_delta(profile: &CoefficientProfile, lam: Complex64, endpoint: Endpoint) -> f64 {
    let tol = effective_tol(lam);
    let mut delta = DELTA_MAX;
    while delta > DELTA_MIN {
        if remainder_estimate(profile, lam, endpoint, delta) <= tol {
            return delta;
        }
        delta *= 0.5;
    }
    DELTA_MIN
}

fn check_delta(
    profile: &CoefficientProfile,
    lam: Complex64,
    endpoint: Endpoint,
    delta: f64,
) -> Result<()> {
    if delta < DELTA_MIN {
        return Err(Error::OffsetUnderflow(delta));
    }
    let est = remainder_estimate(profile, lam, endpoint, delta);
    let tol = SHRINK_TOL.max(effective_tol(lam));
    if est > tol {
        return Err(Error::ShrinkDelta { est, tol });
    }
    Ok(())
}

/// Local basis at x = 0, evaluated at offset x = delta.
pub fn basis_at_zero(
    profile: &CoefficientProfile,
    lam: Complex64,
    delta: f64,
) -> Result<LocalBasis> {
    check_delta(profile, lam, Endpoint::Zero, delta)?;
    let eps = profile.eps();
    let b = profile.fprime0();
    let gamma = -Complex64::i() * lam / (1.0 + eps * b);
    let jet = RegularJet {
        u1: gamma,
        v1: -b * gamma,
    };
    let sigma = -1.0 / (eps * b);
    let pow = delta.powf(sigma);
    Ok(LocalBasis {
        endpoint: Endpoint::Zero,
        regular_jet: jet,
        singular_exponent: sigma,
        delta,
        state_regular: ShootingState {
            x: delta,
            u: Complex64::new(1.0, 0.0) + jet.u1 * delta,
            v: jet.v1 * delta,
        },
        state_singular: ShootingState {
            x: delta,
            u: Complex64::new(pow * eps, 0.0),
            v: Complex64::new(pow, 0.0),
        },
    })
}

/// Local basis at x = pi, evaluated at x = pi - delta.
/// The regular jet is psi = 1 + beta (pi - x) with
/// beta = i lambda / (1 + eps f'(pi)); the singular solution decays like
/// (pi - x)^{-1/(eps f'(pi))} = (pi - x)^{pi/(2 eps)}.
pub fn basis_at_pi(
    profile: &CoefficientProfile,
    lam: Complex64,
    delta: f64,
) -> Result<LocalBasis> {
    check_delta(profile, lam, Endpoint::Pi, delta)?;
    let eps = profile.eps();
    let slope = profile.fprime_pi();
    let beta = Complex64::i() * lam / (1.0 + eps * slope);
    // u = 1 + beta s, u' = -beta, v = -f u' = slope*(x-pi)*beta = -slope*s*beta
    let jet = RegularJet {
        u1: beta,
        v1: -slope * beta,
    };
    let expo = -1.0 / (eps * slope);
    let pow = delta.powf(expo);
    Ok(LocalBasis {
        endpoint: Endpoint::Pi,
        regular_jet: jet,
        singular_exponent: expo,
        delta,
        state_regular: ShootingState {
            x: PI - delta,
            u: Complex64::new(1.0, 0.0) + jet.u1 * delta,
            v: jet.v1 * delta,
        },
        state_singular: ShootingState {
            x: PI - delta,
            u: Complex64::new(pow * eps, 0.0),
            v: Complex64::new(pow, 0.0),
        },
    })
}

/// Local basis at x = -pi, evaluated at x = -pi + delta (negative-side runs).
/// Here f(-pi + s) ~ f'(pi) s < 0 and the regular jet in s = x + pi has
/// slope -i lambda / (1 + eps f'(pi)).
pub fn basis_at_minus_pi(
    profile: &CoefficientProfile,
    lam: Complex64,
    delta: f64,
) -> Result<LocalBasis> {
    check_delta(profile, lam, Endpoint::MinusPi, delta)?;
    let eps = profile.eps();
    let slope = profile.fprime_pi(); // f'(-pi) = f'(pi) by 2pi-periodicity
    let beta = -Complex64::i() * lam / (1.0 + eps * slope);
    let jet = RegularJet {
        u1: beta,
        v1: -slope * beta,
    };
    let expo = -1.0 / (eps * slope);
    let pow = delta.powf(expo);
    Ok(LocalBasis {
        endpoint: Endpoint::MinusPi,
        regular_jet: jet,
        singular_exponent: expo,
        delta,
        state_regular: ShootingState {
            x: -PI + delta,
            u: Complex64::new(1.0, 0.0) + jet.u1 * delta,
            v: jet.v1 * delta,
        },
        state_singular: ShootingState {
            x: -PI + delta,
            u: Complex64::new(pow * eps, 0.0),
            v: Complex64::new(pow, 0.0),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{make_piecewise_linear, make_sine};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lambda_zero_gives_constant_state() {
        let p = make_sine(0.5).unwrap();
        for delta in [1e-3, 1e-4, 1e-6] {
            let b = basis_at_zero(&p, c(0.0, 0.0), delta).unwrap();
            assert_eq!(b.state_regular.u, c(1.0, 0.0));
            assert_eq!(b.state_regular.v, c(0.0, 0.0));
            let bp = basis_at_pi(&p, c(0.0, 0.0), delta).unwrap();
            assert_eq!(bp.state_regular.u, c(1.0, 0.0));
        }
    }

    #[test]
    fn regular_jet_formula_at_zero() {
        // u(delta) = 1 - i lambda delta / (1 + eps 2/pi)
        let p = make_sine(0.5).unwrap();
        let delta = 1e-4;
        let b = basis_at_zero(&p, c(1.0, 0.0), delta).unwrap();
        let denom = 1.0 + 0.5 * (2.0 / PI);
        assert_relative_eq!(b.state_regular.u.re, 1.0, max_relative = 1e-14);
        assert_relative_eq!(b.state_regular.u.im, -delta / denom, max_relative = 1e-12);
        assert_relative_eq!(
            b.state_regular.v.im,
            (2.0 / PI) * delta / denom,
            max_relative = 1e-12
        );
    }

    #[test]
    fn indicial_exponents_match_normalization() {
        let p = make_sine(0.5).unwrap();
        let (r0, s0) = indicial_exponents(&p, Endpoint::Zero);
        assert_eq!(r0, 0.0);
        // -1/(eps * 2/pi) = -pi/(2 eps) = -pi at eps = 1/2
        assert_relative_eq!(s0, -PI, max_relative = 1e-14);
        let (_, spi) = indicial_exponents(&p, Endpoint::Pi);
        assert_relative_eq!(spi, PI, max_relative = 1e-14);
        // the nonzero exponents are negatives of each other
        assert_relative_eq!(s0, -spi, max_relative = 1e-14);
    }

    #[test]
    fn singular_state_is_a_pure_power() {
        let p = make_sine(0.5).unwrap();
        let lam = c(1.0, 0.0);
        let d = 1e-4;
        let b1 = basis_at_pi(&p, lam, d).unwrap();
        let b2 = basis_at_pi(&p, lam, 2.0 * d).unwrap();
        // ratio of the decaying solution at delta vs 2 delta: 2^{-pi/(2 eps)}
        let ratio = b1.state_singular.u.re / b2.state_singular.u.re;
        assert_relative_eq!(ratio, 2f64.powf(-PI), max_relative = 1e-12);
        // direction (eps, 1)
        assert_relative_eq!(
            b1.state_singular.u.re / b1.state_singular.v.re,
            0.5,
            max_relative = 1e-14
        );
    }

    #[test]
    fn l2_membership_exponent_inequality() {
        // the singular exponent at 0 is < -1/2 (in fact <= -1) for eps < pi/2
        for eps in [0.1, 0.5, 1.0, 1.5, PI / 2.0 - 1e-3] {
            let p = make_sine(eps).unwrap();
            let (_, s) = indicial_exponents(&p, Endpoint::Zero);
            assert!(s < -1.0);
        }
    }

    #[test]
    fn delta_validation() {
        let p = make_sine(0.5).unwrap();
        let lam = c(5.0, 0.0);
        assert!(matches!(
            basis_at_zero(&p, lam, 1e-9),
            Err(Error::OffsetUnderflow(_))
        ));
        assert!(matches!(
            basis_at_zero(&p, lam, 1e-3),
            Err(Error::ShrinkDelta { .. })
        ));
        let d = default_delta(&p, lam, Endpoint::Zero);
        assert!(basis_at_zero(&p, lam, d).is_ok());
        assert!((DELTA_MIN..=DELTA_MAX).contains(&d));
    }

    #[test]
    fn default_delta_is_larger_for_piecewise_linear() {
        // exactly linear near the ends: no deviation term, so only the
        // delta^2 part constrains
        let lam = c(1.0, 0.0);
        let dp = default_delta(&make_piecewise_linear(0.5).unwrap(), lam, Endpoint::Zero);
        let ds = default_delta(&make_sine(0.5).unwrap(), lam, Endpoint::Zero);
        assert!(dp >= ds);
    }

    #[test]
    fn ode_residual_of_regular_jet_shrinks_linearly() {
        // residual of i eps (f u')' + i u' - lambda u at x = delta, for the
        // first-order jet, decays at observed order >= 0.9
        let p = make_sine(0.5).unwrap();
        let lam = c(1.0, 0.0);
        let eps = p.eps();
        let resid = |delta: f64| {
            let b = basis_at_zero(&p, lam, delta).unwrap();
            let gamma = b.regular_jet.u1;
            // (f u')' = f'(x) gamma for the linear jet
            let h = 1e-7 * delta.max(1e-3);
            let fprime = (p.eval(delta + h) - p.eval(delta - h)) / (2.0 * h);
            let r = Complex64::i() * eps * fprime * gamma + Complex64::i() * gamma
                - lam * b.state_regular.u;
            r.norm()
        };
        let deltas = [2e-4, 1e-4, 5e-5];
        let r: Vec<f64> = deltas.iter().map(|&d| resid(d)).collect();
        let order1 = (r[0] / r[1]).log2();
        let order2 = (r[1] / r[2]).log2();
        assert!(order1 >= 0.9, "order1 = {order1}");
        assert!(order2 >= 0.9, "order2 = {order2}");
    }

    #[test]
    fn linearized_profile_has_identical_jet() {
        // for a profile that is already linear near 0, replacing f by its
        // endpoint tangent changes nothing in the jet
        let p = make_piecewise_linear(0.5).unwrap();
        let q = p.linearized_near_endpoints(0.3).unwrap();
        let lam = c(2.0, 1.0);
        let d = 1e-4;
        let a = basis_at_zero(&p, lam, d).unwrap();
        let b = basis_at_zero(&q, lam, d).unwrap();
        // the chord slope f(delta)/delta only reproduces 2/pi up to rounding
        assert_relative_eq!(a.regular_jet.u1.re, b.regular_jet.u1.re, max_relative = 1e-14);
        assert_relative_eq!(a.regular_jet.u1.im, b.regular_jet.u1.im, max_relative = 1e-14);
        assert_relative_eq!(a.state_regular.u.im, b.state_regular.u.im, max_relative = 1e-13);
    }
}
