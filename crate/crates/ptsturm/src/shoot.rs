//! Propagation of the regular solution across (0, pi) and the quantities
//! built on phi(pi, lambda): the eigenvalue-condition function
//! d(lambda) = phi(pi, lambda) - phi(pi, -lambda), the even function
//! g(z) = phi(pi, i z^2) and the ratio rho(z) = g(iz)/g(z), plus the
//! closed-form Bessel counterparts for the piecewise-linear coefficient.
//!
//! The state vector is (u, -f u') (the endpoint-regular variables), which
//! satisfies
//!
//! ```text
//! u' = -v / f,      v' = (i lambda u - v / f) / eps .
//! ```
//!
//! Steps are pinned to interior kinks of f so one-sided derivatives are
//! never straddled, and integration starts/ends on the Frobenius bases.

use crate::bessel::{self, zeta_wronskian};
use crate::coeff::CoefficientProfile;
use crate::error::{Error, Result};
use crate::frobenius::{
    basis_at_minus_pi, basis_at_pi, basis_at_zero, default_delta, Endpoint, ShootingState,
};
use crate::support::gamma::gamma;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Default relative tolerance of the adaptive integrator.
pub const TOL_ODE: f64 = 1e-10;
/// Default absolute tolerance.
pub const ATOL_ODE: f64 = 1e-12;
/// Stability guard on |lambda|.
pub const LAM_MAX: f64 = 1e4;
/// Underflow guard on |g(z)| before forming rho.
pub const RHO_GUARD: f64 = 1e-250;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: TOL_ODE,
            atol: ATOL_ODE,
            max_steps: 400_000,
        }
    }
}

impl OdeOptions {
    pub fn with_rtol(rtol: f64) -> Self {
        OdeOptions {
            rtol,
            atol: rtol * 1e-2,
            ..Default::default()
        }
    }
}

/// Result of a full transfer to x = pi.
#[derive(Debug, Clone, Copy)]
pub struct TransferResult {
    pub lam: Complex64,
    /// phi(pi, lambda); equals c1.
    pub phi_pi: Complex64,
    /// Coordinate of phi along the regular basis solution at pi.
    pub c1: Complex64,
    /// Component of the end state along the unit-normalized decaying
    /// direction at pi - delta (diagnostic only; the decaying solution
    /// itself carries an extra factor delta^{pi/(2 eps)}, which underflows
    /// for small eps, so the unnormalized coordinate is not representable).
    pub c2: Complex64,
    pub delta0: f64,
    pub delta_pi: f64,
    pub steps: usize,
    /// Forward error estimate from the doubled-resolution control run
    /// (None when the caller skipped it).
    pub est_err: Option<f64>,
}

/// A point z with g(z), g(iz) and their ratio.
#[derive(Debug, Clone, Copy)]
pub struct RhoSample {
    pub z: Complex64,
    pub g_z: Complex64,
    pub g_iz: Complex64,
    pub rho: Complex64,
    pub modulus: f64,
}

#[derive(Clone, Copy)]
struct State {
    u: Complex64,
    v: Complex64,
}

impl State {
    #[inline]
    fn axpy(self, h: f64, k: State) -> State {
        State {
            u: self.u + h * k.u,
            v: self.v + h * k.v,
        }
    }
    #[inline]
    fn finite(&self) -> bool {
        self.u.re.is_finite() && self.u.im.is_finite() && self.v.re.is_finite() && self.v.im.is_finite()
    }
}

#[inline]
fn rhs(profile: &CoefficientProfile, lam: Complex64, x: f64, y: State) -> State {
    let f = profile.eval(x);
    let du = -y.v / f;
    State {
        u: du,
        v: (Complex64::i() * lam * y.u + du) / profile.eps(),
    }
}

// Dormand-Prince 5(4) coefficients.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 35.0 / 384.0 - 5179.0 / 57600.0;
const E3: f64 = 500.0 / 1113.0 - 7571.0 / 16695.0;
const E4: f64 = 125.0 / 192.0 - 393.0 / 640.0;
const E5: f64 = -2187.0 / 6784.0 + 92097.0 / 339200.0;
const E6: f64 = 11.0 / 84.0 - 187.0 / 2100.0;
const E7: f64 = -1.0 / 40.0;

/// One DP5(4) step from (x, y) with size h. Returns (y_new, error_norm).
fn dp54_step(
    profile: &CoefficientProfile,
    lam: Complex64,
    x: f64,
    y: State,
    h: f64,
    k1: State,
    opts: &OdeOptions,
) -> (State, State, f64) {
    let k2 = rhs(profile, lam, x + 0.2 * h, y.axpy(h * A21, k1));
    let k3 = rhs(
        profile,
        lam,
        x + 0.3 * h,
        State {
            u: y.u + h * (A31 * k1.u + A32 * k2.u),
            v: y.v + h * (A31 * k1.v + A32 * k2.v),
        },
    );
    let k4 = rhs(
        profile,
        lam,
        x + 0.8 * h,
        State {
            u: y.u + h * (A41 * k1.u + A42 * k2.u + A43 * k3.u),
            v: y.v + h * (A41 * k1.v + A42 * k2.v + A43 * k3.v),
        },
    );
    let k5 = rhs(
        profile,
        lam,
        x + 8.0 / 9.0 * h,
        State {
            u: y.u + h * (A51 * k1.u + A52 * k2.u + A53 * k3.u + A54 * k4.u),
            v: y.v + h * (A51 * k1.v + A52 * k2.v + A53 * k3.v + A54 * k4.v),
        },
    );
    let k6 = rhs(
        profile,
        lam,
        x + h,
        State {
            u: y.u + h * (A61 * k1.u + A62 * k2.u + A63 * k3.u + A64 * k4.u + A65 * k5.u),
            v: y.v + h * (A61 * k1.v + A62 * k2.v + A63 * k3.v + A64 * k4.v + A65 * k5.v),
        },
    );
    let y_new = State {
        u: y.u + h * (B1 * k1.u + B3 * k3.u + B4 * k4.u + B5 * k5.u + B6 * k6.u),
        v: y.v + h * (B1 * k1.v + B3 * k3.v + B4 * k4.v + B5 * k5.v + B6 * k6.v),
    };
    let k7 = rhs(profile, lam, x + h, y_new);
    let err = State {
        u: h * (E1 * k1.u + E3 * k3.u + E4 * k4.u + E5 * k5.u + E6 * k6.u + E7 * k7.u),
        v: h * (E1 * k1.v + E3 * k3.v + E4 * k4.v + E5 * k5.v + E6 * k6.v + E7 * k7.v),
    };
    let sc_u = opts.atol + opts.rtol * y.u.norm().max(y_new.u.norm());
    let sc_v = opts.atol + opts.rtol * y.v.norm().max(y_new.v.norm());
    // error per unit step, so the accumulated error stays proportional to
    // the tolerance; the normalizing length is floored where rtol*h would
    // dip below what double precision can deliver per step
    let h_wall = (3e-15 / opts.rtol).min(1.0);
    let h_eff = h.abs().clamp(h_wall, 1.0);
    let e = (err.u.norm() / sc_u).max(err.v.norm() / sc_v) / h_eff;
    (y_new, k7, e)
}

fn nearest_singularity(x: f64) -> f64 {
    x.abs().min((PI - x).abs()).min((PI + x).abs())
}

/// Propagate a state to `to_x` (either direction) within one smooth segment.
fn integrate_segment(
    profile: &CoefficientProfile,
    lam: Complex64,
    mut x: f64,
    mut y: State,
    to_x: f64,
    opts: &OdeOptions,
    steps: &mut usize,
) -> Result<State> {
    let span = to_x - x;
    if span == 0.0 {
        return Ok(y);
    }
    let dir = span.signum();
    let mut h = dir * (0.1 * nearest_singularity(x)).min(0.25 * span.abs()).max(1e-12);
    let mut k1 = rhs(profile, lam, x, y);
    loop {
        if (to_x - x) * dir <= 0.0 {
            return Ok(y);
        }
        if (to_x - x).abs() <= h.abs() {
            h = to_x - x;
        }
        if h.abs() < 1e-15 * (1.0 + x.abs()) {
            return Err(Error::StepSizeUnderflow { x });
        }
        let (y_new, k7, e) = dp54_step(profile, lam, x, y, h, k1, opts);
        *steps += 1;
        if *steps > opts.max_steps {
            return Err(Error::StepSizeUnderflow { x });
        }
        if !y_new.finite() {
            return Err(Error::UnstableLambda);
        }
        if e <= 1.0 {
            x += h;
            y = y_new;
            k1 = k7;
            // controlled quantity scales like h^4 under per-unit-step control
            let grow = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.25)).clamp(0.2, 5.0) };
            h *= grow;
        } else {
            h *= (0.9 * e.powf(-0.25)).clamp(0.1, 0.9);
        }
    }
}

/// Propagate `from_state` to `to_x`, restarting at interior kinks of f.
pub fn integrate(
    profile: &CoefficientProfile,
    lam: Complex64,
    from_state: &ShootingState,
    to_x: f64,
    opts: &OdeOptions,
) -> Result<ShootingState> {
    integrate_counting(profile, lam, from_state, to_x, opts).map(|(s, _)| s)
}

pub fn integrate_counting(
    profile: &CoefficientProfile,
    lam: Complex64,
    from_state: &ShootingState,
    to_x: f64,
    opts: &OdeOptions,
) -> Result<(ShootingState, usize)> {
    let mut x = from_state.x;
    let mut y = State {
        u: from_state.u,
        v: from_state.v,
    };
    // breakpoints of f between x and to_x, in traversal order
    let mut cuts: Vec<f64> = profile
        .breakpoints()
        .iter()
        .copied()
        .filter(|&b| (b - x) * (to_x - b) > 0.0)
        .collect();
    cuts.sort_by(f64::total_cmp);
    if to_x < x {
        cuts.reverse();
    }
    cuts.push(to_x);
    let mut steps = 0usize;
    for target in cuts {
        y = integrate_segment(profile, lam, x, y, target, opts, &mut steps)?;
        x = target;
    }
    Ok((
        ShootingState {
            x: to_x,
            u: y.u,
            v: y.v,
        },
        steps,
    ))
}

// ---------------------------------------------------------------------------
// Transfer to pi and derived quantities
// ---------------------------------------------------------------------------

/// Solve (c1, c2) from end = c1 * reg + c2 * sing_dir, where `sing_dir` is
/// the decaying solution rescaled to unit size at the matching point. The
/// value c1 = phi(pi, lambda) is invariant under that rescaling, and the
/// normalized direction keeps the 2x2 solve well conditioned for every
/// exponent pi/(2 eps) (the pure power underflows already at moderate nu).
fn extract_coordinates(
    end: &ShootingState,
    reg: &ShootingState,
    sing_dir: (Complex64, Complex64),
) -> Result<(Complex64, Complex64)> {
    let (su, sv) = sing_dir;
    let det = reg.u * sv - reg.v * su;
    let scale = (reg.u * sv).norm() + (reg.v * su).norm();
    if det.norm() < 1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::IllConditionedMatch);
    }
    let c1 = (end.u * sv - end.v * su) / det;
    let c2 = (reg.u * end.v - reg.v * end.u) / det;
    Ok((c1, c2))
}

/// Unit-normalized decaying direction at the matching offset: (eps, 1) to
/// first order in the offset.
fn singular_direction(profile: &CoefficientProfile) -> (Complex64, Complex64) {
    (
        Complex64::new(profile.eps(), 0.0),
        Complex64::new(1.0, 0.0),
    )
}

fn transfer_once(
    profile: &CoefficientProfile,
    lam: Complex64,
    opts: &OdeOptions,
) -> Result<(Complex64, Complex64, f64, f64, usize)> {
    let delta0 = default_delta(profile, lam, Endpoint::Zero);
    let mut delta_pi = default_delta(profile, lam, Endpoint::Pi);
    let b0 = basis_at_zero(profile, lam, delta0)?;
    let sing = singular_direction(profile);
    let (end, steps) =
        integrate_counting(profile, lam, &b0.state_regular, PI - delta_pi, opts)?;
    let bpi = basis_at_pi(profile, lam, delta_pi)?;
    match extract_coordinates(&end, &bpi.state_regular, sing) {
        Ok((c1, c2)) => Ok((c1, c2, delta0, delta_pi, steps)),
        Err(Error::IllConditionedMatch) => {
            // enlarge the endpoint offset once and retry
            delta_pi *= 2.0;
            let (end, steps2) =
                integrate_counting(profile, lam, &b0.state_regular, PI - delta_pi, opts)?;
            let bpi = basis_at_pi(profile, lam, delta_pi)?;
            let (c1, c2) = extract_coordinates(&end, &bpi.state_regular, sing)?;
            Ok((c1, c2, delta0, delta_pi, steps + steps2))
        }
        Err(e) => Err(e),
    }
}

/// phi(pi, lambda) with a forward error estimate from a doubled-resolution
/// control run.
pub fn phi_at_pi(profile: &CoefficientProfile, lam: Complex64) -> Result<TransferResult> {
    phi_at_pi_opts(profile, lam, &OdeOptions::default(), true)
}

pub fn phi_at_pi_opts(
    profile: &CoefficientProfile,
    lam: Complex64,
    opts: &OdeOptions,
    with_error_estimate: bool,
) -> Result<TransferResult> {
    if lam.norm() > LAM_MAX {
        return Err(Error::LambdaTooLarge(lam.norm()));
    }
    let (c1, c2, delta0, delta_pi, steps) = transfer_once(profile, lam, opts)?;
    let est_err = if with_error_estimate {
        let fine = OdeOptions {
            rtol: opts.rtol / 32.0,
            atol: opts.atol / 32.0,
            max_steps: opts.max_steps,
        };
        let (c1f, _, _, _, _) = transfer_once(profile, lam, &fine)?;
        Some((c1 - c1f).norm() / (1.0 + c1f.norm()))
    } else {
        None
    };
    Ok(TransferResult {
        lam,
        phi_pi: c1,
        c1,
        c2,
        delta0,
        delta_pi,
        steps,
        est_err,
    })
}

/// Fast phi(pi, lambda) without the control run (root-search workhorse).
pub fn phi_pi_value(
    profile: &CoefficientProfile,
    lam: Complex64,
    opts: &OdeOptions,
) -> Result<Complex64> {
    Ok(phi_at_pi_opts(profile, lam, opts, false)?.phi_pi)
}

/// phi(-pi, lambda): the same transfer run over (-pi, 0). By the reflection
/// symmetry this must equal phi(pi, -lambda); computing it independently
/// exercises the negative half-interval (f < 0) and the backward direction.
pub fn phi_at_minus_pi(
    profile: &CoefficientProfile,
    lam: Complex64,
    opts: &OdeOptions,
) -> Result<Complex64> {
    if lam.norm() > LAM_MAX {
        return Err(Error::LambdaTooLarge(lam.norm()));
    }
    let delta0 = default_delta(profile, lam, Endpoint::Zero);
    let delta_pi = default_delta(profile, lam, Endpoint::MinusPi);
    let b0 = basis_at_zero(profile, lam, delta0)?;
    // regular jet evaluated at x = -delta0 (the jet is analytic in the
    // signed offset)
    let start = ShootingState {
        x: -delta0,
        u: Complex64::new(1.0, 0.0) - b0.regular_jet.u1 * delta0,
        v: -b0.regular_jet.v1 * delta0,
    };
    let (end, _) = integrate_counting(profile, lam, &start, -PI + delta_pi, opts)?;
    let bm = basis_at_minus_pi(profile, lam, delta_pi)?;
    let (c1, _c2) = extract_coordinates(&end, &bm.state_regular, singular_direction(profile))?;
    Ok(c1)
}

/// d(lambda) = phi(pi, lambda) - phi(pi, -lambda). Vanishing of d is the
/// periodic eigenvalue condition.
pub fn d_of_lambda(
    profile: &CoefficientProfile,
    lam: Complex64,
    opts: &OdeOptions,
) -> Result<Complex64> {
    let a = phi_pi_value(profile, lam, opts)?;
    let b = phi_pi_value(profile, -lam, opts)?;
    Ok(a - b)
}

/// g(z) = phi(pi, i z^2); even in z, with all zeros at +-i alpha_n.
pub fn g_of_z(profile: &CoefficientProfile, z: Complex64, opts: &OdeOptions) -> Result<Complex64> {
    phi_pi_value(profile, Complex64::i() * z * z, opts)
}

/// rho(z) = g(iz)/g(z).
pub fn rho_general(
    profile: &CoefficientProfile,
    z: Complex64,
    opts: &OdeOptions,
) -> Result<RhoSample> {
    let g_z = g_of_z(profile, z, opts)?;
    if g_z.norm() < RHO_GUARD {
        return Err(Error::PoleProximity(g_z.norm()));
    }
    let g_iz = g_of_z(profile, Complex64::i() * z, opts)?;
    let rho = g_iz / g_z;
    Ok(RhoSample {
        z,
        g_z,
        g_iz,
        rho,
        modulus: rho.norm(),
    })
}

// ---------------------------------------------------------------------------
// Closed-form counterparts for the piecewise-linear coefficient
// ---------------------------------------------------------------------------

/// phi(pi, lambda) for the piecewise-linear profile, by matching the
/// origin-piece solution zeta0 onto the endpoint pair (zeta1, zeta2) at
/// x = pi/2 and reading off phi(pi) = B zeta2(0). The 2x2 solve uses the
/// exact Wronskian for the inverse.
pub fn bessel_phi_at_pi(eps: f64, lam: Complex64) -> Result<Complex64> {
    let nu = PI / (2.0 * eps);
    bessel::check_order(nu)?;
    if lam == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    // zeta0 and its derivative at x = pi/2 (origin piece)
    let mid = bessel::zeta_functions(nu, lam, 0.5 * PI)?;
    // zeta1, zeta2 and derivatives at z = x - pi = -pi/2 (endpoint piece)
    let end = bessel::zeta_functions(nu, lam, -0.5 * PI)?;
    let w = zeta_wronskian(nu, lam, -0.5 * PI);
    let b = (end.zeta1 * mid.dzeta0 - end.dzeta1 * mid.zeta0) / w;
    let zeta2_at_0 = Complex64::from_polar(1.0, 0.5 * PI * nu) / gamma(1.0 - nu);
    Ok(b * zeta2_at_0)
}

/// B(lambda) in un-normalized form: F(lambda) =
/// lambda^{1/2 - nu} J_nu'(sqrt(2 i nu lambda pi)) J_nu(sqrt(2 i nu lambda pi)).
/// The eigenvalue condition for the piecewise-linear profile is
/// F(lambda) = F(-lambda).
pub fn bessel_f(eps: f64, lam: Complex64) -> Result<Complex64> {
    let nu = PI / (2.0 * eps);
    bessel::check_order(nu)?;
    if lam.norm() < 1e-300 {
        return Err(Error::ArgumentOutOfRange(
            "F(lambda) is singular at lambda = 0".into(),
        ));
    }
    let w = (2.0 * Complex64::i() * nu * lam * PI).sqrt();
    let e = bessel::eval_j(nu, w)?;
    Ok(((0.5 - nu) * lam.ln()).exp() * e.derivative * e.value)
}

/// The raw Bessel ratio rho(z) = J_nu'(z) J_nu(z) / (J_nu'(iz) J_nu(iz)).
/// Its modulus is < 1 for -pi/4 < arg(+-z) < pi/4 and > 1 for
/// pi/4 < arg(+-z) < 3 pi/4.
pub fn rho_bessel_ratio(nu: f64, z: Complex64) -> Result<Complex64> {
    bessel::check_order(nu)?;
    let num = bessel::eval_j(nu, z)?;
    let den = bessel::eval_j(nu, Complex64::i() * z)?;
    let d = den.derivative * den.value;
    if d.norm() < RHO_GUARD {
        return Err(Error::PoleProximity(d.norm()));
    }
    Ok(num.derivative * num.value / d)
}

/// Closed-form rho for the piecewise-linear profile in the same variable as
/// [`rho_general`]: rho(z) = g(iz)/g(z) with g(z) = phi(pi, i z^2) taken
/// from the Bessel matching.
pub fn rho_bessel(eps: f64, z: Complex64) -> Result<RhoSample> {
    let g_z = bessel_phi_at_pi(eps, Complex64::i() * z * z)?;
    if g_z.norm() < RHO_GUARD {
        return Err(Error::PoleProximity(g_z.norm()));
    }
    let g_iz = bessel_phi_at_pi(eps, -Complex64::i() * z * z)?;
    let rho = g_iz / g_z;
    Ok(RhoSample {
        z,
        g_z,
        g_iz,
        rho,
        modulus: rho.norm(),
    })
}
