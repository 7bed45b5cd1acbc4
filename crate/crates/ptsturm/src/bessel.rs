//! Bessel functions J_nu and J_nu' of real order at complex arguments,
//! plus the three closed-form solution pieces zeta0, zeta1, zeta2 of the
//! piecewise-linear coefficient problem.
//!
//! Two evaluation regimes:
//! - power series for |z| <= max(12, 2 nu), summed in double-double so the
//!   alternating-series cancellation (up to ~15 digits there) cannot eat
//!   the answer;
//! - Hankel large-argument asymptotics beyond.
//!
//! Arguments in the left half plane are reflected through
//! J_nu(z e^{i pi}) = e^{i nu pi} J_nu(z), keeping both regimes in their
//! accurate sector. Fractional powers are principal-branch throughout.

use crate::error::{Error, Result};
use crate::support::dd::{Cdd, Dd};
use crate::support::gamma::{gamma, ln_gamma};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Largest |Im z| before cos/sin of the phase overflow.
const IM_OVERFLOW: f64 = 700.0;

/// How the value was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Series,
    Asymptotic,
}

/// A J_nu evaluation with its derivative and an error estimate.
#[derive(Debug, Clone, Copy)]
pub struct BesselEval {
    pub order: f64,
    pub z: Complex64,
    pub value: Complex64,
    pub derivative: Complex64,
    pub method: Method,
    pub est_rel_err: f64,
}

/// J_nu(z) for 0 < nu <= 50, |z| <= 1e4.
pub fn bessel_j(nu: f64, z: Complex64) -> Result<Complex64> {
    check_public_range(nu, z)?;
    Ok(eval_j(nu, z)?.value)
}

/// d/dz J_nu(z), via J_nu' = (J_{nu-1} - J_{nu+1})/2.
pub fn bessel_j_prime(nu: f64, z: Complex64) -> Result<Complex64> {
    check_public_range(nu, z)?;
    Ok(eval_j(nu, z)?.derivative)
}

fn check_public_range(nu: f64, z: Complex64) -> Result<()> {
    if !(nu > 0.0 && nu <= 50.0) {
        return Err(Error::ArgumentOutOfRange(format!(
            "order nu = {nu} outside (0, 50]"
        )));
    }
    if z.norm() > 1.0e4 {
        return Err(Error::ArgumentOutOfRange(format!(
            "|z| = {} exceeds 1e4",
            z.norm()
        )));
    }
    Ok(())
}

/// Full evaluation for any real order, reflecting into Re z >= 0 first.
pub fn eval_j(nu: f64, z: Complex64) -> Result<BesselEval> {
    if z.im.abs() > IM_OVERFLOW {
        return Err(Error::ArgumentOutOfRange(format!(
            "|Im z| = {} overflows exp",
            z.im.abs()
        )));
    }
    if z.re >= 0.0 {
        return eval_j_right(nu, z);
    }
    // J_nu(z) = e^{+- i nu pi} J_nu(-z), sign chosen by which half plane z is in
    let w = -z;
    let phase = if z.im > 0.0 || (z.im == 0.0 && z.re < 0.0) {
        Complex64::from_polar(1.0, nu * PI)
    } else {
        Complex64::from_polar(1.0, -nu * PI)
    };
    let inner = eval_j_right(nu, w)?;
    Ok(BesselEval {
        order: nu,
        z,
        value: phase * inner.value,
        derivative: -phase * inner.derivative,
        method: inner.method,
        est_rel_err: inner.est_rel_err,
    })
}

fn eval_j_right(nu: f64, z: Complex64) -> Result<BesselEval> {
    let r = z.norm();
    if r == 0.0 {
        return eval_at_origin(nu, z);
    }
    let switch = 12f64.max(2.0 * nu.abs());
    if r <= switch {
        let (value, e0) = series_j(nu, z);
        let (jm, e1) = series_j(nu - 1.0, z);
        let (jp, e2) = series_j(nu + 1.0, z);
        Ok(BesselEval {
            order: nu,
            z,
            value,
            derivative: 0.5 * (jm - jp),
            method: Method::Series,
            est_rel_err: e0.max(e1).max(e2),
        })
    } else {
        let (value, e0) = hankel_j(nu, z);
        let (jm, e1) = hankel_j(nu - 1.0, z);
        Ok(BesselEval {
            order: nu,
            z,
            value,
            // J_nu' = J_{nu-1} - (nu/z) J_nu
            derivative: jm - (nu / z) * value,
            method: Method::Asymptotic,
            est_rel_err: e0.max(e1),
        })
    }
}

fn eval_at_origin(nu: f64, z: Complex64) -> Result<BesselEval> {
    let value = if nu == 0.0 {
        Complex64::new(1.0, 0.0)
    } else if nu > 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        return Err(Error::ArgumentOutOfRange(
            "J_nu(0) diverges for negative order".into(),
        ));
    };
    // (J_{nu-1}(0) - J_{nu+1}(0))/2
    let derivative = if nu == 1.0 {
        Complex64::new(0.5, 0.0)
    } else if nu > 1.0 || nu == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        return Err(Error::ArgumentOutOfRange(
            "J_nu'(0) diverges for 0 < nu < 1".into(),
        ));
    };
    Ok(BesselEval {
        order: nu,
        z,
        value,
        derivative,
        method: Method::Series,
        est_rel_err: 0.0,
    })
}

/// 0F1(; b; w), summed in double-double. Returns the value and a relative
/// error estimate that accounts for the cancellation actually encountered.
pub(crate) fn hyp0f1(b: f64, w: Complex64) -> (Complex64, f64) {
    let mut sum = Cdd::ONE;
    let mut term = Cdd::ONE;
    let mut max_mag = 1.0f64;
    let mut m = 1.0f64;
    loop {
        // term *= w / (m (b + m - 1))
        let denom = Dd::add_exact(b, m - 1.0).mul_f64(m);
        term = term.mul_c64(w).div_dd(denom);
        sum = sum.add(term);
        let t = term.mag();
        max_mag = max_mag.max(t);
        let s = sum.mag().max(f64::MIN_POSITIVE);
        if t < s * 1e-33 && m > 3.0 {
            break;
        }
        if m > 2500.0 {
            break;
        }
        m += 1.0;
    }
    let s = sum.mag().max(f64::MIN_POSITIVE);
    let est = (max_mag / s) * 1.3e-31 + 1e-15;
    (sum.to_c64(), est)
}

/// Power-series J_nu(z) = (z/2)^nu / Gamma(nu+1) * 0F1(; nu+1; -z^2/4).
fn series_j(nu: f64, z: Complex64) -> (Complex64, f64) {
    let w = -z * z * 0.25;
    let (f, est) = hyp0f1(nu + 1.0, w);
    let half = z * 0.5;
    let prefactor = if nu + 1.0 > 0.0 {
        ((nu * half.ln()) - ln_gamma(nu + 1.0)).exp()
    } else {
        (nu * half.ln()).exp() / gamma(nu + 1.0)
    };
    (prefactor * f, est + 1e-14)
}

/// Hankel large-argument expansion, valid here for Re z >= 0 and
/// |z| above the series switch radius.
fn hankel_j(nu: f64, z: Complex64) -> (Complex64, f64) {
    let mu = 4.0 * nu * nu;
    let omega = z - (0.5 * nu + 0.25) * PI;
    let mut p = Complex64::new(1.0, 0.0);
    let mut q = Complex64::new(0.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut prev = f64::INFINITY;
    let mut est = 0.0f64;
    let mut decreasing = false;
    for m in 1..=60 {
        let mf = m as f64;
        let odd = 2.0 * mf - 1.0;
        let next = term * ((mu - odd * odd) / (8.0 * mf)) / z;
        let t = next.norm();
        // terms may first grow (mu/(8z) > 1); truncate at the later minimum
        if decreasing && t > prev {
            est = prev;
            break;
        }
        if m > 1 && t < prev {
            decreasing = true;
        }
        term = next;
        // alternate signs in pairs: terms go +Q, -P, -Q, +P, ...
        match m % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        prev = t;
        est = t;
        if t < 1e-17 {
            break;
        }
    }
    let amp = (Complex64::new(2.0 / PI, 0.0) / z).sqrt();
    let value = amp * (omega.cos() * p - omega.sin() * q);
    let scale = p.norm().max(q.norm()).max(f64::MIN_POSITIVE);
    (value, est / scale + 1e-15)
}

// ---------------------------------------------------------------------------
// Closed-form solution pieces for the piecewise-linear coefficient
// ---------------------------------------------------------------------------

/// The solutions of the local equation z u'' + (1 - nu) u' = i nu lambda u
/// (and its mirror at the origin piece), normalized so that
/// zeta0(0) = 1, zeta2(0) = i^nu / Gamma(1 - nu), and the pair (zeta1, zeta2)
/// has Wronskian sin(nu pi)/pi (i nu lambda)^nu z^{nu-1}.
#[derive(Debug, Clone, Copy)]
pub struct ZetaEval {
    pub zeta0: Complex64,
    pub zeta1: Complex64,
    pub zeta2: Complex64,
    pub dzeta0: Complex64,
    pub dzeta1: Complex64,
    pub dzeta2: Complex64,
    pub est_rel_err: f64,
}

/// Reject orders within this distance of an integer: the second solution
/// J_{-nu} degenerates there.
pub const RESONANCE_GUARD: f64 = 1e-8;

pub fn check_order(nu: f64) -> Result<()> {
    if (nu - nu.round()).abs() < RESONANCE_GUARD {
        return Err(Error::ResonantOrder(nu));
    }
    if !(nu > 0.0 && nu <= 50.0) {
        return Err(Error::ArgumentOutOfRange(format!(
            "order nu = {nu} outside (0, 50]"
        )));
    }
    Ok(())
}

/// Evaluate all three zeta functions and their z-derivatives at the same
/// coordinate. `zeta0` solves the origin piece (argument -i nu lambda z);
/// `zeta1`, `zeta2` solve the endpoint piece (argument +i nu lambda z).
pub fn zeta_functions(nu: f64, lam: Complex64, z: f64) -> Result<ZetaEval> {
    check_order(nu)?;
    let inl = Complex64::i() * nu * lam;
    let zc = Complex64::new(z, 0.0);

    // zeta0 = 0F1(; nu+1; -i nu lambda z)
    let (f0, e0) = hyp0f1(nu + 1.0, -inl * zc);
    let (f0d, e0d) = hyp0f1(nu + 2.0, -inl * zc);
    let zeta0 = f0;
    let dzeta0 = -inl / (nu + 1.0) * f0d;

    // zeta1 = c1 z^nu 0F1(; nu+1; i nu lambda z)
    let (f1, e1) = hyp0f1(nu + 1.0, inl * zc);
    let (f1d, e1d) = hyp0f1(nu + 2.0, inl * zc);
    // c1 = -e^{-i pi nu/2} (i nu lambda)^nu / Gamma(nu+1)
    let c1 = if lam == Complex64::new(0.0, 0.0) {
        Complex64::new(0.0, 0.0)
    } else {
        -((nu * (inl.ln() - Complex64::new(0.0, 0.5 * PI))) - ln_gamma(nu + 1.0)).exp()
    };
    let (zpow, zpow_m1) = if z == 0.0 {
        (
            Complex64::new(0.0, 0.0),
            if nu > 1.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(f64::INFINITY, 0.0)
            },
        )
    } else {
        let lnz = zc.ln();
        ((nu * lnz).exp(), ((nu - 1.0) * lnz).exp())
    };
    let zeta1 = c1 * zpow * f1;
    let dzeta1 = c1 * (nu * zpow_m1 * f1 + zpow * inl / (nu + 1.0) * f1d);

    // zeta2 = i^nu / Gamma(1-nu) * 0F1(; 1-nu; i nu lambda z)
    let (f2, e2) = hyp0f1(1.0 - nu, inl * zc);
    let (f2d, e2d) = hyp0f1(2.0 - nu, inl * zc);
    let c2 = Complex64::from_polar(1.0, 0.5 * PI * nu) / gamma(1.0 - nu);
    let zeta2 = c2 * f2;
    let dzeta2 = c2 * inl / (1.0 - nu) * f2d;

    let est = [e0, e0d, e1, e1d, e2, e2d]
        .into_iter()
        .fold(0.0f64, f64::max)
        + 1e-14;
    if est > 1e-6 {
        return Err(Error::ArgumentOutOfRange(format!(
            "zeta series lost too much precision (est {est:.2e}); |nu lambda z| = {}",
            (inl * zc).norm()
        )));
    }
    Ok(ZetaEval {
        zeta0,
        zeta1,
        zeta2,
        dzeta0,
        dzeta1,
        dzeta2,
        est_rel_err: est,
    })
}

/// The exact Wronskian of (zeta1, zeta2): sin(nu pi)/pi (i nu lambda)^nu z^{nu-1}.
pub fn zeta_wronskian(nu: f64, lam: Complex64, z: f64) -> Complex64 {
    let inl = Complex64::i() * nu * lam;
    let zc = Complex64::new(z, 0.0);
    (nu * PI).sin() / PI * (nu * inl.ln()).exp() * ((nu - 1.0) * zc.ln()).exp()
}
