//! Coefficient profiles: the function f of the operator
//! i*eps*(f u')' + i u' on (-pi, pi).
//!
//! Admissible f are continuous, odd, anti-periodic (f(x+pi) = -f(x)),
//! positive on (0, pi), with the slope normalization f'(0) = 2/pi and
//! 0 < eps < pi/2. The two built-in profiles are (2/pi) sin x and the
//! piecewise-linear hat; arbitrary sampled coefficients are interpolated
//! by a shape-preserving cubic.
//!
//! The module also derives the integrating factor p (p'/p = f'/f + 1/(eps f))
//! and weight w = p/f of the auxiliary self-adjoint problem, and the WKB
//! eigenvalue seeds (n/I)^2 with I the inverse-sqrt action integral.

use crate::error::{Error, Result};
use crate::support::quad;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

/// Evaluation never samples closer to a singular endpoint than this.
pub const DELTA_MIN: f64 = 1e-8;

/// Relative tolerance for the structural-hypothesis validation grid.
pub const VALIDATION_TOL: f64 = 1e-10;

/// Tolerance on the prescribed endpoint slope of custom profiles.
pub const SLOPE_TOL: f64 = 1e-12;

pub const FPRIME0: f64 = 2.0 / PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Sine,
    PiecewiseLinear,
    Custom,
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileKind::Sine => write!(f, "sine"),
            ProfileKind::PiecewiseLinear => write!(f, "piecewise_linear"),
            ProfileKind::Custom => write!(f, "custom"),
        }
    }
}

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// An admissible coefficient together with its endpoint derivative data.
///
/// Immutable after construction; cheap to clone and safe to share across
/// worker threads.
#[derive(Clone)]
pub struct CoefficientProfile {
    kind: ProfileKind,
    eps: f64,
    f: Evaluator,
    fprime0: f64,
    fprime_pi: f64,
    fsecond0: Option<f64>,
    fsecond_pi: Option<f64>,
    breakpoints: Vec<f64>,
}

impl fmt::Debug for CoefficientProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientProfile")
            .field("kind", &self.kind)
            .field("eps", &self.eps)
            .field("fprime0", &self.fprime0)
            .field("fprime_pi", &self.fprime_pi)
            .field("breakpoints", &self.breakpoints)
            .finish()
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < FRAC_PI_2) {
        return Err(Error::EpsOutOfRange(eps));
    }
    Ok(())
}

/// f(x) = (2/pi) sin x.
pub fn make_sine(eps: f64) -> Result<CoefficientProfile> {
    check_eps(eps)?;
    Ok(CoefficientProfile {
        kind: ProfileKind::Sine,
        eps,
        f: Arc::new(|x: f64| FPRIME0 * x.sin()),
        fprime0: FPRIME0,
        fprime_pi: -FPRIME0,
        fsecond0: Some(0.0),
        fsecond_pi: Some(0.0),
        breakpoints: Vec::new(),
    })
}

/// The piecewise-linear hat: slope 2/pi out of each zero of f.
pub fn make_piecewise_linear(eps: f64) -> Result<CoefficientProfile> {
    check_eps(eps)?;
    Ok(CoefficientProfile {
        kind: ProfileKind::PiecewiseLinear,
        eps,
        f: Arc::new(piecewise_linear_eval),
        fprime0: FPRIME0,
        fprime_pi: -FPRIME0,
        fsecond0: Some(0.0),
        fsecond_pi: Some(0.0),
        breakpoints: vec![-FRAC_PI_2, FRAC_PI_2],
    })
}

fn piecewise_linear_eval(x: f64) -> f64 {
    // reduce to [-pi, pi); the final + 0.0 normalizes -0.0 at the lattice
    let mut t = (x + PI).rem_euclid(2.0 * PI) - PI;
    if t == PI {
        t = -PI;
    }
    let v = if t <= -FRAC_PI_2 {
        -FPRIME0 * (t + PI)
    } else if t <= FRAC_PI_2 {
        FPRIME0 * t
    } else {
        FPRIME0 * (PI - t)
    };
    v + 0.0
}

/// Endpoint derivative data supplied with a sampled coefficient.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EndpointDerivatives {
    pub fprime0: f64,
    pub fprime_pi: f64,
    #[serde(default)]
    pub fsecond0: Option<f64>,
    #[serde(default)]
    pub fsecond_pi: Option<f64>,
}

/// Build a profile from samples of f on (0, pi).
///
/// The evaluator interpolates with a monotonicity-preserving cubic (so
/// positivity of the samples carries over to the interpolant) and is
/// extended to the rest of the line by oddness and anti-periodicity.
pub fn make_custom(
    samples: &[(f64, f64)],
    eps: f64,
    derivs: EndpointDerivatives,
) -> Result<CoefficientProfile> {
    check_eps(eps)?;
    if (derivs.fprime0 - FPRIME0).abs() > SLOPE_TOL {
        return Err(Error::BadEndpointSlope(derivs.fprime0));
    }
    let mut pts: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|&(x, _)| x > 0.0 && x < PI)
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| a.0 == b.0);
    if pts.len() < 4 || pts[0].0 > 0.5 || pts[pts.len() - 1].0 < PI - 0.5 {
        return Err(Error::InsufficientSamples);
    }
    for &(x, fx) in &pts {
        if fx <= 0.0 {
            return Err(Error::NonPositiveCoefficient { x, value: fx });
        }
    }

    let interp = MonotoneCubic::build(&pts, derivs.fprime0, derivs.fprime_pi);
    let interp = Arc::new(interp);
    let eval = {
        let interp = interp.clone();
        move |x: f64| {
            // reduce to [-pi, pi), then to (0, pi) by oddness
            let mut t = (x + PI).rem_euclid(2.0 * PI) - PI;
            if t == PI {
                t = -PI;
            }
            if t >= 0.0 {
                interp.eval(t) + 0.0
            } else {
                -interp.eval(-t) + 0.0
            }
        }
    };
    Ok(CoefficientProfile {
        kind: ProfileKind::Custom,
        eps,
        f: Arc::new(eval),
        fprime0: derivs.fprime0,
        fprime_pi: derivs.fprime_pi,
        fsecond0: derivs.fsecond0,
        fsecond_pi: derivs.fsecond_pi,
        breakpoints: Vec::new(),
    })
}

impl CoefficientProfile {
    pub fn kind(&self) -> ProfileKind {
        self.kind
    }
    pub fn eps(&self) -> f64 {
        self.eps
    }
    pub fn fprime0(&self) -> f64 {
        self.fprime0
    }
    pub fn fprime_pi(&self) -> f64 {
        self.fprime_pi
    }
    pub fn fsecond0(&self) -> Option<f64> {
        self.fsecond0
    }
    pub fn fsecond_pi(&self) -> Option<f64> {
        self.fsecond_pi
    }
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    /// Short identifier used in result files.
    pub fn id(&self) -> String {
        format!("{}(eps={})", self.kind, self.eps)
    }

    /// Points in (0, pi) where the integrator must not straddle a step
    /// (one-sided derivatives of f differ there).
    pub fn interior_nodes(&self) -> Vec<f64> {
        self.breakpoints
            .iter()
            .copied()
            .filter(|&b| b > 0.0 && b < PI)
            .collect()
    }

    /// Construct a profile directly from parts, without the slope
    /// normalization check (test fixtures for the validator).
    #[cfg(test)]
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        kind: ProfileKind,
        eps: f64,
        f: Evaluator,
        fprime0: f64,
        fprime_pi: f64,
        fsecond0: Option<f64>,
        fsecond_pi: Option<f64>,
        breakpoints: Vec<f64>,
    ) -> CoefficientProfile {
        CoefficientProfile {
            kind,
            eps,
            f,
            fprime0,
            fprime_pi,
            fsecond0,
            fsecond_pi,
            breakpoints,
        }
    }

    /// Replace f on [0, delta] and [pi-delta, pi] by the chords through the
    /// endpoint zeros, keeping f elsewhere. The resulting profile has
    /// fprime0 = f(delta)/delta, which tends to 2/pi as delta -> 0.
    pub fn linearized_near_endpoints(&self, delta: f64) -> Result<CoefficientProfile> {
        if !(delta > 0.0 && delta < FRAC_PI_2) {
            return Err(Error::InvalidConfig(format!(
                "linearization width {delta} outside (0, pi/2)"
            )));
        }
        let slope0 = self.eval(delta) / delta;
        let slope_pi = -self.eval(PI - delta) / delta;
        let base = self.f.clone();
        let eval = move |x: f64| {
            let mut t = (x + PI).rem_euclid(2.0 * PI) - PI;
            if t == PI {
                t = -PI;
            }
            let (s, sign) = if t >= 0.0 { (t, 1.0) } else { (-t, -1.0) };
            let v = if s <= delta {
                slope0 * s
            } else if s >= PI - delta {
                -slope_pi * (PI - s)
            } else {
                base(s)
            };
            sign * v + 0.0
        };
        let mut breakpoints: Vec<f64> = self
            .breakpoints
            .iter()
            .copied()
            .filter(|&b| {
                let a = b.abs();
                a > delta && a < PI - delta
            })
            .collect();
        breakpoints.extend_from_slice(&[
            -PI + delta,
            -delta,
            delta,
            PI - delta,
        ]);
        breakpoints.sort_by(f64::total_cmp);
        Ok(CoefficientProfile {
            kind: ProfileKind::Custom,
            eps: self.eps,
            f: Arc::new(eval),
            fprime0: slope0,
            fprime_pi: slope_pi,
            fsecond0: Some(0.0),
            fsecond_pi: Some(0.0),
            breakpoints,
        })
    }
}

// ---------------------------------------------------------------------------
// Shape-preserving interpolation (Fritsch-Carlson slopes, cubic Hermite)
// ---------------------------------------------------------------------------

struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ms: Vec<f64>,
}

impl MonotoneCubic {
    /// `pts` are strictly increasing interior samples on (0, pi); the curve is
    /// pinned to 0 at both ends with the prescribed slopes.
    fn build(pts: &[(f64, f64)], slope0: f64, slope_pi: f64) -> MonotoneCubic {
        let mut xs = Vec::with_capacity(pts.len() + 2);
        let mut ys = Vec::with_capacity(pts.len() + 2);
        xs.push(0.0);
        ys.push(0.0);
        for &(x, y) in pts {
            xs.push(x);
            ys.push(y);
        }
        xs.push(PI);
        ys.push(0.0);

        let n = xs.len();
        let h: Vec<f64> = (0..n - 1).map(|i| xs[i + 1] - xs[i]).collect();
        let d: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();

        let mut ms = vec![0.0; n];
        ms[0] = slope0;
        ms[n - 1] = slope_pi;
        for i in 1..n - 1 {
            if d[i - 1] * d[i] <= 0.0 {
                ms[i] = 0.0;
            } else {
                // weighted harmonic mean keeps the interpolant monotone
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                ms[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        MonotoneCubic { xs, ys, ms }
    }

    fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0] + self.ms[0] * (x - self.xs[0]);
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1] + self.ms[n - 1] * (x - self.xs[n - 1]);
        }
        let i = match self.xs.partition_point(|&t| t <= x) {
            0 => 0,
            k => k - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i] + h10 * h * self.ms[i] + h01 * self.ys[i + 1] + h11 * h * self.ms[i + 1]
    }
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub max_violation: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<HypothesisCheck>,
    pub pass: bool,
}

/// Check the structural hypotheses on a sampling grid: oddness,
/// anti-periodicity, positivity on (0, pi), the slope normalization and the
/// eps range. Report-only; never fails.
pub fn validate(profile: &CoefficientProfile, grid_size: usize) -> ValidationReport {
    let n = grid_size.max(16);
    let mut fmax: f64 = 0.0;
    for k in 0..=n {
        let x = -PI + 2.0 * PI * (k as f64) / (n as f64);
        fmax = fmax.max(profile.eval(x).abs());
    }
    let scale = fmax.max(f64::MIN_POSITIVE);
    let tol = VALIDATION_TOL * scale;

    let mut odd: f64 = 0.0;
    let mut anti: f64 = 0.0;
    let mut pos: f64 = 0.0;
    for k in 1..n {
        let x = -PI + PI * (k as f64) / (n as f64); // x in (-pi, 0)
        anti = anti.max((profile.eval(x + PI) + profile.eval(x)).abs());
        odd = odd.max((profile.eval(-x) + profile.eval(x)).abs());
        let xi = PI * (k as f64) / (n as f64); // xi in (0, pi)
        let v = profile.eval(xi);
        if v <= 0.0 {
            pos = pos.max(-v + f64::MIN_POSITIVE);
        }
    }

    // slope at 0 from three extrapolated secants (kills the h and h^2
    // curvature terms, which otherwise dominate for interpolated profiles);
    // h is large enough that the ulp(pi)/h evaluation noise stays below the
    // tolerance as well
    let h = 1e-4;
    let g = |t: f64| profile.eval(t) / t;
    let slope_est = (8.0 * g(h) - 6.0 * g(2.0 * h) + g(4.0 * h)) / 3.0;
    let slope_violation = (slope_est - FPRIME0).abs();

    let eps_violation = if profile.eps() > 0.0 && profile.eps() < FRAC_PI_2 {
        0.0
    } else {
        f64::INFINITY
    };
    let bp_violation = profile
        .breakpoints()
        .iter()
        .map(|b| {
            let r = (b / PI - (b / PI).round()).abs();
            if r < 1e-12 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .fold(0.0f64, f64::max);

    let checks = vec![
        HypothesisCheck {
            name: "oddness f(-x) = -f(x)".into(),
            max_violation: odd,
            tol,
            pass: odd < tol,
        },
        HypothesisCheck {
            name: "anti-periodicity f(x+pi) = -f(x)".into(),
            max_violation: anti,
            tol,
            pass: anti < tol,
        },
        HypothesisCheck {
            name: "positivity on (0, pi)".into(),
            max_violation: pos,
            tol,
            pass: pos < tol,
        },
        HypothesisCheck {
            name: "slope normalization f'(0) = 2/pi".into(),
            max_violation: slope_violation,
            tol,
            pass: slope_violation < tol,
        },
        HypothesisCheck {
            name: "eps in (0, pi/2)".into(),
            max_violation: eps_violation,
            tol,
            pass: eps_violation < tol,
        },
        HypothesisCheck {
            name: "breakpoints exclude pi*Z".into(),
            max_violation: bp_violation,
            tol,
            pass: bp_violation < tol,
        },
    ];
    let pass = checks.iter().all(|c| c.pass);
    ValidationReport { checks, pass }
}

// ---------------------------------------------------------------------------
// Derived weights p and w = p/f
// ---------------------------------------------------------------------------

/// The integrating factor p and weight w of the transformed equation
/// -(p u')' = l w u on (0, pi), normalized by p(pi/2) = f(pi/2).
#[derive(Clone)]
pub struct DerivedWeights {
    profile: CoefficientProfile,
    normalization_point: f64,
}

impl DerivedWeights {
    pub fn new(profile: &CoefficientProfile) -> DerivedWeights {
        DerivedWeights {
            profile: profile.clone(),
            normalization_point: FRAC_PI_2,
        }
    }

    pub fn normalization_point(&self) -> f64 {
        self.normalization_point
    }

    /// p(x) = f(x) exp(int_{pi/2}^x dt / (eps f(t))).
    pub fn eval_p(&self, x: f64) -> Result<f64> {
        if !(DELTA_MIN..=PI - DELTA_MIN).contains(&x) {
            return Err(Error::QuadratureEndpoint);
        }
        let eps = self.profile.eps();
        let prof = self.profile.clone();
        // integrate piecewise between interior kinks of f
        let (a, b) = if x < self.normalization_point {
            (x, self.normalization_point)
        } else {
            (self.normalization_point, x)
        };
        let mut cuts: Vec<f64> = vec![a];
        for &bp in &self.profile.interior_nodes() {
            if bp > a && bp < b {
                cuts.push(bp);
            }
        }
        cuts.push(b);
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let r = quad::integrate(
                |t| 1.0 / (eps * prof.eval(t)),
                w[0],
                w[1],
                1e-12,
                1e-14,
                4000,
            )
            .ok_or(Error::QuadratureEndpoint)?;
            total += r.value;
        }
        if x < self.normalization_point {
            total = -total;
        }
        Ok(self.profile.eval(x) * total.exp())
    }

    /// w(x) = p(x)/f(x).
    pub fn eval_w(&self, x: f64) -> Result<f64> {
        Ok(self.eval_p(x)? / self.profile.eval(x))
    }
}

// ---------------------------------------------------------------------------
// WKB seeds
// ---------------------------------------------------------------------------

/// The inverse-sqrt action integral I = int_0^pi f(x)^{-1/2} dx, computed
/// with the substitution x = s^2 (resp. pi - x = s^2) so the endpoint
/// integrands stay bounded.
pub fn action_integral(profile: &CoefficientProfile) -> Result<f64> {
    let mid = FRAC_PI_2;
    // within rounding of the endpoints, f(s^2) ~ slope s^2 gives the limit
    // 2/sqrt(slope) for the substituted integrand
    let slope0 = profile.fprime0();
    let slope_pi = -profile.fprime_pi();
    let left = quad::integrate(
        |s| {
            let f = profile.eval(s * s);
            if f > 0.0 {
                2.0 * s / f.sqrt()
            } else {
                2.0 / slope0.sqrt()
            }
        },
        0.0,
        mid.sqrt(),
        1e-10,
        1e-13,
        20000,
    )
    .ok_or(Error::QuadratureEndpoint)?;
    let right = quad::integrate(
        |s| {
            let f = profile.eval(PI - s * s);
            if f > 0.0 {
                2.0 * s / f.sqrt()
            } else {
                2.0 / slope_pi.sqrt()
            }
        },
        0.0,
        (PI - mid).sqrt(),
        1e-10,
        1e-13,
        20000,
    )
    .ok_or(Error::QuadratureEndpoint)?;
    Ok(left.value + right.value)
}

/// WKB seed for the n-th auxiliary eigenvalue: (n/I)^2. Only a bracketing
/// aid for the zero search; strictly increasing and exactly quadratic in n.
pub fn wkb_guess(profile: &CoefficientProfile, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidConfig("wkb_guess needs n >= 1".into()));
    }
    let action = action_integral(profile)?;
    Ok((n as f64 / action).powi(2))
}

// ---------------------------------------------------------------------------
// JSON descriptor (external interface)
// ---------------------------------------------------------------------------

/// On-disk description of a coefficient, as accepted by the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoeffDescriptor {
    pub kind: ProfileKind,
    pub eps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fprime0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "fprimePi")]
    pub fprime_pi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fsecond0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "fsecondPi")]
    pub fsecond_pi: Option<f64>,
}

impl CoeffDescriptor {
    pub fn build(&self) -> Result<CoefficientProfile> {
        match self.kind {
            ProfileKind::Sine => make_sine(self.eps),
            ProfileKind::PiecewiseLinear => make_piecewise_linear(self.eps),
            ProfileKind::Custom => {
                let samples: Vec<(f64, f64)> = self
                    .samples
                    .as_ref()
                    .ok_or(Error::InsufficientSamples)?
                    .iter()
                    .map(|p| (p[0], p[1]))
                    .collect();
                let derivs = EndpointDerivatives {
                    fprime0: self.fprime0.unwrap_or(FPRIME0),
                    fprime_pi: self.fprime_pi.unwrap_or(-FPRIME0),
                    fsecond0: self.fsecond0,
                    fsecond_pi: self.fsecond_pi,
                };
                make_custom(&samples, self.eps, derivs)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn sine_values() {
        let p = make_sine(0.5).unwrap();
        assert_relative_eq!(p.eval(FRAC_PI_2), FPRIME0, max_relative = 1e-15);
        assert_relative_eq!(p.eval(-FRAC_PI_2), -FPRIME0, max_relative = 1e-15);
        assert_relative_eq!(p.fprime_pi(), -FPRIME0);
        assert_eq!(p.fsecond0(), Some(0.0));
        assert!(p.breakpoints().is_empty());
    }

    #[test]
    fn sine_rejects_bad_eps() {
        assert!(matches!(make_sine(0.0), Err(Error::EpsOutOfRange(_))));
        assert!(matches!(make_sine(FRAC_PI_2), Err(Error::EpsOutOfRange(_))));
        assert!(matches!(make_sine(2.0), Err(Error::EpsOutOfRange(_))));
    }

    #[test]
    fn piecewise_linear_branch_values() {
        let p = make_piecewise_linear(0.5).unwrap();
        assert_relative_eq!(p.eval(PI / 4.0), 0.5, max_relative = 1e-15);
        assert_relative_eq!(p.eval(3.0 * PI / 4.0), 0.5, max_relative = 1e-15);
        // continuity at the kink: both branches give 1
        assert_relative_eq!(p.eval(FRAC_PI_2), 1.0, max_relative = 1e-15);
        assert_relative_eq!(p.eval(FRAC_PI_2 - 1e-12), 1.0, epsilon = 1e-11);
        assert_relative_eq!(p.eval(FRAC_PI_2 + 1e-12), 1.0, epsilon = 1e-11);
    }

    #[test]
    fn custom_matches_sine() {
        let samples: Vec<(f64, f64)> = (1..64)
            .map(|k| {
                let x = PI * (k as f64) / 64.0;
                (x, FPRIME0 * x.sin())
            })
            .collect();
        let derivs = EndpointDerivatives {
            fprime0: FPRIME0,
            fprime_pi: -FPRIME0,
            fsecond0: Some(0.0),
            fsecond_pi: Some(0.0),
        };
        let p = make_custom(&samples, 0.5, derivs).unwrap();
        assert_relative_eq!(p.eval(FRAC_PI_2), FPRIME0, epsilon = 1e-6);
        // odd extension
        assert_relative_eq!(p.eval(-1.0), -p.eval(1.0), epsilon = 1e-14);
    }

    #[test]
    fn custom_rejects_negative_sample() {
        let mut samples: Vec<(f64, f64)> = (1..64)
            .map(|k| {
                let x = PI * (k as f64) / 64.0;
                (x, FPRIME0 * x.sin())
            })
            .collect();
        samples[20].1 = -0.1;
        let derivs = EndpointDerivatives {
            fprime0: FPRIME0,
            fprime_pi: -FPRIME0,
            fsecond0: None,
            fsecond_pi: None,
        };
        assert!(matches!(
            make_custom(&samples, 0.5, derivs),
            Err(Error::NonPositiveCoefficient { .. })
        ));
    }

    #[test]
    fn custom_rejects_bad_slope() {
        let samples: Vec<(f64, f64)> = (1..64)
            .map(|k| {
                let x = PI * (k as f64) / 64.0;
                (x, FPRIME0 * x.sin())
            })
            .collect();
        let derivs = EndpointDerivatives {
            fprime0: 1.0,
            fprime_pi: -FPRIME0,
            fsecond0: None,
            fsecond_pi: None,
        };
        assert!(matches!(
            make_custom(&samples, 0.5, derivs),
            Err(Error::BadEndpointSlope(_))
        ));
    }

    #[test]
    fn validation_passes_builtins() {
        assert!(validate(&make_sine(0.5).unwrap(), 256).pass);
        assert!(validate(&make_piecewise_linear(1.0).unwrap(), 256).pass);
    }

    #[test]
    fn validation_catches_wrong_slope() {
        // f(x) = x/pi on (0, pi), extended oddly: slope 1/pi, not 2/pi
        let p = CoefficientProfile::from_parts(
            ProfileKind::Custom,
            0.5,
            Arc::new(|x: f64| {
                let t = (x + PI).rem_euclid(2.0 * PI) - PI;
                t / PI
            }),
            1.0 / PI,
            1.0 / PI,
            None,
            None,
            Vec::new(),
        );
        let report = validate(&p, 256);
        assert!(!report.pass);
        let slope = report
            .checks
            .iter()
            .find(|c| c.name.contains("slope"))
            .unwrap();
        assert!(!slope.pass);
    }

    #[test]
    fn p_normalization_and_closed_form() {
        // sine: p(pi/2) = f(pi/2) by normalization
        let w = DerivedWeights::new(&make_sine(0.5).unwrap());
        assert_relative_eq!(w.eval_p(FRAC_PI_2).unwrap(), FPRIME0, max_relative = 1e-10);

        // piecewise linear on (0, pi/2): 1/(eps f) = nu/t, so
        // p(x) = f(x) (x/(pi/2))^{pi/(2 eps)}
        let eps = 0.5;
        let nu = PI / (2.0 * eps);
        let w = DerivedWeights::new(&make_piecewise_linear(eps).unwrap());
        let x = PI / 4.0;
        let expect = (FPRIME0 * x) * (x / FRAC_PI_2).powf(nu);
        assert_relative_eq!(w.eval_p(x).unwrap(), expect, max_relative = 1e-9);
    }

    #[test]
    fn p_asymptotic_ratio_near_zero() {
        // p(x) ~ x^{pi/(2 eps)} f(x) as x -> 0+: the ratio stabilizes
        let eps = 0.5;
        let nu = PI / (2.0 * eps);
        let prof = make_sine(eps).unwrap();
        let w = DerivedWeights::new(&prof);
        let ratios: Vec<f64> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&x| w.eval_p(x).unwrap() / (x.powf(nu) * prof.eval(x)))
            .collect();
        assert!(ratios.iter().all(|r| r.is_finite() && *r > 0.0));
        assert_relative_eq!(ratios[1] / ratios[0], 1.0, epsilon = 0.02);
        assert_relative_eq!(ratios[2] / ratios[1], 1.0, epsilon = 0.01);
    }

    #[test]
    fn p_asymptotic_ratio_near_pi() {
        let eps = 0.5;
        let nu = PI / (2.0 * eps);
        let prof = make_sine(eps).unwrap();
        let w = DerivedWeights::new(&prof);
        let ratios: Vec<f64> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&d| {
                let x = PI - d;
                w.eval_p(x).unwrap() * (PI - x).powf(nu) / prof.eval(x)
            })
            .collect();
        assert_relative_eq!(ratios[1] / ratios[0], 1.0, epsilon = 0.02);
        assert_relative_eq!(ratios[2] / ratios[1], 1.0, epsilon = 0.01);
    }

    #[test]
    fn p_rejects_endpoint() {
        let w = DerivedWeights::new(&make_sine(0.5).unwrap());
        assert!(w.eval_p(1e-9).is_err());
        assert!(w.eval_p(PI).is_err());
    }

    #[test]
    fn action_integral_piecewise_linear_analytic() {
        // I = 2 int_0^{pi/2} (2t/pi)^{-1/2} dt = 2 pi
        let p = make_piecewise_linear(0.7).unwrap();
        assert_relative_eq!(action_integral(&p).unwrap(), 2.0 * PI, max_relative = 1e-9);
    }

    #[test]
    fn action_integral_sine_finite() {
        let p = make_sine(0.5).unwrap();
        let action = action_integral(&p).unwrap();
        assert!(action.is_finite() && action > 0.0);
        // slightly larger than the piecewise-linear value since sin x <= the hat
        assert!(action > 2.0 * PI);
    }

    #[test]
    fn wkb_quadratic_scaling() {
        let p = make_piecewise_linear(0.5).unwrap();
        let m1 = wkb_guess(&p, 2).unwrap();
        let m2 = wkb_guess(&p, 4).unwrap();
        assert_relative_eq!(m2 / m1, 4.0, max_relative = 1e-14);
        let seq: Vec<f64> = (1..8).map(|n| wkb_guess(&p, n).unwrap()).collect();
        assert!(seq.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn descriptor_roundtrip() {
        let d = CoeffDescriptor {
            kind: ProfileKind::Sine,
            eps: 0.5,
            samples: None,
            fprime0: None,
            fprime_pi: None,
            fsecond0: None,
            fsecond_pi: None,
        };
        let s = serde_json::to_string(&d).unwrap();
        assert!(s.contains("\"kind\":\"sine\""));
        let back: CoeffDescriptor = serde_json::from_str(&s).unwrap();
        assert_eq!(back.kind, ProfileKind::Sine);
        assert!(back.build().is_ok());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn oddness_everywhere(x in -PI..PI) {
            for p in [make_sine(0.5).unwrap(), make_piecewise_linear(0.9).unwrap()] {
                let v = p.eval(x) + p.eval(-x);
                prop_assert!(v.abs() < 1e-10 * FPRIME0);
            }
        }

        #[test]
        fn anti_periodicity_everywhere(x in -PI..0.0) {
            for p in [make_sine(0.5).unwrap(), make_piecewise_linear(0.9).unwrap()] {
                let v = p.eval(x + PI) + p.eval(x);
                prop_assert!(v.abs() < 1e-10 * FPRIME0);
            }
        }
    }
}
