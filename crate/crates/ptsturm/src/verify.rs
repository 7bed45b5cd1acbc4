//! The verification suite: every claim the toolkit certifies, run end to
//! end at pinned tolerances. Each check returns one pass/fail outcome; the
//! `verify` CLI command and the acceptance test target both drive this
//! module.

use crate::coeff::{make_piecewise_linear, make_sine};
use crate::error::Result;
use crate::shoot::{self, OdeOptions};
use crate::spectrum::{self, BoxSpec};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt::Write as _;
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub millis: u128,
}

pub const CHECK_NAMES: [&str; 8] = [
    "reality",
    "oracle",
    "wronskian",
    "sectors",
    "zeros",
    "galerkin",
    "delta",
    "symmetry",
];

/// Run the suite (optionally a single named check) at the given integrator
/// tolerances. The acceptance thresholds themselves are pinned here and do
/// not move with the options.
pub fn run_all(only: Option<&str>, opts: &OdeOptions) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    for &name in CHECK_NAMES.iter() {
        if let Some(filter) = only {
            if filter != name {
                continue;
            }
        }
        let start = Instant::now();
        let result = match name {
            "reality" => check_reality(opts),
            "oracle" => check_oracle(opts),
            "wronskian" => check_wronskian(),
            "sectors" => check_sectors(opts),
            "zeros" => check_zeros(opts),
            "galerkin" => check_galerkin(opts),
            "delta" => check_delta(opts),
            "symmetry" => check_symmetry(opts),
            _ => unreachable!(),
        };
        let millis = start.elapsed().as_millis();
        let outcome = match result {
            Ok((pass, detail)) => CheckOutcome {
                name,
                pass,
                detail,
                millis,
            },
            Err(e) => CheckOutcome {
                name,
                pass: false,
                detail: format!("error: {e}"),
                millis,
            },
        };
        out.push(outcome);
    }
    out
}

/// Print the table and return true iff everything passed.
pub fn report(outcomes: &[CheckOutcome]) -> bool {
    let mut all = true;
    for o in outcomes {
        println!(
            "{} {:<10} ({:>6} ms)  {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.name,
            o.millis,
            o.detail
        );
        all &= o.pass;
    }
    all
}

// ---------------------------------------------------------------------------
// 1. Reality of the spectrum: locate the lowest 8 eigenvalue pairs and
//    certify by contour count that the box [-L, L] x [-2, 2] holds exactly
//    those roots (8 pairs + the trivial zero = 17).
// ---------------------------------------------------------------------------

fn check_reality(opts: &OdeOptions) -> Result<(bool, String)> {
    let mut pass = true;
    let mut detail = String::new();
    for (label, profile) in [
        ("sine eps=0.5", make_sine(0.5)?),
        ("sine eps=1.0", make_sine(1.0)?),
        ("pl eps=0.5", make_piecewise_linear(0.5)?),
        ("pl eps=1.0", make_piecewise_linear(1.0)?),
    ] {
        let eigs = spectrum::find_real_eigs(&profile, (0.0, shoot::LAM_MAX), 9, opts)?;
        let resid_ok = eigs
            .iter()
            .take(8)
            .all(|e| e.residual <= 1e-6 * (1.0 + e.lambda.abs()));
        let lam_cap = 0.5 * (eigs[7].lambda + eigs[8].lambda);
        let bx = BoxSpec {
            re0: -lam_cap,
            re1: lam_cap,
            im0: -2.0,
            im1: 2.0,
        };
        let report = spectrum::certify_box(&profile, &bx, 17, opts)?;
        let ok = resid_ok && report.ok && report.snap_defect <= 0.01;
        pass &= ok;
        let _ = write!(
            detail,
            "[{label}: count {} (want 17), snap {:.1e}] ",
            report.winding, report.snap_defect
        );
    }
    Ok((pass, detail))
}

// ---------------------------------------------------------------------------
// 2. Closed-form oracle: shooting phi(pi, .) against the Bessel matching on
//    a 10x10 lambda grid, piecewise-linear profile.
// ---------------------------------------------------------------------------

fn check_oracle(opts: &OdeOptions) -> Result<(bool, String)> {
    let eps = 0.5;
    let profile = make_piecewise_linear(eps)?;
    let mut worst = 0.0f64;
    let mut used = 0usize;
    for i in 0..10 {
        for j in 0..10 {
            let lam = Complex64::new(
                -5.0 + 10.0 * (i as f64) / 9.0,
                -5.0 + 10.0 * (j as f64) / 9.0,
            );
            // exclusion disk around the only matching singularity (lambda = 0)
            if lam.norm() < 0.1 {
                continue;
            }
            let shot = shoot::phi_pi_value(&profile, lam, opts)?;
            let closed = shoot::bessel_phi_at_pi(eps, lam)?;
            let rel = (shot - closed).norm() / closed.norm().max(1e-300);
            worst = worst.max(rel);
            used += 1;
        }
    }
    Ok((
        worst <= 1e-5,
        format!("sup rel diff {worst:.3e} over {used} grid points (tol 1e-5)"),
    ))
}

// ---------------------------------------------------------------------------
// 3. Wronskian identity at 100 random triples.
// ---------------------------------------------------------------------------

/// Small deterministic generator so the triples are reproducible without
/// pulling a dependency into the library.
pub(crate) struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

fn check_wronskian() -> Result<(bool, String)> {
    let mut rng = SplitMix(0x5eed_0001);
    let mut worst = 0.0f64;
    let mut n = 0usize;
    while n < 100 {
        let nu = rng.in_range(0.3, 6.0);
        if (nu - nu.round()).abs() < 5e-2 {
            continue;
        }
        let lam = Complex64::new(rng.in_range(-1.4, 1.4), rng.in_range(-1.4, 1.4));
        if lam.norm() < 0.05 {
            continue;
        }
        let z = rng.in_range(-1.0, 1.0);
        if z.abs() < 0.05 {
            continue;
        }
        let e = crate::bessel::zeta_functions(nu, lam, z)?;
        let w = e.zeta1 * e.dzeta2 - e.dzeta1 * e.zeta2;
        let want = crate::bessel::zeta_wronskian(nu, lam, z);
        worst = worst.max((w - want).norm() / want.norm());
        n += 1;
    }
    Ok((
        worst <= 1e-8,
        format!("worst rel error {worst:.3e} over 100 triples (tol 1e-8)"),
    ))
}

// ---------------------------------------------------------------------------
// 4. Sector claim for rho on a 16 x 64 polar grid, both profiles, eps = 0.5.
// ---------------------------------------------------------------------------

pub struct SectorCell {
    pub z: Complex64,
    pub modulus: f64,
    pub sector: Sector,
    pub flagged: bool,
    pub violates: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    Inner,
    Outer,
    Ray,
}

impl Sector {
    pub fn as_str(&self) -> &'static str {
        match self {
            Sector::Inner => "inner",
            Sector::Outer => "outer",
            Sector::Ray => "ray",
        }
    }
}

pub fn classify_sector(z: Complex64) -> Sector {
    // the inner sectors surround the real axis (arg near 0 mod pi), the
    // outer ones the imaginary axis; the pattern has period pi, not pi/2
    let a = z.arg().rem_euclid(PI);
    let d = a.min(PI - a);
    let diff = d - FRAC_PI_4;
    if diff.abs() < 1e-9 {
        Sector::Ray
    } else if diff < 0.0 {
        Sector::Inner
    } else {
        Sector::Outer
    }
}

/// Evaluate |rho| over a polar grid, skipping cells within a margin of the
/// imaginary-axis zeros +- i alpha_n.
pub fn sector_grid(
    profile: &crate::coeff::CoefficientProfile,
    radii: usize,
    angles: usize,
    r_max: f64,
    alphas: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<SectorCell>> {
    let margin = (0.02 * r_max).max(0.03);
    let mut points = Vec::with_capacity(radii * angles);
    for i in 1..=radii {
        let r = r_max * (i as f64) / (radii as f64);
        for j in 0..angles {
            let theta = 2.0 * PI * (j as f64) / (angles as f64);
            points.push(Complex64::from_polar(r, theta));
        }
    }
    let eval_cell = |&z: &Complex64| -> Result<SectorCell> {
        let sector = classify_sector(z);
        let near_zero = alphas.iter().any(|&a| {
            (z - Complex64::new(0.0, a)).norm() < margin
                || (z + Complex64::new(0.0, a)).norm() < margin
        });
        if near_zero {
            return Ok(SectorCell {
                z,
                modulus: f64::NAN,
                sector,
                flagged: true,
                violates: false,
            });
        }
        let rho = shoot::rho_general(profile, z, opts)?;
        let violates = match sector {
            Sector::Inner => rho.modulus >= 1.0,
            Sector::Outer => rho.modulus <= 1.0,
            Sector::Ray => (rho.modulus - 1.0).abs() > 1e-4,
        };
        Ok(SectorCell {
            z,
            modulus: rho.modulus,
            sector,
            flagged: false,
            violates,
        })
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        points.par_iter().map(eval_cell).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        points.iter().map(eval_cell).collect()
    }
}

fn check_sectors(opts: &OdeOptions) -> Result<(bool, String)> {
    let mut pass = true;
    let mut detail = String::new();
    for (label, profile) in [
        ("sine", make_sine(0.5)?),
        ("pl", make_piecewise_linear(0.5)?),
    ] {
        let alphas: Vec<f64> = spectrum::find_alphas(&profile, 8, opts)?
            .iter()
            .map(|a| a.alpha)
            .collect();
        let r_max = 0.9 * alphas[5];
        let cells = sector_grid(&profile, 16, 64, r_max, &alphas, opts)?;
        let violations = cells.iter().filter(|c| c.violates).count();
        let flagged = cells.iter().filter(|c| c.flagged).count();
        let max_inner = cells
            .iter()
            .filter(|c| !c.flagged && c.sector == Sector::Inner)
            .map(|c| c.modulus)
            .fold(0.0f64, f64::max);
        let min_outer = cells
            .iter()
            .filter(|c| !c.flagged && c.sector == Sector::Outer)
            .map(|c| c.modulus)
            .fold(f64::INFINITY, f64::min);
        pass &= violations == 0;
        let _ = write!(
            detail,
            "[{label}: violations {violations}, max inner {max_inner:.4}, min outer {min_outer:.4}, {flagged} cells near zeros skipped] "
        );
    }
    Ok((pass, detail))
}

// ---------------------------------------------------------------------------
// 5. Zeros on the negative imaginary axis: 12 found, positive, linear in n,
//    and the truncated product reproduces rho within its tail bound.
// ---------------------------------------------------------------------------

fn check_zeros(opts: &OdeOptions) -> Result<(bool, String)> {
    let profile = make_sine(0.5)?;
    let zeros = spectrum::find_alphas(&profile, 12, opts)?;
    let all_positive = zeros.iter().all(|a| a.r > 0.0);
    let resid_ok = zeros.iter().all(|a| a.residual <= 1e-6);

    // linear fit alpha_n ~ a n + b, coefficient of determination
    let n = zeros.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for z in &zeros {
        let x = z.n as f64;
        sx += x;
        sy += z.alpha;
        sxx += x * x;
        sxy += x * z.alpha;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let mean = sy / n;
    let (mut ss_res, mut ss_tot) = (0.0, 0.0);
    for z in &zeros {
        let fit = slope * z.n as f64 + intercept;
        ss_res += (z.alpha - fit) * (z.alpha - fit);
        ss_tot += (z.alpha - mean) * (z.alpha - mean);
    }
    let r2 = 1.0 - ss_res / ss_tot;

    // truncated product vs shooting at 20 sample points
    let alphas: Vec<f64> = zeros.iter().map(|z| z.alpha).collect();
    let mut rng = SplitMix(0x5eed_0005);
    let mut product_ok = true;
    let mut worst_ratio = 0.0f64;
    let mut k = 0;
    while k < 20 {
        let r = rng.in_range(0.1, 0.6 * alphas[0].max(1.0));
        let theta = rng.in_range(0.0, 2.0 * PI);
        let z = Complex64::from_polar(r, theta);
        if alphas.iter().any(|&a| {
            (z - Complex64::new(0.0, a)).norm() < 0.05
                || (z + Complex64::new(0.0, a)).norm() < 0.05
        }) {
            continue;
        }
        let pr = spectrum::rho_product(&alphas, z, 12)?;
        let direct = shoot::rho_general(&profile, z, opts)?.rho;
        let diff = (pr.value - direct).norm();
        let allowance = pr.tail_bound + 1e-7 * (1.0 + direct.norm());
        product_ok &= diff <= allowance;
        worst_ratio = worst_ratio.max(diff / allowance.max(1e-300));
        k += 1;
    }
    let pass = all_positive && resid_ok && r2 >= 0.999 && product_ok;
    Ok((
        pass,
        format!(
            "12 zeros positive: {all_positive}, residuals ok: {resid_ok}, R^2 = {r2:.6}, product worst diff/bound = {worst_ratio:.3}"
        ),
    ))
}

// ---------------------------------------------------------------------------
// 6. Galerkin cross-check at eps = 0.5 (matrix parameter 2 eps / pi), N = 64.
// ---------------------------------------------------------------------------

fn check_galerkin(opts: &OdeOptions) -> Result<(bool, String)> {
    let eps = 0.5;
    let matrix = spectrum::galerkin_matrix(2.0 * eps / PI, 64)?;
    let all = spectrum::galerkin_eigs(&matrix)?;
    // lowest six nonzero eigenvalues by modulus: three +- pairs
    let six: Vec<Complex64> = all
        .iter()
        .copied()
        .filter(|e| e.norm() > 1e-9)
        .take(6)
        .collect();
    let real_ok = six.iter().all(|e| e.im.abs() <= 1e-8 * (1.0 + e.re.abs()));
    let max_im = six.iter().map(|e| e.im.abs()).fold(0.0f64, f64::max);

    let profile = make_sine(eps)?;
    let shot = spectrum::find_real_eigs(&profile, (0.0, shoot::LAM_MAX), 3, opts)?;
    let mut oracle: Vec<f64> = six.iter().filter(|e| e.re > 0.0).map(|e| e.re).collect();
    oracle.sort_by(f64::total_cmp);
    let mut worst = 0.0f64;
    for (s, o) in shot.iter().zip(oracle.iter()) {
        worst = worst.max((s.lambda - o).abs() / o.abs());
    }
    let match_ok = oracle.len() == 3 && worst <= 1e-4;
    Ok((
        real_ok && match_ok,
        format!(
            "six lowest nonzero: max |Im| = {max_im:.2e} (tol 1e-8), shooting match worst {worst:.3e} (tol 1e-4)"
        ),
    ))
}

// ---------------------------------------------------------------------------
// 7. Endpoint-linearization convergence: differences strictly decreasing in
//    delta for each of the lowest 4 eigenvalues, sine profile.
// ---------------------------------------------------------------------------

fn check_delta(opts: &OdeOptions) -> Result<(bool, String)> {
    let profile = make_sine(0.5)?;
    let deltas = [0.3, 0.15, 0.075];
    let rows = spectrum::delta_family_experiment(&profile, &deltas, 4, opts)?;
    let mut pass = true;
    let mut detail = String::new();
    for n in 1..=4usize {
        let diffs: Vec<f64> = deltas
            .iter()
            .map(|&d| {
                rows.iter()
                    .find(|r| r.n == n && r.delta == d)
                    .map(|r| r.abs_diff)
                    .unwrap_or(f64::NAN)
            })
            .collect();
        let monotone = diffs.windows(2).all(|w| w[1] < w[0]);
        pass &= monotone;
        let _ = write!(
            detail,
            "[n={n}: {:.2e} > {:.2e} > {:.2e}] ",
            diffs[0], diffs[1], diffs[2]
        );
    }
    Ok((pass, detail))
}

// ---------------------------------------------------------------------------
// 8. Symmetry suite at 50 random lambda.
// ---------------------------------------------------------------------------

fn check_symmetry(opts: &OdeOptions) -> Result<(bool, String)> {
    let profile = make_sine(0.5)?;
    let mut rng = SplitMix(0x5eed_0008);
    let mut worst_reflect = 0.0f64;
    let mut worst_conj = 0.0f64;
    let mut worst_anti = 0.0f64;
    for _ in 0..50 {
        let lam = Complex64::new(rng.in_range(-3.0, 3.0), rng.in_range(-1.5, 1.5));
        // reflection: phi(-pi, lambda) = phi(pi, -lambda), left side run
        // over the negative half-interval
        let lhs = shoot::phi_at_minus_pi(&profile, lam, opts)?;
        let rhs = shoot::phi_pi_value(&profile, -lam, opts)?;
        worst_reflect = worst_reflect.max((lhs - rhs).norm() / rhs.norm().max(1e-12));
        // conjugation: phi(pi, -conj lambda) = conj phi(pi, lambda)
        let a = shoot::phi_pi_value(&profile, -lam.conj(), opts)?;
        let b = shoot::phi_pi_value(&profile, lam, opts)?.conj();
        worst_conj = worst_conj.max((a - b).norm() / b.norm().max(1e-12));
        // antisymmetry of d (with conjugation this forces the quadruple
        // structure of the zero set)
        let d1 = shoot::d_of_lambda(&profile, lam, opts)?;
        let d2 = shoot::d_of_lambda(&profile, -lam, opts)?;
        worst_anti = worst_anti.max((d1 + d2).norm() / d1.norm().max(1e-12));
    }
    let pass = worst_reflect <= 1e-7 && worst_conj <= 1e-7 && worst_anti <= 1e-7;
    Ok((
        pass,
        format!(
            "worst rel: reflection {worst_reflect:.3e}, conjugation {worst_conj:.3e}, d antisymmetry {worst_anti:.3e} (tol 1e-7)"
        ),
    ))
}
