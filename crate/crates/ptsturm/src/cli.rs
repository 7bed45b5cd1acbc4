//! Command-line surface: parse a coefficient descriptor, run a computation,
//! persist CSV/JSON artifacts and static SVG plots.
//!
//! Exit codes: 0 ok, 1 usage/config, 2 verification failure, 3 numeric
//! failure. Every run writes a `run_manifest.json` next to its outputs.

use crate::coeff::{CoeffDescriptor, CoefficientProfile};
use crate::error::Error;
use crate::shoot::{self, OdeOptions};
use crate::spectrum::{self, BoxSpec};
use crate::verify::{self, Sector};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_VERIFICATION: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "ptsturm",
    version,
    about = "Spectral solver and verifier for i eps (f u')' + i u' = lambda u on (-pi, pi)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Locate real eigenvalues and certify them by a contour count
    Eigs(EigsArgs),
    /// Locate the zeros of phi(pi, .) on the negative imaginary axis
    Alphas(AlphasArgs),
    /// Map |rho(z)| over a polar grid (CSV + SVG heat map)
    RhoMap(RhoMapArgs),
    /// Argument-principle zero count for a rectangle in the lambda plane
    Certify(CertifyArgs),
    /// Endpoint-linearization convergence experiment
    DeltaSweep(DeltaSweepArgs),
    /// Run the verification suite
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Built-in profile name (sine | piecewise_linear) or path to a JSON
    /// coefficient descriptor
    #[arg(long, default_value = "sine")]
    pub coeff: String,
    /// The eps of the operator (ignored when --coeff is a file)
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    /// Output directory
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Integrator relative tolerance
    #[arg(long, default_value_t = shoot::TOL_ODE)]
    pub tol_ode: f64,
    /// Root residual tolerance
    #[arg(long, default_value_t = spectrum::TOL_ROOT)]
    pub tol_root: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Oracle {
    Bessel,
    Galerkin,
    None,
}

#[derive(Args, Debug)]
pub struct EigsArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// How many positive eigenvalues to locate
    #[arg(long, default_value_t = 8)]
    pub count: usize,
    /// Independent cross-check column
    #[arg(long, value_enum, default_value_t = Oracle::None)]
    pub oracle: Oracle,
}

#[derive(Args, Debug)]
pub struct AlphasArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 12)]
    pub count: usize,
}

#[derive(Args, Debug)]
pub struct RhoMapArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Polar grid as RADIIxANGLES, e.g. 16x64
    #[arg(long, default_value = "16x64")]
    pub grid: String,
    /// Outer radius of the map (default: just inside the sixth zero)
    #[arg(long)]
    pub rmax: Option<f64>,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Rectangle re0,re1,im0,im1 in the lambda plane
    #[arg(long = "box", allow_hyphen_values = true)]
    pub bx: String,
}

#[derive(Args, Debug)]
pub struct DeltaSweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated linearization widths
    #[arg(long, default_value = "0.3,0.15,0.075")]
    pub deltas: String,
    #[arg(long, default_value_t = 4)]
    pub count: usize,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Run only the named check (reality, oracle, wronskian, sectors,
    /// zeros, galerkin, delta, symmetry)
    #[arg(long)]
    pub only: Option<String>,
}

/// Entry point used by both the binary and the in-process tests.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // clap handles --help/--version with success exits
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    init_thread_pool();
    let outcome = match cli.command {
        Command::Eigs(a) => cmd_eigs(a),
        Command::Alphas(a) => cmd_alphas(a),
        Command::RhoMap(a) => cmd_rho_map(a),
        Command::Certify(a) => cmd_certify(a),
        Command::DeltaSweep(a) => cmd_delta_sweep(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::EpsOutOfRange(_)
        | Error::NonPositiveCoefficient { .. }
        | Error::BadEndpointSlope(_)
        | Error::InsufficientSamples
        | Error::InvalidConfig(_)
        | Error::Io(_)
        | Error::Json(_) => EXIT_CONFIG,
        _ => EXIT_NUMERIC,
    }
}

fn init_thread_pool() {
    #[cfg(feature = "parallel")]
    {
        use std::sync::Once;
        static ONCE: Once = Once::new();
        ONCE.call_once(|| {
            if let Ok(v) = std::env::var("PTSTURM_THREADS") {
                if let Ok(n) = v.parse::<usize>() {
                    let _ = rayon::ThreadPoolBuilder::new()
                        .num_threads(n.max(1))
                        .build_global();
                }
            }
        });
    }
}

fn load_profile(common: &CommonArgs) -> crate::Result<CoefficientProfile> {
    match common.coeff.as_str() {
        "sine" => crate::coeff::make_sine(common.eps),
        "piecewise_linear" | "pl" => crate::coeff::make_piecewise_linear(common.eps),
        path => {
            let text = fs::read_to_string(path)?;
            let desc: CoeffDescriptor = serde_json::from_str(&text)?;
            desc.build()
        }
    }
}

fn ode_options(common: &CommonArgs) -> crate::Result<OdeOptions> {
    if common.tol_ode <= 0.0 || common.tol_root <= 0.0 {
        return Err(Error::InvalidConfig("tolerances must be positive".into()));
    }
    Ok(OdeOptions {
        rtol: common.tol_ode,
        atol: common.tol_ode * 1e-2,
        ..OdeOptions::default()
    })
}

fn write_manifest(
    common: &CommonArgs,
    command: &str,
    config: serde_json::Value,
    started: Instant,
) -> crate::Result<()> {
    let manifest = json!({
        "command": command,
        "config": config,
        "version": env!("CARGO_PKG_VERSION"),
        "tolerances": { "tol_ode": common.tol_ode, "tol_root": common.tol_root },
        "wall_ms": started.elapsed().as_millis() as u64,
    });
    fs::write(
        common.out.join("run_manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(())
}

fn ensure_out(dir: &Path) -> crate::Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// eigs
// ---------------------------------------------------------------------------

fn cmd_eigs(args: EigsArgs) -> crate::Result<i32> {
    let started = Instant::now();
    if args.count == 0 || args.count > 19 {
        return Err(Error::InvalidConfig("--count must be in 1..=19".into()));
    }
    let profile = load_profile(&args.common)?;
    let opts = ode_options(&args.common)?;
    ensure_out(&args.common.out)?;

    // one extra root so the certification box edge falls between roots
    let eigs = spectrum::find_real_eigs(&profile, (0.0, shoot::LAM_MAX), args.count + 1, &opts)?;
    let lam_cap = 0.5 * (eigs[args.count - 1].lambda + eigs[args.count].lambda);
    let bx = BoxSpec {
        re0: -lam_cap,
        re1: lam_cap,
        im0: -2.0,
        im1: 2.0,
    };
    let expected = 2 * args.count + 1;
    let report = spectrum::certify_box(&profile, &bx, expected, &opts)?;

    let oracle_col = match args.oracle {
        Oracle::None => None,
        Oracle::Bessel => {
            if profile.kind() != crate::coeff::ProfileKind::PiecewiseLinear {
                return Err(Error::InvalidConfig(
                    "the bessel oracle applies to the piecewise_linear profile only".into(),
                ));
            }
            let mut v = Vec::new();
            for e in eigs.iter().take(args.count) {
                let a = shoot::bessel_phi_at_pi(profile.eps(), Complex64::new(e.lambda, 0.0))?;
                let b = shoot::bessel_phi_at_pi(profile.eps(), Complex64::new(-e.lambda, 0.0))?;
                v.push((a - b).norm());
            }
            Some(("bessel_residual", v))
        }
        Oracle::Galerkin => {
            let m = spectrum::galerkin_matrix(2.0 * profile.eps() / PI, 64)?;
            let oracle = spectrum::galerkin_positive_eigs(&m, args.count)?;
            let v = eigs
                .iter()
                .take(args.count)
                .enumerate()
                .map(|(i, e)| {
                    oracle
                        .get(i)
                        .map(|o| (e.lambda - o).abs())
                        .unwrap_or(f64::NAN)
                })
                .collect();
            Some(("galerkin_distance", v))
        }
    };

    // CSV
    let box_str = format!(
        "{};{};{};{}",
        report.bx.re0, report.bx.re1, report.bx.im0, report.bx.im1
    );
    let mut csv = String::new();
    csv.push_str("n,lambda,residual,certified_box,box_count");
    if let Some((name, _)) = &oracle_col {
        csv.push(',');
        csv.push_str(name);
    }
    csv.push('\n');
    for (i, e) in eigs.iter().take(args.count).enumerate() {
        csv.push_str(&format!(
            "{},{},{},{},{}",
            e.n, e.lambda, e.residual, box_str, report.winding
        ));
        if let Some((_, v)) = &oracle_col {
            csv.push_str(&format!(",{}", v[i]));
        }
        csv.push('\n');
    }
    fs::write(args.common.out.join("eigs.csv"), csv)?;

    // JSON mirror
    let result = spectrum::SpectralResult {
        eps: profile.eps(),
        profile: profile.id(),
        trivial_zero: true,
        real_eigs: eigs.iter().take(args.count).copied().collect(),
        alphas: Vec::new(),
        contour_counts: vec![report.clone()],
        method: spectrum::MethodMeta {
            tol_ode: args.common.tol_ode,
            tol_root: args.common.tol_root,
            action_integral: crate::coeff::action_integral(&profile)?,
        },
    };
    fs::write(
        args.common.out.join("eigs.json"),
        serde_json::to_string_pretty(&result)?,
    )?;
    write_manifest(
        &args.common,
        "eigs",
        json!({"coeff": args.common.coeff, "eps": args.common.eps, "count": args.count}),
        started,
    )?;

    println!(
        "{} eigenvalue pairs, certification count {} (expected {expected}): {}",
        args.count,
        report.winding,
        if report.ok { "ok" } else { "MISMATCH" }
    );
    Ok(if report.ok { EXIT_OK } else { EXIT_VERIFICATION })
}

// ---------------------------------------------------------------------------
// alphas
// ---------------------------------------------------------------------------

fn cmd_alphas(args: AlphasArgs) -> crate::Result<i32> {
    let started = Instant::now();
    let profile = load_profile(&args.common)?;
    let opts = ode_options(&args.common)?;
    ensure_out(&args.common.out)?;

    let alphas = spectrum::find_alphas(&profile, args.count, &opts)?;
    let mut csv = String::from("n,alpha,r,residual,wkb_seed\n");
    for a in &alphas {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            a.n, a.alpha, a.r, a.residual, a.wkb_seed
        ));
    }
    fs::write(args.common.out.join("alphas.csv"), csv)?;
    fs::write(
        args.common.out.join("alphas.json"),
        serde_json::to_string_pretty(&alphas)?,
    )?;
    write_manifest(
        &args.common,
        "alphas",
        json!({"coeff": args.common.coeff, "eps": args.common.eps, "count": args.count}),
        started,
    )?;
    println!(
        "{} zeros located, alpha_1 = {}, alpha_{} = {}",
        alphas.len(),
        alphas[0].alpha,
        alphas.len(),
        alphas[alphas.len() - 1].alpha
    );
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// rho-map
// ---------------------------------------------------------------------------

fn parse_grid(s: &str) -> crate::Result<(usize, usize)> {
    let (r, a) = s
        .split_once('x')
        .ok_or_else(|| Error::InvalidConfig(format!("grid '{s}' is not RADIIxANGLES")))?;
    let radii: usize = r
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("bad radii '{r}'")))?;
    let angles: usize = a
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("bad angles '{a}'")))?;
    if radii < 2 || angles < 2 {
        return Err(Error::InvalidConfig("grid sizes must be >= 2".into()));
    }
    Ok((radii, angles))
}

fn cmd_rho_map(args: RhoMapArgs) -> crate::Result<i32> {
    let started = Instant::now();
    let profile = load_profile(&args.common)?;
    let opts = ode_options(&args.common)?;
    ensure_out(&args.common.out)?;
    let (radii, angles) = parse_grid(&args.grid)?;

    let alphas: Vec<f64> = spectrum::find_alphas(&profile, 8, &opts)?
        .iter()
        .map(|a| a.alpha)
        .collect();
    let r_max = args.rmax.unwrap_or(0.9 * alphas[5]);
    let cells = verify::sector_grid(&profile, radii, angles, r_max, &alphas, &opts)?;

    let mut csv = String::from("re_z,im_z,abs_rho,sector,violates_claim\n");
    for c in &cells {
        let modulus = if c.flagged {
            "pole/zero proximity".to_string()
        } else {
            format!("{}", c.modulus)
        };
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            c.z.re,
            c.z.im,
            modulus,
            c.sector.as_str(),
            c.violates
        ));
    }
    fs::write(args.common.out.join("rho.csv"), csv)?;
    fs::write(
        args.common.out.join("rho.svg"),
        render_rho_svg(&cells, radii, angles, r_max),
    )?;

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
    let violations = cells.iter().filter(|c| c.violates).count();
    write_manifest(
        &args.common,
        "rho-map",
        json!({"coeff": args.common.coeff, "eps": args.common.eps, "grid": args.grid, "rmax": r_max}),
        started,
    )?;
    println!(
        "max |rho| in inner sector {max_inner}, min |rho| in outer sector {min_outer}, {violations} violations"
    );
    Ok(if violations == 0 { EXIT_OK } else { EXIT_VERIFICATION })
}

/// Static polar heat map of log10 |rho| with the sector rays overlaid.
fn render_rho_svg(cells: &[verify::SectorCell], radii: usize, angles: usize, r_max: f64) -> String {
    let size = 640.0;
    let c0 = size / 2.0;
    let scale = (size / 2.0 - 30.0) / r_max;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n");
    let dr = r_max / radii as f64;
    let dth = 2.0 * PI / angles as f64;
    for cell in cells {
        let r = cell.z.norm();
        let th = cell.z.arg();
        let (r0, r1) = (r - 0.5 * dr, r + 0.5 * dr);
        let (t0, t1) = (th - 0.5 * dth, th + 0.5 * dth);
        let color = if cell.flagged {
            "#bbbbbb".to_string()
        } else {
            // log-modulus color: blue below 1, red above
            let v = (cell.modulus.log10() / 2.0).clamp(-1.0, 1.0);
            if v < 0.0 {
                let t = (-v * 255.0) as u8;
                format!("#{:02x}{:02x}ff", 255 - t, 255 - t)
            } else {
                let t = (v * 255.0) as u8;
                format!("#ff{:02x}{:02x}", 255 - t, 255 - t)
            }
        };
        let p = |rr: f64, tt: f64| (c0 + scale * rr * tt.cos(), c0 - scale * rr * tt.sin());
        let (x0, y0) = p(r0, t0);
        let (x1, y1) = p(r1, t0);
        let (x2, y2) = p(r1, t1);
        let (x3, y3) = p(r0, t1);
        svg.push_str(&format!(
            "<path d=\"M{x0:.1} {y0:.1} L{x1:.1} {y1:.1} A{:.1} {:.1} 0 0 0 {x2:.1} {y2:.1} L{x3:.1} {y3:.1} A{:.1} {:.1} 0 0 1 {x0:.1} {y0:.1} Z\" fill=\"{color}\" stroke=\"none\"/>\n",
            scale * r1,
            scale * r1,
            scale * r0,
            scale * r0
        ));
    }
    // the four sector-bounding rays arg z = pi/4 mod pi/2
    for k in 0..4 {
        let th = PI / 4.0 + (k as f64) * PI / 2.0;
        let x = c0 + scale * r_max * th.cos();
        let y = c0 - scale * r_max * th.sin();
        svg.push_str(&format!(
            "<line x1=\"{c0}\" y1=\"{c0}\" x2=\"{x:.1}\" y2=\"{y:.1}\" stroke=\"#222222\" stroke-width=\"1.2\" stroke-dasharray=\"6 4\"/>\n"
        ));
    }
    svg.push_str(&format!(
        "<text x=\"10\" y=\"{}\" font-family=\"monospace\" font-size=\"12\">|rho| map: blue &lt; 1 (real-axis sectors), red &gt; 1 (imaginary-axis sectors); grey = near a zero of g</text>\n",
        size - 10.0
    ));
    svg.push_str("</svg>\n");
    svg
}

// ---------------------------------------------------------------------------
// certify
// ---------------------------------------------------------------------------

fn parse_box(s: &str) -> crate::Result<BoxSpec> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidConfig(format!("box '{s}' is not re0,re1,im0,im1")))?;
    if parts.len() != 4 || parts[0] >= parts[1] || parts[2] >= parts[3] {
        return Err(Error::InvalidConfig(format!(
            "box '{s}' must be re0,re1,im0,im1 with re0<re1, im0<im1"
        )));
    }
    Ok(BoxSpec {
        re0: parts[0],
        re1: parts[1],
        im0: parts[2],
        im1: parts[3],
    })
}

fn cmd_certify(args: CertifyArgs) -> crate::Result<i32> {
    let started = Instant::now();
    let profile = load_profile(&args.common)?;
    let opts = ode_options(&args.common)?;
    ensure_out(&args.common.out)?;
    let bx = parse_box(&args.bx)?;

    // locate the real roots the box should contain
    let mut expected = 0usize;
    let crosses_axis = bx.im0 <= 0.0 && bx.im1 >= 0.0;
    if crosses_axis && bx.re0 <= 0.0 && bx.re1 >= 0.0 {
        expected += 1; // trivial zero
    }
    let reach = bx.re0.abs().max(bx.re1.abs());
    if crosses_axis && reach > 0.0 {
        let mut count_guess = 4usize;
        loop {
            let eigs =
                spectrum::find_real_eigs(&profile, (0.0, shoot::LAM_MAX), count_guess, &opts)?;
            let inside = |l: f64| l >= bx.re0 && l <= bx.re1;
            let pos_in = eigs.iter().filter(|e| inside(e.lambda)).count();
            let neg_in = eigs.iter().filter(|e| inside(-e.lambda)).count();
            if eigs.last().map(|e| e.lambda > reach).unwrap_or(true) || count_guess >= 20 {
                expected += pos_in + neg_in;
                break;
            }
            count_guess += 4;
        }
    }
    let report = spectrum::certify_box(&profile, &bx, expected, &opts)?;
    fs::write(
        args.common.out.join("certify.json"),
        serde_json::to_string_pretty(&report)?,
    )?;
    write_manifest(
        &args.common,
        "certify",
        json!({"coeff": args.common.coeff, "eps": args.common.eps, "box": args.bx}),
        started,
    )?;
    println!(
        "winding {} vs located roots {}: {}",
        report.winding,
        report.expected,
        if report.ok { "ok" } else { "MISMATCH" }
    );
    Ok(if report.ok { EXIT_OK } else { EXIT_VERIFICATION })
}

// ---------------------------------------------------------------------------
// delta-sweep
// ---------------------------------------------------------------------------

fn cmd_delta_sweep(args: DeltaSweepArgs) -> crate::Result<i32> {
    let started = Instant::now();
    let profile = load_profile(&args.common)?;
    let opts = ode_options(&args.common)?;
    ensure_out(&args.common.out)?;
    let deltas: Vec<f64> = args
        .deltas
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidConfig(format!("bad --deltas '{}'", args.deltas)))?;

    let rows = spectrum::delta_family_experiment(&profile, &deltas, args.count, &opts)?;
    let mut csv = String::from("delta,n,lambda_delta,lambda_limit,abs_diff\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            r.delta, r.n, r.lambda_delta, r.lambda_limit, r.abs_diff
        ));
    }
    fs::write(args.common.out.join("delta_sweep.csv"), csv)?;
    fs::write(
        args.common.out.join("delta_sweep.json"),
        serde_json::to_string_pretty(&rows)?,
    )?;
    write_manifest(
        &args.common,
        "delta-sweep",
        json!({"coeff": args.common.coeff, "eps": args.common.eps, "deltas": deltas, "count": args.count}),
        started,
    )?;
    println!("{} rows written", rows.len());
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(args: VerifyArgs) -> crate::Result<i32> {
    let started = Instant::now();
    ensure_out(&args.common.out)?;
    if let Some(only) = &args.only {
        if !verify::CHECK_NAMES.contains(&only.as_str()) {
            return Err(Error::InvalidConfig(format!(
                "unknown check '{only}'; available: {}",
                verify::CHECK_NAMES.join(", ")
            )));
        }
    }
    let opts = ode_options(&args.common)?;
    let outcomes = verify::run_all(args.only.as_deref(), &opts);
    let all_pass = verify::report(&outcomes);
    let report_json: Vec<serde_json::Value> = outcomes
        .iter()
        .map(|o| json!({"name": o.name, "pass": o.pass, "detail": o.detail, "ms": o.millis as u64}))
        .collect();
    fs::write(
        args.common.out.join("verify.json"),
        serde_json::to_string_pretty(&report_json)?,
    )?;
    write_manifest(
        &args.common,
        "verify",
        json!({"only": args.only, "tol_ode": args.common.tol_ode}),
        started,
    )?;
    Ok(if all_pass { EXIT_OK } else { EXIT_VERIFICATION })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::ProfileKind;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("16x64").unwrap(), (16, 64));
        assert!(parse_grid("16").is_err());
        assert!(parse_grid("1x64").is_err());
    }

    #[test]
    fn box_parsing() {
        let b = parse_box("-6,6,-2,2").unwrap();
        assert_eq!(b.re0, -6.0);
        assert_eq!(b.im1, 2.0);
        assert!(parse_box("6,-6,-2,2").is_err());
        assert!(parse_box("1,2,3").is_err());
    }

    #[test]
    fn builtin_profiles_resolve() {
        let c = CommonArgs {
            coeff: "piecewise_linear".into(),
            eps: 0.5,
            out: PathBuf::from("out"),
            tol_ode: 1e-10,
            tol_root: 1e-6,
        };
        assert_eq!(
            load_profile(&c).unwrap().kind(),
            ProfileKind::PiecewiseLinear
        );
        let bad = CommonArgs {
            coeff: "sine".into(),
            eps: 2.0,
            out: PathBuf::from("out"),
            tol_ode: 1e-10,
            tol_root: 1e-6,
        };
        assert!(matches!(load_profile(&bad), Err(Error::EpsOutOfRange(_))));
    }
}
