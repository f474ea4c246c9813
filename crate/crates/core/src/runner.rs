//! Command-line front end: `measure`, `verify`, `fekete` and `spectrum`.
//!
//! Exit codes: 0 success, 1 input or I/O error, 2 a verified property
//! fails, 3 results were produced but are degraded (warnings or failed radii).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::capacity::{
    fekete_on_curves, log_hadamard_product_max, n_diameter_brute, n_diameter_exchange_discrete, BruteForceOptions,
    CapacityOptions, FeketeOptions, FeketeResult, ImageCircle, DEFAULT_N_SEQUENCE, MAX_BRUTE_N, MAX_BRUTE_SAMPLES,
    MAX_REFINED_N,
};
use crate::convexity::{
    check_convexity, check_monotone_from_convexity, hadamard_three_circles_check, SampledFunction, Transform,
    EXACT_CONVEXITY_TOLERANCE,
};
use crate::curve::{sample_curve, shoelace_area, AREA_CHECK_SAMPLES};
use crate::error::{Error, Result};
use crate::laurent::{
    annulus_image_area, area_lemma_gap, check_prelim_constraint, AnnulusSpec, LaurentMap, MapDefinition,
    PRELIM_TOLERANCE,
};
use crate::measures::{
    build_report, log_uniform_grid, display_inequality_excess, validate_disk_case, MeasureOptions, MeasureReport,
    MIN_GRID,
};
use crate::spectral::{principal_frequency, EigenOptions, GridDomain, BESSEL_J0_FIRST_ZERO, POLYGON_SAMPLES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_DEGRADED: i32 = 3;

/// Lower bound for `T(r)` on every grid point.
pub const DEFICIENCY_FLOOR: f64 = -2e-3;
/// Largest `|T|` accepted for rotations.
pub const ROTATION_DEFICIENCY_BOUND: f64 = 2e-3;
pub const POLYA_TOLERANCE: f64 = 1e-2;
pub const SERIAL_TOLERANCE: f64 = 1e-3;
pub const HADAMARD_TOLERANCE: f64 = 1e-6;
pub const AREA_GAP_FLOOR: f64 = -1e-10;
pub const ROTATION_AREA_TOLERANCE: f64 = 1e-12;
pub const AREA_AGREEMENT: f64 = 1e-4;

#[derive(Debug, Parser)]
#[command(name = "annulus-geom", version, about = "Capacity and modulus measurements for maps of annuli")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate every measure on a log-uniform radius grid.
    Measure(CommonArgs),
    /// Check one family of inequalities and report per-check verdicts.
    Verify(VerifyArgs),
    /// n-diameter of J(r), with the exhaustive oracle for small instances.
    Fekete(FeketeArgs),
    /// Principal frequency of the domain bounded by J(r).
    Spectrum(SpectrumArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Theorem {
    T1,
    T2,
    Polya,
    Serial,
    Hadamard,
    AreaLemma,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// `identity`, a path to a JSON map definition, or inline JSON.
    #[arg(long)]
    pub map: String,
    /// Outer radius of the annulus A(1, R).
    #[arg(long = "R", default_value_t = 2.0)]
    pub outer_radius: f64,
    #[arg(long, default_value_t = 16)]
    pub grid: usize,
    /// Samples per circle for membership and oscillation checks.
    #[arg(long, default_value_t = 1024)]
    pub samples: usize,
    /// Fekete orders for capacity extrapolation, comma separated.
    #[arg(long = "n-seq", value_delimiter = ',', default_values_t = DEFAULT_N_SEQUENCE.to_vec())]
    pub n_seq: Vec<usize>,
    /// Relative tolerance for capacity-derived comparisons.
    #[arg(long = "tol-cap", default_value_t = 5e-3)]
    pub tol_cap: f64,
    /// Second-difference tolerance for capacity-derived convexity checks.
    #[arg(long = "tol-convex", default_value_t = 1e-3)]
    pub tol_convex: f64,
    /// Strict increase means every first difference is at least this times the grid spacing.
    #[arg(long = "tol-strict", default_value_t = 1e-4)]
    pub tol_strict: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub theorem: Theorem,
    /// Demand strict increase even for rotations.
    #[arg(long = "require-strict")]
    pub require_strict: bool,
}

#[derive(Debug, Clone, Args)]
pub struct FeketeArgs {
    #[arg(long)]
    pub map: String,
    #[arg(long)]
    pub r: f64,
    #[arg(long)]
    pub n: usize,
    /// Samples for the discrete oracle (run when n <= 6 and samples <= 256).
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub map: String,
    /// Radius of the source disk; the domain is bounded by f(r∂D).
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    /// Grid nodes per side.
    #[arg(long = "N", default_value_t = 256)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Validated measurement settings.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub map: LaurentMap<f64>,
    pub spec: AnnulusSpec<f64>,
    pub grid: usize,
    pub options: MeasureOptions,
    pub tol_cap: f64,
    pub tol_convex: f64,
    pub tol_strict: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_args(a: &CommonArgs) -> Result<Self> {
        for (name, v) in [("tol-cap", a.tol_cap), ("tol-convex", a.tol_convex), ("tol-strict", a.tol_strict)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Validation(format!("--{name} must be positive, got {v}")));
            }
        }
        if a.grid < MIN_GRID {
            return Err(Error::Validation(format!("--grid must be >= {MIN_GRID}, got {}", a.grid)));
        }
        if a.samples < 64 {
            return Err(Error::Validation(format!("--samples must be >= 64, got {}", a.samples)));
        }
        if a.n_seq.len() < 2 || a.n_seq.iter().any(|n| !(2..=MAX_REFINED_N).contains(n)) {
            return Err(Error::Validation(format!(
                "--n-seq needs at least two orders in 2..={MAX_REFINED_N}"
            )));
        }
        Ok(Self {
            map: load_map(&a.map)?,
            spec: AnnulusSpec::new(a.outer_radius)?,
            grid: a.grid,
            options: MeasureOptions {
                capacity: CapacityOptions {
                    n_sequence: a.n_seq.clone(),
                    fekete: FeketeOptions::default(),
                },
                samples: a.samples,
                ..MeasureOptions::default()
            },
            tol_cap: a.tol_cap,
            tol_convex: a.tol_convex,
            tol_strict: a.tol_strict,
            format: a.format,
            out: a.out.clone(),
        })
    }
}

/// Resolves `--map`: inline JSON, the keyword `identity`, or a file path.
pub fn load_map(source: &str) -> Result<LaurentMap<f64>> {
    let s = source.trim();
    let def = if s.starts_with('{') {
        MapDefinition::parse(s)?
    } else if s == "identity" {
        MapDefinition::Identity
    } else {
        let path = Path::new(s);
        if !path.exists() {
            return Err(Error::Validation(format!("map {s:?} is neither JSON, `identity`, nor an existing file")));
        }
        MapDefinition::parse(&fs::read_to_string(path)?)?
    };
    def.build()
}

/// One named pass/fail verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutcome {
    pub theorem: String,
    pub map_id: String,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

impl VerifyOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if !self.passed() {
            EXIT_FAIL
        } else if !self.warnings.is_empty() {
            EXIT_DEGRADED
        } else {
            EXIT_OK
        }
    }
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn report_checks_prefix(report: &MeasureReport<f64>, checks: &mut Vec<Check>) {
    checks.push(Check::new(
        "grid.complete",
        report.failures.is_empty(),
        format!("{} of {} radii measured", report.records.len(), report.r_grid.len()),
    ));
    let bad = report.invariant_violations();
    checks.push(Check::new("report.identities", bad.is_empty(), bad.join("; ")));
}

/// Monotone-from-convexity verdict for a sampled function with a strictness requirement.
fn convex_increasing_checks(
    prefix: &str,
    f: &SampledFunction<f64>,
    initial: f64,
    cfg: &RunConfig,
    strict: bool,
    checks: &mut Vec<Check>,
) -> Result<()> {
    let convex = check_convexity(f, cfg.tol_convex)?;
    checks.push(Check::new(
        format!("{prefix}.convex"),
        convex.is_convex,
        format!("min second difference {:e} (tolerance {:e})", convex.min_second_difference, cfg.tol_convex),
    ));
    match check_monotone_from_convexity(f, initial, cfg.tol_convex) {
        Ok(v) => {
            checks.push(Check::new(
                format!("{prefix}.nondecreasing"),
                v.is_nondecreasing,
                format!("min first difference {:e}", v.min_first_difference),
            ));
            if strict {
                checks.push(Check::new(
                    format!("{prefix}.strictly_increasing"),
                    v.is_strictly_increasing_at(cfg.tol_strict),
                    format!(
                        "min first difference {:e} vs required {:e}",
                        v.min_first_difference,
                        cfg.tol_strict * v.spacing
                    ),
                ));
            }
        }
        Err(e) => checks.push(Check::new(format!("{prefix}.nondecreasing"), false, e.to_string())),
    }
    Ok(())
}

/// Runs the checks for one theorem.
pub fn verify(cfg: &RunConfig, theorem: Theorem, require_strict: bool) -> Result<VerifyOutcome> {
    let map = &cfg.map;
    let strict = require_strict || !map.is_rotation();
    let mut checks = Vec::new();
    let mut warnings = Vec::new();
    let needs_report = matches!(theorem, Theorem::T1 | Theorem::T2 | Theorem::Polya | Theorem::Serial);
    let report = if needs_report {
        let r = build_report(map, cfg.spec, cfg.grid, cfg.options.clone())?;
        warnings.extend(r.warnings.iter().cloned());
        warnings.extend(r.failures.iter().map(|f| format!("r = {}: {}", f.r, f.error)));
        report_checks_prefix(&r, &mut checks);
        Some(r)
    } else {
        None
    };

    match theorem {
        Theorem::T1 => {
            let rep = report.as_ref().unwrap();
            let t = rep.column(|r| r.t);
            let radii = rep.radii();
            checks.push(Check::new(
                "t.nonnegative",
                min_of(&t) >= DEFICIENCY_FLOOR,
                format!("min T = {:e} (floor {DEFICIENCY_FLOOR:e})", min_of(&t)),
            ));
            if map.is_rotation() {
                let worst = t.iter().fold(0f64, |m, v| m.max(v.abs()));
                checks.push(Check::new(
                    "t.vanishes_for_rotation",
                    worst <= ROTATION_DEFICIENCY_BOUND,
                    format!("max |T| = {worst:e}"),
                ));
            }
            let f = SampledFunction::over_log_radius(&radii, t, Transform::Linear)?;
            convex_increasing_checks("t", &f, 0.0, cfg, strict, &mut checks)?;
        }
        Theorem::T2 => {
            let rep = report.as_ref().unwrap();
            let psi = rep.column(|r| r.psi_cap);
            let radii = rep.radii();
            checks.push(Check::new(
                "psi_cap.at_least_one",
                min_of(&psi) >= 1.0 - cfg.tol_cap,
                format!("min psi_cap = {}", min_of(&psi)),
            ));
            let f = SampledFunction::over_log_radius(&radii, psi, Transform::Log)?;
            convex_increasing_checks("log_psi_cap", &f, 0.0, cfg, strict, &mut checks)?;
            let excess = display_inequality_excess(&rep.records);
            checks.push(Check::new(
                "cap_ratio.display",
                excess <= cfg.tol_cap,
                format!("largest relative excess {excess:e} (slack {:e})", cfg.tol_cap),
            ));
        }
        Theorem::Polya => {
            let s = report.as_ref().unwrap().column(|r| r.polya_slack);
            checks.push(Check::new(
                "polya.slack",
                min_of(&s) >= -POLYA_TOLERANCE,
                format!("min slack {:e} (tolerance {POLYA_TOLERANCE:e})", min_of(&s)),
            ));
        }
        Theorem::Serial => {
            let s = report.as_ref().unwrap().column(|r| r.serial_slack);
            checks.push(Check::new(
                "serial.slack",
                min_of(&s) >= -SERIAL_TOLERANCE,
                format!("min slack {:e} (tolerance {SERIAL_TOLERANCE:e})", min_of(&s)),
            ));
        }
        Theorem::Hadamard => hadamard_checks(map, cfg.spec.outer_radius, &mut checks, &mut warnings)?,
        Theorem::AreaLemma => area_checks(map, cfg.spec.outer_radius, cfg.grid, strict, &mut checks)?,
    }
    Ok(VerifyOutcome {
        theorem: format!("{theorem:?}").to_lowercase(),
        map_id: map.label(),
        checks,
        warnings,
    })
}

/// Admissible `(r₁, r, r₂)` triples from three bands of `R^{k/10}`.
pub fn three_circles_lattice(outer_radius: f64) -> Vec<(f64, f64, f64)> {
    let p = |k: i32| outer_radius.powf(k as f64 / 10.0);
    let mut out = Vec::new();
    for a in 1..=3 {
        for b in 4..=6 {
            for c in 7..=9 {
                out.push((p(a), p(b), p(c)));
            }
        }
    }
    out
}

/// Hadamard three-circles checks for `n ∈ {3, 6}` with Fekete angles of `J(√R)`.
pub fn hadamard_checks(
    map: &LaurentMap<f64>,
    outer_radius: f64,
    checks: &mut Vec<Check>,
    warnings: &mut Vec<String>,
) -> Result<()> {
    let reference = outer_radius.sqrt();
    for n in [3usize, 6] {
        let curve = ImageCircle::new(map, reference)?;
        let fk = fekete_on_curves(&[&curve], n, &FeketeOptions::default())?;
        warnings.extend(fk.warnings.iter().cloned());
        let mut worst = f64::INFINITY;
        for (r1, r, r2) in three_circles_lattice(outer_radius) {
            worst = worst.min(hadamard_three_circles_check(map, &fk.angles, r1, r, r2)?);
        }
        checks.push(Check::new(
            format!("hadamard.n{n}.three_circles"),
            worst >= -HADAMARD_TOLERANCE,
            format!("min slack {worst:e} over 27 radius triples"),
        ));
        let radii = log_uniform_grid(outer_radius, 16);
        let logs = radii
            .iter()
            .map(|&r| log_hadamard_product_max(map, &fk.angles, r))
            .collect::<Result<Vec<_>>>()?;
        let f = SampledFunction::over_log_radius(&radii, logs, Transform::Linear)?;
        let v = check_convexity(&f, EXACT_CONVEXITY_TOLERANCE)?;
        checks.push(Check::new(
            format!("hadamard.n{n}.log_max_convex"),
            v.is_convex,
            format!("min second difference {:e}", v.min_second_difference),
        ));
    }
    Ok(())
}

/// Area formula and area lemma checks on `ρ = R^{i/g}`, `i = 1..g`.
pub fn area_checks(
    map: &LaurentMap<f64>,
    outer_radius: f64,
    grid: usize,
    strict: bool,
    checks: &mut Vec<Check>,
) -> Result<()> {
    let dev = check_prelim_constraint(map);
    checks.push(Check::new(
        "area.prelim",
        dev.abs() < PRELIM_TOLERANCE,
        format!("sum n|a_n|^2 - 1 = {dev:e}"),
    ));
    if dev.abs() >= PRELIM_TOLERANCE {
        return Ok(());
    }
    let h1 = annulus_image_area(map, 1.0)?;
    checks.push(Check::new("area.at_one", h1.abs() < 1e-9, format!("h(1) = {h1:e}")));
    let rhos: Vec<f64> = log_uniform_grid(outer_radius, grid).into_iter().skip(1).collect();
    let mut gaps = Vec::new();
    let mut worst_rel = 0f64;
    for &rho in &rhos {
        gaps.push(area_lemma_gap(map, rho)?);
        let h = annulus_image_area(map, rho)?;
        let poly = shoelace_area(&sample_curve(map, rho, AREA_CHECK_SAMPLES)?) - std::f64::consts::PI;
        worst_rel = worst_rel.max((h - poly).abs() / h.abs().max(f64::MIN_POSITIVE));
    }
    checks.push(Check::new(
        "area.shoelace_agreement",
        worst_rel <= AREA_AGREEMENT,
        format!("max relative difference {worst_rel:e}"),
    ));
    let lo = min_of(&gaps);
    checks.push(Check::new("area.gap_nonnegative", lo >= AREA_GAP_FLOOR, format!("min gap {lo:e}")));
    if map.is_rotation() {
        let worst = gaps.iter().fold(0f64, |m, g| m.max(g.abs()));
        checks.push(Check::new(
            "area.gap_zero_for_rotation",
            worst <= ROTATION_AREA_TOLERANCE,
            format!("max |gap| {worst:e}"),
        ));
    }
    if strict {
        checks.push(Check::new("area.gap_positive", lo > 0.0, format!("min gap {lo:e}")));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct OracleReport {
    samples: usize,
    brute_force: FeketeResult<f64>,
    exchange_discrete: FeketeResult<f64>,
    /// `|brute − discrete exchange|` on the same sample.
    oracle_gap: f64,
    /// `refined − brute`; nonnegative up to rounding.
    discretization_gap: f64,
}

#[derive(Debug, Serialize)]
struct FeketeReport {
    map_id: String,
    r: f64,
    n: usize,
    result: FeketeResult<f64>,
    oracle: Option<OracleReport>,
}

#[derive(Debug, Serialize)]
struct SpectrumReport {
    map_id: String,
    r: f64,
    #[serde(rename = "N")]
    n: usize,
    lambda1: f64,
    residual: f64,
    iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi_m0: Option<f64>,
    warnings: Vec<String>,
}

fn emit(out: &Option<PathBuf>, stdout: &mut dyn Write, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => fs::write(p, bytes)?,
        None => stdout.write_all(bytes)?,
    }
    Ok(())
}

fn json_bytes<S: Serialize>(value: &S) -> Result<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value)?;
    v.push(b'\n');
    Ok(v)
}

fn cmd_measure(args: &CommonArgs, stdout: &mut dyn Write) -> Result<i32> {
    let cfg = RunConfig::from_args(args)?;
    let report = build_report(&cfg.map, cfg.spec, cfg.grid, cfg.options.clone())?;
    let bytes = match cfg.format {
        Format::Json => json_bytes(&report)?,
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            buf
        }
    };
    emit(&cfg.out, stdout, &bytes)?;
    Ok(if report.is_degraded() { EXIT_DEGRADED } else { EXIT_OK })
}

fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write) -> Result<i32> {
    let cfg = RunConfig::from_args(&args.common)?;
    let outcome = verify(&cfg, args.theorem, args.require_strict)?;
    for c in &outcome.checks {
        writeln!(stdout, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
    }
    for w in &outcome.warnings {
        writeln!(stdout, "WARN {w}")?;
    }
    if args.require_strict && args.theorem == Theorem::T1 && cfg.map.is_rotation() && !outcome.passed() {
        writeln!(stdout, "strict increase fails for the identity (rotation), as expected")?;
    }
    if let Some(p) = &cfg.out {
        fs::write(p, json_bytes(&outcome)?)?;
    }
    Ok(outcome.exit_code())
}

fn cmd_fekete(args: &FeketeArgs, stdout: &mut dyn Write) -> Result<i32> {
    if !(2..=MAX_REFINED_N).contains(&args.n) {
        return Err(Error::Validation(format!("--n must be in 2..={MAX_REFINED_N}, got {}", args.n)));
    }
    if !(args.r > 0.0) {
        return Err(Error::Validation(format!("--r must be positive, got {}", args.r)));
    }
    let map = load_map(&args.map)?;
    let curve = ImageCircle::new(&map, args.r)?;
    let result = fekete_on_curves(&[&curve], args.n, &FeketeOptions::default())?;
    let oracle = if args.n <= MAX_BRUTE_N && args.samples <= MAX_BRUTE_SAMPLES {
        let sample = sample_curve(&map, args.r, args.samples)?;
        let brute = n_diameter_brute(&sample, args.n, &BruteForceOptions::default())?;
        let exchange = n_diameter_exchange_discrete(&sample, args.n)?;
        Some(OracleReport {
            samples: args.samples,
            oracle_gap: (brute.n_diameter - exchange.n_diameter).abs(),
            discretization_gap: result.n_diameter - brute.n_diameter,
            brute_force: brute,
            exchange_discrete: exchange,
        })
    } else {
        None
    };
    let degraded = !result.warnings.is_empty();
    let report = FeketeReport {
        map_id: map.label(),
        r: args.r,
        n: args.n,
        result,
        oracle,
    };
    emit(&args.out, stdout, &json_bytes(&report)?)?;
    Ok(if degraded { EXIT_DEGRADED } else { EXIT_OK })
}

fn cmd_spectrum(args: &SpectrumArgs, stdout: &mut dyn Write) -> Result<i32> {
    if !(args.r > 0.0) {
        return Err(Error::Validation(format!("--r must be positive, got {}", args.r)));
    }
    if args.n < 8 {
        return Err(Error::Validation(format!("--N must be >= 8, got {}", args.n)));
    }
    let map = load_map(&args.map)?;
    let curve = sample_curve(&map, args.r, POLYGON_SAMPLES)?;
    let domain = GridDomain::from_curve(&curve, args.n)?;
    let eig = principal_frequency(&domain, &EigenOptions::default())?;
    let phi_m0 = validate_disk_case(&map, args.r, 256)
        .ok()
        .map(|_| BESSEL_J0_FIRST_ZERO / args.r / eig.lambda1);
    let degraded = !eig.warnings.is_empty();
    let report = SpectrumReport {
        map_id: map.label(),
        r: args.r,
        n: args.n,
        lambda1: eig.lambda1,
        residual: eig.residual,
        iterations: eig.iterations,
        phi_m0,
        warnings: eig.warnings,
    };
    emit(&args.out, stdout, &json_bytes(&report)?)?;
    Ok(if degraded { EXIT_DEGRADED } else { EXIT_OK })
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Never panics on bad input; returns one of the documented exit codes.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Measure(a) => cmd_measure(a, stdout),
        Command::Verify(a) => cmd_verify(a, stdout),
        Command::Fekete(a) => cmd_fekete(a, stdout),
        Command::Spectrum(a) => cmd_spectrum(a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INPUT
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["annulus-geom"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn map_sources() {
        assert!(load_map("identity").unwrap().is_rotation());
        let b = load_map(r#"{"type":"blaschke","a":[0.2,0.0]}"#).unwrap();
        assert_eq!(b.label(), "blaschke(0.2+0i)");
        assert!(matches!(load_map("no-such-file.json"), Err(Error::Validation(_))));
        assert!(load_map(r#"{"type":"blaschke","a":[2.0,0.0]}"#).is_err());
    }

    #[test]
    fn bad_arguments_exit_one() {
        assert_eq!(run_args(&["measure"]).0, EXIT_INPUT);
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_INPUT);
        assert_eq!(run_args(&["measure", "--map", "identity", "--grid", "4"]).0, EXIT_INPUT);
        assert_eq!(run_args(&["measure", "--map", "identity", "--R", "0.5"]).0, EXIT_INPUT);
        assert_eq!(run_args(&["measure", "--map", "identity", "--tol-cap", "0"]).0, EXIT_INPUT);
        assert_eq!(run_args(&["fekete", "--map", "identity", "--r", "1", "--n", "1"]).0, EXIT_INPUT);
        let (code, _, err) = run_args(&["measure", "--map", r#"{"type":"joukowski","c":0.5}"#, "--R", "2"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("not in S("), "{err}");
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("measure"));
    }

    #[test]
    fn fekete_circle_with_oracle() {
        let (code, out, _) = run_args(&["fekete", "--map", "identity", "--r", "1", "--n", "3"]);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let d = v["result"]["n_diameter"].as_f64().unwrap();
        assert!((d - 3f64.sqrt()).abs() < 1e-9);
        assert!(v["oracle"]["oracle_gap"].as_f64().unwrap() < 1e-9);
        assert!(v["oracle"]["discretization_gap"].as_f64().unwrap() >= -1e-10);

        let (_, out, _) = run_args(&["fekete", "--map", "identity", "--r", "2", "--n", "2"]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!((v["result"]["n_diameter"].as_f64().unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn lattice_is_admissible() {
        let l = three_circles_lattice(2.0);
        assert_eq!(l.len(), 27);
        assert!(l.iter().all(|(a, b, c)| 1.0 < *a && a < b && b < c && *c < 2.0));
    }

    #[test]
    fn area_lemma_for_two_term_map() {
        let m = load_map(r#"{"type":"laurent","coeffs":[[1,1.004987562112089,0.0],[-1,0.1,0.0]]}"#).unwrap();
        let mut checks = Vec::new();
        area_checks(&m, 2.0, 8, true, &mut checks).unwrap();
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
    }
}
