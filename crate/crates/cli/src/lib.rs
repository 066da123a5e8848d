//! Argument model and command execution for the `chargecs` binary.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use chargecs::fock::{enumerate_sector, SectorBasis, SectorSpec};
use chargecs::integration::{polar_grid, roi_matrix, roi_residual, FamilySpec, QuadratureGrid};
use chargecs::operators::{eriksson_generators, su2_generators, su3_generators, OperatorTriplets};
use chargecs::states::{
    euler_to_sphere, overlap, overlap_su2_kernel, overlap_su3_kernel, su2_charge_cs, su2_fixed_spin,
    su3_charge_cs, su3_fixed_n, EulerAngles, SpherePoint,
};
use chargecs::verify::{self, CheckReport};
use chargecs::C64;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Sphere-point inputs farther than this from unit norm are rejected.
pub const RENORMALIZE_TOL: f64 = 1e-9;
pub const DEFAULT_TRUNCATION: u32 = 12;
/// Environment variable fixing the worker thread count.
pub const THREADS_ENV: &str = "CHARGECS_THREADS";

const FAMILY_HELP: &str = "\
Family tags (--family) and their parameters:
  su2-fixed    --n N                      N >= 0; two modes, total N
  su2-charge   --q Q [--rmax R]           any integer Q; R >= 0 rungs beyond the first (default 12)
  su3-fixed    --n N                      N >= 0; three modes, total N
  su3-charge   --q Q --l L [--pmax P]     L >= max(0, Q); P >= 0 (default 12)
  sun-fixed    --modes M --n N            M >= 2; N >= 0
  sun-charge   --charges Q1,..,Q(M-1) [--cutoff C]
                                          every tail sum Qi + .. + Q(M-1) >= 0; C >= 0 (default 12)
  plain        --modes M --nmax K         basis command only; each mode holds 0..K quanta

Points: --z takes comma-separated complex components such as 0.6,0.8i or 1,0,0
(forms: 0.5, 0.3i, -i, 0.1+0.2i, 1e-3-4i). Inputs within 1e-9 of unit norm are
renormalized; others are rejected. Two-mode commands also accept --angles theta,phi,psi.

Exit status: 0 when every check passes, 1 when a check fails or on an internal
error, 2 on invalid input. Set CHARGECS_THREADS to fix the worker thread count.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Parsed command line. Every parameter is validated against the library's
/// preconditions before any computation starts.
#[derive(Debug, Clone, Parser)]
#[command(name = "chargecs", version, about = "Schwinger-boson coherent states and identity checks", after_help = FAMILY_HELP)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for every randomized check.
    #[arg(long, default_value_t = 1, global = true)]
    pub seed: u64,
    /// Record wall-clock runtimes (reports are then no longer byte-reproducible).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// List the occupation states of a sector.
    #[command(after_help = FAMILY_HELP)]
    Basis(FamilyArgs),
    /// Amplitudes of a coherent state.
    #[command(after_help = FAMILY_HELP)]
    State(StateArgs),
    /// Closed-form fixed-n / fixed-charge overlap against the numerical inner product.
    Overlap(OverlapArgs),
    /// Lie-algebra (and Casimir) residuals of a generator set.
    AlgebraCheck(AlgebraArgs),
    /// Resolution-of-identity Gram matrix of a family.
    #[command(after_help = FAMILY_HELP)]
    RoiCheck(RoiArgs),
    /// Group-action construction against the oscillator construction.
    GroupCheck(GroupArgs),
    /// Full regression suite.
    Suite(SuiteArgs),
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    /// Family tag; see the table below.
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<i64>,
    #[arg(long)]
    pub l: Option<i64>,
    #[arg(long)]
    pub rmax: Option<u32>,
    #[arg(long)]
    pub pmax: Option<u32>,
    #[arg(long)]
    pub cutoff: Option<u32>,
    #[arg(long)]
    pub modes: Option<usize>,
    /// Comma-separated SU(N) charges.
    #[arg(long, allow_hyphen_values = true)]
    pub charges: Option<String>,
    /// Per-mode cap for `plain`.
    #[arg(long)]
    pub nmax: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    /// Sphere point, comma-separated complex components.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// Euler angles theta,phi,psi (two-mode families only).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "z")]
    pub angles: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub point: PointArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OverlapGroup {
    Su2,
    Su3,
}

#[derive(Debug, Clone, Args)]
pub struct OverlapArgs {
    #[arg(long, value_enum)]
    pub group: OverlapGroup,
    /// Fixed-representation label.
    #[arg(long)]
    pub n: u32,
    #[arg(long, allow_hyphen_values = true)]
    pub q: i64,
    /// Second charge label (SU(3) only).
    #[arg(long)]
    pub l: Option<i64>,
    /// Point of the fixed-n state.
    #[arg(long, allow_hyphen_values = true)]
    pub w: String,
    /// Point of the charge state.
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgebraGroup {
    Su2,
    Su3,
    /// Three-oscillator SU(2) generators.
    Eriksson,
}

#[derive(Debug, Clone, Args)]
pub struct AlgebraArgs {
    #[arg(long, value_enum)]
    pub group: AlgebraGroup,
    /// Total occupation of the sector.
    #[arg(long)]
    pub n: u32,
    /// Write the generators as sparse triplets to this JSON file.
    #[arg(long)]
    pub dump: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RoiArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Radial Gauss-Legendre order per axis (default: smallest certified).
    #[arg(long)]
    pub radial_order: Option<usize>,
    /// Phase points per circle (default: smallest certified).
    #[arg(long)]
    pub phase_points: Option<usize>,
    /// Also run a Monte Carlo estimate with this many samples.
    #[arg(long)]
    pub mc: Option<usize>,
    /// Write {"constant", "residual", "dim"} to this file.
    #[arg(long)]
    pub dump_gram: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GroupArgs {
    /// Spin j as 0.5, 1/2, 3/2, 2, ...
    #[arg(long)]
    pub j: String,
    /// Single Euler-angle triple theta,phi,psi instead of the 27-point grid.
    #[arg(long, allow_hyphen_values = true)]
    pub angles: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct SuiteArgs {
    /// Default parameters (the only preset).
    #[arg(long = "default")]
    pub default_preset: bool,
}

/// Failure classes mapped to exit statuses.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Validation(String),
    Internal(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Validation(m) => write!(f, "invalid input: {m}"),
            Self::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<chargecs::Error> for CliError {
    fn from(e: chargecs::Error) -> Self {
        Self::Validation(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Validation(_) => 2,
            Self::Internal(_) => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn invalid(m: impl Into<String>) -> CliError {
    CliError::Validation(m.into())
}

/// Parses `re`, `imi`, `re+imi` or `re-imi`.
pub fn parse_complex(s: &str) -> CliResult<C64> {
    let t = s.trim();
    let bad = || invalid(format!("cannot parse complex number {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| C64::new(re, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not the leading one or part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let parse_im = |x: &str| -> CliResult<f64> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            Ok(C64::new(re, parse_im(&body[k..])?))
        }
        None => Ok(C64::new(0.0, parse_im(body)?)),
    }
}

fn parse_list<T>(s: &str, what: &str, f: impl Fn(&str) -> Option<T>) -> CliResult<Vec<T>> {
    s.split(',')
        .map(|x| f(x.trim()).ok_or_else(|| invalid(format!("cannot parse {what} {x:?} in {s:?}"))))
        .collect()
}

/// Sphere point from `--z`, renormalized only within [`RENORMALIZE_TOL`].
pub fn parse_sphere_point(s: &str) -> CliResult<SpherePoint> {
    let coords = s.split(',').map(parse_complex).collect::<CliResult<Vec<_>>>()?;
    SpherePoint::normalize_if_close(coords, RENORMALIZE_TOL).map_err(CliError::from)
}

pub fn parse_angles(s: &str) -> CliResult<EulerAngles> {
    let v = parse_list(s, "angle", |x| x.parse::<f64>().ok())?;
    let [theta, phi, psi] = v[..] else {
        return Err(invalid(format!("--angles needs theta,phi,psi, got {s:?}")));
    };
    Ok(EulerAngles::new(theta, phi, psi)?)
}

/// `2j` from `0.5`, `1/2`, `3`, ...
pub fn parse_two_j(s: &str) -> CliResult<u32> {
    let bad = || invalid(format!("spin must be a non-negative half-integer, got {s:?}"));
    let two_j = if let Some((a, b)) = s.split_once('/') {
        let (a, b): (u32, u32) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        match b {
            1 => 2 * a,
            2 => a,
            _ => return Err(bad()),
        }
    } else {
        let x: f64 = s.trim().parse().map_err(|_| bad())?;
        let t = 2.0 * x;
        if !(0.0..=1e6).contains(&t) || t.fract() != 0.0 {
            return Err(bad());
        }
        t as u32
    };
    Ok(two_j)
}

fn need<T: Copy>(v: Option<T>, flag: &str, family: &str) -> CliResult<T> {
    v.ok_or_else(|| invalid(format!("family {family} needs --{flag}")))
}

impl FamilyArgs {
    fn reject_unused(&self, allowed: &[&str]) -> CliResult<()> {
        let given = [
            ("n", self.n.is_some()),
            ("q", self.q.is_some()),
            ("l", self.l.is_some()),
            ("rmax", self.rmax.is_some()),
            ("pmax", self.pmax.is_some()),
            ("cutoff", self.cutoff.is_some()),
            ("modes", self.modes.is_some()),
            ("charges", self.charges.is_some()),
            ("nmax", self.nmax.is_some()),
        ];
        for (flag, set) in given {
            if set && !allowed.contains(&flag) {
                return Err(invalid(format!("--{flag} does not apply to family {}", self.family)));
            }
        }
        Ok(())
    }

    /// Family descriptor, validated by building its sector.
    pub fn family_spec(&self) -> CliResult<FamilySpec> {
        let tag = self.family.as_str();
        let spec = match tag {
            "su2-fixed" => {
                self.reject_unused(&["n"])?;
                FamilySpec::Su2Fixed { n: need(self.n, "n", tag)? }
            }
            "su2-charge" => {
                self.reject_unused(&["q", "rmax"])?;
                FamilySpec::Su2Charge { q: need(self.q, "q", tag)?, r_max: self.rmax.unwrap_or(DEFAULT_TRUNCATION) }
            }
            "su3-fixed" => {
                self.reject_unused(&["n"])?;
                FamilySpec::Su3Fixed { n: need(self.n, "n", tag)? }
            }
            "su3-charge" => {
                self.reject_unused(&["q", "l", "pmax"])?;
                FamilySpec::Su3Charge {
                    q: need(self.q, "q", tag)?,
                    l: need(self.l, "l", tag)?,
                    p_max: self.pmax.unwrap_or(DEFAULT_TRUNCATION),
                }
            }
            "sun-fixed" => {
                self.reject_unused(&["modes", "n"])?;
                FamilySpec::SunFixed { modes: need(self.modes, "modes", tag)?, n: need(self.n, "n", tag)? }
            }
            "sun-charge" => {
                self.reject_unused(&["charges", "cutoff"])?;
                let raw = self.charges.as_deref().ok_or_else(|| invalid("family sun-charge needs --charges"))?;
                FamilySpec::SunCharge {
                    charges: parse_list(raw, "charge", |x| x.parse::<i64>().ok())?,
                    cutoff: self.cutoff.unwrap_or(DEFAULT_TRUNCATION),
                }
            }
            "plain" => return Err(invalid("family plain only applies to the basis command")),
            other => return Err(invalid(format!("unknown family tag {other:?}; see --help"))),
        };
        spec.basis()?;
        Ok(spec)
    }

    fn sector_spec(&self) -> CliResult<SectorSpec> {
        if self.family == "plain" {
            self.reject_unused(&["modes", "nmax"])?;
            let modes = need(self.modes, "modes", "plain")?;
            if modes == 0 {
                return Err(invalid("--modes must be at least 1"));
            }
            return Ok(SectorSpec::plain_truncation(modes, need(self.nmax, "nmax", "plain")?));
        }
        Ok(self.family_spec()?.sector_spec())
    }
}

impl PointArgs {
    fn point(&self, modes: usize) -> CliResult<SpherePoint> {
        let p = match (&self.z, &self.angles) {
            (Some(z), None) => parse_sphere_point(z)?,
            (None, Some(a)) => {
                if modes != 2 {
                    return Err(invalid("--angles only applies to two-mode families"));
                }
                euler_to_sphere(&parse_angles(a)?)
            }
            _ => return Err(invalid("give exactly one of --z or --angles")),
        };
        if p.dim() != modes {
            return Err(invalid(format!("point has {} components, family needs {modes}", p.dim())));
        }
        Ok(p)
    }
}

/// What a command produced, before formatting.
#[derive(Debug, Clone)]
pub enum Output {
    Reports(Vec<CheckReport>),
    Roi(Box<RoiOutput>),
    Value { json: serde_json::Value, csv: Vec<Vec<String>> },
}

#[derive(Debug, Clone, Serialize)]
pub struct RoiOutput {
    #[serde(flatten)]
    pub report: CheckReport,
    pub constant: f64,
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc: Option<CheckReport>,
}

impl Output {
    /// All checks in this output passed (vacuously for plain values).
    pub fn passed(&self) -> bool {
        match self {
            Self::Reports(r) => r.iter().all(|r| r.passed),
            Self::Roi(r) => r.report.passed && r.mc.as_ref().is_none_or(|m| m.passed),
            Self::Value { .. } => true,
        }
    }
}

const CSV_HEADER: [&str; 6] = ["check_name", "params", "residual", "tolerance", "passed", "runtime_ms"];

fn report_row(r: &CheckReport) -> Vec<String> {
    vec![
        r.check_name.clone(),
        r.params_string(),
        format!("{:e}", r.residual),
        format!("{:e}", r.tolerance),
        r.passed.to_string(),
        r.runtime_ms.map(|t| format!("{t:.3}")).unwrap_or_default(),
    ]
}

fn to_json_line<T: Serialize>(v: &T) -> CliResult<String> {
    serde_json::to_string(v).map_err(|e| CliError::Internal(e.to_string()))
}

fn write_csv(rows: &[Vec<String>]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(r).map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
}

/// Renders an output; JSON check reports are one object per line.
pub fn render(out: &Output, format: Format) -> CliResult<String> {
    match (out, format) {
        (Output::Reports(rs), Format::Json) => {
            let mut s = String::new();
            for r in rs {
                s.push_str(&to_json_line(r)?);
                s.push('\n');
            }
            Ok(s)
        }
        (Output::Reports(rs), Format::Csv) => {
            let mut rows = vec![CSV_HEADER.iter().map(|s| s.to_string()).collect()];
            rows.extend(rs.iter().map(report_row));
            write_csv(&rows)
        }
        (Output::Roi(r), Format::Json) => Ok(to_json_line(r)? + "\n"),
        (Output::Roi(r), Format::Csv) => {
            let mut rows = vec![CSV_HEADER.iter().map(|s| s.to_string()).collect()];
            rows.push(report_row(&r.report));
            rows.extend(r.mc.iter().map(report_row));
            write_csv(&rows)
        }
        (Output::Value { json, .. }, Format::Json) => Ok(to_json_line(json)? + "\n"),
        (Output::Value { csv, .. }, Format::Csv) => write_csv(csv),
    }
}

fn state_label(s: &chargecs::OccupationState) -> String {
    s.counts().iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

fn cmd_basis(args: &FamilyArgs) -> CliResult<Output> {
    let spec = args.sector_spec()?;
    let basis = enumerate_sector(&spec)?;
    let states: Vec<&[u32]> = basis.states().iter().map(|s| s.counts()).collect();
    let json = serde_json::json!({ "sector": spec, "dim": basis.dim(), "states": states });
    let mut csv = vec![vec!["index".to_string(), "occupations".to_string()]];
    csv.extend(basis.states().iter().enumerate().map(|(i, s)| vec![i.to_string(), state_label(s)]));
    Ok(Output::Value { json, csv })
}

fn cmd_state(args: &StateArgs) -> CliResult<Output> {
    let family = args.family.family_spec()?;
    let z = args.point.point(family.modes())?;
    let ket = family.ket(&z)?;
    let amps: Vec<serde_json::Value> = ket
        .basis()
        .states()
        .iter()
        .zip(ket.amplitudes())
        .map(|(s, a)| serde_json::json!({ "state": s.counts(), "re": a.re, "im": a.im }))
        .collect();
    let z_json: Vec<[f64; 2]> = z.coords().iter().map(|c| [c.re, c.im]).collect();
    let json = serde_json::json!({
        "family": family,
        "z": z_json,
        "sector": ket.basis().spec(),
        "norm2": ket.norm2(),
        "amplitudes": amps,
    });
    let mut csv = vec![vec!["occupations".to_string(), "re".to_string(), "im".to_string()]];
    csv.extend(
        ket.basis()
            .states()
            .iter()
            .zip(ket.amplitudes())
            .map(|(s, a)| vec![state_label(s), a.re.to_string(), a.im.to_string()]),
    );
    Ok(Output::Value { json, csv })
}

fn cmd_overlap(args: &OverlapArgs) -> CliResult<Output> {
    let w = parse_sphere_point(&args.w)?;
    let z = parse_sphere_point(&args.z)?;
    let (kernel, numeric) = match args.group {
        OverlapGroup::Su2 => {
            if args.l.is_some() {
                return Err(invalid("--l does not apply to su2"));
            }
            let kernel = overlap_su2_kernel(&w, &z, args.n, args.q)?;
            let numeric = overlap(&su2_fixed_spin(&w, args.n)?, &su2_charge_cs(&z, args.q, args.n)?)?;
            (kernel, numeric)
        }
        OverlapGroup::Su3 => {
            let l = args.l.ok_or_else(|| invalid("su3 overlap needs --l"))?;
            let kernel = overlap_su3_kernel(&w, &z, args.n, args.q, l)?;
            let numeric = overlap(&su3_fixed_n(&w, args.n)?, &su3_charge_cs(&z, args.q, l, args.n)?)?;
            (kernel, numeric)
        }
    };
    let diff = (kernel - numeric).norm();
    let json = serde_json::json!({
        "kernel": [kernel.re, kernel.im],
        "numeric": [numeric.re, numeric.im],
        "difference": diff,
    });
    let csv = vec![
        vec!["kernel_re", "kernel_im", "numeric_re", "numeric_im", "difference"].into_iter().map(String::from).collect(),
        [kernel.re, kernel.im, numeric.re, numeric.im, diff].iter().map(|x| x.to_string()).collect(),
    ];
    Ok(Output::Value { json, csv })
}

fn sector(spec: SectorSpec) -> CliResult<Arc<SectorBasis>> {
    Ok(Arc::new(enumerate_sector(&spec)?))
}

fn cmd_algebra(args: &AlgebraArgs) -> CliResult<Output> {
    let mut reports = Vec::new();
    let gens = match args.group {
        AlgebraGroup::Su2 => {
            let b = sector(SectorSpec::fixed_total(2, args.n))?;
            reports.push(verify::check_casimir(b.clone())?);
            su2_generators(b)?
        }
        AlgebraGroup::Su3 => su3_generators(sector(SectorSpec::fixed_total(3, args.n))?)?,
        AlgebraGroup::Eriksson => {
            let b = sector(SectorSpec::fixed_total(3, args.n))?;
            reports.push(verify::check_eriksson_identification(b.clone())?);
            eriksson_generators(b)?
        }
    };
    reports.insert(0, verify::check_lie_algebra(&gens)?);
    if let Some(path) = &args.dump {
        let triplets: Vec<OperatorTriplets> = gens.generators.iter().map(|g| g.to_triplets()).collect();
        let json = serde_json::json!({
            "group": format!("{:?}", gens.group),
            "sector": gens.basis().map(|b| b.spec().clone()),
            "generators": triplets,
        });
        write_file(path, &(to_json_line(&json)? + "\n"))?;
    }
    Ok(Output::Reports(reports))
}

fn cmd_roi(args: &RoiArgs, seed: u64) -> CliResult<Output> {
    let family = args.family.family_spec()?;
    let constant = family.roi_constant();
    let report = match (args.radial_order, args.phase_points) {
        (None, None) => verify::check_roi(&family, constant)?,
        (order, points) => {
            let (d, f) = family.required_exactness()?;
            let minimal = QuadratureGrid::minimal(family.modes(), d, f)?;
            let grid = polar_grid(
                family.modes(),
                order.unwrap_or(minimal.radial_order()),
                points.unwrap_or(minimal.phase_points()),
            )?;
            let g = roi_matrix(&family, &grid)?;
            let base = verify::check_roi(&family, constant)?;
            let residual = roi_residual(&g, constant);
            CheckReport { residual, passed: residual <= base.tolerance, ..base }
                .with_param("radial_order", grid.radial_order())
                .with_param("phase_points", grid.phase_points())
        }
    };
    let dim = family.basis()?.dim();
    if let Some(path) = &args.dump_gram {
        let json = serde_json::json!({ "constant": constant, "residual": report.residual, "dim": dim });
        write_file(path, &(to_json_line(&json)? + "\n"))?;
    }
    let mc = match args.mc {
        Some(count) => Some(verify::check_mc_roi(&family, constant, count, seed, 3.0)?),
        None => None,
    };
    Ok(Output::Roi(Box::new(RoiOutput { report, constant, dim, mc })))
}

fn cmd_group(args: &GroupArgs) -> CliResult<Output> {
    let two_j = parse_two_j(&args.j)?;
    let grid = match &args.angles {
        Some(a) => vec![parse_angles(a)?],
        None => verify::euler_grid_27(),
    };
    Ok(Output::Reports(vec![verify::check_group_action(two_j, &grid)?]))
}

fn cmd_suite(seed: u64) -> CliResult<Output> {
    Ok(Output::Reports(verify::default_suite(seed)?))
}

fn write_file(path: &PathBuf, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::Internal(format!("writing {}: {e}", path.display())))
}

fn strip_timings(out: &mut Output) {
    let strip = |r: &mut CheckReport| r.runtime_ms = None;
    match out {
        Output::Reports(rs) => rs.iter_mut().for_each(strip),
        Output::Roi(r) => {
            strip(&mut r.report);
            r.mc.iter_mut().for_each(strip);
        }
        Output::Value { .. } => {}
    }
}

/// Executes the configured command and returns its output.
pub fn execute(config: &RunConfig) -> CliResult<Output> {
    let mut out = match &config.command {
        Command::Basis(a) => cmd_basis(a)?,
        Command::State(a) => cmd_state(a)?,
        Command::Overlap(a) => cmd_overlap(a)?,
        Command::AlgebraCheck(a) => cmd_algebra(a)?,
        Command::RoiCheck(a) => cmd_roi(a, config.seed)?,
        Command::GroupCheck(a) => cmd_group(a)?,
        Command::Suite(_) => cmd_suite(config.seed)?,
    };
    if !config.timings {
        strip_timings(&mut out);
    }
    Ok(out)
}

/// Runs a command end to end: executes, renders and writes the report.
/// Returns whether every check passed.
pub fn run(config: &RunConfig) -> CliResult<bool> {
    let out = execute(config)?;
    let text = render(&out, config.format)?;
    match &config.out {
        Some(path) => write_file(path, &text)?,
        None => print!("{text}"),
    }
    if let (Command::Suite(_), Output::Reports(reports)) = (&config.command, &out) {
        for (name, (passed, total)) in summarize(reports) {
            eprintln!("{name:<26} {passed:>3}/{total:<3} passed");
        }
    }
    Ok(out.passed())
}

/// Summary counts for the suite, keyed by check name.
pub fn summarize(reports: &[CheckReport]) -> BTreeMap<String, (usize, usize)> {
    let mut m: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for r in reports {
        let e = m.entry(r.check_name.clone()).or_default();
        e.0 += usize::from(r.passed);
        e.1 += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("0.5").unwrap(), C64::new(0.5, 0.0));
        assert_eq!(parse_complex("0.3i").unwrap(), C64::new(0.0, 0.3));
        assert_eq!(parse_complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(parse_complex("0.1+0.2i").unwrap(), C64::new(0.1, 0.2));
        assert_eq!(parse_complex("1e-3-4i").unwrap(), C64::new(1e-3, -4.0));
        assert_eq!(parse_complex("-2e+1+1e-1i").unwrap(), C64::new(-20.0, 0.1));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn sphere_inputs_are_not_silently_normalized() {
        assert!(parse_sphere_point("0.6,0.8i").is_ok());
        assert!(parse_sphere_point("1,0,1e-10").is_ok());
        assert!(matches!(parse_sphere_point("1,1"), Err(CliError::Validation(_))));
    }

    #[test]
    fn spins() {
        assert_eq!(parse_two_j("1/2").unwrap(), 1);
        assert_eq!(parse_two_j("3/2").unwrap(), 3);
        assert_eq!(parse_two_j("2").unwrap(), 4);
        assert_eq!(parse_two_j("1.5").unwrap(), 3);
        assert!(parse_two_j("0.3").is_err());
        assert!(parse_two_j("-1").is_err());
    }

    #[test]
    fn summary_groups_by_name() {
        let reports = verify::default_suite(1).unwrap();
        let s = summarize(&reports);
        assert!(s.values().all(|(p, t)| p == t));
        assert!(s.contains_key("roi"));
    }
}
