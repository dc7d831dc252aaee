//! `tfrotor` command line: frft, mpnorm, verify and lemma.
//!
//! Exit codes: 0 success, 1 runtime error or failed check, 2 usage error.

use std::f64::consts::PI;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::grid::Grid;
use crate::measure::{convergence_study, normalization_check, reference_constant, ConvergenceTable, PsiMode};
use crate::metaplectic::{apply_torus, covariance_residual, gaussian_invariance_residual, UnitaryRoute};
use crate::norms::{check_exponent, mp_norm_stft, rotation_sweep, torus_sweep, NormReport, ROTATION_COSET};
use crate::sampling::{haar_unitary_at, Group, SamplerConfig};
use crate::signal::{gaussian_window, load_signal, load_signal_on, write_signal, Signal, SignalSpec};
use crate::symplectic::TorusElement;
use crate::transforms::frft_compose_check;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Parser)]
#[command(name = "tfrotor", version, about = "Modulation-space norms via STFT, symplectic rotations and torus integrals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Partial fractional Fourier transform with one angle per axis.
    Frft(Flags),
    /// M^p norm of a signal by one of the characterizations.
    Mpnorm(Flags),
    /// Run a property suite and report each check against its tolerance.
    Verify(Flags),
    /// Ψ_ε convergence sweep and fitted constant.
    Lemma(Flags),
}

#[derive(Debug, Clone, Default, Args)]
struct Flags {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "N")]
    size: Option<usize>,
    #[arg(long = "T")]
    side: Option<f64>,
    /// Exponent: a number ≥ 1 or `inf`.
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    method: Option<String>,
    /// Generator descriptor (e.g. `hermite(1)`) or a signal CSV path.
    #[arg(long)]
    signal: Option<String>,
    /// Comma-separated angles, one per axis (a single angle is used on every axis).
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long = "eps-from")]
    eps_from: Option<f64>,
    #[arg(long = "eps-to")]
    eps_to: Option<f64>,
    #[arg(long = "eps-steps")]
    eps_steps: Option<usize>,
    /// JSON file with defaults for any of these flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also compute the STFT norm and print the ratio.
    #[arg(long)]
    compare: bool,
    /// Property suite for `verify`.
    #[arg(long)]
    suite: Option<String>,
    /// Group for `lemma` and `verify --suite measure`: rotation or torus.
    #[arg(long)]
    mode: Option<String>,
    /// Phase-space point for `lemma`, comma-separated (x…, ξ…).
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
}

/// Parameters merged from an optional JSON file and the command-line flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    pub n: Option<usize>,
    #[serde(rename = "N")]
    pub size: Option<usize>,
    #[serde(rename = "T")]
    pub side: Option<f64>,
    pub p: Option<serde_json::Value>,
    pub method: Option<String>,
    pub signal: Option<String>,
    pub theta: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub eps_from: Option<f64>,
    pub eps_to: Option<f64>,
    pub eps_steps: Option<usize>,
    pub compare: Option<bool>,
    pub suite: Option<String>,
    pub mode: Option<String>,
    pub z: Option<Vec<f64>>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(String),
    ChecksFailed(usize),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parse `args` (including the program name) and run. Output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    let result = match cli.command {
        Command::Frft(f) => settings(f).and_then(|s| cmd_frft(&s, out, err)),
        Command::Mpnorm(f) => settings(f).and_then(|s| cmd_mpnorm(&s, out)),
        Command::Verify(f) => settings(f).and_then(|s| cmd_verify(&s, out)),
        Command::Lemma(f) => settings(f).and_then(|s| cmd_lemma(&s, out, err)),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(CliError::Runtime(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_FAILURE
        }
        Err(CliError::ChecksFailed(k)) => {
            let _ = writeln!(err, "{k} check(s) failed");
            EXIT_FAILURE
        }
    }
}

/// Validated settings after merging the config file and flags.
#[derive(Debug, Clone)]
struct Settings {
    cfg: ExperimentConfig,
    explicit_grid: bool,
    out: Option<PathBuf>,
}

impl Settings {
    fn n(&self) -> Result<usize, CliError> {
        match self.cfg.n.unwrap_or(1) {
            n @ (1 | 2) => Ok(n),
            n => Err(usage(format!("--n must be 1 or 2, got {n}"))),
        }
    }

    fn grid(&self) -> Result<Grid, CliError> {
        let n = self.n()?;
        let d = Grid::default_for(n).map_err(|e| usage(e.to_string()))?;
        Grid::new(n, self.cfg.size.unwrap_or(d.N()), self.cfg.side.unwrap_or(d.T())).map_err(|e| usage(format!("--N/--T: {e}")))
    }

    fn seed(&self) -> u64 {
        self.cfg.seed.unwrap_or(DEFAULT_SEED)
    }

    fn sampler(&self, default_count: usize) -> Result<SamplerConfig, CliError> {
        SamplerConfig::new(self.seed(), self.cfg.samples.unwrap_or(default_count)).map_err(|e| usage(format!("--samples: {e}")))
    }

    fn p(&self, default: f64) -> Result<f64, CliError> {
        let p = match &self.cfg.p {
            None => default,
            Some(serde_json::Value::Number(v)) => v.as_f64().unwrap_or(f64::NAN),
            Some(serde_json::Value::String(s)) => parse_exponent(s)?,
            Some(other) => return Err(usage(format!("--p: invalid value {other}"))),
        };
        check_exponent(p, true).map_err(|_| usage(format!("--p must be ≥ 1 or inf, got {p}")))?;
        Ok(p)
    }

    fn signal(&self, default: &str) -> Result<Signal, CliError> {
        let desc = self.cfg.signal.clone().unwrap_or_else(|| default.to_string());
        let path = Path::new(&desc);
        if desc.ends_with(".csv") || path.is_file() {
            let s = if self.explicit_grid { load_signal_on(path, &self.grid()?) } else { load_signal(path) };
            return s.map_err(|e| CliError::Runtime(format!("--signal {desc}: {e}")));
        }
        let spec: SignalSpec = desc.parse().map_err(|e: Error| usage(format!("--signal: {e}")))?;
        Ok(spec.generate(&self.grid()?)?)
    }

    fn group(&self) -> Result<Option<Group>, CliError> {
        self.cfg.mode.as_deref().map(|m| m.parse().map_err(|e: Error| usage(format!("--mode: {e}")))).transpose()
    }

    fn emit(&self, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
        match &self.out {
            Some(path) => fs::write(path, text)?,
            None => out.write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

fn parse_exponent(s: &str) -> Result<f64, CliError> {
    match s.trim() {
        "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
        t => t.parse::<f64>().map_err(|_| usage(format!("--p: invalid value '{s}'"))),
    }
}

fn parse_list(flag: &str, s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            let v: f64 = t.trim().parse().map_err(|_| usage(format!("--{flag}: invalid number '{}'", t.trim())))?;
            if !v.is_finite() {
                return Err(usage(format!("--{flag}: value must be finite")));
            }
            Ok(v)
        })
        .collect()
}

fn settings(f: Flags) -> Result<Settings, CliError> {
    let mut cfg = match &f.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| usage(format!("--config {}: {e}", path.display())))?;
            serde_json::from_str::<ExperimentConfig>(&text).map_err(|e| usage(format!("--config {}: {e}", path.display())))?
        }
        None => ExperimentConfig::default(),
    };
    let explicit_grid = f.n.is_some() || f.size.is_some() || f.side.is_some() || cfg.n.is_some() || cfg.size.is_some() || cfg.side.is_some();
    macro_rules! over {
        ($($field:ident),*) => {$( if f.$field.is_some() { cfg.$field = f.$field.clone(); } )*};
    }
    over!(n, size, side, method, signal, seed, samples, eps_from, eps_to, eps_steps, suite, mode);
    if let Some(p) = &f.p {
        cfg.p = Some(serde_json::Value::String(p.clone()));
    }
    if let Some(t) = &f.theta {
        cfg.theta = Some(parse_list("theta", t)?);
    }
    if let Some(z) = &f.z {
        cfg.z = Some(parse_list("z", z)?);
    }
    if f.compare {
        cfg.compare = Some(true);
    }
    Ok(Settings { cfg, explicit_grid, out: f.out })
}

fn cmd_frft(s: &Settings, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let theta = s.cfg.theta.clone().ok_or_else(|| usage("--theta is required"))?;
    let input = s.signal("gaussian")?;
    let n = input.grid().n();
    let angles = match theta.len() {
        1 => vec![theta[0]; n],
        k if k == n => theta,
        k => return Err(usage(format!("--theta: expected 1 or {n} angles, got {k}"))),
    };
    let result = apply_torus(&TorusElement::new(angles)?, &input)?;
    let mut buf = Vec::new();
    write_signal(&result, &mut buf)?;
    s.emit(&String::from_utf8_lossy(&buf), out)?;
    let (a, b) = (input.l2_norm(), result.l2_norm());
    writeln!(err, "l2 norm: input {a:.12e} output {b:.12e} relative change {:.3e}", (b - a).abs() / a)?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct Comparison {
    report: NormReport,
    stft: NormReport,
    ratio: f64,
    expected_ratio: Option<f64>,
}

fn cmd_mpnorm(s: &Settings, out: &mut dyn Write) -> Result<(), CliError> {
    let method = s.cfg.method.clone().unwrap_or_else(|| "stft".into());
    let f = s.signal("gaussian")?;
    let n = f.grid().n();
    let sup = method.starts_with("sup-");
    let p = if sup { f64::INFINITY } else { s.p(2.0)? };
    let rotation_samples = if sup { 500 } else { 200 };
    let group_report = |group: Group, freq: bool| -> Result<NormReport, CliError> {
        if p.is_infinite() && !sup {
            return Err(usage(format!("--p inf is not valid for --method {method}; use sup-{}", group)));
        }
        let ps: Vec<f64> = if sup { Vec::new() } else { vec![p] };
        let sweep = match group {
            Group::Rotation => {
                let coset = if sup { 1 } else { ROTATION_COSET };
                rotation_sweep(&f, &ps, &s.sampler(rotation_samples)?, coset)?
            }
            Group::Torus => torus_sweep(&f, &ps)?,
        };
        Ok(match (sup, freq) {
            (true, false) => sweep.sup_space,
            (true, true) => sweep.sup_frequency,
            (false, false) => sweep.space.into_iter().next().expect("one exponent"),
            (false, true) => sweep.frequency.into_iter().next().expect("one exponent"),
        })
    };
    let (report, expected) = match method.as_str() {
        "stft" => (mp_norm_stft(&f, p)?, Some(1.0)),
        "rotation" | "sup-rotation" => (group_report(Group::Rotation, false)?, Some(if sup { 1.0 } else { 1.0 / PI })),
        "rotation-freq" | "sup-rotation-freq" => (group_report(Group::Rotation, true)?, Some(if sup { 1.0 } else { 1.0 / PI })),
        "torus" | "sup-torus" => (group_report(Group::Torus, false)?, Some(if sup { 1.0 } else { 2f64.powi(n as i32) })),
        "torus-freq" | "sup-torus-freq" => (group_report(Group::Torus, true)?, Some(if sup { 1.0 } else { 2f64.powi(n as i32) })),
        other => {
            return Err(usage(format!(
                "--method: unknown '{other}' (stft, rotation, rotation-freq, torus, torus-freq, sup-rotation, sup-rotation-freq, sup-torus, sup-torus-freq)"
            )))
        }
    };
    let text = if s.cfg.compare.unwrap_or(false) {
        let stft = mp_norm_stft(&f, p)?;
        let ratio = report.value / stft.value;
        serde_json::to_string_pretty(&Comparison { report, stft, ratio, expected_ratio: expected }).map_err(|e| CliError::Runtime(e.to_string()))?
    } else {
        serde_json::to_string_pretty(&report).map_err(|e| CliError::Runtime(e.to_string()))?
    };
    s.emit(&(text + "\n"), out)
}

/// One line of a verify suite.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn at_most(suite: &str, name: String, value: f64, tolerance: f64) -> Check {
        Check { suite: suite.into(), name, value, tolerance, pass: value <= tolerance }
    }
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    suite: String,
    seed: u64,
    samples: Option<usize>,
    checks: Vec<Check>,
    passed: usize,
    failed: usize,
}

fn cmd_verify(s: &Settings, out: &mut dyn Write) -> Result<(), CliError> {
    let suite = s.cfg.suite.clone().ok_or_else(|| usage("--suite is required (covariance, gaussian-invariance, frft-group, equivalence, measure, all)"))?;
    let suites: Vec<&str> = match suite.as_str() {
        "all" => vec!["covariance", "gaussian-invariance", "frft-group", "equivalence", "measure"],
        "covariance" | "gaussian-invariance" | "frft-group" | "equivalence" | "measure" => vec![suite.as_str()],
        other => return Err(usage(format!("--suite: unknown '{other}'"))),
    };
    let mut checks = Vec::new();
    for name in suites {
        checks.extend(match name {
            "covariance" => suite_covariance(s)?,
            "gaussian-invariance" => suite_gaussian(s)?,
            "frft-group" => suite_frft(s)?,
            "equivalence" => suite_equivalence(s)?,
            _ => suite_measure(s)?,
        });
    }
    let mut text = String::new();
    for c in &checks {
        text.push_str(&format!(
            "{} {}: {} = {:.3e} (tolerance {:.1e})\n",
            if c.pass { "PASS" } else { "FAIL" },
            c.suite,
            c.name,
            c.value,
            c.tolerance
        ));
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    out.write_all(text.as_bytes())?;
    if let Some(path) = &s.out {
        let report = VerifyReport { suite, seed: s.seed(), samples: s.cfg.samples, passed: checks.len() - failed, failed, checks };
        fs::write(path, serde_json::to_string_pretty(&report).map_err(|e| CliError::Runtime(e.to_string()))? + "\n")?;
    }
    if failed > 0 {
        return Err(CliError::ChecksFailed(failed));
    }
    Ok(())
}

fn dims(s: &Settings) -> Result<Vec<usize>, CliError> {
    Ok(if s.cfg.n.is_some() { vec![s.n()?] } else { vec![1, 2] })
}

fn suite_covariance(s: &Settings) -> Result<Vec<Check>, CliError> {
    let cfg = s.sampler(20)?;
    let grid = if s.cfg.n.unwrap_or(1) == 1 { s.grid()? } else { return Err(usage("covariance suite runs with n = 1")) };
    let phi = gaussian_window(&grid);
    let pairs = [SignalSpec::Hermite(1), SignalSpec::Chirped(0.5), SignalSpec::Translated(1.0)];
    let mut checks = Vec::new();
    for spec in pairs {
        let f = spec.generate(&grid)?;
        let mut worst = 0.0f64;
        for k in 0..cfg.count as u64 {
            worst = worst.max(covariance_residual(&haar_unitary_at(1, cfg.seed, k), &f, &phi)?);
        }
        checks.push(Check::at_most("covariance", format!("max residual ({spec}, gaussian) over {} rotations", cfg.count), worst, 1e-2));
    }
    Ok(checks)
}

fn suite_gaussian(s: &Settings) -> Result<Vec<Check>, CliError> {
    let cfg = s.sampler(20)?;
    let mut checks = Vec::new();
    for n in dims(s)? {
        let grid = Grid::default_for(n)?;
        let routes: &[UnitaryRoute] = if n == 1 { &[UnitaryRoute::QuadraticFourier] } else { &[UnitaryRoute::QuadraticFourier, UnitaryRoute::Euler] };
        for &route in routes {
            let mut worst = 0.0f64;
            for k in 0..cfg.count as u64 {
                worst = worst.max(gaussian_invariance_residual(&haar_unitary_at(n, cfg.seed, k), &grid, route)?);
            }
            checks.push(Check::at_most("gaussian-invariance", format!("n={n} {} max ||Ŝφ| − φ|", route_name(route)), worst, 1e-5));
        }
    }
    Ok(checks)
}

fn suite_frft(s: &Settings) -> Result<Vec<Check>, CliError> {
    let grid = Grid::default_for(1)?;
    let mut checks = Vec::new();
    let pairs = [(0.3, 0.5), (1.0, 2.0), (PI / 2.0, PI / 2.0), (2.5, -1.1), (-0.7, 4.0)];
    for spec in [SignalSpec::Hermite(2), SignalSpec::Chirped(0.5)] {
        let f = spec.generate(&grid)?;
        let worst = pairs.iter().map(|&(a, b)| frft_compose_check(a, b, &f)).collect::<Result<Vec<_>, _>>()?.into_iter().fold(0.0, f64::max);
        checks.push(Check::at_most("frft-group", format!("{spec} max ‖F_b F_a f − c·F_(a+b) f‖"), worst, 1e-5));
        let mut norm = 0.0f64;
        for &(a, _) in &pairs {
            let g = apply_torus(&TorusElement::new(vec![a])?, &f)?;
            norm = norm.max((g.l2_norm() / f.l2_norm() - 1.0).abs());
        }
        checks.push(Check::at_most("frft-group", format!("{spec} relative norm change"), norm, 1e-5));
    }
    let _ = s;
    Ok(checks)
}

fn suite_equivalence(s: &Settings) -> Result<Vec<Check>, CliError> {
    let p = s.p(2.0)?;
    if p.is_infinite() {
        return Err(usage("--p must be finite for the equivalence suite"));
    }
    let mut checks = Vec::new();
    for n in dims(s)? {
        let grid = Grid::default_for(n)?;
        let cfg = s.sampler(200)?;
        let tol = if n == 1 { 0.02 } else { 0.05 };
        for spec in SignalSpec::corpus() {
            let f = spec.generate(&grid)?;
            let stft = mp_norm_stft(&f, p)?.value;
            let tor = torus_sweep(&f, &[p])?;
            let rot = rotation_sweep(&f, &[p], &cfg, ROTATION_COSET)?;
            for (label, v, c) in [
                ("torus", tor.space[0].value, reference_constant(Group::Torus, n)),
                ("torus-freq", tor.frequency[0].value, reference_constant(Group::Torus, n)),
                ("rotation", rot.space[0].value, reference_constant(Group::Rotation, n)),
                ("rotation-freq", rot.frequency[0].value, reference_constant(Group::Rotation, n)),
            ] {
                let dev = (v / stft / c - 1.0).abs();
                checks.push(Check::at_most("equivalence", format!("n={n} p={p} {spec} |{label}/stft / {c:.5} − 1|"), dev, tol));
            }
        }
    }
    Ok(checks)
}

fn suite_measure(s: &Settings) -> Result<Vec<Check>, CliError> {
    let groups = match s.group()? {
        Some(g) => vec![g],
        None => vec![Group::Torus, Group::Rotation],
    };
    let eps = eps_sequence(s)?;
    let cfg = s.sampler(20_000)?;
    let mut checks = Vec::new();
    for group in groups {
        for n in dims(s)? {
            let z = if n == 1 { vec![1.0, 0.0] } else { vec![1.0, 1.0, 0.0, 0.0] };
            let mode = psi_mode(group, n);
            let table = convergence_study(&z, &eps, group, mode, &cfg)?;
            let c = reference_constant(group, n);
            let tol = (0.02 * c).max(3.0 * table.limit_stderr);
            checks.push(Check::at_most("measure", format!("{group} n={n} |fitted C1 {:.5} − {c:.5}|", table.limit), (table.limit - c).abs(), tol));
            let zs = if n == 1 { vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.3, 0.4]] } else { vec![vec![0.0; 4], vec![1.0, 0.0, 0.0, 0.0]] };
            let norm = normalization_check(&zs, 0.1, group, &cfg)?;
            let worst_se = norm.rows.iter().map(|r| r.stderr).fold(0.0, f64::max);
            checks.push(Check::at_most("measure", format!("{group} n={n} normalization max |∫χ̃ − 1|"), norm.max_deviation, (3.0 * worst_se).max(1e-6)));
        }
    }
    Ok(checks)
}

fn psi_mode(group: Group, n: usize) -> PsiMode {
    match (group, n) {
        (Group::Torus, _) => PsiMode::TorusClosedForm,
        (Group::Rotation, 1) => PsiMode::Quadrature,
        (Group::Rotation, _) => PsiMode::MonteCarlo,
    }
}

/// Geometric sequence from eps-from down to eps-to (default 2⁻³ … 2⁻¹⁰, 8 points).
fn eps_sequence(s: &Settings) -> Result<Vec<f64>, CliError> {
    let from = s.cfg.eps_from.unwrap_or(0.125);
    let to = s.cfg.eps_to.unwrap_or(2f64.powi(-10));
    let steps = s.cfg.eps_steps.unwrap_or(8);
    if !(from > 0.0 && to > 0.0 && from.is_finite() && to.is_finite()) {
        return Err(usage("--eps-from and --eps-to must be positive"));
    }
    if steps < 2 || to >= from {
        return Err(usage("need --eps-steps ≥ 2 and --eps-to < --eps-from"));
    }
    let r = (to / from).powf(1.0 / (steps - 1) as f64);
    Ok((0..steps).map(|k| if k == steps - 1 { to } else { from * r.powi(k as i32) }).collect())
}

fn cmd_lemma(s: &Settings, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let group = s.group()?.unwrap_or(Group::Torus);
    let z = s.cfg.z.clone().unwrap_or_else(|| vec![1.0, 0.0]);
    let n = match z.len() {
        2 => 1,
        4 => 2,
        k => return Err(usage(format!("--z: expected 2 or 4 coordinates, got {k}"))),
    };
    let eps = eps_sequence(s)?;
    let cfg = s.sampler(20_000)?;
    let table = convergence_study(&z, &eps, group, psi_mode(group, n), &cfg).map_err(|e| match e {
        Error::ZeroWeight(_) => usage(format!("--z: {e}")),
        other => other.into(),
    })?;
    s.emit(&lemma_csv(&table, n), out)?;
    let reference = reference_constant(group, n);
    writeln!(
        err,
        "fitted C1 = {:.6} ± {:.6} (reference {reference:.6}, {} group, n = {n}, seed {}, samples {})",
        table.limit,
        table.limit_stderr,
        group,
        s.seed(),
        cfg.count
    )?;
    Ok(())
}

/// Columns: mode, n, z…, eps, value, stderr, weighted_value.
pub fn lemma_csv(table: &ConvergenceTable, n: usize) -> String {
    let mut text = String::from("mode,n");
    for i in 0..2 * n {
        text.push_str(&format!(",z{i}"));
    }
    text.push_str(",eps,value,stderr,weighted_value\n");
    for r in &table.rows {
        text.push_str(&format!("{},{n}", table.group));
        for v in &table.z {
            text.push_str(&format!(",{v}"));
        }
        text.push_str(&format!(",{:.17e},{:.17e},{:.17e},{:.17e}\n", r.eps, r.value, r.stderr, r.weighted_value));
    }
    text
}

fn route_name(route: UnitaryRoute) -> &'static str {
    match route {
        UnitaryRoute::QuadraticFourier => "quadratic-fourier",
        UnitaryRoute::Euler => "euler",
    }
}
