//! Command-line front end. Every command renders a CSV table whose first
//! line names the columns; floats use Rust's shortest round-trip format.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::error::Error;
use crate::harmonics::SphereParams;
use crate::signals::{
    builtin_profile_with_tolerance, chebyshev_grid, l2_residual_profile, sup_error, DEFAULT_INGEST_TOLERANCE,
};
use crate::transform::{isometry_defect, l2_residual, legacy_admissibility, ScaleWindow, SpectralSignal};
use crate::wavelet_family::{evaluate_kernel, gamma_tail, polynomial_degree, wavelet_coefficient, KernelMode, WaveletSymbol};

#[derive(Debug, Parser)]
#[command(name = "sphwavelet", version, about = "Polynomial spherical wavelets on S^n")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Ψ_ρ and the reconstruction kernel Ψ_ρ ∗̂ Ψ̄_ρ on a t-grid
    Kernel,
    /// Closed-form and numerical ∫γ_l dρ per degree
    Admissibility,
    /// Sup-norm and L² errors of truncated reconstructions of a profile
    Reconstruct,
    /// Relative phase-space isometry defect for random signals
    Isometry,
    /// Weighted L¹ norm of the tail kernel
    Legacy,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    /// Sphere dimension n (S^n)
    #[arg(long, global = true)]
    pub n: Option<u32>,
    /// Maximum degree / bandlimit
    #[arg(long, global = true)]
    pub lmax: Option<usize>,
    /// Scale ρ for `kernel`
    #[arg(long, global = true)]
    pub rho: Option<f64>,
    /// Builtin profile: const, exp, abs, cos<k>
    #[arg(long, global = true)]
    pub profile: Option<String>,
    /// Cutoff R; repeat for several values
    #[arg(long = "R", global = true)]
    #[serde(rename = "R", default)]
    pub r_list: Vec<f64>,
    /// Grid size
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Seed for random signals
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Relative residual above which profile ingestion warns
    #[arg(long = "ingest-tol", global = true)]
    #[serde(rename = "ingest_tol")]
    pub ingest_tol: Option<f64>,
    /// Output path (stdout when absent)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// TOML file with the same keys as the flags; flags win
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl Flags {
    /// Fills every unset field from `base`.
    pub fn or(self, base: Flags) -> Flags {
        Flags {
            n: self.n.or(base.n),
            lmax: self.lmax.or(base.lmax),
            rho: self.rho.or(base.rho),
            profile: self.profile.or(base.profile),
            r_list: if self.r_list.is_empty() { base.r_list } else { self.r_list },
            grid: self.grid.or(base.grid),
            seed: self.seed.or(base.seed),
            ingest_tol: self.ingest_tol.or(base.ingest_tol),
            out: self.out.or(base.out),
            config: self.config,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NodeConvergence { .. } | Error::Quadrature(_) | Error::Overflow { .. } => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: u32,
    pub lmax: usize,
    pub rho: Option<f64>,
    pub profile: String,
    pub r_list: Vec<f64>,
    pub grid: usize,
    pub seed: u64,
    pub ingest_tol: f64,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 2,
            lmax: 64,
            rho: None,
            profile: "abs".to_string(),
            r_list: (1..=10).map(|k| 0.5f64.powi(k)).collect(),
            grid: 1025,
            seed: 0,
            ingest_tol: DEFAULT_INGEST_TOLERANCE,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn from_flags(flags: Flags) -> Result<Self, CliError> {
        let flags = match &flags.config {
            Some(path) => flags.clone().or(load_config(path)?),
            None => flags,
        };
        let d = RunConfig::default();
        let cfg = RunConfig {
            n: flags.n.unwrap_or(d.n),
            lmax: flags.lmax.unwrap_or(d.lmax),
            rho: flags.rho,
            profile: flags.profile.unwrap_or(d.profile),
            r_list: if flags.r_list.is_empty() { d.r_list } else { flags.r_list },
            grid: flags.grid.unwrap_or(d.grid),
            seed: flags.seed.unwrap_or(d.seed),
            ingest_tol: flags.ingest_tol.unwrap_or(d.ingest_tol),
            out: flags.out,
        };
        if cfg.n < 2 {
            return Err(CliError::Usage(format!("--n must be at least 2, got {}", cfg.n)));
        }
        if cfg.grid < 2 {
            return Err(CliError::Usage(format!("--grid must be at least 2, got {}", cfg.grid)));
        }
        Ok(cfg)
    }

    fn params(&self) -> Result<SphereParams, CliError> {
        Ok(SphereParams::new(self.n)?)
    }

    fn windows(&self) -> Result<Vec<ScaleWindow>, CliError> {
        self.r_list
            .iter()
            .map(|&r| ScaleWindow::new(r).map_err(CliError::from))
            .collect()
    }
}

fn load_config(path: &Path) -> Result<Flags, CliError> {
    let text = std::fs::read_to_string(path).map_err(CliError::Io)?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Shortest round-trip decimal, switching to exponent form for very small or large magnitudes.
pub fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Columns t, psi, kernel on a Chebyshev grid, plus constant rho, n, degree columns.
pub fn cmd_kernel(cfg: &RunConfig) -> Result<String, CliError> {
    let rho = cfg
        .rho
        .ok_or_else(|| CliError::Usage("kernel requires --rho".into()))?;
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(CliError::Usage(format!("--rho must be positive, got {rho}")));
    }
    let p = cfg.params()?;
    let degree = polynomial_degree(rho);
    let symbol = WaveletSymbol::new(rho, degree.unwrap_or(0))?;
    let degree_label = degree.map_or_else(|| "none".to_string(), |d| d.to_string());

    let mut out = String::from("t,psi,kernel,rho,n,degree\n");
    for t in chebyshev_grid(cfg.grid) {
        let psi = evaluate_kernel(&p, &symbol, t, KernelMode::Wavelet);
        let kernel = evaluate_kernel(&p, &symbol, t, KernelMode::Reconstruction);
        writeln!(
            out,
            "{},{},{},{},{},{degree_label}",
            fmt_num(t),
            fmt_num(psi),
            fmt_num(kernel),
            fmt_num(rho),
            cfg.n
        )
        .unwrap();
    }
    Ok(out)
}

/// Per degree: closed-form ∫_0^∞ γ_l, the adaptive quadrature of
/// Σ_k|a_l^k(Ψ_ρ)|²·α(ρ)/N(n,l), and their difference.
pub fn cmd_admissibility(cfg: &RunConfig) -> Result<String, CliError> {
    let p = cfg.params()?;
    let mut out = String::from("l,closed_form,quadrature,abs_diff\n");
    for l in 0..=cfg.lmax {
        let closed = gamma_tail(l, 0.0);
        let quadrature = admissibility_quadrature(&p, l)?;
        writeln!(
            out,
            "{l},{},{},{}",
            fmt_num(closed),
            fmt_num(quadrature),
            fmt_num((closed - quadrature).abs())
        )
        .unwrap();
    }
    Ok(out)
}

/// ∫_0^2 |a_l^0(Ψ_ρ)|²/(ρ·N(n,l)) dρ by adaptive Gauss–Kronrod.
pub fn admissibility_quadrature(p: &SphereParams, l: usize) -> Result<f64, CliError> {
    let dim = p.dim_harmonics(l)? as f64;
    let mut failure = None;
    // γ_l lives on (0, 1/l); keep several panels inside its support.
    let panels = 1024.max(16 * (l + 1));
    let value = crate::quad::integrate_panels(
        |rho| match wavelet_coefficient(p, l, rho) {
            Ok(0.0) => 0.0,
            Ok(a) => a * a / (rho * dim),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        0.0,
        2.0,
        1e-13,
        panels,
    )?;
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(value),
    }
}

/// Rows R, sup_error, l2_residual for the configured profile.
pub fn cmd_reconstruct(cfg: &RunConfig) -> Result<String, CliError> {
    let p = cfg.params()?;
    let windows = cfg.windows()?;
    let ingestion = builtin_profile_with_tolerance(&cfg.profile, &p, cfg.lmax, cfg.ingest_tol)?;
    if let Some(w) = &ingestion.warning {
        eprintln!("warning: {w}");
    }
    let mut out = String::from("R,sup_error,l2_residual\n");
    for w in windows {
        let sup = sup_error(&ingestion.profile, w, cfg.grid.max(256))?;
        let l2 = l2_residual_profile(&ingestion.profile, w)?;
        writeln!(out, "{},{},{}", fmt_num(w.cutoff()), fmt_num(sup), fmt_num(l2)).unwrap();
    }
    Ok(out)
}

/// Rows R, |defect|/(‖f‖‖g‖) for one seeded pair of random signals.
pub fn cmd_isometry(cfg: &RunConfig) -> Result<String, CliError> {
    let p = cfg.params()?;
    let windows = cfg.windows()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let f = SpectralSignal::random(p, cfg.lmax, &mut rng)?;
    let g = SpectralSignal::random(p, cfg.lmax, &mut rng)?;
    let scale = f.norm() * g.norm();
    let mut out = String::from("R,relative_defect,relative_l2_residual\n");
    for w in windows {
        let defect = isometry_defect(&f, &g, w)?.norm() / scale;
        let residual = l2_residual(&f, w) / f.norm();
        writeln!(out, "{},{},{}", fmt_num(w.cutoff()), fmt_num(defect), fmt_num(residual)).unwrap();
    }
    Ok(out)
}

/// Rows R, weighted L¹ norm of the tail kernel. Any R > 0 is accepted; the
/// degree range is widened to cover every nonzero tail.
pub fn cmd_legacy(cfg: &RunConfig) -> Result<String, CliError> {
    let p = cfg.params()?;
    if cfg.r_list.is_empty() {
        return Err(CliError::Usage("legacy requires at least one --R".into()));
    }
    let mut out = String::from("R,weighted_l1\n");
    for &r in &cfg.r_list {
        if !(r > 0.0) || !r.is_finite() {
            return Err(CliError::Usage(format!("--R must be positive, got {r}")));
        }
        let lmax = cfg.lmax.max((1.0 / r).ceil() as usize);
        let value = legacy_admissibility(&p, r, lmax).map_err(|e| match e {
            Error::InvalidArgument(m) => CliError::Usage(m),
            other => CliError::Numerical(other.to_string()),
        })?;
        writeln!(out, "{},{}", fmt_num(r), fmt_num(value)).unwrap();
    }
    Ok(out)
}

pub fn run_command(command: Command, cfg: &RunConfig) -> Result<String, CliError> {
    match command {
        Command::Kernel => cmd_kernel(cfg),
        Command::Admissibility => cmd_admissibility(cfg),
        Command::Reconstruct => cmd_reconstruct(cfg),
        Command::Isometry => cmd_isometry(cfg),
        Command::Legacy => cmd_legacy(cfg),
    }
}

/// Parses, runs, and writes the CSV; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = RunConfig::from_flags(cli.flags).and_then(|cfg| {
        let csv = run_command(cli.command, &cfg)?;
        match &cfg.out {
            Some(path) => std::fs::write(path, csv).map_err(CliError::Io),
            None => {
                print!("{csv}");
                Ok(())
            }
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("sphwavelet: {e}");
            e.exit_code()
        }
    }
}
