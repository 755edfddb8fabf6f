use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qpsido_cli::config::{ConfigError, RunConfig, Suite};
use qpsido_cli::{emit, exit, run_suite, Format};

#[derive(Parser)]
#[command(name = "qpsido", version, about = "Verification suites for twisted pseudodifferential calculus on SU_q(2)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// μ-binomial identities, specializations and the contour oracle.
    MuBinomial(Opts),
    /// Crossed-product, Hopf-action and Casimir checks.
    VerifyHopf(Opts),
    /// Truncated representation: relations, spectrum, orders.
    Spectrum(Opts),
    /// Remainder orders of the Δ^z Y expansion.
    ExpansionCheck(Opts),
    /// Norms of iterated twisted derivations across two cutoffs.
    RegularityCheck(Opts),
    /// Zeta functions, residues and twisted-trace defects.
    Zeta(Opts),
    /// Every suite.
    All(Opts),
}

impl Command {
    fn split(self) -> (Vec<Suite>, Opts) {
        match self {
            Command::MuBinomial(o) => (vec![Suite::Mucalc], o),
            Command::VerifyHopf(o) => (vec![Suite::Hopf], o),
            Command::Spectrum(o) => (vec![Suite::Spectrum], o),
            Command::ExpansionCheck(o) => (vec![Suite::Expansion], o),
            Command::RegularityCheck(o) => (vec![Suite::Regularity], o),
            Command::Zeta(o) => (vec![Suite::Zeta], o),
            Command::All(o) => (Suite::ALL.to_vec(), o),
        }
    }
}

#[derive(Args)]
struct Opts {
    /// Flat `key = value` file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Deformation parameter, `1/2` or `0.5`.
    #[arg(long)]
    q: Option<String>,
    /// Cutoff L, `21/2` or `10.5`.
    #[arg(long)]
    cutoff: Option<String>,
    #[arg(long)]
    buffer: Option<String>,
    /// Largest expansion order.
    #[arg(long)]
    depth: Option<String>,
    /// Exponent p of ρ = K̂_m^p Δ̂^{−p/2}; `auto` selects the smallest giving a simple pole.
    #[arg(long)]
    rho_exp: Option<String>,
    #[arg(long)]
    format: Option<String>,
    /// Output directory; without it the report goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<String>,
    /// Evaluate independent items within a suite concurrently.
    #[arg(long)]
    parallel: bool,
    /// Record per-suite wall-clock seconds in the report.
    #[arg(long)]
    timings: bool,
    #[arg(long)]
    tol_contour: Option<String>,
    #[arg(long)]
    tol_relation: Option<String>,
    #[arg(long)]
    tol_spectrum: Option<String>,
    #[arg(long)]
    tol_order: Option<String>,
    #[arg(long)]
    tol_elliptic: Option<String>,
    #[arg(long)]
    tol_leading: Option<String>,
    #[arg(long)]
    tol_remainder_drop: Option<String>,
    #[arg(long)]
    tol_regularity: Option<String>,
    #[arg(long)]
    tol_zeta_tail: Option<String>,
    #[arg(long)]
    tol_pole: Option<String>,
    #[arg(long)]
    tol_residue: Option<String>,
    #[arg(long)]
    tol_defect: Option<String>,
    #[arg(long)]
    tol_finite_residue: Option<String>,
}

impl Opts {
    fn into_config(self, suites: Vec<Suite>) -> Result<(RunConfig, Option<PathBuf>), ConfigError> {
        let mut cfg = RunConfig { suites, ..RunConfig::default() };
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path)
                .map_err(|e| ConfigError::Io { path: path.display().to_string(), reason: e.to_string() })?;
            cfg.apply_file_text(&text)?;
        }
        let flags = [
            ("q", self.q),
            ("cutoff", self.cutoff),
            ("buffer", self.buffer),
            ("depth", self.depth),
            ("rho_exp", self.rho_exp),
            ("format", self.format),
            ("seed", self.seed),
            ("tol_contour", self.tol_contour),
            ("tol_relation", self.tol_relation),
            ("tol_spectrum", self.tol_spectrum),
            ("tol_order", self.tol_order),
            ("tol_elliptic", self.tol_elliptic),
            ("tol_leading", self.tol_leading),
            ("tol_remainder_drop", self.tol_remainder_drop),
            ("tol_regularity", self.tol_regularity),
            ("tol_zeta_tail", self.tol_zeta_tail),
            ("tol_pole", self.tol_pole),
            ("tol_residue", self.tol_residue),
            ("tol_defect", self.tol_defect),
            ("tol_finite_residue", self.tol_finite_residue),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, &v)?;
            }
        }
        cfg.parallel |= self.parallel;
        cfg.timings |= self.timings;
        cfg.validate()?;
        let out = self.out.or_else(|| cfg.out.clone().map(PathBuf::from));
        Ok((cfg, out))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (suites, opts) = cli.command.split();
    let (cfg, out) = match opts.into_config(suites) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("qpsido: configuration error: {e}");
            return ExitCode::from(exit::CONFIG as u8);
        }
    };
    eprintln!("qpsido: {cfg}");
    let report = match run_suite(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("qpsido: numerical failure in {e}");
            return ExitCode::from(exit::NUMERICAL as u8);
        }
    };
    eprint!("{}", report.summary());
    match out {
        Some(dir) => match emit::emit(&report, cfg.format, &dir) {
            Ok(files) => {
                for f in files {
                    eprintln!("wrote {}", f.display());
                }
            }
            Err(e) => {
                eprintln!("qpsido: cannot write to {}: {e}", dir.display());
                return ExitCode::from(exit::IO as u8);
            }
        },
        None => match cfg.format {
            Format::Json => print!("{}", emit::to_json(&report)),
            Format::Csv => print!("{}", emit::checks_csv(&report)),
        },
    }
    ExitCode::from(if report.failed() { exit::CHECK_FAILED } else { exit::OK } as u8)
}
