//! `idregret`: configuration-driven experiments with CSV/JSON output.
//!
//! Exit status: 0 on success, 2 on tolerance or numerical failure, 3 on
//! configuration errors.

mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use serde_json::json;

use commands::{Outcome, RunError};
use config::RunConfig;
use output::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    Classify,
    Regret,
    Energy,
    Identity,
    Blyth,
    Capacity,
    Catalog,
    Suite,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Regret => "regret",
            Command::Energy => "energy",
            Command::Identity => "identity",
            Command::Blyth => "blyth",
            Command::Capacity => "capacity",
            Command::Catalog => "catalog",
            Command::Suite => "suite",
        }
    }
}

/// Regret, energy and admissibility experiments for infinitely divisible location models.
#[derive(Debug, Parser)]
#[command(name = "idregret", version, allow_negative_numbers = true)]
struct Cli {
    command: Command,
    /// Flat `key = value` configuration file with dotted keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a configuration key, as `key=value`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Model family (gaussian, cauchy, stable, laplace, variance_gamma, nig, logistic, skellam).
    #[arg(long)]
    model: Option<String>,
    /// Gaussian variance.
    #[arg(long)]
    v: Option<String>,
    /// Cauchy scale.
    #[arg(long)]
    c: Option<String>,
    /// Stable index in (0, 2).
    #[arg(long)]
    alpha: Option<String>,
    /// Jump rate (laplace, nig).
    #[arg(long)]
    rate: Option<String>,
    /// Gamma shape.
    #[arg(long)]
    shape: Option<String>,
    /// Gamma scale.
    #[arg(long)]
    scale: Option<String>,
    /// Jump intensity (nig, skellam).
    #[arg(long)]
    intensity: Option<String>,
    /// Dimension.
    #[arg(long)]
    d: Option<String>,
    /// Prior (uniform, gaussian, power_law, point_mass, student).
    #[arg(long)]
    prior: Option<String>,
    /// Gaussian prior variance; 0 gives a point mass at 0.
    #[arg(long)]
    sigma2: Option<String>,
    /// Prior tail exponent (power_law, student).
    #[arg(long)]
    beta: Option<String>,
    /// Power-law core radius.
    #[arg(long)]
    r0: Option<String>,
    /// Point-mass location.
    #[arg(long)]
    location: Option<String>,
    /// Grid lower end.
    #[arg(long)]
    lower: Option<String>,
    /// Grid upper end.
    #[arg(long)]
    upper: Option<String>,
    /// Grid size, a power of two up to 65536.
    #[arg(long)]
    n: Option<String>,
    /// Comma-separated step schedule for finite-h energies.
    #[arg(long)]
    h: Option<String>,
    /// Comma-separated Blyth indices.
    #[arg(long = "n-list")]
    n_list: Option<String>,
    /// Comma-separated capacity radii.
    #[arg(long = "r-list")]
    r_list: Option<String>,
    /// Primary output file; defaults to `<command>.<format>`.
    #[arg(long)]
    output: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Seed of the rate-bound ascent.
    #[arg(long)]
    seed: Option<String>,
    /// Spline family size of the rate bound.
    #[arg(long)]
    family: Option<String>,
}

impl Cli {
    fn flag_pairs(&self) -> Vec<(&'static str, Option<&String>)> {
        vec![
            ("model.kind", self.model.as_ref()),
            ("model.v", self.v.as_ref()),
            ("model.c", self.c.as_ref()),
            ("model.alpha", self.alpha.as_ref()),
            ("model.rate", self.rate.as_ref()),
            ("model.shape", self.shape.as_ref()),
            ("model.scale", self.scale.as_ref()),
            ("model.intensity", self.intensity.as_ref()),
            ("model.d", self.d.as_ref()),
            ("prior.kind", self.prior.as_ref()),
            ("prior.sigma2", self.sigma2.as_ref()),
            ("prior.beta", self.beta.as_ref()),
            ("prior.r0", self.r0.as_ref()),
            ("prior.location", self.location.as_ref()),
            ("grid.lower", self.lower.as_ref()),
            ("grid.upper", self.upper.as_ref()),
            ("grid.n", self.n.as_ref()),
            ("schedule.h", self.h.as_ref()),
            ("schedule.n", self.n_list.as_ref()),
            ("schedule.r", self.r_list.as_ref()),
            ("output.format", self.format.as_ref()),
            ("ascent.seed", self.seed.as_ref()),
            ("ascent.family", self.family.as_ref()),
        ]
    }

    /// File, then `--set`, then explicit flags.
    fn resolve(&self) -> config::ConfigResult<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        for o in &self.overrides {
            cfg.apply_override(o)?;
        }
        for (k, v) in self.flag_pairs() {
            if let Some(v) = v {
                cfg.set(k, v)?;
            }
        }
        if let Some(p) = &self.output {
            cfg.set("output.path", &p.to_string_lossy())?;
        }
        Ok(cfg)
    }
}

fn configure_threads() -> Result<usize, String> {
    let threads = match std::env::var("ID_REGRET_THREADS") {
        Ok(v) => v.parse::<usize>().ok().filter(|&n| n > 0).ok_or(format!("ID_REGRET_THREADS = `{v}` is not a positive integer"))?,
        Err(_) => return Ok(rayon::current_num_threads()),
    };
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| e.to_string())?;
    Ok(threads)
}

fn dispatch(command: Command, cfg: &RunConfig) -> Result<Outcome, RunError> {
    match command {
        Command::Classify => commands::classify(cfg),
        Command::Regret => commands::regret(cfg),
        Command::Energy => commands::energy(cfg),
        Command::Identity => commands::identity(cfg),
        Command::Blyth => commands::blyth(cfg),
        Command::Capacity => commands::capacity(cfg),
        Command::Catalog => commands::catalog(cfg),
        Command::Suite => commands::suite(cfg),
    }
}

fn sidecar_path(primary: &Path) -> PathBuf {
    let mut s = primary.as_os_str().to_owned();
    s.push(".provenance.json");
    PathBuf::from(s)
}

fn tolerances() -> serde_json::Value {
    use idregret::{classify, energy, levy, regret};
    json!({
        "density_mass": levy::MASS_TOL,
        "energy_cutoff": energy::CUTOFF_TOL,
        "generator_step": energy::GENERATOR_STEP,
        "rate_family_size": energy::DEFAULT_FAMILY_SIZE,
        "rate_seed": energy::DEFAULT_SEED,
        "kl_cutoff": regret::KL_CUTOFF,
        "deficit_limit": regret::DEFICIT_LIMIT,
        "finite_h_agreement": regret::FINITE_H_AGREEMENT,
        "gradient_agreement": regret::GRADIENT_AGREEMENT,
        "tail_fit_min_r_squared": classify::MIN_R_SQUARED,
        "tail_growth_threshold": classify::GROWTH_THRESHOLD,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), String> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    }
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let started = Instant::now();
    let resolved = cli.resolve();
    let format = resolved
        .as_ref()
        .ok()
        .and_then(|c| c.get("output.format").map(str::to_owned))
        .unwrap_or_else(|| "csv".into());
    let fmt = Format::parse(&format);
    let primary = resolved
        .as_ref()
        .ok()
        .and_then(|c| c.get("output.path").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(format!("{}.{}", cli.command.name(), fmt.unwrap_or(Format::Csv).extension())));

    let threads = configure_threads();
    let result: Result<Outcome, RunError> = match (&resolved, fmt, &threads) {
        (Err(e), _, _) => Err(RunError::Config(e.0.clone())),
        (_, None, _) => Err(RunError::Config(format!("output.format `{format}` must be csv or json"))),
        (_, _, Err(e)) => Err(RunError::Config(e.clone())),
        (Ok(cfg), Some(_), Ok(_)) => dispatch(cli.command, cfg),
    };

    let (code, message) = match &result {
        Ok(Outcome { failure: None, .. }) => (0u8, String::new()),
        Ok(Outcome { failure: Some(f), .. }) => (2, f.clone()),
        Err(RunError::Tolerance(m)) => (2, m.clone()),
        Err(RunError::Config(m)) => (3, m.clone()),
    };
    let mut code = code;
    let mut message = message;
    if let Ok(outcome) = &result {
        let text = outcome.table.render(fmt.unwrap_or(Format::Csv));
        print!("{text}");
        if let Err(e) = write_file(&primary, &text) {
            code = 3;
            message = e;
        }
    }
    if !message.is_empty() {
        eprintln!("idregret {}: {message}", cli.command.name());
    }
    let provenance = json!({
        "command": cli.command.name(),
        "config": resolved.as_ref().map(|c| c.values.clone()).unwrap_or_default(),
        "tolerances": tolerances(),
        "library_version": env!("CARGO_PKG_VERSION"),
        "threads": threads.as_ref().ok(),
        "wall_time_seconds": started.elapsed().as_secs_f64(),
        "exit_status": code,
        "message": message,
        "primary_output": primary.to_string_lossy(),
    });
    let sidecar = sidecar_path(&primary);
    let text = serde_json::to_string_pretty(&provenance).expect("provenance serializes") + "\n";
    if let Err(e) = write_file(&sidecar, &text) {
        eprintln!("idregret: cannot write provenance: {e}");
        if code == 0 {
            code = 3;
        }
    }
    ExitCode::from(code)
}
