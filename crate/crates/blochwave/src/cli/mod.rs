//! Command-line front end: argument parsing, config merging, dispatch and exit codes.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::output::{config_hash, OutputSet};
use config::{merge, parse_config, RunConfig};

const UNITS: &str = "Units are fixed: energies in eV, times in fs, lengths in Å, fields in V/Å, \
dipoles in Å, effective masses in units of the free-electron mass.";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Lib(crate::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(e) if e.is_numerical() => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Lib(e)
    }
}

#[derive(Debug, Parser)]
#[command(name = "blochwave", version, about = "Strong-field dynamics of electrons in periodic solids", long_about = UNITS)]
pub struct Cli {
    /// JSON run configuration; inline flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for CSV/JSON artifacts (default: blochwave-out).
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true, env = "BLOCHWAVE_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Embedded material records as JSON.
    Materials(MaterialsArgs),
    /// Dimensionless regime parameters (γ_K, γ_DL, γ_RF0, …) and Up.
    Regimes(PhysArgs),
    /// Cycle-averaged excitation rate versus F0 with channel closings.
    KeldyshScan(PhysArgs),
    /// Single-band wavepacket trajectory (band vs parabolic comparison).
    Intraband(PhysArgs),
    /// Intraband harmonic spectrum.
    Hhg(PhysArgs),
    /// Two-band Houston propagation over a k grid.
    Tdse(PhysArgs),
    /// Two-band density matrix with T2 dephasing (options.t2).
    Dephasing(PhysArgs),
    /// Wannier–Stark fan, Kane ladders and localization lengths.
    Ladders(PhysArgs),
    /// Franz–Keldysh absorption below the gap.
    Fke(PhysArgs),
    /// Two-level Bloch-vector dynamics against the RWA.
    Rabi(PhysArgs),
    /// Generalized pulse area along a Houston trajectory.
    Area(PhysArgs),
    /// Berry curvature, Chern number and Zak phase of lattice models.
    Berry(PhysArgs),
    /// Charge transferred by a weak drive after a pump.
    Charge(PhysArgs),
    /// Field work W(t) from polarization and intraband current.
    Energy(PhysArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Materials(_) => "materials",
            Command::Regimes(_) => "regimes",
            Command::KeldyshScan(_) => "keldysh-scan",
            Command::Intraband(_) => "intraband",
            Command::Hhg(_) => "hhg",
            Command::Tdse(_) => "tdse",
            Command::Dephasing(_) => "dephasing",
            Command::Ladders(_) => "ladders",
            Command::Fke(_) => "fke",
            Command::Rabi(_) => "rabi",
            Command::Area(_) => "area",
            Command::Berry(_) => "berry",
            Command::Charge(_) => "charge",
            Command::Energy(_) => "energy",
        }
    }
}

#[derive(Debug, Args)]
pub struct MaterialsArgs {
    /// Record name (case-insensitive); all records when omitted.
    #[arg(long)]
    pub name: Option<String>,
}

/// Inline flags shared by the physics subcommands.
#[derive(Debug, Args, Default)]
#[command(allow_negative_numbers = true)]
pub struct PhysArgs {
    /// Embedded material name.
    #[arg(long)]
    pub material: Option<String>,
    /// Peak field, V/Å.
    #[arg(long = "F0")]
    pub f0: Option<f64>,
    /// Carrier photon energy ħω0, eV.
    #[arg(long = "hw")]
    pub hbar_omega0: Option<f64>,
    /// Carrier wavelength, nm.
    #[arg(long = "lambda0-nm")]
    pub lambda0_nm: Option<f64>,
    /// Envelope: monochromatic, flat_top or sine_square.
    #[arg(long)]
    pub envelope: Option<String>,
    /// Intensity FWHM of a sine-square pulse, fs.
    #[arg(long)]
    pub fwhm: Option<f64>,
    /// Pulse length in carrier cycles (flat-top and monochromatic).
    #[arg(long)]
    pub cycles: Option<f64>,
    /// cos² ramp length in cycles (flat-top).
    #[arg(long)]
    pub ramp_cycles: Option<f64>,
    /// Carrier-envelope phase, rad.
    #[arg(long)]
    pub cep: Option<f64>,
    /// Ellipticity in [−1, 1].
    #[arg(long)]
    pub beta: Option<f64>,
    /// Band kind: ema, kane, sio2_gamma_m.
    #[arg(long)]
    pub band: Option<String>,
    /// Effective (reduced) mass, m0.
    #[arg(long)]
    pub mass: Option<f64>,
    /// Band gap, eV.
    #[arg(long)]
    pub eg: Option<f64>,
    #[arg(long)]
    pub sweep_start: Option<f64>,
    #[arg(long)]
    pub sweep_stop: Option<f64>,
    #[arg(long)]
    pub sweep_points: Option<usize>,
    /// Logarithmic sweep spacing.
    #[arg(long)]
    pub sweep_log: bool,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
    /// Subcommand option as KEY=VALUE (VALUE parsed as JSON, else taken as a string).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl PhysArgs {
    /// Flags as a partial JSON config for overlaying.
    fn overlay(&self) -> Result<Value, CliError> {
        let mut root = Map::new();
        let mut put = |block: &str, key: &str, v: Option<Value>| {
            if let Some(v) = v {
                let entry = root.entry(block.to_string()).or_insert_with(|| Value::Object(Map::new()));
                entry.as_object_mut().expect("object").insert(key.to_string(), v);
            }
        };
        let num = |x: Option<f64>| x.map(Value::from);
        put("pulse", "f0", num(self.f0));
        put("pulse", "hbar_omega0", num(self.hbar_omega0));
        put("pulse", "lambda0_nm", num(self.lambda0_nm));
        put("pulse", "envelope", self.envelope.clone().map(|e| Value::from(e.replace('-', "_"))));
        put("pulse", "fwhm", num(self.fwhm));
        put("pulse", "cycles", num(self.cycles));
        put("pulse", "ramp_cycles", num(self.ramp_cycles));
        put("pulse", "cep", num(self.cep));
        put("pulse", "beta", num(self.beta));
        put("tolerances", "rtol", num(self.rtol));
        put("tolerances", "atol", num(self.atol));
        put("sweep", "start", num(self.sweep_start));
        put("sweep", "stop", num(self.sweep_stop));
        put("sweep", "points", self.sweep_points.map(Value::from));
        if self.sweep_log {
            put("sweep", "log", Some(Value::Bool(true)));
        }
        if let Some(kind) = &self.band {
            put("band", "kind", Some(Value::from(kind.replace('-', "_"))));
        }
        put("band", "mass", num(self.mass));
        put("band", "eg", num(self.eg));
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            let v = serde_json::from_str(v).unwrap_or_else(|_| Value::from(v));
            put("options", k.trim(), Some(v));
        }
        if let Some(m) = &self.material {
            root.insert("material".into(), Value::from(m.clone()));
        }
        Ok(Value::Object(root))
    }
}

/// What a subcommand produced: staged files plus the one-line summary.
pub struct Outcome {
    pub files: OutputSet,
    pub summary: String,
}

/// Parse argv, run, and return the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_CONFIG,
            };
        }
    };
    match execute(&cli) {
        Ok(summary) => {
            let mut out = std::io::stdout().lock();
            let _ = writeln!(out, "{summary}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("blochwave {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut value = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => Value::Object(Map::new()),
    };
    if !value.is_object() {
        return Err(CliError::Config("config must be a JSON object".into()));
    }
    let overlay = match &cli.command {
        Command::Materials(a) => {
            let mut m = Map::new();
            if let Some(n) = &a.name {
                m.insert("material".into(), Value::from(n.clone()));
            }
            Value::Object(m)
        }
        Command::Regimes(a)
        | Command::KeldyshScan(a)
        | Command::Intraband(a)
        | Command::Hhg(a)
        | Command::Tdse(a)
        | Command::Dephasing(a)
        | Command::Ladders(a)
        | Command::Fke(a)
        | Command::Rabi(a)
        | Command::Area(a)
        | Command::Berry(a)
        | Command::Charge(a)
        | Command::Energy(a) => a.overlay()?,
    };
    merge(&mut value, overlay);
    let mut cfg = parse_config(value)?;
    let name = cli.command.name();
    match &cfg.subcommand {
        Some(s) if s != name => {
            return Err(CliError::Config(format!("config is for `{s}`, but `{name}` was invoked")));
        }
        _ => cfg.subcommand = Some(name.to_string()),
    }
    if let Some(dir) = &cli.out_dir {
        cfg.output.get_or_insert_with(Default::default).dir = Some(dir.clone());
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<String, CliError> {
    let cfg = load_config(cli)?;
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        // A pool may already exist when called repeatedly in one process; that is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let hash = config_hash(config::canonical(&cfg).as_bytes());
    let ctx = commands::Context { cfg: &cfg, hash: &hash };
    let outcome = match &cli.command {
        Command::Materials(_) => commands::materials(&ctx),
        Command::Regimes(_) => commands::regimes(&ctx),
        Command::KeldyshScan(_) => commands::keldysh_scan(&ctx),
        Command::Intraband(_) => commands::intraband(&ctx),
        Command::Hhg(_) => commands::hhg(&ctx),
        Command::Tdse(_) => commands::tdse(&ctx),
        Command::Dephasing(_) => commands::dephasing(&ctx),
        Command::Ladders(_) => commands::ladders(&ctx),
        Command::Fke(_) => commands::fke(&ctx),
        Command::Rabi(_) => commands::rabi(&ctx),
        Command::Area(_) => commands::area(&ctx),
        Command::Berry(_) => commands::berry(&ctx),
        Command::Charge(_) => commands::charge(&ctx),
        Command::Energy(_) => commands::energy(&ctx),
    }?;
    let dir = cfg.output.as_ref().and_then(|o| o.dir.clone()).unwrap_or_else(|| PathBuf::from("blochwave-out"));
    outcome.files.commit(&dir)?;
    Ok(outcome.summary)
}
