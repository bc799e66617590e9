use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;

use crate::Failure;

/// Flags shared by every command. All are optional so that a config file
/// can supply them; a flag given on the command line wins.
#[derive(Args, Debug, Clone, Default)]
pub struct Flags {
    /// Grid size (even, at least 16 for periodic grids)
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Samples around the rotation axis / along y
    #[arg(long, global = true)]
    pub ny: Option<usize>,
    /// Time step of the flow
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    /// Flow time
    #[arg(long, global = true)]
    pub t_final: Option<f64>,
    /// Parameter of the stationary family p_x^2 = -4p^4 + p^2 + alpha
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub alpha_min: Option<f64>,
    #[arg(long, global = true)]
    pub alpha_max: Option<f64>,
    #[arg(long, global = true)]
    pub alpha_count: Option<usize>,
    #[arg(long, global = true)]
    pub out_mesh: Option<PathBuf>,
    #[arg(long, global = true)]
    pub out_csv: Option<PathBuf>,
    /// Multiplies every default tolerance
    #[arg(long, global = true)]
    pub tol_scale: Option<f64>,
    /// Seed for randomized initial data
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Flat `key = value` file; keys are flag names without dashes
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Flow initial datum: clifford, zero, random, or a CSV path
    #[arg(long, global = true)]
    pub initial: Option<String>,
    /// Flow stepper: if (integrating factor) or explicit
    #[arg(long, global = true)]
    pub stepper: Option<String>,
    /// Period of a potential read from CSV
    #[arg(long, global = true)]
    pub period: Option<f64>,
    /// Skip spinor co-evolution in the flow
    #[arg(long, global = true)]
    pub no_spinor: bool,
    /// Surface for the mesh command: clifford or minimal
    #[arg(long, global = true)]
    pub fixture: Option<String>,
    /// Nodes with |p| below this are left out of the Schrodinger residual
    #[arg(long, global = true)]
    pub p_floor: Option<f64>,
}

const KEYS: &[&str] = &[
    "n",
    "ny",
    "dt",
    "t-final",
    "alpha",
    "alpha-min",
    "alpha-max",
    "alpha-count",
    "out-mesh",
    "out-csv",
    "tol-scale",
    "seed",
    "initial",
    "stepper",
    "period",
    "no-spinor",
    "fixture",
    "p-floor",
];

/// Resolved parameters of one invocation. Command defaults are applied by
/// the commands themselves through the accessors.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: Option<usize>,
    pub ny: Option<usize>,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    pub alpha: Option<f64>,
    pub alpha_min: Option<f64>,
    pub alpha_max: Option<f64>,
    pub alpha_count: Option<usize>,
    pub out_mesh: Option<PathBuf>,
    pub out_csv: Option<PathBuf>,
    pub tol_scale: f64,
    pub seed: u64,
    pub initial: Option<String>,
    pub stepper: Option<String>,
    pub period: Option<f64>,
    pub no_spinor: bool,
    pub fixture: Option<String>,
    pub p_floor: Option<f64>,
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<HashMap<String, String>, Failure> {
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Failure::Invalid(format!("config line {}: expected key = value", lineno + 1))
        })?;
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(Failure::Invalid(format!(
                "config line {}: unknown key `{key}`",
                lineno + 1
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn pick<T: FromStr>(
    flag: Option<T>,
    file: &HashMap<String, String>,
    key: &str,
) -> Result<Option<T>, Failure> {
    if flag.is_some() {
        return Ok(flag);
    }
    match file.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|_| Failure::Invalid(format!("config key `{key}`: cannot parse `{v}`"))),
    }
}

impl RunConfig {
    pub fn resolve(flags: Flags) -> Result<Self, Failure> {
        let file = match &flags.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    Failure::Io(
                        anyhow::Error::new(e).context(format!("reading {}", path.display())),
                    )
                })?;
                parse_config(&text)?
            }
            None => HashMap::new(),
        };
        let tol_scale = pick(flags.tol_scale, &file, "tol-scale")?.unwrap_or(1.0);
        if !(tol_scale > 0.0 && tol_scale.is_finite()) {
            return Err(Failure::Invalid(format!(
                "tol-scale must be positive, got {tol_scale}"
            )));
        }
        let no_spinor = flags.no_spinor || pick::<bool>(None, &file, "no-spinor")?.unwrap_or(false);
        Ok(Self {
            n: pick(flags.n, &file, "n")?,
            ny: pick(flags.ny, &file, "ny")?,
            dt: pick(flags.dt, &file, "dt")?,
            t_final: pick(flags.t_final, &file, "t-final")?,
            alpha: pick(flags.alpha, &file, "alpha")?,
            alpha_min: pick(flags.alpha_min, &file, "alpha-min")?,
            alpha_max: pick(flags.alpha_max, &file, "alpha-max")?,
            alpha_count: pick(flags.alpha_count, &file, "alpha-count")?,
            out_mesh: pick(flags.out_mesh, &file, "out-mesh")?,
            out_csv: pick(flags.out_csv, &file, "out-csv")?,
            tol_scale,
            seed: pick(flags.seed, &file, "seed")?.unwrap_or(0),
            initial: pick(flags.initial, &file, "initial")?,
            stepper: pick(flags.stepper, &file, "stepper")?,
            period: pick(flags.period, &file, "period")?,
            no_spinor,
            fixture: pick(flags.fixture, &file, "fixture")?,
            p_floor: pick(flags.p_floor, &file, "p-floor")?,
        })
    }

    /// Periodic grid size: even and at least 16.
    pub fn grid(&self, default: usize) -> Result<usize, Failure> {
        let n = self.n.unwrap_or(default);
        if n < 16 || !n.is_multiple_of(2) {
            return Err(Failure::Invalid(format!(
                "--n must be even and at least 16, got {n}"
            )));
        }
        Ok(n)
    }

    pub fn ny_or(&self, default: usize) -> Result<usize, Failure> {
        let ny = self.ny.unwrap_or(default);
        if ny < 4 {
            return Err(Failure::Invalid(format!(
                "--ny must be at least 4, got {ny}"
            )));
        }
        Ok(ny)
    }

    /// `base · tol_scale`
    pub fn tol(&self, base: f64) -> f64 {
        base * self.tol_scale
    }

    pub fn positive(value: f64, name: &str) -> Result<f64, Failure> {
        if value > 0.0 && value.is_finite() {
            Ok(value)
        } else {
            Err(Failure::Invalid(format!(
                "--{name} must be positive, got {value}"
            )))
        }
    }
}

pub fn display(path: &Path) -> String {
    path.display().to_string()
}
