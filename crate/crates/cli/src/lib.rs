//! Front end for `willmore-core`: fixtures, flows, sweeps and mesh export.
//!
//! Exit codes: 0 pass, 1 I/O failure, 2 tolerance or verdict failure (also
//! invalid arguments), 3 numerical instability.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::fmt;
use std::io::{self, Write};

use clap::{Parser, Subcommand};
use willmore_core::fmt::format_g;
use willmore_core::Error;

pub use config::{Flags, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "willmore",
    version,
    about = "Willmore tori of revolution: fixtures, flows and sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Clifford torus: energy, residuals, closure, mesh
    Clifford,
    /// mKdV flow with conservation report
    Flow,
    /// Stationary profile for --alpha: monodromy, closure, energy
    Revolve,
    /// Energy bound over a log-spaced alpha range
    BoundScan,
    /// Surface patch from a Weierstrass fixture
    Mesh,
}

/// Why a command did not pass.
#[derive(Debug)]
pub enum Failure {
    Io(anyhow::Error),
    Invalid(String),
    /// Names of the checks that failed.
    Check(Vec<String>),
    Instability(String),
    Numeric(Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Io(_) => 1,
            Failure::Invalid(_) | Failure::Check(_) => 2,
            Failure::Instability(_) => 3,
            Failure::Numeric(Error::Instability { .. } | Error::BlowUp { .. }) => 3,
            Failure::Numeric(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Io(e) => write!(f, "I/O failure: {e:#}"),
            Failure::Invalid(msg) => write!(f, "invalid input: {msg}"),
            Failure::Check(names) => write!(f, "failed checks: {}", names.join(", ")),
            Failure::Instability(msg) => write!(f, "numerical instability: {msg}"),
            Failure::Numeric(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Numeric(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.into())
    }
}

/// Tolerance checks of one run, printed as they are made.
pub(crate) struct Checks {
    scale: f64,
    failed: Vec<String>,
}

impl Checks {
    pub(crate) fn new(scale: f64) -> Self {
        Self {
            scale,
            failed: vec![],
        }
    }

    /// `|value| ≤ base · tol_scale`
    pub(crate) fn at_most(
        &mut self,
        out: &mut dyn Write,
        name: &str,
        value: f64,
        base: f64,
    ) -> io::Result<()> {
        let tol = base * self.scale;
        let ok = value.abs() <= tol;
        writeln!(
            out,
            "  {name} = {} (tol {}) {}",
            g(value),
            g(tol),
            verdict(ok)
        )?;
        self.record(name, ok);
        Ok(())
    }

    /// `|value − target| ≤ band · tol_scale`
    pub(crate) fn near(
        &mut self,
        out: &mut dyn Write,
        name: &str,
        value: f64,
        target: f64,
        band: f64,
    ) -> io::Result<()> {
        let band = band * self.scale;
        let ok = (value - target).abs() <= band;
        writeln!(
            out,
            "  {name} = {} (expect {} +- {}) {}",
            g(value),
            g(target),
            g(band),
            verdict(ok)
        )?;
        self.record(name, ok);
        Ok(())
    }

    pub(crate) fn holds(&mut self, out: &mut dyn Write, name: &str, ok: bool) -> io::Result<()> {
        writeln!(out, "  {name}: {}", verdict(ok))?;
        self.record(name, ok);
        Ok(())
    }

    fn record(&mut self, name: &str, ok: bool) {
        if !ok {
            self.failed.push(name.to_string());
        }
    }

    pub(crate) fn finish(self, out: &mut dyn Write) -> Result<(), Failure> {
        if self.failed.is_empty() {
            writeln!(out, "PASS")?;
            Ok(())
        } else {
            writeln!(out, "FAIL")?;
            Err(Failure::Check(self.failed))
        }
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

/// Display format for reported numbers.
pub(crate) fn g(x: f64) -> String {
    format_g(x, 10)
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let result = RunConfig::resolve(cli.flags).and_then(|cfg| execute(cli.command, &cfg, out));
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {f}");
            f.exit_code()
        }
    }
}

/// Runs a resolved command, writing the report to `out`.
pub fn execute(command: Command, cfg: &RunConfig, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Clifford => commands::clifford(cfg, out),
        Command::Flow => commands::flow(cfg, out),
        Command::Revolve => commands::revolve(cfg, out),
        Command::BoundScan => commands::bound_scan(cfg, out),
        Command::Mesh => commands::mesh(cfg, out),
    }
}
