use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wirent::commands::{cmd_fig2, cmd_fig3, cmd_point, cmd_resonances};
use wirent::config::{Command, RunConfig};
use wirent::selfcheck::{run_selfcheck, Fault, SelfcheckOptions};
use wirent::CliError;

/// Two-electron entanglement in a two-channel double-delta wire.
///
/// Wavenumbers and couplings are given in units of 2π/d.
#[derive(Parser)]
#[command(name = "wirent", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Full report at one (k1, k1 + dk) point.
    Point(Common),
    /// Concurrence versus dk at fixed k1.
    Fig2(Common),
    /// Concurrence over a (k1, dk) grid.
    Fig3(Common),
    /// Transmission resonances of one or both channels.
    Resonances(Common),
    /// Run the invariant suite.
    Selfcheck {
        /// Also compare against the finite-difference solver.
        #[arg(long)]
        oracle: bool,
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
}

#[derive(Args)]
struct Common {
    /// key=value file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    u11: Option<f64>,
    #[arg(long)]
    u22: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    u12_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    u12_im: Option<f64>,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    k1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    dk: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    dk_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    dk_max: Option<f64>,
    #[arg(long)]
    dk_steps: Option<usize>,
    #[arg(long)]
    k1_min: Option<f64>,
    #[arg(long)]
    k1_max: Option<f64>,
    #[arg(long)]
    k1_steps: Option<usize>,
    #[arg(long)]
    k_lo: Option<f64>,
    #[arg(long)]
    k_hi: Option<f64>,
    /// 1, 2 or both.
    #[arg(long)]
    channel: Option<String>,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn resolve(&self, cmd: Command) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::defaults(cmd);
        if let Some(path) = &self.config {
            cfg.apply_text(&std::fs::read_to_string(path)?)?;
        }
        let floats = [
            ("u11", self.u11),
            ("u22", self.u22),
            ("u12_re", self.u12_re),
            ("u12_im", self.u12_im),
            ("d", self.d),
            ("k1", self.k1),
            ("dk", self.dk),
            ("dk_min", self.dk_min),
            ("dk_max", self.dk_max),
            ("k1_min", self.k1_min),
            ("k1_max", self.k1_max),
            ("k_lo", self.k_lo),
            ("k_hi", self.k_hi),
        ];
        for (key, v) in floats {
            if let Some(v) = v {
                cfg.set(key, &format!("{v:?}"))?;
            }
        }
        for (key, v) in [("dk_steps", self.dk_steps), ("k1_steps", self.k1_steps)] {
            if let Some(v) = v {
                cfg.set(key, &v.to_string())?;
            }
        }
        if let Some(c) = &self.channel {
            cfg.set("channel", c)?;
        }
        if let Some(p) = &self.out {
            cfg.output_path = Some(p.clone());
        }
        Ok(cfg)
    }
}

fn emit(cfg: &RunConfig, csv: &str) -> Result<(), CliError> {
    match &cfg.output_path {
        Some(p) => std::fs::write(p, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Sub::Point(c) => {
            let cfg = c.resolve(Command::Point)?;
            let out = cmd_point(&cfg)?;
            print!("{}", out.text);
            if let Some(p) = &cfg.output_path {
                std::fs::write(p, &out.csv)?;
            }
        }
        Sub::Fig2(c) => {
            let cfg = c.resolve(Command::Fig2)?;
            emit(&cfg, &cmd_fig2(&cfg)?)?;
        }
        Sub::Fig3(c) => {
            let cfg = c.resolve(Command::Fig3)?;
            emit(&cfg, &cmd_fig3(&cfg)?)?;
        }
        Sub::Resonances(c) => {
            let cfg = c.resolve(Command::Resonances)?;
            emit(&cfg, &cmd_resonances(&cfg)?)?;
        }
        Sub::Selfcheck {
            oracle,
            inject_fault,
        } => {
            let fault = match inject_fault.as_deref() {
                None => None,
                Some("unitarity") => Some(Fault::UnitarityScale),
                Some(other) => return Err(CliError::Config(format!("unknown fault {other:?}"))),
            };
            let report = run_selfcheck(&SelfcheckOptions {
                oracle,
                fault,
                ..Default::default()
            });
            print!("{}", report.render());
            if !report.passed() {
                return Err(CliError::SelfcheckFailed);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::SelfcheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
