use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fracreg::checks::Scenario;
use fracreg::commands::{self, CommandError};

/// Experiments with time-fractional Caputo problems.
///
/// Exit status: 0 when everything succeeded (all checks PASS), 1 on a FAIL or a
/// numerical error, 2 on a configuration or argument error. Relative output
/// directories are placed under $FRACREG_OUT when it is set.
#[derive(Debug, Parser)]
#[command(name = "fracreg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the Mittag-Leffler function E_alpha(z).
    Mlf {
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, allow_negative_numbers = true)]
        z: f64,
        #[arg(long, default_value_t = 1e-16)]
        tol: f64,
    },
    /// Caputo derivative of a catalog function (t2, t3, sin, expm1t, exp, tdelta) by quadrature.
    Caputo {
        #[arg(long)]
        function: String,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Exact eigenmode solution sum c_k E_delta(-k^2 t^delta) sin(kx) and its time derivatives.
    Exact {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        t: f64,
        /// Modes as k:c, repeatable; default is 1:1.
        #[arg(long = "mode", value_parser = parse_mode)]
        modes: Vec<(u32, f64)>,
    },
    /// Solve the problem of a config file and write the grid as CSV.
    Solve { config: PathBuf },
    /// Run a temporal convergence study from a config file.
    Converge { config: PathBuf },
    /// Report whether the initial data admit a solution smooth up to t = 0.
    Diagnose {
        config: PathBuf,
        /// Skip the numerical layer probe.
        #[arg(long)]
        no_probe: bool,
    },
    /// Run scripted acceptance scenarios and print PASS/FAIL lines.
    Repro {
        #[arg(value_enum)]
        scenario: ScenarioArg,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScenarioArg {
    /// Sine initial value: series, Caputo identity, singularity, solver error.
    #[value(alias = "example1")]
    Sine,
    /// Forced zero initial value makes the solution vanish.
    #[value(alias = "example2")]
    Collapse,
    /// Temporal convergence orders on uniform and graded meshes.
    #[value(alias = "remark24")]
    Orders,
    /// Decay of the Caputo derivative of smooth functions near t = 0.
    Decay,
    /// Steady residual of the initial data.
    Residual,
    /// Every acceptance criterion.
    All,
}

impl From<ScenarioArg> for Scenario {
    fn from(s: ScenarioArg) -> Self {
        match s {
            ScenarioArg::Sine => Scenario::Sine,
            ScenarioArg::Collapse => Scenario::Collapse,
            ScenarioArg::Orders => Scenario::Orders,
            ScenarioArg::Decay => Scenario::Decay,
            ScenarioArg::Residual => Scenario::Residual,
            ScenarioArg::All => Scenario::All,
        }
    }
}

fn parse_mode(s: &str) -> Result<(u32, f64), String> {
    let (k, c) = s.split_once(':').ok_or("expected k:c")?;
    Ok((k.trim().parse().map_err(|e| format!("{e}"))?, c.trim().parse().map_err(|e| format!("{e}"))?))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result: Result<(String, bool), CommandError> = match cli.command {
        Command::Mlf { alpha, z, tol } => commands::mlf(alpha, z, tol).map(|s| (s, true)),
        Command::Caputo { function, delta, t, tol } => commands::caputo(&function, delta, t, tol).map(|s| (s, true)),
        Command::Exact { delta, x, t, modes } => commands::exact(delta, x, t, &modes).map(|s| (s, true)),
        Command::Solve { config } => commands::solve_config(&config).map(|s| (s, true)),
        Command::Converge { config } => commands::converge_config(&config).map(|s| (s, true)),
        Command::Diagnose { config, no_probe } => commands::diagnose_config(&config, !no_probe).map(|s| (s, true)),
        Command::Repro { scenario } => Ok(commands::repro(scenario.into())),
    };
    match result {
        Ok((text, ok)) => {
            print!("{text}");
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
