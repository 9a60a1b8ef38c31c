use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use risnoma_cli::config::{resolve_runs, RawConfig};
use risnoma_cli::sweep::{run_sweep, write_outputs};

/// Parameter sweeps for the RIS-aided full-duplex SWIPT-NOMA downlink:
/// closed-form metrics next to Monte-Carlo estimates, written as CSV.
#[derive(Parser, Debug)]
#[command(name = "sweep", version, about)]
struct Cli {
    /// Built-in sweep family (fig2 .. fig8).
    #[arg(long)]
    preset: Option<String>,

    /// TOML config overlaid on the preset (or defining a custom run).
    #[arg(long)]
    config: Option<PathBuf>,

    /// Monte-Carlo trials per grid point.
    #[arg(long)]
    trials: Option<u64>,

    /// Base RNG seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Output CSV path; the run manifest is written beside it.
    #[arg(long, default_value = "sweep.csv")]
    out: PathBuf,

    /// Skip the Monte-Carlo columns.
    #[arg(long, conflicts_with = "mc_only")]
    analytic_only: bool,

    /// Skip the closed-form columns.
    #[arg(long)]
    mc_only: bool,

    /// Use the literal allocation pair (alpha1 = 0.9, alpha2 = 0.1)
    /// instead of the cell-edge-favoring default.
    #[arg(long)]
    table1_literal: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let cfg = match &cli.config {
        Some(path) => match RawConfig::from_path(path) {
            Ok(c) => Some(c),
            Err(e) => {
                eprintln!("sweep: {e}");
                return ExitCode::from(1);
            }
        },
        None => None,
    };

    let mut runs = match resolve_runs(cli.preset.as_deref(), cfg.as_ref()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("sweep: {e}");
            return ExitCode::from(1);
        }
    };

    for run in &mut runs {
        if cli.table1_literal {
            run.base.alpha1 = 0.9;
            run.base.alpha2 = 0.1;
        }
        if let Some(t) = cli.trials {
            run.trials = t;
        }
        if let Some(s) = cli.seed {
            run.seed = s;
        }
        if cli.analytic_only {
            run.modes = vec![risnoma_cli::config::Mode::Analytic];
        } else if cli.mc_only {
            run.modes = vec![risnoma_cli::config::Mode::Mc];
        }
        if let Err(e) = run.validate() {
            eprintln!("sweep: {e}");
            return ExitCode::from(1);
        }
    }

    let alpha_mode = if cli.table1_literal {
        "literal pair (alpha1=0.9, alpha2=0.1)"
    } else {
        "cell-edge-favoring (alpha1, alpha2) = configured values"
    };
    eprintln!(
        "sweep: {} run(s), power allocation: {alpha_mode}, seed {}, {} trial(s)/point",
        runs.len(),
        runs[0].seed,
        runs[0].trials
    );

    let outcome = match run_sweep(&runs) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("sweep: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = write_outputs(&runs, &outcome, &cli.out) {
        eprintln!("sweep: cannot write output: {e}");
        return ExitCode::from(1);
    }
    eprintln!(
        "sweep: wrote {} row(s) to {} ({} of {} cell(s) failed)",
        outcome.rows.len(),
        cli.out.display(),
        outcome.failed_cells,
        outcome.total_cells
    );
    if outcome.failed_cells > 0 {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}
