use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};

use ising_cli::{
    cmd_contour_verify, cmd_corollary, cmd_exact_gap, cmd_mc_gap, cmd_peierls, exit_code, ContourVerifyOptions,
    CorollaryOptions, ExactGapOptions, ExperimentReport, McGapOptions, Model, OutputFormat, PeierlsOptions,
};
use ising_core::sampler::ChainConfig;
use ising_core::{ExactMethod, Site};

/// Finite-volume experiments on the 2D Ising model in a non-uniform field.
///
/// Exit status: 0 when every check passes, 2 when a check fails, 3 on a
/// parameter-regime or capacity error, 1 on any other error.
#[derive(Parser)]
#[command(name = "ising", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact ⟨σ⟩⁺ − ⟨σ⟩⁻ over nested boxes.
    ExactGap {
        #[arg(long, default_value_t = 4)]
        box_min: usize,
        #[arg(long, default_value_t = 12)]
        box_max: usize,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value = "0,0")]
        site: Site,
        #[arg(long, default_value = "transfer")]
        method: ExactMethod,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Exhaustive contour checks on a box of side ≤ 4.
    ContourVerify {
        #[arg(long = "box", default_value_t = 3)]
        side: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        beta_grid: Vec<f64>,
        #[arg(long = "J", default_value_t = 1.0)]
        coupling: f64,
        #[arg(long, default_value = "uniform:h=0")]
        field: String,
        /// Write every contour family (first β of the grid) as JSON.
        #[arg(long)]
        dump: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Exact μ⁻(σ = +1) against the closed-form Peierls bound.
    Peierls {
        #[arg(long, value_delimiter = ',', required = true)]
        beta_grid: Vec<f64>,
        #[arg(long = "J", default_value_t = 1.0)]
        coupling: f64,
        #[arg(long, default_value = "uniform:h=0")]
        field: String,
        #[arg(long = "box", default_value_t = 4)]
        side: usize,
        #[arg(long, default_value = "0,0")]
        site: Site,
        #[arg(long, default_value = "transfer")]
        method: ExactMethod,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Gap experiment with the field zeroed on a central window.
    Corollary {
        #[arg(long)]
        zero_window: usize,
        #[arg(long, default_value_t = 4)]
        box_min: usize,
        #[arg(long, default_value_t = 10)]
        box_max: usize,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value = "0,0")]
        site: Site,
        #[arg(long, default_value = "transfer")]
        method: ExactMethod,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Metropolis estimate of the gap on a large box.
    McGap {
        #[arg(long = "box")]
        side: usize,
        #[arg(long)]
        sweeps: usize,
        #[arg(long)]
        burn_in: usize,
        #[arg(long, default_value_t = 8)]
        chains: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        thinning: usize,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value = "0,0")]
        site: Site,
        /// Also compute the exact transfer gap on a nested box of this side.
        #[arg(long = "exact-box")]
        exact_side: Option<usize>,
        /// Write per-sweep box magnetizations as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    beta: f64,
    #[arg(long = "J", default_value_t = 1.0)]
    coupling: f64,
    /// Field spec, e.g. uniform:h=0.5, powerlaw:A=0.02,p=3, table:square=3,h=0.2+powerlaw:A=0.02,p=3
    #[arg(long, default_value = "uniform:h=0")]
    field: String,
}

impl ModelArgs {
    fn model(&self) -> Result<Model> {
        Model::new(self.beta, self.coupling, &self.field)
    }
}

#[derive(Args)]
struct OutArgs {
    #[arg(long, requires = "path")]
    out: Option<OutputFormat>,
    #[arg(long, requires = "out")]
    path: Option<PathBuf>,
}

fn run(command: &Command) -> Result<ExperimentReport> {
    match command {
        Command::ExactGap {
            box_min,
            box_max,
            model,
            site,
            method,
            ..
        } => cmd_exact_gap(&ExactGapOptions {
            box_min: *box_min,
            box_max: *box_max,
            model: model.model()?,
            site: *site,
            method: *method,
        }),
        Command::ContourVerify {
            side,
            beta_grid,
            coupling,
            field,
            dump,
            ..
        } => {
            let model = Model::new(0.0, *coupling, field)?;
            cmd_contour_verify(&ContourVerifyOptions {
                side: *side,
                betas: beta_grid.clone(),
                coupling: *coupling,
                field: model.field,
                field_label: model.field_label,
                dump: dump.clone(),
            })
        }
        Command::Peierls {
            beta_grid,
            coupling,
            field,
            side,
            site,
            method,
            ..
        } => {
            let model = Model::new(0.0, *coupling, field)?;
            cmd_peierls(&PeierlsOptions {
                side: *side,
                betas: beta_grid.clone(),
                coupling: *coupling,
                field: model.field,
                field_label: model.field_label,
                site: *site,
                method: *method,
            })
        }
        Command::Corollary {
            zero_window,
            box_min,
            box_max,
            model,
            site,
            method,
            ..
        } => cmd_corollary(&CorollaryOptions {
            zero_window: *zero_window,
            box_min: *box_min,
            box_max: *box_max,
            model: model.model()?,
            site: *site,
            method: *method,
        }),
        Command::McGap {
            side,
            sweeps,
            burn_in,
            chains,
            seed,
            thinning,
            model,
            site,
            exact_side,
            trace,
            ..
        } => cmd_mc_gap(&McGapOptions {
            side: *side,
            chain: ChainConfig::new(*sweeps, *burn_in, *chains, *seed).with_thinning(*thinning),
            model: model.model()?,
            site: *site,
            exact_side: *exact_side,
            trace: trace.clone(),
        }),
    }
}

fn out_args(command: &Command) -> &OutArgs {
    match command {
        Command::ExactGap { out, .. }
        | Command::ContourVerify { out, .. }
        | Command::Peierls { out, .. }
        | Command::Corollary { out, .. }
        | Command::McGap { out, .. } => out,
    }
}

fn emit(report: &ExperimentReport, out: &OutArgs) -> Result<()> {
    print!("{}", report.to_text());
    match (out.out, &out.path) {
        (Some(format), Some(path)) => report.write(format, path)?,
        (None, None) => {}
        _ => bail!("--out and --path go together"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let mut outcome = run(&cli.command);
    if let Ok(report) = &outcome {
        if let Err(e) = emit(report, out_args(&cli.command)) {
            outcome = Err(e);
        }
    }
    if let Err(e) = &outcome {
        eprintln!("error: {e:#}");
    }
    ExitCode::from(exit_code(&outcome) as u8)
}
