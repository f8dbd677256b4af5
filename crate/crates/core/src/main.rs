//! Command-line front end for the MUB sorter simulator.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mubsort::commands::{self, SweepParam};
use mubsort::config::RunConfig;

#[derive(Debug, Parser)]
#[command(
    name = "mubsort",
    version,
    about = "Coupled-mode simulator for multiplexed thick-hologram MUB sorters",
    after_help = "Config resolution: built-in PTR-glass defaults, overridden by --config FILE, \
                  overridden by same-named flags."
)]
struct Cli {
    /// JSON config file; missing fields take the built-in defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out", value_name = "DIR")]
    out: PathBuf,

    /// Bulk refractive index.
    #[arg(long, global = true, value_name = "N0")]
    n0: Option<f64>,

    /// Index modulation depth.
    #[arg(long, global = true, value_name = "DN")]
    delta_n: Option<f64>,

    /// Vacuum wavelength (nm).
    #[arg(long, global = true, value_name = "NM")]
    lambda_nm: Option<f64>,

    /// Aperture (mm).
    #[arg(long, global = true, value_name = "MM")]
    aperture_mm: Option<f64>,

    /// Emulsion depth available for recording (mm).
    #[arg(long, global = true, value_name = "MM")]
    emulsion_mm: Option<f64>,

    /// Which MUB the hologram records (1..4).
    #[arg(long = "mub", global = true, value_name = "1..4")]
    mub_index: Option<usize>,

    /// Reference tilts in waves, e.g. --reference-tilts 2000,3000,4000.
    #[arg(long, global = true, value_delimiter = ',', num_args = 3, value_name = "W,W,W")]
    reference_tilts: Option<Vec<f64>>,

    /// Signal tilts in waves, e.g. --signal-tilts 1,2,3.
    #[arg(long, global = true, value_delimiter = ',', num_args = 3, value_name = "W,W,W")]
    signal_tilts: Option<Vec<f64>>,

    /// Force rho_i = sigma_j = beta in the coupled-mode matrix.
    #[arg(long, global = true)]
    degenerate_kz: bool,

    /// RK4 step (micrometers).
    #[arg(long, global = true, value_name = "UM")]
    rk4_step_um: Option<f64>,

    /// Seed for the Monte Carlo exchange.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Compatibility: start readout with unit reference amplitudes
    /// (affects crosstalk and figure2).
    #[arg(long, global = true)]
    initial_reference_amps: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Twelve-state crosstalk table at one depth (default: common z_max).
    Crosstalk {
        /// Evaluation depth in mm.
        #[arg(long = "z", value_name = "MM")]
        z_mm: Option<f64>,
    },
    /// Probability-vs-depth curves for all twelve input states.
    Figure2 {
        /// Final depth in mm (default: common z_max).
        #[arg(long = "z", value_name = "MM")]
        z_mm: Option<f64>,
        /// Number of depth samples per curve.
        #[arg(long, default_value_t = 201)]
        samples: usize,
        /// Also emit a static SVG chart per panel.
        #[arg(long)]
        svg: bool,
    },
    /// Locate the maximum-efficiency depth.
    Zmax,
    /// QKD metrics across all four sorters at their own operating depths.
    Qkd {
        /// Also run a seeded Monte Carlo exchange of N symbols.
        #[arg(long = "monte-carlo", value_name = "N")]
        monte_carlo: Option<u64>,
    },
    /// Sensitivity sweep of one scalar parameter.
    Sweep {
        #[arg(long, value_enum)]
        param: SweepParam,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 9)]
        steps: usize,
    },
}

impl Cli {
    fn resolve_config(&self) -> mubsort::Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.n0 {
            config.n0 = v;
        }
        if let Some(v) = self.delta_n {
            config.delta_n = v;
        }
        if let Some(v) = self.lambda_nm {
            config.lambda_nm = v;
        }
        if let Some(v) = self.aperture_mm {
            config.aperture_mm = v;
        }
        if let Some(v) = self.emulsion_mm {
            config.emulsion_mm = v;
        }
        if let Some(v) = self.mub_index {
            config.mub_index = v;
        }
        if let Some(v) = &self.reference_tilts {
            config.reference_tilts = [v[0], v[1], v[2]];
        }
        if let Some(v) = &self.signal_tilts {
            config.signal_tilts = [v[0], v[1], v[2]];
        }
        if self.degenerate_kz {
            config.degenerate_kz = true;
        }
        if let Some(v) = self.rk4_step_um {
            config.rk4_step_um = v;
        }
        if let Some(v) = self.seed {
            config.seed = v;
        }
        config.validate()?;
        Ok(config)
    }
}

fn run(cli: &Cli) -> mubsort::Result<Vec<PathBuf>> {
    let config = cli.resolve_config()?;
    match &cli.command {
        Command::Crosstalk { z_mm } => commands::cmd_crosstalk(
            &config,
            *z_mm,
            cli.initial_reference_amps,
            &cli.out,
        ),
        Command::Figure2 {
            z_mm,
            samples,
            svg,
        } => commands::cmd_figure2(
            &config,
            *z_mm,
            *samples,
            *svg,
            cli.initial_reference_amps,
            &cli.out,
        ),
        Command::Zmax => commands::cmd_zmax(&config, &cli.out),
        Command::Qkd { monte_carlo } => commands::cmd_qkd(&config, *monte_carlo, &cli.out),
        Command::Sweep {
            param,
            from,
            to,
            steps,
        } => commands::cmd_sweep(&config, *param, *from, *to, *steps, &cli.out),
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(files) => {
            for file in files {
                println!("wrote {}", file.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
