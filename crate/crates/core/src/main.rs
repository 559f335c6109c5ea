use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use chirped_transfer::cli::{
    cmd_final, cmd_freq, cmd_simulate, cmd_sweep, load_config, write_output, OutputFormat,
    RunConfig,
};
use chirped_transfer::{AxisSpec, Result};

/// Population transfer in a Y-type four-level atom driven by a chirped few-cycle pulse.
#[derive(Parser)]
#[command(name = "chirped-transfer", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time series of populations, coherences and pulse diagnostics
    Simulate(Common),
    /// Final populations of a single run
    Final(Common),
    /// Final populations over a 1D or 2D parameter lattice
    Sweep {
        #[command(flatten)]
        common: Common,
        /// param:min:max:count, given once or twice
        #[arg(long = "axis", required = true, value_name = "SPEC")]
        axes: Vec<String>,
    },
    /// Instantaneous frequency, envelope and resonance crossings
    Freq(Common),
}

#[derive(Args)]
struct Common {
    /// Flat key=value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one key (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE", allow_hyphen_values = true)]
    set: Vec<String>,
    /// Output file (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads for sweeps (default: all cores)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = load_config(self.config.as_deref(), &self.set)?;
        cfg.output = self.out.clone();
        cfg.format = match self.format {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    let (cfg, contents) = match cli.command {
        Command::Simulate(c) => {
            let cfg = c.load()?;
            let out = cmd_simulate(&cfg)?;
            (cfg, out)
        }
        Command::Final(c) => {
            let cfg = c.load()?;
            let out = cmd_final(&cfg)?;
            (cfg, out)
        }
        Command::Sweep { common, axes } => {
            let cfg = common.load()?;
            let axes = axes
                .iter()
                .map(|a| a.parse::<AxisSpec>())
                .collect::<Result<Vec<_>>>()?;
            let out = cmd_sweep(&cfg, &axes, common.workers)?;
            (cfg, out)
        }
        Command::Freq(c) => {
            let cfg = c.load()?;
            let out = cmd_freq(&cfg)?;
            (cfg, out)
        }
    };
    write_output(&cfg, &contents)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
