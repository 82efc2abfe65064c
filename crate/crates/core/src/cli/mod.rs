//! Command-line front end: `fit`, `simulate`, `plot-data` and `fisher`.

mod args;
mod commands;
mod config;
mod error;
mod ingest;
mod plot;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use args::{Cli, Command, FamilyChoice, FisherArgs, FitArgs, PlotArgs, PriorArgs, SimArgs};
pub use commands::{
    cache_file, cmd_fisher, cmd_fit, cmd_plot_data, cmd_simulate, render_table, FIT_SCHEMA, PLOT_SCHEMA,
    SCHEMA_VERSION, SIM_SCHEMA,
};
pub use config::{pick, ConfigFile, KNOWN_KEYS};
pub use error::{CliError, CliResult, EXIT_CONFIG, EXIT_INPUT, EXIT_NUMERIC, EXIT_OK, EXIT_OUTPUT};
pub use ingest::{ingest_csv, ColumnSpec, InputRow, InputTable, MIN_FIT_ROWS};
pub use plot::{risk_density, DensityMethod, RiskDensity};

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, log: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(log, "{e}");
                return EXIT_CONFIG;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    let result = match &cli.command {
        Command::Fit(a) => cmd_fit(a, out, log),
        Command::Simulate(a) => cmd_simulate(a, out, log),
        Command::PlotData(a) => cmd_plot_data(a, out, log),
        Command::Fisher(a) => cmd_fisher(a, out, log),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(log, "error: {e}");
            e.exit_code()
        }
    }
}
