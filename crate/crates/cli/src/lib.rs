//! Library side of the `hft` command: CSV tables, SVG plots and the
//! subcommand implementations, kept separate from argument parsing so they
//! can be tested directly.

pub mod commands;
pub mod error;
pub mod svg;
pub mod table;

pub use commands::{
    fermi_plots, run_check, run_classify, run_crossings, run_fermi, run_models, run_scan,
    CheckConfig, FermiConfig, ModelSpec, ScanConfig,
};
pub use error::CliError;
pub use svg::Plot;
pub use table::CsvTable;
