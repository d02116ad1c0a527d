use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "qdwitness", version, about = "Witness non-objectivity of simulated system-environment states")]
pub struct Cli {
    /// JSON configuration for `witness` and `sweep`.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Write the result here as well (for `sweep`: instead of stdout).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Overrides the seed given in the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the witness protocol described by --config and print the report.
    Witness,
    /// Evaluate the protocol over noise strengths and fragments, as CSV.
    Sweep,
    /// Check the objectivity structure of a state file.
    Check {
        /// State file (layout plus matrix of [re, im] pairs).
        state: PathBuf,
        /// Preferred objective subspaces to check against.
        #[arg(value_enum)]
        spec: SpecName,
        /// Environments in the fragment, comma separated; defaults to all.
        #[arg(long, value_delimiter = ',')]
        fragment: Vec<String>,
    },
    /// Compare run counts of state tomography and the witness scheme.
    Cost {
        /// Number of two-photon environments.
        #[arg(long)]
        m: u32,
        /// Successful runs needed per measurement setting.
        #[arg(long)]
        c: u64,
        /// CNOT success probability.
        #[arg(long)]
        p_cnot: f64,
        /// CNOT fidelity.
        #[arg(long, default_value_t = 1.0)]
        f_cnot: f64,
    },
    /// Print one of the built-in states as a state file.
    State {
        #[arg(value_enum)]
        preset: StatePreset,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpecName {
    /// Even/odd parity subspaces on two-qubit environments.
    Parity,
    /// Rank-one computational projectors on single-subsystem environments.
    Computational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatePreset {
    /// Noise-free initial state of the two-environment parity experiment.
    SqdInitial,
    /// Five-qubit GHZ state.
    Ghz5,
    /// Maximally mixed state of five qubits.
    MaximallyMixed5,
}
