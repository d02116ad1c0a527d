//! Subcommand implementations. Each writes its primary output to `stdout`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use qdwitness_core::info::check_structure;
use qdwitness_core::protocol::{cost_model, run_protocol, CostEstimate, ProtocolConfig, WitnessReport};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::args::{Cli, Command, Format};
use crate::exit::ConfigError;
use crate::state_file::{preset, StateFile};
use crate::sweep::{run_sweep, write_csv, SweepSpec};

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let output = match &cli.command {
        Command::Witness => witness(cli)?,
        Command::Sweep => return sweep(cli, stdout),
        Command::Check { state, spec, fragment } => {
            reject_csv(cli, "check")?;
            let file: StateFile = read_json(state, "state file")?;
            let spec = file.objective_spec(*spec)?;
            let rho = file.density()?;
            let fragment = if fragment.is_empty() {
                spec.environments().iter().map(|e| e.name().to_string()).collect()
            } else {
                fragment.clone()
            };
            json(&check_structure(&rho, &spec, &fragment)?)?
        }
        Command::Cost { m, c, p_cnot, f_cnot } => {
            let estimate = cost_model(*m, *c, *p_cnot, *f_cnot)?;
            match cli.format {
                None => cost_table(*m, *c, *p_cnot, *f_cnot, &estimate),
                Some(Format::Json) => json(&estimate)?,
                Some(Format::Csv) => cost_csv(*m, *c, *p_cnot, *f_cnot, &estimate)?,
            }
        }
        Command::State { preset: which } => {
            reject_csv(cli, "state")?;
            json(&preset(*which)?)?
        }
    };
    stdout.write_all(output.as_bytes())?;
    if let Some(path) = &cli.out {
        fs::write(path, &output).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn witness(cli: &Cli) -> Result<String> {
    let path = required_config(cli)?;
    let mut config: ProtocolConfig = read_json(path, "config")?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    config.validate().with_context(|| format!("config {}", path.display()))?;
    let report = run_protocol(&config)?;
    match cli.format.unwrap_or(Format::Json) {
        Format::Json => json(&report),
        Format::Csv => report_csv(&report),
    }
}

/// Rows go to `--out`, else the spec's `output_path`, else stdout.
fn sweep(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let path = required_config(cli)?;
    let mut spec: SweepSpec = read_json(path, "sweep file")?;
    if let Some(seed) = cli.seed {
        spec.seed = seed;
    }
    let rows = run_sweep(&spec).with_context(|| format!("sweep file {}", path.display()))?;
    if cli.format == Some(Format::Json) {
        let text = json(&rows)?;
        return match cli.out.as_ref().or(spec.output_path.as_ref()) {
            Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
            None => Ok(stdout.write_all(text.as_bytes())?),
        };
    }
    match cli.out.as_ref().or(spec.output_path.as_ref()) {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            write_csv(&spec, &rows, &mut w)?;
            w.flush()?;
            Ok(())
        }
        None => write_csv(&spec, &rows, stdout),
    }
}

fn required_config(cli: &Cli) -> Result<&PathBuf> {
    cli.config
        .as_ref()
        .ok_or_else(|| ConfigError::new("--config PATH is required").into())
}

fn reject_csv(cli: &Cli, command: &str) -> Result<()> {
    if cli.format == Some(Format::Csv) {
        return Err(ConfigError::new(format!("`{command}` only emits JSON")).into());
    }
    Ok(())
}

/// Parses JSON, reporting the path of the offending field on failure.
pub fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| ConfigError::new(format!("cannot read {what} {}: {e}", path.display())))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        let msg = if field == "." {
            format!("{what} {}: {}", path.display(), e.inner())
        } else {
            format!("{what} {}: field `{field}`: {}", path.display(), e.inner())
        };
        ConfigError::new(msg).into()
    })
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn report_csv(report: &WitnessReport) -> Result<String> {
    let mut buf = format!(
        "# outcomes over {}; measure={}, witness_max_subset={}\n",
        report.outcome_subsystems.join(","),
        report.measure,
        report.witness_max_subset
    );
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["outcome", "p_identity", "p_gamma", "witness_single"])?;
    for (i, outcome) in report.outcomes.iter().enumerate() {
        w.write_record([
            outcome.clone(),
            report.p_identity[i].to_string(),
            report.p_gamma[i].to_string(),
            report.witness_single[i].to_string(),
        ])?;
    }
    buf.push_str(std::str::from_utf8(&w.into_inner()?)?);
    Ok(buf)
}

fn cost_table(m: u32, c: u64, p_cnot: f64, f_cnot: f64, e: &CostEstimate) -> String {
    let rows = [
        ("environments (M)", m.to_string()),
        ("runs per setting (C)", c.to_string()),
        ("CNOT success probability", p_cnot.to_string()),
        ("CNOT fidelity", f_cnot.to_string()),
        ("tomography runs", format!("{:.0}", e.tomography_runs)),
        ("witness runs", format!("{:.0}", e.witness_runs)),
        ("witness / tomography", format!("{:.6}", e.witness_runs / e.tomography_runs)),
        ("witness cheaper", if e.witness_wins { "yes" } else { "no" }.to_string()),
        ("break-even p_cnot, large M", format!("{:.4}", e.crossover_p)),
        ("break-even p_cnot, this M", format!("{:.4}", e.crossover_p_at_m)),
    ];
    rows.iter().map(|(k, v)| format!("{k:<28}{v}\n")).collect()
}

fn cost_csv(m: u32, c: u64, p_cnot: f64, f_cnot: f64, e: &CostEstimate) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "m", "c", "p_cnot", "f_cnot", "tomography_runs", "witness_runs", "witness_wins",
        "crossover_p", "crossover_p_at_m",
    ])?;
    w.write_record([
        m.to_string(),
        c.to_string(),
        p_cnot.to_string(),
        f_cnot.to_string(),
        e.tomography_runs.to_string(),
        e.witness_runs.to_string(),
        e.witness_wins.to_string(),
        e.crossover_p.to_string(),
        e.crossover_p_at_m.to_string(),
    ])?;
    Ok(String::from_utf8(w.into_inner()?)?)
}
