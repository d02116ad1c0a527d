//! Noise sweeps: one protocol evaluation per (fragment, p) point.

use std::io::Write;
use std::path::PathBuf;

use anyhow::Result;
use qdwitness_core::channels::{NoiseConfig, NoiseMode};
use qdwitness_core::objectivity::Framework;
use qdwitness_core::protocol::{run_protocol, CnotModel, ProtocolConfig, WitnessReport, DEFAULT_SEED};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SweepFile")]
pub struct SweepSpec {
    pub framework: Framework,
    pub noise_mode: NoiseMode,
    pub p_values: Vec<f64>,
    pub fragments: Vec<Vec<String>>,
    pub shots: u64,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    pub f: f64,
    pub p_cnot: f64,
    pub cnot_model: CnotModel,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    framework: Framework,
    noise_mode: NoiseMode,
    p_values: Vec<f64>,
    fragments: Vec<Vec<String>>,
    #[serde(default)]
    shots: u64,
    #[serde(default = "default_seed")]
    seed: u64,
    #[serde(default)]
    output_path: Option<PathBuf>,
    #[serde(default = "one")]
    f: f64,
    #[serde(default = "one")]
    p_cnot: f64,
    #[serde(default)]
    cnot_model: CnotModel,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn one() -> f64 {
    1.0
}

impl TryFrom<SweepFile> for SweepSpec {
    type Error = String;

    fn try_from(s: SweepFile) -> Result<Self, String> {
        if s.p_values.is_empty() {
            return Err("p_values must not be empty".into());
        }
        if let Some(p) = s.p_values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(format!("p_values: {p} is outside [0, 1]"));
        }
        if s.p_values.windows(2).any(|w| w[1] < w[0]) {
            return Err("p_values must be sorted ascending".into());
        }
        if s.fragments.is_empty() || s.fragments.iter().any(Vec::is_empty) {
            return Err("fragments must list at least one nonempty fragment".into());
        }
        Ok(Self {
            framework: s.framework,
            noise_mode: s.noise_mode,
            p_values: s.p_values,
            fragments: s.fragments,
            shots: s.shots,
            seed: s.seed,
            output_path: s.output_path,
            f: s.f,
            p_cnot: s.p_cnot,
            cnot_model: s.cnot_model,
        })
    }
}

impl SweepSpec {
    /// Protocol configurations in output order: fragments outer, p inner.
    pub fn points(&self) -> Vec<ProtocolConfig> {
        self.fragments
            .iter()
            .flat_map(|fragment| {
                self.p_values.iter().map(move |&p| {
                    let noise = NoiseConfig {
                        f: self.f,
                        p_cnot: self.p_cnot,
                        ..NoiseConfig::ideal(p, self.noise_mode)
                    };
                    let mut config = ProtocolConfig::new(self.framework, fragment)
                        .with_noise(noise)
                        .with_shots(self.shots, self.seed);
                    config.cnot_model = self.cnot_model;
                    config
                })
            })
            .collect()
    }
}

/// One CSV line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p: f64,
    pub fragment: String,
    pub measure: f64,
    pub witness_max_subset: f64,
    pub witness_single_min: f64,
    pub witness_single_max: f64,
    pub stderr: Option<f64>,
    pub successful_runs: u64,
}

impl SweepRow {
    fn new(p: f64, report: &WitnessReport) -> Self {
        let single = &report.witness_single;
        Self {
            p,
            fragment: report.fragment.join("+"),
            measure: report.measure,
            witness_max_subset: report.witness_max_subset,
            witness_single_min: single.iter().copied().fold(f64::INFINITY, f64::min),
            witness_single_max: single.iter().copied().fold(0.0, f64::max),
            stderr: report.stderr_max_subset,
            successful_runs: report.successful_runs,
        }
    }
}

/// Evaluates every point; points run in parallel but rows keep input order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let points = spec.points();
    for config in &points {
        config.validate()?;
    }
    let rows = points
        .par_iter()
        .map(|config| run_protocol(config).map(|r| SweepRow::new(config.noise.p, &r)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(rows)
}

const COLUMNS: &str = "\
# p: added noise strength
# fragment: environments accessed by the observer, joined by '+'
# measure: trace-norm non-objectivity measure of the system-fragment state
# witness_max_subset: largest witness over all outcome subsets
# witness_single_min, witness_single_max: extremes of the single-outcome witnesses
# stderr: bootstrap standard error of witness_max_subset (empty in exact mode)
# successful_runs: completed Monte Carlo runs over both branches (0 in exact mode)
";

pub fn write_csv<W: Write>(spec: &SweepSpec, rows: &[SweepRow], mut w: W) -> Result<()> {
    writeln!(
        w,
        "# qdwitness sweep: framework={}, noise_mode={}, shots={}, seed={}, f={}, p_cnot={}, cnot_model={}",
        tag(&spec.framework)?,
        tag(&spec.noise_mode)?,
        spec.shots,
        spec.seed,
        spec.f,
        spec.p_cnot,
        tag(&spec.cnot_model)?,
    )?;
    w.write_all(COLUMNS.as_bytes())?;
    let mut csv = csv::Writer::from_writer(w);
    for row in rows {
        csv.serialize(row)?;
    }
    csv.flush()?;
    Ok(())
}

/// Serialized name of a unit enum variant.
fn tag<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_value(v)?.as_str().unwrap_or_default().to_string())
}
