//! JSON state files: a subsystem layout plus a row-major complex matrix.

use std::collections::BTreeMap;

use anyhow::{Context, Result};
use num_complex::Complex64;
use qdwitness_core::channels::{NoiseConfig, NoiseMode};
use qdwitness_core::hilbert::Subsystem;
use qdwitness_core::objectivity::{EnvironmentSubspaces, ObjectiveSubspaceSpec};
use qdwitness_core::protocol::{isbs_layout, prepare_initial_sqd, sqd_parity_spec, ComplexPair};
use qdwitness_core::{CMatrix, CVector, DensityOperator, PureState};
use serde::{Deserialize, Serialize};

use crate::args::{SpecName, StatePreset};
use crate::exit::ConfigError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub layout: Vec<Subsystem>,
    /// Defaults to the first subsystem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<String>,
    /// Environment name to its subsystems. Defaults to one environment per
    /// non-system subsystem, named after it.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub environments: BTreeMap<String, Vec<String>>,
    pub matrix: Vec<Vec<ComplexPair>>,
}

impl StateFile {
    pub fn from_density(
        rho: &DensityOperator,
        system: Option<&str>,
        environments: BTreeMap<String, Vec<String>>,
    ) -> Self {
        let m = rho.matrix();
        Self {
            layout: rho.layout().subsystems().to_vec(),
            system: system.map(str::to_string),
            environments,
            matrix: (0..m.nrows())
                .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
                .collect(),
        }
    }

    /// Builds the validated density operator; a malformed matrix reports the
    /// broken invariant.
    pub fn density(&self) -> Result<DensityOperator> {
        let layout = qdwitness_core::TensorLayout::from_subsystems(self.layout.clone())
            .context("state layout")?;
        let n = self.matrix.len();
        if let Some(row) = self.matrix.iter().position(|r| r.len() != n) {
            return Err(ConfigError::new(format!(
                "matrix: row {row} has {} entries, expected {n}",
                self.matrix[row].len()
            ))
            .into());
        }
        let m = CMatrix::from_fn(n, n, |r, c| {
            let [re, im] = self.matrix[r][c];
            Complex64::new(re, im)
        });
        DensityOperator::new(layout, m).context("state matrix is not a valid density operator")
    }

    pub fn system(&self) -> Result<&str> {
        match &self.system {
            Some(s) => Ok(s),
            None => self
                .layout
                .first()
                .map(|s| s.label.as_str())
                .ok_or_else(|| ConfigError::new("layout: no subsystems").into()),
        }
    }

    pub fn environments(&self) -> Result<BTreeMap<String, Vec<String>>> {
        if !self.environments.is_empty() {
            return Ok(self.environments.clone());
        }
        let system = self.system()?;
        Ok(self
            .layout
            .iter()
            .filter(|s| s.label != system)
            .map(|s| (s.label.clone(), vec![s.label.clone()]))
            .collect())
    }

    /// Objective subspaces named by `spec`, laid over this file's environments.
    pub fn objective_spec(&self, spec: SpecName) -> Result<ObjectiveSubspaceSpec> {
        let system = self.system()?;
        let envs = self.environments()?;
        match spec {
            SpecName::Parity => {
                let mut triples = Vec::new();
                for (name, labels) in &envs {
                    let [a, b] = labels.as_slice() else {
                        return Err(ConfigError::new(format!(
                            "environments.{name}: the parity spec needs exactly two qubits, got {}",
                            labels.len()
                        ))
                        .into());
                    };
                    triples.push((name.as_str(), a.as_str(), b.as_str()));
                }
                Ok(ObjectiveSubspaceSpec::parity2(system, &triples)?)
            }
            SpecName::Computational => {
                let dim = self.dim_of(system)?;
                let mut subspaces = Vec::new();
                for (name, labels) in &envs {
                    let [label] = labels.as_slice() else {
                        return Err(ConfigError::new(format!(
                            "environments.{name}: the computational spec needs a single subsystem, got {}",
                            labels.len()
                        ))
                        .into());
                    };
                    let env_dim = self.dim_of(label)?;
                    subspaces.push(EnvironmentSubspaces::computational(name, label, env_dim, dim)?);
                }
                let basis = (0..dim)
                    .map(|i| CVector::from_fn(dim, |r, _| Complex64::new(f64::from(u8::from(r == i)), 0.0)))
                    .collect();
                Ok(ObjectiveSubspaceSpec::new(system, basis, subspaces)?)
            }
        }
    }

    fn dim_of(&self, label: &str) -> Result<usize> {
        self.layout
            .iter()
            .find(|s| s.label == label)
            .map(|s| s.dim)
            .ok_or_else(|| ConfigError::new(format!("unknown subsystem `{label}`")).into())
    }
}

pub fn preset(which: StatePreset) -> Result<StateFile> {
    Ok(match which {
        StatePreset::SqdInitial => {
            let rho = prepare_initial_sqd(&NoiseConfig::ideal(0.0, NoiseMode::MixGlobal))?;
            let envs = sqd_parity_spec()
                .environments()
                .iter()
                .map(|e| (e.name().to_string(), e.labels().map(str::to_string).collect()))
                .collect();
            StateFile::from_density(&rho, Some("S"), envs)
        }
        StatePreset::Ghz5 => {
            let rho = PureState::ghz(isbs_layout())?.to_density();
            StateFile::from_density(&rho, Some("S"), BTreeMap::new())
        }
        StatePreset::MaximallyMixed5 => {
            let rho = DensityOperator::maximally_mixed(isbs_layout());
            StateFile::from_density(&rho, Some("S"), BTreeMap::new())
        }
    })
}
