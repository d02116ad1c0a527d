//! The witness protocol: state preparation, the identity and objectivity
//! branches, exact and sampled witness estimates, and the run-count model.

mod cost;
mod experiment;
mod monte_carlo;
mod prepare;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::channels::NoiseConfig;
use crate::error::{Error, Result};
use crate::hilbert::{CMatrix, CVector, DensityOperator, TensorLayout};
use crate::objectivity::{EnvironmentSubspaces, Framework, Objectivity, ObjectiveSubspaceSpec};

pub use cost::{cost_model, CostEstimate};
pub use experiment::{Experiment, FinalUnitary, ReplacementState};
pub(crate) use experiment::Gamma;
pub use monte_carlo::{witness_monte_carlo, STALL_WINDOW};
pub use prepare::{
    isbs_computational_basis, isbs_layout, prepare_initial_isbs, prepare_initial_sqd,
    sqd_layout, sqd_parity_spec, ISBS_LABELS, SQD_ENVIRONMENTS, SQD_LABELS,
};

/// Seed used when a configuration does not name one.
pub const DEFAULT_SEED: u64 = 20_240_611;

/// A complex number as `[re, im]`.
pub type ComplexPair = [f64; 2];

fn complex_matrix(rows: &[Vec<ComplexPair>], what: &str) -> Result<CMatrix> {
    let n = rows.len();
    if let Some(r) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::InvalidArgument(format!(
            "{what}: row of length {} in a {n}-row matrix",
            r.len()
        )));
    }
    Ok(CMatrix::from_fn(n, n, |r, c| {
        Complex64::new(rows[r][c][0], rows[r][c][1])
    }))
}

fn complex_vector(v: &[ComplexPair]) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(|z| Complex64::new(z[0], z[1])))
}

/// Final evolution before the readout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitaryPreset {
    /// Hadamard on the system and on the second photon of each environment.
    AlternatingHadamards,
    /// Hadamard on every photon.
    AllHadamards,
    /// Unitary on the whole register as rows of `[re, im]` entries.
    Custom(Vec<Vec<ComplexPair>>),
}

/// Conditional subspaces of one environment as kets spanning each `Π_{E|i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomEnvironment {
    pub name: String,
    pub subspaces: Vec<Vec<Vec<ComplexPair>>>,
}

/// Preferred objective subspaces of the strong-Darwinism experiment.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubspacePreset {
    /// Even parity for system state 0, odd parity for 1.
    #[default]
    Parity2,
    Custom(Vec<CustomEnvironment>),
}

/// Where the depolarizing CNOT weight `f` is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CnotModel {
    /// Every CNOT is perfect regardless of `f`.
    Ideal,
    /// The preparation CNOTs depolarize.
    #[default]
    NoisyPrep,
    /// The preparation CNOTs and the parity-check CNOTs depolarize.
    NoisyPrepAndParity,
}

/// Everything needed to run the witness protocol once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    pub framework: Framework,
    pub fragment: Vec<String>,
    #[serde(default)]
    pub noise: NoiseConfig,
    /// Defaults to alternating Hadamards for strong Darwinism and all Hadamards otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitary: Option<UnitaryPreset>,
    #[serde(default)]
    pub subspaces: SubspacePreset,
    #[serde(default)]
    pub replacement: ReplacementState,
    /// Successful runs over both branches; zero selects exact evaluation.
    #[serde(default)]
    pub shots: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub cnot_model: CnotModel,
    /// Fraction of the shots spent on the identity branch.
    #[serde(default = "default_identity_share")]
    pub identity_share: f64,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_identity_share() -> f64 {
    0.5
}

impl ProtocolConfig {
    /// Exact-mode configuration with default settings and no noise.
    pub fn new<S: AsRef<str>>(framework: Framework, fragment: &[S]) -> Self {
        Self {
            framework,
            fragment: fragment.iter().map(|f| String::from(f.as_ref())).collect(),
            noise: NoiseConfig::default(),
            unitary: None,
            subspaces: SubspacePreset::default(),
            replacement: ReplacementState::default(),
            shots: 0,
            seed: DEFAULT_SEED,
            cnot_model: CnotModel::default(),
            identity_share: default_identity_share(),
        }
    }

    pub fn with_noise(mut self, noise: NoiseConfig) -> Self {
        self.noise = noise;
        self
    }

    pub fn with_shots(mut self, shots: u64, seed: u64) -> Self {
        self.shots = shots;
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.noise.validate()?;
        if self.fragment.is_empty() {
            return Err(Error::InvalidArgument("fragment is empty".into()));
        }
        if !(self.identity_share > 0.0 && self.identity_share < 1.0) {
            return Err(Error::InvalidProbability {
                name: "identity_share",
                value: self.identity_share,
            });
        }
        if self.shots > 0 {
            let (a, b) = self.branch_shots();
            if a == 0 || b == 0 {
                return Err(Error::InvalidArgument(format!(
                    "{} shots leave a branch without runs",
                    self.shots
                )));
            }
        }
        if self.framework == Framework::Isbs && self.subspaces != SubspacePreset::Parity2 {
            return Err(Error::InvalidSpec(
                "custom subspaces apply to the strong Darwinism framework only".into(),
            ));
        }
        Ok(())
    }

    /// Successful runs required of the identity and objectivity branches.
    pub fn branch_shots(&self) -> (u64, u64) {
        let id = (self.shots as f64 * self.identity_share).round() as u64;
        (id, self.shots - id.min(self.shots))
    }

    pub fn layout(&self) -> TensorLayout {
        match self.framework {
            Framework::Sqd => sqd_layout(),
            Framework::Isbs => isbs_layout(),
        }
    }

    pub fn objectivity(&self) -> Result<Objectivity> {
        match (self.framework, &self.subspaces) {
            (Framework::Sqd, SubspacePreset::Parity2) => Ok(Objectivity::Sqd(sqd_parity_spec())),
            (Framework::Sqd, SubspacePreset::Custom(envs)) => {
                let layout = sqd_layout();
                let built = SQD_ENVIRONMENTS
                    .iter()
                    .map(|name| {
                        let env = envs.iter().find(|e| e.name == *name).ok_or_else(|| {
                            Error::InvalidSpec(format!("custom subspaces omit environment `{name}`"))
                        })?;
                        let labels = [format!("{name}_1"), format!("{name}_2")];
                        let kets: Vec<Vec<CVector>> = env
                            .subspaces
                            .iter()
                            .map(|s| s.iter().map(|k| complex_vector(k)).collect())
                            .collect();
                        EnvironmentSubspaces::from_subspace_bases(name, layout.select(&labels)?, &kets)
                    })
                    .collect::<Result<Vec<_>>>()?;
                if let Some(e) = envs.iter().find(|e| !SQD_ENVIRONMENTS.contains(&e.name.as_str())) {
                    return Err(Error::UnknownEnvironment(e.name.clone()));
                }
                let basis = (0..2)
                    .map(|i| {
                        let mut v = CVector::zeros(2);
                        v[i] = Complex64::new(1.0, 0.0);
                        v
                    })
                    .collect();
                Ok(Objectivity::Sqd(ObjectiveSubspaceSpec::new("S", basis, built)?))
            }
            (Framework::Isbs, _) => Ok(Objectivity::Isbs(isbs_computational_basis())),
        }
    }

    pub fn final_unitary(&self) -> Result<FinalUnitary> {
        let preset = self.unitary.clone().unwrap_or(match self.framework {
            Framework::Sqd => UnitaryPreset::AlternatingHadamards,
            Framework::Isbs => UnitaryPreset::AllHadamards,
        });
        Ok(match preset {
            UnitaryPreset::AllHadamards => FinalUnitary::hadamards(&self.layout().labels().collect::<Vec<_>>()),
            UnitaryPreset::AlternatingHadamards => match self.framework {
                Framework::Sqd => FinalUnitary::hadamards(&["S", "E1_2", "E2_2"]),
                // single-photon environments: every other photon
                Framework::Isbs => FinalUnitary::hadamards(&["S", "E2", "E4"]),
            },
            UnitaryPreset::Custom(rows) => FinalUnitary::Global(complex_matrix(&rows, "unitary")?),
        })
    }

    pub fn experiment(&self) -> Result<Experiment> {
        self.validate()?;
        let exp = Experiment::new(
            self.layout(),
            self.objectivity()?,
            &self.fragment,
            self.final_unitary()?,
            self.replacement,
        )?;
        if self.noisy_parity() {
            exp.check_parity_implementable()?;
        }
        Ok(exp)
    }

    /// Depolarization weight of the preparation CNOTs.
    pub(crate) fn prep_f(&self) -> f64 {
        match self.cnot_model {
            CnotModel::Ideal => 1.0,
            _ => self.noise.f,
        }
    }

    /// True when the parity-check CNOTs depolarize.
    pub(crate) fn noisy_parity(&self) -> bool {
        self.framework == Framework::Sqd
            && self.cnot_model == CnotModel::NoisyPrepAndParity
            && self.noise.f < 1.0
    }

    /// The channel-averaged prepared state.
    pub fn prepare(&self) -> Result<DensityOperator> {
        let noise = NoiseConfig {
            f: self.prep_f(),
            ..self.noise
        };
        match self.framework {
            Framework::Sqd => prepare_initial_sqd(&noise),
            Framework::Isbs => prepare_initial_isbs(&noise),
        }
    }
}

/// Sampling statistics of a Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStatistics {
    pub identity_runs: u64,
    pub gamma_runs: u64,
    /// Objectivity-branch runs whose projection failed; they count with no outcome.
    pub gamma_null_runs: u64,
    pub attempts: u64,
}

/// Outcome probabilities of both branches and the witnesses derived from them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub framework: Framework,
    pub fragment: Vec<String>,
    /// Subsystems the outcome strings refer to, in order.
    pub outcome_subsystems: Vec<String>,
    pub outcomes: Vec<String>,
    pub p_identity: Vec<f64>,
    pub p_gamma: Vec<f64>,
    /// `|P_id − P_Γ|` per outcome.
    pub witness_single: Vec<f64>,
    pub witness_max_subset: f64,
    pub measure: f64,
    pub stderr_max_subset: Option<f64>,
    pub successful_runs: u64,
    pub runs: Option<RunStatistics>,
}

impl WitnessReport {
    /// `measure − witness_max_subset`.
    pub fn bound_gap(&self) -> f64 {
        self.measure - self.witness_max_subset
    }

    fn assemble(
        config: &ProtocolConfig,
        exp: &Experiment,
        p_identity: Vec<f64>,
        p_gamma: Vec<f64>,
        measure: f64,
    ) -> Self {
        let diffs = outcome_differences(&p_identity, &p_gamma);
        Self {
            framework: config.framework,
            fragment: exp.fragment().to_vec(),
            outcome_subsystems: exp.sf_labels().to_vec(),
            outcomes: exp.outcome_labels(),
            witness_single: diffs.iter().map(|d| d.abs()).collect(),
            witness_max_subset: max_subset_witness(&diffs),
            p_identity,
            p_gamma,
            measure,
            stderr_max_subset: None,
            successful_runs: 0,
            runs: None,
        }
    }
}

/// `P_id(i) − P_Γ(i)` per outcome.
pub fn outcome_differences(p_identity: &[f64], p_gamma: &[f64]) -> Vec<f64> {
    p_identity.iter().zip(p_gamma).map(|(a, b)| a - b).collect()
}

/// Largest `|Σ_{i∈A} d_i|` over outcome subsets `A`: the larger of the
/// positive part and the magnitude of the negative part.
pub fn max_subset_witness(differences: &[f64]) -> f64 {
    let pos: f64 = differences.iter().filter(|d| **d >= 0.0).sum();
    let neg: f64 = differences.iter().filter(|d| **d < 0.0).sum();
    pos.max(-neg)
}

/// Outcome probabilities over the whole register for one branch of `config`.
pub fn run_branch(rho_t: &DensityOperator, config: &ProtocolConfig, apply_gamma: bool) -> Result<Vec<f64>> {
    config.experiment()?.run_branch(rho_t, apply_gamma)
}

/// Slack allowed when checking that the witness stays below the measure.
pub const BOUND_SLACK: f64 = 1e-9;

/// Exact branch probabilities, witnesses and the measure.
pub fn witness_exact(config: &ProtocolConfig) -> Result<WitnessReport> {
    if config.shots != 0 {
        return Err(Error::InvalidArgument(
            "exact evaluation needs shots = 0".into(),
        ));
    }
    let exp = config.experiment()?;
    let rho = config.prepare()?;
    let weights = alloc::vec![config.noise.f; exp.parity_cnots()];
    let gamma = if config.noisy_parity() {
        Gamma::NoisyParity(&weights)
    } else {
        Gamma::Ideal
    };
    let p_id = exp.marginalize(&exp.run_branch_with(&rho, Gamma::Skip)?);
    let p_g = exp.marginalize(&exp.run_branch_with(&rho, gamma)?);
    let report = WitnessReport::assemble(config, &exp, p_id, p_g, exp.measure(&rho)?);
    if matches!(gamma, Gamma::Ideal) && report.witness_max_subset > report.measure + BOUND_SLACK {
        return Err(Error::InvariantViolation(format!(
            "witness {} exceeds measure {}",
            report.witness_max_subset, report.measure
        )));
    }
    Ok(report)
}

/// Exact or Monte Carlo evaluation, depending on `config.shots`.
pub fn run_protocol(config: &ProtocolConfig) -> Result<WitnessReport> {
    if config.shots == 0 {
        witness_exact(config)
    } else {
        witness_monte_carlo(config)
    }
}
