//! Initial states of the two photonic experiments.

use alloc::vec::Vec;

use crate::channels::{apply_gate, depolarize_local, gates, mix_with_noise, noisy_cnot, NoiseConfig};
use crate::error::Result;
use crate::hilbert::{tensor_product, DensityOperator, PureState, TensorLayout};
use crate::objectivity::{IsbsBasis, ObjectiveSubspaceSpec};

/// System photon followed by the two photons of each of two environments.
pub const SQD_LABELS: [&str; 5] = ["S", "E1_1", "E1_2", "E2_1", "E2_2"];
/// System photon followed by four single-photon environments.
pub const ISBS_LABELS: [&str; 5] = ["S", "E1", "E2", "E3", "E4"];
/// Environment names of the strong-Darwinism experiment.
pub const SQD_ENVIRONMENTS: [&str; 2] = ["E1", "E2"];

/// Control/target pairs of the preparation CNOTs.
pub(crate) const SQD_PREP_CNOTS: [(&str, &str); 2] = [("S", "E1_1"), ("S", "E2_1")];
pub(crate) const ISBS_PREP_CNOTS: [(&str, &str); 1] = [("E1", "S")];

pub fn sqd_layout() -> TensorLayout {
    TensorLayout::qubits(&SQD_LABELS).expect("static labels are distinct")
}

pub fn isbs_layout() -> TensorLayout {
    TensorLayout::qubits(&ISBS_LABELS).expect("static labels are distinct")
}

/// Parity subspaces on both two-photon environments.
pub fn sqd_parity_spec() -> ObjectiveSubspaceSpec {
    ObjectiveSubspaceSpec::parity2("S", &[("E1", "E1_1", "E1_2"), ("E2", "E2_1", "E2_2")])
        .expect("parity preset is valid")
}

/// Computational basis on the system and all four environments.
pub fn isbs_computational_basis() -> IsbsBasis {
    IsbsBasis::computational("S", 2, &ISBS_LABELS[1..]).expect("static labels are distinct")
}

/// How the added noise is realized on the prepared state.
#[derive(Debug, Clone, Copy)]
pub(crate) enum NoiseRealization {
    /// The averaged channel.
    Channel(NoiseConfig),
    /// One Monte Carlo draw of the global mixing: replaced or untouched.
    Global(bool),
    /// One Monte Carlo draw of local depolarization, bit `k` set when photon `k` is replaced.
    Local(u32),
}

impl NoiseRealization {
    fn apply(&self, rho: DensityOperator) -> Result<DensityOperator> {
        match self {
            NoiseRealization::Channel(cfg) => cfg.apply(&rho),
            NoiseRealization::Global(false) | NoiseRealization::Local(0) => Ok(rho),
            NoiseRealization::Global(true) => mix_with_noise(&rho, 1.0),
            NoiseRealization::Local(mask) => {
                let hit: Vec<&str> = rho
                    .layout()
                    .labels()
                    .enumerate()
                    .filter(|(k, _)| mask & (1 << k) != 0)
                    .map(|(_, l)| l)
                    .collect();
                depolarize_local(&rho, 1.0, &hit)
            }
        }
    }
}

fn ghz4<S: AsRef<str>>(labels: &[S]) -> Result<DensityOperator> {
    Ok(PureState::ghz(TensorLayout::qubits(labels)?)?.to_density())
}

/// Runs the preparation circuit with CNOT weights `prep_f` (one per CNOT).
pub(crate) fn prepare(
    framework: crate::objectivity::Framework,
    prep_f: &[f64],
    noise: NoiseRealization,
) -> Result<DensityOperator> {
    use crate::objectivity::Framework;
    let (mut rho, cnots): (DensityOperator, &[(&str, &str)]) = match framework {
        Framework::Sqd => {
            let s = DensityOperator::basis(TensorLayout::qubits(&["S"])?, 0)?;
            let s = apply_gate(&s, &gates::hadamard(), &["S"])?;
            (tensor_product(&s, &ghz4(&SQD_LABELS[1..])?)?, &SQD_PREP_CNOTS)
        }
        Framework::Isbs => {
            let s = DensityOperator::basis(TensorLayout::qubits(&["S"])?, 0)?;
            (tensor_product(&s, &ghz4(&ISBS_LABELS[1..])?)?, &ISBS_PREP_CNOTS)
        }
    };
    for (k, (c, t)) in cnots.iter().enumerate() {
        rho = noisy_cnot(&rho, c, t, prep_f.get(k).copied().unwrap_or(1.0))?;
    }
    noise.apply(rho)
}

fn prep_weights(noise: &NoiseConfig, count: usize) -> Vec<f64> {
    alloc::vec![noise.f; count]
}

/// The five-photon strong-Darwinism state: `H` on the system, a four-photon
/// GHZ resource on the environments, CNOTs from the system onto the first
/// photon of each environment (weight `noise.f`), then the added noise.
pub fn prepare_initial_sqd(noise: &NoiseConfig) -> Result<DensityOperator> {
    noise.validate()?;
    prepare(
        crate::objectivity::Framework::Sqd,
        &prep_weights(noise, SQD_PREP_CNOTS.len()),
        NoiseRealization::Channel(*noise),
    )
}

/// The five-photon GHZ state, grown from the four-photon GHZ resource by a
/// CNOT from the first environment photon onto the system, then the added noise.
pub fn prepare_initial_isbs(noise: &NoiseConfig) -> Result<DensityOperator> {
    noise.validate()?;
    prepare(
        crate::objectivity::Framework::Isbs,
        &prep_weights(noise, ISBS_PREP_CNOTS.len()),
        NoiseRealization::Channel(*noise),
    )
}

