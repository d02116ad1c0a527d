use qdwitness_core::objectivity::{EnvironmentSubspaces, Objectivity, ObjectiveSubspaceSpec};
use qdwitness_core::protocol::{Experiment, FinalUnitary, ReplacementState};
use qdwitness_core::random::haar_unitary;
use qdwitness_core::TensorLayout;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random strong-Darwinism setting on S, a two-photon environment and a
/// one-photon environment, with a Haar unitary before readout.
pub fn random_experiment(rng: &mut ChaCha8Rng, allow_full: bool) -> Experiment {
    let layout = TensorLayout::qubits(&["S", "E1_1", "E1_2", "E2"]).unwrap();
    let v = haar_unitary(4, rng);
    let e1 = EnvironmentSubspaces::from_subspace_bases(
        "E1",
        layout.select(&["E1_1", "E1_2"]).unwrap(),
        &[vec![v.column(0).into(), v.column(1).into()], vec![v.column(2).into(), v.column(3).into()]],
    )
    .unwrap();
    let w = haar_unitary(2, rng);
    let e2 = EnvironmentSubspaces::from_subspace_bases(
        "E2",
        layout.select(&["E2"]).unwrap(),
        &[vec![w.column(0).into()], vec![w.column(1).into()]],
    )
    .unwrap();
    let b = haar_unitary(2, rng);
    let spec = ObjectiveSubspaceSpec::new("S", vec![b.column(0).into(), b.column(1).into()], vec![e1, e2]).unwrap();
    let fragment: &[&str] = match rng.gen_range(0..if allow_full { 3 } else { 2 }) {
        0 => &["E1"],
        1 => &["E2"],
        _ => &["E1", "E2"],
    };
    let unitary = if rng.gen_bool(0.5) {
        FinalUnitary::Global(haar_unitary(16, rng))
    } else {
        FinalUnitary::Local(
            ["S", "E1_1", "E1_2", "E2"]
                .iter()
                .map(|l| (l.to_string(), haar_unitary(2, rng)))
                .collect(),
        )
    };
    let replacement = if rng.gen_bool(0.5) {
        ReplacementState::Zeros
    } else {
        ReplacementState::MaximallyMixed
    };
    Experiment::new(layout, Objectivity::Sqd(spec), fragment, unitary, replacement).unwrap()
}
