//! One protocol setting: point channel on the rest of the environment,
//! optional objectivity operation, final unitary and computational readout.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::{apply_gate, gates, noisy_cnot, point_channel, unitarity_deviation};
use crate::error::{Error, Result};
use crate::hilbert::{
    computational_probabilities, partial_trace, tensor_product, CMatrix, DensityOperator,
    TensorLayout,
};
use crate::objectivity::{nonobjectivity_measure, EnvironmentSubspaces, Objectivity};
use crate::tolerance::Tolerances;

/// Uncorrelated state installed on the environments outside the fragment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplacementState {
    /// `|0⋯0⟩`.
    #[default]
    Zeros,
    MaximallyMixed,
}

/// Evolution applied before the final computational-basis measurement.
#[derive(Debug, Clone, PartialEq)]
pub enum FinalUnitary {
    /// Single-subsystem gates, applied in order.
    Local(Vec<(String, CMatrix)>),
    /// One unitary on the whole register, in layout order.
    Global(CMatrix),
}

impl FinalUnitary {
    /// Hadamards on the listed subsystems.
    pub fn hadamards<S: AsRef<str>>(labels: &[S]) -> Self {
        FinalUnitary::Local(
            labels
                .iter()
                .map(|l| (l.as_ref().to_string(), gates::hadamard()))
                .collect(),
        )
    }
}

/// The objectivity operation as actually run in a branch.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Gamma<'a> {
    Skip,
    Ideal,
    /// Ancilla-based parity checks with one CNOT weight per gate, two per fragment environment.
    NoisyParity(&'a [f64]),
}

/// A fully specified witness experiment on a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    layout: TensorLayout,
    objectivity: Objectivity,
    fragment: Vec<String>,
    sf_labels: Vec<String>,
    rest_labels: Vec<String>,
    unitary: FinalUnitary,
    replacement: Option<DensityOperator>,
    sf_index: Vec<usize>,
}

impl Experiment {
    pub fn new<S: AsRef<str>>(
        layout: TensorLayout,
        objectivity: Objectivity,
        fragment: &[S],
        unitary: FinalUnitary,
        replacement: ReplacementState,
    ) -> Result<Self> {
        if fragment.is_empty() {
            return Err(Error::InvalidArgument("fragment is empty".into()));
        }
        for (k, f) in fragment.iter().enumerate() {
            if fragment[..k].iter().any(|g| g.as_ref() == f.as_ref()) {
                return Err(Error::InvalidArgument(format!(
                    "environment `{}` repeated in fragment",
                    f.as_ref()
                )));
            }
        }
        let present = objectivity.environments_in(&layout)?;
        if let Some(f) = fragment.iter().find(|f| !present.iter().any(|e| e == f.as_ref())) {
            return Err(Error::UnknownEnvironment(f.as_ref().to_string()));
        }
        let fragment: Vec<String> = present
            .iter()
            .filter(|e| fragment.iter().any(|f| f.as_ref() == e.as_str()))
            .cloned()
            .collect();
        let frag_labels = objectivity.labels_of(&fragment)?;
        let sys = objectivity.system();
        let sf_labels: Vec<String> = layout
            .labels()
            .filter(|l| *l == sys || frag_labels.iter().any(|f| f == l))
            .map(String::from)
            .collect();
        let rest_labels: Vec<String> = layout
            .labels()
            .filter(|l| !sf_labels.iter().any(|s| s == l))
            .map(String::from)
            .collect();
        let replacement = if rest_labels.is_empty() {
            None
        } else {
            let rest = layout.select(&rest_labels)?;
            Some(match replacement {
                ReplacementState::Zeros => DensityOperator::basis(rest, 0)?,
                ReplacementState::MaximallyMixed => DensityOperator::maximally_mixed(rest),
            })
        };
        match &unitary {
            FinalUnitary::Local(gates) => {
                for (label, u) in gates {
                    let d = layout.dim_of(label)?;
                    if u.nrows() != d || u.ncols() != d {
                        return Err(Error::ShapeMismatch {
                            rows: u.nrows(),
                            cols: u.ncols(),
                            expected: d,
                        });
                    }
                }
            }
            FinalUnitary::Global(u) => {
                let n = layout.total_dim();
                if u.nrows() != n || u.ncols() != n {
                    return Err(Error::ShapeMismatch {
                        rows: u.nrows(),
                        cols: u.ncols(),
                        expected: n,
                    });
                }
                let dev = unitarity_deviation(u);
                if dev > Tolerances::DEFAULT.unitary {
                    return Err(Error::NotUnitary(dev));
                }
            }
        }
        let sf_pos = layout.positions(&sf_labels)?;
        let sf_layout = layout.select(&sf_labels)?;
        let sf_strides = sf_layout.strides();
        let sf_index = (0..layout.total_dim())
            .map(|idx| {
                let digits = layout.digits(idx);
                sf_pos
                    .iter()
                    .zip(&sf_strides)
                    .map(|(&p, &s)| digits[p] * s)
                    .sum()
            })
            .collect();
        Ok(Self {
            layout,
            objectivity,
            fragment,
            sf_labels,
            rest_labels,
            unitary,
            replacement,
            sf_index,
        })
    }

    pub fn layout(&self) -> &TensorLayout {
        &self.layout
    }

    pub fn objectivity(&self) -> &Objectivity {
        &self.objectivity
    }

    /// Fragment environments in canonical order.
    pub fn fragment(&self) -> &[String] {
        &self.fragment
    }

    /// System and fragment subsystems, in layout order.
    pub fn sf_labels(&self) -> &[String] {
        &self.sf_labels
    }

    pub fn sf_dim(&self) -> usize {
        self.sf_index.iter().copied().max().map_or(0, |m| m + 1)
    }

    /// Bit-string labels of the marginal outcomes on `S ∪ F`.
    pub fn outcome_labels(&self) -> Vec<String> {
        let sf = self.layout.select(&self.sf_labels).expect("labels come from the layout");
        (0..sf.total_dim()).map(|i| sf.outcome_label(i)).collect()
    }

    /// Outcome probabilities over the whole register in the computational
    /// basis. With `apply_gamma` the vector sums to the trace of the projected state.
    pub fn run_branch(&self, rho_t: &DensityOperator, apply_gamma: bool) -> Result<Vec<f64>> {
        self.run_branch_with(rho_t, if apply_gamma { Gamma::Ideal } else { Gamma::Skip })
    }

    pub(crate) fn run_branch_with(&self, rho_t: &DensityOperator, gamma: Gamma<'_>) -> Result<Vec<f64>> {
        if rho_t.layout() != &self.layout {
            return Err(Error::LayoutMismatch(
                "state layout differs from the experiment register".into(),
            ));
        }
        let mut rho = match &self.replacement {
            Some(r) => point_channel(rho_t, &self.rest_labels, r)?,
            None => rho_t.clone(),
        };
        rho = match gamma {
            Gamma::Skip => rho,
            Gamma::Ideal => self.objectivity.apply(&rho, &self.fragment)?,
            Gamma::NoisyParity(weights) => self.noisy_parity(&rho, weights)?,
        };
        rho = match &self.unitary {
            FinalUnitary::Local(gates) => {
                for (label, u) in gates {
                    rho = apply_gate(&rho, u, &[label])?;
                }
                rho
            }
            FinalUnitary::Global(u) => {
                let labels: Vec<&str> = self.layout.labels().collect();
                apply_gate(&rho, u, &labels)?
            }
        };
        Ok(computational_probabilities(&rho))
    }

    /// Sums a register-wide outcome vector down to `S ∪ F`.
    pub fn marginalize(&self, probabilities: &[f64]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.sf_dim()];
        for (p, &k) in probabilities.iter().zip(&self.sf_index) {
            out[k] += p;
        }
        out
    }

    /// Non-objectivity measure of the reduced state on `S ∪ F`.
    pub fn measure(&self, rho_t: &DensityOperator) -> Result<f64> {
        nonobjectivity_measure(&partial_trace(rho_t, &self.sf_labels)?, &self.objectivity)
    }

    /// Number of CNOTs in the parity checks (two per fragment environment).
    pub(crate) fn parity_cnots(&self) -> usize {
        match self.objectivity {
            Objectivity::Sqd(_) => 2 * self.fragment.len(),
            Objectivity::Isbs(_) => 0,
        }
    }

    /// Checks that every fragment environment is a two-photon parity partition,
    /// the only case an ancilla parity check implements.
    pub(crate) fn check_parity_implementable(&self) -> Result<()> {
        let Objectivity::Sqd(spec) = &self.objectivity else {
            return Err(Error::Unsupported(
                "parity checks only apply to the strong Darwinism framework".into(),
            ));
        };
        for env in spec.fragment_environments(&self.fragment)? {
            let labels: Vec<&str> = env.labels().collect();
            let reference = match labels.as_slice() {
                [a, b] => EnvironmentSubspaces::parity(env.name(), a, b).ok(),
                _ => None,
            };
            if reference.as_ref().map(|r| r.projectors()) != Some(env.projectors()) {
                return Err(Error::Unsupported(format!(
                    "environment `{}` is not a two-photon parity partition",
                    env.name()
                )));
            }
        }
        Ok(())
    }

    /// System measurement plus, per fragment environment, an ancilla that
    /// collects the parity through two (possibly depolarizing) CNOTs and is
    /// then required to match the system outcome.
    fn noisy_parity(&self, rho: &DensityOperator, weights: &[f64]) -> Result<DensityOperator> {
        self.check_parity_implementable()?;
        let Objectivity::Sqd(spec) = &self.objectivity else {
            unreachable!("checked above")
        };
        let envs = spec.fragment_environments(&self.fragment)?;
        if weights.len() != 2 * envs.len() {
            return Err(Error::InvalidArgument(format!(
                "{} CNOT weights for {} parity checks",
                weights.len(),
                envs.len()
            )));
        }
        let order: Vec<&str> = self.layout.labels().collect();
        let s_pos = self.layout.position(spec.system())?;
        let n = rho.dim();
        let mut total = DensityOperator::from_parts(self.layout.clone(), CMatrix::zeros(n, n));
        for (i, ket) in spec.system_basis().iter().enumerate() {
            let mut sigma = rho.conjugate_embedded(&(ket * ket.adjoint()), &[s_pos]);
            for (k, env) in envs.iter().enumerate() {
                let anc = format!("{}_parity_ancilla", env.name());
                if self.layout.contains(&anc) {
                    return Err(Error::DuplicateLabel(anc));
                }
                let a = DensityOperator::basis(TensorLayout::qubits(&[anc.as_str()])?, 0)?;
                sigma = tensor_product(&sigma, &a)?;
                let photons: Vec<&str> = env.labels().collect();
                sigma = noisy_cnot(&sigma, photons[0], &anc, weights[2 * k])?;
                sigma = noisy_cnot(&sigma, photons[1], &anc, weights[2 * k + 1])?;
                let mut outcome = CMatrix::zeros(2, 2);
                outcome[(i, i)] = Complex64::new(1.0, 0.0);
                let a_pos = sigma.layout().position(&anc)?;
                sigma = partial_trace(&sigma.conjugate_embedded(&outcome, &[a_pos]), &order)?;
            }
            total = total.combine(1.0, &sigma, 1.0);
        }
        Ok(total)
    }
}
