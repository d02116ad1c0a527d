//! Gates and noise processes acting on [`DensityOperator`]s.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // libm math under no_std; std inherent methods win when linked
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    partial_trace, tensor_product, CMatrix, DensityOperator, TensorLayout,
};
use crate::tolerance::Tolerances;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Standard gate matrices.
pub mod gates {
    use super::*;

    pub fn identity(d: usize) -> CMatrix {
        CMatrix::identity(d, d)
    }

    pub fn hadamard() -> CMatrix {
        let s = Complex64::new(1.0 / 2f64.sqrt(), 0.0);
        CMatrix::from_row_slice(2, 2, &[s, s, s, -s])
    }

    pub fn pauli_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    pub fn pauli_y() -> CMatrix {
        let i = Complex64::new(0.0, 1.0);
        CMatrix::from_row_slice(2, 2, &[ZERO, -i, i, ZERO])
    }

    pub fn pauli_z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
    }

    /// CNOT with the first tensor factor as control.
    pub fn cnot() -> CMatrix {
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = ONE;
        m[(1, 1)] = ONE;
        m[(2, 3)] = ONE;
        m[(3, 2)] = ONE;
        m
    }

    /// `{1, X, Y, Z}^{⊗n}` in lexicographic order.
    pub fn pauli_products(n: usize) -> Vec<CMatrix> {
        let singles = [identity(2), pauli_x(), pauli_y(), pauli_z()];
        let mut out = alloc::vec![CMatrix::identity(1, 1)];
        for _ in 0..n {
            out = out
                .iter()
                .flat_map(|m| singles.iter().map(move |s| m.kronecker(s)))
                .collect();
        }
        out
    }
}

/// Max entry of `U†U − 1`.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    let n = u.nrows();
    (u.adjoint() * u - CMatrix::identity(n, n))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

fn target_positions<S: AsRef<str>>(
    layout: &TensorLayout,
    targets: &[S],
    op: &CMatrix,
) -> Result<Vec<usize>> {
    let pos = layout.positions(targets)?;
    let dt: usize = pos.iter().map(|&p| layout.subsystems()[p].dim).product();
    if op.nrows() != dt || op.ncols() != dt {
        return Err(Error::ShapeMismatch {
            rows: op.nrows(),
            cols: op.ncols(),
            expected: dt,
        });
    }
    Ok(pos)
}

/// `U ρ U†` with `unitary` on `targets` (in the order given) and the identity elsewhere.
pub fn apply_gate<S: AsRef<str>>(
    rho: &DensityOperator,
    unitary: &CMatrix,
    targets: &[S],
) -> Result<DensityOperator> {
    let dev = unitarity_deviation(unitary);
    if dev > Tolerances::DEFAULT.unitary {
        return Err(Error::NotUnitary(dev));
    }
    let pos = target_positions(rho.layout(), targets, unitary)?;
    Ok(rho.conjugate_embedded(unitary, &pos))
}

/// Replaces the subsystems `labels` with the maximally mixed state, scaled by
/// the trace so the map stays linear.
fn replace_with_mixed<S: AsRef<str>>(rho: &DensityOperator, labels: &[S]) -> Result<DensityOperator> {
    let layout = rho.layout();
    let replaced = layout.select(labels)?;
    let order: Vec<&str> = layout.labels().collect();
    if replaced.len() == layout.len() {
        return Ok(DensityOperator::maximally_mixed(layout.clone()).scaled(rho.trace()));
    }
    let rest = layout.complement(labels)?;
    let rest_labels: Vec<&str> = rest.labels().collect();
    let kept = partial_trace(rho, &rest_labels)?;
    let joined = tensor_product(&kept, &DensityOperator::maximally_mixed(replaced))?;
    joined.permute(&order)
}

fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidProbability { name, value });
    }
    Ok(())
}

/// Depolarizing CNOT: `f·CNOT(ρ) + (1−f)·1/4` on the two acted qubits, with
/// the rest of the register keeping the ideal-CNOT marginal.
pub fn noisy_cnot(
    rho: &DensityOperator,
    control: &str,
    target: &str,
    f: f64,
) -> Result<DensityOperator> {
    check_probability("f", f)?;
    if control == target {
        return Err(Error::InvalidArgument(format!(
            "CNOT control and target are both `{control}`"
        )));
    }
    for l in [control, target] {
        if rho.layout().dim_of(l)? != 2 {
            return Err(Error::InvalidDimension {
                label: l.into(),
                dim: rho.layout().dim_of(l)?,
            });
        }
    }
    let ideal = apply_gate(rho, &gates::cnot(), &[control, target])?;
    if f == 1.0 {
        return Ok(ideal);
    }
    let mixed = replace_with_mixed(&ideal, &[control, target])?;
    Ok(ideal.combine(f, &mixed, 1.0 - f))
}

/// How the depolarizing CNOT is extended from states to arbitrary operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorExtension {
    /// `X ↦ f·CNOT X CNOT† + (1−f)·1/4`, the map exactly as written for states.
    Affine,
    /// `X ↦ f·CNOT X CNOT† + (1−f)·tr(X)·1/4`, the linear (CPTP) extension.
    Linear,
}

/// The two-qubit depolarizing-CNOT map applied to a 4×4 operator.
pub fn noisy_cnot_operator_map(x: &CMatrix, f: f64, extension: OperatorExtension) -> CMatrix {
    let u = gates::cnot();
    let weight = match extension {
        OperatorExtension::Affine => ONE,
        OperatorExtension::Linear => x.trace(),
    };
    &u * x * u.adjoint() * Complex64::new(f, 0.0)
        + CMatrix::identity(4, 4) * (weight * Complex64::new((1.0 - f) / 4.0, 0.0))
}

/// Closed-form average gate fidelity of the depolarizing CNOT, `(63f + 17)/80`.
pub fn average_gate_fidelity(f: f64) -> f64 {
    (63.0 * f + 17.0) / 80.0
}

/// Average gate fidelity of `map` against the ideal `unitary`, evaluated by
/// the sum over the `n`-qubit Pauli-product unitary basis:
/// `(Σ_j tr[U U_j† U† E(U_j)] + d²) / (d²(d+1))`.
pub fn pauli_basis_average_fidelity<F>(unitary: &CMatrix, qubits: usize, map: F) -> f64
where
    F: Fn(&CMatrix) -> CMatrix,
{
    let d = 1usize << qubits;
    let sum: Complex64 = gates::pauli_products(qubits)
        .iter()
        .map(|uj| (unitary * uj.adjoint() * unitary.adjoint() * map(uj)).trace())
        .fold(ZERO, |a, b| a + b);
    let d = d as f64;
    (sum.re + d * d) / (d * d * (d + 1.0))
}

/// Each target independently mapped to `(1−p)ρ_X + p·1/d_X`.
pub fn depolarize_local<S: AsRef<str>>(
    rho: &DensityOperator,
    p: f64,
    targets: &[S],
) -> Result<DensityOperator> {
    check_probability("p", p)?;
    rho.layout().positions(targets)?;
    let mut out = rho.clone();
    if p == 0.0 {
        return Ok(out);
    }
    for t in targets {
        let mixed = replace_with_mixed(&out, &[t.as_ref()])?;
        out = out.combine(1.0 - p, &mixed, p);
    }
    Ok(out)
}

/// `(1−p)ρ + p·1/N` on the whole register.
pub fn mix_with_noise(rho: &DensityOperator, p: f64) -> Result<DensityOperator> {
    check_probability("p", p)?;
    let mixed = DensityOperator::maximally_mixed(rho.layout().clone());
    Ok(rho.combine(1.0 - p, &mixed, p))
}

/// Discards `discard` and installs the uncorrelated `replacement` there,
/// returning the result in the input's subsystem order.
pub fn point_channel<S: AsRef<str>>(
    rho: &DensityOperator,
    discard: &[S],
    replacement: &DensityOperator,
) -> Result<DensityOperator> {
    if discard.is_empty() {
        return Err(Error::InvalidArgument(
            "point channel needs at least one discarded subsystem".into(),
        ));
    }
    let layout = rho.layout();
    let expected = layout.select(discard)?;
    if replacement.layout() != &expected {
        return Err(Error::LayoutMismatch(format!(
            "replacement layout {:?} does not match discarded subsystems {:?}",
            replacement.layout().labels().collect::<Vec<_>>(),
            expected.labels().collect::<Vec<_>>()
        )));
    }
    let order: Vec<&str> = layout.labels().collect();
    if expected.len() == layout.len() {
        return Ok(replacement.scaled(rho.trace()));
    }
    let keep = layout.complement(discard)?;
    let keep_labels: Vec<&str> = keep.labels().collect();
    let kept = partial_trace(rho, &keep_labels)?;
    tensor_product(&kept, replacement)?.permute(&order)
}

/// Completely positive map given by Kraus operators on a fixed set of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    layout: TensorLayout,
    kraus_ops: Vec<CMatrix>,
    trace_preserving: bool,
}

impl KrausChannel {
    pub fn new(layout: TensorLayout, kraus_ops: Vec<CMatrix>, trace_preserving: bool) -> Result<Self> {
        let d = layout.total_dim();
        let mut sum = CMatrix::zeros(d, d);
        for k in &kraus_ops {
            if k.nrows() != d || k.ncols() != d {
                return Err(Error::ShapeMismatch {
                    rows: k.nrows(),
                    cols: k.ncols(),
                    expected: d,
                });
            }
            sum += k.adjoint() * k;
        }
        let tol = Tolerances::DEFAULT.completeness;
        if trace_preserving {
            let dev = (&sum - CMatrix::identity(d, d))
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            if dev > tol {
                return Err(Error::NotTracePreserving(dev));
            }
        } else {
            let top = crate::hilbert::eigvals_unchecked(&sum)
                .first()
                .copied()
                .unwrap_or(0.0);
            if top > 1.0 + tol {
                return Err(Error::NotTracePreserving(top - 1.0));
            }
        }
        Ok(Self {
            layout,
            kraus_ops,
            trace_preserving,
        })
    }

    pub fn unitary(layout: TensorLayout, u: CMatrix) -> Result<Self> {
        let dev = unitarity_deviation(&u);
        if dev > Tolerances::DEFAULT.unitary {
            return Err(Error::NotUnitary(dev));
        }
        Self::new(layout, alloc::vec![u], true)
    }

    /// Qubit depolarizing channel `(1−p)ρ + p·1/2` in Pauli Kraus form.
    pub fn qubit_depolarizing(label: &str, p: f64) -> Result<Self> {
        check_probability("p", p)?;
        let layout = TensorLayout::qubits(&[label])?;
        let a = Complex64::new((1.0 - 0.75 * p).sqrt(), 0.0);
        let b = Complex64::new((p / 4.0).sqrt(), 0.0);
        Self::new(
            layout,
            alloc::vec![
                gates::identity(2) * a,
                gates::pauli_x() * b,
                gates::pauli_y() * b,
                gates::pauli_z() * b,
            ],
            true,
        )
    }

    /// Two-qubit depolarizing CNOT `f·CNOT(ρ) + (1−f)·tr(ρ)·1/4` in Kraus form.
    pub fn noisy_cnot(control: &str, target: &str, f: f64) -> Result<Self> {
        check_probability("f", f)?;
        let layout = TensorLayout::qubits(&[control, target])?;
        let u = gates::cnot();
        let a = Complex64::new((f + (1.0 - f) / 16.0).sqrt(), 0.0);
        let b = Complex64::new(((1.0 - f) / 16.0).sqrt(), 0.0);
        let mut ops = alloc::vec![&u * a];
        for p in gates::pauli_products(2).into_iter().skip(1) {
            ops.push(p * &u * b);
        }
        Self::new(layout, ops, true)
    }

    pub fn layout(&self) -> &TensorLayout {
        &self.layout
    }

    pub fn kraus_ops(&self) -> &[CMatrix] {
        &self.kraus_ops
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    /// Applies the channel to the subsystems of `rho` carrying this channel's labels.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let labels: Vec<&str> = self.layout.labels().collect();
        let pos = rho.layout().positions(&labels)?;
        for (k, &p) in pos.iter().enumerate() {
            if rho.layout().subsystems()[p].dim != self.layout.subsystems()[k].dim {
                return Err(Error::LayoutMismatch(format!(
                    "subsystem `{}` has a different dimension",
                    labels[k]
                )));
            }
        }
        Ok(rho.sandwich_sum(&self.kraus_ops, &pos))
    }
}

/// How the extra noise on the prepared state is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    /// Mix the whole register with the maximally mixed state.
    MixGlobal,
    /// Depolarize every photon independently.
    DepolarizeLocal,
}

/// Noise strength and gate imperfections of the simulated circuit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub p: f64,
    pub mode: NoiseMode,
    /// CNOT depolarization weight.
    #[serde(default = "NoiseConfig::default_f")]
    pub f: f64,
    /// CNOT success probability.
    #[serde(default = "NoiseConfig::default_p_cnot")]
    pub p_cnot: f64,
}

impl NoiseConfig {
    /// Depolarization weight of the imperfect CNOT used in the photonic simulation.
    pub const PHOTONIC_CNOT_F: f64 = 0.733;

    fn default_f() -> f64 {
        1.0
    }

    fn default_p_cnot() -> f64 {
        1.0
    }

    pub fn ideal(p: f64, mode: NoiseMode) -> Self {
        Self {
            p,
            mode,
            f: 1.0,
            p_cnot: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("p", self.p)?;
        check_probability("f", self.f)?;
        if !(self.p_cnot > 0.0 && self.p_cnot <= 1.0) {
            return Err(Error::InvalidProbability {
                name: "p_cnot",
                value: self.p_cnot,
            });
        }
        Ok(())
    }

    /// Applies the configured noise to every subsystem of `rho`.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        self.validate()?;
        match self.mode {
            NoiseMode::MixGlobal => mix_with_noise(rho, self.p),
            NoiseMode::DepolarizeLocal => {
                let labels: Vec<&str> = rho.layout().labels().collect();
                depolarize_local(rho, self.p, &labels)
            }
        }
    }
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self::ideal(0.0, NoiseMode::MixGlobal)
    }
}
