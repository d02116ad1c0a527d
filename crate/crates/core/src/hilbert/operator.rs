use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // libm math under no_std; std inherent methods win when linked
use num_traits::Float;

use super::spectral::{eigvals_unchecked, hermitian_deviation, trace_norm};
use super::{CMatrix, CVector, TensorLayout};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Normalized state vector over a layout.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    layout: TensorLayout,
    amplitudes: CVector,
}

impl PureState {
    pub fn new(layout: TensorLayout, amplitudes: CVector) -> Result<Self> {
        let n = layout.total_dim();
        if amplitudes.len() != n {
            return Err(Error::ShapeMismatch {
                rows: amplitudes.len(),
                cols: 1,
                expected: n,
            });
        }
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > Tolerances::DEFAULT.normalization {
            return Err(Error::NotNormalized(norm2));
        }
        Ok(Self { layout, amplitudes })
    }

    /// Normalizes `amplitudes` before validating.
    pub fn normalized(layout: TensorLayout, mut amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        amplitudes /= Complex64::new(norm, 0.0);
        Self::new(layout, amplitudes)
    }

    pub fn basis(layout: TensorLayout, index: usize) -> Result<Self> {
        let n = layout.total_dim();
        if index >= n {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for dimension {n}"
            )));
        }
        let mut v = CVector::zeros(n);
        v[index] = ONE;
        Ok(Self {
            layout,
            amplitudes: v,
        })
    }

    /// `(|0…0⟩ + |1…1⟩ + … ) / √d` for equal subsystem dimensions `d`.
    pub fn ghz(layout: TensorLayout) -> Result<Self> {
        let dims = layout.dims();
        let d = *dims.first().ok_or_else(|| {
            Error::InvalidArgument("GHZ state needs at least one subsystem".into())
        })?;
        if dims.iter().any(|&x| x != d) {
            return Err(Error::HypothesisUnmet(
                "GHZ state requires equal subsystem dimensions".into(),
            ));
        }
        let strides = layout.strides();
        let step: usize = strides.iter().sum();
        let mut v = CVector::zeros(layout.total_dim());
        let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
        for i in 0..d {
            v[i * step] = amp;
        }
        Self::new(layout, v)
    }

    pub fn layout(&self) -> &TensorLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator::from_parts(
            self.layout.clone(),
            &self.amplitudes * self.amplitudes.adjoint(),
        )
    }
}

/// Hermitian positive semidefinite operator with trace at most one.
/// Objectivity projections may leave the trace below one.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    layout: TensorLayout,
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validating constructor for externally supplied matrices.
    pub fn new(layout: TensorLayout, matrix: CMatrix) -> Result<Self> {
        let rho = Self::from_parts_checked_shape(layout, matrix)?;
        rho.validate(&Tolerances::DEFAULT)?;
        Ok(rho)
    }

    fn from_parts_checked_shape(layout: TensorLayout, matrix: CMatrix) -> Result<Self> {
        let n = layout.total_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::ShapeMismatch {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                expected: n,
            });
        }
        Ok(Self { layout, matrix })
    }

    pub(crate) fn from_parts(layout: TensorLayout, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), layout.total_dim());
        Self { layout, matrix }
    }

    pub fn maximally_mixed(layout: TensorLayout) -> Self {
        let n = layout.total_dim();
        Self::from_parts(
            layout,
            CMatrix::identity(n, n) * Complex64::new(1.0 / n as f64, 0.0),
        )
    }

    pub fn basis(layout: TensorLayout, index: usize) -> Result<Self> {
        Ok(PureState::basis(layout, index)?.to_density())
    }

    /// Checks Hermiticity, positivity and the trace bound.
    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        let dev = hermitian_deviation(&self.matrix);
        if dev > tol.hermitian {
            return Err(Error::NotHermitian(dev));
        }
        let tr = self.trace();
        if !(tr >= -tol.trace && tr <= 1.0 + tol.trace) {
            return Err(Error::InvalidTrace(tr));
        }
        let min = eigvals_unchecked(&self.matrix)
            .last()
            .copied()
            .unwrap_or(0.0);
        if min < -tol.positivity {
            return Err(Error::NotPositive(min));
        }
        Ok(())
    }

    pub fn layout(&self) -> &TensorLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix
            .iter()
            .zip(self.matrix.transpose().iter())
            .map(|(a, b)| (a * b).re)
            .sum()
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvals_unchecked(&self.matrix)
    }

    /// `ρ / tr ρ`, or `None` for a null operator.
    pub fn normalized(&self, floor: f64) -> Option<Self> {
        let tr = self.trace();
        if tr <= floor {
            return None;
        }
        Some(self.scaled(1.0 / tr))
    }

    pub(crate) fn scaled(&self, k: f64) -> Self {
        Self::from_parts(self.layout.clone(), &self.matrix * Complex64::new(k, 0.0))
    }

    /// Convex-style combination `a·self + b·other` on the same layout.
    pub(crate) fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        debug_assert_eq!(self.layout, other.layout);
        Self::from_parts(
            self.layout.clone(),
            &self.matrix * Complex64::new(a, 0.0) + &other.matrix * Complex64::new(b, 0.0),
        )
    }

    /// Reorders subsystems to `order`, which must be a permutation of the labels.
    pub fn permute<S: AsRef<str>>(&self, order: &[S]) -> Result<Self> {
        if order.len() != self.layout.len() {
            return Err(Error::LayoutMismatch(format!(
                "permutation names {} subsystems, layout has {}",
                order.len(),
                self.layout.len()
            )));
        }
        let pos = self.layout.positions(order)?;
        if pos.iter().enumerate().all(|(k, &p)| k == p) {
            return Ok(self.clone());
        }
        let new_layout = TensorLayout::from_subsystems(
            pos.iter()
                .map(|&p| self.layout.subsystems()[p].clone())
                .collect(),
        )?;
        // offsets[j] = old index of new joint index j
        let offsets = self.layout.offsets(&pos);
        let n = self.dim();
        let matrix = CMatrix::from_fn(n, n, |r, c| self.matrix[(offsets[r], offsets[c])]);
        Ok(Self::from_parts(new_layout, matrix))
    }

    /// `U ρ U†` with `op` acting on `targets` (in the given order) and the
    /// identity elsewhere. No unitarity check; callers validate.
    pub(crate) fn conjugate_embedded(&self, op: &CMatrix, targets: &[usize]) -> Self {
        let left = apply_left(&self.matrix, &self.layout, op, targets);
        // (L U†) = (U L†)†
        let right = apply_left(&left.adjoint(), &self.layout, op, targets).adjoint();
        Self::from_parts(self.layout.clone(), right)
    }

    /// `K ρ K†` summed over the given operators, all acting on `targets`.
    pub(crate) fn sandwich_sum(&self, ops: &[CMatrix], targets: &[usize]) -> Self {
        let n = self.dim();
        let mut acc = CMatrix::zeros(n, n);
        for k in ops {
            acc += self.conjugate_embedded(k, targets).matrix;
        }
        Self::from_parts(self.layout.clone(), acc)
    }
}

/// `op` (on the subsystems at `targets`) times `m` from the left.
pub(crate) fn apply_left(
    m: &CMatrix,
    layout: &TensorLayout,
    op: &CMatrix,
    targets: &[usize],
) -> CMatrix {
    let rest: Vec<usize> = (0..layout.len()).filter(|k| !targets.contains(k)).collect();
    let t_off = layout.offsets(targets);
    let r_off = layout.offsets(&rest);
    let dt = t_off.len();
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, m.ncols());
    for &ro in &r_off {
        for i in 0..dt {
            let row = ro + t_off[i];
            for j in 0..dt {
                let a = op[(i, j)];
                if a == ZERO {
                    continue;
                }
                let src = ro + t_off[j];
                for c in 0..m.ncols() {
                    out[(row, c)] += a * m[(src, c)];
                }
            }
        }
    }
    out
}

/// Full-size matrix of `op` acting on `targets` and the identity elsewhere.
pub fn embed_operator<S: AsRef<str>>(
    layout: &TensorLayout,
    op: &CMatrix,
    targets: &[S],
) -> Result<CMatrix> {
    let pos = layout.positions(targets)?;
    let dt: usize = pos.iter().map(|&p| layout.subsystems()[p].dim).product();
    if op.nrows() != dt || op.ncols() != dt {
        return Err(Error::ShapeMismatch {
            rows: op.nrows(),
            cols: op.ncols(),
            expected: dt,
        });
    }
    let n = layout.total_dim();
    Ok(apply_left(&CMatrix::identity(n, n), layout, op, &pos))
}

/// Kronecker product of two operators on disjoint layouts.
pub fn tensor_product(a: &DensityOperator, b: &DensityOperator) -> Result<DensityOperator> {
    let layout = a.layout.concat(&b.layout)?;
    Ok(DensityOperator::from_parts(layout, a.matrix.kronecker(&b.matrix)))
}

/// Traces out everything except `keep`; the result keeps the input's subsystem order.
pub fn partial_trace<S: AsRef<str>>(rho: &DensityOperator, keep: &[S]) -> Result<DensityOperator> {
    if keep.is_empty() {
        return Err(Error::InvalidArgument(
            "partial trace must keep at least one subsystem".into(),
        ));
    }
    let mut kept = rho.layout.positions(keep)?;
    kept.sort_unstable();
    let traced: Vec<usize> = (0..rho.layout.len())
        .filter(|k| !kept.contains(k))
        .collect();
    let new_layout = TensorLayout::from_subsystems(
        kept.iter()
            .map(|&p| rho.layout.subsystems()[p].clone())
            .collect(),
    )?;
    if traced.is_empty() {
        return Ok(rho.clone());
    }
    let k_off = rho.layout.offsets(&kept);
    let t_off = rho.layout.offsets(&traced);
    let m = k_off.len();
    let matrix = CMatrix::from_fn(m, m, |r, c| {
        let (kr, kc) = (k_off[r], k_off[c]);
        t_off
            .iter()
            .map(|&t| rho.matrix[(kr + t, kc + t)])
            .fold(ZERO, |acc, z| acc + z)
    });
    Ok(DensityOperator::from_parts(new_layout, matrix))
}

/// Trace-norm distance `‖a − b‖₁`.
pub fn trace_norm_distance(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    if a.layout != b.layout {
        return Err(Error::LayoutMismatch(
            "trace-norm distance needs identical layouts".into(),
        ));
    }
    // Orient the difference canonically so the result is exactly symmetric.
    let swap = a
        .matrix
        .iter()
        .zip(b.matrix.iter())
        .find(|(x, y)| x != y)
        .is_some_and(|(x, y)| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)).is_lt());
    let diff = if swap {
        &b.matrix - &a.matrix
    } else {
        &a.matrix - &b.matrix
    };
    Ok(trace_norm(&diff))
}

/// `p_k = tr[E_k ρ]` for each effect, clamped into `[0, 1]`.
/// Effects must be positive semidefinite; completeness is not required.
pub fn born_probabilities(rho: &DensityOperator, effects: &[CMatrix]) -> Result<Vec<f64>> {
    let tol = Tolerances::DEFAULT;
    let n = rho.dim();
    let mut out = Vec::with_capacity(effects.len());
    for e in effects {
        if e.nrows() != n || e.ncols() != n {
            return Err(Error::ShapeMismatch {
                rows: e.nrows(),
                cols: e.ncols(),
                expected: n,
            });
        }
        let dev = hermitian_deviation(e);
        if dev > tol.hermitian {
            return Err(Error::NotHermitian(dev));
        }
        let min = eigvals_unchecked(e).last().copied().unwrap_or(0.0);
        if min < -tol.positivity {
            return Err(Error::NotPositive(min));
        }
        let p = (e * &rho.matrix).trace().re;
        out.push(p.clamp(0.0, 1.0));
    }
    Ok(out)
}

/// Checks that `effects` resolve the identity within the completeness tolerance.
pub fn is_complete_povm(effects: &[CMatrix], dim: usize) -> bool {
    let mut sum = CMatrix::zeros(dim, dim);
    for e in effects {
        if e.nrows() != dim {
            return false;
        }
        sum += e;
    }
    let dev = (sum - CMatrix::identity(dim, dim))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    dev <= Tolerances::DEFAULT.completeness
}

/// Computational-basis outcome probabilities (the diagonal), clamped at zero.
pub fn computational_probabilities(rho: &DensityOperator) -> Vec<f64> {
    (0..rho.dim())
        .map(|k| rho.matrix[(k, k)].re.max(0.0))
        .collect()
}
