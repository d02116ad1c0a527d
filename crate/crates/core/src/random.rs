//! Random ensembles used by property tests and the sampling engine.

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // libm math under no_std; std inherent methods win when linked
use num_traits::Float;
use rand::Rng;

use crate::hilbert::{CMatrix, CVector, DensityOperator, PureState, TensorLayout};

/// Standard normal deviate (Box–Muller).
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(gaussian(rng), gaussian(rng)) * Complex64::new(0.5f64.sqrt(), 0.0)
}

/// Ginibre matrix with i.i.d. standard complex normal entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-random unitary via Gram–Schmidt on a Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let mut q = ginibre(n, n, rng);
    for c in 0..n {
        for prev in 0..c {
            let proj = q.column(prev).dotc(&q.column(c));
            let prev_col = q.column(prev).clone_owned();
            let mut col = q.column_mut(c);
            col -= prev_col * proj;
        }
        let norm = q.column(c).norm();
        let mut col = q.column_mut(c);
        col /= Complex64::new(norm, 0.0);
    }
    q
}

/// Random Hermitian matrix `(G + G†)/2`.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(n, n, rng);
    (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Haar-random pure state.
pub fn random_pure<R: Rng + ?Sized>(layout: &TensorLayout, rng: &mut R) -> PureState {
    let n = layout.total_dim();
    let v = CVector::from_fn(n, |_, _| complex_gaussian(rng));
    PureState::normalized(layout.clone(), v).expect("nonzero Gaussian vector")
}

/// Hilbert–Schmidt random mixed state of full rank.
pub fn random_density<R: Rng + ?Sized>(layout: &TensorLayout, rng: &mut R) -> DensityOperator {
    random_density_rank(layout, layout.total_dim(), rng)
}

/// Random mixed state of rank at most `rank`.
pub fn random_density_rank<R: Rng + ?Sized>(
    layout: &TensorLayout,
    rank: usize,
    rng: &mut R,
) -> DensityOperator {
    let n = layout.total_dim();
    let g = ginibre(n, rank.max(1), rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityOperator::from_parts(layout.clone(), m * Complex64::new(1.0 / tr, 0.0))
}

/// Random probability vector of length `n` (flat Dirichlet).
pub fn random_simplex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> alloc::vec::Vec<f64> {
    let mut v: alloc::vec::Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}
