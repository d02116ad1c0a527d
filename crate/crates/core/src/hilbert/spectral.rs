use alloc::vec::Vec;

use num_complex::Complex64;

use super::CMatrix;
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// Largest absolute entry of `m - m†`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for r in 0..n {
        for c in r..n {
            let d = (m[(r, c)] - m[(c, r)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

/// `(m + m†) / 2`.
pub fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

fn check_square(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::ShapeMismatch {
            rows: m.nrows(),
            cols: m.ncols(),
            expected: m.nrows(),
        });
    }
    Ok(())
}

fn check_hermitian(m: &CMatrix) -> Result<()> {
    check_square(m)?;
    let dev = hermitian_deviation(m);
    if dev > Tolerances::DEFAULT.hermitian {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

/// Eigenvalues of a Hermitian matrix in descending order.
pub fn eigvals_hermitian(h: &CMatrix) -> Result<Vec<f64>> {
    check_hermitian(h)?;
    Ok(eigvals_unchecked(h))
}

/// Eigenvalues without the Hermiticity gate; the input is symmetrized first.
pub(crate) fn eigvals_unchecked(h: &CMatrix) -> Vec<f64> {
    if h.nrows() == 0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = symmetrize(h).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Full eigendecomposition `h = V diag(λ) V†`, eigenvalues descending with
/// eigenvectors as the matching columns of `V`.
pub fn eigh(h: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    check_hermitian(h)?;
    let n = h.nrows();
    let eig = symmetrize(h).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Sum of absolute eigenvalues of the symmetrized argument.
pub fn trace_norm(h: &CMatrix) -> f64 {
    eigvals_unchecked(h).iter().map(|l| l.abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_hermitian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn qubit_examples() {
        let half = CMatrix::identity(2, 2) * Complex64::new(0.5, 0.0);
        assert_eq!(eigvals_hermitian(&half).unwrap(), [0.5, 0.5]);
        let x = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        let ev = eigvals_hermitian(&x).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        assert!(matches!(eigvals_hermitian(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn trace_identity_and_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let h = random_hermitian(8, &mut rng);
            let ev = eigvals_hermitian(&h).unwrap();
            let tr = h.trace().re;
            assert!((ev.iter().sum::<f64>() - tr).abs() < 1e-9);
            assert!(ev.windows(2).all(|w| w[0] >= w[1]));
            let (vals, vecs) = eigh(&h).unwrap();
            let diag = CMatrix::from_fn(8, 8, |r, c| {
                if r == c {
                    Complex64::new(vals[r], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            let back = &vecs * diag * vecs.adjoint();
            let err = (back - &h).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err < 1e-9, "reconstruction error {err}");
        }
    }
}
