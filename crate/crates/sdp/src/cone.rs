use nalgebra::{DMatrix, SymmetricEigen};

use crate::svec::symmetrize;

/// Nearest positive semidefinite matrix in Frobenius norm: eigendecompose and
/// clamp negative eigenvalues to zero. The input is symmetrized first.
pub fn psd_project(s: &DMatrix<f64>) -> DMatrix<f64> {
    let mut sym = s.clone();
    symmetrize(&mut sym);
    let eig = SymmetricEigen::new(sym);
    let clamped = eig.eigenvalues.map(|l| l.max(0.0));
    let mut out = &eig.eigenvectors * DMatrix::from_diagonal(&clamped) * eig.eigenvectors.transpose();
    symmetrize(&mut out);
    out
}

/// Smallest eigenvalue of the symmetric part of `s`.
pub fn min_eigenvalue(s: &DMatrix<f64>) -> f64 {
    if s.nrows() == 0 {
        return 0.0;
    }
    let mut sym = s.clone();
    symmetrize(&mut sym);
    sym.symmetric_eigenvalues().min()
}

/// Splits `v` into its positive and negative parts along a shared
/// eigenbasis: `v = pos - neg`, both PSD and mutually orthogonal.
pub(crate) struct EigenSplit {
    pub eigenvalues: nalgebra::DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl EigenSplit {
    pub fn new(v: DMatrix<f64>) -> Self {
        let eig = SymmetricEigen::new(v);
        Self {
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        }
    }

    /// `sum_k f(l_k) v_k v_k'` for a nonnegative weight function `f`.
    pub fn part(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let n = self.eigenvalues.len();
        let keep: Vec<(usize, f64)> = self
            .eigenvalues
            .iter()
            .enumerate()
            .filter_map(|(k, &l)| {
                let w = f(l);
                (w > 0.0).then_some((k, w.sqrt()))
            })
            .collect();
        if keep.is_empty() {
            return DMatrix::zeros(n, n);
        }
        let mut half = DMatrix::zeros(n, keep.len());
        for (c, &(k, s)) in keep.iter().enumerate() {
            half.set_column(c, &(self.eigenvectors.column(k) * s));
        }
        let mut out = &half * half.transpose();
        symmetrize(&mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamps_negative_eigenvalue() {
        let s = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0]));
        let p = psd_project(&s);
        let expected = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.0]));
        assert!((p - expected).norm() < 1e-14);
    }

    #[test]
    fn psd_input_is_unchanged() {
        let s = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        assert!((psd_project(&s) - &s).norm() < 1e-14);
    }

    #[test]
    fn split_reconstructs() {
        let v = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.5, 2.0, -1.0, 0.3, 0.5, 0.3, 0.2]);
        let split = EigenSplit::new(v.clone());
        let pos = split.part(|l| l.max(0.0));
        let neg = split.part(|l| (-l).max(0.0));
        assert!((&pos - &neg - &v).norm() < 1e-12);
        assert!((&pos * &neg).norm() < 1e-12);
    }
}
