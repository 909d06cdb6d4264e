use nalgebra::linalg::LU;
use nalgebra::{DMatrix, Dyn, SymmetricEigen};

use crate::{CMatrix, CVector, C64};

/// Dense LU factorization together with the exact 1-norm condition number.
pub(crate) struct Factored {
    pub lu: LU<C64, Dyn, Dyn>,
    pub inverse: CMatrix,
    pub condition: f64,
}

impl Factored {
    /// Factorizes `a`; `None` if it is singular or its condition number
    /// exceeds `cap`. The condition number is returned in the error slot.
    pub fn new(a: CMatrix, cap: f64) -> Result<Self, f64> {
        let norm = norm1(&a);
        let lu = a.lu();
        let Some(inverse) = lu.try_inverse() else {
            return Err(f64::INFINITY);
        };
        let condition = norm * norm1(&inverse);
        if !condition.is_finite() || condition > cap {
            return Err(condition);
        }
        Ok(Self { lu, inverse, condition })
    }

    pub fn solve(&self, rhs: &CVector) -> CVector {
        self.lu.solve(rhs).expect("factorization is invertible")
    }
}

/// Maximum absolute column sum.
pub(crate) fn norm1(a: &CMatrix) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub(crate) fn spectral_norm(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.singular_values().max()
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub(crate) fn hermitian_eigen(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let mut h = a.clone();
    hermitize(&mut h);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = eig.eigenvectors.select_columns(&order);
    (values, vectors)
}

/// `(a + a^H) / 2` in place.
pub(crate) fn hermitize(a: &mut CMatrix) {
    let n = a.nrows();
    for j in 0..n {
        a[(j, j)].im = 0.0;
        for i in 0..j {
            let v = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = v;
            a[(j, i)] = v.conj();
        }
    }
}

/// Real symmetric embedding `[[Re H, -Im H], [Im H, Re H]]`.
pub(crate) fn real_embedding(h: &CMatrix) -> DMatrix<f64> {
    let n = h.nrows();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        for i in 0..n {
            let z = h[(i, j)];
            out[(i, j)] = z.re;
            out[(i + n, j + n)] = z.re;
            out[(i + n, j)] = z.im;
            out[(i, j + n)] = -z.im;
        }
    }
    out
}

/// Inverse of [`real_embedding`] for matrices that are only approximately of
/// embedded form: averages the two copies of each block.
pub(crate) fn real_unembedding(y: &DMatrix<f64>) -> CMatrix {
    let n = y.nrows() / 2;
    CMatrix::from_fn(n, n, |i, j| {
        let re = 0.5 * (y[(i, j)] + y[(i + n, j + n)]);
        let im = 0.5 * (y[(i + n, j)] - y[(i, j + n)]);
        C64::new(re, im)
    })
}

/// Unitary matrix whose first column is `u / |u|`, built from a single complex
/// Householder reflection with a phase correction.
pub(crate) fn unitary_completion(u: &CVector) -> CMatrix {
    let n = u.len();
    let unit = u / C64::from(u.norm());
    let theta = if unit[0].norm() > 0.0 { unit[0].arg() } else { 0.0 };
    let phase = C64::from_polar(1.0, theta);
    let mut w = unit.clone();
    w[0] += phase;
    let ww = w.norm_squared();
    let mut h = CMatrix::identity(n, n);
    if ww > 0.0 {
        h -= &w * w.adjoint() * C64::from(2.0 / ww);
    }
    // H unit = -phase e1, so H e1 = -conj(phase) unit; rescale column 0
    let mut col = h.column_mut(0);
    col *= -phase;
    h
}
