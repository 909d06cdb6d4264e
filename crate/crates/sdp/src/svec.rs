use nalgebra::{DMatrix, DVector};

const SQRT2: f64 = std::f64::consts::SQRT_2;

pub(crate) fn svec_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Packs the upper triangle column by column, off-diagonals scaled by sqrt(2),
/// so that `svec(A) . svec(B) = <A, B>` for symmetric A, B.
pub(crate) fn svec(m: &DMatrix<f64>) -> DVector<f64> {
    let n = m.nrows();
    let mut out = DVector::zeros(svec_len(n));
    let mut idx = 0;
    for j in 0..n {
        for i in 0..=j {
            out[idx] = if i == j {
                m[(i, i)]
            } else {
                SQRT2 * 0.5 * (m[(i, j)] + m[(j, i)])
            };
            idx += 1;
        }
    }
    out
}

pub(crate) fn smat(v: &DVector<f64>, n: usize) -> DMatrix<f64> {
    debug_assert_eq!(v.len(), svec_len(n));
    let mut out = DMatrix::zeros(n, n);
    let mut idx = 0;
    for j in 0..n {
        for i in 0..=j {
            if i == j {
                out[(i, i)] = v[idx];
            } else {
                let x = v[idx] / SQRT2;
                out[(i, j)] = x;
                out[(j, i)] = x;
            }
            idx += 1;
        }
    }
    out
}

/// Frobenius inner product.
pub(crate) fn inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

pub(crate) fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for j in 0..n {
        for i in 0..j {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svec_preserves_inner_product() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 5.0, 3.0, 5.0, 6.0]);
        let b = DMatrix::from_row_slice(3, 3, &[0.5, -1.0, 0.0, -1.0, 2.0, 1.5, 0.0, 1.5, -3.0]);
        let lhs = svec(&a).dot(&svec(&b));
        assert!((lhs - inner(&a, &b)).abs() < 1e-12);
        assert_eq!(smat(&svec(&a), 3), a);
    }
}
