use nalgebra::{DMatrix, DVector};

use crate::program::ConicProgram;

const RUIZ_PASSES: usize = 12;

/// Problem data after diagonal congruence scaling `M = D Mhat D`, per-row
/// constraint normalization and objective normalization:
///
/// `Ahat_k = D A_k D / r_k`, `bhat_k = b_k / r_k`, `Chat = D C D / sigma`.
pub(crate) struct Scaled {
    pub d: DVector<f64>,
    pub row: DVector<f64>,
    pub sigma: f64,
    pub objective: DMatrix<f64>,
    pub constraints: Vec<DMatrix<f64>>,
    pub rhs: DVector<f64>,
}

impl Scaled {
    pub fn new(problem: &ConicProgram, equilibrate: bool) -> Self {
        let n = problem.dim();
        let mut d = DVector::from_element(n, 1.0);
        let mut mats: Vec<DMatrix<f64>> = problem.constraints().to_vec();
        if equilibrate && !mats.is_empty() {
            for _ in 0..RUIZ_PASSES {
                let mut amax = DVector::zeros(n);
                for a in &mats {
                    for i in 0..n {
                        let r = a.row(i).amax();
                        if r > amax[i] {
                            amax[i] = r;
                        }
                    }
                }
                let step = amax.map(|r: f64| if r > 0.0 { 1.0 / r.sqrt() } else { 1.0 });
                for a in mats.iter_mut() {
                    congruence(a, &step);
                }
                d.component_mul_assign(&step);
            }
        }
        let mut row = DVector::from_element(mats.len(), 1.0);
        let mut rhs = problem.rhs().clone();
        if equilibrate {
            for (k, a) in mats.iter_mut().enumerate() {
                let nrm = a.norm();
                if nrm > 0.0 {
                    *a /= nrm;
                    rhs[k] /= nrm;
                    row[k] = nrm;
                }
            }
        }
        let mut objective = problem.objective().clone();
        congruence(&mut objective, &d);
        let sigma = if equilibrate {
            objective.norm().max(1e-300)
        } else {
            1.0
        };
        objective /= sigma;
        Self {
            d,
            row,
            sigma,
            objective,
            constraints: mats,
            rhs,
        }
    }

    /// Maps a scaled primal matrix back: `M = D Mhat D`.
    pub fn unscale_primal(&self, mhat: &DMatrix<f64>) -> DMatrix<f64> {
        let mut m = mhat.clone();
        congruence(&mut m, &self.d);
        m
    }

    /// `y_k = sigma * yhat_k / r_k`.
    pub fn unscale_dual(&self, yhat: &DVector<f64>) -> DVector<f64> {
        yhat.zip_map(&self.row, |y, r| self.sigma * y / r)
    }
}

fn congruence(a: &mut DMatrix<f64>, d: &DVector<f64>) {
    let n = a.nrows();
    for j in 0..n {
        for i in 0..n {
            a[(i, j)] *= d[i] * d[j];
        }
    }
}
