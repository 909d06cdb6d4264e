use nalgebra::{DMatrix, DVector};

use crate::cone::EigenSplit;
use crate::svec::inner;
use crate::SdpError;

const SYMMETRY_TOL: f64 = 1e-14;

/// A real symmetric SDP in maximization form.
#[derive(Debug, Clone)]
pub struct ConicProgram {
    dim: usize,
    objective: DMatrix<f64>,
    constraints: Vec<DMatrix<f64>>,
    rhs: DVector<f64>,
}

impl ConicProgram {
    /// Validates dimensions, finiteness and symmetry (relative asymmetry
    /// `<= 1e-14`) of all data. Matrices are stored exactly symmetrized.
    pub fn new(
        dim: usize,
        objective: DMatrix<f64>,
        constraints: Vec<(DMatrix<f64>, f64)>,
    ) -> Result<Self, SdpError> {
        if objective.shape() != (dim, dim) {
            return Err(SdpError::ObjectiveDimension {
                dim,
                rows: objective.nrows(),
                cols: objective.ncols(),
            });
        }
        let objective = checked_symmetric(objective, "C".to_string())?;
        let mut mats = Vec::with_capacity(constraints.len());
        let mut rhs = DVector::zeros(constraints.len());
        for (k, (a, b)) in constraints.into_iter().enumerate() {
            if a.shape() != (dim, dim) {
                return Err(SdpError::ConstraintDimension {
                    index: k,
                    dim,
                    rows: a.nrows(),
                    cols: a.ncols(),
                });
            }
            if !b.is_finite() {
                return Err(SdpError::NonFiniteData {
                    which: format!("b[{k}]"),
                });
            }
            mats.push(checked_symmetric(a, format!("A[{k}]"))?);
            rhs[k] = b;
        }
        Ok(Self {
            dim,
            objective,
            constraints: mats,
            rhs,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn objective(&self) -> &DMatrix<f64> {
        &self.objective
    }

    pub fn constraints(&self) -> &[DMatrix<f64>] {
        &self.constraints
    }

    pub fn rhs(&self) -> &DVector<f64> {
        &self.rhs
    }

    /// `sum_k y_k A_k - C`, the dual slack for multipliers `y`.
    pub fn dual_slack(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let mut s = -&self.objective;
        for (a, &yk) in self.constraints.iter().zip(y.iter()) {
            s += a * yk;
        }
        s
    }

    /// Evaluates every convergence metric for a candidate primal-dual pair.
    pub fn residuals(&self, m: &DMatrix<f64>, y: &DVector<f64>) -> Residuals {
        let primal = self
            .constraints
            .iter()
            .zip(self.rhs.iter())
            .map(|(a, b)| (inner(a, m) - b).abs())
            .fold(0.0, f64::max);
        let slack = EigenSplit::new(self.dual_slack(y));
        let dual = slack
            .eigenvalues
            .iter()
            .map(|l| l.min(0.0).powi(2))
            .sum::<f64>()
            .sqrt();
        let primal_objective = inner(&self.objective, m);
        let dual_objective = self.rhs.dot(y);
        let min_eig = crate::cone::min_eigenvalue(m);
        Residuals {
            primal,
            dual,
            gap: (primal_objective - dual_objective).abs(),
            min_eigenvalue: min_eig,
            primal_objective,
            dual_objective,
        }
    }
}

fn checked_symmetric(mut a: DMatrix<f64>, which: String) -> Result<DMatrix<f64>, SdpError> {
    if a.iter().any(|x| !x.is_finite()) {
        return Err(SdpError::NonFiniteData { which });
    }
    let scale = a.amax().max(1.0);
    let asym = (&a - a.transpose()).amax();
    if asym > SYMMETRY_TOL * scale {
        return Err(SdpError::NotSymmetric {
            which,
            asymmetry: asym,
        });
    }
    crate::svec::symmetrize(&mut a);
    Ok(a)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub eps_abs: f64,
    pub eps_rel: f64,
    pub max_iters: usize,
    /// Initial augmented-Lagrangian penalty.
    pub penalty: f64,
    /// Over-relaxation of the multiplier step, in (0, 1.618).
    pub relaxation: f64,
    pub equilibrate: bool,
    pub polish: bool,
    /// Iterations between full (unscaled) convergence checks.
    pub check_every: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            eps_abs: 1e-8,
            eps_rel: 1e-7,
            max_iters: 50_000,
            penalty: 1.0,
            relaxation: 1.5,
            equilibrate: true,
            polish: true,
            check_every: 25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    /// `max_k |<A_k, M> - b_k|`.
    pub primal: f64,
    /// Frobenius norm of the negative part of `sum_k y_k A_k - C`.
    pub dual: f64,
    /// `|<C, M> - b'y|`.
    pub gap: f64,
    pub min_eigenvalue: f64,
    pub primal_objective: f64,
    pub dual_objective: f64,
}

impl Residuals {
    pub fn converged(&self, opts: &SolverOptions, objective_scale: f64) -> bool {
        self.primal <= opts.eps_abs
            && self.dual <= opts.eps_abs + opts.eps_rel * objective_scale
            && self.gap <= opts.eps_abs + opts.eps_rel * self.primal_objective.abs()
            && self.min_eigenvalue >= -opts.eps_abs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    MaxIters,
    NumericalFailure,
}

#[derive(Debug, Clone)]
pub struct ConicSolution {
    pub m: DMatrix<f64>,
    pub objective: f64,
    pub y: DVector<f64>,
    pub residuals: Residuals,
    pub status: SolveStatus,
    pub iterations: usize,
    pub polished: bool,
}
