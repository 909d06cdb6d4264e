use nalgebra::{DMatrix, DVector};

use crate::cone::EigenSplit;
use crate::polish::polish;
use crate::program::{ConicProgram, ConicSolution, Residuals, SolveStatus, SolverOptions};
use crate::scaling::Scaled;
use crate::svec::{smat, svec, svec_len};
use crate::{ConicSolver, SdpError};

const MU_MIN: f64 = 1e-6;
const MU_MAX: f64 = 1e6;
const MU_FACTOR: f64 = 1.6;
const MU_BALANCE: f64 = 5.0;
const MU_EVERY: usize = 10;
/// Growth of the adaptation interval after each penalty change, which keeps
/// the penalty from cycling.
const MU_SPACING: f64 = 1.3;
/// Relative scaled residual below which polish attempts start.
const POLISH_START: f64 = 1e-3;
/// After a failed polish, the next attempt waits for this residual reduction.
const POLISH_BACKOFF: f64 = 0.3;

/// Alternating-direction augmented Lagrangian method on the dual problem.
///
/// Each iteration solves the normal equations for `y` with a cached
/// pseudo-inverse of `A A'`, projects onto the PSD cone once, and takes an
/// over-relaxed multiplier step. The primal iterate reported is the
/// complementary (exactly PSD) part of the projected matrix.
#[derive(Debug, Default, Clone, Copy)]
pub struct AdmmSolver;

impl ConicSolver for AdmmSolver {
    fn solve(&self, problem: &ConicProgram, opts: &SolverOptions) -> Result<ConicSolution, SdpError> {
        let n = problem.dim();
        let m = problem.num_constraints();
        let sc = Scaled::new(problem, opts.equilibrate);
        // minimization form: min <c_min, X>
        let c_min = -&sc.objective;
        let mut amat = DMatrix::zeros(m, svec_len(n));
        for (k, a) in sc.constraints.iter().enumerate() {
            amat.set_row(k, &svec(a).transpose());
        }
        let amat_t = amat.transpose();
        let aat_pinv = pseudo_inverse(&(&amat * &amat_t));
        let b = &sc.rhs;
        let b_norm = b.norm();
        let c_norm = c_min.norm();
        let objective_scale = problem.objective().norm();

        let mut x = DMatrix::<f64>::zeros(n, n);
        let mut s = DMatrix::<f64>::zeros(n, n);
        let mut mu = opts.penalty;
        let mut last: Option<ConicSolution> = None;
        let mut polish_level = POLISH_START;
        let mut mu_interval = MU_EVERY as f64;
        let mut mu_next = MU_EVERY;

        for it in 1..=opts.max_iters {
            let rhs = (b - &amat * svec(&x)) * mu + &amat * svec(&(&c_min - &s));
            let y = &aat_pinv * rhs;
            let aty = smat(&(&amat_t * &y), n);
            let v = &c_min - &aty - &x * mu;
            let split = EigenSplit::new(v);
            s = split.part(|l| l.max(0.0));
            let x_hat = split.part(|l| (-l).max(0.0) / mu);
            if x_hat.iter().chain(y.iter()).any(|v| !v.is_finite()) {
                return Err(SdpError::NumericalFailure { iteration: it });
            }
            let step = &x_hat - &x;
            let pres = (&amat * svec(&x_hat) - b).norm() / (1.0 + b_norm);
            let dres = mu * step.norm() / (1.0 + c_norm);
            x += step * opts.relaxation;

            if it >= mu_next {
                let old = mu;
                if pres > MU_BALANCE * dres {
                    mu = (mu * MU_FACTOR).min(MU_MAX);
                } else if dres > MU_BALANCE * pres {
                    mu = (mu / MU_FACTOR).max(MU_MIN);
                }
                if mu != old {
                    mu_interval *= MU_SPACING;
                }
                mu_next = it + mu_interval as usize;
            }

            if it % opts.check_every == 0 || it == opts.max_iters {
                // max form multipliers are the negated min form ones
                let y_max = -&y;
                let m_full = sc.unscale_primal(&x_hat);
                let y_full = sc.unscale_dual(&y_max);
                let res = problem.residuals(&m_full, &y_full);
                if res.converged(opts, objective_scale) {
                    return Ok(finish(m_full, y_full, res, SolveStatus::Optimal, it, false));
                }
                if opts.polish && pres.max(dres) < polish_level {
                    if let Some((pm, py, pres_full)) = polish(problem, &sc, &x_hat, &y_max, opts, objective_scale) {
                        return Ok(finish(pm, py, pres_full, SolveStatus::Optimal, it, true));
                    }
                    polish_level = pres.max(dres) * POLISH_BACKOFF;
                }
                last = Some(finish(m_full, y_full, res, SolveStatus::MaxIters, it, false));
            }
        }
        Ok(last.unwrap_or_else(|| {
            let m_full = DMatrix::zeros(n, n);
            let y_full = DVector::zeros(m);
            let res = problem.residuals(&m_full, &y_full);
            finish(m_full, y_full, res, SolveStatus::MaxIters, 0, false)
        }))
    }
}

fn finish(
    m: DMatrix<f64>,
    y: DVector<f64>,
    residuals: Residuals,
    status: SolveStatus,
    iterations: usize,
    polished: bool,
) -> ConicSolution {
    ConicSolution {
        objective: residuals.primal_objective,
        m,
        y,
        residuals,
        status,
        iterations,
        polished,
    }
}

pub(crate) fn pseudo_inverse(a: &DMatrix<f64>) -> DMatrix<f64> {
    if a.is_empty() {
        return a.clone();
    }
    let svd = a.clone().svd(true, true);
    let tol = svd.singular_values.max() * 1e-13 * a.nrows().max(a.ncols()) as f64;
    svd.pseudo_inverse(tol).expect("u and v were computed")
}
