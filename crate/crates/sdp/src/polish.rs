use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::program::{ConicProgram, Residuals, SolverOptions};
use crate::scaling::Scaled;

const RANK_THRESHOLDS: [f64; 4] = [1e-2, 1e-4, 1e-6, 1e-8];
const NEWTON_STEPS: usize = 40;
/// A rank guess is abandoned once a step reduces the residual by less than this factor.
const MIN_CONTRACTION: f64 = 0.99;
/// Restricted systems with more unknowns than this are not attempted.
const MAX_UNKNOWNS: usize = 2500;
const STEP_CUTOFF: f64 = 1e-8;
const MIN_STEP: f64 = 1.0 / 64.0;
const NORMAL_DAMPING: f64 = 1e-12;
/// Normal-equation steps contracting less than this fall back to the SVD.
const FAST_CONTRACTION: f64 = 0.5;

/// Refines an approximate solution on the detected active eigenspace. With
/// `M = V V'` (`V` of the detected rank) and dual slack
/// `S(y) = sum_k y_k A_k - C`, Gauss-Newton drives the restricted KKT system
/// `<A_k, V V'> = b_k`, `S(y) V = 0` to zero. The refined pair is accepted
/// only if it passes the full convergence test.
pub(crate) fn polish(
    problem: &ConicProgram,
    sc: &Scaled,
    x_hat: &DMatrix<f64>,
    y_hat: &DVector<f64>,
    opts: &SolverOptions,
    objective_scale: f64,
) -> Option<(DMatrix<f64>, DVector<f64>, Residuals)> {
    let n = x_hat.nrows();
    let eig = SymmetricEigen::new(x_hat.clone());
    let lmax = eig.eigenvalues.max();
    if lmax <= 0.0 {
        return None;
    }
    let mut last_rank = usize::MAX;
    for &t in &RANK_THRESHOLDS {
        let keep: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > t * lmax).collect();
        if keep.len() == last_rank {
            continue;
        }
        last_rank = keep.len();
        if n * keep.len() + sc.constraints.len() > MAX_UNKNOWNS {
            break;
        }
        let mut v = eig.eigenvectors.select_columns(&keep);
        for (c, &i) in keep.iter().enumerate() {
            v.column_mut(c).scale_mut(eig.eigenvalues[i].sqrt());
        }
        let Some((vp, yp)) = newton(sc, v, y_hat.clone()) else { continue };
        let m_full = sc.unscale_primal(&(&vp * vp.transpose()));
        let y_full = sc.unscale_dual(&yp);
        let res = problem.residuals(&m_full, &y_full);
        if res.converged(opts, objective_scale) {
            return Some((m_full, y_full, res));
        }
    }
    None
}

fn slack(sc: &Scaled, y: &DVector<f64>) -> DMatrix<f64> {
    let mut s = -&sc.objective;
    for (k, a) in sc.constraints.iter().enumerate() {
        s += a * y[k];
    }
    s
}

fn kkt_residual(sc: &Scaled, v: &DMatrix<f64>, y: &DVector<f64>) -> DVector<f64> {
    let m = sc.constraints.len();
    let (n, r) = v.shape();
    let vvt = v * v.transpose();
    let sv = slack(sc, y) * v;
    let mut f = DVector::zeros(m + n * r);
    for (k, a) in sc.constraints.iter().enumerate() {
        f[k] = a.dot(&vvt) - sc.rhs[k];
    }
    f.rows_mut(m, n * r).copy_from_slice(sv.as_slice());
    f
}

/// Unknowns are `vec(V)` (column-major) followed by `y`.
fn newton(sc: &Scaled, mut v: DMatrix<f64>, mut y: DVector<f64>) -> Option<(DMatrix<f64>, DVector<f64>)> {
    let m = sc.constraints.len();
    let (n, r) = v.shape();
    let nv = n * r;
    let mut f = kkt_residual(sc, &v, &y);
    let mut fnorm = f.norm();
    for _ in 0..NEWTON_STEPS {
        let s = slack(sc, &y);
        let mut jac = DMatrix::zeros(m + nv, nv + m);
        for (k, a) in sc.constraints.iter().enumerate() {
            let av = a * &v;
            // d<A_k, V V'> = 2 <A_k V, dV>
            for (idx, x) in av.iter().enumerate() {
                jac[(k, idx)] = 2.0 * x;
            }
            // d(S V) along y_k is A_k V
            for (idx, x) in av.iter().enumerate() {
                jac[(m + idx, nv + k)] = *x;
            }
        }
        // d(S V) along V[i, j] puts column i of S into column j
        for j in 0..r {
            for i in 0..n {
                for p in 0..n {
                    jac[(m + j * n + p, j * n + i)] = s[(p, i)];
                }
            }
        }
        let trial = |step: &DVector<f64>| {
            let dv = DMatrix::from_column_slice(n, r, &step.as_slice()[..nv]);
            let dy = step.rows(nv, m).into_owned();
            let mut t = 1.0;
            loop {
                let v_new = &v + &dv * t;
                let y_new = &y + &dy * t;
                let f_new = kkt_residual(sc, &v_new, &y_new);
                let norm_new = f_new.norm();
                if norm_new < fnorm || t < MIN_STEP {
                    break (v_new, y_new, f_new, norm_new);
                }
                t *= 0.5;
            }
        };
        let fast = normal_equation_step(&jac, &f).map(|step| trial(&step));
        let (v_new, y_new, f_new, norm_new) = match fast {
            Some(out) if out.3 <= FAST_CONTRACTION * fnorm || out.3 <= 1e-12 => out,
            _ => trial(&truncated_svd_step(&jac, &f)?),
        };
        if !(norm_new < fnorm) {
            break;
        }
        if norm_new > MIN_CONTRACTION * fnorm && norm_new > 1e-12 {
            return None;
        }
        let done = norm_new <= 1e-15 * (1.0 + sc.rhs.norm());
        v = v_new;
        y = y_new;
        f = f_new;
        fnorm = norm_new;
        if done {
            break;
        }
    }
    Some((v, y))
}

/// Damped normal equations `(J'J + lambda I) d = -J'f` solved by Cholesky.
fn normal_equation_step(jac: &DMatrix<f64>, f: &DVector<f64>) -> Option<DVector<f64>> {
    let mut normal = jac.tr_mul(jac);
    let damping = NORMAL_DAMPING * normal.diagonal().max().max(f64::MIN_POSITIVE);
    for i in 0..normal.nrows() {
        normal[(i, i)] += damping;
    }
    let step = normal.cholesky()?.solve(&(-jac.tr_mul(f)));
    step.iter().all(|x| x.is_finite()).then_some(step)
}

/// Truncated-SVD solution of `J d = -f`. Directions with singular values
/// below `STEP_CUTOFF` (relative) are dropped: they span the rotations
/// `V -> V Q` and any flat directions of the solution set.
fn truncated_svd_step(jac: &DMatrix<f64>, f: &DVector<f64>) -> Option<DVector<f64>> {
    let svd = jac.clone().svd(true, true);
    let tol = svd.singular_values.max() * STEP_CUTOFF;
    let step = svd.solve(&(-f), tol).ok()?;
    step.iter().all(|x| x.is_finite()).then_some(step)
}
