//! Semidefinite relaxation of the binary channel-gain maximization.
//!
//! With `x = (I - Phi Gamma)^{-1} Phi b` the gain is the quadratic
//! `x^H R0 x + 2 Re(q0' x) + t0`, and each binary load choice is the quadratic
//! equality `(g_a,i' x - alpha b_i)^* (g_b,i' x - beta b_i) = 0`. Lifting to
//! `M = [[X, x], [x^H, 1]]` and dropping `rank(M) = 1` gives an SDP whose
//! optimal value bounds the gain from above.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use risbound_sdp::{solve_sdp, ConicProgram, Residuals, SolveStatus, SolverOptions};
use serde::Serialize;

use crate::linalg::{hermitian_eigen, hermitize, real_embedding, real_unembedding, Factored};
use crate::model::ModelParameters;
use crate::{CMatrix, CVector, Error, Result, C64};

/// One binary-load constraint `x^H R x + x^H q1 + q2' x + t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct QcqpConstraint {
    pub r: CMatrix,
    pub q1: CVector,
    pub q2: CVector,
    pub t: C64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QcqpData {
    /// `a^* a'`.
    pub r0: CMatrix,
    /// `h0^* a`.
    pub q0: CVector,
    /// `|h0|^2`.
    pub t0: f64,
    pub constraints: Vec<QcqpConstraint>,
}

impl QcqpData {
    pub fn n_s(&self) -> usize {
        self.q0.len()
    }

    /// `G0 = [[R0, q0^*], [q0', t0]]`, so the objective is `tr(G0 M)`.
    pub fn objective_matrix(&self) -> CMatrix {
        block(&self.r0, &self.q0.conjugate(), &self.q0, C64::from(self.t0))
    }

    /// `G_i = [[R_i, q1_i], [q2_i', t_i]]`, so constraint `i` is `tr(G_i M) = 0`.
    pub fn constraint_matrix(&self, i: usize) -> CMatrix {
        let c = &self.constraints[i];
        block(&c.r, &c.q1, &c.q2, c.t)
    }

    pub fn objective_value(&self, x: &CVector) -> f64 {
        (x.dotc(&(&self.r0 * x)) + C64::from(2.0 * self.q0.dot(x).re) + C64::from(self.t0)).re
    }

    pub fn constraint_value(&self, i: usize, x: &CVector) -> C64 {
        let c = &self.constraints[i];
        x.dotc(&(&c.r * x)) + x.dotc(&c.q1) + c.q2.dot(x) + c.t
    }
}

fn block(top_left: &CMatrix, right: &CVector, bottom: &CVector, corner: C64) -> CMatrix {
    let n = top_left.nrows();
    let mut g = CMatrix::zeros(n + 1, n + 1);
    g.view_mut((0, 0), (n, n)).copy_from(top_left);
    for i in 0..n {
        g[(i, n)] = right[i];
        g[(n, i)] = bottom[i];
    }
    g[(n, n)] = corner;
    g
}

/// With `c_i'` the `i`-th row of `Gamma` and `u_i` the `i`-th unit vector:
/// `g_a,i = u_i - alpha c_i`, `g_b,i = u_i - beta c_i`, `R_i = g_a,i^* g_b,i'`,
/// `q1_i = -beta b_i g_a,i^*`, `q2_i = -alpha^* b_i^* g_b,i`, `t_i = alpha^* beta |b_i|^2`.
pub fn build_qcqp(theta: &ModelParameters) -> QcqpData {
    let n = theta.n_s();
    let (alpha, beta) = (theta.alpha(), theta.beta());
    let a = theta.a();
    let b = theta.b();
    let constraints = (0..n)
        .map(|i| {
            let row = theta.gamma().row(i).transpose();
            let mut ga = -&row * alpha;
            let mut gb = -&row * beta;
            ga[i] += C64::from(1.0);
            gb[i] += C64::from(1.0);
            let ga_conj = ga.conjugate();
            QcqpConstraint {
                r: &ga_conj * gb.transpose(),
                q1: &ga_conj * (-beta * b[i]),
                q2: &gb * (-alpha.conj() * b[i].conj()),
                t: alpha.conj() * beta * b[i].norm_sqr(),
            }
        })
        .collect();
    QcqpData {
        r0: a.conjugate() * a.transpose(),
        q0: a * theta.h0().conj(),
        t0: theta.h0().norm_sqr(),
        constraints,
    }
}

/// The lifted relaxation, in complex Hermitian form and as a real symmetric
/// program of twice the dimension.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    /// Dimension of the complex variable `M` (`n_s + 1`).
    pub dim: usize,
    /// Hermitian `G0`.
    pub objective: CMatrix,
    /// Hermitian constraint matrices `H` with right-hand sides: `tr(H M) = rhs`.
    /// Each complex equality contributes its Hermitian and anti-Hermitian
    /// parts; the last entry is the corner constraint `M[n, n] = 1`.
    pub equalities: Vec<(CMatrix, f64)>,
    /// Embedded program over real `2 dim x 2 dim` matrices.
    pub program: ConicProgram,
    /// `<emb A, emb M> = objective_factor * tr(A M)`; divide the embedded
    /// objective by this to recover the complex one.
    pub objective_factor: f64,
}

/// `(G + G^H) / 2` and `(G - G^H) / (2j)`; for Hermitian `M`,
/// `tr(G M) = tr(H1 M) + j tr(H2 M)` with both traces real.
pub fn hermitian_split(g: &CMatrix) -> (CMatrix, CMatrix) {
    let gh = g.adjoint();
    let mut h1 = (g + &gh) * C64::from(0.5);
    let mut h2 = (g - &gh) * C64::new(0.0, -0.5);
    hermitize(&mut h1);
    hermitize(&mut h2);
    (h1, h2)
}

pub fn build_sdp(qcqp: &QcqpData) -> Result<SdpProblem> {
    let n = qcqp.n_s() + 1;
    let mut objective = qcqp.objective_matrix();
    hermitize(&mut objective);
    let mut equalities = Vec::with_capacity(2 * qcqp.n_s() + 1);
    for i in 0..qcqp.n_s() {
        let (h1, h2) = hermitian_split(&qcqp.constraint_matrix(i));
        equalities.push((h1, 0.0));
        equalities.push((h2, 0.0));
    }
    let mut corner = CMatrix::zeros(n, n);
    corner[(n - 1, n - 1)] = C64::from(1.0);
    equalities.push((corner, 1.0));
    let factor = 2.0;
    let constraints = equalities
        .iter()
        .map(|(h, rhs)| (real_embedding(h), factor * rhs))
        .collect();
    let program = ConicProgram::new(2 * n, real_embedding(&objective), constraints)?;
    Ok(SdpProblem {
        dim: n,
        objective,
        equalities,
        program,
        objective_factor: factor,
    })
}

/// Solution of the relaxation.
#[derive(Debug, Clone)]
pub struct SdrSolution {
    /// `tr(G0 M)` at the returned `M`.
    pub bound: f64,
    /// Upper end of the certified interval: the dual objective.
    pub dual_bound: f64,
    pub x_check: CVector,
    pub big_x_check: CMatrix,
    /// Full lifted matrix `[[X, x], [x^H, M_nn]]`.
    pub m_check: CMatrix,
    /// Effective rank of `X`.
    pub effective_rank: f64,
    /// Effective rank of the full lifted matrix; 1 means `X = x x^H` and the
    /// relaxation is exact at `x`.
    pub lifted_effective_rank: f64,
    pub status: SolveStatus,
    /// Residuals of the embedded real program.
    pub residuals: Residuals,
    pub iterations: usize,
    pub polished: bool,
}

impl SdrSolution {
    pub fn certified(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

/// Solves the relaxation. A solve that stops short of the tolerances yields
/// [`Error::SolverNotConverged`] carrying the uncertified solution.
pub fn sdr_bound(theta: &ModelParameters, opts: &SolverOptions) -> Result<SdrSolution> {
    let sdp = build_sdp(&build_qcqp(theta))?;
    let sol = solve_sdp(&sdp.program, opts)?;
    let mut m = real_unembedding(&sol.m);
    hermitize(&mut m);
    let n = sdp.dim - 1;
    let x_check = m.view((0, n), (n, 1)).column(0).into_owned();
    let big_x_check = m.view((0, 0), (n, n)).into_owned();
    let effective_rank = effective_rank(&big_x_check).unwrap_or(0.0);
    let lifted_effective_rank = crate::sdr::effective_rank(&m).unwrap_or(0.0);
    let out = SdrSolution {
        bound: sol.residuals.primal_objective / sdp.objective_factor,
        dual_bound: sol.residuals.dual_objective / sdp.objective_factor,
        x_check,
        big_x_check,
        m_check: m,
        effective_rank,
        lifted_effective_rank,
        status: sol.status,
        residuals: sol.residuals,
        iterations: sol.iterations,
        polished: sol.polished,
    };
    if out.status != SolveStatus::Optimal {
        return Err(Error::SolverNotConverged {
            status: out.status,
            iterations: out.iterations,
            solution: Box::new(out),
        });
    }
    Ok(out)
}

/// `exp(H(p))` with `p_i = lambda_i / sum(lambda)` over the eigenvalues of
/// the Hermitian part of `x`, negatives clamped to zero.
pub fn effective_rank(x: &CMatrix) -> Result<f64> {
    let (lambda, _) = hermitian_eigen(x);
    let clamped: Vec<f64> = lambda.iter().map(|l| l.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroMatrix);
    }
    let entropy: f64 = clamped
        .iter()
        .map(|&l| l / total)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum();
    Ok(entropy.exp())
}

/// A single gauge, for the transformation identities of the lifted problem.
#[derive(Debug, Clone, PartialEq)]
pub enum SingleGauge {
    DiagonalSimilarity(CVector),
    ComplexScaling(C64),
    Mobius(C64),
}

/// Residuals of `G_i(theta~) = eta_i T^{-H} G_i(theta) T^{-1}` and
/// `G0(theta~) = T^{-H} G0(theta) T^{-1}`, plus the trace identity
/// `tr(G_i(theta~) T M T^H) = eta_i tr(G_i(theta) M)` on a random Hermitian `M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResiduals {
    /// Frobenius residual per constraint.
    pub constraint: Vec<f64>,
    /// `|G_i(theta~)|_F` per constraint.
    pub constraint_scale: Vec<f64>,
    pub objective: f64,
    pub objective_scale: f64,
    /// `|tr(G_i(theta~) M~) - eta_i tr(G_i(theta) M)|` per constraint.
    pub trace: Vec<f64>,
    pub trace_scale: Vec<f64>,
}

impl IdentityResiduals {
    /// Largest residual relative to its scale (scales below 1 count as 1).
    pub fn max_relative(&self) -> f64 {
        let rel = |r: &f64, s: &f64| r / s.max(1.0);
        self.constraint
            .iter()
            .zip(&self.constraint_scale)
            .chain(self.trace.iter().zip(&self.trace_scale))
            .map(|(r, s)| rel(r, s))
            .fold(rel(&self.objective, &self.objective_scale), f64::max)
    }

    /// Largest matrix-identity residual relative to `|G(theta~)|_F`.
    pub fn max_matrix_relative(&self) -> f64 {
        self.constraint
            .iter()
            .zip(&self.constraint_scale)
            .map(|(r, s)| r / s.max(f64::MIN_POSITIVE))
            .fold(self.objective / self.objective_scale.max(f64::MIN_POSITIVE), f64::max)
    }
}

pub fn gauge_identity_check(theta: &ModelParameters, gauge: &SingleGauge, probe_seed: u64) -> Result<IdentityResiduals> {
    use crate::gauge::{apply_complex_scaling, apply_diagonal_similarity, apply_mobius};
    let n = theta.n_s();
    let one = C64::from(1.0);
    let (tilde, t, eta): (ModelParameters, CMatrix, Vec<C64>) = match gauge {
        SingleGauge::DiagonalSimilarity(d) => {
            let tilde = apply_diagonal_similarity(theta, d)?;
            let mut t = CMatrix::identity(n + 1, n + 1);
            for i in 0..n {
                t[(i, i)] = d[i];
            }
            (tilde, t, d.iter().map(|z| C64::from(z.norm_sqr())).collect())
        }
        SingleGauge::ComplexScaling(c) => {
            let tilde = apply_complex_scaling(theta, *c)?;
            let mut t = CMatrix::identity(n + 1, n + 1);
            for i in 0..n {
                t[(i, i)] = *c;
            }
            (tilde, t, vec![C64::from(c.norm_sqr()); n])
        }
        SingleGauge::Mobius(m) => {
            let tilde = apply_mobius(theta, *m)?;
            let k = (1.0 - m.norm_sqr()).sqrt();
            let mut t = CMatrix::identity(n + 1, n + 1);
            let w_block = (CMatrix::identity(n, n) - theta.gamma() * *m) / C64::from(k);
            t.view_mut((0, 0), (n, n)).copy_from(&w_block);
            let w = theta.b() * (-*m / k);
            for i in 0..n {
                t[(i, n)] = w[i];
            }
            let ka = C64::from(k) / (one - m.conj() * theta.alpha());
            let kb = C64::from(k) / (one - m.conj() * theta.beta());
            (tilde, t, vec![ka.conj() * kb; n])
        }
    };
    let t_inv = Factored::new(t.clone(), f64::INFINITY)
        .map_err(|condition| Error::SingularResolvent { condition })?
        .inverse;
    let t_inv_h = t_inv.adjoint();
    let q = build_qcqp(theta);
    let qt = build_qcqp(&tilde);

    let mut rng = ChaCha8Rng::seed_from_u64(probe_seed);
    let mut m = CMatrix::from_fn(n + 1, n + 1, |_, _| {
        C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
    });
    hermitize(&mut m);
    let m_tilde = &t * &m * t.adjoint();

    let g0 = q.objective_matrix();
    let g0t = qt.objective_matrix();
    let objective = (&g0t - &t_inv_h * &g0 * &t_inv).norm();
    let mut out = IdentityResiduals {
        constraint: Vec::with_capacity(n),
        constraint_scale: Vec::with_capacity(n),
        objective,
        objective_scale: g0t.norm(),
        trace: Vec::with_capacity(n),
        trace_scale: Vec::with_capacity(n),
    };
    for (i, &e) in eta.iter().enumerate().take(n) {
        let gi = q.constraint_matrix(i);
        let git = qt.constraint_matrix(i);
        let predicted = &t_inv_h * &gi * &t_inv * e;
        out.constraint.push((&git - predicted).norm());
        out.constraint_scale.push(git.norm());
        let lhs = (&git * &m_tilde).trace();
        let rhs = e * (&gi * &m).trace();
        out.trace.push((lhs - rhs).norm());
        out.trace_scale.push(lhs.norm().max(rhs.norm()));
    }
    Ok(out)
}

/// Real embedding helper exposed for property tests of the lifting.
pub fn embed(h: &CMatrix) -> DMatrix<f64> {
    real_embedding(h)
}
