use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::ni::ni_value;
use super::{BoundKind, BoundReport};
use crate::gauge::{apply_diagonal_similarity, apply_mobius};
use crate::model::ModelParameters;
use crate::{CVector, C64};

/// Search settings for the gauge-optimized norm-inequality bound.
#[derive(Debug, Clone, PartialEq)]
pub struct NioOptions {
    /// Total starts, the first of which is the identity gauge.
    pub restarts: usize,
    pub max_iters: usize,
    /// Relative central-difference step.
    pub fd_step: f64,
    /// Stop once the objective decreases by less than this (relative) for
    /// a few consecutive iterations.
    pub tolerance: f64,
    /// Weight of the log barrier on `1 - gamma |Gamma|_2`.
    pub barrier: f64,
    /// Standard deviation of the random start perturbations.
    pub perturbation: f64,
    pub seed: u64,
}

impl Default for NioOptions {
    fn default() -> Self {
        Self {
            restarts: 8,
            max_iters: 500,
            fd_step: 1e-6,
            tolerance: 1e-10,
            barrier: 1e-3,
            perturbation: 0.2,
            seed: 0,
        }
    }
}

const STALL_LIMIT: usize = 3;
const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 50;

/// Minimizes `B_NI` over diagonal-similarity and Mobius gauges. Every
/// admissible point evaluated during the search yields a valid bound, so the
/// smallest one seen is reported; the identity gauge is always evaluated.
pub fn nio_bound(theta: &ModelParameters, opts: &NioOptions) -> BoundReport {
    let (ni, _) = ni_value(theta);
    let Some(ni) = ni else {
        return BoundReport::invalid(BoundKind::Nio, "identity gauge infeasible: NI bound invalid");
    };
    let n = theta.n_s();
    let dim = 2 * n + 2;
    let starts: Vec<Vec<f64>> = (0..opts.restarts.max(1))
        .map(|r| {
            let mut p = identity_point(n);
            if r > 0 {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(r as u64));
                for x in p.iter_mut().take(2 * n) {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    *x += opts.perturbation * z;
                }
                let mut m = C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)) * opts.perturbation;
                if m.norm() > 0.5 {
                    m *= 0.5 / m.norm();
                }
                p[2 * n] = m.re;
                p[2 * n + 1] = m.im;
            }
            p
        })
        .collect();
    debug_assert!(starts.iter().all(|p| p.len() == dim));
    let runs: Vec<Run> = starts.into_par_iter().map(|p| descend(theta, p, opts)).collect();
    let (best_idx, best) = runs
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.best_value.total_cmp(&b.best_value).then(i.cmp(j)))
        .expect("at least one start");
    // the identity gauge belongs to the search set
    let value = best.best_value.min(ni);
    let d: Vec<[f64; 2]> = (0..n).map(|i| [best.best_point[2 * i], best.best_point[2 * i + 1]]).collect();
    BoundReport::valid(BoundKind::Nio, value)
        .with("ni", ni)
        .with("best_restart", best_idx)
        .with("d", serde_json::json!(d))
        .with("m", serde_json::json!([best.best_point[2 * n], best.best_point[2 * n + 1]]))
        .with("evaluations", runs.iter().map(|r| r.evaluations).sum::<usize>())
        .with("iterations", runs.iter().map(|r| r.iterations).sum::<usize>())
}

fn identity_point(n: usize) -> Vec<f64> {
    let mut p = vec![0.0; 2 * n + 2];
    for i in 0..n {
        p[2 * i] = 1.0;
    }
    p
}

/// `B_NI` of the gauged model at point `p = (Re d_1, Im d_1, ..., Re m, Im m)`
/// and its barrier-penalized log, or `None` when the gauge is inadmissible or
/// the bound invalid.
fn evaluate(theta: &ModelParameters, p: &[f64], barrier: f64) -> Option<(f64, f64)> {
    let n = theta.n_s();
    let d = CVector::from_fn(n, |i, _| C64::new(p[2 * i], p[2 * i + 1]));
    let m = C64::new(p[2 * n], p[2 * n + 1]);
    let t = apply_diagonal_similarity(theta, &d).ok()?;
    let t = apply_mobius(&t, m).ok()?;
    let (value, contraction) = ni_value(&t);
    let value = value?;
    if !(value > 0.0) {
        return None;
    }
    Some((value, value.ln() - barrier * (1.0 - contraction).ln()))
}

struct Run {
    best_value: f64,
    best_point: Vec<f64>,
    evaluations: usize,
    iterations: usize,
}

struct Search<'a> {
    theta: &'a ModelParameters,
    barrier: f64,
    run: Run,
}

impl Search<'_> {
    fn f(&mut self, p: &[f64]) -> f64 {
        self.run.evaluations += 1;
        match evaluate(self.theta, p, self.barrier) {
            Some((value, obj)) => {
                if value < self.run.best_value {
                    self.run.best_value = value;
                    self.run.best_point = p.to_vec();
                }
                obj
            }
            None => f64::INFINITY,
        }
    }

    fn gradient(&mut self, p: &[f64], f0: f64, fd_step: f64) -> Vec<f64> {
        let mut g = vec![0.0; p.len()];
        let mut q = p.to_vec();
        for i in 0..p.len() {
            let h = fd_step * p[i].abs().max(1.0);
            q[i] = p[i] + h;
            let fp = self.f(&q);
            q[i] = p[i] - h;
            let fm = self.f(&q);
            q[i] = p[i];
            g[i] = match (fp.is_finite(), fm.is_finite()) {
                (true, true) => (fp - fm) / (2.0 * h),
                (true, false) => (fp - f0) / h,
                (false, true) => (f0 - fm) / h,
                (false, false) => 0.0,
            };
        }
        g
    }
}

/// Quasi-Newton (BFGS) descent with backtracking line search.
fn descend(theta: &ModelParameters, start: Vec<f64>, opts: &NioOptions) -> Run {
    let dim = start.len();
    let mut s = Search {
        theta,
        barrier: opts.barrier,
        run: Run {
            best_value: f64::INFINITY,
            best_point: start.clone(),
            evaluations: 0,
            iterations: 0,
        },
    };
    let mut p = start;
    let mut fp = s.f(&p);
    if !fp.is_finite() {
        return s.run;
    }
    let mut g = s.gradient(&p, fp, opts.fd_step);
    let mut h = identity(dim);
    let mut stalls = 0;
    for _ in 0..opts.max_iters {
        s.run.iterations += 1;
        let mut dir: Vec<f64> = mat_vec(&h, &g).iter().map(|x| -x).collect();
        let mut slope = dot(&g, &dir);
        if !(slope < 0.0) {
            h = identity(dim);
            dir = g.iter().map(|x| -x).collect();
            slope = -dot(&g, &g);
            if slope == 0.0 {
                break;
            }
        }
        let Some((t, f_new)) = line_search(&mut s, &p, fp, &dir, slope) else {
            if is_identity(&h) {
                break;
            }
            h = identity(dim);
            continue;
        };
        let p_new: Vec<f64> = p.iter().zip(&dir).map(|(x, d)| x + t * d).collect();
        let g_new = s.gradient(&p_new, f_new, opts.fd_step);
        let step: Vec<f64> = dir.iter().map(|d| t * d).collect();
        let yk: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        bfgs_update(&mut h, &step, &yk);
        let decrease = fp - f_new;
        p = p_new;
        g = g_new;
        fp = f_new;
        if decrease <= opts.tolerance * fp.abs().max(1.0) {
            stalls += 1;
            if stalls >= STALL_LIMIT {
                break;
            }
        } else {
            stalls = 0;
        }
    }
    s.run
}

fn line_search(s: &mut Search, p: &[f64], fp: f64, dir: &[f64], slope: f64) -> Option<(f64, f64)> {
    let mut t = 1.0;
    let mut q = vec![0.0; p.len()];
    for _ in 0..MAX_HALVINGS {
        for i in 0..p.len() {
            q[i] = p[i] + t * dir[i];
        }
        let fq = s.f(&q);
        if fq.is_finite() && fq <= fp + ARMIJO * t * slope {
            return Some((t, fq));
        }
        t *= 0.5;
    }
    None
}

fn bfgs_update(h: &mut [Vec<f64>], s: &[f64], y: &[f64]) {
    let sy = dot(s, y);
    if !(sy > 1e-300) {
        return;
    }
    let rho = 1.0 / sy;
    let hy = mat_vec(h, y);
    let yhy = dot(y, &hy);
    let n = s.len();
    // H <- H - rho (s hy' + hy s') + (rho^2 y'Hy + rho) s s'
    for i in 0..n {
        for j in 0..n {
            h[i][j] += -rho * (s[i] * hy[j] + hy[i] * s[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

fn is_identity(h: &[Vec<f64>]) -> bool {
    h.iter()
        .enumerate()
        .all(|(i, row)| row.iter().enumerate().all(|(j, &x)| x == if i == j { 1.0 } else { 0.0 }))
}

fn mat_vec(h: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    h.iter().map(|row| dot(row, v)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
