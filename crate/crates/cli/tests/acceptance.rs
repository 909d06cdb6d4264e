//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use risbound_cli::verify::random_admissible_gauge;
use risbound_cli::cmd_verify;
use risbound_core::bounds::{ibd_achiever, ibd_bound, ni_bound, nio_bound, NioOptions};
use risbound_core::channel::{channel_for, gain_for};
use risbound_core::gauge::{apply_complex_scaling, apply_diagonal_similarity, apply_gauge, apply_mobius};
use risbound_core::optimizers::{exhaustive_search, project_sdr};
use risbound_core::scenario::{generate_scenario, spectral_norm, DirectPath, LoadSet, ScenarioSpec};
use risbound_core::sdr::{effective_rank, gauge_identity_check, sdr_bound, SdrSolution, SingleGauge};
use risbound_core::{
    channel_gain_full, prepare_baseline, shannon_capacity, woodbury_channel, CMatrix, ControlVector, ModelParameters, C64,
};
use risbound_sdp::{solve_sdp, ConicProgram, SolveStatus, SolverOptions};

type Outcome = Result<String, String>;

fn scenario(n_s: usize, seed: u64, loads: LoadSet) -> ModelParameters {
    let spec = ScenarioSpec {
        loads,
        reciprocal: seed.is_multiple_of(2),
        direct_path: if seed.is_multiple_of(3) { DirectPath::Zero } else { DirectPath::Random },
        ..ScenarioSpec::new(n_s, seed)
    };
    generate_scenario(&spec).expect("valid spec")
}

fn uncoupled(theta: &ModelParameters) -> ModelParameters {
    let n = theta.n_s();
    ModelParameters::new(theta.alpha(), theta.beta(), theta.h0(), theta.a().clone(), theta.b().clone(), CMatrix::zeros(n, n))
        .expect("valid model")
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Enumeration with a fresh factorization per configuration; ties within
/// `1e-12` relative go to the lexicographically smallest configuration.
fn naive_es(model: &ModelParameters) -> (ControlVector, f64) {
    let n = model.n_s();
    let mut best = (ControlVector::zeros(n), f64::NEG_INFINITY);
    for idx in 0..(1u64 << n) {
        let v = ControlVector::from_index(n, idx);
        let g = gain_for(model, &v).expect("contractive model");
        if g > best.1 * (1.0 + 1e-12) || (g >= best.1 * (1.0 - 1e-12) && v < best.0) {
            best = (v, g);
        }
    }
    best
}

/// Every RIS relaxation solved by the suite, for the residual part of
/// criterion 8.
#[derive(Default)]
struct SolveLog {
    solves: Vec<SdrSolution>,
}

fn sdp_residuals_ok(s: &SdrSolution) -> bool {
    let r = &s.residuals;
    r.primal <= 1e-8 && r.gap <= 1e-7 * (1.0 + r.primal_objective.abs()) && r.min_eigenvalue >= -1e-8
}

fn criterion_1_and_2(log: &mut SolveLog) -> (Outcome, Outcome) {
    let mut checked = [0usize; 3];
    let mut worst_sdr = f64::NEG_INFINITY;
    let mut failures = Vec::new();
    let mut hierarchy_pairs = 0;
    let mut hierarchy_failures = Vec::new();
    let mut soft = Vec::new();
    for i in 0..200u64 {
        let n = 4 + (i % 7) as usize;
        let loads = LoadSet::ALL[(i % 3) as usize];
        let th = scenario(n, 1000 + i, loads);
        let es = match exhaustive_search(&th) {
            Ok(r) => r.gain,
            Err(e) => {
                failures.push(format!("scenario {i}: ES failed: {e}"));
                continue;
            }
        };
        let sdr = match sdr_bound(&th, &SolverOptions::default()) {
            Ok(s) => s,
            Err(e) => {
                failures.push(format!("scenario {i}: SDR failed: {e}"));
                continue;
            }
        };
        checked[0] += 1;
        worst_sdr = worst_sdr.max((es - sdr.bound) / sdr.bound);
        if !(es <= sdr.bound * (1.0 + 1e-6) + 1e-9) {
            failures.push(format!("scenario {i}: ES {es} > SDR {}", sdr.bound));
        }
        let mut ibd = None;
        if loads.name == LoadSet::PM.name {
            let b = ibd_bound(&th).map(|(r, _)| r.value.expect("valid")).map_err(|e| e.to_string());
            match b {
                Ok(b) => {
                    checked[1] += 1;
                    ibd = Some(b);
                    if !(es <= b * (1.0 + 1e-8)) {
                        failures.push(format!("scenario {i}: ES {es} > IBD {b}"));
                    }
                }
                Err(e) => failures.push(format!("scenario {i}: IBD failed: {e}")),
            }
        }
        let gamma_ok = th.load_radius() * spectral_norm(th.gamma()) < 1.0;
        let ni = ni_bound(&th);
        let nio = nio_bound(
            &th,
            &NioOptions {
                seed: i,
                ..NioOptions::default()
            },
        );
        if gamma_ok {
            match (ni.value, nio.value) {
                (Some(ni_v), Some(nio_v)) => {
                    checked[2] += 1;
                    if !(es <= ni_v) {
                        failures.push(format!("scenario {i}: ES {es} > NI {ni_v}"));
                    }
                    if !(es <= nio_v) {
                        failures.push(format!("scenario {i}: ES {es} > NIO {nio_v}"));
                    }
                }
                _ => failures.push(format!("scenario {i}: NI/NIO invalid although gamma |Gamma| < 1")),
            }
        }
        if let (Some(ni_v), Some(nio_v)) = (ni.value, nio.value) {
            hierarchy_pairs += 1;
            if !(nio_v <= ni_v * (1.0 + 1e-12)) {
                hierarchy_failures.push(format!("scenario {i}: NIO {nio_v} > NI {ni_v}"));
            }
            if let Some(ibd_v) = ibd {
                if !(sdr.bound <= ibd_v && ibd_v <= nio_v) {
                    soft.push(format!("scenario {i}: SDR {} IBD {ibd_v} NIO {nio_v}", sdr.bound));
                }
            }
        }
        log.solves.push(sdr);
    }
    for s in &soft {
        println!("  note (soft ordering SDR <= IBD <= NIO not observed): {s}");
    }
    let c1 = if failures.is_empty() {
        Ok(format!(
            "200 scenarios; SDR checked {}, IBD {}, NI/NIO {}; worst (ES - SDR)/SDR = {worst_sdr:.2e}",
            checked[0], checked[1], checked[2]
        ))
    } else {
        Err(failures.join("; "))
    };
    let c2 = if hierarchy_failures.is_empty() {
        Ok(format!(
            "NIO <= NI on {hierarchy_pairs} valid pairs; soft ordering violations logged: {}",
            soft.len()
        ))
    } else {
        Err(hierarchy_failures.join("; "))
    };
    (c1, c2)
}

fn criterion_3(log: &mut SolveLog) -> Outcome {
    let mut worst = 0.0f64;
    let mut pairs = 0;
    let mut i = 0u64;
    while pairs < 50 {
        let n = 2 + (i % 7) as usize;
        let th = scenario(n, 3000 + i, LoadSet::ALL[(i % 3) as usize]);
        let phi = random_admissible_gauge(&th, 7000 + i).ok_or(format!("scenario {i}: no admissible gauge"))?;
        let gauged = apply_gauge(&th, &phi).map_err(|e| e.to_string())?;
        let opts = SolverOptions::default();
        let a = sdr_bound(&th, &opts).map_err(|e| format!("scenario {i}: {e}"))?;
        let b = sdr_bound(&gauged, &opts).map_err(|e| format!("scenario {i} gauged: {e}"))?;
        let dev = rel(a.bound, b.bound);
        if dev > 1e-5 {
            return Err(format!("scenario {i}: {} vs {} (rel {dev:.2e})", a.bound, b.bound));
        }
        worst = worst.max(dev);
        log.solves.push(a);
        log.solves.push(b);
        pairs += 1;
        i += 1;
    }
    Ok(format!("50 gauged pairs, worst relative deviation {worst:.2e}"))
}

fn criterion_4() -> Outcome {
    let mut worst = [0.0f64; 3];
    for i in 0..20u64 {
        let n = 1 + (i % 8) as usize;
        let th = scenario(n, 4000 + i, LoadSet::ALL[(i % 3) as usize]);
        let phi = random_admissible_gauge(&th, 8000 + i).ok_or(format!("scenario {i}: no admissible gauge"))?;
        let gauges = [
            SingleGauge::DiagonalSimilarity(phi.d.clone()),
            SingleGauge::ComplexScaling(phi.c),
            SingleGauge::Mobius(phi.m),
        ];
        for (k, g) in gauges.into_iter().enumerate() {
            let r = gauge_identity_check(&th, &g, i).map_err(|e| format!("scenario {i}: {e}"))?;
            let dev = r.max_matrix_relative();
            if dev > 1e-9 {
                return Err(format!("scenario {i} gauge {k}: residual {dev:.2e}"));
            }
            worst[k] = worst[k].max(dev);
        }
    }
    Ok(format!(
        "20 scenarios per gauge type; worst residual DS {:.1e}, CS {:.1e}, MO {:.1e}",
        worst[0], worst[1], worst[2]
    ))
}

fn criterion_5() -> Outcome {
    let mut worst_u = 0.0f64;
    let mut worst_g = 0.0f64;
    for i in 0..50u64 {
        let n = 1 + (i % 10) as usize;
        let th = scenario(n, 5000 + i, LoadSet::PM);
        let (r, _) = ibd_bound(&th).map_err(|e| format!("scenario {i}: {e}"))?;
        let ibd = r.value.expect("valid");
        let ach = ibd_achiever(&th).map_err(|e| format!("scenario {i}: {e}"))?;
        let u = (ach.phi.adjoint() * &ach.phi - CMatrix::identity(n, n)).norm();
        let h = channel_gain_full(&th, &ach.phi).map_err(|e| format!("scenario {i}: {e}"))?;
        let g = rel(h.norm_sqr(), ibd);
        if u > 1e-10 * n as f64 || g > 1e-8 {
            return Err(format!("scenario {i}: unitarity {u:.2e}, gain deviation {g:.2e}"));
        }
        worst_u = worst_u.max(u / n as f64);
        worst_g = worst_g.max(g);
    }
    Ok(format!(
        "50 PM scenarios; worst unitarity residual / n_s {worst_u:.1e}, worst gain deviation {worst_g:.1e}"
    ))
}

fn criterion_6() -> Outcome {
    let mut worst = 0.0f64;
    let mut configs = 0u64;
    for i in 0..16u64 {
        let n = 1 + (i % 8) as usize;
        let th = scenario(n, 6000 + i, LoadSet::ALL[(i % 3) as usize]);
        let phi = random_admissible_gauge(&th, 9000 + i).ok_or(format!("scenario {i}: no admissible gauge"))?;
        let gauged = [
            ("DS", apply_diagonal_similarity(&th, &phi.d)),
            ("CS", apply_complex_scaling(&th, phi.c)),
            ("MO", apply_mobius(&th, phi.m)),
            ("composite", apply_gauge(&th, &phi)),
        ];
        for (name, g) in gauged {
            let g = g.map_err(|e| format!("scenario {i} {name}: {e}"))?;
            for k in 0..1u64 << n {
                let v = ControlVector::from_index(n, k);
                let h = channel_for(&th, &v).map_err(|e| e.to_string())?;
                let hg = channel_for(&g, &v).map_err(|e| e.to_string())?;
                let dev = (h - hg).norm();
                if dev > 1e-10 {
                    return Err(format!("scenario {i} {name} v={v}: deviation {dev:.2e}"));
                }
                worst = worst.max(dev);
                configs += 1;
            }
        }
    }
    Ok(format!("{configs} (scenario, gauge, configuration) triples; worst |h - h~| {worst:.1e}"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst = 0.0f64;
    let mut zero_channels = 0;
    for t in 0..1000u64 {
        let n = rng.random_range(1..=12usize);
        let th = scenario(n, 10_000 + t, LoadSet::ALL[(t % 3) as usize]);
        let v_ref = ControlVector::from_index(n, rng.random::<u64>());
        let mask = rng.random::<u64>();
        let flips: Vec<usize> = (0..n).filter(|i| (mask >> i) & 1 == 1).collect();
        let mut v = v_ref.clone();
        for &i in &flips {
            v.flip(i);
        }
        let base = prepare_baseline(&th, &v_ref).map_err(|e| format!("case {t}: {e}"))?;
        let h = woodbury_channel(&base, &flips).map_err(|e| format!("case {t}: {e}"))?;
        let direct = channel_for(&th, &v).map_err(|e| format!("case {t}: {e}"))?;
        // an exactly zero channel has no relative error; measure against the baseline instead
        let scale = if direct.norm() > 0.0 {
            direct.norm()
        } else {
            zero_channels += 1;
            base.h_ref().norm()
        };
        let dev = (h - direct).norm() / scale;
        if dev > 1e-10 {
            return Err(format!("case {t}: relative deviation {dev:.2e}"));
        }
        worst = worst.max(dev);
    }
    for i in 0..20u64 {
        let th = scenario(10, 11_000 + i, LoadSet::ALL[(i % 3) as usize]);
        let es = exhaustive_search(&th).map_err(|e| e.to_string())?;
        let (v, g) = naive_es(&th);
        if es.v != v || es.gain.to_bits() != g.to_bits() {
            return Err(format!("scenario {i}: ES ({}, {}) vs naive ({v}, {g})", es.v, es.gain));
        }
    }
    Ok(format!(
        "1000 flip sets ({zero_channels} with h = 0 exactly), worst relative deviation {worst:.1e}; ES equals naive on 20 scenarios with n_s = 10"
    ))
}

fn gaussian(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.sample::<f64, _>(StandardNormal))
}

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let g = gaussian(rng, n, n);
    (&g + g.transpose()) * 0.5
}

/// A complementary pair `M* = Q diag(l, 0) Q'`, `S* = Q diag(0, s) Q'` with
/// random constraints, `b = A(M*)` and `C = A'(y*) - S*`; the optimum is `b'y*`.
fn planted(rng: &mut ChaCha8Rng, n: usize, rank: usize, m: usize) -> (ConicProgram, f64) {
    let q = gaussian(rng, n, n).qr().q();
    let mut lm = DVector::zeros(n);
    let mut ls = DVector::zeros(n);
    for i in 0..n {
        if i < rank {
            lm[i] = rng.random_range(0.5..2.0);
        } else {
            ls[i] = rng.random_range(0.5..2.0);
        }
    }
    let m_star = &q * DMatrix::from_diagonal(&lm) * q.transpose();
    let s_star = &q * DMatrix::from_diagonal(&ls) * q.transpose();
    let y_star = DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal));
    let mut cons = Vec::new();
    let mut c = -&s_star;
    for k in 0..m {
        let a = random_symmetric(rng, n);
        let b = a.dot(&m_star);
        c += &a * y_star[k];
        cons.push((a, b));
    }
    let value: f64 = cons.iter().zip(y_star.iter()).map(|((_, b), y)| b * y).sum();
    let c = (&c + c.transpose()) * 0.5;
    (ConicProgram::new(n, c, cons).expect("valid program"), value)
}

fn criterion_8(log: &SolveLog) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for case in 0..50 {
        let n = 4 + (case * 56) / 49;
        let rank = rng.random_range(1..=(n / 4).max(1));
        let lo = rank * (rank + 1) / 2 + 1;
        let hi = (n * (n + 1) / 2).min(lo + n + 9);
        let m = rng.random_range(lo..=hi);
        let (prob, value) = planted(&mut rng, n, rank, m);
        let sol = solve_sdp(&prob, &SolverOptions::default()).map_err(|e| format!("planted {case}: {e}"))?;
        let dev = (sol.objective - value).abs() / value.abs().max(1.0);
        if sol.status != SolveStatus::Optimal || dev > 1e-6 {
            return Err(format!("planted {case} (n={n}): status {:?}, relative error {dev:.2e}", sol.status));
        }
        worst = worst.max(dev);
    }
    let bad = log.solves.iter().filter(|s| !sdp_residuals_ok(s)).count();
    if bad > 0 {
        return Err(format!("{bad} of {} RIS relaxations exceed the residual limits", log.solves.len()));
    }
    let max_primal = log.solves.iter().map(|s| s.residuals.primal).fold(0.0, f64::max);
    Ok(format!(
        "50 planted SDPs (n <= 60), worst relative error {worst:.1e}; {} RIS relaxations within limits, max primal residual {max_primal:.1e}",
        log.solves.len()
    ))
}

fn criterion_9() -> Outcome {
    let mut rank_one = 0;
    let mut violations = Vec::new();
    for i in 0..30u64 {
        let n = 2 + (i % 7) as usize;
        let th = uncoupled(&scenario(n, 12_000 + i, LoadSet::ALL[(i % 3) as usize]));
        let sol = sdr_bound(&th, &SolverOptions::default()).map_err(|e| format!("scenario {i}: {e}"))?;
        let r_eff = effective_rank(&sol.big_x_check).map_err(|e| format!("scenario {i}: {e}"))?;
        if r_eff > 1.0 + 1e-6 {
            continue;
        }
        rank_one += 1;
        let psdr = project_sdr(&th, &sol.x_check).map_err(|e| e.to_string())?;
        let (_, es) = naive_es(&th);
        if rel(psdr.gain, sol.bound) > 1e-6 || rel(psdr.gain, es) > 1e-12 {
            violations.push(format!(
                "scenario {i} ({}, n_s={n}): R_eff(X) = {r_eff:.6}, lifted R_eff = {:.3}, P-SDR {:.6e}, SDR {:.6e}, ES {:.6e}",
                th_name(&th),
                sol.lifted_effective_rank,
                psdr.gain,
                sol.bound,
                es
            ));
        }
    }
    if violations.is_empty() {
        Ok(format!("{rank_one} rank-one cases, all exact"))
    } else {
        Err(format!(
            "{} of {rank_one} rank-one X cases are not exact: {}",
            violations.len(),
            violations.join("; ")
        ))
    }
}

fn th_name(th: &ModelParameters) -> &'static str {
    LoadSet::ALL
        .iter()
        .find(|l| l.alpha == th.alpha() && l.beta == th.beta())
        .map(|l| l.name.as_str())
        .unwrap_or("custom")
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut gains: Vec<f64> = (0..1000).map(|_| 10f64.powf(rng.random_range(-9.0..1.0))).collect();
    gains.sort_by(f64::total_cmp);
    gains.dedup();
    let caps: Vec<f64> = gains
        .iter()
        .map(|g| shannon_capacity(C64::from(g.sqrt()), 10.0, 1e-5))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    if let Some(k) = caps.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(format!("not increasing between |h|^2 = {} and {}", gains[k], gains[k + 1]));
    }
    let c = shannon_capacity(C64::from(1e-3f64.sqrt()), 10.0, 1e-5).map_err(|e| e.to_string())?;
    let expected = 1001f64.log2();
    if (c - expected).abs() > 1e-10 {
        return Err(format!("C = {c}, expected {expected}"));
    }
    Ok(format!("{} sorted samples strictly increasing; C(|h|^2 = 1e-3) = {c:.10}", gains.len()))
}

fn criterion_11() -> Outcome {
    let a = cmd_verify(0, 20, None).map_err(|e| e.to_string())?;
    let b = cmd_verify(0, 20, None).map_err(|e| e.to_string())?;
    let c = cmd_verify(0, 20, Some(2)).map_err(|e| e.to_string())?;
    let (a, b, c) = (a.to_csv(), b.to_csv(), c.to_csv());
    if a != b || a != c {
        return Err("verification CSV differs between runs".into());
    }
    Ok(format!("{} bytes identical across three runs", a.len()))
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    })
}

fn main() -> ExitCode {
    let mut log = SolveLog::default();
    let (c1, c2) = catch_unwind(AssertUnwindSafe(|| criterion_1_and_2(&mut log)))
        .unwrap_or_else(|_| (Err("panicked".into()), Err("panicked".into())));
    let c3 = guarded(|| criterion_3(&mut log));
    let results = [
        (1, "relaxation validity", c1),
        (2, "bound hierarchy", c2),
        (3, "gauge invariance of the relaxation", c3),
        (4, "lifted matrix identities", guarded(criterion_4)),
        (5, "IBD achievability", guarded(criterion_5)),
        (6, "operational gauge equivalence", guarded(criterion_6)),
        (7, "Woodbury exactness", guarded(criterion_7)),
        (8, "SDP solver correctness", guarded(|| criterion_8(&log))),
        (9, "rank-one exactness of P-SDR", guarded(criterion_9)),
        (10, "capacity mapping", guarded(criterion_10)),
        (11, "determinism of verify", guarded(criterion_11)),
    ];
    let mut failed = 0;
    for (k, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS criterion {k:>2} ({name}): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {k:>2} ({name}): {detail}");
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
