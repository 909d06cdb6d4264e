use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use risbound_core::bounds::{ibd_bound, ni_bound, nio_bound, BoundKind, BoundReport, NioOptions};
use risbound_core::io::save_model;
use risbound_core::optimizers::{coordinate_descent, exhaustive_search, genetic_algorithm, project_sdr, OptimizerResult};
use risbound_core::scenario::{generate_scenario, ScenarioSpec};
use risbound_core::sdr::{sdr_bound, SdrSolution};
use risbound_core::{reduce_model, shannon_capacity, Error, FixedState, ModelParameters, C64};

use crate::config::{Method, RunConfig};
use crate::error::{CliError, CliResult};
use crate::report::{BoundEntry, OptimizerEntry, Point, Report, NOT_APPLICABLE};

/// Runs `f` inside a pool of `jobs` threads, or the global pool.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Config(format!("cannot start {n} worker threads: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

pub fn cmd_gen(spec: &ScenarioSpec, out: &Path) -> CliResult<ModelParameters> {
    spec.validate()?;
    let model = generate_scenario(spec)?;
    save_model(&model, out)?;
    Ok(model)
}

pub fn cmd_bound(cfg: &RunConfig) -> CliResult<Report> {
    let cfg = RunConfig {
        methods: Vec::new(),
        ns: Vec::new(),
        ..cfg.clone()
    };
    run(&cfg)
}

pub fn cmd_optimize(cfg: &RunConfig) -> CliResult<Report> {
    let cfg = RunConfig {
        bounds: Vec::new(),
        ns: Vec::new(),
        ..cfg.clone()
    };
    run(&cfg)
}

/// One point per `n_s` in `cfg.ns`, each on the model reduced to its first
/// `n_s` elements with the rest held at `alpha`.
pub fn cmd_sweep(cfg: &RunConfig) -> CliResult<Report> {
    if cfg.ns.is_empty() {
        return Err(CliError::Config("sweep needs at least one --ns value".into()));
    }
    run(cfg)
}

fn run(cfg: &RunConfig) -> CliResult<Report> {
    let model = cfg.resolve()?;
    let sizes = if cfg.ns.is_empty() { vec![model.n_s()] } else { cfg.ns.clone() };
    let evaluated = with_jobs(cfg.jobs, || {
        sizes
            .par_iter()
            .map(|&n| -> CliResult<(Point, Vec<String>)> {
                let active: Vec<usize> = (0..n).collect();
                let reduced = reduce_model(&model, &active, FixedState::Alpha)?;
                Ok(evaluate_point(&reduced, cfg))
            })
            .collect::<CliResult<Vec<_>>>()
    })??;
    let mut points = Vec::new();
    let mut failures = Vec::new();
    for (p, f) in evaluated {
        failures.extend(f.into_iter().map(|m| format!("n_s={}: {m}", p.n_s)));
        points.push(p);
    }
    Ok(Report {
        scenario: cfg.source.label(),
        load_set: cfg.load_set_name(&model),
        seed: cfg.seed,
        p_t_mw: cfg.capacity.p_t_mw,
        sigma2_mw: cfg.capacity.sigma2_mw,
        points,
        failures,
    })
}

fn timed<T>(on: bool, f: impl FnOnce() -> T) -> (T, Option<f64>) {
    let t = Instant::now();
    let out = f();
    (out, on.then(|| t.elapsed().as_secs_f64() * 1e3))
}

fn capacity(gain: f64, cfg: &RunConfig) -> f64 {
    shannon_capacity(C64::from(gain.max(0.0).sqrt()), cfg.capacity.p_t_mw, cfg.capacity.sigma2_mw)
        .expect("powers validated in resolve")
}

/// Computes the selected bounds and optimizers on one model. The second
/// element lists computations that failed outright.
pub fn evaluate_point(model: &ModelParameters, cfg: &RunConfig) -> (Point, Vec<String>) {
    let mut failures = Vec::new();
    let needs_sdr = cfg.bounds.contains(&BoundKind::Sdr) || cfg.methods.contains(&Method::Psdr);
    let (sdr, sdr_ms) = timed(cfg.timing, || needs_sdr.then(|| sdr_bound(model, &cfg.solver)));

    let mut bounds = Vec::new();
    for &kind in &cfg.bounds {
        let (report, runtime_ms) = match kind {
            BoundKind::Ni => timed(cfg.timing, || ni_bound(model)),
            BoundKind::Nio => {
                let opts = NioOptions {
                    seed: cfg.seed,
                    ..cfg.nio.clone()
                };
                timed(cfg.timing, || nio_bound(model, &opts))
            }
            BoundKind::Ibd => timed(cfg.timing, || ibd_report(model, &mut failures)),
            BoundKind::Sdr => (sdr_report(sdr.as_ref().expect("solved above"), &mut failures), sdr_ms),
        };
        let capacity_bps_hz = report.value.map(|v| capacity(v, cfg));
        bounds.push(BoundEntry {
            report,
            capacity_bps_hz,
            runtime_ms,
        });
    }

    let mut optimizers = Vec::new();
    for &method in &cfg.methods {
        let (result, runtime_ms) = timed(cfg.timing, || -> Result<OptimizerResult, String> {
            let out = match method {
                Method::Es => exhaustive_search(model),
                Method::Cd => coordinate_descent(model, cfg.seed),
                Method::Ga => Ok(genetic_algorithm(model, cfg.seed, &cfg.ga)),
                // an unconverged relaxation still yields a feasible rounding
                Method::Psdr => match sdr.as_ref().expect("solved above") {
                    Ok(s) => project_sdr(model, &s.x_check),
                    Err(Error::SolverNotConverged { solution, .. }) => project_sdr(model, &solution.x_check),
                    Err(e) => return Err(format!("relaxation failed: {e}")),
                },
            };
            out.map_err(|e| e.to_string())
        });
        let runtime_ms = match method {
            Method::Psdr => runtime_ms.zip(sdr_ms).map(|(a, b)| a + b),
            _ => runtime_ms,
        };
        match result {
            Ok(result) => optimizers.push(OptimizerEntry {
                method,
                capacity_bps_hz: capacity(result.gain, cfg),
                result,
                runtime_ms,
            }),
            Err(e) => failures.push(format!("{}: {e}", method.name())),
        }
    }
    (
        Point {
            n_s: model.n_s(),
            bounds,
            optimizers,
        },
        failures,
    )
}

fn ibd_report(model: &ModelParameters, failures: &mut Vec<String>) -> BoundReport {
    match ibd_bound(model) {
        Ok((report, _)) => report,
        Err(Error::NotUnitModulusLoads { alpha_abs, beta_abs }) => {
            BoundReport::invalid(BoundKind::Ibd, "N/A: loads are not unit modulus")
                .with(NOT_APPLICABLE, true)
                .with("alpha_abs", alpha_abs)
                .with("beta_abs", beta_abs)
        }
        Err(Error::NotContractive { sigma_max }) => {
            BoundReport::invalid(BoundKind::Ibd, "Gamma is not contractive").with("sigma_max_gamma", sigma_max)
        }
        Err(e) => {
            failures.push(format!("IBD: {e}"));
            BoundReport::invalid(BoundKind::Ibd, e.to_string())
        }
    }
}

fn sdr_diagnostics(report: BoundReport, s: &SdrSolution) -> BoundReport {
    report
        .with("dual_bound", s.dual_bound)
        .with("effective_rank", s.effective_rank)
        .with("lifted_effective_rank", s.lifted_effective_rank)
        .with("primal_residual", s.residuals.primal)
        .with("gap", s.residuals.gap)
        .with("min_eigenvalue", s.residuals.min_eigenvalue)
        .with("iterations", s.iterations)
        .with("polished", s.polished)
}

fn sdr_report(sdr: &Result<SdrSolution, Error>, failures: &mut Vec<String>) -> BoundReport {
    match sdr {
        Ok(s) => sdr_diagnostics(BoundReport::valid(BoundKind::Sdr, s.bound), s),
        Err(e) => {
            failures.push(format!("SDR: {e}"));
            let report = BoundReport::invalid(BoundKind::Sdr, e.to_string());
            match e {
                Error::SolverNotConverged { solution, .. } => {
                    sdr_diagnostics(report.with("uncertified_bound", solution.bound), solution)
                }
                _ => report,
            }
        }
    }
}
