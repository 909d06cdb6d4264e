//! Property suite behind `risbound verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use risbound_core::bounds::{ibd_achiever, ibd_bound, ni_bound, nio_bound, NioOptions};
use risbound_core::channel::channel_for;
use risbound_core::gauge::{apply_gauge, gauge_admissible, GaugeParameters};
use risbound_core::optimizers::exhaustive_search;
use risbound_core::scenario::{generate_scenario, DirectPath, LoadSet, ScenarioSpec};
use risbound_core::sdr::{gauge_identity_check, sdr_bound, SingleGauge};
use risbound_core::{channel_gain_full, CMatrix, CVector, ControlVector, ModelParameters, C64};
use risbound_sdp::SolverOptions;

use crate::error::{CliResult, EXIT_CHECK_FAILED, EXIT_NUMERICAL, EXIT_OK};
use crate::report::write_csv;
use crate::run::with_jobs;

pub const VERIFY_HEADER: [&str; 9] = ["scenario", "n_s", "load_set", "check", "value", "tolerance", "pass", "note", "seed"];

pub const SDR_SLACK_REL: f64 = 1e-6;
pub const SDR_SLACK_ABS: f64 = 1e-9;
pub const IBD_SLACK_REL: f64 = 1e-8;
pub const HIERARCHY_TOL: f64 = 1e-12;
pub const GAUGE_INVARIANCE_TOL: f64 = 1e-5;
pub const IDENTITY_TOL: f64 = 1e-9;
pub const CHANNEL_EQUIVALENCE_TOL: f64 = 1e-10;
pub const UNITARITY_TOL: f64 = 1e-10;
pub const ATTAINMENT_TOL: f64 = 1e-8;
const GAUGE_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub scenario: String,
    pub n_s: usize,
    pub load_set: &'static str,
    pub check: &'static str,
    /// The checked quantity; `None` when it could not be computed.
    pub value: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub note: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOutcome {
    pub checks: Vec<Check>,
}

impl VerifyOutcome {
    pub fn errors(&self) -> usize {
        self.checks.iter().filter(|c| c.value.is_none()).count()
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }

    pub fn exit_code(&self) -> i32 {
        if self.errors() > 0 {
            EXIT_NUMERICAL
        } else if self.failures() > 0 {
            EXIT_CHECK_FAILED
        } else {
            EXIT_OK
        }
    }

    pub fn to_csv(&self) -> String {
        let rows = self
            .checks
            .iter()
            .map(|c| {
                [
                    c.scenario.clone(),
                    c.n_s.to_string(),
                    c.load_set.to_string(),
                    c.check.to_string(),
                    c.value.map(|v| format!("{v:e}")).unwrap_or_default(),
                    format!("{:e}", c.tolerance),
                    c.pass.to_string(),
                    c.note.clone(),
                    c.seed.to_string(),
                ]
            })
            .collect();
        write_csv(&VERIFY_HEADER, rows)
    }
}

/// Scenario `index` of a verification run seeded with `seed`.
pub fn verify_spec(seed: u64, index: usize) -> ScenarioSpec {
    let mut spec = ScenarioSpec::new(2 + index % 5, seed.wrapping_add(index as u64));
    spec.loads = LoadSet::ALL[index % 3];
    spec.reciprocal = index.is_multiple_of(2);
    if index % 4 == 3 {
        spec.direct_path = DirectPath::Zero;
    }
    spec
}

/// A random gauge with `|d_i|, |c|` in `[0.5, 2]`, uniform phases and
/// `|m| <= 0.4`, redrawn until admissible.
pub fn random_admissible_gauge(theta: &ModelParameters, seed: u64) -> Option<GaugeParameters> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = theta.n_s();
    let unit = |rng: &mut ChaCha8Rng| {
        C64::from_polar(rng.random_range(0.5..2.0), rng.random_range(0.0..std::f64::consts::TAU))
    };
    for _ in 0..GAUGE_ATTEMPTS {
        let d = CVector::from_fn(n, |_, _| unit(&mut rng));
        let c = unit(&mut rng);
        let m = C64::from_polar(rng.random_range(0.0..0.4), rng.random_range(0.0..std::f64::consts::TAU));
        let phi = GaugeParameters { d, c, m };
        if gauge_admissible(theta, &phi).admissible() {
            return Some(phi);
        }
    }
    None
}

/// Runs the property suite on `count` scenarios. Scenarios run concurrently;
/// checks are reported in scenario order.
pub fn cmd_verify(seed: u64, count: usize, jobs: Option<usize>) -> CliResult<VerifyOutcome> {
    let per_scenario = with_jobs(jobs, || {
        (0..count)
            .into_par_iter()
            .map(|i| verify_scenario(seed, i))
            .collect::<Vec<_>>()
    })?;
    Ok(VerifyOutcome {
        checks: per_scenario.into_iter().flatten().collect(),
    })
}

struct Recorder {
    scenario: String,
    n_s: usize,
    load_set: &'static str,
    seed: u64,
    checks: Vec<Check>,
}

impl Recorder {
    fn push(&mut self, check: &'static str, value: f64, tolerance: f64, pass: bool) {
        self.checks.push(Check {
            scenario: self.scenario.clone(),
            n_s: self.n_s,
            load_set: self.load_set,
            check,
            value: Some(value),
            tolerance,
            pass,
            note: String::new(),
            seed: self.seed,
        });
    }

    fn error(&mut self, check: &'static str, tolerance: f64, note: impl ToString) {
        self.checks.push(Check {
            scenario: self.scenario.clone(),
            n_s: self.n_s,
            load_set: self.load_set,
            check,
            value: None,
            tolerance,
            pass: false,
            note: note.to_string(),
            seed: self.seed,
        });
    }

    /// Records `value <= bound (1 + rel) + abs` as the relative excess.
    fn dominated(&mut self, check: &'static str, value: f64, bound: f64, rel: f64, abs: f64) {
        let excess = (value - bound) / bound.abs().max(f64::MIN_POSITIVE);
        self.push(check, excess, rel, value <= bound * (1.0 + rel) + abs);
    }
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn verify_scenario(seed: u64, index: usize) -> Vec<Check> {
    let spec = verify_spec(seed, index);
    let mut rec = Recorder {
        scenario: format!("verify-{index:03}"),
        n_s: spec.n_s,
        load_set: spec.loads.name.as_str(),
        seed: spec.seed,
        checks: Vec::new(),
    };
    let theta = match generate_scenario(&spec) {
        Ok(t) => t,
        Err(e) => {
            rec.error("generate", 0.0, e);
            return rec.checks;
        }
    };
    let n = theta.n_s();
    let solver = SolverOptions::default();

    let es = match exhaustive_search(&theta) {
        Ok(r) => r.gain,
        Err(e) => {
            rec.error("exhaustive_search", 0.0, e);
            return rec.checks;
        }
    };

    let sdr = sdr_bound(&theta, &solver);
    match &sdr {
        Ok(s) => rec.dominated("es_le_sdr", es, s.bound, SDR_SLACK_REL, SDR_SLACK_ABS),
        Err(e) => rec.error("es_le_sdr", SDR_SLACK_REL, e),
    }

    if spec.loads.is_unit_modulus(0.0) {
        match ibd_bound(&theta) {
            Ok((r, _)) => {
                let ibd = r.value.expect("valid report");
                rec.dominated("es_le_ibd", es, ibd, IBD_SLACK_REL, 0.0);
                match ibd_achiever(&theta) {
                    Ok(ach) => {
                        let unitarity = (ach.phi.adjoint() * &ach.phi - CMatrix::identity(n, n)).norm() / n as f64;
                        rec.push("ibd_unitarity", unitarity, UNITARITY_TOL, unitarity <= UNITARITY_TOL);
                        match channel_gain_full(&theta, &ach.phi) {
                            Ok(h) => {
                                let dev = relative(h.norm_sqr(), ibd);
                                rec.push("ibd_attained", dev, ATTAINMENT_TOL, dev <= ATTAINMENT_TOL);
                            }
                            Err(e) => rec.error("ibd_attained", ATTAINMENT_TOL, e),
                        }
                    }
                    Err(e) => rec.error("ibd_unitarity", UNITARITY_TOL, e),
                }
            }
            Err(e) => rec.error("es_le_ibd", IBD_SLACK_REL, e),
        }
    }

    let ni = ni_bound(&theta);
    let nio = nio_bound(
        &theta,
        &NioOptions {
            seed: spec.seed,
            ..NioOptions::default()
        },
    );
    if let (Some(ni), Some(nio)) = (ni.value, nio.value) {
        rec.dominated("es_le_ni", es, ni, HIERARCHY_TOL, 0.0);
        rec.dominated("es_le_nio", es, nio, HIERARCHY_TOL, 0.0);
        rec.dominated("nio_le_ni", nio, ni, HIERARCHY_TOL, 0.0);
    }

    let Some(phi) = random_admissible_gauge(&theta, spec.seed ^ 0x5eed) else {
        rec.error("gauge", 0.0, "no admissible gauge found");
        return rec.checks;
    };
    let gauged = match apply_gauge(&theta, &phi) {
        Ok(g) => g,
        Err(e) => {
            rec.error("gauge", 0.0, e);
            return rec.checks;
        }
    };

    let mut worst = 0.0f64;
    let mut failed = None;
    for k in 0..1u64 << n {
        let v = ControlVector::from_index(n, k);
        match (channel_for(&theta, &v), channel_for(&gauged, &v)) {
            (Ok(h), Ok(g)) => worst = worst.max((h - g).norm()),
            (Err(e), _) | (_, Err(e)) => {
                failed = Some(e);
                break;
            }
        }
    }
    match failed {
        None => rec.push("gauge_channel_equivalence", worst, CHANNEL_EQUIVALENCE_TOL, worst <= CHANNEL_EQUIVALENCE_TOL),
        Some(e) => rec.error("gauge_channel_equivalence", CHANNEL_EQUIVALENCE_TOL, e),
    }

    match (&sdr, sdr_bound(&gauged, &solver)) {
        (Ok(a), Ok(b)) => {
            let dev = relative(a.bound, b.bound);
            rec.push("sdr_gauge_invariance", dev, GAUGE_INVARIANCE_TOL, dev <= GAUGE_INVARIANCE_TOL);
        }
        (Err(e), _) => rec.error("sdr_gauge_invariance", GAUGE_INVARIANCE_TOL, e),
        (_, Err(e)) => rec.error("sdr_gauge_invariance", GAUGE_INVARIANCE_TOL, e),
    }

    let singles = [
        ("identity_diagonal_similarity", SingleGauge::DiagonalSimilarity(phi.d.clone())),
        ("identity_complex_scaling", SingleGauge::ComplexScaling(phi.c)),
        ("identity_mobius", SingleGauge::Mobius(phi.m)),
    ];
    for (name, g) in singles {
        match gauge_identity_check(&theta, &g, spec.seed) {
            Ok(r) => {
                let worst = r.max_relative().max(r.max_matrix_relative());
                rec.push(name, worst, IDENTITY_TOL, worst <= IDENTITY_TOL);
            }
            Err(e) => rec.error(name, IDENTITY_TOL, e),
        }
    }
    rec.checks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specs_cycle_through_load_sets_and_sizes() {
        let names: Vec<_> = (0..3).map(|i| verify_spec(0, i).loads.name.as_str()).collect();
        assert_eq!(names, ["PM", "PIN", "01"]);
        assert_eq!(verify_spec(0, 5).n_s, 2);
        assert_eq!(verify_spec(7, 3).seed, 10);
    }

    #[test]
    fn gauges_are_admissible() {
        let theta = generate_scenario(&verify_spec(0, 1)).unwrap();
        let phi = random_admissible_gauge(&theta, 9).unwrap();
        assert!(gauge_admissible(&theta, &phi).admissible());
        assert!(phi.m.norm() <= 0.4);
    }

    #[test]
    fn small_run_passes() {
        let out = cmd_verify(3, 3, Some(2)).unwrap();
        assert!(out.checks.iter().all(|c| c.pass), "{}", out.to_csv());
        assert_eq!(out.exit_code(), EXIT_OK);
    }
}
