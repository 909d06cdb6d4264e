#![allow(dead_code)]

use risbound_core::channel::gain_for;
use risbound_core::scenario::{generate_scenario, DirectPath, LoadSet, ScenarioSpec};
use risbound_core::{ControlVector, ModelParameters};

/// Naive enumeration with a fresh factorization per configuration.
pub fn brute_force(model: &ModelParameters) -> (ControlVector, f64) {
    let n = model.n_s();
    let mut best = (ControlVector::zeros(n), f64::NEG_INFINITY);
    for idx in 0..(1u64 << n) {
        let v = ControlVector::from_index(n, idx);
        let g = gain_for(model, &v).unwrap();
        if g > best.1 * (1.0 + 1e-12) || (g >= best.1 * (1.0 - 1e-12) && v < best.0) {
            best = (v, g);
        }
    }
    best
}

pub fn scenario(n_s: usize, seed: u64, loads: LoadSet) -> ModelParameters {
    let spec = ScenarioSpec {
        loads,
        reciprocal: seed.is_multiple_of(2),
        direct_path: if seed.is_multiple_of(3) { DirectPath::Zero } else { DirectPath::Random },
        ..ScenarioSpec::new(n_s, seed)
    };
    generate_scenario(&spec).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use risbound_core::gauge::GaugeParameters;
use risbound_core::{CVector, C64};

/// `|d_i|, |c| in [0.5, 2]` with uniform phases and `|m| <= 0.4`.
pub fn random_gauge(n_s: usize, seed: u64) -> GaugeParameters {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let mut polar = |lo: f64, hi: f64| {
        let r: f64 = rng.random_range(lo..hi);
        let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        C64::from_polar(r, t)
    };
    let d = CVector::from_fn(n_s, |_, _| polar(0.5, 2.0));
    let c = polar(0.5, 2.0);
    let m = polar(0.0, 0.4);
    GaugeParameters { d, c, m }
}
