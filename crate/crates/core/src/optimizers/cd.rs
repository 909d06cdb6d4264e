use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{beats, OptimizerResult};
use crate::channel::{channel_for, gain_for};
use crate::model::{ControlVector, ModelParameters};
use crate::woodbury::{prepare_baseline, woodbury_channel, BaselineFactorization};
use crate::Result;

/// Random configurations drawn to pick the starting point.
pub const RANDOM_STARTS: usize = 100;

/// Single-bit-flip local search from the best of [`RANDOM_STARTS`] random
/// configurations. Elements are visited in ascending order; the search ends
/// after `n_s` consecutive attempts without improvement.
pub fn coordinate_descent(model: &ModelParameters, seed: u64) -> Result<OptimizerResult> {
    let n = model.n_s();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut evaluations = 0u64;
    let mut current: Option<(ControlVector, f64)> = None;
    for _ in 0..RANDOM_STARTS {
        let v = ControlVector::from_bits((0..n).map(|_| rng.random::<bool>()).collect());
        evaluations += 1;
        let Ok(g) = gain_for(model, &v) else { continue };
        if current.as_ref().is_none_or(|(_, best)| beats(g, *best)) {
            current = Some((v, g));
        }
    }
    let (mut v, mut gain) = match current {
        Some(c) => c,
        None => {
            let v = ControlVector::zeros(n);
            let g = gain_for(model, &v)?;
            (v, g)
        }
    };
    let mut trace = vec![gain];
    let mut base = prepare_baseline(model, &v).ok();
    let mut idle = 0;
    let mut i = 0;
    while idle < n {
        evaluations += 1;
        let candidate = v.flipped(i);
        if let Some(g) = flip_gain(model, base.as_ref(), &candidate, i) {
            if beats(g, gain) {
                v = candidate;
                gain = gain_for(model, &v)?;
                base = prepare_baseline(model, &v).ok();
                idle = 0;
                trace.push(gain);
                i = (i + 1) % n;
                continue;
            }
        }
        idle += 1;
        i = (i + 1) % n;
    }
    Ok(OptimizerResult {
        v,
        gain,
        evaluations,
        trace: Some(trace),
        rng_seed: seed,
        flagged: Vec::new(),
    })
}

fn flip_gain(model: &ModelParameters, base: Option<&BaselineFactorization>, candidate: &ControlVector, i: usize) -> Option<f64> {
    let h = match base {
        Some(b) => woodbury_channel(b, &[i]).or_else(|_| channel_for(model, candidate)),
        None => channel_for(model, candidate),
    };
    h.ok().map(|h| h.norm_sqr())
}
