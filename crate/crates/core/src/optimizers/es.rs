use rayon::prelude::*;

use super::{beats, OptimizerResult};
use crate::channel::{channel_for, gain_for};
use crate::model::{ControlVector, ModelParameters};
use crate::woodbury::{prepare_baseline, woodbury_channel};
use crate::{Error, Result};

/// Default largest `n_s` accepted by [`exhaustive_search`].
pub const ES_CAP: usize = 24;
/// Each worker enumerates the low `CHUNK_BITS` bits in Gray order around its
/// own baseline.
const CHUNK_BITS: usize = 8;

pub fn exhaustive_search(model: &ModelParameters) -> Result<OptimizerResult> {
    exhaustive_search_capped(model, ES_CAP)
}

/// Global maximizer of `|h(v)|^2` over all `2^n_s` configurations; ties go to
/// the lexicographically smallest `v`.
pub fn exhaustive_search_capped(model: &ModelParameters, cap: usize) -> Result<OptimizerResult> {
    let n = model.n_s();
    if n > cap || n >= 64 {
        return Err(Error::TooLarge { n_s: n, cap });
    }
    let low = CHUNK_BITS.min(n);
    let chunks: u64 = 1 << (n - low);
    let best = (0..chunks)
        .into_par_iter()
        .map(|chunk| search_chunk(model, chunk << low, low))
        .reduce(|| None, merge);
    let Some(best) = best else {
        return Err(Error::SingularResolvent { condition: f64::INFINITY });
    };
    let gain = gain_for(model, &best.v)?;
    Ok(OptimizerResult {
        v: best.v,
        gain,
        evaluations: 1 << n,
        trace: None,
        rng_seed: 0,
        flagged: Vec::new(),
    })
}

struct Candidate {
    v: ControlVector,
    gain: f64,
}

fn merge(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
    match (a, b) {
        (Some(a), Some(b)) => Some(pick(a, b)),
        (a, None) => a,
        (None, b) => b,
    }
}

fn pick(a: Candidate, b: Candidate) -> Candidate {
    if beats(a.gain, b.gain) {
        a
    } else if beats(b.gain, a.gain) {
        b
    } else if a.v <= b.v {
        a
    } else {
        b
    }
}

/// Enumerates `base | gray(j)` for `j < 2^low`.
fn search_chunk(model: &ModelParameters, base: u64, low: usize) -> Option<Candidate> {
    let n = model.n_s();
    let v0 = ControlVector::from_index(n, base);
    let baseline = prepare_baseline(model, &v0).ok();
    let mut best: Option<Candidate> = None;
    let mut flips = Vec::with_capacity(low);
    for j in 0u64..(1 << low) {
        let gray = j ^ (j >> 1);
        flips.clear();
        flips.extend((0..low).filter(|&i| (gray >> i) & 1 == 1));
        let v = ControlVector::from_index(n, base | gray);
        let h = match &baseline {
            Some(b) => woodbury_channel(b, &flips).or_else(|_| channel_for(model, &v)),
            None => channel_for(model, &v),
        };
        let Ok(h) = h else { continue };
        let cand = Candidate { v, gain: h.norm_sqr() };
        best = Some(match best {
            Some(cur) => pick(cur, cand),
            None => cand,
        });
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{CMatrix, CVector, C64};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn symmetric_single_element_tie() {
        let m = ModelParameters::new(
            c(-1.0),
            c(1.0),
            c(0.0),
            CVector::from_element(1, c(1.0)),
            CVector::from_element(1, c(1.0)),
            CMatrix::zeros(1, 1),
        )
        .unwrap();
        let r = exhaustive_search(&m).unwrap();
        assert_eq!(r.v, ControlVector::parse("0").unwrap());
        assert!((r.gain - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_element_sum() {
        let m = ModelParameters::new(
            c(0.0),
            c(1.0),
            c(1.0),
            CVector::from_element(2, c(1.0)),
            CVector::from_element(2, c(1.0)),
            CMatrix::zeros(2, 2),
        )
        .unwrap();
        let r = exhaustive_search(&m).unwrap();
        assert_eq!(r.v, ControlVector::parse("11").unwrap());
        assert!((r.gain - 9.0).abs() < 1e-14);
        assert_eq!(r.evaluations, 4);
    }

    #[test]
    fn cap_is_enforced() {
        let m = ModelParameters::new(
            c(0.0),
            c(1.0),
            c(1.0),
            CVector::from_element(3, c(1.0)),
            CVector::from_element(3, c(1.0)),
            CMatrix::zeros(3, 3),
        )
        .unwrap();
        assert!(matches!(exhaustive_search_capped(&m, 2), Err(Error::TooLarge { n_s: 3, cap: 2 })));
    }
}
