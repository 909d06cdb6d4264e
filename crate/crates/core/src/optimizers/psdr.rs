use super::OptimizerResult;
use crate::channel::gain_for;
use crate::model::{ControlVector, ModelParameters};
use crate::{CVector, Error, Result, C64};

/// `false` (alpha) when `rho` is at least as close to `alpha` as to `beta`.
pub fn quantize_load(rho: C64, alpha: C64, beta: C64) -> bool {
    (rho - alpha).norm() > (rho - beta).norm()
}

/// Rounds a relaxed `x` to a configuration through the implied loads
/// `rho_i = x_i / (b_i + (Gamma x)_i)`. Elements with a vanishing denominator
/// are set to `alpha` and listed in `flagged`.
pub fn project_sdr(theta: &ModelParameters, x_check: &CVector) -> Result<OptimizerResult> {
    let n = theta.n_s();
    if x_check.len() != n {
        return Err(Error::DimensionMismatch {
            field: "x_check",
            expected: n,
            got: x_check.len(),
        });
    }
    let den = theta.b() + theta.gamma() * x_check;
    let mut flagged = Vec::new();
    let bits = (0..n)
        .map(|i| {
            let rho = x_check[i] / den[i];
            if den[i].norm() == 0.0 || !rho.re.is_finite() || !rho.im.is_finite() {
                flagged.push(i);
                false
            } else {
                quantize_load(rho, theta.alpha(), theta.beta())
            }
        })
        .collect();
    let v = ControlVector::from_bits(bits);
    let gain = gain_for(theta, &v)?;
    Ok(OptimizerResult {
        v,
        gain,
        evaluations: 1,
        trace: None,
        rng_seed: 0,
        flagged,
    })
}
