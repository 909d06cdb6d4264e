//! Re-evaluation of the channel after flipping a few bits of a reference
//! configuration.
//!
//! Flipping element `i` changes `Phi` by `delta_i e_i e_i'` with
//! `delta_i = +-(beta - alpha)`, so `I - Phi Gamma` receives a rank-`k` update
//! for `k` flips. With `A = I - Phi_ref Gamma`, `N = Gamma A^{-1}`,
//! `w = A^{-T} a` and `g = Gamma x_ref`, the flipped channel is
//!
//! ```text
//!   h' = h_ref + w_U' D b_U + w_U' K^{-1} D (g_U + N_UU D b_U),   K = I - D N_UU
//! ```
//!
//! which needs only the `k x k` capacitance matrix `K`.

use crate::channel::encode_loads;
use crate::linalg::Factored;
use crate::model::{ControlVector, ModelParameters};
use crate::{CMatrix, CVector, Error, Result, C64, CONDITION_CAP};

/// Reference state for Woodbury re-evaluation around `v_ref`.
#[derive(Debug, Clone)]
pub struct BaselineFactorization {
    v_ref: ControlVector,
    h_ref: C64,
    /// `beta - alpha`; a flip `0 -> 1` adds it, `1 -> 0` subtracts it.
    step: C64,
    w: CVector,
    n: CMatrix,
    g: CVector,
    b: CVector,
}

impl BaselineFactorization {
    pub fn reference(&self) -> &ControlVector {
        &self.v_ref
    }

    pub fn h_ref(&self) -> C64 {
        self.h_ref
    }

    pub fn n_s(&self) -> usize {
        self.v_ref.len()
    }
}

pub fn prepare_baseline(model: &ModelParameters, v_ref: &ControlVector) -> Result<BaselineFactorization> {
    let n = model.n_s();
    if v_ref.len() != n {
        return Err(Error::DimensionMismatch {
            field: "control vector",
            expected: n,
            got: v_ref.len(),
        });
    }
    let rho = encode_loads(v_ref, model.alpha(), model.beta()).0;
    let gamma = model.gamma();
    let mut a = -gamma.clone();
    for (i, mut row) in a.row_iter_mut().enumerate() {
        row *= rho[i];
    }
    for i in 0..n {
        a[(i, i)] += C64::from(1.0);
    }
    let f = Factored::new(a, CONDITION_CAP).map_err(|condition| Error::SingularResolvent { condition })?;
    let x_ref = f.solve(&rho.component_mul(model.b()));
    let h_ref = model.h0() + model.a().dot(&x_ref);
    let w = f.inverse.transpose() * model.a();
    let nmat = gamma * &f.inverse;
    let g = gamma * &x_ref;
    Ok(BaselineFactorization {
        v_ref: v_ref.clone(),
        h_ref,
        step: model.beta() - model.alpha(),
        w,
        n: nmat,
        g,
        b: model.b().clone(),
    })
}

/// Channel at `v_ref` with the bits in `flips` toggled. Duplicate indices are
/// not allowed.
pub fn woodbury_channel(base: &BaselineFactorization, flips: &[usize]) -> Result<C64> {
    let n_s = base.n_s();
    let k = flips.len();
    if k == 0 {
        return Ok(base.h_ref);
    }
    for &i in flips {
        if i >= n_s {
            return Err(Error::FlipOutOfRange { index: i, n_s });
        }
    }
    let delta: Vec<C64> = flips
        .iter()
        .map(|&i| if base.v_ref.get(i) { -base.step } else { base.step })
        .collect();
    // D b_U and g_U + N_UU D b_U
    let db: Vec<C64> = flips.iter().zip(&delta).map(|(&i, &d)| d * base.b[i]).collect();
    let mut rhs = CVector::zeros(k);
    let mut cap = CMatrix::identity(k, k);
    for (r, &i) in flips.iter().enumerate() {
        let mut acc = base.g[i];
        for (c, &j) in flips.iter().enumerate() {
            let nij = base.n[(i, j)];
            acc += nij * db[c];
            cap[(r, c)] -= delta[r] * nij;
        }
        rhs[r] = delta[r] * acc;
    }
    let mut h = base.h_ref;
    for (r, &i) in flips.iter().enumerate() {
        h += base.w[i] * db[r];
    }
    let correction = if k == 1 {
        let kk = cap[(0, 0)];
        if kk.norm() < 1.0 / CONDITION_CAP {
            return Err(Error::SingularUpdate {
                condition: 1.0 / kk.norm(),
            });
        }
        CVector::from_element(1, rhs[0] / kk)
    } else {
        let f = Factored::new(cap, CONDITION_CAP).map_err(|condition| Error::SingularUpdate { condition })?;
        f.solve(&rhs)
    };
    for (r, &i) in flips.iter().enumerate() {
        h += base.w[i] * correction[r];
    }
    Ok(h)
}
