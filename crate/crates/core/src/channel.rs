use crate::linalg::Factored;
use crate::model::{ControlVector, LoadVector, ModelParameters};
use crate::{CMatrix, CVector, Error, Result, C64, CONDITION_CAP};

/// `r = alpha 1 + (beta - alpha) v`.
pub fn encode_loads(v: &ControlVector, alpha: C64, beta: C64) -> LoadVector {
    LoadVector(CVector::from_iterator(
        v.len(),
        v.bits().iter().map(|&bit| if bit { beta } else { alpha }),
    ))
}

/// `h = h0 + a' (I - diag(r) Gamma)^{-1} diag(r) b`.
pub fn channel_gain(model: &ModelParameters, r: &LoadVector) -> Result<C64> {
    channel_gain_with_cap(model, r, CONDITION_CAP)
}

pub fn channel_gain_with_cap(model: &ModelParameters, r: &LoadVector, cap: f64) -> Result<C64> {
    let n = model.n_s();
    if r.len() != n {
        return Err(Error::DimensionMismatch {
            field: "loads",
            expected: n,
            got: r.len(),
        });
    }
    let rho = r.rho();
    let mut a = -model.gamma().clone();
    for (i, mut row) in a.row_iter_mut().enumerate() {
        row *= rho[i];
    }
    for i in 0..n {
        a[(i, i)] += C64::from(1.0);
    }
    let rhs = rho.component_mul(model.b());
    let f = Factored::new(a, cap).map_err(|condition| Error::SingularResolvent { condition })?;
    Ok(model.h0() + model.a().dot(&f.solve(&rhs)))
}

/// Channel for a configuration, `channel_gain(model, encode_loads(v, alpha, beta))`.
pub fn channel_for(model: &ModelParameters, v: &ControlVector) -> Result<C64> {
    channel_gain(model, &encode_loads(v, model.alpha(), model.beta()))
}

/// `|h(v)|^2`.
pub fn gain_for(model: &ModelParameters, v: &ControlVector) -> Result<f64> {
    channel_for(model, v).map(|h| h.norm_sqr())
}

/// Same channel formula with an arbitrary (non-diagonal) load network `phi`.
pub fn channel_gain_full(model: &ModelParameters, phi: &CMatrix) -> Result<C64> {
    let n = model.n_s();
    if phi.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            field: "phi",
            expected: n,
            got: phi.nrows(),
        });
    }
    let a = CMatrix::identity(n, n) - phi * model.gamma();
    let rhs = phi * model.b();
    let f = Factored::new(a, CONDITION_CAP).map_err(|condition| Error::SingularResolvent { condition })?;
    Ok(model.h0() + model.a().dot(&f.solve(&rhs)))
}

/// Load state held by the inactive elements of a reduced model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedState {
    Alpha,
    Beta,
}

/// Folds the inactive elements (all loads fixed to one state) into an
/// effective model over `active`, in the given order.
pub fn reduce_model(model: &ModelParameters, active: &[usize], fixed_state: FixedState) -> Result<ModelParameters> {
    let n = model.n_s();
    let mut is_active = vec![false; n];
    for &i in active {
        if i >= n {
            return Err(Error::FlipOutOfRange { index: i, n_s: n });
        }
        is_active[i] = true;
    }
    let s1: Vec<usize> = active.to_vec();
    let s2: Vec<usize> = (0..n).filter(|&i| !is_active[i]).collect();
    let rho = match fixed_state {
        FixedState::Alpha => model.alpha(),
        FixedState::Beta => model.beta(),
    };
    let g = model.gamma();
    let a = model.a();
    let b = model.b();
    let g11 = g.select_rows(&s1).select_columns(&s1);
    let a1 = a.select_rows(&s1);
    let b1 = b.select_rows(&s1);
    if s2.is_empty() {
        return ModelParameters::new(model.alpha(), model.beta(), model.h0(), a1, b1, g11);
    }
    let g12 = g.select_rows(&s1).select_columns(&s2);
    let g21 = g.select_rows(&s2).select_columns(&s1);
    let g22 = g.select_rows(&s2).select_columns(&s2);
    let a2 = a.select_rows(&s2);
    let b2 = b.select_rows(&s2);
    let m = s2.len();
    let f = Factored::new(CMatrix::identity(m, m) - &g22 * rho, CONDITION_CAP)
        .map_err(|condition| Error::SingularResolvent { condition })?;
    // (I - Phi2 G22)^{-1} Phi2 applied to G21 and b2
    let k_g21 = &f.inverse * (&g21 * rho);
    let k_b2 = f.solve(&(&b2 * rho));
    let gamma_r = &g11 + &g12 * &k_g21;
    let b_r = &b1 + &g12 * &k_b2;
    let a_r = &a1 + (a2.transpose() * &k_g21).transpose();
    let h0_r = model.h0() + a2.dot(&k_b2);
    ModelParameters::new(model.alpha(), model.beta(), h0_r, a_r, b_r, gamma_r)
}

/// `log2(1 + (p_t / sigma2) |h|^2)` in bit/s/Hz; powers share one unit.
pub fn shannon_capacity(h: C64, p_t: f64, sigma2: f64) -> Result<f64> {
    if !(sigma2 > 0.0) {
        return Err(Error::InvalidNoise(sigma2));
    }
    if !(p_t > 0.0) {
        return Err(Error::InvalidPower(p_t));
    }
    Ok((p_t / sigma2 * h.norm_sqr()).ln_1p() / std::f64::consts::LN_2)
}
