//! Reparametrizations of the model that leave every realizable channel
//! unchanged, applied in the fixed order diagonal similarity, complex
//! scaling, Mobius.

use serde::Serialize;

use crate::linalg::Factored;
use crate::model::ModelParameters;
use crate::{CMatrix, CVector, Error, GaugeStage, Result, C64};

/// Inverses formed inside a gauge must have condition number at most this.
pub const MOBIUS_CONDITION_CAP: f64 = 1e10;
/// `|1 - m^* rho|` below this counts as the forbidden pole.
const POLE_TOL: f64 = 1e-12;

/// Gauge parameters `(d, c, m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeParameters {
    pub d: CVector,
    pub c: C64,
    pub m: C64,
}

impl GaugeParameters {
    pub fn identity(n_s: usize) -> Self {
        Self {
            d: CVector::from_element(n_s, C64::from(1.0)),
            c: C64::from(1.0),
            m: C64::from(0.0),
        }
    }
}

/// `(rho - m) / (1 - m^* rho)`.
pub fn mobius_map(rho: C64, m: C64) -> C64 {
    (rho - m) / (C64::from(1.0) - m.conj() * rho)
}

/// `a' -> a' D^{-1}`, `b -> D b`, `Gamma -> D Gamma D^{-1}`.
pub fn apply_diagonal_similarity(theta: &ModelParameters, d: &CVector) -> Result<ModelParameters> {
    let n = theta.n_s();
    if d.len() != n {
        return Err(Error::DimensionMismatch {
            field: "d",
            expected: n,
            got: d.len(),
        });
    }
    if let Some(i) = d.iter().position(|z| *z == C64::from(0.0)) {
        return Err(Error::ZeroGaugeEntry { which: format!("d[{i}]") });
    }
    let a = theta.a().component_div(d);
    let b = theta.b().component_mul(d);
    let gamma = CMatrix::from_fn(n, n, |i, j| d[i] * theta.gamma()[(i, j)] / d[j]);
    ModelParameters::new(theta.alpha(), theta.beta(), theta.h0(), a, b, gamma)
}

/// `alpha, beta -> c alpha, c beta`, `a -> a / c`, `Gamma -> Gamma / c`.
pub fn apply_complex_scaling(theta: &ModelParameters, c: C64) -> Result<ModelParameters> {
    if c == C64::from(0.0) {
        return Err(Error::ZeroGaugeEntry { which: "c".into() });
    }
    ModelParameters::new(
        theta.alpha() * c,
        theta.beta() * c,
        theta.h0(),
        theta.a().map(|z| z / c),
        theta.b().clone(),
        theta.gamma().map(|z| z / c),
    )
}

fn mobius_preconditions(theta: &ModelParameters, m: C64) -> Result<Factored> {
    let modulus = m.norm();
    if !(modulus < 1.0) {
        return Err(Error::NonContractiveM { modulus });
    }
    for (which, rho) in [("alpha", theta.alpha()), ("beta", theta.beta())] {
        if (C64::from(1.0) - m.conj() * rho).norm() < POLE_TOL {
            return Err(Error::ForbiddenPole { which });
        }
    }
    let n = theta.n_s();
    Factored::new(CMatrix::identity(n, n) - theta.gamma() * m, MOBIUS_CONDITION_CAP)
        .map_err(|condition| Error::IllConditionedMobius { condition })
}

/// Mobius gauge with `F = (I - m Gamma)^{-1}` and `k = sqrt(1 - |m|^2)`:
/// `h0 -> h0 + m a'F b`, `a' -> k a'F`, `b -> k F b`, `Gamma -> (Gamma - m^* I) F`,
/// and both loads mapped through [`mobius_map`].
pub fn apply_mobius(theta: &ModelParameters, m: C64) -> Result<ModelParameters> {
    let f = mobius_preconditions(theta, m)?.inverse;
    let n = theta.n_s();
    let k = C64::from((1.0 - m.norm_sqr()).sqrt());
    let fb = &f * theta.b();
    let h0 = theta.h0() + m * theta.a().dot(&fb);
    let a = (f.transpose() * theta.a()) * k;
    let b = fb * k;
    let gamma = (theta.gamma() - CMatrix::identity(n, n) * m.conj()) * &f;
    ModelParameters::new(
        mobius_map(theta.alpha(), m),
        mobius_map(theta.beta(), m),
        h0,
        a,
        b,
        gamma,
    )
}

/// Composite gauge: diagonal similarity, then complex scaling, then Mobius.
/// Each stage must be admissible on its partially transformed input.
pub fn apply_gauge(theta: &ModelParameters, phi: &GaugeParameters) -> Result<ModelParameters> {
    let stage = |stage: GaugeStage| move |e: Error| Error::GaugeStage { stage, source: Box::new(e) };
    let t = apply_diagonal_similarity(theta, &phi.d).map_err(stage(GaugeStage::DiagonalSimilarity))?;
    let t = apply_complex_scaling(&t, phi.c).map_err(stage(GaugeStage::ComplexScaling))?;
    apply_mobius(&t, phi.m).map_err(stage(GaugeStage::Mobius))
}

/// Status of every gauge precondition, evaluated stage by stage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaugeDiagnostics {
    /// Indices `i` with `d_i = 0`.
    pub zero_d_entries: Vec<usize>,
    pub dimension_ok: bool,
    pub zero_c: bool,
    pub m_modulus: f64,
    pub non_contractive_m: bool,
    pub forbidden_pole_alpha: bool,
    pub forbidden_pole_beta: bool,
    /// 1-norm condition number of `I - m Gamma` at the Mobius stage input.
    pub mobius_condition: f64,
    pub ill_conditioned_mobius: bool,
}

impl GaugeDiagnostics {
    pub fn admissible(&self) -> bool {
        self.dimension_ok
            && self.zero_d_entries.is_empty()
            && !self.zero_c
            && !self.non_contractive_m
            && !self.forbidden_pole_alpha
            && !self.forbidden_pole_beta
            && !self.ill_conditioned_mobius
    }
}

pub fn gauge_admissible(theta: &ModelParameters, phi: &GaugeParameters) -> GaugeDiagnostics {
    let n = theta.n_s();
    let dimension_ok = phi.d.len() == n;
    let zero_d_entries: Vec<usize> = phi
        .d
        .iter()
        .enumerate()
        .filter_map(|(i, z)| (*z == C64::from(0.0)).then_some(i))
        .collect();
    let zero_c = phi.c == C64::from(0.0);
    // later stages are judged on the furthest transformation that succeeds
    let mut stage_input = theta.clone();
    if let Ok(t) = apply_diagonal_similarity(&stage_input, &phi.d) {
        stage_input = t;
    }
    if let Ok(t) = apply_complex_scaling(&stage_input, phi.c) {
        stage_input = t;
    }
    let m = phi.m;
    let pole = |rho: C64| (C64::from(1.0) - m.conj() * rho).norm() < POLE_TOL;
    let a = CMatrix::identity(n, n) - stage_input.gamma() * m;
    let mobius_condition = match Factored::new(a, f64::INFINITY) {
        Ok(f) => f.condition,
        Err(c) => c,
    };
    GaugeDiagnostics {
        zero_d_entries,
        dimension_ok,
        zero_c,
        m_modulus: m.norm(),
        non_contractive_m: !(m.norm() < 1.0),
        forbidden_pole_alpha: pole(stage_input.alpha()),
        forbidden_pole_beta: pole(stage_input.beta()),
        mobius_condition,
        ill_conditioned_mobius: !(mobius_condition <= MOBIUS_CONDITION_CAP),
    }
}
