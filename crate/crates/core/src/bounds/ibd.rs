use super::{BoundKind, BoundReport};
use crate::linalg::{hermitian_eigen, spectral_norm, unitary_completion};
use crate::model::ModelParameters;
use crate::{CMatrix, CVector, Error, Result, C64};

/// Loads count as unit modulus when `||rho| - 1|` is at most this.
pub const UNIT_MODULUS_TOL: f64 = 1e-9;
/// `Gamma` must satisfy `sigma_max(Gamma) < 1 - CONTRACTIVITY_MARGIN`.
const CONTRACTIVITY_MARGIN: f64 = 1e-12;
/// Eigenvalue floor used when forming `Q^{-1/2}`.
const EIGEN_FLOOR: f64 = 1e-14;

/// Ellipsoid data for the unitary-load relaxation.
#[derive(Debug, Clone, PartialEq)]
pub struct IbdIntermediates {
    /// `I - Gamma^H Gamma`.
    pub q: CMatrix,
    /// `Q^{-1} Gamma^H b`.
    pub x0: CVector,
    /// `b^H b + b^H Gamma Q^{-1} Gamma^H b`.
    pub p2: f64,
    /// `h0 + a' x0`.
    pub h_c: C64,
    /// `Q^{-1/2}`.
    pub q_inv_sqrt: CMatrix,
}

/// Largest `|h|^2` over all unitary load networks:
/// `(|h_c| + p sqrt(a' Q^{-1} a^*))^2`.
pub fn ibd_bound(theta: &ModelParameters) -> Result<(BoundReport, IbdIntermediates)> {
    let alpha_abs = theta.alpha().norm();
    let beta_abs = theta.beta().norm();
    if (alpha_abs - 1.0).abs() > UNIT_MODULUS_TOL || (beta_abs - 1.0).abs() > UNIT_MODULUS_TOL {
        return Err(Error::NotUnitModulusLoads { alpha_abs, beta_abs });
    }
    let gamma = theta.gamma();
    let sigma_max = spectral_norm(gamma);
    if !(sigma_max < 1.0 - CONTRACTIVITY_MARGIN) {
        return Err(Error::NotContractive { sigma_max });
    }
    let n = theta.n_s();
    let q = CMatrix::identity(n, n) - gamma.adjoint() * gamma;
    let (lambda, v) = hermitian_eigen(&q);
    let inv = |f: fn(f64) -> f64| {
        let w = CVector::from_iterator(n, lambda.iter().map(|&l| C64::from(f(l.max(EIGEN_FLOOR)))));
        &v * CMatrix::from_diagonal(&w) * v.adjoint()
    };
    let q_inv = inv(|l| 1.0 / l);
    let q_inv_sqrt = inv(|l| 1.0 / l.sqrt());
    let gh_b = gamma.adjoint() * theta.b();
    let x0 = &q_inv * &gh_b;
    let p2 = theta.b().norm_squared() + gh_b.dotc(&x0).re;
    let h_c = theta.h0() + theta.a().dot(&x0);
    let u = &q_inv_sqrt * theta.a().conjugate();
    let value = (h_c.norm() + p2.sqrt() * u.norm()).powi(2);
    let report = BoundReport::valid(BoundKind::Ibd, value)
        .with("sigma_max_gamma", sigma_max)
        .with("p2", p2)
        .with("h_c_abs", h_c.norm())
        .with("q_min_eigenvalue", lambda[0]);
    Ok((
        report,
        IbdIntermediates {
            q,
            x0,
            p2,
            h_c,
            q_inv_sqrt,
        },
    ))
}

/// A unitary load network attaining the IBD bound.
#[derive(Debug, Clone, PartialEq)]
pub struct IbdAchiever {
    pub phi: CMatrix,
    /// The optimal auxiliary vector `x` (so `h = h0 + a' x`).
    pub x: CVector,
    /// Set when `x = 0`; `phi` is then the identity.
    pub degenerate: bool,
}

/// Builds the optimal `x` on the ellipsoid and a unitary `Phi` with
/// `Phi^H x = b + Gamma x`, as `Q_x Q_z^H` from two unitary completions.
pub fn ibd_achiever(theta: &ModelParameters) -> Result<IbdAchiever> {
    let (_, ib) = ibd_bound(theta)?;
    let n = theta.n_s();
    let u = &ib.q_inv_sqrt * theta.a().conjugate();
    let phase = if ib.h_c.norm() > 0.0 {
        C64::from_polar(1.0, ib.h_c.arg())
    } else {
        C64::from(1.0)
    };
    let u_norm = u.norm();
    let y = if u_norm > 0.0 {
        &u * (phase * (ib.p2.sqrt() / u_norm))
    } else {
        CVector::zeros(n)
    };
    let x = &ib.x0 + &ib.q_inv_sqrt * y;
    let z = theta.b() + theta.gamma() * &x;
    if x.norm() == 0.0 || z.norm() == 0.0 {
        return Ok(IbdAchiever {
            phi: CMatrix::identity(n, n),
            x,
            degenerate: true,
        });
    }
    let qx = unitary_completion(&x);
    let qz = unitary_completion(&z);
    Ok(IbdAchiever {
        phi: qx * qz.adjoint(),
        x,
        degenerate: false,
    })
}
