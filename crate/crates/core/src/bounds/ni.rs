use super::{BoundKind, BoundReport};
use crate::linalg::spectral_norm;
use crate::model::ModelParameters;

/// `(|h0| + |a| gamma / (1 - gamma |Gamma|_2) |b|)^2` with
/// `gamma = max(|alpha|, |beta|)`, valid when `gamma |Gamma|_2 < 1`.
pub fn ni_bound(theta: &ModelParameters) -> BoundReport {
    let (value, contraction) = ni_value(theta);
    match value {
        Some(v) => BoundReport::valid(BoundKind::Ni, v),
        None => BoundReport::invalid(BoundKind::Ni, format!("gamma * |Gamma|_2 = {contraction} >= 1")),
    }
    .with("gamma_norm_product", contraction)
}

/// `B_NI` (or `None` if invalid) and the product `gamma |Gamma|_2`.
pub(crate) fn ni_value(theta: &ModelParameters) -> (Option<f64>, f64) {
    let gamma = theta.load_radius();
    let contraction = gamma * spectral_norm(theta.gamma());
    if !(contraction < 1.0) {
        return (None, contraction);
    }
    let amp = gamma / (1.0 - contraction);
    let value = (theta.h0().norm() + theta.a().norm() * amp * theta.b().norm()).powi(2);
    (Some(value), contraction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{CMatrix, CVector, C64};

    fn scalar(gamma: f64) -> ModelParameters {
        ModelParameters::new(
            C64::new(-1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            CVector::from_element(1, C64::new(1.0, 0.0)),
            CVector::from_element(1, C64::new(1.0, 0.0)),
            CMatrix::from_element(1, 1, C64::new(gamma, 0.0)),
        )
        .unwrap()
    }

    #[test]
    fn scalar_examples() {
        assert_eq!(ni_bound(&scalar(0.0)).value, Some(1.0));
        assert!((ni_bound(&scalar(0.5)).value.unwrap() - 4.0).abs() < 1e-14);
        let r = ni_bound(&scalar(1.2));
        assert!(!r.valid && r.value.is_none());
    }
}
