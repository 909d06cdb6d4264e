//! Synthetic passive scenarios and the reference load sets.

use nalgebra::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::model::ModelParameters;
use crate::{CMatrix, CVector, Error, Result, C64};

/// Relative headroom kept below `max_singular_value` after rescaling.
const SCALE_MARGIN: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectPath {
    Zero,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub n_s: usize,
    pub seed: u64,
    /// Largest singular value of the full scattering matrix, in `(0, 1)`.
    pub max_singular_value: f64,
    /// Draw a symmetric scattering matrix.
    pub reciprocal: bool,
    /// Multiplies the off-diagonal entries of the element-to-element block.
    pub coupling_scale: f64,
    pub direct_path: DirectPath,
    pub loads: LoadSet,
}

impl ScenarioSpec {
    pub fn new(n_s: usize, seed: u64) -> Self {
        Self {
            n_s,
            seed,
            max_singular_value: 0.95,
            reciprocal: false,
            coupling_scale: 1.0,
            direct_path: DirectPath::Random,
            loads: LoadSet::PM,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |message: String| {
            Err(Error::Parse {
                location: "scenario spec".into(),
                message,
            })
        };
        if self.n_s == 0 {
            return Err(Error::Empty);
        }
        if !(self.max_singular_value > 0.0 && self.max_singular_value < 1.0) {
            return bad(format!("max_singular_value must lie in (0, 1), got {}", self.max_singular_value));
        }
        if !(self.coupling_scale >= 0.0 && self.coupling_scale.is_finite()) {
            return bad(format!("coupling_scale must be finite and non-negative, got {}", self.coupling_scale));
        }
        Ok(())
    }
}

/// Draws the full `(2 + n_s)`-port scattering matrix. Port 0 is the
/// transmitter, port 1 the receiver and ports `2..` the RIS elements.
pub fn generate_scattering(spec: &ScenarioSpec) -> Result<CMatrix> {
    spec.validate()?;
    let n = spec.n_s + 2;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut s = CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        C64::new(re * scale, im * scale)
    });
    if spec.reciprocal {
        s = (&s + s.transpose()) * C64::from(0.5);
        for i in 0..n {
            for j in 0..i {
                s[(i, j)] = s[(j, i)];
            }
        }
    }
    for i in 2..n {
        for j in 2..n {
            if i != j {
                s[(i, j)] *= spec.coupling_scale;
            }
        }
    }
    if spec.direct_path == DirectPath::Zero {
        s[(1, 0)] = C64::from(0.0);
        if spec.reciprocal {
            s[(0, 1)] = C64::from(0.0);
        }
    }
    let sigma = s.singular_values().max();
    if sigma > 0.0 {
        s *= C64::from(spec.max_singular_value / sigma * (1.0 - SCALE_MARGIN));
    }
    Ok(s)
}

/// `h0 = S[1,0]`, `a_i = S[1, 2+i]`, `b_i = S[2+i, 0]`, `Gamma = S[2.., 2..]`.
pub fn extract_model(s: &CMatrix, loads: LoadSet) -> Result<ModelParameters> {
    let n = s.nrows().saturating_sub(2);
    let a = CVector::from_fn(n, |i, _| s[(1, 2 + i)]);
    let b = CVector::from_fn(n, |i, _| s[(2 + i, 0)]);
    let gamma = s.view((2, 2), (n, n)).into_owned();
    ModelParameters::new(loads.alpha, loads.beta, s[(1, 0)], a, b, gamma)
}

pub fn generate_scenario(spec: &ScenarioSpec) -> Result<ModelParameters> {
    extract_model(&generate_scattering(spec)?, spec.loads)
}

/// A pair of selectable load reflection coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoadSet {
    pub name: LoadSetName,
    #[serde(with = "complex_pair")]
    pub alpha: C64,
    #[serde(with = "complex_pair")]
    pub beta: C64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LoadSetName {
    #[serde(rename = "PM")]
    Pm,
    #[serde(rename = "PIN")]
    Pin,
    #[serde(rename = "01")]
    ZeroOne,
}

impl LoadSetName {
    pub fn as_str(self) -> &'static str {
        match self {
            LoadSetName::Pm => "PM",
            LoadSetName::Pin => "PIN",
            LoadSetName::ZeroOne => "01",
        }
    }
}

impl std::fmt::Display for LoadSetName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl LoadSet {
    /// Short and open circuit.
    pub const PM: LoadSet = LoadSet {
        name: LoadSetName::Pm,
        alpha: Complex { re: -1.0, im: 0.0 },
        beta: Complex { re: 1.0, im: 0.0 },
    };
    /// Two states of a commercial PIN diode.
    #[allow(clippy::approx_constant)]
    pub const PIN: LoadSet = LoadSet {
        name: LoadSetName::Pin,
        alpha: Complex { re: 0.6366, im: -0.7712 },
        beta: Complex { re: -0.8116, im: 0.0 },
    };
    /// Matched load and open circuit.
    pub const ZERO_ONE: LoadSet = LoadSet {
        name: LoadSetName::ZeroOne,
        alpha: Complex { re: 0.0, im: 0.0 },
        beta: Complex { re: 1.0, im: 0.0 },
    };

    pub const ALL: [LoadSet; 3] = [LoadSet::PM, LoadSet::PIN, LoadSet::ZERO_ONE];

    pub fn is_unit_modulus(&self, tol: f64) -> bool {
        (self.alpha.norm() - 1.0).abs() <= tol && (self.beta.norm() - 1.0).abs() <= tol
    }
}

/// Looks up `pm`, `pin` or `01` (case-insensitive).
pub fn load_set(name: &str) -> Result<LoadSet> {
    match name.to_ascii_lowercase().as_str() {
        "pm" => Ok(LoadSet::PM),
        "pin" => Ok(LoadSet::PIN),
        "01" => Ok(LoadSet::ZERO_ONE),
        _ => Err(Error::Parse {
            location: "load set".into(),
            message: format!("unknown load set {name:?}, expected pm, pin or 01"),
        }),
    }
}

pub(crate) mod complex_pair {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::C64;

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(C64::new(re, im))
    }
}

/// Largest singular value, for passivity checks.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// `|S - S'|_F`.
pub fn asymmetry(m: &CMatrix) -> f64 {
    (m - m.transpose()).norm()
}
