use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{CMatrix, CVector, Error, Result, C64};

/// The parameter set of one scenario: load states, static channel, couplings
/// and the inter-element scattering block.
///
/// No passivity is enforced here; operations that need it check it themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParameters {
    alpha: C64,
    beta: C64,
    h0: C64,
    a: CVector,
    b: CVector,
    gamma: CMatrix,
}

impl ModelParameters {
    pub fn new(alpha: C64, beta: C64, h0: C64, a: CVector, b: CVector, gamma: CMatrix) -> Result<Self> {
        let n = a.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                field: "b",
                expected: n,
                got: b.len(),
            });
        }
        if gamma.nrows() != n {
            return Err(Error::DimensionMismatch {
                field: "gamma rows",
                expected: n,
                got: gamma.nrows(),
            });
        }
        if gamma.ncols() != n {
            return Err(Error::DimensionMismatch {
                field: "gamma columns",
                expected: n,
                got: gamma.ncols(),
            });
        }
        let finite = |z: &C64| z.re.is_finite() && z.im.is_finite();
        for (field, ok) in [
            ("alpha", finite(&alpha)),
            ("beta", finite(&beta)),
            ("h0", finite(&h0)),
            ("a", a.iter().all(finite)),
            ("b", b.iter().all(finite)),
            ("gamma", gamma.iter().all(finite)),
        ] {
            if !ok {
                return Err(Error::NonFinite { field });
            }
        }
        Ok(Self {
            alpha,
            beta,
            h0,
            a,
            b,
            gamma,
        })
    }

    pub fn n_s(&self) -> usize {
        self.a.len()
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn beta(&self) -> C64 {
        self.beta
    }

    pub fn h0(&self) -> C64 {
        self.h0
    }

    pub fn a(&self) -> &CVector {
        &self.a
    }

    pub fn b(&self) -> &CVector {
        &self.b
    }

    pub fn gamma(&self) -> &CMatrix {
        &self.gamma
    }

    /// Same scattering data with a different pair of load states.
    pub fn with_loads(&self, alpha: C64, beta: C64) -> Result<Self> {
        Self::new(alpha, beta, self.h0, self.a.clone(), self.b.clone(), self.gamma.clone())
    }

    /// `max(|alpha|, |beta|)`.
    pub fn load_radius(&self) -> f64 {
        self.alpha.norm().max(self.beta.norm())
    }
}

/// A binary RIS configuration; bit `i` selects `beta` for element `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ControlVector(Vec<bool>);

impl ControlVector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![false; n])
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    /// Bit `i` of `index` becomes entry `i`.
    pub fn from_index(n: usize, index: u64) -> Self {
        Self((0..n).map(|i| (index >> i) & 1 == 1).collect())
    }

    /// Parses a string of `0`/`1` characters.
    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse {
                    location: "control vector".into(),
                    message: format!("unexpected character {other:?}"),
                }),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }

    pub fn flipped(&self, i: usize) -> Self {
        let mut out = self.clone();
        out.flip(i);
        out
    }

    /// Indices where `self` and `other` differ.
    pub fn diff(&self, other: &Self) -> Vec<usize> {
        self.0
            .iter()
            .zip(&other.0)
            .enumerate()
            .filter_map(|(i, (x, y))| (x != y).then_some(i))
            .collect()
    }
}

impl fmt::Display for ControlVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Per-element load reflection coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadVector(pub CVector);

impl LoadVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn rho(&self) -> &CVector {
        &self.0
    }
}
