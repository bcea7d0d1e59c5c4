//! Block structure of the pseudo-Euclidean metric `diag(-1,…,-1, +1,…,+1)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SignatureError {
    #[error("signature ({0},{1}) invalid: both blocks must have dimension >= 2")]
    BlockTooSmall(usize, usize),
    #[error("cannot parse signature {0:?}: expected \"N,M\"")]
    Parse(String),
    #[error("vector blocks have lengths ({got_prime},{got_dprime}), signature needs ({want_prime},{want_dprime})")]
    LengthMismatch {
        got_prime: usize,
        got_dprime: usize,
        want_prime: usize,
        want_dprime: usize,
    },
}

/// The pair `(n', n'')` with `n', n'' >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    n_prime: usize,
    n_dprime: usize,
}

impl Signature {
    pub fn new(n_prime: usize, n_dprime: usize) -> Result<Self, SignatureError> {
        if n_prime < 2 || n_dprime < 2 {
            return Err(SignatureError::BlockTooSmall(n_prime, n_dprime));
        }
        Ok(Self { n_prime, n_dprime })
    }

    pub fn n_prime(&self) -> usize {
        self.n_prime
    }

    pub fn n_dprime(&self) -> usize {
        self.n_dprime
    }

    /// Total dimension `n = n' + n''`.
    pub fn dim(&self) -> usize {
        self.n_prime + self.n_dprime
    }

    /// `(n'', n')`.
    pub fn swapped(&self) -> Self {
        Self {
            n_prime: self.n_dprime,
            n_dprime: self.n_prime,
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n_prime, self.n_dprime)
    }
}

impl FromStr for Signature {
    type Err = SignatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(SignatureError::Parse(s.to_string()));
        }
        let a = parts[0]
            .parse()
            .map_err(|_| SignatureError::Parse(s.to_string()))?;
        let b = parts[1]
            .parse()
            .map_err(|_| SignatureError::Parse(s.to_string()))?;
        Signature::new(a, b)
    }
}

/// A point or covector of `R^n` kept as its `(x', x'')` blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitVector {
    prime: Vec<f64>,
    dprime: Vec<f64>,
}

impl SplitVector {
    pub fn new(prime: Vec<f64>, dprime: Vec<f64>) -> Self {
        Self { prime, dprime }
    }

    /// Splits a flat vector of length `n` according to `sig`.
    pub fn from_flat(sig: Signature, flat: &[f64]) -> Result<Self, SignatureError> {
        if flat.len() != sig.dim() {
            return Err(SignatureError::LengthMismatch {
                got_prime: flat.len().min(sig.n_prime()),
                got_dprime: flat.len().saturating_sub(sig.n_prime()),
                want_prime: sig.n_prime(),
                want_dprime: sig.n_dprime(),
            });
        }
        let (a, b) = flat.split_at(sig.n_prime());
        Ok(Self::new(a.to_vec(), b.to_vec()))
    }

    pub fn prime(&self) -> &[f64] {
        &self.prime
    }

    pub fn dprime(&self) -> &[f64] {
        &self.dprime
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = self.prime.clone();
        v.extend_from_slice(&self.dprime);
        v
    }

    pub fn norm_prime(&self) -> f64 {
        norm(&self.prime)
    }

    pub fn norm_dprime(&self) -> f64 {
        norm(&self.dprime)
    }

    pub fn norm(&self) -> f64 {
        self.norm_prime().hypot(self.norm_dprime())
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            prime: self.prime.iter().map(|x| a * x).collect(),
            dprime: self.dprime.iter().map(|x| a * x).collect(),
        }
    }

    /// `(x'', x')`, the vector seen from the swapped signature.
    pub fn swapped(&self) -> Self {
        Self {
            prime: self.dprime.clone(),
            dprime: self.prime.clone(),
        }
    }

    pub fn check(&self, sig: Signature) -> Result<(), SignatureError> {
        if self.prime.len() != sig.n_prime() || self.dprime.len() != sig.n_dprime() {
            return Err(SignatureError::LengthMismatch {
                got_prime: self.prime.len(),
                got_dprime: self.dprime.len(),
                want_prime: sig.n_prime(),
                want_dprime: sig.n_dprime(),
            });
        }
        Ok(())
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    // hypot-style scaling keeps tiny and huge vectors finite
    let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    scale * v.iter().map(|x| (x / scale).powi(2)).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
