//! Conormal symbols of `p` at the light cone.
//!
//! The one-dimensional transforms used throughout follow
//!
//! ```text
//! (x_+^{λ-1})^ = (-i)^λ (λ-1)! ζ^{-λ},                                  λ = 1, 2, ...
//! (x_+^{m-1/2})^ = Γ(m+1/2) (-i)^m e^{-iπ/4} (ζ_+^{-m-1/2} + i(-1)^m ζ_-^{-m-1/2}),
//! ```
//!
//! with `ζ_± ` the positive real powers of `|ζ|` on each half-line and zero
//! on the other. `a_k` is the transform of `x_+^{(k-3)/2}` and the principal
//! symbol of `p` at the cone is `b(ζ) = a_{n'}(ζ) a_{n''}(-ζ)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::multiplier::{q_profile, MultiplierError, MultiplierMethod, Signature};
use crate::specfun;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConormalError {
    #[error("{0}")]
    Domain(String),
    #[error("Puiseux basis is ill-conditioned (condition number {cond:e})")]
    IllConditioned { cond: f64 },
    #[error("no singular term above the noise floor {floor:e} in the fit")]
    NoSingularTerm { floor: f64 },
    #[error("leading fitted exponent {found} does not match the symbol order (expected {expected})")]
    OrderMismatch {
        found: Rational64,
        expected: Rational64,
    },
    #[error(transparent)]
    Multiplier(#[from] MultiplierError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    /// `k` odd: `(k-3)/2` is an integer.
    OddInteger,
    /// `k` even: `(k-3)/2` is a half-integer.
    HalfInteger,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSymbol {
    pub k: usize,
    pub parity: Parity,
}

impl ModelSymbol {
    pub fn new(k: usize) -> Result<Self, ConormalError> {
        if k < 2 {
            return Err(ConormalError::Domain(format!("block dimension {k} < 2")));
        }
        let parity = if k % 2 == 1 {
            Parity::OddInteger
        } else {
            Parity::HalfInteger
        };
        Ok(Self { k, parity })
    }

    /// The exponent `(k-3)/2` of `x_+`.
    pub fn exponent(&self) -> Rational64 {
        Rational64::new(self.k as i64 - 3, 2)
    }

    pub fn eval(&self, zeta: f64) -> Result<Complex64, ConormalError> {
        power_symbol(self.exponent(), zeta)
    }
}

fn neg_i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// Fourier transform of `x_+^α` at `ζ ≠ 0`, for `α` a non-negative integer
/// or a half-integer `>= -1/2`.
pub fn power_symbol(alpha: Rational64, zeta: f64) -> Result<Complex64, ConormalError> {
    if zeta == 0.0 || !zeta.is_finite() {
        return Err(ConormalError::Domain(format!("zeta = {zeta}: need a finite nonzero value")));
    }
    if alpha.is_integer() {
        let a = alpha.to_integer();
        if a < 0 {
            return Err(ConormalError::Domain(format!("exponent {alpha} not supported")));
        }
        let lambda = a + 1;
        let fact = specfun::gamma(lambda as f64);
        return Ok(neg_i_pow(lambda) * fact * zeta.powi(-(lambda as i32)));
    }
    if *alpha.denom() != 2 || alpha < Rational64::new(-1, 2) {
        return Err(ConormalError::Domain(format!("exponent {alpha} not supported")));
    }
    // α = m - 1/2
    let m = (alpha + Rational64::new(1, 2)).to_integer();
    let mf = m as f64;
    let pref = specfun::gamma(mf + 0.5)
        * neg_i_pow(m)
        * Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4);
    let mag = zeta.abs().powf(-mf - 0.5);
    let branch = if zeta > 0.0 {
        Complex64::new(mag, 0.0)
    } else {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        Complex64::new(0.0, sign * mag)
    };
    Ok(pref * branch)
}

/// `a_k(ζ)`, the symbol of `x_+^{(k-3)/2}`.
pub fn a_symbol(k: usize, zeta: f64) -> Result<Complex64, ConormalError> {
    ModelSymbol::new(k)?.eval(zeta)
}

/// `b(ζ) = a_{n'}(ζ) a_{n''}(-ζ)`.
pub fn b_symbol(sig: Signature, zeta: f64) -> Result<Complex64, ConormalError> {
    Ok(a_symbol(sig.n_prime(), zeta)? * a_symbol(sig.n_dprime(), -zeta)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    ZPlus,
    ZMinus,
}

/// One-sided fit `q(z) ≈ Σ c_j |z|^{e_j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PuiseuxFit {
    pub side: Side,
    pub exponents: Vec<Rational64>,
    pub coefficients: Vec<f64>,
    /// Root-mean-square misfit over the samples.
    pub residual: f64,
    pub condition: f64,
}

impl PuiseuxFit {
    pub fn coefficient(&self, e: Rational64) -> Option<f64> {
        self.exponents
            .iter()
            .position(|x| *x == e)
            .map(|i| self.coefficients[i])
    }

    /// The fit of `factor · q`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            coefficients: self.coefficients.iter().map(|c| c * factor).collect(),
            residual: self.residual * factor.abs(),
            ..self.clone()
        }
    }
}

/// Least-squares fit of `q(z) = |ξ''| p / C` on one side of the cone.
///
/// `window` gives `|z|` bounds; `samples` points are spaced logarithmically.
pub fn puiseux_fit(
    sig: Signature,
    side: Side,
    exponent_basis: &[Rational64],
    window: (f64, f64),
    samples: usize,
) -> Result<PuiseuxFit, ConormalError> {
    let (lo, hi) = (window.0.abs(), window.1.abs());
    let (lo, hi) = (lo.min(hi), lo.max(hi));
    if !(lo > 0.0) || !hi.is_finite() || hi >= 1.0 {
        return Err(ConormalError::Domain(format!(
            "window {window:?} must exclude z = 0 and stay inside |z| < 1"
        )));
    }
    if !exponent_basis.contains(&Rational64::from_integer(0)) {
        return Err(ConormalError::Domain("basis must contain exponent 0".into()));
    }
    if exponent_basis.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ConormalError::Domain("exponents must be strictly increasing".into()));
    }
    if samples < exponent_basis.len() {
        return Err(ConormalError::Domain("fewer samples than basis terms".into()));
    }
    let sign = match side {
        Side::ZPlus => 1.0,
        Side::ZMinus => -1.0,
    };
    let ex: Vec<f64> = exponent_basis.iter().map(|e| *e.numer() as f64 / *e.denom() as f64).collect();
    let ratio = (hi / lo).ln();
    let ts: Vec<f64> = (0..samples)
        .map(|i| {
            let f = if samples == 1 { 0.0 } else { i as f64 / (samples - 1) as f64 };
            lo * (ratio * f).exp()
        })
        .collect();
    let ys: Vec<f64> = ts
        .iter()
        .map(|t| q_profile(sig, sign * t, MultiplierMethod::Auto))
        .collect::<Result<Vec<_>, _>>()?;

    // column scaling by the largest magnitude in each column
    let ncol = ex.len();
    let scale: Vec<f64> = ex.iter().map(|e| hi.powf(*e).max(lo.powf(*e))).collect();
    let a = DMatrix::from_fn(samples, ncol, |i, j| ts[i].powf(ex[j]) / scale[j]);
    let y = DVector::from_vec(ys);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(cond < 1e12) {
        return Err(ConormalError::IllConditioned { cond });
    }
    let sol = svd
        .solve(&y, 0.0)
        .map_err(|e| ConormalError::Domain(e.to_string()))?;
    let r = &a * &sol - &y;
    let residual = (r.norm_squared() / samples as f64).sqrt();
    let coefficients = (0..ncol).map(|j| sol[j] / scale[j]).collect();
    Ok(PuiseuxFit {
        side,
        exponents: exponent_basis.to_vec(),
        coefficients,
        residual,
        condition: cond,
    })
}

/// Maps the leading non-constant term `c z_+^α` of a `ZPlus` fit through the
/// transform dictionary.
///
/// The `z < 0` side is taken as the smooth reference, which holds when that
/// side is constant (the `(n',3)` and `(3,n'')` families). Terms with
/// `|c| <= 1e-3 |c_0|` are treated as fit noise.
pub fn leading_singularity_symbol(
    fit: &PuiseuxFit,
    sig: Signature,
    zeta: f64,
) -> Result<Complex64, ConormalError> {
    if fit.side != Side::ZPlus {
        return Err(ConormalError::Domain("leading symbol needs a ZPlus fit".into()));
    }
    let zero = Rational64::from_integer(0);
    let c0 = fit.coefficient(zero).unwrap_or(0.0);
    let floor = 1e-3 * c0.abs().max(fit.residual);
    let (e, c) = fit
        .exponents
        .iter()
        .zip(&fit.coefficients)
        .find(|(e, c)| **e > zero && c.abs() > floor)
        .ok_or(ConormalError::NoSingularTerm { floor })?;
    // z_+^α has a symbol of order -α-1, b has order -n/2+1
    let expected = Rational64::new(sig.dim() as i64 - 4, 2);
    if *e != expected {
        return Err(ConormalError::OrderMismatch { found: *e, expected });
    }
    Ok(*c * power_symbol(*e, zeta)?)
}
