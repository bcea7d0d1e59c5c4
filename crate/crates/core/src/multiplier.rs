//! The Fourier multiplier `p(ξ)` of the normal operator `L'L`.
//!
//! With `κ = |ξ'|/|ξ''|` and `C = 2π|S^{n'-2}||S^{n''-2}|`,
//!
//! ```text
//! p(ξ) = 2C |ξ''|^{-1} ∫_0^{min(1,1/κ)} (1-s²)^{(n'-3)/2} (1-κ²s²)^{(n''-3)/2} ds.
//! ```
//!
//! Closed forms exist for `(2,2)` (a complete elliptic integral) and for the
//! `(n',3)` family with `n' <= 5`; everything else goes through tanh-sinh.
//! `p` is homogeneous of order `-1` and symmetric under swapping the blocks
//! together with the signature.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crate::signature::{Signature, SignatureError, SplitVector};
use crate::quad::{QuadError, TanhSinh};
use crate::signature::norm;
use crate::specfun::{self, HyperParams, SpecFunError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MultiplierError {
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("{0}")]
    Domain(String),
    #[error("multiplier diverges on light cone (signature (2,2), kappa = {kappa})")]
    ConeDivergence { kappa: f64 },
    #[error("no closed form for signature {0}; use the quadrature method")]
    Unsupported(Signature),
    #[error("quadrature failed: {0}")]
    NoConvergence(#[from] QuadError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error("Minkowski multiplier undefined at xi = 0, tau = {tau} for d = {d}")]
    MinkowskiSingular { d: usize, tau: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MultiplierMethod {
    #[serde(rename = "closed")]
    ClosedForm,
    #[serde(rename = "quad")]
    Quadrature,
    #[default]
    Auto,
}

impl std::str::FromStr for MultiplierMethod {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "closed" | "closed-form" => Ok(Self::ClosedForm),
            "quad" | "quadrature" => Ok(Self::Quadrature),
            "auto" => Ok(Self::Auto),
            _ => Err(format!("unknown method {s:?} (auto|closed|quad)")),
        }
    }
}

/// `κ = |ξ'|/|ξ''|`, `z = κ² - 1` and `|ξ''|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeCoordinates {
    pub kappa: f64,
    pub z: f64,
    pub r_dprime: f64,
}

pub fn cone_coords(xi: &SplitVector) -> Result<ConeCoordinates, MultiplierError> {
    let r1 = xi.norm_prime();
    let r2 = xi.norm_dprime();
    if r2 == 0.0 {
        return Err(MultiplierError::Domain(
            "|xi''| = 0: kappa is infinite, evaluate with the swapped signature".into(),
        ));
    }
    Ok(ConeCoordinates {
        kappa: r1 / r2,
        z: (r1 - r2) * (r1 + r2) / (r2 * r2),
        r_dprime: r2,
    })
}

/// Surface measure of `S^{k-1}`, with `|S^0| = 2`.
pub fn sphere_area(k: usize) -> Result<f64, MultiplierError> {
    if k == 0 {
        return Err(MultiplierError::Domain("sphere_area needs k >= 1".into()));
    }
    Ok(sphere_area_unchecked(k))
}

pub(crate) fn sphere_area_unchecked(k: usize) -> f64 {
    // |S^{j+1}| = 2π |S^{j-1}| / j
    let mut a = if k % 2 == 1 { 2.0 } else { 2.0 * PI };
    let mut j = if k % 2 == 1 { 1 } else { 2 };
    while j < k {
        a *= 2.0 * PI / j as f64;
        j += 2;
    }
    a
}

pub fn constant_c(sig: Signature) -> f64 {
    2.0 * PI * sphere_area_unchecked(sig.n_prime() - 1) * sphere_area_unchecked(sig.n_dprime() - 1)
}

/// Block norms together with both cone defining functions, each formed
/// without cancellation.
#[derive(Debug, Clone, Copy)]
struct Radial {
    r1: f64,
    r2: f64,
    /// `r1²/r2² - 1`
    z: f64,
    /// `r2²/r1² - 1`
    zs: f64,
}

impl Radial {
    fn from_norms(r1: f64, r2: f64) -> Self {
        let d = (r1 - r2) * (r1 + r2);
        Self {
            r1,
            r2,
            z: d / (r2 * r2),
            zs: -d / (r1 * r1),
        }
    }

    /// `|ξ''| = 1`, `κ² = 1 + z`.
    fn from_z(z: f64) -> Self {
        Self {
            r1: (1.0 + z).sqrt(),
            r2: 1.0,
            z,
            zs: -z / (1.0 + z),
        }
    }

    fn swapped(self) -> Self {
        Self {
            r1: self.r2,
            r2: self.r1,
            z: self.zs,
            zs: self.z,
        }
    }

    fn kappa(&self) -> f64 {
        self.r1 / self.r2
    }
}

pub fn has_closed_form(sig: Signature) -> bool {
    let (a, b) = (sig.n_prime(), sig.n_dprime());
    (a == 2 && b == 2) || (b == 3 && a <= 5) || (a == 3 && b <= 5)
}

fn radial(sig: Signature, r: Radial, method: MultiplierMethod) -> Result<f64, MultiplierError> {
    if r.r1 == 0.0 && r.r2 == 0.0 {
        return Err(MultiplierError::Domain("p is undefined at xi = 0".into()));
    }
    if !(r.r1.is_finite() && r.r2.is_finite()) {
        return Err(MultiplierError::Domain("non-finite frequency".into()));
    }
    if r.z == 0.0 {
        return cone_value(sig, r.r2);
    }
    let closed = match method {
        MultiplierMethod::ClosedForm => {
            if !has_closed_form(sig) {
                return Err(MultiplierError::Unsupported(sig));
            }
            true
        }
        MultiplierMethod::Quadrature => false,
        MultiplierMethod::Auto => has_closed_form(sig),
    };
    if closed {
        closed_form(sig, r)
    } else {
        quadrature(sig, r)
    }
}

fn cone_value(sig: Signature, r2: f64) -> Result<f64, MultiplierError> {
    if sig.dim() == 4 {
        return Err(MultiplierError::ConeDivergence { kappa: 1.0 });
    }
    p_cone_limit(sig, r2)
}

fn closed_form(sig: Signature, r: Radial) -> Result<f64, MultiplierError> {
    let (a, b) = (sig.n_prime(), sig.n_dprime());
    if a == 2 && b == 2 {
        let p = HyperParams::new(0.5, 0.5, 1.0)?;
        return if r.z < 0.0 {
            let k2 = r.kappa() * r.kappa();
            Ok(8.0 * PI * PI / r.r2 * specfun::hyp2f1_with_complement(p, k2, -r.z)?)
        } else {
            let k2 = r.r2 / r.r1 * (r.r2 / r.r1);
            Ok(8.0 * PI * PI / r.r1 * specfun::hyp2f1_with_complement(p, k2, -r.zs)?)
        };
    }
    if b == 3 {
        return Ok(closed_n3(a, r));
    }
    Ok(closed_n3(b, r.swapped()))
}

/// `2 C |ξ''|^{-1} G(s)` with `G(s) = ∫_0^s cos^{n'-2}`, `s = arcsin(min(1, 1/κ))`.
fn closed_n3(n1: usize, r: Radial) -> f64 {
    let c = constant_c(Signature::new(n1, 3).expect("n' >= 2"));
    if r.r2 == 0.0 {
        return 2.0 * c / r.r1;
    }
    let (sin, cos) = if r.z <= 0.0 {
        (1.0, 0.0)
    } else {
        (r.r2 / r.r1, (-r.zs).sqrt())
    };
    let s = sin.atan2(cos);
    let g = match n1 {
        2 => s,
        3 => sin,
        4 => 0.5 * sin * cos + 0.5 * s,
        5 => sin - sin * sin * sin / 3.0,
        _ => unreachable!("closed form only for n' <= 5"),
    };
    2.0 * c * g / r.r2
}

fn quadrature(sig: Signature, r: Radial) -> Result<f64, MultiplierError> {
    if r.r2 == 0.0 {
        return quadrature(sig.swapped(), r.swapped());
    }
    let e1 = (sig.n_prime() as f64 - 3.0) / 2.0;
    let e2 = (sig.n_dprime() as f64 - 3.0) / 2.0;
    let pow = |x: f64, e: f64| if e == 0.0 { 1.0 } else { x.powf(e) };
    let rule = TanhSinh {
        rel_tol: 1e-13,
        ..TanhSinh::default()
    };
    let integral = if r.z < 0.0 {
        let k2 = 1.0 + r.z;
        let mz = -r.z;
        rule.integrate(
            |_, _, d| {
                let u = d * (2.0 - d);
                pow(u, e1) * pow(mz + k2 * u, e2)
            },
            0.0,
            1.0,
        )?
    } else {
        let bnd = r.r2 / r.r1;
        let k2 = (r.r1 / r.r2).powi(2);
        let mzs = -r.zs;
        rule.integrate(
            |_, _, d| {
                let u = d * (2.0 * bnd - d);
                pow(mzs + u, e1) * pow(k2 * u, e2)
            },
            0.0,
            bnd,
        )?
    };
    Ok(2.0 * constant_c(sig) / r.r2 * integral.value)
}

/// `p` from the block norms `|ξ'|`, `|ξ''|` without normalizing.
pub fn p_from_norms(
    sig: Signature,
    r_prime: f64,
    r_dprime: f64,
    method: MultiplierMethod,
) -> Result<f64, MultiplierError> {
    radial(sig, Radial::from_norms(r_prime, r_dprime), method)
}

pub fn p_closed_form(sig: Signature, xi: &SplitVector) -> Result<f64, MultiplierError> {
    xi.check(sig)?;
    p_from_norms(sig, xi.norm_prime(), xi.norm_dprime(), MultiplierMethod::ClosedForm)
}

pub fn p_quadrature(sig: Signature, xi: &SplitVector) -> Result<f64, MultiplierError> {
    xi.check(sig)?;
    p_from_norms(sig, xi.norm_prime(), xi.norm_dprime(), MultiplierMethod::Quadrature)
}

/// Evaluates at `ξ/|ξ|` and divides by `|ξ|`.
pub fn p_eval(
    sig: Signature,
    xi: &SplitVector,
    method: MultiplierMethod,
) -> Result<f64, MultiplierError> {
    xi.check(sig)?;
    let n = xi.norm();
    if n == 0.0 {
        return Err(MultiplierError::Domain("p is undefined at xi = 0".into()));
    }
    let r1 = xi.norm_prime() / n;
    let r2 = xi.norm_dprime() / n;
    Ok(p_from_norms(sig, r1, r2, method)? / n)
}

/// `q(z) = |ξ''| p / C` as a function of `z = κ² - 1` alone.
pub fn q_profile(sig: Signature, z: f64, method: MultiplierMethod) -> Result<f64, MultiplierError> {
    if !(z >= -1.0) || !z.is_finite() {
        return Err(MultiplierError::Domain(format!("z = {z} outside [-1, inf)")));
    }
    Ok(radial(sig, Radial::from_z(z), method)? / constant_c(sig))
}

/// `p(0, ξ'') = 2π|S^{n'-1}||S^{n''-2}| / |ξ''|`.
pub fn p_zero_prime(sig: Signature, r_dprime: f64) -> f64 {
    2.0 * PI * sphere_area_unchecked(sig.n_prime()) * sphere_area_unchecked(sig.n_dprime() - 1)
        / r_dprime
}

/// Value on the light cone, `C B(1/2, (n-4)/2) / |ξ''|`, for `n >= 5`.
pub fn p_cone_limit(sig: Signature, r_dprime: f64) -> Result<f64, MultiplierError> {
    if sig.dim() < 5 {
        return Err(MultiplierError::ConeDivergence { kappa: 1.0 });
    }
    if !(r_dprime > 0.0) {
        return Err(MultiplierError::Domain("cone limit needs |xi''| > 0".into()));
    }
    let b = specfun::beta(0.5, (sig.dim() as f64 - 4.0) / 2.0)?;
    Ok(constant_c(sig) * b / r_dprime)
}

/// The coefficient of the logarithm in `|ξ''| p_{2,2}` at the cone.
pub fn log_constant_22() -> f64 {
    8.0 * PI
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogConstantEstimate {
    pub below: f64,
    pub above: f64,
    /// Mean of the two sides.
    pub value: f64,
    /// The same slope with `|ξ|` in place of `|ξ''|`; tends to `8√2 π`.
    pub value_full_norm: f64,
}

/// Estimates the log coefficient of `p_{2,2}` from samples at `κ = 1 ± ε`
/// and `κ = 1 ± 10ε`.
///
/// `|ξ''| p_{2,2} = 8π (-log(|κ-1|/√(1+κ²))) + c + o(1)` with
/// `c = 8π log(8/√2)`, so the plain ratio only approaches `8π` like
/// `1/|log ε|`. The two-point slope removes `c`.
pub fn estimate_log_constant_22(eps: f64) -> Result<LogConstantEstimate, MultiplierError> {
    let sig = Signature::new(2, 2)?;
    let side = |sign: f64| -> Result<(f64, f64), MultiplierError> {
        let mut g = [0.0; 2];
        let mut gf = [0.0; 2];
        let mut dd = [0.0; 2];
        for (i, e) in [eps, 10.0 * eps].into_iter().enumerate() {
            let kappa = 1.0 + sign * e;
            let p = p_from_norms(sig, kappa, 1.0, MultiplierMethod::ClosedForm)?;
            let full = kappa.hypot(1.0);
            g[i] = p;
            gf[i] = full * p;
            dd[i] = -(e / full).ln();
        }
        Ok(((g[0] - g[1]) / (dd[0] - dd[1]), (gf[0] - gf[1]) / (dd[0] - dd[1])))
    };
    let (below, below_f) = side(-1.0)?;
    let (above, above_f) = side(1.0)?;
    Ok(LogConstantEstimate {
        below,
        above,
        value: 0.5 * (below + above),
        value_full_norm: 0.5 * (below_f + above_f),
    })
}

/// `σ(ξ) = ⟨ξ⟩ / (-log(||ξ'|-|ξ''|| / (e|ξ|)))` for signature `(2,2)`.
pub fn sigma_weight(xi: &SplitVector) -> Result<f64, MultiplierError> {
    xi.check(Signature::new(2, 2)?)?;
    sigma_from_norms(xi.norm_prime(), xi.norm_dprime())
}

pub(crate) fn sigma_from_norms(r1: f64, r2: f64) -> Result<f64, MultiplierError> {
    let n = r1.hypot(r2);
    if n == 0.0 {
        return Err(MultiplierError::Domain("sigma is undefined at xi = 0".into()));
    }
    let gap = (r1 - r2).abs();
    if gap == 0.0 {
        return Ok(0.0);
    }
    let bracket = (1.0 + n * n).sqrt();
    Ok(bracket / (1.0 - (gap / n).ln()))
}

/// `2π|S^{d-2}| (|ξ|²-τ²)_+^{(d-3)/2} / |ξ|^{d-2}` for the Minkowski case.
pub fn p_minkowski(d: usize, tau: f64, xi_spatial: &[f64]) -> Result<f64, MultiplierError> {
    if d < 2 {
        return Err(MultiplierError::Domain(format!("d = {d}: need d >= 2")));
    }
    if xi_spatial.len() != d {
        return Err(MultiplierError::Domain(format!(
            "spatial frequency has length {}, expected {d}",
            xi_spatial.len()
        )));
    }
    let r = norm(xi_spatial);
    if r == 0.0 && tau == 0.0 {
        return Err(MultiplierError::Domain("p is undefined at (tau, xi) = 0".into()));
    }
    if r == 0.0 {
        return if d >= 4 {
            Ok(0.0)
        } else {
            Err(MultiplierError::MinkowskiSingular { d, tau })
        };
    }
    let gap = (r - tau.abs()) * (r + tau.abs());
    if gap < 0.0 {
        return Ok(0.0);
    }
    let e = (d as f64 - 3.0) / 2.0;
    let num = if gap == 0.0 {
        match d {
            2 => return Err(MultiplierError::ConeDivergence { kappa: 1.0 }),
            3 => 1.0,
            _ => 0.0,
        }
    } else if e == 0.0 {
        1.0
    } else {
        gap.powf(e)
    };
    let area = if d == 2 { 2.0 } else { sphere_area_unchecked(d - 1) };
    Ok(2.0 * PI * area * num / r.powi(d as i32 - 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sig(a: usize, b: usize) -> Signature {
        Signature::new(a, b).unwrap()
    }

    fn xi(a: &[f64], b: &[f64]) -> SplitVector {
        SplitVector::new(a.to_vec(), b.to_vec())
    }

    /// `(κ, 0, ..) ⊕ (1, 0, ..)`
    fn xi_kappa(s: Signature, kappa: f64, r2: f64) -> SplitVector {
        let mut a = vec![0.0; s.n_prime()];
        let mut b = vec![0.0; s.n_dprime()];
        a[0] = kappa * r2;
        b[0] = r2;
        SplitVector::new(a, b)
    }

    const PI2: f64 = PI * PI;
    const PI3: f64 = PI * PI * PI;

    #[test]
    fn sphere_areas() {
        assert_eq!(sphere_area(1).unwrap(), 2.0);
        assert_relative_eq!(sphere_area(2).unwrap(), 2.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(3).unwrap(), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(4).unwrap(), 2.0 * PI2, max_relative = 1e-15);
        assert!(sphere_area(0).is_err());
    }

    #[test]
    fn constants() {
        assert_relative_eq!(constant_c(sig(3, 3)), 8.0 * PI3, max_relative = 1e-14);
        assert_relative_eq!(constant_c(sig(2, 3)), 8.0 * PI2, max_relative = 1e-14);
        assert_relative_eq!(constant_c(sig(4, 3)), 16.0 * PI3, max_relative = 1e-14);
        assert_relative_eq!(constant_c(sig(2, 2)), 8.0 * PI, max_relative = 1e-14);
    }

    #[test]
    fn cone_coordinates() {
        let c = cone_coords(&xi(&[1.0, 0.0], &[0.0, 2.0])).unwrap();
        assert_eq!((c.kappa, c.z, c.r_dprime), (0.5, -0.75, 2.0));
        let c = cone_coords(&xi(&[3.0, 4.0], &[0.0, 5.0])).unwrap();
        assert_eq!((c.kappa, c.z), (1.0, 0.0));
        assert!(cone_coords(&xi(&[1.0, 0.0], &[0.0, 0.0])).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let p = p_closed_form(sig(3, 3), &xi(&[1.0, 0.0, 0.0], &[0.0, 0.0, 2.0])).unwrap();
        assert_relative_eq!(p, 8.0 * PI3, max_relative = 1e-14);
        let p = p_closed_form(sig(2, 3), &xi_kappa(sig(2, 3), 2.0, 1.0)).unwrap();
        assert_relative_eq!(p, 8.0 * PI3 / 3.0, max_relative = 1e-14);
        let p = p_closed_form(sig(5, 3), &xi_kappa(sig(5, 3), 2.0, 1.0)).unwrap();
        assert_relative_eq!(p, 22.0 * PI.powi(4) / 3.0, max_relative = 1e-14);
        let p = p_closed_form(sig(4, 3), &xi_kappa(sig(4, 3), 2f64.sqrt(), 1.0)).unwrap();
        assert_relative_eq!(p, 32.0 * PI3 * (0.25 + PI / 8.0), max_relative = 1e-14);
        let p = p_closed_form(sig(2, 2), &xi_kappa(sig(2, 2), 0.5, 1.0)).unwrap();
        let f = specfun::hyp2f1(HyperParams::new(0.5, 0.5, 1.0).unwrap(), 0.25).unwrap();
        assert_relative_eq!(p, 8.0 * PI2 * f, max_relative = 1e-14);
    }

    #[test]
    fn closed_form_rejects() {
        assert!(matches!(
            p_closed_form(sig(4, 4), &xi_kappa(sig(4, 4), 0.5, 1.0)),
            Err(MultiplierError::Unsupported(_))
        ));
        assert!(matches!(
            p_closed_form(sig(2, 2), &xi(&[1.0, 0.0], &[1.0, 0.0])),
            Err(MultiplierError::ConeDivergence { .. })
        ));
    }

    #[test]
    fn quadrature_matches_33() {
        let s = sig(3, 3);
        for &k in &[0.1, 0.5, 0.99, 1.01, 2.0, 10.0] {
            let v = xi_kappa(s, k, 1.3);
            let q = p_quadrature(s, &v).unwrap();
            let c = p_closed_form(s, &v).unwrap();
            assert!((q / c - 1.0).abs() < 1e-10, "kappa {k}");
        }
    }

    #[test]
    fn quadrature_43_example() {
        let s = sig(4, 3);
        let q = p_quadrature(s, &xi_kappa(s, 2f64.sqrt(), 1.0)).unwrap();
        assert!((q / (32.0 * PI3 * (0.25 + PI / 8.0)) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn value_at_zero_prime() {
        for (a, b) in [(2, 2), (2, 3), (3, 3), (4, 3), (4, 4), (5, 3), (2, 5)] {
            let s = sig(a, b);
            let mut v = vec![0.0; b];
            v[b - 1] = 1.7;
            let x = SplitVector::new(vec![0.0; a], v);
            let q = p_quadrature(s, &x).unwrap();
            let g = specfun::gamma;
            let direct = 2.0 * constant_c(s) / 1.7 * 0.5 * PI.sqrt() * g((a as f64 - 1.0) / 2.0)
                / g(a as f64 / 2.0);
            assert!((q / direct - 1.0).abs() < 1e-10, "({a},{b})");
            assert!((p_zero_prime(s, 1.7) / direct - 1.0).abs() < 1e-13);
            let e = p_eval(s, &x, MultiplierMethod::Auto).unwrap();
            assert!((e / q - 1.0).abs() < 1e-10);
        }
        let s = sig(2, 3);
        assert_relative_eq!(p_zero_prime(s, 1.0), 8.0 * PI3, max_relative = 1e-14);
    }

    #[test]
    fn eval_normalizes() {
        let s = sig(3, 3);
        let p = p_eval(s, &xi(&[2.0, 0.0, 0.0], &[0.0, 0.0, 2.0]), MultiplierMethod::Auto).unwrap();
        assert_relative_eq!(p, 8.0 * PI3, max_relative = 1e-14);
        assert!(p_eval(s, &xi(&[0.0; 3], &[0.0; 3]), MultiplierMethod::Auto).is_err());
        assert!(p_eval(s, &xi(&[0.0; 2], &[0.0; 3]), MultiplierMethod::Auto).is_err());
    }

    #[test]
    fn dprime_zero_uses_swap() {
        for (a, b) in [(2, 3), (3, 3), (5, 3), (2, 2), (4, 4)] {
            let s = sig(a, b);
            let mut v = vec![0.0; a];
            v[0] = 2.0;
            let x = SplitVector::new(v, vec![0.0; b]);
            let p = p_eval(s, &x, MultiplierMethod::Auto).unwrap();
            let want = p_zero_prime(s.swapped(), 2.0);
            assert!((p / want - 1.0).abs() < 1e-10, "({a},{b})");
        }
    }

    #[test]
    fn cone_limits() {
        assert_relative_eq!(p_cone_limit(sig(3, 3), 1.0).unwrap(), 16.0 * PI3, max_relative = 1e-13);
        assert_relative_eq!(p_cone_limit(sig(2, 3), 1.0).unwrap(), 8.0 * PI3, max_relative = 1e-13);
        assert!(p_cone_limit(sig(2, 2), 1.0).is_err());
        let on = p_eval(sig(4, 3), &xi(&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0]), MultiplierMethod::Quadrature)
            .unwrap();
        assert_relative_eq!(on, p_cone_limit(sig(4, 3), 1.0).unwrap(), max_relative = 1e-14);
    }

    #[test]
    fn log_constant() {
        assert_eq!(log_constant_22(), 8.0 * PI);
        let e = estimate_log_constant_22(1e-10).unwrap();
        assert!((e.value / (8.0 * PI) - 1.0).abs() < 5e-3, "{e:?}");
        assert!((e.value_full_norm / (8.0 * 2f64.sqrt() * PI) - 1.0).abs() < 5e-3);
        let e = estimate_log_constant_22(1e-6).unwrap();
        assert!((e.value / (8.0 * PI) - 1.0).abs() < 5e-2);
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma_weight(&xi(&[1.0, 0.0], &[1.0, 0.0])).unwrap(), 0.0);
        let v = xi(&[1.0, 0.0], &[0.0, 0.0]);
        assert_relative_eq!(sigma_weight(&v).unwrap(), 2f64.sqrt(), max_relative = 1e-15);
        assert!(sigma_weight(&xi(&[0.0, 0.0], &[0.0, 0.0])).is_err());
        assert!(sigma_weight(&xi(&[0.0, 0.0, 1.0], &[0.0, 0.0])).is_err());
    }

    #[test]
    fn minkowski_values() {
        assert_relative_eq!(p_minkowski(3, 0.0, &[1.0, 0.0, 0.0]).unwrap(), 4.0 * PI2, max_relative = 1e-14);
        assert_eq!(p_minkowski(3, 2.0, &[1.0, 0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(p_minkowski(4, 1.0, &[0.0; 4]).unwrap(), 0.0);
        assert!(matches!(
            p_minkowski(3, 1.0, &[0.0; 3]),
            Err(MultiplierError::MinkowskiSingular { .. })
        ));
        for d in 2..6 {
            let x: Vec<f64> = (0..d).map(|i| 0.3 + i as f64 * 0.1).collect();
            let x2: Vec<f64> = x.iter().map(|v| 3.0 * v).collect();
            let a = p_minkowski(d, 0.2, &x).unwrap();
            let b = p_minkowski(d, 0.6, &x2).unwrap();
            assert!((a / b - 3.0).abs() < 1e-13);
        }
    }
}
