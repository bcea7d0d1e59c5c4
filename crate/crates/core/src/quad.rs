//! One-dimensional quadrature: tanh-sinh on a finite interval and
//! Gauss–Legendre nodes.
//!
//! The tanh-sinh integrand receives the abscissa together with its distances
//! to both endpoints, computed without cancellation. Integrands built from
//! factors like `(1 - s^2)` near `s = 1` should use the distance instead of
//! forming `1 - s` from a rounded `s`.

use std::f64::consts::FRAC_PI_2;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("tanh-sinh did not reach relative tolerance {tol:e} after {levels} levels ({evaluations} evaluations); last two estimates {prev} and {last}")]
    NoConvergence {
        tol: f64,
        levels: usize,
        evaluations: usize,
        prev: f64,
        last: f64,
    },
    #[error("integrand returned a non-finite value at x = {x} (distance to ends {d_lo:e}, {d_hi:e})")]
    NonFinite { x: f64, d_lo: f64, d_hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Difference between the last two levels.
    pub error_estimate: f64,
    pub evaluations: usize,
    pub levels: usize,
}

/// Settings for [`tanh_sinh`].
#[derive(Debug, Clone, Copy)]
pub struct TanhSinh {
    pub rel_tol: f64,
    /// Truncation of the transformed variable, `|t| <= t_max`.
    pub t_max: f64,
    pub max_level: usize,
    pub min_level: usize,
}

impl Default for TanhSinh {
    fn default() -> Self {
        Self {
            rel_tol: 1e-14,
            t_max: 4.5,
            max_level: 11,
            min_level: 3,
        }
    }
}

impl TanhSinh {
    /// `∫_a^b f`, with `f(x, x - a, b - x)`.
    pub fn integrate<F>(&self, f: F, a: f64, b: f64) -> Result<QuadResult, QuadError>
    where
        F: Fn(f64, f64, f64) -> f64,
    {
        let len = b - a;
        let half = 0.5 * len;
        let mut evaluations = 0;
        let mut eval_at = |t: f64| -> Result<f64, QuadError> {
            let u = FRAC_PI_2 * t.sinh();
            let e2 = (2.0 * u).exp();
            let d_lo = len / (1.0 + 1.0 / e2);
            let d_hi = len / (1.0 + e2);
            if d_lo == 0.0 || d_hi == 0.0 {
                return Ok(0.0);
            }
            let ch = u.cosh();
            let w = half * FRAC_PI_2 * t.cosh() / (ch * ch);
            let x = if d_lo <= d_hi { a + d_lo } else { b - d_hi };
            evaluations += 1;
            let v = f(x, d_lo, d_hi);
            if !v.is_finite() {
                return Err(QuadError::NonFinite { x, d_lo, d_hi });
            }
            Ok(w * v)
        };

        // level 0: h = 1
        let mut h = 1.0;
        let n0 = self.t_max.floor() as i64;
        let mut sum = eval_at(0.0)?;
        for k in 1..=n0 {
            let t = k as f64;
            sum += eval_at(t)? + eval_at(-t)?;
        }
        let mut estimate = h * sum;
        let mut prev = f64::NAN;
        for level in 1..=self.max_level {
            h *= 0.5;
            let mut k = 1_i64;
            let mut add = 0.0;
            loop {
                let t = k as f64 * h;
                if t > self.t_max {
                    break;
                }
                add += eval_at(t)? + eval_at(-t)?;
                k += 2;
            }
            sum += add;
            prev = estimate;
            estimate = h * sum;
            let diff = (estimate - prev).abs();
            if level >= self.min_level && diff <= self.rel_tol * estimate.abs().max(f64::MIN_POSITIVE)
            {
                return Ok(QuadResult {
                    value: estimate,
                    error_estimate: diff,
                    evaluations,
                    levels: level,
                });
            }
        }
        Err(QuadError::NoConvergence {
            tol: self.rel_tol,
            levels: self.max_level,
            evaluations,
            prev,
            last: estimate,
        })
    }
}

/// Tanh-sinh with default settings.
pub fn tanh_sinh<F>(f: F, a: f64, b: f64) -> Result<QuadResult, QuadError>
where
    F: Fn(f64, f64, f64) -> f64,
{
    TanhSinh::default().integrate(f, a, b)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn smooth_integrand() {
        let r = tanh_sinh(|x, _, _| x.exp(), 0.0, 1.0).unwrap();
        assert!((r.value - (1f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn inverse_sqrt_endpoints() {
        // ∫_0^1 dx / sqrt(x(1-x)) = π
        let r = tanh_sinh(|_, lo, hi| 1.0 / (lo * hi).sqrt(), 0.0, 1.0).unwrap();
        assert!((r.value / PI - 1.0).abs() < 1e-14, "{}", r.value);
    }

    #[test]
    fn distances_are_consistent() {
        tanh_sinh(
            |x, lo, hi| {
                assert!(lo > 0.0 && hi > 0.0);
                assert!((lo + hi - 2.0).abs() <= 1e-15 * 2.0);
                assert!((x - 1.0 - lo).abs() <= 4e-16 || (3.0 - x - hi).abs() <= 4e-16);
                1.0
            },
            1.0,
            3.0,
        )
        .unwrap();
    }

    #[test]
    fn gauss_legendre_exact_degree() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            for deg in 0..(2 * n) {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - want).abs() < 1e-13, "n={n} deg={deg}");
            }
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }
}
