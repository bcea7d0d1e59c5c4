//! Special functions behind the multiplier formulas: log-Gamma, Beta, the Gauss
//! hypergeometric function on `[0, 1)` with its `z -> 1-` limit classes, and
//! the complete elliptic integral of the first kind.
//!
//! `hyp2f1` sums the defining series directly for `z <= 1/2`. On `(1/2, 1)`
//! the direct series slows to a crawl (terms decay like `z^k k^(a+b-c-1)`),
//! so the value is instead obtained from the connection formulas in `1 - z`
//! (Abramowitz & Stegun 15.3.6, and the logarithmic cases 15.3.10–15.3.12
//! when `c - a - b` is an integer). Every series is capped at
//! [`MAX_SERIES_TERMS`] and reports [`SpecFunError::NoConvergence`] past it.

use std::f64::consts::PI;

use thiserror::Error;

/// Hard cap on the number of terms summed in any hypergeometric series.
pub const MAX_SERIES_TERMS: usize = 1_000_000;

const SERIES_EPS: f64 = 1e-17;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecFunError {
    #[error("{func}: argument {value} outside the domain ({domain})")]
    Domain {
        func: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("hypergeometric parameter c = {0} is a non-positive integer")]
    InvalidC(f64),
    #[error("{func}: series did not converge after {terms} terms (last term {last_term:e})")]
    NoConvergence {
        func: &'static str,
        terms: usize,
        last_term: f64,
    },
}

/// Natural log of `Γ(x)` for `x > 0`.
///
/// Upward recurrence to `x >= 10` followed by the Stirling series through
/// the `B_20` term; integer arguments up to 171 use the exact factorial.
pub fn ln_gamma(x: f64) -> Result<f64, SpecFunError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecFunError::Domain {
            func: "ln_gamma",
            value: x,
            domain: "x > 0",
        });
    }
    Ok(ln_gamma_pos(x))
}

fn ln_gamma_pos(x: f64) -> f64 {
    if x.fract() == 0.0 && x <= 171.0 {
        let mut acc = 1.0_f64;
        let mut k = 2.0;
        while k < x {
            acc *= k;
            k += 1.0;
        }
        return acc.ln();
    }
    let mut prod = 1.0;
    let mut y = x;
    while y < 10.0 {
        prod *= y;
        y += 1.0;
    }
    stirling(y) - prod.ln()
}

fn stirling(x: f64) -> f64 {
    const C: [f64; 10] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360360.0,
        1.0 / 156.0,
        -3617.0 / 122400.0,
        43867.0 / 244188.0,
        -174611.0 / 125400.0,
    ];
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv;
    for c in C {
        series += c * pow;
        pow *= inv2;
    }
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series
}

/// `sin(πx)` with exact zeros at the integers.
fn sin_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    if r.fract() == 0.0 {
        return 0.0;
    }
    if r == 0.5 {
        return 1.0;
    }
    if r == 1.5 {
        return -1.0;
    }
    (PI * r).sin()
}

/// `Γ(x)` on the real line, with reflection for negative arguments.
/// Poles (non-positive integers) give `±∞`.
pub(crate) fn gamma(x: f64) -> f64 {
    if x > 0.0 {
        if x.fract() == 0.0 && x <= 171.0 {
            return (2..x as u32).fold(1.0, |acc, k| acc * k as f64);
        }
        return ln_gamma_pos(x).exp();
    }
    if x.fract() == 0.0 {
        return f64::INFINITY;
    }
    PI / (sin_pi(x) * gamma(1.0 - x))
}

/// `1/Γ(x)`, zero at the poles of Γ.
pub(crate) fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x.fract() == 0.0 {
        return 0.0;
    }
    1.0 / gamma(x)
}

/// Digamma `ψ(x)`; reflection for negative non-integer arguments.
pub(crate) fn digamma(x: f64) -> f64 {
    if x <= 0.0 {
        if x.fract() == 0.0 {
            return f64::NAN;
        }
        return digamma(1.0 - x) - PI / (PI * x).tan();
    }
    let mut acc = 0.0;
    let mut y = x;
    while y < 10.0 {
        acc -= 1.0 / y;
        y += 1.0;
    }
    let inv2 = 1.0 / (y * y);
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * 691.0 / 32760.0)))));
    acc + y.ln() - 0.5 / y - tail
}

/// Euler Beta function `Γ(z1)Γ(z2)/Γ(z1+z2)` for positive arguments.
pub fn beta(z1: f64, z2: f64) -> Result<f64, SpecFunError> {
    for z in [z1, z2] {
        if !(z > 0.0) || !z.is_finite() {
            return Err(SpecFunError::Domain {
                func: "beta",
                value: z,
                domain: "z > 0",
            });
        }
    }
    Ok((ln_gamma_pos(z1) + ln_gamma_pos(z2) - ln_gamma_pos(z1 + z2)).exp())
}

/// Parameters `(a, b; c)` of `2F1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl HyperParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self, SpecFunError> {
        if c <= 0.0 && c.fract() == 0.0 {
            return Err(SpecFunError::InvalidC(c));
        }
        Ok(Self { a, b, c })
    }

    /// `c - a - b`, the exponent that decides the behavior at `z = 1`.
    pub fn excess(&self) -> f64 {
        self.c - self.a - self.b
    }

    fn terminating(&self) -> bool {
        let np = |x: f64| x <= 0.0 && x.fract() == 0.0;
        np(self.a) || np(self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitKind {
    /// `c - a - b > 0`: `2F1(1)` is finite.
    FiniteLimit,
    /// `c = a + b`: `2F1 / (-log(1-z))` tends to the constant.
    LogDivergence,
    /// `Re(c - a - b) = 0`, `c != a + b`. Only reachable with complex
    /// parameters, kept so the classification mirrors the full statement.
    FiniteWithPowerCorrection,
    /// `c - a - b < 0`: `2F1 / (1-z)^(c-a-b)` tends to the constant.
    PowerDivergence,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitClass {
    pub kind: LimitKind,
    pub constant: f64,
}

/// Behavior of `2F1(a,b;c;z)` as `z -> 1-`.
pub fn hyp2f1_limit(p: HyperParams) -> LimitClass {
    let s = p.excess();
    if s > 0.0 {
        LimitClass {
            kind: LimitKind::FiniteLimit,
            constant: gamma(p.c) * gamma(s) * rgamma(p.c - p.a) * rgamma(p.c - p.b),
        }
    } else if s == 0.0 {
        LimitClass {
            kind: LimitKind::LogDivergence,
            constant: gamma(p.a + p.b) * rgamma(p.a) * rgamma(p.b),
        }
    } else {
        LimitClass {
            kind: LimitKind::PowerDivergence,
            constant: gamma(p.c) * gamma(-s) * rgamma(p.a) * rgamma(p.b),
        }
    }
}

/// Gauss hypergeometric function for real `z in [0, 1)`.
pub fn hyp2f1(p: HyperParams, z: f64) -> Result<f64, SpecFunError> {
    hyp2f1_with_complement(p, z, 1.0 - z)
}

/// Same as [`hyp2f1`], with `w = 1 - z` supplied by the caller so that
/// arguments within a few ulps of 1 keep their relative precision.
pub fn hyp2f1_with_complement(p: HyperParams, z: f64, w: f64) -> Result<f64, SpecFunError> {
    let p = HyperParams::new(p.a, p.b, p.c)?;
    if !(0.0..1.0).contains(&z) || !(w > 0.0) {
        return Err(SpecFunError::Domain {
            func: "hyp2f1",
            value: z,
            domain: "0 <= z < 1",
        });
    }
    if z == 0.0 || p.a == 0.0 || p.b == 0.0 {
        return Ok(1.0);
    }
    if p.terminating() || z <= 0.5 {
        return series(p.a, p.b, p.c, z);
    }
    near_one(p, w)
}

fn series(a: f64, b: f64, c: f64, z: f64) -> Result<f64, SpecFunError> {
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut small = 0;
    for k in 0..MAX_SERIES_TERMS {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        if term.abs() <= SERIES_EPS * sum.abs() {
            small += 1;
            if small >= 2 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(SpecFunError::NoConvergence {
        func: "hyp2f1",
        terms: MAX_SERIES_TERMS,
        last_term: term,
    })
}

fn near_one(p: HyperParams, w: f64) -> Result<f64, SpecFunError> {
    let s = p.excess();
    let m = s.round();
    if (s - m).abs() > 1e-13 {
        // 15.3.6
        let (a, b, c) = (p.a, p.b, p.c);
        let ca = gamma(c) * gamma(s) * rgamma(c - a) * rgamma(c - b);
        let cb = gamma(c) * gamma(-s) * rgamma(a) * rgamma(b);
        let mut out = 0.0;
        if ca != 0.0 {
            out += ca * series(a, b, 1.0 - s, w)?;
        }
        if cb != 0.0 {
            out += cb * w.powf(s) * series(c - a, c - b, 1.0 + s, w)?;
        }
        return Ok(out);
    }
    let m = m as i64;
    if m >= 0 {
        log_case(p.a, p.b, m as usize, w)
    } else {
        // Euler: F(a,b;c;z) = w^(c-a-b) F(c-a, c-b; c; z), excess flips sign
        let v = log_case(p.c - p.a, p.c - p.b, (-m) as usize, w)?;
        Ok(w.powi(m as i32) * v)
    }
}

/// `2F1(a, b; a+b+m; 1-w)` for integer `m >= 0` (A&S 15.3.10, 15.3.11).
fn log_case(a: f64, b: f64, m: usize, w: f64) -> Result<f64, SpecFunError> {
    let ln_w = w.ln();
    let mf = m as f64;
    let mut finite = 0.0;
    if m > 0 {
        let pref = gamma(mf) * gamma(a + b + mf) * rgamma(a + mf) * rgamma(b + mf);
        let mut term = 1.0;
        let mut acc = 1.0;
        for n in 1..m {
            let nf = (n - 1) as f64;
            term *= (a + nf) * (b + nf) / ((nf + 1.0) * (1.0 - mf + nf)) * w;
            acc += term;
        }
        finite = pref * acc;
    }
    let pref = gamma(a + b + mf) * rgamma(a) * rgamma(b);
    if pref == 0.0 {
        return Ok(finite);
    }
    // (a+m)_n (b+m)_n / (n! (n+m)!) w^n, with digammas updated by recurrence
    let mut coef = 1.0 / gamma(mf + 1.0);
    let mut psi_n1 = digamma(1.0);
    let mut psi_nm1 = digamma(mf + 1.0);
    let mut psi_a = digamma(a + mf);
    let mut psi_b = digamma(b + mf);
    let mut sum = 0.0;
    let mut small = 0;
    let mut last = f64::NAN;
    for n in 0..MAX_SERIES_TERMS {
        let bracket = ln_w - psi_n1 - psi_nm1 + psi_a + psi_b;
        let term = coef * bracket;
        sum += term;
        last = term;
        if term.abs() <= SERIES_EPS * sum.abs() || coef == 0.0 {
            small += 1;
            if small >= 2 {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                // -(z-1)^m = -(-w)^m
                return Ok(finite - sign * w.powi(m as i32) * pref * sum);
            }
        } else {
            small = 0;
        }
        let nf = n as f64;
        coef *= (a + mf + nf) * (b + mf + nf) / ((nf + 1.0) * (nf + mf + 1.0)) * w;
        psi_n1 += 1.0 / (nf + 1.0);
        psi_nm1 += 1.0 / (nf + mf + 1.0);
        psi_a += 1.0 / (a + mf + nf);
        psi_b += 1.0 / (b + mf + nf);
    }
    Err(SpecFunError::NoConvergence {
        func: "hyp2f1",
        terms: MAX_SERIES_TERMS,
        last_term: last,
    })
}

/// Complete elliptic integral of the first kind `K(m)`, parameter `m = k^2`,
/// by the arithmetic-geometric mean `K = π / (2 AGM(1, sqrt(1-m)))`.
pub fn elliptic_k(m: f64) -> Result<f64, SpecFunError> {
    if !(0.0..1.0).contains(&m) {
        return Err(SpecFunError::Domain {
            func: "elliptic_k",
            value: m,
            domain: "0 <= m < 1",
        });
    }
    Ok(elliptic_k_complement(1.0 - m))
}

/// `K` as a function of the complementary parameter `m1 = 1 - m > 0`.
pub fn elliptic_k_complement(m1: f64) -> f64 {
    let mut a = 1.0_f64;
    let mut g = m1.sqrt();
    for _ in 0..64 {
        if (a - g).abs() <= 1e-16 * a {
            break;
        }
        let an = 0.5 * (a + g);
        g = (a * g).sqrt();
        a = an;
    }
    PI / (a + g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn hp(a: f64, b: f64, c: f64) -> HyperParams {
        HyperParams::new(a, b, c).unwrap()
    }

    #[test]
    fn ln_gamma_known_values() {
        assert_eq!(ln_gamma(1.0).unwrap(), 0.0);
        assert_eq!(ln_gamma(2.0).unwrap(), 0.0);
        assert_relative_eq!(ln_gamma(0.5).unwrap(), PI.sqrt().ln(), max_relative = 1e-13);
        assert_relative_eq!(ln_gamma(7.0).unwrap(), 720f64.ln(), max_relative = 1e-13);
        // mpmath loggamma, 30 digits
        let frozen = [
            (1e-3, 6.9071788853838536617),
            (0.1, 2.252712651734205902),
            (3.7, 1.4280723266653881292),
            (10.5, 13.940625219403763633),
            (150.2, 601.01106392589216349),
        ];
        for (x, v) in frozen {
            assert_relative_eq!(ln_gamma(x).unwrap(), v, max_relative = 1e-13);
        }
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-2.5).is_err());
    }

    #[test]
    fn gamma_reflection_and_poles() {
        assert_relative_eq!(gamma(-0.5), -2.0 * PI.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(gamma(-1.5), 4.0 * PI.sqrt() / 3.0, max_relative = 1e-13);
        assert_eq!(rgamma(0.0), 0.0);
        assert_eq!(rgamma(-3.0), 0.0);
        assert_eq!(gamma(5.0), 24.0);
    }

    #[test]
    fn digamma_frozen() {
        let frozen = [
            (0.5, -1.9635100260214234794),
            (2.3, 0.60003988036396947876),
            (-0.5, 0.036489973978576520559),
            (-1.5, 0.70315664064524318723),
            (12.75, 2.5058032764013554687),
        ];
        for (x, v) in frozen {
            assert_relative_eq!(digamma(x), v, max_relative = 1e-13);
        }
    }

    #[test]
    fn beta_values() {
        assert_relative_eq!(beta(1.0, 1.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(beta(0.5, 0.5).unwrap(), PI, max_relative = 1e-13);
        // oracle: ∫0^1 t^(-1/2)(1-t) dt = 2∫0^1 (1-u^2) du by composite Simpson
        let n = 2000;
        let h = 1.0 / n as f64;
        let g = |u: f64| 2.0 * (1.0 - u * u);
        let mut s = g(0.0) + g(1.0);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * g(i as f64 * h);
        }
        let oracle = s * h / 3.0;
        assert_relative_eq!(beta(0.5, 2.0).unwrap(), oracle, max_relative = 1e-12);
        assert!(beta(0.0, 1.0).is_err());
    }

    #[test]
    fn beta_gamma_consistency() {
        for &(x, y) in &[(0.3, 2.2), (1.5, 4.5), (7.25, 0.75), (20.0, 30.5)] {
            let lhs = beta(x, y).unwrap().ln() + ln_gamma(x + y).unwrap();
            let rhs = ln_gamma(x).unwrap() + ln_gamma(y).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
        }
    }

    #[test]
    fn hyp2f1_trivial_cases() {
        assert_eq!(hyp2f1(hp(0.3, 1.7, 2.2), 0.0).unwrap(), 1.0);
        assert_eq!(hyp2f1(hp(0.3, 0.0, 2.2), 0.8).unwrap(), 1.0);
        assert!(hyp2f1(hp(0.3, 0.5, 1.0), 1.0).is_err());
        assert!(hyp2f1(hp(0.3, 0.5, 1.0), -0.1).is_err());
        assert!(HyperParams::new(0.5, 0.5, -2.0).is_err());
        assert!(HyperParams::new(0.5, 0.5, 0.0).is_err());
    }

    #[test]
    fn hyp2f1_against_mpmath() {
        // mpmath hyp2f1 at 30 digits; covers direct series, 15.3.6 and the
        // logarithmic integer-excess cases m = 0, 1, 2 on both sides
        let frozen = [
            ((0.5, 0.5, 1.0), 0.9, 1.6412644143423707998),
            ((0.5, 0.5, 1.0), 0.999, 3.0819607086988160164),
            ((0.5, -0.5, 1.0), 0.95, 0.67511854317236850881),
            ((-0.5, 0.5, 1.0), 0.99, 0.64680157936089007564),
            ((0.5, 0.5, 1.5), 0.9, 1.3166098475275860516),
            ((0.5, 0.5, 2.0), 0.97, 1.2407793033561095193),
            ((0.5, 0.5, 2.5), 0.8, 1.11554206289695609),
            ((-0.5, 0.5, 1.5), 0.9, 0.81641880677221197486),
            ((-0.5, 0.5, 2.0), 0.9, 0.86828466102493038628),
            ((1.5, 0.5, 1.0), 0.7, 2.6349067810706500762),
            ((0.3, 0.7, 1.9), 0.85, 1.1579792530411390022),
            ((0.5, 0.5, 1.0), 0.25, 1.0731820071493643751),
            ((2.0, 3.0, 1.5), 0.75, 174.08315931098994244),
            ((0.5, 0.5, 3.0), 0.99, 1.1290546335404151753),
        ];
        for ((a, b, c), z, v) in frozen {
            let got = hyp2f1(hp(a, b, c), z).unwrap();
            assert!(
                ((got - v) / v).abs() <= 1e-12,
                "2F1({a},{b};{c};{z}) = {got}, want {v}"
            );
        }
        assert_relative_eq!(hyp2f1(hp(1.0, 1.0, 1.0), 0.6).unwrap(), 2.5, max_relative = 1e-13);
    }

    #[test]
    fn hyp2f1_complement_keeps_precision() {
        // mpmath at z = 1 - 2e-10 taken exactly, not the rounded double
        let got = hyp2f1_with_complement(hp(0.5, 0.5, 1.0), 1.0 - 2e-10, 2e-10).unwrap();
        assert_relative_eq!(got, 7.9912627896199643398, max_relative = 1e-12);
    }

    #[test]
    fn hyp2f1_matches_elliptic_k() {
        for i in 1..=9 {
            let m = i as f64 / 10.0;
            let f = hyp2f1(hp(0.5, 0.5, 1.0), m).unwrap();
            let k = elliptic_k(m).unwrap();
            assert!((f - 2.0 / PI * k).abs() <= 1e-10 * f, "m = {m}");
        }
        assert_relative_eq!(
            hyp2f1(hp(0.5, 0.5, 1.0), 0.5).unwrap(),
            2.0 / PI * elliptic_k(0.5).unwrap(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn hyp2f1_symmetric_in_a_b() {
        for &(a, b, c) in &[(0.5, -0.5, 1.0), (0.3, 1.2, 2.7), (1.5, 0.5, 2.0)] {
            for &z in &[0.1, 0.45, 0.7, 0.95] {
                let f1 = hyp2f1(hp(a, b, c), z).unwrap();
                let f2 = hyp2f1(hp(b, a, c), z).unwrap();
                assert!((f1 - f2).abs() <= 1e-13 * f1.abs());
            }
        }
    }

    #[test]
    fn limit_classes() {
        let l = hyp2f1_limit(hp(0.5, -0.5, 1.0));
        assert_eq!(l.kind, LimitKind::FiniteLimit);
        assert_relative_eq!(l.constant, 2.0 / PI, max_relative = 1e-13);
        let l = hyp2f1_limit(hp(0.5, 0.5, 1.0));
        assert_eq!(l.kind, LimitKind::LogDivergence);
        assert_relative_eq!(l.constant, 1.0 / PI, max_relative = 1e-13);
        assert_eq!(hyp2f1_limit(hp(1.0, 1.0, 1.0)).kind, LimitKind::PowerDivergence);
    }

    #[test]
    fn finite_limit_is_approached() {
        // correction term is O((1-z)^(c-a-b)); with c-a-b = 1/2 that is 1e-3
        for &(a, b, c) in &[(0.5, -0.5, 1.0), (0.5, 0.5, 1.5), (-0.5, 0.5, 2.0)] {
            let p = hp(a, b, c);
            let lim = hyp2f1_limit(p).constant;
            let w = 1e-6;
            let v = hyp2f1_with_complement(p, 1.0 - w, w).unwrap();
            let scale = w.powf(p.excess().min(1.0)) * (1.0 - w.ln()).max(1.0);
            assert!((v - lim).abs() <= 1e-3 * lim.abs() + 10.0 * scale, "{p:?}");
        }
    }

    #[test]
    fn log_limit_is_approached() {
        let p = hp(0.5, 0.5, 1.0);
        let c = hyp2f1_limit(p).constant;
        let w = 1e-12;
        let ratio = hyp2f1_with_complement(p, 1.0 - w, w).unwrap() / (-w.ln());
        // 2F1 = (1/π)(ln 16 - ln w) + o(1)
        assert!((ratio / c - 1.0).abs() < 0.11);
    }

    #[test]
    fn power_limit_is_approached() {
        let p = hp(1.0, 1.0, 1.0);
        let lim = hyp2f1_limit(p);
        let w = 1e-4;
        let v = hyp2f1_with_complement(p, 1.0 - w, w).unwrap() / w.powf(p.excess());
        assert_relative_eq!(v, lim.constant, max_relative = 1e-10);
    }

    #[test]
    fn elliptic_k_values() {
        assert_relative_eq!(elliptic_k(0.0).unwrap(), PI / 2.0, max_relative = 1e-15);
        let frozen = [
            (0.1, 1.6124413487202194007),
            (0.5, 1.8540746773013719184),
            (0.9, 2.5780921133481732927),
            (0.999999, 8.2940514636010622019),
        ];
        for (m, v) in frozen {
            assert_relative_eq!(elliptic_k(m).unwrap(), v, max_relative = 1e-13);
        }
        assert!(elliptic_k(1.0).is_err());
    }

    #[test]
    fn elliptic_k_log_asymptote() {
        let mut prev = f64::INFINITY;
        for k in [4, 8, 12, 16] {
            let m1 = 10f64.powi(-k);
            let ratio = elliptic_k_complement(m1) / (-0.5 * m1.ln());
            let dev = (ratio - 1.0).abs();
            assert!(dev < prev);
            prev = dev;
        }
        assert!(prev < 0.08);
    }
}
