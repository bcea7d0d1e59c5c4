//! Named numerical checks, each reduced to one metric compared against a
//! tolerance, with JSON-lines and CSV reports.
//!
//! The parameterized check functions are public so that callers can rerun a
//! check at other sizes or tolerances.

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::conormal::{b_symbol, leading_singularity_symbol, puiseux_fit, ConormalError, PuiseuxFit, Side};
use crate::grid::{
    apply_p_in_place, apply_p_inverse_in_place, band_limited_spectrum, dft_forward, dft_inverse, invert_spectral,
    is_cone_bin, normal_spectral, phantom, spectral_weighted_norm, DcRule, Geometry, GridError, GridFunction, PhantomKind,
    SpectralField, Weight,
};
use crate::multiplier::{
    constant_c, estimate_log_constant_22, log_constant_22, p_cone_limit, p_eval, p_from_norms, p_minkowski,
    MultiplierError, MultiplierMethod, Signature, SplitVector,
};
use crate::quad::TanhSinh;
use crate::transform::{
    adjoint_Lt, build_sigma_grid, find_null_direction, forward_L, hyperplane_transform, kernel_check,
    normal_at_points, normal_quadrature, slice_transform, AngularResolution, RayData, TransformError,
};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("unknown check id {0:?}")]
    UnknownCheck(String),
    #[error(transparent)]
    Multiplier(#[from] MultiplierError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Conormal(#[from] ConormalError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Problem sizes: `Full` uses the sizes of the acceptance criteria, `Quick`
/// shrinks the grid-based checks to a few seconds each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Quick,
    Full,
}

impl std::str::FromStr for Scale {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quick" => Ok(Self::Quick),
            "full" => Ok(Self::Full),
            _ => Err(format!("unknown scale {s:?} (quick|full)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Config {
    pub seed: u64,
    pub scale: Scale,
}

pub const DEFAULT_SEED: u64 = 1729;

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            scale: Scale::Full,
        }
    }
}

pub const CHECK_IDS: [&str; 18] = [
    "slice_gaussian",
    "homogeneity_p",
    "swap_symmetry",
    "cone_continuity",
    "log_blowup_22",
    "closed_vs_quadrature",
    "cone_limit_beta",
    "puiseux_33",
    "puiseux_53",
    "puiseux_23",
    "symbol_dictionary",
    "adjointness",
    "kernel_homogeneity",
    "normal_two_routes",
    "roundtrip_inversion",
    "stability_ratios",
    "minkowski_nullspace",
    "minkowski_vs_pseudo",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    pub inputs_digest: String,
    pub metric: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Seconds.
    pub runtime: f64,
    pub notes: String,
}

struct Outcome {
    metric: f64,
    tolerance: f64,
    notes: String,
    inputs: serde_json::Value,
}

fn sig(a: usize, b: usize) -> Signature {
    Signature::new(a, b).expect("static signature")
}

/// The five signatures with closed forms, and their swaps.
pub fn closed_form_signatures() -> Vec<Signature> {
    [(2, 2), (2, 3), (3, 2), (3, 3), (4, 3), (3, 4), (5, 3), (3, 5)]
        .iter()
        .map(|&(a, b)| sig(a, b))
        .collect()
}

pub const KAPPA_GRID: [f64; 8] = [0.1, 0.5, 0.9, 0.999, 1.001, 1.5, 2.0, 10.0];

/// `max |p_quad / p_closed - 1|` over [`closed_form_signatures`] and
/// [`KAPPA_GRID`] at `|ξ''| = 1`.
pub fn closed_vs_quadrature_error() -> Result<f64, VerifyError> {
    let mut worst: f64 = 0.0;
    for s in closed_form_signatures() {
        for &k in &KAPPA_GRID {
            let c = p_from_norms(s, k, 1.0, MultiplierMethod::ClosedForm)?;
            let q = p_from_norms(s, k, 1.0, MultiplierMethod::Quadrature)?;
            worst = worst.max((q / c - 1.0).abs());
        }
    }
    Ok(worst)
}

/// `max |p(κ = 1 ± ε) / (C B(1/2, (n-4)/2)) - 1|` for `(2,3)` and `(3,3)`.
pub fn cone_continuity_error(eps: f64) -> Result<f64, VerifyError> {
    let mut worst: f64 = 0.0;
    for s in [sig(2, 3), sig(3, 3)] {
        let lim = p_cone_limit(s, 1.0)?;
        for k in [1.0 - eps, 1.0 + eps] {
            let p = p_from_norms(s, k, 1.0, MultiplierMethod::Auto)?;
            worst = worst.max((p / lim - 1.0).abs());
        }
    }
    Ok(worst)
}

fn random_split(s: Signature, rng: &mut ChaCha8Rng) -> SplitVector {
    let mut g = || rng.gen_range(-1.0..1.0);
    let p: Vec<f64> = (0..s.n_prime()).map(|_| g()).collect();
    let q: Vec<f64> = (0..s.n_dprime()).map(|_| g()).collect();
    SplitVector::new(p, q)
}

fn off_cone(xi: &SplitVector) -> bool {
    (xi.norm_prime() / xi.norm_dprime() - 1.0).abs() > 1e-3
}

/// `max |a p(aξ) / p(ξ) - 1|` for random `ξ` and `a ∈ [10^-2, 10^2]`.
pub fn homogeneity_error(seed: u64, samples: usize) -> Result<f64, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let sigs = closed_form_signatures();
    for i in 0..samples {
        let s = sigs[i % sigs.len()];
        let xi = random_split(s, &mut rng);
        if !off_cone(&xi) {
            continue;
        }
        let a = 10f64.powf(rng.gen_range(-2.0..2.0));
        let method = if i % 2 == 0 { MultiplierMethod::Auto } else { MultiplierMethod::Quadrature };
        let p1 = p_from_norms(s, xi.norm_prime(), xi.norm_dprime(), method)?;
        let p2 = p_from_norms(s, a * xi.norm_prime(), a * xi.norm_dprime(), method)?;
        worst = worst.max((a * p2 / p1 - 1.0).abs());
    }
    Ok(worst)
}

/// `max |p_{(n',n'')}(ξ', ξ'') / p_{(n'',n')}(ξ'', ξ') - 1|` by quadrature.
pub fn swap_symmetry_error(seed: u64, samples: usize) -> Result<f64, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigs = [sig(2, 2), sig(2, 3), sig(3, 3), sig(4, 3), sig(5, 3), sig(2, 4), sig(4, 4), sig(2, 5)];
    let mut worst: f64 = 0.0;
    for i in 0..samples {
        let s = sigs[i % sigs.len()];
        let xi = random_split(s, &mut rng);
        if !off_cone(&xi) {
            continue;
        }
        let a = p_eval(s, &xi, MultiplierMethod::Quadrature)?;
        let b = p_eval(s.swapped(), &xi.swapped(), MultiplierMethod::Quadrature)?;
        worst = worst.max((a / b - 1.0).abs());
    }
    Ok(worst)
}

/// `p` on the cone by direct quadrature of `2C ∫_0^1 (1-s²)^{(n-6)/2} ds`
/// against the closed Beta-function value.
pub fn cone_limit_beta_error() -> Result<f64, VerifyError> {
    let q = TanhSinh::default();
    let mut worst: f64 = 0.0;
    for (a, b) in [(2, 3), (3, 2), (3, 3), (4, 3), (3, 4), (5, 3), (3, 5), (2, 4), (4, 4)] {
        let s = sig(a, b);
        let e = (s.dim() as f64 - 6.0) / 2.0;
        let v = q
            .integrate(|x, _, hi| (hi * (1.0 + x)).powf(e), 0.0, 1.0)
            .map_err(MultiplierError::from)?;
        let direct = 2.0 * constant_c(s) * v.value;
        worst = worst.max((direct / p_cone_limit(s, 1.0)? - 1.0).abs());
    }
    Ok(worst)
}

/// A Puiseux fit on the `z > 0` side with the expected coefficients.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PuiseuxSummary {
    pub n_prime: usize,
    pub n_dprime: usize,
    /// Fit of `q(z) = |ξ''| p / C` as returned by the fitter.
    pub raw: Vec<(String, f64)>,
    /// Factor applied before comparing with the expected values.
    pub scale: f64,
    pub expected: Vec<(String, f64)>,
    pub max_rel_error: f64,
    #[serde(skip)]
    pub fit: Option<PuiseuxFit>,
}

const FIT_WINDOW: (f64, f64) = (1e-6, 1e-2);
const FIT_SAMPLES: usize = 60;

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

/// Fits for `(3,3)`, `(5,3)` and `(2,3)`. The `(2,3)` expectation is stated
/// for `q/2`.
pub fn puiseux_summary(n_prime: usize, n_dprime: usize) -> Result<PuiseuxSummary, VerifyError> {
    let (basis, expected, scale) = match (n_prime, n_dprime) {
        (3, 3) => (vec![r(0, 1), r(1, 1), r(2, 1)], vec![(r(0, 1), 2.0), (r(1, 1), -1.0)], 1.0),
        (5, 3) => (
            vec![r(0, 1), r(1, 1), r(2, 1), r(3, 1)],
            vec![(r(0, 1), 4.0 / 3.0), (r(2, 1), -0.5)],
            1.0,
        ),
        (2, 3) => (
            vec![r(0, 1), r(1, 2), r(1, 1), r(3, 2)],
            vec![(r(0, 1), PI / 2.0), (r(1, 2), -1.0)],
            0.5,
        ),
        _ => {
            return Err(VerifyError::Conormal(ConormalError::Domain(format!(
                "no Puiseux expectation for ({n_prime},{n_dprime})"
            ))))
        }
    };
    let s = sig(n_prime, n_dprime);
    let fit = puiseux_fit(s, Side::ZPlus, &basis, FIT_WINDOW, FIT_SAMPLES)?;
    let scaled = fit.scaled(scale);
    let mut worst: f64 = 0.0;
    for (e, want) in &expected {
        let got = scaled.coefficient(*e).unwrap_or(f64::NAN);
        let err = (got / want - 1.0).abs();
        worst = if err.is_nan() { f64::INFINITY } else { worst.max(err) };
    }
    Ok(PuiseuxSummary {
        n_prime,
        n_dprime,
        raw: fit.exponents.iter().zip(&fit.coefficients).map(|(e, c)| (e.to_string(), *c)).collect(),
        scale,
        expected: expected.iter().map(|(e, c)| (e.to_string(), *c)).collect(),
        max_rel_error: worst,
        fit: Some(fit),
    })
}

/// `max |leading symbol / b(ζ) - 1|` over the three fits and `ζ = ±1, ±2`.
pub fn symbol_dictionary_error() -> Result<f64, VerifyError> {
    let mut worst: f64 = 0.0;
    for (a, b) in [(3, 3), (5, 3), (2, 3)] {
        let s = sig(a, b);
        let fit = puiseux_summary(a, b)?.fit.expect("fit kept");
        for zeta in [1.0, -1.0, 2.0, -2.0] {
            let got = leading_singularity_symbol(&fit, s, zeta)?;
            let want = b_symbol(s, zeta)?;
            worst = worst.max((got - want).norm() / want.norm());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceParams {
    pub size: usize,
    pub spacing: f64,
    pub width: f64,
    pub samples: usize,
    pub xi_max: f64,
}

impl SliceParams {
    pub fn for_scale(scale: Scale) -> Self {
        match scale {
            Scale::Full => Self {
                size: 32,
                spacing: 0.1,
                width: 0.27,
                samples: 20,
                xi_max: 2.0,
            },
            Scale::Quick => Self {
                size: 20,
                spacing: 0.15,
                width: 0.4,
                samples: 5,
                xi_max: 1.0,
            },
        }
    }
}

/// Worst `|F_θ⊥ Lf(ξ) / f̂(ξ) - 1|` over random `ξ`, `|ξ| <= xi_max`, for a
/// centered Gaussian on `(2,2)` and `θ` from [`find_null_direction`].
pub fn slice_gaussian_error(p: &SliceParams, seed: u64) -> Result<f64, VerifyError> {
    let s = sig(2, 2);
    let g = Geometry::cube(4, p.size, p.spacing)?;
    let f = phantom(PhantomKind::Gaussian, s, &g, &[0.0; 4], p.width)?;
    let half = 0.5 * p.size as f64 * p.spacing;
    let m = p.size + 1;
    let plane = Geometry::new(vec![m; 3], vec![p.spacing; 3], vec![-half; 3])?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..p.samples {
        let dir: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let nd = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        let rad = p.xi_max * rng.gen_range(0.0..1.0f64);
        let xi: Vec<f64> = dir.iter().map(|x| x * rad / nd).collect();
        let split = SplitVector::from_flat(s, &xi).map_err(MultiplierError::from)?;
        let theta = find_null_direction(s, &split)?;
        let lf = hyperplane_transform(&f, &theta, &plane, p.spacing / 2.0)?;
        let got = slice_transform(&theta, &plane, &lf, &xi);
        let want = (2.0 * PI).powi(2) * p.width.powi(4) * (-0.5 * p.width * p.width * rad * rad).exp();
        worst = worst.max((got - want).norm() / want);
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdjointParams {
    pub size: usize,
    pub spacing: f64,
    pub angles: usize,
    pub plane_halfwidth: f64,
    pub plane_step: f64,
}

impl AdjointParams {
    pub fn for_scale(scale: Scale) -> Self {
        match scale {
            Scale::Full => Self {
                size: 20,
                spacing: 0.2,
                angles: 24,
                plane_halfwidth: 2.0,
                plane_step: 0.2,
            },
            Scale::Quick => Self {
                size: 12,
                spacing: 0.3,
                angles: 8,
                plane_halfwidth: 1.8,
                plane_step: 0.3,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdjointResult {
    /// `⟨Lf, φ⟩_Σ`.
    pub lhs: f64,
    /// `⟨f, L'φ⟩`.
    pub rhs: f64,
    pub rel_error: f64,
    pub out_of_window: usize,
}

/// Adjointness on `(2,2)` for a sum of random Gaussians `f` and a random
/// smooth `φ` on `Σ`.
pub fn adjointness(p: &AdjointParams, seed: u64) -> Result<AdjointResult, VerifyError> {
    let s = sig(2, 2);
    let g = Geometry::cube(4, p.size, p.spacing)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = 0.15 * p.size as f64 * p.spacing;
    let bumps: Vec<(Vec<f64>, f64, f64)> = (0..3)
        .map(|_| {
            (
                (0..4).map(|_| rng.gen_range(-span..span)).collect(),
                rng.gen_range(0.4..0.6),
                rng.gen_range(0.5..1.5),
            )
        })
        .collect();
    let f = GridFunction::from_fn(s, g.clone(), move |x| {
        bumps
            .iter()
            .map(|(c, w, a)| {
                let r2: f64 = x.iter().zip(c).map(|(p, q)| (p - q) * (p - q)).sum();
                a * (-r2 / (2.0 * w * w)).exp()
            })
            .sum()
    })?;
    let sg = build_sigma_grid(s, AngularResolution::uniform(p.angles), p.plane_halfwidth, p.plane_step)?;
    let lf = forward_L(&f, &sg, p.spacing / 2.0)?;
    let c0: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.4..0.4)).collect();
    let (c1, c2) = (rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
    let m = sg.plane.len();
    let mut phi = vec![0.0; sg.len() * m];
    for d in 0..sg.len() {
        let th = &sg.directions[d];
        let a = th.theta_prime[1].atan2(th.theta_prime[0]);
        let b = th.theta_dprime[1].atan2(th.theta_dprime[0]);
        let amp = 1.0 + 0.3 * (a + c1).cos() + 0.2 * (2.0 * b + c2).sin();
        for k in 0..m {
            let u = sg.plane.point(k);
            let r2: f64 = u.iter().zip(&c0).map(|(x, y)| (x - y) * (x - y)).sum();
            phi[d * m + k] = amp * (-r2 / 0.6).exp();
        }
    }
    let phi = RayData::new(sg, phi)?;
    let lhs = lf.inner(&phi)?;
    let adj = adjoint_Lt(&phi, &g)?;
    let rhs: f64 = f
        .values
        .real_parts()
        .iter()
        .zip(adj.grid.values.real_parts())
        .map(|(a, b)| a * b)
        .sum::<f64>()
        * g.cell_volume();
    Ok(AdjointResult {
        lhs,
        rhs,
        rel_error: (lhs / rhs - 1.0).abs(),
        out_of_window: adj.out_of_window,
    })
}

/// Worst of the kernel-ratio error and the profile/kernel mismatch over
/// `(2,2)`, `(2,3)`, `(3,3)`, `(5,3)`; the report for each is returned too.
pub fn kernel_homogeneity_error() -> Result<(f64, Vec<crate::transform::KernelReport>), VerifyError> {
    let mut worst: f64 = 0.0;
    let mut reports = Vec::new();
    for s in [sig(2, 2), sig(2, 3), sig(3, 3), sig(5, 3)] {
        let rep = kernel_check(s, &[1.0, 2.0, 4.0], 0.25)?;
        let want = 2f64.powi(s.dim() as i32 - 1);
        for k in &rep.kernel_ratios {
            worst = worst.max((k / want - 1.0).abs());
        }
        for pt in &rep.points {
            worst = worst.max(pt.rel_diff);
        }
        reports.push(rep);
    }
    Ok((worst, reports))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalParams {
    pub size: usize,
    pub spacing: f64,
    pub width: f64,
    pub angles: usize,
    pub pad: usize,
    /// Stride over interior points (1 = every point).
    pub stride: usize,
}

impl NormalParams {
    pub fn for_scale(scale: Scale) -> Self {
        match scale {
            Scale::Full => Self {
                size: 16,
                spacing: 0.25,
                width: 0.75,
                angles: 48,
                pad: 4,
                stride: 1,
            },
            Scale::Quick => Self {
                size: 16,
                spacing: 0.25,
                width: 0.75,
                angles: 32,
                pad: 4,
                stride: 3,
            },
        }
    }
}

fn interior(g: &Geometry, stride: usize) -> Vec<usize> {
    (0..g.len())
        .filter(|&k| {
            g.multi_index(k).iter().zip(&g.shape).all(|(&i, &n)| {
                let (lo, hi) = (n / 4, n - n / 4);
                i >= lo && i < hi && (i - lo) % stride == 0
            })
        })
        .collect()
}

/// `max |quadrature - spectral| / max |spectral|` over the inner half box.
pub fn normal_two_routes_error(p: &NormalParams) -> Result<f64, VerifyError> {
    let s = sig(2, 2);
    let g = Geometry::cube(4, p.size, p.spacing)?;
    let f = phantom(PhantomKind::Gaussian, s, &g, &[0.0; 4], p.width)?;
    let idx = interior(&g, p.stride);
    let pts: Vec<Vec<f64>> = idx.iter().map(|&k| g.point(k)).collect();
    let sg = build_sigma_grid(s, AngularResolution::uniform(p.angles), 1.0, 1.0)?;
    let quad = normal_at_points(&f, &sg, p.spacing / 2.0, &pts)?;
    let spec = normal_spectral(&f, p.pad, MultiplierMethod::Auto, DcRule::NearestShell)?.values.real_parts();
    let sv: Vec<f64> = idx.iter().map(|&k| spec[k]).collect();
    let peak = sv.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let dev = quad.iter().zip(&sv).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(dev / peak)
}

/// Bytes per grid point used by [`roundtrip_spectral_error`].
pub const ROUNDTRIP_BYTES_PER_POINT: usize = 56;

/// `MemAvailable` from `/proc/meminfo`, in bytes.
pub fn mem_available() -> Option<u64> {
    let text = std::fs::read_to_string("/proc/meminfo").ok()?;
    let line = text.lines().find(|l| l.starts_with("MemAvailable:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

/// Largest per-axis size `<= wanted` whose roundtrip fits in `frac` of the
/// available memory.
pub fn roundtrip_size(s: Signature, wanted: usize, frac: f64) -> usize {
    let Some(avail) = mem_available() else {
        return wanted;
    };
    let budget = frac * avail as f64;
    let mut n = wanted;
    while n > 2 && (n as f64).powi(s.dim() as i32) * ROUNDTRIP_BYTES_PER_POINT as f64 > budget {
        n -= 1;
    }
    n
}

fn excluded_bin(s: Signature, g: &Geometry, k: usize) -> bool {
    k == 0 || ((s.n_prime(), s.n_dprime()) == (2, 2) && is_cone_bin(s, g, k))
}

/// `p(D)^{-1} p(D) f` against `f` for a band-limited `f` on `size^n` points,
/// compared bin by bin away from `ξ = 0` (and the cone for `(2,2)`):
/// `max |rec^ - f^| / max |f^|`.
pub fn roundtrip_spectral_error(s: Signature, size: usize, seed: u64) -> Result<f64, VerifyError> {
    let h = 0.5;
    let g = Geometry::cube(s.dim(), size, h)?;
    let spec = band_limited_spectrum(s, &g, 0.8 * PI / h, seed)?;
    let f = real_part(dft_inverse(&spec))?;
    drop(spec);
    let f0 = dft_forward(&f);
    drop(f);
    let mut work = f0.clone();
    apply_p_in_place(&mut work, MultiplierMethod::Auto, DcRule::Zero)?;
    let pf = real_part(dft_inverse(&work))?;
    drop(work);
    let mut rec = dft_forward(&pf);
    drop(pf);
    apply_p_inverse_in_place(&mut rec, MultiplierMethod::Auto, DcRule::Zero)?;
    Ok(spectral_deviation(&f0, &rec, |k| excluded_bin(s, &g, k)))
}

fn real_part(f: GridFunction) -> Result<GridFunction, GridError> {
    let v = f.values.real_parts();
    GridFunction::real(f.sig, f.geom, v)
}

fn spectral_deviation(a: &SpectralField, b: &SpectralField, skip: impl Fn(usize) -> bool + Sync) -> f64 {
    use rayon::prelude::*;
    let (dev, peak) = a
        .values
        .par_iter()
        .zip(&b.values)
        .enumerate()
        .filter(|(k, _)| !skip(*k))
        .map(|(_, (x, y))| ((x - y).norm(), x.norm()))
        .reduce(|| (0.0, 0.0), |p, q| (p.0.max(q.0), p.1.max(q.1)));
    dev / peak
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadRoundtripParams {
    pub size: usize,
    pub spacing: f64,
    pub width: f64,
    pub angles: usize,
    pub pad: usize,
}

impl QuadRoundtripParams {
    pub fn for_scale(scale: Scale) -> Self {
        match scale {
            Scale::Full => Self {
                size: 16,
                spacing: 0.25,
                width: 0.75,
                angles: 32,
                pad: 4,
            },
            Scale::Quick => Self {
                size: 12,
                spacing: 0.3,
                width: 0.9,
                angles: 12,
                pad: 4,
            },
        }
    }
}

/// `p(D)^{-1}` applied to the quadrature `L'Lf` of a Gaussian on `(2,2)`:
/// relative L² error against `f` over the inner half box.
pub fn roundtrip_quadrature_error(p: &QuadRoundtripParams) -> Result<f64, VerifyError> {
    let s = sig(2, 2);
    let g = Geometry::cube(4, p.size, p.spacing)?;
    let f = phantom(PhantomKind::Gaussian, s, &g, &[0.0; 4], p.width)?;
    let sg = build_sigma_grid(s, AngularResolution::uniform(p.angles), 1.0, 1.0)?;
    let n = normal_quadrature(&f, &sg, p.spacing / 2.0)?;
    let rec = invert_spectral(&n, p.pad, MultiplierMethod::Auto, DcRule::NearestShell)?
        .values
        .real_parts();
    let fv = f.values.real_parts();
    let (mut num, mut den) = (0.0, 0.0);
    for k in interior(&g, 1) {
        num += (rec[k] - fv[k]).powi(2);
        den += fv[k].powi(2);
    }
    Ok((num / den).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityParams {
    pub size: usize,
    pub phantoms: usize,
}

impl StabilityParams {
    pub fn for_scale(scale: Scale, s: Signature) -> Self {
        let size = match (scale, s.dim()) {
            (Scale::Full, 4) => 16,
            (Scale::Full, _) => 10,
            (Scale::Quick, 4) => 10,
            (Scale::Quick, _) => 6,
        };
        let phantoms = if scale == Scale::Full { 20 } else { 5 };
        Self { size, phantoms }
    }
}

/// `max/min` over seeded band-limited phantoms of
/// `‖L'Lf‖_weight / ‖f‖_{L²}`, with `L'L` applied spectrally.
pub fn stability_ratio(s: Signature, weight: Weight, p: &StabilityParams, seed: u64) -> Result<f64, VerifyError> {
    let h = 0.5;
    let g = Geometry::cube(s.dim(), p.size, h)?;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..p.phantoms {
        let spec = band_limited_spectrum(s, &g, 0.8 * PI / h, seed.wrapping_add(i as u64))?;
        let l2 = spectral_weighted_norm(&spec, Weight::L2)?;
        let mut out = spec;
        apply_p_in_place(&mut out, MultiplierMethod::Auto, DcRule::Zero)?;
        let r = spectral_weighted_norm(&out, weight)? / l2;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok(hi / lo)
}

/// `max |p(τ, ξ)|` over random timelike samples `|ξ| < |τ|` in `d = 3`.
pub fn minkowski_nullspace_max(seed: u64, samples: usize) -> Result<f64, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let tau: f64 = rng.gen_range(0.1..10.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let dir: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let nd = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        let rad = tau.abs() * rng.gen_range(0.0..0.999);
        let xi: Vec<f64> = dir.iter().map(|x| x * rad / nd).collect();
        worst = worst.max(p_minkowski(3, tau, &xi)?.abs());
    }
    Ok(worst)
}

/// `inf |ξ| p(ξ)` over the unit sphere, sampled in the block angle; points
/// with `|κ - 1| < kappa_gap` are skipped.
pub fn pseudo_inf(s: Signature, kappa_gap: f64, samples: usize) -> Result<f64, VerifyError> {
    let mut best = f64::INFINITY;
    for i in 0..=samples {
        let phi = 0.5 * PI * i as f64 / samples as f64;
        let (a, b) = (phi.cos(), phi.sin());
        if b > 0.0 && (a / b - 1.0).abs() < kappa_gap {
            continue;
        }
        if b == 0.0 && a == 0.0 {
            continue;
        }
        match p_from_norms(s, a, b.max(0.0), MultiplierMethod::Auto) {
            Ok(p) => best = best.min(p),
            Err(MultiplierError::ConeDivergence { .. }) => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(best)
}

pub const PSEUDO_KAPPA_GAP_22: f64 = 0.05;

fn timed(id: &str, cfg: &Config) -> Result<Outcome, VerifyError> {
    let quick = cfg.scale == Scale::Quick;
    let seed = cfg.seed;
    Ok(match id {
        "slice_gaussian" => {
            let p = SliceParams::for_scale(cfg.scale);
            Outcome {
                metric: slice_gaussian_error(&p, seed)?,
                tolerance: 5e-3,
                notes: "max relative residual of the hyperplane transform against the Gaussian f^".into(),
                inputs: json!(p),
            }
        }
        "homogeneity_p" => {
            let n = if quick { 200 } else { 2000 };
            Outcome {
                metric: homogeneity_error(seed, n)?,
                tolerance: 1e-12,
                notes: "max |a p(a xi)/p(xi) - 1|".into(),
                inputs: json!({ "samples": n }),
            }
        }
        "swap_symmetry" => {
            let n = if quick { 40 } else { 400 };
            Outcome {
                metric: swap_symmetry_error(seed, n)?,
                tolerance: 1e-10,
                notes: "max relative difference under (n', xi') <-> (n'', xi'')".into(),
                inputs: json!({ "samples": n }),
            }
        }
        "cone_continuity" => Outcome {
            metric: cone_continuity_error(1e-6)?,
            tolerance: 1e-3,
            notes: "(2,3), (3,3) at kappa = 1 +- 1e-6 against C B(1/2,(n-4)/2)/|xi''|".into(),
            inputs: json!({ "eps": 1e-6 }),
        },
        "log_blowup_22" => {
            let e = estimate_log_constant_22(1e-10)?;
            Outcome {
                metric: (e.value / log_constant_22() - 1.0).abs(),
                tolerance: 5e-3,
                notes: format!(
                    "slope estimate {:.6} (below {:.6}, above {:.6}) vs 8 pi = {:.6}; |xi|-normalized slope {:.6}",
                    e.value,
                    e.below,
                    e.above,
                    log_constant_22(),
                    e.value_full_norm
                ),
                inputs: json!({ "eps": 1e-10 }),
            }
        }
        "closed_vs_quadrature" => Outcome {
            metric: closed_vs_quadrature_error()?,
            tolerance: 1e-8,
            notes: "max |p_quad/p_closed - 1| over the kappa grid".into(),
            inputs: json!({ "kappa": KAPPA_GRID }),
        },
        "cone_limit_beta" => Outcome {
            metric: cone_limit_beta_error()?,
            tolerance: 1e-10,
            notes: "direct quadrature on the cone vs the Beta-function value".into(),
            inputs: json!({}),
        },
        "puiseux_33" | "puiseux_53" | "puiseux_23" => {
            let (a, b) = match id {
                "puiseux_33" => (3, 3),
                "puiseux_53" => (5, 3),
                _ => (2, 3),
            };
            let sum = puiseux_summary(a, b)?;
            Outcome {
                metric: sum.max_rel_error,
                tolerance: 0.02,
                notes: format!("fit {:?}, scale {} vs expected {:?}", sum.raw, sum.scale, sum.expected),
                inputs: json!({ "window": FIT_WINDOW, "samples": FIT_SAMPLES }),
            }
        }
        "symbol_dictionary" => Outcome {
            metric: symbol_dictionary_error()?,
            tolerance: 0.02,
            notes: "leading Puiseux symbol vs b(zeta) at zeta = +-1, +-2".into(),
            inputs: json!({ "window": FIT_WINDOW, "samples": FIT_SAMPLES }),
        },
        "adjointness" => {
            let p = AdjointParams::for_scale(cfg.scale);
            let res = adjointness(&p, seed)?;
            Outcome {
                metric: res.rel_error,
                tolerance: 0.01,
                notes: format!(
                    "<Lf,phi> = {:.10}, <f,L'phi> = {:.10}, {} out-of-window evaluations",
                    res.lhs, res.rhs, res.out_of_window
                ),
                inputs: json!(p),
            }
        }
        "kernel_homogeneity" => {
            let (m, reps) = kernel_homogeneity_error()?;
            let notes = reps
                .iter()
                .map(|r| {
                    format!(
                        "{}: kernel ratios {:?}, fixed-width ratios {:?}, off-cone {:.2e}",
                        r.sig, r.kernel_ratios, r.fixed_width_ratios, r.off_cone_ratio
                    )
                })
                .collect::<Vec<_>>()
                .join("; ");
            Outcome {
                metric: m,
                tolerance: 0.1,
                notes,
                inputs: json!({ "radii": [1.0, 2.0, 4.0], "width": 0.25 }),
            }
        }
        "normal_two_routes" => {
            let p = NormalParams::for_scale(cfg.scale);
            Outcome {
                metric: normal_two_routes_error(&p)?,
                tolerance: 0.02,
                notes: "sup deviation of quadrature vs zero-padded spectral L'L on the inner half box".into(),
                inputs: json!(p),
            }
        }
        "roundtrip_inversion" => {
            let wanted = if quick { 6 } else { 12 };
            let mut worst: f64 = 0.0;
            let mut notes = Vec::new();
            for (a, b) in [(2, 2), (2, 3), (3, 3), (4, 3), (5, 3)] {
                let s = sig(a, b);
                let n = roundtrip_size(s, wanted, 0.7);
                let e = roundtrip_spectral_error(s, n, seed)?;
                if n < wanted {
                    // a smaller grid does not count toward the check
                    worst = f64::INFINITY;
                    notes.push(format!("{s} needs {wanted}^{} points, memory allows {n}^{}: {e:.2e}", s.dim(), s.dim()));
                } else {
                    worst = worst.max(e / 1e-10);
                    notes.push(format!("{s} at {n}^{}: {e:.2e}", s.dim()));
                }
            }
            let p = QuadRoundtripParams::for_scale(cfg.scale);
            let e = roundtrip_quadrature_error(&p)?;
            worst = worst.max(e / 0.1);
            notes.push(format!("quadrature route {e:.4}"));
            Outcome {
                metric: worst,
                tolerance: 1.0,
                notes: format!("metric is the worst error over its tolerance (1e-10 spectral, 0.1 quadrature); {}", notes.join(", ")),
                inputs: json!({ "size": wanted, "quadrature": p }),
            }
        }
        "stability_ratios" => {
            let p22 = StabilityParams::for_scale(cfg.scale, sig(2, 2));
            let p33 = StabilityParams::for_scale(cfg.scale, sig(3, 3));
            let r22 = stability_ratio(sig(2, 2), Weight::H1_22, &p22, seed)?;
            let r33 = stability_ratio(sig(3, 3), Weight::H1, &p33, seed)?;
            Outcome {
                metric: r22.max(r33),
                tolerance: 50.0,
                notes: format!("(2,2) with sigma weight: {r22:.4}; (3,3) with <xi>: {r33:.4}"),
                inputs: json!({ "p22": p22, "p33": p33 }),
            }
        }
        "minkowski_nullspace" => {
            let n = 1000;
            Outcome {
                metric: minkowski_nullspace_max(seed, n)?,
                tolerance: 0.0,
                notes: "max |p(tau, xi)| over timelike samples, d = 3".into(),
                inputs: json!({ "samples": n, "d": 3 }),
            }
        }
        "minkowski_vs_pseudo" => {
            let n = if quick { 200 } else { 2000 };
            let mut rows = Vec::new();
            for (a, b) in [(2, 2), (2, 3), (3, 3), (4, 3), (5, 3)] {
                let s = sig(a, b);
                let gap = if s.dim() == 4 { PSEUDO_KAPPA_GAP_22 } else { 0.0 };
                rows.push(format!("{s}: inf |xi| p = {:.6}", pseudo_inf(s, gap, n)?));
            }
            let mk = minkowski_nullspace_max(seed, 200)?;
            rows.push(format!("Minkowski d=3 timelike: max |p| = {mk}"));
            Outcome {
                metric: mk,
                tolerance: f64::MAX,
                notes: format!("contrast report, not a pass/fail check; {}", rows.join("; ")),
                inputs: json!({ "samples": n, "kappa_gap_22": PSEUDO_KAPPA_GAP_22 }),
            }
        }
        other => return Err(VerifyError::UnknownCheck(other.into())),
    })
}

pub fn run_check(id: &str, cfg: &Config) -> Result<CheckReport, VerifyError> {
    if !CHECK_IDS.contains(&id) {
        return Err(VerifyError::UnknownCheck(id.into()));
    }
    let start = Instant::now();
    let o = timed(id, cfg)?;
    let inputs = json!({ "id": id, "seed": cfg.seed, "scale": cfg.scale, "inputs": o.inputs });
    let digest = Sha256::digest(inputs.to_string().as_bytes());
    Ok(CheckReport {
        id: id.into(),
        inputs_digest: digest.iter().map(|b| format!("{b:02x}")).collect(),
        metric: o.metric,
        tolerance: o.tolerance,
        passed: o.metric <= o.tolerance,
        runtime: start.elapsed().as_secs_f64(),
        notes: o.notes,
    })
}

pub fn run_all(cfg: &Config) -> Result<Vec<CheckReport>, VerifyError> {
    CHECK_IDS.iter().map(|id| run_check(id, cfg)).collect()
}

pub fn write_jsonl<W: Write>(reports: &[CheckReport], mut out: W) -> Result<(), VerifyError> {
    for r in reports {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl(text: &str) -> Result<Vec<CheckReport>, VerifyError> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(VerifyError::from))
        .collect()
}

pub fn write_csv<W: Write>(reports: &[CheckReport], mut out: W) -> Result<(), VerifyError> {
    writeln!(out, "id,metric,tolerance,passed,runtime")?;
    for r in reports {
        writeln!(out, "{},{:e},{:e},{},{:.3}", r.id, r.metric, r.tolerance, r.passed, r.runtime)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique_and_dispatch() {
        let mut ids = CHECK_IDS.to_vec();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), 18);
        assert!(matches!(
            run_check("no_such_check", &Config::default()),
            Err(VerifyError::UnknownCheck(_))
        ));
    }

    #[test]
    fn fast_checks_pass() {
        let cfg = Config {
            seed: 3,
            scale: Scale::Quick,
        };
        for id in [
            "homogeneity_p",
            "swap_symmetry",
            "cone_continuity",
            "log_blowup_22",
            "closed_vs_quadrature",
            "cone_limit_beta",
            "puiseux_33",
            "puiseux_53",
            "puiseux_23",
            "symbol_dictionary",
            "minkowski_nullspace",
            "minkowski_vs_pseudo",
        ] {
            let r = run_check(id, &cfg).unwrap();
            assert!(r.passed, "{id}: {r:?}");
            assert_eq!(r.inputs_digest.len(), 64);
        }
    }

    #[test]
    fn reports_are_deterministic_and_roundtrip() {
        let cfg = Config {
            seed: 11,
            scale: Scale::Quick,
        };
        let a = run_check("minkowski_nullspace", &cfg).unwrap();
        let b = run_check("minkowski_nullspace", &cfg).unwrap();
        assert_eq!((a.metric, &a.inputs_digest), (b.metric, &b.inputs_digest));
        let mut buf = Vec::new();
        write_jsonl(&[a.clone(), b], &mut buf).unwrap();
        let back = read_jsonl(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back[0], a);
        let mut csv = Vec::new();
        write_csv(&back, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("id,metric,tolerance,passed,runtime\nminkowski_nullspace,"));
    }

    #[test]
    fn contrast_report_always_passes() {
        let r = run_check("minkowski_vs_pseudo", &Config { seed: 1, scale: Scale::Quick }).unwrap();
        assert!(r.passed && r.tolerance == f64::MAX);
        let back: CheckReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn small_roundtrips() {
        for (a, b) in [(2, 2), (3, 3)] {
            let e = roundtrip_spectral_error(sig(a, b), 6, 5).unwrap();
            assert!(e < 1e-10, "{a},{b}: {e}");
        }
    }

    #[test]
    fn pseudo_bounds_positive() {
        for (a, b) in [(2, 2), (3, 3), (2, 3)] {
            let gap = if a + b == 4 { PSEUDO_KAPPA_GAP_22 } else { 0.0 };
            assert!(pseudo_inf(sig(a, b), gap, 200).unwrap() > 0.1);
        }
    }
}
