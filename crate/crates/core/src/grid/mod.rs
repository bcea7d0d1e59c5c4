//! Sampled functions on uniform grids, the discrete Fourier transform
//! approximating `f̂(ξ) = ∫ e^{-ix·ξ} f(x) dx`, and application of `p(D)`
//! and `p(D)^{-1}`.
//!
//! Frequencies: bin `k` on an axis with `N` samples of step `h` sits at
//! `ξ = 2π k̃ / (N h)` with `k̃ = k` for `k <= (N-1)/2` and `k - N` otherwise.
//! The forward transform is `F_k = (Π h_j) e^{-i o·ξ_k} DFT[f]_k` with `o` the
//! grid origin, so that `F` approximates `f̂` at `ξ_k`.

mod fft;
pub mod io;

use std::collections::HashMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::multiplier::{self, MultiplierError, MultiplierMethod, Signature};

#[derive(Debug, Error)]
pub enum GridError {
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error(transparent)]
    Multiplier(#[from] MultiplierError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad file: {0}")]
    Format(String),
}

/// Shape, step and origin of a uniform grid in `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub shape: Vec<usize>,
    pub spacing: Vec<f64>,
    pub origin: Vec<f64>,
}

impl Geometry {
    pub fn new(shape: Vec<usize>, spacing: Vec<f64>, origin: Vec<f64>) -> Result<Self, GridError> {
        let g = Self {
            shape,
            spacing,
            origin,
        };
        g.validate()?;
        Ok(g)
    }

    /// Grid with sample `N_j / 2` (integer division) at the origin of each axis.
    pub fn centered(shape: Vec<usize>, spacing: Vec<f64>) -> Result<Self, GridError> {
        let origin = shape
            .iter()
            .zip(&spacing)
            .map(|(n, h)| -((n / 2) as f64) * h)
            .collect();
        Self::new(shape, spacing, origin)
    }

    /// Same shape and step on every axis.
    pub fn cube(n: usize, size: usize, spacing: f64) -> Result<Self, GridError> {
        Self::centered(vec![size; n], vec![spacing; n])
    }

    pub fn validate(&self) -> Result<(), GridError> {
        let n = self.shape.len();
        if n == 0 || self.spacing.len() != n || self.origin.len() != n {
            return Err(GridError::Geometry(format!(
                "shape, spacing and origin lengths differ ({}, {}, {})",
                n,
                self.spacing.len(),
                self.origin.len()
            )));
        }
        if self.shape.iter().any(|&s| s < 2) {
            return Err(GridError::Geometry("every axis needs at least 2 samples".into()));
        }
        if self.spacing.iter().any(|h| !(*h > 0.0) || !h.is_finite()) {
            return Err(GridError::Geometry("spacing must be positive and finite".into()));
        }
        if self.origin.iter().any(|o| !o.is_finite()) {
            return Err(GridError::Geometry("origin must be finite".into()));
        }
        self.shape
            .iter()
            .try_fold(1usize, |acc, &s| acc.checked_mul(s))
            .ok_or_else(|| GridError::Geometry("sample count overflows".into()))?;
        Ok(())
    }

    pub fn ndim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    /// Volume of one frequency cell, `Π 2π/(N_j h_j)`.
    pub fn frequency_cell_volume(&self) -> f64 {
        self.shape
            .iter()
            .zip(&self.spacing)
            .map(|(n, h)| 2.0 * std::f64::consts::PI / (*n as f64 * h))
            .product()
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut m = vec![0; self.ndim()];
        for a in (0..self.ndim()).rev() {
            m[a] = flat % self.shape[a];
            flat /= self.shape[a];
        }
        m
    }

    pub fn flat_index(&self, m: &[usize]) -> usize {
        m.iter().zip(&self.shape).fold(0, |acc, (i, s)| acc * s + i)
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.origin[a] + i as f64 * self.spacing[a])
            .collect()
    }

    /// Coordinates along one axis.
    pub fn axis(&self, a: usize) -> Vec<f64> {
        (0..self.shape[a])
            .map(|i| self.origin[a] + i as f64 * self.spacing[a])
            .collect()
    }

    /// Signed wrapped index of bin `k`.
    pub fn signed_bin(n: usize, k: usize) -> i64 {
        if k <= (n - 1) / 2 {
            k as i64
        } else {
            k as i64 - n as i64
        }
    }

    /// Frequencies along one axis in bin order.
    pub fn frequencies(&self, a: usize) -> Vec<f64> {
        let n = self.shape[a];
        let d = 2.0 * std::f64::consts::PI / (n as f64 * self.spacing[a]);
        (0..n).map(|k| Self::signed_bin(n, k) as f64 * d).collect()
    }

    pub fn frequency(&self, flat: usize) -> Vec<f64> {
        let freqs: Vec<Vec<f64>> = (0..self.ndim()).map(|a| self.frequencies(a)).collect();
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(a, &k)| freqs[a][k])
            .collect()
    }

    /// Flat index of the bin holding `-ξ_k`.
    pub fn mirror_bin(&self, flat: usize) -> usize {
        let m: Vec<usize> = self
            .multi_index(flat)
            .iter()
            .zip(&self.shape)
            .map(|(&k, &n)| (n - k) % n)
            .collect();
        self.flat_index(&m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridValues {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl GridValues {
    pub fn len(&self) -> usize {
        match self {
            Self::Real(v) => v.len(),
            Self::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        match self {
            Self::Real(v) => v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            Self::Complex(v) => v.clone(),
        }
    }

    /// Real parts (the values themselves for real data).
    pub fn real_parts(&self) -> Vec<f64> {
        match self {
            Self::Real(v) => v.clone(),
            Self::Complex(v) => v.iter().map(|c| c.re).collect(),
        }
    }

    /// Largest `|Im|` over the samples.
    pub fn max_imag(&self) -> f64 {
        match self {
            Self::Real(_) => 0.0,
            Self::Complex(v) => v.iter().fold(0.0, |m, c| m.max(c.im.abs())),
        }
    }
}

/// A sampled function with its signature and geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub sig: Signature,
    pub geom: Geometry,
    pub values: GridValues,
}

impl GridFunction {
    pub fn new(sig: Signature, geom: Geometry, values: GridValues) -> Result<Self, GridError> {
        geom.validate()?;
        if geom.ndim() != sig.dim() {
            return Err(GridError::Geometry(format!(
                "grid has {} axes, signature {sig} needs {}",
                geom.ndim(),
                sig.dim()
            )));
        }
        if values.len() != geom.len() {
            return Err(GridError::Geometry(format!(
                "{} values for {} samples",
                values.len(),
                geom.len()
            )));
        }
        Ok(Self { sig, geom, values })
    }

    pub fn real(sig: Signature, geom: Geometry, values: Vec<f64>) -> Result<Self, GridError> {
        Self::new(sig, geom, GridValues::Real(values))
    }

    pub fn zeros(sig: Signature, geom: Geometry) -> Result<Self, GridError> {
        let n = geom.len();
        Self::real(sig, geom, vec![0.0; n])
    }

    /// Evaluates `f` at every grid point.
    pub fn from_fn<F>(sig: Signature, geom: Geometry, f: F) -> Result<Self, GridError>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        geom.validate()?;
        let values = (0..geom.len())
            .into_par_iter()
            .map(|i| f(&geom.point(i)))
            .collect();
        Self::real(sig, geom, values)
    }

    /// Sum of values times the cell volume.
    pub fn integral(&self) -> f64 {
        self.values.real_parts().iter().sum::<f64>() * self.geom.cell_volume()
    }

    pub fn l2_norm(&self) -> f64 {
        let s: f64 = match &self.values {
            GridValues::Real(v) => v.iter().map(|x| x * x).sum(),
            GridValues::Complex(v) => v.iter().map(|c| c.norm_sqr()).sum(),
        };
        (s * self.geom.cell_volume()).sqrt()
    }
}

/// Spectral samples `F_k ≈ f̂(ξ_k)`; `geom` is the spatial geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub sig: Signature,
    pub geom: Geometry,
    pub values: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(sig: Signature, geom: Geometry, values: Vec<Complex64>) -> Result<Self, GridError> {
        geom.validate()?;
        if geom.ndim() != sig.dim() || values.len() != geom.len() {
            return Err(GridError::Geometry("spectral field does not match geometry".into()));
        }
        Ok(Self { sig, geom, values })
    }
}

/// `e^{∓ i o_j ξ_j}` per axis, combined with `scale`, applied to every bin.
fn apply_origin_phase(values: &mut [Complex64], geom: &Geometry, sign: f64, scale: f64) {
    let phases: Vec<Vec<Complex64>> = (0..geom.ndim())
        .map(|a| {
            let o = geom.origin[a];
            geom.frequencies(a)
                .iter()
                .map(|xi| Complex64::from_polar(1.0, sign * o * xi))
                .collect()
        })
        .collect();
    let last = geom.ndim() - 1;
    let n_last = geom.shape[last];
    values
        .par_chunks_mut(n_last)
        .enumerate()
        .for_each(|(line, chunk)| {
            let m = geom.multi_index(line * n_last);
            let mut lead = Complex64::new(scale, 0.0);
            for a in 0..last {
                lead *= phases[a][m[a]];
            }
            for (k, v) in chunk.iter_mut().enumerate() {
                *v *= lead * phases[last][k];
            }
        });
}

pub fn dft_forward(f: &GridFunction) -> SpectralField {
    let mut values = f.values.to_complex();
    fft::fft_nd(&mut values, &f.geom.shape, FftDirection::Forward);
    apply_origin_phase(&mut values, &f.geom, -1.0, f.geom.cell_volume());
    SpectralField {
        sig: f.sig,
        geom: f.geom.clone(),
        values,
    }
}

pub fn dft_inverse(spec: &SpectralField) -> GridFunction {
    let mut values = spec.values.clone();
    let scale = 1.0 / (spec.geom.cell_volume() * spec.geom.len() as f64);
    apply_origin_phase(&mut values, &spec.geom, 1.0, scale);
    fft::fft_nd(&mut values, &spec.geom.shape, FftDirection::Inverse);
    GridFunction {
        sig: spec.sig,
        geom: spec.geom.clone(),
        values: GridValues::Complex(values),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhantomKind {
    Gaussian,
    #[serde(rename = "bump")]
    SmoothBump,
}

impl std::str::FromStr for PhantomKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gaussian" => Ok(Self::Gaussian),
            "bump" | "smooth-bump" => Ok(Self::SmoothBump),
            _ => Err(format!("unknown phantom kind {s:?} (gaussian|bump)")),
        }
    }
}

/// Gaussian `exp(-|x-c|²/(2w²))` or bump `exp(1 - 1/(1-r²))`, `r = |x-c|/w < 1`.
pub fn phantom(
    kind: PhantomKind,
    sig: Signature,
    geom: &Geometry,
    center: &[f64],
    width: f64,
) -> Result<GridFunction, GridError> {
    if !(width > 0.0) || !width.is_finite() {
        return Err(GridError::Geometry(format!("width {width} must be positive")));
    }
    if center.len() != geom.ndim() {
        return Err(GridError::Geometry("center has the wrong dimension".into()));
    }
    let c = center.to_vec();
    GridFunction::from_fn(sig, geom.clone(), move |x| {
        let r2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / (width * width);
        match kind {
            PhantomKind::Gaussian => (-0.5 * r2).exp(),
            PhantomKind::SmoothBump => {
                if r2 < 1.0 {
                    (1.0 - 1.0 / (1.0 - r2)).exp()
                } else {
                    0.0
                }
            }
        }
    })
}

/// Random spectrum supported on `0 < |ξ| <= band`, Hermitian so that its
/// inverse transform is real.
pub fn band_limited_spectrum(
    sig: Signature,
    geom: &Geometry,
    band: f64,
    seed: u64,
) -> Result<SpectralField, GridError> {
    geom.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = geom.len();
    let raw: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let values = (0..n)
        .map(|k| {
            let xi = geom.frequency(k);
            let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
            if r == 0.0 || r > band {
                return Complex64::new(0.0, 0.0);
            }
            0.5 * (raw[k] + raw[geom.mirror_bin(k)].conj())
        })
        .collect();
    SpectralField::new(sig, geom.clone(), values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DcRule {
    #[default]
    Zero,
    #[serde(rename = "nearest")]
    NearestShell,
}

impl std::str::FromStr for DcRule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zero" => Ok(Self::Zero),
            "nearest" | "nearest-shell" => Ok(Self::NearestShell),
            _ => Err(format!("unknown dc rule {s:?} (zero|nearest)")),
        }
    }
}

/// Per-bin factors of `p(ξ)` (or `1/p`), stored through lookup tables over
/// the distinct values of `|ξ'|²` and `|ξ''|²`.
struct BinTable {
    n_dprime_bins: usize,
    prime_idx: Vec<u32>,
    dprime_idx: Vec<u32>,
    n_unique_dprime: usize,
    factors: Vec<f64>,
}

impl BinTable {
    fn factor(&self, flat: usize) -> f64 {
        let ip = flat / self.n_dprime_bins;
        let id = flat % self.n_dprime_bins;
        self.factors[self.prime_idx[ip] as usize * self.n_unique_dprime + self.dprime_idx[id] as usize]
    }
}

/// Squared block norms for every bin of a block of axes, and their dedup.
fn block_norms(geom: &Geometry, axes: std::ops::Range<usize>) -> (Vec<u32>, Vec<f64>) {
    let shape: Vec<usize> = geom.shape[axes.clone()].to_vec();
    let freqs: Vec<Vec<f64>> = axes.clone().map(|a| geom.frequencies(a)).collect();
    let count: usize = shape.iter().product();
    let mut uniq: Vec<f64> = Vec::new();
    let mut lookup: HashMap<u64, u32> = HashMap::new();
    let mut idx = Vec::with_capacity(count);
    let mut m = vec![0usize; shape.len()];
    for _ in 0..count {
        let r2: f64 = m.iter().enumerate().map(|(j, &k)| freqs[j][k] * freqs[j][k]).sum();
        let id = *lookup.entry(r2.to_bits()).or_insert_with(|| {
            uniq.push(r2);
            (uniq.len() - 1) as u32
        });
        idx.push(id);
        for j in (0..shape.len()).rev() {
            m[j] += 1;
            if m[j] < shape[j] {
                break;
            }
            m[j] = 0;
        }
    }
    (idx, uniq)
}

fn on_cone(r1sq: f64, r2sq: f64) -> bool {
    (r1sq - r2sq).abs() <= 1e-12 * (r1sq + r2sq)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Forward,
    Inverse,
}

fn bin_table(
    sig: Signature,
    geom: &Geometry,
    method: MultiplierMethod,
    mode: Mode,
) -> Result<BinTable, GridError> {
    let np = sig.n_prime();
    let (prime_idx, up) = block_norms(geom, 0..np);
    let (dprime_idx, ud) = block_norms(geom, np..sig.dim());
    let nd = ud.len();
    let factors = up
        .par_iter()
        .flat_map_iter(|&a| ud.iter().map(move |&b| (a, b)))
        .map(|(a, b)| {
            if a == 0.0 && b == 0.0 {
                return Ok(f64::NAN);
            }
            match multiplier::p_from_norms(sig, a.sqrt(), b.sqrt(), method) {
                Ok(p) => Ok(match mode {
                    Mode::Forward => p,
                    Mode::Inverse => 1.0 / p,
                }),
                Err(MultiplierError::ConeDivergence { .. }) => Ok(match mode {
                    Mode::Forward => f64::INFINITY,
                    Mode::Inverse => 0.0,
                }),
                Err(e) => Err(GridError::from(e)),
            }
        })
        .collect::<Result<Vec<f64>, GridError>>()?;
    Ok(BinTable {
        n_dprime_bins: dprime_idx.len(),
        prime_idx,
        dprime_idx,
        n_unique_dprime: nd,
        factors,
    })
}

/// `p` at the first-axis frequency `2π/(N_0 h_0)`.
fn nearest_shell_p(sig: Signature, geom: &Geometry, method: MultiplierMethod) -> Result<f64, GridError> {
    let r = 2.0 * std::f64::consts::PI / (geom.shape[0] as f64 * geom.spacing[0]);
    Ok(multiplier::p_from_norms(sig, r, 0.0, method)?)
}

/// Off-cone axis neighbor of an on-cone bin minimizing `|κ - 1|`.
fn off_cone_neighbor_factor(geom: &Geometry, table: &BinTable, flat: usize, np: usize) -> f64 {
    let m = geom.multi_index(flat);
    let mut best = (f64::INFINITY, f64::INFINITY);
    for a in 0..geom.ndim() {
        for step in [1, geom.shape[a] - 1] {
            let mut mm = m.clone();
            mm[a] = (mm[a] + step) % geom.shape[a];
            let xi = geom.frequency(geom.flat_index(&mm));
            let r1: f64 = xi[..np].iter().map(|x| x * x).sum::<f64>().sqrt();
            let r2: f64 = xi[np..].iter().map(|x| x * x).sum::<f64>().sqrt();
            if on_cone(r1 * r1, r2 * r2) || (r1 == 0.0 && r2 == 0.0) {
                continue;
            }
            let dist = if r2 > 0.0 { (r1 / r2 - 1.0).abs() } else { f64::INFINITY };
            let f = table.factor(geom.flat_index(&mm));
            if dist < best.0 || (dist == best.0 && f < best.1) {
                best = (dist, f);
            }
        }
    }
    best.1
}

fn apply_table(
    spec: &mut SpectralField,
    method: MultiplierMethod,
    dc: DcRule,
    mode: Mode,
) -> Result<(), GridError> {
    let sig = spec.sig;
    let geom = &spec.geom;
    if geom.ndim() != sig.dim() {
        return Err(GridError::Geometry("signature and grid dimension differ".into()));
    }
    let table = bin_table(sig, geom, method, mode)?;
    let dc_factor = match (dc, mode) {
        (DcRule::Zero, _) => 0.0,
        (DcRule::NearestShell, Mode::Forward) => nearest_shell_p(sig, geom, method)?,
        (DcRule::NearestShell, Mode::Inverse) => 1.0 / nearest_shell_p(sig, geom, method)?,
    };
    let np = sig.n_prime();
    let n_last = geom.shape[geom.ndim() - 1];
    spec.values
        .par_chunks_mut(n_last)
        .enumerate()
        .for_each(|(line, chunk)| {
            for (j, v) in chunk.iter_mut().enumerate() {
                let flat = line * n_last + j;
                let mut f = table.factor(flat);
                if flat == 0 {
                    f = dc_factor;
                } else if f.is_infinite() {
                    f = off_cone_neighbor_factor(geom, &table, flat, np);
                }
                *v *= f;
            }
        });
    Ok(())
}

/// Multiplies each bin by `p(ξ)`. The `ξ = 0` bin follows `dc`; for `(2,2)`
/// bins on the cone take `p` of the off-cone axis neighbor closest in `κ`.
pub fn apply_p(spec: &SpectralField, method: MultiplierMethod, dc: DcRule) -> Result<SpectralField, GridError> {
    let mut out = spec.clone();
    apply_p_in_place(&mut out, method, dc)?;
    Ok(out)
}

pub fn apply_p_in_place(spec: &mut SpectralField, method: MultiplierMethod, dc: DcRule) -> Result<(), GridError> {
    apply_table(spec, method, dc, Mode::Forward)
}

/// Divides each bin by `p(ξ)`; `(2,2)` cone bins map to zero.
pub fn apply_p_inverse(
    spec: &SpectralField,
    method: MultiplierMethod,
    dc: DcRule,
) -> Result<SpectralField, GridError> {
    let mut out = spec.clone();
    apply_p_inverse_in_place(&mut out, method, dc)?;
    Ok(out)
}

pub fn apply_p_inverse_in_place(
    spec: &mut SpectralField,
    method: MultiplierMethod,
    dc: DcRule,
) -> Result<(), GridError> {
    apply_table(spec, method, dc, Mode::Inverse)
}

/// Embeds `f` in a grid `factor` times larger per axis, centered, zero
/// outside. The original samples keep their coordinates.
pub fn zero_pad(f: &GridFunction, factor: usize) -> Result<GridFunction, GridError> {
    if factor == 0 {
        return Err(GridError::Geometry("padding factor must be at least 1".into()));
    }
    if factor == 1 {
        return Ok(f.clone());
    }
    let g = &f.geom;
    let off: Vec<usize> = g.shape.iter().map(|n| (factor - 1) * n / 2).collect();
    let big = Geometry::new(
        g.shape.iter().map(|n| n * factor).collect(),
        g.spacing.clone(),
        (0..g.ndim()).map(|a| g.origin[a] - off[a] as f64 * g.spacing[a]).collect(),
    )?;
    let src = f.values.to_complex();
    let mut out = vec![Complex64::new(0.0, 0.0); big.len()];
    for (k, v) in src.iter().enumerate() {
        let m: Vec<usize> = g.multi_index(k).iter().zip(&off).map(|(i, o)| i + o).collect();
        out[big.flat_index(&m)] = *v;
    }
    let values = match f.values {
        GridValues::Real(_) => GridValues::Real(out.iter().map(|c| c.re).collect()),
        GridValues::Complex(_) => GridValues::Complex(out),
    };
    GridFunction::new(f.sig, big, values)
}

/// Samples of `f` on the nodes of `sub`, which must be a sub-lattice block
/// of `f.geom` with the same spacing.
pub fn restrict(f: &GridFunction, sub: &Geometry) -> Result<GridFunction, GridError> {
    let g = &f.geom;
    if sub.ndim() != g.ndim() || sub.spacing != g.spacing {
        return Err(GridError::Geometry("restriction needs matching spacing".into()));
    }
    let mut off = Vec::with_capacity(g.ndim());
    for a in 0..g.ndim() {
        let o = (sub.origin[a] - g.origin[a]) / g.spacing[a];
        let r = o.round();
        if (o - r).abs() > 1e-6 || r < 0.0 || r as usize + sub.shape[a] > g.shape[a] {
            return Err(GridError::Geometry("sub-grid is not a block of the grid".into()));
        }
        off.push(r as usize);
    }
    let src = f.values.to_complex();
    let vals: Vec<Complex64> = (0..sub.len())
        .map(|k| {
            let m: Vec<usize> = sub.multi_index(k).iter().zip(&off).map(|(i, o)| i + o).collect();
            src[g.flat_index(&m)]
        })
        .collect();
    let values = match f.values {
        GridValues::Real(_) => GridValues::Real(vals.iter().map(|c| c.re).collect()),
        GridValues::Complex(_) => GridValues::Complex(vals),
    };
    GridFunction::new(f.sig, sub.clone(), values)
}

/// `p(D)f` by FFT after zero padding by `pad`, returned on the grid of `f`.
/// Padding turns the periodic convolution into the aperiodic one on the
/// padded box.
pub fn normal_spectral(
    f: &GridFunction,
    pad: usize,
    method: MultiplierMethod,
    dc: DcRule,
) -> Result<GridFunction, GridError> {
    let big = zero_pad(f, pad)?;
    let mut spec = dft_forward(&big);
    apply_p_in_place(&mut spec, method, dc)?;
    let out = dft_inverse(&spec);
    let out = GridFunction::real(f.sig, out.geom.clone(), out.values.real_parts())?;
    restrict(&out, &f.geom)
}

/// `p(D)^{-1}f` on a zero-padded copy of `f`, restricted back to its grid.
pub fn invert_spectral(
    f: &GridFunction,
    pad: usize,
    method: MultiplierMethod,
    dc: DcRule,
) -> Result<GridFunction, GridError> {
    let big = zero_pad(f, pad)?;
    let mut spec = dft_forward(&big);
    apply_p_inverse_in_place(&mut spec, method, dc)?;
    let out = dft_inverse(&spec);
    let out = GridFunction::real(f.sig, out.geom.clone(), out.values.real_parts())?;
    restrict(&out, &f.geom)
}

/// `p(ξ_k)` per bin as [`apply_p`] would use it.
pub fn multiplier_bins(
    sig: Signature,
    geom: &Geometry,
    method: MultiplierMethod,
    dc: DcRule,
) -> Result<Vec<f64>, GridError> {
    let ones = vec![Complex64::new(1.0, 0.0); geom.len()];
    let mut s = SpectralField::new(sig, geom.clone(), ones)?;
    apply_p_in_place(&mut s, method, dc)?;
    Ok(s.values.iter().map(|c| c.re).collect())
}

/// Whether bin `flat` lies on the light cone.
pub fn is_cone_bin(sig: Signature, geom: &Geometry, flat: usize) -> bool {
    let xi = geom.frequency(flat);
    let np = sig.n_prime();
    let r1: f64 = xi[..np].iter().map(|x| x * x).sum();
    let r2: f64 = xi[np..].iter().map(|x| x * x).sum();
    (r1 > 0.0 || r2 > 0.0) && on_cone(r1, r2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Weight {
    L2,
    /// `⟨ξ⟩`
    H1,
    /// `σ(ξ)`, signature `(2,2)` only.
    H1_22,
}

/// `sqrt(Σ w(ξ)² |f̂(ξ)|² ΔΞ)` with `ΔΞ = Π 2π/(N_j h_j)`.
///
/// `σ` is undefined at `ξ = 0`; that bin uses `⟨0⟩ = 1`.
pub fn weighted_norm(f: &GridFunction, weight: Weight) -> Result<f64, GridError> {
    spectral_weighted_norm(&dft_forward(f), weight)
}

pub fn spectral_weighted_norm(spec: &SpectralField, weight: Weight) -> Result<f64, GridError> {
    if weight == Weight::H1_22 && (spec.sig.n_prime(), spec.sig.n_dprime()) != (2, 2) {
        return Err(GridError::Geometry(format!(
            "H1_22 norm needs signature (2,2), got {}",
            spec.sig
        )));
    }
    let geom = &spec.geom;
    let np = spec.sig.n_prime();
    let total: f64 = spec
        .values
        .par_iter()
        .enumerate()
        .map(|(k, v)| {
            let w = match weight {
                Weight::L2 => 1.0,
                _ => {
                    let xi = geom.frequency(k);
                    let r1 = xi[..np].iter().map(|x| x * x).sum::<f64>().sqrt();
                    let r2 = xi[np..].iter().map(|x| x * x).sum::<f64>().sqrt();
                    if weight == Weight::H1 || k == 0 {
                        (1.0 + r1 * r1 + r2 * r2).sqrt()
                    } else {
                        multiplier::sigma_from_norms(r1, r2).unwrap_or(1.0)
                    }
                }
            };
            w * w * v.norm_sqr()
        })
        .sum();
    Ok((total * geom.frequency_cell_volume()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sig(a: usize, b: usize) -> Signature {
        Signature::new(a, b).unwrap()
    }

    #[test]
    fn geometry_validation() {
        assert!(Geometry::new(vec![4, 1], vec![1.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(Geometry::new(vec![4, 4], vec![1.0, 0.0], vec![0.0, 0.0]).is_err());
        assert!(Geometry::new(vec![4, 4], vec![1.0], vec![0.0, 0.0]).is_err());
        let g = Geometry::cube(4, 8, 0.5).unwrap();
        assert_eq!(g.point(g.flat_index(&[4, 4, 4, 4])), vec![0.0; 4]);
        assert!(GridFunction::zeros(sig(2, 3), g).is_err());
    }

    #[test]
    fn signed_bins() {
        assert_eq!((0..5).map(|k| Geometry::signed_bin(5, k)).collect::<Vec<_>>(), vec![0, 1, 2, -2, -1]);
        assert_eq!((0..4).map(|k| Geometry::signed_bin(4, k)).collect::<Vec<_>>(), vec![0, 1, -2, -1]);
    }

    #[test]
    fn roundtrip_random() {
        let s = sig(2, 2);
        let g = Geometry::new(vec![5, 6, 4, 7], vec![0.3, 0.5, 0.2, 1.0], vec![-1.0, 0.5, 0.0, 2.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let v: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = GridFunction::real(s, g, v.clone()).unwrap();
        let back = dft_inverse(&dft_forward(&f));
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let err = back
            .values
            .to_complex()
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err <= 1e-12 * norm);
    }

    #[test]
    fn gaussian_transform() {
        let s = sig(2, 2);
        let g = Geometry::cube(4, 32, 0.4).unwrap();
        let f = phantom(PhantomKind::Gaussian, s, &g, &[0.0; 4], 1.0).unwrap();
        let spec = dft_forward(&f);
        let mut worst: f64 = 0.0;
        for (k, v) in spec.values.iter().enumerate() {
            let xi = g.frequency(k);
            let r2: f64 = xi.iter().map(|x| x * x).sum();
            if r2 <= 4.0 {
                let want = (2.0 * PI).powi(2) * (-0.5 * r2).exp();
                worst = worst.max((v - want).norm());
            }
        }
        assert!(worst <= 1e-6, "{worst}");
    }

    #[test]
    fn constant_goes_to_dc() {
        let s = sig(2, 2);
        let g = Geometry::cube(4, 6, 1.0).unwrap();
        let f = GridFunction::real(s, g.clone(), vec![1.0; g.len()]).unwrap();
        let spec = dft_forward(&f);
        assert!((spec.values[0].norm() - g.len() as f64).abs() < 1e-9);
        assert!(spec.values[1..].iter().all(|v| v.norm() < 1e-9));
    }

    #[test]
    fn phantoms() {
        let s = sig(2, 2);
        let g = Geometry::cube(4, 24, 0.5).unwrap();
        let f = phantom(PhantomKind::Gaussian, s, &g, &[0.0; 4], 1.0).unwrap();
        let c = g.flat_index(&[12; 4]);
        assert_eq!(f.values.real_parts()[c], 1.0);
        assert!((f.integral() / (2.0 * PI).powi(2) - 1.0).abs() < 1e-6);
        let b = phantom(PhantomKind::SmoothBump, s, &g, &[0.5, 0.0, 0.0, 0.0], 2.0).unwrap();
        for (i, v) in b.values.real_parts().iter().enumerate() {
            let x = g.point(i);
            let r = ((x[0] - 0.5).powi(2) + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt();
            if r >= 2.0 {
                assert_eq!(*v, 0.0);
            } else {
                assert!(*v > 0.0);
            }
        }
        assert!(phantom(PhantomKind::Gaussian, s, &g, &[0.0; 4], 0.0).is_err());
    }

    #[test]
    fn parseval() {
        let s = sig(2, 3);
        let g = Geometry::new(vec![4, 5, 6, 3, 4], vec![0.5, 0.7, 0.3, 1.0, 0.4], vec![0.0; 5]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = GridFunction::real(s, g, v).unwrap();
        let spectral = weighted_norm(&f, Weight::L2).unwrap() / (2.0 * PI).powf(2.5);
        assert!((spectral / f.l2_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn delta_spectrum_scaled_by_p() {
        let s = sig(3, 3);
        let g = Geometry::cube(6, 6, 1.0).unwrap();
        let mut vals = vec![Complex64::new(0.0, 0.0); g.len()];
        let k = g.flat_index(&[1, 0, 0, 0, 2, 0]);
        vals[k] = Complex64::new(2.0, -1.0);
        let spec = SpectralField::new(s, g.clone(), vals).unwrap();
        let out = apply_p(&spec, MultiplierMethod::Auto, DcRule::NearestShell).unwrap();
        let xi = g.frequency(k);
        let p = multiplier::p_from_norms(s, xi[0].abs(), xi[4].abs(), MultiplierMethod::Auto).unwrap();
        assert!((out.values[k] - Complex64::new(2.0, -1.0) * p).norm() < 1e-12 * p);
        assert!(out.values.iter().enumerate().all(|(i, v)| i == k || *v == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn doubled_spacing_doubles_factor() {
        let s = sig(3, 3);
        let g1 = Geometry::cube(6, 6, 1.0).unwrap();
        let g2 = Geometry::cube(6, 6, 2.0).unwrap();
        let p1 = multiplier_bins(s, &g1, MultiplierMethod::Auto, DcRule::NearestShell).unwrap();
        let p2 = multiplier_bins(s, &g2, MultiplierMethod::Auto, DcRule::NearestShell).unwrap();
        for (a, b) in p1.iter().zip(&p2) {
            assert!((b / a - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn p_then_inverse_is_identity() {
        for (a, b) in [(3, 3), (2, 2)] {
            let s = sig(a, b);
            let g = Geometry::cube(s.dim(), 8, 0.7).unwrap();
            let spec = band_limited_spectrum(s, &g, f64::INFINITY, 11).unwrap();
            let fwd = apply_p(&spec, MultiplierMethod::Auto, DcRule::NearestShell).unwrap();
            let back = apply_p_inverse(&fwd, MultiplierMethod::Auto, DcRule::Zero).unwrap();
            for k in 1..g.len() {
                if is_cone_bin(s, &g, k) && a == 2 {
                    assert_eq!(back.values[k], Complex64::new(0.0, 0.0));
                    continue;
                }
                assert!((back.values[k] - spec.values[k]).norm() <= 1e-12 * spec.values[k].norm().max(1e-300));
            }
            assert_eq!(back.values[0], Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn inverse_growth_bounded() {
        let s = sig(2, 3);
        let g = Geometry::cube(5, 8, 0.5).unwrap();
        let ones = SpectralField::new(s, g.clone(), vec![Complex64::new(1.0, 0.0); g.len()]).unwrap();
        let inv = apply_p_inverse(&ones, MultiplierMethod::Auto, DcRule::Zero).unwrap();
        let mut c: f64 = 0.0;
        for k in 1..g.len() {
            let r = g.frequency(k).iter().map(|x| x * x).sum::<f64>().sqrt();
            c = c.max(inv.values[k].re / r);
        }
        assert!(c.is_finite() && c > 0.0 && c < 1.0, "{c}");
    }

    #[test]
    fn cone_bins_22() {
        let s = sig(2, 2);
        let g = Geometry::cube(4, 6, 1.0).unwrap();
        let k = g.flat_index(&[1, 0, 0, 1]);
        assert!(is_cone_bin(s, &g, k));
        let p = multiplier_bins(s, &g, MultiplierMethod::Auto, DcRule::NearestShell).unwrap();
        assert!(p.iter().all(|v| v.is_finite() && *v > 0.0));
        let ones = SpectralField::new(s, g.clone(), vec![Complex64::new(1.0, 0.0); g.len()]).unwrap();
        let inv = apply_p_inverse(&ones, MultiplierMethod::Auto, DcRule::Zero).unwrap();
        assert_eq!(inv.values[k], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn norms() {
        let s = sig(2, 2);
        let g = Geometry::cube(4, 24, 0.5).unwrap();
        let z = GridFunction::zeros(s, g.clone()).unwrap();
        assert_eq!(weighted_norm(&z, Weight::H1).unwrap(), 0.0);
        let w = 1.0;
        let f = phantom(PhantomKind::Gaussian, s, &g, &[0.0; 4], w).unwrap();
        let h1 = weighted_norm(&f, Weight::H1).unwrap();
        let n = 4.0;
        let want = ((2.0 * PI * w * w).powf(n) * (PI / (w * w)).powf(n / 2.0) * (1.0 + n / (2.0 * w * w))).sqrt();
        assert!((h1 / want - 1.0).abs() < 1e-4, "{h1} {want}");
        let h22 = weighted_norm(&f, Weight::H1_22).unwrap();
        assert!(h22 <= h1);
        let s3 = sig(3, 3);
        let g3 = Geometry::cube(6, 4, 1.0).unwrap();
        assert!(weighted_norm(&GridFunction::zeros(s3, g3).unwrap(), Weight::H1_22).is_err());
    }
}
