//! The light ray transform `Lf(x, θ) = ∫ f(x + tθ) dt` over null directions
//! `θ = (θ', θ'') ∈ S^{n'-1} × S^{n''-1}`, its adjoint, and the normal
//! operator by angular quadrature.
//!
//! `t` is the affine parameter with `|θ|² = 2`, not arclength. Ray
//! integrals clip the line to the grid box and use `N = ⌈ℓ / (√2 ray_step)⌉`
//! trapezoid panels, `ℓ` the Euclidean length of the clipped segment, so
//! `ray_step` is the panel width in `t` for a unit null direction. The same
//! spatial samples are used for any base point on the line and any rescaling
//! of `θ`.
//!
//! Hyperplane integrals on `θ^⊥` use `dH = |θ| dH_0`, `dH_0` the Euclidean
//! measure, so that `dz = dH dt` under `z = x + tθ`. With this measure
//! `L'` below is the transpose of `L` and `f̂(ξ) = ∫ e^{-ix·ξ} Lf dH` for
//! `ξ·θ = 0`. Against `dH_0` both identities pick up a factor `√2`.

pub mod io;
pub mod sphere;

use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{Geometry, GridError, GridFunction, GridValues};
use crate::multiplier::{sphere_area_unchecked, Signature, SplitVector};
use crate::quad::gauss_legendre;
use crate::signature::{dot, norm};
use sphere::sphere_rule;

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("{0}")]
    Domain(String),
    #[error("sphere S^{0} is not supported by the direction rules")]
    UnsupportedSphere(usize),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// A null direction, `|θ'| = |θ''| = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub theta_prime: Vec<f64>,
    pub theta_dprime: Vec<f64>,
}

impl Direction {
    pub fn flat(&self) -> Vec<f64> {
        let mut v = self.theta_prime.clone();
        v.extend_from_slice(&self.theta_dprime);
        v
    }
}

/// Azimuthal resolution per sphere factor (see [`sphere::sphere_rule`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AngularResolution {
    pub prime: usize,
    pub dprime: usize,
}

impl AngularResolution {
    pub fn uniform(r: usize) -> Self {
        Self { prime: r, dprime: r }
    }
}

/// Discretized ray manifold: directions with weights, an orthonormal frame
/// of `θ^⊥` per direction, and one hyperplane grid (frame coordinates)
/// shared by all directions.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaGrid {
    pub sig: Signature,
    pub resolution: AngularResolution,
    pub directions: Vec<Direction>,
    pub weights: Vec<f64>,
    /// `n - 1` unit vectors per direction.
    pub frames: Vec<Vec<Vec<f64>>>,
    pub plane: Geometry,
}

impl SigmaGrid {
    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// Hyperplane point `Σ u_j b_j` for node `node` of direction `d`.
    pub fn plane_point(&self, d: usize, node: usize) -> Vec<f64> {
        let u = self.plane.point(node);
        let mut x = vec![0.0; self.sig.dim()];
        for (uj, b) in u.iter().zip(&self.frames[d]) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += uj * bi;
            }
        }
        x
    }
}

/// Quadrature over `S^{n'-1} × S^{n''-1}` as directions and weights.
pub fn direction_set(
    sig: Signature,
    res: AngularResolution,
) -> Result<(Vec<Direction>, Vec<f64>), TransformError> {
    let a = sphere_rule(sig.n_prime(), res.prime)
        .ok_or(TransformError::UnsupportedSphere(sig.n_prime() - 1))?;
    let b = sphere_rule(sig.n_dprime(), res.dprime)
        .ok_or(TransformError::UnsupportedSphere(sig.n_dprime() - 1))?;
    let mut dirs = Vec::with_capacity(a.nodes.len() * b.nodes.len());
    let mut weights = Vec::with_capacity(dirs.capacity());
    for (u, wu) in a.nodes.iter().zip(&a.weights) {
        for (v, wv) in b.nodes.iter().zip(&b.weights) {
            dirs.push(Direction {
                theta_prime: u.clone(),
                theta_dprime: v.clone(),
            });
            weights.push(wu * wv);
        }
    }
    Ok((dirs, weights))
}

/// Orthonormal basis of `θ^⊥` by Gram–Schmidt on `θ/|θ|, e_1, e_2, ...`.
pub fn hyperplane_frame(theta: &[f64]) -> Vec<Vec<f64>> {
    let n = theta.len();
    let t = norm(theta);
    let mut basis: Vec<Vec<f64>> = vec![theta.iter().map(|x| x / t).collect()];
    for e in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = vec![0.0; n];
        v[e] = 1.0;
        // two passes for orthogonality to rounding level
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&v, b);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= c * bi;
                }
            }
        }
        let nv = norm(&v);
        if nv > 1e-8 {
            basis.push(v.iter().map(|x| x / nv).collect());
        }
    }
    basis.remove(0);
    basis
}

/// Directions from `res` and a centered hyperplane grid with
/// `⌊2·halfwidth/step⌋ + 1` nodes per axis.
pub fn build_sigma_grid(
    sig: Signature,
    res: AngularResolution,
    plane_halfwidth: f64,
    plane_step: f64,
) -> Result<SigmaGrid, TransformError> {
    if res.prime == 0 || res.dprime == 0 {
        return Err(TransformError::Domain("angular resolutions must be positive".into()));
    }
    if !(plane_halfwidth > 0.0 && plane_step > 0.0) || !plane_halfwidth.is_finite() || !plane_step.is_finite() {
        return Err(TransformError::Domain("plane half-width and step must be positive".into()));
    }
    let m = (2.0 * plane_halfwidth / plane_step).floor() as usize + 1;
    if m < 2 {
        return Err(TransformError::Domain("plane step larger than the window".into()));
    }
    let half = (m - 1) as f64 / 2.0 * plane_step;
    let plane = Geometry::new(vec![m; sig.dim() - 1], vec![plane_step; sig.dim() - 1], vec![-half; sig.dim() - 1])?;
    build_sigma_grid_on(sig, res, plane)
}

/// Same as [`build_sigma_grid`] with an explicit hyperplane geometry.
pub fn build_sigma_grid_on(
    sig: Signature,
    res: AngularResolution,
    plane: Geometry,
) -> Result<SigmaGrid, TransformError> {
    plane.validate()?;
    if plane.ndim() != sig.dim() - 1 {
        return Err(TransformError::Domain(format!(
            "hyperplane grid has {} axes, expected {}",
            plane.ndim(),
            sig.dim() - 1
        )));
    }
    let (directions, weights) = direction_set(sig, res)?;
    let frames = directions.iter().map(|d| hyperplane_frame(&d.flat())).collect();
    Ok(SigmaGrid {
        sig,
        resolution: res,
        directions,
        weights,
        frames,
        plane,
    })
}

/// A null `θ` with `ξ·θ = 0`: fix the block of smaller norm to its first
/// basis vector and solve for the other on its sphere.
pub fn find_null_direction(sig: Signature, xi: &SplitVector) -> Result<Direction, TransformError> {
    xi.check(sig).map_err(|e| TransformError::Domain(e.to_string()))?;
    let (r1, r2) = (xi.norm_prime(), xi.norm_dprime());
    if r1 == 0.0 && r2 == 0.0 {
        return Err(TransformError::Domain("xi = 0 has no distinguished null direction".into()));
    }
    if r1 <= r2 {
        let mut tp = vec![0.0; sig.n_prime()];
        tp[0] = 1.0;
        let c = -dot(xi.prime(), &tp);
        let td = solve_on_sphere(xi.dprime(), c);
        Ok(Direction {
            theta_prime: tp,
            theta_dprime: td,
        })
    } else {
        let mut td = vec![0.0; sig.n_dprime()];
        td[0] = 1.0;
        let c = -dot(xi.dprime(), &td);
        let tp = solve_on_sphere(xi.prime(), c);
        Ok(Direction {
            theta_prime: tp,
            theta_dprime: td,
        })
    }
}

/// Unit `v` with `a·v = c`, given `|c| <= |a|` and `a ≠ 0`.
fn solve_on_sphere(a: &[f64], c: f64) -> Vec<f64> {
    let a2 = dot(a, a);
    let along = c / a2;
    let perp_len = (1.0 - c * c / a2).max(0.0).sqrt();
    let frame = hyperplane_frame(a);
    let u = &frame[0];
    a.iter().zip(u).map(|(ai, ui)| along * ai + perp_len * ui).collect()
}

const MAXD_WEIGHTS: usize = 10;

/// Multilinear interpolation of real grid samples; zero outside the box.
pub(crate) struct Interpolator<'a> {
    values: &'a [f64],
    origin: &'a [f64],
    spacing: &'a [f64],
    shape: &'a [usize],
    strides: Vec<usize>,
    corners: Vec<usize>,
}

impl<'a> Interpolator<'a> {
    pub(crate) fn new(values: &'a [f64], geom: &'a Geometry) -> Self {
        let n = geom.ndim();
        let mut strides = vec![1; n];
        for a in (0..n.saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * geom.shape[a + 1];
        }
        let corners = (0..1usize << n)
            .map(|mask| (0..n).filter(|a| mask >> a & 1 == 1).map(|a| strides[a]).sum())
            .collect();
        Self {
            values,
            origin: &geom.origin,
            spacing: &geom.spacing,
            shape: &geom.shape,
            strides,
            corners,
        }
    }

    /// Returns `None` outside the box.
    #[inline]
    pub(crate) fn sample(&self, x: &[f64]) -> Option<f64> {
        const MAXD: usize = 16;
        let n = x.len();
        let mut frac = [0.0f64; MAXD];
        let mut base = 0;
        for a in 0..n {
            let u = (x[a] - self.origin[a]) / self.spacing[a];
            let top = (self.shape[a] - 1) as f64;
            if !(u >= -1e-9 && u <= top + 1e-9) {
                return None;
            }
            let u = u.clamp(0.0, top);
            let i = (u.floor() as usize).min(self.shape[a] - 2);
            frac[a] = u - i as f64;
            base += i * self.strides[a];
        }
        // tensor-product weights, bit a of the corner index selecting axis a
        let mut w = [0.0f64; 1 << MAXD_WEIGHTS];
        if n > MAXD_WEIGHTS {
            return Some(self.sample_slow(base, &frac[..n]));
        }
        w[0] = 1.0;
        for (a, f) in frac.iter().enumerate().take(n) {
            let m = 1 << a;
            for j in 0..m {
                w[j | m] = w[j] * f;
                w[j] *= 1.0 - f;
            }
        }
        let mut acc = 0.0;
        for (wk, off) in w.iter().zip(&self.corners) {
            acc += wk * self.values[base + off];
        }
        Some(acc)
    }

    fn sample_slow(&self, base: usize, frac: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (mask, off) in self.corners.iter().enumerate() {
            let mut w = 1.0;
            for (a, f) in frac.iter().enumerate() {
                w *= if mask >> a & 1 == 1 { *f } else { 1.0 - f };
            }
            acc += w * self.values[base + off];
        }
        acc
    }
}

/// Parameter interval where `x + tθ` lies in the closed box, if any.
fn clip(geom: &Geometry, x: &[f64], theta: &[f64]) -> Option<(f64, f64)> {
    let mut t0 = f64::NEG_INFINITY;
    let mut t1 = f64::INFINITY;
    for a in 0..geom.ndim() {
        let lo = geom.origin[a];
        let hi = lo + (geom.shape[a] - 1) as f64 * geom.spacing[a];
        if theta[a] == 0.0 {
            if x[a] < lo || x[a] > hi {
                return None;
            }
            continue;
        }
        let (mut a0, mut a1) = ((lo - x[a]) / theta[a], (hi - x[a]) / theta[a]);
        if a0 > a1 {
            std::mem::swap(&mut a0, &mut a1);
        }
        t0 = t0.max(a0);
        t1 = t1.min(a1);
    }
    (t1 > t0).then_some((t0, t1))
}

fn ray_integral_with(interp: &Interpolator<'_>, geom: &Geometry, x: &[f64], theta: &[f64], ray_step: f64) -> f64 {
    let Some((t0, t1)) = clip(geom, x, theta) else {
        return 0.0;
    };
    let len = (t1 - t0) * norm(theta);
    let panels = ((len / (std::f64::consts::SQRT_2 * ray_step)).ceil() as usize).max(1);
    let dt = (t1 - t0) / panels as f64;
    let mut p = vec![0.0; x.len()];
    let mut sum = 0.0;
    for i in 0..=panels {
        let t = t0 + i as f64 * dt;
        for a in 0..x.len() {
            p[a] = x[a] + t * theta[a];
        }
        let v = interp.sample(&p).unwrap_or(0.0);
        sum += if i == 0 || i == panels { 0.5 * v } else { v };
    }
    sum * dt
}

fn real_values(f: &GridFunction) -> Result<std::borrow::Cow<'_, [f64]>, TransformError> {
    match &f.values {
        GridValues::Real(v) => Ok(std::borrow::Cow::Borrowed(v)),
        GridValues::Complex(_) => {
            if f.values.max_imag() > 0.0 {
                return Err(TransformError::Domain("ray transforms need real-valued input".into()));
            }
            Ok(std::borrow::Cow::Owned(f.values.real_parts()))
        }
    }
}

fn check_step(f: &GridFunction, ray_step: f64) -> Result<(), TransformError> {
    let hmin = f.geom.spacing.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(ray_step > 0.0) || !ray_step.is_finite() {
        return Err(TransformError::Domain(format!("ray_step {ray_step} must be positive")));
    }
    if ray_step > hmin {
        return Err(TransformError::Domain(format!(
            "ray_step {ray_step} exceeds the smallest grid spacing {hmin}"
        )));
    }
    Ok(())
}

/// `∫ f(x + tθ) dt` for one line; `θ` need not be normalized.
pub fn ray_integral(f: &GridFunction, x: &[f64], theta: &[f64], ray_step: f64) -> Result<f64, TransformError> {
    check_step(f, ray_step)?;
    if x.len() != f.geom.ndim() || theta.len() != f.geom.ndim() {
        return Err(TransformError::Domain("point or direction has the wrong dimension".into()));
    }
    let vals = real_values(f)?;
    let interp = Interpolator::new(&vals, &f.geom);
    Ok(ray_integral_with(&interp, &f.geom, x, theta, ray_step))
}

/// Values of `Lf` on the nodes of a [`SigmaGrid`], direction-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RayData {
    pub sigma: SigmaGrid,
    pub values: Vec<f64>,
}

impl RayData {
    pub fn new(sigma: SigmaGrid, values: Vec<f64>) -> Result<Self, TransformError> {
        if values.len() != sigma.len() * sigma.plane.len() {
            return Err(TransformError::Domain(format!(
                "{} ray values for {} directions x {} nodes",
                values.len(),
                sigma.len(),
                sigma.plane.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(TransformError::Domain("ray data must be finite".into()));
        }
        Ok(Self { sigma, values })
    }

    pub fn direction_values(&self, d: usize) -> &[f64] {
        let m = self.sigma.plane.len();
        &self.values[d * m..(d + 1) * m]
    }

    /// `∫_Σ φ ψ dH dS dS` by the grid quadrature.
    pub fn inner(&self, other: &RayData) -> Result<f64, TransformError> {
        if self.values.len() != other.values.len() {
            return Err(TransformError::Domain("ray data layouts differ".into()));
        }
        let cell = self.sigma.plane.cell_volume() * std::f64::consts::SQRT_2;
        let m = self.sigma.plane.len();
        Ok((0..self.sigma.len())
            .map(|d| {
                let s: f64 = self.values[d * m..(d + 1) * m]
                    .iter()
                    .zip(&other.values[d * m..(d + 1) * m])
                    .map(|(a, b)| a * b)
                    .sum();
                self.sigma.weights[d] * s * cell
            })
            .sum())
    }
}

#[allow(non_snake_case)]
pub fn forward_L(f: &GridFunction, sigma: &SigmaGrid, ray_step: f64) -> Result<RayData, TransformError> {
    check_step(f, ray_step)?;
    if f.sig != sigma.sig {
        return Err(TransformError::Domain("grid and ray grid signatures differ".into()));
    }
    let vals = real_values(f)?;
    let interp = Interpolator::new(&vals, &f.geom);
    let m = sigma.plane.len();
    let mut values = vec![0.0; sigma.len() * m];
    values.par_chunks_mut(m).enumerate().for_each(|(d, out)| {
        let theta = sigma.directions[d].flat();
        for (node, v) in out.iter_mut().enumerate() {
            let x = sigma.plane_point(d, node);
            *v = ray_integral_with(&interp, &f.geom, &x, &theta, ray_step);
        }
    });
    RayData::new(sigma.clone(), values)
}

/// `Lf(·, θ)` on one hyperplane grid in the frame of [`hyperplane_frame`].
pub fn hyperplane_transform(
    f: &GridFunction,
    theta: &Direction,
    plane: &Geometry,
    ray_step: f64,
) -> Result<Vec<f64>, TransformError> {
    check_step(f, ray_step)?;
    let t = theta.flat();
    if t.len() != f.geom.ndim() || plane.ndim() + 1 != t.len() {
        return Err(TransformError::Domain("direction or hyperplane has the wrong dimension".into()));
    }
    let frame = hyperplane_frame(&t);
    let vals = real_values(f)?;
    let interp = Interpolator::new(&vals, &f.geom);
    Ok((0..plane.len())
        .into_par_iter()
        .map(|k| {
            let u = plane.point(k);
            let mut x = vec![0.0; t.len()];
            for (uj, b) in u.iter().zip(&frame) {
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi += uj * bi;
                }
            }
            ray_integral_with(&interp, &f.geom, &x, &t, ray_step)
        })
        .collect())
}

/// `∫_{θ^⊥} e^{-i x·ξ} Lf(x, θ) dH(x)` by the hyperplane grid sum, for
/// `ξ·θ = 0`; equals `f̂(ξ)`. The grid cell is `|θ| = √2` times its
/// Euclidean volume.
pub fn slice_transform(theta: &Direction, plane: &Geometry, values: &[f64], xi: &[f64]) -> Complex64 {
    let frame = hyperplane_frame(&theta.flat());
    let k: Vec<f64> = frame.iter().map(|b| dot(b, xi)).collect();
    let acc: Complex64 = (0..plane.len())
        .map(|n| {
            let u = plane.point(n);
            let ph: f64 = u.iter().zip(&k).map(|(a, b)| a * b).sum();
            values[n] * Complex64::from_polar(1.0, -ph)
        })
        .sum();
    acc * plane.cell_volume() * std::f64::consts::SQRT_2
}

/// Result of [`adjoint_Lt`].
#[derive(Debug, Clone)]
pub struct AdjointOutput {
    pub grid: GridFunction,
    /// Direction/point pairs whose projection fell outside the hyperplane
    /// window and counted as zero.
    pub out_of_window: usize,
}

/// `L'φ(z) = Σ_θ w_θ φ(z - ½(z·θ)θ, θ)`, interpolated in frame coordinates.
#[allow(non_snake_case)]
pub fn adjoint_Lt(phi: &RayData, out_geometry: &Geometry) -> Result<AdjointOutput, TransformError> {
    let sigma = &phi.sigma;
    out_geometry.validate()?;
    if out_geometry.ndim() != sigma.sig.dim() {
        return Err(TransformError::Domain("output grid dimension does not match the signature".into()));
    }
    let interps: Vec<Interpolator<'_>> = (0..sigma.len())
        .map(|d| Interpolator::new(phi.direction_values(d), &sigma.plane))
        .collect();
    let missed = AtomicUsize::new(0);
    let values: Vec<f64> = (0..out_geometry.len())
        .into_par_iter()
        .map(|k| {
            let z = out_geometry.point(k);
            let mut u = vec![0.0; sigma.sig.dim() - 1];
            let mut acc = 0.0;
            let mut miss = 0;
            for d in 0..sigma.len() {
                // b_j·(z - ½(z·θ)θ) = b_j·z
                for (uj, b) in u.iter_mut().zip(&sigma.frames[d]) {
                    *uj = dot(&z, b);
                }
                match interps[d].sample(&u) {
                    Some(v) => acc += sigma.weights[d] * v,
                    None => miss += 1,
                }
            }
            if miss > 0 {
                missed.fetch_add(miss, Ordering::Relaxed);
            }
            acc
        })
        .collect();
    Ok(AdjointOutput {
        grid: GridFunction::real(sigma.sig, out_geometry.clone(), values)?,
        out_of_window: missed.into_inner(),
    })
}

/// `L'Lf` at the grid points: full-line ray integrals summed over the
/// directions of `sigma` with their weights.
pub fn normal_quadrature(f: &GridFunction, sigma: &SigmaGrid, ray_step: f64) -> Result<GridFunction, TransformError> {
    let points: Vec<Vec<f64>> = (0..f.geom.len()).map(|k| f.geom.point(k)).collect();
    let values = normal_at_points(f, sigma, ray_step, &points)?;
    Ok(GridFunction::real(f.sig, f.geom.clone(), values)?)
}

/// `L'Lf` at arbitrary points.
pub fn normal_at_points(
    f: &GridFunction,
    sigma: &SigmaGrid,
    ray_step: f64,
    points: &[Vec<f64>],
) -> Result<Vec<f64>, TransformError> {
    check_step(f, ray_step)?;
    if f.sig != sigma.sig {
        return Err(TransformError::Domain("grid and direction set signatures differ".into()));
    }
    let vals = real_values(f)?;
    let interp = Interpolator::new(&vals, &f.geom);
    let thetas: Vec<Vec<f64>> = sigma.directions.iter().map(Direction::flat).collect();
    Ok(points
        .par_iter()
        .map(|x| {
            thetas
                .iter()
                .zip(&sigma.weights)
                .map(|(t, w)| w * ray_integral_with(&interp, &f.geom, x, t, ray_step))
                .sum()
        })
        .collect())
}

/// `∫ exp(-|x + tθ|²/(2w²)) dt` in closed form.
pub fn gaussian_ray_integral(x: &[f64], theta: &[f64], width: f64) -> f64 {
    let tt = dot(theta, theta);
    let xt = dot(x, theta);
    let xx = dot(x, x);
    (2.0 * std::f64::consts::PI / tt).sqrt() * width * (-(xx - xt * xt / tt) / (2.0 * width * width)).exp()
}

/// `L'L` of the Gaussian `exp(-|x|²/(2w²))` at a point with block norms
/// `(a, b)`, by product Gauss–Legendre in the two polar angles between the
/// blocks of `x` and of `θ`.
pub fn gaussian_normal_profile(sig: Signature, a: f64, b: f64, width: f64, nodes: usize) -> f64 {
    let (t, w) = gauss_legendre(nodes);
    let half = std::f64::consts::FRAC_PI_2;
    // angle ↦ (cos, weight · sin^{k-2})
    let polar = |k: usize| -> Vec<(f64, f64)> {
        t.iter()
            .zip(&w)
            .map(|(ti, wi)| {
                let ang = half * (ti + 1.0);
                (ang.cos(), half * wi * ang.sin().powi(k as i32 - 2))
            })
            .collect()
    };
    let pa = polar(sig.n_prime());
    let pb = polar(sig.n_dprime());
    let s2 = 2.0 * width * width;
    let mut acc = 0.0;
    for (ca, wa) in &pa {
        for (cb, wb) in &pb {
            let xt = a * ca + b * cb;
            acc += wa * wb * (-(a * a + b * b - 0.5 * xt * xt) / s2).exp();
        }
    }
    let sph = |k: usize| sphere_area_unchecked(k - 1);
    std::f64::consts::PI.sqrt() * width * sph(sig.n_prime()) * sph(sig.n_dprime()) * acc
}

/// `L'L` of the Gaussian at `x` by the direction rule of `sigma` and exact
/// line integrals.
pub fn gaussian_normal_quadrature(sigma_dirs: &[Direction], weights: &[f64], x: &[f64], width: f64) -> f64 {
    sigma_dirs
        .par_iter()
        .zip(weights)
        .map(|(d, w)| w * gaussian_ray_integral(x, &d.flat(), width))
        .sum()
}

/// `∫_{S^{k-1}} e^{z(ω_1 - 1)} dS(ω)` for `z >= 0`.
fn scaled_sphere_exp(k: usize, z: f64) -> Result<f64, TransformError> {
    let q = crate::quad::TanhSinh::default()
        .integrate(|a, _, _| (z * (a.cos() - 1.0)).exp() * a.sin().powi(k as i32 - 2), 0.0, std::f64::consts::PI)
        .map_err(|e| TransformError::Domain(e.to_string()))?;
    Ok(sphere_area_unchecked(k - 1) * q.value)
}

/// The kernel `2δ(|y'| - |y''|) / (|y'|^{n'-1} |y''|^{n''-1})` convolved
/// with `exp(-|x|²/(2w²))` at block norms `(a, b)`: in polar coordinates
/// `2 ∫_0^∞ ∫∫ f(x - ρ(ω', ω'')) dω' dω'' dρ`, with the sphere averages
/// done separately for each block.
pub fn kernel_convolution(sig: Signature, a: f64, b: f64, width: f64) -> Result<f64, TransformError> {
    let w2 = width * width;
    let rho_max = a.max(b) + 12.0 * width;
    let panels = (rho_max / width).ceil() as usize;
    let (t, wt) = gauss_legendre(16);
    let dr = rho_max / panels as f64;
    let mut acc = 0.0;
    for k in 0..panels {
        for (ti, wi) in t.iter().zip(&wt) {
            let rho = dr * (k as f64 + 0.5 * (ti + 1.0));
            let env = (-((a - rho).powi(2) + (b - rho).powi(2)) / (2.0 * w2)).exp();
            if env < 1e-300 {
                continue;
            }
            let sa = scaled_sphere_exp(sig.n_prime(), rho * a / w2)?;
            let sb = scaled_sphere_exp(sig.n_dprime(), rho * b / w2)?;
            acc += 0.5 * dr * wi * env * sa * sb;
        }
    }
    Ok(2.0 * acc)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelPoint {
    pub radius: f64,
    /// `L'Lf(rω)` from the angular reduction of the normal operator.
    pub profile: f64,
    /// The kernel convolved with the Gaussian at `rω`.
    pub prediction: f64,
    pub rel_diff: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelReport {
    pub sig: Signature,
    pub width: f64,
    /// On-cone values at `rω`, `ω = (e_1, e_1)/√2`.
    pub points: Vec<KernelPoint>,
    /// `L'Lf_w(rω) / L'Lf_w(2rω)` at fixed width; tends to `2^{n-2}` as
    /// `w/r → 0` because the kernel is a density on the cone.
    pub fixed_width_ratios: Vec<f64>,
    /// `2^n L'Lf_w(rω) / L'Lf_{2w}(2rω) = K(rω)/K(2rω)`, which is `2^{n-1}`
    /// for a kernel homogeneous of order `1 - n`.
    pub kernel_ratios: Vec<f64>,
    /// Largest value at `||x'| - |x''|| = 8w` relative to the on-cone peak.
    pub off_cone_ratio: f64,
    /// `max |P(a,b) - P(b,a)| / max P`, only for `n' = n''`.
    pub swap_asymmetry: Option<f64>,
}

/// Checks that `L'L` of a narrow Gaussian at the origin concentrates on the
/// cone `|x'| = |x''|` and scales like the kernel.
pub fn kernel_check(sig: Signature, radii: &[f64], width: f64) -> Result<KernelReport, TransformError> {
    if !(width > 0.0) || radii.iter().any(|r| !(*r > 0.0)) {
        return Err(TransformError::Domain("radii and width must be positive".into()));
    }
    let nodes = 400;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let prof = |a: f64, b: f64, w: f64| gaussian_normal_profile(sig, a, b, w, nodes);
    let mut points = Vec::new();
    let mut fixed = Vec::new();
    let mut kernel = Vec::new();
    let mut peak: f64 = 0.0;
    let mut off: f64 = 0.0;
    let mut swap: f64 = 0.0;
    for &r in radii {
        let p = prof(h * r, h * r, width);
        let k = kernel_convolution(sig, h * r, h * r, width)?;
        peak = peak.max(p);
        points.push(KernelPoint {
            radius: r,
            profile: p,
            prediction: k,
            rel_diff: (p / k - 1.0).abs(),
        });
        fixed.push(p / prof(2.0 * h * r, 2.0 * h * r, width));
        kernel.push(2f64.powi(sig.dim() as i32) * p / prof(2.0 * h * r, 2.0 * h * r, 2.0 * width));
        let d = 4.0 * width;
        off = off.max(prof(h * r + d, (h * r - d).max(0.0), width));
        swap = swap.max((prof(r, 0.5 * r, width) - prof(0.5 * r, r, width)).abs());
    }
    Ok(KernelReport {
        sig,
        width,
        points,
        fixed_width_ratios: fixed,
        kernel_ratios: kernel,
        off_cone_ratio: off / peak,
        swap_asymmetry: (sig.n_prime() == sig.n_dprime()).then_some(swap / peak),
    })
}
