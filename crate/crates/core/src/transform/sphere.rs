//! Product quadrature on `S^{k-1}` for `k = 2..=5`.
//!
//! Points are built recursively as `(cos φ, sin φ · y)` with `y` on the
//! sphere one dimension down, so the measure splits into
//! `sin^{k-2} φ dφ dS(y)`. The polar factor gets a rule exact for the
//! matching weight:
//!
//! * `k = 3`: `sin φ dφ = dt`, Gauss–Legendre in `t = cos φ`;
//! * `k = 4`: `sin² φ dφ = √(1-t²) dt`, Gauss–Chebyshev of the second kind;
//! * `k = 5`: `sin³ φ dφ = (1-t²) dt`, Gauss–Legendre reweighted by `1-t²`.
//!
//! `S^1` uses equally spaced angles with equal weights.

use std::f64::consts::PI;

use crate::quad::gauss_legendre;

/// Nodes (unit vectors of length `k`) and weights of a rule on `S^{k-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereRule {
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

/// Rule on `S^{k-1}` with `resolution` azimuthal angles and
/// `ceil(resolution/2)` nodes per polar factor. `None` for unsupported `k`.
pub fn sphere_rule(k: usize, resolution: usize) -> Option<SphereRule> {
    if resolution == 0 {
        return None;
    }
    match k {
        2 => {
            let w = 2.0 * PI / resolution as f64;
            let nodes = (0..resolution)
                .map(|j| {
                    let a = w * j as f64;
                    vec![a.cos(), a.sin()]
                })
                .collect();
            Some(SphereRule {
                nodes,
                weights: vec![w; resolution],
            })
        }
        3..=5 => {
            let lower = sphere_rule(k - 1, resolution)?;
            let (ts, ws) = polar_rule(k, resolution.div_ceil(2));
            let mut nodes = Vec::with_capacity(ts.len() * lower.nodes.len());
            let mut weights = Vec::with_capacity(nodes.capacity());
            for (t, wt) in ts.iter().zip(&ws) {
                let s = (1.0 - t * t).max(0.0).sqrt();
                for (y, wy) in lower.nodes.iter().zip(&lower.weights) {
                    let mut v = Vec::with_capacity(k);
                    v.push(*t);
                    v.extend(y.iter().map(|c| s * c));
                    nodes.push(v);
                    weights.push(wt * wy);
                }
            }
            Some(SphereRule { nodes, weights })
        }
        _ => None,
    }
}

/// Nodes in `t = cos φ` and weights for `∫_0^π g(cos φ) sin^{k-2} φ dφ`.
fn polar_rule(k: usize, m: usize) -> (Vec<f64>, Vec<f64>) {
    match k {
        3 => gauss_legendre(m),
        4 => {
            let d = PI / (m as f64 + 1.0);
            (1..=m)
                .map(|j| {
                    let a = d * j as f64;
                    (a.cos(), d * a.sin() * a.sin())
                })
                .unzip()
        }
        5 => {
            let (t, w) = gauss_legendre(m + 1);
            let w = t.iter().zip(&w).map(|(t, w)| w * (1.0 - t * t)).collect();
            (t, w)
        }
        _ => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplier::sphere_area;

    #[test]
    fn weights_sum_to_area() {
        for k in 2..=5 {
            for res in [3, 8, 13] {
                let r = sphere_rule(k, res).unwrap();
                let s: f64 = r.weights.iter().sum();
                assert!((s / sphere_area(k).unwrap() - 1.0).abs() < 1e-12, "k={k} res={res}");
                for v in &r.nodes {
                    let n: f64 = v.iter().map(|x| x * x).sum();
                    assert!((n - 1.0).abs() < 1e-14);
                }
            }
        }
        assert!(sphere_rule(6, 4).is_none());
        assert!(sphere_rule(2, 0).is_none());
    }

    #[test]
    fn degree_four_moments() {
        // ∫_{S^{k-1}} x_i^4 = 3|S^{k-1}|/(k(k+2)), ∫ x_i^2 x_j^2 = |S^{k-1}|/(k(k+2))
        for k in 3..=5 {
            let r = sphere_rule(k, 8).unwrap();
            let area = sphere_area(k).unwrap();
            let kk = (k * (k + 2)) as f64;
            for i in 0..k {
                let m4: f64 = r.nodes.iter().zip(&r.weights).map(|(v, w)| w * v[i].powi(4)).sum();
                assert!((m4 - 3.0 * area / kk).abs() < 1e-12, "k={k} i={i}");
                let j = (i + 1) % k;
                let m22: f64 = r
                    .nodes
                    .iter()
                    .zip(&r.weights)
                    .map(|(v, w)| w * v[i].powi(2) * v[j].powi(2))
                    .sum();
                assert!((m22 - area / kk).abs() < 1e-12);
                let odd: f64 = r.nodes.iter().zip(&r.weights).map(|(v, w)| w * v[i].powi(3) * v[j]).sum();
                assert!(odd.abs() < 1e-12);
            }
        }
    }
}
