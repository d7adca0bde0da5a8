//! Quadrature rules on `S^1` and `S^2`.
//!
//! The circle uses an equispaced angular grid; `M` nodes integrate every
//! trigonometric polynomial of degree `< M` exactly. The sphere uses a
//! Gauss–Legendre rule in `z` times an equispaced rule in the azimuth, which
//! with `N` latitudes and `2N` azimuths is exact for spherical polynomials of
//! degree `2N - 1`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{GeomError, Result};
use crate::linalg::Vector;
use crate::special::{abs_power_moment, sphere_area};

/// Default level on the circle: 256 angles.
pub const DEFAULT_LEVEL_2D: usize = 255;
/// Default level on the sphere: degree 47.
pub const DEFAULT_LEVEL_3D: usize = 24;
const MAX_LEVEL_2D: usize = 1 << 16;
const MAX_LEVEL_3D: usize = 128;

#[derive(Clone, Debug)]
pub struct Quadrature {
    dim: usize,
    level: usize,
    degree: usize,
    nodes: Vec<Vector>,
    weights: Vec<f64>,
    proxy: OnceLock<f64>,
}

pub fn default_level(n: usize) -> usize {
    if n == 2 {
        DEFAULT_LEVEL_2D
    } else {
        DEFAULT_LEVEL_3D
    }
}

/// Builds the rule for `S^{n-1}`.
///
/// Level `ℓ` on the circle gives `ℓ + 1` angles (degree `ℓ`); on the sphere it
/// gives `ℓ` Gauss–Legendre latitudes (degree `2ℓ - 1`).
pub fn make_quadrature(n: usize, level: usize) -> Result<Quadrature> {
    match n {
        2 if (1..=MAX_LEVEL_2D).contains(&level) => {
            let m = level + 1;
            let nodes = (0..m)
                .map(|k| {
                    let th = 2.0 * PI * k as f64 / m as f64;
                    Vector::new2(th.cos(), th.sin())
                })
                .collect();
            Ok(Quadrature { dim: 2, level, degree: level, nodes, weights: vec![2.0 * PI / m as f64; m], proxy: OnceLock::new() })
        }
        3 if (1..=MAX_LEVEL_3D).contains(&level) => {
            let (zs, ws) = gauss_legendre(level);
            let m = 2 * level;
            let mut nodes = Vec::with_capacity(level * m);
            let mut weights = Vec::with_capacity(level * m);
            for (z, w) in zs.iter().zip(&ws) {
                let r = (1.0 - z * z).max(0.0).sqrt();
                for k in 0..m {
                    let ph = 2.0 * PI * (k as f64 + 0.5) / m as f64;
                    nodes.push(Vector::new3(r * ph.cos(), r * ph.sin(), *z));
                    weights.push(w * 2.0 * PI / m as f64);
                }
            }
            Ok(Quadrature { dim: 3, level, degree: 2 * level - 1, nodes, weights, proxy: OnceLock::new() })
        }
        _ => Err(GeomError::UnsupportedQuadrature { n, level }),
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on the
/// three-term recurrence.
pub fn gauss_legendre(count: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; count];
    let mut ws = vec![0.0; count];
    let nf = count as f64;
    for i in 0..count.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=count {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if count == 1 { x } else { p1 };
            let pm = if count == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = x;
        xs[count - 1 - i] = -x;
        ws[i] = w;
        ws[count - 1 - i] = w;
    }
    if count % 2 == 1 {
        xs[count / 2] = 0.0;
    }
    (xs, ws)
}

impl Quadrature {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// Highest polynomial degree integrated exactly.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn nodes(&self) -> &[Vector] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(&Vector) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(u, w)| w * f(u)).sum()
    }

    /// Measured relative error of `∫|x·v|^p dS(v)` over a fixed set of
    /// directions `x`. This is the error of the centroid-body normalization
    /// at the ball and serves as the tolerance proxy for quadrature checks.
    pub fn normalization_error(&self, p: f64) -> f64 {
        let exact = abs_power_moment(self.dim, p);
        sphere_points(self.dim, 400)
            .iter()
            .map(|x| {
                let approx = self.integrate(|v| x.dot(v).abs().powf(p));
                (approx / exact - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Relative error estimate for integrands with the regularity of
    /// `|x·v|`: the `p = 1` normalization error, computed once.
    pub fn proxy(&self) -> f64 {
        *self.proxy.get_or_init(|| self.normalization_error(1.0))
    }

    /// `Σ weights`, which equals the sphere area.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn sphere_area(&self) -> f64 {
        sphere_area(self.dim)
    }
}

/// Near-uniform unit vectors: an equispaced circle grid in 2D, a Fibonacci
/// spiral in 3D.
pub fn sphere_points(n: usize, m: usize) -> Vec<Vector> {
    if n == 2 {
        return (0..m)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / m as f64;
                Vector::new2(th.cos(), th.sin())
            })
            .collect();
    }
    let golden = PI * (1.0 + 5f64.sqrt());
    (0..m)
        .map(|i| {
            let t = i as f64 + 0.5;
            let z = 1.0 - 2.0 * t / m as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let th = golden * t;
            Vector::new3(r * th.cos(), r * th.sin(), z)
        })
        .collect()
}
