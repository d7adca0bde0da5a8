//! Seeded generators for random bodies and maps. Every generator is a pure
//! function of its seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bodies::{ball_approx_volume_matched, harmonic_combination, Polytope, StarBody};
use crate::error::{check_dim, GeomError, Result};
use crate::linalg::{LinMap, Vector};

const MAX_ATTEMPTS: usize = 32;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes a base seed with a stream tag and an index (FNV-1a over the bytes),
/// giving independent per-case seeds.
pub fn derive_seed(base: u64, tag: &str, index: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in base.to_le_bytes().iter().chain(tag.as_bytes()).chain(&index.to_le_bytes()) {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    let c: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    Vector::from_slice(&c).expect("dimension 2 or 3")
}

/// Hull of `m` Gaussian points with random axis stretches. With `recenter`
/// the body is shifted so its vertex centroid is the origin, which puts the
/// origin well inside.
pub fn generate_polytope(n: usize, m: usize, seed: u64, recenter: bool) -> Result<Polytope> {
    check_dim(n)?;
    if m < n + 1 {
        return Err(GeomError::OutOfRange(format!("need at least {} points, got {m}", n + 1)));
    }
    let mut rng = rng(seed);
    for _ in 0..MAX_ATTEMPTS {
        let stretch: Vec<f64> = (0..n).map(|_| rng.random_range(0.6..1.6)).collect();
        let pts: Vec<Vector> = (0..m)
            .map(|_| {
                let g = gaussian_vector(&mut rng, n);
                let c: Vec<f64> = (0..n).map(|i| g[i] * stretch[i]).collect();
                Vector::from_slice(&c).expect("dimension 2 or 3")
            })
            .collect();
        let Ok(p) = Polytope::from_points(&pts, n) else { continue };
        let p = if recenter { p.recentered() } else { p };
        let r = p.vertices().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let inner = p.facets().iter().map(|f| f.offset).fold(f64::INFINITY, f64::min);
        if !recenter || inner > 0.05 * r {
            return Ok(p);
        }
    }
    Err(GeomError::Degenerate(format!("no usable sample after {MAX_ATTEMPTS} attempts")))
}

/// A random map with determinant one and Frobenius condition number at
/// most `condition_bound`.
pub fn generate_slmap(n: usize, seed: u64, condition_bound: f64) -> Result<LinMap> {
    check_dim(n)?;
    let mut rng = rng(seed);
    for _ in 0..MAX_ATTEMPTS {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let g: f64 = rng.sample(StandardNormal);
                entries.push(if i == j { 1.0 } else { 0.0 } + 0.6 * g);
            }
        }
        let mut a = LinMap::from_row_major(n, &entries)?;
        if a.det().abs() < 1e-3 {
            continue;
        }
        if a.det() < 0.0 {
            for e in entries.iter_mut().take(n) {
                *e = -*e;
            }
            a = LinMap::from_row_major(n, &entries)?;
        }
        let phi = a.scaled(a.det().powf(-1.0 / n as f64));
        if phi.condition_number() <= condition_bound && (phi.det() - 1.0).abs() <= crate::tol::SL_DET {
            return Ok(phi);
        }
    }
    Err(GeomError::Degenerate(format!("no SL map within condition bound {condition_bound}")))
}

/// A random positive-definite-ish shape map `A` (the ellipsoid is `A B`),
/// with axis lengths in `[0.6, 1.6]`.
pub fn generate_ellipsoid(n: usize, seed: u64) -> Result<LinMap> {
    let mut rng = rng(seed);
    let phi = generate_slmap(n, rng.random(), 8.0)?;
    let axes: Vec<f64> = (0..n).map(|_| rng.random_range(0.6..1.6)).collect();
    phi.compose(&LinMap::diag(&axes)?)
}

/// A smooth random star body: an L_p harmonic combination of two random
/// ellipsoids.
pub fn generate_star_body(n: usize, seed: u64) -> Result<StarBody> {
    let mut rng = rng(seed);
    let a = StarBody::ellipsoid(generate_ellipsoid(n, rng.random())?)?;
    let b = StarBody::ellipsoid(generate_ellipsoid(n, rng.random())?)?;
    let eps = rng.random_range(0.3..1.5);
    let p = rng.random_range(1.0..3.0);
    harmonic_combination(&a, eps, &b, p)
}

/// Polytopal stand-in for the ellipsoid `A B`: the image of the
/// volume-matched ball approximant on `m` points.
pub fn ellipsoid_polytope(shape: &LinMap, m: usize) -> Result<Polytope> {
    let ball = ball_approx_volume_matched(shape.dim(), m)?.polytope;
    ball.linear_image(shape)
}
