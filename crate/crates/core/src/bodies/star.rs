use std::sync::Arc;

use crate::bodies::polytope::Polytope;
use crate::bodies::support::SupportBody;
use crate::error::{check_dim, expect_dim, GeomError, Result};
use crate::linalg::{LinMap, Vector};

/// A star body about the origin, known through its radial function.
#[derive(Clone, Debug)]
pub enum StarBody {
    Ball { dim: usize, radius: f64 },
    /// `A B`; the inverse is cached.
    Ellipsoid { shape: LinMap, inverse: LinMap },
    Polytope(Arc<Polytope>),
    /// `ρ_{K*} = 1 / h_K`.
    PolarOf(SupportBody),
    /// `K +_{-p} ε·L`.
    Harmonic { k: Arc<StarBody>, eps: f64, l: Arc<StarBody>, p: f64 },
    /// `φ K` through `ρ_{φK}(x) = ρ_K(φ^{-1} x)`.
    LinearImage { map: LinMap, inverse: LinMap, body: Arc<StarBody> },
}

impl StarBody {
    pub fn ball(dim: usize, radius: f64) -> Result<StarBody> {
        check_dim(dim)?;
        if !(radius > 0.0) {
            return Err(GeomError::Domain(format!("ball radius must be positive, got {radius}")));
        }
        Ok(StarBody::Ball { dim, radius })
    }

    pub fn ellipsoid(shape: LinMap) -> Result<StarBody> {
        Ok(StarBody::Ellipsoid { inverse: shape.inverse()?, shape })
    }

    pub fn polytope(p: Polytope) -> Result<StarBody> {
        p.require_origin_interior()?;
        Ok(StarBody::Polytope(Arc::new(p)))
    }

    pub fn dim(&self) -> usize {
        match self {
            StarBody::Ball { dim, .. } => *dim,
            StarBody::Ellipsoid { shape, .. } => shape.dim(),
            StarBody::Polytope(p) => p.dim(),
            StarBody::PolarOf(k) => k.dim(),
            StarBody::Harmonic { k, .. } => k.dim(),
            StarBody::LinearImage { map, .. } => map.dim(),
        }
    }

    /// Radial value without argument checks.
    #[inline]
    pub fn rho(&self, x: &Vector) -> f64 {
        match self {
            StarBody::Ball { radius, .. } => radius / x.norm(),
            StarBody::Ellipsoid { inverse, .. } => 1.0 / inverse.apply(x).norm(),
            StarBody::Polytope(p) => p.rho(x),
            StarBody::PolarOf(k) => 1.0 / k.h(x),
            StarBody::Harmonic { k, eps, l, p } => {
                (k.rho(x).powf(-p) + eps * l.rho(x).powf(-p)).powf(-1.0 / p)
            }
            StarBody::LinearImage { inverse, body, .. } => body.rho(&inverse.apply(x)),
        }
    }

    /// `ρ_K(x) = max { λ ≥ 0 : λx ∈ K }` for `x ≠ 0`.
    pub fn radial_eval(&self, x: &Vector) -> Result<f64> {
        expect_dim(self.dim(), x.dim())?;
        if x.norm() == 0.0 {
            return Err(GeomError::ZeroVector);
        }
        let r = self.rho(x);
        if !(r > 0.0) || !r.is_finite() {
            return Err(GeomError::NotOriginInterior(format!("radial value {r} at {x:?}")));
        }
        Ok(r)
    }
}

/// `K +_{-p} ε·L` with `ρ^{-p} = ρ_K^{-p} + ε ρ_L^{-p}`.
pub fn harmonic_combination(k: &StarBody, eps: f64, l: &StarBody, p: f64) -> Result<StarBody> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(GeomError::Domain(format!("harmonic combination needs p >= 1, got {p}")));
    }
    if !(eps > 0.0) {
        return Err(GeomError::Domain(format!("harmonic combination needs ε > 0, got {eps}")));
    }
    expect_dim(k.dim(), l.dim())?;
    Ok(StarBody::Harmonic { k: Arc::new(k.clone()), eps, l: Arc::new(l.clone()), p })
}

pub fn star_linear_image(phi: &LinMap, k: &StarBody) -> Result<StarBody> {
    expect_dim(k.dim(), phi.dim())?;
    Ok(StarBody::LinearImage { inverse: phi.inverse()?, map: *phi, body: Arc::new(k.clone()) })
}

/// Polar of a support body, `ρ_{K*} = 1/h_K`.
pub fn polar_body(k: &SupportBody) -> Result<StarBody> {
    Ok(StarBody::PolarOf(k.clone()))
}
