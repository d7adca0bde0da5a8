//! Projection-type bodies. Every body here has a support function of the
//! form `h(x)^p = Σ a_j |x·v_j|^p`, an "L_p zonoid" over finitely many
//! directions: projection bodies sum over the atoms of a surface measure,
//! centroid bodies over the nodes of a quadrature rule.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bodies::{polar_body, Polytope, StarBody, SupportBody, SupportFunction};
use crate::error::{expect_dim, GeomError, Result};
use crate::functionals::star_volume;
use crate::linalg::{moment_factor, Vector};
use crate::measures::{area_measure, lp_mixed_surface_measure, lp_surface_measure, mixed_area_measure, SphericalMeasure};
use crate::quadrature::{sphere_points, Quadrature};
use crate::special::{lyz_constant, unit_ball_volume};

/// `h(x) = (Σ a_j |x·v_j|^p)^{1/p}` with `a_j > 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpZonoid {
    dim: usize,
    p: f64,
    directions: Vec<Vector>,
    coefficients: Vec<f64>,
}

impl LpZonoid {
    pub fn new(dim: usize, p: f64, directions: Vec<Vector>, coefficients: Vec<f64>) -> Result<LpZonoid> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(GeomError::Domain(format!("p must be >= 1, got {p}")));
        }
        if directions.len() != coefficients.len() {
            return Err(GeomError::DimensionMismatch { expected: directions.len(), found: coefficients.len() });
        }
        for (v, a) in directions.iter().zip(&coefficients) {
            expect_dim(dim, v.dim())?;
            if !(*a >= 0.0) || !a.is_finite() {
                return Err(GeomError::Domain(format!("invalid coefficient {a}")));
            }
        }
        Ok(LpZonoid { dim, p, directions, coefficients })
    }

    fn from_measure(mu: &SphericalMeasure, p: f64, scale: f64) -> Result<LpZonoid> {
        let (directions, coefficients) = mu.atoms().iter().map(|a| (a.direction, a.weight * scale)).unzip();
        LpZonoid::new(mu.dim(), p, directions, coefficients)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    #[inline]
    pub fn h(&self, x: &Vector) -> f64 {
        let s: f64 = self.directions.iter().zip(&self.coefficients).map(|(v, a)| a * x.dot(v).abs().powf(self.p)).sum();
        s.powf(1.0 / self.p)
    }

    /// `∇h(x)`, the point of the body with outer normal `x`. At `p = 1`
    /// directions orthogonal to `x` contribute nothing.
    pub fn support_point(&self, x: &Vector) -> Vector {
        let h = self.h(x);
        let mut g = Vector::zeros(self.dim);
        for (v, a) in self.directions.iter().zip(&self.coefficients) {
            let d = x.dot(v);
            if d != 0.0 {
                g = g + *v * (a * d.abs().powf(self.p - 1.0) * d.signum());
            }
        }
        g * h.powf(1.0 - self.p)
    }

    /// Lower and upper bounds for the volume from the polytope `P` spanned by
    /// support points: `V(P) ≤ V ≤ V_1(P, ·)^n / V(P)^{n-1}` (the second by
    /// Minkowski's inequality).
    ///
    /// The `m` directions are near-uniform directions pulled back through the
    /// body's moment factor (twice refined), so for an ellipsoid the support
    /// points are a linear image of a near-uniform sphere set and `V(P)/V`
    /// equals `1 - sphere_deficit(n, m)`.
    pub fn volume_bounds(&self, m: usize) -> Result<(f64, f64)> {
        let base = sphere_points(self.dim, m);
        let mut pts: Vec<Vector> = base.iter().map(|u| self.support_point(u)).collect();
        for _ in 0..2 {
            let back = moment_factor(&pts)?.transpose().inverse()?;
            pts = base.iter().map(|w| self.support_point(&back.apply(w))).collect();
        }
        let inner = Polytope::from_points(&pts, self.dim)?;
        let lower = inner.volume();
        let n = self.dim as f64;
        let v1 = inner.facets().iter().map(|f| self.h(&f.normal) * f.measure).sum::<f64>() / n;
        Ok((lower, v1.powf(n) / lower.powf(n - 1.0)))
    }

    /// The zonotope `Σ_j [-a_j v_j, a_j v_j]`; only for `p = 1`.
    pub fn zonotope(&self) -> Result<Polytope> {
        if self.p != 1.0 {
            return Err(GeomError::Domain("only p = 1 zonoids are zonotopes".into()));
        }
        let mut pts = vec![Vector::zeros(self.dim)];
        let mut full = false;
        for (v, a) in self.directions.iter().zip(&self.coefficients) {
            let g = *v * *a;
            pts = pts.iter().flat_map(|x| [*x + g, *x - g]).collect();
            if full || pts.len() >= 1 << self.dim {
                if let Ok(hull) = Polytope::from_points(&pts, self.dim) {
                    pts = hull.vertices().to_vec();
                    full = true;
                }
            }
        }
        Polytope::from_points(&pts, self.dim)
    }
}

impl SupportFunction for LpZonoid {
    fn dim(&self) -> usize {
        self.dim
    }

    fn support_value(&self, x: &Vector) -> f64 {
        self.h(x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProjectionKind {
    Classical,
    Mixed,
    Lp,
    MixedLp,
}

/// A projection body with its provenance.
#[derive(Clone, Debug)]
pub struct ProjectionBody {
    pub kind: ProjectionKind,
    zonoid: Arc<LpZonoid>,
}

impl ProjectionBody {
    fn new(kind: ProjectionKind, zonoid: LpZonoid) -> ProjectionBody {
        ProjectionBody { kind, zonoid: Arc::new(zonoid) }
    }

    pub fn dim(&self) -> usize {
        self.zonoid.dim
    }

    #[inline]
    pub fn h(&self, x: &Vector) -> f64 {
        self.zonoid.h(x)
    }

    pub fn support_eval(&self, x: &Vector) -> Result<f64> {
        self.body().support_eval(x)
    }

    pub fn zonoid(&self) -> &LpZonoid {
        &self.zonoid
    }

    pub fn body(&self) -> SupportBody {
        SupportBody::Computed(self.zonoid.clone())
    }

    /// The polar projection body, `ρ = 1/h`.
    pub fn polar(&self) -> Result<StarBody> {
        polar_body(&self.body())
    }
}

/// `1 - V(hull of m near-uniform unit vectors) / ω_n`, the relative volume
/// deficit of the inscribed sample polytope.
pub fn sphere_deficit(n: usize, m: usize) -> Result<f64> {
    let hull = Polytope::from_points(&sphere_points(n, m), n)?;
    Ok(1.0 - hull.volume() / unit_ball_volume(n as f64)?)
}

/// `υ(K | u^⊥) = (1/2) Σ w_i |u·v_i|` over the facets of `K`.
pub fn brightness(k: &Polytope, u: &Vector) -> Result<f64> {
    expect_dim(k.dim(), u.dim())?;
    if !u.is_unit() {
        return Err(GeomError::Domain(format!("{u:?} is not a unit vector")));
    }
    Ok(0.5 * k.facets().iter().map(|f| f.measure * u.dot(&f.normal).abs()).sum::<f64>())
}

/// `ΠK`, `h(u) = (1/2) ∫ |u·v| dS_K(v)`.
pub fn projection_body(k: &Polytope) -> Result<ProjectionBody> {
    Ok(ProjectionBody::new(ProjectionKind::Classical, LpZonoid::from_measure(&area_measure(k), 1.0, 0.5)?))
}

/// `Π(K_1, …, K_{n-1})`, `h(u) = (1/2) ∫ |u·v| dS(K_1, …, K_{n-1}; v)`.
pub fn mixed_projection_body(bodies: &[&Polytope]) -> Result<ProjectionBody> {
    let mu = mixed_area_measure(bodies)?;
    Ok(ProjectionBody::new(ProjectionKind::Mixed, LpZonoid::from_measure(&mu, 1.0, 0.5)?))
}

/// `1 / (n ω_n c_{n-2,p})`, the factor that makes `Π_p B = B`.
pub fn projection_normalizer(n: usize, p: f64) -> Result<f64> {
    Ok(1.0 / (n as f64 * unit_ball_volume(n as f64)? * lyz_constant(n - 2, p)?))
}

/// `Π_p K`, `h(u)^p = (1/(n ω_n c_{n-2,p})) ∫ |u·v|^p dS_p(K, v)`.
pub fn lp_projection_body(k: &Polytope, p: f64) -> Result<ProjectionBody> {
    let mu = lp_surface_measure(k, p)?;
    let c = projection_normalizer(k.dim(), p)?;
    Ok(ProjectionBody::new(ProjectionKind::Lp, LpZonoid::from_measure(&mu, p, c)?))
}

/// `Π_{p,t}(K, Q)`, `h(u)^p = (1/(n ω_n c_{n-2,p})) ∫ |u·v|^p dS_{p,t}(K, Q; v)`.
pub fn mixed_lp_projection_body(k: &Polytope, q: &Polytope, p: f64, t: usize) -> Result<ProjectionBody> {
    let mu = lp_mixed_surface_measure(k, q, p, t)?;
    let c = projection_normalizer(k.dim(), p)?;
    Ok(ProjectionBody::new(ProjectionKind::MixedLp, LpZonoid::from_measure(&mu, p, c)?))
}

/// `Γ_p L` as an L_p zonoid over the quadrature nodes:
/// `h(x)^p = (1/((n+p) c_{n,p} V(L))) ∫ |x·v|^p ρ_L(v)^{n+p} dS(v)`.
pub fn centroid_zonoid(l: &StarBody, p: f64, quad: &Quadrature) -> Result<LpZonoid> {
    expect_dim(l.dim(), quad.dim())?;
    let n = quad.dim();
    let volume = star_volume(l, quad)?.value;
    let c = 1.0 / ((n as f64 + p) * lyz_constant(n, p)? * volume);
    let coefficients = quad
        .nodes()
        .iter()
        .zip(quad.weights())
        .map(|(v, w)| w * l.rho(v).powf(n as f64 + p) * c)
        .collect();
    LpZonoid::new(n, p, quad.nodes().to_vec(), coefficients)
}

/// `Γ_p L` as a support body.
pub fn centroid_body(l: &StarBody, p: f64, quad: &Quadrature) -> Result<SupportBody> {
    Ok(SupportBody::Computed(Arc::new(centroid_zonoid(l, p, quad)?)))
}
