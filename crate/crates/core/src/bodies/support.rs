use std::fmt;
use std::sync::Arc;

use crate::bodies::polytope::Polytope;
use crate::error::{check_dim, expect_dim, GeomError, Result};
use crate::linalg::{LinMap, Vector};

/// A positively homogeneous, sublinear function on `R^n`.
pub trait SupportFunction: Send + Sync {
    fn dim(&self) -> usize;
    fn support_value(&self, x: &Vector) -> f64;
}

/// A convex body known through its support function.
#[derive(Clone)]
pub enum SupportBody {
    Polytope(Arc<Polytope>),
    Ball { dim: usize, radius: f64 },
    /// The image `A B` of the unit ball.
    Ellipsoid { shape: LinMap },
    /// `s·K +_p t·L`.
    LpCombination { s: f64, k: Arc<SupportBody>, t: f64, l: Arc<SupportBody>, p: f64 },
    LinearImage { map: LinMap, body: Arc<SupportBody> },
    Translate { body: Arc<SupportBody>, shift: Vector },
    Computed(Arc<dyn SupportFunction>),
}

impl fmt::Debug for SupportBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SupportBody::Polytope(p) => write!(f, "Polytope({} vertices)", p.vertices().len()),
            SupportBody::Ball { dim, radius } => write!(f, "Ball(dim={dim}, r={radius})"),
            SupportBody::Ellipsoid { shape } => write!(f, "Ellipsoid({shape:?})"),
            SupportBody::LpCombination { s, k, t, l, p } => write!(f, "LpCombination({s}·{k:?} +_{p} {t}·{l:?})"),
            SupportBody::LinearImage { map, body } => write!(f, "LinearImage({map:?}, {body:?})"),
            SupportBody::Translate { body, shift } => write!(f, "Translate({body:?}, {shift:?})"),
            SupportBody::Computed(c) => write!(f, "Computed(dim={})", c.dim()),
        }
    }
}

impl From<Polytope> for SupportBody {
    fn from(p: Polytope) -> Self {
        SupportBody::Polytope(Arc::new(p))
    }
}

impl SupportBody {
    pub fn ball(dim: usize, radius: f64) -> Result<SupportBody> {
        check_dim(dim)?;
        if !(radius > 0.0) {
            return Err(GeomError::Domain(format!("ball radius must be positive, got {radius}")));
        }
        Ok(SupportBody::Ball { dim, radius })
    }

    pub fn ellipsoid(shape: LinMap) -> Result<SupportBody> {
        shape.inverse()?;
        Ok(SupportBody::Ellipsoid { shape })
    }

    pub fn dim(&self) -> usize {
        match self {
            SupportBody::Polytope(p) => p.dim(),
            SupportBody::Ball { dim, .. } => *dim,
            SupportBody::Ellipsoid { shape } => shape.dim(),
            SupportBody::LpCombination { k, .. } => k.dim(),
            SupportBody::LinearImage { map, .. } => map.dim(),
            SupportBody::Translate { shift, .. } => shift.dim(),
            SupportBody::Computed(c) => c.dim(),
        }
    }

    /// Support value without argument checks; `h(0) = 0`.
    #[inline]
    pub fn h(&self, x: &Vector) -> f64 {
        match self {
            SupportBody::Polytope(p) => p.h(x),
            SupportBody::Ball { radius, .. } => radius * x.norm(),
            SupportBody::Ellipsoid { shape } => shape.transpose().apply(x).norm(),
            SupportBody::LpCombination { s, k, t, l, p } => {
                let a = k.h(x);
                let b = l.h(x);
                (s * a.powf(*p) + t * b.powf(*p)).powf(1.0 / p)
            }
            SupportBody::LinearImage { map, body } => body.h(&map.transpose().apply(x)),
            SupportBody::Translate { body, shift } => body.h(x) + shift.dot(x),
            SupportBody::Computed(c) => c.support_value(x),
        }
    }

    /// `h_K(x) = max { x·y : y ∈ K }` for `x ≠ 0`.
    pub fn support_eval(&self, x: &Vector) -> Result<f64> {
        expect_dim(self.dim(), x.dim())?;
        if x.norm() == 0.0 {
            return Err(GeomError::ZeroVector);
        }
        Ok(self.h(x))
    }

    /// Structural test for the origin lying in the interior.
    pub fn contains_origin_interior(&self) -> bool {
        match self {
            SupportBody::Polytope(p) => p.contains_origin_interior(),
            SupportBody::Ball { .. } | SupportBody::Ellipsoid { .. } => true,
            SupportBody::LpCombination { s, k, t, l, .. } => {
                (*s > 0.0 && k.contains_origin_interior() && (*t == 0.0 || l.contains_origin_interior()))
                    || (*t > 0.0 && l.contains_origin_interior() && (*s == 0.0 || k.contains_origin_interior()))
            }
            SupportBody::LinearImage { body, .. } => body.contains_origin_interior(),
            // Not decidable from the evaluator alone; callers check h > 0 on the directions they use.
            SupportBody::Translate { .. } | SupportBody::Computed(_) => false,
        }
    }

    pub fn as_polytope(&self) -> Option<&Polytope> {
        match self {
            SupportBody::Polytope(p) => Some(p),
            _ => None,
        }
    }
}

/// `s·K +_p t·L`, whose support function is `(s h_K^p + t h_L^p)^{1/p}`.
pub fn lp_combination(s: f64, k: &SupportBody, t: f64, l: &SupportBody, p: f64) -> Result<SupportBody> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(GeomError::Domain(format!("L_p combination needs p >= 1, got {p}")));
    }
    if !(s >= 0.0 && t >= 0.0) || s + t <= 0.0 {
        return Err(GeomError::Domain(format!("coefficients must be nonnegative with positive sum, got {s}, {t}")));
    }
    expect_dim(k.dim(), l.dim())?;
    let interior = |b: &SupportBody, c: f64| c == 0.0 || b.contains_origin_interior();
    if !interior(k, s) || !interior(l, t) {
        return Err(GeomError::NotOriginInterior("L_p combination of bodies without interior origin".into()));
    }
    Ok(SupportBody::LpCombination { s, k: Arc::new(k.clone()), t, l: Arc::new(l.clone()), p })
}

/// `φ K` through `h_{φK}(x) = h_K(φ^t x)`.
pub fn linear_image(phi: &LinMap, k: &SupportBody) -> Result<SupportBody> {
    expect_dim(k.dim(), phi.dim())?;
    phi.inverse()?;
    Ok(SupportBody::LinearImage { map: *phi, body: Arc::new(k.clone()) })
}

pub fn translate(k: &SupportBody, shift: &Vector) -> Result<SupportBody> {
    expect_dim(k.dim(), shift.dim())?;
    Ok(SupportBody::Translate { body: Arc::new(k.clone()), shift: *shift })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lp_self_combination_is_a_dilate() {
        let cube: SupportBody = Polytope::cube(3, 1.0).unwrap().into();
        for p in [1.0, 1.5, 2.0, 4.0] {
            let eps = 0.3;
            let comb = lp_combination(1.0, &cube, eps, &cube, p).unwrap();
            let x = Vector::new3(0.3, -0.7, 0.2);
            let expect = (1.0f64 + eps).powf(1.0 / p) * cube.h(&x);
            assert!((comb.h(&x) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn lp_combination_rejects_small_p() {
        let b = SupportBody::ball(2, 1.0).unwrap();
        assert!(lp_combination(1.0, &b, 1.0, &b, 0.5).is_err());
        let shifted: SupportBody = Polytope::cube(2, 1.0).unwrap().translate(&Vector::new2(3.0, 0.0)).into();
        assert!(matches!(lp_combination(1.0, &b, 1.0, &shifted, 2.0), Err(GeomError::NotOriginInterior(_))));
    }

    #[test]
    fn unit_coefficients_leave_the_body() {
        let b: SupportBody = Polytope::cube(2, 1.0).unwrap().into();
        let e = SupportBody::ellipsoid(LinMap::diag(&[2.0, 0.5]).unwrap()).unwrap();
        let same = lp_combination(1.0, &b, 0.0, &e, 3.0).unwrap();
        let x = Vector::new2(0.4, 0.9);
        assert!((same.h(&x) - b.h(&x)).abs() < 1e-15);
    }

    #[test]
    fn ellipsoid_support() {
        let e = SupportBody::ellipsoid(LinMap::diag(&[2.0, 0.5]).unwrap()).unwrap();
        assert!((e.support_eval(&Vector::new2(1.0, 0.0)).unwrap() - 2.0).abs() < 1e-15);
        assert!((e.support_eval(&Vector::new2(0.0, 1.0)).unwrap() - 0.5).abs() < 1e-15);
        assert!(e.support_eval(&Vector::zeros(2)).is_err());
    }
}
