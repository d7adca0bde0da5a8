use serde::{Deserialize, Serialize};

use crate::bodies::hull::convex_hull;
use crate::error::{check_dim, expect_dim, GeomError, Result};
use crate::linalg::{LinMap, Vector};
use crate::quadrature::sphere_points;
use crate::special::unit_ball_volume;

/// A facet: outward unit normal, support value in that direction, and
/// `(n-1)`-dimensional volume.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Facet {
    pub normal: Vector,
    pub offset: f64,
    pub measure: f64,
}

/// A convex polytope with nonempty interior in the plane or in space.
#[derive(Clone, Debug, PartialEq)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vector>,
    facets: Vec<Facet>,
}

impl Polytope {
    pub(crate) fn from_parts(dim: usize, vertices: Vec<Vector>, facets: Vec<Facet>) -> Result<Polytope> {
        let p = Polytope { dim, vertices, facets };
        let scale = p.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
        for f in &p.facets {
            for v in &p.vertices {
                if f.normal.dot(v) > f.offset + 1e-9 * scale {
                    return Err(GeomError::Degenerate("vertex outside a facet halfspace".into()));
                }
            }
        }
        if p.facets.len() < dim + 1 || p.vertices.len() < dim + 1 {
            return Err(GeomError::Degenerate("too few facets".into()));
        }
        Ok(p)
    }

    pub fn from_points(points: &[Vector], dim: usize) -> Result<Polytope> {
        convex_hull(points, dim)
    }

    /// The cube `[-a, a]^n`.
    pub fn cube(dim: usize, a: f64) -> Result<Polytope> {
        check_dim(dim)?;
        let mut pts = Vec::new();
        for mask in 0..(1usize << dim) {
            let c: Vec<f64> = (0..dim).map(|i| if mask >> i & 1 == 1 { a } else { -a }).collect();
            pts.push(Vector::from_slice(&c)?);
        }
        convex_hull(&pts, dim)
    }

    /// The cross-polytope with vertices `±a e_i`.
    pub fn cross_polytope(dim: usize, a: f64) -> Result<Polytope> {
        check_dim(dim)?;
        let pts: Vec<Vector> = (0..dim).flat_map(|i| [Vector::basis(dim, i) * a, Vector::basis(dim, i) * -a]).collect();
        convex_hull(&pts, dim)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// `V = (1/n) Σ offset_i · measure_i`.
    pub fn volume(&self) -> f64 {
        self.facets.iter().map(|f| f.offset * f.measure).sum::<f64>() / self.dim as f64
    }

    pub fn surface_area(&self) -> f64 {
        self.facets.iter().map(|f| f.measure).sum()
    }

    /// `|Σ measure_i normal_i|`; zero for a closed boundary.
    pub fn closedness_residual(&self) -> f64 {
        self.facets
            .iter()
            .fold(Vector::zeros(self.dim), |acc, f| acc + f.normal * f.measure)
            .norm()
    }

    #[inline]
    pub(crate) fn h(&self, x: &Vector) -> f64 {
        self.vertices.iter().map(|v| v.dot(x)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn support(&self, x: &Vector) -> Result<f64> {
        expect_dim(self.dim, x.dim())?;
        if x.norm() == 0.0 {
            return Err(GeomError::ZeroVector);
        }
        Ok(self.h(x))
    }

    #[inline]
    pub(crate) fn rho(&self, x: &Vector) -> f64 {
        self.facets
            .iter()
            .filter_map(|f| {
                let c = f.normal.dot(x);
                (c > 0.0).then(|| f.offset / c)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Radial function; requires the origin in the interior.
    pub fn radial(&self, x: &Vector) -> Result<f64> {
        expect_dim(self.dim, x.dim())?;
        if x.norm() == 0.0 {
            return Err(GeomError::ZeroVector);
        }
        self.require_origin_interior()?;
        Ok(self.rho(x))
    }

    /// Whether all facet offsets are positive.
    pub fn contains_origin_interior(&self) -> bool {
        self.facets.iter().all(|f| f.offset > 0.0)
    }

    pub fn require_origin_interior(&self) -> Result<()> {
        match self.facets.iter().map(|f| f.offset).fold(f64::INFINITY, f64::min) {
            m if m > 0.0 => Ok(()),
            m => Err(GeomError::NotOriginInterior(format!("minimum facet offset {m:e}"))),
        }
    }

    pub fn vertex_centroid(&self) -> Vector {
        self.vertices.iter().fold(Vector::zeros(self.dim), |a, v| a + *v) * (1.0 / self.vertices.len() as f64)
    }

    pub fn translate(&self, shift: &Vector) -> Polytope {
        Polytope {
            dim: self.dim,
            vertices: self.vertices.iter().map(|v| *v + *shift).collect(),
            facets: self
                .facets
                .iter()
                .map(|f| Facet { normal: f.normal, offset: f.offset + f.normal.dot(shift), measure: f.measure })
                .collect(),
        }
    }

    /// Moves the vertex centroid to the origin.
    pub fn recentered(&self) -> Polytope {
        self.translate(&-self.vertex_centroid())
    }

    /// Dilation by `lambda > 0`.
    pub fn scale(&self, lambda: f64) -> Result<Polytope> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(GeomError::Domain(format!("dilation factor must be positive, got {lambda}")));
        }
        let m = lambda.powi(self.dim as i32 - 1);
        Ok(Polytope {
            dim: self.dim,
            vertices: self.vertices.iter().map(|v| *v * lambda).collect(),
            facets: self
                .facets
                .iter()
                .map(|f| Facet { normal: f.normal, offset: f.offset * lambda, measure: f.measure * m })
                .collect(),
        })
    }

    /// `φ P`; vertices are mapped and facets recomputed.
    pub fn linear_image(&self, phi: &LinMap) -> Result<Polytope> {
        expect_dim(self.dim, phi.dim())?;
        phi.inverse()?;
        let pts: Vec<Vector> = self.vertices.iter().map(|v| phi.apply(v)).collect();
        convex_hull(&pts, self.dim)
    }

    /// `P + Q` as the hull of all pairwise vertex sums.
    pub fn minkowski_sum(&self, other: &Polytope) -> Result<Polytope> {
        expect_dim(self.dim, other.dim)?;
        let pts: Vec<Vector> =
            self.vertices.iter().flat_map(|a| other.vertices.iter().map(move |b| *a + *b)).collect();
        convex_hull(&pts, self.dim)
    }

    /// Polar body: the hull of `normal_i / offset_i`.
    pub fn polar(&self) -> Result<Polytope> {
        self.require_origin_interior()?;
        let pts: Vec<Vector> = self.facets.iter().map(|f| f.normal * (1.0 / f.offset)).collect();
        convex_hull(&pts, self.dim)
    }
}

/// Polytopal stand-in for the unit ball.
#[derive(Clone, Debug)]
pub struct BallApprox {
    pub polytope: Polytope,
    /// Hausdorff distance to the unit ball.
    pub hausdorff: f64,
}

/// Inscribed approximant of the unit ball: the regular `m`-gon in the plane,
/// the hull of `m` near-uniform sphere points in space.
pub fn ball_approx(n: usize, m: usize) -> Result<BallApprox> {
    check_dim(n)?;
    if m < n + 1 {
        return Err(GeomError::OutOfRange(format!("ball approximant needs at least {} points, got {m}", n + 1)));
    }
    let polytope = convex_hull(&sphere_points(n, m), n)?;
    let inradius = polytope.facets.iter().map(|f| f.offset).fold(f64::INFINITY, f64::min);
    Ok(BallApprox { hausdorff: 1.0 - inradius, polytope })
}

/// The inscribed approximant dilated to volume `ω_n`.
///
/// This is the stand-in used wherever the ball enters a mixed measure: its
/// surface and mixed measures are first-order accurate in every direction,
/// unlike the inscribed body whose deficit is one-sided.
pub fn ball_approx_volume_matched(n: usize, m: usize) -> Result<BallApprox> {
    let inscribed = ball_approx(n, m)?.polytope;
    let omega = unit_ball_volume(n as f64)?;
    let polytope = inscribed.scale((omega / inscribed.volume()).powf(1.0 / n as f64))?;
    let inradius = polytope.facets.iter().map(|f| f.offset).fold(f64::INFINITY, f64::min);
    let outradius = polytope.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(BallApprox { hausdorff: (1.0 - inradius).max(outradius - 1.0), polytope })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn cube_and_square_volumes() {
        assert!((Polytope::cube(2, 1.0).unwrap().volume() - 4.0).abs() < 1e-14);
        assert!((Polytope::cube(3, 1.0).unwrap().volume() - 8.0).abs() < 1e-13);
        assert!((Polytope::cross_polytope(3, 1.0).unwrap().volume() - 4.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn square_support_and_radial() {
        let sq = Polytope::cube(2, 1.0).unwrap();
        assert_eq!(sq.support(&Vector::new2(1.0, 1.0)).unwrap(), 2.0);
        assert_eq!(sq.radial(&Vector::new2(1.0, 0.0)).unwrap(), 1.0);
        assert!(sq.support(&Vector::zeros(2)).is_err());
    }

    #[test]
    fn polar_of_square_is_diamond() {
        let sq = Polytope::cube(2, 1.0).unwrap();
        let polar = sq.polar().unwrap();
        let mut verts: Vec<Vector> = polar.vertices().to_vec();
        verts.sort_by(|a, b| a.lex_cmp(b));
        let mut expected = Polytope::cross_polytope(2, 1.0).unwrap().vertices().to_vec();
        expected.sort_by(|a, b| a.lex_cmp(b));
        assert_eq!(verts.len(), 4);
        for (a, b) in verts.iter().zip(&expected) {
            assert!(a.distance(b) < 1e-12);
        }
    }

    #[test]
    fn polar_needs_interior_origin() {
        let sq = Polytope::cube(2, 1.0).unwrap().translate(&Vector::new2(1.0, 0.0));
        assert!(!sq.contains_origin_interior());
        assert!(matches!(sq.polar(), Err(GeomError::NotOriginInterior(_))));
    }

    #[test]
    fn ball_approx_cases() {
        let sq = ball_approx(2, 4).unwrap();
        assert!((sq.polytope.volume() - 2.0).abs() < 1e-14);
        let mut last = 0.0;
        for m in [4, 8, 16, 64, 256, 1024] {
            let v = ball_approx(2, m).unwrap().polytope.volume();
            assert!(v > last && v < PI);
            last = v;
        }
        assert!((last - PI).abs() < 1e-4);
        let b3 = ball_approx(3, 320).unwrap();
        assert!((b3.polytope.volume() / (4.0 * PI / 3.0) - 1.0).abs() < 0.02);
        assert!(b3.hausdorff > 0.0 && b3.hausdorff < 0.02);
        let vm = ball_approx_volume_matched(3, 320).unwrap();
        assert!((vm.polytope.volume() - 4.0 * PI / 3.0).abs() < 1e-12);
        assert!(ball_approx(3, 3).is_err());
    }

    #[test]
    fn scaling_and_translation_are_exact() {
        let c = Polytope::cube(3, 1.0).unwrap();
        assert!((c.scale(2.0).unwrap().volume() - 64.0).abs() < 1e-12);
        let t = c.translate(&Vector::new3(0.3, -0.2, 0.1));
        assert!((t.volume() - 8.0).abs() < 1e-12);
        assert!(c.scale(-1.0).is_err());
    }
}
