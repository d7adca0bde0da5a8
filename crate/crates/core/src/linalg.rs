//! Small fixed-capacity vectors and linear maps for dimensions 2 and 3.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_dim, expect_dim, GeomError, Result};
use crate::tol;

/// A point or direction in the plane or in space.
#[derive(Clone, Copy, PartialEq)]
pub struct Vector {
    coords: [f64; 3],
    dim: usize,
}

impl Vector {
    pub fn new2(x: f64, y: f64) -> Self {
        Vector { coords: [x, y, 0.0], dim: 2 }
    }

    pub fn new3(x: f64, y: f64, z: f64) -> Self {
        Vector { coords: [x, y, z], dim: 3 }
    }

    pub fn zeros(dim: usize) -> Self {
        Vector { coords: [0.0; 3], dim }
    }

    /// The `i`-th standard basis vector.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Vector::zeros(dim);
        v.coords[i] = 1.0;
        v
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        check_dim(values.len())?;
        if values.iter().any(|x| !x.is_finite()) {
            return Err(GeomError::Domain("non-finite coordinate".into()));
        }
        let mut coords = [0.0; 3];
        coords[..values.len()].copy_from_slice(values);
        Ok(Vector { coords, dim: values.len() })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    #[inline]
    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        self.coords[0] * other.coords[0]
            + self.coords[1] * other.coords[1]
            + self.coords[2] * other.coords[2]
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// `x / |x|`; fails on the zero vector.
    pub fn normalized(&self) -> Result<Vector> {
        let r = self.norm();
        if r == 0.0 || !r.is_finite() {
            return Err(GeomError::ZeroVector);
        }
        Ok(*self * (1.0 / r))
    }

    pub fn is_unit(&self) -> bool {
        (self.norm() - 1.0).abs() <= tol::UNIT
    }

    /// Cross product (3D only).
    pub fn cross(&self, other: &Vector) -> Vector {
        debug_assert!(self.dim == 3 && other.dim == 3);
        let a = &self.coords;
        let b = &other.coords;
        Vector::new3(
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        )
    }

    pub fn distance(&self, other: &Vector) -> f64 {
        (*self - *other).norm()
    }

    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|x| x.is_finite())
    }

    /// Lexicographic comparison of coordinates.
    pub fn lex_cmp(&self, other: &Vector) -> std::cmp::Ordering {
        for (a, b) in self.coords().iter().zip(other.coords()) {
            match a.total_cmp(b) {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        std::cmp::Ordering::Equal
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords())
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.coords()[i]
    }
}

impl Add for Vector {
    type Output = Vector;
    fn add(self, o: Vector) -> Vector {
        debug_assert_eq!(self.dim, o.dim);
        Vector {
            coords: [
                self.coords[0] + o.coords[0],
                self.coords[1] + o.coords[1],
                self.coords[2] + o.coords[2],
            ],
            dim: self.dim,
        }
    }
}

impl Sub for Vector {
    type Output = Vector;
    fn sub(self, o: Vector) -> Vector {
        debug_assert_eq!(self.dim, o.dim);
        Vector {
            coords: [
                self.coords[0] - o.coords[0],
                self.coords[1] - o.coords[1],
                self.coords[2] - o.coords[2],
            ],
            dim: self.dim,
        }
    }
}

impl Mul<f64> for Vector {
    type Output = Vector;
    fn mul(self, s: f64) -> Vector {
        Vector {
            coords: [self.coords[0] * s, self.coords[1] * s, self.coords[2] * s],
            dim: self.dim,
        }
    }
}

impl Neg for Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        self * -1.0
    }
}

impl Serialize for Vector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        Vector::from_slice(&v).map_err(serde::de::Error::custom)
    }
}

/// A linear map of the plane or of space, with its determinant cached.
#[derive(Clone, Copy, PartialEq)]
pub struct LinMap {
    m: [[f64; 3]; 3],
    dim: usize,
    det: f64,
}

/// Lower Cholesky factor `L` of the centred second-moment matrix of a point
/// cloud, so that the cloud looks isotropic after applying `L^{-1}`.
pub fn moment_factor(points: &[Vector]) -> Result<LinMap> {
    let n = points.first().ok_or(GeomError::Degenerate("empty point cloud".into()))?.dim();
    let mean = points.iter().fold(Vector::zeros(n), |acc, x| acc + *x) * (1.0 / points.len() as f64);
    let mut s = [[0.0; 3]; 3];
    for x in points {
        let d = *x - mean;
        for i in 0..n {
            for j in 0..=i {
                s[i][j] += d[i] * d[j] / points.len() as f64;
            }
        }
    }
    let mut l = [[0.0; 3]; 3];
    for i in 0..n {
        for j in 0..=i {
            let sum = s[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if !(sum > 0.0) {
                    return Err(GeomError::Degenerate("point cloud is flat".into()));
                }
                l[i][i] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    Ok(LinMap::from_array(n, l))
}

impl fmt::Debug for LinMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[f64]> = (0..self.dim).map(|i| &self.m[i][..self.dim]).collect();
        write!(f, "LinMap{:?}", rows)
    }
}

impl LinMap {
    /// Builds a map from a row-major `dim x dim` slice.
    pub fn from_row_major(dim: usize, entries: &[f64]) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(GeomError::DimensionMismatch { expected: dim * dim, found: entries.len() });
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(GeomError::Domain("non-finite matrix entry".into()));
        }
        let mut m = [[0.0; 3]; 3];
        for i in 0..dim {
            for j in 0..dim {
                m[i][j] = entries[i * dim + j];
            }
        }
        Ok(Self::from_array(dim, m))
    }

    fn from_array(dim: usize, m: [[f64; 3]; 3]) -> Self {
        let det = match dim {
            2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
            _ => {
                m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                    - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                    + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
            }
        };
        LinMap { m, dim, det }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, 1.0)
    }

    pub fn scalar(dim: usize, s: f64) -> Self {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate().take(dim) {
            row[i] = s;
        }
        Self::from_array(dim, m)
    }

    pub fn diag(entries: &[f64]) -> Result<Self> {
        let dim = entries.len();
        check_dim(dim)?;
        let mut m = [[0.0; 3]; 3];
        for i in 0..dim {
            m[i][i] = entries[i];
        }
        Ok(Self::from_array(dim, m))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    pub fn row_major(&self) -> Vec<f64> {
        (0..self.dim).flat_map(|i| self.m[i][..self.dim].to_vec()).collect()
    }

    pub fn is_special(&self) -> bool {
        (self.det - 1.0).abs() <= tol::SL_DET
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        debug_assert_eq!(self.dim, x.dim());
        let mut out = Vector::zeros(self.dim);
        for i in 0..self.dim {
            out.coords[i] = (0..self.dim).map(|j| self.m[i][j] * x.coords[j]).sum();
        }
        out
    }

    pub fn transpose(&self) -> LinMap {
        let mut m = [[0.0; 3]; 3];
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[i][j] = self.m[j][i];
            }
        }
        LinMap { m, dim: self.dim, det: self.det }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinMap) -> Result<LinMap> {
        expect_dim(self.dim, other.dim)?;
        let mut m = [[0.0; 3]; 3];
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[i][j] = (0..self.dim).map(|k| self.m[i][k] * other.m[k][j]).sum();
            }
        }
        Ok(Self::from_array(self.dim, m))
    }

    pub fn scaled(&self, s: f64) -> LinMap {
        let mut m = self.m;
        for row in m.iter_mut() {
            for x in row.iter_mut() {
                *x *= s;
            }
        }
        Self::from_array(self.dim, m)
    }

    pub fn inverse(&self) -> Result<LinMap> {
        let scale = self.frobenius_norm().powi(self.dim as i32);
        if self.det == 0.0 || self.det.abs() <= 1e-14 * scale {
            return Err(GeomError::Singular(self.det));
        }
        let m = &self.m;
        let d = self.det;
        let mut inv = [[0.0; 3]; 3];
        if self.dim == 2 {
            inv[0][0] = m[1][1] / d;
            inv[0][1] = -m[0][1] / d;
            inv[1][0] = -m[1][0] / d;
            inv[1][1] = m[0][0] / d;
        } else {
            for i in 0..3 {
                for j in 0..3 {
                    // cofactor of (j, i)
                    let r0 = (j + 1) % 3;
                    let r1 = (j + 2) % 3;
                    let c0 = (i + 1) % 3;
                    let c1 = (i + 2) % 3;
                    inv[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / d;
                }
            }
        }
        Ok(LinMap { m: inv, dim: self.dim, det: 1.0 / d })
    }

    /// `(φ^t)^{-1}`.
    pub fn inverse_transpose(&self) -> Result<LinMap> {
        Ok(self.inverse()?.transpose())
    }

    pub fn frobenius_norm(&self) -> f64 {
        (0..self.dim)
            .flat_map(|i| (0..self.dim).map(move |j| (i, j)))
            .map(|(i, j)| self.m[i][j] * self.m[i][j])
            .sum::<f64>()
            .sqrt()
    }

    /// Frobenius condition number `|A|_F |A^{-1}|_F`; an upper bound of the
    /// spectral condition number times `n`.
    pub fn condition_number(&self) -> f64 {
        match self.inverse() {
            Ok(inv) => self.frobenius_norm() * inv.frobenius_norm(),
            Err(_) => f64::INFINITY,
        }
    }
}

impl Serialize for LinMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.dim, self.row_major()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (dim, entries) = <(usize, Vec<f64>)>::deserialize(d)?;
        LinMap::from_row_major(dim, &entries).map_err(serde::de::Error::custom)
    }
}
