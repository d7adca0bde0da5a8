//! Body file format.
//!
//! A JSON document with `dim`, `kind` (`polytope`, `ball`, `ellipsoid`),
//! row-major `vertices` for polytopes, `radius` for balls and a row-major
//! `shape` matrix for ellipsoids. Polytope files round-trip bit-exactly.

use serde::{Deserialize, Serialize};

use crate::bodies::hull::convex_hull;
use crate::bodies::polytope::Polytope;
use crate::bodies::star::StarBody;
use crate::bodies::support::SupportBody;
use crate::error::{check_dim, GeomError, Result};
use crate::linalg::{LinMap, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BodyKind {
    Polytope,
    Ball,
    Ellipsoid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BodyFile {
    pub dim: usize,
    pub kind: BodyKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vertices: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<Vec<f64>>,
}

/// A body read from a file.
#[derive(Clone, Debug)]
pub enum Body {
    Polytope(Polytope),
    Ball { dim: usize, radius: f64 },
    Ellipsoid(LinMap),
}

impl Body {
    pub fn dim(&self) -> usize {
        match self {
            Body::Polytope(p) => p.dim(),
            Body::Ball { dim, .. } => *dim,
            Body::Ellipsoid(m) => m.dim(),
        }
    }

    pub fn to_support(&self) -> Result<SupportBody> {
        match self {
            Body::Polytope(p) => Ok(p.clone().into()),
            Body::Ball { dim, radius } => SupportBody::ball(*dim, *radius),
            Body::Ellipsoid(m) => SupportBody::ellipsoid(*m),
        }
    }

    pub fn to_star(&self) -> Result<StarBody> {
        match self {
            Body::Polytope(p) => StarBody::polytope(p.clone()),
            Body::Ball { dim, radius } => StarBody::ball(*dim, *radius),
            Body::Ellipsoid(m) => StarBody::ellipsoid(*m),
        }
    }

    pub fn as_polytope(&self) -> Result<&Polytope> {
        match self {
            Body::Polytope(p) => Ok(p),
            _ => Err(GeomError::Domain("a polytope is required here".into())),
        }
    }

    pub fn to_file(&self) -> BodyFile {
        match self {
            Body::Polytope(p) => BodyFile {
                dim: p.dim(),
                kind: BodyKind::Polytope,
                vertices: p.vertices().iter().flat_map(|v| v.coords().to_vec()).collect(),
                radius: None,
                shape: None,
            },
            Body::Ball { dim, radius } => {
                BodyFile { dim: *dim, kind: BodyKind::Ball, vertices: vec![], radius: Some(*radius), shape: None }
            }
            Body::Ellipsoid(m) => BodyFile {
                dim: m.dim(),
                kind: BodyKind::Ellipsoid,
                vertices: vec![],
                radius: None,
                shape: Some(m.row_major()),
            },
        }
    }
}

impl BodyFile {
    pub fn into_body(self) -> Result<Body> {
        check_dim(self.dim)?;
        match self.kind {
            BodyKind::Polytope => {
                if self.vertices.is_empty() || self.vertices.len() % self.dim != 0 {
                    return Err(GeomError::Parse(format!(
                        "vertex list of length {} is not a multiple of dim {}",
                        self.vertices.len(),
                        self.dim
                    )));
                }
                let pts = self
                    .vertices
                    .chunks(self.dim)
                    .map(Vector::from_slice)
                    .collect::<Result<Vec<_>>>()?;
                Ok(Body::Polytope(convex_hull(&pts, self.dim)?))
            }
            BodyKind::Ball => {
                let radius = self.radius.unwrap_or(1.0);
                SupportBody::ball(self.dim, radius)?;
                Ok(Body::Ball { dim: self.dim, radius })
            }
            BodyKind::Ellipsoid => {
                let shape = self.shape.ok_or_else(|| GeomError::Parse("ellipsoid needs a shape matrix".into()))?;
                let m = LinMap::from_row_major(self.dim, &shape)?;
                m.inverse()?;
                Ok(Body::Ellipsoid(m))
            }
        }
    }
}

pub fn parse_body(text: &str) -> Result<Body> {
    let file: BodyFile = serde_json::from_str(text).map_err(|e| GeomError::Parse(e.to_string()))?;
    file.into_body()
}

pub fn render_body(body: &Body) -> String {
    let mut s = serde_json::to_string_pretty(&body.to_file()).expect("body files serialize");
    s.push('\n');
    s
}
