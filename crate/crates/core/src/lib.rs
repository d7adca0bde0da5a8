//! Mixed L_p surface area measures, L_{p,t} mixed volumes and mixed L_p
//! projection bodies of convex bodies in the plane and in space.

pub mod bodies;
pub mod cli;
pub mod error;
pub mod functionals;
pub mod lab;
pub mod linalg;
pub mod measures;
pub mod projections;
pub mod quadrature;
pub mod special;
pub mod tol;

pub use error::{GeomError, Result};
pub use linalg::{LinMap, Vector};
