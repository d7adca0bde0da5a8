//! Convex and star bodies: polytopes, support-function bodies, radial bodies.

pub mod hull;
pub mod io;
pub mod polytope;
pub mod star;
pub mod support;

pub use hull::convex_hull;
pub use polytope::{ball_approx, ball_approx_volume_matched, BallApprox, Facet, Polytope};
pub use star::{harmonic_combination, polar_body, star_linear_image, StarBody};
pub use support::{linear_image, lp_combination, translate, SupportBody, SupportFunction};
