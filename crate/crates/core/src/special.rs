//! Normalization constants built on the unit-ball volume.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use crate::error::{GeomError, Result};

/// Volume of the unit ball in dimension `q`, extended to real `q >= 0`:
/// `π^{q/2} / Γ(1 + q/2)`.
pub fn unit_ball_volume(q: f64) -> Result<f64> {
    if !(q >= 0.0) || !q.is_finite() {
        return Err(GeomError::Domain(format!("unit ball volume needs q >= 0, got {q}")));
    }
    if q == 0.0 {
        return Ok(1.0);
    }
    Ok((0.5 * q * PI.ln() - ln_gamma(1.0 + 0.5 * q)).exp())
}

/// `ω_{n+p} / (ω_2 ω_n ω_{p-1})`.
///
/// The L_p projection body normalization uses `lyz_constant(n - 2, p)`, so
/// `n = 0` is accepted.
pub fn lyz_constant(n: usize, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(GeomError::Domain(format!("lyz constant needs p >= 1, got {p}")));
    }
    let n = n as f64;
    Ok(unit_ball_volume(n + p)?
        / (unit_ball_volume(2.0)? * unit_ball_volume(n)? * unit_ball_volume(p - 1.0)?))
}

/// Surface area of the unit sphere `S^{n-1}`, i.e. `n ω_n`.
pub fn sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n as f64).expect("n >= 0")
}

/// `∫_{S^{n-1}} |u·v|^p dS(v)` in closed form.
pub fn abs_power_moment(n: usize, p: f64) -> f64 {
    let n = n as f64;
    2.0 * PI.powf(0.5 * (n - 1.0))
        * (ln_gamma(0.5 * (p + 1.0)) - ln_gamma(0.5 * (n + p))).exp()
}
