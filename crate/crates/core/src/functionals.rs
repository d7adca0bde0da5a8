//! Scalar functionals: mixed volumes, quermassintegrals, L_p and L_{p,t}
//! mixed volumes, dual mixed volumes and volumes of star bodies.

use serde::{Deserialize, Serialize};

use crate::bodies::{ball_approx_volume_matched, Polytope, StarBody, SupportBody};
use crate::error::{expect_dim, GeomError, Result};
use crate::linalg::Vector;
use crate::measures::{
    lp_mixed_surface_measure, lp_surface_measure, mixed_area_measure, SphericalMeasure,
};
use crate::quadrature::Quadrature;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactSum,
    Quadrature,
    FiniteDifference,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ExactSum => "exact-sum",
            Method::Quadrature => "quadrature",
            Method::FiniteDifference => "finite-difference",
        }
    }
}

/// A functional value with the method that produced it and an error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalResult {
    pub value: f64,
    pub method: Method,
    pub tolerance: f64,
}

impl FunctionalResult {
    /// Exact finite sum; the tolerance is a rounding bound.
    fn exact(value: f64, abs_sum: f64, terms: usize) -> FunctionalResult {
        let tolerance = (terms.max(1) as f64) * f64::EPSILON * abs_sum.max(value.abs());
        FunctionalResult { value, method: Method::ExactSum, tolerance }
    }

    /// A value computed by a short exact sum of `terms` terms.
    pub fn from_exact(value: f64, terms: usize) -> FunctionalResult {
        FunctionalResult::exact(value, value.abs(), terms)
    }

    fn approximate(value: f64, method: Method, tolerance: f64) -> FunctionalResult {
        FunctionalResult { value, method, tolerance: tolerance.max(f64::EPSILON * value.abs()).max(f64::MIN_POSITIVE) }
    }
}

/// `(1/n) Σ f(v) w` with a rounding bound.
fn exact_integral<F: Fn(&Vector) -> f64>(mu: &SphericalMeasure, f: F) -> Result<FunctionalResult> {
    let n = mu.dim() as f64;
    let mut sum = 0.0;
    let mut abs = 0.0;
    for a in mu.atoms() {
        let v = f(&a.direction);
        if !v.is_finite() {
            return Err(GeomError::Domain(format!("integrand undefined at {:?}", a.direction)));
        }
        sum += a.weight * v;
        abs += (a.weight * v).abs();
    }
    Ok(FunctionalResult::exact(sum / n, abs / n, mu.atoms().len()))
}

/// `V(K_1, …, K_n) = (1/n) ∫ h_{K_n} dS(K_1, …, K_{n-1}; ·)`.
pub fn mixed_volume(bodies: &[&Polytope]) -> Result<FunctionalResult> {
    let n = bodies.first().map(|b| b.dim()).ok_or(GeomError::DimensionMismatch { expected: 2, found: 0 })?;
    if bodies.len() != n {
        return Err(GeomError::DimensionMismatch { expected: n, found: bodies.len() });
    }
    for b in bodies {
        expect_dim(n, b.dim())?;
    }
    if bodies.iter().all(|b| *b == bodies[0]) {
        let v = bodies[0].volume();
        return Ok(FunctionalResult::exact(v, v, bodies[0].facets().len()));
    }
    // Put a body that differs from the rest in the evaluation slot so that
    // the measure is built from as few distinct bodies as possible.
    let mut order: Vec<&Polytope> = bodies.to_vec();
    if let Some(odd) = (0..n).find(|&i| bodies.iter().filter(|b| **b == bodies[i]).count() == 1) {
        order.swap(odd, n - 1);
    }
    let last = order[n - 1];
    let mu = mixed_area_measure(&order[..n - 1])?;
    exact_integral(&mu, |u| last.h(u))
}

/// `V(K, s; L, t; Q, n-s-t)`.
pub fn repeated_mixed_volume(k: &Polytope, s: usize, l: &Polytope, t: usize, q: &Polytope) -> Result<FunctionalResult> {
    let n = k.dim();
    expect_dim(n, l.dim())?;
    expect_dim(n, q.dim())?;
    if s + t > n {
        return Err(GeomError::OutOfRange(format!("multiplicities {s} + {t} exceed n = {n}")));
    }
    let mut list: Vec<&Polytope> = vec![k; s];
    list.extend(std::iter::repeat_n(l, t));
    list.extend(std::iter::repeat_n(q, n - s - t));
    mixed_volume(&list)
}

/// Relative error bound for a functional homogeneous of degree `i` in the
/// ball slot, given an approximant within Hausdorff distance `hd` of `B`.
fn ball_slot_error(i: usize, hd: f64) -> f64 {
    ((1.0 + hd) / (1.0 - hd)).powi(i as i32) - 1.0
}

/// `W_i(K) = V(K, n-i; B, i)` with `B` replaced by a volume-matched
/// approximant on `m` points.
pub fn quermassintegral(k: &Polytope, i: usize, m: usize) -> Result<FunctionalResult> {
    let n = k.dim();
    if i > n {
        return Err(GeomError::OutOfRange(format!("quermassintegral index {i} exceeds n = {n}")));
    }
    if i == 0 {
        let v = k.volume();
        return Ok(FunctionalResult::exact(v, v, k.facets().len()));
    }
    let ball = ball_approx_volume_matched(n, m)?;
    let r = repeated_mixed_volume(k, n - i, &ball.polytope, i, &ball.polytope)?;
    let tolerance = r.value.abs() * ball_slot_error(i, ball.hausdorff) + r.tolerance;
    Ok(FunctionalResult { value: r.value, method: Method::ExactSum, tolerance })
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(GeomError::Domain(format!("p must be >= 1, got {p}")))
    }
}

/// `(1/n) ∫ h_L^p dμ` for a precomputed `S_{p,t}` (or `S_p`) measure.
pub fn lp_integral(mu: &SphericalMeasure, l: &SupportBody, p: f64) -> Result<FunctionalResult> {
    expect_dim(mu.dim(), l.dim())?;
    if let SupportBody::Polytope(poly) = l {
        poly.require_origin_interior()?;
    }
    for a in mu.atoms() {
        if !(l.h(&a.direction) > 0.0) {
            return Err(GeomError::NotOriginInterior(format!("h_L vanishes at {:?}", a.direction)));
        }
    }
    exact_integral(mu, |u| l.h(u).powf(p))
}

/// `V_{p,t}(K, L, Q) = (1/n) ∫ h_L^p dS_{p,t}(K, Q; ·)`.
pub fn lpt_mixed_volume(k: &Polytope, l: &SupportBody, q: &Polytope, p: f64, t: usize) -> Result<FunctionalResult> {
    check_p(p)?;
    let mu = lp_mixed_surface_measure(k, q, p, t)?;
    lp_integral(&mu, l, p)
}

/// `V_p(K, L) = (1/n) ∫ h_L^p dS_p(K, ·)`.
pub fn lp_mixed_volume(k: &Polytope, l: &SupportBody, p: f64) -> Result<FunctionalResult> {
    let mu = lp_surface_measure(k, p)?;
    lp_integral(&mu, l, p)
}

/// Default step schedule for [`lpt_mixed_volume_limit`].
pub const LIMIT_SCHEDULE: [f64; 3] = [1e-2, 5e-3, 2.5e-3];
/// Schedules tried, each 4 times finer than the last.
const LIMIT_REFINEMENTS: usize = 4;
/// Relative extrapolation change below which no finer schedule is tried.
const LIMIT_SETTLED: f64 = 1e-6;

/// Polynomial extrapolation to zero through `(x_i, y_i)` (Neville).
/// Returns the value and its change when the last point is added.
pub fn extrapolate_to_zero(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let neville = |m: usize| {
        let mut table = ys[..m].to_vec();
        for k in 1..m {
            for i in (k..m).rev() {
                let (xa, xb) = (xs[i - k], xs[i]);
                table[i] = (xa * table[i] - xb * table[i - 1]) / (xa - xb);
            }
        }
        table[m - 1]
    };
    let value = neville(xs.len());
    let previous = if xs.len() > 1 { neville(xs.len() - 1) } else { value };
    (value, (value - previous).abs())
}

/// Unit directions collected with duplicates removed.
fn collect_directions(groups: &[&Polytope]) -> Vec<Vector> {
    let mut dirs: Vec<Vector> = Vec::new();
    for g in groups {
        for f in g.facets() {
            if !dirs.iter().any(|d| d.distance(&f.normal) <= crate::tol::ATOM_MERGE) {
                dirs.push(f.normal);
            }
        }
    }
    dirs
}

/// The outer polytope `∩_u {x·u ≤ h(u)}`, built as the polar of
/// `conv{u / h(u)}`.
fn halfspace_approximant(dirs: &[Vector], h: impl Fn(&Vector) -> f64, n: usize) -> Result<Polytope> {
    let pts: Vec<Vector> = dirs.iter().map(|u| *u * (1.0 / h(u))).collect();
    Polytope::from_points(&pts, n)?.polar()
}

/// `V_{p,t}(K, L, Q)` from its definition as a one-sided derivative:
/// `(p/(t+1)) d/dε V(K +_p ε·L, t+1; Q, n-t-1)` at `ε = 0`, by difference
/// quotients on `schedule` (scaled down while the approximants still change
/// shape) and polynomial extrapolation.
///
/// `K +_p ε·L` is replaced by the intersection of its supporting halfspaces
/// at the normals of `K`, `K + Q` and (for polytopal `L`) `K + L`; these
/// contain every atom of `S(K, t; Q, n-t-1; ·)`.
pub fn lpt_mixed_volume_limit(
    k: &Polytope,
    l: &SupportBody,
    q: &Polytope,
    p: f64,
    t: usize,
    schedule: &[f64],
) -> Result<FunctionalResult> {
    check_p(p)?;
    let n = k.dim();
    expect_dim(n, l.dim())?;
    expect_dim(n, q.dim())?;
    if t > n - 1 {
        return Err(GeomError::OutOfRange(format!("t = {t} exceeds n - 1 = {}", n - 1)));
    }
    k.require_origin_interior()?;
    if schedule.len() < 2
        || schedule.iter().any(|e| !(*e > 0.0) || *e > 0.1)
        || schedule.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(GeomError::Extrapolation(format!(
            "schedule must hold at least two decreasing steps in (0, 0.1], got {schedule:?}"
        )));
    }
    let kq = k.minkowski_sum(q)?;
    let mut groups = vec![k, &kq];
    let kl;
    if let SupportBody::Polytope(lp) = l {
        kl = k.minkowski_sum(lp)?;
        groups.push(&kl);
    }
    let dirs = collect_directions(&groups);
    if dirs.iter().any(|u| !(l.h(u) > 0.0)) {
        return Err(GeomError::NotOriginInterior("h_L must be positive".into()));
    }
    let base = repeated(k, t + 1, q)?;
    // While the approximants still change shape inside the schedule the
    // quotient is not smooth in ε; shrink the steps and keep the estimate
    // whose extrapolation moved least.
    let mut best: Option<(f64, f64)> = None;
    let mut scale = 1.0;
    for _ in 0..LIMIT_REFINEMENTS {
        let steps: Vec<f64> = schedule.iter().map(|e| e * scale).collect();
        let quotients = steps
            .iter()
            .map(|&eps| {
                let h = |u: &Vector| (k.h(u).powf(p) + eps * l.h(u).powf(p)).powf(1.0 / p);
                let g = repeated(&halfspace_approximant(&dirs, h, n)?, t + 1, q)?;
                Ok((g - base) * p / ((t + 1) as f64 * eps))
            })
            .collect::<Result<Vec<f64>>>();
        let quotients = match (quotients, best) {
            (Ok(qs), _) => qs,
            // very small steps can defeat the hull; keep what we have
            (Err(_), Some(_)) => break,
            (Err(e), None) => return Err(e),
        };
        let (value, change) = extrapolate_to_zero(&steps, &quotients);
        if value.is_finite() && best.is_none_or(|(_, c)| change < c) {
            best = Some((value, change));
        }
        if change <= LIMIT_SETTLED * value.abs() {
            break;
        }
        scale *= 0.25;
    }
    match best {
        Some((value, change)) => Ok(FunctionalResult::approximate(value, Method::FiniteDifference, change)),
        None => Err(GeomError::Extrapolation("non-finite extrapolated value".into())),
    }
}

fn repeated(k: &Polytope, s: usize, q: &Polytope) -> Result<f64> {
    Ok(repeated_mixed_volume(k, s, q, 0, q)?.value)
}

/// `W_{p,i}(K, L) = V_{p,n-i-1}(K, L, B)` with a volume-matched ball
/// approximant on `m` points in the ball slot. `i = 0` needs no approximant.
pub fn lp_mixed_quermassintegral(k: &Polytope, l: &SupportBody, p: f64, i: usize, m: usize) -> Result<FunctionalResult> {
    let n = k.dim();
    if i > n - 1 {
        return Err(GeomError::OutOfRange(format!("index i = {i} exceeds n - 1 = {}", n - 1)));
    }
    if i == 0 {
        return lp_mixed_volume(k, l, p);
    }
    let ball = ball_approx_volume_matched(n, m)?;
    let r = lpt_mixed_volume(k, l, &ball.polytope, p, n - i - 1)?;
    let tolerance = r.value.abs() * ball_slot_error(i, ball.hausdorff) + r.tolerance;
    Ok(FunctionalResult { value: r.value, method: Method::ExactSum, tolerance })
}

fn radial_values(k: &StarBody, quad: &Quadrature) -> Result<Vec<f64>> {
    expect_dim(k.dim(), quad.dim())?;
    quad.nodes()
        .iter()
        .map(|u| {
            let r = k.rho(u);
            if r > 0.0 && r.is_finite() {
                Ok(r)
            } else {
                Err(GeomError::NotOriginInterior(format!("radial value {r} at {u:?}")))
            }
        })
        .collect()
}

fn quadrature_result(value: f64, quad: &Quadrature) -> FunctionalResult {
    FunctionalResult::approximate(value, Method::Quadrature, value.abs() * quad.proxy())
}

/// `Ṽ_{-p}(K, L) = (1/n) ∫ ρ_K^{n+p} ρ_L^{-p} dS`.
pub fn dual_mixed_volume(k: &StarBody, l: &StarBody, p: f64, quad: &Quadrature) -> Result<FunctionalResult> {
    check_p(p)?;
    expect_dim(k.dim(), l.dim())?;
    let n = quad.dim() as f64;
    let rk = radial_values(k, quad)?;
    let rl = radial_values(l, quad)?;
    let sum: f64 = quad
        .weights()
        .iter()
        .zip(rk.iter().zip(&rl))
        .map(|(w, (a, b))| w * a.powf(n + p) * b.powf(-p))
        .sum();
    Ok(quadrature_result(sum / n, quad))
}

/// `V(K) = (1/n) ∫ ρ_K^n dS`.
pub fn star_volume(k: &StarBody, quad: &Quadrature) -> Result<FunctionalResult> {
    let n = quad.dim() as i32;
    let r = radial_values(k, quad)?;
    let sum: f64 = quad.weights().iter().zip(&r).map(|(w, x)| w * x.powi(n)).sum();
    Ok(quadrature_result(sum / n as f64, quad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{harmonic_combination, lp_combination};
    use crate::linalg::LinMap;
    use crate::quadrature::make_quadrature;
    use crate::special::unit_ball_volume;

    fn cube() -> Polytope {
        Polytope::cube(3, 1.0).unwrap()
    }

    fn octa() -> Polytope {
        Polytope::cross_polytope(3, 1.0).unwrap()
    }

    fn skewed() -> Polytope {
        let pts = [
            Vector::new3(1.2, 0.1, -0.3),
            Vector::new3(-0.8, 0.9, 0.2),
            Vector::new3(-0.4, -1.1, 0.5),
            Vector::new3(0.3, 0.2, 1.3),
            Vector::new3(0.1, -0.2, -1.0),
            Vector::new3(0.7, 0.8, 0.6),
        ];
        Polytope::from_points(&pts, 3).unwrap()
    }

    #[test]
    fn diagonal_mixed_volume_is_volume() {
        let k = skewed();
        assert!((mixed_volume(&[&k, &k, &k]).unwrap().value - k.volume()).abs() < 1e-10);
    }

    #[test]
    fn mixed_volume_is_symmetric() {
        let (a, b, c) = (cube(), octa(), skewed());
        let v = mixed_volume(&[&a, &b, &c]).unwrap().value;
        for perm in [[&b, &a, &c], [&c, &b, &a], [&a, &c, &b], [&b, &c, &a]] {
            assert!((mixed_volume(&perm).unwrap().value - v).abs() < 1e-10);
        }
    }

    #[test]
    fn cube_octahedron_mixed_volume() {
        // V(C, C, O) = (1/3) Σ_facets h_O(e_i) · 4 = 8 for C = [-1,1]^3.
        let v = repeated_mixed_volume(&cube(), 2, &octa(), 1, &octa()).unwrap().value;
        assert!((v - 8.0).abs() < 1e-12);
    }

    #[test]
    fn translation_invariance() {
        let (a, b) = (skewed(), octa());
        let v = mixed_volume(&[&a, &a, &b]).unwrap().value;
        let shifted = b.translate(&Vector::new3(0.3, -2.0, 0.7));
        assert!((mixed_volume(&[&a, &a, &shifted]).unwrap().value - v).abs() < 1e-9);
    }

    #[test]
    fn square_quermassintegral() {
        let sq = Polytope::cube(2, 1.0).unwrap();
        let w1 = quermassintegral(&sq, 1, 256).unwrap();
        assert!((w1.value - 4.0).abs() < 0.04);
        assert!((w1.value - 4.0).abs() <= w1.tolerance);
        assert_eq!(quermassintegral(&sq, 0, 256).unwrap().value, 4.0);
        let w2 = quermassintegral(&sq, 2, 256).unwrap();
        assert!((w2.value - std::f64::consts::PI).abs() <= w2.tolerance);
        assert!(quermassintegral(&sq, 3, 256).is_err());
    }

    #[test]
    fn lpt_special_cases() {
        let (k, q) = (skewed().recentered(), octa());
        let kb: SupportBody = k.clone().into();
        for p in [1.0, 2.0, 3.5] {
            let v = lpt_mixed_volume(&k, &kb, &k, p, 1).unwrap().value;
            assert!((v - k.volume()).abs() < 1e-10);
            let v = lpt_mixed_volume(&k, &kb, &q, p, 1).unwrap().value;
            let classical = repeated_mixed_volume(&k, 2, &q, 1, &q).unwrap().value;
            assert!((v - classical).abs() < 1e-10);
            let l: SupportBody = cube().into();
            let top = lpt_mixed_volume(&k, &l, &q, p, 2).unwrap().value;
            assert!((top - lp_mixed_volume(&k, &l, p).unwrap().value).abs() < 1e-10);
        }
        let l = cube();
        let v1 = lpt_mixed_volume(&k, &l.clone().into(), &q, 1.0, 1).unwrap().value;
        let classical = mixed_volume(&[&k, &l, &q]).unwrap().value;
        assert!((v1 - classical).abs() < 1e-10);
    }

    #[test]
    fn lpt_homogeneity() {
        let (k, q) = (skewed().recentered(), octa());
        let l = SupportBody::ellipsoid(LinMap::diag(&[1.0, 0.7, 1.4]).unwrap()).unwrap();
        let (p, t) = (2.5, 1);
        let v = lpt_mixed_volume(&k, &l, &q, p, t).unwrap().value;
        let lam: f64 = 1.3;
        let vk = lpt_mixed_volume(&k.scale(lam).unwrap(), &l, &q, p, t).unwrap().value;
        assert!((vk / v - lam.powf(t as f64 + 1.0 - p)).abs() < 1e-9);
        let ll = SupportBody::ellipsoid(LinMap::diag(&[1.0, 0.7, 1.4]).unwrap().scaled(lam)).unwrap();
        let vl = lpt_mixed_volume(&k, &ll, &q, p, t).unwrap().value;
        assert!((vl / v - lam.powf(p)).abs() < 1e-9);
        let vq = lpt_mixed_volume(&k, &l, &q.scale(lam).unwrap(), p, t).unwrap().value;
        assert!((vq / v - lam.powf(3.0 - t as f64 - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn limit_matches_integral_formula() {
        let (k, q) = (skewed().recentered(), octa());
        let l = SupportBody::ellipsoid(LinMap::diag(&[1.0, 0.7, 1.4]).unwrap()).unwrap();
        for p in [1.5, 2.0] {
            let exact = lpt_mixed_volume(&k, &l, &q, p, 1).unwrap().value;
            let lim = lpt_mixed_volume_limit(&k, &l, &q, p, 1, &LIMIT_SCHEDULE).unwrap();
            assert!(((lim.value - exact) / exact).abs() < 1e-4, "{} vs {exact}", lim.value);
        }
    }

    #[test]
    fn limit_with_l_equal_k() {
        let (k, q) = (skewed().recentered(), octa());
        let kb: SupportBody = k.clone().into();
        let lim = lpt_mixed_volume_limit(&k, &kb, &q, 2.0, 1, &LIMIT_SCHEDULE).unwrap();
        let expect = repeated_mixed_volume(&k, 2, &q, 1, &q).unwrap().value;
        assert!(((lim.value - expect) / expect).abs() < 1e-6);
    }

    #[test]
    fn limit_at_p_one_is_minkowski_linear() {
        // K + εL is a polytope; before extrapolation the quotient is the
        // exact polynomial (1/ε)[V(K+εL, 2; Q) - V(K, 2; Q)] / 2.
        let (k, q, l) = (skewed().recentered(), octa(), cube().scale(0.5).unwrap());
        let eps = 0.01;
        let sum = k.minkowski_sum(&l.scale(eps).unwrap()).unwrap();
        let lhs = repeated_mixed_volume(&sum, 2, &q, 1, &q).unwrap().value;
        let rhs = repeated_mixed_volume(&k, 2, &q, 1, &q).unwrap().value
            + 2.0 * eps * mixed_volume(&[&k, &l, &q]).unwrap().value
            + eps * eps * repeated_mixed_volume(&l, 2, &q, 1, &q).unwrap().value;
        assert!((lhs - rhs).abs() < 1e-10);
        let lb: SupportBody = l.clone().into();
        let lim = lpt_mixed_volume_limit(&k, &lb, &q, 1.0, 1, &LIMIT_SCHEDULE).unwrap();
        let exact = mixed_volume(&[&k, &l, &q]).unwrap().value;
        assert!(((lim.value - exact) / exact).abs() < 1e-8);
    }

    #[test]
    fn coarse_schedule_is_rejected() {
        let k = cube();
        let kb: SupportBody = k.clone().into();
        assert!(matches!(
            lpt_mixed_volume_limit(&k, &kb, &k, 2.0, 1, &[0.5, 0.25]),
            Err(GeomError::Extrapolation(_))
        ));
        assert!(lpt_mixed_volume_limit(&k, &kb, &k, 2.0, 1, &[1e-3, 2e-3]).is_err());
    }

    #[test]
    fn neville_is_exact_on_quadratics() {
        let xs = [0.4, 0.2, 0.1];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x + 5.0 * x * x).collect();
        let (v, _) = extrapolate_to_zero(&xs, &ys);
        assert!((v - 3.0).abs() < 1e-12);
    }

    #[test]
    fn lp_quermassintegral_zero_index() {
        let k = skewed().recentered();
        let l: SupportBody = octa().into();
        let a = lp_mixed_quermassintegral(&k, &l, 2.0, 0, 64).unwrap();
        assert_eq!(a.value, lp_mixed_volume(&k, &l, 2.0).unwrap().value);
        let ball = ball_approx_volume_matched(3, 320).unwrap().polytope;
        let bb: SupportBody = ball.clone().into();
        let w = lp_mixed_quermassintegral(&ball, &bb, 2.0, 1, 320).unwrap();
        assert!((w.value - unit_ball_volume(3.0).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn dual_volume_basics() {
        let quad = make_quadrature(3, 24).unwrap();
        let b = StarBody::ball(3, 1.0).unwrap();
        let omega = unit_ball_volume(3.0).unwrap();
        assert!((dual_mixed_volume(&b, &b, 2.0, &quad).unwrap().value - omega).abs() < 1e-10);
        let e = StarBody::ellipsoid(LinMap::diag(&[1.5, 1.0, 0.6]).unwrap()).unwrap();
        let v = star_volume(&e, &quad).unwrap().value;
        assert!((dual_mixed_volume(&e, &e, 3.0, &quad).unwrap().value - v).abs() < 1e-12);
        assert!((v - omega * 0.9).abs() < 1e-6);
    }

    #[test]
    fn dual_volume_sl_invariance() {
        let quad = make_quadrature(3, 24).unwrap();
        let k = StarBody::ellipsoid(LinMap::diag(&[1.2, 1.0, 0.8]).unwrap()).unwrap();
        let l = harmonic_combination(&StarBody::ball(3, 1.0).unwrap(), 0.5, &k, 2.0).unwrap();
        let phi = LinMap::from_row_major(3, &[1.0, 0.3, 0.0, 0.0, 1.0, 0.2, 0.0, 0.0, 1.0]).unwrap();
        let a = dual_mixed_volume(&k, &l, 2.0, &quad).unwrap().value;
        let pk = crate::bodies::star_linear_image(&phi, &k).unwrap();
        let pl = crate::bodies::star_linear_image(&phi, &l).unwrap();
        let b = dual_mixed_volume(&pk, &pl, 2.0, &quad).unwrap().value;
        assert!(((a - b) / a).abs() < 1e-4);
    }

    #[test]
    fn dual_volume_is_a_derivative() {
        // -(p/n) d/dε V(K +_{-p} ε·L) at 0 equals Ṽ_{-p}(K, L).
        let quad = make_quadrature(3, 24).unwrap();
        let k = StarBody::ellipsoid(LinMap::diag(&[1.2, 1.0, 0.8]).unwrap()).unwrap();
        let l = StarBody::ellipsoid(LinMap::diag(&[0.7, 1.3, 1.0]).unwrap()).unwrap();
        let p = 2.0;
        let v0 = star_volume(&k, &quad).unwrap().value;
        let xs = LIMIT_SCHEDULE;
        let ys: Vec<f64> = xs
            .iter()
            .map(|&e| {
                let ke = harmonic_combination(&k, e, &l, p).unwrap();
                -(p / 3.0) * (star_volume(&ke, &quad).unwrap().value - v0) / e
            })
            .collect();
        let (d, _) = extrapolate_to_zero(&xs, &ys);
        let exact = dual_mixed_volume(&k, &l, p, &quad).unwrap().value;
        assert!(((d - exact) / exact).abs() < 1e-3);
    }

    #[test]
    fn star_volume_of_polytopes() {
        let quad = make_quadrature(3, 48).unwrap();
        let c = StarBody::polytope(cube()).unwrap();
        assert!((star_volume(&c, &quad).unwrap().value - 8.0).abs() < 5e-3 * 8.0);
        let q2 = make_quadrature(2, 1023).unwrap();
        let diamond = crate::bodies::polar_body(&Polytope::cube(2, 1.0).unwrap().into()).unwrap();
        assert!((star_volume(&diamond, &q2).unwrap().value - 2.0).abs() < 1e-4);
    }

    #[test]
    fn lp_combination_is_evaluable() {
        let k = skewed().recentered();
        let l = lp_combination(1.0, &SupportBody::ball(3, 1.0).unwrap(), 0.5, &octa().into(), 2.0).unwrap();
        assert!(lpt_mixed_volume(&k, &l, &octa(), 2.0, 1).unwrap().value > 0.0);
    }
}
