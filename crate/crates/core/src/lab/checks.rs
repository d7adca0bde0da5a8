//! Checkers for the inequalities and identities. Each check enforces the
//! hypotheses of its statement, evaluates both sides and returns a
//! [`CheckRecord`] whose verdict follows from the values and tolerance alone.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::bodies::{
    ball_approx_volume_matched, linear_image, Polytope, StarBody, SupportBody,
};
use crate::error::{GeomError, Result};
use crate::functionals::{
    dual_mixed_volume, lp_mixed_quermassintegral, lp_mixed_volume, lpt_mixed_volume, lpt_mixed_volume_limit,
    mixed_volume, quermassintegral, repeated_mixed_volume, star_volume,
};
use crate::linalg::{LinMap, Vector};
use crate::measures::{
    integrate, lp_mixed_surface_measure, mixed_area_measure, repeated_mixed_area_measure,
    transform_measure_p,
};
use crate::projections::{sphere_deficit, centroid_body, centroid_zonoid, lp_projection_body, mixed_lp_projection_body, mixed_projection_body, projection_body};
use crate::quadrature::{make_quadrature, sphere_points, Quadrature};
use crate::special::unit_ball_volume;
use crate::tol::Tolerances;

/// Every statement the lab can check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CheckName {
    Mfi,
    Lpmi,
    Milpmq,
    Mlpmi,
    Afi,
    Mli,
    Vi,
    Cbi,
    Petty,
    MixedPetty,
    LpPetty,
    Vpti,
    Lpde,
    BallVolumeIdentity,
    Ptpi,
    Lppk,
    Dpt,
    Lbda,
    Phi,
    Msa,
    DiagonalVolume,
    SelfLpt,
    DiagonalLpt,
    TopCollapse,
    UnitCollapse,
    QuermassCollapse,
    ZeroSlotCollapse,
    DualSelf,
    LimitAgreement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Inequality,
    Identity,
}

impl CheckName {
    pub const ALL: [CheckName; 29] = [
        CheckName::Mfi,
        CheckName::Lpmi,
        CheckName::Milpmq,
        CheckName::Mlpmi,
        CheckName::Afi,
        CheckName::Mli,
        CheckName::Vi,
        CheckName::Cbi,
        CheckName::Petty,
        CheckName::MixedPetty,
        CheckName::LpPetty,
        CheckName::Vpti,
        CheckName::Lpde,
        CheckName::BallVolumeIdentity,
        CheckName::Ptpi,
        CheckName::Lppk,
        CheckName::Dpt,
        CheckName::Lbda,
        CheckName::Phi,
        CheckName::Msa,
        CheckName::DiagonalVolume,
        CheckName::SelfLpt,
        CheckName::DiagonalLpt,
        CheckName::TopCollapse,
        CheckName::UnitCollapse,
        CheckName::QuermassCollapse,
        CheckName::ZeroSlotCollapse,
        CheckName::DualSelf,
        CheckName::LimitAgreement,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckName::Mfi => "MFI",
            CheckName::Lpmi => "LPMI",
            CheckName::Milpmq => "MILPMQ",
            CheckName::Mlpmi => "MLPMI",
            CheckName::Afi => "AFI",
            CheckName::Mli => "MLI",
            CheckName::Vi => "VI",
            CheckName::Cbi => "CBI",
            CheckName::Petty => "Petty",
            CheckName::MixedPetty => "MixedPetty",
            CheckName::LpPetty => "LpPetty",
            CheckName::Vpti => "VPTI",
            CheckName::Lpde => "LPDE",
            CheckName::BallVolumeIdentity => "BallVolume",
            CheckName::Ptpi => "PTPI",
            CheckName::Lppk => "LPPK",
            CheckName::Dpt => "DPT",
            CheckName::Lbda => "LBDA",
            CheckName::Phi => "PHI",
            CheckName::Msa => "MSA",
            CheckName::DiagonalVolume => "DiagonalVolume",
            CheckName::SelfLpt => "SelfLpt",
            CheckName::DiagonalLpt => "DiagonalLpt",
            CheckName::TopCollapse => "TopCollapse",
            CheckName::UnitCollapse => "UnitCollapse",
            CheckName::QuermassCollapse => "QuermassCollapse",
            CheckName::ZeroSlotCollapse => "ZeroSlotCollapse",
            CheckName::DualSelf => "DualSelf",
            CheckName::LimitAgreement => "LimitAgreement",
        }
    }

    /// A short descriptive tag for the statement being checked.
    pub fn anchor(&self) -> &'static str {
        match self {
            CheckName::Mfi => "minkowski-first-inequality",
            CheckName::Lpmi => "lp-minkowski-inequality",
            CheckName::Milpmq => "lp-quermassintegral-minkowski-inequality",
            CheckName::Mlpmi => "lpt-minkowski-inequality",
            CheckName::Afi => "aleksandrov-fenchel-inequality",
            CheckName::Mli => "mixed-volume-product-inequality",
            CheckName::Vi => "dual-mixed-volume-inequality",
            CheckName::Cbi => "centroid-body-volume-inequality",
            CheckName::Petty => "petty-projection-inequality",
            CheckName::MixedPetty => "mixed-projection-inequality",
            CheckName::LpPetty => "lp-petty-projection-inequality",
            CheckName::Vpti => "mixed-lp-projection-inequality",
            CheckName::Lpde => "centroid-polar-projection-duality",
            CheckName::BallVolumeIdentity => "ball-volume-from-centroid-of-polar-projection",
            CheckName::Ptpi => "lpt-volume-sl-invariance",
            CheckName::Lppk => "mixed-lp-projection-sl-covariance",
            CheckName::Dpt => "mixed-lp-measure-transform",
            CheckName::Lbda => "mixed-lp-projection-scaling",
            CheckName::Phi => "mixed-volume-sl-invariance",
            CheckName::Msa => "mixed-area-measure-transform",
            CheckName::DiagonalVolume => "mixed-volume-of-one-body",
            CheckName::SelfLpt => "lpt-volume-with-l-equal-k",
            CheckName::DiagonalLpt => "lpt-volume-of-one-body",
            CheckName::TopCollapse => "lpt-volume-top-index",
            CheckName::UnitCollapse => "lpt-volume-at-p-one",
            CheckName::QuermassCollapse => "lp-quermassintegral-as-lpt-volume",
            CheckName::ZeroSlotCollapse => "lpt-volume-at-t-zero",
            CheckName::DualSelf => "dual-mixed-volume-of-one-body",
            CheckName::LimitAgreement => "lpt-volume-variational-definition",
        }
    }

    pub fn kind(&self) -> CheckKind {
        match self {
            CheckName::Mfi
            | CheckName::Lpmi
            | CheckName::Milpmq
            | CheckName::Mlpmi
            | CheckName::Afi
            | CheckName::Mli
            | CheckName::Vi
            | CheckName::Cbi
            | CheckName::Petty
            | CheckName::MixedPetty
            | CheckName::LpPetty
            | CheckName::Vpti => CheckKind::Inequality,
            _ => CheckKind::Identity,
        }
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckName {
    type Err = GeomError;

    fn from_str(s: &str) -> Result<CheckName> {
        CheckName::ALL
            .iter()
            .copied()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| GeomError::Parse(format!("unknown check `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    EqualityCase,
    Violated,
    /// The inputs do not satisfy the statement's hypotheses.
    Rejected,
    /// A computation failed.
    Error,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::EqualityCase => "equality-case",
            Verdict::Violated => "violated",
            Verdict::Rejected => "rejected",
            Verdict::Error => "error",
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, Verdict::Violated | Verdict::Error)
    }

    /// Verdict for an inequality normalized so that it reads `ratio ≥ 1`.
    pub fn for_ratio(ratio: f64, tol: f64, equality_tol: f64, constructed_equality: bool) -> Verdict {
        if !ratio.is_finite() {
            return Verdict::Error;
        }
        if constructed_equality {
            if (ratio - 1.0).abs() <= equality_tol {
                Verdict::EqualityCase
            } else {
                Verdict::Violated
            }
        } else if ratio >= 1.0 - tol {
            Verdict::Holds
        } else {
            Verdict::Violated
        }
    }

    pub fn for_margin(margin: f64, tol: f64) -> Verdict {
        if !margin.is_finite() {
            Verdict::Error
        } else if margin <= tol {
            Verdict::Holds
        } else {
            Verdict::Violated
        }
    }
}

/// One evaluated check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub case: usize,
    pub name: String,
    pub anchor: String,
    pub kind: CheckKind,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    /// Oriented so that values at least one mean the inequality holds.
    pub ratio: Option<f64>,
    /// `|lhs - rhs| / max(|lhs|, |rhs|)` for identities.
    pub margin: Option<f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub seed: u64,
    pub p: Option<f64>,
    pub t: Option<usize>,
    pub equality_case: bool,
    pub detail: String,
}

/// Inputs of a check. Which slots a check reads is documented on
/// [`evaluate`]; missing slots are reported as rejections.
#[derive(Clone, Debug, Default)]
pub struct CheckInput {
    pub polytopes: Vec<Polytope>,
    pub stars: Vec<StarBody>,
    pub map: Option<LinMap>,
    pub scalars: Vec<f64>,
    /// The inputs were built to satisfy the statement's equality condition.
    pub equality: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckParams {
    pub p: f64,
    pub t: usize,
    pub s: usize,
    pub i: usize,
}

impl Default for CheckParams {
    fn default() -> Self {
        CheckParams { p: 1.0, t: 0, s: 1, i: 0 }
    }
}

/// Shared numerical setup for a run.
pub struct LabContext {
    pub dim: usize,
    pub tolerances: Tolerances,
    /// Main rule.
    pub quad: Quadrature,
    /// A coarser rule used on one side of quadrature identities so that they
    /// are not satisfied by construction.
    pub quad_alt: Quadrature,
    /// Points of the ball approximant.
    pub ball_m: usize,
    /// Directions used to bound volumes of centroid bodies.
    pub hull_directions: usize,
    pub schedule: Vec<f64>,
    proxies: Mutex<HashMap<u64, f64>>,
    deficit: OnceLock<f64>,
}

impl LabContext {
    pub fn new(dim: usize, level: usize, tolerances: Tolerances, ball_m: usize) -> Result<LabContext> {
        let quad = make_quadrature(dim, level)?;
        let alt_level = if dim == 2 { level * 3 / 4 } else { (level * 3 / 4).max(2) };
        let quad_alt = make_quadrature(dim, alt_level.max(1))?;
        Ok(LabContext {
            dim,
            tolerances,
            quad,
            quad_alt,
            ball_m,
            hull_directions: if dim == 2 { 720 } else { 2000 },
            schedule: crate::functionals::LIMIT_SCHEDULE.to_vec(),
            proxies: Mutex::new(HashMap::new()),
            deficit: OnceLock::new(),
        })
    }

    /// Tolerance for quadrature-backed checks: the configured multiple of the
    /// measured ball-normalization error at this `p` and at `p = 1`.
    pub fn proxy(&self, p: f64) -> f64 {
        let mut cache = self.proxies.lock().expect("proxy cache");
        *cache.entry(p.to_bits()).or_insert_with(|| {
            let measured = self.quad.proxy().max(self.quad.normalization_error(p));
            (self.tolerances.proxy_factor * measured).max(self.tolerances.proxy_floor)
        })
    }

    /// Relative volume deficit of the hull of the direction sample used for
    /// centroid-body volumes, measured on the ball.
    pub fn hull_deficit(&self) -> Result<f64> {
        if let Some(d) = self.deficit.get() {
            return Ok(*d);
        }
        let d = sphere_deficit(self.dim, self.hull_directions)?;
        Ok(*self.deficit.get_or_init(|| d))
    }

    fn omega(&self) -> f64 {
        unit_ball_volume(self.dim as f64).expect("valid dimension")
    }
}

struct Outcome {
    lhs: f64,
    rhs: f64,
    tol: f64,
    equality_tol: f64,
    /// Set when the identity is compared by something other than its two
    /// scalar sides.
    margin: Option<f64>,
    detail: String,
}

impl Outcome {
    fn new(lhs: f64, rhs: f64, tol: f64) -> Outcome {
        Outcome { lhs, rhs, tol, equality_tol: tol, margin: None, detail: String::new() }
    }

    fn equality(mut self, equality_tol: f64) -> Outcome {
        self.equality_tol = equality_tol;
        self
    }

    fn note(mut self, detail: impl Into<String>) -> Outcome {
        self.detail = detail.into();
        self
    }

    fn with_margin(mut self, margin: f64) -> Outcome {
        self.margin = Some(margin);
        self
    }
}

fn hypothesis(msg: impl Into<String>) -> GeomError {
    GeomError::Hypothesis(msg.into())
}

fn polytope(input: &CheckInput, i: usize) -> Result<&Polytope> {
    input.polytopes.get(i).ok_or_else(|| hypothesis(format!("missing polytope #{i}")))
}

fn star(input: &CheckInput, i: usize) -> Result<&StarBody> {
    input.stars.get(i).ok_or_else(|| hypothesis(format!("missing star body #{i}")))
}

fn map(input: &CheckInput) -> Result<&LinMap> {
    let phi = input.map.as_ref().ok_or_else(|| hypothesis("missing linear map"))?;
    if (phi.det() - 1.0).abs() > crate::tol::SL_DET {
        return Err(hypothesis(format!("map is not in SL(n): det = {}", phi.det())));
    }
    Ok(phi)
}

fn in_k_o(k: &Polytope, label: &str) -> Result<()> {
    if k.contains_origin_interior() {
        Ok(())
    } else {
        Err(hypothesis(format!("{label} does not contain the origin in its interior")))
    }
}

fn p_at_least_one(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(hypothesis(format!("requires p >= 1, got {p}")))
    }
}

fn p_above_one(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(hypothesis(format!("requires p > 1, got {p}")))
    }
}

fn t_closed(t: usize, n: usize) -> Result<()> {
    if t < n {
        Ok(())
    } else {
        Err(hypothesis(format!("requires 0 <= t <= {}, got {t}", n - 1)))
    }
}

fn t_open(t: usize, n: usize) -> Result<()> {
    if t > 0 && t + 1 < n {
        Ok(())
    } else {
        Err(hypothesis(format!("requires 0 < t < {}, got {t}", n - 1)))
    }
}

fn dims(input: &CheckInput, n: usize) -> Result<()> {
    if input.polytopes.iter().any(|p| p.dim() != n) || input.stars.iter().any(|s| s.dim() != n) {
        return Err(GeomError::DimensionMismatch { expected: n, found: 0 });
    }
    Ok(())
}

fn relative(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn support(p: &Polytope) -> SupportBody {
    p.clone().into()
}

/// Largest relative disagreement of two support evaluations over a fixed
/// direction set; returns the values at the worst direction too.
fn compare_supports(n: usize, f: impl Fn(&Vector) -> f64, g: impl Fn(&Vector) -> f64) -> (f64, f64) {
    sphere_points(n, 64)
        .iter()
        .map(|u| (f(u), g(u)))
        .max_by(|a, b| relative(a.0, a.1).total_cmp(&relative(b.0, b.1)))
        .expect("directions")
}

/// Volume of `Γ_p L` bracketed from support points; returns (lower, relative
/// bracket width).
fn centroid_volume(ctx: &LabContext, l: &StarBody, p: f64) -> Result<(f64, f64)> {
    let z = centroid_zonoid(l, p, &ctx.quad)?;
    let (lo, hi) = z.volume_bounds(ctx.hull_directions)?;
    Ok((lo, (hi - lo) / lo))
}

fn star_or_exact_volume(ctx: &LabContext, k: &StarBody) -> Result<f64> {
    match k {
        StarBody::Polytope(p) => Ok(p.volume()),
        _ => Ok(star_volume(k, &ctx.quad)?.value),
    }
}

/// Evaluates a check. Slots read, by check:
///
/// * `MFI`, `LPMI`, `MILPMQ`: polytopes `K, L` (`params.i` for MILPMQ);
/// * `MLPMI`, `AFI`, `UnitCollapse`, `TopCollapse`, `QuermassCollapse`,
///   `ZeroSlotCollapse`, `LimitAgreement`: polytopes `K, L, Q`
///   (`params.s` for AFI);
/// * `MLI`, `PHI`: polytopes `K_1, …, K_n` (and the map for PHI);
/// * `MixedPetty`: polytopes `K_1, …, K_{n-1}`;
/// * `Petty`, `LpPetty`, `DiagonalVolume`, `DiagonalLpt`: polytope `K`;
/// * `VPTI`, `BallVolume`, `SelfLpt`: polytopes `K, Q`;
/// * `PTPI`: polytopes `K, L, Q` and the map; `LPPK`, `DPT`, `MSA`:
///   polytopes `K, Q` and the map; `LBDA`: polytopes `K, Q`, scalars
///   `λ_1, λ_2`;
/// * `LPDE`: polytopes `K, Q`, star body `L`;
/// * `VI`: star bodies `K, L`; `CBI`, `DualSelf`: star body `K`.
fn evaluate(ctx: &LabContext, name: CheckName, input: &CheckInput, prm: &CheckParams) -> Result<Outcome> {
    let n = ctx.dim;
    let nf = n as f64;
    let tol = ctx.tolerances;
    dims(input, n)?;
    let (p, t) = (prm.p, prm.t);
    let exact_eq = tol.equality_exact;
    let quad_eq = tol.equality_quadrature;
    match name {
        CheckName::Mfi => {
            let (k, l) = (polytope(input, 0)?, polytope(input, 1)?);
            let v1 = repeated_mixed_volume(k, n - 1, l, 1, l)?.value;
            Ok(Outcome::new(v1.powi(n as i32), k.volume().powi(n as i32 - 1) * l.volume(), tol.exact).equality(exact_eq))
        }
        CheckName::Lpmi => {
            p_at_least_one(p)?;
            let (k, l) = (polytope(input, 0)?, polytope(input, 1)?);
            in_k_o(k, "K")?;
            in_k_o(l, "L")?;
            let vp = lp_mixed_volume(k, &support(l), p)?.value;
            Ok(Outcome::new(vp.powf(nf), k.volume().powf(nf - p) * l.volume().powf(p), tol.exact).equality(exact_eq))
        }
        CheckName::Milpmq => {
            p_at_least_one(p)?;
            let (k, l) = (polytope(input, 0)?, polytope(input, 1)?);
            in_k_o(k, "K")?;
            in_k_o(l, "L")?;
            let i = prm.i;
            if i >= n {
                return Err(hypothesis(format!("requires 0 <= i <= {}, got {i}", n - 1)));
            }
            let w = lp_mixed_quermassintegral(k, &support(l), p, i, ctx.ball_m)?.value;
            let wk = quermassintegral(k, i, ctx.ball_m)?.value;
            let wl = quermassintegral(l, i, ctx.ball_m)?.value;
            let e = (n - i) as f64;
            Ok(Outcome::new(w.powf(e), wk.powf(e - p) * wl.powf(p), tol.exact)
                .equality(exact_eq)
                .note(format!("i={i}; ball slot: volume-matched approximant on {} points", ctx.ball_m)))
        }
        CheckName::Mlpmi => {
            p_at_least_one(p)?;
            t_closed(t, n)?;
            let (k, l, q) = (polytope(input, 0)?, polytope(input, 1)?, polytope(input, 2)?);
            in_k_o(k, "K")?;
            in_k_o(l, "L")?;
            let v = lpt_mixed_volume(k, &support(l), q, p, t)?.value;
            let tf = t as f64;
            let rhs = k.volume().powf(tf + 1.0 - p) * l.volume().powf(p) * q.volume().powf(nf - tf - 1.0);
            Ok(Outcome::new(v.powf(nf), rhs, tol.exact).equality(exact_eq))
        }
        CheckName::Afi => {
            let (k, l, q) = (polytope(input, 0)?, polytope(input, 1)?, polytope(input, 2)?);
            let s = prm.s;
            if s == 0 || t == 0 || s + t > n {
                return Err(hypothesis(format!("requires s, t >= 1 and s + t <= {n}, got s={s}, t={t}")));
            }
            let r = n - s - t;
            let a = repeated_mixed_volume(k, s + t, q, r, q)?.value;
            let b = repeated_mixed_volume(l, s + t, q, r, q)?.value;
            let c = repeated_mixed_volume(k, s, l, t, q)?.value;
            Ok(Outcome::new(a.powi(s as i32) * b.powi(t as i32), c.powi((s + t) as i32), tol.exact)
                .equality(exact_eq)
                .note(format!("s={s}")))
        }
        CheckName::Mli => {
            if input.polytopes.len() < n {
                return Err(hypothesis(format!("requires {n} bodies")));
            }
            let list: Vec<&Polytope> = input.polytopes.iter().take(n).collect();
            let v = mixed_volume(&list)?.value;
            let prod: f64 = list.iter().map(|b| b.volume()).product();
            Ok(Outcome::new(v.powi(n as i32), prod, tol.exact).equality(exact_eq))
        }
        CheckName::Vi => {
            p_at_least_one(p)?;
            let (k, l) = (star(input, 0)?, star(input, 1)?);
            let d = dual_mixed_volume(k, l, p, &ctx.quad)?.value;
            let vk = star_volume(k, &ctx.quad)?.value;
            let vl = star_volume(l, &ctx.quad)?.value;
            let tq = ctx.proxy(p);
            Ok(Outcome::new(d, vk.powf((nf + p) / nf) * vl.powf(-p / nf), tq).equality(quad_eq))
        }
        CheckName::Cbi => {
            p_above_one(p)?;
            let k = star(input, 0)?;
            let (v, bracket) = centroid_volume(ctx, k, p)?;
            let vk = star_or_exact_volume(ctx, k)?;
            let deficit = ctx.hull_deficit()?;
            Ok(Outcome::new(v, vk, ctx.proxy(p) + deficit)
                .equality(quad_eq)
                .note(format!("lower volume bound; sample deficit {deficit:.3e}; bracket {bracket:.3e}")))
        }
        CheckName::Petty => {
            let k = polytope(input, 0)?;
            let pi = projection_body(k)?;
            let vp = star_volume(&pi.polar()?, &ctx.quad)?.value;
            let bound = (ctx.omega() / unit_ball_volume(nf - 1.0)?).powi(n as i32);
            Ok(Outcome::new(k.volume().powi(n as i32 - 1) * vp, bound, ctx.proxy(1.0))
                .equality(quad_eq)
                .note("bound (omega_n / omega_{n-1})^n"))
        }
        CheckName::MixedPetty => {
            if input.polytopes.len() < n - 1 {
                return Err(hypothesis(format!("requires {} bodies", n - 1)));
            }
            let list: Vec<&Polytope> = input.polytopes.iter().take(n - 1).collect();
            let pi = mixed_projection_body(&list)?;
            let vp = star_volume(&pi.polar()?, &ctx.quad)?.value;
            let prod: f64 = list.iter().map(|b| b.volume()).product();
            let bound = (ctx.omega() / unit_ball_volume(nf - 1.0)?).powi(n as i32);
            Ok(Outcome::new(prod * vp, bound, ctx.proxy(1.0))
                .equality(quad_eq)
                .note("bound (omega_n / omega_{n-1})^n"))
        }
        CheckName::LpPetty => {
            p_at_least_one(p)?;
            let k = polytope(input, 0)?;
            in_k_o(k, "K")?;
            let pi = lp_projection_body(k, p)?;
            let vp = star_volume(&pi.polar()?, &ctx.quad)?.value;
            Ok(Outcome::new(k.volume().powf((nf - p) / p) * vp, ctx.omega().powf(nf / p), ctx.proxy(p)).equality(quad_eq))
        }
        CheckName::Vpti => {
            p_above_one(p)?;
            t_open(t, n)?;
            let (k, q) = (polytope(input, 0)?, polytope(input, 1)?);
            in_k_o(k, "K")?;
            let pi = mixed_lp_projection_body(k, q, p, t)?;
            let vp = star_volume(&pi.polar()?, &ctx.quad)?.value;
            let tf = t as f64;
            let lhs = k.volume().powf((tf + 1.0 - p) / p) * q.volume().powf((nf - tf - 1.0) / p) * vp;
            Ok(Outcome::new(lhs, ctx.omega().powf(nf / p), ctx.proxy(p)).equality(quad_eq))
        }
        CheckName::Lpde => {
            p_above_one(p)?;
            t_closed(t, n)?;
            let (k, q, l) = (polytope(input, 0)?, polytope(input, 1)?, star(input, 0)?);
            in_k_o(k, "K")?;
            let gamma = centroid_body(l, p, &ctx.quad_alt)?;
            let lhs = lpt_mixed_volume(k, &gamma, q, p, t)?.value;
            let pi = mixed_lp_projection_body(k, q, p, t)?;
            let dual = dual_mixed_volume(l, &pi.polar()?, p, &ctx.quad)?.value;
            let rhs = ctx.omega() / star_volume(l, &ctx.quad)?.value * dual;
            let note = if t > 0 && t + 1 < n { "" } else { "extrapolated: t outside 0 < t < n-1" };
            Ok(Outcome::new(lhs, rhs, tol.fubini).note(note))
        }
        CheckName::BallVolumeIdentity => {
            p_above_one(p)?;
            t_open(t, n)?;
            let (k, q) = (polytope(input, 0)?, polytope(input, 1)?);
            in_k_o(k, "K")?;
            let polar = mixed_lp_projection_body(k, q, p, t)?.polar()?;
            let gamma = centroid_body(&polar, p, &ctx.quad_alt)?;
            let v = lpt_mixed_volume(k, &gamma, q, p, t)?.value;
            Ok(Outcome::new(ctx.omega(), v, tol.fubini))
        }
        CheckName::Ptpi => {
            p_above_one(p)?;
            t_open(t, n)?;
            let (k, l, q, phi) = (polytope(input, 0)?, polytope(input, 1)?, polytope(input, 2)?, map(input)?);
            in_k_o(k, "K")?;
            in_k_o(l, "L")?;
            let lhs = lpt_mixed_volume(&k.linear_image(phi)?, &support(l), &q.linear_image(phi)?, p, t)?.value;
            let moved = linear_image(&phi.inverse()?, &support(l))?;
            let rhs = lpt_mixed_volume(k, &moved, q, p, t)?.value;
            Ok(Outcome::new(lhs, rhs, tol.covariance))
        }
        CheckName::Lppk => {
            p_above_one(p)?;
            t_open(t, n)?;
            let (k, q, phi) = (polytope(input, 0)?, polytope(input, 1)?, map(input)?);
            in_k_o(k, "K")?;
            let moved = mixed_lp_projection_body(&k.linear_image(phi)?, &q.linear_image(phi)?, p, t)?;
            let base = mixed_lp_projection_body(k, q, p, t)?;
            let inv = phi.inverse()?;
            let (a, b) = compare_supports(n, |u| moved.h(u), |u| base.h(&inv.apply(u)));
            Ok(Outcome::new(a, b, tol.covariance).note("worst of 64 directions"))
        }
        CheckName::Dpt => {
            p_at_least_one(p)?;
            t_closed(t, n)?;
            let (k, q, phi) = (polytope(input, 0)?, polytope(input, 1)?, map(input)?);
            in_k_o(k, "K")?;
            let lhs = lp_mixed_surface_measure(&k.linear_image(phi)?, &q.linear_image(phi)?, p, t)?;
            let rhs = transform_measure_p(&lp_mixed_surface_measure(k, q, p, t)?, &phi.transpose(), p)?;
            let margin = lhs.atomwise_distance(&rhs);
            Ok(Outcome::new(lhs.total_mass(), rhs.total_mass(), tol.covariance)
                .note(format!("atom-wise margin {margin:.3e}; atoms {} vs {}", lhs.atoms().len(), rhs.atoms().len()))
                .with_margin(margin))
        }
        CheckName::Lbda => {
            p_above_one(p)?;
            t_open(t, n)?;
            let (k, q) = (polytope(input, 0)?, polytope(input, 1)?);
            in_k_o(k, "K")?;
            let (l1, l2) = match input.scalars.as_slice() {
                [a, b, ..] if *a > 0.0 && *b > 0.0 => (*a, *b),
                _ => return Err(hypothesis("requires two positive scalars")),
            };
            let scaled = mixed_lp_projection_body(&k.scale(l1)?, &q.scale(l2)?, p, t)?;
            let base = mixed_lp_projection_body(k, q, p, t)?;
            let tf = t as f64;
            let f = l1.powf((tf + 1.0 - p) / p) * l2.powf((nf - tf - 1.0) / p);
            let (a, b) = compare_supports(n, |u| scaled.h(u), |u| f * base.h(u));
            Ok(Outcome::new(a, b, tol.covariance).note("worst of 64 directions"))
        }
        CheckName::Phi => {
            if input.polytopes.len() < n {
                return Err(hypothesis(format!("requires {n} bodies")));
            }
            let phi = map(input)?;
            let list: Vec<&Polytope> = input.polytopes.iter().take(n).collect();
            let moved: Vec<Polytope> = list.iter().map(|b| b.linear_image(phi)).collect::<Result<_>>()?;
            let moved_refs: Vec<&Polytope> = moved.iter().collect();
            let lhs = integrate(|u| moved[n - 1].h(u), &mixed_area_measure(&moved_refs[..n - 1])?)?;
            let rhs = integrate(|u| list[n - 1].h(u), &mixed_area_measure(&list[..n - 1])?)?;
            Ok(Outcome::new(lhs, rhs, tol.covariance))
        }
        CheckName::Msa => {
            t_closed(t, n)?;
            let (k, q, phi) = (polytope(input, 0)?, polytope(input, 1)?, map(input)?);
            let lhs = repeated_mixed_area_measure(&k.linear_image(phi)?, t, &q.linear_image(phi)?)?;
            let rhs = transform_measure_p(&repeated_mixed_area_measure(k, t, q)?, &phi.transpose(), 1.0)?;
            let margin = lhs.atomwise_distance(&rhs);
            Ok(Outcome::new(lhs.total_mass(), rhs.total_mass(), tol.covariance)
                .note(format!("atom-wise margin {margin:.3e}"))
                .with_margin(margin))
        }
        CheckName::DiagonalVolume => {
            let k = polytope(input, 0)?;
            let shifted = k.translate(&(Vector::basis(n, 0) * 0.37 + Vector::basis(n, 1) * -0.21));
            let mut list: Vec<&Polytope> = vec![k; n - 1];
            list.push(&shifted);
            Ok(Outcome::new(mixed_volume(&list)?.value, k.volume(), tol.exact).note("one slot translated"))
        }
        CheckName::SelfLpt => {
            p_at_least_one(p)?;
            t_closed(t, n)?;
            let (k, q) = (polytope(input, 0)?, polytope(input, 1)?);
            in_k_o(k, "K")?;
            let lhs = lpt_mixed_volume(k, &support(k), q, p, t)?.value;
            let rhs = repeated_mixed_volume(k, t + 1, q, n - t - 1, q)?.value;
            Ok(Outcome::new(lhs, rhs, tol.exact))
        }
        CheckName::DiagonalLpt => {
            p_at_least_one(p)?;
            t_closed(t, n)?;
            let k = polytope(input, 0)?;
            in_k_o(k, "K")?;
            Ok(Outcome::new(lpt_mixed_volume(k, &support(k), k, p, t)?.value, k.volume(), tol.exact))
        }
        CheckName::TopCollapse => {
            p_at_least_one(p)?;
            let (k, l, q) = (polytope(input, 0)?, polytope(input, 1)?, polytope(input, 2)?);
            in_k_o(k, "K")?;
            in_k_o(l, "L")?;
            let lhs = lpt_mixed_volume(k, &support(l), q, p, n - 1)?.value;
            Ok(Outcome::new(lhs, lp_mixed_volume(k, &support(l), p)?.value, tol.exact))
        }
        CheckName::UnitCollapse => {
            t_closed(t, n)?;
            let (k, l, q) = (polytope(input, 0)?, polytope(input, 1)?, polytope(input, 2)?);
            in_k_o(k, "K")?;
            in_k_o(l, "L")?;
            let lhs = lpt_mixed_volume(k, &support(l), q, 1.0, t)?.value;
            let rhs = repeated_mixed_volume(k, t, l, 1, q)?.value;
            Ok(Outcome::new(lhs, rhs, tol.exact))
        }
        CheckName::QuermassCollapse => {
            p_at_least_one(p)?;
            let (k, l) = (polytope(input, 0)?, polytope(input, 1)?);
            in_k_o(k, "K")?;
            in_k_o(l, "L")?;
            let i = prm.i;
            if i >= n {
                return Err(hypothesis(format!("requires 0 <= i <= {}, got {i}", n - 1)));
            }
            let lhs = lp_mixed_quermassintegral(k, &support(l), p, i, ctx.ball_m)?.value;
            let ball = ball_approx_volume_matched(n, ctx.ball_m)?.polytope;
            // direct sum h_L^p h_K^{1-p} over the atoms of S(K, t; B, i)
            let mu = repeated_mixed_area_measure(k, n - i - 1, &ball)?;
            let rhs = integrate(|u| l.h(u).powf(p) * k.h(u).powf(1.0 - p), &mu)? / nf;
            Ok(Outcome::new(lhs, rhs, tol.exact).note(format!("i={i}")))
        }
        CheckName::ZeroSlotCollapse => {
            let (k, l, q) = (polytope(input, 0)?, polytope(input, 1)?, polytope(input, 2)?);
            in_k_o(k, "K")?;
            in_k_o(l, "L")?;
            let lhs = lpt_mixed_volume(k, &support(l), q, 1.0, 0)?.value;
            let rhs = repeated_mixed_volume(l, 1, q, n - 1, q)?.value;
            Ok(Outcome::new(lhs, rhs, tol.exact))
        }
        CheckName::DualSelf => {
            p_at_least_one(p)?;
            let k = star(input, 0)?;
            let lhs = dual_mixed_volume(k, k, p, &ctx.quad)?.value;
            let rhs = star_volume(k, &ctx.quad_alt)?.value;
            Ok(Outcome::new(lhs, rhs, ctx.proxy(p)).note("volume on the coarser rule"))
        }
        CheckName::LimitAgreement => {
            p_at_least_one(p)?;
            t_closed(t, n)?;
            let (k, l, q) = (polytope(input, 0)?, polytope(input, 1)?, polytope(input, 2)?);
            in_k_o(k, "K")?;
            in_k_o(l, "L")?;
            let lim = lpt_mixed_volume_limit(k, &support(l), q, p, t, &ctx.schedule)?;
            let exact = lpt_mixed_volume(k, &support(l), q, p, t)?.value;
            Ok(Outcome::new(lim.value, exact, tol.limit).note(format!("extrapolation change {:.3e}", lim.tolerance)))
        }
    }
}

/// Runs one check and packages the record.
pub fn run_check(
    ctx: &LabContext,
    name: CheckName,
    input: &CheckInput,
    params: &CheckParams,
    case: usize,
    seed: u64,
) -> CheckRecord {
    let (p, t) = match name {
        CheckName::Mfi | CheckName::Afi | CheckName::Mli | CheckName::Petty | CheckName::MixedPetty | CheckName::Phi | CheckName::DiagonalVolume => {
            (None, if name == CheckName::Afi { Some(params.t) } else { None })
        }
        CheckName::Lpmi | CheckName::Vi | CheckName::Cbi | CheckName::LpPetty | CheckName::DualSelf | CheckName::TopCollapse | CheckName::Milpmq | CheckName::QuermassCollapse => {
            (Some(params.p), None)
        }
        CheckName::UnitCollapse | CheckName::Msa => (Some(1.0), Some(params.t)),
        CheckName::ZeroSlotCollapse => (Some(1.0), Some(0)),
        _ => (Some(params.p), Some(params.t)),
    };
    let mut record = CheckRecord {
        case,
        name: name.as_str().to_string(),
        anchor: name.anchor().to_string(),
        kind: name.kind(),
        lhs: None,
        rhs: None,
        ratio: None,
        margin: None,
        tolerance: 0.0,
        verdict: Verdict::Error,
        seed,
        p,
        t,
        equality_case: input.equality,
        detail: String::new(),
    };
    match evaluate(ctx, name, input, params) {
        Ok(out) => {
            record.lhs = Some(out.lhs);
            record.rhs = Some(out.rhs);
            record.tolerance = out.tol;
            record.detail = out.detail;
            match name.kind() {
                CheckKind::Inequality => {
                    let ratio = if matches!(
                        name,
                        CheckName::Afi | CheckName::Petty | CheckName::MixedPetty | CheckName::LpPetty | CheckName::Vpti
                    ) {
                        out.rhs / out.lhs
                    } else {
                        out.lhs / out.rhs
                    };
                    record.ratio = Some(ratio);
                    record.verdict = Verdict::for_ratio(ratio, out.tol, out.equality_tol, input.equality);
                    if record.verdict == Verdict::EqualityCase {
                        record.tolerance = out.equality_tol;
                    }
                    if input.equality && record.verdict == Verdict::Violated {
                        push_detail(&mut record.detail, "constructed equality case not attained");
                    }
                }
                CheckKind::Identity => {
                    let margin = out.margin.unwrap_or_else(|| relative(out.lhs, out.rhs));
                    record.margin = Some(margin);
                    record.verdict = Verdict::for_margin(margin, out.tol);
                }
            }
        }
        Err(GeomError::Hypothesis(msg)) => {
            record.verdict = Verdict::Rejected;
            record.detail = msg;
        }
        Err(e) => {
            record.verdict = Verdict::Error;
            record.detail = format!("{}: {e}", e.kind());
        }
    }
    record
}

fn push_detail(detail: &mut String, note: &str) {
    if !detail.is_empty() {
        detail.push_str("; ");
    }
    detail.push_str(note);
}

/// Checks an inequality; identities are rejected here.
pub fn check_inequality(ctx: &LabContext, name: CheckName, input: &CheckInput, params: &CheckParams, seed: u64) -> CheckRecord {
    if name.kind() != CheckKind::Inequality {
        return rejected(name, params, seed, "not an inequality");
    }
    run_check(ctx, name, input, params, 0, seed)
}

/// Checks an identity; inequalities are rejected here.
pub fn check_identity(ctx: &LabContext, name: CheckName, input: &CheckInput, params: &CheckParams, seed: u64) -> CheckRecord {
    if name.kind() != CheckKind::Identity {
        return rejected(name, params, seed, "not an identity");
    }
    run_check(ctx, name, input, params, 0, seed)
}

fn rejected(name: CheckName, params: &CheckParams, seed: u64, why: &str) -> CheckRecord {
    CheckRecord {
        case: 0,
        name: name.as_str().to_string(),
        anchor: name.anchor().to_string(),
        kind: name.kind(),
        lhs: None,
        rhs: None,
        ratio: None,
        margin: None,
        tolerance: 0.0,
        verdict: Verdict::Rejected,
        seed,
        p: Some(params.p),
        t: Some(params.t),
        equality_case: false,
        detail: why.to_string(),
    }
}
