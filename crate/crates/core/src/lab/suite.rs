//! The batch verification run: a deterministic plan of cases, evaluated in
//! parallel and merged by case index.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checks::{run_check, CheckInput, CheckName, CheckParams, CheckRecord, LabContext, Verdict};
use super::generate::{derive_seed, ellipsoid_polytope, generate_ellipsoid, generate_polytope, generate_slmap, generate_star_body, rng};
use crate::bodies::{ball_approx_volume_matched, Polytope, StarBody};
use crate::error::{check_dim, GeomError, Result};
use crate::linalg::{LinMap, Vector};
use crate::quadrature::default_level;
use crate::tol::Tolerances;

/// Case counts per group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Counts {
    pub mlpmi: usize,
    pub vpti: usize,
    /// Each check of the classical battery.
    pub battery: usize,
    /// Each exact-pipeline identity.
    pub identities: usize,
    /// Each covariance identity.
    pub covariance: usize,
    pub duality: usize,
    /// Duality cases at each `t` outside the open range.
    pub duality_probe: usize,
    pub limit: usize,
    /// Constructed equality cases per variant.
    pub equality: usize,
}

impl Default for Counts {
    fn default() -> Self {
        Counts {
            mlpmi: 200,
            vpti: 100,
            battery: 100,
            identities: 100,
            covariance: 50,
            duality: 25,
            duality_probe: 5,
            limit: 25,
            equality: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    pub dim: usize,
    /// Quadrature level; the dimension's default when absent.
    pub quad_level: Option<usize>,
    /// Points of the ball approximant in ball slots and ellipsoid cases.
    pub ball_m: usize,
    /// Inclusive range for the number of random points per polytope.
    pub vertices: [usize; 2],
    /// `p` values for statements that allow `p >= 1`.
    pub p_grid: Vec<f64>,
    /// `p` values for statements that need `p > 1`.
    pub p_strict_grid: Vec<f64>,
    /// `t` values; all of `0..n` when absent.
    pub t_grid: Option<Vec<usize>>,
    pub condition_bound: f64,
    /// Restricts the run to these checks when non-empty.
    pub only: Vec<String>,
    pub counts: Counts,
    pub tolerances: Tolerances,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 20_240_611,
            dim: 3,
            quad_level: None,
            ball_m: 320,
            vertices: [8, 20],
            p_grid: vec![1.0, 1.5, 2.0],
            p_strict_grid: vec![1.5, 2.0],
            t_grid: None,
            condition_bound: 10.0,
            only: Vec::new(),
            counts: Counts::default(),
            tolerances: Tolerances::default(),
        }
    }
}

impl SuiteConfig {
    pub fn from_toml(text: &str) -> Result<SuiteConfig> {
        toml::from_str(text).map_err(|e| GeomError::Parse(e.message().to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.dim)?;
        let [lo, hi] = self.vertices;
        if lo < self.dim + 1 || hi < lo {
            return Err(GeomError::OutOfRange(format!("vertex range {lo}..={hi} is invalid in dimension {}", self.dim)));
        }
        if self.p_grid.is_empty() || self.p_strict_grid.is_empty() {
            return Err(GeomError::OutOfRange("p grids must be non-empty".into()));
        }
        if let Some(p) = self.p_grid.iter().chain(&self.p_strict_grid).find(|p| !p.is_finite() || **p <= 0.0) {
            return Err(GeomError::OutOfRange(format!("p must be positive and finite, got {p}")));
        }
        if let Some(ts) = &self.t_grid {
            if ts.is_empty() {
                return Err(GeomError::OutOfRange("t grid must be non-empty".into()));
            }
        }
        if self.ball_m < self.dim + 1 || self.condition_bound < 1.0 {
            return Err(GeomError::OutOfRange("ball_m or condition_bound out of range".into()));
        }
        for name in &self.only {
            name.parse::<CheckName>()?;
        }
        Ok(())
    }

    pub fn level(&self) -> usize {
        self.quad_level.unwrap_or_else(|| default_level(self.dim))
    }

    fn t_values(&self) -> Vec<usize> {
        self.t_grid.clone().unwrap_or_else(|| (0..self.dim).collect())
    }

    fn selected(&self, name: CheckName) -> bool {
        self.only.is_empty() || self.only.iter().any(|s| s.parse::<CheckName>().ok() == Some(name))
    }
}

/// How the inputs of a case are built.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Variant {
    Random,
    /// Equality by `K = L = Q` or by one body repeated.
    Same,
    /// Equality by dilates, homothets or origin-centred ellipsoids.
    Scaled,
    /// Equality at the ball.
    Ball,
}

#[derive(Clone, Copy, Debug)]
struct CaseSpec {
    name: CheckName,
    params: CheckParams,
    variant: Variant,
    seed: u64,
}

fn pick<T: Copy>(grid: &[T], j: usize) -> T {
    grid[j % grid.len()]
}

fn plan(cfg: &SuiteConfig) -> Vec<CaseSpec> {
    let n = cfg.dim;
    let ts = cfg.t_values();
    let open: Vec<usize> = ts.iter().copied().filter(|&t| t > 0 && t + 1 < n).collect();
    let outside: Vec<usize> = ts.iter().copied().filter(|&t| !(t > 0 && t + 1 < n)).collect();
    let mut out = Vec::new();
    let mut add = |name: CheckName, count: usize, variant: Variant, params: &dyn Fn(usize) -> CheckParams| {
        if !cfg.selected(name) {
            return;
        }
        let tag = format!("{}/{:?}", name.as_str(), variant);
        for j in 0..count {
            out.push(CaseSpec { name, params: params(j), variant, seed: derive_seed(cfg.seed, &tag, j as u64) });
        }
    };
    let base = CheckParams::default();
    let pg = &cfg.p_grid;
    let ps = &cfg.p_strict_grid;
    let c = &cfg.counts;
    // an empty open range still yields one (rejected) record
    let open_or = |j: usize| if open.is_empty() { ts[0] } else { pick(&open, j) };
    let open_count = |k: usize| if open.is_empty() { 1.min(k) } else { k };

    add(CheckName::Mlpmi, c.mlpmi, Variant::Random, &|j| CheckParams { p: pick(pg, j), t: pick(&ts, j / pg.len()), ..base });
    add(CheckName::Mlpmi, c.equality, Variant::Same, &|j| CheckParams { p: pick(pg, j), t: pick(&ts, j), ..base });
    add(CheckName::Mlpmi, c.equality, Variant::Scaled, &|j| CheckParams { p: pick(pg, j), t: pick(&ts, j), ..base });

    add(CheckName::Vpti, open_count(c.vpti), Variant::Random, &|j| CheckParams { p: pick(ps, j), t: open_or(j), ..base });
    add(CheckName::Vpti, open_count(c.equality), Variant::Ball, &|j| CheckParams { p: pick(ps, j), t: open_or(j), ..base });
    add(CheckName::Vpti, open_count(c.equality), Variant::Scaled, &|j| CheckParams { p: pick(ps, j), t: open_or(j), ..base });

    let afi = |j: usize| {
        let pairs: Vec<(usize, usize)> = (1..n).flat_map(|s| (1..=n - s).map(move |t| (s, t))).collect();
        let (s, t) = pick(&pairs, j);
        CheckParams { s, t, ..base }
    };
    let with_i = |j: usize| CheckParams { p: pick(pg, j), i: pick(&(0..n).collect::<Vec<_>>(), j / pg.len()), ..base };
    let with_p = |j: usize| CheckParams { p: pick(pg, j), ..base };
    let with_ps = |j: usize| CheckParams { p: pick(ps, j), ..base };
    let plain = |_: usize| base;
    for (name, params, variants) in [
        (CheckName::Mfi, &plain as &dyn Fn(usize) -> CheckParams, &[Variant::Scaled][..]),
        (CheckName::Lpmi, &with_p, &[Variant::Scaled]),
        (CheckName::Milpmq, &with_i, &[Variant::Scaled]),
        (CheckName::Afi, &afi, &[Variant::Scaled]),
        (CheckName::Mli, &plain, &[Variant::Scaled]),
        (CheckName::Vi, &with_p, &[Variant::Scaled]),
        (CheckName::Cbi, &with_ps, &[Variant::Scaled]),
        (CheckName::Petty, &plain, &[Variant::Scaled]),
        (CheckName::MixedPetty, &plain, &[Variant::Scaled]),
        (CheckName::LpPetty, &with_p, &[Variant::Scaled]),
    ] {
        add(name, c.battery, Variant::Random, params);
        for v in variants {
            add(name, c.equality, *v, params);
        }
    }

    let with_pt = |j: usize| CheckParams { p: pick(pg, j), t: pick(&ts, j / pg.len()), ..base };
    let with_t = |j: usize| CheckParams { t: pick(&ts, j), ..base };
    add(CheckName::DiagonalVolume, c.identities, Variant::Random, &plain);
    add(CheckName::SelfLpt, c.identities, Variant::Random, &with_pt);
    add(CheckName::DiagonalLpt, c.identities, Variant::Random, &with_pt);
    add(CheckName::TopCollapse, c.identities, Variant::Random, &with_p);
    add(CheckName::UnitCollapse, c.identities, Variant::Random, &with_t);
    add(CheckName::QuermassCollapse, c.identities, Variant::Random, &with_i);
    add(CheckName::ZeroSlotCollapse, c.identities, Variant::Random, &plain);
    add(CheckName::DualSelf, c.identities, Variant::Random, &with_p);

    let strict_open = |j: usize| CheckParams { p: pick(ps, j), t: open_or(j), ..base };
    add(CheckName::LimitAgreement, open_count(c.limit), Variant::Random, &strict_open);
    add(CheckName::Ptpi, open_count(c.covariance), Variant::Random, &strict_open);
    add(CheckName::Lppk, open_count(c.covariance), Variant::Random, &strict_open);
    add(CheckName::Lbda, open_count(c.covariance), Variant::Random, &strict_open);
    add(CheckName::Dpt, c.covariance, Variant::Random, &with_pt);
    add(CheckName::Msa, c.covariance, Variant::Random, &with_t);
    add(CheckName::Phi, c.covariance, Variant::Random, &plain);

    let p_dual = *ps.iter().find(|&&p| p == 2.0).unwrap_or(&ps[0]);
    add(CheckName::Lpde, open_count(c.duality), Variant::Random, &|j| CheckParams { p: p_dual, t: open_or(j), ..base });
    for &t in &outside {
        add(CheckName::Lpde, c.duality_probe, Variant::Random, &|_| CheckParams { p: p_dual, t, ..base });
    }
    add(CheckName::BallVolumeIdentity, open_count(c.duality), Variant::Random, &|j| CheckParams { p: p_dual, t: open_or(j), ..base });
    out
}

struct Builder<'a> {
    cfg: &'a SuiteConfig,
    ctx: &'a LabContext,
    seed: u64,
    rng: rand_chacha::ChaCha8Rng,
    next: u64,
}

impl Builder<'_> {
    fn sub_seed(&mut self) -> u64 {
        self.next += 1;
        derive_seed(self.seed, "input", self.next)
    }

    fn polytope(&mut self, recenter: bool) -> Result<Polytope> {
        let [lo, hi] = self.cfg.vertices;
        let m = self.rng.random_range(lo..=hi);
        let seed = self.sub_seed();
        generate_polytope(self.cfg.dim, m, seed, recenter)
    }

    fn polytopes(&mut self, count: usize, recenter: bool) -> Result<Vec<Polytope>> {
        (0..count).map(|_| self.polytope(recenter)).collect()
    }

    fn scalar(&mut self) -> f64 {
        self.rng.random_range(0.5..2.0)
    }

    fn shift(&mut self) -> Vector {
        let c: Vec<f64> = (0..self.cfg.dim).map(|_| self.rng.random_range(-0.5..0.5)).collect();
        Vector::from_slice(&c).expect("dimension 2 or 3")
    }

    fn map(&mut self) -> Result<LinMap> {
        let seed = self.sub_seed();
        generate_slmap(self.cfg.dim, seed, self.cfg.condition_bound)
    }

    fn ellipsoid(&mut self) -> Result<Polytope> {
        let seed = self.sub_seed();
        ellipsoid_polytope(&generate_ellipsoid(self.cfg.dim, seed)?, self.cfg.ball_m)
    }

    fn star(&mut self) -> Result<StarBody> {
        let seed = self.sub_seed();
        generate_star_body(self.cfg.dim, seed)
    }

    fn ball(&self) -> Result<Polytope> {
        Ok(ball_approx_volume_matched(self.cfg.dim, self.ctx.ball_m)?.polytope)
    }

    fn build(&mut self, spec: &CaseSpec) -> Result<CheckInput> {
        use CheckName as C;
        let n = self.cfg.dim;
        let mut input = CheckInput { equality: spec.variant != Variant::Random, ..CheckInput::default() };
        match (spec.name, spec.variant) {
            (C::Mlpmi, Variant::Same) => {
                let k = self.polytope(true)?;
                input.polytopes = vec![k.clone(), k.clone(), k];
            }
            (C::Mlpmi, Variant::Scaled) => {
                // K, L dilates and Q a translate of a dilate of K
                let k = self.polytope(true)?;
                let (a, b, x) = (self.scalar(), self.scalar(), self.shift());
                input.polytopes = vec![k.clone(), k.scale(a)?, k.scale(b)?.translate(&x)];
            }
            (C::Mfi | C::Afi, Variant::Scaled) => {
                let k = self.polytope(false)?;
                let (a, x) = (self.scalar(), self.shift());
                let q = self.polytope(false)?;
                input.polytopes = vec![k.clone(), k.scale(a)?.translate(&x), q];
            }
            (C::Lpmi | C::Milpmq, Variant::Scaled) => {
                let k = self.polytope(true)?;
                let a = self.scalar();
                input.polytopes = vec![k.clone(), k.scale(a)?];
            }
            (C::Mli, Variant::Scaled) => {
                let k = self.polytope(false)?;
                input.polytopes = (0..n)
                    .map(|_| {
                        let (a, x) = (self.scalar(), self.shift());
                        Ok(k.scale(a)?.translate(&x))
                    })
                    .collect::<Result<_>>()?;
            }
            (C::Vi, Variant::Scaled) => {
                let k = self.star()?;
                let a = self.scalar();
                let shape = LinMap::scalar(n, a);
                input.stars = vec![k.clone(), crate::bodies::star_linear_image(&shape, &k)?];
            }
            (C::Cbi, Variant::Scaled) => {
                let seed = self.sub_seed();
                input.stars = vec![StarBody::ellipsoid(generate_ellipsoid(n, seed)?)?];
            }
            (C::Petty | C::LpPetty, Variant::Scaled) => {
                input.polytopes = vec![self.ellipsoid()?];
            }
            (C::MixedPetty, Variant::Scaled) => {
                let e = self.ellipsoid()?;
                input.polytopes = (0..n - 1)
                    .map(|_| {
                        let (a, x) = (self.scalar(), self.shift());
                        Ok(e.scale(a)?.translate(&x))
                    })
                    .collect::<Result<_>>()?;
            }
            (C::Vpti, Variant::Ball) => {
                let b = self.ball()?;
                input.polytopes = vec![b.clone(), b];
            }
            (C::Vpti, Variant::Scaled) => {
                let e = self.ellipsoid()?;
                let a = self.scalar();
                input.polytopes = vec![e.clone(), e.scale(a)?];
            }
            (C::Mfi | C::Afi | C::Mli | C::Petty | C::MixedPetty | C::Phi | C::Msa | C::DiagonalVolume, _) => {
                input.polytopes = self.polytopes(n.max(3), false)?;
            }
            (C::Vi, _) => input.stars = vec![self.star()?, self.star()?],
            (C::Cbi | C::DualSelf, _) => input.stars = vec![self.star()?],
            (C::Lpde, _) => {
                input.polytopes = vec![self.polytope(true)?, self.polytope(false)?];
                input.stars = vec![self.star()?];
            }
            (C::Ptpi | C::LimitAgreement | C::TopCollapse | C::UnitCollapse | C::ZeroSlotCollapse, _) => {
                input.polytopes = vec![self.polytope(true)?, self.polytope(true)?, self.polytope(false)?];
            }
            (C::Lbda, _) => {
                input.polytopes = vec![self.polytope(true)?, self.polytope(false)?];
                input.scalars = vec![self.scalar(), self.scalar()];
            }
            _ => {
                // K (origin inside), Q arbitrary, a map for the covariance checks
                input.polytopes = vec![self.polytope(true)?, self.polytope(true)?, self.polytope(false)?];
            }
        }
        if matches!(spec.name, C::Ptpi | C::Lppk | C::Dpt | C::Msa | C::Phi) {
            input.map = Some(self.map()?);
            // the random slot Q of the covariance checks sits at index 1
            if spec.name != C::Ptpi && spec.name != C::Phi {
                input.polytopes.remove(1);
            }
        }
        Ok(input)
    }
}

fn run_case(cfg: &SuiteConfig, ctx: &LabContext, case: usize, spec: &CaseSpec) -> CheckRecord {
    let mut builder = Builder { cfg, ctx, seed: spec.seed, rng: rng(spec.seed), next: 0 };
    match builder.build(spec) {
        Ok(input) => run_check(ctx, spec.name, &input, &spec.params, case, spec.seed),
        Err(e) => {
            let mut r = run_check(ctx, spec.name, &CheckInput::default(), &spec.params, case, spec.seed);
            r.verdict = Verdict::Error;
            r.detail = format!("input generation failed: {}: {e}", e.kind());
            r
        }
    }
}

/// Builds the shared context for a configuration.
pub fn context(cfg: &SuiteConfig) -> Result<LabContext> {
    LabContext::new(cfg.dim, cfg.level(), cfg.tolerances, cfg.ball_m)
}

/// Runs every planned case. Records come back in case order whatever the
/// scheduling.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<CheckRecord>> {
    cfg.validate()?;
    let ctx = context(cfg)?;
    let specs = plan(cfg);
    Ok(specs.par_iter().enumerate().map(|(i, s)| run_case(cfg, &ctx, i, s)).collect())
}

/// Number of cases a configuration plans.
pub fn planned_cases(cfg: &SuiteConfig) -> usize {
    plan(cfg).len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(only: &[&str]) -> SuiteConfig {
        SuiteConfig {
            quad_level: Some(12),
            ball_m: 120,
            vertices: [6, 10],
            only: only.iter().map(|s| s.to_string()).collect(),
            counts: Counts {
                mlpmi: 6,
                vpti: 2,
                battery: 2,
                identities: 2,
                covariance: 2,
                duality: 1,
                duality_probe: 1,
                limit: 1,
                equality: 1,
            },
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn config_parses_with_defaults() {
        let cfg = SuiteConfig::from_toml("seed = 5\n[counts]\nmlpmi = 3\n").unwrap();
        assert_eq!(cfg.seed, 5);
        assert_eq!(cfg.counts.mlpmi, 3);
        assert_eq!(cfg.counts.vpti, 100);
        assert!(SuiteConfig::from_toml("sede = 5").is_err());
        let bad = SuiteConfig { vertices: [2, 10], ..SuiteConfig::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn default_plan_has_the_documented_size() {
        let cfg = SuiteConfig::default();
        let specs = plan(&cfg);
        let count = |name| specs.iter().filter(|s| s.name == name && s.variant == Variant::Random).count();
        assert_eq!(count(CheckName::Mlpmi), 200);
        assert_eq!(count(CheckName::Vpti), 100);
        assert_eq!(count(CheckName::Petty), 100);
        assert!(specs.iter().filter(|s| s.name == CheckName::Vpti).all(|s| s.params.t == 1));
        assert!(specs.iter().filter(|s| s.name == CheckName::Mlpmi).any(|s| s.params.t == 2 && s.params.p == 2.0));
    }

    #[test]
    fn runs_are_reproducible_and_clean() {
        let cfg = small(&["MLPMI", "MFI", "PTPI", "DPT"]);
        let a = run_suite(&cfg).unwrap();
        let b = run_suite(&cfg).unwrap();
        assert_eq!(a, b);
        for r in &a {
            assert!(!r.verdict.is_failure(), "{r:?}");
        }
        assert!(a.iter().any(|r| r.verdict == Verdict::EqualityCase));
        assert!(a.windows(2).all(|w| w[0].case < w[1].case));
    }

    #[test]
    fn planar_runs_reject_empty_ranges() {
        let cfg = SuiteConfig { dim: 2, ..small(&["VPTI", "MLPMI"]) };
        let recs = run_suite(&cfg).unwrap();
        assert!(recs.iter().any(|r| r.name == "VPTI" && r.verdict == Verdict::Rejected));
        assert!(recs.iter().filter(|r| r.name == "MLPMI").all(|r| !r.verdict.is_failure()));
    }
}
