//! Acceptance run: one line per criterion, nonzero exit if any fails.
//!
//! Criteria 2 to 8 and 10 are read from a full default `verify` run of the
//! binary; 1 and 9 are checked here against oracles written in this file.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::Instant;

use lpmix::bodies::{ball_approx_volume_matched, Polytope, StarBody};
use lpmix::functionals::mixed_volume;
use lpmix::lab::checks::{CheckRecord, Verdict};
use lpmix::lab::generate::generate_polytope;
use lpmix::lab::report::parse_report;
use lpmix::projections::{brightness, centroid_body, lp_projection_body, mixed_lp_projection_body};
use lpmix::quadrature::make_quadrature;
use lpmix::Vector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NORMALIZATION_TOL: f64 = 5e-3;
const NORMALIZATION_SECONDS: f64 = 30.0;
const EXACT_TOL: f64 = 1e-9;
const LIMIT_TOL: f64 = 1e-4;
const EQUALITY_EXACT: f64 = 1e-6;
const EQUALITY_QUADRATURE: f64 = 1e-2;
const PROXY_FACTOR: f64 = 3.0;
const COVARIANCE_TOL: f64 = 1e-8;
const DUALITY_TOL: f64 = 5e-3;
const BRIGHTNESS_TOL: f64 = 1e-8;
const VERIFY_SECONDS: f64 = 600.0;
const LEVEL_3D: usize = 24;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

// oracle helpers

/// Golden-spiral directions, independent of the library's sphere sets.
fn spiral(m: usize) -> Vec<Vector> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..m)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / m as f64;
            let r = (1.0 - z * z).sqrt();
            let a = golden * i as f64;
            Vector::new3(r * a.cos(), r * a.sin(), z)
        })
        .collect()
}

fn cross2(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Area of the planar convex hull (monotone chain and shoelace).
fn hull_area(mut pts: Vec<(f64, f64)>) -> f64 {
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(f64, f64)>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross2(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    let m = hull.len();
    (0..m).map(|i| cross2((0.0, 0.0), hull[i], hull[(i + 1) % m])).sum::<f64>().abs() / 2.0
}

/// Area of the projection of `k` onto `u^⊥`.
fn projected_area(k: &Polytope, u: &Vector) -> f64 {
    let helper = if u[0].abs() < 0.9 { Vector::new3(1.0, 0.0, 0.0) } else { Vector::new3(0.0, 1.0, 0.0) };
    let e1 = u.cross(&helper).normalized().unwrap();
    let e2 = u.cross(&e1);
    hull_area(k.vertices().iter().map(|v| (v.dot(&e1), v.dot(&e2))).collect())
}

/// `V(K_1, K_2, K_3)` from volumes of Minkowski sums.
fn polarized_volume(k: &[&Polytope; 3]) -> f64 {
    let mut total = 0.0;
    for mask in 1u32..8 {
        let members: Vec<&Polytope> = (0..3).filter(|i| mask >> i & 1 == 1).map(|i| k[i]).collect();
        let mut sum = members[0].clone();
        for b in &members[1..] {
            sum = sum.minkowski_sum(b).unwrap();
        }
        let sign = if (3 - members.len()) % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * sum.volume();
    }
    total / 6.0
}

// criteria from the lab run

fn select<'a>(records: &'a [CheckRecord], name: &str) -> Vec<&'a CheckRecord> {
    records.iter().filter(|r| r.name == name).collect()
}

fn random_cases<'a>(records: &'a [CheckRecord], name: &str) -> Vec<&'a CheckRecord> {
    select(records, name).into_iter().filter(|r| !r.equality_case).collect()
}

fn equality_cases<'a>(records: &'a [CheckRecord], name: &str) -> Vec<&'a CheckRecord> {
    select(records, name).into_iter().filter(|r| r.equality_case).collect()
}

fn worst_margin(rs: &[&CheckRecord]) -> f64 {
    rs.iter().map(|r| r.margin.unwrap_or(f64::INFINITY)).fold(0.0, f64::max)
}

fn worst_shortfall(rs: &[&CheckRecord]) -> f64 {
    rs.iter().map(|r| 1.0 - r.ratio.unwrap_or(f64::NEG_INFINITY)).fold(f64::NEG_INFINITY, f64::max)
}

fn worst_equality(rs: &[&CheckRecord]) -> f64 {
    rs.iter().map(|r| (r.ratio.unwrap_or(f64::INFINITY) - 1.0).abs()).fold(0.0, f64::max)
}

/// `PROXY_FACTOR` times the ball-normalization error of the default rule.
fn proxy(p: f64) -> f64 {
    let q = make_quadrature(3, LEVEL_3D).unwrap();
    PROXY_FACTOR * q.normalization_error(1.0).max(q.normalization_error(p))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let ball = ball_approx_volume_matched(3, 320).unwrap().polytope;
    let unit = StarBody::ball(3, 1.0).unwrap();
    let quad = make_quadrature(3, LEVEL_3D).unwrap();
    let dirs = spiral(400);
    let sup = |h: &dyn Fn(&Vector) -> f64| dirs.iter().map(|u| (h(u) - 1.0).abs()).fold(0.0, f64::max);
    let mut worst = [0.0f64; 3];
    for p in [1.0, 1.5, 2.0, 3.0] {
        let pi = lp_projection_body(&ball, p).unwrap();
        worst[0] = worst[0].max(sup(&|u| pi.h(u)));
        let gamma = centroid_body(&unit, p, &quad).unwrap();
        worst[1] = worst[1].max(sup(&|u| gamma.h(u)));
        for t in 0..3 {
            let pit = mixed_lp_projection_body(&ball, &ball, p, t).unwrap();
            worst[2] = worst[2].max(sup(&|u| pit.h(u)));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst.iter().all(|w| *w <= NORMALIZATION_TOL) && secs < NORMALIZATION_SECONDS && quad.degree() >= 35;
    outcome(
        pass,
        format!(
            "sup |h - 1|: Pi_p B {:.2e}, Gamma_p B {:.2e}, Pi_p,t(B,B) {:.2e} (tol {NORMALIZATION_TOL:.0e}); degree {}; {secs:.1} s",
            worst[0],
            worst[1],
            worst[2],
            quad.degree()
        ),
    )
}

fn criterion_2(records: &[CheckRecord]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["DiagonalVolume", "SelfLpt", "DiagonalLpt", "TopCollapse", "UnitCollapse"] {
        let rs = random_cases(records, name);
        let w = worst_margin(&rs);
        pass &= rs.len() == 100 && w <= EXACT_TOL;
        parts.push(format!("{name} {}x worst {w:.1e}", rs.len()));
    }
    let dual = random_cases(records, "DualSelf");
    let dual_ok = dual.iter().all(|r| r.margin.unwrap_or(f64::INFINITY) <= proxy(r.p.unwrap_or(1.0)));
    pass &= dual.len() == 100 && dual_ok;
    parts.push(format!("DualSelf {}x worst {:.1e} (quadrature tol)", dual.len(), worst_margin(&dual)));
    // independent oracle: V(K, K, K) by volumes of Minkowski sums
    let mut oracle = 0.0f64;
    for seed in 0..20 {
        let k = generate_polytope(3, 10, 500 + seed, false).unwrap();
        let v = polarized_volume(&[&k, &k, &k]);
        oracle = oracle.max((v - k.volume()).abs() / k.volume());
    }
    pass &= oracle <= EXACT_TOL;
    parts.push(format!("sum-volume oracle {oracle:.1e}"));
    outcome(pass, parts.join("; "))
}

fn criterion_3(records: &[CheckRecord]) -> Outcome {
    let rs = random_cases(records, "LimitAgreement");
    let ps: BTreeSet<String> = rs.iter().filter_map(|r| r.p).map(|p| p.to_string()).collect();
    let w = worst_margin(&rs);
    let pass = rs.len() == 25 && w <= LIMIT_TOL && rs.iter().all(|r| r.t == Some(1)) && ps.len() == 2;
    outcome(pass, format!("{} triples, p in {ps:?}, t = 1, worst relative disagreement {w:.2e} (tol {LIMIT_TOL:.0e})", rs.len()))
}

fn criterion_4(records: &[CheckRecord]) -> Outcome {
    let rs = random_cases(records, "MLPMI");
    let eq = equality_cases(records, "MLPMI");
    let grid: BTreeSet<(String, usize)> = rs.iter().map(|r| (r.p.unwrap().to_string(), r.t.unwrap())).collect();
    let short = worst_shortfall(&rs);
    let weq = worst_equality(&eq);
    let pass = rs.len() == 200 && grid.len() == 9 && short <= EXACT_TOL && !eq.is_empty() && weq <= EQUALITY_EXACT;
    outcome(
        pass,
        format!(
            "{} triples over {} (p, t) pairs, smallest ratio {:.4}; {} equality cases within {weq:.1e}",
            rs.len(),
            grid.len(),
            1.0 - short,
            eq.len()
        ),
    )
}

fn criterion_5(records: &[CheckRecord]) -> Outcome {
    let rs = random_cases(records, "VPTI");
    let eq = equality_cases(records, "VPTI");
    // lhs ≤ ω_n^{n/p} (1 + 3·proxy)
    let within = |r: &&CheckRecord| r.lhs.unwrap() <= r.rhs.unwrap() * (1.0 + proxy(r.p.unwrap()));
    let bound_ok = rs.iter().all(within);
    let ps: BTreeSet<String> = rs.iter().map(|r| r.p.unwrap().to_string()).collect();
    let ts: BTreeSet<usize> = rs.iter().map(|r| r.t.unwrap()).collect();
    let weq = eq.iter().map(|r| (r.lhs.unwrap() / r.rhs.unwrap() - 1.0).abs()).fold(0.0, f64::max);
    let pass = rs.len() == 100 && bound_ok && ts == BTreeSet::from([1]) && ps.len() == 2 && !eq.is_empty() && weq <= EQUALITY_QUADRATURE;
    let top = rs.iter().map(|r| r.lhs.unwrap() / r.rhs.unwrap()).fold(0.0, f64::max);
    outcome(
        pass,
        format!(
            "{} pairs, largest lhs / bound {top:.4}; ball and ellipsoid equality ({}) within {weq:.1e} (tol {EQUALITY_QUADRATURE:.0e})",
            rs.len(),
            eq.len()
        ),
    )
}

fn criterion_6(records: &[CheckRecord]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["PTPI", "LPPK", "DPT", "PHI", "MSA"] {
        let rs = select(records, name);
        let w = worst_margin(&rs);
        pass &= rs.len() == 50 && w <= COVARIANCE_TOL;
        parts.push(format!("{name} {}x {w:.1e}", rs.len()));
    }
    outcome(pass, format!("{} (tol {COVARIANCE_TOL:.0e})", parts.join(", ")))
}

fn criterion_7(records: &[CheckRecord]) -> Outcome {
    let lpde: Vec<&CheckRecord> = select(records, "LPDE").into_iter().filter(|r| r.t == Some(1)).collect();
    let probes: Vec<&CheckRecord> = select(records, "LPDE").into_iter().filter(|r| r.t != Some(1)).collect();
    let ball = select(records, "BallVolume");
    let (w, wb, wp) = (worst_margin(&lpde), worst_margin(&ball), worst_margin(&probes));
    let p2 = lpde.iter().chain(&ball).all(|r| r.p == Some(2.0));
    let pass = lpde.len() == 25 && ball.len() == 25 && p2 && w <= DUALITY_TOL && wb <= DUALITY_TOL;
    outcome(
        pass,
        format!(
            "duality {}x worst {w:.2e}; ball-volume identity {}x worst {wb:.2e} (tol {DUALITY_TOL:.0e}); t = 0, 2 probes {}x worst {wp:.2e}",
            lpde.len(),
            ball.len(),
            probes.len()
        ),
    )
}

fn criterion_8(records: &[CheckRecord]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, exact) in [
        ("MFI", true),
        ("LPMI", true),
        ("MILPMQ", true),
        ("AFI", true),
        ("MLI", true),
        ("VI", false),
        ("CBI", false),
        ("Petty", false),
        ("MixedPetty", false),
        ("LpPetty", false),
    ] {
        let rs = random_cases(records, name);
        let eq = equality_cases(records, name);
        let holds = rs.iter().all(|r| {
            let tol = if exact { EXACT_TOL } else { r.tolerance };
            r.ratio.unwrap_or(f64::NEG_INFINITY) >= 1.0 - tol
        });
        let weq = worst_equality(&eq);
        let eq_tol = if exact { EQUALITY_EXACT } else { EQUALITY_QUADRATURE };
        pass &= rs.len() == 100 && holds && !eq.is_empty() && weq <= eq_tol;
        parts.push(format!("{name} {}{} eq {weq:.0e}", rs.len(), if holds { "" } else { " FAILING" }));
    }
    outcome(pass, parts.join(", "))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_b = 0.0f64;
    for seed in 0..50 {
        let k = generate_polytope(3, 14, 900 + seed, false).unwrap();
        let u = spiral(50)[seed as usize];
        let a = projected_area(&k, &u);
        worst_b = worst_b.max((brightness(&k, &u).unwrap() - a).abs() / a);
    }
    let mut mc_fail = 0;
    let mut worst_sigma = 0.0f64;
    for seed in 0..20 {
        let k = generate_polytope(3, 12, 700 + seed, false).unwrap();
        let (mut lo, mut hi) = ([f64::INFINITY; 3], [f64::NEG_INFINITY; 3]);
        for v in k.vertices() {
            for i in 0..3 {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        let box_volume: f64 = (0..3).map(|i| hi[i] - lo[i]).product();
        let samples = 200_000;
        let mut inside = 0usize;
        for _ in 0..samples {
            let x = Vector::new3(rng.random_range(lo[0]..hi[0]), rng.random_range(lo[1]..hi[1]), rng.random_range(lo[2]..hi[2]));
            if k.facets().iter().all(|f| f.normal.dot(&x) <= f.offset) {
                inside += 1;
            }
        }
        let frac = inside as f64 / samples as f64;
        let sigma = box_volume * (frac * (1.0 - frac) / samples as f64).sqrt();
        let z = (box_volume * frac - k.volume()).abs() / sigma;
        worst_sigma = worst_sigma.max(z);
        if z > 3.0 {
            mc_fail += 1;
        }
    }
    let mut worst_mv = 0.0f64;
    for seed in 0..50 {
        let bodies: Vec<Polytope> = (0..3).map(|j| generate_polytope(3, 9, 3000 + 3 * seed + j, false).unwrap()).collect();
        let refs = [&bodies[0], &bodies[1], &bodies[2]];
        let v = mixed_volume(&refs).unwrap().value;
        let o = polarized_volume(&refs);
        worst_mv = worst_mv.max((v - o).abs() / o);
    }
    let pass = worst_b <= BRIGHTNESS_TOL && mc_fail == 0 && worst_mv <= EXACT_TOL;
    outcome(
        pass,
        format!(
            "brightness vs projected hull {worst_b:.1e} (50); volume vs Monte Carlo worst {worst_sigma:.2} sigma (20); mixed volume vs sum volumes {worst_mv:.1e} (50)"
        ),
    )
}

fn run_verify(dir: &std::path::Path, name: &str) -> (std::process::Output, String, f64) {
    let path = dir.join(name);
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_lpmix"))
        .args(["verify", "--out"])
        .arg(&path)
        .output()
        .expect("binary runs");
    let secs = start.elapsed().as_secs_f64();
    let report = std::fs::read_to_string(&path).unwrap_or_default();
    (out, report, secs)
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let (first, report, secs) = run_verify(dir.path(), "first.csv");
    let stdout = String::from_utf8_lossy(&first.stdout).to_string();
    let records = parse_report(&report).unwrap_or_default();

    let mut lines: Vec<(usize, &str, Outcome)> = vec![(1, "normalization", criterion_1())];
    lines.push((2, "exact identities", criterion_2(&records)));
    lines.push((3, "variational definition", criterion_3(&records)));
    lines.push((4, "lpt minkowski inequality", criterion_4(&records)));
    lines.push((5, "mixed lp projection inequality", criterion_5(&records)));
    lines.push((6, "covariance identities", criterion_6(&records)));
    lines.push((7, "duality", criterion_7(&records)));
    lines.push((8, "classical battery", criterion_8(&records)));
    lines.push((9, "oracle cross-checks", criterion_9()));

    let (_, again, _) = run_verify(dir.path(), "second.csv");
    let failures = records.iter().filter(|r| r.verdict == Verdict::Violated || r.verdict == Verdict::Error).count();
    let clean = first.status.success() && stdout.contains("violations: 0\n") && failures == 0;
    let identical = !report.is_empty() && report == again;
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    lines.push((
        10,
        "full verify",
        outcome(
            clean && identical && secs < VERIFY_SECONDS,
            format!(
                "{} records, {failures} violations or errors, {secs:.0} s on {threads} thread(s), rerun byte-identical: {identical}",
                records.len()
            ),
        ),
    ));

    let mut failed = 0;
    for (n, name, o) in &lines {
        println!("criterion {n:>2} {name:<32} {}  {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", lines.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
