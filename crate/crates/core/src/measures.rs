//! Finitely supported measures on the unit sphere: surface area measures of
//! polytopes, mixed area measures by polarization, mixed L_p surface area
//! measures and the `μ ↦ μ^{(p)}` transform under a linear map.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::bodies::Polytope;
use crate::error::{expect_dim, GeomError, Result};
use crate::linalg::{LinMap, Vector};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub direction: Vector,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphericalMeasure {
    dim: usize,
    atoms: Vec<Atom>,
    positive: bool,
}

impl SphericalMeasure {
    pub fn new(dim: usize, atoms: Vec<Atom>, positive: bool) -> Result<SphericalMeasure> {
        for a in &atoms {
            expect_dim(dim, a.direction.dim())?;
            if !a.direction.is_unit() {
                return Err(GeomError::Domain(format!("atom direction {:?} is not a unit vector", a.direction)));
            }
            if !a.weight.is_finite() || (positive && a.weight < 0.0) {
                return Err(GeomError::Domain(format!("invalid atom weight {}", a.weight)));
            }
        }
        Ok(SphericalMeasure { dim, atoms, positive })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    pub fn max_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight.abs()).fold(0.0, f64::max)
    }

    /// `|Σ w_i v_i|`; vanishes for area measures.
    pub fn closedness_residual(&self) -> f64 {
        self.atoms
            .iter()
            .fold(Vector::zeros(self.dim), |acc, a| acc + a.direction * a.weight)
            .norm()
    }

    /// `Σ w_i f(v_i)` without checks; see [`integrate`].
    #[inline]
    pub fn sum<F: Fn(&Vector) -> f64>(&self, f: F) -> f64 {
        self.atoms.iter().map(|a| a.weight * f(&a.direction)).sum()
    }

    /// Atoms ordered lexicographically by direction.
    pub fn sorted(&self) -> SphericalMeasure {
        let mut atoms = self.atoms.clone();
        atoms.sort_by(|a, b| a.direction.lex_cmp(&b.direction));
        SphericalMeasure { atoms, ..self.clone() }
    }

    /// Scales every weight by `c > 0`.
    pub fn scaled(&self, c: f64) -> SphericalMeasure {
        let atoms = self.atoms.iter().map(|a| Atom { direction: a.direction, weight: a.weight * c }).collect();
        SphericalMeasure { atoms, ..self.clone() }
    }

    /// Dump rows: direction components then weight, 17 significant digits,
    /// lexicographic by direction.
    pub fn dump_rows(&self) -> String {
        let mut out = String::new();
        for a in self.sorted().atoms {
            let cols: Vec<String> = a
                .direction
                .coords()
                .iter()
                .chain(std::iter::once(&a.weight))
                // adding zero folds -0 into +0
                .map(|x| format!("{:.16e}", x + 0.0))
                .collect();
            out.push_str(&cols.join(","));
            out.push('\n');
        }
        out
    }

    /// Largest weight discrepancy against `other`, relative to the largest
    /// weight, after matching atoms by direction. Unmatched atoms count with
    /// their full weight.
    pub fn atomwise_distance(&self, other: &SphericalMeasure) -> f64 {
        let scale = self.max_weight().max(other.max_weight()).max(f64::MIN_POSITIVE);
        let mut used = vec![false; other.atoms.len()];
        let mut worst: f64 = 0.0;
        for a in &self.atoms {
            let best = other
                .atoms
                .iter()
                .enumerate()
                .filter(|(j, _)| !used[*j])
                .map(|(j, b)| (j, a.direction.distance(&b.direction)))
                .min_by(|x, y| x.1.total_cmp(&y.1));
            match best {
                Some((j, d)) if d <= tol::ATOM_MERGE * 10.0 => {
                    used[j] = true;
                    worst = worst.max((a.weight - other.atoms[j].weight).abs());
                }
                _ => worst = worst.max(a.weight.abs()),
            }
        }
        for (j, b) in other.atoms.iter().enumerate() {
            if !used[j] {
                worst = worst.max(b.weight.abs());
            }
        }
        worst / scale
    }
}

/// Sums signed atoms whose directions lie within [`tol::ATOM_MERGE`].
fn merge_raw(mut atoms: Vec<Atom>) -> Vec<Atom> {
    atoms.sort_by(|a, b| a.direction.lex_cmp(&b.direction));
    let mut merged: Vec<Atom> = Vec::new();
    for a in atoms {
        let mut hit = None;
        for (k, rep) in merged.iter().enumerate().rev() {
            if rep.direction[0] < a.direction[0] - tol::ATOM_MERGE {
                break;
            }
            if rep.direction.distance(&a.direction) <= tol::ATOM_MERGE {
                hit = Some(k);
                break;
            }
        }
        match hit {
            Some(k) => merged[k].weight += a.weight,
            None => merged.push(a),
        }
    }
    merged
}

/// Merges signed atoms, drops cancelled ones and enforces positivity.
fn merge_signed(dim: usize, atoms: Vec<Atom>, scale: f64) -> Result<SphericalMeasure> {
    let mut out = Vec::with_capacity(atoms.len());
    for a in merge_raw(atoms) {
        if a.weight < -tol::POSITIVITY * scale {
            return Err(GeomError::NegativeWeight { weight: a.weight });
        }
        if a.weight > tol::DROP * scale {
            out.push(a);
        }
    }
    SphericalMeasure::new(dim, out, true)
}

/// `S_P`: one atom per facet.
pub fn area_measure(p: &Polytope) -> SphericalMeasure {
    let atoms = p.facets().iter().map(|f| Atom { direction: f.normal, weight: f.measure }).collect();
    SphericalMeasure { dim: p.dim(), atoms, positive: true }
}

/// `S(K_1, …, K_{n-1}; ·)` by polarization:
/// `(1/(n-1)!) Σ_{∅≠J} (-1)^{n-1-|J|} S_{Σ_J K_j}`.
pub fn mixed_area_measure(bodies: &[&Polytope]) -> Result<SphericalMeasure> {
    let n = bodies.first().map(|b| b.dim()).ok_or(GeomError::DimensionMismatch { expected: 1, found: 0 })?;
    if bodies.len() != n - 1 {
        return Err(GeomError::DimensionMismatch { expected: n - 1, found: bodies.len() });
    }
    for b in bodies {
        expect_dim(n, b.dim())?;
    }
    if bodies.iter().all(|b| *b == bodies[0]) {
        return Ok(area_measure(bodies[0]));
    }
    let (signed, scale) = polarize(bodies)?;
    merge_signed(n, signed, scale)
}

/// Signed facet atoms of the polarization sum and the largest weight.
fn polarize(bodies: &[&Polytope]) -> Result<(Vec<Atom>, f64)> {
    let k = bodies.len();
    let factorial: f64 = (1..=k).map(|i| i as f64).product();
    let mut signed = Vec::new();
    let mut scale: f64 = 0.0;
    let mut sums: HashMap<usize, Polytope> = HashMap::new();
    for mask in 1usize..(1 << k) {
        let members: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        let body = if members.len() == 1 {
            bodies[members[0]].clone()
        } else {
            let rest = mask & !(1 << members[members.len() - 1]);
            let base = match sums.get(&rest) {
                Some(b) => b.clone(),
                None => bodies[rest.trailing_zeros() as usize].clone(),
            };
            base.minkowski_sum(bodies[members[members.len() - 1]])?
        };
        let sign = if (k - members.len()) % 2 == 0 { 1.0 } else { -1.0 };
        for f in body.facets() {
            scale = scale.max(f.measure / factorial);
            signed.push(Atom { direction: f.normal, weight: sign * f.measure / factorial });
        }
        sums.insert(mask, body);
    }
    Ok((signed, scale))
}

/// Smallest merged atom weight of the polarization sum for
/// `S(K_1, …, K_{n-1}; ·)`, before clamping and dropping.
pub fn polarization_min_weight(bodies: &[&Polytope]) -> Result<f64> {
    let n = bodies.first().map(|b| b.dim()).ok_or(GeomError::DimensionMismatch { expected: 1, found: 0 })?;
    if bodies.len() != n - 1 {
        return Err(GeomError::DimensionMismatch { expected: n - 1, found: bodies.len() });
    }
    let (signed, _) = polarize(bodies)?;
    Ok(merge_raw(signed).iter().map(|a| a.weight).fold(f64::INFINITY, f64::min))
}

/// `S(K, t; Q, n-1-t; ·)`.
pub fn repeated_mixed_area_measure(k: &Polytope, t: usize, q: &Polytope) -> Result<SphericalMeasure> {
    let n = k.dim();
    expect_dim(n, q.dim())?;
    if t > n - 1 {
        return Err(GeomError::OutOfRange(format!("multiplicity t = {t} exceeds n - 1 = {}", n - 1)));
    }
    let mut list: Vec<&Polytope> = vec![k; t];
    list.extend(std::iter::repeat_n(q, n - 1 - t));
    mixed_area_measure(&list)
}

/// `S_p(K, ·) = h_K^{1-p} S_K`.
pub fn lp_surface_measure(k: &Polytope, p: f64) -> Result<SphericalMeasure> {
    check_p(p)?;
    k.require_origin_interior()?;
    let atoms = k
        .facets()
        .iter()
        .map(|f| Atom { direction: f.normal, weight: f.offset.powf(1.0 - p) * f.measure })
        .collect();
    Ok(SphericalMeasure { dim: k.dim(), atoms, positive: true })
}

/// `dS_{p,t}(K, Q; ·) = h_K^{1-p} dS(K, t; Q, n-1-t; ·)`.
pub fn lp_mixed_surface_measure(k: &Polytope, q: &Polytope, p: f64, t: usize) -> Result<SphericalMeasure> {
    check_p(p)?;
    k.require_origin_interior()?;
    let base = repeated_mixed_area_measure(k, t, q)?;
    let atoms = base
        .atoms
        .iter()
        .map(|a| Atom { direction: a.direction, weight: k.h(&a.direction).powf(1.0 - p) * a.weight })
        .collect();
    Ok(SphericalMeasure { dim: base.dim, atoms, positive: true })
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(GeomError::Domain(format!("p must be >= 1, got {p}")))
    }
}

/// The measure `μ^{(p)}(φ ·)`: atom `(v, w)` becomes
/// `(⟨φ^{-1}v⟩, |φ^{-1}v|^p w)`.
pub fn transform_measure_p(mu: &SphericalMeasure, phi: &LinMap, p: f64) -> Result<SphericalMeasure> {
    expect_dim(mu.dim, phi.dim())?;
    if !(p > 0.0) {
        return Err(GeomError::Domain(format!("transform exponent must be positive, got {p}")));
    }
    let inv = phi.inverse()?;
    let atoms = mu
        .atoms
        .iter()
        .map(|a| {
            let y = inv.apply(&a.direction);
            let r = y.norm();
            Atom { direction: y * (1.0 / r), weight: r.powf(p) * a.weight }
        })
        .collect();
    Ok(SphericalMeasure { dim: mu.dim, atoms, positive: mu.positive })
}

/// `∫ f dμ = Σ w_i f(v_i)`; fails if `f` is not finite at an atom.
pub fn integrate<F: Fn(&Vector) -> f64>(f: F, mu: &SphericalMeasure) -> Result<f64> {
    let mut acc = 0.0;
    for a in &mu.atoms {
        let v = f(&a.direction);
        if !v.is_finite() {
            return Err(GeomError::Domain(format!("integrand undefined at {:?}", a.direction)));
        }
        acc += a.weight * v;
    }
    Ok(acc)
}
