//! Convex hulls in the plane (monotone chain) and in space (incremental
//! beneath-beyond with epsilon predicates and coplanar merging).

use std::collections::HashMap;

use crate::bodies::polytope::{Facet, Polytope};
use crate::error::{check_dim, GeomError, Result};
use crate::linalg::Vector;
use crate::tol;

/// Convex hull of `points` in dimension `n`.
///
/// Facets carry outward unit normals, offsets and exact `(n-1)`-measures;
/// coplanar triangles are merged. Hull vertices keep the input order.
pub fn convex_hull(points: &[Vector], n: usize) -> Result<Polytope> {
    check_dim(n)?;
    if let Some(p) = points.iter().find(|p| p.dim() != n) {
        return Err(GeomError::DimensionMismatch { expected: n, found: p.dim() });
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(GeomError::Domain("non-finite point".into()));
    }
    if points.len() < n + 1 {
        return Err(GeomError::Degenerate(format!("{} points cannot span dimension {n}", points.len())));
    }
    match n {
        2 => hull_2d(points),
        _ => hull_3d(points),
    }
}

fn extent(points: &[Vector]) -> f64 {
    let n = points[0].dim();
    let c = points.iter().fold(Vector::zeros(n), |acc, p| acc + *p) * (1.0 / points.len() as f64);
    let r = points.iter().map(|p| p.distance(&c)).fold(0.0, f64::max);
    // Coordinates far from the origin limit absolute precision too.
    r.max(points.iter().map(|p| p.norm()).fold(0.0, f64::max) * 1e-3).max(f64::MIN_POSITIVE)
}

fn hull_2d(points: &[Vector]) -> Result<Polytope> {
    let scale = extent(points);
    let eps = tol::HULL_EPS * scale * scale;
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].lex_cmp(&points[b]).then(a.cmp(&b)));
    order.dedup_by(|a, b| points[*a] == points[*b]);
    let cross = |o: usize, a: usize, b: usize| {
        let (o, a, b) = (points[o], points[a], points[b]);
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut lower: Vec<usize> = Vec::new();
    for &i in &order {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], i) <= eps {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in order.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], i) <= eps {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    let ring: Vec<usize> = lower.into_iter().chain(upper).collect();
    if ring.len() < 3 {
        return Err(GeomError::Degenerate("points are collinear".into()));
    }
    let mut facets = Vec::with_capacity(ring.len());
    for k in 0..ring.len() {
        let a = points[ring[k]];
        let b = points[ring[(k + 1) % ring.len()]];
        let d = b - a;
        let len = d.norm();
        let normal = Vector::new2(d[1] / len, -d[0] / len);
        let offset = 0.5 * (normal.dot(&a) + normal.dot(&b));
        facets.push(Facet { normal, offset, measure: len });
    }
    let area: f64 = facets.iter().map(|f| f.offset * f.measure).sum::<f64>() / 2.0;
    if area <= tol::HULL_EPS * scale * scale {
        return Err(GeomError::Degenerate("hull has no interior".into()));
    }
    let mut keep = ring.clone();
    keep.sort_unstable();
    let vertices = keep.into_iter().map(|i| points[i]).collect();
    Polytope::from_parts(2, vertices, facets)
}

struct Face {
    v: [usize; 3],
    normal: Vector,
    offset: f64,
    alive: bool,
}

impl Face {
    fn new(points: &[Vector], v: [usize; 3]) -> Face {
        let (a, b, c) = (points[v[0]], points[v[1]], points[v[2]]);
        let normal = (b - a).cross(&(c - a));
        Face { v, normal, offset: normal.dot(&a), alive: true }
    }

    fn height(&self, p: &Vector) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

fn hull_3d(points: &[Vector]) -> Result<Polytope> {
    let scale = extent(points);
    let eps = tol::HULL_EPS * scale;
    let degenerate = 1e-10 * scale;

    // initial tetrahedron
    let i0 = (0..points.len()).min_by(|&a, &b| points[a].lex_cmp(&points[b])).unwrap();
    let far = |f: &dyn Fn(&Vector) -> f64| -> (usize, f64) {
        (0..points.len())
            .map(|i| (i, f(&points[i])))
            .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
    };
    let (i1, d1) = far(&|p| p.distance(&points[i0]));
    if d1 <= degenerate {
        return Err(GeomError::Degenerate("all points coincide".into()));
    }
    let axis = (points[i1] - points[i0]) * (1.0 / d1);
    let (i2, d2) = far(&|p| (*p - points[i0]).cross(&axis).norm());
    if d2 <= degenerate {
        return Err(GeomError::Degenerate("points are collinear".into()));
    }
    let plane = (points[i1] - points[i0]).cross(&(points[i2] - points[i0])).normalized()?;
    let (i3, d3) = far(&|p| plane.dot(&(*p - points[i0])).abs());
    if d3 <= degenerate {
        return Err(GeomError::Degenerate("points are coplanar".into()));
    }

    let inner = (points[i0] + points[i1] + points[i2] + points[i3]) * 0.25;
    let mut faces: Vec<Face> = Vec::new();
    for v in [[i0, i1, i2], [i0, i3, i1], [i1, i3, i2], [i2, i3, i0]] {
        let mut f = Face::new(points, v);
        if f.height(&inner) > 0.0 {
            f = Face::new(points, [v[0], v[2], v[1]]);
        }
        faces.push(f);
    }

    let mut edge_face: HashMap<(usize, usize), usize> = HashMap::new();
    for (fi, f) in faces.iter().enumerate() {
        for k in 0..3 {
            edge_face.insert((f.v[k], f.v[(k + 1) % 3]), fi);
        }
    }
    let seeds = [i0, i1, i2, i3];
    let mut visible: Vec<usize> = Vec::new();
    let mut mark: Vec<bool> = vec![false; faces.len()];
    for (pi, p) in points.iter().enumerate() {
        if seeds.contains(&pi) {
            continue;
        }
        let above = |f: &Face| f.height(p) > eps * f.normal.norm();
        let Some(start) = faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.alive && above(f))
            .max_by(|a, b| (a.1.height(p) / a.1.normal.norm()).total_cmp(&(b.1.height(p) / b.1.normal.norm())))
            .map(|(i, _)| i)
        else {
            continue;
        };
        // The visible region is the connected set of faces around the most
        // visible one, which keeps the horizon a single cycle.
        visible.clear();
        mark.resize(faces.len(), false);
        visible.push(start);
        mark[start] = true;
        let mut k = 0;
        while k < visible.len() {
            let v = faces[visible[k]].v;
            for e in 0..3 {
                let g = edge_face[&(v[(e + 1) % 3], v[e])];
                if !mark[g] && above(&faces[g]) {
                    mark[g] = true;
                    visible.push(g);
                }
            }
            k += 1;
        }
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        for &fi in &visible {
            let v = faces[fi].v;
            for e in 0..3 {
                let (a, b) = (v[e], v[(e + 1) % 3]);
                if !mark[edge_face[&(b, a)]] {
                    horizon.push((a, b));
                }
            }
        }
        for &fi in &visible {
            faces[fi].alive = false;
            mark[fi] = false;
        }
        for (a, b) in horizon {
            let f = Face::new(points, [a, b, pi]);
            let fi = faces.len();
            edge_face.insert((a, b), fi);
            edge_face.insert((b, pi), fi);
            edge_face.insert((pi, a), fi);
            faces.push(f);
            mark.push(false);
        }
    }

    let tris: Vec<&Face> = faces.iter().filter(|f| f.alive).collect();
    merge_triangles(points, &tris, scale)
}

/// Groups hull triangles into facets. Regions grow from the largest
/// triangles and accept a neighbour only if its vertices lie within
/// [`tol::COPLANAR_EPS`] of the seed plane, so merging cannot drift.
fn merge_triangles(points: &[Vector], tris: &[&Face], scale: f64) -> Result<Polytope> {
    let coplanar = tol::COPLANAR_EPS * scale;
    let mut by_edge: HashMap<(usize, usize), usize> = HashMap::new();
    for (ti, t) in tris.iter().enumerate() {
        for k in 0..3 {
            by_edge.insert((t.v[k], t.v[(k + 1) % 3]), ti);
        }
    }
    for t in tris {
        for k in 0..3 {
            if !by_edge.contains_key(&(t.v[(k + 1) % 3], t.v[k])) {
                return Err(GeomError::Degenerate("hull surface is not closed".into()));
            }
        }
    }
    let mut order: Vec<usize> = (0..tris.len()).collect();
    order.sort_by(|&a, &b| tris[b].normal.norm().total_cmp(&tris[a].normal.norm()).then(a.cmp(&b)));
    let mut group_of = vec![usize::MAX; tris.len()];
    let mut groups: Vec<(Vector, Vec<usize>)> = Vec::new();
    for &seed in &order {
        if group_of[seed] != usize::MAX {
            continue;
        }
        let gi = groups.len();
        let reference = tris[seed];
        let unit = reference.normal * (1.0 / reference.normal.norm().max(f64::MIN_POSITIVE));
        let base = unit.dot(&points[reference.v[0]]);
        let mut area = Vector::zeros(3);
        let mut verts = Vec::new();
        let mut stack = vec![seed];
        group_of[seed] = gi;
        while let Some(ti) = stack.pop() {
            let t = tris[ti];
            area = area + t.normal * 0.5;
            verts.extend_from_slice(&t.v);
            for k in 0..3 {
                let tj = by_edge[&(t.v[(k + 1) % 3], t.v[k])];
                if group_of[tj] != usize::MAX || tris[tj].normal.dot(&unit) <= 0.0 {
                    continue;
                }
                if tris[tj].v.iter().all(|&v| (unit.dot(&points[v]) - base).abs() <= coplanar) {
                    group_of[tj] = gi;
                    stack.push(tj);
                }
            }
        }
        groups.push((area, verts));
    }

    let mut facets = Vec::with_capacity(groups.len());
    let mut incidence: HashMap<usize, usize> = HashMap::new();
    for (area_vec, mut verts) in groups {
        verts.sort_unstable();
        verts.dedup();
        let measure = area_vec.norm();
        if measure <= f64::MIN_POSITIVE {
            continue;
        }
        let normal = area_vec * (1.0 / measure);
        let offset = verts.iter().map(|&v| normal.dot(&points[v])).fold(f64::NEG_INFINITY, f64::max);
        for v in verts {
            *incidence.entry(v).or_insert(0) += 1;
        }
        facets.push(Facet { normal, offset, measure });
    }
    let mut keep: Vec<usize> = incidence.into_iter().filter(|&(_, c)| c >= 3).map(|(v, _)| v).collect();
    keep.sort_unstable();
    let vertices = keep.into_iter().map(|i| points[i]).collect();
    Polytope::from_parts(3, vertices, facets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Vector> {
        vec![Vector::new2(-1.0, -1.0), Vector::new2(1.0, -1.0), Vector::new2(1.0, 1.0), Vector::new2(-1.0, 1.0)]
    }

    fn cube_points() -> Vec<Vector> {
        let mut pts = Vec::new();
        for &x in &[-1.0, 1.0] {
            for &y in &[-1.0, 1.0] {
                for &z in &[-1.0, 1.0] {
                    pts.push(Vector::new3(x, y, z));
                }
            }
        }
        pts
    }

    #[test]
    fn square_has_four_unit_facets() {
        let p = convex_hull(&square(), 2).unwrap();
        assert_eq!(p.facets().len(), 4);
        assert!(p.facets().iter().all(|f| (f.measure - 2.0).abs() < 1e-15 && (f.offset - 1.0).abs() < 1e-15));
        assert_eq!(p.vertices().len(), 4);
    }

    #[test]
    fn cube_merges_coplanar_triangles() {
        let mut pts = cube_points();
        // interior and face-interior points must not survive
        pts.push(Vector::new3(0.0, 0.0, 0.0));
        pts.push(Vector::new3(1.0, 0.2, -0.3));
        let p = convex_hull(&pts, 3).unwrap();
        assert_eq!(p.facets().len(), 6);
        for f in p.facets() {
            assert!((f.measure - 4.0).abs() < 1e-12);
            assert!((f.offset - 1.0).abs() < 1e-12);
        }
        assert_eq!(p.vertices().len(), 8);
    }

    #[test]
    fn collinear_and_coplanar_inputs_are_degenerate() {
        let line: Vec<Vector> = (0..5).map(|i| Vector::new2(i as f64, 2.0 * i as f64)).collect();
        assert!(matches!(convex_hull(&line, 2), Err(GeomError::Degenerate(_))));
        let flat: Vec<Vector> = (0..6).map(|i| Vector::new3(i as f64, (i * i) as f64, 0.0)).collect();
        assert!(matches!(convex_hull(&flat, 3), Err(GeomError::Degenerate(_))));
        assert!(convex_hull(&square()[..2], 2).is_err());
    }

    #[test]
    fn mixed_dimensions_rejected() {
        let pts = vec![Vector::new2(0.0, 0.0), Vector::new3(1.0, 0.0, 0.0), Vector::new2(0.0, 1.0)];
        assert!(matches!(convex_hull(&pts, 2), Err(GeomError::DimensionMismatch { .. })));
    }
}
