//! Incremental convex hull in general (small) dimension.
//!
//! The builder maintains simplicial boundary cells (n vertices each) and
//! inserts points one at a time: cells visible from the new point are
//! removed and the horizon ridges are coned to it. After all insertions the
//! coplanar adjacent cells are merged into maximal facets and non-extreme
//! points are pruned from the vertex list. The simplicial cells survive as
//! an integration mesh for volume and centroid.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::{self, dot};
use crate::scalar::Real;

/// Output of the hull construction, consumed by `body`.
pub(crate) struct HullData<T> {
    /// Extreme points, lexicographically sorted.
    pub vertices: Vec<Vec<T>>,
    /// Maximal facets: unit outward normal, offset, indices into `vertices`.
    pub facets: Vec<RawFacet<T>>,
    /// Coordinate pool for the integration mesh.
    pub mesh_points: Vec<Vec<T>>,
    /// Simplicial boundary cells (indices into `mesh_points`, n per cell).
    pub cells: Vec<Vec<usize>>,
}

pub(crate) struct RawFacet<T> {
    pub normal: Vec<T>,
    pub offset: T,
    pub vertices: Vec<usize>,
}

struct Cell<T> {
    verts: Vec<usize>,
    normal: Vec<T>,
    offset: T,
    alive: bool,
}

/// Builds the hull of `points` in ambient dimension `dim >= 1`.
pub(crate) fn build<T: Real>(points: &[Vec<T>], dim: usize) -> Result<HullData<T>> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    for p in points {
        if p.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
        }
        if p.iter().any(|c| !c.is_finite()) {
            return Err(Error::DegenerateInput("non-finite coordinate".into()));
        }
    }
    let scale = points
        .iter()
        .flat_map(|p| p.iter())
        .fold(T::one(), |m, &c| m.max(c.abs()));
    let pts = dedup_points(points, T::of(1e-12) * scale);
    if pts.len() < dim + 1 {
        return Err(Error::DegenerateInput(format!(
            "{} distinct points cannot span dimension {}",
            pts.len(),
            dim
        )));
    }
    if dim == 1 {
        return build_1d(&pts);
    }
    let eps = T::of(1e-9) * scale;

    let simplex = initial_simplex(&pts, dim, eps)?;
    let mut interior = vec![T::zero(); dim];
    for &i in &simplex {
        linalg::axpy(&mut interior, T::one(), &pts[i]);
    }
    let inv = T::one() / T::of((dim + 1) as f64);
    for c in interior.iter_mut() {
        *c *= inv;
    }

    let mut cells: Vec<Cell<T>> = Vec::new();
    for omit in 0..simplex.len() {
        let verts: Vec<usize> = simplex
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != omit)
            .map(|(_, &i)| i)
            .collect();
        cells.push(make_cell(&pts, verts, &interior)?);
    }

    let in_simplex = |i: usize| simplex.contains(&i);
    for p_idx in 0..pts.len() {
        if in_simplex(p_idx) {
            continue;
        }
        insert_point(&mut cells, &pts, p_idx, &interior, eps)?;
    }

    finish(&pts, cells, eps, scale, dim)
}

fn dedup_points<T: Real>(points: &[Vec<T>], tol: T) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = Vec::with_capacity(points.len());
    for p in points {
        if !out.iter().any(|q| linalg::dist(p, q) <= tol) {
            out.push(p.clone());
        }
    }
    out
}

fn build_1d<T: Real>(pts: &[Vec<T>]) -> Result<HullData<T>> {
    let mut lo = 0usize;
    let mut hi = 0usize;
    for (i, p) in pts.iter().enumerate() {
        if p[0] < pts[lo][0] {
            lo = i;
        }
        if p[0] > pts[hi][0] {
            hi = i;
        }
    }
    if pts[hi][0] - pts[lo][0] <= T::zero() {
        return Err(Error::DegenerateInput("segment has zero length".into()));
    }
    let vertices = vec![pts[lo].clone(), pts[hi].clone()];
    let facets = vec![
        RawFacet { normal: vec![-T::one()], offset: -pts[lo][0], vertices: vec![0] },
        RawFacet { normal: vec![T::one()], offset: pts[hi][0], vertices: vec![1] },
    ];
    Ok(HullData {
        mesh_points: vertices.clone(),
        cells: vec![vec![0], vec![1]],
        vertices,
        facets,
    })
}

/// Greedy selection of `dim + 1` affinely independent points.
fn initial_simplex<T: Real>(pts: &[Vec<T>], dim: usize, eps: T) -> Result<Vec<usize>> {
    let mut chosen = vec![0usize];
    let mut basis: Vec<Vec<T>> = Vec::new();
    while chosen.len() < dim + 1 {
        let origin = &pts[chosen[0]];
        let mut best = None;
        let mut best_res = eps;
        for (i, p) in pts.iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            let mut r = linalg::sub(p, origin);
            for b in &basis {
                let c = dot(&r, b);
                linalg::axpy(&mut r, -c, b);
            }
            let res = linalg::norm(&r);
            if res > best_res {
                best_res = res;
                best = Some((i, r));
            }
        }
        match best {
            Some((i, r)) => {
                chosen.push(i);
                basis.push(linalg::scale(&r, T::one() / linalg::norm(&r)));
            }
            None => {
                return Err(Error::DegenerateInput(format!(
                    "points span only {} of {} dimensions",
                    chosen.len() - 1,
                    dim
                )))
            }
        }
    }
    Ok(chosen)
}

/// Supporting hyperplane through `verts`, oriented away from `interior`.
fn make_cell<T: Real>(pts: &[Vec<T>], verts: Vec<usize>, interior: &[T]) -> Result<Cell<T>> {
    let dim = interior.len();
    let anchor = &pts[verts[0]];
    let edges: Vec<Vec<T>> = verts[1..].iter().map(|&v| linalg::sub(&pts[v], anchor)).collect();
    let basis = linalg::orthonormalize(&edges, T::of(1e-12));
    if basis.len() != dim - 1 {
        return Err(Error::DegenerateInput("degenerate boundary cell".into()));
    }
    let mut normal = linalg::orthogonal_complement_unit(&basis, dim)
        .ok_or_else(|| Error::DegenerateInput("cannot complete facet normal".into()))?;
    let mut offset = dot(&normal, anchor);
    if dot(&normal, interior) > offset {
        for c in normal.iter_mut() {
            *c = -*c;
        }
        offset = -offset;
    }
    Ok(Cell { verts, normal, offset, alive: true })
}

fn sorted_ridge(verts: &[usize], omit: usize) -> Vec<usize> {
    let mut r: Vec<usize> = verts
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != omit)
        .map(|(_, &v)| v)
        .collect();
    r.sort_unstable();
    r
}

fn insert_point<T: Real>(
    cells: &mut Vec<Cell<T>>,
    pts: &[Vec<T>],
    p_idx: usize,
    interior: &[T],
    eps: T,
) -> Result<()> {
    let p = &pts[p_idx];
    let visible: Vec<usize> = cells
        .iter()
        .enumerate()
        .filter(|(_, c)| c.alive && dot(&c.normal, p) > c.offset + eps)
        .map(|(i, _)| i)
        .collect();
    if visible.is_empty() {
        return Ok(()); // interior or on the boundary: not extreme
    }

    // ridge -> alive cells sharing it
    let mut ridge_map: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for (ci, cell) in cells.iter().enumerate() {
        if !cell.alive {
            continue;
        }
        for omit in 0..cell.verts.len() {
            ridge_map.entry(sorted_ridge(&cell.verts, omit)).or_default().push(ci);
        }
    }

    let is_visible = |ci: usize| visible.contains(&ci);
    let mut new_cells: Vec<Cell<T>> = Vec::new();
    for &ci in &visible {
        let verts = cells[ci].verts.clone();
        for omit in 0..verts.len() {
            let ridge = sorted_ridge(&verts, omit);
            let owners = &ridge_map[&ridge];
            // A ridge of a closed boundary belongs to exactly two cells; it
            // is on the horizon when the neighbor is hidden.
            let on_horizon = owners.iter().filter(|&&o| !is_visible(o)).count() == 1
                && owners.len() == 2;
            if on_horizon {
                let mut cv = ridge.clone();
                cv.push(p_idx);
                new_cells.push(make_cell(pts, cv, interior)?);
            }
        }
    }
    if new_cells.is_empty() {
        return Err(Error::DegenerateInput(
            "hull update produced no horizon; input is numerically degenerate".into(),
        ));
    }
    for &ci in &visible {
        cells[ci].alive = false;
    }
    cells.extend(new_cells);
    Ok(())
}

/// Merges coplanar adjacent cells, prunes non-extreme points, canonicalizes.
fn finish<T: Real>(
    pts: &[Vec<T>],
    cells: Vec<Cell<T>>,
    eps: T,
    scale: T,
    dim: usize,
) -> Result<HullData<T>> {
    let alive: Vec<&Cell<T>> = cells.iter().filter(|c| c.alive).collect();

    // Union-find over alive cells; adjacency via shared ridges.
    let mut parent: Vec<usize> = (0..alive.len()).collect();
    fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut ridge_map: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for (ci, cell) in alive.iter().enumerate() {
        for omit in 0..cell.verts.len() {
            ridge_map.entry(sorted_ridge(&cell.verts, omit)).or_default().push(ci);
        }
    }
    let angle_tol = T::of(1e-10);
    for owners in ridge_map.values() {
        if owners.len() != 2 {
            continue;
        }
        let (a, b) = (owners[0], owners[1]);
        let coplanar = dot(&alive[a].normal, &alive[b].normal) >= T::one() - angle_tol
            && (alive[a].offset - alive[b].offset).abs() <= eps;
        if coplanar {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
            }
        }
    }

    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..alive.len() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }

    // Candidate vertices: everything still referenced by an alive cell.
    let mut used: Vec<usize> = alive.iter().flat_map(|c| c.verts.iter().copied()).collect();
    used.sort_unstable();
    used.dedup();

    // Merged facet planes.
    struct Plane<T> {
        normal: Vec<T>,
        offset: T,
    }
    let mut planes: Vec<Plane<T>> = Vec::new();
    for members in groups.values() {
        let mut normal = vec![T::zero(); dim];
        for &m in members {
            linalg::axpy(&mut normal, T::one(), &alive[m].normal);
        }
        let normal = linalg::normalized(&normal)
            .ok_or_else(|| Error::DegenerateInput("facet normal vanished".into()))?;
        let mut verts: Vec<usize> = members.iter().flat_map(|&m| alive[m].verts.iter().copied()).collect();
        verts.sort_unstable();
        verts.dedup();
        let offset = verts.iter().map(|&v| dot(&normal, &pts[v])).sum::<T>()
            / T::of(verts.len() as f64);
        planes.push(Plane { normal, offset });
    }

    // Extremality: a point is a vertex iff its active facet normals span R^dim.
    let on_tol = T::of(1e-8) * scale;
    let mut kept: Vec<usize> = Vec::new();
    for &v in &used {
        let active: Vec<Vec<T>> = planes
            .iter()
            .filter(|pl| (dot(&pl.normal, &pts[v]) - pl.offset).abs() <= on_tol)
            .map(|pl| pl.normal.clone())
            .collect();
        if linalg::orthonormalize(&active, T::of(1e-6)).len() == dim {
            kept.push(v);
        }
    }
    if kept.len() < dim + 1 {
        return Err(Error::DegenerateInput("hull collapsed during pruning".into()));
    }

    // Canonical vertex order: lexicographic.
    let mut vertices: Vec<Vec<T>> = kept.iter().map(|&v| pts[v].clone()).collect();
    let mut order: Vec<usize> = (0..vertices.len()).collect();
    order.sort_by(|&a, &b| lex_cmp(&vertices[a], &vertices[b]));
    vertices = order.iter().map(|&i| vertices[i].clone()).collect();

    let mut facets: Vec<RawFacet<T>> = planes
        .iter()
        .map(|pl| {
            let verts: Vec<usize> = vertices
                .iter()
                .enumerate()
                .filter(|(_, v)| (dot(&pl.normal, v) - pl.offset).abs() <= on_tol)
                .map(|(i, _)| i)
                .collect();
            RawFacet { normal: pl.normal.clone(), offset: pl.offset, vertices: verts }
        })
        .collect();
    facets.sort_by(|a, b| lex_cmp(&a.normal, &b.normal).then(cmp_t(a.offset, b.offset)));
    for f in &facets {
        if f.vertices.len() < dim {
            return Err(Error::DegenerateInput("facet lost its supporting vertices".into()));
        }
    }

    // Integration mesh keeps the simplicial cells (their points may include
    // boundary points that were pruned from the public vertex list).
    let mut mesh_index: HashMap<usize, usize> = HashMap::new();
    let mut mesh_points: Vec<Vec<T>> = Vec::new();
    let mut mesh_cells: Vec<Vec<usize>> = Vec::new();
    for cell in &alive {
        let c: Vec<usize> = cell
            .verts
            .iter()
            .map(|&v| {
                *mesh_index.entry(v).or_insert_with(|| {
                    mesh_points.push(pts[v].clone());
                    mesh_points.len() - 1
                })
            })
            .collect();
        mesh_cells.push(c);
    }

    Ok(HullData { vertices, facets, mesh_points, cells: mesh_cells })
}

fn cmp_t<T: Real>(a: T, b: T) -> std::cmp::Ordering {
    a.partial_cmp(&b).unwrap_or(std::cmp::Ordering::Equal)
}

pub(crate) fn lex_cmp<T: Real>(a: &[T], b: &[T]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(std::cmp::Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    std::cmp::Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hull2(points: &[[f64; 2]]) -> HullData<f64> {
        build(&points.iter().map(|p| p.to_vec()).collect::<Vec<_>>(), 2).unwrap()
    }

    #[test]
    fn square_from_corners_and_clutter() {
        let h = hull2(&[
            [0.0, 0.0],
            [1.0, 0.0],
            [0.5, 0.5],  // interior
            [1.0, 1.0],
            [0.0, 1.0],
            [0.5, 0.0],  // edge midpoint: on boundary, not extreme
        ]);
        assert_eq!(h.vertices.len(), 4);
        assert_eq!(h.facets.len(), 4);
        for f in &h.facets {
            assert!((linalg::norm(&f.normal) - 1.0).abs() < 1e-12);
            assert_eq!(f.vertices.len(), 2);
        }
    }

    #[test]
    fn cube_merges_to_six_facets() {
        let mut pts = Vec::new();
        for x in [0.0, 1.0] {
            for y in [0.0, 1.0] {
                for z in [0.0, 1.0] {
                    pts.push(vec![x, y, z]);
                }
            }
        }
        let h = build(&pts, 3).unwrap();
        assert_eq!(h.vertices.len(), 8);
        assert_eq!(h.facets.len(), 6);
        for f in &h.facets {
            assert_eq!(f.vertices.len(), 4);
        }
        assert_eq!(h.cells.len(), 12);
    }

    #[test]
    fn collinear_point_in_seed_simplex_is_pruned() {
        // (1, 0) sits on the bottom edge and participates in early cells.
        let h = hull2(&[[0.0, 0.0], [1.0, 0.0], [1.0, 2.0], [2.0, 0.0]]);
        assert_eq!(h.vertices.len(), 3);
        assert!(!h.vertices.iter().any(|v| v == &vec![1.0, 0.0]));
        // bottom edge merged from two collinear cells
        assert_eq!(h.facets.len(), 3);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let flat = build(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]], 2);
        assert!(matches!(flat, Err(Error::DegenerateInput(_))));
        let few = build(&[vec![0.0, 0.0], vec![1.0, 1.0]], 2);
        assert!(matches!(few, Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn segment_in_1d() {
        let h = build(&[vec![3.0], vec![-1.0], vec![0.5]], 1).unwrap();
        assert_eq!(h.vertices, vec![vec![-1.0], vec![3.0]]);
        assert_eq!(h.facets.len(), 2);
    }
}
