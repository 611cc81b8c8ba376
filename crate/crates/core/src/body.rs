//! Convex bodies as polytopes: vertex representation with derived facets.
//!
//! A `ConvexBody` is built once from a point cloud and is immutable
//! afterwards; volume, centroid, diameter, and the boundary triangulation
//! are computed eagerly at construction so that repeated queries are cheap
//! and bitwise reproducible. Exact transform paths (translate, rotate,
//! uniform scale) update all derived data algebraically; general affine
//! images rebuild the hull from the mapped vertices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hull::{self, lex_cmp};
use crate::linalg::{self, dot, Matrix};
use crate::scalar::Real;

/// A point of R^n. Coordinates are finite and non-empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point<T>(pub Vec<T>);

impl<T: Real> Point<T> {
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidParameter("point needs at least one coordinate".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("point has a non-finite coordinate".into()));
        }
        Ok(Point(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }
}

impl<T> std::ops::Deref for Point<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

/// Supporting half-space `{ x : <normal, x> <= offset }` with unit outward
/// normal; `vertices` indexes the body vertices lying on the hyperplane.
#[derive(Clone, Debug)]
pub struct Facet<T> {
    pub normal: Point<T>,
    pub offset: T,
    pub vertices: Vec<usize>,
}

/// Invertible affine map `x -> linear * x + translation`.
#[derive(Clone, Debug)]
pub struct AffineMap<T> {
    linear: Matrix<T>,
    translation: Vec<T>,
}

impl<T: Real> AffineMap<T> {
    /// Validates shape and invertibility (`|det| > 1e-12`).
    pub fn new(linear: Matrix<T>, translation: Vec<T>) -> Result<Self> {
        if !linear.is_square() || linear.rows() != translation.len() {
            return Err(Error::DimensionMismatch {
                expected: linear.rows(),
                got: translation.len(),
            });
        }
        let det = linear.det();
        if det.abs() <= T::of(1e-12) {
            return Err(Error::SingularMap { det: det.to_f64_lossy() });
        }
        Ok(AffineMap { linear, translation })
    }

    pub fn identity(dim: usize) -> Self {
        AffineMap { linear: Matrix::identity(dim), translation: vec![T::zero(); dim] }
    }

    pub fn translation_by(t: &[T]) -> Self {
        AffineMap { linear: Matrix::identity(t.len()), translation: t.to_vec() }
    }

    pub fn dim(&self) -> usize {
        self.linear.rows()
    }

    pub fn linear(&self) -> &Matrix<T> {
        &self.linear
    }

    pub fn translation(&self) -> &[T] {
        &self.translation
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let mut y = self.linear.matvec(x);
        linalg::axpy(&mut y, T::one(), &self.translation);
        y
    }

    pub fn det(&self) -> T {
        self.linear.det()
    }

    /// `self . other`: applies `other` first.
    pub fn compose(&self, other: &AffineMap<T>) -> Result<Self> {
        let linear = self.linear.matmul(&other.linear);
        let translation = self.apply(&other.translation);
        AffineMap::new(linear, translation)
    }

    pub fn inverse(&self) -> Result<Self> {
        let inv = self
            .linear
            .inverse()
            .ok_or(Error::SingularMap { det: self.linear.det().to_f64_lossy() })?;
        let t = inv.matvec(&self.translation).iter().map(|&v| -v).collect();
        AffineMap::new(inv, t)
    }

    /// Decomposes the linear part as `lambda * q` with `q` orthogonal, when
    /// the map is a similarity within `tol`; `None` otherwise.
    pub fn similarity_parts(&self, tol: T) -> Option<(T, Matrix<T>)> {
        let n = self.dim();
        let lambda = self.linear.det().abs().powf(T::one() / T::of(n as f64));
        if lambda <= T::zero() {
            return None;
        }
        let q = self.linear.scaled(T::one() / lambda);
        if q.orthogonality_residual() <= tol {
            Some((lambda, q.polar_orthogonal()?))
        } else {
            None
        }
    }
}

/// Boundary triangulation kept for exact volume and centroid integrals.
#[derive(Clone, Debug)]
pub(crate) struct Mesh<T> {
    pub points: Vec<Vec<T>>,
    pub cells: Vec<Vec<usize>>,
    /// Fan apex: the vertex barycenter. Chosen instead of the volume
    /// centroid so that the centroid itself can be derived from the fan.
    pub apex: Vec<T>,
}

/// Full-dimensional convex polytope.
#[derive(Clone, Debug)]
pub struct ConvexBody<T> {
    dim: usize,
    vertices: Vec<Point<T>>,
    facets: Vec<Facet<T>>,
    volume: T,
    centroid: Point<T>,
    diameter: T,
    pub(crate) mesh: Mesh<T>,
}

/// Builds the convex hull of a point cloud as a `ConvexBody`.
///
/// Non-extreme points are dropped; the result has non-empty interior or the
/// construction fails with `DegenerateInput`.
pub fn convex_hull<T: Real>(points: &[Point<T>], dim: usize) -> Result<ConvexBody<T>> {
    let coords: Vec<Vec<T>> = points.iter().map(|p| p.0.clone()).collect();
    ConvexBody::from_coords(&coords, dim)
}

impl<T: Real> ConvexBody<T> {
    pub fn from_points(points: &[Point<T>], dim: usize) -> Result<Self> {
        convex_hull(points, dim)
    }

    pub(crate) fn from_coords(coords: &[Vec<T>], dim: usize) -> Result<Self> {
        let data = hull::build(coords, dim)?;
        let vertices: Vec<Point<T>> = data.vertices.into_iter().map(Point).collect();
        let facets: Vec<Facet<T>> = data
            .facets
            .into_iter()
            .map(|f| Facet { normal: Point(f.normal), offset: f.offset, vertices: f.vertices })
            .collect();

        let mut apex = vec![T::zero(); dim];
        for v in &vertices {
            linalg::axpy(&mut apex, T::one(), v);
        }
        let inv_count = T::one() / T::of(vertices.len() as f64);
        for c in apex.iter_mut() {
            *c *= inv_count;
        }
        let mesh = Mesh { points: data.mesh_points, cells: data.cells, apex };

        let (volume, centroid) = integrate(&mesh, dim);
        if !(volume > T::zero()) {
            return Err(Error::DegenerateInput("hull has zero volume".into()));
        }
        let mut diameter = T::zero();
        for i in 0..vertices.len() {
            for j in (i + 1)..vertices.len() {
                diameter = diameter.max(linalg::dist(&vertices[i], &vertices[j]));
            }
        }
        Ok(ConvexBody { dim, vertices, facets, volume, centroid: Point(centroid), diameter, mesh })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point<T>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet<T>] {
        &self.facets
    }

    /// Exact polytope volume (length in 1D, area in 2D, ...).
    pub fn volume(&self) -> T {
        self.volume
    }

    /// Volume centroid; affinely equivariant.
    pub fn centroid(&self) -> &Point<T> {
        &self.centroid
    }

    pub fn diameter(&self) -> T {
        self.diameter
    }

    /// Support function `h(u) = max_v <v, u>`. Directions are expected
    /// unit-length; near-zero directions are rejected.
    pub fn support(&self, direction: &[T]) -> Result<T> {
        if direction.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: direction.len() });
        }
        if linalg::norm_sq(direction) <= T::of(1e-24) {
            return Err(Error::ZeroDirection);
        }
        Ok(self
            .vertices
            .iter()
            .map(|v| dot(v, direction))
            .fold(T::neg_infinity(), T::max))
    }

    /// Membership with slack: every facet inequality within `tol`.
    pub fn contains(&self, x: &[T], tol: T) -> bool {
        x.len() == self.dim
            && self.facets.iter().all(|f| dot(&f.normal, x) <= f.offset + tol)
    }

    /// Signed distance to the nearest facet plane: positive inside.
    pub fn interior_margin(&self, x: &[T]) -> T {
        self.facets
            .iter()
            .map(|f| f.offset - dot(&f.normal, x))
            .fold(T::infinity(), T::min)
    }

    /// Image under an invertible affine map; the hull is rebuilt from the
    /// mapped vertices, so facet data stays consistent.
    pub fn apply(&self, map: &AffineMap<T>) -> Result<Self> {
        if map.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: map.dim() });
        }
        let coords: Vec<Vec<T>> = self.vertices.iter().map(|v| map.apply(v)).collect();
        Self::from_coords(&coords, self.dim)
    }

    /// Exact translation: no hull rebuild.
    pub fn translate(&self, t: &[T]) -> Self {
        debug_assert_eq!(t.len(), self.dim);
        let mut out = self.clone();
        for v in out.vertices.iter_mut() {
            linalg::axpy(&mut v.0, T::one(), t);
        }
        for f in out.facets.iter_mut() {
            f.offset += dot(&f.normal, t);
        }
        for p in out.mesh.points.iter_mut() {
            linalg::axpy(p, T::one(), t);
        }
        linalg::axpy(&mut out.mesh.apex, T::one(), t);
        linalg::axpy(&mut out.centroid.0, T::one(), t);
        out
    }

    /// Exact image under an orthogonal matrix: vertices and normals rotate,
    /// offsets and measures are unchanged.
    pub fn rotate(&self, q: &Matrix<T>) -> Self {
        debug_assert_eq!(q.rows(), self.dim);
        debug_assert!(q.orthogonality_residual() <= T::of(1e-8));
        let mut out = self.clone();
        for v in out.vertices.iter_mut() {
            v.0 = q.matvec(&v.0);
        }
        for f in out.facets.iter_mut() {
            f.normal.0 = q.matvec(&f.normal.0);
        }
        for p in out.mesh.points.iter_mut() {
            *p = q.matvec(p);
        }
        out.mesh.apex = q.matvec(&out.mesh.apex);
        out.centroid.0 = q.matvec(&out.centroid.0);
        out
    }

    /// Exact uniform scaling by `lambda > 0`.
    pub fn scale_uniform(&self, lambda: T) -> Self {
        debug_assert!(lambda > T::zero());
        let mut out = self.clone();
        for v in out.vertices.iter_mut() {
            v.0 = linalg::scale(&v.0, lambda);
        }
        for f in out.facets.iter_mut() {
            f.offset *= lambda;
        }
        for p in out.mesh.points.iter_mut() {
            *p = linalg::scale(p, lambda);
        }
        out.mesh.apex = linalg::scale(&out.mesh.apex, lambda);
        out.centroid.0 = linalg::scale(&out.centroid.0, lambda);
        out.volume = self.volume * lambda.powi(self.dim as i32);
        out.diameter = self.diameter * lambda;
        out
    }

    /// Volume-and-translation normalization: returns the unit-volume
    /// centered class together with the similarity that restores `self`.
    ///
    /// The restoring similarity has scale `volume^(1/dim)`, identity
    /// rotation, and the centroid as translation.
    pub fn normalize(&self) -> (TranslationClass<T>, crate::group::Similarity<T>) {
        let n = self.dim;
        let lambda = self.volume.powf(T::one() / T::of(n as f64));
        let neg_c: Vec<T> = self.centroid.iter().map(|&c| -c).collect();
        let rep = self.translate(&neg_c).scale_uniform(T::one() / lambda);
        let sim = crate::group::Similarity::new_unchecked(
            lambda,
            Matrix::identity(n),
            self.centroid.0.clone(),
        );
        (TranslationClass { rep }, sim)
    }

    /// Structural invariants; used by tests and after deserialization.
    pub fn validate(&self) -> Result<()> {
        let tol = T::of(1e-8) * self.diameter.max(T::one());
        for f in &self.facets {
            if (linalg::norm(&f.normal) - T::one()).abs() > T::of(1e-9) {
                return Err(Error::DegenerateInput("facet normal is not unit".into()));
            }
            if f.vertices.len() < self.dim {
                return Err(Error::DegenerateInput("facet has too few supporting vertices".into()));
            }
        }
        for v in &self.vertices {
            for f in &self.facets {
                if dot(&f.normal, v) > f.offset + tol {
                    return Err(Error::DegenerateInput("vertex violates a facet".into()));
                }
            }
        }
        if !(self.volume > T::zero()) {
            return Err(Error::DegenerateInput("volume is not positive".into()));
        }
        Ok(())
    }

    /// Vertices in canonical (lexicographic) order, for serialization.
    pub fn sorted_vertex_coords(&self) -> Vec<Vec<T>> {
        let mut coords: Vec<Vec<T>> = self.vertices.iter().map(|v| v.0.clone()).collect();
        coords.sort_by(|a, b| lex_cmp(a, b));
        coords
    }
}

/// Fan integration from the mesh apex: exact volume and volume centroid.
fn integrate<T: Real>(mesh: &Mesh<T>, dim: usize) -> (T, Vec<T>) {
    let mut factorial = T::one();
    for k in 2..=dim {
        factorial *= T::of(k as f64);
    }
    let mut volume = T::zero();
    let mut weighted = vec![T::zero(); dim];
    let inv_np1 = T::one() / T::of((dim + 1) as f64);
    for cell in &mesh.cells {
        let cols: Vec<Vec<T>> = cell
            .iter()
            .map(|&i| linalg::sub(&mesh.points[i], &mesh.apex))
            .collect();
        let vol = Matrix::from_cols(&cols).det().abs() / factorial;
        if vol <= T::zero() {
            continue;
        }
        volume += vol;
        let mut c = mesh.apex.clone();
        for &i in cell {
            linalg::axpy(&mut c, T::one(), &mesh.points[i]);
        }
        for (w, ci) in weighted.iter_mut().zip(&c) {
            *w += vol * *ci * inv_np1;
        }
    }
    let centroid = weighted.iter().map(|&w| w / volume).collect();
    (volume, centroid)
}

/// Translation class of a body: the canonical representative is the body
/// translated so its centroid sits at the origin.
#[derive(Clone, Debug)]
pub struct TranslationClass<T> {
    rep: ConvexBody<T>,
}

impl<T: Real> TranslationClass<T> {
    pub fn of(body: &ConvexBody<T>) -> Self {
        let neg_c: Vec<T> = body.centroid().iter().map(|&c| -c).collect();
        TranslationClass { rep: body.translate(&neg_c) }
    }

    pub fn representative(&self) -> &ConvexBody<T> {
        &self.rep
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }
}
