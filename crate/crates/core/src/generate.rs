//! Deterministic generators for test batteries: standard bodies, random
//! polytopes, and random transformations with bounded conditioning.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::body::{convex_hull, AffineMap, ConvexBody, Point};
use crate::error::Result;
use crate::group::{haar_matrix, Similarity};
use crate::linalg::Matrix;
use crate::sampling::standard_normal;
use crate::scalar::Real;

/// The cube `[0, 1]^dim`.
pub fn unit_cube<T: Real>(dim: usize) -> ConvexBody<T> {
    assert!((1..=7).contains(&dim), "cube vertex count must stay small");
    let mut pts = Vec::with_capacity(1 << dim);
    for mask in 0..(1u32 << dim) {
        let v: Vec<T> = (0..dim)
            .map(|d| if mask >> d & 1 == 1 { T::one() } else { T::zero() })
            .collect();
        pts.push(Point(v));
    }
    convex_hull(&pts, dim).expect("cube is a valid body")
}

/// Regular `m`-gon with unit circumradius, one vertex at angle 0.
pub fn regular_polygon<T: Real>(m: usize) -> ConvexBody<T> {
    assert!(m >= 3, "a polygon needs at least 3 vertices");
    let pts: Vec<Point<T>> = (0..m)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64) / (m as f64);
            Point(vec![T::of(t.cos()), T::of(t.sin())])
        })
        .collect();
    convex_hull(&pts, 2).expect("regular polygon is a valid body")
}

/// The simplex `conv{0, e_1, …, e_dim}`.
pub fn standard_simplex<T: Real>(dim: usize) -> ConvexBody<T> {
    let mut pts = vec![Point(vec![T::zero(); dim])];
    for d in 0..dim {
        let mut v = vec![T::zero(); dim];
        v[d] = T::one();
        pts.push(Point(v));
    }
    convex_hull(&pts, dim).expect("simplex is a valid body")
}

/// Random full-dimensional polytope: the hull of `points` draws at radius
/// `[0.5, 1.5]` in Gaussian-random directions (so at most `points`
/// vertices).
pub fn random_polytope<T: Real>(
    dim: usize,
    points: usize,
    rng: &mut ChaCha8Rng,
) -> Result<ConvexBody<T>> {
    let points = points.max(dim + 1);
    loop {
        let mut pts = Vec::with_capacity(points);
        for _ in 0..points {
            let mut v: Vec<T> = (0..dim).map(|_| T::of(standard_normal(rng))).collect();
            let n = crate::linalg::norm(&v);
            if n <= T::of(1e-9) {
                continue;
            }
            let r = T::of(rng.gen_range(0.5..1.5)) / n;
            for c in v.iter_mut() {
                *c *= r;
            }
            pts.push(Point(v));
        }
        match convex_hull(&pts, dim) {
            Ok(b) => return Ok(b),
            // vanishingly unlikely degenerate draw: try again
            Err(_) => continue,
        }
    }
}

/// Random invertible affine map with condition number at most 10:
/// rotation · diag(σ) · rotation with `σ ∈ [0.3, 3]`, Gaussian shift.
pub fn random_affine<T: Real>(dim: usize, rng: &mut ChaCha8Rng) -> AffineMap<T> {
    let q1: Matrix<T> = haar_matrix(dim, rng);
    let q2: Matrix<T> = haar_matrix(dim, rng);
    let mut sigma = Matrix::zeros(dim, dim);
    for d in 0..dim {
        sigma.set(d, d, T::of(rng.gen_range(0.3..3.0)));
    }
    let linear = q1.matmul(&sigma).matmul(&q2);
    let shift: Vec<T> = (0..dim).map(|_| T::of(2.0 * standard_normal(rng))).collect();
    AffineMap::new(linear, shift).expect("bounded singular values give an invertible map")
}

/// Random similarity with scale log-uniform in `[0.1, 10]` and Gaussian
/// shift.
pub fn random_similarity<T: Real>(dim: usize, rng: &mut ChaCha8Rng) -> Similarity<T> {
    let lambda = T::of((rng.gen_range(-1.0f64..1.0) * std::f64::consts::LN_10).exp());
    let q: Matrix<T> = haar_matrix(dim, rng);
    let shift: Vec<T> = (0..dim).map(|_| T::of(2.0 * standard_normal(rng))).collect();
    Similarity::new(lambda, q, shift).expect("haar rotation is orthogonal")
}
