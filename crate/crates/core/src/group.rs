//! The similarity group acting on bodies: sampling, symmetry detection,
//! fixed-point sets, and orbit alignment.

use std::marker::PhantomData;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::body::{ConvexBody, TranslationClass};
use crate::error::{Error, Result};
use crate::linalg::{self, dot, Matrix};
use crate::metric::{class_distance_with, DirectionSet};
use crate::sampling::standard_normal;
use crate::scalar::Real;

/// Direct similarity `x -> scale * rotation * x + translation` with
/// `scale > 0` and `rotation` orthogonal (residual at most 1e-10).
#[derive(Clone, Debug)]
pub struct Similarity<T> {
    scale: T,
    rotation: Matrix<T>,
    translation: Vec<T>,
}

#[derive(Serialize, Deserialize)]
struct SimilarityRaw<T> {
    scale: T,
    rotation: Vec<Vec<T>>,
    translation: Vec<T>,
}

impl<T: Real + Serialize> Serialize for Similarity<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SimilarityRaw {
            scale: self.scale,
            rotation: self.rotation.to_rows(),
            translation: self.translation.clone(),
        }
        .serialize(s)
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for Similarity<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SimilarityRaw::<T>::deserialize(d)?;
        Similarity::new(raw.scale, Matrix::from_rows(&raw.rotation), raw.translation)
            .map_err(serde::de::Error::custom)
    }
}

impl<T: Real> Similarity<T> {
    pub fn new(scale: T, rotation: Matrix<T>, translation: Vec<T>) -> Result<Self> {
        if !(scale > T::zero()) {
            return Err(Error::InvalidParameter("similarity scale must be positive".into()));
        }
        if !rotation.is_square() || rotation.rows() != translation.len() {
            return Err(Error::DimensionMismatch {
                expected: rotation.rows(),
                got: translation.len(),
            });
        }
        if rotation.orthogonality_residual() > T::of(1e-10) {
            return Err(Error::InvalidParameter(
                "similarity rotation is not orthogonal within 1e-10".into(),
            ));
        }
        Ok(Similarity { scale, rotation, translation })
    }

    /// Internal constructor for exactly-known parts (identity rotations,
    /// polar-cleaned products).
    pub(crate) fn new_unchecked(scale: T, rotation: Matrix<T>, translation: Vec<T>) -> Self {
        Similarity { scale, rotation, translation }
    }

    pub fn identity(dim: usize) -> Self {
        Similarity {
            scale: T::one(),
            rotation: Matrix::identity(dim),
            translation: vec![T::zero(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.rotation.rows()
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn rotation(&self) -> &Matrix<T> {
        &self.rotation
    }

    pub fn translation(&self) -> &[T] {
        &self.translation
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let mut y = self.rotation.matvec(x);
        for c in y.iter_mut() {
            *c *= self.scale;
        }
        linalg::axpy(&mut y, T::one(), &self.translation);
        y
    }

    /// `self . other`: applies `other` first. The rotation product is
    /// snapped back onto the orthogonal group.
    pub fn compose(&self, other: &Similarity<T>) -> Self {
        let rotation = self
            .rotation
            .matmul(&other.rotation)
            .polar_orthogonal()
            .expect("product of orthogonal matrices is invertible");
        Similarity {
            scale: self.scale * other.scale,
            rotation,
            translation: self.apply(&other.translation),
        }
    }

    pub fn inverse(&self) -> Self {
        let rot_t = self.rotation.transpose();
        let inv_scale = T::one() / self.scale;
        let mut t = rot_t.matvec(&self.translation);
        for c in t.iter_mut() {
            *c = -*c * inv_scale;
        }
        Similarity { scale: inv_scale, rotation: rot_t, translation: t }
    }

    pub fn to_affine(&self) -> crate::body::AffineMap<T> {
        crate::body::AffineMap::new(self.rotation.scaled(self.scale), self.translation.clone())
            .expect("similarity linear part is invertible")
    }

    /// Largest displacement of `self` against `other` over the given points.
    pub fn max_displacement(&self, other: &Similarity<T>, points: &[Vec<T>]) -> T {
        points
            .iter()
            .map(|p| linalg::dist(&self.apply(p), &other.apply(p)))
            .fold(T::zero(), T::max)
    }
}

/// Finite group of isometries fixing a body setwise.
#[derive(Clone, Debug)]
pub struct SymmetryGroup<T> {
    elements: Vec<Similarity<T>>,
    tol: T,
}

impl<T: Real> SymmetryGroup<T> {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Similarity<T>] {
        &self.elements
    }

    pub fn tol(&self) -> T {
        self.tol
    }

    /// Linear parts of all elements (the stabilizer action on the centered
    /// body).
    pub fn rotations(&self) -> Vec<Matrix<T>> {
        self.elements.iter().map(|g| g.rotation.clone()).collect()
    }
}

/// Haar-distributed sampler on the orthogonal group O(n).
///
/// Draws a standard Gaussian matrix, takes its QR factorization, and fixes
/// the column signs by the sign of R's diagonal; the resulting distribution
/// is invariant under left and right orthogonal multiplication. Draws are
/// deterministic given the seed.
#[derive(Clone, Debug)]
pub struct HaarSampler<T> {
    dim: usize,
    rng: ChaCha8Rng,
    drawn: u64,
    _marker: PhantomData<T>,
}

impl<T: Real> HaarSampler<T> {
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim >= 1);
        HaarSampler { dim, rng: ChaCha8Rng::seed_from_u64(seed), drawn: 0, _marker: PhantomData }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of matrices drawn so far.
    pub fn drawn(&self) -> u64 {
        self.drawn
    }

    pub fn sample(&mut self) -> Matrix<T> {
        self.drawn += 1;
        haar_matrix(self.dim, &mut self.rng)
    }
}

/// One Haar-distributed orthogonal matrix from an arbitrary RNG.
pub(crate) fn haar_matrix<T: Real, R: rand::Rng>(n: usize, rng: &mut R) -> Matrix<T> {
    if n == 1 {
        // O(1) = {+1, -1}
        let s = if standard_normal(rng) >= 0.0 { T::one() } else { -T::one() };
        let mut m = Matrix::zeros(1, 1);
        m.set(0, 0, s);
        return m;
    }
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g.set(i, j, T::of(standard_normal(rng)));
        }
    }
    let (mut q, r) = g.qr();
    for j in 0..n {
        if r.at(j, j) < T::zero() {
            for i in 0..n {
                q.set(i, j, -q.at(i, j));
            }
        }
    }
    q
}

/// Free-function alias for drawing one Haar-distributed orthogonal matrix.
pub fn haar_sample_orthogonal<T: Real>(sampler: &mut HaarSampler<T>) -> Matrix<T> {
    sampler.sample()
}

/// Isometry candidates mapping the point set `src` onto `dst`.
///
/// Both sets must be centered. A well-conditioned frame of `src` points is
/// matched against `dst` tuples that agree on norms and pairwise distances;
/// each surviving assignment is solved for its orthogonal matrix and kept
/// when it permutes the whole set within `tol`. Returns `(perm, q)` pairs
/// with `q * src[i] ~ dst[perm[i]]`.
pub(crate) fn isometry_candidates<T: Real>(
    src: &[Vec<T>],
    dst: &[Vec<T>],
    tol: T,
) -> Result<Vec<(Vec<usize>, Matrix<T>)>> {
    if src.len() != dst.len() || src.is_empty() {
        return Ok(Vec::new());
    }
    let dim = src[0].len();
    let scale = src.iter().chain(dst).map(|v| linalg::norm(v)).fold(T::one(), T::max);

    // Well-conditioned source frame: greedily maximize orthogonal residual.
    let mut frame: Vec<usize> = Vec::new();
    let mut basis: Vec<Vec<T>> = Vec::new();
    for _ in 0..dim {
        let mut best: Option<(usize, Vec<T>, T)> = None;
        for (i, v) in src.iter().enumerate() {
            if frame.contains(&i) {
                continue;
            }
            let mut r = v.clone();
            for b in &basis {
                let c = dot(&r, b);
                linalg::axpy(&mut r, -c, b);
            }
            let res = linalg::norm(&r);
            if best.as_ref().map_or(true, |(_, _, br)| res > *br) {
                best = Some((i, r, res));
            }
        }
        let (i, r, res) = best.ok_or_else(|| {
            Error::DegenerateInput("point set does not span its dimension".into())
        })?;
        if res <= T::of(1e-9) * scale {
            return Err(Error::DegenerateInput("point set does not span its dimension".into()));
        }
        frame.push(i);
        basis.push(linalg::scale(&r, T::one() / res));
    }

    let src_norms: Vec<T> = src.iter().map(|v| linalg::norm(v)).collect();
    let dst_norms: Vec<T> = dst.iter().map(|v| linalg::norm(v)).collect();
    let norm_tol = T::of(2.0) * tol;
    let dist_tol = T::of(4.0) * tol;

    // DFS over frame-slot assignments.
    let mut assignments: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    fn dfs<T: Real>(
        slot: usize,
        frame: &[usize],
        src: &[Vec<T>],
        dst: &[Vec<T>],
        src_norms: &[T],
        dst_norms: &[T],
        norm_tol: T,
        dist_tol: T,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if slot == frame.len() {
            out.push(current.clone());
            return;
        }
        let s = frame[slot];
        for j in 0..dst.len() {
            if current.contains(&j) {
                continue;
            }
            if (dst_norms[j] - src_norms[s]).abs() > norm_tol {
                continue;
            }
            let ok = (0..slot).all(|l| {
                let d_src = linalg::dist(&src[s], &src[frame[l]]);
                let d_dst = linalg::dist(&dst[j], &dst[current[l]]);
                (d_src - d_dst).abs() <= dist_tol
            });
            if !ok {
                continue;
            }
            current.push(j);
            dfs(slot + 1, frame, src, dst, src_norms, dst_norms, norm_tol, dist_tol, current, out);
            current.pop();
        }
    }
    dfs(
        0,
        &frame,
        src,
        dst,
        &src_norms,
        &dst_norms,
        norm_tol,
        dist_tol,
        &mut current,
        &mut assignments,
    );

    let w_src = Matrix::from_cols(&frame.iter().map(|&i| src[i].clone()).collect::<Vec<_>>());
    let w_src_inv = w_src
        .inverse()
        .ok_or_else(|| Error::DegenerateInput("frame matrix is singular".into()))?;

    let mut found: Vec<(Vec<usize>, Matrix<T>)> = Vec::new();
    'cand: for assign in assignments {
        let w_dst = Matrix::from_cols(&assign.iter().map(|&j| dst[j].clone()).collect::<Vec<_>>());
        let q_raw = w_dst.matmul(&w_src_inv);
        let q = match q_raw.polar_orthogonal() {
            Some(q) if q_raw.max_abs_diff(&q) <= T::of(0.1) => q,
            _ => continue,
        };
        // authoritative check: q permutes the whole set within tol
        let mut perm = vec![usize::MAX; src.len()];
        let mut used = vec![false; dst.len()];
        for (i, v) in src.iter().enumerate() {
            let img = q.matvec(v);
            let mut hit = None;
            for (j, w) in dst.iter().enumerate() {
                if !used[j] && linalg::dist(&img, w) <= tol {
                    hit = Some(j);
                    break;
                }
            }
            match hit {
                Some(j) => {
                    perm[i] = j;
                    used[j] = true;
                }
                None => continue 'cand,
            }
        }
        if !found.iter().any(|(p, _)| p == &perm) {
            found.push((perm, q));
        }
    }
    Ok(found)
}

/// Detects the full isometry group fixing `body` setwise.
///
/// Every element has the form `x -> q (x - c) + c` with `c` the centroid;
/// a strict similarity (`scale != 1`) cannot fix a bounded body, which the
/// construction asserts. `tol` is the absolute vertex-matching tolerance.
pub fn symmetry_group<T: Real>(body: &ConvexBody<T>, tol: T) -> Result<SymmetryGroup<T>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidParameter("symmetry tolerance must be positive".into()));
    }
    let c = body.centroid().as_slice().to_vec();
    let centered: Vec<Vec<T>> =
        body.vertices().iter().map(|v| linalg::sub(v, &c)).collect();
    let candidates = isometry_candidates(&centered, &centered, tol)?;

    let mut perms: Vec<Vec<usize>> = Vec::new();
    let mut elements: Vec<Similarity<T>> = Vec::new();
    for (perm, q) in candidates {
        let mut t = c.clone();
        let qc = q.matvec(&c);
        linalg::axpy(&mut t, -T::one(), &qc);
        let g = Similarity::new_unchecked(T::one(), q, t);
        debug_assert!((g.scale() - T::one()).abs() == T::zero());
        perms.push(perm);
        elements.push(g);
    }

    // Ambiguity: two different permutations realized by nearly the same
    // transform means the input is within ~tol of a larger symmetry.
    let verts: Vec<Vec<T>> = body.vertices().iter().map(|v| v.as_slice().to_vec()).collect();
    let ambiguity = T::of(10.0) * tol;
    for i in 0..elements.len() {
        for j in (i + 1)..elements.len() {
            if perms[i] != perms[j]
                && elements[i].max_displacement(&elements[j], &verts) < ambiguity
            {
                return Err(Error::ToleranceAmbiguity { tol: tol.to_f64_lossy() });
            }
        }
    }

    // Group closure on the induced permutations.
    let index_of = |p: &Vec<usize>| perms.iter().position(|q| q == p);
    for a in &perms {
        for b in &perms {
            let composed: Vec<usize> = b.iter().map(|&k| a[k]).collect();
            if index_of(&composed).is_none() {
                return Err(Error::ToleranceAmbiguity { tol: tol.to_f64_lossy() });
            }
        }
    }

    Ok(SymmetryGroup { elements, tol })
}

/// Affine subspace `point + span(basis)` with orthonormal basis.
#[derive(Clone, Debug)]
pub struct AffineSubspace<T> {
    point: Vec<T>,
    basis: Vec<Vec<T>>,
}

impl<T: Real> AffineSubspace<T> {
    pub fn point(&self) -> &[T] {
        &self.point
    }

    pub fn basis(&self) -> &[Vec<T>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.point.len()
    }

    /// Euclidean distance from `x` to the subspace.
    pub fn distance_to(&self, x: &[T]) -> T {
        let mut r = linalg::sub(x, &self.point);
        for b in &self.basis {
            let c = dot(&r, b);
            linalg::axpy(&mut r, -c, b);
        }
        linalg::norm(&r)
    }

    pub fn project(&self, x: &[T]) -> Vec<T> {
        let r = linalg::sub(x, &self.point);
        let mut p = self.point.clone();
        for b in &self.basis {
            linalg::axpy(&mut p, dot(&r, b), b);
        }
        p
    }
}

/// Common fixed-point set of a finite isometry group, as an affine
/// subspace.
///
/// The group average `S(x) = mean_g g(x)` is a projection onto the fixed
/// set: `S(0)` provides a point and the column space of the averaged
/// rotation is the space of fixed directions. A finite isometry group
/// always has a fixed point, so the system is consistent by construction;
/// inconsistency is an assertion failure, not an error.
pub fn fixed_point_set<T: Real>(group: &SymmetryGroup<T>) -> AffineSubspace<T> {
    assert!(group.order() > 0, "symmetry group must contain the identity");
    let dim = group.elements()[0].dim();
    let inv_n = T::one() / T::of(group.order() as f64);

    let mut mean_rot = Matrix::zeros(dim, dim);
    let mut point = vec![T::zero(); dim];
    for g in group.elements() {
        mean_rot = mean_rot.add(g.rotation());
        linalg::axpy(&mut point, T::one(), g.translation());
    }
    mean_rot = mean_rot.scaled(inv_n);
    for c in point.iter_mut() {
        *c *= inv_n;
    }

    let cols: Vec<Vec<T>> = (0..dim).map(|j| mean_rot.col(j)).collect();
    let basis = linalg::orthonormalize(&cols, T::of(1e-8));

    let scale = T::one() + linalg::norm(&point);
    for g in group.elements() {
        let moved = g.apply(&point);
        assert!(
            linalg::dist(&moved, &point) <= T::of(1e-6) * scale,
            "fixed point is not fixed: group is inconsistent"
        );
        for b in &basis {
            let rotated = g.rotation().matvec(b);
            assert!(
                linalg::dist(&rotated, b) <= T::of(1e-6),
                "fixed direction is not fixed: group is inconsistent"
            );
        }
    }
    AffineSubspace { point, basis }
}

/// Result of an orbit alignment search.
pub(crate) struct AlignOutcome<T> {
    pub best_q: Matrix<T>,
    pub residual: T,
    /// Other local optima (rotation, residual), for tie diagnostics.
    pub runners: Vec<(Matrix<T>, T)>,
}

/// Aligns `k` against the rotation orbit of `k0`:
/// `min_Q class_distance(k, Q k0)` over the orthogonal group.
///
/// Multi-start local refinement: vertex-correspondence seeds (exact when
/// `k` lies on the orbit), a deterministic angle grid in 2D, and `budget`
/// Haar starts, each refined by coordinate descent on plane-rotation
/// generators with step halving down to an angle floor of 1e-8.
///
/// Returns the best rotation and its residual; the residual vanishes
/// exactly when `k` is in the orbit of `k0`.
pub fn orbit_align<T: Real>(
    k: &TranslationClass<T>,
    k0: &TranslationClass<T>,
    sampler: &mut HaarSampler<T>,
    budget: usize,
) -> Result<(Matrix<T>, T)> {
    orbit_align_detail(k, k0, sampler, budget).map(|o| (o.best_q, o.residual))
}

/// Residual-threshold orbit membership (`threshold` in body units).
pub fn is_in_orbit<T: Real>(
    k: &TranslationClass<T>,
    k0: &TranslationClass<T>,
    sampler: &mut HaarSampler<T>,
    budget: usize,
    threshold: T,
) -> Result<bool> {
    orbit_align(k, k0, sampler, budget).map(|(_, r)| r <= threshold)
}

pub(crate) fn orbit_align_detail<T: Real>(
    k: &TranslationClass<T>,
    k0: &TranslationClass<T>,
    sampler: &mut HaarSampler<T>,
    budget: usize,
) -> Result<AlignOutcome<T>> {
    let dim = k.dim();
    if k0.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: k0.dim() });
    }
    if sampler.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: sampler.dim() });
    }
    let scale = k.representative().diameter().max(k0.representative().diameter());
    let snap = T::of(1e-9) * scale;

    let search_dirs = DirectionSet::new(dim, if dim == 1 { 2 } else { 512 });
    let final_dirs = DirectionSet::default_for(dim);
    let max_evals = 800 + budget.max(1) * 600;
    let mut evals = 0usize;
    let mut best: Option<(Matrix<T>, T)> = None;

    macro_rules! eval {
        ($q:expr) => {{
            evals += 1;
            if evals > max_evals {
                let best_res = best.as_ref().map_or(f64::INFINITY, |(_, r)| r.to_f64_lossy());
                return Err(Error::BudgetExhausted { residual: best_res });
            }
            let rotated = TranslationClass::of(&k0.representative().rotate($q));
            class_distance_with(&search_dirs, k, &rotated)?.0
        }};
    }

    // Seeds: exact vertex correspondences, identity, 2D angle grid, Haar.
    let mut seeds: Vec<Matrix<T>> = Vec::new();
    let src: Vec<Vec<T>> =
        k0.representative().vertices().iter().map(|v| v.as_slice().to_vec()).collect();
    let dst: Vec<Vec<T>> =
        k.representative().vertices().iter().map(|v| v.as_slice().to_vec()).collect();
    if src.len() == dst.len() {
        for (_, q) in isometry_candidates(&src, &dst, T::of(1e-5) * scale)? {
            seeds.push(q);
        }
    }
    seeds.push(Matrix::identity(dim));
    if dim == 2 {
        let mut flip = Matrix::<T>::identity(2);
        flip.set(1, 1, -T::one());
        for j in 0..32 {
            let theta = T::of(2.0 * std::f64::consts::PI * (j as f64) / 32.0);
            let rot = Matrix::plane_rotation(2, 0, 1, theta);
            seeds.push(rot.clone());
            seeds.push(rot.matmul(&flip));
        }
    }
    for _ in 0..budget {
        seeds.push(sampler.sample());
    }

    let mut scored: Vec<(Matrix<T>, T)> = Vec::new();
    for q in seeds {
        let r = eval!(&q);
        if best.as_ref().map_or(true, |(_, br)| r < *br) {
            best = Some((q.clone(), r));
        }
        scored.push((q, r));
        if r <= snap {
            break;
        }
    }

    let snapped = best.as_ref().map_or(false, |(_, r)| *r <= snap);
    let mut runners: Vec<(Matrix<T>, T)> = Vec::new();
    if !snapped && dim > 1 {
        // refine the best few distinct seeds
        scored.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let mut starts: Vec<(Matrix<T>, T)> = Vec::new();
        for (q, r) in scored {
            if starts.len() >= 3 {
                break;
            }
            if starts.iter().all(|(s, _)| s.max_abs_diff(&q) > T::of(1e-3)) {
                starts.push((q, r));
            }
        }
        for (mut q, mut r) in starts {
            let mut alpha = T::of(0.4);
            let floor = T::of(1e-8);
            while alpha > floor {
                let mut improved = false;
                for i in 0..dim {
                    for j in (i + 1)..dim {
                        for sign in [T::one(), -T::one()] {
                            loop {
                                let gen = Matrix::plane_rotation(dim, i, j, alpha * sign);
                                let q_try = gen.matmul(&q);
                                let r_try = eval!(&q_try);
                                if r_try < r - T::of(1e-16) * scale {
                                    q = q_try;
                                    r = r_try;
                                    improved = true;
                                } else {
                                    break;
                                }
                            }
                        }
                    }
                }
                if !improved {
                    alpha *= T::of(0.5);
                }
                if r <= snap {
                    break;
                }
            }
            let q = q.polar_orthogonal().expect("rotation stays invertible");
            if best.as_ref().map_or(true, |(_, br)| r < *br) {
                if let Some(prev) = best.take() {
                    runners.push(prev);
                }
                best = Some((q, r));
            } else {
                runners.push((q, r));
            }
        }
    }

    let (best_q, _) = best.expect("at least one seed evaluated");
    // Residual at full direction resolution for cross-call consistency.
    let rotated = TranslationClass::of(&k0.representative().rotate(&best_q));
    let (residual, _) = class_distance_with(&final_dirs, k, &rotated)?;
    Ok(AlignOutcome { best_q, residual, runners })
}

/// Monte Carlo average of `f` over the rotation orbit of `k`:
/// `(1/m) sum_j f(q_j k)` with Haar-distributed `q_j`.
pub fn group_average_scalar<T: Real, F>(
    f: &F,
    k: &TranslationClass<T>,
    sampler: &mut HaarSampler<T>,
    m: usize,
) -> Result<T>
where
    F: Fn(&TranslationClass<T>) -> Result<T>,
{
    if m == 0 {
        return Err(Error::InvalidParameter("average needs at least one sample".into()));
    }
    let mut acc = T::zero();
    for _ in 0..m {
        let q = sampler.sample();
        let rotated = TranslationClass::of(&k.representative().rotate(&q));
        acc += f(&rotated)?;
    }
    Ok(acc / T::of(m as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::{convex_hull, Point};

    fn body2(points: &[[f64; 2]]) -> ConvexBody<f64> {
        let pts: Vec<Point<f64>> = points.iter().map(|p| Point(p.to_vec())).collect();
        convex_hull(&pts, 2).unwrap()
    }

    fn regular_polygon(m: usize) -> ConvexBody<f64> {
        let pts: Vec<Point<f64>> = (0..m)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * (k as f64) / (m as f64);
                Point(vec![t.cos(), t.sin()])
            })
            .collect();
        convex_hull(&pts, 2).unwrap()
    }

    #[test]
    fn similarity_compose_and_inverse() {
        let q = Matrix::<f64>::plane_rotation(2, 0, 1, 0.7);
        let s = Similarity::new(2.0, q, vec![1.0, -3.0]).unwrap();
        let inv = s.inverse();
        let x = [0.3, 0.9];
        let round = inv.apply(&s.apply(&x));
        assert!(linalg::dist(&round, &x) < 1e-12);
        let id = s.compose(&inv);
        assert!((id.scale() - 1.0).abs() < 1e-12);
        assert!(id.rotation().max_abs_diff(&Matrix::identity(2)) < 1e-12);
    }

    #[test]
    fn haar_samples_are_orthogonal_and_deterministic() {
        let mut s1 = HaarSampler::<f64>::new(3, 11);
        let mut s2 = HaarSampler::<f64>::new(3, 11);
        for _ in 0..5 {
            let a = s1.sample();
            let b = s2.sample();
            assert_eq!(a.max_abs_diff(&b), 0.0);
            assert!(a.orthogonality_residual() < 1e-12);
            assert!((a.det().abs() - 1.0).abs() < 1e-10);
        }
        assert_eq!(s1.drawn(), 5);
    }

    #[test]
    fn square_symmetry_group_has_order_eight() {
        let sq = body2(&[[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]]);
        let g = symmetry_group(&sq, 1e-6).unwrap();
        assert_eq!(g.order(), 8);
        for e in g.elements() {
            assert_eq!(e.scale(), 1.0);
            assert!(e.rotation().orthogonality_residual() < 1e-10);
        }
    }

    #[test]
    fn off_center_square_still_has_order_eight() {
        let sq = body2(&[[10.0, 5.0], [12.0, 5.0], [12.0, 7.0], [10.0, 7.0]]);
        let g = symmetry_group(&sq, 1e-6).unwrap();
        assert_eq!(g.order(), 8);
        // every element fixes the centroid
        let c = [11.0, 6.0];
        for e in g.elements() {
            assert!(linalg::dist(&e.apply(&c), &c) < 1e-9);
        }
    }

    #[test]
    fn scalene_triangle_is_asymmetric() {
        let t = body2(&[[0.0, 0.0], [4.0, 0.0], [0.0, 3.0]]);
        let g = symmetry_group(&t, 1e-6).unwrap();
        assert_eq!(g.order(), 1);
    }

    #[test]
    fn pentagon_symmetry_order_ten() {
        let g = symmetry_group(&regular_polygon(5), 1e-6).unwrap();
        assert_eq!(g.order(), 10);
    }

    #[test]
    fn cube_symmetry_order_forty_eight() {
        let mut pts = Vec::new();
        for x in [-1.0, 1.0] {
            for y in [-1.0, 1.0] {
                for z in [-1.0, 1.0] {
                    pts.push(Point(vec![x, y, z]));
                }
            }
        }
        let cube = convex_hull(&pts, 3).unwrap();
        let g = symmetry_group(&cube, 1e-6).unwrap();
        assert_eq!(g.order(), 48);
    }

    #[test]
    fn fixed_set_of_square_is_its_center() {
        let sq = body2(&[[10.0, 5.0], [12.0, 5.0], [12.0, 7.0], [10.0, 7.0]]);
        let g = symmetry_group(&sq, 1e-6).unwrap();
        let f = fixed_point_set(&g);
        assert_eq!(f.dim(), 0);
        assert!(linalg::dist(f.point(), &[11.0, 6.0]) < 1e-9);
    }

    #[test]
    fn fixed_set_of_trivial_group_is_everything() {
        let t = body2(&[[0.0, 0.0], [4.0, 0.0], [0.0, 3.0]]);
        let g = symmetry_group(&t, 1e-6).unwrap();
        let f = fixed_point_set(&g);
        assert_eq!(f.dim(), 2);
        assert!(f.distance_to(&[123.0, -7.0]) < 1e-9);
    }

    #[test]
    fn orbit_align_recovers_rotation() {
        let t = body2(&[[0.0, 0.0], [4.0, 0.0], [0.0, 3.0]]);
        let k0 = TranslationClass::of(&t);
        let q = Matrix::<f64>::plane_rotation(2, 0, 1, 0.7);
        let k = TranslationClass::of(&t.rotate(&q));
        let mut sampler = HaarSampler::new(2, 5);
        let (best_q, r) = orbit_align(&k, &k0, &mut sampler, 4).unwrap();
        assert!(r < 1e-8, "residual = {r}");
        assert!(best_q.max_abs_diff(&q) < 1e-5);
        assert!(is_in_orbit(&k, &k0, &mut sampler, 4, 1e-5).unwrap());
    }

    #[test]
    fn orbit_align_self_residual_vanishes() {
        let t = body2(&[[0.0, 0.0], [4.0, 0.0], [0.0, 3.0]]);
        let k0 = TranslationClass::of(&t);
        let mut sampler = HaarSampler::new(2, 5);
        let (_, r) = orbit_align(&k0, &k0, &mut sampler, 4).unwrap();
        assert!(r < 1e-8);
    }

    #[test]
    fn group_average_of_invariant_is_identity() {
        let t = body2(&[[0.0, 0.0], [4.0, 0.0], [0.0, 3.0]]);
        let k = TranslationClass::of(&t);
        let vol = |c: &TranslationClass<f64>| Ok(c.representative().volume());
        let mut sampler = HaarSampler::new(2, 9);
        let avg = group_average_scalar(&vol, &k, &mut sampler, 16).unwrap();
        assert!((avg - 6.0).abs() < 1e-12, "avg = {avg}");
    }
}
