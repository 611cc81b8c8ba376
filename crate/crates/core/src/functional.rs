//! Point-valued functionals that commute with affine or similarity maps:
//! built-ins (centroid, enclosing-ellipsoid center), the orbit-anchored
//! blend construction, volume-normalized extension, and the equivariance
//! test harness.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::body::{AffineMap, ConvexBody, Point, TranslationClass};
use crate::error::{Error, Result};
use crate::group::{
    orbit_align_detail, symmetry_group, HaarSampler, Similarity,
};
use crate::linalg::{self, Matrix};
use crate::metric::{class_distance_with, DirectionSet};
use crate::sampling::{domain, sub_seed};
use crate::scalar::Real;

/// Transformation class a functional is equivariant under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EquivarianceClass {
    Affine,
    Similarity,
}

/// Deterministic point-valued functional on convex bodies.
///
/// Functionals flagged "of the body" promise `evaluate(K)` lies in `K`
/// (within `1e-8 * diameter`); the report harness checks this.
#[derive(Clone)]
pub struct InvariantFunctional<T> {
    name: String,
    class: EquivarianceClass,
    of_body: bool,
    metadata: Option<serde_json::Value>,
    evaluator: Arc<dyn Fn(&ConvexBody<T>) -> Result<Point<T>> + Send + Sync>,
}

impl<T> fmt::Debug for InvariantFunctional<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InvariantFunctional")
            .field("name", &self.name)
            .field("class", &self.class)
            .field("of_body", &self.of_body)
            .finish_non_exhaustive()
    }
}

impl<T: Real> InvariantFunctional<T> {
    pub fn new<F>(name: &str, class: EquivarianceClass, of_body: bool, evaluator: F) -> Self
    where
        F: Fn(&ConvexBody<T>) -> Result<Point<T>> + Send + Sync + 'static,
    {
        InvariantFunctional {
            name: name.to_string(),
            class,
            of_body,
            metadata: None,
            evaluator: Arc::new(evaluator),
        }
    }

    pub fn with_metadata(mut self, metadata: serde_json::Value) -> Self {
        self.metadata = Some(metadata);
        self
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn equivariance_class(&self) -> EquivarianceClass {
        self.class
    }

    /// Whether the functional promises membership `evaluate(K) ∈ K`.
    pub fn is_of_body(&self) -> bool {
        self.of_body
    }

    /// Construction parameters, present for blended functionals.
    pub fn metadata(&self) -> Option<&serde_json::Value> {
        self.metadata.as_ref()
    }

    pub fn evaluate(&self, body: &ConvexBody<T>) -> Result<Point<T>> {
        (self.evaluator)(body)
    }
}

/// The centroid as a functional: affine-equivariant, always in the body.
pub fn centroid_functional<T: Real>() -> InvariantFunctional<T> {
    InvariantFunctional::new("centroid", EquivarianceClass::Affine, true, |k| {
        Ok(k.centroid().clone())
    })
}

/// Center of the minimum-volume enclosing ellipsoid of the vertex set.
///
/// Khachiyan's barycentric-coordinate ascent with away steps, run to
/// relative gap 1e-7. The center is the weight-averaged vertex, hence a
/// convex combination of vertices and always in the body.
pub fn mvee_center<T: Real>() -> InvariantFunctional<T> {
    InvariantFunctional::new("mvee-center", EquivarianceClass::Affine, true, |k| {
        mvee_center_of(k)
    })
}

/// Dual weights of the minimum-volume enclosing ellipsoid of `points`.
///
/// Maximizes `log det M(u)` with `M(u) = sum_i u_i q_i q_i^T` over the
/// simplex, `q_i = (p_i, 1)` the lifted points. Pure ascent steps have
/// sublinear convergence; away steps (shrinking the weight of the
/// worst-supported point) restore the linear rate needed for a 1e-7 gap
/// inside the iteration cap.
pub(crate) fn mvee_weights<T: Real>(points: &[Vec<T>]) -> Result<Vec<T>> {
    let m = points.len();
    let n = points[0].len();
    let d = n + 1;
    let lifted: Vec<Vec<T>> = points
        .iter()
        .map(|p| {
            let mut q = p.clone();
            q.push(T::one());
            q
        })
        .collect();

    let eps = T::of(1e-7);
    let d_t = T::of(d as f64);
    let mut u = vec![T::one() / T::of(m as f64); m];
    let max_iter = 100_000usize;

    for _ in 0..max_iter {
        let mut mat = Matrix::zeros(d, d);
        for (ui, q) in u.iter().zip(&lifted) {
            if *ui <= T::zero() {
                continue;
            }
            for r in 0..d {
                for c in 0..d {
                    mat.set(r, c, mat.at(r, c) + *ui * q[r] * q[c]);
                }
            }
        }
        let inv = mat
            .inverse()
            .ok_or_else(|| Error::DegenerateInput("ellipsoid moment matrix is singular".into()))?;

        let mut w_max = T::neg_infinity();
        let mut i_max = 0;
        let mut w_min = T::infinity();
        let mut i_min = 0;
        for (i, q) in lifted.iter().enumerate() {
            let w = linalg::dot(q, &inv.matvec(q));
            if w > w_max {
                w_max = w;
                i_max = i;
            }
            if u[i] > T::zero() && w < w_min {
                w_min = w;
                i_min = i;
            }
        }

        if w_max <= (T::one() + eps) * d_t && w_min >= (T::one() - eps) * d_t {
            return Ok(u);
        }

        // Pick the more violated side; clip away steps at the simplex face.
        let (j, lambda) = if w_max - d_t >= d_t - w_min {
            (i_max, (w_max - d_t) / (d_t * (w_max - T::one())))
        } else {
            let raw = (w_min - d_t) / (d_t * (w_min - T::one()));
            (i_min, raw.max(-u[i_min] / (T::one() - u[i_min])))
        };
        for (i, ui) in u.iter_mut().enumerate() {
            *ui *= T::one() - lambda;
            if i == j {
                *ui += lambda;
            }
        }
    }
    Err(Error::NoConvergence { iterations: max_iter, context: "ellipsoid weight ascent".into() })
}

fn mvee_center_of<T: Real>(body: &ConvexBody<T>) -> Result<Point<T>> {
    let points: Vec<Vec<T>> =
        body.vertices().iter().map(|v| v.as_slice().to_vec()).collect();
    let u = mvee_weights(&points)?;
    let mut c = vec![T::zero(); body.dim()];
    for (ui, p) in u.iter().zip(&points) {
        linalg::axpy(&mut c, *ui, p);
    }
    Point::new(c)
}

/// Blend mode: `hard` snaps to the best alignment (exact near the orbit),
/// `soft` kernel-averages over Haar samples (continuous).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlendMode {
    Soft,
    Hard,
}

/// Construction parameters for an orbit-anchored blend functional.
///
/// The blend returns (a similarity image of) `target` on bodies close to
/// the similarity orbit of `anchor` and falls back to the centroid far
/// from it, interpolating smoothly in between.
#[derive(Clone, Debug)]
pub struct BlendSpec<T> {
    /// Reference body whose orbit carries the distinguished point.
    pub anchor: ConvexBody<T>,
    /// Distinguished point, interior to `anchor` and fixed by its
    /// symmetry group.
    pub target: Point<T>,
    /// Orbit-distance radius below which the blend equals the target
    /// image exactly.
    pub eps_in: T,
    /// Orbit-distance radius beyond which the blend equals the centroid
    /// exactly.
    pub eps_out: T,
    /// Gaussian kernel width for soft mode.
    pub kernel_width: T,
    /// Haar sample count (soft mode) and alignment multi-start budget.
    pub haar_budget: usize,
    /// Seed for all randomness used by the functional.
    pub seed: u64,
    pub mode: BlendMode,
}

#[derive(Serialize, Deserialize)]
struct BlendSpecRaw<T> {
    anchor: BodyRaw<T>,
    target: Vec<T>,
    eps_in: T,
    eps_out: T,
    kernel_width: T,
    haar_budget: usize,
    seed: u64,
    mode: BlendMode,
}

#[derive(Serialize, Deserialize)]
struct BodyRaw<T> {
    dim: usize,
    vertices: Vec<Vec<T>>,
}

impl<T: Real + Serialize> Serialize for BlendSpec<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BlendSpecRaw {
            anchor: BodyRaw {
                dim: self.anchor.dim(),
                vertices: self.anchor.vertices().iter().map(|v| v.as_slice().to_vec()).collect(),
            },
            target: self.target.as_slice().to_vec(),
            eps_in: self.eps_in,
            eps_out: self.eps_out,
            kernel_width: self.kernel_width,
            haar_budget: self.haar_budget,
            seed: self.seed,
            mode: self.mode,
        }
        .serialize(s)
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for BlendSpec<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = BlendSpecRaw::<T>::deserialize(d)?;
        let pts: Vec<Point<T>> = raw.anchor.vertices.into_iter().map(Point).collect();
        let anchor = crate::body::convex_hull(&pts, raw.anchor.dim)
            .map_err(serde::de::Error::custom)?;
        Ok(BlendSpec {
            anchor,
            target: Point(raw.target),
            eps_in: raw.eps_in,
            eps_out: raw.eps_out,
            kernel_width: raw.kernel_width,
            haar_budget: raw.haar_budget,
            seed: raw.seed,
            mode: raw.mode,
        })
    }
}

/// C¹ cutoff: exactly 1 for `d <= lo`, exactly 0 for `d >= hi`, quintic
/// smoothstep in between.
fn bump<T: Real>(d: T, lo: T, hi: T) -> T {
    if d <= lo {
        return T::one();
    }
    if d >= hi {
        return T::zero();
    }
    let s = (d - lo) / (hi - lo);
    let rise = s * s * s * (s * (s * T::of(6.0) - T::of(15.0)) + T::of(10.0));
    T::one() - rise
}

struct BlendCore<T> {
    /// Normalized anchor class representative (unit volume, centered).
    anchor_unit: ConvexBody<T>,
    /// Target mapped into the normalized frame.
    target_unit: Vec<T>,
    /// Linear parts of the anchor's symmetry group (they commute with
    /// normalization, which is a homothety about the fixed centroid).
    stabilizer: Vec<Matrix<T>>,
    dirs: DirectionSet<T>,
    eps_in: T,
    eps_out: T,
    kernel_width: T,
    haar_budget: usize,
    seed: u64,
    mode: BlendMode,
}

impl<T: Real> BlendCore<T> {
    fn rotated_anchor(&self, q: &Matrix<T>) -> TranslationClass<T> {
        TranslationClass::of(&self.anchor_unit.rotate(q))
    }

    /// Evaluates the blend on a unit-volume centered body; the zero
    /// vector is the centroid in this frame.
    fn evaluate(&self, k: &ConvexBody<T>) -> Result<Point<T>> {
        let dim = self.anchor_unit.dim();
        if k.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: k.dim() });
        }
        let zero = Point(vec![T::zero(); dim]);

        // Rotation-invariant lower bound on the orbit distance: diameters
        // are exact for polytopes and |diam(K) - diam(L)| <= 2 d(K, L),
        // so a large diameter gap certifies the far branch without any
        // alignment work.
        let diam_gap = (k.diameter() - self.anchor_unit.diameter()).abs() / T::of(2.0);
        if diam_gap >= self.eps_out {
            return Ok(zero);
        }

        let class = TranslationClass::of(k);
        let anchor_class = TranslationClass::of(&self.anchor_unit);
        let mut sampler = HaarSampler::new(dim, sub_seed(self.seed, domain::MAPS));
        let outcome = orbit_align_detail(&class, &anchor_class, &mut sampler, self.haar_budget)?;
        let d = outcome.residual;

        let phi1 = bump(d, self.eps_in, self.eps_out);
        if phi1 == T::zero() {
            return Ok(zero);
        }

        let delta = match self.mode {
            BlendMode::Hard => {
                self.warn_on_ties(&outcome);
                // Average the target image over every alignment tied with
                // the best one; by construction these are the best
                // rotation composed with stabilizer elements, so a
                // stabilizer-fixed target makes the average exact.
                let tie = d + T::of(1e-7);
                let mut acc = vec![T::zero(); dim];
                let mut count = 0usize;
                for r in &self.stabilizer {
                    let q = outcome.best_q.matmul(r);
                    let (res, _) = class_distance_with(&self.dirs, &class, &self.rotated_anchor(&q))?;
                    if res <= tie {
                        linalg::axpy(&mut acc, T::one(), &q.matvec(&self.target_unit));
                        count += 1;
                    }
                }
                if count == 0 {
                    // best_q itself always qualifies; stabilizer contains
                    // the identity, so this is unreachable unless the
                    // distances disagree pathologically.
                    outcome.best_q.matvec(&self.target_unit)
                } else {
                    linalg::scale(&acc, T::one() / T::of(count as f64))
                }
            }
            BlendMode::Soft => {
                let mut sampler =
                    HaarSampler::new(dim, sub_seed(self.seed, domain::BLEND));
                let sigma = self.kernel_width;
                let mut acc = vec![T::zero(); dim];
                let mut total = T::zero();
                for _ in 0..self.haar_budget {
                    let q = sampler.sample();
                    let (r, _) =
                        class_distance_with(&self.dirs, &class, &self.rotated_anchor(&q))?;
                    let w = (-(r / sigma) * (r / sigma)).exp();
                    total += w;
                    linalg::axpy(&mut acc, w, &q.matvec(&self.target_unit));
                }
                if total <= T::of(1e-300) {
                    return Err(Error::NoConvergence {
                        iterations: self.haar_budget,
                        context: "soft blend kernel weights underflowed; widen the kernel".into(),
                    });
                }
                linalg::scale(&acc, T::one() / total)
            }
        };

        let p = linalg::scale(&delta, phi1);
        let margin = k.interior_margin(&p);
        if margin < -T::of(1e-8) * k.diameter() {
            return Err(Error::InteriorViolation { margin: margin.to_f64_lossy() });
        }
        Point::new(p)
    }

    fn warn_on_ties(&self, outcome: &crate::group::AlignOutcome<T>) {
        let tie = outcome.residual + T::of(1e-7);
        for (q, r) in &outcome.runners {
            if *r > tie {
                continue;
            }
            let is_stabilizer_shift = self
                .stabilizer
                .iter()
                .any(|s| outcome.best_q.matmul(s).max_abs_diff(q) < T::of(1e-4));
            if !is_stabilizer_shift {
                log::warn!(
                    "alignment tie: two rotations within {:.2e} of the best residual \
                     differ by more than a stabilizer element; hard-mode blend may be \
                     discontinuous here",
                    tie.to_f64_lossy()
                );
            }
        }
    }
}

/// The blend on unit-volume centered bodies: target image near the orbit
/// of the normalized anchor, origin (= centroid) far from it.
///
/// This is the unit-class core; [`blend_functional`] is its
/// volume-normalized extension to all bodies.
pub fn blend_unit_functional<T: Real + Serialize>(
    spec: &BlendSpec<T>,
) -> Result<InvariantFunctional<T>> {
    let core = build_core(spec)?;
    let name = match spec.mode {
        BlendMode::Hard => "blend-hard-unit",
        BlendMode::Soft => "blend-soft-unit",
    };
    let metadata = serde_json::to_value(spec)
        .map_err(|e| Error::InvalidParameter(format!("spec not serializable: {e}")))?;
    Ok(
        InvariantFunctional::new(name, EquivarianceClass::Similarity, true, move |k| {
            core.evaluate(k)
        })
        .with_metadata(metadata),
    )
}

/// Orbit-anchored blend functional on all bodies.
///
/// Normalizes the input to its unit-volume centered class, evaluates the
/// unit core there, and maps the result back through the normalizing
/// similarity. Exactly the centroid for bodies with orbit distance at
/// least `eps_out`; exactly the target image (up to alignment tolerance)
/// for bodies on the anchor's orbit in hard mode.
pub fn blend_functional<T: Real + Serialize>(
    spec: &BlendSpec<T>,
) -> Result<InvariantFunctional<T>> {
    let unit = blend_unit_functional(spec)?;
    let name = match spec.mode {
        BlendMode::Hard => "blend-hard",
        BlendMode::Soft => "blend-soft",
    };
    let metadata = serde_json::to_value(spec)
        .map_err(|e| Error::InvalidParameter(format!("spec not serializable: {e}")))?;
    Ok(similarity_extend(unit).with_name(name).with_metadata(metadata))
}

fn build_core<T: Real>(spec: &BlendSpec<T>) -> Result<BlendCore<T>> {
    let diam = spec.anchor.diameter();
    if !(spec.eps_in > T::zero() && spec.eps_in < spec.eps_out) {
        return Err(Error::InvalidParameter(
            "blend radii must satisfy 0 < eps_in < eps_out".into(),
        ));
    }
    if spec.mode == BlendMode::Soft && !(spec.kernel_width > T::zero()) {
        return Err(Error::InvalidParameter("soft blend needs a positive kernel width".into()));
    }
    if spec.haar_budget == 0 {
        return Err(Error::InvalidParameter("haar budget must be at least 1".into()));
    }
    if spec.target.len() != spec.anchor.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.anchor.dim(),
            got: spec.target.len(),
        });
    }
    let margin = spec.anchor.interior_margin(&spec.target);
    if margin < T::of(1e-6) * diam {
        return Err(Error::InvalidParameter(format!(
            "target must lie in the anchor's interior with margin >= 1e-6 * diameter \
             (margin = {:.3e}, needed {:.3e})",
            margin.to_f64_lossy(),
            (T::of(1e-6) * diam).to_f64_lossy()
        )));
    }

    let group = symmetry_group(&spec.anchor, T::of(1e-6) * diam)?;
    let fix_tol = T::of(1e-8) * (T::one() + diam);
    for g in group.elements() {
        let moved = g.apply(&spec.target);
        if linalg::dist(&moved, &spec.target) > fix_tol {
            return Err(Error::InvalidParameter(
                "target must be fixed by every symmetry of the anchor".into(),
            ));
        }
    }

    let (anchor_class, norm) = spec.anchor.normalize();
    let anchor_unit = anchor_class.representative().clone();
    let target_unit = norm.inverse().apply(&spec.target);
    let dim = spec.anchor.dim();
    Ok(BlendCore {
        anchor_unit,
        target_unit,
        stabilizer: group.rotations(),
        dirs: DirectionSet::default_for(dim),
        eps_in: spec.eps_in,
        eps_out: spec.eps_out,
        kernel_width: spec.kernel_width,
        haar_budget: spec.haar_budget,
        seed: spec.seed,
        mode: spec.mode,
    })
}

/// Suggested blend radii for an anchor: `eps_out` is a tenth of the
/// anchor's self-alignment gap (the smallest residual of a non-optimal
/// alignment local optimum against itself), `eps_in` a quarter of that.
pub fn suggest_radii<T: Real>(anchor: &ConvexBody<T>, seed: u64) -> Result<(T, T)> {
    let (class, _) = anchor.normalize();
    let mut sampler = HaarSampler::new(anchor.dim(), sub_seed(seed, domain::MAPS));
    let outcome = orbit_align_detail(&class, &class, &mut sampler, 8)?;
    let floor = T::of(1e-6);
    let gap = outcome
        .runners
        .iter()
        .map(|(_, r)| *r)
        .filter(|r| *r > floor)
        .fold(T::infinity(), T::min);
    let gap = if gap.is_finite() {
        gap
    } else {
        // No nontrivial local optimum surfaced; fall back to the spread
        // of sampled self-distances.
        let dirs = DirectionSet::default_for(anchor.dim());
        let mut worst = T::zero();
        for _ in 0..16 {
            let q = sampler.sample();
            let rotated = TranslationClass::of(&class.representative().rotate(&q));
            let (r, _) = class_distance_with(&dirs, &class, &rotated)?;
            worst = worst.max(r);
        }
        worst
    };
    let eps_out = T::of(0.1) * gap;
    Ok((eps_out * T::of(0.25), eps_out))
}

/// Extends a functional defined on unit-volume centered bodies to all
/// bodies: `p(F) = c(F) + V^{1/n} * p_unit(V^{-1/n} (F - c(F)))`.
///
/// The extension is similarity-equivariant whenever `p_unit` commutes
/// with rotations on unit classes.
pub fn similarity_extend<T: Real>(p_unit: InvariantFunctional<T>) -> InvariantFunctional<T> {
    let of_body = p_unit.is_of_body();
    let name = format!("extended-{}", p_unit.name());
    InvariantFunctional::new(&name, EquivarianceClass::Similarity, of_body, move |k| {
        let (class, norm) = k.normalize();
        let inner = p_unit.evaluate(class.representative())?;
        Point::new(norm.apply(&inner))
    })
}

/// A transformation fed to the equivariance harness.
#[derive(Clone, Debug)]
pub enum TestMap<T> {
    Affine(AffineMap<T>),
    Similarity(Similarity<T>),
}

impl<T: Real> TestMap<T> {
    pub fn apply_to_body(&self, k: &ConvexBody<T>) -> Result<ConvexBody<T>> {
        match self {
            TestMap::Affine(a) => k.apply(a),
            TestMap::Similarity(s) => k.apply(&s.to_affine()),
        }
    }

    pub fn apply_to_point(&self, x: &[T]) -> Vec<T> {
        match self {
            TestMap::Affine(a) => a.apply(x),
            TestMap::Similarity(s) => s.apply(x),
        }
    }

    /// Whether the map is a similarity (always true for the similarity
    /// variant; checked numerically for affine maps).
    pub fn is_similarity(&self) -> bool {
        match self {
            TestMap::Affine(a) => a.similarity_parts(T::of(1e-8)).is_some(),
            TestMap::Similarity(_) => true,
        }
    }
}

/// One (body, map) cell of an equivariance report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportRow {
    pub body_id: usize,
    pub map_id: usize,
    /// `|p(A(K)) - A(p(K))| / diameter(K)`.
    pub residual: f64,
    /// `p(A(K)) ∈ A(K)` at `1e-8 * diameter`.
    pub membership: bool,
}

/// Residual table from testing a functional over bodies × maps.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquivarianceReport {
    pub functional: String,
    pub tol: f64,
    pub rows: Vec<ReportRow>,
    pub max_residual: f64,
    pub all_members: bool,
    pub pass: bool,
}

impl EquivarianceReport {
    /// CSV form: `body_id, map_id, residual, membership`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("body_id,map_id,residual,membership\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{:e},{}\n",
                r.body_id, r.map_id, r.residual, r.membership
            ));
        }
        out
    }
}

/// Tests `p(A(K)) = A(p(K))` over the battery, reporting the
/// diameter-normalized residual per cell and membership `p(A(K)) ∈ A(K)`.
///
/// Passing requires every residual at most `tol` and, for functionals
/// flagged "of the body", membership throughout. Feeding a genuinely
/// affine (non-similarity) map to a similarity-class functional is a
/// `ClassMismatch` error.
pub fn equivariance_report<T: Real>(
    p: &InvariantFunctional<T>,
    bodies: &[ConvexBody<T>],
    maps: &[TestMap<T>],
    tol: T,
) -> Result<EquivarianceReport> {
    if p.equivariance_class() == EquivarianceClass::Similarity {
        if let Some(bad) = maps.iter().position(|m| !m.is_similarity()) {
            return Err(Error::ClassMismatch(format!(
                "map {bad} is not a similarity but the functional '{}' is only \
                 similarity-equivariant",
                p.name()
            )));
        }
    }

    let mut rows = Vec::with_capacity(bodies.len() * maps.len());
    let mut max_residual = 0.0f64;
    let mut all_members = true;
    for (bi, body) in bodies.iter().enumerate() {
        let p_body = p.evaluate(body)?;
        let diam = body.diameter();
        for (mi, map) in maps.iter().enumerate() {
            let image = map.apply_to_body(body)?;
            let p_image = p.evaluate(&image)?;
            let expected = map.apply_to_point(&p_body);
            let residual = (linalg::dist(&p_image, &expected) / diam).to_f64_lossy();
            let membership =
                image.contains(&p_image, T::of(1e-8) * image.diameter());
            max_residual = max_residual.max(residual);
            all_members &= membership;
            rows.push(ReportRow { body_id: bi, map_id: mi, residual, membership });
        }
    }
    let pass = max_residual <= tol.to_f64_lossy() && (!p.is_of_body() || all_members);
    Ok(EquivarianceReport {
        functional: p.name().to_string(),
        tol: tol.to_f64_lossy(),
        rows,
        max_residual,
        all_members,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::convex_hull;

    fn body2(points: &[[f64; 2]]) -> ConvexBody<f64> {
        let pts: Vec<Point<f64>> = points.iter().map(|p| Point(p.to_vec())).collect();
        convex_hull(&pts, 2).unwrap()
    }

    fn scalene() -> ConvexBody<f64> {
        body2(&[[0.0, 0.0], [4.0, 0.0], [0.0, 3.0]])
    }

    fn hard_spec(anchor: ConvexBody<f64>, target: [f64; 2]) -> BlendSpec<f64> {
        BlendSpec {
            anchor,
            target: Point(target.to_vec()),
            eps_in: 0.02,
            eps_out: 0.08,
            kernel_width: 0.05,
            haar_budget: 6,
            seed: 42,
            mode: BlendMode::Hard,
        }
    }

    #[test]
    fn centroid_functional_square() {
        let sq = body2(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        let p = centroid_functional::<f64>().evaluate(&sq).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-14 && (p[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn mvee_center_of_symmetric_square_is_origin() {
        let sq = body2(&[[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]);
        let p = mvee_center::<f64>().evaluate(&sq).unwrap();
        assert!(linalg::norm(&p) < 1e-7, "center = {:?}", p.as_slice());
    }

    #[test]
    fn mvee_center_of_triangle_is_steiner_center() {
        // The minimum-volume ellipse around a triangle is its Steiner
        // circumellipse, centered at the vertex mean.
        let t = body2(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let p = mvee_center::<f64>().evaluate(&t).unwrap();
        assert!((p[0] - 1.0 / 3.0).abs() < 1e-6, "p = {:?}", p.as_slice());
        assert!((p[1] - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn mvee_is_affinely_equivariant() {
        let t = scalene();
        let a = AffineMap::new(
            Matrix::from_rows(&[vec![2.0, 1.0], vec![0.5, 3.0]]),
            vec![5.0, -2.0],
        )
        .unwrap();
        let p = mvee_center::<f64>();
        let before = p.evaluate(&t).unwrap();
        let after = p.evaluate(&t.apply(&a).unwrap()).unwrap();
        let expected = a.apply(&before);
        assert!(linalg::dist(&after, &expected) < 1e-5 * t.diameter());
    }

    #[test]
    fn hard_blend_returns_target_on_anchor() {
        let anchor = scalene();
        let spec = hard_spec(anchor.clone(), [1.0, 0.8]);
        let p = blend_functional(&spec).unwrap();
        assert_eq!(p.equivariance_class(), EquivarianceClass::Similarity);
        let v = p.evaluate(&anchor).unwrap();
        assert!(
            linalg::dist(&v, &[1.0, 0.8]) <= 1e-6 * anchor.diameter(),
            "v = {:?}",
            v.as_slice()
        );
    }

    #[test]
    fn hard_blend_is_centroid_far_from_orbit() {
        let spec = hard_spec(scalene(), [1.0, 0.8]);
        let p = blend_functional(&spec).unwrap();
        // a long box is far from any triangle orbit after normalization
        let far = body2(&[[0.0, 0.0], [10.0, 0.0], [10.0, 0.1], [0.0, 0.1]]);
        let v = p.evaluate(&far).unwrap();
        let c = far.centroid();
        assert_eq!(v.as_slice(), c.as_slice(), "far branch must be bitwise centroid");
    }

    #[test]
    fn blend_rejects_bad_parameters() {
        let anchor = scalene();
        let mut spec = hard_spec(anchor.clone(), [1.0, 0.8]);
        spec.eps_in = 0.2; // >= eps_out
        assert!(blend_functional(&spec).is_err());
        let spec = hard_spec(anchor.clone(), [4.0, 3.0]); // outside
        assert!(blend_functional(&spec).is_err());
        let spec = hard_spec(anchor, [0.0, 0.0]); // boundary vertex
        assert!(blend_functional(&spec).is_err());
    }

    #[test]
    fn blend_spec_round_trips_through_json() {
        let spec = hard_spec(scalene(), [1.0, 0.8]);
        let text = serde_json::to_string(&spec).unwrap();
        let back: BlendSpec<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back.anchor.vertices().len(), 3);
        assert_eq!(back.mode, BlendMode::Hard);
        assert_eq!(back.seed, 42);
    }

    #[test]
    fn bump_is_exact_at_the_ends_and_monotone() {
        assert_eq!(bump(0.01, 0.02, 0.08), 1.0);
        assert_eq!(bump(0.02, 0.02, 0.08), 1.0);
        assert_eq!(bump(0.08, 0.02, 0.08), 0.0);
        assert_eq!(bump(0.5, 0.02, 0.08), 0.0);
        let mut prev = 1.0;
        for i in 1..=20 {
            let d = 0.02 + 0.06 * (i as f64) / 20.0;
            let v: f64 = bump(d, 0.02, 0.08);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn similarity_extend_of_centered_zero_is_centroid() {
        let zero_unit = InvariantFunctional::<f64>::new(
            "unit-zero",
            EquivarianceClass::Similarity,
            true,
            |k| Ok(Point(vec![0.0; k.dim()])),
        );
        let p = similarity_extend(zero_unit);
        let t = scalene();
        let v = p.evaluate(&t).unwrap();
        assert_eq!(v.as_slice(), t.centroid().as_slice());
    }

    #[test]
    fn normalized_argument_has_unit_volume() {
        let probe = InvariantFunctional::<f64>::new(
            "volume-probe",
            EquivarianceClass::Similarity,
            false,
            |k| {
                assert!((k.volume() - 1.0).abs() < 1e-12, "volume = {}", k.volume());
                Ok(Point(vec![0.0; k.dim()]))
            },
        );
        let p = similarity_extend(probe);
        p.evaluate(&scalene()).unwrap();
    }

    #[test]
    fn equivariance_report_centroid_passes() {
        let bodies = vec![scalene(), body2(&[[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [0.0, 1.0]])];
        let maps = vec![
            TestMap::Affine(
                AffineMap::new(
                    Matrix::from_rows(&[vec![1.0, 0.5], vec![0.0, 2.0]]),
                    vec![3.0, -1.0],
                )
                .unwrap(),
            ),
            TestMap::Similarity(Similarity::identity(2)),
        ];
        let rep =
            equivariance_report(&centroid_functional::<f64>(), &bodies, &maps, 1e-9).unwrap();
        assert!(rep.pass, "max residual {}", rep.max_residual);
        assert!(rep.all_members);
        assert_eq!(rep.rows.len(), 4);
        let csv = rep.to_csv();
        assert!(csv.starts_with("body_id,map_id,residual,membership\n"));
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn class_mismatch_is_detected() {
        let spec = hard_spec(scalene(), [1.0, 0.8]);
        let p = blend_functional(&spec).unwrap();
        let shear = TestMap::Affine(
            AffineMap::new(Matrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]), vec![0.0, 0.0])
                .unwrap(),
        );
        let err = equivariance_report(&p, &[scalene()], &[shear], 1e-5).unwrap_err();
        assert_eq!(err.code(), "class_mismatch");
    }

    #[test]
    fn suggest_radii_are_ordered_and_positive() {
        let (lo, hi) = suggest_radii(&scalene(), 7).unwrap();
        assert!(lo > 0.0 && lo < hi, "lo = {lo}, hi = {hi}");
    }
}
