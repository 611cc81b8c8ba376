//! Suspensions: the hull of a centered base embedded in the hyperplane
//! `x1 = 0` together with the two apexes at `±e1`. Their only symmetry —
//! when the base has none — is the reflection through the base
//! hyperplane, which confines every similarity-equivariant point to the
//! equatorial slice while anchored blends can reach any interior point of
//! it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::body::{convex_hull, ConvexBody, Point};
use crate::error::{Error, Result};
use crate::functional::{
    blend_functional, suggest_radii, BlendMode, BlendSpec, InvariantFunctional,
};
use crate::group::{fixed_point_set, symmetry_group};
use crate::linalg;
use crate::sampling::{domain, sub_seed};
use crate::scalar::Real;

/// Suspension of a base body: the base is recentered to its centroid,
/// embedded at `x1 = 0`, and coned to the apexes `(±1, 0, …, 0)`.
#[derive(Clone, Debug)]
pub struct SuspensionBody<T> {
    base: ConvexBody<T>,
    body: ConvexBody<T>,
    apexes: [Point<T>; 2],
}

impl<T: Real> SuspensionBody<T> {
    /// The recentered base, in its own (n-1)-dimensional coordinates.
    pub fn base(&self) -> &ConvexBody<T> {
        &self.base
    }

    /// The full n-dimensional suspension body.
    pub fn body(&self) -> &ConvexBody<T> {
        &self.body
    }

    pub fn apexes(&self) -> &[Point<T>; 2] {
        &self.apexes
    }

    /// Cross-section `{y : (s, y) ∈ body}` at height `x1 = s`, |s| < 1,
    /// computed from the facet half-spaces (independently of the vertex
    /// construction). The slice of a suspension is `(1-|s|) * base`.
    ///
    /// Implemented for base dimensions 1 and 2 (suspensions in the plane
    /// and in space).
    pub fn slice_at(&self, s: T) -> Result<ConvexBody<T>> {
        let n = self.body.dim();
        let m = n - 1;
        if s.abs() >= T::one() {
            return Err(Error::InvalidParameter(
                "slice height must satisfy |s| < 1".into(),
            ));
        }
        let scale = self.body.diameter();
        let tol = T::of(1e-9) * scale;

        // Facet {a.x <= b} meets {x1 = s} in {a'.y <= b - a1 s}.
        let mut rows: Vec<(Vec<T>, T)> = Vec::new();
        for f in self.body.facets() {
            let a1 = f.normal[0];
            let a_rest: Vec<T> = f.normal.as_slice()[1..].to_vec();
            let b = f.offset - a1 * s;
            if linalg::norm(&a_rest) <= tol {
                if b < -tol {
                    return Err(Error::DegenerateInput("slice is empty".into()));
                }
                continue;
            }
            rows.push((a_rest, b));
        }

        let feasible = |y: &[T]| {
            rows.iter().all(|(a, b)| linalg::dot(a, y) <= *b + tol)
        };
        let mut points: Vec<Point<T>> = Vec::new();
        match m {
            1 => {
                let mut lo = T::neg_infinity();
                let mut hi = T::infinity();
                for (a, b) in &rows {
                    let bound = *b / a[0];
                    if a[0] > T::zero() {
                        hi = hi.min(bound);
                    } else {
                        lo = lo.max(bound);
                    }
                }
                if !(lo < hi) {
                    return Err(Error::DegenerateInput("slice is empty".into()));
                }
                points.push(Point(vec![lo]));
                points.push(Point(vec![hi]));
            }
            2 => {
                for i in 0..rows.len() {
                    for j in (i + 1)..rows.len() {
                        let (a, b) = (&rows[i].0, rows[i].1);
                        let (c, d) = (&rows[j].0, rows[j].1);
                        let det = a[0] * c[1] - a[1] * c[0];
                        if det.abs() <= T::of(1e-14) * scale {
                            continue;
                        }
                        let y = vec![(b * c[1] - a[1] * d) / det, (a[0] * d - b * c[0]) / det];
                        if feasible(&y) {
                            points.push(Point(y));
                        }
                    }
                }
            }
            _ => {
                return Err(Error::InvalidParameter(
                    "slice extraction is implemented for 1- and 2-dimensional bases".into(),
                ))
            }
        }
        convex_hull(&points, m)
    }
}

/// Builds the suspension of `base`: recenter to the centroid, embed at
/// `x1 = 0`, take the hull with the apexes `(±1, 0, …, 0)`.
pub fn suspend<T: Real>(base: &ConvexBody<T>) -> Result<SuspensionBody<T>> {
    let m = base.dim();
    let n = m + 1;
    let c = base.centroid().as_slice().to_vec();
    let centered = base.translate(&linalg::scale(&c, -T::one()));

    let mut points: Vec<Point<T>> = Vec::with_capacity(centered.vertices().len() + 2);
    for v in centered.vertices() {
        let mut e = Vec::with_capacity(n);
        e.push(T::zero());
        e.extend_from_slice(v);
        points.push(Point(e));
    }
    let mut apex_hi = vec![T::zero(); n];
    apex_hi[0] = T::one();
    let mut apex_lo = vec![T::zero(); n];
    apex_lo[0] = -T::one();
    points.push(Point(apex_hi.clone()));
    points.push(Point(apex_lo.clone()));

    let body = convex_hull(&points, n).map_err(|e| match e {
        Error::DegenerateInput(msg) => Error::DegenerateBase(msg),
        other => other,
    })?;
    Ok(SuspensionBody {
        base: centered,
        body,
        apexes: [Point(apex_hi), Point(apex_lo)],
    })
}

/// Convex polygon with no nontrivial symmetry: radii
/// `r(θ_i) = 1 + 0.3 Σ_{j=2..4} a_j cos(j θ_i + b_j)` at `m` equispaced
/// angles, with seeded coefficients `a_j ∈ [0.05, 0.15]`,
/// `b_j ∈ [0, 2π)`. Draws are rejected until every sampled point is
/// extreme and the symmetry group is trivial; a polytopal stand-in for a
/// smooth asymmetric base.
pub fn asymmetric_profile<T: Real>(m: usize, seed: u64) -> Result<ConvexBody<T>> {
    if m < 12 {
        return Err(Error::InvalidParameter("profile needs at least 12 vertices".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, domain::PROFILE));
    let tries = 100;
    for _ in 0..tries {
        let a: Vec<f64> = (0..3).map(|_| rng.gen_range(0.05..0.15)).collect();
        let b: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..2.0 * std::f64::consts::PI)).collect();
        let mut pts = Vec::with_capacity(m);
        for i in 0..m {
            let theta = 2.0 * std::f64::consts::PI * (i as f64) / (m as f64);
            let mut r = 1.0;
            for (k, (aj, bj)) in a.iter().zip(&b).enumerate() {
                let j = (k + 2) as f64;
                r += 0.3 * aj * (j * theta + bj).cos();
            }
            pts.push(Point(vec![T::of(r * theta.cos()), T::of(r * theta.sin())]));
        }
        let body = match convex_hull(&pts, 2) {
            Ok(b) => b,
            Err(_) => continue,
        };
        if body.vertices().len() != m {
            continue;
        }
        let group = match symmetry_group(&body, T::of(1e-6) * body.diameter()) {
            Ok(g) => g,
            Err(_) => continue,
        };
        if group.order() == 1 {
            return Ok(body);
        }
    }
    Err(Error::ResampleExhausted { tries })
}

/// Interior lattice of a 1- or 2-dimensional body: `per_side` samples per
/// axis over the bounding box, kept when at least `2%` of the diameter
/// inside every facet.
pub fn interior_grid<T: Real>(base: &ConvexBody<T>, per_side: usize) -> Vec<Point<T>> {
    let dim = base.dim();
    let margin = T::of(0.02) * base.diameter();
    let mut lo = vec![T::infinity(); dim];
    let mut hi = vec![T::neg_infinity(); dim];
    for v in base.vertices() {
        for (d, &c) in v.iter().enumerate() {
            lo[d] = lo[d].min(c);
            hi[d] = hi[d].max(c);
        }
    }
    let coord = |d: usize, i: usize| {
        lo[d] + (hi[d] - lo[d]) * T::of((i as f64 + 0.5) / per_side as f64)
    };
    let mut out = Vec::new();
    match dim {
        1 => {
            for i in 0..per_side {
                let p = vec![coord(0, i)];
                if base.interior_margin(&p) >= margin {
                    out.push(Point(p));
                }
            }
        }
        _ => {
            assert!(dim == 2, "interior grids are defined for 1- and 2-dimensional bases");
            for i in 0..per_side {
                for j in 0..per_side {
                    let p = vec![coord(0, i), coord(1, j)];
                    if base.interior_margin(&p) >= margin {
                        out.push(Point(p));
                    }
                }
            }
        }
    }
    out
}

/// One verified anchor of the achievability clause.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AchievabilityRow {
    /// Grid point in base coordinates.
    pub anchor: Vec<f64>,
    /// `|p(body) - embed(anchor)| / diameter` for the blend anchored there.
    pub residual: f64,
}

/// Verification record for the fixed-slice claims of a suspension.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FixedSliceReport {
    /// Order of the suspension's symmetry group (2 when the base has no
    /// symmetry).
    pub group_order: usize,
    /// Dimension of the common fixed set (n-1: the base hyperplane).
    pub fixed_dim: usize,
    /// Largest `|x1|` of any supplied functional's value on the body.
    pub confinement_max: f64,
    /// Blend-anchored reproduction residuals over the grid.
    pub achievability: Vec<AchievabilityRow>,
}

/// Verifies the fixed-slice claims of a suspension:
///
/// (i) the symmetry group has order 2 with the reflection `x1 -> -x1` as
/// its nontrivial element; (ii) the fixed-point set is the hyperplane
/// `x1 = 0`; (iii) every supplied functional lands on that hyperplane
/// (`|x1| <= 1e-6`), inside the base slice — the "contained in the slice"
/// direction; (iv) a hard-mode blend anchored at any interior grid point
/// of the base reproduces its anchor within `1e-5 * diameter` — the
/// "every interior point is achievable" direction.
///
/// Functionals of both equivariance classes are accepted: affine
/// equivariance implies similarity equivariance.
///
/// Fails with `VerificationFailure` naming the first violated clause.
pub fn verify_fixed_slice<T: Real + Serialize>(
    susp: &SuspensionBody<T>,
    functionals: &[InvariantFunctional<T>],
    grid: &[Point<T>],
) -> Result<FixedSliceReport> {
    let body = susp.body();
    let n = body.dim();
    let diam = body.diameter();
    let fail = |clause: &str, message: String| {
        Err(Error::VerificationFailure { clause: clause.into(), message })
    };

    // (i) symmetry group = {identity, reflection of x1}
    let group = symmetry_group(body, T::of(1e-6) * diam)?;
    if group.order() != 2 {
        return fail(
            "i",
            format!("symmetry group has order {}, expected 2", group.order()),
        );
    }
    let mut reflection = linalg::Matrix::<T>::identity(n);
    reflection.set(0, 0, -T::one());
    let has_reflection = group.elements().iter().any(|g| {
        g.rotation().max_abs_diff(&reflection) <= T::of(1e-6)
    });
    if !has_reflection {
        return fail("i", "nontrivial symmetry is not the reflection x1 -> -x1".into());
    }

    // (ii) fixed set = hyperplane x1 = 0
    let fixed = fixed_point_set(&group);
    if fixed.dim() != n - 1 {
        return fail(
            "ii",
            format!("fixed set has dimension {}, expected {}", fixed.dim(), n - 1),
        );
    }
    if fixed.point()[0].abs() > T::of(1e-8) * diam
        || fixed.basis().iter().any(|b| b[0].abs() > T::of(1e-8))
    {
        return fail("ii", "fixed set is not the hyperplane x1 = 0".into());
    }

    // (iii) functional confinement and slice containment
    let slice = susp.base();
    let mut confinement_max = T::zero();
    for p in functionals {
        let v = p.evaluate(body)?;
        let x1 = v[0].abs();
        confinement_max = confinement_max.max(x1);
        if x1 > T::of(1e-6) {
            return fail(
                "iii",
                format!("functional '{}' has |x1| = {:.3e}", p.name(), x1.to_f64_lossy()),
            );
        }
        let rest: Vec<T> = v.as_slice()[1..].to_vec();
        if !slice.contains(&rest, T::of(1e-8) * diam) {
            return fail(
                "iii",
                format!("functional '{}' lands outside the base slice", p.name()),
            );
        }
    }

    // (iv) grid achievability through anchored blends
    let verify_seed = sub_seed(0, domain::VERIFY);
    let (eps_in, eps_out) = suggest_radii(body, verify_seed)?;
    let mut achievability = Vec::with_capacity(grid.len());
    for g in grid {
        if g.len() != n - 1 {
            return Err(Error::DimensionMismatch { expected: n - 1, got: g.len() });
        }
        let mut target = Vec::with_capacity(n);
        target.push(T::zero());
        target.extend_from_slice(g);
        let spec = BlendSpec {
            anchor: body.clone(),
            target: Point(target.clone()),
            eps_in,
            eps_out,
            kernel_width: eps_out,
            haar_budget: 4,
            seed: verify_seed,
            mode: BlendMode::Hard,
        };
        let blend = blend_functional(&spec)?;
        let value = blend.evaluate(body)?;
        let residual = linalg::dist(&value, &target) / diam;
        achievability.push(AchievabilityRow {
            anchor: g.iter().map(|c| c.to_f64_lossy()).collect(),
            residual: residual.to_f64_lossy(),
        });
        if residual > T::of(1e-5) {
            return fail(
                "iv",
                format!(
                    "blend anchored at {:?} returns {:.3e} * diameter away",
                    achievability.last().unwrap().anchor,
                    residual.to_f64_lossy()
                ),
            );
        }
    }

    Ok(FixedSliceReport {
        group_order: group.order(),
        fixed_dim: fixed.dim(),
        confinement_max: confinement_max.to_f64_lossy(),
        achievability,
    })
}
