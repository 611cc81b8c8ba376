//! Support-function metrics between convex bodies.
//!
//! Distances are evaluated on a deterministic quasi-uniform sample of the
//! unit sphere. Sampling the same direction set everywhere makes distances
//! mutually consistent; the sampled value converges to the true metric from
//! below as the direction count grows.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::body::{ConvexBody, TranslationClass};
use crate::error::{Error, Result};
use crate::linalg::{self, dot};
use crate::scalar::Real;

/// Default number of sphere directions for 2D and 3D bodies.
pub const DEFAULT_DIRECTIONS: usize = 2048;

/// Iteration cap for the translation alignment in `class_distance`.
pub const ALIGN_ITERATION_CAP: usize = 10_000;

/// Deterministic quasi-uniform sample of the unit sphere `S^{dim-1}`.
///
/// 1D uses `{+1, -1}`; 2D uses uniformly spaced angles; 3D uses a Fibonacci
/// lattice; higher dimensions fall back to seeded normalized Gaussians
/// (deterministic in `(dim, count)`).
#[derive(Clone, Debug)]
pub struct DirectionSet<T> {
    dim: usize,
    dirs: Vec<Vec<T>>,
}

impl<T: Real> DirectionSet<T> {
    pub fn new(dim: usize, count: usize) -> Self {
        assert!(dim >= 1 && count >= 2);
        let dirs = match dim {
            1 => vec![vec![T::one()], vec![-T::one()]],
            2 => (0..count)
                .map(|k| {
                    let theta = 2.0 * std::f64::consts::PI * (k as f64) / (count as f64);
                    vec![T::of(theta.cos()), T::of(theta.sin())]
                })
                .collect(),
            3 => {
                let golden = (1.0 + 5f64.sqrt()) / 2.0;
                (0..count)
                    .map(|k| {
                        let z = 1.0 - 2.0 * (k as f64 + 0.5) / (count as f64);
                        let r = (1.0 - z * z).max(0.0).sqrt();
                        let theta = 2.0 * std::f64::consts::PI * (k as f64) / golden;
                        vec![T::of(r * theta.cos()), T::of(r * theta.sin()), T::of(z)]
                    })
                    .collect()
            }
            _ => {
                let seed = 0x6472_7370 ^ ((dim as u64) << 32) ^ count as u64;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut dirs = Vec::with_capacity(count);
                while dirs.len() < count {
                    let v: Vec<T> = (0..dim)
                        .map(|_| T::of(crate::sampling::standard_normal(&mut rng)))
                        .collect();
                    if let Some(u) = linalg::normalized(&v) {
                        dirs.push(u);
                    }
                }
                dirs
            }
        };
        DirectionSet { dim, dirs }
    }

    pub fn default_for(dim: usize) -> Self {
        Self::new(dim, if dim == 1 { 2 } else { DEFAULT_DIRECTIONS })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn directions(&self) -> &[Vec<T>] {
        &self.dirs
    }

    /// Support values of `body` along every direction.
    pub fn support_values(&self, body: &ConvexBody<T>) -> Result<Vec<T>> {
        if body.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: body.dim() });
        }
        Ok(self
            .dirs
            .iter()
            .map(|u| {
                body.vertices()
                    .iter()
                    .map(|v| dot(v, u))
                    .fold(T::neg_infinity(), T::max)
            })
            .collect())
    }
}

/// Hausdorff distance via the sampled sup-norm of support differences.
pub fn hausdorff_distance<T: Real>(a: &ConvexBody<T>, b: &ConvexBody<T>) -> Result<T> {
    hausdorff_with(&DirectionSet::default_for(a.dim()), a, b)
}

pub fn hausdorff_with<T: Real>(
    dirs: &DirectionSet<T>,
    a: &ConvexBody<T>,
    b: &ConvexBody<T>,
) -> Result<T> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    let ha = dirs.support_values(a)?;
    let hb = dirs.support_values(b)?;
    Ok(ha
        .iter()
        .zip(&hb)
        .map(|(&x, &y)| (x - y).abs())
        .fold(T::zero(), T::max))
}

/// Quotient metric between translation classes:
/// `min_t max_u |h1(u) - h2(u) - <t, u>|`.
///
/// The objective is convex and 1-Lipschitz in `t`; it is minimized by
/// subgradient descent with a geometric step-cooling schedule, warm-started
/// at the centroid alignment (`t = 0` for canonical representatives).
pub fn class_distance<T: Real>(k1: &TranslationClass<T>, k2: &TranslationClass<T>) -> Result<T> {
    let dirs = DirectionSet::default_for(k1.dim());
    class_distance_with(&dirs, k1, k2).map(|(d, _)| d)
}

/// As `class_distance` but on a caller-provided direction set; also returns
/// the aligning translation.
pub fn class_distance_with<T: Real>(
    dirs: &DirectionSet<T>,
    k1: &TranslationClass<T>,
    k2: &TranslationClass<T>,
) -> Result<(T, Vec<T>)> {
    if k1.dim() != k2.dim() {
        return Err(Error::DimensionMismatch { expected: k1.dim(), got: k2.dim() });
    }
    let h1 = dirs.support_values(k1.representative())?;
    let h2 = dirs.support_values(k2.representative())?;
    let diff: Vec<T> = h1.iter().zip(&h2).map(|(&a, &b)| a - b).collect();
    let scale = k1
        .representative()
        .diameter()
        .max(k2.representative().diameter())
        .max(T::of(1e-30));
    minimize_alignment(dirs, &diff, scale)
}

/// Subgradient descent on `f(t) = max_u |d_u - <t, u>|`.
fn minimize_alignment<T: Real>(
    dirs: &DirectionSet<T>,
    diff: &[T],
    scale: T,
) -> Result<(T, Vec<T>)> {
    let dim = dirs.dim();
    let eval = |t: &[T]| -> (T, usize) {
        let mut best = T::neg_infinity();
        let mut arg = 0usize;
        for (i, u) in dirs.directions().iter().enumerate() {
            let v = (diff[i] - dot(t, u)).abs();
            if v > best {
                best = v;
                arg = i;
            }
        }
        (best, arg)
    };

    let mut t = vec![T::zero(); dim];
    let (mut f_best, _) = eval(&t);
    let mut t_best = t.clone();
    let floor = T::of(1e-7) * scale;
    let snap = T::of(1e-14) * scale;
    let mut alpha = T::of(0.5) * scale;
    let mut iterations = 0usize;

    while alpha > floor {
        let mut improved = false;
        for _ in 0..40 {
            iterations += 1;
            if iterations > ALIGN_ITERATION_CAP {
                return Err(Error::NoConvergence {
                    iterations: ALIGN_ITERATION_CAP,
                    context: "translation alignment".into(),
                });
            }
            let (f, arg) = eval(&t);
            if f < f_best {
                f_best = f;
                t_best = t.clone();
                improved = true;
            }
            if f_best <= snap {
                return Ok((f_best, t_best));
            }
            // step opposite the subgradient of the active direction
            let u = &dirs.directions()[arg];
            let sign = if diff[arg] - dot(&t, u) >= T::zero() { T::one() } else { -T::one() };
            linalg::axpy(&mut t, alpha * sign, u);
        }
        if !improved {
            t = t_best.clone();
        }
        alpha *= T::of(0.5);
    }
    Ok((f_best, t_best))
}
