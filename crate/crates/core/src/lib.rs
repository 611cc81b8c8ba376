//! Similarity-equivariant point functionals on convex polytopes.
//!
//! The crate builds convex bodies from vertex data, detects their isometry
//! groups, samples the orthogonal group, aligns bodies across rotation
//! orbits, and constructs point-valued functionals that commute with every
//! similarity transformation — including functionals that blend a
//! distinguished point of a reference body with the centroid, controlled
//! by the distance to the reference orbit.
//!
//! All numerics are generic over the scalar type via [`Real`] (implemented
//! for `f32` and `f64`); the type aliases at the crate root fix `f64` for
//! everyday use.

pub mod body;
pub mod error;
pub mod functional;
pub mod generate;
pub mod group;
pub mod io;
pub mod hull;
pub mod linalg;
pub mod metric;
pub mod sampling;
pub mod scalar;
pub mod suspension;

pub use crate::error::{Error, Result};
pub use crate::scalar::Real;

pub use crate::body::{convex_hull, AffineMap, ConvexBody, Facet, Point, TranslationClass};
pub use crate::functional::{
    blend_functional, blend_unit_functional, centroid_functional, equivariance_report,
    mvee_center, similarity_extend, suggest_radii, BlendMode, BlendSpec, EquivarianceClass,
    EquivarianceReport, InvariantFunctional, ReportRow, TestMap,
};
pub use crate::group::{
    fixed_point_set, group_average_scalar, haar_sample_orthogonal, is_in_orbit, orbit_align,
    symmetry_group, AffineSubspace, HaarSampler, Similarity, SymmetryGroup,
};
pub use crate::linalg::Matrix;
pub use crate::metric::{class_distance, hausdorff_distance, DirectionSet, DEFAULT_DIRECTIONS};
pub use crate::suspension::{
    asymmetric_profile, interior_grid, suspend, verify_fixed_slice, AchievabilityRow,
    FixedSliceReport, SuspensionBody,
};

/// Convex body over `f64`.
pub type Body = ConvexBody<f64>;
/// Translation class over `f64`.
pub type Class = TranslationClass<f64>;
/// Similarity transformation over `f64`.
pub type Map = Similarity<f64>;
