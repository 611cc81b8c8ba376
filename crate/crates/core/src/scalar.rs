//! Scalar abstraction so the geometry kernels run on `f32` or `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar used by every geometric computation.
///
/// The blanket requirements keep generic code readable: arithmetic with
/// assignment operators, iterator sums, and conversion from `f64` constants.
pub trait Real:
    Float + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` constant (tolerances, literals) into `Self`.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 constant")
    }

    /// Widens to `f64` for reporting; exact for `f32` and `f64`.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("scalar representable as f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}
