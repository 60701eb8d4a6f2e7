//! Measures on ℝ and on the unit circle, and the Cauchy-type transforms
//! built from them.

pub mod circle;
pub mod limit;
pub mod line;

pub use circle::{
    cauchy_transform_circle, normalized_cauchy, CauchyTransform, CircleAtom, CircleFunction, CircleMeasure,
    NormalizedCauchy,
};
pub use limit::{extrapolate, radial_limit, BoundaryLimitSchedule, LimitEstimate};
pub use line::{Atom, RealLineMeasure};
