//! Numerical conformal geometry for analytic maps of disks and annuli.
//!
//! Maps are truncated Laurent series ([`LaurentMap`]). From them the crate
//! computes n-diameters and logarithmic capacities of image curves, image
//! areas, reduced moduli and the deficiency `T(r)`, the ratio functions
//! `ψ`, and principal frequencies of image domains. Sampled quantities can be
//! checked for convexity and monotonicity in `log r`.
//!
//! Everything is generic over the real scalar ([`Scalar`], `f32` or `f64`);
//! the `*64` aliases fix it to `f64`.

// `!(x > y)` is used on purpose so that NaN takes the rejecting branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod convexity;
pub mod curve;
pub mod error;
pub mod laurent;
pub mod measures;
pub mod runner;
pub mod scalar;
pub mod spectral;

pub use capacity::{CapacityEstimate, CapacityOptions, FeketeOptions, FeketeResult};
pub use convexity::{ConvexityVerdict, SampledFunction, Transform};
pub use curve::CurveSample;
pub use error::{Error, Result};
pub use laurent::{AnnulusSpec, LaurentMap, MapDefinition, SRMembershipVerdict};
pub use measures::{MeasureOptions, MeasureRecord, MeasureReport};
pub use scalar::Scalar;
pub use spectral::{EigenOptions, EigenResult, GridDomain};

pub type LaurentMap64 = LaurentMap<f64>;
pub type AnnulusSpec64 = AnnulusSpec<f64>;
pub type CurveSample64 = CurveSample<f64>;
pub type FeketeResult64 = FeketeResult<f64>;
pub type CapacityEstimate64 = CapacityEstimate<f64>;
pub type MeasureReport64 = MeasureReport<f64>;
pub type MeasureRecord64 = MeasureRecord<f64>;
pub type SampledFunction64 = SampledFunction<f64>;
pub type ConvexityVerdict64 = ConvexityVerdict<f64>;
pub type GridDomain64 = GridDomain<f64>;
pub type EigenResult64 = EigenResult<f64>;

pub type LaurentMap32 = LaurentMap<f32>;
pub type CurveSample32 = CurveSample<f32>;
