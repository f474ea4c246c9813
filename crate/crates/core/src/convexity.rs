//! Discrete convexity and monotonicity verdicts for functions sampled on a
//! uniform grid in `log r`.

use serde::{Deserialize, Serialize};

use crate::capacity::log_hadamard_product_max;
use crate::error::{Error, Result};
use crate::laurent::LaurentMap;
use crate::scalar::Scalar;

/// Tolerance for quantities computed from closed forms (areas, H-products).
pub const EXACT_CONVEXITY_TOLERANCE: f64 = 1e-6;
/// Tolerance for capacity-derived samples.
pub const CAPACITY_CONVEXITY_TOLERANCE: f64 = 1e-3;

/// Relative spacing mismatch tolerated before a grid counts as nonuniform.
const UNIFORM_SPACING_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    Linear,
    /// Verdicts are computed on `ln(y)`.
    Log,
}

/// Ordinates over strictly increasing abscissae (normally `log r`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction<T> {
    abscissae: Vec<T>,
    ordinates: Vec<T>,
    transform: Transform,
}

impl<T: Scalar> SampledFunction<T> {
    pub fn new(abscissae: Vec<T>, ordinates: Vec<T>, transform: Transform) -> Result<Self> {
        if abscissae.len() != ordinates.len() {
            return Err(Error::Shape(format!(
                "{} abscissae vs {} ordinates",
                abscissae.len(),
                ordinates.len()
            )));
        }
        if abscissae.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Shape("abscissae must be strictly increasing".into()));
        }
        if ordinates.iter().any(|y| !y.is_finite()) {
            return Err(Error::Shape("ordinates must be finite".into()));
        }
        if transform == Transform::Log && ordinates.iter().any(|y| !(*y > T::zero())) {
            return Err(Error::Shape("log transform needs positive ordinates".into()));
        }
        Ok(Self {
            abscissae,
            ordinates,
            transform,
        })
    }

    /// Samples `y(r)` against `log r`.
    pub fn over_log_radius(radii: &[T], ordinates: Vec<T>, transform: Transform) -> Result<Self> {
        if radii.iter().any(|r| !(*r > T::zero())) {
            return Err(Error::Shape("radii must be positive".into()));
        }
        Self::new(radii.iter().map(|r| r.ln()).collect(), ordinates, transform)
    }

    pub fn abscissae(&self) -> &[T] {
        &self.abscissae
    }

    pub fn ordinates(&self) -> &[T] {
        &self.ordinates
    }

    pub fn transform(&self) -> Transform {
        self.transform
    }

    /// Ordinates after applying the transform.
    pub fn values(&self) -> Vec<T> {
        match self.transform {
            Transform::Linear => self.ordinates.clone(),
            Transform::Log => self.ordinates.iter().map(|y| y.ln()).collect(),
        }
    }

    fn uniform_spacing(&self) -> Result<T> {
        let n = self.abscissae.len();
        if n < 3 {
            return Err(Error::Shape(format!("need at least 3 samples, got {n}")));
        }
        let h = (self.abscissae[n - 1] - self.abscissae[0]) / T::from_usize_lossy(n - 1);
        let tol = T::lit(UNIFORM_SPACING_TOLERANCE) * h;
        for w in self.abscissae.windows(2) {
            if ((w[1] - w[0]) - h).abs() > tol {
                return Err(Error::Shape("abscissae are not uniformly spaced".into()));
            }
        }
        Ok(h)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation<T> {
    pub index: usize,
    pub magnitude: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityVerdict<T> {
    pub is_convex: bool,
    pub min_second_difference: T,
    pub is_nondecreasing: bool,
    pub min_first_difference: T,
    pub first_differences: Vec<T>,
    pub second_differences: Vec<T>,
    /// Abscissa spacing of the grid.
    pub spacing: T,
    pub tolerance: T,
    pub violations: Vec<Violation<T>>,
}

impl<T: Scalar> ConvexityVerdict<T> {
    /// Every first difference is at least `tau · spacing`.
    pub fn is_strictly_increasing_at(&self, tau: T) -> bool {
        let floor = tau * self.spacing;
        self.first_differences.iter().all(|d| *d >= floor)
    }
}

fn differences<T: Scalar>(y: &[T]) -> (Vec<T>, Vec<T>) {
    let first: Vec<T> = y.windows(2).map(|w| w[1] - w[0]).collect();
    let second: Vec<T> = y.windows(3).map(|w| w[2] - w[1] - (w[1] - w[0])).collect();
    (first, second)
}

fn min_of<T: Scalar>(v: &[T]) -> T {
    v.iter().copied().fold(T::infinity(), T::min)
}

/// Second differences `y_{i+1} − 2y_i + y_{i−1}` on a uniform grid.
/// Violations carry the interior index and the (negative) second difference.
pub fn check_convexity<T: Scalar>(f: &SampledFunction<T>, tol: T) -> Result<ConvexityVerdict<T>> {
    let spacing = f.uniform_spacing()?;
    let y = f.values();
    let (first, second) = differences(&y);
    let min2 = min_of(&second);
    let min1 = min_of(&first);
    let violations = second
        .iter()
        .enumerate()
        .filter(|(_, d)| **d < -tol)
        .map(|(i, d)| Violation {
            index: i + 1,
            magnitude: *d,
        })
        .collect();
    Ok(ConvexityVerdict {
        is_convex: min2 >= -tol,
        min_second_difference: min2,
        is_nondecreasing: min1 >= -tol,
        min_first_difference: min1,
        first_differences: first,
        second_differences: second,
        spacing,
        tolerance: tol,
        violations,
    })
}

/// Convexity plus a starting value forces monotonicity once the first slope
/// is nonnegative. Requires a convex input whose first ordinate equals
/// `initial_value` within `tol`.
///
/// Violations flag first differences below `−tol`, and any difference that
/// drops back to `≤ tol` after an earlier one exceeded `tol` (a plateau after
/// growth, which a convex function cannot have).
pub fn check_monotone_from_convexity<T: Scalar>(
    f: &SampledFunction<T>,
    initial_value: T,
    tol: T,
) -> Result<ConvexityVerdict<T>> {
    let mut verdict = check_convexity(f, tol)?;
    if !verdict.is_convex {
        return Err(Error::Precondition(format!(
            "samples are not convex (min second difference {})",
            verdict.min_second_difference
        )));
    }
    let y0 = f.values()[0];
    if (y0 - initial_value).abs() > tol {
        return Err(Error::Precondition(format!(
            "first ordinate {y0} differs from the initial value {initial_value}"
        )));
    }
    let mut violations = Vec::new();
    let mut grown = false;
    for (i, d) in verdict.first_differences.iter().enumerate() {
        if *d < -tol || (grown && *d <= tol) {
            violations.push(Violation {
                index: i,
                magnitude: *d,
            });
        }
        if *d > tol {
            grown = true;
        }
    }
    verdict.is_nondecreasing = verdict.min_first_difference >= -tol && violations.is_empty();
    verdict.violations = violations;
    Ok(verdict)
}

/// Slack of the three-circles inequality for `H` built from `angles`:
/// `λ log M(r₁) + (1 − λ) log M(r₂) − log M(r)` with
/// `λ = log(r₂/r)/log(r₂/r₁)` and `M(ρ) = max_{|z|=ρ}|H(z)|`.
///
/// `r = r₁` is allowed and gives exactly zero.
pub fn hadamard_three_circles_check<T: Scalar>(
    map: &LaurentMap<T>,
    angles: &[T],
    r1: T,
    r: T,
    r2: T,
) -> Result<T> {
    if !(r1 > T::zero() && r1 <= r && r < r2) {
        return Err(Error::Ordering(format!(
            "radii must satisfy 0 < r1 <= r < r2, got ({r1}, {r}, {r2})"
        )));
    }
    let lambda = (r2 / r).ln() / (r2 / r1).ln();
    let m1 = log_hadamard_product_max(map, angles, r1)?;
    let m2 = log_hadamard_product_max(map, angles, r2)?;
    if r == r1 {
        // λ = 1: both sides are log M(r₁)
        return Ok((lambda - T::one()) * m1 + (T::one() - lambda) * m2);
    }
    let m = log_hadamard_product_max(map, angles, r)?;
    Ok(lambda * m1 + (T::one() - lambda) * m2 - m)
}
