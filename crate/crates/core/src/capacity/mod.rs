//! n-diameters via Fekete points and logarithmic capacity by extrapolation.
//!
//! Everything is computed in the log domain: products of `n(n−1)/2`
//! distances overflow or underflow long before `n = 64`.

mod brute;
mod fekete;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

pub use brute::{n_diameter_brute, BruteForceOptions, MAX_BRUTE_N, MAX_BRUTE_SAMPLES};
pub use fekete::{fekete_on_curves, n_diameter_exchange_discrete, FeketeMethod, FeketeOptions, FeketeResult};

use crate::error::{Error, Result};
use crate::laurent::LaurentMap;
use crate::scalar::{golden_max, log_abs, unit, wrap_angle, Scalar};

/// Default Fekete orders used for capacity extrapolation.
pub const DEFAULT_N_SEQUENCE: [usize; 5] = [8, 12, 16, 24, 32];

/// Largest order accepted by the continuous optimiser.
pub const MAX_REFINED_N: usize = 64;

/// Closed curve given by a `2π`-periodic parametrisation.
pub trait ClosedCurve<T>: Sync {
    fn point(&self, theta: T) -> Complex<T>;
}

/// `θ ↦ f(r e^{iθ})`, the curve `J(r)`.
pub struct ImageCircle<'a, T> {
    map: &'a LaurentMap<T>,
    radius: T,
}

impl<'a, T: Scalar> ImageCircle<'a, T> {
    pub fn new(map: &'a LaurentMap<T>, radius: T) -> Result<Self> {
        map.check_radius(radius)?;
        Ok(Self { map, radius })
    }
}

impl<T: Scalar> ClosedCurve<T> for ImageCircle<'_, T> {
    fn point(&self, theta: T) -> Complex<T> {
        self.map.eval_unchecked(unit(theta) * self.radius)
    }
}

/// `θ ↦ 1/f(r e^{iθ})`, the curve `1/J(r)`.
pub struct InvertedImageCircle<'a, T> {
    map: &'a LaurentMap<T>,
    radius: T,
}

impl<'a, T: Scalar> InvertedImageCircle<'a, T> {
    pub fn new(map: &'a LaurentMap<T>, radius: T) -> Result<Self> {
        map.check_radius(radius)?;
        Ok(Self { map, radius })
    }
}

impl<T: Scalar> ClosedCurve<T> for InvertedImageCircle<'_, T> {
    fn point(&self, theta: T) -> Complex<T> {
        self.map.eval_unchecked(unit(theta) * self.radius).inv()
    }
}

/// Circle `center + radius·e^{iθ}`.
#[derive(Debug, Clone, Copy)]
pub struct Circle<T> {
    pub center: Complex<T>,
    pub radius: T,
}

impl<T: Scalar> ClosedCurve<T> for Circle<T> {
    fn point(&self, theta: T) -> Complex<T> {
        self.center + unit(theta) * self.radius
    }
}

/// n-diameter of `J(r)` over continuous parameter angles.
pub fn n_diameter_refined<T: Scalar>(
    map: &LaurentMap<T>,
    r: T,
    n: usize,
    opts: &FeketeOptions,
) -> Result<FeketeResult<T>> {
    if !(2..=MAX_REFINED_N).contains(&n) {
        return Err(Error::Precondition(format!("refined optimiser supports 2 <= n <= {MAX_REFINED_N}, got {n}")));
    }
    let curve = ImageCircle::new(map, r)?;
    fekete_on_curves(&[&curve], n, opts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityOptions {
    pub n_sequence: Vec<usize>,
    pub fekete: FeketeOptions,
}

impl Default for CapacityOptions {
    fn default() -> Self {
        Self {
            n_sequence: DEFAULT_N_SEQUENCE.to_vec(),
            fekete: FeketeOptions::default(),
        }
    }
}

/// Capacity extrapolated from a sequence of n-diameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityEstimate<T> {
    pub value: T,
    /// `(n, d_n)` pairs in the order computed.
    pub n_sequence: Vec<(usize, T)>,
    /// Largest absolute residual of the log-domain fit.
    pub extrapolation_residual: T,
    /// Fitted coefficient of the `1/n` correction.
    pub slope: T,
    pub warnings: Vec<String>,
}

impl<T: Scalar> CapacityEstimate<T> {
    /// Extrapolates `d_n → Cap`.
    ///
    /// The circle identity `d_n = Cap·n^{1/(n−1)}` is divided out first; the
    /// remainder is fitted as `log Cap + c/n` by least squares.
    pub fn from_n_diameters(pairs: Vec<(usize, T)>, warnings: Vec<String>) -> Result<Self> {
        if pairs.len() < 2 {
            return Err(Error::Precondition("capacity extrapolation needs at least two orders".into()));
        }
        let pts: Vec<(T, T)> = pairs
            .iter()
            .map(|&(n, d)| {
                let nf = T::from_usize_lossy(n);
                let circle = nf.ln() / (nf - T::one());
                (T::one() / nf, d.ln() - circle)
            })
            .collect();
        let k = T::from_usize_lossy(pts.len());
        let mx = pts.iter().map(|p| p.0).sum::<T>() / k;
        let my = pts.iter().map(|p| p.1).sum::<T>() / k;
        let sxx: T = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        let sxy: T = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let slope = if sxx > T::zero() { sxy / sxx } else { T::zero() };
        let intercept = my - slope * mx;
        let residual = pts
            .iter()
            .map(|p| (p.1 - intercept - slope * p.0).abs())
            .fold(T::zero(), T::max);
        Ok(Self {
            value: intercept.exp(),
            n_sequence: pairs,
            extrapolation_residual: residual,
            slope,
            warnings,
        })
    }
}

/// Capacity of the union of `curves` (for a single curve, of the curve itself).
pub fn capacity_of_curves<T: Scalar>(
    curves: &[&dyn ClosedCurve<T>],
    opts: &CapacityOptions,
) -> Result<CapacityEstimate<T>> {
    let mut pairs = Vec::with_capacity(opts.n_sequence.len());
    let mut warnings = Vec::new();
    for &n in &opts.n_sequence {
        if !(2..=MAX_REFINED_N).contains(&n) {
            return Err(Error::Precondition(format!("order {n} outside 2..={MAX_REFINED_N}")));
        }
        let res = fekete_on_curves(curves, n, &opts.fekete)?;
        warnings.extend(res.warnings.iter().map(|w| format!("n = {n}: {w}")));
        pairs.push((n, res.n_diameter));
    }
    CapacityEstimate::from_n_diameters(pairs, warnings)
}

/// `Cap(J(r))`.
pub fn capacity<T: Scalar>(map: &LaurentMap<T>, r: T, opts: &CapacityOptions) -> Result<CapacityEstimate<T>> {
    let curve = ImageCircle::new(map, r)?;
    capacity_of_curves(&[&curve], opts)
}

/// `Cap(1/J(r))`.
pub fn inverse_capacity<T: Scalar>(map: &LaurentMap<T>, r: T, opts: &CapacityOptions) -> Result<CapacityEstimate<T>> {
    let curve = InvertedImageCircle::new(map, r)?;
    capacity_of_curves(&[&curve], opts)
}

/// Rotation samples used when maximising `|H|` over a circle.
pub const HADAMARD_SAMPLES: usize = 1024;

/// `max_{|z| = r} log|H(z)|` for `H(z) = Π_{j<k}(f(w_j z) − f(w_k z))`,
/// `w_j = e^{iθ_j}`.
///
/// The maximum is located on [`HADAMARD_SAMPLES`] rotations and polished by
/// golden-section search between the neighbouring samples.
pub fn log_hadamard_product_max<T: Scalar>(map: &LaurentMap<T>, angles: &[T], r: T) -> Result<T> {
    if angles.len() < 2 {
        return Err(Error::Precondition("need at least two angles".into()));
    }
    let wrapped: Vec<T> = angles.iter().map(|&t| wrap_angle(t)).collect();
    let tiny = T::lit(1e-12);
    for j in 0..wrapped.len() {
        for k in (j + 1)..wrapped.len() {
            let d = wrap_angle(wrapped[j] - wrapped[k]);
            if d < tiny || T::TAU() - d < tiny {
                return Err(Error::Degenerate(format!("angles {j} and {k} coincide")));
            }
        }
    }
    map.check_radius(r)?;
    let log_h = |phi: T| -> T {
        let vals: Vec<Complex<T>> = wrapped
            .iter()
            .map(|&t| map.eval_unchecked(unit(t + phi) * r))
            .collect();
        let mut s = T::zero();
        for j in 0..vals.len() {
            for k in (j + 1)..vals.len() {
                s += log_abs(vals[j] - vals[k]);
            }
        }
        s
    };
    let step = T::TAU() / T::from_usize_lossy(HADAMARD_SAMPLES);
    let (mut best_phi, mut best) = (T::zero(), T::neg_infinity());
    for i in 0..HADAMARD_SAMPLES {
        let phi = step * T::from_usize_lossy(i);
        let v = log_h(phi);
        if v > best {
            best = v;
            best_phi = phi;
        }
    }
    let (_, polished) = golden_max(log_h, best_phi - step, best_phi + step, T::lit(1e-12), 200);
    Ok(best.max(polished))
}

/// `max_{|z| = r} |H(z)|`.
pub fn hadamard_product_max<T: Scalar>(map: &LaurentMap<T>, angles: &[T], r: T) -> Result<T> {
    log_hadamard_product_max(map, angles, r).map(T::exp)
}
