//! Truncated Laurent series and the closed-form map families built on them.
//!
//! A [`LaurentMap`] always carries a finite coefficient table
//! `a_{n_min}, …, a_{n_max}`. Closed-form families (Blaschke factors,
//! Joukowski maps, the identity) keep their tag so that evaluation uses the
//! exact formula, while area computations read the coefficient table.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{unit, Scalar};

/// Default truncation order used when closed forms are expanded by quadrature.
pub const DEFAULT_TRUNCATION: i32 = 64;

/// Tolerance on `Σ n|a_n|² − 1` accepted by the area routines.
pub const PRELIM_TOLERANCE: f64 = 1e-6;

/// Quadrature coefficients below `CHOP_FACTOR · ε · max|a_n| radius^n` are zeroed.
const CHOP_FACTOR: f64 = 1e3;

/// Tolerance used to decide that a map is a rotation `e^{iθ}z`.
pub const ROTATION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum MapFamily<T> {
    GenericLaurent,
    /// `(z − a) / (1 − ā z)`
    Blaschke { a: Complex<T> },
    /// `z + c² / z`
    Joukowski { c: T },
    Identity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentMap<T> {
    n_min: i32,
    coeffs: Vec<Complex<T>>,
    family: MapFamily<T>,
}

impl<T: Scalar> LaurentMap<T> {
    /// Builds a generic Laurent map from `(n, a_n)` pairs. Repeated indices add up.
    pub fn from_coefficients<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i32, Complex<T>)>,
    {
        let pairs: Vec<_> = pairs.into_iter().collect();
        if pairs.is_empty() {
            return Err(Error::Validation("empty coefficient table".into()));
        }
        let lo = pairs.iter().map(|p| p.0).min().unwrap().min(0);
        let hi = pairs.iter().map(|p| p.0).max().unwrap().max(0);
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); (hi - lo + 1) as usize];
        for (n, a) in pairs {
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(Error::Validation(format!("coefficient a_{n} is not finite")));
            }
            coeffs[(n - lo) as usize] += a;
        }
        Self::with_family(lo, coeffs, MapFamily::GenericLaurent)
    }

    fn with_family(n_min: i32, coeffs: Vec<Complex<T>>, family: MapFamily<T>) -> Result<Self> {
        if coeffs.iter().all(|a| a.norm_sqr() == T::zero()) {
            return Err(Error::Validation("all coefficients are zero".into()));
        }
        Ok(Self {
            n_min,
            coeffs,
            family,
        })
    }

    pub fn identity() -> Self {
        let one = Complex::new(T::one(), T::zero());
        Self {
            n_min: 0,
            coeffs: vec![Complex::new(T::zero(), T::zero()), one],
            family: MapFamily::Identity,
        }
    }

    /// `e^{iθ} z`, stored as a generic Laurent map.
    pub fn rotation(theta: T) -> Self {
        Self {
            n_min: 0,
            coeffs: vec![Complex::new(T::zero(), T::zero()), unit(theta)],
            family: MapFamily::GenericLaurent,
        }
    }

    /// Blaschke factor `(z − a)/(1 − ā z)`, `|a| < 1`.
    ///
    /// The coefficient table is the Taylor expansion at 0,
    /// `−a + (1 − |a|²) Σ_{n≥1} ā^{n−1} zⁿ`, truncated at [`DEFAULT_TRUNCATION`].
    pub fn blaschke(a: Complex<T>) -> Result<Self> {
        if !(a.norm() < T::one()) {
            return Err(Error::Validation(format!("Blaschke parameter must satisfy |a| < 1, got |a| = {}", a.norm())));
        }
        let scale = T::one() - a.norm_sqr();
        let mut table = Vec::with_capacity(DEFAULT_TRUNCATION as usize + 1);
        table.push(-a);
        let mut power = Complex::new(T::one(), T::zero());
        for _ in 1..=DEFAULT_TRUNCATION {
            table.push(power * scale);
            power *= a.conj();
        }
        Self::with_family(0, table, MapFamily::Blaschke { a })
    }

    /// Joukowski map `z + c²/z`, `c > 0`.
    pub fn joukowski(c: T) -> Result<Self> {
        if !(c > T::zero()) || !c.is_finite() {
            return Err(Error::Validation(format!("Joukowski parameter must be > 0, got {c}")));
        }
        let zero = Complex::new(T::zero(), T::zero());
        let coeffs = vec![Complex::new(c * c, T::zero()), zero, Complex::new(T::one(), T::zero())];
        Self::with_family(-1, coeffs, MapFamily::Joukowski { c })
    }

    /// Expands an arbitrary analytic function into a generic Laurent map by
    /// trapezoidal quadrature of the Cauchy coefficient integrals on `|z| = radius`.
    pub fn from_fn<F>(f: F, radius: T, n_min: i32, n_max: i32) -> Result<Self>
    where
        F: Fn(Complex<T>) -> Complex<T>,
    {
        if !(radius > T::zero()) || n_min > 0 || n_max < 0 {
            return Err(Error::Validation("quadrature needs radius > 0 and n_min <= 0 <= n_max".into()));
        }
        let table = cauchy_coefficients(f, radius, n_min, n_max);
        Self::with_family(n_min, table, MapFamily::GenericLaurent)
    }

    /// Re-expands the map as a generic Laurent table on `|z| = √R`.
    pub fn to_laurent(&self, spec: &AnnulusSpec<T>, n_max: i32) -> Result<Self> {
        let radius = spec.outer_radius.sqrt();
        self.check_radius(radius)?;
        let lo = if self.has_negative_powers() || matches!(self.family, MapFamily::Joukowski { .. }) {
            -n_max
        } else {
            0
        };
        Self::from_fn(|z| self.eval_unchecked(z), radius, lo, n_max)
    }

    pub fn family(&self) -> &MapFamily<T> {
        &self.family
    }

    pub fn n_min(&self) -> i32 {
        self.n_min
    }

    pub fn n_max(&self) -> i32 {
        self.n_min + self.coeffs.len() as i32 - 1
    }

    /// `a_n`, zero outside the stored range.
    pub fn coeff(&self, n: i32) -> Complex<T> {
        let idx = n - self.n_min;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            Complex::new(T::zero(), T::zero())
        } else {
            self.coeffs[idx as usize]
        }
    }

    /// Iterates `(n, a_n)` over the stored table.
    pub fn coefficients(&self) -> impl Iterator<Item = (i32, Complex<T>)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, a)| (self.n_min + i as i32, *a))
    }

    fn has_negative_powers(&self) -> bool {
        self.coefficients().any(|(n, a)| n < 0 && a.norm_sqr() > T::zero())
    }

    /// Precomposition with a rotation: `a_n ↦ e^{inθ} a_n`.
    pub fn rotated(&self, theta: T) -> Self {
        let coeffs = self
            .coefficients()
            .map(|(n, a)| a * unit(theta * T::from_i64_lossy(n as i64)))
            .collect();
        Self {
            n_min: self.n_min,
            coeffs,
            family: MapFamily::GenericLaurent,
        }
    }

    /// `λ·f` as a generic Laurent map.
    pub fn scaled(&self, lambda: Complex<T>) -> Self {
        Self {
            n_min: self.n_min,
            coeffs: self.coeffs.iter().map(|a| *a * lambda).collect(),
            family: MapFamily::GenericLaurent,
        }
    }

    /// True for maps of the form `e^{iθ} z`.
    pub fn is_rotation(&self) -> bool {
        match &self.family {
            MapFamily::Identity => true,
            MapFamily::Blaschke { a } => a.norm() == T::zero(),
            MapFamily::Joukowski { .. } => false,
            MapFamily::GenericLaurent => {
                let tol = T::lit(ROTATION_TOLERANCE);
                self.coefficients().all(|(n, a)| {
                    if n == 1 {
                        (a.norm() - T::one()).abs() <= tol
                    } else {
                        a.norm() <= tol
                    }
                })
            }
        }
    }

    /// Radii `r` for which the circle `|z| = r` lies in the domain of analyticity.
    pub fn check_radius(&self, r: T) -> Result<()> {
        if !r.is_finite() || r < T::zero() {
            return Err(Error::Domain(format!("radius {r} is not a finite nonnegative number")));
        }
        let needs_positive = self.has_negative_powers() || matches!(self.family, MapFamily::Joukowski { .. });
        if needs_positive && r == T::zero() {
            return Err(Error::Domain("radius 0 with negative powers present".into()));
        }
        if let MapFamily::Blaschke { a } = &self.family {
            let abs_a = a.norm();
            if abs_a > T::zero() && r >= T::one() / abs_a {
                return Err(Error::Domain(format!(
                    "radius {r} reaches the pole of the Blaschke factor at |z| = {}",
                    T::one() / abs_a
                )));
            }
        }
        Ok(())
    }

    /// `f(z)`.
    pub fn evaluate(&self, z: Complex<T>) -> Result<Complex<T>> {
        self.check_point(z)?;
        Ok(self.eval_unchecked(z))
    }

    fn check_point(&self, z: Complex<T>) -> Result<()> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Domain("non-finite argument".into()));
        }
        let zero = z.norm_sqr() == T::zero();
        match &self.family {
            MapFamily::Joukowski { .. } if zero => Err(Error::Domain("Joukowski map has a pole at z = 0".into())),
            MapFamily::Blaschke { a } => {
                let den = Complex::new(T::one(), T::zero()) - a.conj() * z;
                if den.norm() <= T::epsilon() {
                    Err(Error::Domain("argument is the pole of the Blaschke factor".into()))
                } else {
                    Ok(())
                }
            }
            MapFamily::GenericLaurent if zero && self.has_negative_powers() => {
                Err(Error::Domain("z = 0 with negative-index coefficients present".into()))
            }
            _ => Ok(()),
        }
    }

    /// Evaluation without domain checks. Used by inner optimisation loops
    /// once the radius has been validated with [`check_radius`](Self::check_radius).
    pub fn eval_unchecked(&self, z: Complex<T>) -> Complex<T> {
        match &self.family {
            MapFamily::Identity => z,
            MapFamily::Joukowski { c } => z + Complex::new(*c * *c, T::zero()) / z,
            MapFamily::Blaschke { a } => blaschke_eval(*a, z),
            MapFamily::GenericLaurent => self.series(z),
        }
    }

    fn series(&self, z: Complex<T>) -> Complex<T> {
        let zero = Complex::new(T::zero(), T::zero());
        let split = (-self.n_min) as usize;
        // nonnegative powers by Horner in z
        let mut pos = zero;
        for a in self.coeffs[split..].iter().rev() {
            pos = pos * z + *a;
        }
        if split == 0 {
            return pos;
        }
        // negative powers by Horner in 1/z
        let w = z.inv();
        let mut neg = zero;
        for a in self.coeffs[..split].iter() {
            neg = (neg + *a) * w;
        }
        pos + neg
    }

    /// `f′(z)`.
    pub fn derivative_at(&self, z: Complex<T>) -> Result<Complex<T>> {
        self.check_point(z)?;
        let one = Complex::new(T::one(), T::zero());
        Ok(match &self.family {
            MapFamily::Identity => one,
            MapFamily::Joukowski { c } => one - Complex::new(*c * *c, T::zero()) / (z * z),
            MapFamily::Blaschke { a } => {
                let den = one - a.conj() * z;
                Complex::new(T::one() - a.norm_sqr(), T::zero()) / (den * den)
            }
            MapFamily::GenericLaurent => {
                let mut acc = Complex::new(T::zero(), T::zero());
                for (n, a) in self.coefficients() {
                    if n != 0 && a.norm_sqr() > T::zero() {
                        acc += a * T::from_i64_lossy(n as i64) * z.powi(n - 1);
                    }
                }
                acc
            }
        })
    }

    /// Short human readable identifier, stable across runs.
    pub fn label(&self) -> String {
        match &self.family {
            MapFamily::Identity => "identity".to_string(),
            MapFamily::Blaschke { a } => format!("blaschke({}{:+}i)", a.re, a.im),
            MapFamily::Joukowski { c } => format!("joukowski({c})"),
            MapFamily::GenericLaurent => {
                let terms: Vec<String> = self
                    .coefficients()
                    .filter(|(_, a)| a.norm_sqr() > T::zero())
                    .take(6)
                    .map(|(n, a)| format!("({}{:+}i)z^{n}", a.re, a.im))
                    .collect();
                let more = if self.coefficients().filter(|(_, a)| a.norm_sqr() > T::zero()).count() > 6 {
                    "+..."
                } else {
                    ""
                };
                format!("laurent[{}{more}]", terms.join("+"))
            }
        }
    }
}

fn blaschke_eval<T: Scalar>(a: Complex<T>, z: Complex<T>) -> Complex<T> {
    (z - a) / (Complex::new(T::one(), T::zero()) - a.conj() * z)
}

/// Trapezoidal rule for `a_n = (1/2πi) ∮ f(z) z^{-n-1} dz` on `|z| = radius`.
fn cauchy_coefficients<T: Scalar, F: Fn(Complex<T>) -> Complex<T>>(
    f: F,
    radius: T,
    n_min: i32,
    n_max: i32,
) -> Vec<Complex<T>> {
    let span = (n_max - n_min + 1) as usize;
    let nodes = (4 * span).max(256);
    let step = T::TAU() / T::from_usize_lossy(nodes);
    let values: Vec<Complex<T>> = (0..nodes)
        .map(|k| f(unit(step * T::from_usize_lossy(k)) * radius))
        .collect();
    let inv = T::one() / T::from_usize_lossy(nodes);
    // coefficients scaled to the quadrature circle, |a_n| radius^n
    let scaled: Vec<Complex<T>> = (n_min..=n_max)
        .map(|n| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (k, v) in values.iter().enumerate() {
                // reduce n·k mod nodes to keep the twiddle angle small
                let idx = ((n as i64 * k as i64).rem_euclid(nodes as i64)) as usize;
                acc += *v * unit(-step * T::from_usize_lossy(idx));
            }
            acc * inv
        })
        .collect();
    // drop entries at the rounding floor; they would be amplified by
    // radius^{-n} and swamp the series away from the quadrature circle
    let peak = scaled.iter().map(|c| c.norm()).fold(T::zero(), T::max);
    let floor = peak * T::epsilon() * T::lit(CHOP_FACTOR);
    (n_min..=n_max)
        .zip(scaled)
        .map(|(n, c)| {
            if c.norm() < floor {
                Complex::new(T::zero(), T::zero())
            } else {
                c * radius.powi(-n)
            }
        })
        .collect()
}

/// The annulus `A(1, R)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusSpec<T> {
    pub inner_radius: T,
    pub outer_radius: T,
}

impl<T: Scalar> AnnulusSpec<T> {
    pub fn new(outer_radius: T) -> Result<Self> {
        if !(outer_radius > T::one()) || !outer_radius.is_finite() {
            return Err(Error::Validation(format!("outer radius must be finite and > 1, got {outer_radius}")));
        }
        Ok(Self {
            inner_radius: T::one(),
            outer_radius,
        })
    }
}

/// `Σ_{n≠0} n|a_n|² − 1`.
pub fn check_prelim_constraint<T: Scalar>(map: &LaurentMap<T>) -> T {
    map.coefficients()
        .filter(|(n, _)| *n != 0)
        .map(|(n, a)| T::from_i64_lossy(n as i64) * a.norm_sqr())
        .sum::<T>()
        - T::one()
}

fn validate_area_input<T: Scalar>(map: &LaurentMap<T>, rho: T) -> Result<()> {
    if !rho.is_finite() || rho < T::one() {
        return Err(Error::Domain(format!("area radius must be >= 1, got {rho}")));
    }
    let dev = check_prelim_constraint(map);
    let tol = T::lit(PRELIM_TOLERANCE);
    if !(dev.abs() <= tol) {
        return Err(Error::Constraint {
            deviation: dev.to_f64_lossy(),
            tolerance: PRELIM_TOLERANCE,
        });
    }
    Ok(())
}

/// Area of `f(A(1, ρ))` from the coefficient table:
/// `h(ρ) = −π + π Σ_{n≠0} n|a_n|² ρ^{2n}`.
pub fn annulus_image_area<T: Scalar>(map: &LaurentMap<T>, rho: T) -> Result<T> {
    validate_area_input(map, rho)?;
    let rho2 = rho * rho;
    let s: T = map
        .coefficients()
        .filter(|(n, _)| *n != 0)
        .map(|(n, a)| T::from_i64_lossy(n as i64) * a.norm_sqr() * rho2.powi(n))
        .sum();
    Ok(T::PI() * (s - T::one()))
}

/// `h(ρ) − π(ρ² − 1)` evaluated term by term as
/// `πρ² Σ_{n≠0} n|a_n|² (ρ^{2n−2} − 1)`; every term is nonnegative.
pub fn area_lemma_gap<T: Scalar>(map: &LaurentMap<T>, rho: T) -> Result<T> {
    validate_area_input(map, rho)?;
    let rho2 = rho * rho;
    let s: T = map
        .coefficients()
        .filter(|(n, _)| *n != 0)
        .map(|(n, a)| T::from_i64_lossy(n as i64) * a.norm_sqr() * (rho2.powi(n - 1) - T::one()))
        .sum();
    Ok(T::PI() * rho2 * s)
}

/// Outcome of the sampled S(R) membership test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SRMembershipVerdict<T> {
    pub unit_modulus_on_circle: bool,
    pub exceeds_one_inside: bool,
    pub injective_on_samples: bool,
    pub max_unit_circle_deviation: T,
    pub min_interior_modulus: T,
    pub min_image_separation: T,
}

impl<T> SRMembershipVerdict<T> {
    pub fn is_member(&self) -> bool {
        self.unit_modulus_on_circle && self.exceeds_one_inside && self.injective_on_samples
    }

    pub fn failure_summary(&self) -> String {
        let mut parts = Vec::new();
        if !self.unit_modulus_on_circle {
            parts.push("|f| != 1 on the unit circle");
        }
        if !self.exceeds_one_inside {
            parts.push("|f| <= 1 somewhere inside the annulus");
        }
        if !self.injective_on_samples {
            parts.push("sampled images coincide (not injective)");
        }
        parts.join("; ")
    }
}

/// Number of sampled radii used by the interior and injectivity checks.
const MEMBERSHIP_RADII: usize = 8;

/// Sampled check that `map` belongs to S(R): unimodular on `|z| = 1`,
/// modulus above one inside `A(1, R)`, and no coincident images on a
/// polar grid. Never fails; a map that cannot be evaluated on the annulus
/// simply fails the checks.
pub fn validate_sr_membership<T: Scalar>(
    map: &LaurentMap<T>,
    spec: &AnnulusSpec<T>,
    samples: usize,
) -> SRMembershipVerdict<T> {
    let samples = samples.max(64);
    let unit_tol = T::lit(1e-8).max(T::epsilon() * T::lit(1e3));
    let step = T::TAU() / T::from_usize_lossy(samples);
    let big = T::infinity();

    let analytic = (0..MEMBERSHIP_RADII).all(|j| map.check_radius(radius_at(spec, j)).is_ok());
    if !analytic {
        return SRMembershipVerdict {
            unit_modulus_on_circle: false,
            exceeds_one_inside: false,
            injective_on_samples: false,
            max_unit_circle_deviation: big,
            min_interior_modulus: T::zero(),
            min_image_separation: T::zero(),
        };
    }

    let mut grid = Vec::with_capacity(samples * MEMBERSHIP_RADII);
    let mut max_dev = T::zero();
    let mut min_mod = big;
    for j in 0..MEMBERSHIP_RADII {
        let r = radius_at(spec, j);
        for k in 0..samples {
            // stagger alternate rings so the grid is not radially aligned
            let shift = if j % 2 == 1 { T::lit(0.5) } else { T::zero() };
            let theta = step * (T::from_usize_lossy(k) + shift);
            let w = map.eval_unchecked(unit(theta) * r);
            if j == 0 {
                max_dev = max_dev.max((w.norm() - T::one()).abs());
            } else {
                min_mod = min_mod.min(w.norm());
            }
            grid.push(w);
        }
    }

    let mut diameter = T::zero();
    let mut min_sep = big;
    for i in 0..grid.len() {
        for k in (i + 1)..grid.len() {
            let d = (grid[i] - grid[k]).norm();
            if !d.is_finite() {
                min_sep = T::zero();
                continue;
            }
            diameter = diameter.max(d);
            min_sep = min_sep.min(d);
        }
    }

    SRMembershipVerdict {
        unit_modulus_on_circle: max_dev <= unit_tol,
        exceeds_one_inside: min_mod > T::one(),
        injective_on_samples: min_sep > T::lit(1e-8) * diameter,
        max_unit_circle_deviation: max_dev,
        min_interior_modulus: min_mod,
        min_image_separation: min_sep,
    }
}

/// `R^{j/K}` for `j = 0..K`; ring 0 is the unit circle.
fn radius_at<T: Scalar>(spec: &AnnulusSpec<T>, j: usize) -> T {
    spec.outer_radius
        .powf(T::from_usize_lossy(j) / T::from_usize_lossy(MEMBERSHIP_RADII))
}

/// JSON map definition accepted by the command line tools.
///
/// ```json
/// {"type":"laurent","coeffs":[[1,1.0,0.0],[-1,0.1,0.0]]}
/// {"type":"blaschke","a":[0.2,0.0]}
/// {"type":"joukowski","c":0.5}
/// {"type":"identity"}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MapDefinition {
    Laurent { coeffs: Vec<(i32, f64, f64)> },
    Blaschke { a: [f64; 2] },
    Joukowski { c: f64 },
    Identity,
}

impl MapDefinition {
    pub fn parse(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn build<T: Scalar>(&self) -> Result<LaurentMap<T>> {
        match self {
            MapDefinition::Identity => Ok(LaurentMap::identity()),
            MapDefinition::Joukowski { c } => LaurentMap::joukowski(T::lit(*c)),
            MapDefinition::Blaschke { a } => LaurentMap::blaschke(Complex::new(T::lit(a[0]), T::lit(a[1]))),
            MapDefinition::Laurent { coeffs } => LaurentMap::from_coefficients(
                coeffs
                    .iter()
                    .map(|(n, re, im)| (*n, Complex::new(T::lit(*re), T::lit(*im)))),
            ),
        }
    }
}

impl<T: Scalar> LaurentMap<T> {
    /// The JSON definition that rebuilds this map.
    pub fn definition(&self) -> MapDefinition {
        match &self.family {
            MapFamily::Identity => MapDefinition::Identity,
            MapFamily::Joukowski { c } => MapDefinition::Joukowski { c: c.to_f64_lossy() },
            MapFamily::Blaschke { a } => MapDefinition::Blaschke {
                a: [a.re.to_f64_lossy(), a.im.to_f64_lossy()],
            },
            MapFamily::GenericLaurent => MapDefinition::Laurent {
                coeffs: self
                    .coefficients()
                    .filter(|(_, a)| a.norm_sqr() > T::zero())
                    .map(|(n, a)| (n, a.re.to_f64_lossy(), a.im.to_f64_lossy()))
                    .collect(),
            },
        }
    }
}
