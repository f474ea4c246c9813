#![allow(dead_code)]

use annulus_geom::{AnnulusSpec, LaurentMap};
use num_complex::Complex;

pub const OUTER_RADIUS: f64 = 2.0;

pub fn spec() -> AnnulusSpec<f64> {
    AnnulusSpec::new(OUTER_RADIUS).unwrap()
}

pub fn blaschke(re: f64, im: f64) -> LaurentMap<f64> {
    LaurentMap::blaschke(Complex::new(re, im)).unwrap()
}

/// `z·exp(ε(z − 1/z))`: unimodular on the unit circle, not a Möbius map.
pub fn exp_twist(eps: f64) -> LaurentMap<f64> {
    LaurentMap::from_fn(
        move |z: Complex<f64>| z * (eps * (z - z.inv())).exp(),
        OUTER_RADIUS.sqrt(),
        -64,
        64,
    )
    .unwrap()
}

/// `a₁ = √1.01`, `a₋₁ = 0.1`: area-normalised but not in S(R).
pub fn two_term() -> LaurentMap<f64> {
    LaurentMap::from_coefficients([
        (1, Complex::new(1.01f64.sqrt(), 0.0)),
        (-1, Complex::new(0.1, 0.0)),
    ])
    .unwrap()
}

/// Maps in S(2) used by the inequality checks.
pub fn sr_family() -> Vec<(&'static str, LaurentMap<f64>)> {
    vec![
        ("identity", LaurentMap::identity()),
        ("rotation(0.7)", LaurentMap::rotation(0.7)),
        ("blaschke(0.2)", blaschke(0.2, 0.0)),
        ("blaschke(0.3+0.15i)", blaschke(0.3, 0.15)),
        ("exp_twist(0.1)", exp_twist(0.1)),
    ]
}

/// `T(r)` for the Blaschke factor with real `a`, from the image circle
/// `|w − c| = ρ`: `Cap J = ρ` and `Cap 1/J = ρ/(ρ² − c²)`.
pub fn blaschke_t(a: f64, r: f64) -> f64 {
    let den = 1.0 - a * a * r * r;
    let rho = r * (1.0 - a * a) / den;
    let c = a * (r * r - 1.0) / den;
    (rho * rho / (rho * rho - c * c)).ln() / std::f64::consts::TAU
}

pub fn blaschke_cap(a: f64, r: f64) -> f64 {
    r * (1.0 - a * a) / (1.0 - a * a * r * r)
}
