use annulus_geom::capacity::{n_diameter_exchange_discrete, n_diameter_refined};
use annulus_geom::convexity::{check_convexity, SampledFunction, Transform};
use annulus_geom::curve::{curve_diameter, invert_curve, sample_curve};
use annulus_geom::laurent::{annulus_image_area, area_lemma_gap};
use annulus_geom::{FeketeOptions, LaurentMap};
use approx::assert_relative_eq;
use num_complex::Complex;
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 24,
        ..ProptestConfig::default()
    }
}

/// `a₁z + a₂z² + a₋₁/z` with `a₁` chosen so that `Σ n|a_n|² = 1`.
fn normalized(a2: Complex<f64>, am1: Complex<f64>) -> LaurentMap<f64> {
    let a1 = (1.0 + am1.norm_sqr() - 2.0 * a2.norm_sqr()).sqrt();
    LaurentMap::from_coefficients([(1, Complex::new(a1, 0.0)), (2, a2), (-1, am1)]).unwrap()
}

fn small_complex() -> impl Strategy<Value = Complex<f64>> {
    (-0.2f64..0.2, -0.2f64..0.2).prop_map(|(re, im)| Complex::new(re, im))
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn inversion_is_an_involution(a in small_complex(), r in 1.0f64..1.8) {
        let map = LaurentMap::blaschke(a).unwrap();
        let c = sample_curve(&map, r, 128).unwrap();
        let back = invert_curve(&invert_curve(&c).unwrap()).unwrap();
        for (p, q) in c.points().iter().zip(back.points()) {
            prop_assert!((p - q).norm() <= 1e-13 * p.norm());
        }
    }

    #[test]
    fn discrete_n_diameter_scales_linearly(a in small_complex(), s in 0.1f64..10.0, n in 2usize..7) {
        let map = LaurentMap::blaschke(a).unwrap();
        let c = sample_curve(&map, 1.4, 96).unwrap();
        let scaled = sample_curve(&map.scaled(Complex::new(0.0, s)), 1.4, 96).unwrap();
        let d = n_diameter_exchange_discrete(&c, n).unwrap().n_diameter;
        let ds = n_diameter_exchange_discrete(&scaled, n).unwrap().n_diameter;
        assert_relative_eq!(ds, s * d, max_relative = 1e-12);
        assert_relative_eq!(curve_diameter(&scaled), s * curve_diameter(&c), max_relative = 1e-12);
    }

    #[test]
    fn refined_n_diameter_ignores_rotation(a in small_complex(), theta in 0.0f64..std::f64::consts::TAU, n in 3usize..8) {
        let map = LaurentMap::blaschke(a).unwrap();
        let opts = FeketeOptions::default();
        let d = n_diameter_refined(&map, 1.3, n, &opts).unwrap().n_diameter;
        let dr = n_diameter_refined(&map.rotated(theta), 1.3, n, &opts).unwrap().n_diameter;
        assert_relative_eq!(d, dr, max_relative = 1e-9);
    }

    #[test]
    fn convexity_verdict_is_affine_invariant(
        ys in prop::collection::vec(-1.0f64..1.0, 5..12),
        scale in 0.5f64..4.0,
        slope in -3.0f64..3.0,
        shift in -5.0f64..5.0,
    ) {
        let xs: Vec<f64> = (0..ys.len()).map(|i| i as f64 * 0.25).collect();
        let base = check_convexity(&SampledFunction::new(xs.clone(), ys.clone(), Transform::Linear).unwrap(), 0.0).unwrap();
        let moved: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| scale * y + slope * x + shift).collect();
        let v = check_convexity(&SampledFunction::new(xs.clone(), moved, Transform::Linear).unwrap(), 0.0).unwrap();
        assert_relative_eq!(v.min_second_difference, scale * base.min_second_difference, epsilon = 1e-9);
        // y and -y are both convex only when linear
        let neg: Vec<f64> = ys.iter().map(|y| -y).collect();
        let up = check_convexity(&SampledFunction::new(xs.clone(), ys, Transform::Linear).unwrap(), 1e-9).unwrap();
        let down = check_convexity(&SampledFunction::new(xs, neg, Transform::Linear).unwrap(), 1e-9).unwrap();
        if up.is_convex && down.is_convex {
            prop_assert!(base.second_differences.iter().all(|d| d.abs() <= 1e-9));
        }
    }

    #[test]
    fn area_gap_is_nonnegative_and_grows(a2 in small_complex(), am1 in small_complex(), rho in 1.0f64..1.9) {
        let map = normalized(a2, am1);
        let g = area_lemma_gap(&map, rho).unwrap();
        prop_assert!(g >= -1e-14);
        prop_assert!(area_lemma_gap(&map, rho * 1.05).unwrap() >= g - 1e-14);
        let h = annulus_image_area(&map, rho).unwrap();
        assert_relative_eq!(h - std::f64::consts::PI * (rho * rho - 1.0), g, epsilon = 1e-12);
    }

    #[test]
    fn n_diameters_decrease_in_n(a in small_complex()) {
        let map = LaurentMap::blaschke(a).unwrap();
        let opts = FeketeOptions::default();
        let ds: Vec<f64> = (2..=8)
            .map(|n| n_diameter_refined(&map, 1.5, n, &opts).unwrap().n_diameter)
            .collect();
        for w in ds.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-10), "{ds:?}");
        }
    }
}

#[test]
fn f32_and_f64_agree_on_the_area_series() {
    let m64 = normalized(Complex::new(0.1, 0.05), Complex::new(-0.1, 0.0));
    let m32 = LaurentMap::<f32>::from_coefficients(m64.coefficients().map(|(n, a)| (n, Complex::new(a.re as f32, a.im as f32)))).unwrap();
    let h64 = annulus_image_area(&m64, 1.5).unwrap();
    let h32 = annulus_image_area(&m32, 1.5f32).unwrap();
    assert_relative_eq!(h32 as f64, h64, max_relative = 1e-5);
}
