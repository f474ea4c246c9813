//! Discretised image curves `J(r) = f(r·∂D)` and elementary measurements on them.

use std::io::Write;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::LaurentMap;
use crate::measures::format_number;
use crate::scalar::{golden_max, unit, Scalar};

/// Sample count used for measurements.
pub const DEFAULT_SAMPLES: usize = 1024;
/// Sample count used for area cross-checks.
pub const AREA_CHECK_SAMPLES: usize = 4096;

const DEGENERATE_MODULUS: f64 = 1e-12;

/// Closed polyline of image points at uniform parameter angles `2πk/M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSample<T> {
    radius: T,
    points: Vec<Complex<T>>,
}

impl<T: Scalar> CurveSample<T> {
    /// Wraps an explicit point list. Index `M` wraps to `0`.
    pub fn from_points(radius: T, points: Vec<Complex<T>>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Degenerate(format!("curve needs at least 2 points, got {}", points.len())));
        }
        let m = points.len();
        for k in 0..m {
            let next = points[(k + 1) % m];
            if !(points[k].re.is_finite() && points[k].im.is_finite()) {
                return Err(Error::Degenerate(format!("point {k} is not finite")));
            }
            if m > 2 && points[k] == next {
                return Err(Error::Degenerate(format!("points {k} and {} coincide", (k + 1) % m)));
            }
        }
        Ok(Self { radius, points })
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn points(&self) -> &[Complex<T>] {
        &self.points
    }

    pub fn sample_count(&self) -> usize {
        self.points.len()
    }

    /// Parameter angle of sample `k`.
    pub fn angle(&self, k: usize) -> T {
        T::TAU() * T::from_usize_lossy(k) / T::from_usize_lossy(self.points.len())
    }

    /// Writes `t_k,re,im` rows with a header line.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t_k", "re", "im"])?;
        for (k, z) in self.points.iter().enumerate() {
            w.write_record([
                format_number(self.angle(k).to_f64_lossy()),
                format_number(z.re.to_f64_lossy()),
                format_number(z.im.to_f64_lossy()),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `f(r e^{2πik/M})` for `k = 0..M`.
pub fn sample_curve<T: Scalar>(map: &LaurentMap<T>, r: T, m: usize) -> Result<CurveSample<T>> {
    map.check_radius(r)?;
    if m < 2 {
        return Err(Error::Domain(format!("sample count must be >= 2, got {m}")));
    }
    let step = T::TAU() / T::from_usize_lossy(m);
    let points = (0..m)
        .map(|k| map.evaluate(unit(step * T::from_usize_lossy(k)) * r))
        .collect::<Result<Vec<_>>>()?;
    CurveSample::from_points(r, points)
}

/// Pointwise reciprocal `1/z_k`; the radius field is carried over.
pub fn invert_curve<T: Scalar>(curve: &CurveSample<T>) -> Result<CurveSample<T>> {
    let tiny = T::lit(DEGENERATE_MODULUS);
    let points = curve
        .points
        .iter()
        .enumerate()
        .map(|(k, z)| {
            if z.norm() < tiny {
                Err(Error::Degenerate(format!("point {k} has modulus below {DEGENERATE_MODULUS:e}")))
            } else {
                Ok(z.inv())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    CurveSample::from_points(curve.radius, points)
}

/// Absolute area of the closed polyline.
pub fn shoelace_area<T: Scalar>(curve: &CurveSample<T>) -> T {
    let p = &curve.points;
    let m = p.len();
    // shift to the first point to reduce cancellation
    let o = p[0];
    let mut twice = T::zero();
    for k in 0..m {
        let a = p[k] - o;
        let b = p[(k + 1) % m] - o;
        twice += a.re * b.im - a.im * b.re;
    }
    (twice * T::lit(0.5)).abs()
}

/// Largest pairwise distance among the samples.
pub fn curve_diameter<T: Scalar>(curve: &CurveSample<T>) -> T {
    let p = &curve.points;
    let mut best = T::zero();
    for i in 0..p.len() {
        for j in (i + 1)..p.len() {
            best = best.max((p[i] - p[j]).norm_sqr());
        }
    }
    best.sqrt()
}

/// `max|z_k| / min|z_k|`.
pub fn oscillation_ratio<T: Scalar>(curve: &CurveSample<T>) -> Result<T> {
    let (lo, hi) = curve
        .points
        .iter()
        .map(|z| z.norm())
        .fold((T::infinity(), T::zero()), |(lo, hi), m| (lo.min(m), hi.max(m)));
    if lo < T::lit(DEGENERATE_MODULUS) {
        return Err(Error::Degenerate("curve passes through the origin".into()));
    }
    Ok(hi / lo)
}

/// `max|f| / min|f|` on `|z| = r`, with the extreme samples of an `m`-point
/// scan polished by golden-section search over the continuous angle.
pub fn oscillation_ratio_refined<T: Scalar>(map: &LaurentMap<T>, r: T, m: usize) -> Result<T> {
    let curve = sample_curve(map, r, m)?;
    let moduli: Vec<T> = curve.points.iter().map(|z| z.norm()).collect();
    let (mut kmax, mut kmin) = (0, 0);
    for (k, v) in moduli.iter().enumerate() {
        if *v > moduli[kmax] {
            kmax = k;
        }
        if *v < moduli[kmin] {
            kmin = k;
        }
    }
    let step = T::TAU() / T::from_usize_lossy(m);
    let modulus = |t: T| map.eval_unchecked(unit(t) * r).norm();
    let xtol = T::epsilon().sqrt() * step;
    let (ta, tb) = (curve.angle(kmax), curve.angle(kmin));
    let (_, hi) = golden_max(modulus, ta - step, ta + step, xtol, 200);
    let (_, neg_lo) = golden_max(|t| -modulus(t), tb - step, tb + step, xtol, 200);
    let hi = hi.max(moduli[kmax]);
    let lo = (-neg_lo).min(moduli[kmin]);
    if lo < T::lit(DEGENERATE_MODULUS) {
        return Err(Error::Degenerate("curve passes through the origin".into()));
    }
    Ok(hi / lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn close(a: Complex<f64>, b: Complex<f64>, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn sample_examples() {
        let id = LaurentMap::<f64>::identity();
        let s = sample_curve(&id, 1.0, 4).unwrap();
        let want = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        for (z, w) in s.points().iter().zip(want) {
            assert!(close(*z, w, 1e-15));
        }
        let b = LaurentMap::blaschke(c(0.2, 0.0)).unwrap();
        let s = sample_curve(&b, 1.0, 64).unwrap();
        assert!(s.points().iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
        let j = LaurentMap::<f64>::joukowski(0.5).unwrap();
        let s = sample_curve(&j, 2.0, 4).unwrap();
        let want = [c(2.125, 0.0), c(0.0, 1.875), c(-2.125, 0.0), c(0.0, -1.875)];
        for (z, w) in s.points().iter().zip(want) {
            assert!(close(*z, w, 1e-14));
        }
    }

    #[test]
    fn sample_domain_error() {
        let j = LaurentMap::<f64>::joukowski(0.5).unwrap();
        assert!(matches!(sample_curve(&j, 0.0, 64), Err(Error::Domain(_))));
        let b = LaurentMap::blaschke(c(0.5, 0.0)).unwrap();
        assert!(matches!(sample_curve(&b, 2.5, 64), Err(Error::Domain(_))));
    }

    #[test]
    fn invert_examples() {
        let id = LaurentMap::<f64>::identity();
        let circle = sample_curve(&id, 2.0, 128).unwrap();
        let inv = invert_curve(&circle).unwrap();
        assert!(inv.points().iter().all(|z| (z.norm() - 0.5).abs() < 1e-15));
        assert_eq!(inv.radius(), 2.0);

        let unit_circle = sample_curve(&id, 1.0, 16).unwrap();
        let inv = invert_curve(&unit_circle).unwrap();
        for (z, w) in unit_circle.points().iter().zip(inv.points()) {
            assert!(close(z.conj(), *w, 1e-15));
        }

        let j = LaurentMap::<f64>::joukowski(0.5).unwrap();
        let ellipse = sample_curve(&j, 2.0, 4).unwrap();
        let inv = invert_curve(&ellipse).unwrap();
        let want = [c(1.0 / 2.125, 0.0), c(0.0, -1.0 / 1.875), c(-1.0 / 2.125, 0.0), c(0.0, 1.0 / 1.875)];
        for (z, w) in inv.points().iter().zip(want) {
            assert!(close(*z, w, 1e-14));
        }
    }

    #[test]
    fn invert_rejects_origin() {
        let s = CurveSample::from_points(1.0, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert!(matches!(invert_curve(&s), Err(Error::Degenerate(_))));
        assert!(matches!(oscillation_ratio(&s), Err(Error::Degenerate(_))));
    }

    #[test]
    fn rejects_coincident_neighbours() {
        assert!(CurveSample::from_points(1.0, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]).is_err());
        assert!(CurveSample::from_points(1.0, vec![c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn shoelace_examples() {
        let id = LaurentMap::<f64>::identity();
        let m = 4096;
        let inscribed = 0.5 * m as f64 * (2.0 * PI / m as f64).sin();
        assert!((inscribed - PI).abs() / PI < 2e-6);
        let a = shoelace_area(&sample_curve(&id, 1.0, m).unwrap());
        assert!((a - inscribed).abs() < 1e-12);
        assert!((a - PI).abs() / PI < 2e-6);
        let a2 = shoelace_area(&sample_curve(&id, 2.0, m).unwrap());
        assert!((a2 - 4.0 * PI).abs() / (4.0 * PI) < 2e-6);
        let tri = shoelace_area(&sample_curve(&id, 1.0, 3).unwrap());
        assert!((tri - 1.5 * (2.0 * PI / 3.0).sin()).abs() < 1e-14);
    }

    #[test]
    fn shoelace_error_decreases_with_sampling() {
        let id = LaurentMap::<f64>::identity();
        let errs: Vec<f64> = [64, 256, 1024, 4096]
            .iter()
            .map(|&m| (shoelace_area(&sample_curve(&id, 1.3, m).unwrap()) - PI * 1.69).abs())
            .collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    }

    #[test]
    fn diameter_examples() {
        let id = LaurentMap::<f64>::identity();
        assert!((curve_diameter(&sample_curve(&id, 1.0, 4096).unwrap()) - 2.0).abs() < 1e-6);
        let j = LaurentMap::<f64>::joukowski(0.5).unwrap();
        assert!((curve_diameter(&sample_curve(&j, 2.0, 1024).unwrap()) - 4.25).abs() < 1e-4);
        let seg = CurveSample::from_points(1.0, vec![c(0.0, 0.0), c(3.0, 0.0)]).unwrap();
        assert_eq!(curve_diameter(&seg), 3.0);
    }

    #[test]
    fn oscillation_examples() {
        let id = LaurentMap::<f64>::identity();
        for r in [0.5, 1.0, 2.0] {
            let o = oscillation_ratio(&sample_curve(&id, r, 256).unwrap()).unwrap();
            assert!((o - 1.0).abs() < 1e-12);
        }
        let j = LaurentMap::<f64>::joukowski(0.5).unwrap();
        let o = oscillation_ratio(&sample_curve(&j, 2.0, 1024).unwrap()).unwrap();
        assert!((o - 2.125 / 1.875).abs() < 1e-12);
        // 1000 samples miss the axes; the refined ratio does not
        let o = oscillation_ratio_refined(&j, 2.0, 1000).unwrap();
        assert!((o - 2.125 / 1.875).abs() < 1e-12);
        let o = oscillation_ratio_refined(&j.rotated(0.3), 2.0, 1000).unwrap();
        assert!((o - 2.125 / 1.875).abs() < 1e-12);
    }

    #[test]
    fn csv_export_has_header_and_rows() {
        let id = LaurentMap::<f64>::identity();
        let s = sample_curve(&id, 1.0, 4).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t_k,re,im");
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[1], "0.0,1.0,0.0");
    }
}
