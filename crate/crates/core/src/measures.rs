//! Reduced moduli, the deficiency `T(r)`, and the ratio functions `ψ` for
//! maps in S(R), assembled into per-radius reports.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::{
    capacity, fekete_on_curves, inverse_capacity, CapacityEstimate, CapacityOptions, Circle, FeketeOptions,
    ImageCircle,
};
use crate::curve::{oscillation_ratio_refined, DEFAULT_SAMPLES};
use crate::error::{Error, Result};
use crate::laurent::{annulus_image_area, validate_sr_membership, AnnulusSpec, LaurentMap, SRMembershipVerdict};
use crate::scalar::{unit, Scalar};

pub const MIN_GRID: usize = 8;
/// Fekete order used for `ψ_nDiam` in reports.
pub const DEFAULT_PSI_NDIAM_N: usize = 8;

/// CSV column order of a [`MeasureRecord`].
pub const CSV_COLUMNS: [&str; 12] = [
    "r",
    "cap_J",
    "cap_inv_J",
    "m1",
    "m2",
    "t",
    "psi_cap",
    "psi_ndiam",
    "psi_area",
    "polya_slack",
    "serial_slack",
    "oscillation",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureOptions {
    pub capacity: CapacityOptions,
    /// Samples per circle for membership and oscillation checks.
    pub samples: usize,
    pub psi_ndiam_n: usize,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        Self {
            capacity: CapacityOptions::default(),
            samples: DEFAULT_SAMPLES,
            psi_ndiam_n: DEFAULT_PSI_NDIAM_N,
        }
    }
}

fn inv_two_pi<T: Scalar>() -> T {
    T::one() / T::TAU()
}

/// A map checked to lie in S(R), with the options used to measure it.
#[derive(Debug, Clone)]
pub struct MeasureContext<'a, T> {
    map: &'a LaurentMap<T>,
    spec: AnnulusSpec<T>,
    opts: MeasureOptions,
    verdict: SRMembershipVerdict<T>,
}

impl<'a, T: Scalar> MeasureContext<'a, T> {
    /// Fails with a validation error when the sampled S(R) test rejects `map`.
    pub fn new(map: &'a LaurentMap<T>, spec: AnnulusSpec<T>, opts: MeasureOptions) -> Result<Self> {
        let verdict = validate_sr_membership(map, &spec, opts.samples);
        if !verdict.is_member() {
            return Err(Error::Validation(format!(
                "{} is not in S({}): {}",
                map.label(),
                spec.outer_radius,
                verdict.failure_summary()
            )));
        }
        Ok(Self {
            map,
            spec,
            opts,
            verdict,
        })
    }

    pub fn map(&self) -> &LaurentMap<T> {
        self.map
    }

    pub fn spec(&self) -> &AnnulusSpec<T> {
        &self.spec
    }

    pub fn options(&self) -> &MeasureOptions {
        &self.opts
    }

    pub fn membership(&self) -> &SRMembershipVerdict<T> {
        &self.verdict
    }

    fn check_r(&self, r: T) -> Result<()> {
        if !(r >= T::one() && r < self.spec.outer_radius) {
            return Err(Error::Domain(format!(
                "radius {r} outside [1, {})",
                self.spec.outer_radius
            )));
        }
        Ok(())
    }

    /// `Cap J(r)`, which is also the capacity of `f(A(1, r)) ∪ D̄`.
    pub fn cap_j(&self, r: T) -> Result<CapacityEstimate<T>> {
        self.check_r(r)?;
        capacity(self.map, r, &self.opts.capacity)
    }

    /// `Cap(1/J(r))`.
    pub fn cap_inv_j(&self, r: T) -> Result<CapacityEstimate<T>> {
        self.check_r(r)?;
        inverse_capacity(self.map, r, &self.opts.capacity)
    }

    /// `T(r) = (1/2π) log(Cap J · Cap 1/J)`.
    pub fn teichmuller_deficiency(&self, r: T) -> Result<T> {
        let a = self.cap_j(r)?.value;
        let b = self.cap_inv_j(r)?.value;
        Ok(deficiency_from_capacities(a, b))
    }

    /// `Cap J(r) / r`.
    pub fn psi_cap(&self, r: T) -> Result<T> {
        Ok(self.cap_j(r)?.value / r)
    }

    /// n-diameter of `J(r) ∪ ∂D` over that of the circle `r∂D`.
    pub fn psi_ndiam(&self, r: T, n: usize) -> Result<T> {
        self.check_r(r)?;
        psi_ndiam_unchecked(self.map, r, n, &self.opts.capacity.fekete)
    }

    /// `(π + h(r)) / (πr²)`.
    pub fn psi_area(&self, r: T) -> Result<T> {
        self.check_r(r)?;
        let h = annulus_image_area(self.map, r)?;
        Ok((T::PI() + h) / (T::PI() * r * r))
    }

    /// `ψ_Cap² − ψ_Area`.
    pub fn polya_slack(&self, r: T) -> Result<T> {
        let c = self.psi_cap(r)?;
        Ok(c * c - self.psi_area(r)?)
    }

    /// `(1/2π) log ψ_Cap − T`, which reduces to `−(1/2π) log(r·Cap(1/J))`.
    pub fn serial_rule_slack(&self, r: T) -> Result<T> {
        let cap = self.cap_j(r)?.value;
        let inv = self.cap_inv_j(r)?.value;
        Ok(inv_two_pi::<T>() * (cap / r).ln() - deficiency_from_capacities(cap, inv))
    }

    /// Every measure at one radius; capacity warnings are returned alongside.
    pub fn record(&self, r: T) -> Result<(MeasureRecord<T>, Vec<String>)> {
        let cap = self.cap_j(r)?;
        let inv = self.cap_inv_j(r)?;
        let mut warnings = cap.warnings.clone();
        warnings.extend(inv.warnings.iter().cloned());
        let c = cap.value;
        let ci = inv.value;
        if !(c > T::zero() && ci > T::zero()) {
            return Err(Error::Degenerate(format!("nonpositive capacity at r = {r}")));
        }
        let k = inv_two_pi::<T>();
        let t = deficiency_from_capacities(c, ci);
        let psi_cap = c / r;
        let psi_area = self.psi_area(r)?;
        let record = MeasureRecord {
            r,
            cap_j: c,
            cap_inv_j: ci,
            m1: -k * ci.ln(),
            m2: -k * c.ln(),
            t,
            psi_cap,
            psi_ndiam: self.psi_ndiam(r, self.opts.psi_ndiam_n)?,
            psi_area,
            polya_slack: psi_cap * psi_cap - psi_area,
            serial_slack: k * psi_cap.ln() - t,
            oscillation: oscillation_ratio_refined(self.map, r, self.opts.samples)?,
        };
        Ok((record, warnings))
    }
}

/// `(1/2π) log(a·b)`.
pub fn deficiency_from_capacities<T: Scalar>(cap_j: T, cap_inv_j: T) -> T {
    inv_two_pi::<T>() * (cap_j * cap_inv_j).ln()
}

fn psi_ndiam_unchecked<T: Scalar>(map: &LaurentMap<T>, r: T, n: usize, opts: &FeketeOptions) -> Result<T> {
    if n < 2 {
        return Err(Error::Precondition(format!("n must be >= 2, got {n}")));
    }
    let outer = ImageCircle::new(map, r)?;
    let disk = Circle {
        center: num_complex::Complex::new(T::zero(), T::zero()),
        radius: T::one(),
    };
    let res = fekete_on_curves(&[&outer, &disk], n, opts)?;
    let nf = T::from_usize_lossy(n);
    Ok(res.n_diameter / (r * nf.powf(T::one() / (nf - T::one()))))
}

/// Checks that `map` is a Taylor map with `f(0) = 0`, `f′(0) ≠ 0` that is
/// injective on sampled circles of `rD̄`. Returns `|f′(0)|`.
pub fn validate_disk_case<T: Scalar>(map: &LaurentMap<T>, r: T, samples: usize) -> Result<T> {
    if map.n_min() < 0 && map.coefficients().any(|(n, a)| n < 0 && a.norm_sqr() > T::zero()) {
        return Err(Error::Validation("disk case needs a Taylor map".into()));
    }
    if !(r > T::zero() && r.is_finite()) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    map.check_radius(r)?;
    let zero = num_complex::Complex::new(T::zero(), T::zero());
    let f0 = map.evaluate(zero)?;
    if f0.norm() > T::lit(1e-12) {
        return Err(Error::Validation(format!("f(0) = {f0} is not 0")));
    }
    let d = map.derivative_at(zero)?.norm();
    if !(d > T::lit(1e-12)) {
        return Err(Error::Validation("f'(0) vanishes".into()));
    }
    let samples = samples.max(64);
    let rings = 8;
    let step = T::TAU() / T::from_usize_lossy(samples);
    let mut pts = Vec::with_capacity(samples * rings + 1);
    pts.push(zero);
    for j in 1..=rings {
        let rho = r * T::from_usize_lossy(j) / T::from_usize_lossy(rings);
        let shift = if j % 2 == 1 { T::lit(0.5) } else { T::zero() };
        for k in 0..samples {
            pts.push(map.eval_unchecked(unit(step * (T::from_usize_lossy(k) + shift)) * rho));
        }
    }
    let mut diameter = T::zero();
    let mut min_sep = T::infinity();
    for i in 0..pts.len() {
        for k in (i + 1)..pts.len() {
            let s = (pts[i] - pts[k]).norm();
            diameter = diameter.max(s);
            min_sep = min_sep.min(s);
        }
    }
    if !(min_sep > T::lit(1e-8) * diameter) {
        return Err(Error::Validation(format!("sampled images coincide on the disk of radius {r}")));
    }
    Ok(d)
}

/// Reduced moduli of `f(rD)` at `0`: `M₁ = (1/2π) log(r|f′(0)|)` and
/// `M₂ = −(1/2π) log Cap f(rD)`.
pub fn reduced_moduli_disk_case<T: Scalar>(map: &LaurentMap<T>, r: T, opts: &MeasureOptions) -> Result<(T, T)> {
    let d = validate_disk_case(map, r, opts.samples)?;
    let k = inv_two_pi::<T>();
    let cap = capacity(map, r, &opts.capacity)?;
    Ok((k * (r * d).ln(), -k * cap.value.ln()))
}

/// One row of a [`MeasureReport`]. Field order is the CSV column order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureRecord<T> {
    pub r: T,
    #[serde(rename = "cap_J")]
    pub cap_j: T,
    #[serde(rename = "cap_inv_J")]
    pub cap_inv_j: T,
    pub m1: T,
    pub m2: T,
    pub t: T,
    pub psi_cap: T,
    pub psi_ndiam: T,
    pub psi_area: T,
    pub polya_slack: T,
    pub serial_slack: T,
    pub oscillation: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusFailure {
    pub r: f64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport<T> {
    pub map_id: String,
    #[serde(rename = "R")]
    pub outer_radius: T,
    pub r_grid: Vec<T>,
    pub records: Vec<MeasureRecord<T>>,
    pub failures: Vec<RadiusFailure>,
    pub warnings: Vec<String>,
}

/// `R^{i/g}` for `i = 0..g`.
pub fn log_uniform_grid<T: Scalar>(outer_radius: T, grid_size: usize) -> Vec<T> {
    let g = T::from_usize_lossy(grid_size);
    (0..grid_size)
        .map(|i| outer_radius.powf(T::from_usize_lossy(i) / g))
        .collect()
}

/// Measures every radius of the log-uniform grid in parallel.
/// Radii that fail are listed in `failures`; the rest still produce rows.
pub fn build_report<T: Scalar>(
    map: &LaurentMap<T>,
    spec: AnnulusSpec<T>,
    grid_size: usize,
    opts: MeasureOptions,
) -> Result<MeasureReport<T>> {
    if grid_size < MIN_GRID {
        return Err(Error::Validation(format!("grid size must be >= {MIN_GRID}, got {grid_size}")));
    }
    let ctx = MeasureContext::new(map, spec, opts)?;
    let grid = log_uniform_grid(spec.outer_radius, grid_size);
    let rows: Vec<(T, Result<(MeasureRecord<T>, Vec<String>)>)> =
        grid.par_iter().map(|&r| (r, ctx.record(r))).collect();
    let mut records = Vec::with_capacity(rows.len());
    let mut failures = Vec::new();
    let mut warnings = Vec::new();
    for (r, row) in rows {
        match row {
            Ok((rec, w)) => {
                warnings.extend(w.into_iter().map(|w| format!("r = {r}: {w}")));
                records.push(rec);
            }
            Err(e) => failures.push(RadiusFailure {
                r: r.to_f64_lossy(),
                error: e.to_string(),
            }),
        }
    }
    Ok(MeasureReport {
        map_id: map.label(),
        outer_radius: spec.outer_radius,
        r_grid: grid,
        records,
        failures,
        warnings,
    })
}

impl<T: Scalar> MeasureReport<T> {
    pub fn is_degraded(&self) -> bool {
        !self.failures.is_empty() || !self.warnings.is_empty()
    }

    /// Descriptions of rows that break the record identities.
    pub fn invariant_violations(&self) -> Vec<String> {
        let k = inv_two_pi::<T>();
        let tol = T::lit(1e-12);
        let mut out = Vec::new();
        for rec in &self.records {
            if !(rec.cap_j > T::zero() && rec.cap_inv_j > T::zero()) {
                out.push(format!("r = {}: nonpositive capacity", rec.r));
                continue;
            }
            let dt = rec.t - deficiency_from_capacities(rec.cap_j, rec.cap_inv_j);
            if dt.abs() > tol {
                out.push(format!("r = {}: t differs from the capacity identity by {dt}", rec.r));
            }
            let dm = rec.m2 + k * rec.cap_j.ln();
            if dm.abs() > tol {
                out.push(format!("r = {}: m2 differs from -log(cap_J)/2π by {dm}", rec.r));
            }
        }
        out
    }

    pub fn radii(&self) -> Vec<T> {
        self.records.iter().map(|r| r.r).collect()
    }

    pub fn column(&self, f: impl Fn(&MeasureRecord<T>) -> T) -> Vec<T> {
        self.records.iter().map(f).collect()
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }

    /// One row per record, columns as in [`CSV_COLUMNS`].
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_COLUMNS)?;
        for rec in &self.records {
            w.write_record(
                [
                    rec.r,
                    rec.cap_j,
                    rec.cap_inv_j,
                    rec.m1,
                    rec.m2,
                    rec.t,
                    rec.psi_cap,
                    rec.psi_ndiam,
                    rec.psi_area,
                    rec.polya_slack,
                    rec.serial_slack,
                    rec.oscillation,
                ]
                .map(|x| format_number(x.to_f64_lossy())),
            )?;
        }
        w.flush()?;
        Ok(())
    }

    /// Rebuilds a report from CSV written by [`Self::write_csv`].
    pub fn read_csv<R: Read>(input: R, map_id: impl Into<String>, outer_radius: T) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(input);
        let headers = rd.headers()?.clone();
        if !headers.iter().eq(CSV_COLUMNS.iter().copied()) {
            return Err(Error::Shape(format!("unexpected CSV header {headers:?}")));
        }
        let mut records = Vec::new();
        for row in rd.deserialize::<MeasureRecord<f64>>() {
            let x = row?;
            records.push(MeasureRecord {
                r: T::lit(x.r),
                cap_j: T::lit(x.cap_j),
                cap_inv_j: T::lit(x.cap_inv_j),
                m1: T::lit(x.m1),
                m2: T::lit(x.m2),
                t: T::lit(x.t),
                psi_cap: T::lit(x.psi_cap),
                psi_ndiam: T::lit(x.psi_ndiam),
                psi_area: T::lit(x.psi_area),
                polya_slack: T::lit(x.polya_slack),
                serial_slack: T::lit(x.serial_slack),
                oscillation: T::lit(x.oscillation),
            });
        }
        Ok(Self {
            map_id: map_id.into(),
            outer_radius,
            r_grid: records.iter().map(|r| r.r).collect(),
            records,
            failures: Vec::new(),
            warnings: Vec::new(),
        })
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_number(x: f64) -> String {
    serde_json::Number::from_f64(x).map_or_else(|| x.to_string(), |n| n.to_string())
}

/// Largest violation of `Cap_r / r ≤ Cap_{r′} / r′` over all grid pairs
/// `r < r′`, relative to the right-hand side. Nonpositive when the display
/// holds exactly.
pub fn display_inequality_excess<T: Scalar>(records: &[MeasureRecord<T>]) -> T {
    let mut worst = T::neg_infinity();
    for (i, a) in records.iter().enumerate() {
        for b in &records[i + 1..] {
            let lhs = a.cap_j / a.r;
            let rhs = b.cap_j / b.r;
            worst = worst.max((lhs - rhs) / rhs);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    fn blaschke() -> LaurentMap<f64> {
        LaurentMap::blaschke(Complex::new(0.2, 0.0)).unwrap()
    }

    fn spec() -> AnnulusSpec<f64> {
        AnnulusSpec::new(2.0).unwrap()
    }

    fn blaschke_t(a: f64, r: f64) -> f64 {
        let s = r.ln();
        let q = 2.0 * a * s.sinh() / (1.0 - a * a);
        -(1.0 - q * q).ln() / std::f64::consts::TAU
    }

    #[test]
    fn identity_measures() {
        let id = LaurentMap::<f64>::identity();
        let ctx = MeasureContext::new(&id, spec(), MeasureOptions::default()).unwrap();
        for r in [1.0, 1.5, 1.8] {
            assert!(ctx.teichmuller_deficiency(r).unwrap().abs() < 1e-3);
            assert!((ctx.psi_cap(r).unwrap() - 1.0).abs() < 5e-3);
            assert!(ctx.serial_rule_slack(r).unwrap().abs() < 1e-3);
            assert!(ctx.polya_slack(r).unwrap().abs() < 1e-2);
        }
        assert!((ctx.psi_area(2.0 - 1e-12).unwrap() - 1.0).abs() < 1e-9);
        assert!((ctx.psi_ndiam(1.5, 4).unwrap() - 1.0).abs() < 1e-4);
        assert!(matches!(ctx.psi_cap(2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn rotation_deficiency_vanishes() {
        let rot = LaurentMap::<f64>::rotation(0.7);
        let ctx = MeasureContext::new(&rot, spec(), MeasureOptions::default()).unwrap();
        assert!(ctx.teichmuller_deficiency(1.5).unwrap().abs() < 1e-3);
    }

    #[test]
    fn blaschke_measures() {
        let b = blaschke();
        let ctx = MeasureContext::new(&b, spec(), MeasureOptions::default()).unwrap();
        let t = ctx.teichmuller_deficiency(1.5).unwrap();
        assert!(t > 0.0);
        assert!((t - blaschke_t(0.2, 1.5)).abs() < 1e-6);
        assert!((t - 4.8709e-3).abs() < 1e-6, "{t}");
        let cap = ctx.cap_j(1.5).unwrap().value;
        assert!((cap - 1.582_417_582_418).abs() < 1e-8, "{cap}");
        assert!(ctx.psi_cap(1.5).unwrap() >= 1.0 + 5e-3);
        assert!((ctx.psi_cap(1.0).unwrap() - 1.0).abs() < 1e-6);
        assert!(ctx.psi_ndiam(1.5, 6).unwrap() >= 1.0);
        assert!((ctx.psi_ndiam(1.0, 3).unwrap() - 1.0).abs() < 1e-6);
        assert!(ctx.polya_slack(1.5).unwrap() >= -0.01);
        for r in [1.2, 1.5, 1.8] {
            assert!(ctx.serial_rule_slack(r).unwrap() >= -1e-3);
        }
    }

    #[test]
    fn joukowski_is_rejected() {
        let j = LaurentMap::<f64>::joukowski(0.5).unwrap();
        assert!(matches!(
            MeasureContext::new(&j, spec(), MeasureOptions::default()),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            build_report(&j, spec(), 8, MeasureOptions::default()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn disk_case_moduli() {
        let opts = MeasureOptions::default();
        let id = LaurentMap::<f64>::identity();
        let (m1, m2) = reduced_moduli_disk_case(&id, 0.5, &opts).unwrap();
        let k = 1.0 / std::f64::consts::TAU;
        assert!((m1 - k * 0.5f64.ln()).abs() < 1e-12);
        assert!((m2 + k * 0.5f64.ln()).abs() < 1e-3);

        let twice = LaurentMap::<f64>::from_coefficients([(1, Complex::new(2.0, 0.0))]).unwrap();
        let (m1, m2) = reduced_moduli_disk_case(&twice, 0.5, &opts).unwrap();
        assert!(m1.abs() < 1e-12 && m2.abs() < 1e-3);

        let quad = LaurentMap::from_coefficients([(1, Complex::new(1.0, 0.0)), (2, Complex::new(0.1, 0.0))]).unwrap();
        let (m1, m2) = reduced_moduli_disk_case(&quad, 0.5, &opts).unwrap();
        assert!((m1 - k * 0.5f64.ln()).abs() < 1e-12);
        assert!(m1 + m2 <= 1e-9, "{m1} + {m2}");
        // regression: Cap f(D/2) = 0.50125
        assert!((m2 + k * 0.50125f64.ln()).abs() < 1e-6, "{m2}");
    }

    #[test]
    fn disk_case_rejections() {
        let opts = MeasureOptions::default();
        let shifted = LaurentMap::from_coefficients([(0, Complex::new(0.1, 0.0)), (1, Complex::new(1.0, 0.0))]).unwrap();
        assert!(matches!(reduced_moduli_disk_case(&shifted, 0.5, &opts), Err(Error::Validation(_))));
        let flat = LaurentMap::from_coefficients([(2, Complex::new(1.0, 0.0))]).unwrap();
        assert!(matches!(reduced_moduli_disk_case(&flat, 0.5, &opts), Err(Error::Validation(_))));
        let j = LaurentMap::<f64>::joukowski(0.5).unwrap();
        assert!(reduced_moduli_disk_case(&j, 0.5, &opts).is_err());
    }

    #[test]
    fn identity_report() {
        let id = LaurentMap::<f64>::identity();
        let rep = build_report(&id, spec(), 8, MeasureOptions::default()).unwrap();
        assert_eq!(rep.records.len(), 8);
        assert!(rep.failures.is_empty());
        assert!(rep.invariant_violations().is_empty());
        for rec in &rep.records {
            assert!(rec.t.abs() < 1e-3);
            assert!((rec.psi_cap - 1.0).abs() < 5e-3);
            assert!((rec.psi_area - 1.0).abs() < 1e-12);
            assert!((rec.psi_ndiam - 1.0).abs() < 1e-4);
            assert!((rec.oscillation - 1.0).abs() < 1e-12);
        }
        assert!(matches!(build_report(&id, spec(), 7, MeasureOptions::default()), Err(Error::Validation(_))));
    }

    #[test]
    fn grid_is_log_uniform() {
        let g = log_uniform_grid(2.0, 8);
        assert_eq!(g[0], 1.0);
        assert!((g[7] - 2f64.powf(7.0 / 8.0)).abs() < 1e-15);
        let steps: Vec<f64> = g.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
        assert!(steps.iter().all(|s| (s - 2f64.ln() / 8.0).abs() < 1e-14));
    }

    #[test]
    fn report_is_rotation_invariant() {
        let b = blaschke();
        let rot = b.rotated(0.9);
        let opts = MeasureOptions::default();
        let a = build_report(&b, spec(), 8, opts.clone()).unwrap();
        let c = build_report(&rot, spec(), 8, opts).unwrap();
        for (x, y) in a.records.iter().zip(&c.records) {
            let xs = [x.cap_j, x.cap_inv_j, x.t, x.psi_cap, x.psi_ndiam, x.psi_area, x.serial_slack, x.oscillation];
            let ys = [y.cap_j, y.cap_inv_j, y.t, y.psi_cap, y.psi_ndiam, y.psi_area, y.serial_slack, y.oscillation];
            for (u, v) in xs.iter().zip(ys) {
                assert!((u - v).abs() < 1e-10, "r = {}: {u} vs {v}", x.r);
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        let id = LaurentMap::<f64>::identity();
        let rep = build_report(&id, spec(), 8, MeasureOptions::default()).unwrap();
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_COLUMNS.join(","));
        let back = MeasureReport::<f64>::read_csv(buf.as_slice(), rep.map_id.clone(), 2.0).unwrap();
        assert_eq!(back.records, rep.records);
        assert!(back.invariant_violations().is_empty());
    }

    #[test]
    fn display_excess_detects_decrease() {
        let rec = |r: f64, c: f64| MeasureRecord {
            r,
            cap_j: c,
            cap_inv_j: 1.0 / c,
            m1: 0.0,
            m2: 0.0,
            t: 0.0,
            psi_cap: c / r,
            psi_ndiam: 1.0,
            psi_area: 1.0,
            polya_slack: 0.0,
            serial_slack: 0.0,
            oscillation: 1.0,
        };
        assert!(display_inequality_excess(&[rec(1.0, 1.0), rec(1.5, 1.6)]) <= 0.0);
        assert!(display_inequality_excess(&[rec(1.0, 1.0), rec(1.5, 1.2)]) > 0.1);
    }
}
