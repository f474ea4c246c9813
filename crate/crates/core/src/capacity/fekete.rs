//! Fekete point search: greedy Leja seeding followed by cyclic coordinate
//! ascent over the curve parameters.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::ClosedCurve;
use crate::curve::CurveSample;
use crate::error::{Error, Result};
use crate::scalar::{golden_max, log_abs, wrap_angle, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeketeMethod {
    /// Exact optimum over a discrete sample.
    BruteForce,
    /// Continuous-angle coordinate ascent.
    ExchangeRefined,
    /// Coordinate ascent restricted to a discrete sample.
    ExchangeDiscrete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeketeOptions {
    /// Angles per curve used for Leja seeding.
    pub seed_grid: usize,
    pub max_sweeps: usize,
    /// Stop when one sweep raises `Σ log|w_j − w_k|` by less than this.
    pub sweep_tolerance: f64,
    /// Golden-section bracket width at which a coordinate search stops.
    pub angle_tolerance: f64,
    /// Coarse samples per coordinate bracket before golden-section refinement.
    pub coarse_scan: usize,
}

impl Default for FeketeOptions {
    fn default() -> Self {
        Self {
            seed_grid: 1024,
            max_sweeps: 200,
            sweep_tolerance: 1e-12,
            angle_tolerance: 1e-10,
            coarse_scan: 8,
        }
    }
}

/// Selected points and the resulting n-diameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeketeResult<T> {
    pub n: usize,
    /// Parameter angles in `[0, 2π)`, increasing within each curve.
    pub angles: Vec<T>,
    /// Which input curve each point lies on; all zero for a single curve.
    pub curve_index: Vec<usize>,
    pub points: Vec<Complex<T>>,
    pub n_diameter: T,
    /// `Σ_{j<k} log|w_j − w_k|`
    pub log_energy: T,
    pub method: FeketeMethod,
    pub iterations: usize,
    pub converged: bool,
    pub warnings: Vec<String>,
}

impl<T: Scalar> FeketeResult<T> {
    /// Recomputes `(Π_{j<k}|w_j − w_k|)^{2/(n(n−1))}` from the stored points.
    pub fn recompute_n_diameter(&self) -> T {
        n_diameter_from_energy(log_energy(&self.points), self.points.len())
    }
}

pub(crate) fn log_energy<T: Scalar>(points: &[Complex<T>]) -> T {
    let mut e = T::zero();
    for j in 0..points.len() {
        for k in (j + 1)..points.len() {
            e += log_abs(points[j] - points[k]);
        }
    }
    e
}

pub(crate) fn n_diameter_from_energy<T: Scalar>(energy: T, n: usize) -> T {
    let pairs = T::from_usize_lossy(n * (n - 1)) * T::lit(0.5);
    (energy / pairs).exp()
}

/// Greedy Leja ordering over a candidate list: start from the largest
/// modulus, then repeatedly add the candidate maximising the product of
/// distances to those already chosen. Ties go to the lowest index.
pub(crate) fn leja_indices<T: Scalar>(candidates: &[Complex<T>], n: usize) -> Result<Vec<usize>> {
    if candidates.len() < n {
        return Err(Error::Precondition(format!(
            "{} candidates cannot seed {n} points",
            candidates.len()
        )));
    }
    let mut first = 0;
    for (i, z) in candidates.iter().enumerate() {
        if z.norm_sqr() > candidates[first].norm_sqr() {
            first = i;
        }
    }
    let mut chosen = vec![first];
    let mut taken = vec![false; candidates.len()];
    taken[first] = true;
    let mut score = vec![T::zero(); candidates.len()];
    while chosen.len() < n {
        let last = candidates[*chosen.last().unwrap()];
        let mut best: Option<usize> = None;
        for (i, z) in candidates.iter().enumerate() {
            if taken[i] {
                continue;
            }
            score[i] += log_abs(*z - last);
            if best.is_none_or(|b| score[i] > score[b]) {
                best = Some(i);
            }
        }
        let b = best.unwrap();
        if score[b] == T::neg_infinity() {
            return Err(Error::Degenerate("candidate set has fewer distinct points than requested".into()));
        }
        taken[b] = true;
        chosen.push(b);
    }
    Ok(chosen)
}

/// Maximises the pairwise distance product of `n` points constrained to the
/// union of `curves`, optimising over each point's parameter angle.
pub fn fekete_on_curves<T: Scalar>(
    curves: &[&dyn ClosedCurve<T>],
    n: usize,
    opts: &FeketeOptions,
) -> Result<FeketeResult<T>> {
    if n < 2 {
        return Err(Error::Precondition(format!("n must be >= 2, got {n}")));
    }
    if curves.is_empty() {
        return Err(Error::Precondition("no curves given".into()));
    }
    let grid = opts.seed_grid.max(n);
    let step = T::TAU() / T::from_usize_lossy(grid);
    let mut seeds = Vec::with_capacity(grid * curves.len());
    let mut owner = Vec::with_capacity(grid * curves.len());
    for (c, curve) in curves.iter().enumerate() {
        for k in 0..grid {
            let theta = step * T::from_usize_lossy(k);
            seeds.push(curve.point(theta));
            owner.push((c, theta));
        }
    }
    let picked = leja_indices(&seeds, n)?;
    let mut curve_of: Vec<usize> = picked.iter().map(|&i| owner[i].0).collect();
    let mut angle: Vec<T> = picked.iter().map(|&i| owner[i].1).collect();
    let mut pts: Vec<Complex<T>> = picked.iter().map(|&i| seeds[i]).collect();

    let sweep_tol = T::lit(opts.sweep_tolerance);
    let xtol = T::lit(opts.angle_tolerance);
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < opts.max_sweeps {
        sweeps += 1;
        let mut gain = T::zero();
        for j in 0..n {
            let curve = curves[curve_of[j]];
            let others = |z: Complex<T>| -> T {
                let mut s = T::zero();
                for (k, w) in pts.iter().enumerate() {
                    if k != j {
                        s += log_abs(z - *w);
                    }
                }
                s
            };
            let current = others(pts[j]);
            let (lo, hi) = bracket(&angle, &curve_of, j);
            let objective = |t: T| others(curve.point(t));

            // coarse scan guards against several local maxima in the bracket
            let scan = opts.coarse_scan.max(2);
            let width = (hi - lo) / T::from_usize_lossy(scan + 1);
            let (mut best_t, mut best_v) = (angle[j], current);
            for s in 1..=scan {
                let t = lo + width * T::from_usize_lossy(s);
                let v = objective(t);
                if v > best_v {
                    best_t = t;
                    best_v = v;
                }
            }
            let a = (best_t - width).max(lo);
            let b = (best_t + width).min(hi);
            let (t, v) = golden_max(objective, a, b, xtol, 200);
            if v > best_v {
                best_t = t;
                best_v = v;
            }
            if best_v > current {
                gain += best_v - current;
                angle[j] = wrap_angle(best_t);
                pts[j] = curve.point(angle[j]);
            }
        }
        gain += newton_step(curves, &curve_of, &mut angle, &mut pts);
        if gain < sweep_tol {
            converged = true;
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        curve_of[a]
            .cmp(&curve_of[b])
            .then(angle[a].partial_cmp(&angle[b]).unwrap_or(std::cmp::Ordering::Equal))
    });
    angle = order.iter().map(|&i| angle[i]).collect();
    curve_of = order.iter().map(|&i| curve_of[i]).collect();
    pts = order.iter().map(|&i| pts[i]).collect();

    let energy = log_energy(&pts);
    if !energy.is_finite() {
        return Err(Error::Degenerate("optimised points coincide".into()));
    }
    let mut warnings = Vec::new();
    if !converged {
        warnings.push(format!(
            "coordinate ascent hit the sweep cap ({}) before the improvement fell below {:e}",
            opts.max_sweeps, opts.sweep_tolerance
        ));
    }
    Ok(FeketeResult {
        n,
        angles: angle,
        curve_index: curve_of,
        points: pts,
        n_diameter: n_diameter_from_energy(energy, n),
        log_energy: energy,
        method: FeketeMethod::ExchangeRefined,
        iterations: sweeps,
        converged,
        warnings,
    })
}

/// One damped Newton step on all angles jointly. Coordinate ascent alone
/// stalls on ill-conditioned configurations; the joint step fixes that.
/// Returns the energy gained (zero when no trial step improves).
fn newton_step<T: Scalar>(
    curves: &[&dyn ClosedCurve<T>],
    curve_of: &[usize],
    angle: &mut [T],
    pts: &mut [Complex<T>],
) -> T {
    let n = angle.len();
    let d: Vec<(Complex<T>, Complex<T>)> = (0..n).map(|j| curve_derivatives(curves[curve_of[j]], angle[j])).collect();
    let mut g = vec![T::zero(); n];
    // h holds −∇²E, positive semidefinite near a maximum
    let mut h = vec![T::zero(); n * n];
    for j in 0..n {
        for k in 0..n {
            if k == j {
                continue;
            }
            let inv = (pts[j] - pts[k]).inv();
            let (d1j, d2j) = d[j];
            let q = d1j * inv;
            g[j] += q.re;
            h[j * n + j] -= (d2j * inv - q * q).re;
            h[j * n + k] -= (d1j * d[k].0 * inv * inv).re;
        }
    }
    if g.iter().any(|x| !x.is_finite()) || h.iter().any(|x| !x.is_finite()) {
        return T::zero();
    }
    let current = log_energy(pts);
    let scale = (0..n).map(|j| h[j * n + j].abs()).fold(T::zero(), T::max).max(T::min_positive_value());
    let mut mu = T::zero();
    let mut trial_angle = vec![T::zero(); n];
    let mut trial = vec![Complex::new(T::zero(), T::zero()); n];
    for _ in 0..12 {
        let mut m = h.clone();
        for j in 0..n {
            m[j * n + j] += mu;
        }
        if let Some(step) = cholesky_solve(&mut m, &g, n) {
            for j in 0..n {
                trial_angle[j] = angle[j] + step[j];
                trial[j] = curves[curve_of[j]].point(trial_angle[j]);
            }
            let e = log_energy(&trial);
            if e > current {
                for j in 0..n {
                    angle[j] = wrap_angle(trial_angle[j]);
                    pts[j] = trial[j];
                }
                return e - current;
            }
        }
        mu = if mu == T::zero() { scale * T::lit(1e-8) } else { mu * T::lit(16.0) };
    }
    T::zero()
}

/// `(γ′(θ), γ″(θ))` by central differences.
fn curve_derivatives<T: Scalar>(curve: &dyn ClosedCurve<T>, theta: T) -> (Complex<T>, Complex<T>) {
    let h = T::epsilon().powf(T::lit(0.25));
    let p0 = curve.point(theta);
    let pp = curve.point(theta + h);
    let pm = curve.point(theta - h);
    let two = T::lit(2.0);
    ((pp - pm) / (h * two), (pp - p0 * two + pm) / (h * h))
}

/// Solves `m x = b` for symmetric positive definite `m` (overwritten).
fn cholesky_solve<T: Scalar>(m: &mut [T], b: &[T], n: usize) -> Option<Vec<T>> {
    for j in 0..n {
        let mut diag = m[j * n + j];
        for k in 0..j {
            diag -= m[j * n + k] * m[j * n + k];
        }
        if !(diag > T::zero()) {
            return None;
        }
        let l = diag.sqrt();
        m[j * n + j] = l;
        for i in (j + 1)..n {
            let mut v = m[i * n + j];
            for k in 0..j {
                v -= m[i * n + k] * m[j * n + k];
            }
            m[i * n + j] = v / l;
        }
    }
    let mut y = vec![T::zero(); n];
    for i in 0..n {
        let mut v = b[i];
        for k in 0..i {
            v -= m[i * n + k] * y[k];
        }
        y[i] = v / m[i * n + i];
    }
    for i in (0..n).rev() {
        let mut v = y[i];
        for k in (i + 1)..n {
            v -= m[k * n + i] * y[k];
        }
        y[i] = v / m[i * n + i];
    }
    Some(y)
}

/// Open interval for point `j` bounded by its angular neighbours on the same curve.
fn bracket<T: Scalar>(angle: &[T], curve_of: &[usize], j: usize) -> (T, T) {
    let tau = T::TAU();
    let mut below = tau;
    let mut above = tau;
    for (k, &t) in angle.iter().enumerate() {
        if k == j || curve_of[k] != curve_of[j] {
            continue;
        }
        let d = wrap_angle(t - angle[j]);
        above = above.min(d);
        below = below.min(wrap_angle(angle[j] - t));
    }
    if below == tau && above == tau {
        let half = T::PI();
        return (angle[j] - half, angle[j] + half);
    }
    (angle[j] - below, angle[j] + above)
}

/// Coordinate ascent over the sample points of a discrete curve: each point
/// in turn jumps to the unused sample that maximises its contribution.
pub fn n_diameter_exchange_discrete<T: Scalar>(curve: &CurveSample<T>, n: usize) -> Result<FeketeResult<T>> {
    let (chosen, sweeps, converged) = exchange_discrete_indices(curve.points(), n)?;
    Ok(discrete_result(curve, chosen, FeketeMethod::ExchangeDiscrete, sweeps, converged))
}

pub(crate) fn exchange_discrete_indices<T: Scalar>(z: &[Complex<T>], n: usize) -> Result<(Vec<usize>, usize, bool)> {
    if n < 2 {
        return Err(Error::Precondition(format!("n must be >= 2, got {n}")));
    }
    let mut chosen = leja_indices(z, n)?;
    let mut used = vec![false; z.len()];
    for &i in &chosen {
        used[i] = true;
    }
    let min_gain = T::lit(1e-13);
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < 10_000 {
        sweeps += 1;
        let mut moved = false;
        for j in 0..n {
            let score = |c: usize| -> T {
                chosen
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, &i)| log_abs(z[c] - z[i]))
                    .sum()
            };
            let current = score(chosen[j]);
            let mut best = (chosen[j], current);
            for c in 0..z.len() {
                if used[c] {
                    continue;
                }
                let v = score(c);
                if v > best.1 + min_gain {
                    best = (c, v);
                }
            }
            if best.0 != chosen[j] {
                used[chosen[j]] = false;
                used[best.0] = true;
                chosen[j] = best.0;
                moved = true;
            }
        }
        if !moved {
            converged = true;
            break;
        }
    }
    Ok((chosen, sweeps, converged))
}

pub(crate) fn discrete_result<T: Scalar>(
    curve: &CurveSample<T>,
    mut chosen: Vec<usize>,
    method: FeketeMethod,
    iterations: usize,
    converged: bool,
) -> FeketeResult<T> {
    chosen.sort_unstable();
    let points: Vec<Complex<T>> = chosen.iter().map(|&i| curve.points()[i]).collect();
    let energy = log_energy(&points);
    let n = points.len();
    FeketeResult {
        n,
        angles: chosen.iter().map(|&i| curve.angle(i)).collect(),
        curve_index: vec![0; n],
        points,
        n_diameter: n_diameter_from_energy(energy, n),
        log_energy: energy,
        method,
        iterations,
        converged,
        warnings: if converged {
            Vec::new()
        } else {
            vec!["exchange search hit its sweep cap".into()]
        },
    }
}
