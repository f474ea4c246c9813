//! Principal frequency of planar domains by the 5-point finite-difference
//! Dirichlet Laplacian, and the ratio `φ_{M₀}` for disk maps.

use std::collections::VecDeque;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::curve::{sample_curve, CurveSample};
use crate::error::{Error, Result};
use crate::laurent::LaurentMap;
use crate::measures::validate_disk_case;
use crate::scalar::Scalar;

/// First positive zero of the Bessel function `J₀`; `Λ₁` of the unit disk.
pub const BESSEL_J0_FIRST_ZERO: f64 = 2.404_825_557_695_773;
/// Polygon resolution used to rasterise image domains.
pub const POLYGON_SAMPLES: usize = 2048;

const NONE: u32 = u32::MAX;

/// `N × N` nodes over a bounding box with an inside mask, row-major
/// (`j` indexes `y`, `i` indexes `x`).
///
/// Mask nodes with a neighbour outside the mask carry the Dirichlet
/// condition; the unknowns are mask nodes whose four neighbours are all in
/// the mask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDomain<T> {
    pub x_min: T,
    pub x_max: T,
    pub y_min: T,
    pub y_max: T,
    n: usize,
    mask: Vec<bool>,
}

impl<T: Scalar> GridDomain<T> {
    pub fn new(bbox: [T; 4], n: usize, mask: Vec<bool>) -> Result<Self> {
        let [x_min, x_max, y_min, y_max] = bbox;
        if n < 3 {
            return Err(Error::Shape(format!("grid resolution must be >= 3, got {n}")));
        }
        if mask.len() != n * n {
            return Err(Error::Shape(format!("mask has {} entries, expected {}", mask.len(), n * n)));
        }
        if !(x_max > x_min && y_max > y_min) {
            return Err(Error::Shape("empty bounding box".into()));
        }
        let d = Self {
            x_min,
            x_max,
            y_min,
            y_max,
            n,
            mask,
        };
        if d.interior_count() == 0 {
            return Err(Error::Degenerate("mask has no interior node".into()));
        }
        Ok(d)
    }

    pub fn from_predicate(bbox: [T; 4], n: usize, inside: impl Fn(Complex<T>) -> bool) -> Result<Self> {
        let probe = Self {
            x_min: bbox[0],
            x_max: bbox[1],
            y_min: bbox[2],
            y_max: bbox[3],
            n,
            mask: Vec::new(),
        };
        let mask = (0..n * n).map(|p| inside(probe.node(p % n, p / n))).collect();
        Self::new(bbox, n, mask)
    }

    /// Every node of the box is in the mask; the outer ring is Dirichlet.
    pub fn rectangle(x_min: T, x_max: T, y_min: T, y_max: T, n: usize) -> Result<Self> {
        Self::new([x_min, x_max, y_min, y_max], n, vec![true; n * n])
    }

    /// Closed disk on its own bounding box.
    pub fn disk(center: Complex<T>, radius: T, n: usize) -> Result<Self> {
        let bbox = [center.re - radius, center.re + radius, center.im - radius, center.im + radius];
        Self::from_predicate(bbox, n, |z| (z - center).norm() <= radius)
    }

    /// Nodes enclosed by the closed polyline (nonzero winding number), on
    /// the polyline's bounding box.
    pub fn from_curve(curve: &CurveSample<T>, n: usize) -> Result<Self> {
        let pts = curve.points();
        let (mut x0, mut x1, mut y0, mut y1) = (T::infinity(), T::neg_infinity(), T::infinity(), T::neg_infinity());
        for z in pts {
            x0 = x0.min(z.re);
            x1 = x1.max(z.re);
            y0 = y0.min(z.im);
            y1 = y1.max(z.im);
        }
        let mut d = Self {
            x_min: x0,
            x_max: x1,
            y_min: y0,
            y_max: y1,
            n,
            mask: Vec::new(),
        };
        if n < 3 || !(x1 > x0 && y1 > y0) {
            return Err(Error::Shape("curve has an empty bounding box or n < 3".into()));
        }
        let mut mask = vec![false; n * n];
        let m = pts.len();
        let mut crossings: Vec<(T, i32)> = Vec::new();
        for j in 0..n {
            let y = d.node(0, j).im;
            crossings.clear();
            for k in 0..m {
                let a = pts[k];
                let b = pts[(k + 1) % m];
                let dir = if a.im <= y && b.im > y {
                    1
                } else if b.im <= y && a.im > y {
                    -1
                } else {
                    continue;
                };
                let x = a.re + (y - a.im) / (b.im - a.im) * (b.re - a.re);
                crossings.push((x, dir));
            }
            crossings.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap_or(std::cmp::Ordering::Equal));
            // winding of a node = sum of crossings strictly to its right
            let total: i32 = crossings.iter().map(|c| c.1).sum();
            let mut left = 0i32;
            let mut c = 0;
            for i in 0..n {
                let x = d.node(i, j).re;
                while c < crossings.len() && crossings[c].0 <= x {
                    left += crossings[c].1;
                    c += 1;
                }
                mask[j * n + i] = total - left != 0;
            }
        }
        d.mask = mask;
        Self::new([x0, x1, y0, y1], n, d.mask)
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn spacing(&self) -> (T, T) {
        let k = T::from_usize_lossy(self.n - 1);
        ((self.x_max - self.x_min) / k, (self.y_max - self.y_min) / k)
    }

    pub fn node(&self, i: usize, j: usize) -> Complex<T> {
        let k = T::from_usize_lossy(self.n - 1);
        Complex::new(
            self.x_min + (self.x_max - self.x_min) * T::from_usize_lossy(i) / k,
            self.y_min + (self.y_max - self.y_min) * T::from_usize_lossy(j) / k,
        )
    }

    fn in_mask(&self, i: isize, j: isize) -> bool {
        let n = self.n as isize;
        i >= 0 && j >= 0 && i < n && j < n && self.mask[(j * n + i) as usize]
    }

    fn is_interior(&self, i: usize, j: usize) -> bool {
        let (i, j) = (i as isize, j as isize);
        self.in_mask(i, j)
            && self.in_mask(i - 1, j)
            && self.in_mask(i + 1, j)
            && self.in_mask(i, j - 1)
            && self.in_mask(i, j + 1)
    }

    /// Number of unknowns (mask nodes away from the Dirichlet ring).
    pub fn interior_count(&self) -> usize {
        (0..self.n * self.n)
            .filter(|p| self.is_interior(p % self.n, p / self.n))
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenOptions {
    /// Stop once the relative eigenvalue change falls below this...
    pub tolerance: f64,
    /// ...and `‖A w − μ w‖ / (μ‖w‖)` falls below this.
    pub residual_tolerance: f64,
    pub max_iterations: usize,
    /// Relative residual for the inner conjugate-gradient solves.
    pub cg_tolerance: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            residual_tolerance: 1e-6,
            max_iterations: 500,
            cg_tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult<T> {
    /// `√μ` for the smallest eigenvalue `μ` of the discrete `−Δ`.
    pub lambda1: T,
    pub iterations: usize,
    /// `‖Δ_h w + Λ₁² w‖ / ‖w‖`
    pub residual: T,
    pub unknowns: usize,
    pub warnings: Vec<String>,
}

/// Discrete `−Δ` on the unknowns of a grid domain.
struct Laplacian<T> {
    nbr: Vec<[u32; 4]>,
    cx: T,
    cy: T,
}

impl<T: Scalar> Laplacian<T> {
    fn apply(&self, x: &[T], y: &mut [T]) {
        let two = T::lit(2.0);
        let at = |k: u32| if k == NONE { T::zero() } else { x[k as usize] };
        for (p, nb) in self.nbr.iter().enumerate() {
            let v = x[p] * two;
            y[p] = (v - at(nb[0]) - at(nb[1])) * self.cx + (v - at(nb[2]) - at(nb[3])) * self.cy;
        }
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

/// Conjugate gradients for `A x = b` starting from `x`. Returns iterations used.
fn conjugate_gradient<T: Scalar>(op: &Laplacian<T>, b: &[T], x: &mut [T], rtol: T, max_iter: usize) -> Result<usize> {
    let n = b.len();
    let mut r = vec![T::zero(); n];
    let mut ap = vec![T::zero(); n];
    op.apply(x, &mut ap);
    for k in 0..n {
        r[k] = b[k] - ap[k];
    }
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let target = rtol * rtol * dot(b, b);
    for it in 0..max_iter {
        if rr <= target {
            return Ok(it);
        }
        op.apply(&p, &mut ap);
        let alpha = rr / dot(&p, &ap);
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for k in 0..n {
            p[k] = r[k] + beta * p[k];
        }
    }
    if rr <= target {
        return Ok(max_iter);
    }
    Err(Error::Convergence {
        iterations: max_iter,
        detail: format!("conjugate gradients stalled at relative residual {}", (rr / dot(b, b)).sqrt()),
    })
}

/// Unknown indices keyed by node, restricted to the largest 4-connected
/// component. Returns `(index per node, component count)`.
fn number_unknowns<T: Scalar>(d: &GridDomain<T>) -> (Vec<u32>, usize) {
    let n = d.n;
    let interior: Vec<bool> = (0..n * n).map(|p| d.is_interior(p % n, p / n)).collect();
    let mut comp = vec![usize::MAX; n * n];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for s in 0..n * n {
        if !interior[s] || comp[s] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        let mut size = 0;
        comp[s] = id;
        queue.push_back(s);
        while let Some(p) = queue.pop_front() {
            size += 1;
            let (i, j) = (p % n, p / n);
            let cand = [
                (i > 0).then(|| p - 1),
                (i + 1 < n).then(|| p + 1),
                (j > 0).then(|| p - n),
                (j + 1 < n).then(|| p + n),
            ];
            for q in cand.into_iter().flatten() {
                if interior[q] && comp[q] == usize::MAX {
                    comp[q] = id;
                    queue.push_back(q);
                }
            }
        }
        sizes.push(size);
    }
    // first largest component wins ties
    let best = (0..sizes.len()).fold(0, |b, c| if sizes[c] > sizes[b] { c } else { b });
    let mut index = vec![NONE; n * n];
    let mut next = 0u32;
    for p in 0..n * n {
        if interior[p] && comp[p] == best {
            index[p] = next;
            next += 1;
        }
    }
    (index, sizes.len())
}

/// Smallest Dirichlet eigenvalue of the 5-point Laplacian by inverse
/// iteration with conjugate-gradient solves; returns its square root.
pub fn principal_frequency<T: Scalar>(domain: &GridDomain<T>, opts: &EigenOptions) -> Result<EigenResult<T>> {
    let n = domain.n;
    let (index, components) = number_unknowns(domain);
    let mut nbr = Vec::new();
    for p in 0..n * n {
        if index[p] == NONE {
            continue;
        }
        let (i, j) = (p % n, p / n);
        let look = |q: Option<usize>| q.map_or(NONE, |q| index[q]);
        nbr.push([
            look((i > 0).then(|| p - 1)),
            look((i + 1 < n).then(|| p + 1)),
            look((j > 0).then(|| p - n)),
            look((j + 1 < n).then(|| p + n)),
        ]);
    }
    let m = nbr.len();
    if m == 0 {
        return Err(Error::Degenerate("domain has no unknowns".into()));
    }
    let (hx, hy) = domain.spacing();
    let op = Laplacian {
        nbr,
        cx: T::one() / (hx * hx),
        cy: T::one() / (hy * hy),
    };
    let mut warnings = Vec::new();
    if components > 1 {
        warnings.push(format!("mask has {components} components; using the largest"));
    }

    let norm = |v: &[T]| dot(v, v).sqrt();
    let mut v = vec![T::one() / T::from_usize_lossy(m).sqrt(); m];
    let mut av = vec![T::zero(); m];
    op.apply(&v, &mut av);
    let mut mu = dot(&v, &av);
    let mut x: Vec<T> = v.iter().map(|e| *e / mu).collect();
    let rtol = T::lit(opts.cg_tolerance);
    let tol = T::lit(opts.tolerance);
    let res_tol = T::lit(opts.residual_tolerance);
    let cg_cap = 20 * m + 100;
    let mut residual = T::infinity();
    for it in 1..=opts.max_iterations {
        conjugate_gradient(&op, &v, &mut x, rtol, cg_cap)?;
        let s = norm(&x);
        for k in 0..m {
            v[k] = x[k] / s;
        }
        op.apply(&v, &mut av);
        let mu_new = dot(&v, &av);
        residual = av.iter().zip(&v).map(|(a, b)| (*a - mu_new * *b).powi(2)).sum::<T>().sqrt();
        let change = ((mu_new - mu) / mu_new).abs();
        mu = mu_new;
        // warm start for the next solve: A⁻¹v ≈ v/μ
        for k in 0..m {
            x[k] = v[k] / mu;
        }
        if change < tol && residual <= res_tol * mu {
            let sum: T = v.iter().copied().sum();
            let sign = if sum < T::zero() { -T::one() } else { T::one() };
            let peak = v.iter().map(|e| *e * sign).fold(T::zero(), T::max);
            let low = v.iter().map(|e| *e * sign).fold(T::infinity(), T::min);
            if low < -T::lit(1e-6) * peak {
                warnings.push(format!("eigenvector changes sign (min/max = {})", low / peak));
            }
            return Ok(EigenResult {
                lambda1: mu.sqrt(),
                iterations: it,
                residual,
                unknowns: m,
                warnings,
            });
        }
    }
    Err(Error::Convergence {
        iterations: opts.max_iterations,
        detail: format!("inverse iteration stopped at eigenvalue {mu} with residual {residual}"),
    })
}

/// `φ_{M₀}(r) = Λ₁(rD) / Λ₁(f(rD)) = (j₀/r) / Λ₁(f(rD))`.
pub fn phi_m0<T: Scalar>(map: &LaurentMap<T>, r: T, n: usize, opts: &EigenOptions) -> Result<(T, EigenResult<T>)> {
    validate_disk_case(map, r, 256)?;
    let curve = sample_curve(map, r, POLYGON_SAMPLES)?;
    let domain = GridDomain::from_curve(&curve, n)?;
    let eig = principal_frequency(&domain, opts)?;
    Ok((T::lit(BESSEL_J0_FIRST_ZERO) / r / eig.lambda1, eig))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_disk(n: usize) -> f64 {
        let c = sample_curve(&LaurentMap::<f64>::identity(), 1.0, POLYGON_SAMPLES).unwrap();
        principal_frequency(&GridDomain::from_curve(&c, n).unwrap(), &EigenOptions::default())
            .unwrap()
            .lambda1
    }

    #[test]
    fn unit_disk_converges_to_bessel_zero() {
        let l: Vec<f64> = [64, 128, 256].iter().map(|&n| unit_disk(n)).collect();
        assert!((l[2] - BESSEL_J0_FIRST_ZERO).abs() / BESSEL_J0_FIRST_ZERO < 0.01, "{l:?}");
        assert!((l[2] - l[1]).abs() < (l[1] - l[0]).abs(), "{l:?}");
    }

    #[test]
    fn unit_square() {
        let d = GridDomain::rectangle(0.0, 1.0, 0.0, 1.0, 256).unwrap();
        let e = principal_frequency(&d, &EigenOptions::default()).unwrap();
        let want = PI * 2f64.sqrt();
        assert!((e.lambda1 - want).abs() / want < 0.01, "{}", e.lambda1);
        assert!(e.residual <= 1e-6 * e.lambda1 * e.lambda1);
        assert!(e.warnings.is_empty());
        // closed form of the discrete operator
        let h = 1.0 / 255.0;
        let exact = (2.0 * 4.0 / (h * h) * (PI * h / 2.0).sin().powi(2)).sqrt();
        assert!((e.lambda1 - exact).abs() < 1e-7, "{} vs {exact}", e.lambda1);
    }

    #[test]
    fn disk_scaling() {
        let base = principal_frequency(&GridDomain::disk(Complex::new(0.0, 0.0), 1.0, 128).unwrap(), &EigenOptions::default())
            .unwrap()
            .lambda1;
        for s in [0.5f64, 2.0] {
            let d = GridDomain::disk(Complex::new(0.3, -0.2), s, 128).unwrap();
            let l = principal_frequency(&d, &EigenOptions::default()).unwrap().lambda1;
            assert!((l * s - base).abs() / base < 0.01, "{s}: {l}");
        }
        let big = sample_curve(&LaurentMap::<f64>::identity(), 2.0, POLYGON_SAMPLES).unwrap();
        let l = principal_frequency(&GridDomain::from_curve(&big, 256).unwrap(), &EigenOptions::default())
            .unwrap()
            .lambda1;
        assert!((l - 1.202_413).abs() / 1.202_413 < 0.01, "{l}");
    }

    #[test]
    fn enlarging_the_domain_lowers_the_frequency() {
        let bbox = [-1.3, 1.3, -1.3, 1.3];
        let small = GridDomain::from_predicate(bbox, 128, |z: Complex<f64>| z.norm() <= 1.0).unwrap();
        let large = GridDomain::from_predicate(bbox, 128, |z: Complex<f64>| z.norm() <= 1.2).unwrap();
        let o = EigenOptions::default();
        assert!(principal_frequency(&large, &o).unwrap().lambda1 < principal_frequency(&small, &o).unwrap().lambda1);
    }

    #[test]
    fn disconnected_mask_uses_largest_component() {
        let bbox = [0.0, 3.0, 0.0, 1.0];
        let d = GridDomain::from_predicate(bbox, 96, |z: Complex<f64>| {
            (z - Complex::new(0.6, 0.5)).norm() <= 0.45 || (z - Complex::new(2.2, 0.5)).norm() <= 0.3
        })
        .unwrap();
        let e = principal_frequency(&d, &EigenOptions::default()).unwrap();
        assert_eq!(e.warnings.len(), 1);
        let want = BESSEL_J0_FIRST_ZERO / 0.45;
        assert!((e.lambda1 - want).abs() / want < 0.05, "{}", e.lambda1);
    }

    #[test]
    fn grid_validation() {
        assert!(matches!(GridDomain::<f64>::new([0.0, 1.0, 0.0, 1.0], 4, vec![true; 15]), Err(Error::Shape(_))));
        assert!(matches!(GridDomain::<f64>::new([0.0, 1.0, 0.0, 1.0], 4, vec![false; 16]), Err(Error::Degenerate(_))));
        assert!(matches!(GridDomain::<f64>::rectangle(1.0, 0.0, 0.0, 1.0, 8), Err(Error::Shape(_))));
    }

    #[test]
    fn phi_examples() {
        let o = EigenOptions::default();
        let id = LaurentMap::<f64>::identity();
        let (phi, _) = phi_m0(&id, 0.5, 128, &o).unwrap();
        assert!((phi - 1.0).abs() < 0.02, "{phi}");
        let twice = LaurentMap::<f64>::from_coefficients([(1, Complex::new(2.0, 0.0))]).unwrap();
        let (phi, _) = phi_m0(&twice, 0.5, 128, &o).unwrap();
        assert!((phi - 2.0).abs() < 0.04, "{phi}");
        let j = LaurentMap::<f64>::joukowski(0.5).unwrap();
        assert!(phi_m0(&j, 0.5, 64, &o).is_err());
    }

    #[test]
    fn f32_square() {
        let d = GridDomain::<f32>::rectangle(0.0, 1.0, 0.0, 1.0, 32).unwrap();
        let o = EigenOptions {
            tolerance: 1e-5,
            residual_tolerance: 1e-3,
            cg_tolerance: 1e-5,
            ..EigenOptions::default()
        };
        let e = principal_frequency(&d, &o).unwrap();
        assert!((e.lambda1 - std::f32::consts::PI * 2f32.sqrt()).abs() < 0.01, "{}", e.lambda1);
    }
}
