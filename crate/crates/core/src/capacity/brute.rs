//! Exact discrete n-diameter by exhaustive branch-and-bound over index subsets.
//!
//! Subsets are enumerated as increasing index tuples. A branch is cut only
//! when an upper bound on every completion cannot beat the incumbent, so the
//! returned value is the exact optimum over the sample.

use super::fekete::{discrete_result, FeketeMethod, FeketeResult};
use crate::curve::CurveSample;
use crate::error::{Error, Result};
use crate::scalar::{log_abs, Scalar};

pub const MAX_BRUTE_N: usize = 6;
pub const MAX_BRUTE_SAMPLES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteForceOptions {
    /// Search nodes allowed before giving up with [`Error::Size`].
    pub node_budget: u64,
}

impl Default for BruteForceOptions {
    fn default() -> Self {
        Self {
            node_budget: 500_000_000,
        }
    }
}

/// Exact maximiser of `Π_{j<k}|z_j − z_k|` over all `n`-subsets of the samples.
pub fn n_diameter_brute<T: Scalar>(
    curve: &CurveSample<T>,
    n: usize,
    opts: &BruteForceOptions,
) -> Result<FeketeResult<T>> {
    let m = curve.sample_count();
    if !(2..=MAX_BRUTE_N).contains(&n) {
        return Err(Error::Precondition(format!("brute force supports 2 <= n <= {MAX_BRUTE_N}, got {n}")));
    }
    if m > MAX_BRUTE_SAMPLES {
        return Err(Error::Size {
            needed: binomial(m as u128, n as u128),
            cap: binomial(MAX_BRUTE_SAMPLES as u128, n as u128),
        });
    }
    if m < n {
        return Err(Error::Precondition(format!("{m} samples cannot hold {n} points")));
    }
    let z = curve.points();
    let dist: Vec<T> = (0..m * m)
        .map(|ij| {
            let (i, j) = (ij / m, ij % m);
            if i == j {
                T::neg_infinity()
            } else {
                log_abs(z[i] - z[j])
            }
        })
        .collect();

    // first[k][s]: optimum energy of k points whose smallest index is s, and
    // suffix[k][s]: the same over smallest index >= s. Rows are filled for
    // increasing k and starts from the back, so every bound a search needs is
    // already exact.
    let neg = T::neg_infinity();
    let cyclic = is_cyclic(&dist, m);
    let mut first: Vec<Vec<T>> = vec![vec![T::zero(); m + 1]; 2];
    let mut suffix: Vec<Vec<T>> = vec![vec![T::zero(); m + 1]; 2];
    let mut nodes = 0u64;
    let mut best = Vec::new();
    for k in 2..=n {
        let mut first_row = vec![neg; m + 1];
        let mut row = vec![neg; m + 1];
        let mut arg: Vec<usize> = Vec::new();
        // under a cyclic index symmetry some optimum contains index 0, and the
        // global optimum bounds every other row entry
        let starts: Vec<usize> = if cyclic { vec![0] } else { (0..=(m - k)).rev().collect() };
        for s in starts {
            let mut search = Search {
                m,
                dist: &dist,
                first: &first,
                suffix: &suffix,
                target: k,
                // the last size only needs the overall maximum
                best_value: if k == n { row[s + 1] } else { neg },
                best: Vec::new(),
                stack: vec![s],
                cross: vec![vec![T::zero(); m]; k + 1],
                nodes: 0,
                budget: opts.node_budget.saturating_sub(nodes),
            };
            search.cross[1].copy_from_slice(&dist[s * m..(s + 1) * m]);
            search.descend(T::zero())?;
            nodes += search.nodes;
            first_row[s] = search.best_value;
            row[s] = if search.best_value > row[s + 1] { search.best_value } else { row[s + 1] };
            if !search.best.is_empty() && search.best_value >= row[s] {
                arg = search.best;
            }
        }
        if cyclic {
            let opt = row[0];
            row[..=(m - k)].fill(opt);
            first_row[..=(m - k)].fill(opt);
        }
        first.push(first_row);
        suffix.push(row);
        best = arg;
    }
    best.sort_unstable();
    let mut res = discrete_result(curve, best, FeketeMethod::BruteForce, nodes as usize, true);
    res.warnings.clear();
    Ok(res)
}

/// True when shifting every index by one leaves all pairwise log distances
/// unchanged, as for equally spaced samples of a circle.
fn is_cyclic<T: Scalar>(dist: &[T], m: usize) -> bool {
    let tol = T::from_f64(1e-12).unwrap();
    (0..m).all(|i| {
        let j = (i + 1) % m;
        (0..m).all(|k| {
            let l = (k + 1) % m;
            i == k || (dist[i * m + k] - dist[j * m + l]).abs() <= tol
        })
    })
}

struct Search<'a, T> {
    m: usize,
    dist: &'a [T],
    first: &'a [Vec<T>],
    suffix: &'a [Vec<T>],
    target: usize,
    best_value: T,
    best: Vec<usize>,
    stack: Vec<usize>,
    /// `cross[d][c]`: sum of log distances from sample `c` to the first `d` chosen points
    cross: Vec<Vec<T>>,
    nodes: u64,
    budget: u64,
}

impl<T: Scalar> Search<'_, T> {
    fn descend(&mut self, partial: T) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::Size {
                needed: self.nodes as u128,
                cap: self.budget as u128,
            });
        }
        let depth = self.stack.len();
        let remaining = self.target - depth;
        let start = self.stack.last().map_or(0, |&i| i + 1);
        if self.m - start < remaining {
            return Ok(());
        }
        let cross = &self.cross[depth];

        if remaining == 1 {
            let mut arg = None;
            let mut val = self.best_value;
            for c in start..self.m {
                let v = partial + cross[c];
                if v > val {
                    val = v;
                    arg = Some(c);
                }
            }
            if let Some(c) = arg {
                self.best_value = val;
                self.best = self.stack.clone();
                self.best.push(c);
            }
            return Ok(());
        }

        // bound: best `remaining` cross terms plus the optimal internal energy
        let bound = partial + top_sum(&cross[start..], remaining) + self.suffix[remaining][start];
        if !(bound > self.best_value) {
            return Ok(());
        }

        // per-child bound: the child is the smallest remaining index, so the
        // rest come from the suffix after it
        let last = self.m - remaining;
        let mut top = [T::neg_infinity(); MAX_BRUTE_N];
        let mut tail_top = vec![T::zero(); last + 1];
        for c in (start..self.m).rev() {
            if c <= last {
                tail_top[c] = top[..remaining - 1].iter().copied().sum();
            }
            insert_top(&mut top[..remaining - 1], cross[c]);
        }
        let first = &self.first[remaining];
        let mut children: Vec<(T, usize)> = (start..=last)
            .map(|c| (partial + cross[c] + tail_top[c] + first[c], c))
            .filter(|&(b, _)| b > self.best_value)
            .collect();
        children.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));
        for (child_bound, c) in children {
            if !(child_bound > self.best_value) {
                continue;
            }
            let next_partial = partial + self.cross[depth][c];
            let row = &self.dist[c * self.m..(c + 1) * self.m];
            let (head, tail) = self.cross.split_at_mut(depth + 1);
            for ((dst, src), d) in tail[0].iter_mut().zip(head[depth].iter()).zip(row) {
                *dst = *src + *d;
            }
            self.stack.push(c);
            self.descend(next_partial)?;
            self.stack.pop();
        }
        Ok(())
    }
}

/// Sum of the `k` largest values.
fn top_sum<T: Scalar>(values: &[T], k: usize) -> T {
    let mut top = [T::neg_infinity(); MAX_BRUTE_N];
    for &v in values {
        insert_top(&mut top[..k], v);
    }
    top[..k].iter().copied().sum()
}

/// Insert `v` into a descending array, dropping the smallest entry.
fn insert_top<T: Scalar>(top: &mut [T], v: T) {
    let k = top.len();
    if k == 0 || !(v > top[k - 1]) {
        return;
    }
    let mut i = k - 1;
    while i > 0 && top[i - 1] < v {
        top[i] = top[i - 1];
        i -= 1;
    }
    top[i] = v;
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::LaurentMap;
    use num_complex::Complex;

    #[test]
    fn top_sum_picks_largest() {
        assert_eq!(top_sum(&[1.0f64, 5.0, 3.0, 4.0], 2), 9.0);
        assert_eq!(top_sum(&[1.0f64, 5.0, 3.0, 4.0], 1), 5.0);
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(256, 6), 368_532_802_176);
        assert_eq!(binomial(5, 2), 10);
    }

    /// Plain enumeration of every subset, for cross-checking the pruning.
    fn enumerate_all(z: &[Complex<f64>], n: usize) -> f64 {
        fn rec(z: &[Complex<f64>], n: usize, start: usize, cur: &mut Vec<usize>, best: &mut f64) {
            if cur.len() == n {
                let mut e = 0.0;
                for a in 0..n {
                    for b in (a + 1)..n {
                        e += (z[cur[a]] - z[cur[b]]).norm().ln();
                    }
                }
                *best = best.max(e);
                return;
            }
            for c in start..z.len() {
                cur.push(c);
                rec(z, n, c + 1, cur, best);
                cur.pop();
            }
        }
        let mut best = f64::NEG_INFINITY;
        rec(z, n, 0, &mut Vec::new(), &mut best);
        best
    }

    #[test]
    fn matches_plain_enumeration_on_irregular_points() {
        // deterministic pseudo-random cloud on a wobbly curve
        let pts: Vec<Complex<f64>> = (0..24)
            .map(|k| {
                let t = k as f64 * std::f64::consts::TAU / 24.0;
                let r = 1.0 + 0.3 * (3.0 * t).cos() + 0.1 * (7.0 * t).sin();
                Complex::from_polar(r, t)
            })
            .collect();
        let curve = CurveSample::from_points(1.0, pts.clone()).unwrap();
        for n in 2..=5 {
            let res = n_diameter_brute(&curve, n, &BruteForceOptions::default()).unwrap();
            let exact = enumerate_all(&pts, n);
            assert!((res.log_energy - exact).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn cyclic_samples_match_plain_enumeration() {
        let id = crate::laurent::LaurentMap::<f64>::identity();
        let curve = crate::curve::sample_curve(&id, 1.0f64, 20).unwrap();
        let m = curve.sample_count();
        let dist: Vec<f64> = (0..m * m)
            .map(|ij| (curve.points()[ij / m] - curve.points()[ij % m]).norm().ln())
            .collect();
        assert!(is_cyclic(&dist, m));
        for n in 2..=6 {
            let res = n_diameter_brute(&curve, n, &BruteForceOptions::default()).unwrap();
            let exact = enumerate_all(curve.points(), n);
            assert!((res.log_energy - exact).abs() < 1e-12, "n = {n}");
        }
        let wobbly = crate::curve::sample_curve(&LaurentMap::joukowski(0.3f64).unwrap(), 1.5, 20).unwrap();
        let dist: Vec<f64> = (0..m * m)
            .map(|ij| (wobbly.points()[ij / m] - wobbly.points()[ij % m]).norm().ln())
            .collect();
        assert!(!is_cyclic(&dist, m));
    }

    #[test]
    fn budget_exhaustion_is_a_size_error() {
        let id = crate::laurent::LaurentMap::<f64>::identity();
        let curve = crate::curve::sample_curve(&id, 1.0, 200).unwrap();
        let tiny = BruteForceOptions { node_budget: 10 };
        assert!(matches!(n_diameter_brute(&curve, 5, &tiny), Err(Error::Size { .. })));
    }

    #[test]
    fn rejects_out_of_range_requests() {
        let id = crate::laurent::LaurentMap::<f64>::identity();
        let curve = crate::curve::sample_curve(&id, 1.0, 300).unwrap();
        assert!(matches!(
            n_diameter_brute(&curve, 3, &BruteForceOptions::default()),
            Err(Error::Size { .. })
        ));
        let curve = crate::curve::sample_curve(&id, 1.0, 64).unwrap();
        assert!(n_diameter_brute(&curve, 7, &BruteForceOptions::default()).is_err());
        assert!(n_diameter_brute(&curve, 1, &BruteForceOptions::default()).is_err());
    }
}
