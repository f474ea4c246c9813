//! Floating point scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar the library computes in: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal. Never fails for finite input.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize fits scalar")
    }

    #[inline]
    fn from_i64_lossy(n: i64) -> Self {
        Self::from_i64(n).expect("i64 fits scalar")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `e^{iθ}`
#[inline]
pub fn unit<T: Scalar>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// `log |z|` without the square root.
#[inline]
pub fn log_abs<T: Scalar>(z: Complex<T>) -> T {
    z.norm_sqr().ln() * T::lit(0.5)
}

/// Reduces an angle into `[0, 2π)`.
#[inline]
pub fn wrap_angle<T: Scalar>(theta: T) -> T {
    let tau = T::TAU();
    let mut t = theta % tau;
    if t < T::zero() {
        t += tau;
    }
    if t >= tau {
        t -= tau;
    }
    t
}

/// Golden-section maximisation of `f` on `[lo, hi]`.
///
/// Returns `(argmax, max)`. Stops when the bracket is narrower than `xtol`
/// or after `max_iter` shrink steps.
pub fn golden_max<T: Scalar, F: FnMut(T) -> T>(
    mut f: F,
    lo: T,
    hi: T,
    xtol: T,
    max_iter: usize,
) -> (T, T) {
    let inv_phi = T::lit(0.618_033_988_749_894_8);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..max_iter {
        if (b - a).abs() <= xtol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, fx) = golden_max(|x: f64| -(x - 0.3) * (x - 0.3), -1.0, 2.0, 1e-10, 200);
        assert!((x - 0.3).abs() < 1e-7);
        assert!(fx.abs() < 1e-13);
    }

    #[test]
    fn wrap_angle_range() {
        for &t in &[-7.0f64, -0.1, 0.0, 3.0, 6.5, 100.0] {
            let w = wrap_angle(t);
            assert!((0.0..std::f64::consts::TAU).contains(&w));
            assert!(((w - t) / std::f64::consts::TAU).fract().abs() < 1e-12
                || (1.0 - ((w - t) / std::f64::consts::TAU).fract().abs()) < 1e-12);
        }
    }

    #[test]
    fn works_in_single_precision() {
        let z = unit(0.5f32);
        assert!((z.norm() - 1.0).abs() < 1e-6);
        assert!((log_abs(Complex::new(3.0f32, 4.0)) - 5.0f32.ln()).abs() < 1e-6);
    }
}
