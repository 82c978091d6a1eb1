//! Float helpers that resolve to `std` or `libm` depending on the build.

use num_traits::Float;

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    Float::sqrt(x)
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    Float::exp(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    Float::ln(x)
}

#[inline]
pub(crate) fn powi(x: f64, n: i32) -> f64 {
    Float::powi(x, n)
}

#[inline]
pub(crate) fn rem_euclid(x: f64, m: f64) -> f64 {
    let r = x - m * Float::floor(x / m);
    if r >= m {
        r - m
    } else {
        r
    }
}

/// Wrap an angle into (-pi, pi].
pub(crate) fn wrap_angle(x: f64) -> f64 {
    use core::f64::consts::PI;
    let r = rem_euclid(x + PI, 2.0 * PI) - PI;
    if r <= -PI {
        r + 2.0 * PI
    } else {
        r
    }
}
