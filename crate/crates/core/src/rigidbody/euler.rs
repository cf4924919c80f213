//! Intrinsic X-Y-Z Euler angles and their rate maps.
//!
//! For angles `(a, b, c)` the rotation is `Rx(a) * Ry(b) * Rz(c)`. The rate map
//! `E` sends Euler-angle rates to the angular velocity expressed in the rotated
//! (child) frame: `omega_body = E(a, b, c) * [a', b', c']`.

use nalgebra::{Matrix3, Vector3};

/// Smallest singular value of the rate map below which the joint is treated as
/// locked.
pub const SINGULAR_TOLERANCE: f64 = 1e-10;

pub fn rotation(angles: &Vector3<f64>) -> Matrix3<f64> {
    let (sa, ca) = angles.x.sin_cos();
    let (sb, cb) = angles.y.sin_cos();
    let (sc, cc) = angles.z.sin_cos();
    // Rx(a) * Ry(b) * Rz(c), expanded.
    Matrix3::new(
        cb * cc,
        -cb * sc,
        sb,
        ca * sc + sa * sb * cc,
        ca * cc - sa * sb * sc,
        -sa * cb,
        sa * sc - ca * sb * cc,
        sa * cc + ca * sb * sc,
        ca * cb,
    )
}

pub fn rate_map(angles: &Vector3<f64>) -> Matrix3<f64> {
    let (sb, cb) = angles.y.sin_cos();
    let (sc, cc) = angles.z.sin_cos();
    Matrix3::new(cb * cc, sc, 0.0, -cb * sc, cc, 0.0, sb, 0.0, 1.0)
}

/// `dE/dt * rates`, the velocity-product part of the body angular acceleration.
pub fn rate_map_dot_times(angles: &Vector3<f64>, rates: &Vector3<f64>) -> Vector3<f64> {
    let (sb, cb) = angles.y.sin_cos();
    let (sc, cc) = angles.z.sin_cos();
    let (ad, bd, cd) = (rates.x, rates.y, rates.z);
    let col1 = Vector3::new(-sb * bd * cc - cb * sc * cd, sb * bd * sc - cb * cc * cd, cb * bd);
    let col2 = Vector3::new(cc * cd, -sc * cd, 0.0);
    col1 * ad + col2 * bd
}

/// Smallest singular value of [`rate_map`].
///
/// The columns of `E` are unit vectors and only the first and last are not
/// orthogonal (their dot product is `sin b`), so `E^T E` has eigenvalues
/// `1, 1 + sin b, 1 - sin b`.
pub fn rate_map_min_singular(angles: &Vector3<f64>) -> f64 {
    (1.0 - angles.y.sin().abs()).max(0.0).sqrt()
}
