#[allow(unused_imports)]
use num_traits::Float;

/// Central-difference step for a coordinate currently at `x`.
pub(crate) fn step(x: f64) -> f64 {
    f64::EPSILON.cbrt() * x.abs().max(1.0)
}

/// Returns `(x - h, x + h, 2h)` where `2h` is the exactly representable
/// spacing of the two evaluation points.
pub(crate) fn stencil(x: f64) -> (f64, f64, f64) {
    let h = step(x);
    let lo = x - h;
    let hi = x + h;
    (lo, hi, hi - lo)
}
