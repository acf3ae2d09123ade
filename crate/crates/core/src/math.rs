//! Float helpers routed through `libm` when `std` is unavailable.

#[cfg(feature = "std")]
#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    x.sqrt()
}

#[cfg(not(feature = "std"))]
#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

/// Modulus of a complex number without requiring float features on
/// `num-complex`.
#[inline]
pub(crate) fn cabs(z: num_complex::Complex64) -> f64 {
    sqrt(z.norm_sqr())
}
