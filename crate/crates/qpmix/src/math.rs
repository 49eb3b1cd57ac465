//! Float math routed through `std` when available, `libm` otherwise.

#![allow(dead_code)]

macro_rules! shim {
    ($($name:ident => $libm:ident),* $(,)?) => {
        $(
            #[cfg(feature = "std")]
            #[inline(always)]
            pub fn $name(x: f64) -> f64 {
                f64::$name(x)
            }
            #[cfg(not(feature = "std"))]
            #[inline(always)]
            pub fn $name(x: f64) -> f64 {
                libm::$libm(x)
            }
        )*
    };
}

shim!(
    sin => sin,
    cos => cos,
    tan => tan,
    exp => exp,
    ln => log,
    sqrt => sqrt,
    asin => asin,
    abs => fabs,
    round => round,
    floor => floor,
);

#[cfg(feature = "std")]
#[inline(always)]
pub fn atan2(y: f64, x: f64) -> f64 {
    f64::atan2(y, x)
}
#[cfg(not(feature = "std"))]
#[inline(always)]
pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

#[cfg(feature = "std")]
#[inline(always)]
pub fn powi(x: f64, n: i32) -> f64 {
    f64::powi(x, n)
}
#[cfg(not(feature = "std"))]
#[inline(always)]
pub fn powi(x: f64, n: i32) -> f64 {
    libm::pow(x, n as f64)
}

/// Uniform draw in [0, 1) with 53 bits of precision.
#[inline(always)]
pub fn uniform_f64<R: rand_core::RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw in [lo, hi).
#[inline(always)]
pub fn uniform_range<R: rand_core::RngCore + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + uniform_f64(rng) * (hi - lo)
}
