//! Floating-point abstraction shared by every numerical module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point: f32 or f64.
///
/// The two tolerances scale with the precision of the type: `exact_tol` for
/// identities that hold exactly in real arithmetic, `loose_tol` for bounds
/// checked after several accumulated contractions.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    const EXACT_TOL: f64;
    const LOOSE_TOL: f64;

    fn exact_tol() -> Self {
        Self::lit(Self::EXACT_TOL)
    }

    fn loose_tol() -> Self {
        Self::lit(Self::LOOSE_TOL)
    }

    /// Converts an `f64` literal; never fails for f32/f64.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Scalar for f64 {
    const EXACT_TOL: f64 = 1e-12;
    const LOOSE_TOL: f64 = 1e-9;
}

impl Scalar for f32 {
    const EXACT_TOL: f64 = 1e-5;
    const LOOSE_TOL: f64 = 1e-4;
}
