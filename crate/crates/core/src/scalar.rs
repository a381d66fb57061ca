//! Floating-point abstraction for the theory routines.

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the spectral formulas are written against: `f32` or `f64`.
///
/// Everything in this crate is closed-form or low-dimensional, so the only
/// requirements are IEEE float semantics plus conversions for tolerances and
/// error reporting.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + core::fmt::Debug
    + core::fmt::Display
    + core::fmt::LowerExp
    + core::iter::Sum
    + core::ops::AddAssign
    + core::ops::SubAssign
    + core::ops::MulAssign
    + core::ops::DivAssign
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, used for literals and tolerances.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal does not convert to scalar")
    }

    /// Conversion from an index.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize does not convert to scalar")
    }

    /// `f64` view for diagnostics; NaN when out of range.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// A tolerance that is the given `f64` for double precision but never
    /// finer than a few ulps of the scalar in use (keeps `f32` usable).
    fn tol(t: f64) -> Self {
        let base = Self::of(t);
        let floor = Self::epsilon() * Self::of(32.0);
        if base > floor {
            base
        } else {
            floor
        }
    }
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + core::fmt::Debug
        + core::fmt::Display
        + core::fmt::LowerExp
        + core::iter::Sum
        + core::ops::AddAssign
        + core::ops::SubAssign
        + core::ops::MulAssign
        + core::ops::DivAssign
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Compensated (Kahan) accumulator; exactness of harmonic-number sums and
/// weight normalizations at the 1e-12 level depends on it.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum<S: Scalar> {
    sum: S,
    carry: S,
}

impl<S: Scalar> KahanSum<S> {
    pub fn new() -> Self {
        Self {
            sum: S::zero(),
            carry: S::zero(),
        }
    }

    pub fn add(&mut self, x: S) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> S {
        self.sum
    }
}

/// Kahan sum of an iterator.
pub fn ksum<S: Scalar, I: IntoIterator<Item = S>>(xs: I) -> S {
    let mut acc = KahanSum::new();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}
