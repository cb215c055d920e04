//! Coefficient domains: exact rationals, binary64 floats, and complex doubles.
//!
//! Every construction in this crate is generic over [`Scalar`]. The exact
//! domain ([`Rat`]) performs error-free arithmetic and uses exact zero tests
//! for rank decisions; the float domains use magnitude thresholds relative to
//! a caller-supplied tolerance. [`FloatScalar`] marks the domains that support
//! orthogonal factorizations (Householder reflections need square roots).

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// A field element usable as a polynomial or matrix coefficient.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
    + Send
    + Sync
    + 'static
{
    /// Floating-point domain used when a computation is inherently numeric
    /// (Macaulay kernels, Newton iteration).
    type Approx: FloatScalar;

    /// True when arithmetic is error-free and zero tests are exact.
    const EXACT: bool;

    fn from_int(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self;

    /// Converts a double into this domain without rounding (binary64 values
    /// are dyadic rationals, so this is exact even for [`Rat`]).
    fn from_f64_lossless(v: f64) -> Self;

    /// Approximate absolute value, used for pivot selection and thresholds.
    fn magnitude(&self) -> f64;

    fn conjugate(&self) -> Self;

    fn to_approx(&self) -> Self::Approx;

    /// Converts back from the float domain without rounding (the float
    /// domains are identity; rationals absorb the dyadic value exactly).
    fn from_approx(a: Self::Approx) -> Self;

    /// Best-effort (re, im) pair for reporting.
    fn to_re_im(&self) -> (f64, f64);

    /// Tolerance-aware zero test: exact domains ignore `tol` and `scale`.
    fn is_negligible(&self, tol: f64, scale: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.magnitude() <= tol * scale.max(f64::MIN_POSITIVE)
        }
    }

    /// For exact domains: the positive content of a coefficient list (gcd of
    /// numerators over lcm of denominators, signed by the last entry), so
    /// that dividing by it yields primitive integer coefficients. Float
    /// domains return `None`.
    fn content(_items: &[Self]) -> Option<Self> {
        None
    }
}

/// Scalars on which orthogonal factorizations run.
pub trait FloatScalar: Scalar<Approx = Self> {
    fn from_f64(v: f64) -> Self;

    fn from_re_im(re: f64, im: f64) -> Self;

    fn scale(&self, s: f64) -> Self;
}

/// Exact rational coefficient (arbitrary precision).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(pub BigRational);

impl Rat {
    pub fn new(num: i64, den: i64) -> Self {
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_bigint(num: BigInt, den: BigInt) -> Self {
        Rat(BigRational::new(num, den))
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for Rat {
    type Output = Rat;
    fn add(self, rhs: Rat) -> Rat {
        Rat(self.0 + rhs.0)
    }
}

impl Sub for Rat {
    type Output = Rat;
    fn sub(self, rhs: Rat) -> Rat {
        Rat(self.0 - rhs.0)
    }
}

impl Mul for Rat {
    type Output = Rat;
    fn mul(self, rhs: Rat) -> Rat {
        Rat(self.0 * rhs.0)
    }
}

impl Div for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        Rat(self.0 / rhs.0)
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Zero for Rat {
    fn zero() -> Self {
        Rat(BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Rat {
    fn one() -> Self {
        Rat(BigRational::one())
    }
}

impl Scalar for Rat {
    type Approx = f64;
    const EXACT: bool = true;

    fn from_int(v: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(v)))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rat::new(num, den)
    }

    fn from_f64_lossless(v: f64) -> Self {
        Rat(BigRational::from_float(v).expect("finite float"))
    }

    fn magnitude(&self) -> f64 {
        self.0.to_f64().map(f64::abs).unwrap_or(f64::INFINITY)
    }

    fn conjugate(&self) -> Self {
        self.clone()
    }

    fn to_approx(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    fn from_approx(a: f64) -> Self {
        Rat::from_f64_lossless(a)
    }

    fn to_re_im(&self) -> (f64, f64) {
        (self.to_approx(), 0.0)
    }

    fn content(items: &[Self]) -> Option<Self> {
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        let mut sign = BigInt::one();
        for it in items {
            if it.0.is_zero() {
                continue;
            }
            num_gcd = num_gcd.gcd(it.0.numer());
            den_lcm = den_lcm.lcm(it.0.denom());
            sign = if it.0.numer().is_negative() {
                -BigInt::one()
            } else {
                BigInt::one()
            };
        }
        if num_gcd.is_zero() {
            return None;
        }
        Some(Rat(BigRational::new(sign * num_gcd, den_lcm)))
    }
}

impl Scalar for f64 {
    type Approx = f64;
    const EXACT: bool = false;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_f64_lossless(v: f64) -> Self {
        v
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn conjugate(&self) -> Self {
        *self
    }

    fn to_approx(&self) -> f64 {
        *self
    }

    fn from_approx(a: f64) -> Self {
        a
    }

    fn to_re_im(&self) -> (f64, f64) {
        (*self, 0.0)
    }
}

impl FloatScalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }

    fn from_re_im(re: f64, _im: f64) -> Self {
        re
    }

    fn scale(&self, s: f64) -> Self {
        self * s
    }
}

impl Scalar for Complex64 {
    type Approx = Complex64;
    const EXACT: bool = false;

    fn from_int(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }

    fn from_f64_lossless(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn conjugate(&self) -> Self {
        self.conj()
    }

    fn to_approx(&self) -> Complex64 {
        *self
    }

    fn from_approx(a: Complex64) -> Self {
        a
    }

    fn to_re_im(&self) -> (f64, f64) {
        (self.re, self.im)
    }
}

impl FloatScalar for Complex64 {
    fn from_f64(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }

    fn from_re_im(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }

    fn scale(&self, s: f64) -> Self {
        self * s
    }
}
