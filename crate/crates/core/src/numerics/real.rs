//! Scalar abstraction shared by every engine.
//!
//! Two backends implement [`Real`]: plain `f64` (53 mantissa bits, the fast
//! mode) and [`BigFloat`], a thin wrapper over an MPFR float whose precision
//! is fixed by the [`PrecisionContext`] it was created under. Binary
//! operations between `BigFloat`s of different precision panic.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{
    Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign,
};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer};

use crate::error::{Error, Result};

/// Number of binary mantissa digits carried by every scalar of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    mantissa_bits: u32,
}

impl PrecisionContext {
    pub const DEFAULT_BITS: u32 = 256;
    pub const DOUBLE_BITS: u32 = 53;

    pub fn new(mantissa_bits: u32) -> Result<Self> {
        if mantissa_bits < Self::DOUBLE_BITS {
            return Err(Error::InvalidParameter(format!(
                "precision must be at least 53 bits, got {mantissa_bits}"
            )));
        }
        Ok(Self { mantissa_bits })
    }

    pub fn double() -> Self {
        Self { mantissa_bits: Self::DOUBLE_BITS }
    }

    pub fn bits(&self) -> u32 {
        self.mantissa_bits
    }

    /// `2^(-bits/2)`, the residual tolerance used throughout.
    pub fn half_tolerance(&self) -> f64 {
        2f64.powf(-(self.mantissa_bits as f64) / 2.0)
    }

    /// `2^(-bits/4)`.
    pub fn quarter_tolerance(&self) -> f64 {
        2f64.powf(-(self.mantissa_bits as f64) / 4.0)
    }

    /// Significant decimal digits needed to round-trip a value.
    pub fn decimal_digits(&self) -> usize {
        (self.mantissa_bits as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1
    }

    pub fn real<T: Real>(&self, x: f64) -> T {
        T::from_f64(self, x)
    }

    pub fn zero<T: Real>(&self) -> T {
        T::from_f64(self, 0.0)
    }

    pub fn one<T: Real>(&self) -> T {
        T::from_f64(self, 1.0)
    }

    pub fn int<T: Real>(&self, n: &Integer) -> T {
        T::from_integer(self, n)
    }

    /// `num / den` rounded once in the active precision.
    pub fn ratio<T: Real>(&self, num: i64, den: i64) -> T {
        let n: T = T::from_integer(self, &Integer::from(num));
        n / T::from_integer(self, &Integer::from(den))
    }

    pub fn pi<T: Real>(&self) -> T {
        T::pi(self)
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self { mantissa_bits: Self::DEFAULT_BITS }
    }
}

/// Real scalar used by the numerical kernels.
pub trait Real:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + for<'a> DivAssign<&'a Self>
{
    /// Whether values of this type can be created under `ctx`.
    fn supports(ctx: &PrecisionContext) -> bool;
    fn from_f64(ctx: &PrecisionContext, x: f64) -> Self;
    fn from_integer(ctx: &PrecisionContext, n: &Integer) -> Self;
    fn pi(ctx: &PrecisionContext) -> Self;
    /// Parse a decimal literal directly in the target precision.
    fn parse(ctx: &PrecisionContext, s: &str) -> Option<Self>;

    fn bits(&self) -> u32;
    fn to_f64(&self) -> f64;
    fn is_finite(&self) -> bool;
    fn is_zero(&self) -> bool;

    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn ln(&self) -> Self;
    fn exp(&self) -> Self;
    fn cos(&self) -> Self;
    fn sin(&self) -> Self;
    fn atan(&self) -> Self;
    fn powi(&self, n: i32) -> Self;

    /// `self += a * b`
    fn add_mul(&mut self, a: &Self, b: &Self);
    /// `self -= a * b`
    fn sub_mul(&mut self, a: &Self, b: &Self);

    /// Decimal rendering with the given number of significant digits.
    fn to_decimal(&self, digits: usize) -> String;

    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_f64_like(&self, x: f64) -> Self;

    fn context(&self) -> PrecisionContext {
        PrecisionContext { mantissa_bits: self.bits() }
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn total_cmp_f(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }
}

impl Real for f64 {
    fn supports(ctx: &PrecisionContext) -> bool {
        ctx.bits() == PrecisionContext::DOUBLE_BITS
    }
    fn from_f64(_ctx: &PrecisionContext, x: f64) -> Self {
        x
    }
    fn from_integer(_ctx: &PrecisionContext, n: &Integer) -> Self {
        n.to_f64()
    }
    fn pi(_ctx: &PrecisionContext) -> Self {
        std::f64::consts::PI
    }
    fn parse(_ctx: &PrecisionContext, s: &str) -> Option<Self> {
        s.trim().parse().ok()
    }
    fn bits(&self) -> u32 {
        PrecisionContext::DOUBLE_BITS
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn atan(&self) -> Self {
        f64::atan(*self)
    }
    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }
    fn add_mul(&mut self, a: &Self, b: &Self) {
        *self = a.mul_add(*b, *self);
    }
    fn sub_mul(&mut self, a: &Self, b: &Self) {
        *self = (-a).mul_add(*b, *self);
    }
    fn to_decimal(&self, digits: usize) -> String {
        format!("{:.*e}", digits.saturating_sub(1), self)
    }
    fn zero_like(&self) -> Self {
        0.0
    }
    fn one_like(&self) -> Self {
        1.0
    }
    fn from_f64_like(&self, x: f64) -> Self {
        x
    }
}

/// MPFR-backed float with a fixed mantissa width.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct BigFloat(Float);

impl BigFloat {
    pub fn with_prec(bits: u32, x: f64) -> Self {
        BigFloat(Float::with_val(bits, x))
    }

    pub fn inner(&self) -> &Float {
        &self.0
    }

    #[inline]
    fn check(&self, other: &Self) {
        assert_eq!(
            self.0.prec(),
            other.0.prec(),
            "mixed-precision arithmetic is not allowed"
        );
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.to_string_radix(10, Some(20)))
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = PrecisionContext { mantissa_bits: self.0.prec() }.decimal_digits();
        write!(f, "{}", self.to_decimal(digits))
    }
}

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat(-self.0)
    }
}

macro_rules! big_binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident) => {
        impl $tr for BigFloat {
            type Output = BigFloat;
            #[inline]
            fn $m(mut self, rhs: BigFloat) -> BigFloat {
                self.check(&rhs);
                self.0.$am(&rhs.0);
                self
            }
        }
        impl<'a> $tr<&'a BigFloat> for BigFloat {
            type Output = BigFloat;
            #[inline]
            fn $m(mut self, rhs: &'a BigFloat) -> BigFloat {
                self.check(rhs);
                self.0.$am(&rhs.0);
                self
            }
        }
        impl $atr for BigFloat {
            #[inline]
            fn $am(&mut self, rhs: BigFloat) {
                self.check(&rhs);
                self.0.$am(&rhs.0);
            }
        }
        impl<'a> $atr<&'a BigFloat> for BigFloat {
            #[inline]
            fn $am(&mut self, rhs: &'a BigFloat) {
                self.check(rhs);
                self.0.$am(&rhs.0);
            }
        }
    };
}

big_binop!(Add, add, AddAssign, add_assign);
big_binop!(Sub, sub, SubAssign, sub_assign);
big_binop!(Mul, mul, MulAssign, mul_assign);
big_binop!(Div, div, DivAssign, div_assign);

impl Real for BigFloat {
    fn supports(_ctx: &PrecisionContext) -> bool {
        true
    }
    fn from_f64(ctx: &PrecisionContext, x: f64) -> Self {
        BigFloat(Float::with_val(ctx.bits(), x))
    }
    fn from_integer(ctx: &PrecisionContext, n: &Integer) -> Self {
        BigFloat(Float::with_val(ctx.bits(), n))
    }
    fn pi(ctx: &PrecisionContext) -> Self {
        BigFloat(Float::with_val(ctx.bits(), Constant::Pi))
    }
    fn parse(ctx: &PrecisionContext, s: &str) -> Option<Self> {
        let parsed = Float::parse(s.trim()).ok()?;
        Some(BigFloat(Float::with_val(ctx.bits(), parsed)))
    }
    fn bits(&self) -> u32 {
        self.0.prec()
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
    fn is_finite(&self) -> bool {
        self.0.is_finite()
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn abs(&self) -> Self {
        BigFloat(self.0.clone().abs())
    }
    fn sqrt(&self) -> Self {
        BigFloat(self.0.clone().sqrt())
    }
    fn ln(&self) -> Self {
        BigFloat(self.0.clone().ln())
    }
    fn exp(&self) -> Self {
        BigFloat(self.0.clone().exp())
    }
    fn cos(&self) -> Self {
        BigFloat(self.0.clone().cos())
    }
    fn sin(&self) -> Self {
        BigFloat(self.0.clone().sin())
    }
    fn atan(&self) -> Self {
        BigFloat(self.0.clone().atan())
    }
    fn powi(&self, n: i32) -> Self {
        BigFloat(self.0.clone().pow(n))
    }
    #[inline]
    fn add_mul(&mut self, a: &Self, b: &Self) {
        self.check(a);
        self.check(b);
        self.0 += &a.0 * &b.0;
    }
    #[inline]
    fn sub_mul(&mut self, a: &Self, b: &Self) {
        self.check(a);
        self.check(b);
        self.0 -= &a.0 * &b.0;
    }
    fn to_decimal(&self, digits: usize) -> String {
        if self.0.is_zero() {
            return format!("{:.*e}", digits.saturating_sub(1), 0.0);
        }
        let (neg, mantissa, exp) = self.0.to_sign_string_exp(10, Some(digits.max(1)));
        let exp = exp.unwrap_or(0) - 1;
        let mut out = String::with_capacity(digits + 8);
        if neg {
            out.push('-');
        }
        let (head, tail) = mantissa.split_at(1);
        out.push_str(head);
        if !tail.is_empty() {
            out.push('.');
            out.push_str(tail);
        }
        out.push('e');
        out.push_str(&exp.to_string());
        out
    }
    fn zero_like(&self) -> Self {
        BigFloat(Float::new(self.0.prec()))
    }
    fn one_like(&self) -> Self {
        BigFloat(Float::with_val(self.0.prec(), 1))
    }
    fn from_f64_like(&self, x: f64) -> Self {
        BigFloat(Float::with_val(self.0.prec(), x))
    }
}

/// Rejects a context the scalar type cannot honour.
pub fn check_context<T: Real>(ctx: &PrecisionContext) -> Result<()> {
    if T::supports(ctx) {
        Ok(())
    } else {
        Err(Error::PrecisionMismatch { expected: PrecisionContext::DOUBLE_BITS, found: ctx.bits() })
    }
}

/// Rejects scalars carrying a precision other than the context's.
pub fn check_precision<T: Real>(ctx: &PrecisionContext, x: &T) -> Result<()> {
    if x.bits() == ctx.bits() {
        Ok(())
    } else {
        Err(Error::PrecisionMismatch { expected: ctx.bits(), found: x.bits() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_rejects_sub_double() {
        assert!(PrecisionContext::new(52).is_err());
        assert_eq!(PrecisionContext::new(256).unwrap().bits(), 256);
        assert_eq!(PrecisionContext::default().bits(), 256);
    }

    #[test]
    fn big_values_carry_context_precision() {
        let ctx = PrecisionContext::new(200).unwrap();
        let x: BigFloat = ctx.ratio(1, 3);
        assert_eq!(x.bits(), 200);
        let three: BigFloat = ctx.real(3.0);
        let one = x * &three;
        assert!((one.to_f64() - 1.0).abs() < 1e-15);
    }

    #[test]
    #[should_panic(expected = "mixed-precision")]
    fn mixed_precision_panics() {
        let a = BigFloat::with_prec(128, 1.0);
        let b = BigFloat::with_prec(256, 1.0);
        let _ = a + b;
    }

    #[test]
    fn f64_only_supports_double_context() {
        assert!(check_context::<f64>(&PrecisionContext::double()).is_ok());
        assert!(check_context::<f64>(&PrecisionContext::default()).is_err());
        assert!(check_context::<BigFloat>(&PrecisionContext::default()).is_ok());
    }

    #[test]
    fn decimal_rendering_matches_between_backends() {
        let ctx = PrecisionContext::default();
        let x: BigFloat = ctx.real(-0.0125);
        assert_eq!(x.to_decimal(4), "-1.250e-2");
        assert_eq!((-0.0125f64).to_decimal(4), "-1.250e-2");
        let z: BigFloat = ctx.zero();
        assert_eq!(z.to_decimal(3), "0.00e0");
    }

    #[test]
    fn fused_accumulate() {
        let ctx = PrecisionContext::default();
        let mut acc: BigFloat = ctx.real(1.0);
        let a: BigFloat = ctx.real(2.0);
        let b: BigFloat = ctx.real(3.0);
        acc.add_mul(&a, &b);
        acc.sub_mul(&a, &a);
        assert_eq!(acc.to_f64(), 3.0);
    }
}
