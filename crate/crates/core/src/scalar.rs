//! Exact integer scalars.
//!
//! Every count in this crate is an exact integer. The [`Exact`] trait abstracts
//! over the backing type so the same code runs on machine words for speed and
//! on [`BigInt`] when parameters outgrow 128 bits.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, Signed, ToPrimitive};

use crate::error::{Error, Result};

pub trait Exact:
    Integer
    + Signed
    + Clone
    + Hash
    + Debug
    + Display
    + FromPrimitive
    + ToPrimitive
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + Send
    + Sync
    + 'static
{
    /// Short name used in diagnostics.
    const NAME: &'static str;

    /// Largest representable value, `None` for arbitrary precision.
    fn limit() -> Option<Self>;

    /// `self * rhs mod modulus` for operands already reduced into `[0, modulus)`.
    fn mul_mod(&self, rhs: &Self, modulus: &Self) -> Self;

    fn from_u64_exact(v: u64) -> Self {
        Self::from_u64(v).expect("every supported scalar holds a u64")
    }
}

impl Exact for i64 {
    const NAME: &'static str = "i64";

    fn limit() -> Option<Self> {
        Some(i64::MAX)
    }

    #[inline]
    fn mul_mod(&self, rhs: &Self, modulus: &Self) -> Self {
        ((*self as i128 * *rhs as i128) % *modulus as i128) as i64
    }
}

impl Exact for i128 {
    const NAME: &'static str = "i128";

    fn limit() -> Option<Self> {
        Some(i128::MAX)
    }

    #[inline]
    fn mul_mod(&self, rhs: &Self, modulus: &Self) -> Self {
        if let Some(prod) = i128::checked_mul(*self, *rhs) {
            return prod % *modulus;
        }
        // Operands are in [0, modulus) with modulus < 2^127, so doubling never
        // leaves u128.
        let m = *modulus as u128;
        let (mut acc, mut base, mut exp) = (0u128, *self as u128, *rhs as u128);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = (acc + base) % m;
            }
            base = (base << 1) % m;
            exp >>= 1;
        }
        acc as i128
    }
}

impl Exact for BigInt {
    const NAME: &'static str = "bigint";

    fn limit() -> Option<Self> {
        None
    }

    fn mul_mod(&self, rhs: &Self, modulus: &Self) -> Self {
        (self * rhs) % modulus
    }
}

pub(crate) fn overflow<T: Exact>(what: impl Into<String>) -> Error {
    Error::Overflow { scalar: T::NAME, what: what.into() }
}

/// `base^exp`, failing instead of wrapping.
pub fn checked_pow<T: Exact>(base: &T, exp: u32) -> Result<T> {
    let mut acc = T::one();
    for _ in 0..exp {
        acc = acc
            .checked_mul(base)
            .ok_or_else(|| overflow::<T>(format!("{base}^{exp}")))?;
    }
    Ok(acc)
}

/// Modular exponentiation by repeated squaring; `exp` must be non-negative.
pub fn mod_pow<T: Exact>(base: &T, exp: &T, modulus: &T) -> T {
    debug_assert!(!exp.is_negative());
    if modulus.is_one() {
        return T::zero();
    }
    let two = T::one() + T::one();
    let mut result = T::one();
    let mut b = base.mod_floor(modulus);
    let mut e = exp.clone();
    while !e.is_zero() {
        if e.is_odd() {
            result = result.mul_mod(&b, modulus);
        }
        b = b.mul_mod(&b, modulus);
        e = e / two.clone();
    }
    result
}

/// p-adic valuation of a non-zero integer; `None` for zero.
pub fn valuation<T: Exact>(value: &T, p: &T) -> Option<u32> {
    if value.is_zero() {
        return None;
    }
    let mut v = value.abs();
    let mut k = 0;
    while v.is_multiple_of(p) {
        v = v / p.clone();
        k += 1;
    }
    Some(k)
}

/// Exact quotient, or an invariant error naming the failed division.
pub(crate) fn exact_div<T: Exact>(num: &T, den: &T, what: &str) -> Result<T> {
    let (q, r) = num.div_rem(den);
    if r.is_zero() {
        Ok(q)
    } else {
        Err(Error::invariant(format!("{what}: {num} is not divisible by {den}")))
    }
}
