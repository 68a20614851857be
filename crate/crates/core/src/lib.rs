//! Exact arithmetic and verification tools for split metacyclic `p`-groups
//! `D = <x, y | x^(p^m) = y^(p^n) = 1, y x y^-1 = x^(1+p^l)>` and for the
//! numerical invariants of blocks with such a defect group.
//!
//! Everything is generic over an [`Exact`] integer type; the aliases below
//! fix the common choices.

pub mod arith;
pub mod error;
pub mod fusion;
pub mod invariants;
pub mod metacyclic;
pub mod proof;
pub mod scalar;
pub mod structure;
pub mod verify;

pub use error::{Error, Result};
pub use invariants::{Basis, InvariantSet, Provenance};
pub use metacyclic::{Element, GroupParams, Metacyclic};
pub use scalar::Exact;

pub use num_bigint::BigInt;

/// Groups with `p^(m+n)` below `2^63`.
pub type Group64 = Metacyclic<i64>;
/// Groups with `p^(m+n)` below `2^127`.
pub type Group128 = Metacyclic<i128>;
/// Groups of any size.
pub type GroupBig = Metacyclic<BigInt>;

pub type Params64 = GroupParams<i64>;
pub type Params128 = GroupParams<i128>;
pub type ParamsBig = GroupParams<BigInt>;

pub type Element64 = Element<i64>;
pub type Element128 = Element<i128>;
pub type ElementBig = Element<BigInt>;
