//! Closed-form block invariants `(k, k0, k1, l)` for blocks with defect group
//! `D` and inertial index `e`, the general bounds they must satisfy, and the
//! consistency checks between them.
//!
//! Every rational-looking expression is evaluated as an integer numerator
//! followed by an exact division, or compared after clearing denominators.

use std::fmt;

use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::metacyclic::GroupParams;
use crate::scalar::{checked_pow, exact_div, overflow, Exact};
use crate::structure::k_of_d;

/// Extra powers of `p` the evaluators need beyond `|D|`.
const HEADROOM: u32 = 6;

/// Primes for which the inertial-index-two case with `m = 2` is settled.
pub const SETTLED_E2_PRIMES: [u64; 6] = [7, 11, 13, 17, 23, 29];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    Proved,
    Extrapolated,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Proved => "proved",
            Provenance::Extrapolated => "extrapolated",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which result the values rest on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    /// `e = 1`: the invariants of `D` itself.
    NilpotentBlock,
    /// `p = 3`, any `m`, `n`.
    PrimeThree,
    /// `p = 5`, `D = C_25 x| C_(5^n)`, any `e`.
    PrimeFiveCyclic25,
    /// `p` in [`SETTLED_E2_PRIMES`], `m = 2`, `e = 2`.
    InertialIndexTwo,
    /// The reduction formulas outside every settled family.
    ReductionFormula,
}

impl Basis {
    pub fn for_params<T: Exact>(params: &GroupParams<T>, e: u64) -> Basis {
        let (p, m) = (params.p(), params.m());
        if e == 1 {
            Basis::NilpotentBlock
        } else if p == 3 {
            Basis::PrimeThree
        } else if p == 5 && m == 2 {
            Basis::PrimeFiveCyclic25
        } else if m == 2 && e == 2 && SETTLED_E2_PRIMES.contains(&p) {
            Basis::InertialIndexTwo
        } else {
            Basis::ReductionFormula
        }
    }

    pub fn provenance(self) -> Provenance {
        match self {
            Basis::ReductionFormula => Provenance::Extrapolated,
            _ => Provenance::Proved,
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Basis::NilpotentBlock => "nilpotent block (invariants of D)",
            Basis::PrimeThree => "p = 3, minimal non-abelian metacyclic defect group",
            Basis::PrimeFiveCyclic25 => "p = 5, defect group C25 x| C5^n",
            Basis::InertialIndexTwo => "m = 2, e = 2 for a settled prime",
            Basis::ReductionFormula => "reduction formulas, unproved for these parameters",
        }
    }
}

/// `(k, k0, k1, l, e)` with the result they come from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantSet<T> {
    pub k: T,
    pub k0: T,
    pub k1: T,
    pub l: T,
    pub e: T,
    pub basis: Basis,
}

impl<T: Exact> InvariantSet<T> {
    pub fn provenance(&self) -> Provenance {
        self.basis.provenance()
    }

    /// `[k0, k1]`; every higher `k_i` vanishes.
    pub fn heights(&self) -> Vec<T> {
        vec![self.k0.clone(), self.k1.clone()]
    }
}

pub(crate) fn check_e<T: Exact>(params: &GroupParams<T>, e: u64) -> Result<T> {
    if e == 0 || (params.p() - 1) % e != 0 {
        return Err(Error::invalid(format!("e = {e} must be a positive divisor of p - 1 = {}", params.p() - 1)));
    }
    Ok(T::from_u64_exact(e))
}

fn prepare<T: Exact>(params: &GroupParams<T>, e: u64) -> Result<T> {
    params.require_minimal_nonabelian()?;
    let et = check_e(params, e)?;
    params.require_headroom(HEADROOM)?;
    Ok(et)
}

/// `k0 = ((p^(m-1) - 1)/e + e) p^n`.
pub fn k0_amc<T: Exact>(params: &GroupParams<T>, e: u64) -> Result<T> {
    let et = prepare(params, e)?;
    let q = exact_div(&(params.pow(params.m() - 1)? - T::one()), &et, "(p^(m-1) - 1)/e")?;
    Ok((q + et) * params.p_pow_n().clone())
}

/// All four reduction formulas:
/// `k0 = ((p^(m-1)-1)/e + e) p^n`, `k1 = (p^(m-1)-p^(m-2))/e p^(n-1)`,
/// `k = ((p^m+p^(m-1)-p^(m-2)-p)/e + e p) p^(n-1)`, `l = e`.
pub fn invariants_reduction<T: Exact>(params: &GroupParams<T>, e: u64) -> Result<InvariantSet<T>> {
    let et = prepare(params, e)?;
    let (m, n) = (params.m(), params.n());
    let pt = params.prime().clone();
    let k0 = k0_amc(params, e)?;
    let k1 = exact_div(&((params.pow(m - 1)? - params.pow(m - 2)?) * params.pow(n - 1)?), &et, "k1")?;
    let k_num = params.pow(m)? + params.pow(m - 1)? - params.pow(m - 2)? - pt.clone();
    let k = (exact_div(&k_num, &et, "k")? + et.clone() * pt) * params.pow(n - 1)?;
    if k0.clone() + k1.clone() != k {
        return Err(Error::invariant(format!("k0 + k1 = {} + {} differs from k = {}", k0, k1, k)));
    }
    Ok(InvariantSet { k, k0, k1, l: et.clone(), e: et, basis: Basis::for_params(params, e) })
}

/// The invariants as stated for each settled family, written in the form
/// each family is stated in. `None` outside those families.
pub fn stated_invariants<T: Exact>(params: &GroupParams<T>, e: u64) -> Option<Result<InvariantSet<T>>> {
    let basis = Basis::for_params(params, e);
    if !params.is_minimal_nonabelian() || basis == Basis::ReductionFormula {
        return None;
    }
    Some((|| {
        let et = prepare(params, e)?;
        let (m, n) = (params.m(), params.n());
        let int = |v: u64| T::from_u64_exact(v);
        let two = int(2);
        let (k0, k1, k, l) = match basis {
            Basis::NilpotentBlock => {
                // k0 = |D:D'|, k = k(D), heights 0 and 1 only.
                let k = k_of_d(params)?;
                let k0 = params.pow(m + n - 1)?;
                (k0.clone(), k.clone() - k0, k, T::one())
            }
            Basis::PrimeThree => {
                let k0 = exact_div(&(params.pow(m - 2)? + T::one()), &two, "k0")? * params.pow(n + 1)?;
                let k1 = params.pow(m + n - 3)?;
                let k = exact_div(&(int(11) * params.pow(m - 2)? + int(9)), &two, "k")? * params.pow(n - 1)?;
                (k0, k1, k, two)
            }
            Basis::PrimeFiveCyclic25 => {
                let four_over_e = exact_div(&int(4), &et, "4/e")?;
                let k0 = (four_over_e.clone() + et.clone()) * params.pow(n)?;
                let k1 = four_over_e * params.pow(n - 1)?;
                let k = (exact_div(&int(24), &et, "24/e")? + int(5) * et.clone()) * params.pow(n - 1)?;
                (k0, k1, k, et.clone())
            }
            Basis::InertialIndexTwo => {
                let p = params.prime().clone();
                let k0 = exact_div(&(p.clone() + int(3)), &two, "k0")? * params.pow(n)?;
                let k1 = exact_div(&(p.clone() - T::one()), &two, "k1")? * params.pow(n - 1)?;
                let k = exact_div(&(p.clone() * p.clone() + int(4) * p - T::one()), &two, "k")? * params.pow(n - 1)?;
                (k0, k1, k, two)
            }
            Basis::ReductionFormula => unreachable!(),
        };
        Ok(InvariantSet { k, k0, k1, l, e: et, basis })
    })())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    LessEq,
    Divides,
    Equal,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::LessEq => "<=",
            Relation::Divides => "|",
            Relation::Equal => "=",
        })
    }
}

/// One evaluated assertion: `lhs relation rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundCheck<T> {
    pub name: &'static str,
    pub pass: bool,
    pub lhs: T,
    pub relation: Relation,
    pub rhs: T,
}

impl<T: Exact> fmt::Display for BoundCheck<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.relation, self.rhs)
    }
}

/// Verdicts for every general bound and divisibility condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundsReport<T> {
    pub checks: Vec<BoundCheck<T>>,
}

impl<T: Exact> BoundsReport<T> {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn passed(&self, name: &str) -> Option<bool> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundCheck<T>> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

fn cmul<T: Exact>(a: &T, b: &T) -> Result<T> {
    a.checked_mul(b).ok_or_else(|| overflow::<T>(format!("{a} * {b}")))
}

fn cadd<T: Exact>(a: &T, b: &T) -> Result<T> {
    a.checked_add(b).ok_or_else(|| overflow::<T>(format!("{a} + {b}")))
}

/// Evaluates the general bounds, valid for every `0 < l < m`:
///
/// * `((p^l + p^(l-1) - p^(2l-m-1) - 1)/e + e) p^n <= k`
/// * `k <= ((p^l - 1)/e + e)(p^(n+m-l-2) + p^n - p^(n-2))`
/// * `2 p^n <= k0 <= ((p^l - 1)/e + e) p^n`
/// * `sum p^(2i) k_i <= ((p^l - 1)/e + e) p^(n+m-l)`
/// * `e <= l`, `e | p - 1`, `p^n | k0`, `p^(n-m+l) | k_i` for `i >= 1`
/// * `k_i = 0` for `i > 2(m-l)`
///
/// Rational bounds are compared after multiplying both sides by `e`
/// (and by `p^2` for the upper bound on `k`); the reported sides are scaled.
/// `heights` defaults to `[k0, k1]`.
pub fn bounds_check<T: Exact>(params: &GroupParams<T>, inv: &InvariantSet<T>, heights: Option<&[T]>) -> Result<BoundsReport<T>> {
    params.require_headroom(HEADROOM)?;
    let (m, n, l) = (params.m(), params.n(), params.l());
    let pw = |k: u32| params.pow(k);
    let e = inv.e.clone();
    let heights: Vec<T> = heights.map(<[T]>::to_vec).unwrap_or_else(|| inv.heights());
    let e2 = e.clone() * e.clone();
    let pl_minus_1_plus_e2 = pw(l)? - T::one() + e2.clone();
    let mut checks = Vec::new();
    let mut le = |name, lhs: T, rhs: T| checks.push(BoundCheck { name, pass: lhs <= rhs, lhs, relation: Relation::LessEq, rhs });

    let k_low = pw(n + l)? + pw(n + l - 1)? - pw(n + 2 * l - m - 1)? - pw(n)? + e2.clone() * pw(n)?;
    le("k_lower", k_low, cmul(&e, &inv.k)?);

    let p2 = pw(2)?;
    let k_high = pl_minus_1_plus_e2.clone() * (pw(n + m - l)? + pw(n + 2)? - pw(n)?);
    le("k_upper", cmul(&cmul(&e, &p2)?, &inv.k)?, k_high);

    le("k0_lower", T::from_u64_exact(2) * pw(n)?, inv.k0.clone());
    le("k0_upper", cmul(&e, &inv.k0)?, pl_minus_1_plus_e2.clone() * pw(n)?);

    let mut weighted = T::zero();
    let mut weight = T::one();
    for k_i in &heights {
        weighted = cadd(&weighted, &cmul(&weight, k_i)?)?;
        weight = cmul(&weight, &p2)?;
    }
    le("weighted_heights", cmul(&e, &weighted)?, pl_minus_1_plus_e2 * pw(n + m - l)?);

    le("l_at_least_e", e.clone(), inv.l.clone());

    let pm1 = params.prime().clone() - T::one();
    let pn = params.p_pow_n().clone();
    let higher_gcd = heights.iter().skip(1).fold(T::zero(), |g, k_i| g.gcd(k_i));
    let divisor = pw(n + l - m)?;
    let beyond: usize = heights.iter().skip(2 * (m - l) as usize + 1).filter(|k_i| !k_i.is_zero()).count();
    let total = heights.iter().fold(T::zero(), |acc, k_i| acc + k_i.clone());
    let mut div = |name, d: T, v: T| {
        let pass = if d.is_zero() { false } else { v.is_multiple_of(&d) };
        checks.push(BoundCheck { name, pass, lhs: d, relation: Relation::Divides, rhs: v })
    };
    div("e_divides_p_minus_1", e.clone(), pm1);
    div("p_n_divides_k0", pn, inv.k0.clone());
    div("higher_heights_divisible", divisor, higher_gcd);
    let beyond = T::from_usize(beyond).expect("small");
    checks.push(BoundCheck { name: "heights_vanish_beyond_2(m-l)", pass: beyond.is_zero(), lhs: beyond, relation: Relation::Equal, rhs: T::zero() });
    checks.push(BoundCheck { name: "heights_sum_to_k", pass: total == inv.k, lhs: total, relation: Relation::Equal, rhs: inv.k.clone() });
    Ok(BoundsReport { checks })
}

/// `k - l = (p^m + p^(m-1) - p^(m-2) - p)/e + e (p - 1)` for `n = 1`.
pub fn k_minus_l_n1<T: Exact>(params: &GroupParams<T>, e: u64) -> Result<T> {
    let et = prepare(params, e)?;
    if params.n() != 1 {
        return Err(Error::invalid(format!("requires n = 1, got n = {}", params.n())));
    }
    let m = params.m();
    let pt = params.prime().clone();
    let num = params.pow(m)? + params.pow(m - 1)? - params.pow(m - 2)? - pt.clone();
    Ok(exact_div(&num, &et, "k - l")? + et * (pt - T::one()))
}

/// `(e, 2e - 1)`, the range of `l`.
pub fn l_bounds<T: Exact>(e: u64) -> Result<(T, T)> {
    if e == 0 {
        return Err(Error::invalid("e must be positive"));
    }
    let et = T::from_u64_exact(e);
    Ok((et.clone(), et.clone() + et - T::one()))
}

/// `k0 = 3^(n+1)` for `p = 3`, `l = 1`, `2 <= m <= n + 1`.
pub fn k0_l1_p3<T: Exact>(m: u32, n: u32) -> Result<T> {
    if !(2 <= m && m <= n + 1) {
        return Err(Error::invalid(format!("requires 2 <= m <= n + 1, got m = {m}, n = {n}")));
    }
    checked_pow(&T::from_u64_exact(3), n + 1)
}

/// Orbits of `p`-conjugate characters for `|D| = p^3`, as
/// `(orbit length, number of orbits)`:
/// `(p-1, (p-1)/e + e)`, `((p-1)/e, 2)`, `(1, e)`.
pub fn galois_orbit_structure<T: Exact>(p: u64, e: u64) -> Result<Vec<(T, T)>> {
    if p % 2 == 0 || !is_prime(p) {
        return Err(Error::invalid("p must be an odd prime"));
    }
    if e == 0 || (p - 1) % e != 0 {
        return Err(Error::invalid(format!("e = {e} must be a positive divisor of p - 1 = {}", p - 1)));
    }
    let int = |v: u64| T::from_u64_exact(v);
    Ok(vec![(int(p - 1), int((p - 1) / e + e)), (int((p - 1) / e), int(2)), (int(1), int(e))])
}

/// `(k <= p k0, k <= k(D))`.
pub fn malle_navarro_check<T: Exact>(params: &GroupParams<T>, e: u64) -> Result<(bool, bool)> {
    let inv = invariants_reduction(params, e)?;
    let kd = k_of_d(params)?;
    Ok((inv.k <= params.prime().clone() * inv.k0, inv.k <= kd))
}
