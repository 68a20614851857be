//! Normal-form arithmetic in the split metacyclic group
//! `D = <x, y | x^(p^m) = y^(p^n) = 1, y x y^-1 = x^(1+p^l)>`.
//!
//! Every element is stored as the unique pair `(a, b)` standing for `x^a y^b`
//! with `0 <= a < p^m` and `0 <= b < p^n`. From the defining relation,
//! `y^b x^c = x^(c (1+p^l)^b) y^b`, which gives the product rule used below.

use std::fmt;


use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::scalar::{checked_pow, mod_pow, overflow, Exact};

/// Tables of `(1+p^l)^b` are kept when `p^n` is at most this many entries.
const TWIST_TABLE_LIMIT: u64 = 1 << 16;

/// The tuple `(p, m, n, l)` defining `D`, validated on construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupParams<T> {
    p: u64,
    m: u32,
    n: u32,
    l: u32,
    p_t: T,
    p_pow_m: T,
    p_pow_n: T,
    order: T,
}

impl<T: Exact> GroupParams<T> {
    /// Validates `p` odd prime, `m >= 2`, `n >= 1`, `0 < l < m`, `m - l <= n`,
    /// and that `|D| = p^(m+n)` fits the scalar type.
    pub fn new(p: u64, m: u32, n: u32, l: u32) -> Result<Self> {
        if p % 2 == 0 || !is_prime(p) {
            return Err(Error::invalid("p must be an odd prime"));
        }
        if m < 2 {
            return Err(Error::invalid("m must be at least 2"));
        }
        if n < 1 {
            return Err(Error::invalid("n must be at least 1"));
        }
        if l == 0 || l >= m {
            return Err(Error::invalid("l must satisfy 0 < l < m"));
        }
        if m - l > n {
            return Err(Error::invalid("m - l must not exceed n"));
        }
        let p_t = T::from_u64_exact(p);
        let order = checked_pow(&p_t, m + n)
            .map_err(|_| overflow::<T>(format!("|D| = {p}^{}", m + n)))?;
        Ok(GroupParams {
            p,
            m,
            n,
            l,
            p_pow_m: checked_pow(&p_t, m)?,
            p_pow_n: checked_pow(&p_t, n)?,
            p_t,
            order,
        })
    }

    /// The metacyclic, minimal non-abelian family `l = m - 1`.
    pub fn minimal_nonabelian(p: u64, m: u32, n: u32) -> Result<Self> {
        if m < 2 {
            return Err(Error::invalid("m must be at least 2"));
        }
        Self::new(p, m, n, m - 1)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn prime(&self) -> &T {
        &self.p_t
    }

    pub fn p_pow_m(&self) -> &T {
        &self.p_pow_m
    }

    pub fn p_pow_n(&self) -> &T {
        &self.p_pow_n
    }

    /// `|D| = p^(m+n)`.
    pub fn order(&self) -> &T {
        &self.order
    }

    pub fn is_minimal_nonabelian(&self) -> bool {
        self.l + 1 == self.m
    }

    /// `p^k`, checked against the scalar range.
    pub fn pow(&self, k: u32) -> Result<T> {
        checked_pow(&self.p_t, k)
    }

    /// Fails unless `p^(m+n+extra)` is representable. Formula evaluators call
    /// this once so their intermediate products need no per-step checks.
    pub fn require_headroom(&self, extra: u32) -> Result<()> {
        checked_pow(&self.p_t, self.m + self.n + extra)
            .map(|_| ())
            .map_err(|_| overflow::<T>(format!("intermediate terms up to {}^{}", self.p, self.m + self.n + extra)))
    }

    /// Fails with `Unsupported` unless `l = m - 1`.
    pub fn require_minimal_nonabelian(&self) -> Result<()> {
        if self.is_minimal_nonabelian() {
            Ok(())
        } else {
            Err(Error::unsupported(format!(
                "requires l = m - 1 (got p={}, m={}, n={}, l={})",
                self.p, self.m, self.n, self.l
            )))
        }
    }
}

impl<T: Exact> fmt::Display for GroupParams<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(p={}, m={}, n={}, l={})", self.p, self.m, self.n, self.l)
    }
}

/// `x^a y^b` in normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element<T> {
    pub a: T,
    pub b: T,
}

impl<T: Exact> Element<T> {
    pub fn new(a: T, b: T) -> Self {
        Element { a, b }
    }

    pub fn identity() -> Self {
        Element { a: T::zero(), b: T::zero() }
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl<T: Exact> fmt::Display for Element<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let part = |sym: &str, v: &T| if v.is_one() { sym.to_string() } else { format!("{sym}^{v}") };
        match (self.a.is_zero(), self.b.is_zero()) {
            (true, true) => f.write_str("1"),
            (false, true) => f.write_str(&part("x", &self.a)),
            (true, false) => f.write_str(&part("y", &self.b)),
            (false, false) => write!(f, "{} {}", part("x", &self.a), part("y", &self.b)),
        }
    }
}

/// The group `D` itself: parameters plus cached twist data.
#[derive(Clone, Debug)]
pub struct Metacyclic<T> {
    params: GroupParams<T>,
    /// `1 + p^l`
    twist: T,
    /// `(1+p^l)^b mod p^m` for every `b < p^n`, each entry by fast exponentiation.
    twist_table: Option<Vec<T>>,
}

impl<T: Exact> Metacyclic<T> {
    pub fn new(params: GroupParams<T>) -> Self {
        let twist = T::one() + checked_pow(params.prime(), params.l()).expect("p^l < p^m fits");
        let twist_table = params
            .p_pow_n()
            .to_u64()
            .filter(|&pn| pn <= TWIST_TABLE_LIMIT)
            .map(|pn| {
                (0..pn)
                    .map(|b| mod_pow(&twist, &T::from_u64_exact(b), params.p_pow_m()))
                    .collect()
            });
        Metacyclic { params, twist, twist_table }
    }

    pub fn from_parts(p: u64, m: u32, n: u32, l: u32) -> Result<Self> {
        GroupParams::new(p, m, n, l).map(Self::new)
    }

    pub fn params(&self) -> &GroupParams<T> {
        &self.params
    }

    /// `1 + p^l`, the exponent by which `y` acts on `x`.
    pub fn twist(&self) -> &T {
        &self.twist
    }

    /// `(1+p^l)^b mod p^m` for `0 <= b < p^n`.
    #[inline]
    pub fn twist_pow(&self, b: &T) -> T {
        match &self.twist_table {
            Some(table) => table[b.to_usize().expect("b < p^n")].clone(),
            None => mod_pow(&self.twist, b, self.params.p_pow_m()),
        }
    }

    pub fn x(&self) -> Element<T> {
        Element::new(T::one() % self.params.p_pow_m().clone(), T::zero())
    }

    pub fn y(&self) -> Element<T> {
        Element::new(T::zero(), T::one() % self.params.p_pow_n().clone())
    }

    pub fn identity(&self) -> Element<T> {
        Element::identity()
    }

    pub fn contains(&self, g: &Element<T>) -> bool {
        !g.a.is_negative()
            && !g.b.is_negative()
            && g.a < *self.params.p_pow_m()
            && g.b < *self.params.p_pow_n()
    }

    /// Builds a validated element from exponents already in range.
    pub fn element(&self, a: T, b: T) -> Result<Element<T>> {
        let g = Element::new(a, b);
        if self.contains(&g) {
            Ok(g)
        } else {
            Err(Error::invalid(format!("{g} is not a normal form in D{}", self.params)))
        }
    }

    /// Reduces arbitrary integer exponents to normal form.
    pub fn reduce(&self, a: T, b: T) -> Element<T> {
        Element::new(a.mod_floor(self.params.p_pow_m()), b.mod_floor(self.params.p_pow_n()))
    }

    /// `g h = x^(g.a + h.a (1+p^l)^(g.b)) y^(g.b + h.b)`.
    #[inline]
    pub fn multiply(&self, g: &Element<T>, h: &Element<T>) -> Element<T> {
        let pm = self.params.p_pow_m();
        let shifted = h.a.mul_mod(&self.twist_pow(&g.b), pm);
        let mut a = g.a.clone() + shifted;
        if a >= *pm {
            a = a - pm.clone();
        }
        let mut b = g.b.clone() + h.b.clone();
        if b >= *self.params.p_pow_n() {
            b = b - self.params.p_pow_n().clone();
        }
        Element { a, b }
    }

    /// [`multiply`](Self::multiply) with membership checks on both operands.
    pub fn try_multiply(&self, g: &Element<T>, h: &Element<T>) -> Result<Element<T>> {
        for e in [g, h] {
            if !self.contains(e) {
                return Err(Error::invalid(format!("{e} is not an element of D{}", self.params)));
            }
        }
        Ok(self.multiply(g, h))
    }

    /// `(x^a y^b)^-1 = x^(-a (1+p^l)^(-b)) y^(-b)`.
    #[inline]
    pub fn inverse(&self, g: &Element<T>) -> Element<T> {
        let pm = self.params.p_pow_m();
        let pn = self.params.p_pow_n();
        let neg_b = if g.b.is_zero() { T::zero() } else { pn.clone() - g.b.clone() };
        // (1+p^l) has order dividing p^n, so its (-b)-th power is its (p^n - b)-th.
        let a = g.a.mul_mod(&self.twist_pow(&neg_b), pm);
        let a = if a.is_zero() { a } else { pm.clone() - a };
        Element { a, b: neg_b }
    }

    /// `g^k` for any integer `k`, by repeated squaring.
    pub fn power(&self, g: &Element<T>, k: &T) -> Element<T> {
        let (mut base, mut e) = if k.is_negative() {
            (self.inverse(g), -k.clone())
        } else {
            (g.clone(), k.clone())
        };
        let two = T::one() + T::one();
        let mut acc = self.identity();
        while !e.is_zero() {
            if e.is_odd() {
                acc = self.multiply(&acc, &base);
            }
            base = self.multiply(&base, &base);
            e = e / two.clone();
        }
        acc
    }

    /// Least `k >= 1` with `g^k = 1`; always a power of `p`.
    pub fn element_order(&self, g: &Element<T>) -> T {
        let p = self.params.prime();
        let mut order = T::one();
        let mut h = g.clone();
        while !h.is_identity() {
            h = self.power(&h, p);
            order = order * p.clone();
        }
        order
    }

    /// `h g h^-1`.
    pub fn conjugate(&self, g: &Element<T>, h: &Element<T>) -> Element<T> {
        self.multiply(&self.multiply(h, g), &self.inverse(h))
    }

    /// `y g y^-1 = (a (1+p^l), b)`.
    pub fn conjugate_by_y(&self, g: &Element<T>) -> Element<T> {
        Element::new(g.a.mul_mod(&self.twist, self.params.p_pow_m()), g.b.clone())
    }

    /// `x g x^-1 = (a + 1 - (1+p^l)^b, b)`.
    pub fn conjugate_by_x(&self, g: &Element<T>) -> Element<T> {
        let a = g.a.clone() + T::one() - self.twist_pow(&g.b);
        Element::new(a.mod_floor(self.params.p_pow_m()), g.b.clone())
    }

    /// `g h g^-1 h^-1`.
    pub fn commutator(&self, g: &Element<T>, h: &Element<T>) -> Element<T> {
        let gh = self.multiply(g, h);
        let hg = self.multiply(h, g);
        self.multiply(&gh, &self.inverse(&hg))
    }

    /// Dense index `a p^n + b`, used by the enumeration oracles.
    #[inline]
    pub fn index(&self, g: &Element<T>) -> usize {
        let pn = self.params.p_pow_n().to_usize().expect("p^n fits usize for enumerated groups");
        g.a.to_usize().expect("enumerated") * pn + g.b.to_usize().expect("enumerated")
    }

    #[inline]
    pub fn from_index(&self, i: usize) -> Element<T> {
        let pn = self.params.p_pow_n().to_usize().expect("p^n fits usize for enumerated groups");
        Element::new(T::from_usize(i / pn).expect("fits"), T::from_usize(i % pn).expect("fits"))
    }

    /// `|D|` as a `usize`, when it fits.
    pub fn order_usize(&self) -> Option<usize> {
        self.params.order().to_usize()
    }

    /// All elements in lexicographic `(a, b)` order. Only sensible for small `D`.
    pub fn elements(&self) -> impl Iterator<Item = Element<T>> + '_ {
        let n = self.order_usize().expect("|D| fits usize");
        (0..n).map(move |i| self.from_index(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn d(p: u64, m: u32, n: u32, l: u32) -> Metacyclic<i64> {
        Metacyclic::from_parts(p, m, n, l).unwrap()
    }

    fn el(a: i64, b: i64) -> Element<i64> {
        Element::new(a, b)
    }

    #[test]
    fn params_validation() {
        assert!(GroupParams::<i64>::new(4, 2, 1, 1).is_err());
        assert!(GroupParams::<i64>::new(2, 2, 1, 1).is_err());
        assert!(GroupParams::<i64>::new(3, 1, 1, 1).is_err());
        assert!(GroupParams::<i64>::new(3, 2, 0, 1).is_err());
        assert!(GroupParams::<i64>::new(3, 3, 1, 0).is_err());
        assert!(GroupParams::<i64>::new(3, 3, 1, 3).is_err());
        // m - l = 2 > n = 1
        assert!(GroupParams::<i64>::new(3, 3, 1, 1).is_err());
        assert!(GroupParams::<i64>::new(3, 3, 2, 1).is_ok());
        let p = GroupParams::<i64>::new(3, 2, 1, 1).unwrap();
        assert!(p.is_minimal_nonabelian());
        assert!(!GroupParams::<i64>::new(3, 3, 2, 1).unwrap().is_minimal_nonabelian());
        assert_eq!(p.to_string(), "(p=3, m=2, n=1, l=1)");
        let shown: Vec<String> = [(0, 0), (1, 0), (0, 2), (3, 1), (4, 2)].iter().map(|&(a, b)| Element::<i64>::new(a, b).to_string()).collect();
        assert_eq!(shown, ["1", "x", "y^2", "x^3 y", "x^4 y^2"]);
    }

    #[test]
    fn params_width_is_checked() {
        // 3^40 > 2^63 - 1 but fits in i128 and BigInt.
        assert!(matches!(GroupParams::<i64>::new(3, 20, 20, 19), Err(Error::Overflow { .. })));
        assert!(GroupParams::<i128>::new(3, 20, 20, 19).is_ok());
        assert!(GroupParams::<BigInt>::new(3, 60, 60, 59).is_ok());
    }

    #[test]
    fn multiply_examples() {
        let g = d(3, 2, 1, 1);
        assert_eq!(g.multiply(&el(0, 0), &el(5, 2)), el(5, 2));
        // y x = x^4 y
        assert_eq!(g.multiply(&el(0, 1), &el(1, 0)), el(4, 1));
        assert_eq!(g.multiply(&el(1, 0), &el(0, 1)), el(1, 1));
    }

    #[test]
    fn multiply_rejects_foreign_elements() {
        let g = d(3, 2, 1, 1);
        assert!(g.try_multiply(&el(9, 0), &el(0, 0)).is_err());
        assert!(g.try_multiply(&el(0, 0), &el(0, 3)).is_err());
        assert!(g.element(-1, 0).is_err());
        assert_eq!(g.try_multiply(&el(0, 1), &el(1, 0)).unwrap(), el(4, 1));
    }

    #[test]
    fn cayley_table_is_associative_for_order_27() {
        let g = d(3, 2, 1, 1);
        let elems: Vec<_> = g.elements().collect();
        assert_eq!(elems.len(), 27);
        let table: Vec<Vec<usize>> = elems
            .iter()
            .map(|u| elems.iter().map(|v| g.index(&g.multiply(u, v))).collect())
            .collect();
        for i in 0..27 {
            for j in 0..27 {
                for k in 0..27 {
                    assert_eq!(table[table[i][j]][k], table[i][table[j][k]]);
                }
            }
        }
    }

    #[test]
    fn power_matches_iterated_multiplication() {
        let g = d(3, 2, 1, 1);
        assert_eq!(g.power(&el(7, 0), &0), el(0, 0));
        assert_eq!(g.power(&el(1, 0), &9), el(0, 0));
        let h = el(1, 1);
        let chain = g.multiply(&g.multiply(&h, &h), &h);
        assert_eq!(g.power(&h, &3), chain);
        // (x y)^2 = x y x y = x x^4 y y = x^5 y^2, then times x y = x^5 x^(1*4^2) y^3 = x^(5+16) = x^3
        assert_eq!(chain, el(3, 0));
        let inv = g.power(&h, &-1);
        assert_eq!(g.multiply(&h, &inv), el(0, 0));
        assert_eq!(g.power(&h, &-4), g.inverse(&g.power(&h, &4)));
    }

    #[test]
    fn element_orders() {
        assert_eq!(d(3, 2, 1, 1).element_order(&el(0, 0)), 1);
        assert_eq!(d(3, 2, 1, 1).element_order(&el(3, 0)), 3);
        assert_eq!(d(5, 2, 1, 1).element_order(&el(0, 1)), 5);
        let g = d(3, 3, 2, 2);
        assert_eq!(g.element_order(&g.x()), 27);
        assert_eq!(g.element_order(&g.y()), 9);
    }

    #[test]
    fn conjugation_closed_forms() {
        let g = d(3, 2, 1, 1);
        let u = el(5, 2);
        assert_eq!(g.conjugate(&u, &g.identity()), u);
        assert_eq!(g.conjugate(&el(1, 0), &el(0, 1)), el(4, 0));
        let x = g.x();
        let y = g.y();
        let chain = g.multiply(&g.multiply(&x, &y), &g.inverse(&x));
        assert_eq!(g.conjugate(&y, &x), chain);
        for u in g.elements() {
            assert_eq!(g.conjugate(&u, &y), g.conjugate_by_y(&u));
            assert_eq!(g.conjugate(&u, &x), g.conjugate_by_x(&u));
        }
    }

    #[test]
    fn twist_has_exact_order() {
        for (p, m, n, l) in [(3u64, 2u32, 1u32, 1u32), (3, 4, 3, 2), (5, 3, 2, 1), (7, 3, 1, 2)] {
            let g = d(p, m, n, l);
            let pm = g.params().p_pow_m();
            let e = (p as i64).pow(m - l);
            assert_eq!(mod_pow(g.twist(), &e, pm), 1);
            assert_ne!(mod_pow(g.twist(), &(e / p as i64), pm), 1);
        }
    }

    #[test]
    fn wide_and_big_scalars_agree() {
        let small = d(5, 3, 2, 1);
        let wide = Metacyclic::<i128>::from_parts(5, 3, 2, 1).unwrap();
        let big = Metacyclic::<BigInt>::from_parts(5, 3, 2, 1).unwrap();
        for (i, j) in [(0usize, 5usize), (17, 300), (3124, 1)] {
            let r = small.multiply(&small.from_index(i), &small.from_index(j));
            let rw = wide.multiply(&wide.from_index(i), &wide.from_index(j));
            let rb = big.multiply(&big.from_index(i), &big.from_index(j));
            assert_eq!((r.a as i128, r.b as i128), (rw.a, rw.b));
            assert_eq!((BigInt::from(rw.a), BigInt::from(rw.b)), (rb.a, rb.b));
        }
    }

    #[test]
    fn large_groups_work_without_twist_table() {
        let g = Metacyclic::<i128>::from_parts(31, 8, 8, 7).unwrap();
        let x = g.x();
        let y = g.y();
        assert_eq!(g.element_order(&x), 31i128.pow(8));
        assert_eq!(g.element_order(&y), 31i128.pow(8));
        let yx = g.multiply(&y, &x);
        assert_eq!(yx, Element::new(1 + 31i128.pow(7), 1));
        let z = g.multiply(&yx, &g.inverse(&yx));
        assert!(z.is_identity());
    }
}
