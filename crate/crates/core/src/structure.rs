//! Structural subgroups, centralizers and conjugacy classes of `D`.
//!
//! Each closed form has a brute-force counterpart (the `*_oracle` functions)
//! that works only from [`Metacyclic::multiply`] and is limited by an
//! [`OracleConfig`] element cap.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::metacyclic::{Element, GroupParams, Metacyclic};
use crate::scalar::{valuation, Exact};

pub const DEFAULT_ORACLE_CAP: u64 = 6561;
pub const ORACLE_CAP_ENV: &str = "METABLOCK_ORACLE_CAP";

/// Largest class list the closed form will materialise.
const CLOSED_FORM_LISTING_CAP: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub cap: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { cap: DEFAULT_ORACLE_CAP }
    }
}

impl OracleConfig {
    pub fn with_cap(cap: u64) -> Self {
        OracleConfig { cap }
    }

    /// Default cap, overridden by `METABLOCK_ORACLE_CAP` when it parses.
    pub fn from_env() -> Result<Self> {
        match std::env::var(ORACLE_CAP_ENV) {
            Ok(raw) => raw
                .trim()
                .parse()
                .map(Self::with_cap)
                .map_err(|_| Error::invalid(format!("{ORACLE_CAP_ENV} must be a non-negative integer, got {raw:?}"))),
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn admits<T: Exact>(&self, params: &GroupParams<T>) -> bool {
        params.order().to_u64().is_some_and(|n| n <= self.cap)
    }

    pub fn check<T: Exact>(&self, params: &GroupParams<T>) -> Result<usize> {
        if self.admits(params) {
            Ok(params.order().to_usize().expect("below cap"))
        } else {
            Err(Error::CapExceeded { size: params.order().to_string(), cap: self.cap })
        }
    }
}

/// A subgroup of `D` by generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup<T> {
    pub generators: Vec<Element<T>>,
    pub order: T,
    /// Orders of cyclic factors; only present for abelian subgroups.
    pub cyclic_decomposition: Option<Vec<T>>,
}

impl<T: Exact> Subgroup<T> {
    /// Membership bitmap over dense indices, by breadth-first closure.
    pub fn membership(&self, group: &Metacyclic<T>, cfg: &OracleConfig) -> Result<Vec<bool>> {
        let size = cfg.check(group.params())?;
        Ok(closure(group, &self.generators, size))
    }

    pub fn elements(&self, group: &Metacyclic<T>, cfg: &OracleConfig) -> Result<Vec<Element<T>>> {
        let bits = self.membership(group, cfg)?;
        Ok(bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| group.from_index(i)).collect())
    }

    /// Same set of elements.
    pub fn same_elements(&self, other: &Subgroup<T>, group: &Metacyclic<T>, cfg: &OracleConfig) -> Result<bool> {
        Ok(self.membership(group, cfg)? == other.membership(group, cfg)?)
    }

    /// Cyclic decomposition with trivial factors dropped, largest first.
    pub fn invariant_factors(&self) -> Option<Vec<T>> {
        self.cyclic_decomposition.as_ref().map(|d| {
            let mut f: Vec<T> = d.iter().filter(|q| !q.is_one()).cloned().collect();
            f.sort_by(|a, b| b.cmp(a));
            f
        })
    }

    /// Builds a subgroup from an element set that is already closed,
    /// picking generators greedily in lexicographic order.
    pub fn from_closed_set(group: &Metacyclic<T>, members: &[bool]) -> Self {
        let generators = greedy_generators(group, members);
        let order = T::from_usize(members.iter().filter(|&&b| b).count()).expect("fits");
        let cyclic_decomposition = abelian_decomposition(group, members);
        Subgroup { generators, order, cyclic_decomposition }
    }
}

fn closure<T: Exact>(group: &Metacyclic<T>, generators: &[Element<T>], size: usize) -> Vec<bool> {
    let mut seen = vec![false; size];
    let id = group.identity();
    seen[group.index(&id)] = true;
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in generators {
            let h = group.multiply(&g, s);
            let i = group.index(&h);
            if !seen[i] {
                seen[i] = true;
                queue.push_back(h);
            }
        }
    }
    seen
}

/// Invariant factors of an abelian subgroup given as a membership bitmap,
/// read off from `N_k = #{g : g^(p^k) = 1}`. `None` if not abelian.
fn abelian_decomposition<T: Exact>(group: &Metacyclic<T>, members: &[bool]) -> Option<Vec<T>> {
    let gens = greedy_generators(group, members);
    for (i, g) in gens.iter().enumerate() {
        for h in &gens[i + 1..] {
            if group.multiply(g, h) != group.multiply(h, g) {
                return None;
            }
        }
    }
    let p = group.params().p() as usize;
    let log_p = |mut v: usize| {
        let mut k = 0usize;
        while v > 1 {
            v /= p;
            k += 1;
        }
        k
    };
    let order_logs: Vec<usize> = members
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| log_p(group.element_order(&group.from_index(i)).to_usize().expect("small")))
        .collect();
    let top = order_logs.iter().copied().max().unwrap_or(0);
    // log_p N_k = sum_i min(k, e_i), so the number of factors with e_i >= k
    // is log_p N_k - log_p N_(k-1).
    let log_n: Vec<usize> = (0..=top).map(|k| log_p(order_logs.iter().filter(|&&o| o <= k).count())).collect();
    let mut at_least: Vec<usize> = (1..=top).map(|k| log_n[k] - log_n[k - 1]).collect();
    at_least.push(0);
    let mut factors = Vec::new();
    for k in (1..=top).rev() {
        for _ in 0..at_least[k - 1] - at_least[k] {
            factors.push(T::from_usize(p.pow(k as u32)).expect("small"));
        }
    }
    Some(factors)
}

fn greedy_generators<T: Exact>(group: &Metacyclic<T>, members: &[bool]) -> Vec<Element<T>> {
    let mut generators = Vec::new();
    let mut span = closure(group, &generators, members.len());
    for (i, _) in members.iter().enumerate().filter(|(_, &b)| b) {
        if !span[i] {
            generators.push(group.from_index(i));
            span = closure(group, &generators, members.len());
        }
    }
    generators
}

fn nontrivial<T: Exact>(mut gens: Vec<Element<T>>) -> Vec<Element<T>> {
    gens.retain(|g| !g.is_identity());
    gens
}

/// `D' = <x^(p^l)>`, cyclic of order `p^(m-l)`.
pub fn derived_subgroup<T: Exact>(group: &Metacyclic<T>) -> Subgroup<T> {
    let params = group.params();
    let order = params.pow(params.m() - params.l()).expect("p^(m-l) < p^m");
    let gen = Element::new(params.pow(params.l()).expect("p^l < p^m"), T::zero());
    Subgroup { generators: vec![gen], order: order.clone(), cyclic_decomposition: Some(vec![order]) }
}

/// Subgroup generated by commutators.
///
/// Uses `{[g, x], [g, y] : g in D}`: the subgroup `N` they generate is normal
/// (`h[g,s]h^-1 = [hg,s][h,s]^-1`) and `x`, `y` are central modulo `N`, so
/// `N = D'`.
pub fn derived_subgroup_oracle<T: Exact>(group: &Metacyclic<T>, cfg: &OracleConfig) -> Result<Subgroup<T>> {
    let size = cfg.check(group.params())?;
    let (x, y) = (group.x(), group.y());
    let mut gens = Vec::new();
    let mut seen = vec![false; size];
    for g in group.elements() {
        for s in [&x, &y] {
            let c = group.commutator(&g, s);
            let i = group.index(&c);
            if !seen[i] {
                seen[i] = true;
                gens.push(c);
            }
        }
    }
    Ok(Subgroup::from_closed_set(group, &closure(group, &gens, size)))
}

/// `Z(D) = <x^(p^(m-l))> x <y^(p^(m-l))>`, of type `(p^l, p^(n-m+l))`.
pub fn center<T: Exact>(group: &Metacyclic<T>) -> Subgroup<T> {
    let params = group.params();
    let (m, n, l) = (params.m(), params.n(), params.l());
    let shift = params.pow(m - l).expect("fits");
    let x_part = params.pow(l).expect("fits");
    let y_part = params.pow(n - (m - l)).expect("fits");
    let b = shift.clone() % params.p_pow_n().clone();
    Subgroup {
        generators: nontrivial(vec![Element::new(shift, T::zero()), Element::new(T::zero(), b)]),
        order: x_part.clone() * y_part.clone(),
        cyclic_decomposition: Some(vec![x_part, y_part]),
    }
}

/// Elements commuting with both generators.
pub fn center_oracle<T: Exact>(group: &Metacyclic<T>, cfg: &OracleConfig) -> Result<Subgroup<T>> {
    let size = cfg.check(group.params())?;
    let (x, y) = (group.x(), group.y());
    let mut members = vec![false; size];
    for g in group.elements() {
        if group.multiply(&g, &x) == group.multiply(&x, &g) && group.multiply(&g, &y) == group.multiply(&y, &g) {
            members[group.index(&g)] = true;
        }
    }
    Ok(Subgroup::from_closed_set(group, &members))
}

/// `C_D(u) = {g : g u = u g}` by scanning `D`.
pub fn centralizer<T: Exact>(group: &Metacyclic<T>, u: &Element<T>, cfg: &OracleConfig) -> Result<Subgroup<T>> {
    let size = cfg.check(group.params())?;
    if !group.contains(u) {
        return Err(Error::invalid(format!("{u} is not an element of D{}", group.params())));
    }
    let mut members = vec![false; size];
    for g in group.elements() {
        if group.multiply(&g, u) == group.multiply(u, &g) {
            members[group.index(&g)] = true;
        }
    }
    Ok(Subgroup::from_closed_set(group, &members))
}

/// `C_D(x) = <x, y^(p^(m-l))>`, of order `p^(n+l)`.
pub fn centralizer_of_x<T: Exact>(group: &Metacyclic<T>) -> Subgroup<T> {
    let params = group.params();
    let (m, n, l) = (params.m(), params.n(), params.l());
    let yb = params.pow(m - l).expect("fits") % params.p_pow_n().clone();
    Subgroup {
        generators: nontrivial(vec![group.x(), Element::new(T::zero(), yb)]),
        order: params.pow(n + l).expect("fits"),
        cyclic_decomposition: Some(vec![params.p_pow_m().clone(), params.pow(n - (m - l)).expect("fits")]),
    }
}

/// `C_D(y) = <x^(p^(m-l)), y>`, of order `p^(n+l)`; `<x^p, y>` when `l = m-1`.
pub fn centralizer_of_y<T: Exact>(group: &Metacyclic<T>) -> Subgroup<T> {
    let params = group.params();
    let (m, n, l) = (params.m(), params.n(), params.l());
    Subgroup {
        generators: vec![Element::new(params.pow(m - l).expect("fits"), T::zero()), group.y()],
        order: params.pow(n + l).expect("fits"),
        // <y> meets <x^(p^(m-l))> trivially and they commute.
        cyclic_decomposition: Some(vec![params.p_pow_n().clone(), params.pow(l).expect("fits")]),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjClass<T> {
    /// Lexicographically least `(a, b)` in the class.
    pub representative: Element<T>,
    pub size: T,
    /// Present in oracle mode only.
    pub members: Option<Vec<Element<T>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassMode {
    ClosedForm,
    Oracle,
}

/// Closed-form class of `x^a y^b`: all `x^a' y^b` with `a' = a mod p^w`,
/// where `w = min(m, l + min(v_p(a), v_p(b)))`. Returns the representative and
/// `p^w`. Valid for every `l`.
pub fn class_of<T: Exact>(group: &Metacyclic<T>, g: &Element<T>) -> (Element<T>, T) {
    let params = group.params();
    let p = params.prime();
    let v = match (valuation(&g.a, p), valuation(&g.b, p)) {
        (None, None) => params.m(),
        (Some(x), None) | (None, Some(x)) => x,
        (Some(x), Some(y)) => x.min(y),
    };
    let w = params.m().min(params.l().saturating_add(v));
    let modulus = params.pow(w).expect("w <= m");
    (Element::new(g.a.mod_floor(&modulus), g.b.clone()), modulus)
}

/// Partition of `D` into conjugacy classes, ordered by representative.
///
/// `ClosedForm` needs `l = m - 1`; `Oracle` needs `|D|` within the cap and
/// works by orbit closure under conjugation by `x` and `y`.
pub fn conjugacy_classes<T: Exact>(
    group: &Metacyclic<T>,
    mode: ClassMode,
    cfg: &OracleConfig,
) -> Result<Vec<ConjClass<T>>> {
    match mode {
        ClassMode::ClosedForm => closed_form_classes(group),
        ClassMode::Oracle => oracle_classes(group, cfg),
    }
}

fn closed_form_classes<T: Exact>(group: &Metacyclic<T>) -> Result<Vec<ConjClass<T>>> {
    let params = group.params();
    params.require_minimal_nonabelian()?;
    let count = k_of_d(params)?;
    if count.to_u64().is_none_or(|c| c > CLOSED_FORM_LISTING_CAP) {
        return Err(Error::CapExceeded { size: params.order().to_string(), cap: CLOSED_FORM_LISTING_CAP });
    }
    let p = params.prime();
    let low = params.pow(params.m() - 1)?;
    let pn = params.p_pow_n().to_u64().expect("bounded by listing cap");
    let pm = params.p_pow_m().to_u64().expect("bounded by listing cap");
    let mut out = Vec::with_capacity(count.to_usize().expect("bounded"));
    // Central elements are singletons; every other class is a coset of
    // D' = <x^(p^(m-1))> and is represented by its member with a < p^(m-1).
    for a in 0..pm {
        let at = T::from_u64_exact(a);
        let a_div = at.is_multiple_of(p);
        for b in 0..pn {
            let bt = T::from_u64_exact(b);
            let central = a_div && bt.is_multiple_of(p);
            if central {
                out.push(ConjClass { representative: Element::new(at.clone(), bt), size: T::one(), members: None });
            } else if at < low {
                out.push(ConjClass { representative: Element::new(at.clone(), bt), size: p.clone(), members: None });
            }
        }
    }
    debug_assert_eq!(T::from_usize(out.len()), Some(count));
    Ok(out)
}

fn oracle_classes<T: Exact>(group: &Metacyclic<T>, cfg: &OracleConfig) -> Result<Vec<ConjClass<T>>> {
    let size = cfg.check(group.params())?;
    let (x, y) = (group.x(), group.y());
    let mut assigned = vec![false; size];
    let mut out = Vec::new();
    // Indices run in lexicographic (a, b) order, so the first unassigned
    // element of each class is its least member.
    for start in 0..size {
        if assigned[start] {
            continue;
        }
        let rep = group.from_index(start);
        assigned[start] = true;
        let mut members = vec![rep.clone()];
        let mut queue = VecDeque::from([rep.clone()]);
        while let Some(g) = queue.pop_front() {
            for s in [&x, &y] {
                let h = group.conjugate(&g, s);
                let i = group.index(&h);
                if !assigned[i] {
                    assigned[i] = true;
                    members.push(h.clone());
                    queue.push_back(h);
                }
            }
        }
        members.sort();
        out.push(ConjClass {
            representative: rep,
            size: T::from_usize(members.len()).expect("fits"),
            members: Some(members),
        });
    }
    Ok(out)
}

/// `k(D) = p^(n+m-1) + p^(n+m-2) - p^(n+m-3)` for `l = m - 1`.
pub fn k_of_d<T: Exact>(params: &GroupParams<T>) -> Result<T> {
    params.require_minimal_nonabelian()?;
    let s = params.m() + params.n();
    Ok(params.pow(s - 1)? + params.pow(s - 2)? - params.pow(s - 3)?)
}

/// Number of conjugacy classes for any `l`:
/// `|Z(D)| + sum_(j < m-l) (p^2 - 1) p^(n+l-j-2)`, grouping elements by
/// `min(v_p(a), v_p(b)) = j`, whose classes have `p^(m-l-j)` elements.
pub fn class_count<T: Exact>(params: &GroupParams<T>) -> Result<T> {
    let (m, n, l) = (params.m(), params.n(), params.l());
    let p = params.prime().clone();
    let mut total = params.pow(l)? * params.pow(n + l - m)?;
    for j in 0..m - l {
        total = total + (p.clone() * p.clone() - T::one()) * params.pow(n + l - j - 2)?;
    }
    Ok(total)
}

/// Degrees of `Irr(D)` with multiplicities: `p^(n+m-1)` linear characters
/// and `p^(n+m-2) - p^(n+m-3)` of degree `p`.
pub fn irr_degree_multiset<T: Exact>(params: &GroupParams<T>) -> Result<Vec<(T, T)>> {
    params.require_minimal_nonabelian()?;
    let s = params.m() + params.n();
    Ok(vec![
        (T::one(), params.pow(s - 1)?),
        (params.prime().clone(), params.pow(s - 2)? - params.pow(s - 3)?),
    ])
}
