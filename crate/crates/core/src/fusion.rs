//! The controlled fusion system on `D` with `Out_F(D) = <alpha>`, where
//! `alpha(x) = x^r` and `alpha(y) = y`.

use std::collections::HashMap;

use crate::arith::{least_primitive_root, unit_order_mod_prime_power};
use crate::error::{Error, Result};
use crate::invariants::check_e;
use crate::metacyclic::{Element, GroupParams, Metacyclic};
use crate::scalar::{exact_div, mod_pow, Exact};
use crate::structure::{
    class_of, conjugacy_classes, derived_subgroup, ClassMode, OracleConfig, Subgroup,
};

/// Inertial index `e` and the exponent `r` of `alpha` on `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FusionData<T> {
    pub e: u64,
    pub r: T,
}

/// Canonical fusion data: `r = g^(phi(p^m)/e) mod p^m` with `g` the least
/// primitive root modulo `p^m`.
pub fn make_fusion<T: Exact>(group: &Metacyclic<T>, e: u64) -> Result<FusionData<T>> {
    let params = group.params();
    check_e(params, e)?;
    let pm = params.p_pow_m();
    let g = least_primitive_root(params.p(), pm);
    let phi = pm.clone() / params.prime().clone() * T::from_u64_exact(params.p() - 1);
    let r = mod_pow(&g, &(phi / T::from_u64_exact(e)), pm);
    with_exponent(group, e, r)
}

/// Fusion data for an explicit exponent `r`, which must have multiplicative
/// order exactly `e` modulo `p^m`.
pub fn with_exponent<T: Exact>(group: &Metacyclic<T>, e: u64, r: T) -> Result<FusionData<T>> {
    let params = group.params();
    check_e(params, e)?;
    let pm = params.p_pow_m();
    let r = r.mod_floor(pm);
    if r.is_multiple_of(params.prime()) {
        return Err(Error::invalid(format!("r = {r} is not a unit modulo {pm}")));
    }
    let order = unit_order_mod_prime_power(&r, params.p(), pm);
    if order != T::from_u64_exact(e) {
        return Err(Error::invalid(format!("r = {r} has order {order} modulo {pm}, expected {e}")));
    }
    let fusion = FusionData { e, r };
    // alpha respects the defining relations: y alpha(x) y^-1 = alpha(x)^(1+p^l).
    let ax = apply_alpha(group, &fusion, &group.x());
    if group.conjugate(&ax, &group.y()) != group.power(&ax, group.twist()) {
        return Err(Error::invariant("alpha does not preserve y x y^-1 = x^(1+p^l)"));
    }
    Ok(fusion)
}

/// `alpha(x^a y^b) = x^(r a) y^b`.
pub fn apply_alpha<T: Exact>(group: &Metacyclic<T>, fusion: &FusionData<T>, g: &Element<T>) -> Element<T> {
    Element::new(g.a.mul_mod(&fusion.r, group.params().p_pow_m()), g.b.clone())
}

/// `alpha^j(g)`.
pub fn alpha_power<T: Exact>(group: &Metacyclic<T>, fusion: &FusionData<T>, g: &Element<T>, j: u64) -> Element<T> {
    let pm = group.params().p_pow_m();
    let rj = mod_pow(&fusion.r, &T::from_u64_exact(j), pm);
    Element::new(g.a.mul_mod(&rj, pm), g.b.clone())
}

/// Exhaustive check that `alpha` is a bijective homomorphism of `D`.
pub fn alpha_is_automorphism<T: Exact>(group: &Metacyclic<T>, fusion: &FusionData<T>, cfg: &OracleConfig) -> Result<bool> {
    let size = cfg.check(group.params())?;
    let elems: Vec<Element<T>> = group.elements().collect();
    let images: Vec<Element<T>> = elems.iter().map(|g| apply_alpha(group, fusion, g)).collect();
    let mut hit = vec![false; size];
    for img in &images {
        hit[group.index(img)] = true;
    }
    if hit.iter().any(|h| !h) {
        return Ok(false);
    }
    for (g, ag) in elems.iter().zip(&images) {
        for (h, ah) in elems.iter().zip(&images) {
            if apply_alpha(group, fusion, &group.multiply(g, h)) != group.multiply(ag, ah) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Order of `alpha` in `Out(D)`: least `j >= 1` with `alpha^j` equal to some
/// conjugation map, found by comparing images of `x` and `y` against every
/// inner automorphism.
pub fn outer_order_oracle<T: Exact>(group: &Metacyclic<T>, fusion: &FusionData<T>, cfg: &OracleConfig) -> Result<u64> {
    cfg.check(group.params())?;
    let (x, y) = (group.x(), group.y());
    let inner: std::collections::HashSet<(Element<T>, Element<T>)> =
        group.elements().map(|h| (group.conjugate(&x, &h), group.conjugate(&y, &h))).collect();
    let mut j = 1u64;
    loop {
        let images = (alpha_power(group, fusion, &x, j), alpha_power(group, fusion, &y, j));
        if inner.contains(&images) {
            return Ok(j);
        }
        j += 1;
        if j > group.params().p() {
            return Err(Error::invariant("alpha has no finite outer order below p"));
        }
    }
}

/// `foc = D'` when `e = 1` and `<x>` otherwise.
pub fn focal_subgroup<T: Exact>(group: &Metacyclic<T>, fusion: &FusionData<T>) -> Subgroup<T> {
    if fusion.e == 1 {
        return derived_subgroup(group);
    }
    let pm = group.params().p_pow_m().clone();
    Subgroup { generators: vec![group.x()], order: pm.clone(), cyclic_decomposition: Some(vec![pm]) }
}

/// Closure of `{f(a) a^-1}` over `a in D` and `f` in `{c_x, c_y, alpha}`.
///
/// `fg(a) a^-1 = f(g(a)) g(a)^-1 . g(a) a^-1`, so generators of `Aut_F(D)`
/// already give the whole focal subgroup; the fusion system is controlled, so
/// `Aut_F(D)` accounts for every morphism.
pub fn focal_subgroup_oracle<T: Exact>(group: &Metacyclic<T>, fusion: &FusionData<T>, cfg: &OracleConfig) -> Result<Subgroup<T>> {
    let size = cfg.check(group.params())?;
    let (x, y) = (group.x(), group.y());
    let mut gens = Vec::new();
    let mut seen = vec![false; size];
    for a in group.elements() {
        let inv = group.inverse(&a);
        for image in [group.conjugate(&a, &x), group.conjugate(&a, &y), apply_alpha(group, fusion, &a)] {
            let z = group.multiply(&image, &inv);
            let i = group.index(&z);
            if !seen[i] {
                seen[i] = true;
                gens.push(z);
            }
        }
    }
    let span = Subgroup { generators: gens, order: T::zero(), cyclic_decomposition: None };
    let members = span.membership(group, cfg)?;
    Ok(Subgroup::from_closed_set(group, &members))
}

/// One `F`-conjugacy class of elements: an `<alpha>`-orbit of `D`-classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FClass<T> {
    pub representative: Element<T>,
    /// Representatives of the `D`-classes in the orbit, in orbit order.
    pub orbit: Vec<Element<T>>,
}

impl<T: Exact> FClass<T> {
    pub fn meets_y(&self) -> bool {
        self.representative.a.is_zero()
    }
}

/// `D`-classes grouped into `<alpha>`-orbits. Classes meeting `<y>` come
/// first in exponent order, then the remaining orbits by least representative.
pub fn f_classes<T: Exact>(
    group: &Metacyclic<T>,
    fusion: &FusionData<T>,
    mode: ClassMode,
    cfg: &OracleConfig,
) -> Result<Vec<FClass<T>>> {
    let classes = conjugacy_classes(group, mode, cfg)?;
    let reps: Vec<Element<T>> = classes.iter().map(|c| c.representative.clone()).collect();
    let class_id: HashMap<Element<T>, usize> = match mode {
        ClassMode::ClosedForm => reps.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect(),
        ClassMode::Oracle => classes
            .iter()
            .enumerate()
            .flat_map(|(i, c)| c.members.as_ref().expect("oracle members").iter().map(move |u| (u.clone(), i)))
            .collect(),
    };
    let image_class = |i: usize| -> usize {
        let img = apply_alpha(group, fusion, &reps[i]);
        let key = match mode {
            ClassMode::ClosedForm => class_of(group, &img).0,
            ClassMode::Oracle => img,
        };
        class_id[&key]
    };
    let mut done = vec![false; reps.len()];
    let mut out = Vec::new();
    for start in 0..reps.len() {
        if done[start] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut i = start;
        while !done[i] {
            done[i] = true;
            orbit.push(reps[i].clone());
            i = image_class(i);
        }
        if i != start {
            return Err(Error::invariant("alpha does not permute conjugacy classes"));
        }
        let representative = orbit.iter().min().expect("non-empty").clone();
        out.push(FClass { representative, orbit });
    }
    out.sort_by(|u, v| match (u.meets_y(), v.meets_y()) {
        (true, true) => u.representative.b.cmp(&v.representative.b),
        (true, false) => std::cmp::Ordering::Less,
        (false, true) => std::cmp::Ordering::Greater,
        (false, false) => u.representative.cmp(&v.representative),
    });
    Ok(out)
}

/// Number of `<alpha>`-orbits of length `e` among `D`-classes missing `<y>`:
/// `p^(n+m-3) (p^2 + p - p^(3-m) - 1) / e`.
pub fn orbit_split_count<T: Exact>(params: &GroupParams<T>, e: u64) -> Result<T> {
    params.require_minimal_nonabelian()?;
    check_e(params, e)?;
    let s = params.m() + params.n();
    // p^(n+m-3) p^(3-m) = p^n
    let numerator = params.pow(s - 1)? + params.pow(s - 2)? - params.pow(s - 3)? - params.p_pow_n().clone();
    exact_div(&numerator, &T::from_u64_exact(e), "orbit split count")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubsectionKind {
    /// `u` a non-trivial power of `y`; `b_u` has `e` Brauer characters.
    YPower,
    /// `u` outside every `F`-conjugate of `<y>`; `b_u` is nilpotent.
    FreeOrbit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerTerm<T> {
    pub kind: SubsectionKind,
    pub representatives: T,
    pub brauer_characters_each: T,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsectionLedger<T> {
    pub k_minus_l: T,
    pub breakdown: Vec<LedgerTerm<T>>,
}

/// `k(B) - l(B)` as the sum of `l(b_u)` over non-trivial `F`-class
/// representatives `u`; cross-checked against
/// `((p^(m-1) + p^(m-2) - p^(m-3) - 1)/e + e) p^n - e`.
pub fn subsection_ledger<T: Exact>(params: &GroupParams<T>, e: u64) -> Result<SubsectionLedger<T>> {
    let free = orbit_split_count(params, e)?;
    let et = T::from_u64_exact(e);
    let pn = params.p_pow_n().clone();
    let breakdown = vec![
        LedgerTerm { kind: SubsectionKind::YPower, representatives: pn.clone() - T::one(), brauer_characters_each: et.clone() },
        LedgerTerm { kind: SubsectionKind::FreeOrbit, representatives: free, brauer_characters_each: T::one() },
    ];
    let k_minus_l = breakdown
        .iter()
        .fold(T::zero(), |acc, t| acc + t.representatives.clone() * t.brauer_characters_each.clone());

    let s = params.m() + params.n();
    let numerator = params.pow(s - 1)? + params.pow(s - 2)? - params.pow(s - 3)? - pn.clone();
    let closed = exact_div(&numerator, &et, "subsection ledger")? + et.clone() * pn - et;
    if closed != k_minus_l {
        return Err(Error::invariant(format!("ledger total {k_minus_l} differs from closed form {closed}")));
    }
    Ok(SubsectionLedger { k_minus_l, breakdown })
}

/// Per-representative ledger from an explicit `F`-class list: `e` for
/// non-trivial powers of `y`, `1` otherwise.
pub fn subsection_representatives<T: Exact>(fusion: &FusionData<T>, classes: &[FClass<T>]) -> Vec<(Element<T>, T)> {
    classes
        .iter()
        .filter(|c| !c.representative.is_identity())
        .map(|c| {
            let l_bu = if c.meets_y() { T::from_u64_exact(fusion.e) } else { T::one() };
            (c.representative.clone(), l_bu)
        })
        .collect()
}
