//! Parameter sweeps running every property check of the library over a grid
//! of `(p, m, n, l)` and inertial indices `e`.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arith::{divisors, odd_primes};
use crate::error::{Error, Result};
use crate::fusion::{
    alpha_is_automorphism, f_classes, focal_subgroup, focal_subgroup_oracle, make_fusion, orbit_split_count, outer_order_oracle,
    subsection_ledger, subsection_representatives,
};
use crate::invariants::{
    bounds_check, check_e, galois_orbit_structure, invariants_reduction, k0_l1_p3, k_minus_l_n1, l_bounds, malle_navarro_check, stated_invariants,
    InvariantSet,
};
use crate::metacyclic::{Element, GroupParams, Metacyclic};
use crate::proof::{replay_amc, replay_k2};
use crate::scalar::mod_pow;
use crate::structure::{
    center, center_oracle, centralizer, centralizer_of_x, centralizer_of_y, class_of, conjugacy_classes, derived_subgroup,
    derived_subgroup_oracle, irr_degree_multiset, k_of_d, ClassMode, OracleConfig, Subgroup,
};

/// Scalar used by sweeps; wide enough for `p <= 31`, `m, n <= 8`.
pub type Wide = i128;

/// Signature of the invariant formulas under test.
pub type InvariantFn = dyn Fn(&GroupParams<Wide>, u64) -> Result<InvariantSet<Wide>> + Send + Sync;

/// Groups up to this order get an exhaustive associativity check.
pub const EXHAUSTIVE_ASSOCIATIVITY_MAX: usize = 729;
/// Groups up to this order get exhaustive inverse and element-order checks.
pub const EXHAUSTIVE_ELEMENT_MAX: u64 = 10_000;
const SAMPLED_TRIPLES_SMALL: usize = 100_000;
const SAMPLED_TRIPLES_LARGE: usize = 1_000;
const SAMPLED_ELEMENTS_LARGE: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepGrid {
    pub primes: Vec<u64>,
    pub m_max: u32,
    pub n_max: u32,
}

impl Default for SweepGrid {
    fn default() -> Self {
        SweepGrid { primes: vec![3, 5, 7, 11, 13], m_max: 6, n_max: 6 }
    }
}

impl SweepGrid {
    /// All odd primes up to `p_max`.
    pub fn bounded(p_max: u64, m_max: u32, n_max: u32) -> Result<Self> {
        let grid = SweepGrid { primes: odd_primes(3, p_max), m_max, n_max };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.primes.is_empty() {
            return Err(Error::invalid("the sweep needs at least one odd prime"));
        }
        if self.m_max < 2 || self.n_max < 1 {
            return Err(Error::invalid("the sweep needs m_max >= 2 and n_max >= 1"));
        }
        Ok(())
    }

    /// Valid `(p, m, n, l)` in ascending order.
    pub fn points(&self) -> Result<Vec<GroupParams<Wide>>> {
        self.validate()?;
        let mut primes = self.primes.clone();
        primes.sort_unstable();
        primes.dedup();
        let mut out = Vec::new();
        for &p in &primes {
            for m in 2..=self.m_max {
                for n in 1..=self.n_max {
                    for l in m.saturating_sub(n).max(1)..m {
                        out.push(GroupParams::new(p, m, n, l)?);
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone)]
pub struct SweepConfig {
    pub grid: SweepGrid,
    /// `None` skips every brute-force check.
    pub oracle: Option<OracleConfig>,
    pub jobs: usize,
    pub evaluator: Arc<InvariantFn>,
}

impl SweepConfig {
    pub fn new(grid: SweepGrid) -> Self {
        SweepConfig { grid, oracle: Some(OracleConfig::default()), jobs: 1, evaluator: default_evaluator() }
    }
}

pub fn default_evaluator() -> Arc<InvariantFn> {
    Arc::new(invariants_reduction::<Wide>)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Results at one group (`e = None`) or one `(group, e)` pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointReport {
    pub p: u64,
    pub m: u32,
    pub n: u32,
    pub l: u32,
    pub e: Option<u64>,
    pub invariants: Option<InvariantSet<Wide>>,
    pub checks: Vec<CheckOutcome>,
}

impl PointReport {
    fn new(params: &GroupParams<Wide>, e: Option<u64>) -> Self {
        PointReport { p: params.p(), m: params.m(), n: params.n(), l: params.l(), e, invariants: None, checks: Vec::new() }
    }

    fn check(&mut self, name: &'static str, pass: bool, detail: impl Into<String>) {
        self.checks.push(CheckOutcome { name, pass, detail: detail.into() });
    }

    fn check_eq<V: PartialEq + std::fmt::Debug>(&mut self, name: &'static str, got: V, want: V) {
        let pass = got == want;
        let detail = if pass { format!("{got:?}") } else { format!("got {got:?}, expected {want:?}") };
        self.check(name, pass, detail);
    }

    fn check_result<V>(&mut self, name: &'static str, result: Result<V>, judge: impl FnOnce(V) -> (bool, String)) {
        match result {
            Ok(v) => {
                let (pass, detail) = judge(v);
                self.check(name, pass, detail);
            }
            Err(err) => self.check(name, false, format!("error: {err}")),
        }
    }

    pub fn key(&self) -> (u64, u32, u32, u32, u64) {
        (self.p, self.m, self.n, self.l, self.e.unwrap_or(0))
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn label(&self) -> String {
        match self.e {
            Some(e) => format!("(p={}, m={}, n={}, l={}, e={})", self.p, self.m, self.n, self.l, e),
            None => format!("(p={}, m={}, n={}, l={})", self.p, self.m, self.n, self.l),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckTally {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepReport {
    /// Sorted by `(p, m, n, l, e)`, group-level entries first.
    pub points: Vec<PointReport>,
}

impl SweepReport {
    pub fn tally(&self) -> BTreeMap<&'static str, CheckTally> {
        let mut out: BTreeMap<&'static str, CheckTally> = BTreeMap::new();
        for c in self.points.iter().flat_map(|p| &p.checks) {
            let t = out.entry(c.name).or_default();
            if c.pass {
                t.passed += 1;
            } else {
                t.failed += 1;
            }
        }
        out
    }

    pub fn total_checks(&self) -> usize {
        self.points.iter().map(|p| p.checks.len()).sum()
    }

    pub fn all_pass(&self) -> bool {
        self.points.iter().all(PointReport::passed)
    }

    pub fn first_failure(&self) -> Option<(&PointReport, &CheckOutcome)> {
        self.points.iter().find_map(|p| p.checks.iter().find(|c| !c.pass).map(|c| (p, c)))
    }
}

/// Runs the sweep on a pool of `cfg.jobs` workers; the result does not
/// depend on the number of workers.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    let groups = cfg.grid.points()?;
    for params in &groups {
        params.require_headroom(6)?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    let mut points: Vec<PointReport> =
        pool.install(|| groups.par_iter().flat_map_iter(|params| check_group(params, None, cfg)).collect());
    points.sort_by_key(PointReport::key);
    Ok(SweepReport { points })
}

/// Every check at one group, for one inertial index or for all of them.
/// Block-level checks need `l = m - 1`.
pub fn check_point(params: &GroupParams<Wide>, e: Option<u64>, cfg: &SweepConfig) -> Result<Vec<PointReport>> {
    params.require_headroom(6)?;
    if let Some(e) = e {
        params.require_minimal_nonabelian()?;
        check_e(params, e)?;
    }
    Ok(check_group(params, e, cfg))
}

fn check_group(params: &GroupParams<Wide>, only_e: Option<u64>, cfg: &SweepConfig) -> Vec<PointReport> {
    let group = Metacyclic::new(params.clone());
    let oracle = cfg.oracle.as_ref().filter(|o| o.admits(params));
    let mut out = vec![group_report(&group, oracle)];
    if params.is_minimal_nonabelian() {
        for e in divisors(params.p() - 1).into_iter().filter(|e| only_e.is_none_or(|o| o == *e)) {
            out.push(block_report(&group, e, cfg.evaluator.as_ref(), oracle));
        }
    }
    out
}

fn group_report(group: &Metacyclic<Wide>, oracle: Option<&OracleConfig>) -> PointReport {
    let params = group.params();
    let mut rep = PointReport::new(params, None);
    let (m, n, l) = (params.m(), params.n(), params.l());
    let pm = params.p_pow_m();

    let exact_order = params.pow(m - l).expect("within order");
    let below = params.pow(m - l - 1).expect("within order");
    let s = group.twist();
    rep.check(
        "twist_order",
        mod_pow(s, &exact_order, pm) == 1 && mod_pow(s, &below, pm) != 1,
        format!("(1+p^l) has order p^{} mod p^m", m - l),
    );
    rep.check_eq("generator_orders", (group.element_order(&group.x()), group.element_order(&group.y())), (*pm, *params.p_pow_n()));

    check_associativity(group, &mut rep);
    check_elementwise(group, &mut rep);

    let dprime = derived_subgroup(group);
    let z = center(group);
    rep.check_eq("center_order", z.order, params.pow(l).unwrap() * params.pow(n + l - m).unwrap());
    if params.is_minimal_nonabelian() {
        let formula = params.pow(n + m - 3).unwrap() * (params.p() as Wide * params.p() as Wide + params.p() as Wide - 1);
        let kd = k_of_d(params);
        rep.check_result("class_count_formula", kd, |kd| {
            let via_center = z.order + (params.order() - z.order) / params.p() as Wide;
            (kd == formula && kd == via_center, format!("k(D) = {kd}"))
        });
        rep.check_result("irr_degrees", irr_degree_multiset(params), |degrees| {
            let squares: Wide = degrees.iter().map(|(d, k)| d * d * k).sum();
            let count: Wide = degrees.iter().map(|(_, k)| k).sum();
            (squares == *params.order() && count == formula, format!("sum of squares {squares}, {count} characters"))
        });
    }

    if let Some(cfg) = oracle {
        compare_subgroup(&mut rep, "derived_subgroup", group, &dprime, derived_subgroup_oracle(group, cfg), cfg);
        rep.check_eq("derived_index", dprime.order * (params.order() / dprime.order), *params.order());
        compare_subgroup(&mut rep, "center", group, &z, center_oracle(group, cfg), cfg);
        compare_subgroup(&mut rep, "centralizer_x", group, &centralizer_of_x(group), centralizer(group, &group.x(), cfg), cfg);
        compare_subgroup(&mut rep, "centralizer_y", group, &centralizer_of_y(group), centralizer(group, &group.y(), cfg), cfg);
        check_classes(group, &z, cfg, &mut rep);
    }
    rep
}

fn compare_subgroup(
    rep: &mut PointReport,
    name: &'static str,
    group: &Metacyclic<Wide>,
    closed: &Subgroup<Wide>,
    oracle: Result<Subgroup<Wide>>,
    cfg: &OracleConfig,
) {
    rep.check_result(name, oracle, |o| {
        let same = closed.same_elements(&o, group, cfg).unwrap_or(false);
        let factors = closed.invariant_factors() == o.invariant_factors();
        (same && factors, format!("order {}, closed form = oracle: {}", o.order, same && factors))
    });
}

fn check_associativity(group: &Metacyclic<Wide>, rep: &mut PointReport) {
    let params = group.params();
    match group.order_usize().filter(|&s| s <= EXHAUSTIVE_ASSOCIATIVITY_MAX) {
        Some(size) => {
            let elems: Vec<Element<Wide>> = group.elements().collect();
            let table: Vec<u32> =
                elems.iter().flat_map(|g| elems.iter().map(|h| group.index(&group.multiply(g, h)) as u32)).collect();
            let at = |i: usize, j: usize| table[i * size + j] as usize;
            let ok = (0..size).all(|i| (0..size).all(|j| (0..size).all(|k| at(at(i, j), k) == at(i, at(j, k)))));
            rep.check("associativity", ok, format!("exhaustive over {} triples", size * size * size));
        }
        None => {
            let samples = if *params.order() <= EXHAUSTIVE_ELEMENT_MAX as Wide { SAMPLED_TRIPLES_SMALL } else { SAMPLED_TRIPLES_LARGE };
            let mut rng = ChaCha8Rng::seed_from_u64(point_seed(params));
            let mut draw = || {
                let a = rng.gen_range(0..*params.p_pow_m());
                let b = rng.gen_range(0..*params.p_pow_n());
                Element::new(a, b)
            };
            let ok = (0..samples).all(|_| {
                let (g, h, k) = (draw(), draw(), draw());
                group.multiply(&group.multiply(&g, &h), &k) == group.multiply(&g, &group.multiply(&h, &k))
            });
            rep.check("associativity", ok, format!("{samples} seeded random triples"));
        }
    }
}

fn point_seed(params: &GroupParams<Wide>) -> u64 {
    params.p() << 24 | (params.m() as u64) << 16 | (params.n() as u64) << 8 | params.l() as u64
}

/// Inverses, element orders and the conjugation closed forms, over every
/// element of small groups and a seeded sample otherwise.
fn check_elementwise(group: &Metacyclic<Wide>, rep: &mut PointReport) {
    let params = group.params();
    let sample: Vec<Element<Wide>> = if *params.order() <= EXHAUSTIVE_ELEMENT_MAX as Wide {
        group.elements().collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(point_seed(params) ^ 0x5eed);
        (0..SAMPLED_ELEMENTS_LARGE).map(|_| Element::new(rng.gen_range(0..*params.p_pow_m()), rng.gen_range(0..*params.p_pow_n()))).collect()
    };
    let scope = format!("{} elements", sample.len());
    let id = group.identity();
    let p = *params.prime();
    let max_order = params.pow(params.m().max(params.n())).unwrap();
    let (x, y) = (group.x(), group.y());
    let s = group.twist();
    let pm = params.p_pow_m();

    let inverse_ok = sample.iter().all(|g| group.multiply(g, &group.inverse(g)) == id && group.multiply(&group.inverse(g), g) == id);
    rep.check("inverse", inverse_ok, scope.clone());

    let orders_ok = sample.iter().all(|g| {
        let k = group.element_order(g);
        let mut q = k;
        while q % p == 0 {
            q /= p;
        }
        q == 1 && max_order % k == 0 && group.power(g, &k) == id && (k == 1 || group.power(g, &(k / p)) != id)
    });
    rep.check("element_orders", orders_ok, scope.clone());

    let conj_ok = sample.iter().all(|g| {
        let by_y = Element::new(g.a * s % pm, g.b);
        let by_x = Element::new((g.a + 1 - group.twist_pow(&g.b)).rem_euclid(*pm), g.b);
        let chain_y = group.multiply(&group.multiply(&y, g), &group.inverse(&y));
        let chain_x = group.multiply(&group.multiply(&x, g), &group.inverse(&x));
        by_y == chain_y && by_x == chain_x && group.conjugate_by_y(g) == by_y && group.conjugate_by_x(g) == by_x
    });
    rep.check("conjugation_closed_forms", conj_ok, scope);
}

fn check_classes(group: &Metacyclic<Wide>, z: &Subgroup<Wide>, cfg: &OracleConfig, rep: &mut PointReport) {
    let params = group.params();
    let oracle = match conjugacy_classes(group, ClassMode::Oracle, cfg) {
        Ok(c) => c,
        Err(err) => return rep.check("class_partition", false, format!("error: {err}")),
    };
    let total: Wide = oracle.iter().map(|c| c.size).sum();
    let singletons = oracle.iter().filter(|c| c.size == 1).count() as Wide;
    rep.check("class_equation", total == *params.order() && singletons == z.order, format!("{} classes, {singletons} central", oracle.len()));

    let mut reps = HashSet::new();
    let mut consistent = true;
    for class in &oracle {
        let members = class.members.as_deref().unwrap_or_default();
        let (rep0, modulus) = class_of(group, &class.representative);
        consistent &= members.len() as Wide == class.size
            && class.size * modulus == *params.p_pow_m()
            && rep0 == class.representative
            && members.iter().all(|u| class_of(group, u).0 == rep0);
        consistent &= reps.insert(rep0);
    }
    if params.is_minimal_nonabelian() {
        match conjugacy_classes(group, ClassMode::ClosedForm, cfg) {
            Ok(closed) => {
                let same = closed.len() == oracle.len()
                    && closed.iter().zip(&oracle).all(|(c, o)| c.representative == o.representative && c.size == o.size);
                consistent &= same;
                rep.check_result("class_count_oracle", k_of_d(params), |kd| (kd == oracle.len() as Wide, format!("{} classes", oracle.len())));
            }
            Err(err) => return rep.check("class_partition", false, format!("error: {err}")),
        }
    }
    rep.check("class_partition", consistent, format!("closed form = oracle on {} classes", oracle.len()));
}

fn block_report(group: &Metacyclic<Wide>, e: u64, evaluator: &InvariantFn, oracle: Option<&OracleConfig>) -> PointReport {
    let params = group.params();
    let mut rep = PointReport::new(params, Some(e));
    let inv = match evaluator(params, e) {
        Ok(inv) => inv,
        Err(err) => {
            rep.check("invariants", false, format!("error: {err}"));
            return rep;
        }
    };
    let (p, m, n) = (params.p(), params.m(), params.n());
    let et = e as Wide;

    rep.check("invariant_consistency", inv.k0 + inv.k1 == inv.k && inv.l == et && inv.e == et, format!("k={} k0={} k1={} l={}", inv.k, inv.k0, inv.k1, inv.l));
    rep.check(
        "height_divisibility",
        inv.k0 % params.p_pow_n() == 0 && inv.k1 % params.pow(n - 1).unwrap() == 0,
        "p^n | k0, p^(n-1) | k1",
    );
    if let Some(stated) = stated_invariants(params, e) {
        rep.check_result("family_statement", stated, |s| {
            let same = (s.k, s.k0, s.k1, s.l) == (inv.k, inv.k0, inv.k1, inv.l);
            (same, format!("{:?}", s.basis))
        });
    }
    rep.check_result("l_bounds", l_bounds::<Wide>(e), |(lo, hi)| (lo <= inv.l && inv.l <= hi, format!("{lo} <= {} <= {hi}", inv.l)));
    rep.check_result("bounds", bounds_check(params, &inv, None), |r| {
        let failing: Vec<_> = r.failures().map(|c| format!("{}: {c}", c.name)).collect();
        (r.all_pass(), if failing.is_empty() { format!("{} conditions", r.checks.len()) } else { failing.join("; ") })
    });
    rep.check_result("malle_navarro", malle_navarro_check(params, e), |(a, b)| (a && b, format!("k <= p k0: {a}, k <= k(D): {b}")));
    rep.check_result("replay_amc", replay_amc(params, e), |c| (c.certified, format!("L={} U={}", c.value("L").unwrap(), c.value("U").unwrap())));
    rep.check_result("replay_k2", replay_k2(params, e), |c| (c.certified, format!("M={}", c.value("M").unwrap())));
    let ledger = subsection_ledger(params, e);
    rep.check_result("subsection_ledger", ledger.clone(), |lg| (lg.k_minus_l + et == inv.k, format!("k - l = {}", lg.k_minus_l)));
    if n == 1 {
        rep.check_result("k_minus_l_n1", k_minus_l_n1(params, e), |v| (v + et == inv.k, format!("{v}")));
    }
    if m == 2 && n == 1 {
        rep.check_result("galois_orbits", galois_orbit_structure::<Wide>(p, e), |orbits| {
            let total: Wide = orbits.iter().map(|(len, count)| len * count).sum();
            (total == inv.k, format!("{total} characters"))
        });
    }
    if p == 3 && m == 2 && e == 2 {
        rep.check_result("k0_l1_p3", k0_l1_p3::<Wide>(m, n), |v| (v == inv.k0, format!("{v}")));
    }

    if let Some(cfg) = oracle {
        check_fusion(group, e, &inv, cfg, &mut rep);
    }
    rep.invariants = Some(inv);
    rep
}

fn check_fusion(group: &Metacyclic<Wide>, e: u64, inv: &InvariantSet<Wide>, cfg: &OracleConfig, rep: &mut PointReport) {
    let params = group.params();
    let fusion = match make_fusion(group, e) {
        Ok(f) => f,
        Err(err) => return rep.check("fusion", false, format!("error: {err}")),
    };
    rep.check_result("alpha_automorphism", alpha_is_automorphism(group, &fusion, cfg), |ok| (ok, format!("r = {}", fusion.r)));
    rep.check_result("outer_order", outer_order_oracle(group, &fusion, cfg), |j| (j == e, format!("{j}")));

    let closed = focal_subgroup(group, &fusion);
    let expected = if e == 1 { derived_subgroup(group) } else { Subgroup { generators: vec![group.x()], order: *params.p_pow_m(), cyclic_decomposition: Some(vec![*params.p_pow_m()]) } };
    rep.check_result("focal_subgroup", focal_subgroup_oracle(group, &fusion, cfg), |o| {
        let same = closed.same_elements(&o, group, cfg).unwrap_or(false) && expected.same_elements(&o, group, cfg).unwrap_or(false);
        (same, format!("order {}", o.order))
    });

    let census = f_classes(group, &fusion, ClassMode::Oracle, cfg);
    let closed_census = f_classes(group, &fusion, ClassMode::ClosedForm, cfg);
    rep.check_result("fusion_census", census, |classes| {
        let fixed = classes.iter().filter(|c| c.orbit.len() == 1).count() as Wide;
        let free: Vec<_> = classes.iter().filter(|c| c.orbit.len() != 1).collect();
        let lengths_ok = free.iter().all(|c| c.orbit.len() as u64 == e);
        let split = orbit_split_count(params, e).unwrap_or(-1);
        let fixed_ok = if e == 1 { fixed == classes.len() as Wide } else { fixed == *params.p_pow_n() && free.len() as Wide == split };
        let total: Wide = subsection_representatives(&fusion, &classes).iter().map(|(_, c)| c).sum();
        let same_as_closed = closed_census.as_ref().is_ok_and(|c| c == &classes);
        (
            lengths_ok && fixed_ok && total + inv.l == inv.k && same_as_closed,
            format!("{} F-classes, {fixed} fixed, {} orbits of length {e}", classes.len(), free.len()),
        )
    });
}
