//! Replays of the arithmetic steps in the proofs: the inequality chains that
//! end in a contradiction, small Diophantine screens, the Dynkin form of type
//! `A_k`, and the residue screen for `a^2 + b^2 = 0 (mod p)`.
//!
//! Every search is plain enumeration over an explicit box, and every
//! certificate carries the values it was decided on.

use std::collections::HashSet;
use std::fmt;

use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::invariants::check_e;
use crate::metacyclic::{GroupParams, Metacyclic};
use crate::scalar::{exact_div, Exact};
use crate::structure::class_of;

/// Largest prime accepted by [`two_squares_screen`].
pub const TWO_SQUARES_LIMIT: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CertificateKind {
    Contradiction,
    Infeasible,
    FeasibleWitness,
    ResidueScreen,
}

impl CertificateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CertificateKind::Contradiction => "contradiction",
            CertificateKind::Infeasible => "infeasible",
            CertificateKind::FeasibleWitness => "feasible_witness",
            CertificateKind::ResidueScreen => "residue_screen",
        }
    }
}

impl fmt::Display for CertificateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Inclusive range searched for one unknown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBound<T> {
    pub name: String,
    pub lo: T,
    pub hi: T,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate<T> {
    pub kind: CertificateKind,
    /// Short name of the replayed step.
    pub claim: String,
    pub parameters: Vec<(String, T)>,
    /// Named components of the solution, when one exists.
    pub witness: Option<Vec<(String, T)>>,
    pub search_box: Vec<SearchBound<T>>,
    pub checked_values: Vec<(String, T)>,
    /// Whether the claim was confirmed on the recorded values.
    pub certified: bool,
}

impl<T: Exact> Certificate<T> {
    fn new(kind: CertificateKind, claim: impl Into<String>) -> Self {
        Certificate {
            kind,
            claim: claim.into(),
            parameters: Vec::new(),
            witness: None,
            search_box: Vec::new(),
            checked_values: Vec::new(),
            certified: false,
        }
    }

    pub fn value(&self, name: &str) -> Option<&T> {
        self.checked_values.iter().find(|(k, _)| k == name).map(|(_, v)| v)
    }

    pub fn is_feasible(&self) -> bool {
        self.witness.is_some()
    }
}

fn named<T: Clone>(items: &[(&str, T)]) -> Vec<(String, T)> {
    items.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn point_parameters<T: Exact>(params: &GroupParams<T>, e: u64) -> Vec<(String, T)> {
    let int = |v: u64| T::from_u64_exact(v);
    named(&[
        ("p", int(params.p())),
        ("m", int(params.m() as u64)),
        ("n", int(params.n() as u64)),
        ("l", int(params.l() as u64)),
        ("e", int(e)),
    ])
}

fn chain_setup<T: Exact>(params: &GroupParams<T>, e: u64) -> Result<T> {
    params.require_minimal_nonabelian()?;
    let et = check_e(params, e)?;
    params.require_headroom(4)?;
    Ok(et)
}

/// Chain assuming `k0` is one `p^n` below its bound:
/// `L = ((p^m-1)/e + p^2 + e - 1) p^n <= sum p^(2i) k_i <= U = ((p^m-p)/e + pe) p^n < U' = ((p^m-1)/e + p^2) p^n`.
/// Certified when `L` splits as the two lower estimates, `U < U'` and `U' <= L`.
pub fn replay_amc<T: Exact>(params: &GroupParams<T>, e: u64) -> Result<Certificate<T>> {
    let et = chain_setup(params, e)?;
    let (m, n) = (params.m(), params.n());
    let pt = params.prime().clone();
    let pn = params.p_pow_n().clone();
    let pm = params.pow(m)?;
    let p2 = pt.clone() * pt.clone();
    let div = |num: T, what: &str| exact_div(&num, &et, what);

    let lower = (div(pm.clone() - T::one(), "(p^m - 1)/e")? + p2.clone() + et.clone() - T::one()) * pn.clone();
    let upper = (div(pm.clone() - pt.clone(), "(p^m - p)/e")? + pt.clone() * et.clone()) * pn.clone();
    let upper_strict = (div(pm - T::one(), "(p^m - 1)/e")? + p2.clone()) * pn.clone();
    let k0_assumed = (div(params.pow(m - 1)? - T::one(), "(p^(m-1) - 1)/e")? + et.clone() - T::one()) * pn.clone();
    let k1_lower = div((params.pow(m - 1)? - params.pow(m - 2)?) * params.pow(n - 1)?, "k1 lower bound")? + pn;
    let split = k0_assumed.clone() + p2 * k1_lower.clone();

    let mut cert = Certificate::new(CertificateKind::Contradiction, "amc");
    cert.parameters = point_parameters(params, e);
    cert.certified = split == lower && upper < upper_strict && upper_strict <= lower;
    cert.checked_values = named(&[
        ("L", lower),
        ("U", upper),
        ("U'", upper_strict),
        ("k0_assumed", k0_assumed),
        ("k1_lower", k1_lower),
        ("k0_assumed+p^2*k1_lower", split),
    ]);
    Ok(cert)
}

/// Chain assuming some `k_i > 0` with `i >= 2`, which forces
/// `p^(n+3) - p^(n+1) <= M = ((1-p)/e + e(p-1)) p^n`.
/// Certified when `M <= p^(n+2) < p^(n+3) - p^(n+1)` and
/// `M + p^(n+1)` equals the gap between the two outer estimates.
pub fn replay_k2<T: Exact>(params: &GroupParams<T>, e: u64) -> Result<Certificate<T>> {
    let et = chain_setup(params, e)?;
    let (m, n) = (params.m(), params.n());
    let pt = params.prime().clone();
    let pm1 = pt.clone() - T::one();
    let middle = (exact_div(&(T::one() - pt.clone()), &et, "(1 - p)/e")? + et.clone() * pm1) * params.p_pow_n().clone();
    let ceiling = params.pow(n + 2)?;
    let floor = params.pow(n + 3)? - params.pow(n + 1)?;

    let k0 = (exact_div(&(params.pow(m - 1)? - T::one()), &et, "k0")? + et.clone()) * params.p_pow_n().clone();
    let height_one = (exact_div(&(params.pow(m - 1)? - params.pow(m - 2)?), &et, "k1")? - T::one()) * params.pow(n + 1)?;
    let upper = (exact_div(&(params.pow(m - 1)? - T::one()), &et, "k0")? + et) * params.pow(n + 1)?;
    let gap = upper.clone() - k0.clone() - height_one.clone();

    let mut cert = Certificate::new(CertificateKind::Contradiction, "k2");
    cert.parameters = point_parameters(params, e);
    cert.certified = middle <= ceiling && ceiling < floor && gap == middle.clone() + params.pow(n + 1)?;
    cert.checked_values = named(&[
        ("M", middle),
        ("p^(n+2)", ceiling),
        ("p^(n+3)-p^(n+1)", floor),
        ("lower_k0", k0),
        ("lower_height_one", height_one),
        ("upper", upper),
        ("upper-lower_k0-lower_height_one", gap),
    ]);
    Ok(cert)
}

/// `q(v) = sum v_i^2 - sum v_i v_(i+1)`.
pub fn dynkin_a_form<T: Exact>(v: &[T]) -> Result<T> {
    if v.is_empty() {
        return Err(Error::invalid("the Dynkin form needs a vector of length at least 1"));
    }
    let squares = v.iter().fold(T::zero(), |acc, x| acc + x.clone() * x.clone());
    let links = v.windows(2).fold(T::zero(), |acc, w| acc + w[0].clone() * w[1].clone());
    Ok(squares - links)
}

/// Searches `alpha + beta + gamma = 5`, `alpha + 4 beta + 9 gamma + 5 k1 = 25`
/// over `alpha, beta, gamma in [0, 5]` for `k1 = 1, 2, 3`.
pub fn p5_height_screen() -> Vec<Certificate<i64>> {
    (1..=3)
        .map(|k1: i64| {
            let mut found = None;
            'search: for alpha in 0..=5i64 {
                for beta in 0..=5 - alpha {
                    let gamma = 5 - alpha - beta;
                    if alpha + 4 * beta + 9 * gamma + 5 * k1 == 25 {
                        found = Some((alpha, beta, gamma));
                        break 'search;
                    }
                }
            }
            let kind = if found.is_some() { CertificateKind::FeasibleWitness } else { CertificateKind::Infeasible };
            let mut cert = Certificate::new(kind, "p5");
            cert.parameters = named(&[("k1", k1)]);
            cert.search_box = ["alpha", "beta", "gamma"].iter().map(|v| SearchBound { name: v.to_string(), lo: 0, hi: 5 }).collect();
            cert.checked_values = named(&[("orbits", 5), ("norm", 25), ("20-5*k1", 20 - 5 * k1)]);
            cert.certified = match found {
                Some((a, b, c)) => {
                    cert.witness = Some(named(&[("alpha", a), ("beta", b), ("gamma", c)]));
                    a + b + c == 5 && a + 4 * b + 9 * c + 5 * k1 == 25 && 3 * b + 8 * c == 20 - 5 * k1
                }
                None => true,
            };
            cert
        })
        .collect()
}

/// Decides whether `sum_(i>=2) r_i (i^2 - 1) = (p - 3)/2` has a solution
/// in non-negative integers, searching `r_i in [0, t/(i^2-1)]` for every
/// `i` with `i^2 - 1 <= t`.
pub fn prime_screen(p: u64) -> Result<Certificate<i64>> {
    if p < 5 || !is_prime(p) {
        return Err(Error::invalid(format!("requires a prime p >= 5, got {p}")));
    }
    let target = ((p - 3) / 2) as i64;
    let parts: Vec<(i64, i64)> = (2i64..).map(|i| (i, i * i - 1)).take_while(|&(_, w)| w <= target).collect();

    // Depth-first in order of increasing i, trying r_i = 0, 1, ...;
    // dead (index, remainder) states are remembered.
    fn search(parts: &[(i64, i64)], idx: usize, rest: i64, dead: &mut HashSet<(usize, i64)>, r: &mut Vec<i64>) -> bool {
        if rest == 0 {
            return true;
        }
        if idx == parts.len() || dead.contains(&(idx, rest)) {
            return false;
        }
        let w = parts[idx].1;
        for count in 0..=rest / w {
            r[idx] = count;
            if search(parts, idx + 1, rest - count * w, dead, r) {
                return true;
            }
        }
        r[idx] = 0;
        dead.insert((idx, rest));
        false
    }

    let mut r = vec![0; parts.len()];
    let feasible = search(&parts, 0, target, &mut HashSet::new(), &mut r);
    let kind = if feasible { CertificateKind::FeasibleWitness } else { CertificateKind::Infeasible };
    let mut cert = Certificate::new(kind, "primes");
    cert.parameters = named(&[("p", p as i64)]);
    cert.search_box = parts.iter().map(|&(i, w)| SearchBound { name: format!("r_{i}"), lo: 0, hi: target / w }).collect();
    cert.checked_values = named(&[("target", target)]);
    cert.certified = if feasible {
        let total: i64 = parts.iter().zip(&r).map(|(&(_, w), c)| w * c).sum();
        let witness = parts.iter().zip(&r).map(|(&(i, _), &c)| (format!("r_{i}"), c)).filter(|(_, c)| *c > 0).collect();
        cert.witness = Some(witness);
        total == target
    } else {
        true
    };
    Ok(cert)
}

/// Decides whether `a^2 + b^2 = 0 (mod p)` has a solution with `a, b` nonzero
/// mod `p`, scanning every residue. The witness minimises `a^2 + b^2` with `a <= b`.
pub fn two_squares_screen(p: u64) -> Result<Certificate<i64>> {
    if p % 2 == 0 || !is_prime(p) || p > TWO_SQUARES_LIMIT {
        return Err(Error::invalid(format!("requires an odd prime p <= {TWO_SQUARES_LIMIT}, got {p}")));
    }
    let mut root = vec![None; p as usize];
    for b in (1..p).rev() {
        root[(b * b % p) as usize] = Some(b);
    }
    let mut best: Option<(u64, u64)> = None;
    for a in 1..p {
        let need = (p - a * a % p) % p;
        if let Some(b0) = root[need as usize] {
            for b in [b0, p - b0] {
                if b >= a && best.is_none_or(|(x, y)| a * a + b * b < x * x + y * y) {
                    best = Some((a, b));
                }
            }
        }
    }
    let mut cert = Certificate::new(CertificateKind::ResidueScreen, "two-squares");
    let pi = p as i64;
    cert.parameters = named(&[("p", pi)]);
    cert.search_box = vec![
        SearchBound { name: "a".into(), lo: 1, hi: pi - 1 },
        SearchBound { name: "b".into(), lo: 1, hi: pi - 1 },
    ];
    cert.checked_values = named(&[("p mod 4", pi % 4)]);
    cert.certified = match best {
        Some((a, b)) => {
            let (a, b) = (a as i64, b as i64);
            cert.witness = Some(named(&[("a", a), ("b", b)]));
            cert.checked_values.push(("a^2+b^2".into(), a * a + b * b));
            (a * a + b * b) % pi == 0
        }
        None => true,
    };
    Ok(cert)
}

/// Central elements used as norm targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BudgetTarget {
    /// `z = x`
    X,
    /// `z = x^p`
    XPow,
}

/// `|C_D(z)|`, the squared norm of the column of generalized decomposition
/// numbers at `z`. Only defined for `l = m - 1`, `n = 1`.
pub fn orthogonality_budget<T: Exact>(params: &GroupParams<T>, target: BudgetTarget) -> Result<T> {
    if !params.is_minimal_nonabelian() || params.n() != 1 {
        return Err(Error::invalid(format!("the norm budget needs l = m - 1 and n = 1, got {params}")));
    }
    let group = Metacyclic::new(params.clone());
    let z = match target {
        BudgetTarget::X => group.x(),
        BudgetTarget::XPow => group.power(&group.x(), params.prime()),
    };
    // The class of z has p^m / p^w elements, so |C_D(z)| = p^n p^w.
    let (_, modulus) = class_of(&group, &z);
    Ok(params.p_pow_n().clone() * modulus)
}
