//! Acceptance suite: one test per criterion, each writing a single
//! `criterion N [...]: PASS|FAIL (...)` line to stderr.

mod support;

use std::io::Write;
use std::process::Command;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use metablock::fusion::{
    f_classes, focal_subgroup, focal_subgroup_oracle, make_fusion, orbit_split_count, subsection_ledger,
};
use metablock::invariants::{bounds_check, invariants_reduction, k0_l1_p3, malle_navarro_check};
use metablock::proof::{dynkin_a_form, p5_height_screen, prime_screen, replay_amc, replay_k2, two_squares_screen, CertificateKind};
use metablock::structure::{
    center, centralizer_of_x, centralizer_of_y, class_count, class_of, conjugacy_classes, derived_subgroup, k_of_d, ClassMode,
    OracleConfig, Subgroup,
};
use metablock::{Element, GroupParams, Metacyclic};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{divisors, odd_primes, ppow, Brute, Frac};

/// Largest group handled by brute force.
const ORACLE_MAX: u64 = 6561;
/// Largest class count listed element by element.
const LISTING_MAX: i128 = 1 << 20;
/// Number of mismatches tolerated anywhere.
const TOLERANCE: usize = 0;
const STRUCTURE_BUDGET: Duration = Duration::from_secs(30);
const BOUNDS_BUDGET: Duration = Duration::from_secs(10);
const RESIDUE_BUDGET: Duration = Duration::from_secs(5);
const DYNKIN_SAMPLES: usize = 100_000;
const DYNKIN_MAX_LEN: usize = 30;
const DYNKIN_ENTRY: i64 = 50;

/// Timed criteria must not share the CPU.
static SERIAL: Mutex<()> = Mutex::new(());

fn verdict(id: &str, title: &str, pass: bool, detail: String) {
    let line = format!("criterion {id} [{title}]: {} ({detail})\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
    assert!(pass, "{}", line.trim_end());
}

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

/// `(p, m, n, l)` with `|D| <= ORACLE_MAX`.
fn oracle_points(primes: &[u64], minimal_only: bool) -> Vec<(u64, u32, u32, u32)> {
    let mut out = Vec::new();
    for &p in primes {
        for m in 2..=12u32 {
            for n in 1..=12u32 {
                if p.checked_pow(m + n).is_none_or(|o| o > ORACLE_MAX) {
                    continue;
                }
                for l in m.saturating_sub(n).max(1)..m {
                    if !minimal_only || l == m - 1 {
                        out.push((p, m, n, l));
                    }
                }
            }
        }
    }
    out
}

fn grid_points() -> Vec<(u64, u32, u32)> {
    let mut out = Vec::new();
    for p in [3u64, 5, 7, 11, 13] {
        for m in 2..=6 {
            for n in 1..=6 {
                out.push((p, m, n));
            }
        }
    }
    out
}

fn membership(group: &Metacyclic<i64>, s: &Subgroup<i64>, b: &Brute) -> Vec<bool> {
    let cfg = OracleConfig::with_cap(ORACLE_MAX);
    let mut v = vec![false; b.order()];
    for g in s.elements(group, &cfg).unwrap() {
        v[b.index((g.a as u64, g.b as u64))] = true;
    }
    v
}

#[test]
fn criterion_01_structure_suite() {
    let _guard = serial();
    let started = Instant::now();
    let points = oracle_points(&[3, 5, 7], false);
    let mut mismatches = Vec::new();
    for &(p, m, n, l) in &points {
        let b = Brute::new(p, m, n, l);
        let group = Metacyclic::<i64>::from_parts(p, m, n, l).unwrap();
        let subgroups = [
            ("D'", derived_subgroup(&group), b.derived()),
            ("Z(D)", center(&group), b.center()),
            ("C(x)", centralizer_of_x(&group), b.centralizer(b.x())),
            ("C(y)", centralizer_of_y(&group), b.centralizer(b.y())),
        ];
        for (name, closed, oracle) in subgroups {
            if membership(&group, &closed, &b) != oracle {
                mismatches.push(format!("{name} at {:?}", (p, m, n, l)));
            }
        }
        let classes = b.classes();
        let by_formula = (0..b.order()).all(|i| {
            let (a, bb) = b.elem(i);
            let rep = class_of(&group, &Element::new(a as i64, bb as i64)).0;
            b.index((rep.a as u64, rep.b as u64)) == classes[i]
        });
        let listed = l != m - 1 || {
            let closed = conjugacy_classes(&group, ClassMode::ClosedForm, &OracleConfig::default()).unwrap();
            let mut reps: Vec<usize> = classes.clone();
            reps.sort_unstable();
            reps.dedup();
            closed.len() == reps.len()
                && closed.iter().all(|c| {
                    let i = b.index((c.representative.a as u64, c.representative.b as u64));
                    classes[i] == i && classes.iter().filter(|&&r| r == i).count() as i64 == c.size
                })
        };
        if !(by_formula && listed) {
            mismatches.push(format!("classes at {:?}", (p, m, n, l)));
        }
    }
    let elapsed = started.elapsed();
    verdict(
        "1",
        "structure suite",
        mismatches.len() <= TOLERANCE && elapsed < STRUCTURE_BUDGET,
        format!("{} groups, {} mismatches {:?}, {:.2?} of {:?}", points.len(), mismatches.len(), mismatches, elapsed, STRUCTURE_BUDGET),
    );
}

#[test]
fn criterion_02_class_count_formula() {
    let mut bad = Vec::new();
    let mut listed = 0;
    for (p, m, n) in grid_points() {
        let params = GroupParams::<i128>::minimal_nonabelian(p, m, n).unwrap();
        let pi = p as i128;
        let formula = pi.pow(n + m - 3) * (pi * pi + pi - 1);
        let kd = k_of_d(&params).unwrap();
        let general = class_count(&params).unwrap();
        let mut ok = kd == formula && general == formula;
        if formula <= LISTING_MAX {
            let group = Metacyclic::new(params.clone());
            let classes = conjugacy_classes(&group, ClassMode::ClosedForm, &OracleConfig::default()).unwrap();
            ok &= classes.len() as i128 == formula && classes.iter().map(|c| c.size).sum::<i128>() == *params.order();
            listed += 1;
        }
        if p.pow(m + n) <= ORACLE_MAX {
            let b = Brute::new(p, m, n, m - 1);
            let mut reps = b.classes();
            reps.sort_unstable();
            reps.dedup();
            ok &= reps.len() as i128 == formula;
        }
        if !ok {
            bad.push((p, m, n));
        }
    }
    let spot = |p, m, n| k_of_d(&GroupParams::<i64>::minimal_nonabelian(p, m, n).unwrap()).unwrap();
    let spots = (spot(3, 2, 1), spot(5, 2, 1), spot(3, 3, 2));
    verdict(
        "2",
        "class-count formula",
        bad.len() <= TOLERANCE && spots == (11, 29, 99),
        format!("{} points, {listed} listed, failures {bad:?}, spot values {spots:?}", grid_points().len()),
    );
}

#[test]
fn criterion_03_focal_subgroup() {
    let mut bad = Vec::new();
    let mut checked = 0;
    for (p, m, n, _) in oracle_points(&[3, 5, 7, 11, 13], true) {
        let b = Brute::new(p, m, n, m - 1);
        let group = Metacyclic::<i64>::from_parts(p, m, n, m - 1).unwrap();
        let cfg = OracleConfig::default();
        let inner: Vec<(u64, u64)> = if b.order() <= support::FULL_SCAN_MAX { b.all().collect() } else { vec![b.x(), b.y()] };
        for e in divisors(p - 1) {
            let r = b.unit_of_order(e);
            let b = &b;
            let alpha = |g| b.alpha(r, g);
            let conj: Vec<Box<dyn Fn((u64, u64)) -> (u64, u64)>> =
                inner.iter().map(|&h| Box::new(move |g| b.conj(g, h)) as Box<dyn Fn((u64, u64)) -> (u64, u64)>).collect();
            let mut maps: Vec<&dyn Fn((u64, u64)) -> (u64, u64)> = conj.iter().map(|f| f.as_ref()).collect();
            maps.push(&alpha);
            let oracle = b.focal(&maps);
            let expected = if e == 1 { b.derived() } else { b.closure(&[b.x()]) };
            let fusion = make_fusion(&group, e).unwrap();
            let library_oracle = focal_subgroup_oracle(&group, &fusion, &cfg).unwrap();
            let ok = oracle == expected
                && membership(&group, &focal_subgroup(&group, &fusion), &b) == expected
                && membership(&group, &library_oracle, &b) == expected;
            if !ok {
                bad.push((p, m, n, e));
            }
            checked += 1;
        }
    }
    verdict("3", "focal subgroup", bad.len() <= TOLERANCE, format!("{checked} (point, e) pairs, failures {bad:?}"));
}

#[test]
fn criterion_04_fusion_census() {
    let mut bad = Vec::new();
    let (mut ledgers, mut censuses) = (0, 0);
    for (p, m, n) in grid_points() {
        let params = GroupParams::<i128>::minimal_nonabelian(p, m, n).unwrap();
        let pi = p as i128;
        let s = m + n;
        for e in divisors(p - 1) {
            let ei = e as i128;
            let split = orbit_split_count(&params, e).unwrap();
            let split_formula = (pi.pow(s - 1) + pi.pow(s - 2) - pi.pow(n) - pi.pow(s - 3)) / ei;
            let k = invariants_reduction(&params, e).unwrap().k;
            let mut ok = subsection_ledger(&params, e).unwrap().k_minus_l + ei == k && split == split_formula;
            ledgers += 1;

            if p.pow(s) <= ORACLE_MAX {
                let b = Brute::new(p, m, n, m - 1);
                let r = b.unit_of_order(e);
                let classes = b.classes();
                let mut reps: Vec<usize> = classes.clone();
                reps.sort_unstable();
                reps.dedup();
                let mut seen = std::collections::HashSet::new();
                let (mut fixed, mut free, mut lengths_ok) = (0i128, 0i128, true);
                for &c in &reps {
                    if !seen.insert(c) {
                        continue;
                    }
                    let mut len = 1;
                    let mut cur = classes[b.index(b.alpha(r, b.elem(c)))];
                    while cur != c {
                        seen.insert(cur);
                        len += 1;
                        cur = classes[b.index(b.alpha(r, b.elem(cur)))];
                    }
                    if len == 1 {
                        fixed += 1;
                    } else {
                        free += 1;
                        lengths_ok &= len == e;
                    }
                }
                // alpha is trivial when e = 1 and fixes every class.
                ok &= lengths_ok && if e == 1 { free == 0 } else { fixed == pi.pow(n) && free == split };
                censuses += 1;
            }
            if e > 1 && k_of_d(&params).unwrap() <= LISTING_MAX {
                let group = Metacyclic::new(params.clone());
                let fusion = make_fusion(&group, e).unwrap();
                let census = f_classes(&group, &fusion, ClassMode::ClosedForm, &OracleConfig::default()).unwrap();
                let fixed = census.iter().filter(|c| c.orbit.len() == 1).count() as i128;
                let free: Vec<_> = census.iter().filter(|c| c.orbit.len() > 1).collect();
                ok &= fixed == pi.pow(n) && free.len() as i128 == split && free.iter().all(|c| c.orbit.len() as u64 == e);
                censuses += 1;
            }
            if !ok {
                bad.push((p, m, n, e));
            }
        }
    }
    verdict("4", "fusion census", bad.len() <= TOLERANCE, format!("{ledgers} ledger identities, {censuses} censuses, failures {bad:?}"));
}

#[test]
fn criterion_05_paper_numbers() {
    let get = |p, m, n, e| {
        let v = invariants_reduction(&GroupParams::<i64>::minimal_nonabelian(p, m, n).unwrap(), e).unwrap();
        (v.k, v.k0, v.k1, v.l)
    };
    let got = [get(3, 2, 1, 2), get(5, 2, 1, 4), get(3, 3, 2, 2)];
    let want = [(10, 9, 1, 2), (26, 25, 1, 4), (63, 54, 9, 2)];
    let k0 = k0_l1_p3::<i64>(2, 1).unwrap();
    verdict("5", "paper numbers", got == want && k0 == 9, format!("{got:?}, k0_l1_p3(2, 1) = {k0}"));
}

fn criterion_six_grid() -> Vec<(GroupParams<i128>, u64)> {
    let mut out = Vec::new();
    for p in odd_primes(3, 31) {
        for m in 2..=8 {
            for n in 1..=8 {
                let params = GroupParams::<i128>::minimal_nonabelian(p, m, n).unwrap();
                for e in divisors(p - 1) {
                    out.push((params.clone(), e));
                }
            }
        }
    }
    out
}

/// The general bounds, evaluated with fractions.
fn bounds_by_fractions(params: &GroupParams<i128>, e: u64, k: i128, k0: i128, k1: i128, l_b: i128) -> bool {
    let p = params.p() as i128;
    let (m, n, l) = (params.m() as i32, params.n() as i32, params.l() as i32);
    let ei = e as i128;
    let ef = Frac::int(ei);
    let factor = ppow(p, l).sub(Frac::int(1)).div(ei).add(ef);
    let lower = ppow(p, l).add(ppow(p, l - 1)).sub(ppow(p, 2 * l - m - 1)).sub(Frac::int(1)).div(ei).add(ef).mul(ppow(p, n));
    let upper = factor.mul(ppow(p, n + m - l - 2).add(ppow(p, n)).sub(ppow(p, n - 2)));
    let weighted = Frac::int(k0 + p * p * k1);
    let kd = p.pow((n + m - 1) as u32) + p.pow((n + m - 2) as u32) - p.pow((n + m - 3) as u32);
    lower.le(Frac::int(k))
        && Frac::int(k).le(upper)
        && Frac::int(2 * p.pow(n as u32)).le(Frac::int(k0))
        && Frac::int(k0).le(factor.mul(ppow(p, n)))
        && weighted.le(factor.mul(ppow(p, n + m - l)))
        && ei <= l_b
        && (p - 1) % ei == 0
        && k0 % p.pow(n as u32) == 0
        && k1 % p.pow((n - m + l) as u32) == 0
        && k <= p * k0
        && k <= kd
}

#[test]
fn criterion_06_bounds_coherence() {
    let _guard = serial();
    let started = Instant::now();
    let grid = criterion_six_grid();
    let mut bad = Vec::new();
    for (params, e) in &grid {
        let inv = invariants_reduction(params, *e).unwrap();
        let report = bounds_check(params, &inv, None).unwrap();
        let (ratio, kd) = malle_navarro_check(params, *e).unwrap();
        let independent = bounds_by_fractions(params, *e, inv.k, inv.k0, inv.k1, inv.l);
        if !(report.all_pass() && ratio && kd && independent) {
            bad.push(format!("{params} e={e}"));
        }
    }
    let elapsed = started.elapsed();
    verdict(
        "6",
        "bounds coherence",
        bad.len() <= TOLERANCE && elapsed < BOUNDS_BUDGET,
        format!("{} (point, e) pairs, failures {bad:?}, {elapsed:.2?} of {BOUNDS_BUDGET:?}", grid.len()),
    );
}

#[test]
fn criterion_07a_chain_replays() {
    let grid = criterion_six_grid();
    let mut bad = Vec::new();
    for (params, e) in &grid {
        let amc = replay_amc(params, *e).unwrap();
        let k2 = replay_k2(params, *e).unwrap();
        // Independent evaluation of the two contradictions.
        let p = params.p() as i128;
        let (m, n) = (params.m(), params.n());
        let ei = *e as i128;
        let pn = p.pow(n);
        let lower = ((p.pow(m) - 1) / ei + p * p + ei - 1) * pn;
        let upper = ((p.pow(m) - p) / ei + p * ei) * pn;
        let middle = ((1 - p) / ei + ei * (p - 1)) * pn;
        let ok = amc.kind == CertificateKind::Contradiction
            && amc.certified
            && amc.value("L") == Some(&lower)
            && amc.value("U") == Some(&upper)
            && upper < lower
            && k2.certified
            && k2.value("M") == Some(&middle)
            && middle <= p.pow(n + 2)
            && p.pow(n + 2) < p.pow(n + 3) - p.pow(n + 1);
        if !ok {
            bad.push(format!("{params} e={e}"));
        }
    }
    verdict("7a", "amc and k2 replays", bad.len() <= TOLERANCE, format!("{} (point, e) pairs, failures {bad:?}", grid.len()));
}

#[test]
fn criterion_07b_p5_screen() {
    let certs = p5_height_screen();
    // Independent search over alpha + beta + gamma = 5.
    let solutions = |k1: i64| {
        (0..=5i64)
            .flat_map(|a| (0..=5 - a).map(move |b| (a, b, 5 - a - b)))
            .filter(|&(a, b, c)| a + 4 * b + 9 * c + 5 * k1 == 25)
            .collect::<Vec<_>>()
    };
    let kinds: Vec<_> = certs.iter().map(|c| c.kind).collect();
    let witness: Vec<i64> = certs[0].witness.iter().flatten().map(|(_, v)| *v).collect();
    let ok = kinds == [CertificateKind::FeasibleWitness, CertificateKind::Infeasible, CertificateKind::Infeasible]
        && witness == [0, 5, 0]
        && solutions(1) == [(0, 5, 0)]
        && solutions(2).is_empty()
        && solutions(3).is_empty()
        && certs.iter().all(|c| c.certified);
    verdict("7b", "p5 height screen", ok, format!("kinds {kinds:?}, witness for k1 = 1: {witness:?}"));
}

/// Whether `t` is a non-negative combination of `3, 8, 15, 24, ...`.
fn representable(t: i64) -> bool {
    let mut reach = vec![false; t as usize + 1];
    reach[0] = true;
    for i in 2.. {
        let w = i * i - 1;
        if w > t {
            break;
        }
        for v in w..=t {
            reach[v as usize] |= reach[(v - w) as usize];
        }
    }
    reach[t as usize]
}

#[test]
fn criterion_07c_prime_list() {
    const PAPER_LIST: [u64; 6] = [7, 11, 13, 17, 23, 29];
    let primes = odd_primes(5, 31);
    let certs: Vec<_> = primes.iter().map(|&p| prime_screen(p).unwrap()).collect();
    let infeasible: Vec<u64> = primes.iter().zip(&certs).filter(|(_, c)| !c.is_feasible()).map(|(p, _)| *p).collect();
    let oracle: Vec<u64> = primes.iter().copied().filter(|&p| !representable(((p - 3) / 2) as i64)).collect();
    let witness = |p: u64| prime_screen(p).unwrap().witness.unwrap_or_default();
    let w19 = witness(19);
    let w31 = witness(31);
    let witnesses_ok = w19 == [("r_3".to_string(), 1)] && w31 == [("r_2".to_string(), 2), ("r_3".to_string(), 1)];
    verdict(
        "7c",
        "prime screen list",
        infeasible == oracle && infeasible == PAPER_LIST && witnesses_ok && certs.iter().all(|c| c.certified),
        format!("infeasible over [5, 31]: {infeasible:?}, brute force: {oracle:?}, expected {PAPER_LIST:?}; witnesses 19: {w19:?}, 31: {w31:?}"),
    );
}

#[test]
fn criterion_08_residue_screen() {
    let _guard = serial();
    let started = Instant::now();
    let primes = odd_primes(3, 10_000);
    let mut bad = Vec::new();
    for &p in &primes {
        let c = two_squares_screen(p).unwrap();
        let witness_ok = match &c.witness {
            Some(w) => {
                let (a, b) = (w[0].1, w[1].1);
                (a * a + b * b) % p as i64 == 0 && a % p as i64 != 0 && b % p as i64 != 0
            }
            None => true,
        };
        if c.is_feasible() != (p % 4 == 1) || !witness_ok || !c.certified {
            bad.push(p);
        }
    }
    let elapsed = started.elapsed();
    verdict(
        "8",
        "residue screen",
        bad.len() <= TOLERANCE && elapsed < RESIDUE_BUDGET,
        format!("{} primes, failures {bad:?}, {elapsed:.2?} of {RESIDUE_BUDGET:?}", primes.len()),
    );
}

#[test]
fn criterion_09_dynkin_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd1a6);
    let mut bad = 0usize;
    for _ in 0..DYNKIN_SAMPLES {
        let len = rng.gen_range(1..=DYNKIN_MAX_LEN);
        let mut v: Vec<i64> = (0..len).map(|_| rng.gen_range(-DYNKIN_ENTRY..=DYNKIN_ENTRY)).collect();
        if v.iter().all(|&x| x == 0) {
            v[rng.gen_range(0..len)] = 1;
        }
        let q = dynkin_a_form(&v).unwrap();
        // 2q = v_1^2 + sum (v_i - v_(i+1))^2 + v_k^2
        let twice = v[0] * v[0] + v.windows(2).map(|w| (w[0] - w[1]).pow(2)).sum::<i64>() + v[len - 1] * v[len - 1];
        if q <= 0 || 2 * q != twice {
            bad += 1;
        }
    }
    let units = (1..=DYNKIN_MAX_LEN).all(|k| {
        (0..k).all(|i| {
            let mut v = vec![0i64; k];
            v[i] = 1;
            dynkin_a_form(&v).unwrap() == 1
        })
    });
    let ones = (1..=20).all(|k| dynkin_a_form(&vec![1i64; k]).unwrap() == 1);
    verdict(
        "9",
        "Dynkin form",
        bad <= TOLERANCE && units && ones,
        format!("{DYNKIN_SAMPLES} random vectors, {bad} failures; q(e_i) = 1: {units}; q(1,...,1) = 1: {ones}"),
    );
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_metablock")).args(args).env_remove("METABLOCK_ORACLE_CAP").output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned(), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn criterion_10_cli_contract() {
    let mut failures = Vec::new();
    let mut expect = |what: &str, ok: bool| {
        if !ok {
            failures.push(what.to_string());
        }
    };
    let (code, out, _) = cli(&["structure", "--p", "3", "--m", "2", "--n", "1", "--l", "1", "--oracle"]);
    expect("structure ok", code == 0 && out.contains("class_count       11") && out.contains("closed-form = oracle: OK"));
    let (code, _, err) = cli(&["structure", "--p", "4", "--m", "2", "--n", "1", "--l", "1"]);
    expect("invalid prime", code == 2 && err.contains("p must be an odd prime"));
    let (code, _, _) = cli(&["invariants", "--p", "5", "--m", "2", "--n", "1", "--e", "3"]);
    expect("e not dividing p - 1", code == 2);
    let (code, _, _) = cli(&["replay", "--which", "nonsense"]);
    expect("unknown selector", code == 2);
    let verify = ["verify", "--sweep", "5", "3", "2", "--format", "json"];
    let (code, first, _) = cli(&verify);
    let (_, second, _) = cli(&verify);
    let (_, parallel, _) = cli(&["verify", "--sweep", "5", "3", "2", "--format", "json", "--jobs", "3"]);
    expect("verify passes", code == 0);
    expect("byte-identical output", first == second && first == parallel);
    let (code, out, err) = cli(&["verify", "--sweep", "5", "3", "2", "--inject-fault", "k1"]);
    expect("fault injection exits 1", code == 1);
    expect("fault names first tuple", out.contains("first failure: (p=3, m=2, n=1, l=1, e=1)") && err.contains("(p=3, m=2, n=1, l=1, e=1)"));
    verdict("10", "CLI determinism and exit codes", failures.is_empty(), format!("failed expectations: {failures:?}"));
}

#[test]
fn criterion_07d_prime_list_from_seven() {
    let primes = odd_primes(7, 31);
    let infeasible: Vec<u64> = primes.iter().copied().filter(|&p| !prime_screen(p).unwrap().is_feasible()).collect();
    let oracle: Vec<u64> = primes.iter().copied().filter(|&p| !representable(((p - 3) / 2) as i64)).collect();
    verdict(
        "7d",
        "prime screen list from 7",
        infeasible == oracle && infeasible == [7, 11, 13, 17, 23, 29],
        format!("infeasible over [7, 31]: {infeasible:?}, brute force: {oracle:?}"),
    );
}
