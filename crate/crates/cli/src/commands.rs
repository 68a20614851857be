use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use metablock::arith::odd_primes;
use metablock::fusion::{
    alpha_is_automorphism, f_classes, focal_subgroup, focal_subgroup_oracle, make_fusion, orbit_split_count, outer_order_oracle,
    subsection_ledger,
};
use metablock::invariants::{bounds_check, invariants_reduction, malle_navarro_check, stated_invariants};
use metablock::proof::{p5_height_screen, prime_screen, replay_amc, replay_k2, two_squares_screen, Certificate};
use metablock::structure::{
    center, center_oracle, centralizer, centralizer_of_x, centralizer_of_y, class_count, class_of, conjugacy_classes,
    derived_subgroup, derived_subgroup_oracle, irr_degree_multiset, k_of_d, ClassMode, OracleConfig, Subgroup,
};
use metablock::verify::{check_point, default_evaluator, run_sweep, InvariantFn, SweepConfig, SweepGrid, Wide};
use metablock::{BigInt, Error, Exact, GroupParams, Metacyclic};

use crate::args::{BlockArgs, Cli, Command, Fault, FusionArgs, Format, GroupArgs, OracleArgs, Replay, ReplayArgs, StructureArgs, VerifyArgs};
use crate::report::{CertificateRecord, CsvRow, ReportRecord};
use crate::CliError;

type Outcome = Result<bool, CliError>;

pub(crate) fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let big = cli.arbitrary_precision;
    match &cli.command {
        Command::Structure(a) if big => structure::<BigInt>(a, out),
        Command::Structure(a) => structure::<i64>(a, out),
        Command::Invariants(a) if big => invariants::<BigInt>(a, out),
        Command::Invariants(a) => invariants::<i64>(a, out),
        Command::Fusion(a) if big => fusion::<BigInt>(a, out),
        Command::Fusion(a) => fusion::<i64>(a, out),
        Command::Verify(a) => verify(a, out, err),
        Command::Replay(a) if big => replay::<BigInt>(a, out),
        Command::Replay(a) => replay::<i64>(a, out),
        Command::Oracle(a) => oracle(a, out),
    }
}

fn params<T: Exact>(g: &GroupArgs) -> Result<GroupParams<T>, CliError> {
    if g.m < 2 {
        return Err(Error::InvalidInput(format!("m must be at least 2, got {}", g.m)).into());
    }
    Ok(GroupParams::new(g.p, g.m, g.n, g.l())?)
}

fn subgroup_text<T: Exact>(s: &Subgroup<T>) -> String {
    let gens: Vec<String> = s.generators.iter().map(ToString::to_string).collect();
    let mut text = format!("<{}>, order {}", gens.join(", "), s.order);
    if let Some(factors) = s.invariant_factors() {
        let cyclic: Vec<String> = factors.iter().map(|f| format!("C{f}")).collect();
        text += &format!(", type {}", if cyclic.is_empty() { "1".to_string() } else { cyclic.join(" x ") });
    }
    text
}

fn emit_records(records: &[ReportRecord], format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    match format {
        Format::Json => {
            if let [single] = records {
                serde_json::to_writer_pretty(&mut *out, single)?;
            } else {
                serde_json::to_writer_pretty(&mut *out, records)?;
            }
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in records {
                w.serialize(CsvRow::from(r))?;
            }
            w.flush()?;
        }
        Format::Text => {
            for r in records {
                write_record_text(r, out)?;
            }
        }
    }
    Ok(())
}

fn write_record_text(r: &ReportRecord, out: &mut dyn Write) -> Result<(), CliError> {
    let p = &r.params;
    write!(out, "(p={}, m={}, n={}, l={}", p.p, p.m, p.n, p.l)?;
    match &p.e {
        Some(e) => writeln!(out, "), e={e}")?,
        None => writeln!(out, ")")?,
    }
    if let Some(inv) = &r.invariants {
        writeln!(out, "  k  = {}\n  k0 = {}\n  k1 = {}\n  l  = {}", inv.k, inv.k0, inv.k1, inv.l)?;
    }
    if let Some(tag) = r.provenance {
        let tag = serde_json::to_value(tag)?;
        let basis = r.values.get("basis").map(|b| format!(" ({b})")).unwrap_or_default();
        writeln!(out, "  provenance: {}{basis}", tag.as_str().unwrap_or_default())?;
    }
    let width = r.values.keys().map(String::len).max().unwrap_or(0);
    for (k, v) in r.values.iter().filter(|(k, _)| *k != "basis") {
        writeln!(out, "  {k:width$}  {v}")?;
    }
    if !r.checks.is_empty() {
        let width = r.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &r.checks {
            writeln!(out, "  {:width$}  {}  {}", c.name, if c.pass { "ok  " } else { "FAIL" }, c.detail)?;
        }
    }
    Ok(())
}

fn structure<T: Exact>(a: &StructureArgs, out: &mut dyn Write) -> Outcome {
    let params = params::<T>(&a.group)?;
    let cfg = if a.oracle { Some(OracleConfig::from_env()?) } else { None };
    if let Some(cfg) = &cfg {
        cfg.check(&params)?;
    }
    let group = Metacyclic::new(params.clone());
    let mut rec = ReportRecord::new(&params, None);
    let dprime = derived_subgroup(&group);
    let z = center(&group);
    let cx = centralizer_of_x(&group);
    let cy = centralizer_of_y(&group);
    let classes = class_count(&params)?;
    rec.value("order", params.order());
    rec.value("derived_subgroup", subgroup_text(&dprime));
    rec.value("center", subgroup_text(&z));
    rec.value("centralizer_x", subgroup_text(&cx));
    rec.value("centralizer_y", subgroup_text(&cy));
    rec.value("class_count", &classes);
    if params.is_minimal_nonabelian() {
        rec.value("k(D)", k_of_d(&params)?);
        let degrees: Vec<String> = irr_degree_multiset(&params)?.iter().map(|(d, k)| format!("{d} x{k}")).collect();
        rec.value("irr_degrees", degrees.join(", "));
    }

    if let Some(cfg) = &cfg {
        let mut compare = |name: &str, closed: &Subgroup<T>, oracle: Subgroup<T>| -> Result<(), CliError> {
            let same = closed.same_elements(&oracle, &group, cfg)? && closed.invariant_factors() == oracle.invariant_factors();
            rec.check(name, same, format!("oracle order {}", oracle.order));
            Ok(())
        };
        compare("derived_subgroup", &dprime, derived_subgroup_oracle(&group, cfg)?)?;
        compare("center", &z, center_oracle(&group, cfg)?)?;
        compare("centralizer_x", &cx, centralizer(&group, &group.x(), cfg)?)?;
        compare("centralizer_y", &cy, centralizer(&group, &group.y(), cfg)?)?;
        let oracle = conjugacy_classes(&group, ClassMode::Oracle, cfg)?;
        let mut same = T::from_usize(oracle.len()) == Some(classes.clone())
            && oracle.iter().all(|c| {
                let (rep, modulus) = class_of(&group, &c.representative);
                rep == c.representative
                    && c.size.clone() * modulus == *params.p_pow_m()
                    && c.members.iter().flatten().all(|u| class_of(&group, u).0 == rep)
            });
        if params.is_minimal_nonabelian() {
            let closed = conjugacy_classes(&group, ClassMode::ClosedForm, cfg)?;
            same &= closed.len() == oracle.len()
                && closed.iter().zip(&oracle).all(|(c, o)| c.representative == o.representative && c.size == o.size);
        }
        rec.check("class_partition", same, format!("{} oracle classes", oracle.len()));
    }

    let ok = rec.passed();
    emit_records(std::slice::from_ref(&rec), a.format, out)?;
    if cfg.is_some() && a.format == Format::Text {
        writeln!(out, "closed-form = oracle: {}", if ok { "OK" } else { "MISMATCH" })?;
    }
    Ok(ok)
}

fn block_params<T: Exact>(a: &BlockArgs) -> Result<GroupParams<T>, CliError> {
    let params = params::<T>(&a.group)?;
    params.require_minimal_nonabelian()?;
    Ok(params)
}

fn invariants<T: Exact>(a: &BlockArgs, out: &mut dyn Write) -> Outcome {
    let params = block_params::<T>(a)?;
    let inv = invariants_reduction(&params, a.e)?;
    let mut rec = ReportRecord::new(&params, Some(a.e)).with_invariants(&inv);
    rec.value("basis", inv.basis.describe());
    for c in bounds_check(&params, &inv, None)?.checks {
        rec.check(c.name, c.pass, c.to_string());
    }
    let (ratio, per_brauer) = malle_navarro_check(&params, a.e)?;
    rec.check("malle_navarro_k_le_p_k0", ratio, "k <= p k0");
    rec.check("malle_navarro_k_le_kD", per_brauer, "k/l <= k <= k(D)");
    if let Some(stated) = stated_invariants(&params, a.e) {
        let s = stated?;
        rec.check("family_statement", (&s.k, &s.k0, &s.k1, &s.l) == (&inv.k, &inv.k0, &inv.k1, &inv.l), inv.basis.describe());
    }
    emit_records(std::slice::from_ref(&rec), a.format, out)?;
    Ok(rec.passed())
}

fn fusion<T: Exact>(a: &FusionArgs, out: &mut dyn Write) -> Outcome {
    let params = block_params::<T>(&a.block)?;
    let e = a.block.e;
    let cfg = if a.oracle { Some(OracleConfig::from_env()?) } else { None };
    if let Some(cfg) = &cfg {
        cfg.check(&params)?;
    }
    let group = Metacyclic::new(params.clone());
    let fusion = make_fusion(&group, e)?;
    let focal = focal_subgroup(&group, &fusion);
    let split = orbit_split_count(&params, e)?;
    let ledger = subsection_ledger(&params, e)?;
    let mut rec = ReportRecord::new(&params, Some(e));
    rec.value("alpha", format!("x -> x^{}, y -> y", fusion.r));
    rec.value("focal_subgroup", subgroup_text(&focal));
    rec.value("classes_meeting_y", params.p_pow_n());
    rec.value("free_orbits", &split);
    rec.value("k-l", &ledger.k_minus_l);

    if let Some(cfg) = &cfg {
        rec.check("alpha_automorphism", alpha_is_automorphism(&group, &fusion, cfg)?, format!("r = {}", fusion.r));
        let j = outer_order_oracle(&group, &fusion, cfg)?;
        rec.check("outer_order", j == e, format!("{j}"));
        let oracle_focal = focal_subgroup_oracle(&group, &fusion, cfg)?;
        rec.check("focal_subgroup", focal.same_elements(&oracle_focal, &group, cfg)?, format!("oracle order {}", oracle_focal.order));
        let census = f_classes(&group, &fusion, ClassMode::Oracle, cfg)?;
        let closed = f_classes(&group, &fusion, ClassMode::ClosedForm, cfg)?;
        let fixed = census.iter().filter(|c| c.orbit.len() == 1).count();
        let free = census.len() - fixed;
        let lengths = census.iter().all(|c| c.orbit.len() == 1 || c.orbit.len() as u64 == e);
        let counts = if e == 1 { true } else { T::from_usize(fixed).as_ref() == Some(params.p_pow_n()) && T::from_usize(free) == Some(split.clone()) };
        rec.check("fusion_census", census == closed && lengths && counts, format!("{} F-classes, {fixed} fixed, {free} free", census.len()));
    }
    let ok = rec.passed();
    emit_records(std::slice::from_ref(&rec), a.block.format, out)?;
    if cfg.is_some() && a.block.format == Format::Text {
        writeln!(out, "closed-form = oracle: {}", if ok { "OK" } else { "MISMATCH" })?;
    }
    Ok(ok)
}

fn faulty_k1() -> Arc<InvariantFn> {
    Arc::new(|params: &GroupParams<Wide>, e: u64| {
        let mut inv = invariants_reduction(params, e)?;
        inv.k1 += 1;
        Ok(inv)
    })
}

fn verify(a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let grid = match a.sweep.as_deref() {
        Some(&[p, m, n]) => {
            let small = |v: u64, what: &str| u32::try_from(v).map_err(|_| Error::InvalidInput(format!("{what} = {v} is too large")));
            SweepGrid::bounded(p, small(m, "MMAX")?, small(n, "NMAX")?)?
        }
        _ => SweepGrid::default(),
    };
    if a.jobs == 0 {
        return Err(Error::InvalidInput("--jobs must be at least 1".into()).into());
    }
    let cfg = SweepConfig {
        grid,
        oracle: if a.skip_oracle { None } else { Some(OracleConfig::from_env()?) },
        jobs: a.jobs,
        evaluator: match a.inject_fault {
            Some(Fault::K1) => faulty_k1(),
            None => default_evaluator(),
        },
    };
    let started = Instant::now();
    let report = run_sweep(&cfg)?;
    writeln!(err, "verify: {} checks in {:.2?}", report.total_checks(), started.elapsed())?;

    match a.format {
        Format::Text => {
            let tally = report.tally();
            let width = tally.keys().map(|k| k.len()).max().unwrap_or(5).max(5);
            writeln!(out, "{:width$}  {:>8}  {:>8}", "check", "passed", "failed")?;
            for (name, t) in &tally {
                writeln!(out, "{name:width$}  {:>8}  {:>8}", t.passed, t.failed)?;
            }
            let groups = report.points.iter().filter(|p| p.e.is_none()).count();
            writeln!(out, "total: {} checks at {} groups and {} blocks", report.total_checks(), groups, report.points.len() - groups)?;
        }
        format => {
            let records: Vec<ReportRecord> = report.points.iter().map(ReportRecord::from_point).collect();
            emit_records(&records, format, out)?;
        }
    }
    if let Some((point, check)) = report.first_failure() {
        let line = format!("first failure: {} {}: {}", point.label(), check.name, check.detail);
        if a.format == Format::Text {
            writeln!(out, "{line}")?;
        }
        writeln!(err, "{line}")?;
        return Ok(false);
    }
    Ok(true)
}

fn require<V: Copy>(v: Option<V>, flag: &str, which: &str) -> Result<V, CliError> {
    v.ok_or_else(|| Error::InvalidInput(format!("--which {which} needs --{flag}")).into())
}

fn replay<T: Exact>(a: &ReplayArgs, out: &mut dyn Write) -> Outcome {
    let chain = |which: &str| -> Result<(GroupParams<T>, u64), CliError> {
        let g = GroupArgs { p: require(a.p, "p", which)?, m: require(a.m, "m", which)?, n: require(a.n, "n", which)?, l: None };
        let params = params::<T>(&g)?;
        Ok((params, require(a.e, "e", which)?))
    };
    let range = |default: (u64, u64)| -> Vec<u64> {
        match (a.p, a.range.as_deref()) {
            (Some(p), _) => vec![p],
            (None, Some(&[lo, hi])) => odd_primes(lo, hi),
            _ => odd_primes(default.0, default.1),
        }
    };
    let mut text_tail = Vec::new();
    let records: Vec<CertificateRecord> = match a.which {
        Replay::Amc => {
            let (params, e) = chain("amc")?;
            vec![CertificateRecord::from(&replay_amc(&params, e)?)]
        }
        Replay::K2 => {
            let (params, e) = chain("k2")?;
            vec![CertificateRecord::from(&replay_k2(&params, e)?)]
        }
        Replay::P5 => p5_height_screen().iter().map(CertificateRecord::from).collect(),
        Replay::Primes => {
            let certs = range((5, 31)).into_iter().filter(|&p| p >= 5).map(prime_screen).collect::<Result<Vec<_>, _>>()?;
            let pick = |feasible: bool| certs.iter().filter(|c| c.is_feasible() == feasible).map(prime_of).collect::<Vec<_>>();
            text_tail.push(format!("infeasible: {:?}", pick(false)));
            text_tail.push(format!("feasible: {:?}", pick(true)));
            certs.iter().map(CertificateRecord::from).collect()
        }
        Replay::TwoSquares => {
            let certs = range((3, 100)).into_iter().map(two_squares_screen).collect::<Result<Vec<_>, _>>()?;
            let agree = certs.iter().filter(|c| c.is_feasible() == (prime_of(c) % 4 == 1)).count();
            text_tail.push(format!("verdict = (p mod 4 = 1): {agree}/{}", certs.len()));
            if agree != certs.len() {
                return finish_replay(&certs.iter().map(CertificateRecord::from).collect::<Vec<_>>(), &text_tail, a.format, out).map(|_| false);
            }
            certs.iter().map(CertificateRecord::from).collect()
        }
    };
    finish_replay(&records, &text_tail, a.format, out)
}

fn prime_of(c: &Certificate<i64>) -> i64 {
    c.parameters.iter().find(|(k, _)| k == "p").map(|(_, v)| *v).unwrap_or_default()
}

fn finish_replay(records: &[CertificateRecord], tail: &[String], format: Format, out: &mut dyn Write) -> Outcome {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, records)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["claim", "kind", "parameters", "witness", "certified"])?;
            for r in records {
                let list = |v: &[crate::report::NamedValue]| v.iter().map(|x| format!("{}={}", x.name, x.value)).collect::<Vec<_>>().join(";");
                let witness = r.witness.as_deref().map(list).unwrap_or_default();
                w.write_record([r.claim.clone(), r.kind.clone(), list(&r.parameters), witness, r.certified.to_string()])?;
            }
            w.flush()?;
        }
        Format::Text => {
            for r in records {
                write!(out, "{}", r.render())?;
            }
            for line in tail {
                writeln!(out, "{line}")?;
            }
        }
    }
    Ok(records.iter().all(|r| r.certified))
}

fn oracle(a: &OracleArgs, out: &mut dyn Write) -> Outcome {
    let params = params::<Wide>(&a.group)?;
    let cfg = OracleConfig::from_env()?;
    cfg.check(&params)?;
    let sweep = SweepConfig { oracle: Some(cfg), ..SweepConfig::new(SweepGrid::default()) };
    let points = check_point(&params, a.e, &sweep)?;
    let records: Vec<ReportRecord> = points.iter().map(ReportRecord::from_point).collect();
    emit_records(&records, a.format, out)?;
    Ok(records.iter().all(ReportRecord::passed))
}
