use num_integer::Integer;
use serde_json::json;
use toeplitz_core::builder::{assemble_eta, refine_growth, toeplitz_report, BuildError};
use toeplitz_core::factor::{fiber_report, verify_lemma5, verify_semiconjugacy, FactorError, FactorMap, OrbitSample};
use toeplitz_core::format;
use toeplitz_core::odometer::OdometerError;
use toeplitz_core::period::{
    aperiodic_positions, build_periodic_structure, essential_reduce, period_table, PeriodError, Witness,
};
use toeplitz_core::sequence::{materialize, recurrence_gaps};
use toeplitz_core::{EtaConstruction, Odometer, PeriodicStructure, SequenceRule};

use crate::report::{brief, Config, Report, Status};

/// Block at the origin whose returns are reported by `analyze`.
const RECURRENCE_BLOCK: i64 = 8;
const SHOWN: usize = 12;
const HINT: &str = "raise --radius or --depth";

fn period_status(e: &PeriodError) -> Status {
    match e {
        PeriodError::ReductionMismatch { .. } => Status::Violation,
        _ => Status::Inconclusive,
    }
}

fn build_status(e: &BuildError) -> Status {
    match e {
        BuildError::BadChain { .. } | BuildError::ShiftDivisibility { .. } => Status::Violation,
        BuildError::Period(e) => period_status(e),
        _ => Status::Inconclusive,
    }
}

fn fail(report: &mut Report, status: Status, error: impl std::fmt::Display) {
    let message = error.to_string();
    report.line(format!("error: {message}"));
    if status == Status::Inconclusive {
        report.line(format!("hint: {HINT}"));
        report.result("hint", HINT);
    }
    report.result("error", message);
    report.escalate(status);
}

fn candidates(config: &Config) -> Vec<usize> {
    (1..=config.period_cap).collect()
}

/// The structure truncated to `depth`, or the failure recorded in `report`.
fn structure(x: &SequenceRule, config: &Config, report: &mut Report) -> Option<PeriodicStructure> {
    match build_periodic_structure(x, &candidates(config), config.radius) {
        Ok(ps) => Some(ps.truncated(config.depth)),
        Err(PeriodError::NoGrowthEvidence(growth)) => {
            report.result("growth", &growth);
            report.line("no growth of M_q over the candidate periods:");
            for point in &growth.series {
                if let (Some(q), Some(m)) = (point.lcm, point.max_block) {
                    report.line(format!("  p {:>4}  q {:>6}  M {m}", point.candidate, q));
                }
            }
            fail(report, Status::Inconclusive, PeriodError::NoGrowthEvidence(growth));
            None
        }
        Err(e) => {
            fail(report, period_status(&e), e);
            None
        }
    }
}

fn construct(x: &SequenceRule, ps: &PeriodicStructure, config: &Config) -> Result<EtaConstruction, BuildError> {
    let chain = refine_growth(ps)?;
    assemble_eta(x, &chain, config.radius)
}

fn structure_lines(report: &mut Report, ps: &PeriodicStructure) {
    report.line(format!("{:>8} {:>8} {:>6} {:>6}", "q", "M_q", "raw", "k"));
    for e in &ps.entries {
        report.line(format!(
            "{:>8} {:>8} {:>6} {:>6}",
            e.period,
            e.max_block.to_string(),
            e.raw,
            e.reduced
        ));
    }
}

pub fn analyze(x: &SequenceRule, config: &Config) -> Report {
    let mut report = Report::new("analyze");
    let rows = match period_table(x, config.period_cap, config.radius) {
        Ok(rows) => rows,
        Err(e) => {
            fail(&mut report, period_status(&e), e);
            return report;
        }
    };
    report.line(format!("radius {}, periods 1..={}", config.radius, config.period_cap));
    report.line(format!("{:>5} {:>6} {:>6} {:>5} {:>5}  domain", "p", "|dom|", "M_p", "ess", "k"));
    for row in &rows {
        report.line(format!(
            "{:>5} {:>6} {:>6} {:>5} {:>5}  {}",
            row.period,
            row.domain_size,
            row.max_block.to_string(),
            if row.essential { "yes" } else { "no" },
            row.reduced.map_or("-".to_owned(), |k| k.to_string()),
            row.domain_mask
        ));
    }
    report.result("periods", &rows);

    let aperiodic = aperiodic_positions(x, config.period_cap, config.radius).expect("cap checked above");
    report.line(format!("aperiodic positions: {}", brief(&aperiodic, SHOWN)));
    report.result("aperiodic", &aperiodic);
    report.observe("aperiodic_empty", aperiodic.is_empty());

    match recurrence_gaps(x, 0, RECURRENCE_BLOCK, config.radius / 2) {
        Ok(rec) => {
            report.line(format!(
                "returns of x[0, {RECURRENCE_BLOCK}) within {}: {}, largest gap {}",
                rec.search_radius,
                rec.occurrences.len(),
                rec.max_gap.map_or("-".to_owned(), |g| g.to_string())
            ));
            report.result(
                "recurrence",
                json!({
                    "block": [rec.block_lo, rec.block_hi],
                    "search_radius": rec.search_radius,
                    "returns": rec.occurrences.len(),
                    "max_gap": rec.max_gap,
                }),
            );
        }
        Err(e) => fail(&mut report, Status::Inconclusive, e),
    }

    let growth = match build_periodic_structure(x, &candidates(config), config.radius) {
        Ok(ps) => Some(ps.report),
        Err(PeriodError::NoGrowthEvidence(growth)) => Some(*growth),
        Err(_) => None,
    };
    if let Some(growth) = growth {
        let kept: Vec<String> = growth
            .series
            .iter()
            .filter_map(|p| Some(format!("M_{} = {}", p.lcm?, p.max_block?)))
            .collect();
        report.line(format!("growth series: {}", kept.join(", ")));
        report.line("(finite-range growth is a heuristic, not a proof)");
        report.observe("growth_witnessed", growth.growth_witnessed);
        report.observe("periodic", growth.periodic);
        report.result("growth", &growth);
    }
    report
}

pub fn structure_cmd(x: &SequenceRule, config: &Config) -> Report {
    let mut report = Report::new("structure");
    if let Some(ps) = structure(x, config, &mut report) {
        structure_lines(&mut report, &ps);
        report.observe("periodic", ps.report.periodic);
        report.observe("growth_witnessed", ps.report.growth_witnessed);
        report.result("structure", &ps);
    }
    report
}

pub fn eta(x: &SequenceRule, config: &Config, out: Option<&std::path::Path>) -> Report {
    let mut report = Report::new("eta");
    let Some(ps) = structure(x, config, &mut report) else {
        return report;
    };
    let c = match construct(x, &ps, config) {
        Ok(c) => c,
        Err(e) => {
            fail(&mut report, build_status(&e), e);
            return report;
        }
    };
    report.line(format!("chain: {:?}", c.chain.levels()));
    report.line(format!(
        "{:>6} {:>6} {:>8} {:>8} {:>8}  coverage",
        "q", "M", "anchor", "offset", "shift"
    ));
    for l in &c.levels {
        report.line(format!(
            "{:>6} {:>6} {:>8} {:>8} {:>8}  [{}, {}]",
            l.period,
            l.max_block,
            l.anchor,
            l.offset.map_or("-".to_owned(), |o| o.s.to_string()),
            l.shift,
            l.coverage.0,
            l.coverage.1
        ));
    }
    let (lo, hi) = c.certified;
    let window = c.eta.render(lo, hi);
    report.line(format!("certified window [{lo}, {hi}):"));
    report.line(&window);
    report.result("construction", &c);
    report.result("eta_window", json!({ "lo": lo, "hi": hi, "symbols": window }));

    report.check("divisibility", c.verdicts.divisibility);
    report.check("consistency", c.verdicts.consistency);
    report.check("coverage", c.verdicts.coverage);
    report.check("inclusion", c.verdicts.inclusion);
    match toeplitz_report(x, &c, config.radius) {
        Ok(t) => {
            report.check("toeplitz_on_certified", t.toeplitz_on_certified());
            report.result("toeplitz", &t);
        }
        Err(e) => fail(&mut report, build_status(&e), e),
    }

    if let Some(path) = out {
        match format::to_string(&c.eta) {
            Ok(text) => match std::fs::write(path, text) {
                Ok(()) => {
                    report.line(format!("eta written to {}", path.display()));
                    report.result("eta_file", path.display().to_string());
                }
                Err(e) => fail(&mut report, Status::Violation, format!("{}: {e}", path.display())),
            },
            Err(e) => fail(&mut report, Status::Violation, e),
        }
    }
    report
}

pub fn factor(x: &SequenceRule, config: &Config) -> Report {
    let mut report = Report::new("factor");
    let Some(ps) = structure(x, config, &mut report) else {
        return report;
    };
    let map = match FactorMap::new(x, &ps, config.radius) {
        Ok(m) => m,
        Err(e) => {
            fail(&mut report, Status::Violation, e);
            return report;
        }
    };
    report.line(format!("moduli: {:?}", map.periods()));

    let mut sample = OrbitSample::shifts(x, config.t_max);
    // at depth D shifts that differ by a multiple of n_D share an address, so
    // fibers are read off shifts with |t| < n_D / 2 only
    let reach = config.t_max.min((map.odometer().moduli().top() - 1) / 2);
    let mut fiber_sample = OrbitSample::shifts(x, reach);
    match construct(x, &ps, config) {
        Ok(c) => {
            sample.push("eta", c.eta.clone()).expect("same alphabet");
            fiber_sample.push("eta", c.eta).expect("same alphabet");
        }
        Err(e) => report.line(format!("no eta in the sample: {e}")),
    }
    let addresses: Vec<serde_json::Value> = sample
        .points()
        .iter()
        .map(|(label, y)| match map.address(y) {
            Ok(a) => json!({ "point": label, "address": a.to_string() }),
            Err(e) => json!({ "point": label, "error": e.to_string() }),
        })
        .collect();
    for a in addresses.iter().filter(|a| a["point"] == "eta" || a["point"] == "S^0" || a["point"] == "S^1") {
        match (&a["address"], &a["error"]) {
            (serde_json::Value::String(s), _) => report.line(format!("address({}) = {s}", a["point"].as_str().unwrap())),
            (_, e) => report.line(format!("address({}): {e}", a["point"].as_str().unwrap())),
        }
    }
    report.result("addresses", &addresses);

    let run = || -> Result<_, FactorError> {
        Ok((
            verify_semiconjugacy(x, &ps, config.t_max, config.radius)?,
            verify_lemma5(x, &ps, &sample, config.radius)?,
            fiber_report(x, &ps, &fiber_sample, config.radius)?,
        ))
    };
    let (semi, classes, fibers) = match run() {
        Ok(r) => r,
        Err(e) => {
            fail(&mut report, Status::Violation, e);
            return report;
        }
    };
    report.line(format!(
        "semiconjugacy: {} addresses checked, {} failures",
        semi.checked,
        semi.address_failures.len() + semi.step_failures.len()
    ));
    report.line(format!(
        "partition classes: {} levels over {} points",
        classes.levels.len(),
        sample.len()
    ));
    let shared: Vec<_> = fibers.groups.iter().filter(|g| g.distinct > 1).collect();
    report.line(format!(
        "fiber groups over shifts |t| <= {reach}: {} ({} with several distinct points)",
        fibers.groups.len(),
        shared.len()
    ));
    for g in shared.iter().take(SHOWN) {
        report.line(format!("  {} <- {:?} differ at {}", g.address, g.members, brief(&g.disagreements, SHOWN)));
    }
    if let Some(g) = fibers.group_of("S^0") {
        report.line(format!("x: {}", g.verdict.describe()));
        report.observe("x_consistent_with_toeplitz", g.verdict.describe() == "consistent with Toeplitz");
    }
    report.line(format!("note: {}", fibers.note));
    report.check("semiconjugacy", semi.passed());
    report.check("partition", classes.passed());
    report.result("semiconjugacy", &semi);
    report.result("partition", &classes);
    report.result("fibers", &fibers);
    report
}

/// Runs every invariant check that applies to `x`.
pub fn verify(x: &SequenceRule, config: &Config) -> Report {
    let mut report = Report::new("verify");
    let cap = config.period_cap;
    let witness = match Witness::new(x, config.radius) {
        Ok(w) => w,
        Err(e) => {
            fail(&mut report, period_status(&e), e);
            return report;
        }
    };
    let skeletons: Vec<_> = (1..=cap).map(|p| witness.skeleton(p).expect("radius >= 2 cap")).collect();

    let mut monotone = true;
    for p in 1..=cap {
        for q in (2 * p..=cap).step_by(p) {
            let (sp, sq) = (&skeletons[p - 1], &skeletons[q - 1]);
            monotone &= sp.domain().all(|r| (r..q).step_by(p).all(|n| sq.get(n) == sp.get(r)));
            monotone &= sp.max_block() <= sq.max_block();
        }
    }
    report.line(format!("divisor monotonicity up to {cap}: {}", ok(monotone)));
    report.check("divisor_monotonicity", monotone);

    let mut reduction = true;
    for (p, sk) in (1..=cap).zip(&skeletons) {
        if sk.is_empty() {
            continue;
        }
        reduction &= match essential_reduce(x, p, config.radius) {
            Ok(r) => p % r.k == 0 && r.k == sk.stabilizer(),
            Err(_) => false,
        };
        for q in 1..=cap {
            if sk.is_shift_stable(q as i64) {
                let g = p.gcd(&q);
                reduction &= skeletons[g - 1].lift(p).is_some_and(|l| l.same_map(sk));
            }
        }
    }
    report.line(format!("essential reduction and gcd rule: {}", ok(reduction)));
    report.check("reduction", reduction);

    let Some(ps) = structure(x, config, &mut report) else {
        return report;
    };
    let valid = PeriodicStructure::from_levels(&ps.entries.iter().map(|e| (e.period, e.max_block)).collect::<Vec<_>>())
        .is_ok();
    report.line(format!("structure {:?}: {}", ps.periods(), ok(valid)));
    report.check("structure", valid);

    match Odometer::from_moduli(ps.periods().iter().map(|&p| p as u64).collect()) {
        Ok(od) => {
            let mut passed = true;
            let mut checked = 0;
            for level in 1..=od.depth() {
                match od.verify_partition(level, 0) {
                    Ok(v) => {
                        passed &= v.passed();
                        checked += 1;
                    }
                    Err(OdometerError::TooLarge { .. }) => break,
                    Err(_) => passed = false,
                }
            }
            report.line(format!("periodic partitions, {checked} levels: {}", ok(passed)));
            report.check("periodic_partitions", passed);
        }
        Err(e) => {
            report.line(format!("odometer: {e}"));
            report.check("periodic_partitions", false);
        }
    }

    match construct(x, &ps, config) {
        Ok(c) => {
            let v = &c.verdicts;
            let built = v.divisibility && v.consistency && v.coverage && v.inclusion;
            let toeplitz = toeplitz_report(x, &c, config.radius).is_ok_and(|t| t.toeplitz_on_certified());
            let round_trip = format::to_string(&c.eta)
                .ok()
                .and_then(|text| format::parse(&text).ok())
                .is_some_and(|y| materialize(&y, c.certified.0, c.certified.1).ok() == c.certified_window().ok());
            report.line(format!("eta construction: {}", ok(built && toeplitz)));
            report.line(format!("eta file round trip: {}", ok(round_trip)));
            report.check("eta", built && toeplitz);
            report.check("eta_round_trip", round_trip);
        }
        Err(e) => {
            report.line(format!("eta construction skipped: {e}"));
            report.escalate(build_status(&e));
        }
    }

    let semi = verify_semiconjugacy(x, &ps, config.t_max, config.radius);
    let sample = OrbitSample::shifts(x, config.t_max);
    let classes = verify_lemma5(x, &ps, &sample, config.radius);
    let semi_ok = semi.is_ok_and(|v| v.passed());
    let classes_ok = classes.is_ok_and(|v| v.passed());
    report.line(format!("semiconjugacy for |t| <= {}: {}", config.t_max, ok(semi_ok)));
    report.line(format!("partition classes on the shift sample: {}", ok(classes_ok)));
    report.check("semiconjugacy", semi_ok);
    report.check("partition", classes_ok);
    report
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAILED"
    }
}
