//! One line per acceptance criterion. Runs without the libtest harness so the
//! lines always reach the terminal; exits non-zero when any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use amnesia::gdl::{parse_game, serialize_game};
use amnesia::models::{
    arrow, bargaining, concession_cdf, concession_deadline, corpus, entry, indifference_hazard, mafia, monopolist,
};
use amnesia::recall::{classify_recall, RecallClass, Witness};
use amnesia::xform::{apply_x, validate_x_properties, ForgetSpec, XGame};
use amnesia::{build_game, Game, NodeSpec, PlayerId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: amnesia::Error) -> String {
    e.to_string()
}

fn monopolist() -> Outcome {
    let r = monopolist::reproduce(100).map_err(err)?;
    let memory = r.value("memory.revenue");
    let forgetful = r.value("forgetful.revenue");
    ensure((memory - 0.45).abs() <= 0.02, || format!("memory revenue {memory:.4}"))?;
    ensure((forgetful - 0.50).abs() <= 0.02, || format!("forgetful revenue {forgetful:.4}"))?;
    ensure(forgetful > memory, || "forgetful does not beat memory".into())?;
    ensure(r.value("memory.pbe") == 1.0, || format!("pbe regret {:.3e}", r.value("memory.pbe_max_regret")))?;
    Ok(format!("memory {memory:.4}, forgetful {forgetful:.4}, pbe regret {:.1e}", r.value("memory.pbe_max_regret")))
}

fn closed_forms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let pi = rng.gen_range(0.01..0.99);
        let beta = rng.gen_range(0.01..0.99);
        let t = concession_deadline(pi, beta).map_err(err)?;
        let gap = (concession_cdf(t, beta).map_err(err)? - (1.0 - pi)).abs();
        worst = worst.max(gap);
    }
    ensure(worst <= 1e-12, || format!("F(T) off by {worst:.2e}"))?;
    let beta = 0.5;
    let v = bargaining::VALUE;
    let lambda = indifference_hazard(v - bargaining::HIGH, v - bargaining::LOW, beta).map_err(err)?;
    ensure((lambda - beta / 3.0).abs() <= f64::EPSILON * beta, || format!("hazard {lambda} vs {}", beta / 3.0))?;
    Ok(format!("max |F(T) - (1 - pi)| = {worst:.1e}, hazard = {lambda}"))
}

fn bargaining_x() -> Outcome {
    let r = bargaining::reproduce(0.1, 0.5, 0.25).map_err(err)?;
    ensure(r.value("x.hold_out_is_nash") == 1.0, || format!("X profile regret {}", r.value("x.max_regret")))?;
    let eps: Vec<f64> = [0.5, 0.25, 0.125].iter().map(|h| r.value(&format!("no_x.regret_dt_{h}"))).collect();
    ensure(eps.windows(2).all(|w| w[1] < w[0]), || format!("no-X regrets {eps:?}"))?;
    Ok(format!("X regret {:.4}, no-X regrets {:.2e} > {:.2e} > {:.2e}", r.value("x.max_regret"), eps[0], eps[1], eps[2]))
}

fn mafia() -> Outcome {
    let r = mafia::reproduce(3, 0.2).map_err(err)?;
    for n in 1..=3 {
        for key in ["reputation_profile_is_nash", "x_spe_always_accept_low"] {
            ensure(r.value(&format!("n{n}.{key}")) == 1.0, || format!("N = {n}: {key} fails"))?;
        }
    }
    Ok("reputation profile Nash and X SPE accept low for N = 1, 2, 3".into())
}

fn entry() -> Outcome {
    let r = entry::reproduce(0.9).map_err(err)?;
    ensure(r.value("spe_count") == 2.0, || format!("{} pure SPE", r.value("spe_count")))?;
    ensure(r.value("no_entry_eliminated") == 1.0, || "no-entry survives weak dominance".into())?;
    ensure(r.value("x_no_entry_is_nash") == 1.0, || "no-entry is not Nash with X".into())?;
    let q = r.value("q_star");
    ensure(q > 0.0 && q < 1.0, || format!("threshold {q}"))?;
    Ok(format!("2 pure SPE, no-entry eliminated, q* = {q:.3}"))
}

fn golden_fig1_right() -> Result<(), String> {
    let golden = include_str!("golden/fig1_right.efx");
    let built = apply_x(&corpus::fig1_left(), &corpus::fig1_spec()).map_err(err)?.game.renamed("fig1-right");
    let parsed = parse_game(golden).map_err(|e| e.to_string())?;
    ensure(serialize_game(&built) == golden.trim_end(), || "canonical text differs from the golden file".into())?;
    ensure(serialize_game(&parsed) == golden.trim_end(), || "golden file is not canonical".into())
}

fn tampered(g: &Game, spec: &ForgetSpec, history: &[&str], set: &str) -> Result<XGame, String> {
    let mut xg = apply_x(g, spec).map_err(err)?;
    let n = xg.game.find_history(history).ok_or("missing history")?;
    xg.game = xg.game.with_node_in_infoset(n, set);
    Ok(xg)
}

/// Hand-broken partitions, each violating a single property.
fn adversarial() -> Result<Vec<(&'static str, Game, XGame)>, String> {
    let fig1 = corpus::fig1_left();
    let merged = tampered(&fig1, &corpus::fig1_spec(), &["B"], "I2A")?;
    let pennies = corpus::matching_pennies();
    let split = tampered(&pennies, &ForgetSpec::new("P2"), &["T", "X"], "split")?;
    let leaf = |x: f64| NodeSpec::payoffs(&[x]);
    let stage2 = NodeSpec::decision("P", "J", vec![("c", leaf(0.0)), ("d", leaf(1.0))]);
    let two = build_game("two-stage", &["P"], NodeSpec::decision("P", "I", vec![("a", stage2), ("b", leaf(2.0))]))
        .map_err(err)?;
    let timed = tampered(&two, &ForgetSpec::new("P"), &["a", "X"], "late")?;
    Ok(vec![("p1", fig1, merged), ("p2", pennies, split), ("p5", two, timed)])
}

fn x_transform() -> Outcome {
    golden_fig1_right()?;
    let r = validate_x_properties(&corpus::fig1_left(), &apply_x(&corpus::fig1_left(), &corpus::fig1_spec()).map_err(err)?)
        .map_err(err)?;
    ensure(r.all_pass(), || format!("fig1 fails {:?}", r.failing()))?;
    for (want, g, xg) in adversarial()? {
        let r = validate_x_properties(&g, &xg).map_err(err)?;
        ensure(r.failing() == [want], || format!("expected only {want} to fail, got {:?}", r.failing()))?;
        let check = r.checks().into_iter().find(|(n, _)| *n == want).unwrap().1;
        ensure(check.witness.is_some(), || format!("{want} failure has no witness"))?;
    }
    Ok("golden match, five properties hold, p1/p2/p5 adversaries caught with witnesses".into())
}

fn recall() -> Outcome {
    for g in corpus::perfect_information() {
        for p in 0..g.players().len() {
            let c = classify_recall(&g, PlayerId(p)).map_err(err)?.classification;
            ensure(c == RecallClass::Perfect, || format!("{} player {p}: {c:?}", g.name()))?;
        }
    }
    let right = corpus::fig1_right();
    let c = classify_recall(&right, right.player_id("P2").map_err(err)?).map_err(err)?.classification;
    ensure(matches!(c, RecallClass::Imperfect { forgets_knowledge: true, .. }), || format!("fig1 right P2: {c:?}"))?;
    let driver = corpus::absent_minded_driver();
    let r = classify_recall(&driver, PlayerId(0)).map_err(err)?;
    ensure(r.classification == RecallClass::AbsentMinded, || format!("driver: {:?}", r.classification))?;
    ensure(!r.order_irreflexive, || "driver order reported irreflexive".into())?;
    ensure(r.witnesses.iter().any(|w| matches!(w, Witness::AbsentMinded { .. })), || "no absent-minded witness".into())?;
    Ok("perfect information, forgets knowledge and absent-minded driver all classified".into())
}

fn property_gates() -> Outcome {
    for seed in 0..200 {
        common::check_multilinearity(seed)?;
        common::check_reach_conservation(seed)?;
        common::check_utility_oracle(seed)?;
    }
    common::check_kuhn(100)?;
    let corpus = common::full_corpus();
    for g in &corpus {
        common::check_round_trip(g)?;
    }
    Ok(format!("200 games x 3 gates, 100 Kuhn games, {} corpus round trips", corpus.len()))
}

fn arrow() -> Outcome {
    let r = arrow::reproduce().map_err(err)?;
    let with_x = r.value("x.trade_spe_count");
    let without = r.value("no_x.trade_spe_count");
    ensure(with_x >= 1.0 && without == 0.0, || format!("trade SPE: {with_x} with X, {without} without"))?;
    Ok(format!("trade SPE: {with_x} with X, {without} without"))
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Outcome); 9] = [
        ("monopolist revenues and PBE", 10, monopolist),
        ("bargaining closed forms", 1, closed_forms),
        ("bargaining X equilibrium", 60, bargaining_x),
        ("mafia reputation and X", 30, mafia),
        ("entry game", 10, entry),
        ("X transform correctness", 1, x_transform),
        ("recall suite", 1, recall),
        ("property gates", 120, property_gates),
        ("information sale", 10, arrow),
    ];
    let mut failed = 0;
    for (k, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let slow = took > Duration::from_secs(*limit);
        let (ok, detail) = match outcome {
            Ok(d) if slow => (false, format!("{d}; over the time limit")),
            Ok(d) => (true, d),
            Err(e) => (false, e),
        };
        failed += !ok as usize;
        println!(
            "criterion {} {:<28} {} ({:.2} s of {} s) {}",
            k + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            limit,
            detail
        );
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
