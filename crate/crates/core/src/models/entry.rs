//! Market entry followed by a simultaneous choice of segment.
//!
//! Entry costs 2. After entry both firms pick the main or the niche segment
//! without seeing each other's choice: picking the same segment earns
//! nothing, otherwise the main segment earns 6 and the niche 3. Without
//! entry the entrant keeps 2 and the incumbent earns 4.
//!
//! In the variant with forgetting, chance first decides whether the entrant
//! has always been in the market (no entry stage, no entry cost). The
//! incumbent's X pools its segment choice across both cases.

use super::report::{Provenance, ReproductionReport};
use crate::equilibrium::{
    continuation_values, enumerate_pure_spe, is_epsilon_nash, iterated_weak_dominance, pure_best_responses,
    to_normal_form, BehavioralProfile,
};
use crate::error::{Error, Result};
use crate::game::{build_game, Game, NodeSpec};
use crate::xform::{apply_x, ForgetSpec, XGame};

pub const ENTRANT: &str = "Entrant";
pub const INCUMBENT: &str = "Incumbent";
pub const ENTRY_COST: f64 = 2.0;
pub const OUTSIDE: [f64; 2] = [2.0, 4.0];

/// Gross segment payoffs as (entrant, incumbent).
pub fn segment_payoff(entrant_main: bool, incumbent_main: bool) -> (f64, f64) {
    match (entrant_main, incumbent_main) {
        (true, false) => (6.0, 3.0),
        (false, true) => (3.0, 6.0),
        _ => (0.0, 0.0),
    }
}

fn segments(entrant_set: &str, incumbent_set: &str, cost: f64) -> NodeSpec {
    let inc = |em: bool| {
        let leaf = |im: bool| {
            let (e, i) = segment_payoff(em, im);
            NodeSpec::payoffs(&[e - cost, i])
        };
        NodeSpec::decision(INCUMBENT, incumbent_set, vec![("Main", leaf(true)), ("Niche", leaf(false))])
    };
    NodeSpec::decision(ENTRANT, entrant_set, vec![("Main", inc(true)), ("Niche", inc(false))])
}

fn entry_stage() -> NodeSpec {
    NodeSpec::decision(
        ENTRANT,
        "E",
        vec![("Enter", segments("ES", "IS", ENTRY_COST)), ("Out", NodeSpec::payoffs(&OUTSIDE))],
    )
}

pub fn game() -> Game {
    build_game("entry", &[ENTRANT, INCUMBENT], entry_stage()).expect("entry game is valid")
}

/// With probability `q` the entrant is already in the market.
pub fn game_with_incumbency(q: f64) -> Result<Game> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!("in-market probability {q} outside (0, 1)")));
    }
    build_game(
        "entry-or-incumbent",
        &[ENTRANT, INCUMBENT],
        NodeSpec::chance(vec![("in", q, segments("ESin", "ISin", 0.0)), ("new", 1.0 - q, entry_stage())]),
    )
}

pub fn forget_spec() -> ForgetSpec {
    ForgetSpec::new(INCUMBENT).class("IS", "seg").class("ISin", "seg")
}

/// The incumbency variant after the incumbent has committed to forgetting.
pub fn x_game(q: f64) -> Result<XGame> {
    Ok(apply_x(&game_with_incumbency(q)?, &forget_spec())?.committed())
}

/// The entrant stays out and takes the niche when in the market; the
/// incumbent takes the main segment.
pub fn no_entry_profile(g: &Game) -> BehavioralProfile {
    let mut s = BehavioralProfile::uniform(g);
    for set in g.infosets() {
        let want: &[&str] =
            if g.player_name(set.player) == ENTRANT { &["Out", "Niche"] } else { &["Main", "X"] };
        let a = set.actions.iter().find(|a| want.contains(&a.as_str())).unwrap_or(&set.actions[0]).clone();
        s.set_pure(g, &set.label, &a).expect("labels come from the game");
    }
    s
}

/// Forward-induction test of the no-entry profile: an entrant who enters
/// signals that it will take the main segment. The profile survives when
/// the incumbent's best replies to that signal still make entry
/// unprofitable.
pub fn survives_forward_induction(q: f64) -> Result<bool> {
    let xg = x_game(q)?;
    let g = &xg.game;
    let base = no_entry_profile(g);
    let mut dev = base.clone();
    dev.set_pure(g, "E", "Enter")?;
    dev.set_pure(g, "ES", "Main")?;
    let inc = g.player_id(INCUMBENT)?;
    let ent = g.player_id(ENTRANT)?;
    let new = g.child_by_label(g.root(), "new").expect("entry branch");
    let stay_out = continuation_values(g, &base, new)?[ent.0];
    let (_, replies) = pure_best_responses(g, &dev, inc)?;
    for r in replies {
        let entered = continuation_values(g, &dev.with_pure(g, &r), new)?[ent.0];
        if entered > stay_out + crate::TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Smallest in-market probability, to within `tol`, at which the no-entry
/// profile survives forward induction.
pub fn forward_induction_threshold(tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (1e-3, 1.0 - 1e-3);
    if survives_forward_induction(lo)? {
        return Ok(lo);
    }
    while hi - lo > tol {
        let mid = (lo + hi) / 2.0;
        if survives_forward_induction(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo + hi) / 2.0)
}

pub fn reproduce(q: f64) -> Result<ReproductionReport> {
    let mut r = ReproductionReport::new("entry");
    let g = game();
    let spe = enumerate_pure_spe(&g)?;
    r.compare("spe_count", spe.len() as f64, 2.0, 0.0, Provenance::Quoted);
    let nf = to_normal_form(&g)?;
    let iwd = iterated_weak_dominance(&nf);
    let ent = &iwd.survivor_labels[0];
    let inc = &iwd.survivor_labels[1];
    r.check("fi_survivor_enter_main", ent == &["Enter/Main".to_string()], Provenance::Derived);
    r.check("fi_incumbent_niche", inc == &["Niche".to_string()], Provenance::Derived);
    r.check("no_entry_eliminated", ent.iter().all(|s| !s.starts_with("Out")), Provenance::Quoted);
    r.record("iwd_rounds", iwd.rounds as f64);

    let xg = x_game(q)?;
    let s = no_entry_profile(&xg.game);
    let nash = is_epsilon_nash(&xg.game, &s, crate::TOL)?;
    r.check("x_no_entry_is_nash", nash.pass, Provenance::Quoted);
    let qstar = forward_induction_threshold(0.01)?;
    r.compare("q_star", qstar, 1.0 / 3.0, 0.01, Provenance::Derived);
    r.record("q", q);
    r.check("x_no_entry_survives_forward_induction", survives_forward_induction(q)? == (q >= qstar), Provenance::Quoted);
    if q < qstar {
        r.note(format!("q = {q} is below the threshold {qstar:.3}; no-entry fails forward induction there"));
    }
    r.note("segment payoffs are a reconstruction consistent with the stated entry cost and outside payoffs");
    Ok(r)
}
