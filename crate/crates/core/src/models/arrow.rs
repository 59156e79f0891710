//! Selling information that the buyer can inspect before paying.
//!
//! Chance draws one of four states. The seller knows it. The buyer may ask
//! to see it; the seller reveals or hides. After inspecting, the buyer
//! accepts (pays 1) or rejects (pays nothing), and then chooses A or B.
//! Matching the state is worth 2 in the first two states; in the last two
//! both choices are worth 1 and the seller can resell the information
//! elsewhere for a constant 0.5. A buyer who never saw the state earns 1,
//! the value of either choice under the prior.
//!
//! Without forgetting a rejecting buyer keeps what it saw, so it never
//! pays and no trade happens. With X the buyer forgets the state after a
//! rejection, which makes paying worthwhile when the state matters.

use std::collections::BTreeSet;

use super::report::{Provenance, ReproductionReport};
use crate::equilibrium::{enumerate_pure_spe, reach_probabilities, BehavioralProfile, PureProfile};
use crate::error::Result;
use crate::game::{build_game, Game, NodeSpec};
use crate::xform::{apply_x, validate_x_properties, ForgetSpec, XGame};

pub const BUYER: &str = "Buyer";
pub const SELLER: &str = "Seller";
pub const STATES: usize = 4;
pub const FEE: f64 = 1.0;
pub const RESALE: f64 = 0.5;
pub const UNINFORMED: f64 = 1.0;

/// Buyer's payoff from choosing A or B in state `w` (0-based).
pub fn match_value(w: usize, chose_a: bool) -> f64 {
    match (w, chose_a) {
        (0, true) | (1, false) => 2.0,
        (0, false) | (1, true) => 0.0,
        _ => 1.0,
    }
}

fn outside(w: usize) -> f64 {
    if w >= 2 {
        RESALE
    } else {
        0.0
    }
}

fn choose(set: String, w: usize, paid: f64) -> NodeSpec {
    let leaf = |a: bool| NodeSpec::payoffs(&[match_value(w, a) - paid, paid + outside(w)]);
    NodeSpec::decision(BUYER, set, vec![("A", leaf(true)), ("B", leaf(false))])
}

fn state(w: usize) -> NodeSpec {
    let i = w + 1;
    let uninformed = NodeSpec::payoffs(&[UNINFORMED, outside(w)]);
    // Where both choices pay the same, a buyer who paid has nothing left to decide.
    let know = if w >= 2 {
        NodeSpec::payoffs(&[match_value(w, true) - FEE, FEE + outside(w)])
    } else {
        choose(format!("Know_w{i}"), w, FEE)
    };
    let inspect = NodeSpec::decision(
        BUYER,
        format!("Inspect_w{i}"),
        vec![("Accept", know), ("Reject", choose(format!("Ret_w{i}"), w, 0.0))],
    );
    let seller = NodeSpec::decision(
        SELLER,
        format!("S_w{i}"),
        // The revealed state is the content of the message, so it is part of
        // the action label.
        vec![(format!("Reveal_w{i}"), inspect), ("Hide".into(), uninformed.clone())],
    );
    NodeSpec::decision(BUYER, "B0", vec![("Ask", seller), ("Skip", uninformed)])
}

pub fn game() -> Game {
    let p = 1.0 / STATES as f64;
    build_game(
        "arrow",
        &[BUYER, SELLER],
        NodeSpec::chance((0..STATES).map(|w| (format!("w{}", w + 1), p, state(w))).collect()),
    )
    .expect("arrow game is valid")
}

/// X before asking; what was seen is pooled after a rejection.
pub fn forget_spec() -> ForgetSpec {
    (1..=STATES).fold(ForgetSpec::new(BUYER).sites(["B0"]), |s, i| s.class(&format!("Ret_w{i}"), "ret"))
}

pub fn x_game() -> Result<XGame> {
    apply_x(&game(), &forget_spec())
}

/// Whether the buyer pays with positive probability under `pure`.
pub fn has_trade(g: &Game, pure: &PureProfile) -> Result<bool> {
    let reach = reach_probabilities(g, &BehavioralProfile::from_pure(g, pure))?;
    Ok(g.node_ids().any(|n| reach[n.0] > 0.0 && g.node(n).parent.is_some() && g.action_label(n) == "Accept"))
}

/// Terminal distribution of a pure profile, with terminals named by their
/// history in the original game.
fn outcome(g: &Game, pure: &PureProfile, strip: impl Fn(crate::NodeId) -> crate::NodeId) -> Result<Vec<(usize, u64)>> {
    let reach = reach_probabilities(g, &BehavioralProfile::from_pure(g, pure))?;
    let mut out: Vec<(usize, u64)> =
        g.terminals().filter(|t| reach[t.0] > 0.0).map(|t| (strip(t).0, (reach[t.0] * 1e9).round() as u64)).collect();
    out.sort_unstable();
    Ok(out)
}

pub fn reproduce() -> Result<ReproductionReport> {
    let mut r = ReproductionReport::new("arrow");
    let g = game();
    let xg = x_game()?;
    r.check("x_properties", validate_x_properties(&g, &xg)?.all_pass(), Provenance::Derived);

    let plain = enumerate_pure_spe(&g)?;
    let with_x = enumerate_pure_spe(&xg.game)?;
    let mut plain_trade = 0;
    let mut plain_out = BTreeSet::new();
    for s in &plain {
        plain_trade += has_trade(&g, s)? as usize;
        plain_out.insert(outcome(&g, s, |n| n)?);
    }
    let mut x_trade = 0;
    let mut x_out = BTreeSet::new();
    for s in &with_x {
        x_trade += has_trade(&xg.game, s)? as usize;
        x_out.insert(outcome(&xg.game, s, |n| xg.strip(n))?);
    }
    r.record("no_x.spe_count", plain.len() as f64);
    r.record("x.spe_count", with_x.len() as f64);
    r.compare("no_x.trade_spe_count", plain_trade as f64, 0.0, 0.0, Provenance::Reconstructed);
    r.check("x.has_trade_spe", x_trade >= 1, Provenance::Reconstructed);
    r.record("x.trade_spe_count", x_trade as f64);
    r.check("x.adds_outcomes", x_out.difference(&plain_out).next().is_some(), Provenance::Reconstructed);
    r.record("no_x.outcomes", plain_out.len() as f64);
    r.record("no_x.outcomes_kept_under_x", plain_out.intersection(&x_out).count() as f64);
    r.note("payoffs and protocol are a reconstruction; only the qualitative claim is targeted");
    r.note("outcomes in which the buyer earns less than X guarantees do not survive once X is available");
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let g = game();
        assert_eq!(g.infoset(g.infoset_id("B0").unwrap()).members.len(), 4);
        assert!(g.infoset_id("Know_w3").is_err());
        assert_eq!(g.infoset(g.infoset_id("Ret_w3").unwrap()).members.len(), 1);
    }

    #[test]
    fn rejection_is_forgotten_after_x() {
        let xg = x_game().unwrap();
        let ret = xg.game.infoset_id("X@Buyer:ret").unwrap();
        assert_eq!(xg.game.infoset(ret).members.len(), 4);
    }
}
