//! Extortion of a sequence of business owners by a mafia of unknown type.
//!
//! Each owner offers a high or a low amount; the mafia accepts or kills.
//! A reckless mafia kills after every low offer and accepts high ones; its
//! moves are chance moves with a single outcome. Owners see everything that
//! happened to earlier owners unless they collectively forget it.

use super::report::{Provenance, ReproductionReport};
use crate::equilibrium::{enumerate_pure_spe, is_epsilon_nash, reach_probabilities, BehavioralProfile};
use crate::error::{Error, Result};
use crate::game::{build_game, Game, NodeSpec, PlayerId};
use crate::xform::{apply_x_multi, validate_x_properties, ForgetSpec, XGame};

pub const MAFIA: &str = "Mafia";

/// Stage payoffs as (mafia, owner).
pub fn stage_payoff(offer_high: bool, accepted: bool) -> (f64, f64) {
    match (offer_high, accepted) {
        (true, true) => (2.0, -2.0),
        (false, true) => (1.0, -1.0),
        (_, false) => (0.0, -5.0),
    }
}

/// The one-shot game with simultaneous moves: the owner offers, the mafia
/// responds without seeing the offer.
pub fn stage_game() -> Game {
    let respond = |high: bool| {
        let leaf = |acc: bool| {
            let (m, o) = stage_payoff(high, acc);
            NodeSpec::payoffs(&[m, o])
        };
        NodeSpec::decision(MAFIA, "M", vec![("Accept", leaf(true)), ("Kill", leaf(false))])
    };
    build_game(
        "mafia-stage",
        &[MAFIA, "Owner"],
        NodeSpec::decision("Owner", "O", vec![("High", respond(true)), ("Low", respond(false))]),
    )
    .expect("stage game is valid")
}

pub fn owner_name(k: usize) -> String {
    format!("O{k}")
}

fn owner_label(k: usize, hist: &str) -> String {
    if hist.is_empty() {
        owner_name(k)
    } else {
        format!("O{k}_{hist}")
    }
}

/// History codes: `H`/`L` for the offer, then `A`/`K` for the response.
fn stage(k: usize, n: usize, hist: &str, reckless: bool, acc: &[f64]) -> NodeSpec {
    if k > n {
        return NodeSpec::payoffs(acc);
    }
    let offer = |high: bool| {
        let o = if high { 'H' } else { 'L' };
        let after = |accepted: bool| {
            let (m, w) = stage_payoff(high, accepted);
            let mut next = acc.to_vec();
            next[0] += m;
            next[k] += w;
            let h = format!("{hist}{o}{}", if accepted { 'A' } else { 'K' });
            stage(k + 1, n, &h, reckless, &next)
        };
        if reckless {
            let label = if high { "Accept" } else { "Kill" };
            NodeSpec::chance(vec![(label, 1.0, after(high))])
        } else {
            NodeSpec::decision(MAFIA, format!("M{k}_{hist}{o}"), vec![("Accept", after(true)), ("Kill", after(false))])
        }
    };
    NodeSpec::decision(owner_name(k), owner_label(k, hist), vec![("High", offer(true)), ("Low", offer(false))])
}

/// `n` owners in sequence; the mafia is reckless with probability `p`.
pub fn game(n: usize, p: f64) -> Result<Game> {
    if !(1..=6).contains(&n) {
        return Err(Error::Domain(format!("owners {n} outside 1..=6")));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(Error::Domain(format!("reckless probability {p} outside [0, 1)")));
    }
    let mut players = vec![MAFIA.to_string()];
    players.extend((1..=n).map(owner_name));
    let zero = vec![0.0; n + 1];
    let root = if p == 0.0 {
        stage(1, n, "", false, &zero)
    } else {
        NodeSpec::chance(vec![("reckless", p, stage(1, n, "", true, &zero)), ("rational", 1.0 - p, stage(1, n, "", false, &zero))])
    };
    build_game(&format!("mafia-{n}"), &players, root)
}

/// Every owner pools all of their information sets.
pub fn forget_specs(g: &Game) -> Vec<ForgetSpec> {
    (1..g.players().len())
        .map(|k| {
            let p = PlayerId(k);
            g.infosets_of(p)
                .into_iter()
                .fold(ForgetSpec::new(g.player_name(p)), |s, i| s.class(&g.infoset(i).label, "all"))
        })
        .collect()
}

/// The game after every owner has taken X.
pub fn x_game(n: usize, p: f64) -> Result<XGame> {
    let g = game(n, p)?;
    Ok(apply_x_multi(&g, &forget_specs(&g))?.committed())
}

fn no_low_accepted(hist: &str) -> bool {
    !hist.contains("LA")
}

/// Owners offer high and the mafia kills after low offers until a low offer
/// has been accepted; from then on owners offer low and the mafia accepts.
pub fn reputation_profile(g: &Game) -> BehavioralProfile {
    let mut s = BehavioralProfile::uniform(g);
    for set in g.infosets() {
        let label = set.label.as_str();
        let hist = label.split_once('_').map_or("", |(_, h)| h);
        let action = if label.starts_with('M') {
            let (past, offer) = hist.split_at(hist.len() - 1);
            if offer == "L" && no_low_accepted(past) {
                "Kill"
            } else {
                "Accept"
            }
        } else if no_low_accepted(hist) {
            "High"
        } else {
            "Low"
        };
        s.set_pure(g, label, action).expect("labels come from the game");
    }
    s
}

/// Node where the rational mafia's part of the game starts.
fn rational_root(g: &Game) -> crate::game::NodeId {
    g.child_by_label(g.root(), "rational").unwrap_or(g.root())
}

pub fn reproduce(max_owners: usize, p: f64) -> Result<ReproductionReport> {
    let mut r = ReproductionReport::new("mafia");
    for n in 1..=max_owners {
        let g = game(n, p)?;
        let rep = reputation_profile(&g);
        let nash = is_epsilon_nash(&g, &rep, crate::TOL)?;
        r.check(&format!("n{n}.reputation_profile_is_nash"), nash.pass, Provenance::Quoted);

        let xg = x_game(n, p)?;
        let props = validate_x_properties(&g, &xg)?;
        r.check(&format!("n{n}.x_properties"), props.all_pass(), Provenance::Derived);
        let spe = enumerate_pure_spe(&xg.game)?;
        r.record(&format!("n{n}.x_spe_count"), spe.len() as f64);
        let mut all_accept_low = !spe.is_empty();
        for pure in &spe {
            let sigma = BehavioralProfile::from_pure(&xg.game, pure);
            let reach = reach_probabilities(&xg.game, &sigma)?;
            for v in xg.game.node_ids() {
                if reach[v.0] == 0.0 {
                    continue;
                }
                if let Some((pl, i)) = xg.game.decision(v) {
                    let set = xg.game.infoset(i);
                    let chosen = set.actions[pure.choice[i.0]].as_str();
                    let ok = if pl == PlayerId(0) { chosen == "Accept" } else { set.actions.len() == 1 || chosen == "Low" };
                    all_accept_low &= ok;
                }
            }
        }
        r.check(&format!("n{n}.x_spe_always_accept_low"), all_accept_low, Provenance::Quoted);

        if n == 1 {
            let owner = PlayerId(1);
            let no_x = crate::equilibrium::continuation_values(&g, &rep, rational_root(&g))?[owner.0];
            r.compare("n1.owner_payoff_no_x", no_x, -2.0, crate::TOL, Provenance::Quoted);
            if let Some(first) = spe.first() {
                let sigma = BehavioralProfile::from_pure(&xg.game, first);
                let with_x = crate::equilibrium::continuation_values(&xg.game, &sigma, rational_root(&xg.game))?[owner.0];
                r.compare("n1.owner_payoff_with_x", with_x, -1.0, crate::TOL, Provenance::Quoted);
            }
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::expected_utilities;
    use crate::recall::has_perfect_recall;

    #[test]
    fn stage_payoffs_match_the_matrix() {
        let g = stage_game();
        let mut s = BehavioralProfile::uniform(&g);
        s.set_pure(&g, "O", "High").unwrap();
        s.set_pure(&g, "M", "Accept").unwrap();
        assert_eq!(expected_utilities(&g, &s).unwrap(), vec![2.0, -2.0]);
        s.set_pure(&g, "O", "Low").unwrap();
        s.set_pure(&g, "M", "Kill").unwrap();
        assert_eq!(expected_utilities(&g, &s).unwrap(), vec![0.0, -5.0]);
    }

    #[test]
    fn single_owner_without_reckless_type() {
        let g = game(1, 0.0).unwrap();
        assert_eq!(g.players(), &["Mafia", "O1"]);
        assert_eq!(g.infosets().len(), 3);
        assert_eq!(g.terminals().count(), 4);
    }

    #[test]
    fn owners_have_perfect_recall_before_forgetting() {
        let g = game(3, 0.2).unwrap();
        for p in 0..g.players().len() {
            assert!(has_perfect_recall(&g, PlayerId(p)));
        }
        let xg = x_game(3, 0.2).unwrap();
        for k in 1..=3 {
            let p = xg.game.player_id(&owner_name(k)).unwrap();
            let pooled: Vec<_> =
                xg.game.infosets_of(p).into_iter().filter(|&i| xg.game.infoset(i).actions.len() > 1).collect();
            assert_eq!(pooled.len(), 1, "owner {k}");
        }
    }

    #[test]
    fn reputation_holds_on_path() {
        let g = game(2, 0.2).unwrap();
        let s = reputation_profile(&g);
        let o2 = g.infoset_id("O2_HA").unwrap();
        assert_eq!(g.infoset(o2).actions[s.get(o2).iter().position(|&q| q == 1.0).unwrap()], "High");
        let m = g.infoset_id("M2_LAL").unwrap();
        assert_eq!(s.get(m)[0], 1.0);
    }
}
