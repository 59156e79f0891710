//! Experience sequences and recall classification.
//!
//! A player's experience at a history is the list of their own information
//! sets met on the root path together with the action taken at each. The
//! player has perfect recall when experience is constant on every one of
//! their information sets. When it is not, the failure is split into
//! forgetting own actions, forgetting knowledge, and absent-mindedness
//! (one information set met twice on a single path).

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{Game, InfosetId, NodeId, PlayerId};

/// One step of an experience: the information set met and, unless it is the
/// current one, the label of the action taken there.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Step {
    pub infoset: InfosetId,
    pub action: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ExperienceSequence {
    pub steps: Vec<Step>,
}

/// The `>_p` relation on a player's information sets.
///
/// `pairs` holds `(later, earlier)`: some history in `later` strictly extends
/// some history in `earlier`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderReport {
    pub pairs: BTreeSet<(InfosetId, InfosetId)>,
    pub transitive: bool,
    pub irreflexive: bool,
    /// `(a, b, c)` with `a` after `b` and `b` after `c` but not `a` after `c`.
    pub intransitive_witness: Option<(InfosetId, InfosetId, InfosetId)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum RecallClass {
    Perfect,
    Imperfect { forgets_actions: bool, forgets_knowledge: bool },
    AbsentMinded,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "finding")]
pub enum Witness {
    /// Two histories of one information set with different experiences.
    Experience { infoset: InfosetId, first: NodeId, other: NodeId },
    /// Two histories of one information set with different own-action records.
    Actions { infoset: InfosetId, first: NodeId, other: NodeId },
    /// A terminal reachable from `later` but excluded at `earlier`.
    Knowledge { later: InfosetId, earlier: InfosetId, terminal: NodeId },
    /// `earlier` and `later` lie on one path in the same information set.
    AbsentMinded { infoset: InfosetId, earlier: NodeId, later: NodeId },
    Intransitive { a: InfosetId, b: InfosetId, c: InfosetId },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecallReport {
    pub player: String,
    pub classification: RecallClass,
    pub order_transitive: bool,
    pub order_irreflexive: bool,
    pub witnesses: Vec<Witness>,
}

fn check_player(g: &Game, p: PlayerId) -> Result<()> {
    if p.0 >= g.players().len() {
        return Err(Error::UnknownPlayer(format!("#{}", p.0)));
    }
    Ok(())
}

/// Experience of `p` along the root path of `n`, including `n`'s own
/// information set (without an action) when `p` moves at `n`.
pub fn experience_sequence(g: &Game, p: PlayerId, n: NodeId) -> Result<ExperienceSequence> {
    check_player(g, p)?;
    g.check_node(n)?;
    let path = g.path(n);
    let mut steps = Vec::new();
    for (k, &v) in path.iter().enumerate() {
        if let Some((owner, set)) = g.decision(v) {
            if owner == p {
                let action = path.get(k + 1).map(|&c| g.action_label(c).to_string());
                steps.push(Step { infoset: set, action });
            }
        }
    }
    Ok(ExperienceSequence { steps })
}

/// Labels of `p`'s own actions along the path to `n`.
fn own_actions(g: &Game, p: PlayerId, n: NodeId) -> Vec<String> {
    let path = g.path(n);
    path.windows(2)
        .filter(|w| matches!(g.decision(w[0]), Some((o, _)) if o == p))
        .map(|w| g.action_label(w[1]).to_string())
        .collect()
}

/// Computes `>_p` over all pairs of `p`'s information sets.
pub fn infoset_order(g: &Game, p: PlayerId) -> Result<OrderReport> {
    check_player(g, p)?;
    let mut pairs = BTreeSet::new();
    // Walk the tree keeping the multiset of p's infosets on the current path.
    let mut on_path: HashMap<InfosetId, usize> = HashMap::new();
    let mut stack = vec![(g.root(), false)];
    while let Some((v, leaving)) = stack.pop() {
        let mine = match g.decision(v) {
            Some((o, s)) if o == p => Some(s),
            _ => None,
        };
        if leaving {
            if let Some(s) = mine {
                let c = on_path.get_mut(&s).expect("entered before leaving");
                *c -= 1;
                if *c == 0 {
                    on_path.remove(&s);
                }
            }
            continue;
        }
        if let Some(s) = mine {
            for &earlier in on_path.keys() {
                pairs.insert((s, earlier));
            }
            *on_path.entry(s).or_insert(0) += 1;
        }
        stack.push((v, true));
        for &c in g.node(v).children.iter().rev() {
            stack.push((c, false));
        }
    }
    let irreflexive = pairs.iter().all(|(a, b)| a != b);
    let mut after: HashMap<InfosetId, Vec<InfosetId>> = HashMap::new();
    for &(a, b) in &pairs {
        after.entry(a).or_default().push(b);
    }
    let mut intransitive_witness = None;
    'outer: for &(a, b) in &pairs {
        if let Some(cs) = after.get(&b) {
            for &c in cs {
                if !pairs.contains(&(a, c)) {
                    intransitive_witness = Some((a, b, c));
                    break 'outer;
                }
            }
        }
    }
    Ok(OrderReport {
        transitive: intransitive_witness.is_none(),
        irreflexive,
        pairs,
        intransitive_witness,
    })
}

/// First pair of nodes on one path that share an information set of `p`.
pub fn absent_minded_witness(g: &Game, p: PlayerId) -> Option<(InfosetId, NodeId, NodeId)> {
    let mut on_path: HashMap<InfosetId, Vec<NodeId>> = HashMap::new();
    let mut stack = vec![(g.root(), false)];
    while let Some((v, leaving)) = stack.pop() {
        let mine = match g.decision(v) {
            Some((o, s)) if o == p => Some(s),
            _ => None,
        };
        if leaving {
            if let Some(s) = mine {
                on_path.get_mut(&s).map(|l| l.pop());
            }
            continue;
        }
        if let Some(s) = mine {
            let list = on_path.entry(s).or_default();
            if let Some(&first) = list.first() {
                return Some((s, first, v));
            }
            list.push(v);
        }
        stack.push((v, true));
        for &c in g.node(v).children.iter().rev() {
            stack.push((c, false));
        }
    }
    None
}

/// A terminal under `m` that lies under no member of `earlier`.
fn uncovered_terminal(g: &Game, m: NodeId, earlier: &[NodeId]) -> Option<NodeId> {
    if earlier.iter().any(|&e| g.in_subtree(e, m)) {
        return None;
    }
    let mut stack = vec![m];
    while let Some(v) = stack.pop() {
        if earlier.contains(&v) {
            continue;
        }
        if g.is_terminal(v) {
            return Some(v);
        }
        stack.extend(g.node(v).children.iter().copied());
    }
    None
}

/// Classifies `p`'s recall and collects a witness for every negative finding.
pub fn classify_recall(g: &Game, p: PlayerId) -> Result<RecallReport> {
    let order = infoset_order(g, p)?;
    let mut witnesses = Vec::new();

    let absent = absent_minded_witness(g, p);
    if let Some((infoset, earlier, later)) = absent {
        witnesses.push(Witness::AbsentMinded { infoset, earlier, later });
    }
    if let Some((a, b, c)) = order.intransitive_witness {
        witnesses.push(Witness::Intransitive { a, b, c });
    }

    let mut perfect = true;
    let mut forgets_actions = false;
    for set_id in g.infosets_of(p) {
        let members = &g.infoset(set_id).members;
        let first = members[0];
        let x0 = experience_sequence(g, p, first)?;
        let a0 = own_actions(g, p, first);
        let mut exp_done = false;
        let mut act_done = false;
        for &m in &members[1..] {
            if !exp_done && experience_sequence(g, p, m)? != x0 {
                perfect = false;
                exp_done = true;
                witnesses.push(Witness::Experience { infoset: set_id, first, other: m });
            }
            if !act_done && own_actions(g, p, m) != a0 {
                forgets_actions = true;
                act_done = true;
                witnesses.push(Witness::Actions { infoset: set_id, first, other: m });
            }
        }
    }

    let mut forgets_knowledge = false;
    for &(later, earlier) in &order.pairs {
        if later == earlier {
            continue;
        }
        let earlier_members = &g.infoset(earlier).members;
        for &m in &g.infoset(later).members {
            if let Some(t) = uncovered_terminal(g, m, earlier_members) {
                forgets_knowledge = true;
                witnesses.push(Witness::Knowledge { later, earlier, terminal: t });
                break;
            }
        }
    }

    let classification = if absent.is_some() {
        RecallClass::AbsentMinded
    } else if perfect && order.transitive {
        RecallClass::Perfect
    } else {
        RecallClass::Imperfect { forgets_actions, forgets_knowledge }
    };
    Ok(RecallReport {
        player: g.player_name(p).to_string(),
        classification,
        order_transitive: order.transitive,
        order_irreflexive: order.irreflexive,
        witnesses,
    })
}

/// Experience is constant on every information set of `p`.
pub fn has_perfect_recall(g: &Game, p: PlayerId) -> bool {
    classify_recall(g, p).map(|r| r.classification == RecallClass::Perfect).unwrap_or(false)
}

pub fn is_absent_minded(g: &Game, p: PlayerId) -> bool {
    absent_minded_witness(g, p).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::corpus;
    use crate::xform::{apply_x, ForgetSpec};

    #[test]
    fn experience_of_p2_after_a() {
        let g = corpus::fig1_left();
        let p2 = g.player_id("P2").unwrap();
        let n = g.find_history(&["A"]).unwrap();
        let x = experience_sequence(&g, p2, n).unwrap();
        assert_eq!(x.steps, vec![Step { infoset: g.infoset_id("I2A").unwrap(), action: None }]);
    }

    #[test]
    fn experience_at_own_root() {
        let g = corpus::fig1_left();
        let p1 = g.player_id("P1").unwrap();
        let x = experience_sequence(&g, p1, g.root()).unwrap();
        assert_eq!(x.steps.len(), 1);
        assert_eq!(x.steps[0].action, None);
    }

    #[test]
    fn one_player_chain_experience() {
        let g = corpus::one_player_chain();
        let p = PlayerId(0);
        let n = g.find_history(&["L", "R"]).unwrap();
        let x = experience_sequence(&g, p, n).unwrap();
        let labels: Vec<_> = x
            .steps
            .iter()
            .map(|s| (g.infoset(s.infoset).label.as_str(), s.action.as_deref()))
            .collect();
        assert_eq!(labels, vec![("I1", Some("L")), ("I2", Some("R")), ("I3", None)]);
    }

    #[test]
    fn unknown_inputs() {
        let g = corpus::fig1_left();
        assert!(experience_sequence(&g, PlayerId(7), g.root()).is_err());
        assert!(experience_sequence(&g, PlayerId(0), NodeId(70)).is_err());
    }

    #[test]
    fn chain_order_is_strict() {
        let g = corpus::two_move_chain();
        let r = infoset_order(&g, PlayerId(0)).unwrap();
        assert_eq!(r.pairs.len(), 1);
        assert!(r.transitive && r.irreflexive);
    }

    #[test]
    fn driver_order_is_reflexive() {
        let g = corpus::absent_minded_driver();
        let r = infoset_order(&g, PlayerId(0)).unwrap();
        let i = g.infoset_id("I").unwrap();
        assert!(r.pairs.contains(&(i, i)));
        assert!(!r.irreflexive);
        assert!(r.transitive);
    }

    #[test]
    fn fig1_right_order() {
        let g = corpus::fig1_left();
        let spec = ForgetSpec::new("P2").class("I2A", "m").class("I2B", "m");
        let xg = apply_x(&g, &spec).unwrap();
        let p2 = xg.game.player_id("P2").unwrap();
        let r = infoset_order(&xg.game, p2).unwrap();
        // Exhaustive: every pair is (merged, pre-X infoset).
        let merged = xg.game.infoset_id("X@P2:m").unwrap();
        let expected: BTreeSet<_> = ["I2A", "I2B"]
            .iter()
            .map(|l| (merged, xg.game.infoset_id(l).unwrap()))
            .collect();
        assert_eq!(r.pairs, expected);
        assert!(r.transitive && r.irreflexive);
    }

    #[test]
    fn perfect_information_is_perfect() {
        let g = corpus::fig1_left();
        for p in 0..2 {
            let r = classify_recall(&g, PlayerId(p)).unwrap();
            assert_eq!(r.classification, RecallClass::Perfect);
            assert!(r.witnesses.is_empty());
        }
    }

    #[test]
    fn fig1_right_forgets_knowledge() {
        let g = corpus::fig1_left();
        let spec = ForgetSpec::new("P2").class("I2A", "m").class("I2B", "m");
        let xg = apply_x(&g, &spec).unwrap();
        let p2 = xg.game.player_id("P2").unwrap();
        let r = classify_recall(&xg.game, p2).unwrap();
        assert_eq!(
            r.classification,
            RecallClass::Imperfect { forgets_actions: false, forgets_knowledge: true }
        );
        assert!(r.witnesses.iter().any(|w| matches!(w, Witness::Knowledge { .. })));
    }

    #[test]
    fn driver_is_absent_minded() {
        let g = corpus::absent_minded_driver();
        let r = classify_recall(&g, PlayerId(0)).unwrap();
        assert_eq!(r.classification, RecallClass::AbsentMinded);
        assert!(!r.order_irreflexive);
        assert!(r.witnesses.iter().any(|w| matches!(w, Witness::AbsentMinded { .. })));
    }

    #[test]
    fn forgetting_own_action() {
        let g = corpus::forgets_own_move();
        let r = classify_recall(&g, PlayerId(0)).unwrap();
        assert_eq!(
            r.classification,
            RecallClass::Imperfect { forgets_actions: true, forgets_knowledge: false }
        );
    }
}
