use super::nash::is_nash_in_subgame;
use super::{BehavioralProfile, Concept, EquilibriumReport, PureProfile};
use crate::error::{Error, Result};
use crate::game::{Game, NodeId, NodeKind};

const POOLED_CAP: f64 = 1e7;
const CANDIDATE_CAP: usize = 1_000_000;
const TIE: f64 = 1e-9;

/// Roots of subgames, in node order. The game root is always first.
///
/// A node starts a subgame when it is not terminal, its information set (if
/// any) is a singleton, and every information set meeting its subtree lies
/// entirely inside it.
pub fn find_subgames(g: &Game) -> Vec<NodeId> {
    let k = g.infosets().len();
    let mut lo = vec![usize::MAX; k];
    let mut hi = vec![0usize; k];
    for (i, set) in g.infosets().iter().enumerate() {
        for &m in &set.members {
            lo[i] = lo[i].min(g.tin(m));
            hi[i] = hi[i].max(g.tin(m));
        }
    }
    // Smallest and largest entry time over all sets touching each subtree.
    let mut span_lo = vec![usize::MAX; g.len()];
    let mut span_hi = vec![0usize; g.len()];
    for v in g.node_ids().collect::<Vec<_>>().into_iter().rev() {
        if let Some((_, i)) = g.decision(v) {
            span_lo[v.0] = lo[i.0];
            span_hi[v.0] = hi[i.0];
        }
        for &c in &g.node(v).children {
            span_lo[v.0] = span_lo[v.0].min(span_lo[c.0]);
            span_hi[v.0] = span_hi[v.0].max(span_hi[c.0]);
        }
    }
    g.node_ids()
        .filter(|&v| {
            if g.is_terminal(v) {
                return false;
            }
            if v == g.root() {
                return true;
            }
            if let Some((_, i)) = g.decision(v) {
                if g.infoset(i).members.len() > 1 {
                    return false;
                }
            }
            span_lo[v.0] == usize::MAX || (span_lo[v.0] >= g.tin(v) && span_hi[v.0] < g.tout(v))
        })
        .collect()
}

/// Checks that `sigma` is a Nash equilibrium of every subgame.
pub fn check_spe(g: &Game, sigma: &BehavioralProfile, eps: f64) -> Result<EquilibriumReport> {
    sigma.check(g)?;
    let mut regrets: Vec<(String, f64)> = g.players().iter().map(|p| (p.clone(), 0.0)).collect();
    let mut witnesses = Vec::new();
    let mut notes = Vec::new();
    for root in find_subgames(g) {
        let r = is_nash_in_subgame(g, sigma, root, eps)?;
        for (acc, (_, x)) in regrets.iter_mut().zip(&r.regrets) {
            acc.1 = acc.1.max(*x);
        }
        if !r.pass {
            let at = g.history(root).join(" ");
            notes.push(format!("not a Nash equilibrium below [{at}]"));
            for mut w in r.witnesses {
                w.at.get_or_insert_with(|| format!("[{at}]"));
                witnesses.push(w);
            }
        }
    }
    let pass = regrets.iter().all(|(_, r)| *r <= eps);
    Ok(EquilibriumReport { concept: Concept::Spe, epsilon: eps, regrets, pass, witnesses, notes })
}

/// All pure subgame perfect equilibria, sorted.
///
/// Choices at information sets with several members are enumerated; the
/// remaining choices are filled in by backward induction, branching on
/// ties. Every candidate is then checked for Nash play in every subgame at
/// tolerance 1e-9. Because of the backward induction step, each returned
/// profile also chooses optimally at every singleton information set, so
/// the result is the set of pure SPE with that extra refinement.
pub fn enumerate_pure_spe(g: &Game) -> Result<Vec<PureProfile>> {
    let pooled: Vec<usize> =
        (0..g.infosets().len()).filter(|&i| g.infosets()[i].members.len() > 1).collect();
    let combos: f64 = pooled.iter().map(|&i| g.infosets()[i].actions.len() as f64).product();
    if combos > POOLED_CAP {
        return Err(Error::Refused { what: "pooled information set assignments".into(), size: combos, cap: POOLED_CAP });
    }
    let subgames = find_subgames(g);
    let order: Vec<NodeId> = g.node_ids().collect::<Vec<_>>().into_iter().rev().collect();
    let mut out = Vec::new();
    let mut seen = 0usize;
    let mut digits = vec![0usize; pooled.len()];
    loop {
        let mut choice = vec![0usize; g.infosets().len()];
        for (d, &i) in digits.iter().zip(&pooled) {
            choice[i] = *d;
        }
        for cand in backward_induction(g, &order, choice)? {
            seen += 1;
            if seen > CANDIDATE_CAP {
                return Err(Error::Refused {
                    what: "backward induction candidates".into(),
                    size: seen as f64,
                    cap: CANDIDATE_CAP as f64,
                });
            }
            let pure = PureProfile { choice: cand };
            let sigma = BehavioralProfile::from_pure(g, &pure);
            let mut ok = true;
            for &root in &subgames {
                if !is_nash_in_subgame(g, &sigma, root, TIE)?.pass {
                    ok = false;
                    break;
                }
            }
            if ok {
                out.push(pure);
            }
        }
        // Odometer over the pooled sets.
        let mut k = 0;
        loop {
            if k == digits.len() {
                out.sort();
                out.dedup();
                return Ok(out);
            }
            digits[k] += 1;
            if digits[k] < g.infosets()[pooled[k]].actions.len() {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

/// Completes `choice` at singleton sets, one candidate per tie pattern.
fn backward_induction(g: &Game, order: &[NodeId], choice: Vec<usize>) -> Result<Vec<Vec<usize>>> {
    let n = g.players().len();
    let mut cands: Vec<(Vec<usize>, Vec<Vec<f64>>)> = vec![(choice, vec![Vec::new(); g.len()])];
    for &v in order {
        let node = g.node(v);
        let mut forks = Vec::new();
        for (choice, val) in cands.iter_mut() {
            match &node.kind {
                NodeKind::Terminal { payoffs } => val[v.0] = payoffs.clone(),
                NodeKind::Chance => {
                    let mut acc = vec![0.0; n];
                    for &c in &node.children {
                        let q = node_prob(g, c);
                        for (a, b) in acc.iter_mut().zip(&val[c.0]) {
                            *a += q * b;
                        }
                    }
                    val[v.0] = acc;
                }
                NodeKind::Decision { player, infoset } => {
                    if g.infoset(*infoset).members.len() > 1 {
                        val[v.0] = val[node.children[choice[infoset.0]].0].clone();
                        continue;
                    }
                    let best = node.children.iter().map(|c| val[c.0][player.0]).fold(f64::NEG_INFINITY, f64::max);
                    let ties: Vec<usize> =
                        (0..node.children.len()).filter(|&a| val[node.children[a].0][player.0] >= best - TIE).collect();
                    for &a in &ties[1..] {
                        let mut c2 = choice.clone();
                        c2[infoset.0] = a;
                        let mut v2 = val.clone();
                        v2[v.0] = val[node.children[a].0].clone();
                        forks.push((c2, v2));
                    }
                    choice[infoset.0] = ties[0];
                    val[v.0] = val[node.children[ties[0]].0].clone();
                }
            }
        }
        cands.extend(forks);
        if cands.len() > CANDIDATE_CAP {
            return Err(Error::Refused {
                what: "backward induction candidates".into(),
                size: cands.len() as f64,
                cap: CANDIDATE_CAP as f64,
            });
        }
    }
    Ok(cands.into_iter().map(|(c, _)| c).collect())
}

fn node_prob(g: &Game, c: NodeId) -> f64 {
    g.node(c).chance_prob.expect("chance child has a probability")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{build_game, NodeSpec};
    use crate::models::corpus;

    #[test]
    fn perfect_information_every_inner_node() {
        for g in corpus::perfect_information() {
            let expect: Vec<_> = g.node_ids().filter(|&v| !g.is_terminal(v)).collect();
            assert_eq!(find_subgames(&g), expect, "{}", g.name());
        }
    }

    #[test]
    fn simultaneous_and_merged_root_only() {
        let g = corpus::matching_pennies();
        assert_eq!(find_subgames(&g), vec![g.root()]);
        let g = corpus::fig1_right();
        assert_eq!(find_subgames(&g), vec![g.root()]);
    }

    #[test]
    fn dominance_solvable_one_shot() {
        let g = build_game(
            "pd",
            &["A", "B"],
            NodeSpec::decision(
                "A",
                "IA",
                vec![
                    (
                        "c",
                        NodeSpec::decision(
                            "B",
                            "IB",
                            vec![("c", NodeSpec::payoffs(&[3.0, 3.0])), ("d", NodeSpec::payoffs(&[0.0, 4.0]))],
                        ),
                    ),
                    (
                        "d",
                        NodeSpec::decision(
                            "B",
                            "IB",
                            vec![("c", NodeSpec::payoffs(&[4.0, 0.0])), ("d", NodeSpec::payoffs(&[1.0, 1.0]))],
                        ),
                    ),
                ],
            ),
        )
        .unwrap();
        let spe = enumerate_pure_spe(&g).unwrap();
        assert_eq!(spe.len(), 1);
        assert_eq!(spe[0].labels(&g), vec![("IA".to_string(), "d".to_string()), ("IB".to_string(), "d".to_string())]);
    }

    #[test]
    fn fig1_left_backward_induction() {
        let g = corpus::fig1_left();
        let spe = enumerate_pure_spe(&g).unwrap();
        assert_eq!(spe.len(), 1);
        let pure = &spe[0];
        assert_eq!(pure.action(&g, "I1"), Some("A"));
        assert_eq!(pure.action(&g, "I2A"), Some("a"));
        assert_eq!(pure.action(&g, "I2B"), Some("b"));
        assert!(check_spe(&g, &BehavioralProfile::from_pure(&g, pure), 1e-9).unwrap().pass);
    }

    #[test]
    fn nash_but_not_subgame_perfect() {
        let g = corpus::fig1_left();
        // B then b is a Nash equilibrium sustained by the threat b after A.
        let mut s = BehavioralProfile::uniform(&g);
        s.set_pure(&g, "I1", "B").unwrap();
        s.set_pure(&g, "I2A", "b").unwrap();
        s.set_pure(&g, "I2B", "b").unwrap();
        assert!(crate::equilibrium::is_epsilon_nash(&g, &s, 0.0).unwrap().pass);
        let r = check_spe(&g, &s, 0.0).unwrap();
        assert!(!r.pass);
        assert_eq!(r.witnesses[0].player, "P2");
    }

    #[test]
    fn ties_branch() {
        let g = build_game(
            "tie",
            &["P"],
            NodeSpec::decision("P", "I", vec![("a", NodeSpec::payoffs(&[1.0])), ("b", NodeSpec::payoffs(&[1.0]))]),
        )
        .unwrap();
        assert_eq!(enumerate_pure_spe(&g).unwrap().len(), 2);
    }
}
