use serde::Serialize;

use super::best_response::{optimize_unchecked, DEFAULT_STEP};
use super::nash::values_from;
use super::{clean_regret, describe_strategy, reach_unchecked, BehavioralProfile, BeliefSystem, Concept, Deviation, EquilibriumReport};
use crate::error::Result;
use crate::game::{Game, NodeId, PlayerId};
use crate::recall::{classify_recall, RecallClass};

/// What beliefs must be at information sets reached with probability zero.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum OffPathRule {
    /// Any distribution over the members is accepted.
    Unrestricted,
    /// Off-path beliefs must equal these, within 1e-9.
    Prescribed(BeliefSystem),
}

const BAYES_TOL: f64 = 1e-9;

/// Bayes posteriors where the profile reaches an information set, and
/// `fallback` elsewhere.
pub fn consistent_beliefs(g: &Game, sigma: &BehavioralProfile, fallback: &BeliefSystem) -> Result<BeliefSystem> {
    sigma.check(g)?;
    let reach = reach_unchecked(g, sigma);
    let mut out = fallback.clone();
    for (k, set) in g.infosets().iter().enumerate() {
        let total: f64 = set.members.iter().map(|m| reach[m.0]).sum();
        if total > 0.0 {
            out.probs[k] = set.members.iter().map(|m| reach[m.0] / total).collect();
        }
    }
    Ok(out)
}

/// Checks a perfect Bayesian equilibrium candidate.
///
/// Beliefs must follow Bayes' rule wherever the profile reaches an
/// information set, and `rule` elsewhere. Players with perfect recall must
/// act optimally at every information set given the beliefs there. For
/// players without perfect recall interim optimality is not well defined,
/// so only ex-ante optimality of the whole strategy is required; the report
/// notes which test each player received.
pub fn check_pbe(
    g: &Game,
    sigma: &BehavioralProfile,
    mu: &BeliefSystem,
    eps: f64,
    rule: &OffPathRule,
) -> Result<EquilibriumReport> {
    sigma.check(g)?;
    mu.check(g)?;
    if let OffPathRule::Prescribed(nu) = rule {
        nu.check(g)?;
    }
    let reach = reach_unchecked(g, sigma);
    let mut notes = Vec::new();
    let mut consistent = true;
    for (k, set) in g.infosets().iter().enumerate() {
        let total: f64 = set.members.iter().map(|m| reach[m.0]).sum();
        let (target, kind): (Vec<f64>, &str) = if total > 0.0 {
            (set.members.iter().map(|m| reach[m.0] / total).collect(), "Bayes posterior")
        } else {
            match rule {
                OffPathRule::Unrestricted => continue,
                OffPathRule::Prescribed(nu) => (nu.probs[k].clone(), "prescribed off-path belief"),
            }
        };
        let gap = target.iter().zip(&mu.probs[k]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if gap > BAYES_TOL {
            consistent = false;
            notes.push(format!("belief at {} differs from the {kind} by {gap:.3e}", set.label));
        }
    }

    let mut regrets = Vec::new();
    let mut witnesses = Vec::new();
    for p in 0..g.players().len() {
        let p = PlayerId(p);
        let name = g.player_name(p).to_string();
        let perfect = classify_recall(g, p)?.classification == RecallClass::Perfect;
        let mut worst = 0.0f64;
        if perfect {
            notes.push(format!("{name}: sequential rationality at every information set"));
            for i in g.infosets_of(p) {
                let set = g.infoset(i);
                let roots: Vec<(NodeId, f64)> =
                    set.members.iter().zip(mu.get(i)).filter(|(_, &w)| w > 0.0).map(|(&m, &w)| (m, w)).collect();
                let current: f64 = roots.iter().map(|&(m, w)| w * values_from(g, sigma, m)[p.0]).sum();
                let found = optimize_unchecked(g, sigma, p, &roots, DEFAULT_STEP)?;
                let r = clean_regret(found.value, current);
                if r > eps && witnesses.iter().all(|d: &Deviation| d.player != name) {
                    witnesses.push(Deviation {
                        player: name.clone(),
                        gain: r,
                        at: Some(set.label.clone()),
                        strategy: describe_strategy(g, &found.apply(sigma), p)
                            .into_iter()
                            .filter(|(l, _)| found.assignment.iter().any(|(s, _)| g.infoset(*s).label == *l))
                            .collect(),
                    });
                }
                worst = worst.max(r);
            }
        } else {
            notes.push(format!("{name}: ex-ante optimality (imperfect recall)"));
            let current = values_from(g, sigma, g.root())[p.0];
            let found = optimize_unchecked(g, sigma, p, &[(g.root(), 1.0)], DEFAULT_STEP)?;
            worst = clean_regret(found.value, current);
            if worst > eps {
                witnesses.push(Deviation {
                    player: name.clone(),
                    gain: worst,
                    at: None,
                    strategy: describe_strategy(g, &found.apply(sigma), p),
                });
            }
        }
        regrets.push((name, worst));
    }
    let pass = consistent && regrets.iter().all(|(_, r)| *r <= eps);
    Ok(EquilibriumReport { concept: Concept::Pbe, epsilon: eps, regrets, pass, witnesses, notes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{build_game, NodeSpec};
    use crate::models::corpus;

    #[test]
    fn one_shot_with_degenerate_beliefs() {
        let g = build_game(
            "one",
            &["P"],
            NodeSpec::decision("P", "I", vec![("a", NodeSpec::payoffs(&[1.0])), ("b", NodeSpec::payoffs(&[0.0]))]),
        )
        .unwrap();
        let s = BehavioralProfile::first_matching(&g, &["a"]);
        let r = check_pbe(&g, &s, &BeliefSystem::uniform(&g), 0.0, &OffPathRule::Unrestricted).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn wrong_beliefs_fail_bayes() {
        let g = corpus::matching_pennies();
        let mut s = BehavioralProfile::uniform(&g);
        s.set(&g, "I1", &[("H", 0.25), ("T", 0.75)]).unwrap();
        let mu = BeliefSystem::uniform(&g);
        let r = check_pbe(&g, &s, &mu, 10.0, &OffPathRule::Unrestricted).unwrap();
        assert!(!r.pass);
        assert!(r.notes.iter().any(|n| n.contains("I2")));
        let good = consistent_beliefs(&g, &s, &mu).unwrap();
        assert_eq!(good.get(g.infoset_id("I2").unwrap()), &[0.25, 0.75]);
        assert!(check_pbe(&g, &s, &good, 10.0, &OffPathRule::Unrestricted).unwrap().pass);
    }

    #[test]
    fn fully_mixed_beliefs_are_exact_posteriors() {
        let g = corpus::fig1_right();
        let mut s = BehavioralProfile::uniform(&g);
        s.set(&g, "I1", &[("A", 0.3), ("B", 0.7)]).unwrap();
        let mu = consistent_beliefs(&g, &s, &BeliefSystem::uniform(&g)).unwrap();
        let merged = g.infoset_id("X@P2:m").unwrap();
        assert!((mu.get(merged)[0] - 0.3).abs() < 1e-15);
        let r = check_pbe(&g, &s, &mu, 1e9, &OffPathRule::Unrestricted).unwrap();
        assert!(r.pass);
        assert!(r.notes.iter().any(|n| n.contains("ex-ante")));
    }

    #[test]
    fn sequential_rationality_off_path() {
        // P1 ends the game; P2's unreached move is irrational.
        let g = build_game(
            "seq",
            &["P1", "P2"],
            NodeSpec::decision(
                "P1",
                "I1",
                vec![
                    ("out", NodeSpec::payoffs(&[1.0, 1.0])),
                    (
                        "in",
                        NodeSpec::decision(
                            "P2",
                            "I2",
                            vec![("good", NodeSpec::payoffs(&[0.0, 2.0])), ("bad", NodeSpec::payoffs(&[0.0, 0.0]))],
                        ),
                    ),
                ],
            ),
        )
        .unwrap();
        let s = BehavioralProfile::first_matching(&g, &["out", "bad"]);
        let mu = BeliefSystem::uniform(&g);
        assert!(crate::equilibrium::is_epsilon_nash(&g, &s, 0.0).unwrap().pass);
        let r = check_pbe(&g, &s, &mu, 0.0, &OffPathRule::Unrestricted).unwrap();
        assert!(!r.pass);
        assert_eq!(r.witnesses[0].at.as_deref(), Some("I2"));
    }
}
