use super::best_response::{optimize, DEFAULT_STEP};
use super::{clean_regret, describe_strategy, BehavioralProfile, Concept, Deviation, EquilibriumReport};
use crate::error::Result;
use crate::game::{Game, NodeId, NodeKind, PlayerId};

/// Expected payoffs of every player conditional on reaching `root`.
pub(crate) fn values_from(g: &Game, sigma: &BehavioralProfile, root: NodeId) -> Vec<f64> {
    let order = g.subtree(root);
    let n = g.players().len();
    let mut val: std::collections::HashMap<NodeId, Vec<f64>> = std::collections::HashMap::new();
    for &v in order.iter().rev() {
        let node = g.node(v);
        let x = match &node.kind {
            NodeKind::Terminal { payoffs } => payoffs.clone(),
            _ => {
                let mut acc = vec![0.0; n];
                for &c in &node.children {
                    let pr = sigma.edge_prob(g, c);
                    if pr != 0.0 {
                        for (a, b) in acc.iter_mut().zip(&val[&c]) {
                            *a += pr * b;
                        }
                    }
                }
                acc
            }
        };
        val.insert(v, x);
    }
    val.remove(&root).expect("root evaluated")
}

/// Checks that no player gains more than `eps` by deviating.
///
/// Each player's best response is exact over pure strategies unless the
/// player is absent-minded, in which case behavioral strategies are searched
/// on a grid of step 0.05 refined by coordinate ascent.
pub fn is_epsilon_nash(g: &Game, sigma: &BehavioralProfile, eps: f64) -> Result<EquilibriumReport> {
    is_nash_in_subgame(g, sigma, g.root(), eps)
}

/// Nash check of the continuation game below `root`. `root` is expected to
/// start a subgame; see [`super::find_subgames`].
pub fn is_nash_in_subgame(g: &Game, sigma: &BehavioralProfile, root: NodeId, eps: f64) -> Result<EquilibriumReport> {
    sigma.check(g)?;
    g.check_node(root)?;
    let current = values_from(g, sigma, root);
    let mut regrets = Vec::new();
    let mut witnesses = Vec::new();
    for p in 0..g.players().len() {
        let p = PlayerId(p);
        let br = optimize(g, sigma, p, &[(root, 1.0)], DEFAULT_STEP)?;
        let r = clean_regret(br.value, current[p.0]);
        if r > eps {
            witnesses.push(Deviation {
                player: g.player_name(p).to_string(),
                gain: r,
                at: None,
                strategy: describe_strategy(g, &br.profile, p),
            });
        }
        regrets.push((g.player_name(p).to_string(), r));
    }
    let pass = regrets.iter().all(|(_, r)| *r <= eps);
    Ok(EquilibriumReport { concept: Concept::Nash, epsilon: eps, regrets, pass, witnesses, notes: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{corpus, mafia};

    #[test]
    fn pennies_uniform_passes() {
        let g = corpus::matching_pennies();
        let r = is_epsilon_nash(&g, &BehavioralProfile::uniform(&g), 0.0).unwrap();
        assert!(r.pass);
        assert_eq!(r.max_regret(), 0.0);
    }

    #[test]
    fn pennies_heads_fails_with_witness() {
        let g = corpus::matching_pennies();
        let s = BehavioralProfile::first_matching(&g, &["H"]);
        let r = is_epsilon_nash(&g, &s, 0.0).unwrap();
        assert!(!r.pass);
        assert_eq!(r.witnesses.len(), 1);
        assert_eq!(r.witnesses[0].player, "P2");
        assert_eq!(r.witnesses[0].gain, 2.0);
    }

    #[test]
    fn mafia_stage_low_accept() {
        let g = mafia::stage_game();
        let mut s = BehavioralProfile::uniform(&g);
        s.set_pure(&g, "O", "Low").unwrap();
        s.set_pure(&g, "M", "Accept").unwrap();
        assert!(is_epsilon_nash(&g, &s, 0.0).unwrap().pass);
    }
}
