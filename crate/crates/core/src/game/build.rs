use super::{Game, PlayerId, RawKind, RawNode};
use crate::error::{Error, Result};

/// Nested description of a game tree.
#[derive(Clone, Debug, PartialEq)]
pub enum NodeSpec {
    Chance(Vec<(String, f64, NodeSpec)>),
    Decision {
        player: String,
        infoset: String,
        branches: Vec<(String, NodeSpec)>,
    },
    Terminal(Vec<f64>),
}

impl NodeSpec {
    pub fn chance<S: Into<String>>(outcomes: Vec<(S, f64, NodeSpec)>) -> NodeSpec {
        NodeSpec::Chance(outcomes.into_iter().map(|(a, p, n)| (a.into(), p, n)).collect())
    }

    pub fn decision<S: Into<String>>(
        player: impl Into<String>,
        infoset: impl Into<String>,
        branches: Vec<(S, NodeSpec)>,
    ) -> NodeSpec {
        NodeSpec::Decision {
            player: player.into(),
            infoset: infoset.into(),
            branches: branches.into_iter().map(|(a, n)| (a.into(), n)).collect(),
        }
    }

    pub fn payoffs(values: &[f64]) -> NodeSpec {
        NodeSpec::Terminal(values.to_vec())
    }
}

/// Builds and validates a game. Fails with the first structural violation.
pub fn build_game<S: AsRef<str>>(name: &str, players: &[S], root: NodeSpec) -> Result<Game> {
    let game = build_unchecked(name, players, root)?;
    match game.validate_structure().into_iter().next() {
        Some(v) => Err(Error::Invalid(v)),
        None => Ok(game),
    }
}

/// Builds a game without structural validation. Unknown player names are
/// still rejected since they cannot be represented.
pub fn build_unchecked<S: AsRef<str>>(name: &str, players: &[S], root: NodeSpec) -> Result<Game> {
    let players: Vec<String> = players.iter().map(|p| p.as_ref().to_string()).collect();
    let mut raw = Vec::new();
    let mut stack: Vec<(NodeSpec, Option<usize>, Option<String>, Option<f64>)> =
        vec![(root, None, None, None)];
    while let Some((spec, parent, action, prob)) = stack.pop() {
        let idx = raw.len();
        let mut push_children = Vec::new();
        let kind = match spec {
            NodeSpec::Terminal(payoffs) => RawKind::Terminal { payoffs },
            NodeSpec::Chance(outcomes) => {
                for (a, p, child) in outcomes {
                    push_children.push((child, Some(idx), Some(a), Some(p)));
                }
                RawKind::Chance
            }
            NodeSpec::Decision { player, infoset, branches } => {
                let pid = players
                    .iter()
                    .position(|p| *p == player)
                    .ok_or_else(|| Error::UnknownPlayer(player.clone()))?;
                for (a, child) in branches {
                    push_children.push((child, Some(idx), Some(a), None));
                }
                RawKind::Decision { player: PlayerId(pid), infoset }
            }
        };
        raw.push(RawNode { parent, action, chance_prob: prob, kind });
        stack.extend(push_children.into_iter().rev());
    }
    Ok(Game::assemble(name, players, raw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Violation;

    fn leaf(x: f64) -> NodeSpec {
        NodeSpec::payoffs(&[x, -x])
    }

    #[test]
    fn fig1_left_counts() {
        let g = crate::models::corpus::fig1_left();
        let decisions = g.node_ids().filter(|&n| g.decision(n).is_some()).count();
        assert_eq!(decisions, 3);
        assert_eq!(g.terminals().count(), 4);
        assert_eq!(g.infosets().len(), 3);
        assert_eq!(g.len(), 7);
    }

    #[test]
    fn single_terminal() {
        let g = build_game("t", &["P1"], NodeSpec::payoffs(&[0.0])).unwrap();
        assert_eq!(g.len(), 1);
        assert!(g.infosets().is_empty());
    }

    #[test]
    fn matching_pennies_shares_an_infoset() {
        let g = crate::models::corpus::matching_pennies();
        let p2 = g.player_id("P2").unwrap();
        let sets = g.infosets_of(p2);
        assert_eq!(sets.len(), 1);
        assert_eq!(g.infoset(sets[0]).members.len(), 2);
    }

    #[test]
    fn duplicate_action_rejected() {
        let spec = NodeSpec::decision("P1", "I", vec![("a", leaf(1.0)), ("a", leaf(2.0))]);
        let err = build_game("dup", &["P1", "P2"], spec).unwrap_err();
        assert!(matches!(err, Error::Invalid(Violation::DuplicateAction { .. })));
    }

    #[test]
    fn missing_payoff_rejected() {
        let spec = NodeSpec::decision("P1", "I", vec![("a", NodeSpec::payoffs(&[1.0])), ("b", leaf(2.0))]);
        let err = build_game("short", &["P1", "P2"], spec).unwrap_err();
        assert!(matches!(err, Error::Invalid(Violation::PayoffArity { .. })));
    }

    #[test]
    fn infoset_spanning_owners_rejected() {
        let spec = NodeSpec::decision(
            "P1",
            "I",
            vec![
                ("a", NodeSpec::decision("P2", "J", vec![("x", leaf(0.0))])),
                ("b", NodeSpec::decision("P1", "J", vec![("x", leaf(0.0))])),
            ],
        );
        let err = build_game("owners", &["P1", "P2"], spec).unwrap_err();
        assert!(matches!(err, Error::Invalid(Violation::OwnerMismatch { .. })));
    }

    #[test]
    fn unknown_player_rejected() {
        let spec = NodeSpec::decision("Q", "I", vec![("a", leaf(0.0))]);
        assert_eq!(
            build_game("q", &["P1", "P2"], spec).unwrap_err(),
            Error::UnknownPlayer("Q".into())
        );
    }
}
