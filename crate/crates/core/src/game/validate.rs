use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;

use super::{Game, NodeId, NodeKind};

/// A broken structural invariant. Node and infoset references are indices.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "rule")]
pub enum Violation {
    EmptyGame,
    NotATree { node: usize },
    BadLabel { node: usize, label: String },
    DuplicateAction { node: usize, label: String },
    NoActions { node: usize },
    NegativeProbability { node: usize, prob: f64 },
    ChanceNotNormalized { node: usize, sum: f64 },
    PayoffArity { node: usize, expected: usize, found: usize },
    OwnerMismatch { infoset: String, node: usize },
    ActionSetMismatch { infoset: String, first: usize, other: usize },
    PartitionBroken { node: usize },
    BadName { name: String },
}

impl Violation {
    /// Node the violation is anchored at, when there is one.
    pub fn node(&self) -> Option<usize> {
        use Violation::*;
        match self {
            EmptyGame | BadName { .. } => None,
            NotATree { node }
            | BadLabel { node, .. }
            | DuplicateAction { node, .. }
            | NoActions { node }
            | NegativeProbability { node, .. }
            | ChanceNotNormalized { node, .. }
            | PayoffArity { node, .. }
            | OwnerMismatch { node, .. }
            | PartitionBroken { node } => Some(*node),
            ActionSetMismatch { other, .. } => Some(*other),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            EmptyGame => write!(f, "game has no nodes"),
            NotATree { node } => write!(f, "node {node}: parent/child links do not form a rooted tree"),
            BadLabel { node, label } => write!(f, "node {node}: label `{label}` is empty or contains whitespace, parentheses or quotes"),
            DuplicateAction { node, label } => write!(f, "node {node}: action `{label}` appears twice"),
            NoActions { node } => write!(f, "node {node}: non-terminal node without actions"),
            NegativeProbability { node, prob } => write!(f, "node {node}: negative chance probability {prob}"),
            ChanceNotNormalized { node, sum } => write!(f, "node {node}: chance probabilities sum to {sum}"),
            PayoffArity { node, expected, found } => write!(f, "node {node}: expected {expected} payoffs, found {found}"),
            OwnerMismatch { infoset, node } => write!(f, "infoset {infoset}: node {node} belongs to a different player"),
            ActionSetMismatch { infoset, first, other } => write!(f, "infoset {infoset}: nodes {first} and {other} offer different actions"),
            PartitionBroken { node } => write!(f, "node {node}: not covered exactly once by its player's partition"),
            BadName { name } => write!(f, "name `{name}` is empty or contains whitespace, parentheses or quotes"),
        }
    }
}

/// Labels must survive the text format as bare atoms.
pub(crate) fn is_atom(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(|c| c.is_whitespace() || matches!(c, '(' | ')' | '"' | ';'))
}

const PROB_TOL: f64 = 1e-9;

impl Game {
    /// Every broken structural invariant; empty iff the game is valid.
    pub fn validate_structure(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.nodes.is_empty() {
            out.push(Violation::EmptyGame);
            return out;
        }
        for p in &self.players {
            if !is_atom(p) {
                out.push(Violation::BadName { name: p.clone() });
            }
        }
        // Tree shape: node 0 is the only root and every node is reached once.
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![NodeId(0)];
        while let Some(v) = stack.pop() {
            if seen[v.0] {
                out.push(Violation::NotATree { node: v.0 });
                continue;
            }
            seen[v.0] = true;
            for &c in &self.nodes[v.0].children {
                if self.nodes[c.0].parent != Some(v) {
                    out.push(Violation::NotATree { node: c.0 });
                }
                stack.push(c);
            }
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if !seen[i] || (i == 0) != n.parent.is_none() {
                out.push(Violation::NotATree { node: i });
            }
        }

        for (i, n) in self.nodes.iter().enumerate() {
            if let Some(a) = &n.action {
                if !is_atom(a) {
                    out.push(Violation::BadLabel { node: i, label: a.clone() });
                }
            }
            let mut labels = HashSet::new();
            for &c in &n.children {
                let l = self.action_label(c);
                if !labels.insert(l) {
                    out.push(Violation::DuplicateAction { node: i, label: l.to_string() });
                }
            }
            match &n.kind {
                NodeKind::Terminal { payoffs } => {
                    if payoffs.len() != self.players.len() {
                        out.push(Violation::PayoffArity {
                            node: i,
                            expected: self.players.len(),
                            found: payoffs.len(),
                        });
                    }
                }
                NodeKind::Chance => {
                    if n.children.is_empty() {
                        out.push(Violation::NoActions { node: i });
                        continue;
                    }
                    let probs = self.chance_probs(NodeId(i));
                    for &p in &probs {
                        if !(p >= 0.0) {
                            out.push(Violation::NegativeProbability { node: i, prob: p });
                        }
                    }
                    let sum: f64 = probs.iter().sum();
                    if !((sum - 1.0).abs() <= PROB_TOL) {
                        out.push(Violation::ChanceNotNormalized { node: i, sum });
                    }
                }
                NodeKind::Decision { infoset, .. } => {
                    if n.children.is_empty() {
                        out.push(Violation::NoActions { node: i });
                    }
                    if !self.infosets[infoset.0].members.contains(&NodeId(i)) {
                        out.push(Violation::PartitionBroken { node: i });
                    }
                }
            }
        }

        let mut covered = vec![0usize; self.nodes.len()];
        for set in &self.infosets {
            if !is_atom(&set.label) {
                out.push(Violation::BadName { name: set.label.clone() });
            }
            let first = set.members[0];
            let first_actions: BTreeSet<&str> = self.nodes[first.0]
                .children
                .iter()
                .map(|&c| self.action_label(c))
                .collect();
            for &m in &set.members {
                covered[m.0] += 1;
                match self.nodes[m.0].kind {
                    NodeKind::Decision { player, .. } if player == set.player => {}
                    _ => out.push(Violation::OwnerMismatch { infoset: set.label.clone(), node: m.0 }),
                }
                let actions: BTreeSet<&str> =
                    self.nodes[m.0].children.iter().map(|&c| self.action_label(c)).collect();
                if actions != first_actions {
                    out.push(Violation::ActionSetMismatch {
                        infoset: set.label.clone(),
                        first: first.0,
                        other: m.0,
                    });
                }
            }
        }
        for (i, n) in self.nodes.iter().enumerate() {
            let decision = matches!(n.kind, NodeKind::Decision { .. });
            if decision && covered[i] != 1 {
                out.push(Violation::PartitionBroken { node: i });
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::build::{build_unchecked, NodeSpec};

    #[test]
    fn valid_fig1_has_no_violations() {
        assert!(crate::models::corpus::fig1_left().validate_structure().is_empty());
    }

    #[test]
    fn unnormalized_chance() {
        let spec = NodeSpec::chance(vec![
            ("H", 0.5, NodeSpec::payoffs(&[1.0])),
            ("T", 0.4, NodeSpec::payoffs(&[0.0])),
        ]);
        let g = build_unchecked("c", &["P1"], spec).unwrap();
        let v = g.validate_structure();
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0], Violation::ChanceNotNormalized { node: 0, .. }));
    }

    #[test]
    fn action_set_mismatch() {
        let leaf = || NodeSpec::payoffs(&[0.0]);
        let spec = NodeSpec::chance(vec![
            ("L", 0.5, NodeSpec::decision("P", "I", vec![("a", leaf()), ("b", leaf())])),
            ("R", 0.5, NodeSpec::decision("P", "I", vec![("a", leaf())])),
        ]);
        let g = build_unchecked("m", &["P"], spec).unwrap();
        let v = g.validate_structure();
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0], Violation::ActionSetMismatch { .. }));
    }

    #[test]
    fn negative_probability_and_bad_label() {
        let spec = NodeSpec::chance(vec![
            ("H", 1.5, NodeSpec::payoffs(&[1.0])),
            ("T T", -0.5, NodeSpec::payoffs(&[0.0])),
        ]);
        let g = build_unchecked("c", &["P1"], spec).unwrap();
        let v = g.validate_structure();
        assert!(v.iter().any(|x| matches!(x, Violation::NegativeProbability { .. })));
        assert!(v.iter().any(|x| matches!(x, Violation::BadLabel { .. })));
    }
}
