use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{Game, InfosetId, NodeId, PlayerId};
use crate::TOL;

/// One action distribution per information set, aligned with
/// [`crate::game::Infoset::actions`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BehavioralProfile {
    pub probs: Vec<Vec<f64>>,
}

/// One action index per information set. A player's pure strategy is the
/// restriction to that player's information sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PureProfile {
    pub choice: Vec<usize>,
}

/// A pure strategy of one player: action index per owned information set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PureStrategy {
    pub player: PlayerId,
    pub choice: Vec<(InfosetId, usize)>,
}

/// One distribution over member nodes per information set, aligned with
/// [`crate::game::Infoset::members`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BeliefSystem {
    pub probs: Vec<Vec<f64>>,
}

impl BehavioralProfile {
    pub fn uniform(g: &Game) -> BehavioralProfile {
        let probs = g
            .infosets()
            .iter()
            .map(|s| vec![1.0 / s.actions.len() as f64; s.actions.len()])
            .collect();
        BehavioralProfile { probs }
    }

    pub fn from_pure(g: &Game, pure: &PureProfile) -> BehavioralProfile {
        let probs = g
            .infosets()
            .iter()
            .zip(&pure.choice)
            .map(|(s, &c)| {
                let mut v = vec![0.0; s.actions.len()];
                v[c] = 1.0;
                v
            })
            .collect();
        BehavioralProfile { probs }
    }

    /// Profile where every information set plays the first listed action
    /// found in `labels` (or its first action when none matches).
    pub fn first_matching(g: &Game, labels: &[&str]) -> BehavioralProfile {
        let choice = g
            .infosets()
            .iter()
            .map(|s| s.actions.iter().position(|a| labels.contains(&a.as_str())).unwrap_or(0))
            .collect();
        BehavioralProfile::from_pure(g, &PureProfile { choice })
    }

    pub fn get(&self, i: InfosetId) -> &[f64] {
        &self.probs[i.0]
    }

    /// Sets the distribution at the information set labelled `infoset`;
    /// unnamed actions get probability zero.
    pub fn set(&mut self, g: &Game, infoset: &str, dist: &[(&str, f64)]) -> Result<()> {
        let id = g.infoset_id(infoset)?;
        let set = g.infoset(id);
        let mut v = vec![0.0; set.actions.len()];
        for (a, p) in dist {
            let k = set
                .actions
                .iter()
                .position(|x| x == a)
                .ok_or_else(|| Error::Profile(format!("infoset {infoset} has no action `{a}`")))?;
            v[k] = *p;
        }
        self.probs[id.0] = v;
        Ok(())
    }

    /// Plays `action` with certainty at `infoset`.
    pub fn set_pure(&mut self, g: &Game, infoset: &str, action: &str) -> Result<()> {
        self.set(g, infoset, &[(action, 1.0)])
    }

    /// Probability of the edge into `child` under the profile or chance.
    pub fn edge_prob(&self, g: &Game, child: NodeId) -> f64 {
        let node = g.node(child);
        if let Some(p) = node.chance_prob {
            return p;
        }
        let parent = node.parent.expect("edge has a parent");
        let (_, set) = g.decision(parent).expect("non-chance edge leaves a decision node");
        let k = g.node(parent).children.iter().position(|&c| c == child).expect("child listed");
        self.probs[set.0][k]
    }

    pub fn check(&self, g: &Game) -> Result<()> {
        if self.probs.len() != g.infosets().len() {
            return Err(Error::Profile(format!(
                "profile covers {} information sets, game has {}",
                self.probs.len(),
                g.infosets().len()
            )));
        }
        for (set, v) in g.infosets().iter().zip(&self.probs) {
            if v.len() != set.actions.len() {
                return Err(Error::Profile(format!("infoset {}: wrong number of actions", set.label)));
            }
            if v.iter().any(|&p| !(p >= -TOL)) {
                return Err(Error::Profile(format!("infoset {}: negative probability", set.label)));
            }
            let sum: f64 = v.iter().sum();
            if (sum - 1.0).abs() > TOL {
                return Err(Error::Profile(format!("infoset {}: probabilities sum to {sum}", set.label)));
            }
        }
        Ok(())
    }

    /// Replaces `p`'s distributions with those of `other`.
    pub fn with_player(&self, g: &Game, p: PlayerId, other: &BehavioralProfile) -> BehavioralProfile {
        let mut out = self.clone();
        for i in g.infosets_of(p) {
            out.probs[i.0] = other.probs[i.0].clone();
        }
        out
    }

    /// Replaces `p`'s distributions with a pure strategy.
    pub fn with_pure(&self, g: &Game, s: &PureStrategy) -> BehavioralProfile {
        let mut out = self.clone();
        for &(i, a) in &s.choice {
            let mut v = vec![0.0; g.infoset(i).actions.len()];
            v[a] = 1.0;
            out.probs[i.0] = v;
        }
        out
    }

    /// The pure profile when every distribution is degenerate.
    pub fn as_pure(&self) -> Option<PureProfile> {
        let choice = self
            .probs
            .iter()
            .map(|v| v.iter().position(|&p| (p - 1.0).abs() <= TOL))
            .collect::<Option<Vec<_>>>()?;
        Some(PureProfile { choice })
    }

    /// Largest absolute difference between two profiles.
    pub fn linf(&self, other: &BehavioralProfile) -> f64 {
        self.probs
            .iter()
            .flatten()
            .zip(other.probs.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl PureProfile {
    pub fn strategy(&self, g: &Game, p: PlayerId) -> PureStrategy {
        PureStrategy { player: p, choice: g.infosets_of(p).into_iter().map(|i| (i, self.choice[i.0])).collect() }
    }

    /// `(infoset label, action label)` for every information set.
    pub fn labels(&self, g: &Game) -> Vec<(String, String)> {
        g.infosets()
            .iter()
            .zip(&self.choice)
            .map(|(s, &c)| (s.label.clone(), s.actions[c].clone()))
            .collect()
    }

    pub fn action<'g>(&self, g: &'g Game, infoset: &str) -> Option<&'g str> {
        let id = g.infoset_id(infoset).ok()?;
        Some(g.infoset(id).actions[self.choice[id.0]].as_str())
    }
}

impl PureStrategy {
    pub fn labels(&self, g: &Game) -> Vec<(String, String)> {
        self.choice
            .iter()
            .map(|&(i, a)| (g.infoset(i).label.clone(), g.infoset(i).actions[a].clone()))
            .collect()
    }
}

impl BeliefSystem {
    /// Uniform beliefs on every information set.
    pub fn uniform(g: &Game) -> BeliefSystem {
        let probs = g.infosets().iter().map(|s| vec![1.0 / s.members.len() as f64; s.members.len()]).collect();
        BeliefSystem { probs }
    }

    pub fn get(&self, i: InfosetId) -> &[f64] {
        &self.probs[i.0]
    }

    /// Sets beliefs at `infoset` from `(member, probability)` pairs; unnamed
    /// members get zero.
    pub fn set(&mut self, g: &Game, infoset: InfosetId, dist: &[(NodeId, f64)]) -> Result<()> {
        let set = g.infoset(infoset);
        let mut v = vec![0.0; set.members.len()];
        for &(n, p) in dist {
            let k = set
                .members
                .iter()
                .position(|&m| m == n)
                .ok_or_else(|| Error::Beliefs(format!("node {} is not in infoset {}", n.0, set.label)))?;
            v[k] = p;
        }
        self.probs[infoset.0] = v;
        Ok(())
    }

    pub fn check(&self, g: &Game) -> Result<()> {
        if self.probs.len() != g.infosets().len() {
            return Err(Error::Beliefs("beliefs do not cover every information set".into()));
        }
        for (set, v) in g.infosets().iter().zip(&self.probs) {
            let sum: f64 = v.iter().sum();
            if v.len() != set.members.len() || v.iter().any(|&p| !(p >= -TOL)) || (sum - 1.0).abs() > TOL {
                return Err(Error::Beliefs(format!("infoset {}: not a distribution over its members", set.label)));
            }
        }
        Ok(())
    }
}
