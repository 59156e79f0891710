//! Finite extensive-form games with arbitrary information partitions.
//!
//! A [`Game`] is an immutable tree. Every node is a history: the labels on
//! its root path spell out the action sequence. Decision nodes belong to a
//! player and an information set, chance nodes carry probabilities on their
//! outgoing edges and terminal nodes carry one payoff per player.
//!
//! Information sets are free-form, so games with imperfect recall and
//! absent-mindedness are representable. [`Game::validate_structure`]
//! reports every broken invariant as data.

mod build;
mod validate;

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};

pub use build::{build_game, NodeSpec};
pub use validate::Violation;
pub(crate) use validate::is_atom;

/// Index of a node inside its game.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NodeId(pub usize);

/// Index of a payoff-bearing player. Chance is not a player.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PlayerId(pub usize);

/// Index of an information set inside its game.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct InfosetId(pub usize);

#[derive(Clone, Debug, PartialEq)]
pub enum NodeKind {
    Decision { player: PlayerId, infoset: InfosetId },
    Chance,
    Terminal { payoffs: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub parent: Option<NodeId>,
    /// Label of the edge from the parent.
    pub action: Option<String>,
    /// Probability of the edge from the parent when the parent is a chance node.
    pub chance_prob: Option<f64>,
    pub children: Vec<NodeId>,
    pub kind: NodeKind,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Infoset {
    pub label: String,
    pub player: PlayerId,
    pub members: Vec<NodeId>,
    /// Action labels in the order used by strategies; taken from the first member.
    pub actions: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Game {
    name: String,
    players: Vec<String>,
    nodes: Vec<Node>,
    infosets: Vec<Infoset>,
    by_label: HashMap<String, InfosetId>,
    // Euler-tour interval per node: `b` is in the subtree of `a` iff
    // tin[a] <= tin[b] < tout[a].
    tin: Vec<usize>,
    tout: Vec<usize>,
}

/// Flat node description used to assemble games from other games.
///
/// Raw nodes must be listed parents-first; children keep listing order.
#[derive(Clone, Debug)]
pub(crate) struct RawNode {
    pub parent: Option<usize>,
    pub action: Option<String>,
    pub chance_prob: Option<f64>,
    pub kind: RawKind,
}

#[derive(Clone, Debug)]
pub(crate) enum RawKind {
    Decision { player: PlayerId, infoset: String },
    Chance,
    Terminal { payoffs: Vec<f64> },
}

impl Game {
    /// Assembles a game without validating it.
    pub(crate) fn assemble(name: &str, players: Vec<String>, raw: Vec<RawNode>) -> Game {
        let mut nodes: Vec<Node> = Vec::with_capacity(raw.len());
        let mut infosets: Vec<Infoset> = Vec::new();
        let mut by_label: HashMap<String, InfosetId> = HashMap::new();
        for (i, r) in raw.into_iter().enumerate() {
            let depth = match r.parent {
                Some(p) => {
                    nodes[p].children.push(NodeId(i));
                    nodes[p].depth + 1
                }
                None => 0,
            };
            let kind = match r.kind {
                RawKind::Decision { player, infoset } => {
                    let id = *by_label.entry(infoset.clone()).or_insert_with(|| {
                        infosets.push(Infoset {
                            label: infoset,
                            player,
                            members: Vec::new(),
                            actions: Vec::new(),
                        });
                        InfosetId(infosets.len() - 1)
                    });
                    infosets[id.0].members.push(NodeId(i));
                    NodeKind::Decision { player, infoset: id }
                }
                RawKind::Chance => NodeKind::Chance,
                RawKind::Terminal { payoffs } => NodeKind::Terminal { payoffs },
            };
            nodes.push(Node {
                parent: r.parent.map(NodeId),
                action: r.action,
                chance_prob: r.chance_prob,
                children: Vec::new(),
                kind,
                depth,
            });
        }
        for set in &mut infosets {
            set.actions = nodes[set.members[0].0]
                .children
                .iter()
                .map(|c| nodes[c.0].action.clone().unwrap_or_default())
                .collect();
        }
        // Align every member's children with the infoset's action order so
        // that action index k means the same thing at every member.
        for set in &infosets {
            for &m in &set.members[1..] {
                let node = &nodes[m.0];
                if node.children.len() != set.actions.len() {
                    continue;
                }
                let mut ordered = Vec::with_capacity(node.children.len());
                for a in &set.actions {
                    match node
                        .children
                        .iter()
                        .find(|c| nodes[c.0].action.as_deref() == Some(a.as_str()))
                    {
                        Some(&c) => ordered.push(c),
                        None => break,
                    }
                }
                if ordered.len() == node.children.len() {
                    nodes[m.0].children = ordered;
                }
            }
        }
        let mut game = Game {
            name: name.to_string(),
            players,
            nodes,
            infosets,
            by_label,
            tin: Vec::new(),
            tout: Vec::new(),
        };
        game.index_subtrees();
        game
    }

    fn index_subtrees(&mut self) {
        let n = self.nodes.len();
        self.tin = vec![0; n];
        self.tout = vec![0; n];
        if n == 0 {
            return;
        }
        let mut clock = 0;
        let mut stack = vec![(0usize, false)];
        while let Some((v, done)) = stack.pop() {
            if done {
                self.tout[v] = clock;
                continue;
            }
            self.tin[v] = clock;
            clock += 1;
            stack.push((v, true));
            for c in self.nodes[v].children.iter().rev() {
                stack.push((c.0, false));
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn player_id(&self, name: &str) -> Result<PlayerId> {
        self.players
            .iter()
            .position(|p| p == name)
            .map(PlayerId)
            .ok_or_else(|| Error::UnknownPlayer(name.to_string()))
    }

    pub fn player_name(&self, p: PlayerId) -> &str {
        &self.players[p.0]
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, n: NodeId) -> &Node {
        &self.nodes[n.0]
    }

    pub fn check_node(&self, n: NodeId) -> Result<&Node> {
        self.nodes.get(n.0).ok_or(Error::UnknownNode(n.0))
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    pub fn infosets(&self) -> &[Infoset] {
        &self.infosets
    }

    pub fn infoset(&self, id: InfosetId) -> &Infoset {
        &self.infosets[id.0]
    }

    pub fn infoset_id(&self, label: &str) -> Result<InfosetId> {
        self.by_label
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownInfoset(label.to_string()))
    }

    /// Information sets of `p`, in id order.
    pub fn infosets_of(&self, p: PlayerId) -> Vec<InfosetId> {
        (0..self.infosets.len())
            .map(InfosetId)
            .filter(|&i| self.infosets[i.0].player == p)
            .collect()
    }

    pub fn is_terminal(&self, n: NodeId) -> bool {
        matches!(self.nodes[n.0].kind, NodeKind::Terminal { .. })
    }

    pub fn payoffs(&self, n: NodeId) -> Option<&[f64]> {
        match &self.nodes[n.0].kind {
            NodeKind::Terminal { payoffs } => Some(payoffs),
            _ => None,
        }
    }

    /// Owner and information set of a decision node.
    pub fn decision(&self, n: NodeId) -> Option<(PlayerId, InfosetId)> {
        match self.nodes[n.0].kind {
            NodeKind::Decision { player, infoset } => Some((player, infoset)),
            _ => None,
        }
    }

    pub fn terminals(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.node_ids().filter(|&n| self.is_terminal(n))
    }

    /// Labels of the actions available at `n`; empty at terminals.
    pub fn available_actions(&self, n: NodeId) -> Result<Vec<&str>> {
        let node = self.check_node(n)?;
        Ok(node
            .children
            .iter()
            .map(|c| self.nodes[c.0].action.as_deref().unwrap_or(""))
            .collect())
    }

    pub fn action_label(&self, n: NodeId) -> &str {
        self.nodes[n.0].action.as_deref().unwrap_or("")
    }

    pub fn child_by_label(&self, n: NodeId, label: &str) -> Option<NodeId> {
        self.nodes[n.0]
            .children
            .iter()
            .copied()
            .find(|c| self.nodes[c.0].action.as_deref() == Some(label))
    }

    /// Nodes from the root to `n`, inclusive.
    pub fn path(&self, n: NodeId) -> Vec<NodeId> {
        let mut out = vec![n];
        let mut cur = n;
        while let Some(p) = self.nodes[cur.0].parent {
            out.push(p);
            cur = p;
        }
        out.reverse();
        out
    }

    /// Action labels on the root path of `n`.
    pub fn history(&self, n: NodeId) -> Vec<&str> {
        self.path(n)[1..].iter().map(|&m| self.action_label(m)).collect()
    }

    /// Follows action labels from the root.
    pub fn find_history<S: AsRef<str>>(&self, labels: &[S]) -> Option<NodeId> {
        let mut cur = self.root();
        for l in labels {
            cur = self.child_by_label(cur, l.as_ref())?;
        }
        Some(cur)
    }

    /// Preorder entry time of `n`; a subtree occupies `tin(n)..tout(n)`.
    pub(crate) fn tin(&self, n: NodeId) -> usize {
        self.tin[n.0]
    }

    pub(crate) fn tout(&self, n: NodeId) -> usize {
        self.tout[n.0]
    }

    /// True when `desc` lies in the subtree rooted at `anc` (including `anc`).
    pub fn in_subtree(&self, anc: NodeId, desc: NodeId) -> bool {
        self.tin[anc.0] <= self.tin[desc.0] && self.tin[desc.0] < self.tout[anc.0]
    }

    /// True when `later` strictly extends `earlier`.
    pub fn extends(&self, later: NodeId, earlier: NodeId) -> bool {
        later != earlier && self.in_subtree(earlier, later)
    }

    /// Nodes in the subtree of `n`, in preorder.
    pub fn subtree(&self, n: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![n];
        while let Some(v) = stack.pop() {
            out.push(v);
            for c in self.nodes[v.0].children.iter().rev() {
                stack.push(*c);
            }
        }
        out
    }

    /// Edge probabilities at a chance node, aligned with its children.
    pub fn chance_probs(&self, n: NodeId) -> Vec<f64> {
        self.nodes[n.0]
            .children
            .iter()
            .map(|c| self.nodes[c.0].chance_prob.unwrap_or(f64::NAN))
            .collect()
    }

    /// Number of pure strategies of `p`, as a float to survive overflow.
    pub fn pure_strategy_count(&self, p: PlayerId) -> f64 {
        self.infosets_of(p)
            .iter()
            .map(|&i| self.infosets[i.0].actions.len() as f64)
            .product()
    }

    /// Structural equality: same tree shape, labels, owners, partitions
    /// (up to infoset ids) and payoffs; chance probabilities within 1e-12.
    pub fn structurally_eq(&self, other: &Game) -> bool {
        if self.name != other.name || self.players != other.players || self.len() != other.len() {
            return false;
        }
        let mut map: HashMap<NodeId, NodeId> = HashMap::new();
        let mut stack = vec![(self.root(), other.root())];
        while let Some((a, b)) = stack.pop() {
            let (na, nb) = (self.node(a), other.node(b));
            if na.children.len() != nb.children.len() {
                return false;
            }
            match (&na.kind, &nb.kind) {
                (NodeKind::Terminal { payoffs: x }, NodeKind::Terminal { payoffs: y }) => {
                    if x != y {
                        return false;
                    }
                }
                (NodeKind::Chance, NodeKind::Chance) => {}
                (
                    NodeKind::Decision { player: p, infoset: i },
                    NodeKind::Decision { player: q, infoset: j },
                ) => {
                    if p != q || self.infoset(*i).label != other.infoset(*j).label {
                        return false;
                    }
                }
                _ => return false,
            }
            for &ca in &na.children {
                let label = self.action_label(ca);
                let Some(cb) = other.child_by_label(b, label) else {
                    return false;
                };
                let (pa, pb) = (self.node(ca).chance_prob, other.node(cb).chance_prob);
                match (pa, pb) {
                    (Some(x), Some(y)) if (x - y).abs() <= 1e-12 => {}
                    (None, None) => {}
                    _ => return false,
                }
                stack.push((ca, cb));
            }
            map.insert(a, b);
        }
        map.len() == self.len()
    }

    /// Copy of the game with the node moved into the information set labelled
    /// `label` (created if missing). The result is not validated; this exists
    /// to build deliberately broken partitions for testing checkers.
    pub fn with_node_in_infoset(&self, n: NodeId, label: &str) -> Game {
        let mut raw = self.to_raw();
        if let RawKind::Decision { infoset, .. } = &mut raw[n.0].kind {
            *infoset = label.to_string();
        }
        Game::assemble(&self.name, self.players.clone(), raw)
    }

    pub(crate) fn to_raw(&self) -> Vec<RawNode> {
        self.nodes
            .iter()
            .map(|n| RawNode {
                parent: n.parent.map(|p| p.0),
                action: n.action.clone(),
                chance_prob: n.chance_prob,
                kind: match &n.kind {
                    NodeKind::Decision { player, infoset } => RawKind::Decision {
                        player: *player,
                        infoset: self.infosets[infoset.0].label.clone(),
                    },
                    NodeKind::Chance => RawKind::Chance,
                    NodeKind::Terminal { payoffs } => RawKind::Terminal { payoffs: payoffs.clone() },
                },
            })
            .collect()
    }

    /// Copy with a new name.
    pub fn renamed(&self, name: &str) -> Game {
        let mut g = self.clone();
        g.name = name.to_string();
        g
    }

    /// Copy that keeps only the actions accepted by `keep` at each node.
    ///
    /// Information sets that lose all members disappear. Returns the new game
    /// and, for each new node, the node it was copied from.
    pub fn restrict(&self, keep: impl Fn(NodeId, &str) -> bool) -> (Game, Vec<NodeId>) {
        let mut raw = Vec::new();
        let mut source = Vec::new();
        let mut stack = vec![(self.root(), None::<usize>)];
        while let Some((v, parent)) = stack.pop() {
            let node = self.node(v);
            let idx = raw.len();
            raw.push(RawNode {
                parent,
                action: node.action.clone(),
                chance_prob: node.chance_prob,
                kind: match &node.kind {
                    NodeKind::Decision { player, infoset } => RawKind::Decision {
                        player: *player,
                        infoset: self.infosets[infoset.0].label.clone(),
                    },
                    NodeKind::Chance => RawKind::Chance,
                    NodeKind::Terminal { payoffs } => RawKind::Terminal { payoffs: payoffs.clone() },
                },
            });
            source.push(v);
            for &c in node.children.iter().rev() {
                if keep(v, self.action_label(c)) {
                    stack.push((c, Some(idx)));
                }
            }
        }
        (Game::assemble(&self.name, self.players.clone(), raw), source)
    }
}
