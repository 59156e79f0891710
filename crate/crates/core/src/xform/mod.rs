//! The forgetting transformation `Γ → Γ^X`.
//!
//! At each of the taker's decision nodes in `x_sites` a new action X is
//! offered before the original choice. Taking X leads to a copy of the node,
//! and from there on the taker's information sets are pooled by memory class:
//! two X-taken histories share an information set when their original
//! information sets map to the same class and offer the same actions. Other
//! players observe that X was taken but nothing else changes for them.
//!
//! Pooling is closed forward: if two X-taken histories are pooled, their
//! extensions by the same actions are pooled as well whenever the action sets
//! agree. With [`ForgetSpec::strict`] the transform errors instead of
//! closing.

mod validate;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{Game, NodeId, NodeKind, PlayerId, RawKind, RawNode};

pub use validate::{validate_x_properties, PropertyCheck, XPropertyReport};

/// Who may take X, what they forget, and where X is offered.
///
/// Information sets are named by label. Labels of sets that were already
/// relabelled by an earlier transform are matched by their part before the
/// first `/`. Sets missing from `memory_classes` keep a class of their own.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ForgetSpec {
    pub taker: String,
    pub memory_classes: BTreeMap<String, String>,
    /// `None` offers X at every information set of the taker.
    pub x_sites: Option<BTreeSet<String>>,
    pub x_label: String,
    pub strict: bool,
}

impl ForgetSpec {
    pub fn new(taker: &str) -> ForgetSpec {
        ForgetSpec {
            taker: taker.to_string(),
            memory_classes: BTreeMap::new(),
            x_sites: None,
            x_label: "X".into(),
            strict: false,
        }
    }

    pub fn class(mut self, infoset: &str, class: &str) -> ForgetSpec {
        self.memory_classes.insert(infoset.to_string(), class.to_string());
        self
    }

    pub fn sites<I, S>(mut self, sites: I) -> ForgetSpec
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.x_sites = Some(sites.into_iter().map(Into::into).collect());
        self
    }

    pub fn x_label(mut self, label: &str) -> ForgetSpec {
        self.x_label = label.to_string();
        self
    }

    pub fn strict(mut self, strict: bool) -> ForgetSpec {
        self.strict = strict;
        self
    }

    pub fn class_of<'a>(&'a self, infoset: &'a str) -> &'a str {
        self.memory_classes.get(infoset).map(String::as_str).unwrap_or(infoset)
    }

    fn is_site(&self, infoset: &str) -> bool {
        self.x_sites.as_ref().map_or(true, |s| s.contains(infoset))
    }
}

/// Where a transformed node comes from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NodeOrigin {
    /// The node of the untransformed game reached by deleting X from the path.
    pub source: NodeId,
    /// For each player who took X on the path: the node where X was chosen.
    pub x_taken: Vec<(PlayerId, NodeId)>,
}

#[derive(Clone, Debug)]
pub struct XGame {
    pub game: Game,
    pub origin: Vec<NodeOrigin>,
    /// Takers in application order, with their X labels.
    pub takers: Vec<(PlayerId, String)>,
}

pub(crate) fn base_label(label: &str) -> &str {
    label.split('/').next().unwrap_or(label)
}

fn with_suffix(label: &str, suffix: &str) -> String {
    let mut parts: Vec<&str> = label.split('/').collect();
    let base = parts.remove(0);
    parts.push(suffix);
    parts.sort_unstable();
    parts.dedup();
    let mut out = base.to_string();
    for p in parts {
        out.push('/');
        out.push_str(p);
    }
    out
}

fn suffix_part(label: &str) -> &str {
    label.find('/').map_or("", |k| &label[k..])
}

impl XGame {
    /// The untransformed game viewed as a transform with no takers.
    pub fn identity(g: &Game) -> XGame {
        let origin = g.node_ids().map(|n| NodeOrigin { source: n, x_taken: Vec::new() }).collect();
        XGame { game: g.clone(), origin, takers: Vec::new() }
    }

    /// The first taker.
    pub fn taker(&self) -> PlayerId {
        self.takers[0].0
    }

    pub fn took_x(&self, n: NodeId, p: PlayerId) -> bool {
        self.origin[n.0].x_taken.iter().any(|&(q, _)| q == p)
    }

    /// Image of `n` in the original game under deletion of X.
    pub fn strip(&self, n: NodeId) -> NodeId {
        self.origin[n.0].source
    }

    /// Nodes where some taker may choose X.
    pub fn x_sites(&self) -> BTreeSet<NodeId> {
        self.origin.iter().flat_map(|o| o.x_taken.iter().map(|&(_, s)| s)).collect()
    }

    /// Variant in which every taker always takes X: the other actions at
    /// X sites are removed.
    pub fn committed(&self) -> XGame {
        let sites = self.x_sites();
        let labels: HashMap<PlayerId, &str> = self.takers.iter().map(|(p, l)| (*p, l.as_str())).collect();
        let g = &self.game;
        let (game, src) = g.restrict(|n, a| {
            if !sites.contains(&n) {
                return true;
            }
            match g.decision(n) {
                Some((p, _)) => labels.get(&p) == Some(&a),
                None => true,
            }
        });
        let mut new_of = vec![usize::MAX; g.len()];
        for (k, s) in src.iter().enumerate() {
            new_of[s.0] = k;
        }
        let origin = src
            .iter()
            .map(|s| {
                let o = &self.origin[s.0];
                NodeOrigin {
                    source: o.source,
                    x_taken: o.x_taken.iter().map(|&(p, n)| (p, NodeId(new_of[n.0]))).collect(),
                }
            })
            .collect();
        XGame { game, origin, takers: self.takers.clone() }
    }
}

/// Applies one forget specification to an untransformed game.
pub fn apply_x(g: &Game, spec: &ForgetSpec) -> Result<XGame> {
    apply_x_to(&XGame::identity(g), spec)
}

/// Applies the specifications in order, composing origin maps.
pub fn apply_x_multi(g: &Game, specs: &[ForgetSpec]) -> Result<XGame> {
    let mut cur = XGame::identity(g);
    let mut seen = BTreeSet::new();
    for s in specs {
        if !seen.insert(s.taker.as_str()) {
            return Err(Error::ForgetSpec(format!("player {} appears twice", s.taker)));
        }
        cur = apply_x_to(&cur, s)?;
    }
    Ok(cur)
}

enum Frame {
    Enter {
        b: NodeId,
        parent: Option<usize>,
        action: Option<String>,
        prob: Option<f64>,
        // New index of the node where the taker chose X, once inside the X region.
        site: Option<usize>,
        x_copy: bool,
    },
    Exit {
        b: NodeId,
        inserted: bool,
    },
}

/// Applies a forget specification on top of an earlier transform.
pub fn apply_x_to(base: &XGame, spec: &ForgetSpec) -> Result<XGame> {
    let g = &base.game;
    if let Some(v) = g.validate_structure().into_iter().next() {
        return Err(Error::Invalid(v));
    }
    let taker = g
        .player_id(&spec.taker)
        .map_err(|_| Error::ForgetSpec(format!("unknown taker {}", spec.taker)))?;
    if base.takers.iter().any(|(p, _)| *p == taker) {
        return Err(Error::ForgetSpec(format!("{} already has X", spec.taker)));
    }
    let owned: BTreeSet<&str> = g.infosets_of(taker).iter().map(|&i| base_label(&g.infoset(i).label)).collect();
    if owned.is_empty() {
        return Err(Error::NoDecisions(spec.taker.clone()));
    }
    for k in spec.memory_classes.keys() {
        if !owned.contains(k.as_str()) {
            return Err(Error::ForgetSpec(format!("{k} is not an information set of {}", spec.taker)));
        }
    }
    if let Some(sites) = &spec.x_sites {
        if sites.is_empty() {
            return Err(Error::ForgetSpec("x_sites is empty".into()));
        }
        if let Some(s) = sites.iter().find(|s| !owned.contains(s.as_str())) {
            return Err(Error::ForgetSpec(format!("{s} is not an information set of {}", spec.taker)));
        }
    }
    if !crate::game::is_atom(&spec.x_label) {
        return Err(Error::ForgetSpec(format!("`{}` is not a valid action label", spec.x_label)));
    }
    let observed = format!("X@{}", spec.taker);

    let mut raw: Vec<RawNode> = Vec::with_capacity(g.len() * 2);
    let mut origin: Vec<NodeOrigin> = Vec::with_capacity(g.len() * 2);
    // Taker's X-region nodes with their pooling key.
    let mut pooled: Vec<(usize, (String, String, Vec<String>))> = Vec::new();
    let mut path_map: HashMap<NodeId, usize> = HashMap::new();
    let mut stack = vec![Frame::Enter { b: g.root(), parent: None, action: None, prob: None, site: None, x_copy: false }];

    while let Some(frame) = stack.pop() {
        let (b, parent, action, prob, site, x_copy) = match frame {
            Frame::Exit { b, inserted } => {
                if inserted {
                    path_map.remove(&b);
                }
                continue;
            }
            Frame::Enter { b, parent, action, prob, site, x_copy } => (b, parent, action, prob, site, x_copy),
        };
        let idx = raw.len();
        let node = g.node(b);
        let mut is_site = false;
        let kind = match &node.kind {
            NodeKind::Terminal { payoffs } => RawKind::Terminal { payoffs: payoffs.clone() },
            NodeKind::Chance => RawKind::Chance,
            NodeKind::Decision { player, infoset } => {
                let label = &g.infoset(*infoset).label;
                if *player == taker {
                    if site.is_some() {
                        let actions: BTreeSet<String> =
                            node.children.iter().map(|&c| g.action_label(c).to_string()).collect();
                        let class = spec.class_of(base_label(label)).to_string();
                        pooled.push((idx, (class, suffix_part(label).to_string(), actions.into_iter().collect())));
                    } else {
                        is_site = spec.is_site(base_label(label));
                    }
                    RawKind::Decision { player: taker, infoset: label.clone() }
                } else if site.is_some() {
                    RawKind::Decision { player: *player, infoset: with_suffix(label, &observed) }
                } else {
                    RawKind::Decision { player: *player, infoset: label.clone() }
                }
            }
        };
        if is_site {
            if let Some(&c) = node.children.iter().find(|&&c| g.action_label(c) == spec.x_label) {
                return Err(Error::LabelCollision { label: spec.x_label.clone(), node: c.0 });
            }
        }
        raw.push(RawNode { parent, action, chance_prob: prob, kind });
        let mut x_taken: Vec<(PlayerId, NodeId)> = base.origin[b.0]
            .x_taken
            .iter()
            .map(|&(p, s)| (p, NodeId(path_map[&s])))
            .collect();
        if let Some(s) = site {
            x_taken.push((taker, NodeId(s)));
        }
        origin.push(NodeOrigin { source: base.origin[b.0].source, x_taken });

        let inserted = !x_copy;
        if inserted {
            path_map.insert(b, idx);
        }
        stack.push(Frame::Exit { b, inserted });
        for &c in node.children.iter().rev() {
            stack.push(Frame::Enter {
                b: c,
                parent: Some(idx),
                action: node_action(g, c),
                prob: g.node(c).chance_prob,
                site,
                x_copy: false,
            });
        }
        if is_site {
            stack.push(Frame::Enter {
                b,
                parent: Some(idx),
                action: Some(spec.x_label.clone()),
                prob: None,
                site: Some(idx),
                x_copy: true,
            });
        }
    }

    label_pools(&mut raw, &pooled, spec)?;
    let takers = base.takers.iter().cloned().chain([(taker, spec.x_label.clone())]).collect();
    let game = Game::assemble(g.name(), g.players().to_vec(), raw);
    Ok(XGame { game, origin, takers })
}

fn node_action(g: &Game, c: NodeId) -> Option<String> {
    g.node(c).action.clone()
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.0[hi] = lo;
        true
    }
}

/// Groups the taker's X-region nodes, closes the grouping forward and writes
/// the resulting labels into `raw`.
fn label_pools(raw: &mut [RawNode], pooled: &[(usize, (String, String, Vec<String>))], spec: &ForgetSpec) -> Result<()> {
    if pooled.is_empty() {
        return Ok(());
    }
    let slot: HashMap<usize, usize> = pooled.iter().enumerate().map(|(k, (i, _))| (*i, k)).collect();
    let mut uf = UnionFind((0..pooled.len()).collect());
    let mut first_of_key: HashMap<&(String, String, Vec<String>), usize> = HashMap::new();
    for (k, (_, key)) in pooled.iter().enumerate() {
        let f = *first_of_key.entry(key).or_insert(k);
        uf.union(f, k);
    }
    let initial: Vec<usize> = (0..pooled.len()).map(|k| uf.find(k)).collect();

    let mut children: Vec<Vec<usize>> = vec![Vec::new(); raw.len()];
    for (i, r) in raw.iter().enumerate() {
        if let Some(p) = r.parent {
            children[p].push(i);
        }
    }
    let mut label_ids: HashMap<&str, u32> = HashMap::new();
    let label_id: Vec<u32> = raw
        .iter()
        .map(|r| {
            let l = r.action.as_deref().unwrap_or("");
            let next = label_ids.len() as u32;
            *label_ids.entry(l).or_insert(next)
        })
        .collect();

    loop {
        let mut changed = false;
        // (group, relative path, action set) -> first slot seen.
        let mut seen: HashMap<(usize, usize, &Vec<String>), usize> = HashMap::new();
        let mut path_ids: HashMap<(usize, u32), usize> = HashMap::new();
        for (k, (m, _)) in pooled.iter().enumerate() {
            let group = uf.find(k);
            let mut stack: Vec<(usize, usize)> = children[*m].iter().map(|&c| (c, 0usize)).collect();
            while let Some((v, parent_path)) = stack.pop() {
                let next = path_ids.len() + 1;
                let path = *path_ids.entry((parent_path, label_id[v])).or_insert(next);
                if let Some(&d) = slot.get(&v) {
                    let key = (group, path, &pooled[d].1 .2);
                    match seen.get(&key) {
                        Some(&d0) => {
                            if uf.find(d0) != uf.find(d) {
                                if spec.strict && initial[d0] != initial[d] {
                                    return Err(Error::ClosureViolation(pooled[d0].0, pooled[d].0));
                                }
                                uf.union(d0, d);
                                changed = true;
                            }
                        }
                        None => {
                            seen.insert(key, d);
                        }
                    }
                }
                stack.extend(children[v].iter().map(|&c| (c, path)));
            }
        }
        if !changed {
            break;
        }
    }

    // Tag labels with the action set only when a class offers several.
    let mut sets_per_class: HashMap<(&str, &str), BTreeSet<&Vec<String>>> = HashMap::new();
    for (_, (class, suffix, actions)) in pooled {
        sets_per_class.entry((class, suffix)).or_default().insert(actions);
    }
    let own_label = |(class, suffix, actions): &(String, String, Vec<String>)| {
        let mut l = format!("X@{}:{}", spec.taker, class);
        if sets_per_class[&(class.as_str(), suffix.as_str())].len() > 1 {
            l.push_str(&format!("[{}]", actions.join(",")));
        }
        l.push_str(suffix);
        l
    };
    let mut group_label: HashMap<usize, String> = HashMap::new();
    for (k, (_, key)) in pooled.iter().enumerate() {
        let l = own_label(key);
        let e = group_label.entry(uf.find(k)).or_insert_with(|| l.clone());
        if l < *e {
            *e = l;
        }
    }
    for (k, (i, _)) in pooled.iter().enumerate() {
        let label = group_label[&uf.find(k)].clone();
        if let RawKind::Decision { infoset, .. } = &mut raw[*i].kind {
            *infoset = label;
        }
    }
    Ok(())
}
