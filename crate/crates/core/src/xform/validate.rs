use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::XGame;
use crate::error::{Error, Result};
use crate::game::{Game, InfosetId, NodeId, PlayerId};
use crate::recall::infoset_order;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub pass: bool,
    /// Two transformed nodes demonstrating the failure.
    pub witness: Option<(NodeId, NodeId)>,
    pub taker: Option<String>,
}

impl PropertyCheck {
    fn ok() -> PropertyCheck {
        PropertyCheck { pass: true, witness: None, taker: None }
    }

    fn fail(&mut self, taker: &str, a: NodeId, b: NodeId) {
        if self.pass {
            *self = PropertyCheck { pass: false, witness: Some((a, b)), taker: Some(taker.to_string()) };
        }
    }
}

/// Results for the five partition properties of a transform:
///
/// 1. not taking X leaves the taker's information sets unchanged;
/// 2. after X, histories the taker could not tell apart stay pooled;
/// 3. the taker's precedence order on information sets is transitive;
/// 4. pooled X histories stay pooled along identical continuations;
/// 5. the position at which X was taken is not remembered.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XPropertyReport {
    pub p1: PropertyCheck,
    pub p2: PropertyCheck,
    pub p3: PropertyCheck,
    pub p4: PropertyCheck,
    pub p5: PropertyCheck,
}

impl XPropertyReport {
    pub fn all_pass(&self) -> bool {
        self.checks().iter().all(|(_, c)| c.pass)
    }

    pub fn checks(&self) -> [(&'static str, &PropertyCheck); 5] {
        [("p1", &self.p1), ("p2", &self.p2), ("p3", &self.p3), ("p4", &self.p4), ("p5", &self.p5)]
    }

    /// Names of the failing properties.
    pub fn failing(&self) -> Vec<&'static str> {
        self.checks().iter().filter(|(_, c)| !c.pass).map(|(n, _)| *n).collect()
    }
}

fn check_origin(orig: &Game, xg: &XGame) -> Result<()> {
    let h = &xg.game;
    if xg.origin.len() != h.len() {
        return Err(Error::Origin(format!("{} origins for {} nodes", xg.origin.len(), h.len())));
    }
    for n in h.node_ids() {
        let o = &xg.origin[n.0];
        if o.source.0 >= orig.len() {
            return Err(Error::Origin(format!("node {} maps to missing node {}", n.0, o.source.0)));
        }
        if h.payoffs(n) != orig.payoffs(o.source) {
            return Err(Error::Origin(format!("node {} and its source {} differ in payoffs", n.0, o.source.0)));
        }
        let owner = |g: &Game, m: NodeId| g.decision(m).map(|(p, _)| p);
        if owner(h, n) != owner(orig, o.source) {
            return Err(Error::Origin(format!("node {} and its source {} differ in owner", n.0, o.source.0)));
        }
        if o.x_taken.iter().any(|&(_, s)| !h.extends(n, s)) {
            return Err(Error::Origin(format!("node {}: X site is not an ancestor", n.0)));
        }
    }
    Ok(())
}

struct Row {
    node: NodeId,
    xinf: InfosetId,
    strip: NodeId,
    oinf: InfosetId,
    others: Vec<PlayerId>,
    took: bool,
}

/// Exhaustively checks the five properties for every taker of `xg`.
pub fn validate_x_properties(orig: &Game, xg: &XGame) -> Result<XPropertyReport> {
    check_origin(orig, xg)?;
    let mut r = XPropertyReport {
        p1: PropertyCheck::ok(),
        p2: PropertyCheck::ok(),
        p3: PropertyCheck::ok(),
        p4: PropertyCheck::ok(),
        p5: PropertyCheck::ok(),
    };
    let h = &xg.game;
    for &(t, _) in &xg.takers {
        let name = h.player_name(t).to_string();
        let rows: Vec<Row> = h
            .node_ids()
            .filter_map(|n| {
                let (p, xinf) = h.decision(n)?;
                if p != t {
                    return None;
                }
                let strip = xg.strip(n);
                let (_, oinf) = orig.decision(strip)?;
                let mut others: Vec<PlayerId> =
                    xg.origin[n.0].x_taken.iter().map(|&(q, _)| q).filter(|&q| q != t).collect();
                others.sort();
                Some(Row { node: n, xinf, strip, oinf, others, took: xg.took_x(n, t) })
            })
            .collect();

        // Property 1, plus no information set mixing X and non-X histories.
        let mut by_key: HashMap<(InfosetId, &[PlayerId]), &Row> = HashMap::new();
        let mut by_set: HashMap<InfosetId, &Row> = HashMap::new();
        for row in &rows {
            if let Some(first) = by_set.get(&row.xinf) {
                if first.took != row.took {
                    r.p1.fail(&name, first.node, row.node);
                }
            } else {
                by_set.insert(row.xinf, row);
            }
            if row.took {
                continue;
            }
            let first = *by_key.entry((row.oinf, &row.others)).or_insert(row);
            if first.xinf != row.xinf {
                r.p1.fail(&name, first.node, row.node);
            }
            let first = by_set[&row.xinf];
            if !first.took && (first.oinf, &first.others) != (row.oinf, &row.others) {
                r.p1.fail(&name, first.node, row.node);
            }
        }

        // Properties 2 and 5 on X-taken histories.
        let taken: Vec<&Row> = rows.iter().filter(|r| r.took).collect();
        let mut groups: HashMap<(InfosetId, &[PlayerId]), Vec<&Row>> = HashMap::new();
        for row in &taken {
            groups.entry((row.oinf, &row.others)).or_default().push(row);
        }
        let mut keys: Vec<_> = groups.keys().copied().collect();
        keys.sort();
        for key in keys {
            let g = &groups[&key];
            'pairs: for (i, a) in g.iter().enumerate() {
                for b in &g[i + 1..] {
                    if a.xinf != b.xinf {
                        if a.strip == b.strip {
                            r.p5.fail(&name, a.node, b.node);
                        } else {
                            r.p2.fail(&name, a.node, b.node);
                        }
                        if !r.p2.pass && !r.p5.pass {
                            break 'pairs;
                        }
                    }
                }
            }
        }

        let order = infoset_order(h, t)?;
        if let Some((a, _, c)) = order.intransitive_witness {
            r.p3.fail(&name, h.infoset(a).members[0], h.infoset(c).members[0]);
        }

        check_closure(h, t, &taken, &name, &mut r.p4);
    }
    Ok(r)
}

/// Pooled X-taken histories extended by the same labels must stay pooled
/// whenever the extensions offer the same actions.
fn check_closure(h: &Game, t: PlayerId, taken: &[&Row], name: &str, out: &mut PropertyCheck) {
    let mut members: HashMap<InfosetId, Vec<NodeId>> = HashMap::new();
    for row in taken {
        members.entry(row.xinf).or_default().push(row.node);
    }
    let mut sets: Vec<_> = members.into_iter().filter(|(_, m)| m.len() > 1).collect();
    sets.sort();
    for (_, nodes) in sets {
        let mut path_ids: HashMap<(usize, &str), usize> = HashMap::new();
        let mut seen: HashMap<(usize, BTreeSet<&str>), (NodeId, InfosetId)> = HashMap::new();
        for &m in &nodes {
            let mut stack: Vec<(NodeId, usize)> = h.node(m).children.iter().map(|&c| (c, 0)).collect();
            while let Some((v, parent)) = stack.pop() {
                let next = path_ids.len() + 1;
                let path = *path_ids.entry((parent, h.action_label(v))).or_insert(next);
                if let Some((p, set)) = h.decision(v) {
                    if p == t {
                        let actions: BTreeSet<&str> = h.infoset(set).actions.iter().map(String::as_str).collect();
                        match seen.get(&(path, actions.clone())) {
                            Some(&(d0, s0)) if s0 != set => {
                                out.fail(name, d0, v);
                                return;
                            }
                            Some(_) => {}
                            None => {
                                seen.insert((path, actions), (v, set));
                            }
                        }
                    }
                }
                stack.extend(h.node(v).children.iter().map(|&c| (c, path)));
            }
        }
    }
}
