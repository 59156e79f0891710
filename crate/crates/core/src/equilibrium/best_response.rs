//! Best responses that stay exact under imperfect recall.
//!
//! A player's information sets are split in two. Sets whose members all
//! share the same record of the player's own earlier choices are solved by
//! backward induction, weighting members by their reach probability. The
//! remaining sets are searched: exhaustively over pure choices, and for
//! absent-minded sets over a behavioral grid refined by golden-section
//! coordinate ascent, since there a mixed choice can beat every pure one.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::profile::{BehavioralProfile, PureStrategy};
use crate::error::{Error, Result};
use crate::game::{Game, InfosetId, NodeId, NodeKind, PlayerId};

/// Largest pure strategy or grid space searched exhaustively.
pub const SEARCH_CAP: f64 = 1e7;

/// Default grid step for behavioral search at absent-minded sets.
pub const DEFAULT_STEP: f64 = 0.05;

#[derive(Clone, Debug, PartialEq)]
pub struct BestResponse {
    pub value: f64,
    /// The input profile with the responder's optimal choices substituted.
    pub profile: BehavioralProfile,
}

/// Number of grid points on the simplex over `k` actions with step `1/m`.
pub(crate) fn simplex_points(k: usize, m: usize) -> f64 {
    // C(m + k - 1, k - 1)
    let mut c = 1.0;
    for i in 1..k {
        c = c * (m + i) as f64 / i as f64;
    }
    c
}

pub(crate) fn simplex_grid(k: usize, m: usize) -> Vec<Vec<f64>> {
    fn rec(k: usize, left: usize, m: usize, cur: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
        if k == 1 {
            cur.push(left as f64 / m as f64);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for take in (0..=left).rev() {
            cur.push(take as f64 / m as f64);
            rec(k - 1, left - take, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, m, m, &mut Vec::new(), &mut out);
    out
}

pub(crate) fn grid_steps(step: f64) -> Result<usize> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::Domain(format!("grid step {step} outside (0, 1]")));
    }
    Ok((1.0 / step).round().max(1.0) as usize)
}

struct Search<'a> {
    g: &'a Game,
    sigma: &'a BehavioralProfile,
    p: PlayerId,
    roots: &'a [(NodeId, f64)],
    region: Vec<NodeId>,
    // Searched sets and their fixed distributions for the current evaluation.
    fixed: HashMap<InfosetId, Vec<f64>>,
}

struct Eval {
    value: f64,
    choices: HashMap<InfosetId, usize>,
}

impl<'a> Search<'a> {
    fn new(g: &'a Game, sigma: &'a BehavioralProfile, p: PlayerId, roots: &'a [(NodeId, f64)]) -> Search<'a> {
        let mut region = Vec::new();
        for &(r, _) in roots {
            region.extend(g.subtree(r));
        }
        Search { g, sigma, p, roots, region, fixed: HashMap::new() }
    }

    fn own_set(&self, v: NodeId) -> Option<InfosetId> {
        match self.g.decision(v) {
            Some((q, s)) if q == self.p => Some(s),
            _ => None,
        }
    }

    /// Information sets of the responder met twice on one path.
    fn absent_minded(&self) -> HashSet<InfosetId> {
        let mut out = HashSet::new();
        for &(r, _) in self.roots {
            let mut count: HashMap<InfosetId, usize> = HashMap::new();
            let mut stack = vec![(r, false)];
            while let Some((v, leaving)) = stack.pop() {
                let s = self.own_set(v);
                if leaving {
                    if let Some(s) = s {
                        *count.get_mut(&s).unwrap() -= 1;
                    }
                    continue;
                }
                if let Some(s) = s {
                    let c = count.entry(s).or_insert(0);
                    if *c > 0 {
                        out.insert(s);
                    }
                    *c += 1;
                }
                stack.push((v, true));
                for &c in self.g.node(v).children.iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    /// Grows `searched` until every other set has members with identical
    /// records of the responder's choices at unsearched multi-action sets.
    fn split(&self, mut searched: HashSet<InfosetId>) -> HashSet<InfosetId> {
        loop {
            let mut seq: HashMap<NodeId, u32> = HashMap::new();
            let mut ids: HashMap<(u32, InfosetId, usize), u32> = HashMap::new();
            for &(r, _) in self.roots {
                seq.insert(r, 0);
            }
            let mut first_seq: HashMap<InfosetId, u32> = HashMap::new();
            let mut bad: BTreeSet<InfosetId> = BTreeSet::new();
            for &v in &self.region {
                let sv = seq[&v];
                let own = self.own_set(v);
                if let Some(s) = own {
                    if !searched.contains(&s) && *first_seq.entry(s).or_insert(sv) != sv {
                        bad.insert(s);
                    }
                }
                let node = self.g.node(v);
                for (k, &c) in node.children.iter().enumerate() {
                    let sc = match own {
                        Some(s) if !searched.contains(&s) && node.children.len() > 1 => {
                            let next = ids.len() as u32 + 1;
                            *ids.entry((sv, s, k)).or_insert(next)
                        }
                        _ => sv,
                    };
                    seq.insert(c, sc);
                }
            }
            if bad.is_empty() {
                return searched;
            }
            searched.extend(bad);
        }
    }

    fn evaluate(&self) -> Eval {
        let g = self.g;
        // Reach weights with the responder's free choices factored out.
        let mut w: HashMap<NodeId, f64> = HashMap::with_capacity(self.region.len());
        for &(r, mu) in self.roots {
            w.insert(r, mu);
        }
        for &v in &self.region {
            let wv = w[&v];
            let node = g.node(v);
            for (k, &c) in node.children.iter().enumerate() {
                let f = match (&node.kind, self.own_set(v)) {
                    (NodeKind::Chance, _) => g.node(c).chance_prob.unwrap_or(0.0),
                    (_, Some(s)) => self.fixed.get(&s).map_or(1.0, |d| d[k]),
                    (NodeKind::Decision { infoset, .. }, None) => self.sigma.probs[infoset.0][k],
                    _ => 0.0,
                };
                w.insert(c, wv * f);
            }
        }
        let mut members: HashMap<InfosetId, Vec<NodeId>> = HashMap::new();
        for &v in &self.region {
            if let Some(s) = self.own_set(v) {
                if !self.fixed.contains_key(&s) {
                    members.entry(s).or_default().push(v);
                }
            }
        }
        let mut st = Dp { s: self, w, members, memo: HashMap::new(), choices: HashMap::new() };
        let value = self.roots.iter().map(|&(r, mu)| if mu == 0.0 { 0.0 } else { mu * st.value(r) }).sum();
        Eval { value, choices: st.choices }
    }
}

struct Dp<'s, 'a> {
    s: &'s Search<'a>,
    w: HashMap<NodeId, f64>,
    members: HashMap<InfosetId, Vec<NodeId>>,
    memo: HashMap<NodeId, f64>,
    choices: HashMap<InfosetId, usize>,
}

impl Dp<'_, '_> {
    fn value(&mut self, v: NodeId) -> f64 {
        if let Some(&x) = self.memo.get(&v) {
            return x;
        }
        let g = self.s.g;
        let node = g.node(v);
        let x = match &node.kind {
            NodeKind::Terminal { payoffs } => payoffs[self.s.p.0],
            NodeKind::Chance => {
                let mut sum = 0.0;
                for &c in &node.children {
                    let pr = g.node(c).chance_prob.unwrap_or(0.0);
                    if pr != 0.0 {
                        sum += pr * self.value(c);
                    }
                }
                sum
            }
            NodeKind::Decision { player, infoset } => {
                let dist: Option<Vec<f64>> = if *player != self.s.p {
                    Some(self.s.sigma.probs[infoset.0].clone())
                } else {
                    self.s.fixed.get(infoset).cloned()
                };
                match dist {
                    Some(d) => {
                        let mut sum = 0.0;
                        for (k, &c) in node.children.iter().enumerate() {
                            if d[k] != 0.0 {
                                sum += d[k] * self.value(c);
                            }
                        }
                        sum
                    }
                    None => {
                        let a = self.decide(*infoset);
                        self.value(node.children[a])
                    }
                }
            }
        };
        self.memo.insert(v, x);
        x
    }

    fn decide(&mut self, set: InfosetId) -> usize {
        if let Some(&a) = self.choices.get(&set) {
            return a;
        }
        let g = self.s.g;
        let members = self.members.get(&set).cloned().unwrap_or_default();
        let k = g.infoset(set).actions.len();
        let mut q = vec![0.0; k];
        for &h in &members {
            let wh = self.w.get(&h).copied().unwrap_or(0.0);
            if wh == 0.0 {
                continue;
            }
            for (a, qa) in q.iter_mut().enumerate() {
                *qa += wh * self.value(g.node(h).children[a]);
            }
        }
        let mut best = 0;
        for a in 1..k {
            if q[a] > q[best] + 1e-12 * (1.0 + q[best].abs()) {
                best = a;
            }
        }
        self.choices.insert(set, best);
        best
    }
}

/// Golden-section maximization of `f` on `[lo, hi]`.
fn golden(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-12 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) / 2.0;
    (x, f(x))
}

/// Best response of `p` on the subtrees below `roots`, each weighted by its
/// probability. With a single root of weight one at the game root this is
/// the ordinary best response.
pub(crate) fn optimize(
    g: &Game,
    sigma: &BehavioralProfile,
    p: PlayerId,
    roots: &[(NodeId, f64)],
    step: f64,
) -> Result<BestResponse> {
    sigma.check(g)?;
    let found = optimize_unchecked(g, sigma, p, roots, step)?;
    Ok(BestResponse { value: found.value, profile: found.apply(sigma) })
}

/// Optimal value and the responder's choices at the sets it touched.
pub(crate) struct Found {
    pub value: f64,
    pub assignment: Vec<(InfosetId, Vec<f64>)>,
}

impl Found {
    pub fn apply(&self, sigma: &BehavioralProfile) -> BehavioralProfile {
        let mut out = sigma.clone();
        for (s, d) in &self.assignment {
            out.probs[s.0] = d.clone();
        }
        out
    }
}

/// [`optimize`] without validating the profile, for callers that already
/// did so and call it many times.
pub(crate) fn optimize_unchecked(
    g: &Game,
    sigma: &BehavioralProfile,
    p: PlayerId,
    roots: &[(NodeId, f64)],
    step: f64,
) -> Result<Found> {
    let m = grid_steps(step)?;
    let mut search = Search::new(g, sigma, p, roots);
    let am = search.absent_minded();
    let searched = search.split(am.clone());
    let mut pure: Vec<InfosetId> = searched.iter().copied().filter(|s| !am.contains(s)).collect();
    pure.sort();
    let mut beh: Vec<InfosetId> = am.into_iter().collect();
    beh.sort();

    let arity = |s: &InfosetId| g.infoset(*s).actions.len();
    let pure_count: f64 = pure.iter().map(|s| arity(s) as f64).product();
    let grid_count: f64 = beh.iter().map(|s| simplex_points(arity(s), m)).product();
    if pure_count * grid_count > SEARCH_CAP {
        return Err(Error::Refused {
            what: format!("best-response search for {}", g.player_name(p)),
            size: pure_count * grid_count,
            cap: SEARCH_CAP,
        });
    }
    let grids: Vec<Vec<Vec<f64>>> = beh.iter().map(|s| simplex_grid(arity(s), m)).collect();

    let mut best: Option<(f64, HashMap<InfosetId, Vec<f64>>, HashMap<InfosetId, usize>)> = None;
    let mut odo = vec![0usize; pure.len()];
    loop {
        search.fixed.clear();
        for (s, &a) in pure.iter().zip(&odo) {
            let mut d = vec![0.0; arity(s)];
            d[a] = 1.0;
            search.fixed.insert(*s, d);
        }
        let ev = if beh.is_empty() {
            search.evaluate()
        } else {
            optimize_behavioral(&mut search, &beh, &grids)
        };
        if best.as_ref().map_or(true, |(v, ..)| ev.value > *v + 1e-12 * (1.0 + v.abs())) {
            best = Some((ev.value, search.fixed.clone(), ev.choices));
        }
        // Advance the odometer over pure choices.
        let mut k = 0;
        while k < odo.len() {
            odo[k] += 1;
            if odo[k] < arity(&pure[k]) {
                break;
            }
            odo[k] = 0;
            k += 1;
        }
        if k == odo.len() {
            break;
        }
    }
    let (value, fixed, choices) = best.expect("at least one evaluation");
    let mut assignment: Vec<(InfosetId, Vec<f64>)> = fixed.into_iter().collect();
    for (s, a) in choices {
        let mut d = vec![0.0; arity(&s)];
        d[a] = 1.0;
        assignment.push((s, d));
    }
    assignment.sort_by_key(|(s, _)| *s);
    Ok(Found { value, assignment })
}

/// Grid search over the absent-minded sets followed by coordinate ascent
/// that shifts mass between pairs of actions. Leaves the optimum in
/// `search.fixed`.
fn optimize_behavioral(search: &mut Search<'_>, beh: &[InfosetId], grids: &[Vec<Vec<f64>>]) -> Eval {
    let mut idx = vec![0usize; beh.len()];
    let mut best: Option<(f64, Vec<Vec<f64>>)> = None;
    loop {
        for (k, s) in beh.iter().enumerate() {
            search.fixed.insert(*s, grids[k][idx[k]].clone());
        }
        let v = search.evaluate().value;
        if best.as_ref().map_or(true, |(b, _)| v > *b) {
            best = Some((v, beh.iter().map(|s| search.fixed[s].clone()).collect()));
        }
        let mut k = 0;
        while k < idx.len() {
            idx[k] += 1;
            if idx[k] < grids[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == idx.len() {
            break;
        }
    }
    let (mut value, mut point) = best.expect("grid is non-empty");
    for _round in 0..50 {
        let before = value;
        for k in 0..beh.len() {
            let n = point[k].len();
            for i in 0..n {
                for j in i + 1..n {
                    let total = point[k][i] + point[k][j];
                    if total <= 0.0 {
                        continue;
                    }
                    let base = point.clone();
                    let mut at = |t: f64| {
                        let mut d = base[k].clone();
                        d[i] = t;
                        d[j] = total - t;
                        for (kk, ss) in beh.iter().enumerate() {
                            search.fixed.insert(*ss, if kk == k { d.clone() } else { base[kk].clone() });
                        }
                        search.evaluate().value
                    };
                    let (t, v) = golden(&mut at, 0.0, total);
                    if v > value {
                        value = v;
                        point[k][i] = t;
                        point[k][j] = total - t;
                    }
                }
            }
        }
        if value - before <= 1e-14 {
            break;
        }
    }
    for (k, s) in beh.iter().enumerate() {
        search.fixed.insert(*s, point[k].clone());
    }
    let ev = search.evaluate();
    Eval { value: ev.value.max(value), choices: ev.choices }
}

/// Best response of `p` against `sigma`, searched over behavioral strategies
/// with grid `step` at absent-minded information sets.
///
/// Without absent-mindedness the result is the exact pure optimum.
pub fn best_response(g: &Game, sigma: &BehavioralProfile, p: PlayerId, step: f64) -> Result<BestResponse> {
    optimize(g, sigma, p, &[(g.root(), 1.0)], step)
}

pub fn behavioral_best_response_value(g: &Game, sigma: &BehavioralProfile, p: PlayerId, step: f64) -> Result<f64> {
    Ok(best_response(g, sigma, p, step)?.value)
}

/// The best value over `p`'s pure strategies and every pure strategy that
/// attains it within 1e-9, found by exhaustive enumeration.
pub fn pure_best_responses(g: &Game, sigma: &BehavioralProfile, p: PlayerId) -> Result<(f64, Vec<PureStrategy>)> {
    sigma.check(g)?;
    let sets = g.infosets_of(p);
    let count = g.pure_strategy_count(p);
    if count > SEARCH_CAP {
        return Err(Error::Refused { what: format!("pure strategies of {}", g.player_name(p)), size: count, cap: SEARCH_CAP });
    }
    let mut odo = vec![0usize; sets.len()];
    let mut scored: Vec<(f64, PureStrategy)> = Vec::new();
    loop {
        let s = PureStrategy { player: p, choice: sets.iter().copied().zip(odo.iter().copied()).collect() };
        let v = super::expected_utility(g, &sigma.with_pure(g, &s), p)?;
        scored.push((v, s));
        let mut k = 0;
        while k < odo.len() {
            odo[k] += 1;
            if odo[k] < g.infoset(sets[k]).actions.len() {
                break;
            }
            odo[k] = 0;
            k += 1;
        }
        if k == odo.len() {
            break;
        }
    }
    let best = scored.iter().map(|(v, _)| *v).fold(f64::NEG_INFINITY, f64::max);
    let winners = scored.into_iter().filter(|(v, _)| *v >= best - 1e-9).map(|(_, s)| s).collect();
    Ok((best, winners))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::expected_utility;
    use crate::models::corpus;

    #[test]
    fn pennies_against_uniform() {
        let g = corpus::matching_pennies();
        let s = BehavioralProfile::uniform(&g);
        let (v, all) = pure_best_responses(&g, &s, PlayerId(1)).unwrap();
        assert!(v.abs() < 1e-12);
        assert_eq!(all.len(), 2);
        assert!(behavioral_best_response_value(&g, &s, PlayerId(1), DEFAULT_STEP).unwrap().abs() < 1e-12);
    }

    #[test]
    fn driver_optimum_by_dense_scan() {
        let g = corpus::absent_minded_driver();
        let s = BehavioralProfile::uniform(&g);
        // Oracle: scan continue-probability q on a fine grid.
        let oracle = (0..=100_000)
            .map(|i| {
                let q = i as f64 / 100_000.0;
                4.0 * q * (1.0 - q) + q * q
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let br = best_response(&g, &s, PlayerId(0), DEFAULT_STEP).unwrap();
        assert!((br.value - oracle).abs() < 1e-9);
        assert!((br.value - 4.0 / 3.0).abs() < 1e-9);
        let set = g.infoset_id("I").unwrap();
        let cont = g.infoset(set).actions.iter().position(|a| a == "continue").unwrap();
        assert!((br.profile.get(set)[cont] - 2.0 / 3.0).abs() < 1e-6);
        // The best pure plan only reaches 1.
        let (pv, _) = pure_best_responses(&g, &s, PlayerId(0)).unwrap();
        assert!((pv - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_shot_picks_max_payoff() {
        let g = crate::game::build_game(
            "one",
            &["P"],
            crate::game::NodeSpec::decision(
                "P",
                "I",
                vec![
                    ("a", crate::game::NodeSpec::payoffs(&[1.0])),
                    ("b", crate::game::NodeSpec::payoffs(&[3.0])),
                    ("c", crate::game::NodeSpec::payoffs(&[2.0])),
                ],
            ),
        )
        .unwrap();
        let s = BehavioralProfile::uniform(&g);
        assert_eq!(behavioral_best_response_value(&g, &s, PlayerId(0), DEFAULT_STEP).unwrap(), 3.0);
    }

    #[test]
    fn forgetting_own_move_is_searched() {
        let g = corpus::forgets_own_move();
        let s = BehavioralProfile::uniform(&g);
        let br = best_response(&g, &s, PlayerId(0), DEFAULT_STEP).unwrap();
        let (pv, _) = pure_best_responses(&g, &s, PlayerId(0)).unwrap();
        assert!((br.value - pv).abs() < 1e-12);
        assert!((expected_utility(&g, &br.profile, PlayerId(0)).unwrap() - br.value).abs() < 1e-12);
    }

    #[test]
    fn fig1_right_taker() {
        let g = corpus::fig1_right();
        let mut s = BehavioralProfile::uniform(&g);
        s.set_pure(&g, "I1", "A").unwrap();
        let p2 = g.player_id("P2").unwrap();
        let br = best_response(&g, &s, p2, DEFAULT_STEP).unwrap();
        let (pv, _) = pure_best_responses(&g, &s, p2).unwrap();
        assert!((br.value - pv).abs() < 1e-12);
        assert!((br.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn simplex_grid_counts() {
        assert_eq!(simplex_grid(3, 4).len() as f64, simplex_points(3, 4));
        assert_eq!(simplex_grid(2, 20).len(), 21);
        assert!(grid_steps(0.0).is_err());
    }
}
