//! Strategies, expected utility, best responses and equilibrium checks.
//!
//! Every check reports per-player regret: the gain from the best deviation.
//! Best responses are computed so that they remain correct when a player
//! forgets (see [`best_response`]); under absent-mindedness they search
//! behavioral strategies, since no pure strategy need be optimal there.

mod best_response;
mod grid;
mod kuhn;
mod nash;
mod normal_form;
mod pbe;
mod profile;
mod subgame;

use serde::Serialize;

use crate::error::Result;
use crate::game::{Game, NodeId, PlayerId};

pub use best_response::{
    behavioral_best_response_value, best_response, pure_best_responses, BestResponse, DEFAULT_STEP, SEARCH_CAP,
};
pub use grid::grid_search_equilibria;
pub use kuhn::{kuhn_equivalence_check, KuhnReport};
pub use nash::{is_epsilon_nash, is_nash_in_subgame};
pub use normal_form::{iterated_weak_dominance, to_normal_form, Elimination, IwdResult, NormalForm};
pub use pbe::{check_pbe, consistent_beliefs, OffPathRule};
pub use profile::{BehavioralProfile, BeliefSystem, PureProfile, PureStrategy};
pub use subgame::{check_spe, enumerate_pure_spe, find_subgames};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Concept {
    Nash,
    Spe,
    Pbe,
}

/// A profitable deviation found by a check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Deviation {
    pub player: String,
    pub gain: f64,
    /// Information set where the deviation applies, for interim checks.
    pub at: Option<String>,
    /// The deviating player's distributions, by information set label.
    pub strategy: Vec<(String, Vec<(String, f64)>)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquilibriumReport {
    pub concept: Concept,
    pub epsilon: f64,
    /// Largest regret found for each player, in player order.
    pub regrets: Vec<(String, f64)>,
    pub pass: bool,
    pub witnesses: Vec<Deviation>,
    /// Which rationality test was applied to each player, and other remarks.
    pub notes: Vec<String>,
}

impl EquilibriumReport {
    pub fn max_regret(&self) -> f64 {
        self.regrets.iter().map(|(_, r)| *r).fold(0.0, f64::max)
    }
}

/// Regret with rounding noise removed.
pub(crate) fn clean_regret(best: f64, current: f64) -> f64 {
    let r = best - current;
    if r <= 1e-12 * (1.0 + best.abs().max(current.abs())) {
        0.0
    } else {
        r
    }
}

pub(crate) fn describe_strategy(g: &Game, sigma: &BehavioralProfile, p: PlayerId) -> Vec<(String, Vec<(String, f64)>)> {
    g.infosets_of(p)
        .into_iter()
        .map(|i| {
            let set = g.infoset(i);
            let dist = set
                .actions
                .iter()
                .zip(sigma.get(i))
                .filter(|(_, &q)| q != 0.0)
                .map(|(a, &q)| (a.clone(), q))
                .collect();
            (set.label.clone(), dist)
        })
        .collect()
}

/// Probability of reaching each node, indexed by node id.
pub fn reach_probabilities(g: &Game, sigma: &BehavioralProfile) -> Result<Vec<f64>> {
    sigma.check(g)?;
    Ok(reach_unchecked(g, sigma))
}

pub(crate) fn reach_unchecked(g: &Game, sigma: &BehavioralProfile) -> Vec<f64> {
    // Node ids are assigned parents first.
    let mut reach = vec![0.0; g.len()];
    reach[0] = 1.0;
    for n in g.node_ids().skip(1) {
        let parent = g.node(n).parent.expect("non-root node has a parent");
        reach[n.0] = reach[parent.0] * sigma.edge_prob(g, n);
    }
    reach
}

/// Expected payoff of every player.
pub fn expected_utilities(g: &Game, sigma: &BehavioralProfile) -> Result<Vec<f64>> {
    let reach = reach_probabilities(g, sigma)?;
    let mut eu = vec![0.0; g.players().len()];
    for t in g.terminals() {
        if reach[t.0] != 0.0 {
            for (e, u) in eu.iter_mut().zip(g.payoffs(t).expect("terminal")) {
                *e += reach[t.0] * u;
            }
        }
    }
    Ok(eu)
}

/// Expected payoffs of every player conditional on reaching `node`.
pub fn continuation_values(g: &Game, sigma: &BehavioralProfile, node: NodeId) -> Result<Vec<f64>> {
    sigma.check(g)?;
    g.check_node(node)?;
    Ok(nash::values_from(g, sigma, node))
}

pub fn expected_utility(g: &Game, sigma: &BehavioralProfile, p: PlayerId) -> Result<f64> {
    Ok(expected_utilities(g, sigma)?[p.0])
}
