//! Seeded random games and the property gates shared by the property tests
//! and the acceptance run.
#![allow(dead_code)]

use std::collections::HashMap;

use amnesia::equilibrium::{
    behavioral_best_response_value, expected_utility, kuhn_equivalence_check, pure_best_responses,
    reach_probabilities, BehavioralProfile,
};
use amnesia::game::NodeKind;
use amnesia::gdl::{parse_game, serialize_game};
use amnesia::models::{arrow, bargaining, corpus, entry, mafia, monopolist};
use amnesia::recall::{has_perfect_recall, is_absent_minded};
use amnesia::{build_game, Game, NodeSpec, PlayerId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub players: usize,
    pub max_depth: usize,
    pub max_actions: usize,
    pub chance: f64,
    /// Chance of reusing an existing information set at the same depth.
    pub merge: f64,
}

impl Shape {
    pub const SMALL: Shape = Shape { players: 2, max_depth: 3, max_actions: 3, chance: 0.2, merge: 0.5 };
    pub const TINY: Shape = Shape { players: 2, max_depth: 2, max_actions: 2, chance: 0.25, merge: 0.5 };
}

struct Gen {
    rng: ChaCha8Rng,
    shape: Shape,
    pools: HashMap<(usize, usize, usize), Vec<String>>,
    next: usize,
}

impl Gen {
    fn node(&mut self, depth: usize) -> NodeSpec {
        if depth == self.shape.max_depth || (depth > 0 && self.rng.gen_bool(0.25)) {
            let pay: Vec<f64> =
                (0..self.shape.players).map(|_| self.rng.gen_range(-8..=8) as f64 * 0.5).collect();
            return NodeSpec::payoffs(&pay);
        }
        if self.rng.gen_bool(self.shape.chance) {
            // Dyadic probabilities survive a text round trip exactly.
            let weights: &[f64] = match self.rng.gen_range(0..3) {
                0 => &[0.5, 0.5],
                1 => &[0.25, 0.75],
                _ => &[0.25, 0.25, 0.5],
            };
            let kids = weights.iter().enumerate().map(|(k, &p)| (format!("c{k}"), p, self.node(depth + 1))).collect();
            return NodeSpec::chance(kids);
        }
        let player = self.rng.gen_range(0..self.shape.players);
        let n = self.rng.gen_range(2..=self.shape.max_actions);
        let key = (depth, player, n);
        let pool = self.pools.get(&key).cloned().unwrap_or_default();
        let label = if !pool.is_empty() && self.rng.gen_bool(self.shape.merge) {
            pool[self.rng.gen_range(0..pool.len())].clone()
        } else {
            self.next += 1;
            let l = format!("I{}", self.next);
            self.pools.entry(key).or_default().push(l.clone());
            l
        };
        let kids = (0..n).map(|a| (format!("a{a}"), self.node(depth + 1))).collect();
        NodeSpec::decision(format!("P{}", player + 1), label, kids)
    }
}

/// A random game in which merged information sets only join nodes of equal
/// depth, so no player is absent-minded.
pub fn random_game(seed: u64, shape: Shape) -> Game {
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(seed), shape, pools: HashMap::new(), next: 0 };
    let root = g.node(0);
    let players: Vec<String> = (1..=shape.players).map(|p| format!("P{p}")).collect();
    build_game(&format!("random-{seed}"), &players, root).expect("generated games are valid")
}

/// A random behavioral profile; roughly a third of the sets play purely.
pub fn random_profile(g: &Game, seed: u64) -> BehavioralProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let probs = g
        .infosets()
        .iter()
        .map(|s| {
            let k = s.actions.len();
            if rng.gen_bool(0.3) {
                let mut v = vec![0.0; k];
                v[rng.gen_range(0..k)] = 1.0;
                v
            } else {
                let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
                let t: f64 = w.iter().sum();
                w.iter().map(|x| x / t).collect()
            }
        })
        .collect();
    BehavioralProfile { probs }
}

/// Expected payoff by listing every terminal and multiplying the edge
/// probabilities along its path.
pub fn enumerated_utility(g: &Game, sigma: &BehavioralProfile, p: PlayerId) -> f64 {
    let mut total = 0.0;
    for t in g.terminals() {
        let mut prob = 1.0;
        let mut n = t;
        while let Some(parent) = g.node(n).parent {
            prob *= match &g.node(parent).kind {
                NodeKind::Chance => g.node(n).chance_prob.unwrap(),
                NodeKind::Decision { infoset, .. } => {
                    let set = g.infoset(*infoset);
                    let a = set.actions.iter().position(|a| a == g.action_label(n)).unwrap();
                    sigma.probs[infoset.0][a]
                }
                NodeKind::Terminal { .. } => unreachable!(),
            };
            n = parent;
        }
        total += prob * g.payoffs(t).unwrap()[p.0];
    }
    total
}

fn players(g: &Game) -> impl Iterator<Item = PlayerId> {
    (0..g.players().len()).map(PlayerId)
}

pub fn check_multilinearity(seed: u64) -> Result<(), String> {
    let g = random_game(seed, Shape::SMALL);
    let sigma = random_profile(&g, seed);
    for p in players(&g) {
        if is_absent_minded(&g, p) {
            return Err(format!("seed {seed}: generator produced absent-mindedness"));
        }
        let (pure, _) = pure_best_responses(&g, &sigma, p).map_err(|e| e.to_string())?;
        let beh = behavioral_best_response_value(&g, &sigma, p, 0.1).map_err(|e| e.to_string())?;
        if (pure - beh).abs() > 1e-9 {
            return Err(format!("seed {seed}, {}: pure {pure} vs behavioral {beh}", g.player_name(p)));
        }
        // A random deviation never beats the pure optimum.
        let dev = sigma.with_player(&g, p, &random_profile(&g, seed.wrapping_add(1)));
        let v = expected_utility(&g, &dev, p).map_err(|e| e.to_string())?;
        if v > pure + 1e-9 {
            return Err(format!("seed {seed}: mixed deviation {v} beats pure optimum {pure}"));
        }
    }
    Ok(())
}

pub fn check_reach_conservation(seed: u64) -> Result<(), String> {
    let g = random_game(seed, Shape::SMALL);
    let sigma = random_profile(&g, seed);
    let reach = reach_probabilities(&g, &sigma).map_err(|e| e.to_string())?;
    for n in g.node_ids() {
        let kids = &g.node(n).children;
        if kids.is_empty() {
            continue;
        }
        let below: f64 = kids.iter().map(|c| reach[c.0]).sum();
        if (below - reach[n.0]).abs() > 1e-12 {
            return Err(format!("seed {seed}: node {} has reach {} but children sum to {below}", n.0, reach[n.0]));
        }
    }
    let leaves: f64 = g.terminals().map(|t| reach[t.0]).sum();
    if (leaves - 1.0).abs() > 1e-12 {
        return Err(format!("seed {seed}: terminal mass {leaves}"));
    }
    Ok(())
}

pub fn check_utility_oracle(seed: u64) -> Result<(), String> {
    let g = random_game(seed, Shape::SMALL);
    let sigma = random_profile(&g, seed);
    for p in players(&g) {
        let fast = expected_utility(&g, &sigma, p).map_err(|e| e.to_string())?;
        let slow = enumerated_utility(&g, &sigma, p);
        if (fast - slow).abs() > 1e-12 {
            return Err(format!("seed {seed}: {fast} vs {slow}"));
        }
    }
    Ok(())
}

/// Draws seeds until `count` games give some player perfect recall, and
/// runs the behavioral/mixed comparison for each such player.
pub fn check_kuhn(count: usize) -> Result<(), String> {
    let mut seen = 0;
    let mut seed = 0u64;
    while seen < count {
        seed += 1;
        let g = random_game(seed, Shape::SMALL);
        let recallers: Vec<PlayerId> =
            players(&g).filter(|&p| has_perfect_recall(&g, p) && !g.infosets_of(p).is_empty()).collect();
        if recallers.is_empty() {
            continue;
        }
        seen += 1;
        let sigma = random_profile(&g, seed);
        for p in recallers {
            let r = kuhn_equivalence_check(&g, p, &sigma, 5, seed).map_err(|e| e.to_string())?;
            if !r.pass {
                return Err(format!("seed {seed}, {}: gap {}", g.player_name(p), r.max_gap));
            }
        }
    }
    Ok(())
}

/// Every fixed game the crate ships, plus the scenario games at small sizes.
pub fn full_corpus() -> Vec<Game> {
    let mut games = corpus::small();
    games.push(corpus::matching_pennies());
    games.push(entry::game());
    games.push(entry::game_with_incumbency(0.9).unwrap());
    games.push(entry::x_game(0.9).unwrap().game);
    games.push(arrow::game());
    games.push(arrow::x_game().unwrap().game);
    games.push(mafia::game(2, 0.2).unwrap());
    games.push(mafia::x_game(2, 0.2).unwrap().game);
    games.push(bargaining::game(0.1, 0.5, 4.0).unwrap());
    games.push(bargaining::x_game(0.1, 0.5, 4.0).unwrap().game);
    games.push(monopolist::game(4).unwrap());
    games.push(monopolist::x_game(4).unwrap().game);
    games
}

/// Parsing the canonical text gives the same game, and canonicalizing twice
/// changes nothing.
pub fn check_round_trip(g: &Game) -> Result<(), String> {
    let text = serialize_game(g);
    let back = parse_game(&text).map_err(|e| format!("{}: {e}", g.name()))?;
    if !back.structurally_eq(g) {
        return Err(format!("{}: round trip changed the game", g.name()));
    }
    if serialize_game(&back) != text {
        return Err(format!("{}: canonical form is not idempotent", g.name()));
    }
    Ok(())
}
