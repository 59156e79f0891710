use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::best_response::SEARCH_CAP;
use super::{reach_unchecked, BehavioralProfile, PureStrategy};
use crate::error::{Error, Result};
use crate::game::{Game, PlayerId};
use crate::recall::has_perfect_recall;
use crate::TOL;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KuhnReport {
    pub player: String,
    pub trials: usize,
    pub pass: bool,
    /// Largest terminal probability gap seen over all trials.
    pub max_gap: f64,
    /// Pure strategies with positive weight in the equivalent mixed strategy.
    pub support: usize,
}

/// Compares `sigma`'s behavioral strategy for `p` with the mixed strategy
/// that plays each pure strategy with the product of its action
/// probabilities, against `trials` random opponent profiles.
///
/// Under perfect recall the two induce the same distribution over terminal
/// nodes; the check refuses players without perfect recall.
pub fn kuhn_equivalence_check(
    g: &Game,
    p: PlayerId,
    sigma: &BehavioralProfile,
    trials: usize,
    seed: u64,
) -> Result<KuhnReport> {
    sigma.check(g)?;
    let name = g.player_name(p).to_string();
    if !has_perfect_recall(g, p) {
        return Err(Error::ImperfectRecall(name));
    }
    let count = g.pure_strategy_count(p);
    if count > SEARCH_CAP {
        return Err(Error::Refused { what: format!("pure strategies of {name}"), size: count, cap: SEARCH_CAP });
    }
    let sets = g.infosets_of(p);
    let mut mixed: Vec<(f64, PureStrategy)> = Vec::new();
    let mut odo = vec![0usize; sets.len()];
    loop {
        let w: f64 = sets.iter().zip(&odo).map(|(&i, &a)| sigma.get(i)[a]).product();
        if w > 0.0 {
            mixed.push((w, PureStrategy { player: p, choice: sets.iter().copied().zip(odo.iter().copied()).collect() }));
        }
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

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_gap = 0.0f64;
    for _ in 0..trials {
        let mut opp = sigma.clone();
        for (k, set) in g.infosets().iter().enumerate() {
            if set.player != p {
                let raw: Vec<f64> = (0..set.actions.len()).map(|_| rng.gen::<f64>() + 1e-3).collect();
                let total: f64 = raw.iter().sum();
                opp.probs[k] = raw.into_iter().map(|x| x / total).collect();
            }
        }
        let behavioral = reach_unchecked(g, &opp);
        let mut from_mixed = vec![0.0; g.len()];
        for (w, s) in &mixed {
            let reach = reach_unchecked(g, &opp.with_pure(g, s));
            for (a, r) in from_mixed.iter_mut().zip(reach) {
                *a += w * r;
            }
        }
        for t in g.terminals() {
            max_gap = max_gap.max((behavioral[t.0] - from_mixed[t.0]).abs());
        }
    }
    Ok(KuhnReport { player: name, trials, pass: max_gap <= TOL, max_gap, support: mixed.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::corpus;

    #[test]
    fn two_stage_passes() {
        let g = corpus::one_player_chain();
        let mut s = BehavioralProfile::uniform(&g);
        s.set(&g, "I1", &[("L", 0.3), ("R", 0.7)]).unwrap();
        s.set(&g, "I3", &[("L", 0.9), ("R", 0.1)]).unwrap();
        let r = kuhn_equivalence_check(&g, PlayerId(0), &s, 10, 7).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.support, 8);
    }

    #[test]
    fn fig1_right_taker_refused() {
        let g = corpus::fig1_right();
        let p2 = g.player_id("P2").unwrap();
        let err = kuhn_equivalence_check(&g, p2, &BehavioralProfile::uniform(&g), 1, 0).unwrap_err();
        assert_eq!(err, Error::ImperfectRecall("P2".into()));
    }
}
