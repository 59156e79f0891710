use serde::Serialize;

use super::best_response::SEARCH_CAP;
use super::{expected_utilities, BehavioralProfile, PureProfile, PureStrategy};
use crate::error::{Error, Result};
use crate::game::{Game, PlayerId};
use crate::TOL;

/// Payoff table over pure strategy profiles.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalForm {
    pub players: Vec<String>,
    /// Pure strategies of each player.
    pub strategies: Vec<Vec<PureStrategy>>,
    /// Readable name of each strategy: its actions in information set order.
    pub labels: Vec<Vec<String>>,
    /// Payoff vectors, row-major with the first player varying slowest.
    pub payoffs: Vec<Vec<f64>>,
}

impl NormalForm {
    pub fn shape(&self) -> Vec<usize> {
        self.strategies.iter().map(Vec::len).collect()
    }

    fn index(&self, profile: &[usize]) -> usize {
        profile.iter().zip(self.shape()).fold(0, |acc, (&s, n)| acc * n + s)
    }

    /// Payoffs of the profile choosing strategy `profile[p]` for each player.
    pub fn payoff(&self, profile: &[usize]) -> &[f64] {
        &self.payoffs[self.index(profile)]
    }

    /// A copy with each player's payoffs mapped through `f(player, u)`.
    pub fn map_payoffs(&self, f: impl Fn(usize, f64) -> f64) -> NormalForm {
        let mut out = self.clone();
        for row in &mut out.payoffs {
            for (p, u) in row.iter_mut().enumerate() {
                *u = f(p, *u);
            }
        }
        out
    }

    /// Index of the strategy with this label.
    pub fn strategy_index(&self, player: usize, label: &str) -> Option<usize> {
        self.labels[player].iter().position(|l| l == label)
    }
}

/// Builds the normal form. Chance moves are averaged out.
pub fn to_normal_form(g: &Game) -> Result<NormalForm> {
    let n = g.players().len();
    let size: f64 = (0..n).map(|p| g.pure_strategy_count(PlayerId(p))).product();
    if size > SEARCH_CAP {
        return Err(Error::Refused { what: "pure strategy profiles".into(), size, cap: SEARCH_CAP });
    }
    let mut strategies = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for p in 0..n {
        let sets = g.infosets_of(PlayerId(p));
        let mut all = Vec::new();
        let mut odo = vec![0usize; sets.len()];
        loop {
            all.push(PureStrategy { player: PlayerId(p), choice: sets.iter().copied().zip(odo.iter().copied()).collect() });
            if !advance(&mut odo, |k| g.infoset(sets[k]).actions.len()) {
                break;
            }
        }
        labels.push(all.iter().map(|s| strategy_label(g, s)).collect());
        strategies.push(all);
    }
    let shape: Vec<usize> = strategies.iter().map(Vec::len).collect();
    let mut payoffs = Vec::with_capacity(size as usize);
    // Digit k belongs to player n - 1 - k, so the last player varies fastest.
    let mut odo = vec![0usize; n];
    loop {
        let mut choice = vec![0usize; g.infosets().len()];
        for (p, &s) in odo.iter().rev().enumerate() {
            for &(i, a) in &strategies[p][s].choice {
                choice[i.0] = a;
            }
        }
        let sigma = BehavioralProfile::from_pure(g, &PureProfile { choice });
        payoffs.push(expected_utilities(g, &sigma)?);
        if !advance(&mut odo, |k| shape[n - 1 - k]) {
            break;
        }
    }
    Ok(NormalForm { players: g.players().to_vec(), strategies, labels, payoffs })
}

fn strategy_label(g: &Game, s: &PureStrategy) -> String {
    if s.choice.is_empty() {
        return "-".into();
    }
    s.choice.iter().map(|&(i, a)| g.infoset(i).actions[a].as_str()).collect::<Vec<_>>().join("/")
}

/// Odometer step; false once every digit has wrapped.
fn advance(odo: &mut [usize], radix: impl Fn(usize) -> usize) -> bool {
    for k in 0..odo.len() {
        odo[k] += 1;
        if odo[k] < radix(k) {
            return true;
        }
        odo[k] = 0;
    }
    false
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Elimination {
    pub round: usize,
    pub player: String,
    pub strategy: String,
    /// First surviving strategy (at the start of the round) that dominates it.
    pub dominator: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IwdResult {
    /// Surviving strategy indices per player, ascending.
    pub survivors: Vec<Vec<usize>>,
    pub survivor_labels: Vec<Vec<String>>,
    pub trace: Vec<Elimination>,
    pub rounds: usize,
}

/// Iterated elimination of weakly dominated pure strategies.
///
/// Each round removes, for all players at once, every strategy weakly
/// dominated by another surviving strategy of the same player given the
/// opponents' surviving strategies. Payoff comparisons use tolerance 1e-9.
/// The final sets can depend on this removal order.
pub fn iterated_weak_dominance(t: &NormalForm) -> IwdResult {
    let n = t.players.len();
    let mut alive: Vec<Vec<usize>> = t.strategies.iter().map(|s| (0..s.len()).collect()).collect();
    let mut trace = Vec::new();
    let mut round = 0;
    loop {
        let mut removals: Vec<(usize, usize, usize)> = Vec::new();
        for p in 0..n {
            let others = opponent_profiles(&alive, p);
            for &s in &alive[p] {
                let dom = alive[p].iter().copied().find(|&d| d != s && dominates(t, p, d, s, &others));
                if let Some(d) = dom {
                    removals.push((p, s, d));
                }
            }
        }
        if removals.is_empty() {
            break;
        }
        round += 1;
        for &(p, s, d) in &removals {
            trace.push(Elimination {
                round,
                player: t.players[p].clone(),
                strategy: t.labels[p][s].clone(),
                dominator: t.labels[p][d].clone(),
            });
        }
        for (p, s, _) in removals {
            alive[p].retain(|&x| x != s);
        }
    }
    let survivor_labels = alive.iter().enumerate().map(|(p, v)| v.iter().map(|&s| t.labels[p][s].clone()).collect()).collect();
    IwdResult { survivors: alive, survivor_labels, trace, rounds: round }
}

/// Surviving profiles with player `p`'s slot left at zero.
fn opponent_profiles(alive: &[Vec<usize>], p: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0usize; alive.len()]];
    for (q, set) in alive.iter().enumerate() {
        if q == p {
            continue;
        }
        out = out
            .into_iter()
            .flat_map(|prof| {
                set.iter().map(move |&s| {
                    let mut x = prof.clone();
                    x[q] = s;
                    x
                })
            })
            .collect();
    }
    out
}

fn dominates(t: &NormalForm, p: usize, d: usize, s: usize, others: &[Vec<usize>]) -> bool {
    let mut strict = false;
    for prof in others {
        let mut a = prof.clone();
        a[p] = d;
        let mut b = prof.clone();
        b[p] = s;
        let (ud, us) = (t.payoff(&a)[p], t.payoff(&b)[p]);
        if ud < us - TOL {
            return false;
        }
        if ud > us + TOL {
            strict = true;
        }
    }
    strict
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{corpus, mafia};

    #[test]
    fn fig1_left_shape() {
        let nf = to_normal_form(&corpus::fig1_left()).unwrap();
        assert_eq!(nf.shape(), vec![2, 4]);
        assert_eq!(nf.payoffs.len(), 8);
    }

    #[test]
    fn chance_only_averages() {
        let nf = to_normal_form(&corpus::coin_flip()).unwrap();
        assert_eq!(nf.shape(), vec![1]);
        assert_eq!(nf.payoffs, vec![vec![0.0]]);
    }

    #[test]
    fn mafia_stage_matrix() {
        let g = mafia::stage_game();
        let nf = to_normal_form(&g).unwrap();
        assert_eq!(nf.players, vec!["Mafia", "Owner"]);
        let m = |l: &str| nf.strategy_index(0, l).unwrap();
        let o = |l: &str| nf.strategy_index(1, l).unwrap();
        assert_eq!(nf.payoff(&[m("Accept"), o("High")]), &[2.0, -2.0]);
        assert_eq!(nf.payoff(&[m("Accept"), o("Low")]), &[1.0, -1.0]);
        assert_eq!(nf.payoff(&[m("Kill"), o("High")]), &[0.0, -5.0]);
        assert_eq!(nf.payoff(&[m("Kill"), o("Low")]), &[0.0, -5.0]);
    }

    #[test]
    fn no_dominance_leaves_game_unchanged() {
        let nf = to_normal_form(&corpus::matching_pennies()).unwrap();
        let r = iterated_weak_dominance(&nf);
        assert_eq!(r.survivors, vec![vec![0, 1], vec![0, 1]]);
        assert!(r.trace.is_empty());
    }

    #[test]
    fn dominance_solvable() {
        let nf = to_normal_form(&mafia::stage_game()).unwrap();
        let r = iterated_weak_dominance(&nf);
        assert_eq!(r.survivor_labels, vec![vec!["Accept".to_string()], vec!["Low".to_string()]]);
        assert_eq!(r.trace[0].strategy, "Kill");
        assert_eq!(r.trace[0].dominator, "Accept");
    }
}
