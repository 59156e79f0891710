use super::best_response::{grid_steps, simplex_grid, simplex_points, SEARCH_CAP};
use super::nash::is_epsilon_nash;
use super::BehavioralProfile;
use crate::error::{Error, Result};
use crate::game::Game;

/// Every profile on the behavioral grid of the given step that is an
/// `eps`-Nash equilibrium. Profiles closer than `step / 2` in the max norm
/// to one already found are dropped.
///
/// With `step = 1.0` this searches pure profiles only.
pub fn grid_search_equilibria(g: &Game, step: f64, eps: f64) -> Result<Vec<BehavioralProfile>> {
    let m = grid_steps(step)?;
    let size: f64 = g.infosets().iter().map(|s| simplex_points(s.actions.len(), m)).product();
    if size > SEARCH_CAP {
        return Err(Error::Refused { what: "grid profiles".into(), size, cap: SEARCH_CAP });
    }
    let grids: Vec<Vec<Vec<f64>>> = g.infosets().iter().map(|s| simplex_grid(s.actions.len(), m)).collect();
    let mut odo = vec![0usize; grids.len()];
    let mut found: Vec<BehavioralProfile> = Vec::new();
    loop {
        let sigma = BehavioralProfile { probs: odo.iter().zip(&grids).map(|(&k, gr)| gr[k].clone()).collect() };
        if is_epsilon_nash(g, &sigma, eps)?.pass && found.iter().all(|f| f.linf(&sigma) >= step / 2.0) {
            found.push(sigma);
        }
        let mut k = 0;
        loop {
            if k == odo.len() {
                return Ok(found);
            }
            odo[k] += 1;
            if odo[k] < grids[k].len() {
                break;
            }
            odo[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{corpus, mafia};

    #[test]
    fn pennies_only_uniform() {
        let g = corpus::matching_pennies();
        let eq = grid_search_equilibria(&g, 0.25, 1e-9).unwrap();
        assert_eq!(eq, vec![BehavioralProfile::uniform(&g)]);
    }

    #[test]
    fn mafia_stage_contains_low_accept() {
        let g = mafia::stage_game();
        let eq = grid_search_equilibria(&g, 0.5, 0.0).unwrap();
        let mut s = BehavioralProfile::uniform(&g);
        s.set_pure(&g, "O", "Low").unwrap();
        s.set_pure(&g, "M", "Accept").unwrap();
        assert!(eq.contains(&s));
    }

    #[test]
    fn refuses_huge_grids() {
        let g = corpus::three_stage();
        assert!(grid_search_equilibria(&g, 0.001, 0.0).unwrap_err().is_refusal());
    }
}
