//! A seller meets the same buyer on two days.
//!
//! The buyer's value is drawn once from `n` equally spaced points of the
//! unit interval and wants one unit per day. The seller posts a price from a
//! grid of multiples of 0.05 each day; on the second day it knows whether
//! the first sale happened. There is no discounting.
//!
//! With X the seller forgets whether it met this buyer before, so both days
//! fall into one information set and the seller posts a stationary price.

use super::report::{Provenance, ReproductionReport};
use crate::equilibrium::{check_pbe, expected_utilities, BehavioralProfile, BeliefSystem, OffPathRule};
use crate::error::{Error, Result};
use crate::game::{build_game, Game, NodeSpec};
use crate::xform::{apply_x, ForgetSpec, XGame};

pub const SELLER: &str = "Seller";
pub const BUYER: &str = "Buyer";
/// Number of grid prices: 0.00, 0.05, ..., 1.00.
pub const PRICES: usize = 21;
const TIE: f64 = 1e-12;

pub fn price(j: usize) -> f64 {
    j as f64 * 0.05
}

fn price_label(j: usize) -> String {
    format!("p{}", 5 * j)
}

/// Buyer values `(2k - 1) / 2n` for `k = 1..=n`.
pub fn values(n: usize) -> Vec<f64> {
    (1..=n).map(|k| (2 * k - 1) as f64 / (2 * n) as f64).collect()
}

fn check_n(n: usize) -> Result<()> {
    if (2..=400).contains(&n) {
        Ok(())
    } else {
        Err(Error::Domain(format!("n_values {n} outside 2..=400")))
    }
}

fn prices(set: String, next: impl Fn(usize) -> NodeSpec) -> NodeSpec {
    NodeSpec::decision(SELLER, set, (0..PRICES).map(|j| (price_label(j), next(j))).collect())
}

fn buy(set: String, yes: NodeSpec, no: NodeSpec) -> NodeSpec {
    NodeSpec::decision(BUYER, set, vec![("buy", yes), ("pass", no)])
}

/// The game in which the seller remembers the first day.
pub fn game(n: usize) -> Result<Game> {
    check_n(n)?;
    let vs = values(n);
    let branch = |t: usize| {
        let v = vs[t];
        prices("S1".into(), |j1| {
            let day2 = |bought: bool| {
                let o = if bought { 'y' } else { 'n' };
                let (r1, u1) = if bought { (price(j1), v - price(j1)) } else { (0.0, 0.0) };
                prices(format!("S2_{}{o}", price_label(j1)), |j2| {
                    buy(
                        format!("B2_t{t}_{}{o}_{}", price_label(j1), price_label(j2)),
                        NodeSpec::payoffs(&[r1 + price(j2), u1 + v - price(j2)]),
                        NodeSpec::payoffs(&[r1, u1]),
                    )
                })
            };
            buy(format!("B1_t{t}_{}", price_label(j1)), day2(true), day2(false))
        })
    };
    let p = 1.0 / n as f64;
    build_game(
        &format!("monopolist-{n}"),
        &[SELLER, BUYER],
        NodeSpec::chance((0..n).map(|t| (format!("v{t}"), p, branch(t))).collect()),
    )
}

pub fn forget_spec() -> ForgetSpec {
    let mut s = ForgetSpec::new(SELLER).sites(["S1"]).class("S1", "price");
    for j in 0..PRICES {
        for o in ['y', 'n'] {
            s = s.class(&format!("S2_{}{o}", price_label(j)), "price");
        }
    }
    s
}

/// The game after the seller has committed to forgetting.
pub fn x_game(n: usize) -> Result<XGame> {
    Ok(apply_x(&game(n)?, &forget_spec())?.committed())
}

/// Indices of grid prices maximizing revenue from a pool of values.
fn best_prices(pool: &[f64]) -> Vec<usize> {
    let rev: Vec<f64> =
        (0..PRICES).map(|j| price(j) * pool.iter().filter(|&&v| v >= price(j)).count() as f64).collect();
    let top = rev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (0..PRICES).filter(|&j| rev[j] >= top - TIE).collect()
}

/// Buyer conduct after a first-day price: types `cutoff..` buy, and the
/// seller's second-day prices after a sale and after no sale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Response {
    pub cutoff: usize,
    pub after_sale: usize,
    pub after_no_sale: usize,
    /// Whether the cutoff is optimal for every type.
    pub exact: bool,
}

/// The cutoff response to first-day price `j1`.
///
/// Among cutoffs that are optimal for every type given the seller's
/// second-day replies (ties allowed), the one nearest to the value
/// `min(2 p1, 1)` is chosen. Empty pools are treated as the top type after a
/// sale and the bottom type after no sale. On coarse value grids no cutoff
/// may be optimal for every type; the least violating one is used then.
pub fn response(n: usize, j1: usize) -> Response {
    let vs = values(n);
    let p1 = price(j1);
    let target = n as f64 * (2.0 * p1).min(1.0);
    let mut best: Option<((f64, f64, usize, usize, usize), Response)> = None;
    for k in 0..=n {
        let hi = if k == n { &vs[n - 1..] } else { &vs[k..] };
        let lo = if k == 0 { &vs[..1] } else { &vs[..k] };
        for &pb in &best_prices(hi) {
            for &pn in &best_prices(lo) {
                let violation = vs
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| {
                        let take = v - p1 + (v - price(pb)).max(0.0);
                        let wait = (v - price(pn)).max(0.0);
                        if i >= k {
                            wait - take
                        } else {
                            take - wait
                        }
                    })
                    .fold(0.0f64, f64::max);
                let violation = if violation <= TIE { 0.0 } else { violation };
                let key = (violation, (k as f64 - target).abs(), k, pb, pn);
                if best.as_ref().map_or(true, |(b, _)| key < *b) {
                    best = Some((key, Response { cutoff: k, after_sale: pb, after_no_sale: pn, exact: violation == 0.0 }));
                }
            }
        }
    }
    best.expect("a cutoff always exists").1
}

/// Expected two-day revenue when the first price is `j1`.
pub fn revenue(n: usize, j1: usize, r: &Response) -> f64 {
    let vs = values(n);
    let total: f64 = vs
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let (first, p2) = if i >= r.cutoff { (price(j1), price(r.after_sale)) } else { (0.0, price(r.after_no_sale)) };
            first + if v >= p2 { p2 } else { 0.0 }
        })
        .sum();
    total / n as f64
}

/// The revenue-maximizing first price (lowest on ties) and its revenue.
pub fn optimal_first_price(n: usize) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for j in 0..PRICES {
        let r = revenue(n, j, &response(n, j));
        if r > best.1 + TIE {
            best = (j, r);
        }
    }
    best
}

fn parse_after(label: &str, key: &str) -> usize {
    let k = label.rfind(key).expect("generated label") + key.len();
    label[k..].chars().take_while(char::is_ascii_digit).collect::<String>().parse().expect("generated label")
}

/// Buyer buys on day two iff the value covers the price.
fn day2_buy(label: &str, vs: &[f64]) -> bool {
    vs[parse_after(label, "_t")] >= price(parse_after(label, "_p") / 5)
}

/// The equilibrium candidate of the memory game with `first` as the
/// seller's first-day price, and beliefs that follow the buyers' cutoff
/// conduct after every first price.
pub fn memory_profile(g: &Game, n: usize, first: usize) -> (BehavioralProfile, BeliefSystem) {
    let vs = values(n);
    let responses: Vec<Response> = (0..PRICES).map(|j| response(n, j)).collect();
    let mut s = BehavioralProfile::uniform(g);
    for set in g.infosets() {
        let l = set.label.as_str();
        let action = if l == "S1" {
            price_label(first)
        } else if let Some(rest) = l.strip_prefix("S2_") {
            let r = responses[parse_after(l, "_p") / 5];
            price_label(if rest.ends_with('y') { r.after_sale } else { r.after_no_sale })
        } else if l.starts_with("B1_") {
            let r = responses[parse_after(l, "_p") / 5];
            (if parse_after(l, "_t") >= r.cutoff { "buy" } else { "pass" }).to_string()
        } else {
            (if day2_buy(l, &vs) { "buy" } else { "pass" }).to_string()
        };
        s.set_pure(g, l, &action).expect("labels come from the game");
    }
    // Beliefs at second-day sets condition on the first price only.
    let mut mu = BeliefSystem::uniform(g);
    for (k, set) in g.infosets().iter().enumerate() {
        if !set.label.starts_with("S2_") {
            continue;
        }
        let sold = set.label.ends_with('y');
        let r = responses[parse_after(&set.label, "_p") / 5];
        let w: Vec<f64> = set
            .members
            .iter()
            .map(|&m| {
                let t = parse_after(&g.infoset(g.decision(g.node(m).parent.unwrap()).unwrap().1).label, "_t");
                if (t >= r.cutoff) == sold {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let total: f64 = w.iter().sum();
        mu.probs[k] = if total > 0.0 {
            w.iter().map(|x| x / total).collect()
        } else {
            let pick = if sold { set.members.len() - 1 } else { 0 };
            (0..set.members.len()).map(|i| if i == pick { 1.0 } else { 0.0 }).collect()
        };
    }
    (s, mu)
}

/// Profile of the forgetful game: the seller always posts `j`, buyers buy
/// whenever the value covers the price.
pub fn stationary_profile(g: &Game, n: usize, j: usize) -> BehavioralProfile {
    let vs = values(n);
    let mut s = BehavioralProfile::uniform(g);
    for set in g.infosets() {
        let l = set.label.as_str();
        let action = if g.player_name(set.player) == SELLER {
            if set.actions.len() == 1 {
                set.actions[0].clone()
            } else {
                price_label(j)
            }
        } else {
            let base = crate::xform::base_label(l);
            (if day2_buy(base, &vs) { "buy" } else { "pass" }).to_string()
        };
        s.set_pure(g, l, &action).expect("labels come from the game");
    }
    s
}

/// Best stationary price of the forgetful seller and its revenue.
pub fn forgetful_optimum(xg: &XGame, n: usize) -> Result<(usize, f64)> {
    let mut best = (0, f64::NEG_INFINITY);
    for j in 0..PRICES {
        let r = expected_utilities(&xg.game, &stationary_profile(&xg.game, n, j))?[0];
        if r > best.1 + TIE {
            best = (j, r);
        }
    }
    Ok(best)
}

pub fn reproduce(n: usize) -> Result<ReproductionReport> {
    let mut r = ReproductionReport::new("monopolist");
    let tol = 2.0 / n as f64;
    let g = game(n)?;
    let (first, analytic) = optimal_first_price(n);
    let (sigma, mu) = memory_profile(&g, n, first);
    let memory = expected_utilities(&g, &sigma)?[0];
    r.record("memory.first_price", price(first));
    let resp = response(n, first);
    r.record("memory.price_after_sale", price(resp.after_sale));
    r.record("memory.price_after_no_sale", price(resp.after_no_sale));
    r.record("memory.buy_cutoff_value", values(n).get(resp.cutoff).copied().unwrap_or(1.0));
    r.compare("memory.revenue_matches_analytic", memory, analytic, crate::TOL, Provenance::Derived);
    r.compare("memory.revenue", memory, 0.45, tol, Provenance::Quoted);
    let pbe = check_pbe(&g, &sigma, &mu, 1e-6, &OffPathRule::Prescribed(mu.clone()))?;
    r.check("memory.pbe", pbe.pass, Provenance::Quoted);
    r.record("memory.pbe_max_regret", pbe.max_regret());
    let inexact: Vec<String> =
        (0..PRICES).filter(|&j| !response(n, j).exact).map(|j| format!("{:.2}", price(j))).collect();
    if !inexact.is_empty() {
        r.note(format!("no pure cutoff response is optimal for every type after first price {}", inexact.join(", ")));
    }

    let xg = x_game(n)?;
    let (j, forgetful) = forgetful_optimum(&xg, n)?;
    r.compare("forgetful.price", price(j), 0.5, tol, Provenance::Quoted);
    r.compare("forgetful.revenue", forgetful, 0.5, tol, Provenance::Quoted);
    r.check("forgetful_beats_memory", forgetful > memory, Provenance::Quoted);
    r.note("the printed revenue breakdown for the memory game sums to 0.39; the stated total 0.45 is the one targeted");
    r.note("forgetful revenue is the best pure stationary price; the seller's pooled set is met twice per path");
    Ok(r)
}
