//! Reputation bargaining as a discrete war of attrition.
//!
//! A buyer values the good at 12000; a seller's cost is 2000. The buyer
//! insists on paying 4000 and the seller on receiving 10000. Each side is
//! stubborn with prior probability `pi` and then never concedes. In every
//! period of length `dt` the rational types decide simultaneously whether to
//! concede to the other side's demand. Payoffs are in units of 10000 and
//! discounted at rate `beta`. In the last period rational types must
//! concede.
//!
//! With X the buyer forgets how many periods have passed: all of its
//! waiting decisions fall into one information set.

use super::report::{Provenance, ReproductionReport};
use crate::equilibrium::{is_epsilon_nash, BehavioralProfile};
use crate::error::{Error, Result};
use crate::game::{build_game, Game, NodeSpec};
use crate::xform::{apply_x, ForgetSpec, XGame};

pub const BUYER: &str = "Buyer";
pub const SELLER: &str = "Seller";
pub const VALUE: f64 = 12000.0;
pub const COST: f64 = 2000.0;
pub const HIGH: f64 = 10000.0;
pub const LOW: f64 = 4000.0;
const UNIT: f64 = 10000.0;
const MAX_PERIODS: usize = 20_000;

fn open_unit(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {x} outside (0, 1)")))
    }
}

/// Probability that a rational opponent has conceded by time `t`:
/// `1 - exp(-beta t / 3)`.
pub fn concession_cdf(t: f64, beta: f64) -> Result<f64> {
    open_unit("beta", beta)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("time {t} must be finite and nonnegative")));
    }
    Ok(-(-beta * t / 3.0).exp_m1())
}

/// Time by which every rational type has conceded: `-3 ln(pi) / beta`.
pub fn concession_deadline(pi: f64, beta: f64) -> Result<f64> {
    open_unit("pi", pi)?;
    open_unit("beta", beta)?;
    Ok(-3.0 * pi.ln() / beta)
}

/// Opponent concession hazard that leaves a player indifferent between
/// conceding now for surplus `concede` and waiting for surplus `win`:
/// `beta * concede / (win - concede)`.
pub fn indifference_hazard(concede: f64, win: f64, beta: f64) -> Result<f64> {
    if !(concede > 0.0 && win > concede && win.is_finite()) {
        return Err(Error::Domain(format!("need 0 < concede < win, got {concede} and {win}")));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Domain(format!("beta = {beta} must be positive")));
    }
    Ok(beta * concede / (win - concede))
}

/// Number of periods: one past the last period starting before the deadline.
pub fn horizon(pi: f64, beta: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain(format!("dt = {dt} must be positive")));
    }
    let h = (concession_deadline(pi, beta)? / dt).ceil() + 1.0;
    if h > MAX_PERIODS as f64 {
        return Err(Error::Refused { what: "bargaining periods".into(), size: h, cap: MAX_PERIODS as f64 });
    }
    Ok(h as usize)
}

/// Payoffs (buyer, seller) when the given sides concede, undiscounted.
pub fn settlement(buyer_concedes: bool, seller_concedes: bool) -> (f64, f64) {
    let at = |p: f64| ((VALUE - p) / UNIT, (p - COST) / UNIT);
    match (buyer_concedes, seller_concedes) {
        (true, true) => at((HIGH + LOW) / 2.0),
        (true, false) => at(HIGH),
        (false, true) => at(LOW),
        (false, false) => (0.0, 0.0),
    }
}

struct Builder {
    h: usize,
    d: f64,
}

impl Builder {
    fn outcome(&self, k: usize, bc: bool, sc: bool, br: bool, sr: bool) -> NodeSpec {
        if bc || sc {
            let (b, s) = settlement(bc, sc);
            let f = self.d.powi(k as i32);
            NodeSpec::payoffs(&[b * f, s * f])
        } else {
            self.period(k + 1, br, sr)
        }
    }

    fn seller(&self, k: usize, bc: bool, br: bool, sr: bool) -> NodeSpec {
        if sr {
            NodeSpec::decision(
                SELLER,
                format!("S{k}"),
                vec![("concede", self.outcome(k, bc, true, br, sr)), ("hold", self.outcome(k, bc, false, br, sr))],
            )
        } else {
            self.outcome(k, bc, false, br, sr)
        }
    }

    fn period(&self, k: usize, br: bool, sr: bool) -> NodeSpec {
        if !br && !sr {
            return NodeSpec::payoffs(&[0.0, 0.0]);
        }
        if k + 1 == self.h {
            let (b, s) = settlement(br, sr);
            let f = self.d.powi(k as i32);
            return NodeSpec::payoffs(&[b * f, s * f]);
        }
        if br {
            NodeSpec::decision(
                BUYER,
                format!("B{k}"),
                vec![("concede", self.seller(k, true, br, sr)), ("hold", self.seller(k, false, br, sr))],
            )
        } else {
            self.seller(k, false, br, sr)
        }
    }
}

/// The discrete game without forgetting.
pub fn game(pi: f64, beta: f64, dt: f64) -> Result<Game> {
    open_unit("beta", beta)?;
    let b = Builder { h: horizon(pi, beta, dt)?, d: (-beta * dt).exp() };
    let seller_type = |br: bool| {
        NodeSpec::chance(vec![("s_stubborn", pi, b.period(0, br, false)), ("s_rational", 1.0 - pi, b.period(0, br, true))])
    };
    build_game(
        &format!("bargaining-{dt}"),
        &[BUYER, SELLER],
        NodeSpec::chance(vec![("b_stubborn", pi, seller_type(false)), ("b_rational", 1.0 - pi, seller_type(true))]),
    )
}

/// X at the first waiting decision; every waiting decision afterwards is
/// pooled into one stationary class.
pub fn forget_spec(periods: usize) -> ForgetSpec {
    (0..periods.saturating_sub(1))
        .fold(ForgetSpec::new(BUYER).sites(["B0"]), |s, k| s.class(&format!("B{k}"), "stationary"))
}

pub fn x_game(pi: f64, beta: f64, dt: f64) -> Result<XGame> {
    apply_x(&game(pi, beta, dt)?, &forget_spec(horizon(pi, beta, dt)?))
}

/// The buyer takes X and holds out; the rational seller concedes at once.
pub fn x_profile(g: &Game) -> BehavioralProfile {
    let mut s = BehavioralProfile::uniform(g);
    for set in g.infosets() {
        let a = if g.player_name(set.player) == SELLER {
            "concede"
        } else if set.actions.iter().any(|a| a == "X") {
            "X"
        } else {
            "hold"
        };
        s.set_pure(g, &set.label, a).expect("labels come from the game");
    }
    s
}

/// Per-period conditional concession probabilities of a rational type that
/// reproduce the survival function `max(exp(-lambda t), pi)` of the whole
/// population, with `lambda` from [`indifference_hazard`].
pub fn hazard_schedule(pi: f64, beta: f64, dt: f64) -> Result<Vec<f64>> {
    let h = horizon(pi, beta, dt)?;
    let lambda = indifference_hazard(
        (VALUE - HIGH) / UNIT,
        (VALUE - LOW) / UNIT,
        beta,
    )?;
    let rational = |k: usize| (((-lambda * k as f64 * dt).exp()).max(pi) - pi) / (1.0 - pi);
    Ok((0..h)
        .map(|k| {
            let r = rational(k);
            if r <= 0.0 {
                1.0
            } else {
                ((r - rational(k + 1)) / r).clamp(0.0, 1.0)
            }
        })
        .collect())
}

/// Both rational types concede according to [`hazard_schedule`].
pub fn hazard_profile(g: &Game, pi: f64, beta: f64, dt: f64) -> Result<BehavioralProfile> {
    let c = hazard_schedule(pi, beta, dt)?;
    let mut s = BehavioralProfile::uniform(g);
    for set in g.infosets() {
        let k: usize = set.label[1..].parse().expect("generated label");
        s.set(g, &set.label, &[("concede", c[k]), ("hold", 1.0 - c[k])])?;
    }
    Ok(s)
}

/// Largest unilateral gain against the hazard profile.
pub fn hazard_regret(pi: f64, beta: f64, dt: f64) -> Result<f64> {
    let g = game(pi, beta, dt)?;
    let s = hazard_profile(&g, pi, beta, dt)?;
    Ok(is_epsilon_nash(&g, &s, 0.0)?.max_regret())
}

pub fn reproduce(pi: f64, beta: f64, dt: f64) -> Result<ReproductionReport> {
    let mut r = ReproductionReport::new("bargaining");
    let t = concession_deadline(pi, beta)?;
    r.record("deadline", t);
    r.compare("cdf_at_deadline", concession_cdf(t, beta)?, 1.0 - pi, 1e-12, Provenance::Derived);
    let lambda = indifference_hazard(VALUE - HIGH, VALUE - LOW, beta)?;
    r.compare("hazard_over_beta", lambda / beta, 1.0 / 3.0, 1e-15, Provenance::Quoted);
    r.record("periods", horizon(pi, beta, dt)? as f64);

    let xg = x_game(pi, beta, dt)?;
    let nash = is_epsilon_nash(&xg.game, &x_profile(&xg.game), 0.05)?;
    r.check("x.hold_out_is_nash", nash.pass, Provenance::Quoted);
    r.record("x.max_regret", nash.max_regret());

    let steps = [0.5, 0.25, 0.125];
    let mut regrets = Vec::new();
    for h in steps {
        let e = hazard_regret(pi, beta, h)?;
        r.record(&format!("no_x.regret_dt_{h}"), e);
        regrets.push(e);
    }
    r.check("no_x.regret_decreasing", regrets.windows(2).all(|w| w[1] < w[0]), Provenance::Derived);
    r.record("no_x.regret_dt_0.01", hazard_regret(pi, beta, 0.01)?);
    r.note("a simultaneous concession splits the difference at 7000");
    Ok(r)
}
