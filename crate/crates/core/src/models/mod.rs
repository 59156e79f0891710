//! Generators for the worked scenarios and reports that compare computed
//! quantities with their targets.

pub mod arrow;
pub mod bargaining;
pub mod corpus;
pub mod entry;
pub mod mafia;
pub mod monopolist;
pub mod report;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use bargaining::{concession_cdf, concession_deadline, indifference_hazard};
pub use report::{Entry, Provenance, ReproductionReport};

use crate::error::{Error, Result};
use crate::game::Game;
use crate::xform::validate_x_properties;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Monopolist,
    Bargaining,
    Mafia,
    Entry,
    Arrow,
    Fig1,
}

impl Scenario {
    pub const ALL: [Scenario; 6] =
        [Scenario::Monopolist, Scenario::Bargaining, Scenario::Mafia, Scenario::Entry, Scenario::Arrow, Scenario::Fig1];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Monopolist => "monopolist",
            Scenario::Bargaining => "bargaining",
            Scenario::Mafia => "mafia",
            Scenario::Entry => "entry",
            Scenario::Arrow => "arrow",
            Scenario::Fig1 => "fig1",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Scenario> {
        Scenario::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown scenario `{s}`")))
    }
}

/// Scenario selection and its numeric parameters. Parameters that do not
/// apply to the chosen scenario are ignored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub scenario: Scenario,
    pub with_x: bool,
    /// Monopolist: number of equally spaced buyer values.
    pub n_values: usize,
    /// Bargaining: prior probability of each stubborn type.
    pub pi: f64,
    /// Bargaining: discount rate.
    pub beta: f64,
    /// Bargaining: period length.
    pub dt: f64,
    /// Mafia: number of owners.
    pub n_owners: usize,
    /// Mafia: probability of the reckless type.
    pub p_reckless: f64,
    /// Entry: probability the entrant is already in the market.
    pub q: f64,
}

impl ScenarioParams {
    pub fn new(scenario: Scenario) -> ScenarioParams {
        ScenarioParams {
            scenario,
            with_x: false,
            n_values: 100,
            pi: 0.1,
            beta: 0.5,
            dt: 0.5,
            n_owners: 3,
            p_reckless: 0.2,
            q: 0.9,
        }
    }

    pub fn with_x(mut self, with_x: bool) -> ScenarioParams {
        self.with_x = with_x;
        self
    }

    /// Sets a parameter from its textual form, as in `n_values=100`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::Domain(format!("bad value `{v}` for `{key}`")))
        }
        match key {
            "with_x" => self.with_x = parse(key, value)?,
            "n_values" => self.n_values = parse(key, value)?,
            "pi" => self.pi = parse(key, value)?,
            "beta" => self.beta = parse(key, value)?,
            "dt" => self.dt = parse(key, value)?,
            "n_owners" => self.n_owners = parse(key, value)?,
            "p_reckless" => self.p_reckless = parse(key, value)?,
            "q" => self.q = parse(key, value)?,
            _ => return Err(Error::Domain(format!("unknown parameter `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let open = |name: &str, x: f64| {
            if x > 0.0 && x < 1.0 {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} = {x} outside (0, 1)")))
            }
        };
        match self.scenario {
            Scenario::Monopolist if !(2..=400).contains(&self.n_values) => {
                Err(Error::Domain(format!("n_values = {} outside 2..=400", self.n_values)))
            }
            Scenario::Bargaining => {
                open("pi", self.pi)?;
                open("beta", self.beta)?;
                if !(self.dt > 0.0 && self.dt.is_finite()) {
                    return Err(Error::Domain(format!("dt = {} must be positive", self.dt)));
                }
                bargaining::horizon(self.pi, self.beta, self.dt).map(|_| ())
            }
            Scenario::Mafia => {
                if !(1..=6).contains(&self.n_owners) {
                    return Err(Error::Domain(format!("n_owners = {} outside 1..=6", self.n_owners)));
                }
                if !(0.0..1.0).contains(&self.p_reckless) {
                    return Err(Error::Domain(format!("p_reckless = {} outside [0, 1)", self.p_reckless)));
                }
                Ok(())
            }
            Scenario::Entry => open("q", self.q),
            _ => Ok(()),
        }
    }
}

/// The scenario's game, with X applied when `with_x` is set.
pub fn scenario_game(p: &ScenarioParams) -> Result<Game> {
    p.validate()?;
    let (orig, xg) = match p.scenario {
        Scenario::Fig1 => return Ok(if p.with_x { corpus::fig1_right() } else { corpus::fig1_left() }),
        Scenario::Monopolist if p.with_x => (monopolist::game(p.n_values)?, monopolist::x_game(p.n_values)?),
        Scenario::Monopolist => return monopolist::game(p.n_values),
        Scenario::Bargaining => {
            let g = bargaining::game(p.pi, p.beta, p.dt)?;
            if !p.with_x {
                return Ok(g);
            }
            let xg = bargaining::x_game(p.pi, p.beta, p.dt)?;
            (g, xg)
        }
        Scenario::Mafia => {
            let g = mafia::game(p.n_owners, p.p_reckless)?;
            if !p.with_x {
                return Ok(g);
            }
            let xg = mafia::x_game(p.n_owners, p.p_reckless)?;
            (g, xg)
        }
        Scenario::Entry if p.with_x => (entry::game_with_incumbency(p.q)?, entry::x_game(p.q)?),
        Scenario::Entry => return Ok(entry::game()),
        Scenario::Arrow if p.with_x => (arrow::game(), arrow::x_game()?),
        Scenario::Arrow => return Ok(arrow::game()),
    };
    let props = validate_x_properties(&orig, &xg)?;
    if !props.all_pass() {
        return Err(Error::Domain(format!("X properties fail: {}", props.failing().join(", "))));
    }
    Ok(xg.game)
}

/// Builds the scenario, runs its equilibrium checks and compares the
/// results with their targets.
pub fn reproduce(p: &ScenarioParams) -> Result<ReproductionReport> {
    p.validate()?;
    let ctx = |e: Error| match e {
        Error::Refused { what, size, cap } => Error::Refused { what: format!("{}: {what}", p.scenario), size, cap },
        other => other,
    };
    match p.scenario {
        Scenario::Monopolist => monopolist::reproduce(p.n_values),
        Scenario::Bargaining => bargaining::reproduce(p.pi, p.beta, p.dt),
        Scenario::Mafia => mafia::reproduce(p.n_owners, p.p_reckless),
        Scenario::Entry => entry::reproduce(p.q),
        Scenario::Arrow => arrow::reproduce(),
        Scenario::Fig1 => corpus::reproduce_fig1(),
    }
    .map_err(ctx)
}
