//! Text forms of strategy profiles and belief systems.
//!
//! ```text
//! (profile (I1 A) (I2A (a 0.5) (b 0.5)) (I2B b))
//! (beliefs (I2 (0.25 A) (0.75 B)))
//! ```
//!
//! A bare action is shorthand for playing it with certainty. Beliefs name
//! member nodes by the action labels on their root path; singleton
//! information sets may be omitted.

use std::fmt::Write;

use super::lexer::{lex, Tok, Token};
use super::{format_prob, ParseError};
use crate::equilibrium::{BehavioralProfile, BeliefSystem};
use crate::error::{Error, Result};
use crate::game::Game;

#[derive(Debug)]
enum Sexp {
    Atom(String, usize, usize),
    List(Vec<Sexp>, usize, usize),
}

impl Sexp {
    fn pos(&self) -> (usize, usize) {
        match self {
            Sexp::Atom(_, l, c) | Sexp::List(_, l, c) => (*l, *c),
        }
    }

    fn err(&self, message: &str) -> Error {
        let (l, c) = self.pos();
        Error::Parse(ParseError::new(l, c, message, &[], ""))
    }

    fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a, ..) => Some(a),
            _ => None,
        }
    }

    fn number(&self) -> Result<f64> {
        self.atom()
            .and_then(|a| a.parse::<f64>().ok())
            .filter(|x| x.is_finite())
            .ok_or_else(|| self.err("expected a number"))
    }
}

fn read(text: &str) -> Result<Sexp> {
    let toks = lex(text)?;
    let mut pos = 0;
    let s = read_one(&toks, &mut pos)?;
    let t = &toks[pos];
    if t.tok != Tok::Eof {
        return Err(ParseError::new(t.line, t.col, "trailing input", &["end of input"], &t.tok.describe()).into());
    }
    Ok(s)
}

fn read_one(toks: &[Token], pos: &mut usize) -> Result<Sexp> {
    let t = &toks[*pos];
    match &t.tok {
        Tok::Atom(a) => {
            *pos += 1;
            Ok(Sexp::Atom(a.clone(), t.line, t.col))
        }
        Tok::Open => {
            *pos += 1;
            let mut items = Vec::new();
            while toks[*pos].tok != Tok::Close {
                if toks[*pos].tok == Tok::Eof {
                    let e = &toks[*pos];
                    return Err(ParseError::new(e.line, e.col, "unbalanced parentheses", &["`)`"], "end of input").into());
                }
                items.push(read_one(toks, pos)?);
            }
            *pos += 1;
            Ok(Sexp::List(items, t.line, t.col))
        }
        other => Err(ParseError::new(t.line, t.col, "unexpected token", &["`(`", "atom"], &other.describe()).into()),
    }
}

/// Splits `(head entry...)` into its entries.
fn entries<'a>(s: &'a Sexp, head: &str) -> Result<&'a [Sexp]> {
    match s {
        Sexp::List(items, ..) if items.first().and_then(Sexp::atom) == Some(head) => Ok(&items[1..]),
        _ => Err(s.err(&format!("expected `({head} ...)`"))),
    }
}

pub fn parse_profile(text: &str, g: &Game) -> Result<BehavioralProfile> {
    let doc = read(text)?;
    let mut seen = vec![false; g.infosets().len()];
    let mut sigma = BehavioralProfile::uniform(g);
    for e in entries(&doc, "profile")? {
        let Sexp::List(items, ..) = e else {
            return Err(e.err("expected `(infoset action)` or `(infoset (action prob)...)`"));
        };
        let label = items.first().and_then(Sexp::atom).ok_or_else(|| e.err("expected an infoset label"))?;
        let id = g.infoset_id(label).map_err(|_| e.err(&format!("unknown infoset `{label}`")))?;
        if std::mem::replace(&mut seen[id.0], true) {
            return Err(e.err(&format!("infoset `{label}` given twice")));
        }
        let mut dist = Vec::new();
        match &items[1..] {
            [Sexp::Atom(a, ..)] => dist.push((a.as_str(), 1.0)),
            rest if !rest.is_empty() => {
                for r in rest {
                    match r {
                        Sexp::List(pair, ..) if pair.len() == 2 => {
                            let a = pair[0].atom().ok_or_else(|| r.err("expected an action label"))?;
                            dist.push((a, pair[1].number()?));
                        }
                        _ => return Err(r.err("expected `(action probability)`")),
                    }
                }
            }
            _ => return Err(e.err("missing action")),
        }
        sigma.set(g, label, &dist).map_err(|err| e.err(&err.to_string()))?;
    }
    if let Some(k) = seen.iter().position(|s| !s) {
        return Err(Error::Profile(format!("missing infoset `{}`", g.infosets()[k].label)));
    }
    sigma.check(g)?;
    Ok(sigma)
}

pub fn serialize_profile(g: &Game, sigma: &BehavioralProfile) -> String {
    let mut out = String::from("(profile");
    for (set, v) in g.infosets().iter().zip(&sigma.probs) {
        if let Some(k) = v.iter().position(|&p| p == 1.0) {
            write!(out, "\n  ({} {})", set.label, set.actions[k]).unwrap();
            continue;
        }
        write!(out, "\n  ({}", set.label).unwrap();
        for (a, &p) in set.actions.iter().zip(v) {
            if p != 0.0 {
                write!(out, " ({a} {})", format_prob(p)).unwrap();
            }
        }
        out.push(')');
    }
    out.push(')');
    out
}

pub fn parse_beliefs(text: &str, g: &Game) -> Result<BeliefSystem> {
    let doc = read(text)?;
    let mut seen = vec![false; g.infosets().len()];
    let mut mu = BeliefSystem::uniform(g);
    for e in entries(&doc, "beliefs")? {
        let Sexp::List(items, ..) = e else {
            return Err(e.err("expected `(infoset (prob history...)...)`"));
        };
        let label = items.first().and_then(Sexp::atom).ok_or_else(|| e.err("expected an infoset label"))?;
        let id = g.infoset_id(label).map_err(|_| e.err(&format!("unknown infoset `{label}`")))?;
        seen[id.0] = true;
        let mut dist = Vec::new();
        for r in &items[1..] {
            let Sexp::List(parts, ..) = r else {
                return Err(r.err("expected `(probability action...)`"));
            };
            let p = parts.first().ok_or_else(|| r.err("expected a probability"))?.number()?;
            let path: Vec<&str> =
                parts[1..].iter().map(|s| s.atom().ok_or_else(|| s.err("expected an action label"))).collect::<Result<_>>()?;
            let n = g.find_history(&path).ok_or_else(|| r.err("history not in the game"))?;
            dist.push((n, p));
        }
        mu.set(g, id, &dist).map_err(|err| e.err(&err.to_string()))?;
    }
    for (k, set) in g.infosets().iter().enumerate() {
        if !seen[k] && set.members.len() > 1 {
            return Err(Error::Beliefs(format!("missing beliefs for infoset `{}`", set.label)));
        }
    }
    mu.check(g)?;
    Ok(mu)
}

pub fn serialize_beliefs(g: &Game, mu: &BeliefSystem) -> String {
    let mut out = String::from("(beliefs");
    for (set, v) in g.infosets().iter().zip(&mu.probs) {
        if set.members.len() == 1 {
            continue;
        }
        write!(out, "\n  ({}", set.label).unwrap();
        for (&m, &p) in set.members.iter().zip(v) {
            write!(out, " ({}", format_prob(p)).unwrap();
            for a in g.history(m) {
                write!(out, " {a}").unwrap();
            }
            out.push(')');
        }
        out.push(')');
    }
    out.push(')');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::corpus;

    #[test]
    fn profile_round_trip() {
        let g = corpus::fig1_left();
        let s = parse_profile("(profile (I1 A) (I2A (a 0.5) (b 0.5)) (I2B b))", &g).unwrap();
        assert_eq!(s.get(g.infoset_id("I2A").unwrap()), &[0.5, 0.5]);
        let text = serialize_profile(&g, &s);
        assert_eq!(parse_profile(&text, &g).unwrap(), s);
    }

    #[test]
    fn profile_errors() {
        let g = corpus::fig1_left();
        assert!(matches!(parse_profile("(profile (I1 A))", &g), Err(Error::Profile(_))));
        let e = parse_profile("(profile (I1 A) (I9 a))", &g).unwrap_err();
        assert!(matches!(e, Error::Parse(ParseError { col: 17, .. })));
        assert!(parse_profile("(profile (I1 (A 0.6)) (I2A a) (I2B a))", &g).is_err());
    }

    #[test]
    fn beliefs_round_trip() {
        let g = corpus::matching_pennies();
        let set = g.infosets().iter().find(|s| s.members.len() == 2).unwrap().label.clone();
        let text = format!("(beliefs ({set} (0.25 H) (0.75 T)))");
        let mu = parse_beliefs(&text, &g).unwrap();
        assert_eq!(parse_beliefs(&serialize_beliefs(&g, &mu), &g).unwrap(), mu);
        assert!(parse_beliefs("(beliefs)", &g).is_err());
    }
}
