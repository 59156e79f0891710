use std::collections::BTreeSet;

use super::lexer::{lex, Tok, Token};
use super::ParseError;
use crate::game::{Game, PlayerId, RawKind, RawNode};
use crate::xform::ForgetSpec;

/// A parsed `.efx` file.
#[derive(Clone, Debug)]
pub struct GameDocument {
    pub game: Game,
    pub forgets: Vec<ForgetSpec>,
}

impl GameDocument {
    /// The forget block whose taker is `name`.
    pub fn forget(&self, name: &str) -> Option<&ForgetSpec> {
        self.forgets.iter().find(|f| f.taker == name)
    }
}

/// Parses a game, ignoring any forget blocks.
pub fn parse_game(text: &str) -> Result<Game, ParseError> {
    parse_document(text).map(|d| d.game)
}

pub fn parse_document(text: &str) -> Result<GameDocument, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, players: Vec::new(), raw: Vec::new(), at: Vec::new() };
    p.document()
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    players: Vec<String>,
    raw: Vec<RawNode>,
    // Position of the opening parenthesis of each raw node.
    at: Vec<(usize, usize)>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, t: &Token, message: &str, expected: &[&str]) -> Result<T, ParseError> {
        Err(ParseError::new(t.line, t.col, message, expected, &t.tok.describe()))
    }

    fn open(&mut self, what: &str) -> Result<Token, ParseError> {
        let t = self.bump();
        match t.tok {
            Tok::Open => Ok(t),
            _ => self.fail(&t, &format!("expected {what}"), &["`(`"]),
        }
    }

    fn close(&mut self, what: &str) -> Result<(), ParseError> {
        let t = self.bump();
        match t.tok {
            Tok::Close => Ok(()),
            _ => self.fail(&t, &format!("too many elements in {what}"), &["`)`"]),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        let t = self.bump();
        match &t.tok {
            Tok::Atom(a) if a == kw => Ok(()),
            _ => self.fail(&t, &format!("expected keyword `{kw}`"), &[&format!("`{kw}`")]),
        }
    }

    fn atom(&mut self, what: &str) -> Result<(String, Token), ParseError> {
        let t = self.bump();
        match &t.tok {
            Tok::Atom(a) => Ok((a.clone(), t)),
            _ => self.fail(&t, &format!("expected {what}"), &[what]),
        }
    }

    fn number(&mut self, what: &str) -> Result<f64, ParseError> {
        let (a, t) = self.atom(what)?;
        match a.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => self.fail(&t, &format!("expected {what}"), &[what]),
        }
    }

    fn at_open(&self) -> bool {
        self.peek().tok == Tok::Open
    }

    fn document(&mut self) -> Result<GameDocument, ParseError> {
        self.open("a game document")?;
        self.keyword("game")?;
        let t = self.bump();
        let name = match t.tok {
            Tok::Str(s) => s,
            _ => return self.fail(&t, "expected the game name", &["string"]),
        };
        self.open("the player list")?;
        self.keyword("players")?;
        while let Tok::Atom(_) = self.peek().tok {
            let (p, t) = self.atom("player name")?;
            if self.players.contains(&p) {
                return self.fail(&t, &format!("player `{p}` listed twice"), &[]);
            }
            self.players.push(p);
        }
        if self.players.is_empty() {
            let t = self.peek().clone();
            return self.fail(&t, "at least one player is required", &["player name"]);
        }
        self.close("player list")?;
        self.node(None, None, None)?;

        let game = Game::assemble(&name, self.players.clone(), std::mem::take(&mut self.raw));
        if let Some(v) = game.validate_structure().into_iter().next() {
            let (line, col) = v.node().and_then(|n| self.at.get(n).copied()).unwrap_or((1, 1));
            return Err(ParseError::new(line, col, &v.to_string(), &[], ""));
        }

        let mut forgets = Vec::new();
        while self.at_open() {
            forgets.push(self.forget(&game)?);
        }
        self.close("game document")?;
        let t = self.bump();
        if t.tok != Tok::Eof {
            return self.fail(&t, "trailing input after the game document", &["end of input"]);
        }
        Ok(GameDocument { game, forgets })
    }

    fn node(&mut self, parent: Option<usize>, action: Option<String>, prob: Option<f64>) -> Result<(), ParseError> {
        let open = self.open("a node")?;
        let idx = self.raw.len();
        self.at.push((open.line, open.col));
        let (kw, t) = self.atom("`chance`, `player` or `payoffs`")?;
        match kw.as_str() {
            "payoffs" => {
                let mut payoffs = vec![self.number("payoff")?];
                while let Tok::Atom(_) = self.peek().tok {
                    payoffs.push(self.number("payoff")?);
                }
                self.raw.push(RawNode { parent, action, chance_prob: prob, kind: RawKind::Terminal { payoffs } });
                self.close("payoffs")
            }
            "chance" => {
                self.raw.push(RawNode { parent, action, chance_prob: prob, kind: RawKind::Chance });
                if !self.at_open() {
                    let t = self.peek().clone();
                    return self.fail(&t, "chance node needs at least one outcome", &["`(`"]);
                }
                while self.at_open() {
                    self.bump();
                    let (a, _) = self.atom("action label")?;
                    let pr = self.number("probability")?;
                    self.node(Some(idx), Some(a), Some(pr))?;
                    self.close("chance outcome")?;
                }
                self.close("chance node")
            }
            "player" => {
                let (owner, ot) = self.atom("player name")?;
                let Some(pid) = self.players.iter().position(|p| *p == owner) else {
                    return self.fail(&ot, &format!("unknown player `{owner}`"), &[]);
                };
                self.keyword("infoset")?;
                let (infoset, _) = self.atom("infoset label")?;
                self.raw.push(RawNode {
                    parent,
                    action,
                    chance_prob: prob,
                    kind: RawKind::Decision { player: PlayerId(pid), infoset },
                });
                if !self.at_open() {
                    let t = self.peek().clone();
                    return self.fail(&t, "decision node needs at least one action", &["`(`"]);
                }
                while self.at_open() {
                    self.bump();
                    let (a, _) = self.atom("action label")?;
                    self.node(Some(idx), Some(a), None)?;
                    self.close("branch")?;
                }
                self.close("decision node")
            }
            _ => self.fail(&t, "unknown node kind", &["`chance`", "`player`", "`payoffs`"]),
        }
    }

    fn forget(&mut self, game: &Game) -> Result<ForgetSpec, ParseError> {
        self.open("a forget block")?;
        self.keyword("forget")?;
        let (taker, tt) = self.atom("player name")?;
        let Ok(pid) = game.player_id(&taker) else {
            return self.fail(&tt, &format!("unknown player `{taker}`"), &[]);
        };
        let owned: BTreeSet<&str> =
            game.infosets_of(pid).iter().map(|&i| game.infoset(i).label.as_str()).collect();
        let mut spec = ForgetSpec::new(&taker);
        self.open("the class list")?;
        self.keyword("classes")?;
        loop {
            let (set, st) = self.atom("infoset label")?;
            if !owned.contains(set.as_str()) {
                return self.fail(&st, &format!("unknown infoset `{set}` for player `{taker}`"), &[]);
            }
            self.keyword("->")?;
            let (class, _) = self.atom("class name")?;
            spec = spec.class(&set, &class);
            if !matches!(self.peek().tok, Tok::Atom(_)) {
                break;
            }
        }
        self.close("class list")?;
        if self.at_open() {
            self.bump();
            self.keyword("sites")?;
            let mut sites = Vec::new();
            loop {
                let (set, st) = self.atom("infoset label")?;
                if !owned.contains(set.as_str()) {
                    return self.fail(&st, &format!("unknown infoset `{set}` for player `{taker}`"), &[]);
                }
                sites.push(set);
                if !matches!(self.peek().tok, Tok::Atom(_)) {
                    break;
                }
            }
            self.close("site list")?;
            spec = spec.sites(sites);
        }
        self.close("forget block")?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: &str = r#"
(game "fig1-left" (players P1 P2)
  (player P1 infoset I1
    (A (player P2 infoset I2A
      (a (payoffs 2 1))
      (b (payoffs 0 0))))
    (B (player P2 infoset I2B
      (a (payoffs 0 0))
      (b (payoffs 1 2))))))
"#;

    #[test]
    fn fig1_left_document() {
        let g = parse_game(FIG1).unwrap();
        assert_eq!(g.len(), 7);
        assert_eq!(g.infosets().len(), 3);
        assert!(g.structurally_eq(&crate::models::corpus::fig1_left()));
    }

    #[test]
    fn unnormalized_chance_points_at_chance_expression() {
        let text = "(game \"c\" (players P1)\n  (chance (H 0.5 (payoffs 1)) (T 0.4 (payoffs 0))))";
        let e = parse_game(text).unwrap_err();
        assert_eq!((e.line, e.col), (2, 3));
        assert!(e.message.contains("sum"));
    }

    #[test]
    fn arity_error() {
        let e = parse_game("(game \"g\" (players P1) (player P1 infoset I (a)))").unwrap_err();
        assert_eq!((e.line, e.col), (1, 47));
        assert_eq!(e.expected, vec!["`(`"]);
    }

    #[test]
    fn unknown_node_kind() {
        let e = parse_game("(game \"g\" (players P1) (leaf 1))").unwrap_err();
        assert_eq!(e.col, 25);
        assert_eq!(e.expected.len(), 3);
    }

    #[test]
    fn bad_number() {
        let e = parse_game("(game \"g\" (players P1) (payoffs one))").unwrap_err();
        assert_eq!(e.col, 33);
    }

    #[test]
    fn trailing_input() {
        let e = parse_game("(game \"t\" (players P1) (payoffs 0)) x").unwrap_err();
        assert_eq!(e.col, 37);
    }

    #[test]
    fn forget_block() {
        let text = FIG1.trim_end().trim_end_matches(')').to_string()
            + ")))))\n  (forget P2 (classes I2A -> m I2B -> m) (sites I2A)))";
        let d = parse_document(&text).unwrap();
        let f = d.forget("P2").unwrap();
        assert_eq!(f.memory_classes.get("I2B").map(String::as_str), Some("m"));
        assert_eq!(f.x_sites.as_ref().unwrap().len(), 1);
    }

    #[test]
    fn forget_block_unknown_infoset() {
        let text = FIG1.trim_end().trim_end_matches(')').to_string()
            + ")))))\n  (forget P2 (classes I1 -> m)))";
        let e = parse_document(&text).unwrap_err();
        assert_eq!(e.line, 10);
        assert!(e.message.contains("I1"));
    }

    #[test]
    fn duplicate_action_position() {
        let text = "(game \"g\" (players P1)\n (player P1 infoset I\n  (a (payoffs 1))\n  (a (payoffs 2))))";
        let e = parse_game(text).unwrap_err();
        assert_eq!((e.line, e.col), (2, 2));
    }
}
