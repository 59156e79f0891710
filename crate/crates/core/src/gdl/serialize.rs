use std::fmt::Write;

use crate::game::{Game, NodeId, NodeKind};
use crate::xform::ForgetSpec;

/// Canonical text of a game.
pub fn serialize_game(g: &Game) -> String {
    serialize_document(g, &[])
}

/// Canonical text of a game followed by its forget blocks.
pub fn serialize_document(g: &Game, forgets: &[ForgetSpec]) -> String {
    let mut out = String::new();
    write!(out, "(game {} (players {})", quote(g.name()), g.players().join(" ")).unwrap();
    if g.is_terminal(g.root()) && forgets.is_empty() {
        out.push(' ');
        node(g, g.root(), 0, &mut out);
        out.push(')');
        return out;
    }
    out.push_str("\n  ");
    node(g, g.root(), 2, &mut out);
    for f in forgets {
        out.push_str("\n  ");
        forget(f, &mut out);
    }
    out.push(')');
    out
}

fn quote(s: &str) -> String {
    let mut q = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => q.push_str("\\\""),
            '\\' => q.push_str("\\\\"),
            '\n' => q.push_str("\\n"),
            c => q.push(c),
        }
    }
    q.push('"');
    q
}

fn num(x: f64) -> String {
    // Display gives the shortest text that parses back to the same value.
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x}")
    }
}

/// A probability rounded to 12 significant digits.
pub fn format_prob(p: f64) -> String {
    let rounded: f64 = format!("{p:.11e}").parse().unwrap_or(p);
    num(rounded)
}

fn sorted_children(g: &Game, n: NodeId) -> Vec<NodeId> {
    let mut c = g.node(n).children.clone();
    c.sort_by(|a, b| g.action_label(*a).cmp(g.action_label(*b)));
    c
}

/// Writes node `n`, assuming the cursor already sits at column `indent`.
fn node(g: &Game, n: NodeId, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent + 2);
    match &g.node(n).kind {
        NodeKind::Terminal { payoffs } => {
            let p: Vec<String> = payoffs.iter().map(|&x| num(x)).collect();
            write!(out, "(payoffs {})", p.join(" ")).unwrap();
        }
        NodeKind::Chance => {
            out.push_str("(chance");
            for c in sorted_children(g, n) {
                let prob = g.node(c).chance_prob.unwrap_or(f64::NAN);
                write!(out, "\n{pad}({} {} ", g.action_label(c), format_prob(prob)).unwrap();
                node(g, c, indent + 2, out);
                out.push(')');
            }
            out.push(')');
        }
        NodeKind::Decision { player, infoset } => {
            write!(out, "(player {} infoset {}", g.player_name(*player), g.infoset(*infoset).label).unwrap();
            for c in sorted_children(g, n) {
                write!(out, "\n{pad}({} ", g.action_label(c)).unwrap();
                node(g, c, indent + 2, out);
                out.push(')');
            }
            out.push(')');
        }
    }
}

fn forget(f: &ForgetSpec, out: &mut String) {
    write!(out, "(forget {} (classes", f.taker).unwrap();
    for (set, class) in &f.memory_classes {
        write!(out, " {set} -> {class}").unwrap();
    }
    out.push(')');
    if let Some(sites) = &f.x_sites {
        out.push_str(" (sites");
        for s in sites {
            write!(out, " {s}").unwrap();
        }
        out.push(')');
    }
    out.push(')');
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{build_game, NodeSpec};
    use crate::gdl::{parse_document, parse_game};
    use crate::models::corpus;

    #[test]
    fn single_terminal() {
        let g = build_game("t", &["P1"], NodeSpec::payoffs(&[0.0])).unwrap();
        assert_eq!(serialize_game(&g), "(game \"t\" (players P1) (payoffs 0))");
    }

    #[test]
    fn fig1_left_layout() {
        let text = serialize_game(&corpus::fig1_left());
        let expected = "\
(game \"fig1-left\" (players P1 P2)
  (player P1 infoset I1
    (A (player P2 infoset I2A
      (a (payoffs 2 1))
      (b (payoffs 0 0))))
    (B (player P2 infoset I2B
      (a (payoffs 0 0))
      (b (payoffs 1 2))))))";
        assert_eq!(text, expected);
    }

    #[test]
    fn shuffled_branches_canonicalize() {
        let shuffled = "(game \"fig1-left\" (players P1 P2)
  (player P1 infoset I1
    (B (player P2 infoset I2B (b (payoffs 1 2)) (a (payoffs 0 0))))
    (A (player P2 infoset I2A (b (payoffs 0 0)) (a (payoffs 2 1))))))";
        let g = parse_game(shuffled).unwrap();
        assert_eq!(serialize_game(&g), serialize_game(&corpus::fig1_left()));
    }

    #[test]
    fn names_are_escaped() {
        let g = build_game("a \"b\" \\c", &["P1"], NodeSpec::payoffs(&[1.5])).unwrap();
        let text = serialize_game(&g);
        assert_eq!(parse_game(&text).unwrap().name(), g.name());
    }

    #[test]
    fn probabilities_keep_twelve_digits() {
        assert_eq!(format_prob(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_prob(0.5), "0.5");
        assert_eq!(format_prob(0.0), "0");
    }

    #[test]
    fn payoffs_round_trip_exactly() {
        let x = 0.1 + 0.2;
        let g = build_game("p", &["P1"], NodeSpec::payoffs(&[x])).unwrap();
        let back = parse_game(&serialize_game(&g)).unwrap();
        assert_eq!(back.payoffs(back.root()).unwrap()[0], x);
    }

    #[test]
    fn document_round_trip() {
        let g = corpus::fig1_left();
        let spec = ForgetSpec::new("P2").class("I2A", "m").class("I2B", "m").sites(["I2A"]);
        let text = serialize_document(&g, &[spec.clone()]);
        let d = parse_document(&text).unwrap();
        assert_eq!(d.forgets, vec![spec]);
        assert_eq!(serialize_document(&d.game, &d.forgets), text);
    }
}
