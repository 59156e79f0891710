use std::fmt::Write;

use crate::game::{Game, NodeKind};

#[derive(Clone, Debug, PartialEq)]
pub struct DotOptions {
    /// Link members of each information set with dashed undirected edges.
    pub show_infosets: bool,
    /// Draw edges labelled `x_label` in bold.
    pub highlight_x: bool,
    pub x_label: String,
}

impl Default for DotOptions {
    fn default() -> Self {
        DotOptions { show_infosets: true, highlight_x: true, x_label: "X".into() }
    }
}

fn esc(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz text for the game tree. Nodes are emitted in id order.
pub fn export_dot(g: &Game, opts: &DotOptions) -> String {
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", esc(g.name())).unwrap();
    out.push_str("  node [fontname=\"Helvetica\"];\n");
    for n in g.node_ids() {
        let (label, shape) = match &g.node(n).kind {
            NodeKind::Decision { player, .. } => (g.player_name(*player).to_string(), "circle"),
            NodeKind::Chance => ("chance".to_string(), "diamond"),
            NodeKind::Terminal { payoffs } => {
                let p: Vec<String> = payoffs.iter().map(|x| format!("{x}")).collect();
                (format!("({})", p.join(", ")), "box")
            }
        };
        writeln!(out, "  n{} [label=\"{}\", shape={}];", n.0, esc(&label), shape).unwrap();
    }
    for n in g.node_ids() {
        let node = g.node(n);
        for &c in &node.children {
            let mut label = g.action_label(c).to_string();
            if let Some(p) = g.node(c).chance_prob {
                label = format!("{label} ({})", super::format_prob(p));
            }
            let bold = opts.highlight_x && g.action_label(c) == opts.x_label;
            let style = if bold { ", style=bold" } else { "" };
            writeln!(out, "  n{} -> n{} [label=\"{}\"{}];", n.0, c.0, esc(&label), style).unwrap();
        }
    }
    if opts.show_infosets {
        for set in g.infosets() {
            for w in set.members.windows(2) {
                writeln!(
                    out,
                    "  n{} -> n{} [style=dashed, dir=none, constraint=false, label=\"{}\"];",
                    w[0].0,
                    w[1].0,
                    esc(&set.label)
                )
                .unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{build_game, NodeSpec};
    use crate::models::corpus;

    #[test]
    fn terminal_only() {
        let g = build_game("t", &["P1"], NodeSpec::payoffs(&[0.0])).unwrap();
        let dot = export_dot(&g, &DotOptions::default());
        assert_eq!(dot.matches("->").count(), 0);
        assert_eq!(dot.matches("[label=").count(), 1);
    }

    #[test]
    fn infoset_links() {
        let g = corpus::matching_pennies();
        let dot = export_dot(&g, &DotOptions::default());
        assert_eq!(dot.matches("style=dashed").count(), 1);
        let hidden = export_dot(&g, &DotOptions { show_infosets: false, ..DotOptions::default() });
        assert_eq!(hidden.matches("style=dashed").count(), 0);
    }

    #[test]
    fn deterministic() {
        let g = corpus::coin_flip();
        assert_eq!(export_dot(&g, &DotOptions::default()), export_dot(&g, &DotOptions::default()));
        assert!(export_dot(&g, &DotOptions::default()).contains("H (0.5)"));
    }
}
