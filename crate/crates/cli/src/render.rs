//! Plain-text renderings of the library's reports.

use std::fmt::Write;

use amnesia::equilibrium::{BehavioralProfile, EquilibriumReport};
use amnesia::gdl::format_prob;
use amnesia::recall::{RecallClass, RecallReport, Witness};
use amnesia::xform::XPropertyReport;
use amnesia::{Game, InfosetId, NodeId};
use serde_json::{Map, Value};

fn node(g: &Game, n: NodeId) -> String {
    let h = g.history(n);
    if h.is_empty() {
        "root".into()
    } else {
        h.join(",")
    }
}

fn set(g: &Game, i: InfosetId) -> &str {
    &g.infoset(i).label
}

pub fn recall(g: &Game, r: &RecallReport) -> String {
    let class = match r.classification {
        RecallClass::Perfect => "perfect".to_string(),
        RecallClass::AbsentMinded => "absent-minded".to_string(),
        RecallClass::Imperfect { forgets_actions, forgets_knowledge } => {
            let mut what = Vec::new();
            if forgets_actions {
                what.push("forgets actions");
            }
            if forgets_knowledge {
                what.push("forgets knowledge");
            }
            format!("imperfect ({})", what.join(", "))
        }
    };
    let mut s = format!("{}: {class}\n", r.player);
    writeln!(s, "  order transitive: {}, irreflexive: {}", r.order_transitive, r.order_irreflexive).unwrap();
    for w in &r.witnesses {
        let line = match w {
            Witness::Experience { infoset, first, other } => format!(
                "{}: histories [{}] and [{}] have different experience",
                set(g, *infoset),
                node(g, *first),
                node(g, *other)
            ),
            Witness::Actions { infoset, first, other } => format!(
                "{}: histories [{}] and [{}] differ in own actions",
                set(g, *infoset),
                node(g, *first),
                node(g, *other)
            ),
            Witness::Knowledge { later, earlier, terminal } => format!(
                "{} after {}: terminal [{}] was already excluded",
                set(g, *later),
                set(g, *earlier),
                node(g, *terminal)
            ),
            Witness::AbsentMinded { infoset, earlier, later } => format!(
                "{}: [{}] and [{}] lie on one path",
                set(g, *infoset),
                node(g, *earlier),
                node(g, *later)
            ),
            Witness::Intransitive { a, b, c } => {
                format!("{} > {} > {} but not {} > {}", set(g, *a), set(g, *b), set(g, *c), set(g, *a), set(g, *c))
            }
        };
        writeln!(s, "  witness: {line}").unwrap();
    }
    s
}

pub fn properties(g: &Game, r: &XPropertyReport) -> String {
    let mut s = String::new();
    for (name, c) in r.checks() {
        match (c.pass, c.witness) {
            (true, _) => writeln!(s, "{name}: pass").unwrap(),
            (false, Some((a, b))) => writeln!(
                s,
                "{name}: FAIL for {} at [{}] and [{}]",
                c.taker.as_deref().unwrap_or("?"),
                node(g, a),
                node(g, b)
            )
            .unwrap(),
            (false, None) => writeln!(s, "{name}: FAIL").unwrap(),
        }
    }
    s
}

fn dist(d: &[(String, f64)]) -> String {
    d.iter().map(|(a, p)| format!("{a}={}", format_prob(*p))).collect::<Vec<_>>().join(" ")
}

pub fn equilibrium(r: &EquilibriumReport) -> String {
    let concept = format!("{:?}", r.concept).to_lowercase();
    let mut s = format!("{concept} (eps {:e}): {}\n", r.epsilon, if r.pass { "pass" } else { "FAIL" });
    for (p, regret) in &r.regrets {
        writeln!(s, "  regret {p}: {regret:.3e}").unwrap();
    }
    for w in &r.witnesses {
        let at = w.at.as_deref().map(|a| format!(" at {a}")).unwrap_or_default();
        writeln!(s, "  deviation by {}{at} gains {:.3e}:", w.player, w.gain).unwrap();
        for (set, d) in &w.strategy {
            writeln!(s, "    {set}: {}", dist(d)).unwrap();
        }
    }
    for n in &r.notes {
        writeln!(s, "  note: {n}").unwrap();
    }
    s
}

/// Information set label to action distribution, with zero entries dropped.
pub fn profile_map(g: &Game, sigma: &BehavioralProfile) -> Map<String, Value> {
    let mut m = Map::new();
    for (k, set) in g.infosets().iter().enumerate() {
        let mut d = Map::new();
        for (a, &p) in set.actions.iter().zip(&sigma.probs[k]) {
            if p != 0.0 {
                d.insert(a.clone(), Value::from(p));
            }
        }
        m.insert(set.label.clone(), Value::Object(d));
    }
    m
}

pub fn profiles(g: &Game, found: &[BehavioralProfile]) -> String {
    let mut s = format!("{} equilibria\n", found.len());
    for (k, sigma) in found.iter().enumerate() {
        writeln!(s, "profile {}", k + 1).unwrap();
        for (i, set) in g.infosets().iter().enumerate() {
            let d: Vec<(String, f64)> = set
                .actions
                .iter()
                .zip(&sigma.probs[i])
                .filter(|(_, &p)| p != 0.0)
                .map(|(a, &p)| (a.clone(), p))
                .collect();
            writeln!(s, "  {}: {}", set.label, dist(&d)).unwrap();
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use amnesia::models::corpus;
    use amnesia::recall::classify_recall;

    #[test]
    fn pure_profiles_list_one_action_per_set() {
        let g = corpus::fig1_left();
        let s = BehavioralProfile::first_matching(&g, &["B", "b"]);
        assert_eq!(profiles(&g, &[s]), "1 equilibria\nprofile 1\n  I1: B=1\n  I2A: b=1\n  I2B: b=1\n");
    }

    #[test]
    fn driver_witness_names_both_visits() {
        let g = corpus::absent_minded_driver();
        let text = recall(&g, &classify_recall(&g, g.player_id("D").unwrap()).unwrap());
        assert!(text.starts_with("D: absent-minded\n"));
        assert!(text.contains("I: [root] and [continue] lie on one path"));
    }
}
