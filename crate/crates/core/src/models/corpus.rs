//! Small reference games used throughout the tests and the guide.

use crate::game::{build_game, Game, NodeSpec};
use crate::xform::{apply_x, ForgetSpec};

fn leaf(p: &[f64]) -> NodeSpec {
    NodeSpec::payoffs(p)
}

fn ok(name: &str, players: &[&str], root: NodeSpec) -> Game {
    build_game(name, players, root).expect("corpus games are valid")
}

/// Player 1 picks A or B, player 2 observes it and picks a or b.
pub fn fig1_left() -> Game {
    let p2 = |set: &str, aa: [f64; 2], bb: [f64; 2]| {
        NodeSpec::decision("P2", set, vec![("a", leaf(&aa)), ("b", leaf(&bb))])
    };
    ok(
        "fig1-left",
        &["P1", "P2"],
        NodeSpec::decision(
            "P1",
            "I1",
            vec![("A", p2("I2A", [2.0, 1.0], [0.0, 0.0])), ("B", p2("I2B", [0.0, 0.0], [1.0, 2.0]))],
        ),
    )
}

/// The memory specification that lets player 2 forget player 1's move.
pub fn fig1_spec() -> ForgetSpec {
    ForgetSpec::new("P2").class("I2A", "m").class("I2B", "m")
}

/// [`fig1_left`] after giving player 2 the option to forget A versus B.
pub fn fig1_right() -> Game {
    apply_x(&fig1_left(), &fig1_spec()).expect("valid spec").game.renamed("fig1-right")
}

pub fn coin_flip() -> Game {
    ok("coin", &["P1"], NodeSpec::chance(vec![("H", 0.5, leaf(&[1.0])), ("T", 0.5, leaf(&[-1.0]))]))
}

/// Player 2 moves without seeing player 1's coin side.
pub fn matching_pennies() -> Game {
    let p2 = |h: f64| {
        NodeSpec::decision("P2", "I2", vec![("H", leaf(&[h, -h])), ("T", leaf(&[-h, h]))])
    };
    ok("pennies", &["P1", "P2"], NodeSpec::decision("P1", "I1", vec![("H", p2(1.0)), ("T", p2(-1.0))]))
}

/// One information set met twice on a path: exit at the first
/// intersection pays 0, at the second pays 4, never exiting pays 1.
pub fn absent_minded_driver() -> Game {
    let second = NodeSpec::decision("D", "I", vec![("exit", leaf(&[4.0])), ("continue", leaf(&[1.0]))]);
    ok("driver", &["D"], NodeSpec::decision("D", "I", vec![("exit", leaf(&[0.0])), ("continue", second)]))
}

/// Two moves by one player with perfect information.
pub fn two_move_chain() -> Game {
    let second = NodeSpec::decision("P", "I2", vec![("l", leaf(&[1.0])), ("r", leaf(&[2.0]))]);
    ok("chain2", &["P"], NodeSpec::decision("P", "I1", vec![("L", second), ("R", leaf(&[0.0]))]))
}

/// Three levels of decisions by one player.
pub fn one_player_chain() -> Game {
    let third = NodeSpec::decision("P", "I3", vec![("L", leaf(&[3.0])), ("R", leaf(&[1.0]))]);
    let second = NodeSpec::decision("P", "I2", vec![("L", leaf(&[0.0])), ("R", third)]);
    ok("chain3", &["P"], NodeSpec::decision("P", "I1", vec![("L", second), ("R", leaf(&[2.0]))]))
}

/// A player who cannot recall their own first move.
pub fn forgets_own_move() -> Game {
    let later = |x: f64| NodeSpec::decision("P", "I2", vec![("l", leaf(&[x])), ("r", leaf(&[1.0 - x]))]);
    ok("forgetful", &["P"], NodeSpec::decision("P", "I1", vec![("L", later(1.0)), ("R", later(0.0))]))
}

/// Three stages by one player with perfect information; used to exercise
/// forward closure of memory classes.
pub fn three_stage() -> Game {
    let stage3 = |set: &str, base: f64| {
        NodeSpec::decision("P", set, vec![("e", leaf(&[base])), ("f", leaf(&[base + 1.0]))])
    };
    let stage2 = |first: &str, base: f64| {
        NodeSpec::decision(
            "P",
            format!("J{first}"),
            vec![
                ("c", stage3(&format!("K{first}c"), base)),
                ("d", stage3(&format!("K{first}d"), base + 2.0)),
            ],
        )
    };
    ok("three-stage", &["P"], NodeSpec::decision("P", "I", vec![("a", stage2("a", 0.0)), ("b", stage2("b", 4.0))]))
}

/// Stage-two sets pooled, stage-three sets split by the forgotten first move.
pub fn three_stage_spec() -> ForgetSpec {
    ForgetSpec::new("P")
        .class("Ja", "m")
        .class("Jb", "m")
        .class("Kac", "ka")
        .class("Kad", "ka")
        .class("Kbc", "kb")
        .class("Kbd", "kb")
}

/// Games in which every player has perfect information.
pub fn perfect_information() -> Vec<Game> {
    vec![fig1_left(), coin_flip(), two_move_chain(), one_player_chain(), three_stage()]
}

/// Every fixed reference game, including the transformed ones.
pub fn small() -> Vec<Game> {
    vec![
        fig1_left(),
        fig1_right(),
        coin_flip(),
        matching_pennies(),
        absent_minded_driver(),
        two_move_chain(),
        one_player_chain(),
        forgets_own_move(),
        three_stage(),
    ]
}

/// Structural facts about the two-stage example before and after X.
pub fn reproduce_fig1() -> crate::Result<super::ReproductionReport> {
    use super::Provenance;
    use crate::equilibrium::enumerate_pure_spe;
    use crate::recall::{classify_recall, RecallClass};

    let mut r = super::ReproductionReport::new("fig1");
    let left = fig1_left();
    let xg = apply_x(&left, &fig1_spec())?;
    r.compare("left.nodes", left.len() as f64, 7.0, 0.0, Provenance::Derived);
    r.compare("right.nodes", xg.game.len() as f64, 13.0, 0.0, Provenance::Derived);
    let props = crate::xform::validate_x_properties(&left, &xg)?;
    r.check("x_properties", props.all_pass(), Provenance::Derived);
    let p2 = xg.game.player_id("P2")?;
    let class = classify_recall(&xg.game, p2)?.classification;
    r.check(
        "right.p2_forgets_knowledge",
        matches!(class, RecallClass::Imperfect { forgets_knowledge: true, .. }),
        Provenance::Quoted,
    );
    r.compare("left.spe_count", enumerate_pure_spe(&left)?.len() as f64, 1.0, 0.0, Provenance::Derived);
    r.record("right.spe_count", enumerate_pure_spe(&xg.game)?.len() as f64);
    Ok(r)
}
