//! The two Romeo-and-Juliet games.
//!
//! Game II starts at nature's grief draw (node `A`); Game I is the subtree at
//! Juliet's decision (node `B`). Romeo's three decision nodes share one
//! infoset: he cannot tell whether Juliet died of grief, died by her own
//! hand, or faked her death and the message never arrived.
//!
//! Leaf payoffs are (Romeo, Juliet). They are calibrated so that
//! `marry-paris` (-43 for Juliet) equals the value of `fake-death` when Romeo
//! dies after a failed message: 0.3 * 90 + 0.7 * (-100) = -43.

use serde_json::json;

use crate::game::{build_game, reroot, Game, GameSpec, NodeSpec};
use crate::prob::Prob;

use super::StorySpec;

pub const ROMEO: usize = 0;
pub const JULIET: usize = 1;

pub const GAME1_TITLE: &str = "Romeo and Juliet: Game I";
pub const GAME2_TITLE: &str = "Romeo and Juliet: Game II";

/// Probability that Juliet is overwhelmed by grief (midpoint of 80-90%).
pub fn grief_probability() -> Prob {
    Prob::new(17, 20)
}

/// Probability that the message reaches Romeo in time.
pub fn message_probability() -> Prob {
    Prob::new(3, 10)
}

fn romeo_choice(name: &str, die: [f64; 2], live: [f64; 2], outcome: &str) -> NodeSpec {
    NodeSpec::Decision {
        name: name.into(),
        player: ROMEO,
        infoset: "Romeo: is Juliet dead?".into(),
        infoset_name: None,
        actions: vec![
            ("die".into(), NodeSpec::terminal(die).outcome(format!("{outcome}+die"))),
            ("live".into(), NodeSpec::terminal(live).outcome(format!("{outcome}+live"))),
        ],
    }
}

fn juliet_subtree() -> NodeSpec {
    NodeSpec::Decision {
        name: "B".into(),
        player: JULIET,
        infoset: "Juliet: the Friar's plan".into(),
        infoset_name: None,
        actions: vec![
            ("marry-paris".into(), NodeSpec::terminal([-40.0, -43.0]).outcome("marry-paris")),
            (
                "fake-death".into(),
                NodeSpec::chance([
                    (
                        "message-reaches",
                        message_probability(),
                        NodeSpec::terminal([90.0, 90.0]).outcome("reunite-by-message"),
                    ),
                    (
                        "message-fails",
                        message_probability().complement(),
                        romeo_choice("R-fake", [-100.0, -100.0], [90.0, 90.0], "fake-failed"),
                    ),
                ])
                .named("M"),
            ),
            (
                "take-own-life".into(),
                romeo_choice("R-suicide", [-20.0, -95.0], [-50.0, -95.0], "suicide"),
            ),
        ],
    }
}

fn annotations(story: &[&str]) -> serde_json::Value {
    json!({
        "characters": {
            "Romeo": "Banished for killing Tybalt; decides whether to live on after finding Juliet apparently dead.",
            "Juliet": "Facing a forced marriage to Paris; decides between obeying, the Friar's potion, or taking her own life."
        },
        "story_path": story,
    })
}

/// Game II: rooted at nature's grief draw.
pub fn romeo_juliet_game2() -> Game {
    build_game(GameSpec {
        title: GAME2_TITLE.into(),
        comment: Some("Leaf payoffs are (Romeo, Juliet).".into()),
        players: vec!["Romeo".into(), "Juliet".into()],
        root: NodeSpec::chance([
            (
                "grief",
                grief_probability(),
                romeo_choice("R-grief", [-20.0, -100.0], [-50.0, -100.0], "grief"),
            ),
            ("no-grief", grief_probability().complement(), juliet_subtree()),
        ])
        .named("A"),
        annotations: Some(annotations(&["no-grief", "fake-death", "message-fails", "die"])),
    })
    .expect("Game II fixture is valid")
}

/// Game I: Game II rerooted at Juliet's decision `B`.
pub fn romeo_juliet_game1() -> Game {
    let g2 = romeo_juliet_game2();
    let b = g2.node_by_name("B").expect("node B");
    reroot(&g2, b)
        .expect("B exists")
        .with_title(GAME1_TITLE)
        .with_annotations(Some(annotations(&["fake-death", "message-fails", "die"])))
}

fn story(characters: &[&str], actions: &[&str], notes: &[&str]) -> StorySpec {
    StorySpec {
        characters: characters.iter().map(|s| s.to_string()).collect(),
        actions: actions.iter().map(|s| s.to_string()).collect(),
        annotations: notes.iter().map(|s| s.to_string()).collect(),
    }
}

/// The play as written, in Game II.
pub fn actual_story_game2() -> StorySpec {
    story(
        &["Romeo", "Juliet"],
        &["no-grief", "fake-death", "message-fails", "die"],
        &[
            "Juliet is not overcome by grief.",
            "Juliet takes the Friar's potion.",
            "The Friar's letter never reaches Mantua.",
            "Romeo finds Juliet apparently dead and takes his own life; Juliet follows.",
        ],
    )
}

/// The play as written, in Game I (no grief draw).
pub fn actual_story_game1() -> StorySpec {
    story(
        &["Romeo", "Juliet"],
        &["fake-death", "message-fails", "die"],
        &[
            "Juliet takes the Friar's potion.",
            "The Friar's letter never reaches Mantua.",
            "Romeo finds Juliet apparently dead and takes his own life; Juliet follows.",
        ],
    )
}

/// The Game I equilibrium path through the failed message: Romeo lives.
pub fn equilibrium_story_game1() -> StorySpec {
    story(
        &["Romeo", "Juliet"],
        &["fake-death", "message-fails", "live"],
        &[
            "Juliet takes the Friar's potion.",
            "The Friar's letter never reaches Mantua.",
            "Romeo waits instead of despairing; the lovers reunite.",
        ],
    )
}

/// Alternate ending in Game II: Juliet marries Paris.
pub fn marry_paris_story() -> StorySpec {
    story(
        &["Romeo", "Juliet"],
        &["no-grief", "marry-paris"],
        &["Juliet is not overcome by grief.", "Juliet obeys her family and marries Paris."],
    )
}
