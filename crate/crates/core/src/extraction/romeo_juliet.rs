//! Scripted elicitation for the Romeo-and-Juliet fixture.
//!
//! The replies are authored so that the compiled draft reproduces the
//! Game II fixture. Recording them through [`RecordingClient`] gives the
//! request/response pairs shipped under `fixtures/transcripts/`.

use super::client::{FnClient, RecordedPair, RecordingClient};
use super::compile::{ActionHint, ChanceBranch, HintNode, TopologyHints, When, HINTS_SCHEMA};
use super::draft::build_draft;
use super::prompt::{default_protocol, Protocol};
use crate::narrative::fixtures::GAME2_TITLE;

pub fn story_context() -> &'static str {
    "Romeo and Juliet, final act. Romeo has been exiled to Mantua for killing Tybalt. \
     Juliet's parents have arranged for her to wed Paris. Friar Lawrence can give Juliet a draught \
     that makes her appear dead for a time, and means to send Romeo a letter explaining the ruse."
}

/// Default protocol with two options for Romeo.
pub fn protocol() -> Protocol {
    let mut p = default_protocol();
    p.k_overrides.insert("Romeo".into(), 2);
    p
}

const OUTCOMES: &str = "1. grief+die: Juliet dies of grief; Romeo takes his life.\n\
2. grief+live: Juliet dies of grief; Romeo lives on.\n\
3. marry-paris: Juliet marries Paris.\n\
4. reunite-by-message: The letter arrives and the lovers escape together.\n\
5. fake-failed+die: The letter is lost; Romeo kills himself at the tomb and Juliet follows.\n\
6. fake-failed+live: The letter is lost, but Romeo waits and the lovers reunite.\n\
7. suicide+die: Juliet takes her own life; Romeo takes his.\n\
8. suicide+live: Juliet takes her own life; Romeo lives on.";

fn score(outcome: &str, character: &str) -> Option<&'static str> {
    let romeo = character == "Romeo";
    Some(match (outcome, romeo) {
        ("grief+die", true) => "Dying beside her is grim but fitting for him: -20.",
        ("grief+die", false) => "For Juliet this is the worst case, -100.",
        ("grief+live", true) => "Living on without her is worse for him, about -50.",
        ("grief+live", false) => "-100; she is dead either way.",
        ("marry-paris", true) => "He loses her to another man: -40.",
        ("marry-paris", false) => "A loveless marriage, I'd say -43.",
        ("reunite-by-message", true) => "Somewhere between 85 and 95.",
        ("reunite-by-message", false) => "The happiest ending for her: 90.",
        ("fake-failed+die", true) => "A needless death: -100.",
        ("fake-failed+die", false) => "She wakes to find him dead: -100.",
        ("fake-failed+live", true) => "They are reunited after all, 90.",
        ("fake-failed+live", false) => "90, the plan works out late.",
        ("suicide+die", true) => "-20 for following her.",
        ("suicide+die", false) => "Her own choice, but still dire: -95.",
        ("suicide+live", true) => "-50, he survives her.",
        ("suicide+live", false) => "-95.",
        _ => return None,
    })
}

fn respond(prompt: &str) -> Option<String> {
    let has = |s: &str| prompt.contains(s);
    let reply = if has("main characters") {
        "1. Romeo: a Montague, exiled to Mantua.\n2. Juliet: a Capulet, pressed to marry Paris.".to_string()
    } else if has("key decision Romeo") {
        "Whether to go on living once he believes Juliet is dead.".to_string()
    } else if has("key decision Juliet") {
        "How to escape the marriage to Paris.".to_string()
    } else if has("options Romeo") {
        "1. Take his own life (Tragic): he drinks poison at her side.\n\
         2. Live on (Hopeful): he holds back and waits for news."
            .to_string()
    } else if has("options Juliet") {
        "1. Obey her family and marry Paris (Family's preference): she gives up Romeo.\n\
         2. Fake her own death and reunite with Romeo (Risky): she takes the Friar's draught.\n\
         3. Take her own life (Tragic): she sees no other way out."
            .to_string()
    } else if has("outside the characters' control") {
        "1. Grief: Juliet is overwhelmed by grief at her losses and ends her life.\n\
         2. Message: the Friar's letter reaches Romeo in time."
            .to_string()
    } else if has("this event: Grief") {
        "After so many losses in so short a time, I'd estimate it to be around 80-90%.".to_string()
    } else if has("this event: Message") {
        "Letters move slowly and roads may be closed, so I estimate it to be around 30%.".to_string()
    } else if has("possible endings") {
        OUTCOMES.to_string()
    } else if has("give this ending") {
        let character = if has("would Romeo") { "Romeo" } else { "Juliet" };
        let outcome = prompt.rsplit("ending: ").next()?.split(':').next()?.trim();
        score(outcome, character)?.to_string()
    } else {
        return None;
    };
    Some(reply)
}

/// A client that answers every prompt of [`protocol`] for [`story_context`].
pub fn scripted_client() -> FnClient {
    FnClient::new(respond)
}

/// Runs the protocol against the script and returns the pairs in call order.
pub fn record_transcripts() -> Vec<RecordedPair> {
    let rec = RecordingClient::new(scripted_client());
    build_draft(story_context(), &protocol(), &rec).expect("scripted protocol completes");
    rec.pairs()
}

fn outcome(id: &str) -> HintNode {
    HintNode::Outcome { outcome: id.into(), name: String::new() }
}

fn romeo(name: &str, prefix: &str) -> HintNode {
    HintNode::Decision {
        decision: "romeo".into(),
        infoset: Some("Romeo: is Juliet dead?".into()),
        name: name.into(),
        actions: vec![
            ActionHint { option: 1, label: "die".into(), child: outcome(&format!("{prefix}+die")) },
            ActionHint { option: 2, label: "live".into(), child: outcome(&format!("{prefix}+live")) },
        ],
    }
}

/// Hints laying the draft out as Game II.
pub fn topology_hints() -> TopologyHints {
    let juliet = HintNode::Decision {
        decision: "juliet".into(),
        infoset: Some("Juliet: the Friar's plan".into()),
        name: "B".into(),
        actions: vec![
            ActionHint { option: 1, label: "marry-paris".into(), child: outcome("marry-paris") },
            ActionHint {
                option: 2,
                label: "fake-death".into(),
                child: HintNode::Chance {
                    chance: "message".into(),
                    name: "M".into(),
                    branches: vec![
                        ChanceBranch {
                            when: When::Occurs,
                            label: "message-reaches".into(),
                            child: outcome("reunite-by-message"),
                        },
                        ChanceBranch { when: When::Fails, label: "message-fails".into(), child: romeo("R-fake", "fake-failed") },
                    ],
                },
            },
            ActionHint { option: 3, label: "take-own-life".into(), child: romeo("R-suicide", "suicide") },
        ],
    };
    TopologyHints {
        schema: HINTS_SCHEMA,
        title: GAME2_TITLE.into(),
        players: vec!["Romeo".into(), "Juliet".into()],
        root: HintNode::Chance {
            chance: "grief".into(),
            name: "A".into(),
            branches: vec![
                ChanceBranch { when: When::Occurs, label: "grief".into(), child: romeo("R-grief", "grief") },
                ChanceBranch { when: When::Fails, label: "no-grief".into(), child: juliet },
            ],
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extraction::client::{FixtureClient, GenerationClient};
    use crate::extraction::compile::{compile_draft, NumericField};
    use crate::narrative::fixtures::romeo_juliet_game2;

    #[test]
    fn scripted_draft_has_the_elicited_numbers() {
        let d = build_draft(story_context(), &protocol(), &scripted_client()).unwrap();
        assert!(d.gaps.is_empty(), "{:?}", d.gaps);
        assert_eq!(
            d.decision("juliet").unwrap().options,
            vec!["Obey her family and marry Paris", "Fake her own death and reunite with Romeo", "Take her own life"]
        );
        assert_eq!(d.chance("message").unwrap().probability, Some(0.30));
        assert_eq!(d.chance("grief").unwrap().probability, Some(0.85));
        assert_eq!(d.outcome("reunite-by-message").unwrap().scores["Romeo"].value, 90.0);
        assert_eq!(d.outcomes.len(), 8);
        d.check().unwrap();
    }

    #[test]
    fn replayed_transcripts_compile_to_game2() {
        let client = FixtureClient::from_pairs(record_transcripts());
        let d = build_draft(story_context(), &protocol(), &client).unwrap();
        assert_eq!(client.network_calls(), 0);
        let compiled = compile_draft(&d, &topology_hints()).unwrap();
        let g2 = romeo_juliet_game2();
        assert_eq!(compiled.game.structural_diff(&g2, true), None);
        // every number has a source
        let g = &compiled.game;
        for n in g.nodes() {
            if let Some(p) = n.payoffs() {
                for player in 0..p.len() {
                    assert!(compiled
                        .sources
                        .iter()
                        .any(|s| s.node == n.id && s.field == NumericField::Payoff { player }));
                }
            }
            if n.is_chance() {
                for branch in 0..n.children.len() {
                    assert!(compiled
                        .sources
                        .iter()
                        .any(|s| s.node == n.id && s.field == NumericField::ChanceProb { branch }));
                }
            }
        }
        for s in &compiled.sources {
            assert!(s.provenance < d.provenance.len());
        }
    }

    #[test]
    fn hints_round_trip_as_json() {
        let h = topology_hints();
        assert_eq!(TopologyHints::from_json(&h.to_json()).unwrap(), h);
    }
}
