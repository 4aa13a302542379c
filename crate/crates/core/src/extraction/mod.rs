//! Story text to game draft through a text-generation service.
//!
//! A fixed protocol asks for characters, each character's decision and
//! options, the chance events and their probabilities, the possible endings
//! and each character's score for them. Replies are parsed by deterministic
//! rules; every reply is logged as provenance. Topology hints then lay the
//! draft out as a tree.

mod client;
mod compile;
mod draft;
mod parse;
mod prompt;
pub mod romeo_juliet;

pub use client::{
    write_pairs, CallRecord, ClientError, FixtureClient, FnClient, GenerationClient, GenerationRequest,
    GenerationResponse, HttpClient, HttpConfig, RecordedPair, RecordingClient, Transport, API_KEY_ENV,
};
pub use compile::{
    compile_draft, ActionHint, ChanceBranch, CompiledGame, HintNode, NumericField, NumericSource, TopologyHints,
    When, HINTS_SCHEMA,
};
pub use draft::{build_draft, slug, ChancePoint, DecisionPoint, GameDraft, Gap, OutcomeScores, ProvenanceEntry, Score};
pub use parse::{parse_items, parse_list, parse_options, parse_probability, parse_score, Item, ParseError};
pub use prompt::{default_protocol, render_prompt, slots, PromptTemplate, Protocol, ResponseKind, Step, TemplateError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExtractionError {
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Client(#[from] ClientError),
    #[error("protocol has no template for step {0:?}")]
    MissingTemplate(Step),
    #[error("protocol incomplete: {}", fields(.0))]
    ProtocolIncomplete(Vec<Gap>),
    #[error("draft still has gaps: {}", .0.join(", "))]
    GapRemaining(Vec<String>),
    #[error("topology hints inconsistent with the draft: {0}")]
    TopologyInconsistent(String),
    #[error("bad topology hints: {0}")]
    Hints(String),
}

fn fields(gaps: &[Gap]) -> String {
    gaps.iter().map(|g| format!("{} ({})", g.field, g.reason)).collect::<Vec<_>>().join(", ")
}

#[cfg(test)]
mod tests {
    use super::romeo_juliet::*;
    use super::*;

    fn draft() -> GameDraft {
        build_draft(story_context(), &protocol(), &scripted_client()).unwrap()
    }

    #[test]
    fn missing_score_is_a_gap() {
        let mut d = draft();
        d.outcomes.iter_mut().find(|o| o.id == "marry-paris").unwrap().scores.remove("Juliet");
        match compile_draft(&d, &topology_hints()) {
            Err(ExtractionError::GapRemaining(g)) => assert_eq!(g, vec!["score/marry-paris/juliet"]),
            other => panic!("unexpected {other:?}"),
        }
        let mut d = draft();
        d.gaps.push(Gap { field: "probability/message".into(), reason: "x".into() });
        assert!(matches!(compile_draft(&d, &topology_hints()), Err(ExtractionError::GapRemaining(_))));
    }

    #[test]
    fn decision_in_two_infosets_is_inconsistent() {
        let mut h = topology_hints();
        let HintNode::Chance { branches, .. } = &mut h.root else { unreachable!() };
        let HintNode::Decision { infoset, .. } = &mut branches[0].child else { unreachable!() };
        *infoset = Some("somewhere else".into());
        assert!(matches!(compile_draft(&draft(), &h), Err(ExtractionError::TopologyInconsistent(_))));
    }

    #[test]
    fn unknown_references_are_inconsistent() {
        let mut h = topology_hints();
        h.root = HintNode::Outcome { outcome: "nope".into(), name: String::new() };
        assert!(matches!(compile_draft(&draft(), &h), Err(ExtractionError::TopologyInconsistent(_))));
        let mut h = topology_hints();
        h.players = vec!["Romeo".into(), "Tybalt".into()];
        assert!(matches!(compile_draft(&draft(), &h), Err(ExtractionError::TopologyInconsistent(_))));
        let mut h = topology_hints();
        let HintNode::Chance { branches, .. } = &mut h.root else { unreachable!() };
        let HintNode::Decision { actions, .. } = &mut branches[0].child else { unreachable!() };
        actions[1].option = 7;
        assert!(matches!(compile_draft(&draft(), &h), Err(ExtractionError::TopologyInconsistent(_))));
    }

    #[test]
    fn bad_hints_json() {
        assert!(matches!(TopologyHints::from_json("{"), Err(ExtractionError::Hints(_))));
        let mut v: serde_json::Value = serde_json::from_str(&topology_hints().to_json()).unwrap();
        v["schema"] = 2.into();
        assert!(matches!(TopologyHints::from_json(&v.to_string()), Err(ExtractionError::Hints(_))));
    }
}
