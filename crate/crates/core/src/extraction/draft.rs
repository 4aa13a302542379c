use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::client::{GenerationClient, GenerationRequest};
use super::parse::{parse_items, parse_options, parse_probability, parse_score, Item};
use super::prompt::{render_prompt, slots, PromptTemplate, Protocol, Step};
use super::ExtractionError;

/// Stable id from a label: lowercase, whitespace runs become `-`.
pub fn slug(label: &str) -> String {
    label.split_whitespace().collect::<Vec<_>>().join("-").to_lowercase()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionPoint {
    pub id: String,
    pub owner: String,
    pub context: Option<String>,
    pub options: Vec<String>,
    /// Provenance index of the options reply.
    pub source: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChancePoint {
    pub id: String,
    pub context: String,
    pub probability: Option<f64>,
    pub source: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub value: f64,
    pub source: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeScores {
    pub id: String,
    pub description: String,
    /// Character name to score.
    pub scores: BTreeMap<String, Score>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProvenanceEntry {
    pub index: usize,
    pub template: String,
    /// Which draft field this reply fed, e.g. `probability/message`.
    pub field: String,
    pub prompt: String,
    pub response: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gap {
    pub field: String,
    pub reason: String,
}

/// A partially specified game assembled from elicited answers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameDraft {
    pub characters: Vec<String>,
    pub decisions: Vec<DecisionPoint>,
    pub chances: Vec<ChancePoint>,
    pub outcomes: Vec<OutcomeScores>,
    pub provenance: Vec<ProvenanceEntry>,
    pub gaps: Vec<Gap>,
}

impl GameDraft {
    pub fn decision(&self, id: &str) -> Option<&DecisionPoint> {
        self.decisions.iter().find(|d| d.id == id)
    }

    pub fn chance(&self, id: &str) -> Option<&ChancePoint> {
        self.chances.iter().find(|c| c.id == id)
    }

    pub fn outcome(&self, id: &str) -> Option<&OutcomeScores> {
        self.outcomes.iter().find(|o| o.id == id)
    }

    /// Checks declared characters and numeric ranges.
    pub fn check(&self) -> Result<(), String> {
        for d in &self.decisions {
            if !self.characters.contains(&d.owner) {
                return Err(format!("decision `{}` owned by undeclared `{}`", d.id, d.owner));
            }
        }
        for c in &self.chances {
            if let Some(p) = c.probability {
                if !(0.0..=1.0).contains(&p) {
                    return Err(format!("probability of `{}` is {p}", c.id));
                }
            }
        }
        for o in &self.outcomes {
            for (who, s) in &o.scores {
                if !self.characters.contains(who) {
                    return Err(format!("outcome `{}` scored by undeclared `{who}`", o.id));
                }
                if !(-100.0..=100.0).contains(&s.value) {
                    return Err(format!("score of `{}` for {who} is {}", o.id, s.value));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("draft serializes");
        s.push('\n');
        s
    }
}

struct Session<'a> {
    story: &'a str,
    protocol: &'a Protocol,
    client: &'a dyn GenerationClient,
    provenance: Vec<ProvenanceEntry>,
}

impl Session<'_> {
    fn template(&self, step: Step) -> Result<&PromptTemplate, ExtractionError> {
        self.protocol.template(step).ok_or(ExtractionError::MissingTemplate(step))
    }

    fn ask(&mut self, step: Step, field: String, extra: &[(&str, String)]) -> Result<(usize, String), ExtractionError> {
        let t = self.template(step)?;
        let mut map = slots([("story_context", self.story.to_string())]);
        for (k, v) in extra {
            map.insert(k.to_string(), v.clone());
        }
        let prompt = render_prompt(t, &map)?;
        let template = t.id.clone();
        let request = GenerationRequest {
            prompt: prompt.clone(),
            temperature: self.protocol.temperature,
            max_output_tokens: self.protocol.max_output_tokens,
        };
        let response = self.client.generate(&request)?;
        let index = self.provenance.len();
        self.provenance.push(ProvenanceEntry { index, template, field, prompt, response: response.text.clone() });
        Ok((index, response.text))
    }
}

/// Runs the protocol: characters, decisions, options, chance events and
/// their probabilities, outcomes and their scores. Parse failures become
/// gaps on the returned draft; only an empty story or an empty character
/// list stops the run.
pub fn build_draft(story: &str, protocol: &Protocol, client: &dyn GenerationClient) -> Result<GameDraft, ExtractionError> {
    if story.trim().is_empty() {
        return Err(ExtractionError::ProtocolIncomplete(vec![Gap {
            field: "characters".into(),
            reason: "story text is empty".into(),
        }]));
    }
    let mut s = Session { story, protocol, client, provenance: Vec::new() };
    let mut gaps = Vec::new();

    let (_, reply) = s.ask(Step::Characters, "characters".into(), &[])?;
    let characters: Vec<String> = parse_items(&reply).into_iter().map(|i| i.label).collect();
    if characters.is_empty() {
        return Err(ExtractionError::ProtocolIncomplete(vec![Gap {
            field: "characters".into(),
            reason: "no numbered characters in reply".into(),
        }]));
    }

    let mut decisions = Vec::new();
    for c in &characters {
        let id = slug(c);
        let (_, context) = s.ask(Step::Decisions, format!("decision/{id}"), &[("character", c.clone())])?;
        let context = Some(context.trim().to_string()).filter(|t| !t.is_empty());
        if context.is_none() {
            gaps.push(Gap { field: format!("decision/{id}"), reason: "empty reply".into() });
        }
        let k = protocol.k_for(c);
        let (idx, reply) =
            s.ask(Step::Options, format!("options/{id}"), &[("character", c.clone()), ("k", k.to_string())])?;
        let (options, source) = match parse_options(&reply, k) {
            Ok(o) => (o, Some(idx)),
            Err(e) => {
                gaps.push(Gap { field: format!("options/{id}"), reason: e.to_string() });
                (Vec::new(), None)
            }
        };
        decisions.push(DecisionPoint { id, owner: c.clone(), context, options, source });
    }

    let (_, reply) = s.ask(Step::Events, "events".into(), &[])?;
    let mut chances = Vec::new();
    for Item { label, text } in parse_items(&reply) {
        let id = slug(&label);
        let (idx, reply) = s.ask(Step::Probabilities, format!("probability/{id}"), &[("event", text.clone())])?;
        let (probability, source) = match parse_probability(&reply) {
            Ok(p) => (Some(p), Some(idx)),
            Err(e) => {
                gaps.push(Gap { field: format!("probability/{id}"), reason: e.to_string() });
                (None, None)
            }
        };
        chances.push(ChancePoint { id, context: text, probability, source });
    }

    let (_, reply) = s.ask(Step::Outcomes, "outcomes".into(), &[])?;
    let items = parse_items(&reply);
    if items.is_empty() {
        gaps.push(Gap { field: "outcomes".into(), reason: "no numbered outcomes in reply".into() });
    }
    let mut outcomes = Vec::new();
    for Item { label, text } in items {
        let id = slug(&label);
        let mut scores = BTreeMap::new();
        for c in &characters {
            let field = format!("score/{id}/{}", slug(c));
            let (idx, reply) =
                s.ask(Step::Scores, field.clone(), &[("character", c.clone()), ("outcome", text.clone())])?;
            match parse_score(&reply) {
                Ok(v) => {
                    scores.insert(c.clone(), Score { value: v, source: idx });
                }
                Err(e) => gaps.push(Gap { field, reason: e.to_string() }),
            }
        }
        outcomes.push(OutcomeScores { id, description: text, scores });
    }

    Ok(GameDraft { characters, decisions, chances, outcomes, provenance: s.provenance, gaps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extraction::client::FnClient;
    use crate::extraction::prompt::default_protocol;

    fn scripted(score_reply: &'static str) -> FnClient {
        FnClient::new(move |p| {
            let r = if p.contains("main characters") {
                "1. Ann: a sailor\n2. Bo (the cook)"
            } else if p.contains("key decision") {
                "Whether to leave port."
            } else if p.contains("Name options") {
                "1. Stay: safe\n2. Sail: bold\n3. Sink: grim"
            } else if p.contains("outside the characters' control") {
                "1. Storm: weather turns\n2. Fog"
            } else if p.contains("probability of this event: Storm") {
                "about 20-30%"
            } else if p.contains("probability of this event") {
                "hard to say"
            } else if p.contains("possible endings") {
                "1. Home: everyone returns"
            } else {
                score_reply
            };
            Some(r.to_string())
        })
    }

    #[test]
    fn builds_with_gaps() {
        let c = scripted("I'd put it at -40.");
        let d = build_draft("A short story.", &default_protocol(), &c).unwrap();
        assert_eq!(d.characters, vec!["Ann", "Bo"]);
        assert_eq!(d.decision("ann").unwrap().options, vec!["Stay", "Sail", "Sink"]);
        assert_eq!(d.chance("storm").unwrap().probability, Some(0.25));
        assert_eq!(d.chance("fog").unwrap().probability, None);
        assert_eq!(d.gaps, vec![Gap { field: "probability/fog".into(), reason: "no probability found".into() }]);
        assert_eq!(d.outcome("home").unwrap().scores["Bo"].value, -40.0);
        assert!(d.check().is_ok());
        // every reply is logged once, in call order
        assert_eq!(d.provenance.len(), c.call_log().len());
        assert!(d.provenance.iter().enumerate().all(|(i, p)| p.index == i));
    }

    #[test]
    fn missing_scores_are_flagged() {
        let d = build_draft("A short story.", &default_protocol(), &scripted("no idea")).unwrap();
        let score_gaps: Vec<_> = d.gaps.iter().filter(|g| g.field.starts_with("score/")).collect();
        assert_eq!(score_gaps.len(), 2);
        assert!(d.outcome("home").unwrap().scores.is_empty());
    }

    #[test]
    fn empty_story_stops_at_first_step() {
        let c = scripted("1");
        match build_draft("  ", &default_protocol(), &c) {
            Err(ExtractionError::ProtocolIncomplete(gaps)) => assert_eq!(gaps[0].field, "characters"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(c.call_log().is_empty());
    }

    #[test]
    fn client_errors_propagate() {
        let c = FnClient::new(|_| None);
        assert!(matches!(build_draft("x", &default_protocol(), &c), Err(ExtractionError::Client(_))));
    }

    #[test]
    fn slugs() {
        assert_eq!(slug("Friar  Lawrence"), "friar-lawrence");
        assert_eq!(slug("grief+die"), "grief+die");
    }
}
