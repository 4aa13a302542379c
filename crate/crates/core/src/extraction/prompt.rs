use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// How a reply to a template is parsed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResponseKind {
    /// Numbered list, all items kept.
    List,
    /// Numbered list, first `k` items.
    OptionList,
    Percentage,
    Score,
    FreeText,
}

/// The protocol step a template belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Step {
    Characters,
    Decisions,
    Options,
    Events,
    Probabilities,
    Outcomes,
    Scores,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptTemplate {
    pub id: String,
    pub step: Step,
    pub text: String,
    pub slots: Vec<String>,
    pub kind: ResponseKind,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TemplateError {
    #[error("template `{template}` references undeclared slot `{slot}`")]
    UndeclaredSlot { template: String, slot: String },
    #[error("missing value for slot `{0}`")]
    MissingSlot(String),
    #[error("unterminated slot in template `{0}`")]
    Unterminated(String),
}

fn referenced(text: &str) -> Result<Vec<&str>, ()> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(i) = rest.find('{') {
        let after = &rest[i + 1..];
        let j = after.find('}').ok_or(())?;
        out.push(&after[..j]);
        rest = &after[j + 1..];
    }
    Ok(out)
}

impl PromptTemplate {
    pub fn new(
        id: impl Into<String>,
        step: Step,
        text: impl Into<String>,
        slots: &[&str],
        kind: ResponseKind,
    ) -> Result<Self, TemplateError> {
        let t = PromptTemplate {
            id: id.into(),
            step,
            text: text.into(),
            slots: slots.iter().map(|s| s.to_string()).collect(),
            kind,
        };
        t.check()?;
        Ok(t)
    }

    /// Every `{slot}` in the text is declared.
    pub fn check(&self) -> Result<(), TemplateError> {
        let refs = referenced(&self.text).map_err(|_| TemplateError::Unterminated(self.id.clone()))?;
        for r in refs {
            if !self.slots.iter().any(|s| s == r) {
                return Err(TemplateError::UndeclaredSlot { template: self.id.clone(), slot: r.to_string() });
            }
        }
        Ok(())
    }
}

/// Substitutes each `{slot}` with its value. Values are inserted verbatim
/// and never rescanned.
pub fn render_prompt(t: &PromptTemplate, slots: &BTreeMap<String, String>) -> Result<String, TemplateError> {
    let mut out = String::with_capacity(t.text.len());
    let mut rest = t.text.as_str();
    while let Some(i) = rest.find('{') {
        out.push_str(&rest[..i]);
        let after = &rest[i + 1..];
        let j = after.find('}').ok_or_else(|| TemplateError::Unterminated(t.id.clone()))?;
        let name = &after[..j];
        let v = slots.get(name).ok_or_else(|| TemplateError::MissingSlot(name.to_string()))?;
        out.push_str(v);
        rest = &after[j + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

pub fn slots<'a>(pairs: impl IntoIterator<Item = (&'a str, String)>) -> BTreeMap<String, String> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// The elicitation steps in order, with option counts per character.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Protocol {
    pub templates: Vec<PromptTemplate>,
    pub default_k: usize,
    #[serde(default)]
    pub k_overrides: BTreeMap<String, usize>,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default = "default_max_tokens")]
    pub max_output_tokens: u32,
}

fn default_max_tokens() -> u32 {
    512
}

impl Protocol {
    pub fn template(&self, step: Step) -> Option<&PromptTemplate> {
        self.templates.iter().find(|t| t.step == step)
    }

    pub fn k_for(&self, character: &str) -> usize {
        self.k_overrides.get(character).copied().unwrap_or(self.default_k)
    }
}

/// The built-in single-question protocol.
pub fn default_protocol() -> Protocol {
    let t = |id: &str, step, text: &str, slots: &[&str], kind| {
        PromptTemplate::new(id, step, text, slots, kind).expect("built-in template")
    };
    Protocol {
        templates: vec![
            t(
                "characters",
                Step::Characters,
                "{story_context}\n\nWho are the main characters whose decisions drive the ending? \
                 List them as a numbered list.",
                &["story_context"],
                ResponseKind::List,
            ),
            t(
                "decision",
                Step::Decisions,
                "{story_context}\n\nIn one sentence, what is the key decision {character} faces?",
                &["story_context", "character"],
                ResponseKind::FreeText,
            ),
            t(
                "options",
                Step::Options,
                "{story_context}\n\nName options {character} could consider. Please only list {k} options.",
                &["story_context", "character", "k"],
                ResponseKind::OptionList,
            ),
            t(
                "events",
                Step::Events,
                "{story_context}\n\nWhich events outside the characters' control shape the ending? \
                 List them as a numbered list.",
                &["story_context"],
                ResponseKind::List,
            ),
            t(
                "probability",
                Step::Probabilities,
                "{story_context}\n\nWhat is the probability of this event: {event}? \
                 Please give a number between 0 and 100.",
                &["story_context", "event"],
                ResponseKind::Percentage,
            ),
            t(
                "outcomes",
                Step::Outcomes,
                "{story_context}\n\nList the possible endings as a numbered list, each with a short name before a colon.",
                &["story_context"],
                ResponseKind::List,
            ),
            t(
                "score",
                Step::Scores,
                "{story_context}\n\nOn a scale from -100 to 100, what score would {character} give this ending: {outcome}?",
                &["story_context", "character", "outcome"],
                ResponseKind::Score,
            ),
        ],
        default_k: 3,
        k_overrides: BTreeMap::new(),
        temperature: 0.0,
        max_output_tokens: default_max_tokens(),
    }
}
