//! Draft plus topology hints to a validated game.
//!
//! Hints document (schema 1):
//!
//! ```json
//! {
//!   "schema": 1,
//!   "title": "…",
//!   "players": ["Romeo", "Juliet"],
//!   "root": { "chance": "grief", "name": "A", "branches": [
//!       { "when": "occurs", "label": "grief", "child": { … } },
//!       { "when": "fails", "label": "no-grief", "child": { … } } ] }
//! }
//! ```
//!
//! A decision node is `{"decision": id, "infoset"?: key, "name"?,
//! "actions": [{"option": n, "label", "child"}]}` with 1-based option
//! numbers into the draft's option list; a leaf is `{"outcome": id}`.
//! Decisions sharing an infoset key are one infoset; without a key the
//! decision id is the key.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::draft::GameDraft;
use super::ExtractionError;
use crate::game::{build_game, validate, Game, GameSpec, NodeId, NodeSpec};
use crate::prob::Prob;

pub const HINTS_SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyHints {
    pub schema: u32,
    #[serde(default)]
    pub title: String,
    pub players: Vec<String>,
    pub root: HintNode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum When {
    Occurs,
    Fails,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChanceBranch {
    pub when: When,
    pub label: String,
    pub child: HintNode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionHint {
    pub option: usize,
    pub label: String,
    pub child: HintNode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HintNode {
    Chance {
        chance: String,
        #[serde(default, skip_serializing_if = "String::is_empty")]
        name: String,
        branches: Vec<ChanceBranch>,
    },
    Decision {
        decision: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        infoset: Option<String>,
        #[serde(default, skip_serializing_if = "String::is_empty")]
        name: String,
        actions: Vec<ActionHint>,
    },
    Outcome {
        outcome: String,
        #[serde(default, skip_serializing_if = "String::is_empty")]
        name: String,
    },
}

impl TopologyHints {
    pub fn from_json(text: &str) -> Result<Self, ExtractionError> {
        let h: TopologyHints = serde_json::from_str(text).map_err(|e| ExtractionError::Hints(e.to_string()))?;
        if h.schema != HINTS_SCHEMA {
            return Err(ExtractionError::Hints(format!("unsupported schema {}", h.schema)));
        }
        Ok(h)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("hints serialize");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NumericField {
    ChanceProb { branch: usize },
    Payoff { player: usize },
}

/// Where a number in the compiled game came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericSource {
    pub node: NodeId,
    pub field: NumericField,
    pub provenance: usize,
}

#[derive(Debug, Clone)]
pub struct CompiledGame {
    pub game: Game,
    pub sources: Vec<NumericSource>,
}

struct Compiler<'a> {
    draft: &'a GameDraft,
    players: &'a [String],
    /// decision id -> (infoset key, labels)
    decisions: BTreeMap<String, (String, Vec<String>)>,
    infoset_owner: BTreeMap<String, String>,
    gaps: Vec<String>,
    sources: Vec<NumericSource>,
    next_id: NodeId,
}

fn inconsistent(msg: String) -> ExtractionError {
    ExtractionError::TopologyInconsistent(msg)
}

impl Compiler<'_> {
    fn node(&mut self, h: &HintNode) -> Result<NodeSpec, ExtractionError> {
        let id = self.next_id;
        self.next_id += 1;
        match h {
            HintNode::Outcome { outcome, name } => {
                let o = self
                    .draft
                    .outcome(outcome)
                    .ok_or_else(|| inconsistent(format!("unknown outcome `{outcome}`")))?;
                let mut payoffs = Vec::with_capacity(self.players.len());
                for (p, who) in self.players.iter().enumerate() {
                    match o.scores.get(who) {
                        Some(s) => {
                            payoffs.push(s.value);
                            self.sources.push(NumericSource {
                                node: id,
                                field: NumericField::Payoff { player: p },
                                provenance: s.source,
                            });
                        }
                        None => {
                            self.gaps.push(format!("score/{outcome}/{}", super::draft::slug(who)));
                            payoffs.push(0.0);
                        }
                    }
                }
                Ok(NodeSpec::terminal(payoffs).outcome(outcome.clone()).named(name.clone()))
            }
            HintNode::Chance { chance, name, branches } => {
                let c = self
                    .draft
                    .chance(chance)
                    .ok_or_else(|| inconsistent(format!("unknown chance event `{chance}`")))?;
                let whens: Vec<When> = branches.iter().map(|b| b.when).collect();
                if whens.len() != 2 || whens[0] == whens[1] {
                    return Err(inconsistent(format!("chance `{chance}` needs one `occurs` and one `fails` branch")));
                }
                let p = match (c.probability, c.source) {
                    (Some(p), Some(src)) => {
                        for b in 0..2 {
                            self.sources.push(NumericSource {
                                node: id,
                                field: NumericField::ChanceProb { branch: b },
                                provenance: src,
                            });
                        }
                        Prob::from_f64_decimal(p)
                            .ok_or_else(|| inconsistent(format!("probability of `{chance}` is not a decimal")))?
                    }
                    _ => {
                        self.gaps.push(format!("probability/{chance}"));
                        Prob::new(1, 2)
                    }
                };
                let mut out = Vec::new();
                for b in branches {
                    let q = match b.when {
                        When::Occurs => p.clone(),
                        When::Fails => p.complement(),
                    };
                    out.push((b.label.clone(), q, self.node(&b.child)?));
                }
                Ok(NodeSpec::chance(out).named(name.clone()))
            }
            HintNode::Decision { decision, infoset, name, actions } => {
                let d = self
                    .draft
                    .decision(decision)
                    .ok_or_else(|| inconsistent(format!("unknown decision `{decision}`")))?;
                let player = self
                    .players
                    .iter()
                    .position(|p| p == &d.owner)
                    .ok_or_else(|| inconsistent(format!("decision `{decision}` owner `{}` is not a player", d.owner)))?;
                if d.options.is_empty() {
                    self.gaps.push(format!("options/{decision}"));
                }
                let key = infoset.clone().unwrap_or_else(|| decision.clone());
                let labels: Vec<String> = actions.iter().map(|a| a.label.clone()).collect();
                for a in actions {
                    if !d.options.is_empty() && (a.option == 0 || a.option > d.options.len()) {
                        return Err(inconsistent(format!(
                            "decision `{decision}` has no option {} (it has {})",
                            a.option,
                            d.options.len()
                        )));
                    }
                }
                match self.decisions.get(decision) {
                    Some((k, _)) if *k != key => {
                        return Err(inconsistent(format!("decision `{decision}` assigned to infosets `{k}` and `{key}`")));
                    }
                    Some((_, l)) if *l != labels => {
                        return Err(inconsistent(format!("decision `{decision}` used with different actions")));
                    }
                    _ => {}
                }
                match self.infoset_owner.get(&key) {
                    Some(other) if other != decision => {
                        return Err(inconsistent(format!("infoset `{key}` shared by decisions `{other}` and `{decision}`")));
                    }
                    _ => {}
                }
                self.decisions.insert(decision.clone(), (key.clone(), labels));
                self.infoset_owner.insert(key.clone(), decision.clone());
                let mut out = Vec::new();
                for a in actions {
                    out.push((a.label.clone(), self.node(&a.child)?));
                }
                Ok(NodeSpec::Decision { name: name.clone(), player, infoset: key, infoset_name: None, actions: out })
            }
        }
    }
}

/// Builds the game laid out by `hints` from the numbers in `draft`.
pub fn compile_draft(draft: &GameDraft, hints: &TopologyHints) -> Result<CompiledGame, ExtractionError> {
    if !draft.gaps.is_empty() {
        return Err(ExtractionError::GapRemaining(draft.gaps.iter().map(|g| g.field.clone()).collect()));
    }
    for p in &hints.players {
        if !draft.characters.contains(p) {
            return Err(inconsistent(format!("player `{p}` is not a character of the draft")));
        }
    }
    let mut c = Compiler {
        draft,
        players: &hints.players,
        decisions: BTreeMap::new(),
        infoset_owner: BTreeMap::new(),
        gaps: Vec::new(),
        sources: Vec::new(),
        next_id: 0,
    };
    let root = c.node(&hints.root)?;
    if !c.gaps.is_empty() {
        c.gaps.sort();
        c.gaps.dedup();
        return Err(ExtractionError::GapRemaining(c.gaps));
    }
    let game = build_game(GameSpec {
        title: hints.title.clone(),
        comment: None,
        players: hints.players.clone(),
        root,
        annotations: None,
    })
    .map_err(|e| inconsistent(e.to_string()))?;
    if let Some(d) = validate(&game).into_iter().next() {
        return Err(inconsistent(d.to_string()));
    }
    Ok(CompiledGame { game, sources: c.sources })
}
