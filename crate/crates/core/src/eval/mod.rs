//! Strategy profiles and expected-value machinery.
//!
//! Everything here is a pure function of a validated [`Game`] and a
//! [`BehavioralProfile`]: reach probabilities, the value function, infoset
//! beliefs, action values, path probabilities, best responses and Nash
//! verification, plus a reduced normal form used as an independent oracle.

mod nash;
mod simulate;
mod values;

pub use nash::{
    best_response_value, enumerate_pure_nash, reduced_strategies, to_normal_form, verify_nash,
    verify_nash_with_budget, BestResponse, NashCheck, NormalForm, PureStrategy,
};
pub use simulate::{simulate_root_value, McEstimate};
pub use values::{
    action_values, action_values_or_uniform, infoset_beliefs, infoset_beliefs_or_uniform,
    path_probability, reach_probabilities, value_function, ActionValues, Beliefs, Evaluation,
    ValueTable,
};

use serde_json::{json, Value};

use crate::game::{Game, InfosetId, NodeId, PlayerIndex};
use crate::tolerance::PROFILE_SUM;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("profile does not match the game: {0}")]
    ProfileShapeMismatch(String),
    #[error("infoset {0} is reached with probability 0")]
    UnreachedInfoset(InfosetId),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("{needed} pure strategies exceed the enumeration budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("unknown player {0}")]
    UnknownPlayer(PlayerIndex),
}

/// A probability distribution over actions at every infoset.
#[derive(Debug, Clone, PartialEq)]
pub struct BehavioralProfile {
    probs: Vec<Vec<f64>>,
}

impl BehavioralProfile {
    /// Uniform play at every infoset.
    pub fn uniform(g: &Game) -> Self {
        let probs = g
            .infosets()
            .iter()
            .map(|i| vec![1.0 / i.actions.len() as f64; i.actions.len()])
            .collect();
        BehavioralProfile { probs }
    }

    /// Builds a profile from one vector per infoset, checking it against `g`.
    pub fn new(g: &Game, probs: Vec<Vec<f64>>) -> Result<Self, EvalError> {
        let p = BehavioralProfile { probs };
        p.check(g)?;
        Ok(p)
    }

    /// Pure profile: `choices[k]` is the action index played at infoset `k`.
    pub fn pure(g: &Game, choices: &[usize]) -> Result<Self, EvalError> {
        if choices.len() != g.infosets().len() {
            return Err(EvalError::ProfileShapeMismatch(format!(
                "{} choices for {} infosets",
                choices.len(),
                g.infosets().len()
            )));
        }
        let probs = g
            .infosets()
            .iter()
            .zip(choices)
            .map(|(i, &c)| {
                let mut v = vec![0.0; i.actions.len()];
                if c < v.len() {
                    v[c] = 1.0;
                }
                v
            })
            .collect();
        Self::new(g, probs)
    }

    /// Pure profile given by action labels, one per infoset.
    pub fn pure_by_label(g: &Game, labels: &[&str]) -> Result<Self, EvalError> {
        let mut choices = Vec::with_capacity(labels.len());
        for (iset, label) in g.infosets().iter().zip(labels) {
            match iset.actions.iter().position(|a| a == label) {
                Some(c) => choices.push(c),
                None => {
                    return Err(EvalError::ProfileShapeMismatch(format!(
                        "infoset {} has no action `{label}`",
                        iset.id
                    )))
                }
            }
        }
        Self::pure(g, &choices)
    }

    /// Unchecked construction; callers must guarantee the shape.
    pub(crate) fn from_raw(probs: Vec<Vec<f64>>) -> Self {
        BehavioralProfile { probs }
    }

    pub fn check(&self, g: &Game) -> Result<(), EvalError> {
        if self.probs.len() != g.infosets().len() {
            return Err(EvalError::ProfileShapeMismatch(format!(
                "{} vectors for {} infosets",
                self.probs.len(),
                g.infosets().len()
            )));
        }
        for (k, (v, iset)) in self.probs.iter().zip(g.infosets()).enumerate() {
            if v.len() != iset.actions.len() {
                return Err(EvalError::ProfileShapeMismatch(format!(
                    "infoset {k}: {} probabilities for {} actions",
                    v.len(),
                    iset.actions.len()
                )));
            }
            if v.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                return Err(EvalError::ProfileShapeMismatch(format!("infoset {k}: negative or non-finite probability")));
            }
            let s: f64 = v.iter().sum();
            if (s - 1.0).abs() > PROFILE_SUM {
                return Err(EvalError::ProfileShapeMismatch(format!("infoset {k}: probabilities sum to {s}")));
            }
        }
        Ok(())
    }

    pub fn get(&self, iset: InfosetId) -> &[f64] {
        &self.probs[iset]
    }

    pub fn prob(&self, iset: InfosetId, action: usize) -> f64 {
        self.probs[iset][action]
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Replaces the distribution at one infoset; the caller keeps it normalized.
    pub fn set(&mut self, iset: InfosetId, probs: Vec<f64>) {
        self.probs[iset] = probs;
    }

    /// Every action has strictly positive probability.
    pub fn is_interior(&self) -> bool {
        self.probs.iter().flatten().all(|&p| p > 0.0)
    }

    /// Largest absolute coordinate difference.
    pub fn sup_distance(&self, other: &BehavioralProfile) -> f64 {
        self.probs
            .iter()
            .flatten()
            .zip(other.probs.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Branch probabilities out of `node`: σ at decisions, chance weights at
    /// chance nodes, nothing at terminals.
    pub fn branch_probs<'a>(&'a self, g: &'a Game, node: NodeId) -> &'a [f64] {
        match g.node(node).infoset() {
            Some(i) => &self.probs[i],
            None => g.chance_weights(node),
        }
    }

    /// Labelled JSON view: one entry per infoset with player, name and
    /// per-action probabilities.
    pub fn to_json(&self, g: &Game) -> Value {
        let entries: Vec<Value> = g
            .infosets()
            .iter()
            .zip(&self.probs)
            .map(|(iset, v)| {
                let actions: serde_json::Map<String, Value> = iset
                    .actions
                    .iter()
                    .zip(v)
                    .map(|(a, p)| (a.clone(), json!(p)))
                    .collect();
                json!({
                    "infoset": iset.id,
                    "name": iset.name,
                    "player": g.players()[iset.owner].name,
                    "actions": actions,
                })
            })
            .collect();
        Value::Array(entries)
    }
}

/// A realized root-to-leaf path: the nodes visited and the branch labels taken.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathTrace {
    pub nodes: Vec<NodeId>,
    pub labels: Vec<String>,
}

impl PathTrace {
    /// Follows branch indices from the root.
    pub fn from_branches(g: &Game, branches: &[usize]) -> Result<Self, EvalError> {
        let mut nodes = vec![g.root()];
        let mut labels = Vec::with_capacity(branches.len());
        for &b in branches {
            let cur = g.node(*nodes.last().unwrap());
            let e = cur
                .children
                .get(b)
                .ok_or_else(|| EvalError::InvalidPath(format!("node {} has no branch {b}", cur.id)))?;
            labels.push(e.label.clone());
            nodes.push(e.child);
        }
        let p = PathTrace { nodes, labels };
        p.check(g)?;
        Ok(p)
    }

    /// Verifies root start, parent→child steps via the named branches, and a
    /// terminal end.
    pub fn check(&self, g: &Game) -> Result<(), EvalError> {
        let bad = |m: String| Err(EvalError::InvalidPath(m));
        if self.nodes.first() != Some(&g.root()) {
            return bad("path does not start at the root".into());
        }
        if self.labels.len() + 1 != self.nodes.len() {
            return bad("one label per step required".into());
        }
        for (k, w) in self.nodes.windows(2).enumerate() {
            if w[0] >= g.num_nodes() || w[1] >= g.num_nodes() {
                return bad(format!("step {k}: unknown node"));
            }
            let ok = g.node(w[0])
                .children
                .iter()
                .any(|e| e.child == w[1] && e.label == self.labels[k]);
            if !ok {
                return bad(format!("step {k}: no branch `{}` from node {} to {}", self.labels[k], w[0], w[1]));
            }
        }
        let last = *self.nodes.last().unwrap();
        if last >= g.num_nodes() || !g.node(last).is_terminal() {
            return bad("path does not end at a terminal node".into());
        }
        Ok(())
    }

    pub fn leaf(&self) -> NodeId {
        *self.nodes.last().expect("path has at least the root")
    }

    /// Number of branches taken.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{build_game, GameSpec, NodeSpec};

    fn g() -> Game {
        build_game(GameSpec {
            title: String::new(),
            comment: None,
            players: vec!["A".into()],
            root: NodeSpec::decision(0, "i", [("x", NodeSpec::terminal([1.0])), ("y", NodeSpec::terminal([0.0]))]),
            annotations: None,
        })
        .unwrap()
    }

    #[test]
    fn profile_checks() {
        let g = g();
        assert!(BehavioralProfile::new(&g, vec![vec![0.5, 0.5]]).is_ok());
        assert!(BehavioralProfile::new(&g, vec![vec![0.6, 0.5]]).is_err());
        assert!(BehavioralProfile::new(&g, vec![vec![1.0]]).is_err());
        assert!(BehavioralProfile::new(&g, vec![]).is_err());
        assert!(BehavioralProfile::new(&g, vec![vec![1.5, -0.5]]).is_err());
        let p = BehavioralProfile::pure_by_label(&g, &["y"]).unwrap();
        assert_eq!(p.get(0), &[0.0, 1.0]);
        assert!(!p.is_interior());
        assert!(BehavioralProfile::uniform(&g).is_interior());
    }

    #[test]
    fn path_checks() {
        let g = g();
        let p = PathTrace::from_branches(&g, &[1]).unwrap();
        assert_eq!(p.labels, vec!["y"]);
        assert!(PathTrace::from_branches(&g, &[]).is_err());
        assert!(PathTrace::from_branches(&g, &[2]).is_err());
        let bogus = PathTrace { nodes: vec![0, 1], labels: vec!["y".into()] };
        assert!(bogus.check(&g).is_err());
    }
}
