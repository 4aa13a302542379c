//! Story-level analytics on top of an equilibrium.
//!
//! A story is one root-to-leaf path. Under a profile, the value function
//! along that path is a martingale; its one-step jumps are the *surprise* of
//! each plot point and the spread of the next-step values is the *suspense*
//! felt before it. A game *rationalizes* a story when the story's path has
//! positive probability under the game's equilibrium.

mod export;
pub mod fixtures;

pub use export::{export_shape, ShapeFormat};
pub use fixtures::{romeo_juliet_game1, romeo_juliet_game2};

use serde::{Deserialize, Serialize};

use crate::eval::{path_probability, value_function, BehavioralProfile, EvalError, PathTrace, ValueTable};
use crate::game::{Game, NodeId, NodeKind};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NarrativeError {
    #[error("step {step}: label `{label}` matches more than one branch")]
    AmbiguousLabel { step: usize, label: String },
    #[error("step {step}: no branch labelled `{label}`")]
    NoSuchBranch { step: usize, label: String },
    #[error("story ends at non-terminal node {node}")]
    PathEndsEarly { node: NodeId },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// The realized plot: characters, the branch labels taken in order, and an
/// optional prose note per step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StorySpec {
    pub characters: Vec<String>,
    pub actions: Vec<String>,
    #[serde(default)]
    pub annotations: Vec<String>,
}

impl StorySpec {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("story serializes");
        s.push('\n');
        s
    }
}

/// Resolves the story's labels to a path from the root.
pub fn story_path(g: &Game, story: &StorySpec) -> Result<PathTrace, NarrativeError> {
    let mut nodes = vec![g.root()];
    for (step, label) in story.actions.iter().enumerate() {
        let cur = g.node(*nodes.last().unwrap());
        let matches: Vec<_> = cur.children.iter().filter(|e| &e.label == label).collect();
        match matches.as_slice() {
            [] => return Err(NarrativeError::NoSuchBranch { step, label: label.clone() }),
            [e] => nodes.push(e.child),
            _ => return Err(NarrativeError::AmbiguousLabel { step, label: label.clone() }),
        }
    }
    let last = *nodes.last().unwrap();
    if !g.node(last).is_terminal() {
        return Err(NarrativeError::PathEndsEarly { node: last });
    }
    Ok(PathTrace { nodes, labels: story.actions.clone() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rationalization {
    pub rationalized: bool,
    pub path_probability: f64,
}

/// Default threshold on the path probability.
pub const RATIONALIZE_TOL: f64 = 1e-6;

pub fn rationalization(
    g: &Game,
    sigma: &BehavioralProfile,
    path: &PathTrace,
    tol: f64,
) -> Result<Rationalization, NarrativeError> {
    let p = path_probability(g, sigma, path)?;
    Ok(Rationalization { rationalized: p > tol, path_probability: p })
}

/// True iff the path's probability under `sigma` exceeds `tol`.
pub fn rationalizes(g: &Game, sigma: &BehavioralProfile, path: &PathTrace, tol: f64) -> Result<bool, NarrativeError> {
    Ok(rationalization(g, sigma, path, tol)?.rationalized)
}

fn checked_values(g: &Game, sigma: &BehavioralProfile, path: &PathTrace) -> Result<ValueTable, NarrativeError> {
    path.check(g)?;
    Ok(value_function(g, sigma)?)
}

fn surprise_from(values: &ValueTable, path: &PathTrace) -> Vec<Vec<f64>> {
    path.nodes
        .iter()
        .enumerate()
        .map(|(t, &n)| {
            let cur = values.at(n);
            if t == 0 {
                vec![0.0; cur.len()]
            } else {
                let prev = values.at(path.nodes[t - 1]);
                cur.iter().zip(prev).map(|(a, b)| (a - b).abs()).collect()
            }
        })
        .collect()
}

fn suspense_at(g: &Game, sigma: &BehavioralProfile, values: &ValueTable, n: NodeId) -> Vec<f64> {
    let here = values.at(n);
    let mut var = vec![0.0; here.len()];
    let node = g.node(n);
    for (e, &p) in node.children.iter().zip(sigma.branch_probs(g, n)) {
        for (i, v) in var.iter_mut().enumerate() {
            let d = values.player(e.child, i) - here[i];
            *v += p * d * d;
        }
    }
    var.into_iter().map(f64::sqrt).collect()
}

/// Per step, per character: `|V(n_t) - V(n_{t-1})|`, and 0 at the root.
pub fn surprise(g: &Game, sigma: &BehavioralProfile, path: &PathTrace) -> Result<Vec<Vec<f64>>, NarrativeError> {
    let values = checked_values(g, sigma, path)?;
    Ok(surprise_from(&values, path))
}

/// Per step, per character: standard deviation of the next-node value
/// under the profile; 0 at the terminal.
pub fn suspense(g: &Game, sigma: &BehavioralProfile, path: &PathTrace) -> Result<Vec<Vec<f64>>, NarrativeError> {
    let values = checked_values(g, sigma, path)?;
    Ok(path.nodes.iter().map(|&n| suspense_at(g, sigma, &values, n)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Decision,
    Chance,
    Terminal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeStep {
    pub node: NodeId,
    pub node_name: String,
    /// Branch taken into this node; empty at the root.
    pub label: String,
    pub kind: StepKind,
    pub values: Vec<f64>,
    pub surprise: Vec<f64>,
    pub suspense: Vec<f64>,
}

/// Value, surprise and suspense of every character at every node on a path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeSeries {
    pub characters: Vec<String>,
    pub steps: Vec<ShapeStep>,
}

impl ShapeSeries {
    /// Per-character sum of surprise over the path.
    pub fn total_surprise(&self) -> Vec<f64> {
        self.column_sums(|s| &s.surprise)
    }

    pub fn total_suspense(&self) -> Vec<f64> {
        self.column_sums(|s| &s.suspense)
    }

    /// Story-level surprise: the per-character totals summed.
    pub fn aggregate_surprise(&self) -> f64 {
        self.total_surprise().iter().sum()
    }

    pub fn aggregate_suspense(&self) -> f64 {
        self.total_suspense().iter().sum()
    }

    fn column_sums(&self, f: impl Fn(&ShapeStep) -> &Vec<f64>) -> Vec<f64> {
        let mut out = vec![0.0; self.characters.len()];
        for s in &self.steps {
            for (o, x) in out.iter_mut().zip(f(s)) {
                *o += x;
            }
        }
        out
    }

    /// Keeps the root, decision nodes and the final outcome.
    pub fn decisions_only(&self) -> ShapeSeries {
        let last = self.steps.len().saturating_sub(1);
        ShapeSeries {
            characters: self.characters.clone(),
            steps: self
                .steps
                .iter()
                .enumerate()
                .filter(|(t, s)| *t == 0 || *t == last || s.kind == StepKind::Decision)
                .map(|(_, s)| s.clone())
                .collect(),
        }
    }

    pub fn step_by_label(&self, label: &str) -> Option<&ShapeStep> {
        self.steps.iter().find(|s| s.label == label)
    }
}

/// Samples the value function along `path` and attaches surprise and suspense.
pub fn shape_curve(g: &Game, sigma: &BehavioralProfile, path: &PathTrace) -> Result<ShapeSeries, NarrativeError> {
    let values = checked_values(g, sigma, path)?;
    let surprise = surprise_from(&values, path);
    let steps = path
        .nodes
        .iter()
        .enumerate()
        .map(|(t, &n)| {
            let node = g.node(n);
            ShapeStep {
                node: n,
                node_name: node.name.clone(),
                label: if t == 0 { String::new() } else { path.labels[t - 1].clone() },
                kind: match node.kind {
                    NodeKind::Decision { .. } => StepKind::Decision,
                    NodeKind::Chance { .. } => StepKind::Chance,
                    NodeKind::Terminal { .. } => StepKind::Terminal,
                },
                values: values.at(n).to_vec(),
                surprise: surprise[t].clone(),
                suspense: suspense_at(g, sigma, &values, n),
            }
        })
        .collect();
    Ok(ShapeSeries { characters: g.players().iter().map(|p| p.name.clone()).collect(), steps })
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::game::{build_game, GameSpec, NodeSpec};
    use crate::prob::Prob;

    fn game2_lle() -> (Game, BehavioralProfile) {
        let g = romeo_juliet_game2();
        // infoset 0: Romeo (die, live); infoset 1: Juliet (marry, fake, suicide)
        let s = BehavioralProfile::new(&g, vec![vec![1.0, 0.0], vec![0.5, 0.5, 0.0]]).unwrap();
        (g, s)
    }

    #[test]
    fn resolves_actual_story() {
        let g = romeo_juliet_game2();
        let p = story_path(&g, &actual_story_game2()).unwrap();
        assert_eq!(p.nodes.len(), 5);
        assert_eq!(g.node(p.leaf()).payoffs(), Some(&[-100.0, -100.0][..]));
    }

    #[test]
    fn story_errors() {
        let g = romeo_juliet_game2();
        let bad = StorySpec { characters: vec![], actions: vec!["no-grief".into(), "elope".into()], annotations: vec![] };
        assert_eq!(
            story_path(&g, &bad).unwrap_err(),
            NarrativeError::NoSuchBranch { step: 1, label: "elope".into() }
        );
        let short = StorySpec { characters: vec![], actions: vec!["no-grief".into()], annotations: vec![] };
        assert!(matches!(story_path(&g, &short), Err(NarrativeError::PathEndsEarly { .. })));
        let one = build_game(GameSpec {
            title: String::new(),
            comment: None,
            players: vec!["A".into()],
            root: NodeSpec::terminal([1.0]),
            annotations: None,
        })
        .unwrap();
        let empty = StorySpec { characters: vec![], actions: vec![], annotations: vec![] };
        assert_eq!(story_path(&one, &empty).unwrap().nodes, vec![0]);
        let dup = build_game(GameSpec {
            title: String::new(),
            comment: None,
            players: vec!["A".into()],
            root: NodeSpec::chance([
                ("same", Prob::new(1, 2), NodeSpec::terminal([1.0])),
                ("same", Prob::new(1, 2), NodeSpec::terminal([2.0])),
            ]),
            annotations: None,
        })
        .unwrap();
        let amb = StorySpec { characters: vec![], actions: vec!["same".into()], annotations: vec![] };
        assert!(matches!(story_path(&dup, &amb), Err(NarrativeError::AmbiguousLabel { step: 0, .. })));
    }

    #[test]
    fn actual_story_probability_under_mixed_equilibrium() {
        let (g, s) = game2_lle();
        let p = story_path(&g, &actual_story_game2()).unwrap();
        let r = rationalization(&g, &s, &p, RATIONALIZE_TOL).unwrap();
        assert!(r.rationalized);
        assert!((r.path_probability - 0.0525).abs() < 1e-15);
    }

    #[test]
    fn game2_shape_has_jumps() {
        let (g, s) = game2_lle();
        let p = story_path(&g, &actual_story_game2()).unwrap();
        let series = shape_curve(&g, &s, &p).unwrap();
        // A = 0.85*(-20,-100) + 0.15*B, B = 0.5*(-40,-43) + 0.5*M, M = (-43,-43)
        let a = &series.steps[0].values;
        assert!((a[0] - -23.225).abs() < 1e-12 && (a[1] - -91.45).abs() < 1e-12);
        let fails = series.step_by_label("message-fails").unwrap();
        assert!((fails.surprise[0] - 57.0).abs() < 1e-12);
        assert!((fails.surprise[1] - 57.0).abs() < 1e-12);
        assert_eq!(series.steps[0].surprise, vec![0.0, 0.0]);
        assert_eq!(series.steps.last().unwrap().suspense, vec![0.0, 0.0]);
        // M's children are worth (90,90) and (-100,-100): sd = 190*sqrt(0.21)
        let m = series.step_by_label("fake-death").unwrap();
        assert!((m.suspense[0] - 190.0 * 0.21f64.sqrt()).abs() < 1e-9);
        // Mixing Juliet is indifferent, so her own suspense at B is zero.
        let b = series.step_by_label("no-grief").unwrap();
        assert!(b.suspense[0] > 0.0);
        assert!(b.suspense[1].abs() < 1e-12);
    }

    #[test]
    fn single_child_nodes_have_no_suspense() {
        let g = build_game(GameSpec {
            title: String::new(),
            comment: None,
            players: vec!["A".into()],
            root: NodeSpec::decision(0, "i", [("only", NodeSpec::chance([("c", Prob::one(), NodeSpec::terminal([3.0]))]))]),
            annotations: None,
        })
        .unwrap();
        let s = BehavioralProfile::uniform(&g);
        let p = PathTrace::from_branches(&g, &[0, 0]).unwrap();
        let shape = shape_curve(&g, &s, &p).unwrap();
        for step in &shape.steps {
            assert_eq!(step.surprise, vec![0.0]);
            assert_eq!(step.suspense, vec![0.0]);
        }
    }

    #[test]
    fn decisions_only_filter() {
        let (g, s) = game2_lle();
        let p = story_path(&g, &actual_story_game2()).unwrap();
        let series = shape_curve(&g, &s, &p).unwrap().decisions_only();
        let kinds: Vec<StepKind> = series.steps.iter().map(|s| s.kind).collect();
        assert_eq!(kinds, vec![StepKind::Chance, StepKind::Decision, StepKind::Decision, StepKind::Terminal]);
    }
}
