use crate::game::{Game, InfosetId, NodeId};

use super::{BehavioralProfile, EvalError, PathTrace};

/// Per-node expected payoff vectors, one entry per player.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    values: Vec<Vec<f64>>,
}

impl ValueTable {
    pub fn at(&self, node: NodeId) -> &[f64] {
        &self.values[node]
    }

    pub fn player(&self, node: NodeId, player: usize) -> f64 {
        self.values[node][player]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }
}

/// Conditional distribution over an infoset's members.
#[derive(Debug, Clone, PartialEq)]
pub struct Beliefs {
    pub members: Vec<NodeId>,
    pub probs: Vec<f64>,
    /// Set when the infoset was unreached and a uniform belief was substituted.
    pub uniform_fallback: bool,
}

/// Belief-weighted expected payoff of each action for the infoset's owner.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionValues {
    pub values: Vec<f64>,
    pub uniform_fallback: bool,
}

/// Reach probabilities and values computed together for one profile, so that
/// per-infoset queries do not repeat the tree passes.
#[derive(Debug, Clone)]
pub struct Evaluation<'g> {
    game: &'g Game,
    profile: BehavioralProfile,
    reach: Vec<f64>,
    values: ValueTable,
}

impl<'g> Evaluation<'g> {
    pub fn new(g: &'g Game, sigma: &BehavioralProfile) -> Result<Self, EvalError> {
        sigma.check(g)?;
        Ok(Self::unchecked(g, sigma))
    }

    pub(crate) fn unchecked(g: &'g Game, sigma: &BehavioralProfile) -> Self {
        Evaluation {
            game: g,
            profile: sigma.clone(),
            reach: reach_pass(g, sigma),
            values: ValueTable { values: value_pass(g, sigma) },
        }
    }

    pub fn reach(&self) -> &[f64] {
        &self.reach
    }

    pub fn values(&self) -> &ValueTable {
        &self.values
    }

    pub fn into_values(self) -> ValueTable {
        self.values
    }

    pub fn beliefs(&self, iset: InfosetId) -> Result<Beliefs, EvalError> {
        let members = self.game.infoset(iset).members.clone();
        let total: f64 = members.iter().map(|&m| self.reach[m]).sum();
        if total <= 0.0 {
            return Err(EvalError::UnreachedInfoset(iset));
        }
        let probs = members.iter().map(|&m| self.reach[m] / total).collect();
        Ok(Beliefs { members, probs, uniform_fallback: false })
    }

    /// Like [`Evaluation::beliefs`], but substitutes a uniform belief at an
    /// unreached infoset and flags it.
    pub fn beliefs_or_uniform(&self, iset: InfosetId) -> Beliefs {
        self.beliefs(iset).unwrap_or_else(|_| {
            let members = self.game.infoset(iset).members.clone();
            let u = 1.0 / members.len() as f64;
            let probs = vec![u; members.len()];
            Beliefs { members, probs, uniform_fallback: true }
        })
    }

    fn q_from(&self, iset: InfosetId, b: &Beliefs) -> ActionValues {
        let info = self.game.infoset(iset);
        let owner = info.owner;
        let mut q = vec![0.0; info.actions.len()];
        for (&m, &w) in b.members.iter().zip(&b.probs) {
            if w == 0.0 {
                continue;
            }
            for (a, e) in self.game.node(m).children.iter().enumerate() {
                q[a] += w * self.values.player(e.child, owner);
            }
        }
        ActionValues { values: q, uniform_fallback: b.uniform_fallback }
    }

    pub fn action_values(&self, iset: InfosetId) -> Result<ActionValues, EvalError> {
        let b = self.beliefs(iset)?;
        Ok(self.q_from(iset, &b))
    }

    pub fn action_values_or_uniform(&self, iset: InfosetId) -> ActionValues {
        let b = self.beliefs_or_uniform(iset);
        self.q_from(iset, &b)
    }

    pub fn profile(&self) -> &BehavioralProfile {
        &self.profile
    }
}

fn reach_pass(g: &Game, sigma: &BehavioralProfile) -> Vec<f64> {
    let mut reach = vec![0.0; g.num_nodes()];
    reach[g.root()] = 1.0;
    for &v in g.preorder() {
        let probs = sigma.branch_probs(g, v);
        for (e, p) in g.node(v).children.iter().zip(probs) {
            reach[e.child] = reach[v] * p;
        }
    }
    reach
}

fn value_pass(g: &Game, sigma: &BehavioralProfile) -> Vec<Vec<f64>> {
    let n = g.num_players();
    let mut values = vec![Vec::new(); g.num_nodes()];
    for &v in g.preorder().iter().rev() {
        let node = g.node(v);
        if let Some(p) = node.payoffs() {
            values[v] = p.to_vec();
            continue;
        }
        let mut acc = vec![0.0; n];
        for (e, &p) in node.children.iter().zip(sigma.branch_probs(g, v)) {
            if p == 0.0 {
                continue;
            }
            for (a, c) in acc.iter_mut().zip(&values[e.child]) {
                *a += p * c;
            }
        }
        values[v] = acc;
    }
    values
}

/// Probability of reaching every node under `sigma` and chance.
pub fn reach_probabilities(g: &Game, sigma: &BehavioralProfile) -> Result<Vec<f64>, EvalError> {
    sigma.check(g)?;
    Ok(reach_pass(g, sigma))
}

/// Backward pass: terminal payoffs, then probability-weighted child values.
pub fn value_function(g: &Game, sigma: &BehavioralProfile) -> Result<ValueTable, EvalError> {
    sigma.check(g)?;
    Ok(ValueTable { values: value_pass(g, sigma) })
}

pub fn infoset_beliefs(g: &Game, sigma: &BehavioralProfile, iset: InfosetId) -> Result<Beliefs, EvalError> {
    Evaluation::new(g, sigma)?.beliefs(iset)
}

pub fn infoset_beliefs_or_uniform(
    g: &Game,
    sigma: &BehavioralProfile,
    iset: InfosetId,
) -> Result<Beliefs, EvalError> {
    Ok(Evaluation::new(g, sigma)?.beliefs_or_uniform(iset))
}

pub fn action_values(g: &Game, sigma: &BehavioralProfile, iset: InfosetId) -> Result<ActionValues, EvalError> {
    Evaluation::new(g, sigma)?.action_values(iset)
}

pub fn action_values_or_uniform(
    g: &Game,
    sigma: &BehavioralProfile,
    iset: InfosetId,
) -> Result<ActionValues, EvalError> {
    Ok(Evaluation::new(g, sigma)?.action_values_or_uniform(iset))
}

/// Product of the branch probabilities along `path`.
pub fn path_probability(g: &Game, sigma: &BehavioralProfile, path: &PathTrace) -> Result<f64, EvalError> {
    sigma.check(g)?;
    path.check(g)?;
    let mut p = 1.0;
    for (w, label) in path.nodes.windows(2).zip(&path.labels) {
        let node = g.node(w[0]);
        let k = node
            .children
            .iter()
            .position(|e| e.child == w[1] && &e.label == label)
            .expect("checked path");
        p *= sigma.branch_probs(g, w[0])[k];
    }
    Ok(p)
}
