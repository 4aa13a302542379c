//! Independent reference computations for integration tests. Nothing here
//! calls the library's evaluation passes; only the tree accessors.

#![allow(dead_code)]

use std::path::PathBuf;

use storygame::eval::BehavioralProfile;
use storygame::game::{Game, NodeKind};

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixtures_dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Expected payoff at `node` by plain recursion.
pub fn tree_value(g: &Game, sigma: &BehavioralProfile, node: usize) -> Vec<f64> {
    let n = g.node(node);
    match &n.kind {
        NodeKind::Terminal { payoffs, .. } => payoffs.clone(),
        NodeKind::Chance { probs } => mix(g, sigma, n.children.iter().map(|e| e.child), probs.iter().map(|p| p.to_f64())),
        NodeKind::Decision { infoset, .. } => {
            let p = sigma.vectors()[*infoset].clone();
            mix(g, sigma, n.children.iter().map(|e| e.child), p.into_iter())
        }
    }
}

fn mix(
    g: &Game,
    sigma: &BehavioralProfile,
    children: impl Iterator<Item = usize>,
    weights: impl Iterator<Item = f64>,
) -> Vec<f64> {
    let mut acc = vec![0.0; g.num_players()];
    for (c, w) in children.zip(weights) {
        if w == 0.0 {
            continue;
        }
        for (a, v) in acc.iter_mut().zip(tree_value(g, sigma, c)) {
            *a += w * v;
        }
    }
    acc
}

pub fn root_value(g: &Game, sigma: &BehavioralProfile) -> Vec<f64> {
    tree_value(g, sigma, g.root())
}

/// Probability of each branch out of `node` under `sigma`.
pub fn branch_weights(g: &Game, sigma: &BehavioralProfile, node: usize) -> Vec<f64> {
    match &g.node(node).kind {
        NodeKind::Chance { probs } => probs.iter().map(|p| p.to_f64()).collect(),
        NodeKind::Decision { infoset, .. } => sigma.vectors()[*infoset].clone(),
        NodeKind::Terminal { .. } => Vec::new(),
    }
}

/// Every assignment of one action per infoset of `player` (unreduced).
pub fn full_pure_strategies(g: &Game, player: usize) -> Vec<Vec<(usize, usize)>> {
    let isets: Vec<(usize, usize)> = g
        .infosets()
        .iter()
        .filter(|i| i.owner == player)
        .map(|i| (i.id, i.actions.len()))
        .collect();
    let mut out = vec![Vec::new()];
    for (id, k) in isets {
        out = out
            .into_iter()
            .flat_map(|s| {
                (0..k).map(move |a| {
                    let mut s = s.clone();
                    s.push((id, a));
                    s
                })
            })
            .collect();
    }
    out
}

fn with_pure(g: &Game, sigma: &BehavioralProfile, strategy: &[(usize, usize)]) -> BehavioralProfile {
    let mut probs = sigma.vectors().to_vec();
    for &(iset, a) in strategy {
        let k = g.infoset(iset).actions.len();
        probs[iset] = (0..k).map(|j| if j == a { 1.0 } else { 0.0 }).collect();
    }
    BehavioralProfile::new(g, probs).expect("pure substitution is valid")
}

/// Largest gain any player gets by switching to a pure strategy.
pub fn max_regret(g: &Game, sigma: &BehavioralProfile) -> f64 {
    let base = root_value(g, sigma);
    let mut worst: f64 = 0.0;
    for p in 0..g.num_players() {
        for s in full_pure_strategies(g, p) {
            let v = root_value(g, &with_pure(g, sigma, &s))[p];
            worst = worst.max(v - base[p]);
        }
    }
    worst
}

/// Probability of an action at the infoset owned by `player` that offers it.
pub fn action_prob(g: &Game, sigma: &BehavioralProfile, player: usize, action: &str) -> f64 {
    let iset = g
        .infosets()
        .iter()
        .find(|i| i.owner == player && i.actions.iter().any(|a| a == action))
        .unwrap_or_else(|| panic!("no infoset of player {player} offers `{action}`"));
    let k = iset.actions.iter().position(|a| a == action).unwrap();
    sigma.vectors()[iset.id][k]
}
