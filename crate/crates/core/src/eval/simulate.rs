use rand::Rng;

use crate::game::Game;

use super::{BehavioralProfile, EvalError};

/// Monte-Carlo estimate of the root value: sample mean and its standard
/// error, per player.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub rollouts: usize,
    pub mean: Vec<f64>,
    pub std_err: Vec<f64>,
}

fn sample(weights: &[f64], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

/// Plays `rollouts` forward from the root, sampling chance and `sigma`.
/// Independent of the backward value pass.
pub fn simulate_root_value(
    g: &Game,
    sigma: &BehavioralProfile,
    rollouts: usize,
    rng: &mut impl Rng,
) -> Result<McEstimate, EvalError> {
    sigma.check(g)?;
    let n = g.num_players();
    let mut sum = vec![0.0; n];
    let mut sum_sq = vec![0.0; n];
    for _ in 0..rollouts {
        let mut v = g.root();
        loop {
            let node = g.node(v);
            if let Some(p) = node.payoffs() {
                for i in 0..n {
                    sum[i] += p[i];
                    sum_sq[i] += p[i] * p[i];
                }
                break;
            }
            let k = sample(sigma.branch_probs(g, v), rng);
            v = node.children[k].child;
        }
    }
    let r = rollouts.max(1) as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / r).collect();
    let std_err = (0..n)
        .map(|i| {
            let var = (sum_sq[i] / r - mean[i] * mean[i]).max(0.0) * r / (r - 1.0).max(1.0);
            (var / r).sqrt()
        })
        .collect();
    Ok(McEstimate { rollouts, mean, std_err })
}
