//! Seeded random games and profiles for property tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::eval::{reduced_strategies, BehavioralProfile};
use crate::game::{build_game, validate, Game, GameSpec, NodeSpec};
use crate::prob::Prob;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    /// Upper bound on the node count, including leaves.
    pub max_nodes: usize,
    pub players: usize,
    pub max_actions: usize,
    pub chance_rate: f64,
    /// Attempts to merge decision nodes into shared infosets.
    pub merge_attempts: usize,
    /// Reject games where any player has more reduced pure strategies.
    pub max_pure_strategies: Option<usize>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            max_nodes: 30,
            players: 2,
            max_actions: 3,
            chance_rate: 0.3,
            merge_attempts: 4,
            max_pure_strategies: None,
        }
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Leaf,
    Chance(Vec<u32>),
    Decision(usize),
}

#[derive(Debug, Clone)]
struct Draft {
    kind: Kind,
    children: Vec<usize>,
    parent: Option<usize>,
    key: usize,
}

fn grow<R: Rng + ?Sized>(rng: &mut R, cfg: &SynthConfig) -> Vec<Draft> {
    let mut nodes = vec![Draft { kind: Kind::Leaf, children: vec![], parent: None, key: 0 }];
    let mut leaves = vec![0];
    loop {
        let room = cfg.max_nodes.saturating_sub(nodes.len());
        if room < 2 || leaves.is_empty() {
            break;
        }
        // Stop early now and then so sizes vary.
        if nodes.len() > 1 && rng.gen_bool(0.08) {
            break;
        }
        let k = rng.gen_range(2..=cfg.max_actions.max(2).min(room));
        let pick = rng.gen_range(0..leaves.len());
        let v = leaves.swap_remove(pick);
        nodes[v].kind = if rng.gen_bool(cfg.chance_rate) {
            Kind::Chance((0..k).map(|_| rng.gen_range(1..=9)).collect())
        } else {
            Kind::Decision(rng.gen_range(0..cfg.players))
        };
        nodes[v].key = v;
        for _ in 0..k {
            let c = nodes.len();
            nodes.push(Draft { kind: Kind::Leaf, children: vec![], parent: Some(v), key: 0 });
            nodes[v].children.push(c);
            leaves.push(c);
        }
    }
    nodes
}

fn is_ancestor(nodes: &[Draft], a: usize, mut b: usize) -> bool {
    while let Some(p) = nodes[b].parent {
        if p == a {
            return true;
        }
        b = p;
    }
    false
}

fn to_spec<R: Rng + ?Sized>(nodes: &[Draft], v: usize, players: usize, payoffs: &mut R) -> NodeSpec {
    let d = &nodes[v];
    let spec = match &d.kind {
        Kind::Leaf => {
            let p: Vec<f64> = (0..players).map(|_| payoffs.gen_range(-40..=40) as f64 / 4.0).collect();
            NodeSpec::terminal(p).outcome(format!("o{v}"))
        }
        Kind::Chance(w) => {
            let total: u32 = w.iter().sum();
            NodeSpec::chance(d.children.iter().zip(w).enumerate().map(|(i, (&c, &wi))| {
                (format!("c{i}"), Prob::new(wi as i64, total as i64), to_spec(nodes, c, players, payoffs))
            }))
        }
        Kind::Decision(p) => NodeSpec::Decision {
            name: String::new(),
            player: *p,
            infoset: format!("p{p}k{}", d.key),
            infoset_name: None,
            actions: d
                .children
                .iter()
                .enumerate()
                .map(|(i, &c)| (format!("a{i}"), to_spec(nodes, c, players, payoffs)))
                .collect(),
        },
    };
    if v % 3 == 0 && !matches!(d.kind, Kind::Leaf) {
        spec.named(format!("n{v}"))
    } else {
        spec
    }
}

fn assemble(nodes: &[Draft], cfg: &SynthConfig, payoff_seed: u64, title: &str) -> Option<Game> {
    use rand::SeedableRng;
    let mut prng = rand_chacha::ChaCha8Rng::seed_from_u64(payoff_seed);
    build_game(GameSpec {
        title: title.into(),
        comment: None,
        players: (0..cfg.players).map(|i| format!("P{}", i + 1)).collect(),
        root: to_spec(nodes, 0, cfg.players, &mut prng),
        annotations: None,
    })
    .ok()
    .filter(|g| validate(g).is_empty())
}

/// One random valid game with perfect recall and at most `cfg.max_nodes`
/// nodes.
pub fn random_game<R: Rng + ?Sized>(rng: &mut R, cfg: &SynthConfig) -> Game {
    loop {
        if let Some(g) = try_random_game(rng, cfg) {
            return g;
        }
    }
}

fn try_random_game<R: Rng + ?Sized>(rng: &mut R, cfg: &SynthConfig) -> Option<Game> {
    let mut nodes = grow(rng, cfg);
    let payoff_seed: u64 = rng.gen();
    let title = format!("random {payoff_seed:016x}");
    let mut game = assemble(&nodes, cfg, payoff_seed, &title)?;

    let decisions: Vec<usize> = (0..nodes.len()).filter(|&v| matches!(nodes[v].kind, Kind::Decision(_))).collect();
    for _ in 0..cfg.merge_attempts {
        let Some(&a) = decisions.choose(rng) else { break };
        let Some(&b) = decisions.choose(rng) else { break };
        let (Kind::Decision(pa), Kind::Decision(pb)) = (&nodes[a].kind, &nodes[b].kind) else { continue };
        if a == b
            || pa != pb
            || nodes[a].key == nodes[b].key
            || nodes[a].children.len() != nodes[b].children.len()
            || is_ancestor(&nodes, a, b)
            || is_ancestor(&nodes, b, a)
        {
            continue;
        }
        let (from, to) = (nodes[b].key, nodes[a].key);
        let saved = nodes.clone();
        for n in nodes.iter_mut() {
            if matches!(n.kind, Kind::Decision(_)) && n.key == from {
                n.key = to;
            }
        }
        match assemble(&nodes, cfg, payoff_seed, &title) {
            Some(g) => game = g,
            None => nodes = saved,
        }
    }

    if let Some(cap) = cfg.max_pure_strategies {
        for p in 0..game.num_players() {
            match reduced_strategies(&game, p, cap as u128 + 1) {
                Ok(s) if s.len() <= cap => {}
                _ => return None,
            }
        }
    }
    Some(game)
}

/// Interior profile with every probability at least `floor / |A|`.
pub fn random_interior_profile<R: Rng + ?Sized>(g: &Game, rng: &mut R) -> BehavioralProfile {
    let probs = g
        .infosets()
        .iter()
        .map(|i| {
            let w: Vec<f64> = i.actions.iter().map(|_| rng.gen_range(0.05..1.0)).collect();
            let s: f64 = w.iter().sum();
            w.into_iter().map(|x| x / s).collect()
        })
        .collect();
    BehavioralProfile::new(g, probs).expect("normalized")
}

/// Pure profile: one random action per infoset.
pub fn random_pure_profile<R: Rng + ?Sized>(g: &Game, rng: &mut R) -> BehavioralProfile {
    let choices: Vec<usize> = g.infosets().iter().map(|i| rng.gen_range(0..i.actions.len())).collect();
    BehavioralProfile::pure(g, &choices).expect("in range")
}
