use std::fmt;

use crate::game::{Game, NodeId, NodeKind, PlayerIndex};
use crate::tolerance::{ENUMERATION_BUDGET, NASH_GAIN, TIE};

use super::values::Evaluation;
use super::{BehavioralProfile, EvalError};

/// A reduced pure strategy: an action at every infoset of `player` that its
/// own earlier choices do not rule out. Other infosets are `None`.
///
/// Ordering is lexicographic over infoset ids with `None` first, which is the
/// tie-break order for best responses.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PureStrategy {
    pub player: PlayerIndex,
    pub choices: Vec<Option<usize>>,
}

impl PureStrategy {
    /// Human-readable form, e.g. `fake-death` or `l/*/r`.
    pub fn describe(&self, g: &Game) -> String {
        let parts: Vec<String> = g
            .player_infosets(self.player)
            .map(|i| match self.choices[i.id] {
                Some(a) => i.actions[a].clone(),
                None => "*".to_string(),
            })
            .collect();
        if parts.is_empty() {
            "()".into()
        } else {
            parts.join("/")
        }
    }

    fn apply(&self, g: &Game, sigma: &mut BehavioralProfile) {
        for iset in g.player_infosets(self.player) {
            let mut v = vec![0.0; iset.actions.len()];
            v[self.choices[iset.id].unwrap_or(0)] = 1.0;
            sigma.set(iset.id, v);
        }
    }

    /// Probability of this strategy under the product distribution induced
    /// by `sigma`: the product over assigned infosets only, since the
    /// unassigned ones sum out.
    pub fn weight(&self, sigma: &BehavioralProfile) -> f64 {
        self.choices
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.map(|a| sigma.prob(i, a)))
            .product()
    }
}

fn strategy_count(g: &Game, player: PlayerIndex) -> u128 {
    g.player_infosets(player)
        .map(|i| i.actions.len() as u128)
        .fold(1u128, |acc, k| acc.saturating_mul(k))
}

/// All reduced pure strategies of `player`, sorted. Fails if the full
/// strategy count exceeds `budget`.
pub fn reduced_strategies(g: &Game, player: PlayerIndex, budget: u128) -> Result<Vec<PureStrategy>, EvalError> {
    if player >= g.num_players() {
        return Err(EvalError::UnknownPlayer(player));
    }
    let needed = strategy_count(g, player);
    if needed > budget {
        return Err(EvalError::BudgetExceeded { needed, budget });
    }

    fn rec(
        g: &Game,
        player: PlayerIndex,
        mut stack: Vec<NodeId>,
        assign: Vec<Option<usize>>,
        out: &mut Vec<Vec<Option<usize>>>,
    ) {
        while let Some(v) = stack.pop() {
            let node = g.node(v);
            match node.kind {
                NodeKind::Decision { player: p, infoset } if p == player => match assign[infoset] {
                    Some(a) => stack.push(node.children[a].child),
                    None => {
                        for (a, e) in node.children.iter().enumerate() {
                            let mut next = assign.clone();
                            next[infoset] = Some(a);
                            let mut s = stack.clone();
                            s.push(e.child);
                            rec(g, player, s, next, out);
                        }
                        return;
                    }
                },
                _ => stack.extend(node.children.iter().map(|e| e.child)),
            }
        }
        out.push(assign);
    }

    let mut raw = Vec::new();
    rec(g, player, vec![g.root()], vec![None; g.infosets().len()], &mut raw);
    raw.sort();
    raw.dedup();
    Ok(raw.into_iter().map(|choices| PureStrategy { player, choices }).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestResponse {
    pub player: PlayerIndex,
    /// Root value of the best pure deviation.
    pub value: f64,
    pub strategy: PureStrategy,
    /// Root value under the profile being tested.
    pub current: f64,
}

impl BestResponse {
    pub fn regret(&self) -> f64 {
        self.value - self.current
    }
}

fn best_response_in(
    g: &Game,
    sigma: &BehavioralProfile,
    player: PlayerIndex,
    budget: u128,
) -> Result<BestResponse, EvalError> {
    let current = Evaluation::unchecked(g, sigma).values().player(g.root(), player);
    let mut best: Option<(f64, PureStrategy)> = None;
    for s in reduced_strategies(g, player, budget)? {
        let mut dev = sigma.clone();
        s.apply(g, &mut dev);
        let v = Evaluation::unchecked(g, &dev).values().player(g.root(), player);
        match &best {
            Some((bv, _)) if v <= *bv + TIE => {}
            _ => best = Some((v, s)),
        }
    }
    let (value, strategy) = best.expect("at least one strategy");
    Ok(BestResponse { player, value, strategy, current })
}

/// Best pure deviation for `player` against `sigma`, by enumeration of
/// reduced pure strategies. Ties go to the lexicographically first strategy.
pub fn best_response_value(g: &Game, sigma: &BehavioralProfile, player: PlayerIndex) -> Result<BestResponse, EvalError> {
    sigma.check(g)?;
    best_response_in(g, sigma, player, ENUMERATION_BUDGET)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NashCheck {
    pub is_eps_nash: bool,
    pub epsilon: f64,
    /// `best_response_value - current value`, per player.
    pub regrets: Vec<f64>,
    pub best_responses: Vec<BestResponse>,
}

impl NashCheck {
    pub fn max_regret(&self) -> f64 {
        self.regrets.iter().copied().fold(0.0, f64::max)
    }
}

pub fn verify_nash(g: &Game, sigma: &BehavioralProfile, epsilon: f64) -> Result<NashCheck, EvalError> {
    verify_nash_with_budget(g, sigma, epsilon, ENUMERATION_BUDGET)
}

pub fn verify_nash_with_budget(
    g: &Game,
    sigma: &BehavioralProfile,
    epsilon: f64,
    budget: u128,
) -> Result<NashCheck, EvalError> {
    sigma.check(g)?;
    let best_responses = (0..g.num_players())
        .map(|p| best_response_in(g, sigma, p, budget))
        .collect::<Result<Vec<_>, _>>()?;
    let regrets: Vec<f64> = best_responses.iter().map(BestResponse::regret).collect();
    let is_eps_nash = regrets.iter().all(|&r| r <= epsilon);
    Ok(NashCheck { is_eps_nash, epsilon, regrets, best_responses })
}

/// Payoff tensor over reduced pure-strategy profiles. Axis `i` is player
/// `i`; entries are stored row-major with the last player varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalForm {
    pub strategies: Vec<Vec<PureStrategy>>,
    payoffs: Vec<Vec<f64>>,
}

impl NormalForm {
    pub fn shape(&self) -> Vec<usize> {
        self.strategies.iter().map(Vec::len).collect()
    }

    pub fn num_profiles(&self) -> usize {
        self.payoffs.len()
    }

    pub fn index(&self, profile: &[usize]) -> usize {
        profile
            .iter()
            .zip(&self.strategies)
            .fold(0, |acc, (&s, strats)| acc * strats.len() + s)
    }

    pub fn profile_of(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.strategies.len()];
        for (slot, strats) in out.iter_mut().zip(&self.strategies).rev() {
            *slot = index % strats.len();
            index /= strats.len();
        }
        out
    }

    pub fn payoff(&self, profile: &[usize]) -> &[f64] {
        &self.payoffs[self.index(profile)]
    }

    /// Mixed strategies induced by a behavioral profile (Kuhn's map onto
    /// reduced strategies).
    pub fn mixed_from_behavioral(&self, sigma: &BehavioralProfile) -> Vec<Vec<f64>> {
        self.strategies
            .iter()
            .map(|strats| strats.iter().map(|s| s.weight(sigma)).collect())
            .collect()
    }

    /// Expected payoff vector when each player mixes independently.
    pub fn expected_payoff(&self, mixed: &[Vec<f64>]) -> Vec<f64> {
        let n = self.strategies.len();
        let mut acc = vec![0.0; n];
        for (k, pay) in self.payoffs.iter().enumerate() {
            let prof = self.profile_of(k);
            let w: f64 = prof.iter().zip(mixed).map(|(&s, m)| m[s]).product();
            if w == 0.0 {
                continue;
            }
            for (a, p) in acc.iter_mut().zip(pay) {
                *a += w * p;
            }
        }
        acc
    }

    /// Behavioral profile playing the given pure profile. Infosets left
    /// unassigned by a reduced strategy play their first action.
    pub fn behavioral_from_pure(&self, g: &Game, profile: &[usize]) -> BehavioralProfile {
        let mut sigma = BehavioralProfile::uniform(g);
        for (strats, &s) in self.strategies.iter().zip(profile) {
            strats[s].apply(g, &mut sigma);
        }
        sigma
    }

    pub fn describe_profile(&self, g: &Game, profile: &[usize]) -> String {
        let parts: Vec<String> = self
            .strategies
            .iter()
            .zip(profile)
            .map(|(strats, &s)| strats[s].describe(g))
            .collect();
        format!("({})", parts.join(", "))
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shape: Vec<String> = self.shape().iter().map(|s| s.to_string()).collect();
        write!(f, "normal form {}", shape.join("x"))
    }
}

/// Reduced normal form of `g`. Chance is averaged out in each entry.
pub fn to_normal_form(g: &Game, budget: u128) -> Result<NormalForm, EvalError> {
    let strategies = (0..g.num_players())
        .map(|p| reduced_strategies(g, p, budget))
        .collect::<Result<Vec<_>, _>>()?;
    let needed = strategies
        .iter()
        .fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128));
    if needed > budget {
        return Err(EvalError::BudgetExceeded { needed, budget });
    }
    let mut nf = NormalForm { strategies, payoffs: Vec::with_capacity(needed as usize) };
    let base = BehavioralProfile::uniform(g);
    for k in 0..needed as usize {
        let prof = nf.profile_of(k);
        let mut sigma = base.clone();
        for (strats, &s) in nf.strategies.iter().zip(&prof) {
            strats[s].apply(g, &mut sigma);
        }
        let eval = Evaluation::unchecked(g, &sigma);
        nf.payoffs.push(eval.values().at(g.root()).to_vec());
    }
    Ok(nf)
}

/// Every pure profile where no unilateral pure deviation gains more than
/// [`NASH_GAIN`].
pub fn enumerate_pure_nash(nf: &NormalForm) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    'profiles: for k in 0..nf.num_profiles() {
        let prof = nf.profile_of(k);
        for (player, strats) in nf.strategies.iter().enumerate() {
            let here = nf.payoff(&prof)[player];
            let mut dev = prof.clone();
            for alt in 0..strats.len() {
                dev[player] = alt;
                if nf.payoff(&dev)[player] > here + NASH_GAIN {
                    continue 'profiles;
                }
            }
        }
        out.push(prof);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{build_game, GameSpec, NodeSpec};
    use crate::prob::Prob;

    fn spec(players: &[&str], root: NodeSpec) -> Game {
        build_game(GameSpec {
            title: String::new(),
            comment: None,
            players: players.iter().map(|s| s.to_string()).collect(),
            root,
            annotations: None,
        })
        .unwrap()
    }

    /// Entry game: P0 stays out (0,2) or enters; P1 fights (-1,-1) or accommodates (1,1).
    fn entry() -> Game {
        spec(
            &["E", "I"],
            NodeSpec::decision(
                0,
                "e",
                [
                    ("out", NodeSpec::terminal([0.0, 2.0])),
                    (
                        "in",
                        NodeSpec::decision(
                            1,
                            "i",
                            [("fight", NodeSpec::terminal([-1.0, -1.0])), ("acc", NodeSpec::terminal([1.0, 1.0]))],
                        ),
                    ),
                ],
            ),
        )
    }

    #[test]
    fn entry_game_pure_equilibria() {
        let g = entry();
        let nf = to_normal_form(&g, 100).unwrap();
        assert_eq!(nf.shape(), vec![2, 2]);
        let eq = enumerate_pure_nash(&nf);
        let described: Vec<String> = eq.iter().map(|p| nf.describe_profile(&g, p)).collect();
        assert_eq!(described, vec!["(out, fight)", "(in, acc)"]);
        for p in &eq {
            let s = nf.behavioral_from_pure(&g, p);
            assert!(verify_nash(&g, &s, 1e-9).unwrap().is_eps_nash);
        }
    }

    #[test]
    fn reduced_strategies_skip_unreachable_infosets() {
        // P0 chooses stop/go; after go P0 chooses again.
        let g = spec(
            &["A"],
            NodeSpec::decision(
                0,
                "first",
                [
                    ("stop", NodeSpec::terminal([0.0])),
                    ("go", NodeSpec::decision(0, "second", [("a", NodeSpec::terminal([1.0])), ("b", NodeSpec::terminal([2.0]))])),
                ],
            ),
        );
        let rs = reduced_strategies(&g, 0, 100).unwrap();
        let d: Vec<String> = rs.iter().map(|s| s.describe(&g)).collect();
        assert_eq!(d, vec!["stop/*", "go/a", "go/b"]);
        let s = BehavioralProfile::uniform(&g);
        let br = best_response_value(&g, &s, 0).unwrap();
        assert_eq!(br.value, 2.0);
        assert_eq!(br.strategy.describe(&g), "go/b");
        assert!((br.regret() - 1.25).abs() < 1e-15);
    }

    #[test]
    fn ties_go_to_first_strategy() {
        let g = spec(&["A"], NodeSpec::decision(0, "i", [("a", NodeSpec::terminal([1.0])), ("b", NodeSpec::terminal([1.0]))]));
        let br = best_response_value(&g, &BehavioralProfile::uniform(&g), 0).unwrap();
        assert_eq!(br.strategy.describe(&g), "a");
        assert_eq!(br.regret(), 0.0);
    }

    #[test]
    fn player_without_infosets() {
        let g = spec(&["A", "B"], NodeSpec::decision(0, "i", [("a", NodeSpec::terminal([1.0, 5.0])), ("b", NodeSpec::terminal([0.0, 3.0]))]));
        let s = BehavioralProfile::uniform(&g);
        let br = best_response_value(&g, &s, 1).unwrap();
        assert_eq!(br.value, 4.0);
        assert_eq!(br.current, 4.0);
        let one = spec(&["A", "B"], NodeSpec::terminal([1.0, 2.0]));
        let nf = to_normal_form(&one, 10).unwrap();
        assert_eq!(nf.shape(), vec![1, 1]);
        assert_eq!(nf.payoff(&[0, 0]), &[1.0, 2.0]);
        assert_eq!(enumerate_pure_nash(&nf), vec![vec![0, 0]]);
    }

    #[test]
    fn budget_enforced() {
        let g = entry();
        assert_eq!(
            reduced_strategies(&g, 0, 1).unwrap_err(),
            EvalError::BudgetExceeded { needed: 2, budget: 1 }
        );
        assert!(matches!(to_normal_form(&g, 3), Err(EvalError::BudgetExceeded { needed: 4, budget: 3 })));
        assert_eq!(reduced_strategies(&g, 5, 10).unwrap_err(), EvalError::UnknownPlayer(5));
    }

    #[test]
    fn tree_and_tensor_agree_with_chance() {
        let g = spec(
            &["A", "B"],
            NodeSpec::chance([
                ("h", Prob::new(1, 3), NodeSpec::decision(0, "a", [("x", NodeSpec::terminal([1.0, 0.0])), ("y", NodeSpec::terminal([0.0, 3.0]))])),
                ("t", Prob::new(2, 3), NodeSpec::decision(1, "b", [("u", NodeSpec::terminal([2.0, 1.0])), ("v", NodeSpec::terminal([4.0, -1.0]))])),
            ]),
        );
        let nf = to_normal_form(&g, 100).unwrap();
        let s = BehavioralProfile::new(&g, vec![vec![0.3, 0.7], vec![0.6, 0.4]]).unwrap();
        let tree = Evaluation::new(&g, &s).unwrap().values().at(0).to_vec();
        let tensor = nf.expected_payoff(&nf.mixed_from_behavioral(&s));
        for (a, b) in tree.iter().zip(&tensor) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
