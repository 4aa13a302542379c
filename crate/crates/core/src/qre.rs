//! Agent logit quantal-response equilibria and the logit path.
//!
//! At precision λ every infoset plays a softmax of its belief-weighted action
//! values. [`trace_lle`] follows the fixed points up a geometric λ ladder
//! with warm starts and purifies the last profile to read off the limiting
//! logit equilibrium.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use serde_json::{json, Value};

use crate::eval::{verify_nash, BehavioralProfile, EvalError, Evaluation, NashCheck};
use crate::game::Game;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QreError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("no convergence at lambda {lambda} after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        lambda: f64,
        iterations: usize,
        residual: f64,
        best: Box<BehavioralProfile>,
    },
    #[error("invalid lambda schedule: {0}")]
    InvalidSchedule(String),
    #[error("initial profile must be interior")]
    NotInterior,
}

/// Softmax of `lambda * q` with max-subtraction.
pub fn softmax(q: &[f64], lambda: f64) -> Vec<f64> {
    let m = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = q.iter().map(|&x| (lambda * (x - m)).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

fn response(g: &Game, sigma: &BehavioralProfile, lambda: f64) -> BehavioralProfile {
    let ev = Evaluation::unchecked(g, sigma);
    let probs = (0..g.infosets().len())
        .map(|i| softmax(&ev.action_values_or_uniform(i).values, lambda))
        .collect();
    BehavioralProfile::from_raw(probs)
}

/// One logit best-response step at every infoset.
///
/// Unreached infosets (possible only when the input is not interior) are
/// evaluated under uniform beliefs.
pub fn logit_response(g: &Game, sigma: &BehavioralProfile, lambda: f64) -> Result<BehavioralProfile, QreError> {
    sigma.check(g)?;
    Ok(response(g, sigma, lambda))
}

/// Sup-norm gap between `sigma` and its logit response.
pub fn fixed_point_residual(g: &Game, sigma: &BehavioralProfile, lambda: f64) -> Result<f64, QreError> {
    Ok(logit_response(g, sigma, lambda)?.sup_distance(sigma))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Initial damping weight on the new response.
    pub alpha: f64,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        FixedPointOptions { tol: 1e-10, max_iter: 20_000, alpha: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    pub profile: BehavioralProfile,
    pub residual: f64,
    pub iterations: usize,
}

const MIN_ALPHA: f64 = 1.0 / 1024.0;

fn damp(a: &BehavioralProfile, b: &BehavioralProfile, alpha: f64) -> BehavioralProfile {
    BehavioralProfile::from_raw(
        a.vectors()
            .iter()
            .zip(b.vectors())
            .map(|(x, y)| {
                let mut v: Vec<f64> = x.iter().zip(y).map(|(p, q)| (1.0 - alpha) * p + alpha * q).collect();
                let s: f64 = v.iter().sum();
                v.iter_mut().for_each(|p| *p /= s);
                v
            })
            .collect(),
    )
}

fn step_of(a: &BehavioralProfile, b: &BehavioralProfile) -> Vec<f64> {
    a.vectors().iter().flatten().zip(b.vectors().iter().flatten()).map(|(x, y)| y - x).collect()
}

/// Damped iteration `σ ← (1-α)σ + α·L(σ)` until `‖L(σ) - σ‖∞ ≤ tol`.
/// α is halved whenever consecutive steps reverse direction.
pub fn qre_fixed_point(
    g: &Game,
    lambda: f64,
    init: &BehavioralProfile,
    opts: FixedPointOptions,
) -> Result<FixedPoint, QreError> {
    init.check(g)?;
    if !init.is_interior() {
        return Err(QreError::NotInterior);
    }
    if lambda == 0.0 {
        // L(σ) is uniform for every σ.
        return Ok(FixedPoint { profile: BehavioralProfile::uniform(g), residual: 0.0, iterations: 0 });
    }
    let mut sigma = init.clone();
    let mut alpha = opts.alpha;
    let mut prev_step: Option<Vec<f64>> = None;
    let mut best = (f64::INFINITY, sigma.clone());
    for it in 0..opts.max_iter {
        let next = response(g, &sigma, lambda);
        let residual = next.sup_distance(&sigma);
        if residual < best.0 {
            best = (residual, sigma.clone());
        }
        if residual <= opts.tol {
            return Ok(FixedPoint { profile: sigma, residual, iterations: it });
        }
        let step = step_of(&sigma, &next);
        if let Some(prev) = &prev_step {
            // Successive steps pointing against each other: oscillation.
            let dot: f64 = prev.iter().zip(&step).map(|(a, b)| a * b).sum();
            if dot < 0.0 && alpha > MIN_ALPHA {
                alpha /= 2.0;
            }
        }
        prev_step = Some(step);
        sigma = damp(&sigma, &next, alpha);
    }
    let residual = fixed_point_residual(g, &sigma, lambda)?;
    if residual <= opts.tol {
        return Ok(FixedPoint { profile: sigma, residual, iterations: opts.max_iter });
    }
    Err(QreError::NoConvergence {
        lambda,
        iterations: opts.max_iter,
        residual: best.0,
        best: Box::new(best.1),
    })
}

/// Default purification threshold.
pub const PURIFY_DELTA: f64 = 1e-3;

/// Snaps a probability `≥ 1-δ` to 1; otherwise zeroes probabilities `≤ δ`
/// and renormalizes the rest.
pub fn purify(sigma: &BehavioralProfile, delta: f64) -> BehavioralProfile {
    let probs = sigma
        .vectors()
        .iter()
        .map(|v| {
            if let Some(k) = v.iter().position(|&p| p >= 1.0 - delta) {
                let mut out = vec![0.0; v.len()];
                out[k] = 1.0;
                return out;
            }
            let kept: Vec<f64> = v.iter().map(|&p| if p <= delta { 0.0 } else { p }).collect();
            let s: f64 = kept.iter().sum();
            if s <= 0.0 {
                v.clone()
            } else {
                kept.into_iter().map(|p| p / s).collect()
            }
        })
        .collect();
    BehavioralProfile::from_raw(probs)
}

/// Strictly increasing precision values, starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSchedule {
    values: Vec<f64>,
}

impl LambdaSchedule {
    /// `0, start, start·factor, …` with `steps` geometric rungs after 0.
    pub fn geometric(start: f64, factor: f64, steps: usize) -> Result<Self, QreError> {
        if !(start > 0.0 && start.is_finite()) {
            return Err(QreError::InvalidSchedule(format!("start must be positive, got {start}")));
        }
        if !(factor > 1.0 && factor.is_finite()) {
            return Err(QreError::InvalidSchedule(format!("factor must exceed 1, got {factor}")));
        }
        let mut values = vec![0.0];
        let mut l = start;
        for _ in 0..steps {
            values.push(l);
            l *= factor;
        }
        Ok(LambdaSchedule { values })
    }

    pub fn from_values(values: Vec<f64>) -> Result<Self, QreError> {
        if values.first() != Some(&0.0) {
            return Err(QreError::InvalidSchedule("must start at 0".into()));
        }
        if values.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(QreError::InvalidSchedule("must be strictly increasing and finite".into()));
        }
        Ok(LambdaSchedule { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl Default for LambdaSchedule {
    fn default() -> Self {
        LambdaSchedule::geometric(0.01, 1.25, 60).expect("default schedule")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceOptions {
    pub fixed_point: FixedPointOptions,
    pub purify_delta: f64,
    /// Stop once the purified profile is unchanged across this many rungs.
    /// `None` runs the whole ladder.
    pub stable_rungs: Option<usize>,
    pub jump_threshold: f64,
    pub verify_epsilon: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            fixed_point: FixedPointOptions::default(),
            purify_delta: PURIFY_DELTA,
            stable_rungs: Some(3),
            jump_threshold: 0.25,
            verify_epsilon: 1e-4,
        }
    }
}

const STABLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct LogitTracePoint {
    pub lambda: f64,
    pub profile: BehavioralProfile,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveWarning {
    /// Consecutive rungs differ by more than the jump threshold.
    PathJump { from: f64, to: f64, distance: f64 },
    /// The purified profile failed Nash verification.
    Unverified { max_regret: f64 },
}

impl std::fmt::Display for SolveWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolveWarning::PathJump { from, to, distance } => {
                write!(f, "path jump of {distance:.4} between lambda {from} and {to}")
            }
            SolveWarning::Unverified { max_regret } => write!(f, "unverified: max regret {max_regret:e}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Purified limit profile.
    pub profile: BehavioralProfile,
    pub trace: Vec<LogitTracePoint>,
    /// True when purification changed the last trace profile.
    pub purified: bool,
    pub iterations: usize,
    pub stopped_early: bool,
    pub wall_time: Duration,
    pub warnings: Vec<SolveWarning>,
    pub verification: NashCheck,
}

impl SolveReport {
    /// Last accepted interior profile on the ladder.
    pub fn last_interior(&self) -> &BehavioralProfile {
        &self.trace.last().expect("trace has the lambda = 0 point").profile
    }

    pub fn final_lambda(&self) -> f64 {
        self.trace.last().map(|p| p.lambda).unwrap_or(0.0)
    }

    pub fn is_verified(&self) -> bool {
        self.verification.is_eps_nash
    }

    /// JSON report; `trace` and wall time are included only on request so
    /// that the default output is reproducible.
    pub fn to_json(&self, g: &Game, with_trace: bool, with_timing: bool) -> Value {
        let mut v = json!({
            "game": g.title(),
            "profile": self.profile.to_json(g),
            "last_interior": self.last_interior().to_json(g),
            "final_lambda": self.final_lambda(),
            "purified": self.purified,
            "stopped_early": self.stopped_early,
            "iterations": self.iterations,
            "rungs": self.trace.len(),
            "verification": {
                "verified": self.verification.is_eps_nash,
                "epsilon": self.verification.epsilon,
                "max_regret": self.verification.max_regret(),
                "regrets": self.verification.regrets,
            },
            "warnings": self.warnings.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        });
        if with_trace {
            v["trace"] = self
                .trace
                .iter()
                .map(|p| {
                    json!({
                        "lambda": p.lambda,
                        "residual": p.residual,
                        "iterations": p.iterations,
                        "profile": p.profile.vectors(),
                    })
                })
                .collect();
        }
        if with_timing {
            v["wall_time_ms"] = json!(self.wall_time.as_secs_f64() * 1e3);
        }
        v
    }

    /// One row per rung: `lambda,residual,<infoset>:<action>…`.
    pub fn trace_csv(&self, g: &Game) -> String {
        let mut out = String::from("lambda,residual");
        for iset in g.infosets() {
            for a in &iset.actions {
                let col = format!("{}:{}", iset.name, a);
                if col.contains([',', '"']) {
                    write!(out, ",\"{}\"", col.replace('"', "\"\"")).unwrap();
                } else {
                    write!(out, ",{col}").unwrap();
                }
            }
        }
        out.push('\n');
        for p in &self.trace {
            write!(out, "{},{:e}", p.lambda, p.residual).unwrap();
            for x in p.profile.vectors().iter().flatten() {
                write!(out, ",{x}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Follows the logit fixed points up `schedule`, warm-starting each rung
/// from the previous one, and purifies the last profile.
pub fn trace_lle(g: &Game, schedule: &LambdaSchedule, opts: &TraceOptions) -> Result<SolveReport, QreError> {
    let start = Instant::now();
    let mut sigma = BehavioralProfile::uniform(g);
    let mut trace: Vec<LogitTracePoint> = Vec::new();
    let mut warnings = Vec::new();
    let mut iterations = 0;
    let mut stable = 0;
    let mut last_pure: Option<BehavioralProfile> = None;
    let mut stopped_early = false;

    for &lambda in schedule.values() {
        let fp = qre_fixed_point(g, lambda, &sigma, opts.fixed_point)?;
        iterations += fp.iterations;
        if let Some(prev) = trace.last() {
            let d = prev.profile.sup_distance(&fp.profile);
            if d > opts.jump_threshold {
                warnings.push(SolveWarning::PathJump { from: prev.lambda, to: lambda, distance: d });
            }
        }
        let pure = purify(&fp.profile, opts.purify_delta);
        match &last_pure {
            Some(p) if p.sup_distance(&pure) <= STABLE_TOL => stable += 1,
            _ => stable = 1,
        }
        last_pure = Some(pure);
        // Later rungs start from here; exact zeros from underflow would stall
        // the softmax on those actions, so keep the warm start interior.
        sigma = if fp.profile.is_interior() { fp.profile.clone() } else { nudge_interior(&fp.profile) };
        trace.push(LogitTracePoint { lambda, profile: fp.profile, residual: fp.residual, iterations: fp.iterations });
        if let Some(k) = opts.stable_rungs {
            if stable >= k {
                stopped_early = lambda < *schedule.values().last().unwrap();
                break;
            }
        }
    }

    let last = &trace.last().expect("schedule starts at 0").profile;
    let profile = purify(last, opts.purify_delta);
    let purified = profile != *last;
    let verification = verify_nash(g, &profile, opts.verify_epsilon)?;
    if !verification.is_eps_nash {
        warnings.push(SolveWarning::Unverified { max_regret: verification.max_regret() });
    }
    Ok(SolveReport {
        profile,
        trace,
        purified,
        iterations,
        stopped_early,
        wall_time: start.elapsed(),
        warnings,
        verification,
    })
}

fn nudge_interior(sigma: &BehavioralProfile) -> BehavioralProfile {
    let probs = sigma
        .vectors()
        .iter()
        .map(|v| {
            let w: Vec<f64> = v.iter().map(|&p| p.max(f64::MIN_POSITIVE)).collect();
            let s: f64 = w.iter().sum();
            w.into_iter().map(|p| p / s).collect()
        })
        .collect();
    BehavioralProfile::from_raw(probs)
}
