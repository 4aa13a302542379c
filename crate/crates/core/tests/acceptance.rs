//! End-to-end acceptance suite. Runs without the test harness and prints
//! one PASS/FAIL line per criterion.

mod common;

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use storygame::eval::{
    enumerate_pure_nash, path_probability, simulate_root_value, to_normal_form, value_function, verify_nash,
    BehavioralProfile,
};
use storygame::extraction::{build_draft, parse_options, parse_probability, FixtureClient, GenerationClient, Protocol};
use storygame::format::{parse_game, write_game, GameFormat};
use storygame::game::{build_game, GameSpec, NodeSpec};
use storygame::narrative::fixtures::{
    actual_story_game1, actual_story_game2, equilibrium_story_game1, marry_paris_story, JULIET, ROMEO,
};
use storygame::narrative::{rationalization, romeo_juliet_game1, romeo_juliet_game2, shape_curve, story_path};
use storygame::prob::Prob;
use storygame::qre::{qre_fixed_point, trace_lle, FixedPointOptions, LambdaSchedule, SolveReport, TraceOptions};
use storygame::synth::{random_game, random_interior_profile, SynthConfig};
use storygame::tolerance::ENUMERATION_BUDGET;

use common::{action_prob, branch_weights, fixture, max_regret, root_value, tree_value};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn solve(g: &storygame::game::Game) -> Result<(SolveReport, Duration), String> {
    let t = Instant::now();
    let r = trace_lle(g, &LambdaSchedule::default(), &TraceOptions::default()).map_err(|e| e.to_string())?;
    Ok((r, t.elapsed()))
}

fn c1_game1_equilibrium() -> Outcome {
    let g = romeo_juliet_game1();
    let (r, dt) = solve(&g)?;
    let fake = action_prob(&g, &r.profile, JULIET, "fake-death");
    let live = action_prob(&g, &r.profile, ROMEO, "live");
    ensure!(fake == 1.0 && live == 1.0, "purified P(fake-death)={fake}, P(live)={live}");
    let check = verify_nash(&g, &r.profile, 1e-6).map_err(|e| e.to_string())?;
    ensure!(check.is_eps_nash, "verify_nash regret {}", check.max_regret());
    let oracle = max_regret(&g, &r.profile);
    ensure!(oracle <= 1e-6, "oracle regret {oracle}");
    ensure!(dt < Duration::from_secs(1), "took {dt:?}");
    Ok(format!("P(fake-death)=1, P(live)=1, regret {:.1e}, {dt:?}", check.max_regret()))
}

fn c2_game2_equilibrium() -> Outcome {
    let g = romeo_juliet_game2();
    let (r, dt) = solve(&g)?;
    let die = action_prob(&g, &r.profile, ROMEO, "die");
    let own = action_prob(&g, &r.profile, JULIET, "take-own-life");
    ensure!(die >= 0.99, "P(die)={die}");
    ensure!(own <= 0.01, "P(take-own-life)={own}");
    let last = r.last_interior();
    let marry = action_prob(&g, last, JULIET, "marry-paris");
    let fake = action_prob(&g, last, JULIET, "fake-death");
    for (name, p) in [("marry", marry), ("fake", fake)] {
        ensure!((0.45..=0.55).contains(&p), "last interior P({name})={p}");
    }
    let check = verify_nash(&g, &r.profile, 1e-4).map_err(|e| e.to_string())?;
    ensure!(check.max_regret() <= 1e-4, "verify_nash regret {}", check.max_regret());
    let oracle = max_regret(&g, &r.profile);
    ensure!(oracle <= 1e-4, "oracle regret {oracle}");
    ensure!(dt < Duration::from_secs(2), "took {dt:?}");
    Ok(format!("P(die)={die}, marry/fake={marry:.6}/{fake:.6}, regret {oracle:.1e}, {dt:?}"))
}

fn c3_rationalization() -> Outcome {
    let g2 = romeo_juliet_game2();
    let (r2, _) = solve(&g2)?;
    let path = story_path(&g2, &actual_story_game2()).map_err(|e| e.to_string())?;
    let rat = rationalization(&g2, &r2.profile, &path, storygame::narrative::RATIONALIZE_TOL).map_err(|e| e.to_string())?;
    ensure!(rat.rationalized, "Game II does not rationalize the story");
    ensure!((0.04..=0.07).contains(&rat.path_probability), "path probability {}", rat.path_probability);
    let fake = action_prob(&g2, &r2.profile, JULIET, "fake-death");
    let product = 0.15 * fake * 0.7 * action_prob(&g2, &r2.profile, ROMEO, "die");
    ensure!((product - rat.path_probability).abs() <= 1e-9, "branch product {product} vs {}", rat.path_probability);

    let g1 = romeo_juliet_game1();
    let (r1, _) = solve(&g1)?;
    let p1 = story_path(&g1, &actual_story_game1()).map_err(|e| e.to_string())?;
    let q = path_probability(&g1, &r1.profile, &p1).map_err(|e| e.to_string())?;
    ensure!(q < 1e-9, "Game I die continuation has probability {q}");
    Ok(format!("Game II path probability {:.6}, Game I {q}", rat.path_probability))
}

fn c4_game1_shape() -> Outcome {
    let g = romeo_juliet_game1();
    let (r, _) = solve(&g)?;
    let path = story_path(&g, &equilibrium_story_game1()).map_err(|e| e.to_string())?;
    let s = shape_curve(&g, &r.profile, &path).map_err(|e| e.to_string())?;
    let worst = s
        .steps
        .iter()
        .flat_map(|st| st.surprise.iter().chain(&st.suspense))
        .fold(0.0f64, |m, x| m.max(x.abs()));
    ensure!(worst <= 1e-9, "largest entry {worst}");
    Ok(format!("{} steps, largest entry {worst}", s.steps.len()))
}

fn c5_game2_shape() -> Outcome {
    let g = romeo_juliet_game2();
    let (r, _) = solve(&g)?;
    let path = story_path(&g, &actual_story_game2()).map_err(|e| e.to_string())?;
    let s = shape_curve(&g, &r.profile, &path).map_err(|e| e.to_string())?;
    for label in ["no-grief", "message-fails"] {
        let st = s.step_by_label(label).ok_or(format!("no step `{label}`"))?;
        ensure!(st.surprise.iter().all(|&x| x > 0.0), "surprise at {label}: {:?}", st.surprise);
    }
    // suspense is measured at the node the step enters
    let at_b = s.steps.iter().find(|st| st.node_name == "B").ok_or("no step at B")?;
    ensure!(at_b.suspense.iter().any(|&x| x > 0.0), "suspense at B: {:?}", at_b.suspense);
    let at_m = s.steps.iter().find(|st| st.node_name == "M").ok_or("no step at M")?;
    ensure!(at_m.suspense.iter().all(|&x| x > 0.0), "suspense at M: {:?}", at_m.suspense);

    let mp = story_path(&g, &marry_paris_story()).map_err(|e| e.to_string())?;
    let ms = shape_curve(&g, &r.profile, &mp).map_err(|e| e.to_string())?;
    let decided = ms.steps.iter().position(|st| st.label == "marry-paris").ok_or("no marry step")?;
    for st in &ms.steps[decided..] {
        ensure!(st.suspense.iter().all(|&x| x.abs() <= 1e-9), "suspense after marry: {:?}", st.suspense);
    }
    for st in &ms.steps[decided + 1..] {
        ensure!(st.surprise.iter().all(|&x| x.abs() <= 1e-9), "surprise after marry: {:?}", st.surprise);
    }
    Ok(format!(
        "surprise at message-fails {:?}, suspense at B {:?}, at M {:?}",
        s.step_by_label("message-fails").unwrap().surprise,
        at_b.suspense,
        at_m.suspense
    ))
}

fn c6_martingale() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cfg = SynthConfig::default();
    let mut worst: f64 = 0.0;
    let mut mc_checked = 0;
    let mut worst_z: f64 = 0.0;
    for game_ix in 0..200 {
        let g = random_game(&mut rng, &cfg);
        ensure!(g.num_nodes() <= 30, "game with {} nodes", g.num_nodes());
        for prof_ix in 0..10 {
            let sigma = random_interior_profile(&g, &mut rng);
            let v = value_function(&g, &sigma).map_err(|e| e.to_string())?;
            for n in g.nodes() {
                if n.is_terminal() {
                    continue;
                }
                let w = branch_weights(&g, &sigma, n.id);
                for p in 0..g.num_players() {
                    let next: f64 = n.children.iter().zip(&w).map(|(e, wt)| wt * v.player(e.child, p)).sum();
                    worst = worst.max((v.player(n.id, p) - next).abs());
                }
            }
            let oracle = root_value(&g, &sigma);
            for (a, b) in oracle.iter().zip(v.at(g.root())) {
                worst = worst.max((a - b).abs());
            }
            if game_ix < 20 && prof_ix == 0 {
                let mut mc_rng = ChaCha8Rng::seed_from_u64(1000 + game_ix as u64);
                let est = simulate_root_value(&g, &sigma, 100_000, &mut mc_rng).map_err(|e| e.to_string())?;
                for p in 0..g.num_players() {
                    let diff = (est.mean[p] - v.player(g.root(), p)).abs();
                    if est.std_err[p] == 0.0 {
                        ensure!(diff <= 1e-9, "game {game_ix}: degenerate estimate off by {diff}");
                    } else {
                        let z = diff / est.std_err[p];
                        worst_z = worst_z.max(z);
                        ensure!(z <= 3.0, "game {game_ix} player {p}: Monte-Carlo off by {z:.2} standard errors");
                    }
                }
                mc_checked += 1;
            }
        }
    }
    ensure!(worst <= 1e-9, "martingale residual {worst:e}");
    Ok(format!("max residual {worst:.1e}; {mc_checked} Monte-Carlo checks, max |z| {worst_z:.2}"))
}

fn c7_oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cfg = SynthConfig { max_nodes: 20, max_pure_strategies: Some(6), ..SynthConfig::default() };
    let mut worst: f64 = 0.0;
    let mut equilibria = 0;
    for _ in 0..50 {
        let g = random_game(&mut rng, &cfg);
        let nf = to_normal_form(&g, ENUMERATION_BUDGET).map_err(|e| e.to_string())?;
        ensure!(nf.shape().iter().all(|&k| k <= 6), "shape {:?}", nf.shape());
        for k in 0..nf.num_profiles() {
            let prof = nf.profile_of(k);
            let direct = root_value(&g, &nf.behavioral_from_pure(&g, &prof));
            for (a, b) in direct.iter().zip(nf.payoff(&prof)) {
                worst = worst.max((a - b).abs());
            }
        }
        for _ in 0..20 {
            let sigma = random_interior_profile(&g, &mut rng);
            let tree = value_function(&g, &sigma).map_err(|e| e.to_string())?;
            let tensor = nf.expected_payoff(&nf.mixed_from_behavioral(&sigma));
            for (a, b) in tree.at(g.root()).iter().zip(&tensor) {
                worst = worst.max((a - b).abs());
            }
        }
        for prof in enumerate_pure_nash(&nf) {
            let sigma = nf.behavioral_from_pure(&g, &prof);
            let check = verify_nash(&g, &sigma, 1e-9).map_err(|e| e.to_string())?;
            ensure!(check.is_eps_nash, "pure equilibrium {} fails verify_nash", nf.describe_profile(&g, &prof));
            let oracle = max_regret(&g, &sigma);
            ensure!(oracle <= 1e-9, "oracle regret {oracle} at {}", nf.describe_profile(&g, &prof));
            equilibria += 1;
        }
    }
    ensure!(worst <= 1e-9, "tree vs tensor {worst:e}");
    Ok(format!("max difference {worst:.1e}; {equilibria} pure equilibria verified"))
}

fn dominant_game() -> storygame::game::Game {
    let follow = |tag: &str, a: f64| {
        NodeSpec::decision(
            1,
            format!("B after {tag}"),
            vec![("x", NodeSpec::terminal(vec![a, 1.0])), ("y", NodeSpec::terminal(vec![a, 0.0]))],
        )
    };
    build_game(GameSpec {
        title: "dominant".into(),
        comment: None,
        players: vec!["A".into(), "B".into()],
        root: NodeSpec::decision(
            0,
            "A",
            vec![("good", follow("good", 2.0)), ("fair", follow("fair", 1.0)), ("bad", follow("bad", 0.0))],
        ),
        annotations: None,
    })
    .expect("valid game")
}

fn c8_solver_sanity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut games = vec![romeo_juliet_game1(), romeo_juliet_game2()];
    games.extend((0..10).map(|_| random_game(&mut rng, &SynthConfig::default())));
    for g in &games {
        let init = random_interior_profile(g, &mut rng);
        let fp = qre_fixed_point(g, 0.0, &init, FixedPointOptions::default()).map_err(|e| e.to_string())?;
        ensure!(fp.profile == BehavioralProfile::uniform(g), "lambda 0 not uniform for {}", g.title());
    }
    let g = dominant_game();
    let opts = TraceOptions { stable_rungs: None, ..TraceOptions::default() };
    let r = trace_lle(&g, &LambdaSchedule::default(), &opts).map_err(|e| e.to_string())?;
    let good: Vec<f64> = r.trace.iter().map(|pt| action_prob(&g, &pt.profile, 0, "good")).collect();
    ensure!(good.windows(2).all(|w| w[1] >= w[0]), "P(good) decreases somewhere: {good:?}");
    let last = *good.last().unwrap();
    ensure!(last >= 1.0 - 1e-6, "P(good) reaches only {last}");
    Ok(format!("{} rungs, P(good) {:.4} -> {last}", good.len(), good[0]))
}

const HAND_WRITTEN: &str = r#"EFG 2 R "Letter" { "Sender" "Reader" }
"hand-written sample"
p "send?" 1 1 "Sender" { "send" "keep" } 0
  c "post" 1 "" { "arrives" 7/10 "lost" 0.3 } 0
    p "R1" 2 1 "Reader: letter?" { "act" "wait" } 0
      t "" 1 "acted" { 5, 2 }
      t "" 2 "waited" { 1, 1 }
    p "R2" 2 1 "Reader: letter?" { "act" "wait" } 0
      t "" 3 "acted-blind" { -3, -1 }
      t "" 4 "waited-blind" { 0, 0 }
  t "" 5 "kept" { 0.5, 0 }
"#;

fn c9_format_fidelity() -> Outcome {
    for (file, fmt) in [
        ("game1.efg", GameFormat::Efg),
        ("game2.efg", GameFormat::Efg),
        ("game1.json", GameFormat::Json),
        ("game2.json", GameFormat::Json),
    ] {
        let text = fixture(file);
        let g = parse_game(&text, fmt).map_err(|e| format!("{file}: {e}"))?;
        ensure!(write_game(&g, fmt) == text, "{file} does not round-trip byte for byte");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..100 {
        let g = random_game(&mut rng, &SynthConfig::default());
        for fmt in [GameFormat::Efg, GameFormat::Json] {
            let text = write_game(&g, fmt);
            let back = parse_game(&text, fmt).map_err(|e| format!("game {i} {fmt:?}: {e}"))?;
            if let Some(d) = back.structural_diff(&g, true) {
                return Err(format!("game {i} {fmt:?}: {d}"));
            }
            ensure!(write_game(&back, fmt) == text, "game {i} {fmt:?}: second write differs");
        }
    }
    let g = parse_game(HAND_WRITTEN, GameFormat::Efg).map_err(|e| e.to_string())?;
    ensure!(g.num_nodes() == 9 && g.num_players() == 2, "shape {} nodes", g.num_nodes());
    let post = g.node_by_name("post").ok_or("no chance node")?;
    let storygame::game::NodeKind::Chance { probs } = &g.node(post).kind else {
        return Err("post is not a chance node".into());
    };
    ensure!(probs == &vec![Prob::new(7, 10), Prob::new(3, 10)], "chance probs {probs:?}");
    let reader = g.infoset_by_name("Reader: letter?").ok_or("no reader infoset")?;
    ensure!(g.infoset(reader).members.len() == 2, "reader infoset members {:?}", g.infoset(reader).members);
    ensure!(g.infosets().len() == 2, "{} infosets", g.infosets().len());
    let sigma = BehavioralProfile::pure_by_label(&g, &["send", "act"]).map_err(|e| e.to_string())?;
    let v = tree_value(&g, &sigma, g.root());
    ensure!((v[0] - (0.7 * 5.0 - 0.3 * 3.0)).abs() < 1e-12, "root value {v:?}");
    Ok("4 fixture files, 100 random games in both formats, hand-written sample".into())
}

fn c10_extraction() -> Outcome {
    let p = parse_probability("I would estimate it to be around 30%.").map_err(|e| e.to_string())?;
    ensure!((p - 0.30).abs() < 1e-12, "30% parsed as {p}");
    let q = parse_probability("to be around 80-90%.").map_err(|e| e.to_string())?;
    ensure!((q - 0.85).abs() < 1e-12, "80-90% parsed as {q}");
    let reply = "1. Obey her family and marry Paris (Family's preference): This is the most straightforward...\n\
                 2. Fake her own death and reunite with Romeo (Risky): This is Friar Lawrence's plan...\n\
                 3. Take her own life (Tragic): Overwhelmed by the seemingly impossible situation...";
    let opts = parse_options(reply, 3).map_err(|e| e.to_string())?;
    ensure!(
        opts == ["Obey her family and marry Paris", "Fake her own death and reunite with Romeo", "Take her own life"],
        "options {opts:?}"
    );
    let client = FixtureClient::open(&common::fixtures_dir().join("transcripts")).map_err(|e| e.to_string())?;
    let protocol: Protocol = serde_json::from_str(&fixture("protocol.json")).map_err(|e| e.to_string())?;
    let story = fixture("story.txt");
    let draft = build_draft(story.trim(), &protocol, &client).map_err(|e| e.to_string())?;
    ensure!(client.network_calls() == 0, "{} network calls", client.network_calls());
    ensure!(draft.gaps.is_empty(), "gaps {:?}", draft.gaps);
    Ok(format!("{} replayed calls, 0 network calls", client.call_log().len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("Game I equilibrium", c1_game1_equilibrium),
        ("Game II equilibrium", c2_game2_equilibrium),
        ("rationalization", c3_rationalization),
        ("Game I shape", c4_game1_shape),
        ("Game II shape", c5_game2_shape),
        ("martingale", c6_martingale),
        ("oracle equivalence", c7_oracle_equivalence),
        ("solver sanity", c8_solver_sanity),
        ("format fidelity", c9_format_fidelity),
        ("extraction parsers", c10_extraction),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let result = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or(e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
