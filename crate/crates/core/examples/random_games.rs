//! Generates seeded random games and checks the value function against a
//! forward Monte-Carlo simulation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use storygame::eval::{simulate_root_value, value_function};
use storygame::synth::{random_game, random_interior_profile, SynthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(42);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..5 {
        let g = random_game(&mut rng, &SynthConfig::default());
        let sigma = random_interior_profile(&g, &mut rng);
        let exact = value_function(&g, &sigma)?;
        let mc = simulate_root_value(&g, &sigma, 20_000, &mut rng)?;
        println!(
            "game {i}: {} nodes, {} infosets, root {:?}, simulated {:?} (se {:?})",
            g.num_nodes(),
            g.infosets().len(),
            exact.at(g.root()),
            mc.mean,
            mc.std_err
        );
    }
    Ok(())
}
