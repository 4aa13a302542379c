//! Builds the reduced normal form of Game II, lists its pure equilibria and
//! checks each one with the behavioral best-response test.

use storygame::eval::{enumerate_pure_nash, to_normal_form, verify_nash};
use storygame::narrative::romeo_juliet_game2;
use storygame::tolerance::{ENUMERATION_BUDGET, NASH_GAIN};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = romeo_juliet_game2();
    let nf = to_normal_form(&g, ENUMERATION_BUDGET)?;
    println!("{nf}");
    for (p, strats) in nf.strategies.iter().enumerate() {
        let names: Vec<String> = strats.iter().map(|s| s.describe(&g)).collect();
        println!("  {}: {}", g.players()[p].name, names.join(" | "));
    }
    for prof in enumerate_pure_nash(&nf) {
        let sigma = nf.behavioral_from_pure(&g, &prof);
        let check = verify_nash(&g, &sigma, NASH_GAIN)?;
        println!(
            "equilibrium {} payoffs {:?} verified {}",
            nf.describe_profile(&g, &prof),
            nf.payoff(&prof),
            check.is_eps_nash
        );
    }
    Ok(())
}
