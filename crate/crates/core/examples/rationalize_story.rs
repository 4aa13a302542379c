//! Asks which game explains the play as written: the story's path must have
//! positive probability under the game's equilibrium.

use storygame::narrative::fixtures::{actual_story_game1, actual_story_game2};
use storygame::narrative::{
    rationalization, romeo_juliet_game1, romeo_juliet_game2, story_path, RATIONALIZE_TOL,
};
use storygame::qre::{trace_lle, LambdaSchedule, TraceOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [(romeo_juliet_game1(), actual_story_game1()), (romeo_juliet_game2(), actual_story_game2())];
    for (g, story) in cases {
        let sigma = trace_lle(&g, &LambdaSchedule::default(), &TraceOptions::default())?.profile;
        let path = story_path(&g, &story)?;
        let r = rationalization(&g, &sigma, &path, RATIONALIZE_TOL)?;
        println!(
            "{}: {} -> rationalized {} (path probability {:.4})",
            g.title(),
            story.actions.join(" > "),
            r.rationalized,
            r.path_probability
        );
    }
    Ok(())
}
