//! Replays the recorded elicitation transcripts, compiles the draft with the
//! topology hints and compares the result with the hand-built Game II.

use std::path::PathBuf;

use storygame::extraction::{build_draft, compile_draft, FixtureClient, GenerationClient, Protocol, TopologyHints};
use storygame::format::{write_game, GameFormat};
use storygame::narrative::romeo_juliet_game2;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let story = std::fs::read_to_string(dir.join("story.txt"))?;
    let protocol: Protocol = serde_json::from_str(&std::fs::read_to_string(dir.join("protocol.json"))?)?;
    let hints = TopologyHints::from_json(&std::fs::read_to_string(dir.join("game2_hints.json"))?)?;

    let client = FixtureClient::open(&dir.join("transcripts"))?;
    let draft = build_draft(story.trim(), &protocol, &client)?;
    println!("{} calls replayed, {} over the network", client.call_log().len(), client.network_calls());
    for c in &draft.chances {
        println!("chance {}: {:?}", c.id, c.probability);
    }
    let compiled = compile_draft(&draft, &hints)?;
    println!("{} numbers traced to a reply", compiled.sources.len());
    match compiled.game.structural_diff(&romeo_juliet_game2(), true) {
        None => println!("matches the hand-built game"),
        Some(d) => println!("differs: {d}"),
    }
    print!("{}", write_game(&compiled.game, GameFormat::Efg));
    Ok(())
}
