//! Runs the elicitation protocol against a live generation endpoint.
//!
//! Usage: `cargo run --example extract_http -- <endpoint> [model]` with the
//! credential in `STORYGAME_API_KEY`. Replies are saved as replayable pairs
//! under `target/transcripts`.

use storygame::extraction::romeo_juliet::{protocol, story_context};
use storygame::extraction::{build_draft, write_pairs, HttpClient, HttpConfig, RecordingClient, API_KEY_ENV};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let Some(endpoint) = std::env::args().nth(1) else {
        eprintln!("usage: extract_http <endpoint> [model]  (reads ${API_KEY_ENV})");
        return Ok(());
    };
    let model = std::env::args().nth(2).unwrap_or_default();
    let client = RecordingClient::new(HttpClient::new(HttpConfig::new(endpoint, model)));
    let result = build_draft(story_context(), &protocol(), &client);
    let saved = write_pairs(std::path::Path::new("target/transcripts"), &client.pairs())?;
    println!("saved {} pairs", saved.len());
    print!("{}", result?.to_json());
    Ok(())
}
