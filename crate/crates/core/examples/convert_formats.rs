//! Reads a game in either format and prints it in the other. Defaults to
//! the shipped Game II file.

use std::path::PathBuf;

use storygame::format::{parse_game, write_game, GameFormat};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/game2.efg"));
    let from = GameFormat::from_path(&path).ok_or("expected a .efg or .json file")?;
    let g = parse_game(&std::fs::read_to_string(&path)?, from)?;
    let to = match from {
        GameFormat::Efg => GameFormat::Json,
        GameFormat::Json => GameFormat::Efg,
    };
    let text = write_game(&g, to);
    let back = parse_game(&text, to)?;
    assert!(back.structural_diff(&g, true).is_none());
    print!("{text}");
    Ok(())
}
