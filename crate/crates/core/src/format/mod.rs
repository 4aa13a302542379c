//! Game file formats: `.efg` text and native JSON.

mod efg;
mod json;

pub use efg::{parse_efg, write_efg, EfgError};
pub use json::{game_to_value, parse_json, parse_json_spec, write_json, JsonError, SCHEMA_VERSION};

use crate::game::Game;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameFormat {
    Efg,
    Json,
}

impl GameFormat {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &std::path::Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "efg" => Some(GameFormat::Efg),
            "json" => Some(GameFormat::Json),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FormatError {
    #[error(transparent)]
    Efg(#[from] EfgError),
    #[error(transparent)]
    Json(#[from] JsonError),
}

pub fn parse_game(text: &str, format: GameFormat) -> Result<Game, FormatError> {
    Ok(match format {
        GameFormat::Efg => parse_efg(text)?,
        GameFormat::Json => parse_json(text)?,
    })
}

pub fn write_game(g: &Game, format: GameFormat) -> String {
    match format {
        GameFormat::Efg => write_efg(g),
        GameFormat::Json => write_json(g),
    }
}
