//! Native JSON game format (`"schema": 1`).
//!
//! ```json
//! {
//!   "schema": 1,
//!   "title": "...",
//!   "players": ["Romeo", "Juliet"],
//!   "annotations": { ... },
//!   "root": {
//!     "kind": "chance", "name": "A",
//!     "branches": [ { "label": "grief", "prob": "17/20", "child": { ... } } ]
//!   }
//! }
//! ```
//!
//! Decision nodes carry `player` (name or 0-based index), an `infoset` key
//! shared by all members, and `actions: [{label, child}]`. Terminals carry
//! `payoffs` and an optional `outcome` name. `annotations` is free-form and
//! ignored by the solvers.

use std::collections::HashSet;

use serde_json::{json, Map, Value};

use crate::game::{build_game, Game, GameError, GameSpec, NodeKind, NodeSpec};
use crate::prob::Prob;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Syntax(String),
    #[error("schema error at `{pointer}`: {message}")]
    Schema { pointer: String, message: String },
    #[error(transparent)]
    Invalid(GameError),
}

fn schema<T>(pointer: &str, message: impl Into<String>) -> Result<T, JsonError> {
    Err(JsonError::Schema { pointer: pointer.to_string(), message: message.into() })
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, at: &str) -> Result<&'a Value, JsonError> {
    obj.get(key).map_or_else(|| schema(at, format!("missing field `{key}`")), Ok)
}

fn opt_str(obj: &Map<String, Value>, key: &str, at: &str) -> Result<String, JsonError> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(String::new()),
        Some(Value::String(s)) => Ok(s.clone()),
        Some(_) => schema(&format!("{at}/{key}"), "expected a string"),
    }
}

fn as_object<'a>(v: &'a Value, at: &str) -> Result<&'a Map<String, Value>, JsonError> {
    v.as_object().map_or_else(|| schema(at, "expected an object"), Ok)
}

fn as_array<'a>(v: &'a Value, at: &str) -> Result<&'a Vec<Value>, JsonError> {
    v.as_array().map_or_else(|| schema(at, "expected an array"), Ok)
}

struct Reader<'a> {
    players: &'a [String],
}

impl Reader<'_> {
    fn node(&self, v: &Value, at: &str) -> Result<NodeSpec, JsonError> {
        let obj = as_object(v, at)?;
        let kind = field(obj, "kind", at)?
            .as_str()
            .map_or_else(|| schema(&format!("{at}/kind"), "expected a string"), Ok)?;
        let name = opt_str(obj, "name", at)?;
        match kind {
            "terminal" => {
                let p_at = format!("{at}/payoffs");
                let arr = as_array(field(obj, "payoffs", at)?, &p_at)?;
                if arr.len() != self.players.len() {
                    return schema(
                        &p_at,
                        format!("{} payoffs for {} players", arr.len(), self.players.len()),
                    );
                }
                let payoffs = arr
                    .iter()
                    .enumerate()
                    .map(|(i, x)| {
                        x.as_f64().map_or_else(|| schema(&format!("{p_at}/{i}"), "expected a number"), Ok)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let outcome = opt_str(obj, "outcome", at)?;
                Ok(NodeSpec::Terminal { name, outcome, payoffs })
            }
            "chance" => {
                let b_at = format!("{at}/branches");
                let arr = as_array(field(obj, "branches", at)?, &b_at)?;
                let mut branches = Vec::with_capacity(arr.len());
                for (i, b) in arr.iter().enumerate() {
                    let here = format!("{b_at}/{i}");
                    let bo = as_object(b, &here)?;
                    let label = opt_str(bo, "label", &here)?;
                    let prob_at = format!("{here}/prob");
                    let prob: Prob = match field(bo, "prob", &here)? {
                        Value::String(s) => s.parse().map_err(|_| JsonError::Schema {
                            pointer: prob_at.clone(),
                            message: format!("invalid probability `{s}`"),
                        })?,
                        Value::Number(n) => n.to_string().parse().map_err(|_| JsonError::Schema {
                            pointer: prob_at.clone(),
                            message: "invalid probability".into(),
                        })?,
                        _ => return schema(&prob_at, "expected a number or a string like \"3/10\""),
                    };
                    let child = self.node(field(bo, "child", &here)?, &format!("{here}/child"))?;
                    branches.push((label, prob, child));
                }
                Ok(NodeSpec::Chance { name, branches })
            }
            "decision" => {
                let pl_at = format!("{at}/player");
                let player = match field(obj, "player", at)? {
                    Value::String(s) => match self.players.iter().position(|p| p == s) {
                        Some(i) => i,
                        None => return schema(&pl_at, format!("unknown player `{s}`")),
                    },
                    Value::Number(n) => match n.as_u64() {
                        Some(i) if (i as usize) < self.players.len() => i as usize,
                        _ => return schema(&pl_at, "player index out of range"),
                    },
                    _ => return schema(&pl_at, "expected a player name or index"),
                };
                let infoset = match field(obj, "infoset", at)? {
                    Value::String(s) => s.clone(),
                    Value::Number(n) => n.to_string(),
                    _ => return schema(&format!("{at}/infoset"), "expected a string key"),
                };
                let infoset_name = match obj.get("infoset_name") {
                    None | Some(Value::Null) => None,
                    Some(Value::String(s)) => Some(s.clone()),
                    Some(_) => return schema(&format!("{at}/infoset_name"), "expected a string"),
                };
                let a_at = format!("{at}/actions");
                let arr = as_array(field(obj, "actions", at)?, &a_at)?;
                let mut actions = Vec::with_capacity(arr.len());
                for (i, a) in arr.iter().enumerate() {
                    let here = format!("{a_at}/{i}");
                    let ao = as_object(a, &here)?;
                    let label = opt_str(ao, "label", &here)?;
                    let child = self.node(field(ao, "child", &here)?, &format!("{here}/child"))?;
                    actions.push((label, child));
                }
                Ok(NodeSpec::Decision { name, player, infoset, infoset_name, actions })
            }
            other => schema(&format!("{at}/kind"), format!("unknown node kind `{other}`")),
        }
    }
}

/// Reads the JSON document into a [`GameSpec`] without building the game.
pub fn parse_json_spec(text: &str) -> Result<GameSpec, JsonError> {
    let v: Value = serde_json::from_str(text).map_err(|e| JsonError::Syntax(e.to_string()))?;
    let obj = as_object(&v, "")?;
    match obj.get("schema") {
        None => {}
        Some(s) if s.as_u64() == Some(SCHEMA_VERSION) => {}
        Some(_) => return schema("/schema", format!("unsupported schema version (expected {SCHEMA_VERSION})")),
    }
    let players = as_array(field(obj, "players", "")?, "/players")?
        .iter()
        .enumerate()
        .map(|(i, p)| {
            p.as_str()
                .map(str::to_string)
                .map_or_else(|| schema(&format!("/players/{i}"), "expected a string"), Ok)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let title = opt_str(obj, "title", "")?;
    let comment = match obj.get("comment") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return schema("/comment", "expected a string"),
    };
    let annotations = obj.get("annotations").cloned();
    let root = Reader { players: &players }.node(field(obj, "root", "")?, "/root")?;
    Ok(GameSpec { title, comment, players, root, annotations })
}

pub fn parse_json(text: &str) -> Result<Game, JsonError> {
    build_game(parse_json_spec(text)?).map_err(JsonError::Invalid)
}

pub fn game_to_value(g: &Game) -> Value {
    // Infoset keys: the names when they are unique and non-empty, otherwise
    // positional keys with the name carried alongside.
    let mut seen = HashSet::new();
    let names_usable = g
        .infosets()
        .iter()
        .all(|i| !i.name.is_empty() && seen.insert(i.name.as_str()));

    fn node(g: &Game, id: usize, names_usable: bool) -> Value {
        let n = g.node(id);
        let mut m = Map::new();
        match &n.kind {
            NodeKind::Terminal { outcome, payoffs } => {
                m.insert("kind".into(), json!("terminal"));
                if !n.name.is_empty() {
                    m.insert("name".into(), json!(n.name));
                }
                if !outcome.is_empty() {
                    m.insert("outcome".into(), json!(outcome));
                }
                m.insert("payoffs".into(), json!(payoffs));
            }
            NodeKind::Chance { probs } => {
                m.insert("kind".into(), json!("chance"));
                if !n.name.is_empty() {
                    m.insert("name".into(), json!(n.name));
                }
                let branches: Vec<Value> = n
                    .children
                    .iter()
                    .zip(probs)
                    .map(|(e, p)| {
                        json!({
                            "label": e.label,
                            "prob": p.to_string(),
                            "child": node(g, e.child, names_usable),
                        })
                    })
                    .collect();
                m.insert("branches".into(), Value::Array(branches));
            }
            NodeKind::Decision { player, infoset } => {
                m.insert("kind".into(), json!("decision"));
                if !n.name.is_empty() {
                    m.insert("name".into(), json!(n.name));
                }
                m.insert("player".into(), json!(g.players()[*player].name));
                let iset = g.infoset(*infoset);
                if names_usable {
                    m.insert("infoset".into(), json!(iset.name));
                } else {
                    m.insert("infoset".into(), json!(format!("I{}", infoset + 1)));
                    if !iset.name.is_empty() {
                        m.insert("infoset_name".into(), json!(iset.name));
                    }
                }
                let actions: Vec<Value> = n
                    .children
                    .iter()
                    .map(|e| json!({ "label": e.label, "child": node(g, e.child, names_usable) }))
                    .collect();
                m.insert("actions".into(), Value::Array(actions));
            }
        }
        Value::Object(m)
    }

    let mut doc = Map::new();
    doc.insert("schema".into(), json!(SCHEMA_VERSION));
    doc.insert("title".into(), json!(g.title()));
    if let Some(c) = g.comment() {
        doc.insert("comment".into(), json!(c));
    }
    let players: Vec<&str> = g.players().iter().map(|p| p.name.as_str()).collect();
    doc.insert("players".into(), json!(players));
    if let Some(a) = g.annotations() {
        doc.insert("annotations".into(), a.clone());
    }
    doc.insert("root".into(), node(g, g.root(), names_usable));
    Value::Object(doc)
}

/// Pretty-printed JSON with a trailing newline; deterministic.
pub fn write_json(g: &Game) -> String {
    let mut s = serde_json::to_string_pretty(&game_to_value(g)).expect("game serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document() {
        let g = parse_json(r#"{"players":["R","J"],"root":{"kind":"terminal","payoffs":[0,0]}}"#).unwrap();
        assert_eq!(g.num_nodes(), 1);
        assert_eq!(g.num_players(), 2);
    }

    #[test]
    fn wrong_payoff_length_points_at_field() {
        let err = parse_json(
            r#"{"players":["R","J"],"root":{"kind":"chance","branches":[
                {"label":"a","prob":"1/2","child":{"kind":"terminal","payoffs":[0,0]}},
                {"label":"b","prob":0.5,"child":{"kind":"terminal","payoffs":[0]}}]}}"#,
        )
        .unwrap_err();
        match err {
            JsonError::Schema { pointer, .. } => assert_eq!(pointer, "/root/branches/1/child/payoffs"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_player_and_kind() {
        let err = parse_json(
            r#"{"players":["R"],"root":{"kind":"decision","player":"Q","infoset":"i","actions":[]}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, JsonError::Schema { ref pointer, .. } if pointer == "/root/player"));
        let err = parse_json(r#"{"players":["R"],"root":{"kind":"leaf"}}"#).unwrap_err();
        assert!(matches!(err, JsonError::Schema { ref pointer, .. } if pointer == "/root/kind"));
        let err = parse_json(r#"{"schema":2,"players":["R"],"root":{"kind":"terminal","payoffs":[1]}}"#)
            .unwrap_err();
        assert!(matches!(err, JsonError::Schema { ref pointer, .. } if pointer == "/schema"));
    }

    #[test]
    fn annotations_survive() {
        let text = r#"{"schema":1,"title":"x","players":["R"],"annotations":{"story":["a"]},
            "root":{"kind":"decision","player":0,"infoset":"only","actions":[
              {"label":"a","child":{"kind":"terminal","payoffs":[1]}}]}}"#;
        let g = parse_json(text).unwrap();
        assert_eq!(g.annotations().unwrap()["story"][0], "a");
        let again = parse_json(&write_json(&g)).unwrap();
        assert_eq!(again.annotations(), g.annotations());
        assert!(again.structurally_eq(&g));
        assert_eq!(again.infoset(0).name, "only");
    }
}
