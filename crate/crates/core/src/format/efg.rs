//! Reader and writer for the `.efg` extensive-form text format.
//!
//! ```text
//! EFG 2 R "title" { "P1" "P2" }
//! "optional comment"
//! c "name" 1 "" { "left" 1/2 "right" 0.5 } 0
//! p "name" 1 1 "iset" { "a" "b" } 0
//! t "name" 1 "outcome" { 1, -1 }
//! ```
//!
//! Records appear in depth-first pre-order; each non-terminal is followed
//! immediately by its children. Players and infoset numbers are 1-based and
//! infosets are numbered per player. Outcome `0` means no outcome.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::game::{build_game, Game, GameError, GameSpec, Issue, NodeKind, NodeSpec};
use crate::prob::Prob;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EfgError {
    #[error("line {line}, column {column}: expected {expected}")]
    Syntax { line: usize, column: usize, expected: String },
    #[error("line {line}: {message}")]
    Semantic { line: usize, message: String },
    #[error("line {line}: chance probabilities do not sum to 1")]
    Normalization { line: usize },
    #[error(transparent)]
    Invalid(GameError),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Str(String),
    Num(String),
    Word(String),
    Open,
    Close,
    Comma,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, EfgError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);
    let bump = |c: char, line: &mut usize, column: &mut usize| {
        if c == '\n' {
            *line += 1;
            *column = 1;
        } else {
            *column += 1;
        }
    };
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        if c.is_whitespace() {
            chars.next();
            bump(c, &mut line, &mut column);
            continue;
        }
        let tok = match c {
            '{' | '}' | ',' => {
                chars.next();
                bump(c, &mut line, &mut column);
                match c {
                    '{' => Tok::Open,
                    '}' => Tok::Close,
                    _ => Tok::Comma,
                }
            }
            '"' => {
                chars.next();
                bump(c, &mut line, &mut column);
                let mut s = String::new();
                loop {
                    let Some(ch) = chars.next() else {
                        return Err(EfgError::Syntax {
                            line,
                            column,
                            expected: "closing quote".into(),
                        });
                    };
                    bump(ch, &mut line, &mut column);
                    match ch {
                        '"' => break,
                        '\\' => {
                            let Some(esc) = chars.next() else { continue };
                            bump(esc, &mut line, &mut column);
                            s.push(esc);
                        }
                        _ => s.push(ch),
                    }
                }
                Tok::Str(s)
            }
            c if c.is_ascii_digit() || matches!(c, '-' | '+' | '.') => {
                let mut s = String::new();
                while let Some(&ch) = chars.peek() {
                    if ch.is_ascii_alphanumeric() || matches!(ch, '-' | '+' | '.' | '/') {
                        s.push(ch);
                        chars.next();
                        bump(ch, &mut line, &mut column);
                    } else {
                        break;
                    }
                }
                Tok::Num(s)
            }
            c if c.is_alphabetic() => {
                let mut s = String::new();
                while let Some(&ch) = chars.peek() {
                    if ch.is_alphanumeric() || ch == '_' {
                        s.push(ch);
                        chars.next();
                        bump(ch, &mut line, &mut column);
                    } else {
                        break;
                    }
                }
                Tok::Word(s)
            }
            _ => {
                return Err(EfgError::Syntax { line, column, expected: "a token".into() });
            }
        };
        out.push(Token { tok, line: l, column: col });
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
    players: usize,
    decision_isets: HashMap<(usize, usize), Vec<String>>,
    chance_isets: HashMap<usize, Vec<(String, Prob)>>,
    outcomes: HashMap<usize, (String, Vec<f64>)>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|t| (t.line, t.column)).unwrap_or(self.end)
    }

    fn fail<T>(&self, expected: &str) -> Result<T, EfgError> {
        let (line, column) = self.here();
        Err(EfgError::Syntax { line, column, expected: expected.into() })
    }

    fn semantic<T>(&self, line: usize, message: impl Into<String>) -> Result<T, EfgError> {
        Err(EfgError::Semantic { line, message: message.into() })
    }

    fn next_if(&mut self, want: &Tok) -> bool {
        if self.peek() == Some(want) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), EfgError> {
        if self.next_if(&want) {
            Ok(())
        } else {
            self.fail(what)
        }
    }

    fn string(&mut self, what: &str) -> Result<String, EfgError> {
        match self.peek() {
            Some(Tok::Str(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.fail(what),
        }
    }

    fn raw_number(&mut self, what: &str) -> Result<String, EfgError> {
        match self.peek() {
            Some(Tok::Num(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.fail(what),
        }
    }

    fn index(&mut self, what: &str) -> Result<usize, EfgError> {
        let (line, column) = self.here();
        let s = self.raw_number(what)?;
        s.parse().map_err(|_| EfgError::Syntax { line, column, expected: what.into() })
    }

    fn real(&mut self, what: &str) -> Result<f64, EfgError> {
        let (line, column) = self.here();
        let s = self.raw_number(what)?;
        let err = || EfgError::Syntax { line, column, expected: what.into() };
        if s.contains('/') {
            s.parse::<Prob>().map(|p| p.to_f64()).map_err(|_| err())
        } else {
            s.parse::<f64>().map_err(|_| err())
        }
    }

    fn prob(&mut self) -> Result<Prob, EfgError> {
        let (line, column) = self.here();
        let s = self.raw_number("a probability")?;
        s.parse().map_err(|_| EfgError::Syntax { line, column, expected: "a probability".into() })
    }

    fn header(&mut self) -> Result<(String, Vec<String>, Option<String>), EfgError> {
        if !self.next_if(&Tok::Word("EFG".into())) {
            return self.fail("`EFG`");
        }
        if !self.next_if(&Tok::Num("2".into())) {
            return self.fail("format version `2`");
        }
        if !(self.next_if(&Tok::Word("R".into())) || self.next_if(&Tok::Word("D".into()))) {
            return self.fail("`R`");
        }
        let title = self.string("game title")?;
        self.expect(Tok::Open, "`{` before player names")?;
        let mut players = Vec::new();
        while let Some(Tok::Str(_)) = self.peek() {
            players.push(self.string("player name")?);
        }
        self.expect(Tok::Close, "`}` after player names")?;
        let comment = match self.peek() {
            Some(Tok::Str(_)) => Some(self.string("comment")?),
            _ => None,
        };
        Ok((title, players, comment))
    }

    fn payoffs(&mut self) -> Result<Vec<f64>, EfgError> {
        self.expect(Tok::Open, "`{` before payoffs")?;
        let mut v = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::Close) => {
                    self.pos += 1;
                    return Ok(v);
                }
                Some(Tok::Comma) => self.pos += 1,
                Some(Tok::Num(_)) => v.push(self.real("a payoff")?),
                _ => return self.fail("a payoff or `}`"),
            }
        }
    }

    /// `<outcome#> [ "<name>" ] [ { payoffs } ]`, resolved against earlier
    /// definitions of the same outcome number.
    fn outcome(&mut self, line: usize) -> Result<Option<(String, Vec<f64>)>, EfgError> {
        let k = self.index("outcome number")?;
        let name = match self.peek() {
            Some(Tok::Str(_)) => Some(self.string("outcome name")?),
            _ => None,
        };
        let payoffs = match self.peek() {
            Some(Tok::Open) => Some(self.payoffs()?),
            _ => None,
        };
        if k == 0 {
            if payoffs.is_some() {
                return self.semantic(line, "payoffs given for outcome 0");
            }
            return Ok(None);
        }
        match (payoffs, self.outcomes.get(&k)) {
            (Some(p), _) => {
                if p.len() != self.players {
                    return self.semantic(
                        line,
                        format!("outcome {k} has {} payoffs for {} players", p.len(), self.players),
                    );
                }
                let name = name.unwrap_or_default();
                self.outcomes.insert(k, (name.clone(), p.clone()));
                Ok(Some((name, p)))
            }
            (None, Some(prev)) => Ok(Some(prev.clone())),
            (None, None) => self.semantic(line, format!("outcome {k} used before its payoffs are given")),
        }
    }

    fn no_internal_outcome(&mut self, line: usize) -> Result<(), EfgError> {
        if let Some((_, p)) = self.outcome(line)? {
            if p.iter().any(|x| *x != 0.0) {
                return self.semantic(
                    line,
                    "payoffs at non-terminal nodes are not supported; move them to the leaves",
                );
            }
        }
        Ok(())
    }

    fn node(&mut self) -> Result<NodeSpec, EfgError> {
        let (line, _) = self.here();
        let kind = match self.peek() {
            Some(Tok::Word(w)) if matches!(w.as_str(), "c" | "p" | "t") => w.clone(),
            _ => return self.fail("a node record (`c`, `p` or `t`)"),
        };
        self.pos += 1;
        let name = self.string("node name")?;
        match kind.as_str() {
            "t" => {
                let (outcome, payoffs) = match self.outcome(line)? {
                    Some(o) => o,
                    None => (String::new(), vec![0.0; self.players]),
                };
                Ok(NodeSpec::Terminal { name, outcome, payoffs })
            }
            "c" => {
                let iset = self.index("chance infoset number")?;
                if let Some(Tok::Str(_)) = self.peek() {
                    self.string("infoset name")?;
                }
                let branches = if self.next_if(&Tok::Open) {
                    let mut b = Vec::new();
                    while let Some(Tok::Str(_)) = self.peek() {
                        let label = self.string("branch label")?;
                        let p = self.prob()?;
                        b.push((label, p));
                    }
                    self.expect(Tok::Close, "`}` after chance branches")?;
                    if Prob::sum(b.iter().map(|(_, p)| p)) != Prob::one() {
                        return Err(EfgError::Normalization { line });
                    }
                    self.chance_isets.insert(iset, b.clone());
                    b
                } else {
                    match self.chance_isets.get(&iset) {
                        Some(b) => b.clone(),
                        None => return self.fail("`{` with chance branches"),
                    }
                };
                self.no_internal_outcome(line)?;
                let mut out = Vec::with_capacity(branches.len());
                for (label, p) in branches {
                    let child = self.node()?;
                    out.push((label, p, child));
                }
                Ok(NodeSpec::Chance { name, branches: out })
            }
            _ => {
                let player = self.index("player number")?;
                if player == 0 || player > self.players {
                    return self.semantic(line, format!("player {player} out of range"));
                }
                let iset = self.index("infoset number")?;
                let iset_name = match self.peek() {
                    Some(Tok::Str(_)) => Some(self.string("infoset name")?),
                    _ => None,
                };
                let labels = if self.next_if(&Tok::Open) {
                    let mut l = Vec::new();
                    while let Some(Tok::Str(_)) = self.peek() {
                        l.push(self.string("action label")?);
                    }
                    self.expect(Tok::Close, "`}` after action labels")?;
                    self.decision_isets.entry((player, iset)).or_insert_with(|| l.clone());
                    l
                } else {
                    match self.decision_isets.get(&(player, iset)) {
                        Some(l) => l.clone(),
                        None => return self.fail("`{` with action labels"),
                    }
                };
                if labels.is_empty() {
                    return self.semantic(line, "decision node without actions");
                }
                self.no_internal_outcome(line)?;
                let mut actions = Vec::with_capacity(labels.len());
                for label in labels {
                    let child = self.node()?;
                    actions.push((label, child));
                }
                Ok(NodeSpec::Decision {
                    name,
                    player: player - 1,
                    infoset: format!("{player}:{iset}"),
                    infoset_name: iset_name,
                    actions,
                })
            }
        }
    }
}

/// Parses `.efg` text into a validated game.
pub fn parse_efg(text: &str) -> Result<Game, EfgError> {
    let toks = tokenize(text)?;
    let end = text.lines().count().max(1);
    let mut p = Parser {
        toks,
        pos: 0,
        end: (end, 1),
        players: 0,
        decision_isets: HashMap::new(),
        chance_isets: HashMap::new(),
        outcomes: HashMap::new(),
    };
    let (title, players, comment) = p.header()?;
    p.players = players.len();
    let root = p.node()?;
    if p.pos != p.toks.len() {
        return p.fail("end of input after the last node record");
    }
    build_game(GameSpec { title, comment, players, root, annotations: None }).map_err(|e| {
        let normalization = e
            .issues()
            .iter()
            .any(|i| matches!(i, Issue::ChanceProbsNotNormalized { .. }));
        if normalization {
            EfgError::Normalization { line: 0 }
        } else {
            EfgError::Invalid(e)
        }
    })
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

/// Deterministic `.efg` text for `g`, one record per line in pre-order.
pub fn write_efg(g: &Game) -> String {
    let mut out = String::new();
    let names: Vec<String> = g.players().iter().map(|p| quote(&p.name)).collect();
    let _ = writeln!(out, "EFG 2 R {} {{ {} }}", quote(g.title()), names.join(" "));
    if let Some(c) = g.comment() {
        let _ = writeln!(out, "{}", quote(c));
    }
    // Per-player 1-based infoset numbering, by first appearance.
    let mut iset_number = vec![0usize; g.infosets().len()];
    let mut counts = vec![0usize; g.num_players()];
    for iset in g.infosets() {
        counts[iset.owner] += 1;
        iset_number[iset.id] = counts[iset.owner];
    }
    let (mut chance_no, mut outcome_no) = (0usize, 0usize);
    for &id in g.preorder() {
        let node = g.node(id);
        match &node.kind {
            NodeKind::Terminal { outcome, payoffs } => {
                outcome_no += 1;
                let pay: Vec<String> = payoffs.iter().map(|x| format!("{x}")).collect();
                let _ = writeln!(
                    out,
                    "t {} {} {} {{ {} }}",
                    quote(&node.name),
                    outcome_no,
                    quote(outcome),
                    pay.join(", ")
                );
            }
            NodeKind::Chance { probs } => {
                chance_no += 1;
                let branches: Vec<String> = node
                    .children
                    .iter()
                    .zip(probs)
                    .map(|(e, p)| format!("{} {}", quote(&e.label), p))
                    .collect();
                let _ = writeln!(
                    out,
                    "c {} {} \"\" {{ {} }} 0",
                    quote(&node.name),
                    chance_no,
                    branches.join(" ")
                );
            }
            NodeKind::Decision { player, infoset } => {
                let labels: Vec<String> = node.children.iter().map(|e| quote(&e.label)).collect();
                let _ = writeln!(
                    out,
                    "p {} {} {} {} {{ {} }} 0",
                    quote(&node.name),
                    player + 1,
                    iset_number[*infoset],
                    quote(&g.infoset(*infoset).name),
                    labels.join(" ")
                );
            }
        }
    }
    out
}
