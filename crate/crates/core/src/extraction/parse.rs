//! Deterministic parsers for free-text service replies.

use std::sync::LazyLock;

use regex::Regex;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("expected {expected} options, found {found}")]
    TooFewOptions { expected: usize, found: usize },
    #[error("no probability found")]
    NoProbabilityFound,
    #[error("no score found")]
    NoScoreFound,
}

static ITEM: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\s*(?:[-*]\s*)?(?:\*\*)?\s*([0-9]+)\s*[.):]\s*(.*)$").unwrap());

static PERCENT: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)([0-9]+(?:\.[0-9]+)?)(?:\s*%?\s*(?:-|–|to)\s*([0-9]+(?:\.[0-9]+)?))?\s*(?:%|percent\b)").unwrap()
});

static BARE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"[0-9]+(?:\.[0-9]+)?").unwrap());

const SIGNED: &str = r"[-+−]?[0-9]+(?:\.[0-9]+)?";

static SCORE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(r"(?i)between\s+({SIGNED})\s+and\s+({SIGNED})|({SIGNED})\s*(?:–|to|-)\s*({SIGNED})|({SIGNED})"))
        .unwrap()
});

fn number(s: &str) -> f64 {
    s.replace('−', "-").parse().expect("regex guarantees a number")
}

fn label_of(rest: &str) -> String {
    let rest = rest.replace("**", "");
    let cut = rest.find([':', '(']).unwrap_or(rest.len());
    rest[..cut].trim().trim_end_matches(['.', ',', ';']).trim().to_string()
}

/// A numbered item: the short label and the whole item text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub label: String,
    pub text: String,
}

/// Every numbered item (`1.`, `2)`, `3:`) in order.
pub fn parse_items(text: &str) -> Vec<Item> {
    text.lines()
        .filter_map(|line| ITEM.captures(line))
        .map(|c| Item { label: label_of(&c[2]), text: c[2].replace("**", "").trim().to_string() })
        .filter(|i| !i.label.is_empty())
        .collect()
}

/// Labels of every numbered item, each cut at its first colon or
/// parenthetical qualifier.
pub fn parse_list(text: &str) -> Vec<String> {
    parse_items(text).into_iter().map(|i| i.label).collect()
}

/// The first `k` numbered items.
pub fn parse_options(text: &str, k: usize) -> Result<Vec<String>, ParseError> {
    let mut items = parse_list(text);
    if items.len() < k {
        return Err(ParseError::TooFewOptions { expected: k, found: items.len() });
    }
    items.truncate(k);
    Ok(items)
}

/// First percentage in `[0, 100]`, as a probability; `X-Y%` gives the
/// midpoint. A bare number is accepted when no percentage token exists.
pub fn parse_probability(text: &str) -> Result<f64, ParseError> {
    for c in PERCENT.captures_iter(text) {
        let a = number(&c[1]);
        let v = match c.get(2) {
            Some(b) => (a + number(b.as_str())) / 2.0,
            None => a,
        };
        if (0.0..=100.0).contains(&v) {
            return Ok(v / 100.0);
        }
    }
    if !PERCENT.is_match(text) {
        for m in BARE.find_iter(text) {
            let v = number(m.as_str());
            if (0.0..=100.0).contains(&v) {
                return Ok(v / 100.0);
            }
        }
    }
    Err(ParseError::NoProbabilityFound)
}

/// First number (or range midpoint) in `[-100, 100]`.
pub fn parse_score(text: &str) -> Result<f64, ParseError> {
    for c in SCORE.captures_iter(text) {
        let v = if let (Some(a), Some(b)) = (c.get(1), c.get(2)) {
            (number(a.as_str()) + number(b.as_str())) / 2.0
        } else if let (Some(a), Some(b)) = (c.get(3), c.get(4)) {
            (number(a.as_str()) + number(b.as_str())) / 2.0
        } else {
            number(&c[5])
        };
        if (-100.0..=100.0).contains(&v) {
            return Ok(v);
        }
    }
    Err(ParseError::NoScoreFound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn options_with_qualifiers() {
        let text = "Here are three.\n\n1. Obey her family and marry Paris (Family's preference): keeps the peace.\n\
                    2. Fake her own death and reunite with Romeo (Risky): the potion plan.\n\
                    3. Take her own life (Tragic): the darkest path.";
        assert_eq!(
            parse_options(text, 3).unwrap(),
            vec!["Obey her family and marry Paris", "Fake her own death and reunite with Romeo", "Take her own life"]
        );
    }

    #[test]
    fn options_count_rules() {
        assert_eq!(parse_options("1. A\n2. B", 3), Err(ParseError::TooFewOptions { expected: 3, found: 2 }));
        assert_eq!(parse_options("1) A\n2) B\n3) C\n4) D", 3).unwrap(), vec!["A", "B", "C"]);
        assert_eq!(parse_options("1: A\n**2. B**: x\n- 3. C.", 3).unwrap(), vec!["A", "B", "C"]);
    }

    #[test]
    fn probabilities() {
        assert_eq!(parse_probability("I would estimate it to be around 30%."), Ok(0.30));
        assert_eq!(parse_probability("to be around 80-90%."), Ok(0.85));
        assert_eq!(parse_probability("between 0 and 100. maybe 45 percent"), Ok(0.45));
        assert_eq!(parse_probability("say 250%, no, 12.5%"), Ok(0.125));
        assert_eq!(parse_probability("70"), Ok(0.70));
        assert_eq!(parse_probability("no numbers here"), Err(ParseError::NoProbabilityFound));
    }

    #[test]
    fn scores() {
        assert_eq!(parse_score("I'd put it at -40 for Romeo."), Ok(-40.0));
        assert_eq!(parse_score("between 85 and 95"), Ok(90.0));
        assert_eq!(parse_score("score: one hundred"), Err(ParseError::NoScoreFound));
        assert_eq!(parse_score("out of 1000, about 250; call it 90"), Ok(90.0));
        assert_eq!(parse_score("roughly −100"), Ok(-100.0));
        assert_eq!(parse_score("somewhere 10-20"), Ok(15.0));
    }

    proptest! {
        #[test]
        fn rendered_percentages_round_trip(n in 0u32..=100) {
            prop_assert_eq!(parse_probability(&format!("{n}%")), Ok(n as f64 / 100.0));
        }

        #[test]
        fn parsers_are_total_and_deterministic(s in ".{0,80}") {
            prop_assert_eq!(parse_probability(&s), parse_probability(&s));
            prop_assert_eq!(parse_score(&s), parse_score(&s));
            if let Ok(p) = parse_probability(&s) {
                prop_assert!((0.0..=1.0).contains(&p));
            }
            if let Ok(v) = parse_score(&s) {
                prop_assert!((-100.0..=100.0).contains(&v));
            }
        }
    }
}
