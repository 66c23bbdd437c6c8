use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Items pulled from a numbered-list response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedList {
    /// At most `n_expected` items, in response order.
    pub items: Vec<String>,
    /// Number of non-empty numbered items present in the response.
    pub found: usize,
}

impl ParsedList {
    pub fn shortfall(&self, n_expected: usize) -> usize {
        n_expected.saturating_sub(self.items.len())
    }
}

const QUOTE_PAIRS: [(char, char); 4] = [('"', '"'), ('\'', '\''), ('“', '”'), ('‘', '’')];

fn strip_wrapping_quotes(s: &str) -> &str {
    let s = s.trim();
    for (open, close) in QUOTE_PAIRS {
        if s.chars().count() >= 2 && s.starts_with(open) && s.ends_with(close) {
            return s[open.len_utf8()..s.len() - close.len_utf8()].trim();
        }
    }
    s
}

/// Text after a line-initial `<digits>.` or `<digits>)` marker.
fn item_body(line: &str) -> Option<&str> {
    let line = line.trim_start();
    let digits = line.bytes().take_while(u8::is_ascii_digit).count();
    if digits == 0 {
        return None;
    }
    let rest = &line[digits..];
    let rest = rest.strip_prefix('.').or_else(|| rest.strip_prefix(')'))?;
    // "1.5 stars" is a number, not a marker
    if rest.starts_with(|c: char| c.is_ascii_digit()) {
        return None;
    }
    Some(rest)
}

/// Extracts numbered items, stripping markers, whitespace and symmetric
/// wrapping quotes. Fails when no item is found.
pub fn parse_numbered_list(raw: &str, n_expected: usize) -> Result<ParsedList> {
    let all: Vec<String> = raw
        .lines()
        .filter_map(item_body)
        .map(|body| strip_wrapping_quotes(body).to_string())
        .filter(|item| !item.is_empty())
        .collect();
    if all.is_empty() {
        return Err(Error::ParseFailure);
    }
    let found = all.len();
    let items = all.into_iter().take(n_expected).collect();
    Ok(ParsedList { items, found })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_list() {
        let p = parse_numbered_list("1. a\n2. b\n3. c", 5).unwrap();
        assert_eq!(p.items, vec!["a", "b", "c"]);
        assert_eq!(p.found, 3);
        assert_eq!(p.shortfall(5), 2);
    }

    #[test]
    fn unnumbered_text_fails() {
        assert!(matches!(
            parse_numbered_list("Sure! Here's advice on handling sarcasm...", 5),
            Err(Error::ParseFailure)
        ));
        assert!(parse_numbered_list("", 5).is_err());
    }

    #[test]
    fn markers_quotes_and_preamble() {
        let raw = "Here you go:\n\n1) 'one'\n  2. “two”\n3.5 stars is not an item\n4. \"\"\n5. \"five \"\nThanks!";
        let p = parse_numbered_list(raw, 10).unwrap();
        assert_eq!(p.items, vec!["one", "two", "five"]);
    }

    #[test]
    fn truncates_to_expected() {
        let raw = (1..=7).map(|i| format!("{i}. item {i}")).collect::<Vec<_>>().join("\n");
        let p = parse_numbered_list(&raw, 5).unwrap();
        assert_eq!(p.items.len(), 5);
        assert_eq!(p.found, 7);
    }
}
