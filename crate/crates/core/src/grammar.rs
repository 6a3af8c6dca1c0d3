//! Strict classifier for raw language-model output.
//!
//! A reply is a valid command only when, after trimming outer ASCII
//! whitespace, the whole remainder is exactly one `Turn(<num>);` or
//! `Move(<num>);` statement with an in-range argument. `<num>` is a plain
//! decimal: optional sign, digits, optional fraction, no exponent.
//! Anything else is rejected with a reason; nothing is repaired.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Yaw command limit in degrees (inclusive, symmetric).
pub const MAX_TURN_DEG: f64 = 90.0;
/// Translation limit in meters (inclusive, symmetric).
pub const MAX_MOVE_M: f64 = 3.0;

const KEYWORDS: [&str; 2] = ["Turn", "Move"];

/// One motion primitive. Positive `theta` yaws right (clockwise).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Action {
    Turn { theta: f64 },
    Move { distance: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("{0} is outside the allowed range")]
pub struct OutOfRange(pub Action);

impl Action {
    pub fn turn(theta: f64) -> Result<Self, OutOfRange> {
        Self::Turn { theta }.checked()
    }

    pub fn move_by(distance: f64) -> Result<Self, OutOfRange> {
        Self::Move { distance }.checked()
    }

    pub fn in_range(&self) -> bool {
        match *self {
            Action::Turn { theta } => theta.abs() <= MAX_TURN_DEG,
            Action::Move { distance } => distance.abs() <= MAX_MOVE_M,
        }
    }

    fn checked(self) -> Result<Self, OutOfRange> {
        if self.in_range() {
            Ok(self)
        } else {
            Err(OutOfRange(self))
        }
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            Action::Turn { .. } => "Turn",
            Action::Move { .. } => "Move",
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            Action::Turn { theta } => theta,
            Action::Move { distance } => distance,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&canonicalize(self))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InvalidReason {
    ExtraneousText,
    Malformed,
    OutOfRange,
    NotANumber,
    Empty,
}

impl InvalidReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::ExtraneousText => "ExtraneousText",
            Self::Malformed => "Malformed",
            Self::OutOfRange => "OutOfRange",
            Self::NotANumber => "NotANumber",
            Self::Empty => "Empty",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum ParseResult {
    Valid { action: Action, canonical_text: String },
    Invalid { reason: InvalidReason, detail: String },
}

impl ParseResult {
    pub fn is_valid(&self) -> bool {
        matches!(self, ParseResult::Valid { .. })
    }

    pub fn action(&self) -> Option<Action> {
        match self {
            ParseResult::Valid { action, .. } => Some(*action),
            ParseResult::Invalid { .. } => None,
        }
    }

    /// `"Valid"` or the invalid reason name.
    pub fn label(&self) -> &'static str {
        match self {
            ParseResult::Valid { .. } => "Valid",
            ParseResult::Invalid { reason, .. } => reason.as_str(),
        }
    }

    fn invalid(reason: InvalidReason, detail: impl Into<String>) -> Self {
        ParseResult::Invalid { reason, detail: detail.into() }
    }
}

/// Shortest decimal text that parses back to the same action.
pub fn canonicalize(action: &Action) -> String {
    // f64 Display is shortest-round-trip and never uses exponent notation
    format!("{}({});", action.keyword(), action.value())
}

fn is_plain_decimal(s: &str) -> bool {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (int, frac) = match digits.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (digits, None),
    };
    let all_digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    all_digits(int) && frac.is_none_or(all_digits)
}

/// Recognizes `KW(<arg>);` spanning all of `s`, returning the keyword and raw argument.
fn whole_statement(s: &str) -> Option<(&'static str, &str)> {
    KEYWORDS.iter().find_map(|&kw| {
        let arg = s.strip_prefix(kw)?.strip_prefix('(')?.strip_suffix(");")?;
        (!arg.contains(['(', ')'])).then_some((kw, arg))
    })
}

/// Whether a complete `KW(...);` statement occurs anywhere inside `s`.
fn contains_statement(s: &str) -> bool {
    KEYWORDS.iter().any(|kw| {
        s.match_indices(kw).any(|(i, _)| {
            let rest = &s[i + kw.len()..];
            rest.strip_prefix('(')
                .and_then(|r| r.find(')').map(|close| (r, close)))
                .is_some_and(|(r, close)| !r[..close].contains('(') && r[close + 1..].starts_with(';'))
        })
    })
}

pub fn parse_command(raw: &str) -> ParseResult {
    let text = raw.trim_matches(|c: char| c.is_ascii_whitespace());
    if text.is_empty() {
        return ParseResult::invalid(InvalidReason::Empty, "no content after trimming whitespace");
    }
    if let Some((kw, arg)) = whole_statement(text) {
        if !is_plain_decimal(arg) {
            return ParseResult::invalid(InvalidReason::NotANumber, format!("argument {arg:?} is not a plain decimal"));
        }
        let value: f64 = match arg.parse() {
            Ok(v) => v,
            Err(_) => return ParseResult::invalid(InvalidReason::NotANumber, format!("argument {arg:?} does not parse")),
        };
        let action = if kw == "Turn" { Action::Turn { theta: value } } else { Action::Move { distance: value } };
        if !action.in_range() {
            let limit = if kw == "Turn" { MAX_TURN_DEG } else { MAX_MOVE_M };
            return ParseResult::invalid(InvalidReason::OutOfRange, format!("{kw} argument {arg} exceeds ±{limit}"));
        }
        return ParseResult::Valid { action, canonical_text: canonicalize(&action) };
    }
    if contains_statement(text) {
        return ParseResult::invalid(InvalidReason::ExtraneousText, "command embedded in surrounding text");
    }
    ParseResult::invalid(InvalidReason::Malformed, "not of the form Turn(<num>); or Move(<num>);")
}

/// One line of a grammar fixture corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusCase {
    pub raw: String,
    /// `"Valid"` or an invalid reason name.
    pub expected: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusMismatch {
    /// 1-based position among the cases.
    pub case: usize,
    pub raw: String,
    pub expected: String,
    pub got: String,
}

/// Parses a JSON Lines corpus; blank lines are skipped.
pub fn load_corpus(text: &str) -> Result<Vec<CorpusCase>, String> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| format!("line {}: {e}", i + 1)))
        .collect()
}

/// Cases whose classification differs from the expectation.
pub fn check_corpus(cases: &[CorpusCase]) -> Vec<CorpusMismatch> {
    cases
        .iter()
        .enumerate()
        .filter_map(|(i, c)| {
            let got = parse_command(&c.raw).label();
            (got != c.expected).then(|| CorpusMismatch {
                case: i + 1,
                raw: c.raw.clone(),
                expected: c.expected.clone(),
                got: got.to_string(),
            })
        })
        .collect()
}
