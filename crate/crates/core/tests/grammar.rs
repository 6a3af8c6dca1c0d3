use std::collections::HashSet;
use std::panic;
use std::time::{Duration, Instant};

use aeroagent::grammar::{canonicalize, check_corpus, load_corpus, parse_command, Action, InvalidReason, ParseResult};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CORPUS: &str = include_str!("../testdata/grammar_corpus.jsonl");

#[test]
fn shipped_corpus_agrees() {
    let cases = load_corpus(CORPUS).unwrap();
    assert_eq!(cases.len(), 50);
    assert_eq!(check_corpus(&cases), vec![]);
}

#[test]
fn corpus_covers_every_reason_and_bound() {
    let cases = load_corpus(CORPUS).unwrap();
    let labels: HashSet<&str> = cases.iter().map(|c| c.expected.as_str()).collect();
    for l in ["Valid", "ExtraneousText", "Malformed", "OutOfRange", "NotANumber", "Empty"] {
        assert!(labels.contains(l), "{l}");
    }
    let has = |raw: &str, label: &str| cases.iter().any(|c| c.raw == raw && c.expected == label);
    assert!(has("Turn(90);", "Valid"));
    assert!(has("Turn(-90);", "Valid"));
    assert!(has("Move(3.0);", "Valid"));
    assert!(has("Move(-3.0);", "Valid"));
    assert!(has("Turn(90.0001);", "OutOfRange"));
    assert!(has("Move(3.0001);", "OutOfRange"));
}

#[test]
fn wrong_expectation_is_reported() {
    let cases = load_corpus(r#"{"raw":"Move(1.0);","expected":"Malformed"}"#).unwrap();
    let m = check_corpus(&cases);
    assert_eq!(m.len(), 1);
    assert_eq!((m[0].case, m[0].got.as_str()), (1, "Valid"));
}

#[test]
fn spec_examples() {
    assert_eq!(parse_command("Move(2.5);").action(), Some(Action::Move { distance: 2.5 }));
    assert_eq!(parse_command("Turn(-90);").action(), Some(Action::Turn { theta: -90.0 }));
    let reason = |raw: &str| match parse_command(raw) {
        ParseResult::Invalid { reason, .. } => Some(reason),
        ParseResult::Valid { .. } => None,
    };
    assert_eq!(reason("Turn(120);"), Some(InvalidReason::OutOfRange));
    assert_eq!(reason("Sure! Move(1.0);"), Some(InvalidReason::ExtraneousText));
    assert_eq!(reason("```Move(1.0);```"), Some(InvalidReason::ExtraneousText));
    assert_eq!(reason("move(1.0);"), Some(InvalidReason::Malformed));
    assert_eq!(reason(""), Some(InvalidReason::Empty));
    assert_eq!(canonicalize(&Action::Move { distance: 2.5 }), "Move(2.5);");
    assert_eq!(canonicalize(&Action::Turn { theta: -90.0 }), "Turn(-90);");
}

#[test]
fn canonical_round_trip_10k() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..10_000 {
        let a = if i % 2 == 0 {
            Action::Turn { theta: rng.gen_range(-90.0..=90.0) }
        } else {
            Action::Move { distance: rng.gen_range(-3.0..=3.0) }
        };
        let text = canonicalize(&a);
        match parse_command(&text) {
            ParseResult::Valid { action, canonical_text } => {
                assert_eq!(action, a, "{text}");
                assert_eq!(canonical_text, text);
            }
            other => panic!("{text} -> {other:?}"),
        }
    }
}

/// Random bytes biased toward grammar-looking fragments.
pub fn fuzz_input(rng: &mut impl Rng) -> String {
    const PIECES: [&str; 16] =
        ["Turn", "Move", "(", ")", ";", "-", "+", ".", "9", "0", "3", " ", "\n", "e", "```", "é"];
    let n = rng.gen_range(0..24);
    (0..n)
        .map(|_| {
            if rng.gen_bool(0.7) {
                PIECES[rng.gen_range(0..PIECES.len())].to_string()
            } else {
                char::from_u32(rng.gen_range(0..0x11000)).unwrap_or('?').to_string()
            }
        })
        .collect()
}

#[test]
fn short_fuzz_never_panics() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let deadline = Instant::now() + Duration::from_secs(2);
    while Instant::now() < deadline {
        let s = fuzz_input(&mut rng);
        let r = panic::catch_unwind(|| parse_command(&s));
        assert!(r.is_ok(), "panic on {s:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn total_on_arbitrary_strings(s in any::<String>()) {
        let _ = parse_command(&s);
    }

    #[test]
    fn outer_whitespace_is_ignored(pre in "[ \t\r\n]{0,4}", post in "[ \t\r\n]{0,4}", v in -3.0..=3.0f64) {
        let core = canonicalize(&Action::Move { distance: v });
        prop_assert_eq!(parse_command(&format!("{pre}{core}{post}")), parse_command(&core));
    }

    #[test]
    fn valid_implies_in_range(s in "(Turn|Move)\\([+-]?[0-9]{1,3}(\\.[0-9]{1,5})?\\);") {
        if let Some(a) = parse_command(&s).action() {
            prop_assert!(a.in_range());
        }
    }
}
