use std::collections::BTreeSet;

use apirank_core::corpus::ApiProfile;
use apirank_core::textproc::{stem, tokenize, TextConfig};

#[test]
fn porter_matches_reference_vocabulary() {
    let fixture = include_str!("fixtures/porter_vocabulary.tsv");
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for line in fixture.lines().filter(|l| !l.is_empty()) {
        let (word, expected) = line.split_once('\t').expect("word<TAB>stem");
        let got = stem(word);
        if got != expected {
            mismatches.push(format!("{word}: got {got}, expected {expected}"));
        }
        checked += 1;
    }
    assert!(checked > 2000, "fixture too small: {checked}");
    assert!(mismatches.is_empty(), "{} mismatches:\n{}", mismatches.len(), mismatches.join("\n"));
}

#[test]
fn tokenizer_splits_on_non_alphanumerics() {
    assert_eq!(
        tokenize("read/write access, XML or JSON."),
        ["read", "write", "access", "xml", "or", "json"]
    );
}

fn lastfm() -> ApiProfile {
    ApiProfile {
        id: "last-fm".into(),
        name: "Last.fm".into(),
        short_description: "Online audio service".into(),
        long_description: "The Last.fm API gives users the ability to build programs using Last.fm data, \
            whether on the web, the desktop or mobile devices. The RESTful API allows for read and write \
            access to the full slate of last.fm music data resources - albums, artists, playlists, events, \
            users, and more. It allows users to call methods that respond in either XML or JSON."
            .into(),
        keywords: BTreeSet::from(["music".to_string()]),
        deprecated: false,
    }
}

/// Frozen output of the default pipeline (SMART stop list, heuristic noun
/// filter, Porter stemming) on a real API profile.
#[test]
fn lastfm_profile_golden_bag() {
    let expected: &[(&str, u32)] = &[
        ("abil", 1), ("access", 1), ("album", 1), ("api", 2), ("artist", 1), ("audio", 1),
        ("build", 1), ("call", 1), ("data", 2), ("desktop", 1), ("devic", 1), ("event", 1),
        ("fm", 4), ("full", 1), ("json", 1), ("method", 1), ("mobil", 1), ("music", 2),
        ("onlin", 1), ("playlist", 1), ("program", 1), ("read", 1), ("resourc", 1),
        ("respond", 1), ("rest", 1), ("servic", 1), ("slate", 1), ("user", 3), ("web", 1),
        ("write", 1), ("xml", 1),
    ];
    let bag = TextConfig::default().pipeline().unwrap().api_document(&lastfm());
    let got: Vec<(&str, u32)> = bag.iter().collect();
    assert_eq!(got, expected);
}
