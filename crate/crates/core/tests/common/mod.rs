#![allow(dead_code)]

use phonoparse::{
    Alphabet, AlphabetRole, ApplicationMode, EnvTerm, Environment, FeatureBundle, FeatureSystem, Grammar,
    LexicalEntry, Lexicon, PatternBundle, PhonologicalRule, SegmentSpec, Session,
};
use rand::seq::SliceRandom;
use rand::Rng;

pub const JAPANESE: &str = include_str!("../data/japanese.pp");

pub fn japanese() -> Session {
    let mut s = Session::new();
    s.run(JAPANESE).expect("sample grammar loads");
    s
}

pub fn pb(entries: &[(&str, &str)]) -> PatternBundle {
    entries.iter().fold(PatternBundle::new(), |acc, (k, v)| acc.with(k, v))
}

pub fn fb(entries: &[(&str, &str)]) -> FeatureBundle {
    entries.iter().copied().collect()
}

/// Obstruents over son/cont/voi/place, fricatives listed before stops so
/// that ambiguous segments render as `[f p]` and `[x k]`.
pub fn obstruents() -> (FeatureSystem, Alphabet) {
    let mut fs = FeatureSystem::binary(["son", "cont", "voi"]).unwrap();
    fs.add("place", &["lab", "cor", "vel", "none"], phonoparse::FeatureKind::Phonetic)
        .unwrap();
    let mut specs = Vec::new();
    for (g, cont, voi, place) in [
        ("f", "+", "-", "lab"),
        ("s", "+", "-", "cor"),
        ("x", "+", "-", "vel"),
        ("p", "-", "-", "lab"),
        ("t", "-", "-", "cor"),
        ("k", "-", "-", "vel"),
        ("b", "-", "+", "lab"),
        ("d", "-", "+", "cor"),
        ("g", "-", "+", "vel"),
    ] {
        specs.push(SegmentSpec::new(
            g,
            fb(&[("son", "-"), ("cont", cont), ("voi", voi), ("place", place)]),
        ));
    }
    specs.push(SegmentSpec::new(
        "a",
        fb(&[("son", "+"), ("cont", "+"), ("voi", "+"), ("place", "none")]),
    ));
    (fs, Alphabet::new(AlphabetRole::Both, specs).unwrap())
}

/// [-cont] -> [-voi] / __ [-voi]
pub fn devoicing() -> PhonologicalRule {
    PhonologicalRule::feature_changing(
        "devoicing",
        pb(&[("cont", "-")]),
        pb(&[("voi", "-")]),
        Environment::empty(),
        Environment::right(vec![EnvTerm::Bundle(pb(&[("voi", "-")]))], false),
        ApplicationMode::LeftToRight,
    )
    .unwrap()
}

/// [-son] -> [+cont] / __ [-cont], simultaneous
pub fn spirantization() -> PhonologicalRule {
    PhonologicalRule::feature_changing(
        "spirantization",
        pb(&[("son", "-")]),
        pb(&[("cont", "+")]),
        Environment::empty(),
        Environment::right(vec![EnvTerm::Bundle(pb(&[("cont", "-")]))], false),
        ApplicationMode::Simultaneous,
    )
    .unwrap()
}

/// a, b, p over cons/voi.
pub fn abp() -> Alphabet {
    Alphabet::new(
        AlphabetRole::Both,
        vec![
            SegmentSpec::new("a", fb(&[("cons", "-"), ("voi", "+")])),
            SegmentSpec::new("b", fb(&[("cons", "+"), ("voi", "+")])),
            SegmentSpec::new("p", fb(&[("cons", "+"), ("voi", "-")])),
        ],
    )
    .unwrap()
}

/// C -> 0 / C __ C
pub fn cluster_deletion() -> PhonologicalRule {
    let c = || EnvTerm::Bundle(pb(&[("cons", "+")]));
    PhonologicalRule::new(
        "cluster_deletion",
        Some(pb(&[("cons", "+")])),
        None,
        Environment::left(vec![c()], false),
        Environment::right(vec![c()], false),
        ApplicationMode::LeftToRight,
    )
    .unwrap()
}

/// A small random grammar and lexicon over binary features `f0..`.
pub struct Toy {
    pub grammar: Grammar,
    pub lexicon: Lexicon,
}

fn random_pattern(rng: &mut impl Rng, names: &[String], min: usize, max: usize) -> PatternBundle {
    let mut picked: Vec<&String> = names.iter().collect();
    picked.shuffle(rng);
    let n = rng.random_range(min..=max.min(names.len()));
    picked
        .into_iter()
        .take(n)
        .fold(PatternBundle::new(), |p, f| p.with(f, if rng.random_bool(0.5) { "+" } else { "-" }))
}

fn random_env(rng: &mut impl Rng, names: &[String], var: Option<(&str, &str)>, left: bool) -> Environment {
    let len = if var.is_some() { rng.random_range(1..=2) } else { rng.random_range(0..=2) };
    let mut terms = Vec::new();
    for i in 0..len {
        let mut p = random_pattern(rng, names, 1, 2);
        // the term next to the target carries the variable
        let adjacent = if left { i == len - 1 } else { i == 0 };
        if let (Some((f, v)), true) = (var, adjacent) {
            p = p.restrict(|n| n != f).with_var(f, v);
        }
        if !adjacent && rng.random_bool(0.3) {
            terms.push(EnvTerm::Optional {
                terms: vec![EnvTerm::Bundle(p)],
                min: 0,
                max: 1,
            });
        } else {
            terms.push(EnvTerm::Bundle(p));
        }
    }
    let anchored = rng.random_bool(0.15);
    if left {
        Environment::left(terms, anchored)
    } else {
        Environment::right(terms, anchored)
    }
}

pub fn random_feature_rule(rng: &mut impl Rng, names: &[String], id: usize) -> PhonologicalRule {
    let input = random_pattern(rng, names, 1, 2);
    let mode = match rng.random_range(0..3) {
        0 => ApplicationMode::LeftToRight,
        1 => ApplicationMode::RightToLeft,
        _ => ApplicationMode::Simultaneous,
    };
    if rng.random_bool(0.25) {
        // assimilation: [input] -> [^a f] next to [^a f]
        let f = names[rng.random_range(0..names.len())].clone();
        let output = PatternBundle::new().with_var(&f, "a");
        let on_left = rng.random_bool(0.5);
        let (left, right) = if on_left {
            (random_env(rng, names, Some((&f, "a")), true), random_env(rng, names, None, false))
        } else {
            (random_env(rng, names, None, true), random_env(rng, names, Some((&f, "a")), false))
        };
        return PhonologicalRule::feature_changing(&format!("r{id}"), input, output, left, right, mode).unwrap();
    }
    let output = random_pattern(rng, names, 1, 2);
    let left = random_env(rng, names, None, true);
    let right = random_env(rng, names, None, false);
    PhonologicalRule::feature_changing(&format!("r{id}"), input, output, left, right, mode).unwrap()
}

pub fn random_toy(rng: &mut impl Rng) -> Toy {
    let k = rng.random_range(2..=4);
    let names: Vec<String> = (0..k).map(|i| format!("f{i}")).collect();
    let fs = FeatureSystem::binary(names.iter().map(String::as_str)).unwrap();
    let mut bundles: Vec<FeatureBundle> = (0..1u32 << k)
        .map(|m| {
            names.iter().enumerate().fold(FeatureBundle::new(), |b, (i, n)| {
                b.with(n, if m & (1 << i) != 0 { "+" } else { "-" })
            })
        })
        .collect();
    bundles.shuffle(rng);
    let n_specs = rng.random_range(2..=bundles.len().min(6));
    let graphemes = ["a", "b", "c", "d", "e", "f"];
    let specs: Vec<SegmentSpec> = bundles
        .into_iter()
        .take(n_specs)
        .zip(graphemes)
        .map(|(b, g)| SegmentSpec::new(g, b))
        .collect();
    let alphabet = Alphabet::new(AlphabetRole::Both, specs).unwrap();
    let rules = (0..rng.random_range(1..=3))
        .map(|i| random_feature_rule(rng, &names, i))
        .collect();
    let grammar = Grammar::single(fs, alphabet, rules);
    let mut lexicon = Lexicon::new();
    for i in 0..rng.random_range(1..=50) {
        let len = rng.random_range(1..=6);
        let shape: String = (0..len).map(|_| graphemes[rng.random_range(0..n_specs)]).collect();
        lexicon.add(LexicalEntry::new(&shape, &format!("e{i}"), &grammar.lexical).unwrap());
    }
    Toy { grammar, lexicon }
}

/// A random word over `alphabet`.
pub fn random_word(rng: &mut impl Rng, alphabet: &Alphabet, max_len: usize) -> String {
    let specs = alphabet.specs();
    let len = rng.random_range(1..=max_len);
    (0..len)
        .map(|_| specs[rng.random_range(0..specs.len())].grapheme.clone())
        .collect()
}

/// A deletion or epenthesis rule with one-term environments on both sides. Epenthesis
/// inserts a segment from `alphabet` so results stay spellable.
pub fn random_segmental_rule(
    rng: &mut impl Rng,
    names: &[String],
    alphabet: &Alphabet,
    id: usize,
) -> PhonologicalRule {
    let mut env = |left| {
        let p = random_pattern(rng, names, 1, 2);
        let terms = vec![EnvTerm::Bundle(p)];
        if left {
            Environment::left(terms, false)
        } else {
            Environment::right(terms, false)
        }
    };
    let left = env(true);
    let right = env(false);
    let mode = if rng.random_bool(0.5) {
        ApplicationMode::LeftToRight
    } else {
        ApplicationMode::RightToLeft
    };
    if rng.random_bool(0.5) {
        let input = random_pattern(rng, names, 1, 2);
        PhonologicalRule::new(&format!("d{id}"), Some(input), None, left, right, mode).unwrap()
    } else {
        let spec = &alphabet.specs()[rng.random_range(0..alphabet.specs().len())];
        let output = PatternBundle::from(&spec.bundle);
        PhonologicalRule::new(&format!("e{id}"), None, Some(output), left, right, mode).unwrap()
    }
}
