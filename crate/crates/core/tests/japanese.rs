mod common;

use common::japanese;
use phonoparse::trace::TraceEvent;
use phonoparse::OutputFormat;

const COMMANDS: &str = r#"
(trace_lexical_lookup T)
(trace_morpher_rule (T T vowel_deletion))
(morph_and_lookup_word "neta")
"#;

const GOLDEN: &str = r#"<trace shape "neta"
continuations (
<rule_unapp rname vowel_deletion
input <lex_entry shape "n([r y])et([r y])a">
output <lex_entry shape "n([r y])e([i e a])t([r y])a([i e a])">
continuations (
<lex_lookup virtual
<lex_entry shape "n([r y])e([i e a])t([r y])a([i e a])">
continuations (
<succ_lookup real <lex_entry shape "ne+ta" gloss "(sleep)+PAST">
continuations (
<rule_app rname vowel_deletion
input <lex_entry shape "ne+ta" gloss "(sleep)+PAST">
output <lex_entry shape "ne+ta" gloss "(sleep)+PAST">
continuations (
<lex_entry shape "neta" gloss "(sleep)+PAST">)>)>
<succ_lookup real <lex_entry shape "ne+itai" gloss "(sleep)+VOL">
continuations (
<rule_app rname vowel_deletion
input <lex_entry shape "ne+itai" gloss "(sleep)+VOL">
output <lex_entry shape "ne+tai" gloss "(sleep)+VOL">
continuations ( )
>)>)>)>)>
(word_analysis <lex_entry shape "neta" gloss "(sleep)+PAST"> )
"#;

#[test]
fn golden_trace() {
    let out = japanese().run(COMMANDS).unwrap();
    assert_eq!(out, GOLDEN);
}

#[test]
fn output_is_deterministic() {
    assert_eq!(japanese().run(COMMANDS).unwrap(), japanese().run(COMMANDS).unwrap());
}

#[test]
fn untraced_parse_prints_only_the_analysis() {
    let out = japanese().run(r#"(morph_and_lookup_word "neta")"#).unwrap();
    assert_eq!(out, "(word_analysis <lex_entry shape \"neta\" gloss \"(sleep)+PAST\"> )\n");
}

#[test]
fn untraced_rules_are_spliced_out() {
    let mut s = japanese();
    s.run("(trace_lexical_lookup T)").unwrap();
    let g = s.grammar().unwrap();
    let p = phonoparse::parse_traced("neta", &g, s.lexicon(), &s.trace).unwrap();
    let t = p.trace.unwrap();
    assert!(t
        .find_all(&|e| matches!(e, TraceEvent::RuleUnapp { .. } | TraceEvent::RuleApp { .. }))
        .is_empty());
    let TraceEvent::Root { continuations, .. } = &t else { panic!() };
    assert!(matches!(continuations.as_slice(), [TraceEvent::LexLookup { .. }]));
}

#[test]
fn glide_deletion_alone() {
    let mut s = japanese();
    s.run("(trace_morpher_rule (T NIL glide_deletion))").unwrap();
    let g = s.grammar().unwrap();
    let p = phonoparse::parse_traced("neta", &g, s.lexicon(), &s.trace).unwrap();
    let t = p.trace.unwrap();
    let [TraceEvent::RuleUnapp { input, output, .. }] = t.find_all(&|e| matches!(e, TraceEvent::RuleUnapp { .. }))[..]
    else {
        panic!()
    };
    assert_eq!(input.shape, "neta");
    assert_eq!(output.shape, "n([r y])et([r y])a");
}

#[test]
fn generation() {
    let mut s = japanese();
    assert_eq!(s.generate("ne+ta").unwrap(), "neta");
    assert_eq!(s.generate("ne+itai").unwrap(), "netai");
    assert_eq!(
        s.run(r#"(generate_word "ne+itai")"#).unwrap(),
        "(word_synthesis \"netai\")\n"
    );
}

#[test]
fn more_undeletions_still_one_analysis() {
    let mut s = japanese();
    s.run("(set_max_undeletions 3)").unwrap();
    let out = s.run(r#"(morph_and_lookup_word "neta")"#).unwrap();
    assert_eq!(out, "(word_analysis <lex_entry shape \"neta\" gloss \"(sleep)+PAST\"> )\n");
}

#[test]
fn structured_trace_has_the_same_events() {
    let mut s = japanese();
    s.format = OutputFormat::Structured;
    let out = s.run(COMMANDS).unwrap();
    let events: Vec<String> = out
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["event"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(
        events,
        [
            "trace",
            "rule_unapp",
            "lex_lookup",
            "succ_lookup",
            "rule_app",
            "word_analysis",
            "succ_lookup",
            "rule_app",
            "analyses"
        ]
    );
}

#[test]
fn empty_command_file() {
    assert_eq!(japanese().run("").unwrap(), "");
    assert_eq!(japanese().run("; only a comment\n").unwrap(), "");
}
