//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use phonoparse::analysis::{unapply_deletion, unapply_feature_changing};
use phonoparse::features::overwrite_count;
use phonoparse::synthesis::apply_rule;
use phonoparse::trace::TraceEvent;
use phonoparse::{
    brute_force_parse, parse, synthesize, AnalysisConfig, FeatureBundle, PatternBundle, PatternValue, Session,
    VariableBinding,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// Runtime cap for the end-to-end sample parse.
const SAMPLE_LIMIT: Duration = Duration::from_secs(1);
/// Runtime cap for the random-grammar oracle comparison.
const ORACLE_LIMIT: Duration = Duration::from_secs(60);
const ORACLE_GRAMMARS: usize = 1000;
const ALGEBRA_CASES: usize = 10_000;
const TERMINATION_CASES: usize = 2_000;
/// Upper bound on the fitted log-log slope of parse time against length.
const MAX_SCALING_EXPONENT: f64 = 2.2;

fn sample_end_to_end() -> Outcome {
    let start = Instant::now();
    let mut s = japanese();
    let out = s.run(
        r#"(trace_lexical_lookup T)
           (trace_morpher_rule (T T vowel_deletion))
           (morph_and_lookup_word "neta")"#,
    )
    .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    let g = s.grammar().map_err(|e| e.to_string())?;
    let parse = phonoparse::parse_traced("neta", &g, s.lexicon(), &s.trace).map_err(|e| e.to_string())?;
    ensure!(parse.analyses.len() == 1, "expected one analysis, got {}", parse.analyses.len());
    let a = &parse.analyses[0];
    ensure!(
        a.entry.shape == "ne+ta" && a.entry.gloss == "(sleep)+PAST",
        "wrong analysis {} {}",
        a.entry.shape,
        a.entry.gloss
    );

    let trace = parse.trace.ok_or("no trace recorded")?;
    let unapps = trace.find_all(&|e| matches!(e, TraceEvent::RuleUnapp { .. }));
    let [TraceEvent::RuleUnapp { input, output, .. }] = unapps.as_slice() else {
        return Err(format!("expected one rule_unapp, got {}", unapps.len()));
    };
    ensure!(input.shape == "n([r y])et([r y])a", "unapplication input {}", input.shape);
    ensure!(
        output.shape == "n([r y])e([i e a])t([r y])a([i e a])",
        "unapplication output {}",
        output.shape
    );
    let lookups: Vec<String> = trace
        .find_all(&|e| matches!(e, TraceEvent::SuccLookup { .. }))
        .into_iter()
        .filter_map(|e| match e {
            TraceEvent::SuccLookup { real, .. } => Some(real.shape.clone()),
            _ => None,
        })
        .collect();
    ensure!(lookups == ["ne+ta", "ne+itai"], "lookup found {lookups:?}");
    let vol = trace.find_all(&|e| {
        matches!(e, TraceEvent::RuleApp { input, .. } if input.shape == "ne+itai")
    });
    let [TraceEvent::RuleApp { output, continuations, .. }] = vol.as_slice() else {
        return Err("no rule_app for ne+itai".into());
    };
    ensure!(output.shape == "ne+tai", "ne+itai synthesized to {}", output.shape);
    ensure!(continuations.is_empty(), "ne+itai branch not filtered");
    ensure!(out.contains("continuations ( )\n>)>)>)>)>"), "trace text does not close as expected");
    ensure!(
        out.ends_with("(word_analysis <lex_entry shape \"neta\" gloss \"(sleep)+PAST\"> )\n"),
        "analysis line missing"
    );
    ensure!(elapsed < SAMPLE_LIMIT, "took {elapsed:?}");
    Ok(format!("1 analysis, trace matches, {:.1} ms", elapsed.as_secs_f64() * 1e3))
}

fn self_opaquing_unapplication() -> Outcome {
    let (_, a) = obstruents();
    let rule = spirantization();
    ensure!(rule.is_self_opaquing(), "rule not detected as self-opaquing");
    let u = unapply_feature_changing(&rule, &a.to_segments("afxpa").unwrap(), &AnalysisConfig::default())
        .map_err(|e| e.to_string())?;
    let passes: Vec<String> = u.pass_outputs.iter().map(|w| a.render(w).unwrap()).collect();
    ensure!(
        passes == ["af[x k]pa", "a[f p][x k]pa", "a[f p][x k]pa"],
        "passes {passes:?}"
    );
    ensure!(u.nonvacuous_passes == 2, "{} nonvacuous passes", u.nonvacuous_passes);
    let forward = apply_rule(&rule, &a.to_segments("apkpa").unwrap()).map_err(|e| e.to_string())?;
    let surface = a.render(&forward.word).unwrap();
    ensure!(surface == "afxpa", "apkpa -> {surface}");
    Ok(format!("{}, apkpa -> {surface}", passes.join(" / ")))
}

fn deletion_cap() -> Outcome {
    let a = abp();
    let rule = cluster_deletion();
    let w = a.to_segments("abbabba").unwrap();
    let mut got = Vec::new();
    for (n, want, len) in [(1, "abCbabCba", 9), (2, "abCCCbabCCCba", 13)] {
        let config = AnalysisConfig {
            max_deletion_unapplications: n,
            ..Default::default()
        };
        let u = unapply_deletion(&rule, &w, &config);
        let shown = a.render(&u.word).unwrap().replace("([b p])", "C");
        ensure!(shown == want, "N={n}: {shown}");
        ensure!(u.word.len() == len, "N={n}: {} segments", u.word.len());
        got.push(format!("N={n} {shown} ({len} segments)"));
    }
    Ok(got.join(", "))
}

fn target_first() -> Outcome {
    let (_, a) = obstruents();
    let before = overwrite_count();
    let out = apply_rule(&devoicing(), &a.to_segments("ba").unwrap()).map_err(|e| e.to_string())?;
    let calls = overwrite_count() - before;
    let shown = a.render(&out.word).unwrap();
    ensure!(shown == "ba", "ba -> {shown}");
    ensure!(calls == 0 && out.sites == 0, "{calls} overwrite calls");
    Ok("ba -> ba, 0 overwrite calls".into())
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut words = 0usize;
    for round in 0..ORACLE_GRAMMARS {
        let toy = random_toy(&mut rng);
        let mut surfaces: Vec<String> = toy
            .lexicon
            .entries()
            .iter()
            .filter_map(|e| synthesize(e, &toy.grammar).ok())
            .collect();
        surfaces.sort();
        surfaces.dedup();
        for s in surfaces {
            let fast: Vec<_> = parse(&s, &toy.grammar, &toy.lexicon)
                .map_err(|e| format!("grammar {round}, {s}: {e}"))?
                .into_iter()
                .map(|x| x.entry)
                .collect();
            let slow: Vec<_> = brute_force_parse(&s, &toy.grammar, &toy.lexicon).into_iter().cloned().collect();
            ensure!(fast == slow, "grammar {round}, word {s}: parse {} vs oracle {}", fast.len(), slow.len());
            words += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < ORACLE_LIMIT, "took {elapsed:?}");
    Ok(format!(
        "{ORACLE_GRAMMARS} grammars, {words} words, 100% agreement, {:.1} s",
        elapsed.as_secs_f64()
    ))
}

fn random_bundle(rng: &mut impl Rng) -> FeatureBundle {
    let mut b = FeatureBundle::new();
    for f in ["f0", "f1", "f2", "f3"] {
        match rng.random_range(0..3) {
            0 => b.set(f, "+"),
            1 => b.set(f, "-"),
            _ => {}
        }
    }
    match rng.random_range(0..4) {
        0 => b.set("place", "lab"),
        1 => b.set("place", "cor"),
        2 => b.set("place", "vel"),
        _ => {}
    }
    b
}

fn algebra_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let names = ["f0", "f1", "f2", "f3", "place"];
    for i in 0..ALGEBRA_CASES {
        let (a, b, c) = (random_bundle(&mut rng), random_bundle(&mut rng), random_bundle(&mut rng));
        ensure!(a.unify(&b) == b.unify(&a), "commutativity, case {i}");
        ensure!(a.unify(&a) == Ok(a.clone()), "idempotence, case {i}");
        let left = a.unify(&b).and_then(|ab| ab.unify(&c));
        let right = b.unify(&c).and_then(|bc| a.unify(&bc));
        ensure!(left == right, "associativity, case {i}");
        ensure!(
            a.contains(&b) == (a.unify(&b) == Ok(a.clone())),
            "contains vs unify, case {i}"
        );
        let dropped: Vec<&str> = names.iter().copied().filter(|_| rng.random_bool(0.4)).collect();
        let u = a.uninstantiate(dropped.iter().copied());
        ensure!(a.contains(&u), "uninstantiate shrinks, case {i}");
        ensure!(!a.unifies_with(&b) || u.unifies_with(&b), "uninstantiate monotone, case {i}");
        let mut p = PatternBundle::new();
        let mut binding = VariableBinding::new();
        for (k, v) in b.iter() {
            if rng.random_bool(0.3) {
                p.insert(k, PatternValue::var(k));
                binding = binding.bind(k, v);
            } else {
                p.insert(k, PatternValue::atom(v));
            }
        }
        let o = a.overwrite(&p, &binding).map_err(|e| e.to_string())?;
        ensure!(o.contains(&p.resolve(&binding).unwrap()), "overwrite containment, case {i}");
    }
    Ok(format!("{ALGEBRA_CASES} random triples per law, 0 failures"))
}

fn termination_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut tried = 0;
    let mut worst = (0usize, 0usize);
    while tried < TERMINATION_CASES {
        let toy = random_toy(&mut rng);
        let names: Vec<String> = toy.grammar.features.names().map(str::to_string).collect();
        let rule = random_feature_rule(&mut rng, &names, 0);
        if !rule.is_self_opaquing() {
            continue;
        }
        tried += 1;
        let word = toy
            .grammar
            .surface
            .to_segments(&random_word(&mut rng, &toy.grammar.surface, 10))
            .unwrap();
        let budget = word.instantiated_features();
        let u = unapply_feature_changing(&rule, &word, &AnalysisConfig::default()).map_err(|e| e.to_string())?;
        ensure!(
            u.nonvacuous_passes <= budget,
            "{} passes for {budget} instantiated features",
            u.nonvacuous_passes
        );
        if u.nonvacuous_passes > worst.0 {
            worst = (u.nonvacuous_passes, budget);
        }
    }
    Ok(format!(
        "{TERMINATION_CASES} self-opaquing rules, most passes {} (budget {})",
        worst.0, worst.1
    ))
}

const SCALING_RULES: &str = r#"
(load_morpher_rule <prule rname raising p_lhs <ptemp pseq ((+voc -round -low))>
    p_rhs <ptemp pseq ((+high))> right_environ <ptemp pseq ((+nasal))>>)
(load_morpher_rule <prule rname rounding p_lhs <ptemp pseq ((+voc -low))>
    p_rhs <ptemp pseq (((^a round)))> right_environ <ptemp pseq ((-voc) (+voc (^a round)))> mode right_to_left>)
(load_morpher_rule <prule rname nasalization p_lhs <ptemp pseq ((-voc -approx))>
    p_rhs <ptemp pseq ((+nasal))> left_environ <ptemp pseq ((+nasal))> mode simultaneous>)
(load_morpher_rule <prule rname lowering p_lhs <ptemp pseq ((+voc +high +round))>
    p_rhs <ptemp pseq ((-high))> right_environ <ptemp pseq ("+")>>)
(load_morpher_rule <prule rname epenthesis p_rhs <ptemp pseq ((+voc -round +high -low))>
    left_environ <ptemp pseq ((+nasal))> right_environ <ptemp pseq ((+nasal))>>)
(load_morpher_rule <prule rname coronalization p_lhs <ptemp pseq ((+approx))>
    p_rhs <ptemp pseq ((+cor))> right_environ <ptemp pseq ((+voc +high -round))>>)
"#;

fn scaling() -> Outcome {
    let mut s = japanese();
    s.run(SCALING_RULES).map_err(|e| e.to_string())?;
    let g = s.grammar().map_err(|e| e.to_string())?;
    let n_rules = g.rules().count();
    ensure!(n_rules == 8, "grammar has {n_rules} rules");
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (cons, vows) = (["n", "t", "r", "y"], ["i", "e", "a", "u", "o"]);
    let mut shape_of_len = |len: usize| -> String {
        let mut out = String::new();
        for i in 0..len {
            let pool: &[&str] = if i % 2 == 0 { &cons } else { &vows };
            out.push_str(pool[rng.random_range(0..pool.len())]);
            if i % 4 == 3 && i + 1 < len {
                out.push('+');
            }
        }
        out
    };
    let lengths: Vec<usize> = (4..=32).step_by(4).collect();
    let mut session = Session::new();
    std::mem::swap(&mut session, &mut s);
    let mut lexicon_src = String::new();
    let mut probes = Vec::new();
    for &len in &lengths {
        for k in 0..6 {
            let shape = shape_of_len(len);
            lexicon_src.push_str(&format!("(load_lex_entry <lex_entry shape \"{shape}\" gloss \"w{len}_{k}\">)\n"));
            if k == 0 {
                probes.push(shape);
            }
        }
    }
    session.run(&lexicon_src).map_err(|e| e.to_string())?;
    let g = session.grammar().map_err(|e| e.to_string())?;
    let lex = session.lexicon();
    let mut points = Vec::new();
    for (len, shape) in lengths.iter().zip(&probes) {
        let entry = lex.entries().iter().find(|e| &e.shape == shape).unwrap();
        let surface = synthesize(entry, &g).map_err(|e| e.to_string())?;
        let mut times = Vec::new();
        for _ in 0..9 {
            let t = Instant::now();
            let found = parse(&surface, &g, lex).map_err(|e| e.to_string())?;
            times.push(t.elapsed().as_secs_f64());
            ensure!(found.iter().any(|a| &a.entry.shape == shape), "{shape} not recovered from {surface}");
        }
        times.sort_by(f64::total_cmp);
        points.push((*len as f64, times[times.len() / 2]));
    }
    let n = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|(l, t)| (l.ln(), t.ln())).unzip();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    ensure!(slope < MAX_SCALING_EXPONENT, "fitted exponent {slope:.2}");
    let (first, last) = (points[0].1, points[points.len() - 1].1);
    Ok(format!(
        "exponent {slope:.2} over lengths 4-32 (median {:.2} ms at 4, {:.2} ms at 32)",
        first * 1e3,
        last * 1e3
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("sample parse end to end", sample_end_to_end),
        ("self-opaquing unapplication", self_opaquing_unapplication),
        ("deletion cap", deletion_cap),
        ("target-first application", target_first),
        ("oracle equivalence", oracle_equivalence),
        ("algebra invariants", algebra_invariants),
        ("termination bound", termination_bound),
        ("scaling", scaling),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
