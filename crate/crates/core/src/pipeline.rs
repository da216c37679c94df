//! Parsing a surface word: unapply every rule, look up, resynthesize, compare.

use std::collections::BTreeSet;

use log::debug;

use crate::alphabet::{Alphabet, Word};
use crate::analysis::{unapply_rule, AnalysisConfig};
use crate::error::{Error, Result};
use crate::features::FeatureSystem;
use crate::lexicon::{LexicalEntry, Lexicon};
use crate::rule::PhonologicalRule;
use crate::synthesis::{apply_rule, SynthesisError};
use crate::trace::{EntryView, TraceConfig, TraceEvent};

pub const DEFAULT_MAX_SEGMENTS: usize = 64;

/// A named, ordered block of rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratum {
    pub name: String,
    pub rules: Vec<PhonologicalRule>,
}

impl Stratum {
    pub fn new(name: &str, rules: Vec<PhonologicalRule>) -> Self {
        Stratum {
            name: name.to_string(),
            rules,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Grammar {
    pub features: FeatureSystem,
    pub surface: Alphabet,
    pub lexical: Alphabet,
    /// In synthesis order.
    pub strata: Vec<Stratum>,
    pub config: AnalysisConfig,
    /// Longer inputs are rejected before analysis.
    pub max_segments: usize,
}

impl Grammar {
    pub fn new(features: FeatureSystem, surface: Alphabet, lexical: Alphabet) -> Self {
        Grammar {
            features,
            surface,
            lexical,
            strata: Vec::new(),
            config: AnalysisConfig::default(),
            max_segments: DEFAULT_MAX_SEGMENTS,
        }
    }

    /// A grammar with one stratum holding `rules`.
    pub fn single(features: FeatureSystem, alphabet: Alphabet, rules: Vec<PhonologicalRule>) -> Self {
        let mut g = Grammar::new(features, alphabet.clone(), alphabet);
        g.strata.push(Stratum::new("main", rules));
        g
    }

    /// All rules in synthesis order.
    pub fn rules(&self) -> impl DoubleEndedIterator<Item = &PhonologicalRule> {
        self.strata.iter().flat_map(|s| s.rules.iter())
    }

    pub fn rule(&self, name: &str) -> Option<&PhonologicalRule> {
        self.rules().find(|r| r.name == name)
    }

    /// Features the surface alphabet can distinguish.
    pub fn surface_features(&self) -> BTreeSet<String> {
        self.surface
            .specs()
            .iter()
            .flat_map(|s| s.bundle.names().map(str::to_string))
            .collect()
    }

    /// Non-fatal problems worth reporting when the grammar is loaded.
    pub fn lint(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for r in self.rules() {
            if !seen.insert(r.name.as_str()) {
                out.push(format!("rule name `{}` is used more than once", r.name));
            }
            if r.is_self_opaquing() {
                out.push(format!("rule `{}` is self-opaquing; it is unapplied until it stops changing the word", r.name));
            }
        }
        out
    }
}

/// A successful parse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordAnalysis {
    pub entry: LexicalEntry,
    /// What synthesis produced from the entry.
    pub derived: Word,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parse {
    pub analyses: Vec<WordAnalysis>,
    /// Present when any tracing was requested.
    pub trace: Option<TraceEvent>,
}

/// Same length and the same values on every surface-visible feature.
pub fn compare(derived: &Word, input: &Word, inventory: &BTreeSet<String>) -> bool {
    derived.len() == input.len()
        && derived.segments().iter().zip(input.segments()).all(|(d, i)| {
            let visible = |n: &str| inventory.contains(n);
            d.bundle.restrict(visible) == i.bundle.restrict(visible)
        })
}

pub fn parse(surface: &str, grammar: &Grammar, lexicon: &Lexicon) -> Result<Vec<WordAnalysis>> {
    parse_traced(surface, grammar, lexicon, &TraceConfig::default()).map(|p| p.analyses)
}

struct Step {
    rule: String,
    input: Word,
    output: Word,
}

pub fn parse_traced(surface: &str, grammar: &Grammar, lexicon: &Lexicon, trace: &TraceConfig) -> Result<Parse> {
    let input = grammar.surface.to_segments(surface)?.forget_boundaries();
    if input.len() > grammar.max_segments {
        return Err(Error::TooLong {
            len: input.len(),
            max: grammar.max_segments,
        });
    }
    let tracing = trace.is_enabled();

    let mut word = input.clone();
    let mut unapps = Vec::new();
    for rule in grammar.rules().rev() {
        let u = unapply_rule(rule, &word, &grammar.config)?;
        if tracing && trace.traces_analysis(&rule.name) {
            unapps.push(Step {
                rule: rule.name.clone(),
                input: word.clone(),
                output: u.word.clone(),
            });
        }
        word = u.word;
    }
    debug!("virtual word for {surface:?}: {}", grammar.lexical.render_lossy(&word));

    let inventory = grammar.surface_features();
    let mut analyses: Vec<WordAnalysis> = Vec::new();
    let mut lookups = Vec::new();
    for m in lexicon.lookup_entries(&word) {
        let entry = m.entry;
        let mut steps = Vec::new();
        let derived = derive_with(entry, grammar, |rule, before, after| {
            if tracing && trace.traces_synthesis(&rule.name) {
                steps.push(Step {
                    rule: rule.name.clone(),
                    input: before.clone(),
                    output: after.clone(),
                });
            }
        });
        let mut tail = Vec::new();
        match derived {
            Ok(derived) => {
                if compare(&derived, &input, &inventory) {
                    if tracing {
                        let shape = grammar.surface.render_lossy(&derived.clone().strip_boundaries());
                        tail.push(TraceEvent::WordAnalysis {
                            entry: EntryView::real(shape, &entry.gloss),
                        });
                    }
                    if !analyses.iter().any(|a| a.entry == *entry && a.derived == derived) {
                        analyses.push(WordAnalysis {
                            entry: entry.clone(),
                            derived,
                        });
                    }
                }
            }
            Err(e) => {
                debug!("candidate {:?} dropped: {e}", entry.shape);
                if tracing {
                    tail.push(TraceEvent::Failure { message: e.to_string() });
                }
            }
        }
        if !tracing {
            continue;
        }
        for s in steps.into_iter().rev() {
            tail = vec![TraceEvent::RuleApp {
                rule: s.rule,
                input: EntryView::real(grammar.lexical.render_lossy(&s.input), &entry.gloss),
                output: EntryView::real(grammar.lexical.render_lossy(&s.output), &entry.gloss),
                continuations: tail,
            }];
        }
        if trace.lexical_lookup {
            lookups.push(TraceEvent::SuccLookup {
                real: EntryView::real(entry.shape.clone(), &entry.gloss),
                continuations: tail,
            });
        } else {
            lookups.extend(tail);
        }
    }

    let trace = tracing.then(|| {
        let mut tail = lookups;
        if trace.lexical_lookup {
            tail = vec![TraceEvent::LexLookup {
                virtual_entry: EntryView::virtual_shape(grammar.lexical.render_lossy(&word)),
                continuations: tail,
            }];
        }
        for s in unapps.into_iter().rev() {
            tail = vec![TraceEvent::RuleUnapp {
                rule: s.rule,
                input: EntryView::virtual_shape(grammar.surface.render_lossy(&s.input)),
                output: EntryView::virtual_shape(grammar.surface.render_lossy(&s.output)),
                continuations: tail,
            }];
        }
        TraceEvent::Root {
            shape: surface.to_string(),
            continuations: tail,
        }
    });
    Ok(Parse { analyses, trace })
}

fn derive_with(
    entry: &LexicalEntry,
    grammar: &Grammar,
    mut observe: impl FnMut(&PhonologicalRule, &Word, &Word),
) -> Result<Word, SynthesisError> {
    let mut word = entry.underlying.clone();
    for rule in grammar.rules() {
        let next = apply_rule(rule, &word)?.word;
        observe(rule, &word, &next);
        word = next;
    }
    Ok(word)
}

/// Runs every rule forward over the entry's underlying form.
pub fn derive(entry: &LexicalEntry, grammar: &Grammar) -> Result<Word, SynthesisError> {
    derive_with(entry, grammar, |_, _, _| {})
}

/// The surface spelling of `entry`, boundaries removed.
pub fn synthesize(entry: &LexicalEntry, grammar: &Grammar) -> Result<String> {
    let word = derive(entry, grammar)?;
    Ok(grammar.surface.render(&word.strip_boundaries())?)
}

/// The reference parser: every entry whose synthesis spells `surface`.
pub fn brute_force_parse<'a>(surface: &str, grammar: &Grammar, lexicon: &'a Lexicon) -> Vec<&'a LexicalEntry> {
    let Ok(input) = grammar.surface.to_segments(surface) else {
        return Vec::new();
    };
    let input = input.strip_boundaries();
    let inventory = grammar.surface_features();
    lexicon
        .entries()
        .iter()
        .filter(|e| derive(e, grammar).is_ok_and(|d| compare(&d, &input, &inventory)))
        .collect()
}
