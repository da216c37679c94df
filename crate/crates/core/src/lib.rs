//! A generate-and-test morphological parser for grammars of ordered
//! generative phonological rules.
//!
//! A surface word is analysed by unapplying every rule, last first, which
//! yields a partially specified virtual word. Lexical entries that unify
//! with it are run forward through the rules, and only those whose
//! derivation reproduces the input are returned.

pub mod alphabet;
pub mod analysis;
pub mod error;
pub mod features;
pub mod grammar_io;
pub mod lexicon;
pub mod pipeline;
pub mod rule;
pub mod sexp;
pub mod synthesis;
pub mod trace;

pub use alphabet::{Alphabet, AlphabetRole, Segment, SegmentSpec, Word};
pub use analysis::AnalysisConfig;
pub use error::{Error, Result};
pub use features::{FeatureBundle, FeatureKind, FeatureSystem, PatternBundle, PatternValue, VariableBinding};
pub use grammar_io::{OutputFormat, Session};
pub use lexicon::{LexicalEntry, Lexicon};
pub use pipeline::{brute_force_parse, parse, parse_traced, synthesize, Grammar, Parse, Stratum, WordAnalysis};
pub use rule::{ApplicationMode, EnvTerm, Environment, PhonologicalRule, RuleKind};
pub use trace::{TraceConfig, TraceEvent};
