//! The command language: loading feature systems, alphabets, rules and
//! lexical entries, and running parses.
//!
//! ```text
//! (load_feature_system <feature_system features (voc round (place lab cor))>)
//! (load_alphabet <alphabet name both segments (("a" (+ voc -round)) ...)>)
//! (load_morpher_rule
//!   <prule rname vowel_deletion
//!          p_lhs <p_lhs pseq ((+ voc -round))>
//!          p_rhs <p_rhs pseq ()>
//!          left_environ <ptemp pseq ((+ voc) "+")>>)
//! (load_lex_entry <lex_entry shape "ne+ta" gloss "(sleep)+PAST">)
//! (trace_lexical_lookup T)
//! (trace_morpher_rule (T T vowel_deletion))
//! (morph_and_lookup_word "neta")
//! ```

use std::fmt::Write;

use log::warn;
use serde::Serialize;

use crate::alphabet::{Alphabet, AlphabetRole, SegmentSpec};
use crate::analysis::AnalysisConfig;
use crate::error::{Error, Result};
use crate::features::{FeatureBundle, FeatureKind, FeatureSystem, PatternBundle, PatternValue};
use crate::lexicon::{LexicalEntry, Lexicon};
use crate::pipeline::{derive, parse_traced, Grammar, Stratum, DEFAULT_MAX_SEGMENTS};
use crate::rule::{ApplicationMode, EnvTerm, Environment, PhonologicalRule};
use crate::sexp::{read_all, Datum};
use crate::trace::{emit_structured, emit_trace, emit_word_analyses, EntryView, TraceConfig};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum OutputFormat {
    /// The angle-bracket notation.
    #[default]
    Text,
    /// One JSON object per line.
    Structured,
}

const MINUS: [&str; 3] = ["-", "–", "−"];

fn is_variable(s: &str) -> Option<&str> {
    if let Some(rest) = s.strip_prefix('^') {
        return (!rest.is_empty()).then_some(rest);
    }
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if ('α'..='ω').contains(&c) => Some(s),
        _ => None,
    }
}

fn sign(s: &str) -> Option<(&'static str, &str)> {
    if let Some(rest) = s.strip_prefix('+') {
        return Some(("+", rest));
    }
    MINUS
        .iter()
        .find_map(|m| s.strip_prefix(m))
        .map(|rest| ("-", rest))
}

/// A feature list such as `(+ voc –round place=lab (^a high))`.
pub fn parse_pattern(d: &Datum) -> Result<PatternBundle> {
    let items = d.as_list().ok_or_else(|| d.error("expected a feature list"))?;
    let mut out = PatternBundle::new();
    add_specs(items, d, &mut out)?;
    Ok(out)
}

fn add_specs(items: &[Datum], at: &Datum, out: &mut PatternBundle) -> Result<()> {
    let mut it = items.iter();
    while let Some(d) = it.next() {
        if d.as_list().is_some() {
            add_specs(d.as_list().unwrap_or_default(), d, out)?;
            continue;
        }
        let s = d.as_sym().ok_or_else(|| d.error("expected a feature specification"))?;
        let mut next_name = || -> Result<String> {
            it.next()
                .and_then(Datum::as_sym)
                .map(str::to_string)
                .ok_or_else(|| d.error(format!("`{s}` must be followed by a feature name")))
        };
        let (name, value) = if let Some(var) = is_variable(s) {
            (next_name()?, PatternValue::var(var))
        } else if let Some((v, rest)) = sign(s) {
            let name = if rest.is_empty() { next_name()? } else { rest.to_string() };
            (name, PatternValue::atom(v))
        } else if let Some((name, value)) = s.split_once('=') {
            if name.is_empty() || value.is_empty() {
                return Err(d.error(format!("malformed specification `{s}`")));
            }
            (name.to_string(), PatternValue::atom(value))
        } else {
            return Err(d.error(format!("expected a feature specification, found `{s}`")));
        };
        if out.get(&name).is_some() {
            return Err(at.error(format!("feature `{name}` specified twice")));
        }
        out.insert(&name, value);
    }
    Ok(())
}

/// A feature list with no variables.
pub fn parse_bundle(d: &Datum) -> Result<FeatureBundle> {
    let p = parse_pattern(d)?;
    if p.has_variables() {
        return Err(d.error("variables are only allowed in rules"));
    }
    Ok(p.concrete())
}

pub fn print_pattern(p: &PatternBundle) -> Datum {
    let mut items = Vec::new();
    for (name, value) in p.iter() {
        match value {
            PatternValue::Atom(v) if &**v == "+" || &**v == "-" => items.push(Datum::sym(&format!("{v}{name}"))),
            PatternValue::Atom(v) => items.push(Datum::sym(&format!("{name}={v}"))),
            PatternValue::Var(v) => items.push(Datum::list(vec![Datum::sym(&format!("^{v}")), Datum::sym(name)])),
        }
    }
    Datum::list(items)
}

/// Splits `key value key value ...` structure items.
fn fields<'a>(items: &'a [Datum], at: &Datum, allowed: &[&str]) -> Result<Vec<(&'a str, &'a Datum)>> {
    if items.len() % 2 != 0 {
        return Err(at.error("structure fields must come in key/value pairs"));
    }
    let mut out: Vec<(&str, &Datum)> = Vec::new();
    for pair in items.chunks(2) {
        let key = pair[0].as_sym().ok_or_else(|| pair[0].error("expected a field name"))?;
        if !allowed.contains(&key) {
            return Err(pair[0].error(format!("unknown field `{key}`")));
        }
        if out.iter().any(|(k, _)| *k == key) {
            return Err(pair[0].error(format!("field `{key}` given twice")));
        }
        out.push((key, &pair[1]));
    }
    Ok(out)
}

fn field<'a>(fields: &[(&str, &'a Datum)], key: &str) -> Option<&'a Datum> {
    fields.iter().find(|(k, _)| *k == key).map(|(_, d)| *d)
}

fn expect_struct<'a>(d: &'a Datum, what: &str) -> Result<&'a [Datum]> {
    d.as_struct()
        .map(|(_, items)| items)
        .ok_or_else(|| d.error(format!("expected a <{what} ...> structure")))
}

fn flag(d: &Datum) -> Result<bool> {
    match d.as_sym() {
        Some("T" | "t") => Ok(true),
        Some("NIL" | "nil" | "F" | "f") => Ok(false),
        _ => Err(d.error("expected T or NIL")),
    }
}

fn number(d: &Datum) -> Result<usize> {
    d.as_sym()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| d.error("expected a non-negative integer"))
}

fn parse_terms(items: &[Datum]) -> Result<Vec<EnvTerm>> {
    items
        .iter()
        .map(|d| {
            if d.as_str().is_some() {
                return Ok(EnvTerm::Boundary);
            }
            let list = d.as_list().ok_or_else(|| d.error("expected a segment, boundary or (opt ...)"))?;
            if list.first().and_then(Datum::as_sym) == Some("opt") {
                let [_, terms, min, max] = list else {
                    return Err(d.error("expected (opt (terms ...) min max)"));
                };
                let terms = terms.as_list().ok_or_else(|| terms.error("expected a term list"))?;
                Ok(EnvTerm::Optional {
                    terms: parse_terms(terms)?,
                    min: number(min)?,
                    max: number(max)?,
                })
            } else {
                parse_pattern(d).map(EnvTerm::Bundle)
            }
        })
        .collect()
}

/// `<ptemp pseq (...) anchored T>` in written order.
fn parse_template(d: &Datum) -> Result<(Vec<EnvTerm>, bool)> {
    let items = expect_struct(d, "ptemp")?;
    let f = fields(items, d, &["pseq", "anchored"])?;
    let terms = match field(&f, "pseq") {
        Some(p) => parse_terms(p.as_list().ok_or_else(|| p.error("pseq must be a list"))?)?,
        None => Vec::new(),
    };
    let anchored = field(&f, "anchored").map(flag).transpose()?.unwrap_or(false);
    Ok((terms, anchored))
}

fn parse_side(d: &Datum) -> Result<Option<PatternBundle>> {
    let (terms, anchored) = parse_template(d)?;
    if anchored {
        return Err(d.error("only environments can be anchored"));
    }
    match terms.as_slice() {
        [] => Ok(None),
        [EnvTerm::Bundle(b)] => Ok(Some(b.clone())),
        [_] => Err(d.error("a rule side must be a single segment")),
        _ => Err(d.error("multi-segment rule sides are not supported")),
    }
}

/// A `<prule ...>` structure.
pub fn parse_rule_expr(d: &Datum) -> Result<PhonologicalRule> {
    let items = expect_struct(d, "prule")?;
    let f = fields(
        items,
        d,
        &["rname", "p_lhs", "p_rhs", "left_environ", "right_environ", "mode"],
    )?;
    let name = field(&f, "rname")
        .ok_or_else(|| d.error("rule has no rname"))?
        .as_text()
        .ok_or_else(|| d.error("rname must be a symbol"))?;
    let input = field(&f, "p_lhs").map(parse_side).transpose()?.flatten();
    let output = field(&f, "p_rhs").map(parse_side).transpose()?.flatten();
    let left = match field(&f, "left_environ") {
        Some(e) => {
            let (t, a) = parse_template(e)?;
            Environment::left(t, a)
        }
        None => Environment::empty(),
    };
    let right = match field(&f, "right_environ") {
        Some(e) => {
            let (t, a) = parse_template(e)?;
            Environment::right(t, a)
        }
        None => Environment::empty(),
    };
    let mode = match field(&f, "mode").map(|m| (m, m.as_sym())) {
        None => ApplicationMode::LeftToRight,
        Some((_, Some("left_to_right"))) => ApplicationMode::LeftToRight,
        Some((_, Some("right_to_left"))) => ApplicationMode::RightToLeft,
        Some((_, Some("simultaneous"))) => ApplicationMode::Simultaneous,
        Some((m, _)) => return Err(m.error("mode must be left_to_right, right_to_left or simultaneous")),
    };
    PhonologicalRule::new(name, input, output, left, right, mode).map_err(Error::from)
}

fn print_terms(terms: &[EnvTerm]) -> Datum {
    Datum::list(
        terms
            .iter()
            .map(|t| match t {
                EnvTerm::Bundle(b) => print_pattern(b),
                EnvTerm::Boundary => Datum::string("+"),
                EnvTerm::Optional { terms, min, max } => Datum::list(vec![
                    Datum::sym("opt"),
                    print_terms(terms),
                    Datum::sym(&min.to_string()),
                    Datum::sym(&max.to_string()),
                ]),
            })
            .collect(),
    )
}

fn print_template(tag: &str, terms: &[EnvTerm], anchored: bool) -> Datum {
    let mut items = vec![Datum::sym("pseq"), print_terms(terms)];
    if anchored {
        items.extend([Datum::sym("anchored"), Datum::sym("T")]);
    }
    Datum::structure(tag, items)
}

/// The inverse of [`parse_rule_expr`].
pub fn print_rule_expr(rule: &PhonologicalRule) -> Datum {
    let side = |tag: &str, b: &Option<PatternBundle>| {
        let terms: Vec<EnvTerm> = b.iter().cloned().map(EnvTerm::Bundle).collect();
        print_template(tag, &terms, false)
    };
    let mut items = vec![
        Datum::sym("rname"),
        Datum::sym(&rule.name),
        Datum::sym("p_lhs"),
        side("p_lhs", &rule.input),
        Datum::sym("p_rhs"),
        side("p_rhs", &rule.output),
    ];
    if !rule.left.is_empty() {
        items.push(Datum::sym("left_environ"));
        items.push(print_template("ptemp", &rule.left.written_left(), rule.left.anchored));
    }
    if !rule.right.is_empty() {
        items.push(Datum::sym("right_environ"));
        items.push(print_template("ptemp", &rule.right.terms, rule.right.anchored));
    }
    let mode = match rule.mode {
        ApplicationMode::LeftToRight => None,
        ApplicationMode::RightToLeft => Some("right_to_left"),
        ApplicationMode::Simultaneous => Some("simultaneous"),
    };
    if let Some(m) = mode {
        items.extend([Datum::sym("mode"), Datum::sym(m)]);
    }
    Datum::structure("prule", items)
}

#[derive(Serialize)]
struct AnalysisLine<'a> {
    event: &'static str,
    word: &'a str,
    analyses: Vec<AnalysisEntry<'a>>,
}

#[derive(Serialize)]
struct AnalysisEntry<'a> {
    shape: String,
    gloss: &'a str,
    underlying: &'a str,
}

/// Interpreter state: the grammar being built, the lexicon, and trace flags.
#[derive(Debug, Clone)]
pub struct Session {
    features: FeatureSystem,
    surface: Option<Alphabet>,
    lexical: Option<Alphabet>,
    strata: Vec<Stratum>,
    current: usize,
    config: AnalysisConfig,
    max_segments: usize,
    lexicon: Lexicon,
    pub trace: TraceConfig,
    pub format: OutputFormat,
    warnings: Vec<String>,
}

impl Default for Session {
    fn default() -> Self {
        Self::new()
    }
}

impl Session {
    pub fn new() -> Self {
        Session {
            features: FeatureSystem::new(),
            surface: None,
            lexical: None,
            strata: vec![Stratum::new("main", Vec::new())],
            current: 0,
            config: AnalysisConfig::default(),
            max_segments: DEFAULT_MAX_SEGMENTS,
            lexicon: Lexicon::new(),
            trace: TraceConfig::default(),
            format: OutputFormat::Text,
            warnings: Vec::new(),
        }
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn config_mut(&mut self) -> &mut AnalysisConfig {
        &mut self.config
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// The grammar as loaded so far.
    pub fn grammar(&self) -> Result<Grammar> {
        let surface = self
            .surface
            .clone()
            .ok_or_else(|| Error::Command("no surface alphabet loaded".into()))?;
        let lexical = self.lexical.clone().unwrap_or_else(|| surface.clone());
        let mut g = Grammar::new(self.features.clone(), surface, lexical);
        g.strata = self.strata.clone();
        g.config = self.config.clone();
        g.max_segments = self.max_segments;
        Ok(g)
    }

    /// Runs every command in `src` and returns what they printed.
    pub fn run(&mut self, src: &str) -> Result<String> {
        let mut out = String::new();
        for d in read_all(src)? {
            self.execute(&d, &mut out)?;
        }
        Ok(out)
    }

    pub fn execute(&mut self, d: &Datum, out: &mut String) -> Result<()> {
        let items = d.as_list().ok_or_else(|| d.error("expected a command"))?;
        let (head, args) = items.split_first().ok_or_else(|| d.error("empty command"))?;
        let name = head.as_sym().ok_or_else(|| head.error("expected a command name"))?;
        let one = || -> Result<&Datum> {
            match args {
                [a] => Ok(a),
                _ => Err(d.error(format!("`{name}` takes one argument"))),
            }
        };
        match name {
            "load_feature_system" => self.load_feature_system(one()?),
            "load_alphabet" => self.load_alphabet(one()?),
            "load_morpher_rule" => {
                let rule = parse_rule_expr(one()?)?;
                rule.validate(&self.features)?;
                if rule.is_self_opaquing() {
                    self.warn(format!("rule `{}` is self-opaquing", rule.name));
                }
                if self.strata.iter().flat_map(|s| &s.rules).any(|r| r.name == rule.name) {
                    self.warn(format!("rule name `{}` is used more than once", rule.name));
                }
                self.strata[self.current].rules.push(rule);
                Ok(())
            }
            "set_stratum" => {
                let a = one()?;
                let s = a.as_text().ok_or_else(|| a.error("expected a stratum name"))?;
                self.current = match self.strata.iter().position(|st| st.name == s) {
                    Some(i) => i,
                    None => {
                        self.strata.push(Stratum::new(s, Vec::new()));
                        self.strata.len() - 1
                    }
                };
                Ok(())
            }
            "load_lex_entry" => self.load_lex_entry(one()?),
            "trace_lexical_lookup" => {
                self.trace.lexical_lookup = flag(one()?)?;
                Ok(())
            }
            "trace_morpher_rule" => {
                let a = one()?;
                let [an, sy, rule] = a.as_list().unwrap_or_default() else {
                    return Err(a.error("expected (T|NIL T|NIL rule-name)"));
                };
                let rule = rule.as_text().ok_or_else(|| rule.error("expected a rule name"))?;
                if !self.strata.iter().flat_map(|s| &s.rules).any(|r| r.name == rule) {
                    self.warn(format!("tracing unknown rule `{rule}`"));
                }
                self.trace.rules.insert(rule.to_string(), (flag(an)?, flag(sy)?));
                Ok(())
            }
            "set_max_undeletions" => {
                self.config.max_deletion_unapplications = number(one()?)?;
                Ok(())
            }
            "set_max_segments" => {
                self.max_segments = number(one()?)?;
                Ok(())
            }
            "morph_and_lookup_word" => {
                let a = one()?;
                let w = a.as_text().ok_or_else(|| a.error("expected a word"))?;
                self.morph_and_lookup(w, out)
            }
            "generate_word" => {
                let a = one()?;
                let w = a.as_text().ok_or_else(|| a.error("expected an underlying shape"))?;
                let surface = self.generate(w)?;
                match self.format {
                    OutputFormat::Text => {
                        let _ = writeln!(out, "(word_synthesis {})", crate::trace::quote(&surface));
                    }
                    OutputFormat::Structured => {
                        let line = serde_json::json!({"event": "word_synthesis", "underlying": w, "surface": surface});
                        let _ = writeln!(out, "{line}");
                    }
                }
                Ok(())
            }
            "show_morpher_rule" => {
                let a = one()?;
                let n = a.as_text().ok_or_else(|| a.error("expected a rule name"))?;
                let rule = self
                    .strata
                    .iter()
                    .flat_map(|s| &s.rules)
                    .find(|r| r.name == n)
                    .ok_or_else(|| a.error(format!("no rule named `{n}`")))?;
                let _ = writeln!(out, "{}", print_rule_expr(rule));
                Ok(())
            }
            _ => Err(head.error(format!("unknown command `{name}`"))),
        }
    }

    fn warn(&mut self, message: String) {
        warn!("{message}");
        self.warnings.push(message);
    }

    fn load_feature_system(&mut self, d: &Datum) -> Result<()> {
        let items = expect_struct(d, "feature_system")?;
        let f = fields(items, d, &["features", "diacritics"])?;
        let mut fs = FeatureSystem::new();
        for (key, kind) in [("features", FeatureKind::Phonetic), ("diacritics", FeatureKind::Diacritic)] {
            let Some(list) = field(&f, key) else { continue };
            for spec in list.as_list().ok_or_else(|| list.error("expected a list of features"))? {
                match (spec.as_sym(), spec.as_list()) {
                    (Some(name), _) => fs.add(name, &["+", "-"], kind),
                    (None, Some([name, values @ ..])) => {
                        let name = name.as_sym().ok_or_else(|| name.error("expected a feature name"))?;
                        let values: Vec<&str> = values
                            .iter()
                            .map(|v| v.as_text().ok_or_else(|| v.error("expected a value")))
                            .collect::<Result<_>>()?;
                        let values: Vec<&str> = values
                            .into_iter()
                            .map(|v| if MINUS.contains(&v) { "-" } else { v })
                            .collect();
                        fs.add(name, &values, kind)
                    }
                    _ => return Err(spec.error("expected a feature or (feature value ...)")),
                }
                .map_err(|e| spec.error(e.to_string()))?;
            }
        }
        self.features = fs;
        Ok(())
    }

    fn load_alphabet(&mut self, d: &Datum) -> Result<()> {
        let items = expect_struct(d, "alphabet")?;
        let f = fields(items, d, &["name", "boundaries", "segments"])?;
        let role = match field(&f, "name").and_then(Datum::as_sym) {
            None | Some("both") => AlphabetRole::Both,
            Some("surface") => AlphabetRole::Surface,
            Some("lexical") => AlphabetRole::Lexical,
            Some(other) => return Err(d.error(format!("unknown alphabet `{other}`"))),
        };
        let mut markers = Vec::new();
        if let Some(b) = field(&f, "boundaries") {
            for m in b.as_list().ok_or_else(|| b.error("expected a list of markers"))? {
                let mut cs = m.as_text().unwrap_or_default().chars();
                match (cs.next(), cs.next()) {
                    (Some(c), None) => markers.push(c),
                    _ => return Err(m.error("a boundary marker is a single character")),
                }
            }
        }
        if markers.is_empty() {
            markers.push('+');
        }
        let segs = field(&f, "segments").ok_or_else(|| d.error("alphabet has no segments"))?;
        let mut specs = Vec::new();
        for s in segs.as_list().ok_or_else(|| segs.error("expected a list of segments"))? {
            let [g, b] = s.as_list().unwrap_or_default() else {
                return Err(s.error("expected (\"grapheme\" (features ...))"));
            };
            let g = g.as_text().ok_or_else(|| g.error("expected a grapheme"))?;
            let bundle = parse_bundle(b)?;
            self.features.validate(&bundle).map_err(|e| b.error(e.to_string()))?;
            specs.push(SegmentSpec::new(g, bundle));
        }
        let alphabet = Alphabet::with_markers(role, specs, markers).map_err(|e| d.error(e.to_string()))?;
        match role {
            AlphabetRole::Surface => self.surface = Some(alphabet),
            AlphabetRole::Lexical => self.lexical = Some(alphabet),
            AlphabetRole::Both => {
                self.surface = Some(alphabet.clone());
                self.lexical = Some(alphabet);
            }
        }
        Ok(())
    }

    fn load_lex_entry(&mut self, d: &Datum) -> Result<()> {
        let items = expect_struct(d, "lex_entry")?;
        let f = fields(items, d, &["shape", "gloss", "diacritics"])?;
        let text = |key: &str| -> Result<&str> {
            field(&f, key)
                .ok_or_else(|| d.error(format!("entry has no {key}")))?
                .as_text()
                .ok_or_else(|| d.error(format!("{key} must be a string")))
        };
        let shape = text("shape")?;
        let gloss = text("gloss")?;
        let diacritics = match field(&f, "diacritics") {
            Some(b) => {
                let bundle = parse_bundle(b)?;
                self.features.validate(&bundle).map_err(|e| b.error(e.to_string()))?;
                bundle
            }
            None => FeatureBundle::new(),
        };
        let alphabet = self
            .lexical
            .as_ref()
            .ok_or_else(|| d.error("load a lexical alphabet before lexical entries"))?;
        let entry = LexicalEntry::with_diacritics(shape, gloss, diacritics, alphabet).map_err(|e| d.error(e.to_string()))?;
        self.lexicon.add(entry);
        Ok(())
    }

    /// Parses `word` and writes the trace, if any, and the analyses.
    pub fn morph_and_lookup(&mut self, word: &str, out: &mut String) -> Result<()> {
        let g = self.grammar()?;
        let parse = parse_traced(word, &g, &self.lexicon, &self.trace)?;
        let views: Vec<EntryView> = parse
            .analyses
            .iter()
            .map(|a| EntryView::real(g.surface.render_lossy(&a.derived.clone().strip_boundaries()), &a.entry.gloss))
            .collect();
        match self.format {
            OutputFormat::Text => {
                if let Some(t) = &parse.trace {
                    out.push_str(&emit_trace(t));
                    out.push('\n');
                }
                out.push_str(&emit_word_analyses(&views));
                out.push('\n');
            }
            OutputFormat::Structured => {
                if let Some(t) = &parse.trace {
                    out.push_str(&emit_structured(t));
                }
                let line = AnalysisLine {
                    event: "analyses",
                    word,
                    analyses: views
                        .iter()
                        .zip(&parse.analyses)
                        .map(|(v, a)| AnalysisEntry {
                            shape: v.shape.clone(),
                            gloss: &a.entry.gloss,
                            underlying: &a.entry.shape,
                        })
                        .collect(),
                };
                out.push_str(&serde_json::to_string(&line).expect("analysis line serializes"));
                out.push('\n');
            }
        }
        Ok(())
    }

    /// The surface form of an underlying shape.
    pub fn generate(&self, shape: &str) -> Result<String> {
        let g = self.grammar()?;
        let entry = LexicalEntry::new(shape, "", &g.lexical)?;
        let word = derive(&entry, &g)?;
        Ok(g.surface.render(&word.strip_boundaries())?)
    }
}
