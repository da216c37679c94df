//! Derivation traces and their text and line-delimited JSON renderings.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

/// A lexical entry as shown in a trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryView {
    pub shape: String,
    pub gloss: Option<String>,
}

impl EntryView {
    pub fn virtual_shape(shape: String) -> Self {
        EntryView { shape, gloss: None }
    }

    pub fn real(shape: String, gloss: &str) -> Self {
        EntryView {
            shape,
            gloss: Some(gloss.to_string()),
        }
    }

    pub fn to_text(&self) -> String {
        match &self.gloss {
            Some(g) => format!("<lex_entry shape {} gloss {}>", quote(&self.shape), quote(g)),
            None => format!("<lex_entry shape {}>", quote(&self.shape)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    Root {
        shape: String,
        continuations: Vec<TraceEvent>,
    },
    RuleUnapp {
        rule: String,
        input: EntryView,
        output: EntryView,
        continuations: Vec<TraceEvent>,
    },
    LexLookup {
        virtual_entry: EntryView,
        continuations: Vec<TraceEvent>,
    },
    SuccLookup {
        real: EntryView,
        continuations: Vec<TraceEvent>,
    },
    RuleApp {
        rule: String,
        input: EntryView,
        output: EntryView,
        continuations: Vec<TraceEvent>,
    },
    /// A derivation that reproduced the input.
    WordAnalysis { entry: EntryView },
    /// A candidate dropped because the engine raised an error.
    Failure { message: String },
}

impl TraceEvent {
    pub fn continuations(&self) -> &[TraceEvent] {
        match self {
            TraceEvent::Root { continuations, .. }
            | TraceEvent::RuleUnapp { continuations, .. }
            | TraceEvent::LexLookup { continuations, .. }
            | TraceEvent::SuccLookup { continuations, .. }
            | TraceEvent::RuleApp { continuations, .. } => continuations,
            TraceEvent::WordAnalysis { .. } | TraceEvent::Failure { .. } => &[],
        }
    }

    /// Every `WordAnalysis` leaf, in tree order.
    pub fn leaves(&self) -> Vec<&EntryView> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a EntryView>) {
        if let TraceEvent::WordAnalysis { entry } = self {
            out.push(entry);
        }
        for c in self.continuations() {
            c.collect_leaves(out);
        }
    }

    /// Event-by-event search, pre-order.
    pub fn find_all(&self, pred: &dyn Fn(&TraceEvent) -> bool) -> Vec<&TraceEvent> {
        let mut out = Vec::new();
        self.walk(&mut |e, _| {
            if pred(e) {
                out.push(e);
            }
        });
        out
    }

    fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a TraceEvent, usize)) {
        fn go<'a>(e: &'a TraceEvent, depth: usize, f: &mut dyn FnMut(&'a TraceEvent, usize)) {
            f(e, depth);
            for c in e.continuations() {
                go(c, depth + 1, f);
            }
        }
        go(self, 0, f)
    }
}

/// Which events a parse records.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TraceConfig {
    pub lexical_lookup: bool,
    /// rule name -> (trace analysis, trace synthesis)
    pub rules: BTreeMap<String, (bool, bool)>,
}

impl TraceConfig {
    pub fn is_enabled(&self) -> bool {
        self.lexical_lookup || self.rules.values().any(|&(a, s)| a || s)
    }

    pub fn traces_analysis(&self, rule: &str) -> bool {
        self.rules.get(rule).is_some_and(|t| t.0)
    }

    pub fn traces_synthesis(&self, rule: &str) -> bool {
        self.rules.get(rule).is_some_and(|t| t.1)
    }
}

pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

/// The angle-bracket text form.
pub fn emit_trace(root: &TraceEvent) -> String {
    let mut out = String::new();
    write_event(root, &mut out);
    out
}

fn write_event(e: &TraceEvent, out: &mut String) {
    match e {
        TraceEvent::WordAnalysis { entry } => {
            out.push_str(&entry.to_text());
            return;
        }
        TraceEvent::Failure { message } => {
            let _ = write!(out, "<failure message {}>", quote(message));
            return;
        }
        TraceEvent::Root { shape, .. } => {
            let _ = write!(out, "<trace shape {}", quote(shape));
        }
        TraceEvent::RuleUnapp { rule, input, output, .. } => {
            let _ = write!(
                out,
                "<rule_unapp rname {rule}\ninput {}\noutput {}",
                input.to_text(),
                output.to_text()
            );
        }
        TraceEvent::LexLookup { virtual_entry, .. } => {
            let _ = write!(out, "<lex_lookup virtual\n{}", virtual_entry.to_text());
        }
        TraceEvent::SuccLookup { real, .. } => {
            let _ = write!(out, "<succ_lookup real {}", real.to_text());
        }
        TraceEvent::RuleApp { rule, input, output, .. } => {
            let _ = write!(
                out,
                "<rule_app rname {rule}\ninput {}\noutput {}",
                input.to_text(),
                output.to_text()
            );
        }
    }
    let children = e.continuations();
    out.push_str("\ncontinuations (");
    if children.is_empty() {
        out.push_str(" )\n>");
    } else {
        for c in children {
            out.push('\n');
            write_event(c, out);
        }
        out.push_str(")>");
    }
}

/// `(word_analysis ...)` listing of surface-level analyses.
pub fn emit_word_analyses<'a>(entries: impl IntoIterator<Item = &'a EntryView>) -> String {
    let mut out = String::from("(word_analysis ");
    for e in entries {
        out.push_str(&e.to_text());
        out.push(' ');
    }
    out.push(')');
    out
}

#[derive(Serialize)]
struct EventLine<'a> {
    event: &'static str,
    depth: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    shape: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rname: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<EntryLine<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<EntryLine<'a>>,
    #[serde(rename = "virtual", skip_serializing_if = "Option::is_none")]
    virtual_entry: Option<EntryLine<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    real: Option<EntryLine<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    entry: Option<EntryLine<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    message: Option<&'a str>,
    continuations: usize,
}

#[derive(Serialize)]
struct EntryLine<'a> {
    shape: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    gloss: Option<&'a str>,
}

impl<'a> From<&'a EntryView> for EntryLine<'a> {
    fn from(e: &'a EntryView) -> Self {
        EntryLine {
            shape: &e.shape,
            gloss: e.gloss.as_deref(),
        }
    }
}

/// One JSON object per event, pre-order, with its depth and child count.
pub fn emit_structured(root: &TraceEvent) -> String {
    let mut out = String::new();
    root.walk(&mut |e, depth| {
        let mut line = EventLine {
            event: "",
            depth,
            shape: None,
            rname: None,
            input: None,
            output: None,
            virtual_entry: None,
            real: None,
            entry: None,
            message: None,
            continuations: e.continuations().len(),
        };
        match e {
            TraceEvent::Root { shape, .. } => {
                line.event = "trace";
                line.shape = Some(shape);
            }
            TraceEvent::RuleUnapp { rule, input, output, .. } => {
                line.event = "rule_unapp";
                line.rname = Some(rule);
                line.input = Some(input.into());
                line.output = Some(output.into());
            }
            TraceEvent::LexLookup { virtual_entry, .. } => {
                line.event = "lex_lookup";
                line.virtual_entry = Some(virtual_entry.into());
            }
            TraceEvent::SuccLookup { real, .. } => {
                line.event = "succ_lookup";
                line.real = Some(real.into());
            }
            TraceEvent::RuleApp { rule, input, output, .. } => {
                line.event = "rule_app";
                line.rname = Some(rule);
                line.input = Some(input.into());
                line.output = Some(output.into());
            }
            TraceEvent::WordAnalysis { entry } => {
                line.event = "word_analysis";
                line.entry = Some(entry.into());
            }
            TraceEvent::Failure { message } => {
                line.event = "failure";
                line.message = Some(message);
            }
        }
        out.push_str(&serde_json::to_string(&line).expect("trace line serializes"));
        out.push('\n');
    });
    out
}
