//! Phonological rules, their environments, and environment matching.

mod matching;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::features::{FeatureBundle, FeatureError, FeatureSystem, PatternBundle, PatternValue};

pub use matching::{match_env, match_env_analysis, match_env_synthesis, EnvMatch, MatchMode, Side};
pub(crate) use matching::find_env;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("rule `{0}` has neither input nor output")]
    BothSidesEmpty(String),
    #[error("rule `{rule}`: output variable `{var}` is not bound by the input or an environment")]
    UnboundOutputVariable { rule: String, var: String },
    #[error("rule `{rule}`: {source}")]
    Feature {
        rule: String,
        #[source]
        source: FeatureError,
    },
    #[error("rule `{rule}`: output may not set diacritic feature `{feature}`")]
    DiacriticOutput { rule: String, feature: String },
    #[error("rule `{rule}`: optional sequence has min {min} > max {max}")]
    BadRepetition { rule: String, min: usize, max: usize },
}

/// One element of an environment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnvTerm {
    Bundle(PatternBundle),
    /// A subsequence repeated between `min` and `max` times.
    Optional {
        terms: Vec<EnvTerm>,
        min: usize,
        max: usize,
    },
    /// A morpheme boundary.
    Boundary,
}

impl EnvTerm {
    fn reversed(&self) -> EnvTerm {
        match self {
            EnvTerm::Optional { terms, min, max } => EnvTerm::Optional {
                terms: terms.iter().rev().map(EnvTerm::reversed).collect(),
                min: *min,
                max: *max,
            },
            other => other.clone(),
        }
    }

    fn collect_bundles<'a>(&'a self, out: &mut Vec<&'a PatternBundle>) {
        match self {
            EnvTerm::Bundle(b) => out.push(b),
            EnvTerm::Optional { terms, .. } => terms.iter().for_each(|t| t.collect_bundles(out)),
            EnvTerm::Boundary => {}
        }
    }
}

/// A rule environment. Terms are stored innermost first: for a left
/// environment the first term is the one adjacent to the target.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Environment {
    pub terms: Vec<EnvTerm>,
    /// The match must reach the word edge.
    pub anchored: bool,
}

impl Environment {
    pub fn empty() -> Self {
        Self::default()
    }

    /// A left environment from terms in written (left-to-right) order.
    pub fn left(written: Vec<EnvTerm>, anchored: bool) -> Self {
        Environment {
            terms: written.iter().rev().map(EnvTerm::reversed).collect(),
            anchored,
        }
    }

    /// A right environment from terms in written order.
    pub fn right(written: Vec<EnvTerm>, anchored: bool) -> Self {
        Environment {
            terms: written,
            anchored,
        }
    }

    /// Terms of a left environment in written order.
    pub fn written_left(&self) -> Vec<EnvTerm> {
        self.terms.iter().rev().map(EnvTerm::reversed).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty() && !self.anchored
    }

    fn bundles(&self) -> Vec<&PatternBundle> {
        let mut out = Vec::new();
        self.terms.iter().for_each(|t| t.collect_bundles(&mut out));
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ApplicationMode {
    LeftToRight,
    RightToLeft,
    Simultaneous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    FeatureChanging,
    Epenthesis,
    Deletion,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhonologicalRule {
    pub name: String,
    pub input: Option<PatternBundle>,
    pub output: Option<PatternBundle>,
    pub left: Environment,
    pub right: Environment,
    pub mode: ApplicationMode,
    kind: RuleKind,
}

impl PhonologicalRule {
    pub fn new(
        name: &str,
        input: Option<PatternBundle>,
        output: Option<PatternBundle>,
        left: Environment,
        right: Environment,
        mode: ApplicationMode,
    ) -> Result<Self, RuleError> {
        let kind = classify(name, input.is_some(), output.is_some())?;
        let rule = PhonologicalRule {
            name: name.to_string(),
            input,
            output,
            left,
            right,
            mode,
            kind,
        };
        rule.check_repetitions(&rule.left.terms)?;
        rule.check_repetitions(&rule.right.terms)?;
        if let Some(out) = &rule.output {
            let mut bound: BTreeSet<&str> = BTreeSet::new();
            if let Some(i) = &rule.input {
                bound.extend(i.variables());
            }
            for b in rule.left.bundles().into_iter().chain(rule.right.bundles()) {
                bound.extend(b.variables());
            }
            if let Some(var) = out.variables().into_iter().find(|v| !bound.contains(v)) {
                return Err(RuleError::UnboundOutputVariable {
                    rule: rule.name.clone(),
                    var: var.to_string(),
                });
            }
        }
        Ok(rule)
    }

    /// A feature-changing rule `input -> output / left __ right`.
    pub fn feature_changing(
        name: &str,
        input: PatternBundle,
        output: PatternBundle,
        left: Environment,
        right: Environment,
        mode: ApplicationMode,
    ) -> Result<Self, RuleError> {
        Self::new(name, Some(input), Some(output), left, right, mode)
    }

    fn check_repetitions(&self, terms: &[EnvTerm]) -> Result<(), RuleError> {
        for t in terms {
            if let EnvTerm::Optional { terms, min, max } = t {
                if min > max {
                    return Err(RuleError::BadRepetition {
                        rule: self.name.clone(),
                        min: *min,
                        max: *max,
                    });
                }
                self.check_repetitions(terms)?;
            }
        }
        Ok(())
    }

    /// Checks every feature the rule mentions against `fs`.
    pub fn validate(&self, fs: &FeatureSystem) -> Result<(), RuleError> {
        let wrap = |source| RuleError::Feature {
            rule: self.name.clone(),
            source,
        };
        let mut patterns: Vec<&PatternBundle> = self.left.bundles();
        patterns.extend(self.right.bundles());
        patterns.extend(self.input.iter());
        patterns.extend(self.output.iter());
        for p in patterns {
            fs.validate_pattern(p).map_err(wrap)?;
        }
        if let Some(out) = &self.output {
            if let Some(f) = out.names().find(|n| fs.is_diacritic(n)) {
                return Err(RuleError::DiacriticOutput {
                    rule: self.name.clone(),
                    feature: f.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    /// The features a surface segment must unify with for this rule to have
    /// produced it: the output's concrete features plus the input features
    /// the output leaves alone.
    pub fn analysis_target(&self) -> FeatureBundle {
        let output = self.output.clone().unwrap_or_default();
        let mut target = output.concrete();
        if let Some(input) = &self.input {
            for (name, value) in input.iter() {
                if output.get(name).is_none() {
                    if let PatternValue::Atom(a) = value {
                        target.set_shared(name.into(), a.clone());
                    }
                }
            }
        }
        target
    }

    /// The names the rule's output assigns.
    pub fn output_names(&self) -> Vec<&str> {
        self.output.iter().flat_map(|o| o.names()).collect()
    }

    /// Whether applying the rule could destroy one of its own environments.
    ///
    /// Only the environment that can still change after use counts: the
    /// right one for left-to-right rules, the left one for right-to-left
    /// rules, both for simultaneous rules.
    pub fn is_self_opaquing(&self) -> bool {
        let input = self.input.clone().unwrap_or_default();
        let envs: Vec<&Environment> = match self.mode {
            ApplicationMode::LeftToRight => vec![&self.right],
            ApplicationMode::RightToLeft => vec![&self.left],
            ApplicationMode::Simultaneous => vec![&self.left, &self.right],
        };
        let terms: Vec<&PatternBundle> = envs.iter().flat_map(|e| e.bundles()).collect();
        let input_concrete = input.concrete();
        match self.kind {
            RuleKind::Epenthesis => false,
            RuleKind::Deletion => terms
                .iter()
                .any(|t| t.concrete().unifies_with(&input_concrete)),
            RuleKind::FeatureChanging => {
                let output = self.output.clone().unwrap_or_default();
                let changed = output.concrete();
                let mut change = input_concrete.uninstantiate(output.names());
                for (k, v) in changed.iter() {
                    change.set(k, v);
                }
                let variable_outputs: Vec<&str> = output
                    .iter()
                    .filter(|(_, v)| matches!(v, PatternValue::Var(_)))
                    .map(|(k, _)| k)
                    .collect();
                terms.iter().any(|t| {
                    let c = t.concrete();
                    c.unifies_with(&input_concrete)
                        && (!c.unifies_with(&change) || variable_outputs.iter().any(|f| t.get(f).is_some()))
                })
            }
        }
    }
}

/// Rule kind from which sides are present.
pub fn classify(name: &str, has_input: bool, has_output: bool) -> Result<RuleKind, RuleError> {
    match (has_input, has_output) {
        (true, true) => Ok(RuleKind::FeatureChanging),
        (false, true) => Ok(RuleKind::Epenthesis),
        (true, false) => Ok(RuleKind::Deletion),
        (false, false) => Err(RuleError::BothSidesEmpty(name.to_string())),
    }
}
