//! Rule unapplication: the generation half of generate-and-test.
//!
//! Unapplying a rule never commits to an underlying value. Feature-changing
//! rules uninstantiate the features they set; epenthesis marks candidate
//! segments `+optional`; deletion inserts `+optional` segments carrying the
//! rule's input features.

use log::trace;
use thiserror::Error;

use crate::alphabet::{Segment, Word};
use crate::features::{FeatureBundle, PatternBundle, VariableBinding};
use crate::rule::{find_env, ApplicationMode, MatchMode, PhonologicalRule, RuleKind, Side};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("rule `{rule}` was still changing the word after {passes} passes")]
    PassBoundExceeded { rule: String, passes: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisConfig {
    /// How many simultaneous undeletion passes a deletion rule gets.
    pub max_deletion_unapplications: usize,
    /// Cap on nonvacuous passes of a self-opaquing rule. `None` uses the
    /// word's instantiated-feature count, which can never be exceeded.
    pub max_self_opaquing_passes: Option<usize>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            max_deletion_unapplications: 1,
            max_self_opaquing_passes: None,
        }
    }
}

/// The result of unapplying one rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unapplication {
    pub word: Word,
    /// The word after each pass, in order. A trailing vacuous pass is included.
    pub pass_outputs: Vec<Word>,
    pub nonvacuous_passes: usize,
}

impl Unapplication {
    fn single(word: Word, changed: bool) -> Self {
        Unapplication {
            pass_outputs: vec![word.clone()],
            nonvacuous_passes: usize::from(changed),
            word,
        }
    }
}

pub fn unapply_rule(
    rule: &PhonologicalRule,
    word: &Word,
    config: &AnalysisConfig,
) -> Result<Unapplication, AnalysisError> {
    match rule.kind() {
        RuleKind::FeatureChanging => unapply_feature_changing(rule, word, config),
        RuleKind::Epenthesis => Ok(unapply_epenthesis(rule, word)),
        RuleKind::Deletion => Ok(unapply_deletion(rule, word, config)),
    }
}

/// Unapplies `rules`, given in synthesis order, last rule first.
pub fn unapply_all(
    rules: &[PhonologicalRule],
    word: &Word,
    config: &AnalysisConfig,
) -> Result<Word, AnalysisError> {
    rules.iter().rev().try_fold(word.clone(), |w, r| {
        unapply_rule(r, &w, config).map(|u| u.word)
    })
}

struct FeatureChange<'r> {
    target: FeatureBundle,
    /// Input features the output leaves alone; their variables bind from the target.
    input_rest: PatternBundle,
    output: &'r PatternBundle,
    output_names: Vec<&'r str>,
    rule: &'r PhonologicalRule,
}

impl<'r> FeatureChange<'r> {
    fn new(rule: &'r PhonologicalRule) -> Self {
        let output = rule.output.as_ref().expect("feature-changing rule has output");
        let output_names: Vec<&str> = output.names().collect();
        let input_rest = rule
            .input
            .as_ref()
            .map(|i| i.restrict(|n| output.get(n).is_none()))
            .unwrap_or_default();
        FeatureChange {
            target: rule.analysis_target(),
            input_rest,
            output,
            output_names,
            rule,
        }
    }

    /// Whether the segment at `i` of `word` could be the rule's output,
    /// reading environments from `env_word`.
    fn is_site(&self, word: &Word, env_word: &Word, i: usize) -> bool {
        let seg = &word.segment(i).bundle;
        if !seg.unifies_with(&self.target) {
            return false;
        }
        let Ok(start) = self.input_rest.unify_pattern(seg, &VariableBinding::new()) else {
            return false;
        };
        find_env(&self.rule.left, env_word, i, Side::Left, MatchMode::Analysis, &start, &mut |lm| {
            find_env(
                &self.rule.right,
                env_word,
                i + 1,
                Side::Right,
                MatchMode::Analysis,
                &lm.binding,
                &mut |rm| self.output.unify_pattern(seg, &rm.binding).is_ok(),
            )
        })
    }

    /// Uninstantiates the output features at `i`; true if anything was removed.
    fn rewrite(&self, word: &mut Word, i: usize) -> bool {
        let seg = word.segment_mut(i);
        let before = seg.bundle.len();
        seg.bundle = seg.bundle.uninstantiate(self.output_names.iter().copied());
        seg.bundle.len() != before
    }

    fn pass(&self, word: &Word, env_word: Option<&Word>) -> (Word, usize) {
        let mut out = word.clone();
        let mut changed = 0;
        match self.rule.mode {
            ApplicationMode::LeftToRight => {
                for i in (0..word.len()).rev() {
                    if self.is_site(&out, &out, i) && self.rewrite(&mut out, i) {
                        changed += 1;
                    }
                }
            }
            ApplicationMode::RightToLeft => {
                for i in 0..word.len() {
                    if self.is_site(&out, &out, i) && self.rewrite(&mut out, i) {
                        changed += 1;
                    }
                }
            }
            ApplicationMode::Simultaneous => {
                let env_word = env_word.unwrap_or(word);
                let sites: Vec<usize> = (0..word.len())
                    .filter(|&i| self.is_site(word, env_word, i))
                    .collect();
                for i in sites {
                    if self.rewrite(&mut out, i) {
                        changed += 1;
                    }
                }
            }
        }
        (out, changed)
    }

    /// `word` with the output features removed from every segment that could
    /// itself be an output of the rule.
    fn relaxed(&self, word: &Word) -> Word {
        let mut out = word.clone();
        for i in 0..word.len() {
            if word.segment(i).bundle.unifies_with(&self.target) {
                self.rewrite(&mut out, i);
            }
        }
        out
    }
}

/// One unapplication pass of a feature-changing rule, with no repetition.
pub fn feature_changing_pass(rule: &PhonologicalRule, word: &Word) -> Word {
    FeatureChange::new(rule).pass(word, None).0
}

pub fn unapply_feature_changing(
    rule: &PhonologicalRule,
    word: &Word,
    config: &AnalysisConfig,
) -> Result<Unapplication, AnalysisError> {
    debug_assert_eq!(rule.kind(), RuleKind::FeatureChanging);
    let fc = FeatureChange::new(rule);
    let self_opaquing = rule.is_self_opaquing();
    let bound = config
        .max_self_opaquing_passes
        .unwrap_or_else(|| word.instantiated_features())
        .max(1);
    let mut current = word.clone();
    let mut outputs = Vec::new();
    let mut nonvacuous = 0;
    loop {
        let (next, changed) = fc.pass(&current, None);
        outputs.push(next.clone());
        current = next;
        if changed == 0 {
            break;
        }
        nonvacuous += 1;
        trace!("{}: pass {nonvacuous} changed {changed} segments", rule.name);
        if !self_opaquing {
            break;
        }
        if nonvacuous > bound {
            return Err(AnalysisError::PassBoundExceeded {
                rule: rule.name.clone(),
                passes: nonvacuous,
            });
        }
    }
    if self_opaquing && rule.mode == ApplicationMode::Simultaneous {
        // Two targets can each sit in the other's environment, and then
        // neither pass above frees the other. Reading environments with every
        // possible output uninstantiated catches those sites.
        let relaxed = fc.relaxed(&current);
        if relaxed != current {
            let (next, changed) = fc.pass(&current, Some(&relaxed));
            if changed > 0 {
                nonvacuous += 1;
                outputs.push(next.clone());
                current = next;
            }
        }
    }
    Ok(Unapplication {
        word: current,
        pass_outputs: outputs,
        nonvacuous_passes: nonvacuous,
    })
}

/// Marks every segment that might have been inserted by the rule as optional.
pub fn unapply_epenthesis(rule: &PhonologicalRule, word: &Word) -> Unapplication {
    debug_assert_eq!(rule.kind(), RuleKind::Epenthesis);
    let output = rule.output.as_ref().expect("epenthesis rule has output");
    let sites: Vec<usize> = (0..word.len())
        .filter(|&i| {
            let seg = &word.segment(i).bundle;
            find_env(&rule.left, word, i, Side::Left, MatchMode::Analysis, &VariableBinding::new(), &mut |lm| {
                find_env(&rule.right, word, i + 1, Side::Right, MatchMode::Analysis, &lm.binding, &mut |rm| {
                    output.unify_pattern(seg, &rm.binding).is_ok()
                })
            })
        })
        .collect();
    let mut out = word.clone();
    let mut changed = false;
    for i in sites {
        let seg = out.segment_mut(i);
        changed |= !seg.optional;
        seg.optional = true;
    }
    Unapplication::single(out, changed)
}

fn undeletion_pass(rule: &PhonologicalRule, word: &Word) -> Word {
    let input = rule.input.as_ref().expect("deletion rule has input");
    let mut inserts: Vec<(usize, FeatureBundle)> = Vec::new();
    for gap in 0..=word.len() {
        let mut found = None;
        find_env(&rule.left, word, gap, Side::Left, MatchMode::Analysis, &VariableBinding::new(), &mut |lm| {
            find_env(&rule.right, word, gap, Side::Right, MatchMode::Analysis, &lm.binding, &mut |rm| {
                found = Some(input.resolve_partial(&rm.binding));
                true
            })
        });
        if let Some(bundle) = found {
            inserts.push((gap, bundle));
        }
    }
    let mut out = word.clone();
    for (gap, bundle) in inserts.into_iter().rev() {
        out.insert(gap, Segment::optional(bundle), false);
    }
    out
}

/// Reinserts possibly deleted segments, in at most
/// `max_deletion_unapplications` simultaneous passes.
pub fn unapply_deletion(rule: &PhonologicalRule, word: &Word, config: &AnalysisConfig) -> Unapplication {
    debug_assert_eq!(rule.kind(), RuleKind::Deletion);
    let passes = config.max_deletion_unapplications.max(1);
    let mut current = word.clone();
    let mut outputs = Vec::new();
    let mut nonvacuous = 0;
    for _ in 0..passes {
        let next = undeletion_pass(rule, &current);
        outputs.push(next.clone());
        if next.len() == current.len() {
            break;
        }
        nonvacuous += 1;
        current = next;
    }
    Unapplication {
        word: current,
        pass_outputs: outputs,
        nonvacuous_passes: nonvacuous,
    }
}
