//! Forward rule application: the test half of generate-and-test.
//!
//! Each rule is applied target first: find a segment containing the rule's
//! input, check both environments, and only then rewrite it. A rule is run
//! exactly once over the word.

use thiserror::Error;

use crate::alphabet::{Segment, Word};
use crate::features::{PatternBundle, VariableBinding};
use crate::rule::{find_env, ApplicationMode, EnvTerm, MatchMode, PhonologicalRule, RuleKind, Side};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthesisError {
    #[error("rule `{rule}`: variable `{var}` is unbound")]
    UnboundVariable { rule: String, var: String },
    #[error("rule `{rule}` deleted every segment of the word")]
    EmptyWord { rule: String },
}

/// The result of applying one rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Application {
    pub word: Word,
    /// Number of rewrites, insertions or deletions performed.
    pub sites: usize,
}

pub fn apply_rule(rule: &PhonologicalRule, word: &Word) -> Result<Application, SynthesisError> {
    match rule.kind() {
        RuleKind::FeatureChanging => apply_feature_changing(rule, word),
        RuleKind::Epenthesis => apply_epenthesis(rule, word),
        RuleKind::Deletion => apply_deletion(rule, word),
    }
}

/// Applies `rules` in order, each to the previous rule's output.
pub fn apply_all(rules: &[PhonologicalRule], word: &Word) -> Result<Word, SynthesisError> {
    rules
        .iter()
        .try_fold(word.clone(), |w, r| apply_rule(r, &w).map(|a| a.word))
}

/// The binding under which the segment at `i` is a target, if it is one.
fn target_binding(rule: &PhonologicalRule, word: &Word, i: usize) -> Option<VariableBinding> {
    let input = rule.input.as_ref().expect("rule has input");
    let start = input.contained_in(&word.segment(i).bundle, word.diacritics(), &VariableBinding::new())?;
    environments_at(rule, word, i, i + 1, &start)
}

fn environments_at(
    rule: &PhonologicalRule,
    word: &Word,
    left_gap: usize,
    right_gap: usize,
    start: &VariableBinding,
) -> Option<VariableBinding> {
    let mut found = None;
    find_env(&rule.left, word, left_gap, Side::Left, MatchMode::Synthesis, start, &mut |lm| {
        find_env(&rule.right, word, right_gap, Side::Right, MatchMode::Synthesis, &lm.binding, &mut |rm| {
            found = Some(rm.binding.clone());
            true
        })
    });
    found
}

fn unbound(rule: &PhonologicalRule) -> impl Fn(crate::features::UnboundVariable) -> SynthesisError + '_ {
    move |e| SynthesisError::UnboundVariable {
        rule: rule.name.clone(),
        var: e.0,
    }
}

pub fn apply_feature_changing(rule: &PhonologicalRule, word: &Word) -> Result<Application, SynthesisError> {
    debug_assert_eq!(rule.kind(), RuleKind::FeatureChanging);
    let output = rule.output.as_ref().expect("feature-changing rule has output");
    let mut out = word.clone();
    let mut sites = 0;
    let mut rewrite = |w: &mut Word, i: usize, b: &VariableBinding| -> Result<(), SynthesisError> {
        let seg = w.segment_mut(i);
        seg.bundle = seg.bundle.overwrite(output, b).map_err(unbound(rule))?;
        sites += 1;
        Ok(())
    };
    match rule.mode {
        ApplicationMode::LeftToRight => {
            for i in 0..word.len() {
                if let Some(b) = target_binding(rule, &out, i) {
                    rewrite(&mut out, i, &b)?;
                }
            }
        }
        ApplicationMode::RightToLeft => {
            for i in (0..word.len()).rev() {
                if let Some(b) = target_binding(rule, &out, i) {
                    rewrite(&mut out, i, &b)?;
                }
            }
        }
        ApplicationMode::Simultaneous => {
            let targets: Vec<(usize, VariableBinding)> = (0..word.len())
                .filter_map(|i| target_binding(rule, word, i).map(|b| (i, b)))
                .collect();
            for (i, b) in targets {
                rewrite(&mut out, i, &b)?;
            }
        }
    }
    Ok(Application { word: out, sites })
}

fn inserted(rule: &PhonologicalRule, output: &PatternBundle, b: &VariableBinding) -> Result<Segment, SynthesisError> {
    Ok(Segment::new(output.resolve(b).map_err(unbound(rule))?))
}

pub fn apply_epenthesis(rule: &PhonologicalRule, word: &Word) -> Result<Application, SynthesisError> {
    debug_assert_eq!(rule.kind(), RuleKind::Epenthesis);
    let output = rule.output.as_ref().expect("epenthesis rule has output");
    // `+ __` puts the new segment after a boundary at the insertion point
    let after_boundary = matches!(rule.left.terms.first(), Some(EnvTerm::Boundary));
    let start = VariableBinding::new();
    let mut out = word.clone();
    let mut sites = 0;
    match rule.mode {
        ApplicationMode::LeftToRight => {
            let mut gap = 0;
            while gap <= out.len() {
                if let Some(b) = environments_at(rule, &out, gap, gap, &start) {
                    out.insert(gap, inserted(rule, output, &b)?, after_boundary);
                    sites += 1;
                    gap += 2;
                } else {
                    gap += 1;
                }
            }
        }
        ApplicationMode::RightToLeft => {
            for gap in (0..=word.len()).rev() {
                if let Some(b) = environments_at(rule, &out, gap, gap, &start) {
                    out.insert(gap, inserted(rule, output, &b)?, after_boundary);
                    sites += 1;
                }
            }
        }
        ApplicationMode::Simultaneous => {
            let gaps: Vec<(usize, VariableBinding)> = (0..=word.len())
                .filter_map(|g| environments_at(rule, word, g, g, &start).map(|b| (g, b)))
                .collect();
            for (gap, b) in gaps.into_iter().rev() {
                out.insert(gap, inserted(rule, output, &b)?, after_boundary);
                sites += 1;
            }
        }
    }
    Ok(Application { word: out, sites })
}

pub fn apply_deletion(rule: &PhonologicalRule, word: &Word) -> Result<Application, SynthesisError> {
    debug_assert_eq!(rule.kind(), RuleKind::Deletion);
    let empty = || SynthesisError::EmptyWord {
        rule: rule.name.clone(),
    };
    let mut out = word.clone();
    let mut sites = 0;
    match rule.mode {
        ApplicationMode::LeftToRight => {
            let mut i = 0;
            while i < out.len() {
                if target_binding(rule, &out, i).is_some() {
                    out.remove(i).map_err(|_| empty())?;
                    sites += 1;
                } else {
                    i += 1;
                }
            }
        }
        ApplicationMode::RightToLeft => {
            for i in (0..word.len()).rev() {
                if i < out.len() && target_binding(rule, &out, i).is_some() {
                    out.remove(i).map_err(|_| empty())?;
                    sites += 1;
                }
            }
        }
        ApplicationMode::Simultaneous => {
            let targets: Vec<usize> = (0..word.len())
                .filter(|&i| target_binding(rule, word, i).is_some())
                .collect();
            for i in targets.into_iter().rev() {
                out.remove(i).map_err(|_| empty())?;
                sites += 1;
            }
        }
    }
    Ok(Application { word: out, sites })
}
