//! Environment matching, moving outward from a gap between segments.
//!
//! Both relations are backtracking searches over the environment's terms.
//! In analysis, bundle terms unify with segments, boundaries are ignored, and
//! `+optional` segments may be passed over. In synthesis, bundle terms must be
//! contained in segments and boundaries must be present in the word.

use std::ops::Range;

use crate::alphabet::Word;
use crate::features::VariableBinding;

use super::{EnvTerm, Environment};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchMode {
    Analysis,
    Synthesis,
}

/// One way an environment matched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvMatch {
    /// Segment indices between the starting gap and the match's far end.
    pub span: Range<usize>,
    /// Optional segments passed over without consuming a term.
    pub skipped: Vec<usize>,
    pub binding: VariableBinding,
}

#[derive(Clone, Copy)]
enum Frame<'a> {
    Seq(&'a [EnvTerm]),
    Repeat {
        inner: &'a [EnvTerm],
        min: usize,
        max: usize,
        count: usize,
    },
}

struct Matcher<'a, 'f> {
    word: &'a Word,
    side: Side,
    mode: MatchMode,
    anchored: bool,
    start: usize,
    emit: &'f mut dyn FnMut(&EnvMatch) -> bool,
}

impl<'a> Matcher<'a, '_> {
    fn next_index(&self, gap: usize) -> Option<usize> {
        match self.side {
            Side::Left => gap.checked_sub(1),
            Side::Right => (gap < self.word.len()).then_some(gap),
        }
    }

    fn advance(&self, gap: usize) -> usize {
        match self.side {
            Side::Left => gap - 1,
            Side::Right => gap + 1,
        }
    }

    fn at_edge(&self, gap: usize) -> bool {
        match self.side {
            Side::Left => gap == 0,
            Side::Right => gap == self.word.len(),
        }
    }

    /// Returns true when the caller asked to stop.
    fn go(
        &mut self,
        mut stack: Vec<Frame<'a>>,
        gap: usize,
        binding: &VariableBinding,
        skipped: &mut Vec<usize>,
    ) -> bool {
        if self.mode == MatchMode::Analysis && (!stack.is_empty() || self.anchored) {
            if let Some(i) = self.next_index(gap) {
                if self.word.segment(i).optional {
                    skipped.push(i);
                    let stop = self.go(stack.clone(), self.advance(gap), binding, skipped);
                    skipped.pop();
                    if stop {
                        return true;
                    }
                }
            }
        }

        let Some(frame) = stack.pop() else {
            if self.anchored && !self.at_edge(gap) {
                return false;
            }
            let span = match self.side {
                Side::Left => gap..self.start,
                Side::Right => self.start..gap,
            };
            let m = EnvMatch {
                span,
                skipped: skipped.clone(),
                binding: binding.clone(),
            };
            return (self.emit)(&m);
        };

        match frame {
            Frame::Seq([]) => self.go(stack, gap, binding, skipped),
            Frame::Seq([head, rest @ ..]) => {
                stack.push(Frame::Seq(rest));
                match head {
                    EnvTerm::Bundle(p) => {
                        let Some(i) = self.next_index(gap) else {
                            return false;
                        };
                        let seg = self.word.segment(i);
                        let bound = match self.mode {
                            MatchMode::Analysis => p.unify_pattern(&seg.bundle, binding).ok(),
                            MatchMode::Synthesis => {
                                p.contained_in(&seg.bundle, self.word.diacritics(), binding)
                            }
                        };
                        match bound {
                            Some(b) => self.go(stack, self.advance(gap), &b, skipped),
                            None => false,
                        }
                    }
                    EnvTerm::Boundary => match self.mode {
                        MatchMode::Analysis => self.go(stack, gap, binding, skipped),
                        MatchMode::Synthesis => {
                            self.word.has_boundary(gap) && self.go(stack, gap, binding, skipped)
                        }
                    },
                    EnvTerm::Optional { terms, min, max } => {
                        stack.push(Frame::Repeat {
                            inner: terms,
                            min: *min,
                            max: *max,
                            count: 0,
                        });
                        self.go(stack, gap, binding, skipped)
                    }
                }
            }
            Frame::Repeat {
                inner,
                min,
                max,
                count,
            } => {
                if count < max {
                    let mut more = stack.clone();
                    more.push(Frame::Repeat {
                        inner,
                        min,
                        max,
                        count: count + 1,
                    });
                    more.push(Frame::Seq(inner));
                    if self.go(more, gap, binding, skipped) {
                        return true;
                    }
                }
                count >= min && self.go(stack, gap, binding, skipped)
            }
        }
    }
}

/// Runs `f` on each match until it returns true. Returns whether it stopped.
pub(crate) fn find_env(
    env: &Environment,
    word: &Word,
    gap: usize,
    side: Side,
    mode: MatchMode,
    binding: &VariableBinding,
    f: &mut dyn FnMut(&EnvMatch) -> bool,
) -> bool {
    let mut m = Matcher {
        word,
        side,
        mode,
        anchored: env.anchored,
        start: gap,
        emit: f,
    };
    m.go(vec![Frame::Seq(&env.terms)], gap, binding, &mut Vec::new())
}

/// Every distinct match of `env` starting at gap `from` and moving outward.
pub fn match_env(
    env: &Environment,
    word: &Word,
    from: usize,
    side: Side,
    mode: MatchMode,
    binding: &VariableBinding,
) -> Vec<EnvMatch> {
    let mut out: Vec<EnvMatch> = Vec::new();
    if from > word.len() {
        return out;
    }
    find_env(env, word, from, side, mode, binding, &mut |m| {
        if !out.contains(m) {
            out.push(m.clone());
        }
        false
    });
    out
}

pub fn match_env_analysis(
    env: &Environment,
    word: &Word,
    from: usize,
    side: Side,
    binding: &VariableBinding,
) -> Vec<EnvMatch> {
    match_env(env, word, from, side, MatchMode::Analysis, binding)
}

pub fn match_env_synthesis(
    env: &Environment,
    word: &Word,
    from: usize,
    side: Side,
    binding: &VariableBinding,
) -> Vec<EnvMatch> {
    match_env(env, word, from, side, MatchMode::Synthesis, binding)
}
