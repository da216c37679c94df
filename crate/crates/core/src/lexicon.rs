//! Lexical entries and unification-based lookup of virtual words.

use std::collections::BTreeMap;

use crate::alphabet::{Alphabet, AlphabetError, Word};
use crate::features::FeatureBundle;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexicalEntry {
    pub shape: String,
    pub gloss: String,
    pub underlying: Word,
    pub diacritics: FeatureBundle,
}

impl LexicalEntry {
    pub fn new(shape: &str, gloss: &str, alphabet: &Alphabet) -> Result<Self, AlphabetError> {
        Self::with_diacritics(shape, gloss, FeatureBundle::new(), alphabet)
    }

    pub fn with_diacritics(
        shape: &str,
        gloss: &str,
        diacritics: FeatureBundle,
        alphabet: &Alphabet,
    ) -> Result<Self, AlphabetError> {
        let mut underlying = alphabet.to_segments(shape)?;
        underlying.set_diacritics(diacritics.clone());
        Ok(LexicalEntry {
            shape: shape.to_string(),
            gloss: gloss.to_string(),
            underlying,
            diacritics,
        })
    }
}

/// How a virtual word lined up with an entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LookupMatch<'a> {
    pub entry: &'a LexicalEntry,
    /// Virtual-word indices aligned to lexical segments, in order.
    pub kept: Vec<usize>,
    /// Optional virtual-word segments that were left out.
    pub dropped: Vec<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: Vec<LexicalEntry>,
    by_length: BTreeMap<usize, Vec<usize>>,
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, entry: LexicalEntry) {
        self.by_length
            .entry(entry.underlying.len())
            .or_default()
            .push(self.entries.len());
        self.entries.push(entry);
    }

    pub fn entries(&self) -> &[LexicalEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry ids whose length could align with `virtual_word`, in declaration order.
    fn candidates(&self, virtual_word: &Word) -> Vec<usize> {
        let required = virtual_word.segments().iter().filter(|s| !s.optional).count();
        let mut ids: Vec<usize> = self
            .by_length
            .range(required..=virtual_word.len())
            .flat_map(|(_, ids)| ids.iter().copied())
            .collect();
        ids.sort_unstable();
        ids
    }

    /// Every order-preserving alignment of the virtual word with every entry.
    pub fn lookup(&self, virtual_word: &Word) -> Vec<LookupMatch<'_>> {
        let mut out = Vec::new();
        for id in self.candidates(virtual_word) {
            let entry = &self.entries[id];
            let mut kept = Vec::new();
            let mut dropped = Vec::new();
            enumerate(virtual_word, &entry.underlying, 0, 0, &mut kept, &mut dropped, &mut |k, d| {
                let m = LookupMatch {
                    entry,
                    kept: k.to_vec(),
                    dropped: d.to_vec(),
                };
                if !out.contains(&m) {
                    out.push(m);
                }
            });
        }
        out
    }

    /// One alignment per matching entry, in declaration order.
    pub fn lookup_entries(&self, virtual_word: &Word) -> Vec<LookupMatch<'_>> {
        self.candidates(virtual_word)
            .into_iter()
            .filter_map(|id| {
                let entry = &self.entries[id];
                first_alignment(virtual_word, &entry.underlying).map(|(kept, dropped)| LookupMatch {
                    entry,
                    kept,
                    dropped,
                })
            })
            .collect()
    }
}

fn enumerate(
    v: &Word,
    lex: &Word,
    i: usize,
    j: usize,
    kept: &mut Vec<usize>,
    dropped: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize], &[usize]),
) {
    if i == v.len() {
        if j == lex.len() {
            emit(kept, dropped);
        }
        return;
    }
    let seg = v.segment(i);
    if j < lex.len() && seg.bundle.unifies_with(&lex.segment(j).bundle) {
        kept.push(i);
        enumerate(v, lex, i + 1, j + 1, kept, dropped, emit);
        kept.pop();
    }
    if seg.optional {
        dropped.push(i);
        enumerate(v, lex, i + 1, j, kept, dropped, emit);
        dropped.pop();
    }
}

/// Memoized search for a single alignment; keeps are preferred to drops.
fn first_alignment(v: &Word, lex: &Word) -> Option<(Vec<usize>, Vec<usize>)> {
    let (n, m) = (v.len(), lex.len());
    // reachable[i][j]: v[i..] aligns with lex[j..]
    let mut reachable = vec![vec![false; m + 1]; n + 1];
    reachable[n][m] = true;
    for i in (0..n).rev() {
        let seg = v.segment(i);
        for j in (0..=m).rev() {
            let keep = j < m && reachable[i + 1][j + 1] && seg.bundle.unifies_with(&lex.segment(j).bundle);
            let drop = seg.optional && reachable[i + 1][j];
            reachable[i][j] = keep || drop;
        }
    }
    if !reachable[0][0] {
        return None;
    }
    let (mut kept, mut dropped) = (Vec::new(), Vec::new());
    let mut j = 0;
    for i in 0..n {
        let seg = v.segment(i);
        if j < m && reachable[i + 1][j + 1] && seg.bundle.unifies_with(&lex.segment(j).bundle) {
            kept.push(i);
            j += 1;
        } else {
            dropped.push(i);
        }
    }
    Some((kept, dropped))
}
