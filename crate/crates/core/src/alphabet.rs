//! Alphabets, segmental words, and translation between the two.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::features::FeatureBundle;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlphabetError {
    #[error("no segment matches at character offset {0}")]
    UntranslatableAt(usize),
    #[error("word is empty")]
    Empty,
    #[error("morpheme boundary at the edge of the word")]
    BoundaryAtEdge,
    #[error("segment {0} matches no grapheme")]
    Unrenderable(usize),
    #[error("grapheme `{0}` declared twice")]
    DuplicateGrapheme(String),
    #[error("grapheme `{0}` is empty or starts with a boundary marker")]
    BadGrapheme(String),
    #[error("alphabet has no segments")]
    NoSegments,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphabetRole {
    Surface,
    Lexical,
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentSpec {
    pub grapheme: String,
    pub bundle: FeatureBundle,
}

impl SegmentSpec {
    pub fn new(grapheme: &str, bundle: FeatureBundle) -> Self {
        SegmentSpec {
            grapheme: grapheme.to_string(),
            bundle,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    role: AlphabetRole,
    specs: Vec<SegmentSpec>,
    boundary_markers: Vec<char>,
    /// Indices into `specs`, longest grapheme first.
    by_length: Vec<usize>,
}

impl Alphabet {
    pub fn new(role: AlphabetRole, specs: Vec<SegmentSpec>) -> Result<Self, AlphabetError> {
        Self::with_markers(role, specs, vec!['+'])
    }

    pub fn with_markers(
        role: AlphabetRole,
        specs: Vec<SegmentSpec>,
        boundary_markers: Vec<char>,
    ) -> Result<Self, AlphabetError> {
        if specs.is_empty() {
            return Err(AlphabetError::NoSegments);
        }
        let mut seen = BTreeSet::new();
        for s in &specs {
            let first = s.grapheme.chars().next();
            if first.is_none_or(|c| boundary_markers.contains(&c)) {
                return Err(AlphabetError::BadGrapheme(s.grapheme.clone()));
            }
            if !seen.insert(s.grapheme.as_str()) {
                return Err(AlphabetError::DuplicateGrapheme(s.grapheme.clone()));
            }
        }
        let mut by_length: Vec<usize> = (0..specs.len()).collect();
        by_length.sort_by_key(|&i| std::cmp::Reverse(specs[i].grapheme.len()));
        Ok(Alphabet {
            role,
            specs,
            boundary_markers,
            by_length,
        })
    }

    pub fn role(&self) -> AlphabetRole {
        self.role
    }

    pub fn specs(&self) -> &[SegmentSpec] {
        &self.specs
    }

    pub fn boundary_markers(&self) -> &[char] {
        &self.boundary_markers
    }

    pub fn spec(&self, grapheme: &str) -> Option<&SegmentSpec> {
        self.specs.iter().find(|s| s.grapheme == grapheme)
    }

    /// Greedy left-to-right longest-match segmentation. Boundary markers become
    /// word metadata rather than segments.
    pub fn to_segments(&self, text: &str) -> Result<Word, AlphabetError> {
        let mut segments = Vec::new();
        let mut boundaries = BTreeSet::new();
        let mut rest = text;
        let mut offset = 0usize;
        while let Some(c) = rest.chars().next() {
            if self.boundary_markers.contains(&c) {
                if segments.is_empty() {
                    return Err(AlphabetError::BoundaryAtEdge);
                }
                boundaries.insert(segments.len());
                rest = &rest[c.len_utf8()..];
                offset += 1;
                continue;
            }
            let spec = self
                .by_length
                .iter()
                .map(|&i| &self.specs[i])
                .find(|s| rest.starts_with(s.grapheme.as_str()))
                .ok_or(AlphabetError::UntranslatableAt(offset))?;
            segments.push(Segment::new(spec.bundle.clone()));
            rest = &rest[spec.grapheme.len()..];
            offset += spec.grapheme.chars().count();
        }
        if segments.is_empty() {
            return Err(AlphabetError::Empty);
        }
        if boundaries.contains(&segments.len()) {
            return Err(AlphabetError::BoundaryAtEdge);
        }
        Ok(Word {
            segments,
            boundaries,
            knowledge: BoundaryKnowledge::Known,
            diacritics: FeatureBundle::new(),
        })
    }

    /// Every spec whose bundle unifies with the segment, in declaration order.
    pub fn grapheme_candidates(&self, seg: &Segment) -> Vec<&SegmentSpec> {
        self.specs
            .iter()
            .filter(|s| s.bundle.unifies_with(&seg.bundle))
            .collect()
    }

    pub fn render(&self, word: &Word) -> Result<String, AlphabetError> {
        let mut out = String::new();
        for (i, seg) in word.segments.iter().enumerate() {
            if i > 0 && word.knowledge == BoundaryKnowledge::Known && word.boundaries.contains(&i) {
                out.push('+');
            }
            let cands = self.grapheme_candidates(seg);
            if cands.is_empty() {
                return Err(AlphabetError::Unrenderable(i));
            }
            push_segment(&mut out, &cands, seg.optional);
        }
        Ok(out)
    }

    /// Like [`Alphabet::render`], printing `?` for segments that match nothing.
    pub fn render_lossy(&self, word: &Word) -> String {
        let mut out = String::new();
        for (i, seg) in word.segments.iter().enumerate() {
            if i > 0 && word.knowledge == BoundaryKnowledge::Known && word.boundaries.contains(&i) {
                out.push('+');
            }
            let cands = self.grapheme_candidates(seg);
            if cands.is_empty() {
                if seg.optional {
                    out.push_str("(?)");
                } else {
                    out.push('?');
                }
            } else {
                push_segment(&mut out, &cands, seg.optional);
            }
        }
        out
    }
}

fn push_segment(out: &mut String, cands: &[&SegmentSpec], optional: bool) {
    if optional {
        out.push('(');
    }
    if let [only] = cands {
        out.push_str(&only.grapheme);
    } else {
        out.push('[');
        for (j, c) in cands.iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            out.push_str(&c.grapheme);
        }
        out.push(']');
    }
    if optional {
        out.push(')');
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Segment {
    pub bundle: FeatureBundle,
    /// The segment may not exist underlyingly.
    pub optional: bool,
}

impl Segment {
    pub fn new(bundle: FeatureBundle) -> Self {
        Segment {
            bundle,
            optional: false,
        }
    }

    pub fn optional(bundle: FeatureBundle) -> Self {
        Segment {
            bundle,
            optional: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryKnowledge {
    Known,
    Unknown,
}

/// A non-empty sequence of segments with morpheme-boundary metadata.
///
/// Boundary `i` sits between segments `i - 1` and `i`, so only indices in
/// `1..len` are meaningful.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    segments: Vec<Segment>,
    boundaries: BTreeSet<usize>,
    knowledge: BoundaryKnowledge,
    diacritics: FeatureBundle,
}

impl Word {
    /// A word with known (and no) boundaries.
    pub fn new(segments: Vec<Segment>) -> Result<Self, AlphabetError> {
        if segments.is_empty() {
            return Err(AlphabetError::Empty);
        }
        Ok(Word {
            segments,
            boundaries: BTreeSet::new(),
            knowledge: BoundaryKnowledge::Known,
            diacritics: FeatureBundle::new(),
        })
    }

    pub fn from_bundles(bundles: impl IntoIterator<Item = FeatureBundle>) -> Result<Self, AlphabetError> {
        Self::new(bundles.into_iter().map(Segment::new).collect())
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn segment(&self, i: usize) -> &Segment {
        &self.segments[i]
    }

    pub fn segment_mut(&mut self, i: usize) -> &mut Segment {
        &mut self.segments[i]
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    /// Always false; words have at least one segment.
    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn boundaries(&self) -> &BTreeSet<usize> {
        &self.boundaries
    }

    pub fn knowledge(&self) -> BoundaryKnowledge {
        self.knowledge
    }

    pub fn has_boundary(&self, gap: usize) -> bool {
        self.knowledge == BoundaryKnowledge::Known && self.boundaries.contains(&gap)
    }

    pub fn diacritics(&self) -> &FeatureBundle {
        &self.diacritics
    }

    pub fn set_diacritics(&mut self, diacritics: FeatureBundle) {
        self.diacritics = diacritics;
    }

    pub fn with_boundaries(mut self, boundaries: impl IntoIterator<Item = usize>) -> Result<Self, AlphabetError> {
        let len = self.len();
        for b in boundaries {
            if b == 0 || b >= len {
                return Err(AlphabetError::BoundaryAtEdge);
            }
            self.boundaries.insert(b);
        }
        self.knowledge = BoundaryKnowledge::Known;
        Ok(self)
    }

    /// Drops boundary information, as for a word entering analysis.
    pub fn forget_boundaries(mut self) -> Self {
        self.boundaries.clear();
        self.knowledge = BoundaryKnowledge::Unknown;
        self
    }

    /// Removes boundary markers but keeps the word's boundary knowledge.
    pub fn strip_boundaries(mut self) -> Self {
        self.boundaries.clear();
        self
    }

    /// Total number of instantiated features across all segments.
    pub fn instantiated_features(&self) -> usize {
        self.segments.iter().map(|s| s.bundle.len()).sum()
    }

    /// Inserts `seg` at index `at`. A boundary sitting exactly at `at` ends up
    /// after the new segment unless `after_boundary` is set.
    pub fn insert(&mut self, at: usize, seg: Segment, after_boundary: bool) {
        let shifted = self
            .boundaries
            .iter()
            .map(|&b| {
                if b > at || (b == at && !after_boundary) {
                    b + 1
                } else {
                    b
                }
            })
            .collect();
        self.boundaries = shifted;
        self.segments.insert(at, seg);
    }

    /// Removes segment `at`, merging the boundaries on either side of it.
    /// Fails if it is the last segment.
    pub fn remove(&mut self, at: usize) -> Result<Segment, AlphabetError> {
        if self.segments.len() == 1 {
            return Err(AlphabetError::Empty);
        }
        let seg = self.segments.remove(at);
        let len = self.segments.len();
        self.boundaries = self
            .boundaries
            .iter()
            .map(|&b| if b > at { b - 1 } else { b })
            .filter(|&b| b > 0 && b < len)
            .collect();
        Ok(seg)
    }
}
