//! Feature systems, feature bundles and the unification algebra.
//!
//! A [`FeatureBundle`] is a partial map from feature names to atomic values.
//! A feature that is absent from a bundle is *uninstantiated*: nothing is
//! known about it, so it unifies with any value. Rule patterns use
//! [`PatternBundle`], whose entries may also be alpha variables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Name of the engine-managed feature marking segments that may not exist.
pub const OPTIONAL_FEATURE: &str = "optional";

/// Two bundles assign distinct values to the same feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("feature bundles are incompatible")]
pub struct Incompatible;

/// A rule output refers to a variable that nothing bound.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("variable `{0}` is unbound")]
pub struct UnboundVariable(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeatureError {
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("value `{value}` is not allowed for feature `{feature}`")]
    BadValue { feature: String, value: String },
    #[error("feature `{0}` declared twice")]
    Duplicate(String),
    #[error("feature `{0}` has no values")]
    NoValues(String),
    #[error("feature `{0}` is reserved")]
    Reserved(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    Phonetic,
    /// Nonphonetic feature carried by a lexical entry rather than by its segments.
    Diacritic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct FeatureDef {
    values: Vec<Arc<str>>,
    kind: FeatureKind,
}

/// The inventory of features a grammar may mention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSystem {
    features: BTreeMap<Arc<str>, FeatureDef>,
    order: Vec<Arc<str>>,
}

impl Default for FeatureSystem {
    fn default() -> Self {
        Self::new()
    }
}

impl FeatureSystem {
    /// An empty system holding only the reserved `optional` feature.
    pub fn new() -> Self {
        let mut fs = FeatureSystem {
            features: BTreeMap::new(),
            order: Vec::new(),
        };
        fs.insert(OPTIONAL_FEATURE, &["+", "-"], FeatureKind::Phonetic);
        fs
    }

    /// A system of binary features, each taking `+` or `-`.
    pub fn binary<'a>(names: impl IntoIterator<Item = &'a str>) -> Result<Self, FeatureError> {
        let mut fs = Self::new();
        for name in names {
            fs.add(name, &["+", "-"], FeatureKind::Phonetic)?;
        }
        Ok(fs)
    }

    pub fn add(&mut self, name: &str, values: &[&str], kind: FeatureKind) -> Result<(), FeatureError> {
        if name == OPTIONAL_FEATURE {
            return Err(FeatureError::Reserved(name.to_string()));
        }
        if self.features.contains_key(name) {
            return Err(FeatureError::Duplicate(name.to_string()));
        }
        if values.is_empty() {
            return Err(FeatureError::NoValues(name.to_string()));
        }
        self.insert(name, values, kind);
        Ok(())
    }

    fn insert(&mut self, name: &str, values: &[&str], kind: FeatureKind) {
        let mut uniq: Vec<Arc<str>> = Vec::new();
        for v in values {
            if !uniq.iter().any(|u| &**u == *v) {
                uniq.push(Arc::from(*v));
            }
        }
        let key: Arc<str> = Arc::from(name);
        self.order.push(key.clone());
        self.features.insert(key, FeatureDef { values: uniq, kind });
    }

    pub fn contains(&self, name: &str) -> bool {
        self.features.contains_key(name)
    }

    pub fn kind(&self, name: &str) -> Option<FeatureKind> {
        self.features.get(name).map(|d| d.kind)
    }

    pub fn is_diacritic(&self, name: &str) -> bool {
        self.kind(name) == Some(FeatureKind::Diacritic)
    }

    pub fn values(&self, name: &str) -> Option<impl Iterator<Item = &str>> {
        self.features.get(name).map(|d| d.values.iter().map(|v| &**v))
    }

    /// Feature names in declaration order, excluding `optional`.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.order
            .iter()
            .map(|n| &**n)
            .filter(|n| *n != OPTIONAL_FEATURE)
    }

    pub fn check_value(&self, name: &str, value: &str) -> Result<(), FeatureError> {
        let def = self
            .features
            .get(name)
            .ok_or_else(|| FeatureError::UnknownFeature(name.to_string()))?;
        if def.values.iter().any(|v| &**v == value) {
            Ok(())
        } else {
            Err(FeatureError::BadValue {
                feature: name.to_string(),
                value: value.to_string(),
            })
        }
    }

    pub fn validate(&self, bundle: &FeatureBundle) -> Result<(), FeatureError> {
        for (name, value) in bundle.iter() {
            self.check_value(name, value)?;
        }
        Ok(())
    }

    pub fn validate_pattern(&self, pattern: &PatternBundle) -> Result<(), FeatureError> {
        for (name, value) in pattern.iter() {
            match value {
                PatternValue::Atom(v) => self.check_value(name, v)?,
                PatternValue::Var(_) => {
                    if !self.contains(name) {
                        return Err(FeatureError::UnknownFeature(name.to_string()));
                    }
                }
            }
        }
        Ok(())
    }
}

thread_local! {
    static OVERWRITES: std::cell::Cell<u64> = const { std::cell::Cell::new(0) };
}

/// How many times [`FeatureBundle::overwrite`] has run on this thread.
pub fn overwrite_count() -> u64 {
    OVERWRITES.with(|c| c.get())
}

/// A partial assignment of concrete values to features.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureBundle(BTreeMap<Arc<str>, Arc<str>>);

impl FeatureBundle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: &str) -> Self {
        self.set(name, value);
        self
    }

    pub fn set(&mut self, name: &str, value: &str) {
        self.0.insert(Arc::from(name), Arc::from(value));
    }

    pub(crate) fn set_shared(&mut self, name: Arc<str>, value: Arc<str>) {
        self.0.insert(name, value);
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.0.get(name).map(|v| &**v)
    }

    pub fn remove(&mut self, name: &str) -> bool {
        self.0.remove(name).is_some()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (&**k, &**v))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(|k| &**k)
    }

    /// True when no feature has distinct values in the two bundles.
    pub fn unifies_with(&self, other: &FeatureBundle) -> bool {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .0
            .iter()
            .all(|(k, v)| large.0.get(k).is_none_or(|w| w == v))
    }

    pub fn unify(&self, other: &FeatureBundle) -> Result<FeatureBundle, Incompatible> {
        if !self.unifies_with(other) {
            return Err(Incompatible);
        }
        let mut out = self.clone();
        for (k, v) in &other.0 {
            out.0.entry(k.clone()).or_insert_with(|| v.clone());
        }
        Ok(out)
    }

    /// True iff every entry of `other` appears in `self` with the same value.
    pub fn contains(&self, other: &FeatureBundle) -> bool {
        other.0.iter().all(|(k, v)| self.0.get(k) == Some(v))
    }

    pub fn uninstantiate<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> FeatureBundle {
        let mut out = self.clone();
        for n in names {
            out.0.remove(n);
        }
        out
    }

    /// Sets every feature named in `output` to its value, resolving variables
    /// through `binding`.
    pub fn overwrite(
        &self,
        output: &PatternBundle,
        binding: &VariableBinding,
    ) -> Result<FeatureBundle, UnboundVariable> {
        OVERWRITES.with(|c| c.set(c.get() + 1));
        let mut out = self.clone();
        for (k, v) in &output.0 {
            let value = match v {
                PatternValue::Atom(a) => a.clone(),
                PatternValue::Var(var) => binding
                    .0
                    .get(&**var)
                    .cloned()
                    .ok_or_else(|| UnboundVariable(var.to_string()))?,
            };
            out.0.insert(k.clone(), value);
        }
        Ok(out)
    }

    /// The entries whose names satisfy `keep`.
    pub fn restrict(&self, keep: impl Fn(&str) -> bool) -> FeatureBundle {
        FeatureBundle(
            self.0
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        )
    }
}

impl fmt::Debug for FeatureBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FeatureBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write_entry(f, k, v)?;
        }
        f.write_str("}")
    }
}

fn write_entry(f: &mut fmt::Formatter<'_>, name: &str, value: &str) -> fmt::Result {
    if value == "+" || value == "-" {
        write!(f, "{value}{name}")
    } else {
        write!(f, "{name}={value}")
    }
}

impl<'a> FromIterator<(&'a str, &'a str)> for FeatureBundle {
    fn from_iter<T: IntoIterator<Item = (&'a str, &'a str)>>(iter: T) -> Self {
        let mut b = FeatureBundle::new();
        for (k, v) in iter {
            b.set(k, v);
        }
        b
    }
}

/// A value in a rule pattern: either a concrete atom or an alpha variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternValue {
    Atom(Arc<str>),
    Var(Arc<str>),
}

impl PatternValue {
    pub fn atom(v: &str) -> Self {
        PatternValue::Atom(Arc::from(v))
    }

    pub fn var(v: &str) -> Self {
        PatternValue::Var(Arc::from(v))
    }
}

/// A feature bundle as written in a rule; entries may be variables.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatternBundle(BTreeMap<Arc<str>, PatternValue>);

impl PatternBundle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: &str) -> Self {
        self.0.insert(Arc::from(name), PatternValue::atom(value));
        self
    }

    pub fn with_var(mut self, name: &str, var: &str) -> Self {
        self.0.insert(Arc::from(name), PatternValue::var(var));
        self
    }

    pub fn insert(&mut self, name: &str, value: PatternValue) {
        self.0.insert(Arc::from(name), value);
    }

    pub fn get(&self, name: &str) -> Option<&PatternValue> {
        self.0.get(name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &PatternValue)> {
        self.0.iter().map(|(k, v)| (&**k, v))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(|k| &**k)
    }

    pub fn variables(&self) -> BTreeSet<&str> {
        self.0
            .values()
            .filter_map(|v| match v {
                PatternValue::Var(n) => Some(&**n),
                PatternValue::Atom(_) => None,
            })
            .collect()
    }

    pub fn has_variables(&self) -> bool {
        self.0.values().any(|v| matches!(v, PatternValue::Var(_)))
    }

    /// The concrete entries, with variable-valued features omitted.
    pub fn concrete(&self) -> FeatureBundle {
        FeatureBundle(
            self.0
                .iter()
                .filter_map(|(k, v)| match v {
                    PatternValue::Atom(a) => Some((k.clone(), a.clone())),
                    PatternValue::Var(_) => None,
                })
                .collect(),
        )
    }

    /// The concrete entries plus every variable entry that `binding` resolves.
    pub fn resolve_partial(&self, binding: &VariableBinding) -> FeatureBundle {
        FeatureBundle(
            self.0
                .iter()
                .filter_map(|(k, v)| match v {
                    PatternValue::Atom(a) => Some((k.clone(), a.clone())),
                    PatternValue::Var(n) => binding.0.get(&**n).map(|a| (k.clone(), a.clone())),
                })
                .collect(),
        )
    }

    pub fn resolve(&self, binding: &VariableBinding) -> Result<FeatureBundle, UnboundVariable> {
        FeatureBundle::new().overwrite(self, binding)
    }

    pub fn restrict(&self, keep: impl Fn(&str) -> bool) -> PatternBundle {
        PatternBundle(
            self.0
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        )
    }

    /// Analysis-mode match: concrete entries must unify with `concrete`;
    /// variables bind to the segment's value or, where the segment leaves
    /// the feature uninstantiated, bind nothing.
    pub fn unify_pattern(
        &self,
        concrete: &FeatureBundle,
        binding: &VariableBinding,
    ) -> Result<VariableBinding, Incompatible> {
        let mut out: Option<VariableBinding> = None;
        for (k, v) in &self.0 {
            let Some(actual) = concrete.0.get(k) else {
                continue;
            };
            match v {
                PatternValue::Atom(a) => {
                    if a != actual {
                        return Err(Incompatible);
                    }
                }
                PatternValue::Var(var) => {
                    let current = out.as_ref().unwrap_or(binding);
                    match current.0.get(var) {
                        Some(bound) if bound != actual => return Err(Incompatible),
                        Some(_) => {}
                        None => {
                            out.get_or_insert_with(|| binding.clone())
                                .0
                                .insert(var.clone(), actual.clone());
                        }
                    }
                }
            }
        }
        Ok(out.unwrap_or_else(|| binding.clone()))
    }

    /// Synthesis-mode match: every entry must be present in the segment,
    /// looking the feature up in `fallback` when the segment lacks it.
    /// Variables bind to the value found and fail on an uninstantiated feature.
    pub fn contained_in(
        &self,
        concrete: &FeatureBundle,
        fallback: &FeatureBundle,
        binding: &VariableBinding,
    ) -> Option<VariableBinding> {
        let mut out: Option<VariableBinding> = None;
        for (k, v) in &self.0 {
            let actual = concrete.0.get(k).or_else(|| fallback.0.get(k))?;
            match v {
                PatternValue::Atom(a) => {
                    if a != actual {
                        return None;
                    }
                }
                PatternValue::Var(var) => {
                    let current = out.as_ref().unwrap_or(binding);
                    match current.0.get(var) {
                        Some(bound) if bound != actual => return None,
                        Some(_) => {}
                        None => {
                            out.get_or_insert_with(|| binding.clone())
                                .0
                                .insert(var.clone(), actual.clone());
                        }
                    }
                }
            }
        }
        Some(out.unwrap_or_else(|| binding.clone()))
    }
}

impl fmt::Debug for PatternBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PatternBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (k, v)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match v {
                PatternValue::Atom(a) => write_entry(f, k, a)?,
                PatternValue::Var(var) => write!(f, "{var}{k}")?,
            }
        }
        f.write_str("]")
    }
}

impl From<&FeatureBundle> for PatternBundle {
    fn from(b: &FeatureBundle) -> Self {
        PatternBundle(
            b.0.iter()
                .map(|(k, v)| (k.clone(), PatternValue::Atom(v.clone())))
                .collect(),
        )
    }
}

/// Values assigned to alpha variables during one rule-application attempt.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VariableBinding(BTreeMap<Arc<str>, Arc<str>>);

impl VariableBinding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(mut self, var: &str, value: &str) -> Self {
        self.0.insert(Arc::from(var), Arc::from(value));
        self
    }

    pub fn get(&self, var: &str) -> Option<&str> {
        self.0.get(var).map(|v| &**v)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }
}
