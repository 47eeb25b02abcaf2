use std::collections::HashMap;
use std::fmt;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::syntax::is_identifier;
use crate::value::{Range, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Exogenous,
    Endogenous,
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VarKind::Exogenous => "exogenous",
            VarKind::Endogenous => "endogenous",
        })
    }
}

/// Position of a variable inside its signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VarRef {
    pub kind: VarKind,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub range: Range,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("variable `{0}` is declared more than once")]
    DuplicateName(String),
    #[error("`{0}` is not a valid variable name")]
    InvalidName(String),
}

/// Exogenous and endogenous variable declarations with their ranges.
///
/// Endogenous declaration order is the canonical variable order. Variables are
/// also numbered by *slot*: exogenous variables first, then endogenous ones.
#[derive(Debug, Clone)]
pub struct Signature {
    exogenous: Vec<VarDecl>,
    endogenous: Vec<VarDecl>,
    lookup: HashMap<String, VarRef>,
}

impl PartialEq for Signature {
    fn eq(&self, other: &Self) -> bool {
        self.exogenous == other.exogenous && self.endogenous == other.endogenous
    }
}

impl Eq for Signature {}

impl Signature {
    pub fn new(
        exogenous: Vec<(String, Range)>,
        endogenous: Vec<(String, Range)>,
    ) -> Result<Self, SignatureError> {
        let mut lookup = HashMap::new();
        let mut decls = |vars: Vec<(String, Range)>, kind: VarKind| {
            let mut out = Vec::with_capacity(vars.len());
            for (index, (name, range)) in vars.into_iter().enumerate() {
                if !is_identifier(&name) {
                    return Err(SignatureError::InvalidName(name));
                }
                if lookup.insert(name.clone(), VarRef { kind, index }).is_some() {
                    return Err(SignatureError::DuplicateName(name));
                }
                out.push(VarDecl { name, range });
            }
            Ok(out)
        };
        let exogenous = decls(exogenous, VarKind::Exogenous)?;
        let endogenous = decls(endogenous, VarKind::Endogenous)?;
        Ok(Signature { exogenous, endogenous, lookup })
    }

    pub fn exogenous(&self) -> &[VarDecl] {
        &self.exogenous
    }

    pub fn endogenous(&self) -> &[VarDecl] {
        &self.endogenous
    }

    pub fn lookup(&self, name: &str) -> Option<VarRef> {
        self.lookup.get(name).copied()
    }

    pub fn decl(&self, var: VarRef) -> &VarDecl {
        match var.kind {
            VarKind::Exogenous => &self.exogenous[var.index],
            VarKind::Endogenous => &self.endogenous[var.index],
        }
    }

    pub fn range(&self, name: &str) -> Option<&Range> {
        self.lookup(name).map(|v| &self.decl(v).range)
    }

    /// Index of `name` in the canonical (endogenous declaration) order.
    pub fn endogenous_index(&self, name: &str) -> Option<usize> {
        match self.lookup(name) {
            Some(VarRef { kind: VarKind::Endogenous, index }) => Some(index),
            _ => None,
        }
    }

    pub fn slot_count(&self) -> usize {
        self.exogenous.len() + self.endogenous.len()
    }

    pub fn slot(&self, var: VarRef) -> usize {
        match var.kind {
            VarKind::Exogenous => var.index,
            VarKind::Endogenous => self.exogenous.len() + var.index,
        }
    }

    pub fn slot_of(&self, name: &str) -> Option<usize> {
        self.lookup(name).map(|v| self.slot(v))
    }

    pub fn decl_at_slot(&self, slot: usize) -> &VarDecl {
        if slot < self.exogenous.len() {
            &self.exogenous[slot]
        } else {
            &self.endogenous[slot - self.exogenous.len()]
        }
    }

    /// Number of contexts, or `None` on overflow.
    pub fn context_count(&self) -> Option<u128> {
        product(self.exogenous.iter())
    }

    /// Number of states, or `None` on overflow.
    pub fn state_count(&self) -> Option<u128> {
        product(self.endogenous.iter())
    }

    pub fn extended_state_count(&self) -> Option<u128> {
        self.context_count()?.checked_mul(self.state_count()?)
    }

    /// Checks that `a` assigns an in-range value to every variable of `kind` and nothing else.
    pub fn check_assignment(&self, a: &Assignment, kind: VarKind) -> Result<(), AssignmentError> {
        let decls = match kind {
            VarKind::Exogenous => &self.exogenous,
            VarKind::Endogenous => &self.endogenous,
        };
        for (name, value) in a.iter() {
            match self.lookup(name) {
                Some(r) if r.kind == kind => {
                    if !self.decl(r).range.contains(value) {
                        return Err(AssignmentError::OutOfRange {
                            var: name.to_string(),
                            value: value.clone(),
                        });
                    }
                }
                _ => return Err(AssignmentError::Unknown { var: name.to_string(), kind }),
            }
        }
        for d in decls {
            if a.get(&d.name).is_none() {
                return Err(AssignmentError::Missing(d.name.clone()));
            }
        }
        Ok(())
    }

    /// Puts the entries of `a` into declaration order.
    pub fn ordered(&self, a: &Assignment, kind: VarKind) -> Assignment {
        let decls = match kind {
            VarKind::Exogenous => &self.exogenous,
            VarKind::Endogenous => &self.endogenous,
        };
        decls
            .iter()
            .filter_map(|d| a.get(&d.name).map(|v| (d.name.clone(), v.clone())))
            .collect()
    }

    /// Every context in lexicographic order of exogenous declaration order.
    pub fn contexts(&self) -> impl Iterator<Item = Assignment> + '_ {
        Odometer::new(self.exogenous.iter().map(|d| d.range.len()).collect())
            .map(move |idx| assignment_from_indices(&self.exogenous, &idx))
    }

    /// Every state in lexicographic order of the canonical variable order.
    pub fn states(&self) -> impl Iterator<Item = Assignment> + '_ {
        Odometer::new(self.endogenous.iter().map(|d| d.range.len()).collect())
            .map(move |idx| assignment_from_indices(&self.endogenous, &idx))
    }
}

fn product<'a>(mut decls: impl Iterator<Item = &'a VarDecl>) -> Option<u128> {
    decls.try_fold(1u128, |acc, d| acc.checked_mul(d.range.len() as u128))
}

pub(crate) fn assignment_from_indices(decls: &[VarDecl], idx: &[usize]) -> Assignment {
    decls
        .iter()
        .zip(idx)
        .map(|(d, &i)| (d.name.clone(), d.range.get(i).clone()))
        .collect()
}

/// Mixed-radix counter yielding every index vector with the first position most significant.
#[derive(Debug, Clone)]
pub(crate) struct Odometer {
    radices: Vec<usize>,
    current: Option<Vec<usize>>,
}

impl Odometer {
    pub(crate) fn new(radices: Vec<usize>) -> Self {
        let current = if radices.contains(&0) {
            None
        } else {
            Some(vec![0; radices.len()])
        };
        Odometer { radices, current }
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().expect("checked above");
        let mut pos = cur.len();
        loop {
            if pos == 0 {
                self.current = None;
                break;
            }
            pos -= 1;
            cur[pos] += 1;
            if cur[pos] < self.radices[pos] {
                break;
            }
            cur[pos] = 0;
        }
        Some(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssignmentError {
    #[error("`{0}` is not assigned")]
    Missing(String),
    #[error("`{var}` is not a declared {kind} variable")]
    Unknown { var: String, kind: VarKind },
    #[error("value {value} is outside the range of `{var}`")]
    OutOfRange { var: String, value: Value },
}

/// A map from variable names to values, in insertion order.
///
/// Contexts (exogenous) and states (endogenous) are both assignments.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Assignment(IndexMap<String, Value>);

pub type Context = Assignment;
pub type State = Assignment;

impl Assignment {
    pub fn new() -> Self {
        Assignment(IndexMap::new())
    }

    pub fn insert(&mut self, name: impl Into<String>, value: Value) -> Option<Value> {
        self.0.insert(name.into(), value)
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.0.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<(S, Value)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (S, Value)>>(iter: I) -> Self {
        Assignment(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

/// A context paired with a state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtendedState {
    pub context: Context,
    pub state: State,
}

impl ExtendedState {
    pub fn new(context: Context, state: State) -> Self {
        ExtendedState { context, state }
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.state.get(name).or_else(|| self.context.get(name))
    }
}

impl fmt::Display for ExtendedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; {})", self.context, self.state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin() -> Range {
        Range::interval(0, 1).unwrap()
    }

    #[test]
    fn names_are_unique_across_kinds() {
        let err = Signature::new(vec![("X".into(), bin())], vec![("X".into(), bin())]).unwrap_err();
        assert_eq!(err, SignatureError::DuplicateName("X".into()));
        let err = Signature::new(vec![], vec![("eq".into(), bin())]).unwrap_err();
        assert_eq!(err, SignatureError::InvalidName("eq".into()));
    }

    #[test]
    fn slots_put_exogenous_first() {
        let sig = Signature::new(
            vec![("U".into(), bin())],
            vec![("A".into(), bin()), ("B".into(), bin())],
        )
        .unwrap();
        assert_eq!(sig.slot_of("U"), Some(0));
        assert_eq!(sig.slot_of("B"), Some(2));
        assert_eq!(sig.decl_at_slot(1).name, "A");
        assert_eq!(sig.extended_state_count(), Some(8));
    }

    #[test]
    fn odometer_is_lexicographic() {
        let seen: Vec<_> = Odometer::new(vec![2, 2]).collect();
        assert_eq!(seen, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(Odometer::new(vec![]).count(), 1);
    }

    #[test]
    fn check_assignment_reports_each_problem() {
        let sig = Signature::new(vec![("U".into(), bin())], vec![("A".into(), bin())]).unwrap();
        let ok: Assignment = [("U", Value::int(1))].into_iter().collect();
        assert!(sig.check_assignment(&ok, VarKind::Exogenous).is_ok());
        let bad: Assignment = [("U", Value::int(9))].into_iter().collect();
        assert!(matches!(
            sig.check_assignment(&bad, VarKind::Exogenous),
            Err(AssignmentError::OutOfRange { .. })
        ));
        assert!(matches!(
            sig.check_assignment(&Assignment::new(), VarKind::Exogenous),
            Err(AssignmentError::Missing(_))
        ));
        let wrong: Assignment = [("U", Value::int(1)), ("A", Value::int(0))].into_iter().collect();
        assert!(matches!(
            sig.check_assignment(&wrong, VarKind::Exogenous),
            Err(AssignmentError::Unknown { .. })
        ));
    }
}
