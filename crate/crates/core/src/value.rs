//! Values and finite ranges.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Upper bound on the number of values an interval range may materialize.
pub const MAX_RANGE_LEN: usize = 1 << 20;

/// A symbolic constant such as `low` or `red`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An element of a variable's range.
///
/// Integers sort before symbols; an integer never equals a symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(BigInt),
    Sym(Symbol),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    Int,
    Sym,
}

impl Value {
    pub fn int(n: i64) -> Self {
        Value::Int(BigInt::from(n))
    }

    pub fn sym(name: &str) -> Self {
        Value::Sym(Symbol::new(name))
    }

    pub fn kind(&self) -> ValueKind {
        match self {
            Value::Int(_) => ValueKind::Int,
            Value::Sym(_) => ValueKind::Sym,
        }
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Int(n) => Some(n),
            Value::Sym(_) => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        self.as_int().and_then(ToPrimitive::to_i64)
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::int(n)
    }
}

impl From<BigInt> for Value {
    fn from(n: BigInt) -> Self {
        Value::Int(n)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Sym(s) => f.write_str(s.as_str()),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Int(n) => match n.to_i64() {
                Some(small) => serializer.serialize_i64(small),
                None => serializer.serialize_str(&n.to_string()),
            },
            Value::Sym(s) => serializer.serialize_str(s.as_str()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RangeError {
    #[error("range is empty")]
    Empty,
    #[error("range lists {0} more than once")]
    Duplicate(Value),
    #[error("range {lo}..{hi} has more than {max} values", max = MAX_RANGE_LEN)]
    TooLarge { lo: BigInt, hi: BigInt },
}

/// The finite, non-empty set of values a variable may take, in declaration order.
#[derive(Clone)]
pub struct Range {
    values: Vec<Value>,
    index: HashMap<Value, u32>,
}

impl Range {
    pub fn new(values: Vec<Value>) -> Result<Self, RangeError> {
        if values.is_empty() {
            return Err(RangeError::Empty);
        }
        let mut index = HashMap::with_capacity(values.len());
        for (i, v) in values.iter().enumerate() {
            if index.insert(v.clone(), i as u32).is_some() {
                return Err(RangeError::Duplicate(v.clone()));
            }
        }
        Ok(Range { values, index })
    }

    /// The inclusive integer interval `lo..hi`.
    pub fn interval(lo: impl Into<BigInt>, hi: impl Into<BigInt>) -> Result<Self, RangeError> {
        let (lo, hi) = (lo.into(), hi.into());
        if lo > hi {
            return Err(RangeError::Empty);
        }
        let len = (&hi - &lo + 1u32).to_usize();
        match len {
            Some(len) if len <= MAX_RANGE_LEN => {
                let mut values = Vec::with_capacity(len);
                let mut cur = lo;
                while cur <= hi {
                    values.push(Value::Int(cur.clone()));
                    cur += 1u32;
                }
                Range::new(values)
            }
            _ => Err(RangeError::TooLarge { lo, hi }),
        }
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; ranges are non-empty by construction.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> &Value {
        &self.values[i]
    }

    pub fn index_of(&self, v: &Value) -> Option<usize> {
        self.index.get(v).map(|&i| i as usize)
    }

    pub fn contains(&self, v: &Value) -> bool {
        self.index.contains_key(v)
    }

    /// `Some((lo, hi))` when the range is the ascending interval `lo..hi` with at least two values.
    pub fn as_interval(&self) -> Option<(&BigInt, &BigInt)> {
        if self.values.len() < 2 {
            return None;
        }
        let first = self.values[0].as_int()?;
        for (i, v) in self.values.iter().enumerate() {
            let n = v.as_int()?;
            if *n != first + BigInt::from(i) {
                return None;
            }
        }
        Some((first, self.values.last()?.as_int()?))
    }

    pub fn all_int(&self) -> bool {
        self.values.iter().all(|v| v.kind() == ValueKind::Int)
    }

    pub fn all_sym(&self) -> bool {
        self.values.iter().all(|v| v.kind() == ValueKind::Sym)
    }
}

impl PartialEq for Range {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values
    }
}

impl Eq for Range {}

impl fmt::Debug for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.values).finish()
    }
}
