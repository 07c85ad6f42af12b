//! Collections of objects: union, set/multiset predicates, basic set,
//! cloning and indexation.

use std::collections::HashSet;

use thiserror::Error;

use crate::model::{classes_equivalent, infer_class, ClassDescriptor, ModelError, ObjectInstance};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("union needs at least one operand")]
    NoOperands,
    #[error("clone and index shifts must be at least 1")]
    ZeroShift,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// An ordered, multiset-capable sequence of objects with its inferred class.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectCollection {
    label: String,
    elements: Vec<ObjectInstance>,
    class: ClassDescriptor,
}

impl ObjectCollection {
    pub fn new(label: impl Into<String>, elements: Vec<ObjectInstance>) -> Result<Self, AlgebraError> {
        let label = label.into();
        let class_name = format!("T({label})");
        let class =
            if elements.is_empty() { ClassDescriptor::empty(class_name) } else { infer_class(&elements, &class_name)? };
        Ok(Self { label, elements, class })
    }

    pub fn empty(label: impl Into<String>) -> Self {
        let label = label.into();
        let class = ClassDescriptor::empty(format!("T({label})"));
        Self { label, elements: Vec::new(), class }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn elements(&self) -> &[ObjectInstance] {
        &self.elements
    }

    pub fn class(&self) -> &ClassDescriptor {
        &self.class
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ObjectInstance> {
        self.elements.iter()
    }

    /// Relabels the collection; the class is renamed to match.
    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self.class = self.class.with_name(format!("T({})", self.label));
        self
    }

    /// Elements rendered in the `A, A_1, A_2` notation.
    pub fn notation(&self) -> Vec<String> {
        self.elements.iter().map(ToString::to_string).collect()
    }
}

impl<'a> IntoIterator for &'a ObjectCollection {
    type Item = &'a ObjectInstance;
    type IntoIter = std::slice::Iter<'a, ObjectInstance>;

    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum UnionOperand {
    Object(ObjectInstance),
    Collection(ObjectCollection),
}

impl From<ObjectInstance> for UnionOperand {
    fn from(o: ObjectInstance) -> Self {
        UnionOperand::Object(o)
    }
}

impl From<ObjectCollection> for UnionOperand {
    fn from(c: ObjectCollection) -> Self {
        UnionOperand::Collection(c)
    }
}

impl UnionOperand {
    pub fn cardinality(&self) -> usize {
        match self {
            UnionOperand::Object(_) => 1,
            UnionOperand::Collection(c) => c.len(),
        }
    }
}

/// Concatenates operands in order and infers the class of the result.
/// Duplicates are kept; [`is_set`] and [`is_multiset`] classify the outcome.
pub fn union(label: &str, operands: Vec<UnionOperand>) -> Result<ObjectCollection, AlgebraError> {
    if operands.is_empty() {
        return Err(AlgebraError::NoOperands);
    }
    let mut elements = Vec::with_capacity(operands.iter().map(UnionOperand::cardinality).sum());
    for op in operands {
        match op {
            UnionOperand::Object(o) => elements.push(o),
            UnionOperand::Collection(c) => elements.extend(c.elements),
        }
    }
    ObjectCollection::new(label, elements)
}

/// No two elements are equal.
pub fn is_set(c: &ObjectCollection) -> bool {
    let mut seen = HashSet::with_capacity(c.len());
    c.iter().all(|o| seen.insert(o.equality_key()))
}

pub fn is_multiset(c: &ObjectCollection) -> bool {
    c.len() >= 2 && !is_set(c)
}

pub fn is_homogeneous(c: &ObjectCollection) -> bool {
    match c.elements.split_first() {
        None => true,
        Some((first, rest)) => rest.iter().all(|o| classes_equivalent(first.class(), o.class())),
    }
}

pub fn cardinality(c: &ObjectCollection) -> usize {
    c.len()
}

/// First occurrence of every distinct object, in order.
pub fn basic_set(c: &ObjectCollection) -> ObjectCollection {
    let mut seen = HashSet::new();
    let elements: Vec<ObjectInstance> = c.iter().filter(|o| seen.insert(o.equality_key())).cloned().collect();
    let label = format!("bs({})", c.label);
    ObjectCollection::new(label, elements).expect("subset of a well-formed collection")
}

/// `Clone_k(A_i) = A_{i+k}`.
pub fn clone_object(a: &ObjectInstance, k: u64) -> Result<ObjectInstance, AlgebraError> {
    shift(a, k)
}

/// `Clone_k(S)`: every index shifted by `k`, class unchanged.
pub fn clone_collection(c: &ObjectCollection, k: u64) -> Result<ObjectCollection, AlgebraError> {
    if k == 0 {
        return Err(AlgebraError::ZeroShift);
    }
    let elements = c.iter().map(|o| shift(o, k)).collect::<Result<_, _>>()?;
    Ok(ObjectCollection { label: format!("Clone_{k}({})", c.label), elements, class: c.class.clone() })
}

/// `Ind_w(A_i) = A_{i+w}`.
pub fn index_object(a: &ObjectInstance, w: u64) -> Result<ObjectInstance, AlgebraError> {
    shift(a, w)
}

fn shift(a: &ObjectInstance, by: u64) -> Result<ObjectInstance, AlgebraError> {
    if by == 0 {
        return Err(AlgebraError::ZeroShift);
    }
    Ok(a.with_index(a.index() + by))
}
