//! Properties, specifications, signatures, objects and classes.
//!
//! Everything here is an immutable value. Objects share their class through
//! an [`Arc`], so cloning and indexing an object never copies the class.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("property name must not be empty")]
    EmptyPropertyName,
    #[error("duplicate property `{0}` in specification")]
    DuplicateProperty(String),
    #[error("duplicate method `{0}` in signature")]
    DuplicateMethod(String),
    #[error("object `{base_id}` has {found} values but its class declares {expected} properties")]
    ValueArity { base_id: String, expected: usize, found: usize },
    #[error("value for property `{property}` of object `{base_id}` does not match its kind")]
    ValueKind { base_id: String, property: String },
    #[error("truth value {0} is outside [0, 1]")]
    TruthOutOfRange(f64),
    #[error("quantity must be a nonempty list of finite numbers")]
    InvalidQuantity,
    #[error("object `{0}` must belong to a homogeneous class")]
    InhomogeneousObjectClass(String),
    #[error("cannot infer a class from an empty member list")]
    EmptyMembers,
    #[error("two different classes share the name `{0}`")]
    ConflictingClassName(String),
}

/// Quantitative properties carry a unit, qualitative ones name a
/// verification function.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropertyKind {
    Quantitative { unit: String },
    Qualitative { predicate: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PropertySchema {
    name: String,
    kind: PropertyKind,
}

/// The identity used when comparing properties across objects.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PropertyKey {
    name: String,
    kind: PropertyKind,
}

impl PropertySchema {
    pub fn quantitative(name: impl Into<String>, unit: impl Into<String>) -> Result<Self, ModelError> {
        Self::new(name.into(), PropertyKind::Quantitative { unit: unit.into() })
    }

    pub fn qualitative(name: impl Into<String>, predicate: impl Into<String>) -> Result<Self, ModelError> {
        Self::new(name.into(), PropertyKind::Qualitative { predicate: predicate.into() })
    }

    fn new(name: String, kind: PropertyKind) -> Result<Self, ModelError> {
        if name.is_empty() {
            return Err(ModelError::EmptyPropertyName);
        }
        Ok(Self { name, kind })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &PropertyKind {
        &self.kind
    }

    pub fn unit(&self) -> Option<&str> {
        match &self.kind {
            PropertyKind::Quantitative { unit } => Some(unit),
            PropertyKind::Qualitative { .. } => None,
        }
    }

    pub fn predicate(&self) -> Option<&str> {
        match &self.kind {
            PropertyKind::Qualitative { predicate } => Some(predicate),
            PropertyKind::Quantitative { .. } => None,
        }
    }

    pub fn is_quantitative(&self) -> bool {
        matches!(self.kind, PropertyKind::Quantitative { .. })
    }

    pub fn key(&self) -> PropertyKey {
        PropertyKey { name: self.name.clone(), kind: self.kind.clone() }
    }
}

/// Quantitative properties match on name and unit; qualitative ones on name
/// and verification function. Units compare by identifier, no conversion.
pub fn property_equivalent(p: &PropertySchema, q: &PropertySchema) -> bool {
    p.name == q.name && p.kind == q.kind
}

/// Outcome of a verification function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truth {
    Value(f64),
    /// The `×` entry: the property does not apply to this object.
    NotApplicable,
}

impl Truth {
    pub fn value(v: f64) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&v) {
            return Err(ModelError::TruthOutOfRange(v));
        }
        Ok(Truth::Value(v))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PropertyValue {
    /// A tuple of measurements, e.g. the sizes of all sides.
    Quantity(Vec<f64>),
    Truth(Truth),
}

impl PropertyValue {
    pub fn quantity(values: impl Into<Vec<f64>>) -> Result<Self, ModelError> {
        let values = values.into();
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::InvalidQuantity);
        }
        Ok(PropertyValue::Quantity(values))
    }

    pub fn truth(v: f64) -> Result<Self, ModelError> {
        Truth::value(v).map(PropertyValue::Truth)
    }

    pub fn not_applicable() -> Self {
        PropertyValue::Truth(Truth::NotApplicable)
    }

    fn matches(&self, schema: &PropertySchema) -> bool {
        matches!(
            (self, schema.is_quantitative()),
            (PropertyValue::Quantity(_), true) | (PropertyValue::Truth(_), false)
        )
    }

    fn key(&self) -> ValueKey {
        // -0.0 and 0.0 compare equal, so they must hash equal too.
        let bits = |v: f64| if v == 0.0 { 0u64 } else { v.to_bits() };
        match self {
            PropertyValue::Quantity(vs) => ValueKey::Quantity(vs.iter().map(|&v| bits(v)).collect()),
            PropertyValue::Truth(Truth::Value(v)) => ValueKey::Truth(bits(*v)),
            PropertyValue::Truth(Truth::NotApplicable) => ValueKey::NotApplicable,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum ValueKey {
    Quantity(Vec<u64>),
    Truth(u64),
    NotApplicable,
}

/// Ordered property vector of an object or class.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Specification {
    properties: Vec<PropertySchema>,
}

impl Specification {
    pub fn new(properties: Vec<PropertySchema>) -> Result<Self, ModelError> {
        let mut seen = BTreeSet::new();
        for p in &properties {
            if !seen.insert(p.name.as_str()) {
                return Err(ModelError::DuplicateProperty(p.name.clone()));
            }
        }
        Ok(Self { properties })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn properties(&self) -> &[PropertySchema] {
        &self.properties
    }

    pub fn dimension(&self) -> usize {
        self.properties.len()
    }

    pub fn position(&self, key: &PropertyKey) -> Option<usize> {
        self.properties.iter().position(|p| p.name == key.name && p.kind == key.kind)
    }

    fn keys(&self) -> BTreeSet<PropertyKey> {
        self.properties.iter().map(PropertySchema::key).collect()
    }

    /// Order-insensitive: properties are matched by role, not position.
    pub fn equivalent(&self, other: &Specification) -> bool {
        self.dimension() == other.dimension() && self.keys() == other.keys()
    }
}

pub fn dimension(spec: &Specification) -> usize {
    spec.dimension()
}

/// Ordered method identifiers applicable to an object.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Signature {
    methods: Vec<String>,
}

impl Signature {
    pub fn new(methods: Vec<String>) -> Result<Self, ModelError> {
        let mut seen = BTreeSet::new();
        for m in &methods {
            if !seen.insert(m.as_str()) {
                return Err(ModelError::DuplicateMethod(m.clone()));
            }
        }
        Ok(Self { methods })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn methods(&self) -> &[String] {
        &self.methods
    }

    fn keys(&self) -> BTreeSet<&str> {
        self.methods.iter().map(String::as_str).collect()
    }

    pub fn equivalent(&self, other: &Signature) -> bool {
        self.methods.len() == other.methods.len() && self.keys() == other.keys()
    }
}

/// A `(specification, signature)` pair: the body of a homogeneous class, a
/// core, or a projection.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClassBody {
    pub specification: Specification,
    pub signature: Signature,
}

impl ClassBody {
    pub fn new(specification: Specification, signature: Signature) -> Self {
        Self { specification, signature }
    }

    pub fn is_empty(&self) -> bool {
        self.specification.dimension() == 0 && self.signature.methods.is_empty()
    }

    pub fn equivalent(&self, other: &ClassBody) -> bool {
        self.specification.equivalent(&other.specification) && self.signature.equivalent(&other.signature)
    }

    fn canonical_key(&self) -> BodyKey {
        BodyKey {
            properties: self.specification.keys().into_iter().collect(),
            methods: self.signature.methods.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct BodyKey {
    properties: Vec<PropertyKey>,
    methods: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassForm {
    Homogeneous(ClassBody),
    /// Shared core plus the remainder of each member class, keyed by class name.
    Inhomogeneous {
        core: ClassBody,
        projections: BTreeMap<String, ClassBody>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDescriptor {
    name: String,
    form: ClassForm,
}

impl ClassDescriptor {
    pub fn homogeneous(name: impl Into<String>, specification: Specification, signature: Signature) -> Self {
        Self { name: name.into(), form: ClassForm::Homogeneous(ClassBody::new(specification, signature)) }
    }

    pub fn inhomogeneous(name: impl Into<String>, core: ClassBody, projections: BTreeMap<String, ClassBody>) -> Self {
        Self { name: name.into(), form: ClassForm::Inhomogeneous { core, projections } }
    }

    /// The class of an empty collection.
    pub fn empty(name: impl Into<String>) -> Self {
        Self::homogeneous(name, Specification::empty(), Signature::empty())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn form(&self) -> &ClassForm {
        &self.form
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self.form, ClassForm::Homogeneous(_))
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// The full body of a homogeneous class.
    pub fn body(&self) -> Option<&ClassBody> {
        match &self.form {
            ClassForm::Homogeneous(body) => Some(body),
            ClassForm::Inhomogeneous { .. } => None,
        }
    }

    /// Core and projections merged back into the full body of one member class.
    pub fn member_body(&self, member: &str) -> Option<ClassBody> {
        match &self.form {
            ClassForm::Homogeneous(body) => Some(body.clone()),
            ClassForm::Inhomogeneous { core, projections } => projections.get(member).map(|pr| {
                let mut props = core.specification.properties.clone();
                props.extend(pr.specification.properties.iter().cloned());
                let mut methods = core.signature.methods.clone();
                methods.extend(pr.signature.methods.iter().cloned());
                ClassBody { specification: Specification { properties: props }, signature: Signature { methods } }
            }),
        }
    }

    fn canonical_key(&self) -> ClassKey {
        match &self.form {
            ClassForm::Homogeneous(body) => ClassKey::Homogeneous(body.canonical_key()),
            ClassForm::Inhomogeneous { core, projections } => {
                let mut prs: Vec<BodyKey> = projections.values().map(ClassBody::canonical_key).collect();
                prs.sort();
                ClassKey::Inhomogeneous(core.canonical_key(), prs)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum ClassKey {
    Homogeneous(BodyKey),
    Inhomogeneous(BodyKey, Vec<BodyKey>),
}

/// Homogeneous classes compare bodies; inhomogeneous ones compare cores and
/// the projection families up to a relabelling of member keys.
pub fn classes_equivalent(t1: &ClassDescriptor, t2: &ClassDescriptor) -> bool {
    match (&t1.form, &t2.form) {
        (ClassForm::Homogeneous(a), ClassForm::Homogeneous(b)) => a.equivalent(b),
        (
            ClassForm::Inhomogeneous { core: c1, projections: p1 },
            ClassForm::Inhomogeneous { core: c2, projections: p2 },
        ) => {
            if !c1.equivalent(c2) || p1.len() != p2.len() {
                return false;
            }
            let mut k1: Vec<BodyKey> = p1.values().map(ClassBody::canonical_key).collect();
            let mut k2: Vec<BodyKey> = p2.values().map(ClassBody::canonical_key).collect();
            k1.sort();
            k2.sort();
            k1 == k2
        }
        _ => false,
    }
}

/// An object: identifier, copy index, class and aligned property values.
///
/// Index 0 is the original; clones and indexed copies carry `i >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectInstance {
    base_id: String,
    index: u64,
    class: Arc<ClassDescriptor>,
    values: Vec<PropertyValue>,
}

impl ObjectInstance {
    pub fn new(
        base_id: impl Into<String>,
        class: Arc<ClassDescriptor>,
        values: Vec<PropertyValue>,
    ) -> Result<Self, ModelError> {
        let base_id = base_id.into();
        let body = class.body().ok_or_else(|| ModelError::InhomogeneousObjectClass(base_id.clone()))?;
        let schemas = body.specification.properties();
        if schemas.len() != values.len() {
            return Err(ModelError::ValueArity { base_id, expected: schemas.len(), found: values.len() });
        }
        for (schema, value) in schemas.iter().zip(&values) {
            if !value.matches(schema) {
                return Err(ModelError::ValueKind { base_id, property: schema.name.clone() });
            }
        }
        Ok(Self { base_id, index: 0, class, values })
    }

    pub fn base_id(&self) -> &str {
        &self.base_id
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn class(&self) -> &Arc<ClassDescriptor> {
        &self.class
    }

    pub fn values(&self) -> &[PropertyValue] {
        &self.values
    }

    pub fn specification(&self) -> &Specification {
        &self.body().specification
    }

    pub fn signature(&self) -> &Signature {
        &self.body().signature
    }

    fn body(&self) -> &ClassBody {
        self.class.body().expect("object classes are homogeneous")
    }

    pub fn value_of(&self, name: &str) -> Option<&PropertyValue> {
        let pos = self.specification().properties().iter().position(|p| p.name == name)?;
        self.values.get(pos)
    }

    /// The same object with its index replaced.
    pub fn with_index(&self, index: u64) -> Self {
        Self { index, ..self.clone() }
    }

    /// Hashable identity consistent with [`objects_equal`].
    pub fn equality_key(&self) -> EqualityKey {
        let mut values: Vec<(PropertyKey, ValueKey)> =
            self.specification().properties().iter().zip(&self.values).map(|(s, v)| (s.key(), v.key())).collect();
        values.sort();
        EqualityKey { class: self.class.canonical_key(), values }
    }
}

impl fmt::Display for ObjectInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.index == 0 {
            f.write_str(&self.base_id)
        } else {
            write!(f, "{}_{}", self.base_id, self.index)
        }
    }
}

/// Grouping key: two objects are equal iff their keys are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EqualityKey {
    class: ClassKey,
    values: Vec<(PropertyKey, ValueKey)>,
}

/// Same dimension and equivalent specifications.
pub fn objects_similar(a: &ObjectInstance, b: &ObjectInstance) -> bool {
    let (sa, sb) = (a.specification(), b.specification());
    sa.dimension() == sb.dimension() && sa.equivalent(sb)
}

/// Equivalent classes and equal values, matched property by property.
/// Identifiers and indices are ignored, so an object equals its clones.
pub fn objects_equal(a: &ObjectInstance, b: &ObjectInstance) -> bool {
    if !classes_equivalent(&a.class, &b.class) {
        return false;
    }
    let sb = b.specification();
    a.specification()
        .properties()
        .iter()
        .zip(&a.values)
        .all(|(schema, va)| sb.position(&schema.key()).is_some_and(|pos| values_equal(va, &b.values[pos])))
}

fn values_equal(a: &PropertyValue, b: &PropertyValue) -> bool {
    match (a, b) {
        (PropertyValue::Quantity(x), PropertyValue::Quantity(y)) => x == y,
        (PropertyValue::Truth(Truth::Value(x)), PropertyValue::Truth(Truth::Value(y))) => x == y,
        (PropertyValue::Truth(Truth::NotApplicable), PropertyValue::Truth(Truth::NotApplicable)) => true,
        _ => false,
    }
}

/// Class of a group of objects.
///
/// Members whose classes are all equivalent give a homogeneous class.
/// Otherwise the core holds the properties and methods shared by every
/// distinct member class, and each class keeps its remainder as a projection.
pub fn infer_class(members: &[ObjectInstance], name: &str) -> Result<ClassDescriptor, ModelError> {
    if members.is_empty() {
        return Err(ModelError::EmptyMembers);
    }

    let mut classes: BTreeMap<&str, &ClassBody> = BTreeMap::new();
    for m in members {
        let body = m.body();
        match classes.get(m.class.name()) {
            Some(existing) if *existing != body => {
                return Err(ModelError::ConflictingClassName(m.class.name().to_string()))
            }
            Some(_) => {}
            None => {
                classes.insert(m.class.name(), body);
            }
        }
    }

    let bodies: Vec<&ClassBody> = classes.values().copied().collect();
    if bodies.iter().all(|b| b.equivalent(bodies[0])) {
        // Equivalent bodies may list members in different orders; take the
        // smallest class name's so the result ignores member order.
        let ClassBody { specification, signature } = bodies[0].clone();
        return Ok(ClassDescriptor::homogeneous(name, specification, signature));
    }

    // Core order follows the class with the smallest name, so the result
    // does not depend on member order.
    let reference = bodies[0];
    let shared_props: Vec<PropertySchema> = reference
        .specification
        .properties()
        .iter()
        .filter(|p| bodies.iter().all(|b| b.specification.position(&p.key()).is_some()))
        .cloned()
        .collect();
    let shared_methods: Vec<String> = reference
        .signature
        .methods()
        .iter()
        .filter(|m| bodies.iter().all(|b| b.signature.methods.contains(m)))
        .cloned()
        .collect();

    let projections = classes
        .iter()
        .map(|(class_name, body)| {
            let props = body
                .specification
                .properties()
                .iter()
                .filter(|p| !shared_props.iter().any(|c| property_equivalent(c, p)))
                .cloned()
                .collect();
            let methods = body.signature.methods().iter().filter(|m| !shared_methods.contains(m)).cloned().collect();
            let pr = ClassBody { specification: Specification { properties: props }, signature: Signature { methods } };
            (class_name.to_string(), pr)
        })
        .collect();

    let core = ClassBody {
        specification: Specification { properties: shared_props },
        signature: Signature { methods: shared_methods },
    };
    Ok(ClassDescriptor::inhomogeneous(name, core, projections))
}
