//! JSON spec files: classes, objects and named sets.
//!
//! ```json
//! {
//!   "classes": {
//!     "Bulb": { "properties": [{ "name": "color_code", "unit": "code" }], "methods": [] }
//!   },
//!   "objects": { "G": { "class": "Bulb", "values": { "color_code": 1 } } },
//!   "sets": { "S1": ["G"] }
//! }
//! ```
//!
//! A property carries either a `unit` (quantitative) or a `predicate`
//! (qualitative). Quantities are a number or a list of numbers. Truth values
//! are a number in `[0, 1]`, the string `"not_applicable"`, or `null`/absent,
//! in which case a built-in predicate evaluates them. Unknown keys and
//! repeated identifiers are rejected.

use std::collections::BTreeSet;
use std::fmt;
use std::marker::PhantomData;
use std::sync::Arc;

use indexmap::IndexMap;
use serde::de::{Deserializer, MapAccess, Visitor};
use serde::Deserialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::algebra::ObjectCollection;
use crate::model::{
    ClassDescriptor, ModelError, ObjectInstance, PropertySchema, PropertyValue, Signature, Specification, Truth,
};
use crate::predicates;

const NOT_APPLICABLE: &str = "not_applicable";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("schema error at line {line}, column {column}: {message}")]
    Schema { line: usize, column: usize, message: String },
    #[error("duplicate {scope} `{id}`")]
    Duplicate { scope: &'static str, id: String },
    #[error("object `{object}` refers to unknown class `{class}`")]
    UnknownClass { object: String, class: String },
    #[error("set `{set}` refers to unknown object `{object}`")]
    UnknownObject { set: String, object: String },
    #[error("unknown set `{0}`")]
    UnknownSet(String),
    #[error("object `{object}`: {detail}")]
    Arity { object: String, detail: String },
    #[error(
        "object `{object}`: property `{property}` uses unknown predicate `{predicate}` and records no truth value"
    )]
    UnknownPredicate { object: String, property: String, predicate: String },
    #[error("class `{class}`: {detail}")]
    Property { class: String, detail: String },
    #[error("object `{object}`, property `{property}`: {detail}")]
    Value { object: String, property: String, detail: String },
}

impl SpecError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            SpecError::Syntax { .. } => "E_SYNTAX",
            SpecError::Schema { .. } => "E_SCHEMA",
            SpecError::Duplicate { .. } => "E_DUPLICATE",
            SpecError::UnknownClass { .. } => "E_UNKNOWN_CLASS",
            SpecError::UnknownObject { .. } => "E_UNKNOWN_OBJECT",
            SpecError::UnknownSet(_) => "E_UNKNOWN_SET",
            SpecError::Arity { .. } => "E_ARITY",
            SpecError::UnknownPredicate { .. } => "E_UNKNOWN_PREDICATE",
            SpecError::Property { .. } => "E_PROPERTY",
            SpecError::Value { .. } => "E_VALUE",
        }
    }
}

/// A validated spec file with every cross-reference resolved.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpecDocument {
    pub classes: IndexMap<String, Arc<ClassDescriptor>>,
    pub objects: IndexMap<String, ObjectInstance>,
    pub sets: IndexMap<String, Vec<String>>,
}

impl SpecDocument {
    pub fn object(&self, id: &str) -> Result<&ObjectInstance, SpecError> {
        self.objects
            .get(id)
            .ok_or_else(|| SpecError::UnknownObject { set: "<command line>".into(), object: id.to_string() })
    }

    /// The named set as a collection, members in declaration order.
    pub fn collection(&self, label: &str) -> Result<ObjectCollection, SpecError> {
        let ids = self.sets.get(label).ok_or_else(|| SpecError::UnknownSet(label.to_string()))?;
        let elements = ids.iter().map(|id| self.objects[id.as_str()].clone()).collect();
        Ok(ObjectCollection::new(label, elements).expect("validated objects"))
    }

    /// An ad-hoc collection of the listed objects.
    pub fn collection_of(&self, label: &str, ids: &[&str]) -> Result<ObjectCollection, SpecError> {
        let elements = ids.iter().map(|id| self.object(id).cloned()).collect::<Result<_, _>>()?;
        Ok(ObjectCollection::new(label, elements).expect("validated objects"))
    }
}

/// Ordered key/value entries that keep duplicates for later validation.
#[derive(Debug)]
struct Entries<V>(Vec<(String, V)>);

impl<V> Default for Entries<V> {
    fn default() -> Self {
        Entries(Vec::new())
    }
}

impl<'de, V: Deserialize<'de>> Deserialize<'de> for Entries<V> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct EntriesVisitor<V>(PhantomData<V>);

        impl<'de, V: Deserialize<'de>> Visitor<'de> for EntriesVisitor<V> {
            type Value = Entries<V>;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = map.next_entry()? {
                    out.push((k, v));
                }
                Ok(Entries(out))
            }
        }

        deserializer.deserialize_map(EntriesVisitor(PhantomData))
    }
}

impl<V> Entries<V> {
    fn unique(self, scope: &'static str) -> Result<IndexMap<String, V>, SpecError> {
        let mut map = IndexMap::with_capacity(self.0.len());
        for (k, v) in self.0 {
            if map.contains_key(&k) {
                return Err(SpecError::Duplicate { scope, id: k });
            }
            map.insert(k, v);
        }
        Ok(map)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    #[serde(default)]
    classes: Entries<RawClass>,
    #[serde(default)]
    objects: Entries<RawObject>,
    #[serde(default)]
    sets: Entries<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClass {
    properties: Vec<RawProperty>,
    #[serde(default)]
    methods: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProperty {
    name: String,
    unit: Option<String>,
    predicate: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObject {
    class: String,
    #[serde(default)]
    values: Entries<Value>,
}

pub fn parse_spec(text: &str) -> Result<SpecDocument, SpecError> {
    if text.trim().is_empty() {
        return Ok(SpecDocument::default());
    }
    let raw: RawDocument = serde_json::from_str(text).map_err(|e| {
        let (line, column, message) = (e.line(), e.column(), e.to_string());
        if e.is_data() {
            SpecError::Schema { line, column, message }
        } else {
            SpecError::Syntax { line, column, message }
        }
    })?;

    let mut classes = IndexMap::new();
    for (name, rc) in raw.classes.unique("class")? {
        let class = build_class(&name, rc)?;
        classes.insert(name, Arc::new(class));
    }

    let mut objects = IndexMap::new();
    for (id, ro) in raw.objects.unique("object")? {
        let class = classes
            .get(&ro.class)
            .ok_or_else(|| SpecError::UnknownClass { object: id.clone(), class: ro.class.clone() })?
            .clone();
        let values = ro.values.unique("value")?;
        let object = build_object(&id, class, values)?;
        objects.insert(id, object);
    }

    let mut sets = IndexMap::new();
    for (label, members) in raw.sets.unique("set")? {
        if let Some(missing) = members.iter().find(|m| !objects.contains_key(*m)) {
            return Err(SpecError::UnknownObject { set: label, object: missing.clone() });
        }
        sets.insert(label, members);
    }

    Ok(SpecDocument { classes, objects, sets })
}

fn build_class(name: &str, rc: RawClass) -> Result<ClassDescriptor, SpecError> {
    let bad = |detail: String| SpecError::Property { class: name.to_string(), detail };
    let mut props = Vec::with_capacity(rc.properties.len());
    let mut names = BTreeSet::new();
    for rp in rc.properties {
        if !names.insert(rp.name.clone()) {
            return Err(SpecError::Duplicate { scope: "property", id: format!("{name}.{}", rp.name) });
        }
        let schema = match (rp.unit, rp.predicate) {
            (Some(unit), None) => PropertySchema::quantitative(rp.name, unit),
            (None, Some(pred)) => PropertySchema::qualitative(rp.name, pred),
            _ => return Err(bad(format!("property `{}` needs exactly one of `unit` or `predicate`", rp.name))),
        };
        props.push(schema.map_err(|e| bad(e.to_string()))?);
    }
    let mut methods = BTreeSet::new();
    if let Some(dup) = rc.methods.iter().find(|m| !methods.insert(m.as_str())) {
        return Err(SpecError::Duplicate { scope: "method", id: format!("{name}.{dup}") });
    }
    let spec = Specification::new(props).map_err(|e| bad(e.to_string()))?;
    let sig = Signature::new(rc.methods).map_err(|e| bad(e.to_string()))?;
    Ok(ClassDescriptor::homogeneous(name, spec, sig))
}

fn build_object(
    id: &str,
    class: Arc<ClassDescriptor>,
    mut raw: IndexMap<String, Value>,
) -> Result<ObjectInstance, SpecError> {
    let body = class.body().expect("spec-file classes are homogeneous");
    let schemas = body.specification.properties();
    let arity = |detail: String| SpecError::Arity { object: id.to_string(), detail };
    let value_err = |property: &str, detail: String| SpecError::Value {
        object: id.to_string(),
        property: property.to_string(),
        detail,
    };

    if let Some(extra) = raw.keys().find(|k| !schemas.iter().any(|s| s.name() == k.as_str())) {
        return Err(arity(format!("value for undeclared property `{extra}`")));
    }

    // Quantities first, so predicates can read them.
    let mut quantities: IndexMap<&str, Vec<f64>> = IndexMap::new();
    for schema in schemas.iter().filter(|s| s.is_quantitative()) {
        let v = raw
            .swap_remove(schema.name())
            .ok_or_else(|| arity(format!("missing value for property `{}`", schema.name())))?;
        let list = match v {
            Value::Number(n) => vec![n.as_f64().unwrap_or(f64::NAN)],
            Value::Array(items) => items
                .iter()
                .map(|x| x.as_f64().ok_or(()))
                .collect::<Result<_, _>>()
                .map_err(|_| arity(format!("property `{}` expects numbers", schema.name())))?,
            _ => return Err(arity(format!("property `{}` expects a number or a list of numbers", schema.name()))),
        };
        PropertyValue::quantity(list.clone()).map_err(|e| value_err(schema.name(), e.to_string()))?;
        quantities.insert(schema.name(), list);
    }

    let mut values = Vec::with_capacity(schemas.len());
    for schema in schemas {
        let value = match schema.predicate() {
            None => PropertyValue::Quantity(quantities[schema.name()].clone()),
            Some(predicate) => match raw.swap_remove(schema.name()).unwrap_or(Value::Null) {
                Value::Number(n) => {
                    let t = n.as_f64().unwrap_or(f64::NAN);
                    PropertyValue::truth(t).map_err(|e| value_err(schema.name(), e.to_string()))?
                }
                Value::String(s) if s == NOT_APPLICABLE => PropertyValue::not_applicable(),
                Value::Null => {
                    let truth = predicates::evaluate(predicate, |name| quantities.get(name).map(Vec::as_slice));
                    match truth {
                        Some(t) => PropertyValue::Truth(t),
                        None if predicates::is_builtin(predicate) => {
                            return Err(value_err(schema.name(), format!("predicate `{predicate}` lacks its inputs")))
                        }
                        None => {
                            return Err(SpecError::UnknownPredicate {
                                object: id.to_string(),
                                property: schema.name().to_string(),
                                predicate: predicate.to_string(),
                            })
                        }
                    }
                }
                _ => {
                    return Err(arity(format!(
                        "property `{}` expects a truth value in [0, 1] or \"{NOT_APPLICABLE}\"",
                        schema.name()
                    )))
                }
            },
        };
        values.push(value);
    }

    ObjectInstance::new(id, class, values).map_err(|e: ModelError| arity(e.to_string()))
}

/// Writes a document back as pretty-printed JSON in declaration order.
/// Evaluated truth values are written out explicitly.
pub fn serialize_spec(doc: &SpecDocument) -> String {
    let classes: Map<String, Value> = doc
        .classes
        .iter()
        .map(|(name, class)| {
            let body = class.body().expect("spec-file classes are homogeneous");
            let props: Vec<Value> = body
                .specification
                .properties()
                .iter()
                .map(|p| match (p.unit(), p.predicate()) {
                    (Some(u), _) => json!({ "name": p.name(), "unit": u }),
                    (_, Some(pr)) => json!({ "name": p.name(), "predicate": pr }),
                    _ => unreachable!("a property has a unit or a predicate"),
                })
                .collect();
            (name.clone(), json!({ "properties": props, "methods": body.signature.methods() }))
        })
        .collect();

    let objects: Map<String, Value> = doc
        .objects
        .iter()
        .map(|(id, obj)| {
            let values: Map<String, Value> = obj
                .specification()
                .properties()
                .iter()
                .zip(obj.values())
                .map(|(schema, v)| {
                    let json = match v {
                        PropertyValue::Quantity(q) if q.len() == 1 => json!(q[0]),
                        PropertyValue::Quantity(q) => json!(q),
                        PropertyValue::Truth(Truth::Value(t)) => json!(t),
                        PropertyValue::Truth(Truth::NotApplicable) => json!(NOT_APPLICABLE),
                    };
                    (schema.name().to_string(), json)
                })
                .collect();
            (id.clone(), json!({ "class": obj.class().name(), "values": values }))
        })
        .collect();

    let sets: Map<String, Value> = doc.sets.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    let doc = json!({ "classes": classes, "objects": objects, "sets": sets });
    let mut text = serde_json::to_string_pretty(&doc).expect("JSON values always serialize");
    text.push('\n');
    text
}
