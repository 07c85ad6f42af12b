//! Sample objects: three polygons and the garland bulbs.
//!
//! The same data ships as JSON spec files under `fixtures/`.

use std::sync::Arc;

use crate::model::{ClassDescriptor, ObjectInstance, PropertySchema, PropertyValue, Signature, Specification};

pub struct Polygons {
    /// Triangle.
    pub a: ObjectInstance,
    /// Square.
    pub b: ObjectInstance,
    /// Trapeze.
    pub c: ObjectInstance,
}

fn q(name: &str, unit: &str) -> PropertySchema {
    PropertySchema::quantitative(name, unit).unwrap()
}

fn v(values: &[f64]) -> PropertyValue {
    PropertyValue::quantity(values.to_vec()).unwrap()
}

fn class(name: &str, props: Vec<PropertySchema>, methods: &[&str]) -> Arc<ClassDescriptor> {
    let spec = Specification::new(props).unwrap();
    let sig = Signature::new(methods.iter().map(|m| m.to_string()).collect()).unwrap();
    Arc::new(ClassDescriptor::homogeneous(name, spec, sig))
}

fn shape_props() -> Vec<PropertySchema> {
    vec![q("side_count", "pcs"), q("side_sizes", "cm"), q("angle_count", "pcs"), q("angle_sizes", "deg")]
}

pub fn polygons() -> Polygons {
    let mut tri = shape_props();
    tri.push(PropertySchema::qualitative("triangle_inequality", "triangle_inequality").unwrap());
    let mut trap = shape_props();
    trap.push(PropertySchema::qualitative("parallel_sides", "parallel_sides").unwrap());

    let triangle = class("Triangle", tri, &["perimeter_sum", "heron_area"]);
    let square = class("Square", shape_props(), &["perimeter_sum", "square_area"]);
    let trapeze = class("Trapeze", trap, &["perimeter_sum", "trapeze_area"]);

    let a = ObjectInstance::new(
        "A",
        triangle,
        vec![v(&[3.0]), v(&[3.6, 3.6, 5.9]), v(&[3.0]), v(&[35.0, 35.0, 110.0]), PropertyValue::truth(1.0).unwrap()],
    )
    .unwrap();
    let b = ObjectInstance::new("B", square, vec![v(&[4.0]), v(&[2.0; 4]), v(&[4.0]), v(&[90.0; 4])]).unwrap();
    let c = ObjectInstance::new(
        "C",
        trapeze,
        vec![
            v(&[4.0]),
            v(&[3.6, 5.9, 3.6, 11.8]),
            v(&[4.0]),
            v(&[35.0, 145.0, 145.0, 35.0]),
            PropertyValue::truth(1.0).unwrap(),
        ],
    )
    .unwrap();
    Polygons { a, b, c }
}

/// Bulbs `G, Y, O, B, P, R` with color codes 1 through 6.
pub fn bulbs() -> Vec<ObjectInstance> {
    let bulb = class("Bulb", vec![q("color_code", "code")], &[]);
    ["G", "Y", "O", "B", "P", "R"]
        .iter()
        .enumerate()
        .map(|(i, id)| ObjectInstance::new(*id, bulb.clone(), vec![v(&[(i + 1) as f64])]).unwrap())
        .collect()
}

/// Bulbs selected by identifier, in the order given.
pub fn bulb_set(ids: &[&str]) -> Vec<ObjectInstance> {
    let all = bulbs();
    ids.iter().map(|id| all.iter().find(|b| b.base_id() == *id).expect("known bulb").clone()).collect()
}
