//! Built-in verification functions for qualitative properties.
//!
//! A predicate reads the quantitative values of its sibling properties.
//! Unknown identifiers are not an error here; callers fall back to the truth
//! value recorded alongside the object.

use crate::model::Truth;

/// Identifiers the registry can evaluate.
pub const BUILTIN: &[&str] = &["triangle_inequality", "parallel_sides"];

pub fn is_builtin(predicate: &str) -> bool {
    BUILTIN.contains(&predicate)
}

/// Evaluates `predicate` given a lookup for sibling quantities by property
/// name. Returns `None` for unknown predicates or missing inputs.
pub fn evaluate<'a>(predicate: &str, sibling: impl Fn(&str) -> Option<&'a [f64]>) -> Option<Truth> {
    let holds = match predicate {
        "triangle_inequality" => triangle_inequality(sibling("side_sizes")?),
        "parallel_sides" => parallel_sides(sibling("angle_sizes")?),
        _ => return None,
    };
    Some(Truth::Value(if holds { 1.0 } else { 0.0 }))
}

fn triangle_inequality(sides: &[f64]) -> bool {
    let [a, b, c] = sides else { return false };
    a + b > *c && a + c > *b && b + c > *a
}

// Two sides of a polygon are parallel when the interior angles at the ends of
// a transversal side are supplementary.
fn parallel_sides(angles: &[f64]) -> bool {
    let n = angles.len();
    n >= 4 && (0..n).any(|i| (angles[i] + angles[(i + 1) % n] - 180.0).abs() < 1e-9)
}
