//! Multiset constructors: UCM, CP, RCL, PS and D2.
//!
//! Every constructor emits copies that are distinguishable by
//! `(base_id, index)`. Outputs are capped at [`MAX_OUTPUT`] elements and the
//! size is checked before anything is built.

use itertools::Itertools;
use thiserror::Error;

use crate::algebra::{clone_collection, index_object, is_set, AlgebraError, ObjectCollection};
use crate::model::{objects_equal, ObjectInstance};

/// Largest collection any constructor will build.
pub const MAX_OUTPUT: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructError {
    #[error("input `{0}` is not a set: it contains equal objects")]
    NotASet(String),
    #[error("input `{0}` must not be empty")]
    EmptyInput(String),
    #[error("inputs `{0}` and `{1}` share equal objects")]
    Overlap(String, String),
    #[error("{constructor} needs a basic set of at least {min} objects, got {found}")]
    TooSmall { constructor: &'static str, min: usize, found: usize },
    #[error("subset bounds [{min}, {max}] are invalid for a set of {n} objects")]
    BadBounds { min: usize, max: usize, n: usize },
    #[error("multiplicity spec lists equal objects `{0}` and `{1}`")]
    RepeatedEntry(String, String),
    #[error("output of {requested} elements exceeds the cap of {MAX_OUTPUT}")]
    CapExceeded { requested: u128 },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

fn check_cap(requested: Option<u128>) -> Result<(), ConstructError> {
    match requested {
        Some(r) if r <= MAX_OUTPUT => Ok(()),
        Some(r) => Err(ConstructError::CapExceeded { requested: r }),
        None => Err(ConstructError::CapExceeded { requested: u128::MAX }),
    }
}

fn require_set(s: &ObjectCollection) -> Result<(), ConstructError> {
    if is_set(s) {
        Ok(())
    } else {
        Err(ConstructError::NotASet(s.label().to_string()))
    }
}

/// Tuple form `((A_1, m_1), …, (A_n, m_n))` of a multiset, where `m_i`
/// counts clones on top of the original.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MultiplicitySpec {
    entries: Vec<(ObjectInstance, u64)>,
}

impl MultiplicitySpec {
    pub fn new(entries: Vec<(ObjectInstance, u64)>) -> Result<Self, ConstructError> {
        for (i, (a, _)) in entries.iter().enumerate() {
            if let Some((b, _)) = entries[..i].iter().find(|(b, _)| objects_equal(a, b)) {
                return Err(ConstructError::RepeatedEntry(b.to_string(), a.to_string()));
            }
        }
        Ok(Self { entries })
    }

    /// Counts a collection into tuple form; each distinct object appears once
    /// (as its original, index 0) with `count - 1` clones.
    pub fn from_collection(c: &ObjectCollection) -> Self {
        let mut entries: Vec<(ObjectInstance, u64)> = Vec::new();
        let mut slots: std::collections::HashMap<_, usize> = std::collections::HashMap::new();
        for o in c {
            match slots.entry(o.equality_key()) {
                std::collections::hash_map::Entry::Occupied(e) => entries[*e.get()].1 += 1,
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(entries.len());
                    entries.push((o.with_index(0), 0));
                }
            }
        }
        Self { entries }
    }

    pub fn entries(&self) -> &[(ObjectInstance, u64)] {
        &self.entries
    }

    /// `Σ (m_i + 1)`.
    pub fn output_size(&self) -> Option<u128> {
        self.entries.iter().try_fold(0u128, |acc, (_, m)| acc.checked_add(*m as u128 + 1))
    }
}

/// Universal constructor: each object followed by `Clone_1 … Clone_m` of it.
pub fn ucm(spec: &MultiplicitySpec) -> Result<ObjectCollection, ConstructError> {
    check_cap(spec.output_size())?;
    let mut out = Vec::new();
    for (a, m) in &spec.entries {
        out.push(a.clone());
        for j in 1..=*m {
            out.push(a.with_index(a.index() + j));
        }
    }
    Ok(ObjectCollection::new("UCM", out)?)
}

/// Any multiset in tuple form, rebuilt through UCM.
pub fn from_multiplicity_spec(spec: &MultiplicitySpec) -> Result<ObjectCollection, ConstructError> {
    ucm(spec)
}

/// Cartesian-product constructor.
///
/// Pairs are visited row-major and both members of a pair are emitted. Each
/// copy is indexed by its occurrence number, counting from 1 per object.
pub fn cp(s1: &ObjectCollection, s2: &ObjectCollection) -> Result<ObjectCollection, ConstructError> {
    for s in [s1, s2] {
        require_set(s)?;
        if s.is_empty() {
            return Err(ConstructError::EmptyInput(s.label().to_string()));
        }
    }
    if s1.iter().any(|a| s2.iter().any(|b| objects_equal(a, b))) {
        return Err(ConstructError::Overlap(s1.label().to_string(), s2.label().to_string()));
    }
    let (n, m) = (s1.len() as u128, s2.len() as u128);
    check_cap(n.checked_mul(m).and_then(|p| p.checked_mul(2)))?;

    let mut left_seen = vec![0u64; s1.len()];
    let mut right_seen = vec![0u64; s2.len()];
    let mut out = Vec::with_capacity(2 * s1.len() * s2.len());
    for (i, a) in s1.iter().enumerate() {
        for (j, b) in s2.iter().enumerate() {
            left_seen[i] += 1;
            right_seen[j] += 1;
            out.push(index_object(a, left_seen[i])?);
            out.push(index_object(b, right_seen[j])?);
        }
    }
    Ok(ObjectCollection::new(format!("CP({},{})", s1.label(), s2.label()), out)?)
}

/// Recursive cloning: `R_0 = S`, `R_d = R_{d-1} ∪ Clone_{2^{d-1}}(R_{d-1})`.
pub fn rcl(s: &ObjectCollection, depth: u32) -> Result<ObjectCollection, ConstructError> {
    require_set(s)?;
    check_cap(2u128.checked_pow(depth).and_then(|p| p.checked_mul(s.len() as u128)))?;
    let mut current = s.clone();
    for d in 1..=depth {
        let shifted = clone_collection(&current, 1u64 << (d - 1))?;
        let mut elements = current.elements().to_vec();
        elements.extend_from_slice(shifted.elements());
        current = ObjectCollection::new(current.label(), elements)?;
    }
    Ok(current.relabel(format!("RCL^{depth}({})", s.label())))
}

/// Position lists of all subsets with cardinality in `[min, max]`, by
/// cardinality and then lexicographically.
fn subset_positions(n: usize, min: usize, max: usize) -> impl Iterator<Item = Vec<usize>> {
    (min..=max).flat_map(move |k| (0..n).combinations(k))
}

fn pick(s: &ObjectCollection, positions: &[usize]) -> Vec<ObjectInstance> {
    positions.iter().map(|&p| s.elements()[p].clone()).collect()
}

/// Subsets of a set with cardinality in `[min_card, max_card]`, ordered by
/// cardinality and then lexicographically by element position.
pub fn enumerate_subsets(
    s: &ObjectCollection,
    min_card: usize,
    max_card: usize,
) -> Result<Vec<ObjectCollection>, ConstructError> {
    require_set(s)?;
    let n = s.len();
    if min_card > max_card || max_card > n {
        return Err(ConstructError::BadBounds { min: min_card, max: max_card, n });
    }
    check_cap(subset_volume(n, min_card, max_card))?;
    subset_positions(n, min_card, max_card)
        .enumerate()
        .map(|(w, pos)| Ok(ObjectCollection::new(format!("S_{}", w + 1), pick(s, &pos))?))
        .collect()
}

// Total elements over all k-subsets for k in [min, max]: Σ k·C(n,k).
fn subset_volume(n: usize, min: usize, max: usize) -> Option<u128> {
    (min..=max).try_fold(0u128, |acc, k| {
        let c = crate::analytics::binomial(n as u64, k as u64).ok()?;
        acc.checked_add(c.checked_mul(k as u128)?)
    })
}

/// Powerset constructor.
///
/// Subsets of cardinality 2..=n are visited in canonical order. Each chosen
/// object is emitted at its current selection count, which then increments,
/// so the first pick of an object is the object itself.
pub fn ps(s: &ObjectCollection) -> Result<ObjectCollection, ConstructError> {
    require_set(s)?;
    let n = s.len();
    if n < 2 {
        return Err(ConstructError::TooSmall { constructor: "PS", min: 2, found: n });
    }
    check_cap(subset_volume(n, 2, n))?;
    let mut picked = vec![0u64; n];
    let mut out = Vec::new();
    for subset in subset_positions(n, 2, n) {
        for p in subset {
            let a = &s.elements()[p];
            out.push(a.with_index(a.index() + picked[p]));
            picked[p] += 1;
        }
    }
    Ok(ObjectCollection::new(format!("PS({})", s.label()), out)?)
}

/// One way of splitting a basic set into two disjoint parts of at least two
/// objects each.
#[derive(Debug, Clone, PartialEq)]
pub struct D2Decomposition {
    pub left: ObjectCollection,
    pub right: ObjectCollection,
    /// 1-based position in the canonical order.
    pub variant_index: usize,
}

// Left parts always contain position 0; ordered by size, then lexicographically.
fn d2_splits(n: usize) -> impl Iterator<Item = (Vec<usize>, Vec<usize>)> {
    let sizes = 2..=n.saturating_sub(2);
    sizes.flat_map(move |k| {
        (1..n).combinations(k - 1).map(move |rest| {
            let mut left = Vec::with_capacity(k);
            left.push(0);
            left.extend(rest);
            let right = (0..n).filter(|p| !left.contains(p)).collect();
            (left, right)
        })
    })
}

/// All unordered two-part decompositions with both parts of size ≥ 2.
pub fn enumerate_d2(s: &ObjectCollection) -> Result<Vec<D2Decomposition>, ConstructError> {
    require_set(s)?;
    let n = s.len();
    // Each decomposition materializes n objects.
    let count = crate::analytics::predict_d2(n.max(3) as u64).ok().and_then(|p| p.subset_count).map(|q| q / 2);
    check_cap(count.and_then(|c| c.checked_mul(n as u128)))?;
    d2_splits(n)
        .enumerate()
        .map(|(w, (l, r))| {
            Ok(D2Decomposition {
                left: ObjectCollection::new(format!("S_{}", 2 * w + 1), pick(s, &l))?,
                right: ObjectCollection::new(format!("S_{}", 2 * w + 2), pick(s, &r))?,
                variant_index: w + 1,
            })
        })
        .collect()
}

/// Result of [`d2`]; `degenerate` is set when the basic set is too small to
/// decompose and the collection is therefore empty.
#[derive(Debug, Clone, PartialEq)]
pub struct D2Output {
    pub collection: ObjectCollection,
    pub degenerate: bool,
}

/// Two-part decomposition constructor: for each variant `w`, the left part
/// then the right part, every object indexed by `w`.
pub fn d2(s: &ObjectCollection) -> Result<D2Output, ConstructError> {
    require_set(s)?;
    let n = s.len();
    let label = format!("D2({})", s.label());
    if n < 4 {
        return Ok(D2Output { collection: ObjectCollection::empty(label), degenerate: true });
    }
    let size = crate::analytics::predict_d2(n as u64).ok().map(|p| p.cardinality);
    check_cap(size)?;
    let mut out = Vec::new();
    for (w, (left, right)) in d2_splits(n).enumerate() {
        for p in left.into_iter().chain(right) {
            out.push(index_object(&s.elements()[p], w as u64 + 1)?);
        }
    }
    Ok(D2Output { collection: ObjectCollection::new(label, out)?, degenerate: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{bulb_set, polygons};

    fn bulbs(label: &str, ids: &[&str]) -> ObjectCollection {
        ObjectCollection::new(label, bulb_set(ids)).unwrap()
    }

    #[test]
    fn ucm_examples() {
        let p = polygons();
        let s = ucm(&MultiplicitySpec::new(vec![(p.a.clone(), 2)]).unwrap()).unwrap();
        assert_eq!(s.notation(), ["A", "A_1", "A_2"]);
        assert!(s.class().is_homogeneous());
        let s = ucm(&MultiplicitySpec::new(vec![(p.b.clone(), 1), (p.c.clone(), 2)]).unwrap()).unwrap();
        assert_eq!(s.notation(), ["B", "B_1", "C", "C_1", "C_2"]);
        assert!(!s.class().is_homogeneous());
        let s = ucm(&MultiplicitySpec::new(vec![(p.a.clone(), 0)]).unwrap()).unwrap();
        assert_eq!(s.notation(), ["A"]);
        assert!(ucm(&MultiplicitySpec::default()).unwrap().is_empty());
    }

    #[test]
    fn multiplicity_spec_rejects_repeats() {
        let p = polygons();
        let err = MultiplicitySpec::new(vec![(p.a.clone(), 1), (p.a.with_index(3), 0)]).unwrap_err();
        assert_eq!(err, ConstructError::RepeatedEntry("A".into(), "A_3".into()));
    }

    #[test]
    fn tuple_form_round_trip() {
        let p = polygons();
        let m = ObjectCollection::new("M", vec![p.a.clone(), p.a.with_index(4), p.b.clone()]).unwrap();
        let spec = MultiplicitySpec::from_collection(&m);
        assert_eq!(
            spec.entries().iter().map(|(o, k)| (o.to_string(), *k)).collect::<Vec<_>>(),
            [("A".to_string(), 1), ("B".to_string(), 0)]
        );
        assert_eq!(from_multiplicity_spec(&spec).unwrap().notation(), ["A", "A_1", "B"]);
    }

    #[test]
    fn cp_garland() {
        let out = cp(&bulbs("S1", &["G", "Y", "O"]), &bulbs("S2", &["B", "P", "R"])).unwrap();
        assert_eq!(
            out.notation().join(", "),
            "G_1, B_1, G_2, P_1, G_3, R_1, Y_1, B_2, Y_2, P_2, Y_3, R_2, O_1, B_3, O_2, P_3, O_3, R_3"
        );
        assert!(out.class().is_homogeneous());
    }

    #[test]
    fn cp_preconditions() {
        let gy = bulbs("L", &["G", "Y"]);
        assert_eq!(cp(&gy, &bulbs("R", &["Y", "B"])), Err(ConstructError::Overlap("L".into(), "R".into())));
        assert_eq!(cp(&bulbs("L", &["G", "G"]), &gy), Err(ConstructError::NotASet("L".into())));
        assert_eq!(cp(&gy, &ObjectCollection::empty("E")), Err(ConstructError::EmptyInput("E".into())));
    }

    #[test]
    fn rcl_garland() {
        let s = bulbs("S1", &["G", "Y", "R"]);
        assert_eq!(rcl(&s, 0).unwrap().notation(), ["G", "Y", "R"]);
        assert_eq!(rcl(&s, 1).unwrap().notation(), ["G", "Y", "R", "G_1", "Y_1", "R_1"]);
        assert_eq!(
            rcl(&s, 2).unwrap().notation(),
            ["G", "Y", "R", "G_1", "Y_1", "R_1", "G_2", "Y_2", "R_2", "G_3", "Y_3", "R_3"]
        );
        assert!(matches!(rcl(&s, 40), Err(ConstructError::CapExceeded { .. })));
    }

    #[test]
    fn subsets_in_canonical_order() {
        let s = bulbs("S", &["G", "Y", "R"]);
        let subs: Vec<Vec<String>> = enumerate_subsets(&s, 2, 3).unwrap().iter().map(|c| c.notation()).collect();
        assert_eq!(subs, [vec!["G", "Y"], vec!["G", "R"], vec!["Y", "R"], vec!["G", "Y", "R"]]);
        let empty = enumerate_subsets(&s, 0, 0).unwrap();
        assert_eq!(empty.len(), 1);
        assert!(empty[0].is_empty());
        assert_eq!(enumerate_subsets(&bulbs("S", &["G", "Y", "O", "B"]), 2, 4).unwrap().len(), 11);
        assert_eq!(enumerate_subsets(&s, 3, 2), Err(ConstructError::BadBounds { min: 3, max: 2, n: 3 }));
        assert_eq!(enumerate_subsets(&s, 0, 4), Err(ConstructError::BadBounds { min: 0, max: 4, n: 3 }));
    }

    #[test]
    fn ps_garland() {
        let out = ps(&bulbs("S", &["G", "Y", "R"])).unwrap();
        assert_eq!(out.notation().join(", "), "G, Y, G_1, R, Y_1, R_1, G_2, Y_2, R_2");
        assert_eq!(ps(&bulbs("S", &["G"])), Err(ConstructError::TooSmall { constructor: "PS", min: 2, found: 1 }));
    }

    #[test]
    fn d2_decompositions() {
        let s = bulbs("S", &["G", "Y", "R", "B"]);
        let ds = enumerate_d2(&s).unwrap();
        let pairs: Vec<(Vec<String>, Vec<String>)> =
            ds.iter().map(|d| (d.left.notation(), d.right.notation())).collect();
        assert_eq!(
            pairs,
            [
                (vec!["G".to_string(), "Y".into()], vec!["R".to_string(), "B".into()]),
                (vec!["G".to_string(), "R".into()], vec!["Y".to_string(), "B".into()]),
                (vec!["G".to_string(), "B".into()], vec!["Y".to_string(), "R".into()]),
            ]
        );
        assert_eq!(ds.iter().map(|d| d.variant_index).collect::<Vec<_>>(), [1, 2, 3]);
        assert!(enumerate_d2(&bulbs("S", &["G", "Y", "R"])).unwrap().is_empty());
    }

    #[test]
    fn d2_garland() {
        let out = d2(&bulbs("S", &["G", "Y", "R", "B"])).unwrap();
        assert!(!out.degenerate);
        assert_eq!(out.collection.notation().join(", "), "G_1, Y_1, R_1, B_1, G_2, R_2, Y_2, B_2, G_3, B_3, Y_3, R_3");
        let small = d2(&bulbs("S", &["G", "Y", "R"])).unwrap();
        assert!(small.degenerate);
        assert!(small.collection.is_empty());
    }

    #[test]
    fn mixed_classes_give_one_projection_per_class() {
        let p = polygons();
        let s = ObjectCollection::new("S", vec![p.b.clone(), p.c.clone()]).unwrap();
        let out = rcl(&s, 2).unwrap();
        match out.class().form() {
            crate::model::ClassForm::Inhomogeneous { projections, .. } => assert_eq!(projections.len(), 2),
            _ => panic!("expected inhomogeneous"),
        }
    }
}
