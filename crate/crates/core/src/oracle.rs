//! Brute-force verification: build with the real constructors, count what
//! came out, and compare against the closed-form predictions.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::ops::RangeInclusive;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{basic_set, ObjectCollection};
use crate::analytics::{self, AnalyticsError, ConstructorKind, Multiplicity, Params, Prediction};
use crate::constructors::{self, ConstructError, MultiplicitySpec, MAX_OUTPUT};
use crate::model::{ClassDescriptor, ObjectInstance, PropertySchema, PropertyValue, Signature, Specification};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("unknown constructor `{0}`")]
    UnknownConstructor(String),
    #[error("{constructor} takes {what}")]
    BadParams { constructor: ConstructorKind, what: &'static str },
    #[error("{constructor} at {params} would build {requested} elements, above the cap of {MAX_OUTPUT}")]
    CapExceeded { constructor: ConstructorKind, params: Params, requested: u128 },
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
    #[error(transparent)]
    Construct(#[from] ConstructError),
}

/// Occurrence count of every distinct object, in first-occurrence order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MultiplicityTable {
    entries: Vec<(ObjectInstance, u64)>,
}

impl MultiplicityTable {
    /// `(representative, count)` pairs; the representative is the first occurrence.
    pub fn entries(&self) -> &[(ObjectInstance, u64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|(_, c)| c).sum()
    }

    /// Count for the object with this identifier and class name.
    pub fn get(&self, base_id: &str, class: &str) -> Option<u64> {
        self.entries.iter().find(|(o, _)| o.base_id() == base_id && o.class().name() == class).map(|(_, c)| *c)
    }

    /// `(base_id, class, count)` triples sorted by key, for order-blind comparison.
    pub fn sorted_counts(&self) -> Vec<(String, String, u64)> {
        let mut v: Vec<_> =
            self.entries.iter().map(|(o, c)| (o.base_id().to_string(), o.class().name().to_string(), *c)).collect();
        v.sort();
        v
    }

    /// Tuple form for UCM: every object once more as original, `count - 1` clones.
    pub fn to_spec(&self) -> MultiplicitySpec {
        MultiplicitySpec::new(self.entries.iter().map(|(o, c)| (o.with_index(0), c - 1)).collect())
            .expect("table entries are pairwise distinct")
    }
}

/// Groups elements by object equality and counts each group.
pub fn count_multiplicities(c: &ObjectCollection) -> MultiplicityTable {
    let mut slot = HashMap::new();
    let mut entries: Vec<(ObjectInstance, u64)> = Vec::new();
    for o in c {
        let i = *slot.entry(o.equality_key()).or_insert_with(|| {
            entries.push((o.clone(), 0));
            entries.len() - 1
        });
        entries[i].1 += 1;
    }
    MultiplicityTable { entries }
}

/// True when no two elements share `(base_id, index)`.
pub fn identifiable(c: &ObjectCollection) -> bool {
    let mut seen = HashSet::with_capacity(c.len());
    c.iter().all(|o| seen.insert((o.base_id(), o.class().name(), o.index())))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observed {
    pub cardinality: u128,
    /// `(base_id, count)` in first-occurrence order.
    pub multiplicities: Vec<(String, u64)>,
    pub subset_count: Option<u128>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Match,
    Mismatch(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub constructor: ConstructorKind,
    pub params: Params,
    pub predicted: Prediction,
    pub observed: Observed,
    pub verdict: Verdict,
}

impl VerificationReport {
    pub fn is_match(&self) -> bool {
        self.verdict == Verdict::Match
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}", self.n)?;
        if let Some(m) = self.m {
            write!(f, " m={m}")?;
        }
        if let Some(d) = self.depth {
            write!(f, " depth={d}")?;
        }
        Ok(())
    }
}

/// `n` pairwise-distinct objects of one class; the value of the single
/// property is the ordinal, offset by `first`.
pub fn synthetic_set(prefix: &str, first: u64, n: u64) -> ObjectCollection {
    let class = Arc::new(ClassDescriptor::homogeneous(
        "Synthetic",
        Specification::new(vec![PropertySchema::quantitative("ordinal", "1").expect("nonempty name")])
            .expect("single property"),
        Signature::empty(),
    ));
    let elements = (0..n)
        .map(|i| {
            let value = PropertyValue::quantity(vec![(first + i) as f64]).expect("finite");
            ObjectInstance::new(format!("{prefix}{}", i + 1), class.clone(), vec![value]).expect("aligned values")
        })
        .collect();
    ObjectCollection::new(prefix, elements).expect("homogeneous synthetic set")
}

pub fn parse_constructor(id: &str) -> Result<ConstructorKind, OracleError> {
    ConstructorKind::from_id(id).ok_or_else(|| OracleError::UnknownConstructor(id.to_string()))
}

fn predict(kind: ConstructorKind, p: Params) -> Result<Prediction, OracleError> {
    let bad = |what| OracleError::BadParams { constructor: kind, what };
    Ok(match kind {
        ConstructorKind::Cp => match (p.m, p.depth) {
            (Some(m), None) => analytics::predict_cp(p.n, m)?,
            _ => return Err(bad("n and m only")),
        },
        ConstructorKind::Rcl => match (p.m, p.depth) {
            (None, Some(d)) => analytics::predict_rcl(p.n, d)?,
            _ => return Err(bad("n and depth only")),
        },
        ConstructorKind::Ucm => match (p.m, p.depth) {
            (Some(m), None) => analytics::predict_ucm(p.n, m)?,
            _ => return Err(bad("n and m (clones per object) only")),
        },
        ConstructorKind::Ps | ConstructorKind::D2 => {
            if p.m.is_some() || p.depth.is_some() {
                return Err(bad("n only"));
            }
            if kind == ConstructorKind::Ps {
                analytics::predict_ps(p.n)?
            } else {
                analytics::predict_d2(p.n)?
            }
        }
    })
}

fn check_size(kind: ConstructorKind, params: Params, predicted: &Prediction) -> Result<(), OracleError> {
    if predicted.cardinality > MAX_OUTPUT {
        return Err(OracleError::CapExceeded { constructor: kind, params, requested: predicted.cardinality });
    }
    Ok(())
}

/// Runs one constructor on synthetic input and compares the counts with its
/// prediction.
pub fn verify(kind: ConstructorKind, params: Params) -> Result<VerificationReport, OracleError> {
    let predicted = predict(kind, params)?;
    check_size(kind, params, &predicted)?;

    let n = params.n;
    let (built, basic, subset_count) = match kind {
        ConstructorKind::Ucm => {
            let s = synthetic_set("X", 1, n);
            let spec = MultiplicitySpec::new(s.iter().map(|o| (o.clone(), params.m.unwrap_or(0))).collect())?;
            (constructors::ucm(&spec)?, s, None)
        }
        ConstructorKind::Cp => {
            let m = params.m.unwrap_or(0);
            let left = synthetic_set("X", 1, n);
            let right = synthetic_set("Y", n + 1, m);
            let out = constructors::cp(&left, &right)?;
            let mut all = left.elements().to_vec();
            all.extend_from_slice(right.elements());
            (out, ObjectCollection::new("X+Y", all).expect("homogeneous"), None)
        }
        ConstructorKind::Rcl => {
            let s = synthetic_set("X", 1, n);
            let depth = u32::try_from(params.depth.unwrap_or(0)).map_err(|_| AnalyticsError::Overflow)?;
            (constructors::rcl(&s, depth)?, s, None)
        }
        ConstructorKind::Ps => {
            let s = synthetic_set("X", 1, n);
            let q = constructors::enumerate_subsets(&s, 2, n as usize)?.len() as u128;
            (constructors::ps(&s)?, s, Some(q))
        }
        ConstructorKind::D2 => {
            let s = synthetic_set("X", 1, n);
            let q = 2 * constructors::enumerate_d2(&s)?.len() as u128;
            (constructors::d2(&s)?.collection, s, Some(q))
        }
    };

    let table = count_multiplicities(&built);
    let observed = Observed {
        cardinality: built.len() as u128,
        multiplicities: table.entries().iter().map(|(o, c)| (o.base_id().to_string(), *c)).collect(),
        subset_count,
    };
    let verdict = judge(&predicted, &observed, &built, &basic, params.n);
    Ok(VerificationReport { constructor: kind, params, predicted, observed, verdict })
}

fn judge(p: &Prediction, o: &Observed, built: &ObjectCollection, basic: &ObjectCollection, left_n: u64) -> Verdict {
    if o.cardinality != p.cardinality {
        return Verdict::Mismatch(format!("cardinality: predicted {}, observed {}", p.cardinality, o.cardinality));
    }
    if o.subset_count != p.subset_count {
        return Verdict::Mismatch(format!(
            "subset count: predicted {:?}, observed {:?}",
            p.subset_count, o.subset_count
        ));
    }
    // A zero multiplicity means the object is absent, e.g. D2 at n = 3.
    let expect_present = !matches!(p.multiplicity, Multiplicity::Uniform(0));
    let expected_basic = if expect_present { basic.len() } else { 0 };
    if o.multiplicities.len() != expected_basic {
        return Verdict::Mismatch(format!(
            "basic set: predicted {} distinct objects, observed {}",
            expected_basic,
            o.multiplicities.len()
        ));
    }
    if expect_present {
        let bs = basic_set(built);
        if count_multiplicities(&bs).sorted_counts() != count_multiplicities(basic).sorted_counts() {
            return Verdict::Mismatch("basic set: output objects differ from the input objects".into());
        }
    }
    for (i, (id, count)) in o.multiplicities.iter().enumerate() {
        let expected = match p.multiplicity {
            Multiplicity::Uniform(m) => m,
            Multiplicity::Split { left, right } => {
                let in_left = basic.elements()[..left_n as usize].iter().any(|b| b.base_id() == id);
                if in_left {
                    left
                } else {
                    right
                }
            }
        };
        if *count as u128 != expected {
            return Verdict::Mismatch(format!(
                "multiplicity of {id} (entry {}): predicted {expected}, observed {count}",
                i + 1
            ));
        }
    }
    if !identifiable(built) {
        return Verdict::Mismatch("identifiability: repeated (base_id, index) pair".into());
    }
    Verdict::Match
}

/// Parameter ranges for a sweep; `m` and `depth` only where applicable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRanges {
    pub n: RangeInclusive<u64>,
    pub m: Option<RangeInclusive<u64>>,
    pub depth: Option<RangeInclusive<u64>>,
}

impl SweepRanges {
    pub fn n(n: RangeInclusive<u64>) -> Self {
        Self { n, m: None, depth: None }
    }

    fn tuples(&self) -> Vec<Params> {
        let opt = |r: &Option<RangeInclusive<u64>>| -> Vec<Option<u64>> {
            match r {
                None => vec![None],
                Some(r) => r.clone().map(Some).collect(),
            }
        };
        let (ms, ds) = (opt(&self.m), opt(&self.depth));
        let mut out = Vec::new();
        for n in self.n.clone() {
            for &m in &ms {
                for &depth in &ds {
                    out.push(Params { n, m, depth });
                }
            }
        }
        out
    }
}

/// One report per parameter tuple in lexicographic order. Size limits are
/// checked for every tuple before any construction starts.
pub fn verify_sweep(kind: ConstructorKind, ranges: &SweepRanges) -> Result<Vec<VerificationReport>, OracleError> {
    let tuples = ranges.tuples();
    for &p in &tuples {
        let predicted = predict(kind, p)?;
        check_size(kind, p, &predicted)?;
    }
    tuples.into_par_iter().map(|p| verify(kind, p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::bulb_set;

    #[test]
    fn counts_letter_multiset() {
        let [a, b, c, d]: [ObjectInstance; 4] = bulb_set(&["G", "Y", "O", "B"]).try_into().unwrap();
        let s = ObjectCollection::new("S", vec![a.clone(), a, b.clone(), b.clone(), b, c, d.clone(), d]).unwrap();
        let t = count_multiplicities(&s);
        let counts: Vec<(String, u64)> = t.entries().iter().map(|(o, c)| (o.to_string(), *c)).collect();
        assert_eq!(counts, [("G".into(), 2), ("Y".into(), 3), ("O".into(), 1), ("B".into(), 2)]);
        assert_eq!(t.total(), 8);
        assert_eq!(t.get("Y", "Bulb"), Some(3));
        assert_eq!(t.get("Y", "Other"), None);
        assert!(count_multiplicities(&ObjectCollection::empty("E")).is_empty());
    }

    #[test]
    fn counts_ps_output() {
        let s = ObjectCollection::new("S", bulb_set(&["G", "Y", "R"])).unwrap();
        let t = count_multiplicities(&constructors::ps(&s).unwrap());
        assert_eq!(t.sorted_counts().iter().map(|(_, _, c)| *c).collect::<Vec<_>>(), [3, 3, 3]);
    }

    #[test]
    fn single_verifications() {
        let r = verify(ConstructorKind::Ps, Params { n: 4, ..Params::default() }).unwrap();
        assert!(r.is_match(), "{r:?}");
        assert_eq!(r.observed.cardinality, 28);
        assert_eq!(r.observed.subset_count, Some(11));
        let r = verify(ConstructorKind::D2, Params { n: 6, ..Params::default() }).unwrap();
        assert!(r.is_match(), "{r:?}");
        assert_eq!((r.observed.cardinality, r.observed.subset_count), (150, Some(50)));
        let r = verify(ConstructorKind::Rcl, Params { n: 3, m: None, depth: Some(2) }).unwrap();
        assert!(r.is_match());
        assert!(r.observed.multiplicities.iter().all(|(_, c)| *c == 4));
        let r = verify(ConstructorKind::Cp, Params { n: 2, m: Some(5), depth: None }).unwrap();
        assert!(r.is_match(), "{r:?}");
        let r = verify(ConstructorKind::D2, Params { n: 3, ..Params::default() }).unwrap();
        assert!(r.is_match(), "{r:?}");
        let r = verify(ConstructorKind::Ucm, Params { n: 4, m: Some(3), depth: None }).unwrap();
        assert!(r.is_match(), "{r:?}");
    }

    #[test]
    fn mismatch_is_reported() {
        let p = analytics::predict_ps(3).unwrap();
        let s = synthetic_set("X", 1, 3);
        let built = ObjectCollection::new("B", s.elements().to_vec()).unwrap();
        let o = Observed {
            cardinality: 3,
            multiplicities: vec![("X1".into(), 1), ("X2".into(), 1), ("X3".into(), 1)],
            subset_count: Some(4),
        };
        let v = judge(&p, &o, &built, &s, 3);
        assert_eq!(v, Verdict::Mismatch("cardinality: predicted 9, observed 3".into()));
    }

    #[test]
    fn parameter_errors() {
        assert_eq!(parse_constructor("xyz"), Err(OracleError::UnknownConstructor("xyz".into())));
        assert!(matches!(
            verify(ConstructorKind::Cp, Params { n: 2, m: None, depth: None }),
            Err(OracleError::BadParams { .. })
        ));
        assert!(matches!(
            verify(ConstructorKind::Ps, Params { n: 1, ..Params::default() }),
            Err(OracleError::Analytics(AnalyticsError::Domain { .. }))
        ));
        assert!(matches!(
            verify_sweep(ConstructorKind::Rcl, &SweepRanges { n: 1..=6, m: None, depth: Some(0..=20) }),
            Err(OracleError::CapExceeded { .. })
        ));
    }

    #[test]
    fn sweep_order_and_empty_range() {
        let r = verify_sweep(ConstructorKind::Cp, &SweepRanges { n: 1..=2, m: Some(1..=2), depth: None }).unwrap();
        let order: Vec<(u64, Option<u64>)> = r.iter().map(|r| (r.params.n, r.params.m)).collect();
        assert_eq!(order, [(1, Some(1)), (1, Some(2)), (2, Some(1)), (2, Some(2))]);
        #[allow(clippy::reversed_empty_ranges)]
        let empty = verify_sweep(ConstructorKind::Ps, &SweepRanges::n(5..=4)).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn table_to_spec_round_trip() {
        let s = ObjectCollection::new("S", bulb_set(&["G", "Y", "G", "R", "G"])).unwrap();
        let t = count_multiplicities(&s);
        let rebuilt = constructors::ucm(&t.to_spec()).unwrap();
        assert_eq!(count_multiplicities(&rebuilt).sorted_counts(), t.sorted_counts());
        assert!(identifiable(&rebuilt));
        assert!(!identifiable(&s));
    }
}
