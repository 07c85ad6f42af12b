use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use proptest::prelude::*;

use coost::algebra::{basic_set, clone_collection, clone_object, is_multiset, is_set, union};
use coost::analytics::{binomial, matrix, predict_cp, predict_d2, predict_ps, predict_rcl, MatrixKind};
use coost::constructors::{cp, d2, enumerate_d2, enumerate_subsets, ps, rcl, ucm, MultiplicitySpec};
use coost::model::{
    classes_equivalent, infer_class, objects_equal, ClassBody, ClassDescriptor, ClassForm, ObjectInstance, PropertyKey,
    PropertySchema, PropertyValue, Signature, Specification,
};
use coost::oracle::{count_multiplicities, identifiable, synthetic_set};
use coost::ObjectCollection;

fn class(name: &str, props: &[(&str, &str)], methods: &[&str]) -> Arc<ClassDescriptor> {
    let props = props.iter().map(|(n, u)| PropertySchema::quantitative(*n, *u).unwrap()).collect();
    let spec = Specification::new(props).unwrap();
    let sig = Signature::new(methods.iter().map(|m| m.to_string()).collect()).unwrap();
    Arc::new(ClassDescriptor::homogeneous(name, spec, sig))
}

fn pool() -> Vec<Arc<ClassDescriptor>> {
    vec![
        class("K0", &[("w", "kg"), ("h", "m")], &["f"]),
        class("K1", &[("w", "kg"), ("c", "code")], &["f", "g"]),
        // Same body as K0 under another name.
        class("K2", &[("h", "m"), ("w", "kg")], &["f"]),
        class("K3", &[("w", "g"), ("h", "m")], &["g"]),
    ]
}

fn object(spec: (usize, u8, u8, u64)) -> ObjectInstance {
    let (ci, id, val, index) = spec;
    let class = pool()[ci].clone();
    let arity = class.body().unwrap().specification.dimension();
    let values = (0..arity).map(|i| PropertyValue::quantity(vec![f64::from(val) + i as f64]).unwrap()).collect();
    ObjectInstance::new(format!("X{id}"), class, values).unwrap().with_index(index)
}

fn arb_object() -> impl Strategy<Value = ObjectInstance> {
    (0usize..4, 0u8..5, 0u8..3, 0u64..3).prop_map(object)
}

fn arb_objects(max: usize) -> impl Strategy<Value = Vec<ObjectInstance>> {
    prop::collection::vec(arb_object(), 1..max)
}

fn coll(label: &str, v: Vec<ObjectInstance>) -> ObjectCollection {
    ObjectCollection::new(label, v).unwrap()
}

fn keys(body: &ClassBody) -> (BTreeSet<PropertyKey>, BTreeSet<String>) {
    (
        body.specification.properties().iter().map(PropertySchema::key).collect(),
        body.signature.methods().iter().cloned().collect(),
    )
}

proptest! {
    #[test]
    fn equality_is_an_equivalence(a in arb_object(), b in arb_object(), c in arb_object()) {
        prop_assert!(objects_equal(&a, &a));
        prop_assert_eq!(objects_equal(&a, &b), objects_equal(&b, &a));
        if objects_equal(&a, &b) && objects_equal(&b, &c) {
            prop_assert!(objects_equal(&a, &c));
        }
        prop_assert_eq!(objects_equal(&a, &b), a.equality_key() == b.equality_key());
    }

    #[test]
    fn class_inference_partitions_members(v in arb_objects(8)) {
        let t = infer_class(&v, "T").unwrap();
        match t.form() {
            ClassForm::Homogeneous(_) => {
                for o in &v {
                    prop_assert!(classes_equivalent(o.class(), &v[0].class().as_ref().clone()));
                }
            }
            ClassForm::Inhomogeneous { core, projections } => {
                let (cp_, cm) = keys(core);
                for o in &v {
                    let pr = &projections[o.class().name()];
                    let (pp, pm) = keys(pr);
                    prop_assert!(cp_.is_disjoint(&pp));
                    prop_assert!(cm.is_disjoint(&pm));
                    let (fp, fm) = keys(o.class().body().unwrap());
                    prop_assert_eq!(cp_.union(&pp).cloned().collect::<BTreeSet<_>>(), fp);
                    prop_assert_eq!(cm.union(&pm).cloned().collect::<BTreeSet<_>>(), fm);
                }
            }
        }
    }

    #[test]
    fn class_inference_ignores_order(v in arb_objects(8), seed in any::<u64>()) {
        let mut w = v.clone();
        let n = w.len();
        w.rotate_left((seed as usize) % n);
        if seed % 2 == 0 {
            w.reverse();
        }
        let a = infer_class(&v, "T").unwrap();
        let b = infer_class(&w, "T").unwrap();
        prop_assert!(classes_equivalent(&a, &b));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn union_associative_and_additive(a in arb_objects(5), b in arb_objects(5), c in arb_objects(5)) {
        let (sa, sb, sc) = (coll("a", a), coll("b", b), coll("c", c));
        let left = union("l", vec![union("ab", vec![sa.clone().into(), sb.clone().into()]).unwrap().into(), sc.clone().into()]).unwrap();
        let right = union("r", vec![sa.clone().into(), union("bc", vec![sb.clone().into(), sc.clone().into()]).unwrap().into()]).unwrap();
        prop_assert_eq!(left.elements(), right.elements());
        prop_assert!(classes_equivalent(left.class(), right.class()));
        prop_assert_eq!(left.len(), sa.len() + sb.len() + sc.len());
    }

    #[test]
    fn basic_set_is_idempotent(v in arb_objects(12)) {
        let s = coll("S", v);
        let bs = basic_set(&s);
        prop_assert!(is_set(&bs));
        let again = basic_set(&bs);
        prop_assert_eq!(again.elements(), bs.elements());
        for o in &s {
            prop_assert!(bs.iter().any(|x| objects_equal(x, o)));
        }
        prop_assert_eq!(is_multiset(&s), s.len() >= 2 && bs.len() < s.len());
    }

    #[test]
    fn clones_preserve_values(v in arb_objects(6), k in 1u64..5) {
        let s = coll("S", v);
        let c = clone_collection(&s, k).unwrap();
        prop_assert_eq!(c.class(), s.class());
        for (a, b) in s.iter().zip(&c) {
            prop_assert!(objects_equal(a, b));
            prop_assert_eq!(b.index(), a.index() + k);
            prop_assert_eq!(clone_object(a, k).unwrap(), b.clone());
        }
    }

    #[test]
    fn ucm_counts_are_clones_plus_one(counts in prop::collection::vec(0u64..6, 1..7)) {
        let base = synthetic_set("U", 1, counts.len() as u64);
        let spec = MultiplicitySpec::new(base.iter().cloned().zip(counts.iter().copied()).collect()).unwrap();
        let out = ucm(&spec).unwrap();
        let table = count_multiplicities(&out);
        let got: Vec<u64> = table.entries().iter().map(|(_, c)| *c).collect();
        let want: Vec<u64> = counts.iter().map(|c| c + 1).collect();
        prop_assert_eq!(got, want);
        prop_assert!(identifiable(&out));
        let bs = basic_set(&out);
        prop_assert_eq!(bs.elements(), base.elements());
    }
}

// Independent brute-force oracles over bit masks.

fn masks(n: u32) -> impl Iterator<Item = u32> {
    0..(1u32 << n)
}

fn brute_ps(n: u32) -> (u128, u128, u128) {
    let chosen: Vec<u32> = masks(n).filter(|m| m.count_ones() >= 2).collect();
    let card: u128 = chosen.iter().map(|m| u128::from(m.count_ones())).sum();
    let mult = chosen.iter().filter(|m| *m & 1 == 1).count() as u128;
    (mult, card, chosen.len() as u128)
}

fn brute_d2(n: u32) -> (u128, u128, u128) {
    let variants = masks(n).filter(|m| m & 1 == 1 && m.count_ones() >= 2 && n - m.count_ones() >= 2).count() as u128;
    (variants, variants * u128::from(n), 2 * variants)
}

fn pascal(rows: usize) -> Vec<Vec<u128>> {
    let mut t: Vec<Vec<u128>> = vec![vec![1]];
    for i in 1..rows {
        let prev = &t[i - 1];
        let mut row = vec![1u128; i + 1];
        for j in 1..i {
            row[j] = prev[j - 1] + prev[j];
        }
        t.push(row);
    }
    t
}

#[test]
fn binomial_matches_pascal_triangle() {
    let t = pascal(70);
    for (n, row) in t.iter().enumerate() {
        for (k, want) in row.iter().enumerate() {
            assert_eq!(binomial(n as u64, k as u64).unwrap(), *want, "C({n},{k})");
        }
    }
}

#[test]
fn ps_matches_brute_force() {
    for n in 2..=12u32 {
        let p = predict_ps(u64::from(n)).unwrap();
        let (m, card, q) = brute_ps(n);
        assert_eq!(p.cardinality, card, "n={n}");
        assert_eq!(p.multiplicity, coost::analytics::Multiplicity::Uniform(m), "n={n}");
        assert_eq!(p.subset_count, Some(q), "n={n}");
        let s = synthetic_set("X", 1, u64::from(n));
        let built = ps(&s).unwrap();
        assert_eq!(built.len() as u128, card);
        assert_eq!(enumerate_subsets(&s, 2, n as usize).unwrap().len() as u128, q);
    }
}

#[test]
fn d2_matches_brute_force() {
    for n in 3..=12u32 {
        let p = predict_d2(u64::from(n)).unwrap();
        let (m, card, q) = brute_d2(n);
        assert_eq!((p.cardinality, p.subset_count), (card, Some(q)), "n={n}");
        assert_eq!(p.multiplicity, coost::analytics::Multiplicity::Uniform(m), "n={n}");
        let s = synthetic_set("X", 1, u64::from(n));
        assert_eq!(d2(&s).unwrap().collection.len() as u128, card);
        let splits = enumerate_d2(&s).unwrap();
        assert_eq!(splits.len() as u128, m);
        for sp in &splits {
            assert!(sp.left.len() >= 2 && sp.right.len() >= 2);
            assert_eq!(sp.left.len() + sp.right.len(), n as usize);
        }
    }
}

#[test]
fn cp_and_rcl_match_direct_counts() {
    for n in 1..=6u64 {
        for m in 1..=6u64 {
            let (a, b) = (synthetic_set("X", 1, n), synthetic_set("Y", n + 1, m));
            let out = cp(&a, &b).unwrap();
            let p = predict_cp(n, m).unwrap();
            assert_eq!(out.len() as u128, p.cardinality);
            let counts: HashMap<String, u64> =
                count_multiplicities(&out).entries().iter().map(|(o, c)| (o.base_id().to_string(), *c)).collect();
            for o in &a {
                assert_eq!(counts[o.base_id()], m);
            }
            for o in &b {
                assert_eq!(counts[o.base_id()], n);
            }
        }
        for depth in 0..=6u32 {
            let s = synthetic_set("X", 1, n);
            let out = rcl(&s, depth).unwrap();
            assert_eq!(out.len() as u64, n << depth);
            assert_eq!(predict_rcl(n, u64::from(depth)).unwrap().cardinality, u128::from(n << depth));
        }
    }
}

#[test]
fn matrix_cells_are_binomials() {
    let t = pascal(80);
    for (kind, rows) in [(MatrixKind::Ps, 60), (MatrixKind::D2, 60)] {
        let mx = matrix(kind, rows).unwrap();
        for row in &mx.rows {
            let n = row.basic_cardinality as usize;
            for (j, cell) in row.cells.iter().enumerate() {
                let k = j + 2;
                assert_eq!(*cell, t[n][k], "{kind} n={n} k={k}");
            }
        }
    }
}
