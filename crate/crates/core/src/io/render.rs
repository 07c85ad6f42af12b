//! Deterministic text and CSV output.

use std::fmt::Write as _;

use crate::algebra::{basic_set, ObjectCollection};
use crate::analytics::{Multiplicity, Prediction, PredictionMatrix};
use crate::model::{ClassBody, ClassDescriptor, ClassForm, ObjectInstance};
use crate::oracle::{count_multiplicities, MultiplicityTable, Verdict, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Csv,
}

/// `{A, A_1, B}`
pub fn elements(c: &ObjectCollection) -> String {
    format!("{{{}}}", c.notation().join(", "))
}

fn body_line(body: &ClassBody) -> String {
    let props: Vec<&str> = body.specification.properties().iter().map(|p| p.name()).collect();
    format!("P = ({}), F = ({})", props.join(", "), body.signature.methods().join(", "))
}

/// Class block. Projections follow the first occurrence of their class in
/// `members`; classes without members come last, by name.
pub fn class_block(class: &ClassDescriptor, members: &[ObjectInstance]) -> String {
    let mut out = String::new();
    match class.form() {
        ClassForm::Homogeneous(body) => {
            let _ = writeln!(out, "class {}: homogeneous", class.name());
            let _ = writeln!(out, "  {}", body_line(body));
        }
        ClassForm::Inhomogeneous { core, projections } => {
            let _ = writeln!(out, "class {}: inhomogeneous", class.name());
            let _ = writeln!(out, "  Core: {}", body_line(core));
            let mut order: Vec<(&str, Vec<&str>)> = Vec::new();
            for m in members {
                let cname = m.class().name();
                match order.iter_mut().find(|(c, _)| *c == cname) {
                    Some((_, ids)) => {
                        if !ids.contains(&m.base_id()) {
                            ids.push(m.base_id());
                        }
                    }
                    None => order.push((cname, vec![m.base_id()])),
                }
            }
            for name in projections.keys() {
                if !order.iter().any(|(c, _)| c == name) {
                    order.push((name, Vec::new()));
                }
            }
            for (cname, ids) in order {
                if let Some(pr) = projections.get(cname) {
                    let who = if ids.is_empty() { String::new() } else { format!(" [{}]", ids.join(", ")) };
                    let _ = writeln!(out, "  pr({cname}){who}: {}", body_line(pr));
                }
            }
        }
    }
    out
}

fn table_text(table: &MultiplicityTable) -> String {
    let mut out = String::new();
    for (o, count) in table.entries() {
        let _ = writeln!(out, "m({}) = {count}", o.base_id());
    }
    out
}

/// Elements, cardinality, basic set, multiplicities and class of a collection.
pub fn collection(c: &ObjectCollection, format: Format) -> String {
    let table = count_multiplicities(c);
    match format {
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "{} = {}", c.label(), elements(c));
            let _ = writeln!(out, "|{}| = {}", c.label(), c.len());
            let bs = basic_set(c);
            let _ = writeln!(out, "bs({}) = {}", c.label(), elements(&bs));
            out.push_str(&table_text(&table));
            out.push_str(&class_block(c.class(), c.elements()));
            out
        }
        Format::Csv => {
            let mut out = String::from("position,element,base_id,index,class\n");
            for (i, o) in c.iter().enumerate() {
                let _ = writeln!(out, "{},{},{},{},{}", i + 1, o, o.base_id(), o.index(), csv_field(o.class().name()));
            }
            out
        }
    }
}

/// Multiplicity table alone.
pub fn multiplicities(table: &MultiplicityTable, format: Format) -> String {
    match format {
        Format::Text => table_text(table),
        Format::Csv => {
            let mut out = String::from("base_id,class,count\n");
            for (o, count) in table.entries() {
                let _ = writeln!(out, "{},{},{count}", o.base_id(), csv_field(o.class().name()));
            }
            out
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt(v: Option<impl ToString>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn prediction(p: &Prediction, format: Format) -> String {
    match format {
        Format::Text => {
            let m = match p.multiplicity {
                Multiplicity::Uniform(m) => format!("m={m}"),
                Multiplicity::Split { left, right } => format!("m(S1)={left} m(S2)={right}"),
            };
            let mut line = format!("{m} |S|={}", p.cardinality);
            if let Some(q) = p.subset_count {
                let _ = write!(line, " q={q}");
            }
            line.push('\n');
            line
        }
        Format::Csv => {
            let (left, right) = match p.multiplicity {
                Multiplicity::Uniform(m) => (m, m),
                Multiplicity::Split { left, right } => (left, right),
            };
            format!(
                "constructor,n,m,depth,cardinality,multiplicity_left,multiplicity_right,subset_count\n{},{},{},{},{},{left},{right},{}\n",
                p.constructor.id(),
                p.params.n,
                opt(p.params.m),
                opt(p.params.depth),
                p.cardinality,
                opt(p.subset_count),
            )
        }
    }
}

/// Prediction matrix: summary columns then one column per subset size.
pub fn matrix(mx: &PredictionMatrix, format: Format) -> String {
    let cols = mx.cell_columns();
    let sizes: Vec<String> = (0..cols).map(|j| (j + 2).to_string()).collect();
    let rows: Vec<Vec<String>> = mx
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![
                r.multiplicity.to_string(),
                r.cardinality.to_string(),
                r.subset_count.to_string(),
                r.basic_cardinality.to_string(),
            ];
            row.extend(r.cells.iter().map(u128::to_string));
            row
        })
        .collect();

    match format {
        Format::Csv => {
            let mut out = format!("m,card,q,n,{}\n", sizes.join(","));
            for mut row in rows {
                row.resize(4 + cols, String::new());
                let _ = writeln!(out, "{}", row.join(","));
            }
            out
        }
        Format::Text => {
            let mut header: Vec<String> = ["m(A_k)", "|S|", "q(S_w)", "|S_b|"].iter().map(|s| s.to_string()).collect();
            header.extend(sizes);
            let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
            for row in &rows {
                for (w, cell) in widths.iter_mut().zip(row) {
                    *w = (*w).max(cell.len());
                }
            }
            let line = |cells: &[String]| {
                let padded: Vec<String> =
                    widths.iter().enumerate().map(|(i, w)| format!("{:>w$}", cells.get(i).map_or("", |s| s))).collect();
                format!("{}\n", padded.join("  ").trim_end())
            };
            let mut out = line(&header);
            for row in &rows {
                out.push_str(&line(row));
            }
            out
        }
    }
}

fn predicted_multiplicity(p: &Prediction) -> String {
    match p.multiplicity {
        Multiplicity::Uniform(m) => m.to_string(),
        Multiplicity::Split { left, right } => format!("{left}/{right}"),
    }
}

pub fn reports(reports: &[VerificationReport], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Text => {
            for r in reports {
                let _ = write!(out, "{} {}: ", r.constructor.id(), r.params);
                match &r.verdict {
                    Verdict::Match => {
                        let _ = write!(
                            out,
                            "match |S|={} m={}",
                            r.predicted.cardinality,
                            predicted_multiplicity(&r.predicted)
                        );
                        if let Some(q) = r.predicted.subset_count {
                            let _ = write!(out, " q={q}");
                        }
                        out.push('\n');
                    }
                    Verdict::Mismatch(detail) => {
                        let _ = writeln!(out, "MISMATCH {detail}");
                    }
                }
            }
            let matched = reports.iter().filter(|r| r.is_match()).count();
            let _ = writeln!(out, "{matched}/{} match", reports.len());
        }
        Format::Csv => {
            out.push_str("constructor,n,m,depth,verdict,cardinality,multiplicity,subset_count,detail\n");
            for r in reports {
                let (verdict, detail) = match &r.verdict {
                    Verdict::Match => ("match", String::new()),
                    Verdict::Mismatch(d) => ("mismatch", csv_field(d)),
                };
                let _ = writeln!(
                    out,
                    "{},{},{},{},{verdict},{},{},{},{detail}",
                    r.constructor.id(),
                    r.params.n,
                    opt(r.params.m),
                    opt(r.params.depth),
                    r.observed.cardinality,
                    predicted_multiplicity(&r.predicted),
                    opt(r.observed.subset_count),
                );
            }
        }
    }
    out
}
