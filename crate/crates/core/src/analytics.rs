//! Closed-form predictions for the determined constructors, and the
//! Pascal-style prediction matrices for PS and D2.
//!
//! All arithmetic is exact and overflow-checked in `u128`.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalyticsError {
    #[error("{constructor} prediction needs {requirement}")]
    Domain { constructor: ConstructorKind, requirement: &'static str },
    #[error("C({n}, {k}) is undefined: k exceeds n")]
    KGreaterThanN { n: u64, k: u64 },
    #[error("result does not fit in 128 bits")]
    Overflow,
    #[error("{kind} matrix row n={n}: {detail}")]
    Inconsistent { kind: MatrixKind, n: u64, detail: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstructorKind {
    Ucm,
    Cp,
    Rcl,
    Ps,
    D2,
}

impl ConstructorKind {
    pub const ALL: [ConstructorKind; 5] =
        [ConstructorKind::Ucm, ConstructorKind::Cp, ConstructorKind::Rcl, ConstructorKind::Ps, ConstructorKind::D2];

    pub fn id(self) -> &'static str {
        match self {
            ConstructorKind::Ucm => "ucm",
            ConstructorKind::Cp => "cp",
            ConstructorKind::Rcl => "rcl",
            ConstructorKind::Ps => "ps",
            ConstructorKind::D2 => "d2",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.id() == id)
    }
}

impl fmt::Display for ConstructorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id().to_uppercase())
    }
}

/// Parameters of a prediction; `m` and `depth` only where the constructor
/// takes them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Params {
    pub n: u64,
    pub m: Option<u64>,
    pub depth: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Multiplicity {
    Uniform(u128),
    /// CP: members of the left set occur `left` times, right-set members `right` times.
    Split {
        left: u128,
        right: u128,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prediction {
    pub constructor: ConstructorKind,
    pub params: Params,
    pub cardinality: u128,
    pub multiplicity: Multiplicity,
    /// Subsets used to build the output; `None` where not applicable.
    pub subset_count: Option<u128>,
}

fn pow2(e: u64) -> Result<u128, AnalyticsError> {
    u32::try_from(e).ok().and_then(|e| 2u128.checked_pow(e)).ok_or(AnalyticsError::Overflow)
}

fn mul(a: u128, b: u128) -> Result<u128, AnalyticsError> {
    a.checked_mul(b).ok_or(AnalyticsError::Overflow)
}

fn sub(a: u128, b: u128) -> Result<u128, AnalyticsError> {
    a.checked_sub(b).ok_or(AnalyticsError::Overflow)
}

/// `|S| = 2nm`; left members occur `m` times, right members `n` times.
pub fn predict_cp(n: u64, m: u64) -> Result<Prediction, AnalyticsError> {
    if n == 0 || m == 0 {
        return Err(AnalyticsError::Domain { constructor: ConstructorKind::Cp, requirement: "n >= 1 and m >= 1" });
    }
    Ok(Prediction {
        constructor: ConstructorKind::Cp,
        params: Params { n, m: Some(m), depth: None },
        cardinality: mul(2, mul(n as u128, m as u128)?)?,
        multiplicity: Multiplicity::Split { left: m as u128, right: n as u128 },
        subset_count: None,
    })
}

/// `|S| = n·2^depth`, every multiplicity `2^depth`.
pub fn predict_rcl(n: u64, depth: u64) -> Result<Prediction, AnalyticsError> {
    if n == 0 {
        return Err(AnalyticsError::Domain { constructor: ConstructorKind::Rcl, requirement: "n >= 1" });
    }
    let m = pow2(depth)?;
    Ok(Prediction {
        constructor: ConstructorKind::Rcl,
        params: Params { n, m: None, depth: Some(depth) },
        cardinality: mul(n as u128, m)?,
        multiplicity: Multiplicity::Uniform(m),
        subset_count: None,
    })
}

/// `q = 2^n − n − 1`, `|S| = n·2^n/2 − n`, `m = 2^{n−1} − 1`.
pub fn predict_ps(n: u64) -> Result<Prediction, AnalyticsError> {
    if n < 2 {
        return Err(AnalyticsError::Domain { constructor: ConstructorKind::Ps, requirement: "n >= 2" });
    }
    let nn = n as u128;
    let half = pow2(n - 1)?;
    Ok(Prediction {
        constructor: ConstructorKind::Ps,
        params: Params { n, ..Params::default() },
        cardinality: sub(mul(nn, half)?, nn)?,
        multiplicity: Multiplicity::Uniform(half - 1),
        subset_count: Some(sub(mul(2, half)?, nn + 1)?),
    })
}

/// `q = 2^n − 2n − 2`, `|S| = n·2^n/2 − n² − n`, `m = 2^{n−1} − n − 1`.
pub fn predict_d2(n: u64) -> Result<Prediction, AnalyticsError> {
    if n < 3 {
        return Err(AnalyticsError::Domain { constructor: ConstructorKind::D2, requirement: "n >= 3" });
    }
    let nn = n as u128;
    let half = pow2(n - 1)?;
    Ok(Prediction {
        constructor: ConstructorKind::D2,
        params: Params { n, ..Params::default() },
        cardinality: sub(mul(nn, half)?, mul(nn, nn + 1)?)?,
        multiplicity: Multiplicity::Uniform(sub(half, nn + 1)?),
        subset_count: Some(sub(mul(2, half)?, 2 * nn + 2)?),
    })
}

/// `n` distinct objects, each with `m` clones: `|S| = n(m + 1)`.
pub fn predict_ucm(n: u64, m: u64) -> Result<Prediction, AnalyticsError> {
    let per = (m as u128) + 1;
    Ok(Prediction {
        constructor: ConstructorKind::Ucm,
        params: Params { n, m: Some(m), depth: None },
        cardinality: mul(n as u128, per)?,
        multiplicity: Multiplicity::Uniform(per),
        subset_count: None,
    })
}

/// Exact `C(n, k)`.
pub fn binomial(n: u64, k: u64) -> Result<u128, AnalyticsError> {
    if k > n {
        return Err(AnalyticsError::KGreaterThanN { n, k });
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut acc: u128 = 1;
    for i in 1..=k {
        // acc·(n−k+i)/i is exact; dividing by the gcd first keeps the
        // intermediate product as small as the result allows.
        let g = acc.gcd(&i);
        let factor = (n - k + i) / (i / g);
        acc = (acc / g).checked_mul(factor).ok_or(AnalyticsError::Overflow)?;
    }
    Ok(acc)
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::from(1u32), |acc, i| acc * i)
}

/// `n! / (k! (n − k)!)` over big integers.
fn binomial_factorial_form(n: u64, k: u64) -> Result<u128, AnalyticsError> {
    let c = factorial(n) / (factorial(k) * factorial(n - k));
    u128::try_from(c).map_err(|_| AnalyticsError::Overflow)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatrixKind {
    Ps,
    D2,
}

impl MatrixKind {
    /// Basic cardinality of the first row.
    pub fn first_n(self) -> u64 {
        match self {
            MatrixKind::Ps => 2,
            MatrixKind::D2 => 4,
        }
    }

    /// Largest subset cardinality used at basic cardinality `n`.
    pub fn max_cell(self, n: u64) -> u64 {
        match self {
            MatrixKind::Ps => n,
            MatrixKind::D2 => n - 2,
        }
    }
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixKind::Ps => "PS",
            MatrixKind::D2 => "D2",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixRow {
    pub multiplicity: u128,
    pub cardinality: u128,
    pub subset_count: u128,
    pub basic_cardinality: u64,
    /// `cells[j]` counts the subsets of cardinality `j + 2`.
    pub cells: Vec<u128>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionMatrix {
    pub kind: MatrixKind,
    pub rows: Vec<MatrixRow>,
}

impl PredictionMatrix {
    /// Number of cell columns needed to show every row.
    pub fn cell_columns(&self) -> usize {
        self.rows.iter().map(|r| r.cells.len()).max().unwrap_or(0)
    }
}

/// Builds `row_count` rows by the Pascal recurrence, cross-checking every
/// cell against the factorial form and every summary column against the
/// closed-form predictors.
pub fn matrix(kind: MatrixKind, row_count: usize) -> Result<PredictionMatrix, AnalyticsError> {
    let mut rows: Vec<MatrixRow> = Vec::with_capacity(row_count);
    for i in 0..row_count {
        let n = kind.first_n() + i as u64;
        let (cells, multiplicity) = match rows.last() {
            None => first_row(kind),
            Some(prev) => (next_cells(kind, prev)?, carried_multiplicity(prev)?),
        };

        for (j, &cell) in cells.iter().enumerate() {
            let k = j as u64 + 2;
            let expected = binomial_factorial_form(n, k)?;
            if cell != expected {
                return Err(AnalyticsError::Inconsistent {
                    kind,
                    n,
                    detail: format!("recurrence gives C({n},{k}) = {cell}, factorial form {expected}"),
                });
            }
        }

        let subset_count =
            cells.iter().try_fold(0u128, |acc, c| acc.checked_add(*c)).ok_or(AnalyticsError::Overflow)?;
        let cardinality = cells
            .iter()
            .enumerate()
            .try_fold(0u128, |acc, (j, c)| acc.checked_add(c.checked_mul(j as u128 + 2)?))
            .ok_or(AnalyticsError::Overflow)?;
        let row = MatrixRow { multiplicity, cardinality, subset_count, basic_cardinality: n, cells };
        check_closed_form(kind, &row)?;
        rows.push(row);
    }
    Ok(PredictionMatrix { kind, rows })
}

fn first_row(kind: MatrixKind) -> (Vec<u128>, u128) {
    match kind {
        // {A, B}: one subset, each object once.
        MatrixKind::Ps => (vec![1], 1),
        // n = 4: the six pairs, each object in three of the decompositions.
        MatrixKind::D2 => (vec![6], 3),
    }
}

/// Sum of the previous row from the basic-cardinality column onward.
fn carried_multiplicity(prev: &MatrixRow) -> Result<u128, AnalyticsError> {
    prev.cells
        .iter()
        .try_fold(prev.basic_cardinality as u128, |acc, c| acc.checked_add(*c))
        .ok_or(AnalyticsError::Overflow)
}

/// Pascal step from the previous row. The previous row's basic cardinality
/// `n − 1` stands in for `C(n−1, 1)`; for D2 it also stands in for the
/// truncated `C(n−1, n−2)`.
fn next_cells(kind: MatrixKind, prev: &MatrixRow) -> Result<Vec<u128>, AnalyticsError> {
    let p = prev.basic_cardinality;
    let n = p + 1;
    let prev_cell = |k: u64| -> u128 {
        if k == 1 {
            p as u128
        } else if k >= 2 && ((k - 2) as usize) < prev.cells.len() {
            prev.cells[(k - 2) as usize]
        } else if k == p - 1 && kind == MatrixKind::D2 {
            p as u128
        } else if k == p {
            1
        } else {
            0
        }
    };
    (2..=kind.max_cell(n)).map(|k| prev_cell(k - 1).checked_add(prev_cell(k)).ok_or(AnalyticsError::Overflow)).collect()
}

fn check_closed_form(kind: MatrixKind, row: &MatrixRow) -> Result<(), AnalyticsError> {
    let n = row.basic_cardinality;
    let p = match kind {
        MatrixKind::Ps => predict_ps(n)?,
        MatrixKind::D2 => predict_d2(n)?,
    };
    let checks = [
        ("multiplicity", Multiplicity::Uniform(row.multiplicity) == p.multiplicity),
        ("cardinality", row.cardinality == p.cardinality),
        ("subset count", Some(row.subset_count) == p.subset_count),
        ("uniform multiplicity", row.cardinality == row.multiplicity * n as u128),
    ];
    match checks.iter().find(|(_, ok)| !ok) {
        None => Ok(()),
        Some((what, _)) => Err(AnalyticsError::Inconsistent {
            kind,
            n,
            detail: format!("{what} column disagrees with the closed form"),
        }),
    }
}
