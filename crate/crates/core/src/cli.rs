//! Command-line surface.
//!
//! Exit status: 0 success, 1 usage error, 2 spec or input error,
//! 3 verification mismatch.

use std::ffi::OsString;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::algebra::ObjectCollection;
use crate::analytics::{self, ConstructorKind, MatrixKind};
use crate::constructors::{self, MultiplicitySpec};
use crate::io::render::{self, Format};
use crate::io::{parse_spec, SpecDocument, SpecError};
use crate::oracle::{self, OracleError, SweepRanges};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "coost", version, about = "Build, count and classify multisets of typed objects")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = FormatArg::Text)]
    format: FormatArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FormatArg {
    Text,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a constructor on objects from a spec file.
    Construct {
        #[command(subcommand)]
        constructor: Construct,
    },
    /// Closed-form size and multiplicity of a constructor's output.
    Predict {
        #[command(subcommand)]
        constructor: Predict,
    },
    /// Prediction matrix for PS or D2.
    Matrix {
        #[arg(value_enum)]
        kind: MatrixArg,
        /// Number of rows, starting from the smallest basic set.
        #[arg(long, default_value_t = 5)]
        rows: usize,
    },
    /// Compare constructor output on synthetic input with the prediction.
    /// Ranges are inclusive: `--n 2..12` or a single value.
    Verify {
        #[arg(value_enum)]
        constructor: CtorArg,
        #[arg(long, value_parser = parse_range)]
        n: RangeInclusive<u64>,
        #[arg(long, value_parser = parse_range)]
        m: Option<RangeInclusive<u64>>,
        #[arg(long, value_parser = parse_range)]
        depth: Option<RangeInclusive<u64>>,
    },
    /// Infer the class of a set or a list of objects.
    Classify {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, required_unless_present = "objects", conflicts_with = "objects")]
        set: Option<String>,
        /// Comma-separated object identifiers.
        #[arg(long, value_delimiter = ',')]
        objects: Option<Vec<String>>,
    },
}

#[derive(Args, Debug)]
struct SpecArg {
    /// JSON spec file.
    #[arg(long)]
    spec: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Construct {
    /// Multiset from `(object, clones)` pairs, e.g. `--objects A:3,B:2`.
    Ucm {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, value_delimiter = ',', required = true)]
        objects: Vec<String>,
    },
    /// Indexed Cartesian product of two disjoint sets.
    Cp {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Recursive cloning of a set.
    Rcl {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        set: String,
        #[arg(long)]
        depth: u32,
    },
    /// Indexed union of all subsets with at least two elements.
    Ps {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        set: String,
    },
    /// Indexed two-part decompositions.
    D2 {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        set: String,
    },
}

#[derive(Subcommand, Debug)]
enum Predict {
    Cp {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
    },
    Rcl {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        depth: u64,
    },
    Ps {
        #[arg(long)]
        n: u64,
    },
    D2 {
        #[arg(long)]
        n: u64,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum MatrixArg {
    Ps,
    D2,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum CtorArg {
    Ucm,
    Cp,
    Rcl,
    Ps,
    D2,
}

impl From<CtorArg> for ConstructorKind {
    fn from(c: CtorArg) -> Self {
        match c {
            CtorArg::Ucm => ConstructorKind::Ucm,
            CtorArg::Cp => ConstructorKind::Cp,
            CtorArg::Rcl => ConstructorKind::Rcl,
            CtorArg::Ps => ConstructorKind::Ps,
            CtorArg::D2 => ConstructorKind::D2,
        }
    }
}

fn parse_range(s: &str) -> Result<RangeInclusive<u64>, String> {
    let num = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("`{t}`: {e}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let v = num(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok(lo..=hi)
}

/// A failure with its exit status and message.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Self { code: EXIT_INPUT, message: message.to_string() }
    }

    fn usage(message: impl ToString) -> Self {
        Self { code: EXIT_USAGE, message: message.to_string() }
    }
}

impl From<SpecError> for Failure {
    fn from(e: SpecError) -> Self {
        Failure::input(format!("[{}] {e}", e.code()))
    }
}

impl From<constructors::ConstructError> for Failure {
    fn from(e: constructors::ConstructError) -> Self {
        Failure::input(e)
    }
}

impl From<analytics::AnalyticsError> for Failure {
    fn from(e: analytics::AnalyticsError) -> Self {
        Failure::usage(e)
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Construct(e) => Failure::input(e),
            other => Failure::usage(other),
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let format = match cli.format {
        FormatArg::Text => Format::Text,
        FormatArg::Csv => Format::Csv,
    };
    match dispatch(cli.command, format) {
        Ok((text, code)) => {
            if out.write_all(text.as_bytes()).is_err() {
                return EXIT_USAGE;
            }
            code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn load(path: &Path) -> Result<SpecDocument, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok(parse_spec(&text)?)
}

fn dispatch(command: Command, format: Format) -> Result<(String, i32), Failure> {
    let text = match command {
        Command::Construct { constructor } => construct(constructor, format)?,
        Command::Predict { constructor } => {
            let p = match constructor {
                Predict::Cp { n, m } => analytics::predict_cp(n, m)?,
                Predict::Rcl { n, depth } => analytics::predict_rcl(n, depth)?,
                Predict::Ps { n } => analytics::predict_ps(n)?,
                Predict::D2 { n } => analytics::predict_d2(n)?,
            };
            render::prediction(&p, format)
        }
        Command::Matrix { kind, rows } => {
            let kind = match kind {
                MatrixArg::Ps => MatrixKind::Ps,
                MatrixArg::D2 => MatrixKind::D2,
            };
            render::matrix(&analytics::matrix(kind, rows)?, format)
        }
        Command::Verify { constructor, n, m, depth } => {
            let reports = oracle::verify_sweep(constructor.into(), &SweepRanges { n, m, depth })?;
            let code = if reports.iter().all(|r| r.is_match()) { EXIT_OK } else { EXIT_MISMATCH };
            return Ok((render::reports(&reports, format), code));
        }
        Command::Classify { spec, set, objects } => {
            let doc = load(&spec)?;
            let c = match (set, objects) {
                (Some(label), _) => doc.collection(&label)?,
                (None, Some(ids)) => {
                    let ids: Vec<&str> = ids.iter().map(String::as_str).collect();
                    doc.collection_of("S", &ids)?
                }
                (None, None) => unreachable!("clap requires --set or --objects"),
            };
            if c.is_empty() {
                return Err(Failure::input("cannot classify an empty collection"));
            }
            match format {
                Format::Text => render::class_block(c.class(), c.elements()),
                Format::Csv => classify_csv(&c),
            }
        }
    };
    Ok((text, EXIT_OK))
}

fn classify_csv(c: &ObjectCollection) -> String {
    use crate::model::{ClassBody, ClassForm};
    let mut out = String::from("part,kind,name\n");
    let mut push = |part: &str, body: &ClassBody| {
        for p in body.specification.properties() {
            out.push_str(&format!("{part},property,{}\n", p.name()));
        }
        for m in body.signature.methods() {
            out.push_str(&format!("{part},method,{m}\n"));
        }
    };
    match c.class().form() {
        ClassForm::Homogeneous(body) => push("class", body),
        ClassForm::Inhomogeneous { core, projections } => {
            push("core", core);
            let mut seen: Vec<&str> = Vec::new();
            for o in c {
                let name = o.class().name();
                if !seen.contains(&name) {
                    seen.push(name);
                    push(&format!("pr({name})"), &projections[name]);
                }
            }
        }
    }
    out
}

fn parse_ucm_entry(doc: &SpecDocument, entry: &str) -> Result<(crate::model::ObjectInstance, u64), Failure> {
    let (id, count) =
        entry.split_once(':').ok_or_else(|| Failure::usage(format!("`{entry}`: expected OBJECT:CLONES")))?;
    let count = count.trim().parse::<u64>().map_err(|e| Failure::usage(format!("`{entry}`: {e}")))?;
    Ok((doc.object(id.trim())?.clone(), count))
}

fn construct(c: Construct, format: Format) -> Result<String, Failure> {
    let mut note = None;
    let built = match c {
        Construct::Ucm { spec, objects } => {
            let doc = load(&spec.spec)?;
            let entries = objects.iter().map(|e| parse_ucm_entry(&doc, e)).collect::<Result<_, _>>()?;
            constructors::ucm(&MultiplicitySpec::new(entries)?)?
        }
        Construct::Cp { spec, left, right } => {
            let doc = load(&spec.spec)?;
            constructors::cp(&doc.collection(&left)?, &doc.collection(&right)?)?
        }
        Construct::Rcl { spec, set, depth } => constructors::rcl(&load(&spec.spec)?.collection(&set)?, depth)?,
        Construct::Ps { spec, set } => constructors::ps(&load(&spec.spec)?.collection(&set)?)?,
        Construct::D2 { spec, set } => {
            let out = constructors::d2(&load(&spec.spec)?.collection(&set)?)?;
            if out.degenerate {
                note = Some("note: fewer than 4 objects, no two-part decomposition exists\n");
            }
            out.collection
        }
    };
    let mut text = render::collection(&built, format);
    if let (Some(n), Format::Text) = (note, format) {
        text.push_str(n);
    }
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("coost").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2..12"), Ok(2..=12));
        assert_eq!(parse_range("2..=12"), Ok(2..=12));
        assert_eq!(parse_range("4"), Ok(4..=4));
        assert!(parse_range("5..3").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn predict_and_usage() {
        assert_eq!(run_str(&["predict", "d2", "--n", "7"]), (0, "m=56 |S|=392 q=112\n".into(), String::new()));
        let (code, out, err) = run_str(&["predict", "ps"]);
        assert_eq!((code, out.as_str()), (1, ""));
        assert!(err.contains("--n"));
        let (code, _, err) = run_str(&["predict", "d2", "--n", "2"]);
        assert_eq!(code, 1);
        assert!(err.starts_with("error:"));
        let (code, out, _) = run_str(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("construct"));
    }

    #[test]
    fn verify_exit_status() {
        let (code, out, _) = run_str(&["verify", "ps", "--n", "2..4"]);
        assert_eq!(code, 0);
        assert!(out.ends_with("3/3 match\n"), "{out}");
        let (code, _, err) = run_str(&["verify", "cp", "--n", "1..2"]);
        assert_eq!(code, 1, "{err}");
    }

    #[test]
    fn missing_spec_file() {
        let (code, _, err) = run_str(&["construct", "ps", "--spec", "/nonexistent.json", "--set", "S"]);
        assert_eq!(code, 2);
        assert!(err.contains("/nonexistent.json"));
    }
}
