//! Problem files, result files and trace export.
//!
//! A problem file is a JSON document:
//!
//! ```json
//! {
//!   "format": 1,
//!   "m": 2, "n": 2,
//!   "A": [[1, 0], [0, 1]],
//!   "B": [[0, 0], [0, 0]],
//!   "C": "neg_identity",
//!   "cone": {"type": "orthant"}
//! }
//! ```
//!
//! Tensors are nested arrays of depth `m`, outermost level = first index.
//! Any tensor may instead be one of the literals `"identity"`,
//! `"neg_identity"` or `"zero"`; `C` defaults to `"neg_identity"`.

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::admm::TraceRow;
use crate::error::{Error, Result};
use crate::model::{Cone, ProblemTriple, Residuals, UnitKind};
use crate::tensor::{entry_count, Tensor};

pub const FORMAT_VERSION: u32 = 1;

fn neg_identity_value() -> Value {
    Value::String("neg_identity".into())
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConeSpec {
    Orthant,
    Polyhedral {
        #[serde(rename = "H")]
        h: Vec<Vec<f64>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    pub format: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub m: usize,
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Value,
    #[serde(rename = "B")]
    pub b: Value,
    #[serde(rename = "C", default = "neg_identity_value")]
    pub c: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone: Option<ConeSpec>,
    /// Replace each tensor by its symmetric part.
    #[serde(default, skip_serializing_if = "is_false")]
    pub symmetrize: bool,
    /// Keep tensors that are not symmetric as given.
    #[serde(default, skip_serializing_if = "is_false")]
    pub allow_asymmetric: bool,
}

fn nest(data: &[f64], m: usize, n: usize) -> Value {
    if m == 1 {
        return Value::Array(data.iter().map(|&x| Value::from(x)).collect());
    }
    let block = data.len() / n;
    Value::Array((0..n).map(|i| nest(&data[i * block..(i + 1) * block], m - 1, n)).collect())
}

fn flatten(value: &Value, depth: usize, n: usize, path: &str, out: &mut Vec<f64>) -> Result<()> {
    if depth == 0 {
        return match value.as_f64() {
            Some(x) if x.is_finite() => {
                out.push(x);
                Ok(())
            }
            _ => Err(Error::Document(format!("{path}: expected a finite number, found {value}"))),
        };
    }
    let Value::Array(items) = value else {
        return Err(Error::Document(format!("{path}: expected an array of length {n}")));
    };
    if items.len() != n {
        return Err(Error::Document(format!(
            "{path}: ragged array, expected length {n}, found {}",
            items.len()
        )));
    }
    for (i, item) in items.iter().enumerate() {
        flatten(item, depth - 1, n, &format!("{path}[{i}]"), out)?;
    }
    Ok(())
}

impl ProblemDocument {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::Document(format!("line {} column {}: {e}", e.line(), e.column())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document values are JSON")
    }

    fn tensor(&self, field: &str, value: &Value) -> Result<Tensor> {
        let (m, n) = (self.m, self.n);
        let t = match value {
            Value::String(s) => match s.as_str() {
                "identity" => Tensor::identity(m, n),
                "neg_identity" => Ok(Tensor::identity(m, n)?.scaled(-1.0)),
                "zero" => Tensor::zeros(m, n),
                other => Err(Error::Document(format!(
                    "{field}: unknown literal {other:?} (expected identity, neg_identity or zero)"
                ))),
            },
            _ => {
                let mut data = Vec::with_capacity(entry_count(m, n)?);
                flatten(value, m, n, field, &mut data)?;
                if self.symmetrize {
                    Tensor::symmetrize(m, n, data)
                } else if self.allow_asymmetric {
                    Tensor::general(m, n, data)
                } else {
                    Tensor::symmetric(m, n, data)
                }
            }
        };
        t.map_err(|e| match e {
            Error::Document(_) => e,
            other => Error::Document(format!("{field}: {other}")),
        })
    }

    /// Builds and validates the problem.
    pub fn to_problem(&self) -> Result<ProblemTriple> {
        if self.format != FORMAT_VERSION {
            return Err(Error::Document(format!(
                "format: unsupported version {} (expected {FORMAT_VERSION})",
                self.format
            )));
        }
        if self.m < 2 {
            return Err(Error::InvalidOrder(self.m));
        }
        if self.n < 1 {
            return Err(Error::InvalidDimension(self.n));
        }
        entry_count(self.m, self.n)?;
        let problem = ProblemTriple::new(
            self.tensor("A", &self.a)?,
            self.tensor("B", &self.b)?,
            self.tensor("C", &self.c)?,
        )?;
        match &self.cone {
            None | Some(ConeSpec::Orthant) => Ok(problem),
            Some(ConeSpec::Polyhedral { h }) => {
                let p = h.len();
                if let Some((r, row)) = h.iter().enumerate().find(|(_, row)| row.len() != self.n) {
                    return Err(Error::Document(format!(
                        "cone.H[{r}]: ragged array, expected length {}, found {}",
                        self.n,
                        row.len()
                    )));
                }
                let mat = DMatrix::from_fn(p, self.n, |r, c| h[r][c]);
                problem.with_polyhedral_cone(mat)
            }
        }
    }

    /// Dense document for `problem`; `C = -I` is written as a literal.
    pub fn from_problem(problem: &ProblemTriple, name: Option<String>) -> Self {
        let (m, n) = (problem.order(), problem.dim());
        let c = if problem.c_kind() == UnitKind::NegIdentity {
            neg_identity_value()
        } else {
            nest(problem.c().data(), m, n)
        };
        let cone = match problem.cone() {
            Cone::NonnegativeOrthant => Some(ConeSpec::Orthant),
            Cone::Polyhedral(h) => Some(ConeSpec::Polyhedral {
                h: (0..h.nrows()).map(|r| h.row(r).iter().copied().collect()).collect(),
            }),
        };
        let asymmetric = [problem.a(), problem.b(), problem.c()].iter().any(|t| !t.is_symmetric());
        Self {
            format: FORMAT_VERSION,
            name,
            m,
            n,
            a: nest(problem.a().data(), m, n),
            b: nest(problem.b().data(), m, n),
            c,
            cone,
            symmetrize: false,
            allow_asymmetric: asymmetric,
        }
    }
}

pub const BUNDLED: [(&str, &str); 3] = [
    ("example1", include_str!("../problems/example1.problem")),
    ("example2", include_str!("../problems/example2.problem")),
    ("example3", include_str!("../problems/example3.problem")),
];

/// The bundled problem file for example 1, 2 or 3.
pub fn bundled_text(example: usize) -> Result<&'static str> {
    BUNDLED
        .get(example.wrapping_sub(1))
        .map(|(_, text)| *text)
        .ok_or_else(|| Error::InvalidParameter(format!("no bundled example {example}")))
}

pub fn bundled_problem(example: usize) -> Result<ProblemTriple> {
    ProblemDocument::parse(bundled_text(example)?)?.to_problem()
}

/// Reads a problem file. A missing file named `exampleK.problem` (or
/// `exampleK`) falls back to the bundled copy.
pub fn load_problem(path: &Path) -> Result<ProblemTriple> {
    let text = match std::fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            let stem = path.file_name().and_then(|s| s.to_str()).unwrap_or_default();
            let stem = stem.strip_suffix(".problem").unwrap_or(stem);
            match BUNDLED.iter().find(|(name, _)| *name == stem) {
                Some((_, text)) => text.to_string(),
                None => return Err(Error::Document(format!("{}: {e}", path.display()))),
            }
        }
        Err(e) => return Err(Error::Document(format!("{}: {e}", path.display()))),
    };
    ProblemDocument::parse(&text)
        .and_then(|doc| doc.to_problem())
        .map_err(|e| Error::Document(format!("{}: {e}", path.display())))
}

pub fn write_problem(path: &Path, doc: &ProblemDocument) -> Result<()> {
    std::fs::write(path, doc.to_json() + "\n")?;
    Ok(())
}

/// One row of a result file, mirroring a reference table row.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_point: Option<Vec<f64>>,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Eigenvector in solver scaling.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    /// Eigenvector with `eᵀx = 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_simplex: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_secs: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residuals: Option<Residuals>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub passed: Option<bool>,
    /// 1-based support.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub format: u32,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
    pub records: Vec<RunRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub completeness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count_bound: Option<String>,
}

impl ResultDocument {
    pub fn new(command: &str, problem: Option<String>) -> Self {
        Self {
            format: FORMAT_VERSION,
            command: command.into(),
            problem,
            records: Vec::new(),
            completeness: None,
            count_bound: None,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("result values are JSON");
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Document(format!("{}: {e}", path.display())))
    }
}

/// Writes `iter,relerr,objective,violation` rows with LF endings.
pub fn write_trace_csv<W: Write>(mut out: W, rows: &[TraceRow]) -> Result<()> {
    writeln!(out, "iter,relerr,objective,violation")?;
    for r in rows {
        writeln!(out, "{},{:e},{:e},{:e}", r.iter, r.relerr, r.objective, r.violation)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
        "format": 1, "m": 2, "n": 2,
        "A": [[1, 0], [0, 1]],
        "B": "zero"
    }"#;

    #[test]
    fn defaults_and_literals() {
        let q = ProblemDocument::parse(SMALL).unwrap().to_problem().unwrap();
        assert_eq!(q.c_kind(), UnitKind::NegIdentity);
        assert_eq!(q.a(), &Tensor::identity(2, 2).unwrap());
        assert!(q.b().data().iter().all(|&x| x == 0.0));
        assert!(q.is_orthant());
    }

    #[test]
    fn ragged_arrays_name_the_field() {
        let text = SMALL.replace("[[1, 0], [0, 1]]", "[[1, 0], [0]]");
        let err = ProblemDocument::parse(&text).unwrap().to_problem().unwrap_err();
        assert!(err.to_string().contains("A[1]"), "{err}");
        let text = SMALL.replace("[[1, 0], [0, 1]]", "[[1, 0], 3]");
        let err = ProblemDocument::parse(&text).unwrap().to_problem().unwrap_err();
        assert!(err.to_string().contains("A[1]"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_line() {
        let err = ProblemDocument::parse("{\n \"format\": 1,\n \"m\": }").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn symmetry_policy() {
        let text = SMALL.replace("[[1, 0], [0, 1]]", "[[1, 2], [0, 1]]");
        let err = ProblemDocument::parse(&text).unwrap().to_problem().unwrap_err();
        assert!(err.to_string().starts_with("A:"), "{err}");
        let mut doc = ProblemDocument::parse(&text).unwrap();
        doc.symmetrize = true;
        assert_eq!(doc.to_problem().unwrap().a().get(&[0, 1]), 1.0);
        doc.symmetrize = false;
        doc.allow_asymmetric = true;
        assert_eq!(doc.to_problem().unwrap().a().get(&[0, 1]), 2.0);
    }

    #[test]
    fn round_trip() {
        for k in 1..=3 {
            let doc = ProblemDocument::parse(bundled_text(k).unwrap()).unwrap();
            let again = ProblemDocument::parse(&doc.to_json()).unwrap();
            assert_eq!(again, doc);
            let q = doc.to_problem().unwrap();
            let regenerated = ProblemDocument::from_problem(&q, doc.name.clone());
            assert_eq!(regenerated.to_problem().unwrap(), q);
        }
    }

    #[test]
    fn bundled_examples_load() {
        let q1 = bundled_problem(1).unwrap();
        assert_eq!((q1.order(), q1.dim()), (2, 4));
        assert!(q1.a().is_symmetric());
        assert_eq!(q1.a().get(&[2, 2]), 0.9325);
        let q2 = bundled_problem(2).unwrap();
        assert_eq!((q2.order(), q2.dim()), (3, 4));
        assert!((q2.a().get(&[1, 1, 1]) - 12.0).abs() < 1e-12);
        let q3 = bundled_problem(3).unwrap();
        assert_eq!((q3.order(), q3.dim()), (4, 3));
        assert_eq!(q3.a().diagonal(2), 0.3492);
        assert_eq!(q3.b().diagonal(2), 0.1266);
        assert!(bundled_problem(4).is_err());
    }

    #[test]
    fn polyhedral_cone_spec() {
        let text = SMALL.replace("\"B\": \"zero\"", "\"B\": \"zero\", \"cone\": {\"type\": \"polyhedral\", \"H\": [[1, 1]]}");
        let q = ProblemDocument::parse(&text).unwrap().to_problem().unwrap();
        assert!(!q.is_orthant());
        let bad = text.replace("[[1, 1]]", "[[1]]");
        assert!(ProblemDocument::parse(&bad).unwrap().to_problem().is_err());
    }

    #[test]
    fn trace_csv_format() {
        let rows = [TraceRow {
            iter: 1,
            relerr: 0.5,
            objective: -1.25,
            violation: 1e-7,
        }];
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "iter,relerr,objective,violation\n1,5e-1,-1.25e0,1e-7\n");
    }
}
