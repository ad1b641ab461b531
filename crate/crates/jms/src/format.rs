//! JSON file formats for matrices, operators, words and reports.
//!
//! Scalars are written as strings (`"-3/4"` over `Q`, `"5"` over `F_p`) so
//! that rationals of any size round-trip exactly. Integer JSON numbers are
//! accepted on input.

use jms_core::analysis::IdentityCheck;
use jms_core::{Field, FieldSpec, FactorizationReport, Matrix, OperatorMatrix, Word};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const CONVENTION: &str = "apply-last-first";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarText {
    Text(String),
    Int(i64),
}

impl ScalarText {
    fn as_text(&self) -> String {
        match self {
            ScalarText::Text(s) => s.clone(),
            ScalarText::Int(v) => v.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub field: String,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<ScalarText>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub field: String,
    pub n: usize,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<ScalarText>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordJson {
    pub field: String,
    pub n: usize,
    pub convention: String,
    /// Each factor as an `n x n` grid of scalars.
    pub factors: Vec<Vec<Vec<ScalarText>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportJson {
    pub verified: bool,
    pub length: usize,
    pub word: WordJson,
    /// SHA-256 of the compact operator JSON of the target.
    pub target_hash: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityJson {
    pub id: String,
    pub field: String,
    pub n: usize,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

fn grid<F: Field>(m: &Matrix<F>) -> Vec<Vec<ScalarText>> {
    let f = m.field();
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|x| ScalarText::Text(f.render(x))).collect())
        .collect()
}

fn parse_grid<F: Field>(field: &F, rows: usize, cols: usize, entries: &[Vec<ScalarText>]) -> Result<Matrix<F>, CliError> {
    if entries.len() != rows || entries.iter().any(|r| r.len() != cols) {
        return Err(CliError::input(format!("entry grid does not match the declared {rows}x{cols} shape")));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for row in entries {
        for x in row {
            data.push(field.parse(&x.as_text())?);
        }
    }
    Ok(Matrix::new(field.clone(), rows, cols, data)?)
}

fn check_field<F: Field>(field: &F, text: &str) -> Result<(), CliError> {
    let declared: FieldSpec = text.parse()?;
    if declared != field.spec() {
        return Err(CliError::input(format!("file is over {declared}, expected {}", field.spec())));
    }
    Ok(())
}

impl MatrixJson {
    pub fn from_matrix<F: Field>(m: &Matrix<F>) -> Self {
        MatrixJson { field: m.field().spec().to_string(), rows: m.rows(), cols: m.cols(), entries: grid(m) }
    }

    pub fn to_matrix<F: Field>(&self, field: &F) -> Result<Matrix<F>, CliError> {
        check_field(field, &self.field)?;
        parse_grid(field, self.rows, self.cols, &self.entries)
    }
}

impl OperatorJson {
    pub fn from_operator<F: Field>(t: &OperatorMatrix<F>) -> Self {
        let body = t.body();
        OperatorJson {
            field: t.field().spec().to_string(),
            n: t.n(),
            rows: body.rows(),
            cols: body.cols(),
            entries: grid(body),
        }
    }

    pub fn to_operator<F: Field>(&self, field: &F) -> Result<OperatorMatrix<F>, CliError> {
        check_field(field, &self.field)?;
        let d = self.n * self.n;
        if self.rows != d || self.cols != d {
            return Err(CliError::input(format!("operator for n = {} must be {d}x{d}, got {}x{}", self.n, self.rows, self.cols)));
        }
        let body = parse_grid(field, self.rows, self.cols, &self.entries)?;
        Ok(OperatorMatrix::from_matrix(self.n, body)?)
    }

    /// Hex SHA-256 of the compact JSON encoding.
    pub fn hash(&self) -> String {
        let compact = serde_json::to_string(self).expect("plain data serializes");
        hex::encode(Sha256::digest(compact.as_bytes()))
    }
}

impl WordJson {
    pub fn from_word<F: Field>(w: &Word<F>) -> Self {
        WordJson {
            field: w.field().spec().to_string(),
            n: w.n(),
            convention: CONVENTION.to_string(),
            factors: w.factors().iter().map(grid).collect(),
        }
    }

    pub fn to_word<F: Field>(&self, field: &F) -> Result<Word<F>, CliError> {
        check_field(field, &self.field)?;
        if self.convention != CONVENTION {
            return Err(CliError::input(format!("unsupported word convention {:?}", self.convention)));
        }
        let factors = self
            .factors
            .iter()
            .map(|g| parse_grid(field, self.n, self.n, g))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Word::new(field.clone(), self.n, factors)?)
    }
}

impl ReportJson {
    pub fn from_report<F: Field>(r: &FactorizationReport<F>) -> Self {
        ReportJson {
            verified: r.verified,
            length: r.length,
            word: WordJson::from_word(&r.word),
            target_hash: OperatorJson::from_operator(&r.target).hash(),
        }
    }
}

impl From<&IdentityCheck> for IdentityJson {
    fn from(c: &IdentityCheck) -> Self {
        IdentityJson {
            id: c.id.to_string(),
            field: c.field.to_string(),
            n: c.n,
            pass: c.pass,
            skipped: c.skipped.clone(),
            counterexample: c.counterexample.clone(),
        }
    }
}

/// Reads only the field and size declared in a file, before typed parsing.
#[derive(Debug, Deserialize)]
pub struct Header {
    pub field: String,
    pub n: Option<usize>,
}
