//! File formats: permutation tables (plain text or JSON) and analysis reports.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construct::ConstructionResult;
use crate::field::{default_modulus, FieldCtx, FieldError};
use crate::perm::{PermError, Permutation};
use crate::spectral::{diff_spectrum, nl_bounds, walsh_stats, SetShape, SpectralError};
use crate::subset::parse_hex;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("line {line}: cannot parse {text:?} as a decimal or 0x-hex value")]
    BadValue { line: usize, text: String },
    #[error("bad modulus literal {0:?}")]
    BadModulus(String),
    #[error("table length {0} is not a power of two")]
    BadLength(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// JSON wrapper `{n, modulus, table}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermFile {
    pub n: u32,
    pub modulus: String,
    pub table: Vec<u32>,
}

impl PermFile {
    pub fn from_perm(p: &Permutation) -> Self {
        PermFile {
            n: p.ctx().n(),
            modulus: format!("{:#x}", p.ctx().modulus()),
            table: p.table().to_vec(),
        }
    }

    pub fn to_perm(&self) -> Result<Permutation, IoError> {
        let m =
            parse_hex(&self.modulus).ok_or_else(|| IoError::BadModulus(self.modulus.clone()))?;
        let ctx = Arc::new(FieldCtx::new(self.n, m)?);
        Ok(Permutation::from_table(ctx, self.table.clone())?)
    }
}

fn parse_value(line: usize, text: &str) -> Result<u32, IoError> {
    let bad = || IoError::BadValue {
        line,
        text: text.to_string(),
    };
    if let Some(hex) = text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
        u32::from_str_radix(hex, 16).map_err(|_| bad())
    } else {
        text.parse().map_err(|_| bad())
    }
}

/// Index-ordered values, one per line (decimal or 0x-hex); blank lines and `#` comments skipped.
pub fn parse_table_text(text: &str) -> Result<Vec<u32>, IoError> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| parse_value(i, l))
        .collect()
}

pub fn table_to_text(p: &Permutation, hex: bool) -> String {
    let mut out = String::with_capacity(p.table().len() * 6);
    for &v in p.table() {
        if hex {
            let _ = writeln!(out, "{v:#x}");
        } else {
            let _ = writeln!(out, "{v}");
        }
    }
    out
}

/// Loads a permutation from either format. For plain text, n comes from the
/// table length and the modulus defaults to the built-in one unless given.
pub fn load_permutation(text: &str, modulus: Option<u32>) -> Result<Permutation, IoError> {
    if text.trim_start().starts_with('{') {
        let file: PermFile = serde_json::from_str(text)?;
        return file.to_perm();
    }
    let values = parse_table_text(text)?;
    let len = values.len();
    if !len.is_power_of_two() || len < 4 {
        return Err(IoError::BadLength(len));
    }
    let n = len.trailing_zeros();
    let m = match modulus {
        Some(m) => m,
        None => default_modulus(n).ok_or(FieldError::NoDefaultModulus(n))?,
    };
    let ctx = Arc::new(FieldCtx::new(n, m)?);
    Ok(Permutation::from_table(ctx, values)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub size_bound: Option<i64>,
    pub subfield_bound: Option<i64>,
    pub best: Option<i64>,
}

/// Full cryptographic profile of one permutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub n: u32,
    pub modulus: String,
    pub provenance: String,
    pub diff_spectrum: Vec<(u32, u64)>,
    pub uniformity: u32,
    pub nonlinearity: u32,
    pub degree: u32,
    pub bounds: BoundsReport,
    pub walsh_extended: Vec<(u32, u64)>,
}

impl AnalysisReport {
    /// `shape` enables the nonlinearity bounds; pass `None` for arbitrary permutations.
    pub fn analyze(p: &Permutation, provenance: &str, shape: Option<SetShape>) -> Self {
        let n = p.ctx().n();
        let d = diff_spectrum(p);
        let w = walsh_stats(p);
        let bounds = match shape.map(|s| nl_bounds(n, s)) {
            Some(Ok(b)) => BoundsReport {
                size_bound: Some(b.size_bound),
                subfield_bound: b.subfield_bound,
                best: Some(b.best),
            },
            Some(Err(SpectralError::UnsupportedN(_))) | None => BoundsReport {
                size_bound: None,
                subfield_bound: None,
                best: None,
            },
            Some(Err(e)) => unreachable!("bounds only fail on n: {e}"),
        };
        AnalysisReport {
            n,
            modulus: format!("{:#x}", p.ctx().modulus()),
            provenance: provenance.to_string(),
            uniformity: d.uniformity(),
            diff_spectrum: d.counts.into_iter().collect(),
            nonlinearity: w.nonlinearity,
            degree: p.algebraic_degree(),
            bounds,
            walsh_extended: w.extended().into_iter().collect(),
        }
    }

    pub fn from_construction(r: &ConstructionResult) -> Self {
        Self::analyze(&r.perm, &r.provenance.to_string(), Some(r.shape()))
    }

    pub const CSV_HEADER: &'static str =
        "n,modulus,provenance,uniformity,nonlinearity,degree,size_bound,subfield_bound,best,diff_spectrum,walsh_extended";

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<i64>| v.map(|x| x.to_string()).unwrap_or_default();
        let pairs = |v: &[(u32, u64)]| {
            v.iter()
                .map(|(a, b)| format!("{a}^{b}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        format!(
            "{},{},\"{}\",{},{},{},{},{},{},{},{}",
            self.n,
            self.modulus,
            self.provenance.replace('"', "'"),
            self.uniformity,
            self.nonlinearity,
            self.degree,
            opt(self.bounds.size_bound),
            opt(self.bounds.subfield_bound),
            opt(self.bounds.best),
            pairs(&self.diff_spectrum),
            pairs(&self.walsh_extended),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_and_json_parse_to_same_perm() {
        let ctx = Arc::new(FieldCtx::with_default(4).unwrap());
        let p = Permutation::inverse_function(ctx);
        let dec = load_permutation(&table_to_text(&p, false), None).unwrap();
        let hex = load_permutation(&table_to_text(&p, true), None).unwrap();
        let json = serde_json::to_string(&PermFile::from_perm(&p)).unwrap();
        let js = load_permutation(&json, None).unwrap();
        assert_eq!(dec, p);
        assert_eq!(hex, p);
        assert_eq!(js, p);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(matches!(
            load_permutation("1\n2\n3\n", None),
            Err(IoError::BadLength(3))
        ));
        assert!(matches!(
            load_permutation("0\n0\n0\n0\n", None),
            Err(IoError::Perm(PermError::NotAPermutation(_)))
        ));
        assert!(matches!(
            load_permutation("0\nzz\n1\n2\n", None),
            Err(IoError::BadValue { line: 2, .. })
        ));
    }

    #[test]
    fn report_of_inverse_n6() {
        let ctx = Arc::new(FieldCtx::with_default(6).unwrap());
        let p = Permutation::inverse_function(ctx);
        let r = AnalysisReport::analyze(&p, "inverse", Some(SetShape::General { cardinality: 0 }));
        assert_eq!(r.uniformity, 4);
        assert_eq!(r.degree, 5);
        assert_eq!(r.bounds.size_bound, Some(24));
        let json = serde_json::to_string(&r).unwrap();
        let back: AnalysisReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        assert_eq!(
            r.csv_row().split(',').count(),
            AnalysisReport::CSV_HEADER.split(',').count()
        );
    }
}
