//! File formats: MatrixMarket, dense CSV, and JSON partitions.
//!
//! All file surfaces use 1-based state indices.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::{ClusterPartition, Matrix};
use crate::recovery::{ApproxClusterResult, KEstimate, RecoveryResult};

/// Formats a value with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixFormat {
    MatrixMarket,
    Csv,
}

impl MatrixFormat {
    /// `.mtx` / `.mm` are MatrixMarket, `.csv` is CSV.
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("mtx") | Some("mm") => Ok(MatrixFormat::MatrixMarket),
            Some("csv") => Ok(MatrixFormat::Csv),
            _ => Err(Error::Parse(format!(
                "cannot infer matrix format of {}; use .mtx or .csv",
                path.display()
            ))),
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            MatrixFormat::MatrixMarket => "mtx",
            MatrixFormat::Csv => "csv",
        }
    }
}

pub fn read_matrix(path: &Path) -> Result<Matrix> {
    let format = MatrixFormat::from_path(path)?;
    let text = fs::read_to_string(path)?;
    match format {
        MatrixFormat::MatrixMarket => parse_matrix_market(&text),
        MatrixFormat::Csv => parse_csv(&text),
    }
}

pub fn write_matrix(path: &Path, m: &Matrix) -> Result<()> {
    let text = match MatrixFormat::from_path(path)? {
        MatrixFormat::MatrixMarket => to_matrix_market(m),
        MatrixFormat::Csv => to_csv(m),
    };
    fs::write(path, text)?;
    Ok(())
}

/// Dense CSV: one row per line, comma-separated.
pub fn to_csv(m: &Matrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| format_f64(m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Matrix> {
    let mut rows = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| parse_number(f.trim(), ln + 1))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("empty CSV matrix".into()));
    }
    Matrix::from_rows(&rows)
}

/// MatrixMarket `array real general` (column-major).
pub fn to_matrix_market(m: &Matrix) -> String {
    let mut out = String::from("%%MatrixMarket matrix array real general\n");
    out.push_str(&format!("{} {}\n", m.rows(), m.cols()));
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            out.push_str(&format_f64(m[(i, j)]));
            out.push('\n');
        }
    }
    out
}

/// Reads MatrixMarket `array` or `coordinate` files with `real`, `double`, or
/// `integer` fields and `general`, `symmetric`, or `skew-symmetric` symmetry.
pub fn parse_matrix_market(text: &str) -> Result<Matrix> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::Parse("empty MatrixMarket file".into()))?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(Error::Parse(format!("bad MatrixMarket header: {header:?}")));
    }
    let coordinate = match tokens[2].as_str() {
        "array" => false,
        "coordinate" => true,
        other => return Err(Error::Parse(format!("unsupported MatrixMarket format {other:?}"))),
    };
    if !matches!(tokens[3].as_str(), "real" | "double" | "integer") {
        return Err(Error::Parse(format!("unsupported MatrixMarket field {:?}", tokens[3])));
    }
    let symmetry = tokens[4].clone();
    if !matches!(symmetry.as_str(), "general" | "symmetric" | "skew-symmetric") {
        return Err(Error::Parse(format!("unsupported MatrixMarket symmetry {symmetry:?}")));
    }

    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_ln, size_line) = body.next().ok_or_else(|| Error::Parse("missing size line".into()))?;
    let dims = size_line
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| Error::Parse(format!("line {}: bad size {t:?}", size_ln + 1))))
        .collect::<Result<Vec<usize>>>()?;
    let expected_dims = if coordinate { 3 } else { 2 };
    if dims.len() != expected_dims {
        return Err(Error::Parse(format!("line {}: expected {expected_dims} size fields", size_ln + 1)));
    }
    let (rows, cols) = (dims[0], dims[1]);
    if rows == 0 || cols == 0 {
        return Err(Error::Parse("matrix dimensions must be positive".into()));
    }
    let mut m = DMatrix::zeros(rows, cols);
    let mirror = |m: &mut DMatrix<f64>, i: usize, j: usize, v: f64| {
        if i != j {
            match symmetry.as_str() {
                "symmetric" => m[(j, i)] = v,
                "skew-symmetric" => m[(j, i)] = -v,
                _ => {}
            }
        }
    };

    if coordinate {
        let nnz = dims[2];
        let mut count = 0;
        for (ln, line) in body {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(Error::Parse(format!("line {}: expected `row col value`", ln + 1)));
            }
            let idx = |s: &str, bound: usize| -> Result<usize> {
                match s.parse::<usize>() {
                    Ok(v) if v >= 1 && v <= bound => Ok(v - 1),
                    _ => Err(Error::Parse(format!("line {}: index {s:?} out of range", ln + 1))),
                }
            };
            let (i, j) = (idx(f[0], rows)?, idx(f[1], cols)?);
            let v = parse_number(f[2], ln + 1)?;
            m[(i, j)] = v;
            mirror(&mut m, i, j, v);
            count += 1;
        }
        if count != nnz {
            return Err(Error::Parse(format!("expected {nnz} entries, found {count}")));
        }
    } else {
        let mut values = Vec::new();
        for (ln, line) in body {
            for t in line.split_whitespace() {
                values.push(parse_number(t, ln + 1)?);
            }
        }
        if symmetry == "general" {
            if values.len() != rows * cols {
                return Err(Error::Parse(format!("expected {} values, found {}", rows * cols, values.len())));
            }
            for (p, v) in values.into_iter().enumerate() {
                m[(p % rows, p / rows)] = v;
            }
        } else {
            // lower triangle, column-major; diagonal omitted when skew
            let skip = usize::from(symmetry == "skew-symmetric");
            let mut it = values.into_iter();
            for j in 0..cols {
                for i in j + skip..rows {
                    let v = it.next().ok_or_else(|| Error::Parse("too few array values".into()))?;
                    m[(i, j)] = v;
                    mirror(&mut m, i, j, v);
                }
            }
            if it.next().is_some() {
                return Err(Error::Parse("too many array values".into()));
            }
        }
    }
    Matrix::from_dmatrix(m)
}

fn parse_number(s: &str, line: usize) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::Parse(format!("line {line}: cannot parse {s:?} as a number")))
}

/// On-disk partition: `{"n": int, "blocks": [[1-based indices]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionFile {
    pub n: usize,
    pub blocks: Vec<Vec<usize>>,
}

impl From<&ClusterPartition> for PartitionFile {
    fn from(p: &ClusterPartition) -> Self {
        PartitionFile {
            n: p.n(),
            blocks: p.blocks().iter().map(|b| b.iter().map(|i| i + 1).collect()).collect(),
        }
    }
}

impl TryFrom<PartitionFile> for ClusterPartition {
    type Error = Error;

    fn try_from(f: PartitionFile) -> Result<Self> {
        let mut blocks = Vec::with_capacity(f.blocks.len());
        for b in f.blocks {
            let b = b
                .into_iter()
                .map(|i| i.checked_sub(1).ok_or_else(|| Error::Parse("partition indices are 1-based".into())))
                .collect::<Result<Vec<usize>>>()?;
            blocks.push(b);
        }
        ClusterPartition::new(f.n, blocks)
    }
}

pub fn partition_to_json(p: &ClusterPartition) -> Value {
    serde_json::to_value(PartitionFile::from(p)).expect("plain data")
}

pub fn write_partition(path: &Path, p: &ClusterPartition) -> Result<()> {
    fs::write(path, serde_json::to_string(&PartitionFile::from(p))? + "\n")?;
    Ok(())
}

pub fn read_partition(path: &Path) -> Result<ClusterPartition> {
    let f: PartitionFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    f.try_into()
}

fn shift_indices(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

/// JSON form of a recovery result, 1-based.
pub fn recovery_to_json(r: &RecoveryResult) -> Value {
    json!({
        "partition": partition_to_json(&r.partition),
        "threshold_used": r.threshold_used,
        "mode": r.mode,
        "side": r.side,
        "diagnostics": r.diagnostics,
    })
}

pub fn approx_to_json(r: &ApproxClusterResult) -> Value {
    json!({
        "selected_j": r.selected_j + 1,
        "s_hat": shift_indices(&r.s_hat),
        "score": r.score,
        "size_cap": r.size_cap,
    })
}

pub fn estimate_to_json(e: &KEstimate) -> Value {
    json!({
        "k": e.k,
        "result": recovery_to_json(&e.result),
        "trials": e.trials,
    })
}
