//! Deterministic CSV persistence.
//!
//! Reals are written with 17 significant digits (`{:.16e}`), which is
//! enough for every `f64` to read back bit for bit. Lines end in `\n`.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::spaces::FiniteSpace;

/// One table cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Int(i64),
    Real(f64),
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Real(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}

/// Formats a real as 17 significant digits in scientific notation.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Real(x) => f.write_str(&format_real(*x)),
        }
    }
}

/// A header plus rectangular rows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(Error::DimensionMismatch { expected: self.header.len(), found: row.len() });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Value::to_string).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Writes `table` to `path`.
pub fn emit_table(table: &Table, path: &Path) -> Result<()> {
    std::fs::write(path, table.to_csv())?;
    Ok(())
}

fn join_reals<'a>(xs: impl Iterator<Item = &'a f64>) -> String {
    xs.map(|x| format_real(*x)).collect::<Vec<_>>().join(",")
}

/// Serializes a finite space: a line `n,<count>`, the distance matrix
/// row by row, then one line of weights.
pub fn space_to_csv(space: &FiniteSpace) -> String {
    let n = space.len();
    let mut out = format!("n,{n}\n");
    for i in 0..n {
        let _ = writeln!(out, "{}", join_reals(space.distances().row(i).iter()));
    }
    let _ = writeln!(out, "{}", join_reals(space.weights().iter()));
    out
}

fn parse_reals(line: &str, lineno: usize) -> Result<Vec<f64>> {
    line.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {lineno}: {:?}: {e}", c.trim())))
        })
        .collect()
}

/// Parses the format of [`space_to_csv`]. The weights line may be left
/// out, in which case weights are uniform. The space is validated.
pub fn space_from_csv(text: &str) -> Result<FiniteSpace> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, head) = lines.next().ok_or_else(|| Error::Parse("empty space file".into()))?;
    let n = head
        .trim()
        .strip_prefix("n,")
        .and_then(|c| c.trim().parse::<usize>().ok())
        .ok_or_else(|| Error::Parse(format!("line 1: expected `n,<count>`, found {head:?}")))?;
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        let (no, line) = lines.next().ok_or_else(|| Error::Parse(format!("missing distance row {i}")))?;
        let row = parse_reals(line, no + 1)?;
        if row.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: row.len() });
        }
        for (j, x) in row.into_iter().enumerate() {
            d[(i, j)] = x;
        }
    }
    let w = match lines.next() {
        Some((no, line)) => {
            let w = parse_reals(line, no + 1)?;
            if w.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: w.len() });
            }
            DVector::from_vec(w)
        }
        None => DVector::from_element(n, 1.0 / n as f64),
    };
    if let Some((no, _)) = lines.next() {
        return Err(Error::Parse(format!("line {}: unexpected trailing content", no + 1)));
    }
    FiniteSpace::from_matrix(d, w)
}

pub fn write_space(space: &FiniteSpace, path: &Path) -> Result<()> {
    std::fs::write(path, space_to_csv(space))?;
    Ok(())
}

pub fn read_space(path: &Path) -> Result<FiniteSpace> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    space_from_csv(&text)
}

/// Point coordinates as a table with columns `prefix1, prefix2, ...`.
pub fn points_table(points: &DMatrix<f64>, prefix: &str) -> Table {
    let mut t = Table::new((1..=points.ncols()).map(|c| format!("{prefix}{c}")));
    for row in points.row_iter() {
        t.rows.push(row.iter().map(|&x| Value::Real(x)).collect());
    }
    t
}
