//! Dense square binary matrices stored by column, plus the plain-text and
//! JSON interchange formats.
//!
//! The text format is `n` lines of `n` space-separated `0`/`1` entries, row
//! by row. The JSON format is an array of rows, `[[0,1],[0,0]]`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Square binary matrix over GF(2), column-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    n: usize,
    cols: Vec<Vec<bool>>,
}

impl BinaryMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            cols: vec![vec![false; n]; n],
        }
    }

    /// Builds a matrix from row-major `0`/`1` entries.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Matrix(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &e) in row.iter().enumerate() {
                match e {
                    0 => {}
                    1 => m.cols[j][i] = true,
                    other => {
                        return Err(Error::Matrix(format!(
                            "entry ({i},{j}) is {other}, expected 0 or 1"
                        )))
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn from_columns(cols: Vec<Vec<bool>>) -> Result<Self> {
        let n = cols.len();
        if let Some((j, c)) = cols.iter().enumerate().find(|(_, c)| c.len() != n) {
            return Err(Error::Matrix(format!(
                "column {j} has {} entries, expected {n}",
                c.len()
            )));
        }
        Ok(Self { n, cols })
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.cols[j][i] as u8).collect())
            .collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cols[j][i]
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.cols[j][i] = value;
    }

    pub fn column(&self, j: usize) -> &[bool] {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[Vec<bool>] {
        &self.cols
    }

    pub(crate) fn column_mut(&mut self, j: usize) -> &mut Vec<bool> {
        &mut self.cols[j]
    }

    pub fn is_strictly_upper(&self) -> bool {
        self.cols
            .iter()
            .enumerate()
            .all(|(j, c)| c[j..].iter().all(|&e| !e))
    }

    pub fn is_zero_column(&self, j: usize) -> bool {
        self.cols[j].iter().all(|&e| !e)
    }

    /// Matrix product over GF(2).
    pub fn mul_gf2(&self, rhs: &BinaryMatrix) -> BinaryMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let mut out = BinaryMatrix::zeros(self.n);
        for j in 0..self.n {
            for k in 0..self.n {
                if rhs.cols[j][k] {
                    for i in 0..self.n {
                        out.cols[j][i] ^= self.cols[k][i];
                    }
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_rows()).expect("rows serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let rows: Vec<Vec<u8>> = serde_json::from_str(s)?;
        Self::from_rows(&rows)
    }

    /// Parses either interchange format.
    pub fn parse(s: &str) -> Result<Self> {
        if s.trim_start().starts_with('[') {
            Self::from_json(s)
        } else {
            s.parse()
        }
    }
}

impl fmt::Display for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<&str> = (0..self.n)
                .map(|j| if self.cols[j][i] { "1" } else { "0" })
                .collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryMatrix({}x{})", self.n, self.n)?;
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for BinaryMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rows = s
            .lines()
            .filter(|l| !l.trim().is_empty())
            .enumerate()
            .map(|(i, line)| {
                line.split_whitespace()
                    .map(|tok| {
                        tok.parse::<u8>()
                            .map_err(|_| Error::Matrix(format!("row {i}: cannot parse {tok:?}")))
                    })
                    .collect::<Result<Vec<u8>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(&rows)
    }
}
