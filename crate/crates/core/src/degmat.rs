//! Homogeneous integer degree matrices.
//!
//! A matrix `a` is homogeneous when `a[i][j] + a[l][m] = a[i][m] + a[l][j]`
//! for all indices, i.e. `a[i][j] = r[i] + c[j]`. Every validated
//! [`DegreeMatrix`] stores the offsets `(r, c)` normalized by `c[0] = 0`.
//!
//! Shapes are restricted to square `k x k` and rectangular `(k-1) x k`.
//! Row and column indices in this API are 0-based.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DegreeMatrixError {
    #[error("degree matrix is empty")]
    Empty,
    #[error("row {row} has {got} entries, expected {expected}")]
    Ragged { row: usize, expected: usize, got: usize },
    #[error("unsupported shape {rows}x{cols}: need k x k or (k-1) x k")]
    Shape { rows: usize, cols: usize },
    /// 1-based witness `(i, j, l, m)` with `a_ij + a_lm != a_im + a_lj`.
    #[error(
        "not homogeneous at (i,j,l,m) = ({}, {}, {}, {}): {lhs} != {rhs}",
        witness.0, witness.1, witness.2, witness.3
    )]
    NotHomogeneous {
        witness: (usize, usize, usize, usize),
        lhs: i64,
        rhs: i64,
    },
    #[error("expected a {expected} matrix, got {rows}x{cols}")]
    WrongKind {
        expected: &'static str,
        rows: usize,
        cols: usize,
    },
    #[error("row index {index} out of range for {rows} rows")]
    RowOutOfRange { index: usize, rows: usize },
    #[error("degree matrix has negative entries")]
    Negative,
}

/// Parse failure with a 1-based line/column position.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DegreeMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i64>,
    row_offsets: Vec<i64>,
    col_offsets: Vec<i64>,
}

impl fmt::Debug for DegreeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DegreeMatrix{:?}", self.to_rows())
    }
}

impl fmt::Display for DegreeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Serialize for DegreeMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for DegreeMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(d)?;
        DegreeMatrix::validate(&rows).map_err(serde::de::Error::custom)
    }
}

/// Outcome of [`DegreeMatrix::classify_negative`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NegativeClass {
    /// All entries are non-negative.
    Clean,
    /// Some diagonal entry of the ordered matrix is negative; every
    /// determinant with this degree matrix vanishes identically.
    ZeroBlockFatal,
    /// Negative entries only off the diagonal.
    NegativeOpen,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Transform {
    DeleteRow(usize),
    SubtractOneFromRows(Vec<usize>),
    AddOneToRows(Vec<usize>),
    ReflectAntidiagonal,
}

impl DegreeMatrix {
    /// Validates shape and homogeneity of an integer grid.
    pub fn validate<R: AsRef<[i64]>>(grid: &[R]) -> Result<Self, DegreeMatrixError> {
        let rows = grid.len();
        if rows == 0 || grid[0].as_ref().is_empty() {
            return Err(DegreeMatrixError::Empty);
        }
        let cols = grid[0].as_ref().len();
        for (row, r) in grid.iter().enumerate() {
            let got = r.as_ref().len();
            if got != cols {
                return Err(DegreeMatrixError::Ragged {
                    row,
                    expected: cols,
                    got,
                });
            }
        }
        if cols != rows && cols != rows + 1 {
            return Err(DegreeMatrixError::Shape { rows, cols });
        }
        let entries: Vec<i64> = grid.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        let at = |i: usize, j: usize| entries[i * cols + j];
        for l in 0..rows {
            for m in 0..cols {
                let lhs = at(0, 0) + at(l, m);
                let rhs = at(0, m) + at(l, 0);
                if lhs != rhs {
                    return Err(DegreeMatrixError::NotHomogeneous {
                        witness: (1, 1, l + 1, m + 1),
                        lhs,
                        rhs,
                    });
                }
            }
        }
        let row_offsets = (0..rows).map(|i| at(i, 0)).collect();
        let col_offsets = (0..cols).map(|j| at(0, j) - at(0, 0)).collect();
        Ok(DegreeMatrix {
            rows,
            cols,
            entries,
            row_offsets,
            col_offsets,
        })
    }

    /// `k x k` matrix with every entry equal to `a`.
    pub fn constant(rows: usize, cols: usize, a: i64) -> Result<Self, DegreeMatrixError> {
        Self::validate(&vec![vec![a; cols]; rows])
    }

    /// Builds `a[i][j] = r[i] + c[j]`.
    pub fn from_offsets(r: &[i64], c: &[i64]) -> Result<Self, DegreeMatrixError> {
        let grid: Vec<Vec<i64>> = r.iter().map(|ri| c.iter().map(|cj| ri + cj).collect()).collect();
        Self::validate(&grid)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_rectangular(&self) -> bool {
        self.cols == self.rows + 1
    }

    /// `k`: the column count (square size, or the `k` of `(k-1) x k`).
    pub fn k(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.cols + j]
    }

    pub fn row_offsets(&self) -> &[i64] {
        &self.row_offsets
    }

    pub fn col_offsets(&self) -> &[i64] {
        &self.col_offsets
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.cols).map(|r| r.to_vec()).collect()
    }

    pub fn min_entry(&self) -> i64 {
        *self.entries.iter().min().expect("non-empty")
    }

    pub fn is_clean(&self) -> bool {
        self.min_entry() >= 0
    }

    pub fn transpose(&self) -> Result<Self, DegreeMatrixError> {
        let grid: Vec<Vec<i64>> = (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j)).collect())
            .collect();
        Self::validate(&grid)
    }

    /// Rows sorted by non-increasing offset, columns by non-decreasing
    /// offset (stable in both).
    pub fn order(&self) -> Self {
        let mut row_idx: Vec<usize> = (0..self.rows).collect();
        row_idx.sort_by_key(|&i| std::cmp::Reverse(self.row_offsets[i]));
        let mut col_idx: Vec<usize> = (0..self.cols).collect();
        col_idx.sort_by_key(|&j| self.col_offsets[j]);
        let grid: Vec<Vec<i64>> = row_idx
            .iter()
            .map(|&i| col_idx.iter().map(|&j| self.get(i, j)).collect())
            .collect();
        Self::validate(&grid).expect("permutation preserves homogeneity")
    }

    pub fn is_ordered(&self) -> bool {
        self.row_offsets.windows(2).all(|w| w[0] >= w[1])
            && self.col_offsets.windows(2).all(|w| w[0] <= w[1])
    }

    /// Degree of any determinant (square) or maximal minor of largest degree
    /// (rectangular) with this degree matrix.
    pub fn trace(&self) -> i64 {
        if self.is_square() {
            (0..self.rows).map(|i| self.get(i, i)).sum()
        } else {
            let o = self.order();
            (0..o.rows).map(|i| o.get(i, i + 1)).sum()
        }
    }

    /// `T(A') = tr(A') + a_11` of the ordered `(k-1) x k` matrix: the largest
    /// syzygy degree of the maximal-minor ideal.
    pub fn big_t(&self) -> Result<i64, DegreeMatrixError> {
        self.require_rectangular()?;
        let o = self.order();
        Ok(o.trace() + o.get(0, 0))
    }

    /// Difference between the largest and smallest row offset.
    pub fn diameter(&self) -> i64 {
        let max = self.row_offsets.iter().max().expect("non-empty");
        let min = self.row_offsets.iter().min().expect("non-empty");
        max - min
    }

    pub fn require_rectangular(&self) -> Result<(), DegreeMatrixError> {
        if !self.is_rectangular() {
            return Err(DegreeMatrixError::WrongKind {
                expected: "(k-1) x k",
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }

    pub fn require_square(&self) -> Result<(), DegreeMatrixError> {
        if !self.is_square() {
            return Err(DegreeMatrixError::WrongKind {
                expected: "square",
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }

    pub fn derive(&self, transform: &Transform) -> Result<Self, DegreeMatrixError> {
        let mut grid = self.to_rows();
        let check = |i: usize| {
            if i >= self.rows {
                Err(DegreeMatrixError::RowOutOfRange {
                    index: i,
                    rows: self.rows,
                })
            } else {
                Ok(())
            }
        };
        match transform {
            Transform::DeleteRow(i) => {
                check(*i)?;
                grid.remove(*i);
            }
            Transform::SubtractOneFromRows(set) | Transform::AddOneToRows(set) => {
                let delta = if matches!(transform, Transform::AddOneToRows(_)) { 1 } else { -1 };
                for &i in set {
                    check(i)?;
                    for v in &mut grid[i] {
                        *v += delta;
                    }
                }
            }
            Transform::ReflectAntidiagonal => {
                self.require_square()?;
                let k = self.rows;
                grid = (0..k)
                    .map(|i| (0..k).map(|j| self.get(k - 1 - j, k - 1 - i)).collect())
                    .collect();
            }
        }
        Self::validate(&grid)
    }

    /// Classifies negative entries of a square matrix (after ordering).
    pub fn classify_negative(&self) -> NegativeClass {
        if self.is_clean() {
            return NegativeClass::Clean;
        }
        let o = self.order();
        let n = o.rows.min(o.cols);
        if (0..n).any(|i| o.get(i, i) < 0) {
            NegativeClass::ZeroBlockFatal
        } else {
            NegativeClass::NegativeOpen
        }
    }

    /// One row per line, single spaces, LF, trailing newline.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for row in self.entries.chunks(self.cols) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    /// Parses either the text format or `{"rows": [[...], ...]}` JSON, then
    /// validates.
    pub fn parse(input: &str) -> Result<Self, MatrixFileError> {
        let grid = if input.trim_start().starts_with('{') {
            parse_json_grid(input)?
        } else {
            parse_text_grid(input)?
        };
        Ok(Self::validate(&grid)?)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixFileError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Invalid(#[from] DegreeMatrixError),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonMatrix {
    rows: Vec<Vec<i64>>,
}

fn parse_json_grid(input: &str) -> Result<Vec<Vec<i64>>, ParseError> {
    serde_json::from_str::<JsonMatrix>(input)
        .map(|m| m.rows)
        .map_err(|e| ParseError {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
}

/// Strict text format: entries separated by exactly one space, no leading
/// or trailing whitespace, LF line endings, optional final newline.
pub fn parse_text_grid(input: &str) -> Result<Vec<Vec<i64>>, ParseError> {
    let err = |line: usize, column: usize, message: &str| ParseError {
        line,
        column,
        message: message.to_string(),
    };
    let body = input.strip_suffix('\n').unwrap_or(input);
    if body.is_empty() {
        return Err(err(1, 1, "empty input"));
    }
    let mut grid = Vec::new();
    for (li, line) in body.split('\n').enumerate() {
        let ln = li + 1;
        if let Some(pos) = line.find('\r') {
            return Err(err(ln, pos + 1, "carriage return; use LF line endings"));
        }
        if line.is_empty() {
            return Err(err(ln, 1, "empty line"));
        }
        let mut row = Vec::new();
        let mut col = 1;
        for tok in line.split(' ') {
            if tok.is_empty() {
                let msg = if col == 1 {
                    "leading whitespace"
                } else if col > line.len() {
                    "trailing whitespace"
                } else {
                    "entries must be separated by a single space"
                };
                return Err(err(ln, col, msg));
            }
            let v: i64 = tok
                .parse()
                .map_err(|_| err(ln, col, &format!("invalid integer {tok:?}")))?;
            row.push(v);
            col += tok.len() + 1;
        }
        if let Some(first) = grid.first().map(Vec::len) {
            if row.len() != first {
                let msg = format!("row has {} entries, expected {first}", row.len());
                return Err(err(ln, line.len() + 1, &msg));
            }
        }
        grid.push(row);
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_a_prime() -> DegreeMatrix {
        DegreeMatrix::validate(&[[5, 6, 8, 9], [5, 6, 8, 9], [2, 3, 5, 6]]).unwrap()
    }

    #[test]
    fn validate_examples() {
        let a = sample_a_prime();
        assert_eq!(a.row_offsets(), &[5, 5, 2]);
        assert_eq!(a.col_offsets(), &[0, 1, 3, 4]);
        // same decomposition shifted so that the last row offset is 0
        let r: Vec<i64> = a.row_offsets().iter().map(|x| x - 2).collect();
        let c: Vec<i64> = a.col_offsets().iter().map(|x| x + 2).collect();
        assert_eq!((r, c), (vec![3, 3, 0], vec![2, 3, 5, 6]));

        let e = DegreeMatrix::validate(&[[1, 1], [1, 2]]).unwrap_err();
        assert_eq!(
            e,
            DegreeMatrixError::NotHomogeneous {
                witness: (1, 1, 2, 2),
                lhs: 3,
                rhs: 2
            }
        );
        let z = DegreeMatrix::constant(3, 3, 0).unwrap();
        assert!(z.row_offsets().iter().chain(z.col_offsets()).all(|&v| v == 0));

        assert_eq!(
            DegreeMatrix::validate(&[[1, 2, 3]]).unwrap_err(),
            DegreeMatrixError::Shape { rows: 1, cols: 3 }
        );
        assert_eq!(
            DegreeMatrix::validate::<Vec<i64>>(&[]).unwrap_err(),
            DegreeMatrixError::Empty
        );
        assert!(matches!(
            DegreeMatrix::validate(&[vec![1, 2], vec![1]]),
            Err(DegreeMatrixError::Ragged { row: 1, .. })
        ));
    }

    #[test]
    fn order_examples() {
        let a = DegreeMatrix::validate(&[[2, 3], [5, 6]]).unwrap();
        assert_eq!(a.order().to_rows(), vec![vec![5, 6], vec![2, 3]]);
        let p = sample_a_prime();
        assert_eq!(p.order(), p);
        let rev = DegreeMatrix::validate(&[[9, 8, 6, 5], [9, 8, 6, 5], [6, 5, 3, 2]]).unwrap();
        assert_eq!(rev.order(), p);
    }

    #[test]
    fn trace_t_and_diameter() {
        let p = sample_a_prime();
        assert_eq!(p.trace(), 20);
        assert_eq!(p.big_t().unwrap(), 25);
        assert_eq!(p.diameter(), 3);
        let pp = DegreeMatrix::validate(&[[4, 5, 7, 8], [4, 5, 7, 8], [2, 3, 5, 6]]).unwrap();
        assert_eq!(pp.big_t().unwrap(), 22);
        assert_eq!(pp.diameter(), 2);
        for k in 2..6 {
            assert_eq!(DegreeMatrix::constant(k, k, 1).unwrap().trace(), k as i64);
            assert_eq!(DegreeMatrix::constant(k - 1, k, 1).unwrap().big_t().unwrap(), k as i64);
            assert_eq!(DegreeMatrix::constant(k - 1, k, 4).unwrap().diameter(), 0);
        }
        assert_eq!(DegreeMatrix::constant(1, 1, 0).unwrap().trace(), 0);
        assert!(DegreeMatrix::constant(3, 3, 1).unwrap().big_t().is_err());
    }

    #[test]
    fn derive_examples() {
        let a = DegreeMatrix::validate(&[[0, 1], [1, 2]]).unwrap();
        let r = a.derive(&Transform::ReflectAntidiagonal).unwrap();
        assert_eq!(r.to_rows(), vec![vec![2, 1], vec![1, 0]]);
        assert_eq!(r.trace(), 2);

        let pp = sample_a_prime()
            .derive(&Transform::SubtractOneFromRows(vec![0, 1]))
            .unwrap();
        assert_eq!(pp.to_rows(), vec![vec![4, 5, 7, 8], vec![4, 5, 7, 8], vec![2, 3, 5, 6]]);
        assert_eq!(
            pp.derive(&Transform::AddOneToRows(vec![0, 1])).unwrap(),
            sample_a_prime()
        );

        let d = DegreeMatrix::constant(3, 3, 4)
            .unwrap()
            .derive(&Transform::DeleteRow(0))
            .unwrap();
        assert_eq!(d, DegreeMatrix::constant(2, 3, 4).unwrap());

        assert!(sample_a_prime().derive(&Transform::ReflectAntidiagonal).is_err());
        assert!(sample_a_prime().derive(&Transform::DeleteRow(7)).is_err());
    }

    #[test]
    fn negative_classes() {
        assert_eq!(DegreeMatrix::constant(3, 3, 0).unwrap().classify_negative(), NegativeClass::Clean);
        // ordered with a_22 = -1
        let fatal = DegreeMatrix::from_offsets(&[1, -1], &[0, 0]).unwrap();
        assert_eq!(fatal.to_rows(), vec![vec![1, 1], vec![-1, -1]]);
        assert_eq!(fatal.classify_negative(), NegativeClass::ZeroBlockFatal);
        // diagonal >= 0, a_31 = -1
        let open = DegreeMatrix::from_offsets(&[2, 1, 0], &[-1, 0, 1]).unwrap();
        assert!(open.is_ordered());
        assert_eq!(open.get(2, 0), -1);
        assert_eq!(open.classify_negative(), NegativeClass::NegativeOpen);
    }

    #[test]
    fn text_format() {
        let p = sample_a_prime();
        assert_eq!(p.to_text(), "5 6 8 9\n5 6 8 9\n2 3 5 6\n");
        assert_eq!(DegreeMatrix::parse(&p.to_text()).unwrap(), p);
        assert_eq!(DegreeMatrix::parse("1 2\n1 2").unwrap().to_rows(), vec![vec![1, 2], vec![1, 2]]);
        assert_eq!(
            DegreeMatrix::parse("{\"rows\": [[0, -1], [1, 0]]}").unwrap().get(0, 1),
            -1
        );

        let e = |s: &str| match DegreeMatrix::parse(s).unwrap_err() {
            MatrixFileError::Parse(p) => (p.line, p.column),
            other => panic!("unexpected {other:?}"),
        };
        assert_eq!(e("1 2\n3  4\n"), (2, 3));
        assert_eq!(e("1 2 \n"), (1, 5));
        assert_eq!(e("1 2\r\n1 2\r\n"), (1, 4));
        assert_eq!(e("1 x\n"), (1, 3));
        assert_eq!(e(""), (1, 1));
        assert_eq!(e("1 1\n\n1 1\n"), (2, 1));
        assert_eq!(e("1 2\n3\n"), (2, 2));
        assert!(matches!(
            DegreeMatrix::parse("1 1\n1 2\n"),
            Err(MatrixFileError::Invalid(DegreeMatrixError::NotHomogeneous { .. }))
        ));
    }
}
