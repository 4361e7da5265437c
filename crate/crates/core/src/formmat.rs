//! Matrices of forms with a prescribed degree matrix.
//!
//! Determinants use Laplace expansion over column subsets: after processing
//! rows `0..i`, the table holds the minor on those rows for every column
//! subset of size `i`. That is `O(k 2^k)` form products and never divides.
//! Minor signs are dropped where only the generated ideal matters.

use rand::Rng;
use thiserror::Error;

use crate::degmat::{DegreeMatrix, DegreeMatrixError, NegativeClass, Transform};
use crate::poly::{Form, PolyError, PolyRing};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormMatrixError {
    #[error("identically zero determinant class: the ordered degree matrix has a negative diagonal entry, so every determinant vanishes")]
    IdenticallyZero,
    #[error(transparent)]
    Degree(#[from] DegreeMatrixError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("entry ({row}, {col}) has degree {got}, degree matrix says {expected}")]
    EntryDegree {
        row: usize,
        col: usize,
        expected: i64,
        got: i64,
    },
    #[error("expected {expected} entries, got {got}")]
    EntryCount { expected: usize, got: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormMatrix {
    degrees: DegreeMatrix,
    entries: Vec<Form>,
}

impl FormMatrix {
    /// Wraps row-major entries, checking each against the degree matrix.
    /// Entries at negative-degree positions must be zero.
    pub fn new(degrees: DegreeMatrix, entries: Vec<Form>) -> Result<Self, FormMatrixError> {
        let expected = degrees.rows() * degrees.cols();
        if entries.len() != expected {
            return Err(FormMatrixError::EntryCount {
                expected,
                got: entries.len(),
            });
        }
        for (idx, f) in entries.iter().enumerate() {
            let (row, col) = (idx / degrees.cols(), idx % degrees.cols());
            let want = degrees.get(row, col);
            if f.degree() != want || (want < 0 && !f.is_zero()) {
                return Err(FormMatrixError::EntryDegree {
                    row,
                    col,
                    expected: want,
                    got: f.degree(),
                });
            }
        }
        Ok(FormMatrix { degrees, entries })
    }

    /// Independent random forms at every non-negative position, zero elsewhere.
    pub fn random<R: Rng + ?Sized>(ring: &PolyRing, degrees: &DegreeMatrix, rng: &mut R) -> Self {
        let entries = degrees
            .entries()
            .iter()
            .map(|&d| ring.random_form(d, rng))
            .collect();
        FormMatrix {
            degrees: degrees.clone(),
            entries,
        }
    }

    pub fn degree_matrix(&self) -> &DegreeMatrix {
        &self.degrees
    }

    pub fn rows(&self) -> usize {
        self.degrees.rows()
    }

    pub fn cols(&self) -> usize {
        self.degrees.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> &Form {
        &self.entries[i * self.cols() + j]
    }

    pub fn transpose(&self) -> Result<Self, FormMatrixError> {
        let degrees = self.degrees.transpose()?;
        let entries = (0..self.cols())
            .flat_map(|j| (0..self.rows()).map(move |i| (i, j)))
            .map(|(i, j)| self.get(i, j).clone())
            .collect();
        Ok(FormMatrix { degrees, entries })
    }

    /// Determinant of a square matrix; degree is the trace of the degree
    /// matrix.
    pub fn determinant(&self, ring: &PolyRing) -> Result<Form, FormMatrixError> {
        self.degrees.require_square()?;
        if self.degrees.classify_negative() == NegativeClass::ZeroBlockFatal {
            return Err(FormMatrixError::IdenticallyZero);
        }
        let rows: Vec<usize> = (0..self.rows()).collect();
        let cols: Vec<usize> = (0..self.cols()).collect();
        self.minor(ring, &rows, &cols)
    }

    /// Determinant of the submatrix on the given (sorted) rows and columns.
    pub fn minor(&self, ring: &PolyRing, rows: &[usize], cols: &[usize]) -> Result<Form, FormMatrixError> {
        assert_eq!(rows.len(), cols.len(), "minor must be square");
        let k = rows.len();
        if k == 0 {
            return Ok(ring.one());
        }
        let r = self.degrees.row_offsets();
        let c = self.degrees.col_offsets();
        // table[mask] = minor on rows[0..popcount(mask)] and the columns in mask
        let mut table: Vec<Option<Form>> = vec![None; 1 << k];
        table[0] = Some(ring.one());
        let mut row_sum = 0;
        for (depth, &i) in rows.iter().enumerate() {
            row_sum += r[i];
            for mask in 0usize..(1 << k) {
                if mask.count_ones() as usize != depth + 1 {
                    continue;
                }
                let degree = row_sum
                    + (0..k)
                        .filter(|b| mask >> b & 1 == 1)
                        .map(|b| c[cols[b]])
                        .sum::<i64>();
                let mut acc = ring.zero(degree);
                for b in 0..k {
                    if mask >> b & 1 == 0 {
                        continue;
                    }
                    let rest = mask & !(1 << b);
                    let sub = table[rest].as_ref().expect("filled at previous depth");
                    let entry = self.get(i, cols[b]);
                    if entry.is_zero() || sub.is_zero() {
                        continue;
                    }
                    let term = ring.multiply(entry, sub)?;
                    // sign (-1)^(number of chosen columns to the right of b)
                    let above = (mask >> (b + 1)).count_ones();
                    acc = if above % 2 == 0 {
                        ring.add(&acc, &term)?
                    } else {
                        ring.sub(&acc, &term)?
                    };
                }
                table[mask] = Some(acc);
            }
            // free the previous level
            for mask in 0usize..(1 << k) {
                if mask.count_ones() as usize == depth {
                    table[mask] = None;
                }
            }
        }
        Ok(table[(1 << k) - 1].take().expect("full minor"))
    }

    /// All `k^2` minors of size `k-1` of a square matrix, in row-major order
    /// of the deleted position. For `k = 1` this is `[1]`.
    pub fn submaximal_minors(&self, ring: &PolyRing) -> Result<Vec<Form>, FormMatrixError> {
        self.degrees.require_square()?;
        let k = self.rows();
        let mut out = Vec::with_capacity(k * k);
        for i in 0..k {
            let rows: Vec<usize> = (0..k).filter(|&x| x != i).collect();
            for j in 0..k {
                let cols: Vec<usize> = (0..k).filter(|&x| x != j).collect();
                out.push(self.minor(ring, &rows, &cols)?);
            }
        }
        Ok(out)
    }

    /// The `k` maximal minors of a `(k-1) x k` matrix; minor `j` omits
    /// column `j`.
    pub fn maximal_minors(&self, ring: &PolyRing) -> Result<Vec<Form>, FormMatrixError> {
        self.degrees.require_rectangular()?;
        let k = self.cols();
        let rows: Vec<usize> = (0..self.rows()).collect();
        (0..k)
            .map(|j| {
                let cols: Vec<usize> = (0..k).filter(|&x| x != j).collect();
                self.minor(ring, &rows, &cols)
            })
            .collect()
    }

    /// Multiplies every entry of `row` by the linear form `l`.
    pub fn scale_row_by_linear_form(
        &self,
        ring: &PolyRing,
        row: usize,
        l: &Form,
    ) -> Result<Self, FormMatrixError> {
        if l.degree() != 1 {
            return Err(PolyError::WrongDegree {
                expected: 1,
                got: l.degree(),
            }
            .into());
        }
        let degrees = self.degrees.derive(&Transform::AddOneToRows(vec![row]))?;
        let mut entries = self.entries.clone();
        for j in 0..self.cols() {
            let e = &mut entries[row * self.cols() + j];
            *e = if e.is_zero() {
                ring.zero(e.degree() + 1)
            } else {
                ring.multiply(e, l)?
            };
        }
        Ok(FormMatrix { degrees, entries })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ring(n: usize) -> PolyRing {
        PolyRing::new(PrimeField::default(), n)
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn random_matrix_shapes() {
        let r = ring(4);
        let zero = DegreeMatrix::constant(2, 2, 0).unwrap();
        let m = FormMatrix::random(&r, &zero, &mut rng(1));
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(m.get(i, j).degree(), 0);
                assert!(!m.get(i, j).is_zero());
            }
        }
        let a = DegreeMatrix::validate(&[[5, 6, 8, 9], [5, 6, 8, 9], [2, 3, 5, 6]]).unwrap();
        let g = FormMatrix::random(&ring(3), &a, &mut rng(2));
        for i in 0..3 {
            for j in 0..4 {
                assert_eq!(g.get(i, j).degree(), a.get(i, j));
            }
        }
        assert_eq!(g, FormMatrix::random(&ring(3), &a, &mut rng(2)));
    }

    #[test]
    fn determinant_small_cases() {
        let r = ring(4);
        let f = r.random_form(3, &mut rng(3));
        let one = FormMatrix::new(DegreeMatrix::constant(1, 1, 3).unwrap(), vec![f.clone()]).unwrap();
        assert_eq!(one.determinant(&r).unwrap(), f);

        let (x, y, z, w) = (r.variable(0), r.variable(1), r.variable(2), r.variable(3));
        let m = FormMatrix::new(
            DegreeMatrix::constant(2, 2, 1).unwrap(),
            vec![x.clone(), z.clone(), w.clone(), y.clone()],
        )
        .unwrap();
        let expected = r
            .sub(&r.multiply(&x, &y).unwrap(), &r.multiply(&z, &w).unwrap())
            .unwrap();
        let det = m.determinant(&r).unwrap();
        assert_eq!(det, expected);
        assert_eq!(det.degree(), 2);

        let a = DegreeMatrix::constant(3, 3, 2).unwrap();
        let g = FormMatrix::random(&r, &a, &mut rng(4));
        let d = g.determinant(&r).unwrap();
        assert_eq!(d.degree(), 6);
        assert!(!d.is_zero());
    }

    #[test]
    fn determinant_matches_permutation_sum() {
        // independent route: explicit sum over permutations for k = 3
        let r = ring(3);
        let a = DegreeMatrix::validate(&[[1, 2, 0], [2, 3, 1], [1, 2, 0]]).unwrap();
        let g = FormMatrix::random(&r, &a, &mut rng(5));
        let perms = [
            ([0, 1, 2], false),
            ([0, 2, 1], true),
            ([1, 0, 2], true),
            ([1, 2, 0], false),
            ([2, 0, 1], false),
            ([2, 1, 0], true),
        ];
        let mut sum = r.zero(a.trace());
        for (p, odd) in perms {
            let t = r.multiply(g.get(0, p[0]), g.get(1, p[1])).unwrap();
            let t = r.multiply(&t, g.get(2, p[2])).unwrap();
            sum = if odd { r.sub(&sum, &t).unwrap() } else { r.add(&sum, &t).unwrap() };
        }
        assert_eq!(g.determinant(&r).unwrap(), sum);
    }

    #[test]
    fn zero_block_fatal_is_rejected() {
        let r = ring(4);
        let a = DegreeMatrix::from_offsets(&[1, -1], &[0, 0]).unwrap();
        let g = FormMatrix::random(&r, &a, &mut rng(6));
        assert_eq!(g.determinant(&r), Err(FormMatrixError::IdenticallyZero));
    }

    #[test]
    fn negative_open_determinant_has_trace_degree() {
        let r = ring(4);
        let a = DegreeMatrix::from_offsets(&[2, 1, 0], &[-1, 0, 1]).unwrap();
        let g = FormMatrix::random(&r, &a, &mut rng(7));
        assert!(g.get(2, 0).is_zero());
        let d = g.determinant(&r).unwrap();
        assert_eq!(d.degree(), a.trace());
        assert!(!d.is_zero());
    }

    #[test]
    fn submaximal_minor_examples() {
        let r = ring(4);
        let c = FormMatrix::new(DegreeMatrix::constant(1, 1, 2).unwrap(), vec![r.random_form(2, &mut rng(8))])
            .unwrap();
        assert_eq!(c.submaximal_minors(&r).unwrap(), vec![r.one()]);

        let a = DegreeMatrix::validate(&[[1, 2], [2, 3]]).unwrap();
        let g = FormMatrix::random(&r, &a, &mut rng(9));
        let minors = g.submaximal_minors(&r).unwrap();
        let expected: Vec<Form> = [(1, 1), (1, 0), (0, 1), (0, 0)]
            .iter()
            .map(|&(i, j)| g.get(i, j).clone())
            .collect();
        assert_eq!(minors, expected);

        let g = FormMatrix::random(&r, &DegreeMatrix::constant(3, 3, 2).unwrap(), &mut rng(10));
        let minors = g.submaximal_minors(&r).unwrap();
        assert_eq!(minors.len(), 9);
        assert!(minors.iter().all(|m| m.degree() == 4 && !m.is_zero()));
    }

    #[test]
    fn maximal_minor_examples() {
        let r = ring(3);
        let a = DegreeMatrix::validate(&[[2, 3]]).unwrap();
        let g = FormMatrix::random(&r, &a, &mut rng(11));
        assert_eq!(
            g.maximal_minors(&r).unwrap(),
            vec![g.get(0, 1).clone(), g.get(0, 0).clone()]
        );

        let a = DegreeMatrix::validate(&[[5, 6, 8, 9], [5, 6, 8, 9], [2, 3, 5, 6]]).unwrap();
        let g = FormMatrix::random(&r, &a, &mut rng(12));
        let degs: Vec<i64> = g.maximal_minors(&r).unwrap().iter().map(|m| m.degree()).collect();
        assert_eq!(degs, vec![20, 19, 17, 16]);

        // a zero column kills every minor that uses it
        let a = DegreeMatrix::constant(2, 3, 1).unwrap();
        let g = FormMatrix::random(&r, &a, &mut rng(13));
        let mut entries: Vec<Form> = (0..2).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| g.get(i, j).clone()).collect();
        entries[0] = r.zero(1);
        entries[3] = r.zero(1);
        let g = FormMatrix::new(a, entries).unwrap();
        let minors = g.maximal_minors(&r).unwrap();
        assert!(!minors[0].is_zero());
        assert!(minors[1].is_zero() && minors[2].is_zero());
    }

    #[test]
    fn row_scaling_multiplies_minors() {
        let r = ring(3);
        let a = DegreeMatrix::validate(&[[2, 3, 3], [1, 2, 2]]).unwrap();
        let g = FormMatrix::random(&r, &a, &mut rng(14));
        let l = r.random_linear_form(&mut rng(15));
        let gl = g.scale_row_by_linear_form(&r, 1, &l).unwrap();
        assert_eq!(
            gl.degree_matrix(),
            &a.derive(&Transform::AddOneToRows(vec![1])).unwrap()
        );
        let scaled: Vec<Form> = g
            .maximal_minors(&r)
            .unwrap()
            .iter()
            .map(|m| r.multiply(&l, m).unwrap())
            .collect();
        assert_eq!(gl.maximal_minors(&r).unwrap(), scaled);

        // twice: minors pick up L^2
        let gll = gl.scale_row_by_linear_form(&r, 0, &l).unwrap();
        let l2 = r.multiply(&l, &l).unwrap();
        for (m2, m) in gll.maximal_minors(&r).unwrap().iter().zip(g.maximal_minors(&r).unwrap()) {
            assert_eq!(m2.degree(), m.degree() + 2);
            assert_eq!(m2, &r.multiply(&l2, &m).unwrap());
        }

        assert!(g.scale_row_by_linear_form(&r, 0, &r.one()).is_err());
    }

    #[test]
    fn transpose_and_laplace_column() {
        let r = ring(4);
        let a = DegreeMatrix::validate(&[[1, 0, 2], [2, 1, 3], [1, 0, 2]]).unwrap();
        let g = FormMatrix::random(&r, &a, &mut rng(16));
        let d = g.determinant(&r).unwrap();
        assert_eq!(g.transpose().unwrap().determinant(&r).unwrap(), d);
    }
}
