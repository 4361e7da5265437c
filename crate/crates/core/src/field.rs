//! Prime-field arithmetic and exact rank computation for dense coefficient
//! matrices.
//!
//! Field elements are plain `u64` values kept reduced into `[0, p)`; the
//! [`PrimeField`] value carries the modulus. Row reduction accumulates
//! products lazily and reduces only when the accumulator could overflow.

use std::fmt;

use thiserror::Error;

/// Largest prime below 2^16.
pub const DEFAULT_PRIME: u64 = 65521;

/// Largest modulus accepted; keeps `a + b` for reduced operands inside `u64`.
pub const MAX_PRIME: u64 = (1 << 62) - 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is out of range (need 2 < p < 2^62)")]
    OutOfRange(u64),
    #[error("zero division")]
    ZeroDivision,
    #[error("row length {got} does not match reducer width {expected}")]
    RowLength { expected: usize, got: usize },
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    'witness: for &a in &SMALL {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A prime modulus together with its arithmetic.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
    // Number of `acc += a * b` steps (reduced operands) that fit in a u64
    // before a reduction is needed; 0 when p^2 alone overflows.
    lazy_budget: u64,
}

impl fmt::Debug for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField::new(DEFAULT_PRIME).expect("default prime is prime")
    }
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p <= 2 || p > MAX_PRIME {
            return Err(FieldError::OutOfRange(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        let sq = (p as u128 - 1) * (p as u128 - 1);
        let lazy_budget = if sq == 0 {
            u64::MAX
        } else {
            ((u64::MAX as u128 - p as u128) / sq).min(u64::MAX as u128) as u64
        };
        Ok(PrimeField { p, lazy_budget })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn reduce(&self, a: u64) -> u64 {
        a % self.p
    }

    /// Maps a signed integer into the field.
    pub fn from_i64(&self, a: i64) -> u64 {
        a.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.p - (b - a)
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.p < (1 << 32) {
            (a * b) % self.p
        } else {
            ((a as u128 * b as u128) % self.p as u128) as u64
        }
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Inverse via the extended Euclidean algorithm.
    pub fn inv(&self, a: u64) -> Result<u64, FieldError> {
        let a = a % self.p;
        if a == 0 {
            return Err(FieldError::ZeroDivision);
        }
        let (mut r0, mut r1) = (self.p as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(t0.rem_euclid(self.p as i128) as u64)
    }

    pub fn div(&self, a: u64, b: u64) -> Result<u64, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }
}

/// Dense row-major matrix over a prime field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl CoefficientMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CoefficientMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    /// Builds a matrix from rows of already-reduced entries.
    ///
    /// Panics if the rows are ragged.
    pub fn from_rows(field: &PrimeField, cols: usize, rows: &[Vec<u64>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged row");
            data.extend(r.iter().map(|&x| field.reduce(x)));
        }
        CoefficientMatrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn push_row(&mut self, row: &[u64]) {
        assert_eq!(row.len(), self.cols, "ragged row");
        self.data.extend_from_slice(row);
        self.rows += 1;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v;
    }

    /// Rank over the field. Leaves `self` untouched.
    ///
    /// With `early_exit_at = Some(r)`, stops as soon as rank `r` is reached.
    pub fn rank(&self, field: &PrimeField, early_exit_at: Option<usize>) -> usize {
        let mut reducer = IncrementalReducer::new(*field, self.cols);
        let stop = early_exit_at.unwrap_or(usize::MAX).min(self.cols);
        for i in 0..self.rows {
            if reducer.rank() >= stop {
                break;
            }
            reducer
                .absorb(self.row(i))
                .expect("rows have matrix width");
        }
        reducer.rank()
    }
}

/// Streaming row-echelon basis: rows are absorbed one at a time and the
/// reducer keeps only the independent ones.
#[derive(Clone, Debug)]
pub struct IncrementalReducer {
    field: PrimeField,
    cols: usize,
    // basis rows normalized so that the pivot entry is 1
    basis: Vec<Vec<u64>>,
    pivot_row: Vec<Option<usize>>,
    scratch: Vec<u64>,
}

impl IncrementalReducer {
    pub fn new(field: PrimeField, cols: usize) -> Self {
        IncrementalReducer {
            field,
            cols,
            basis: Vec::new(),
            pivot_row: vec![None; cols],
            scratch: vec![0; cols],
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.cols
    }

    /// Reduces `row` against the current basis. Returns `true` iff the row
    /// was independent (and was added to the basis).
    pub fn absorb(&mut self, row: &[u64]) -> Result<bool, FieldError> {
        if row.len() != self.cols {
            return Err(FieldError::RowLength {
                expected: self.cols,
                got: row.len(),
            });
        }
        if self.is_full() {
            return Ok(false);
        }
        let p = self.field.modulus();
        let mut work = std::mem::take(&mut self.scratch);
        for (w, &x) in work.iter_mut().zip(row) {
            *w = x % p;
        }
        let budget = self.field.lazy_budget;
        let mut pending = 0u64;
        let mut independent = None;
        for col in 0..self.cols {
            let v = work[col] % p;
            work[col] = v;
            if v == 0 {
                continue;
            }
            match self.pivot_row[col] {
                Some(b) => {
                    let f = p - v;
                    let brow = &self.basis[b];
                    if budget > 0 {
                        if pending >= budget {
                            for w in &mut work[col + 1..] {
                                *w %= p;
                            }
                            pending = 0;
                        }
                        for (w, &bv) in work[col + 1..].iter_mut().zip(&brow[col + 1..]) {
                            *w += f * bv;
                        }
                        pending += 1;
                    } else {
                        for (w, &bv) in work[col + 1..].iter_mut().zip(&brow[col + 1..]) {
                            *w = self.field.add(*w, self.field.mul(f, bv));
                        }
                    }
                    work[col] = 0;
                }
                None => {
                    independent = Some(col);
                    break;
                }
            }
        }
        let Some(col) = independent else {
            self.scratch = work;
            return Ok(false);
        };
        let inv = self.field.inv(work[col]).expect("pivot is nonzero");
        let mut new_row = vec![0u64; self.cols];
        for j in col..self.cols {
            new_row[j] = self.field.mul(work[j] % p, inv);
        }
        self.pivot_row[col] = Some(self.basis.len());
        self.basis.push(new_row);
        self.scratch = work;
        Ok(true)
    }
}
