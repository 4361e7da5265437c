//! Homogeneous forms on a dense monomial basis.
//!
//! Monomials of a fixed degree are listed in graded-reverse-lexicographic
//! order, largest first: `x1^d, x1^(d-1) x2, x1^(d-2) x2^2, ...`. A [`Form`]
//! is a coefficient vector positional in that basis. Negative degrees are
//! allowed and give an empty basis, so the zero form of negative degree can
//! sit in a matrix entry whose prescribed degree is negative.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::Rng;
use thiserror::Error;

use crate::field::PrimeField;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("variable count mismatch: {0} vs {1}")]
    VarMismatch(usize, usize),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(i64, i64),
    #[error("target degree {target} is below the form degree {degree}")]
    TargetBelowDegree { target: i64, degree: i64 },
    #[error("expected a form of degree {expected}, got degree {got}")]
    WrongDegree { expected: i64, got: i64 },
    #[error("coefficient vector has length {got}, basis size is {expected}")]
    BadLength { expected: usize, got: usize },
}

/// Binomial coefficient `C(n, r)`, zero when `n < r` or `r < 0`.
pub fn binomial(n: i64, r: i64) -> u128 {
    if r < 0 || n < r {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// `dim R_d` for `n` variables: `C(d + n - 1, n - 1)`, zero for `d < 0`.
pub fn space_dim(n_vars: usize, degree: i64) -> usize {
    if degree < 0 {
        return 0;
    }
    binomial(degree + n_vars as i64 - 1, n_vars as i64 - 1) as usize
}

/// All monomials of one degree in `n_vars` variables.
#[derive(Debug)]
pub struct MonomialBasis {
    n_vars: usize,
    degree: i64,
    // row-major exponent vectors, `n_vars` entries each
    exponents: Vec<u32>,
    // count[v][e] = number of monomials of degree e in v variables
    count: Vec<Vec<usize>>,
}

impl MonomialBasis {
    pub fn new(n_vars: usize, degree: i64) -> Self {
        assert!(n_vars >= 1, "need at least one variable");
        let dmax = degree.max(0) as usize;
        let count: Vec<Vec<usize>> = (0..=n_vars)
            .map(|v| {
                (0..=dmax)
                    .map(|e| if v == 0 { (e == 0) as usize } else { space_dim(v, e as i64) })
                    .collect()
            })
            .collect();
        let size = space_dim(n_vars, degree);
        let mut exponents = Vec::with_capacity(size * n_vars);
        if degree >= 0 {
            let mut current = vec![0u32; n_vars];
            Self::enumerate(n_vars, degree as u32, &mut current, &mut exponents);
        }
        debug_assert_eq!(exponents.len(), size * n_vars);
        MonomialBasis {
            n_vars,
            degree,
            exponents,
            count,
        }
    }

    // Fill positions 0..v with all distributions of `d`, ordered so that the
    // last position's exponent grows slowest (grevlex, largest first).
    fn enumerate(v: usize, d: u32, current: &mut Vec<u32>, out: &mut Vec<u32>) {
        if v == 1 {
            current[0] = d;
            out.extend_from_slice(current);
            return;
        }
        for last in 0..=d {
            current[v - 1] = last;
            Self::enumerate(v - 1, d - last, current, out);
        }
        current[v - 1] = 0;
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn size(&self) -> usize {
        self.exponents.len() / self.n_vars
    }

    pub fn exponents_of(&self, index: usize) -> &[u32] {
        &self.exponents[index * self.n_vars..(index + 1) * self.n_vars]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> {
        self.exponents.chunks_exact(self.n_vars)
    }

    /// Position of an exponent vector of this basis' degree.
    pub fn index_of(&self, exps: &[u32]) -> usize {
        debug_assert_eq!(exps.len(), self.n_vars);
        let mut remaining = self.degree as usize;
        let mut index = 0;
        for v in (1..self.n_vars).rev() {
            let e = exps[v] as usize;
            // monomials with a smaller exponent in variable v come first
            for t in 0..e {
                index += self.count[v][remaining - t];
            }
            remaining -= e;
        }
        index
    }

    /// Index of `a + b` where `a`, `b` are exponent vectors summing to this
    /// basis' degree.
    pub fn index_of_sum(&self, a: &[u32], b: &[u32]) -> usize {
        let mut remaining = self.degree as usize;
        let mut index = 0;
        for v in (1..self.n_vars).rev() {
            let e = (a[v] + b[v]) as usize;
            for t in 0..e {
                index += self.count[v][remaining - t];
            }
            remaining -= e;
        }
        index
    }
}

/// A polynomial ring `F_p[x1..xn]` with a cache of monomial bases.
#[derive(Clone, Debug)]
pub struct PolyRing {
    field: PrimeField,
    n_vars: usize,
    bases: Arc<Mutex<HashMap<i64, Arc<MonomialBasis>>>>,
}

/// A homogeneous form of fixed degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Form {
    n_vars: usize,
    degree: i64,
    coeffs: Vec<u64>,
}

impl Form {
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Nonzero terms as (basis index, coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (i, c))
    }
}

impl PolyRing {
    pub fn new(field: PrimeField, n_vars: usize) -> Self {
        assert!(n_vars >= 1, "need at least one variable");
        PolyRing {
            field,
            n_vars,
            bases: Arc::new(Mutex::new(HashMap::new())),
        }
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn basis(&self, degree: i64) -> Arc<MonomialBasis> {
        let mut cache = self.bases.lock().expect("basis cache poisoned");
        cache
            .entry(degree)
            .or_insert_with(|| Arc::new(MonomialBasis::new(self.n_vars, degree)))
            .clone()
    }

    pub fn dim(&self, degree: i64) -> usize {
        space_dim(self.n_vars, degree)
    }

    pub fn zero(&self, degree: i64) -> Form {
        Form {
            n_vars: self.n_vars,
            degree,
            coeffs: vec![0; self.dim(degree)],
        }
    }

    pub fn constant(&self, c: u64) -> Form {
        Form {
            n_vars: self.n_vars,
            degree: 0,
            coeffs: vec![self.field.reduce(c)],
        }
    }

    pub fn one(&self) -> Form {
        self.constant(1)
    }

    /// The variable `x_{i}` (0-based) as a linear form.
    pub fn variable(&self, i: usize) -> Form {
        let mut exps = vec![0u32; self.n_vars];
        exps[i] = 1;
        self.monomial(&exps, 1)
    }

    pub fn monomial(&self, exps: &[u32], coeff: u64) -> Form {
        assert_eq!(exps.len(), self.n_vars);
        let degree = exps.iter().map(|&e| e as i64).sum();
        let mut f = self.zero(degree);
        let idx = self.basis(degree).index_of(exps);
        f.coeffs[idx] = self.field.reduce(coeff);
        f
    }

    pub fn from_coeffs(&self, degree: i64, coeffs: Vec<u64>) -> Result<Form, PolyError> {
        let expected = self.dim(degree);
        if coeffs.len() != expected {
            return Err(PolyError::BadLength {
                expected,
                got: coeffs.len(),
            });
        }
        Ok(Form {
            n_vars: self.n_vars,
            degree,
            coeffs: coeffs.into_iter().map(|c| self.field.reduce(c)).collect(),
        })
    }

    fn check_vars(&self, f: &Form) -> Result<(), PolyError> {
        if f.n_vars != self.n_vars {
            return Err(PolyError::VarMismatch(self.n_vars, f.n_vars));
        }
        Ok(())
    }

    pub fn add(&self, f: &Form, g: &Form) -> Result<Form, PolyError> {
        self.check_vars(f)?;
        self.check_vars(g)?;
        if f.degree != g.degree {
            return Err(PolyError::DegreeMismatch(f.degree, g.degree));
        }
        let coeffs = f
            .coeffs
            .iter()
            .zip(&g.coeffs)
            .map(|(&a, &b)| self.field.add(a, b))
            .collect();
        Ok(Form { coeffs, ..f.clone() })
    }

    pub fn sub(&self, f: &Form, g: &Form) -> Result<Form, PolyError> {
        self.add(f, &self.neg(g))
    }

    pub fn neg(&self, f: &Form) -> Form {
        Form {
            coeffs: f.coeffs.iter().map(|&a| self.field.neg(a)).collect(),
            ..f.clone()
        }
    }

    pub fn scale(&self, f: &Form, c: u64) -> Form {
        Form {
            coeffs: f.coeffs.iter().map(|&a| self.field.mul(a, c)).collect(),
            ..f.clone()
        }
    }

    /// Exact product of two forms; degree is `deg f + deg g`.
    pub fn multiply(&self, f: &Form, g: &Form) -> Result<Form, PolyError> {
        self.check_vars(f)?;
        self.check_vars(g)?;
        let degree = f.degree + g.degree;
        let mut out = self.zero(degree);
        if f.degree < 0 || g.degree < 0 || out.coeffs.is_empty() {
            return Ok(out);
        }
        let (bf, bg, bo) = (self.basis(f.degree), self.basis(g.degree), self.basis(degree));
        let field = &self.field;
        for (i, a) in f.terms() {
            let ea = bf.exponents_of(i);
            for (j, b) in g.terms() {
                let k = bo.index_of_sum(ea, bg.exponents_of(j));
                out.coeffs[k] = field.add(out.coeffs[k], field.mul(a, b));
            }
        }
        Ok(out)
    }

    /// Fused `acc += f * g` for forms with `deg f + deg g = deg acc`.
    pub fn add_product(&self, acc: &mut Form, f: &Form, g: &Form) -> Result<(), PolyError> {
        let prod = self.multiply(f, g)?;
        if prod.degree != acc.degree {
            return Err(PolyError::DegreeMismatch(acc.degree, prod.degree));
        }
        for (a, b) in acc.coeffs.iter_mut().zip(&prod.coeffs) {
            *a = self.field.add(*a, *b);
        }
        Ok(())
    }

    /// A form with independent uniform coefficients, resampled if zero.
    /// Negative degrees give the (only) zero form.
    pub fn random_form<R: Rng + ?Sized>(&self, degree: i64, rng: &mut R) -> Form {
        let p = self.field.modulus();
        let mut f = self.zero(degree);
        if f.coeffs.is_empty() {
            return f;
        }
        loop {
            for c in &mut f.coeffs {
                *c = rng.gen_range(0..p);
            }
            if !f.is_zero() {
                return f;
            }
        }
    }

    /// A random nonzero linear form.
    pub fn random_linear_form<R: Rng + ?Sized>(&self, rng: &mut R) -> Form {
        self.random_form(1, rng)
    }

    /// The products `m * f` for every monomial `m` of degree
    /// `target_degree - deg f`, in basis order.
    pub fn multiply_by_monomials<'a>(
        &'a self,
        f: &'a Form,
        target_degree: i64,
    ) -> Result<MonomialMultiples<'a>, PolyError> {
        self.check_vars(f)?;
        if target_degree < f.degree {
            return Err(PolyError::TargetBelowDegree {
                target: target_degree,
                degree: f.degree,
            });
        }
        let shift = self.basis(target_degree - f.degree);
        Ok(MonomialMultiples {
            ring: self,
            form: f,
            source: self.basis(f.degree),
            target: self.basis(target_degree),
            shift,
            next: 0,
        })
    }
}

/// Iterator over the monomial multiples of a form in a fixed target degree.
pub struct MonomialMultiples<'a> {
    ring: &'a PolyRing,
    form: &'a Form,
    source: Arc<MonomialBasis>,
    target: Arc<MonomialBasis>,
    shift: Arc<MonomialBasis>,
    next: usize,
}

impl MonomialMultiples<'_> {
    /// Writes the next multiple's coefficient vector into `row` (which must
    /// have the target basis size) and returns `false` once exhausted.
    pub fn next_into(&mut self, row: &mut [u64]) -> bool {
        if self.next >= self.shift.size() {
            return false;
        }
        row.fill(0);
        let m = self.shift.exponents_of(self.next);
        for (i, c) in self.form.terms() {
            row[self.target.index_of_sum(self.source.exponents_of(i), m)] = c;
        }
        self.next += 1;
        true
    }
}

impl Iterator for MonomialMultiples<'_> {
    type Item = Form;

    fn next(&mut self) -> Option<Form> {
        let mut f = self.ring.zero(self.target.degree());
        if self.next_into(&mut f.coeffs) {
            Some(f)
        } else {
            None
        }
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.shift.size() - self.next;
        (left, Some(left))
    }
}

impl ExactSizeIterator for MonomialMultiples<'_> {}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ring(n: usize) -> PolyRing {
        PolyRing::new(PrimeField::default(), n)
    }

    #[test]
    fn basis_sizes_and_ranking() {
        for n in 2..=5 {
            for d in 0..=8 {
                let b = MonomialBasis::new(n, d);
                assert_eq!(b.size(), space_dim(n, d));
                for (i, e) in b.iter().enumerate() {
                    assert_eq!(e.iter().sum::<u32>() as i64, d);
                    assert_eq!(b.index_of(e), i);
                }
            }
        }
        assert_eq!(space_dim(4, 6), 84);
        assert_eq!(space_dim(3, 25), 351);
        assert_eq!(space_dim(4, -1), 0);
    }

    #[test]
    fn grevlex_order_small() {
        let b = MonomialBasis::new(3, 2);
        let listed: Vec<Vec<u32>> = b.iter().map(|e| e.to_vec()).collect();
        assert_eq!(
            listed,
            vec![
                vec![2, 0, 0],
                vec![1, 1, 0],
                vec![0, 2, 0],
                vec![1, 0, 1],
                vec![0, 1, 1],
                vec![0, 0, 2],
            ]
        );
    }

    #[test]
    fn multiply_examples() {
        let r = ring(3);
        let x1 = r.variable(0);
        let x2 = r.variable(1);
        let prod = r.multiply(&x1, &x2).unwrap();
        assert_eq!(prod, r.monomial(&[1, 1, 0], 1));
        assert_eq!(prod.degree(), 2);
        assert_eq!(prod.terms().count(), 1);

        let z = r.zero(2);
        let g = r.random_form(3, &mut ChaCha8Rng::seed_from_u64(1));
        let zg = r.multiply(&z, &g).unwrap();
        assert_eq!(zg.degree(), 5);
        assert!(zg.is_zero());

        assert!(matches!(
            r.multiply(&x1, &ring(4).variable(0)),
            Err(PolyError::VarMismatch(3, 4))
        ));
    }

    #[test]
    fn difference_of_squares_in_four_vars() {
        let r = ring(4);
        let (x, y) = (r.variable(0), r.variable(1));
        let p = r.field().modulus();
        let prod = r
            .multiply(&r.add(&x, &y).unwrap(), &r.sub(&x, &y).unwrap())
            .unwrap();
        let b = r.basis(2);
        let mut expected = vec![0u64; 10];
        expected[b.index_of(&[2, 0, 0, 0])] = 1;
        expected[b.index_of(&[0, 2, 0, 0])] = p - 1;
        assert_eq!(prod.coeffs(), &expected[..]);
        assert_eq!(b.index_of(&[2, 0, 0, 0]), 0);
        assert_eq!(b.index_of(&[0, 2, 0, 0]), 2);
    }

    #[test]
    fn random_form_contract() {
        let r = ring(4);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let c = r.random_form(0, &mut rng);
        assert_eq!(c.coeffs().len(), 1);
        assert!(!c.is_zero());
        let a = r.random_form(2, &mut ChaCha8Rng::seed_from_u64(3));
        let b = r.random_form(2, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
        assert_eq!(a.coeffs().len(), 10);
        assert!(r.random_form(-2, &mut rng).coeffs().is_empty());
    }

    #[test]
    fn degree_zero_resampled_in_tiny_field() {
        let r = PolyRing::new(PrimeField::new(3).unwrap(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            assert!(!r.random_form(0, &mut rng).is_zero());
        }
    }

    #[test]
    fn monomial_multiples() {
        let r = ring(4);
        let f = r.random_form(4, &mut ChaCha8Rng::seed_from_u64(11));
        let same: Vec<Form> = r.multiply_by_monomials(&f, 4).unwrap().collect();
        assert_eq!(same, vec![f.clone()]);
        assert_eq!(r.multiply_by_monomials(&f, 6).unwrap().len(), 10);
        assert!(matches!(
            r.multiply_by_monomials(&f, 3),
            Err(PolyError::TargetBelowDegree { .. })
        ));

        let r3 = ring(3);
        let x2 = r3.monomial(&[2, 0, 0], 1);
        let got: Vec<Form> = r3.multiply_by_monomials(&x2, 3).unwrap().collect();
        assert_eq!(
            got,
            vec![
                r3.monomial(&[3, 0, 0], 1),
                r3.monomial(&[2, 1, 0], 1),
                r3.monomial(&[2, 0, 1], 1),
            ]
        );
        // every multiple agrees with explicit multiplication
        let mono = r.basis(2);
        for (m, row) in mono.iter().zip(r.multiply_by_monomials(&f, 6).unwrap()) {
            assert_eq!(row, r.multiply(&r.monomial(m, 1), &f).unwrap());
        }
    }

    #[test]
    fn binomial_clamps() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(1, 3), 0);
        assert_eq!(binomial(-2, 2), 0);
        assert_eq!(binomial(63, 3), 39711);
    }
}
