//! Graded pieces of ideals generated by forms.
//!
//! `dim I_d` is computed by streaming the Macaulay rows `m * g` (generators
//! in the given order, multipliers in basis order) into an
//! [`IncrementalReducer`], stopping as soon as the rank reaches `dim R_d`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::field::{CoefficientMatrix, IncrementalReducer};
use crate::poly::{Form, PolyError, PolyRing};

/// Forms generating a homogeneous ideal. Zero generators are dropped.
#[derive(Clone, Debug, Default)]
pub struct GeneratorSet {
    generators: Vec<Form>,
}

impl GeneratorSet {
    pub fn new(ring: &PolyRing, forms: impl IntoIterator<Item = Form>) -> Result<Self, PolyError> {
        let mut set = GeneratorSet::default();
        set.extend(ring, forms)?;
        Ok(set)
    }

    pub fn extend(&mut self, ring: &PolyRing, forms: impl IntoIterator<Item = Form>) -> Result<(), PolyError> {
        for f in forms {
            if f.n_vars() != ring.n_vars() {
                return Err(PolyError::VarMismatch(ring.n_vars(), f.n_vars()));
            }
            if !f.is_zero() {
                self.generators.push(f);
            }
        }
        Ok(())
    }

    pub fn generators(&self) -> &[Form] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }
}

/// Rank of one graded piece.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankReport {
    pub target_degree: i64,
    pub ambient_dim: usize,
    pub achieved_rank: usize,
    pub full: bool,
    pub prime: u64,
    /// Seed of the random draw behind the generators, when there was one.
    pub seed: Option<u64>,
    pub trials_used: usize,
}

impl RankReport {
    fn new(ring: &PolyRing, d: i64, achieved_rank: usize) -> Self {
        let ambient_dim = ring.dim(d);
        RankReport {
            target_degree: d,
            ambient_dim,
            achieved_rank,
            full: achieved_rank == ambient_dim,
            prime: ring.field().modulus(),
            seed: None,
            trials_used: 1,
        }
    }
}

// Streams the degree-d rows of `gens` into `reducer`; returns early once full.
fn absorb_ideal_rows(ring: &PolyRing, gens: &GeneratorSet, d: i64, reducer: &mut IncrementalReducer) {
    let mut row = vec![0u64; ring.dim(d)];
    for g in gens.generators() {
        if reducer.is_full() {
            return;
        }
        if g.degree() > d {
            continue;
        }
        let mut rows = ring
            .multiply_by_monomials(g, d)
            .expect("degree and variables checked");
        while rows.next_into(&mut row) {
            reducer.absorb(&row).expect("row width is dim R_d");
            if reducer.is_full() {
                return;
            }
        }
    }
}

/// `dim I_d` for the ideal generated by `gens`.
pub fn ideal_dimension_in_degree(ring: &PolyRing, gens: &GeneratorSet, d: i64) -> RankReport {
    let mut reducer = IncrementalReducer::new(*ring.field(), ring.dim(d));
    absorb_ideal_rows(ring, gens, d, &mut reducer);
    RankReport::new(ring, d, reducer.rank())
}

/// `dim R_d - dim I_d`.
pub fn hilbert_function(ring: &PolyRing, gens: &GeneratorSet, d: i64) -> usize {
    let report = ideal_dimension_in_degree(ring, gens, d);
    report.ambient_dim - report.achieved_rank
}

/// Whether multiplication by a random linear form `L` maps `(R/J)_{d-1}`
/// onto `(R/J)_d`, i.e. `J_d + L R_{d-1} = R_d`.
pub fn lefschetz_surjective<R: Rng + ?Sized>(ring: &PolyRing, gens: &GeneratorSet, d: i64, rng: &mut R) -> bool {
    let l = ring.random_linear_form(rng);
    lefschetz_surjective_with(ring, gens, d, &l)
}

/// [`lefschetz_surjective`] for a given linear form.
pub fn lefschetz_surjective_with(ring: &PolyRing, gens: &GeneratorSet, d: i64, l: &Form) -> bool {
    let mut reducer = IncrementalReducer::new(*ring.field(), ring.dim(d));
    absorb_ideal_rows(ring, gens, d, &mut reducer);
    if d >= 1 && !reducer.is_full() {
        let mut row = vec![0u64; ring.dim(d)];
        let mut rows = ring.multiply_by_monomials(l, d).expect("d >= 1");
        while rows.next_into(&mut row) {
            reducer.absorb(&row).expect("row width is dim R_d");
            if reducer.is_full() {
                break;
            }
        }
    }
    reducer.is_full()
}

/// The full degree-d Macaulay matrix of `gens` (no early exit).
pub fn macaulay_matrix(ring: &PolyRing, gens: &GeneratorSet, d: i64) -> CoefficientMatrix {
    let cols = ring.dim(d);
    let mut m = CoefficientMatrix::zeros(0, cols);
    let mut row = vec![0u64; cols];
    for g in gens.generators().iter().filter(|g| g.degree() <= d) {
        let mut rows = ring.multiply_by_monomials(g, d).expect("degree checked");
        while rows.next_into(&mut row) {
            m.push_row(&row);
        }
    }
    m
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

    #[test]
    fn unit_ideal_is_full() {
        let r = ring(4);
        let gens = GeneratorSet::new(&r, [r.one()]).unwrap();
        for d in 0..5 {
            let rep = ideal_dimension_in_degree(&r, &gens, d);
            assert!(rep.full);
            assert_eq!(rep.achieved_rank, r.dim(d));
            assert_eq!(hilbert_function(&r, &gens, d), 0);
        }
    }

    #[test]
    fn principal_monomial_ideal() {
        let r = ring(3);
        let gens = GeneratorSet::new(&r, [r.monomial(&[2, 0, 0], 1)]).unwrap();
        let rep = ideal_dimension_in_degree(&r, &gens, 3);
        assert_eq!(rep.achieved_rank, 3);
        assert_eq!(rep.ambient_dim, 10);
        assert!(!rep.full);
        // generators above the target degree contribute nothing
        assert_eq!(ideal_dimension_in_degree(&r, &gens, 1).achieved_rank, 0);
    }

    #[test]
    fn empty_ideal() {
        let r = ring(3);
        let gens = GeneratorSet::new(&r, [r.zero(2)]).unwrap();
        assert!(gens.is_empty());
        assert_eq!(hilbert_function(&r, &gens, 2), 6);
        let r4 = ring(4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(!lefschetz_surjective(&r4, &GeneratorSet::default(), 1, &mut rng));
    }

    #[test]
    fn lefschetz_with_full_ideal() {
        let r = ring(4);
        let gens = GeneratorSet::new(&r, [r.one()]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(lefschetz_surjective(&r, &gens, 3, &mut rng));
    }

    #[test]
    fn lefschetz_linear_algebra() {
        // J = (x^2, y^2) in 2 variables: (R/J)_2 = 1-dim spanned by xy,
        // L = x + y: L * R_1 contains x^2 + xy, so surjective in degree 2.
        let r = ring(2);
        let gens = GeneratorSet::new(&r, [r.monomial(&[2, 0], 1), r.monomial(&[0, 2], 1)]).unwrap();
        let l = r.add(&r.variable(0), &r.variable(1)).unwrap();
        assert!(lefschetz_surjective_with(&r, &gens, 2, &l));
        // with J = (x^2) and L = x, (R/J)_2 = <xy, y^2> is not reached
        let gens = GeneratorSet::new(&r, [r.monomial(&[2, 0], 1)]).unwrap();
        assert!(!lefschetz_surjective_with(&r, &gens, 2, &r.variable(0)));
    }

    #[test]
    fn macaulay_rows() {
        let r = ring(3);
        let gens = GeneratorSet::new(&r, [r.monomial(&[2, 0, 0], 1), r.monomial(&[1, 1, 0], 1)]).unwrap();
        let m = macaulay_matrix(&r, &gens, 3);
        assert_eq!(m.rows(), 6);
        assert_eq!(m.cols(), 10);
        // x^2 y appears from both generators
        assert_eq!(m.rank(r.field(), None), 5);
        assert_eq!(ideal_dimension_in_degree(&r, &gens, 3).achieved_rank, 5);
    }
}
