//! Closed-form counts attached to degree matrices.
//!
//! A general `(k-1) x k` matrix of forms with degree matrix `A'` resolves
//! its maximal-minor ideal as
//!
//! ```text
//! 0 -> sum_i O(-b_i) -> sum_j O(-m_j) -> I -> 0
//! ```
//!
//! with `m_j = sum(r) + sum(c) - c_j` and `b_i = sum(r) + sum(c) + r_i`.
//! Binomials `C(x, r)` are zero for `x < r` throughout, which is what the
//! twisted line bundles contribute in negative degree.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::degmat::{DegreeMatrix, DegreeMatrixError};
use crate::poly::binomial;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DimError {
    #[error(transparent)]
    Degree(#[from] DegreeMatrixError),
    #[error("no closed form for a {k}x{k} all-equal degree matrix (only k = 3 is available)")]
    NoClosedForm { k: usize },
    #[error("{0}")]
    Domain(&'static str),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionData {
    /// `m_j`, in the column order of the ordered matrix.
    pub generator_degrees: Vec<i64>,
    /// `b_i`, in the row order of the ordered matrix.
    pub syzygy_degrees: Vec<i64>,
}

impl ResolutionData {
    pub fn max_syzygy_degree(&self) -> i64 {
        *self.syzygy_degrees.iter().max().expect("k >= 2")
    }
}

fn clean_rectangular(a_prime: &DegreeMatrix) -> Result<DegreeMatrix, DimError> {
    a_prime.require_rectangular()?;
    if !a_prime.is_clean() {
        return Err(DegreeMatrixError::Negative.into());
    }
    Ok(a_prime.order())
}

pub fn resolution_degrees(a_prime: &DegreeMatrix) -> Result<ResolutionData, DimError> {
    let o = clean_rectangular(a_prime)?;
    let total: i64 = o.row_offsets().iter().sum::<i64>() + o.col_offsets().iter().sum::<i64>();
    Ok(ResolutionData {
        generator_degrees: o.col_offsets().iter().map(|c| total - c).collect(),
        syzygy_degrees: o.row_offsets().iter().map(|r| total + r).collect(),
    })
}

// sum_j C(t - m_j + n, n) - sum_i C(t - b_i + n, n) for projective dimension n
fn twisted_sum(res: &ResolutionData, t: i64, n: i64) -> i128 {
    let gens: u128 = res.generator_degrees.iter().map(|m| binomial(t - m + n, n)).sum();
    let syz: u128 = res.syzygy_degrees.iter().map(|b| binomial(t - b + n, n)).sum();
    gens as i128 - syz as i128
}

/// Hilbert function of `R'/I` (three variables) in degree `t`.
pub fn plane_hilbert_function(res: &ResolutionData, t: i64) -> i128 {
    binomial(t + 2, 2) as i128 - twisted_sum(res, t, 2)
}

/// Hilbert function of `R/I` (four variables) in degree `t`.
pub fn space_hilbert_function(res: &ResolutionData, t: i64) -> i128 {
    binomial(t + 3, 3) as i128 - twisted_sum(res, t, 3)
}

/// Number of points cut out in the plane by the maximal minors: the
/// Hilbert function at `T(A')`, where it has stabilized.
pub fn point_count(a_prime: &DegreeMatrix) -> Result<u64, DimError> {
    let res = resolution_degrees(a_prime)?;
    Ok(plane_hilbert_function(&res, res.max_syzygy_degree()) as u64)
}

/// `h^0(I_C(d))`: forms of degree `d` in four variables vanishing on the
/// curve defined by the maximal minors.
pub fn h0_ideal_sheaf(a_prime: &DegreeMatrix, d: i64) -> Result<u64, DimError> {
    let res = resolution_degrees(a_prime)?;
    Ok(twisted_sum(&res, d, 3) as u64)
}

/// Degree and arithmetic genus of the curve in projective 3-space.
pub fn curve_degree_and_genus(a_prime: &DegreeMatrix) -> Result<(i64, i64), DimError> {
    let res = resolution_degrees(a_prime)?;
    let t0 = res.max_syzygy_degree();
    let h0 = space_hilbert_function(&res, t0);
    let h1 = space_hilbert_function(&res, t0 + 1);
    let degree = (h1 - h0) as i64;
    let genus = 1 - (h0 as i64 - degree * t0);
    Ok((degree, genus))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DimensionKind {
    /// `k x k` with every entry `a`; closed forms exist for `k = 3` only.
    AllEqual { k: usize, a: i64 },
    /// `k x k` matrices of linear forms.
    Linear { k: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionReport {
    pub k: usize,
    /// Entry degree; `"linear"` for matrices of linear forms.
    pub a: serde_json::Value,
    /// Projective dimension of the space of forms of degree `d = k a`.
    pub theta: i64,
    #[serde(rename = "dim_V")]
    pub dim_v: i64,
    pub dim_hilb: Option<i64>,
    pub fiber_dim: i64,
    #[serde(rename = "dim_Z")]
    pub dim_z: Option<i64>,
    pub expected_s: u64,
    pub conjecture_s: Option<u64>,
}

fn ceil_div(a: i128, b: i128) -> i128 {
    (a + b - 1).div_euclid(b)
}

/// `C(d+3, 3) - 1`.
pub fn theta(d: i64) -> i64 {
    binomial(d + 3, 3) as i64 - 1
}

/// `ceil((theta + 1) / (dim V + 1))`: fewest summands for which the secant
/// variety can fill, assuming no defect.
pub fn expected_summands(theta: i64, dim_v: i64) -> u64 {
    ceil_div(theta as i128 + 1, dim_v as i128 + 1) as u64
}

/// `ceil(k/12 + 1/2 + 10k/(12k^2 + 12))`, evaluated exactly.
pub fn conjectured_linear_summands(k: u64) -> u64 {
    let k = k as i128;
    // common denominator 12(k^2 + 1)
    let num = k * (k * k + 1) + 6 * (k * k + 1) + 10 * k;
    ceil_div(num, 12 * (k * k + 1)) as u64
}

pub fn dimension_report(kind: DimensionKind) -> Result<DimensionReport, DimError> {
    match kind {
        DimensionKind::AllEqual { k, a } => {
            if k != 3 {
                return Err(DimError::NoClosedForm { k });
            }
            if a < 1 {
                return Err(DimError::Domain("entry degree must be at least 1"));
            }
            let theta_num = 27 * a.pow(3) + 54 * a * a + 33 * a;
            let dim_num = 9 * a.pow(3) + 54 * a * a + 99 * a - 48;
            debug_assert_eq!(theta_num % 6, 0);
            debug_assert_eq!(dim_num % 6, 0);
            let (theta, dim_v) = (theta_num / 6, dim_num / 6);
            let a_prime = DegreeMatrix::constant(2, 3, a)?;
            let fiber_dim = h0_ideal_sheaf(&a_prime, 3 * a)? as i64 - 1;
            Ok(DimensionReport {
                k,
                a: a.into(),
                theta,
                dim_v,
                dim_hilb: None,
                fiber_dim,
                dim_z: None,
                expected_s: expected_summands(theta, dim_v),
                conjecture_s: None,
            })
        }
        DimensionKind::Linear { k } => {
            if k < 2 {
                return Err(DimError::Domain("k must be at least 2"));
            }
            let ki = k as i64;
            let theta = theta(ki);
            let dim_hilb = 2 * ki * ki - 2 * ki;
            let fiber_dim = 3 * ki;
            let dim_v = 2 * ki * ki + 1;
            Ok(DimensionReport {
                k,
                a: "linear".into(),
                theta,
                dim_v,
                dim_hilb: Some(dim_hilb),
                fiber_dim,
                dim_z: Some(dim_hilb + fiber_dim),
                expected_s: expected_summands(theta, dim_v),
                conjecture_s: Some(conjectured_linear_summands(k as u64)),
            })
        }
    }
}

/// Dimension count behind the lower bound on the number of summands.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsymptoticBound {
    /// `k^2 s dim R_a`: an upper bound for `dim I_d`.
    pub lhs: u128,
    /// `dim R_{ka}`.
    pub rhs: u128,
    /// Least `s` with `lhs >= rhs`.
    pub threshold_s: u128,
}

pub fn asymptotic_bound(k: u64, s: u64, a: u64, n_vars: u64) -> AsymptoticBound {
    let n = n_vars as i64;
    let per_summand = (k as u128) * (k as u128) * binomial(a as i64 + n - 1, n - 1);
    let rhs = binomial((k * a) as i64 + n - 1, n - 1);
    AsymptoticBound {
        lhs: per_summand * s as u128,
        rhs,
        threshold_s: rhs.div_ceil(per_summand),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_a_prime() -> DegreeMatrix {
        DegreeMatrix::validate(&[[5, 6, 8, 9], [5, 6, 8, 9], [2, 3, 5, 6]]).unwrap()
    }

    #[test]
    fn resolution_examples() {
        let res = resolution_degrees(&sample_a_prime()).unwrap();
        assert_eq!(res.generator_degrees, vec![20, 19, 17, 16]);
        assert_eq!(res.syzygy_degrees, vec![25, 25, 22]);
        assert_eq!(res.max_syzygy_degree(), 25);

        for k in 2..7 {
            let res = resolution_degrees(&DegreeMatrix::constant(k - 1, k, 1).unwrap()).unwrap();
            assert!(res.generator_degrees.iter().all(|&m| m == k as i64 - 1));
            assert!(res.syzygy_degrees.iter().all(|&b| b == k as i64));
        }

        let res = resolution_degrees(&DegreeMatrix::validate(&[[2, 3]]).unwrap()).unwrap();
        assert_eq!(res.generator_degrees, vec![3, 2]);
        assert_eq!(res.syzygy_degrees, vec![5]);

        assert!(resolution_degrees(&DegreeMatrix::constant(2, 2, 1).unwrap()).is_err());
    }

    #[test]
    fn hilbert_burch_compatibility() {
        let a = sample_a_prime();
        let res = resolution_degrees(&a).unwrap();
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                assert_eq!(res.syzygy_degrees[i], res.generator_degrees[j] + a.get(i, j));
            }
        }
    }

    #[test]
    fn point_counts() {
        // 10 - 3*3 + 2*1
        assert_eq!(point_count(&DegreeMatrix::constant(2, 3, 1).unwrap()).unwrap(), 3);
        assert_eq!(point_count(&DegreeMatrix::validate(&[[2, 3]]).unwrap()).unwrap(), 6);
        // all-1 (k-1) x k: C(k+2,2) - k C(3,2) + (k-1) C(2,2) = C(k,2)
        for k in 2..9i64 {
            let a = DegreeMatrix::constant(k as usize - 1, k as usize, 1).unwrap();
            assert_eq!(point_count(&a).unwrap() as i64, k * (k - 1) / 2);
        }
        // C(27,2) - (21+28+45+55) + (1+1+10)
        assert_eq!(point_count(&sample_a_prime()).unwrap(), 214);
    }

    #[test]
    fn h0_examples() {
        for k in 2..=8 {
            let a = DegreeMatrix::constant(k - 1, k, 1).unwrap();
            assert_eq!(h0_ideal_sheaf(&a, k as i64).unwrap(), 3 * k as u64 + 1);
        }
        let ci = DegreeMatrix::validate(&[[2, 3]]).unwrap();
        assert_eq!(h0_ideal_sheaf(&ci, 1).unwrap(), 0);
        assert_eq!(h0_ideal_sheaf(&ci, 3).unwrap(), 5);
    }

    #[test]
    fn degree_and_genus() {
        assert_eq!(curve_degree_and_genus(&DegreeMatrix::constant(2, 3, 1).unwrap()).unwrap(), (3, 0));
        // complete intersection (a, b): degree ab, genus 1 + ab(a+b-4)/2
        for (a, b) in [(2, 3), (1, 1), (2, 2), (3, 4)] {
            let m = DegreeMatrix::validate(&[[a, b]]).unwrap();
            let g = 1 + a * b * (a + b - 4) / 2;
            assert_eq!(curve_degree_and_genus(&m).unwrap(), (a * b, g));
        }
        for k in 2..8i64 {
            let a = DegreeMatrix::constant(k as usize - 1, k as usize, 1).unwrap();
            let (deg, _) = curve_degree_and_genus(&a).unwrap();
            assert_eq!(deg, k * (k - 1) / 2);
            assert_eq!(4 * deg, 2 * k * k - 2 * k);
        }
    }

    #[test]
    fn cube_reports() {
        let r1 = dimension_report(DimensionKind::AllEqual { k: 3, a: 1 }).unwrap();
        assert_eq!((r1.theta, r1.dim_v, r1.expected_s), (19, 19, 1));
        let r2 = dimension_report(DimensionKind::AllEqual { k: 3, a: 2 }).unwrap();
        assert_eq!((r2.theta, r2.dim_v, r2.expected_s), (83, 73, 2));
        assert!(matches!(
            dimension_report(DimensionKind::AllEqual { k: 4, a: 1 }),
            Err(DimError::NoClosedForm { k: 4 })
        ));
        for a in 1..=12 {
            let r = dimension_report(DimensionKind::AllEqual { k: 3, a }).unwrap();
            assert_eq!(r.theta, theta(3 * a));
        }
    }

    #[test]
    fn linear_reports() {
        let r = dimension_report(DimensionKind::Linear { k: 3 }).unwrap();
        assert_eq!((r.dim_v, r.conjecture_s, r.dim_z, r.fiber_dim), (19, Some(1), Some(21), 9));
        assert_eq!(conjectured_linear_summands(4), 2);
        for k in 2..=20usize {
            let r = dimension_report(DimensionKind::Linear { k }).unwrap();
            let a = DegreeMatrix::constant(k - 1, k, 1).unwrap();
            assert_eq!(r.fiber_dim as u64, h0_ideal_sheaf(&a, k as i64).unwrap() - 1);
            assert_eq!(Some(r.expected_s), r.conjecture_s);
        }
    }

    #[test]
    fn asymptotic_examples() {
        let two = asymptotic_bound(3, 2, 20, 4);
        assert_eq!(two.lhs, 9 * 2 * 1771);
        assert_eq!(two.rhs, 39711);
        assert!(two.lhs < two.rhs);
        let three = asymptotic_bound(3, 3, 20, 4);
        assert!(three.lhs >= three.rhs);
        assert_eq!(three.threshold_s, 3);
        assert_eq!(asymptotic_bound(2, 1, 1000, 5).threshold_s, 4);
    }
}
