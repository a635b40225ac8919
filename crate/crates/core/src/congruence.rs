//! Congruence diagonalization of real symmetric matrices.
//!
//! Every real symmetric `S` admits a nonsingular `R` with `D = RᵀSR`
//! diagonal, and the number of nonzero entries of `D` equals `rank(S)`.
//! Two routes are provided:
//!
//! - [`diagonalize_congruent`]: symmetric Gaussian elimination. Row and column
//!   operations are applied in pairs so the working matrix stays symmetric,
//!   and every column operation is accumulated into `R`.
//! - [`qr_congruence`]: for invertible `A`, factor `A = QR'` and take
//!   `R = R'⁻¹`, which gives `RᵀAᵀAR = I`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Relative tolerance below which a diagonal entry counts as zero.
pub const RANK_RTOL: f64 = 1e-10;
/// `|det R|` must exceed this for `R` to count as nonsingular.
pub const NONSINGULAR_TOL: f64 = 1e-12;
/// Relative bound on `‖RᵀSR − D‖_max` accepted from the elimination.
pub const RESIDUAL_RTOL: f64 = 1e-9;

// Diagonal pivots smaller than ALPHA times the largest trailing off-diagonal
// entry are replaced by a combined row/column (Bunch-Kaufman growth bound).
const ALPHA: f64 = 0.640_388_203_202_208_1;

/// Dense real symmetric matrix. Symmetry is checked exactly on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    m: Matrix,
}

impl SymMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!(
                "symmetric matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if m.rows() == 0 {
            return Err(Error::Dimension("symmetric matrix must be at least 1x1".into()));
        }
        if !m.is_finite() {
            return Err(Error::NonFinite("symmetric matrix"));
        }
        let n = m.rows();
        for i in 0..n {
            for j in i + 1..n {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(SymMatrix { m })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        SymMatrix::new(Matrix::from_rows(rows)?)
    }

    /// `AᵀA` for any real matrix `A` with at least one column.
    pub fn gram(a: &Matrix) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::NonFinite("matrix"));
        }
        SymMatrix::new(a.gram())
    }

    pub fn n(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn max_abs(&self) -> f64 {
        self.m.max_abs()
    }

    /// Absolute zero threshold for diagonal entries derived from this matrix.
    pub fn rank_tolerance(&self) -> f64 {
        RANK_RTOL * self.max_abs().max(1.0)
    }
}

/// Diagonal `D` and nonsingular `R` with `D = RᵀSR`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CongruencePair {
    pub d: Vec<f64>,
    pub r: Matrix,
    pub rank: usize,
}

impl CongruencePair {
    /// Wraps a pair obtained elsewhere (for instance a hand-derived one).
    ///
    /// The rank is counted against `RANK_RTOL · max(1, max|dᵢ|)`; use
    /// [`CongruencePair::residual`] to check it against a concrete `S`.
    pub fn new(d: Vec<f64>, r: Matrix) -> Result<Self> {
        let n = d.len();
        if n == 0 || r.rows() != n || r.cols() != n {
            return Err(Error::Dimension(format!(
                "diagonal of length {n} with R of shape {}x{}",
                r.rows(),
                r.cols()
            )));
        }
        if !r.is_finite() || d.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("congruence pair"));
        }
        let det = r.det()?;
        if det.abs() <= NONSINGULAR_TOL {
            return Err(Error::Singular { pivot: det });
        }
        let scale = d.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        let tol = RANK_RTOL * scale;
        let rank = d.iter().filter(|x| x.abs() > tol).count();
        Ok(CongruencePair { d, r, rank })
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    /// `‖RᵀSR − diag(D)‖_max`.
    pub fn residual(&self, s: &SymMatrix) -> Result<f64> {
        if s.n() != self.n() {
            return Err(Error::Dimension(format!(
                "pair of size {} against matrix of size {}",
                self.n(),
                s.n()
            )));
        }
        let rtsr = self.r.transpose().matmul(s.matrix())?.matmul(&self.r)?;
        let n = self.n();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { self.d[i] } else { 0.0 };
                worst = worst.max((rtsr[(i, j)] - want).abs());
            }
        }
        Ok(worst)
    }

    /// Counts of (positive, negative, zero) diagonal entries under `tol`.
    pub fn inertia(&self, tol: f64) -> (usize, usize, usize) {
        let pos = self.d.iter().filter(|&&x| x > tol).count();
        let neg = self.d.iter().filter(|&&x| x < -tol).count();
        (pos, neg, self.n() - pos - neg)
    }
}

/// Symmetric working matrix plus the accumulated column transform.
struct Elimination {
    m: Matrix,
    r: Matrix,
}

impl Elimination {
    /// column i += s·column j, then row i += s·row j.
    fn add(&mut self, i: usize, j: usize, s: f64) {
        let n = self.m.rows();
        for row in 0..n {
            let v = self.m[(row, j)];
            self.m[(row, i)] += s * v;
            let rv = self.r[(row, j)];
            self.r[(row, i)] += s * rv;
        }
        for col in 0..n {
            let v = self.m[(j, col)];
            self.m[(i, col)] += s * v;
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.m.swap_rows(a, b);
        self.m.swap_cols(a, b);
        self.r.swap_cols(a, b);
    }

    /// Clears row and column `k` beyond the diagonal using pivot `m[k][k]`.
    fn eliminate(&mut self, k: usize) {
        let n = self.m.rows();
        let pivot = self.m[(k, k)];
        for i in k + 1..n {
            let f = self.m[(i, k)] / pivot;
            if f == 0.0 {
                continue;
            }
            self.add(i, k, -f);
            self.m[(i, k)] = 0.0;
            self.m[(k, i)] = 0.0;
        }
    }
}

/// Runs the symmetric elimination without the final residual checks.
fn eliminate_all(s: &SymMatrix) -> Result<CongruencePair> {
    let n = s.n();
    let tol = s.rank_tolerance();
    let mut el = Elimination {
        m: s.matrix().clone(),
        r: Matrix::identity(n),
    };

    for k in 0..n {
        let (p, dmax) = (k..n)
            .map(|i| (i, el.m[(i, i)].abs()))
            .fold((k, -1.0), |best, c| if c.1 > best.1 { c } else { best });
        let mut omax = 0.0;
        let mut opair = (k, k);
        for i in k..n {
            for j in i + 1..n {
                let v = el.m[(i, j)].abs();
                if v > omax {
                    omax = v;
                    opair = (i, j);
                }
            }
        }
        if dmax <= tol && omax <= tol {
            break;
        }
        let pivot_row = if dmax >= ALPHA * omax {
            p
        } else {
            // No usable diagonal pivot: fold column j into column i so that
            // the new diagonal |m_ii + m_jj| + 2|m_ij| dominates the block.
            let (i, j) = opair;
            let sum = el.m[(i, i)] + el.m[(j, j)];
            let sign = if sum * el.m[(i, j)] >= 0.0 { 1.0 } else { -1.0 };
            el.add(i, j, sign);
            i
        };
        el.swap(k, pivot_row);
        el.eliminate(k);
        if !el.m.is_finite() {
            return Err(Error::Numerical(format!(
                "elimination produced non-finite values at step {k}"
            )));
        }
    }

    let d: Vec<f64> = (0..n).map(|i| el.m[(i, i)]).collect();
    let rank = d.iter().filter(|x| x.abs() > tol).count();
    Ok(CongruencePair { d, r: el.r, rank })
}

/// Computes a congruence diagonalization `D = RᵀSR`.
///
/// Works for singular and indefinite `S`. Zero entries of `D` appear exactly
/// `n − rank(S)` times (under the rank tolerance).
pub fn diagonalize_congruent(s: &SymMatrix) -> Result<CongruencePair> {
    let pair = eliminate_all(s)?;
    let limit = RESIDUAL_RTOL * (1.0 + s.max_abs());
    let residual = pair.residual(s)?;
    if residual > limit {
        return Err(Error::Numerical(format!(
            "congruence residual {residual:e} above {limit:e}; matrix too ill-conditioned"
        )));
    }
    let det = pair.r.det()?;
    if det.abs() <= NONSINGULAR_TOL {
        return Err(Error::Numerical(format!("accumulated transform is singular (det {det:e})")));
    }
    Ok(pair)
}

/// Numerical rank of `S` under [`SymMatrix::rank_tolerance`]; the same count
/// [`diagonalize_congruent`] reports.
pub fn rank_of(s: &SymMatrix) -> usize {
    // SymMatrix guarantees finite input, so the elimination cannot fail here.
    eliminate_all(s).map_or(0, |pair| pair.rank)
}

/// Congruence through the QR factorization of an invertible `A`.
///
/// Returns `D = (1, …, 1)` and `R = R'⁻¹` where `A = QR'`, so that
/// `Rᵀ(AᵀA)R = I`.
pub fn qr_congruence(a: &Matrix) -> Result<CongruencePair> {
    if !a.is_square() || a.rows() == 0 {
        return Err(Error::Dimension(format!(
            "QR congruence needs a non-empty square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("matrix"));
    }
    let n = a.rows();
    let (_, upper) = a.householder_qr();
    let tol = NONSINGULAR_TOL * a.max_abs().max(1.0);
    for i in 0..n {
        let pivot = upper[(i, i)];
        if pivot.abs() <= tol {
            return Err(Error::Singular { pivot });
        }
    }
    let r = upper.upper_triangular_inverse()?;
    let pair = CongruencePair {
        d: vec![1.0; n],
        r,
        rank: n,
    };
    let s = SymMatrix::gram(a)?;
    let residual = pair.residual(&s)?;
    let limit = RESIDUAL_RTOL * (1.0 + s.max_abs());
    if residual > limit {
        return Err(Error::CongruenceResidual { residual, limit });
    }
    Ok(pair)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked_gram() -> SymMatrix {
        let a = Matrix::from_rows(&[[3.0, 1.0], [-1.0, 2.0]]).unwrap();
        SymMatrix::gram(&a).unwrap()
    }

    fn assert_diagonalizes(s: &SymMatrix, pair: &CongruencePair) {
        let limit = RESIDUAL_RTOL * (1.0 + s.max_abs());
        assert!(pair.residual(s).unwrap() <= limit);
        assert!(pair.r.det().unwrap().abs() > NONSINGULAR_TOL);
    }

    #[test]
    fn worked_example_gram() {
        let s = worked_gram();
        assert_eq!(s.matrix().to_rows(), vec![vec![10.0, 1.0], vec![1.0, 5.0]]);
        let pair = diagonalize_congruent(&s).unwrap();
        assert_diagonalizes(&s, &pair);
        assert_eq!(pair.rank, 2);
        assert!(pair.d.iter().all(|&d| d > 0.0));
    }

    #[test]
    fn hand_derived_pair_is_a_congruence() {
        let s = worked_gram();
        let r = Matrix::from_rows(&[[2.0 / 5.0, -1.0 / 25.0], [0.0, 2.0 / 5.0]]).unwrap();
        let pair = CongruencePair::new(vec![8.0 / 5.0, 98.0 / 125.0], r).unwrap();
        assert!(pair.residual(&s).unwrap() < 1e-14);
        assert_eq!(pair.rank, 2);
    }

    #[test]
    fn identity_is_its_own_diagonalization() {
        let s = SymMatrix::new(Matrix::identity(3)).unwrap();
        let pair = diagonalize_congruent(&s).unwrap();
        assert_eq!(pair.d, vec![1.0, 1.0, 1.0]);
        assert_eq!(pair.r, Matrix::identity(3));
        assert_eq!(pair.rank, 3);
    }

    #[test]
    fn rank_one_block() {
        let s = SymMatrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        let pair = diagonalize_congruent(&s).unwrap();
        assert_diagonalizes(&s, &pair);
        assert_eq!(pair.rank, 1);
        let tol = s.rank_tolerance();
        assert_eq!(pair.d.iter().filter(|d| d.abs() > tol).count(), 1);
        assert_eq!(rank_of(&s), 1);
    }

    #[test]
    fn zero_diagonal_needs_combined_pivot() {
        let s = SymMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let pair = diagonalize_congruent(&s).unwrap();
        assert_diagonalizes(&s, &pair);
        assert_eq!(pair.inertia(s.rank_tolerance()), (1, 1, 0));
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let s = SymMatrix::new(Matrix::zeros(3, 3)).unwrap();
        assert_eq!(rank_of(&s), 0);
        let pair = diagonalize_congruent(&s).unwrap();
        assert_eq!(pair.d, vec![0.0; 3]);
    }

    #[test]
    fn rank_of_worked_gram() {
        assert_eq!(rank_of(&worked_gram()), 2);
    }

    #[test]
    fn asymmetric_input_rejected() {
        let err = SymMatrix::from_rows(&[[1.0, 2.0], [2.000001, 1.0]]).unwrap_err();
        assert!(matches!(err, Error::NotSymmetric { row: 0, col: 1 }));
        assert!(SymMatrix::new(Matrix::zeros(0, 0)).is_err());
    }

    #[test]
    fn qr_route_gives_identity_d() {
        let a = Matrix::from_rows(&[[3.0, 1.0], [-1.0, 2.0]]).unwrap();
        let pair = qr_congruence(&a).unwrap();
        assert_eq!(pair.d, vec![1.0, 1.0]);
        let s = SymMatrix::gram(&a).unwrap();
        assert!(pair.residual(&s).unwrap() <= 1e-9);
    }

    #[test]
    fn qr_route_identity_and_permutation() {
        let pair = qr_congruence(&Matrix::identity(2)).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((pair.r[(i, j)].abs() - want).abs() < 1e-15);
            }
        }
        let p = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let pair = qr_congruence(&p).unwrap();
        let s = SymMatrix::gram(&p).unwrap();
        assert!(pair.residual(&s).unwrap() <= 1e-9);
    }

    #[test]
    fn qr_route_rejects_singular() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert!(matches!(qr_congruence(&a), Err(Error::Singular { .. })));
    }
}
