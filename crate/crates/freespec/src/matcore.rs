//! Dense real symmetric linear algebra underlying everything else in the
//! crate: symmetric matrices, g-tuples of them, Kronecker products,
//! eigendecompositions, singular values, orthonormal bases, and direct sums.
//!
//! Problem sizes here are small (a few hundred rows at most), so storage is
//! dense and all decompositions are full.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from construction and decompositions.
#[derive(Debug, Error)]
pub enum MatError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("matrix must have positive order")]
    EmptyMatrix,
    #[error("tuple must contain at least one matrix")]
    EmptyTuple,
    #[error("all matrices in a tuple must share one order: found {0} and {1}")]
    OrderMismatch(usize, usize),
    #[error("tuples must share the coordinate count: found {0} and {1}")]
    CountMismatch(usize, usize),
    #[error("{op}: decomposition did not converge")]
    Decomposition { op: &'static str },
}

/// A real symmetric matrix. Symmetry is enforced at construction by
/// averaging with the transpose, so downstream code may rely on
/// `entries[i][j] == entries[j][i]` exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SymMatrix {
    mat: DMatrix<f64>,
}

impl SymMatrix {
    /// Builds from an arbitrary square matrix, symmetrizing via
    /// `(m + m^T) / 2`. Rejects non-square or non-finite input.
    pub fn new(m: DMatrix<f64>) -> Result<Self, MatError> {
        if m.nrows() != m.ncols() {
            return Err(MatError::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(MatError::EmptyMatrix);
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(MatError::NonFinite);
        }
        let sym = (&m + m.transpose()).scale(0.5);
        Ok(Self { mat: sym })
    }

    /// The identity of a given order.
    pub fn identity(order: usize) -> Self {
        Self {
            mat: DMatrix::identity(order, order),
        }
    }

    /// The zero matrix of a given order.
    pub fn zeros(order: usize) -> Self {
        Self {
            mat: DMatrix::zeros(order, order),
        }
    }

    /// Diagonal matrix from a slice.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self {
            mat: DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(diag)),
        }
    }

    /// Builds from rows; errors as [`SymMatrix::new`].
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MatError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(MatError::NotSquare {
                rows: n,
                cols: rows.first().map_or(0, Vec::len),
            });
        }
        let mat = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::new(mat)
    }

    pub fn order(&self) -> usize {
        self.mat.nrows()
    }

    pub fn as_mat(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn into_mat(self) -> DMatrix<f64> {
        self.mat
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.norm()
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace()
    }

    /// Smallest eigenvalue, via full symmetric eigendecomposition.
    pub fn min_eigenvalue(&self) -> Result<f64, MatError> {
        let (spectrum, _) = sym_eig(self)?;
        Ok(spectrum
            .values
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min))
    }
}

impl std::ops::Deref for SymMatrix {
    type Target = DMatrix<f64>;

    fn deref(&self) -> &Self::Target {
        &self.mat
    }
}

impl TryFrom<Vec<Vec<f64>>> for SymMatrix {
    type Error = MatError;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self, Self::Error> {
        Self::from_rows(&rows)
    }
}

impl From<SymMatrix> for Vec<Vec<f64>> {
    fn from(m: SymMatrix) -> Self {
        (0..m.order())
            .map(|i| (0..m.order()).map(|j| m.mat[(i, j)]).collect())
            .collect()
    }
}

/// A g-tuple of symmetric matrices sharing one order n. The universal
/// carrier for defining tuples, optimizer candidates, and dilation blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TupleRepr", into = "TupleRepr")]
pub struct MatrixTuple {
    items: Vec<SymMatrix>,
}

/// Wire format for tuples: `{g, n, items}`.
#[derive(Serialize, Deserialize)]
struct TupleRepr {
    g: usize,
    n: usize,
    items: Vec<SymMatrix>,
}

impl MatrixTuple {
    pub fn new(items: Vec<SymMatrix>) -> Result<Self, MatError> {
        let first = items.first().ok_or(MatError::EmptyTuple)?;
        let order = first.order();
        for item in &items {
            if item.order() != order {
                return Err(MatError::OrderMismatch(order, item.order()));
            }
        }
        Ok(Self { items })
    }

    /// The zero tuple with `count` coordinates at level `order`.
    pub fn zeros(count: usize, order: usize) -> Self {
        Self {
            items: (0..count).map(|_| SymMatrix::zeros(order)).collect(),
        }
    }

    /// A level-1 tuple from scalars.
    pub fn from_scalars(values: &[f64]) -> Self {
        Self {
            items: values
                .iter()
                .map(|&v| SymMatrix::from_diagonal(&[v]))
                .collect(),
        }
    }

    /// Number of coordinates g.
    pub fn count(&self) -> usize {
        self.items.len()
    }

    /// Shared matrix order n.
    pub fn order(&self) -> usize {
        self.items[0].order()
    }

    pub fn items(&self) -> &[SymMatrix] {
        &self.items
    }

    pub fn item(&self, i: usize) -> &SymMatrix {
        &self.items[i]
    }

    /// Entrywise linear combination `self + t * other`.
    pub fn axpy(&self, t: f64, other: &MatrixTuple) -> Result<MatrixTuple, MatError> {
        if self.count() != other.count() {
            return Err(MatError::CountMismatch(self.count(), other.count()));
        }
        if self.order() != other.order() {
            return Err(MatError::OrderMismatch(self.order(), other.order()));
        }
        let items = self
            .items
            .iter()
            .zip(&other.items)
            .map(|(a, b)| SymMatrix::new(a.as_mat() + b.as_mat().scale(t)).expect("finite sum"))
            .collect();
        Ok(MatrixTuple { items })
    }

    pub fn scale(&self, t: f64) -> MatrixTuple {
        MatrixTuple {
            items: self
                .items
                .iter()
                .map(|a| SymMatrix::new(a.as_mat().scale(t)).expect("finite scale"))
                .collect(),
        }
    }

    /// Conjugates every coordinate: `u^T X_i u`. `u` need not be square;
    /// a rectangular isometry compresses the tuple.
    pub fn conjugate(&self, u: &DMatrix<f64>) -> Result<MatrixTuple, MatError> {
        let items = self
            .items
            .iter()
            .map(|a| SymMatrix::new(u.transpose() * a.as_mat() * u))
            .collect::<Result<Vec<_>, _>>()?;
        MatrixTuple::new(items)
    }

    /// Max Frobenius norm over coordinates.
    pub fn norm(&self) -> f64 {
        self.items
            .iter()
            .map(SymMatrix::frobenius_norm)
            .fold(0.0, f64::max)
    }
}

impl TryFrom<TupleRepr> for MatrixTuple {
    type Error = MatError;

    fn try_from(repr: TupleRepr) -> Result<Self, Self::Error> {
        let t = MatrixTuple::new(repr.items)?;
        if t.count() != repr.g {
            return Err(MatError::CountMismatch(repr.g, t.count()));
        }
        if t.order() != repr.n {
            return Err(MatError::OrderMismatch(repr.n, t.order()));
        }
        Ok(t)
    }
}

impl From<MatrixTuple> for TupleRepr {
    fn from(t: MatrixTuple) -> Self {
        TupleRepr {
            g: t.count(),
            n: t.order(),
            items: t.items,
        }
    }
}

/// Whether a spectrum lists eigenvalues or singular values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    Eigenvalues,
    SingularValues,
}

/// A spectrum sorted by descending absolute value. The sort order is what
/// the zero-decision protocol scans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub values: Vec<f64>,
    pub kind: SpectrumKind,
}

impl SpectrumReport {
    pub fn new(mut values: Vec<f64>, kind: SpectrumKind) -> Self {
        values.sort_by(|a, b| b.abs().partial_cmp(&a.abs()).expect("finite spectrum"));
        Self { values, kind }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Kronecker product. The `(i, j)` block of the result is `a[(i, j)] * b`.
pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

/// Symmetric eigendecomposition. Returns the spectrum sorted by descending
/// absolute value and the orthonormal eigenvector matrix with matching
/// column order, so kernel candidates sit in the trailing columns.
pub fn sym_eig(m: &SymMatrix) -> Result<(SpectrumReport, DMatrix<f64>), MatError> {
    let n = m.order();
    let eig = m
        .as_mat()
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or(MatError::Decomposition { op: "sym_eig" })?;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .abs()
            .partial_cmp(&eig.eigenvalues[i].abs())
            .expect("finite eigenvalues")
    });
    let values: Vec<f64> = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, idx[c])]);
    Ok((
        SpectrumReport {
            values,
            kind: SpectrumKind::Eigenvalues,
        },
        vectors,
    ))
}

/// Full SVD with values sorted descending and both factors permuted to
/// match, so nullspace candidates sit in the trailing columns of `v`.
pub struct SvdParts {
    pub u: DMatrix<f64>,
    pub values: Vec<f64>,
    pub v: DMatrix<f64>,
}

pub fn svd(m: &DMatrix<f64>) -> Result<SvdParts, MatError> {
    let svd = m
        .clone()
        .try_svd(true, true, f64::EPSILON, 10_000)
        .ok_or(MatError::Decomposition { op: "svd" })?;
    let u = svd.u.expect("requested u");
    let vt = svd.v_t.expect("requested v_t");
    let k = svd.singular_values.len();
    let mut idx: Vec<usize> = (0..k).collect();
    idx.sort_by(|&i, &j| {
        svd.singular_values[j]
            .partial_cmp(&svd.singular_values[i])
            .expect("finite singular values")
    });
    let values: Vec<f64> = idx.iter().map(|&i| svd.singular_values[i]).collect();
    let u = DMatrix::from_fn(u.nrows(), k, |r, c| u[(r, idx[c])]);
    let v = DMatrix::from_fn(vt.ncols(), k, |r, c| vt[(idx[c], r)]);
    Ok(SvdParts { u, values, v })
}

/// Singular values of a general matrix, descending.
pub fn singular_values(m: &DMatrix<f64>) -> Result<SpectrumReport, MatError> {
    let mut values = m
        .clone()
        .try_svd(false, false, f64::EPSILON, 10_000)
        .ok_or(MatError::Decomposition {
            op: "singular_values",
        })?
        .singular_values
        .as_slice()
        .to_vec();
    values.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    Ok(SpectrumReport {
        values,
        kind: SpectrumKind::SingularValues,
    })
}

/// Orthonormal basis for the column span of `cols`, via column-pivoted
/// QR. Directions whose pivot is at most `tol` times the largest are
/// dropped; an empty basis is a matrix with zero columns.
///
/// QR rather than SVD: Householder Q factors stay orthonormal and
/// span-consistent even when the input has repeated singular values
/// (projectors always do), where SVD factors of the degenerate cluster
/// need not pair up.
pub fn orthonormal_basis(cols: &DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>, MatError> {
    assert!(tol > 0.0, "orthonormal_basis requires tol > 0");
    if cols.ncols() == 0 || cols.nrows() == 0 {
        return Ok(DMatrix::zeros(cols.nrows(), 0));
    }
    if cols.iter().any(|v| !v.is_finite()) {
        return Err(MatError::NonFinite);
    }
    let qr = cols.clone().col_piv_qr();
    let diag: Vec<f64> = {
        let r = qr.r();
        (0..r.nrows().min(r.ncols()))
            .map(|i| r[(i, i)].abs())
            .collect()
    };
    let pivot_max = diag.first().copied().unwrap_or(0.0);
    if pivot_max <= 0.0 {
        return Ok(DMatrix::zeros(cols.nrows(), 0));
    }
    // pivoted R diagonals are nonincreasing; rank = first collapse
    let rank = diag.iter().take_while(|&&d| d > tol * pivot_max).count();
    let q = qr.q();
    Ok(q.columns(0, rank).into_owned())
}

/// Block-diagonal stacking of tuples, coordinate by coordinate.
pub fn direct_sum(tuples: &[MatrixTuple]) -> Result<MatrixTuple, MatError> {
    let first = tuples.first().ok_or(MatError::EmptyTuple)?;
    let g = first.count();
    for t in tuples {
        if t.count() != g {
            return Err(MatError::CountMismatch(g, t.count()));
        }
    }
    let total: usize = tuples.iter().map(MatrixTuple::order).sum();
    let items = (0..g)
        .map(|i| {
            let mut block = DMatrix::zeros(total, total);
            let mut off = 0;
            for t in tuples {
                let n = t.order();
                block.view_mut((off, off), (n, n)).copy_from(t.item(i).as_mat());
                off += n;
            }
            SymMatrix::new(block).expect("finite blocks")
        })
        .collect();
    MatrixTuple::new(items)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_sym(rng: &mut ChaCha8Rng, n: usize) -> SymMatrix {
        let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        SymMatrix::new(m).unwrap()
    }

    fn random_mat(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
        DMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn construction_symmetrizes() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 3.0]);
        let s = SymMatrix::new(m).unwrap();
        assert_eq!(s[(0, 1)], 1.0);
        assert_eq!(s[(1, 0)], 1.0);
    }

    #[test]
    fn construction_rejects_non_finite() {
        let m = DMatrix::from_row_slice(1, 1, &[f64::NAN]);
        assert!(matches!(SymMatrix::new(m), Err(MatError::NonFinite)));
    }

    #[test]
    fn kron_block_structure() {
        // [[1,2],[3,4]] ⊗ B stacks scaled copies of B blockwise.
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let b = DMatrix::from_row_slice(2, 2, &[5.0, 6.0, 7.0, 8.0]);
        let k = kron(&a, &b);
        for bi in 0..2 {
            for bj in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        assert_eq!(k[(2 * bi + i, 2 * bj + j)], a[(bi, bj)] * b[(i, j)]);
                    }
                }
            }
        }
    }

    #[test]
    fn kron_identity_left() {
        let b = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let one = DMatrix::identity(1, 1);
        assert_eq!(kron(&one, &b), b);
    }

    #[test]
    fn kron_e11_identity() {
        let mut e11 = DMatrix::zeros(2, 2);
        e11[(0, 0)] = 1.0;
        let k = kron(&e11, &DMatrix::identity(2, 2));
        let expected = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&[
            1.0, 1.0, 0.0, 0.0,
        ]));
        assert_eq!(k, expected);
    }

    #[test]
    fn kron_bilinear_and_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_sym(&mut rng, 3);
        let a2 = random_sym(&mut rng, 3);
        let b = random_sym(&mut rng, 2);
        let lhs = kron(&(a.as_mat() + a2.as_mat()), b.as_mat());
        let rhs = kron(a.as_mat(), b.as_mat()) + kron(a2.as_mat(), b.as_mat());
        assert!((lhs - &rhs).norm() < 1e-12);
        let k = kron(a.as_mat(), b.as_mat());
        assert!((&k - k.transpose()).norm() < 1e-12);
    }

    #[test]
    fn sym_eig_diagonal() {
        let m = SymMatrix::from_diagonal(&[3.0, 1.0]);
        let (spec, _) = sym_eig(&m).unwrap();
        assert_eq!(spec.values, vec![3.0, 1.0]);
    }

    #[test]
    fn sym_eig_pauli_x() {
        let m = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let (spec, _) = sym_eig(&m).unwrap();
        let mut sorted = spec.values.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((sorted[0] + 1.0).abs() < 1e-12);
        assert!((sorted[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sym_eig_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = random_sym(&mut rng, 5);
        let (spec, v) = sym_eig(&m).unwrap();
        let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&spec.values));
        let rebuilt = &v * lambda * v.transpose();
        assert!((rebuilt - m.as_mat()).norm() < 1e-10);
        assert!((&v * v.transpose() - DMatrix::identity(5, 5)).norm() < 1e-12);
    }

    #[test]
    fn sym_eig_trace_matches_eigenvalue_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let m = random_sym(&mut rng, 6);
            let (spec, _) = sym_eig(&m).unwrap();
            let sum: f64 = spec.values.iter().sum();
            assert!((sum - m.trace()).abs() < 1e-10 * (1.0 + m.trace().abs()));
        }
    }

    #[test]
    fn singular_values_zero_and_diagonal() {
        let z = DMatrix::zeros(3, 2);
        let spec = singular_values(&z).unwrap();
        assert_eq!(spec.values, vec![0.0, 0.0]);

        let d = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, -3.0]);
        let spec = singular_values(&d).unwrap();
        assert!((spec.values[0] - 3.0).abs() < 1e-12);
        assert!((spec.values[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn singular_values_match_gram_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_mat(&mut rng, 4, 6);
        let spec = singular_values(&m).unwrap();
        let gram = SymMatrix::new(&m * m.transpose()).unwrap();
        let (eigs, _) = sym_eig(&gram).unwrap();
        let mut expected: Vec<f64> = eigs.values.iter().map(|&l| l.max(0.0).sqrt()).collect();
        expected.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (s, e) in spec.values.iter().zip(&expected) {
            assert!((s - e).abs() < 1e-10);
        }
    }

    #[test]
    fn singular_values_orthogonal_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_mat(&mut rng, 4, 4);
        let q = orthonormal_basis(&random_mat(&mut rng, 4, 4), 1e-12).unwrap();
        assert_eq!(q.ncols(), 4);
        let spun = &q * &m * q.transpose();
        let a = singular_values(&m).unwrap();
        let b = singular_values(&spun).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn orthonormal_basis_collapses_duplicates() {
        let cols = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 0.0, 0.0, 0.0, 0.0]);
        let q = orthonormal_basis(&cols, 1e-10).unwrap();
        assert_eq!(q.ncols(), 1);
        assert!((q[(0, 0)].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthonormal_basis_empty_input() {
        let cols = DMatrix::zeros(4, 0);
        let q = orthonormal_basis(&cols, 1e-10).unwrap();
        assert_eq!(q.ncols(), 0);
    }

    #[test]
    fn orthonormal_basis_projector_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        // rank-3 set in R^6: three independent columns plus dependent copies
        let base = random_mat(&mut rng, 6, 3);
        let mix = random_mat(&mut rng, 3, 5);
        let cols = &base * mix;
        let q = orthonormal_basis(&cols, 1e-10).unwrap();
        assert_eq!(q.ncols(), 3);
        // projector oracle via normal equations on the known basis
        let gram = base.transpose() * &base;
        let proj_oracle = &base * gram.try_inverse().unwrap() * base.transpose();
        let proj = &q * q.transpose();
        assert!((proj - proj_oracle).norm() < 1e-10);
    }

    #[test]
    fn direct_sum_single_and_scalars() {
        let t = MatrixTuple::from_scalars(&[2.0, -1.0]);
        let s = direct_sum(std::slice::from_ref(&t)).unwrap();
        assert_eq!(s, t);

        let a = MatrixTuple::from_scalars(&[1.0]);
        let b = MatrixTuple::from_scalars(&[4.0]);
        let s = direct_sum(&[a, b]).unwrap();
        assert_eq!(s.order(), 2);
        assert_eq!(s.item(0)[(0, 0)], 1.0);
        assert_eq!(s.item(0)[(1, 1)], 4.0);
        assert_eq!(s.item(0)[(0, 1)], 0.0);
    }

    #[test]
    fn direct_sum_blocks_entrywise() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let parts: Vec<MatrixTuple> = [2, 3, 1]
            .iter()
            .map(|&n| {
                MatrixTuple::new((0..2).map(|_| random_sym(&mut rng, n)).collect()).unwrap()
            })
            .collect();
        let s = direct_sum(&parts).unwrap();
        assert_eq!(s.order(), 6);
        let offsets = [0usize, 2, 5];
        for (p, &off) in parts.iter().zip(&offsets) {
            for c in 0..2 {
                for i in 0..p.order() {
                    for j in 0..p.order() {
                        assert_eq!(s.item(c)[(off + i, off + j)], p.item(c)[(i, j)]);
                    }
                }
            }
        }
        // off-block entries vanish
        assert_eq!(s.item(0)[(0, 3)], 0.0);
        assert_eq!(s.item(1)[(5, 1)], 0.0);
    }

    #[test]
    fn direct_sum_rejects_count_mismatch() {
        let a = MatrixTuple::from_scalars(&[1.0]);
        let b = MatrixTuple::from_scalars(&[1.0, 2.0]);
        assert!(matches!(
            direct_sum(&[a, b]),
            Err(MatError::CountMismatch(1, 2))
        ));
    }

    #[test]
    fn tuple_serde_roundtrip() {
        let t = MatrixTuple::new(vec![
            SymMatrix::from_rows(&[vec![0.0, 1.5], vec![1.5, -0.25]]).unwrap(),
            SymMatrix::identity(2),
        ])
        .unwrap();
        let json = serde_json::to_string(&t).unwrap();
        let back: MatrixTuple = serde_json::from_str(&json).unwrap();
        assert_eq!(t, back);
    }
}
