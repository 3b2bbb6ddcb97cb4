//! Monic linear pencils and the convex sets they carve out.
//!
//! A pencil is a g-tuple `A` of symmetric d×d coefficient matrices. Its
//! evaluation on a tuple `X` of symmetric n×n matrices is
//! `L_A(X) = I_{dn} - Σ_i A_i ⊗ X_i`, and the level-n member set is
//! `{X : L_A(X) ⪰ 0}`. This module owns evaluation, membership and
//! boundedness checks, and the two random linear-functional families (RC
//! and RPT) used to generate extreme points by optimization.

use nalgebra::DMatrix;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extremality;
use crate::matcore::{self, MatError, MatrixTuple, SymMatrix};
use crate::solver::{self, SolveStatus, SolverError};

#[derive(Debug, Error)]
pub enum PencilError {
    #[error("coordinate count mismatch: pencil has g={pencil}, argument has g={arg}")]
    CountMismatch { pencil: usize, arg: usize },
    #[error("functional level {functional} does not match argument level {arg}")]
    LevelMismatch { functional: usize, arg: usize },
    #[error("could not generate an irreducible bounded pencil in {0} attempts")]
    GenerationFailure(usize),
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// A monic linear pencil, i.e. its coefficient tuple `A`, with cached
/// irreducibility and boundedness certificates when they have been checked.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "PencilRepr", into = "PencilRepr")]
pub struct LinearPencil {
    coefficients: MatrixTuple,
    irreducible: Option<bool>,
    bounded: Option<bool>,
}

/// Wire format `{g, d, items}`. Cached flags are runtime-only.
#[derive(Serialize, Deserialize)]
struct PencilRepr {
    g: usize,
    d: usize,
    items: Vec<SymMatrix>,
}

impl LinearPencil {
    pub fn new(coefficients: MatrixTuple) -> Self {
        Self {
            coefficients,
            irreducible: None,
            bounded: None,
        }
    }

    /// The free disc: `A_1` the symmetric swap, `A_2` the diagonal sign
    /// matrix. Its level-1 set is the closed unit disc and all of its free
    /// extreme points live at level 1.
    pub fn free_disc() -> Self {
        let a1 = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let a2 = SymMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        Self {
            coefficients: MatrixTuple::new(vec![a1, a2]).unwrap(),
            irreducible: Some(true),
            bounded: Some(true),
        }
    }

    /// A free simplex in `g` variables: `g` diagonal matrices of order
    /// `g + 1` whose level-1 set is a bounded simplex (`x_i ≤ 1` for each
    /// coordinate together with `x_1 + … + x_g ≥ -1`).
    pub fn free_simplex(g: usize) -> Self {
        let d = g + 1;
        let items = (0..g)
            .map(|i| {
                let mut diag = vec![0.0; d];
                diag[i] = 1.0;
                diag[d - 1] = -1.0;
                SymMatrix::from_diagonal(&diag)
            })
            .collect();
        Self {
            coefficients: MatrixTuple::new(items).unwrap(),
            irreducible: Some(false),
            bounded: Some(true),
        }
    }

    pub fn coefficients(&self) -> &MatrixTuple {
        &self.coefficients
    }

    /// Number of variables g.
    pub fn var_count(&self) -> usize {
        self.coefficients.count()
    }

    /// Coefficient order d.
    pub fn order(&self) -> usize {
        self.coefficients.order()
    }

    pub fn irreducible_flag(&self) -> Option<bool> {
        self.irreducible
    }

    pub fn bounded_flag(&self) -> Option<bool> {
        self.bounded
    }

    /// Evaluates `L_A(X) = I_{dn} - Σ_i A_i ⊗ X_i`.
    pub fn evaluate(&self, x: &MatrixTuple) -> Result<SymMatrix, PencilError> {
        if x.count() != self.var_count() {
            return Err(PencilError::CountMismatch {
                pencil: self.var_count(),
                arg: x.count(),
            });
        }
        let dn = self.order() * x.order();
        let mut m = DMatrix::identity(dn, dn);
        for (a, xi) in self.coefficients.items().iter().zip(x.items()) {
            m -= matcore::kron(a.as_mat(), xi.as_mat());
        }
        Ok(SymMatrix::new(m)?)
    }

    /// The linear part `Λ_A(X) = Σ_i A_i ⊗ X_i` on a symmetric tuple.
    pub fn lambda(&self, x: &MatrixTuple) -> Result<SymMatrix, PencilError> {
        if x.count() != self.var_count() {
            return Err(PencilError::CountMismatch {
                pencil: self.var_count(),
                arg: x.count(),
            });
        }
        let blocks: Vec<DMatrix<f64>> =
            x.items().iter().map(|m| m.as_mat().clone()).collect();
        Ok(SymMatrix::new(self.lambda_blocks(&blocks)?)?)
    }

    /// `Λ_A` on arbitrary (possibly rectangular) coordinate blocks. Needed
    /// for the vector tuples `β` of the Arveson linear system, where each
    /// coordinate is n×1.
    pub fn lambda_blocks(&self, blocks: &[DMatrix<f64>]) -> Result<DMatrix<f64>, PencilError> {
        if blocks.len() != self.var_count() {
            return Err(PencilError::CountMismatch {
                pencil: self.var_count(),
                arg: blocks.len(),
            });
        }
        let d = self.order();
        let (r, c) = (blocks[0].nrows(), blocks[0].ncols());
        let mut m = DMatrix::zeros(d * r, d * c);
        for (a, b) in self.coefficients.items().iter().zip(blocks) {
            m += matcore::kron(a.as_mat(), b);
        }
        Ok(m)
    }

    /// Membership in the level-n set: the smallest eigenvalue of
    /// `L_A(X)` must be at least `-tol`.
    pub fn is_member(&self, x: &MatrixTuple, tol: f64) -> Result<bool, PencilError> {
        let l = self.evaluate(x)?;
        Ok(l.min_eigenvalue()? >= -tol)
    }

    /// Boundedness of the whole free spectrahedron, decided at level 1:
    /// the set is bounded iff its level-1 slice is, which holds iff every
    /// coordinate is bounded in both signs. Runs 2g scalar-level programs.
    pub fn is_bounded(&self) -> Result<bool, PencilError> {
        let g = self.var_count();
        for i in 0..g {
            for sign in [1.0, -1.0] {
                let mut c = vec![0.0; g];
                c[i] = sign;
                let prog = solver::level_one_program(self, &c);
                let result = solver::solve(&prog, &solver::SolveOptions::default())?;
                match result.status {
                    SolveStatus::Optimal => {}
                    SolveStatus::Unbounded => return Ok(false),
                    SolveStatus::Infeasible | SolveStatus::IllConditioned => {
                        return Err(SolverError::Failed {
                            status: result.status,
                            context: "boundedness probe",
                        }
                        .into())
                    }
                }
            }
        }
        Ok(true)
    }
}

impl TryFrom<PencilRepr> for LinearPencil {
    type Error = MatError;

    fn try_from(repr: PencilRepr) -> Result<Self, Self::Error> {
        let t = MatrixTuple::new(repr.items)?;
        if t.count() != repr.g {
            return Err(MatError::CountMismatch(repr.g, t.count()));
        }
        if t.order() != repr.d {
            return Err(MatError::OrderMismatch(repr.d, t.order()));
        }
        Ok(LinearPencil::new(t))
    }
}

impl From<LinearPencil> for PencilRepr {
    fn from(p: LinearPencil) -> Self {
        PencilRepr {
            g: p.var_count(),
            d: p.order(),
            items: p.coefficients.items().to_vec(),
        }
    }
}

/// Configuration for random defining-tuple generation: raw integer entries
/// uniform in `[-entry_bound, entry_bound]`, symmetrized and divided by
/// `scale_divisor`, rejection-sampled until irreducible and bounded.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PencilGenConfig {
    pub g: usize,
    pub d: usize,
    #[serde(default = "default_entry_bound")]
    pub entry_bound: i64,
    #[serde(default = "default_scale_divisor")]
    pub scale_divisor: f64,
    pub seed: u64,
    #[serde(default = "default_retry_cap")]
    pub retry_cap: usize,
}

fn default_entry_bound() -> i64 {
    25
}

fn default_scale_divisor() -> f64 {
    10.0
}

fn default_retry_cap() -> usize {
    1000
}

impl PencilGenConfig {
    pub fn new(g: usize, d: usize, seed: u64) -> Self {
        Self {
            g,
            d,
            entry_bound: default_entry_bound(),
            scale_divisor: default_scale_divisor(),
            seed,
            retry_cap: default_retry_cap(),
        }
    }
}

/// Draws random defining tuples until one is both irreducible and bounded.
/// Ill-conditioned commutant decisions count as failed attempts.
pub fn random_pencil(cfg: &PencilGenConfig) -> Result<LinearPencil, PencilError> {
    assert!(cfg.g >= 1 && cfg.d >= 1, "g and d must be positive");
    assert!(cfg.entry_bound > 0 && cfg.scale_divisor > 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.retry_cap {
        let items: Vec<SymMatrix> = (0..cfg.g)
            .map(|_| {
                let raw = DMatrix::from_fn(cfg.d, cfg.d, |_, _| {
                    rng.random_range(-cfg.entry_bound..=cfg.entry_bound) as f64
                });
                // (Ã + Ã^T) / divisor; SymMatrix::new averages, so scale by 2/divisor.
                SymMatrix::new(raw.scale(2.0 / cfg.scale_divisor)).expect("finite entries")
            })
            .collect();
        let tuple = MatrixTuple::new(items)?;
        let irreducible = match extremality::symmetric_commutant_dim(&tuple) {
            Ok(dim) => dim == 1,
            Err(_) => false,
        };
        if !irreducible {
            continue;
        }
        let mut pencil = LinearPencil::new(tuple);
        if pencil.is_bounded()? {
            pencil.irreducible = Some(true);
            pencil.bounded = Some(true);
            return Ok(pencil);
        }
    }
    Err(PencilError::GenerationFailure(cfg.retry_cap))
}

/// Which random-functional family to draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalKind {
    /// Random coefficients on the lower triangles of the tuple entries.
    Rc,
    /// Random positive weight trace: `tr(V^T V Λ_A(X))` with `V` a random
    /// upper-triangular dn×dn matrix.
    Rpt,
}

/// A linear functional on tuples at a fixed level.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LinearFunctional {
    Rc {
        level: usize,
        /// One lower-triangle table per coordinate, row-major over
        /// `(i, j)` with `i ≥ j`; length `n(n+1)/2` each.
        coeffs: Vec<Vec<f64>>,
    },
    Rpt {
        level: usize,
        /// Upper-triangular weight, row-major dn×dn.
        weight: Vec<Vec<f64>>,
        /// The defining tuple the functional was built against.
        pencil: MatrixTuple,
    },
}

/// Index into a row-major lower-triangle table: `(i, j)` with `i ≥ j`.
pub fn tri_index(i: usize, j: usize) -> usize {
    debug_assert!(i >= j);
    i * (i + 1) / 2 + j
}

impl LinearFunctional {
    pub fn kind(&self) -> FunctionalKind {
        match self {
            LinearFunctional::Rc { .. } => FunctionalKind::Rc,
            LinearFunctional::Rpt { .. } => FunctionalKind::Rpt,
        }
    }

    pub fn level(&self) -> usize {
        match self {
            LinearFunctional::Rc { level, .. } | LinearFunctional::Rpt { level, .. } => *level,
        }
    }

    /// Evaluates the functional on a tuple of the matching level.
    ///
    /// RC: `Σ_k Σ_{i≥j} α_{i,j}^k X_{i,j}^k`. RPT: `tr(V^T V Λ_A(X))`.
    pub fn apply(&self, x: &MatrixTuple) -> Result<f64, PencilError> {
        if x.order() != self.level() {
            return Err(PencilError::LevelMismatch {
                functional: self.level(),
                arg: x.order(),
            });
        }
        match self {
            LinearFunctional::Rc { coeffs, .. } => {
                if coeffs.len() != x.count() {
                    return Err(PencilError::CountMismatch {
                        pencil: coeffs.len(),
                        arg: x.count(),
                    });
                }
                let n = x.order();
                let mut total = 0.0;
                for (table, xi) in coeffs.iter().zip(x.items()) {
                    for i in 0..n {
                        for j in 0..=i {
                            total += table[tri_index(i, j)] * xi[(i, j)];
                        }
                    }
                }
                Ok(total)
            }
            LinearFunctional::Rpt { weight, pencil, .. } => {
                let p = LinearPencil::new(pencil.clone());
                let lam = p.lambda(x)?;
                let dn = lam.order();
                let v = DMatrix::from_fn(dn, dn, |i, j| weight[i][j]);
                let w = v.transpose() * v;
                Ok((w * lam.as_mat()).trace())
            }
        }
    }
}

const FUNCTIONAL_ENTRY_BOUND: i64 = 20;
const FUNCTIONAL_DIVISOR: f64 = 10.0;

/// Draws a random functional of the given kind for optimizing over the
/// level-n set of `pencil`. Integer entries uniform in `[-20, 20]` scaled
/// by 1/10 place every coefficient in `[-2, 2]`.
pub fn random_functional(
    kind: FunctionalKind,
    pencil: &LinearPencil,
    n: usize,
    seed: u64,
) -> LinearFunctional {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_functional_with(&mut rng, kind, pencil, n)
}

/// As [`random_functional`] but drawing from a caller-owned stream, for
/// campaigns that derive many functionals from one seed.
pub fn random_functional_with(
    rng: &mut ChaCha8Rng,
    kind: FunctionalKind,
    pencil: &LinearPencil,
    n: usize,
) -> LinearFunctional {
    assert!(n >= 1);
    let draw = |rng: &mut ChaCha8Rng| {
        rng.random_range(-FUNCTIONAL_ENTRY_BOUND..=FUNCTIONAL_ENTRY_BOUND) as f64
            / FUNCTIONAL_DIVISOR
    };
    match kind {
        FunctionalKind::Rc => {
            let g = pencil.var_count();
            let coeffs = (0..g)
                .map(|_| (0..n * (n + 1) / 2).map(|_| draw(rng)).collect())
                .collect();
            LinearFunctional::Rc { level: n, coeffs }
        }
        FunctionalKind::Rpt => {
            let dn = pencil.order() * n;
            let weight = (0..dn)
                .map(|i| {
                    (0..dn)
                        .map(|j| if j >= i { draw(rng) } else { 0.0 })
                        .collect()
                })
                .collect();
            LinearFunctional::Rpt {
                level: n,
                weight,
                pencil: pencil.coefficients().clone(),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc() -> LinearPencil {
        LinearPencil::free_disc()
    }

    #[test]
    fn evaluate_zero_tuple_is_identity() {
        let p = disc();
        for n in 1..=3 {
            let l = p.evaluate(&MatrixTuple::zeros(2, n)).unwrap();
            assert_eq!(l.as_mat(), &DMatrix::identity(2 * n, 2 * n));
        }
    }

    #[test]
    fn evaluate_disc_scalar_matches_symbolic_expansion() {
        let p = disc();
        let (x1, x2) = (0.3, -0.7);
        let l = p.evaluate(&MatrixTuple::from_scalars(&[x1, x2])).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[1.0 - x2, -x1, -x1, 1.0 + x2]);
        assert!((l.as_mat() - expected).norm() < 1e-15);
    }

    #[test]
    fn evaluate_level_two_matches_blockwise_kron() {
        let p = disc();
        let x1 = SymMatrix::from_rows(&[vec![0.2, 0.1], vec![0.1, -0.3]]).unwrap();
        let x2 = SymMatrix::from_rows(&[vec![-0.1, 0.4], vec![0.4, 0.0]]).unwrap();
        let x = MatrixTuple::new(vec![x1.clone(), x2.clone()]).unwrap();
        let l = p.evaluate(&x).unwrap();
        // brute-force expansion: assemble A_i ⊗ X_i entry by entry
        let mut expected = DMatrix::identity(4, 4);
        for (a, xi) in p.coefficients().items().iter().zip([&x1, &x2]) {
            for bi in 0..2 {
                for bj in 0..2 {
                    for i in 0..2 {
                        for j in 0..2 {
                            expected[(2 * bi + i, 2 * bj + j)] -= a[(bi, bj)] * xi[(i, j)];
                        }
                    }
                }
            }
        }
        assert!((l.as_mat() - expected).norm() < 1e-14);
    }

    #[test]
    fn lambda_complements_evaluate() {
        let p = disc();
        let x = MatrixTuple::from_scalars(&[0.5, 0.25]);
        let l = p.evaluate(&x).unwrap();
        let lam = p.lambda(&x).unwrap();
        let sum = l.as_mat() + lam.as_mat();
        assert!((sum - DMatrix::identity(2, 2)).norm() < 1e-15);

        let zero = p.lambda(&MatrixTuple::zeros(2, 1)).unwrap();
        assert_eq!(zero.frobenius_norm(), 0.0);

        let unit = p.lambda(&MatrixTuple::from_scalars(&[1.0, 0.0])).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!((unit.as_mat() - expected).norm() < 1e-15);
    }

    #[test]
    fn membership_on_the_disc() {
        let p = disc();
        assert!(p.is_member(&MatrixTuple::zeros(2, 1), 0.0).unwrap());
        // (2, 0) lies outside: min eigenvalue is exactly -1
        assert!(!p
            .is_member(&MatrixTuple::from_scalars(&[2.0, 0.0]), 1e-9)
            .unwrap());
        // (1, 0) sits on the boundary: min eigenvalue 0
        assert!(p
            .is_member(&MatrixTuple::from_scalars(&[1.0, 0.0]), 1e-9)
            .unwrap());
    }

    #[test]
    fn membership_closed_under_direct_sums() {
        let p = disc();
        let x = MatrixTuple::from_scalars(&[0.6, 0.3]);
        let y = MatrixTuple::from_scalars(&[-0.5, 0.4]);
        let s = matcore::direct_sum(&[x.clone(), y.clone()]).unwrap();
        assert!(p.is_member(&x, 1e-9).unwrap());
        assert!(p.is_member(&y, 1e-9).unwrap());
        assert!(p.is_member(&s, 1e-9).unwrap());
    }

    #[test]
    fn evaluate_affine_in_argument() {
        let p = disc();
        let x = MatrixTuple::from_scalars(&[0.3, -0.2]);
        let y = MatrixTuple::from_scalars(&[-0.6, 0.1]);
        let t = 0.37;
        let mix = x.scale(t).axpy(1.0 - t, &y).unwrap();
        let lhs = p.evaluate(&mix).unwrap();
        let rhs = p.evaluate(&x).unwrap().as_mat().scale(t)
            + p.evaluate(&y).unwrap().as_mat().scale(1.0 - t);
        assert!((lhs.as_mat() - rhs).norm() < 1e-12);
    }

    #[test]
    fn rc_functional_at_level_one_is_coefficient_dot() {
        let ell = LinearFunctional::Rc {
            level: 1,
            coeffs: vec![vec![1.5], vec![-2.0]],
        };
        let x = MatrixTuple::from_scalars(&[2.0, 3.0]);
        assert_eq!(ell.apply(&x).unwrap(), 1.5 * 2.0 - 2.0 * 3.0);
    }

    #[test]
    fn rc_single_diagonal_coefficient_reads_entry() {
        let mut coeffs = vec![vec![0.0; 3], vec![0.0; 3]];
        coeffs[0][tri_index(0, 0)] = 1.0;
        let ell = LinearFunctional::Rc { level: 2, coeffs };
        let x = MatrixTuple::new(vec![
            SymMatrix::from_diagonal(&[5.0, 9.0]),
            SymMatrix::zeros(2),
        ])
        .unwrap();
        assert_eq!(ell.apply(&x).unwrap(), 5.0);
    }

    #[test]
    fn functional_linearity() {
        let p = disc();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for kind in [FunctionalKind::Rc, FunctionalKind::Rpt] {
            let ell = random_functional_with(&mut rng, kind, &p, 2);
            let a = MatrixTuple::new(vec![
                SymMatrix::from_rows(&[vec![0.1, 0.2], vec![0.2, 0.3]]).unwrap(),
                SymMatrix::from_rows(&[vec![-0.4, 0.0], vec![0.0, 0.5]]).unwrap(),
            ])
            .unwrap();
            let b = MatrixTuple::new(vec![
                SymMatrix::from_rows(&[vec![0.7, -0.1], vec![-0.1, 0.2]]).unwrap(),
                SymMatrix::from_rows(&[vec![0.0, 0.3], vec![0.3, -0.6]]).unwrap(),
            ])
            .unwrap();
            let sum = a.axpy(1.0, &b).unwrap();
            let lhs = ell.apply(&sum).unwrap();
            let rhs = ell.apply(&a).unwrap() + ell.apply(&b).unwrap();
            assert!((lhs - rhs).abs() < 1e-12, "kind {kind:?}");
        }
    }

    #[test]
    fn rpt_vanishes_at_zero_and_on_traceless_pencils() {
        let p = disc();
        let ell = random_functional(FunctionalKind::Rpt, &p, 1, 5);
        let zero = ell.apply(&MatrixTuple::zeros(2, 1)).unwrap();
        assert_eq!(zero, 0.0);

        // V = I on the disc: both coefficient matrices are traceless, so
        // tr(Λ_A(x)) = 0 for every scalar x.
        let ell = LinearFunctional::Rpt {
            level: 1,
            weight: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            pencil: p.coefficients().clone(),
        };
        for x in [[0.4, -0.9], [1.3, 0.2]] {
            let v = ell.apply(&MatrixTuple::from_scalars(&x)).unwrap();
            assert!(v.abs() < 1e-14);
        }
    }

    #[test]
    fn random_functional_is_reproducible_and_bounded() {
        let p = disc();
        let a = random_functional(FunctionalKind::Rc, &p, 3, 99);
        let b = random_functional(FunctionalKind::Rc, &p, 3, 99);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        if let LinearFunctional::Rc { coeffs, .. } = &a {
            assert!(coeffs
                .iter()
                .flatten()
                .all(|c| (-2.0..=2.0).contains(c)));
        }

        let v = random_functional(FunctionalKind::Rpt, &p, 2, 12);
        if let LinearFunctional::Rpt { weight, .. } = &v {
            for (i, row) in weight.iter().enumerate() {
                for (j, &w) in row.iter().enumerate() {
                    if j < i {
                        assert_eq!(w, 0.0, "lower triangle must be zero");
                    }
                    assert!((-2.0..=2.0).contains(&w));
                }
            }
        }
    }

    #[test]
    fn level_mismatch_is_an_error() {
        let p = disc();
        let ell = random_functional(FunctionalKind::Rc, &p, 2, 3);
        let x = MatrixTuple::zeros(2, 3);
        assert!(matches!(
            ell.apply(&x),
            Err(PencilError::LevelMismatch { .. })
        ));
    }

    #[test]
    fn random_pencil_is_reproducible_and_certified() {
        let cfg = PencilGenConfig::new(2, 3, 42);
        let a = random_pencil(&cfg).unwrap();
        let b = random_pencil(&cfg).unwrap();
        assert_eq!(a.coefficients(), b.coefficients());
        assert_eq!(a.irreducible_flag(), Some(true));
        assert_eq!(a.bounded_flag(), Some(true));
    }

    #[test]
    fn named_pencils_are_bounded() {
        assert!(LinearPencil::free_disc().is_bounded().unwrap());
        assert!(LinearPencil::free_simplex(2).is_bounded().unwrap());
        assert!(LinearPencil::free_simplex(3).is_bounded().unwrap());
        // an all-zero coefficient never binds
        let zero = LinearPencil::new(MatrixTuple::zeros(1, 2));
        assert!(!zero.is_bounded().unwrap());
    }

    #[test]
    fn one_variable_generation_fails_cleanly() {
        // a lone 1×1 coefficient carves a half-line (never bounded) and a
        // lone symmetric matrix of order ≥ 2 always has reducing
        // eigenspaces, so one-variable requests must hit the retry cap
        // rather than loop
        for d in [1usize, 2] {
            let mut cfg = PencilGenConfig::new(1, d, 5);
            cfg.retry_cap = 40;
            assert!(matches!(
                random_pencil(&cfg),
                Err(PencilError::GenerationFailure(40))
            ));
        }
    }

    #[test]
    fn one_variable_interval_boundedness() {
        // two constraint rows make the level-1 set a bounded interval
        let p = LinearPencil::new(
            MatrixTuple::new(vec![SymMatrix::from_diagonal(&[2.0, -4.0])]).unwrap(),
        );
        assert!(p.is_bounded().unwrap());
        // the interval is [-1/4, 1/2]
        assert!(p.is_member(&MatrixTuple::from_scalars(&[0.5]), 1e-9).unwrap());
        assert!(p.is_member(&MatrixTuple::from_scalars(&[-0.25]), 1e-9).unwrap());
        assert!(!p.is_member(&MatrixTuple::from_scalars(&[0.51]), 1e-9).unwrap());
        assert!(!p.is_member(&MatrixTuple::from_scalars(&[-0.26]), 1e-9).unwrap());

        // dropping the negative row leaves a half-line
        let half = LinearPencil::new(
            MatrixTuple::new(vec![SymMatrix::from_diagonal(&[2.0])]).unwrap(),
        );
        assert!(!half.is_bounded().unwrap());
    }

    #[test]
    fn pencil_serde_roundtrip() {
        let p = disc();
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains("\"g\":2") && json.contains("\"d\":2"));
        let back: LinearPencil = serde_json::from_str(&json).unwrap();
        assert_eq!(back.coefficients(), p.coefficients());
        // cached flags do not survive the wire
        assert_eq!(back.irreducible_flag(), None);
    }
}
