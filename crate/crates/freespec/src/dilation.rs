//! Maximal 1-dilations and decomposition into free extreme points.
//!
//! Starting from any member `X` of a bounded free spectrahedron, each step
//! borders the current tuple with a column `c·β̂` and a new diagonal `γ̂`:
//! `β̂` is a random unit solution of the Arveson linear system (so the
//! bordered tuple can stay inside the set at all), `c` maximizes the
//! border scale, and `γ̂` optimizes a random linear functional over the
//! face of admissible tails, making it a classical extreme point of that
//! face with probability 1. Every step grows the kernel of the
//! evaluation, and after at most `μ ≤ ng` steps the result is an Arveson
//! extreme point one block-diagonalization away from free extreme
//! summands. Compressing back onto the original space expresses `X` as a
//! matrix convex combination `Σ V_j^T Z^j V_j` whose summand sizes total
//! `n + k ≤ n(g+1)`.

use nalgebra::DMatrix;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extremality::{
    self, ExtremeVerdict, IllConditioned, KernelData, ZeroVerdict,
};
use crate::matcore::{self, MatrixTuple, SymMatrix};
use crate::pencil::{LinearPencil, PencilError};
use crate::solver::{self, SolverError};

/// Membership slack allowed for assembled dilations.
const MEMBERSHIP_TOL: f64 = 1e-7;
/// Residual allowed on `ker L_A(Y) ⊆ ker Λ_A(β̂^T)` for a chosen direction.
const BETA_KERNEL_TOL: f64 = 1e-6;
/// Relative eigenvalue gap that separates commutant clusters when
/// splitting a reducible tuple.
const CLUSTER_GAP: f64 = 1e-7;
/// Fresh-β̂ retries after a step fails its progress check.
const STALL_RETRIES: usize = 5;

#[derive(Debug, Error)]
pub enum DilationError {
    #[error("dilation step stalled: kernel failed to grow after {retries} fresh directions")]
    Stalled { retries: usize },
    #[error("step cap exceeded: {steps} steps but the bound is ng = {cap}; the tail optimizer was likely not extreme")]
    StepCapExceeded { steps: usize, cap: usize },
    #[error("assembled dilation left the spectrahedron (min eigenvalue slack {slack:.3e})")]
    LeftTheSet { slack: f64 },
    #[error("numerical failure in {stage}: residual {residual:.3e} exceeds {limit:.3e}")]
    ResidualTooLarge {
        stage: &'static str,
        residual: f64,
        limit: f64,
    },
    #[error("block split failed: no eigenvalue cluster structure after {0} attempts")]
    SplitFailed(usize),
    #[error(transparent)]
    IllConditioned(#[from] IllConditioned),
    #[error(transparent)]
    Mat(#[from] crate::matcore::MatError),
    #[error(transparent)]
    Pencil(#[from] PencilError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// One maximal 1-dilation step.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DilationStep {
    /// Level of the tuple being dilated.
    pub level: usize,
    /// Chosen direction, one column per coordinate.
    pub beta: Vec<Vec<f64>>,
    /// Optimal border scale `c_j`.
    pub scale: f64,
    /// Optimal tail `γ̂_j ∈ ℝ^g`.
    pub tail: Vec<f64>,
    pub kernel_before: usize,
    pub kernel_after: usize,
    /// The dilated tuple this step produced.
    pub result: MatrixTuple,
}

/// The full trace of a dilation run: the Arveson dilation itself plus,
/// once extracted, the matrix convex combination it encodes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DilationCertificate {
    pub start: MatrixTuple,
    /// Solution-space dimension of the Arveson system at the start; the
    /// a-priori bound on the number of steps.
    pub mu: usize,
    pub steps: Vec<DilationStep>,
    /// The Arveson extreme dilation `Y^k` at level `n + k`.
    pub final_point: MatrixTuple,
    /// Irreducible summands after block-diagonalization.
    pub summands: Vec<MatrixTuple>,
    /// Contractions `V_j`, row blocks of `U^T P`; `n_j × n` each.
    pub contractions: Vec<Vec<Vec<f64>>>,
    /// Classification of each summand; all should be free extreme.
    pub summand_verdicts: Vec<ExtremeVerdict>,
    pub partition_residual: Option<f64>,
    pub reconstruction_residual: Option<f64>,
}

impl DilationCertificate {
    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    pub fn summand_sizes(&self) -> Vec<usize> {
        self.summands.iter().map(MatrixTuple::order).collect()
    }

    pub fn all_summands_free_extreme(&self) -> bool {
        !self.summand_verdicts.is_empty()
            && self
                .summand_verdicts
                .iter()
                .all(|v| *v == ExtremeVerdict::FreeExtreme)
    }

    pub fn contraction_matrices(&self) -> Vec<DMatrix<f64>> {
        self.contractions
            .iter()
            .map(|rows| {
                let r = rows.len();
                let c = rows.first().map_or(0, Vec::len);
                DMatrix::from_fn(r, c, |i, j| rows[i][j])
            })
            .collect()
    }
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Draws a unit-norm element of the Arveson-system solution space, or
/// `None` when the space is trivial (the point is already Arveson
/// extreme). Each coordinate of the result is an n×1 block.
pub fn pick_beta(
    pencil: &LinearPencil,
    y: &MatrixTuple,
    kernel: &KernelData,
    rng: &mut ChaCha8Rng,
) -> Result<Option<Vec<DMatrix<f64>>>, DilationError> {
    let (nullity, basis) = extremality::arveson_nullspace_refined(pencil, y, kernel)?;
    if nullity == 0 {
        return Ok(None);
    }
    let n = y.order();
    let g = pencil.var_count();
    let width = basis.ncols();
    loop {
        let coeffs: Vec<f64> = (0..width).map(|_| standard_normal(rng)).collect();
        let mut flat = vec![0.0; n * g];
        for (q, &c) in coeffs.iter().enumerate() {
            for (row, f) in flat.iter_mut().enumerate() {
                *f += c * basis[(row, q)];
            }
        }
        let norm = flat.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue; // essentially-zero draw, resample
        }
        let beta: Vec<DMatrix<f64>> = (0..g)
            .map(|i| DMatrix::from_fn(n, 1, |r, _| flat[i * n + r] / norm))
            .collect();
        // the direction must annihilate the kernel, up to tolerance
        if kernel.dim > 0 {
            let lam = pencil.lambda_blocks(&beta)?;
            let residual = (lam.transpose() * &kernel.basis).norm();
            if residual > BETA_KERNEL_TOL {
                return Err(DilationError::ResidualTooLarge {
                    stage: "beta kernel containment",
                    residual,
                    limit: BETA_KERNEL_TOL,
                });
            }
        }
        return Ok(Some(beta));
    }
}

/// Runs one maximal 1-dilation from `y` along `beta`: maximizes the
/// border scale, then drives the tail to a face extreme point along a
/// random direction, and assembles the bordered tuple. Fails if the
/// result leaves the set or its kernel does not grow.
pub fn maximal_one_dilation(
    pencil: &LinearPencil,
    y: &MatrixTuple,
    beta: &[DMatrix<f64>],
    kernel: &KernelData,
    rng: &mut ChaCha8Rng,
) -> Result<DilationStep, DilationError> {
    let g = pencil.var_count();
    let n = y.order();
    let (scale, gamma_star, _) =
        solver::maximize_dilation_alpha(pencil, y, beta, &kernel.basis)?;
    let direction: Vec<f64> = (0..g).map(|_| standard_normal(rng)).collect();
    let tail = solver::maximize_gamma(
        pencil,
        y,
        scale,
        beta,
        &kernel.basis,
        &gamma_star,
        &direction,
    )?;

    let items: Vec<SymMatrix> = (0..g)
        .map(|i| {
            let mut m = DMatrix::zeros(n + 1, n + 1);
            m.view_mut((0, 0), (n, n)).copy_from(y.item(i).as_mat());
            for r in 0..n {
                m[(r, n)] = scale * beta[i][(r, 0)];
                m[(n, r)] = scale * beta[i][(r, 0)];
            }
            m[(n, n)] = tail[i];
            SymMatrix::new(m).expect("finite dilation block")
        })
        .collect();
    let result = MatrixTuple::new(items).expect("consistent dilation blocks");

    let l = pencil.evaluate(&result)?;
    let min_eig = l.min_eigenvalue()?;
    if min_eig < -MEMBERSHIP_TOL {
        return Err(DilationError::LeftTheSet { slack: min_eig });
    }
    let kernel_after = extremality::kernel_of(pencil, &result)?;
    if kernel_after.verdict == ZeroVerdict::IllConditioned {
        return Err(IllConditioned { stage: "dilated kernel" }.into());
    }
    if kernel_after.dim <= kernel.dim {
        return Err(DilationError::Stalled { retries: 0 });
    }
    Ok(DilationStep {
        level: n,
        beta: beta
            .iter()
            .map(|b| b.column(0).iter().copied().collect())
            .collect(),
        scale,
        tail,
        kernel_before: kernel.dim,
        kernel_after: kernel_after.dim,
        result,
    })
}

/// Iterates maximal 1-dilations until the Arveson system has only the
/// zero solution. The step count is capped at `ng`; termination within
/// `μ` steps is expected whenever every tail comes out extreme, so
/// blowing the cap is reported as an error rather than truncated.
/// The returned certificate has no summand split yet.
pub fn dilate_to_arveson(
    pencil: &LinearPencil,
    x: &MatrixTuple,
    rng: &mut ChaCha8Rng,
) -> Result<DilationCertificate, DilationError> {
    let n = x.order();
    let g = pencil.var_count();
    let cap = n * g;

    let kernel0 = extremality::kernel_of(pencil, x)?;
    if kernel0.verdict == ZeroVerdict::IllConditioned {
        return Err(IllConditioned { stage: "start kernel" }.into());
    }
    let (mu, _) = extremality::arveson_nullspace(pencil, x, &kernel0)?;

    let mut current = x.clone();
    let mut kernel = kernel0;
    let mut steps: Vec<DilationStep> = Vec::new();
    loop {
        let Some(beta) = pick_beta(pencil, &current, &kernel, rng)? else {
            break; // Arveson extreme
        };
        if steps.len() >= cap {
            return Err(DilationError::StepCapExceeded {
                steps: steps.len() + 1,
                cap,
            });
        }
        let mut step = None;
        let mut attempt_beta = beta;
        for retry in 0..=STALL_RETRIES {
            match maximal_one_dilation(pencil, &current, &attempt_beta, &kernel, rng) {
                Ok(s) => {
                    step = Some(s);
                    break;
                }
                Err(DilationError::Stalled { .. }) if retry < STALL_RETRIES => {
                    match pick_beta(pencil, &current, &kernel, rng)? {
                        Some(b) => attempt_beta = b,
                        None => break,
                    }
                }
                Err(e) => return Err(e),
            }
        }
        let Some(step) = step else {
            if extremality::arveson_system_nullity(pencil, &current, &kernel)? == 0 {
                break;
            }
            return Err(DilationError::Stalled {
                retries: STALL_RETRIES,
            });
        };
        current = step.result.clone();
        kernel = extremality::kernel_of(pencil, &current)?;
        steps.push(step);
    }

    Ok(DilationCertificate {
        start: x.clone(),
        mu,
        steps,
        final_point: current,
        summands: Vec::new(),
        contractions: Vec::new(),
        summand_verdicts: Vec::new(),
        partition_residual: None,
        reconstruction_residual: None,
    })
}

/// Splits a tuple into irreducible direct summands: finds the symmetric
/// commutant, eigendecomposes a random element of it, groups eigenvector
/// clusters into invariant subspaces, and recurses on the diagonal
/// blocks. Returns the orthogonal change of basis `U` (so `U^T Y U` is
/// block diagonal) together with the summands in block order.
pub fn split_irreducible(
    y: &MatrixTuple,
    rng: &mut ChaCha8Rng,
) -> Result<(DMatrix<f64>, Vec<MatrixTuple>), DilationError> {
    let n = y.order();
    let commutant = extremality::symmetric_commutant_basis(y)?;
    if commutant.len() <= 1 {
        return Ok((DMatrix::identity(n, n), vec![y.clone()]));
    }

    const ATTEMPTS: usize = 5;
    'attempt: for _ in 0..ATTEMPTS {
        let mut z = DMatrix::zeros(n, n);
        for zb in &commutant {
            z += zb.as_mat().scale(standard_normal(rng));
        }
        let z = SymMatrix::new(z).expect("finite commutant element");
        let (spec, vecs) = matcore::sym_eig(&z)?;
        // re-sort ascending by value for clustering
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| spec.values[a].partial_cmp(&spec.values[b]).unwrap());
        let sorted_vals: Vec<f64> = order.iter().map(|&i| spec.values[i]).collect();
        let spread = sorted_vals[n - 1] - sorted_vals[0];
        if spread <= 0.0 {
            continue; // the element was a multiple of the identity
        }
        let mut cluster_sizes = Vec::new();
        let mut size = 1;
        for w in sorted_vals.windows(2) {
            if w[1] - w[0] > CLUSTER_GAP * spread {
                cluster_sizes.push(size);
                size = 1;
            } else {
                size += 1;
            }
        }
        cluster_sizes.push(size);
        if cluster_sizes.len() < 2 {
            continue;
        }
        let q = DMatrix::from_fn(n, n, |r, c| vecs[(r, order[c])]);
        let rotated = y.conjugate(&q)?;
        // off-block residual must vanish for a genuine reducing split
        let mut off = 0.0f64;
        {
            let mut row0 = 0;
            for &sz in &cluster_sizes {
                for item in rotated.items() {
                    for r in row0..row0 + sz {
                        for c in 0..n {
                            if !(row0..row0 + sz).contains(&c) {
                                off += item[(r, c)] * item[(r, c)];
                            }
                        }
                    }
                }
                row0 += sz;
            }
        }
        let off = off.sqrt();
        let limit = 1e-8 * (1.0 + y.norm());
        if off > limit {
            continue 'attempt;
        }

        // recurse on each block
        let mut u = q;
        let mut summands = Vec::new();
        let mut row0 = 0;
        for &sz in &cluster_sizes {
            let block_items: Vec<SymMatrix> = rotated
                .items()
                .iter()
                .map(|m| {
                    SymMatrix::new(m.view((row0, row0), (sz, sz)).into_owned())
                        .expect("finite block")
                })
                .collect();
            let block = MatrixTuple::new(block_items).expect("consistent block");
            let (ub, mut sub) = split_irreducible(&block, rng)?;
            // fold the sub-rotation into U's column block
            let cols = u.columns(row0, sz).into_owned();
            u.columns_mut(row0, sz).copy_from(&(cols * &ub));
            summands.append(&mut sub);
            row0 += sz;
        }
        let ortho = (u.transpose() * &u - DMatrix::identity(n, n)).norm();
        if ortho > 1e-10 {
            return Err(DilationError::ResidualTooLarge {
                stage: "split orthogonality",
                residual: ortho,
                limit: 1e-10,
            });
        }
        return Ok((u, summands));
    }
    Err(DilationError::SplitFailed(ATTEMPTS))
}

/// Completes a certificate: given the block-diagonalizing `U` and the
/// summands of the final dilation, compresses back onto the original
/// space (`V_j` = j-th row block of `U^T P` with `P` the inclusion of the
/// first n coordinates), prunes summands that receive no weight, checks
/// the partition of identity and the reconstruction of the start point,
/// and classifies every summand.
pub fn extract_combination(
    pencil: &LinearPencil,
    mut cert: DilationCertificate,
    u: &DMatrix<f64>,
    summands: Vec<MatrixTuple>,
) -> Result<DilationCertificate, DilationError> {
    let n = cert.start.order();
    let total = cert.final_point.order();
    debug_assert_eq!(u.nrows(), total);

    // U^T P: the first n columns of U^T
    let ut_p = u.transpose().columns(0, n).into_owned();
    let mut kept: Vec<(MatrixTuple, DMatrix<f64>)> = Vec::new();
    let mut row0 = 0;
    for z in summands {
        let sz = z.order();
        let v = ut_p.rows(row0, sz).into_owned();
        row0 += sz;
        if v.norm() > 1e-10 {
            kept.push((z, v));
        }
    }

    let mut partition = DMatrix::zeros(n, n);
    for (_, v) in &kept {
        partition += v.transpose() * v;
    }
    let partition_residual = (&partition - DMatrix::identity(n, n)).norm();
    if partition_residual > 1e-8 {
        return Err(DilationError::ResidualTooLarge {
            stage: "partition of identity",
            residual: partition_residual,
            limit: 1e-8,
        });
    }

    let mut reconstruction_residual = 0.0f64;
    for (i, xi) in cert.start.items().iter().enumerate() {
        let mut sum = DMatrix::zeros(n, n);
        for (z, v) in &kept {
            sum += v.transpose() * z.item(i).as_mat() * v;
        }
        let res = (&sum - xi.as_mat()).norm();
        reconstruction_residual = reconstruction_residual.max(res);
    }
    let recon_limit = 1e-6 * (1.0 + cert.start.norm());
    if reconstruction_residual > recon_limit {
        return Err(DilationError::ResidualTooLarge {
            stage: "reconstruction",
            residual: reconstruction_residual,
            limit: recon_limit,
        });
    }

    let mut verdicts = Vec::with_capacity(kept.len());
    for (z, _) in &kept {
        let c = extremality::classify(pencil, z)?;
        verdicts.push(c.verdict);
    }

    cert.summands = kept.iter().map(|(z, _)| z.clone()).collect();
    cert.contractions = kept
        .iter()
        .map(|(_, v)| {
            (0..v.nrows())
                .map(|r| v.row(r).iter().copied().collect())
                .collect()
        })
        .collect();
    cert.summand_verdicts = verdicts;
    cert.partition_residual = Some(partition_residual);
    cert.reconstruction_residual = Some(reconstruction_residual);
    Ok(cert)
}

/// The whole pipeline: dilate to an Arveson extreme point, split it into
/// irreducible summands, and extract the matrix convex combination.
///
/// The dilation is randomized and succeeds with probability 1; an unlucky
/// draw can land on a final point that sits just off the reducible
/// stratum, where no clean block split exists. Such runs are retried with
/// fresh directions rather than forced through.
pub fn decompose(
    pencil: &LinearPencil,
    x: &MatrixTuple,
    rng: &mut ChaCha8Rng,
) -> Result<DilationCertificate, DilationError> {
    const PIPELINE_RETRIES: usize = 4;
    let mut last = None;
    for _ in 0..PIPELINE_RETRIES {
        let outcome = dilate_to_arveson(pencil, x, rng).and_then(|cert| {
            let (u, summands) = split_irreducible(&cert.final_point, rng)?;
            extract_combination(pencil, cert, &u, summands)
        });
        match outcome {
            Ok(cert) => return Ok(cert),
            Err(e @ (DilationError::SplitFailed(_) | DilationError::ResidualTooLarge { .. })) => {
                last = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt ran"))
}

/// Recomputes the residuals of a serialized certificate without rerunning
/// any optimization: membership of the final point and summands, the
/// partition of identity, and the reconstruction of the start.
pub fn verify_certificate(
    pencil: &LinearPencil,
    cert: &DilationCertificate,
) -> Result<(), DilationError> {
    let n = cert.start.order();
    if !pencil.is_member(&cert.final_point, MEMBERSHIP_TOL)? {
        return Err(DilationError::LeftTheSet { slack: f64::NAN });
    }
    let vs = cert.contraction_matrices();
    let mut partition = DMatrix::zeros(n, n);
    for v in &vs {
        partition += v.transpose() * v;
    }
    let pr = (&partition - DMatrix::identity(n, n)).norm();
    if pr > 1e-8 {
        return Err(DilationError::ResidualTooLarge {
            stage: "partition of identity",
            residual: pr,
            limit: 1e-8,
        });
    }
    let mut recon = 0.0f64;
    for (i, xi) in cert.start.items().iter().enumerate() {
        let mut sum = DMatrix::zeros(n, n);
        for (z, v) in cert.summands.iter().zip(&vs) {
            sum += v.transpose() * z.item(i).as_mat() * v;
        }
        recon = recon.max((&sum - xi.as_mat()).norm());
    }
    let limit = 1e-6 * (1.0 + cert.start.norm());
    if recon > limit {
        return Err(DilationError::ResidualTooLarge {
            stage: "reconstruction",
            residual: recon,
            limit,
        });
    }
    for z in &cert.summands {
        if !pencil.is_member(z, MEMBERSHIP_TOL)? {
            return Err(DilationError::LeftTheSet { slack: f64::NAN });
        }
    }
    Ok(())
}
