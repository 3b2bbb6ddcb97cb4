//! Extreme-point analysis: which members of a free spectrahedron are
//! Euclidean (classical) extreme, Arveson extreme, or free extreme.
//!
//! A point `X` with kernel projection `P` (orthonormal basis of
//! `ker L_A(X)`) is Arveson extreme iff the linear system
//! `Λ_A(β^T) P = 0` over vector tuples `β ∈ M_{n×1}(ℝ)^g` has only the
//! zero solution, and Euclidean extreme iff the analogous system over
//! symmetric tuples does. Free extreme means irreducible and Arveson
//! extreme, and irreducibility over the reals is decided by the dimension
//! of the symmetric commutant. Every rank decision runs through one
//! protocol ([`decide_zeros`]) with per-computation tolerance pairs:
//!
//! | computation        | ε1        | ε2        | diagnostic      |
//! |--------------------|-----------|-----------|-----------------|
//! | kernel dimension   | 1e-6      | 1e-5      | eigenvalues     |
//! | free extreme       | 1e-3      | 10^-2.5   | singular values |
//! | Euclidean extreme  | 1e-3      | 10^-2.5   | singular values |
//! | irreducibility     | 10^-4.5   | 1e-4      | singular values |
//!
//! A spectrum that only passes the relaxed thresholds (`ε·10^α`, with
//! `α = 2` for eigenvalues and `α = 1` for singular values) is flagged
//! ill conditioned rather than decided.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matcore::{self, MatError, MatrixTuple, SpectrumKind, SpectrumReport, SymMatrix};
use crate::pencil::{LinearPencil, PencilError};

/// A zero-decision that could not be made reliably.
#[derive(Debug, Error)]
#[error("ill-conditioned {stage} spectrum: zeros cannot be decided reliably")]
pub struct IllConditioned {
    pub stage: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroVerdict {
    Clean,
    IllConditioned,
}

/// Tolerances for deciding which trailing spectrum entries are zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZeroDecisionPolicy {
    pub eps1: f64,
    pub eps2: f64,
    /// Relaxation exponent: thresholds widen to `ε·10^α` for the
    /// ill-conditioned band. 2 for eigenvalues, 1 for singular values.
    pub relax_exponent: f64,
    pub kind: SpectrumKind,
}

impl ZeroDecisionPolicy {
    /// Kernel-dimension decisions on eigenvalues of `L_A(X)`.
    pub fn kernel() -> Self {
        Self {
            eps1: 1e-6,
            eps2: 1e-5,
            relax_exponent: 2.0,
            kind: SpectrumKind::Eigenvalues,
        }
    }

    /// Free-extreme (Arveson system) decisions on singular values.
    pub fn free_extreme() -> Self {
        Self {
            eps1: 1e-3,
            eps2: 10f64.powf(-2.5),
            relax_exponent: 1.0,
            kind: SpectrumKind::SingularValues,
        }
    }

    /// Euclidean-extreme system decisions on singular values.
    pub fn euclidean_extreme() -> Self {
        Self::free_extreme()
    }

    /// Symmetric-commutant decisions on singular values.
    pub fn irreducibility() -> Self {
        Self {
            eps1: 10f64.powf(-4.5),
            eps2: 1e-4,
            relax_exponent: 1.0,
            kind: SpectrumKind::SingularValues,
        }
    }
}

/// The full set of tolerance policies used by one classification run.
/// Campaigns and the CLI can override individual entries; everything else
/// uses the defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Policies {
    pub kernel: ZeroDecisionPolicy,
    pub free_extreme: ZeroDecisionPolicy,
    pub euclidean: ZeroDecisionPolicy,
    pub irreducibility: ZeroDecisionPolicy,
}

impl Default for Policies {
    fn default() -> Self {
        Self {
            kernel: ZeroDecisionPolicy::kernel(),
            free_extreme: ZeroDecisionPolicy::free_extreme(),
            euclidean: ZeroDecisionPolicy::euclidean_extreme(),
            irreducibility: ZeroDecisionPolicy::irreducibility(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroDecision {
    pub zeros: usize,
    pub verdict: ZeroVerdict,
}

/// Two-stage zero count on a spectrum sorted by descending absolute value.
///
/// First pass: the smallest index `j ≥ 1` with `|σ_j| < ε1` and
/// `|σ_j|/|σ_{j-1}| < ε2` makes every entry from `j` on zero. Failing
/// that, a second pass with both thresholds relaxed by `10^α` reports the
/// numerics as ill conditioned instead of deciding. If neither pass finds
/// an index, nothing is zero. An all-small leading entry (`|σ_0| < ε1`)
/// means the whole spectrum is zero; that cannot arise for evaluations of
/// monic pencils at feasible points, but zero maps hit it.
pub fn decide_zeros(spectrum: &SpectrumReport, policy: &ZeroDecisionPolicy) -> ZeroDecision {
    debug_assert_eq!(spectrum.kind, policy.kind, "policy/spectrum kind mismatch");
    let sigma = &spectrum.values;
    if sigma.is_empty() {
        return ZeroDecision {
            zeros: 0,
            verdict: ZeroVerdict::Clean,
        };
    }
    let scan = |eps1: f64, eps2: f64| -> Option<usize> {
        for j in 1..sigma.len() {
            let prev = sigma[j - 1].abs();
            let cur = sigma[j].abs();
            let ratio = if prev == 0.0 { 0.0 } else { cur / prev };
            if cur < eps1 && ratio < eps2 {
                return Some(sigma.len() - j);
            }
        }
        None
    };
    if sigma[0].abs() < policy.eps1 {
        return ZeroDecision {
            zeros: sigma.len(),
            verdict: ZeroVerdict::Clean,
        };
    }
    if let Some(zeros) = scan(policy.eps1, policy.eps2) {
        return ZeroDecision {
            zeros,
            verdict: ZeroVerdict::Clean,
        };
    }
    let relax = 10f64.powf(policy.relax_exponent);
    if sigma[0].abs() < policy.eps1 * relax {
        return ZeroDecision {
            zeros: sigma.len(),
            verdict: ZeroVerdict::IllConditioned,
        };
    }
    if let Some(zeros) = scan(policy.eps1 * relax, policy.eps2 * relax) {
        return ZeroDecision {
            zeros,
            verdict: ZeroVerdict::IllConditioned,
        };
    }
    ZeroDecision {
        zeros: 0,
        verdict: ZeroVerdict::Clean,
    }
}

/// Kernel of `L_A(X)`: its dimension, an orthonormal basis, and whether
/// the zero decision was clean.
#[derive(Debug, Clone)]
pub struct KernelData {
    pub dim: usize,
    /// dn × dim, orthonormal columns spanning the kernel.
    pub basis: DMatrix<f64>,
    pub verdict: ZeroVerdict,
}

/// Eigendecomposes `L_A(X)` and applies the kernel policy. An
/// ill-conditioned verdict is carried in the result, not raised.
pub fn kernel_of(pencil: &LinearPencil, x: &MatrixTuple) -> Result<KernelData, PencilError> {
    kernel_of_with(pencil, x, &ZeroDecisionPolicy::kernel())
}

/// [`kernel_of`] under a caller-chosen policy.
pub fn kernel_of_with(
    pencil: &LinearPencil,
    x: &MatrixTuple,
    policy: &ZeroDecisionPolicy,
) -> Result<KernelData, PencilError> {
    let l = pencil.evaluate(x)?;
    let (spectrum, vectors) = matcore::sym_eig(&l)?;
    let decision = decide_zeros(&spectrum, policy);
    let n = spectrum.len();
    let basis = vectors.columns(n - decision.zeros, decision.zeros).into_owned();
    Ok(KernelData {
        dim: decision.zeros,
        basis,
        verdict: decision.verdict,
    })
}

/// Nullity and orthonormal nullspace basis of a linear map given as a
/// matrix, with the zero decision made on its singular values (computed
/// through the Gram matrix so the full right-singular basis is available
/// even for wide systems).
fn nullity_with_basis(
    system: &DMatrix<f64>,
    policy: &ZeroDecisionPolicy,
    stage: &'static str,
) -> Result<(usize, DMatrix<f64>), IllConditioned> {
    let cols = system.ncols();
    if cols == 0 {
        return Ok((0, DMatrix::zeros(0, 0)));
    }
    if system.nrows() == 0 {
        return Ok((cols, DMatrix::identity(cols, cols)));
    }
    let gram = SymMatrix::new(system.transpose() * system).expect("finite gram");
    let (eigs, vectors) = matcore::sym_eig(&gram).map_err(|_| IllConditioned { stage })?;
    let singular = SpectrumReport::new(
        eigs.values.iter().map(|&l| l.max(0.0).sqrt()).collect(),
        SpectrumKind::SingularValues,
    );
    let decision = decide_zeros(&singular, policy);
    if decision.verdict == ZeroVerdict::IllConditioned {
        return Err(IllConditioned { stage });
    }
    let basis = vectors.columns(cols - decision.zeros, decision.zeros).into_owned();
    Ok((decision.zeros, basis))
}

/// The Arveson system matrix: the map `β ↦ Λ_A(β^T) P` over vector
/// tuples, flattened to `(d·k) × (n·g)` with `β` laid out coordinate by
/// coordinate.
fn arveson_system(
    pencil: &LinearPencil,
    n: usize,
    kernel: &KernelData,
) -> DMatrix<f64> {
    let d = pencil.order();
    let g = pencil.var_count();
    let k = kernel.dim;
    let mut system = DMatrix::zeros(d * k, n * g);
    for i in 0..g {
        for r in 0..n {
            let mut e = DMatrix::zeros(1, n);
            e[(0, r)] = 1.0;
            let lam = matcore::kron(pencil.coefficients().item(i).as_mat(), &e);
            let image = lam * &kernel.basis; // d × k
            let col = i * n + r;
            for kk in 0..k {
                for row in 0..d {
                    system[(kk * d + row, col)] = image[(row, kk)];
                }
            }
        }
    }
    system
}

/// Solution-space dimension of the Arveson linear system. Zero means `X`
/// is an Arveson extreme point; for trivial kernels the system is vacuous
/// and the nullity is the full `n·g`. This dimension is also the dilation
/// step bound μ.
pub fn arveson_system_nullity(
    pencil: &LinearPencil,
    x: &MatrixTuple,
    kernel: &KernelData,
) -> Result<usize, IllConditioned> {
    Ok(arveson_nullspace(pencil, x, kernel)?.0)
}

/// As [`arveson_system_nullity`] but also returning an orthonormal basis
/// of the solution space, each column a flattened vector tuple.
pub fn arveson_nullspace(
    pencil: &LinearPencil,
    x: &MatrixTuple,
    kernel: &KernelData,
) -> Result<(usize, DMatrix<f64>), IllConditioned> {
    arveson_nullspace_with(pencil, x, kernel, &ZeroDecisionPolicy::free_extreme())
}

/// [`arveson_nullspace`] under a caller-chosen policy.
pub fn arveson_nullspace_with(
    pencil: &LinearPencil,
    x: &MatrixTuple,
    kernel: &KernelData,
    policy: &ZeroDecisionPolicy,
) -> Result<(usize, DMatrix<f64>), IllConditioned> {
    let n = x.order();
    let g = pencil.var_count();
    if kernel.dim == 0 {
        return Ok((n * g, DMatrix::identity(n * g, n * g)));
    }
    let system = arveson_system(pencil, n, kernel);
    nullity_with_basis(&system, policy, "free extreme")
}

/// Arveson nullspace split two ways: the solution-space dimension under
/// the published tolerance (the dilation step bound μ) together with the
/// numerically tight part of the nullspace. Dilation directions must
/// annihilate the kernel to solver precision, not merely to the
/// classification tolerance, or every later step inherits the slack.
pub fn arveson_nullspace_refined(
    pencil: &LinearPencil,
    x: &MatrixTuple,
    kernel: &KernelData,
) -> Result<(usize, DMatrix<f64>), IllConditioned> {
    let n = x.order();
    let g = pencil.var_count();
    if kernel.dim == 0 {
        return Ok((n * g, DMatrix::identity(n * g, n * g)));
    }
    let system = arveson_system(pencil, n, kernel);
    let gram = SymMatrix::new(system.transpose() * &system).expect("finite gram");
    let (eigs, _) =
        matcore::sym_eig(&gram).map_err(|_| IllConditioned { stage: "free extreme" })?;
    let singular = SpectrumReport::new(
        eigs.values.iter().map(|&l| l.max(0.0).sqrt()).collect(),
        SpectrumKind::SingularValues,
    );
    let decision = decide_zeros(&singular, &ZeroDecisionPolicy::free_extreme());
    if decision.verdict == ZeroVerdict::IllConditioned {
        return Err(IllConditioned { stage: "free extreme" });
    }
    let sigma_max = singular.values.first().copied().unwrap_or(0.0);
    // the Gram route resolves singular values down to ~1e-8 relative
    let tight_tol = 1e-7 * sigma_max.max(1.0);
    let tight = singular.values.iter().filter(|&&v| v <= tight_tol).count();
    if decision.zeros > 0 && tight == 0 {
        return Err(IllConditioned { stage: "arveson margin" });
    }
    // basis accuracy matters more than the count: take the null vectors
    // from a direct SVD of the system, completing with the orthogonal
    // complement when the system is wide
    let basis =
        tight_nullspace(&system, tight).map_err(|_| IllConditioned { stage: "free extreme" })?;
    Ok((decision.zeros, basis))
}

/// Orthonormal basis of the `count` rightmost (smallest singular value)
/// directions of a linear system, computed from a direct SVD so the
/// vectors are accurate to machine precision. Wide systems complete the
/// basis with the orthogonal complement of the thin factor.
fn tight_nullspace(system: &DMatrix<f64>, count: usize) -> Result<DMatrix<f64>, MatError> {
    let cols = system.ncols();
    let rows = system.nrows();
    if count == 0 {
        return Ok(DMatrix::zeros(cols, 0));
    }
    let parts = matcore::svd(system)?;
    let thin = parts.values.len();
    let from_thin = count.min(thin).min(cols);
    let mut columns: Vec<DMatrix<f64>> = Vec::new();
    if rows < cols {
        let missing = cols - thin;
        let projector = DMatrix::identity(cols, cols) - &parts.v * parts.v.transpose();
        let extra = matcore::orthonormal_basis(&projector, 1e-8)?;
        debug_assert_eq!(extra.ncols(), missing);
        columns.push(extra);
    }
    let deficit = count.saturating_sub(columns.iter().map(|c| c.ncols()).sum::<usize>());
    if deficit > 0 {
        columns.push(parts.v.columns(thin - deficit.min(from_thin), deficit.min(from_thin)).into_owned());
    }
    let total: usize = columns.iter().map(|c| c.ncols()).sum();
    let mut stacked = DMatrix::zeros(cols, total);
    let mut off = 0;
    for c in &columns {
        stacked.columns_mut(off, c.ncols()).copy_from(c);
        off += c.ncols();
    }
    // joint orthonormalization in case the complement and thin parts overlap
    matcore::orthonormal_basis(&stacked, 1e-8)
}

/// Solution-space dimension of the Euclidean system: the same map with
/// `β` ranging over symmetric tuples, `(dn·k) × (g·n(n+1)/2)`.
pub fn euclidean_system_nullity(
    pencil: &LinearPencil,
    x: &MatrixTuple,
    kernel: &KernelData,
) -> Result<usize, IllConditioned> {
    euclidean_system_nullity_with(pencil, x, kernel, &ZeroDecisionPolicy::euclidean_extreme())
}

/// [`euclidean_system_nullity`] under a caller-chosen policy.
pub fn euclidean_system_nullity_with(
    pencil: &LinearPencil,
    x: &MatrixTuple,
    kernel: &KernelData,
    policy: &ZeroDecisionPolicy,
) -> Result<usize, IllConditioned> {
    let n = x.order();
    let g = pencil.var_count();
    let d = pencil.order();
    let k = kernel.dim;
    let unknowns = g * n * (n + 1) / 2;
    if k == 0 {
        return Ok(unknowns);
    }
    let mut system = DMatrix::zeros(d * n * k, unknowns);
    let mut col = 0;
    let w = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..g {
        for r in 0..n {
            for s in 0..=r {
                let mut b = DMatrix::zeros(n, n);
                if r == s {
                    b[(r, r)] = 1.0;
                } else {
                    b[(r, s)] = w;
                    b[(s, r)] = w;
                }
                let lam = matcore::kron(pencil.coefficients().item(i).as_mat(), &b);
                let image = lam * &kernel.basis; // dn × k
                for kk in 0..k {
                    for row in 0..d * n {
                        system[(kk * d * n + row, col)] = image[(row, kk)];
                    }
                }
                col += 1;
            }
        }
    }
    let (nullity, _) = nullity_with_basis(&system, policy, "euclidean")?;
    Ok(nullity)
}

/// Dimension of the symmetric commutant of a tuple: the space of
/// symmetric `Z` with `Z X_i = X_i Z` for every coordinate, decided from
/// the singular values of the stacked commutator map. Dimension 1 means
/// the tuple is irreducible over the reals.
pub fn symmetric_commutant_dim(x: &MatrixTuple) -> Result<usize, IllConditioned> {
    Ok(symmetric_commutant_basis(x)?.len())
}

/// [`symmetric_commutant_dim`] under a caller-chosen policy.
pub fn symmetric_commutant_dim_with(
    x: &MatrixTuple,
    policy: &ZeroDecisionPolicy,
) -> Result<usize, IllConditioned> {
    Ok(symmetric_commutant_basis_with(x, policy)?.len())
}

/// Orthonormal basis of the symmetric commutant, as matrices.
pub fn symmetric_commutant_basis(x: &MatrixTuple) -> Result<Vec<SymMatrix>, IllConditioned> {
    symmetric_commutant_basis_with(x, &ZeroDecisionPolicy::irreducibility())
}

/// [`symmetric_commutant_basis`] under a caller-chosen policy.
pub fn symmetric_commutant_basis_with(
    x: &MatrixTuple,
    policy: &ZeroDecisionPolicy,
) -> Result<Vec<SymMatrix>, IllConditioned> {
    let n = x.order();
    let g = x.count();
    let unknowns = n * (n + 1) / 2;
    let mut system = DMatrix::zeros(g * n * n, unknowns);
    let w = std::f64::consts::FRAC_1_SQRT_2;
    let mut col = 0;
    let mut basis_mats = Vec::with_capacity(unknowns);
    for r in 0..n {
        for s in 0..=r {
            let mut b = DMatrix::zeros(n, n);
            if r == s {
                b[(r, r)] = 1.0;
            } else {
                b[(r, s)] = w;
                b[(s, r)] = w;
            }
            for (i, xi) in x.items().iter().enumerate() {
                let comm = &b * xi.as_mat() - xi.as_mat() * &b;
                for rr in 0..n {
                    for cc in 0..n {
                        system[(i * n * n + rr * n + cc, col)] = comm[(rr, cc)];
                    }
                }
            }
            basis_mats.push(b);
            col += 1;
        }
    }
    let (_, nullspace) = nullity_with_basis(&system, policy, "irreducibility")?;
    let members = nullspace
        .column_iter()
        .map(|coeffs| {
            let mut z = DMatrix::zeros(n, n);
            for (q, b) in basis_mats.iter().enumerate() {
                z += b.scale(coeffs[q]);
            }
            SymMatrix::new(z).expect("finite combination")
        })
        .collect();
    Ok(members)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremeVerdict {
    FreeExtreme,
    ArvesonReducible,
    EuclideanNotArveson,
    NotEuclideanExtreme,
    IllConditioned,
}

impl std::fmt::Display for ExtremeVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ExtremeVerdict::FreeExtreme => "free_extreme",
            ExtremeVerdict::ArvesonReducible => "arveson_reducible",
            ExtremeVerdict::EuclideanNotArveson => "euclidean_not_arveson",
            ExtremeVerdict::NotEuclideanExtreme => "not_euclidean_extreme",
            ExtremeVerdict::IllConditioned => "ill_conditioned",
        };
        f.write_str(s)
    }
}

/// Full classification of one member of a free spectrahedron.
#[derive(Debug, Clone)]
pub struct ExtremeClassification {
    pub verdict: ExtremeVerdict,
    pub kernel: KernelData,
    pub commutant_dim: Option<usize>,
    pub arv_nullity: Option<usize>,
    pub euc_nullity: Option<usize>,
    /// Stages whose zero decisions fell in the ill-conditioned band.
    pub condition_flags: Vec<String>,
}

impl ExtremeClassification {
    pub fn is_reducible(&self) -> Option<bool> {
        self.commutant_dim.map(|d| d > 1)
    }

    /// The flat record consumed by campaign outputs.
    pub fn to_record(&self) -> ClassificationRecord {
        ClassificationRecord {
            verdict: self.verdict,
            k: self.kernel.dim,
            commutant_dim: self.commutant_dim,
            arv_nullity: self.arv_nullity,
            euc_nullity: self.euc_nullity,
            condition_flags: self.condition_flags.clone(),
        }
    }
}

/// Wire form of a classification: `{verdict, k, commutant_dim,
/// arv_nullity, euc_nullity, condition_flags}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub verdict: ExtremeVerdict,
    pub k: usize,
    pub commutant_dim: Option<usize>,
    pub arv_nullity: Option<usize>,
    pub euc_nullity: Option<usize>,
    pub condition_flags: Vec<String>,
}

/// Classifies a member as free extreme, reducible Arveson extreme,
/// Euclidean-but-not-Arveson extreme, or not Euclidean extreme.
///
/// Pipeline: kernel → symmetric commutant → Arveson system → (only if the
/// Arveson system has solutions) Euclidean system. A trivial kernel
/// short-circuits: interior points of bounded spectrahedra are never
/// Euclidean extreme and the systems would be vacuous. Any
/// ill-conditioned stage short-circuits to an ill-conditioned verdict.
pub fn classify(pencil: &LinearPencil, x: &MatrixTuple) -> Result<ExtremeClassification, PencilError> {
    classify_with(pencil, x, &Policies::default())
}

/// [`classify`] under caller-chosen policies.
pub fn classify_with(
    pencil: &LinearPencil,
    x: &MatrixTuple,
    policies: &Policies,
) -> Result<ExtremeClassification, PencilError> {
    let kernel = kernel_of_with(pencil, x, &policies.kernel)?;
    let mut flags = Vec::new();
    let commutant_dim = match symmetric_commutant_dim_with(x, &policies.irreducibility) {
        Ok(d) => Some(d),
        Err(_) => {
            flags.push("commutant".to_string());
            None
        }
    };

    if kernel.verdict == ZeroVerdict::IllConditioned {
        flags.insert(0, "kernel".to_string());
        return Ok(ExtremeClassification {
            verdict: ExtremeVerdict::IllConditioned,
            kernel,
            commutant_dim,
            arv_nullity: None,
            euc_nullity: None,
            condition_flags: flags,
        });
    }
    let Some(cd) = commutant_dim else {
        return Ok(ExtremeClassification {
            verdict: ExtremeVerdict::IllConditioned,
            kernel,
            commutant_dim,
            arv_nullity: None,
            euc_nullity: None,
            condition_flags: flags,
        });
    };

    if kernel.dim == 0 {
        return Ok(ExtremeClassification {
            verdict: ExtremeVerdict::NotEuclideanExtreme,
            kernel,
            commutant_dim,
            arv_nullity: None,
            euc_nullity: None,
            condition_flags: flags,
        });
    }

    let arv = match arveson_nullspace_with(pencil, x, &kernel, &policies.free_extreme) {
        Ok((v, _)) => v,
        Err(_) => {
            flags.push("free_extreme".to_string());
            return Ok(ExtremeClassification {
                verdict: ExtremeVerdict::IllConditioned,
                kernel,
                commutant_dim,
                arv_nullity: None,
                euc_nullity: None,
                condition_flags: flags,
            });
        }
    };

    if arv == 0 {
        let verdict = if cd == 1 {
            ExtremeVerdict::FreeExtreme
        } else {
            ExtremeVerdict::ArvesonReducible
        };
        return Ok(ExtremeClassification {
            verdict,
            kernel,
            commutant_dim,
            arv_nullity: Some(arv),
            euc_nullity: None,
            condition_flags: flags,
        });
    }

    let euc = match euclidean_system_nullity_with(pencil, x, &kernel, &policies.euclidean) {
        Ok(v) => v,
        Err(_) => {
            flags.push("euclidean".to_string());
            return Ok(ExtremeClassification {
                verdict: ExtremeVerdict::IllConditioned,
                kernel,
                commutant_dim,
                arv_nullity: Some(arv),
                euc_nullity: None,
                condition_flags: flags,
            });
        }
    };
    let verdict = if euc == 0 {
        ExtremeVerdict::EuclideanNotArveson
    } else {
        ExtremeVerdict::NotEuclideanExtreme
    };
    Ok(ExtremeClassification {
        verdict,
        kernel,
        commutant_dim,
        arv_nullity: Some(arv),
        euc_nullity: Some(euc),
        condition_flags: flags,
    })
}

/// The Arveson-side solvability count: `gn ≤ Σ_j d_j k_j`, with the
/// irreducible case a single block and the free-polytope case all
/// `d_j = 1`. A necessary condition for Arveson extremality.
pub fn arveson_count_holds(g: usize, n: usize, block_orders: &[usize], block_kernels: &[usize]) -> bool {
    assert_eq!(block_orders.len(), block_kernels.len());
    let rhs: usize = block_orders
        .iter()
        .zip(block_kernels)
        .map(|(d, k)| d * k)
        .sum();
    g * n <= rhs
}

/// The Euclidean-side count: `g(n+1)/2 ≤ Σ_j d_j k_j`, compared without
/// rounding.
pub fn euclidean_count_holds(g: usize, n: usize, block_orders: &[usize], block_kernels: &[usize]) -> bool {
    assert_eq!(block_orders.len(), block_kernels.len());
    let rhs: usize = block_orders
        .iter()
        .zip(block_kernels)
        .map(|(d, k)| d * k)
        .sum();
    g * (n + 1) <= 2 * rhs
}
