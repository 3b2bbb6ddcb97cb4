//! Computing with free spectrahedra: solution sets of linear matrix
//! inequalities `L_A(X) = I - A_1 ⊗ X_1 - … - A_g ⊗ X_g ⪰ 0` evaluated on
//! g-tuples of symmetric matrices of every size.
//!
//! The crate optimizes linear functionals over a fixed matrix level of such
//! a set, classifies the optimizers as free / Arveson / Euclidean extreme
//! points via kernel linear systems, decomposes arbitrary members into
//! matrix convex combinations of free extreme points through maximal
//! 1-dilations, and runs randomized campaigns that tally how often each
//! kind of extreme point occurs.
//!
//! Module map:
//! - [`matcore`]: dense symmetric linear algebra (tuples, Kronecker
//!   products, eigen/SVD, direct sums).
//! - [`pencil`]: monic linear pencils, membership, boundedness, random
//!   pencil and functional generation.
//! - [`solver`]: a dense primal-dual interior-point method for a single
//!   LMI block; every optimization in the crate bottoms out here.
//! - [`extremality`]: kernel analysis, the zero-decision protocol, and the
//!   extreme-point classification pipeline.
//! - [`dilation`]: the Arveson dilation algorithm and the extraction of
//!   matrix convex combinations with their Carathéodory bound.
//! - [`experiments`]: randomized campaigns, tallies, and curve fits.

pub mod dilation;
pub mod experiments;
pub mod extremality;
pub mod matcore;
pub mod pencil;
pub mod solver;

pub use matcore::{MatrixTuple, SpectrumKind, SpectrumReport, SymMatrix};
pub use pencil::{LinearFunctional, LinearPencil, PencilGenConfig};
