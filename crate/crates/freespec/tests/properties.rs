//! Property-based invariants over random inputs.

use nalgebra::DMatrix;
use proptest::prelude::*;

use freespec::matcore::{self, MatrixTuple, SymMatrix};
use freespec::pencil::{FunctionalKind, LinearPencil};
use freespec::solver::{self, LmiProgram, SolveOptions, SolveStatus};

fn sym_matrix(n: usize) -> impl Strategy<Value = SymMatrix> {
    proptest::collection::vec(-1.0f64..1.0, n * n).prop_map(move |vals| {
        SymMatrix::new(DMatrix::from_row_slice(n, n, &vals)).unwrap()
    })
}

fn tuple(g: usize, n: usize) -> impl Strategy<Value = MatrixTuple> {
    proptest::collection::vec(sym_matrix(n), g)
        .prop_map(|items| MatrixTuple::new(items).unwrap())
}

/// A point of the disc's level-n set: scale a random direction back
/// inside the boundary.
fn disc_member(n: usize) -> impl Strategy<Value = MatrixTuple> {
    (tuple(2, n), 0.0f64..1.0).prop_map(|(dir, rho)| {
        let p = LinearPencil::free_disc();
        let lam = p.lambda(&dir).unwrap();
        let (spec, _) = matcore::sym_eig(&lam).unwrap();
        let top = spec.values.iter().copied().fold(f64::MIN, f64::max);
        if top > 1e-9 {
            dir.scale(rho / top)
        } else {
            dir.scale(rho)
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kron_is_bilinear(a in sym_matrix(3), b in sym_matrix(3), c in sym_matrix(2), t in -2.0f64..2.0) {
        let left = matcore::kron(&(a.as_mat() + b.as_mat().scale(t)), c.as_mat());
        let right = matcore::kron(a.as_mat(), c.as_mat())
            + matcore::kron(b.as_mat(), c.as_mat()).scale(t);
        prop_assert!((left - right).norm() < 1e-12);
    }

    #[test]
    fn evaluation_is_affine(x in tuple(2, 2), y in tuple(2, 2), t in 0.0f64..1.0) {
        let p = LinearPencil::free_disc();
        let mix = x.scale(t).axpy(1.0 - t, &y).unwrap();
        let lhs = p.evaluate(&mix).unwrap();
        let rhs = p.evaluate(&x).unwrap().as_mat().scale(t)
            + p.evaluate(&y).unwrap().as_mat().scale(1.0 - t);
        prop_assert!((lhs.as_mat() - rhs).norm() < 1e-12);
    }

    #[test]
    fn membership_is_convex(x in disc_member(2), y in disc_member(2), t in 0.0f64..1.0) {
        let p = LinearPencil::free_disc();
        prop_assume!(p.is_member(&x, 1e-9).unwrap());
        prop_assume!(p.is_member(&y, 1e-9).unwrap());
        let mix = x.scale(t).axpy(1.0 - t, &y).unwrap();
        prop_assert!(p.is_member(&mix, 1e-7).unwrap());
    }

    #[test]
    fn members_are_closed_under_direct_sums(x in disc_member(1), y in disc_member(2)) {
        let p = LinearPencil::free_disc();
        prop_assume!(p.is_member(&x, 1e-9).unwrap());
        prop_assume!(p.is_member(&y, 1e-9).unwrap());
        let s = matcore::direct_sum(&[x, y]).unwrap();
        prop_assert!(p.is_member(&s, 1e-9).unwrap());
    }

    #[test]
    fn functional_application_is_linear(x in tuple(2, 2), y in tuple(2, 2), seed in 0u64..1000) {
        let p = LinearPencil::free_disc();
        for kind in [FunctionalKind::Rc, FunctionalKind::Rpt] {
            let ell = freespec::pencil::random_functional(kind, &p, 2, seed);
            let sum = x.axpy(1.0, &y).unwrap();
            let lhs = ell.apply(&sum).unwrap();
            let rhs = ell.apply(&x).unwrap() + ell.apply(&y).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn serialization_roundtrips(x in tuple(3, 2)) {
        let json = serde_json::to_string(&x).unwrap();
        let back: MatrixTuple = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn solver_weak_duality_and_feasibility(
        blocks in proptest::collection::vec(sym_matrix(4), 1..4),
        c in proptest::collection::vec(-1.0f64..1.0, 3),
    ) {
        let m = blocks.len().min(c.len());
        let prog = LmiProgram::new(
            c[..m].to_vec(),
            SymMatrix::identity(4),
            blocks[..m].to_vec(),
        ).unwrap();
        let r = solver::solve(&prog, &SolveOptions::default()).unwrap();
        if r.status == SolveStatus::Optimal {
            prop_assert!(r.primal_residual <= 1e-9);
            prop_assert!(r.rel_gap <= 1e-9);
            let scale = 1.0 + r.objective.abs() + r.dual_objective.abs();
            prop_assert!(r.objective >= r.dual_objective - 1e-8 * scale);
        }
    }
}
