#![allow(clippy::needless_range_loop)]

//! Property tests for the exact linear algebra layer.

use coinv::linalg::{self, IntMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn matrix_strategy(max_dim: usize, max_abs: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
        prop::collection::vec(prop::collection::vec(-max_abs..=max_abs, c), r).prop_map(|rows| {
            IntMatrix::from_rows(
                rows.into_iter()
                    .map(|row| row.into_iter().map(BigInt::from).collect())
                    .collect(),
            )
            .expect("uniform rows")
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn snf_decomposition_invariants(a in matrix_strategy(6, 20)) {
        let snf = linalg::smith_normal_form(&a);
        // S = U·A·V exactly.
        prop_assert_eq!(snf.u.mul(&a).mul(&snf.v), snf.s.clone());
        // U and V are unimodular and V_inv really inverts V.
        prop_assert_eq!(snf.u.determinant().abs(), BigInt::one());
        prop_assert_eq!(snf.v.determinant().abs(), BigInt::one());
        prop_assert_eq!(snf.v.mul(&snf.v_inv), IntMatrix::identity(a.cols()));
        // Nonnegative diagonal in a divisibility chain, zeros trailing.
        let diag = snf.diagonal();
        for d in &diag {
            prop_assert!(!d.is_negative());
        }
        for w in diag.windows(2) {
            if w[0].is_zero() {
                prop_assert!(w[1].is_zero());
            } else {
                prop_assert!(w[1].is_multiple_of(&w[0]));
            }
        }
    }

    #[test]
    fn snf_is_deterministic(a in matrix_strategy(5, 10)) {
        let s1 = linalg::smith_normal_form(&a);
        let s2 = linalg::smith_normal_form(&a);
        prop_assert_eq!(s1.u, s2.u);
        prop_assert_eq!(s1.s, s2.s);
        prop_assert_eq!(s1.v, s2.v);
        prop_assert_eq!(s1.v_inv, s2.v_inv);
    }

    #[test]
    fn solve_z_substitutes(a in matrix_strategy(5, 6), xs in prop::collection::vec(-6i64..=6, 5)) {
        // Construct-then-solve: b = A·x0 is always solvable, and whatever
        // solution comes back must substitute exactly.
        let x0: Vec<BigInt> = xs.iter().take(a.cols()).map(|&v| BigInt::from(v)).collect();
        prop_assume!(x0.len() == a.cols());
        let b = a.mul_col_vec(&x0);
        let x = linalg::solve_z(&a, &b).expect("constructed system is solvable");
        prop_assert_eq!(a.mul_col_vec(&x), b);
    }

    #[test]
    fn solve_q_substitutes_or_is_inconsistent(a in matrix_strategy(4, 5), bs in prop::collection::vec(-6i64..=6, 4)) {
        let b: Vec<BigInt> = bs.iter().take(a.rows()).map(|&v| BigInt::from(v)).collect();
        prop_assume!(b.len() == a.rows());
        if let Some(x) = linalg::solve_q(&a, &b) {
            for r in 0..a.rows() {
                let lhs: num_rational::BigRational = a
                    .row(r)
                    .iter()
                    .zip(&x)
                    .map(|(c, xi)| num_rational::BigRational::from_integer(c.clone()) * xi)
                    .sum();
                prop_assert_eq!(lhs, num_rational::BigRational::from_integer(b[r].clone()));
            }
        }
    }

    #[test]
    fn class_order_one_iff_in_span(a in matrix_strategy(4, 4), vs in prop::collection::vec(-4i64..=4, 4)) {
        let v: Vec<BigInt> = vs.iter().take(a.cols()).map(|&x| BigInt::from(x)).collect();
        prop_assume!(v.len() == a.cols());
        let snf = linalg::smith_normal_form(&a);
        let order = snf.class_order(&v);
        prop_assert_eq!(order == Some(BigInt::one()), snf.in_span_z(&v));
        if let Some(n) = &order {
            // n·v is in the span, and no smaller positive multiple is.
            let nv: Vec<BigInt> = v.iter().map(|c| c * n).collect();
            prop_assert!(snf.in_span_z(&nv));
            let mut k = BigInt::one();
            while &k < n {
                let kv: Vec<BigInt> = v.iter().map(|c| c * &k).collect();
                prop_assert!(!snf.in_span_z(&kv));
                k += 1;
            }
        } else {
            prop_assert!(!snf.in_span_q(&v));
        }
    }

    #[test]
    fn torsion_basis_generates_classes_of_stated_order(a in matrix_strategy(4, 5)) {
        let snf = linalg::smith_normal_form(&a);
        let factors = snf.torsion_factors();
        let basis = snf.torsion_basis();
        prop_assert_eq!(factors.len(), basis.len());
        for (d, v) in factors.iter().zip(&basis) {
            prop_assert_eq!(snf.class_order(v), Some(d.clone()));
        }
    }
}

#[test]
fn cokernel_matches_manual_small_cases() {
    // Z^2 / <(0,0)> is free of rank 2.
    let zero = vec![vec![BigInt::zero(), BigInt::zero()]];
    let inv = linalg::cokernel_invariants(&zero, 2).unwrap();
    assert_eq!(inv.free_rank, 2);
    assert!(inv.torsion_factors.is_empty());

    // Z^2 / <(1,1),(1,-1)> = Z_2.
    let rows = vec![
        vec![BigInt::from(1), BigInt::from(1)],
        vec![BigInt::from(1), BigInt::from(-1)],
    ];
    let inv = linalg::cokernel_invariants(&rows, 2).unwrap();
    assert_eq!(inv.free_rank, 0);
    assert_eq!(inv.torsion_factors, vec![BigInt::from(2)]);
}
