use leibniz_core::algebra::{apply_basis_change, is_isomorphism};
use leibniz_core::catalog::{find_spec, Params};
use leibniz_core::linalg::{jordan_block_sizes, kernel, rref, Matrix};
use leibniz_core::scalar::{q, s, Scalar};
use proptest::prelude::*;

fn matrix(n: usize, m: usize, vals: &[i64]) -> Matrix {
    Matrix::from_rows((0..n).map(|i| (0..m).map(|j| s(vals[i * m + j])).collect()).collect())
}

/// Strictly upper triangular matrices are nilpotent.
fn strict_upper(n: usize, vals: &[i64]) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            m[(i, j)] = s(vals[i * n + j]);
        }
    }
    m
}

#[test]
fn inverse_and_det() {
    let m = Matrix::from_rows(vec![vec![s(2), s(1)], vec![q(1, 2), Scalar::i()]]);
    let inv = m.inverse().unwrap();
    assert_eq!(m.mul(&inv), Matrix::identity(2));
    assert_eq!(m.det(), &(&s(2) * &Scalar::i()) - &q(1, 2));
}

#[test]
fn single_jordan_block() {
    let mut m = Matrix::zeros(4, 4);
    for i in 0..3 {
        m[(i + 1, i)] = s(1);
    }
    assert_eq!(jordan_block_sizes(&m).unwrap(), vec![4]);
    assert!(jordan_block_sizes(&Matrix::identity(2)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rref_is_idempotent(vals in prop::collection::vec(-3i64..=3, 20)) {
        let m = matrix(4, 5, &vals);
        let (r, rank, _) = rref(&m);
        let (r2, rank2, _) = rref(&r);
        prop_assert_eq!(r, r2);
        prop_assert_eq!(rank, rank2);
        prop_assert_eq!(rank + kernel(&m).dim(), 5);
    }

    #[test]
    fn jordan_blocks_follow_ranks(vals in prop::collection::vec(-2i64..=2, 36)) {
        let m = strict_upper(6, &vals);
        let blocks = jordan_block_sizes(&m).unwrap();
        prop_assert_eq!(blocks.iter().sum::<usize>(), 6);
        // number of blocks longer than k equals rank(m^k) - rank(m^{k+1})
        for k in 0..6u32 {
            let longer = blocks.iter().filter(|b| **b > k as usize).count();
            prop_assert_eq!(longer, m.pow(k).rank() - m.pow(k + 1).rank());
        }
    }

    #[test]
    fn basis_changes_compose(a in prop::collection::vec(-2i64..=2, 36), b in prop::collection::vec(-2i64..=2, 36)) {
        let t = find_spec("L").unwrap().build(6, &Params::abg(s(1), s(2), s(4))).unwrap();
        let (p, r) = (matrix(6, 6, &a), matrix(6, 6, &b));
        prop_assume!(!p.det().is_zero() && !r.det().is_zero());
        let u = apply_basis_change(&t, &p).unwrap();
        let w = apply_basis_change(&u, &r).unwrap();
        prop_assert!(is_isomorphism(&t, &w, &p.mul(&r)).unwrap());
        prop_assert!(is_isomorphism(&u, &t, &p.inverse().unwrap()).unwrap());
    }
}
