use leibniz_core::algebra::{apply_basis_change, StructureTensor};
use leibniz_core::catalog::{find_spec, Params};
use leibniz_core::invariants::*;
use leibniz_core::linalg::{unit, Matrix, Subspace, Vector};
use leibniz_core::scalar::{s, Scalar};
use proptest::prelude::*;

fn nil(key: &str, n: usize, a: i64, b: i64, g: i64) -> StructureTensor {
    find_spec(key).unwrap().build(n, &Params::abg(s(a), s(b), s(g))).unwrap()
}

fn named(name: &str, n: usize, p: Params) -> StructureTensor {
    find_spec(name).unwrap().build(n, &p).unwrap()
}

/// Squares ideal by brute force: span of `[x,x]` over basis vectors and
/// pairwise sums, closed under left and right products with the basis.
fn squares_ideal_dim_oracle(t: &StructureTensor) -> usize {
    let n = t.dim();
    let mut gens: Vec<Vector> = Vec::new();
    for i in 1..=n {
        for j in i..=n {
            let mut x = unit(n, i);
            if j != i {
                x[j - 1] = Scalar::one();
            }
            gens.push(t.bracket(&x, &x).unwrap());
        }
    }
    let mut span = Subspace::from_vectors(n, &gens);
    loop {
        let mut more = span.vectors();
        for v in span.vectors() {
            for i in 1..=n {
                more.push(t.bracket(&v, &unit(n, i)).unwrap());
                more.push(t.bracket(&unit(n, i), &v).unwrap());
            }
        }
        let next = Subspace::from_vectors(n, &more);
        if next.dim() == span.dim() {
            return span.dim();
        }
        span = next;
    }
}

#[test]
fn sequences_of_the_two_shapes() {
    for key in ["L", "G"] {
        let c = characteristic_sequence(&nil(key, 8, 0, 0, 0), 20, 7).unwrap();
        assert_eq!(c.sequence, vec![6, 2], "{key}");
        assert_eq!(c.basis_sequences[0], (1, vec![6, 2]));
        assert!(c.lower_bound_only);
    }
}

#[test]
fn sequence_needs_a_nilpotent_algebra() {
    let r = find_spec("R2").unwrap().build(6, &Params::new()).unwrap();
    assert!(characteristic_sequence(&r, 5, 1).is_err());
}

#[test]
fn sequence_is_the_max_over_samples() {
    let t = nil("L", 7, 1, 2, 4);
    let c = characteristic_sequence(&t, 50, 3).unwrap();
    assert!(c.sample_max.unwrap() <= c.sequence);
    for (_, b) in &c.basis_sequences {
        assert!(*b <= c.sequence);
    }
    assert_eq!(sequence_of(&t, &c.witness).unwrap(), c.sequence);
}

/// `Ann_r` by brute force: kernel of the stacked left multiplications.
fn ann_r_dim_oracle(t: &StructureTensor) -> usize {
    let n = t.dim();
    let mut rows = Vec::new();
    for i in 1..=n {
        let l = t.left_mult(&unit(n, i));
        rows.extend(l.row_vectors());
    }
    n - Matrix::from_rows(rows).rank()
}

#[test]
fn gamma_changes_the_right_annihilator() {
    // [e_{n-1},e_{n-1}] = e_n lands in L^2, so the squares ideal is L^2 in
    // both algebras; e_{n-1} leaves Ann_r instead.
    let (ta, tb) = (nil("L", 7, 0, 0, 0), nil("L", 7, 0, 0, 1));
    let (a, b) = (fingerprint(&ta), fingerprint(&tb));
    assert_eq!(a.dim_squares_ideal, squares_ideal_dim_oracle(&ta));
    assert_eq!(b.dim_squares_ideal, squares_ideal_dim_oracle(&tb));
    assert_eq!(a.dim_squares_ideal, b.dim_squares_ideal);
    assert_eq!(a.first_difference(&b), Some("dim_ann_r"));
    assert_eq!((a.dim_ann_r, b.dim_ann_r), (ann_r_dim_oracle(&ta), ann_r_dim_oracle(&tb)));
    assert_eq!(a.dim_ann_r, b.dim_ann_r + 1);
}

#[test]
fn type_two_first_and_third_differ() {
    let a = named("Ltype2_1", 7, Params::new());
    let b = named("Ltype2_3", 7, Params::new());
    let (fa, fb) = (fingerprint(&a), fingerprint(&b));
    assert_ne!(fa, fb);
    assert_eq!(fa.dim_squares_ideal, squares_ideal_dim_oracle(&a));
    assert_eq!(fb.dim_squares_ideal, squares_ideal_dim_oracle(&b));
}

#[test]
fn lie_flag_and_center() {
    let f = fingerprint(&named("Lnr(n,r)", 7, Params::new().with("r", s(3))));
    assert!(f.is_lie);
    assert_eq!(f.dim_squares_ideal, 0);
    assert!(f.dim_center <= f.dim_ann_r.min(f.dim_ann_l));
}

#[test]
fn codim_two_lists_get_reports() {
    let n = 7;
    let list: Vec<(String, StructureTensor)> = ["Hc2_1", "Hc2_2", "Hc2_3", "Hc2_4", "Hc2_5", "Hc2_6"]
        .iter()
        .map(|k| (k.to_string(), named(k, n, Params::new())))
        .collect();
    let r = pairwise_distinguish(&list).unwrap();
    assert_eq!(r.pairs.len(), 15);
    for p in &r.pairs {
        assert!(p.distinguished_by.is_some() != p.marker.is_some());
    }
    assert_eq!(r.to_text().lines().count(), 15);

    let mut r_list = vec![
        ("R1(0)".to_string(), named("R1", 6, Params::new().with("b", s(0)))),
        ("R1(-1)".to_string(), named("R1", 6, Params::new().with("b", s(-1)))),
        ("R2".to_string(), named("R2", 6, Params::new())),
        ("R4".to_string(), named("R4", 6, Params::new())),
    ];
    assert_eq!(pairwise_distinguish(&r_list).unwrap().pairs.len(), 6);
    r_list.push(("small".into(), nil("L", 5, 0, 0, 0)));
    assert!(pairwise_distinguish(&r_list).is_err());
}

fn invertible(n: usize, vals: &[i64]) -> Option<Matrix> {
    let rows: Vec<Vec<Scalar>> = (0..n).map(|i| (0..n).map(|j| s(vals[i * n + j])).collect()).collect();
    let m = Matrix::from_rows(rows);
    (!m.det().is_zero()).then_some(m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fingerprint_is_invariant(vals in prop::collection::vec(-2i64..=2, 49), which in 0usize..4) {
        let t = [nil("L", 7, 1, 2, 4), nil("G", 7, 1, 2, 1), nil("L", 7, 0, 1, 1), named("Lnr(n,r)", 7, Params::new().with("r", s(3)))][which].clone();
        let p = invertible(7, &vals);
        prop_assume!(p.is_some());
        let u = apply_basis_change(&t, &p.unwrap()).unwrap();
        prop_assert_eq!(fingerprint(&u), fingerprint(&t));
    }
}
