use leibniz_core::algebra::{is_leibniz, leibniz_check, series, SeriesKind};
use leibniz_core::catalog::*;
use leibniz_core::scalar::{s, Scalar};
use leibniz_core::Error;

#[test]
fn every_family_builds_on_its_grid() {
    for spec in all_families() {
        for n in 5..=10 {
            for p in spec.sample_grid(n) {
                let res = spec.build(n, &p);
                if spec.key == "R3" {
                    assert!(matches!(res, Err(Error::Check(_))), "R3 table is expected to fail the identity");
                    continue;
                }
                let t = res.unwrap_or_else(|e| panic!("{} n={n} {p}: {e}", spec.name));
                assert_eq!(t.dim(), spec.dim(n));
            }
        }
    }
}

#[test]
fn r3_defect_is_at_y_e1_en() {
    let spec = find_spec("R3").unwrap();
    for n in [6, 7] {
        let t = spec.table(n, &Params::new()).unwrap();
        let rep = leibniz_check(&t);
        assert!(rep.violations.iter().any(|v| v.triple == (n + 2, 1, n)));
    }
}

#[test]
fn quasi_filiform_nilradicals() {
    for spec in list_families(&FamilyFilter { solvable: Some(false), ..Default::default() }) {
        if spec.shape == NilShape::Lnr {
            continue;
        }
        for n in 6..=9 {
            for p in spec.sample_grid(n) {
                let t = spec.build(n, &p).unwrap();
                let ser = series(&t, SeriesKind::LowerCentral);
                // L^{n-2} is terms[n-3], L^{n-1} is terms[n-2]
                assert!(ser.dims[n - 3] > 0 && ser.dims[n - 2] == 0, "{} n={n}: {:?}", spec.name, ser.dims);
            }
        }
    }
}

#[test]
fn classical_tables_equal_unified() {
    for spec in list_families(&FamilyFilter::default()).into_iter().filter(|f| matches!(f.group, Group::TypeI | Group::TypeII)) {
        for n in 5..=10 {
            for p in spec.sample_grid(n) {
                let (u, up) = unified_instance(spec.key, &p).unwrap();
                assert_eq!(spec.build(n, &p).unwrap(), u.build(n, &up).unwrap(), "{} n={n}", spec.name);
                let abg = [up.get("a").unwrap().clone(), up.get("b").unwrap().clone(), up.get("g").unwrap().clone()];
                let (back, bp) = classical_instance(spec.shape, &abg, n).unwrap();
                assert_eq!((back.key, bp), (spec.key, p));
            }
        }
    }
}

#[test]
fn printed_codim2_g_tables() {
    for key in ["Hc2_1", "Hc2_2", "Hc2_3", "Hc2_4", "Hc2_5", "Hc2_6"] {
        let n = 7;
        let printed = printed_codim2_g(key, n).unwrap();
        let built = find_spec(key).unwrap().build(n, &Params::new()).unwrap();
        let same = printed == built;
        assert_eq!(same, matches!(key, "Hc2_1" | "Hc2_3"), "{key}");
        assert_eq!(is_leibniz(&printed), same, "{key}");
    }
}

#[test]
fn documented_entries() {
    let l = find_spec("L").unwrap().build(7, &Params::abg(s(1), s(0), s(2))).unwrap();
    assert_eq!(l.coeff(6, 1, 7), s(1));
    assert_eq!(l.coeff(6, 1, 2), s(1));
    let t = find_spec("Ltype2_5").unwrap().build(9, &Params::new()).unwrap();
    for i in 3..=8 {
        assert_eq!(t.coeff(i, 11 - i, 9), if i % 2 == 0 { s(1) } else { s(-1) });
    }
    let r = find_spec("R1").unwrap().build(6, &Params::new().with("b", s(-1))).unwrap();
    assert_eq!(r.coeff(8, 5, 5), s(-1));
    let g = find_spec("G").unwrap().build(7, &Params::abg(s(0), s(0), s(1))).unwrap();
    assert_eq!(g.product(3, 3), leibniz_core::linalg::unit(7, 2));
    let l4 = find_spec("Ltype2_4").unwrap().build(7, &Params::new()).unwrap();
    assert_eq!(l4.coeff(1, 1, 2), s(1));
    assert!(l4.coeff(1, 1, 1).is_zero());
}

#[test]
fn g_family_rejects_alpha_on_even_n() {
    let g = find_spec("G").unwrap();
    let err = g.build(8, &Params::abg(s(1), s(0), s(0))).unwrap_err();
    assert!(matches!(err, Error::Input(_)));
    for key in ["Hc2_4", "Ltype2_5", "Hc1_2"] {
        assert!(matches!(find_spec(key).unwrap().build(6, &Params::new()), Err(Error::Input(_))));
    }
}

#[test]
fn lnr_tables_are_lie() {
    for n in 5..=10 {
        for p in find_spec("Lnr").unwrap().sample_grid(n) {
            let t = find_spec("Lnr").unwrap().build(n, &p).unwrap();
            assert!(leibniz_core::algebra::is_lie(&t));
            assert_eq!(t.label(1), "e0");
        }
    }
    let tab = lnr_derivation_table(7, 3).unwrap();
    let t2 = &tab.iter().find(|(k, _)| k == "t2").unwrap().1;
    assert_eq!(t2[(6, 6)], s(2));
    let g1 = &tab.iter().find(|(k, _)| k == "g1").unwrap().1;
    assert_eq!(g1[(3, 0)], s(1));
    let tab = lnr_derivation_table(9, 5).unwrap();
    let h3 = &tab.iter().find(|(k, _)| k == "h3").unwrap().1;
    for i in 1..=4 {
        assert_eq!(h3[(i + 3, i)], Scalar::one());
    }
    assert!(lnr_derivation_table(5, 3).is_err());
}
