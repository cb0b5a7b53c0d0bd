use std::collections::HashMap;

use leibniz_core::scalar::{q, s, Scalar};
use leibniz_core::symbolic::{ConstraintSystem, PolyExpr, ProofStep, Status};
use proptest::prelude::*;

fn v(name: &str) -> PolyExpr {
    PolyExpr::var(name)
}

fn c(x: i64) -> PolyExpr {
    PolyExpr::constant(s(x))
}

fn system(unknowns: &[&str], eqs: Vec<PolyExpr>) -> ConstraintSystem {
    let mut sys = ConstraintSystem::new(unknowns.iter().map(|u| u.to_string()).collect());
    for (k, e) in eqs.into_iter().enumerate() {
        sys.add_equation(e, format!("eq{k}"));
    }
    sys
}

fn at(pairs: &[(&str, Scalar)]) -> HashMap<String, Scalar> {
    pairs.iter().map(|(k, x)| (k.to_string(), x.clone())).collect()
}

#[test]
fn ring_operations() {
    let x = v("x");
    let p = (&x + &c(1)) * (&x - &c(1));
    assert_eq!(p, &(&x * &x) - &c(1));
    assert_eq!(p.substitute("x", &c(2)).as_constant(), Some(s(3)));
    assert_eq!(p.degree(), 2);
}

#[test]
fn table_restriction_forces_a_zero_coefficient() {
    // gamma a - beta a (gamma - alpha (1 + beta)) at (1,1,0)
    let (al, be, ga, a) = (v("alpha"), v("beta"), v("gamma"), v("a"));
    let inner = &ga - &(&al * &(&c(1) + &be));
    let e = &(&ga * &a) - &(&(&be * &a) * &inner);
    let val = e.evaluate(&at(&[("alpha", s(1)), ("beta", s(1)), ("gamma", s(0)), ("a", s(1))]));
    assert_eq!(val, Some(s(2)));
}

#[test]
fn linear_systems() {
    let (x, y) = (v("x"), v("y"));
    let sys = system(&["x", "y"], vec![&(&x + &y) - &c(1), &(&x - &y) - &c(1)]).linear_eliminate();
    assert_eq!(sys.status(), Status::Solved);
    assert_eq!(sys.value_of("x").as_constant(), Some(s(1)));
    assert_eq!(sys.value_of("y").as_constant(), Some(s(0)));

    let sys = system(&["x"], vec![&x + &c(1), &x - &c(1)]).linear_eliminate();
    assert_eq!(sys.status(), Status::Infeasible);
    assert!(matches!(sys.log.last(), Some(ProofStep::Infeasible { .. })));
}

#[test]
fn factored_quadratic_branches() {
    let u = v("u");
    let sys = system(&["u"], vec![&u * &(&c(1) + &u)]);
    let kids = sys.branch_on_factored();
    assert_eq!(kids.len(), 2);
    let mut vals: Vec<Scalar> = kids.iter().map(|k| k.value_of("u").as_constant().unwrap()).collect();
    vals.sort_by_key(|x| x.to_string());
    assert_eq!(vals, vec![s(-1), s(0)]);
}

#[test]
fn product_of_two_unknowns_branches() {
    let sys = system(&["u", "w"], vec![&v("u") * &v("w")]);
    let kids = sys.branch_on_factored();
    assert_eq!(kids.len(), 2);
    assert!(kids.iter().all(|k| k.status() == Status::Solved));
}

#[test]
fn unsupported_shape_is_flagged() {
    let (x, y, z) = (v("x"), v("y"), v("z"));
    let e = &(&(&x * &x) + &(&y * &y)) + &(&(&z * &z) - &c(1));
    let kids = system(&["x", "y", "z"], vec![e]).branch_on_factored();
    assert_eq!(kids.len(), 1);
    assert_eq!(kids[0].flag.as_deref(), Some("fragment-limit"));
}

// codim-2 L restrictions at (0, beta, 0): mu4 (1 + mu4), beta (1 + mu4), mu4 (1 + beta)
fn restrictions_l_beta(beta: i64) -> ConstraintSystem {
    let mu = v("mu4");
    let one = c(1);
    let b = c(beta);
    system(&["mu4"], vec![&mu * &(&one + &mu), &b * &(&one + &mu), &mu * &(&one + &b)])
}

#[test]
fn l_restrictions_fix_mu4_to_beta() {
    let leaves = restrictions_l_beta(0).solve();
    let solved: Vec<_> = leaves.iter().filter(|l| l.status() == Status::Solved).collect();
    assert_eq!(solved.len(), 1);
    assert_eq!(solved[0].value_of("mu4").as_constant(), Some(s(0)));

    let leaves = restrictions_l_beta(-1).solve();
    let vals: Vec<Scalar> =
        leaves.iter().filter(|l| l.status() == Status::Solved).map(|l| l.value_of("mu4").as_constant().unwrap()).collect();
    assert!(vals.contains(&s(-1)));
}

#[test]
fn g_restriction_forces_a1() {
    // 2 A1 gamma = beta + A1 beta^2 at (0,1,0)
    let a1 = v("A1");
    let (b, g) = (c(1), c(0));
    let e = &(&(&c(2) * &a1) * &g) - &(&b + &(&a1 * &(&b * &b)));
    let sys = system(&["A1"], vec![e]).linear_eliminate();
    assert_eq!(sys.status(), Status::Solved);
    assert_eq!(sys.value_of("A1").as_constant(), Some(s(-1)));
}

#[test]
fn frozen_symbols_give_deductions() {
    let (a, x) = (v("a"), v("x"));
    let mut sys = ConstraintSystem::new(vec!["x".into()]);
    sys.freeze("a");
    sys.add_equation(&x - &a, "first");
    sys.add_equation(&x - &c(1), "second");
    let out = sys.linear_eliminate();
    let d = out.deductions();
    assert_eq!(d.len(), 1);
    assert_eq!(d[0].monic(), (&a - &c(1)).monic());
}

#[test]
fn rational_coefficients() {
    let x = v("x");
    let sys = system(&["x"], vec![&x.scale(&q(2, 3)) - &c(1)]).linear_eliminate();
    assert_eq!(sys.value_of("x").as_constant(), Some(q(3, 2)));
}

const NAMES: [&str; 4] = ["u0", "u1", "u2", "u3"];

/// Random equations through a known point: linear forms plus occasional
/// products of two unknowns, each shifted to vanish at `point`.
fn toy_system(point: &[i64], rows: &[(Vec<i64>, Option<(usize, usize)>)]) -> (Vec<PolyExpr>, HashMap<String, Scalar>) {
    let p = at(&NAMES.iter().zip(point).map(|(n, x)| (*n, s(*x))).collect::<Vec<_>>());
    let mut eqs = Vec::new();
    for (coef, quad) in rows {
        let mut e = PolyExpr::zero();
        for (k, cf) in coef.iter().enumerate() {
            e = &e + &v(NAMES[k]).scale(&s(*cf));
        }
        if let Some((i, j)) = quad {
            e = &e + &(&v(NAMES[*i]) * &v(NAMES[*j]));
        }
        let shift = e.evaluate(&p).unwrap();
        eqs.push(&e - &PolyExpr::constant(shift));
    }
    (eqs, p)
}

fn row_strategy() -> impl Strategy<Value = (Vec<i64>, Option<(usize, usize)>)> {
    (prop::collection::vec(-2i64..=2, 4), prop::option::weighted(0.3, (0usize..4, 0usize..4)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn elimination_is_sound(point in prop::collection::vec(-3i64..=3, 4), rows in prop::collection::vec(row_strategy(), 1..5)) {
        let (eqs, p) = toy_system(&point, &rows);
        let sys = system(&NAMES, eqs.clone());
        let out = sys.linear_eliminate();
        // the system has a solution, so elimination cannot report infeasibility
        prop_assert_ne!(out.status(), Status::Infeasible);
        let free: HashMap<String, Scalar> =
            out.free_unknowns().into_iter().map(|u| { let x = p[&u].clone(); (u, x) }).collect();
        let full = out.extend_assignment(&free).unwrap();
        if out.equations().iter().all(|e| e.evaluate(&full).map_or(false, |x| x.is_zero())) {
            for e in &eqs {
                prop_assert!(e.evaluate(&full).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn elimination_order_does_not_change_status(point in prop::collection::vec(-3i64..=3, 4), rows in prop::collection::vec(row_strategy(), 1..5), bad in any::<bool>()) {
        let (mut eqs, _) = toy_system(&point, &rows);
        if bad {
            // an inconsistent copy of the first equation
            let e = &eqs[0] + &c(1);
            eqs.push(e);
        }
        let fwd = system(&NAMES, eqs.clone()).linear_eliminate();
        let rev_names: Vec<&str> = NAMES.iter().rev().copied().collect();
        let rev = system(&rev_names, eqs).linear_eliminate();
        if fwd.status() != Status::Open && rev.status() != Status::Open {
            prop_assert_eq!(fwd.status(), rev.status());
        }
    }

    #[test]
    fn linear_substitution_keeps_degree(rows in prop::collection::vec(row_strategy(), 1..4), k in 0usize..4, a in -2i64..=2, b in -2i64..=2) {
        let (eqs, _) = toy_system(&[0, 0, 0, 0], &rows);
        let lin = &v(NAMES[(k + 1) % 4]).scale(&s(a)) + &c(b);
        for e in &eqs {
            prop_assert!(e.substitute(NAMES[k], &lin).degree() <= e.degree());
        }
    }
}
