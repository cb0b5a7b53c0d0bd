//! Acceptance run: one PASS/FAIL line per criterion, followed by indented
//! details. A red criterion is reported, not raised; the process exits 0 so
//! the rest of the workspace tests still run. Set LEIBNIZ_ACCEPTANCE_STRICT=1
//! to exit 1 on any red line.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use leibniz_core::algebra::{apply_basis_change, is_leibniz, leibniz_check, StructureTensor};
use leibniz_core::catalog::{all_families, find_spec, FamilySpec, Group, NilShape, Params};
use leibniz_core::derivations::{
    check_prop31, check_prop32, check_prop32_with, diagonal_vanishing, kernel_subspace, max_nil_independent,
    table1, table1_rows, CertificateStatus, GConstraints,
};
use leibniz_core::extensions::{lie_probe, probe_codim1_l, rederivation_cases, rederive, split_r2, verify_catalog_extension};
use leibniz_core::invariants::{characteristic_sequence, fingerprint, pairwise_distinguish, sequence_of};
use leibniz_core::linalg::{unit, Matrix};
use leibniz_core::scalar::{q, s, Scalar};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20240917;

// Pinned thresholds.
const MUTATION_COUNT: usize = 500;
const MUTATION_FLIP_RATE: f64 = 0.99;
const PER_ALGEBRA_SECS: f64 = 1.0;
const SWEEP_SECS: f64 = 120.0;
const PROP_COMBOS_MIN: usize = 12;
const TABLE_ROWS_SPEC: usize = 21;
const CERT_SAMPLES: usize = 50;
const CHARSEQ_SAMPLES: usize = 200;
const BASIS_CHANGES: usize = 100;
const ORACLE_POINTS: usize = 12;

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, summary: impl Into<String>, details: Vec<String>) -> Self {
        Outcome { pass, summary: summary.into(), details }
    }
}

fn label(p: &Params) -> String {
    if p.0.is_empty() {
        return String::new();
    }
    let parts: Vec<String> = p.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("[{}]", parts.join(","))
}

fn admissible_ns(spec: &FamilySpec, ns: impl Iterator<Item = usize>) -> Vec<(usize, Params)> {
    let mut out = Vec::new();
    for n in ns {
        for p in spec.sample_grid(n) {
            out.push((n, p));
        }
    }
    out
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<Scalar> {
    let vals = [s(1), s(-1), s(2), s(-2), q(1, 2), s(3), s(5), q(-1, 3)];
    (0..n).map(|_| vals.choose(rng).unwrap().clone()).collect()
}

/// Independent Leibniz test: the identity evaluated at random vectors
/// through the public bracket, never through the stored defect routine.
fn leibniz_oracle(t: &StructureTensor, rng: &mut ChaCha8Rng) -> bool {
    let n = t.dim();
    for _ in 0..ORACLE_POINTS {
        let (x, y, z) = (random_vector(rng, n), random_vector(rng, n), random_vector(rng, n));
        let lhs = t.bracket(&x, &t.bracket(&y, &z).unwrap()).unwrap();
        let a = t.bracket(&t.bracket(&x, &y).unwrap(), &z).unwrap();
        let b = t.bracket(&t.bracket(&x, &z).unwrap(), &y).unwrap();
        let ok = (0..n).all(|k| lhs[k] == &a[k] - &b[k]);
        if !ok {
            return false;
        }
    }
    true
}

fn criterion_1() -> Outcome {
    let mut details = Vec::new();
    let mut built: Vec<(String, StructureTensor)> = Vec::new();
    let mut failures = Vec::new();
    let mut slowest = (Duration::ZERO, String::new());
    let start = Instant::now();
    for spec in all_families() {
        for (n, p) in admissible_ns(&spec, 5..=10) {
            let name = format!("{}{} n={n}", spec.key, label(&p));
            let t0 = Instant::now();
            let res = spec.table(n, &p).map(|t| (leibniz_check(&t).pass, t));
            let dt = t0.elapsed();
            if dt > slowest.0 {
                slowest = (dt, name.clone());
            }
            match res {
                Ok((true, t)) => built.push((name, t)),
                Ok((false, _)) => failures.push(format!("{name}: leibniz_check fails")),
                Err(e) => failures.push(format!("{name}: {e}")),
            }
        }
    }
    let sweep = start.elapsed();
    let mut by_family: BTreeMap<String, usize> = BTreeMap::new();
    for f in &failures {
        *by_family.entry(f.split(['[', ' ']).next().unwrap().to_string()).or_default() += 1;
    }
    details.push(format!("{} instances pass leibniz_check, {} fail", built.len(), failures.len()));
    for (fam, k) in &by_family {
        details.push(format!("failing family {fam}: {k} instances, e.g. {}", failures.iter().find(|f| f.starts_with(fam.as_str())).unwrap()));
    }
    let time_ok = slowest.0.as_secs_f64() < PER_ALGEBRA_SECS && sweep.as_secs_f64() < SWEEP_SECS;
    details.push(format!(
        "sweep {:.2}s (limit {SWEEP_SECS}s), slowest algebra {:.3}s {} (limit {PER_ALGEBRA_SECS}s)",
        sweep.as_secs_f64(),
        slowest.0.as_secs_f64(),
        slowest.1
    ));

    // +1 on one stored constant of a random valid instance
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut flips, mut any_flips, mut agree) = (0usize, 0usize, 0usize);
    for _ in 0..MUTATION_COUNT {
        let (_, t) = built.choose(&mut rng).unwrap();
        let entries = t.entries();
        let (i, j, k, _) = entries.choose(&mut rng).unwrap().clone();
        let mut m = t.clone();
        m.add(i, j, k, Scalar::one());
        let verdict = is_leibniz(&m);
        if !verdict {
            flips += 1;
        }
        if leibniz_oracle(&m, &mut rng) == verdict {
            agree += 1;
        } else {
            details.push(format!("oracle disagrees: +1 at ({i},{j},{k}) of {}, checker says {verdict}", built.iter().find(|b| std::ptr::eq(&b.1, t)).unwrap().0));
        }
        // same budget on an arbitrary position, for comparison only
        let n = t.dim();
        let mut m2 = t.clone();
        m2.add(rng.gen_range(1..=n), rng.gen_range(1..=n), rng.gen_range(1..=n), Scalar::one());
        if !is_leibniz(&m2) {
            any_flips += 1;
        }
    }
    let rate = flips as f64 / MUTATION_COUNT as f64;
    let mut_ok = rate >= MUTATION_FLIP_RATE;
    details.push(format!(
        "stored-constant mutations: {flips}/{MUTATION_COUNT} flip the verdict ({:.1}%, required >= {:.0}%), seed {SEED}",
        100.0 * rate,
        100.0 * MUTATION_FLIP_RATE
    ));
    details.push(format!(
        "arbitrary-position mutations: {any_flips}/{MUTATION_COUNT} flip ({:.1}%); non-flipping mutants are genuine Leibniz algebras",
        100.0 * any_flips as f64 / MUTATION_COUNT as f64
    ));
    details.push(format!("random-vector oracle agrees with leibniz_check on {agree}/{MUTATION_COUNT} stored-constant mutants"));
    let pass = failures.is_empty() && time_ok && mut_ok && agree == MUTATION_COUNT;
    Outcome::new(pass, format!("{} built, {} failing, flip rate {:.1}%", built.len(), failures.len(), 100.0 * rate), details)
}

fn criterion_2() -> Outcome {
    let mut details = Vec::new();
    let (mut combos, mut good) = (0, 0);
    let mut corrected_good = 0;
    let mut corrected_total = 0;
    for row in table1_rows() {
        let abg = &row.samples[0];
        for n in [7, 8] {
            if row.needs_odd_n && n % 2 == 0 {
                continue;
            }
            combos += 1;
            let r = match row.shape {
                NilShape::L => check_prop31(abg, n),
                _ => check_prop32(abg, n),
            };
            let ok = match &r {
                Ok(r) => r.equal && r.constraints_hold,
                Err(_) => false,
            };
            if ok {
                good += 1;
            } else {
                let dims = match &r {
                    Ok(r) => format!(
                        "dim Der {} vs family {}, spaces equal {}, listed relations hold on Der {}",
                        r.dim_der, r.dim_family, r.equal, r.constraints_hold
                    ),
                    Err(e) => e.to_string(),
                };
                details.push(format!("mismatch {} n={n}: {dims}", row.label));
            }
            if row.shape == NilShape::G {
                corrected_total += 1;
                if check_prop32_with(abg, n, GConstraints::Corrected).map(|r| r.equal && r.constraints_hold).unwrap_or(false) {
                    corrected_good += 1;
                }
            }
        }
    }
    details.push(format!("{good}/{combos} (family, n) combinations equal in both directions (need >= {PROP_COMBOS_MIN}, all equal)"));
    details.push(format!(
        "G family with the relations derived from [e1,e3] and [e_i,e3]: {corrected_good}/{corrected_total} equal; the listed relation on a_(n-1) excludes a derivation when alpha = 1"
    ));
    Outcome::new(combos >= PROP_COMBOS_MIN && good == combos, format!("{good}/{combos} combinations equal"), details)
}

fn criterion_3() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    let mut rows_seen = 0;
    for n in [8, 9] {
        let rows = match table1(n) {
            Ok(r) => r,
            Err(e) => return Outcome::new(false, format!("table1({n}) failed: {e}"), details),
        };
        rows_seen = rows.len();
        let evaluated: Vec<_> = rows.iter().filter(|r| !r.skipped).collect();
        let bad: Vec<String> = evaluated
            .iter()
            .filter(|r| !r.pass)
            .map(|r| {
                let got: Vec<String> = r.samples.iter().map(|x| format!("{} ({:?})", x.max_nil_independent, x.status)).collect();
                format!("{} expected {} got {}", r.label, r.expected, got.join(", "))
            })
            .collect();
        let full = evaluated.iter().all(|r| r.samples.iter().all(|x| x.status == CertificateStatus::Certified));
        details.push(format!(
            "n={n}: {}/{} parity-admissible rows reproduced, full certificates on all: {full}",
            evaluated.len() - bad.len(),
            evaluated.len()
        ));
        details.extend(bad.iter().map(|b| format!("n={n}: {b}")));
        pass &= bad.is_empty() && full;
    }
    if rows_seen != TABLE_ROWS_SPEC {
        details.push(format!(
            "row count: the published table has {rows_seen} rows (9 over L, 11 over G), the criterion asks for {TABLE_ROWS_SPEC}"
        ));
        pass = false;
    }
    let summary = format!("{rows_seen} rows available, {TABLE_ROWS_SPEC} required");
    Outcome::new(pass, summary, details)
}

fn criterion_4() -> Outcome {
    let mut details = Vec::new();
    let (mut total, mut good) = (0, 0);
    for row in table1_rows() {
        for abg in &row.samples {
            for n in [7, 8] {
                if row.needs_odd_n && n % 2 == 0 {
                    continue;
                }
                total += 1;
                let key = if row.shape == NilShape::L { "L" } else { "G" };
                let t = find_spec(key).unwrap().build(n, &Params::abg(abg[0].clone(), abg[1].clone(), abg[2].clone())).unwrap();
                let gens = if row.shape == NilShape::L { [1, n - 1] } else { [1, 3] };
                match max_nil_independent(&t) {
                    Ok((_, cert)) => {
                        let same = diagonal_vanishing(&cert.der, &gens) == kernel_subspace(&cert);
                        let certified = cert.status == CertificateStatus::Certified;
                        if same && certified {
                            good += 1;
                        } else {
                            details.push(format!("{} {abg:?} n={n}: kernel matches {same}, certified {certified}", row.label));
                        }
                    }
                    Err(e) => details.push(format!("{} n={n}: {e}", row.label)),
                }
            }
        }
    }
    details.insert(0, format!("{good}/{total} (row sample, n) cases: toral kernel = generator-diagonal kernel, nilpotency certified by polarization"));
    Outcome::new(good == total, format!("{good}/{total} kernels match"), details)
}

fn criterion_5() -> Outcome {
    let mut details = Vec::new();
    let rows: [(&str, [Scalar; 3]); 5] = [
        ("L(0,0,1)", [s(0), s(0), s(1)]),
        ("L(1,1,0)", [s(1), s(1), s(0)]),
        ("L(1,0,2)", [s(1), s(0), s(2)]),
        ("L(1,1,1)", [s(1), s(1), s(1)]),
        ("L(1,2,4)", [s(1), s(2), s(4)]),
    ];
    let (mut total, mut good) = (0, 0);
    for (name, abg) in &rows {
        for n in [6, 7] {
            total += 1;
            match probe_codim1_l(abg, n) {
                Ok(r) => {
                    let facts = r.deduced_facts.iter().any(|f| f == "alpha = 0") && r.deduced_facts.iter().any(|f| f == "beta - 1 = 0");
                    if r.infeasible && facts {
                        good += 1;
                    }
                    details.push(format!(
                        "{name} n={n}: infeasible {}, facts [{}], contradicted at row: [{}]",
                        r.infeasible,
                        r.deduced_facts.join("; "),
                        r.row_contradictions.join("; ")
                    ));
                }
                Err(e) => details.push(format!("{name} n={n}: {e}")),
            }
        }
    }
    Outcome::new(good == total, format!("{good}/{total} probes infeasible with alpha = 0, beta = 1 deduced"), details)
}

fn criterion_6() -> Outcome {
    let mut details = Vec::new();
    let (mut total, mut good) = (0, 0);
    for spec in all_families().into_iter().filter(|f| f.group.solvable()) {
        let ns: Vec<usize> = (6..=10).filter(|n| !spec.sample_grid(*n).is_empty()).take(2).collect();
        for n in ns {
            for p in spec.sample_grid(n) {
                total += 1;
                match verify_catalog_extension(spec.key, n, &p, CERT_SAMPLES, SEED) {
                    Ok(v) if v.pass => good += 1,
                    Ok(v) => {
                        let bad: Vec<String> = v.checks.iter().filter(|c| !c.pass).map(|c| format!("{}: {}", c.name, c.detail)).collect();
                        details.push(format!("{}{} n={n}: {}", spec.key, label(&p), bad.join(" | ")));
                    }
                    Err(e) => details.push(format!("{}{} n={n}: {e}", spec.key, label(&p))),
                }
            }
        }
    }
    details.insert(0, format!("{good}/{total} (family, params, n) verifications pass all five sub-checks; {CERT_SAMPLES} mixed samples, seed {SEED}"));
    Outcome::new(good == total, format!("{good}/{total} pass"), details)
}

fn criterion_7() -> Outcome {
    let mut details = Vec::new();
    let (mut total, mut good) = (0, 0);
    let n = 7;
    for case in rederivation_cases() {
        let listed = case.k == 2 && case.shape == NilShape::L || case.k == 1 && case.shape == NilShape::G;
        match rederive(&case, n) {
            Ok(r) => {
                let line = format!(
                    "{} -> {} (k={}): {} solved / {} leaves, matched {}{}",
                    r.nilradical,
                    r.target,
                    r.k,
                    r.solved,
                    r.leaves,
                    r.matched,
                    r.infeasibility.as_ref().map(|s| format!(", closed by {s}")).unwrap_or_default()
                );
                if listed {
                    total += 1;
                    if r.matched {
                        good += 1;
                    }
                    details.push(line);
                } else {
                    details.push(format!("(additional) {line}"));
                }
            }
            Err(e) => {
                if listed {
                    total += 1;
                }
                details.push(format!("{}: {e}", case.target));
            }
        }
    }
    Outcome::new(good == total, format!("{good}/{total} listed cases re-derived at n={n}"), details)
}

fn criterion_8() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for n in [6, 8] {
        match split_r2(n) {
            Ok(r) => {
                details.push(format!(
                    "n={n}: ideals {}/{}, complementary {}, summands match {}/{}",
                    r.first_is_ideal, r.second_is_ideal, r.complementary, r.first_matches, r.second_matches
                ));
                pass &= r.pass;
            }
            Err(e) => {
                details.push(format!("n={n}: {e}"));
                pass = false;
            }
        }
    }
    Outcome::new(pass, "R2 splits at n = 6, 8", details)
}

fn criterion_9() -> Outcome {
    let mut details = Vec::new();
    let (mut total, mut good) = (0, 0);
    for spec in all_families().into_iter().filter(|f| matches!(f.group, Group::TypeI | Group::TypeII)) {
        for (n, p) in admissible_ns(&spec, 6..=9) {
            total += 1;
            let t = spec.build(n, &p).unwrap();
            let want = vec![n - 2, 2];
            let e1 = sequence_of(&t, &unit(n, 1)).unwrap();
            let c = characteristic_sequence(&t, CHARSEQ_SAMPLES, SEED + n as u64).unwrap();
            let not_exceeded = c.sample_max.as_ref().map_or(false, |m| *m <= want);
            if e1 == want && not_exceeded && c.samples_tried == CHARSEQ_SAMPLES {
                good += 1;
            } else {
                details.push(format!("{}{} n={n}: C(e1) = {e1:?}, sample max {:?}", spec.key, label(&p), c.sample_max));
            }
        }
    }
    details.insert(0, format!("{good}/{total} type-I/II instances: C(e1) = (n-2, 2) and {CHARSEQ_SAMPLES} samples never exceed it"));
    Outcome::new(good == total, format!("{good}/{total}"), details)
}

fn criterion_10() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for (n, r) in [(7, 3), (9, 3)] {
        match lie_probe(n, r) {
            Ok(rep) => {
                details.push(format!(
                    "({n},{r}): {} solved / {} leaves, squares ideal zero {}, all Lie {}; {}",
                    rep.solved,
                    rep.leaves,
                    rep.squares_zero,
                    rep.all_lie,
                    rep.not_in_ann_r.join("; ")
                ));
                pass &= rep.pass;
            }
            Err(e) => {
                details.push(format!("({n},{r}): {e}"));
                pass = false;
            }
        }
    }
    Outcome::new(pass, "Lie probe (7,3), (9,3)", details)
}

/// `D * Perm * L * U`: unit triangular factors with entries in {-1,0,1},
/// a random permutation and a diagonal from {1,-1,2,1/2}. Always invertible.
fn random_basis_change(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let mut l = Matrix::identity(n);
    let mut u = Matrix::identity(n);
    for i in 0..n {
        for j in 0..i {
            l[(i, j)] = s(rng.gen_range(-1..=1));
            u[(j, i)] = s(rng.gen_range(-1..=1));
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut pd = Matrix::zeros(n, n);
    let diag = [s(1), s(-1), s(2), q(1, 2)];
    for (i, &j) in perm.iter().enumerate() {
        pd[(i, j)] = diag.choose(rng).unwrap().clone();
    }
    pd.mul(&l).mul(&u)
}

fn criterion_11() -> Outcome {
    let mut details = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut algebras, mut stable) = (0, 0);
    for spec in all_families() {
        let Some(n) = (6..=8).find(|n| !spec.sample_grid(*n).is_empty()) else { continue };
        let p = spec.sample_grid(n).remove(0);
        let Ok(t) = spec.build(n, &p) else {
            details.push(format!("{}{} n={n}: not an algebra, skipped", spec.key, label(&p)));
            continue;
        };
        algebras += 1;
        let f = fingerprint(&t);
        let mut broken = None;
        for k in 0..BASIS_CHANGES {
            let pm = random_basis_change(&mut rng, t.dim());
            let u = apply_basis_change(&t, &pm).unwrap();
            let g = fingerprint(&u);
            if g != f {
                broken = Some((k, f.first_difference(&g)));
                break;
            }
        }
        match broken {
            None => stable += 1,
            Some((k, field)) => details.push(format!("{}{} n={n}: change #{k} alters {field:?}", spec.key, label(&p))),
        }
    }
    details.insert(0, format!("{stable}/{algebras} algebras keep their fingerprint under {BASIS_CHANGES} random basis changes (seed {SEED})"));

    // classified lists
    let list = |keys: &[&str], n: usize| -> Vec<(String, StructureTensor)> {
        let mut out = Vec::new();
        for k in keys {
            let spec = find_spec(k).unwrap();
            for p in spec.sample_grid(n) {
                if let Ok(t) = spec.build(n, &p) {
                    out.push((format!("{}{}", spec.key, label(&p)), t));
                }
            }
        }
        out
    };
    let lists = [
        ("type I, n=7", list(&["L1", "L2", "L3", "L4", "L5"], 7)),
        ("type II, n=7", list(&["Ltype2_1", "Ltype2_2", "Ltype2_3", "Ltype2_4", "Ltype2_5", "Ltype2_6", "Ltype2_7", "Ltype2_8"], 7)),
        ("codim-2 over L, n=6", list(&["R1", "R2", "R3", "R4"], 6)),
        ("codim-1 over G, n=7", list(&["Hc1_1", "Hc1_2", "Hc1_3", "Hc1_4", "Hc1_5"], 7)),
        ("codim-2 over G, n=7", list(&["Hc2_1", "Hc2_2", "Hc2_3", "Hc2_4", "Hc2_5", "Hc2_6"], 7)),
    ];
    let mut complete = true;
    for (name, l) in &lists {
        match pairwise_distinguish(l) {
            Ok(r) => {
                let k = l.len();
                let full = r.pairs.len() == k * (k - 1) / 2
                    && r.pairs.iter().all(|p| p.distinguished_by.is_some() != p.marker.is_some());
                complete &= full;
                details.push(format!("{name}: {} algebras, {} pairs, {} collisions marked needs-manual-argument", k, r.pairs.len(), r.collisions));
                for p in r.pairs.iter().filter(|p| p.marker.is_some()) {
                    details.push(format!("  collision {} / {}", p.a, p.b));
                }
            }
            Err(e) => {
                complete = false;
                details.push(format!("{name}: {e}"));
            }
        }
    }
    Outcome::new(stable == algebras && complete, format!("{stable}/{algebras} invariant, pairwise reports complete: {complete}"), details)
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("catalog integrity", criterion_1),
        ("derivation families", criterion_2),
        ("nil-independence table", criterion_3),
        ("toral kernel", criterion_4),
        ("codim-1 nonexistence over L", criterion_5),
        ("extension verification", criterion_6),
        ("re-derivation", criterion_7),
        ("R2 splitting", criterion_8),
        ("characteristic sequences", criterion_9),
        ("Lie probe", criterion_10),
        ("invariance suite", criterion_11),
    ];
    let (mut red, mut ran) = (0, 0);
    let only: Option<Vec<usize>> =
        std::env::var("LEIBNIZ_ACCEPTANCE_ONLY").ok().map(|v| v.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    for (k, (name, run)) in criteria.iter().enumerate() {
        if only.as_ref().is_some_and(|o| !o.contains(&(k + 1))) {
            continue;
        }
        ran += 1;
        let t0 = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            red += 1;
        }
        println!("{verdict} [{:>2}] {name}: {} ({:.1}s)", k + 1, o.summary, t0.elapsed().as_secs_f64());
        for d in &o.details {
            println!("         {d}");
        }
    }
    println!("acceptance: {} of {ran} criteria pass", ran - red);
    if red > 0 && std::env::var("LEIBNIZ_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
