use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use leibniz_core::algebra::{
    annihilators, apply_basis_change, is_leibniz, is_lie, is_solvable_algebra, leibniz_check, natural_grading, nilindex, series,
    SeriesKind, StructureTensor,
};
use leibniz_core::catalog::{all_families, parse_family, FamilySpec, Group, NilShape, Params, MIN_N};
use leibniz_core::derivations::{
    check_prop31, check_prop32_with, derivation_space, diagonal_vanishing, inner_derivations, kernel_subspace, max_nil_independent,
    table1, CertificateStatus, GConstraints,
};
use leibniz_core::extensions::{
    build_skeleton, lie_probe, probe_codim1_l, rederivation_cases, rederive, solve_extension, split_r2, verify_catalog_extension,
    SkeletonMode,
};
use leibniz_core::invariants::{characteristic_sequence, fingerprint, pairwise_distinguish};
use leibniz_core::linalg::Matrix;
use leibniz_core::scalar::{q, s, Scalar};
use leibniz_core::symbolic::Status as SolveStatus;
use leibniz_core::{Error, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::report::{Check, RunReport, Status};

/// Where an algebra comes from: a catalog name or a JSON file.
pub struct Source {
    pub family: Option<String>,
    pub file: Option<PathBuf>,
    pub n: Option<usize>,
    pub params: Vec<String>,
}

/// A resolved algebra with its catalog entry when it has one.
pub struct Resolved {
    pub name: String,
    pub spec: Option<FamilySpec>,
    pub n: usize,
    pub params: Params,
}

impl Resolved {
    /// Stored table without the Leibniz gate, so checks can report failures.
    pub fn table(&self) -> Result<StructureTensor> {
        match &self.spec {
            Some(spec) => spec.table(self.n, &self.params),
            None => unreachable!("file algebras are loaded directly"),
        }
    }
}

pub fn params_from(list: &[String], base: Params) -> Result<Params> {
    let mut p = base;
    for a in list {
        p.parse_assignment(a)?;
    }
    Ok(p)
}

fn display_name(spec: &FamilySpec, p: &Params) -> String {
    if p.0.is_empty() {
        spec.key.to_string()
    } else {
        format!("{}[{}]", spec.key, p)
    }
}

pub fn resolve(src: &Source) -> Result<Resolved> {
    let family = src.family.as_deref().ok_or_else(|| Error::Input("a family name is required".into()))?;
    let r = parse_family(family)?;
    let params = params_from(&src.params, r.params)?;
    let n = src.n.or(r.n).ok_or_else(|| Error::Input("missing -n".into()))?;
    r.spec.validate(n, &params)?;
    Ok(Resolved { name: display_name(&r.spec, &params), spec: Some(r.spec), n, params })
}

pub fn load_file(path: &Path) -> Result<StructureTensor> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    StructureTensor::from_json(&text)
}

/// A catalog algebra (Leibniz gate included) or a file algebra.
fn algebra(src: &Source) -> Result<(String, Option<Resolved>, StructureTensor)> {
    if let Some(path) = &src.file {
        if src.family.is_some() {
            return Err(Error::Input("give either a family or --file, not both".into()));
        }
        return Ok((path.display().to_string(), None, load_file(path)?));
    }
    let r = resolve(src)?;
    let t = r.spec.as_ref().unwrap().build(r.n, &r.params)?;
    Ok((r.name.clone(), Some(r), t))
}

fn target_of(group: Group) -> &'static str {
    match group {
        Group::TypeI => "naturally graded quasi-filiform Leibniz algebras of type I",
        Group::TypeII => "naturally graded quasi-filiform Leibniz algebras of type II",
        Group::Unified => "unified quasi-filiform families L(a,b,g), G(a,b,g)",
        Group::LieNilradical => "quasi-filiform Lie nilradical Lnr(n,r)",
        Group::SolvableLCodim2 => "solvable extensions of L(a,b,g) of codimension 2",
        Group::SolvableGCodim1 => "solvable extensions of G(a,b,g) of codimension 1",
        Group::SolvableGCodim2 => "solvable extensions of G(a,b,g) of codimension 2",
    }
}

pub fn catalog(report: &mut RunReport, group: Option<String>) -> Result<()> {
    let fams: Vec<FamilySpec> = all_families()
        .into_iter()
        .filter(|f| group.as_ref().map_or(true, |g| serde_json::to_value(f.group).unwrap() == json!(g)))
        .collect();
    if fams.is_empty() {
        return Err(Error::Input(format!("no family in group {}", group.unwrap_or_default())));
    }
    let mut text = format!("{:<22} {:<22} {:<18} {:>5}  domain\n", "name", "printed as", "group", "codim");
    for f in &fams {
        let g = serde_json::to_value(f.group).unwrap();
        writeln!(text, "{:<22} {:<22} {:<18} {:>5}  {}", f.name, f.printed, g.as_str().unwrap(), f.codim, f.domain).unwrap();
    }
    report.text = text;
    report.result = serde_json::to_value(&fams).unwrap();
    Ok(())
}

pub fn build(report: &mut RunReport, src: &Source, out: Option<PathBuf>) -> Result<()> {
    let (name, _, t) = algebra(src)?;
    let json_text = t.to_json();
    if let Some(path) = out {
        std::fs::write(&path, &json_text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    }
    report.result = json!({ "name": name, "algebra": serde_json::from_str::<Value>(&json_text).unwrap() });
    report.text = format!("{name} (dim {})\n{t}", t.dim());
    Ok(())
}

pub const CHECK_NAMES: [&str; 5] = ["leibniz", "series", "lie", "extension", "grading"];

fn default_checks(spec: Option<&FamilySpec>) -> Vec<String> {
    let mut c = vec!["leibniz".to_string(), "series".to_string()];
    if let Some(spec) = spec {
        if spec.group.solvable() {
            c.push("extension".into());
        }
        if spec.group == Group::LieNilradical {
            c.push("lie".into());
        }
    }
    c
}

struct VerifyCtx {
    samples: usize,
    seed: u64,
}

/// Runs the named checks on one algebra and reports them prefixed by `label`.
fn run_checks(
    report: &mut RunReport,
    label: &str,
    t: &StructureTensor,
    r: Option<&Resolved>,
    checks: &[String],
    ctx: &VerifyCtx,
) -> Result<()> {
    let spec = r.and_then(|r| r.spec.as_ref());
    let target = spec.map_or("algebra given as a file", |s| target_of(s.group));
    for c in checks {
        let name = format!("{label}: {c}");
        let check = match c.as_str() {
            "leibniz" => {
                let rep = leibniz_check(t);
                let details = match rep.violations.first() {
                    None => format!("{} triples checked", rep.triples_checked),
                    Some(v) => format!("{} violating triples, first {:?}", rep.violations.len(), v.triple),
                };
                Check::new(name, Status::from_bool(rep.pass), target, details)
            }
            "series" => {
                let lc = series(t, SeriesKind::LowerCentral).dims;
                let ds = series(t, SeriesKind::Derived).dims;
                let dims = format!("lower central {lc:?}, derived {ds:?}");
                match spec {
                    Some(s) if s.group.solvable() => {
                        let ok = is_solvable_algebra(t) && lc.last() != Some(&0);
                        Check::new(name, Status::from_bool(ok), target, format!("solvable, not nilpotent expected; {dims}"))
                    }
                    Some(s) if s.group != Group::LieNilradical => {
                        let n = t.dim();
                        let ok = nilindex(t) == Some(n - 1);
                        Check::new(name, Status::from_bool(ok), target, format!("quasi-filiform (nilindex {}) expected; {dims}", n - 1))
                    }
                    Some(_) => Check::new(name, Status::from_bool(lc.last() == Some(&0)), target, format!("nilpotent expected; {dims}")),
                    None => Check::new(name, Status::from_bool(is_solvable_algebra(t)), target, format!("solvable expected; {dims}")),
                }
            }
            "lie" => Check::new(name, Status::from_bool(is_lie(t)), target, "antisymmetric bracket".to_string()),
            "extension" => {
                let Some(r) = r.filter(|r| r.spec.as_ref().is_some_and(|s| s.group.solvable())) else {
                    return Err(Error::Input("the extension check applies to solvable catalog families".into()));
                };
                report.seed = Some(ctx.seed);
                let v = verify_catalog_extension(r.spec.as_ref().unwrap().key, r.n, &r.params, ctx.samples, ctx.seed)?;
                let bad: Vec<String> = v.checks.iter().filter(|c| !c.pass).map(|c| format!("{}: {}", c.name, c.detail)).collect();
                let details = if bad.is_empty() {
                    let names: Vec<&str> = v.checks.iter().map(|c| c.name.as_str()).collect();
                    format!("{} ({} mixed samples)", names.join(", "), ctx.samples)
                } else {
                    bad.join(" | ")
                };
                Check::new(name, Status::from_bool(v.pass), target, details)
            }
            "grading" => match natural_grading(t) {
                Ok(g) => {
                    let status = if g.isomorphic_under_map { Status::Pass } else { Status::Inconclusive };
                    Check::new(name, status, target, format!("graded pieces {:?}", g.piece_dims))
                }
                Err(e) => Check::new(name, Status::Inconclusive, target, e.to_string()),
            },
            other => return Err(Error::Input(format!("unknown check `{other}`; valid: {}", CHECK_NAMES.join(", ")))),
        };
        report.check(check);
    }
    Ok(())
}

pub struct VerifyArgs {
    pub checks: Option<Vec<String>>,
    pub all: bool,
    pub mutations: usize,
    pub samples: usize,
}

pub fn verify(report: &mut RunReport, src: &Source, a: &VerifyArgs, seed: u64) -> Result<()> {
    let ctx = VerifyCtx { samples: a.samples, seed };
    if !a.all {
        if a.mutations > 0 {
            return Err(Error::Input("--mutations needs --all".into()));
        }
        let (label, r, t) = match &src.file {
            Some(_) => algebra(src)?,
            None => {
                let r = resolve(src)?;
                let t = r.table()?;
                (r.name.clone(), Some(r), t)
            }
        };
        let checks = a.checks.clone().unwrap_or_else(|| default_checks(r.as_ref().and_then(|r| r.spec.as_ref())));
        run_checks(report, &label, &t, r.as_ref(), &checks, &ctx)?;
        report.text = format!("{label} (dim {})", t.dim());
        report.result = json!({ "name": label, "dim": t.dim() });
        return Ok(());
    }

    let only = match &src.family {
        Some(f) => Some(parse_family(f)?.spec.key),
        None => None,
    };
    let mut valid: Vec<StructureTensor> = Vec::new();
    let mut items = 0;
    for spec in all_families().into_iter().filter(|s| only.map_or(true, |k| s.key == k)) {
        for n in MIN_N..=10 {
            for p in spec.sample_grid(n) {
                items += 1;
                let r = Resolved { name: display_name(&spec, &p), spec: Some(spec.clone()), n, params: p };
                let t = r.table()?;
                let label = format!("{} n={n}", r.name);
                let checks = a.checks.clone().unwrap_or_else(|| default_checks(Some(&spec)));
                let before = report.failed();
                run_checks(report, &label, &t, Some(&r), &checks, &ctx)?;
                if report.failed() == before && is_leibniz(&t) {
                    valid.push(t);
                }
            }
        }
    }
    report.text = format!("swept {items} (family, n, parameters) items over n = {MIN_N}..10");
    let mut result = json!({ "items": items });
    if a.mutations > 0 {
        report.seed = Some(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut flips = 0;
        for _ in 0..a.mutations {
            let t = valid.choose(&mut rng).ok_or_else(|| Error::Input("no valid algebra to mutate".into()))?;
            let (i, j, k, _) = t.entries().choose(&mut rng).unwrap().clone();
            let mut m = t.clone();
            m.add(i, j, k, Scalar::one());
            if !is_leibniz(&m) {
                flips += 1;
            }
        }
        let rate = flips as f64 / a.mutations as f64;
        report.check(Check::new(
            "mutation sensitivity",
            Status::from_bool(rate >= 0.99),
            "single-constant mutations break the Leibniz identity",
            format!("{flips}/{} mutants of stored constants rejected ({:.1}%, threshold 99%)", a.mutations, 100.0 * rate),
        ));
        result["mutation_flip_rate"] = json!(rate);
    }
    report.result = result;
    Ok(())
}

pub fn derive(report: &mut RunReport, src: &Source, relations: GConstraints) -> Result<()> {
    let (name, r, t) = algebra(src)?;
    let der = derivation_space(&t);
    let inner = inner_derivations(&t);
    let (k, cert) = max_nil_independent(&t)?;
    let status = serde_json::to_value(cert.status).unwrap();
    let params = r.as_ref().map(|r| serde_json::to_value(&r.params).unwrap()).unwrap_or(Value::Null);
    report.result = json!({
        "family": name,
        "n": t.dim(),
        "params": params,
        "dim_der": der.dim(),
        "dim_inner": inner.dim(),
        "max_nil_independent": k,
        "certificate_status": status,
    });
    report.text = format!(
        "family: {name}\nn: {}\ndim Der: {}\ndim Inner: {}\nmax nil-independent: {k}\ncertificate: {}",
        t.dim(),
        der.dim(),
        inner.dim(),
        status.as_str().unwrap_or_default()
    );
    report.check(Check::new(
        "nil-independence certificate",
        if cert.status == CertificateStatus::Certified { Status::Pass } else { Status::Inconclusive },
        "maximal number of nil-independent derivations",
        format!("bounds {}..{}", cert.lower, cert.upper),
    ));

    // the unified nilradicals also have a parametrized derivation family
    let Some(r) = r else { return Ok(()) };
    let spec = r.spec.as_ref().unwrap();
    if spec.group != Group::Unified {
        return Ok(());
    }
    let abg = [r.params.get("a").unwrap().clone(), r.params.get("b").unwrap().clone(), r.params.get("g").unwrap().clone()];
    let (fam, gens) = match spec.shape {
        NilShape::L => (check_prop31(&abg, r.n)?, [1, r.n - 1]),
        _ => (check_prop32_with(&abg, r.n, relations)?, [1, 3]),
    };
    report.check(Check::new(
        "derivation family",
        Status::from_bool(fam.equal && fam.constraints_hold),
        "parametrized derivation algebra of the unified family",
        format!(
            "family dim {}, Der dim {}, equal {}, relations hold {}",
            fam.dim_family, fam.dim_der, fam.equal, fam.constraints_hold
        ),
    ));
    let same = diagonal_vanishing(&cert.der, &gens) == kernel_subspace(&cert);
    report.check(Check::new(
        "toral kernel",
        Status::from_bool(same),
        "nilpotent derivations are those vanishing on the generator diagonal",
        format!("kernel of the toral functionals equals a_{} = b_{} = 0: {same}", gens[0], gens[1]),
    ));
    Ok(())
}

pub fn table(report: &mut RunReport, n: usize) -> Result<()> {
    let rows = table1(n)?;
    let mut text = format!("{:<12} {:>8} {:>8}  {:<12} derivation restrictions\n", "nilradical", "printed", "computed", "status");
    for row in &rows {
        if row.skipped {
            writeln!(text, "{:<12} {:>8} {:>8}  {:<12} {}", row.label, row.expected, "-", "skipped", "needs odd n").unwrap();
            continue;
        }
        let got: Vec<String> = row.samples.iter().map(|s| s.max_nil_independent.to_string()).collect();
        let st: Vec<String> = row.samples.iter().map(|s| serde_json::to_value(s.status).unwrap().as_str().unwrap().to_string()).collect();
        let mut st = st;
        st.dedup();
        writeln!(text, "{:<12} {:>8} {:>8}  {:<12} {}", row.label, row.expected, got.join(","), st.join(","), row.restrictions).unwrap();
        let full = row.samples.iter().all(|s| s.status == CertificateStatus::Certified);
        report.check(Check::new(
            format!("{} n={n}", row.label),
            Status::from_bool(row.pass && full),
            "maximal nil-independent derivations of the nilradical",
            format!("printed {}, computed {}", row.expected, got.join(",")),
        ));
    }
    report.text = text;
    report.result = serde_json::to_value(&rows).unwrap();
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ExtendMode {
    Normal,
    Probe,
}

fn write_log(path: &Option<PathBuf>, log: &Value) -> Result<()> {
    if let Some(p) = path {
        let text = serde_json::to_string_pretty(log).unwrap();
        std::fs::write(p, text + "\n").map_err(|e| Error::Input(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

pub fn extend(report: &mut RunReport, src: &Source, k: usize, mode: ExtendMode, log: Option<PathBuf>) -> Result<()> {
    let r = resolve(src)?;
    let spec = r.spec.clone().unwrap();
    if spec.group.solvable() {
        return Err(Error::Input(format!("{} is already an extension; give a nilradical", spec.name)));
    }
    if k == 0 {
        return Err(Error::Input("-k must be positive".into()));
    }
    let abg = || -> Option<[Scalar; 3]> { Some([r.params.get("a")?.clone(), r.params.get("b")?.clone(), r.params.get("g")?.clone()]) };
    let n = r.n;
    match mode {
        ExtendMode::Probe => {
            if spec.key != "L" || k != 1 {
                return Err(Error::Input("probe mode covers codimension-1 extensions of L(a,b,g) (-k 1)".into()));
            }
            let p = probe_codim1_l(&abg().unwrap(), n)?;
            let verdict = if p.infeasible { "infeasible" } else { "feasible" };
            report.check(Check::new(
                "no codimension-1 solvable extension",
                Status::from_bool(p.infeasible),
                "L(a,b,g) with a one-dimensional toral part has no codimension-1 solvable extension",
                format!("deduced [{}]", p.deduced_facts.join("; ")),
            ));
            let steps: Vec<String> = p.log.iter().map(|s| s.to_string()).collect();
            report.text = format!("{}, n = {n}, k = 1: {verdict}\n{}", r.name, steps.join("\n"));
            write_log(&log, &json!({ "steps": p.log, "parametric_steps": p.parametric_log }))?;
            report.result = serde_json::to_value(&p).unwrap();
        }
        ExtendMode::Normal if spec.shape == NilShape::Lnr && k == 2 => {
            let rr = r.params.get("r").and_then(|v| v.as_i64_ratio()).map(|(v, _)| v as usize).unwrap();
            let p = lie_probe(n, rr)?;
            report.check(Check::new(
                "Lie extensions only",
                Status::from_bool(p.pass),
                "solvable extensions of Lnr(n,r) are Lie",
                format!("{}; squares ideal zero {}, all leaves Lie {}", p.not_in_ann_r.join("; "), p.squares_zero, p.all_lie),
            ));
            report.text = format!("{}, n = {n}, k = 2: {} solved of {} leaves", r.name, p.solved, p.leaves);
            report.result = serde_json::to_value(&p).unwrap();
            write_log(&log, &report.result)?;
        }
        ExtendMode::Normal => {
            let case = abg().and_then(|abg| {
                rederivation_cases().into_iter().find(|c| c.shape == spec.shape && c.abg == abg && c.k == k)
            });
            if let Some(case) = case {
                let res = rederive(&case, n)?;
                report.check(Check::new(
                    format!("re-derive {}", case.target),
                    Status::from_bool(res.matched),
                    "classified solvable extension of the given nilradical",
                    match &res.infeasibility {
                        Some(s) => format!("no solved leaf; {s}"),
                        None => format!("{} solved of {} leaves, isomorphic to {}: {}", res.solved, res.leaves, case.target, res.matched),
                    },
                ));
                report.text = format!("{}, n = {n}, k = {k}: {} solved of {} leaves", r.name, res.solved, res.leaves);
                report.result = serde_json::to_value(&res).unwrap();
                write_log(&log, &report.result)?;
                return Ok(());
            }
            let nil = spec.build(n, &r.params)?;
            let sk = build_skeleton(&nil, k, SkeletonMode::NormalForm)?;
            let sol = solve_extension(&sk)?;
            let solved: Vec<_> = sol.solved().collect();
            let infeasible = sol.leaves.iter().filter(|l| l.status() == SolveStatus::Infeasible).count();
            let ok = solved.iter().all(|l| l.leibniz_ok);
            let status = if sol.fragment_limit { Status::Inconclusive } else { Status::from_bool(ok) };
            report.check(Check::new(
                "solved leaves are Leibniz",
                status,
                "solvable extensions in normal form",
                format!("{} solved, {infeasible} infeasible of {} leaves", solved.len(), sol.leaves.len()),
            ));
            report.text = format!(
                "{}, n = {n}, k = {k}: {} equations in {} unknowns, {} leaves",
                r.name,
                sol.equations,
                sol.unknowns,
                sol.leaves.len()
            );
            let leaves: Vec<Value> = sol.leaves.iter().map(|l| l.system.log_json()).collect();
            report.result = json!({
                "equations": sol.equations,
                "unknowns": sol.unknowns,
                "leaves": sol.leaves.len(),
                "solved": solved.len(),
                "infeasible": infeasible,
                "fragment_limit": sol.fragment_limit,
            });
            write_log(&log, &json!({ "leaves": leaves }))?;
        }
    }
    Ok(())
}

/// `D * Perm * L * U` with unit triangular factors, so always invertible.
pub fn random_basis_change(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
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

/// Named lists of classified algebras for pairwise comparison.
pub fn named_list(name: &str) -> Result<&'static [&'static str]> {
    Ok(match name {
        "type1" => &["L1", "L2", "L3", "L4", "L5"],
        "type2" => &["Ltype2_1", "Ltype2_2", "Ltype2_3", "Ltype2_4", "Ltype2_5", "Ltype2_6", "Ltype2_7", "Ltype2_8"],
        "R" => &["R1", "R2", "R3", "R4"],
        "Hc1" => &["Hc1_1", "Hc1_2", "Hc1_3", "Hc1_4", "Hc1_5"],
        "Hc2" => &["Hc2_1", "Hc2_2", "Hc2_3", "Hc2_4", "Hc2_5", "Hc2_6"],
        other => return Err(Error::Input(format!("unknown list `{other}`; valid: type1, type2, R, Hc1, Hc2"))),
    })
}

pub struct FingerprintArgs {
    pub families: Vec<String>,
    pub list: Option<String>,
    pub n: Option<usize>,
    pub params: Vec<String>,
    pub file: Vec<PathBuf>,
    pub pairwise: bool,
    pub basis_changes: usize,
}

pub fn fingerprints(report: &mut RunReport, a: &FingerprintArgs, seed: u64) -> Result<()> {
    let mut algebras: Vec<(String, StructureTensor)> = Vec::new();
    if let Some(list) = &a.list {
        let n = a.n.ok_or_else(|| Error::Input("missing -n".into()))?;
        for key in named_list(list)? {
            let spec = parse_family(key)?.spec;
            for p in spec.sample_grid(n) {
                match spec.build(n, &p) {
                    Ok(t) => algebras.push((display_name(&spec, &p), t)),
                    Err(e) => report.check(Check::new(
                        format!("{} n={n}", display_name(&spec, &p)),
                        Status::Fail,
                        "member of the classified list",
                        e.to_string(),
                    )),
                }
            }
        }
    }
    if a.families.len() > 1 && !a.params.is_empty() {
        return Err(Error::Input("--param is ambiguous with several families; use positional values like L4(2)".into()));
    }
    for f in &a.families {
        let src = Source { family: Some(f.clone()), file: None, n: a.n, params: a.params.clone() };
        let (name, _, t) = algebra(&src)?;
        algebras.push((name, t));
    }
    for path in &a.file {
        algebras.push((path.display().to_string(), load_file(path)?));
    }
    if algebras.is_empty() {
        return Err(Error::Input("nothing to fingerprint".into()));
    }

    let mut text = String::new();
    let mut fps = Vec::new();
    for (name, t) in &algebras {
        let f = fingerprint(t);
        writeln!(
            text,
            "{name}: dim {}, lower central {:?}, derived {:?}, ann_r {}, ann_l {}, center {}, der {}, inner {}, squares {}, lie {}",
            f.dim,
            f.lower_central_dims,
            f.derived_dims,
            f.dim_ann_r,
            f.dim_ann_l,
            f.dim_center,
            f.dim_der,
            f.dim_inner,
            f.dim_squares_ideal,
            f.is_lie
        )
        .unwrap();
        if a.basis_changes > 0 {
            report.seed = Some(seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut broken = None;
            for i in 0..a.basis_changes {
                let p = random_basis_change(&mut rng, t.dim());
                let g = fingerprint(&apply_basis_change(t, &p)?);
                if g != f {
                    broken = Some((i, f.first_difference(&g).unwrap_or("?")));
                    break;
                }
            }
            report.check(Check::new(
                format!("{name}: invariance"),
                Status::from_bool(broken.is_none()),
                "fingerprint is an isomorphism invariant",
                match broken {
                    None => format!("unchanged under {} random basis changes", a.basis_changes),
                    Some((i, field)) => format!("basis change {i} alters {field}"),
                },
            ));
        }
        fps.push(json!({ "name": name, "fingerprint": f }));
    }
    report.result = json!({ "fingerprints": fps });
    if a.pairwise {
        let rep = pairwise_distinguish(&algebras)?;
        text.push_str(&rep.to_text());
        report.result["pairwise"] = serde_json::to_value(&rep).unwrap();
    }
    report.text = text;
    Ok(())
}

pub fn charseq(report: &mut RunReport, src: &Source, samples: usize, seed: u64, expect: Option<Vec<usize>>) -> Result<()> {
    let (name, _, t) = algebra(src)?;
    let c = characteristic_sequence(&t, samples, seed)?;
    if samples > 0 {
        report.seed = Some(seed);
    }
    report.text = format!(
        "{name}: C = {:?} at x = ({}), sample maximum {:?} over {} samples",
        c.sequence,
        c.witness.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "),
        c.sample_max,
        c.samples_tried
    );
    if let Some(e) = expect {
        let ok = c.sequence == e && c.sample_max.as_ref().map_or(true, |m| *m <= e);
        report.check(Check::new(
            "characteristic sequence",
            Status::from_bool(ok),
            "characteristic sequence of the nilradical",
            format!("expected {e:?}, found {:?}", c.sequence),
        ));
    }
    report.result = serde_json::to_value(&c).unwrap();
    Ok(())
}

pub fn grade(report: &mut RunReport, src: &Source) -> Result<()> {
    let (name, _, t) = algebra(src)?;
    let g = natural_grading(&t)?;
    let ann = annihilators(&t);
    report.check(Check::new(
        "naturally graded",
        if g.isomorphic_under_map { Status::Pass } else { Status::Inconclusive },
        "the nilradical is naturally graded",
        if g.isomorphic_under_map {
            "the representative map carries L onto gr(L)".to_string()
        } else {
            "the representative map is not an isomorphism; this does not decide the question".to_string()
        },
    ));
    report.text = format!("{name}: graded pieces {:?}, right annihilator dim {}", g.piece_dims, ann.ann_r.dim());
    report.result = json!({
        "name": name,
        "piece_dims": g.piece_dims,
        "piece_of": g.piece_of,
        "isomorphic_under_map": g.isomorphic_under_map,
        "graded": serde_json::from_str::<Value>(&g.tensor.to_json()).unwrap(),
    });
    Ok(())
}

pub fn split(report: &mut RunReport, n: usize) -> Result<()> {
    let r = split_r2(n)?;
    report.check(Check::new(
        format!("split R2 n={n}"),
        Status::from_bool(r.pass),
        "R2 decomposes into two null-filiform ideals",
        format!(
            "ideals {}/{}, complementary {}, summands match {}/{}",
            r.first_is_ideal, r.second_is_ideal, r.complementary, r.first_matches, r.second_matches
        ),
    ));
    report.result = serde_json::to_value(&r).unwrap();
    Ok(())
}
