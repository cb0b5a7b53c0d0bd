//! Solvable extensions `R = N ⊕ Q` of a nilpotent algebra `N`: skeletons with
//! unknown products, the Leibniz constraints they must satisfy, solving, and
//! the checks used to certify catalog extensions.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{
    is_ideal, is_lie, is_nilpotent_algebra, is_solvable_algebra, leibniz_check, series, squares_ideal, SeriesKind,
    StructureTensor,
};
use crate::derivations::max_nil_independent;
use crate::error::{domain, input, Error, Result};
use crate::linalg::{is_nilpotent_matrix, unit, Subspace, Vector};
use crate::scalar::{q, s, Scalar};
use crate::symbolic::{ConstraintSystem, PolyExpr, ProofStep, Status};

/// Sparse vector with polynomial coordinates (1-based indices).
pub type SymVector = BTreeMap<usize, PolyExpr>;

/// Structure constants that may involve unknowns.
#[derive(Clone, Debug, Default)]
pub struct SymTensor {
    dim: usize,
    prods: BTreeMap<(usize, usize), SymVector>,
    labels: Vec<String>,
}

impl SymTensor {
    pub fn new(dim: usize, labels: Vec<String>) -> Self {
        SymTensor { dim, prods: BTreeMap::new(), labels }
    }

    /// Embeds a numeric tensor into a larger dimension.
    pub fn from_tensor(t: &StructureTensor, dim: usize, labels: Vec<String>) -> Self {
        let mut out = SymTensor::new(dim, labels);
        for (i, j, k, c) in t.entries() {
            out.add(i, j, k, PolyExpr::constant(c));
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i - 1]
    }

    pub fn add(&mut self, i: usize, j: usize, k: usize, p: PolyExpr) {
        if p.is_zero() {
            return;
        }
        let row = self.prods.entry((i, j)).or_default();
        let cur = row.remove(&k).unwrap_or_default();
        let new = &cur + &p;
        if !new.is_zero() {
            row.insert(k, new);
        }
        if row.is_empty() {
            self.prods.remove(&(i, j));
        }
    }

    pub fn product(&self, i: usize, j: usize) -> Option<&SymVector> {
        self.prods.get(&(i, j))
    }

    /// `[e_a, v]`
    fn left_basis(&self, a: usize, v: &SymVector) -> SymVector {
        let mut out = SymVector::new();
        for (t, c) in v {
            if let Some(p) = self.prods.get(&(a, *t)) {
                accumulate(&mut out, c, p);
            }
        }
        out
    }

    /// `[v, e_b]`
    fn right_basis(&self, v: &SymVector, b: usize) -> SymVector {
        let mut out = SymVector::new();
        for (t, c) in v {
            if let Some(p) = self.prods.get(&(*t, b)) {
                accumulate(&mut out, c, p);
            }
        }
        out
    }

    /// Components of `[a,[b,c]] - [[a,b],c] + [[a,c],b]`.
    pub fn leibniz_defect(&self, a: usize, b: usize, c: usize) -> SymVector {
        let empty = SymVector::new();
        let bc = self.prods.get(&(b, c)).unwrap_or(&empty);
        let ab = self.prods.get(&(a, b)).unwrap_or(&empty);
        let ac = self.prods.get(&(a, c)).unwrap_or(&empty);
        let mut out = self.left_basis(a, bc);
        for (k, p) in self.right_basis(ab, c) {
            let cur = out.remove(&k).unwrap_or_default();
            let v = &cur - &p;
            if !v.is_zero() {
                out.insert(k, v);
            }
        }
        accumulate(&mut out, &PolyExpr::constant(Scalar::one()), &self.right_basis(ac, b));
        out
    }

    pub fn substitute(&self, values: &[(String, PolyExpr)]) -> SymTensor {
        let mut out = SymTensor::new(self.dim, self.labels.clone());
        for ((i, j), row) in &self.prods {
            for (k, p) in row {
                let mut v = p.clone();
                for (u, val) in values {
                    v = v.substitute(u, val);
                }
                out.add(*i, *j, *k, v);
            }
        }
        out
    }

    /// Numeric tensor after evaluating every coefficient; unknowns missing
    /// from `at` are an error.
    pub fn instantiate(&self, at: &HashMap<String, Scalar>) -> Result<StructureTensor> {
        let mut t = StructureTensor::new(self.dim);
        for ((i, j), row) in &self.prods {
            for (k, p) in row {
                let v = p
                    .evaluate(at)
                    .ok_or_else(|| Error::Input(format!("unassigned unknown in [{}, {}]", self.label(*i), self.label(*j))))?;
                t.add(*i, *j, *k, v);
            }
        }
        Ok(t.with_labels(self.labels.clone()))
    }

    pub fn unknowns(&self) -> Vec<String> {
        let mut set = std::collections::BTreeSet::new();
        for row in self.prods.values() {
            for p in row.values() {
                set.extend(p.vars());
            }
        }
        set.into_iter().collect()
    }
}

fn accumulate(out: &mut SymVector, c: &PolyExpr, p: &SymVector) {
    for (k, v) in p {
        let cur = out.remove(k).unwrap_or_default();
        let new = &cur + &(c * v);
        if !new.is_zero() {
            out.insert(*k, new);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SkeletonMode {
    /// Every graded piece of `N` is invariant under `Q`; generator diagonals
    /// pinned, everything else inside the pieces unknown.
    NormalForm,
    /// The literal diagonal form with grading weights and `b_i ∈ {0,1}`.
    NormalFormDiagonal,
    /// Products with `Q` left unknown except what the squares ideal forces.
    FreeProbe,
}

#[derive(Clone, Debug)]
pub struct ExtensionSkeleton {
    pub nilradical: StructureTensor,
    pub n: usize,
    pub k: usize,
    pub mode: SkeletonMode,
    /// Piece index (1-based) of each basis vector `e_1..e_n`.
    pub piece_of: Vec<usize>,
    pub generators: Vec<usize>,
    /// `b_i` choices in diagonal mode.
    pub b: Vec<bool>,
    pub tensor: SymTensor,
    /// Unknowns in elimination priority order.
    pub unknowns: Vec<String>,
    /// Symbols kept symbolic throughout (nilradical parameters of a probe).
    pub frozen: Vec<String>,
}

/// Labels `e1..en` followed by `x`, `y` (k <= 2) or `x1..xk`.
pub fn extension_labels(n: usize, k: usize) -> Vec<String> {
    let base: Vec<String> = (1..=n).map(|i| format!("e{i}")).collect();
    with_extension_labels(base, k)
}

fn with_extension_labels(mut l: Vec<String>, k: usize) -> Vec<String> {
    match k {
        1 => l.push("x".into()),
        2 => l.extend(["x".to_string(), "y".to_string()]),
        _ => l.extend((1..=k).map(|j| format!("x{j}"))),
    }
    l
}

/// Basis indices of each quotient of the lower central series; errors unless
/// every term is spanned by basis vectors.
pub fn graded_pieces(t: &StructureTensor) -> Result<Vec<Vec<usize>>> {
    let ser = series(t, SeriesKind::LowerCentral);
    if !ser.reaches_zero() {
        return domain("nilradical must be nilpotent");
    }
    let mut supports = Vec::new();
    for term in &ser.terms {
        match term.coordinate_support() {
            Some(sup) => supports.push(sup),
            None => return domain("lower central series is not spanned by basis vectors"),
        }
    }
    let mut out = Vec::new();
    for w in supports.windows(2) {
        out.push(w[0].iter().filter(|i| !w[1].contains(i)).copied().collect());
    }
    Ok(out)
}

/// Grading weights: generator `g_l` has weight `u_l`; products add weights.
/// `None` if some basis vector receives two different weights.
pub fn generator_weights(t: &StructureTensor, generators: &[usize]) -> Option<Vec<Vec<i64>>> {
    let n = t.dim();
    let m = generators.len();
    let mut w: Vec<Option<Vec<i64>>> = vec![None; n + 1];
    for (l, g) in generators.iter().enumerate() {
        let mut v = vec![0; m];
        v[l] = 1;
        w[*g] = Some(v);
    }
    let mut changed = true;
    while changed {
        changed = false;
        for (i, j, k, _) in t.entries() {
            let (Some(a), Some(b)) = (&w[i], &w[j]) else { continue };
            let sum: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
            match &w[k] {
                Some(cur) if *cur != sum => return None,
                Some(_) => {}
                None => {
                    w[k] = Some(sum);
                    changed = true;
                }
            }
        }
    }
    w.into_iter().skip(1).collect()
}

fn name2(prefix: &str, a: usize, b: usize) -> String {
    format!("{prefix}[{a}][{b}]")
}

fn name3(prefix: &str, a: usize, b: usize, c: usize) -> String {
    format!("{prefix}[{a}][{b}][{c}]")
}

/// Off-diagonal generator unknowns, named `A1, B1, A2, B2` for two
/// generators and two extension elements.
fn generator_offdiag_name(l: usize, j: usize, m: usize, k: usize) -> String {
    if m == 2 && k <= 2 {
        format!("{}{}", if j == 1 { "A" } else { "B" }, l)
    } else {
        format!("g[{l}][{j}]")
    }
}

/// Builds the extension skeleton of `n_alg` by `k` elements.
pub fn build_skeleton(n_alg: &StructureTensor, k: usize, mode: SkeletonMode) -> Result<ExtensionSkeleton> {
    build_skeleton_with(n_alg, k, mode, &vec![false; k])
}

/// As `build_skeleton`, fixing the `b_i` choices of the diagonal form.
pub fn build_skeleton_with(n_alg: &StructureTensor, k: usize, mode: SkeletonMode, b: &[bool]) -> Result<ExtensionSkeleton> {
    if !is_nilpotent_algebra(n_alg) {
        return domain("the algebra to extend must be nilpotent");
    }
    if b.len() != k {
        return input("one b choice per extension element");
    }
    let pieces = graded_pieces(n_alg)?;
    let n = n_alg.dim();
    let mut piece_of = vec![0; n];
    for (p, idx) in pieces.iter().enumerate() {
        for &i in idx {
            piece_of[i - 1] = p + 1;
        }
    }
    let generators = pieces.first().cloned().unwrap_or_default();
    if mode != SkeletonMode::FreeProbe && k > 0 {
        let (bound, cert) = max_nil_independent(n_alg)?;
        let upper = cert.upper.max(bound);
        if k > upper {
            return input(format!(
                "k = {k} exceeds the number of nil-independent derivations ({upper}), so no such extension exists"
            ));
        }
        if k > generators.len() {
            return input("normal form needs k <= number of generators");
        }
    }
    let labels = match n_alg.labels() {
        Some(l) => with_extension_labels(l.to_vec(), k),
        None => extension_labels(n, k),
    };
    let mut t = SymTensor::from_tensor(n_alg, n + k, labels);
    let mut primary: Vec<String> = Vec::new();
    let mut last: Vec<String> = Vec::new();
    let var = |name: String, list: &mut Vec<String>| {
        list.push(name.clone());
        PolyExpr::var(&name)
    };
    let one = || PolyExpr::constant(Scalar::one());
    let xs: Vec<usize> = (n + 1..=n + k).collect();
    let in_piece = |i: usize| -> Vec<usize> { pieces[piece_of[i - 1] - 1].clone() };
    let m = generators.len();
    match mode {
        SkeletonMode::NormalForm => {
            for (j0, &xj) in xs.iter().enumerate() {
                let j = j0 + 1;
                for (l0, &g) in generators.iter().enumerate() {
                    let l = l0 + 1;
                    // right products of generators
                    if l == j {
                        t.add(g, xj, g, one());
                    } else if l > k {
                        t.add(g, xj, g, var(name2("alpha", g, j), &mut primary));
                    }
                    for &h in &generators {
                        if h != g {
                            t.add(g, xj, h, var(generator_offdiag_name(l, j, m, k), &mut last));
                        }
                    }
                    // left products of generators
                    let p = (j - 1) * m + l;
                    for &h in &generators {
                        t.add(xj, g, h, var(name2("mu", p, h), &mut primary));
                    }
                }
                for i in 1..=n {
                    if generators.contains(&i) {
                        continue;
                    }
                    t.add(i, xj, i, var(name2("alpha", i, j), &mut primary));
                    for h in in_piece(i) {
                        if h != i {
                            t.add(i, xj, h, var(name3("alpha", i, j, h), &mut primary));
                        }
                    }
                    for h in in_piece(i) {
                        t.add(xj, i, h, var(name3("beta", j, i, h), &mut primary));
                    }
                }
            }
        }
        SkeletonMode::NormalFormDiagonal => {
            let w = generator_weights(n_alg, &generators).ok_or_else(|| {
                Error::Input("generator weights are path-ambiguous for this basis; use the invariance form".into())
            })?;
            for (j0, &xj) in xs.iter().enumerate() {
                let j = j0 + 1;
                for i in 1..=n {
                    t.add(i, xj, i, PolyExpr::constant(Scalar::from_int(w[i - 1][j0])));
                    let g_j = generators[j0];
                    if i == g_j {
                        t.add(xj, i, i, PolyExpr::constant(Scalar::from_int(b[j0] as i64 - 1)));
                        continue;
                    }
                    for h in in_piece(i) {
                        t.add(xj, i, h, var(name3("beta", j, i, h), &mut primary));
                    }
                }
            }
        }
        SkeletonMode::FreeProbe => {
            let sq = squares_ideal(n_alg);
            let in_ann: Vec<bool> = (1..=n).map(|i| sq.contains_unit(i)).collect();
            for (j0, &xj) in xs.iter().enumerate() {
                let j = j0 + 1;
                for i in 1..=n {
                    for h in 1..=n {
                        // scale of x_j fixed by its action on the j-th generator
                        if j <= m && i == generators[j0] && h == i {
                            t.add(i, xj, h, one());
                        } else if j <= m && generators[..k.min(m)].contains(&i) && i == h {
                            // other pinned generators
                        } else {
                            let nm = if k == 1 { name2("r", i, h) } else { name3("r", j, i, h) };
                            t.add(i, xj, h, var(nm, &mut primary));
                        }
                    }
                    if in_ann[i - 1] {
                        continue;
                    }
                    for h in 1..=n {
                        let nm = if k == 1 { name2("c", i, h) } else { name3("c", j, i, h) };
                        t.add(xj, i, h, var(nm, &mut primary));
                    }
                }
                for (l0, &xl) in xs.iter().enumerate() {
                    for h in 1..=n {
                        t.add(xj, xl, h, var(name3("d", j, l0 + 1, h), &mut primary));
                    }
                }
            }
        }
    }
    primary.sort();
    primary.dedup();
    last.sort();
    last.dedup();
    primary.extend(last);
    Ok(ExtensionSkeleton {
        nilradical: n_alg.clone(),
        n,
        k,
        mode,
        piece_of,
        generators,
        b: b.to_vec(),
        tensor: t,
        unknowns: primary,
        frozen: Vec::new(),
    })
}

/// Every `b` choice of the diagonal form.
pub fn diagonal_skeletons(n_alg: &StructureTensor, k: usize) -> Result<Vec<ExtensionSkeleton>> {
    let mut out = Vec::new();
    for mask in 0..(1usize << k) {
        let b: Vec<bool> = (0..k).map(|j| mask >> j & 1 == 1).collect();
        out.push(build_skeleton_with(n_alg, k, SkeletonMode::NormalFormDiagonal, &b)?);
    }
    Ok(out)
}

/// `[N_i, q] ⊆ N_i` and `[q, N_i] ⊆ N_i` for every graded piece of the
/// leading `n`-dimensional block and every `q` in `q_basis`.
pub fn check_invariance(r: &StructureTensor, n_alg: &StructureTensor, q_basis: &[Vector]) -> Result<bool> {
    let n = n_alg.dim();
    let dim = r.dim();
    if dim < n {
        return input("extension is smaller than the nilradical");
    }
    let lead: Vec<Vector> = (1..=n).map(|i| unit(dim, i)).collect();
    if &r.restrict(&lead)? != n_alg {
        return input("nilradical is not the leading block of the extension");
    }
    let pieces = graded_pieces(n_alg)?;
    for piece in &pieces {
        let span = Subspace::coordinate(dim, piece);
        for &i in piece {
            let e = unit(dim, i);
            for qv in q_basis {
                if !span.contains_vector(&r.bracket(&e, qv)?) || !span.contains_vector(&r.bracket(qv, &e)?) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Leibniz identity on every ordered triple of basis elements, one equation
/// per nonzero component.
pub fn generate_constraints(s: &ExtensionSkeleton) -> Result<ConstraintSystem> {
    let t = &s.tensor;
    let dim = t.dim();
    let mut sys = ConstraintSystem::new(s.unknowns.clone());
    for f in &s.frozen {
        sys.freeze(f);
    }
    for a in 1..=dim {
        for b in 1..=dim {
            for c in 1..=dim {
                for (k, p) in t.leibniz_defect(a, b, c) {
                    let src = format!("LI({}, {}, {})[{}]", t.label(a), t.label(b), t.label(c), t.label(k));
                    if p.vars().is_empty() {
                        return Err(Error::Check(format!("fixed products violate the identity at {src}: {p}")));
                    }
                    sys.add_equation(p, src);
                }
            }
        }
    }
    Ok(sys)
}

/// One leaf of the solve tree.
#[derive(Clone, Debug)]
pub struct SolvedLeaf {
    pub system: ConstraintSystem,
    /// Tensor with every substitution applied; free unknowns remain symbolic.
    pub tensor: SymTensor,
    /// Instantiation with free unknowns set to zero (solved leaves only).
    pub instance: Option<StructureTensor>,
    pub leibniz_ok: bool,
}

impl SolvedLeaf {
    pub fn status(&self) -> Status {
        self.system.status()
    }

    pub fn free_unknowns(&self) -> Vec<String> {
        self.tensor.unknowns()
    }

    /// Instantiates with the given values; unknowns not listed are set to zero.
    pub fn instantiate(&self, values: &[(&str, Scalar)]) -> Result<StructureTensor> {
        let mut at: HashMap<String, Scalar> = self.free_unknowns().into_iter().map(|u| (u, Scalar::zero())).collect();
        for (u, v) in values {
            at.insert(u.to_string(), v.clone());
        }
        self.tensor.instantiate(&at)
    }

    pub fn value_of(&self, name: &str) -> PolyExpr {
        self.system.value_of(name)
    }
}

#[derive(Clone, Debug)]
pub struct ExtensionSolution {
    pub leaves: Vec<SolvedLeaf>,
    pub equations: usize,
    pub unknowns: usize,
    /// Some leaf stopped outside the supported fragment.
    pub fragment_limit: bool,
}

impl ExtensionSolution {
    pub fn solved(&self) -> impl Iterator<Item = &SolvedLeaf> {
        self.leaves.iter().filter(|l| l.status() == Status::Solved)
    }
}

/// Generates, eliminates and branches; solved leaves are instantiated with
/// free unknowns at zero and re-checked with the exact identity test.
pub fn solve_extension(s: &ExtensionSkeleton) -> Result<ExtensionSolution> {
    let sys = generate_constraints(s)?;
    let equations = sys.equations().len();
    let leaves = sys.solve();
    let fragment_limit = leaves.iter().any(|l| l.flag.is_some());
    let mut out = Vec::new();
    for sys in leaves {
        let tensor = s.tensor.substitute(sys.substitutions());
        let (instance, ok) = if sys.status() == Status::Solved {
            let zero: HashMap<String, Scalar> = tensor.unknowns().into_iter().map(|u| (u, Scalar::zero())).collect();
            let inst = tensor.instantiate(&zero)?;
            let ok = leibniz_check(&inst).pass;
            (Some(inst), ok)
        } else {
            (None, false)
        };
        out.push(SolvedLeaf { system: sys, tensor, instance, leibniz_ok: ok });
    }
    Ok(ExtensionSolution { leaves: out, equations, unknowns: s.unknowns.len(), fragment_limit })
}

/// Evidence that `N = span(e_1..e_n)` is the nilradical of `R`.
#[derive(Clone, Debug, Serialize)]
pub struct NilradicalCertificate {
    pub ideal_check: bool,
    pub nilpotency_check: bool,
    /// Tested elements outside `N` with non-nilpotent right multiplication,
    /// as coefficient strings.
    pub nonnilpotent_right_mults: Vec<Vec<Scalar>>,
    /// Tested elements whose right multiplication was nilpotent.
    pub failures: Vec<Vec<Scalar>>,
    pub sampled_mixed_elements: usize,
    pub seed: u64,
}

impl NilradicalCertificate {
    pub fn valid(&self) -> bool {
        self.ideal_check && self.nilpotency_check && self.failures.is_empty()
    }
}

const SAMPLE_VALUES: [(i64, i64); 8] = [(1, 1), (-1, 1), (2, 1), (-2, 1), (1, 2), (-1, 2), (3, 1), (-3, 1)];

fn sample_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    let (a, b) = *SAMPLE_VALUES.choose(rng).expect("nonempty");
    q(a, b)
}

/// Checks that the first `n` basis vectors span a nilpotent ideal and that
/// `R_y` is not nilpotent for each `Q` basis vector and for `samples`
/// random `y = q + v` with `q != 0`.
pub fn nilradical_certificate(r: &StructureTensor, n: usize, samples: usize, seed: u64) -> Result<NilradicalCertificate> {
    let dim = r.dim();
    let lead: Vec<Vector> = (1..=n).map(|i| unit(dim, i)).collect();
    let ideal_check = is_ideal(r, &Subspace::coordinate(dim, &(1..=n).collect::<Vec<_>>()))?;
    let nilpotency_check = ideal_check && is_nilpotent_algebra(&r.restrict(&lead)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tests: Vec<Vector> = (n + 1..=dim).map(|i| unit(dim, i)).collect();
    for _ in 0..samples {
        let mut y = vec![Scalar::zero(); dim];
        for c in y.iter_mut().take(n) {
            *c = sample_scalar(&mut rng);
        }
        // nonzero Q-component
        loop {
            for c in y.iter_mut().skip(n) {
                *c = if rand::Rng::gen_bool(&mut rng, 0.75) { sample_scalar(&mut rng) } else { Scalar::zero() };
            }
            if y[n..].iter().any(|c| !c.is_zero()) {
                break;
            }
        }
        tests.push(y);
    }
    let mut good = Vec::new();
    let mut bad = Vec::new();
    for y in tests {
        if is_nilpotent_matrix(&r.right_mult(&y))? {
            bad.push(y);
        } else {
            good.push(y);
        }
    }
    Ok(NilradicalCertificate {
        ideal_check,
        nilpotency_check,
        nonnilpotent_right_mults: good,
        failures: bad,
        sampled_mixed_elements: samples,
        seed,
    })
}

/// Parameter symbols of a parametric nilradical.
pub const PARAM_SYMBOLS: [&str; 3] = ["par_alpha", "par_beta", "par_gamma"];

/// A nilradical family whose coefficients are affine in `(a, b, g)`, with
/// those parameters as symbols. Affinity is verified at an extra point.
pub fn parametric_nilradical(build: impl Fn(&[Scalar; 3]) -> StructureTensor, dim: usize, labels: Vec<String>) -> Result<SymTensor> {
    let base = build(&[s(0), s(0), s(0)]);
    let units = [[s(1), s(0), s(0)], [s(0), s(1), s(0)], [s(0), s(0), s(1)]];
    let mut out = SymTensor::from_tensor(&base, dim, labels);
    for (p, u) in units.iter().enumerate() {
        let t = build(u);
        let mut keys: Vec<(usize, usize, usize)> = t.entries().into_iter().map(|(i, j, k, _)| (i, j, k)).collect();
        keys.extend(base.entries().into_iter().map(|(i, j, k, _)| (i, j, k)));
        keys.sort();
        keys.dedup();
        for (i, j, k) in keys {
            let d = &t.coeff(i, j, k) - &base.coeff(i, j, k);
            if !d.is_zero() {
                out.add(i, j, k, PolyExpr::var(PARAM_SYMBOLS[p]).scale(&d));
            }
        }
    }
    // affinity check at (2, 3, 5)
    let probe = [s(2), s(3), s(5)];
    let at: HashMap<String, Scalar> = PARAM_SYMBOLS.iter().map(|p| p.to_string()).zip(probe.iter().cloned()).collect();
    let expected = build(&probe);
    let mut got = StructureTensor::new(expected.dim());
    for (i, j, k, c) in expected.entries() {
        let v = out.product(i, j).and_then(|r| r.get(&k)).and_then(|p| p.evaluate(&at)).unwrap_or_default();
        if v != c {
            return Err(Error::Invariant("nilradical coefficients are not affine in the parameters".into()));
        }
        got.set(i, j, k, v);
    }
    for ((i, j), row) in &out.prods {
        for (k, p) in row {
            if p.evaluate(&at).unwrap_or_default() != expected.coeff(*i, *j, *k) {
                return Err(Error::Invariant("nilradical coefficients are not affine in the parameters".into()));
            }
        }
    }
    Ok(out)
}

/// Report of the codimension-one probe over `L(a,b,g)`.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub abg: [Scalar; 3],
    pub n: usize,
    /// All leaves of the concrete run are infeasible.
    pub infeasible: bool,
    pub leaves: usize,
    pub fragment_limit: bool,
    /// Equations in the parameters alone left by the parametric run.
    pub deduced_facts: Vec<String>,
    /// Assumptions of the parametric run.
    pub hypotheses: Vec<String>,
    /// Deduced facts that fail at the row's own parameters.
    pub row_contradictions: Vec<String>,
    /// Remaining parametric equations that still involve unknowns.
    pub parametric_residual: Vec<String>,
    pub log: Vec<ProofStep>,
    pub parametric_log: Vec<ProofStep>,
}

fn probe_skeleton(n_alg: &StructureTensor, k: usize) -> Result<ExtensionSkeleton> {
    build_skeleton(n_alg, k, SkeletonMode::FreeProbe)
}

/// Searches for a one-dimensional solvable extension of `L(a,b,g)` with
/// unknown products, both at the given parameters and with the parameters
/// kept symbolic.
pub fn probe_codim1_l(abg: &[Scalar; 3], n: usize) -> Result<ProbeReport> {
    let spec = crate::catalog::find_spec("L")?;
    let p = crate::catalog::Params::abg(abg[0].clone(), abg[1].clone(), abg[2].clone());
    let n_alg = spec.build(n, &p)?;
    let skel = probe_skeleton(&n_alg, 1)?;
    let sol = solve_extension(&skel)?;
    let infeasible = sol.leaves.iter().all(|l| l.status() == Status::Infeasible);
    let log = sol.leaves.first().map(|l| l.system.log.clone()).unwrap_or_default();

    // same skeleton with the nilradical parameters as frozen symbols
    let labels = extension_labels(n, 1);
    let sym = parametric_nilradical(
        |v| spec.table(n, &crate::catalog::Params::abg(v[0].clone(), v[1].clone(), v[2].clone())).expect("L table"),
        n + 1,
        labels,
    )?;
    let mut pskel = skel.clone();
    let mut t = sym;
    for ((i, j), row) in &skel.tensor.prods {
        if *i > n || *j > n {
            for (k, v) in row {
                t.add(*i, *j, *k, v.clone());
            }
        }
    }
    pskel.tensor = t;
    pskel.frozen = PARAM_SYMBOLS.iter().map(|s| s.to_string()).collect();
    // the row's derivation restrictions, as used in the nonexistence argument
    let mut psys = generate_constraints(&pskel)?;
    psys.add_equation(PolyExpr::var(&format!("r[1][{}]", n - 1)), "hypothesis a_{n-1} = 0");
    psys.add_equation(
        &PolyExpr::var(&format!("r[{0}][{0}]", n - 1)) - &PolyExpr::constant(Scalar::one()),
        "hypothesis b_{n-1} = a_1",
    );
    // [x,e]+[e,x] lies in Ann_r(R), which has no e_1 or e_{n-1} component
    // once (beta, gamma) != (0, 0)
    for i in 1..=n {
        for t in [1, n - 1] {
            let (c, r) = (format!("c[{i}][{t}]"), format!("r[{i}][{t}]"));
            let known = |u: &str| pskel.unknowns.iter().any(|v| v == u);
            let mut e = PolyExpr::zero();
            if known(&c) {
                e = &e + &PolyExpr::var(&c);
            }
            if known(&r) {
                e = &e + &PolyExpr::var(&r);
            } else if i == t && i == 1 {
                e = &e + &PolyExpr::constant(Scalar::one());
            }
            if !e.is_zero() {
                psys.add_equation(e, format!("hypothesis [x,e{i}] + [e{i},x] in Ann_r [e{t}]"));
            }
        }
    }
    let psys = psys.linear_eliminate();
    let facts = reduce_facts(psys.deductions());
    let mut parametric_log = psys.log.clone();
    for f in &facts {
        parametric_log.push(ProofStep::Deduce { fact: f.clone(), source: "parameter equations left after elimination".into() });
    }
    let at: HashMap<String, Scalar> = PARAM_SYMBOLS.iter().map(|p| p.to_string()).zip(abg.iter().cloned()).collect();
    let row_contradictions = facts
        .iter()
        .filter(|f| f.evaluate(&at).is_some_and(|v| !v.is_zero()))
        .map(|f| format!("{} = 0", pretty_params(f)))
        .collect();
    let deduced_facts = facts.iter().map(|d| format!("{} = 0", pretty_params(d))).collect();
    let parametric_residual = psys
        .equations()
        .iter()
        .filter(|e| PARAM_SYMBOLS.iter().any(|p| e.contains_var(p)))
        .map(|e| format!("{} = 0", pretty_params(e)))
        .collect();
    Ok(ProbeReport {
        abg: abg.clone(),
        n,
        infeasible,
        leaves: sol.leaves.len(),
        fragment_limit: sol.fragment_limit,
        deduced_facts,
        row_contradictions,
        parametric_residual,
        log,
        hypotheses: vec![
            "a_{n-1} = 0 and b_{n-1} = a_1 (derivation restrictions of the codimension-one rows)".into(),
            "Ann_r(R) has no e_1 or e_{n-1} component, as (beta, gamma) != (0, 0)".into(),
            "squares-ideal elements annihilate from the right".into(),
        ],
        parametric_log,
    })
}

/// Substitutes facts of the form `p - c = 0` into the others until none is
/// left to use; returns the reduced, deduplicated facts.
fn reduce_facts(facts: Vec<PolyExpr>) -> Vec<PolyExpr> {
    let mut facts: Vec<PolyExpr> = facts.into_iter().map(|f| f.monic()).collect();
    let mut used: Vec<PolyExpr> = Vec::new();
    loop {
        let pos = facts.iter().position(|f| {
            f.vars().len() == 1 && f.degree() == 1 && !used.contains(f)
        });
        let Some(k) = pos else { break };
        let f = facts[k].clone();
        let v = f.vars().into_iter().next().expect("one variable");
        let (c, rest) = f.linear_in(&v).expect("degree one");
        let value = rest.scale(&-c.inv().expect("nonzero"));
        used.push(f.clone());
        let mut next = vec![f.clone()];
        for (j, g) in facts.iter().enumerate() {
            if j == k {
                continue;
            }
            let h = g.substitute(&v, &value).monic();
            if !h.is_zero() && !next.contains(&h) {
                next.push(h);
            }
        }
        facts = next;
    }
    facts.sort_by_key(|f| (f.degree(), f.to_string()));
    facts
}

fn pretty_params(p: &PolyExpr) -> String {
    p.to_string().replace("par_alpha", "alpha").replace("par_beta", "beta").replace("par_gamma", "gamma")
}

/// One named sub-check of a verification report.
#[derive(Clone, Debug, Serialize)]
pub struct SubCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl SubCheck {
    fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        SubCheck { name: name.into(), pass, detail: detail.into() }
    }
}

/// Residuals of the codim-2 restriction system over `L(a,b,g)` at the
/// constants `A1` and `mu4`; every entry is zero for an admissible table.
pub fn restriction_system_l(abg: &[Scalar; 3], a1: &Scalar, mu4: &Scalar) -> Vec<(String, Scalar)> {
    let [a, b, g] = abg;
    let one = Scalar::one();
    let b1 = &one + b;
    let a1g = a1 * g;
    let shift = &a1g - &(&(a1 * a) * &b1);
    let xn = b + &a1g;
    vec![
        ("alpha + A1 alpha^2".into(), a + &(a1 * &(a * a))),
        ("gamma (1 + A1 gamma - A1 alpha (1 + beta))".into(), g * &(&one + &shift)),
        ("gamma A1 - beta A1 (gamma - alpha (1 + beta))".into(), &a1g - &(&(b * a1) * &(g - &(a * &b1)))),
        ("mu4 (1 + mu4)".into(), mu4 * &(&one + mu4)),
        (
            "(beta + A1 gamma)(1 - A1 gamma + A1 alpha (1 + beta) + mu4 (1 + A1 gamma))".into(),
            &xn * &(&(&one - &shift) + &(mu4 * &(&one + &a1g))),
        ),
        ("gamma (beta + A1 gamma)".into(), g * &xn),
        ("gamma mu4 alpha".into(), &(g * mu4) * a),
        ("gamma mu4 (1 + A1 gamma)".into(), &(g * mu4) * &(&one + &a1g)),
        ("mu4 alpha (1 + beta)".into(), &(mu4 * a) * &b1),
        ("beta (1 + beta + A1 gamma) + A1 gamma".into(), &(b * &(&b1 + &a1g)) + &a1g),
        ("mu4 (1 + beta (1 + A1 gamma) + A1 gamma)".into(), mu4 * &(&(&one + &(b * &(&one + &a1g))) + &a1g)),
    ]
}

/// Residuals of the codim-2 restriction system over `G(a,b,g)`.
pub fn restriction_system_g(abg: &[Scalar; 3], a1: &Scalar, n: usize) -> Vec<(String, Scalar)> {
    let [a, b, g] = abg;
    let sg = if n % 2 == 0 { Scalar::one() } else { -Scalar::one() };
    vec![
        ("2 A1 gamma - beta - A1 beta^2".into(), &(&(&s(2) * a1) * g) - &(b + &(a1 * &(b * b)))),
        ("gamma (2 + A1 beta)".into(), g * &(&s(2) + &(a1 * b))),
        ("alpha (1 - (-1)^n A1 alpha)".into(), a * &(&Scalar::one() - &(&(&sg * a1) * a))),
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionVerification {
    pub family: String,
    pub n: usize,
    pub params: crate::catalog::Params,
    pub checks: Vec<SubCheck>,
    pub certificate: Option<NilradicalCertificate>,
    /// Constants read off the table for the general form.
    pub constants: Vec<(String, Scalar)>,
    pub restriction_residuals: Vec<(String, Scalar)>,
    pub pass: bool,
}

/// Runs the five sub-checks on a solvable catalog family: Leibniz identity,
/// solvable but not nilpotent, nilpotent ideal, nilradical certificate
/// (`samples` mixed elements from `seed`), and membership in the general
/// form together with its restriction system.
pub fn verify_catalog_extension(name: &str, n: usize, params: &crate::catalog::Params, samples: usize, seed: u64) -> Result<ExtensionVerification> {
    use crate::catalog::{find_spec, g_codim1_general, g_codim2_general, l_codim2_general, Group};
    let spec = find_spec(name)?;
    if !matches!(spec.group, Group::SolvableLCodim2 | Group::SolvableGCodim1 | Group::SolvableGCodim2) {
        return input(format!("{} is not a solvable extension family", spec.name));
    }
    let t = spec.table(n, params)?;
    let (_, abg) = spec.nilradical_params(params).expect("extension families carry a nilradical");
    let mut checks = Vec::new();

    let rep = leibniz_check(&t);
    let detail = match rep.violations.first() {
        None => "identity holds on all triples".to_string(),
        Some(v) => format!(
            "{} violating triples, first ({}, {}, {})",
            rep.violations.len(),
            t.label(v.triple.0),
            t.label(v.triple.1),
            t.label(v.triple.2)
        ),
    };
    checks.push(SubCheck::new("leibniz", rep.pass, detail));

    let solvable = is_solvable_algebra(&t);
    let nilpotent = is_nilpotent_algebra(&t);
    checks.push(SubCheck::new(
        "solvable-non-nilpotent",
        solvable && !nilpotent,
        format!("derived series reaches zero: {solvable}; lower central series reaches zero: {nilpotent}"),
    ));

    let cert = nilradical_certificate(&t, n, samples, seed)?;
    checks.push(SubCheck::new(
        "nilpotent-ideal",
        cert.ideal_check && cert.nilpotency_check,
        format!("two-sided ideal: {}; nilpotent: {}", cert.ideal_check, cert.nilpotency_check),
    ));
    checks.push(SubCheck::new(
        "nilradical-certificate",
        cert.valid(),
        format!(
            "{} of {} tested elements have non-nilpotent right multiplication (seed {seed})",
            cert.nonnilpotent_right_mults.len(),
            cert.nonnilpotent_right_mults.len() + cert.failures.len()
        ),
    ));

    let (x, y) = (n + 1, n + 2);
    let (general, constants, residuals) = match spec.group {
        Group::SolvableLCodim2 => {
            let a1 = t.coeff(1, x, n - 1);
            let mu4 = t.coeff(y, n - 1, n - 1);
            let gen = l_codim2_general(n, &abg[0], &abg[1], &abg[2], &a1, &mu4);
            let res = restriction_system_l(&abg, &a1, &mu4);
            (gen, vec![("A1".to_string(), a1), ("mu4".to_string(), mu4)], res)
        }
        Group::SolvableGCodim2 => {
            let a1 = t.coeff(1, x, 3);
            let gen = g_codim2_general(n, &abg[0], &abg[1], &abg[2], &a1);
            (gen, vec![("A1".to_string(), a1.clone())], restriction_system_g(&abg, &a1, n))
        }
        _ => {
            // codim 1: R_x on N must satisfy the row's restrictions a_3 = 0, b_3 = a_1
            let gen = g_codim1_general(n, &abg[0], &abg[1], &abg[2]);
            let a1 = t.coeff(1, x, 1);
            let a3 = t.coeff(1, x, 3);
            let b3 = t.coeff(3, x, 3);
            let res = vec![("a_3".to_string(), a3), ("b_3 - a_1".to_string(), &b3 - &a1)];
            (gen, vec![("a_1".to_string(), a1)], res)
        }
    };
    let form_ok = general == t;
    let bad: Vec<&str> = residuals.iter().filter(|(_, v)| !v.is_zero()).map(|(k, _)| k.as_str()).collect();
    checks.push(SubCheck::new(
        "restriction-system",
        form_ok && bad.is_empty(),
        format!(
            "table {} the general form; {}",
            if form_ok { "equals" } else { "differs from" },
            if bad.is_empty() { "all restrictions vanish".to_string() } else { format!("nonzero: {}", bad.join("; ")) }
        ),
    ));
    let pass = checks.iter().all(|c| c.pass);
    Ok(ExtensionVerification {
        family: spec.name.to_string(),
        n,
        params: params.clone(),
        checks,
        certificate: Some(cert),
        constants,
        restriction_residuals: residuals,
        pass,
    })
}

/// `e'_1 = e_1 + A1 e_{n-1}`, `e'_2 = e_2 + A1 (1 + beta) e_n`: removes `A1`
/// from the codim-2 extensions of `L(0,beta,0)`.
pub fn absorb_a1_l(n: usize, beta: &Scalar, a1: &Scalar) -> crate::linalg::Matrix {
    let mut p = crate::linalg::Matrix::identity(n + 2);
    p[(n - 2, 0)] = a1.clone();
    p[(n - 1, 1)] = a1 * &(&Scalar::one() + beta);
    p
}

/// `e'_1 = e_1 + A1 e_3`: removes `A1` from the codim-2 extensions of `G(0,0,0)`.
pub fn absorb_a1_g(n: usize, a1: &Scalar) -> crate::linalg::Matrix {
    let mut p = crate::linalg::Matrix::identity(n + 2);
    p[(2, 0)] = a1.clone();
    p
}

/// A classification case to re-derive: nilradical, number of extension
/// elements and the expected family.
#[derive(Clone, Debug, Serialize)]
pub struct RederivationCase {
    pub shape: crate::catalog::NilShape,
    pub abg: [Scalar; 3],
    pub k: usize,
    pub target: String,
    pub target_params: crate::catalog::Params,
}

/// The codim-2 `L` cases, the codim-1 `G` cases and the codim-2 `G` cases.
pub fn rederivation_cases() -> Vec<RederivationCase> {
    use crate::catalog::{NilShape, Params};
    let c = |shape, a: i64, b: i64, g: i64, k, target: &str, p: Params| RederivationCase {
        shape,
        abg: [s(a), s(b), s(g)],
        k,
        target: target.into(),
        target_params: p,
    };
    let none = Params::new;
    vec![
        c(NilShape::L, 0, 0, 0, 2, "R1", Params::new().with("b", s(0))),
        c(NilShape::L, 0, -1, 0, 2, "R1", Params::new().with("b", s(-1))),
        c(NilShape::L, 0, 1, 1, 2, "R2", none()),
        c(NilShape::L, 1, -1, 0, 2, "R3", none()),
        c(NilShape::L, 1, 0, 0, 2, "R4", none()),
        c(NilShape::G, 0, 0, 1, 1, "Hc1_1", none()),
        c(NilShape::G, 1, 2, 0, 1, "Hc1_2", none()),
        c(NilShape::G, 1, 0, 3, 1, "Hc1_3", Params::new().with("g", s(3))),
        c(NilShape::G, 1, -2, 1, 1, "Hc1_4", none()),
        c(NilShape::G, 1, 4, 2, 1, "Hc1_5", none()),
        c(NilShape::G, 0, 0, 0, 2, "Hc2_1", none()),
        c(NilShape::G, 0, 1, 0, 2, "Hc2_2", none()),
        c(NilShape::G, 0, 2, 1, 2, "Hc2_3", none()),
        c(NilShape::G, 1, 0, 0, 2, "Hc2_4", none()),
        c(NilShape::G, 1, 1, 0, 2, "Hc2_5", none()),
        c(NilShape::G, 1, 2, 1, 2, "Hc2_6", none()),
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct InstanceMatch {
    /// Values given to the leaf's free unknowns.
    pub free_values: Vec<(String, Scalar)>,
    pub basis_change: String,
    pub isomorphic: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RederivationResult {
    pub nilradical: String,
    pub n: usize,
    pub k: usize,
    pub target: String,
    pub leaves: usize,
    pub solved: usize,
    pub infeasible: usize,
    pub fragment_limit: bool,
    pub matches: Vec<InstanceMatch>,
    /// Some solved leaf matches the target at every sampled point.
    pub matched: bool,
    /// Proof step that closed the last infeasible leaf.
    pub infeasibility: Option<String>,
}

/// Solves the normal-form skeleton of the case at size `n` and compares each
/// solved leaf with the target family, after the basis change that absorbs
/// the remaining free constant. Free unknowns are sampled at 0 and at 1.
pub fn rederive(case: &RederivationCase, n: usize) -> Result<RederivationResult> {
    use crate::catalog::{find_spec, NilShape, Params};
    let key = match case.shape {
        NilShape::L => "L",
        NilShape::G => "G",
        NilShape::Lnr => return input("re-derivation covers the L and G nilradicals"),
    };
    let nil = find_spec(key)?.build(n, &Params::abg(case.abg[0].clone(), case.abg[1].clone(), case.abg[2].clone()))?;
    let target = find_spec(&case.target)?.table(n, &case.target_params)?;
    let sk = build_skeleton(&nil, case.k, SkeletonMode::NormalForm)?;
    let sol = solve_extension(&sk)?;
    let zero_abg = case.abg.iter().all(Scalar::is_zero);
    let l_first = case.shape == NilShape::L && case.abg[0].is_zero() && case.abg[2].is_zero();
    let mut matches = Vec::new();
    let mut matched = false;
    for leaf in sol.solved() {
        let free = leaf.free_unknowns();
        let mut all = true;
        for v in [Scalar::zero(), Scalar::one()] {
            let values: Vec<(String, Scalar)> = free.iter().map(|u| (u.clone(), v.clone())).collect();
            let refs: Vec<(&str, Scalar)> = values.iter().map(|(u, v)| (u.as_str(), v.clone())).collect();
            let inst = leaf.instantiate(&refs)?;
            let x = n + 1;
            let (p, what) = if case.k == 2 && l_first {
                let a1 = inst.coeff(1, x, n - 1);
                (absorb_a1_l(n, &case.abg[1], &a1), format!("e1' = e1 + A1 e{}, e2' = e2 + A1(1 + beta) e{n}, A1 = {a1}", n - 1))
            } else if case.k == 2 && case.shape == NilShape::G && zero_abg {
                let a1 = inst.coeff(1, x, 3);
                (absorb_a1_g(n, &a1), format!("e1' = e1 + A1 e3, A1 = {a1}"))
            } else {
                (crate::linalg::Matrix::identity(n + case.k), "identity".to_string())
            };
            let iso = crate::algebra::is_isomorphism(&inst, &target, &p)?;
            all &= iso;
            matches.push(InstanceMatch { free_values: values, basis_change: what, isomorphic: iso });
            if free.is_empty() {
                break;
            }
        }
        matched |= all;
    }
    let infeasibility = sol
        .leaves
        .iter()
        .filter(|l| l.status() == Status::Infeasible)
        .filter_map(|l| l.system.log.last().map(|s| s.to_string()))
        .last();
    Ok(RederivationResult {
        nilradical: format!("{key}({},{},{})", case.abg[0], case.abg[1], case.abg[2]),
        n,
        k: case.k,
        target: case.target.clone(),
        leaves: sol.leaves.len(),
        solved: sol.solved().count(),
        infeasible: sol.leaves.iter().filter(|l| l.status() == Status::Infeasible).count(),
        fragment_limit: sol.fragment_limit,
        matches,
        matched,
        infeasibility,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitReport {
    pub n: usize,
    pub first_is_ideal: bool,
    pub second_is_ideal: bool,
    pub complementary: bool,
    pub first_matches: bool,
    pub second_matches: bool,
    pub pass: bool,
}

/// `NF_{n-2}` extended by `x` with `[e_i, x] = i e_i`, basis `e_1..e_{n-2}, x`.
pub fn split_summand_first(n: usize) -> StructureTensor {
    let m = n - 2;
    let x = m + 1;
    let mut t = StructureTensor::new(m + 1);
    for i in 1..m {
        t.set(i, 1, i + 1, s(1));
    }
    for i in 1..=m {
        t.set(i, x, i, s(i as i64));
    }
    t.set(x, 1, 1, s(-1));
    t
}

/// `NF_2` extended by `y`, basis `e_{n-1}, e_n, y`.
pub fn split_summand_second() -> StructureTensor {
    let mut t = StructureTensor::new(3);
    t.set(1, 1, 2, s(1));
    t.set(1, 3, 1, s(1));
    t.set(2, 3, 2, s(2));
    t.set(3, 1, 1, s(-1));
    t
}

/// Applies `e'_1 = e_1 - e_{n-1}`, `e'_2 = e_2 - e_n` to `R2` and checks the
/// result is the direct sum of the two null-filiform extensions.
pub fn split_r2(n: usize) -> Result<SplitReport> {
    use crate::catalog::{find_spec, Params};
    let t = find_spec("R2")?.build(n, &Params::new())?;
    let dim = n + 2;
    let mut p = crate::linalg::Matrix::identity(dim);
    p[(n - 2, 0)] = s(-1);
    p[(n - 1, 1)] = s(-1);
    let u = crate::algebra::apply_basis_change(&t, &p)?;
    let first: Vec<usize> = (1..=n - 2).chain([n + 1]).collect();
    let second = vec![n - 1, n, n + 2];
    let a = Subspace::coordinate(dim, &first);
    let b = Subspace::coordinate(dim, &second);
    let first_is_ideal = is_ideal(&u, &a)?;
    let second_is_ideal = is_ideal(&u, &b)?;
    let complementary = a.dim() + b.dim() == dim && crate::linalg::subspace_intersect(&a, &b)?.dim() == 0;
    let ra = u.restrict(&first.iter().map(|&i| unit(dim, i)).collect::<Vec<_>>())?;
    let rb = u.restrict(&second.iter().map(|&i| unit(dim, i)).collect::<Vec<_>>())?;
    let first_matches = ra == split_summand_first(n);
    let second_matches = rb == split_summand_second();
    Ok(SplitReport {
        n,
        first_is_ideal,
        second_is_ideal,
        complementary,
        first_matches,
        second_matches,
        pass: first_is_ideal && second_is_ideal && complementary && first_matches && second_matches,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LieProbeReport {
    pub n: usize,
    pub r: usize,
    /// For `e_{n-2}` and `e_{n-1}`: a product `[q, e]` with a nonzero
    /// constant coefficient after elimination, as text.
    pub not_in_ann_r: Vec<String>,
    pub leaves: usize,
    pub solved: usize,
    pub fragment_limit: bool,
    /// Squares ideal is zero on every solved leaf.
    pub squares_zero: bool,
    pub all_lie: bool,
    pub pass: bool,
}

/// Free two-element extension of `Lnr(n,r)`: shows `e_{n-2}, e_{n-1}` are
/// not right annihilators, then solves and checks every solved leaf is Lie.
pub fn lie_probe(n: usize, r: usize) -> Result<LieProbeReport> {
    use crate::catalog::{find_spec, Params};
    let nil = find_spec("Lnr")?.build(n, &Params::new().with("r", s(r as i64)))?;
    let sk = build_skeleton(&nil, 2, SkeletonMode::FreeProbe)?;
    let sys = generate_constraints(&sk)?.linear_eliminate();
    let t = sk.tensor.substitute(sys.substitutions());
    // basis label e_k sits at index k + 1
    let mut not_in_ann_r = Vec::new();
    for e in [n - 1, n] {
        let mut found = None;
        'search: for q in [n + 1, n + 2] {
            if let Some(row) = t.product(q, e) {
                for (k, c) in row {
                    if let Some(v) = c.as_constant() {
                        found = Some(format!("[{}, {}] has {}-coefficient {v}", t.label(q), t.label(e), t.label(*k)));
                        break 'search;
                    }
                }
            }
        }
        not_in_ann_r.push(found.unwrap_or_else(|| format!("{}: no constant witness", t.label(e))));
    }
    let witnesses = not_in_ann_r.iter().all(|w| !w.contains("no constant witness"));
    let leaves = sys.solve();
    let fragment_limit = leaves.iter().any(|l| l.flag.is_some());
    let mut solved = 0;
    let mut squares_zero = true;
    let mut all_lie = true;
    for leaf in leaves.iter().filter(|l| l.status() == Status::Solved) {
        solved += 1;
        let lt = sk.tensor.substitute(leaf.substitutions());
        for v in [Scalar::zero(), Scalar::one()] {
            let at: HashMap<String, Scalar> = lt.unknowns().into_iter().map(|u| (u, v.clone())).collect();
            let inst = lt.instantiate(&at)?;
            squares_zero &= squares_ideal(&inst).dim() == 0;
            all_lie &= is_lie(&inst);
        }
    }
    Ok(LieProbeReport {
        n,
        r,
        pass: witnesses && solved > 0 && squares_zero && all_lie && !fragment_limit,
        not_in_ann_r,
        leaves: leaves.len(),
        solved,
        fragment_limit,
        squares_zero,
        all_lie,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_extension_is_the_algebra() {
        let mut t = StructureTensor::new(3);
        t.set(1, 1, 2, s(1));
        t.set(2, 1, 3, s(1));
        let sk = build_skeleton(&t, 0, SkeletonMode::NormalForm).unwrap();
        assert_eq!(sk.tensor.dim(), 3);
        assert!(generate_constraints(&sk).unwrap().equations().is_empty());
    }
}
