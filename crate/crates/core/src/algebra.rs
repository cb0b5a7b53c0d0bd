//! Structure-constant tensors and the basic structure theory built on them:
//! the Leibniz identity, series, annihilators, ideals, basis changes and the
//! natural grading.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, input, Error, Result};
use crate::linalg::{add_scaled, is_zero_vector, unit, zero_vector, Matrix, Subspace, Vector};
use crate::scalar::Scalar;

type Row = BTreeMap<usize, Scalar>;

/// `[e_i, e_j] = sum_t gamma(i,j,t) e_t` with 1-based indices and no stored zeros.
#[derive(Clone, Debug)]
pub struct StructureTensor {
    dim: usize,
    products: BTreeMap<(usize, usize), Row>,
    labels: Option<Vec<String>>,
}

impl PartialEq for StructureTensor {
    /// Labels are presentation only and do not take part in equality.
    fn eq(&self, o: &Self) -> bool {
        self.dim == o.dim && self.products == o.products
    }
}

impl Eq for StructureTensor {}

/// One nonzero product per line, e.g. `[e1, x] = e1 - 2e3`.
impl std::fmt::Display for StructureTensor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (&(i, j), row) in &self.products {
            let terms: Vec<(String, Scalar)> = row.iter().map(|(t, c)| (self.label(*t), c.clone())).collect();
            writeln!(f, "[{}, {}] = {}", self.label(i), self.label(j), fmt_combination(&terms))?;
        }
        Ok(())
    }
}

/// `c1 v1 + c2 v2 + ...` with unit coefficients dropped.
pub fn fmt_combination(terms: &[(String, Scalar)]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (name, c)) in terms.iter().enumerate() {
        let neg = c.is_real() && c.re() < &num_rational::BigRational::from_integer(0.into());
        let mag = if neg { -c.clone() } else { c.clone() };
        out.push_str(match (k, neg) {
            (0, true) => "-",
            (0, false) => "",
            (_, true) => " - ",
            (_, false) => " + ",
        });
        if !mag.is_one() {
            if mag.is_real() {
                out.push_str(&mag.to_string());
            } else {
                out.push_str(&format!("({mag})"));
            }
        }
        out.push_str(name);
    }
    out
}

impl StructureTensor {
    pub fn new(dim: usize) -> Self {
        StructureTensor { dim, products: BTreeMap::new(), labels: None }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.dim);
        self.labels = Some(labels);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i - 1].clone(),
            None => format!("e{i}"),
        }
    }

    fn check(&self, i: usize) {
        assert!(i >= 1 && i <= self.dim, "basis index {i} outside 1..={}", self.dim);
    }

    /// Overwrites the coefficient of `e_t` in `[e_i, e_j]`.
    pub fn set(&mut self, i: usize, j: usize, t: usize, c: Scalar) {
        self.check(i);
        self.check(j);
        self.check(t);
        let row = self.products.entry((i, j)).or_default();
        if c.is_zero() {
            row.remove(&t);
        } else {
            row.insert(t, c);
        }
        if row.is_empty() {
            self.products.remove(&(i, j));
        }
    }

    /// Adds to the coefficient of `e_t` in `[e_i, e_j]`.
    pub fn add(&mut self, i: usize, j: usize, t: usize, c: Scalar) {
        let cur = self.coeff(i, j, t);
        self.set(i, j, t, cur + c);
    }

    pub fn coeff(&self, i: usize, j: usize, t: usize) -> Scalar {
        self.products.get(&(i, j)).and_then(|r| r.get(&t)).cloned().unwrap_or_default()
    }

    pub fn product_row(&self, i: usize, j: usize) -> Option<&BTreeMap<usize, Scalar>> {
        self.products.get(&(i, j))
    }

    /// `[e_i, e_j]` as a dense vector.
    pub fn product(&self, i: usize, j: usize) -> Vector {
        let mut v = zero_vector(self.dim);
        if let Some(r) = self.products.get(&(i, j)) {
            for (t, c) in r {
                v[t - 1] = c.clone();
            }
        }
        v
    }

    /// All stored entries `(i, j, t, c)` in index order.
    pub fn entries(&self) -> Vec<(usize, usize, usize, Scalar)> {
        self.products
            .iter()
            .flat_map(|(&(i, j), r)| r.iter().map(move |(&t, c)| (i, j, t, c.clone())))
            .collect()
    }

    pub fn nnz(&self) -> usize {
        self.products.values().map(BTreeMap::len).sum()
    }

    pub fn is_abelian(&self) -> bool {
        self.products.is_empty()
    }

    /// Bilinear extension of the table.
    pub fn bracket(&self, u: &[Scalar], v: &[Scalar]) -> Result<Vector> {
        if u.len() != self.dim || v.len() != self.dim {
            return input(format!("bracket needs vectors of length {}, got {} and {}", self.dim, u.len(), v.len()));
        }
        Ok(self.br(u, v))
    }

    pub(crate) fn br(&self, u: &[Scalar], v: &[Scalar]) -> Vector {
        let mut out = zero_vector(self.dim);
        for (&(i, j), r) in &self.products {
            let a = &u[i - 1];
            let b = &v[j - 1];
            if a.is_zero() || b.is_zero() {
                continue;
            }
            let ab = a * b;
            for (t, c) in r {
                out[t - 1] += &(&ab * c);
            }
        }
        out
    }

    /// Right multiplication `R_x : y -> [y, x]`; column `c` is `[e_c, x]`.
    pub fn right_mult(&self, x: &[Scalar]) -> Matrix {
        let cols: Vec<Vector> = (1..=self.dim).map(|c| self.br(&unit(self.dim, c), x)).collect();
        Matrix::from_columns(self.dim, &cols)
    }

    /// Left multiplication `L_x : y -> [x, y]`.
    pub fn left_mult(&self, x: &[Scalar]) -> Matrix {
        let cols: Vec<Vector> = (1..=self.dim).map(|c| self.br(x, &unit(self.dim, c))).collect();
        Matrix::from_columns(self.dim, &cols)
    }

    /// Tensor of the subalgebra spanned by `basis` (vectors of this space),
    /// provided products of basis vectors stay in the span.
    pub fn restrict(&self, basis: &[Vector]) -> Result<StructureTensor> {
        let m = basis.len();
        let p = Matrix::from_columns(self.dim, basis);
        let span = Subspace::from_vectors(self.dim, basis);
        if span.dim() != m {
            return input("restriction basis is not linearly independent");
        }
        // coordinates via a left inverse: solve p c = w
        let mut out = StructureTensor::new(m);
        for a in 0..m {
            for b in 0..m {
                let w = self.br(&basis[a], &basis[b]);
                if is_zero_vector(&w) {
                    continue;
                }
                let c = solve_in_columns(&p, &w)
                    .ok_or_else(|| Error::Check(format!("product of restricted basis vectors {} and {} leaves the span", a + 1, b + 1)))?;
                for (t, ct) in c.into_iter().enumerate() {
                    if !ct.is_zero() {
                        out.set(a + 1, b + 1, t + 1, ct);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn to_file(&self) -> AlgebraFile {
        AlgebraFile {
            dim: self.dim,
            labels: self.labels.clone(),
            products: self
                .products
                .iter()
                .map(|(&(i, j), r)| (i, j, r.iter().map(|(&t, c)| (t, c.clone())).collect()))
                .collect(),
        }
    }

    pub fn from_file(f: &AlgebraFile) -> Result<StructureTensor> {
        let mut t = StructureTensor::new(f.dim);
        if let Some(l) = &f.labels {
            if l.len() != f.dim {
                return input(format!("{} labels for dimension {}", l.len(), f.dim));
            }
            t.labels = Some(l.clone());
        }
        for (i, j, row) in &f.products {
            for (k, c) in row {
                for idx in [*i, *j, *k] {
                    if idx == 0 || idx > f.dim {
                        return input(format!("index {idx} outside 1..={}", f.dim));
                    }
                }
                if !t.coeff(*i, *j, *k).is_zero() {
                    return input(format!("duplicate entry ({i},{j},{k})"));
                }
                t.set(*i, *j, *k, c.clone());
            }
        }
        Ok(t)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<StructureTensor> {
        let f: AlgebraFile = serde_json::from_str(text).map_err(|e| Error::Input(format!("algebra JSON: {e}")))?;
        StructureTensor::from_file(&f)
    }
}

/// Solves `p c = w` for a matrix with independent columns.
pub(crate) fn solve_in_columns(p: &Matrix, w: &[Scalar]) -> Option<Vector> {
    let n = p.rows();
    let m = p.cols();
    let mut aug = Matrix::zeros(n, m + 1);
    for i in 0..n {
        for j in 0..m {
            aug[(i, j)] = p[(i, j)].clone();
        }
        aug[(i, m)] = w[i].clone();
    }
    let (r, rank, pivots) = crate::linalg::rref(&aug);
    if pivots.contains(&m) {
        return None;
    }
    let mut c = zero_vector(m);
    for (row, &pc) in pivots.iter().enumerate().take(rank) {
        c[pc] = r[(row, m)].clone();
    }
    Some(c)
}

/// On-disk algebra format: `{ "dim": n, "labels": [...], "products": [[i, j, [[t, "c"], ...]], ...] }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub products: Vec<(usize, usize, Vec<(usize, Scalar)>)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub triple: (usize, usize, usize),
    pub defect: Vec<(usize, Scalar)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeibnizReport {
    pub pass: bool,
    pub triples_checked: usize,
    pub violations: Vec<Violation>,
}

fn add_row_scaled(acc: &mut Row, c: &Scalar, r: &Row) {
    for (t, v) in r {
        let e = acc.entry(*t).or_default();
        *e += &(c * v);
        if e.is_zero() {
            acc.remove(t);
        }
    }
}

/// `[e_i, v]` for sparse `v`.
fn left_basis(t: &StructureTensor, i: usize, v: &Row) -> Row {
    let mut out = Row::new();
    for (k, c) in v {
        if let Some(r) = t.products.get(&(i, *k)) {
            add_row_scaled(&mut out, c, r);
        }
    }
    out
}

/// `[v, e_k]` for sparse `v`.
fn right_basis(t: &StructureTensor, v: &Row, k: usize) -> Row {
    let mut out = Row::new();
    for (s, c) in v {
        if let Some(r) = t.products.get(&(*s, k)) {
            add_row_scaled(&mut out, c, r);
        }
    }
    out
}

/// Defect `[e_i,[e_j,e_k]] - [[e_i,e_j],e_k] + [[e_i,e_k],e_j]` as a sparse vector.
pub fn leibniz_defect(t: &StructureTensor, i: usize, j: usize, k: usize) -> Vec<(usize, Scalar)> {
    let empty = Row::new();
    let jk = t.products.get(&(j, k)).unwrap_or(&empty);
    let ij = t.products.get(&(i, j)).unwrap_or(&empty);
    let ik = t.products.get(&(i, k)).unwrap_or(&empty);
    let mut d = left_basis(t, i, jk);
    let a = right_basis(t, ij, k);
    add_row_scaled(&mut d, &-Scalar::one(), &a);
    let b = right_basis(t, ik, j);
    add_row_scaled(&mut d, &Scalar::one(), &b);
    d.into_iter().collect()
}

/// Checks the Leibniz identity on all n^3 basis triples. By trilinearity of the
/// defect this decides the identity on the whole algebra.
pub fn leibniz_check(t: &StructureTensor) -> LeibnizReport {
    let n = t.dim;
    let mut violations = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                let d = leibniz_defect(t, i, j, k);
                if !d.is_empty() {
                    violations.push(Violation { triple: (i, j, k), defect: d });
                }
            }
        }
    }
    LeibnizReport { pass: violations.is_empty(), triples_checked: n * n * n, violations }
}

/// Fast pass/fail form of `leibniz_check`, stopping at the first violation.
pub fn is_leibniz(t: &StructureTensor) -> bool {
    let n = t.dim;
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                if !leibniz_defect(t, i, j, k).is_empty() {
                    return false;
                }
            }
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesKind {
    LowerCentral,
    Derived,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesReport {
    pub kind: SeriesKind,
    pub terms: Vec<Subspace>,
    pub dims: Vec<usize>,
}

impl SeriesReport {
    pub fn reaches_zero(&self) -> bool {
        self.dims.last() == Some(&0)
    }
}

/// Lower central `L^{k+1} = [L^k, L]` or derived `L^{[s+1]} = [L^{[s]}, L^{[s]}]`,
/// iterated until the term stops changing.
pub fn series(t: &StructureTensor, kind: SeriesKind) -> SeriesReport {
    let n = t.dim;
    let mut terms = vec![Subspace::full(n)];
    loop {
        let cur = terms.last().unwrap();
        let basis = cur.vectors();
        let mut gens = Vec::new();
        for u in &basis {
            match kind {
                SeriesKind::LowerCentral => {
                    for j in 1..=n {
                        let w = t.br(u, &unit(n, j));
                        if !is_zero_vector(&w) {
                            gens.push(w);
                        }
                    }
                }
                SeriesKind::Derived => {
                    for v in &basis {
                        let w = t.br(u, v);
                        if !is_zero_vector(&w) {
                            gens.push(w);
                        }
                    }
                }
            }
        }
        let next = Subspace::from_vectors(n, &gens);
        if &next == cur {
            break;
        }
        let stop = next.dim() == 0;
        terms.push(next);
        if stop {
            break;
        }
    }
    let dims = terms.iter().map(Subspace::dim).collect();
    SeriesReport { kind, terms, dims }
}

pub fn is_nilpotent_algebra(t: &StructureTensor) -> bool {
    series(t, SeriesKind::LowerCentral).reaches_zero()
}

pub fn is_solvable_algebra(t: &StructureTensor) -> bool {
    series(t, SeriesKind::Derived).reaches_zero()
}

/// Smallest `s` with `L^s = 0`, `None` when the algebra is not nilpotent.
pub fn nilindex(t: &StructureTensor) -> Option<usize> {
    let s = series(t, SeriesKind::LowerCentral);
    if !s.reaches_zero() {
        return None;
    }
    Some(s.terms.len())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Annihilators {
    pub ann_r: Subspace,
    pub ann_l: Subspace,
    /// `[e_i,e_i]` and `[e_i,e_j] + [e_j,e_i]` all lie in `ann_r`.
    pub squares_in_ann_r: bool,
}

/// Kernel of the stacked maps `x -> [e_i, x]` (right annihilator) and
/// `x -> [x, e_i]` (left annihilator).
pub fn annihilators(t: &StructureTensor) -> Annihilators {
    let n = t.dim;
    let stack = |left: bool| {
        let mut rows = Vec::new();
        for i in 1..=n {
            let m = if left { t.left_mult(&unit(n, i)) } else { t.right_mult(&unit(n, i)) };
            rows.extend(m.row_vectors().into_iter().filter(|r| !is_zero_vector(r)));
        }
        if rows.is_empty() {
            return Subspace::full(n);
        }
        crate::linalg::kernel(&Matrix::from_rows(rows))
    };
    let ann_r = stack(true);
    let ann_l = stack(false);
    let mut ok = true;
    'outer: for i in 1..=n {
        for j in i..=n {
            let mut w = t.product(i, j);
            if i != j {
                add_scaled(&mut w, &Scalar::one(), &t.product(j, i));
            }
            if !ann_r.contains_vector(&w) {
                ok = false;
                break 'outer;
            }
        }
    }
    Annihilators { ann_r, ann_l, squares_in_ann_r: ok }
}

/// Two-sided ideal test: `[u, L] ⊆ u` and `[L, u] ⊆ u`.
pub fn is_ideal(t: &StructureTensor, u: &Subspace) -> Result<bool> {
    if u.ambient() != t.dim {
        return input(format!("subspace ambient {} differs from algebra dimension {}", u.ambient(), t.dim));
    }
    let n = t.dim;
    for b in u.vectors() {
        for j in 1..=n {
            let e = unit(n, j);
            if !u.contains_vector(&t.br(&b, &e)) || !u.contains_vector(&t.br(&e, &b)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Antisymmetric and Leibniz, hence Lie.
pub fn is_lie(t: &StructureTensor) -> bool {
    let n = t.dim;
    for i in 1..=n {
        for j in i..=n {
            let mut w = t.product(i, j);
            add_scaled(&mut w, &Scalar::one(), &t.product(j, i));
            if !is_zero_vector(&w) {
                return false;
            }
        }
    }
    is_leibniz(t)
}

/// Smallest two-sided ideal containing the given vectors.
pub fn ideal_closure(t: &StructureTensor, gens: &[Vector]) -> Subspace {
    let n = t.dim;
    let mut cur = Subspace::from_vectors(n, gens);
    loop {
        let mut vecs = cur.vectors();
        for b in cur.vectors() {
            for j in 1..=n {
                let e = unit(n, j);
                vecs.push(t.br(&b, &e));
                vecs.push(t.br(&e, &b));
            }
        }
        let next = Subspace::from_vectors(n, &vecs);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

/// Ideal generated by all squares `[x,x]`, spanned (by polarization) by
/// `[e_i,e_i]` and `[e_i,e_j] + [e_j,e_i]`.
pub fn squares_ideal(t: &StructureTensor) -> Subspace {
    let n = t.dim;
    let mut gens = Vec::new();
    for i in 1..=n {
        for j in i..=n {
            let mut w = t.product(i, j);
            if i != j {
                add_scaled(&mut w, &Scalar::one(), &t.product(j, i));
            }
            if !is_zero_vector(&w) {
                gens.push(w);
            }
        }
    }
    ideal_closure(t, &gens)
}

/// Tensor in the basis given by the columns of `p`: `[u,v]' = p^{-1}[pu, pv]`.
pub fn apply_basis_change(t: &StructureTensor, p: &Matrix) -> Result<StructureTensor> {
    let n = t.dim;
    if p.rows() != n || p.cols() != n {
        return input(format!("basis change must be {n}x{n}"));
    }
    let pinv = p.inverse().ok_or_else(|| Error::Input("basis change matrix is singular".into()))?;
    let cols: Vec<Vector> = (0..n).map(|j| p.column(j)).collect();
    let mut out = StructureTensor::new(n);
    for i in 0..n {
        for j in 0..n {
            let w = t.br(&cols[i], &cols[j]);
            if is_zero_vector(&w) {
                continue;
            }
            let c = pinv.mul_vec(&w);
            for (k, ck) in c.into_iter().enumerate() {
                if !ck.is_zero() {
                    out.set(i + 1, j + 1, k + 1, ck);
                }
            }
        }
    }
    Ok(out)
}

/// True iff transforming `a` by `p` gives exactly `b`.
pub fn is_isomorphism(a: &StructureTensor, b: &StructureTensor, p: &Matrix) -> Result<bool> {
    if a.dim != b.dim {
        return Ok(false);
    }
    Ok(&apply_basis_change(a, p)? == b)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradedTensor {
    pub piece_dims: Vec<usize>,
    /// Piece (1-based) that each new basis vector belongs to.
    pub piece_of: Vec<usize>,
    pub tensor: StructureTensor,
    /// Columns are the chosen coset representatives in the original basis.
    pub representative_map: Matrix,
    /// Whether `representative_map` carries the original tensor onto `tensor`.
    pub isomorphic_under_map: bool,
}

/// The associated graded algebra `gr(L) = ⊕ L^i/L^{i+1}` on representatives
/// obtained by extending the canonical basis of `L^{i+1}` to `L^i`.
pub fn natural_grading(t: &StructureTensor) -> Result<GradedTensor> {
    let s = series(t, SeriesKind::LowerCentral);
    if !s.reaches_zero() {
        return domain("natural grading needs a nilpotent algebra");
    }
    let n = t.dim;
    let mut reps: Vec<Vector> = Vec::new();
    let mut piece_of = Vec::new();
    let mut piece_dims = Vec::new();
    for k in 0..s.terms.len() - 1 {
        let (hi, lo) = (&s.terms[k], &s.terms[k + 1]);
        let mut count = 0;
        for (r, p) in hi.pivots().iter().enumerate() {
            if !lo.pivots().contains(p) {
                reps.push(hi.basis().row(r).to_vec());
                piece_of.push(k + 1);
                count += 1;
            }
        }
        piece_dims.push(count);
    }
    if reps.len() != n {
        return Err(Error::Invariant("coset representatives do not form a basis".into()));
    }
    let p = Matrix::from_columns(n, &reps);
    let pinv = p.inverse().ok_or_else(|| Error::Invariant("representative map singular".into()))?;
    let mut gr = StructureTensor::new(n);
    for a in 0..n {
        for b in 0..n {
            let w = t.br(&reps[a], &reps[b]);
            if is_zero_vector(&w) {
                continue;
            }
            let target = piece_of[a] + piece_of[b];
            let c = pinv.mul_vec(&w);
            for (k, ck) in c.into_iter().enumerate() {
                if ck.is_zero() {
                    continue;
                }
                if piece_of[k] < target {
                    return Err(Error::Invariant(format!(
                        "product of pieces {} and {} has a component in piece {}",
                        piece_of[a], piece_of[b], piece_of[k]
                    )));
                }
                if piece_of[k] == target {
                    gr.set(a + 1, b + 1, k + 1, ck);
                }
            }
        }
    }
    let iso = apply_basis_change(t, &p)? == gr;
    Ok(GradedTensor { piece_dims, piece_of, tensor: gr, representative_map: p, isomorphic_under_map: iso })
}
