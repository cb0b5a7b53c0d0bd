//! Derivation algebras, their action on the lower central flag, the count of
//! nil-independent derivations, and the parametrized derivation families of
//! `L(a,b,g)` and `G(a,b,g)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{is_nilpotent_algebra, series, solve_in_columns, SeriesKind, StructureTensor};
use crate::catalog::{find_spec, NilShape, Params};
use crate::error::{domain, input, Error, Result};
use crate::linalg::{independent_rows_mod_p, kernel_mod_p_lifted, is_nilpotent_matrix, is_zero_vector, kernel, unit, Matrix, SparseEchelon, Subspace, Vector};
use crate::scalar::{q, s, Scalar};

/// Basis of `Der(L)` in canonical form: matrices are vectorized row-major
/// (`D[r][c]` at `r*n + c`, `D[r][c]` = coefficient of `e_{r+1}` in `D(e_{c+1})`)
/// and reduced.
#[derive(Clone, Debug)]
pub struct DerivationSpace {
    pub n: usize,
    pub basis: Vec<Matrix>,
    pub space: Subspace,
}

impl DerivationSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, d: &Matrix) -> bool {
        self.space.contains_vector(&d.vectorize())
    }

    fn from_vectors(n: usize, vecs: &[Vector]) -> Self {
        let space = Subspace::from_vectors(n * n, vecs);
        let basis = space.vectors().iter().map(|v| Matrix::unvectorize(n, n, v)).collect();
        DerivationSpace { n, basis, space }
    }
}

/// `d[e_i,e_j] = [d e_i, e_j] + [e_i, d e_j]` on all basis pairs.
pub fn is_derivation(t: &StructureTensor, d: &Matrix) -> bool {
    is_derivation_with(&right_mults(t), d)
}

fn right_mults(t: &StructureTensor) -> Vec<Matrix> {
    let n = t.dim();
    (1..=n).map(|j| t.right_mult(&unit(n, j))).collect()
}

/// Column form of the identity: `d R_j = R_j d + R_{d e_j}` for every `j`.
fn is_derivation_with(rs: &[Matrix], d: &Matrix) -> bool {
    let n = rs.len();
    assert!(d.rows() == n && d.cols() == n);
    for j in 0..n {
        let mut diff = d.mul(&rs[j]).sub(&rs[j].mul(d));
        for r in 0..n {
            let c = &d[(r, j)];
            if !c.is_zero() {
                diff = diff.sub(&rs[r].scale(c));
            }
        }
        if !diff.is_zero() {
            return false;
        }
    }
    true
}

/// Row-major integer matrix `c * m` with `c` clearing all denominators;
/// `None` for complex entries.
fn integer_image(m: &Matrix) -> Option<Vec<BigInt>> {
    let mut den = BigInt::one();
    for r in 0..m.rows() {
        for v in m.row(r) {
            if !v.is_real() {
                return None;
            }
            den = den.lcm(v.re().denom());
        }
    }
    let mut out = Vec::with_capacity(m.rows() * m.cols());
    for r in 0..m.rows() {
        for v in m.row(r) {
            out.push(v.re().numer() * (&den / v.re().denom()));
        }
    }
    Some(out)
}

/// Same check as `is_derivation_with` on integer images. The identity is
/// homogeneous in both the right multiplications (scaled together) and `d`,
/// so clearing denominators does not change the verdict.
fn is_derivation_int(rs: &[Vec<BigInt>], d: &[BigInt]) -> bool {
    let n = rs.len();
    let mut acc = vec![BigInt::zero(); n * n];
    for (j, rj) in rs.iter().enumerate() {
        acc.iter_mut().for_each(|x| x.set_zero());
        for a in 0..n {
            for k in 0..n {
                let (dk, rk) = (&d[a * n + k], &rj[a * n + k]);
                for b in 0..n {
                    // (d R_j)[a][b] and (R_j d)[a][b]
                    let (x, y) = (&rj[k * n + b], &d[k * n + b]);
                    if !dk.is_zero() && !x.is_zero() {
                        acc[a * n + b] += dk * x;
                    }
                    if !rk.is_zero() && !y.is_zero() {
                        acc[a * n + b] -= rk * y;
                    }
                }
            }
        }
        for (r, rr) in rs.iter().enumerate() {
            let c = &d[r * n + j];
            if c.is_zero() {
                continue;
            }
            for (x, y) in acc.iter_mut().zip(rr) {
                if !y.is_zero() {
                    *x -= c * y;
                }
            }
        }
        if acc.iter().any(|x| !x.is_zero()) {
            return false;
        }
    }
    true
}

/// Checks every basis matrix, in integer arithmetic when all data is real.
fn all_derivations(rs: &[Matrix], basis: &[Matrix]) -> bool {
    let n = rs.len();
    let int_rs: Option<Vec<Vec<BigInt>>> = (|| {
        let mut big = Matrix::zeros(n, n * n);
        for (j, r) in rs.iter().enumerate() {
            for a in 0..n {
                for b in 0..n {
                    big[(a, j * n + b)] = r[(a, b)].clone();
                }
            }
        }
        let flat = integer_image(&big)?;
        Some(
            (0..n)
                .map(|j| (0..n * n).map(|k| flat[(k / n) * n * n + j * n + k % n].clone()).collect())
                .collect(),
        )
    })();
    basis.iter().all(|d| match (&int_rs, integer_image(d)) {
        (Some(rsi), Some(di)) => is_derivation_int(rsi, &di),
        _ => is_derivation_with(rs, d),
    })
}

/// Solves the derivation identity as a sparse linear system on `n^2` unknowns.
pub fn derivation_space(t: &StructureTensor) -> DerivationSpace {
    let n = t.dim();
    let var = |r: usize, c: usize| (r - 1) * n + (c - 1);
    let mut all: Vec<Vec<(usize, Scalar)>> = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            // component k of d[e_i,e_j] - [d e_i, e_j] - [e_i, d e_j]
            let mut rows: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); n + 1];
            if let Some(p) = t.product_row(i, j) {
                for (sidx, c) in p {
                    for k in 1..=n {
                        rows[k].push((var(k, *sidx), c.clone()));
                    }
                }
            }
            for r in 1..=n {
                if let Some(p) = t.product_row(r, j) {
                    for (k, c) in p {
                        rows[*k].push((var(r, i), -c.clone()));
                    }
                }
                if let Some(p) = t.product_row(i, r) {
                    for (k, c) in p {
                        rows[*k].push((var(r, j), -c.clone()));
                    }
                }
            }
            all.extend(rows.into_iter().skip(1).filter(|r| !r.is_empty()));
        }
    }
    let rs = right_mults(t);
    // Fast path: kernel mod p lifted to Q, accepted only if every lifted
    // vector is an exact derivation (the mod-p rank bounds dim Der above).
    if let Some(vecs) = kernel_mod_p_lifted(&all, n * n) {
        let ds = DerivationSpace::from_vectors(n, &vecs);
        if ds.dim() == vecs.len() && all_derivations(&rs, &ds.basis) {
            return ds;
        }
    }
    // Exact elimination on rows chosen mod p, checked the same way.
    if let Some(keep) = independent_rows_mod_p(&all, n * n) {
        let mut sys = SparseEchelon::new(n * n);
        for k in keep {
            sys.add_row(all[k].iter().cloned());
        }
        let ds = DerivationSpace::from_vectors(n, &sys.kernel());
        if all_derivations(&rs, &ds.basis) {
            return ds;
        }
    }
    let mut sys = SparseEchelon::new(n * n);
    for row in all {
        sys.add_row(row);
    }
    let ds = DerivationSpace::from_vectors(n, &sys.kernel());
    assert!(all_derivations(&rs, &ds.basis), "kernel vector failed the derivation identity");
    ds
}

/// Span of the right multiplications `R_{e_i}`.
pub fn inner_derivations(t: &StructureTensor) -> DerivationSpace {
    let n = t.dim();
    let vecs: Vec<Vector> = (1..=n).map(|i| t.right_mult(&unit(n, i)).vectorize()).collect();
    DerivationSpace::from_vectors(n, &vecs)
}

#[derive(Clone, Debug)]
pub struct FlagBlocks {
    pub block_dims: Vec<usize>,
    /// Induced maps on the successive quotients of the flag.
    pub blocks: Vec<Matrix>,
    pub nilpotent: bool,
}

/// Quotient data for a descending flag `F_0 ⊋ F_1 ⊋ ... ⊋ F_s = 0`: for each
/// step, representatives of `F_k / F_{k+1}` and a solver basis `[reps | F_{k+1}]`.
#[derive(Clone, Debug)]
pub struct FlagFrame {
    pub terms: Vec<Subspace>,
    reps: Vec<Vec<Vector>>,
    frames: Vec<Matrix>,
}

impl FlagFrame {
    pub fn new(terms: Vec<Subspace>) -> Result<Self> {
        if terms.last().map(Subspace::dim) != Some(0) {
            return input("flag must end at the zero subspace");
        }
        let mut reps = Vec::new();
        let mut frames = Vec::new();
        for k in 0..terms.len() - 1 {
            let (hi, lo) = (&terms[k], &terms[k + 1]);
            let r: Vec<Vector> = hi
                .pivots()
                .iter()
                .enumerate()
                .filter(|(_, p)| !lo.pivots().contains(p))
                .map(|(row, _)| hi.basis().row(row).to_vec())
                .collect();
            if r.len() + lo.dim() != hi.dim() {
                return input("flag terms are not nested");
            }
            let mut cols = r.clone();
            cols.extend(lo.vectors());
            frames.push(Matrix::from_columns(hi.ambient(), &cols));
            reps.push(r);
        }
        Ok(FlagFrame { terms, reps, frames })
    }

    pub fn lower_central(t: &StructureTensor) -> Result<Self> {
        let ser = series(t, SeriesKind::LowerCentral);
        if !ser.reaches_zero() {
            return domain("lower central series does not reach zero");
        }
        FlagFrame::new(ser.terms)
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.reps.iter().map(Vec::len).collect()
    }

    /// Induced block maps of `d`; errors if `d` does not preserve the flag.
    pub fn blocks(&self, d: &Matrix) -> Result<Vec<Matrix>> {
        let mut out = Vec::new();
        for (k, reps) in self.reps.iter().enumerate() {
            let m = reps.len();
            let mut b = Matrix::zeros(m, m);
            for (a, u) in reps.iter().enumerate() {
                let w = d.mul_vec(u);
                let c = solve_in_columns(&self.frames[k], &w)
                    .ok_or_else(|| Error::Invariant(format!("operator does not preserve flag term {}", k + 1)))?;
                for r in 0..m {
                    b[(r, a)] = c[r].clone();
                }
            }
            out.push(b);
        }
        Ok(out)
    }
}

/// Induced maps of `d` on the quotients of the lower central series (or of
/// a supplied flag), with the nilpotency verdict cross-checked against `d`.
pub fn flag_blocks(t: &StructureTensor, d: &Matrix, flag: Option<&FlagFrame>) -> Result<FlagBlocks> {
    let owned;
    let frame = match flag {
        Some(f) => f,
        None => {
            owned = FlagFrame::lower_central(t)?;
            &owned
        }
    };
    let blocks = frame.blocks(d)?;
    let mut nilpotent = true;
    for b in &blocks {
        if !is_nilpotent_matrix(b)? {
            nilpotent = false;
        }
    }
    if nilpotent != is_nilpotent_matrix(d)? {
        return Err(Error::Invariant("block verdict disagrees with direct nilpotency test".into()));
    }
    Ok(FlagBlocks { block_dims: frame.block_dims(), blocks, nilpotent })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateStatus {
    /// Nilpotent derivations form the toral kernel, shown by polarization.
    Certified,
    /// Lower and upper bounds agree without the polarization argument.
    CertifiedByBounds,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct PolarizationEntry {
    pub block: usize,
    pub pair: (usize, usize),
    pub value: Scalar,
}

#[derive(Clone, Debug)]
pub struct NilIndependenceCertificate {
    pub toral_dim: usize,
    /// Row `k` is the trace of block `k` as a functional on the derivation basis.
    pub toral_functionals: Matrix,
    pub kernel_basis: Vec<Matrix>,
    pub block_dims: Vec<usize>,
    pub polarization_witness: Vec<PolarizationEntry>,
    pub lower: usize,
    pub upper: usize,
    pub lower_witness: Vec<Matrix>,
    pub status: CertificateStatus,
    pub der: DerivationSpace,
}

fn combine(basis: &[Matrix], coeffs: &[Scalar]) -> Matrix {
    let n = basis[0].rows();
    let mut m = Matrix::zeros(n, n);
    for (b, c) in basis.iter().zip(coeffs) {
        if !c.is_zero() {
            m = m.add(&b.scale(c));
        }
    }
    m
}

/// Maximal number of nil-independent derivations of a nilpotent algebra.
///
/// Every derivation preserves the lower central flag, so it is nilpotent iff
/// each induced block is. Block traces are linear ("toral") and vanish on
/// nilpotent derivations; when all blocks have size at most two, the joint
/// kernel `K` of the traces is exactly the nilpotent set provided the block
/// determinants vanish on `K`, which is decided by polarization over a basis.
/// Then the answer is `dim Der - dim K`. Otherwise bounds are returned:
/// `max(rank of traces, dim of diagonal derivations)` from below and
/// `min(dim of the block-diagonal image, n)` from above (a subspace of
/// `d x d` matrices without nonzero nilpotents has dimension at most `d`).
pub fn max_nil_independent(t: &StructureTensor) -> Result<(usize, NilIndependenceCertificate)> {
    if !is_nilpotent_algebra(t) {
        return domain("nil-independence count needs a nilpotent algebra");
    }
    let n = t.dim();
    let der = derivation_space(t);
    let frame = FlagFrame::lower_central(t)?;
    let dims = frame.block_dims();
    let m = der.dim();
    let mut blocks_of = Vec::with_capacity(m);
    for d in &der.basis {
        blocks_of.push(frame.blocks(d)?);
    }
    let mut traces = Matrix::zeros(dims.len(), m);
    for (j, bl) in blocks_of.iter().enumerate() {
        for (k, b) in bl.iter().enumerate() {
            traces[(k, j)] = b.trace();
        }
    }
    let (_, r, pivots) = crate::linalg::rref(&traces);
    let kspace = kernel(&traces);
    let kernel_basis: Vec<Matrix> = kspace.vectors().iter().map(|c| combine(&der.basis, c)).collect();
    let lower_witness: Vec<Matrix> = pivots.iter().map(|&j| der.basis[j].clone()).collect();

    let small = dims.iter().all(|&d| d <= 2);
    let mut witness = Vec::new();
    let mut polar_ok = small;
    if small {
        let kb: Vec<Vec<Matrix>> = kernel_basis.iter().map(|d| frame.blocks(d)).collect::<Result<_>>()?;
        for (k, &dk) in dims.iter().enumerate() {
            if dk != 2 {
                continue;
            }
            let qv = |b: &Matrix| b.det();
            for a in 0..kb.len() {
                let qa = qv(&kb[a][k]);
                witness.push(PolarizationEntry { block: k + 1, pair: (a + 1, a + 1), value: qa.clone() });
                if !qa.is_zero() {
                    polar_ok = false;
                }
                for b in a + 1..kb.len() {
                    let sum = kb[a][k].add(&kb[b][k]);
                    let v = &(&qv(&sum) - &qa) - &qv(&kb[b][k]);
                    if !v.is_zero() {
                        polar_ok = false;
                    }
                    witness.push(PolarizationEntry { block: k + 1, pair: (a + 1, b + 1), value: v });
                }
            }
        }
    }

    let (value, lower, upper, status) = if polar_ok {
        (r, r, r, CertificateStatus::Certified)
    } else {
        let diag = diagonal_derivations(&der);
        let image = {
            let vecs: Vec<Vector> = blocks_of
                .iter()
                .map(|bl| bl.iter().flat_map(|b| b.vectorize()).collect())
                .collect();
            Subspace::from_vectors(vecs.first().map_or(0, Vec::len), &vecs).dim()
        };
        let lower = r.max(diag);
        let upper = image.min(n);
        let st = if lower == upper { CertificateStatus::CertifiedByBounds } else { CertificateStatus::Inconclusive };
        (lower, lower, upper, st)
    };
    let cert = NilIndependenceCertificate {
        toral_dim: r,
        toral_functionals: traces,
        kernel_basis,
        block_dims: dims,
        polarization_witness: witness,
        lower,
        upper,
        lower_witness,
        status,
        der,
    };
    Ok((value, cert))
}

/// Dimension of `Der ∩ {diagonal matrices}`.
fn diagonal_derivations(der: &DerivationSpace) -> usize {
    let n = der.n;
    if der.dim() == 0 {
        return 0;
    }
    // coefficient vectors c with every off-diagonal entry of sum c_j D_j zero
    let mut rows = Vec::new();
    for r in 0..n {
        for c in 0..n {
            if r != c {
                let row: Vector = der.basis.iter().map(|d| d[(r, c)].clone()).collect();
                if !is_zero_vector(&row) {
                    rows.push(row);
                }
            }
        }
    }
    if rows.is_empty() {
        return der.dim();
    }
    kernel(&Matrix::from_rows(rows)).dim()
}

/// Derivations whose diagonal entries vanish at the given (1-based) indices.
pub fn diagonal_vanishing(der: &DerivationSpace, at: &[usize]) -> Subspace {
    let n = der.n;
    let rows: Vec<Vector> = at.iter().map(|&i| der.basis.iter().map(|d| d[(i - 1, i - 1)].clone()).collect()).collect();
    let coeffs = kernel(&Matrix::from_rows(rows));
    let vecs: Vec<Vector> = coeffs.vectors().iter().map(|c| combine(&der.basis, c).vectorize()).collect();
    Subspace::from_vectors(n * n, &vecs)
}

/// The toral kernel of a certificate as a subspace of vectorized matrices.
pub fn kernel_subspace(cert: &NilIndependenceCertificate) -> Subspace {
    let n = cert.der.n;
    let vecs: Vec<Vector> = cert.kernel_basis.iter().map(Matrix::vectorize).collect();
    Subspace::from_vectors(n * n, &vecs)
}

/// Unknown of a parametrized derivation family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum DVar {
    A(usize),
    B(usize),
}

/// Linear form `sum c * var`.
pub type LinearForm = Vec<(DVar, Scalar)>;

/// Derivations of a nilradical written in terms of `a_1..a_n` (image of the
/// first generator) and `b_2..b_n` (image of the second generator).
#[derive(Clone, Debug)]
pub struct ParamFamily {
    pub n: usize,
    pub shape: NilShape,
    pub abg: [Scalar; 3],
    /// Linear map from the parameter vector to vectorized matrices; column `v`
    /// is the matrix of the `v`-th unknown.
    pub matrices: Vec<Matrix>,
    pub constraints: Vec<LinearForm>,
}

impl ParamFamily {
    pub fn nvars(&self) -> usize {
        2 * self.n - 1
    }

    pub fn index(&self, v: DVar) -> usize {
        match v {
            DVar::A(t) => t - 1,
            DVar::B(t) => self.n + t - 2,
        }
    }

    /// Index of the second generator.
    pub fn second_generator(&self) -> usize {
        match self.shape {
            NilShape::L => self.n - 1,
            _ => 3,
        }
    }

    /// Reads `a_t` and `b_t` off a matrix.
    pub fn read(&self, d: &Matrix) -> Vector {
        let g2 = self.second_generator() - 1;
        let mut v = Vec::with_capacity(self.nvars());
        for t in 1..=self.n {
            v.push(d[(t - 1, 0)].clone());
        }
        for t in 2..=self.n {
            v.push(d[(t - 1, g2)].clone());
        }
        v
    }

    pub fn matrix_at(&self, p: &[Scalar]) -> Matrix {
        combine(&self.matrices, p)
    }

    pub fn eval(&self, f: &LinearForm, p: &[Scalar]) -> Scalar {
        f.iter().map(|(v, c)| c * &p[self.index(*v)]).sum()
    }

    /// Subspace of vectorized matrices spanned by the family under its constraints.
    pub fn subspace(&self) -> Subspace {
        let nv = self.nvars();
        let rows: Vec<Vector> = self
            .constraints
            .iter()
            .map(|f| {
                let mut r = vec![Scalar::zero(); nv];
                for (v, c) in f {
                    r[self.index(*v)] += c;
                }
                r
            })
            .filter(|r| !is_zero_vector(r))
            .collect();
        let free = if rows.is_empty() { Subspace::full(nv) } else { kernel(&Matrix::from_rows(rows)) };
        let vecs: Vec<Vector> = free.vectors().iter().map(|p| self.matrix_at(p).vectorize()).collect();
        Subspace::from_vectors(self.n * self.n, &vecs)
    }
}

/// Accumulates `coef * var` into entry `(row, col)` (1-based) of the family.
struct Builder {
    n: usize,
    mats: Vec<Matrix>,
}

impl Builder {
    fn new(n: usize) -> Self {
        Builder { n, mats: vec![Matrix::zeros(n, n); 2 * n - 1] }
    }
    fn put(&mut self, row: usize, col: usize, v: DVar, c: Scalar) {
        let i = match v {
            DVar::A(t) => t - 1,
            DVar::B(t) => self.n + t - 2,
        };
        self.mats[i][(row - 1, col - 1)] += &c;
    }
}

fn sign(k: usize) -> Scalar {
    if k % 2 == 0 {
        s(1)
    } else {
        s(-1)
    }
}

/// Derivation family of `L(a,b,g)` with its constraint set.
pub fn prop31_family(abg: &[Scalar; 3], n: usize) -> Result<ParamFamily> {
    if n < 6 {
        return input("the L derivation family needs n >= 6");
    }
    let [al, be, ga] = abg;
    let one = s(1);
    let mut b = Builder::new(n);
    use DVar::{A, B};
    for t in 1..=n {
        b.put(t, 1, A(t), one.clone());
    }
    b.put(2, 2, A(1), s(2));
    b.put(2, 2, A(n - 1), al.clone());
    for t in 3..=n - 2 {
        b.put(t, 2, A(t - 1), one.clone());
    }
    b.put(n, 2, A(n - 1), &one + be);
    for i in 3..=n - 2 {
        b.put(i, i, A(1), s(i as i64));
        b.put(i, i, A(n - 1), al.clone());
        for t in i + 1..=n - 2 {
            b.put(t, i, A(t - i + 1), one.clone());
        }
    }
    for t in 2..=n {
        b.put(t, n - 1, B(t), one.clone());
    }
    b.put(n - 2, n, B(n - 3), one.clone());
    b.put(n - 2, n, A(n - 3), -al.clone());
    b.put(n, n, B(n - 1), one.clone());
    b.put(n, n, A(1), one.clone());
    b.put(n, n, A(n - 1), ga - &(al * &(&one + be)));
    let mut cons: Vec<LinearForm> = Vec::new();
    for i in 2..=n - 4 {
        cons.push(vec![(B(i), one.clone()), (A(i), -al.clone())]);
    }
    cons.push(vec![(B(n - 3), be.clone()), (A(n - 3), -(be * al))]);
    cons.push(vec![(B(n - 3), ga.clone()), (A(n - 3), -(ga * al))]);
    cons.push(vec![(B(n - 1), al.clone()), (A(1), -al.clone()), (A(n - 1), -(al * al))]);
    cons.push(vec![(B(n - 1), ga.clone()), (A(1), -ga.clone()), (A(n - 1), -(ga * &(ga - &(al * &(&one + be)))))]);
    cons.push(vec![(A(n - 1), ga - &(be * &(ga - &(al * &(&one + be)))))]);
    Ok(ParamFamily { n, shape: NilShape::L, abg: abg.clone(), matrices: b.mats, constraints: cons })
}

/// Which constraint list accompanies the `G(a,b,g)` derivation family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GConstraints {
    /// The four relations as listed.
    Listed,
    /// Listed, plus `((-1)^i - 1) a b_{n-i+2} = 0` for `3 <= i <= n-2`.
    WithParityTerms,
    /// Recomputed relations: the parity terms become
    /// `((-1)^i + 1) a b_{n-i+2} = 0` and the `a_{n-1}` relation takes the
    /// factor `1 + (-1)^n`, which is vacuous whenever `a != 0`.
    Corrected,
}

/// Derivation family of `G(a,b,g)` under the chosen constraint list.
pub fn prop32_family(abg: &[Scalar; 3], n: usize, set: GConstraints) -> Result<ParamFamily> {
    if n < 6 {
        return input("the G derivation family needs n >= 6");
    }
    let [al, be, ga] = abg;
    if !al.is_zero() && n % 2 == 0 {
        return input("G(a,b,g) with a != 0 needs n odd");
    }
    let one = s(1);
    let mut b = Builder::new(n);
    use DVar::{A, B};
    for t in 1..=n {
        b.put(t, 1, A(t), one.clone());
    }
    for t in 2..=n {
        b.put(t, 3, B(t), one.clone());
    }
    b.put(2, 2, A(1), s(2));
    b.put(2, 2, A(3), be.clone());
    b.put(2, 4, A(3), ga.clone());
    b.put(4, 4, A(1), one.clone());
    b.put(4, 4, B(3), one.clone());
    for t in 5..=n - 1 {
        b.put(t, 4, B(t - 1), one.clone());
    }
    b.put(n, 4, B(n - 1), one.clone());
    b.put(n, 4, A(n - 1), -al.clone());
    for i in 5..=n - 1 {
        b.put(i, i, A(1), s(i as i64 - 3));
        b.put(i, i, B(3), one.clone());
        for t in i + 1..=n - 1 {
            b.put(t, i, B(t - i + 3), one.clone());
        }
        b.put(n, i, B(n - i + 3), one.clone());
        b.put(n, i, A(n - i + 3), -(&sign(i) * al));
    }
    b.put(n, n, A(1), s(n as i64 - 3));
    b.put(n, n, B(3), one.clone());
    b.put(n, n, A(3), -(&sign(n) * al));
    let mut cons: Vec<LinearForm> = vec![
        vec![(A(3), &(&s(2) * ga) - &(be * be)), (B(3), be.clone()), (A(1), -be.clone())],
        vec![(A(n - 1), &(if set == GConstraints::Corrected { &one + &sign(n) } else { &one - &sign(n) }) * al)],
        vec![(B(3), &s(2) * ga), (A(1), -(&s(2) * ga)), (A(3), -(ga * be))],
        vec![(B(3), al.clone()), (A(1), -al.clone()), (A(3), &sign(n) * &(al * al))],
    ];
    if set != GConstraints::Listed {
        for i in 3..=n - 2 {
            let f = if set == GConstraints::Corrected { &sign(i) + &one } else { &sign(i) - &one };
            cons.push(vec![(B(n - i + 2), &f * al)]);
        }
    }
    Ok(ParamFamily { n, shape: NilShape::G, abg: abg.clone(), matrices: b.mats, constraints: cons })
}

#[derive(Clone, Debug, Serialize)]
pub struct PropCheck {
    pub shape: String,
    pub n: usize,
    pub abg: [Scalar; 3],
    pub dim_der: usize,
    pub dim_family: usize,
    pub equal: bool,
    /// Every computed basis derivation equals the family matrix at its own
    /// read-off parameters and satisfies every constraint.
    pub constraints_hold: bool,
    pub constraint_set: Option<GConstraints>,
    #[serde(skip)]
    pub separating: Option<Matrix>,
}

fn compare_family(t: &StructureTensor, fam: &ParamFamily, constraint_set: Option<GConstraints>) -> PropCheck {
    let der = derivation_space(t);
    let fs = fam.subspace();
    let mut separating = None;
    for d in &der.basis {
        if !fs.contains_vector(&d.vectorize()) {
            separating = Some(d.clone());
            break;
        }
    }
    if separating.is_none() {
        for v in fs.vectors() {
            if !der.space.contains_vector(&v) {
                separating = Some(Matrix::unvectorize(fam.n, fam.n, &v));
                break;
            }
        }
    }
    let constraints_hold = der.basis.iter().all(|d| {
        let p = fam.read(d);
        &fam.matrix_at(&p) == d && fam.constraints.iter().all(|f| fam.eval(f, &p).is_zero())
    });
    PropCheck {
        shape: format!("{:?}", fam.shape),
        n: fam.n,
        abg: fam.abg.clone(),
        dim_der: der.dim(),
        dim_family: fs.dim(),
        equal: separating.is_none(),
        constraints_hold,
        constraint_set,
        separating,
    }
}

fn nilradical(shape: &str, abg: &[Scalar; 3], n: usize) -> Result<StructureTensor> {
    let p = Params::abg(abg[0].clone(), abg[1].clone(), abg[2].clone());
    find_spec(shape)?.build(n, &p)
}

/// Compares `Der(L(a,b,g))` with the parametrized family under its constraints.
pub fn check_prop31(abg: &[Scalar; 3], n: usize) -> Result<PropCheck> {
    let t = nilradical("L", abg, n)?;
    let fam = prop31_family(abg, n)?;
    Ok(compare_family(&t, &fam, None))
}

/// As `check_prop31` for `G(a,b,g)`, with the listed constraints only.
pub fn check_prop32(abg: &[Scalar; 3], n: usize) -> Result<PropCheck> {
    check_prop32_with(abg, n, GConstraints::Listed)
}

pub fn check_prop32_with(abg: &[Scalar; 3], n: usize, set: GConstraints) -> Result<PropCheck> {
    let t = nilradical("G", abg, n)?;
    let fam = prop32_family(abg, n, set)?;
    Ok(compare_family(&t, &fam, Some(set)))
}

/// One printed row of the nil-independence table.
#[derive(Clone, Debug)]
pub struct Table1Row {
    pub label: &'static str,
    pub shape: NilShape,
    pub samples: Vec<[Scalar; 3]>,
    pub restrictions_text: &'static str,
    pub expected: usize,
    /// `true` for rows printed as `dim Q = k`, `false` for `dim Q <= k`.
    pub exact: bool,
    pub needs_odd_n: bool,
}

impl Table1Row {
    /// Printed restrictions as linear forms at size `n`.
    pub fn restrictions(&self, n: usize, abg: &[Scalar; 3]) -> Vec<LinearForm> {
        use DVar::{A, B};
        let one = s(1);
        let neg = s(-1);
        let mut out: Vec<LinearForm> = Vec::new();
        let zero_b = |out: &mut Vec<LinearForm>, hi: usize| {
            for i in 2..=hi {
                out.push(vec![(B(i), one.clone())]);
            }
        };
        let b_eq_a = |out: &mut Vec<LinearForm>, hi: usize| {
            for i in 2..=hi {
                out.push(vec![(B(i), one.clone()), (A(i), neg.clone())]);
            }
        };
        match self.label {
            "L(0,b,0)" => {
                zero_b(&mut out, n - 4);
                out.push(vec![(B(n - 3), abg[1].clone())]);
            }
            "L(0,0,1)" => {
                out.push(vec![(A(n - 1), one.clone())]);
                zero_b(&mut out, n - 3);
                out.push(vec![(B(n - 1), one.clone()), (A(1), neg.clone())]);
            }
            "L(0,1,1)" => {
                zero_b(&mut out, n - 3);
                out.push(vec![(B(n - 1), one.clone()), (A(1), neg.clone()), (A(n - 1), neg.clone())]);
            }
            "L(1,-1,0)" | "L(1,0,0)" => {
                b_eq_a(&mut out, if self.label == "L(1,0,0)" { n - 4 } else { n - 3 });
                out.push(vec![(B(n - 1), one.clone()), (A(1), neg.clone()), (A(n - 1), neg.clone())]);
            }
            "L(1,1,0)" | "L(1,0,g)" | "L(1,1,1)" | "L(1,2,4)" => {
                out.push(vec![(A(n - 1), one.clone())]);
                b_eq_a(&mut out, n - 3);
                out.push(vec![(B(n - 1), one.clone()), (A(1), neg.clone())]);
            }
            "G(0,0,0)" => {}
            "G(0,1,0)" | "G(0,2,1)" => out.push(vec![(B(3), one.clone()), (A(1), neg.clone()), (A(3), neg.clone())]),
            "G(0,0,1)" => {
                out.push(vec![(B(3), one.clone()), (A(1), neg.clone())]);
                out.push(vec![(A(3), one.clone())]);
            }
            "G(1,0,0)" | "G(1,1,0)" | "G(1,2,1)" => {
                out.push(vec![(B(3), one.clone()), (A(1), neg.clone()), (A(3), neg.clone())]);
                out.push(vec![(A(n - 1), one.clone())]);
            }
            "G(1,2,0)" | "G(1,0,g)" | "G(1,-2,1)" | "G(1,4,2)" => {
                out.push(vec![(B(3), one.clone()), (A(1), neg.clone())]);
                out.push(vec![(A(3), one.clone())]);
                out.push(vec![(A(n - 1), one.clone())]);
            }
            other => unreachable!("unknown row {other}"),
        }
        out
    }
}

/// The twenty printed rows: nine over `L`, eleven over `G`.
pub fn table1_rows() -> Vec<Table1Row> {
    let t = |a: i64, b: i64, g: i64| [s(a), s(b), s(g)];
    let row = |label, shape, samples, text, expected, exact, needs_odd_n| Table1Row {
        label,
        shape,
        samples,
        restrictions_text: text,
        expected,
        exact,
        needs_odd_n,
    };
    let betas = vec![[s(0), s(0), s(0)], [s(0), s(-1), s(0)], [s(0), s(2), s(0)], [s(0), q(1, 2), s(0)]];
    let gammas = |a: i64| vec![[s(a), s(0), s(1)], [s(a), s(0), s(-1)], [s(a), s(0), s(2)], [s(a), s(0), q(1, 2)]];
    use NilShape::{G, L};
    vec![
        row("L(0,b,0)", L, betas, "b_i = 0 (2<=i<=n-4), beta*b_{n-3} = 0", 2, false, false),
        row("L(0,0,1)", L, vec![t(0, 0, 1)], "a_{n-1} = b_i = 0 (2<=i<=n-3), b_{n-1} = a_1", 1, true, false),
        row("L(0,1,1)", L, vec![t(0, 1, 1)], "b_i = 0 (2<=i<=n-3), b_{n-1} = a_1 + a_{n-1}", 2, false, false),
        row("L(1,-1,0)", L, vec![t(1, -1, 0)], "b_i = a_i (2<=i<=n-3), b_{n-1} = a_1 + a_{n-1}", 2, false, false),
        row("L(1,0,0)", L, vec![t(1, 0, 0)], "b_i = a_i (2<=i<=n-4), b_{n-1} = a_1 + a_{n-1}", 2, false, false),
        row("L(1,1,0)", L, vec![t(1, 1, 0)], "a_{n-1} = 0, b_i = a_i (2<=i<=n-3), b_{n-1} = a_1", 1, true, false),
        row("L(1,0,g)", L, gammas(1), "a_{n-1} = 0, b_i = a_i (2<=i<=n-3), b_{n-1} = a_1", 1, true, false),
        row("L(1,1,1)", L, vec![t(1, 1, 1)], "a_{n-1} = 0, b_i = a_i (2<=i<=n-3), b_{n-1} = a_1", 1, true, false),
        row("L(1,2,4)", L, vec![t(1, 2, 4)], "a_{n-1} = 0, b_i = a_i (2<=i<=n-3), b_{n-1} = a_1", 1, true, false),
        row("G(0,0,0)", G, vec![t(0, 0, 0)], "none", 2, false, false),
        row("G(0,1,0)", G, vec![t(0, 1, 0)], "b_3 = a_1 + a_3", 2, false, false),
        row("G(0,0,1)", G, vec![t(0, 0, 1)], "b_3 = a_1, a_3 = 0", 1, true, false),
        row("G(0,2,1)", G, vec![t(0, 2, 1)], "b_3 = a_1 + a_3", 2, false, false),
        row("G(1,0,0)", G, vec![t(1, 0, 0)], "b_3 = a_1 + a_3, a_{n-1} = 0", 2, false, true),
        row("G(1,1,0)", G, vec![t(1, 1, 0)], "b_3 = a_1 + a_3, a_{n-1} = 0", 2, false, true),
        row("G(1,2,0)", G, vec![t(1, 2, 0)], "b_3 = a_1, a_3 = 0, a_{n-1} = 0", 1, true, true),
        row("G(1,0,g)", G, gammas(1), "b_3 = a_1, a_3 = 0, a_{n-1} = 0", 1, true, true),
        row("G(1,-2,1)", G, vec![t(1, -2, 1)], "b_3 = a_1, a_3 = 0, a_{n-1} = 0", 1, true, true),
        row("G(1,2,1)", G, vec![t(1, 2, 1)], "b_3 = a_1 + a_3, a_{n-1} = 0", 2, false, true),
        row("G(1,4,2)", G, vec![t(1, 4, 2)], "b_3 = a_1, a_3 = 0, a_{n-1} = 0", 1, true, true),
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct Table1Sample {
    pub abg: [Scalar; 3],
    pub max_nil_independent: usize,
    pub status: CertificateStatus,
    pub restrictions_hold: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Table1Result {
    pub label: String,
    pub n: usize,
    pub expected: usize,
    pub exact: bool,
    pub restrictions: String,
    pub skipped: bool,
    pub samples: Vec<Table1Sample>,
    pub pass: bool,
}

/// Recomputes every row at size `n`; rows needing odd `n` are skipped when `n` is even.
pub fn table1(n: usize) -> Result<Vec<Table1Result>> {
    if n < 6 {
        return input("the nil-independence table needs n >= 6");
    }
    let mut out = Vec::new();
    for row in table1_rows() {
        if row.needs_odd_n && n % 2 == 0 {
            out.push(Table1Result {
                label: row.label.to_string(),
                n,
                expected: row.expected,
                exact: row.exact,
                restrictions: row.restrictions_text.to_string(),
                skipped: true,
                samples: Vec::new(),
                pass: true,
            });
            continue;
        }
        let mut samples = Vec::new();
        for abg in &row.samples {
            let name = if row.shape == NilShape::L { "L" } else { "G" };
            let t = nilradical(name, abg, n)?;
            let (k, cert) = max_nil_independent(&t)?;
            let fam = match row.shape {
                NilShape::L => prop31_family(abg, n)?,
                _ => prop32_family(abg, n, GConstraints::Listed)?,
            };
            let forms = row.restrictions(n, abg);
            let hold = cert.der.basis.iter().all(|d| {
                let p = fam.read(d);
                forms.iter().all(|f| fam.eval(f, &p).is_zero())
            });
            samples.push(Table1Sample { abg: abg.clone(), max_nil_independent: k, status: cert.status, restrictions_hold: hold });
        }
        // restrictions are reported, not required: the a_{n-1} entries of the
        // G rows with a != 0 do not hold on Der (see `GConstraints::Corrected`)
        let pass = samples.iter().all(|s| s.max_nil_independent == row.expected && s.status == CertificateStatus::Certified);
        out.push(Table1Result {
            label: row.label.to_string(),
            n,
            expected: row.expected,
            exact: row.exact,
            restrictions: row.restrictions_text.to_string(),
            skipped: false,
            samples,
            pass,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abelian_derivations() {
        let t = StructureTensor::new(3);
        assert_eq!(derivation_space(&t).dim(), 9);
        assert_eq!(inner_derivations(&t).dim(), 0);
        let (k, cert) = max_nil_independent(&t).unwrap();
        assert_eq!(k, 3);
        assert_eq!(cert.status, CertificateStatus::CertifiedByBounds);
    }

    #[test]
    fn non_preserving_operator_is_reported() {
        let mut t = StructureTensor::new(3);
        t.set(1, 1, 2, s(1));
        let mut d = Matrix::zeros(3, 3);
        d[(0, 1)] = s(1); // e2 -> e1 leaves L^2
        assert!(matches!(flag_blocks(&t, &d, None), Err(Error::Invariant(_))));
    }
}
