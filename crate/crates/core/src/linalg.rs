//! Dense exact linear algebra over `Scalar`, plus an incremental sparse
//! echelon form for large homogeneous systems.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{domain, input, Result};
use crate::scalar::Scalar;

/// Coefficient vector, position `k` holds the coordinate of `e_{k+1}`.
pub type Vector = Vec<Scalar>;

pub fn zero_vector(n: usize) -> Vector {
    vec![Scalar::zero(); n]
}

/// Unit vector for the 1-based basis index `i`.
pub fn unit(n: usize, i: usize) -> Vector {
    let mut v = zero_vector(n);
    v[i - 1] = Scalar::one();
    v
}

pub fn is_zero_vector(v: &[Scalar]) -> bool {
    v.iter().all(Scalar::is_zero)
}

pub fn add_scaled(acc: &mut [Scalar], c: &Scalar, v: &[Scalar]) {
    if c.is_zero() {
        return;
    }
    for (a, b) in acc.iter_mut().zip(v) {
        if !b.is_zero() {
            *a += &(c * b);
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = Scalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(n: usize, cols: &[Vector]) -> Self {
        let mut m = Matrix::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), n);
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| Scalar::from_int(v)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row_vectors(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows, "dimension mismatch in product");
        let mut out = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vector {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn pow(&self, k: u32) -> Matrix {
        assert!(self.is_square());
        let mut acc = Matrix::identity(self.rows);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn trace(&self) -> Scalar {
        (0..self.rows.min(self.cols)).map(|k| self[(k, k)].clone()).sum()
    }

    pub fn rank(&self) -> usize {
        rref(self).1
    }

    /// Exact inverse, `None` when singular or non-square.
    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Scalar::one();
        }
        let (r, rank, pivots) = rref(&aug);
        if rank < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Determinant by fraction-exact elimination.
    pub fn det(&self) -> Scalar {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Scalar::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a[(r, c)].is_zero()) else {
                return Scalar::zero();
            };
            if p != c {
                a.swap_rows(p, c);
                det = -det;
            }
            let piv = a[(c, c)].clone();
            det *= &piv;
            let inv = piv.inv().unwrap();
            for r in c + 1..n {
                if a[(r, c)].is_zero() {
                    continue;
                }
                let f = &a[(r, c)] * &inv;
                for j in c..n {
                    let t = &f * &a[(c, j)];
                    a[(r, j)] -= &t;
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Row-major flattening, used to compare spaces of matrices.
    pub fn vectorize(&self) -> Vector {
        self.data.clone()
    }

    pub fn unvectorize(rows: usize, cols: usize, v: &[Scalar]) -> Matrix {
        assert_eq!(v.len(), rows * cols);
        Matrix { rows, cols, data: v.to_vec() }
    }

    /// Sub-matrix on the given row and column index sets.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m[(a, b)] = self[(i, j)].clone();
            }
        }
        m
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Reduced row-echelon form with leading ones; returns (form, rank, pivot columns).
pub fn rref(m: &Matrix) -> (Matrix, usize, Vec<usize>) {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        a.swap_rows(p, r);
        let inv = a[(r, c)].inv().unwrap();
        for j in c..cols {
            if !a[(r, j)].is_zero() {
                a[(r, j)] = &a[(r, j)] * &inv;
            }
        }
        let pivot_row: Vec<Scalar> = a.row(r)[c..].to_vec();
        for i in 0..rows {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let f = a[(i, c)].clone();
            for (off, pv) in pivot_row.iter().enumerate() {
                if !pv.is_zero() {
                    let t = &f * pv;
                    a[(i, c + off)] -= &t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, r, pivots)
}

/// Null space `{v : m v = 0}`; every basis vector is multiplied back as a check.
pub fn kernel(m: &Matrix) -> Subspace {
    let (r, rank, pivots) = rref(m);
    let cols = m.cols();
    let mut basis = Vec::new();
    for f in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = zero_vector(cols);
        v[f] = Scalar::one();
        for (row, &p) in pivots.iter().enumerate().take(rank) {
            v[p] = -r[(row, f)].clone();
        }
        assert!(is_zero_vector(&m.mul_vec(&v)), "kernel vector failed re-substitution");
        basis.push(v);
    }
    Subspace::from_vectors(cols, &basis)
}

/// Square-matrix nilpotency: `m^dim = 0` by repeated multiplication.
pub fn is_nilpotent_matrix(m: &Matrix) -> Result<bool> {
    if !m.is_square() {
        return input(format!("nilpotency test needs a square matrix, got {}x{}", m.rows(), m.cols()));
    }
    let mut p = m.clone();
    for _ in 1..m.rows().max(1) {
        if p.is_zero() {
            return Ok(true);
        }
        p = p.mul(m);
    }
    Ok(p.is_zero())
}

/// Jordan block sizes of a nilpotent matrix from the rank sequence of its powers.
pub fn jordan_block_sizes(m: &Matrix) -> Result<Vec<usize>> {
    if !is_nilpotent_matrix(m)? {
        return domain("jordan_block_sizes needs a nilpotent matrix");
    }
    let n = m.rows();
    let mut ranks = vec![n];
    let mut p = Matrix::identity(n);
    while *ranks.last().unwrap() > 0 {
        p = p.mul(m);
        ranks.push(p.rank());
    }
    // at_least[k] = number of blocks of size >= k
    let at_least: Vec<usize> = (1..ranks.len()).map(|k| ranks[k - 1] - ranks[k]).collect();
    let mut sizes = Vec::new();
    for k in (1..=at_least.len()).rev() {
        let exact = at_least[k - 1] - at_least.get(k).copied().unwrap_or(0);
        sizes.extend(std::iter::repeat(k).take(exact));
    }
    Ok(sizes)
}

/// A linear subspace of `ambient`-space stored by its canonical RREF basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(ambient={}, dim={}, basis={:?})", self.ambient, self.dim(), self.basis)
    }
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Matrix::zeros(0, ambient), pivots: vec![] }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: Matrix::identity(ambient), pivots: (0..ambient).collect() }
    }

    pub fn from_vectors(ambient: usize, vecs: &[Vector]) -> Self {
        if vecs.is_empty() {
            return Subspace::zero(ambient);
        }
        let m = Matrix::from_rows(vecs.to_vec());
        assert_eq!(m.cols(), ambient);
        let (r, rank, pivots) = rref(&m);
        let rows: Vec<Vector> = (0..rank).map(|i| r.row(i).to_vec()).collect();
        let basis = if rows.is_empty() { Matrix::zeros(0, ambient) } else { Matrix::from_rows(rows) };
        Subspace { ambient, basis, pivots }
    }

    /// Span of the 1-based basis vectors `e_i`.
    pub fn coordinate(ambient: usize, indices: &[usize]) -> Self {
        let vecs: Vec<Vector> = indices.iter().map(|&i| unit(ambient, i)).collect();
        Subspace::from_vectors(ambient, &vecs)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn vectors(&self) -> Vec<Vector> {
        self.basis.row_vectors()
    }

    /// Component of `v` outside the span (zero iff `v` is in the subspace).
    pub fn reduce(&self, v: &[Scalar]) -> Vector {
        let mut out = v.to_vec();
        for (r, &p) in self.pivots.iter().enumerate() {
            let c = out[p].clone();
            if !c.is_zero() {
                add_scaled(&mut out, &-c, self.basis.row(r));
            }
        }
        out
    }

    pub fn contains_vector(&self, v: &[Scalar]) -> bool {
        assert_eq!(v.len(), self.ambient);
        is_zero_vector(&self.reduce(v))
    }

    /// Coordinates of a member vector in the canonical basis.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vector> {
        if !self.contains_vector(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    /// Is the 1-based basis vector `e_i` in the subspace?
    pub fn contains_unit(&self, i: usize) -> bool {
        self.contains_vector(&unit(self.ambient, i))
    }

    /// True when the subspace is spanned by standard basis vectors; returns them (1-based).
    pub fn coordinate_support(&self) -> Option<Vec<usize>> {
        let idx: Vec<usize> = self.pivots.iter().map(|p| p + 1).collect();
        for r in 0..self.dim() {
            if self.basis.row(r).iter().filter(|x| !x.is_zero()).count() != 1 {
                return None;
            }
        }
        Some(idx)
    }
}

fn check_ambient(a: &Subspace, b: &Subspace) -> Result<()> {
    if a.ambient != b.ambient {
        return input(format!("ambient dimensions differ: {} vs {}", a.ambient, b.ambient));
    }
    Ok(())
}

pub fn subspace_sum(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    check_ambient(a, b)?;
    let mut v = a.vectors();
    v.extend(b.vectors());
    Ok(Subspace::from_vectors(a.ambient, &v))
}

pub fn subspace_intersect(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    check_ambient(a, b)?;
    if a.dim() == 0 || b.dim() == 0 {
        return Ok(Subspace::zero(a.ambient));
    }
    // solve sum(l_i a_i) - sum(m_j b_j) = 0
    let av = a.vectors();
    let bv = b.vectors();
    let mut cols: Vec<Vector> = av.clone();
    cols.extend(bv.iter().map(|v| v.iter().map(|x| -x).collect::<Vector>()));
    let m = Matrix::from_columns(a.ambient, &cols);
    let k = kernel(&m);
    let vecs: Vec<Vector> = k
        .vectors()
        .into_iter()
        .map(|coef| {
            let mut out = zero_vector(a.ambient);
            for (c, v) in coef.iter().zip(&av) {
                add_scaled(&mut out, c, v);
            }
            out
        })
        .collect();
    Ok(Subspace::from_vectors(a.ambient, &vecs))
}

/// `b ⊆ a`.
pub fn subspace_contains(a: &Subspace, b: &Subspace) -> Result<bool> {
    check_ambient(a, b)?;
    Ok(b.vectors().iter().all(|v| a.contains_vector(v)))
}

/// Incremental echelon form over sparse rows. Rows are reduced on insertion;
/// `kernel` back-substitutes to the canonical reduced form.
#[derive(Clone, Debug)]
pub struct SparseEchelon {
    ncols: usize,
    rows: BTreeMap<usize, Vec<(usize, Scalar)>>,
}

impl SparseEchelon {
    pub fn new(ncols: usize) -> Self {
        SparseEchelon { ncols, rows: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Inserts a row given as (column, value) pairs; returns whether it raised the rank.
    pub fn add_row<I: IntoIterator<Item = (usize, Scalar)>>(&mut self, entries: I) -> bool {
        let mut row: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (c, v) in entries {
            assert!(c < self.ncols);
            if v.is_zero() {
                continue;
            }
            let e = row.entry(c).or_default();
            *e += &v;
            if e.is_zero() {
                row.remove(&c);
            }
        }
        let mut cursor = 0;
        loop {
            let next = row.range(cursor..).find(|(c, _)| self.rows.contains_key(c)).map(|(c, v)| (*c, v.clone()));
            let Some((c, f)) = next else { break };
            for (col, pv) in &self.rows[&c] {
                let e = row.entry(*col).or_default();
                *e -= &(&f * pv);
                if e.is_zero() {
                    row.remove(col);
                }
            }
            cursor = c + 1;
        }
        let Some((&lead, lv)) = row.iter().next() else {
            return false;
        };
        let inv = lv.inv().unwrap();
        let normalized: Vec<(usize, Scalar)> = row.into_iter().map(|(c, v)| (c, &v * &inv)).collect();
        self.rows.insert(lead, normalized);
        true
    }

    /// Basis of the solution space of the homogeneous system.
    pub fn kernel(&self) -> Vec<Vector> {
        let mut reduced: BTreeMap<usize, BTreeMap<usize, Scalar>> = BTreeMap::new();
        for (&p, row) in self.rows.iter().rev() {
            let mut r: BTreeMap<usize, Scalar> = row.iter().cloned().collect();
            let later: Vec<usize> = r.keys().copied().filter(|c| *c != p && reduced.contains_key(c)).collect();
            for c in later {
                let f = match r.get(&c) {
                    Some(f) => f.clone(),
                    None => continue,
                };
                for (col, v) in &reduced[&c] {
                    let e = r.entry(*col).or_default();
                    *e -= &(&f * v);
                    if e.is_zero() {
                        r.remove(col);
                    }
                }
            }
            reduced.insert(p, r);
        }
        let mut out = Vec::new();
        for f in (0..self.ncols).filter(|c| !self.rows.contains_key(c)) {
            let mut v = zero_vector(self.ncols);
            v[f] = Scalar::one();
            for (&p, r) in &reduced {
                if let Some(x) = r.get(&f) {
                    v[p] = -x.clone();
                }
            }
            out.push(v);
        }
        out
    }
}

const MOD_P: u64 = (1 << 61) - 1;

fn mod_mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MOD_P as u128) as u64
}

fn mod_pow(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mod_mul(r, a);
        }
        a = mod_mul(a, a);
        e >>= 1;
    }
    r
}

fn bigint_mod(x: &num_bigint::BigInt) -> u64 {
    use num_traits::{Signed, ToPrimitive};
    let r = (x.abs() % MOD_P).to_u64().expect("reduced below the modulus");
    if x.is_negative() && r != 0 {
        MOD_P - r
    } else {
        r
    }
}

/// Image of a real scalar modulo a fixed 61-bit prime; `None` for complex
/// values or denominators divisible by the prime.
fn scalar_mod(v: &Scalar) -> Option<u64> {
    if !v.is_real() {
        return None;
    }
    let d = bigint_mod(v.re().denom());
    if d == 0 {
        return None;
    }
    Some(mod_mul(bigint_mod(v.re().numer()), mod_pow(d, MOD_P - 2)))
}

/// Indices of a maximal set of rows that are independent modulo a large
/// prime. Independent mod p implies independent over Q, so the kernel of the
/// selected rows contains the kernel of the full system; callers verify
/// equality. `None` when some entry has no image mod p.
pub fn independent_rows_mod_p(rows: &[Vec<(usize, Scalar)>], ncols: usize) -> Option<Vec<usize>> {
    let mut piv: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    let mut keep = Vec::new();
    for (idx, row) in rows.iter().enumerate() {
        let mut r = vec![0u64; ncols];
        for (c, v) in row {
            r[*c] = (r[*c] + scalar_mod(v)?) % MOD_P;
        }
        for (&c, pr) in &piv {
            let f = r[c];
            if f == 0 {
                continue;
            }
            for (x, y) in r.iter_mut().zip(pr) {
                *x = (*x + MOD_P - mod_mul(f, *y)) % MOD_P;
            }
        }
        let Some(lead) = r.iter().position(|x| *x != 0) else { continue };
        let inv = mod_pow(r[lead], MOD_P - 2);
        for x in r.iter_mut() {
            *x = mod_mul(*x, inv);
        }
        // keep stored rows reduced at the new pivot
        for pr in piv.values_mut() {
            let f = pr[lead];
            if f != 0 {
                for (x, y) in pr.iter_mut().zip(&r) {
                    *x = (*x + MOD_P - mod_mul(f, *y)) % MOD_P;
                }
            }
        }
        piv.insert(lead, r);
        keep.push(idx);
        if piv.len() == ncols {
            break;
        }
    }
    Some(keep)
}

/// `a/b` with `|a|, b <= sqrt(p/2)` and `a = b x mod p`, if one exists.
fn rational_reconstruct(x: u64) -> Option<Scalar> {
    let bound: i128 = 1 << 30;
    let (mut r0, mut r1) = (MOD_P as i128, x as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 >= bound {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if t1 == 0 || t1.abs() >= bound {
        return None;
    }
    let (num, den) = if t1 < 0 { (-r1, -t1) } else { (r1, t1) };
    Some(Scalar::frac(num as i64, den as i64))
}

/// Kernel of a homogeneous system computed modulo a large prime and lifted
/// to rationals, in reduced form (identity on the free columns). The lift is
/// a candidate only: callers must check it against the exact system. Since
/// the rank over Q is at least the rank mod p, a candidate whose vectors all
/// satisfy the exact system spans the full kernel.
pub fn kernel_mod_p_lifted(rows: &[Vec<(usize, Scalar)>], ncols: usize) -> Option<Vec<Vector>> {
    let mut piv: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    for row in rows {
        let mut r = vec![0u64; ncols];
        for (c, v) in row {
            r[*c] = (r[*c] + scalar_mod(v)?) % MOD_P;
        }
        for (&c, pr) in &piv {
            let f = r[c];
            if f != 0 {
                for (x, y) in r.iter_mut().zip(pr) {
                    *x = (*x + MOD_P - mod_mul(f, *y)) % MOD_P;
                }
            }
        }
        let Some(lead) = r.iter().position(|x| *x != 0) else { continue };
        let inv = mod_pow(r[lead], MOD_P - 2);
        for x in r.iter_mut() {
            *x = mod_mul(*x, inv);
        }
        for pr in piv.values_mut() {
            let f = pr[lead];
            if f != 0 {
                for (x, y) in pr.iter_mut().zip(&r) {
                    *x = (*x + MOD_P - mod_mul(f, *y)) % MOD_P;
                }
            }
        }
        piv.insert(lead, r);
        if piv.len() == ncols {
            break;
        }
    }
    let mut out = Vec::new();
    for f in (0..ncols).filter(|c| !piv.contains_key(c)) {
        let mut v = zero_vector(ncols);
        v[f] = Scalar::one();
        for (&p, r) in &piv {
            if r[f] != 0 {
                v[p] = -rational_reconstruct(r[f])?;
            }
        }
        out.push(v);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::s;

    #[test]
    fn rref_examples() {
        let (_, rank, piv) = rref(&Matrix::from_i64(&[&[1, 2], &[2, 4]]));
        assert_eq!((rank, piv), (1, vec![0]));
        let id = Matrix::identity(3);
        let (r, rank, _) = rref(&id);
        assert_eq!((r, rank), (id, 3));
        assert_eq!(rref(&Matrix::zeros(2, 2)).1, 0);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel(&Matrix::zeros(2, 2)).dim(), 2);
        assert_eq!(kernel(&Matrix::identity(4)).dim(), 0);
        let k = kernel(&Matrix::from_i64(&[&[1, 1]]));
        assert_eq!(k, Subspace::from_vectors(2, &[vec![s(1), s(-1)]]));
    }

    #[test]
    fn lattice_ops() {
        let e1 = Subspace::coordinate(3, &[1]);
        let e2 = Subspace::coordinate(3, &[2]);
        assert_eq!(subspace_sum(&e1, &e2).unwrap().dim(), 2);
        let v = Subspace::from_vectors(2, &[vec![s(1), s(1)]]);
        let w = Subspace::coordinate(2, &[1]);
        assert_eq!(subspace_intersect(&v, &w).unwrap().dim(), 0);
        assert_eq!(subspace_intersect(&v, &v).unwrap(), v);
        assert!(subspace_sum(&v, &e1).is_err());
    }

    #[test]
    fn jordan_examples() {
        let mut m = Matrix::zeros(5, 5);
        m[(1, 0)] = s(1);
        m[(2, 1)] = s(1);
        m[(4, 3)] = s(1);
        assert_eq!(jordan_block_sizes(&m).unwrap(), vec![3, 2]);
        assert_eq!(jordan_block_sizes(&Matrix::zeros(5, 5)).unwrap(), vec![1; 5]);
        assert!(jordan_block_sizes(&Matrix::identity(2)).is_err());
        assert!(!is_nilpotent_matrix(&Matrix::identity(3)).unwrap());
    }

    #[test]
    fn sparse_matches_dense() {
        let m = Matrix::from_i64(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 1, 0]]);
        let mut se = SparseEchelon::new(4);
        for i in 0..3 {
            se.add_row(m.row(i).iter().cloned().enumerate());
        }
        assert_eq!(se.rank(), 2);
        let k = Subspace::from_vectors(4, &se.kernel());
        assert_eq!(k, kernel(&m));
    }

    #[test]
    fn inverse_and_det() {
        let m = Matrix::from_i64(&[&[2, 1], &[5, 3]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
        assert_eq!(m.det(), s(1));
        assert!(Matrix::from_i64(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }
}
