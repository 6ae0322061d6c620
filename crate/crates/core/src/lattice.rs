//! Exact integer linear algebra: Smith normal form, cokernel structure,
//! lattice membership and canonical coset reduction.
//!
//! Everything here is over arbitrary-precision integers; intermediate
//! entries of a Smith reduction can grow well past machine word size even
//! for small inputs, so no fixed-width arithmetic is used anywhere.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::Result;

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, BigInt::from(x));
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(ambient: usize, cols: &[Vec<i64>]) -> Self {
        let mut m = Self::zeros(ambient, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), ambient, "column length mismatch");
            for (i, &x) in col.iter().enumerate() {
                m.set(i, j, BigInt::from(x));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let mut out = IntegerMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = a * other.get(k, j);
                    let cur = out.get(i, j) + add;
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in mul_vec");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    pub fn transpose(&self) -> IntegerMatrix {
        let mut out = IntegerMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !m.get(i, k).is_zero()) {
                    Some(i) => {
                        m.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j);
                    m.set(i, j, t / &prev);
                }
                m.set(i, k, BigInt::zero());
            }
            prev = m.get(k, k).clone();
        }
        sign * m.get(n - 1, n - 1).clone()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[i] += q * row[k]
    fn add_row_multiple(&mut self, i: usize, k: usize, q: &BigInt) {
        for j in 0..self.cols {
            let t = self.get(i, j) + q * self.get(k, j);
            self.set(i, j, t);
        }
    }

    /// col[j] += q * col[k]
    fn add_col_multiple(&mut self, j: usize, k: usize, q: &BigInt) {
        for i in 0..self.rows {
            let t = self.get(i, j) + q * self.get(i, k);
            self.set(i, j, t);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let t = -self.get(i, j).clone();
            self.set(i, j, t);
        }
    }
}

/// A Smith decomposition `U * A * V = D` with `U`, `V` unimodular and `D`
/// diagonal with each entry dividing the next.
#[derive(Debug, Clone)]
pub struct SmithNormalForm {
    pub u: IntegerMatrix,
    pub d: IntegerMatrix,
    pub v: IntegerMatrix,
    u_inv: IntegerMatrix,
    diag: Vec<BigInt>,
}

impl SmithNormalForm {
    /// Nonzero diagonal entries, in divisibility order.
    pub fn diagonal(&self) -> &[BigInt] {
        &self.diag
    }

    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    pub fn u_inverse(&self) -> &IntegerMatrix {
        &self.u_inv
    }
}

/// Machine-integer Smith reduction with overflow checking; mirrors the
/// exact algorithm step for step, so on success the result is identical.
/// Returns `None` as soon as any intermediate value overflows.
fn smith_normal_form_i64(a: &IntegerMatrix) -> Option<SmithNormalForm> {
    let rows = a.rows();
    let cols = a.cols();
    let mut d: Vec<i64> = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            d.push(i64::try_from(a.get(i, j).clone()).ok()?);
        }
    }
    let ident = |n: usize| {
        let mut m = vec![0i64; n * n];
        for i in 0..n {
            m[i * n + i] = 1;
        }
        m
    };
    let mut u = ident(rows);
    let mut u_inv = ident(rows);
    let mut v = ident(cols);

    fn swap_rows(m: &mut [i64], cols: usize, a: usize, b: usize) {
        for j in 0..cols {
            m.swap(a * cols + j, b * cols + j);
        }
    }
    fn swap_cols(m: &mut [i64], rows: usize, cols: usize, a: usize, b: usize) {
        for i in 0..rows {
            m.swap(i * cols + a, i * cols + b);
        }
    }
    fn add_row(m: &mut [i64], cols: usize, i: usize, k: usize, q: i64) -> bool {
        for j in 0..cols {
            let Some(p) = q.checked_mul(m[k * cols + j]) else {
                return false;
            };
            let Some(s) = m[i * cols + j].checked_add(p) else {
                return false;
            };
            m[i * cols + j] = s;
        }
        true
    }
    fn add_col(m: &mut [i64], rows: usize, cols: usize, j: usize, k: usize, q: i64) -> bool {
        for i in 0..rows {
            let Some(p) = q.checked_mul(m[i * cols + k]) else {
                return false;
            };
            let Some(s) = m[i * cols + j].checked_add(p) else {
                return false;
            };
            m[i * cols + j] = s;
        }
        true
    }

    let n = rows.min(cols);
    let mut k = 0;
    while k < n {
        let mut pivot: Option<(usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                let x = d[i * cols + j];
                if x == 0 {
                    continue;
                }
                match pivot {
                    None => pivot = Some((i, j)),
                    Some((pi, pj)) => {
                        if x.unsigned_abs() < d[pi * cols + pj].unsigned_abs() {
                            pivot = Some((i, j));
                        }
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else {
            break;
        };
        swap_rows(&mut d, cols, k, pi);
        swap_rows(&mut u, rows, k, pi);
        swap_cols(&mut u_inv, rows, rows, k, pi);
        swap_cols(&mut d, rows, cols, k, pj);
        swap_cols(&mut v, cols, cols, k, pj);

        let mut dirty = false;
        for i in k + 1..rows {
            if d[i * cols + k] != 0 {
                let q = d[i * cols + k]
                    .checked_div(d[k * cols + k])?
                    .checked_neg()?;
                if !(add_row(&mut d, cols, i, k, q)
                    && add_row(&mut u, rows, i, k, q)
                    && add_col(&mut u_inv, rows, rows, k, i, q.checked_neg()?))
                {
                    return None;
                }
                if d[i * cols + k] != 0 {
                    dirty = true;
                }
            }
        }
        for j in k + 1..cols {
            if d[k * cols + j] != 0 {
                let q = d[k * cols + j]
                    .checked_div(d[k * cols + k])?
                    .checked_neg()?;
                if !(add_col(&mut d, rows, cols, j, k, q)
                    && add_col(&mut v, cols, cols, j, k, q))
                {
                    return None;
                }
                if d[k * cols + j] != 0 {
                    dirty = true;
                }
            }
        }
        if dirty {
            continue;
        }

        let piv = d[k * cols + k];
        let offender = (k + 1..rows)
            .flat_map(|i| (k + 1..cols).map(move |j| (i, j)))
            .find(|&(i, j)| d[i * cols + j].checked_rem(piv) != Some(0));
        if let Some((i, _)) = offender {
            if !(add_row(&mut d, cols, k, i, 1)
                && add_row(&mut u, rows, k, i, 1)
                && add_col(&mut u_inv, rows, rows, i, k, -1))
            {
                return None;
            }
            continue;
        }

        if d[k * cols + k] < 0 {
            for i in 0..rows {
                d[i * cols + k] = d[i * cols + k].checked_neg()?;
            }
            for i in 0..cols {
                v[i * cols + k] = v[i * cols + k].checked_neg()?;
            }
        }
        k += 1;
    }

    let wrap = |data: &[i64], r: usize, c: usize| {
        let mut m = IntegerMatrix::zeros(r, c);
        for i in 0..r {
            for j in 0..c {
                m.set(i, j, BigInt::from(data[i * c + j]));
            }
        }
        m
    };
    let d = wrap(&d, rows, cols);
    let diag: Vec<BigInt> = (0..n)
        .map(|i| d.get(i, i).clone())
        .take_while(|x| !x.is_zero())
        .collect();
    Some(SmithNormalForm {
        u: wrap(&u, rows, rows),
        d,
        v: wrap(&v, cols, cols),
        u_inv: wrap(&u_inv, rows, rows),
        diag,
    })
}

/// Computes the Smith normal form of `a`. Deterministic for a fixed input:
/// pivots are chosen by minimal absolute value, ties broken by position.
pub fn smith_normal_form(a: &IntegerMatrix) -> SmithNormalForm {
    if let Some(snf) = smith_normal_form_i64(a) {
        return snf;
    }
    smith_normal_form_exact(a)
}

/// Arbitrary-precision path; intermediate entries of a Smith reduction can
/// grow well past machine words even for small inputs.
fn smith_normal_form_exact(a: &IntegerMatrix) -> SmithNormalForm {
    let rows = a.rows();
    let cols = a.cols();
    let mut d = a.clone();
    let mut u = IntegerMatrix::identity(rows);
    let mut u_inv = IntegerMatrix::identity(rows);
    let mut v = IntegerMatrix::identity(cols);

    // row ops mirror onto u (and inversely onto u_inv), col ops onto v
    let swap_rows = |d: &mut IntegerMatrix,
                         u: &mut IntegerMatrix,
                         u_inv: &mut IntegerMatrix,
                         a: usize,
                         b: usize| {
        d.swap_rows(a, b);
        u.swap_rows(a, b);
        u_inv.swap_cols(a, b);
    };
    let add_row = |d: &mut IntegerMatrix,
                       u: &mut IntegerMatrix,
                       u_inv: &mut IntegerMatrix,
                       i: usize,
                       k: usize,
                       q: &BigInt| {
        d.add_row_multiple(i, k, q);
        u.add_row_multiple(i, k, q);
        u_inv.add_col_multiple(k, i, &-q.clone());
    };

    let n = rows.min(cols);
    let mut k = 0;
    while k < n {
        // smallest nonzero entry of the trailing submatrix becomes the pivot
        let mut pivot: Option<(usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                let x = d.get(i, j);
                if x.is_zero() {
                    continue;
                }
                match pivot {
                    None => pivot = Some((i, j)),
                    Some((pi, pj)) => {
                        if x.abs() < d.get(pi, pj).abs() {
                            pivot = Some((i, j));
                        }
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else {
            break; // trailing submatrix is zero
        };
        swap_rows(&mut d, &mut u, &mut u_inv, k, pi);
        d.swap_cols(k, pj);
        v.swap_cols(k, pj);

        // clear the pivot column and row; remainders shrink, so this ends
        let mut dirty = false;
        for i in k + 1..rows {
            if !d.get(i, k).is_zero() {
                let q = -(d.get(i, k) / d.get(k, k));
                add_row(&mut d, &mut u, &mut u_inv, i, k, &q);
                if !d.get(i, k).is_zero() {
                    dirty = true;
                }
            }
        }
        for j in k + 1..cols {
            if !d.get(k, j).is_zero() {
                let q = -(d.get(k, j) / d.get(k, k));
                d.add_col_multiple(j, k, &q);
                v.add_col_multiple(j, k, &q);
                if !d.get(k, j).is_zero() {
                    dirty = true;
                }
            }
        }
        if dirty {
            continue;
        }

        // enforce the divisibility chain before moving on
        let piv = d.get(k, k).clone();
        let offender = (k + 1..rows)
            .flat_map(|i| (k + 1..cols).map(move |j| (i, j)))
            .find(|&(i, j)| !(d.get(i, j) % &piv).is_zero());
        if let Some((i, _)) = offender {
            add_row(&mut d, &mut u, &mut u_inv, k, i, &BigInt::one());
            continue;
        }

        if d.get(k, k).is_negative() {
            d.negate_col(k);
            v.negate_col(k);
        }
        k += 1;
    }

    let diag: Vec<BigInt> = (0..n)
        .map(|i| d.get(i, i).clone())
        .take_while(|x| !x.is_zero())
        .collect();
    SmithNormalForm {
        u,
        d,
        v,
        u_inv,
        diag,
    }
}

/// A finitely generated abelian group in invariant-factor form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAbelianGroup {
    /// Invariant factors `> 1`, each dividing the next.
    pub invariant_factors: Vec<BigInt>,
    pub free_rank: usize,
}

impl FiniteAbelianGroup {
    pub fn trivial() -> Self {
        FiniteAbelianGroup {
            invariant_factors: Vec::new(),
            free_rank: 0,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty() && self.free_rank == 0
    }

    /// Order of the group; `None` when the free rank is positive.
    pub fn order(&self) -> Option<BigInt> {
        if self.free_rank > 0 {
            return None;
        }
        Some(self.invariant_factors.iter().product())
    }
}

impl std::fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = self
            .invariant_factors
            .iter()
            .map(|d| format!("Z/{d}"))
            .collect();
        for _ in 0..self.free_rank {
            parts.push("Z".to_string());
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" x "))
        }
    }
}

/// Structure of `Z^rows / column-span(a)`.
pub fn cokernel(a: &IntegerMatrix) -> FiniteAbelianGroup {
    let snf = smith_normal_form(a);
    let invariant_factors = snf
        .diagonal()
        .iter()
        .filter(|d| !d.is_one())
        .cloned()
        .collect();
    FiniteAbelianGroup {
        invariant_factors,
        free_rank: a.rows() - snf.rank(),
    }
}

/// A sublattice of `Z^ambient`, given by a generator matrix whose columns
/// span it, with the Smith decomposition precomputed.
#[derive(Debug, Clone)]
pub struct Lattice {
    ambient: usize,
    generators: IntegerMatrix,
    snf: SmithNormalForm,
}

impl Lattice {
    pub fn new(generators: IntegerMatrix) -> Self {
        let snf = smith_normal_form(&generators);
        Lattice {
            ambient: generators.rows(),
            generators,
            snf,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.snf.rank()
    }

    pub fn generators(&self) -> &IntegerMatrix {
        &self.generators
    }

    pub fn smith(&self) -> &SmithNormalForm {
        &self.snf
    }

    fn check_dim(&self, v: &[BigInt]) -> Result<()> {
        if v.len() != self.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Membership of `v` in the integer column span.
    pub fn contains(&self, v: &[BigInt]) -> Result<bool> {
        Ok(self.coefficients(v)?.is_some())
    }

    /// Coefficients `x` with `generators * x = v`, if `v` is in the lattice.
    /// The witness is verified by multiplication before being returned.
    pub fn coefficients(&self, v: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
        self.check_dim(v)?;
        let w = self.snf.u.mul_vec(v);
        let rank = self.snf.rank();
        let mut y = vec![BigInt::zero(); self.generators.cols()];
        for (i, wi) in w.iter().enumerate() {
            if i < rank {
                let (q, r) = wi.div_rem(&self.snf.diagonal()[i]);
                if !r.is_zero() {
                    return Ok(None);
                }
                y[i] = q;
            } else if !wi.is_zero() {
                return Ok(None);
            }
        }
        let x = self.snf.v.mul_vec(&y);
        debug_assert_eq!(self.generators.mul_vec(&x), v.to_vec());
        Ok(Some(x))
    }

    /// Canonical representative of the coset `v + L`: two vectors reduce to
    /// the same representative exactly when their difference lies in `L`.
    /// The choice is the Hermite-style remainder induced by the fixed Smith
    /// decomposition and is stable across runs.
    pub fn reduce(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        self.check_dim(v)?;
        let mut w = self.snf.u.mul_vec(v);
        for (i, d) in self.snf.diagonal().iter().enumerate() {
            w[i] = w[i].mod_floor(d);
        }
        Ok(self.snf.u_inv.mul_vec(&w))
    }

    /// Structure of `Z^ambient / L`.
    pub fn cokernel_structure(&self) -> FiniteAbelianGroup {
        let invariant_factors = self
            .snf
            .diagonal()
            .iter()
            .filter(|d| !d.is_one())
            .cloned()
            .collect();
        FiniteAbelianGroup {
            invariant_factors,
            free_rank: self.ambient - self.snf.rank(),
        }
    }

    /// Structure of `L / column-span(sub)`; the columns of `sub` must lie
    /// in `L`.
    pub fn quotient_by(&self, sub: &IntegerMatrix) -> Result<FiniteAbelianGroup> {
        if sub.rows() != self.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                got: sub.rows(),
            });
        }
        let rank = self.snf.rank();
        // coordinates of each sub-generator in the Smith basis of L
        let mut coords = IntegerMatrix::zeros(rank, sub.cols());
        for j in 0..sub.cols() {
            let col: Vec<BigInt> = (0..sub.rows()).map(|i| sub.get(i, j).clone()).collect();
            let w = self.snf.u.mul_vec(&col);
            for (i, wi) in w.iter().enumerate() {
                if i < rank {
                    let (q, r) = wi.div_rem(&self.snf.diagonal()[i]);
                    if !r.is_zero() {
                        return Err(Error::InvariantViolated(
                            "quotient generator not contained in the lattice".into(),
                        ));
                    }
                    coords.set(i, j, q);
                } else if !wi.is_zero() {
                    return Err(Error::InvariantViolated(
                        "quotient generator not contained in the lattice".into(),
                    ));
                }
            }
        }
        Ok(cokernel(&coords))
    }
}

pub fn to_bigint_vec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}
