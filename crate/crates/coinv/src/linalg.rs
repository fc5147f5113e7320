//! Exact integer and rational linear algebra.
//!
//! Smith normal form with unimodular transforms, cokernel invariant factors,
//! lattice membership, class orders and linear solves over Z and Q. Entries
//! are arbitrary-precision integers; nothing here rounds.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("row {row} has length {found}, expected {expected}")]
    RowLength {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self, LinalgError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        for (i, r) in rows.iter().enumerate() {
            if r.len() != ncols {
                return Err(LinalgError::RowLength {
                    row: i,
                    found: r.len(),
                    expected: ncols,
                });
            }
        }
        Ok(IntMatrix {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> BigInt) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        IntMatrix { rows, cols, data }
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            *m.at_mut(i, i) = e.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &BigInt {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut BigInt {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.at(c, r).clone())
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if !b.is_zero() {
                        *out.at_mut(i, j) += a * b;
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn mul_row_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.rows, "vector/matrix shape mismatch");
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                let a = self.at(i, j);
                if !a.is_zero() {
                    out[j] += vi * a;
                }
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn mul_col_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols, "matrix/vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum::<BigInt>()
            })
            .collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|r| (0..self.cols).all(|c| r == c || self.at(r, c).is_zero()))
    }

    /// Parses a whitespace/line-delimited integer matrix: one row per
    /// non-empty line, entries separated by whitespace, `#` starting a
    /// comment line.
    pub fn parse_text(text: &str) -> Result<Self, LinalgError> {
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row: Result<Vec<BigInt>, _> = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<BigInt>()
                        .map_err(|_| LinalgError::Dimension(format!("bad integer {tok:?}")))
                })
                .collect();
            rows.push(row?);
        }
        if rows.is_empty() {
            return Err(LinalgError::Dimension("empty matrix".into()));
        }
        Self::from_rows(rows)
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m: Vec<Vec<BigInt>> = self.row_vecs();
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                    Some(i) => {
                        m.swap(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    let (q, r) = num.div_rem(&prev);
                    debug_assert!(r.is_zero());
                    m[i][j] = q;
                }
                m[i][k] = BigInt::zero();
            }
            prev = m[k][k].clone();
        }
        let det = m[n - 1][n - 1].clone();
        if sign < 0 {
            -det
        } else {
            det
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(|e| e.to_string()).collect();
            writeln!(f, "  [{}]", line.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Smith normal form `S = U · A · V` with unimodular `U`, `V`.
///
/// When `A` is a matrix of lattice generators (one generator per row acting
/// on column-indexed coordinates), the accessors below answer membership and
/// quotient questions about the row lattice.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SnfResult {
    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.s.rows().min(self.s.cols());
        (0..n).map(|i| self.s.at(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }

    /// Invariant factors greater than one, in divisibility order.
    pub fn torsion_factors(&self) -> Vec<BigInt> {
        self.diagonal()
            .into_iter()
            .filter(|d| d > &BigInt::one())
            .collect()
    }

    /// Coordinates of a vector in the diagonalized basis: `v · V`.
    pub fn coords(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.v.mul_row_vec(v)
    }

    /// Is `v` in the integer span of the input's rows?
    pub fn in_span_z(&self, v: &[BigInt]) -> bool {
        let w = self.coords(v);
        let diag = self.diagonal();
        let rank = self.rank();
        for (j, wj) in w.iter().enumerate() {
            if j < rank {
                if !wj.is_multiple_of(&diag[j]) {
                    return false;
                }
            } else if !wj.is_zero() {
                return false;
            }
        }
        true
    }

    /// Is `v` in the rational span of the input's rows?
    pub fn in_span_q(&self, v: &[BigInt]) -> bool {
        let w = self.coords(v);
        let rank = self.rank();
        w.iter().skip(rank).all(|wj| wj.is_zero())
    }

    /// Smallest `n ≥ 1` with `n·v` in the integer row span, or `None` when
    /// the class of `v` modulo the row lattice is non-torsion.
    pub fn class_order(&self, v: &[BigInt]) -> Option<BigInt> {
        let w = self.coords(v);
        let diag = self.diagonal();
        let rank = self.rank();
        if !w.iter().skip(rank).all(|wj| wj.is_zero()) {
            return None;
        }
        let mut order = BigInt::one();
        for j in 0..rank {
            let d = &diag[j];
            let need = d / w[j].gcd(d);
            order = order.lcm(&need);
        }
        Some(order)
    }

    /// Column indices of the diagonalized basis carrying invariant factor
    /// greater than one.
    pub fn torsion_indices(&self) -> Vec<usize> {
        self.diagonal()
            .iter()
            .enumerate()
            .filter(|(_, d)| *d > &BigInt::one())
            .map(|(i, _)| i)
            .collect()
    }

    /// Ambient vectors whose classes generate the torsion subgroup of the
    /// quotient by the row lattice; the one at position `k` has order
    /// `torsion_factors()[k]`.
    pub fn torsion_basis(&self) -> Vec<Vec<BigInt>> {
        self.torsion_indices()
            .into_iter()
            .map(|i| self.v_inv.row(i).to_vec())
            .collect()
    }

    /// Residues of the class of `v` along `torsion_basis()`, reduced modulo
    /// the matching invariant factor; `None` when the class is non-torsion.
    pub fn torsion_class_coords(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        if !self.in_span_q(v) {
            return None;
        }
        let w = self.coords(v);
        let diag = self.diagonal();
        Some(
            self.torsion_indices()
                .into_iter()
                .map(|i| w[i].mod_floor(&diag[i]))
                .collect(),
        )
    }
}

struct SnfWork {
    b: IntMatrix,
    u: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl SnfWork {
    fn row_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.b.cols() {
            self.b.data.swap(i * self.b.cols + c, j * self.b.cols + c);
        }
        for c in 0..self.u.cols() {
            self.u.data.swap(i * self.u.cols + c, j * self.u.cols + c);
        }
    }

    fn col_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.b.rows() {
            self.b.data.swap(r * self.b.cols + i, r * self.b.cols + j);
        }
        for r in 0..self.v.rows() {
            self.v.data.swap(r * self.v.cols + i, r * self.v.cols + j);
        }
        // (V·E)^{-1} = E·V^{-1}: swapping columns of V swaps rows of V^{-1}.
        for c in 0..self.v_inv.cols() {
            self.v_inv
                .data
                .swap(i * self.v_inv.cols + c, j * self.v_inv.cols + c);
        }
    }

    /// row[dst] += q · row[src]
    fn row_addmul(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for c in 0..self.b.cols() {
            let s = &self.b.data[src * self.b.cols + c];
            if !s.is_zero() {
                let t = s * q;
                self.b.data[dst * self.b.cols + c] += t;
            }
        }
        for c in 0..self.u.cols() {
            let s = &self.u.data[src * self.u.cols + c];
            if !s.is_zero() {
                let t = s * q;
                self.u.data[dst * self.u.cols + c] += t;
            }
        }
    }

    /// col[dst] += q · col[src]
    fn col_addmul(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for r in 0..self.b.rows() {
            let s = &self.b.data[r * self.b.cols + src];
            if !s.is_zero() {
                let t = s * q;
                self.b.data[r * self.b.cols + dst] += t;
            }
        }
        for r in 0..self.v.rows() {
            let s = &self.v.data[r * self.v.cols + src];
            if !s.is_zero() {
                let t = s * q;
                self.v.data[r * self.v.cols + dst] += t;
            }
        }
        // Inverse of the column operation acts on rows of V^{-1}:
        // row[src] -= q · row[dst].
        for c in 0..self.v_inv.cols() {
            let s = &self.v_inv.data[dst * self.v_inv.cols + c];
            if !s.is_zero() {
                let t = s * q;
                self.v_inv.data[src * self.v_inv.cols + c] -= t;
            }
        }
    }

    fn row_negate(&mut self, i: usize) {
        for c in 0..self.b.cols() {
            let e = &mut self.b.data[i * self.b.cols + c];
            *e = -std::mem::take(e);
        }
        for c in 0..self.u.cols() {
            let e = &mut self.u.data[i * self.u.cols + c];
            *e = -std::mem::take(e);
        }
    }

    /// Minimal |entry| > 0 in the submatrix at (k,k), ties broken by lowest
    /// (row, col) in scan order. Fixing this rule makes the whole form
    /// deterministic.
    fn pivot(&self, k: usize) -> Option<(usize, usize)> {
        let mut best: Option<(&num_bigint::BigUint, usize, usize)> = None;
        for r in k..self.b.rows() {
            for c in k..self.b.cols() {
                let e = self.b.at(r, c);
                if e.is_zero() {
                    continue;
                }
                let a = e.magnitude();
                match &best {
                    Some((m, _, _)) if *m <= a => {}
                    _ => best = Some((a, r, c)),
                }
            }
        }
        best.map(|(_, r, c)| (r, c))
    }
}

/// Smith normal form of an integer matrix.
///
/// Returns `S = U·A·V` with `U`, `V` unimodular and `S` diagonal with
/// nonnegative entries in a divisibility chain. Deterministic for fixed
/// input.
pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    let (m, n) = (a.rows(), a.cols());
    let mut w = SnfWork {
        b: a.clone(),
        u: IntMatrix::identity(m),
        v: IntMatrix::identity(n),
        v_inv: IntMatrix::identity(n),
    };
    for k in 0..m.min(n) {
        loop {
            let Some((pr, pc)) = w.pivot(k) else {
                // Everything from (k,k) on is zero; done.
                return finish(w);
            };
            w.row_swap(k, pr);
            w.col_swap(k, pc);
            if w.b.at(k, k).is_negative() {
                w.row_negate(k);
            }
            let mut dirty = false;
            for i in k + 1..m {
                if !w.b.at(i, k).is_zero() {
                    let q = -(w.b.at(i, k) / w.b.at(k, k));
                    w.row_addmul(i, k, &q);
                    dirty |= !w.b.at(i, k).is_zero();
                }
            }
            for j in k + 1..n {
                if !w.b.at(k, j).is_zero() {
                    let q = -(w.b.at(k, j) / w.b.at(k, k));
                    w.col_addmul(j, k, &q);
                    dirty |= !w.b.at(k, j).is_zero();
                }
            }
            if dirty {
                continue;
            }
            // Row and column k are clear; enforce divisibility of the rest.
            let d = w.b.at(k, k).clone();
            let bad = (k + 1..m).find_map(|i| {
                (k + 1..n)
                    .find(|&j| !w.b.at(i, j).is_multiple_of(&d))
                    .map(|_| i)
            });
            match bad {
                Some(i) => {
                    w.row_addmul(k, i, &BigInt::one());
                }
                None => break,
            }
        }
    }
    finish(w)
}

fn finish(w: SnfWork) -> SnfResult {
    let res = SnfResult {
        u: w.u,
        s: w.b,
        v: w.v,
        v_inv: w.v_inv,
    };
    debug_assert!(res.s.is_diagonal());
    res
}

/// Invariants of `Z^ambient / (row span)`: free rank plus the invariant
/// factors of the torsion subgroup, each greater than one, in a
/// divisibility chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CokernelInvariants {
    pub free_rank: usize,
    pub torsion_factors: Vec<BigInt>,
}

impl fmt::Display for CokernelInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t: Vec<String> = self.torsion_factors.iter().map(|d| d.to_string()).collect();
        write!(f, "free {}, torsion [{}]", self.free_rank, t.join(","))
    }
}

pub fn relation_matrix(rows: &[Vec<BigInt>], ambient: usize) -> Result<IntMatrix, LinalgError> {
    for (i, r) in rows.iter().enumerate() {
        if r.len() != ambient {
            return Err(LinalgError::RowLength {
                row: i,
                found: r.len(),
                expected: ambient,
            });
        }
    }
    Ok(IntMatrix {
        rows: rows.len(),
        cols: ambient,
        data: rows.iter().flatten().cloned().collect(),
    })
}

/// Free rank and torsion of the quotient of `Z^ambient` by the span of the
/// given rows.
pub fn cokernel_invariants(
    rows: &[Vec<BigInt>],
    ambient: usize,
) -> Result<CokernelInvariants, LinalgError> {
    let m = relation_matrix(rows, ambient)?;
    let snf = smith_normal_form(&m);
    Ok(CokernelInvariants {
        free_rank: ambient - snf.rank(),
        torsion_factors: snf.torsion_factors(),
    })
}

/// Smallest `n ≥ 1` with `n·v` in the integer span of the rows, or `None`
/// for a non-torsion class. One-shot wrapper; reuse an `SnfResult` when
/// asking many times about the same lattice.
pub fn class_order(
    rows: &[Vec<BigInt>],
    v: &[BigInt],
) -> Result<Option<BigInt>, LinalgError> {
    let m = relation_matrix(rows, v.len())?;
    Ok(smith_normal_form(&m).class_order(v))
}

/// Some integer solution of `A·x = b`, or `None`.
pub fn solve_z(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(b.len(), a.rows(), "rhs length must match row count");
    let snf = smith_normal_form(a);
    let c = snf.u.mul_col_vec(b);
    let diag = snf.diagonal();
    let mut y = vec![BigInt::zero(); a.cols()];
    for (i, ci) in c.iter().enumerate() {
        match diag.get(i) {
            Some(d) if !d.is_zero() => {
                let (q, r) = ci.div_rem(d);
                if !r.is_zero() {
                    return None;
                }
                y[i] = q;
            }
            _ => {
                if !ci.is_zero() {
                    return None;
                }
            }
        }
    }
    Some(snf.v.mul_col_vec(&y))
}

/// Some rational solution of `A·x = b` together with a basis of the rational
/// null space of `A`, or `None` when the system is inconsistent.
pub fn solve_q_with_nullspace(
    a: &IntMatrix,
    b: &[BigInt],
) -> Option<(Vec<BigRational>, Vec<Vec<BigRational>>)> {
    assert_eq!(b.len(), a.rows(), "rhs length must match row count");
    let (m, n) = (a.rows(), a.cols());
    let mut aug: Vec<Vec<BigRational>> = (0..m)
        .map(|r| {
            let mut row: Vec<BigRational> = a
                .row(r)
                .iter()
                .map(|e| BigRational::from_integer(e.clone()))
                .collect();
            row.push(BigRational::from_integer(b[r].clone()));
            row
        })
        .collect();
    // Reduced row echelon form of the augmented matrix.
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut rank = 0usize;
    for c in 0..n {
        let Some(p) = (rank..m).find(|&r| !aug[r][c].is_zero()) else {
            continue;
        };
        aug.swap(rank, p);
        let inv = aug[rank][c].recip();
        for j in c..=n {
            let scaled = &aug[rank][j] * &inv;
            aug[rank][j] = scaled;
        }
        for r in 0..m {
            if r != rank && !aug[r][c].is_zero() {
                let f = aug[r][c].clone();
                for j in c..=n {
                    let t = &aug[rank][j] * &f;
                    let updated = &aug[r][j] - t;
                    aug[r][j] = updated;
                }
            }
        }
        pivot_cols.push(c);
        rank += 1;
        if rank == m {
            break;
        }
    }
    if aug.iter().skip(rank).any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); n];
    for (r, &c) in pivot_cols.iter().enumerate() {
        x[c] = aug[r][n].clone();
    }
    let mut nullspace = Vec::new();
    for free in 0..n {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut k = vec![BigRational::zero(); n];
        k[free] = BigRational::one();
        for (r, &c) in pivot_cols.iter().enumerate() {
            k[c] = -aug[r][free].clone();
        }
        nullspace.push(k);
    }
    Some((x, nullspace))
}

/// Some rational solution of `A·x = b`, or `None`.
pub fn solve_q(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigRational>> {
    solve_q_with_nullspace(a, b).map(|(x, _)| x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn mat(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&e| bi(e)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn check_snf(a: &IntMatrix, snf: &SnfResult) {
        assert_eq!(snf.u.mul(a).mul(&snf.v), snf.s);
        assert_eq!(snf.u.determinant().abs(), bi(1));
        assert_eq!(snf.v.determinant().abs(), bi(1));
        assert_eq!(
            snf.v.mul(&snf.v_inv),
            IntMatrix::identity(a.cols())
        );
        let diag = snf.diagonal();
        for i in 1..diag.len() {
            if !diag[i - 1].is_zero() {
                assert!(diag[i].is_multiple_of(&diag[i - 1]), "chain broken: {diag:?}");
            } else {
                assert!(diag[i].is_zero());
            }
        }
        assert!(diag.iter().all(|d| !d.is_negative()));
    }

    #[test]
    fn snf_zero_matrix() {
        let a = IntMatrix::zeros(2, 3);
        let snf = smith_normal_form(&a);
        assert_eq!(snf.s, IntMatrix::zeros(2, 3));
        assert_eq!(snf.u, IntMatrix::identity(2));
        assert_eq!(snf.v, IntMatrix::identity(3));
        check_snf(&a, &snf);
    }

    #[test]
    fn snf_diag_2_3_merges_to_1_6() {
        let a = mat(&[&[2, 0], &[0, 3]]);
        let snf = smith_normal_form(&a);
        assert_eq!(snf.diagonal(), vec![bi(1), bi(6)]);
        check_snf(&a, &snf);
    }

    #[test]
    fn snf_2x2_example() {
        // d1 = gcd of entries = 2, d1·d2 = |det| = 8.
        let a = mat(&[&[2, 4], &[6, 8]]);
        let snf = smith_normal_form(&a);
        assert_eq!(snf.diagonal(), vec![bi(2), bi(4)]);
        check_snf(&a, &snf);
    }

    #[test]
    fn snf_is_deterministic() {
        let a = mat(&[&[3, 1, -4], &[2, -3, 1], &[0, 5, 2]]);
        let s1 = smith_normal_form(&a);
        let s2 = smith_normal_form(&a);
        assert_eq!(s1.u, s2.u);
        assert_eq!(s1.s, s2.s);
        assert_eq!(s1.v, s2.v);
        check_snf(&a, &s1);
    }

    #[test]
    fn cokernel_examples() {
        let rows = vec![vec![bi(2), bi(0)], vec![bi(0), bi(3)]];
        let inv = cokernel_invariants(&rows, 2).unwrap();
        assert_eq!(inv.free_rank, 0);
        assert_eq!(inv.torsion_factors, vec![bi(6)]);

        let inv = cokernel_invariants(&[], 3).unwrap();
        assert_eq!(inv.free_rank, 3);
        assert!(inv.torsion_factors.is_empty());

        let inv = cokernel_invariants(&[vec![bi(2), bi(2)]], 2).unwrap();
        assert_eq!(inv.free_rank, 1);
        assert_eq!(inv.torsion_factors, vec![bi(2)]);
    }

    #[test]
    fn cokernel_rejects_bad_row_length() {
        let err = cokernel_invariants(&[vec![bi(1)]], 2).unwrap_err();
        assert!(matches!(err, LinalgError::RowLength { .. }));
    }

    #[test]
    fn class_order_examples() {
        let rows = vec![vec![bi(2), bi(0)]];
        assert_eq!(class_order(&rows, &[bi(2), bi(0)]).unwrap(), Some(bi(1)));
        assert_eq!(class_order(&rows, &[bi(1), bi(0)]).unwrap(), Some(bi(2)));
        assert_eq!(class_order(&rows, &[bi(0), bi(1)]).unwrap(), None);
    }

    #[test]
    fn solve_z_examples() {
        let a = IntMatrix::identity(3);
        let b = vec![bi(4), bi(-7), bi(0)];
        assert_eq!(solve_z(&a, &b), Some(b.clone()));

        let a = mat(&[&[2]]);
        assert_eq!(solve_z(&a, &[bi(1)]), None);
        let q = solve_q(&a, &[bi(1)]).unwrap();
        assert_eq!(q[0], BigRational::new(bi(1), bi(2)));
    }

    #[test]
    fn solve_q_inconsistent() {
        let a = mat(&[&[1, 1], &[1, 1]]);
        assert!(solve_q(&a, &[bi(0), bi(1)]).is_none());
    }

    #[test]
    fn torsion_basis_orders() {
        // Z^2 / <(2,0),(0,3)> has torsion Z_6 after normalization.
        let a = mat(&[&[2, 0], &[0, 3]]);
        let snf = smith_normal_form(&a);
        let basis = snf.torsion_basis();
        assert_eq!(basis.len(), 1);
        assert_eq!(snf.class_order(&basis[0]), Some(bi(6)));
    }

    #[test]
    fn determinant_bareiss() {
        assert_eq!(mat(&[&[1, 2], &[3, 4]]).determinant(), bi(-2));
        assert_eq!(
            mat(&[&[2, 0, 1], &[1, 1, 0], &[0, 3, 1]]).determinant(),
            bi(5)
        );
        assert_eq!(IntMatrix::identity(0).determinant(), bi(1));
        assert_eq!(mat(&[&[0, 1], &[0, 2]]).determinant(), bi(0));
    }
}
