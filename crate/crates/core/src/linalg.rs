//! Exact integer matrices: Hermite and Smith normal forms, integer kernels,
//! saturation, and a few modular helpers used throughout the crate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, BigInt::from(x));
            }
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix");
            data.extend(row);
        }
        IntMat { rows: r, cols, data }
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, e.clone());
        }
        m
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

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = IntMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        *out.get_mut(i, j) += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut s = BigInt::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        s += a * b;
                    }
                }
                s
            })
            .collect()
    }

    pub fn add(&self, other: &IntMat) -> IntMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        IntMat { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &IntMat) -> IntMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        IntMat { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: &BigInt) -> IntMat {
        IntMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    /// Reduce every entry into `[0, m)`.
    pub fn reduce_mod(&self, m: &BigInt) -> IntMat {
        IntMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.mod_floor(m)).collect() }
    }

    /// Block copy of rows `r0..r1` and columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> IntMat {
        let mut out = IntMat::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                out.set(i - r0, j - c0, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn select_columns(&self, cols: &[usize]) -> IntMat {
        let mut out = IntMat::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (jj, &j) in cols.iter().enumerate() {
                out.set(i, jj, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn hstack(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.rows, other.rows);
        let mut out = IntMat::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    pub fn vstack(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMat { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn paste(&mut self, r0: usize, c0: usize, block: &IntMat) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j).clone());
            }
        }
    }

    pub fn max_abs_row_sum(&self) -> BigInt {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.abs()).fold(BigInt::zero(), |a, b| a + b))
            .max()
            .unwrap_or_else(BigInt::zero)
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

    /// row[dst] += c * row[src]
    fn add_row(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = self.get(src, j);
            if !s.is_zero() {
                let v = s * c;
                *self.get_mut(dst, j) += v;
            }
        }
    }

    /// col[dst] += c * col[src]
    fn add_col(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let s = self.get(i, src);
            if !s.is_zero() {
                let v = s * c;
                *self.get_mut(i, dst) += v;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square());
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                let Some(sw) = (k + 1..n).find(|&i| !a.get(i, k).is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(k, sw);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1)
    }

    /// Rank over Q.
    pub fn rank(&self) -> usize {
        let (h, _) = hermite_rows(self, false);
        (0..h.rows).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).count()
    }
}

/// Row-style Hermite normal form: returns `(H, U)` with `U * A = H`, `U` unimodular,
/// `H` in row echelon form with positive pivots and entries above each pivot
/// reduced into `[0, pivot)`. When `track` is false `U` is left empty.
pub fn hermite_rows(a: &IntMat, track: bool) -> (IntMat, IntMat) {
    let mut h = a.clone();
    let mut u = if track { IntMat::identity(a.rows) } else { IntMat::zeros(0, 0) };
    let mut row = 0;
    for col in 0..h.cols {
        if row == h.rows {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in row..h.rows {
                if !h.get(i, col).is_zero() && best.is_none_or(|b| h.get(i, col).abs() < h.get(b, col).abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            h.swap_rows(row, b);
            if track {
                u.swap_rows(row, b);
            }
            let mut done = true;
            for i in row + 1..h.rows {
                if h.get(i, col).is_zero() {
                    continue;
                }
                let q = h.get(i, col).div_floor(h.get(row, col));
                let nq = -q;
                h.add_row(i, row, &nq);
                if track {
                    u.add_row(i, row, &nq);
                }
                if !h.get(i, col).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if row < h.rows && !h.get(row, col).is_zero() {
            if h.get(row, col).is_negative() {
                h.negate_row(row);
                if track {
                    u.negate_row(row);
                }
            }
            for i in 0..row {
                let q = h.get(i, col).div_floor(h.get(row, col));
                if !q.is_zero() {
                    let nq = -q;
                    h.add_row(i, row, &nq);
                    if track {
                        u.add_row(i, row, &nq);
                    }
                }
            }
            row += 1;
        }
    }
    (h, u)
}

/// Canonical basis (HNF rows) of the lattice spanned by the rows of `a`.
pub fn row_lattice_basis(a: &IntMat) -> IntMat {
    let (h, _) = hermite_rows(a, false);
    let r = (0..h.rows).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).count();
    h.submatrix(0, r, 0, h.cols)
}

/// Basis (as rows, in HNF) of the integer right kernel `{x : A x = 0}`.
/// The returned lattice is saturated.
pub fn integer_kernel(a: &IntMat) -> IntMat {
    let at = a.transpose();
    let (h, u) = hermite_rows(&at, true);
    let r = (0..h.rows).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).count();
    let k = u.submatrix(r, u.rows, 0, u.cols);
    if k.rows == 0 {
        return k;
    }
    row_lattice_basis(&k)
}

/// Smith normal form `A = U D W` with unimodular `U`, `W`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntMat,
    pub d: IntMat,
    pub w: IntMat,
}

impl Smith {
    /// Non-zero diagonal entries (the elementary divisors), in divisibility order.
    pub fn invariants(&self) -> Vec<BigInt> {
        let n = self.d.rows.min(self.d.cols);
        (0..n).map(|i| self.d.get(i, i).clone()).filter(|x| !x.is_zero()).collect()
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.d.rows.min(self.d.cols);
        (0..n).map(|i| self.d.get(i, i).clone()).collect()
    }
}

/// Smith normal form with transforms.
pub fn smith_normal_form(a: &IntMat) -> Smith {
    smith_impl(a, true)
}

/// Elementary divisors only (the diagonal of the Smith form, zeros included).
pub fn smith_diagonal(a: &IntMat) -> Vec<BigInt> {
    smith_impl(a, false).diagonal()
}

fn smith_impl(a: &IntMat, track: bool) -> Smith {
    let m = a.rows;
    let n = a.cols;
    let mut d = a.clone();
    // Invariant when tracking: a = u * d * w.
    let mut u = if track { IntMat::identity(m) } else { IntMat::zeros(0, 0) };
    let mut w = if track { IntMat::identity(n) } else { IntMat::zeros(0, 0) };

    // Row op on d (d <- E d) requires u <- u E^{-1}; column op d <- d F requires w <- F^{-1} w.
    let row_add = |d: &mut IntMat, u: &mut IntMat, dst: usize, src: usize, c: &BigInt| {
        d.add_row(dst, src, c);
        if track {
            // E = I + c e_{dst,src}; E^{-1} = I - c e_{dst,src}; u E^{-1}: col[src] -= c col[dst]
            u.add_col(src, dst, &(-c));
        }
    };
    let col_add = |d: &mut IntMat, w: &mut IntMat, dst: usize, src: usize, c: &BigInt| {
        d.add_col(dst, src, c);
        if track {
            // F = I + c e_{src,dst}; F^{-1} w: row[src] -= c row[dst]
            w.add_row(src, dst, &(-c));
        }
    };

    let mut t = 0;
    while t < m.min(n) {
        // pivot: smallest nonzero |entry| in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                let x = d.get(i, j);
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < d.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap_rows(t, pi);
        if track {
            u.swap_cols(t, pi);
        }
        d.swap_cols(t, pj);
        if track {
            w.swap_rows(t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..m {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let q = d.get(i, t).div_floor(d.get(t, t));
                row_add(&mut d, &mut u, i, t, &(-q));
                if !d.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let q = d.get(t, j).div_floor(d.get(t, t));
                col_add(&mut d, &mut w, j, t, &(-q));
                if !d.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if clean {
                // divisibility of the remaining block by the pivot
                let mut bad: Option<usize> = None;
                'outer: for i in t + 1..m {
                    for j in t + 1..n {
                        if !d.get(i, j).is_multiple_of(d.get(t, t)) {
                            bad = Some(i);
                            break 'outer;
                        }
                    }
                }
                match bad {
                    None => break,
                    Some(i) => {
                        row_add(&mut d, &mut u, t, i, &BigInt::one());
                        continue;
                    }
                }
            }
            // move the smallest nonzero entry of row t / column t into the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                let x = d.get(i, t);
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < d.get(bi, bj).abs()) {
                    best = Some((i, t));
                }
            }
            for j in t..n {
                let x = d.get(t, j);
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < d.get(bi, bj).abs()) {
                    best = Some((t, j));
                }
            }
            let (bi, bj) = best.expect("pivot row/column cannot vanish");
            if bi != t {
                d.swap_rows(t, bi);
                if track {
                    u.swap_cols(t, bi);
                }
            }
            if bj != t {
                d.swap_cols(t, bj);
                if track {
                    w.swap_rows(t, bj);
                }
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            if track {
                u.negate_col(t);
            }
        }
        t += 1;
    }
    Smith { u, d, w }
}

/// Saturation of the column span of `b`: a basis (as columns) of
/// `{x : m x ∈ span(b) for some m ≠ 0}`, read off the Smith form `b = U D W`.
pub fn saturate_columns(b: &IntMat) -> IntMat {
    if b.cols == 0 {
        return IntMat::zeros(b.rows, 0);
    }
    let s = smith_normal_form(b);
    let r = s.invariants().len();
    let sat = s.u.submatrix(0, b.rows, 0, r);
    // canonical basis: HNF of the transposed basis
    row_lattice_basis(&sat.transpose()).transpose()
}

/// Exact inverse of a unimodular matrix.
pub fn unimodular_inverse(a: &IntMat) -> IntMat {
    assert!(a.is_square());
    let n = a.rows;
    let (h, u) = hermite_rows(a, true);
    assert_eq!(h, IntMat::identity(n), "matrix is not unimodular");
    u
}

/// Solve `A x = b` over Q for square non-singular `A`.
pub fn solve_rational(a: &IntMat, b: &[BigInt]) -> Option<Vec<BigRational>> {
    let n = a.rows;
    assert!(a.is_square() && b.len() == n);
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = a.row(i).iter().map(|x| BigRational::from_integer(x.clone())).collect();
            row.push(BigRational::from_integer(b[i].clone()));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let inv = m[c][c].recip();
        for x in m[c].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..=n {
                    let v = &m[c][j] * &f;
                    m[i][j] -= v;
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n].clone()).collect())
}

/// p-adic valuation; `None` for zero.
pub fn vp(x: &BigInt, p: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut y = x.abs();
    loop {
        let (q, r) = y.div_rem(&pb);
        if !r.is_zero() {
            return Some(v);
        }
        y = q;
        v += 1;
    }
}

/// p-adic valuation of a rational; `None` for zero.
pub fn vp_rational(x: &BigRational, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    Some(vp(x.numer(), p).unwrap() as i64 - vp(x.denom(), p).unwrap() as i64)
}

pub fn pow_big(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// Generalised binomial coefficient `z choose k` for integer `z` (falling factorial / k!).
pub fn binomial(z: &BigInt, k: u64) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= z - BigInt::from(i);
        den *= BigInt::from(i + 1);
    }
    let (q, r) = num.div_rem(&den);
    debug_assert!(r.is_zero());
    q
}

pub fn binomial_i64(z: i64, k: u64) -> BigInt {
    binomial(&BigInt::from(z), k)
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, i| a * BigInt::from(i))
}

/// Modular inverse of `a` modulo `m` (requires gcd 1).
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if !g.gcd.is_one() {
        return None;
    }
    Some(g.x.mod_floor(m))
}

/// Reduce a p-integral rational into `[0, m)` where `m` is a power of p.
pub fn rational_mod(x: &BigRational, m: &BigInt) -> Option<BigInt> {
    let inv = mod_inverse(&x.denom().mod_floor(m), m)?;
    Some((x.numer() * inv).mod_floor(m))
}

pub fn to_i64(x: &BigInt) -> i64 {
    x.to_i64().expect("integer out of i64 range")
}

/// `⌈p r / (p − 1)⌉`, computed exactly.
pub fn congruence_exponent(p: u64, r: u32) -> u32 {
    let num = p * r as u64;
    let den = p - 1;
    num.div_ceil(den) as u32
}

/// Dense rational matrix, row-major.
pub type RatMat = Vec<Vec<BigRational>>;

pub fn rat_zeros(rows: usize, cols: usize) -> RatMat {
    vec![vec![BigRational::zero(); cols]; rows]
}

pub fn rat_identity(n: usize) -> RatMat {
    let mut m = rat_zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigRational::one();
    }
    m
}

pub fn rat_from_int(a: &IntMat) -> RatMat {
    (0..a.rows).map(|i| a.row(i).iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect()
}

pub fn rat_mul(a: &RatMat, b: &RatMat) -> RatMat {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    let mut c = rat_zeros(a.len(), cols);
    for (i, row) in a.iter().enumerate() {
        for k in 0..inner {
            if row[k].is_zero() {
                continue;
            }
            for j in 0..cols {
                if !b[k][j].is_zero() {
                    c[i][j] += &row[k] * &b[k][j];
                }
            }
        }
    }
    c
}

pub fn rat_det(a: &RatMat) -> BigRational {
    let n = a.len();
    let mut m = a.clone();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else { return BigRational::zero() };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= &m[c][c];
        let inv = m[c][c].recip();
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] * &inv;
            for j in c..n {
                let v = &m[c][j] * &f;
                m[i][j] -= v;
            }
        }
    }
    det
}

/// Entries as integers, if they all are.
pub fn rat_to_int(a: &RatMat) -> Option<IntMat> {
    let cols = a.first().map_or(0, |r| r.len());
    let mut out = IntMat::zeros(a.len(), cols);
    for (i, row) in a.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if !x.is_integer() {
                return None;
            }
            out.set(i, j, x.to_integer());
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[Vec<i64>]) -> IntMat {
        IntMat::from_i64(rows)
    }

    #[test]
    fn smith_of_diag_2_3() {
        let s = smith_normal_form(&m(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
        assert_eq!(s.u.mul(&s.d).mul(&s.w), m(&[vec![2, 0], vec![0, 3]]));
    }

    #[test]
    fn smith_of_zero_and_unimodular() {
        let z = IntMat::zeros(2, 3);
        assert!(smith_normal_form(&z).d.is_zero());
        let u = m(&[vec![2, 1], vec![1, 1]]);
        assert_eq!(smith_normal_form(&u).diagonal(), vec![BigInt::from(1); 2]);
    }

    #[test]
    fn kernel_and_saturation() {
        let a = m(&[vec![1, 2, 3], vec![2, 4, 6]]);
        let k = integer_kernel(&a);
        assert_eq!(k.rows(), 2);
        assert!(a.mul(&k.transpose()).is_zero());
        // span of (2,4) saturates to span of (1,2)
        let b = m(&[vec![2], vec![4]]);
        let s = saturate_columns(&b);
        assert_eq!(s, m(&[vec![1], vec![2]]));
    }

    #[test]
    fn binomials_negative_top() {
        assert_eq!(binomial_i64(-3, 2), BigInt::from(6));
        assert_eq!(binomial_i64(5, 2), BigInt::from(10));
        assert_eq!(binomial_i64(2, 5), BigInt::from(0));
        assert_eq!(binomial_i64(7, 0), BigInt::from(1));
    }

    #[test]
    fn congruence_exponents() {
        assert_eq!(congruence_exponent(5, 2), 3);
        assert_eq!(congruence_exponent(2, 1), 2);
        assert_eq!(congruence_exponent(5, 3), 4);
        assert_eq!(congruence_exponent(3, 0), 0);
    }

    fn small_matrix(r: usize, c: usize) -> impl Strategy<Value = IntMat> {
        proptest::collection::vec(-6i64..7, r * c).prop_map(move |v| {
            let rows: Vec<Vec<i64>> = v.chunks(c).map(|ch| ch.to_vec()).collect();
            IntMat::from_i64(&rows)
        })
    }

    proptest! {
        #[test]
        fn smith_reconstructs(a in small_matrix(3, 4)) {
            let s = smith_normal_form(&a);
            prop_assert_eq!(s.u.mul(&s.d).mul(&s.w), a.clone());
            prop_assert_eq!(s.u.det().abs(), BigInt::one());
            prop_assert_eq!(s.w.det().abs(), BigInt::one());
            let diag = s.diagonal();
            for i in 1..diag.len() {
                if !diag[i].is_zero() {
                    prop_assert!(diag[i].is_multiple_of(&diag[i - 1]));
                } else if i + 1 < diag.len() {
                    prop_assert!(diag[i + 1].is_zero());
                }
            }
            for i in 0..s.d.rows() {
                for j in 0..s.d.cols() {
                    if i != j { prop_assert!(s.d.get(i, j).is_zero()); }
                }
            }
        }

        #[test]
        fn hermite_is_row_equivalent(a in small_matrix(4, 3)) {
            let (h, u) = hermite_rows(&a, true);
            prop_assert_eq!(u.mul(&a), h.clone());
            prop_assert_eq!(u.det().abs(), BigInt::one());
        }

        #[test]
        fn determinant_matches_smith(a in small_matrix(3, 3)) {
            let prod: BigInt = smith_diagonal(&a).iter().fold(BigInt::one(), |x, y| x * y);
            prop_assert_eq!(a.det().abs(), prod);
        }
    }
}
