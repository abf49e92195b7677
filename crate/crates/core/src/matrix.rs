//! Dense integer matrices with exact arithmetic and Smith normal form.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, BigInt::one())
    }

    pub fn scalar(n: usize, c: BigInt) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c.clone();
        }
        m
    }

    pub fn diagonal<I: IntoIterator<Item = BigInt>>(entries: I) -> Self {
        let entries: Vec<BigInt> = entries.into_iter().collect();
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, d) in entries.into_iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Panics on ragged input.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix");
            data.extend(row.iter().cloned().map(Into::into));
        }
        Matrix { rows: rows.len(), cols, data }
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

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        self.data.chunks(self.cols.max(1)).take(self.rows).map(<[BigInt]>::to_vec).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, c: &BigInt) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    pub fn diagonal_entries(&self) -> Vec<BigInt> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).collect()
    }

    pub fn block_diag(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out[(self.rows + i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        out
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !m[(i, k)].is_zero()) {
                    Some(i) => {
                        m.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)]) / &prev;
                    m[(i, j)] = v;
                }
            }
            prev = m[(k, k)].clone();
        }
        sign * m[(n - 1, n - 1)].clone()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row_dst += k * row_src
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for j in 0..self.cols {
            let v = &self[(src, j)] * k;
            self[(dst, j)] += v;
        }
    }

    /// col_dst += k * col_src
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for i in 0..self.rows {
            let v = &self[(i, src)] * k;
            self[(i, dst)] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -&self[(r, j)];
            self[(r, j)] = v;
        }
    }

    fn negate_col(&mut self, c: usize) {
        for i in 0..self.rows {
            let v = -&self[(i, c)];
            self[(i, c)] = v;
        }
    }

    /// Entries as `i64` where they fit.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        self.to_rows().iter().map(|r| r.iter().map(ToPrimitive::to_i64).collect()).collect()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .to_rows()
            .iter()
            .map(|r| format!("[{}]", r.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

/// `p * a * q = d` with `p`, `q` unimodular and `d` in Smith normal form.
#[derive(Clone, Debug)]
pub struct Smith {
    pub d: Matrix,
    pub p: Matrix,
    pub p_inv: Matrix,
    pub q: Matrix,
    pub q_inv: Matrix,
}

struct SmithState {
    m: Matrix,
    p: Matrix,
    p_inv: Matrix,
    q: Matrix,
    q_inv: Matrix,
}

impl SmithState {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.m.swap_rows(a, b);
        self.p.swap_rows(a, b);
        self.p_inv.swap_cols(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.m.swap_cols(a, b);
        self.q.swap_cols(a, b);
        self.q_inv.swap_rows(a, b);
    }

    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.m.add_row(dst, src, k);
        self.p.add_row(dst, src, k);
        self.p_inv.add_col(src, dst, &-k);
    }

    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.m.add_col(dst, src, k);
        self.q.add_col(dst, src, k);
        self.q_inv.add_row(src, dst, &-k);
    }

    fn negate_row(&mut self, r: usize) {
        self.m.negate_row(r);
        self.p.negate_row(r);
        self.p_inv.negate_col(r);
    }

    /// Moves a non-zero entry of least absolute value in the trailing block
    /// to `(t, t)`. Returns false if the block is zero.
    fn place_pivot(&mut self, t: usize) -> bool {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.m.rows {
            for j in t..self.m.cols {
                let e = &self.m[(i, j)];
                if !e.is_zero() && best.is_none_or(|(bi, bj)| e.abs() < self.m[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        match best {
            Some((i, j)) => {
                self.swap_rows(t, i);
                self.swap_cols(t, j);
                true
            }
            None => false,
        }
    }
}

/// Smith normal form by gcd elimination with least-magnitude pivots.
pub fn smith_normal_form(a: &Matrix) -> Smith {
    let mut st = SmithState {
        m: a.clone(),
        p: Matrix::identity(a.rows),
        p_inv: Matrix::identity(a.rows),
        q: Matrix::identity(a.cols),
        q_inv: Matrix::identity(a.cols),
    };
    for t in 0..a.rows.min(a.cols) {
        if !st.place_pivot(t) {
            break;
        }
        loop {
            let mut clean = true;
            for i in t + 1..st.m.rows {
                let k = -st.m[(i, t)].div_floor(&st.m[(t, t)]);
                if !k.is_zero() {
                    st.add_row(i, t, &k);
                }
                clean &= st.m[(i, t)].is_zero();
            }
            for j in t + 1..st.m.cols {
                let k = -st.m[(t, j)].div_floor(&st.m[(t, t)]);
                if !k.is_zero() {
                    st.add_col(j, t, &k);
                }
                clean &= st.m[(t, j)].is_zero();
            }
            if !clean {
                st.place_pivot(t);
                continue;
            }
            // the pivot must divide the whole trailing block
            let offender = (t + 1..st.m.rows)
                .find(|&i| (t + 1..st.m.cols).any(|j| !st.m[(i, j)].is_multiple_of(&st.m[(t, t)])));
            match offender {
                Some(i) => st.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if st.m[(t, t)].is_negative() {
            st.negate_row(t);
        }
    }
    Smith { d: st.m, p: st.p, p_inv: st.p_inv, q: st.q, q_inv: st.q_inv }
}
