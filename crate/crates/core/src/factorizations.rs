//! Elementary and finite-rank matrix factorizations.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::divisors::{gcd, Backend, FactoredElement, NormalizedDivisor, Potential, Sign};
use crate::error::{Error, Result};
use crate::matrix::{smith_normal_form, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn plus(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn kappa(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

/// An ordered pair `(u, v)` with `uv = W`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoStepFactorization {
    pub u: FactoredElement,
    pub v: FactoredElement,
}

impl TwoStepFactorization {
    pub fn new(u: FactoredElement, v: FactoredElement, w: &Potential) -> Result<Self> {
        let prod = u.mul(&v);
        let sign_ok = w.backend() == Backend::Abstract || prod.sign() == w.sign();
        if !prod.associates(&w.element()) || !sign_ok {
            return Err(Error::NotAFactorization(format!("{u} * {v} is not {w}")));
        }
        Ok(TwoStepFactorization { u, v })
    }

    /// `sigma(u, v) = (-v, -u)`.
    pub fn opposite_transpose(&self) -> Self {
        TwoStepFactorization { u: self.v.clone().negate(), v: self.u.clone().negate() }
    }

    pub fn support(&self) -> FactoredElement {
        gcd(&self.u, &self.v)
    }
}

/// `e_v = (R^{1|1}, [[0, v], [u, 0]])` with `u = W / v`.
///
/// The divisor is kept normalized; `sign` is the unit of the `v` entry and
/// is only ever negative on the integer backend.
#[derive(Clone, Debug)]
pub struct ElementaryFactorization {
    w: Arc<Potential>,
    v: NormalizedDivisor,
    sign: Sign,
}

impl PartialEq for ElementaryFactorization {
    fn eq(&self, other: &Self) -> bool {
        self.v == other.v && self.sign == other.sign && same_potential(&self.w, &other.w)
    }
}

impl Eq for ElementaryFactorization {}

pub(crate) fn same_potential(a: &Arc<Potential>, b: &Arc<Potential>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl ElementaryFactorization {
    pub fn elementary(v: &FactoredElement, w: Arc<Potential>) -> Result<Self> {
        let nv = w.normalize(v)?;
        let sign = if w.backend() == Backend::Integer { v.sign() } else { Sign::Positive };
        Ok(ElementaryFactorization { w, v: nv, sign })
    }

    pub fn from_divisor(w: Arc<Potential>, v: NormalizedDivisor) -> Self {
        debug_assert_eq!(v.exponents().len(), w.len());
        ElementaryFactorization { w, v, sign: Sign::Positive }
    }

    pub fn potential(&self) -> &Arc<Potential> {
        &self.w
    }

    pub fn v(&self) -> &NormalizedDivisor {
        &self.v
    }

    pub fn u(&self) -> NormalizedDivisor {
        self.v.complement(&self.w)
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// Sign of the `u` entry, forced by `uv = W`.
    pub fn u_sign(&self) -> Sign {
        self.sign.times(self.w.sign())
    }

    pub fn v_element(&self) -> FactoredElement {
        self.v.to_element(&self.w).with_sign(self.sign)
    }

    pub fn u_element(&self) -> FactoredElement {
        self.u().to_element(&self.w).with_sign(self.u_sign())
    }

    pub fn support(&self) -> NormalizedDivisor {
        self.v.gcd(&self.u())
    }

    pub fn support_element(&self) -> FactoredElement {
        self.support().to_element(&self.w)
    }

    /// `Sigma e_v = e_{-u}`.
    pub fn suspension(&self) -> Self {
        let sign = match self.w.backend() {
            Backend::Integer => self.u_sign().negate(),
            Backend::Abstract => Sign::Positive,
        };
        ElementaryFactorization { w: self.w.clone(), v: self.u(), sign }
    }

    pub fn two_step(&self) -> TwoStepFactorization {
        TwoStepFactorization { u: self.u_element(), v: self.v_element() }
    }

    pub fn similar(&self, other: &Self) -> Result<bool> {
        self.check_same_potential(other)?;
        Ok(self.v == other.v)
    }

    pub(crate) fn check_same_potential(&self, other: &Self) -> Result<()> {
        if same_potential(&self.w, &other.w) {
            Ok(())
        } else {
            Err(Error::PotentialMismatch)
        }
    }

    pub fn is_zero_object(&self) -> bool {
        self.support().is_one()
    }

    pub fn to_matrix_factorization(&self) -> Result<MatrixFactorization> {
        if self.w.backend() != Backend::Integer {
            return Err(Error::NotIntegerBackend);
        }
        let w = self.w.to_bigint().ok_or(Error::NotIntegerBackend)?;
        let v = self.v_element().to_bigint().ok_or(Error::NotIntegerBackend)?;
        let u = self.u_element().to_bigint().ok_or(Error::NotIntegerBackend)?;
        MatrixFactorization::new(Matrix::diagonal([v]), Matrix::diagonal([u]), w)
    }

    pub fn render(&self) -> String {
        let body = self.v.render(&self.w);
        if self.sign == Sign::Negative {
            format!("e_{{-{body}}}")
        } else {
            format!("e_{{{body}}}")
        }
    }
}

/// An integer matrix factorization `uv = vu = W I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixFactorization {
    w: BigInt,
    v: Matrix,
    u: Matrix,
}

impl MatrixFactorization {
    /// Validates `uv = vu = W I`.
    pub fn new(v: Matrix, u: Matrix, w: BigInt) -> Result<Self> {
        if w.is_zero() {
            return Err(Error::Zero);
        }
        if !v.is_square() || !u.is_square() || v.rows() != u.rows() || v.rows() == 0 {
            return Err(Error::ShapeMismatch(format!(
                "v is {}x{}, u is {}x{}",
                v.rows(),
                v.cols(),
                u.rows(),
                u.cols()
            )));
        }
        let target = Matrix::scalar(v.rows(), w.clone());
        if u.mul(&v) != target || v.mul(&u) != target {
            return Err(Error::NotAFactorization(format!("uv and vu must both equal {w} * I")));
        }
        Ok(MatrixFactorization { w, v, u })
    }

    pub fn w(&self) -> &BigInt {
        &self.w
    }

    pub fn v(&self) -> &Matrix {
        &self.v
    }

    pub fn u(&self) -> &Matrix {
        &self.u
    }

    /// Reduced rank.
    pub fn rho(&self) -> usize {
        self.v.rows()
    }

    /// The odd differential `[[0, v], [u, 0]]` on `R^{rho|rho}`.
    pub fn differential_matrix(&self) -> Matrix {
        let n = self.rho();
        let mut d = Matrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                d[(i, n + j)] = self.v[(i, j)].clone();
                d[(n + i, j)] = self.u[(i, j)].clone();
            }
        }
        d
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.w != other.w {
            return Err(Error::PotentialMismatch);
        }
        Ok(MatrixFactorization { w: self.w.clone(), v: self.v.block_diag(&other.v), u: self.u.block_diag(&other.u) })
    }

    /// Diagonalizes `v` by unimodular `A`, `B` with `A v B^{-1} = diag(d_1, ..., d_rho)`,
    /// `d_1 | d_2 | ...`, and reads off the elementary summands `e_{d_i}`.
    pub fn smith_decompose(&self) -> Result<SmithDecomposition> {
        let w = Arc::new(Potential::from_integer(&self.w)?);
        let s = smith_normal_form(&self.v);
        let diagonal = s.d.diagonal_entries();
        let mut summands = Vec::with_capacity(diagonal.len());
        for d in &diagonal {
            if d.is_zero() || !self.w.is_multiple_of(d) {
                return Err(Error::NotAFactorization(format!("elementary divisor {d} does not divide {}", self.w)));
            }
            let fe = crate::divisors::factor_integer(d)?;
            summands.push(ElementaryFactorization::elementary(&fe, w.clone())?);
        }
        Ok(SmithDecomposition { diagonal, a: s.p, b: s.q_inv, b_inv: s.q, summands })
    }

    pub fn to_json(&self) -> MatrixFactorizationJson {
        MatrixFactorizationJson { w: big_to_json(&self.w), v: matrix_to_json(&self.v), u: matrix_to_json(&self.u) }
    }

    pub fn from_json(json: &MatrixFactorizationJson) -> Result<Self> {
        let w = json_to_big(&json.w)?;
        let v = json_to_matrix(&json.v)?;
        let u = json_to_matrix(&json.u)?;
        Self::new(v, u, w)
    }
}

#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub diagonal: Vec<BigInt>,
    pub a: Matrix,
    pub b: Matrix,
    pub b_inv: Matrix,
    pub summands: Vec<ElementaryFactorization>,
}

impl SmithDecomposition {
    /// Checks `|det A| = |det B| = 1` and `A v B^{-1} = diag`.
    pub fn verify(&self, mf: &MatrixFactorization) -> bool {
        self.a.det().abs().is_one()
            && self.b.det().abs().is_one()
            && self.b.mul(&self.b_inv) == Matrix::identity(mf.rho())
            && self.a.mul(mf.v()).mul(&self.b_inv) == Matrix::diagonal(self.diagonal.iter().cloned())
    }
}

/// `{"W": 8, "v": [[...]], "u": [[...]]}`. Integers that do not fit in 64
/// bits are written as decimal strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixFactorizationJson {
    #[serde(rename = "W")]
    pub w: serde_json::Value,
    pub v: Vec<Vec<serde_json::Value>>,
    pub u: Vec<Vec<serde_json::Value>>,
}

pub fn big_to_json(n: &BigInt) -> serde_json::Value {
    match i64::try_from(n) {
        Ok(k) => serde_json::Value::from(k),
        Err(_) => serde_json::Value::String(n.to_string()),
    }
}

pub fn json_to_big(v: &serde_json::Value) -> Result<BigInt> {
    match v {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .or_else(|| n.as_u64().map(BigInt::from))
            .ok_or_else(|| Error::Parse(format!("{n} is not an integer"))),
        serde_json::Value::String(s) => s.parse().map_err(|_| Error::Parse(format!("`{s}` is not an integer"))),
        other => Err(Error::Parse(format!("expected an integer, found {other}"))),
    }
}

pub fn matrix_to_json(m: &Matrix) -> Vec<Vec<serde_json::Value>> {
    m.to_rows().iter().map(|r| r.iter().map(big_to_json).collect()).collect()
}

pub fn json_to_matrix(rows: &[Vec<serde_json::Value>]) -> Result<Matrix> {
    let big: Vec<Vec<BigInt>> =
        rows.iter().map(|r| r.iter().map(json_to_big).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
    let cols = big.first().map_or(0, Vec::len);
    if big.iter().any(|r| r.len() != cols) {
        return Err(Error::ShapeMismatch("ragged matrix".into()));
    }
    Ok(Matrix::from_rows(&big))
}

/// A `Z/2`-graded morphism `(R^{rho1|rho1}) -> (R^{rho2|rho2})`.
///
/// Even morphisms are `[[f00, 0], [0, f11]]`; odd ones `[[0, f01], [f10, 0]]`.
/// `first`/`second` hold `(f00, f11)` or `(f01, f10)` respectively.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMorphismMatrix {
    pub parity: Parity,
    pub first: Matrix,
    pub second: Matrix,
}

impl GradedMorphismMatrix {
    pub fn even(f00: Matrix, f11: Matrix) -> Self {
        GradedMorphismMatrix { parity: Parity::Even, first: f00, second: f11 }
    }

    pub fn odd(f01: Matrix, f10: Matrix) -> Self {
        GradedMorphismMatrix { parity: Parity::Odd, first: f01, second: f10 }
    }

    pub fn identity(rho: usize) -> Self {
        Self::even(Matrix::identity(rho), Matrix::identity(rho))
    }

    pub fn zero(parity: Parity, rho1: usize, rho2: usize) -> Self {
        GradedMorphismMatrix { parity, first: Matrix::zeros(rho2, rho1), second: Matrix::zeros(rho2, rho1) }
    }

    pub fn source_rank(&self) -> usize {
        self.first.cols()
    }

    pub fn target_rank(&self) -> usize {
        self.first.rows()
    }

    pub fn to_full(&self) -> Matrix {
        let (r2, r1) = (self.target_rank(), self.source_rank());
        let mut m = Matrix::zeros(2 * r2, 2 * r1);
        for i in 0..r2 {
            for j in 0..r1 {
                match self.parity {
                    Parity::Even => {
                        m[(i, j)] = self.first[(i, j)].clone();
                        m[(r2 + i, r1 + j)] = self.second[(i, j)].clone();
                    }
                    Parity::Odd => {
                        m[(i, r1 + j)] = self.first[(i, j)].clone();
                        m[(r2 + i, j)] = self.second[(i, j)].clone();
                    }
                }
            }
        }
        m
    }

    /// Splits a full block matrix; fails if the off-parity blocks are non-zero.
    pub fn from_full(parity: Parity, m: &Matrix, rho1: usize, rho2: usize) -> Result<Self> {
        if m.rows() != 2 * rho2 || m.cols() != 2 * rho1 {
            return Err(Error::ShapeMismatch(format!("{}x{} block matrix", m.rows(), m.cols())));
        }
        let block = |r0: usize, c0: usize| {
            let mut b = Matrix::zeros(rho2, rho1);
            for i in 0..rho2 {
                for j in 0..rho1 {
                    b[(i, j)] = m[(r0 + i, c0 + j)].clone();
                }
            }
            b
        };
        let (diag0, diag1, off0, off1) = (block(0, 0), block(rho2, rho1), block(0, rho1), block(rho2, 0));
        let (keep, drop) = match parity {
            Parity::Even => ((diag0, diag1), (off0, off1)),
            Parity::Odd => ((off0, off1), (diag0, diag1)),
        };
        if !drop.0.is_zero() || !drop.1.is_zero() {
            return Err(Error::ShapeMismatch("matrix is not homogeneous of the stated parity".into()));
        }
        Ok(GradedMorphismMatrix { parity, first: keep.0, second: keep.1 })
    }

    pub fn is_zero(&self) -> bool {
        self.first.is_zero() && self.second.is_zero()
    }

    /// `self ∘ f`.
    pub fn compose(&self, f: &GradedMorphismMatrix) -> Result<GradedMorphismMatrix> {
        if self.source_rank() != f.target_rank() {
            return Err(Error::CompositionMismatch);
        }
        let full = self.to_full().mul(&f.to_full());
        Self::from_full(self.parity.plus(f.parity), &full, f.source_rank(), self.target_rank())
    }

    pub fn add(&self, other: &GradedMorphismMatrix) -> Result<GradedMorphismMatrix> {
        if self.parity != other.parity
            || self.source_rank() != other.source_rank()
            || self.target_rank() != other.target_rank()
        {
            return Err(Error::ShapeMismatch("summands of different type".into()));
        }
        Ok(GradedMorphismMatrix {
            parity: self.parity,
            first: self.first.add(&other.first),
            second: self.second.add(&other.second),
        })
    }

    pub fn scale(&self, c: &BigInt) -> GradedMorphismMatrix {
        GradedMorphismMatrix { parity: self.parity, first: self.first.scale(c), second: self.second.scale(c) }
    }
}

/// `d(f) = D2 f - (-1)^kappa f D1`.
pub fn differential(
    f: &GradedMorphismMatrix,
    a1: &MatrixFactorization,
    a2: &MatrixFactorization,
) -> Result<GradedMorphismMatrix> {
    if f.source_rank() != a1.rho() || f.target_rank() != a2.rho() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} morphism between ranks {} and {}",
            f.target_rank(),
            f.source_rank(),
            a1.rho(),
            a2.rho()
        )));
    }
    let full = f.to_full();
    let left = a2.differential_matrix().mul(&full);
    let right = full.mul(&a1.differential_matrix());
    let d = match f.parity {
        Parity::Even => left.sub(&right),
        Parity::Odd => left.add(&right),
    };
    GradedMorphismMatrix::from_full(f.parity.plus(Parity::Odd), &d, a1.rho(), a2.rho())
}
