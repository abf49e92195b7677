//! Morphism modules between elementary factorizations.
//!
//! For `e_{v1}, e_{v2}` over `W` write `a = (v1, v2)`, `b = v1/a`, `c = v2/a`,
//! `d = W/(abc)`, `s = (a, d)`, `a' = a/s`, `d' = d/s`. The even and odd
//! cocycle modules are free of rank one, generated by `eps0 = diag(c, b)` and
//! `eps1 = [[0, a'], [-d', 0]]`, and both homotopy modules are `R/<s>`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::json;

use crate::divisors::{Backend, FactoredElement, NormalizedDivisor, Potential, Sign};
use crate::error::{Error, Result};
use crate::factorizations::{differential, ElementaryFactorization, GradedMorphismMatrix, Parity};
use crate::matrix::Matrix;

/// The seven-part gcd decomposition of a divisor pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GcdDecomposition {
    pub a: NormalizedDivisor,
    pub b: NormalizedDivisor,
    pub c: NormalizedDivisor,
    pub d: NormalizedDivisor,
    pub s: NormalizedDivisor,
    pub a_prime: NormalizedDivisor,
    pub d_prime: NormalizedDivisor,
}

impl GcdDecomposition {
    pub fn new(w: &Potential, v1: &NormalizedDivisor, v2: &NormalizedDivisor) -> Result<Self> {
        let n = w.orders();
        for v in [v1, v2] {
            if v.exponents().len() != n.len() || v.exponents().iter().zip(n).any(|(k, m)| k > m) {
                return Err(Error::NotADivisor(format!("{:?}", v.exponents())));
            }
        }
        let mut parts: [Vec<u64>; 7] = Default::default();
        for i in 0..n.len() {
            let (x, y) = (v1.exponent(i), v2.exponent(i));
            let a = x.min(y);
            let (b, c) = (x - a, y - a);
            let d = n[i] - a - b - c;
            let s = a.min(d);
            for (slot, val) in parts.iter_mut().zip([a, b, c, d, s, a - s, d - s]) {
                slot.push(val);
            }
        }
        let [a, b, c, d, s, a_prime, d_prime] = parts.map(NormalizedDivisor::raw);
        Ok(GcdDecomposition { a, b, c, d, s, a_prime, d_prime })
    }

    pub fn from_pair(e1: &ElementaryFactorization, e2: &ElementaryFactorization) -> Result<Self> {
        e1.check_same_potential(e2)?;
        Self::new(e1.potential(), e1.v(), e2.v())
    }
}

/// `alpha_W(v1, v2) = (v1, u1, v2, u2)`, computed as a fourfold gcd.
pub fn alpha(w: &Potential, v1: &NormalizedDivisor, v2: &NormalizedDivisor) -> NormalizedDivisor {
    v1.gcd(&v1.complement(w)).gcd(v2).gcd(&v2.complement(w))
}

/// `(u1, v2) / ((u1, v2), v2/(v1, v2))`, an independent route to `alpha`.
pub fn alpha_alt(w: &Potential, v1: &NormalizedDivisor, v2: &NormalizedDivisor) -> NormalizedDivisor {
    let u1v2 = v1.complement(w).gcd(v2);
    let v2_over = v2.quotient(&v1.gcd(v2)).expect("gcd divides");
    u1v2.quotient(&u1v2.gcd(&v2_over)).expect("gcd divides")
}

/// A 2x2 matrix with monomial entries; `None` is zero.
pub type MonomialMatrix = [[Option<FactoredElement>; 2]; 2];

fn monomial_product(g: &MonomialMatrix, f: &MonomialMatrix) -> MonomialMatrix {
    let mut out: MonomialMatrix = Default::default();
    for i in 0..2 {
        for j in 0..2 {
            let terms: Vec<FactoredElement> =
                (0..2).filter_map(|k| Some(g[i][k].as_ref()?.mul(f[k][j].as_ref()?))).collect();
            debug_assert!(terms.len() <= 1, "homogeneous 2x2 products have one term per entry");
            out[i][j] = terms.into_iter().next();
        }
    }
    out
}

/// Parity, generator and annihilator of `Hom^parity(e1, e2)` in the
/// homotopy category.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomModuleDescription {
    pub parity: Parity,
    pub generator: MonomialMatrix,
    pub annihilator: NormalizedDivisor,
    potential: Arc<Potential>,
}

impl HomModuleDescription {
    /// Hom vanishes exactly when the annihilator is a unit.
    pub fn is_zero(&self) -> bool {
        self.annihilator.is_one()
    }

    pub fn annihilator_element(&self) -> FactoredElement {
        self.annihilator.to_element(&self.potential)
    }

    /// `R/<s>`, or `Z/s` on the integer backend.
    pub fn presentation(&self) -> String {
        match self.potential.backend() {
            _ if self.is_zero() => "0".into(),
            Backend::Integer => format!("Z/{}", self.annihilator_element()),
            Backend::Abstract => format!("R/<{}>", self.annihilator_element()),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entry = |e: &Option<FactoredElement>| e.as_ref().map_or_else(|| "0".to_string(), ToString::to_string);
        json!({
            "parity": self.parity,
            "generator": self.generator.iter().map(|r| r.iter().map(entry).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "annihilator": self.annihilator_element().to_string(),
            "module": self.presentation(),
        })
    }

    /// The generator as an integer graded morphism (integer backend).
    pub fn generator_matrix(&self) -> Result<GradedMorphismMatrix> {
        generator_to_matrix(self.parity, &self.generator)
    }
}

fn generator_to_matrix(parity: Parity, g: &MonomialMatrix) -> Result<GradedMorphismMatrix> {
    let val = |e: &Option<FactoredElement>| -> Result<BigInt> {
        e.as_ref().map_or(Ok(BigInt::zero()), |x| x.to_bigint().ok_or(Error::NotIntegerBackend))
    };
    let one = |x: BigInt| Matrix::diagonal([x]);
    Ok(match parity {
        Parity::Even => GradedMorphismMatrix::even(one(val(&g[0][0])?), one(val(&g[1][1])?)),
        Parity::Odd => GradedMorphismMatrix::odd(one(val(&g[0][1])?), one(val(&g[1][0])?)),
    })
}

/// Generator of the cocycle module `Z^parity(e1, e2)`, with the signs of
/// the integer backend folded in.
pub fn generator(e1: &ElementaryFactorization, e2: &ElementaryFactorization, parity: Parity) -> Result<MonomialMatrix> {
    let g = GcdDecomposition::from_pair(e1, e2)?;
    let w = e1.potential();
    let el = |d: &NormalizedDivisor| d.to_element(w);
    let (t1, t2) = (e1.sign(), e2.sign());
    Ok(match parity {
        Parity::Even => [[Some(el(&g.c).with_sign(t2)), None], [None, Some(el(&g.b).with_sign(t1))]],
        Parity::Odd => {
            let lower = Sign::Negative.times(w.sign()).times(t1).times(t2);
            [[None, Some(el(&g.a_prime))], [Some(el(&g.d_prime).with_sign(lower)), None]]
        }
    })
}

pub fn hom_module(
    e1: &ElementaryFactorization,
    e2: &ElementaryFactorization,
    parity: Parity,
) -> Result<HomModuleDescription> {
    let generator = generator(e1, e2, parity)?;
    let annihilator = alpha(e1.potential(), e1.v(), e2.v());
    Ok(HomModuleDescription { parity, generator, annihilator, potential: e1.potential().clone() })
}

/// Unsigned factor `k` in `eps(v2, v3) ∘ eps(v1, v2) = ±k eps(v1, v3)`.
///
/// Even-even: `v2 (v1,v3) / ((v1,v2)(v2,v3))`. The other three cases follow
/// by replacing `v2`, `v3` with their complements through suspension.
pub fn composition_factor(
    w: &Potential,
    g_parity: Parity,
    f_parity: Parity,
    v1: &NormalizedDivisor,
    v2: &NormalizedDivisor,
    v3: &NormalizedDivisor,
) -> Option<NormalizedDivisor> {
    let mid = match f_parity {
        Parity::Even => v2.clone(),
        Parity::Odd => v2.complement(w),
    };
    let end = match f_parity.plus(g_parity) {
        Parity::Even => v3.clone(),
        Parity::Odd => v3.complement(w),
    };
    mid.mul(&v1.gcd(&end)).quotient(&v1.gcd(&mid).mul(&mid.gcd(&end)))
}

/// The coefficient of a morphism class relative to the Hom generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coefficient {
    /// Integer backend: a residue in `[0, s)`.
    Residue(BigInt),
    /// Abstract backend: a monomial multiplier, `None` for the zero class.
    Multiplier(Option<FactoredElement>),
}

/// A homotopy class `coefficient * generator` in `Hom^parity(source, target)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismClass {
    pub source: ElementaryFactorization,
    pub target: ElementaryFactorization,
    pub parity: Parity,
    pub coefficient: Coefficient,
}

impl MorphismClass {
    pub fn generator(source: &ElementaryFactorization, target: &ElementaryFactorization, parity: Parity) -> Result<Self> {
        source.check_same_potential(target)?;
        let coefficient = match source.potential().backend() {
            Backend::Integer => Coefficient::Residue(BigInt::one()),
            Backend::Abstract => Coefficient::Multiplier(Some(FactoredElement::one())),
        };
        Ok(Self { source: source.clone(), target: target.clone(), parity, coefficient }.reduced())
    }

    pub fn identity(e: &ElementaryFactorization) -> Self {
        Self::generator(e, e, Parity::Even).expect("same potential")
    }

    pub fn zero(source: &ElementaryFactorization, target: &ElementaryFactorization, parity: Parity) -> Result<Self> {
        let mut m = Self::generator(source, target, parity)?;
        m.coefficient = match m.coefficient {
            Coefficient::Residue(_) => Coefficient::Residue(BigInt::zero()),
            Coefficient::Multiplier(_) => Coefficient::Multiplier(None),
        };
        Ok(m)
    }

    /// Integer multiple of the generator (integer backend).
    pub fn with_residue(mut self, k: BigInt) -> Result<Self> {
        if !matches!(self.coefficient, Coefficient::Residue(_)) {
            return Err(Error::NotIntegerBackend);
        }
        self.coefficient = Coefficient::Residue(k);
        Ok(self.reduced())
    }

    /// Monomial multiple of the generator.
    pub fn with_multiplier(mut self, m: FactoredElement) -> Result<Self> {
        self.coefficient = match self.coefficient {
            Coefficient::Residue(_) => Coefficient::Residue(m.to_bigint().ok_or(Error::MixedBackend)?),
            Coefficient::Multiplier(_) => Coefficient::Multiplier(Some(m)),
        };
        Ok(self.reduced())
    }

    pub fn annihilator(&self) -> NormalizedDivisor {
        alpha(self.source.potential(), self.source.v(), self.target.v())
    }

    pub fn is_zero(&self) -> bool {
        match &self.coefficient {
            Coefficient::Residue(k) => k.is_zero(),
            Coefficient::Multiplier(m) => m.is_none(),
        }
    }

    fn reduced(mut self) -> Self {
        let w = self.source.potential().clone();
        let s = self.annihilator();
        self.coefficient = match self.coefficient {
            Coefficient::Residue(k) => {
                let modulus = s.to_bigint(&w).expect("integer backend");
                Coefficient::Residue(k.mod_floor(&modulus))
            }
            Coefficient::Multiplier(Some(m)) if s.to_element(&w).divides(&m) => Coefficient::Multiplier(None),
            other => other,
        };
        self
    }

    /// A cocycle representative (integer backend).
    pub fn representative(&self) -> Result<GradedMorphismMatrix> {
        let Coefficient::Residue(k) = &self.coefficient else {
            return Err(Error::NotIntegerBackend);
        };
        Ok(hom_module(&self.source, &self.target, self.parity)?.generator_matrix()?.scale(k))
    }

    /// Sum of two classes in the same Hom module.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.source != other.source || self.target != other.target || self.parity != other.parity {
            return Err(Error::CompositionMismatch);
        }
        let coefficient = match (&self.coefficient, &other.coefficient) {
            (Coefficient::Residue(a), Coefficient::Residue(b)) => Coefficient::Residue(a + b),
            (Coefficient::Multiplier(None), c) | (c, Coefficient::Multiplier(None)) => c.clone(),
            _ => return Err(Error::NonDivisorCoefficient),
        };
        Ok(Self { coefficient, ..self.clone() }.reduced())
    }
}

/// `g ∘ f`, reduced modulo the annihilator of the composite Hom module.
pub fn compose(g: &MorphismClass, f: &MorphismClass) -> Result<MorphismClass> {
    if f.target != g.source {
        return Err(Error::CompositionMismatch);
    }
    let (e1, e2, e3) = (&f.source, &f.target, &g.target);
    let parity = f.parity.plus(g.parity);
    let gen_f = generator(e1, e2, f.parity)?;
    let gen_g = generator(e2, e3, g.parity)?;
    let gen_gf = generator(e1, e3, parity)?;
    let product = monomial_product(&gen_g, &gen_f);
    let factor = monomial_ratio(&product, &gen_gf)?;

    let w = e1.potential();
    debug_assert_eq!(
        Some(w.normalize(&factor.normalized())?),
        composition_factor(w, g.parity, f.parity, e1.v(), e2.v(), e3.v())
    );

    let coefficient = match (&g.coefficient, &f.coefficient) {
        (Coefficient::Residue(kg), Coefficient::Residue(kf)) => {
            let k = factor.to_bigint().ok_or(Error::NotIntegerBackend)?;
            // exact cross-check with integer matrices
            let exact = g.representative()?.compose(&f.representative()?)?;
            let expected = generator_to_matrix(parity, &gen_gf)?.scale(&(kg * kf * &k));
            if exact != expected {
                return Err(Error::NonDivisorCoefficient);
            }
            Coefficient::Residue(kg * kf * k)
        }
        (Coefficient::Multiplier(Some(mg)), Coefficient::Multiplier(Some(mf))) => {
            Coefficient::Multiplier(Some(mg.mul(mf).mul(&factor)))
        }
        (Coefficient::Multiplier(_), Coefficient::Multiplier(_)) => Coefficient::Multiplier(None),
        _ => return Err(Error::MixedBackend),
    };
    Ok(MorphismClass { source: e1.clone(), target: e3.clone(), parity, coefficient }.reduced())
}

/// `k` with `m = k * gen`, entrywise; fails if `k` is not a ring element.
fn monomial_ratio(m: &MonomialMatrix, gen: &MonomialMatrix) -> Result<FactoredElement> {
    let mut k: Option<FactoredElement> = None;
    for i in 0..2 {
        for j in 0..2 {
            match (&m[i][j], &gen[i][j]) {
                (None, None) => {}
                (Some(x), Some(y)) => {
                    let q = x.quotient(y).ok_or(Error::NonDivisorCoefficient)?;
                    if k.as_ref().is_some_and(|k| *k != q) {
                        return Err(Error::NonDivisorCoefficient);
                    }
                    k = Some(q);
                }
                _ => return Err(Error::NonDivisorCoefficient),
            }
        }
    }
    k.ok_or(Error::NonDivisorCoefficient)
}

/// `End(e_v) = (R/<d>)[w]/(w^2 + t)` with `d = (u, v)`, `t = [u, v]/(u, v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndRingPresentation {
    pub d: FactoredElement,
    pub t: FactoredElement,
}

impl EndRingPresentation {
    pub fn render(&self) -> String {
        if self.d.is_unit() {
            return "0".into();
        }
        format!("(R/<{}>)[w]/(w^2 + {})", self.d, self.t)
    }
}

pub fn end_ring_presentation(e: &ElementaryFactorization) -> EndRingPresentation {
    let w = e.potential();
    let (v, u) = (e.v(), e.u());
    let d = v.gcd(&u);
    let t = v.lcm(&u).quotient(&d).expect("gcd divides lcm");
    EndRingPresentation { d: d.to_element(w), t: t.to_element(w) }
}

fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Solves `s (g1 x + g2 y) + g3 z = 1`, solvable iff `(s (x, y), z) = 1`.
pub fn solve_bezout_linear(s: &BigInt, x: &BigInt, y: &BigInt, z: &BigInt) -> Option<(BigInt, BigInt, BigInt)> {
    let (dxy, p, q) = ext_gcd(x, y);
    let (one, lambda, g3) = ext_gcd(&(s * &dxy), z);
    if !one.is_one() {
        return None;
    }
    let (g1, g2) = (&lambda * p, lambda * q);
    debug_assert!((s * (&g1 * x + &g2 * y) + &g3 * z).is_one());
    Some((g1, g2, g3))
}

/// Mutually inverse even morphisms up to homotopy, with the homotopies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoWitness {
    pub f12: GradedMorphismMatrix,
    pub f21: GradedMorphismMatrix,
    pub g: GradedMorphismMatrix,
    pub h: GradedMorphismMatrix,
}

impl IsoWitness {
    /// `d f12 = d f21 = 0`, `f21 f12 = 1 + d g`, `f12 f21 = 1 + d h`.
    pub fn verify(&self, e1: &ElementaryFactorization, e2: &ElementaryFactorization) -> Result<bool> {
        let (a1, a2) = (e1.to_matrix_factorization()?, e2.to_matrix_factorization()?);
        let id = GradedMorphismMatrix::identity(1);
        Ok(differential(&self.f12, &a1, &a2)?.is_zero()
            && differential(&self.f21, &a2, &a1)?.is_zero()
            && self.f21.compose(&self.f12)? == id.add(&differential(&self.g, &a1, &a1)?)?
            && self.f12.compose(&self.f21)? == id.add(&differential(&self.h, &a2, &a2)?)?)
    }
}

/// Constructs an even isomorphism `e1 ≅ e2` in the homotopy category when
/// one exists (integer backend).
pub fn iso_witness(e1: &ElementaryFactorization, e2: &ElementaryFactorization) -> Result<Option<IsoWitness>> {
    e1.check_same_potential(e2)?;
    let w = e1.potential();
    if w.backend() != Backend::Integer {
        return Err(Error::NotIntegerBackend);
    }
    let dec = GcdDecomposition::from_pair(e1, e2)?;
    let int = |d: &NormalizedDivisor| d.to_bigint(w).expect("integer backend");
    let (b, c, s, ap, dp) = (int(&dec.b), int(&dec.c), int(&dec.s), int(&dec.a_prime), int(&dec.d_prime));
    let sigma = BigInt::from(w.sign().to_i8());
    let (t1, t2) = (BigInt::from(e1.sign().to_i8()), BigInt::from(e2.sign().to_i8()));

    // bc y - s g4 = 1
    let (one, y, minus_g4) = ext_gcd(&(&b * &c), &s);
    if !one.is_one() {
        return Ok(None);
    }
    let g4 = -minus_g4;
    // split g4 along a'b + cd' and a'c + bd'
    let (one1, p1, p2) = ext_gcd(&(&ap * &b), &(&c * &dp));
    let (one2, q1, q2) = ext_gcd(&(&ap * &c), &(&b * &dp));
    if !one1.is_one() || !one2.is_one() {
        return Ok(None);
    }

    let scalar = |x: BigInt| Matrix::diagonal([x]);
    let tau = &t1 * &t2;
    let f12 = GradedMorphismMatrix::even(scalar(&tau * &y * &t2 * &c), scalar(&tau * &y * &t1 * &b));
    let f21 = GradedMorphismMatrix::even(scalar(&t1 * &b), scalar(&t2 * &c));
    let g = GradedMorphismMatrix::odd(scalar(&t1 * &sigma * &g4 * p2), scalar(&t1 * &g4 * p1));
    let h = GradedMorphismMatrix::odd(scalar(&t2 * &sigma * &g4 * q2), scalar(&t2 * &g4 * q1));
    let witness = IsoWitness { f12, f21, g, h };
    debug_assert!(witness.verify(e1, e2)?);
    Ok(Some(witness))
}
