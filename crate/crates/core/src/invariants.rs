//! Divisorial invariants and isomorphism decisions for elementary factorizations.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde_json::json;

use crate::divisors::{NormalizedDivisor, Potential};
use crate::error::{Error, Result};
use crate::factorizations::ElementaryFactorization;
use crate::homology::GcdDecomposition;

/// Everything derived from `s = (v, u)`, computed prime by prime.
///
/// `x` and `y` are `(s, v')` and `(s, u')`. `x_max`/`y_max` carry the
/// alternative profile `p^max(m, n - 2m)` on `I_x`/`I_y`, which is what
/// [`reconstruct_s`] inverts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InvariantData {
    pub s: NormalizedDivisor,
    pub v_prime: NormalizedDivisor,
    pub u_prime: NormalizedDivisor,
    pub x: NormalizedDivisor,
    pub y: NormalizedDivisor,
    pub z: NormalizedDivisor,
    pub x_max: NormalizedDivisor,
    pub y_max: NormalizedDivisor,
    pub i_s: BTreeSet<usize>,
    pub i_x: BTreeSet<usize>,
    pub i_y: BTreeSet<usize>,
    pub i_z: BTreeSet<usize>,
    pub m: Vec<u64>,
}

/// `(s, {I_x, I_y})`, the pair stored smallest first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DivisorialInvariant {
    pub s: NormalizedDivisor,
    pub pair: (BTreeSet<usize>, BTreeSet<usize>),
}

/// `(s, I_x, I_y)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EvenDivisorialInvariant {
    pub s: NormalizedDivisor,
    pub i_x: BTreeSet<usize>,
    pub i_y: BTreeSet<usize>,
}

/// Per-prime invariant exponents `(m, x, y, z, x_max, y_max)` of `p^k | p^n`.
fn local(k: u64, n: u64) -> [u64; 6] {
    let m = k.min(n - k);
    let (vp, up) = (k - m, n - k - m);
    let (x, y) = (m.min(vp), m.min(up));
    let z = if m > 0 && x == 0 && y == 0 { m } else { 0 };
    let big = m.max(n - 2 * m);
    [m, x, y, z, if x > 0 { big } else { 0 }, if y > 0 { big } else { 0 }]
}

pub fn invariant_of(w: &Potential, v: &NormalizedDivisor) -> InvariantData {
    let mut cols: [Vec<u64>; 6] = Default::default();
    for (i, &n) in w.orders().iter().enumerate() {
        for (col, val) in cols.iter_mut().zip(local(v.exponent(i), n)) {
            col.push(val);
        }
    }
    let [m, x, y, z, x_max, y_max] = cols;
    let s = NormalizedDivisor::raw(m.clone());
    let v_prime = v.quotient(&s).expect("s divides v");
    let u_prime = v.complement(w).quotient(&s).expect("s divides u");
    let (x, y, z) = (NormalizedDivisor::raw(x), NormalizedDivisor::raw(y), NormalizedDivisor::raw(z));
    InvariantData {
        i_s: s.index_set(),
        i_x: x.index_set(),
        i_y: y.index_set(),
        i_z: z.index_set(),
        s,
        v_prime,
        u_prime,
        x,
        y,
        z,
        x_max: NormalizedDivisor::raw(x_max),
        y_max: NormalizedDivisor::raw(y_max),
        m,
    }
}

pub fn invariant(e: &ElementaryFactorization) -> InvariantData {
    invariant_of(e.potential(), e.v())
}

impl InvariantData {
    pub fn h(&self) -> DivisorialInvariant {
        let (a, b) = (self.i_x.clone(), self.i_y.clone());
        DivisorialInvariant { s: self.s.clone(), pair: if a <= b { (a, b) } else { (b, a) } }
    }

    pub fn h_even(&self) -> EvenDivisorialInvariant {
        EvenDivisorialInvariant { s: self.s.clone(), i_x: self.i_x.clone(), i_y: self.i_y.clone() }
    }

    pub fn to_json(&self, w: &Potential) -> serde_json::Value {
        let r = |d: &NormalizedDivisor| d.render(w);
        let set = |s: &BTreeSet<usize>| s.iter().map(|i| w.prime(*i).to_string()).collect::<Vec<_>>();
        json!({
            "s": r(&self.s),
            "v_prime": r(&self.v_prime),
            "u_prime": r(&self.u_prime),
            "x": r(&self.x),
            "y": r(&self.y),
            "z": r(&self.z),
            "x_max": r(&self.x_max),
            "y_max": r(&self.y_max),
            "I_s": set(&self.i_s),
            "I_x": set(&self.i_x),
            "I_y": set(&self.i_y),
            "I_z": set(&self.i_z),
            "m": self.m,
        })
    }
}

pub fn h(e: &ElementaryFactorization) -> DivisorialInvariant {
    invariant(e).h()
}

pub fn h_even(e: &ElementaryFactorization) -> EvenDivisorialInvariant {
    invariant(e).h_even()
}

fn pairwise_coprime(ds: &[&NormalizedDivisor]) -> bool {
    ds.iter().enumerate().all(|(i, a)| ds[i + 1..].iter().all(|b| a.is_coprime(b)))
}

/// `a', b, c, d'` pairwise coprime and `(bc, s) = 1`.
pub fn iso_even(e1: &ElementaryFactorization, e2: &ElementaryFactorization) -> Result<bool> {
    let g = GcdDecomposition::from_pair(e1, e2)?;
    Ok(pairwise_coprime(&[&g.a_prime, &g.b, &g.c, &g.d_prime]) && g.b.mul(&g.c).is_coprime(&g.s))
}

/// `a', b, c, d'` pairwise coprime and `(a'd', s) = 1`.
pub fn iso_odd(e1: &ElementaryFactorization, e2: &ElementaryFactorization) -> Result<bool> {
    let g = GcdDecomposition::from_pair(e1, e2)?;
    Ok(pairwise_coprime(&[&g.a_prime, &g.b, &g.c, &g.d_prime]) && g.a_prime.mul(&g.d_prime).is_coprime(&g.s))
}

pub fn iso_graded(e1: &ElementaryFactorization, e2: &ElementaryFactorization) -> Result<bool> {
    Ok(iso_even(e1, e2)? || iso_odd(e1, e2)?)
}

pub fn essence(e: &ElementaryFactorization) -> NormalizedDivisor {
    invariant(e).z
}

/// `(z, e_{v/z})` with `e_{v/z}` living over `W / z^2`.
pub fn essential_reduction(e: &ElementaryFactorization) -> (NormalizedDivisor, ElementaryFactorization) {
    let w = e.potential();
    let z = essence(e);
    let (reduced, map) = w.quotient_by_square(&z).expect("z^2 divides W");
    let quotient = e.v().quotient(&z).expect("z divides v");
    let mut exps = vec![0; reduced.len()];
    for (old, new) in map.iter().enumerate() {
        if let Some(j) = new {
            exps[*j] = quotient.exponent(old);
        }
    }
    let e_red = ElementaryFactorization::from_divisor(Arc::new(reduced), NormalizedDivisor::raw(exps));
    (z, e_red)
}

/// Recovers `s` from the `(x_max, y_max, z)` profile.
///
/// The profile determines `s` whenever every order is at most 6; for larger
/// orders distinct `m` can share a profile and this returns an error.
pub fn reconstruct_s(
    x: &NormalizedDivisor,
    y: &NormalizedDivisor,
    z: &NormalizedDivisor,
    w: &Potential,
) -> Result<NormalizedDivisor> {
    let len = w.len();
    if [x, y, z].iter().any(|d| d.exponents().len() != len) {
        return Err(Error::ShapeMismatch("profile length differs from the number of primes".into()));
    }
    let mut out = Vec::with_capacity(len);
    for (i, &n) in w.orders().iter().enumerate() {
        let target = (x.exponent(i), y.exponent(i), z.exponent(i));
        let ms: BTreeSet<u64> = (0..=n)
            .map(|k| local(k, n))
            .filter(|l| (l[4], l[5], l[3]) == target)
            .map(|l| l[0])
            .collect();
        match ms.len() {
            1 => out.push(*ms.iter().next().unwrap()),
            0 => return Err(Error::InconsistentTriple(format!("no divisor realizes the profile at {}", w.prime(i)))),
            _ => {
                return Err(Error::InconsistentTriple(format!(
                    "profile at {} is realized by several values of s",
                    w.prime(i)
                )))
            }
        }
    }
    Ok(NormalizedDivisor::raw(out))
}
