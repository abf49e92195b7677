//! Divisor lattice of a critically-finite potential in factored form.
//!
//! Ring elements are only ever handled up to units, as finite maps from
//! primes to exponents. Two backends share the representation: an abstract
//! one whose primes are bare symbols, and an integer one whose primes are
//! positive prime integers and which additionally tracks a sign.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign as BigSign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest absolute value accepted by [`factor_integer`] unless a different
/// bound is passed explicitly.
pub const DEFAULT_FACTOR_BOUND: u64 = 1 << 63;

/// A prime of the ring.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Prime {
    Symbol(String),
    Integer(u64),
}

impl Prime {
    pub fn backend(&self) -> Backend {
        match self {
            Prime::Symbol(_) => Backend::Abstract,
            Prime::Integer(_) => Backend::Integer,
        }
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prime::Symbol(s) => f.write_str(s),
            Prime::Integer(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Backend {
    /// Symbolic primes; only divisor-class computations are available.
    Abstract,
    /// Integer primes; residue arithmetic and matrices are available.
    Integer,
}

/// Unit datum. The abstract backend only ever uses `Positive`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    #[default]
    Positive,
    Negative,
}

impl Sign {
    pub fn negate(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn to_i8(self) -> i8 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn apply(self, n: BigInt) -> BigInt {
        match self {
            Sign::Positive => n,
            Sign::Negative => -n,
        }
    }
}

/// A non-zero ring element in factored form.
///
/// Zero exponents are never stored, so structural equality of the exponent
/// maps is exactly association in divisibility.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FactoredElement {
    sign: Sign,
    exponents: BTreeMap<Prime, u64>,
}

impl FactoredElement {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn prime_power(p: Prime, n: u64) -> Self {
        let mut e = Self::one();
        if n > 0 {
            e.exponents.insert(p, n);
        }
        e
    }

    pub fn from_exponents<I: IntoIterator<Item = (Prime, u64)>>(sign: Sign, it: I) -> Self {
        let mut e = FactoredElement { sign, exponents: BTreeMap::new() };
        for (p, n) in it {
            if n > 0 {
                *e.exponents.entry(p).or_insert(0) += n;
            }
        }
        e
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn with_sign(mut self, sign: Sign) -> Self {
        self.sign = sign;
        self
    }

    pub fn negate(mut self) -> Self {
        self.sign = self.sign.negate();
        self
    }

    pub fn exponent(&self, p: &Prime) -> u64 {
        self.exponents.get(p).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> &BTreeMap<Prime, u64> {
        &self.exponents
    }

    pub fn is_unit(&self) -> bool {
        self.exponents.is_empty()
    }

    /// Association in divisibility: equal up to a unit.
    pub fn associates(&self, other: &Self) -> bool {
        self.exponents == other.exponents
    }

    pub fn backend(&self) -> Option<Backend> {
        self.exponents.keys().next().map(Prime::backend)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.sign = self.sign.times(other.sign);
        for (p, n) in &other.exponents {
            *out.exponents.entry(p.clone()).or_insert(0) += n;
        }
        out
    }

    pub fn pow(&self, k: u64) -> Self {
        FactoredElement {
            sign: if k.is_multiple_of(2) { Sign::Positive } else { self.sign },
            exponents: if k == 0 {
                BTreeMap::new()
            } else {
                self.exponents.iter().map(|(p, n)| (p.clone(), n * k)).collect()
            },
        }
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.exponents.iter().all(|(p, n)| other.exponent(p) >= *n)
    }

    /// Exact quotient `self / d`, if `d` divides `self`.
    pub fn quotient(&self, d: &Self) -> Option<Self> {
        if !d.divides(self) {
            return None;
        }
        let exponents = self
            .exponents
            .iter()
            .filter_map(|(p, n)| {
                let k = n - d.exponent(p);
                (k > 0).then(|| (p.clone(), k))
            })
            .collect();
        Some(FactoredElement { sign: self.sign.times(d.sign), exponents })
    }

    /// Positive associate.
    pub fn normalized(&self) -> Self {
        self.clone().with_sign(Sign::Positive)
    }

    /// Integer value, when every prime is an integer.
    pub fn to_bigint(&self) -> Option<BigInt> {
        let mut acc = BigInt::one();
        for (p, n) in &self.exponents {
            match p {
                Prime::Integer(q) => {
                    let n = u32::try_from(*n).ok()?;
                    acc *= num_traits::pow(BigInt::from(*q), n as usize);
                }
                Prime::Symbol(_) => return None,
            }
        }
        Some(self.sign.apply(acc))
    }
}

impl fmt::Display for FactoredElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.backend() == Some(Backend::Integer) || self.is_unit() {
            if let Some(n) = self.to_bigint() {
                return write!(f, "{n}");
            }
        }
        if self.sign == Sign::Negative {
            f.write_str("-")?;
        }
        let terms: Vec<String> = self
            .exponents
            .iter()
            .map(|(p, n)| if *n == 1 { p.to_string() } else { format!("{p}^{n}") })
            .collect();
        f.write_str(&terms.join("*"))
    }
}

/// Greatest common divisor, normalized to the positive unit.
pub fn gcd(a: &FactoredElement, b: &FactoredElement) -> FactoredElement {
    let exponents = a
        .exponents
        .iter()
        .filter_map(|(p, n)| {
            let k = (*n).min(b.exponent(p));
            (k > 0).then(|| (p.clone(), k))
        })
        .collect();
    FactoredElement { sign: Sign::Positive, exponents }
}

/// Least common multiple, normalized to the positive unit.
pub fn lcm(a: &FactoredElement, b: &FactoredElement) -> FactoredElement {
    let mut exponents = a.exponents.clone();
    for (p, n) in &b.exponents {
        let e = exponents.entry(p.clone()).or_insert(0);
        *e = (*e).max(*n);
    }
    FactoredElement { sign: Sign::Positive, exponents }
}

// ---------------------------------------------------------------------------
// Integer factorization

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Finds a non-trivial factor of an odd composite `n` (Pollard-Brent).
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn factor_u64_into(n: u64, out: &mut BTreeMap<u64, u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        *out.entry(n).or_insert(0) += 1;
        return;
    }
    let d = pollard_rho(n);
    factor_u64_into(d, out);
    factor_u64_into(n / d, out);
}

/// Trial division by small primes, then a deterministic primality check on
/// the cofactor (which is split further by Pollard's rho when composite).
fn factor_u64(mut n: u64) -> BTreeMap<u64, u64> {
    let mut out = BTreeMap::new();
    let mut d = 2u64;
    while d <= 1000 && d * d <= n {
        while n.is_multiple_of(d) {
            *out.entry(d).or_insert(0) += 1;
            n /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    factor_u64_into(n, &mut out);
    out
}

/// Prime factorization of a non-zero integer with `|n| < 2^63`.
pub fn factor_integer(n: &BigInt) -> Result<FactoredElement> {
    factor_integer_bounded(n, DEFAULT_FACTOR_BOUND)
}

/// Prime factorization of a non-zero integer with `|n| < bound`.
pub fn factor_integer_bounded(n: &BigInt, bound: u64) -> Result<FactoredElement> {
    if n.is_zero() {
        return Err(Error::Zero);
    }
    let magnitude = n
        .abs()
        .to_u64()
        .filter(|m| *m < bound)
        .ok_or_else(|| Error::BoundExceeded(format!("|{n}| is not below {bound}")))?;
    let sign = if n.sign() == BigSign::Minus { Sign::Negative } else { Sign::Positive };
    Ok(FactoredElement::from_exponents(
        sign,
        factor_u64(magnitude).into_iter().map(|(p, k)| (Prime::Integer(p), k)),
    ))
}

// ---------------------------------------------------------------------------
// Potentials

/// A validated critically-finite potential `W = W0 * p1^n1 * ... * pr^nr`.
///
/// Primes are indexed with the critical ones first (in the order given),
/// followed by the non-critical part `W0`, each of order one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Potential {
    backend: Backend,
    sign: Sign,
    primes: Vec<Prime>,
    orders: Vec<u64>,
    critical: usize,
}

impl Potential {
    pub fn validate(critical: Vec<(Prime, u64)>, noncritical: Vec<Prime>) -> Result<Potential> {
        let p = Self::build(critical, noncritical, true)?;
        if p.primes.is_empty() {
            return Err(Error::UnitPotential);
        }
        Ok(p)
    }

    fn build(critical: Vec<(Prime, u64)>, noncritical: Vec<Prime>, check_primes: bool) -> Result<Potential> {
        let mut seen = BTreeSet::new();
        let mut backend = None;
        for p in critical.iter().map(|(p, _)| p).chain(noncritical.iter()) {
            if !seen.insert(p.clone()) {
                return Err(Error::DuplicatePrime(p.to_string()));
            }
            match backend {
                None => backend = Some(p.backend()),
                Some(b) if b != p.backend() => return Err(Error::MixedBackend),
                _ => {}
            }
            if let (true, Prime::Integer(q)) = (check_primes, p) {
                if !is_prime_u64(*q) {
                    return Err(Error::NonPrimeInteger(q.to_string()));
                }
            }
            if let Prime::Symbol(s) = p {
                if !is_symbol(s) {
                    return Err(Error::Parse(format!("`{s}` is not a valid prime symbol")));
                }
            }
        }
        for (p, n) in &critical {
            if *n < 2 {
                return Err(Error::OrderBelowTwo { prime: p.to_string(), order: *n });
            }
        }
        let count = critical.len();
        let (mut primes, mut orders): (Vec<_>, Vec<_>) = critical.into_iter().unzip();
        orders.extend(std::iter::repeat_n(1, noncritical.len()));
        primes.extend(noncritical);
        Ok(Potential {
            backend: backend.unwrap_or(Backend::Abstract),
            sign: Sign::Positive,
            primes,
            orders,
            critical: count,
        })
    }

    /// The unit potential. Arises only as a reduction `W / z^2`.
    pub fn unit(backend: Backend) -> Potential {
        Potential { backend, sign: Sign::Positive, primes: Vec::new(), orders: Vec::new(), critical: 0 }
    }

    /// Sets the unit datum of `W` (integer backend only).
    pub fn with_sign(mut self, sign: Sign) -> Result<Potential> {
        if sign == Sign::Negative && self.backend != Backend::Integer {
            return Err(Error::NotIntegerBackend);
        }
        self.sign = sign;
        Ok(self)
    }

    /// Splits a factored element into critical and non-critical parts.
    pub fn from_element(w: &FactoredElement) -> Result<Potential> {
        let critical = w.exponents().iter().filter(|(_, n)| **n >= 2).map(|(p, n)| (p.clone(), *n)).collect();
        let noncritical = w.exponents().iter().filter(|(_, n)| **n == 1).map(|(p, _)| p.clone()).collect();
        Self::validate(critical, noncritical)?.with_sign(w.sign())
    }

    pub fn from_integer(n: &BigInt) -> Result<Potential> {
        Self::from_element(&factor_integer(n)?)
    }

    /// Parses the factored text grammar, e.g. `p^3*q^2` or `2^3*3^3` or `216`.
    pub fn parse(text: &str) -> Result<Potential> {
        Self::parse_bounded(text, DEFAULT_FACTOR_BOUND)
    }

    pub fn parse_bounded(text: &str, bound: u64) -> Result<Potential> {
        let terms = parse_terms(text)?;
        let mut critical: Vec<(Prime, u64)> = Vec::new();
        let mut noncritical = Vec::new();
        let mut order: Vec<Prime> = Vec::new();
        let mut totals: BTreeMap<Prime, u64> = BTreeMap::new();
        let element = terms.to_element(bound)?;
        // keep the order of first appearance in the text
        for p in terms.prime_order(bound)? {
            if !order.contains(&p) {
                order.push(p);
            }
        }
        for (p, n) in element.exponents() {
            totals.insert(p.clone(), *n);
        }
        for p in order {
            match totals[&p] {
                1 => noncritical.push(p),
                n => critical.push((p, n)),
            }
        }
        Self::validate(critical, noncritical)?.with_sign(element.sign())
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// Number of critical primes.
    pub fn r(&self) -> usize {
        self.critical
    }

    /// Number of primes, critical and non-critical.
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn primes(&self) -> &[Prime] {
        &self.primes
    }

    pub fn prime(&self, i: usize) -> &Prime {
        &self.primes[i]
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn order(&self, i: usize) -> u64 {
        self.orders[i]
    }

    pub fn critical_orders(&self) -> &[u64] {
        &self.orders[..self.critical]
    }

    pub fn critical_primes(&self) -> impl Iterator<Item = (&Prime, u64)> {
        self.primes[..self.critical].iter().zip(self.orders[..self.critical].iter().copied())
    }

    pub fn noncritical_primes(&self) -> &[Prime] {
        &self.primes[self.critical..]
    }

    pub fn index_of(&self, p: &Prime) -> Option<usize> {
        self.primes.iter().position(|q| q == p)
    }

    pub fn element(&self) -> FactoredElement {
        FactoredElement::from_exponents(self.sign, self.primes.iter().cloned().zip(self.orders.iter().copied()))
    }

    pub fn to_bigint(&self) -> Option<BigInt> {
        self.element().to_bigint()
    }

    /// `|A_W|`, the number of normalized divisors.
    pub fn divisor_count(&self) -> BigUint {
        self.orders.iter().map(|n| BigUint::from(n + 1)).product()
    }

    /// All normalized divisors in mixed-radix order (first prime fastest).
    pub fn divisors(&self) -> DivisorIter<'_> {
        DivisorIter { orders: &self.orders, next: Some(vec![0; self.orders.len()]) }
    }

    /// `W_red = prod p_i^floor(n_i/2)` over the critical primes.
    pub fn reduction(&self) -> FactoredElement {
        FactoredElement::from_exponents(Sign::Positive, self.critical_primes().map(|(p, n)| (p.clone(), n / 2)))
    }

    /// `W_red` as a normalized divisor.
    pub fn reduction_divisor(&self) -> NormalizedDivisor {
        NormalizedDivisor(
            self.orders.iter().enumerate().map(|(i, n)| if i < self.critical { n / 2 } else { 0 }).collect(),
        )
    }

    /// A non-unit `d` with `d^2 | W`.
    pub fn is_critical_divisor(&self, d: &FactoredElement) -> bool {
        !d.is_unit() && d.pow(2).divides(&self.element())
    }

    pub fn normalize(&self, e: &FactoredElement) -> Result<NormalizedDivisor> {
        if !e.divides(&self.element()) {
            return Err(Error::NotADivisor(e.to_string()));
        }
        Ok(NormalizedDivisor(self.primes.iter().map(|p| e.exponent(p)).collect()))
    }

    /// Parses a divisor of `W` written in the factored grammar.
    pub fn parse_divisor(&self, text: &str) -> Result<(NormalizedDivisor, Sign)> {
        let e = parse_terms(text)?.to_element(DEFAULT_FACTOR_BOUND)?;
        if let Some(b) = e.backend() {
            if b != self.backend {
                return Err(Error::MixedBackend);
            }
        }
        Ok((self.normalize(&e)?, e.sign()))
    }

    /// `W / z^2` for `z^2 | W`. Primes whose order drops to zero disappear,
    /// primes whose order drops to one become non-critical. Also returns the
    /// position of each old prime in the new potential.
    pub fn quotient_by_square(&self, z: &NormalizedDivisor) -> Result<(Potential, Vec<Option<usize>>)> {
        let mut critical = Vec::new();
        let mut noncritical = Vec::new();
        for (i, p) in self.primes.iter().enumerate() {
            let k = z.0[i] * 2;
            if k > self.orders[i] {
                return Err(Error::NotADivisor(format!("square of {}", z.render(self))));
            }
            match self.orders[i] - k {
                0 => {}
                1 => noncritical.push(p.clone()),
                n => critical.push((p.clone(), n)),
            }
        }
        let mut reduced = Self::build(critical, noncritical, false)?;
        reduced.backend = self.backend;
        reduced.sign = self.sign;
        let map = self.primes.iter().map(|p| reduced.index_of(p)).collect();
        Ok((reduced, map))
    }

    pub fn render(&self) -> String {
        self.element().to_string()
    }

    pub fn to_json(&self) -> PotentialJson {
        PotentialJson {
            primes: self.critical_primes().map(|(p, n)| PrimeOrder { p: p.to_string(), n }).collect(),
            noncritical: self.noncritical_primes().iter().map(Prime::to_string).collect(),
            sign: (self.sign == Sign::Negative).then_some(-1),
        }
    }

    pub fn from_json(json: &PotentialJson) -> Result<Potential> {
        let critical = json.primes.iter().map(|t| Ok((parse_prime(&t.p)?, t.n))).collect::<Result<Vec<_>>>()?;
        let noncritical = json.noncritical.iter().map(|p| parse_prime(p)).collect::<Result<Vec<_>>>()?;
        let sign = match json.sign {
            None | Some(1) => Sign::Positive,
            Some(-1) => Sign::Negative,
            Some(s) => return Err(Error::Parse(format!("invalid sign {s}"))),
        };
        Self::validate(critical, noncritical)?.with_sign(sign)
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Serialized form `{"primes":[{"p":"...","n":3}],"noncritical":[...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PotentialJson {
    pub primes: Vec<PrimeOrder>,
    #[serde(default)]
    pub noncritical: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<i8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeOrder {
    pub p: String,
    pub n: u64,
}

fn parse_prime(s: &str) -> Result<Prime> {
    if let Ok(q) = s.parse::<u64>() {
        Ok(Prime::Integer(q))
    } else if is_symbol(s) {
        Ok(Prime::Symbol(s.to_string()))
    } else {
        Err(Error::Parse(format!("`{s}` is neither an integer nor a prime symbol")))
    }
}

fn is_symbol(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A divisor `prod p_i^k_i` of a fixed potential, `0 <= k_i <= n_i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NormalizedDivisor(Vec<u64>);

impl NormalizedDivisor {
    pub fn one(len: usize) -> Self {
        NormalizedDivisor(vec![0; len])
    }

    pub fn new(w: &Potential, exponents: Vec<u64>) -> Result<Self> {
        if exponents.len() != w.len() {
            return Err(Error::ShapeMismatch(format!(
                "exponent vector of length {} over {} primes",
                exponents.len(),
                w.len()
            )));
        }
        if exponents.iter().zip(w.orders()).any(|(k, n)| k > n) {
            return Err(Error::NotADivisor(format!("{exponents:?}")));
        }
        Ok(NormalizedDivisor(exponents))
    }

    /// Constructs without checking against a potential.
    pub(crate) fn raw(exponents: Vec<u64>) -> Self {
        NormalizedDivisor(exponents)
    }

    pub fn exponents(&self) -> &[u64] {
        &self.0
    }

    pub fn exponent(&self, i: usize) -> u64 {
        self.0[i]
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|k| *k == 0)
    }

    /// `I(t) = { i : p_i | t }`.
    pub fn index_set(&self) -> BTreeSet<usize> {
        self.0.iter().enumerate().filter(|(_, k)| **k > 0).map(|(i, _)| i).collect()
    }

    /// `W / self`.
    pub fn complement(&self, w: &Potential) -> Self {
        NormalizedDivisor(self.0.iter().zip(w.orders()).map(|(k, n)| n - k).collect())
    }

    pub fn gcd(&self, other: &Self) -> Self {
        NormalizedDivisor(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    pub fn lcm(&self, other: &Self) -> Self {
        NormalizedDivisor(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        NormalizedDivisor(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn quotient(&self, d: &Self) -> Option<Self> {
        d.divides(self).then(|| NormalizedDivisor(self.0.iter().zip(&d.0).map(|(a, b)| a - b).collect()))
    }

    pub fn is_coprime(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    pub fn to_element(&self, w: &Potential) -> FactoredElement {
        FactoredElement::from_exponents(Sign::Positive, w.primes().iter().cloned().zip(self.0.iter().copied()))
    }

    pub fn to_bigint(&self, w: &Potential) -> Option<BigInt> {
        self.to_element(w).to_bigint()
    }

    pub fn render(&self, w: &Potential) -> String {
        self.to_element(w).to_string()
    }
}

/// Iterator over `A_W`.
pub struct DivisorIter<'a> {
    orders: &'a [u64],
    next: Option<Vec<u64>>,
}

impl Iterator for DivisorIter<'_> {
    type Item = NormalizedDivisor;

    fn next(&mut self) -> Option<NormalizedDivisor> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = 0;
        loop {
            if i == succ.len() {
                break;
            }
            if succ[i] < self.orders[i] {
                succ[i] += 1;
                self.next = Some(succ);
                break;
            }
            succ[i] = 0;
            i += 1;
        }
        Some(NormalizedDivisor(current))
    }
}

// ---------------------------------------------------------------------------
// Text grammar: term ("*" term)*, term := (symbol | int) ["^" int]

#[derive(Debug)]
enum Base {
    Symbol(String),
    Int(BigInt),
}

#[derive(Debug)]
struct Terms {
    negative: bool,
    terms: Vec<(Base, u64)>,
}

impl Terms {
    fn to_element(&self, bound: u64) -> Result<FactoredElement> {
        let mut acc = FactoredElement::one();
        for (base, k) in &self.terms {
            let factor = match base {
                Base::Symbol(s) => FactoredElement::prime_power(Prime::Symbol(s.clone()), 1),
                Base::Int(n) => factor_integer_bounded(n, bound)?,
            };
            let next = acc.mul(&factor.pow(*k));
            if let (Some(a), Some(b)) = (acc.backend(), next.backend()) {
                if a != b || next.exponents().keys().any(|p| p.backend() != a) {
                    return Err(Error::MixedBackend);
                }
            }
            acc = next;
        }
        if acc.exponents().keys().map(Prime::backend).collect::<BTreeSet<_>>().len() > 1 {
            return Err(Error::MixedBackend);
        }
        if self.negative {
            if acc.backend() == Some(Backend::Abstract) {
                return Err(Error::NotIntegerBackend);
            }
            acc = acc.negate();
        }
        Ok(acc)
    }

    fn prime_order(&self, bound: u64) -> Result<Vec<Prime>> {
        let mut out = Vec::new();
        for (base, _) in &self.terms {
            match base {
                Base::Symbol(s) => out.push(Prime::Symbol(s.clone())),
                Base::Int(n) => out.extend(factor_integer_bounded(n, bound)?.exponents().keys().cloned()),
            }
        }
        Ok(out)
    }
}

fn parse_terms(text: &str) -> Result<Terms> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.as_str()),
    };
    if body.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut terms = Vec::new();
    for term in body.split('*') {
        let (base, exp) = match term.split_once('^') {
            Some((b, e)) => {
                let e = e.parse::<u64>().map_err(|_| Error::Parse(format!("bad exponent in `{term}`")))?;
                (b, e)
            }
            None => (term, 1),
        };
        let base = if is_symbol(base) {
            Base::Symbol(base.to_string())
        } else if !base.is_empty() && base.chars().all(|c| c.is_ascii_digit()) {
            Base::Int(base.parse::<BigInt>().map_err(|e| Error::Parse(e.to_string()))?)
        } else {
            return Err(Error::Parse(format!("bad term `{term}`")));
        };
        terms.push((base, exp));
    }
    Ok(Terms { negative, terms })
}

/// Parses a ring element written in the factored grammar.
pub fn parse_element(text: &str) -> Result<FactoredElement> {
    parse_terms(text)?.to_element(DEFAULT_FACTOR_BOUND)
}
