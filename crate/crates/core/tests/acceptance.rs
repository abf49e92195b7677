//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use elfact_core::divgroups::{DivisibilityGroup, FilterCheck, FinitePoset, LatticeGroupElement};
use elfact_core::homology::hom_module;
use elfact_core::matrix::smith_normal_form;
use elfact_core::{
    alpha, alpha_alt, count_classes, count_classes_literal, enumerate_classes, gcd, invariant_of, iso_even,
    iso_graded, iso_witness, lcm, normal_form, parse_element, ElementaryFactorization, FactoredElement, Grading,
    Matrix, MatrixFactorization, NormalizedDivisor, Parity, Potential, Prime, Sign, Summand,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const FIXTURES: [(&str, u64, u64); 5] =
    [("p^2", 2, 2), ("p^3", 2, 3), ("p^4", 3, 4), ("p^2*q^2", 4, 4), ("p^3*q^3", 5, 9)];

const INTEGER_POTENTIALS: [&str; 8] = ["4", "8", "16", "36", "216", "-72", "360", "900"];

fn pot(s: &str) -> Arc<Potential> {
    Arc::new(Potential::parse(s).expect("valid potential"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn uniform_families() -> Vec<Arc<Potential>> {
    let names = ["p", "q", "r"];
    let mut out = Vec::new();
    for r in 1..=3usize {
        let mut orders = vec![2u64; r];
        loop {
            let text: Vec<String> = orders.iter().zip(names).map(|(n, p)| format!("{p}^{n}")).collect();
            out.push(pot(&text.join("*")));
            let mut i = 0;
            while i < r && orders[i] == 6 {
                orders[i] = 2;
                i += 1;
            }
            if i == r {
                break;
            }
            orders[i] += 1;
        }
    }
    out
}

fn divisors(w: &Arc<Potential>) -> Vec<ElementaryFactorization> {
    w.divisors().map(|v| ElementaryFactorization::from_divisor(w.clone(), v)).collect()
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0[x] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
    }
}

fn gcd_criterion(grading: Grading, a: &ElementaryFactorization, b: &ElementaryFactorization) -> bool {
    match grading {
        Grading::Graded => iso_graded(a, b).expect("same potential"),
        Grading::Even => iso_even(a, b).expect("same potential"),
    }
}

/// Closed-form count against the census, and the census against a
/// union-find over the gcd criterion.
fn criterion_1() -> Outcome {
    let families = uniform_families();
    let mut checked = 0;
    for w in &families {
        let es = divisors(w);
        for grading in [Grading::Graded, Grading::Even] {
            let census = enumerate_classes(w, grading).map_err(|e| e.to_string())?;
            let formula = count_classes(w, grading);
            ensure(formula == census.count().into(), || {
                format!("{} {grading}: formula {formula} vs census {}", w.render(), census.count())
            })?;
            let mut uf = UnionFind((0..es.len()).collect());
            for i in 0..es.len() {
                for j in i + 1..es.len() {
                    if gcd_criterion(grading, &es[i], &es[j]) {
                        uf.union(i, j);
                    }
                }
            }
            let mut roots: Vec<usize> = (0..es.len()).map(|i| uf.find(i)).collect();
            roots.sort_unstable();
            roots.dedup();
            ensure(roots.len() == census.count(), || {
                format!("{} {grading}: gcd components {} vs census {}", w.render(), roots.len(), census.count())
            })?;
            checked += 1;
        }
    }
    Ok(format!("{} potentials, {checked} potential/grading cases", families.len()))
}

fn criterion_2() -> Outcome {
    for (text, graded, even) in FIXTURES {
        let w = pot(text);
        for (grading, want) in [(Grading::Graded, graded), (Grading::Even, even)] {
            let census = enumerate_classes(&w, grading).map_err(|e| e.to_string())?.count() as u64;
            let formula = count_classes(&w, grading);
            ensure(census == want && formula == want.into(), || {
                format!("{text} {grading}: expected {want}, census {census}, formula {formula}")
            })?;
        }
    }
    let lit = count_classes_literal(&pot("p^3*q^3"), Grading::Graded);
    ensure(lit.printed == BigInt::from(3) && lit.pipeline == 5u32.into() && !lit.agrees(), || {
        format!("literal p^3*q^3 diagnostic unexpected: printed {} pipeline {}", lit.printed, lit.pipeline)
    })?;
    Ok(format!("5 fixtures, literal p^3*q^3 = {} flagged against {}", lit.printed, lit.pipeline))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut pairs = 0usize;
    for w in uniform_families() {
        let es = divisors(&w);
        let inv: Vec<_> = es.iter().map(|e| invariant_of(&w, e.v())).collect();
        let n = es.len();
        let sample: Vec<(usize, usize)> = if n * n <= 10_000 {
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect()
        } else {
            (0..10_000).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect()
        };
        for (i, j) in sample {
            let graded = inv[i].h() == inv[j].h();
            let even = inv[i].h_even() == inv[j].h_even();
            let (a, b) = (&es[i], &es[j]);
            ensure(graded == gcd_criterion(Grading::Graded, a, b) && even == gcd_criterion(Grading::Even, a, b), || {
                format!("{}: disagreement on ({}, {})", w.render(), a.v().render(&w), b.v().render(&w))
            })?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} divisor pairs, both gradings"))
}

fn criterion_4() -> Outcome {
    let mut cases = 0;
    for (text, graded, even) in FIXTURES {
        for extra in ["", "*a", "*a*b"] {
            let w = pot(&format!("{text}{extra}"));
            for (grading, want) in [(Grading::Graded, graded), (Grading::Even, even)] {
                let census = enumerate_classes(&w, grading).map_err(|e| e.to_string())?.count() as u64;
                let formula = count_classes(&w, grading);
                ensure(census == want && formula == want.into(), || {
                    format!("{} {grading}: census {census}, formula {formula}, expected {want}", w.render())
                })?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} re-enumerations with up to 2 noncritical primes"))
}

fn criterion_5() -> Outcome {
    let w8 = pot("8");
    let e = |v: &str| ElementaryFactorization::elementary(&parse_element(v).unwrap(), w8.clone()).unwrap();
    for parity in [Parity::Even, Parity::Odd] {
        let hom = hom_module(&e("2"), &e("4"), parity).map_err(|e| e.to_string())?;
        let ann = hom.annihilator_element().to_bigint();
        ensure(ann == Some(BigInt::from(2)), || format!("Hom(e_2, e_4) {parity:?} annihilator {ann:?}"))?;
    }
    let mut checks = 0;
    for (text, _, _) in FIXTURES {
        for extra in ["", "*a"] {
            let w = pot(&format!("{text}{extra}"));
            for i in 0..w.r() {
                let n = w.order(i);
                for k in 0..=n {
                    let mut exps = vec![0; w.len()];
                    exps[i] = k;
                    let v = NormalizedDivisor::new(&w, exps.clone()).map_err(|e| e.to_string())?;
                    exps[i] = k.min(n - k);
                    let want = NormalizedDivisor::new(&w, exps).unwrap();
                    ensure(alpha(&w, &v, &v) == want, || format!("{}: End(e_{}) annihilator", w.render(), v.render(&w)))?;
                    checks += 1;
                }
            }
            let es = divisors(&w);
            for a in &es {
                for b in &es {
                    ensure(alpha(&w, a.v(), b.v()) == alpha_alt(&w, a.v(), b.v()), || {
                        format!("{}: alpha forms differ at ({}, {})", w.render(), a.v().render(&w), b.v().render(&w))
                    })?;
                    if a.v().is_coprime(b.v()) {
                        for parity in [Parity::Even, Parity::Odd] {
                            let hom = hom_module(a, b, parity).map_err(|e| e.to_string())?;
                            ensure(hom.is_zero(), || {
                                format!("{}: Hom(e_{}, e_{}) nonzero", w.render(), a.v().render(&w), b.v().render(&w))
                            })?;
                        }
                    }
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("W = 8 fixture and {checks} annihilator checks"))
}

fn random_signed_divisor(rng: &mut ChaCha8Rng, w: &Arc<Potential>) -> ElementaryFactorization {
    let exps: Vec<u64> = w.orders().iter().map(|&n| rng.gen_range(0..=n)).collect();
    let mut fe = NormalizedDivisor::new(w, exps).unwrap().to_element(w);
    if rng.gen_bool(0.5) {
        fe = fe.negate();
    }
    ElementaryFactorization::elementary(&fe, w.clone()).unwrap()
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let pots: Vec<_> = INTEGER_POTENTIALS.iter().map(|s| pot(s)).collect();
    let (mut iso, mut non) = (0, 0);
    let mut attempts = 0;
    while (iso < 500 || non < 500) && attempts < 100_000 {
        attempts += 1;
        let w = pots.choose(&mut rng).unwrap();
        let (a, b) = (random_signed_divisor(&mut rng, w), random_signed_divisor(&mut rng, w));
        let expected = iso_even(&a, &b).unwrap();
        let witness = iso_witness(&a, &b).map_err(|e| e.to_string())?;
        let desc = || format!("W = {}: ({}, {})", w.render(), a.render(), b.render());
        match witness {
            Some(wt) => {
                ensure(expected, || format!("witness for non-isomorphic pair {}", desc()))?;
                ensure(wt.verify(&a, &b).map_err(|e| e.to_string())?, || format!("witness fails identities {}", desc()))?;
                iso += 1;
            }
            None => {
                ensure(!expected, || format!("no witness for isomorphic pair {}", desc()))?;
                non += 1;
            }
        }
    }
    ensure(iso >= 500, || format!("only {iso} isomorphic pairs sampled"))?;
    Ok(format!("{iso} verified witnesses, {non} non-isomorphic pairs returned none"))
}

/// A random unimodular matrix together with its inverse.
fn unimodular(rng: &mut ChaCha8Rng, n: usize) -> (Matrix, Matrix) {
    let (mut m, mut inv) = (Matrix::identity(n), Matrix::identity(n));
    for _ in 0..rng.gen_range(1..8) {
        let (mut e, mut e_inv) = (Matrix::identity(n), Matrix::identity(n));
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        match rng.gen_range(0..3) {
            0 => {
                let c = rng.gen_range(-3i64..=3);
                e[(i, j)] = BigInt::from(c);
                e_inv[(i, j)] = BigInt::from(-c);
            }
            1 => {
                for k in [i, j] {
                    e[(k, k)] = BigInt::from(0);
                    e_inv[(k, k)] = BigInt::from(0);
                }
                e[(i, j)] = BigInt::one();
                e[(j, i)] = BigInt::one();
                e_inv[(i, j)] = BigInt::one();
                e_inv[(j, i)] = BigInt::one();
            }
            _ => {
                e[(i, i)] = BigInt::from(-1);
                e_inv[(i, i)] = BigInt::from(-1);
            }
        }
        m = e.mul(&m);
        inv = inv.mul(&e_inv);
    }
    (m, inv)
}

fn random_diagonal(rng: &mut ChaCha8Rng, w: &BigInt, n: usize) -> Vec<BigInt> {
    let divs: Vec<BigInt> = (1..=w.abs().to_u64().unwrap()).map(BigInt::from).filter(|d| w.is_multiple_of(d)).collect();
    (0..n).map(|_| divs.choose(rng).unwrap().clone()).collect()
}

fn conjugated(rng: &mut ChaCha8Rng, w: &BigInt, diag: &[BigInt]) -> MatrixFactorization {
    let n = diag.len();
    let v = Matrix::diagonal(diag.iter().cloned());
    let u = Matrix::diagonal(diag.iter().map(|d| w / d));
    let (a, a_inv) = unimodular(rng, n);
    let (b, b_inv) = unimodular(rng, n);
    MatrixFactorization::new(a.mul(&v).mul(&b_inv), b.mul(&u).mul(&a_inv), w.clone()).expect("conjugate of a factorization")
}

fn elementary_summands(w: &Arc<Potential>, diag: &[BigInt]) -> Vec<Summand> {
    diag.iter()
        .map(|d| Summand::Elementary(ElementaryFactorization::elementary(&parse_element(&d.to_string()).unwrap(), w.clone()).unwrap()))
        .collect()
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut cases = 0;
    for _ in 0..240 {
        let text = *["36", "72", "216", "900", "-72"].choose(&mut rng).unwrap();
        let w = pot(text);
        let wi = w.to_bigint().unwrap();
        let n = rng.gen_range(2..=3);
        let diag = random_diagonal(&mut rng, &wi, n);
        let mf = conjugated(&mut rng, &wi, &diag);
        let dec = mf.smith_decompose().map_err(|e| e.to_string())?;
        ensure(dec.verify(&mf), || format!("W = {text}: certificate fails for seed {diag:?}"))?;
        let seed_snf = smith_normal_form(&Matrix::diagonal(diag.iter().cloned())).d.diagonal_entries();
        ensure(dec.diagonal == seed_snf, || format!("W = {text}: diagonal {:?} vs seed {seed_snf:?}", dec.diagonal))?;
        let got = normal_form(&w, &[Summand::Matrix(mf)]).map_err(|e| e.to_string())?;
        let want = normal_form(&w, &elementary_summands(&w, &diag)).unwrap();
        ensure(got == want, || format!("W = {text}: normal form {} vs {}", got.render(&w), want.render(&w)))?;
        cases += 1;
    }
    Ok(format!("{cases} conjugated 2x2 and 3x3 factorizations"))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pots: Vec<_> = INTEGER_POTENTIALS.iter().map(|s| pot(s)).collect();
    let mut cases = 0;
    for _ in 0..1200 {
        let w = pots.choose(&mut rng).unwrap().clone();
        let wi = w.to_bigint().unwrap();
        let items: Vec<ElementaryFactorization> =
            (0..rng.gen_range(1..=5)).map(|_| random_signed_divisor(&mut rng, &w)).collect();
        let base: Vec<Summand> = items.iter().cloned().map(Summand::Elementary).collect();
        let nf = normal_form(&w, &base).map_err(|e| e.to_string())?;

        let mut shuffled = base.clone();
        shuffled.shuffle(&mut rng);

        let mut padded = base.clone();
        let zero = if rng.gen_bool(0.5) { FactoredElement::one() } else { w.element() };
        let at = rng.gen_range(0..=padded.len());
        padded.insert(at, Summand::Elementary(ElementaryFactorization::elementary(&zero, w.clone()).unwrap()));

        let mut substituted = base.clone();
        let k = rng.gen_range(0..items.len());
        let twin = ElementaryFactorization::elementary(&items[k].v_element().negate(), w.clone()).unwrap();
        ensure(items[k].similar(&twin).unwrap(), || "associate divisors not similar".into())?;
        substituted[k] = Summand::Elementary(twin);
        if items.len() >= 2 {
            // replace the first two summands by a conjugated 2x2 factorization
            let diag: Vec<BigInt> = items[..2].iter().map(|e| e.v_element().to_bigint().unwrap()).collect();
            substituted.drain(..2);
            substituted.push(Summand::Matrix(conjugated(&mut rng, &wi, &diag)));
        }

        for (label, variant) in [("permutation", &shuffled), ("zero insertion", &padded), ("similarity", &substituted)] {
            let got = normal_form(&w, variant).map_err(|e| e.to_string())?;
            ensure(got == nf, || format!("W = {}: {label} changed {} to {}", w.render(), nf.render(&w), got.render(&w)))?;
        }
        cases += 1;
    }
    let w = pot("216");
    let e = |v: &str| Summand::Elementary(ElementaryFactorization::elementary(&parse_element(v).unwrap(), w.clone()).unwrap());
    let lhs = normal_form(&w, &[e("12")]).unwrap();
    let rhs = normal_form(&w, &[e("4"), e("3")]).unwrap();
    ensure(lhs == rhs, || format!("e_12 = {} but e_4 + e_3 = {}", lhs.render(&w), rhs.render(&w)))?;
    Ok(format!("{cases} randomized cases, e_12 over 216 = {}", lhs.render(&w)))
}

fn tree_fixtures() -> Vec<FinitePoset> {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let c = |a: &str, b: &str| (a.to_string(), b.to_string());
    let branching = FinitePoset::new(
        s(&["0", "1", "2", "3", "4"]),
        &[c("0", "1"), c("1", "2"), c("1", "3"), c("0", "4")],
    )
    .unwrap();
    vec![FinitePoset::corolla(2), FinitePoset::corolla(3), FinitePoset::chain(2), FinitePoset::chain(3), branching]
}

fn criterion_9() -> Outcome {
    let names = |p: &FinitePoset, xs: &[usize]| xs.iter().map(|&x| p.name(x).to_string()).collect::<Vec<_>>();
    let cor = DivisibilityGroup::new(FinitePoset::corolla(3));
    ensure(names(cor.poset(), cor.x_star()) == ["1", "2", "3"], || "corolla X*".into())?;
    let chain = DivisibilityGroup::new(FinitePoset::chain(3));
    ensure(names(chain.poset(), chain.x_star()) == ["1", "2"], || "chain X*".into())?;
    for f in cor.box_elements(-2, 2) {
        ensure(cor.is_positive(&f) == f.0.iter().all(|v| *v >= 0), || format!("corolla cone at {:?}", f.0))?;
    }
    for f in chain.box_elements(-3, 3) {
        let lex = f.0[0] > 0 || (f.0[0] == 0 && f.0[1] >= 0);
        ensure(chain.is_positive(&f) == lex, || format!("chain cone at {:?}", f.0))?;
    }

    let mut checks = 0;
    for p in tree_fixtures() {
        let g = DivisibilityGroup::new(p);
        let maximal: Vec<usize> = g.x_star().iter().copied().filter(|&x| g.poset().is_maximal(x)).collect();
        for f in g.box_elements(0, 4) {
            for &x in &maximal {
                let up = g.in_up_one(&f, x).map_err(|e| e.to_string())?;
                let raw = g.in_up_one_raw(&f, x).map_err(|e| e.to_string())?;
                let fx = g.in_fx(&f, x).map_err(|e| e.to_string())?;
                ensure(up == raw && up == fx, || format!("up-set forms differ at x = {}, f = {:?}", g.poset().name(x), f.0))?;
                checks += 1;
            }
        }
        for &x in &maximal {
            ensure(g.is_prime_principal_filter(x, 4).map_err(|e| e.to_string())?, || {
                format!("up 1_{} not confirmed prime", g.poset().name(x))
            })?;
        }
    }
    let bad = cor.element(&[("1", 1), ("2", 1)]).unwrap();
    let refuted = cor.check_principal_filter(&bad, 4).map_err(|e| e.to_string())?;
    ensure(matches!(refuted, FilterCheck::Refuted { .. }), || "non-prime filter fixture not refuted".into())?;
    ensure(!cor.check_principal_filter(&LatticeGroupElement(vec![1, 1, 0]), 4).unwrap().is_confirmed(), || {
        "second non-prime fixture not refuted".into()
    })?;
    Ok(format!("{checks} up-set comparisons on [0,4] boxes, primality confirmed and refuted"))
}

fn random_factored(rng: &mut ChaCha8Rng, primes: &[Prime]) -> FactoredElement {
    let sign = if primes[0].backend() == elfact_core::Backend::Integer && rng.gen_bool(0.5) {
        Sign::Negative
    } else {
        Sign::Positive
    };
    FactoredElement::from_exponents(sign, primes.iter().map(|p| (p.clone(), rng.gen_range(0..=6))))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let symbols: Vec<Prime> = ["p", "q", "r", "s"].iter().map(|s| Prime::Symbol(s.to_string())).collect();
    let integers: Vec<Prime> = [2u64, 3, 5, 7].iter().map(|&p| Prime::Integer(p)).collect();
    for round in 0..10_000 {
        let primes = if round % 2 == 0 { &symbols } else { &integers };
        let (a, b, c) = (random_factored(&mut rng, primes), random_factored(&mut rng, primes), random_factored(&mut rng, primes));
        ensure(gcd(&a, &b).mul(&lcm(&a, &b)).associates(&a.mul(&b)), || format!("gcd*lcm law fails for {a}, {b}"))?;
        let lhs = lcm(&lcm(&a, &b), &c).mul(&gcd(&a, &b)).mul(&gcd(&b, &c)).mul(&gcd(&c, &a));
        let rhs = a.mul(&b).mul(&c).mul(&gcd(&gcd(&a, &b), &c));
        ensure(lhs.associates(&rhs), || format!("triple identity fails for {a}, {b}, {c}"))?;
        if let (Some(x), Some(y)) = (a.to_bigint(), b.to_bigint()) {
            ensure(gcd(&a, &b).to_bigint().map(|g| g.abs()) == Some(x.gcd(&y)), || format!("gcd({x}, {y}) mismatch"))?;
        }
    }
    Ok("10000 random triples over symbolic and integer primes".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("oracle and formula agree", criterion_1),
        ("fixed count fixtures", criterion_2),
        ("invariant completeness", criterion_3),
        ("noncritical primes change nothing", criterion_4),
        ("hom module fixtures", criterion_5),
        ("constructive witnesses", criterion_6),
        ("smith decomposition", criterion_7),
        ("krull-schmidt invariance", criterion_8),
        ("divisibility groups", criterion_9),
        ("arithmetic laws", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
