//! Finite trees, their lattice-ordered groups and prime positive filters.
//!
//! For a finite poset `X` let `X*` be the set of elements covering some
//! other element. The group is `G = Z^{X*}` under pointwise addition, with
//! positive cone `G+ = { f : f(x) > 0 for x in minsupp(f) }`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `{"elements": [...], "covers": [["a", "b"], ...]}` with `a ≪ b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetJson {
    pub elements: Vec<String>,
    pub covers: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitePoset {
    names: Vec<String>,
    covers: BTreeSet<(usize, usize)>,
    /// `leq[a][b]` iff `a <= b`
    leq: Vec<Vec<bool>>,
}

impl FinitePoset {
    pub fn new(elements: Vec<String>, covers: &[(String, String)]) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for e in &elements {
            if !seen.insert(e.as_str()) {
                return Err(Error::InvalidPoset(format!("duplicate element `{e}`")));
            }
        }
        let index = |s: &str| {
            elements.iter().position(|e| e == s).ok_or_else(|| Error::InvalidPoset(format!("unknown element `{s}`")))
        };
        let mut edges = BTreeSet::new();
        for (a, b) in covers {
            let (i, j) = (index(a)?, index(b)?);
            if i == j {
                return Err(Error::InvalidPoset(format!("`{a}` cannot cover itself")));
            }
            edges.insert((i, j));
        }
        let n = elements.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(i, j) in &edges {
            leq[i][j] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if leq[i][j] && leq[j][i] {
                    return Err(Error::InvalidPoset(format!("cycle through `{}` and `{}`", elements[i], elements[j])));
                }
            }
        }
        for &(i, j) in &edges {
            if let Some(k) = (0..n).find(|&k| k != i && k != j && leq[i][k] && leq[k][j]) {
                return Err(Error::InvalidPoset(format!(
                    "`{}` < `{}` < `{}`, so the second is not a cover of the first",
                    elements[i], elements[k], elements[j]
                )));
            }
        }
        Ok(FinitePoset { names: elements, covers: edges, leq })
    }

    pub fn from_json(json: &PosetJson) -> Result<Self> {
        Self::new(json.elements.clone(), &json.covers)
    }

    /// Root `0` with leaves `1..=n`.
    pub fn corolla(n: usize) -> Self {
        let names: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
        let covers: Vec<_> = (1..=n).map(|i| ("0".to_string(), i.to_string())).collect();
        Self::new(names, &covers).expect("corolla is a poset")
    }

    /// `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Self {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let covers: Vec<_> = (1..n).map(|i| ((i - 1).to_string(), i.to_string())).collect();
        Self::new(names, &covers).expect("chain is a poset")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq[a][b]
    }

    /// `a ≪ b`.
    pub fn covers(&self, a: usize, b: usize) -> bool {
        self.covers.contains(&(a, b))
    }

    pub fn down_set(&self, x: usize) -> Vec<usize> {
        (0..self.len()).filter(|&y| self.leq(y, x)).collect()
    }

    pub fn minimal(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| (0..self.len()).all(|y| !self.lt(y, x))).collect()
    }

    pub fn is_maximal(&self, x: usize) -> bool {
        (0..self.len()).all(|y| !self.lt(x, y))
    }

    pub fn is_chain(&self, set: &[usize]) -> bool {
        set.iter().all(|&a| set.iter().all(|&b| self.leq(a, b) || self.leq(b, a)))
    }

    /// Every down-set is totally ordered.
    pub fn is_tree(&self) -> bool {
        (0..self.len()).all(|x| self.is_chain(&self.down_set(x)))
    }

    /// `X* = { x : some y ≪ x }`, in index order.
    pub fn x_star(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.covers.iter().any(|&(_, b)| b == x)).collect()
    }

    fn least(&self, set: &[usize]) -> Option<usize> {
        set.iter().copied().find(|&a| set.iter().all(|&b| self.leq(a, b)))
    }

    fn greatest(&self, set: &[usize]) -> Option<usize> {
        set.iter().copied().find(|&a| set.iter().all(|&b| self.leq(b, a)))
    }

    pub fn sup(&self, set: &[usize]) -> Option<usize> {
        let upper: Vec<usize> = (0..self.len()).filter(|&u| set.iter().all(|&s| self.leq(s, u))).collect();
        self.least(&upper)
    }

    pub fn inf(&self, set: &[usize]) -> Option<usize> {
        let lower: Vec<usize> = (0..self.len()).filter(|&l| set.iter().all(|&s| self.leq(l, s))).collect();
        self.greatest(&lower)
    }

    /// All non-empty chains (exponential; intended for small posets).
    pub fn chains(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack: Vec<Vec<usize>> = (0..self.len()).map(|x| vec![x]).collect();
        while let Some(chain) = stack.pop() {
            let top = *chain.last().expect("non-empty");
            for y in 0..self.len() {
                if self.lt(top, y) {
                    let mut longer = chain.clone();
                    longer.push(y);
                    stack.push(longer);
                }
            }
            out.push(chain);
        }
        out.sort();
        out
    }

    /// Every non-empty chain has a supremum and an infimum.
    pub fn kaplansky_i(&self) -> bool {
        self.chains().iter().all(|c| self.sup(c).is_some() && self.inf(c).is_some())
    }

    /// Every strict pair `x < y` contains a cover `x <= u ≪ v <= y`.
    pub fn kaplansky_ii(&self) -> bool {
        (0..self.len()).all(|x| {
            (0..self.len()).all(|y| {
                !self.lt(x, y) || self.covers.iter().any(|&(u, v)| self.leq(x, u) && self.leq(v, y))
            })
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeReport {
    pub is_tree: bool,
    pub unique_min: Option<String>,
    pub kaplansky_i: bool,
    pub kaplansky_ii: bool,
    #[serde(rename = "X_star")]
    pub x_star: Vec<String>,
}

pub fn analyze_poset(p: &FinitePoset) -> TreeReport {
    let mins = p.minimal();
    TreeReport {
        is_tree: p.is_tree(),
        unique_min: (mins.len() == 1).then(|| p.name(mins[0]).to_string()),
        kaplansky_i: p.kaplansky_i(),
        kaplansky_ii: p.kaplansky_ii(),
        x_star: p.x_star().into_iter().map(|i| p.name(i).to_string()).collect(),
    }
}

/// An element of `G`, stored densely over `X*`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeGroupElement(pub Vec<i64>);

impl LatticeGroupElement {
    pub fn add(&self, other: &Self) -> Self {
        LatticeGroupElement(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        LatticeGroupElement(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Self {
        LatticeGroupElement(self.0.iter().map(|a| -a).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|a| *a == 0)
    }
}

/// Outcome of a bounded primality check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FilterCheck {
    /// No violation among the `checked` pairs of the box `[0, bound]`.
    Confirmed { bound: i64, checked: u64 },
    /// `f` and `g` lie outside the filter but `f + g` lies inside.
    Refuted { f: LatticeGroupElement, g: LatticeGroupElement },
}

impl FilterCheck {
    pub fn is_confirmed(&self) -> bool {
        matches!(self, FilterCheck::Confirmed { .. })
    }
}

/// The group `G` attached to a finite poset.
#[derive(Clone, Debug)]
pub struct DivisibilityGroup {
    poset: FinitePoset,
    x_star: Vec<usize>,
}

impl DivisibilityGroup {
    pub fn new(poset: FinitePoset) -> Self {
        let x_star = poset.x_star();
        DivisibilityGroup { poset, x_star }
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.poset
    }

    /// `X*` as poset indices; coordinate `k` of an element is `x_star()[k]`.
    pub fn x_star(&self) -> &[usize] {
        &self.x_star
    }

    pub fn rank(&self) -> usize {
        self.x_star.len()
    }

    fn coord(&self, x: usize) -> Option<usize> {
        self.x_star.iter().position(|&y| y == x)
    }

    pub fn element(&self, values: &[(&str, i64)]) -> Result<LatticeGroupElement> {
        let mut f = vec![0; self.rank()];
        for (name, v) in values {
            let k = self
                .poset
                .index_of(name)
                .and_then(|x| self.coord(x))
                .ok_or_else(|| Error::InvalidPoset(format!("`{name}` is not in X*")))?;
            f[k] = *v;
        }
        Ok(LatticeGroupElement(f))
    }

    pub fn indicator(&self, x: usize) -> Result<LatticeGroupElement> {
        let k = self.coord(x).ok_or_else(|| Error::NotMaximal(format!("`{}` is not in X*", self.poset.name(x))))?;
        let mut f = vec![0; self.rank()];
        f[k] = 1;
        Ok(LatticeGroupElement(f))
    }

    pub fn support(&self, f: &LatticeGroupElement) -> BTreeSet<usize> {
        self.x_star.iter().zip(&f.0).filter(|(_, v)| **v != 0).map(|(x, _)| *x).collect()
    }

    /// Support points below which `f` vanishes on `X*`.
    pub fn minsupp(&self, f: &LatticeGroupElement) -> BTreeSet<usize> {
        let supp = self.support(f);
        supp.iter().copied().filter(|&x| supp.iter().all(|&y| !self.poset.lt(y, x))).collect()
    }

    pub fn is_positive(&self, f: &LatticeGroupElement) -> bool {
        self.minsupp(f).iter().all(|&x| f.0[self.coord(x).expect("in X*")] > 0)
    }

    fn check_maximal(&self, x: usize) -> Result<()> {
        if self.coord(x).is_none() || !self.poset.is_maximal(x) {
            return Err(Error::NotMaximal(format!("`{}` is not a maximal element of X*", self.poset.name(x))));
        }
        Ok(())
    }

    /// `f ∈ G+` and `supp(f) ∩ ↓x ≠ ∅`.
    pub fn in_up_one(&self, f: &LatticeGroupElement, x: usize) -> Result<bool> {
        self.check_maximal(x)?;
        Ok(self.is_positive(f) && self.support(f).iter().any(|&y| self.poset.leq(y, x)))
    }

    /// `f - 1_x ∈ G+`, directly from the definition of the principal filter.
    pub fn in_up_one_raw(&self, f: &LatticeGroupElement, x: usize) -> Result<bool> {
        self.check_maximal(x)?;
        Ok(self.is_positive(f) && self.is_positive(&f.sub(&self.indicator(x)?)))
    }

    /// `f ∈ G+` with `minsupp(f) ∩ ↓x ≠ ∅`.
    pub fn in_fx_minsupp(&self, f: &LatticeGroupElement, x: usize) -> bool {
        self.is_positive(f) && self.minsupp(f).iter().any(|&y| self.poset.leq(y, x))
    }

    /// `f ∈ G+` with `S_f(x) = supp(f) ∩ ↓x` non-empty and having a minimum.
    pub fn in_fx_min(&self, f: &LatticeGroupElement, x: usize) -> bool {
        let s: Vec<usize> = self.support(f).into_iter().filter(|&y| self.poset.leq(y, x)).collect();
        self.is_positive(f) && !s.is_empty() && self.poset.least(&s).is_some()
    }

    /// Membership in `F_x`; both characterizations are evaluated and must agree.
    pub fn in_fx(&self, f: &LatticeGroupElement, x: usize) -> Result<bool> {
        let a = self.in_fx_minsupp(f, x);
        let b = self.in_fx_min(f, x);
        if a != b {
            return Err(Error::InvalidPoset(format!(
                "the two descriptions of F_{} disagree; the poset is not a tree",
                self.poset.name(x)
            )));
        }
        Ok(a)
    }

    /// All elements of the box `[lo, hi]^{X*}`.
    pub fn box_elements(&self, lo: i64, hi: i64) -> Vec<LatticeGroupElement> {
        let mut out = vec![LatticeGroupElement(Vec::with_capacity(self.rank()))];
        for _ in 0..self.rank() {
            out = out
                .into_iter()
                .flat_map(|f| {
                    (lo..=hi).map(move |v| {
                        let mut g = f.clone();
                        g.0.push(v);
                        g
                    })
                })
                .collect();
        }
        out
    }

    /// Checks that `G+ \ F` is closed under addition for `F` given by
    /// `member`, over positive elements of `[0, bound]^{X*}`.
    pub fn check_prime<F>(&self, bound: i64, member: F) -> FilterCheck
    where
        F: Fn(&LatticeGroupElement) -> bool,
    {
        let outside: Vec<LatticeGroupElement> =
            self.box_elements(0, bound).into_iter().filter(|f| self.is_positive(f) && !member(f)).collect();
        let mut checked = 0u64;
        for (i, f) in outside.iter().enumerate() {
            for g in &outside[i..] {
                checked += 1;
                if member(&f.add(g)) {
                    return FilterCheck::Refuted { f: f.clone(), g: g.clone() };
                }
            }
        }
        FilterCheck::Confirmed { bound, checked }
    }

    /// `↑1_x` is prime, confirmed up to `bound`.
    pub fn is_prime_principal_filter(&self, x: usize, bound: i64) -> Result<bool> {
        self.check_maximal(x)?;
        Ok(self.check_prime(bound, |f| self.in_up_one(f, x).expect("checked")).is_confirmed())
    }

    /// The principal filter `↑g = { f ∈ G+ : f - g ∈ G+ }`.
    pub fn in_principal_filter(&self, f: &LatticeGroupElement, g: &LatticeGroupElement) -> bool {
        self.is_positive(f) && self.is_positive(&f.sub(g))
    }

    /// Bounded primality check for the principal filter generated by `g`.
    pub fn check_principal_filter(&self, g: &LatticeGroupElement, bound: i64) -> Result<FilterCheck> {
        if g.is_zero() || !self.is_positive(g) {
            return Err(Error::InvalidPoset("a positive filter needs a non-zero positive generator".into()));
        }
        Ok(self.check_prime(bound, |f| self.in_principal_filter(f, g)))
    }

    /// Maximal elements of `X` lying in `X*`.
    pub fn principal_prime_candidates(&self) -> Vec<usize> {
        self.x_star.iter().copied().filter(|&x| self.poset.is_maximal(x)).collect()
    }
}

/// Componentwise minimum in `Z^n` under the product order.
pub fn product_inf(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| *x.min(y)).collect()
}

pub fn product_sup(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

pub fn product_is_positive(a: &[i64]) -> bool {
    a.iter().all(|x| *x >= 0)
}

fn product_box(n: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v| (0..=bound).map(move |k| [v.clone(), vec![k]].concat())).collect();
    }
    out
}

/// Whether `↑g` in `Z^n` (product order) has an additively closed
/// complement in the positive cone, over the box `[0, bound]^n`.
pub fn product_filter_is_prime(g: &[i64], bound: i64) -> bool {
    let member = |f: &[i64]| f.iter().zip(g).all(|(x, y)| x >= y);
    let outside: Vec<Vec<i64>> = product_box(g.len(), bound).into_iter().filter(|f| !member(f)).collect();
    outside.iter().enumerate().all(|(i, f)| {
        outside[i..].iter().all(|h| !member(&f.iter().zip(h).map(|(a, b)| a + b).collect::<Vec<_>>()))
    })
}

/// Non-zero generators in `[0, bound]^n` whose principal filter passes the
/// bounded primality check.
pub fn product_prime_generators(n: usize, bound: i64) -> Vec<Vec<i64>> {
    product_box(n, bound)
        .into_iter()
        .filter(|g| g.iter().any(|x| *x != 0) && product_filter_is_prime(g, bound))
        .collect()
}
