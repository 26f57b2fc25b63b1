//! Sparse multivariate polynomials and lex Groebner bases.
//!
//! Monomials are exponent vectors compared lexicographically, so the first
//! variable is the largest and the leading term is the last map entry.

use std::collections::BTreeMap;
use std::fmt;

use crate::scalar::{Integer, Rational, Scalar};

pub type Monomial = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly<C> {
    nvars: usize,
    terms: BTreeMap<Monomial, C>,
}

pub type RatPoly = Poly<Rational>;
pub type IntPoly = Poly<Integer>;

pub fn monomial_degree(m: &[u32]) -> u32 {
    m.iter().sum()
}

pub fn weighted_degree(m: &[u32], weights: &[u32]) -> u32 {
    m.iter().zip(weights).map(|(e, w)| e * w).sum()
}

pub fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn mono_lcm(a: &[u32], b: &[u32]) -> Monomial {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn mono_mul(a: &[u32], b: &[u32]) -> Monomial {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn mono_div(a: &[u32], b: &[u32]) -> Monomial {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// All exponent vectors in `nvars` variables with weighted degree exactly `d`.
pub fn monomials_of_weight(nvars: usize, weights: &[u32], d: u32) -> Vec<Monomial> {
    fn go(i: usize, left: u32, weights: &[u32], cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if i == cur.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let w = weights[i];
        if w == 0 {
            // weight-zero variables would make the set infinite
            cur[i] = 0;
            go(i + 1, left, weights, cur, out);
            return;
        }
        for e in 0..=left / w {
            cur[i] = e;
            go(i + 1, left - e * w, weights, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    let mut cur = vec![0; nvars];
    go(0, d, weights, &mut cur, &mut out);
    out.sort();
    out
}

impl<C: Scalar> Poly<C> {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C::one())
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        Self::term(nvars, vec![0; nvars], c)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = vec![0; nvars];
        m[i] = 1;
        Self::term(nvars, m, C::one())
    }

    pub fn term(nvars: usize, m: Monomial, c: C) -> Self {
        assert_eq!(m.len(), nvars);
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &[u32]) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&vec![0; self.nvars])
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(|&e| e == 0))
    }

    pub fn leading(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&m) {
            Some(old) => old + c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(m, sum);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (m, c) in &other.terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c.clone())
    }

    pub fn scale(&self, c: &C) -> Self {
        self.map_coeffs(|x| x.clone() * c.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            for (n, d) in &other.terms {
                p.add_term(mono_mul(m, n), c.clone() * d.clone());
            }
        }
        p
    }

    pub fn mul_term(&self, m: &[u32], c: &C) -> Self {
        Self::from_terms(self.nvars, self.terms.iter().map(|(n, d)| (mono_mul(m, n), d.clone() * c.clone())))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn map_coeffs<D: Scalar>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        Poly::from_terms(self.nvars, self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| monomial_degree(m)).max()
    }

    pub fn weighted_degree(&self, weights: &[u32]) -> Option<u32> {
        self.terms.keys().map(|m| weighted_degree(m, weights)).max()
    }

    pub fn is_homogeneous(&self, weights: &[u32]) -> bool {
        let mut ds = self.terms.keys().map(|m| weighted_degree(m, weights));
        match ds.next() {
            None => true,
            Some(d) => ds.all(|e| e == d),
        }
    }

    pub fn homogeneous_part(&self, weights: &[u32], d: u32) -> Self {
        Self::from_terms(
            self.nvars,
            self.terms.iter().filter(|(m, _)| weighted_degree(m, weights) == d).map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    /// Ring map into polynomials in `n` variables sending variable i to
    /// `images[i]`.
    pub fn substitute(&self, n: usize, images: &[Poly<C>]) -> Poly<C> {
        assert_eq!(images.len(), self.nvars);
        let mut out = Poly::zero(n);
        let mut powers: Vec<Vec<Poly<C>>> = images.iter().map(|p| vec![Poly::one(n), p.clone()]).collect();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(n, c.clone());
            for (i, &e) in m.iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul(&images[i]);
                    powers[i].push(next);
                }
                t = t.mul(&powers[i][e as usize]);
            }
            out = out.add(&t);
        }
        out
    }

    pub fn derivative(&self, i: usize) -> Self {
        Self::from_terms(
            self.nvars,
            self.terms.iter().filter(|(m, _)| m[i] > 0).map(|(m, c)| {
                let mut n = m.clone();
                let e = n[i];
                n[i] -= 1;
                let mut k = C::zero();
                for _ in 0..e {
                    k = k + C::one();
                }
                (n, c.clone() * k)
            }),
        )
    }

    /// Same polynomial viewed in `nvars` variables, the old ones at `positions`.
    pub fn embed(&self, nvars: usize, positions: &[usize]) -> Self {
        Self::from_terms(
            nvars,
            self.terms.iter().map(|(m, c)| {
                let mut n = vec![0; nvars];
                for (i, &e) in m.iter().enumerate() {
                    n[positions[i]] = e;
                }
                (n, c.clone())
            }),
        )
    }

    pub fn fmt_with(&self, names: &[String], coeff: impl Fn(&C) -> String) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let mut cs = coeff(c);
            let negative = cs.starts_with('-');
            if negative {
                cs.remove(0);
            }
            if k == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mono: Vec<String> = m
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { names[i].clone() } else { format!("{}^{}", names[i], e) })
                .collect();
            if mono.is_empty() {
                out.push_str(&cs);
            } else {
                if cs != "1" {
                    out.push_str(&cs);
                    out.push('*');
                }
                out.push_str(&mono.join("*"));
            }
        }
        out
    }
}

impl<C: Scalar + fmt::Display> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("x{}", i)).collect();
        write!(f, "{}", self.fmt_with(&names, |c| c.to_string()))
    }
}

impl RatPoly {
    pub fn from_int(p: &IntPoly) -> Self {
        p.map_coeffs(|c| Rational::from_integer(c.clone()))
    }

    /// Integer polynomial, if every coefficient is integral.
    pub fn to_int(&self) -> Option<IntPoly> {
        if self.terms.values().all(|c| c.is_integer()) {
            Some(self.map_coeffs(|c| c.to_integer()))
        } else {
            None
        }
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some((_, c)) => self.scale(&c.recip()),
            None => self.clone(),
        }
    }
}

/// Full reduction of `p` by `basis` (leading terms of the basis need not be
/// monic).
pub fn reduce(p: &RatPoly, basis: &[RatPoly]) -> RatPoly {
    let mut rem = RatPoly::zero(p.nvars);
    let mut q = p.clone();
    while let Some((m, c)) = q.leading().map(|(m, c)| (m.clone(), c.clone())) {
        let divisor = basis.iter().find(|g| g.leading().map(|(lm, _)| divides(lm, &m)).unwrap_or(false));
        match divisor {
            Some(g) => {
                let (lm, lc) = g.leading().unwrap();
                let shift = mono_div(&m, lm);
                q = q.sub(&g.mul_term(&shift, &(c / lc.clone())));
            }
            None => {
                q.terms.remove(&m);
                rem.add_term(m, c);
            }
        }
    }
    rem
}

fn s_poly(f: &RatPoly, g: &RatPoly) -> RatPoly {
    let (fm, fc) = f.leading().unwrap();
    let (gm, gc) = g.leading().unwrap();
    let l = mono_lcm(fm, gm);
    f.mul_term(&mono_div(&l, fm), &fc.recip()).sub(&g.mul_term(&mono_div(&l, gm), &gc.recip()))
}

/// Reduced lex Groebner basis of the ideal generated by `gens`, monic and
/// sorted by leading monomial.
pub fn groebner_basis(gens: &[RatPoly]) -> Vec<RatPoly> {
    let mut basis: Vec<RatPoly> = gens.iter().filter(|g| !g.is_zero()).map(|g| g.monic()).collect();
    let mut pairs: Vec<(usize, usize)> =
        (0..basis.len()).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    while let Some((i, j)) = pairs.pop() {
        let (li, lj) = (basis[i].leading().unwrap().0, basis[j].leading().unwrap().0);
        // coprime leading monomials reduce to zero
        if li.iter().zip(lj).all(|(a, b)| *a == 0 || *b == 0) {
            continue;
        }
        let r = reduce(&s_poly(&basis[i], &basis[j]), &basis);
        if !r.is_zero() {
            let k = basis.len();
            basis.push(r.monic());
            pairs.extend((0..k).map(|i| (i, k)));
        }
    }
    // minimize then interreduce
    let mut minimal: Vec<RatPoly> = Vec::new();
    for (k, g) in basis.iter().enumerate() {
        let lm = g.leading().unwrap().0;
        let redundant = basis.iter().enumerate().any(|(l, h)| {
            let hm = h.leading().unwrap().0;
            l != k && divides(hm, lm) && (hm != lm || l < k)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    let mut reduced = Vec::with_capacity(minimal.len());
    for k in 0..minimal.len() {
        let others: Vec<RatPoly> =
            minimal.iter().enumerate().filter(|(l, _)| *l != k).map(|(_, g)| g.clone()).collect();
        let g = &minimal[k];
        let (lm, lc) = g.leading().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let tail = reduce(&g.sub(&RatPoly::term(g.nvars, lm.clone(), lc.clone())), &others);
        reduced.push(tail.add(&RatPoly::term(g.nvars, lm, lc)).monic());
    }
    reduced.sort_by(|a, b| a.leading().unwrap().0.cmp(b.leading().unwrap().0));
    reduced
}

pub fn ideal_contains(basis: &[RatPoly], p: &RatPoly) -> bool {
    reduce(p, basis).is_zero()
}

/// Whether `m` is a standard monomial, i.e. not divisible by any leading
/// monomial of `basis`.
pub fn is_standard(basis: &[RatPoly], m: &[u32]) -> bool {
    !basis.iter().any(|g| divides(g.leading().unwrap().0, m))
}
