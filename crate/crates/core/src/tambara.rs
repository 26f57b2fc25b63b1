//! Green and Tambara structure at the ring level: presented commutative rings
//! with involution, their fixed levels, transfers and norms.
//!
//! Coefficients are stored as rationals and checked against the base ring.
//! When restriction is injective the fixed level is stored inside the
//! underlying ring as the sigma-invariant elements; otherwise it is a separate
//! presented ring with explicit restriction and transfer tables.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::abelian::FgAbGroup;
use crate::mackey::{MackeyError, MackeyFunctor};
use crate::matrix::IntMatrix;
use crate::poly::{groebner_basis, is_standard, monomials_of_weight, reduce, weighted_degree, Monomial, RatPoly};
use crate::scalar::{int, rat, Integer, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BaseRing {
    Z,
    ZHalf,
    Q,
    ZMod(u64),
}

impl BaseRing {
    pub fn contains(&self, c: &Rational) -> bool {
        match self {
            BaseRing::Z | BaseRing::ZMod(_) => c.is_integer(),
            BaseRing::ZHalf => {
                let mut d = c.denom().clone();
                let two = int(2);
                while (&d % &two).is_zero() {
                    d /= &two;
                }
                d.is_one()
            }
            BaseRing::Q => true,
        }
    }

    pub fn normalize(&self, c: &Rational) -> Rational {
        match self {
            BaseRing::ZMod(m) => {
                let m = Integer::from(*m);
                let r = ((c.to_integer() % &m) + &m) % &m;
                Rational::from_integer(r)
            }
            _ => c.clone(),
        }
    }

    pub fn two_invertible(&self) -> bool {
        match self {
            BaseRing::ZHalf | BaseRing::Q => true,
            BaseRing::ZMod(m) => m % 2 == 1,
            BaseRing::Z => false,
        }
    }
}

impl fmt::Display for BaseRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseRing::Z => write!(f, "Z"),
            BaseRing::ZHalf => write!(f, "Z[1/2]"),
            BaseRing::Q => write!(f, "Q"),
            BaseRing::ZMod(m) => write!(f, "Z/{}", m),
        }
    }
}

/// The identity a validation failure refers to, in checking order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Identity {
    SigmaStableRelations,
    Involution,
    ResRingMap,
    ResInvariant,
    TrInvariant,
    DoubleCoset,
    Frobenius,
    Multiplicativity,
    SumRule,
    ResNorm,
    WeylInvariance,
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Identity::Involution => "sigma^2 = 1",
            Identity::SigmaStableRelations => "sigma-stable relations",
            Identity::ResRingMap => "res is a ring map",
            Identity::ResInvariant => "sigma res = res",
            Identity::TrInvariant => "tr sigma = tr",
            Identity::DoubleCoset => "res tr = 1 + sigma",
            Identity::Frobenius => "tr(a) x = tr(a res x)",
            Identity::Multiplicativity => "N(ab) = N(a) N(b)",
            Identity::SumRule => "N(a+b) = N(a) + N(b) + tr(a sigma(b))",
            Identity::ResNorm => "res N(a) = a sigma(a)",
            Identity::WeylInvariance => "N(sigma a) = N(a)",
        };
        write!(f, "{}", s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TambaraError {
    #[error("unsupported presentation: {0}")]
    UnsupportedPresentation(String),
    #[error("coefficient {0} is not in the base ring {1}")]
    NotInBase(String, BaseRing),
    #[error("{identity} fails: {witness}")]
    Violation { identity: Identity, witness: String },
    #[error("presentation is not cohomological")]
    NotCohomological,
    #[error("no integral Mackey functor over {0}")]
    UnsupportedBase(BaseRing),
    #[error(transparent)]
    Mackey(#[from] MackeyError),
}

fn violation(identity: Identity, witness: String) -> TambaraError {
    TambaraError::Violation { identity, witness }
}

pub fn fmt_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Sum of `coefficient * name` terms.
fn fmt_combination(terms: &[(Rational, String)]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (c, name)) in terms.iter().enumerate() {
        let negative = c.is_negative();
        let a = c.abs();
        if k == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        if name == "1" {
            out.push_str(&fmt_rational(&a));
        } else if a.is_one() {
            out.push_str(name);
        } else {
            out.push_str(&format!("{}*{}", fmt_rational(&a), name));
        }
    }
    out
}

/// Image of a standard monomial under the involution: `sign * monomials[index]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Orbit {
    Fixed(usize),
    /// sigma(m) = -m
    SignFixed(usize),
    /// sigma(monomials[rep]) = sign * monomials[other], rep the larger one
    Free { rep: usize, other: usize, sign: i64 },
}

/// Presented commutative ring with an involution, over one of the supported
/// base rings.
#[derive(Clone, Debug, PartialEq)]
pub struct InvolutiveRing {
    base: BaseRing,
    names: Vec<String>,
    weights: Vec<u32>,
    relations: Vec<RatPoly>,
    basis: Vec<RatPoly>,
    sigma: Vec<RatPoly>,
}

impl InvolutiveRing {
    pub fn new(base: BaseRing, names: Vec<String>, sigma: Vec<RatPoly>, relations: Vec<RatPoly>) -> Result<Self, TambaraError> {
        let n = names.len();
        if sigma.len() != n || sigma.iter().chain(&relations).any(|p| p.nvars() != n) {
            return Err(TambaraError::UnsupportedPresentation("variable count mismatch".into()));
        }
        for p in sigma.iter().chain(&relations) {
            if let Some((_, c)) = p.terms().find(|(_, c)| !base.contains(c)) {
                return Err(TambaraError::NotInBase(fmt_rational(c), base));
            }
        }
        if matches!(base, BaseRing::ZMod(_)) && !relations.is_empty() {
            return Err(TambaraError::UnsupportedPresentation("relations over Z/m".into()));
        }
        let basis = groebner_basis(&relations);
        for g in &basis {
            if let Some((_, c)) = g.terms().find(|(_, c)| !base.contains(c)) {
                return Err(TambaraError::UnsupportedPresentation(format!(
                    "Groebner basis has coefficient {} outside {}",
                    fmt_rational(c),
                    base
                )));
            }
        }
        let mut ring = InvolutiveRing { base, names, weights: vec![1; n], relations, basis, sigma };
        ring.sigma = ring.sigma.iter().map(|p| ring.nf(p)).collect();
        Ok(ring)
    }

    pub fn polynomial(base: BaseRing, names: Vec<String>, sigma: Vec<RatPoly>) -> Result<Self, TambaraError> {
        Self::new(base, names, sigma, Vec::new())
    }

    pub fn with_weights(mut self, weights: Vec<u32>) -> Self {
        assert_eq!(weights.len(), self.names.len());
        self.weights = weights;
        self
    }

    pub fn base(&self) -> BaseRing {
        self.base
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn relations(&self) -> &[RatPoly] {
        &self.relations
    }

    pub fn groebner(&self) -> &[RatPoly] {
        &self.basis
    }

    pub fn sigma_images(&self) -> &[RatPoly] {
        &self.sigma
    }

    pub fn var(&self, i: usize) -> RatPoly {
        RatPoly::var(self.nvars(), i)
    }

    pub fn var_named(&self, name: &str) -> Option<RatPoly> {
        self.names.iter().position(|s| s == name).map(|i| self.var(i))
    }

    pub fn constant(&self, c: i64) -> RatPoly {
        self.nf(&RatPoly::constant(self.nvars(), rat(c)))
    }

    pub fn monomial(&self, m: &Monomial) -> RatPoly {
        RatPoly::term(self.nvars(), m.clone(), Rational::one())
    }

    pub fn nf(&self, p: &RatPoly) -> RatPoly {
        let r = if self.basis.is_empty() { p.clone() } else { reduce(p, &self.basis) };
        match self.base {
            BaseRing::ZMod(_) => RatPoly::from_terms(r.nvars(), r.terms().map(|(m, c)| (m.clone(), self.base.normalize(c)))),
            _ => r,
        }
    }

    pub fn mul(&self, a: &RatPoly, b: &RatPoly) -> RatPoly {
        self.nf(&a.mul(b))
    }

    pub fn add(&self, a: &RatPoly, b: &RatPoly) -> RatPoly {
        self.nf(&a.add(b))
    }

    pub fn sub(&self, a: &RatPoly, b: &RatPoly) -> RatPoly {
        self.nf(&a.sub(b))
    }

    pub fn eq(&self, a: &RatPoly, b: &RatPoly) -> bool {
        self.nf(&a.sub(b)).is_zero()
    }

    pub fn apply_sigma(&self, p: &RatPoly) -> RatPoly {
        self.nf(&p.substitute(self.nvars(), &self.sigma))
    }

    pub fn fmt(&self, p: &RatPoly) -> String {
        p.fmt_with(&self.names, fmt_rational)
    }

    /// Relations and involution respect the weight grading.
    pub fn is_graded(&self) -> bool {
        self.relations.iter().all(|r| r.is_homogeneous(&self.weights))
            && self
                .sigma
                .iter()
                .enumerate()
                .all(|(i, p)| p.is_zero() || (p.is_homogeneous(&self.weights) && p.weighted_degree(&self.weights) == Some(self.weights[i])))
    }

    pub fn standard_monomials(&self, weight: u32) -> Vec<Monomial> {
        monomials_of_weight(self.nvars(), &self.weights, weight)
            .into_iter()
            .filter(|m| is_standard(&self.basis, m))
            .collect()
    }

    /// All standard monomials, when there are finitely many.
    pub fn finite_standard_monomials(&self) -> Option<Vec<Monomial>> {
        let n = self.nvars();
        let mut bounds = Vec::with_capacity(n);
        for i in 0..n {
            let b = self.basis.iter().find_map(|g| {
                let lm = g.leading().unwrap().0;
                if lm.iter().enumerate().all(|(j, &e)| j == i || e == 0) {
                    Some(lm[i])
                } else {
                    None
                }
            })?;
            bounds.push(b);
        }
        let mut out = vec![vec![0u32; n]];
        for (i, &b) in bounds.iter().enumerate() {
            out = out
                .into_iter()
                .flat_map(|m| {
                    (0..b).map(move |e| {
                        let mut m = m.clone();
                        m[i] = e;
                        m
                    })
                })
                .collect();
        }
        out.retain(|m| is_standard(&self.basis, m));
        out.sort();
        Some(out)
    }

    /// Standard monomials grouped into the pieces used for degreewise data:
    /// one per weight up to `trunc` for graded rings, a single piece for
    /// finite ungraded ones.
    pub fn pieces(&self, trunc: u32) -> Result<Vec<(Option<u32>, Vec<Monomial>)>, TambaraError> {
        if self.is_graded() {
            Ok((0..=trunc).map(|d| (Some(d), self.standard_monomials(d))).collect())
        } else {
            match self.finite_standard_monomials() {
                Some(all) => Ok(vec![(None, all)]),
                None => Err(TambaraError::UnsupportedPresentation("ungraded ring of infinite rank".into())),
            }
        }
    }

    /// Standard monomials of weight at most `bound`, or all of them for
    /// finite ungraded rings.
    pub fn monomials_up_to(&self, bound: u32) -> Vec<Monomial> {
        if self.is_graded() {
            return (0..=bound).flat_map(|d| self.standard_monomials(d)).collect();
        }
        self.finite_standard_monomials().unwrap_or_else(|| (0..=bound).flat_map(|d| self.standard_monomials(d)).collect())
    }

    pub fn weight(&self, m: &[u32]) -> u32 {
        weighted_degree(m, &self.weights)
    }

    /// Action of the involution on a set of standard monomials closed under it.
    pub fn orbits(&self, monomials: &[Monomial]) -> Result<Vec<Orbit>, TambaraError> {
        let index: BTreeMap<&Monomial, usize> = monomials.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut out = Vec::new();
        for (i, m) in monomials.iter().enumerate() {
            let s = self.apply_sigma(&self.monomial(m));
            let bad = || {
                TambaraError::UnsupportedPresentation(format!(
                    "involution sends {} to {}, not a signed standard monomial",
                    self.fmt(&self.monomial(m)),
                    self.fmt(&s)
                ))
            };
            if s.len() != 1 {
                return Err(bad());
            }
            let (image, c) = s.leading().unwrap();
            let sign = if c.is_one() {
                1
            } else if (-c).is_one() || self.base.normalize(&(c + Rational::one())).is_zero() {
                -1
            } else {
                return Err(bad());
            };
            let j = *index.get(image).ok_or_else(bad)?;
            if j == i {
                if sign == 1 {
                    out.push(Orbit::Fixed(i));
                } else {
                    if matches!(self.base, BaseRing::ZMod(m) if m % 2 == 0) {
                        return Err(TambaraError::UnsupportedPresentation("sign-fixed monomial over Z/2k".into()));
                    }
                    out.push(Orbit::SignFixed(i));
                }
            } else if m > image {
                out.push(Orbit::Free { rep: i, other: j, sign });
            }
        }
        Ok(out)
    }

    /// Matrix of the involution on the span of `monomials`, which must be
    /// closed under it up to sign.
    pub fn sigma_matrix(&self, monomials: &[Monomial]) -> Result<IntMatrix, TambaraError> {
        let n = monomials.len();
        let mut sigma = IntMatrix::zeros(n, n);
        for o in self.orbits(monomials)? {
            match o {
                Orbit::Fixed(i) => sigma[(i, i)] = int(1),
                Orbit::SignFixed(i) => sigma[(i, i)] = int(-1),
                Orbit::Free { rep, other, sign } => {
                    sigma[(other, rep)] = int(sign);
                    sigma[(rep, other)] = int(sign);
                }
            }
        }
        Ok(sigma)
    }

    pub fn check_involution(&self) -> Result<(), TambaraError> {
        for i in 0..self.nvars() {
            let x = self.var(i);
            let back = self.apply_sigma(&self.apply_sigma(&x));
            if !self.eq(&back, &x) {
                return Err(violation(
                    Identity::Involution,
                    format!("sigma(sigma({})) = {}", self.names[i], self.fmt(&back)),
                ));
            }
        }
        Ok(())
    }

    pub fn check_sigma_stable(&self) -> Result<(), TambaraError> {
        for r in &self.relations {
            let s = self.apply_sigma(r);
            if !s.is_zero() {
                return Err(violation(
                    Identity::SigmaStableRelations,
                    format!("relation {} has sigma-image {} outside the ideal", self.fmt(r), self.fmt(&s)),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FixedLevel {
    /// Fixed level = sigma-invariants of the underlying ring, res = inclusion,
    /// tr = 1 + sigma.
    Invariants,
    /// Separate presented ring with res given on its variables and tr given on
    /// underlying standard monomials.
    Presented { ring: InvolutiveRing, res: Vec<RatPoly>, tr: BTreeMap<Monomial, RatPoly> },
}

/// How fixed-level basis elements are named in output.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Naming {
    /// Fixed monomials by themselves, free orbits as tr(m).
    Orbit,
    /// One swapped pair x, x_sigma: x_N^b t_a.
    NormTrace,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TambaraPresentation {
    under: InvolutiveRing,
    fixed: FixedLevel,
    norms: Vec<RatPoly>,
    named: Vec<(String, RatPoly)>,
    trunc: u32,
    naming: Naming,
}

pub const DEFAULT_TRUNC: u32 = 8;

impl TambaraPresentation {
    /// Fixed-point Green functor with N(a) = a sigma(a).
    pub fn fixed_point_green(ring: InvolutiveRing, trunc: u32) -> Result<Self, TambaraError> {
        ring.check_sigma_stable()?;
        ring.check_involution()?;
        let norms = (0..ring.nvars()).map(|i| {
            let x = ring.var(i);
            ring.mul(&x, &ring.apply_sigma(&x))
        });
        let norms = norms.collect();
        let mut t = TambaraPresentation { under: ring, fixed: FixedLevel::Invariants, norms, named: Vec::new(), trunc, naming: Naming::Orbit };
        t.named = t.invariant_basis(trunc)?.into_iter().map(|p| (t.describe_fixed(&p), p)).collect();
        Ok(t)
    }

    /// Free algebra on trivial generators: both levels k[x_s], res = id,
    /// tr = 2.
    pub fn free_involutive_trivial(base: BaseRing, names: &[&str], trunc: u32) -> Result<Self, TambaraError> {
        let n = names.len();
        let ring = InvolutiveRing::polynomial(base, names.iter().map(|s| s.to_string()).collect(), (0..n).map(|i| RatPoly::var(n, i)).collect())?;
        let mut t = Self::fixed_point_green(ring, trunc)?;
        t.named = (0..n).map(|i| (names[i].to_string(), t.under.var(i))).collect();
        Ok(t)
    }

    /// Free algebra on one free orbit: underlying k[x, x_sigma] with the swap,
    /// fixed level generated by t_i = tr(x^i) and x_N = N(x).
    pub fn free_involutive_free(base: BaseRing, trunc: u32) -> Result<Self, TambaraError> {
        let mut t = Self::norm_ring(base, &["x"], trunc)?;
        t.naming = Naming::NormTrace;
        let x = t.under.var(0);
        let mut named = vec![("x_N".to_string(), t.norm(&x))];
        for i in 1..=trunc {
            named.push((format!("t_{}", i), t.tr(&x.pow(i))));
        }
        t.named = named;
        Ok(t)
    }

    /// Norm of a polynomial ring: each variable is doubled with the swap.
    pub fn norm_ring(base: BaseRing, names: &[&str], trunc: u32) -> Result<Self, TambaraError> {
        let n = 2 * names.len();
        let mut all = Vec::with_capacity(n);
        let mut sigma = Vec::with_capacity(n);
        for (k, s) in names.iter().enumerate() {
            all.push(s.to_string());
            all.push(format!("{}_σ", s));
            sigma.push(RatPoly::var(n, 2 * k + 1));
            sigma.push(RatPoly::var(n, 2 * k));
        }
        Self::fixed_point_green(InvolutiveRing::polynomial(base, all, sigma)?, trunc)
    }

    /// Norm of a presented ring; only polynomial rings are supported.
    pub fn norm_of_presented(base: BaseRing, names: &[&str], relations: &[RatPoly], trunc: u32) -> Result<Self, TambaraError> {
        if !relations.is_empty() {
            return Err(TambaraError::UnsupportedPresentation("norm of a ring with relations".into()));
        }
        Self::norm_ring(base, names, trunc)
    }

    /// The Burnside Tambara functor over Z: fixed level Z[t]/(t^2 - 2t),
    /// underlying Z, res t = 2, tr 1 = t.
    pub fn burnside() -> Self {
        let under = InvolutiveRing::polynomial(BaseRing::Z, Vec::new(), Vec::new()).unwrap();
        let t = RatPoly::var(1, 0);
        let rel = t.mul(&t).sub(&t.scale(&rat(2)));
        let ring = InvolutiveRing::new(BaseRing::Z, vec!["t".into()], vec![t.clone()], vec![rel]).unwrap();
        let mut tr = BTreeMap::new();
        tr.insert(Vec::new(), t.clone());
        TambaraPresentation {
            under,
            fixed: FixedLevel::Presented { ring, res: vec![RatPoly::constant(0, rat(2))], tr },
            norms: Vec::new(),
            named: vec![("t".into(), t)],
            trunc: DEFAULT_TRUNC,
            naming: Naming::Orbit,
        }
    }

    /// Same presentation with the norm of underlying variable `var` replaced.
    pub fn with_norm(mut self, var: usize, image: RatPoly) -> Self {
        self.norms[var] = image;
        self
    }

    pub fn with_trunc(mut self, trunc: u32) -> Self {
        self.trunc = trunc;
        self
    }

    pub fn under(&self) -> &InvolutiveRing {
        &self.under
    }

    pub fn fixed_level(&self) -> &FixedLevel {
        &self.fixed
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn norm_table(&self) -> &[RatPoly] {
        &self.norms
    }

    pub fn named_generators(&self) -> &[(String, RatPoly)] {
        &self.named
    }

    pub fn named(&self, name: &str) -> Option<RatPoly> {
        self.named.iter().find(|(n, _)| n == name).map(|(_, p)| p.clone())
    }

    fn fixed_ring(&self) -> &InvolutiveRing {
        match &self.fixed {
            FixedLevel::Invariants => &self.under,
            FixedLevel::Presented { ring, .. } => ring,
        }
    }

    pub fn fixed_nf(&self, x: &RatPoly) -> RatPoly {
        self.fixed_ring().nf(x)
    }

    pub fn fixed_one(&self) -> RatPoly {
        self.fixed_ring().constant(1)
    }

    pub fn fixed_constant(&self, c: i64) -> RatPoly {
        self.fixed_ring().constant(c)
    }

    pub fn fixed_mul(&self, x: &RatPoly, y: &RatPoly) -> RatPoly {
        self.fixed_ring().mul(x, y)
    }

    pub fn fixed_add(&self, x: &RatPoly, y: &RatPoly) -> RatPoly {
        self.fixed_ring().add(x, y)
    }

    pub fn fixed_eq(&self, x: &RatPoly, y: &RatPoly) -> bool {
        self.fixed_ring().eq(x, y)
    }

    pub fn fixed_pow(&self, x: &RatPoly, e: u32) -> RatPoly {
        let mut acc = self.fixed_one();
        for _ in 0..e {
            acc = self.fixed_mul(&acc, x);
        }
        acc
    }

    pub fn res(&self, x: &RatPoly) -> RatPoly {
        match &self.fixed {
            FixedLevel::Invariants => self.under.nf(x),
            FixedLevel::Presented { res, .. } => self.under.nf(&x.substitute(self.under.nvars(), res)),
        }
    }

    pub fn tr(&self, a: &RatPoly) -> RatPoly {
        let a = self.under.nf(a);
        match &self.fixed {
            FixedLevel::Invariants => self.under.add(&a, &self.under.apply_sigma(&a)),
            FixedLevel::Presented { ring, tr, .. } => {
                let mut out = RatPoly::zero(ring.nvars());
                for (m, c) in a.terms() {
                    let image = tr.get(m).unwrap_or_else(|| panic!("transfer table misses a standard monomial"));
                    out = out.add(&image.scale(c));
                }
                ring.nf(&out)
            }
        }
    }

    /// Norm of an underlying element, extended from the norm table by
    /// multiplicativity on monomials, N(c m) = c N(m) + c(c-1)/2 tr(m sigma m)
    /// on scalar multiples, and the sum rule across terms.
    pub fn norm(&self, a: &RatPoly) -> RatPoly {
        let a = self.under.nf(a);
        let terms: Vec<RatPoly> = a.terms().map(|(m, c)| RatPoly::term(a.nvars(), m.clone(), c.clone())).collect();
        let mut out = RatPoly::zero(self.fixed_ring().nvars());
        for (k, t) in terms.iter().enumerate() {
            let (m, c) = t.leading().unwrap();
            let mut nm = self.fixed_one();
            for (i, &e) in m.iter().enumerate() {
                nm = self.fixed_mul(&nm, &self.fixed_pow(&self.norms[i], e));
            }
            let mono = self.under.monomial(m);
            let cross = self.tr(&self.under.mul(&mono, &self.under.apply_sigma(&mono)));
            let half = c * (c - Rational::one()) / rat(2);
            out = out.add(&nm.scale(c)).add(&cross.scale(&half));
            for s in &terms[k + 1..] {
                out = out.add(&self.tr(&self.under.mul(t, &self.under.apply_sigma(s))));
            }
        }
        self.fixed_nf(&out)
    }

    /// Z-basis of the fixed level in weights up to `bound`.
    pub fn fixed_basis(&self, bound: u32) -> Result<Vec<RatPoly>, TambaraError> {
        match &self.fixed {
            FixedLevel::Invariants => self.invariant_basis(bound),
            FixedLevel::Presented { ring, .. } => Ok(ring.monomials_up_to(bound).iter().map(|m| ring.monomial(m)).collect()),
        }
    }

    fn invariant_basis(&self, bound: u32) -> Result<Vec<RatPoly>, TambaraError> {
        let ring = &self.under;
        let mut out = Vec::new();
        let monos = ring.monomials_up_to(bound);
        for orbit in ring.orbits(&monos)? {
            match orbit {
                Orbit::Fixed(i) => out.push(ring.monomial(&monos[i])),
                Orbit::SignFixed(_) => {}
                Orbit::Free { rep, .. } => out.push(self.tr(&ring.monomial(&monos[rep]))),
            }
        }
        Ok(out)
    }

    /// Name of a fixed-level element in the basis of fixed monomials and
    /// transfers.
    pub fn describe_fixed(&self, x: &RatPoly) -> String {
        let x = self.fixed_nf(x);
        match &self.fixed {
            FixedLevel::Presented { ring, .. } => ring.fmt(&x),
            FixedLevel::Invariants => {
                let ring = &self.under;
                let mut terms = Vec::new();
                for (m, c) in x.terms().rev() {
                    let s = ring.apply_sigma(&ring.monomial(m));
                    let image = s.leading().map(|(n, _)| n.clone());
                    let name = match image {
                        Some(n) if &n == m => self.fixed_name(m),
                        Some(n) if &n < m => self.orbit_name(m),
                        Some(_) => continue,
                        None => self.orbit_name(m),
                    };
                    terms.push((c.clone(), name));
                }
                fmt_combination(&terms)
            }
        }
    }

    fn fixed_name(&self, m: &Monomial) -> String {
        match self.naming {
            Naming::NormTrace => power("x_N", m[1]),
            Naming::Orbit => self.under.fmt(&self.under.monomial(m)),
        }
    }

    fn orbit_name(&self, m: &Monomial) -> String {
        match self.naming {
            Naming::NormTrace => {
                let (a, b) = (m[0], m[1]);
                let t = format!("t_{}", a - b);
                if b == 0 {
                    t
                } else {
                    format!("{}*{}", power("x_N", b), t)
                }
            }
            Naming::Orbit => format!("tr({})", self.under.fmt(&self.under.monomial(m))),
        }
    }

    /// Underlying elements used by the validation: standard monomials of
    /// weight at most `bound`, together with x + 1, 2x, -x for each
    /// variable x and the constants 2 and -1.
    pub fn under_samples(&self, bound: u32) -> Vec<RatPoly> {
        let ring = &self.under;
        let mut out: Vec<RatPoly> = ring.monomials_up_to(bound).iter().map(|m| ring.monomial(m)).collect();
        out.push(ring.constant(2));
        out.push(ring.constant(-1));
        for i in 0..ring.nvars() {
            if ring.weights()[i] <= bound {
                let x = ring.var(i);
                out.push(ring.add(&x, &ring.constant(1)));
                out.push(ring.nf(&x.scale(&rat(2))));
                out.push(ring.nf(&x.neg()));
            }
        }
        out.retain(|p| !p.is_zero());
        out
    }

    fn under_weight(&self, a: &RatPoly) -> u32 {
        if self.under.is_graded() {
            a.weighted_degree(self.under.weights()).unwrap_or(0)
        } else {
            0
        }
    }

    /// Checks the ring-level invariants on samples up to the truncation:
    /// stable relations, involution, Lewis identities, Frobenius reciprocity,
    /// multiplicativity, the sum rule, res N = a sigma(a) and Weyl invariance.
    pub fn validate(&self) -> Result<(), TambaraError> {
        let (u, f) = (&self.under, self.fixed_ring());
        // sigma is only well defined on the quotient once the ideal is stable
        u.check_sigma_stable()?;
        u.check_involution()?;
        if let FixedLevel::Presented { ring, .. } = &self.fixed {
            for r in ring.relations() {
                let image = self.res(r);
                if !image.is_zero() {
                    return Err(violation(Identity::ResRingMap, format!("res({}) = {}", ring.fmt(r), u.fmt(&image))));
                }
            }
        }
        let linear = self.trunc;
        let half = self.trunc / 2;
        let fixed = self.fixed_basis(linear)?;
        let under = self.under_samples(linear);
        for x in &fixed {
            let r = self.res(x);
            if !u.eq(&u.apply_sigma(&r), &r) {
                return Err(violation(Identity::ResInvariant, format!("x = {}", self.describe_fixed(x))));
            }
        }
        for a in &under {
            if !f.eq(&self.tr(&u.apply_sigma(a)), &self.tr(a)) {
                return Err(violation(Identity::TrInvariant, format!("a = {}", u.fmt(a))));
            }
            let lhs = self.res(&self.tr(a));
            let rhs = u.add(a, &u.apply_sigma(a));
            if !u.eq(&lhs, &rhs) {
                return Err(violation(Identity::DoubleCoset, format!("a = {}: res tr(a) = {}", u.fmt(a), u.fmt(&lhs))));
            }
        }
        for a in &under {
            for x in &fixed {
                if self.under_weight(a) + self.fixed_weight(x) > linear {
                    continue;
                }
                let lhs = f.mul(&self.tr(a), x);
                let rhs = self.tr(&u.mul(a, &self.res(x)));
                if !f.eq(&lhs, &rhs) {
                    return Err(violation(
                        Identity::Frobenius,
                        format!("a = {}, x = {}: {} vs {}", u.fmt(a), self.describe_fixed(x), self.describe_fixed(&lhs), self.describe_fixed(&rhs)),
                    ));
                }
            }
        }
        let small: Vec<&RatPoly> = under.iter().filter(|a| self.under_weight(a) <= half).collect();
        let pairs: Vec<(&RatPoly, &RatPoly)> = small
            .iter()
            .enumerate()
            .flat_map(|(i, a)| small[i..].iter().map(move |b| (*a, *b)))
            .filter(|(a, b)| self.under_weight(a) + self.under_weight(b) <= half)
            .collect();
        if !f.eq(&self.norm(&u.constant(1)), &self.fixed_one()) {
            return Err(violation(Identity::Multiplicativity, "N(1) is not 1".into()));
        }
        for (a, b) in &pairs {
            let lhs = self.norm(&u.mul(a, b));
            let rhs = f.mul(&self.norm(a), &self.norm(b));
            if !f.eq(&lhs, &rhs) {
                return Err(violation(
                    Identity::Multiplicativity,
                    format!("a = {}, b = {}: N(ab) = {}, N(a)N(b) = {}", u.fmt(a), u.fmt(b), self.describe_fixed(&lhs), self.describe_fixed(&rhs)),
                ));
            }
        }
        for (a, b) in &pairs {
            let lhs = self.norm(&u.add(a, b));
            let rhs = f.add(&f.add(&self.norm(a), &self.norm(b)), &self.tr(&u.mul(a, &u.apply_sigma(b))));
            if !f.eq(&lhs, &rhs) {
                return Err(violation(
                    Identity::SumRule,
                    format!("a = {}, b = {}: {} vs {}", u.fmt(a), u.fmt(b), self.describe_fixed(&lhs), self.describe_fixed(&rhs)),
                ));
            }
        }
        for a in &small {
            let lhs = self.res(&self.norm(a));
            let rhs = u.mul(a, &u.apply_sigma(a));
            if !u.eq(&lhs, &rhs) {
                return Err(violation(Identity::ResNorm, format!("a = {}: res N(a) = {}, a sigma(a) = {}", u.fmt(a), u.fmt(&lhs), u.fmt(&rhs))));
            }
            if !f.eq(&self.norm(&u.apply_sigma(a)), &self.norm(a)) {
                return Err(violation(Identity::WeylInvariance, format!("a = {}", u.fmt(a))));
            }
        }
        Ok(())
    }

    fn fixed_weight(&self, x: &RatPoly) -> u32 {
        match &self.fixed {
            FixedLevel::Invariants => self.under_weight(x),
            FixedLevel::Presented { ring, .. } => {
                if ring.is_graded() {
                    x.weighted_degree(ring.weights()).unwrap_or(0)
                } else {
                    0
                }
            }
        }
    }

    /// First fixed-level basis element x, up to half the truncation, with
    /// N(res x) != x^2, together with both sides.
    pub fn cohomological_witness(&self) -> Option<(RatPoly, RatPoly, RatPoly)> {
        let basis = self.fixed_basis(self.trunc / 2).ok()?;
        basis.into_iter().find_map(|x| {
            let lhs = self.norm(&self.res(&x));
            let rhs = self.fixed_mul(&x, &x);
            if self.fixed_eq(&lhs, &rhs) {
                None
            } else {
                Some((x, lhs, rhs))
            }
        })
    }

    pub fn is_cohomological(&self) -> bool {
        self.cohomological_witness().is_none()
    }

    /// Degreewise Mackey functors: one per weight up to the truncation, or a
    /// single one for finite ungraded rings.
    pub fn mackey_pieces(&self) -> Result<Vec<(Option<u32>, MackeyFunctor)>, TambaraError> {
        let base = self.under.base();
        let modulus = match base {
            BaseRing::Z => None,
            BaseRing::ZMod(m) => Some(m as i64),
            other => return Err(TambaraError::UnsupportedBase(other)),
        };
        let group = |n: usize| match modulus {
            None => FgAbGroup::free(n),
            Some(m) => FgAbGroup::new(n, IntMatrix::scalar(n, int(m))),
        };
        let coeff = |c: &Rational| -> Result<Integer, TambaraError> {
            if c.is_integer() {
                Ok(c.to_integer())
            } else {
                Err(TambaraError::NotInBase(fmt_rational(c), base))
            }
        };
        let mut out = Vec::new();
        match &self.fixed {
            FixedLevel::Invariants => {
                for (w, monos) in self.under.pieces(self.trunc)? {
                    let orbits = self.under.orbits(&monos)?;
                    let nu = monos.len();
                    let mut sigma = IntMatrix::zeros(nu, nu);
                    let mut res_cols = Vec::new();
                    let mut tr = Vec::new();
                    for o in &orbits {
                        match *o {
                            Orbit::Fixed(i) => {
                                sigma[(i, i)] = int(1);
                                let mut c = vec![int(0); nu];
                                c[i] = int(1);
                                res_cols.push(c);
                                tr.push(vec![(i, int(2))]);
                            }
                            Orbit::SignFixed(i) => sigma[(i, i)] = int(-1),
                            Orbit::Free { rep, other, sign } => {
                                sigma[(other, rep)] = int(sign);
                                sigma[(rep, other)] = int(sign);
                                let mut c = vec![int(0); nu];
                                c[rep] = int(1);
                                c[other] = int(sign);
                                res_cols.push(c);
                                tr.push(vec![(rep, int(1)), (other, int(sign))]);
                            }
                        }
                    }
                    let nf = res_cols.len();
                    let mut trm = IntMatrix::zeros(nf, nu);
                    for (k, entries) in tr.iter().enumerate() {
                        for (i, c) in entries {
                            trm[(k, *i)] = c.clone();
                        }
                    }
                    let res = IntMatrix::from_cols(res_cols, nu);
                    let m = MackeyFunctor::new(group(nf), group(nu), res, trm, sigma)?;
                    out.push((w, m));
                }
            }
            FixedLevel::Presented { ring, .. } => {
                let fixed = ring.finite_standard_monomials().ok_or_else(|| TambaraError::UnsupportedPresentation("infinite fixed level".into()))?;
                let under = self.under.finite_standard_monomials().ok_or_else(|| TambaraError::UnsupportedPresentation("infinite underlying level".into()))?;
                let sigma = self.under.sigma_matrix(&under)?;
                let (nf, nu) = (fixed.len(), under.len());
                let mut res = IntMatrix::zeros(nu, nf);
                for (j, m) in fixed.iter().enumerate() {
                    let image = self.res(&ring.monomial(m));
                    for (n, c) in image.terms() {
                        let i = under.iter().position(|u| u == n).expect("standard monomial");
                        res[(i, j)] = coeff(c)?;
                    }
                }
                let mut tr = IntMatrix::zeros(nf, nu);
                for (j, m) in under.iter().enumerate() {
                    let image = self.tr(&self.under.monomial(m));
                    for (n, c) in image.terms() {
                        let i = fixed.iter().position(|u| u == n).expect("standard monomial");
                        tr[(i, j)] = coeff(c)?;
                    }
                }
                out.push((None, MackeyFunctor::new(group(nf), group(nu), res, tr, sigma)?));
            }
        }
        Ok(out)
    }
}

fn power(name: &str, e: u32) -> String {
    match e {
        0 => "1".into(),
        1 => name.into(),
        _ => format!("{}^{}", name, e),
    }
}
