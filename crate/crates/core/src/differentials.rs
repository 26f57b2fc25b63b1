//! Involutive cotangent modules, de Rham complexes with a sigma-antilinear
//! differential, and their cohomology.
//!
//! A presented ring with involution is resolved by a free one on which sigma
//! permutes the variables: a variable with sigma(y) = -y is doubled to y, y_σ
//! with the extra relation z = y + y_σ. The cotangent module is the cokernel of
//! the relation differentials. Relations with a unit coefficient are then
//! used to eliminate generators, which gives the reduced presentation.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::abelian::{subquotient, AbMap, FgAbGroup};
use crate::complexes::{suspend_sigma, MackeyComplex};
use crate::mackey::{MackeyError, MackeyFunctor};
use crate::matrix::{rank, IntMatrix, RatMatrix};
use crate::poly::{groebner_basis, is_standard, monomials_of_weight, reduce, Monomial, RatPoly};
use crate::scalar::{ratio, Integer, Rational};
use crate::tambara::{fmt_rational, BaseRing, InvolutiveRing, TambaraError, TambaraPresentation};
use crate::trace::{hr_graded_piece, weight_piece, TraceError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DifferentialsError {
    #[error("not cohomological: N(res x) != x^2 for x = {0}")]
    NotCohomological(String),
    #[error("cotangent module is not free after relation reduction: {0}")]
    NotSmoothPresentation(String),
    #[error("unsupported presentation: {0}")]
    UnsupportedPresentation(String),
    #[error("invalid involutive complex in degree {degree}: {reason}")]
    InvalidComplex { degree: i64, reason: &'static str },
    #[error(transparent)]
    Tambara(#[from] TambaraError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Mackey(#[from] MackeyError),
}

/// How sigma and the differential interact.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    /// d sigma = -sigma d
    Antilinear,
    /// d sigma = sigma d
    Equivariant,
}

/// Bounded cochain complex of free abelian groups with an involution on each
/// term. `d(n)` goes from degree n to n + 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvolutiveCochainComplex {
    ranks: BTreeMap<i64, usize>,
    sigma: BTreeMap<i64, IntMatrix>,
    d: BTreeMap<i64, IntMatrix>,
    convention: Convention,
}

impl InvolutiveCochainComplex {
    pub fn new(
        sigma: BTreeMap<i64, IntMatrix>,
        d: BTreeMap<i64, IntMatrix>,
        convention: Convention,
    ) -> Result<Self, DifferentialsError> {
        let ranks = sigma.iter().map(|(&n, s)| (n, s.rows())).collect();
        let c = InvolutiveCochainComplex { ranks, sigma, d, convention };
        c.validate()?;
        Ok(c)
    }

    pub fn zero(convention: Convention) -> Self {
        InvolutiveCochainComplex { ranks: BTreeMap::new(), sigma: BTreeMap::new(), d: BTreeMap::new(), convention }
    }

    pub fn validate(&self) -> Result<(), DifferentialsError> {
        let bad = |degree, reason| Err(DifferentialsError::InvalidComplex { degree, reason });
        for (&n, s) in &self.sigma {
            if !s.is_square() || s.mul(s) != IntMatrix::identity(s.rows()) {
                return bad(n, "sigma is not an involution");
            }
        }
        for (&n, d) in &self.d {
            if d.shape() != (self.rank(n + 1), self.rank(n)) {
                return bad(n, "differential has the wrong shape");
            }
            if !self.d(n + 1).mul(d).is_zero() {
                return bad(n, "d^2 != 0");
            }
            let ds = d.mul(&self.sigma(n));
            let sd = self.sigma(n + 1).mul(d);
            let ok = match self.convention {
                Convention::Antilinear => ds == sd.neg(),
                Convention::Equivariant => ds == sd,
            };
            if !ok {
                return bad(n, "differential does not respect the convention");
            }
        }
        Ok(())
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.ranks.keys().copied().collect()
    }

    pub fn rank(&self, n: i64) -> usize {
        self.ranks.get(&n).copied().unwrap_or(0)
    }

    pub fn sigma(&self, n: i64) -> IntMatrix {
        self.sigma.get(&n).cloned().unwrap_or_else(|| IntMatrix::zeros(0, 0))
    }

    pub fn d(&self, n: i64) -> IntMatrix {
        self.d.get(&n).cloned().unwrap_or_else(|| IntMatrix::zeros(self.rank(n + 1), self.rank(n)))
    }
}

/// Replaces sigma by -sigma in odd degrees, which swaps the two conventions.
pub fn sign_fix(m: &InvolutiveCochainComplex) -> InvolutiveCochainComplex {
    let sigma = m.sigma.iter().map(|(&n, s)| (n, if n.rem_euclid(2) == 1 { s.neg() } else { s.clone() })).collect();
    let convention = match m.convention {
        Convention::Antilinear => Convention::Equivariant,
        Convention::Equivariant => Convention::Antilinear,
    };
    InvolutiveCochainComplex { ranks: m.ranks.clone(), sigma, d: m.d.clone(), convention }
}

/// Cohomology group with its residual involution.
#[derive(Clone, Debug)]
pub struct InvCohomology {
    pub group: FgAbGroup,
    /// Induced action on the generators of `group`.
    pub sigma: IntMatrix,
    /// Rational dimensions of the +1 and -1 eigenspaces.
    pub plus: usize,
    pub minus: usize,
}

impl InvCohomology {
    pub fn rank(&self) -> usize {
        self.group.free_rank()
    }
}

/// H^n of the sign-fixed complex with its sigma action. Antilinear input is
/// sign-fixed first; equivariant input is used as is.
pub fn inv_cochain_cohomology(m: &InvolutiveCochainComplex, n: i64) -> InvCohomology {
    let fixed;
    let m = match m.convention {
        Convention::Antilinear => {
            fixed = sign_fix(m);
            &fixed
        }
        Convention::Equivariant => m,
    };
    let free = |k: i64| FgAbGroup::free(m.rank(k));
    let d_in = AbMap::new_unchecked(free(n - 1), free(n), m.d(n - 1));
    let d_out = AbMap::new_unchecked(free(n), free(n + 1), m.d(n));
    let sq = subquotient(&d_in, &d_out).expect("validated complex");
    let sigma = sq.induced(&sq, &m.sigma(n));
    let q = |a: &IntMatrix| a.to_rational();
    let dims = |s: i64| {
        let id = RatMatrix::identity(m.rank(n));
        let p = if s > 0 { id.add(&q(&m.sigma(n))) } else { id.sub(&q(&m.sigma(n))) };
        let prev_id = RatMatrix::identity(m.rank(n - 1));
        let p_prev = if s > 0 { prev_id.add(&q(&m.sigma(n - 1))) } else { prev_id.sub(&q(&m.sigma(n - 1))) };
        rank(&p) - rank(&q(&m.d(n)).mul(&p)) - rank(&q(&m.d(n - 1)).mul(&p_prev))
    };
    InvCohomology { group: sq.group, sigma, plus: dims(1), minus: dims(-1) }
}

/// A 1-form: coefficients in the underlying ring of `B`, one per generator.
pub type FormVec = Vec<RatPoly>;

/// The cotangent module of a presented cohomological Tambara functor: the
/// cokernel of `B{d r} -> B{d g}` over the resolving free algebra.
#[derive(Clone, Debug)]
pub struct CotangentPresentation {
    algebra: TambaraPresentation,
    resolvent: InvolutiveRing,
    /// resolvent variable -> underlying ring of `algebra`
    psi: Vec<RatPoly>,
    /// ring variable -> resolvent variable
    lift_index: Vec<usize>,
    gen_sigma: Vec<usize>,
    rel_names: Vec<String>,
    rel_lifts: Vec<RatPoly>,
    rel_images: Vec<Vec<RatPoly>>,
    reduced_gens: Vec<usize>,
    /// each resolvent generator in the reduced generators
    expr: Vec<FormVec>,
    reduced_relations: Vec<FormVec>,
    module_gb: Vec<RatPoly>,
}

pub fn cotangent_module(b: &TambaraPresentation) -> Result<CotangentPresentation, DifferentialsError> {
    if let Some((x, _, _)) = b.cohomological_witness() {
        return Err(DifferentialsError::NotCohomological(b.describe_fixed(&x)));
    }
    let ring = b.under();
    let n = ring.nvars();
    let sigma = ring.sigma_images();
    let unsupported = |s: String| DifferentialsError::UnsupportedPresentation(s);

    // resolvent variables: each ring variable, followed by y_σ for sign variables
    let mut names = Vec::new();
    let mut weights = Vec::new();
    let mut lift_index = Vec::with_capacity(n);
    let mut sign_vars = Vec::new();
    for i in 0..n {
        lift_index.push(names.len());
        names.push(ring.names()[i].clone());
        weights.push(ring.weights()[i]);
        let x = ring.var(i);
        if sigma[i] == x.neg() {
            sign_vars.push(i);
            names.push(format!("{}_σ", ring.names()[i]));
            weights.push(ring.weights()[i]);
        } else if sigma[i] != x && !(0..n).any(|j| j != i && sigma[i] == ring.var(j) && sigma[j] == x) {
            return Err(unsupported(format!("sigma({}) is not ±{0} or another variable", ring.names()[i])));
        }
    }
    let m = names.len();
    let mut gen_sigma = vec![0; m];
    let mut psi = vec![RatPoly::zero(n); m];
    for i in 0..n {
        let r = lift_index[i];
        psi[r] = ring.var(i);
        if sign_vars.contains(&i) {
            gen_sigma[r] = r + 1;
            gen_sigma[r + 1] = r;
            psi[r + 1] = ring.var(i).neg();
        } else {
            let j = (0..n).find(|&j| sigma[i] == ring.var(j)).unwrap();
            gen_sigma[r] = lift_index[j];
        }
    }
    let res_sigma: Vec<RatPoly> = gen_sigma.iter().map(|&j| RatPoly::var(m, j)).collect();
    let resolvent = InvolutiveRing::polynomial(ring.base(), names.clone(), res_sigma)?.with_weights(weights);

    // y^(2j) -> (-y y_σ)^j and y^(2j+1) -> y (-y y_σ)^j on sign variables
    let lift = |p: &RatPoly| -> RatPoly {
        let mut out = RatPoly::zero(m);
        for (mono, c) in p.terms() {
            let mut t = RatPoly::constant(m, c.clone());
            for (i, &e) in mono.iter().enumerate() {
                let v = RatPoly::var(m, lift_index[i]);
                if sign_vars.contains(&i) {
                    let pair = v.mul(&RatPoly::var(m, lift_index[i] + 1)).neg();
                    t = t.mul(&pair.pow(e / 2));
                    if e % 2 == 1 {
                        t = t.mul(&v);
                    }
                } else {
                    t = t.mul(&v.pow(e));
                }
            }
            out = out.add(&t);
        }
        out
    };

    let mut rel_names = Vec::new();
    let mut rel_lifts = Vec::new();
    for (k, &i) in sign_vars.iter().enumerate() {
        let r = lift_index[i];
        rel_names.push(if sign_vars.len() == 1 { "z".to_string() } else { format!("z_{}", k + 1) });
        rel_lifts.push(RatPoly::var(m, r).add(&RatPoly::var(m, r + 1)));
    }
    let relations = ring.relations();
    for (k, r) in relations.iter().enumerate() {
        let l = lift(r);
        if resolvent.apply_sigma(&l) != l {
            return Err(unsupported(format!("relation {} does not lift to an invariant relation", ring.fmt(r))));
        }
        rel_names.push(if relations.len() == 1 { "w".to_string() } else { format!("w_{}", k + 1) });
        rel_lifts.push(l);
    }
    let rel_images: Vec<Vec<RatPoly>> = rel_lifts.iter().map(|l| (0..m).map(|j| l.derivative(j)).collect()).collect();

    let to_b = |p: &RatPoly| ring.nf(&p.substitute(n, &psi));
    let mut expr: Vec<FormVec> = (0..m)
        .map(|j| (0..m).map(|k| if j == k { RatPoly::one(n) } else { RatPoly::zero(n) }).collect())
        .collect();
    let mut rels: Vec<FormVec> = rel_images.iter().map(|v| v.iter().map(to_b).collect()).collect();
    let mut eliminated = BTreeSet::new();
    let base = ring.base();
    for k in 0..rels.len() {
        let r = rels[k].clone();
        let pivot = (0..m).rev().find(|&g| {
            !eliminated.contains(&g) && r[g].is_constant() && !r[g].is_zero() && is_unit(base, &r[g].constant_term())
        });
        let Some(g) = pivot else { continue };
        let inv = -(Rational::one() / r[g].constant_term());
        let apply = |v: &mut FormVec| {
            if v[g].is_zero() {
                return;
            }
            let f = v[g].scale(&inv);
            for h in 0..m {
                v[h] = ring.nf(&v[h].add(&ring.mul(&f, &r[h])));
            }
        };
        expr.iter_mut().for_each(apply);
        rels.iter_mut().for_each(apply);
        eliminated.insert(g);
    }
    let reduced_gens: Vec<usize> = (0..m).filter(|g| !eliminated.contains(g)).collect();
    let restrict = |v: &FormVec| reduced_gens.iter().map(|&g| v[g].clone()).collect::<FormVec>();
    let expr: Vec<FormVec> = expr.iter().map(restrict).collect();
    let reduced_relations: Vec<FormVec> = rels.iter().map(restrict).filter(|v| v.iter().any(|p| !p.is_zero())).collect();

    let mut c = CotangentPresentation {
        algebra: b.clone(),
        resolvent,
        psi,
        lift_index,
        gen_sigma,
        rel_names,
        rel_lifts,
        rel_images,
        reduced_gens,
        expr,
        reduced_relations,
        module_gb: Vec::new(),
    };
    c.module_gb = c.build_module_gb();
    Ok(c)
}

fn is_unit(base: BaseRing, c: &Rational) -> bool {
    match base {
        BaseRing::Q => !c.is_zero(),
        BaseRing::Z | BaseRing::ZMod(_) => c.abs().is_one(),
        BaseRing::ZHalf => {
            let mut n = c.numer().abs();
            let two = Integer::from(2);
            while !n.is_zero() && (&n % &two).is_zero() {
                n /= &two;
            }
            n.is_one() && base.contains(c)
        }
    }
}

fn wedge_sign(set: &BTreeSet<usize>, h: usize, left: bool) -> Option<i64> {
    if set.contains(&h) {
        return None;
    }
    let passes = if left { set.iter().filter(|&&s| s < h).count() } else { set.iter().filter(|&&s| s > h).count() };
    Some(if passes % 2 == 0 { 1 } else { -1 })
}

type Form = BTreeMap<Vec<usize>, RatPoly>;

impl CotangentPresentation {
    pub fn algebra(&self) -> &TambaraPresentation {
        &self.algebra
    }

    pub fn resolvent(&self) -> &InvolutiveRing {
        &self.resolvent
    }

    fn ring(&self) -> &InvolutiveRing {
        self.algebra.under()
    }

    /// Names of the generator differentials, in resolvent order.
    pub fn generator_names(&self) -> Vec<String> {
        self.resolvent.names().iter().map(|s| format!("d{}", s)).collect()
    }

    pub fn reduced_generator_names(&self) -> Vec<String> {
        let all = self.generator_names();
        self.reduced_gens.iter().map(|&g| all[g].clone()).collect()
    }

    /// sigma(dg) = d(sigma g) on the resolvent generators.
    pub fn generator_sigma(&self) -> &[usize] {
        &self.gen_sigma
    }

    /// Images of the resolvent variables in the underlying ring.
    pub fn psi(&self) -> &[RatPoly] {
        &self.psi
    }

    pub fn relation_names(&self) -> &[String] {
        &self.rel_names
    }

    /// The lifted relations, as polynomials in the resolvent.
    pub fn relation_lifts(&self) -> &[RatPoly] {
        &self.rel_lifts
    }

    /// `d r` with coefficients in the resolvent, one per generator.
    pub fn relation_image(&self, k: usize) -> &[RatPoly] {
        &self.rel_images[k]
    }

    pub fn reduced_relations(&self) -> &[FormVec] {
        &self.reduced_relations
    }

    /// Free on the reduced generators.
    pub fn is_free(&self) -> bool {
        self.reduced_relations.is_empty()
    }

    fn fmt_combination(&self, names: &[String], coeffs: &[RatPoly], fmt: impl Fn(&RatPoly) -> String) -> String {
        let mut out = String::new();
        for (name, c) in names.iter().zip(coeffs) {
            if c.is_zero() {
                continue;
            }
            let s = fmt(c);
            let (neg, body) = if c.len() == 1 {
                match s.strip_prefix('-') {
                    Some(rest) => (true, rest.to_string()),
                    None => (false, s),
                }
            } else {
                (false, format!("({})", s))
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if body == "1" {
                out.push_str(name);
            } else {
                out.push_str(&format!("{}*{}", body, name));
            }
        }
        if out.is_empty() {
            "0".into()
        } else {
            out
        }
    }

    /// "dw ↦ -y_σ*dy - y*dy_σ + ..." in the resolvent.
    pub fn fmt_relation(&self, k: usize) -> String {
        let names = self.generator_names();
        let body = self.fmt_combination(&names, &self.rel_images[k], |p| self.resolvent.fmt(p));
        format!("d{} ↦ {}", self.rel_names[k], body)
    }

    pub fn fmt_form(&self, v: &[RatPoly]) -> String {
        self.fmt_combination(&self.reduced_generator_names(), v, |p| self.ring().fmt(p))
    }

    /// sigma(dg) for each reduced generator, in the reduced generators.
    pub fn reduced_sigma(&self) -> Vec<FormVec> {
        self.reduced_gens.iter().map(|&g| self.expr[self.gen_sigma[g]].clone()).collect()
    }

    /// Semilinear involution on 1-forms.
    pub fn sigma_form(&self, v: &[RatPoly]) -> FormVec {
        let ring = self.ring();
        let k = self.reduced_gens.len();
        let mut out = vec![RatPoly::zero(ring.nvars()); k];
        for (a, s) in v.iter().zip(self.reduced_sigma()) {
            let a = ring.apply_sigma(a);
            for h in 0..k {
                out[h] = ring.add(&out[h], &ring.mul(&a, &s[h]));
            }
        }
        out
    }

    /// The universal derivation of an element of the underlying ring.
    pub fn d(&self, a: &RatPoly) -> FormVec {
        let ring = self.ring();
        let k = self.reduced_gens.len();
        let mut out = vec![RatPoly::zero(ring.nvars()); k];
        for i in 0..ring.nvars() {
            let da = a.derivative(i);
            if da.is_zero() {
                continue;
            }
            let e = &self.expr[self.lift_index[i]];
            for h in 0..k {
                out[h] = ring.add(&out[h], &ring.mul(&da, &e[h]));
            }
        }
        out
    }

    /// The generator dg of the resolvent, in reduced form.
    pub fn generator(&self, g: usize) -> FormVec {
        self.expr[g].clone()
    }

    fn module_vars(&self) -> (usize, usize) {
        (self.reduced_gens.len(), self.ring().nvars())
    }

    fn build_module_gb(&self) -> Vec<RatPoly> {
        let (k, n) = self.module_vars();
        let pos: Vec<usize> = (k..k + n).collect();
        let mut gens: Vec<RatPoly> = self.ring().groebner().iter().map(|g| g.embed(k + n, &pos)).collect();
        for a in 0..k {
            for b in a..k {
                gens.push(RatPoly::var(k + n, a).mul(&RatPoly::var(k + n, b)));
            }
        }
        for r in &self.reduced_relations {
            gens.push(self.to_module_poly(r));
        }
        groebner_basis(&gens)
    }

    fn to_module_poly(&self, v: &[RatPoly]) -> RatPoly {
        let (k, n) = self.module_vars();
        let pos: Vec<usize> = (k..k + n).collect();
        let mut out = RatPoly::zero(k + n);
        for (a, c) in v.iter().enumerate() {
            out = out.add(&c.embed(k + n, &pos).mul(&RatPoly::var(k + n, a)));
        }
        out
    }

    fn from_module_poly(&self, p: &RatPoly) -> FormVec {
        let (k, n) = self.module_vars();
        let mut out = vec![RatPoly::zero(n); k];
        for (mono, c) in p.terms() {
            let a = (0..k).find(|&a| mono[a] == 1).expect("element is linear in the generators");
            out[a].add_term(mono[k..].to_vec(), c.clone());
        }
        out
    }

    /// Normal form of a 1-form in the underlying level of the module.
    pub fn nf(&self, v: &[RatPoly]) -> FormVec {
        self.from_module_poly(&reduce(&self.to_module_poly(v), &self.module_gb))
    }

    pub fn is_zero(&self, v: &[RatPoly]) -> bool {
        self.nf(v).iter().all(|p| p.is_zero())
    }

    pub fn is_invariant(&self, v: &[RatPoly]) -> bool {
        let s = self.sigma_form(v);
        self.is_zero(&s.iter().zip(v).map(|(a, b)| a.sub(b)).collect::<Vec<_>>())
    }

    fn generator_weight(&self, a: usize) -> u32 {
        self.resolvent.weights()[self.reduced_gens[a]]
    }

    /// Rational basis of the underlying level in weight `w`: standard
    /// monomials times generators.
    pub fn underlying_basis(&self, w: u32) -> Vec<(Monomial, usize)> {
        let (k, n) = self.module_vars();
        let mut weights: Vec<u32> = (0..k).map(|a| self.generator_weight(a)).collect();
        weights.extend_from_slice(self.ring().weights());
        monomials_of_weight(k + n, &weights, w)
            .into_iter()
            .filter(|m| m[..k].iter().sum::<u32>() == 1 && is_standard(&self.module_gb, m))
            .map(|m| ((m[k..]).to_vec(), (0..k).find(|&a| m[a] == 1).unwrap()))
            .collect()
    }

    fn coords(&self, basis: &[(Monomial, usize)], v: &[RatPoly]) -> Vec<Rational> {
        let v = self.nf(v);
        basis.iter().map(|(m, a)| v[*a].coeff(m)).collect()
    }

    fn sigma_on_basis(&self, basis: &[(Monomial, usize)]) -> RatMatrix {
        let n = self.ring().nvars();
        let k = self.reduced_gens.len();
        let cols = basis
            .iter()
            .map(|(m, a)| {
                let mut v = vec![RatPoly::zero(n); k];
                v[*a] = self.ring().monomial(m);
                self.coords(basis, &self.sigma_form(&v))
            })
            .collect();
        RatMatrix::from_cols(cols, basis.len())
    }

    /// Ranks of the underlying and fixed levels in weight `w`; the fixed level
    /// is the sigma-invariants, restriction being injective.
    pub fn level_ranks(&self, w: u32) -> (usize, usize) {
        let basis = self.underlying_basis(w);
        let s = self.sigma_on_basis(&basis);
        let fixed = basis.len() - rank(&s.sub(&RatMatrix::identity(basis.len())));
        (fixed, basis.len())
    }

    /// Weight-`w` Mackey functor of a free module over Z.
    pub fn mackey_piece(&self, w: u32) -> Result<MackeyFunctor, DifferentialsError> {
        if !self.is_free() {
            return Err(DifferentialsError::NotSmoothPresentation(self.fmt_reduced()));
        }
        let basis = self.underlying_basis(w);
        let s = integral(&self.sigma_on_basis(&basis))?;
        Ok(MackeyFunctor::fixed_point_mackey(&FgAbGroup::free(basis.len()), &s)?)
    }

    /// Spanning set of the fixed level over the fixed ring when 2 is
    /// invertible: the invariant parts of u * dg with u running over products
    /// of the non-trivial variables with exponents at most one.
    pub fn fixed_generators(&self) -> Vec<FormVec> {
        let ring = self.ring();
        let n = ring.nvars();
        let moving: Vec<usize> = (0..n).filter(|&i| ring.sigma_images()[i] != ring.var(i)).collect();
        let mut us = vec![RatPoly::one(n)];
        for &i in &moving {
            let v = ring.var(i);
            us = us.iter().flat_map(|u| [u.clone(), u.mul(&v)]).collect();
        }
        let k = self.reduced_gens.len();
        let half = ratio(1, 2);
        let mut out: Vec<FormVec> = Vec::new();
        for u in &us {
            for a in 0..k {
                let mut v = vec![RatPoly::zero(n); k];
                v[a] = ring.nf(u);
                let s = self.sigma_form(&v);
                let p = self.nf(&v.iter().zip(&s).map(|(x, y)| x.add(y).scale(&half)).collect::<Vec<_>>());
                if p.iter().any(|c| !c.is_zero()) && !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// Underlying level: `R{dg..}/(relations)` with the action on generators.
    pub fn fmt_reduced(&self) -> String {
        let ring = self.ring();
        let rels: Vec<String> = ring.relations().iter().map(|r| ring.fmt(r)).collect();
        let algebra = if rels.is_empty() {
            format!("{}[{}]", ring.base(), ring.names().join(","))
        } else {
            format!("{}[{}]/({})", ring.base(), ring.names().join(","), rels.join(", "))
        };
        let gens = self.reduced_generator_names();
        let mut out = format!("{}{{{}}}", algebra, gens.join(", "));
        if !self.reduced_relations.is_empty() {
            let rels: Vec<String> = self.reduced_relations.iter().map(|r| self.fmt_form(r)).collect();
            out.push_str(&format!("/({})", rels.join(", ")));
        }
        out
    }

    pub fn fmt_sigma(&self) -> String {
        let gens = self.reduced_generator_names();
        let parts: Vec<String> =
            self.reduced_sigma().iter().zip(&gens).map(|(s, g)| format!("{} ↦ {}", g, self.fmt_form(s))).collect();
        parts.join(", ")
    }

    /// Differential forms of degree `i` and weight `w` with the geometric
    /// involution. Requires a free module.
    fn forms(&self, i: usize, w: u32) -> Vec<(Monomial, Vec<usize>)> {
        let k = self.reduced_gens.len();
        let ring = self.ring();
        let mut out = Vec::new();
        for set in subsets(k, i) {
            let sw: u32 = set.iter().map(|&a| self.generator_weight(a)).sum();
            if sw > w {
                continue;
            }
            for m in ring.standard_monomials(w - sw) {
                out.push((m, set.clone()));
            }
        }
        out
    }

    fn form_coords(&self, basis: &[(Monomial, Vec<usize>)], f: &Form) -> Result<Vec<Rational>, DifferentialsError> {
        let mut v = vec![Rational::zero(); basis.len()];
        for (set, c) in f {
            for (m, a) in self.ring().nf(c).terms() {
                let j = basis
                    .iter()
                    .position(|(bm, bs)| bm == m && bs == set)
                    .ok_or_else(|| DifferentialsError::UnsupportedPresentation("forms are not weight homogeneous".into()))?;
                v[j] += a.clone();
            }
        }
        Ok(v)
    }

    fn wedge_left(&self, one: &[RatPoly], f: &Form) -> Form {
        let ring = self.ring();
        let mut out: Form = BTreeMap::new();
        for (set, c) in f {
            let s: BTreeSet<usize> = set.iter().copied().collect();
            for (h, a) in one.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let Some(sign) = wedge_sign(&s, h, true) else { continue };
                let mut t = s.clone();
                t.insert(h);
                let key: Vec<usize> = t.into_iter().collect();
                let term = ring.mul(a, c).scale(&Rational::from_integer(sign.into()));
                let e = out.entry(key).or_insert_with(|| RatPoly::zero(ring.nvars()));
                *e = ring.add(e, &term);
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// Geometric involution on a basic form m dg_S.
    fn sigma_geom(&self, m: &Monomial, set: &[usize]) -> Form {
        let ring = self.ring();
        let sig = self.reduced_sigma();
        let mut f: Form = BTreeMap::new();
        f.insert(Vec::new(), ring.apply_sigma(&ring.monomial(m)));
        for &a in set.iter().rev() {
            f = self.wedge_left(&sig[a], &f);
        }
        f
    }

    fn d_form(&self, m: &Monomial, set: &[usize]) -> Form {
        let ring = self.ring();
        let mut f: Form = BTreeMap::new();
        f.insert(set.to_vec(), RatPoly::one(ring.nvars()));
        self.wedge_left(&self.d(&ring.monomial(m)), &f)
    }

    fn geometric_sigma_matrix(&self, basis: &[(Monomial, Vec<usize>)]) -> Result<RatMatrix, DifferentialsError> {
        let cols = basis.iter().map(|(m, s)| self.form_coords(basis, &self.sigma_geom(m, s))).collect::<Result<Vec<_>, _>>()?;
        Ok(RatMatrix::from_cols(cols, basis.len()))
    }

    /// Weight-`w` Mackey functor of the i-th exterior power with the
    /// geometric action.
    pub fn exterior_piece(&self, i: usize, w: u32) -> Result<MackeyFunctor, DifferentialsError> {
        if !self.is_free() {
            return Err(DifferentialsError::NotSmoothPresentation(self.fmt_reduced()));
        }
        let basis = self.forms(i, w);
        let s = integral(&self.geometric_sigma_matrix(&basis)?)?;
        Ok(MackeyFunctor::fixed_point_mackey(&FgAbGroup::free(basis.len()), &s)?)
    }
}

fn integral(m: &RatMatrix) -> Result<IntMatrix, DifferentialsError> {
    let mut out = IntMatrix::zeros(m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let c = &m[(i, j)];
            if !c.is_integer() {
                return Err(DifferentialsError::UnsupportedPresentation(format!("non-integral entry {}", fmt_rational(c))));
            }
            out[(i, j)] = c.to_integer();
        }
    }
    Ok(out)
}

fn subsets(k: usize, i: usize) -> Vec<Vec<usize>> {
    if i == 0 {
        return vec![Vec::new()];
    }
    if i > k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for first in 0..k {
        for rest in subsets(k, i - 1) {
            if rest.first().is_none_or(|&r| r > first) {
                let mut s = vec![first];
                s.extend(rest);
                out.push(s);
            }
        }
    }
    out
}

/// de Rham complex of a smooth presentation, split by internal weight.
#[derive(Clone, Debug)]
pub struct DeRhamComplex {
    cotangent: CotangentPresentation,
    i_max: usize,
}

pub fn de_rham_complex(b: &TambaraPresentation, i_max: usize) -> Result<DeRhamComplex, DifferentialsError> {
    let cotangent = cotangent_module(b)?;
    if !cotangent.is_free() {
        return Err(DifferentialsError::NotSmoothPresentation(cotangent.fmt_reduced()));
    }
    if !b.under().is_graded() {
        return Err(DifferentialsError::UnsupportedPresentation("de Rham pieces need a weight grading".into()));
    }
    Ok(DeRhamComplex { cotangent, i_max })
}

impl DeRhamComplex {
    pub fn cotangent(&self) -> &CotangentPresentation {
        &self.cotangent
    }

    pub fn i_max(&self) -> usize {
        self.i_max
    }

    /// Basis of Omega^i in weight `w`: standard monomial and sorted generator
    /// indices.
    pub fn basis(&self, i: usize, w: u32) -> Vec<(Monomial, Vec<usize>)> {
        self.cotangent.forms(i, w)
    }

    pub fn fmt_basis_element(&self, m: &Monomial, set: &[usize]) -> String {
        let ring = self.cotangent.ring();
        let names = self.cotangent.reduced_generator_names();
        let mono = ring.fmt(&ring.monomial(m));
        if set.is_empty() {
            return mono;
        }
        let wedge: Vec<String> = set.iter().map(|&a| names[a].clone()).collect();
        if mono == "1" {
            wedge.join("∧")
        } else {
            format!("{}*{}", mono, wedge.join("∧"))
        }
    }

    /// Matrix of d: Omega^i_w -> Omega^{i+1}_w.
    pub fn differential(&self, i: usize, w: u32) -> Result<RatMatrix, DifferentialsError> {
        let src = self.basis(i, w);
        let tgt = self.basis(i + 1, w);
        let cols = src.iter().map(|(m, s)| self.cotangent.form_coords(&tgt, &self.cotangent.d_form(m, s))).collect::<Result<Vec<_>, _>>()?;
        Ok(RatMatrix::from_cols(cols, tgt.len()))
    }

    /// Geometric involution sigma(a dg) = sigma(a) d(sigma g) on Omega^i_w.
    pub fn geometric_sigma(&self, i: usize, w: u32) -> Result<RatMatrix, DifferentialsError> {
        self.cotangent.geometric_sigma_matrix(&self.basis(i, w))
    }

    /// The involutive complex in weight `w`: the action on Omega^i is
    /// (-1)^i times the geometric one, so that d is antilinear.
    pub fn piece(&self, w: u32) -> Result<InvolutiveCochainComplex, DifferentialsError> {
        let mut sigma = BTreeMap::new();
        let mut d = BTreeMap::new();
        for i in 0..=self.i_max {
            let s = integral(&self.geometric_sigma(i, w)?)?;
            sigma.insert(i as i64, if i % 2 == 1 { s.neg() } else { s });
            if i < self.i_max {
                d.insert(i as i64, integral(&self.differential(i, w)?)?);
            }
        }
        InvolutiveCochainComplex::new(sigma, d, Convention::Antilinear)
    }
}

/// One comparison of `gr^i HR(B)` with `LSym_i` of the suspended cotangent
/// module, in weight `w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HkrRow {
    pub i: usize,
    pub weight: u32,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HkrReport {
    pub rows: Vec<HkrRow>,
}

impl HkrReport {
    pub fn agrees(&self) -> bool {
        self.rows.iter().all(|r| r.agree)
    }

    pub fn mismatches(&self) -> Vec<&HkrRow> {
        self.rows.iter().filter(|r| !r.agree).collect()
    }
}

/// `LSym_i(Sigma^sigma L)` in weight `w` for a free cotangent module: the
/// i-th exterior power, suspended i times by the sign sphere.
pub fn lsym_piece(l: &CotangentPresentation, i: usize, w: u32) -> Result<MackeyComplex, DifferentialsError> {
    if i == 0 {
        return Ok(MackeyComplex::concentrated(weight_piece(l.ring(), w, 1)?, 0));
    }
    let e = l.exterior_piece(i, w)?;
    Ok(suspend_sigma(&MackeyComplex::concentrated(e, 0), i as i64))
}

/// Levelwise homology comparison of `gr^i HR(B)` against `LSym_i(Sigma^sigma
/// L)` for `i <= i_max` and weights up to `max_weight`.
pub fn check_hkr(b: &TambaraPresentation, i_max: usize, max_weight: u32) -> Result<HkrReport, DifferentialsError> {
    let l = cotangent_module(b)?;
    let mut rows = Vec::new();
    for i in 0..=i_max {
        for w in 0..=max_weight {
            let lhs = hr_graded_piece(b, i, w)?;
            let rhs = lsym_piece(&l, i, w)?;
            let lo = -1;
            let hi = 2 * i as i64 + 2;
            let agree = (lo..=hi).all(|n| lhs.homology(n).is_isomorphic(&rhs.homology(n)));
            rows.push(HkrRow { i, weight: w, agree });
        }
    }
    Ok(HkrReport { rows })
}
