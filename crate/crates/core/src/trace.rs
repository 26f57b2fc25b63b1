//! Hochschild, cyclic and dihedral homology of presented algebras with
//! involution, and the graded pieces of real Hochschild homology for the two
//! free monogenic algebras.
//!
//! Chain complexes are the normalized ones, split by internal weight, with
//! matrices over Q. Columns are source basis vectors.

use std::collections::HashMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::abelian::FgAbGroup;
use crate::complexes::{suspend_sigma, MackeyComplex};
use crate::mackey::MackeyFunctor;
use crate::matrix::{nullspace, rank, RatMatrix};
use crate::poly::{Monomial, RatPoly};
use crate::scalar::{ratio, Rational};
use crate::tambara::{BaseRing, InvolutiveRing, TambaraError, TambaraPresentation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("truncation n_max = {0} is below 1")]
    TruncationTooSmall(usize),
    #[error("2 is not invertible in the base ring")]
    TwoNotInvertible,
    #[error("unsupported algebra: {0}")]
    UnsupportedAlgebra(String),
    #[error("{0} fails in degree {1}")]
    IdentityFails(&'static str, usize),
    #[error(transparent)]
    Tambara(#[from] TambaraError),
}

/// Presented commutative algebra with involution, truncated in internal
/// weight. Homology is computed rationally.
#[derive(Clone, Debug, PartialEq)]
pub struct InvolutiveAlgebra {
    ring: InvolutiveRing,
    max_weight: u32,
}

impl InvolutiveAlgebra {
    pub fn new(ring: InvolutiveRing, max_weight: u32) -> Result<Self, TraceError> {
        if let BaseRing::ZMod(m) = ring.base() {
            return Err(TraceError::UnsupportedAlgebra(format!("base Z/{}", m)));
        }
        ring.check_sigma_stable()?;
        ring.check_involution()?;
        ring.pieces(max_weight)?;
        Ok(InvolutiveAlgebra { ring, max_weight })
    }

    /// Polynomial algebra over Q on the given variables with the given
    /// images under the involution.
    pub fn polynomial(names: &[&str], sigma: Vec<RatPoly>, max_weight: u32) -> Result<Self, TraceError> {
        let ring = InvolutiveRing::polynomial(BaseRing::Q, names.iter().map(|s| s.to_string()).collect(), sigma)?;
        Self::new(ring, max_weight)
    }

    pub fn ring(&self) -> &InvolutiveRing {
        &self.ring
    }

    pub fn max_weight(&self) -> u32 {
        self.max_weight
    }

    pub fn two_invertible(&self) -> bool {
        self.ring.base().two_invertible()
    }

    /// Weights computed: each weight up to the bound for graded algebras,
    /// `None` for a finite ungraded one.
    pub fn weights(&self) -> Vec<Option<u32>> {
        self.ring.pieces(self.max_weight).expect("checked at construction").into_iter().map(|(w, _)| w).collect()
    }
}

type Tensor = Vec<Monomial>;

fn sign(e: usize) -> Rational {
    if e.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Normalized Hochschild complex of one weight, with the dihedral involution
/// and the Connes operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DihedralComplex {
    weight: Option<u32>,
    n_max: usize,
    bases: Vec<Vec<Tensor>>,
    b: Vec<RatMatrix>,
    omega: Vec<RatMatrix>,
    connes: Vec<RatMatrix>,
}

struct Builder {
    index: Vec<HashMap<Tensor, usize>>,
}

impl Builder {
    fn is_unit(m: &Monomial) -> bool {
        m.iter().all(|&e| e == 0)
    }

    /// Adds `coeff * f_0 (x) ... (x) f_n` to `col`, dropping tensors with a
    /// scalar in a positive slot.
    fn accumulate(&self, col: &mut [Rational], factors: &[RatPoly], coeff: &Rational) {
        let n = factors.len() - 1;
        let terms: Vec<Vec<(&Monomial, &Rational)>> = factors.iter().map(|f| f.terms().collect()).collect();
        if terms.iter().any(|t| t.is_empty()) {
            return;
        }
        let mut idx = vec![0usize; factors.len()];
        loop {
            let skip = (1..=n).any(|i| Self::is_unit(terms[i][idx[i]].0));
            if !skip {
                let t: Tensor = (0..=n).map(|i| terms[i][idx[i]].0.clone()).collect();
                let mut c = coeff.clone();
                for i in 0..=n {
                    c *= terms[i][idx[i]].1;
                }
                let j = *self.index[n].get(&t).expect("operators preserve weight");
                col[j] += c;
            }
            let mut k = 0;
            loop {
                if k > n {
                    return;
                }
                idx[k] += 1;
                if idx[k] < terms[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
}

impl DihedralComplex {
    fn build(a: &InvolutiveAlgebra, weight: Option<u32>, monos: &[Monomial], n_max: usize) -> Self {
        let ring = &a.ring;
        let top = n_max + 1;
        let mut bases: Vec<Vec<Tensor>> = Vec::with_capacity(top + 1);
        for n in 0..=top {
            let mut out = Vec::new();
            match weight {
                Some(w) => {
                    let by_weight: Vec<Vec<Monomial>> = (0..=w).map(|d| ring.standard_monomials(d)).collect();
                    let mut cur = Vec::new();
                    tensors_of_weight(&by_weight, n, w, &mut cur, &mut out);
                }
                None => {
                    let reduced: Vec<Monomial> = monos.iter().filter(|m| !Builder::is_unit(m)).cloned().collect();
                    let mut acc: Vec<Tensor> = monos.iter().map(|m| vec![m.clone()]).collect();
                    for _ in 0..n {
                        acc = acc
                            .into_iter()
                            .flat_map(|t| {
                                reduced.iter().map(move |m| {
                                    let mut t = t.clone();
                                    t.push(m.clone());
                                    t
                                })
                            })
                            .collect();
                    }
                    out = acc;
                }
            }
            out.sort();
            bases.push(out);
        }
        let builder = Builder {
            index: bases.iter().map(|b| b.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect()).collect(),
        };
        let mono = |m: &Monomial| ring.monomial(m);
        let nv = ring.nvars();
        let mut b = vec![RatMatrix::zeros(0, bases[0].len())];
        for n in 1..=top {
            let mut cols = Vec::with_capacity(bases[n].len());
            for t in &bases[n] {
                let mut col = vec![Rational::zero(); bases[n - 1].len()];
                let f: Vec<RatPoly> = t.iter().map(mono).collect();
                for i in 0..n {
                    let mut g: Vec<RatPoly> = f[..i].to_vec();
                    g.push(ring.mul(&f[i], &f[i + 1]));
                    g.extend_from_slice(&f[i + 2..]);
                    builder.accumulate(&mut col, &g, &sign(i));
                }
                let mut g = vec![ring.mul(&f[n], &f[0])];
                g.extend_from_slice(&f[1..n]);
                builder.accumulate(&mut col, &g, &sign(n));
                cols.push(col);
            }
            b.push(RatMatrix::from_cols(cols, bases[n - 1].len()));
        }
        let mut omega = Vec::with_capacity(top + 1);
        for n in 0..=top {
            let s = sign(n * (n + 1) / 2);
            let mut cols = Vec::with_capacity(bases[n].len());
            for t in &bases[n] {
                let mut col = vec![Rational::zero(); bases[n].len()];
                let mut g = vec![ring.apply_sigma(&mono(&t[0]))];
                g.extend(t[1..].iter().rev().map(|m| ring.apply_sigma(&mono(m))));
                builder.accumulate(&mut col, &g, &s);
                cols.push(col);
            }
            omega.push(RatMatrix::from_cols(cols, bases[n].len()));
        }
        let mut connes = Vec::with_capacity(top);
        for n in 0..top {
            let mut cols = Vec::with_capacity(bases[n].len());
            for t in &bases[n] {
                let mut col = vec![Rational::zero(); bases[n + 1].len()];
                if !Builder::is_unit(&t[0]) {
                    for i in 0..=n {
                        let mut g = vec![RatPoly::one(nv)];
                        g.extend(t[i..].iter().map(mono));
                        g.extend(t[..i].iter().map(mono));
                        builder.accumulate(&mut col, &g, &sign(n * i));
                    }
                }
                cols.push(col);
            }
            connes.push(RatMatrix::from_cols(cols, bases[n + 1].len()));
        }
        DihedralComplex { weight, n_max, bases, b, omega, connes }
    }

    pub fn weight(&self) -> Option<u32> {
        self.weight
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self, n: usize) -> usize {
        self.bases[n].len()
    }

    pub fn basis(&self, n: usize) -> &[Vec<Monomial>] {
        &self.bases[n]
    }

    /// `b: C_n -> C_{n-1}`, zero-row for `n = 0`.
    pub fn b(&self, n: usize) -> &RatMatrix {
        &self.b[n]
    }

    pub fn omega(&self, n: usize) -> &RatMatrix {
        &self.omega[n]
    }

    /// `B: C_n -> C_{n+1}`.
    pub fn connes(&self, n: usize) -> &RatMatrix {
        &self.connes[n]
    }

    /// b^2 = 0, omega b = b omega, omega^2 = 1, B^2 = 0, bB + Bb = 0 and
    /// omega B = -B omega in every computed degree.
    pub fn check_identities(&self) -> Result<(), TraceError> {
        let top = self.n_max + 1;
        for n in 0..=top {
            let id = RatMatrix::identity(self.dim(n));
            if self.omega[n].mul(&self.omega[n]) != id {
                return Err(TraceError::IdentityFails("omega^2 = 1", n));
            }
            if n >= 1 && self.omega[n - 1].mul(&self.b[n]) != self.b[n].mul(&self.omega[n]) {
                return Err(TraceError::IdentityFails("omega b = b omega", n));
            }
            if n >= 2 && !self.b[n - 1].mul(&self.b[n]).is_zero() {
                return Err(TraceError::IdentityFails("b^2 = 0", n));
            }
        }
        for n in 0..top {
            if n + 1 < top && !self.connes[n + 1].mul(&self.connes[n]).is_zero() {
                return Err(TraceError::IdentityFails("B^2 = 0", n));
            }
            let bb = self.b[n + 1].mul(&self.connes[n]);
            let anti = if n >= 1 { bb.add(&self.connes[n - 1].mul(&self.b[n])) } else { bb };
            if !anti.is_zero() {
                return Err(TraceError::IdentityFails("bB + Bb = 0", n));
            }
            if self.omega[n + 1].mul(&self.connes[n]) != self.connes[n].mul(&self.omega[n]).neg() {
                return Err(TraceError::IdentityFails("omega B = -B omega", n));
            }
        }
        Ok(())
    }

    /// Hochschild homology dimensions in degrees `0..=n_max`.
    pub fn homology_dims(&self) -> Vec<usize> {
        (0..=self.n_max)
            .map(|n| self.dim(n) - rank(&self.b[n]) - rank(&self.b[n + 1]))
            .collect()
    }

    /// Projectors `e = (1 + omega)/2` and `1 - e` in each degree.
    pub fn split_plus_minus(&self) -> (Vec<RatMatrix>, Vec<RatMatrix>) {
        let half = ratio(1, 2);
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for w in &self.omega {
            let id = RatMatrix::identity(w.rows());
            plus.push(id.add(w).scale(&half));
            minus.push(id.sub(w).scale(&half));
        }
        (plus, minus)
    }

    /// Homology of the subcomplex spanned by the columns of `spans`.
    pub fn sub_homology_dims(&self, spans: &[RatMatrix]) -> Vec<usize> {
        (0..=self.n_max)
            .map(|n| {
                let cycles = rank(&spans[n]) - rank(&self.b[n].mul(&spans[n]));
                cycles - rank(&self.b[n + 1].mul(&spans[n + 1]))
            })
            .collect()
    }

    /// Dimension of the image of `e` acting on homology, computed from
    /// cycles and boundaries of the whole complex.
    pub fn eigen_image_on_homology(&self, e: &[RatMatrix]) -> Vec<usize> {
        (0..=self.n_max)
            .map(|n| {
                let z = nullspace(&self.b[n]);
                let bd = &self.b[n + 1];
                rank(&e[n].mul(&z).hstack(bd)) - rank(bd)
            })
            .collect()
    }

    /// Total complex of the (b, B) bicomplex in degree `n`: columns
    /// `C_{n-2p}` for `p = 0, 1, ...`.
    fn tot_blocks(&self, n: usize) -> Vec<(usize, usize)> {
        (0..=n / 2).map(|p| (p, n - 2 * p)).collect()
    }

    fn tot_dim(&self, n: usize) -> usize {
        self.tot_blocks(n).iter().map(|&(_, q)| self.dim(q)).sum()
    }

    /// Differential `b + B` of the total complex, `Tot_n -> Tot_{n-1}`.
    pub fn tot_differential(&self, n: usize) -> RatMatrix {
        let src = self.tot_blocks(n);
        if n == 0 {
            return RatMatrix::zeros(0, self.tot_dim(0));
        }
        let tgt = self.tot_blocks(n - 1);
        let offset = |blocks: &[(usize, usize)], p: usize| -> Option<usize> {
            let mut o = 0;
            for &(pp, q) in blocks {
                if pp == p {
                    return Some(o);
                }
                o += self.dim(q);
            }
            None
        };
        let mut d = RatMatrix::zeros(self.tot_dim(n - 1), self.tot_dim(n));
        let mut c0 = 0;
        for &(p, q) in &src {
            if q >= 1 {
                if let Some(r0) = offset(&tgt, p) {
                    d.set_block(r0, c0, &self.b[q]);
                }
            }
            if p >= 1 {
                if let Some(r0) = offset(&tgt, p - 1) {
                    d.set_block(r0, c0, &self.connes[q]);
                }
            }
            c0 += self.dim(q);
        }
        d
    }

    /// Involution `(-1)^p omega` on column `p` of the total complex.
    pub fn tot_omega(&self, n: usize) -> RatMatrix {
        let mut out = RatMatrix::zeros(self.tot_dim(n), self.tot_dim(n));
        let mut o = 0;
        for (p, q) in self.tot_blocks(n) {
            let w = if p % 2 == 0 { self.omega[q].clone() } else { self.omega[q].neg() };
            out.set_block(o, o, &w);
            o += self.dim(q);
        }
        out
    }

    /// Cyclic homology dimensions in degrees `0..=n_max`.
    pub fn cyclic_dims(&self) -> Vec<usize> {
        (0..=self.n_max)
            .map(|n| self.tot_dim(n) - rank(&self.tot_differential(n)) - rank(&self.tot_differential(n + 1)))
            .collect()
    }

    /// Dihedral and skew-dihedral homology dimensions `(HD, HD')`.
    pub fn dihedral_dims(&self) -> (Vec<usize>, Vec<usize>) {
        let half = ratio(1, 2);
        let part = |s: i64| -> Vec<usize> {
            (0..=self.n_max)
                .map(|n| {
                    let proj = |k: usize| {
                        let w = self.tot_omega(k);
                        let id = RatMatrix::identity(w.rows());
                        if s > 0 { id.add(&w) } else { id.sub(&w) }.scale(&half)
                    };
                    let (e, e1) = (proj(n), proj(n + 1));
                    let cycles = rank(&e) - rank(&self.tot_differential(n).mul(&e));
                    cycles - rank(&self.tot_differential(n + 1).mul(&e1))
                })
                .collect()
        };
        (part(1), part(-1))
    }

    /// Checks that `(-1)^p omega` commutes with `b + B`.
    pub fn check_tot_involution(&self) -> Result<(), TraceError> {
        for n in 1..=self.n_max + 1 {
            let d = self.tot_differential(n);
            if self.tot_omega(n - 1).mul(&d) != d.mul(&self.tot_omega(n)) {
                return Err(TraceError::IdentityFails("Omega (b + B) = (b + B) Omega", n));
            }
        }
        Ok(())
    }
}

fn tensors_of_weight(by_weight: &[Vec<Monomial>], n: usize, left: u32, cur: &mut Tensor, out: &mut Vec<Tensor>) {
    let slot = cur.len();
    if slot == n + 1 {
        if left == 0 {
            out.push(cur.clone());
        }
        return;
    }
    // positive slots live in the augmentation ideal
    let lo = if slot == 0 { 0 } else { 1 };
    let range = if slot == n { left..=left } else { lo..=left };
    for d in range.filter(|&d| d >= lo) {
        for m in &by_weight[d as usize] {
            cur.push(m.clone());
            tensors_of_weight(by_weight, n, left - d, cur, out);
            cur.pop();
        }
    }
}

/// Normalized Hochschild complexes of every weight, with the dihedral
/// involution `(-1)^{n(n+1)/2}` times reversal of the non-initial factors.
pub fn hochschild_complex(a: &InvolutiveAlgebra, n_max: usize) -> Result<Vec<DihedralComplex>, TraceError> {
    if n_max < 1 {
        return Err(TraceError::TruncationTooSmall(n_max));
    }
    let pieces = a.ring.pieces(a.max_weight)?;
    Ok(pieces.iter().map(|(w, monos)| DihedralComplex::build(a, *w, monos, n_max)).collect())
}

/// Dimensions per weight, degrees `0..=n_max`.
pub type DimTable = Vec<(Option<u32>, Vec<usize>)>;

/// Sum over weights of the degree-`n` entries.
pub fn total_dim(table: &DimTable, n: usize) -> usize {
    table.iter().map(|(_, d)| d.get(n).copied().unwrap_or(0)).sum()
}

fn require_two(a: &InvolutiveAlgebra) -> Result<(), TraceError> {
    if a.two_invertible() {
        Ok(())
    } else {
        Err(TraceError::TwoNotInvertible)
    }
}

/// HH of the underlying algebra, the underlying homotopy of HR.
pub fn hr_underlying(a: &InvolutiveAlgebra, n_max: usize) -> Result<DimTable, TraceError> {
    Ok(hochschild_complex(a, n_max)?.iter().map(|c| (c.weight(), c.homology_dims())).collect())
}

/// Homology of the `+` and `-` summands of the Hochschild complex.
pub fn split_homology(a: &InvolutiveAlgebra, n_max: usize) -> Result<(DimTable, DimTable), TraceError> {
    require_two(a)?;
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for c in hochschild_complex(a, n_max)? {
        let (ep, em) = c.split_plus_minus();
        plus.push((c.weight(), c.sub_homology_dims(&ep)));
        minus.push((c.weight(), c.sub_homology_dims(&em)));
    }
    Ok((plus, minus))
}

/// `HH^+`, the homotopy of the fixed points of HR when 2 is invertible.
pub fn hr_fixed_points(a: &InvolutiveAlgebra, n_max: usize) -> Result<DimTable, TraceError> {
    Ok(split_homology(a, n_max)?.0)
}

/// Image of `e = (1 + omega)/2` on HH, computed on homology classes.
pub fn hh_plus_on_homology(a: &InvolutiveAlgebra, n_max: usize) -> Result<DimTable, TraceError> {
    require_two(a)?;
    Ok(hochschild_complex(a, n_max)?
        .iter()
        .map(|c| (c.weight(), c.eigen_image_on_homology(&c.split_plus_minus().0)))
        .collect())
}

pub fn cyclic_homology(a: &InvolutiveAlgebra, n_max: usize) -> Result<DimTable, TraceError> {
    Ok(hochschild_complex(a, n_max)?.iter().map(|c| (c.weight(), c.cyclic_dims())).collect())
}

/// `(HD, HD')` from the split (b, B) bicomplex.
pub fn dihedral_homology(a: &InvolutiveAlgebra, n_max: usize) -> Result<(DimTable, DimTable), TraceError> {
    require_two(a)?;
    let mut hd = Vec::new();
    let mut hd1 = Vec::new();
    for c in hochschild_complex(a, n_max)? {
        let (p, m) = c.dihedral_dims();
        hd.push((c.weight(), p));
        hd1.push((c.weight(), m));
    }
    Ok((hd, hd1))
}

/// The two free monogenic algebras with a chain model for HR.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monogenic {
    /// One variable with trivial involution.
    Trivial,
    /// x and x_sigma swapped.
    FreeOrbit,
}

pub fn classify_monogenic(b: &TambaraPresentation) -> Result<Monogenic, TraceError> {
    let ring = b.under();
    let unsupported = || TraceError::UnsupportedAlgebra("expected k[x] with trivial involution or k[x, x_sigma]".into());
    if ring.base() != BaseRing::Z || !ring.relations().is_empty() || ring.weights().iter().any(|&w| w != 1) {
        return Err(unsupported());
    }
    let sigma = ring.sigma_images();
    match ring.nvars() {
        1 if sigma[0] == ring.var(0) => Ok(Monogenic::Trivial),
        2 if sigma[0] == ring.var(1) && sigma[1] == ring.var(0) => Ok(Monogenic::FreeOrbit),
        _ => Err(unsupported()),
    }
}

/// Fixed-point Mackey functor of the weight-`w` part of `ring`.
pub fn weight_piece(ring: &InvolutiveRing, w: u32, twist: i64) -> Result<MackeyFunctor, TraceError> {
    let monos = ring.standard_monomials(w);
    let sigma = ring.sigma_matrix(&monos)?;
    let sigma = if twist < 0 { sigma.neg() } else { sigma };
    MackeyFunctor::fixed_point_mackey(&FgAbGroup::free(monos.len()), &sigma).map_err(|e| TraceError::Tambara(e.into()))
}

/// Graded piece `gr^i` of HR(B) in internal weight `w`, from the norm
/// resolution base-changed along the augmentation: every induced
/// differential vanishes, so each piece is a single shifted term.
pub fn hr_graded_piece(b: &TambaraPresentation, i: usize, w: u32) -> Result<MackeyComplex, TraceError> {
    let ring = b.under();
    let kind = classify_monogenic(b)?;
    let c = match (kind, i) {
        (_, 0) => MackeyComplex::concentrated(weight_piece(ring, w, 1)?, 0),
        (Monogenic::Trivial, 1) if w >= 1 => {
            // k[x] dx in weight w, suspended by the sign sphere
            suspend_sigma(&MackeyComplex::concentrated(weight_piece(ring, w - 1, 1)?, 0), 1)
        }
        (Monogenic::FreeOrbit, 1) if w >= 1 => {
            // k[x, x_sigma]{dx, dx_sigma}, free on the orbit of dx
            let monos = ring.standard_monomials(w - 1);
            let s = ring.sigma_matrix(&monos)?;
            let n = monos.len();
            let mut sigma = crate::matrix::IntMatrix::zeros(2 * n, 2 * n);
            sigma.set_block(n, 0, &s);
            sigma.set_block(0, n, &s);
            let m = MackeyFunctor::fixed_point_mackey(&FgAbGroup::free(2 * n), &sigma).map_err(TambaraError::from)?;
            MackeyComplex::concentrated(m, 1)
        }
        (Monogenic::FreeOrbit, 2) if w >= 2 => {
            suspend_sigma(&MackeyComplex::concentrated(weight_piece(ring, w - 2, 1)?, 0), 1).shift(1)
        }
        _ => MackeyComplex::zero(),
    };
    Ok(c)
}

/// Rational HH dimensions of the underlying polynomial algebra of a
/// monogenic `B`, from the bar complex.
pub fn underlying_algebra(b: &TambaraPresentation, max_weight: u32) -> Result<InvolutiveAlgebra, TraceError> {
    classify_monogenic(b)?;
    let ring = b.under();
    let q = InvolutiveRing::polynomial(BaseRing::Q, ring.names().to_vec(), ring.sigma_images().to_vec())?;
    InvolutiveAlgebra::new(q, max_weight)
}

/// HKR consistency at the underlying level: the rank of the underlying
/// homology of `sum_i gr^i` in degree `n`, weight `w`, against the bar
/// complex, for all `n <= n_max` and `w <= max_weight`. Returns the first
/// mismatch `(n, w, graded, bar)`.
pub fn hkr_underlying_mismatch(b: &TambaraPresentation, n_max: usize, max_weight: u32) -> Result<Option<(usize, u32, usize, usize)>, TraceError> {
    let bar = hr_underlying(&underlying_algebra(b, max_weight)?, n_max)?;
    for (w, dims) in bar {
        let w = w.expect("polynomial algebras are graded");
        for (n, &expected) in dims.iter().enumerate() {
            let mut got = 0;
            for i in 0..=n_max + 1 {
                got += hr_graded_piece(b, i, w)?.underlying_homology(n as i64).free_rank();
            }
            if got != expected {
                return Ok(Some((n, w, got, expected)));
            }
        }
    }
    Ok(None)
}
