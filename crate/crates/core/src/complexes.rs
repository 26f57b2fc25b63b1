//! Bounded chain complexes of Mackey functors: homology, box products of
//! complexes, sign-sphere shifts, graded norms and regular-slice checks.
//!
//! Differentials lower degree by one: `d_n: C_n -> C_{n-1}`.

use std::collections::BTreeMap;

use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::abelian::{cokernel, subquotient, AbMap, FgAbGroup};
use crate::mackey::{section, MackeyError, MackeyFunctor, MackeyMap};
use crate::matrix::IntMatrix;
use crate::scalar::Integer;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("not a complex: d o d is nonzero at degree {0}")]
    NotAComplex(i64),
    #[error("differential at degree {0} does not match the terms")]
    Mismatch(i64),
    #[error("chain-level geometric fixed points need terms that are sums of Z and Z[C2]")]
    NotFreeTerms,
    #[error("graded input at weight {0} is not free")]
    NotFree(i64),
    #[error("involution at weight {0} is not a signed permutation of order two")]
    NotSignedPermutation(i64),
    #[error("coconnectivity criterion needs n <= 0, got {0}")]
    PositiveDegree(i64),
    #[error(transparent)]
    Mackey(#[from] MackeyError),
}

/// Bounded complex of abelian groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupComplex {
    pub groups: BTreeMap<i64, FgAbGroup>,
    /// `d_n` as a matrix from `groups[n]` to `groups[n - 1]`.
    pub diffs: BTreeMap<i64, IntMatrix>,
}

impl GroupComplex {
    pub fn group(&self, n: i64) -> FgAbGroup {
        self.groups.get(&n).cloned().unwrap_or_else(FgAbGroup::zero)
    }

    pub fn diff(&self, n: i64) -> AbMap {
        let (s, t) = (self.group(n), self.group(n - 1));
        let m = self.diffs.get(&n).cloned().unwrap_or_else(|| IntMatrix::zeros(t.ngens(), s.ngens()));
        AbMap::new_unchecked(s, t, m)
    }

    pub fn homology(&self, n: i64) -> FgAbGroup {
        crate::abelian::homology_at(&self.diff(n + 1), &self.diff(n)).expect("valid complex")
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.groups.keys().copied().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MackeyComplex {
    terms: BTreeMap<i64, MackeyFunctor>,
    diffs: BTreeMap<i64, MackeyMap>,
}

impl MackeyComplex {
    /// Validates terms, differentials and `d o d = 0`. Missing differentials
    /// are zero.
    pub fn new(
        terms: BTreeMap<i64, MackeyFunctor>,
        diffs: BTreeMap<i64, MackeyMap>,
    ) -> Result<Self, ComplexError> {
        let c = Self::new_unchecked(terms, diffs);
        c.validate()?;
        Ok(c)
    }

    pub fn new_unchecked(terms: BTreeMap<i64, MackeyFunctor>, diffs: BTreeMap<i64, MackeyMap>) -> Self {
        MackeyComplex { terms, diffs }
    }

    pub fn validate(&self) -> Result<(), ComplexError> {
        for t in self.terms.values() {
            t.validate()?;
        }
        for (&n, d) in &self.diffs {
            if d.source() != &self.term(n) || d.target() != &self.term(n - 1) {
                return Err(ComplexError::Mismatch(n));
            }
            d.validate()?;
        }
        for &n in self.diffs.keys() {
            if !self.diff(n - 1).compose(&self.diff(n)).is_zero() {
                return Err(ComplexError::NotAComplex(n));
            }
        }
        Ok(())
    }

    pub fn zero() -> Self {
        Self::new_unchecked(BTreeMap::new(), BTreeMap::new())
    }

    /// `m` in degree `n`.
    pub fn concentrated(m: MackeyFunctor, n: i64) -> Self {
        Self::new_unchecked(BTreeMap::from([(n, m)]), BTreeMap::new())
    }

    /// Two-term complex `f: C_n -> C_{n-1}`.
    pub fn two_term(f: MackeyMap, n: i64) -> Result<Self, ComplexError> {
        let terms = BTreeMap::from([(n, f.source().clone()), (n - 1, f.target().clone())]);
        Self::new(terms, BTreeMap::from([(n, f)]))
    }

    pub fn term(&self, n: i64) -> MackeyFunctor {
        self.terms.get(&n).cloned().unwrap_or_else(MackeyFunctor::zero)
    }

    pub fn terms(&self) -> &BTreeMap<i64, MackeyFunctor> {
        &self.terms
    }

    pub fn diff(&self, n: i64) -> MackeyMap {
        self.diffs.get(&n).cloned().unwrap_or_else(|| MackeyMap::zero(&self.term(n), &self.term(n - 1)))
    }

    /// Degrees carrying a term, lowest first.
    pub fn degrees(&self) -> Vec<i64> {
        self.terms.keys().copied().collect()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Levelwise homology with induced restriction, transfer and action.
    pub fn homology(&self, n: i64) -> MackeyFunctor {
        let (d_in, d_out) = (self.diff(n + 1), self.diff(n));
        let sf = subquotient(&d_in.fixed_map(), &d_out.fixed_map()).expect("valid complex");
        let su = subquotient(&d_in.underlying_map(), &d_out.underlying_map()).expect("valid complex");
        let t = self.term(n);
        let res = sf.induced(&su, t.res());
        let tr = su.induced(&sf, t.tr());
        let sigma = su.induced(&su, t.sigma());
        MackeyFunctor::new_unchecked(sf.group, su.group, res, tr, sigma)
    }

    pub fn underlying_homology(&self, n: i64) -> FgAbGroup {
        let (d_in, d_out) = (self.diff(n + 1), self.diff(n));
        crate::abelian::homology_at(&d_in.underlying_map(), &d_out.underlying_map()).expect("valid complex")
    }

    pub fn fixed_homology(&self, n: i64) -> FgAbGroup {
        let (d_in, d_out) = (self.diff(n + 1), self.diff(n));
        crate::abelian::homology_at(&d_in.fixed_map(), &d_out.fixed_map()).expect("valid complex")
    }

    /// Degrees with nonzero homology.
    pub fn homology_support(&self) -> Vec<i64> {
        self.degrees().into_iter().filter(|&n| !self.homology(n).is_zero()).collect()
    }

    /// `Sigma^k`: degrees move up by `k` and differentials pick up `(-1)^k`.
    pub fn shift(&self, k: i64) -> Self {
        let terms = self.terms.iter().map(|(&n, t)| (n + k, t.clone())).collect();
        let sign = if k.is_even() { 1 } else { -1 };
        let diffs = self.diffs.iter().map(|(&n, d)| (n + k, d.scale(sign))).collect();
        Self::new_unchecked(terms, diffs)
    }

    /// All terms in minimal presentation, with differentials conjugated.
    pub fn simplify(&self) -> Self {
        let mut maps = BTreeMap::new();
        let mut terms = BTreeMap::new();
        for (&n, t) in &self.terms {
            let (s, m) = t.simplify_with_maps();
            terms.insert(n, s);
            maps.insert(n, m);
        }
        let mut diffs = BTreeMap::new();
        for (&n, d) in &self.diffs {
            let [_, f_from, _, u_from] = &maps[&n];
            let [f_to, _, u_to, _] = &maps[&(n - 1)];
            let fixed = f_to.mul(d.fixed()).mul(f_from);
            let under = u_to.mul(d.underlying()).mul(u_from);
            diffs.insert(n, MackeyMap::new_unchecked(terms[&n].clone(), terms[&(n - 1)].clone(), fixed, under));
        }
        Self::new_unchecked(terms, diffs)
    }

    /// Levelwise dual complex, `(C^*)_{-n} = (C_n)^*`, using the internal hom
    /// into the constant functor on `Z`.
    pub fn dual(&self) -> Result<Self, ComplexError> {
        let mut terms = BTreeMap::new();
        for (&n, t) in &self.terms {
            terms.insert(-n, t.dual()?);
        }
        let mut diffs = BTreeMap::new();
        for (&n, d) in &self.diffs {
            let dd = dual_map(d, &terms[&(1 - n)], &terms[&(-n)])?;
            diffs.insert(1 - n, dd);
        }
        Ok(Self::new_unchecked(terms, diffs))
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut degrees: Vec<i64> = self.degrees();
        degrees.extend(other.degrees());
        degrees.sort_unstable();
        degrees.dedup();
        let terms = degrees.iter().map(|&n| (n, self.term(n).direct_sum(&other.term(n)))).collect();
        let diffs = degrees.iter().map(|&n| (n, self.diff(n).direct_sum(&other.diff(n)))).collect();
        let mut c = Self::new_unchecked(terms, diffs);
        c.prune_diffs();
        c
    }

    fn prune_diffs(&mut self) {
        let keys: Vec<i64> = self.diffs.keys().copied().collect();
        for n in keys {
            if !self.terms.contains_key(&n) || !self.terms.contains_key(&(n - 1)) {
                self.diffs.remove(&n);
            }
        }
    }

    /// Chain-level geometric fixed points: levelwise `coker(tr)`. Only defined
    /// when every term is a sum of `Z` and `Z[C2]`.
    pub fn phi_complex(&self) -> Result<GroupComplex, ComplexError> {
        if !self.terms.values().all(MackeyFunctor::is_free_orbit_sum) {
            return Err(ComplexError::NotFreeTerms);
        }
        let mut groups = BTreeMap::new();
        let mut projs = BTreeMap::new();
        for (&n, t) in &self.terms {
            let (q, p) = cokernel(&t.tr_map()).expect("transfer is well defined");
            groups.insert(n, q);
            projs.insert(n, p.matrix().clone());
        }
        let mut diffs = BTreeMap::new();
        for (&n, d) in &self.diffs {
            let m = projs[&(n - 1)].mul(d.fixed()).mul(&section(&projs[&n]));
            diffs.insert(n, m);
        }
        Ok(GroupComplex { groups, diffs })
    }
}

/// Dual of a map `f: M -> N` as a map `N^* -> M^*`; `src` and `tgt` are the
/// already computed duals.
fn dual_map(f: &MackeyMap, src: &MackeyFunctor, tgt: &MackeyFunctor) -> Result<MackeyMap, ComplexError> {
    let m = f.source().underlying().simplify();
    let n = f.target().underlying().simplify();
    let fu = n.to.mul(f.underlying()).mul(&m.from).transpose();
    // src^e = Hom(N^e, Z) and tgt^e = Hom(M^e, Z) in the dual bases
    let fixed = crate::mackey::factor_through(tgt.underlying(), tgt.res(), &fu.mul(src.res()))
        .ok_or(ComplexError::Mismatch(0))?;
    Ok(MackeyMap::new_unchecked(src.clone(), tgt.clone(), fixed, fu))
}

/// Reduced cellular complex of `S^sigma` with constant coefficients:
/// `Z[C2] -> Z` in degrees 1, 0, fixed differential `2`, underlying fold.
pub fn sign_sphere_cells() -> MackeyComplex {
    let d = MackeyMap::new_unchecked(
        MackeyFunctor::free_orbit(),
        MackeyFunctor::constant_z(),
        IntMatrix::from_i64(&[&[2]]),
        IntMatrix::from_i64(&[&[1, 1]]),
    );
    MackeyComplex::two_term(d, 1).expect("cell complex is valid")
}

/// Dual of [`sign_sphere_cells`], in degrees 0, -1: a model of `S^{-sigma}`.
pub fn dual_sign_sphere_cells() -> MackeyComplex {
    sign_sphere_cells().dual().expect("cells are torsion free")
}

/// `S^{k sigma}` smashed with `c`, for any integer `k`.
pub fn suspend_sigma(c: &MackeyComplex, k: i64) -> MackeyComplex {
    let cell = if k >= 0 { sign_sphere_cells() } else { dual_sign_sphere_cells() };
    let mut out = c.clone();
    for _ in 0..k.unsigned_abs() {
        out = box_complex(&out, &cell);
    }
    out
}

/// `S^{k rho}` smashed with `c`, with `rho = 1 + sigma`.
pub fn suspend_rho(c: &MackeyComplex, k: i64) -> MackeyComplex {
    suspend_sigma(c, k).shift(k)
}

/// Model of `S^{n sigma}` smashed with the constant functor on `Z`.
pub fn sign_sphere(n: i64) -> MackeyComplex {
    suspend_sigma(&MackeyComplex::concentrated(MackeyFunctor::constant_z(), 0), n)
}

/// Total complex of the levelwise box product, with the Koszul sign
/// `d(x y) = dx y + (-1)^p x dy`, terms simplified.
pub fn box_complex(c: &MackeyComplex, d: &MackeyComplex) -> MackeyComplex {
    let (Some(c0), Some(c1), Some(d0), Some(d1)) = (c.min_degree(), c.max_degree(), d.min_degree(), d.max_degree())
    else {
        return MackeyComplex::zero();
    };
    let pairs = |n: i64| -> Vec<(i64, i64)> {
        (c0..=c1)
            .filter(|p| c.terms.contains_key(p) && d.terms.contains_key(&(n - p)))
            .map(|p| (p, n - p))
            .collect()
    };
    let mut terms = BTreeMap::new();
    let mut layouts: BTreeMap<i64, Vec<((i64, i64), usize, usize)>> = BTreeMap::new();
    for n in c0 + d0..=c1 + d1 {
        let ps = pairs(n);
        if ps.is_empty() {
            continue;
        }
        let mut parts = Vec::new();
        let mut layout = Vec::new();
        let (mut fo, mut uo) = (0, 0);
        for &(p, q) in &ps {
            let b = c.term(p).box_product_raw(&d.term(q));
            layout.push(((p, q), fo, uo));
            fo += b.fixed().ngens();
            uo += b.underlying().ngens();
            parts.push(b);
        }
        terms.insert(n, MackeyFunctor::direct_sum_all(&parts));
        layouts.insert(n, layout);
    }
    let mut diffs = BTreeMap::new();
    for (&n, layout) in &layouts {
        let Some(lower) = layouts.get(&(n - 1)) else {
            continue;
        };
        let (src, tgt): (&MackeyFunctor, &MackeyFunctor) = (&terms[&n], &terms[&(n - 1)]);
        let mut fixed = IntMatrix::zeros(tgt.fixed().ngens(), src.fixed().ngens());
        let mut under = IntMatrix::zeros(tgt.underlying().ngens(), src.underlying().ngens());
        for &((p, q), fo, uo) in layout {
            for &((p2, q2), fo2, uo2) in lower {
                let block = if (p2, q2) == (p - 1, q) {
                    c.diff(p).box_product_raw(&MackeyMap::identity(&d.term(q)))
                } else if (p2, q2) == (p, q - 1) {
                    let sign = if p.is_even() { 1 } else { -1 };
                    MackeyMap::identity(&c.term(p)).box_product_raw(&d.diff(q)).scale(sign)
                } else {
                    continue;
                };
                fixed.set_block(fo2, fo, block.fixed());
                under.set_block(uo2, uo, block.underlying());
            }
        }
        diffs.insert(n, MackeyMap::new_unchecked(src.clone(), tgt.clone(), fixed, under));
    }
    MackeyComplex::new_unchecked(terms, diffs).simplify()
}

fn ceil_half(n: i64) -> i64 {
    num_integer::Integer::div_ceil(&n, &2)
}

fn floor_half(n: i64) -> i64 {
    num_integer::Integer::div_floor(&n, &2)
}

/// Regular-slice `n`-connectivity: underlying homology vanishes below `n`
/// and the chain-level geometric fixed points vanish below `ceil(n / 2)`.
pub fn is_regular_slice_connective(c: &MackeyComplex, n: i64) -> Result<bool, ComplexError> {
    let phi = c.phi_complex()?;
    let under_ok = c.degrees().into_iter().filter(|&k| k < n).all(|k| c.underlying_homology(k).is_trivial());
    let phi_ok = phi.degrees().into_iter().filter(|&k| k < ceil_half(n)).all(|k| phi.homology(k).is_trivial());
    Ok(under_ok && phi_ok)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoconnectiveVerdict {
    Fails,
    PassesNecessaryConditions,
}

/// Necessary conditions for regular-slice `n`-coconnectivity (`n <= 0`):
/// underlying homology vanishes above `n` and fixed-level homology above
/// `floor(n / 2)`.
pub fn is_regular_slice_coconnective(c: &MackeyComplex, n: i64) -> Result<CoconnectiveVerdict, ComplexError> {
    if n > 0 {
        return Err(ComplexError::PositiveDegree(n));
    }
    if !c.terms.values().all(MackeyFunctor::is_free_orbit_sum) {
        return Err(ComplexError::NotFreeTerms);
    }
    let under_ok = c.degrees().into_iter().filter(|&k| k > n).all(|k| c.underlying_homology(k).is_trivial());
    let fixed_ok = c.degrees().into_iter().filter(|&k| k > floor_half(n)).all(|k| c.fixed_homology(k).is_trivial());
    Ok(if under_ok && fixed_ok { CoconnectiveVerdict::PassesNecessaryConditions } else { CoconnectiveVerdict::Fails })
}

/// Graded abelian group with an involution in each weight.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradedInvolutive {
    pub pieces: BTreeMap<i64, (FgAbGroup, IntMatrix)>,
}

impl GradedInvolutive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, weight: i64, group: FgAbGroup, tau: IntMatrix) -> Self {
        self.pieces.insert(weight, (group, tau));
        self
    }

    /// `Z^rank` in one weight with the identity involution.
    pub fn trivial(weight: i64, rank: usize) -> Self {
        Self::new().with(weight, FgAbGroup::free(rank), IntMatrix::identity(rank))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradedMackeyModule {
    pub pieces: BTreeMap<i64, MackeyFunctor>,
}

impl GradedMackeyModule {
    pub fn piece(&self, weight: i64) -> MackeyFunctor {
        self.pieces.get(&weight).cloned().unwrap_or_else(MackeyFunctor::zero)
    }
}

/// Sign rule for swapping tensor factors in the norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormConvention {
    /// Plain swap.
    Day,
    /// Swap with `(-1)^{ij}` on weights `i`, `j`; odd-weight norms satisfy
    /// `n(a) = -n(sigma a)`.
    Koszul,
}

/// Norm class of a basis element of the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormEntry {
    pub weight: i64,
    pub generator: usize,
    /// `n(a)` in the fixed level of the weight `2 * weight` piece.
    pub norm: Vec<Integer>,
    /// `n(tau a)`, computed with `n(-x) = -n(x)` under the Koszul convention
    /// in odd weight, and `n(-x) = n(x)` otherwise.
    pub norm_of_tau: Vec<Integer>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedNorm {
    pub module: GradedMackeyModule,
    pub convention: NormConvention,
    pub norms: Vec<NormEntry>,
}

impl GradedNorm {
    /// `n(a) + n(tau a) = 0` in the fixed level.
    pub fn koszul_sign_holds(&self, e: &NormEntry) -> bool {
        let piece = self.module.piece(2 * e.weight);
        let sum: Vec<Integer> = e.norm.iter().zip(&e.norm_of_tau).map(|(a, b)| a + b).collect();
        piece.fixed().is_zero_elem(&sum)
    }

    /// Entries in odd weight, where the Koszul rule applies.
    pub fn odd_entries(&self) -> impl Iterator<Item = &NormEntry> {
        self.norms.iter().filter(|e| e.weight.is_odd())
    }
}

/// Signed permutation `tau e_a = delta_a e_{pi(a)}`.
fn signed_permutation(tau: &IntMatrix) -> Option<(Vec<usize>, Vec<i64>)> {
    let n = tau.cols();
    let mut pi = vec![0; n];
    let mut delta = vec![0; n];
    for a in 0..n {
        let nz: Vec<usize> = (0..n).filter(|&i| !tau[(i, a)].is_zero()).collect();
        if nz.len() != 1 || !tau[(nz[0], a)].abs().is_one() {
            return None;
        }
        pi[a] = nz[0];
        delta[a] = if tau[(nz[0], a)].is_positive() { 1 } else { -1 };
    }
    let involutive = (0..n).all(|a| pi[pi[a]] == a && delta[a] * delta[pi[a]] == 1);
    involutive.then_some((pi, delta))
}

/// Norm of a graded free abelian group with involution. The weight-`m`
/// underlying piece is the sum of `B_i (x) B_j` over `i + j = m`, with
/// `sigma(a (x) b) = eps * tau b (x) tau a`. Free orbits give induced
/// summands; a fixed tensor `a (x) tau a` gives a norm class `n(a)` and a
/// transfer class, forming a Burnside-type summand when `sigma` fixes it
/// and a summand with zero restriction when `sigma` negates it.
pub fn graded_norm(b: &GradedInvolutive, convention: NormConvention) -> Result<GradedNorm, ComplexError> {
    let mut basis: BTreeMap<i64, (usize, Vec<usize>, Vec<i64>)> = BTreeMap::new();
    for (&w, (g, tau)) in &b.pieces {
        if !g.is_free() {
            return Err(ComplexError::NotFree(w));
        }
        let s = g.simplify();
        let t = s.to.mul(tau).mul(&s.from);
        let (pi, delta) = signed_permutation(&t).ok_or(ComplexError::NotSignedPermutation(w))?;
        if s.group.ngens() > 0 {
            basis.insert(w, (s.group.ngens(), pi, delta));
        }
    }
    let eps = |i: i64, j: i64| -> i64 {
        match convention {
            NormConvention::Koszul if (i * j).is_odd() => -1,
            _ => 1,
        }
    };
    let mut module = GradedMackeyModule::default();
    let mut norms = Vec::new();
    let (Some(&lo), Some(&hi)) = (basis.keys().next(), basis.keys().next_back()) else {
        return Ok(GradedNorm { module, convention, norms });
    };
    for m in 2 * lo..=2 * hi {
        let mut tensors: Vec<(i64, usize, i64, usize)> = Vec::new();
        for (&i, (ri, _, _)) in &basis {
            if let Some((rj, _, _)) = basis.get(&(m - i)) {
                for a in 0..*ri {
                    for bb in 0..*rj {
                        tensors.push((i, a, m - i, bb));
                    }
                }
            }
        }
        if tensors.is_empty() {
            continue;
        }
        let index: BTreeMap<(i64, usize, i64, usize), usize> =
            tensors.iter().enumerate().map(|(k, &t)| (t, k)).collect();
        let len = tensors.len();
        let image = |t: (i64, usize, i64, usize)| -> (usize, i64) {
            let (i, a, j, bb) = t;
            let (_, pi_i, d_i) = &basis[&i];
            let (_, pi_j, d_j) = &basis[&j];
            let s = eps(i, j) * d_i[a] * d_j[bb];
            (index[&(j, pi_j[bb], i, pi_i[a])], s)
        };
        let mut sigma = IntMatrix::zeros(len, len);
        for (k, &t) in tensors.iter().enumerate() {
            let (k2, s) = image(t);
            sigma[(k2, k)] = Integer::from(s);
        }

        // fixed generators
        enum Gen {
            Orbit(usize),
            Norm(usize),
            Transfer(usize),
        }
        let mut gens: Vec<Gen> = Vec::new();
        let mut tr_cols: Vec<(usize, usize, i64)> = Vec::new();
        let mut norm_gen: BTreeMap<usize, usize> = BTreeMap::new();
        let mut torsion_rows: Vec<usize> = Vec::new();
        for (k, &t) in tensors.iter().enumerate() {
            let (k2, s) = image(t);
            if k2 == k {
                norm_gen.insert(k, gens.len());
                gens.push(Gen::Norm(k));
                tr_cols.push((k, gens.len(), 1));
                if s < 0 {
                    torsion_rows.push(gens.len());
                }
                gens.push(Gen::Transfer(k));
            } else if k < k2 {
                tr_cols.push((k, gens.len(), 1));
                tr_cols.push((k2, gens.len(), s));
                gens.push(Gen::Orbit(k));
            }
        }
        let nf = gens.len();
        let mut tr = IntMatrix::zeros(nf, len);
        for &(k, g, s) in &tr_cols {
            tr[(g, k)] = Integer::from(s);
        }
        let mut res = IntMatrix::zeros(len, nf);
        for (g, gen) in gens.iter().enumerate() {
            match *gen {
                Gen::Orbit(k) => {
                    res[(k, g)] += Integer::one();
                    let (k2, s) = image(tensors[k]);
                    res[(k2, g)] += Integer::from(s);
                }
                Gen::Norm(k) => {
                    let (_, s) = image(tensors[k]);
                    if s > 0 {
                        let (i, a, _, _) = tensors[k];
                        res[(k, g)] = Integer::from(basis[&i].2[a]);
                    }
                }
                Gen::Transfer(k) => {
                    let (_, s) = image(tensors[k]);
                    if s > 0 {
                        res[(k, g)] = Integer::from(2);
                    }
                }
            }
        }
        let mut rels: Vec<Vec<Integer>> = Vec::new();
        for &g in &torsion_rows {
            let mut r = vec![Integer::zero(); nf];
            r[g] = Integer::from(2);
            rels.push(r);
        }
        // Koszul identification n(tau a) = -n(a) on the norm classes of odd
        // weight, using n(-x) = -n(x) on classes with zero restriction
        let half = m / 2;
        let koszul_odd = convention == NormConvention::Koszul && m.is_even() && half.is_odd();
        if koszul_odd {
            if let Some((r, pi, delta)) = basis.get(&half) {
                for a in 0..*r {
                    let ka = index[&(half, a, half, pi[a])];
                    let kb = index[&(half, pi[a], half, pi[pi[a]])];
                    let mut row = vec![Integer::zero(); nf];
                    row[norm_gen[&ka]] += Integer::one();
                    row[norm_gen[&kb]] += Integer::from(delta[a]);
                    rels.push(row);
                }
            }
        }
        let fixed = FgAbGroup::new(nf, IntMatrix::from_rows_sized(rels.len(), nf, rels));
        let piece = MackeyFunctor::new_unchecked(fixed, FgAbGroup::free(len), res, tr, sigma);
        if m.is_even() {
            if let Some((r, pi, delta)) = basis.get(&half) {
                for a in 0..*r {
                    let ka = index[&(half, a, half, pi[a])];
                    let kb = index[&(half, pi[a], half, pi[pi[a]])];
                    let mut norm = vec![Integer::zero(); nf];
                    norm[norm_gen[&ka]] = Integer::one();
                    let tau_sign = if koszul_odd { delta[a] } else { 1 };
                    let mut norm_of_tau = vec![Integer::zero(); nf];
                    norm_of_tau[norm_gen[&kb]] = Integer::from(tau_sign);
                    norms.push(NormEntry { weight: half, generator: a, norm, norm_of_tau });
                }
            }
        }
        module.pieces.insert(m, piece);
    }
    Ok(GradedNorm { module, convention, norms })
}
