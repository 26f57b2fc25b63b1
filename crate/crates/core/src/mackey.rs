//! C2-Mackey functors as Lewis diagrams: two levels, restriction, transfer and
//! the Weyl action, together with maps, constructors, box products and duals.
//!
//! Element and matrix conventions follow [`crate::abelian`]: maps act on
//! ambient column vectors, so `res` is `underlying.ngens() x fixed.ngens()`.

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::abelian::{cokernel, kernel, AbMap, AbelianError, FgAbGroup, IntSolver};
use crate::matrix::IntMatrix;
use crate::scalar::Integer;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axiom {
    Involution,
    ResInvariant,
    TrInvariant,
    DoubleCoset,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::Involution => "sigma o sigma = 1",
            Axiom::ResInvariant => "sigma o res = res",
            Axiom::TrInvariant => "tr o sigma = tr",
            Axiom::DoubleCoset => "res o tr = 1 + sigma",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MackeyError {
    #[error("{axiom} fails on generator {generator}: difference {witness:?}")]
    Axiom { axiom: Axiom, generator: usize, witness: Vec<Integer> },
    #[error("sigma is not an involution")]
    NotInvolution,
    #[error("dual needs torsion-free levels")]
    TorsionNotSupported,
    #[error("map does not commute with {0}")]
    NotNatural(&'static str),
    #[error(transparent)]
    Abelian(#[from] AbelianError),
}

/// First source generator on which `a` and `b` differ, with the reduced
/// difference.
fn first_difference(a: &IntMatrix, b: &IntMatrix, target: &FgAbGroup) -> Option<(usize, Vec<Integer>)> {
    let d = a.sub(b);
    (0..d.cols()).find_map(|j| {
        let v = target.reduce(&d.col(j));
        if v.iter().all(Zero::is_zero) {
            None
        } else {
            Some((j, v))
        }
    })
}

/// Right inverse of a surjection given by `proj` on ambient coordinates.
pub(crate) fn section(proj: &IntMatrix) -> IntMatrix {
    let solver = IntSolver::new(proj);
    let n = proj.rows();
    let cols = (0..n)
        .map(|j| {
            let mut e = vec![Integer::zero(); n];
            e[j] = Integer::one();
            solver.solve(&e).expect("projection onto minimal generators is split")
        })
        .collect();
    IntMatrix::from_cols(cols, proj.cols())
}

/// Factors `m` (ambient target coordinates of `group`) through an injection
/// `incl: sub -> group`.
pub(crate) fn factor_through(group: &FgAbGroup, incl: &IntMatrix, m: &IntMatrix) -> Option<IntMatrix> {
    let solver = group.preimage_solver(incl);
    let cols = m.col_vecs().iter().map(|c| solver.solve(c)).collect::<Option<Vec<_>>>()?;
    Some(IntMatrix::from_cols(cols, incl.cols()))
}

#[derive(Clone, PartialEq, Eq)]
pub struct MackeyFunctor {
    fixed: FgAbGroup,
    underlying: FgAbGroup,
    res: IntMatrix,
    tr: IntMatrix,
    sigma: IntMatrix,
}

impl MackeyFunctor {
    /// Builds and validates a Lewis diagram.
    pub fn new(
        fixed: FgAbGroup,
        underlying: FgAbGroup,
        res: IntMatrix,
        tr: IntMatrix,
        sigma: IntMatrix,
    ) -> Result<Self, MackeyError> {
        let m = Self::new_unchecked(fixed, underlying, res, tr, sigma);
        m.validate()?;
        Ok(m)
    }

    /// Builds a diagram without checking the axioms; shapes are still asserted.
    pub fn new_unchecked(
        fixed: FgAbGroup,
        underlying: FgAbGroup,
        res: IntMatrix,
        tr: IntMatrix,
        sigma: IntMatrix,
    ) -> Self {
        let (f, u) = (fixed.ngens(), underlying.ngens());
        assert_eq!(res.shape(), (u, f), "res shape");
        assert_eq!(tr.shape(), (f, u), "tr shape");
        assert_eq!(sigma.shape(), (u, u), "sigma shape");
        MackeyFunctor { fixed, underlying, res, tr, sigma }
    }

    pub fn fixed(&self) -> &FgAbGroup {
        &self.fixed
    }

    pub fn underlying(&self) -> &FgAbGroup {
        &self.underlying
    }

    pub fn res(&self) -> &IntMatrix {
        &self.res
    }

    pub fn tr(&self) -> &IntMatrix {
        &self.tr
    }

    pub fn sigma(&self) -> &IntMatrix {
        &self.sigma
    }

    pub fn res_map(&self) -> AbMap {
        AbMap::new_unchecked(self.fixed.clone(), self.underlying.clone(), self.res.clone())
    }

    pub fn tr_map(&self) -> AbMap {
        AbMap::new_unchecked(self.underlying.clone(), self.fixed.clone(), self.tr.clone())
    }

    pub fn sigma_map(&self) -> AbMap {
        AbMap::new_unchecked(self.underlying.clone(), self.underlying.clone(), self.sigma.clone())
    }

    /// Checks well-definedness of the three maps, then the Lewis axioms in the
    /// order involution, `sigma res = res`, `tr sigma = tr`, `res tr = 1 + sigma`.
    pub fn validate(&self) -> Result<(), MackeyError> {
        self.res_map().check_well_defined()?;
        self.tr_map().check_well_defined()?;
        self.sigma_map().check_well_defined()?;
        let u = &self.underlying;
        let id_u = IntMatrix::identity(u.ngens());
        let checks = [
            (Axiom::Involution, self.sigma.mul(&self.sigma), id_u.clone(), u),
            (Axiom::ResInvariant, self.sigma.mul(&self.res), self.res.clone(), u),
            (Axiom::TrInvariant, self.tr.mul(&self.sigma), self.tr.clone(), &self.fixed),
            (Axiom::DoubleCoset, self.res.mul(&self.tr), id_u.add(&self.sigma), u),
        ];
        for (axiom, lhs, rhs, target) in checks {
            if let Some((generator, witness)) = first_difference(&lhs, &rhs, target) {
                return Err(MackeyError::Axiom { axiom, generator, witness });
            }
        }
        Ok(())
    }

    pub fn zero() -> Self {
        Self::induced(&FgAbGroup::zero())
    }

    /// Constant functor on `g`: `res = 1`, `tr = 2`, trivial action.
    pub fn constant(g: &FgAbGroup) -> Self {
        let n = g.ngens();
        let id = IntMatrix::identity(n);
        Self::new_unchecked(g.clone(), g.clone(), id.clone(), id.scale(&Integer::from(2)), id)
    }

    /// The constant functor on the integers.
    pub fn constant_z() -> Self {
        Self::constant(&FgAbGroup::free(1))
    }

    /// Fixed level `0`, underlying `Z` with the sign action.
    pub fn z_minus() -> Self {
        Self::new_unchecked(
            FgAbGroup::zero(),
            FgAbGroup::free(1),
            IntMatrix::zeros(1, 0),
            IntMatrix::zeros(0, 1),
            IntMatrix::from_i64(&[&[-1]]),
        )
    }

    /// Induced functor on `g`: fixed `g`, underlying `g + g` with the swap.
    pub fn induced(g: &FgAbGroup) -> Self {
        let n = g.ngens();
        let id = IntMatrix::identity(n);
        let zero = IntMatrix::zeros(n, n);
        let res = id.vstack(&id);
        let tr = id.hstack(&id);
        let sigma = zero.hstack(&id).vstack(&id.hstack(&zero));
        Self::new_unchecked(g.clone(), g.direct_sum(g), res, tr, sigma)
    }

    /// The induced functor on `Z`.
    pub fn free_orbit() -> Self {
        Self::induced(&FgAbGroup::free(1))
    }

    /// Burnside functor: fixed `Z{[C2/C2], [C2]}`, underlying `Z`.
    pub fn burnside() -> Self {
        Self::new_unchecked(
            FgAbGroup::free(2).with_labels(vec!["[C2/C2]".into(), "[C2]".into()]),
            FgAbGroup::free(1),
            IntMatrix::from_i64(&[&[1, 2]]),
            IntMatrix::from_i64(&[&[0], &[1]]),
            IntMatrix::identity(1),
        )
    }

    /// Fixed-point functor of an involution on `g`: fixed level the strict
    /// invariants, `res` the inclusion, `tr = 1 + sigma`.
    pub fn fixed_point_mackey(g: &FgAbGroup, sigma: &IntMatrix) -> Result<Self, MackeyError> {
        let s = AbMap::new(g.clone(), g.clone(), sigma.clone())?;
        if !s.compose(&s).equals(&g.identity_map()) {
            return Err(MackeyError::NotInvolution);
        }
        let (fixed, incl) = kernel(&s.sub(&g.identity_map()))?;
        let norm = IntMatrix::identity(g.ngens()).add(sigma);
        let tr = factor_through(g, incl.matrix(), &norm).expect("norm lands in the invariants");
        Ok(Self::new_unchecked(fixed, g.clone(), incl.matrix().clone(), tr, sigma.clone()))
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self::new_unchecked(
            self.fixed.direct_sum(&other.fixed),
            self.underlying.direct_sum(&other.underlying),
            self.res.block_diag(&other.res),
            self.tr.block_diag(&other.tr),
            self.sigma.block_diag(&other.sigma),
        )
    }

    pub fn direct_sum_all(parts: &[MackeyFunctor]) -> Self {
        parts.iter().fold(Self::zero(), |acc, m| acc.direct_sum(m))
    }

    pub fn is_zero(&self) -> bool {
        self.fixed.is_trivial() && self.underlying.is_trivial()
    }

    /// Same functor with both levels in minimal presentation.
    pub fn simplify(&self) -> Self {
        self.simplify_with_maps().0
    }

    /// Minimal presentation with the comparison isomorphisms `(to, from)` at
    /// the fixed and underlying levels.
    pub fn simplify_with_maps(&self) -> (Self, [IntMatrix; 4]) {
        let f = self.fixed.simplify();
        let u = self.underlying.simplify();
        let res = u.to.mul(&self.res).mul(&f.from);
        let tr = f.to.mul(&self.tr).mul(&u.from);
        let sigma = u.to.mul(&self.sigma).mul(&u.from);
        let m = Self::new_unchecked(f.group, u.group, res, tr, sigma);
        (m, [f.to, f.from, u.to, u.from])
    }

    /// `coker(tr)`, the geometric fixed points of a discrete functor.
    pub fn geometric_fixed_points(&self) -> FgAbGroup {
        cokernel(&self.tr_map()).expect("transfer is well defined").0
    }

    /// `tr o res = 2`.
    pub fn is_cohomological(&self) -> bool {
        let two = IntMatrix::scalar(self.fixed.ngens(), Integer::from(2));
        first_difference(&self.tr.mul(&self.res), &two, &self.fixed).is_none()
    }

    pub fn res_is_injective(&self) -> bool {
        self.res_map().is_injective()
    }

    /// Largest quotient on which `res` is injective, with the quotient map.
    pub fn zeroth_slice(&self) -> (MackeyFunctor, MackeyMap) {
        let (_, incl) = kernel(&self.res_map()).expect("res is well defined");
        let (q, proj) = cokernel(&incl).expect("inclusion is well defined");
        let sec = section(proj.matrix());
        let p = Self::new_unchecked(
            q,
            self.underlying.clone(),
            self.res.mul(&sec),
            proj.matrix().mul(&self.tr),
            self.sigma.clone(),
        );
        let map = MackeyMap::new_unchecked(
            self.clone(),
            p.clone(),
            proj.matrix().clone(),
            IntMatrix::identity(self.underlying.ngens()),
        );
        (p, map)
    }

    /// True for finite sums of the constant functor on `Z` and the induced
    /// functor on `Z`: free levels, `res` an isomorphism onto the invariants,
    /// and no sign summands in the underlying lattice.
    pub fn is_free_orbit_sum(&self) -> bool {
        if !self.fixed.is_free() || !self.underlying.is_free() {
            return false;
        }
        let u = &self.underlying;
        let id = IntMatrix::identity(u.ngens());
        let minus = AbMap::new_unchecked(u.clone(), u.clone(), id.sub(&self.sigma));
        let plus = AbMap::new_unchecked(u.clone(), u.clone(), id.add(&self.sigma));
        let (inv, incl) = kernel(&minus).expect("well defined");
        let Some(res_in) = factor_through(u, incl.matrix(), &self.res) else {
            return false;
        };
        if !AbMap::new_unchecked(self.fixed.clone(), inv, res_in).is_isomorphism() {
            return false;
        }
        crate::abelian::homology_at(&minus, &plus).map(|h| h.is_trivial()).unwrap_or(false)
    }

    /// Isomorphism invariants of the diagram; see [`Signature`].
    pub fn signature(&self) -> Signature {
        let inv = |g: FgAbGroup| g.invariants();
        let u = &self.underlying;
        let id = IntMatrix::identity(u.ngens());
        let minus = AbMap::new_unchecked(u.clone(), u.clone(), id.sub(&self.sigma));
        let plus = AbMap::new_unchecked(u.clone(), u.clone(), id.add(&self.sigma));
        let k = |f: &AbMap| inv(kernel(f).expect("well defined").0);
        let c = |f: &AbMap| inv(cokernel(f).expect("well defined").0);
        let (res, tr) = (self.res_map(), self.tr_map());
        Signature {
            fixed: inv(self.fixed.clone()),
            underlying: inv(self.underlying.clone()),
            res_kernel: k(&res),
            res_cokernel: c(&res),
            tr_kernel: k(&tr),
            tr_cokernel: c(&tr),
            invariants: k(&minus),
            coinvariants: c(&minus),
            anti_invariants: k(&plus),
            norm_cokernel: c(&plus),
        }
    }

    /// Same signature as `other`. A necessary condition for isomorphism that
    /// separates every functor the engine compares against.
    pub fn is_isomorphic(&self, other: &Self) -> bool {
        self.signature() == other.signature()
    }

    /// Internal hom into the constant functor on `Z`: the fixed-point functor
    /// of the dual action on `Hom(M^e, Z)`.
    pub fn dual(&self) -> Result<Self, MackeyError> {
        if !self.fixed.is_free() || !self.underlying.is_free() {
            return Err(MackeyError::TorsionNotSupported);
        }
        let u = self.underlying.simplify();
        let sigma = u.to.mul(&self.sigma).mul(&u.from);
        Self::fixed_point_mackey(&u.group, &sigma.transpose())
    }

    /// Levelwise linear dual: `res -> tr^T`, `tr -> res^T`, `sigma -> sigma^T`.
    pub fn linear_dual(&self) -> Result<Self, MackeyError> {
        if !self.fixed.is_free() || !self.underlying.is_free() {
            return Err(MackeyError::TorsionNotSupported);
        }
        let s = self.simplify();
        Ok(Self::new_unchecked(
            s.fixed.clone(),
            s.underlying.clone(),
            s.tr.transpose(),
            s.res.transpose(),
            s.sigma.transpose(),
        ))
    }

    /// Box product before simplification. The fixed level has ambient
    /// generators `a (x) b` for fixed `a`, `b`, followed by `iota(x (x) y)` for
    /// underlying `x`, `y`.
    pub fn box_product_raw(&self, other: &Self) -> Self {
        let (ma, me) = (self.fixed.ngens(), self.underlying.ngens());
        let (nb, ne) = (other.fixed.ngens(), other.underlying.ngens());
        let first = ma * nb;
        let width = first + me * ne;
        let p = |a: usize, b: usize| a * nb + b;
        let iota = |x: usize, y: usize| first + x * ne + y;

        let fixed_tensor = self.fixed.tensor(&other.fixed);
        let under_tensor = self.underlying.tensor(&other.underlying);
        let base = fixed_tensor.relations().block_diag(under_tensor.relations());
        let mut rows: Vec<Vec<Integer>> = base.row_vecs();
        for x in 0..me {
            for b in 0..nb {
                let mut r = vec![Integer::zero(); width];
                for a in 0..ma {
                    r[p(a, b)] += &self.tr[(a, x)];
                }
                for y in 0..ne {
                    r[iota(x, y)] -= &other.res[(y, b)];
                }
                rows.push(r);
            }
        }
        for a in 0..ma {
            for y in 0..ne {
                let mut r = vec![Integer::zero(); width];
                for b in 0..nb {
                    r[p(a, b)] += &other.tr[(b, y)];
                }
                for x in 0..me {
                    r[iota(x, y)] -= &self.res[(x, a)];
                }
                rows.push(r);
            }
        }
        let sigma = self.sigma.kron(&other.sigma);
        for z in 0..me * ne {
            let mut r = vec![Integer::zero(); width];
            r[first + z] += Integer::one();
            for w in 0..me * ne {
                r[first + w] -= &sigma[(w, z)];
            }
            rows.push(r);
        }
        let fixed = FgAbGroup::new(width, IntMatrix::from_rows_sized(rows.len(), width, rows));
        let id = IntMatrix::identity(me * ne);
        let res = self.res.kron(&other.res).hstack(&id.add(&sigma));
        let tr = IntMatrix::zeros(first, me * ne).vstack(&id);
        Self::new_unchecked(fixed, under_tensor, res, tr, sigma)
    }

    pub fn box_product(&self, other: &Self) -> Self {
        self.box_product_raw(other).simplify()
    }

    /// Two-row summary `fixed / underlying`.
    pub fn lewis_rows(&self) -> (String, String) {
        (self.fixed.to_string(), self.underlying.to_string())
    }
}

impl fmt::Display for MackeyFunctor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} / {}", self.fixed, self.underlying)
    }
}

impl fmt::Debug for MackeyFunctor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MackeyFunctor")
            .field("fixed", &self.fixed)
            .field("underlying", &self.underlying)
            .field("res", &self.res)
            .field("tr", &self.tr)
            .field("sigma", &self.sigma)
            .finish()
    }
}

/// Invariant factors of the levels and of kernels and cokernels of `res`,
/// `tr`, `1 - sigma` and `1 + sigma`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub fixed: Vec<Integer>,
    pub underlying: Vec<Integer>,
    pub res_kernel: Vec<Integer>,
    pub res_cokernel: Vec<Integer>,
    pub tr_kernel: Vec<Integer>,
    pub tr_cokernel: Vec<Integer>,
    pub invariants: Vec<Integer>,
    pub coinvariants: Vec<Integer>,
    pub anti_invariants: Vec<Integer>,
    pub norm_cokernel: Vec<Integer>,
}

/// Levelwise homomorphism between Mackey functors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MackeyMap {
    source: MackeyFunctor,
    target: MackeyFunctor,
    fixed: IntMatrix,
    underlying: IntMatrix,
}

impl MackeyMap {
    pub fn new(
        source: MackeyFunctor,
        target: MackeyFunctor,
        fixed: IntMatrix,
        underlying: IntMatrix,
    ) -> Result<Self, MackeyError> {
        let m = Self::new_unchecked(source, target, fixed, underlying);
        m.validate()?;
        Ok(m)
    }

    pub fn new_unchecked(source: MackeyFunctor, target: MackeyFunctor, fixed: IntMatrix, underlying: IntMatrix) -> Self {
        assert_eq!(fixed.shape(), (target.fixed.ngens(), source.fixed.ngens()), "fixed-level map shape");
        assert_eq!(
            underlying.shape(),
            (target.underlying.ngens(), source.underlying.ngens()),
            "underlying map shape"
        );
        MackeyMap { source, target, fixed, underlying }
    }

    pub fn validate(&self) -> Result<(), MackeyError> {
        self.fixed_map().check_well_defined()?;
        self.underlying_map().check_well_defined()?;
        let (s, t) = (&self.source, &self.target);
        if first_difference(&self.underlying.mul(&s.res), &t.res.mul(&self.fixed), &t.underlying).is_some() {
            return Err(MackeyError::NotNatural("res"));
        }
        if first_difference(&self.fixed.mul(&s.tr), &t.tr.mul(&self.underlying), &t.fixed).is_some() {
            return Err(MackeyError::NotNatural("tr"));
        }
        if first_difference(&self.underlying.mul(&s.sigma), &t.sigma.mul(&self.underlying), &t.underlying).is_some() {
            return Err(MackeyError::NotNatural("sigma"));
        }
        Ok(())
    }

    pub fn identity(m: &MackeyFunctor) -> Self {
        Self::new_unchecked(
            m.clone(),
            m.clone(),
            IntMatrix::identity(m.fixed.ngens()),
            IntMatrix::identity(m.underlying.ngens()),
        )
    }

    pub fn zero(source: &MackeyFunctor, target: &MackeyFunctor) -> Self {
        Self::new_unchecked(
            source.clone(),
            target.clone(),
            IntMatrix::zeros(target.fixed.ngens(), source.fixed.ngens()),
            IntMatrix::zeros(target.underlying.ngens(), source.underlying.ngens()),
        )
    }

    pub fn source(&self) -> &MackeyFunctor {
        &self.source
    }

    pub fn target(&self) -> &MackeyFunctor {
        &self.target
    }

    pub fn fixed(&self) -> &IntMatrix {
        &self.fixed
    }

    pub fn underlying(&self) -> &IntMatrix {
        &self.underlying
    }

    pub fn fixed_map(&self) -> AbMap {
        AbMap::new_unchecked(self.source.fixed.clone(), self.target.fixed.clone(), self.fixed.clone())
    }

    pub fn underlying_map(&self) -> AbMap {
        AbMap::new_unchecked(self.source.underlying.clone(), self.target.underlying.clone(), self.underlying.clone())
    }

    /// `self o first`.
    pub fn compose(&self, first: &MackeyMap) -> MackeyMap {
        Self::new_unchecked(
            first.source.clone(),
            self.target.clone(),
            self.fixed.mul(&first.fixed),
            self.underlying.mul(&first.underlying),
        )
    }

    pub fn add(&self, other: &MackeyMap) -> MackeyMap {
        Self::new_unchecked(
            self.source.clone(),
            self.target.clone(),
            self.fixed.add(&other.fixed),
            self.underlying.add(&other.underlying),
        )
    }

    pub fn scale(&self, c: i64) -> MackeyMap {
        let c = Integer::from(c);
        Self::new_unchecked(self.source.clone(), self.target.clone(), self.fixed.scale(&c), self.underlying.scale(&c))
    }

    pub fn neg(&self) -> MackeyMap {
        self.scale(-1)
    }

    pub fn is_zero(&self) -> bool {
        self.fixed_map().is_zero() && self.underlying_map().is_zero()
    }

    pub fn direct_sum(&self, other: &MackeyMap) -> MackeyMap {
        Self::new_unchecked(
            self.source.direct_sum(&other.source),
            self.target.direct_sum(&other.target),
            self.fixed.block_diag(&other.fixed),
            self.underlying.block_diag(&other.underlying),
        )
    }

    /// Box product of two maps on the raw box presentations.
    pub fn box_product_raw(&self, other: &MackeyMap) -> MackeyMap {
        let source = self.source.box_product_raw(&other.source);
        let target = self.target.box_product_raw(&other.target);
        let fixed = self.fixed.kron(&other.fixed).block_diag(&self.underlying.kron(&other.underlying));
        let underlying = self.underlying.kron(&other.underlying);
        Self::new_unchecked(source, target, fixed, underlying)
    }

    /// Levelwise cokernel with the projection from the target.
    pub fn cokernel(&self) -> Result<(MackeyFunctor, MackeyMap), MackeyError> {
        let (qf, pf) = cokernel(&self.fixed_map())?;
        let (qu, pu) = cokernel(&self.underlying_map())?;
        let (sf, su) = (section(pf.matrix()), section(pu.matrix()));
        let t = &self.target;
        let q = MackeyFunctor::new_unchecked(
            qf,
            qu,
            pu.matrix().mul(&t.res).mul(&sf),
            pf.matrix().mul(&t.tr).mul(&su),
            pu.matrix().mul(&t.sigma).mul(&su),
        );
        let proj = MackeyMap::new_unchecked(t.clone(), q.clone(), pf.matrix().clone(), pu.matrix().clone());
        Ok((q, proj))
    }

    /// Levelwise kernel with the inclusion into the source.
    pub fn kernel(&self) -> Result<(MackeyFunctor, MackeyMap), MackeyError> {
        let (kf, jf) = kernel(&self.fixed_map())?;
        let (ku, ju) = kernel(&self.underlying_map())?;
        let s = &self.source;
        let through_u = |m: &IntMatrix| factor_through(&s.underlying, ju.matrix(), m).expect("kernel is a sub-functor");
        let res = through_u(&s.res.mul(jf.matrix()));
        let sigma = through_u(&s.sigma.mul(ju.matrix()));
        let tr = factor_through(&s.fixed, jf.matrix(), &s.tr.mul(ju.matrix())).expect("kernel is a sub-functor");
        let k = MackeyFunctor::new_unchecked(kf, ku, res, tr, sigma);
        let incl = MackeyMap::new_unchecked(k.clone(), s.clone(), jf.matrix().clone(), ju.matrix().clone());
        Ok((k, incl))
    }
}
