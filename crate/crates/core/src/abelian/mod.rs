//! Finitely generated abelian groups presented by integer relation matrices,
//! homomorphisms between them, and homology.
//!
//! Elements are integer column vectors over the ambient free generators. A
//! map is stored as a `target.ngens() x source.ngens()` matrix acting on
//! those columns. Relations are rows.

pub mod snf;

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::matrix::IntMatrix;
use crate::scalar::Integer;
pub use snf::{hermite_normal_form, integer_nullspace, smith_normal_form, IntSolver, Snf};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbelianError {
    #[error("map is not well defined: relation {relation} of the source is not sent into the target relations")]
    IllFormedMap { relation: usize },
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    Shape { expected: (usize, usize), found: (usize, usize) },
    #[error("not a complex: the composite of consecutive maps is nonzero")]
    NotAComplex,
}

/// `Z^n / rowspan(relations)`, with relations kept in Hermite normal form.
#[derive(Clone, PartialEq, Eq)]
pub struct FgAbGroup {
    ngens: usize,
    relations: IntMatrix,
    pivots: Vec<usize>,
    labels: Option<Vec<String>>,
}

impl FgAbGroup {
    pub fn new(ngens: usize, relations: IntMatrix) -> Self {
        assert_eq!(relations.cols(), ngens, "relation width must equal the number of generators");
        let relations = hermite_normal_form(&relations);
        let pivots = snf::hnf_pivots(&relations);
        FgAbGroup { ngens, relations, pivots, labels: None }
    }

    pub fn free(n: usize) -> Self {
        Self::new(n, IntMatrix::zeros(0, n))
    }

    pub fn zero() -> Self {
        Self::free(0)
    }

    pub fn cyclic(order: i64) -> Self {
        Self::new(1, IntMatrix::from_i64(&[&[order]]))
    }

    /// Direct sum of cyclic groups `Z/d` (with `d = 0` meaning `Z`).
    pub fn from_invariants(ds: &[Integer]) -> Self {
        let n = ds.len();
        let mut rel = IntMatrix::zeros(n, n);
        for (i, d) in ds.iter().enumerate() {
            rel[(i, i)] = d.clone();
        }
        Self::new(n, rel)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.ngens);
        self.labels = Some(labels);
        self
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    /// Canonical representative of the class of `v`.
    pub fn reduce(&self, v: &[Integer]) -> Vec<Integer> {
        assert_eq!(v.len(), self.ngens);
        snf::reduce_mod_hnf(&self.relations, &self.pivots, v)
    }

    pub fn is_zero_elem(&self, v: &[Integer]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    pub fn elems_equal(&self, a: &[Integer], b: &[Integer]) -> bool {
        let diff: Vec<Integer> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.is_zero_elem(&diff)
    }

    /// Invariant factors `d_1 | d_2 | ...` with units dropped; `0` stands for
    /// a copy of `Z` and sorts last.
    pub fn invariants(&self) -> Vec<Integer> {
        let snf = smith_normal_form(&self.relations);
        let diag = snf.diagonal();
        let mut out: Vec<Integer> = diag.iter().filter(|d| !d.is_zero() && !d.is_one()).cloned().collect();
        let free = self.ngens - snf.rank();
        out.extend(std::iter::repeat_n(Integer::zero(), free));
        out
    }

    pub fn free_rank(&self) -> usize {
        self.ngens - self.relations.rows()
    }

    pub fn torsion(&self) -> Vec<Integer> {
        self.invariants().into_iter().filter(|d| !d.is_zero()).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariants().is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.torsion().is_empty()
    }

    /// Isomorphism of abstract groups.
    pub fn is_isomorphic(&self, other: &Self) -> bool {
        self.invariants() == other.invariants()
    }

    /// Minimal presentation `Z^a / diag(d_1..d_k)` together with mutually
    /// inverse isomorphisms on ambient coordinates.
    pub fn simplify(&self) -> Simplified {
        let n = self.ngens;
        let snf = smith_normal_form(&self.relations);
        let diag = snf.diagonal();
        let d_at = |i: usize| diag.get(i).cloned().unwrap_or_else(Integer::zero);
        let keep: Vec<usize> = (0..n).filter(|&i| !d_at(i).is_one()).collect();
        let ds: Vec<Integer> = keep.iter().map(|&i| d_at(i)).collect();
        let group = FgAbGroup::from_invariants(&ds);
        // new coordinates are v^T x; old coordinates come back via v^{-T}
        let to = snf.v.transpose().select_rows(&keep);
        let from = snf.v_inv.transpose().select_cols(&keep);
        Simplified { group, to, from }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self::new(self.ngens + other.ngens, self.relations.block_diag(&other.relations))
    }

    pub fn direct_sum_all(groups: &[FgAbGroup]) -> Self {
        groups.iter().fold(FgAbGroup::zero(), |acc, g| acc.direct_sum(g))
    }

    /// Tensor product; generator `(i, j)` sits at index `i * other.ngens() + j`.
    pub fn tensor(&self, other: &Self) -> Self {
        let left = self.relations.kron(&IntMatrix::identity(other.ngens));
        let right = IntMatrix::identity(self.ngens).kron(&other.relations);
        Self::new(self.ngens * other.ngens, left.vstack(&right))
    }

    pub fn identity_map(&self) -> AbMap {
        AbMap::new_unchecked(self.clone(), self.clone(), IntMatrix::identity(self.ngens))
    }

    pub fn zero_map(&self, target: &FgAbGroup) -> AbMap {
        AbMap::new_unchecked(self.clone(), target.clone(), IntMatrix::zeros(target.ngens, self.ngens))
    }

    /// Solver for `x` in `incl x + relations^T y = v`: preimages under a map
    /// into this group.
    pub fn preimage_solver(&self, incl: &IntMatrix) -> PreimageSolver {
        assert_eq!(incl.rows(), self.ngens);
        let k = incl.cols();
        let a = incl.hstack(&self.relations.transpose());
        PreimageSolver { solver: IntSolver::new(&a), k }
    }
}

/// Output of [`FgAbGroup::simplify`].
#[derive(Clone, Debug)]
pub struct Simplified {
    pub group: FgAbGroup,
    /// `new x old`.
    pub to: IntMatrix,
    /// `old x new`.
    pub from: IntMatrix,
}

#[derive(Clone, Debug)]
pub struct PreimageSolver {
    solver: IntSolver,
    k: usize,
}

impl PreimageSolver {
    pub fn solve(&self, v: &[Integer]) -> Option<Vec<Integer>> {
        self.solver.solve(v).map(|x| x[..self.k].to_vec())
    }
}

impl fmt::Debug for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FgAbGroup({})", self)
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_invariants(&self.invariants()))
    }
}

/// `0`, `Z`, `Z/2`, `Z/2 + Z^2`, ...
pub fn format_invariants(ds: &[Integer]) -> String {
    if ds.is_empty() {
        return "0".to_string();
    }
    let mut parts: Vec<String> = ds.iter().filter(|d| !d.is_zero()).map(|d| format!("Z/{}", d)).collect();
    let free = ds.iter().filter(|d| d.is_zero()).count();
    match free {
        0 => {}
        1 => parts.push("Z".to_string()),
        n => parts.push(format!("Z^{}", n)),
    }
    parts.join(" + ")
}

/// Homomorphism given on ambient generators.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AbMap {
    source: FgAbGroup,
    target: FgAbGroup,
    matrix: IntMatrix,
}

impl AbMap {
    pub fn new(source: FgAbGroup, target: FgAbGroup, matrix: IntMatrix) -> Result<Self, AbelianError> {
        let expected = (target.ngens, source.ngens);
        if matrix.shape() != expected {
            return Err(AbelianError::Shape { expected, found: matrix.shape() });
        }
        let map = AbMap { source, target, matrix };
        map.check_well_defined()?;
        Ok(map)
    }

    pub fn new_unchecked(source: FgAbGroup, target: FgAbGroup, matrix: IntMatrix) -> Self {
        assert_eq!(matrix.shape(), (target.ngens, source.ngens), "map shape");
        AbMap { source, target, matrix }
    }

    pub fn check_well_defined(&self) -> Result<(), AbelianError> {
        for (i, rel) in self.source.relations.row_vecs().iter().enumerate() {
            if !self.target.is_zero_elem(&self.matrix.mul_vec(rel)) {
                return Err(AbelianError::IllFormedMap { relation: i });
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &FgAbGroup {
        &self.source
    }

    pub fn target(&self) -> &FgAbGroup {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, v: &[Integer]) -> Vec<Integer> {
        self.target.reduce(&self.matrix.mul_vec(v))
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &AbMap) -> AbMap {
        assert_eq!(first.target.ngens, self.source.ngens, "composition shape");
        AbMap::new_unchecked(first.source.clone(), self.target.clone(), self.matrix.mul(&first.matrix))
    }

    pub fn add(&self, other: &AbMap) -> AbMap {
        AbMap::new_unchecked(self.source.clone(), self.target.clone(), self.matrix.add(&other.matrix))
    }

    pub fn sub(&self, other: &AbMap) -> AbMap {
        AbMap::new_unchecked(self.source.clone(), self.target.clone(), self.matrix.sub(&other.matrix))
    }

    pub fn neg(&self) -> AbMap {
        AbMap::new_unchecked(self.source.clone(), self.target.clone(), self.matrix.neg())
    }

    pub fn scale(&self, c: i64) -> AbMap {
        AbMap::new_unchecked(self.source.clone(), self.target.clone(), self.matrix.scale(&Integer::from(c)))
    }

    /// Zero as a map, i.e. every generator lands in the target relations.
    pub fn is_zero(&self) -> bool {
        self.matrix.col_vecs().iter().all(|c| self.target.is_zero_elem(c))
    }

    /// Equality of maps modulo target relations.
    pub fn equals(&self, other: &AbMap) -> bool {
        self.matrix.shape() == other.matrix.shape() && self.sub(other).is_zero()
    }

    pub fn direct_sum(&self, other: &AbMap) -> AbMap {
        AbMap::new_unchecked(
            self.source.direct_sum(&other.source),
            self.target.direct_sum(&other.target),
            self.matrix.block_diag(&other.matrix),
        )
    }

    pub fn tensor(&self, other: &AbMap) -> AbMap {
        AbMap::new_unchecked(
            self.source.tensor(&other.source),
            self.target.tensor(&other.target),
            self.matrix.kron(&other.matrix),
        )
    }

    pub fn is_injective(&self) -> bool {
        kernel(self).map(|(k, _)| k.is_trivial()).unwrap_or(false)
    }

    pub fn is_surjective(&self) -> bool {
        cokernel(self).map(|(c, _)| c.is_trivial()).unwrap_or(false)
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }
}

/// `target / im(f)` in minimal form, with the projection from `f.target()`.
pub fn cokernel(f: &AbMap) -> Result<(FgAbGroup, AbMap), AbelianError> {
    f.check_well_defined()?;
    let t = &f.target;
    let rel = t.relations.vstack(&f.matrix.transpose());
    let raw = FgAbGroup::new(t.ngens, rel);
    let s = raw.simplify();
    let proj = AbMap::new_unchecked(t.clone(), s.group.clone(), s.to);
    Ok((s.group, proj))
}

/// `ker(f)` in minimal form, with its inclusion into `f.source()`.
pub fn kernel(f: &AbMap) -> Result<(FgAbGroup, AbMap), AbelianError> {
    f.check_well_defined()?;
    let (lattice, incl) = kernel_lattice(f);
    let s = lattice.simplify();
    let inclusion = AbMap::new_unchecked(s.group.clone(), f.source.clone(), incl.mul(&s.from));
    Ok((s.group, inclusion))
}

/// Kernel before simplification: `Z^k / R` with its inclusion matrix into the
/// ambient source coordinates.
fn kernel_lattice(f: &AbMap) -> (FgAbGroup, IntMatrix) {
    let n = f.source.ngens;
    // solutions of M x = R_T^T y; R_T has full row rank because it is in HNF
    let a = f.matrix.hstack(&f.target.relations.transpose().neg());
    let null = integer_nullspace(&a);
    let rows: Vec<usize> = (0..n).collect();
    let basis = null.select_rows(&rows);
    let k = basis.cols();
    let solver = IntSolver::new(&basis);
    let rels: Vec<Vec<Integer>> = f
        .source
        .relations
        .row_vecs()
        .iter()
        .map(|r| solver.solve(r).expect("source relation lies in the kernel lattice"))
        .collect();
    let rel_mat = IntMatrix::from_rows_sized(rels.len(), k, rels);
    (FgAbGroup::new(k, rel_mat), basis)
}

/// Subquotient `ker(d_out) / im(d_in)` of a middle group, with representatives
/// and a projection from cycles.
#[derive(Clone, Debug)]
pub struct Subquotient {
    pub group: FgAbGroup,
    /// `middle.ngens() x group.ngens()`: a cycle representing each generator.
    pub reps: IntMatrix,
    cycles: PreimageSolver,
    /// `group.ngens() x k` on kernel-lattice coordinates.
    to_group: IntMatrix,
}

impl Subquotient {
    /// Class of a cycle `v` (ambient middle coordinates); `None` if `v` is not
    /// a cycle.
    pub fn project(&self, v: &[Integer]) -> Option<Vec<Integer>> {
        let z = self.cycles.solve(v)?;
        Some(self.group.reduce(&self.to_group.mul_vec(&z)))
    }

    /// Matrix of the map induced on subquotients by a chain-level map `m`
    /// from this middle group to the middle group of `target`.
    pub fn induced(&self, target: &Subquotient, m: &IntMatrix) -> IntMatrix {
        let cols: Vec<Vec<Integer>> = (0..self.group.ngens())
            .map(|j| {
                let img = m.mul_vec(&self.reps.col(j));
                target.project(&img).expect("chain map sends cycles to cycles")
            })
            .collect();
        IntMatrix::from_cols(cols, target.group.ngens())
    }
}

/// Builds the subquotient of `d_out` and `d_in` on their shared middle group.
pub fn subquotient(d_in: &AbMap, d_out: &AbMap) -> Result<Subquotient, AbelianError> {
    d_in.check_well_defined()?;
    d_out.check_well_defined()?;
    if !d_out.compose(d_in).is_zero() {
        return Err(AbelianError::NotAComplex);
    }
    let middle = &d_out.source;
    let (klat, incl) = kernel_lattice(d_out);
    let cycles = middle.preimage_solver(&incl);
    let lifts: Vec<Vec<Integer>> = d_in
        .matrix
        .col_vecs()
        .iter()
        .map(|v| cycles.solve(v).expect("boundaries are cycles"))
        .collect();
    let k = klat.ngens;
    let lift = IntMatrix::from_cols(lifts, k);
    let q = FgAbGroup::new(k, klat.relations.vstack(&lift.transpose()));
    let s = q.simplify();
    Ok(Subquotient { group: s.group, reps: incl.mul(&s.from), cycles, to_group: s.to })
}

/// `ker(d_out) / im(d_in)`.
pub fn homology_at(d_in: &AbMap, d_out: &AbMap) -> Result<FgAbGroup, AbelianError> {
    Ok(subquotient(d_in, d_out)?.group)
}

/// The same homology computed by passing to `coker(d_in)` first and taking
/// the kernel of the induced map.
pub fn homology_quotient_first(d_in: &AbMap, d_out: &AbMap) -> Result<FgAbGroup, AbelianError> {
    if !d_out.compose(d_in).is_zero() {
        return Err(AbelianError::NotAComplex);
    }
    let (q, proj) = cokernel(d_in)?;
    // a section of the projection on ambient coordinates
    let solver = IntSolver::new(proj.matrix());
    let cols: Vec<Vec<Integer>> = (0..q.ngens())
        .map(|j| {
            let mut e = vec![Integer::zero(); q.ngens()];
            e[j] = Integer::one();
            let pre = solver.solve(&e).expect("projection is onto the generators");
            d_out.matrix.mul_vec(&pre)
        })
        .collect();
    let induced = AbMap::new(q, d_out.target.clone(), IntMatrix::from_cols(cols, d_out.target.ngens))?;
    Ok(kernel(&induced)?.0)
}

/// Integer solution of `a x = b`, if any.
pub fn solve_integer(a: &IntMatrix, b: &[Integer]) -> Option<Vec<Integer>> {
    IntSolver::new(a).solve(b)
}

/// Free rank of the image of an integer matrix.
pub fn int_rank(a: &IntMatrix) -> usize {
    smith_normal_form(a).rank()
}
