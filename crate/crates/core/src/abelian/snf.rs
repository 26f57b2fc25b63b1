//! Smith and Hermite normal forms over the integers.

use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use crate::matrix::IntMatrix;
use crate::scalar::Integer;

/// Result of a Smith normal form computation: `u * a * v == d`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl Snf {
    /// Diagonal entries `d_1 | d_2 | ...`, trailing zeros included up to
    /// `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<Integer> {
        let n = self.d.rows().min(self.d.cols());
        (0..n).map(|i| self.d[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|x| !x.is_zero()).count()
    }
}

/// `(g, x, y)` with `x a + y b = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: &Integer, b: &Integer) -> (Integer, Integer, Integer) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (Integer::one(), Integer::zero());
    let (mut t0, mut t1) = (Integer::zero(), Integer::one());
    while !r1.is_zero() {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let s2 = &s0 - &q * &s1;
        s0 = std::mem::replace(&mut s1, s2);
        let t2 = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.is_negative() {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

struct SnfState {
    d: IntMatrix,
    u: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl SnfState {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.d.swap_rows(a, b);
        self.u.swap_rows(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.d.swap_cols(a, b);
        self.v.swap_cols(a, b);
        self.v_inv.swap_rows(a, b);
    }

    /// `row[dst] += c * row[src]`.
    fn add_row(&mut self, dst: usize, src: usize, c: &Integer) {
        self.d.add_row_multiple(dst, src, c);
        self.u.add_row_multiple(dst, src, c);
    }

    /// `col[dst] += c * col[src]`; the inverse gets `row[src] -= c * row[dst]`.
    fn add_col(&mut self, dst: usize, src: usize, c: &Integer) {
        self.d.add_col_multiple(dst, src, c);
        self.v.add_col_multiple(dst, src, c);
        self.v_inv.add_row_multiple(src, dst, &-c.clone());
    }

    fn negate_row(&mut self, i: usize) {
        let m = -Integer::one();
        self.d.scale_row(i, &m);
        self.u.scale_row(i, &m);
    }

    /// Position of the nonzero entry of least absolute value in the lower-right
    /// block starting at `t`.
    fn min_entry(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.d.rows() {
            for j in t..self.d.cols() {
                let x = &self.d[(i, j)];
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| x.abs() < self.d[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        best
    }

    fn min_in_cross(&self, t: usize) -> (usize, usize) {
        let mut best = (t, t);
        let mut best_abs = self.d[(t, t)].abs();
        for i in t + 1..self.d.rows() {
            let a = self.d[(i, t)].abs();
            if !a.is_zero() && (best_abs.is_zero() || a < best_abs) {
                best = (i, t);
                best_abs = a;
            }
        }
        for j in t + 1..self.d.cols() {
            let a = self.d[(t, j)].abs();
            if !a.is_zero() && (best_abs.is_zero() || a < best_abs) {
                best = (t, j);
                best_abs = a;
            }
        }
        best
    }

    fn run(&mut self) {
        let n = self.d.rows().min(self.d.cols());
        for t in 0..n {
            let Some((pi, pj)) = self.min_entry(t) else {
                break;
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut dirty = false;
                for i in t + 1..self.d.rows() {
                    if self.d[(i, t)].is_zero() {
                        continue;
                    }
                    let q = &self.d[(i, t)] / &self.d[(t, t)];
                    self.add_row(i, t, &-q);
                    dirty |= !self.d[(i, t)].is_zero();
                }
                for j in t + 1..self.d.cols() {
                    if self.d[(t, j)].is_zero() {
                        continue;
                    }
                    let q = &self.d[(t, j)] / &self.d[(t, t)];
                    self.add_col(j, t, &-q);
                    dirty |= !self.d[(t, j)].is_zero();
                }
                if dirty {
                    let (i, j) = self.min_in_cross(t);
                    self.swap_rows(t, i);
                    self.swap_cols(t, j);
                    continue;
                }
                let p = self.d[(t, t)].clone();
                let bad = (t + 1..self.d.rows()).find(|&i| {
                    (t + 1..self.d.cols()).any(|j| !self.d[(i, j)].is_multiple_of(&p))
                });
                match bad {
                    Some(i) => self.add_row(t, i, &Integer::one()),
                    None => break,
                }
            }
            if self.d[(t, t)].is_negative() {
                self.negate_row(t);
            }
        }
    }
}

/// Smith normal form by gcd-driven elimination with minimal-absolute-value
/// pivots.
pub fn smith_normal_form(a: &IntMatrix) -> Snf {
    let (m, n) = a.shape();
    let mut st = SnfState {
        d: a.clone(),
        u: IntMatrix::identity(m),
        v: IntMatrix::identity(n),
        v_inv: IntMatrix::identity(n),
    };
    st.run();
    Snf { u: st.u, d: st.d, v: st.v, v_inv: st.v_inv }
}

/// Row-style Hermite normal form with zero rows removed: pivots are positive,
/// strictly increasing in column, and entries above a pivot lie in `[0, pivot)`.
pub fn hermite_normal_form(a: &IntMatrix) -> IntMatrix {
    let mut h = a.clone();
    let rows = h.rows();
    let mut r = 0;
    for c in 0..h.cols() {
        if r == rows {
            break;
        }
        for i in r + 1..rows {
            if h[(i, c)].is_zero() {
                continue;
            }
            let a = h[(r, c)].clone();
            let b = h[(i, c)].clone();
            let (g, x, y) = ext_gcd(&a, &b);
            let (ag, bg) = (&a / &g, &b / &g);
            for j in c..h.cols() {
                let top = h[(r, j)].clone();
                let bot = h[(i, j)].clone();
                h[(r, j)] = &x * &top + &y * &bot;
                h[(i, j)] = &ag * &bot - &bg * &top;
            }
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            h.scale_row(r, &-Integer::one());
        }
        let p = h[(r, c)].clone();
        for i in 0..r {
            let q = h[(i, c)].div_floor(&p);
            h.add_row_multiple(i, r, &-q);
        }
        r += 1;
    }
    let keep: Vec<usize> = (0..r).collect();
    let mut out = h.select_rows(&keep);
    if out.rows() == 0 {
        out = IntMatrix::zeros(0, a.cols());
    }
    out
}

/// Pivot columns of a matrix already in Hermite normal form.
pub fn hnf_pivots(h: &IntMatrix) -> Vec<usize> {
    (0..h.rows())
        .map(|i| (0..h.cols()).find(|&j| !h[(i, j)].is_zero()).expect("zero row in HNF"))
        .collect()
}

/// Reduces `v` modulo the row lattice of `h` (in Hermite normal form) to its
/// canonical representative.
pub fn reduce_mod_hnf(h: &IntMatrix, pivots: &[usize], v: &[Integer]) -> Vec<Integer> {
    let mut out = v.to_vec();
    for (i, &p) in pivots.iter().enumerate() {
        if out[p].is_zero() {
            continue;
        }
        let q = out[p].div_floor(&h[(i, p)]);
        if q.is_zero() {
            continue;
        }
        for j in p..h.cols() {
            let hv = &h[(i, j)];
            if !hv.is_zero() {
                out[j] = &out[j] - &q * hv;
            }
        }
    }
    out
}

/// Integer solver for `a x = b`, reusing one Smith form for many right-hand
/// sides.
#[derive(Clone, Debug)]
pub struct IntSolver {
    snf: Snf,
    cols: usize,
}

impl IntSolver {
    pub fn new(a: &IntMatrix) -> Self {
        IntSolver { snf: smith_normal_form(a), cols: a.cols() }
    }

    pub fn solve(&self, b: &[Integer]) -> Option<Vec<Integer>> {
        let ub = self.snf.u.mul_vec(b);
        let diag = self.snf.diagonal();
        let mut y = vec![Integer::zero(); self.cols];
        for (i, x) in ub.iter().enumerate() {
            let d = diag.get(i).cloned().unwrap_or_else(Integer::zero);
            if d.is_zero() {
                if !x.is_zero() {
                    return None;
                }
            } else {
                let (q, r) = x.div_rem(&d);
                if !r.is_zero() {
                    return None;
                }
                y[i] = q;
            }
        }
        Some(self.snf.v.mul_vec(&y))
    }
}

/// Basis of the integer right null space, as columns.
pub fn integer_nullspace(a: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(a);
    let r = snf.rank();
    let idx: Vec<usize> = (r..a.cols()).collect();
    snf.v.select_cols(&idx)
}
