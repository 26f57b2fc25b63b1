#![allow(dead_code)]

use c2alg::abelian::FgAbGroup;
use c2alg::mackey::MackeyFunctor;
use c2alg::matrix::IntMatrix;
use c2alg::scalar::int;
use proptest::prelude::*;

/// Small building blocks with levels of rank at most two.
pub fn block(kind: u8, n: i64) -> MackeyFunctor {
    let cyc = if n <= 1 { FgAbGroup::free(1) } else { FgAbGroup::cyclic(n) };
    match kind % 8 {
        0 => MackeyFunctor::constant_z(),
        1 => MackeyFunctor::z_minus(),
        2 => MackeyFunctor::free_orbit(),
        3 => MackeyFunctor::burnside(),
        4 => MackeyFunctor::constant(&cyc),
        5 => MackeyFunctor::induced(&cyc),
        6 => MackeyFunctor::constant_z().linear_dual().unwrap(),
        _ => MackeyFunctor::fixed_point_mackey(&cyc, &IntMatrix::from_i64(&[&[-1]])).unwrap(),
    }
}

/// Unimodular matrix from a list of elementary operations, with its inverse.
pub fn unimodular(n: usize, ops: &[(usize, usize, i64)]) -> (IntMatrix, IntMatrix) {
    let mut p = IntMatrix::identity(n);
    let mut q = IntMatrix::identity(n);
    if n < 2 {
        return (p, q);
    }
    for &(i, j, c) in ops {
        let (i, j) = (i % n, j % n);
        if i == j {
            continue;
        }
        // p <- E p, q <- q E^{-1} with E = 1 + c e_ij
        p.add_row_multiple(i, j, &int(c));
        q.add_col_multiple(j, i, &int(-c));
    }
    (p, q)
}

/// The same functor written in new ambient coordinates.
pub fn rebase(m: &MackeyFunctor, ops_f: &[(usize, usize, i64)], ops_u: &[(usize, usize, i64)]) -> MackeyFunctor {
    let (pf, qf) = unimodular(m.fixed().ngens(), ops_f);
    let (pu, qu) = unimodular(m.underlying().ngens(), ops_u);
    let fixed = FgAbGroup::new(m.fixed().ngens(), m.fixed().relations().mul(&pf.transpose()));
    let under = FgAbGroup::new(m.underlying().ngens(), m.underlying().relations().mul(&pu.transpose()));
    MackeyFunctor::new_unchecked(
        fixed,
        under,
        pu.mul(m.res()).mul(&qf),
        pf.mul(m.tr()).mul(&qu),
        pu.mul(m.sigma()).mul(&qu),
    )
}

fn ops() -> impl Strategy<Value = Vec<(usize, usize, i64)>> {
    proptest::collection::vec((0usize..4, 0usize..4, -2i64..=2), 0..4)
}

/// Random valid functor with levels of rank at most two and torsion exponent
/// at most six.
pub fn arb_mackey() -> impl Strategy<Value = MackeyFunctor> {
    let one = (0u8..8, 0i64..=6);
    let parts = prop_oneof![
        one.clone().prop_map(|(k, n)| vec![(k, n)]),
        (0u8..8, 0i64..=6, 0u8..8, 0i64..=6).prop_map(|(a, n, b, m)| vec![(a, n), (b, m)]),
    ];
    (parts, ops(), ops()).prop_filter_map("ranks at most two", |(parts, of, ou)| {
        let m = MackeyFunctor::direct_sum_all(&parts.iter().map(|&(k, n)| block(k, n)).collect::<Vec<_>>());
        if m.fixed().ngens() > 2 || m.underlying().ngens() > 2 {
            return None;
        }
        Some(rebase(&m, &of, &ou))
    })
}

/// Random functor with torsion-free levels.
pub fn arb_free_mackey() -> impl Strategy<Value = MackeyFunctor> {
    let kinds = proptest::collection::vec(prop_oneof![Just(0u8), Just(1), Just(2), Just(3), Just(6)], 1..3);
    (kinds, ops(), ops()).prop_map(|(kinds, of, ou)| {
        let m = MackeyFunctor::direct_sum_all(&kinds.iter().map(|&k| block(k, 0)).collect::<Vec<_>>());
        rebase(&m, &of, &ou)
    })
}
