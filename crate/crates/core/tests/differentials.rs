use std::collections::BTreeMap;

use c2alg::abelian::FgAbGroup;
use c2alg::differentials::{
    check_hkr, cotangent_module, de_rham_complex, inv_cochain_cohomology, sign_fix, Convention, DifferentialsError,
    InvolutiveCochainComplex,
};
use c2alg::mackey::MackeyFunctor;
use c2alg::matrix::{IntMatrix, RatMatrix};
use c2alg::poly::{monomials_of_weight, Monomial, RatPoly};
use c2alg::scalar::{rat, Rational};
use c2alg::tambara::{BaseRing, InvolutiveRing, TambaraPresentation};
use proptest::prelude::*;

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn kx() -> TambaraPresentation {
    TambaraPresentation::free_involutive_trivial(BaseRing::Z, &["x"], 8).unwrap()
}

fn kxx() -> TambaraPresentation {
    TambaraPresentation::free_involutive_free(BaseRing::Z, 8).unwrap()
}

/// Q[x, y]/(y^2 - f) with y -> -y, f given by integer coefficients from the
/// constant term up.
fn hyperelliptic(f: &[i64]) -> TambaraPresentation {
    let x = RatPoly::var(2, 0);
    let y = RatPoly::var(2, 1);
    let mut fp = RatPoly::zero(2);
    for (k, &c) in f.iter().enumerate() {
        fp = fp.add(&x.pow(k as u32).scale(&rat(c)));
    }
    let ring = InvolutiveRing::new(BaseRing::Q, names(&["x", "y"]), vec![x.clone(), y.neg()], vec![y.mul(&y).sub(&fp)]).unwrap();
    TambaraPresentation::fixed_point_green(ring, 8).unwrap()
}

fn poly1(f: &[i64], nvars: usize) -> RatPoly {
    let x = RatPoly::var(nvars, 0);
    let mut out = RatPoly::zero(nvars);
    for (k, &c) in f.iter().enumerate() {
        out = out.add(&x.pow(k as u32).scale(&rat(c)));
    }
    out
}

fn derivative(f: &[i64]) -> Vec<i64> {
    f.iter().enumerate().skip(1).map(|(k, &c)| k as i64 * c).collect()
}

#[test]
fn cotangent_of_trivial_line() {
    let l = cotangent_module(&kx()).unwrap();
    assert_eq!(l.generator_names(), vec!["dx"]);
    assert!(l.is_free());
    assert!(l.relation_names().is_empty());
    assert_eq!(l.fmt_reduced(), "Z[x]{dx}");
    assert_eq!(l.fmt_sigma(), "dx ↦ dx");
    assert!(l.mackey_piece(0).unwrap().is_zero());
    for w in 1..=5 {
        assert!(l.mackey_piece(w).unwrap().is_isomorphic(&MackeyFunctor::constant_z()));
        assert_eq!(l.level_ranks(w), (1, 1));
    }
}

#[test]
fn cotangent_of_free_orbit() {
    let l = cotangent_module(&kxx()).unwrap();
    assert_eq!(l.generator_names(), vec!["dx", "dx_σ"]);
    assert_eq!(l.fmt_sigma(), "dx ↦ dx_σ, dx_σ ↦ dx");
    for w in 1..=5u32 {
        let ind = MackeyFunctor::induced(&FgAbGroup::free(w as usize));
        assert!(l.mackey_piece(w).unwrap().is_isomorphic(&ind), "weight {}", w);
        assert_eq!(l.level_ranks(w), (w as usize, 2 * w as usize));
    }
}

#[test]
fn hyperelliptic_relation_images() {
    for f in [vec![0, -1, 0, 1], vec![1, 0, 0, 0, 0, 1], vec![-2, 3, 1]] {
        let b = hyperelliptic(&f);
        let l = cotangent_module(&b).unwrap();
        assert_eq!(l.generator_names(), vec!["dx", "dy", "dy_σ"]);
        assert_eq!(l.relation_names(), ["z", "w"]);
        let r = l.resolvent();
        let (x, y, ys) = (r.var(0), r.var(1), r.var(2));
        // dz ↦ dy + dy_σ
        assert_eq!(l.relation_image(0), [RatPoly::zero(3), RatPoly::one(3), RatPoly::one(3)]);
        // dw ↦ -y dy_σ - y_σ dy - f'(x) dx, from w = -y y_σ - f(x)
        let fp = poly1(&derivative(&f), 3);
        assert_eq!(l.relation_lifts()[1], y.mul(&ys).neg().sub(&poly1(&f, 3)));
        assert_eq!(l.relation_image(1), [fp.neg(), ys.neg(), y.neg()]);
        let _ = x;
        // underlying level A{dx, dy}/(2y dy - f'(x) dx), dx fixed, dy negated
        assert_eq!(l.reduced_generator_names(), vec!["dx", "dy"]);
        let bx = b.under();
        let rel = &l.reduced_relations()[0];
        assert_eq!(rel[0], poly1(&derivative(&f), 2).neg());
        assert_eq!(rel[1], bx.var(1).scale(&rat(2)));
        assert_eq!(l.fmt_sigma(), "dx ↦ dx, dy ↦ -dy");
    }
}

#[test]
fn hyperelliptic_display() {
    let l = cotangent_module(&hyperelliptic(&[0, -1, 0, 1])).unwrap();
    assert_eq!(l.fmt_relation(0), "dz ↦ dy + dy_σ");
    assert_eq!(l.fmt_relation(1), "dw ↦ (-3*x^2 + 1)*dx - y_σ*dy - y*dy_σ");
    assert_eq!(l.fmt_reduced(), "Q[x,y]/(-x^3 + x + y^2){dx, dy}/((-3*x^2 + 1)*dx + 2*y*dy)");
    assert!(!l.is_free());
}

#[test]
fn hyperelliptic_fixed_level() {
    // squarefree f: f' is a unit modulo f, yet dx is a nonzero invariant
    let l = cotangent_module(&hyperelliptic(&[0, -1, 0, 1])).unwrap();
    let n = 2;
    let dx = vec![RatPoly::one(n), RatPoly::zero(n)];
    assert!(!l.is_zero(&dx));
    assert!(l.is_invariant(&dx));
    let dy = vec![RatPoly::zero(n), RatPoly::one(n)];
    assert!(!l.is_invariant(&dy));
    let gens: Vec<String> = l.fixed_generators().iter().map(|v| l.fmt_form(v)).collect();
    assert_eq!(gens, vec!["dx", "y*dy"]);
    // the relation itself is zero in the module
    assert!(l.is_zero(&l.reduced_relations()[0]));
}

#[test]
fn cusp_level_ranks() {
    // y^2 = x^3 with weights 2, 3; frozen from direct elimination
    let x = RatPoly::var(2, 0);
    let y = RatPoly::var(2, 1);
    let ring = InvolutiveRing::new(BaseRing::Q, names(&["x", "y"]), vec![x.clone(), y.neg()], vec![y.mul(&y).sub(&x.pow(3))])
        .unwrap()
        .with_weights(vec![2, 3]);
    let l = cotangent_module(&TambaraPresentation::fixed_point_green(ring, 12).unwrap()).unwrap();
    let ranks: Vec<(usize, usize)> = (0..=10).map(|w| l.level_ranks(w)).collect();
    assert_eq!(ranks[0], (0, 0));
    assert_eq!(ranks[2], (1, 1));
    assert_eq!(ranks[3], (0, 1));
    for w in 4..=10 {
        // fixed: x^k dx and x^j y dy modulo one relation; underlying adds the anti-invariant part
        let fixed = if w % 2 == 0 { 1 } else { 0 };
        assert_eq!(ranks[w].0, fixed, "weight {}", w);
    }
}

#[test]
fn not_cohomological() {
    assert!(matches!(cotangent_module(&TambaraPresentation::burnside()), Err(DifferentialsError::NotCohomological(_))));
}

#[test]
fn de_rham_refuses_singular() {
    let e = de_rham_complex(&hyperelliptic(&[0, -1, 0, 1]), 2).unwrap_err();
    assert!(matches!(e, DifferentialsError::NotSmoothPresentation(_)));
}

#[test]
fn de_rham_of_line() {
    let dr = de_rham_complex(&kx(), 3).unwrap();
    let p = dr.piece(1).unwrap();
    assert_eq!(p.rank(0), 1);
    assert_eq!(p.rank(1), 1);
    assert_eq!(p.rank(2), 0);
    assert_eq!(p.d(0), IntMatrix::from_i64(&[&[1]]));
    // twisted level: sigma(dx) = -dx
    assert_eq!(p.sigma(1), IntMatrix::from_i64(&[&[-1]]));
    assert_eq!(dr.fmt_basis_element(&dr.basis(1, 3)[0].0, &dr.basis(1, 3)[0].1), "x^2*dx");
    for w in 0..=8 {
        let p = dr.piece(w).unwrap();
        let h0 = inv_cochain_cohomology(&p, 0);
        let h1 = inv_cochain_cohomology(&p, 1);
        assert_eq!(h0.rank(), if w == 0 { 1 } else { 0 });
        assert_eq!(h1.rank(), 0);
        if w >= 2 {
            // d(x^w) = w x^(w-1) dx over Z
            assert_eq!(h1.group.invariants(), vec![c2alg::scalar::int(w as i64)]);
        }
    }
}

#[test]
fn de_rham_of_point() {
    let b = TambaraPresentation::free_involutive_trivial(BaseRing::Z, &[], 8).unwrap();
    let dr = de_rham_complex(&b, 3).unwrap();
    let p = dr.piece(0).unwrap();
    assert_eq!((p.rank(0), p.rank(1), p.rank(2), p.rank(3)), (1, 0, 0, 0));
}

#[test]
fn de_rham_of_plane_with_swap() {
    let dr = de_rham_complex(&kxx(), 2).unwrap();
    for w in 0..=5 {
        let p = dr.piece(w).unwrap();
        let ranks: Vec<usize> = (0..=2).map(|n| inv_cochain_cohomology(&p, n).rank()).collect();
        assert_eq!(ranks, if w == 0 { vec![1, 0, 0] } else { vec![0, 0, 0] }, "weight {}", w);
    }
    // sigma(dx ∧ dx_σ) = dx_σ ∧ dx = -dx ∧ dx_σ; the twist is trivial in even degree
    let p = dr.piece(2).unwrap();
    assert_eq!(p.sigma(2), IntMatrix::from_i64(&[&[-1]]));
    assert_eq!(dr.geometric_sigma(2, 2).unwrap(), IntMatrix::from_i64(&[&[-1]]).to_rational());
}

/// Classical de Rham differential of Q[x_1..x_n] on the basis
/// (monomial, sorted index set), by the Leibniz rule.
fn classical_d(n: usize, i: usize, w: u32) -> (Vec<(Monomial, Vec<usize>)>, Vec<(Monomial, Vec<usize>)>, RatMatrix) {
    let basis = |i: usize| -> Vec<(Monomial, Vec<usize>)> {
        let mut out = Vec::new();
        let sets: Vec<Vec<usize>> = (0u32..(1 << n)).filter(|m| m.count_ones() as usize == i).map(|m| (0..n).filter(|b| m >> b & 1 == 1).collect()).collect();
        for s in sets {
            if (s.len() as u32) > w {
                continue;
            }
            for m in monomials_of_weight(n, &vec![1; n], w - s.len() as u32) {
                out.push((m, s.clone()));
            }
        }
        out
    };
    let src = basis(i);
    let tgt = basis(i + 1);
    let mut mat = RatMatrix::zeros(tgt.len(), src.len());
    for (j, (m, s)) in src.iter().enumerate() {
        for v in 0..n {
            if m[v] == 0 || s.contains(&v) {
                continue;
            }
            let mut m2 = m.clone();
            m2[v] -= 1;
            let mut s2 = s.clone();
            s2.push(v);
            s2.sort();
            let sign = if s.iter().filter(|&&t| t < v).count() % 2 == 0 { 1 } else { -1 };
            let row = tgt.iter().position(|(a, b)| *a == m2 && *b == s2).unwrap();
            mat[(row, j)] += Rational::from_integer((sign * m[v] as i64).into());
        }
    }
    (src, tgt, mat)
}

#[test]
fn underlying_is_classical_de_rham() {
    let dr = de_rham_complex(&kxx(), 2).unwrap();
    for w in 0..=5 {
        for i in 0..2 {
            let (src, tgt, oracle) = classical_d(2, i, w);
            let src_e: Vec<_> = dr.basis(i, w);
            let tgt_e: Vec<_> = dr.basis(i + 1, w);
            // reorder the oracle to the engine's bases
            let perm = |a: &[(Monomial, Vec<usize>)], b: &[(Monomial, Vec<usize>)]| -> Vec<usize> {
                a.iter().map(|x| b.iter().position(|y| y == x).unwrap()).collect()
            };
            let ps = perm(&src_e, &src);
            let pt = perm(&tgt_e, &tgt);
            let got = dr.differential(i, w).unwrap();
            for r in 0..tgt_e.len() {
                for c in 0..src_e.len() {
                    assert_eq!(got[(r, c)], oracle[(pt[r], ps[c])], "i = {}, w = {}", i, w);
                }
            }
        }
    }
}

#[test]
fn sign_fix_properties() {
    let dr = de_rham_complex(&kxx(), 2).unwrap();
    for w in 0..=4 {
        let p = dr.piece(w).unwrap();
        assert_eq!(p.convention(), Convention::Antilinear);
        let f = sign_fix(&p);
        assert_eq!(f.convention(), Convention::Equivariant);
        f.validate().unwrap();
        assert_eq!(sign_fix(&f), p);
    }
    let mut sigma = BTreeMap::new();
    sigma.insert(0, IntMatrix::from_i64(&[&[0, 1], &[1, 0]]));
    sigma.insert(1, IntMatrix::from_i64(&[&[1]]));
    let m = InvolutiveCochainComplex::new(sigma, BTreeMap::new(), Convention::Equivariant).unwrap();
    let f = sign_fix(&m);
    assert_eq!(f.sigma(0), m.sigma(0));
    assert_eq!(f.sigma(1), m.sigma(1).neg());
}

#[test]
fn invalid_complexes_rejected() {
    let mut sigma = BTreeMap::new();
    sigma.insert(0, IntMatrix::from_i64(&[&[1]]));
    sigma.insert(1, IntMatrix::from_i64(&[&[1]]));
    let mut d = BTreeMap::new();
    d.insert(0, IntMatrix::from_i64(&[&[1]]));
    // d sigma = sigma d, so not antilinear
    let e = InvolutiveCochainComplex::new(sigma.clone(), d.clone(), Convention::Antilinear).unwrap_err();
    assert!(matches!(e, DifferentialsError::InvalidComplex { degree: 0, .. }));
    assert!(InvolutiveCochainComplex::new(sigma, d, Convention::Equivariant).is_ok());
}

#[test]
fn zero_complex_cohomology() {
    let z = InvolutiveCochainComplex::zero(Convention::Antilinear);
    let h = inv_cochain_cohomology(&z, 0);
    assert!(h.group.is_trivial());
    assert_eq!((h.plus, h.minus), (0, 0));
}

#[test]
fn residual_action_on_cohomology() {
    // Q[y] with y -> -y: H^0 in weight 0 is fixed
    let y = RatPoly::var(1, 0);
    let ring = InvolutiveRing::polynomial(BaseRing::Z, names(&["y"]), vec![y.neg()]).unwrap();
    let b = TambaraPresentation::fixed_point_green(ring, 8).unwrap();
    let dr = de_rham_complex(&b, 1).unwrap();
    assert_eq!(dr.cotangent().fmt_sigma(), "dy ↦ -dy");
    let p = dr.piece(0).unwrap();
    let h = inv_cochain_cohomology(&p, 0);
    assert_eq!((h.plus, h.minus), (1, 0));
    for w in 1..=6 {
        let p = dr.piece(w).unwrap();
        assert_eq!(inv_cochain_cohomology(&p, 0).rank(), 0);
        assert_eq!(inv_cochain_cohomology(&p, 1).rank(), 0);
    }
}

#[test]
fn hkr_agrees_for_both_monogenic_algebras() {
    for b in [kx(), kxx()] {
        let report = check_hkr(&b, 4, 4).unwrap();
        assert!(report.agrees(), "{:?}", report.mismatches());
        assert_eq!(report.rows.len(), 25);
    }
}

fn small_poly(nvars: usize) -> impl Strategy<Value = RatPoly> {
    prop::collection::vec((prop::collection::vec(0u32..3, nvars), -3i64..4), 0..4)
        .prop_map(move |terms| RatPoly::from_terms(nvars, terms.into_iter().map(|(m, c)| (m, rat(c)))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn derivation_is_leibniz_and_compatible_with_sigma(a in small_poly(2), b in small_poly(2)) {
        for t in [hyperelliptic(&[0, -1, 0, 1]), TambaraPresentation::free_involutive_free(BaseRing::Z, 8).unwrap()] {
            let l = cotangent_module(&t).unwrap();
            let ring = t.under();
            let (a, b) = (ring.nf(&a), ring.nf(&b));
            let lhs = l.d(&ring.mul(&a, &b));
            let da = l.d(&a);
            let db = l.d(&b);
            let rhs: Vec<RatPoly> = da.iter().zip(&db).map(|(x, y)| ring.add(&ring.mul(&b, x), &ring.mul(&a, y))).collect();
            let diff: Vec<RatPoly> = lhs.iter().zip(&rhs).map(|(x, y)| x.sub(y)).collect();
            prop_assert!(l.is_zero(&diff));
            let s1 = l.sigma_form(&l.d(&a));
            let s2 = l.d(&ring.apply_sigma(&a));
            let diff: Vec<RatPoly> = s1.iter().zip(&s2).map(|(x, y)| x.sub(y)).collect();
            prop_assert!(l.is_zero(&diff));
        }
    }

    #[test]
    fn de_rham_pieces_are_antilinear(w in 0u32..=8) {
        let y = RatPoly::var(2, 1);
        let x = RatPoly::var(2, 0);
        let ring = InvolutiveRing::polynomial(BaseRing::Z, names(&["x", "y"]), vec![x, y.neg()]).unwrap();
        for b in [kx(), kxx(), TambaraPresentation::fixed_point_green(ring.clone(), 8).unwrap()] {
            let dr = de_rham_complex(&b, 2).unwrap();
            let p = dr.piece(w).unwrap();
            p.validate().unwrap();
            sign_fix(&p).validate().unwrap();
        }
    }
}

