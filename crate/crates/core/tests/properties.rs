use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use strata_core::algebra::DEFAULT_DEGREE_BOUND;
use strata_core::decompose::{decompose, is_isomorphic};
use strata_core::filtration::{membership, reorder, LinearOrder};
use strata_core::homology::{ext1, pullback};
use strata_core::module::{direct_sum, hom_space, projective, simple, socle, Module, Morphism};
use strata_core::search::SearchConfig;
use strata_core::{Algebra, Arrow, Field, Matrix, Quiver, Relation, Scalar};

fn field() -> Field {
    Field::prime(101).unwrap()
}

fn arrow(name: &str, source: usize, target: usize) -> Arrow {
    Arrow {
        name: name.into(),
        source,
        target,
    }
}

fn a3() -> Arc<Algebra> {
    static ALG: OnceLock<Arc<Algebra>> = OnceLock::new();
    ALG.get_or_init(|| {
        let q = Quiver::new(3, vec![arrow("a", 0, 1), arrow("b", 1, 2)]).unwrap();
        Arc::new(Algebra::bound_quiver(field(), q, vec![], DEFAULT_DEGREE_BOUND).unwrap())
    })
    .clone()
}

fn kronecker() -> Arc<Algebra> {
    static ALG: OnceLock<Arc<Algebra>> = OnceLock::new();
    ALG.get_or_init(|| {
        let q = Quiver::new(2, vec![arrow("a", 0, 1), arrow("b", 0, 1)]).unwrap();
        Arc::new(Algebra::bound_quiver(field(), q, vec![], DEFAULT_DEGREE_BOUND).unwrap())
    })
    .clone()
}

fn looped() -> Arc<Algebra> {
    static ALG: OnceLock<Arc<Algebra>> = OnceLock::new();
    ALG.get_or_init(|| {
        let q = Quiver::new(3, vec![arrow("alpha", 1, 0), arrow("beta", 1, 1), arrow("gamma", 2, 1)]).unwrap();
        let rel = |p: Vec<usize>| Relation {
            terms: vec![(field().one(), p)],
        };
        let rels = vec![rel(vec![1, 1]), rel(vec![0, 1]), rel(vec![1, 2])];
        Arc::new(Algebra::bound_quiver(field(), q, rels, DEFAULT_DEGREE_BOUND).unwrap())
    })
    .clone()
}

fn algebras() -> Vec<Arc<Algebra>> {
    vec![a3(), kronecker(), looped()]
}

/// Arrow list `(source, target)` of a path algebra without relations.
fn arrows_of(alg: &Arc<Algebra>) -> Vec<(usize, usize)> {
    alg.quiver().unwrap().arrows.iter().map(|a| (a.source, a.target)).collect()
}

/// A random representation of a quiver without relations.
fn representation(alg: Arc<Algebra>, max_dim: usize) -> impl Strategy<Value = Module> {
    let n = alg.vertices();
    proptest::collection::vec(0..=max_dim, n).prop_flat_map(move |dims| {
        let arrows = arrows_of(&alg);
        let sizes: Vec<usize> = arrows.iter().map(|&(s, t)| dims[s] * dims[t]).collect();
        let total: usize = sizes.iter().sum();
        let alg = alg.clone();
        proptest::collection::vec(-2i64..3, total).prop_map(move |entries| {
            let f = alg.field();
            let mut off = 0;
            let gens = arrows
                .iter()
                .map(|&(s, t)| {
                    let m = Matrix::from_i64(f, dims[t], dims[s], &entries[off..off + dims[s] * dims[t]]);
                    off += dims[s] * dims[t];
                    m
                })
                .collect();
            Module::new(&alg, dims.clone(), gens).unwrap()
        })
    })
}

fn hereditary_module() -> impl Strategy<Value = Module> {
    prop_oneof![representation(a3(), 2), representation(kronecker(), 3)]
}

fn hereditary_pair() -> impl Strategy<Value = (Module, Module)> {
    prop_oneof![
        (representation(a3(), 2), representation(a3(), 2)),
        (representation(kronecker(), 3), representation(kronecker(), 3)),
    ]
}

/// Euler form from the arrow list, independent of any homology computation.
fn euler(alg: &Arc<Algebra>, x: &[usize], y: &[usize]) -> i64 {
    let diag: i64 = x.iter().zip(y).map(|(a, b)| (a * b) as i64).sum();
    let off: i64 = arrows_of(alg).iter().map(|&(s, t)| (x[s] * y[t]) as i64).sum();
    diag - off
}

fn coeffs(v: &[i64]) -> Vec<Scalar> {
    v.iter().map(|&x| field().from_i64(x)).collect()
}

/// Product of two elements given in basis coordinates.
fn mul(alg: &Algebra, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
    let f = alg.field();
    let mut out = vec![f.zero(); alg.dim()];
    for (a, xa) in x.iter().enumerate() {
        for (b, yb) in y.iter().enumerate() {
            if xa.is_zero() || yb.is_zero() {
                continue;
            }
            for (c, s) in alg.product(a, b) {
                out[*c] = f.add(&out[*c], &f.mul(&f.mul(xa, yb), s));
            }
        }
    }
    out
}

fn cfg() -> SearchConfig {
    SearchConfig::default()
}

fn iso(a: &Module, b: &Module) -> bool {
    is_isomorphic(a, b, &cfg()).unwrap().is_isomorphic()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn multiplication_is_associative(which in 0usize..3, seed in proptest::collection::vec(-3i64..4, 3 * 16)) {
        let alg = &algebras()[which];
        let d = alg.dim();
        let x = coeffs(&seed[..d.min(16)]);
        let pad = |mut v: Vec<Scalar>| { v.resize(d, field().zero()); v };
        let (x, y, z) = (pad(x), pad(coeffs(&seed[16..16 + d.min(16)])), pad(coeffs(&seed[32..32 + d.min(16)])));
        prop_assert_eq!(mul(alg, &mul(alg, &x, &y), &z), mul(alg, &x, &mul(alg, &y, &z)));
    }

    #[test]
    fn euler_form_equals_hom_minus_ext((m, n) in hereditary_pair()) {
        let alg = m.algebra().clone();
        let hom = hom_space(&m, &n).unwrap().dim() as i64;
        let ext = ext1(&m, &n).unwrap().dim() as i64;
        prop_assert_eq!(hom - ext, euler(&alg, m.dims(), n.dims()));
    }

    #[test]
    fn hom_basis_intertwines((m, n) in hereditary_pair()) {
        let h = hom_space(&m, &n).unwrap();
        for f in h.basis() {
            prop_assert!(f.intertwines());
        }
    }

    #[test]
    fn duality_is_an_involution_reversing_hom((m, n) in hereditary_pair()) {
        let op = Arc::new(m.algebra().opposite());
        let (dm, dn) = (m.dual_over(&op), n.dual_over(&op));
        prop_assert_eq!(dm.dims(), m.dims());
        prop_assert!(iso(&dm.dual_over(m.algebra()), &m));
        prop_assert_eq!(hom_space(&m, &n).unwrap().dim(), hom_space(&dn, &dm).unwrap().dim());
    }

    #[test]
    fn realized_extensions_are_exact_and_split_iff_zero((m, n) in hereditary_pair(), c in proptest::collection::vec(-1i64..2, 8)) {
        let e = ext1(&m, &n).unwrap();
        let cocycle = e.cocycle(&coeffs(&c[..e.dim().min(8)]));
        let ses = e.realize(&cocycle);
        prop_assert!(ses.inject.is_injective());
        prop_assert!(ses.project.is_surjective());
        prop_assert!(ses.project.compose(&ses.inject).is_zero());
        let sum: Vec<usize> = m.dims().iter().zip(n.dims()).map(|(a, b)| a + b).collect();
        prop_assert_eq!(ses.middle().dims(), &sum[..]);
        prop_assert_eq!(ses.is_split().unwrap(), e.is_zero_class(&cocycle));
    }

    #[test]
    fn pullback_along_identity_is_the_sequence((m, n) in hereditary_pair(), c in proptest::collection::vec(-1i64..2, 8)) {
        let e = ext1(&m, &n).unwrap();
        let ses = e.realize(&e.cocycle(&coeffs(&c[..e.dim().min(8)])));
        let pb = pullback(&ses, &Morphism::identity(ses.right())).unwrap();
        prop_assert!(iso(pb.ses.middle(), ses.middle()));
        prop_assert_eq!(pb.ses.is_split().unwrap(), ses.is_split().unwrap());
    }

    #[test]
    fn decomposition_is_additive((m, n) in hereditary_pair()) {
        let alg = m.algebra().clone();
        let parts = |x: &Module| decompose(x, &cfg()).unwrap().expect("decided");
        let (pm, pn) = (parts(&m), parts(&n));
        let sum = direct_sum(&alg, &[m.clone(), n.clone()]).module;
        let ps = parts(&sum);
        prop_assert_eq!(ps.len(), pm.len() + pn.len());
        let mut total = vec![0; alg.vertices()];
        for s in &ps {
            for (t, d) in total.iter_mut().zip(s.module.dims()) {
                *t += d;
            }
        }
        prop_assert_eq!(&total[..], sum.dims());
    }

    #[test]
    fn reordering_keeps_factors(picks in proptest::collection::vec((0usize..3, any::<bool>(), -2i64..3), 1..4)) {
        let alg = a3();
        let top_two = socle(&projective(&alg, 0)).quotient().module;
        let psi = vec![simple(&alg, 2), simple(&alg, 0), top_two];
        let mut x = psi[picks[0].0].clone();
        for &(j, below, c) in &picks[1..] {
            let (lo, hi) = if below { (psi[j].clone(), x.clone()) } else { (x.clone(), psi[j].clone()) };
            let e = ext1(&hi, &lo).unwrap();
            let cs = vec![field().from_i64(c); e.dim()];
            x = e.realize(&e.cocycle(&cs)).middle().clone();
        }
        let natural = LinearOrder::natural(3);
        let reversed = natural.reversed();
        let cert = membership(&x, &psi, &reversed, &cfg()).unwrap().certificate().cloned().expect("filtered");
        let fixed = reorder(&cert, &psi, &natural).expect("costratifying family reorders");
        let mut before = cert.indices();
        let mut after = fixed.indices();
        before.sort();
        after.sort();
        prop_assert_eq!(before, after);
        prop_assert!(fixed.verify(&psi, &natural).is_ok());
        prop_assert!(fixed.ordered);
    }

    #[test]
    fn order_operations(seq in Just((0..5).collect::<Vec<usize>>()).prop_shuffle(), i in 0usize..5) {
        let ord = LinearOrder::from_sequence(seq).unwrap();
        prop_assert_eq!(ord.reversed().reversed(), ord.clone());
        let mut all = ord.up_to(i);
        all.extend(ord.above(i));
        prop_assert_eq!(&all[..], ord.sequence());
        prop_assert_eq!(ord.up_to(i).last().copied(), Some(i));
    }

    #[test]
    fn hereditary_modules_have_projective_syzygies(m in hereditary_module()) {
        let (omega, _, _) = strata_core::module::syzygy(&m);
        for s in decompose(&omega, &cfg()).unwrap().expect("decided") {
            let tops = strata_core::module::projective_cover(&s.module).free.tops;
            prop_assert_eq!(tops.len(), 1);
            prop_assert!(iso(&s.module, &projective(m.algebra(), tops[0])));
        }
    }
}
