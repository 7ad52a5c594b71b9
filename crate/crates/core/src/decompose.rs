//! Endomorphism rings, indecomposability, isomorphism and Krull–Schmidt
//! decomposition.

use strata_linalg::{Field, Matrix, Scalar, Subspace};

use crate::module::{hom_space, HomSpace, Module, Morphism};
use crate::search::{candidates, rng, random_vector, SearchConfig};
use crate::CoreError;

/// Random combinations tried before any exhaustive isomorphism search.
const ISO_RANDOM_TRIES: usize = 64;

/// Characteristic guard for the trace-form radical.
pub fn trace_form_guard(field: Field, n: usize) -> Result<(), CoreError> {
    match field {
        Field::Rational => Ok(()),
        Field::Prime(p) if p as usize > n => Ok(()),
        Field::Prime(p) => Err(CoreError::Guard(format!(
            "trace-form radical needs p > {n}, the field has p = {p}"
        ))),
    }
}

/// `End(M)` with its radical, in coordinates of a hom-space basis.
#[derive(Clone, Debug)]
pub struct EndoRing {
    pub hom: HomSpace,
    /// Radical as a subspace of coefficient space `k^{dim End}`.
    pub radical: Subspace,
    /// Hom-basis indices whose images span `End/rad`.
    pub top_lifts: Vec<usize>,
}

impl EndoRing {
    pub fn new(m: &Module) -> Result<EndoRing, CoreError> {
        let f = m.field();
        trace_form_guard(f, m.dim())?;
        let hom = hom_space(m, m)?;
        let globals: Vec<Matrix> = hom.basis().iter().map(Morphism::global).collect();
        let h = globals.len();
        let mut gram = Matrix::zeros(f, h, h);
        for a in 0..h {
            for b in a..h {
                let t = globals[a].mul(&globals[b]).trace();
                gram.set(a, b, t.clone());
                gram.set(b, a, t);
            }
        }
        let radical = if h == 0 {
            Subspace::zero(f, 0)
        } else {
            Subspace::from_columns(&gram.kernel_matrix())
        };
        let top_lifts = radical.complement_indices();
        Ok(EndoRing {
            hom,
            radical,
            top_lifts,
        })
    }

    pub fn dim(&self) -> usize {
        self.hom.dim()
    }

    /// `dim End(M)/rad End(M)`.
    pub fn residue_dim(&self) -> usize {
        self.top_lifts.len()
    }

    pub fn radical_basis(&self) -> Vec<Morphism> {
        self.radical
            .basis()
            .iter()
            .map(|c| self.hom.element(c))
            .collect()
    }

    /// Whether a hom-space element lies in the radical.
    pub fn in_radical(&self, x: &Morphism) -> bool {
        let c = self.hom.coords(x);
        self.radical.reduce(&c).iter().all(Scalar::is_zero)
    }
}

/// A decomposition `M = im e ⊕ ker e` from an idempotent endomorphism.
#[derive(Clone, Debug)]
pub struct Splitting {
    pub idempotent: Morphism,
    pub parts: [Summand; 2],
}

/// A direct summand with its inclusion and the complementary projection.
#[derive(Clone, Debug)]
pub struct Summand {
    pub module: Module,
    pub incl: Morphism,
    pub proj: Morphism,
}

#[derive(Clone, Debug)]
pub enum Indecomposability {
    Indecomposable { residue_dim: usize },
    Decomposable(Box<Splitting>),
    Undecided { residue_dim: usize, tried: u64 },
}

impl Indecomposability {
    pub fn is_indecomposable(&self) -> bool {
        matches!(self, Indecomposability::Indecomposable { .. })
    }
    pub fn is_decided(&self) -> bool {
        !matches!(self, Indecomposability::Undecided { .. })
    }
}

fn is_nilpotent(x: &Morphism) -> bool {
    let n = x.source().dim() as u32;
    x.mats().iter().all(|m| m.pow(n.max(1)).is_zero())
}

/// Fitting decomposition for an endomorphism that is neither nilpotent nor
/// invertible: `M = im x^n ⊕ ker x^n`.
pub fn fitting_split(x: &Morphism) -> Splitting {
    let m = x.source();
    let f = m.field();
    let n = m.dim() as u32;
    let y = Morphism::unchecked(m, m, x.mats().iter().map(|a| a.pow(n)).collect());
    let (im, im_incl) = y.image().to_module();
    let (ker, ker_incl) = y.kernel().to_module();
    let mut proj_im = Vec::new();
    let mut proj_ker = Vec::new();
    let mut idem = Vec::new();
    for v in 0..m.dims().len() {
        let r = im.dims()[v];
        let b = Matrix::hstack(f, m.dims()[v], &[im_incl.mat(v), ker_incl.mat(v)]);
        let inv = b.inverse().expect("Fitting decomposition is direct");
        let p1 = inv.block(0, 0, r, m.dims()[v]);
        let p2 = inv.block(r, 0, m.dims()[v] - r, m.dims()[v]);
        idem.push(im_incl.mat(v).mul(&p1));
        proj_im.push(p1);
        proj_ker.push(p2);
    }
    Splitting {
        idempotent: Morphism::unchecked(m, m, idem),
        parts: [
            Summand {
                proj: Morphism::unchecked(m, &im, proj_im),
                module: im,
                incl: im_incl,
            },
            Summand {
                proj: Morphism::unchecked(m, &ker, proj_ker),
                module: ker,
                incl: ker_incl,
            },
        ],
    }
}

fn splits(x: &Morphism) -> bool {
    !x.is_iso() && !is_nilpotent(x)
}

/// Decide whether `M` is indecomposable, via the local-ring test on `End(M)`.
pub fn is_indecomposable(m: &Module, cfg: &SearchConfig) -> Result<Indecomposability, CoreError> {
    if m.is_zero() {
        return Err(CoreError::Input("the zero module has no indecomposability verdict".into()));
    }
    let e = EndoRing::new(m)?;
    let q = e.residue_dim();
    if q == 1 {
        return Ok(Indecomposability::Indecomposable { residue_dim: 1 });
    }
    let lifts: Vec<&Morphism> = e.top_lifts.iter().map(|&i| &e.hom.basis()[i]).collect();
    let mut tried = 0u64;
    for x in &lifts {
        tried += 1;
        if splits(x) {
            return Ok(Indecomposability::Decomposable(Box::new(fitting_split(x))));
        }
    }
    let f = m.field();
    if let Some(p) = f.order() {
        let id = Morphism::identity(m);
        for x in &lifts {
            for k in 1..p {
                if tried >= cfg.budget {
                    break;
                }
                tried += 1;
                let y = x.sub(&id.scale(&f.element(k)));
                if splits(&y) {
                    return Ok(Indecomposability::Decomposable(Box::new(fitting_split(&y))));
                }
            }
        }
    }
    let cands = candidates(f, q, cfg);
    let exhaustive = cands.exhaustive;
    for c in cands {
        tried += 1;
        let mut x = Morphism::zero(m, m);
        for (coef, b) in c.iter().zip(&lifts) {
            if !coef.is_zero() {
                x = x.add(&b.scale(coef));
            }
        }
        if splits(&x) {
            return Ok(Indecomposability::Decomposable(Box::new(fitting_split(&x))));
        }
    }
    if exhaustive {
        Ok(Indecomposability::Indecomposable { residue_dim: q })
    } else {
        Ok(Indecomposability::Undecided { residue_dim: q, tried })
    }
}

/// Direct-sum decomposition into indecomposables, sorted by
/// (dimension vector, canonical form). `None` when some split was undecided.
pub fn decompose(m: &Module, cfg: &SearchConfig) -> Result<Option<Vec<Summand>>, CoreError> {
    let mut out = Vec::new();
    if m.is_zero() {
        return Ok(Some(out));
    }
    let mut stack = vec![Summand {
        module: m.clone(),
        incl: Morphism::identity(m),
        proj: Morphism::identity(m),
    }];
    while let Some(s) = stack.pop() {
        match is_indecomposable(&s.module, cfg)? {
            Indecomposability::Indecomposable { .. } => out.push(s),
            Indecomposability::Undecided { .. } => return Ok(None),
            Indecomposability::Decomposable(sp) => {
                for part in sp.parts.iter().rev() {
                    stack.push(Summand {
                        module: part.module.clone(),
                        incl: s.incl.compose(&part.incl),
                        proj: part.proj.compose(&s.proj),
                    });
                }
            }
        }
    }
    out.sort_by_cached_key(|s| s.module.canonical_key());
    Ok(Some(out))
}

#[derive(Clone, Debug)]
pub enum Isomorphism {
    Isomorphic(Morphism),
    NotIsomorphic,
    Undecided,
}

impl Isomorphism {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, Isomorphism::Isomorphic(_))
    }
    pub fn witness(&self) -> Option<&Morphism> {
        match self {
            Isomorphism::Isomorphic(f) => Some(f),
            _ => None,
        }
    }
}

/// Decide `M ≅ N`, returning an explicit isomorphism when one is found.
pub fn is_isomorphic(m: &Module, n: &Module, cfg: &SearchConfig) -> Result<Isomorphism, CoreError> {
    if !m.same_algebra(n) {
        return Err(CoreError::AlgebraMismatch);
    }
    if m.dims() != n.dims() {
        return Ok(Isomorphism::NotIsomorphic);
    }
    let h = hom_space(m, n)?;
    if m.is_zero() {
        return Ok(Isomorphism::Isomorphic(Morphism::zero(m, n)));
    }
    if h.is_zero() {
        return Ok(Isomorphism::NotIsomorphic);
    }
    if let Some(f) = h.basis().iter().find(|f| f.is_iso()) {
        return Ok(Isomorphism::Isomorphic(f.clone()));
    }
    let field = m.field();
    let mut r = rng(cfg.seed);
    for _ in 0..ISO_RANDOM_TRIES {
        let f = h.element(&random_vector(field, h.dim(), &mut r));
        if f.is_iso() {
            return Ok(Isomorphism::Isomorphic(f));
        }
    }
    // Local endomorphism ring: M ≅ N iff some g∘f is invertible.
    for (a, b, flip) in [(m, n, false), (n, m, true)] {
        if !is_indecomposable(a, cfg)?.is_indecomposable() {
            continue;
        }
        let back = hom_space(b, a)?;
        let fwd = hom_space(a, b)?;
        for f in fwd.basis() {
            for g in back.basis() {
                if g.compose(f).is_iso() {
                    let iso = if flip { f.inverse().expect("split mono of equal dimension") } else { f.clone() };
                    return Ok(Isomorphism::Isomorphic(iso));
                }
            }
        }
        return Ok(Isomorphism::NotIsomorphic);
    }
    let cands = candidates(field, h.dim(), cfg);
    if cands.exhaustive {
        for c in cands {
            let f = h.element(&c);
            if f.is_iso() {
                return Ok(Isomorphism::Isomorphic(f));
            }
        }
        return Ok(Isomorphism::NotIsomorphic);
    }
    match_summands(m, n, cfg)
}

fn match_summands(m: &Module, n: &Module, cfg: &SearchConfig) -> Result<Isomorphism, CoreError> {
    let (Some(dm), Some(dn)) = (decompose(m, cfg)?, decompose(n, cfg)?) else {
        return Ok(Isomorphism::Undecided);
    };
    if dm.len() != dn.len() {
        return Ok(Isomorphism::NotIsomorphic);
    }
    let mut used = vec![false; dn.len()];
    let mut total = Morphism::zero(m, n);
    for s in &dm {
        let mut found = false;
        for (j, t) in dn.iter().enumerate() {
            if used[j] || s.module.dims() != t.module.dims() {
                continue;
            }
            match is_isomorphic(&s.module, &t.module, cfg)? {
                Isomorphism::Isomorphic(phi) => {
                    used[j] = true;
                    total = total.add(&t.incl.compose(&phi).compose(&s.proj));
                    found = true;
                    break;
                }
                Isomorphism::Undecided => return Ok(Isomorphism::Undecided),
                Isomorphism::NotIsomorphic => {}
            }
        }
        if !found {
            return Ok(Isomorphism::NotIsomorphic);
        }
    }
    Ok(Isomorphism::Isomorphic(total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Algebra, Arrow, Quiver, DEFAULT_DEGREE_BOUND};
    use crate::module::{direct_sum, projective, simple};
    use std::sync::Arc;

    fn kronecker(f: Field) -> Arc<Algebra> {
        let q = Quiver::new(
            2,
            vec![
                Arrow { name: "a".into(), source: 0, target: 1 },
                Arrow { name: "b".into(), source: 0, target: 1 },
            ],
        )
        .unwrap();
        Arc::new(Algebra::bound_quiver(f, q, vec![], DEFAULT_DEGREE_BOUND).unwrap())
    }

    fn tube(alg: &Arc<Algebra>, n: usize) -> Module {
        let f = alg.field();
        let mut j = Matrix::identity(f, n);
        for i in 0..n - 1 {
            j.set(i, i + 1, f.one());
        }
        Module::new(alg, vec![n, n], vec![Matrix::identity(f, n), j]).unwrap()
    }

    #[test]
    fn simple_is_indecomposable() {
        let alg = kronecker(Field::prime(101).unwrap());
        let r = is_indecomposable(&simple(&alg, 0), &SearchConfig::default()).unwrap();
        assert!(r.is_indecomposable());
    }

    #[test]
    fn tube_module_is_indecomposable() {
        let alg = kronecker(Field::prime(101).unwrap());
        let r2 = tube(&alg, 2);
        let e = EndoRing::new(&r2).unwrap();
        assert_eq!(e.dim(), 2);
        assert_eq!(e.residue_dim(), 1);
        assert!(is_indecomposable(&r2, &SearchConfig::default()).unwrap().is_indecomposable());
    }

    #[test]
    fn split_sum_yields_exact_idempotent() {
        let alg = kronecker(Field::prime(101).unwrap());
        let s = direct_sum(&alg, &[projective(&alg, 0), simple(&alg, 1)]).module;
        match is_indecomposable(&s, &SearchConfig::default()).unwrap() {
            Indecomposability::Decomposable(sp) => {
                let e = &sp.idempotent;
                assert_eq!(e.compose(e).global(), e.global());
                assert!(!e.is_zero() && !e.is_iso());
            }
            other => panic!("expected a splitting, got {other:?}"),
        }
    }

    #[test]
    fn decompose_recovers_summands() {
        let alg = kronecker(Field::Rational);
        let parts = [simple(&alg, 0), simple(&alg, 0), tube(&alg, 2)];
        let s = direct_sum(&alg, &parts).module;
        let d = decompose(&s, &SearchConfig::default()).unwrap().unwrap();
        let dims: Vec<_> = d.iter().map(|x| x.module.dims().to_vec()).collect();
        assert_eq!(dims, vec![vec![1, 0], vec![1, 0], vec![2, 2]]);
        let mut acc = Morphism::zero(&s, &s);
        for x in &d {
            acc = acc.add(&x.incl.compose(&x.proj));
        }
        assert!(acc.global().is_identity());
    }

    #[test]
    fn conjugated_tube_is_isomorphic() {
        let alg = kronecker(Field::prime(101).unwrap());
        let f = alg.field();
        let r1 = Module::new(&alg, vec![1, 1], vec![Matrix::identity(f, 1), Matrix::identity(f, 1)]).unwrap();
        let c = Matrix::from_i64(f, 1, 1, &[5]);
        let conj = Module::new(&alg, vec![1, 1], vec![c.clone(), c]).unwrap();
        let iso = is_isomorphic(&r1, &conj, &SearchConfig::default()).unwrap();
        assert!(iso.witness().unwrap().is_iso());
        let other = Module::new(&alg, vec![1, 1], vec![Matrix::identity(f, 1), Matrix::zeros(f, 1, 1)]).unwrap();
        assert!(matches!(
            is_isomorphic(&r1, &other, &SearchConfig::default()).unwrap(),
            Isomorphism::NotIsomorphic
        ));
    }

    #[test]
    fn sums_compared_by_summands() {
        let alg = kronecker(Field::prime(101).unwrap());
        let a = direct_sum(&alg, &[tube(&alg, 1), simple(&alg, 1)]).module;
        let b = direct_sum(&alg, &[simple(&alg, 1), tube(&alg, 1)]).module;
        let r = is_isomorphic(&a, &b, &SearchConfig::default()).unwrap();
        assert!(r.witness().unwrap().is_iso());
    }

    #[test]
    fn guard_rejects_small_characteristic() {
        let alg = kronecker(Field::prime(2).unwrap());
        let err = EndoRing::new(&tube(&alg, 2)).unwrap_err();
        assert!(matches!(err, CoreError::Guard(_)));
    }
}
