//! Ext¹ through a fixed projective cover, explicit extensions, split tests,
//! pullbacks, pushouts and Tor₁.

use strata_linalg::{Matrix, Scalar, Subspace};

use crate::module::{
    direct_sum, hom_space, projective_cover, FreeModule, HomSpace, Module, Morphism,
    ProjectiveCover, Submodule,
};
use crate::CoreError;

/// `0 → left → middle → right → 0`, exactness verified at construction.
#[derive(Clone, Debug)]
pub struct ShortExactSequence {
    pub inject: Morphism,
    pub project: Morphism,
}

impl ShortExactSequence {
    pub fn new(inject: Morphism, project: Morphism) -> Result<Self, CoreError> {
        if inject.target().dims() != project.source().dims() {
            return Err(CoreError::Input("maps are not composable".into()));
        }
        if !inject.is_injective() {
            return Err(CoreError::Input("left map is not injective".into()));
        }
        if !project.is_surjective() {
            return Err(CoreError::Input("right map is not surjective".into()));
        }
        if !project.compose(&inject).is_zero() || inject.rank() + project.rank() != inject.target().dim() {
            return Err(CoreError::Input("sequence is not exact in the middle".into()));
        }
        Ok(ShortExactSequence { inject, project })
    }

    pub fn left(&self) -> &Module {
        self.inject.source()
    }
    pub fn middle(&self) -> &Module {
        self.inject.target()
    }
    pub fn right(&self) -> &Module {
        self.project.target()
    }

    /// A retraction `r` with `r ∘ inject = 1`, if the sequence splits.
    pub fn retraction(&self) -> Result<Option<Morphism>, CoreError> {
        let h = hom_space(self.middle(), self.left())?;
        let id = Morphism::identity(self.left());
        Ok(solve_in_hom(&h, |r| r.compose(&self.inject), &id))
    }

    /// A section `s` with `project ∘ s = 1`, if the sequence splits.
    pub fn section(&self) -> Result<Option<Morphism>, CoreError> {
        let h = hom_space(self.right(), self.middle())?;
        let id = Morphism::identity(self.right());
        Ok(solve_in_hom(&h, |s| self.project.compose(s), &id))
    }

    pub fn is_split(&self) -> Result<bool, CoreError> {
        Ok(self.retraction()?.is_some())
    }
}

/// Some `x ∈ h` with `op(x) = target`, where `op` is linear.
pub fn solve_in_hom(h: &HomSpace, op: impl Fn(&Morphism) -> Morphism, target: &Morphism) -> Option<Morphism> {
    let f = h.source().field();
    let rhs = target.flatten();
    if h.is_zero() {
        return rhs.iter().all(Scalar::is_zero).then(|| Morphism::zero(h.source(), h.target()));
    }
    let cols: Vec<Vec<Scalar>> = h.basis().iter().map(|b| op(b).flatten()).collect();
    let a = Matrix::from_columns(f, rhs.len(), &cols);
    a.solve_one(&rhs).map(|x| h.element(&x))
}

/// The unique `h` with `incl ∘ h = g`, if `g` lands in the image of the mono `incl`.
pub fn factor_through_mono(g: &Morphism, incl: &Morphism) -> Option<Morphism> {
    let mats: Option<Vec<Matrix>> = g
        .mats()
        .iter()
        .zip(incl.mats())
        .map(|(gv, iv)| iv.solve_matrix(gv))
        .collect();
    Some(Morphism::unchecked(g.source(), incl.source(), mats?))
}

/// `Ext¹(M, N) = Hom(ΩM, N) / ι*Hom(P₀, N)` for the minimal cover of `M`.
#[derive(Clone, Debug)]
pub struct ExtSpace {
    pub cover: ProjectiveCover,
    /// `ι: ΩM → P₀`.
    pub syzygy_incl: Morphism,
    pub cocycles: HomSpace,
    /// Coboundaries, in cocycle coordinates.
    pub coboundaries: Subspace,
    /// Cocycle basis indices representing a basis of Ext¹.
    pub classes: Vec<usize>,
}

impl ExtSpace {
    pub fn dim(&self) -> usize {
        self.classes.len()
    }
    pub fn is_zero(&self) -> bool {
        self.classes.is_empty()
    }
    pub fn left(&self) -> &Module {
        self.cover.pi.target()
    }
    pub fn right(&self) -> &Module {
        self.cocycles.target()
    }

    /// Cocycle of the `k`-th basis class.
    pub fn class(&self, k: usize) -> Morphism {
        self.cocycles.basis()[self.classes[k]].clone()
    }

    /// Cocycle for a coefficient vector on the class basis.
    pub fn cocycle(&self, coeffs: &[Scalar]) -> Morphism {
        let mut acc = Morphism::zero(self.cocycles.source(), self.cocycles.target());
        for (k, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add(&self.class(k).scale(c));
            }
        }
        acc
    }

    /// Coordinates of the class of a cocycle.
    pub fn class_coords(&self, cocycle: &Morphism) -> Vec<Scalar> {
        let red = self.coboundaries.reduce(&self.cocycles.coords(cocycle));
        self.classes.iter().map(|&i| red[i].clone()).collect()
    }

    pub fn is_zero_class(&self, cocycle: &Morphism) -> bool {
        self.class_coords(cocycle).iter().all(Scalar::is_zero)
    }

    /// Pushout of `0 → ΩM → P₀ → M → 0` along a cocycle: `0 → N → E → M → 0`.
    pub fn realize(&self, cocycle: &Morphism) -> ShortExactSequence {
        let n = self.right();
        let p0 = self.syzygy_incl.target();
        let alg = n.algebra();
        let sum = direct_sum(alg, &[n.clone(), p0.clone()]);
        let rel = sum.incl[0]
            .compose(cocycle)
            .sub(&sum.incl[1].compose(&self.syzygy_incl));
        let q = rel.image().quotient();
        let inject = q.proj.compose(&sum.incl[0]);
        let down = self.cover.pi.compose(&sum.proj[1]);
        let mats = down
            .mats()
            .iter()
            .zip(&q.section)
            .map(|(d, s)| d.mul(s))
            .collect();
        let project = Morphism::unchecked(&q.module, self.left(), mats);
        ShortExactSequence::new(inject, project).expect("pushout of a short exact sequence")
    }

    pub fn realize_class(&self, k: usize) -> ShortExactSequence {
        self.realize(&self.class(k))
    }
}

pub fn ext1(m: &Module, n: &Module) -> Result<ExtSpace, CoreError> {
    if !m.same_algebra(n) {
        return Err(CoreError::AlgebraMismatch);
    }
    let cover = projective_cover(m);
    let (syz, incl) = cover.pi.kernel().to_module();
    let cocycles = hom_space(&syz, n)?;
    let from_p0 = hom_space(incl.target(), n)?;
    let f = m.field();
    let coords: Vec<Vec<Scalar>> = from_p0
        .basis()
        .iter()
        .map(|g| cocycles.coords(&g.compose(&incl)))
        .collect();
    let coboundaries = Subspace::span(f, cocycles.dim(), &coords)?;
    let classes = coboundaries.complement_indices();
    Ok(ExtSpace {
        cover,
        syzygy_incl: incl,
        cocycles,
        coboundaries,
        classes,
    })
}

pub fn ext1_dim(m: &Module, n: &Module) -> Result<usize, CoreError> {
    Ok(ext1(m, n)?.dim())
}

/// Pullback of `s` along `q: Y → right`, with the comparison map into `s.middle()`.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub ses: ShortExactSequence,
    pub to_middle: Morphism,
}

impl Pullback {
    /// When the pulled-back sequence splits, the lift `q′: Y → middle` with `p ∘ q′ = q`.
    pub fn lift(&self) -> Result<Option<Morphism>, CoreError> {
        Ok(self.ses.section()?.map(|s| self.to_middle.compose(&s)))
    }
}

pub fn pullback(s: &ShortExactSequence, q: &Morphism) -> Result<Pullback, CoreError> {
    if q.target().dims() != s.right().dims() || !q.target().same_algebra(s.right()) {
        return Err(CoreError::Input("pullback map does not end at the right term".into()));
    }
    let alg = s.middle().algebra();
    let y = q.source();
    let sum = direct_sum(alg, &[s.middle().clone(), y.clone()]);
    let diff = s
        .project
        .compose(&sum.proj[0])
        .sub(&q.retype(y, s.right()).compose(&sum.proj[1]));
    let (_, incl) = diff.kernel().to_module();
    let to_middle = sum.proj[0].compose(&incl);
    let project = sum.proj[1].compose(&incl);
    let inject = factor_through_mono(&sum.incl[0].compose(&s.inject), &incl)
        .expect("left term lies in the pullback");
    Ok(Pullback {
        ses: ShortExactSequence::new(inject, project)?,
        to_middle,
    })
}

/// Pushout of `s` along `f: left → N`, with the comparison map out of `s.middle()`.
#[derive(Clone, Debug)]
pub struct Pushout {
    pub ses: ShortExactSequence,
    pub from_middle: Morphism,
}

pub fn pushout(s: &ShortExactSequence, f: &Morphism) -> Result<Pushout, CoreError> {
    if f.source().dims() != s.left().dims() || !f.source().same_algebra(s.left()) {
        return Err(CoreError::Input("pushout map does not start at the left term".into()));
    }
    let alg = s.middle().algebra();
    let n = f.target();
    let f = f.retype(s.left(), n);
    let sum = direct_sum(alg, &[n.clone(), s.middle().clone()]);
    let rel = sum.incl[0].compose(&f).sub(&sum.incl[1].compose(&s.inject));
    let q = rel.image().quotient();
    let inject = q.proj.compose(&sum.incl[0]);
    let down = s.project.compose(&sum.proj[1]);
    let mats = down
        .mats()
        .iter()
        .zip(&q.section)
        .map(|(d, sec)| d.mul(sec))
        .collect();
    let project = Morphism::unchecked(&q.module, s.right(), mats);
    Ok(Pushout {
        ses: ShortExactSequence::new(inject, project)?,
        from_middle: q.proj.compose(&sum.incl[1]),
    })
}

/// `Tor₁(Q, X)` for a right module `Q` (a module over the opposite of
/// `X`'s algebra) from a length-two projective presentation of `X`.
#[derive(Clone, Debug)]
pub struct TorSpace {
    pub dim: usize,
    /// Cycles of `Q ⊗ P₁` spanning a complement of the boundaries.
    pub basis: Vec<Vec<Scalar>>,
}

pub fn tor1(q: &Module, x: &Module) -> Result<TorSpace, CoreError> {
    let op = x.algebra().opposite();
    if q.fingerprint() != crate::module::algebra_fingerprint(&op) {
        return Err(CoreError::Input("the right module is not over the opposite algebra".into()));
    }
    let c0 = projective_cover(x);
    let (k1, i1) = c0.pi.kernel().to_module();
    let c1 = projective_cover(&k1);
    let d1 = i1.compose(&c1.pi);
    let (k2, i2) = c1.pi.kernel().to_module();
    let c2 = projective_cover(&k2);
    let d2 = i2.compose(&c2.pi);
    let t1 = tensor_matrix(q, &c1.free, &c0.free, &d1);
    let t2 = tensor_matrix(q, &c2.free, &c1.free, &d2);
    let cycles = Subspace::from_columns(&t1.kernel_matrix());
    let bounds = Subspace::from_columns(&t2);
    let mut acc = bounds.clone();
    let mut basis = Vec::new();
    for v in cycles.basis() {
        if !acc.reduce(&v).iter().all(Scalar::is_zero) {
            let line = Subspace::span(acc.field(), acc.ambient(), std::slice::from_ref(&v))?;
            acc = acc.sum(&line)?;
            basis.push(v);
        }
    }
    Ok(TorSpace {
        dim: cycles.dim() - bounds.dim(),
        basis,
    })
}

/// Matrix of `Q ⊗ d` for a map `d` between free modules.
pub fn tensor_matrix(q: &Module, from: &FreeModule, to: &FreeModule, d: &Morphism) -> Matrix {
    let f = q.field();
    let block_off = |tops: &[usize]| {
        let mut off = Vec::with_capacity(tops.len() + 1);
        let mut acc = 0;
        for &t in tops {
            off.push(acc);
            acc += q.dims()[t];
        }
        off.push(acc);
        off
    };
    let roff = block_off(&to.tops);
    let coff = block_off(&from.tops);
    let mut m = Matrix::zeros(f, *roff.last().unwrap(), *coff.last().unwrap());
    for (r, &top) in from.tops.iter().enumerate() {
        let img = from.generator_image(d, r);
        for (s, b, c) in to.decompose_vector(top, &img) {
            let block = q.act(b).scale(&c);
            let cur = m.block(roff[s], coff[r], block.rows(), block.cols());
            m.put(roff[s], coff[r], &cur.add(&block));
        }
    }
    m
}

/// The submodule spanned by the images of several morphisms into one target.
pub fn joint_image(maps: &[Morphism], target: &Module) -> Submodule {
    maps.iter()
        .fold(Submodule::zero(target), |acc, f| acc.sum(&f.image()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Algebra, Arrow, Quiver, DEFAULT_DEGREE_BOUND};
    use crate::decompose::is_isomorphic;
    use crate::module::{projective, simple};
    use crate::search::SearchConfig;
    use std::sync::Arc;
    use strata_linalg::Field;

    fn a3() -> Arc<Algebra> {
        let f = Field::prime(101).unwrap();
        let q = Quiver::new(
            3,
            vec![
                Arrow { name: "a".into(), source: 0, target: 1 },
                Arrow { name: "b".into(), source: 1, target: 2 },
            ],
        )
        .unwrap();
        Arc::new(Algebra::bound_quiver(f, q, vec![], DEFAULT_DEGREE_BOUND).unwrap())
    }

    #[test]
    fn ext_of_projective_vanishes() {
        let a = a3();
        for v in 0..3 {
            assert!(ext1(&projective(&a, 0), &simple(&a, v)).unwrap().is_zero());
        }
    }

    #[test]
    fn ext_between_adjacent_simples() {
        let a = a3();
        let e = ext1(&simple(&a, 0), &simple(&a, 1)).unwrap();
        assert_eq!(e.dim(), 1);
        let s = e.realize_class(0);
        assert_eq!(s.middle().dims(), &[1, 1, 0]);
        assert!(!s.is_split().unwrap());
        let z = e.realize(&Morphism::zero(e.cocycles.source(), e.right()));
        assert!(z.is_split().unwrap());
        assert_eq!(ext1(&simple(&a, 0), &simple(&a, 2)).unwrap().dim(), 0);
    }

    #[test]
    fn pullback_along_identity() {
        let a = a3();
        let e = ext1(&simple(&a, 0), &simple(&a, 1)).unwrap();
        let s = e.realize_class(0);
        let pb = pullback(&s, &Morphism::identity(s.right())).unwrap();
        let cfg = SearchConfig::default();
        assert!(is_isomorphic(pb.ses.middle(), s.middle(), &cfg).unwrap().is_isomorphic());
        assert!(!pb.ses.is_split().unwrap());
        let po = pushout(&s, &Morphism::identity(s.left())).unwrap();
        assert!(!po.ses.is_split().unwrap());
    }

    #[test]
    fn tor_against_projective_vanishes() {
        let a = a3();
        let op = Arc::new(a.opposite());
        let q = crate::module::projective(&op, 1);
        assert_eq!(tor1(&q, &projective(&a, 0)).unwrap().dim, 0);
    }

    #[test]
    fn tor_of_simples_matches_ext_dual() {
        // Tor₁(D S, S') ≅ D Ext¹(S', S) for simples over a path algebra.
        let a = a3();
        let op = Arc::new(a.opposite());
        for i in 0..3 {
            for j in 0..3 {
                let t = tor1(&simple(&a, i).dual_over(&op), &simple(&a, j)).unwrap().dim;
                let e = ext1(&simple(&a, j), &simple(&a, i)).unwrap().dim();
                assert_eq!(t, e, "pair {i} {j}");
            }
        }
    }
}
