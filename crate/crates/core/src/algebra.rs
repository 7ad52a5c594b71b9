//! Finite-dimensional algebras given by a basis and structure constants,
//! built from bound quivers or from endomorphism data.
//!
//! Composition is right-to-left: the product `a·b` means "b first, then a".
//! A basis element with grading `(s, t)` satisfies `e_t · b · e_s = b`.

use std::collections::HashMap;

use strata_linalg::{Field, Matrix, Scalar, Subspace};

use crate::CoreError;

/// Default degree bound for admissibility checks.
pub const DEFAULT_DEGREE_BOUND: usize = 30;

/// Upper limit on the number of paths of a single length.
const PATH_LIMIT: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

/// Vertices are `0..vertices`; user-facing labels are `1..=vertices`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    pub vertices: usize,
    pub arrows: Vec<Arrow>,
}

/// A path as arrow indices written right-to-left: `[b, a]` is `a` then `b`.
pub type Path = Vec<usize>;

/// A linear combination of paths of length at least two with a common
/// source and target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub terms: Vec<(Scalar, Path)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisElement {
    pub label: String,
    pub source: usize,
    pub target: usize,
    /// Generator indices whose product (right-to-left) is this element.
    /// Empty for idempotents.
    pub word: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    BoundQuiver {
        quiver: Quiver,
        relations: Vec<Relation>,
    },
    Endomorphism {
        summands: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra {
    field: Field,
    vertices: usize,
    basis: Vec<BasisElement>,
    idempotents: Vec<usize>,
    generators: Vec<usize>,
    /// `mult[a][b]` lists the nonzero coefficients of `a·b`.
    mult: Vec<Vec<Vec<(usize, Scalar)>>>,
    provenance: Provenance,
    opposite: bool,
}

impl Quiver {
    pub fn new(vertices: usize, arrows: Vec<Arrow>) -> Result<Quiver, CoreError> {
        let mut seen = HashMap::new();
        for a in &arrows {
            if a.source >= vertices || a.target >= vertices {
                return Err(CoreError::Input(format!(
                    "arrow `{}` has an endpoint outside 1..{}",
                    a.name, vertices
                )));
            }
            if seen.insert(a.name.clone(), ()).is_some() {
                return Err(CoreError::Input(format!("arrow name `{}` repeated", a.name)));
            }
        }
        Ok(Quiver { vertices, arrows })
    }

    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }

    fn path_source(&self, p: &[usize]) -> usize {
        self.arrows[*p.last().expect("nonempty path")].source
    }

    fn path_target(&self, p: &[usize]) -> usize {
        self.arrows[p[0]].target
    }

    fn is_path(&self, p: &[usize]) -> bool {
        p.windows(2)
            .all(|w| self.arrows[w[0]].source == self.arrows[w[1]].target)
    }

    pub fn path_label(&self, p: &[usize]) -> String {
        p.iter()
            .map(|&a| self.arrows[a].name.as_str())
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// Paths of one length, indexed.
struct Degree {
    paths: Vec<Path>,
    index: HashMap<Path, usize>,
}

impl Degree {
    fn new(paths: Vec<Path>) -> Degree {
        let index = paths.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        Degree { paths, index }
    }
}

impl Algebra {
    /// Path algebra of `quiver` modulo the ideal generated by `relations`.
    pub fn bound_quiver(
        field: Field,
        quiver: Quiver,
        relations: Vec<Relation>,
        degree_bound: usize,
    ) -> Result<Algebra, CoreError> {
        let mut by_len: HashMap<usize, Vec<&Relation>> = HashMap::new();
        for r in &relations {
            let Some((_, first)) = r.terms.first() else {
                continue;
            };
            let len = first.len();
            for (c, p) in &r.terms {
                field.check(c)?;
                if p.len() < 2 {
                    return Err(CoreError::Input(
                        "relation terms must be paths of length at least two".into(),
                    ));
                }
                if !quiver.is_path(p) {
                    return Err(CoreError::Input(format!(
                        "`{}` is not a path",
                        quiver.path_label(p)
                    )));
                }
                if quiver.path_source(p) != quiver.path_source(first)
                    || quiver.path_target(p) != quiver.path_target(first)
                {
                    return Err(CoreError::Input(
                        "relation terms must share source and target".into(),
                    ));
                }
                if p.len() != len {
                    return Err(CoreError::Input(format!(
                        "relation mixing path lengths {} and {} is not supported",
                        len,
                        p.len()
                    )));
                }
            }
            by_len.entry(len).or_default().push(r);
        }

        let mut degrees: Vec<Degree> = Vec::new();
        let mut ideals: Vec<Subspace> = Vec::new();
        degrees.push(Degree::new(Vec::new()));
        ideals.push(Subspace::zero(field, 0));
        let arrows_deg = Degree::new((0..quiver.arrows.len()).map(|a| vec![a]).collect());
        ideals.push(Subspace::zero(field, arrows_deg.paths.len()));
        degrees.push(arrows_deg);

        let mut top = None;
        if degrees[1].paths.is_empty() {
            top = Some(1);
        }
        let mut n = 2;
        while top.is_none() {
            if n > degree_bound {
                return Err(CoreError::NotAdmissible(degree_bound));
            }
            let prev = &degrees[n - 1];
            let mut paths = Vec::new();
            for p in &prev.paths {
                for (a, arr) in quiver.arrows.iter().enumerate() {
                    if arr.source == quiver.path_target(p) {
                        let mut q = vec![a];
                        q.extend_from_slice(p);
                        paths.push(q);
                    }
                }
            }
            if paths.len() > PATH_LIMIT {
                return Err(CoreError::NotAdmissible(n));
            }
            let deg = Degree::new(paths);
            let width = deg.paths.len();
            let mut gens: Vec<Vec<Scalar>> = Vec::new();
            for v in ideals[n - 1].basis() {
                for a in 0..quiver.arrows.len() {
                    let mut left = vec![field.zero(); width];
                    let mut right = vec![field.zero(); width];
                    let (mut any_l, mut any_r) = (false, false);
                    for (k, c) in v.iter().enumerate() {
                        if c.is_zero() {
                            continue;
                        }
                        let p = &degrees[n - 1].paths[k];
                        if quiver.arrows[a].source == quiver.path_target(p) {
                            let mut q = vec![a];
                            q.extend_from_slice(p);
                            left[deg.index[&q]] = c.clone();
                            any_l = true;
                        }
                        if quiver.arrows[a].target == quiver.path_source(p) {
                            let mut q = p.clone();
                            q.push(a);
                            right[deg.index[&q]] = c.clone();
                            any_r = true;
                        }
                    }
                    if any_l {
                        gens.push(left);
                    }
                    if any_r {
                        gens.push(right);
                    }
                }
            }
            for r in by_len.get(&n).into_iter().flatten() {
                let mut v = vec![field.zero(); width];
                for (c, p) in &r.terms {
                    let k = deg.index[p];
                    v[k] = field.add(&v[k], c);
                }
                gens.push(v);
            }
            let ideal = Subspace::span(field, width, &gens)?;
            let full = ideal.dim() == width;
            degrees.push(deg);
            ideals.push(ideal);
            if full {
                top = Some(n);
            }
            n += 1;
        }
        let top = top.expect("loop exits with a top degree");
        // Basis: trivial paths, then normal paths degree by degree.
        let mut basis = Vec::new();
        let mut coord: Vec<Vec<Option<usize>>> = vec![Vec::new(); top + 1];
        for v in 0..quiver.vertices {
            basis.push(BasisElement {
                label: format!("e{}", v + 1),
                source: v,
                target: v,
                word: Vec::new(),
            });
        }
        for d in 1..top {
            let normal = ideals[d].complement_indices();
            coord[d] = vec![None; degrees[d].paths.len()];
            for k in normal {
                let p = &degrees[d].paths[k];
                coord[d][k] = Some(basis.len());
                basis.push(BasisElement {
                    label: quiver.path_label(p),
                    source: quiver.path_source(p),
                    target: quiver.path_target(p),
                    word: p.clone(),
                });
            }
        }
        let dim = basis.len();
        let reduce = |d: usize, path: &Path| -> Vec<(usize, Scalar)> {
            if d >= top {
                return Vec::new();
            }
            let k = degrees[d].index[path];
            let mut e = vec![field.zero(); degrees[d].paths.len()];
            e[k] = field.one();
            ideals[d]
                .reduce(&e)
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(j, c)| (coord[d][j].expect("reduced onto normal paths"), c))
                .collect()
        };

        let mut mult = vec![vec![Vec::new(); dim]; dim];
        for a in 0..dim {
            for b in 0..dim {
                let (ea, eb) = (&basis[a], &basis[b]);
                if ea.source != eb.target {
                    continue;
                }
                mult[a][b] = if ea.word.is_empty() {
                    vec![(b, field.one())]
                } else if eb.word.is_empty() {
                    vec![(a, field.one())]
                } else {
                    let mut p = ea.word.clone();
                    p.extend_from_slice(&eb.word);
                    reduce(p.len(), &p)
                };
            }
        }
        let idempotents = (0..quiver.vertices).collect();
        let generators = (0..quiver.arrows.len())
            .map(|a| {
                coord[1]
                    .get(a)
                    .copied()
                    .flatten()
                    .expect("arrows are never in an admissible ideal")
            })
            .collect();
        Ok(Algebra {
            field,
            vertices: quiver.vertices,
            basis,
            idempotents,
            generators,
            mult,
            provenance: Provenance::BoundQuiver { quiver, relations },
            opposite: false,
        })
    }

    /// Algebra from explicit structure constants. Generators must be the
    /// non-idempotent basis elements' building blocks: every non-idempotent
    /// basis element needs a word over them. Invariants are verified.
    pub fn from_structure(
        field: Field,
        vertices: usize,
        basis: Vec<BasisElement>,
        idempotents: Vec<usize>,
        generators: Vec<usize>,
        mult: Vec<Vec<Vec<(usize, Scalar)>>>,
        provenance: Provenance,
    ) -> Result<Algebra, CoreError> {
        let alg = Algebra {
            field,
            vertices,
            basis,
            idempotents,
            generators,
            mult,
            provenance,
            opposite: false,
        };
        alg.validate()?;
        Ok(alg)
    }

    /// Check idempotent relations, grading and associativity.
    pub fn validate(&self) -> Result<(), CoreError> {
        let d = self.dim();
        let bad = |m: String| Err(CoreError::Algebra(m));
        if self.idempotents.len() != self.vertices {
            return bad("one idempotent per vertex is required".into());
        }
        for (i, &ei) in self.idempotents.iter().enumerate() {
            let b = &self.basis[ei];
            if b.source != i || b.target != i {
                return bad(format!("idempotent {} is misgraded", i + 1));
            }
            for (j, &ej) in self.idempotents.iter().enumerate() {
                let expect: Vec<(usize, Scalar)> = if i == j {
                    vec![(ei, self.field.one())]
                } else {
                    Vec::new()
                };
                if self.mult[ei][ej] != expect {
                    return bad(format!("e{}·e{} is wrong", i + 1, j + 1));
                }
            }
        }
        for b in 0..d {
            let (s, t) = (self.basis[b].source, self.basis[b].target);
            let left = &self.mult[self.idempotents[t]][b];
            let right = &self.mult[b][self.idempotents[s]];
            if left != &vec![(b, self.field.one())] || right != &vec![(b, self.field.one())] {
                return bad(format!("basis element {} violates its grading", self.basis[b].label));
            }
        }
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    if self.product_vec(&self.product_vec_basis(a, b), c, false)
                        != self.product_vec(&self.product_vec_basis(b, c), a, true)
                    {
                        return bad(format!(
                            "associativity fails on ({}, {}, {})",
                            self.basis[a].label, self.basis[b].label, self.basis[c].label
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn product_vec_basis(&self, a: usize, b: usize) -> Vec<Scalar> {
        let mut v = vec![self.field.zero(); self.dim()];
        for (k, c) in &self.mult[a][b] {
            v[*k] = c.clone();
        }
        v
    }

    /// `x·c` (or `c·x` when `left`) for a coordinate vector `x`.
    fn product_vec(&self, x: &[Scalar], c: usize, left: bool) -> Vec<Scalar> {
        let f = self.field;
        let mut out = vec![f.zero(); self.dim()];
        for (k, xk) in x.iter().enumerate() {
            if xk.is_zero() {
                continue;
            }
            let terms = if left { &self.mult[c][k] } else { &self.mult[k][c] };
            for (j, coef) in terms {
                out[*j] = f.add(&out[*j], &f.mul(xk, coef));
            }
        }
        out
    }

    pub fn opposite(&self) -> Algebra {
        let d = self.dim();
        let mut mult = vec![vec![Vec::new(); d]; d];
        for (a, row) in mult.iter_mut().enumerate() {
            for (b, slot) in row.iter_mut().enumerate() {
                *slot = self.mult[b][a].clone();
            }
        }
        Algebra {
            field: self.field,
            vertices: self.vertices,
            basis: self
                .basis
                .iter()
                .map(|b| BasisElement {
                    label: b.label.clone(),
                    source: b.target,
                    target: b.source,
                    word: b.word.iter().rev().copied().collect(),
                })
                .collect(),
            idempotents: self.idempotents.clone(),
            generators: self.generators.clone(),
            mult,
            provenance: self.provenance.clone(),
            opposite: !self.opposite,
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }
    pub fn vertices(&self) -> usize {
        self.vertices
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }
    pub fn idempotents(&self) -> &[usize] {
        &self.idempotents
    }
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }
    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }
    pub fn is_opposite(&self) -> bool {
        self.opposite
    }
    pub fn is_idempotent(&self, b: usize) -> bool {
        self.basis[b].word.is_empty()
    }
    /// Nonzero coefficients of `a·b`.
    pub fn product(&self, a: usize, b: usize) -> &[(usize, Scalar)] {
        &self.mult[a][b]
    }

    /// Quiver underlying a bound-quiver presentation (reversed for opposites).
    pub fn quiver(&self) -> Option<Quiver> {
        match &self.provenance {
            Provenance::BoundQuiver { quiver, .. } => {
                if self.opposite {
                    Some(Quiver {
                        vertices: quiver.vertices,
                        arrows: quiver
                            .arrows
                            .iter()
                            .map(|a| Arrow {
                                name: a.name.clone(),
                                source: a.target,
                                target: a.source,
                            })
                            .collect(),
                    })
                } else {
                    Some(quiver.clone())
                }
            }
            Provenance::Endomorphism { .. } => None,
        }
    }

    /// `dim e_t A e_s` for all `(s, t)`, indexed `[s][t]`.
    pub fn graded_dims(&self) -> Vec<Vec<usize>> {
        let mut out = vec![vec![0; self.vertices]; self.vertices];
        for b in &self.basis {
            out[b.source][b.target] += 1;
        }
        out
    }

    /// Basis indices with the given source, in basis order.
    pub fn with_source(&self, s: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&b| self.basis[b].source == s).collect()
    }

    /// Left multiplication by basis element `a` as a matrix on `A`.
    pub fn left_mult_matrix(&self, a: usize) -> Matrix {
        let d = self.dim();
        let mut m = Matrix::zeros(self.field, d, d);
        for b in 0..d {
            for (k, c) in &self.mult[a][b] {
                m.set(*k, b, c.clone());
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f() -> Field {
        Field::prime(101).unwrap()
    }

    fn arrow(name: &str, s: usize, t: usize) -> Arrow {
        Arrow {
            name: name.into(),
            source: s - 1,
            target: t - 1,
        }
    }

    fn a3() -> Algebra {
        let q = Quiver::new(3, vec![arrow("a", 1, 2), arrow("b", 2, 3)]).unwrap();
        Algebra::bound_quiver(f(), q, vec![], DEFAULT_DEGREE_BOUND).unwrap()
    }

    #[test]
    fn a3_has_dimension_six() {
        let a = a3();
        assert_eq!(a.dim(), 6);
        a.validate().unwrap();
        assert_eq!(a.basis()[5].label, "b*a");
    }

    #[test]
    fn kronecker_has_dimension_four() {
        let q = Quiver::new(2, vec![arrow("a", 1, 2), arrow("b", 1, 2)]).unwrap();
        let k = Algebra::bound_quiver(f(), q, vec![], DEFAULT_DEGREE_BOUND).unwrap();
        assert_eq!(k.dim(), 4);
        k.validate().unwrap();
    }

    #[test]
    fn loop_without_relations_is_not_admissible() {
        let q = Quiver::new(1, vec![arrow("x", 1, 1)]).unwrap();
        let err = Algebra::bound_quiver(f(), q, vec![], 10).unwrap_err();
        assert!(matches!(err, CoreError::NotAdmissible(_)));
    }

    #[test]
    fn mixed_length_relation_rejected() {
        let q = Quiver::new(1, vec![arrow("x", 1, 1)]).unwrap();
        let r = Relation {
            terms: vec![(f().one(), vec![0, 0]), (f().from_i64(-1), vec![0, 0, 0])],
        };
        assert!(Algebra::bound_quiver(f(), q, vec![r], 10).is_err());
    }

    #[test]
    fn commutative_square() {
        let q = Quiver::new(
            4,
            vec![arrow("a", 1, 2), arrow("b", 2, 4), arrow("c", 1, 3), arrow("d", 3, 4)],
        )
        .unwrap();
        let r = Relation {
            terms: vec![(f().one(), vec![1, 0]), (f().from_i64(-1), vec![3, 2])],
        };
        let alg = Algebra::bound_quiver(f(), q, vec![r], 10).unwrap();
        assert_eq!(alg.dim(), 4 + 4 + 1);
        alg.validate().unwrap();
    }

    #[test]
    fn opposite_is_an_involution() {
        let a = a3();
        let op = a.opposite();
        op.validate().unwrap();
        assert_eq!(op.opposite(), a);
        let q = op.quiver().unwrap();
        assert_eq!((q.arrows[0].source, q.arrows[0].target), (1, 0));
    }

    #[test]
    fn graded_dimensions_sum_to_dimension() {
        let a = a3();
        let total: usize = a.graded_dims().iter().flatten().sum();
        assert_eq!(total, a.dim());
    }
}
