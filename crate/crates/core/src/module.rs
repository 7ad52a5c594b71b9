//! Modules as representations: one vector space per vertex and one action
//! matrix per algebra generator. Morphisms are vertex-wise matrix families.

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use strata_linalg::{Field, Matrix, Scalar, Subspace};

use crate::algebra::Algebra;
use crate::CoreError;

pub struct ModuleData {
    alg: Arc<Algebra>,
    fingerprint: u64,
    dims: Vec<usize>,
    gens: Vec<Matrix>,
    acts: Vec<Matrix>,
}

/// A finite-dimensional left module. Cheap to clone.
#[derive(Clone)]
pub struct Module(Arc<ModuleData>);

pub fn algebra_fingerprint(alg: &Algebra) -> u64 {
    let mut h = DefaultHasher::new();
    format!("{alg:?}").hash(&mut h);
    h.finish()
}

impl Module {
    /// Module with the given generator actions; every relation of the
    /// algebra is checked.
    pub fn new(alg: &Arc<Algebra>, dims: Vec<usize>, gens: Vec<Matrix>) -> Result<Module, CoreError> {
        Module::build(alg, algebra_fingerprint(alg), dims, gens, true)
    }

    fn build(
        alg: &Arc<Algebra>,
        fingerprint: u64,
        dims: Vec<usize>,
        gens: Vec<Matrix>,
        check: bool,
    ) -> Result<Module, CoreError> {
        let field = alg.field();
        if dims.len() != alg.vertices() {
            return Err(CoreError::Input(format!(
                "dimension vector has {} entries for {} vertices",
                dims.len(),
                alg.vertices()
            )));
        }
        if gens.len() != alg.generators().len() {
            return Err(CoreError::Input(format!(
                "{} action matrices for {} generators",
                gens.len(),
                alg.generators().len()
            )));
        }
        for (g, m) in alg.generators().iter().zip(&gens) {
            let b = &alg.basis()[*g];
            if m.field() != field {
                return Err(CoreError::Linalg(strata_linalg::LinalgError::MixedBackend));
            }
            if m.rows() != dims[b.target] || m.cols() != dims[b.source] {
                return Err(CoreError::Input(format!(
                    "generator `{}` needs a {}x{} matrix, found {}x{}",
                    b.label,
                    dims[b.target],
                    dims[b.source],
                    m.rows(),
                    m.cols()
                )));
            }
        }
        let mut acts = Vec::with_capacity(alg.dim());
        for b in alg.basis() {
            if b.word.is_empty() {
                acts.push(Matrix::identity(field, dims[b.source]));
                continue;
            }
            let mut m = gens[b.word[0]].clone();
            for &w in &b.word[1..] {
                m = m.mul(&gens[w]);
            }
            acts.push(m);
        }
        let module = Module(Arc::new(ModuleData {
            alg: alg.clone(),
            fingerprint,
            dims,
            gens,
            acts,
        }));
        if check {
            module.check_relations()?;
        }
        Ok(module)
    }

    /// Internal constructor for actions produced by exact computations.
    pub(crate) fn trusted(alg: &Arc<Algebra>, fp: u64, dims: Vec<usize>, gens: Vec<Matrix>) -> Module {
        Module::build(alg, fp, dims, gens, cfg!(debug_assertions))
            .expect("computed module satisfies the relations")
    }

    fn check_relations(&self) -> Result<(), CoreError> {
        let alg = &self.0.alg;
        let f = alg.field();
        for (k, &g) in alg.generators().iter().enumerate() {
            let gs = alg.basis()[g].source;
            let gt = alg.basis()[g].target;
            for b in 0..alg.dim() {
                if alg.basis()[b].target != gs {
                    continue;
                }
                let lhs = self.0.gens[k].mul(&self.0.acts[b]);
                let mut rhs = Matrix::zeros(f, self.0.dims[gt], self.0.dims[alg.basis()[b].source]);
                for (c, coef) in alg.product(g, b) {
                    rhs = rhs.add(&self.0.acts[*c].scale(coef));
                }
                if lhs != rhs {
                    return Err(CoreError::Relation(format!(
                        "{} * {} does not act as the algebra prescribes",
                        alg.basis()[g].label,
                        alg.basis()[b].label
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn zero(alg: &Arc<Algebra>) -> Module {
        let field = alg.field();
        let dims = vec![0; alg.vertices()];
        let gens = alg
            .generators()
            .iter()
            .map(|_| Matrix::zeros(field, 0, 0))
            .collect();
        Module::trusted(alg, algebra_fingerprint(alg), dims, gens)
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.0.alg
    }
    pub fn fingerprint(&self) -> u64 {
        self.0.fingerprint
    }
    pub fn field(&self) -> Field {
        self.0.alg.field()
    }
    pub fn dims(&self) -> &[usize] {
        &self.0.dims
    }
    pub fn dim(&self) -> usize {
        self.0.dims.iter().sum()
    }
    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }
    /// Action matrix of the `k`-th generator.
    pub fn gen(&self, k: usize) -> &Matrix {
        &self.0.gens[k]
    }
    pub fn gens(&self) -> &[Matrix] {
        &self.0.gens
    }
    /// Action matrix of basis element `b`.
    pub fn act(&self, b: usize) -> &Matrix {
        &self.0.acts[b]
    }

    pub fn same_algebra(&self, other: &Module) -> bool {
        Arc::ptr_eq(&self.0.alg, &other.0.alg) || self.0.fingerprint == other.0.fingerprint
    }

    pub fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.0.dims.len());
        let mut acc = 0;
        for d in &self.0.dims {
            out.push(acc);
            acc += d;
        }
        out
    }

    /// Action of basis element `b` on the whole space.
    pub fn act_global(&self, b: usize) -> Matrix {
        let alg = &self.0.alg;
        let n = self.dim();
        let off = self.offsets();
        let el = &alg.basis()[b];
        let mut m = Matrix::zeros(self.field(), n, n);
        m.put(off[el.target], off[el.source], &self.0.acts[b]);
        m
    }

    /// Split a global vector into vertex components.
    pub fn split(&self, v: &[Scalar]) -> Vec<Vec<Scalar>> {
        let off = self.offsets();
        self.0
            .dims
            .iter()
            .enumerate()
            .map(|(i, &d)| v[off[i]..off[i] + d].to_vec())
            .collect()
    }

    /// Global vector from a vertex component.
    pub fn embed(&self, vertex: usize, v: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![self.field().zero(); self.dim()];
        let off = self.offsets()[vertex];
        out[off..off + v.len()].clone_from_slice(v);
        out
    }

    /// Deterministic ordering key: dimension vector, then echelonized actions.
    pub fn canonical_key(&self) -> (Vec<usize>, Vec<String>) {
        let acts = self
            .0
            .gens
            .iter()
            .map(|m| m.rref().matrix.to_string())
            .collect();
        (self.0.dims.clone(), acts)
    }

    pub fn dims_string(&self) -> String {
        format!(
            "({})",
            self.0
                .dims
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    }

    /// k-dual over the opposite algebra: spaces dualized, actions transposed.
    pub fn dual(&self) -> Module {
        let op = Arc::new(self.0.alg.opposite());
        self.dual_over(&op)
    }

    /// Dual over a supplied copy of the opposite algebra.
    pub fn dual_over(&self, op: &Arc<Algebra>) -> Module {
        let fp = algebra_fingerprint(op);
        let gens = self.0.gens.iter().map(Matrix::transpose).collect();
        Module::trusted(op, fp, self.0.dims.clone(), gens)
    }

    /// Same module re-homed on an equal algebra value.
    pub fn rehome(&self, alg: &Arc<Algebra>) -> Module {
        Module::trusted(alg, algebra_fingerprint(alg), self.0.dims.clone(), self.0.gens.clone())
    }

    /// Dimension vectors of the radical layers `rad^k M / rad^(k+1) M`.
    pub fn loewy_layers(&self) -> Vec<Vec<usize>> {
        let mut layers = Vec::new();
        let mut current = Submodule::whole(self);
        while !current.is_zero() {
            let rad = current.radical();
            layers.push(
                current
                    .dims()
                    .iter()
                    .zip(rad.dims())
                    .map(|(a, b)| a - b)
                    .collect(),
            );
            current = rad;
        }
        layers
    }

    pub fn with_fingerprint_of(&self, other: &Module) -> bool {
        self.0.fingerprint == other.0.fingerprint
    }
}

impl fmt::Debug for Module {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Module{}", self.dims_string())
    }
}

/// A module homomorphism, one matrix per vertex.
#[derive(Clone, Debug)]
pub struct Morphism {
    src: Module,
    tgt: Module,
    mats: Vec<Matrix>,
}

impl Morphism {
    /// Checked constructor: shapes and intertwining with every generator.
    pub fn new(src: &Module, tgt: &Module, mats: Vec<Matrix>) -> Result<Morphism, CoreError> {
        if !src.same_algebra(tgt) {
            return Err(CoreError::AlgebraMismatch);
        }
        if mats.len() != src.dims().len() {
            return Err(CoreError::Input("one matrix per vertex expected".into()));
        }
        for (i, m) in mats.iter().enumerate() {
            if m.rows() != tgt.dims()[i] || m.cols() != src.dims()[i] {
                return Err(CoreError::Input(format!("morphism block {} has the wrong shape", i + 1)));
            }
        }
        let f = Morphism {
            src: src.clone(),
            tgt: tgt.clone(),
            mats,
        };
        if !f.intertwines() {
            return Err(CoreError::Input("matrices do not commute with the action".into()));
        }
        Ok(f)
    }

    pub(crate) fn unchecked(src: &Module, tgt: &Module, mats: Vec<Matrix>) -> Morphism {
        let f = Morphism {
            src: src.clone(),
            tgt: tgt.clone(),
            mats,
        };
        debug_assert!(f.intertwines(), "computed morphism intertwines");
        f
    }

    pub fn intertwines(&self) -> bool {
        let alg = self.src.algebra();
        alg.generators().iter().enumerate().all(|(k, &g)| {
            let b = &alg.basis()[g];
            self.mats[b.target].mul(self.src.gen(k)) == self.tgt.gen(k).mul(&self.mats[b.source])
        })
    }

    pub fn identity(m: &Module) -> Morphism {
        let f = m.field();
        Morphism::unchecked(m, m, m.dims().iter().map(|&d| Matrix::identity(f, d)).collect())
    }

    pub fn zero(src: &Module, tgt: &Module) -> Morphism {
        let f = src.field();
        let mats = src
            .dims()
            .iter()
            .zip(tgt.dims())
            .map(|(&a, &b)| Matrix::zeros(f, b, a))
            .collect();
        Morphism::unchecked(src, tgt, mats)
    }

    /// Morphism from a global (block-diagonal) matrix.
    pub fn from_global(src: &Module, tgt: &Module, m: &Matrix) -> Result<Morphism, CoreError> {
        let (so, to) = (src.offsets(), tgt.offsets());
        let mats: Vec<Matrix> = (0..src.dims().len())
            .map(|i| m.block(to[i], so[i], tgt.dims()[i], src.dims()[i]))
            .collect();
        let f = Morphism::new(src, tgt, mats)?;
        if f.global() != *m {
            return Err(CoreError::Input("matrix does not respect the vertex grading".into()));
        }
        Ok(f)
    }

    pub fn source(&self) -> &Module {
        &self.src
    }
    pub fn target(&self) -> &Module {
        &self.tgt
    }
    pub fn mats(&self) -> &[Matrix] {
        &self.mats
    }
    pub fn mat(&self, v: usize) -> &Matrix {
        &self.mats[v]
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Morphism) -> Morphism {
        assert_eq!(other.tgt.dims(), self.src.dims(), "composable morphisms");
        Morphism {
            src: other.src.clone(),
            tgt: self.tgt.clone(),
            mats: self.mats.iter().zip(&other.mats).map(|(a, b)| a.mul(b)).collect(),
        }
    }

    pub fn add(&self, other: &Morphism) -> Morphism {
        Morphism {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            mats: self.mats.iter().zip(&other.mats).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Morphism) -> Morphism {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Morphism {
        self.scale(&self.src.field().from_i64(-1))
    }

    pub fn scale(&self, s: &Scalar) -> Morphism {
        Morphism {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            mats: self.mats.iter().map(|a| a.scale(s)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mats.iter().all(Matrix::is_zero)
    }

    pub fn global(&self) -> Matrix {
        let parts: Vec<&Matrix> = self.mats.iter().collect();
        Matrix::block_diag(self.src.field(), &parts)
    }

    /// Entries flattened vertex by vertex, row-major.
    pub fn flatten(&self) -> Vec<Scalar> {
        self.mats.iter().flat_map(|m| m.entries().to_vec()).collect()
    }

    pub fn rank(&self) -> usize {
        self.mats.iter().map(Matrix::rank).sum()
    }

    pub fn is_injective(&self) -> bool {
        self.mats.iter().all(|m| m.rank() == m.cols())
    }

    pub fn is_surjective(&self) -> bool {
        self.mats.iter().all(|m| m.rank() == m.rows())
    }

    pub fn is_iso(&self) -> bool {
        self.mats.iter().all(Matrix::is_invertible)
    }

    pub fn inverse(&self) -> Option<Morphism> {
        let mats: Option<Vec<Matrix>> = self.mats.iter().map(Matrix::inverse).collect();
        Some(Morphism::unchecked(&self.tgt, &self.src, mats?))
    }

    pub fn kernel(&self) -> Submodule {
        let f = self.src.field();
        let parts = self
            .mats
            .iter()
            .map(|m| Subspace::from_columns(&m.kernel_matrix()))
            .zip(self.src.dims())
            .map(|(s, &d)| if d == 0 { Subspace::zero(f, 0) } else { s })
            .collect();
        Submodule::from_parts_unchecked(&self.src, parts)
    }

    pub fn image(&self) -> Submodule {
        let parts = self
            .mats
            .iter()
            .map(Subspace::from_columns)
            .collect();
        Submodule::from_parts_unchecked(&self.tgt, parts)
    }

    /// Transpose: the induced map `D(target) → D(source)`.
    pub fn dual(&self, dsrc: &Module, dtgt: &Module) -> Morphism {
        Morphism::unchecked(dtgt, dsrc, self.mats.iter().map(Matrix::transpose).collect())
    }

    /// Re-type onto equal modules (same dimensions and actions).
    pub fn retype(&self, src: &Module, tgt: &Module) -> Morphism {
        assert_eq!(src.dims(), self.src.dims());
        assert_eq!(tgt.dims(), self.tgt.dims());
        Morphism::unchecked(src, tgt, self.mats.clone())
    }
}

/// A submodule, stored as one echelonized subspace per vertex.
#[derive(Clone, Debug)]
pub struct Submodule {
    ambient: Module,
    parts: Vec<Subspace>,
}

/// A quotient module with its projection and a linear (not module) section.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub module: Module,
    pub proj: Morphism,
    pub section: Vec<Matrix>,
}

impl Submodule {
    pub fn whole(m: &Module) -> Submodule {
        let f = m.field();
        Submodule {
            ambient: m.clone(),
            parts: m.dims().iter().map(|&d| Subspace::full(f, d)).collect(),
        }
    }

    pub fn zero(m: &Module) -> Submodule {
        let f = m.field();
        Submodule {
            ambient: m.clone(),
            parts: m.dims().iter().map(|&d| Subspace::zero(f, d)).collect(),
        }
    }

    pub(crate) fn from_parts_unchecked(m: &Module, parts: Vec<Subspace>) -> Submodule {
        Submodule {
            ambient: m.clone(),
            parts,
        }
    }

    /// Smallest submodule containing the given vertex-homogeneous vectors.
    pub fn generated(m: &Module, vectors: &[(usize, Vec<Scalar>)]) -> Submodule {
        let f = m.field();
        let mut spans: Vec<Vec<Vec<Scalar>>> = vec![Vec::new(); m.dims().len()];
        for (v, x) in vectors {
            spans[*v].push(x.clone());
        }
        let mut parts: Vec<Subspace> = spans
            .iter()
            .zip(m.dims())
            .map(|(s, &d)| Subspace::span(f, d, s).expect("vector lengths match"))
            .collect();
        Submodule::close(m, &mut parts);
        Submodule {
            ambient: m.clone(),
            parts,
        }
    }

    /// Smallest submodule containing the given global vectors.
    pub fn generated_global(m: &Module, vectors: &[Vec<Scalar>]) -> Submodule {
        let mut homog = Vec::new();
        for v in vectors {
            for (i, part) in m.split(v).into_iter().enumerate() {
                if part.iter().any(|x| !x.is_zero()) {
                    homog.push((i, part));
                }
            }
        }
        Submodule::generated(m, &homog)
    }

    fn close(m: &Module, parts: &mut [Subspace]) {
        let alg = m.algebra().clone();
        loop {
            let mut grew = false;
            for (k, &g) in alg.generators().iter().enumerate() {
                let b = &alg.basis()[g];
                if parts[b.source].is_zero() {
                    continue;
                }
                let img = m.gen(k).mul(&parts[b.source].basis_matrix());
                let imgsp = Subspace::from_columns(&img);
                if !parts[b.target].contains_subspace(&imgsp) {
                    parts[b.target] = parts[b.target].sum(&imgsp).expect("same ambient");
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }
    }

    pub fn ambient(&self) -> &Module {
        &self.ambient
    }
    pub fn parts(&self) -> &[Subspace] {
        &self.parts
    }
    pub fn dims(&self) -> Vec<usize> {
        self.parts.iter().map(Subspace::dim).collect()
    }
    pub fn dim(&self) -> usize {
        self.parts.iter().map(Subspace::dim).sum()
    }
    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }
    pub fn is_whole(&self) -> bool {
        self.dim() == self.ambient.dim()
    }

    pub fn contains(&self, other: &Submodule) -> bool {
        self.parts
            .iter()
            .zip(&other.parts)
            .all(|(a, b)| a.contains_subspace(b))
    }

    pub fn contains_vector(&self, v: &[Scalar]) -> bool {
        self.ambient
            .split(v)
            .iter()
            .zip(&self.parts)
            .all(|(x, p)| p.reduce(x).iter().all(Scalar::is_zero))
    }

    pub fn sum(&self, other: &Submodule) -> Submodule {
        Submodule {
            ambient: self.ambient.clone(),
            parts: self
                .parts
                .iter()
                .zip(&other.parts)
                .map(|(a, b)| a.sum(b).expect("same ambient"))
                .collect(),
        }
    }

    pub fn intersection(&self, other: &Submodule) -> Submodule {
        Submodule {
            ambient: self.ambient.clone(),
            parts: self
                .parts
                .iter()
                .zip(&other.parts)
                .map(|(a, b)| a.intersection(b).expect("same ambient"))
                .collect(),
        }
    }

    /// Columns spanning the submodule in global coordinates.
    pub fn global_basis(&self) -> Matrix {
        let f = self.ambient.field();
        let off = self.ambient.offsets();
        let mut cols = Vec::new();
        for (i, p) in self.parts.iter().enumerate() {
            for v in p.basis() {
                let mut g = vec![f.zero(); self.ambient.dim()];
                g[off[i]..off[i] + v.len()].clone_from_slice(&v);
                cols.push(g);
            }
        }
        Matrix::from_columns(f, self.ambient.dim(), &cols)
    }

    /// The submodule as a module, with its inclusion.
    pub fn to_module(&self) -> (Module, Morphism) {
        let m = &self.ambient;
        let alg = m.algebra();
        let bases: Vec<Matrix> = self.parts.iter().map(Subspace::basis_matrix).collect();
        let gens = alg
            .generators()
            .iter()
            .enumerate()
            .map(|(k, &g)| {
                let b = &alg.basis()[g];
                let img = m.gen(k).mul(&bases[b.source]);
                bases[b.target]
                    .solve_matrix(&img)
                    .expect("submodule is closed under the action")
            })
            .collect();
        let sub = Module::trusted(alg, m.fingerprint(), self.dims(), gens);
        let incl = Morphism::unchecked(&sub, m, bases);
        (sub, incl)
    }

    pub fn quotient(&self) -> Quotient {
        let m = &self.ambient;
        let alg = m.algebra();
        let qs: Vec<Matrix> = self.parts.iter().map(Subspace::quotient_map).collect();
        let ss: Vec<Matrix> = self.parts.iter().map(Subspace::complement_section).collect();
        let gens = alg
            .generators()
            .iter()
            .enumerate()
            .map(|(k, &g)| {
                let b = &alg.basis()[g];
                qs[b.target].mul(m.gen(k)).mul(&ss[b.source])
            })
            .collect();
        let dims = qs.iter().map(Matrix::rows).collect();
        let q = Module::trusted(alg, m.fingerprint(), dims, gens);
        let proj = Morphism::unchecked(m, &q, qs);
        Quotient {
            module: q,
            proj,
            section: ss,
        }
    }

    /// `J · U` for the arrow (radical) ideal `J`.
    pub fn radical(&self) -> Submodule {
        let m = &self.ambient;
        let alg = m.algebra();
        let mut vectors = Vec::new();
        for (k, &g) in alg.generators().iter().enumerate() {
            let b = &alg.basis()[g];
            for v in self.parts[b.source].basis() {
                vectors.push((b.target, m.gen(k).mul_vec(&v)));
            }
        }
        Submodule::generated(m, &vectors)
    }

    /// Image of this submodule under a morphism out of its ambient module.
    pub fn image_under(&self, f: &Morphism) -> Submodule {
        let parts = self
            .parts
            .iter()
            .zip(f.mats())
            .map(|(p, m)| Subspace::from_columns(&m.mul(&p.basis_matrix())))
            .collect();
        Submodule::from_parts_unchecked(f.target(), parts)
    }

    /// Preimage of a submodule of the target under `f`.
    pub fn preimage(f: &Morphism, u: &Submodule) -> Submodule {
        let field = f.source().field();
        let parts = f
            .mats()
            .iter()
            .zip(u.parts())
            .zip(f.source().dims())
            .map(|((m, p), &d)| {
                // v ↦ quotient_map(p)·m·v, kernel is the preimage.
                let q = p.quotient_map().mul(m);
                if d == 0 {
                    Subspace::zero(field, 0)
                } else {
                    Subspace::from_columns(&q.kernel_matrix())
                }
            })
            .collect();
        Submodule::from_parts_unchecked(f.source(), parts)
    }

    pub fn same_as(&self, other: &Submodule) -> bool {
        self.parts == other.parts
    }
}

pub fn radical(m: &Module) -> Submodule {
    Submodule::whole(m).radical()
}

pub fn top(m: &Module) -> Quotient {
    radical(m).quotient()
}

/// Elements killed by every generator.
pub fn socle(m: &Module) -> Submodule {
    let alg = m.algebra();
    let f = m.field();
    let mut parts: Vec<Subspace> = m.dims().iter().map(|&d| Subspace::full(f, d)).collect();
    for (k, &g) in alg.generators().iter().enumerate() {
        let s = alg.basis()[g].source;
        if m.dims()[s] == 0 {
            continue;
        }
        let ker = Subspace::from_columns(&m.gen(k).kernel_matrix());
        parts[s] = parts[s].intersection(&ker).expect("same ambient");
    }
    Submodule::from_parts_unchecked(m, parts)
}

/// Direct sum with canonical inclusions and projections.
#[derive(Clone, Debug)]
pub struct DirectSum {
    pub module: Module,
    pub incl: Vec<Morphism>,
    pub proj: Vec<Morphism>,
}

pub fn direct_sum(alg: &Arc<Algebra>, parts: &[Module]) -> DirectSum {
    let f = alg.field();
    let nv = alg.vertices();
    let dims: Vec<usize> = (0..nv).map(|v| parts.iter().map(|m| m.dims()[v]).sum()).collect();
    let gens = (0..alg.generators().len())
        .map(|k| {
            let blocks: Vec<&Matrix> = parts.iter().map(|m| m.gen(k)).collect();
            Matrix::block_diag(f, &blocks)
        })
        .collect();
    let fp = parts
        .first()
        .map(|m| m.fingerprint())
        .unwrap_or_else(|| algebra_fingerprint(alg));
    let sum = Module::trusted(alg, fp, dims.clone(), gens);
    let mut incl = Vec::new();
    let mut proj = Vec::new();
    let mut off = vec![0usize; nv];
    for m in parts {
        let mut im = Vec::new();
        let mut pm = Vec::new();
        for v in 0..nv {
            let mut i = Matrix::zeros(f, dims[v], m.dims()[v]);
            i.put(off[v], 0, &Matrix::identity(f, m.dims()[v]));
            pm.push(i.transpose());
            im.push(i);
            off[v] += m.dims()[v];
        }
        incl.push(Morphism::unchecked(m, &sum, im));
        proj.push(Morphism::unchecked(&sum, m, pm));
    }
    DirectSum {
        module: sum,
        incl,
        proj,
    }
}

/// Basis of `Hom(M, N)` as the kernel of the commutation system.
#[derive(Clone, Debug)]
pub struct HomSpace {
    src: Module,
    tgt: Module,
    basis: Vec<Morphism>,
    free: Vec<usize>,
}

impl HomSpace {
    pub fn source(&self) -> &Module {
        &self.src
    }
    pub fn target(&self) -> &Module {
        &self.tgt
    }
    pub fn basis(&self) -> &[Morphism] {
        &self.basis
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    /// Coordinates of a morphism in this space with respect to `basis`.
    pub fn coords(&self, f: &Morphism) -> Vec<Scalar> {
        let flat = f.flatten();
        self.free.iter().map(|&i| flat[i].clone()).collect()
    }

    pub fn element(&self, coeffs: &[Scalar]) -> Morphism {
        let mut acc = Morphism::zero(&self.src, &self.tgt);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if !c.is_zero() {
                acc = acc.add(&b.scale(c));
            }
        }
        acc
    }
}

pub fn hom_space(m: &Module, n: &Module) -> Result<HomSpace, CoreError> {
    if !m.same_algebra(n) {
        return Err(CoreError::AlgebraMismatch);
    }
    let alg = m.algebra();
    let f = m.field();
    let nv = alg.vertices();
    let mut var_off = vec![0usize; nv + 1];
    for v in 0..nv {
        var_off[v + 1] = var_off[v] + n.dims()[v] * m.dims()[v];
    }
    let unknowns = var_off[nv];
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for (k, &g) in alg.generators().iter().enumerate() {
        let b = &alg.basis()[g];
        let (s, t) = (b.source, b.target);
        let (ms, mt, ns, nt) = (m.dims()[s], m.dims()[t], n.dims()[s], n.dims()[t]);
        let (am, an) = (m.gen(k), n.gen(k));
        // f_t · am − an · f_s = 0, entry (r, c) with r < nt, c < ms.
        for r in 0..nt {
            for c in 0..ms {
                let mut row = vec![f.zero(); unknowns];
                let mut any = false;
                for kk in 0..mt {
                    let a = am.get(kk, c);
                    if !a.is_zero() {
                        let idx = var_off[t] + r * mt + kk;
                        row[idx] = f.add(&row[idx], a);
                        any = true;
                    }
                }
                for kk in 0..ns {
                    let a = an.get(r, kk);
                    if !a.is_zero() {
                        let idx = var_off[s] + kk * ms + c;
                        row[idx] = f.sub(&row[idx], a);
                        any = true;
                    }
                }
                if any {
                    rows.push(row);
                }
            }
        }
    }
    let sys = if rows.is_empty() {
        Matrix::zeros(f, 0, unknowns)
    } else {
        Matrix::from_rows(f, &rows)?
    };
    let e = sys.rref();
    let mut is_pivot = vec![false; unknowns];
    for &c in &e.pivots {
        is_pivot[c] = true;
    }
    let free: Vec<usize> = (0..unknowns).filter(|&i| !is_pivot[i]).collect();
    let basis = sys
        .kernel_basis()
        .into_iter()
        .map(|x| {
            let mats = (0..nv)
                .map(|v| {
                    Matrix::from_vec(
                        f,
                        n.dims()[v],
                        m.dims()[v],
                        x[var_off[v]..var_off[v + 1]].to_vec(),
                    )
                    .expect("well-shaped block")
                })
                .collect();
            Morphism::unchecked(m, n, mats)
        })
        .collect();
    Ok(HomSpace {
        src: m.clone(),
        tgt: n.clone(),
        basis,
        free,
    })
}

/// `Tr_M(N)`: the sum of the images of all morphisms `M → N`.
pub fn trace(m: &Module, n: &Module) -> Result<Submodule, CoreError> {
    let h = hom_space(m, n)?;
    let mut acc = Submodule::zero(n);
    for b in h.basis() {
        acc = acc.sum(&b.image());
    }
    Ok(acc)
}

/// `⊕ P(tops[r])` with a record of which basis element sits where.
#[derive(Clone, Debug)]
pub struct FreeModule {
    pub module: Module,
    pub tops: Vec<usize>,
    /// `layout[v][k] = (copy, basis element)` for the `k`-th coordinate at vertex `v`.
    pub layout: Vec<Vec<(usize, usize)>>,
}

impl FreeModule {
    pub fn new(alg: &Arc<Algebra>, tops: &[usize]) -> FreeModule {
        let nv = alg.vertices();
        let f = alg.field();
        let mut layout: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv];
        for (r, &i) in tops.iter().enumerate() {
            for b in alg.with_source(i) {
                layout[alg.basis()[b].target].push((r, b));
            }
        }
        let pos: Vec<std::collections::HashMap<(usize, usize), usize>> = layout
            .iter()
            .map(|l| l.iter().enumerate().map(|(k, x)| (*x, k)).collect())
            .collect();
        let dims: Vec<usize> = layout.iter().map(Vec::len).collect();
        let gens = alg
            .generators()
            .iter()
            .map(|&g| {
                let el = &alg.basis()[g];
                let mut m = Matrix::zeros(f, dims[el.target], dims[el.source]);
                for (col, &(r, b)) in layout[el.source].iter().enumerate() {
                    for (c, coef) in alg.product(g, b) {
                        let row = pos[el.target][&(r, *c)];
                        m.set(row, col, coef.clone());
                    }
                }
                m
            })
            .collect();
        let module = Module::trusted(alg, algebra_fingerprint(alg), dims, gens);
        FreeModule {
            module,
            tops: tops.to_vec(),
            layout,
        }
    }

    /// Vertex and local index of the generator `e_{tops[r]}` of copy `r`.
    pub fn generator_position(&self, r: usize) -> (usize, usize) {
        let alg = self.module.algebra();
        let v = self.tops[r];
        let e = alg.idempotents()[v];
        let k = self.layout[v]
            .iter()
            .position(|&(c, b)| c == r && b == e)
            .expect("generator present");
        (v, k)
    }

    /// The morphism sending the generator of copy `r` to `images[r]`
    /// (a vector in `N` at vertex `tops[r]`).
    pub fn morphism_from_images(&self, n: &Module, images: &[Vec<Scalar>]) -> Morphism {
        let f = n.field();
        let nv = self.layout.len();
        let mats = (0..nv)
            .map(|v| {
                let cols: Vec<Vec<Scalar>> = self.layout[v]
                    .iter()
                    .map(|&(r, b)| n.act(b).mul_vec(&images[r]))
                    .collect();
                Matrix::from_columns(f, n.dims()[v], &cols)
            })
            .collect();
        Morphism::unchecked(&self.module, n, mats)
    }

    /// Image of the generator of copy `r` under `phi`.
    pub fn generator_image(&self, phi: &Morphism, r: usize) -> Vec<Scalar> {
        let (v, k) = self.generator_position(r);
        phi.mat(v).column(k)
    }

    /// Components of a vector (vertex `v`, local coordinates) as
    /// `(copy, basis element, coefficient)`.
    pub fn decompose_vector(&self, v: usize, x: &[Scalar]) -> Vec<(usize, usize, Scalar)> {
        self.layout[v]
            .iter()
            .zip(x)
            .filter(|(_, c)| !c.is_zero())
            .map(|(&(r, b), c)| (r, b, c.clone()))
            .collect()
    }
}

pub fn projective(alg: &Arc<Algebra>, v: usize) -> Module {
    FreeModule::new(alg, &[v]).module
}

pub fn simple(alg: &Arc<Algebra>, v: usize) -> Module {
    let f = alg.field();
    let mut dims = vec![0; alg.vertices()];
    dims[v] = 1;
    let gens = alg
        .generators()
        .iter()
        .map(|&g| {
            let b = &alg.basis()[g];
            Matrix::zeros(f, dims[b.target], dims[b.source])
        })
        .collect();
    Module::trusted(alg, algebra_fingerprint(alg), dims, gens)
}

/// `I(v) = D(P_{A^op}(v))`, re-homed on `alg`.
pub fn injective(alg: &Arc<Algebra>, v: usize) -> Module {
    let op = Arc::new(alg.opposite());
    projective(&op, v).dual_over(alg)
}

/// Projective cover `π: P → M` with `P = ⊕ P(i)^{m_i}`, `m_i` the
/// multiplicity of `S(i)` in the top of `M`.
#[derive(Clone, Debug)]
pub struct ProjectiveCover {
    pub free: FreeModule,
    pub pi: Morphism,
}

pub fn projective_cover(m: &Module) -> ProjectiveCover {
    let alg = m.algebra();
    let f = m.field();
    let rad = radical(m);
    let mut tops = Vec::new();
    let mut images = Vec::new();
    for (v, part) in rad.parts().iter().enumerate() {
        for k in part.complement_indices() {
            let mut x = vec![f.zero(); m.dims()[v]];
            x[k] = f.one();
            tops.push(v);
            images.push(x);
        }
    }
    let free = FreeModule::new(alg, &tops);
    let free = FreeModule {
        module: free.module.rehome_like(m),
        ..free
    };
    let pi = free.morphism_from_images(m, &images);
    ProjectiveCover { free, pi }
}

impl Module {
    /// Same module data with `other`'s algebra handle.
    pub(crate) fn rehome_like(&self, other: &Module) -> Module {
        Module(Arc::new(ModuleData {
            alg: other.0.alg.clone(),
            fingerprint: other.0.fingerprint,
            dims: self.0.dims.clone(),
            gens: self.0.gens.clone(),
            acts: self.0.acts.clone(),
        }))
    }
}

/// `ΩM = ker(P → M)` with its inclusion into the cover.
pub fn syzygy(m: &Module) -> (Module, Morphism, ProjectiveCover) {
    let cover = projective_cover(m);
    let (k, incl) = cover.pi.kernel().to_module();
    (k, incl, cover)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Arrow, Quiver, DEFAULT_DEGREE_BOUND};

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
    fn projectives_of_a3() {
        let a = a3();
        assert_eq!(projective(&a, 0).dims(), &[1, 1, 1]);
        assert_eq!(projective(&a, 1).dims(), &[0, 1, 1]);
        assert_eq!(projective(&a, 2).dims(), &[0, 0, 1]);
    }

    #[test]
    fn hom_from_projective_is_evaluation() {
        let a = a3();
        let p1 = projective(&a, 0);
        for v in 0..3 {
            let h = hom_space(&projective(&a, v), &p1).unwrap();
            assert_eq!(h.dim(), p1.dims()[v]);
        }
        assert_eq!(hom_space(&projective(&a, 1), &p1).unwrap().dim(), 1);
    }

    #[test]
    fn trace_of_lower_projectives() {
        let a = a3();
        let sum = direct_sum(&a, &[projective(&a, 1), projective(&a, 2)]);
        let t = trace(&sum.module, &projective(&a, 0)).unwrap();
        assert_eq!(t.dims(), vec![0, 1, 1]);
        assert!(trace(&simple(&a, 0), &simple(&a, 1)).unwrap().is_zero());
    }

    #[test]
    fn radical_top_socle() {
        let a = a3();
        let p1 = projective(&a, 0);
        assert_eq!(radical(&p1).dims(), vec![0, 1, 1]);
        assert_eq!(top(&p1).module.dims(), &[1, 0, 0]);
        assert_eq!(socle(&p1).dims(), vec![0, 0, 1]);
        let s = simple(&a, 1);
        assert!(radical(&s).is_zero());
        assert_eq!(top(&s).module.dims(), s.dims());
    }

    #[test]
    fn syzygy_of_simple() {
        let a = a3();
        let (k, incl, cover) = syzygy(&simple(&a, 0));
        assert_eq!(k.dims(), &[0, 1, 1]);
        assert!(incl.is_injective());
        assert!(cover.pi.is_surjective());
    }

    #[test]
    fn cover_of_projective_is_trivial() {
        let a = a3();
        let p = projective(&a, 1);
        let c = projective_cover(&p);
        assert_eq!(c.free.tops, vec![1]);
        assert!(c.pi.is_iso());
    }

    #[test]
    fn injective_of_a3() {
        let a = a3();
        assert_eq!(injective(&a, 2).dims(), &[1, 1, 1]);
        assert_eq!(injective(&a, 0).dims(), &[1, 0, 0]);
    }

    #[test]
    fn dual_of_projective_has_same_dimension_vector() {
        let a = a3();
        let d = projective(&a, 0).dual();
        assert_eq!(d.dims(), &[1, 1, 1]);
        assert!(d.algebra().is_opposite());
    }

    #[test]
    fn direct_sum_dimensions_add() {
        let a = a3();
        let s = direct_sum(&a, &[projective(&a, 0), simple(&a, 1)]);
        assert_eq!(s.module.dims(), &[1, 2, 1]);
        assert!(s.proj[0].compose(&s.incl[0]).is_iso());
        assert!(s.proj[1].compose(&s.incl[0]).is_zero());
    }

    #[test]
    fn bad_relation_rejected() {
        let f = Field::prime(101).unwrap();
        let q = Quiver::new(
            3,
            vec![
                Arrow { name: "a".into(), source: 0, target: 1 },
                Arrow { name: "b".into(), source: 1, target: 2 },
            ],
        )
        .unwrap();
        let r = crate::algebra::Relation {
            terms: vec![(f.one(), vec![1, 0])],
        };
        let alg = Arc::new(Algebra::bound_quiver(f, q, vec![r], 10).unwrap());
        let one = Matrix::identity(f, 1);
        let err = Module::new(&alg, vec![1, 1, 1], vec![one.clone(), one]).unwrap_err();
        assert!(matches!(err, CoreError::Relation(_)));
    }
}
