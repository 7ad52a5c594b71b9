//! Filtrations by a family of modules: bottom-up search with certificates,
//! reordering into ordered filtrations, `min`, and peeling the bottom layer.

use std::collections::{HashMap, HashSet};

use strata_linalg::Matrix;

use crate::homology::{factor_through_mono, ShortExactSequence};
use crate::module::{hom_space, Module, Morphism, Submodule};
use crate::search::{candidates, SearchConfig};
use crate::CoreError;

/// A linear order on `0..t`, stored as the sequence from smallest to largest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearOrder {
    seq: Vec<usize>,
    rank: Vec<usize>,
}

impl LinearOrder {
    pub fn natural(t: usize) -> LinearOrder {
        LinearOrder::from_sequence((0..t).collect()).expect("identity permutation")
    }

    pub fn from_sequence(seq: Vec<usize>) -> Result<LinearOrder, CoreError> {
        let t = seq.len();
        let mut rank = vec![usize::MAX; t];
        for (r, &i) in seq.iter().enumerate() {
            if i >= t || rank[i] != usize::MAX {
                return Err(CoreError::Input(format!("order {seq:?} is not a permutation")));
            }
            rank[i] = r;
        }
        Ok(LinearOrder { seq, rank })
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }
    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }
    pub fn sequence(&self) -> &[usize] {
        &self.seq
    }
    pub fn rank(&self, i: usize) -> usize {
        self.rank[i]
    }
    pub fn less(&self, i: usize, j: usize) -> bool {
        self.rank[i] < self.rank[j]
    }
    pub fn min(&self) -> usize {
        self.seq[0]
    }
    pub fn reversed(&self) -> LinearOrder {
        LinearOrder::from_sequence(self.seq.iter().rev().copied().collect()).expect("permutation")
    }
    /// Indices strictly above `i`.
    pub fn above(&self, i: usize) -> Vec<usize> {
        self.seq[self.rank[i] + 1..].to_vec()
    }
    /// Indices at most `i`.
    pub fn up_to(&self, i: usize) -> Vec<usize> {
        self.seq[..=self.rank[i]].to_vec()
    }
}

/// One layer: the family index and a linear map `Θ(index) → X` whose image
/// together with the previous step spans this step, inducing an isomorphism
/// onto the factor.
#[derive(Clone, Debug)]
pub struct Factor {
    pub index: usize,
    pub map: Vec<Matrix>,
}

#[derive(Clone, Debug)]
pub struct FiltrationCertificate {
    pub module: Module,
    /// `0 = X₀ ⊆ X₁ ⊆ ⋯ ⊆ Xₙ = X`.
    pub chain: Vec<Submodule>,
    /// `factors[k]` describes `X_{k+1}/X_k`.
    pub factors: Vec<Factor>,
    pub ordered: bool,
}

impl FiltrationCertificate {
    pub fn len(&self) -> usize {
        self.factors.len()
    }
    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
    pub fn indices(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.index).collect()
    }
    pub fn bottom(&self) -> Option<usize> {
        self.factors.first().map(|f| f.index)
    }

    fn is_ordered_by(&self, ord: &LinearOrder) -> bool {
        self.factors.windows(2).all(|w| ord.rank(w[0].index) <= ord.rank(w[1].index))
    }

    /// Independent re-check of nesting, factor isomorphisms and the ordered flag.
    pub fn verify(&self, family: &[Module], ord: &LinearOrder) -> Result<(), String> {
        let x = &self.module;
        if self.chain.len() != self.factors.len() + 1 {
            return Err("chain and factor counts disagree".into());
        }
        if !self.chain[0].is_zero() || !self.chain.last().expect("nonempty").is_whole() {
            return Err("chain must run from 0 to the whole module".into());
        }
        for (k, fac) in self.factors.iter().enumerate() {
            let (lo, hi) = (&self.chain[k], &self.chain[k + 1]);
            if !hi.contains(lo) {
                return Err(format!("step {k} is not nested"));
            }
            let theta = family
                .get(fac.index)
                .ok_or_else(|| format!("step {k} names an unknown family member"))?;
            let q = lo.quotient();
            let mats: Vec<Matrix> = q
                .proj
                .mats()
                .iter()
                .zip(&fac.map)
                .map(|(p, m)| p.mul(m))
                .collect();
            let psi = Morphism::new(theta, &q.module, mats)
                .map_err(|e| format!("step {k}: factor map is not a module map ({e})"))?;
            if !psi.is_injective() {
                return Err(format!("step {k}: factor map is not injective"));
            }
            let target = hi.image_under(&q.proj);
            if !psi.image().same_as(&target) {
                return Err(format!("step {k}: factor map misses the layer"));
            }
            if x.dims().len() != fac.map.len() {
                return Err(format!("step {k}: wrong number of blocks"));
            }
        }
        if self.ordered && !self.is_ordered_by(ord) {
            return Err("flagged ordered but indices decrease".into());
        }
        Ok(())
    }
}

impl FiltrationCertificate {
    /// The zero module with the empty filtration.
    pub fn empty(module: &Module) -> FiltrationCertificate {
        FiltrationCertificate {
            module: module.clone(),
            chain: vec![Submodule::zero(module)],
            factors: Vec::new(),
            ordered: true,
        }
    }

    /// `Θ(index)` filtered by itself.
    pub fn single(module: &Module, index: usize) -> FiltrationCertificate {
        let f = module.field();
        FiltrationCertificate {
            module: module.clone(),
            chain: vec![Submodule::zero(module), Submodule::whole(module)],
            factors: vec![Factor {
                index,
                map: module.dims().iter().map(|&d| Matrix::identity(f, d)).collect(),
            }],
            ordered: true,
        }
    }

    /// Transport along an isomorphism `iso: module → target`.
    pub fn transport(&self, iso: &Morphism) -> FiltrationCertificate {
        FiltrationCertificate {
            module: iso.target().clone(),
            chain: self.chain.iter().map(|s| s.image_under(iso)).collect(),
            factors: self
                .factors
                .iter()
                .map(|f| Factor {
                    index: f.index,
                    map: iso.mats().iter().zip(&f.map).map(|(a, m)| a.mul(m)).collect(),
                })
                .collect(),
            ordered: self.ordered,
        }
    }
}

/// Certificate for `X` from certificates of a submodule `K` (with inclusion
/// `incl`) and of the quotient `Y` (with projection `proj`), `K = ker proj`.
pub fn extend_certificate(
    sub: &FiltrationCertificate,
    incl: &Morphism,
    quot: &FiltrationCertificate,
    proj: &Morphism,
    ord: &LinearOrder,
) -> FiltrationCertificate {
    let x = incl.target();
    let f = x.field();
    let sections: Vec<Matrix> = proj
        .mats()
        .iter()
        .map(|p| p.solve_matrix(&Matrix::identity(f, p.rows())).expect("surjective"))
        .collect();
    let mut chain: Vec<Submodule> = sub.chain.iter().map(|s| s.image_under(incl)).collect();
    chain.extend(quot.chain[1..].iter().map(|s| Submodule::preimage(proj, s)));
    let mut factors: Vec<Factor> = sub
        .factors
        .iter()
        .map(|fa| Factor {
            index: fa.index,
            map: incl.mats().iter().zip(&fa.map).map(|(i, m)| i.mul(m)).collect(),
        })
        .collect();
    factors.extend(quot.factors.iter().map(|fa| Factor {
        index: fa.index,
        map: sections.iter().zip(&fa.map).map(|(s, m)| s.mul(m)).collect(),
    }));
    let mut cert = FiltrationCertificate {
        module: x.clone(),
        chain,
        factors,
        ordered: false,
    };
    cert.ordered = cert.is_ordered_by(ord);
    cert
}

#[derive(Clone, Debug)]
pub enum Membership {
    Filtered(FiltrationCertificate),
    NotFiltered,
    Undecided,
}

impl Membership {
    pub fn certificate(&self) -> Option<&FiltrationCertificate> {
        match self {
            Membership::Filtered(c) => Some(c),
            _ => None,
        }
    }
    pub fn is_filtered(&self) -> bool {
        matches!(self, Membership::Filtered(_))
    }
}

/// Whether `dims` is a sum of family dimension vectors (with repetition).
struct Tiler {
    parts: Vec<Vec<usize>>,
    memo: HashMap<Vec<usize>, bool>,
}

impl Tiler {
    fn new(family: &[Module], allowed: &[usize]) -> Tiler {
        Tiler {
            parts: allowed
                .iter()
                .map(|&j| family[j].dims().to_vec())
                .filter(|d| d.iter().any(|&x| x > 0))
                .collect(),
            memo: HashMap::new(),
        }
    }

    fn tiles(&mut self, d: &[usize]) -> bool {
        if d.iter().all(|&x| x == 0) {
            return true;
        }
        if let Some(&b) = self.memo.get(d) {
            return b;
        }
        let mut ok = false;
        for k in 0..self.parts.len() {
            if let Some(rest) = subtract(d, &self.parts[k]) {
                if self.tiles(&rest) {
                    ok = true;
                    break;
                }
            }
        }
        self.memo.insert(d.to_vec(), ok);
        ok
    }
}

fn subtract(a: &[usize], b: &[usize]) -> Option<Vec<usize>> {
    a.iter().zip(b).map(|(x, y)| x.checked_sub(*y)).collect()
}

struct Search<'a> {
    x: Module,
    family: &'a [Module],
    allowed: Vec<usize>,
    ord: &'a LinearOrder,
    cfg: &'a SearchConfig,
    ordered_only: bool,
    first: Option<usize>,
    limit: usize,
    spent: u64,
    incomplete: bool,
    tiler: Tiler,
    failed: HashSet<(Vec<usize>, Vec<String>, usize)>,
    found: Vec<FiltrationCertificate>,
}

impl Search<'_> {
    fn run(&mut self) {
        let f = self.x.field();
        let proj = Morphism::identity(&self.x);
        let sec = self.x.dims().iter().map(|&d| Matrix::identity(f, d)).collect();
        let chain = vec![Submodule::zero(&self.x)];
        self.descend(self.x.clone(), proj, sec, chain, Vec::new());
    }

    fn state_key(&self, y: &Module, floor: usize) -> (Vec<usize>, Vec<String>, usize) {
        let floor = if self.ordered_only { floor } else { 0 };
        (y.dims().to_vec(), y.gens().iter().map(|m| m.to_string()).collect(), floor)
    }

    /// Returns true when the search should stop.
    fn descend(
        &mut self,
        y: Module,
        proj: Morphism,
        sec: Vec<Matrix>,
        chain: Vec<Submodule>,
        factors: Vec<Factor>,
    ) -> bool {
        if y.is_zero() {
            let cert = FiltrationCertificate {
                module: self.x.clone(),
                ordered: factors
                    .windows(2)
                    .all(|w| self.ord.rank(w[0].index) <= self.ord.rank(w[1].index)),
                chain,
                factors,
            };
            self.found.push(cert);
            return self.found.len() >= self.limit;
        }
        let floor = factors.last().map(|f| self.ord.rank(f.index)).unwrap_or(0);
        let key = self.state_key(&y, floor);
        if self.failed.contains(&key) {
            return false;
        }
        let before = self.found.len();
        let incomplete_before = self.incomplete;
        let order: Vec<usize> = self
            .ord
            .sequence()
            .iter()
            .copied()
            .filter(|j| self.allowed.contains(j))
            .filter(|&j| !self.ordered_only || self.ord.rank(j) >= floor)
            .filter(|&j| !factors.is_empty() || self.first.is_none_or(|b| b == j))
            .collect();
        for j in order {
            let theta = &self.family[j];
            let Some(rest) = subtract(y.dims(), theta.dims()) else { continue };
            if theta.is_zero() || !self.tiler.tiles(&rest) {
                continue;
            }
            let h = hom_space(theta, &y).expect("same algebra");
            if h.dim() == 0 {
                continue;
            }
            let mut seen: Vec<Submodule> = Vec::new();
            let cands = candidates(y.field(), h.dim(), self.cfg);
            if !cands.exhaustive {
                self.incomplete = true;
            }
            for c in cands {
                if self.spent >= self.cfg.budget {
                    self.incomplete = true;
                    return true;
                }
                self.spent += 1;
                let phi = h.element(&c);
                if !phi.is_injective() {
                    continue;
                }
                let img = phi.image();
                if seen.iter().any(|s| s.same_as(&img)) {
                    continue;
                }
                seen.push(img.clone());
                let step = Submodule::preimage(&proj, &img);
                let map: Vec<Matrix> = sec.iter().zip(phi.mats()).map(|(s, m)| s.mul(m)).collect();
                let q = img.quotient();
                let nproj = q.proj.compose(&proj);
                let nsec: Vec<Matrix> = sec.iter().zip(&q.section).map(|(a, b)| a.mul(b)).collect();
                let mut nchain = chain.clone();
                nchain.push(step);
                let mut nfactors = factors.clone();
                nfactors.push(Factor { index: j, map });
                if self.descend(q.module, nproj, nsec, nchain, nfactors) {
                    return true;
                }
            }
        }
        if self.found.len() == before && self.incomplete == incomplete_before {
            self.failed.insert(key);
        }
        false
    }
}

#[allow(clippy::too_many_arguments)]
fn run_search(
    x: &Module,
    family: &[Module],
    allowed: Option<&[usize]>,
    ord: &LinearOrder,
    cfg: &SearchConfig,
    ordered_only: bool,
    first: Option<usize>,
    limit: usize,
) -> Result<(Vec<FiltrationCertificate>, bool), CoreError> {
    if family.len() != ord.len() {
        return Err(CoreError::Input("order size differs from family size".into()));
    }
    if family.iter().any(|m| !m.same_algebra(x)) {
        return Err(CoreError::AlgebraMismatch);
    }
    let allowed: Vec<usize> = allowed.map(<[usize]>::to_vec).unwrap_or_else(|| (0..family.len()).collect());
    let mut s = Search {
        x: x.clone(),
        family,
        tiler: Tiler::new(family, &allowed),
        allowed,
        ord,
        cfg,
        ordered_only,
        first,
        limit: limit.max(1),
        spent: 0,
        incomplete: false,
        failed: HashSet::new(),
        found: Vec::new(),
    };
    if s.tiler.tiles(x.dims()) {
        s.run();
    }
    let complete = !s.incomplete;
    Ok((s.found, complete))
}

/// Find a filtration of `X` by `family` restricted to `allowed` (all by default).
pub fn membership_in(
    x: &Module,
    family: &[Module],
    allowed: Option<&[usize]>,
    ord: &LinearOrder,
    cfg: &SearchConfig,
) -> Result<Membership, CoreError> {
    let (found, complete) = run_search(x, family, allowed, ord, cfg, false, None, 1)?;
    Ok(match found.into_iter().next() {
        Some(c) => Membership::Filtered(c),
        None if complete => Membership::NotFiltered,
        None => Membership::Undecided,
    })
}

pub fn membership(x: &Module, family: &[Module], ord: &LinearOrder, cfg: &SearchConfig) -> Result<Membership, CoreError> {
    membership_in(x, family, None, ord, cfg)
}

/// An ordered filtration found directly (factor indices non-decreasing upward).
pub fn ordered_membership(x: &Module, family: &[Module], ord: &LinearOrder, cfg: &SearchConfig) -> Result<Membership, CoreError> {
    let (found, complete) = run_search(x, family, None, ord, cfg, true, None, 1)?;
    Ok(match found.into_iter().next() {
        Some(c) => Membership::Filtered(c),
        None if complete => Membership::NotFiltered,
        None => Membership::Undecided,
    })
}

/// Up to `limit` distinct certificates reached by the search, ordered ones
/// only when `ordered_only`.
pub fn all_certificates(
    x: &Module,
    family: &[Module],
    ord: &LinearOrder,
    cfg: &SearchConfig,
    ordered_only: bool,
    limit: usize,
) -> Result<Vec<FiltrationCertificate>, CoreError> {
    Ok(run_search(x, family, None, ord, cfg, ordered_only, None, limit)?.0)
}

/// Indices `j` for which some ordered filtration of `X` has bottom factor
/// `Θ(j)`, and whether every index was decided within budget.
pub fn ordered_bottoms(
    x: &Module,
    family: &[Module],
    ord: &LinearOrder,
    cfg: &SearchConfig,
) -> Result<(Vec<usize>, bool), CoreError> {
    let mut bottoms = Vec::new();
    let mut complete = true;
    for &j in ord.sequence() {
        let (found, done) = run_search(x, family, None, ord, cfg, true, Some(j), 1)?;
        if !found.is_empty() {
            bottoms.push(j);
        } else if !done {
            complete = false;
        }
    }
    Ok((bottoms, complete))
}

/// Failure to swap two adjacent layers: the middle extension did not split.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("layers {lower} (below) and {upper} (above) form a non-split extension")]
pub struct SwapObstruction {
    pub lower: usize,
    pub upper: usize,
}

/// Rearrange a certificate into an ordered one by adjacent swaps.
pub fn reorder(
    cert: &FiltrationCertificate,
    family: &[Module],
    ord: &LinearOrder,
) -> Result<FiltrationCertificate, SwapObstruction> {
    let mut c = cert.clone();
    loop {
        let pos = c
            .factors
            .windows(2)
            .position(|w| ord.rank(w[0].index) > ord.rank(w[1].index));
        let Some(k) = pos else { break };
        swap_layers(&mut c, family, k)?;
    }
    c.ordered = true;
    Ok(c)
}

fn swap_layers(c: &mut FiltrationCertificate, family: &[Module], k: usize) -> Result<(), SwapObstruction> {
    let (a, b) = (c.factors[k].index, c.factors[k + 1].index);
    let obstruction = SwapObstruction { lower: a, upper: b };
    let base = c.chain[k].quotient();
    let (_, w_incl) = c.chain[k + 2].image_under(&base.proj).to_module();
    let to_base = |m: &[Matrix]| -> Vec<Matrix> { base.proj.mats().iter().zip(m).map(|(p, x)| p.mul(x)).collect() };
    let lower = Morphism::unchecked(&family[a], &base.module, to_base(&c.factors[k].map));
    let lower = factor_through_mono(&lower, &w_incl).expect("lower layer lies in the window");
    let r = lower.image().quotient();
    let ses = ShortExactSequence::new(lower, r.proj.clone()).expect("two-layer window is exact");
    let sigma_r = ses.section().ok().flatten().ok_or(obstruction.clone())?;
    let upper_lin: Vec<Matrix> = to_base(&c.factors[k + 1].map);
    let upper_w: Vec<Matrix> = upper_lin
        .iter()
        .zip(w_incl.mats())
        .map(|(u, i)| i.solve_matrix(u).expect("upper layer lies in the window"))
        .collect();
    let psi = Morphism::unchecked(
        &family[b],
        &r.module,
        r.proj.mats().iter().zip(&upper_w).map(|(p, u)| p.mul(u)).collect(),
    );
    let sigma = sigma_r.compose(&psi);
    let in_base = w_incl.compose(&sigma);
    let lifted: Vec<Matrix> = base.section.iter().zip(in_base.mats()).map(|(s, m)| s.mul(m)).collect();
    let new_step = Submodule::preimage(&base.proj, &in_base.image());
    c.chain[k + 1] = new_step;
    let old_lower = c.factors[k].map.clone();
    c.factors[k] = Factor { index: b, map: lifted };
    c.factors[k + 1] = Factor { index: a, map: old_lower };
    Ok(())
}

/// `min(X)`: bottom index of an ordered filtration.
pub fn min_index(x: &Module, family: &[Module], ord: &LinearOrder, cfg: &SearchConfig) -> Result<Option<usize>, CoreError> {
    match ordered_membership(x, family, ord, cfg)? {
        Membership::Filtered(c) => Ok(c.bottom()),
        _ => Ok(None),
    }
}

/// `0 → Ψ(min X) → X → X′ → 0` with an ordered certificate for `X′`.
#[derive(Clone, Debug)]
pub struct Peeled {
    pub ses: ShortExactSequence,
    pub min: usize,
    pub rest: FiltrationCertificate,
}

pub fn peel_bottom(cert: &FiltrationCertificate, family: &[Module]) -> Peeled {
    let x = &cert.module;
    let bottom = &cert.factors[0];
    let inject = Morphism::unchecked(&family[bottom.index], x, bottom.map.clone());
    let q = cert.chain[1].quotient();
    let rest_mod = q.module.clone();
    let chain = cert.chain[1..].iter().map(|s| s.image_under(&q.proj)).collect();
    let factors = cert.factors[1..]
        .iter()
        .map(|f| Factor {
            index: f.index,
            map: q.proj.mats().iter().zip(&f.map).map(|(p, m)| p.mul(m)).collect(),
        })
        .collect();
    let ses = ShortExactSequence::new(inject, q.proj).expect("bottom layer is a submodule");
    Peeled {
        ses,
        min: bottom.index,
        rest: FiltrationCertificate {
            module: rest_mod,
            chain,
            factors,
            ordered: cert.ordered,
        },
    }
}
