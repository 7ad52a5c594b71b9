//! Verification of proper (pre-)costratifying and Ext-injective stratifying
//! systems, and the iterated-extension construction of the family Q.

use crate::decompose::{is_indecomposable, EndoRing, Indecomposability};
use crate::filtration::{
    extend_certificate, membership_in, FiltrationCertificate, LinearOrder, Membership,
};
use crate::homology::{ext1, factor_through_mono, ShortExactSequence};
use crate::module::{hom_space, Module, Morphism, Submodule};
use crate::search::{candidates, SearchConfig};
use crate::CoreError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemKind {
    PreCostratifying,
    Costratifying,
    ExtInjective,
}

impl SystemKind {
    pub fn name(&self) -> &'static str {
        match self {
            SystemKind::PreCostratifying => "ppcs",
            SystemKind::Costratifying => "pcs",
            SystemKind::ExtInjective => "ess",
        }
    }
}

/// Concrete evidence that an axiom fails. Indices are 0-based.
#[derive(Clone, Debug)]
pub enum Witness {
    /// A nonzero morphism between two family members.
    Hom { from: usize, to: usize, map: Morphism },
    /// A nonzero extension class, given by its realized sequence.
    Ext { from: usize, to: usize, sequence: ShortExactSequence },
    /// A nilpotent nonzero endomorphism.
    NotDivisionRing { index: usize, radical_element: Morphism },
    /// An idempotent splitting a module that must be indecomposable.
    Decomposable { index: usize, idempotent: Morphism },
    /// No sequence of the required shape exists.
    MissingSequence { index: usize, reason: String },
    /// A family member is the zero module.
    ZeroModule { index: usize },
}

#[derive(Clone, Debug)]
pub enum AxiomStatus {
    Passed,
    Failed(Box<Witness>),
    Undecided(String),
}

#[derive(Clone, Debug)]
pub struct AxiomResult {
    pub axiom: &'static str,
    pub statement: &'static str,
    pub status: AxiomStatus,
    pub notes: Vec<String>,
}

impl AxiomResult {
    fn new(axiom: &'static str, statement: &'static str) -> Self {
        AxiomResult {
            axiom,
            statement,
            status: AxiomStatus::Passed,
            notes: Vec::new(),
        }
    }
    fn fail(&mut self, w: Witness) {
        if matches!(self.status, AxiomStatus::Passed | AxiomStatus::Undecided(_)) {
            self.status = AxiomStatus::Failed(Box::new(w));
        }
    }
    fn undecided(&mut self, why: String) {
        if matches!(self.status, AxiomStatus::Passed) {
            self.status = AxiomStatus::Undecided(why);
        }
    }
    pub fn passed(&self) -> bool {
        matches!(self.status, AxiomStatus::Passed)
    }
}

/// An attached sequence with a certificate for its filtered end term.
#[derive(Clone, Debug)]
pub struct CertifiedSequence {
    pub index: usize,
    pub sequence: ShortExactSequence,
    pub certificate: FiltrationCertificate,
}

#[derive(Clone, Debug)]
pub struct SystemVerdict {
    pub kind: SystemKind,
    pub axioms: Vec<AxiomResult>,
    pub sequences: Vec<CertifiedSequence>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Overall {
    Passed,
    Failed,
    Undecided,
}

impl SystemVerdict {
    pub fn passed(&self) -> bool {
        self.axioms.iter().all(AxiomResult::passed)
    }
    pub fn overall(&self) -> Overall {
        if self.passed() {
            Overall::Passed
        } else if self.axioms.iter().any(|a| matches!(a.status, AxiomStatus::Failed(_))) {
            Overall::Failed
        } else {
            Overall::Undecided
        }
    }
    pub fn axiom(&self, name: &str) -> Option<&AxiomResult> {
        self.axioms.iter().find(|a| a.axiom == name)
    }
    /// First failing axiom, if any.
    pub fn first_failure(&self) -> Option<&AxiomResult> {
        self.axioms.iter().find(|a| matches!(a.status, AxiomStatus::Failed(_)))
    }
}

fn check_sizes(a: &[Module], b: &[Module], ord: &LinearOrder) -> Result<(), CoreError> {
    if a.len() != b.len() || a.len() != ord.len() {
        return Err(CoreError::Input("families and order must have equal sizes".into()));
    }
    Ok(())
}

fn division_ring_axiom(family: &[Module], cfg: &SearchConfig) -> Result<AxiomResult, CoreError> {
    let mut r = AxiomResult::new("a", "End(Ψ(i)) is a division ring");
    for (i, m) in family.iter().enumerate() {
        if m.is_zero() {
            r.fail(Witness::ZeroModule { index: i });
            continue;
        }
        let e = EndoRing::new(m)?;
        if let Some(x) = e.radical_basis().into_iter().next() {
            r.fail(Witness::NotDivisionRing {
                index: i,
                radical_element: x,
            });
            continue;
        }
        if e.residue_dim() > 1 {
            match is_indecomposable(m, cfg)? {
                Indecomposability::Indecomposable { residue_dim } => r.notes.push(format!(
                    "End(Ψ({})) is a division ring of dimension {residue_dim}",
                    i + 1
                )),
                Indecomposability::Decomposable(sp) => r.fail(Witness::Decomposable {
                    index: i,
                    idempotent: sp.idempotent,
                }),
                Indecomposability::Undecided { residue_dim, .. } => r.undecided(format!(
                    "End(Ψ({})) is semisimple of dimension {residue_dim}; the idempotent search ran out of budget",
                    i + 1
                )),
            }
        }
    }
    Ok(r)
}

/// `Hom(F(i), F(j)) = 0` whenever `before(i, j)`.
fn hom_vanishing(
    axiom: &'static str,
    statement: &'static str,
    family: &[Module],
    pairs: &[(usize, usize)],
) -> Result<AxiomResult, CoreError> {
    let mut r = AxiomResult::new(axiom, statement);
    for &(i, j) in pairs {
        let h = hom_space(&family[i], &family[j])?;
        if let Some(f) = h.basis().first() {
            r.fail(Witness::Hom {
                from: i,
                to: j,
                map: f.clone(),
            });
            return Ok(r);
        }
    }
    Ok(r)
}

fn ext_vanishing(
    axiom: &'static str,
    statement: &'static str,
    left: &[Module],
    right: &[Module],
    pairs: &[(usize, usize)],
) -> Result<AxiomResult, CoreError> {
    let mut r = AxiomResult::new(axiom, statement);
    for &(i, j) in pairs {
        let e = ext1(&left[i], &right[j])?;
        if !e.is_zero() {
            r.fail(Witness::Ext {
                from: i,
                to: j,
                sequence: e.realize_class(0),
            });
            return Ok(r);
        }
    }
    Ok(r)
}

fn pairs_less(ord: &LinearOrder) -> Vec<(usize, usize)> {
    let s = ord.sequence();
    let mut out = Vec::new();
    for a in 0..s.len() {
        for b in a + 1..s.len() {
            out.push((s[a], s[b]));
        }
    }
    out
}

fn all_pairs(t: usize) -> Vec<(usize, usize)> {
    (0..t).flat_map(|i| (0..t).map(move |j| (i, j))).collect()
}

fn indecomposable_axiom(family: &[Module], cfg: &SearchConfig) -> Result<AxiomResult, CoreError> {
    let mut r = AxiomResult::new("indecomposable", "each member of the second family is indecomposable");
    for (i, m) in family.iter().enumerate() {
        if m.is_zero() {
            r.fail(Witness::ZeroModule { index: i });
            continue;
        }
        match is_indecomposable(m, cfg)? {
            Indecomposability::Indecomposable { .. } => {}
            Indecomposability::Decomposable(sp) => r.fail(Witness::Decomposable {
                index: i,
                idempotent: sp.idempotent,
            }),
            Indecomposability::Undecided { .. } => {
                r.undecided(format!("indecomposability of member {} undecided", i + 1))
            }
        }
    }
    Ok(r)
}

pub fn verify_ppcs(psi: &[Module], ord: &LinearOrder, cfg: &SearchConfig) -> Result<SystemVerdict, CoreError> {
    check_sizes(psi, psi, ord)?;
    let less = pairs_less(ord);
    Ok(SystemVerdict {
        kind: SystemKind::PreCostratifying,
        axioms: vec![
            division_ring_axiom(psi, cfg)?,
            hom_vanishing("b", "Hom(Ψ(i), Ψ(j)) = 0 for i < j", psi, &less)?,
            ext_vanishing("c", "Ext¹(Ψ(i), Ψ(j)) = 0 for i < j", psi, psi, &less)?,
        ],
        sequences: Vec::new(),
    })
}

enum SearchResult {
    Found(CertifiedSequence),
    None,
    Undecided,
}

/// Surjections `Q(i) ↠ Ψ(i)` whose kernel lies in `F({Ψ(j): j ≤ i})`.
fn find_costratifying_sequence(
    psi: &[Module],
    q: &Module,
    i: usize,
    ord: &LinearOrder,
    cfg: &SearchConfig,
) -> Result<SearchResult, CoreError> {
    let target = &psi[i];
    let h = hom_space(q, target)?;
    let allowed = ord.up_to(i);
    let cands = candidates(q.field(), h.dim(), cfg);
    let mut decided = cands.exhaustive;
    let mut seen: Vec<Submodule> = Vec::new();
    for c in cands {
        let beta = h.element(&c);
        if !beta.is_surjective() {
            continue;
        }
        let ker = beta.kernel();
        if seen.iter().any(|s| s.same_as(&ker)) {
            continue;
        }
        seen.push(ker.clone());
        let (z, incl) = ker.to_module();
        let cert = if z.is_zero() {
            Membership::Filtered(FiltrationCertificate::empty(&z))
        } else {
            membership_in(&z, psi, Some(&allowed), ord, cfg)?
        };
        match cert {
            Membership::Filtered(cert) => {
                return Ok(SearchResult::Found(CertifiedSequence {
                    index: i,
                    sequence: ShortExactSequence::new(incl, beta)?,
                    certificate: cert,
                }))
            }
            Membership::Undecided => decided = false,
            Membership::NotFiltered => {}
        }
    }
    Ok(if decided { SearchResult::None } else { SearchResult::Undecided })
}

/// Monomorphisms `Θ(i) ↪ Y(i)` whose cokernel lies in `F({Θ(j): j < i})`.
fn find_ext_injective_sequence(
    theta: &[Module],
    y: &Module,
    i: usize,
    ord: &LinearOrder,
    cfg: &SearchConfig,
) -> Result<SearchResult, CoreError> {
    let source = &theta[i];
    let h = hom_space(source, y)?;
    let below: Vec<usize> = ord.sequence()[..ord.rank(i)].to_vec();
    let cands = candidates(y.field(), h.dim(), cfg);
    let mut decided = cands.exhaustive;
    let mut seen: Vec<Submodule> = Vec::new();
    for c in cands {
        let alpha = h.element(&c);
        if !alpha.is_injective() {
            continue;
        }
        let img = alpha.image();
        if seen.iter().any(|s| s.same_as(&img)) {
            continue;
        }
        seen.push(img.clone());
        let quot = img.quotient();
        let cert = if quot.module.is_zero() {
            Membership::Filtered(FiltrationCertificate::empty(&quot.module))
        } else if below.is_empty() {
            Membership::NotFiltered
        } else {
            membership_in(&quot.module, theta, Some(&below), ord, cfg)?
        };
        match cert {
            Membership::Filtered(cert) => {
                return Ok(SearchResult::Found(CertifiedSequence {
                    index: i,
                    sequence: ShortExactSequence::new(alpha, quot.proj)?,
                    certificate: cert,
                }))
            }
            Membership::Undecided => decided = false,
            Membership::NotFiltered => {}
        }
    }
    Ok(if decided { SearchResult::None } else { SearchResult::Undecided })
}

pub fn verify_pcs(
    psi: &[Module],
    q: &[Module],
    ord: &LinearOrder,
    cfg: &SearchConfig,
) -> Result<SystemVerdict, CoreError> {
    check_sizes(psi, q, ord)?;
    let less = pairs_less(ord);
    let mut seq_axiom = AxiomResult::new("c", "0 → Z(i) → Q(i) → Ψ(i) → 0 with Z(i) ∈ F({Ψ(j): j ≤ i})");
    let mut sequences = Vec::new();
    for (i, qi) in q.iter().enumerate() {
        match find_costratifying_sequence(psi, qi, i, ord, cfg)? {
            SearchResult::Found(s) => sequences.push(s),
            SearchResult::None => seq_axiom.fail(Witness::MissingSequence {
                index: i,
                reason: "no surjection onto Ψ(i) has a kernel filtered by Ψ(j), j ≤ i".into(),
            }),
            SearchResult::Undecided => {
                seq_axiom.undecided(format!("sequence search for index {} undecided", i + 1))
            }
        }
    }
    Ok(SystemVerdict {
        kind: SystemKind::Costratifying,
        axioms: vec![
            division_ring_axiom(psi, cfg)?,
            hom_vanishing("b", "Hom(Ψ(i), Ψ(j)) = 0 for i < j", psi, &less)?,
            seq_axiom,
            ext_vanishing("d", "Ext¹(Q(i), Ψ(j)) = 0 for all i, j", q, psi, &all_pairs(psi.len()))?,
            indecomposable_axiom(q, cfg)?,
        ],
        sequences,
    })
}

pub fn verify_ess(
    theta: &[Module],
    y: &[Module],
    ord: &LinearOrder,
    cfg: &SearchConfig,
) -> Result<SystemVerdict, CoreError> {
    check_sizes(theta, y, ord)?;
    let greater: Vec<(usize, usize)> = pairs_less(ord).into_iter().map(|(i, j)| (j, i)).collect();
    let mut nonzero = AxiomResult::new("nonzero", "every Θ(i) is nonzero");
    for (i, m) in theta.iter().enumerate() {
        if m.is_zero() {
            nonzero.fail(Witness::ZeroModule { index: i });
        }
    }
    let mut seq_axiom = AxiomResult::new("b", "0 → Θ(i) → Y(i) → Z(i) → 0 with Z(i) ∈ F({Θ(j): j < i})");
    let mut sequences = Vec::new();
    for (i, yi) in y.iter().enumerate() {
        match find_ext_injective_sequence(theta, yi, i, ord, cfg)? {
            SearchResult::Found(s) => sequences.push(s),
            SearchResult::None => seq_axiom.fail(Witness::MissingSequence {
                index: i,
                reason: "no monomorphism from Θ(i) has a cokernel filtered by Θ(j), j < i".into(),
            }),
            SearchResult::Undecided => {
                seq_axiom.undecided(format!("sequence search for index {} undecided", i + 1))
            }
        }
    }
    Ok(SystemVerdict {
        kind: SystemKind::ExtInjective,
        axioms: vec![
            nonzero,
            hom_vanishing("a", "Hom(Θ(i), Θ(j)) = 0 for i > j", theta, &greater)?,
            seq_axiom,
            ext_vanishing("c", "Ext¹(Θ(i), Y(j)) = 0 for all i, j", theta, y, &all_pairs(theta.len()))?,
            indecomposable_axiom(y, cfg)?,
        ],
        sequences,
    })
}

/// One extension step `0 → Ψ(against) → X_{n+1} → X_n → 0`.
#[derive(Clone, Debug)]
pub struct ExtensionStep {
    pub sequence: ShortExactSequence,
    pub split: bool,
    pub indecomposable: bool,
}

/// The extension loop building (or fixing up) `Q(index)` against `Ψ(against)`.
#[derive(Clone, Debug)]
pub struct ExtensionChain {
    pub index: usize,
    pub against: usize,
    pub start: Module,
    pub steps: Vec<ExtensionStep>,
}

impl ExtensionChain {
    /// Modules of the chain, starting module first.
    pub fn modules(&self) -> Vec<Module> {
        let mut out = vec![self.start.clone()];
        out.extend(self.steps.iter().map(|s| s.sequence.middle().clone()));
        out
    }
}

#[derive(Clone, Debug, Default)]
pub struct ConstructionTrace {
    pub chains: Vec<ExtensionChain>,
}

impl ConstructionTrace {
    /// Every module produced by an extension step.
    pub fn intermediates(&self) -> Vec<Module> {
        self.chains
            .iter()
            .flat_map(|c| c.steps.iter().map(|s| s.sequence.middle().clone()))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub enum Construction {
    Constructed {
        q: Vec<Module>,
        sequences: Vec<CertifiedSequence>,
        trace: ConstructionTrace,
        closure: Box<SystemVerdict>,
    },
    /// A chain reached `cap` modules with the obstruction still nonzero.
    CapExceeded {
        index: usize,
        against: usize,
        trace: ConstructionTrace,
    },
    /// An intermediate module failed the indecomposability check.
    Decomposable {
        index: usize,
        module: Module,
        trace: ConstructionTrace,
    },
    /// Indecomposability of an intermediate module could not be decided.
    Undecided {
        index: usize,
        trace: ConstructionTrace,
    },
    /// The input is not a proper pre-costratifying system.
    NotPreCostratifying(Box<SystemVerdict>),
}

pub const DEFAULT_CAP: usize = 50;

/// State of one `Q(i)` under construction: the module, the epimorphism onto
/// `Ψ(i)`, and its kernel with a certificate.
struct Building {
    module: Module,
    beta: Morphism,
    kernel_incl: Morphism,
    kernel_cert: FiltrationCertificate,
}

enum LoopEnd {
    Done,
    Cap,
    Decomposable(Module),
    Undecided,
}

/// Extend `b` by `Ψ(m)` until `Ext¹(X, Ψ(m)) = 0`, keeping `ker β` certified.
#[allow(clippy::too_many_arguments)]
fn extension_loop(
    b: &mut Building,
    psi: &[Module],
    m: usize,
    index: usize,
    ord: &LinearOrder,
    cap: usize,
    cfg: &SearchConfig,
    trace: &mut ConstructionTrace,
) -> Result<LoopEnd, CoreError> {
    let mut chain = ExtensionChain {
        index,
        against: m,
        start: b.module.clone(),
        steps: Vec::new(),
    };
    let end = loop {
        let e = ext1(&b.module, &psi[m])?;
        if e.is_zero() {
            break LoopEnd::Done;
        }
        if chain.steps.len() + 1 >= cap {
            break LoopEnd::Cap;
        }
        let ses = e.realize_class(0);
        let split = ses.is_split()?;
        let x = ses.middle().clone();
        let ind = is_indecomposable(&x, cfg)?;
        chain.steps.push(ExtensionStep {
            sequence: ses.clone(),
            split,
            indecomposable: ind.is_indecomposable(),
        });
        match ind {
            Indecomposability::Decomposable(_) => break LoopEnd::Decomposable(x),
            Indecomposability::Undecided { .. } => break LoopEnd::Undecided,
            Indecomposability::Indecomposable { .. } => {}
        }
        // ker(β ∘ p) is an extension of ker β by the image of Ψ(m).
        let beta = b.beta.compose(&ses.project);
        let (_, kincl) = beta.kernel().to_module();
        let restricted = factor_through_mono(&ses.project.compose(&kincl), &b.kernel_incl)
            .expect("kernel maps into kernel");
        let bottom = factor_through_mono(&ses.inject, &kincl).expect("Ψ(m) lies in the kernel");
        let single = FiltrationCertificate::single(&psi[m], m);
        let cert = extend_certificate(&single, &bottom, &b.kernel_cert, &restricted, ord);
        *b = Building {
            module: x,
            beta,
            kernel_incl: kincl,
            kernel_cert: cert,
        };
    };
    trace.chains.push(chain);
    Ok(end)
}

/// Build `Q` for a proper pre-costratifying system by iterated non-split
/// extensions, processing indices from the top of the order downwards.
pub fn construct_q(
    psi: &[Module],
    ord: &LinearOrder,
    cap: usize,
    cfg: &SearchConfig,
) -> Result<Construction, CoreError> {
    let pre = verify_ppcs(psi, ord, cfg)?;
    if !pre.passed() {
        return Ok(Construction::NotPreCostratifying(Box::new(pre)));
    }
    let mut trace = ConstructionTrace::default();
    let mut built: Vec<Option<Building>> = (0..psi.len()).map(|_| None).collect();
    for &m in ord.sequence().iter().rev() {
        let id = Morphism::identity(&psi[m]);
        let zero = Submodule::zero(&psi[m]).to_module();
        let mut b = Building {
            module: psi[m].clone(),
            beta: id,
            kernel_cert: FiltrationCertificate::empty(&zero.0),
            kernel_incl: zero.1,
        };
        let mut order_above: Vec<usize> = ord.above(m);
        order_above.insert(0, m);
        for &i in &order_above {
            let cur = if i == m { &mut b } else { built[i].as_mut().expect("built above") };
            match extension_loop(cur, psi, m, i, ord, cap, cfg, &mut trace)? {
                LoopEnd::Done => {}
                LoopEnd::Cap => {
                    return Ok(Construction::CapExceeded {
                        index: i,
                        against: m,
                        trace,
                    })
                }
                LoopEnd::Decomposable(module) => {
                    return Ok(Construction::Decomposable {
                        index: i,
                        module,
                        trace,
                    })
                }
                LoopEnd::Undecided => return Ok(Construction::Undecided { index: i, trace }),
            }
        }
        built[m] = Some(b);
    }
    let built: Vec<Building> = built.into_iter().map(|b| b.expect("every index built")).collect();
    let q: Vec<Module> = built.iter().map(|b| b.module.clone()).collect();
    let sequences = built
        .iter()
        .enumerate()
        .map(|(i, b)| {
            Ok(CertifiedSequence {
                index: i,
                sequence: ShortExactSequence::new(b.kernel_incl.clone(), b.beta.clone())?,
                certificate: b.kernel_cert.clone(),
            })
        })
        .collect::<Result<Vec<_>, CoreError>>()?;
    let closure = verify_pcs(psi, &q, ord, cfg)?;
    Ok(Construction::Constructed {
        q,
        sequences,
        trace,
        closure: Box::new(closure),
    })
}

/// How a `𝕄_K` verdict was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Enumeration,
    Theorem,
}

#[derive(Clone, Debug)]
pub enum MonoOrZero {
    Holds(Provenance),
    /// A nonzero morphism with a nonzero kernel.
    Fails(Morphism),
    Undecided,
}

/// Context for the transport argument: `X` certified in `F(Ψ)` with all
/// factors at or above `λ`, and `K = Ψ(λ)`.
pub struct TransportHint<'a> {
    pub lambda: usize,
    pub certificate: &'a FiltrationCertificate,
    pub ord: &'a LinearOrder,
}

/// Whether every nonzero morphism `K → X` is a monomorphism.
pub fn mono_or_zero(
    k: &Module,
    x: &Module,
    hint: Option<TransportHint<'_>>,
    cfg: &SearchConfig,
) -> Result<MonoOrZero, CoreError> {
    let h = hom_space(k, x)?;
    if h.is_zero() {
        return Ok(MonoOrZero::Holds(Provenance::Enumeration));
    }
    let cands = candidates(k.field(), h.dim(), cfg);
    let exhaustive = cands.exhaustive;
    for c in cands {
        let f = h.element(&c);
        if !f.is_injective() {
            return Ok(MonoOrZero::Fails(f));
        }
    }
    if exhaustive {
        return Ok(MonoOrZero::Holds(Provenance::Enumeration));
    }
    if let Some(hint) = hint {
        let ok = hint
            .certificate
            .factors
            .iter()
            .all(|f| hint.ord.rank(f.index) >= hint.ord.rank(hint.lambda));
        if ok {
            return Ok(MonoOrZero::Holds(Provenance::Theorem));
        }
    }
    Ok(MonoOrZero::Undecided)
}
