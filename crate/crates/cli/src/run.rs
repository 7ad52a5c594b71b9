//! Commands over a parsed instance.

use std::time::Instant;

use strata_core::filtration::LinearOrder;
use strata_core::homology::ext1;
use strata_core::module::Module;
use strata_core::search::{SearchConfig, DEFAULT_BUDGET};
use strata_core::systems::{construct_q, verify_ess, verify_pcs, verify_ppcs, Construction, DEFAULT_CAP};
use strata_core::transfer::{
    ess_existence_check, is_characteristic_tilting, is_standardly_stratified, pcs_existence_check,
    stratified_families, Answer, EndoContext, ExistenceReport,
};
use strata_core::{Algebra, CoreError, Field};

use crate::bundled;
use crate::instance::{parse_instance, Family, Instance, InstanceError};
use crate::report::{
    verdict_outcome, ArrowCount, CertificateJson, ChainJson, CheckJson, ConfigEcho, ExtRow, ModuleSummary,
    Outcome, Report, Section, SequenceJson, SystemJson,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    VerifyPpcs,
    VerifyPcs,
    VerifyEss,
    ConstructQ,
    StratModules,
    CheckSs,
    EssFromPcs,
    PcsFromEss,
    CharTilting,
    /// The chain of extensions of the first member of Ψ by itself.
    ExtensionLadder,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyPpcs => "verify-ppcs",
            Command::VerifyPcs => "verify-pcs",
            Command::VerifyEss => "verify-ess",
            Command::ConstructQ => "construct-q",
            Command::StratModules => "strat-modules",
            Command::CheckSs => "check-ss",
            Command::EssFromPcs => "ess-from-pcs",
            Command::PcsFromEss => "pcs-from-ess",
            Command::CharTilting => "char-tilting",
            Command::ExtensionLadder => "extension-ladder",
        }
    }
}

/// Command-line overrides; `None` falls back to the instance file.
#[derive(Clone, Debug, Default)]
pub struct Options {
    pub field: Option<Field>,
    pub budget: Option<u64>,
    pub cap: Option<usize>,
    pub seed: Option<u64>,
    /// 1-based permutation, smallest first.
    pub order: Option<Vec<usize>>,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("{0}")]
    Missing(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("unknown example `{0}` (available: a3, kronecker, loop)")]
    UnknownExample(String),
}

struct Ctx<'a> {
    inst: &'a Instance,
    cfg: SearchConfig,
    cap: usize,
    order: Option<Vec<usize>>,
}

impl Ctx<'_> {
    fn family(&self, key: &str, label: &str) -> Result<Family, RunError> {
        self.inst
            .family(key)
            .ok_or_else(|| RunError::Missing(format!("this command needs the family `{label}` (families.{key})")))
    }

    fn order(&self, t: usize) -> Result<LinearOrder, RunError> {
        match &self.order {
            Some(seq) => {
                if seq.len() != t {
                    return Err(RunError::Missing(format!("--order has {} entries, expected {t}", seq.len())));
                }
                if seq.contains(&0) {
                    return Err(RunError::Missing("--order is 1-based".into()));
                }
                Ok(LinearOrder::from_sequence(seq.iter().map(|i| i - 1).collect())?)
            }
            None => Ok(self.inst.order(t)),
        }
    }
}

fn summaries(f: &Family) -> Vec<ModuleSummary> {
    f.names
        .iter()
        .zip(&f.modules)
        .map(|(n, m)| ModuleSummary::of(m, Some(n)))
        .collect()
}

fn plain(ms: &[Module]) -> Vec<ModuleSummary> {
    ms.iter().map(|m| ModuleSummary::of(m, None)).collect()
}

fn existence_section(question: &str, r: &ExistenceReport) -> (Section, Outcome) {
    let closure = r.closure.as_ref().map(SystemJson::of);
    let outcome = match r.answer() {
        Answer::Yes => match &closure {
            Some(c) if c.verdict != Outcome::Passed => c.verdict,
            _ => Outcome::Passed,
        },
        Answer::No => Outcome::Failed,
        Answer::Undecided => Outcome::Undecided,
    };
    let answer = match r.answer() {
        Answer::Yes => "yes",
        Answer::No => "no",
        Answer::Undecided => "undecided",
    };
    (
        Section::Existence {
            question: question.into(),
            answer: answer.into(),
            checks: r.checks.iter().map(CheckJson::of).collect(),
            family: r.family.as_ref().map(|f| plain(f)),
            closure,
        },
        outcome,
    )
}

fn gamma_section(ctx: &EndoContext) -> Section {
    Section::EndomorphismAlgebra {
        dim: ctx.gamma().dim(),
        opposite_quiver: ctx
            .gabriel_quiver_op()
            .into_iter()
            .map(|(s, t, n)| ArrowCount {
                source: s + 1,
                target: t + 1,
                arrows: n,
            })
            .collect(),
    }
}

fn stratified_section(name: &str, alg: &std::sync::Arc<Algebra>, ord: &LinearOrder) -> Result<Section, RunError> {
    let fam = stratified_families(alg, ord)?;
    Ok(Section::Stratified {
        algebra: name.into(),
        order: ord.sequence().iter().map(|i| i + 1).collect(),
        standard: plain(&fam.standard_modules()),
        proper_standard: plain(&fam.proper_standard_modules()),
        proper_costandard: plain(&fam.proper_costandard),
    })
}

fn stratification_section(
    name: &str,
    alg: &std::sync::Arc<Algebra>,
    ord: &LinearOrder,
    cfg: &SearchConfig,
) -> Result<(Section, Outcome), RunError> {
    let s = is_standardly_stratified(alg, ord, cfg)?;
    let verdict = match s.verdict() {
        Some(true) => Outcome::Passed,
        Some(false) => Outcome::Failed,
        None => Outcome::Undecided,
    };
    Ok((
        Section::Stratification {
            algebra: name.into(),
            order: ord.sequence().iter().map(|i| i + 1).collect(),
            verdict,
            projectives: s.projectives.iter().map(|m| m.certificate().map(CertificateJson::of)).collect(),
        },
        verdict,
    ))
}

fn step(cmd: Command, c: &Ctx<'_>) -> Result<(Vec<Section>, Outcome), RunError> {
    let cfg = &c.cfg;
    match cmd {
        Command::VerifyPpcs => {
            let psi = c.family("psi", "Psi")?;
            let ord = c.order(psi.modules.len())?;
            let v = verify_ppcs(&psi.modules, &ord, cfg)?;
            Ok((
                vec![
                    Section::Family {
                        title: "Psi".into(),
                        members: summaries(&psi),
                    },
                    Section::System(SystemJson::of(&v)),
                ],
                verdict_outcome(&v),
            ))
        }
        Command::VerifyPcs => {
            let psi = c.family("psi", "Psi")?;
            let q = c.family("q", "Q")?;
            let ord = c.order(psi.modules.len())?;
            let v = verify_pcs(&psi.modules, &q.modules, &ord, cfg)?;
            Ok((
                vec![
                    Section::Family {
                        title: "Psi".into(),
                        members: summaries(&psi),
                    },
                    Section::Family {
                        title: "Q".into(),
                        members: summaries(&q),
                    },
                    Section::System(SystemJson::of(&v)),
                ],
                verdict_outcome(&v),
            ))
        }
        Command::VerifyEss => {
            let theta = c.family("theta", "Theta")?;
            let q = c.family("q", "Q")?;
            let ord = c.order(theta.modules.len())?;
            let v = verify_ess(&theta.modules, &q.modules, &ord, cfg)?;
            Ok((
                vec![
                    Section::Family {
                        title: "Theta".into(),
                        members: summaries(&theta),
                    },
                    Section::Family {
                        title: "Q".into(),
                        members: summaries(&q),
                    },
                    Section::System(SystemJson::of(&v)),
                ],
                verdict_outcome(&v),
            ))
        }
        Command::ConstructQ => {
            let psi = c.family("psi", "Psi")?;
            let ord = c.order(psi.modules.len())?;
            let result = construct_q(&psi.modules, &ord, c.cap, cfg)?;
            let mut sections = vec![Section::Family {
                title: "Psi".into(),
                members: summaries(&psi),
            }];
            let chains = |t: &strata_core::systems::ConstructionTrace| -> Vec<ChainJson> {
                t.chains
                    .iter()
                    .map(|ch| ChainJson {
                        index: ch.index + 1,
                        against: ch.against + 1,
                        modules: ch.modules().iter().map(|m| m.dims().to_vec()).collect(),
                        steps_non_split: ch.steps.iter().all(|s| !s.split),
                        steps_indecomposable: ch.steps.iter().all(|s| s.indecomposable),
                    })
                    .collect()
            };
            let outcome = match result {
                Construction::Constructed {
                    q,
                    sequences,
                    trace,
                    closure,
                } => {
                    let cl = SystemJson::of(&closure);
                    let outcome = if cl.verdict == Outcome::Passed {
                        Outcome::Constructed
                    } else {
                        cl.verdict
                    };
                    sections.push(Section::Construction {
                        outcome,
                        detail: "every obstruction vanished".into(),
                        q: plain(&q),
                        sequences: sequences.iter().map(SequenceJson::of).collect(),
                        trace: chains(&trace),
                        closure: Some(cl),
                    });
                    outcome
                }
                Construction::CapExceeded { index, against, trace } => {
                    sections.push(Section::Construction {
                        outcome: Outcome::CapExceeded,
                        detail: format!(
                            "the chain for index {} against Psi({}) reached {} modules with a nonzero extension group",
                            index + 1,
                            against + 1,
                            c.cap
                        ),
                        q: Vec::new(),
                        sequences: Vec::new(),
                        trace: chains(&trace),
                        closure: None,
                    });
                    Outcome::CapExceeded
                }
                Construction::Decomposable { index, module, trace } => {
                    sections.push(Section::Construction {
                        outcome: Outcome::Failed,
                        detail: format!(
                            "an intermediate module {} for index {} is decomposable",
                            module.dims_string(),
                            index + 1
                        ),
                        q: Vec::new(),
                        sequences: Vec::new(),
                        trace: chains(&trace),
                        closure: None,
                    });
                    Outcome::Failed
                }
                Construction::Undecided { index, trace } => {
                    sections.push(Section::Construction {
                        outcome: Outcome::Undecided,
                        detail: format!("indecomposability undecided for index {}", index + 1),
                        q: Vec::new(),
                        sequences: Vec::new(),
                        trace: chains(&trace),
                        closure: None,
                    });
                    Outcome::Undecided
                }
                Construction::NotPreCostratifying(v) => {
                    sections.push(Section::Message {
                        text: "Psi is not a proper pre-costratifying system".into(),
                    });
                    sections.push(Section::System(SystemJson::of(&v)));
                    verdict_outcome(&v)
                }
            };
            Ok((sections, outcome))
        }
        Command::StratModules => match c.inst.family("q") {
            Some(q) => {
                let ord = c.order(q.modules.len())?;
                let ctx = EndoContext::new(&q.modules, cfg)?;
                let rev = ord.reversed();
                Ok((
                    vec![
                        gamma_section(&ctx),
                        stratified_section("Gamma^op", ctx.gamma_op(), &rev)?,
                        stratified_section("Gamma", ctx.gamma(), &rev)?,
                    ],
                    Outcome::Passed,
                ))
            }
            None => {
                let ord = c.order(c.inst.algebra.vertices())?;
                Ok((vec![stratified_section("Lambda", &c.inst.algebra, &ord)?], Outcome::Passed))
            }
        },
        Command::CheckSs => match c.inst.family("q") {
            Some(q) => {
                let ord = c.order(q.modules.len())?;
                let ctx = EndoContext::new(&q.modules, cfg)?;
                let (s, o) = stratification_section("Gamma^op", ctx.gamma_op(), &ord.reversed(), cfg)?;
                Ok((vec![gamma_section(&ctx), s], o))
            }
            None => {
                let ord = c.order(c.inst.algebra.vertices())?;
                let (s, o) = stratification_section("Lambda", &c.inst.algebra, &ord, cfg)?;
                Ok((vec![s], o))
            }
        },
        Command::EssFromPcs => {
            let psi = c.family("psi", "Psi")?;
            let q = c.family("q", "Q")?;
            let ord = c.order(psi.modules.len())?;
            let r = ess_existence_check(&psi.modules, &q.modules, &ord, cfg)?;
            let (s, o) = existence_section("an Ext-injective stratifying system (Theta, Q) exists", &r);
            Ok((vec![s], o))
        }
        Command::PcsFromEss => {
            let q = c.family("q", "Q")?;
            let ord = c.order(q.modules.len())?;
            let mut sections = Vec::new();
            let mut outcome = Outcome::Passed;
            if let Some(theta) = c.inst.family("theta") {
                let v = verify_ess(&theta.modules, &q.modules, &ord, cfg)?;
                outcome = verdict_outcome(&v);
                sections.push(Section::Message {
                    text: "hypothesis: (Theta, Q) is an Ext-injective stratifying system".into(),
                });
                sections.push(Section::System(SystemJson::of(&v)));
            }
            let r = pcs_existence_check(&q.modules, &ord, cfg)?;
            let (s, o) = existence_section("a proper costratifying system (Psi, Q) exists", &r);
            sections.push(s);
            Ok((sections, outcome.combine(o)))
        }
        Command::CharTilting => {
            let q = c.family("q", "Q")?;
            let ord = c.order(q.modules.len())?;
            let ctx = EndoContext::new(&q.modules, cfg)?;
            let t = is_characteristic_tilting(&ctx, &ord, cfg)?;
            let (answer, outcome) = match t.answer() {
                Answer::Yes => ("yes", Outcome::Passed),
                Answer::No => ("no", Outcome::Failed),
                Answer::Undecided => ("undecided", Outcome::Undecided),
            };
            Ok((
                vec![
                    gamma_section(&ctx),
                    Section::Tilting {
                        answer: answer.into(),
                        precondition: CheckJson::of(&t.precondition),
                        conjuncts: t.conjuncts.iter().map(CheckJson::of).collect(),
                        summands: plain(&t.summands),
                    },
                ],
                outcome,
            ))
        }
        Command::ExtensionLadder => {
            let psi = c.family("psi", "Psi")?;
            let base = &psi.modules[0];
            let mut x = base.clone();
            let mut rows = Vec::new();
            let mut outcome = Outcome::Passed;
            for i in 1..=4 {
                let e = ext1(&x, base)?;
                let label = format!("Ext1(X{i}, Psi(1))");
                if e.is_zero() {
                    rows.push(ExtRow {
                        label,
                        dim: 0,
                        middle: None,
                        non_split: None,
                    });
                    outcome = Outcome::Failed;
                    break;
                }
                let ses = e.realize_class(0);
                let non_split = !ses.is_split()?;
                let middle = ses.middle().clone();
                rows.push(ExtRow {
                    label,
                    dim: e.dim(),
                    middle: Some(ModuleSummary::of(&middle, None)),
                    non_split: Some(non_split),
                });
                if !non_split {
                    outcome = Outcome::Failed;
                }
                x = middle;
            }
            Ok((
                vec![Section::Extensions {
                    title: "extensions of each middle term by Psi(1), starting from X1 = Psi(1)".into(),
                    rows,
                }],
                outcome,
            ))
        }
    }
}

fn config_echo(c: &Ctx<'_>) -> ConfigEcho {
    let t = c
        .inst
        .family("psi")
        .or_else(|| c.inst.family("q"))
        .or_else(|| c.inst.family("theta"))
        .map(|f| f.modules.len())
        .unwrap_or_else(|| c.inst.algebra.vertices());
    let order = match &c.order {
        Some(o) => o.clone(),
        None => c.inst.order(t).sequence().iter().map(|i| i + 1).collect(),
    };
    ConfigEcho {
        field: c.inst.field.to_string(),
        budget: c.cfg.budget,
        cap: c.cap,
        seed: c.cfg.seed,
        order,
    }
}

fn context<'a>(inst: &'a Instance, opts: &Options) -> Ctx<'a> {
    let conf = &inst.file.config;
    Ctx {
        inst,
        cfg: SearchConfig {
            budget: opts.budget.or(conf.budget).unwrap_or(DEFAULT_BUDGET),
            seed: opts.seed.or(conf.seed).unwrap_or(0),
        },
        cap: opts.cap.or(conf.cap).unwrap_or(DEFAULT_CAP),
        order: opts.order.clone(),
    }
}

fn run_steps(title: String, label: &str, inst: &Instance, steps: &[Command], opts: &Options) -> Result<Report, RunError> {
    let start = Instant::now();
    let c = context(inst, opts);
    let mut sections = Vec::new();
    let mut outcome = Outcome::Passed;
    for (k, &s) in steps.iter().enumerate() {
        if steps.len() > 1 {
            sections.push(Section::Message {
                text: format!("step {}: {}", k + 1, s.name()),
            });
        }
        let (secs, o) = step(s, &c)?;
        sections.extend(secs);
        outcome = outcome.combine(o);
    }
    Ok(Report {
        command: title,
        instance: label.into(),
        config: config_echo(&c),
        outcome,
        sections,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

pub fn run_command(cmd: Command, inst: &Instance, label: &str, opts: &Options) -> Result<Report, RunError> {
    run_steps(cmd.name().into(), label, inst, &[cmd], opts)
}

/// Replay a bundled instance through its scripted steps.
pub fn run_example(name: &str, opts: &Options) -> Result<Report, RunError> {
    let ex = bundled::example(name).ok_or_else(|| RunError::UnknownExample(name.into()))?;
    let inst = parse_instance(ex.text, opts.field)?;
    run_steps(format!("example {name}"), &format!("bundled:{name}"), &inst, ex.steps, opts)
}

pub fn exit_code(r: &Result<Report, RunError>) -> i32 {
    match r {
        Ok(rep) => rep.outcome.exit_code(),
        Err(_) => 3,
    }
}
