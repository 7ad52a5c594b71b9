//! Reports and their two renderings.
//!
//! The structured rendering is JSON with the schema below; every index is
//! 1-based and every dimension vector is listed by vertex.
//!
//! ```text
//! { "command": str, "instance": str,
//!   "config": { "field": str, "budget": int, "cap": int, "seed": int, "order": [int] },
//!   "outcome": "passed" | "failed" | "undecided" | "constructed" | "cap-exceeded",
//!   "sections": [ { "kind": ..., ... } ],
//!   "elapsed_ms": int }
//! ```
//!
//! `elapsed_ms` is the only field that varies between identical runs.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use strata_core::filtration::FiltrationCertificate;
use strata_core::homology::ShortExactSequence;
use strata_core::module::{Module, Morphism};
use strata_core::systems::{AxiomStatus, CertifiedSequence, SystemVerdict, Witness};
use strata_core::transfer::{Check, CheckStatus};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Passed,
    Constructed,
    Failed,
    Undecided,
    CapExceeded,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Passed | Outcome::Constructed => 0,
            Outcome::Failed => 1,
            Outcome::Undecided | Outcome::CapExceeded => 2,
        }
    }

    /// Combine outcomes of several steps: undecided dominates failure.
    pub fn combine(self, other: Outcome) -> Outcome {
        let rank = |o: Outcome| match o {
            Outcome::Passed | Outcome::Constructed => 0,
            Outcome::Failed => 1,
            Outcome::Undecided | Outcome::CapExceeded => 2,
        };
        if rank(other) > rank(self) {
            other
        } else {
            self
        }
    }

    fn label(self) -> &'static str {
        match self {
            Outcome::Passed => "passed",
            Outcome::Constructed => "constructed",
            Outcome::Failed => "failed",
            Outcome::Undecided => "undecided",
            Outcome::CapExceeded => "cap exceeded",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub field: String,
    pub budget: u64,
    pub cap: usize,
    pub seed: u64,
    pub order: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleSummary {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub name: Option<String>,
    pub dims: Vec<usize>,
    /// Dimension vectors of the radical layers, top first.
    pub loewy: Vec<Vec<usize>>,
}

impl ModuleSummary {
    pub fn of(m: &Module, name: Option<&str>) -> ModuleSummary {
        ModuleSummary {
            name: name.map(str::to_string),
            dims: m.dims().to_vec(),
            loewy: m.loewy_layers(),
        }
    }

    fn human(&self) -> String {
        let layers: Vec<String> = self.loewy.iter().map(|l| dims_text(l)).collect();
        let name = self.name.as_ref().map(|n| format!("{n} ")).unwrap_or_default();
        format!("{name}{} layers {}", dims_text(&self.dims), layers.join(" / "))
    }
}

fn dims_text(d: &[usize]) -> String {
    format!("({})", d.iter().map(usize::to_string).collect::<Vec<_>>().join(","))
}

/// A morphism as one row-major matrix of strings per vertex.
pub type MapJson = Vec<Vec<Vec<String>>>;

pub fn map_json(f: &Morphism) -> MapJson {
    f.mats()
        .iter()
        .map(|m| (0..m.rows()).map(|r| m.row(r).iter().map(|s| s.to_string()).collect()).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum WitnessJson {
    Hom { from: usize, to: usize, map: MapJson },
    Ext { from: usize, to: usize, middle: ModuleSummary },
    NotDivisionRing { index: usize, radical_element: MapJson },
    Decomposable { index: usize, idempotent: MapJson },
    MissingSequence { index: usize, reason: String },
    ZeroModule { index: usize },
}

impl WitnessJson {
    pub fn of(w: &Witness) -> WitnessJson {
        match w {
            Witness::Hom { from, to, map } => WitnessJson::Hom {
                from: from + 1,
                to: to + 1,
                map: map_json(map),
            },
            Witness::Ext { from, to, sequence } => WitnessJson::Ext {
                from: from + 1,
                to: to + 1,
                middle: ModuleSummary::of(sequence.middle(), None),
            },
            Witness::NotDivisionRing { index, radical_element } => WitnessJson::NotDivisionRing {
                index: index + 1,
                radical_element: map_json(radical_element),
            },
            Witness::Decomposable { index, idempotent } => WitnessJson::Decomposable {
                index: index + 1,
                idempotent: map_json(idempotent),
            },
            Witness::MissingSequence { index, reason } => WitnessJson::MissingSequence {
                index: index + 1,
                reason: reason.clone(),
            },
            Witness::ZeroModule { index } => WitnessJson::ZeroModule { index: index + 1 },
        }
    }

    fn human(&self) -> String {
        match self {
            WitnessJson::Hom { from, to, .. } => format!("nonzero morphism from member {from} to member {to}"),
            WitnessJson::Ext { from, to, middle } => format!(
                "non-split extension of member {from} by member {to}, middle term {}",
                dims_text(&middle.dims)
            ),
            WitnessJson::NotDivisionRing { index, .. } => {
                format!("member {index} has a nonzero nilpotent endomorphism")
            }
            WitnessJson::Decomposable { index, .. } => format!("member {index} splits by an idempotent"),
            WitnessJson::MissingSequence { index, reason } => format!("index {index}: {reason}"),
            WitnessJson::ZeroModule { index } => format!("member {index} is zero"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomJson {
    pub axiom: String,
    pub statement: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<WitnessJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    /// Factor indices from the bottom of the chain to the top.
    pub factors: Vec<usize>,
    /// Dimension vectors of the chain members, bottom first.
    pub chain: Vec<Vec<usize>>,
    pub ordered: bool,
}

impl CertificateJson {
    pub fn of(c: &FiltrationCertificate) -> CertificateJson {
        CertificateJson {
            factors: c.indices().iter().map(|i| i + 1).collect(),
            chain: c.chain.iter().map(|s| s.dims()).collect(),
            ordered: c.ordered,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceJson {
    pub index: usize,
    pub left: Vec<usize>,
    pub middle: Vec<usize>,
    pub right: Vec<usize>,
    pub certificate: CertificateJson,
}

impl SequenceJson {
    pub fn of(s: &CertifiedSequence) -> SequenceJson {
        let ses: &ShortExactSequence = &s.sequence;
        SequenceJson {
            index: s.index + 1,
            left: ses.left().dims().to_vec(),
            middle: ses.middle().dims().to_vec(),
            right: ses.right().dims().to_vec(),
            certificate: CertificateJson::of(&s.certificate),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemJson {
    pub system: String,
    pub verdict: Outcome,
    pub axioms: Vec<AxiomJson>,
    pub sequences: Vec<SequenceJson>,
}

pub fn verdict_outcome(v: &SystemVerdict) -> Outcome {
    match v.overall() {
        strata_core::systems::Overall::Passed => Outcome::Passed,
        strata_core::systems::Overall::Failed => Outcome::Failed,
        strata_core::systems::Overall::Undecided => Outcome::Undecided,
    }
}

impl SystemJson {
    pub fn of(v: &SystemVerdict) -> SystemJson {
        SystemJson {
            system: v.kind.name().to_string(),
            verdict: verdict_outcome(v),
            axioms: v
                .axioms
                .iter()
                .map(|a| {
                    let (status, witness, reason) = match &a.status {
                        AxiomStatus::Passed => ("passed", None, None),
                        AxiomStatus::Failed(w) => ("failed", Some(WitnessJson::of(w)), None),
                        AxiomStatus::Undecided(r) => ("undecided", None, Some(r.clone())),
                    };
                    AxiomJson {
                        axiom: a.axiom.to_string(),
                        statement: a.statement.to_string(),
                        status: status.to_string(),
                        witness,
                        reason,
                        notes: a.notes.clone(),
                    }
                })
                .collect(),
            sequences: v.sequences.iter().map(SequenceJson::of).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckJson {
    pub name: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

impl CheckJson {
    pub fn of(c: &Check) -> CheckJson {
        let (status, detail) = match &c.status {
            CheckStatus::Holds => ("holds", None),
            CheckStatus::Fails(d) => ("fails", Some(d.clone())),
            CheckStatus::Undecided(d) => ("undecided", Some(d.clone())),
        };
        CheckJson {
            name: c.name.to_string(),
            status: status.to_string(),
            detail,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainJson {
    pub index: usize,
    pub against: usize,
    /// Dimension vectors of the chain, starting module first.
    pub modules: Vec<Vec<usize>>,
    pub steps_non_split: bool,
    pub steps_indecomposable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowCount {
    pub source: usize,
    pub target: usize,
    pub arrows: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Section {
    Family {
        title: String,
        members: Vec<ModuleSummary>,
    },
    System(SystemJson),
    Construction {
        outcome: Outcome,
        detail: String,
        q: Vec<ModuleSummary>,
        sequences: Vec<SequenceJson>,
        trace: Vec<ChainJson>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        closure: Option<SystemJson>,
    },
    EndomorphismAlgebra {
        dim: usize,
        opposite_quiver: Vec<ArrowCount>,
    },
    Stratified {
        algebra: String,
        order: Vec<usize>,
        standard: Vec<ModuleSummary>,
        proper_standard: Vec<ModuleSummary>,
        proper_costandard: Vec<ModuleSummary>,
    },
    Stratification {
        algebra: String,
        order: Vec<usize>,
        verdict: Outcome,
        projectives: Vec<Option<CertificateJson>>,
    },
    Existence {
        question: String,
        answer: String,
        checks: Vec<CheckJson>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        family: Option<Vec<ModuleSummary>>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        closure: Option<SystemJson>,
    },
    Tilting {
        answer: String,
        precondition: CheckJson,
        conjuncts: Vec<CheckJson>,
        summands: Vec<ModuleSummary>,
    },
    Extensions {
        title: String,
        rows: Vec<ExtRow>,
    },
    Message {
        text: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtRow {
    pub label: String,
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub middle: Option<ModuleSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub non_split: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub instance: String,
    pub config: ConfigEcho,
    pub outcome: Outcome,
    pub sections: Vec<Section>,
    pub elapsed_ms: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Human,
    Structured,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Format, String> {
        match s {
            "human" => Ok(Format::Human),
            "structured" => Ok(Format::Structured),
            _ => Err(format!("unknown format `{s}` (expected human or structured)")),
        }
    }
}

pub fn emit_report(r: &Report, format: Format) -> String {
    match format {
        Format::Structured => serde_json::to_string_pretty(r).expect("reports serialize") + "\n",
        Format::Human => human(r),
    }
}

/// Drop the timing so two reports can be compared byte for byte.
pub fn without_timing(r: &Report) -> Report {
    Report {
        elapsed_ms: 0,
        ..r.clone()
    }
}

fn list(out: &mut String, indent: &str, members: &[ModuleSummary]) {
    for (k, m) in members.iter().enumerate() {
        let _ = writeln!(out, "{indent}{}: {}", k + 1, m.human());
    }
}

fn system(out: &mut String, s: &SystemJson) {
    let _ = writeln!(out, "  system {}: {}", s.system, s.verdict.label());
    for a in &s.axioms {
        let _ = writeln!(out, "    ({}) {} ... {}", a.axiom, a.statement, a.status);
        if let Some(w) = &a.witness {
            let _ = writeln!(out, "        witness: {}", w.human());
        }
        if let Some(r) = &a.reason {
            let _ = writeln!(out, "        reason: {r}");
        }
        for n in &a.notes {
            let _ = writeln!(out, "        note: {n}");
        }
    }
    for q in &s.sequences {
        let _ = writeln!(
            out,
            "    sequence {}: 0 -> {} -> {} -> {} -> 0, filtration factors {:?}",
            q.index,
            dims_text(&q.left),
            dims_text(&q.middle),
            dims_text(&q.right),
            q.certificate.factors
        );
    }
}

fn checks(out: &mut String, cs: &[CheckJson]) {
    for c in cs {
        match &c.detail {
            Some(d) => {
                let _ = writeln!(out, "    {} ... {} ({d})", c.name, c.status);
            }
            None => {
                let _ = writeln!(out, "    {} ... {}", c.name, c.status);
            }
        }
    }
}

fn human(r: &Report) -> String {
    let mut out = String::new();
    let c = &r.config;
    let _ = writeln!(out, "command: {}", r.command);
    let _ = writeln!(out, "instance: {}", r.instance);
    let _ = writeln!(
        out,
        "config: field {} budget {} cap {} seed {} order {:?}",
        c.field, c.budget, c.cap, c.seed, c.order
    );
    for s in &r.sections {
        match s {
            Section::Family { title, members } => {
                let _ = writeln!(out, "{title}:");
                list(&mut out, "  ", members);
            }
            Section::System(sys) => system(&mut out, sys),
            Section::Construction {
                outcome,
                detail,
                q,
                sequences,
                trace,
                closure,
            } => {
                let _ = writeln!(out, "  construction: {} ({detail})", outcome.label());
                for ch in trace {
                    let dims: Vec<String> = ch.modules.iter().map(|d| dims_text(d)).collect();
                    let _ = writeln!(
                        out,
                        "    chain for index {} against {}: {}",
                        ch.index,
                        ch.against,
                        dims.join(" -> ")
                    );
                }
                if !q.is_empty() {
                    let _ = writeln!(out, "    Q:");
                    list(&mut out, "      ", q);
                }
                for sq in sequences {
                    let _ = writeln!(
                        out,
                        "    kernel of Q({}) -> Psi({}): {}, filtration factors {:?}",
                        sq.index,
                        sq.index,
                        dims_text(&sq.left),
                        sq.certificate.factors
                    );
                }
                if let Some(cl) = closure {
                    let _ = writeln!(out, "    closure check:");
                    system(&mut out, cl);
                }
            }
            Section::EndomorphismAlgebra { dim, opposite_quiver } => {
                let arrows: Vec<String> = opposite_quiver
                    .iter()
                    .map(|a| {
                        if a.arrows == 1 {
                            format!("{}->{}", a.source, a.target)
                        } else {
                            format!("{}->{} (x{})", a.source, a.target, a.arrows)
                        }
                    })
                    .collect();
                let _ = writeln!(out, "  endomorphism algebra: dim {dim}, opposite quiver arrows {}", arrows.join(", "));
            }
            Section::Stratified {
                algebra,
                order,
                standard,
                proper_standard,
                proper_costandard,
            } => {
                let _ = writeln!(out, "  stratified families over {algebra}, order {order:?}:");
                let _ = writeln!(out, "    standard:");
                list(&mut out, "      ", standard);
                let _ = writeln!(out, "    proper standard:");
                list(&mut out, "      ", proper_standard);
                let _ = writeln!(out, "    proper costandard:");
                list(&mut out, "      ", proper_costandard);
            }
            Section::Stratification {
                algebra,
                order,
                verdict,
                projectives,
            } => {
                let _ = writeln!(out, "  standardly stratified over {algebra}, order {order:?}: {}", verdict.label());
                for (i, p) in projectives.iter().enumerate() {
                    match p {
                        Some(c) => {
                            let _ = writeln!(out, "    P({}) filtration factors {:?}", i + 1, c.factors);
                        }
                        None => {
                            let _ = writeln!(out, "    P({}) has no certificate", i + 1);
                        }
                    }
                }
            }
            Section::Existence {
                question,
                answer,
                checks: cs,
                family,
                closure,
            } => {
                let _ = writeln!(out, "  {question}: {answer}");
                checks(&mut out, cs);
                if let Some(f) = family {
                    list(&mut out, "    ", f);
                }
                if let Some(cl) = closure {
                    let _ = writeln!(out, "    closure check:");
                    system(&mut out, cl);
                }
            }
            Section::Tilting {
                answer,
                precondition,
                conjuncts,
                summands,
            } => {
                let _ = writeln!(out, "  Q is the characteristic tilting module: {answer}");
                checks(&mut out, std::slice::from_ref(precondition));
                checks(&mut out, conjuncts);
                let _ = writeln!(out, "    summands of Q:");
                list(&mut out, "      ", summands);
            }
            Section::Extensions { title, rows } => {
                let _ = writeln!(out, "  {title}:");
                for row in rows {
                    let mut line = format!("    {}: dim {}", row.label, row.dim);
                    if let Some(m) = &row.middle {
                        let _ = write!(line, ", middle term {}", m.human());
                    }
                    if let Some(ns) = row.non_split {
                        let _ = write!(line, ", {}", if ns { "non-split" } else { "split" });
                    }
                    let _ = writeln!(out, "{line}");
                }
            }
            Section::Message { text } => {
                let _ = writeln!(out, "  {text}");
            }
        }
    }
    let _ = writeln!(out, "outcome: {}", r.outcome.label());
    let _ = writeln!(out, "elapsed: {} ms", r.elapsed_ms);
    out
}
