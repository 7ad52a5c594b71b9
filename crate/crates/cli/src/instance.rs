//! Instance files.
//!
//! An instance is a TOML document. Vertices are numbered from 1. An arrow
//! `a: i -> j` acts on a module by a `dims[j] x dims[i]` matrix (column
//! vectors), stored row-major with an explicit shape. Paths are written
//! right-to-left: `"b*a"` means `a` first, then `b`. Arrows omitted from a
//! module act by zero.
//!
//! ```toml
//! field = "101"
//! relations = []
//!
//! [quiver]
//! vertices = 2
//! arrows = [{ name = "a", source = 1, target = 2 }]
//!
//! [modules.P1]
//! dims = [1, 1]
//! arrows.a = { shape = [1, 1], entries = [1] }
//!
//! [families]
//! psi = ["P1"]
//! order = [1]
//!
//! [config]
//! budget = 1000000
//! ```

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use strata_core::algebra::{Path, DEFAULT_DEGREE_BOUND};
use strata_core::filtration::LinearOrder;
use strata_core::module::Module;
use strata_core::{Algebra, Arrow, Field, Matrix, Quiver, Relation, Scalar};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("{path}: {message}")]
    Field { path: String, message: String },
}

fn field_err(path: impl Into<String>, message: impl Into<String>) -> InstanceError {
    InstanceError::Field {
        path: path.into(),
        message: message.into(),
    }
}

/// A matrix entry: an integer or a string such as `"-3/4"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Text(String),
}

impl Entry {
    fn parse(&self, field: Field) -> Result<Scalar, String> {
        match self {
            Entry::Int(v) => Ok(field.from_i64(*v)),
            Entry::Text(s) => field.parse(s).map_err(|e| e.to_string()),
        }
    }

    fn canonical(s: &Scalar) -> Entry {
        let text = s.to_string();
        match text.parse::<i64>() {
            Ok(v) => Entry::Int(v),
            Err(_) => Entry::Text(text),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowSpec {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuiverSpec {
    pub vertices: usize,
    #[serde(default)]
    pub arrows: Vec<ArrowSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub coef: Entry,
    pub path: String,
}

/// A relation: a single path, or a linear combination of paths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RelationSpec {
    Path(String),
    Combination { terms: Vec<TermSpec> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub shape: [usize; 2],
    pub entries: Vec<Entry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    pub dims: Vec<usize>,
    #[serde(default)]
    pub arrows: BTreeMap<String, MatrixSpec>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamiliesSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub field: String,
    #[serde(default)]
    pub relations: Vec<RelationSpec>,
    pub quiver: QuiverSpec,
    #[serde(default)]
    pub modules: BTreeMap<String, ModuleSpec>,
    #[serde(default)]
    pub families: FamiliesSpec,
    #[serde(default)]
    pub config: ConfigSpec,
}

/// A validated instance.
#[derive(Clone, Debug)]
pub struct Instance {
    /// The canonical form of the parsed file.
    pub file: InstanceFile,
    pub field: Field,
    pub algebra: Arc<Algebra>,
    pub modules: BTreeMap<String, Module>,
}

#[derive(Clone, Debug)]
pub struct Family {
    pub names: Vec<String>,
    pub modules: Vec<Module>,
}

impl Instance {
    pub fn family(&self, which: &str) -> Option<Family> {
        let names = match which {
            "psi" => self.file.families.psi.clone(),
            "q" => self.file.families.q.clone(),
            "theta" => self.file.families.theta.clone(),
            _ => None,
        }?;
        let modules = names.iter().map(|n| self.modules[n].clone()).collect();
        Some(Family { names, modules })
    }

    /// The order from the file, or the natural order on `t` indices.
    pub fn order(&self, t: usize) -> LinearOrder {
        match &self.file.families.order {
            Some(seq) => LinearOrder::from_sequence(seq.iter().map(|i| i - 1).collect()).expect("validated order"),
            None => LinearOrder::natural(t),
        }
    }

    /// Canonical TOML text; `parse(serialize(x))` reproduces `x`.
    pub fn serialize(&self) -> String {
        serialize(&self.file)
    }
}

pub fn serialize(file: &InstanceFile) -> String {
    toml::to_string(file).expect("instance files serialize")
}

fn parse_path(text: &str, quiver: &Quiver, at: &str) -> Result<Path, InstanceError> {
    text.split('*')
        .map(|name| {
            let name = name.trim();
            quiver
                .arrow_index(name)
                .ok_or_else(|| field_err(at, format!("unknown arrow `{name}` in path `{text}`")))
        })
        .collect()
}

fn path_text(path: &Path, quiver: &Quiver) -> String {
    path.iter()
        .map(|&a| quiver.arrows[a].name.clone())
        .collect::<Vec<_>>()
        .join("*")
}

/// Parse with the field named in the file, or `field_override` if given.
pub fn parse_instance(text: &str, field_override: Option<Field>) -> Result<Instance, InstanceError> {
    let raw: InstanceFile = toml::from_str(text).map_err(|e| InstanceError::Syntax(e.to_string()))?;
    let field = match field_override {
        Some(f) => f,
        None => raw
            .field
            .parse::<Field>()
            .map_err(|e| field_err("field", format!("`{}`: {e}", raw.field)))?,
    };

    let nv = raw.quiver.vertices;
    if nv == 0 {
        return Err(field_err("quiver.vertices", "at least one vertex is required"));
    }
    let mut arrows = Vec::new();
    for (k, a) in raw.quiver.arrows.iter().enumerate() {
        for (what, v) in [("source", a.source), ("target", a.target)] {
            if v == 0 || v > nv {
                return Err(field_err(
                    format!("quiver.arrows[{k}].{what}"),
                    format!("vertex {v} is outside 1..={nv}"),
                ));
            }
        }
        arrows.push(Arrow {
            name: a.name.clone(),
            source: a.source - 1,
            target: a.target - 1,
        });
    }
    let quiver = Quiver::new(nv, arrows).map_err(|e| field_err("quiver.arrows", e.to_string()))?;

    let mut relations = Vec::new();
    let mut canon_rel = Vec::new();
    for (k, r) in raw.relations.iter().enumerate() {
        let at = format!("relations[{k}]");
        let terms: Vec<(Scalar, Path)> = match r {
            RelationSpec::Path(p) => vec![(field.one(), parse_path(p, &quiver, &at)?)],
            RelationSpec::Combination { terms } => terms
                .iter()
                .map(|t| {
                    let c = t.coef.parse(field).map_err(|e| field_err(&at, e))?;
                    Ok((c, parse_path(&t.path, &quiver, &at)?))
                })
                .collect::<Result<_, InstanceError>>()?,
        };
        canon_rel.push(if terms.len() == 1 && terms[0].0.is_one() {
            RelationSpec::Path(path_text(&terms[0].1, &quiver))
        } else {
            RelationSpec::Combination {
                terms: terms
                    .iter()
                    .map(|(c, p)| TermSpec {
                        coef: Entry::canonical(c),
                        path: path_text(p, &quiver),
                    })
                    .collect(),
            }
        });
        relations.push(Relation { terms });
    }
    let algebra = Arc::new(
        Algebra::bound_quiver(field, quiver.clone(), relations.clone(), DEFAULT_DEGREE_BOUND)
            .map_err(|e| field_err("relations", e.to_string()))?,
    );

    let mut modules = BTreeMap::new();
    let mut canon_modules = BTreeMap::new();
    for (name, spec) in &raw.modules {
        let at = format!("modules.{name}");
        if spec.dims.len() != nv {
            return Err(field_err(
                format!("{at}.dims"),
                format!("{} entries for {nv} vertices", spec.dims.len()),
            ));
        }
        for key in spec.arrows.keys() {
            if quiver.arrow_index(key).is_none() {
                return Err(field_err(format!("{at}.arrows.{key}"), "no such arrow"));
            }
        }
        let mut mats = Vec::new();
        for a in &quiver.arrows {
            let (rows, cols) = (spec.dims[a.target], spec.dims[a.source]);
            let m = match spec.arrows.get(&a.name) {
                None => Matrix::zeros(field, rows, cols),
                Some(ms) => {
                    let mat_at = format!("{at}.arrows.{}", a.name);
                    if ms.shape != [rows, cols] {
                        return Err(field_err(
                            &mat_at,
                            format!(
                                "arrow {} -> {} needs a {rows}x{cols} matrix, found {}x{}",
                                a.source + 1,
                                a.target + 1,
                                ms.shape[0],
                                ms.shape[1]
                            ),
                        ));
                    }
                    if ms.entries.len() != rows * cols {
                        return Err(field_err(
                            &mat_at,
                            format!("{} entries for shape {rows}x{cols}", ms.entries.len()),
                        ));
                    }
                    let entries = ms
                        .entries
                        .iter()
                        .map(|e| e.parse(field))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| field_err(&mat_at, e))?;
                    Matrix::from_vec(field, rows, cols, entries).map_err(|e| field_err(&mat_at, e.to_string()))?
                }
            };
            mats.push(m);
        }
        for (k, r) in relations.iter().enumerate() {
            if !relation_vanishes(r, &quiver, &mats, &spec.dims, field) {
                let text = match &canon_rel[k] {
                    RelationSpec::Path(p) => p.clone(),
                    RelationSpec::Combination { terms } => terms
                        .iter()
                        .map(|t| format!("{:?}·{}", t.coef, t.path))
                        .collect::<Vec<_>>()
                        .join(" + "),
                };
                return Err(field_err(&at, format!("module `{name}` violates relation `{text}`")));
            }
        }
        canon_modules.insert(
            name.clone(),
            ModuleSpec {
                dims: spec.dims.clone(),
                arrows: quiver
                    .arrows
                    .iter()
                    .zip(&mats)
                    .map(|(a, m)| {
                        (
                            a.name.clone(),
                            MatrixSpec {
                                shape: [m.rows(), m.cols()],
                                entries: m.entries().iter().map(Entry::canonical).collect(),
                            },
                        )
                    })
                    .collect(),
            },
        );
        let module = Module::new(&algebra, spec.dims.clone(), mats).map_err(|e| field_err(&at, e.to_string()))?;
        modules.insert(name.clone(), module);
    }

    let fam = &raw.families;
    let mut sizes = Vec::new();
    for (key, list) in [("psi", &fam.psi), ("q", &fam.q), ("theta", &fam.theta)] {
        if let Some(list) = list {
            for n in list {
                if !modules.contains_key(n) {
                    return Err(field_err(format!("families.{key}"), format!("undefined module `{n}`")));
                }
            }
            sizes.push((key, list.len()));
        }
    }
    if let Some(&(k0, t)) = sizes.first() {
        if let Some(&(k, s)) = sizes.iter().find(|(_, s)| *s != t) {
            return Err(field_err(
                format!("families.{k}"),
                format!("has {s} members but families.{k0} has {t}"),
            ));
        }
    }
    if let Some(order) = &fam.order {
        let mut seen = order.clone();
        seen.sort_unstable();
        if seen != (1..=order.len()).collect::<Vec<_>>() {
            return Err(field_err("families.order", "must be a permutation of 1..=t"));
        }
        if let Some(&(k, t)) = sizes.first() {
            if t != order.len() {
                return Err(field_err(
                    "families.order",
                    format!("has {} entries but families.{k} has {t}", order.len()),
                ));
            }
        }
    }

    let file = InstanceFile {
        field: field.to_string(),
        relations: canon_rel,
        quiver: raw.quiver.clone(),
        modules: canon_modules,
        families: raw.families.clone(),
        config: raw.config.clone(),
    };
    Ok(Instance {
        file,
        field,
        algebra,
        modules,
    })
}

fn relation_vanishes(r: &Relation, quiver: &Quiver, mats: &[Matrix], dims: &[usize], field: Field) -> bool {
    let Some((_, first)) = r.terms.first() else {
        return true;
    };
    let src = quiver.arrows[*first.last().expect("nonempty path")].source;
    let tgt = quiver.arrows[first[0]].target;
    let mut acc = Matrix::zeros(field, dims[tgt], dims[src]);
    for (c, path) in &r.terms {
        let mut m = Matrix::identity(field, dims[src]);
        for &a in path.iter().rev() {
            m = mats[a].mul(&m);
        }
        acc = acc.add(&m.scale(c));
    }
    acc.is_zero()
}
