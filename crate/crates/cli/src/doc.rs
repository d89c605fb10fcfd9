//! The versioned JSON document format and its conversion to library types.
//!
//! Every document is an object with `kind` and `version` next to the
//! kind's own fields; unknown fields are rejected. Points are referred to by
//! id everywhere, rationals are strings (`"3/2"`), distances may be `"inf"`.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use coarsekit_core::colimit::{validate_system, FilteredSystem, PieceSpec};
use coarsekit_core::maps::{GroundedMap, MetricTarget};
use coarsekit_core::scaled_space::validate_space;
use coarsekit_core::{Bound, Distance, Family, Level, PointSet, Rational, ScaledSpace, Subset};

pub const VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum DocError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error in `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("invalid {what}: {message}")]
    Invalid { what: &'static str, message: String },
}

impl DocError {
    pub fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        DocError::Schema {
            field: field.into(),
            message: message.into(),
        }
    }

    fn from_json(e: serde_json::Error) -> Self {
        if e.is_syntax() || e.is_eof() {
            DocError::Syntax {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            }
        } else {
            DocError::Schema {
                field: "document".into(),
                message: e.to_string(),
            }
        }
    }
}

pub type Members = Vec<Vec<String>>;

/// A level certificate: `{"level": k}` in a space, `{"piece": name,
/// "level": k}` in a system. Levels are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelRef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub piece: Option<String>,
    pub level: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub kind: String,
    pub version: String,
    pub points: Vec<String>,
    pub scales: Vec<Members>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceDoc {
    pub name: String,
    pub carrier: Vec<String>,
    pub scales: Vec<Members>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDoc {
    pub kind: String,
    pub version: String,
    pub ambient: Vec<String>,
    pub pieces: Vec<PieceDoc>,
    /// `[r, s, t]` by piece name; synthesized by containment when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<[String; 3]>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub kind: String,
    pub version: String,
    pub domain: Vec<String>,
    pub codomain: Vec<String>,
    /// `[x, f(x)]` pairs.
    pub table: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricDoc {
    pub kind: String,
    pub version: String,
    pub points: Vec<String>,
    pub dist: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDoc {
    pub kind: String,
    pub version: String,
    pub members: Members,
}

/// The input family a witness quantifies over: a level reference or an
/// explicit family, at most one of them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct InputRef<'a> {
    pub level_in: Option<&'a LevelRef>,
    pub input: Option<&'a Members>,
}

macro_rules! input_ref {
    ($($t:ty),*) => {$(
        impl $t {
            pub fn on(&self) -> InputRef<'_> {
                InputRef {
                    level_in: self.level_in.as_ref(),
                    input: self.input.as_ref(),
                }
            }
        }
    )*};
}

input_ref!(
    AsdimDoc,
    ExactnessDoc,
    PinchDoc,
    AmenabilityDoc,
    PropertyADoc,
    OscillationDoc
);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsdimDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level_in: Option<LevelRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<Members>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub coarsening: Members,
    pub bound: LevelRef,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactnessDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level_in: Option<LevelRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<Members>,
    pub eps: String,
    /// One row per function, one entry per point in point order.
    pub functions: Vec<Vec<String>>,
    pub support_bound: LevelRef,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PinchDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level_in: Option<LevelRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<Members>,
    pub dim: usize,
    pub embedding: Vec<Vec<String>>,
    pub sep: Members,
    pub sep_bound: LevelRef,
    pub c: String,
    pub eps: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmenabilityDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level_in: Option<LevelRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<Members>,
    pub v: Members,
    pub v_bound: LevelRef,
    pub eps: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropertyADoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level_in: Option<LevelRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<Members>,
    pub n_cap: usize,
    /// `A_x` for each point in point order, as `[id, k]` pairs.
    pub sets: Vec<Vec<(String, usize)>>,
    pub support: Members,
    pub support_bound: LevelRef,
    pub eps: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApcDoc {
    /// Piece whose chain (extended by singletons) gives the prefix on a system.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub along: Option<String>,
    pub families: Vec<Members>,
    pub bounds: Vec<LevelRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSet {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub piece: Option<String>,
    pub families: Vec<Members>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetrizabilityDoc {
    pub sets: Vec<GeneratorSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillationDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level_in: Option<LevelRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<Members>,
    pub eps: String,
    pub b: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Asdim(AsdimDoc),
    Exactness(ExactnessDoc),
    Pinch(PinchDoc),
    Amenability(AmenabilityDoc),
    PropertyA(PropertyADoc),
    Apc(ApcDoc),
    Metrizability(MetrizabilityDoc),
    SlowlyOscillating(OscillationDoc),
}

pub const INVARIANTS: [&str; 8] = [
    "asdim",
    "exactness",
    "pinch",
    "amenability",
    "property-a",
    "apc",
    "metrizability",
    "so",
];

impl Witness {
    pub fn invariant(&self) -> &'static str {
        match self {
            Witness::Asdim(_) => "asdim",
            Witness::Exactness(_) => "exactness",
            Witness::Pinch(_) => "pinch",
            Witness::Amenability(_) => "amenability",
            Witness::PropertyA(_) => "property-a",
            Witness::Apc(_) => "apc",
            Witness::Metrizability(_) => "metrizability",
            Witness::SlowlyOscillating(_) => "so",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Verified,
    Refuted,
    UndecidedAtTruncation,
}

impl Verdict {
    pub fn exit_code(self) -> u8 {
        match self {
            Verdict::Verified => 0,
            Verdict::Refuted => 1,
            Verdict::UndecidedAtTruncation => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClauseDoc {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDigest {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub tool_version: String,
    pub inputs: Vec<InputDigest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDoc {
    pub kind: String,
    pub version: String,
    pub command: String,
    pub verdict: Verdict,
    pub clauses: Vec<ClauseDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<serde_json::Value>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Space(SpaceDoc),
    System(SystemDoc),
    Map(MapDoc),
    Metric(MetricDoc),
    Family(FamilyDoc),
    Witness(Witness),
    Report(ReportDoc),
}

impl Document {
    pub fn kind(&self) -> String {
        match self {
            Document::Space(_) => "space".into(),
            Document::System(_) => "system".into(),
            Document::Map(_) => "map".into(),
            Document::Metric(_) => "metric".into(),
            Document::Family(_) => "family".into(),
            Document::Witness(w) => format!("witness:{}", w.invariant()),
            Document::Report(_) => "report".into(),
        }
    }
}

#[derive(Deserialize)]
struct Header {
    kind: String,
    version: String,
}

fn strict<T: DeserializeOwned>(text: &str) -> Result<T, DocError> {
    serde_json::from_str(text).map_err(schema_error)
}

fn schema_error(e: serde_json::Error) -> DocError {
    match DocError::from_json(e) {
        DocError::Schema { message, .. } => DocError::schema(
            field_of(&message).unwrap_or_else(|| "document".into()),
            message,
        ),
        other => other,
    }
}

/// Witness bodies are read without their header fields.
fn body<T: DeserializeOwned>(text: &str) -> Result<T, DocError> {
    let mut v: serde_json::Value = serde_json::from_str(text).map_err(DocError::from_json)?;
    let obj = v.as_object_mut().expect("header parsed as an object");
    obj.shift_remove("kind");
    obj.shift_remove("version");
    serde_json::from_value(v).map_err(schema_error)
}

/// The backticked field name serde puts into unknown/missing field errors.
fn field_of(message: &str) -> Option<String> {
    let start = message.find('`')? + 1;
    let len = message[start..].find('`')?;
    Some(message[start..start + len].to_string())
}

/// Strict parse of a document of any kind.
pub fn parse_document(text: &str) -> Result<Document, DocError> {
    let header: Header = strict(text)?;
    if header.version != VERSION {
        return Err(DocError::schema(
            "version",
            format!(
                "unsupported version `{}`, expected `{VERSION}`",
                header.version
            ),
        ));
    }
    match header.kind.as_str() {
        "space" => strict(text).map(Document::Space),
        "system" => strict(text).map(Document::System),
        "map" => strict(text).map(Document::Map),
        "metric" => strict(text).map(Document::Metric),
        "family" => strict(text).map(Document::Family),
        "report" => strict(text).map(Document::Report),
        "witness:asdim" => body(text).map(|b| Document::Witness(Witness::Asdim(b))),
        "witness:exactness" => body(text).map(|b| Document::Witness(Witness::Exactness(b))),
        "witness:pinch" => body(text).map(|b| Document::Witness(Witness::Pinch(b))),
        "witness:amenability" => body(text).map(|b| Document::Witness(Witness::Amenability(b))),
        "witness:property-a" => body(text).map(|b| Document::Witness(Witness::PropertyA(b))),
        "witness:apc" => body(text).map(|b| Document::Witness(Witness::Apc(b))),
        "witness:metrizability" => body(text).map(|b| Document::Witness(Witness::Metrizability(b))),
        "witness:so" => body(text).map(|b| Document::Witness(Witness::SlowlyOscillating(b))),
        other => Err(DocError::schema(
            "kind",
            format!("unknown document kind `{other}`"),
        )),
    }
}

fn tagged<T: Serialize>(kind: String, body: &T) -> serde_json::Value {
    let mut out = serde_json::Map::new();
    out.insert("kind".into(), kind.into());
    out.insert("version".into(), VERSION.into());
    match serde_json::to_value(body).expect("documents serialize") {
        serde_json::Value::Object(fields) => out.extend(fields),
        _ => unreachable!("witness bodies are structs"),
    }
    serde_json::Value::Object(out)
}

pub fn to_value(doc: &Document) -> serde_json::Value {
    let kind = doc.kind();
    let v = match doc {
        Document::Space(d) => serde_json::to_value(d),
        Document::System(d) => serde_json::to_value(d),
        Document::Map(d) => serde_json::to_value(d),
        Document::Metric(d) => serde_json::to_value(d),
        Document::Family(d) => serde_json::to_value(d),
        Document::Report(d) => serde_json::to_value(d),
        Document::Witness(w) => {
            return match w {
                Witness::Asdim(b) => tagged(kind, b),
                Witness::Exactness(b) => tagged(kind, b),
                Witness::Pinch(b) => tagged(kind, b),
                Witness::Amenability(b) => tagged(kind, b),
                Witness::PropertyA(b) => tagged(kind, b),
                Witness::Apc(b) => tagged(kind, b),
                Witness::Metrizability(b) => tagged(kind, b),
                Witness::SlowlyOscillating(b) => tagged(kind, b),
            }
        }
    };
    v.expect("documents serialize")
}

pub fn emit_document(doc: &Document) -> String {
    let mut s = serde_json::to_string_pretty(&to_value(doc)).expect("documents serialize");
    s.push('\n');
    s
}

// ---- scalars ----

pub fn parse_rational(field: &str, s: &str) -> Result<Rational, DocError> {
    s.trim()
        .parse::<Rational>()
        .map_err(|_| DocError::schema(field, format!("`{s}` is not a rational number")))
}

pub fn rational_string(r: Rational) -> String {
    r.to_string()
}

pub fn parse_distance(field: &str, s: &str) -> Result<Distance, DocError> {
    match s.trim() {
        "inf" | "infinity" => Ok(Distance::Infinite),
        other => parse_rational(field, other).map(Distance::Finite),
    }
}

pub fn distance_string(d: Distance) -> String {
    match d {
        Distance::Finite(r) => rational_string(r),
        Distance::Infinite => "inf".into(),
    }
}

// ---- families ----

fn point(points: &PointSet, field: &str, id: &str) -> Result<usize, DocError> {
    points
        .index_of(id)
        .ok_or_else(|| DocError::schema(field, format!("unknown point `{id}`")))
}

pub fn subset_from_ids(points: &PointSet, field: &str, ids: &[String]) -> Result<Subset, DocError> {
    let idx = ids
        .iter()
        .map(|id| point(points, field, id))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Subset::from_indices(points.len(), idx))
}

pub fn family_from_ids(
    points: &PointSet,
    field: &str,
    members: &Members,
) -> Result<Family, DocError> {
    let members = members
        .iter()
        .map(|m| subset_from_ids(points, field, m))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Family::from_members(points.len(), members).expect("members share the point set"))
}

pub fn ids_of_subset(points: &PointSet, s: &Subset) -> Vec<String> {
    s.iter().map(|p| points.id(p).to_string()).collect()
}

pub fn ids_of_family(points: &PointSet, f: &Family) -> Members {
    f.iter().map(|m| ids_of_subset(points, m)).collect()
}

fn point_set(field: &str, ids: &[String]) -> Result<PointSet, DocError> {
    PointSet::new(ids.iter().cloned()).map_err(|e| DocError::schema(field, e.to_string()))
}

// ---- spaces and systems ----

impl SpaceDoc {
    pub fn from_space(space: &ScaledSpace) -> Self {
        SpaceDoc {
            kind: "space".into(),
            version: VERSION.into(),
            points: space.points().ids().to_vec(),
            scales: space
                .levels()
                .iter()
                .map(|l| ids_of_family(space.points(), l.family()))
                .collect(),
        }
    }

    pub fn build(&self) -> Result<ScaledSpace, DocError> {
        let points = point_set("points", &self.points)?;
        let chain = self
            .scales
            .iter()
            .enumerate()
            .map(|(i, s)| family_from_ids(&points, &format!("scales[{i}]"), s))
            .collect::<Result<Vec<_>, _>>()?;
        validate_space(points, chain).map_err(|e| DocError::Invalid {
            what: "space",
            message: e.to_string(),
        })
    }
}

impl SystemDoc {
    pub fn from_system(sys: &FilteredSystem, notes: Vec<String>) -> Self {
        let name = |s: usize| sys.piece(s).name().to_string();
        SystemDoc {
            kind: "system".into(),
            version: VERSION.into(),
            ambient: sys.ambient().ids().to_vec(),
            pieces: sys
                .pieces()
                .iter()
                .map(|p| PieceDoc {
                    name: p.name().to_string(),
                    carrier: ids_of_subset(sys.ambient(), p.carrier()),
                    scales: p
                        .space()
                        .levels()
                        .iter()
                        .map(|l| ids_of_family(p.space().points(), l.family()))
                        .collect(),
                })
                .collect(),
            upper: (!sys.upper_was_synthesized()).then(|| {
                sys.upper_triples()
                    .into_iter()
                    .filter(|(r, s, _)| r < s)
                    .map(|(r, s, t)| [name(r), name(s), name(t)])
                    .collect()
            }),
            notes,
        }
    }

    pub fn build(&self) -> Result<FilteredSystem, DocError> {
        let ambient = point_set("ambient", &self.ambient)?;
        let mut specs = Vec::new();
        for (k, p) in self.pieces.iter().enumerate() {
            let field = format!("pieces[{k}]");
            let carrier = subset_from_ids(&ambient, &format!("{field}.carrier"), &p.carrier)?;
            let points = ambient.sub(&carrier).expect("carrier over the ambient set");
            let chain = p
                .scales
                .iter()
                .enumerate()
                .map(|(i, s)| family_from_ids(&points, &format!("{field}.scales[{i}]"), s))
                .collect::<Result<Vec<_>, _>>()?;
            let space = validate_space(points, chain).map_err(|e| DocError::Invalid {
                what: "system",
                message: format!("piece `{}`: {e}", p.name),
            })?;
            specs.push(PieceSpec {
                name: p.name.clone(),
                carrier,
                space,
            });
        }
        let index = |name: &str| {
            self.pieces
                .iter()
                .position(|p| p.name == name)
                .ok_or_else(|| DocError::schema("upper", format!("unknown piece `{name}`")))
        };
        let upper = match &self.upper {
            None => None,
            Some(triples) => Some(
                triples
                    .iter()
                    .map(|[r, s, t]| Ok((index(r)?, index(s)?, index(t)?)))
                    .collect::<Result<Vec<_>, DocError>>()?,
            ),
        };
        validate_system(ambient, specs, upper).map_err(|e| DocError::Invalid {
            what: "system",
            message: e.to_string(),
        })
    }
}

impl MapDoc {
    pub fn from_map(f: &GroundedMap) -> Self {
        MapDoc {
            kind: "map".into(),
            version: VERSION.into(),
            domain: f.domain().ids().to_vec(),
            codomain: f.codomain().ids().to_vec(),
            table: (0..f.domain().len())
                .map(|x| {
                    [
                        f.domain().id(x).to_string(),
                        f.codomain().id(f.apply(x)).to_string(),
                    ]
                })
                .collect(),
        }
    }

    pub fn build(&self) -> Result<GroundedMap, DocError> {
        let domain = point_set("domain", &self.domain)?;
        let codomain = point_set("codomain", &self.codomain)?;
        let mut table = vec![None; domain.len()];
        for [x, y] in &self.table {
            let i = point(&domain, "table", x)?;
            if table[i].replace(point(&codomain, "table", y)?).is_some() {
                return Err(DocError::schema("table", format!("`{x}` is mapped twice")));
            }
        }
        let table = table
            .into_iter()
            .enumerate()
            .map(|(i, y)| {
                y.ok_or_else(|| {
                    DocError::schema("table", format!("`{}` has no image", domain.id(i)))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        GroundedMap::new(domain, codomain, table).map_err(|e| DocError::Invalid {
            what: "map",
            message: e.to_string(),
        })
    }
}

impl MetricDoc {
    pub fn from_metric(m: &MetricTarget) -> Self {
        MetricDoc {
            kind: "metric".into(),
            version: VERSION.into(),
            points: m.points().ids().to_vec(),
            dist: m
                .rows()
                .iter()
                .map(|row| row.iter().map(|&d| distance_string(d)).collect())
                .collect(),
        }
    }

    pub fn build(&self) -> Result<MetricTarget, DocError> {
        let points = point_set("points", &self.points)?;
        let dist = self
            .dist
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .map(|d| parse_distance(&format!("dist[{i}]"), d))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        MetricTarget::new(points, dist).map_err(|e| DocError::Invalid {
            what: "metric",
            message: e.to_string(),
        })
    }
}

impl FamilyDoc {
    pub fn new(points: &PointSet, f: &Family) -> Self {
        FamilyDoc {
            kind: "family".into(),
            version: VERSION.into(),
            members: ids_of_family(points, f),
        }
    }
}

/// Either a scaled space or a filtered system: the things invariants are
/// checked on.
pub enum Target {
    Space(ScaledSpace),
    System(FilteredSystem),
}

impl Target {
    pub fn points(&self) -> &PointSet {
        match self {
            Target::Space(s) => s.points(),
            Target::System(s) => s.ambient(),
        }
    }

    pub fn structure(&self) -> &dyn coarsekit_core::LargeScale {
        match self {
            Target::Space(s) => s,
            Target::System(s) => s,
        }
    }

    pub fn level_ref(&self, field: &str, r: &LevelRef) -> Result<Bound, DocError> {
        let level = Level::new(r.level)
            .ok_or_else(|| DocError::schema(field, "levels are numbered from 1"))?;
        match (self, &r.piece) {
            (Target::Space(s), None) => {
                if r.level > s.depth() {
                    return Err(DocError::schema(
                        field,
                        format!("level {} beyond depth {}", r.level, s.depth()),
                    ));
                }
                Ok(Bound::Level(level))
            }
            (Target::System(sys), Some(name)) => {
                let piece = sys
                    .piece_by_name(name)
                    .ok_or_else(|| DocError::schema(field, format!("unknown piece `{name}`")))?;
                if r.level > sys.piece(piece).space().depth() {
                    return Err(DocError::schema(
                        field,
                        format!("level {} beyond the depth of `{name}`", r.level),
                    ));
                }
                Ok(Bound::Piece { piece, level })
            }
            (Target::Space(_), Some(_)) => {
                Err(DocError::schema(field, "a space certificate has no piece"))
            }
            (Target::System(_), None) => Err(DocError::schema(
                field,
                "a system certificate names its piece",
            )),
        }
    }

    /// The family a level reference denotes: a chain level of a space, or a
    /// piece level extended by singletons in a system.
    pub fn level_family(&self, field: &str, r: &LevelRef) -> Result<Family, DocError> {
        Ok(match (self.level_ref(field, r)?, self) {
            (Bound::Level(l), Target::Space(s)) => s.levels()[l.index()].family().clone(),
            (Bound::Piece { piece, level }, Target::System(sys)) => sys.extend_from_piece(
                piece,
                sys.piece(piece).space().levels()[level.index()].family(),
            ),
            _ => unreachable!("level_ref matches the target"),
        })
    }

    pub fn bound_ref(&self, b: &Bound) -> LevelRef {
        match (*b, self) {
            (Bound::Level(l), _) => LevelRef {
                piece: None,
                level: l.get(),
            },
            (Bound::Piece { piece, level }, Target::System(sys)) => LevelRef {
                piece: Some(sys.piece(piece).name().to_string()),
                level: level.get(),
            },
            (Bound::Piece { level, .. }, Target::Space(_)) => LevelRef {
                piece: None,
                level: level.get(),
            },
        }
    }

    /// The input family of a witness, defaulting to the first level.
    pub fn input(&self, on: InputRef<'_>) -> Result<(Family, Option<String>), DocError> {
        match (on.level_in, on.input) {
            (Some(_), Some(_)) => Err(DocError::schema(
                "input",
                "give either `level_in` or `input`, not both",
            )),
            (Some(r), None) => Ok((self.level_family("level_in", r)?, None)),
            (None, Some(m)) => Ok((family_from_ids(self.points(), "input", m)?, None)),
            (None, None) => match self {
                Target::Space(_) => Ok((
                    self.level_family(
                        "level_in",
                        &LevelRef {
                            piece: None,
                            level: 1,
                        },
                    )?,
                    Some("no input given: using level 1".into()),
                )),
                Target::System(_) => Err(DocError::schema(
                    "level_in",
                    "a system input needs `level_in` or `input`",
                )),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn family_doc() -> Document {
        Document::Family(FamilyDoc {
            kind: "family".into(),
            version: VERSION.into(),
            members: vec![vec!["a".into(), "b".into()], vec![]],
        })
    }

    #[test]
    fn minimal_space_parses() {
        let d =
            parse_document(r#"{"kind":"space","version":"1","points":["a"],"scales":[[["a"]]]}"#)
                .unwrap();
        let Document::Space(s) = d else { panic!() };
        assert_eq!(s.build().unwrap().len(), 1);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let e = parse_document(r#"{"kind":"family","version":"1","members":[],"extra":1}"#)
            .unwrap_err();
        assert!(
            matches!(e, DocError::Schema { ref field, .. } if field == "extra"),
            "{e}"
        );
        let e = parse_document(
            r#"{"kind":"witness:asdim","version":"1","coarsening":[],"bound":{"level":1},"x":0}"#,
        )
        .unwrap_err();
        assert!(matches!(e, DocError::Schema { .. }), "{e}");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse_document("{\n  \"kind\": \"space\",\n  oops }").unwrap_err();
        assert!(matches!(e, DocError::Syntax { line: 3, .. }), "{e}");
    }

    #[test]
    fn version_and_kind_are_checked() {
        assert!(
            parse_document(r#"{"kind":"space","version":"2","points":[],"scales":[]}"#).is_err()
        );
        assert!(parse_document(r#"{"kind":"nope","version":"1"}"#).is_err());
    }

    #[test]
    fn non_covering_scale_names_the_point() {
        let d = parse_document(
            r#"{"kind":"space","version":"1","points":["a","b"],"scales":[[["a"]]]}"#,
        )
        .unwrap();
        let Document::Space(s) = d else { panic!() };
        let e = s.build().unwrap_err().to_string();
        assert!(e.contains('b'), "{e}");
    }

    #[test]
    fn duplicate_points_are_rejected() {
        let d = parse_document(r#"{"kind":"space","version":"1","points":["a","a"],"scales":[]}"#)
            .unwrap();
        let Document::Space(s) = d else { panic!() };
        assert!(matches!(s.build(), Err(DocError::Schema { .. })));
    }

    #[test]
    fn family_round_trip() {
        let d = family_doc();
        assert_eq!(parse_document(&emit_document(&d)).unwrap(), d);
    }

    #[test]
    fn witness_round_trip() {
        let w = Document::Witness(Witness::Asdim(AsdimDoc {
            level_in: Some(LevelRef {
                piece: None,
                level: 1,
            }),
            input: None,
            n: Some(1),
            coarsening: vec![vec!["a".into()]],
            bound: LevelRef {
                piece: Some("X".into()),
                level: 2,
            },
        }));
        let text = emit_document(&w);
        assert!(text.contains("\"kind\": \"witness:asdim\""));
        assert_eq!(parse_document(&text).unwrap(), w);
    }

    #[test]
    fn rationals_and_distances() {
        assert_eq!(parse_rational("eps", "3/6").unwrap(), Rational::new(1, 2));
        assert_eq!(rational_string(Rational::new(4, 2)), "2");
        assert_eq!(parse_distance("d", "inf").unwrap(), Distance::Infinite);
        assert!(parse_rational("eps", "x").is_err());
    }
}
