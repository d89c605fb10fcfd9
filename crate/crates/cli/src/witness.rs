//! Witness documents to and from the library's witness types, relative to
//! the space or system they are read against.

use coarsekit_core::invariants::{
    AmenabilityWitness, ApcWitness, AsdimWitness, Marked, PartitionOfUnity, PinchWitness,
    PropertyAFamily,
};
use coarsekit_core::{Family, PointSet, Rational};

use crate::doc::{
    family_from_ids, ids_of_family, parse_rational, rational_string, AmenabilityDoc, ApcDoc,
    AsdimDoc, DocError, ExactnessDoc, LevelRef, Members, PinchDoc, PropertyADoc, Target,
};

fn rows(
    field: &str,
    rows: &[Vec<String>],
    width: usize,
    what: &str,
) -> Result<Vec<Vec<Rational>>, DocError> {
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            if row.len() != width {
                return Err(DocError::schema(
                    field,
                    format!(
                        "row {i} has {} entries, expected {width} ({what})",
                        row.len()
                    ),
                ));
            }
            row.iter().map(|s| parse_rational(field, s)).collect()
        })
        .collect()
}

fn rational_rows(rows: &[Vec<Rational>]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| r.iter().map(|&q| rational_string(q)).collect())
        .collect()
}

/// Where a witness sits: its input reference, carried through unchanged.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Placement {
    pub level_in: Option<LevelRef>,
    pub input: Option<Members>,
}

pub fn asdim_from(t: &Target, d: &AsdimDoc) -> Result<AsdimWitness, DocError> {
    Ok(AsdimWitness {
        coarsening: family_from_ids(t.points(), "coarsening", &d.coarsening)?,
        bound: t.level_ref("bound", &d.bound)?,
    })
}

pub fn asdim_to(t: &Target, at: Placement, n: usize, w: &AsdimWitness) -> AsdimDoc {
    AsdimDoc {
        level_in: at.level_in,
        input: at.input,
        n: Some(n),
        coarsening: ids_of_family(t.points(), &w.coarsening),
        bound: t.bound_ref(&w.bound),
    }
}

pub struct Exactness {
    pub eps: Rational,
    pub pou: PartitionOfUnity,
    pub support_bound: coarsekit_core::Bound,
}

pub fn exactness_from(t: &Target, d: &ExactnessDoc) -> Result<Exactness, DocError> {
    Ok(Exactness {
        eps: parse_rational("eps", &d.eps)?,
        pou: PartitionOfUnity {
            functions: rows("functions", &d.functions, t.points().len(), "one per point")?,
        },
        support_bound: t.level_ref("support_bound", &d.support_bound)?,
    })
}

pub fn exactness_to(t: &Target, at: Placement, w: &Exactness) -> ExactnessDoc {
    ExactnessDoc {
        level_in: at.level_in,
        input: at.input,
        eps: rational_string(w.eps),
        functions: rational_rows(&w.pou.functions),
        support_bound: t.bound_ref(&w.support_bound),
    }
}

pub fn pinch_from(t: &Target, d: &PinchDoc) -> Result<PinchWitness, DocError> {
    if d.embedding.len() != t.points().len() {
        return Err(DocError::schema(
            "embedding",
            format!(
                "{} vectors for {} points",
                d.embedding.len(),
                t.points().len()
            ),
        ));
    }
    Ok(PinchWitness {
        dim: d.dim,
        embedding: rows("embedding", &d.embedding, d.dim, "one per coordinate")?,
        sep: family_from_ids(t.points(), "sep", &d.sep)?,
        sep_bound: t.level_ref("sep_bound", &d.sep_bound)?,
        c: parse_rational("c", &d.c)?,
        eps: parse_rational("eps", &d.eps)?,
    })
}

pub fn pinch_to(t: &Target, at: Placement, w: &PinchWitness) -> PinchDoc {
    PinchDoc {
        level_in: at.level_in,
        input: at.input,
        dim: w.dim,
        embedding: rational_rows(&w.embedding),
        sep: ids_of_family(t.points(), &w.sep),
        sep_bound: t.bound_ref(&w.sep_bound),
        c: rational_string(w.c),
        eps: rational_string(w.eps),
    }
}

pub fn amenability_from(t: &Target, d: &AmenabilityDoc) -> Result<AmenabilityWitness, DocError> {
    Ok(AmenabilityWitness {
        v: family_from_ids(t.points(), "v", &d.v)?,
        v_bound: t.level_ref("v_bound", &d.v_bound)?,
        eps: parse_rational("eps", &d.eps)?,
    })
}

pub fn amenability_to(t: &Target, at: Placement, w: &AmenabilityWitness) -> AmenabilityDoc {
    AmenabilityDoc {
        level_in: at.level_in,
        input: at.input,
        v: ids_of_family(t.points(), &w.v),
        v_bound: t.bound_ref(&w.v_bound),
        eps: rational_string(w.eps),
    }
}

fn marked(points: &PointSet, x: usize, pairs: &[(String, usize)]) -> Result<Marked, DocError> {
    pairs
        .iter()
        .map(|(id, k)| {
            points
                .index_of(id)
                .map(|p| (p, *k))
                .ok_or_else(|| DocError::schema("sets", format!("set {x}: unknown point `{id}`")))
        })
        .collect()
}

pub fn property_a_from(t: &Target, d: &PropertyADoc) -> Result<PropertyAFamily, DocError> {
    let points = t.points();
    if d.sets.len() != points.len() {
        return Err(DocError::schema(
            "sets",
            format!("{} sets for {} points", d.sets.len(), points.len()),
        ));
    }
    Ok(PropertyAFamily {
        n_cap: d.n_cap,
        sets: d
            .sets
            .iter()
            .enumerate()
            .map(|(x, s)| marked(points, x, s))
            .collect::<Result<_, _>>()?,
        support: family_from_ids(points, "support", &d.support)?,
        support_bound: t.level_ref("support_bound", &d.support_bound)?,
        eps: parse_rational("eps", &d.eps)?,
    })
}

pub fn property_a_to(t: &Target, at: Placement, w: &PropertyAFamily) -> PropertyADoc {
    let points = t.points();
    PropertyADoc {
        level_in: at.level_in,
        input: at.input,
        n_cap: w.n_cap,
        sets: w
            .sets
            .iter()
            .map(|s| {
                s.iter()
                    .map(|&(p, k)| (points.id(p).to_string(), k))
                    .collect()
            })
            .collect(),
        support: ids_of_family(points, &w.support),
        support_bound: t.bound_ref(&w.support_bound),
        eps: rational_string(w.eps),
    }
}

/// The witness and the prefix it is checked against: the first levels of a
/// space, or of the `along` piece extended by singletons in a system.
pub fn apc_from(t: &Target, d: &ApcDoc) -> Result<(ApcWitness, Vec<Family>), DocError> {
    let families = d
        .families
        .iter()
        .enumerate()
        .map(|(i, f)| family_from_ids(t.points(), &format!("families[{i}]"), f))
        .collect::<Result<Vec<_>, _>>()?;
    let bounds = d
        .bounds
        .iter()
        .enumerate()
        .map(|(i, b)| t.level_ref(&format!("bounds[{i}]"), b))
        .collect::<Result<Vec<_>, _>>()?;
    let k = families.len();
    let prefix = match (t, &d.along) {
        (Target::Space(s), None) => {
            if k > s.depth() {
                return Err(DocError::schema(
                    "families",
                    format!("{k} families for depth {}", s.depth()),
                ));
            }
            s.chain().into_iter().take(k).collect()
        }
        (Target::System(sys), Some(name)) => {
            let p = sys
                .piece_by_name(name)
                .ok_or_else(|| DocError::schema("along", format!("unknown piece `{name}`")))?;
            let chain = sys.piece(p).space().chain();
            if k > chain.len() {
                return Err(DocError::schema(
                    "families",
                    format!("{k} families for the depth of `{name}`"),
                ));
            }
            chain
                .iter()
                .take(k)
                .map(|f| sys.extend_from_piece(p, f))
                .collect()
        }
        (Target::Space(_), Some(_)) => {
            return Err(DocError::schema("along", "a space has no pieces"))
        }
        (Target::System(_), None) => {
            return Err(DocError::schema(
                "along",
                "a system witness names the piece it follows",
            ))
        }
    };
    Ok((ApcWitness { families, bounds }, prefix))
}

pub fn apc_to(t: &Target, along: Option<String>, w: &ApcWitness) -> ApcDoc {
    ApcDoc {
        along,
        families: w
            .families
            .iter()
            .map(|f| ids_of_family(t.points(), f))
            .collect(),
        bounds: w.bounds.iter().map(|b| t.bound_ref(b)).collect(),
    }
}
