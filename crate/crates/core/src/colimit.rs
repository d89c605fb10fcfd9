//! Asymptotic filtered colimits of finitely many truncated pieces.
//!
//! A family over the ambient set is bounded in the colimit when, after
//! discarding the singletons lying outside some piece `X_s`, it is bounded in
//! that piece. Directedness is supplied as data: `upper(r, s) = t` names a
//! piece whose carrier contains both `X_r` and `X_s`.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::families::{Family, FamilyError, Inclusion, PointSet, Subset};
use crate::scaled_space::{self, Level, ScaledSpace, SpaceError};
use crate::structure::{Bound, LargeScale};

/// A piece as supplied to [`validate_system`]: a carrier in the ambient set
/// and a space over exactly the carrier's points (in ambient order).
#[derive(Debug, Clone)]
pub struct PieceSpec {
    pub name: String,
    pub carrier: Subset,
    pub space: ScaledSpace,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    name: String,
    inclusion: Inclusion,
    space: ScaledSpace,
    /// The levels of `space`, re-indexed into the ambient set.
    lifted: Vec<Family>,
}

impl Piece {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn carrier(&self) -> &Subset {
        self.inclusion.carrier()
    }

    pub fn inclusion(&self) -> &Inclusion {
        &self.inclusion
    }

    pub fn space(&self) -> &ScaledSpace {
        &self.space
    }

    /// Level `i` of the piece as a family over the ambient set.
    pub fn lifted_level(&self, level: Level) -> Option<&Family> {
        self.lifted.get(level.index())
    }

    pub fn lifted_levels(&self) -> &[Family] {
        &self.lifted
    }
}

/// Certificate: after stripping stray singletons, the family is bounded in
/// `piece` at `level`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColimitBoundedness {
    pub piece: usize,
    pub level: Level,
}

impl From<ColimitBoundedness> for Bound {
    fn from(c: ColimitBoundedness) -> Bound {
        Bound::Piece {
            piece: c.piece,
            level: c.level,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("a filtered system needs at least one piece")]
    NoPieces,
    #[error("piece `{piece}`: {reason}")]
    BadPiece { piece: String, reason: String },
    #[error("point `{0}` lies in no piece")]
    Uncovered(String),
    #[error("no upper bound piece for pieces {r} and {s}")]
    Directedness { r: usize, s: usize },
    #[error("upper({r}, {s}) = {t} but piece {t} does not contain both carriers")]
    UpperNotContaining { r: usize, s: usize, t: usize },
    #[error(
        "pieces {r} and {s} do not coincide on their intersection: \
         level {} of piece {from} restricted there is {family} and fits in no level of the other",
        level.get()
    )]
    Coincidence {
        r: usize,
        s: usize,
        from: usize,
        level: Level,
        family: String,
    },
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColimitError {
    #[error("the {0} family is not bounded in the colimit within this truncation")]
    Unbounded(&'static str),
    #[error("undecided at truncation: piece {piece} cannot bound the star (needs levels {needs:?}, star depth {star_depth})")]
    Truncation {
        piece: usize,
        needs: (Option<Level>, Option<Level>),
        star_depth: usize,
    },
    #[error(transparent)]
    Family(#[from] FamilyError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredSystem {
    ambient: PointSet,
    pieces: Vec<Piece>,
    upper: BTreeMap<(usize, usize), usize>,
    upper_synthesized: bool,
}

/// Least-index piece whose carrier contains both `r` and `s`.
fn containing_piece(pieces: &[Piece], r: usize, s: usize) -> Option<usize> {
    let union = pieces[r].carrier().union(pieces[s].carrier());
    pieces.iter().position(|p| union.is_subset(p.carrier()))
}

/// Checks coverage, directedness and pairwise coincidence. When `upper` is
/// `None` it is synthesized by carrier containment.
pub fn validate_system(
    ambient: PointSet,
    specs: Vec<PieceSpec>,
    upper: Option<Vec<(usize, usize, usize)>>,
) -> Result<FilteredSystem, SystemError> {
    if specs.is_empty() {
        return Err(SystemError::NoPieces);
    }
    let n = ambient.len();
    let mut pieces = Vec::with_capacity(specs.len());
    for spec in specs {
        let bad = |reason: &str| SystemError::BadPiece {
            piece: spec.name.clone(),
            reason: reason.into(),
        };
        if spec.carrier.universe() != n {
            return Err(bad("carrier lives over a different ambient set"));
        }
        if spec.carrier.is_empty() {
            return Err(bad("carrier is empty"));
        }
        let expected: Vec<&str> = spec.carrier.iter().map(|p| ambient.id(p)).collect();
        let actual: Vec<&str> = spec
            .space
            .points()
            .ids()
            .iter()
            .map(String::as_str)
            .collect();
        if expected != actual {
            return Err(bad(
                "space points differ from the carrier (in ambient order)",
            ));
        }
        let inclusion = Inclusion::new(spec.carrier);
        let lifted = spec
            .space
            .levels()
            .iter()
            .map(|l| inclusion.lift_family(l))
            .collect();
        pieces.push(Piece {
            name: spec.name,
            inclusion,
            space: spec.space,
            lifted,
        });
    }

    let mut covered = Subset::empty(n);
    for p in &pieces {
        covered.union_with(p.carrier());
    }
    if let Some(p) = covered.complement().first() {
        return Err(SystemError::Uncovered(ambient.id(p).into()));
    }

    let k = pieces.len();
    let synthesized = upper.is_none();
    let mut map = BTreeMap::new();
    match upper {
        Some(triples) => {
            for (r, s, t) in triples {
                if r >= k || s >= k || t >= k {
                    return Err(SystemError::Directedness { r, s });
                }
                map.entry((r.min(s), r.max(s))).or_insert(t);
            }
            for r in 0..k {
                map.entry((r, r)).or_insert(r);
            }
        }
        None => {
            for r in 0..k {
                for s in r..k {
                    if let Some(t) = containing_piece(&pieces, r, s) {
                        map.insert((r, s), t);
                    }
                }
            }
        }
    }
    for r in 0..k {
        for s in r..k {
            let t = *map.get(&(r, s)).ok_or(SystemError::Directedness { r, s })?;
            let union = pieces[r].carrier().union(pieces[s].carrier());
            if !union.is_subset(pieces[t].carrier()) {
                return Err(SystemError::UpperNotContaining { r, s, t });
            }
        }
    }

    for r in 0..k {
        for s in (r + 1)..k {
            let meet = pieces[r].carrier().intersection(pieces[s].carrier());
            if meet.is_empty() {
                continue;
            }
            let on = |i: usize| -> Result<ScaledSpace, SystemError> {
                let local = pieces[i].inclusion.restrict_subset(&meet);
                Ok(pieces[i].space.restrict(&local)?)
            };
            let a = on(r)?;
            let b = on(s)?;
            if let Some(gap) = scaled_space::cofinality_gap(&a, &b)? {
                let (from, space) = if gap.second_side { (s, &b) } else { (r, &a) };
                let family = space
                    .level(gap.level)
                    .expect("gap level exists")
                    .display(space.points())
                    .to_string();
                return Err(SystemError::Coincidence {
                    r,
                    s,
                    from,
                    level: gap.level,
                    family,
                });
            }
        }
    }

    Ok(FilteredSystem {
        ambient,
        pieces,
        upper: map,
        upper_synthesized: synthesized,
    })
}

/// `f` without its singleton members outside `carrier` (the `𝒰*` of a piece).
pub fn strip(f: &Family, carrier: &Subset) -> Family {
    let members = f
        .iter()
        .filter(|m| !(m.is_singleton() && !m.is_subset(carrier)))
        .cloned()
        .collect();
    Family::from_members(f.universe(), members).expect("same universe")
}

impl FilteredSystem {
    pub fn ambient(&self) -> &PointSet {
        &self.ambient
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn piece(&self, s: usize) -> &Piece {
        &self.pieces[s]
    }

    pub fn piece_by_name(&self, name: &str) -> Option<usize> {
        self.pieces.iter().position(|p| p.name == name)
    }

    pub fn upper(&self, r: usize, s: usize) -> usize {
        self.upper[&(r.min(s), r.max(s))]
    }

    /// All `(r, s, t)` with `r ≤ s`.
    pub fn upper_triples(&self) -> Vec<(usize, usize, usize)> {
        self.upper.iter().map(|(&(r, s), &t)| (r, s, t)).collect()
    }

    pub fn upper_was_synthesized(&self) -> bool {
        self.upper_synthesized
    }

    /// Bound of `f` inside piece `s`, if its thick members lie in `X_s`.
    pub fn bounded_in_piece(&self, f: &Family, s: usize) -> Option<Level> {
        let piece = &self.pieces[s];
        if !f.thick_members().all(|m| m.is_subset(piece.carrier())) {
            return None;
        }
        let stripped = strip(f, piece.carrier());
        piece
            .space
            .is_bounded(&piece.inclusion.restrict_family(&stripped))
    }

    pub fn colimit_bounded(&self, f: &Family) -> Option<ColimitBoundedness> {
        colimit_bounded(self, f)
    }

    /// A piece's family, trivially extended to the ambient set: bounded in
    /// the colimit by that piece.
    pub fn extend_from_piece(&self, s: usize, f: &Family) -> Family {
        let piece = &self.pieces[s];
        let mut out = piece.inclusion.lift_family(f);
        for p in piece.inclusion.outside() {
            out.push(Subset::singleton(self.ambient.len(), p));
        }
        out
    }
}

pub fn colimit_bounded(sys: &FilteredSystem, f: &Family) -> Option<ColimitBoundedness> {
    assert_eq!(
        f.universe(),
        sys.ambient.len(),
        "family over a different point set"
    );
    (0..sys.pieces.len()).find_map(|s| {
        sys.bounded_in_piece(f, s)
            .map(|level| ColimitBoundedness { piece: s, level })
    })
}

/// `st(f, g)` with a boundedness certificate built the constructive way:
/// strip both families to their pieces `r` and `s`, bound them in
/// `t = upper(r, s)`, and read the star's level from `t`'s star table.
pub fn colimit_star(
    sys: &FilteredSystem,
    f: &Family,
    g: &Family,
) -> Result<(Family, ColimitBoundedness), ColimitError> {
    let n = sys.ambient.len();
    for fam in [f, g] {
        if fam.universe() != n {
            return Err(FamilyError::UniverseMismatch {
                left: fam.universe(),
                right: n,
            }
            .into());
        }
    }
    let cf = colimit_bounded(sys, f).ok_or(ColimitError::Unbounded("first"))?;
    let cg = colimit_bounded(sys, g).ok_or(ColimitError::Unbounded("second"))?;
    let t = sys.upper(cf.piece, cg.piece);
    let top = &sys.pieces[t];
    let f_star = strip(f, sys.pieces[cf.piece].carrier());
    let g_star = strip(g, sys.pieces[cg.piece].carrier());
    let in_t = |fam: &Family| top.space.is_bounded(&top.inclusion.restrict_family(fam));
    let (lf, lg) = (in_t(&f_star), in_t(&g_star));
    let level = match (lf, lg) {
        (Some(a), Some(b)) => top.space.star_level(a, b),
        _ => None,
    };
    let level = level.ok_or(ColimitError::Truncation {
        piece: t,
        needs: (lf, lg),
        star_depth: top.space.star_depth(),
    })?;
    Ok((g.star_each(f), ColimitBoundedness { piece: t, level }))
}

/// The family `st(f*, g*) ∪ {singletons of g}` whose coarsening
/// certifies the star; exposed for tests of the construction.
pub fn star_witness_family(sys: &FilteredSystem, f: &Family, g: &Family) -> Option<Family> {
    let cf = colimit_bounded(sys, f)?;
    let cg = colimit_bounded(sys, g)?;
    let f_star = strip(f, sys.pieces[cf.piece].carrier());
    let g_star = strip(g, sys.pieces[cg.piece].carrier());
    let mut w = g_star.star_each(&f_star);
    for m in g.iter().filter(|m| m.is_singleton()) {
        w.push(m.clone());
    }
    Some(w)
}

impl LargeScale for FilteredSystem {
    fn points(&self) -> &PointSet {
        &self.ambient
    }

    fn generators(&self) -> Vec<(Bound, &Family)> {
        self.pieces
            .iter()
            .enumerate()
            .flat_map(|(s, p)| {
                p.lifted.iter().enumerate().map(move |(i, l)| {
                    (
                        Bound::Piece {
                            piece: s,
                            level: Level::from_index(i),
                        },
                        l,
                    )
                })
            })
            .collect()
    }

    fn bounded(&self, f: &Family) -> Option<Bound> {
        colimit_bounded(self, f).map(Bound::from)
    }

    fn check_bound(&self, f: &Family, bound: &Bound) -> bool {
        match *bound {
            Bound::Piece { piece, level } => {
                f.universe() == self.ambient.len()
                    && piece < self.pieces.len()
                    && level.get() <= self.pieces[piece].space.depth()
                    && self
                        .bounded_in_piece(f, piece)
                        .is_some_and(|least| least <= level)
            }
            Bound::Level(_) => false,
        }
    }
}
