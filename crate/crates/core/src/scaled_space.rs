//! A finite truncation of a large scale structure: a point set with a
//! refinement chain of scales `U_1 ≺ U_2 ≺ … ≺ U_k`.
//!
//! A family is bounded within the truncation when it essentially refines some
//! level of the chain. Absence of such a level means "not bounded within this
//! truncation", never a proof of unboundedness.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Deref;

use thiserror::Error;

use crate::families::{Family, FamilyError, Inclusion, PointSet, Subset};
use crate::structure::{self, Bound, LargeScale};

/// 1-based position in a scale chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Level(usize);

impl Level {
    pub const FIRST: Level = Level(1);

    pub fn new(one_based: usize) -> Option<Level> {
        (one_based >= 1).then_some(Level(one_based))
    }

    pub fn from_index(zero_based: usize) -> Level {
        Level(zero_based + 1)
    }

    pub fn get(self) -> usize {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 - 1
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "level {}", self.0)
    }
}

/// A family covering its whole universe.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scale(Family);

impl Scale {
    pub fn new(family: Family) -> Result<Scale, Family> {
        if family.is_scale() {
            Ok(Scale(family))
        } else {
            Err(family)
        }
    }

    pub fn family(&self) -> &Family {
        &self.0
    }

    pub fn into_family(self) -> Family {
        self.0
    }
}

impl Deref for Scale {
    type Target = Family;

    fn deref(&self) -> &Family {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("a scale chain needs at least one level")]
    EmptyChain,
    #[error("{level}: {source}")]
    Universe {
        level: Level,
        #[source]
        source: FamilyError,
    },
    #[error("{level} does not cover point `{point}`")]
    NotCovering { level: Level, point: String },
    #[error(
        "{lower} does not refine {upper}: member {member} fits in no member of the next level"
    )]
    NotMonotone {
        lower: Level,
        upper: Level,
        member: usize,
    },
    #[error("cannot restrict to an empty carrier")]
    EmptyCarrier,
    #[error("point sets differ")]
    PointSetMismatch,
    #[error(transparent)]
    Family(#[from] FamilyError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledSpace {
    points: PointSet,
    levels: Vec<Scale>,
    /// `star_table[i][j]`: least level essentially coarsening `st(U_i, U_j)`.
    star_table: Vec<Vec<Option<Level>>>,
    star_depth: usize,
}

/// Checks coverage and monotonicity and certifies the star depth.
pub fn validate_space(points: PointSet, chain: Vec<Family>) -> Result<ScaledSpace, SpaceError> {
    if chain.is_empty() {
        return Err(SpaceError::EmptyChain);
    }
    let n = points.len();
    let mut levels = Vec::with_capacity(chain.len());
    for (i, family) in chain.into_iter().enumerate() {
        let level = Level::from_index(i);
        if family.universe() != n {
            return Err(SpaceError::Universe {
                level,
                source: FamilyError::UniverseMismatch {
                    left: family.universe(),
                    right: n,
                },
            });
        }
        match Scale::new(family) {
            Ok(scale) => levels.push(scale),
            Err(family) => {
                let p = family
                    .uncovered_point()
                    .expect("non-scale has an uncovered point");
                return Err(SpaceError::NotCovering {
                    level,
                    point: points.id(p).into(),
                });
            }
        }
    }
    for i in 1..levels.len() {
        if let Some(member) = levels[i - 1]
            .iter()
            .position(|m| levels[i].member_containing(m).is_none())
        {
            return Err(SpaceError::NotMonotone {
                lower: Level::from_index(i - 1),
                upper: Level::from_index(i),
                member,
            });
        }
    }
    let k = levels.len();
    let star_table: Vec<Vec<Option<Level>>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let star = levels[j].star_each(&levels[i]);
                    least_level(&levels, &star)
                })
                .collect()
        })
        .collect();
    let star_depth = (1..=k)
        .take_while(|&d| (0..d).all(|i| (0..d).all(|j| star_table[i][j].is_some())))
        .last()
        .unwrap_or(0);
    Ok(ScaledSpace {
        points,
        levels,
        star_table,
        star_depth,
    })
}

fn least_level(levels: &[Scale], f: &Family) -> Option<Level> {
    levels
        .iter()
        .position(|l| f.essentially_refines(l))
        .map(Level::from_index)
}

impl ScaledSpace {
    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[Scale] {
        &self.levels
    }

    pub fn level(&self, level: Level) -> Option<&Scale> {
        self.levels.get(level.index())
    }

    pub fn top(&self) -> &Scale {
        self.levels.last().expect("validated chain is non-empty")
    }

    pub fn star_depth(&self) -> usize {
        self.star_depth
    }

    /// Least level coarsening `st(U_i, U_j)`, available for `i, j ≤ star_depth`.
    pub fn star_level(&self, i: Level, j: Level) -> Option<Level> {
        if i.get() > self.star_depth || j.get() > self.star_depth {
            return None;
        }
        self.star_table[i.index()][j.index()]
    }

    /// Least level `i` such that `f` essentially refines `U_i`.
    ///
    /// # Panics
    /// If `f` lives over a different universe.
    pub fn is_bounded(&self, f: &Family) -> Option<Level> {
        assert_eq!(
            f.universe(),
            self.len(),
            "family over a different point set"
        );
        least_level(&self.levels, f)
    }

    pub fn restrict(&self, carrier: &Subset) -> Result<ScaledSpace, SpaceError> {
        restrict(self, carrier)
    }

    pub fn coarse_chain_component(&self, p: usize) -> Subset {
        structure::coarse_chain_component(self, p)
    }

    pub fn weakly_bounded(&self, b: &Subset) -> bool {
        structure::weakly_bounded(self, b)
    }

    pub fn chain(&self) -> Vec<Family> {
        self.levels.iter().map(|l| l.family().clone()).collect()
    }
}

impl LargeScale for ScaledSpace {
    fn points(&self) -> &PointSet {
        &self.points
    }

    fn generators(&self) -> Vec<(Bound, &Family)> {
        self.levels
            .iter()
            .enumerate()
            .map(|(i, l)| (Bound::Level(Level::from_index(i)), l.family()))
            .collect()
    }

    fn bounded(&self, f: &Family) -> Option<Bound> {
        self.is_bounded(f).map(Bound::Level)
    }

    fn check_bound(&self, f: &Family, bound: &Bound) -> bool {
        match bound {
            Bound::Level(level) => self
                .level(*level)
                .is_some_and(|l| f.universe() == self.len() && f.essentially_refines(l)),
            Bound::Piece { .. } => false,
        }
    }
}

/// Intersects every level with `carrier` and re-validates over the carrier.
pub fn restrict(space: &ScaledSpace, carrier: &Subset) -> Result<ScaledSpace, SpaceError> {
    if carrier.universe() != space.len() {
        return Err(FamilyError::UniverseMismatch {
            left: carrier.universe(),
            right: space.len(),
        }
        .into());
    }
    if carrier.is_empty() {
        return Err(SpaceError::EmptyCarrier);
    }
    let inclusion = Inclusion::new(carrier.clone());
    let points = space.points.sub(carrier)?;
    let chain = space
        .levels
        .iter()
        .map(|l| inclusion.restrict_family(l))
        .collect();
    validate_space(points, chain)
}

/// Which side of a coincidence check failed, and where.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CofinalityGap {
    /// `false`: a level of the first space fits in no level of the second.
    pub second_side: bool,
    pub level: Level,
}

/// First level of either chain that fits in no level of the other.
pub fn cofinality_gap(
    a: &ScaledSpace,
    b: &ScaledSpace,
) -> Result<Option<CofinalityGap>, SpaceError> {
    if a.points.ids() != b.points.ids() {
        return Err(SpaceError::PointSetMismatch);
    }
    let gap = |x: &ScaledSpace, y: &ScaledSpace| {
        x.levels
            .iter()
            .position(|l| y.is_bounded(l).is_none())
            .map(Level::from_index)
    };
    if let Some(level) = gap(a, b) {
        return Ok(Some(CofinalityGap {
            second_side: false,
            level,
        }));
    }
    Ok(gap(b, a).map(|level| CofinalityGap {
        second_side: true,
        level,
    }))
}

/// Mutual cofinality: each level of one chain essentially refines a level of
/// the other.
pub fn chains_coincide(a: &ScaledSpace, b: &ScaledSpace) -> Result<bool, SpaceError> {
    Ok(cofinality_gap(a, b)?.is_none())
}
