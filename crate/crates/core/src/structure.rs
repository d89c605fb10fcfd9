//! What the verifiers need from a (truncated) large scale structure, so that
//! each of them runs unchanged on a single space and on a filtered colimit.

use alloc::vec::Vec;
use core::fmt;

use crate::families::{Family, PointSet, Subset};
use crate::scaled_space::Level;

/// Certificate that a family is uniformly bounded within the truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    /// Essentially refines this level of a space's chain.
    Level(Level),
    /// Thick members lie in the piece's carrier and essentially refine this
    /// level of the piece.
    Piece { piece: usize, level: Level },
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Level(l) => write!(f, "{l}"),
            Bound::Piece { piece, level } => write!(f, "piece {piece}, {level}"),
        }
    }
}

pub trait LargeScale {
    fn points(&self) -> &PointSet;

    fn universe(&self) -> usize {
        self.points().len()
    }

    /// The uniformly bounded families generating the truncated structure,
    /// each over the whole point set, with the certificate bounding it.
    fn generators(&self) -> Vec<(Bound, &Family)>;

    /// Some certificate for `f`, searching in a fixed deterministic order.
    fn bounded(&self, f: &Family) -> Option<Bound>;

    /// Checks an explicit certificate.
    fn check_bound(&self, f: &Family, bound: &Bound) -> bool;

    /// Largest member cardinality over the generators (bounded geometry).
    fn geometry_bound(&self) -> usize {
        self.generators()
            .iter()
            .map(|(_, g)| g.max_member_size())
            .max()
            .unwrap_or(0)
            .max(1)
    }
}

/// Union over all generators of the chain component of `p`; `{p}` when `p`
/// is isolated everywhere.
pub fn coarse_chain_component<S: LargeScale + ?Sized>(space: &S, p: usize) -> Subset {
    let mut out = Subset::singleton(space.universe(), p);
    for (_, g) in space.generators() {
        if let Some(c) = g.components().into_iter().find(|c| c.contains(p)) {
            out.union_with(&c);
        }
    }
    out
}

/// The distinct sets `coarse_chain_component(p)` over all points, ordered by
/// least point. In a truncation these need not partition the point set.
pub fn coarse_chain_components<S: LargeScale + ?Sized>(space: &S) -> Vec<Subset> {
    let mut out: Vec<Subset> = (0..space.universe())
        .map(|p| coarse_chain_component(space, p))
        .collect();
    out.sort();
    out.dedup();
    out.sort_by_key(|c| c.first());
    out
}

/// `b` meets every coarse chain component inside a single bounded set.
pub fn weakly_bounded<S: LargeScale + ?Sized>(space: &S, b: &Subset) -> bool {
    let generators = space.generators();
    coarse_chain_components(space).iter().all(|c| {
        let piece = b.intersection(c);
        !piece.is_thick()
            || generators
                .iter()
                .any(|(_, g)| g.member_containing(&piece).is_some())
    })
}
