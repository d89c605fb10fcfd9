//! Countable generating sets closed under `B1 ∪ B2 ∪ st(B1, B2)` up to
//! refinement, and their merge across the pieces of a colimit.

use alloc::vec::Vec;

use thiserror::Error;

use crate::colimit::FilteredSystem;
use crate::families::Family;

/// For each ordered pair `(i, j)`, the least `k` with
/// `B_i ∪ B_j ∪ st(B_i, B_j) ≺ B_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorReport {
    pub pairs: Vec<(usize, usize, Option<usize>)>,
}

impl GeneratorReport {
    pub fn passes(&self) -> bool {
        self.pairs.iter().all(|p| p.2.is_some())
    }

    pub fn first_failure(&self) -> Option<(usize, usize)> {
        self.pairs
            .iter()
            .find(|p| p.2.is_none())
            .map(|p| (p.0, p.1))
    }
}

/// `B1 ∪ B2 ∪ st(B1, B2)`.
pub fn closure_pair(b1: &Family, b2: &Family) -> Family {
    let mut out = b1.clone();
    out.extend_from(b2);
    out.extend_from(&b2.star_each(b1));
    out
}

pub fn metrizability_generator_check(families: &[Family]) -> GeneratorReport {
    let mut pairs = Vec::new();
    for (i, b1) in families.iter().enumerate() {
        for (j, b2) in families.iter().enumerate() {
            let c = closure_pair(b1, b2);
            let k = families.iter().position(|b3| c.refines(b3));
            pairs.push((i, j, k));
        }
    }
    GeneratorReport { pairs }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MergeError {
    #[error("piece index {0} out of range")]
    NoSuchPiece(usize),
    #[error("family {index} of piece {piece} is not over that piece")]
    Shape { piece: usize, index: usize },
    #[error("the generating set of piece {piece} fails on its own pair ({i}, {j})")]
    PieceFails { piece: usize, i: usize, j: usize },
    #[error(
        "undecided at truncation: merged pair ({a}, {b}) has no coarsening among the generators of piece {t}"
    )]
    Truncation { a: usize, b: usize, t: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeReport {
    /// The per-piece generators, trivially extended to the ambient set.
    pub families: Vec<Family>,
    /// `(piece, index within that piece's set)` for each merged family.
    pub origin: Vec<(usize, usize)>,
    /// `(a, b, t, k)`: pair `(a, b)` coarsened by family `k`, from piece `t`.
    pub routes: Vec<(usize, usize, usize, usize)>,
    pub check: GeneratorReport,
}

/// Unions the per-piece generating sets and routes each pair through
/// `t = upper(r, s)`, looking for the coarsening among `t`'s generators.
pub fn metrizability_merge(
    sys: &FilteredSystem,
    sets: &[(usize, Vec<Family>)],
) -> Result<MergeReport, MergeError> {
    let n = sys.ambient().len();
    let mut families = Vec::new();
    let mut origin = Vec::new();
    for (piece, set) in sets {
        let piece = *piece;
        if piece >= sys.pieces().len() {
            return Err(MergeError::NoSuchPiece(piece));
        }
        let local_len = sys.piece(piece).space().len();
        if let Some(index) = set.iter().position(|f| f.universe() != local_len) {
            return Err(MergeError::Shape { piece, index });
        }
        if let Some((i, j)) = metrizability_generator_check(set).first_failure() {
            return Err(MergeError::PieceFails { piece, i, j });
        }
        let inc = sys.piece(piece).inclusion();
        for (k, f) in set.iter().enumerate() {
            families.push(inc.lift_family(f).trivially_extended());
            origin.push((piece, k));
        }
    }
    debug_assert!(families.iter().all(|f| f.universe() == n));
    let mut routes = Vec::new();
    for a in 0..families.len() {
        for b in 0..families.len() {
            let t = sys.upper(origin[a].0, origin[b].0);
            let c = closure_pair(&families[a], &families[b]);
            let k = (0..families.len())
                .find(|&k| origin[k].0 == t && c.refines(&families[k]))
                .ok_or(MergeError::Truncation { a, b, t })?;
            routes.push((a, b, t, k));
        }
    }
    let check = metrizability_generator_check(&families);
    Ok(MergeReport {
        families,
        origin,
        routes,
        check,
    })
}
