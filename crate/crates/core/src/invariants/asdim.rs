//! Asymptotic dimension: a bounded coarsening of multiplicity at most `n + 1`.

use alloc::format;
use alloc::vec::Vec;

use thiserror::Error;

use super::{lift_bound, piece_input, require, LiftError};
use crate::colimit::FilteredSystem;
use crate::families::{Family, Subset};
use crate::report::Verification;
use crate::structure::{Bound, LargeScale};

/// Points above which exhaustive search refuses to run.
pub const EXHAUSTIVE_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsdimWitness {
    pub coarsening: Family,
    pub bound: Bound,
}

pub fn asdim_verify<S: LargeScale + ?Sized>(
    space: &S,
    n: usize,
    input: &Family,
    w: &AsdimWitness,
) -> Verification {
    let mut v = Verification::new();
    let universe = space.universe();
    if input.universe() != universe || w.coarsening.universe() != universe {
        v.clause(
            "universe",
            false,
            "input or coarsening over a different point set",
        );
        return v;
    }
    let stray = input
        .thick_members()
        .position(|m| w.coarsening.member_containing(m).is_none());
    v.clause(
        "coarsens input",
        stray.is_none(),
        match stray {
            None => "every non-singleton input member lies in a coarsening member".into(),
            Some(i) => format!(
                "input member {} fits in no coarsening member",
                input
                    .thick_members()
                    .nth(i)
                    .unwrap()
                    .display(space.points())
            ),
        },
    );
    let m = w.coarsening.multiplicity();
    v.clause(
        "multiplicity",
        m <= n + 1,
        format!("multiplicity {m}, allowed {}", n + 1),
    );
    v.clause(
        "bounded",
        space.check_bound(&w.coarsening, &w.bound),
        format!("certificate {}", w.bound),
    );
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Every grouping of the input's maximal members, per generator; complete
    /// relative to the truncation.
    Exhaustive,
    /// Merge members at the most crowded point until the multiplicity fits.
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsdimSearch {
    pub witness: Option<AsdimWitness>,
    /// `false` means a missing witness says nothing.
    pub exhaustive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("exhaustive search is limited to {cap} points, got {points}; use greedy mode")]
    CapExceeded { points: usize, cap: usize },
    #[error("input family over a different point set")]
    Universe,
}

/// Distinct non-singleton members not strictly inside another, largest first.
fn maximal_thick(input: &Family) -> Vec<Subset> {
    let mut thick: Vec<Subset> = input.thick_members().cloned().collect();
    thick.sort();
    thick.dedup();
    let mut out: Vec<Subset> = thick
        .iter()
        .filter(|a| !thick.iter().any(|b| b != *a && a.is_subset(b)))
        .cloned()
        .collect();
    out.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    out
}

fn fits(g: &Family, s: &Subset) -> bool {
    !s.is_thick() || g.member_containing(s).is_some()
}

struct Partitioner<'a> {
    items: &'a [Subset],
    g: &'a Family,
    cap: usize,
    blocks: Vec<Subset>,
    counts: Vec<usize>,
}

impl Partitioner<'_> {
    fn add(&mut self, b: usize, item: &Subset) -> Option<Subset> {
        let fresh = item.difference(&self.blocks[b]);
        if fresh.iter().any(|p| self.counts[p] + 1 > self.cap) {
            return None;
        }
        let merged = self.blocks[b].union(item);
        if !fits(self.g, &merged) {
            return None;
        }
        for p in fresh.iter() {
            self.counts[p] += 1;
        }
        Some(core::mem::replace(&mut self.blocks[b], merged))
    }

    fn undo(&mut self, b: usize, old: Subset) {
        for p in self.blocks[b].difference(&old).iter() {
            self.counts[p] -= 1;
        }
        self.blocks[b] = old;
    }

    fn run(&mut self, k: usize) -> bool {
        let Some(item) = self.items.get(k) else {
            return true;
        };
        for b in 0..self.blocks.len() {
            if let Some(old) = self.add(b, item) {
                if self.run(k + 1) {
                    return true;
                }
                self.undo(b, old);
            }
        }
        if item.iter().all(|p| self.counts[p] < self.cap) {
            for p in item.iter() {
                self.counts[p] += 1;
            }
            self.blocks.push(item.clone());
            if self.run(k + 1) {
                return true;
            }
            self.blocks.pop();
            for p in item.iter() {
                self.counts[p] -= 1;
            }
        }
        false
    }
}

pub fn asdim_search<S: LargeScale + ?Sized>(
    space: &S,
    n: usize,
    input: &Family,
    mode: SearchMode,
) -> Result<AsdimSearch, SearchError> {
    let universe = space.universe();
    if input.universe() != universe {
        return Err(SearchError::Universe);
    }
    let items = maximal_thick(input);
    let witness = match mode {
        SearchMode::Exhaustive => {
            if universe > EXHAUSTIVE_CAP {
                return Err(SearchError::CapExceeded {
                    points: universe,
                    cap: EXHAUSTIVE_CAP,
                });
            }
            space.generators().into_iter().find_map(|(bound, g)| {
                if !items.iter().all(|t| fits(g, t)) {
                    return None;
                }
                let mut p = Partitioner {
                    items: &items,
                    g,
                    cap: n + 1,
                    blocks: Vec::new(),
                    counts: alloc::vec![0; universe],
                };
                p.run(0).then(|| AsdimWitness {
                    coarsening: Family::from_members(universe, p.blocks).expect("same universe"),
                    bound,
                })
            })
        }
        SearchMode::Greedy => greedy(space, n, items),
    };
    let witness = witness.filter(|w| asdim_verify(space, n, input, w).is_verified());
    Ok(AsdimSearch {
        witness,
        exhaustive: mode == SearchMode::Exhaustive,
    })
}

fn greedy<S: LargeScale + ?Sized>(
    space: &S,
    n: usize,
    mut blocks: Vec<Subset>,
) -> Option<AsdimWitness> {
    let universe = space.universe();
    let generators = space.generators();
    loop {
        let fam = Family::from_members(universe, blocks.clone()).expect("same universe");
        let crowded = (0..universe).max_by_key(|&p| {
            (
                blocks.iter().filter(|b| b.contains(p)).count(),
                usize::MAX - p,
            )
        });
        let worst = crowded.map_or(0, |p| blocks.iter().filter(|b| b.contains(p)).count());
        if worst <= n + 1 {
            let bound = space.bounded(&fam)?;
            return Some(AsdimWitness {
                coarsening: fam,
                bound,
            });
        }
        let p = crowded.unwrap();
        let mut at_p = blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| b.contains(p))
            .map(|(i, _)| i);
        let (a, b) = (at_p.next()?, at_p.next()?);
        let merged = blocks[a].union(&blocks[b]);
        if !generators.iter().any(|(_, g)| fits(g, &merged)) {
            return None;
        }
        blocks.retain(|x| !x.is_subset(&merged));
        blocks.push(merged);
    }
}

/// A witness for piece `s` (its input being `u*` re-indexed into the piece)
/// becomes a colimit witness for `u`: the coarsening gains every outside
/// singleton, which leaves the multiplicity alone.
pub fn asdim_lift(
    sys: &FilteredSystem,
    s: usize,
    n: usize,
    u: &Family,
    w: &AsdimWitness,
) -> Result<AsdimWitness, LiftError> {
    let local = piece_input(sys, s, u)?;
    require(asdim_verify(sys.piece(s).space(), n, &local, w), true)?;
    let lifted = AsdimWitness {
        coarsening: sys.extend_from_piece(s, &w.coarsening),
        bound: lift_bound(s, &w.bound)?,
    };
    require(asdim_verify(sys, n, u, &lifted), false)?;
    Ok(lifted)
}

/// A colimit witness for a piece family `u_s` (trivially extended to the
/// ambient set) restricts to a witness in the piece by intersecting with the
/// carrier.
pub fn asdim_restrict(
    sys: &FilteredSystem,
    s: usize,
    n: usize,
    u_s: &Family,
    w: &AsdimWitness,
) -> Result<AsdimWitness, LiftError> {
    if s >= sys.pieces().len() {
        return Err(LiftError::NoSuchPiece(s));
    }
    let piece = sys.piece(s);
    if u_s.universe() != piece.space().len() {
        return Err(LiftError::Shape("input family is not over the piece"));
    }
    require(
        asdim_verify(sys, n, &sys.extend_from_piece(s, u_s), w),
        false,
    )?;
    let coarsening = piece.inclusion().restrict_family(&w.coarsening);
    let level = piece
        .space()
        .is_bounded(&coarsening)
        .ok_or(LiftError::RestrictionUnbounded(s))?;
    let restricted = AsdimWitness {
        coarsening,
        bound: Bound::Level(level),
    };
    require(asdim_verify(piece.space(), n, u_s, &restricted), true)?;
    Ok(restricted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::PointSet;
    use crate::scaled_space::{validate_space, Level, ScaledSpace};
    use alloc::vec;

    fn path_balls(n: usize, r: usize) -> Family {
        let members = (0..n)
            .map(|c| Subset::from_indices(n, c.saturating_sub(r)..(c + r + 1).min(n)))
            .collect();
        Family::from_members(n, members).unwrap()
    }

    fn path(n: usize, radii: &[usize]) -> ScaledSpace {
        validate_space(
            PointSet::numbered(n).unwrap(),
            radii.iter().map(|&r| path_balls(n, r)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn pair_blocks_give_dimension_one() {
        let s = path(6, &[1, 2, 4]);
        let coarsening = Family::from_index_lists(6, [vec![0, 1, 2, 3], vec![2, 3, 4, 5]]).unwrap();
        let w = AsdimWitness {
            coarsening,
            bound: Bound::Level(Level::new(2).unwrap()),
        };
        let input = s.levels()[0].family();
        assert!(asdim_verify(&s, 1, input, &w).is_verified());
        let v = asdim_verify(&s, 0, input, &w);
        assert!(!v.get("multiplicity").unwrap().pass);
        assert!(v.get("coarsens input").unwrap().pass);
    }

    #[test]
    fn disjoint_level_is_its_own_witness() {
        let blocks = Family::from_index_lists(4, [vec![0, 1], vec![2, 3]]).unwrap();
        let s = validate_space(PointSet::numbered(4).unwrap(), vec![blocks.clone()]).unwrap();
        let w = AsdimWitness {
            coarsening: blocks.clone(),
            bound: Bound::Level(Level::FIRST),
        };
        assert!(asdim_verify(&s, 0, &blocks, &w).is_verified());
        let found = asdim_search(&s, 0, &blocks, SearchMode::Exhaustive).unwrap();
        assert_eq!(
            found.witness.unwrap().coarsening.canonical(),
            blocks.canonical()
        );
    }

    #[test]
    fn triple_overlap_breaks_dimension_one() {
        let s = path(4, &[3]);
        let coarsening = Family::from_index_lists(4, [vec![0, 1], vec![1, 2], vec![1, 3]]).unwrap();
        let w = AsdimWitness {
            coarsening,
            bound: Bound::Level(Level::FIRST),
        };
        let v = asdim_verify(&s, 1, &Family::singletons(4), &w);
        assert!(!v.get("multiplicity").unwrap().pass);
    }

    #[test]
    fn segment_search_finds_interval_blocks() {
        let s = path(8, &[1, 2, 4]);
        let input = s.levels()[0].family();
        let found = asdim_search(&s, 1, input, SearchMode::Exhaustive).unwrap();
        let w = found.witness.expect("n = 1 witness on a segment");
        assert!(asdim_verify(&s, 1, input, &w).is_verified());
        let greedy = asdim_search(&s, 1, input, SearchMode::Greedy).unwrap();
        assert!(!greedy.exhaustive);
        if let Some(w) = greedy.witness {
            assert!(asdim_verify(&s, 1, input, &w).is_verified());
        }
    }

    #[test]
    fn complete_overlap_has_no_zero_dimensional_witness() {
        // members {0,1}, {0,2}, ... all through 0, and no level holds two of them
        let n = 6;
        let star =
            Family::from_members(n, (1..n).map(|p| Subset::from_indices(n, [0, p])).collect())
                .unwrap();
        let mut level = star.clone();
        level.push(Subset::singleton(n, 0));
        let s = validate_space(PointSet::numbered(n).unwrap(), vec![level]).unwrap();
        let found = asdim_search(&s, 0, &star, SearchMode::Exhaustive).unwrap();
        assert!(found.exhaustive);
        assert!(found.witness.is_none());
        assert!(asdim_search(&s, 4, &star, SearchMode::Exhaustive)
            .unwrap()
            .witness
            .is_some());
    }

    #[test]
    fn exhaustive_mode_has_a_cap() {
        let s = path(13, &[1]);
        let err = asdim_search(&s, 1, s.levels()[0].family(), SearchMode::Exhaustive).unwrap_err();
        assert_eq!(
            err,
            SearchError::CapExceeded {
                points: 13,
                cap: 12
            }
        );
        assert!(asdim_search(&s, 1, s.levels()[0].family(), SearchMode::Greedy).is_ok());
    }
}
