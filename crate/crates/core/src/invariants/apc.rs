//! Asymptotic property C: a verifier and a probing harness.
//!
//! Whether APC passes from the pieces to the colimit is open. The probe only
//! reports witnesses it found and verified; a miss is always "undecided".

use alloc::format;
use alloc::vec::Vec;

use crate::colimit::FilteredSystem;
use crate::families::{Family, Subset};
use crate::report::Verification;
use crate::structure::{Bound, LargeScale};

/// `families[j]` is meant for scale `U_{j+1}` of the prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApcWitness {
    pub families: Vec<Family>,
    pub bounds: Vec<Bound>,
}

pub fn apc_verify<S: LargeScale + ?Sized>(
    space: &S,
    prefix: &[Family],
    w: &ApcWitness,
) -> Verification {
    let mut v = Verification::new();
    let n = space.universe();
    let shape_ok = !w.families.is_empty()
        && w.families.len() == w.bounds.len()
        && w.families.iter().chain(prefix).all(|f| f.universe() == n);
    v.clause("shape", shape_ok, format!("{} families", w.families.len()));
    if !shape_ok {
        return v;
    }
    let monotone = prefix.windows(2).position(|p| !p[0].refines(&p[1]));
    v.clause(
        "prefix monotone",
        monotone.is_none(),
        match monotone {
            None => format!("{} scales", prefix.len()),
            Some(j) => format!("scale {} does not refine scale {}", j + 1, j + 2),
        },
    );
    v.clause(
        "within prefix",
        w.families.len() <= prefix.len(),
        format!(
            "{} families against {} scales",
            w.families.len(),
            prefix.len()
        ),
    );
    if w.families.len() > prefix.len() {
        return v;
    }
    let unbounded =
        (0..w.families.len()).find(|&j| !space.check_bound(&w.families[j], &w.bounds[j]));
    v.clause(
        "bounded",
        unbounded.is_none(),
        match unbounded {
            None => "every family carries a valid certificate".into(),
            Some(j) => format!("family {} fails certificate {}", j + 1, w.bounds[j]),
        },
    );
    let mut union = Subset::empty(n);
    for f in &w.families {
        union.union_with(&f.union_of_members());
    }
    let missing = union.complement().first();
    v.clause(
        "covers",
        missing.is_none(),
        match missing {
            None => "the families jointly cover the points".into(),
            Some(p) => format!("{} is not covered", space.points().id(p)),
        },
    );
    let clash = star_clash(w, prefix);
    v.clause(
        "star disjoint",
        clash.is_none(),
        match clash {
            None => "st(V, U_j) ∩ V' = ∅ for distinct V, V' in each family".into(),
            Some((j, a, b)) => format!(
                "family {}: members {a} and {b} meet through scale {}",
                j + 1,
                j + 1
            ),
        },
    );
    v
}

fn star_clash(w: &ApcWitness, prefix: &[Family]) -> Option<(usize, usize, usize)> {
    for (j, f) in w.families.iter().enumerate() {
        let u = &prefix[j];
        for (a, va) in f.iter().enumerate() {
            let st = u.star_of(va);
            for (b, vb) in f.iter().enumerate() {
                if a != b && va != vb && st.meets(vb) {
                    return Some((j, a, b));
                }
            }
        }
    }
    None
}

/// One greedy attempt: fill `n` families from pieces of `g`'s members,
/// largest first, keeping each family star-disjoint at its scale.
fn attempt<S: LargeScale + ?Sized>(
    space: &S,
    prefix: &[Family],
    g: &Family,
    n: usize,
) -> Option<ApcWitness> {
    let universe = space.universe();
    let candidates = g.trivially_extended();
    let mut uncovered = Subset::full(universe);
    let mut families = Vec::with_capacity(n);
    for u in &prefix[..n] {
        let mut chosen: Vec<Subset> = Vec::new();
        let mut pool: Vec<Subset> = candidates
            .iter()
            .map(|m| m.intersection(&uncovered))
            .filter(|m| !m.is_empty())
            .collect();
        pool.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        pool.dedup();
        for m in pool {
            let m = m.intersection(&uncovered);
            if m.is_empty() {
                continue;
            }
            let st = u.star_of(&m);
            if chosen
                .iter()
                .all(|c| !st.meets(c) && !u.star_of(c).meets(&m))
            {
                uncovered.difference_with(&m);
                chosen.push(m);
            }
        }
        families.push(Family::from_members(universe, chosen).expect("same universe"));
    }
    if !uncovered.is_empty() {
        return None;
    }
    let bounds = families
        .iter()
        .map(|f| space.bounded(f))
        .collect::<Option<Vec<_>>>()?;
    let w = ApcWitness { families, bounds };
    apc_verify(space, prefix, &w).is_verified().then_some(w)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ApcOutcome {
    Found(ApcWitness),
    Undecided { attempts: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApcTarget {
    Piece(usize),
    /// The colimit, probed along the chain of this piece extended by singletons.
    Colimit {
        along: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApcEntry {
    pub target: ApcTarget,
    pub prefix: Vec<Family>,
    pub outcome: ApcOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApcProbeReport {
    pub entries: Vec<ApcEntry>,
    pub budget: usize,
}

impl ApcProbeReport {
    pub fn found(&self, target: ApcTarget) -> Option<&ApcWitness> {
        self.entries
            .iter()
            .find(|e| e.target == target)
            .and_then(|e| match &e.outcome {
                ApcOutcome::Found(w) => Some(w),
                ApcOutcome::Undecided { .. } => None,
            })
    }

    pub fn pieces_found(&self) -> usize {
        self.count(|t| matches!(t, ApcTarget::Piece(_)))
    }

    pub fn colimit_found(&self) -> usize {
        self.count(|t| matches!(t, ApcTarget::Colimit { .. }))
    }

    fn count(&self, which: impl Fn(ApcTarget) -> bool) -> usize {
        self.entries
            .iter()
            .filter(|e| which(e.target) && matches!(e.outcome, ApcOutcome::Found(_)))
            .count()
    }

    /// Re-verifies every reported witness against its own prefix.
    pub fn consistent(&self, sys: &FilteredSystem) -> bool {
        self.entries.iter().all(|e| match (&e.outcome, e.target) {
            (ApcOutcome::Undecided { .. }, _) => true,
            (ApcOutcome::Found(w), ApcTarget::Piece(s)) => {
                apc_verify(sys.piece(s).space(), &e.prefix, w).is_verified()
            }
            (ApcOutcome::Found(w), ApcTarget::Colimit { .. }) => {
                apc_verify(sys, &e.prefix, w).is_verified()
            }
        })
    }
}

fn probe<S: LargeScale + ?Sized>(space: &S, prefix: &[Family], budget: &mut usize) -> ApcOutcome {
    let mut attempts = 0;
    for (_, g) in space.generators() {
        for n in 1..=prefix.len() {
            if *budget == 0 {
                return ApcOutcome::Undecided { attempts };
            }
            *budget -= 1;
            attempts += 1;
            if let Some(w) = attempt(space, prefix, g, n) {
                return ApcOutcome::Found(w);
            }
        }
    }
    ApcOutcome::Undecided { attempts }
}

/// Greedy search on every piece and on the colimit; `budget` caps the
/// attempts per target.
pub fn apc_probe(sys: &FilteredSystem, prefix_len: usize, budget: usize) -> ApcProbeReport {
    let mut entries = Vec::new();
    for (s, piece) in sys.pieces().iter().enumerate() {
        let space = piece.space();
        let prefix: Vec<Family> = space.chain().into_iter().take(prefix_len).collect();
        let mut left = budget;
        let outcome = probe(space, &prefix, &mut left);
        entries.push(ApcEntry {
            target: ApcTarget::Piece(s),
            prefix,
            outcome,
        });
    }
    for (s, piece) in sys.pieces().iter().enumerate() {
        let prefix: Vec<Family> = piece
            .space()
            .chain()
            .iter()
            .take(prefix_len)
            .map(|f| sys.extend_from_piece(s, f))
            .collect();
        let mut left = budget;
        let outcome = probe(sys, &prefix, &mut left);
        entries.push(ApcEntry {
            target: ApcTarget::Colimit { along: s },
            prefix,
            outcome,
        });
    }
    ApcProbeReport { entries, budget }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::PointSet;
    use crate::scaled_space::{validate_space, Level};
    use alloc::vec;

    #[test]
    fn one_bounded_member() {
        let top = Family::from_index_lists(3, [vec![0, 1, 2]]).unwrap();
        let s = validate_space(PointSet::numbered(3).unwrap(), vec![top.clone()]).unwrap();
        let w = ApcWitness {
            families: vec![top.clone()],
            bounds: vec![Bound::Level(Level::FIRST)],
        };
        assert!(apc_verify(&s, &[top], &w).is_verified());
    }

    #[test]
    fn islands_are_star_disjoint() {
        let islands = Family::from_index_lists(4, [vec![0, 1], vec![2, 3]]).unwrap();
        let s = validate_space(PointSet::numbered(4).unwrap(), vec![islands.clone()]).unwrap();
        let w = ApcWitness {
            families: vec![islands.clone()],
            bounds: vec![Bound::Level(Level::FIRST)],
        };
        assert!(apc_verify(&s, core::slice::from_ref(&islands), &w).is_verified());
    }

    #[test]
    fn members_meeting_through_a_scale() {
        let n = 3;
        let u = Family::from_index_lists(n, [vec![0, 1, 2]]).unwrap();
        let s = validate_space(PointSet::numbered(n).unwrap(), vec![u.clone()]).unwrap();
        let w = ApcWitness {
            families: vec![
                Family::from_index_lists(n, [vec![0], vec![2]]).unwrap(),
                Family::singletons(n),
            ],
            bounds: vec![Bound::Level(Level::FIRST); 2],
        };
        let v = apc_verify(&s, &[u.clone(), u], &w);
        assert!(!v.get("star disjoint").unwrap().pass);
        assert!(v.get("covers").unwrap().pass);
    }
}
