//! Property A with finite sets `A_x ⊆ X × {1..n_cap}`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use num_traits::Zero;

use super::{lift_bound, piece_input, require, LiftError};
use crate::colimit::FilteredSystem;
use crate::families::{Family, Subset};
use crate::rational::Rational;
use crate::report::Verification;
use crate::structure::{Bound, LargeScale};

pub type Marked = BTreeSet<(usize, usize)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyAFamily {
    /// Truncation of ℕ in the second coordinate.
    pub n_cap: usize,
    /// `sets[x]` is `A_x`.
    pub sets: Vec<Marked>,
    pub support: Family,
    pub support_bound: Bound,
    pub eps: Rational,
}

/// `|A_x Δ A_y| / |A_x ∩ A_y|`, or `None` when the intersection is empty.
pub fn ratio(a: &Marked, b: &Marked) -> Option<Rational> {
    let meet = a.intersection(b).count();
    if meet == 0 {
        return None;
    }
    let diff = a.symmetric_difference(b).count();
    Some(Rational::new(diff as i64, meet as i64))
}

/// Largest ratio between `A_x` and `A_y` over `y ∈ st(x, input)`; `None`
/// if one of those intersections is empty.
pub fn ratio_at(input: &Family, w: &PropertyAFamily, x: usize) -> Option<Rational> {
    let around = input.star_of(&Subset::singleton(input.universe(), x));
    let mut worst = Rational::zero();
    for y in around.iter() {
        worst = worst.max(ratio(&w.sets[x], &w.sets[y])?);
    }
    Some(worst)
}

pub fn property_a_verify<S: LargeScale + ?Sized>(
    space: &S,
    input: &Family,
    w: &PropertyAFamily,
) -> Verification {
    let mut v = Verification::new();
    let n = space.universe();
    let ids = space.points();
    let shape_ok =
        w.n_cap >= 1 && w.sets.len() == n && input.universe() == n && w.support.universe() == n;
    v.clause(
        "shape",
        shape_ok,
        format!("{} sets, cap {}", w.sets.len(), w.n_cap),
    );
    if !shape_ok {
        return v;
    }
    let stray = (0..n).find(|&x| {
        w.sets[x]
            .iter()
            .any(|&(p, k)| p >= n || k == 0 || k > w.n_cap)
    });
    v.clause(
        "within cap",
        stray.is_none(),
        match stray {
            None => format!("entries in X × 1..={}", w.n_cap),
            Some(x) => format!("A_{} has an entry outside X × 1..={}", ids.id(x), w.n_cap),
        },
    );
    if stray.is_some() {
        return v;
    }
    v.clause(
        "eps positive",
        w.eps > Rational::zero(),
        format!("eps {}", w.eps),
    );
    let unmarked = (0..n).find(|&x| !w.sets[x].contains(&(x, 1)));
    v.clause(
        "contains (x,1)",
        unmarked.is_none(),
        match unmarked {
            None => "every A_x holds (x,1)".into(),
            Some(x) => format!("A_{} misses ({0},1)", ids.id(x)),
        },
    );
    let outside = (0..n).find(|&x| {
        let st = w.support.star_of(&Subset::singleton(n, x));
        w.sets[x].iter().any(|&(p, _)| !st.contains(p))
    });
    v.clause(
        "support",
        outside.is_none(),
        match outside {
            None => "A_x ⊆ st(x, V) × ℕ".into(),
            Some(x) => format!("A_{} leaves st({0}, V)", ids.id(x)),
        },
    );
    v.clause(
        "support bounded",
        space.check_bound(&w.support, &w.support_bound),
        format!("certificate {}", w.support_bound),
    );
    v.clause(
        "bounded geometry",
        true,
        format!("members of at most {} points", space.geometry_bound()),
    );

    let mut guard: Option<(usize, usize)> = None;
    let mut worst: Option<(Rational, usize, usize)> = None;
    for x in 0..n {
        for y in input.star_of(&Subset::singleton(n, x)).iter() {
            match ratio(&w.sets[x], &w.sets[y]) {
                None => {
                    guard.get_or_insert((x, y));
                }
                Some(r) => {
                    if worst.is_none_or(|m| r > m.0) {
                        worst = Some((r, x, y));
                    }
                }
            }
        }
    }
    v.clause(
        "nonempty intersections",
        guard.is_none(),
        match guard {
            None => "A_x ∩ A_y ≠ ∅ for every compared pair".into(),
            Some((x, y)) => format!(
                "A_{} ∩ A_{} is empty: ratio undefined",
                ids.id(x),
                ids.id(y)
            ),
        },
    );
    let (pass, detail) = match worst {
        None => (guard.is_none(), "no comparable pair".into()),
        Some((r, x, y)) => (
            r < w.eps,
            format!("largest ratio {r} between {} and {}", ids.id(x), ids.id(y)),
        ),
    };
    v.clause("ratio", pass, detail);
    v
}

/// `B_x = A_x` inside the piece and `{(x,1)}` outside it.
pub fn property_a_lift(
    sys: &FilteredSystem,
    s: usize,
    u: &Family,
    w: &PropertyAFamily,
) -> Result<PropertyAFamily, LiftError> {
    let local = piece_input(sys, s, u)?;
    let piece = sys.piece(s);
    require(property_a_verify(piece.space(), &local, w), true)?;
    let inc = piece.inclusion();
    let sets = (0..sys.ambient().len())
        .map(|x| match inc.local_point(x) {
            Some(p) => w.sets[p]
                .iter()
                .map(|&(q, k)| (inc.ambient_point(q), k))
                .collect(),
            None => BTreeSet::from([(x, 1)]),
        })
        .collect();
    let lifted = PropertyAFamily {
        n_cap: w.n_cap,
        sets,
        support: sys.extend_from_piece(s, &w.support),
        support_bound: lift_bound(s, &w.support_bound)?,
        eps: w.eps,
    };
    require(property_a_verify(sys, u, &lifted), false)?;
    Ok(lifted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::PointSet;
    use crate::scaled_space::{validate_space, Level};
    use alloc::vec;

    fn own_points(n: usize) -> Vec<Marked> {
        (0..n).map(|x| BTreeSet::from([(x, 1)])).collect()
    }

    #[test]
    fn points_alone_on_the_singleton_partition() {
        let s =
            validate_space(PointSet::numbered(3).unwrap(), vec![Family::singletons(3)]).unwrap();
        let w = PropertyAFamily {
            n_cap: 3,
            sets: own_points(3),
            support: Family::singletons(3),
            support_bound: Bound::Level(Level::FIRST),
            eps: Rational::new(1, 10),
        };
        let v = property_a_verify(&s, &Family::singletons(3), &w);
        assert!(v.is_verified(), "{v}");
        assert_eq!(
            ratio_at(&Family::singletons(3), &w, 1),
            Some(Rational::zero())
        );
    }

    #[test]
    fn block_sets_have_no_difference() {
        let n = 4;
        let cap = 2;
        let blocks = Family::from_index_lists(n, [vec![0, 1], vec![2, 3]]).unwrap();
        let s = validate_space(PointSet::numbered(n).unwrap(), vec![blocks.clone()]).unwrap();
        let sets = (0..n)
            .map(|x| {
                let block = blocks.iter().find(|b| b.contains(x)).unwrap();
                block
                    .iter()
                    .flat_map(|p| (1..=cap).map(move |k| (p, k)))
                    .collect()
            })
            .collect();
        let w = PropertyAFamily {
            n_cap: cap,
            sets,
            support: blocks.clone(),
            support_bound: Bound::Level(Level::FIRST),
            eps: Rational::new(1, 100),
        };
        assert!(property_a_verify(&s, &blocks, &w).is_verified());
    }

    #[test]
    fn disjoint_neighbours_hit_the_division_guard() {
        let n = 2;
        let top = Family::from_index_lists(n, [vec![0, 1]]).unwrap();
        let s = validate_space(PointSet::numbered(n).unwrap(), vec![top.clone()]).unwrap();
        let w = PropertyAFamily {
            n_cap: 1,
            sets: own_points(n),
            support: top.clone(),
            support_bound: Bound::Level(Level::FIRST),
            eps: Rational::from_integer(100),
        };
        let v = property_a_verify(&s, &top, &w);
        assert!(!v.get("nonempty intersections").unwrap().pass);
        assert!(v.get("contains (x,1)").unwrap().pass);
        assert_eq!(ratio_at(&top, &w, 0), None);
    }
}
