//! Coarse amenability through horizon ratios.

use alloc::format;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::{lift_bound, piece_input, require, LiftError};
use crate::colimit::{strip, FilteredSystem};
use crate::families::{Family, Subset};
use crate::rational::Rational;
use crate::report::Verification;
use crate::structure::{Bound, LargeScale};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmenabilityWitness {
    pub v: Family,
    pub v_bound: Bound,
    pub eps: Rational,
}

/// `(x, |hor(x, v)|, |hor(st(x, u), v)|)` for every point covered by `u`.
pub fn horizon_counts(u: &Family, v: &Family) -> Vec<(usize, usize, usize)> {
    let n = u.universe();
    let covered = u.union_of_members();
    covered
        .iter()
        .map(|x| {
            let point = Subset::singleton(n, x);
            let num = v.horizon_indices(&point).len();
            let den = v.horizon_indices(&u.star_of(&point)).len();
            (x, num, den)
        })
        .collect()
}

pub fn amenability_verify<S: LargeScale + ?Sized>(
    space: &S,
    input: &Family,
    w: &AmenabilityWitness,
) -> Verification {
    let mut v = Verification::new();
    let n = space.universe();
    let ids = space.points();
    if input.universe() != n || w.v.universe() != n {
        v.clause("shape", false, "input or v over a different point set");
        return v;
    }
    v.clause(
        "eps positive",
        w.eps > Rational::zero(),
        format!("eps {}", w.eps),
    );
    v.clause(
        "v bounded",
        space.check_bound(&w.v, &w.v_bound),
        format!("certificate {}", w.v_bound),
    );
    let counts = horizon_counts(input, &w.v);
    let empty = counts.iter().find(|c| c.2 == 0);
    v.clause(
        "nonempty horizons",
        empty.is_none(),
        match empty {
            None => format!(
                "largest horizon of a star: {} members",
                counts.iter().map(|c| c.2).max().unwrap_or(0)
            ),
            Some(&(x, _, _)) => format!("hor(st({}, U), V) is empty", ids.id(x)),
        },
    );
    let threshold = Rational::one() - w.eps;
    let worst = counts.iter().filter(|c| c.2 > 0).min_by(|a, b| {
        Rational::new(a.1 as i64, a.2 as i64).cmp(&Rational::new(b.1 as i64, b.2 as i64))
    });
    let (pass, detail) = match worst {
        None => (true, "no covered point".into()),
        Some(&(x, num, den)) => (
            Rational::new(num as i64, den as i64) > threshold,
            format!("smallest ratio {num}/{den} at {}", ids.id(x)),
        ),
    };
    v.clause("ratio", pass, detail);
    v
}

/// `v = v_s ∪ (u ∖ u*)`: the piece's family plus the input's singletons
/// outside the piece.
pub fn amenability_lift(
    sys: &FilteredSystem,
    s: usize,
    u: &Family,
    w: &AmenabilityWitness,
) -> Result<AmenabilityWitness, LiftError> {
    let local = piece_input(sys, s, u)?;
    let piece = sys.piece(s);
    require(amenability_verify(piece.space(), &local, w), true)?;
    let mut v = piece.inclusion().lift_family(&w.v);
    for m in u
        .iter()
        .filter(|m| m.is_singleton() && !m.is_subset(piece.carrier()))
    {
        v.push(m.clone());
    }
    let lifted = AmenabilityWitness {
        v,
        v_bound: lift_bound(s, &w.v_bound)?,
        eps: w.eps,
    };
    require(amenability_verify(sys, u, &lifted), false)?;
    Ok(lifted)
}

/// How one horizon of a lifted witness splits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub x: usize,
    /// `|hor(st(x, u*), v*)|`.
    pub piece_part: usize,
    /// `|hor(st(x, u ∖ u*), v ∖ v*)|`.
    pub outside_part: usize,
    /// The two parts together are exactly `hor(st(x, u), v)`.
    pub union_matches: bool,
    /// No member of one part equals a member of the other.
    pub disjoint: bool,
}

impl Decomposition {
    pub fn holds(&self) -> bool {
        self.union_matches && self.disjoint
    }
}

/// Splits every horizon of a lifted witness whose first `piece_members`
/// members form `v*`.
pub fn horizon_decomposition(
    sys: &FilteredSystem,
    s: usize,
    u: &Family,
    v: &Family,
    piece_members: usize,
) -> Vec<Decomposition> {
    let n = sys.ambient().len();
    let carrier = sys.piece(s).carrier();
    let u_star = strip(u, carrier);
    let u_out = Family::from_members(
        n,
        u.iter()
            .filter(|m| m.is_singleton() && !m.is_subset(carrier))
            .cloned()
            .collect(),
    )
    .expect("same universe");
    let v_star =
        Family::from_members(n, v.members()[..piece_members].to_vec()).expect("same universe");
    let v_out =
        Family::from_members(n, v.members()[piece_members..].to_vec()).expect("same universe");
    u.union_of_members()
        .iter()
        .map(|x| {
            let point = Subset::singleton(n, x);
            let full = v.horizon_indices(&u.star_of(&point));
            let a = v_star.horizon_indices(&u_star.star_of(&point));
            let b: Vec<usize> = v_out
                .horizon_indices(&u_out.star_of(&point))
                .into_iter()
                .map(|i| i + piece_members)
                .collect();
            let mut joined: Vec<usize> = a.iter().chain(&b).copied().collect();
            joined.sort_unstable();
            let disjoint = a
                .iter()
                .all(|&i| b.iter().all(|&j| v.members()[i] != v.members()[j]));
            Decomposition {
                x,
                piece_part: a.len(),
                outside_part: b.len(),
                union_matches: joined == full,
                disjoint,
            }
        })
        .collect()
}
