//! Pinch witnesses into finite-dimensional Euclidean space.
//!
//! Coordinates are exact rationals; distances are square roots and are
//! compared in `f64` against a tolerance.

use alloc::format;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::{lift_bound, piece_input, require, LiftError};
use crate::colimit::FilteredSystem;
use crate::families::{Family, Subset};
use crate::rational::{to_f64, Rational};
use crate::report::Verification;
use crate::structure::{Bound, LargeScale};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PinchWitness {
    pub dim: usize,
    /// One coordinate vector of length `dim` per point.
    pub embedding: Vec<Vec<Rational>>,
    pub sep: Family,
    pub sep_bound: Bound,
    pub c: Rational,
    pub eps: Rational,
}

impl PinchWitness {
    pub fn distance(&self, x: usize, y: usize) -> f64 {
        let sq: f64 = self.embedding[x]
            .iter()
            .zip(&self.embedding[y])
            .map(|(a, b)| {
                let d = to_f64(*a) - to_f64(*b);
                d * d
            })
            .sum();
        libm::sqrt(sq)
    }

    pub fn norm(&self, x: usize) -> f64 {
        libm::sqrt(
            self.embedding[x]
                .iter()
                .map(|a| to_f64(*a) * to_f64(*a))
                .sum(),
        )
    }
}

pub fn pinch_verify<S: LargeScale + ?Sized>(
    space: &S,
    input: &Family,
    w: &PinchWitness,
    tol: f64,
) -> Verification {
    let mut v = Verification::new();
    let n = space.universe();
    let ids = space.points();
    let shape_ok = w.dim >= 1
        && w.embedding.len() == n
        && w.embedding.iter().all(|e| e.len() == w.dim)
        && w.sep.universe() == n
        && input.universe() == n;
    v.clause("shape", shape_ok, format!("dimension {}", w.dim));
    if !shape_ok {
        return v;
    }
    v.clause(
        "parameters",
        w.c > Rational::zero() && w.eps > Rational::zero(),
        format!("c {}, eps {}", w.c, w.eps),
    );

    let mut widest: Option<(f64, usize, usize)> = None;
    for u in input.thick_members() {
        let pts = u.to_vec();
        for (k, &x) in pts.iter().enumerate() {
            for &y in &pts[k + 1..] {
                let d = w.distance(x, y);
                if widest.is_none_or(|m| d > m.0) {
                    widest = Some((d, x, y));
                }
            }
        }
    }
    let eps = to_f64(w.eps);
    v.clause(
        "diameter",
        widest.is_none_or(|m| m.0 < eps - tol),
        match widest {
            None => "every input member is a point".into(),
            Some((d, x, y)) => format!(
                "largest image distance {d} between {} and {}",
                ids.id(x),
                ids.id(y)
            ),
        },
    );

    let mut closest: Option<(f64, usize, usize)> = None;
    for x in 0..n {
        for y in x + 1..n {
            if w.sep
                .member_containing(&Subset::from_indices(n, [x, y]))
                .is_some()
            {
                continue;
            }
            let d = w.distance(x, y);
            if closest.is_none_or(|m| d < m.0) {
                closest = Some((d, x, y));
            }
        }
    }
    let c = to_f64(w.c);
    v.clause(
        "separation",
        closest.is_none_or(|m| m.0 >= c - tol),
        match closest {
            None => "every pair shares a separating member".into(),
            Some((d, x, y)) => format!(
                "closest separated pair {} and {} at {d}",
                ids.id(x),
                ids.id(y)
            ),
        },
    );
    v.clause(
        "sep bounded",
        space.check_bound(&w.sep, &w.sep_bound),
        format!("certificate {}", w.sep_bound),
    );
    v
}

/// `x ∈ X_s ↦ (f_s(x), 0)`, `x ∉ X_s ↦ (0, e_x)`; the separating family
/// gains every singleton. Only `c = 1` witnesses are lifted.
pub fn pinch_lift(
    sys: &FilteredSystem,
    s: usize,
    u: &Family,
    w: &PinchWitness,
    tol: f64,
) -> Result<PinchWitness, LiftError> {
    if w.c != Rational::one() {
        return Err(LiftError::Shape("only c = 1 pinch witnesses lift"));
    }
    let local = piece_input(sys, s, u)?;
    let piece = sys.piece(s);
    require(pinch_verify(piece.space(), &local, w, tol), true)?;
    let inc = piece.inclusion();
    let n = sys.ambient().len();
    let outside: Vec<usize> = inc.outside().collect();
    let dim = w.dim + outside.len();
    let embedding = (0..n)
        .map(|x| {
            let mut e = alloc::vec![Rational::zero(); dim];
            match inc.local_point(x) {
                Some(p) => e[..w.dim].clone_from_slice(&w.embedding[p]),
                None => {
                    let k = outside.binary_search(&x).expect("outside point");
                    e[w.dim + k] = Rational::one();
                }
            }
            e
        })
        .collect();
    let mut sep = inc.lift_family(&w.sep);
    for x in 0..n {
        sep.push(Subset::singleton(n, x));
    }
    let lifted = PinchWitness {
        dim,
        embedding,
        sep,
        sep_bound: lift_bound(s, &w.sep_bound)?,
        c: w.c,
        eps: w.eps,
    };
    require(pinch_verify(sys, u, &lifted, tol), false)?;
    Ok(lifted)
}

/// Where a pair sits relative to the lifting piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairCase {
    Inside,
    Mixed,
    Outside,
}

/// Every pair `x < y` of the ambient set with its case and image distance.
pub fn pinch_pair_cases(
    sys: &FilteredSystem,
    s: usize,
    w: &PinchWitness,
) -> Vec<(usize, usize, PairCase, f64)> {
    let carrier = sys.piece(s).carrier();
    let n = sys.ambient().len();
    let mut out = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            let case = match (carrier.contains(x), carrier.contains(y)) {
                (true, true) => PairCase::Inside,
                (false, false) => PairCase::Outside,
                _ => PairCase::Mixed,
            };
            out.push((x, y, case, w.distance(x, y)));
        }
    }
    out
}
