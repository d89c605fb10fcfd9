//! Exactness: partitions of unity with bounded supports and small variation.

use alloc::format;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use super::{lift_bound, piece_input, require, LiftError};
use crate::colimit::FilteredSystem;
use crate::families::{Family, Subset};
use crate::rational::Rational;
use crate::report::Verification;
use crate::structure::{Bound, LargeScale};

/// `functions[i][x]` is `f_i(x)`; dense over the point set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionOfUnity {
    pub functions: Vec<Vec<Rational>>,
}

impl PartitionOfUnity {
    pub fn supports(&self, universe: usize) -> Family {
        let members = self
            .functions
            .iter()
            .map(|f| Subset::from_indices(universe, (0..f.len()).filter(|&x| !f[x].is_zero())))
            .collect();
        Family::from_members(universe, members).expect("supports inside the point set")
    }

    /// `Σ_i |f_i(x) - f_i(y)|`.
    pub fn variation(&self, x: usize, y: usize) -> Rational {
        self.functions.iter().map(|f| (f[x] - f[y]).abs()).sum()
    }

    pub fn sum_at(&self, x: usize) -> Rational {
        self.functions.iter().map(|f| f[x]).sum()
    }

    /// Indicator functions of the members of a partition.
    pub fn indicators(blocks: &Family) -> Self {
        let n = blocks.universe();
        let functions = blocks
            .iter()
            .map(|b| {
                (0..n)
                    .map(|x| {
                        if b.contains(x) {
                            Rational::one()
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        PartitionOfUnity { functions }
    }
}

pub fn exactness_verify<S: LargeScale + ?Sized>(
    space: &S,
    input: &Family,
    eps: Rational,
    pou: &PartitionOfUnity,
    support_bound: &Bound,
) -> Verification {
    let mut v = Verification::new();
    let n = space.universe();
    if input.universe() != n || pou.functions.iter().any(|f| f.len() != n) {
        v.clause(
            "shape",
            false,
            "input or a function is not over the point set",
        );
        return v;
    }
    v.clause("eps positive", eps > Rational::zero(), format!("eps {eps}"));
    let negative = pou
        .functions
        .iter()
        .enumerate()
        .find_map(|(i, f)| f.iter().position(|w| w.is_negative()).map(|x| (i, x)));
    v.clause(
        "non-negative",
        negative.is_none(),
        match negative {
            None => "all weights ≥ 0".into(),
            Some((i, x)) => format!("f_{i}({}) < 0", space.points().id(x)),
        },
    );
    let off = (0..n).find(|&x| pou.sum_at(x) != Rational::one());
    v.clause(
        "unit sums",
        off.is_none(),
        match off {
            None => "Σ f_i(x) = 1 at every point".into(),
            Some(x) => format!("Σ f_i({}) = {}", space.points().id(x), pou.sum_at(x)),
        },
    );
    v.clause(
        "supports bounded",
        space.check_bound(&pou.supports(n), support_bound),
        format!("certificate {support_bound}"),
    );
    let mut worst: Option<(Rational, usize, usize)> = None;
    for u in input.thick_members() {
        let pts = u.to_vec();
        for (k, &x) in pts.iter().enumerate() {
            for &y in &pts[k + 1..] {
                let d = pou.variation(x, y);
                if worst.as_ref().is_none_or(|w| d > w.0) {
                    worst = Some((d, x, y));
                }
            }
        }
    }
    let (pass, detail) = match worst {
        None => (true, "no two points share an input member".into()),
        Some((d, x, y)) => (
            d < eps,
            format!(
                "largest variation {d} between {} and {}",
                space.points().id(x),
                space.points().id(y)
            ),
        ),
    };
    v.clause("variation", pass, detail);
    v
}

/// Extends the piece's functions by zero and adds a delta at every point
/// outside the piece.
pub fn exactness_lift(
    sys: &FilteredSystem,
    s: usize,
    u: &Family,
    eps: Rational,
    pou: &PartitionOfUnity,
    support_bound: &Bound,
) -> Result<(PartitionOfUnity, Bound), LiftError> {
    let local = piece_input(sys, s, u)?;
    let piece = sys.piece(s);
    require(
        exactness_verify(piece.space(), &local, eps, pou, support_bound),
        true,
    )?;
    let inc = piece.inclusion();
    let n = sys.ambient().len();
    let mut functions: Vec<Vec<Rational>> = pou
        .functions
        .iter()
        .map(|f| {
            (0..n)
                .map(|x| inc.local_point(x).map_or(Rational::zero(), |p| f[p]))
                .collect()
        })
        .collect();
    for j in inc.outside() {
        functions.push(
            (0..n)
                .map(|x| {
                    if x == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect(),
        );
    }
    let lifted = PartitionOfUnity { functions };
    let bound = lift_bound(s, support_bound)?;
    require(exactness_verify(sys, u, eps, &lifted, &bound), false)?;
    Ok((lifted, bound))
}
