//! Deterministic instance generators: integer sequences tending to zero,
//! disjoint unions of metric spaces, the harmonic points of `(0, 1]`, and
//! seeded random systems for property suites.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_traits::Signed;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::colimit::{validate_system, FilteredSystem, PieceSpec, SystemError};
use crate::families::{Family, PointSet, Subset};
use crate::maps::{GroundedMap, MetricTarget};
use crate::rational::{Distance, Rational};
use crate::scaled_space::{self, validate_space, ScaledSpace, SpaceError};
use crate::structure::LargeScale;

/// Largest ambient set any deterministic generator will build.
pub const MAX_POINTS: usize = 400;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("{what} must be at least {min}")]
    TooSmall { what: &'static str, min: usize },
    #[error("{what} = {got} exceeds the cap {cap}")]
    CapExceeded {
        what: &'static str,
        got: usize,
        cap: usize,
    },
    #[error("radii must be positive and strictly increasing")]
    Radii,
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// A generated system plus notes on how the infinite object was truncated.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub system: FilteredSystem,
    pub notes: Vec<String>,
}

fn check_radii(radii: &[Rational]) -> Result<(), CorpusError> {
    let positive = radii.iter().all(|r| *r > Rational::from_integer(0));
    let increasing = radii.windows(2).all(|w| w[0] < w[1]);
    if radii.is_empty() || !positive || !increasing {
        return Err(CorpusError::Radii);
    }
    Ok(())
}

/// Closed balls of `metric` restricted to `carrier`, one scale per radius.
fn ball_chain(metric: &MetricTarget, carrier: &Subset, radii: &[Rational]) -> Vec<Family> {
    let n = carrier.len();
    let pts = carrier.to_vec();
    radii
        .iter()
        .map(|&r| {
            let members = pts
                .iter()
                .map(|&c| {
                    Subset::from_indices(
                        n,
                        pts.iter()
                            .enumerate()
                            .filter(|(_, &q)| metric.dist(c, q) <= Distance::Finite(r))
                            .map(|(k, _)| k),
                    )
                })
                .collect();
            Family::from_members(n, members).expect("balls over the carrier")
        })
        .collect()
}

fn piece_from_metric(
    name: String,
    metric: &MetricTarget,
    carrier: Subset,
    radii: &[Rational],
) -> Result<PieceSpec, CorpusError> {
    let points = metric
        .points()
        .sub(&carrier)
        .expect("carrier over the metric");
    let space = validate_space(points, ball_chain(metric, &carrier, radii))?;
    Ok(PieceSpec {
        name,
        carrier,
        space,
    })
}

fn tuple_id(t: &[i64]) -> String {
    let parts: Vec<String> = t.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

/// Integer sequences with finitely many nonzero entries: piece `X_s` holds
/// the tuples in `[-box, box]^s` padded with zeros to length `s_max`, with
/// ℓ1 balls of the given radii.
pub fn gen_c0(s_max: usize, box_: i64, radii: &[Rational]) -> Result<Corpus, CorpusError> {
    if s_max < 1 {
        return Err(CorpusError::TooSmall {
            what: "s_max",
            min: 1,
        });
    }
    if box_ < 0 {
        return Err(CorpusError::TooSmall {
            what: "box",
            min: 0,
        });
    }
    check_radii(radii)?;
    let side = 2 * box_ as usize + 1;
    let total = side.checked_pow(s_max as u32).unwrap_or(usize::MAX);
    if total > MAX_POINTS {
        return Err(CorpusError::CapExceeded {
            what: "points",
            got: total,
            cap: MAX_POINTS,
        });
    }
    let mut tuples: Vec<Vec<i64>> = alloc::vec![Vec::new()];
    for _ in 0..s_max {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                (-box_..=box_).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    let ambient = PointSet::new(tuples.iter().map(|t| tuple_id(t))).expect("distinct tuples");
    let metric = MetricTarget::from_fn(ambient.clone(), |a, b| {
        let d: i64 = tuples[a]
            .iter()
            .zip(&tuples[b])
            .map(|(x, y)| (x - y).abs())
            .sum();
        Distance::Finite(Rational::from_integer(d))
    })
    .expect("ℓ1 is a metric");
    let n = ambient.len();
    let mut specs = Vec::new();
    for s in 1..=s_max {
        let carrier = Subset::from_indices(
            n,
            (0..n).filter(|&p| tuples[p][s..].iter().all(|&x| x == 0)),
        );
        specs.push(piece_from_metric(format!("X{s}"), &metric, carrier, radii)?);
    }
    let mut upper = Vec::new();
    for r in 0..s_max {
        for s in r..s_max {
            upper.push((r, s, s));
        }
    }
    let system = validate_system(ambient, specs, Some(upper))?;
    Ok(Corpus {
        system,
        notes: alloc::vec![
            format!("sequences truncated to length {s_max}, entries in [-{box_}, {box_}]"),
            "l1 balls; upper(r, s) = max(r, s)".into(),
        ],
    })
}

/// A path of `len` points at unit spacing.
pub fn path_metric(len: usize) -> MetricTarget {
    MetricTarget::from_fn(PointSet::numbered(len).expect("non-empty path"), |a, b| {
        Distance::Finite(Rational::from_integer((a as i64 - b as i64).abs()))
    })
    .expect("path metric")
}

/// Islands at infinite distance from each other. Pieces are the single
/// islands, the pairs of islands, and the whole union; balls never cross
/// islands.
pub fn gen_disjoint_union(
    islands: &[MetricTarget],
    radii: &[Rational],
) -> Result<Corpus, CorpusError> {
    let k = islands.len();
    if k == 0 {
        return Err(CorpusError::TooSmall {
            what: "islands",
            min: 1,
        });
    }
    check_radii(radii)?;
    let total: usize = islands.iter().map(|m| m.points().len()).sum();
    if total > MAX_POINTS {
        return Err(CorpusError::CapExceeded {
            what: "points",
            got: total,
            cap: MAX_POINTS,
        });
    }
    let mut ids = Vec::new();
    let mut owner = Vec::new();
    let mut local = Vec::new();
    for (i, m) in islands.iter().enumerate() {
        for (p, id) in m.points().ids().iter().enumerate() {
            ids.push(format!("M{i}:{id}"));
            owner.push(i);
            local.push(p);
        }
    }
    let ambient = PointSet::new(ids).expect("island-qualified ids are distinct");
    let metric = MetricTarget::from_fn(ambient.clone(), |a, b| {
        if owner[a] == owner[b] {
            islands[owner[a]].dist(local[a], local[b])
        } else {
            Distance::Infinite
        }
    })
    .expect("disjoint union of metrics");

    // index sets, smallest first
    let mut index_sets: Vec<Vec<usize>> = (0..k).map(|i| alloc::vec![i]).collect();
    for i in 0..k {
        for j in i + 1..k {
            index_sets.push(alloc::vec![i, j]);
        }
    }
    if k > 2 {
        index_sets.push((0..k).collect());
    }
    let n = ambient.len();
    let mut specs = Vec::new();
    for set in &index_sets {
        let carrier = Subset::from_indices(n, (0..n).filter(|&p| set.contains(&owner[p])));
        let name = set
            .iter()
            .map(|i| format!("M{i}"))
            .collect::<Vec<_>>()
            .join("+");
        specs.push(piece_from_metric(name, &metric, carrier, radii)?);
    }
    let full = index_sets.len() - 1;
    let mut upper = Vec::new();
    for r in 0..index_sets.len() {
        for s in r..index_sets.len() {
            let mut union: Vec<usize> = index_sets[r]
                .iter()
                .chain(&index_sets[s])
                .copied()
                .collect();
            union.sort_unstable();
            union.dedup();
            let t = index_sets.iter().position(|x| *x == union).unwrap_or(full);
            upper.push((r, s, t));
        }
    }
    let system = validate_system(ambient, specs, Some(upper))?;
    Ok(Corpus {
        system,
        notes: alloc::vec![
            format!(
                "{k} islands; finite index sets truncated to singletons, pairs and the full union"
            ),
            "upper = union of index sets, else the full union".into(),
        ],
    })
}

/// The harmonic points `1/m` of `(0, 1]` and the maps `f(x) = 1/x`, `g ≡ 1`.
#[derive(Debug, Clone)]
pub struct UnitInterval {
    pub corpus: Corpus,
    pub n_max: usize,
    /// `f(1/m) = m`.
    pub f: GroundedMap,
    /// `g ≡ 1`.
    pub g: GroundedMap,
    /// `{0, …, n_max + 1}` with `|a - b|`.
    pub target: MetricTarget,
}

impl UnitInterval {
    /// Index of the point `1/m`.
    pub fn point(&self, m: usize) -> usize {
        m - 1
    }

    /// Integer windows `{k, …, k + D}` for `D` in `widths`, as a chain on the
    /// target.
    pub fn windows(&self, widths: core::ops::Range<usize>) -> ScaledSpace {
        let n = self.target.points().len();
        let chain = widths
            .map(|d| {
                let members = (0..n.saturating_sub(d))
                    .map(|k| Subset::from_indices(n, k..=k + d))
                    .collect();
                Family::from_members(n, members).expect("windows inside the target")
            })
            .collect();
        validate_space(self.target.points().clone(), chain).expect("windows form a chain")
    }

    /// Every width a finite piece could need, up to `n_max`.
    pub fn piece_codomain(&self) -> ScaledSpace {
        self.windows(0..self.n_max + 1)
    }

    /// The candidate uniform bounds `M` whose refuting point `1/(M+2)` lies
    /// inside the truncation.
    pub fn colimit_codomain(&self) -> ScaledSpace {
        self.windows(0..self.n_max)
    }
}

pub fn gen_unit_interval(n_max: usize) -> Result<UnitInterval, CorpusError> {
    if n_max < 2 {
        return Err(CorpusError::TooSmall {
            what: "n_max",
            min: 2,
        });
    }
    if n_max + 1 > MAX_POINTS {
        return Err(CorpusError::CapExceeded {
            what: "points",
            got: n_max + 1,
            cap: MAX_POINTS,
        });
    }
    let count = n_max + 1;
    let ambient = PointSet::new((1..=count).map(|m| format!("1/{m}"))).expect("distinct");
    let metric = MetricTarget::from_fn(ambient.clone(), |a, b| {
        Distance::Finite((Rational::new(1, a as i64 + 1) - Rational::new(1, b as i64 + 1)).abs())
    })
    .expect("absolute value metric");
    let radii = [
        Rational::new(1, 4),
        Rational::new(1, 2),
        Rational::from_integer(1),
    ];
    let mut specs = Vec::new();
    for n in 1..=n_max {
        let carrier = Subset::from_indices(count, 0..=n);
        specs.push(piece_from_metric(
            format!("X{n}"),
            &metric,
            carrier,
            &radii,
        )?);
    }
    let mut upper = Vec::new();
    for r in 0..n_max {
        for s in r..n_max {
            upper.push((r, s, s));
        }
    }
    let system = validate_system(ambient.clone(), specs, Some(upper))?;
    let target =
        MetricTarget::from_fn(PointSet::numbered(n_max + 2).expect("non-empty"), |a, b| {
            Distance::Finite(Rational::from_integer((a as i64 - b as i64).abs()))
        })
        .expect("absolute value metric");
    let f = GroundedMap::new(
        ambient.clone(),
        target.points().clone(),
        (1..=count).collect(),
    )
    .expect("f is total");
    let g = GroundedMap::new(ambient, target.points().clone(), alloc::vec![1; count])
        .expect("g is total");
    Ok(UnitInterval {
        corpus: Corpus {
            system,
            notes: alloc::vec![
                format!("(0, 1] discretized to 1/m, m = 1..={count}"),
                format!("pieces X_n = [1/(n+1), 1], n = 1..={n_max}; upper(r, s) = max(r, s)"),
                "codomain truncated to the integer windows of width 0..=n_max".into(),
            ],
        },
        n_max,
        f,
        g,
        target,
    })
}

/// Limits for [`gen_random_system`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomCaps {
    pub points: usize,
    pub pieces: usize,
    pub depth: usize,
}

impl RandomCaps {
    pub const MAX: RandomCaps = RandomCaps {
        points: 12,
        pieces: 4,
        depth: 3,
    };
}

impl Default for RandomCaps {
    fn default() -> Self {
        Self::MAX
    }
}

#[derive(Debug, Clone)]
pub struct RandomSystem {
    pub system: FilteredSystem,
    pub seed: u64,
    /// Candidate systems discarded before this one validated.
    pub rejections: usize,
}

/// Attempts per seed before falling back to a single piece.
pub const REJECTION_BUDGET: usize = 64;

/// A random islanded line metric, its ball chain on the whole set, and
/// random sub-pieces carrying the restricted chain (possibly shortened).
/// The whole set is always the last piece, so the system is directed.
pub fn gen_random_system(seed: u64, caps: RandomCaps) -> Result<RandomSystem, CorpusError> {
    let max = RandomCaps::MAX;
    for (what, got, cap) in [
        ("points", caps.points, max.points),
        ("pieces", caps.pieces, max.pieces),
        ("depth", caps.depth, max.depth),
    ] {
        if got > cap {
            return Err(CorpusError::CapExceeded { what, got, cap });
        }
        if got == 0 {
            return Err(CorpusError::TooSmall { what, min: 1 });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rejections = 0;
    loop {
        let fallback = rejections >= REJECTION_BUDGET;
        match random_candidate(&mut rng, caps, fallback) {
            Ok(system) => {
                return Ok(RandomSystem {
                    system,
                    seed,
                    rejections,
                })
            }
            Err(e) if fallback => return Err(e),
            Err(_) => rejections += 1,
        }
    }
}

fn random_candidate(
    rng: &mut ChaCha8Rng,
    caps: RandomCaps,
    single: bool,
) -> Result<FilteredSystem, CorpusError> {
    let n = rng.gen_range(1..=caps.points);
    let islands = rng.gen_range(1..=n.min(3));
    let mut owner: Vec<usize> = (0..n)
        .map(|p| {
            if p < islands {
                p
            } else {
                rng.gen_range(0..islands)
            }
        })
        .collect();
    owner.sort_unstable();
    let pos: Vec<i64> = (0..n).map(|_| rng.gen_range(0..2 * n as i64 + 1)).collect();
    let ambient = PointSet::numbered(n).expect("n ≥ 1");
    let metric = MetricTarget::from_fn(ambient.clone(), |a, b| {
        if owner[a] == owner[b] {
            Distance::Finite(Rational::from_integer((pos[a] - pos[b]).abs()))
        } else {
            Distance::Infinite
        }
    })
    .expect("islanded line metric");
    let depth = rng.gen_range(1..=caps.depth);
    let mut radii: Vec<i64> = (0..depth).map(|_| rng.gen_range(0..=n as i64)).collect();
    radii.sort_unstable();
    radii.dedup();
    let radii: Vec<Rational> = radii.into_iter().map(Rational::from_integer).collect();
    let full = validate_space(
        ambient.clone(),
        ball_chain(&metric, &Subset::full(n), &radii),
    )?;

    let extra = if single {
        0
    } else {
        rng.gen_range(0..caps.pieces)
    };
    let mut specs = Vec::new();
    for k in 0..extra {
        let mut pts: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        if pts.is_empty() {
            pts.push(rng.gen_range(0..n));
        }
        let carrier = Subset::from_indices(n, pts);
        let restricted = scaled_space::restrict(&full, &carrier)?;
        let keep = rng.gen_range(1..=restricted.depth());
        let space = validate_space(
            restricted.points().clone(),
            restricted.chain()[..keep].to_vec(),
        )?;
        specs.push(PieceSpec {
            name: format!("P{k}"),
            carrier,
            space,
        });
    }
    specs.push(PieceSpec {
        name: "X".into(),
        carrier: Subset::full(n),
        space: full,
    });
    Ok(validate_system(ambient, specs, None)?)
}

/// A random family bounded in `space`: random nonempty subsets of random
/// members of one generator, plus a few singletons.
pub fn random_bounded_family<S: LargeScale + ?Sized, R: Rng>(
    rng: &mut R,
    space: &S,
    members: usize,
) -> Family {
    let n = space.universe();
    let generators = space.generators();
    let (_, g) = generators[rng.gen_range(0..generators.len())];
    let mut out = Family::new(n);
    for _ in 0..members {
        if g.is_empty() || rng.gen_bool(0.2) {
            out.push(Subset::singleton(n, rng.gen_range(0..n)));
            continue;
        }
        let m = &g.members()[rng.gen_range(0..g.len())];
        let pts: Vec<usize> = m.iter().filter(|_| rng.gen_bool(0.7)).collect();
        let sub = if pts.is_empty() {
            Subset::singleton(n, m.first().unwrap_or(0))
        } else {
            Subset::from_indices(n, pts)
        };
        out.push(sub);
    }
    out
}

/// A uniformly random total function table.
pub fn random_map<R: Rng>(rng: &mut R, domain: &PointSet, codomain: &PointSet) -> GroundedMap {
    let table = (0..domain.len())
        .map(|_| rng.gen_range(0..codomain.len()))
        .collect();
    GroundedMap::new(domain.clone(), codomain.clone(), table).expect("random table is total")
}

/// A random subset of `pool`.
pub fn random_subset<R: Rng>(rng: &mut R, universe: usize, pool: &[usize]) -> Subset {
    let mut pts = pool.to_vec();
    pts.shuffle(rng);
    let keep = rng.gen_range(0..=pts.len());
    Subset::from_indices(universe, pts.into_iter().take(keep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colimit::colimit_bounded;
    use crate::families::Family;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from_integer(x)).collect()
    }

    #[test]
    fn c0_one_dimension_is_a_segment() {
        let c = gen_c0(1, 1, &ints(&[1, 2])).unwrap();
        let sys = &c.system;
        assert_eq!(sys.ambient().ids(), ["(-1)", "(0)", "(1)"]);
        assert_eq!(sys.pieces().len(), 1);
        assert_eq!(sys.piece(0).space().depth(), 2);
    }

    #[test]
    fn c0_nested_pieces() {
        let c = gen_c0(2, 1, &ints(&[1, 2, 4])).unwrap();
        let sys = &c.system;
        assert_eq!(sys.ambient().len(), 9);
        assert!(sys.piece(0).carrier().is_subset(sys.piece(1).carrier()));
        assert_eq!(sys.piece(0).carrier().len(), 3);
        assert_eq!(sys.upper(0, 1), 1);
    }

    #[test]
    fn c0_box_zero_is_a_point() {
        let c = gen_c0(3, 0, &ints(&[1])).unwrap();
        assert_eq!(c.system.ambient().len(), 1);
        let f = Family::singletons(1);
        assert!(colimit_bounded(&c.system, &f).is_some());
    }

    #[test]
    fn two_islands_never_bound_a_crossing_pair() {
        let c = gen_disjoint_union(&[path_metric(3), path_metric(3)], &ints(&[1, 2])).unwrap();
        let sys = &c.system;
        assert_eq!(sys.pieces().len(), 3);
        let n = sys.ambient().len();
        for a in 0..3 {
            for b in 3..6 {
                let f =
                    Family::from_members(n, alloc::vec![Subset::from_indices(n, [a, b])]).unwrap();
                assert!(colimit_bounded(sys, &f).is_none());
            }
        }
    }

    #[test]
    fn one_island_is_degenerate() {
        let c = gen_disjoint_union(&[path_metric(4)], &ints(&[1])).unwrap();
        assert_eq!(c.system.pieces().len(), 1);
    }

    #[test]
    fn three_islands_route_through_the_union() {
        let c = gen_disjoint_union(
            &[path_metric(2), path_metric(2), path_metric(2)],
            &ints(&[1]),
        )
        .unwrap();
        let sys = &c.system;
        assert_eq!(sys.pieces().len(), 7);
        // {M0} with {M1, M2} needs the full union
        assert_eq!(sys.upper(0, 5), 6);
        assert_eq!(sys.upper(0, 1), 3);
    }

    #[test]
    fn unit_interval_small() {
        let u = gen_unit_interval(2).unwrap();
        assert_eq!(u.corpus.system.ambient().ids(), ["1/1", "1/2", "1/3"]);
        assert_eq!(u.f.table(), [1, 2, 3]);
        assert_eq!(u.g.table(), [1, 1, 1]);
        assert_eq!(u.piece_codomain().depth(), 3);
        assert_eq!(u.colimit_codomain().depth(), 2);
    }

    #[test]
    fn random_systems_are_deterministic_and_valid() {
        for seed in 0..20 {
            let a = gen_random_system(seed, RandomCaps::MAX).unwrap();
            let b = gen_random_system(seed, RandomCaps::MAX).unwrap();
            assert_eq!(a.system, b.system);
            assert!(a.system.ambient().len() <= 12);
            assert!(a.system.pieces().len() <= 4);
        }
        let one = gen_random_system(
            7,
            RandomCaps {
                pieces: 1,
                ..RandomCaps::MAX
            },
        )
        .unwrap();
        assert_eq!(one.system.pieces().len(), 1);
    }
}
