//! Shared fixtures: brute-force oracles over bitmasks, instance corpora and
//! witness builders.
#![allow(dead_code)]

use std::collections::BTreeSet;

use coarsekit_core::colimit::FilteredSystem;
use coarsekit_core::corpus::{
    gen_c0, gen_disjoint_union, gen_random_system, gen_unit_interval, path_metric, RandomCaps,
};
use coarsekit_core::invariants::{
    AmenabilityWitness, PartitionOfUnity, PinchWitness, PropertyAFamily,
};
use coarsekit_core::{Bound, Family, Level, Rational, ScaledSpace, Subset};
use num_traits::{One, Zero};
use rand::Rng;

/// Definitional versions of the family operations on `u64` point masks.
pub mod oracle {
    pub fn mask(points: &[usize]) -> u64 {
        points.iter().fold(0, |m, &p| m | (1 << p))
    }

    pub fn star(v: u64, u: &[u64]) -> u64 {
        let mut out = v;
        for &m in u {
            if m & v != 0 {
                out |= m;
            }
        }
        out
    }

    pub fn refines(a: &[u64], b: &[u64]) -> bool {
        a.iter().all(|&x| b.iter().any(|&y| x & !y == 0))
    }

    pub fn essentially_refines(a: &[u64], b: &[u64]) -> bool {
        a.iter()
            .filter(|x| x.count_ones() > 1)
            .all(|&x| b.iter().any(|&y| x & !y == 0))
    }

    pub fn multiplicity(u: &[u64], n: usize) -> usize {
        (0..n)
            .map(|p| u.iter().filter(|&&m| m >> p & 1 == 1).count())
            .max()
            .unwrap_or(0)
    }

    pub fn horizon(a: u64, u: &[u64]) -> Vec<usize> {
        (0..u.len()).filter(|&i| u[i] & a != 0).collect()
    }

    /// Flood fill on the graph "two points share a member".
    pub fn components(u: &[u64], n: usize) -> Vec<u64> {
        let covered = u.iter().fold(0u64, |a, &m| a | m);
        let mut seen = 0u64;
        let mut out = Vec::new();
        for p in 0..n {
            if covered >> p & 1 == 0 || seen >> p & 1 == 1 {
                continue;
            }
            let mut comp = 1u64 << p;
            let mut frontier = vec![p];
            while let Some(q) = frontier.pop() {
                for &m in u {
                    if m >> q & 1 == 1 {
                        let new = m & !comp;
                        comp |= m;
                        (0..n)
                            .filter(|&r| new >> r & 1 == 1)
                            .for_each(|r| frontier.push(r));
                    }
                }
            }
            seen |= comp;
            out.push(comp);
        }
        out
    }
}

pub fn subset_mask(s: &Subset) -> u64 {
    oracle::mask(&s.to_vec())
}

pub fn family_masks(f: &Family) -> Vec<u64> {
    f.iter().map(subset_mask).collect()
}

pub fn subset_of_mask(n: usize, m: u64) -> Subset {
    Subset::from_indices(n, (0..n).filter(|&p| m >> p & 1 == 1))
}

pub fn family_of_masks(n: usize, masks: &[u64]) -> Family {
    Family::from_members(n, masks.iter().map(|&m| subset_of_mask(n, m)).collect()).unwrap()
}

pub fn random_masks<R: Rng>(rng: &mut R, n: usize, max_members: usize) -> Vec<u64> {
    let k = rng.gen_range(0..=max_members);
    (0..k).map(|_| rng.gen_range(0..1u64 << n)).collect()
}

/// Systems the lifting criteria run over: random systems plus the
/// deterministic examples.
pub fn lifting_corpus(random: u64) -> Vec<(String, FilteredSystem)> {
    let mut out = Vec::new();
    for seed in 0..random {
        let r = gen_random_system(seed, RandomCaps::MAX).unwrap();
        out.push((format!("random#{seed}"), r.system));
    }
    for (name, sys) in example2_instances(&ints(&[1, 2, 8])) {
        out.push((name, sys));
    }
    out.push((
        "c0(2,1)".into(),
        gen_c0(2, 1, &ints(&[1, 2, 4])).unwrap().system,
    ));
    out.push((
        "unit_interval(4)".into(),
        gen_unit_interval(4).unwrap().corpus.system,
    ));
    out
}

pub fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| Rational::from_integer(x)).collect()
}

/// Disjoint unions of paths with the given radii.
pub fn example2_instances(radii: &[Rational]) -> Vec<(String, FilteredSystem)> {
    let shapes: [&[usize]; 5] = [&[3, 3], &[4], &[2, 3, 4], &[5, 1], &[3, 4, 2]];
    shapes
        .iter()
        .map(|lens| {
            let islands: Vec<_> = lens.iter().map(|&l| path_metric(l)).collect();
            let sys = gen_disjoint_union(&islands, radii).unwrap().system;
            (format!("islands{lens:?}"), sys)
        })
        .collect()
}

/// Island index and path position of a disjoint-union point id `M{i}:{p}`.
pub fn island_position(id: &str) -> (usize, i64) {
    let (island, pos) = id.trim_start_matches('M').split_once(':').unwrap();
    (island.parse().unwrap(), pos.parse().unwrap())
}

fn top(space: &ScaledSpace) -> (Bound, &Family) {
    let level = Level::from_index(space.depth() - 1);
    (Bound::Level(level), space.top().family())
}

/// `f_M(x) = [x ∈ M] / deg(x)` over the top level; eps just above the
/// largest variation on `input`.
pub fn exactness_witness(
    space: &ScaledSpace,
    input: &Family,
) -> (Rational, PartitionOfUnity, Bound) {
    let (bound, cover) = top(space);
    let n = space.len();
    let deg: Vec<i64> = (0..n)
        .map(|x| cover.iter().filter(|m| m.contains(x)).count() as i64)
        .collect();
    let functions = cover
        .iter()
        .map(|m| {
            (0..n)
                .map(|x| {
                    if m.contains(x) {
                        Rational::new(1, deg[x])
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    let pou = PartitionOfUnity { functions };
    let mut worst = Rational::zero();
    for m in input.thick_members() {
        for x in m.iter() {
            for y in m.iter() {
                worst = worst.max(pou.variation(x, y));
            }
        }
    }
    (worst + Rational::new(1, 10), pou, bound)
}

/// `v` = the top level; eps just above the worst ratio deficit.
pub fn amenability_witness(space: &ScaledSpace, input: &Family) -> AmenabilityWitness {
    let (bound, cover) = top(space);
    let worst = coarsekit_core::invariants::amenability::horizon_counts(input, cover)
        .into_iter()
        .map(|(_, num, den)| Rational::new(num as i64, den as i64))
        .min()
        .unwrap_or_else(Rational::one);
    AmenabilityWitness {
        v: cover.clone(),
        v_bound: bound,
        eps: Rational::one() - worst + Rational::new(1, 10),
    }
}

/// `A_x = st(x, V) × {1, 2}` with `V` the top level.
pub fn property_a_witness(space: &ScaledSpace, input: &Family) -> Option<PropertyAFamily> {
    let (bound, cover) = top(space);
    let n = space.len();
    let cap = 2;
    let sets: Vec<BTreeSet<(usize, usize)>> = (0..n)
        .map(|x| {
            cover
                .star_of(&Subset::singleton(n, x))
                .iter()
                .flat_map(|p| (1..=cap).map(move |k| (p, k)))
                .collect()
        })
        .collect();
    let mut worst = Rational::zero();
    for x in 0..n {
        for y in input.star_of(&Subset::singleton(n, x)).iter() {
            worst = worst.max(coarsekit_core::invariants::property_a::ratio(
                &sets[x], &sets[y],
            )?);
        }
    }
    Some(PropertyAFamily {
        n_cap: cap,
        sets,
        support: cover.clone(),
        support_bound: bound,
        eps: worst + Rational::new(1, 10),
    })
}

/// Points to orthonormal basis vectors, separated only from themselves.
pub fn pinch_basis_witness(space: &ScaledSpace) -> PinchWitness {
    let n = space.len();
    PinchWitness {
        dim: n,
        embedding: (0..n)
            .map(|x| {
                (0..n)
                    .map(|k| {
                        if k == x {
                            Rational::one()
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect()
            })
            .collect(),
        sep: Family::singletons(n),
        sep_bound: Bound::Level(Level::FIRST),
        c: Rational::one(),
        eps: Rational::new(3, 2),
    }
}

/// On a disjoint union of unit paths with radii (1, 2, …): position/2 on
/// the first axis plus one axis per island. Small on radius-1 balls,
/// separated off radius-2 balls.
pub fn pinch_path_witness(space: &ScaledSpace) -> PinchWitness {
    let located: Vec<(usize, i64)> = space
        .points()
        .ids()
        .iter()
        .map(|id| island_position(id))
        .collect();
    let mut islands: Vec<usize> = located.iter().map(|l| l.0).collect();
    islands.sort_unstable();
    islands.dedup();
    let dim = 1 + islands.len();
    let embedding = located
        .iter()
        .map(|&(i, p)| {
            let mut e = vec![Rational::zero(); dim];
            e[0] = Rational::new(p, 2);
            e[1 + islands.binary_search(&i).unwrap()] = Rational::from_integer(2);
            e
        })
        .collect();
    PinchWitness {
        dim,
        embedding,
        sep: space.levels()[1].family().clone(),
        sep_bound: Bound::Level(Level::new(2).unwrap()),
        c: Rational::one(),
        eps: Rational::new(3, 2),
    }
}

/// Colimit inputs built from piece `s`'s level `i`: with every outside
/// singleton, and with none.
pub fn piece_inputs(sys: &FilteredSystem, s: usize, i: usize) -> [Family; 2] {
    let level = sys.piece(s).space().levels()[i].family();
    [
        sys.extend_from_piece(s, level),
        sys.piece(s).inclusion().lift_family(level),
    ]
}
