//! Acceptance suite: one line per criterion, non-zero exit on any failure.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use coarsekit_core::colimit::{colimit_star, ColimitError, FilteredSystem};
use coarsekit_core::corpus::{
    gen_random_system, gen_unit_interval, random_bounded_family, random_map, RandomCaps,
};
use coarsekit_core::invariants::amenability::horizon_counts;
use coarsekit_core::invariants::property_a::ratio_at;
use coarsekit_core::invariants::{
    amenability_lift, amenability_verify, apc_probe, apc_verify, asdim_lift, asdim_restrict,
    asdim_search, asdim_verify, exactness_lift, exactness_verify, horizon_decomposition,
    metrizability_generator_check, metrizability_merge, pinch_lift, pinch_pair_cases, pinch_verify,
    property_a_lift, property_a_verify, ApcOutcome, ApcTarget, MergeError, PairCase, SearchMode,
    DEFAULT_TOLERANCE,
};
use coarsekit_core::maps::{bornologous_check, close_check};
use coarsekit_core::{Family, LargeScale, Rational, ScaledSpace};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{family_masks, oracle, subset_mask};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

/// Counts failures and keeps the first few for the report.
#[derive(Default)]
struct Tally {
    cases: usize,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn summary(&self, extra: &str) -> Outcome {
        let mut detail = format!(
            "{} cases, {} failures{extra}",
            self.cases,
            self.failures.len()
        );
        if let Some(first) = self.failures.first() {
            detail.push_str(&format!("; first: {first}"));
        }
        Outcome::new(self.failures.is_empty() && self.cases > 0, detail)
    }
}

fn random_systems(count: u64) -> Vec<FilteredSystem> {
    (0..count)
        .map(|seed| {
            gen_random_system(seed, RandomCaps::MAX)
                .expect("random system")
                .system
        })
        .collect()
}

fn star_closure() -> Outcome {
    let start = Instant::now();
    let mut t = Tally::default();
    let mut truncated = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (seed, sys) in random_systems(200).iter().enumerate() {
        for _ in 0..10 {
            let f = random_bounded_family(&mut rng, sys, 4);
            let g = random_bounded_family(&mut rng, sys, 4);
            match colimit_star(sys, &f, &g) {
                Ok((star, cert)) => t.check(
                    sys.colimit_bounded(&star).is_some() && sys.check_bound(&star, &cert.into()),
                    || format!("system {seed}: star output not bounded"),
                ),
                Err(ColimitError::Truncation { .. }) => truncated += 1,
                Err(e) => t.check(false, || format!("system {seed}: {e}")),
            }
        }
    }
    let elapsed = start.elapsed();
    let mut out = t.summary(&format!(", {truncated} beyond star budget, {elapsed:.2?}"));
    out.pass &= elapsed < Duration::from_secs(60);
    out
}

/// `Some(true)` when every generator lands in the target, else undecided.
fn verdict(report: &coarsekit_core::maps::BornologousReport) -> Option<bool> {
    report.is_bornologous().then_some(true)
}

fn bornologous_restriction() -> Outcome {
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let targets: Vec<ScaledSpace> = (1000..1020)
        .map(|seed| {
            let sys = gen_random_system(seed, RandomCaps::MAX).unwrap().system;
            sys.pieces().last().unwrap().space().clone()
        })
        .collect();
    let mut decided = 0;
    for (seed, sys) in random_systems(200).iter().enumerate() {
        for k in 0..3 {
            let dst = &targets[(seed + k) % targets.len()];
            let f = if k == 0 {
                // collapses everything: always decided
                let p = rng.gen_range(0..dst.len());
                coarsekit_core::maps::GroundedMap::from_fn(
                    sys.ambient().clone(),
                    dst.points().clone(),
                    |_| p,
                )
                .unwrap()
            } else {
                random_map(&mut rng, sys.ambient(), dst.points())
            };
            let colimit = verdict(&bornologous_check(&f, sys, dst).unwrap());
            let pieces: Vec<Option<bool>> = sys
                .pieces()
                .iter()
                .map(|p| {
                    verdict(&bornologous_check(&f.restrict(p.inclusion()), p.space(), dst).unwrap())
                })
                .collect();
            let conj = pieces.iter().all(|v| *v == Some(true)).then_some(true);
            if colimit.is_some() {
                decided += 1;
            }
            t.check(colimit == conj, || {
                format!("system {seed}: colimit {colimit:?}, pieces {pieces:?}")
            });
        }
    }
    t.summary(&format!(", {decided} decided"))
}

fn asdim_lift_restrict() -> Outcome {
    let mut t = Tally::default();
    let mut lifted = 0;
    let mut direct = 0;
    for (name, sys) in common::lifting_corpus(200) {
        if sys.ambient().len() > 12 {
            continue;
        }
        for s in 0..sys.pieces().len() {
            let space = sys.piece(s).space();
            for (i, level) in space.levels().iter().enumerate() {
                let level = level.family();
                for n in 0..=1 {
                    let search = asdim_search(space, n, level, SearchMode::Exhaustive).unwrap();
                    let u = sys.extend_from_piece(s, level);
                    if let Some(w) = &search.witness {
                        lifted += 1;
                        match asdim_lift(&sys, s, n, &u, w) {
                            Ok(lw) => {
                                t.check(asdim_verify(&sys, n, &u, &lw).is_verified(), || {
                                    format!(
                                        "{name} piece {s} level {i} n={n}: lifted witness rejected"
                                    )
                                });
                                let back = asdim_restrict(&sys, s, n, level, &lw);
                                t.check(back.is_ok(), || {
                                    format!("{name} piece {s} level {i} n={n}: restrict {back:?}")
                                });
                            }
                            Err(e) => {
                                t.check(false, || format!("{name} piece {s} level {i} n={n}: {e}"))
                            }
                        }
                    }
                    // a colimit witness found directly must restrict
                    let col = asdim_search(&sys, n, &u, SearchMode::Exhaustive).unwrap();
                    if let Some(cw) = &col.witness {
                        direct += 1;
                        let back = asdim_restrict(&sys, s, n, level, cw);
                        t.check(back.is_ok(), || {
                            format!("{name} piece {s} level {i} n={n}: colimit witness does not restrict: {back:?}")
                        });
                    }
                    t.check(search.witness.is_some() == col.witness.is_some(), || {
                        format!(
                            "{name} piece {s} level {i} n={n}: piece and colimit searches disagree"
                        )
                    });
                }
            }
        }
    }
    t.summary(&format!(
        ", {lifted} piece witnesses lifted, {direct} colimit witnesses restricted"
    ))
}

fn exactness_lifts() -> Outcome {
    let mut t = Tally::default();
    for (name, sys) in common::lifting_corpus(200) {
        for s in 0..sys.pieces().len() {
            let space = sys.piece(s).space();
            for i in 0..space.depth() {
                let local = space.levels()[i].family();
                let (eps, pou, bound) = common::exactness_witness(space, local);
                if !exactness_verify(space, local, eps, &pou, &bound).is_verified() {
                    t.check(false, || {
                        format!("{name} piece {s}: constructed piece witness rejected")
                    });
                    continue;
                }
                for u in common::piece_inputs(&sys, s, i) {
                    match exactness_lift(&sys, s, &u, eps, &pou, &bound) {
                        Ok((lp, lb)) => {
                            let sums =
                                (0..sys.ambient().len()).all(|x| lp.sum_at(x) == Rational::one());
                            t.check(sums, || format!("{name} piece {s}: lifted sums drift"));
                            t.check(
                                exactness_verify(&sys, &u, eps, &lp, &lb).is_verified(),
                                || {
                                    format!(
                                        "{name} piece {s}: lifted partition rejected at eps {eps}"
                                    )
                                },
                            );
                        }
                        Err(e) => t.check(false, || format!("{name} piece {s} level {i}: {e}")),
                    }
                }
            }
        }
    }
    t.summary("")
}

fn pinch_lifts() -> Outcome {
    let mut t = Tally::default();
    let tol = DEFAULT_TOLERANCE;
    let root2 = std::f64::consts::SQRT_2;
    let (mut outside, mut mixed) = (0, 0);
    for (name, sys) in common::example2_instances(&common::ints(&[1, 2, 8])) {
        for s in 0..sys.pieces().len() {
            let space = sys.piece(s).space();
            let input = space.levels()[0].family();
            let witnesses = [
                common::pinch_path_witness(space),
                common::pinch_basis_witness(space),
            ];
            for w in witnesses {
                t.check(pinch_verify(space, input, &w, tol).is_verified(), || {
                    format!("{name} piece {s}: piece witness rejected")
                });
                for u in common::piece_inputs(&sys, s, 0) {
                    let lw = match pinch_lift(&sys, s, &u, &w, tol) {
                        Ok(lw) => lw,
                        Err(e) => {
                            t.check(false, || format!("{name} piece {s}: {e}"));
                            continue;
                        }
                    };
                    t.check(
                        lw.c == Rational::one() && pinch_verify(&sys, &u, &lw, tol).is_verified(),
                        || format!("{name} piece {s}: lifted witness rejected"),
                    );
                    for (x, y, case, d) in pinch_pair_cases(&sys, s, &lw) {
                        match case {
                            PairCase::Outside => {
                                outside += 1;
                                t.check((d - root2).abs() <= 1e-9, || {
                                    format!("{name}: outside pair ({x},{y}) at {d}")
                                });
                            }
                            PairCase::Mixed => {
                                mixed += 1;
                                t.check(d >= 1.0 - 1e-9, || {
                                    format!("{name}: mixed pair ({x},{y}) at {d}")
                                });
                            }
                            PairCase::Inside => {}
                        }
                    }
                }
            }
        }
    }
    t.summary(&format!(", {outside} outside pairs, {mixed} mixed pairs"))
}

fn amenability_lifts() -> Outcome {
    let mut t = Tally::default();
    let mut outside_points = 0;
    for (name, sys) in common::lifting_corpus(200) {
        for s in 0..sys.pieces().len() {
            let space = sys.piece(s).space();
            for i in 0..space.depth() {
                let local = space.levels()[i].family();
                let w = common::amenability_witness(space, local);
                if !amenability_verify(space, local, &w).is_verified() {
                    t.check(false, || {
                        format!("{name} piece {s}: constructed piece witness rejected")
                    });
                    continue;
                }
                for u in common::piece_inputs(&sys, s, i) {
                    let lw = match amenability_lift(&sys, s, &u, &w) {
                        Ok(lw) => lw,
                        Err(e) => {
                            t.check(false, || format!("{name} piece {s}: {e}"));
                            continue;
                        }
                    };
                    t.check(
                        lw.eps == w.eps && amenability_verify(&sys, &u, &lw).is_verified(),
                        || format!("{name} piece {s}: lifted witness rejected"),
                    );
                    let carrier = sys.piece(s).carrier();
                    for (x, num, den) in horizon_counts(&u, &lw.v) {
                        if !carrier.contains(x) {
                            outside_points += 1;
                            t.check(num == den, || {
                                format!("{name} piece {s}: ratio {num}/{den} at outside point {x}")
                            });
                        }
                    }
                    for d in horizon_decomposition(&sys, s, &u, &lw.v, w.v.len()) {
                        t.check(d.holds(), || {
                            format!("{name} piece {s}: decomposition fails at {}", d.x)
                        });
                    }
                }
            }
        }
    }
    t.summary(&format!(", {outside_points} outside points"))
}

fn property_a_lifts() -> Outcome {
    let mut t = Tally::default();
    let mut outside_points = 0;
    let mut skipped = 0;
    for (name, sys) in common::lifting_corpus(200) {
        for s in 0..sys.pieces().len() {
            let space = sys.piece(s).space();
            for i in 0..space.depth() {
                let local = space.levels()[i].family();
                let Some(w) = common::property_a_witness(space, local) else {
                    skipped += 1;
                    continue;
                };
                if !property_a_verify(space, local, &w).is_verified() {
                    t.check(false, || {
                        format!("{name} piece {s}: constructed piece witness rejected")
                    });
                    continue;
                }
                for u in common::piece_inputs(&sys, s, i) {
                    let lw = match property_a_lift(&sys, s, &u, &w) {
                        Ok(lw) => lw,
                        Err(e) => {
                            t.check(false, || format!("{name} piece {s}: {e}"));
                            continue;
                        }
                    };
                    t.check(
                        lw.eps == w.eps && property_a_verify(&sys, &u, &lw).is_verified(),
                        || format!("{name} piece {s}: lifted family rejected"),
                    );
                    let carrier = sys.piece(s).carrier();
                    for x in u
                        .union_of_members()
                        .iter()
                        .filter(|&x| !carrier.contains(x))
                    {
                        outside_points += 1;
                        let r = ratio_at(&u, &lw, x);
                        t.check(r == Some(Rational::zero()), || {
                            format!("{name} piece {s}: ratio {r:?} at {x}")
                        });
                    }
                }
            }
        }
    }
    t.summary(&format!(
        ", {outside_points} outside points, {skipped} inputs without a witness"
    ))
}

fn metrizability_merges() -> Outcome {
    let mut t = Tally::default();
    let (mut merged, mut truncated) = (0, 0);
    let chains = |sys: &FilteredSystem| -> Vec<(usize, Vec<Family>)> {
        (0..sys.pieces().len())
            .map(|s| (s, sys.piece(s).space().chain()))
            .collect()
    };
    // radius 8 swallows every island: the top level absorbs all closures
    for (name, sys) in common::example2_instances(&common::ints(&[1, 2, 8])) {
        match metrizability_merge(&sys, &chains(&sys)) {
            Ok(r) => {
                merged += 1;
                let independent = metrizability_generator_check(&r.families);
                t.check(r.check.passes() && independent.passes(), || {
                    format!("{name}: merged set fails")
                });
            }
            Err(e) => t.check(false, || format!("{name}: {e}")),
        }
    }
    for radii in [&[1][..], &[1, 2]] {
        for (name, sys) in common::example2_instances(&common::ints(radii)) {
            let sets = chains(&sys);
            let deep_enough = sets
                .iter()
                .all(|(_, c)| metrizability_generator_check(c).passes());
            match metrizability_merge(&sys, &sets) {
                Ok(r) => t.check(
                    deep_enough
                        && r.check.passes()
                        && metrizability_generator_check(&r.families).passes(),
                    || format!("{name} radii {radii:?}: merge claims success"),
                ),
                Err(MergeError::PieceFails { .. } | MergeError::Truncation { .. }) => {
                    truncated += 1
                }
                Err(e) => t.check(false, || format!("{name} radii {radii:?}: {e}")),
            }
        }
    }
    let mut out = t.summary(&format!(", {merged} merged, {truncated} truncation errors"));
    out.pass &= truncated > 0;
    out
}

fn unit_interval_counterexample() -> Outcome {
    let start = Instant::now();
    let mut t = Tally::default();
    for n_max in [8, 10] {
        let ui = gen_unit_interval(n_max).unwrap();
        let sys = &ui.corpus.system;
        let piece_dst = ui.piece_codomain();
        for s in 0..sys.pieces().len() {
            let inc = sys.piece(s).inclusion();
            let r = close_check(&ui.f.restrict(inc), &ui.g.restrict(inc), &piece_dst).unwrap();
            t.check(r.level.is_some(), || {
                format!("n_max {n_max}: piece {s} never closes")
            });
        }
        let dst = ui.colimit_codomain();
        let r = close_check(&ui.f, &ui.g, &dst).unwrap();
        t.check(r.level.is_none(), || {
            format!("n_max {n_max}: colimit closes at {:?}", r.level)
        });
        t.check(r.violations.len() == dst.depth(), || {
            format!("n_max {n_max}: missing violations")
        });
        for (level, x) in &r.violations {
            let m = level.index();
            let expected = format!("1/{}", m + 2);
            let got = sys.ambient().id(*x);
            t.check(got == expected, || {
                format!("n_max {n_max}: bound {m} refuted at {got}, not {expected}")
            });
        }
    }
    let elapsed = start.elapsed();
    let mut out = t.summary(&format!(", {elapsed:.2?}"));
    out.pass &= elapsed < Duration::from_secs(5);
    out
}

fn oracle_equivalence() -> Outcome {
    let n = 6;
    let mut t = Tally::default();
    let all: Vec<u64> = (0..1u64 << n).collect();
    let fam = |m: &[u64]| common::family_of_masks(n, m);
    // exhaustive: every family of at most two members against every subset
    let mut small: Vec<Vec<u64>> = vec![vec![]];
    small.extend(all.iter().map(|&a| vec![a]));
    for &a in &all {
        for &b in &all {
            small.push(vec![a, b]);
        }
    }
    for u in &small {
        let f = fam(u);
        t.check(f.multiplicity() == oracle::multiplicity(u, n), || {
            format!("multiplicity {u:?}")
        });
        let comps: Vec<u64> = f.components().iter().map(subset_mask).collect();
        t.check(comps == oracle::components(u, n), || {
            format!("components {u:?}")
        });
        for &v in &all {
            let s = common::subset_of_mask(n, v);
            t.check(subset_mask(&f.star_of(&s)) == oracle::star(v, u), || {
                format!("star {v:b} {u:?}")
            });
            t.check(f.horizon_indices(&s) == oracle::horizon(v, u), || {
                format!("horizon {v:b} {u:?}")
            });
        }
    }
    // refinement: one member against two, exhaustively
    for a in &all {
        let fa = fam(&[*a]);
        for u in small.iter().step_by(3) {
            let fu = fam(u);
            t.check(fa.refines(&fu) == oracle::refines(&[*a], u), || {
                format!("refines {a:b} {u:?}")
            });
            t.check(fu.refines(&fa) == oracle::refines(u, &[*a]), || {
                format!("refines {u:?} {a:b}")
            });
            t.check(
                fa.essentially_refines(&fu) == oracle::essentially_refines(&[*a], u),
                || format!("essentially refines {a:b} {u:?}"),
            );
        }
    }
    // sampled larger families
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..20_000 {
        let u = common::random_masks(&mut rng, n, 6);
        let w = common::random_masks(&mut rng, n, 6);
        let v = rng.gen_range(0..1u64 << n);
        let (fu, fw) = (fam(&u), fam(&w));
        let s = common::subset_of_mask(n, v);
        t.check(subset_mask(&fu.star_of(&s)) == oracle::star(v, &u), || {
            format!("star {v:b} {u:?}")
        });
        t.check(fu.refines(&fw) == oracle::refines(&u, &w), || {
            format!("refines {u:?} {w:?}")
        });
        t.check(
            fu.essentially_refines(&fw) == oracle::essentially_refines(&u, &w),
            || format!("essentially refines {u:?} {w:?}"),
        );
        t.check(fu.multiplicity() == oracle::multiplicity(&u, n), || {
            format!("multiplicity {u:?}")
        });
        t.check(fu.horizon_indices(&s) == oracle::horizon(v, &u), || {
            format!("horizon {u:?}")
        });
        let comps: Vec<u64> = fu.components().iter().map(subset_mask).collect();
        t.check(comps == oracle::components(&u, n), || {
            format!("components {u:?}")
        });
        let star_each = fw.star_each(&fu);
        let expected: Vec<u64> = u.iter().map(|&m| oracle::star(m, &w)).collect();
        t.check(family_masks(&star_each) == expected, || {
            format!("star family {u:?} {w:?}")
        });
    }
    t.summary("")
}

fn horizon_monotonicity() -> Outcome {
    let n = 8;
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let b = rng.gen_range(0..1u64 << n);
        let a = b & rng.gen_range(0..1u64 << n);
        let u = common::random_masks(&mut rng, n, 5);
        // a coarsening of u: grow each member, then add extra members
        let mut v: Vec<u64> = u
            .iter()
            .map(|&m| m | rng.gen_range(0..1u64 << n) & rng.gen_range(0..1u64 << n))
            .collect();
        v.extend(common::random_masks(&mut rng, n, 2));
        let (sa, sb) = (common::subset_of_mask(n, a), common::subset_of_mask(n, b));
        let (fu, fv) = (
            common::family_of_masks(n, &u),
            common::family_of_masks(n, &v),
        );
        assert!(fu.refines(&fv));
        // 1: literal, on member indices
        let (ha, hb) = (fu.horizon_indices(&sa), fu.horizon_indices(&sb));
        t.check(ha.iter().all(|i| hb.contains(i)), || {
            format!("clause 1: {a:b} {b:b} {u:?}")
        });
        // 2 and 3: every member of the smaller horizon fits in a member of the larger
        let hau = fu.horizon_of(&sa);
        t.check(hau.refines(&fv.horizon_of(&sa)), || {
            format!("clause 2: {a:b} {u:?} {v:?}")
        });
        t.check(hau.refines(&fv.horizon_of(&sb)), || {
            format!("clause 3: {a:b} {b:b} {u:?} {v:?}")
        });
        // literal form when u is a sub-family of the coarser one
        let mut sup = u.clone();
        sup.extend(&v);
        let hsup = common::family_of_masks(n, &sup).horizon_indices(&sb);
        t.check(ha.iter().all(|i| hsup.contains(i)), || {
            format!("sub-family: {a:b} {b:b} {u:?}")
        });
    }
    t.summary("")
}

fn apc_reports() -> Outcome {
    let mut t = Tally::default();
    let (mut found, mut undecided) = (0, 0);
    for (seed, sys) in random_systems(60).iter().enumerate() {
        let report = apc_probe(sys, 3, 64);
        t.check(report.consistent(sys), || {
            format!("system {seed}: a found witness does not re-verify")
        });
        for e in &report.entries {
            match &e.outcome {
                ApcOutcome::Found(w) => {
                    found += 1;
                    let target: &dyn LargeScale = match e.target {
                        ApcTarget::Piece(s) => sys.piece(s).space(),
                        ApcTarget::Colimit { .. } => sys,
                    };
                    let v = apc_verify(target, &e.prefix, w);
                    t.check(v.is_verified(), || format!("system {seed}: {v}"));
                }
                ApcOutcome::Undecided { .. } => undecided += 1,
            }
        }
    }
    t.summary(&format!(
        ", {found} found, {undecided} undecided, no negative verdicts by construction"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("colimit star closure", star_closure),
        (
            "bornologous restriction equivalence",
            bornologous_restriction,
        ),
        ("asdim lift and restrict", asdim_lift_restrict),
        ("exactness lift", exactness_lifts),
        ("pinch lift", pinch_lifts),
        ("amenability lift", amenability_lifts),
        ("property A lift", property_a_lifts),
        ("metrizability merge", metrizability_merges),
        ("closeness counterexample", unit_interval_counterexample),
        ("oracle equivalence", oracle_equivalence),
        ("horizon monotonicity", horizon_monotonicity),
        ("APC probe consistency", apc_reports),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let out = run();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {:>2} {name}: {}", i + 1, out.detail);
        failed += usize::from(!out.pass);
    }
    println!(
        "{} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
