mod common;

use coarsekit_core::colimit::FilteredSystem;
use coarsekit_core::corpus::{gen_disjoint_union, gen_unit_interval, path_metric};
use coarsekit_core::maps::{
    close_check, coarse_equivalence_check, slowly_oscillating_search, slowly_oscillating_verify,
    GroundedMap, MetricTarget,
};
use coarsekit_core::{Distance, Family, PointSet, Rational};

fn line(n: usize) -> MetricTarget {
    MetricTarget::from_fn(PointSet::numbered(n).unwrap(), |a, b| {
        Distance::Finite(Rational::from_integer((a as i64 - b as i64).abs()))
    })
    .unwrap()
}

/// Colimit witnesses restrict to every piece; piece witnesses lift verbatim.
/// Returns how many witnesses moved each way.
fn transport(
    sys: &FilteredSystem,
    f: &GroundedMap,
    target: &MetricTarget,
    eps: &[Rational],
) -> (usize, usize) {
    let (mut down, mut up) = (0, 0);
    for s in 0..sys.pieces().len() {
        let piece = sys.piece(s);
        let inc = piece.inclusion();
        let fs = f.restrict(inc);
        for level in piece.space().levels() {
            let local = level.family();
            let scale = sys.extend_from_piece(s, local);
            for &e in eps {
                if let Some(b) = slowly_oscillating_search(f, target, sys, &scale, e).unwrap() {
                    down += 1;
                    for t in 0..sys.pieces().len() {
                        let pt = sys.piece(t);
                        let restricted = pt.inclusion().restrict_family(&scale);
                        let bt = pt.inclusion().restrict_subset(&b);
                        let ft = f.restrict(pt.inclusion());
                        assert!(
                            slowly_oscillating_verify(&ft, target, pt.space(), &restricted, e, &bt).is_ok(),
                            "piece {t} rejects the restriction of a colimit witness from piece {s} at eps {e}"
                        );
                    }
                }
                if let Some(bs) =
                    slowly_oscillating_search(&fs, target, piece.space(), local, e).unwrap()
                {
                    up += 1;
                    let b = inc.lift_subset(&bs);
                    assert!(
                        slowly_oscillating_verify(f, target, sys, &scale, e, &b).is_ok(),
                        "colimit rejects the lift of a piece {s} witness at eps {e}"
                    );
                }
            }
        }
    }
    (down, up)
}

#[test]
fn slowly_oscillating_transport_on_islands() {
    let radii = common::ints(&[1, 2, 8]);
    let sys = gen_disjoint_union(&[path_metric(3), path_metric(4), path_metric(2)], &radii)
        .unwrap()
        .system;
    let target = line(12);
    // a jump inside the first island, slow elsewhere
    let f = GroundedMap::from_fn(sys.ambient().clone(), target.points().clone(), |x| {
        let (i, p) = common::island_position(sys.ambient().id(x));
        match (i, p) {
            (0, p) if p >= 2 => 11,
            (_, p) => p as usize,
        }
    })
    .unwrap();
    let eps = [
        Rational::new(1, 2),
        Rational::from_integer(2),
        Rational::from_integer(20),
    ];
    let (down, up) = transport(&sys, &f, &target, &eps);
    assert!(down > 0 && up > 0, "{down} {up}");
}

#[test]
fn slowly_oscillating_transport_on_the_unit_interval() {
    let ui = gen_unit_interval(6).unwrap();
    let eps = [
        Rational::new(1, 2),
        Rational::from_integer(2),
        Rational::from_integer(4),
    ];
    let (down, up) = transport(&ui.corpus.system, &ui.f, &ui.target, &eps);
    assert!(down > 0 && up > 0, "{down} {up}");
}

#[test]
fn reciprocal_on_a_piece_with_an_initial_segment() {
    // near 0 the radius-1/4 balls are long and 1/x spreads them out; b
    // absorbs those members
    let ui = gen_unit_interval(5).unwrap();
    let sys = &ui.corpus.system;
    let s = sys.pieces().len() - 1;
    let piece = sys.piece(s);
    let f = ui.f.restrict(piece.inclusion());
    let scale = piece.space().levels()[0].family();
    let b = slowly_oscillating_search(
        &f,
        &ui.target,
        piece.space(),
        scale,
        Rational::from_integer(2),
    )
    .unwrap()
    .expect("a finite piece is weakly bounded");
    assert!(slowly_oscillating_verify(
        &f,
        &ui.target,
        piece.space(),
        scale,
        Rational::from_integer(2),
        &b
    )
    .is_ok());
    let all = slowly_oscillating_search(
        &f,
        &ui.target,
        piece.space(),
        scale,
        Rational::from_integer(100),
    )
    .unwrap()
    .unwrap();
    assert!(all.is_empty());
}

#[test]
fn closeness_fails_to_pass_to_the_colimit() {
    let ui = gen_unit_interval(12).unwrap();
    let sys = &ui.corpus.system;
    let piece_dst = ui.piece_codomain();
    for (s, piece) in sys.pieces().iter().enumerate() {
        let inc = piece.inclusion();
        let r = close_check(&ui.f.restrict(inc), &ui.g.restrict(inc), &piece_dst).unwrap();
        // X_n reaches f = n + 1, one window of width n covers {1, ..., n + 1}
        assert_eq!(r.level.map(|l| l.index()), Some(s + 1), "piece {s}");
    }
    let r = close_check(&ui.f, &ui.g, &ui.colimit_codomain()).unwrap();
    assert_eq!(r.level, None);
    for (level, x) in r.violations {
        assert_eq!(sys.ambient().id(x), format!("1/{}", level.index() + 2));
    }
}

#[test]
fn collapsing_islands_is_not_an_equivalence() {
    let radii = common::ints(&[1, 2]);
    let sys = gen_disjoint_union(&[path_metric(3), path_metric(3)], &radii)
        .unwrap()
        .system;
    let whole = sys.pieces().last().unwrap().space().clone();
    let n = whole.len();
    let fold = GroundedMap::new(
        whole.points().clone(),
        whole.points().clone(),
        (0..n).map(|x| x % 3).collect(),
    )
    .unwrap();
    let any = GroundedMap::identity(whole.points().clone());
    let r = coarse_equivalence_check(&fold, &any, &whole, &whole).unwrap();
    assert!(!r.is_equivalence());
    assert!(r.gf_close.level.is_none() || r.fg_close.level.is_none());
}

#[test]
fn singleton_scale_never_oscillates() {
    let ui = gen_unit_interval(3).unwrap();
    let n = ui.corpus.system.ambient().len();
    let b = slowly_oscillating_search(
        &ui.f,
        &ui.target,
        &ui.corpus.system,
        &Family::singletons(n),
        Rational::new(1, 100),
    )
    .unwrap();
    assert_eq!(b.map(|b| b.is_empty()), Some(true));
}
