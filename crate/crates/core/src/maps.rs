//! Checks on maps between truncated spaces: bornologous, close, coarse
//! equivalence, and slowly oscillating maps into a finite metric target.

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::families::{Family, FamilyError, Inclusion, PointSet, Subset};
use crate::rational::{Distance, Rational};
use crate::scaled_space::{Level, ScaledSpace};
use crate::structure::{self, Bound, LargeScale};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("map is not total: no image for `{0}`")]
    NotTotal(String),
    #[error("image of `{from}` is outside the codomain")]
    OutsideCodomain { from: String },
    #[error("maps do not share domain and codomain")]
    Mismatch,
    #[error("metric is not {0}")]
    BadMetric(&'static str),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// A total function table between two point sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundedMap {
    domain: PointSet,
    codomain: PointSet,
    table: Vec<usize>,
}

impl GroundedMap {
    pub fn new(domain: PointSet, codomain: PointSet, table: Vec<usize>) -> Result<Self, MapError> {
        if table.len() != domain.len() {
            let missing = domain.id(table.len().min(domain.len().saturating_sub(1)));
            return Err(MapError::NotTotal(missing.into()));
        }
        if let Some(x) = table.iter().position(|&y| y >= codomain.len()) {
            return Err(MapError::OutsideCodomain {
                from: domain.id(x).into(),
            });
        }
        Ok(GroundedMap {
            domain,
            codomain,
            table,
        })
    }

    pub fn from_fn(
        domain: PointSet,
        codomain: PointSet,
        f: impl Fn(usize) -> usize,
    ) -> Result<Self, MapError> {
        let table = (0..domain.len()).map(f).collect();
        Self::new(domain, codomain, table)
    }

    pub fn identity(points: PointSet) -> Self {
        let table = (0..points.len()).collect();
        GroundedMap {
            domain: points.clone(),
            codomain: points,
            table,
        }
    }

    pub fn domain(&self) -> &PointSet {
        &self.domain
    }

    pub fn codomain(&self) -> &PointSet {
        &self.codomain
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    pub fn image(&self, s: &Subset) -> Subset {
        Subset::from_indices(self.codomain.len(), s.iter().map(|x| self.table[x]))
    }

    pub fn image_family(&self, f: &Family) -> Family {
        Family::from_members(
            self.codomain.len(),
            f.iter().map(|m| self.image(m)).collect(),
        )
        .expect("images live in the codomain")
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &GroundedMap) -> Result<GroundedMap, MapError> {
        if first.codomain.ids() != self.domain.ids() {
            return Err(MapError::Mismatch);
        }
        let table = first.table.iter().map(|&y| self.table[y]).collect();
        Ok(GroundedMap {
            domain: first.domain.clone(),
            codomain: self.codomain.clone(),
            table,
        })
    }

    /// The map restricted to a carrier of its domain.
    pub fn restrict(&self, inclusion: &Inclusion) -> GroundedMap {
        let domain = self
            .domain
            .sub(inclusion.carrier())
            .expect("carrier over the map's domain");
        let table = (0..inclusion.local_len())
            .map(|p| self.table[inclusion.ambient_point(p)])
            .collect();
        GroundedMap {
            domain,
            codomain: self.codomain.clone(),
            table,
        }
    }
}

/// A finite metric (∞ allowed) on a point set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricTarget {
    points: PointSet,
    dist: Vec<Vec<Distance>>,
}

impl MetricTarget {
    /// Validates symmetry, zero diagonal, non-negativity and the triangle
    /// inequality on finite entries.
    #[allow(clippy::needless_range_loop)]
    pub fn new(points: PointSet, dist: Vec<Vec<Distance>>) -> Result<Self, MapError> {
        let n = points.len();
        if dist.len() != n || dist.iter().any(|row| row.len() != n) {
            return Err(MapError::BadMetric("square over its points"));
        }
        for i in 0..n {
            if dist[i][i] != Distance::zero() {
                return Err(MapError::BadMetric("zero on the diagonal"));
            }
            for j in 0..n {
                if dist[i][j] != dist[j][i] {
                    return Err(MapError::BadMetric("symmetric"));
                }
                if dist[i][j].is_negative() {
                    return Err(MapError::BadMetric("non-negative"));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if let (Some(a), Some(b), Some(c)) = (
                        dist[i][j].finite(),
                        dist[j][k].finite(),
                        dist[i][k].finite(),
                    ) {
                        if c > a + b {
                            return Err(MapError::BadMetric("a metric (triangle inequality)"));
                        }
                    }
                }
            }
        }
        Ok(MetricTarget { points, dist })
    }

    pub fn from_fn(
        points: PointSet,
        d: impl Fn(usize, usize) -> Distance,
    ) -> Result<Self, MapError> {
        let n = points.len();
        let dist = (0..n).map(|i| (0..n).map(|j| d(i, j)).collect()).collect();
        Self::new(points, dist)
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn dist(&self, a: usize, b: usize) -> Distance {
        self.dist[a][b]
    }

    pub fn rows(&self) -> &[Vec<Distance>] {
        &self.dist
    }

    /// Closed ball of radius `r` around `center`.
    pub fn ball(&self, center: usize, r: Rational) -> Subset {
        Subset::from_indices(
            self.points.len(),
            (0..self.points.len()).filter(|&q| self.dist[center][q] <= Distance::Finite(r)),
        )
    }

    /// The scale of all closed balls of radius `r`.
    pub fn balls(&self, r: Rational) -> Family {
        let members = (0..self.points.len()).map(|c| self.ball(c, r)).collect();
        Family::from_members(self.points.len(), members).expect("balls live in the point set")
    }

    /// Largest pairwise distance; infinite as soon as one pair is.
    pub fn diameter(&self, s: &Subset) -> Distance {
        let pts = s.to_vec();
        let mut best = Distance::zero();
        for (k, &a) in pts.iter().enumerate() {
            for &b in &pts[k + 1..] {
                let d = self.dist[a][b];
                if d > best {
                    best = d;
                }
            }
        }
        best
    }
}

/// Image bound of each generating family of the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BornologousReport {
    pub entries: Vec<(Bound, Option<Level>)>,
}

impl BornologousReport {
    /// Every generator maps into some level of the target.
    pub fn is_bornologous(&self) -> bool {
        self.entries.iter().all(|(_, l)| l.is_some())
    }

    pub fn undecided(&self) -> impl Iterator<Item = &Bound> + '_ {
        self.entries
            .iter()
            .filter(|(_, l)| l.is_none())
            .map(|(b, _)| b)
    }
}

/// For each generator `U` of `src`, the least `dst` level bounding `f(U')`,
/// where `U'` is the trivial extension of `U`.
pub fn bornologous_check<S: LargeScale + ?Sized>(
    f: &GroundedMap,
    src: &S,
    dst: &ScaledSpace,
) -> Result<BornologousReport, MapError> {
    if f.domain.ids() != src.points().ids() || f.codomain.ids() != dst.points().ids() {
        return Err(MapError::Mismatch);
    }
    let entries = src
        .generators()
        .into_iter()
        .map(|(bound, g)| {
            (
                bound,
                dst.is_bounded(&f.image_family(&g.trivially_extended())),
            )
        })
        .collect();
    Ok(BornologousReport { entries })
}

/// Least level plus, for every level that fails, the first violating point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CloseReport {
    pub level: Option<Level>,
    pub violations: Vec<(Level, usize)>,
}

/// Least `dst` level `j` such that every `{f(x), g(x)}` lies in one member
/// of the trivially extended `U_j`.
pub fn close_check(
    f: &GroundedMap,
    g: &GroundedMap,
    dst: &ScaledSpace,
) -> Result<CloseReport, MapError> {
    if f.domain.ids() != g.domain.ids()
        || f.codomain.ids() != g.codomain.ids()
        || f.codomain.ids() != dst.points().ids()
    {
        return Err(MapError::Mismatch);
    }
    let n = dst.len();
    let mut level = None;
    let mut violations = Vec::new();
    for (i, scale) in dst.levels().iter().enumerate() {
        let here = Level::from_index(i);
        let bad = (0..f.domain.len()).find(|&x| {
            let (a, b) = (f.apply(x), g.apply(x));
            a != b
                && scale
                    .member_containing(&Subset::from_indices(n, [a, b]))
                    .is_none()
        });
        match bad {
            Some(x) => violations.push((here, x)),
            None => {
                level.get_or_insert(here);
            }
        }
    }
    Ok(CloseReport { level, violations })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoarseEquivalenceReport {
    pub f_bornologous: BornologousReport,
    pub g_bornologous: BornologousReport,
    /// `g ∘ f` against `id_a`, measured in `a`.
    pub gf_close: CloseReport,
    /// `f ∘ g` against `id_b`, measured in `b`.
    pub fg_close: CloseReport,
}

impl CoarseEquivalenceReport {
    pub fn is_equivalence(&self) -> bool {
        self.f_bornologous.is_bornologous()
            && self.g_bornologous.is_bornologous()
            && self.gf_close.level.is_some()
            && self.fg_close.level.is_some()
    }
}

pub fn coarse_equivalence_check(
    f: &GroundedMap,
    g: &GroundedMap,
    a: &ScaledSpace,
    b: &ScaledSpace,
) -> Result<CoarseEquivalenceReport, MapError> {
    let gf = g.after(f)?;
    let fg = f.after(g)?;
    Ok(CoarseEquivalenceReport {
        f_bornologous: bornologous_check(f, a, b)?,
        g_bornologous: bornologous_check(g, b, a)?,
        gf_close: close_check(&gf, &GroundedMap::identity(a.points().clone()), a)?,
        fg_close: close_check(&fg, &GroundedMap::identity(b.points().clone()), b)?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OscillationRejection {
    #[error("the exceptional set is not weakly bounded")]
    NotWeaklyBounded,
    #[error("member {member} is not inside the exceptional set and has image diameter {diameter}")]
    Oscillates { member: usize, diameter: Distance },
    #[error(transparent)]
    Map(#[from] MapError),
}

fn check_target(f: &GroundedMap, target: &MetricTarget, src: &PointSet) -> Result<(), MapError> {
    if f.domain.ids() != src.ids() || f.codomain.ids() != target.points.ids() {
        return Err(MapError::Mismatch);
    }
    Ok(())
}

/// `b` is weakly bounded and every member of `scale` not inside `b` has image
/// diameter `< eps`.
pub fn slowly_oscillating_verify<S: LargeScale + ?Sized>(
    f: &GroundedMap,
    target: &MetricTarget,
    src: &S,
    scale: &Family,
    eps: Rational,
    b: &Subset,
) -> Result<(), OscillationRejection> {
    check_target(f, target, src.points())?;
    if !structure::weakly_bounded(src, b) {
        return Err(OscillationRejection::NotWeaklyBounded);
    }
    for (member, u) in scale.iter().enumerate() {
        if u.is_subset(b) {
            continue;
        }
        let diameter = target.diameter(&f.image(u));
        if !diameter.below(eps) {
            return Err(OscillationRejection::Oscillates { member, diameter });
        }
    }
    Ok(())
}

/// Tries `∅`, the union of the offending members, and its stars against each
/// generator. Incomplete: `None` means "no witness found".
pub fn slowly_oscillating_search<S: LargeScale + ?Sized>(
    f: &GroundedMap,
    target: &MetricTarget,
    src: &S,
    scale: &Family,
    eps: Rational,
) -> Result<Option<Subset>, MapError> {
    check_target(f, target, src.points())?;
    let n = src.universe();
    let mut bad = Subset::empty(n);
    for u in scale {
        if !target.diameter(&f.image(u)).below(eps) {
            bad.union_with(u);
        }
    }
    let mut candidates = alloc::vec![bad.clone()];
    for (_, g) in src.generators() {
        candidates.push(g.star_of(&bad));
    }
    Ok(candidates
        .into_iter()
        .find(|b| slowly_oscillating_verify(f, target, src, scale, eps, b).is_ok()))
}
