//! Set-family algebra: subsets, families, stars, refinement, multiplicity,
//! chain components and horizons.
//!
//! Points are dense indices `0..n` into a [`PointSet`]. A [`Subset`] remembers
//! the size of its universe so that operations can reject mixed inputs.
//! Families are multisets: duplicate members are kept, since horizon counts
//! rely on them.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("universe mismatch: {left} points vs {right} points")]
    UniverseMismatch { left: usize, right: usize },
    #[error("point set must be non-empty")]
    EmptyPointSet,
    #[error("duplicate point identifier `{0}`")]
    DuplicatePoint(String),
    #[error("point index {index} outside universe of {universe} points")]
    OutOfRange { index: usize, universe: usize },
}

fn same_universe(left: usize, right: usize) -> Result<(), FamilyError> {
    if left == right {
        Ok(())
    } else {
        Err(FamilyError::UniverseMismatch { left, right })
    }
}

/// A finite, non-empty, ordered set of named points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    ids: Vec<String>,
    index: BTreeMap<String, usize>,
}

impl PointSet {
    pub fn new<I, S>(ids: I) -> Result<Self, FamilyError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let ids: Vec<String> = ids.into_iter().map(Into::into).collect();
        if ids.is_empty() {
            return Err(FamilyError::EmptyPointSet);
        }
        let mut index = BTreeMap::new();
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(FamilyError::DuplicatePoint(id.clone()));
            }
        }
        Ok(PointSet { ids, index })
    }

    /// Points named `0, 1, ..., n-1`.
    pub fn numbered(n: usize) -> Result<Self, FamilyError> {
        Self::new((0..n).map(|i| alloc::format!("{i}")))
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, point: usize) -> &str {
        &self.ids[point]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// The point set consisting of the members of `carrier`, in ambient order.
    pub fn sub(&self, carrier: &Subset) -> Result<PointSet, FamilyError> {
        same_universe(self.len(), carrier.universe())?;
        PointSet::new(carrier.iter().map(|p| self.ids[p].clone()))
    }

    pub fn full(&self) -> Subset {
        Subset::full(self.len())
    }
}

/// A subset of a universe of `n` points.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subset {
    bits: FixedBitSet,
}

impl Subset {
    pub fn empty(universe: usize) -> Self {
        Subset {
            bits: FixedBitSet::with_capacity(universe),
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(universe);
        bits.insert_range(..);
        Subset { bits }
    }

    pub fn singleton(universe: usize, point: usize) -> Self {
        let mut s = Self::empty(universe);
        s.insert(point);
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(universe: usize, points: I) -> Self {
        let mut s = Self::empty(universe);
        for p in points {
            s.insert(p);
        }
        s
    }

    /// Like [`Subset::from_indices`] but rejects out-of-range points.
    pub fn try_from_indices<I: IntoIterator<Item = usize>>(
        universe: usize,
        points: I,
    ) -> Result<Self, FamilyError> {
        let mut s = Self::empty(universe);
        for p in points {
            if p >= universe {
                return Err(FamilyError::OutOfRange { index: p, universe });
            }
            s.insert(p);
        }
        Ok(s)
    }

    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    /// # Panics
    /// If `point` is outside the universe.
    pub fn insert(&mut self, point: usize) {
        self.bits.insert(point);
    }

    pub fn remove(&mut self, point: usize) {
        self.bits.set(point, false);
    }

    pub fn contains(&self, point: usize) -> bool {
        self.bits.contains(point)
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn is_singleton(&self) -> bool {
        self.len() == 1
    }

    /// More than one point: the members a large scale structure cares about.
    pub fn is_thick(&self) -> bool {
        let mut ones = self.bits.ones();
        ones.next().is_some() && ones.next().is_some()
    }

    pub fn first(&self) -> Option<usize> {
        self.bits.minimum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn is_subset(&self, other: &Subset) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn meets(&self, other: &Subset) -> bool {
        !self.bits.is_disjoint(&other.bits)
    }

    pub fn union_with(&mut self, other: &Subset) {
        self.bits.union_with(&other.bits);
    }

    pub fn intersect_with(&mut self, other: &Subset) {
        self.bits.intersect_with(&other.bits);
    }

    pub fn difference_with(&mut self, other: &Subset) {
        self.bits.difference_with(&other.bits);
    }

    pub fn union(&self, other: &Subset) -> Subset {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn difference(&self, other: &Subset) -> Subset {
        let mut s = self.clone();
        s.difference_with(other);
        s
    }

    pub fn complement(&self) -> Subset {
        let mut s = Subset::full(self.universe());
        s.difference_with(self);
        s
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn display<'a>(&'a self, points: &'a PointSet) -> DisplaySubset<'a> {
        DisplaySubset {
            subset: self,
            points,
        }
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct DisplaySubset<'a> {
    subset: &'a Subset,
    points: &'a PointSet,
}

impl fmt::Display for DisplaySubset<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, p) in self.subset.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            f.write_str(self.points.id(p))?;
        }
        f.write_str("}")
    }
}

/// A finite multiset of subsets of one universe.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Family {
    universe: usize,
    members: Vec<Subset>,
}

impl Family {
    pub fn new(universe: usize) -> Self {
        Family {
            universe,
            members: Vec::new(),
        }
    }

    pub fn from_members(universe: usize, members: Vec<Subset>) -> Result<Self, FamilyError> {
        for m in &members {
            same_universe(universe, m.universe())?;
        }
        Ok(Family { universe, members })
    }

    pub fn from_index_lists<I, J>(universe: usize, lists: I) -> Result<Self, FamilyError>
    where
        I: IntoIterator<Item = J>,
        J: IntoIterator<Item = usize>,
    {
        let members = lists
            .into_iter()
            .map(|l| Subset::try_from_indices(universe, l))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Family { universe, members })
    }

    /// All singletons `{x}` for `x` in `universe`.
    pub fn singletons(universe: usize) -> Self {
        Family {
            universe,
            members: (0..universe)
                .map(|p| Subset::singleton(universe, p))
                .collect(),
        }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Subset] {
        &self.members
    }

    pub fn into_members(self) -> Vec<Subset> {
        self.members
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Subset> {
        self.members.iter()
    }

    /// # Panics
    /// If the member lives in a different universe.
    pub fn push(&mut self, member: Subset) {
        assert_eq!(member.universe(), self.universe, "family universe mismatch");
        self.members.push(member);
    }

    pub fn extend_from(&mut self, other: &Family) {
        assert_eq!(other.universe, self.universe, "family universe mismatch");
        self.members.extend(other.members.iter().cloned());
    }

    pub fn union_of_members(&self) -> Subset {
        let mut all = Subset::empty(self.universe);
        for m in &self.members {
            all.union_with(m);
        }
        all
    }

    pub fn covers(&self, set: &Subset) -> bool {
        set.is_subset(&self.union_of_members())
    }

    /// First point of the universe not covered by any member.
    pub fn uncovered_point(&self) -> Option<usize> {
        self.union_of_members().complement().first()
    }

    pub fn is_scale(&self) -> bool {
        self.uncovered_point().is_none()
    }

    pub fn thick_members(&self) -> impl Iterator<Item = &Subset> + '_ {
        self.members.iter().filter(|m| m.is_thick())
    }

    /// Largest member cardinality (0 for the empty family).
    pub fn max_member_size(&self) -> usize {
        self.members.iter().map(Subset::len).max().unwrap_or(0)
    }

    /// Some member containing `set`, if any.
    pub fn member_containing(&self, set: &Subset) -> Option<usize> {
        self.members.iter().position(|m| set.is_subset(m))
    }

    pub fn star_of(&self, v: &Subset) -> Subset {
        let mut out = v.clone();
        for m in &self.members {
            if m.meets(v) {
                out.union_with(m);
            }
        }
        out
    }

    pub fn star_each(&self, v: &Family) -> Family {
        Family {
            universe: self.universe,
            members: v.members.iter().map(|m| self.star_of(m)).collect(),
        }
    }

    /// Every member is contained in a member of `coarser`.
    pub fn refines(&self, coarser: &Family) -> bool {
        self.members
            .iter()
            .all(|m| coarser.member_containing(m).is_some())
    }

    /// Every member with more than one point is contained in a member of `coarser`.
    pub fn essentially_refines(&self, coarser: &Family) -> bool {
        self.thick_members()
            .all(|m| coarser.member_containing(m).is_some())
    }

    pub fn multiplicity(&self) -> usize {
        (0..self.universe)
            .map(|p| self.members.iter().filter(|m| m.contains(p)).count())
            .max()
            .unwrap_or(0)
    }

    /// Members meeting `a`, as indices into this family.
    pub fn horizon_indices(&self, a: &Subset) -> Vec<usize> {
        self.members
            .iter()
            .enumerate()
            .filter(|(_, m)| m.meets(a))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn horizon_of(&self, a: &Subset) -> Family {
        Family {
            universe: self.universe,
            members: self
                .members
                .iter()
                .filter(|m| m.meets(a))
                .cloned()
                .collect(),
        }
    }

    /// Members added for every point: the family becomes a scale.
    pub fn trivially_extended(&self) -> Family {
        let mut out = self.clone();
        out.members
            .extend((0..self.universe).map(|p| Subset::singleton(self.universe, p)));
        out
    }

    pub fn without_empty(&self) -> Family {
        Family {
            universe: self.universe,
            members: self
                .members
                .iter()
                .filter(|m| !m.is_empty())
                .cloned()
                .collect(),
        }
    }

    /// Overlap-chain classes of the covered points, ordered by least point.
    pub fn components(&self) -> Vec<Subset> {
        let mut blocks: Vec<Subset> = Vec::new();
        for m in self.members.iter().filter(|m| !m.is_empty()) {
            let mut merged = m.clone();
            blocks.retain(|b| {
                if b.meets(&merged) {
                    merged.union_with(b);
                    false
                } else {
                    true
                }
            });
            blocks.push(merged);
        }
        blocks.sort_by_key(|b| b.first());
        blocks
    }

    /// The same members, sorted; equal as multisets iff `canonical` agrees.
    pub fn canonical(&self) -> Vec<Subset> {
        let mut m = self.members.clone();
        m.sort();
        m
    }

    pub fn display<'a>(&'a self, points: &'a PointSet) -> DisplayFamily<'a> {
        DisplayFamily {
            family: self,
            points,
        }
    }
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.members.iter()).finish()
    }
}

impl<'a> IntoIterator for &'a Family {
    type Item = &'a Subset;
    type IntoIter = core::slice::Iter<'a, Subset>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

pub struct DisplayFamily<'a> {
    family: &'a Family,
    points: &'a PointSet,
}

impl fmt::Display for DisplayFamily<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, m) in self.family.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", m.display(self.points))?;
        }
        f.write_str("}")
    }
}

/// The inclusion of a carrier subset into its ambient universe, with the
/// re-indexing both ways.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inclusion {
    carrier: Subset,
    to_ambient: Vec<usize>,
    to_local: Vec<Option<usize>>,
}

impl Inclusion {
    pub fn new(carrier: Subset) -> Self {
        let to_ambient: Vec<usize> = carrier.iter().collect();
        let mut to_local = alloc::vec![None; carrier.universe()];
        for (local, &p) in to_ambient.iter().enumerate() {
            to_local[p] = Some(local);
        }
        Inclusion {
            carrier,
            to_ambient,
            to_local,
        }
    }

    pub fn carrier(&self) -> &Subset {
        &self.carrier
    }

    pub fn ambient_len(&self) -> usize {
        self.carrier.universe()
    }

    pub fn local_len(&self) -> usize {
        self.to_ambient.len()
    }

    pub fn ambient_point(&self, local: usize) -> usize {
        self.to_ambient[local]
    }

    pub fn local_point(&self, ambient: usize) -> Option<usize> {
        self.to_local[ambient]
    }

    pub fn lift_subset(&self, s: &Subset) -> Subset {
        Subset::from_indices(self.ambient_len(), s.iter().map(|p| self.to_ambient[p]))
    }

    pub fn lift_family(&self, f: &Family) -> Family {
        Family {
            universe: self.ambient_len(),
            members: f.iter().map(|m| self.lift_subset(m)).collect(),
        }
    }

    /// `s ∩ carrier`, re-indexed to the carrier.
    pub fn restrict_subset(&self, s: &Subset) -> Subset {
        Subset::from_indices(self.local_len(), s.iter().filter_map(|p| self.to_local[p]))
    }

    /// Member-wise intersection with the carrier, empty intersections dropped.
    pub fn restrict_family(&self, f: &Family) -> Family {
        Family {
            universe: self.local_len(),
            members: f
                .iter()
                .map(|m| self.restrict_subset(m))
                .filter(|m| !m.is_empty())
                .collect(),
        }
    }

    /// Points of the ambient universe outside the carrier.
    pub fn outside(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.ambient_len()).filter(move |&p| self.to_local[p].is_none())
    }
}

/// `v` together with every member of `u` that meets `v`.
pub fn star_set(v: &Subset, u: &Family) -> Result<Subset, FamilyError> {
    same_universe(v.universe(), u.universe())?;
    Ok(u.star_of(v))
}

pub fn star_family(v: &Family, u: &Family) -> Result<Family, FamilyError> {
    same_universe(v.universe(), u.universe())?;
    Ok(u.star_each(v))
}

pub fn refines(u: &Family, v: &Family) -> Result<bool, FamilyError> {
    same_universe(u.universe(), v.universe())?;
    Ok(u.refines(v))
}

/// Refinement that ignores members with at most one point.
pub fn essentially_refines(u: &Family, v: &Family) -> Result<bool, FamilyError> {
    same_universe(u.universe(), v.universe())?;
    Ok(u.essentially_refines(v))
}

pub fn trivial_extension(u: &Family, x: &PointSet) -> Result<Family, FamilyError> {
    same_universe(u.universe(), x.len())?;
    Ok(u.trivially_extended())
}

pub fn multiplicity(v: &Family) -> usize {
    v.multiplicity()
}

pub fn chain_components(u: &Family, x: &PointSet) -> Result<Vec<Subset>, FamilyError> {
    same_universe(u.universe(), x.len())?;
    Ok(u.components())
}

pub fn horizon(a: &Subset, u: &Family) -> Result<Family, FamilyError> {
    same_universe(a.universe(), u.universe())?;
    Ok(u.horizon_of(a))
}
