//! Ground truth computed by brute force: geodesic (graph) distances,
//! influence zones, ambiguous points, and the partition validators.
//!
//! Nothing here goes through the population or the queue system; distances
//! come from a plain breadth-first search over point sets.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};
use crate::grid::{erode, neighbors, reachable, GridDomain, Neighborhood, Point, PointSet, Shape};
use crate::growers::{GrowResult, GrowStats, Mode, SeedList};
use crate::population::{Label, LabelMap, TribeKind};

const INFINITY: u32 = u32::MAX;

/// Per-point geodesic distance to a source set; `None` when unreachable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMap {
    shape: Shape,
    values: Vec<u32>,
}

impl DistanceMap {
    pub fn get(&self, x: &Point) -> Option<u32> {
        self.shape.index_of(x).and_then(|i| self.get_index(i))
    }

    pub fn get_index(&self, index: usize) -> Option<u32> {
        match self.values[index] {
            INFINITY => None,
            d => Some(d),
        }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }
}

/// Multi-source unit-step shortest paths over the V-adjacency graph of `Ω`.
pub fn geodesic_distances(
    domain: &GridDomain,
    source: &PointSet,
    v: &Neighborhood,
) -> Result<DistanceMap> {
    let mut values = vec![INFINITY; domain.len()];
    let mut queue = VecDeque::new();
    for s in source {
        if !domain.contains(s)? {
            return Err(Error::OutsideDomain(s.clone()));
        }
        let i = domain.index_of(s).expect("member of Ω is in the box");
        values[i] = 0;
        queue.push_back(s.clone());
    }
    while let Some(x) = queue.pop_front() {
        let d = values[domain.index_of(&x).expect("queued points are in the box")];
        for y in neighbors(&x, v) {
            if let Some(j) = domain.index_of(&y) {
                if domain.is_set(j) && values[j] == INFINITY {
                    values[j] = d + 1;
                    queue.push_back(y);
                }
            }
        }
    }
    Ok(DistanceMap {
        shape: domain.shape().clone(),
        values,
    })
}

fn seed_distances(domain: &GridDomain, seeds: &SeedList, v: &Neighborhood) -> Result<Vec<DistanceMap>> {
    seeds.validate(domain)?;
    seeds
        .seeds()
        .iter()
        .map(|s| geodesic_distances(domain, &s.points.iter().cloned().collect(), v))
        .collect()
}

/// Where a point falls in the zones / ambiguous-set decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Nearest {
    Unreachable,
    Unique(usize),
    Tie,
}

fn classify(maps: &[DistanceMap], index: usize) -> Nearest {
    let mut best = INFINITY;
    let mut who = Nearest::Unreachable;
    for (k, m) in maps.iter().enumerate() {
        let d = m.values[index];
        if d == INFINITY {
            continue;
        }
        if d < best {
            best = d;
            who = Nearest::Unique(k);
        } else if d == best {
            who = Nearest::Tie;
        }
    }
    who
}

/// `z(s_i)`: points strictly closer to seed `i` than to every other seed,
/// one set per seed in list order.
pub fn influence_zones(domain: &GridDomain, seeds: &SeedList, v: &Neighborhood) -> Result<Vec<PointSet>> {
    let maps = seed_distances(domain, seeds, v)?;
    let mut zones = vec![PointSet::new(); seeds.len()];
    for i in 0..domain.len() {
        if let Nearest::Unique(k) = classify(&maps, i) {
            zones[k].insert(domain.point_of(i));
        }
    }
    Ok(zones)
}

/// Points whose smallest seed distance is attained by two or more seeds.
pub fn ambiguous_set(domain: &GridDomain, seeds: &SeedList, v: &Neighborhood) -> Result<PointSet> {
    let maps = seed_distances(domain, seeds, v)?;
    Ok((0..domain.len())
        .filter(|&i| classify(&maps, i) == Nearest::Tie)
        .map(|i| domain.point_of(i))
        .collect())
}

/// The zones and the ambiguous set as a label map: the ambiguous set is the
/// passive label 0, zone `k` is label `k + 1`.
pub fn oracle_labels(domain: &GridDomain, seeds: &SeedList, v: &Neighborhood) -> Result<GrowResult> {
    let maps = seed_distances(domain, seeds, v)?;
    let labels: Vec<Option<Label>> = (0..domain.len())
        .map(|i| match classify(&maps, i) {
            Nearest::Unreachable => None,
            Nearest::Tie => Some(0),
            Nearest::Unique(k) => Some(k as Label + 1),
        })
        .collect();
    let mut tribes = vec![TribeKind::Passive];
    tribes.extend(std::iter::repeat_n(TribeKind::Active, seeds.len()));
    let mut label_ids = vec![None];
    label_ids.extend(seeds.ids().into_iter().map(Some));
    Ok(GrowResult {
        mode: Mode::Ambiguous,
        labels: LabelMap::from_labels(domain.shape().clone(), &labels, tribes)?,
        label_ids,
        boundary: Some(0),
        seed_order: seeds.ids(),
        stats: GrowStats::default(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axiom {
    /// The blocks (and boundary) cover the universe exactly.
    Cover,
    /// Blocks are pairwise disjoint.
    Disjoint,
    /// `(X_i ⊕ V) ∩ X_j = ∅` for distinct blocks.
    Separation,
    /// `X_b ⊖ V = ∅`.
    Thickness,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::Cover => "cover",
            Axiom::Disjoint => "disjoint",
            Axiom::Separation => "separation",
            Axiom::Thickness => "thickness",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub axiom: Axiom,
    /// Offending block indices, when the axiom is about a pair.
    pub blocks: Option<(usize, usize)>,
    pub witnesses: PointSet,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartitionReport {
    pub violations: Vec<Violation>,
}

impl PartitionReport {
    pub fn verdict(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, axiom: Axiom) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }
}

impl fmt::Display for PartitionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.verdict() {
            return writeln!(f, "partition: ok");
        }
        writeln!(f, "partition: {} violation(s)", self.violations.len())?;
        for v in &self.violations {
            write!(f, "  {}", v.axiom)?;
            if let Some((i, j)) = v.blocks {
                write!(f, " blocks {i},{j}")?;
            }
            write!(f, ":")?;
            const SHOWN: usize = 8;
            for p in v.witnesses.iter().take(SHOWN) {
                write!(f, " {p}")?;
            }
            if v.witnesses.len() > SHOWN {
                write!(f, " … ({} total)", v.witnesses.len())?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn cover_violations(parts: &[&PointSet], universe: &PointSet, out: &mut Vec<Violation>) {
    let union: PointSet = parts.iter().flat_map(|b| b.iter().cloned()).collect();
    let gaps: PointSet = universe.difference(&union).cloned().collect();
    let excess: PointSet = union.difference(universe).cloned().collect();
    for witnesses in [gaps, excess] {
        if !witnesses.is_empty() {
            out.push(Violation {
                axiom: Axiom::Cover,
                blocks: None,
                witnesses,
            });
        }
    }
}

fn disjoint_violations(parts: &[&PointSet], out: &mut Vec<Violation>) {
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            let shared: PointSet = parts[i].intersection(parts[j]).cloned().collect();
            if !shared.is_empty() {
                out.push(Violation {
                    axiom: Axiom::Disjoint,
                    blocks: Some((i, j)),
                    witnesses: shared,
                });
            }
        }
    }
}

/// Union of the blocks is the universe and the blocks are pairwise disjoint.
pub fn is_simple_partition(blocks: &[PointSet], universe: &PointSet) -> PartitionReport {
    let parts: Vec<&PointSet> = blocks.iter().collect();
    let mut violations = Vec::new();
    cover_violations(&parts, universe, &mut violations);
    disjoint_violations(&parts, &mut violations);
    PartitionReport { violations }
}

/// Blocks plus boundary cover the universe, distinct blocks are not
/// V-adjacent, and the boundary is one point thick.
///
/// Dilations are not clipped to any domain, so the check does not need the
/// original mask.
pub fn is_v_boundary_partition(
    blocks: &[PointSet],
    boundary: &PointSet,
    v: &Neighborhood,
    universe: &PointSet,
) -> PartitionReport {
    let mut parts: Vec<&PointSet> = blocks.iter().collect();
    parts.push(boundary);
    let mut violations = Vec::new();
    cover_violations(&parts, universe, &mut violations);
    disjoint_violations(&parts, &mut violations);

    for i in 0..blocks.len() {
        let grown = dilate_unbounded(&blocks[i], v);
        for (j, other) in blocks.iter().enumerate() {
            if i == j {
                continue;
            }
            let touched: PointSet = grown.intersection(other).cloned().collect();
            if !touched.is_empty() {
                violations.push(Violation {
                    axiom: Axiom::Separation,
                    blocks: Some((i, j)),
                    witnesses: touched,
                });
            }
        }
    }

    let core = erode(boundary, v);
    if !core.is_empty() {
        violations.push(Violation {
            axiom: Axiom::Thickness,
            blocks: None,
            witnesses: core,
        });
    }
    PartitionReport { violations }
}

fn dilate_unbounded(s: &PointSet, v: &Neighborhood) -> PointSet {
    let mut out = s.clone();
    for x in s {
        out.extend(neighbors(x, v));
    }
    out
}

/// Zones and the ambiguous set are pairwise disjoint and together cover
/// exactly the part of `Ω` reachable from the seeds.
pub fn decomposition_check(domain: &GridDomain, seeds: &SeedList, v: &Neighborhood) -> Result<bool> {
    let mut parts = influence_zones(domain, seeds, v)?;
    parts.push(ambiguous_set(domain, seeds, v)?);
    let universe = reachable(domain, &seeds.all_points(), v)?;
    Ok(is_simple_partition(&parts, &universe).verdict())
}

/// Reserved canonical value for unlabeled points.
pub const CANONICAL_UNLABELED: u32 = 0;
/// Reserved canonical value for the boundary.
pub const CANONICAL_BOUNDARY: u32 = 1;

/// A label map keyed by seed identity instead of run-local labels.
///
/// Seed ids are sorted; seed `ids[k]` is stored as `k + 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalMap {
    shape: Shape,
    ids: Vec<String>,
    values: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CanonicalLabel<'a> {
    Unlabeled,
    Boundary,
    Seed(&'a str),
}

impl CanonicalMap {
    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn get_index(&self, index: usize) -> CanonicalLabel<'_> {
        match self.values[index] {
            CANONICAL_UNLABELED => CanonicalLabel::Unlabeled,
            CANONICAL_BOUNDARY => CanonicalLabel::Boundary,
            k => CanonicalLabel::Seed(&self.ids[(k - 2) as usize]),
        }
    }

    pub fn get(&self, x: &Point) -> Option<CanonicalLabel<'_>> {
        self.shape.index_of(x).map(|i| self.get_index(i))
    }

    /// Points where the two maps assign different seeds (or boundary /
    /// unlabeled status).
    pub fn diff(&self, other: &CanonicalMap) -> PointSet {
        if self.shape != other.shape {
            return (0..self.shape.len()).map(|i| self.shape.point_of(i)).collect();
        }
        (0..self.values.len())
            .filter(|&i| self.get_index(i) != other.get_index(i))
            .map(|i| self.shape.point_of(i))
            .collect()
    }
}

pub fn canonical_relabel(result: &GrowResult) -> CanonicalMap {
    let mut ids: Vec<String> = result.label_ids.iter().flatten().cloned().collect();
    ids.sort();
    let table: Vec<u32> = result
        .label_ids
        .iter()
        .map(|id| match id {
            None => CANONICAL_BOUNDARY,
            Some(id) => ids.binary_search(id).expect("id is in the table") as u32 + 2,
        })
        .collect();
    let values = result
        .labels
        .iter()
        .map(|l| l.map_or(CANONICAL_UNLABELED, |l| table[l as usize]))
        .collect();
    CanonicalMap {
        shape: result.labels.shape().clone(),
        ids,
        values,
    }
}
