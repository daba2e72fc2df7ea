//! The three growing processes: geodesic dilation without a boundary, with a
//! dividing boundary region, and with a boundary made of ambiguous points.
//!
//! All three share one skeleton. A single FIFO bucket receives a couple
//! `(x, i)` whenever `x` enters the zone of influence of region `i`; off-mask
//! couples are filtered by the queue metric. Seeds are created and grown in
//! list order (the initialisation order), then couples are popped until the
//! bucket is empty. A popped couple whose point was labeled in the meantime is
//! stale and skipped. The modes differ only in where a fresh point goes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{neighbors, GridDomain, Neighborhood, Point, PointSet};
use crate::population::{Label, LabelMap, Population, Tribe};
use crate::queues::{Discipline, Key, SystemQueue};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Every point joins the region that reaches it first.
    Simple,
    /// Points reached by two or more zones become boundary.
    VBoundary,
    /// A multiply-covered point becomes boundary only when the popped label
    /// is the smallest label covering it.
    Ambiguous,
}

impl Mode {
    pub fn has_boundary(self) -> bool {
        !matches!(self, Mode::Simple)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Simple => "simple",
            Mode::VBoundary => "vboundary",
            Mode::Ambiguous => "ambiguous",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simple" => Ok(Mode::Simple),
            "vboundary" => Ok(Mode::VBoundary),
            "ambiguous" => Ok(Mode::Ambiguous),
            other => Err(Error::Format(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seed {
    pub id: String,
    pub points: Vec<Point>,
}

impl Seed {
    pub fn new(id: impl Into<String>, points: Vec<Point>) -> Self {
        Seed {
            id: id.into(),
            points,
        }
    }
}

/// Ordered seeds. The order is the region initialisation order.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SeedList(Vec<Seed>);

impl SeedList {
    /// Ids must be unique and every seed must have at least one point.
    pub fn new(seeds: Vec<Seed>) -> Result<Self> {
        let mut ids = std::collections::BTreeSet::new();
        for s in &seeds {
            if s.points.is_empty() {
                return Err(Error::EmptySeed(s.id.clone()));
            }
            if !ids.insert(s.id.as_str()) {
                return Err(Error::DuplicateSeedId(s.id.clone()));
            }
        }
        Ok(SeedList(seeds))
    }

    pub fn seeds(&self) -> &[Seed] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ids(&self) -> Vec<String> {
        self.0.iter().map(|s| s.id.clone()).collect()
    }

    /// Union of all seed points.
    pub fn all_points(&self) -> PointSet {
        self.0.iter().flat_map(|s| s.points.iter().cloned()).collect()
    }

    /// Seeds rearranged so that position `k` holds seed `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Result<SeedList> {
        crate::order::check_permutation(order, self.0.len())?;
        Ok(SeedList(order.iter().map(|&k| self.0[k].clone()).collect()))
    }

    /// Checks that every seed point lies in `Ω` and no point belongs to two
    /// seeds (or twice to one).
    pub fn validate(&self, domain: &GridDomain) -> Result<()> {
        self.owners(domain).map(|_| ())
    }

    /// Flat index → index of the owning seed.
    fn owners(&self, domain: &GridDomain) -> Result<Vec<Option<usize>>> {
        let mut owner: Vec<Option<usize>> = vec![None; domain.len()];
        for (k, seed) in self.0.iter().enumerate() {
            for p in &seed.points {
                let inside = domain.contains(p).map_err(|_| Error::SeedOutsideDomain {
                    id: seed.id.clone(),
                    point: p.clone(),
                })?;
                if !inside {
                    return Err(Error::SeedOutsideDomain {
                        id: seed.id.clone(),
                        point: p.clone(),
                    });
                }
                let site = domain.index_of(p).expect("member of Ω is in the box");
                if let Some(other) = owner[site] {
                    return Err(Error::OverlappingSeeds {
                        id: seed.id.clone(),
                        other: self.0[other].id.clone(),
                        point: p.clone(),
                    });
                }
                owner[site] = Some(k);
            }
        }
        Ok(owner)
    }

    /// Fails if a point of one seed is a V-neighbor of a point of another.
    pub fn check_separated(&self, domain: &GridDomain, v: &Neighborhood) -> Result<()> {
        let owner = self.owners(domain)?;
        for (k, seed) in self.0.iter().enumerate() {
            for p in &seed.points {
                for q in neighbors(p, v) {
                    if let Some(Some(j)) = domain.index_of(&q).map(|i| owner[i]) {
                        if j != k {
                            return Err(Error::AdjacentSeeds {
                                first: seed.id.clone(),
                                second: self.0[j].id.clone(),
                                point: q,
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// What happened at one trace step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cause {
    /// Initial growth of a seed point.
    Seed,
    /// Growth of the popped region.
    Region,
    /// Growth of the boundary region.
    Boundary,
    /// Stale couple discarded; nothing grew.
    Skip,
}

/// `step` counts growths so far (a skip carries the count of the growth
/// before it). `site` is a flat index into the domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub step: u64,
    pub site: usize,
    pub label: Label,
    pub cause: Cause,
}

pub trait TraceSink {
    fn record(&mut self, event: TraceEvent);
}

impl TraceSink for Vec<TraceEvent> {
    fn record(&mut self, event: TraceEvent) {
        self.push(event);
    }
}

/// Discards every event.
pub struct NoTrace;

impl TraceSink for NoTrace {
    fn record(&mut self, _event: TraceEvent) {}
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GrowStats {
    pub pops: u64,
    pub skips: u64,
    pub growths: u64,
    pub boundary_growths: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowResult {
    pub mode: Mode,
    pub labels: LabelMap,
    /// Label → seed id; `None` for the boundary label.
    pub label_ids: Vec<Option<String>>,
    pub boundary: Option<Label>,
    /// Seed ids in the caller's list order, independent of the
    /// initialisation order actually used.
    pub seed_order: Vec<String>,
    pub stats: GrowStats,
}

impl GrowResult {
    pub fn seed_id(&self, label: Label) -> Option<&str> {
        self.label_ids.get(label as usize)?.as_deref()
    }

    pub fn label_of_seed(&self, id: &str) -> Option<Label> {
        self.label_ids
            .iter()
            .position(|l| l.as_deref() == Some(id))
            .map(|l| l as Label)
    }

    pub fn boundary_points(&self) -> PointSet {
        self.boundary
            .map(|b| self.labels.region(b))
            .unwrap_or_default()
    }

    /// Region grown from seed `id`, empty if there is no such seed.
    pub fn region_of_seed(&self, id: &str) -> PointSet {
        self.label_of_seed(id)
            .map(|l| self.labels.region(l))
            .unwrap_or_default()
    }

    /// Regions in `seed_order`.
    pub fn seed_regions(&self) -> Vec<PointSet> {
        self.seed_order
            .iter()
            .map(|id| self.region_of_seed(id))
            .collect()
    }
}

/// Configured growing process.
#[derive(Clone, Copy, Debug)]
pub struct Grower {
    mode: Mode,
    check_zi: bool,
}

impl Grower {
    pub fn new(mode: Mode) -> Self {
        Grower {
            mode,
            check_zi: false,
        }
    }

    /// Recompute the zones of influence from scratch after every growth and
    /// fail on mismatch. Quadratic; meant for small instances.
    pub fn check_zi(mut self, on: bool) -> Self {
        self.check_zi = on;
        self
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn run(&self, domain: &GridDomain, seeds: &SeedList, v: &Neighborhood) -> Result<GrowResult> {
        self.run_traced(domain, seeds, v, &mut NoTrace)
    }

    /// Runs with `seeds` reordered by `order` (a permutation of seed
    /// indices). Seed ids and `seed_order` refer to the original list.
    pub fn run_with_order(
        &self,
        domain: &GridDomain,
        seeds: &SeedList,
        v: &Neighborhood,
        order: &[usize],
    ) -> Result<GrowResult> {
        let reordered = seeds.permuted(order)?;
        let mut result = self.run(domain, &reordered, v)?;
        result.seed_order = seeds.ids();
        Ok(result)
    }

    pub fn run_traced(
        &self,
        domain: &GridDomain,
        seeds: &SeedList,
        v: &Neighborhood,
        sink: &mut impl TraceSink,
    ) -> Result<GrowResult> {
        if self.mode == Mode::VBoundary {
            seeds.check_separated(domain, v)?;
        } else {
            seeds.validate(domain)?;
        }

        let mut pop = Population::new(domain, binary_image_queue(domain));
        pop.set_zi_check(self.check_zi);
        let mut stats = GrowStats::default();
        let mut label_ids = Vec::new();

        let boundary = if self.mode.has_boundary() {
            label_ids.push(None);
            Some(pop.growth_tribe(Tribe::Passive)?)
        } else {
            None
        };

        for seed in seeds.seeds() {
            let label = pop.growth_tribe(Tribe::Active(v.clone()))?;
            label_ids.push(Some(seed.id.clone()));
            for p in &seed.points {
                let site = domain.index_of(p).expect("validated seed");
                pop.growth_index(site, label)?;
                stats.growths += 1;
                sink.record(TraceEvent {
                    step: stats.growths,
                    site,
                    label,
                    cause: Cause::Seed,
                });
            }
        }

        pop.queue_mut().select_queue(0);
        while !pop.queue().empty() {
            let (x, i) = pop.queue_mut().pop()?;
            stats.pops += 1;
            if pop.label_at_index(x).is_some() {
                stats.skips += 1;
                sink.record(TraceEvent {
                    step: stats.growths,
                    site: x,
                    label: i,
                    cause: Cause::Skip,
                });
                continue;
            }
            let zi = pop.zi_at_index(x);
            let to_boundary = match self.mode {
                Mode::Simple => false,
                Mode::VBoundary => zi.len() >= 2,
                Mode::Ambiguous => zi.len() >= 2 && zi[0] == i,
            };
            let (label, cause) = match (to_boundary, boundary) {
                (true, Some(b)) => (b, Cause::Boundary),
                _ => (i, Cause::Region),
            };
            pop.growth_index(x, label)?;
            stats.growths += 1;
            if cause == Cause::Boundary {
                stats.boundary_growths += 1;
            }
            sink.record(TraceEvent {
                step: stats.growths,
                site: x,
                label,
                cause,
            });
        }

        Ok(GrowResult {
            mode: self.mode,
            labels: pop.labels(),
            label_ids,
            boundary,
            seed_order: seeds.ids(),
            stats,
        })
    }
}

/// One FIFO bucket, metric 0 on the mask and OUT elsewhere.
fn binary_image_queue(domain: &GridDomain) -> SystemQueue<usize> {
    let mask = domain.mask().to_vec();
    SystemQueue::new(
        move |&x: &usize, _| if mask[x] { Key::Bucket(0) } else { Key::Out },
        Discipline::Fifo,
    )
}

pub fn grow_simple(domain: &GridDomain, seeds: &SeedList, v: &Neighborhood) -> Result<GrowResult> {
    Grower::new(Mode::Simple).run(domain, seeds, v)
}

pub fn grow_vboundary(domain: &GridDomain, seeds: &SeedList, v: &Neighborhood) -> Result<GrowResult> {
    Grower::new(Mode::VBoundary).run(domain, seeds, v)
}

pub fn grow_ambiguous(domain: &GridDomain, seeds: &SeedList, v: &Neighborhood) -> Result<GrowResult> {
    Grower::new(Mode::Ambiguous).run(domain, seeds, v)
}

pub fn run_with_order(
    mode: Mode,
    domain: &GridDomain,
    seeds: &SeedList,
    v: &Neighborhood,
    order: &[usize],
) -> Result<GrowResult> {
    Grower::new(mode).run_with_order(domain, seeds, v, order)
}
