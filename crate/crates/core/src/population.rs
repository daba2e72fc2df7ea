//! Regions, their zones of influence, and the growth step that keeps both
//! consistent.
//!
//! Every active region `i` owns the zone `Z_i = (X_i ⊕ V) \ ⋃_j X_j`: the
//! unlabeled points of `Ω` adjacent to it. The zone is never stored per
//! region. Instead each point keeps the sorted set of active labels whose
//! zone covers it, updated incrementally on every growth. A point entering a
//! zone for the first time is pushed into the system of queues.

use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::grid::{dilate, GridDomain, Neighborhood, Point, PointSet, Shape, Stencil};
use crate::queues::SystemQueue;

/// Dense region identifier, assigned in creation order from 0.
pub type Label = u32;

const UNLABELED: u32 = u32::MAX;

/// Growth policy of a region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tribe {
    /// Grows through its zone of influence `(X ⊕ V)` minus every region.
    Active(Neighborhood),
    /// Never has a zone of influence; only grows when told to.
    Passive,
}

impl Tribe {
    pub fn kind(&self) -> TribeKind {
        match self {
            Tribe::Active(_) => TribeKind::Active,
            Tribe::Passive => TribeKind::Passive,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TribeKind {
    Active,
    Passive,
}

struct Region {
    tribe: Tribe,
    stencil: Option<Arc<Stencil>>,
    sites: Vec<usize>,
}

type Cover = SmallVec<[Label; 4]>;

pub struct Population<'d> {
    domain: &'d GridDomain,
    labels: Vec<u32>,
    regions: Vec<Region>,
    cover: Vec<Cover>,
    sq: SystemQueue<usize>,
    check_zi: bool,
}

impl<'d> Population<'d> {
    /// Queue entries carry flat indices of `domain`.
    pub fn new(domain: &'d GridDomain, sq: SystemQueue<usize>) -> Self {
        Population {
            domain,
            labels: vec![UNLABELED; domain.len()],
            regions: Vec::new(),
            cover: vec![Cover::new(); domain.len()],
            sq,
            check_zi: false,
        }
    }

    pub fn domain(&self) -> &'d GridDomain {
        self.domain
    }

    /// Recompute every zone from its defining formula after each growth and
    /// fail on any disagreement with the incremental state. O(|Ω|) per step.
    pub fn set_zi_check(&mut self, on: bool) {
        self.check_zi = on;
    }

    pub fn queue(&self) -> &SystemQueue<usize> {
        &self.sq
    }

    pub fn queue_mut(&mut self) -> &mut SystemQueue<usize> {
        &mut self.sq
    }

    pub fn region_count(&self) -> usize {
        self.regions.len()
    }

    pub fn growth_tribe(&mut self, tribe: Tribe) -> Result<Label> {
        let stencil = match &tribe {
            Tribe::Passive => None,
            Tribe::Active(v) => {
                let reuse = self.regions.iter().rev().find_map(|r| match &r.tribe {
                    Tribe::Active(w) if w == v => r.stencil.clone(),
                    _ => None,
                });
                Some(match reuse {
                    Some(s) => s,
                    None => Arc::new(Stencil::new(self.domain, v)?),
                })
            }
        };
        let label = self.regions.len() as Label;
        self.regions.push(Region {
            tribe,
            stencil,
            sites: Vec::new(),
        });
        Ok(label)
    }

    pub fn growth(&mut self, x: &Point, label: Label) -> Result<()> {
        if !self.domain.contains(x)? {
            return Err(Error::OutsideDomain(x.clone()));
        }
        let site = self.domain.index_of(x).expect("member of Ω is in the box");
        self.growth_index(site, label)
    }

    /// [`growth`](Self::growth) addressed by flat index.
    pub fn growth_index(&mut self, site: usize, label: Label) -> Result<()> {
        if site >= self.domain.len() || !self.domain.is_set(site) {
            return Err(Error::OutsideDomain(self.point_or_index(site)));
        }
        if self.labels[site] != UNLABELED {
            return Err(Error::AlreadyLabeled(self.domain.point_of(site)));
        }
        let region = self
            .regions
            .get_mut(label as usize)
            .ok_or(Error::UnknownLabel(label))?;
        self.labels[site] = label;
        region.sites.push(site);
        self.cover[site].clear();

        if let Some(stencil) = region.stencil.clone() {
            let (domain, labels, cover, sq) =
                (self.domain, &self.labels, &mut self.cover, &mut self.sq);
            stencil.for_each_neighbor(site, |y| {
                if !domain.is_set(y) || labels[y] != UNLABELED {
                    return;
                }
                let zi = &mut cover[y];
                if let Err(pos) = zi.binary_search(&label) {
                    zi.insert(pos, label);
                    sq.push(y, label);
                }
            });
        }

        if self.check_zi {
            self.verify_zi()?;
        }
        Ok(())
    }

    fn point_or_index(&self, site: usize) -> Point {
        if site < self.domain.len() {
            self.domain.point_of(site)
        } else {
            Point::new(vec![site as i64])
        }
    }

    /// Sorted labels of the active regions whose zone of influence contains
    /// `x`. Empty for labeled, off-`Ω` and out-of-box points.
    pub fn zi_at(&self, x: &Point) -> &[Label] {
        match self.domain.index_of(x) {
            Some(site) => self.zi_at_index(site),
            None => &[],
        }
    }

    pub fn zi_at_index(&self, site: usize) -> &[Label] {
        &self.cover[site]
    }

    pub fn label_at_index(&self, site: usize) -> Option<Label> {
        match self.labels[site] {
            UNLABELED => None,
            l => Some(l),
        }
    }

    pub fn region_points(&self, label: Label) -> Result<PointSet> {
        let region = self
            .regions
            .get(label as usize)
            .ok_or(Error::UnknownLabel(label))?;
        Ok(region
            .sites
            .iter()
            .map(|&s| self.domain.point_of(s))
            .collect())
    }

    /// Recomputes `Z_j = (X_j ⊕ V) \ ⋃_k X_k` for every active region with
    /// point-set operations and compares it against the incremental cover.
    pub fn verify_zi(&self) -> Result<()> {
        let mut expected: Vec<Vec<Label>> = vec![Vec::new(); self.domain.len()];
        for (label, region) in self.regions.iter().enumerate() {
            let Tribe::Active(v) = &region.tribe else {
                continue;
            };
            let points: PointSet = region
                .sites
                .iter()
                .map(|&s| self.domain.point_of(s))
                .collect();
            for y in dilate(&points, v, self.domain) {
                let site = self.domain.index_of(&y).expect("dilation stays in Ω");
                if self.labels[site] == UNLABELED {
                    expected[site].push(label as Label);
                }
            }
        }
        for (site, want) in expected.into_iter().enumerate() {
            if self.cover[site].as_slice() != want.as_slice() {
                return Err(Error::ZiMismatch {
                    point: self.domain.point_of(site),
                    incremental: self.cover[site].to_vec(),
                    recomputed: want,
                });
            }
        }
        Ok(())
    }

    /// Immutable snapshot of the current labels.
    pub fn labels(&self) -> LabelMap {
        LabelMap {
            shape: self.domain.shape().clone(),
            values: self.labels.clone(),
            tribes: self.regions.iter().map(|r| r.tribe.kind()).collect(),
        }
    }
}

/// Per-point region labels plus the label → tribe table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelMap {
    shape: Shape,
    values: Vec<u32>,
    tribes: Vec<TribeKind>,
}

impl LabelMap {
    /// Builds a map from raw per-point labels (`None` for unlabeled).
    pub fn from_labels(shape: Shape, labels: &[Option<Label>], tribes: Vec<TribeKind>) -> Result<Self> {
        if labels.len() != shape.len() {
            return Err(Error::InvalidDomain(format!(
                "{} labels for a box of {} points",
                labels.len(),
                shape.len()
            )));
        }
        let values = labels
            .iter()
            .map(|l| match l {
                None => Ok(UNLABELED),
                Some(l) if (*l as usize) < tribes.len() => Ok(*l),
                Some(l) => Err(Error::UnknownLabel(*l)),
            })
            .collect::<Result<_>>()?;
        Ok(LabelMap {
            shape,
            values,
            tribes,
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn get(&self, x: &Point) -> Option<Label> {
        self.shape.index_of(x).and_then(|i| self.get_index(i))
    }

    pub fn get_index(&self, index: usize) -> Option<Label> {
        match self.values[index] {
            UNLABELED => None,
            l => Some(l),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn tribes(&self) -> &[TribeKind] {
        &self.tribes
    }

    /// The unique passive label, if there is exactly one.
    pub fn boundary_label(&self) -> Option<Label> {
        let mut passive = self
            .tribes
            .iter()
            .enumerate()
            .filter(|(_, k)| **k == TribeKind::Passive);
        match (passive.next(), passive.next()) {
            (Some((l, _)), None) => Some(l as Label),
            _ => None,
        }
    }

    pub fn region(&self, label: Label) -> PointSet {
        (0..self.values.len())
            .filter(|&i| self.values[i] == label)
            .map(|i| self.shape.point_of(i))
            .collect()
    }

    pub fn unlabeled(&self) -> PointSet {
        (0..self.values.len())
            .filter(|&i| self.values[i] == UNLABELED)
            .map(|i| self.shape.point_of(i))
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = Option<Label>> + '_ {
        (0..self.values.len()).map(|i| self.get_index(i))
    }
}
