//! Seeded region growing by pixel aggregation on binary masks.
//!
//! Regions grow from seeds one point at a time through a system of queues.
//! Three growing processes are provided:
//!
//! * [`Mode::Simple`]: regions partition the reachable part of the mask and
//!   collisions are settled by whichever region arrives first.
//! * [`Mode::VBoundary`]: a one-point-thick boundary region separates the
//!   regions.
//! * [`Mode::Ambiguous`]: the boundary holds exactly the points that are
//!   geodesically equidistant from several nearest seeds, so the result does
//!   not depend on the seed initialisation order.
//!
//! The [`oracle`] module recomputes the same objects by brute force and
//! checks the partition axioms.

pub mod error;
pub mod grid;
pub mod instances;
pub mod growers;
pub mod io;
pub mod oracle;
pub mod order;
pub mod population;
pub mod queues;

pub use error::{Error, Result};
pub use grid::{dilate, erode, neighbors, reachable, Connectivity, GridDomain, Neighborhood, Point, PointSet, Shape};
pub use growers::{
    grow_ambiguous, grow_simple, grow_vboundary, run_with_order, Cause, GrowResult, GrowStats, Grower, Mode,
    NoTrace, Seed, SeedList, TraceEvent, TraceSink,
};
pub use oracle::{
    ambiguous_set, canonical_relabel, decomposition_check, geodesic_distances, influence_zones, is_simple_partition,
    is_v_boundary_partition, CanonicalMap, DistanceMap, PartitionReport,
};
pub use population::{Label, LabelMap, Population, Tribe, TribeKind};
pub use queues::{Discipline, Key, PushOutcome, SystemQueue};
