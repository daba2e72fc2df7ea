//! Random problem instances: Bernoulli masks with small connected seeds.

use crate::grid::{neighbors, Connectivity, GridDomain, Neighborhood, Point};
use crate::growers::{Seed, SeedList};
use crate::order::XorShift64Star;

#[derive(Clone, Debug)]
pub struct Instance {
    pub domain: GridDomain,
    pub seeds: SeedList,
    pub neighborhood: Neighborhood,
}

/// Shape of the random instances.
#[derive(Clone, Debug)]
pub struct InstanceParams {
    /// Inclusive range of each extent.
    pub extent: (usize, usize),
    pub dim: usize,
    /// Inclusive range of the fill fraction.
    pub fill: (f64, f64),
    /// Inclusive range of the seed count.
    pub seeds: (usize, usize),
    /// Inclusive range of points per seed.
    pub seed_size: (usize, usize),
    pub connectivity: Connectivity,
}

impl InstanceParams {
    pub fn planar(max_extent: usize, connectivity: Connectivity) -> Self {
        InstanceParams {
            extent: (4, max_extent),
            dim: 2,
            fill: (0.4, 0.8),
            seeds: (2, 6),
            seed_size: (1, 4),
            connectivity,
        }
    }

    pub fn volumetric(max_extent: usize, connectivity: Connectivity) -> Self {
        InstanceParams {
            extent: (3, max_extent),
            dim: 3,
            ..InstanceParams::planar(max_extent, connectivity)
        }
    }
}

fn between(rng: &mut XorShift64Star, (lo, hi): (usize, usize)) -> usize {
    lo + rng.below((hi - lo + 1) as u64) as usize
}

fn unit(rng: &mut XorShift64Star) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Draws an instance. Seeds are V-connected blobs grown by random
/// accretion; fewer seeds than requested are placed when `Ω` runs out.
pub fn random_instance(params: &InstanceParams, rng: &mut XorShift64Star) -> Instance {
    let neighborhood =
        Neighborhood::standard(params.dim, params.connectivity).expect("connectivity fits dimension");
    let dims: Vec<usize> = (0..params.dim).map(|_| between(rng, params.extent)).collect();
    let fill = params.fill.0 + unit(rng) * (params.fill.1 - params.fill.0);
    let len: usize = dims.iter().product();
    let mut mask: Vec<bool> = (0..len).map(|_| unit(rng) < fill).collect();
    if !mask.iter().any(|&b| b) {
        mask[rng.below(len as u64) as usize] = true;
    }
    let domain = GridDomain::new(dims, mask).expect("valid dims");

    let free: Vec<usize> = (0..len).filter(|&i| domain.is_set(i)).collect();
    let mut taken = vec![false; len];
    let wanted = between(rng, params.seeds);
    let mut seeds = Vec::new();
    for k in 0..wanted {
        let candidates: Vec<usize> = free.iter().copied().filter(|&i| !taken[i]).collect();
        if candidates.is_empty() {
            break;
        }
        let start = candidates[rng.below(candidates.len() as u64) as usize];
        taken[start] = true;
        let mut blob = vec![domain.point_of(start)];
        let size = between(rng, params.seed_size);
        while blob.len() < size {
            let frontier: Vec<Point> = blob
                .iter()
                .flat_map(|p| neighbors(p, &neighborhood))
                .filter(|q| domain.index_of(q).is_some_and(|i| domain.is_set(i) && !taken[i]))
                .collect();
            if frontier.is_empty() {
                break;
            }
            let q = frontier[rng.below(frontier.len() as u64) as usize].clone();
            taken[domain.index_of(&q).expect("frontier is in the box")] = true;
            blob.push(q);
        }
        seeds.push(Seed::new(format!("s{k}"), blob));
    }
    Instance {
        domain,
        seeds: SeedList::new(seeds).expect("generated seeds are valid"),
        neighborhood,
    }
}
