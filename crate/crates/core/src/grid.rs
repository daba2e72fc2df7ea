//! Discrete space primitives: lattice points, binary domains, neighborhoods
//! and the Minkowski operations built on them.
//!
//! Storage is row-major with the last axis varying fastest. A 2D point is
//! `(row, col)`; a 3D point is `(z, y, x)`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported grid dimension.
pub const MAX_DIM: usize = 8;

/// Integer lattice coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<i64>);

impl Point {
    pub fn new(coords: Vec<i64>) -> Self {
        Point(coords)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Component-wise sum. Both points must have the same dimension.
    pub fn translate(&self, offset: &Point) -> Point {
        debug_assert_eq!(self.dim(), offset.dim());
        Point(self.0.iter().zip(&offset.0).map(|(a, b)| a + b).collect())
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl<const N: usize> From<[i64; N]> for Point {
    fn from(coords: [i64; N]) -> Self {
        Point(coords.to_vec())
    }
}

impl From<Vec<i64>> for Point {
    fn from(coords: Vec<i64>) -> Self {
        Point(coords)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A set of lattice points with deterministic (lexicographic) iteration.
pub type PointSet = BTreeSet<Point>;

/// Standard grid connectivities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Connectivity {
    Four,
    Eight,
    Six,
    TwentySix,
}

impl Connectivity {
    pub fn from_count(count: u32) -> Option<Self> {
        match count {
            4 => Some(Connectivity::Four),
            8 => Some(Connectivity::Eight),
            6 => Some(Connectivity::Six),
            26 => Some(Connectivity::TwentySix),
            _ => None,
        }
    }

    pub fn count(self) -> u32 {
        match self {
            Connectivity::Four => 4,
            Connectivity::Eight => 8,
            Connectivity::Six => 6,
            Connectivity::TwentySix => 26,
        }
    }

    fn dimension(self) -> usize {
        match self {
            Connectivity::Four | Connectivity::Eight => 2,
            Connectivity::Six | Connectivity::TwentySix => 3,
        }
    }
}

/// A finite set of nonzero offsets defining adjacency.
///
/// Offsets are kept sorted lexicographically; that order is the enumeration
/// order of [`neighbors`] and of every propagation step in the engine.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Neighborhood {
    dim: usize,
    offsets: Vec<Point>,
}

impl Neighborhood {
    pub fn new(offsets: Vec<Point>) -> Result<Self> {
        let Some(first) = offsets.first() else {
            return Err(Error::InvalidNeighborhood(
                "at least one offset is required".into(),
            ));
        };
        let dim = first.dim();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidNeighborhood(format!(
                "dimension {dim} is outside 1..={MAX_DIM}"
            )));
        }
        let mut sorted = offsets;
        if let Some(bad) = sorted.iter().find(|o| o.dim() != dim) {
            return Err(Error::InvalidNeighborhood(format!(
                "offset {bad} does not have dimension {dim}"
            )));
        }
        if sorted.iter().any(Point::is_origin) {
            return Err(Error::InvalidNeighborhood(
                "the zero offset is not allowed".into(),
            ));
        }
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidNeighborhood(format!(
                "offset {} appears twice",
                w[0]
            )));
        }
        Ok(Neighborhood {
            dim,
            offsets: sorted,
        })
    }

    pub fn standard(dim: usize, connectivity: Connectivity) -> Result<Self> {
        if connectivity.dimension() != dim {
            return Err(Error::UnsupportedConnectivity {
                dim,
                connectivity: connectivity.count(),
            });
        }
        let full = matches!(connectivity, Connectivity::Eight | Connectivity::TwentySix);
        let mut offsets = Vec::new();
        let mut cur = vec![-1i64; dim];
        loop {
            let l1: i64 = cur.iter().map(|c| c.abs()).sum();
            if l1 != 0 && (full || l1 == 1) {
                offsets.push(Point(cur.clone()));
            }
            // odometer over {-1,0,1}^dim
            let mut axis = dim;
            loop {
                if axis == 0 {
                    return Neighborhood::new(offsets);
                }
                axis -= 1;
                if cur[axis] < 1 {
                    cur[axis] += 1;
                    break;
                }
                cur[axis] = -1;
            }
        }
    }

    /// The two-point neighborhood `{-1, +1}` on a line.
    pub fn line() -> Self {
        Neighborhood {
            dim: 1,
            offsets: vec![Point(vec![-1]), Point(vec![1])],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn offsets(&self) -> &[Point] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }
}

/// `x + v` for every offset, in the neighborhood's enumeration order.
/// No domain filtering is applied.
pub fn neighbors(x: &Point, v: &Neighborhood) -> Vec<Point> {
    v.offsets.iter().map(|o| x.translate(o)).collect()
}

/// Extents of an n-dimensional box with row-major flat indexing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Shape {
    dims: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl Shape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.len() > MAX_DIM {
            return Err(Error::InvalidDomain(format!(
                "dimension {} is outside 1..={MAX_DIM}",
                dims.len()
            )));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidDomain(format!(
                "extents must be positive, got {dims:?}"
            )));
        }
        let len = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::InvalidDomain("box size overflows".into()))?;
        let mut strides = vec![1usize; dims.len()];
        for axis in (0..dims.len() - 1).rev() {
            strides[axis] = strides[axis + 1] * dims[axis + 1];
        }
        Ok(Shape { dims, strides, len })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    /// Number of points in the box.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub(crate) fn strides(&self) -> &[usize] {
        &self.strides
    }

    /// Flat index of an in-box point.
    pub fn index_of(&self, x: &Point) -> Option<usize> {
        if x.dim() != self.dim() {
            return None;
        }
        let mut idx = 0usize;
        for ((&c, &d), &s) in x.coords().iter().zip(&self.dims).zip(&self.strides) {
            if c < 0 || c as u64 >= d as u64 {
                return None;
            }
            idx += c as usize * s;
        }
        Some(idx)
    }

    pub fn point_of(&self, index: usize) -> Point {
        debug_assert!(index < self.len);
        Point(
            self.dims
                .iter()
                .zip(&self.strides)
                .map(|(&d, &s)| ((index / s) % d) as i64)
                .collect(),
        )
    }
}

/// A dense n-dimensional binary mask; `Ω` is the set of in-box points whose
/// mask value is set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridDomain {
    shape: Shape,
    mask: Vec<bool>,
}

impl GridDomain {
    pub fn new(dims: Vec<usize>, mask: Vec<bool>) -> Result<Self> {
        let shape = Shape::new(dims)?;
        if mask.len() != shape.len() {
            return Err(Error::InvalidDomain(format!(
                "mask has {} entries, box {:?} has {}",
                mask.len(),
                shape.dims(),
                shape.len()
            )));
        }
        Ok(GridDomain { shape, mask })
    }

    /// Domain whose mask is set everywhere in the box.
    pub fn full(dims: Vec<usize>) -> Result<Self> {
        let shape = Shape::new(dims)?;
        let mask = vec![true; shape.len()];
        Ok(GridDomain { shape, mask })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dims(&self) -> &[usize] {
        self.shape.dims()
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    /// Number of points in the box.
    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Membership in `Ω`. Errors if the point's dimension differs from the
    /// domain's.
    pub fn contains(&self, x: &Point) -> Result<bool> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                point: x.clone(),
                expected: self.dim(),
                got: x.dim(),
            });
        }
        Ok(self.index_of(x).is_some_and(|i| self.mask[i]))
    }

    /// Like [`contains`](Self::contains) but a dimension mismatch is simply
    /// "not a member".
    pub(crate) fn holds(&self, x: &Point) -> bool {
        self.contains(x).unwrap_or(false)
    }

    pub fn index_of(&self, x: &Point) -> Option<usize> {
        self.shape.index_of(x)
    }

    pub fn point_of(&self, index: usize) -> Point {
        self.shape.point_of(index)
    }

    /// Mask value at a flat index.
    pub fn is_set(&self, index: usize) -> bool {
        self.mask[index]
    }

    /// Points of `Ω` in storage order.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len())
            .filter(|&i| self.mask[i])
            .map(|i| self.point_of(i))
    }

    /// `|Ω|`
    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }
}

/// `(S ∪ S⊕V) ∩ Ω`
pub fn dilate(s: &PointSet, v: &Neighborhood, within: &GridDomain) -> PointSet {
    let mut out = PointSet::new();
    for x in s {
        if within.holds(x) {
            out.insert(x.clone());
        }
        for y in neighbors(x, v) {
            if within.holds(&y) {
                out.insert(y);
            }
        }
    }
    out
}

/// `{x ∈ S : x + v ∈ S for every v ∈ V}`
pub fn erode(s: &PointSet, v: &Neighborhood) -> PointSet {
    s.iter()
        .filter(|x| v.offsets().iter().all(|o| s.contains(&x.translate(o))))
        .cloned()
        .collect()
}

/// Points of `Ω` joined to some seed by a V-path inside `Ω`.
pub fn reachable(domain: &GridDomain, seeds: &PointSet, v: &Neighborhood) -> Result<PointSet> {
    let mut seen = vec![false; domain.len()];
    let mut queue = VecDeque::new();
    for s in seeds {
        if !domain.contains(s)? {
            return Err(Error::OutsideDomain(s.clone()));
        }
        let i = domain.index_of(s).expect("member of Ω is in the box");
        if !seen[i] {
            seen[i] = true;
            queue.push_back(s.clone());
        }
    }
    while let Some(x) = queue.pop_front() {
        for y in neighbors(&x, v) {
            if let Some(j) = domain.index_of(&y) {
                if domain.is_set(j) && !seen[j] {
                    seen[j] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    Ok((0..domain.len())
        .filter(|&i| seen[i])
        .map(|i| domain.point_of(i))
        .collect())
}

/// Precomputed neighbor expansion over flat indices for one domain shape and
/// one neighborhood. Enumeration order is the neighborhood's offset order;
/// out-of-box neighbors are skipped.
#[derive(Clone, Debug)]
pub(crate) struct Stencil {
    dims: Vec<usize>,
    strides: Vec<usize>,
    offsets: Vec<(Vec<i64>, isize)>,
}

impl Stencil {
    pub(crate) fn new(domain: &GridDomain, v: &Neighborhood) -> Result<Self> {
        if v.dim() != domain.dim() {
            return Err(Error::InvalidNeighborhood(format!(
                "neighborhood has dimension {}, domain has {}",
                v.dim(),
                domain.dim()
            )));
        }
        let strides = domain.shape().strides().to_vec();
        let offsets = v
            .offsets()
            .iter()
            .map(|o| {
                let delta = o
                    .coords()
                    .iter()
                    .zip(&strides)
                    .map(|(&c, &s)| c as isize * s as isize)
                    .sum();
                (o.coords().to_vec(), delta)
            })
            .collect();
        Ok(Stencil {
            dims: domain.dims().to_vec(),
            strides,
            offsets,
        })
    }

    #[inline]
    pub(crate) fn for_each_neighbor(&self, index: usize, mut f: impl FnMut(usize)) {
        let mut coords = [0i64; MAX_DIM];
        for (axis, (&d, &s)) in self.dims.iter().zip(&self.strides).enumerate() {
            coords[axis] = ((index / s) % d) as i64;
        }
        'offsets: for (comps, delta) in &self.offsets {
            for (axis, &c) in comps.iter().enumerate() {
                let moved = coords[axis] + c;
                if moved < 0 || moved >= self.dims[axis] as i64 {
                    continue 'offsets;
                }
            }
            f((index as isize + delta) as usize);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set<const N: usize>(pts: &[[i64; N]]) -> PointSet {
        pts.iter().map(|&p| Point::from(p)).collect()
    }

    fn line_with_hole(len: usize, hole: usize) -> GridDomain {
        let mut mask = vec![true; len];
        mask[hole] = false;
        GridDomain::new(vec![len], mask).unwrap()
    }

    #[test]
    fn contains_reads_mask_and_box() {
        let line = GridDomain::full(vec![7]).unwrap();
        assert!(line.contains(&Point::from([3])).unwrap());
        assert!(!line.contains(&Point::from([7])).unwrap());
        assert!(!line.contains(&Point::from([-1])).unwrap());

        let mut mask = vec![true; 9];
        mask[4] = false;
        let square = GridDomain::new(vec![3, 3], mask).unwrap();
        assert!(!square.contains(&Point::from([1, 1])).unwrap());
        assert!(square.contains(&Point::from([1, 2])).unwrap());
    }

    #[test]
    fn contains_rejects_wrong_dimension() {
        let line = GridDomain::full(vec![7]).unwrap();
        assert!(matches!(
            line.contains(&Point::from([1, 1])),
            Err(Error::DimensionMismatch { expected: 1, got: 2, .. })
        ));
    }

    #[test]
    fn domain_rejects_bad_shapes() {
        assert!(GridDomain::new(vec![2, 2], vec![true; 3]).is_err());
        assert!(GridDomain::new(vec![0, 2], vec![]).is_err());
        assert!(GridDomain::new(vec![], vec![]).is_err());
    }

    #[test]
    fn index_round_trip_is_row_major() {
        let d = GridDomain::full(vec![2, 3, 4]).unwrap();
        assert_eq!(d.index_of(&Point::from([0, 0, 1])), Some(1));
        assert_eq!(d.index_of(&Point::from([0, 1, 0])), Some(4));
        assert_eq!(d.index_of(&Point::from([1, 0, 0])), Some(12));
        for i in 0..d.len() {
            assert_eq!(d.index_of(&d.point_of(i)), Some(i));
        }
    }

    #[test]
    fn neighbors_follow_offset_order() {
        assert_eq!(
            neighbors(&Point::from([3]), &Neighborhood::line()),
            vec![Point::from([2]), Point::from([4])]
        );
        let four = Neighborhood::standard(2, Connectivity::Four).unwrap();
        assert_eq!(
            neighbors(&Point::from([0, 0]), &four),
            vec![
                Point::from([-1, 0]),
                Point::from([0, -1]),
                Point::from([0, 1]),
                Point::from([1, 0])
            ]
        );
        let eight = Neighborhood::standard(2, Connectivity::Eight).unwrap();
        let around = neighbors(&Point::from([1, 1]), &eight);
        assert_eq!(around.len(), 8);
        let expected: PointSet = (0..3)
            .flat_map(|r| (0..3).map(move |c| Point::from([r, c])))
            .filter(|p| *p != Point::from([1, 1]))
            .collect();
        assert_eq!(around.into_iter().collect::<PointSet>(), expected);
    }

    #[test]
    fn standard_neighborhoods() {
        let four = Neighborhood::standard(2, Connectivity::Four).unwrap();
        assert_eq!(four.offsets(), set(&[[-1, 0], [0, -1], [0, 1], [1, 0]]).into_iter().collect::<Vec<_>>());
        let eight = Neighborhood::standard(2, Connectivity::Eight).unwrap();
        assert_eq!(eight.len(), 8);
        assert!(eight
            .offsets()
            .iter()
            .all(|o| o.coords().iter().all(|c| c.abs() <= 1)));
        assert_eq!(Neighborhood::standard(3, Connectivity::Six).unwrap().len(), 6);
        assert_eq!(
            Neighborhood::standard(3, Connectivity::TwentySix).unwrap().len(),
            26
        );
        assert!(matches!(
            Neighborhood::standard(3, Connectivity::Four),
            Err(Error::UnsupportedConnectivity { dim: 3, connectivity: 4 })
        ));
        assert!(Neighborhood::standard(2, Connectivity::TwentySix).is_err());
    }

    #[test]
    fn neighborhood_validation() {
        assert!(Neighborhood::new(vec![Point::from([0])]).is_err());
        assert!(Neighborhood::new(vec![Point::from([1]), Point::from([1])]).is_err());
        assert!(Neighborhood::new(vec![Point::from([1]), Point::from([1, 0])]).is_err());
        assert!(Neighborhood::new(vec![]).is_err());
        assert_eq!(
            Neighborhood::new(vec![Point::from([1]), Point::from([-1])]).unwrap(),
            Neighborhood::line()
        );
    }

    #[test]
    fn dilate_examples() {
        let line = GridDomain::full(vec![7]).unwrap();
        let v = Neighborhood::line();
        assert_eq!(dilate(&set(&[[3]]), &v, &line), set(&[[2], [3], [4]]));
        assert!(dilate(&PointSet::new(), &v, &line).is_empty());

        let square = GridDomain::full(vec![3, 3]).unwrap();
        let four = Neighborhood::standard(2, Connectivity::Four).unwrap();
        assert_eq!(
            dilate(&set(&[[0, 0]]), &four, &square),
            set(&[[0, 0], [1, 0], [0, 1]])
        );
    }

    #[test]
    fn dilate_respects_mask() {
        let d = line_with_hole(7, 4);
        assert_eq!(
            dilate(&set(&[[3]]), &Neighborhood::line(), &d),
            set(&[[2], [3]])
        );
    }

    #[test]
    fn erode_examples() {
        let v = Neighborhood::line();
        assert_eq!(erode(&set(&[[0], [1], [2]]), &v), set(&[[1]]));
        assert!(erode(&PointSet::new(), &v).is_empty());
        assert!(erode(&set(&[[5]]), &v).is_empty());
        let four = Neighborhood::standard(2, Connectivity::Four).unwrap();
        assert!(erode(&set(&[[4, 4]]), &four).is_empty());
    }

    #[test]
    fn reachable_examples() {
        let v = Neighborhood::line();
        let full = GridDomain::full(vec![7]).unwrap();
        assert_eq!(reachable(&full, &set(&[[0]]), &v).unwrap().len(), 7);
        let holed = line_with_hole(7, 3);
        assert_eq!(
            reachable(&holed, &set(&[[0]]), &v).unwrap(),
            set(&[[0], [1], [2]])
        );
        assert!(reachable(&full, &PointSet::new(), &v).unwrap().is_empty());
        assert!(matches!(
            reachable(&holed, &set(&[[3]]), &v),
            Err(Error::OutsideDomain(_))
        ));
    }

    #[test]
    fn stencil_matches_point_neighbors() {
        let d = GridDomain::full(vec![3, 4, 2]).unwrap();
        let v = Neighborhood::standard(3, Connectivity::TwentySix).unwrap();
        let stencil = Stencil::new(&d, &v).unwrap();
        for i in 0..d.len() {
            let mut fast = Vec::new();
            stencil.for_each_neighbor(i, |j| fast.push(j));
            let slow: Vec<usize> = neighbors(&d.point_of(i), &v)
                .iter()
                .filter_map(|p| d.index_of(p))
                .collect();
            assert_eq!(fast, slow);
        }
    }
}
