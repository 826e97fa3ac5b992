//! Instances: point sets in the unit square with a bucket-grid index.

mod density;
mod dump;
mod grid;
mod tsplib;

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use density::{DensitySpec, GaussianComponent, Sampler};
pub use dump::{load_instance, InstanceFile, INSTANCE_FORMAT};
pub use grid::SpatialGrid;
pub use tsplib::{read_tsplib, write_tsplib};

use crate::error::{Error, Result};
use crate::geometry::{dist, Point};
use crate::rng::point_rng;

/// Where a generated instance came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub density: DensitySpec,
}

/// Number of cached nearest neighbours per vertex.
pub const CACHED_NEIGHBORS: usize = 3;

#[derive(Debug, Clone)]
pub struct Instance {
    points: Vec<Point>,
    grid: SpatialGrid,
    provenance: Option<Provenance>,
    nn_dist: OnceLock<Vec<f64>>,
    neighbors: OnceLock<Vec<[u32; CACHED_NEIGHBORS]>>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points && self.provenance == other.provenance
    }
}

impl Instance {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInstance("an instance needs at least one point".into()));
        }
        for p in &points {
            Point::try_new(p.x, p.y)?;
            if !p.in_unit_square() {
                return Err(Error::OutsideUnitSquare { x: p.x, y: p.y });
            }
        }
        if points.len() > u32::MAX as usize {
            return Err(Error::InvalidInstance("too many points".into()));
        }
        let grid = SpatialGrid::build(&points);
        Ok(Instance {
            points,
            grid,
            provenance: None,
            nn_dist: OnceLock::new(),
            neighbors: OnceLock::new(),
        })
    }

    pub fn from_coords(coords: &[(f64, f64)]) -> Result<Self> {
        Self::new(coords.iter().map(|&(x, y)| Point::new(x, y)).collect())
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    /// `n` independent points; point `i` is drawn from its own ChaCha8 stream,
    /// so the result depends only on `(n, spec, seed)`.
    pub fn generate(n: usize, spec: &DensitySpec, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInstance("n must be at least 1".into()));
        }
        let sampler = spec.sampler()?;
        let points: Vec<Point> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut rng = point_rng(seed, i as u64);
                sampler.sample(i, &mut rng)
            })
            .collect();
        Ok(Self::new(points)?.with_provenance(Provenance {
            seed,
            density: spec.clone(),
        }))
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> Point {
        self.points[i]
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index < self.n() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index, n: self.n() })
        }
    }

    /// `k` nearest points to `query` (excluding indices rejected by `exclude`),
    /// sorted by distance then index.
    pub fn nearest_to(
        &self,
        query: Point,
        k: usize,
        exclude: impl Fn(usize) -> bool,
    ) -> Vec<(f64, usize)> {
        self.grid.nearest(&self.points, query, k, exclude)
    }

    pub fn nearest_neighbor_distance(&self, i: usize) -> Result<f64> {
        if self.n() < 2 {
            return Err(Error::NotApplicable(
                "nearest neighbour needs at least two points".into(),
            ));
        }
        self.check_index(i)?;
        Ok(self.nn_distances()[i])
    }

    /// Nearest-neighbour distance of every vertex (infinite when `n == 1`),
    /// computed once.
    pub fn nn_distances(&self) -> &[f64] {
        self.nn_dist.get_or_init(|| {
            self.cached_neighbors()
                .iter()
                .enumerate()
                .map(|(i, nb)| match nb[0] {
                    u32::MAX => f64::INFINITY,
                    j => dist(self.points[i], self.points[j as usize]),
                })
                .collect()
        })
    }

    /// The [`CACHED_NEIGHBORS`] nearest other vertices of every vertex, padded
    /// with `u32::MAX` for tiny instances.
    pub fn cached_neighbors(&self) -> &[[u32; CACHED_NEIGHBORS]] {
        self.neighbors.get_or_init(|| {
            (0..self.n())
                .into_par_iter()
                .map(|i| {
                    let mut out = [u32::MAX; CACHED_NEIGHBORS];
                    let found = self.nearest_to(self.points[i], CACHED_NEIGHBORS, |j| j == i);
                    for (slot, (_, j)) in out.iter_mut().zip(found) {
                        *slot = j as u32;
                    }
                    out
                })
                .collect()
        })
    }

    /// Vertices within `radius` of `center` (closed disk), in index order.
    pub fn points_in_disk(&self, center: Point, radius: f64) -> Vec<usize> {
        if !(radius >= 0.0) {
            return Vec::new();
        }
        let r = Point::new(radius, radius);
        self.points_in_region(|x| dist(x, center) <= radius, center - r, center + r)
    }

    /// Vertices inside the bounding box `[min, max]` satisfying `pred`, in
    /// index order. `pred` must be false outside the box.
    pub fn points_in_region(
        &self,
        pred: impl Fn(Point) -> bool,
        min: Point,
        max: Point,
    ) -> Vec<usize> {
        let mut out = Vec::new();
        self.grid.for_each_in_box(min, max, |i| {
            if pred(self.points[i]) {
                out.push(i);
            }
        });
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_outside_points() {
        assert!(Instance::new(vec![]).is_err());
        assert!(Instance::from_coords(&[(0.5, 1.2)]).is_err());
        assert!(Instance::from_coords(&[(f64::NAN, 0.2)]).is_err());
        assert!(Instance::from_coords(&[(0.0, 1.0)]).is_ok());
    }

    #[test]
    fn single_point_generation() {
        let inst = Instance::generate(1, &DensitySpec::Uniform, 99).unwrap();
        assert_eq!(inst.n(), 1);
        assert!(inst.point(0).in_unit_square());
        assert!(inst.nearest_neighbor_distance(0).is_err());
    }

    #[test]
    fn generate_rejects_zero() {
        assert!(Instance::generate(0, &DensitySpec::Uniform, 1).is_err());
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = DensitySpec::gaussian_preset();
        let a = Instance::generate(500, &spec, 42).unwrap();
        let b = Instance::generate(500, &spec, 42).unwrap();
        let c = Instance::generate(500, &spec, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.points(), c.points());
    }

    #[test]
    fn nn_small_examples() {
        let two = Instance::from_coords(&[(0.0, 0.0), (1.0, 0.0)]).unwrap();
        assert_eq!(two.nearest_neighbor_distance(0).unwrap(), 1.0);
        assert_eq!(two.nearest_neighbor_distance(1).unwrap(), 1.0);

        let line = Instance::from_coords(&[(0.0, 0.0), (0.1, 0.0), (0.5, 0.0)]).unwrap();
        assert_eq!(line.nearest_neighbor_distance(1).unwrap(), 0.1);
        assert!(line.nearest_neighbor_distance(3).is_err());
    }

    #[test]
    fn disk_queries_edge_cases() {
        let inst = Instance::generate(300, &DensitySpec::Uniform, 5).unwrap();
        assert!(inst.points_in_disk(Point::new(2.0, 2.0), 0.5).is_empty());
        let all = inst.points_in_disk(Point::new(0.5, 0.5), 1.0);
        assert_eq!(all, (0..300).collect::<Vec<_>>());
    }
}
