//! Poisson point processes in rectangular regions.
//!
//! Coordinates are dimensionless: the link radius is the unit of length.
//! Sampling is the exact two-stage construction — draw the point count
//! from Poisson(density * area), then place that many i.i.d. uniform
//! points — and is a pure function of `(region, density, seed)`.

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use rand::RngExt;
use rand_distr::{Distribution, Poisson};

/// A point in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.distance_sq(other).sqrt()
    }

    pub fn distance_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// An axis-aligned rectangular region with positive area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Region {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self> {
        if !(x_max > x_min && y_max > y_min)
            || !(x_min.is_finite() && x_max.is_finite() && y_min.is_finite() && y_max.is_finite())
        {
            return Err(Error::InvalidRegion {
                x_min,
                x_max,
                y_min,
                y_max,
            });
        }
        Ok(Region {
            x_min,
            y_min,
            x_max,
            y_max,
        })
    }

    /// Square `[0, side]^2`.
    pub fn square(side: f64) -> Result<Self> {
        Region::new(0.0, 0.0, side, side)
    }

    /// Square `[-h, h]^2` centered at the origin.
    pub fn centered_square(h: f64) -> Result<Self> {
        Region::new(-h, -h, h, h)
    }

    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min) * (self.y_max - self.y_min)
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    /// True if `inner` lies entirely inside `self`.
    pub fn contains_region(&self, inner: &Region) -> bool {
        inner.x_min >= self.x_min
            && inner.x_max <= self.x_max
            && inner.y_min >= self.y_min
            && inner.y_max <= self.y_max
    }
}

/// A sampled realization of a Poisson point process.
///
/// Immutable after construction; regenerating with the same
/// `(region, density, seed)` yields an identical point list.
#[derive(Debug, Clone)]
pub struct PointCloud {
    points: Vec<Point>,
    region: Region,
    density: f64,
    seed: u64,
}

impl PointCloud {
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Sample a homogeneous Poisson point process of the given density.
pub fn sample_poisson(region: Region, density: f64, seed: u64) -> Result<PointCloud> {
    if density < 0.0 || !density.is_finite() {
        return Err(Error::InvalidDensity(density));
    }
    let mut rng = rng_from_seed(seed);
    let mean = density * region.area();
    let count = if mean == 0.0 {
        0
    } else {
        // rand_distr rejects mean == 0; the zero-rate process is empty.
        let poisson =
            Poisson::new(mean).map_err(|e| Error::InvalidParameter(format!("poisson: {e}")))?;
        poisson.sample(&mut rng) as usize
    };
    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        let x = region.x_min + rng.random::<f64>() * region.width();
        let y = region.y_min + rng.random::<f64>() * region.height();
        points.push(Point::new(x, y));
    }
    Ok(PointCloud {
        points,
        region,
        density,
        seed,
    })
}

/// Return a new cloud with `position` prepended at index 0.
///
/// The original cloud is not modified. Rejects positions outside the region.
pub fn add_origin_node(cloud: &PointCloud, position: (f64, f64)) -> Result<PointCloud> {
    let p = Point::new(position.0, position.1);
    if !cloud.region.contains(&p) {
        return Err(Error::PositionOutsideRegion { x: p.x, y: p.y });
    }
    let mut points = Vec::with_capacity(cloud.points.len() + 1);
    points.push(p);
    points.extend_from_slice(&cloud.points);
    Ok(PointCloud {
        points,
        region: cloud.region,
        density: cloud.density,
        seed: cloud.seed,
    })
}
