//! Random geometric graphs built from point clouds.
//!
//! `build_graph` connects every pair at Euclidean distance <= radius
//! (inclusive boundary). Construction uses grid binning with cell side
//! equal to the radius and a 3x3 neighborhood search, which is exact and
//! near-linear in the node count for bounded density. Links are stored
//! once with `a < b`; per-node adjacency holds link indices so that
//! per-link state (masks, delays) is addressable by a single index.

use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

/// An undirected link between nodes `a < b` with its Euclidean length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub a: u32,
    pub b: u32,
    pub length: f64,
}

/// An immutable geometric graph over a point cloud.
#[derive(Debug, Clone)]
pub struct GeoGraph {
    cloud: PointCloud,
    radius: f64,
    links: Vec<Link>,
    adjacency: Vec<Vec<u32>>,
}

impl GeoGraph {
    pub fn cloud(&self) -> &PointCloud {
        &self.cloud
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn node_count(&self) -> usize {
        self.cloud.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    /// Indices of links incident to `node`.
    pub fn incident_links(&self, node: usize) -> &[u32] {
        &self.adjacency[node]
    }

    /// The endpoint of `link` that is not `node`.
    pub fn other_endpoint(&self, link: usize, node: usize) -> usize {
        let l = &self.links[link];
        if l.a as usize == node {
            l.b as usize
        } else {
            l.a as usize
        }
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    /// Mean node degree and a histogram keyed by degree.
    pub fn node_degree_stats(&self) -> (f64, BTreeMap<usize, usize>) {
        let mut histogram = BTreeMap::new();
        if self.node_count() == 0 {
            return (0.0, histogram);
        }
        for node in 0..self.node_count() {
            *histogram.entry(self.degree(node)).or_insert(0) += 1;
        }
        let mean = 2.0 * self.link_count() as f64 / self.node_count() as f64;
        (mean, histogram)
    }

    /// Export the graph as two CSV files: nodes `(id, x, y)` and links
    /// `(id, node_i, node_j, length)`.
    pub fn write_csv(&self, nodes_path: &Path, links_path: &Path) -> Result<()> {
        let mut nf = std::io::BufWriter::new(std::fs::File::create(nodes_path)?);
        writeln!(nf, "id,x,y")?;
        for (i, p) in self.cloud.points().iter().enumerate() {
            writeln!(nf, "{},{},{}", i, p.x, p.y)?;
        }
        let mut lf = std::io::BufWriter::new(std::fs::File::create(links_path)?);
        writeln!(lf, "id,node_i,node_j,length")?;
        for (k, l) in self.links.iter().enumerate() {
            writeln!(lf, "{},{},{},{}", k, l.a, l.b, l.length)?;
        }
        Ok(())
    }
}

/// Build the geometric graph with the given connection radius.
pub fn build_graph(cloud: &PointCloud, radius: f64) -> Result<GeoGraph> {
    if radius <= 0.0 || !radius.is_finite() {
        return Err(Error::InvalidRadius(radius));
    }
    let points = cloud.points();
    let n = points.len();
    let region = cloud.region();

    let nx = ((region.width() / radius).ceil() as usize).max(1);
    let ny = ((region.height() / radius).ceil() as usize).max(1);
    let cell_of = |x: f64, y: f64| -> (usize, usize) {
        let cx = (((x - region.x_min) / radius) as usize).min(nx - 1);
        let cy = (((y - region.y_min) / radius) as usize).min(ny - 1);
        (cx, cy)
    };

    let mut grid: Vec<Vec<u32>> = vec![Vec::new(); nx * ny];
    for (i, p) in points.iter().enumerate() {
        let (cx, cy) = cell_of(p.x, p.y);
        grid[cy * nx + cx].push(i as u32);
    }

    let r_sq = radius * radius;
    let mut links = Vec::new();
    let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (i, p) in points.iter().enumerate() {
        let (cx, cy) = cell_of(p.x, p.y);
        let x_lo = cx.saturating_sub(1);
        let y_lo = cy.saturating_sub(1);
        for gy in y_lo..=(cy + 1).min(ny - 1) {
            for gx in x_lo..=(cx + 1).min(nx - 1) {
                for &j in &grid[gy * nx + gx] {
                    let j = j as usize;
                    // Each unordered pair visited once via i < j.
                    if j <= i {
                        continue;
                    }
                    let d_sq = p.distance_sq(&points[j]);
                    if d_sq <= r_sq {
                        let link_id = links.len() as u32;
                        links.push(Link {
                            a: i as u32,
                            b: j as u32,
                            length: d_sq.sqrt(),
                        });
                        adjacency[i].push(link_id);
                        adjacency[j].push(link_id);
                    }
                }
            }
        }
    }

    Ok(GeoGraph {
        cloud: cloud.clone(),
        radius,
        links,
        adjacency,
    })
}
