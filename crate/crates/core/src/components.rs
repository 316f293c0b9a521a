//! Connected-component analysis and rectangle-crossing detection.
//!
//! Components are labeled by union-find (path compression + union by
//! size) over the admitted links of a graph, where "admitted" means
//! active under an optional link mask. Crossing detection renders the
//! renormalization events used to locate the percolation threshold: a
//! rectangle is crossed left-to-right when a single admitted component
//! contains a node strictly within one radius of the left side and a
//! node strictly within one radius of the right side, with the whole
//! witness component restricted to the rectangle.

use crate::bond::{thin_links, LinkMask, LinkProbability};
use crate::dynamics::{sample_snapshot, OnOffSpec};
use crate::error::{Error, Result};
use crate::geometry::{sample_poisson, Region};
use crate::graph::{build_graph, GeoGraph};
use crate::rng::derive_seed;
use crate::stats;
use rayon::prelude::*;

struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            // halving
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
    }
}

/// A labeling of graph nodes into connected components.
#[derive(Debug, Clone)]
pub struct ComponentLabeling {
    labels: Vec<u32>,
    sizes: Vec<u32>,
    largest: u32,
}

impl ComponentLabeling {
    pub fn component_of(&self, node: usize) -> usize {
        self.labels[node] as usize
    }

    pub fn component_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn size(&self, component: usize) -> Result<usize> {
        self.sizes
            .get(component)
            .map(|s| *s as usize)
            .ok_or(Error::UnknownComponent(component))
    }

    /// Id of the largest component (smallest id on ties). Panics only on
    /// an empty graph, where no component exists.
    pub fn largest_id(&self) -> usize {
        self.largest as usize
    }

    pub fn largest_size(&self) -> usize {
        if self.sizes.is_empty() {
            0
        } else {
            self.sizes[self.largest as usize] as usize
        }
    }

    /// Largest component size as a fraction of the node count.
    pub fn largest_fraction(&self) -> f64 {
        let total: u64 = self.sizes.iter().map(|&s| s as u64).sum();
        if total == 0 {
            0.0
        } else {
            self.largest_size() as f64 / total as f64
        }
    }

    pub fn members(&self, component: usize) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l as usize == component)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Label the connected components of the admitted-link subgraph.
/// `mask = None` admits every link.
pub fn label_components(graph: &GeoGraph, mask: Option<&LinkMask>) -> Result<ComponentLabeling> {
    if let Some(m) = mask {
        if m.len() != graph.link_count() {
            return Err(Error::MaskLengthMismatch {
                mask_len: m.len(),
                link_count: graph.link_count(),
            });
        }
    }
    let n = graph.node_count();
    let mut uf = UnionFind::new(n);
    for (k, link) in graph.links().iter().enumerate() {
        if mask.is_none_or(|m| m.is_active(k)) {
            uf.union(link.a, link.b);
        }
    }
    // compress roots into dense component ids in node order
    let mut labels = vec![u32::MAX; n];
    let mut sizes: Vec<u32> = Vec::new();
    let mut root_to_id = vec![u32::MAX; n];
    for (node, label) in labels.iter_mut().enumerate() {
        let root = uf.find(node as u32);
        if root_to_id[root as usize] == u32::MAX {
            root_to_id[root as usize] = sizes.len() as u32;
            sizes.push(0);
        }
        let id = root_to_id[root as usize];
        *label = id;
        sizes[id as usize] += 1;
    }
    let largest = sizes
        .iter()
        .enumerate()
        .max_by_key(|&(i, &s)| (s, std::cmp::Reverse(i)))
        .map(|(i, _)| i as u32)
        .unwrap_or(0);
    Ok(ComponentLabeling {
        labels,
        sizes,
        largest,
    })
}

/// Maximum pairwise distance within a component.
#[derive(Debug, Clone, Copy)]
pub struct Extent {
    pub value: f64,
    /// True when computed exactly over all pairs; false when the value is
    /// the bounding-box diagonal upper bound (components > 2000 nodes).
    pub exact: bool,
}

const EXACT_EXTENT_LIMIT: usize = 2000;

/// Diameter `sup{|x - y|}` of a component: exact for components of at
/// most 2000 nodes, bounding-box diagonal bound beyond.
pub fn component_extent(
    labeling: &ComponentLabeling,
    graph: &GeoGraph,
    component: usize,
) -> Result<Extent> {
    if component >= labeling.component_count() {
        return Err(Error::UnknownComponent(component));
    }
    let members = labeling.members(component);
    let pts = graph.cloud().points();
    if members.len() <= 1 {
        return Ok(Extent {
            value: 0.0,
            exact: true,
        });
    }
    if members.len() <= EXACT_EXTENT_LIMIT {
        let mut best: f64 = 0.0;
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                best = best.max(pts[a].distance_sq(&pts[b]));
            }
        }
        Ok(Extent {
            value: best.sqrt(),
            exact: true,
        })
    } else {
        let mut x_min = f64::INFINITY;
        let mut x_max = f64::NEG_INFINITY;
        let mut y_min = f64::INFINITY;
        let mut y_max = f64::NEG_INFINITY;
        for &m in &members {
            x_min = x_min.min(pts[m].x);
            x_max = x_max.max(pts[m].x);
            y_min = y_min.min(pts[m].y);
            y_max = y_max.max(pts[m].y);
        }
        let dx = x_max - x_min;
        let dy = y_max - y_min;
        Ok(Extent {
            value: (dx * dx + dy * dy).sqrt(),
            exact: false,
        })
    }
}

/// Crossing direction for a rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    LeftRight,
    TopBottom,
}

/// A rectangle-crossing event specification.
#[derive(Debug, Clone, Copy)]
pub struct CrossingSpec {
    pub rect: Region,
    pub direction: Direction,
}

impl CrossingSpec {
    pub fn new(rect: Region, direction: Direction) -> Result<Self> {
        Ok(CrossingSpec { rect, direction })
    }
}

/// Decide whether an admitted-link component crosses the rectangle.
///
/// A left-right crossing requires a sequence of nodes inside the
/// rectangle, consecutive ones joined by admitted links, whose first node
/// satisfies `0 < x - x_min < r` and whose last satisfies
/// `0 < x_max - x < r` (strict margins of one radius). Top-bottom is the
/// 90-degree rotation.
pub fn crossing_exists(
    graph: &GeoGraph,
    mask: Option<&LinkMask>,
    spec: &CrossingSpec,
) -> Result<bool> {
    if let Some(m) = mask {
        if m.len() != graph.link_count() {
            return Err(Error::MaskLengthMismatch {
                mask_len: m.len(),
                link_count: graph.link_count(),
            });
        }
    }
    if !graph.cloud().region().contains_region(&spec.rect) {
        return Err(Error::InvalidParameter(
            "crossing rectangle must lie inside the graph's region".into(),
        ));
    }
    let pts = graph.cloud().points();
    let n = graph.node_count();
    if n == 0 {
        return Ok(false);
    }
    let rect = &spec.rect;
    let margin = graph.radius();

    let in_rect: Vec<bool> = pts.iter().map(|p| rect.contains(p)).collect();
    let mut uf = UnionFind::new(n);
    for (k, link) in graph.links().iter().enumerate() {
        if in_rect[link.a as usize]
            && in_rect[link.b as usize]
            && mask.is_none_or(|m| m.is_active(k))
        {
            uf.union(link.a, link.b);
        }
    }

    let mut entry_roots = vec![false; n];
    for (i, p) in pts.iter().enumerate() {
        if !in_rect[i] {
            continue;
        }
        let near_entry = match spec.direction {
            Direction::LeftRight => p.x - rect.x_min > 0.0 && p.x - rect.x_min < margin,
            Direction::TopBottom => rect.y_max - p.y > 0.0 && rect.y_max - p.y < margin,
        };
        if near_entry {
            entry_roots[uf.find(i as u32) as usize] = true;
        }
    }
    for (i, p) in pts.iter().enumerate() {
        if !in_rect[i] {
            continue;
        }
        let near_exit = match spec.direction {
            Direction::LeftRight => rect.x_max - p.x > 0.0 && rect.x_max - p.x < margin,
            Direction::TopBottom => p.y - rect.y_min > 0.0 && p.y - rect.y_min < margin,
        };
        if near_exit && entry_roots[uf.find(i as u32) as usize] {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Link-state model for the crossing-probability estimator.
#[derive(Debug, Clone)]
pub enum CrossingModel {
    /// Independent thinning with a static link probability.
    Static(LinkProbability),
    /// A stationary snapshot of an on-off process.
    Snapshot(OnOffSpec),
}

/// Which renormalization event to estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossingVariant {
    /// Rectangle crossed lengthwise.
    Good,
    /// Lengthwise crossing plus both end squares crossed transversally.
    Open,
}

/// Monte Carlo estimate of the rectangle-crossing probability.
///
/// Samples fresh clouds on a `width x height` rectangle, admits links per
/// the model, and tests the crossing event. Returns `(p_hat, 95% ci)`.
pub fn estimate_crossing_prob(
    density: f64,
    model: &CrossingModel,
    width: f64,
    height: f64,
    variant: CrossingVariant,
    replicates: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if replicates == 0 {
        return Err(Error::InvalidParameter("replicates must be >= 1".into()));
    }
    if let CrossingModel::Static(p) = model {
        p.validate()?;
    }
    let region = Region::new(0.0, 0.0, width, height)?;
    let main = CrossingSpec::new(region, Direction::LeftRight)?;
    let left_square = CrossingSpec::new(
        Region::new(0.0, 0.0, height.min(width), height)?,
        Direction::TopBottom,
    )?;
    let right_square = CrossingSpec::new(
        Region::new((width - height).max(0.0), 0.0, width, height)?,
        Direction::TopBottom,
    )?;

    let hits: Result<Vec<bool>> = (0..replicates)
        .into_par_iter()
        .map(|rep| {
            let cloud_seed = derive_seed(seed, &[rep as u64, 0]);
            let mask_seed = derive_seed(seed, &[rep as u64, 1]);
            let cloud = sample_poisson(region, density, cloud_seed)?;
            let graph = build_graph(&cloud, 1.0)?;
            let mask = match model {
                CrossingModel::Static(p) => thin_links(&graph, p, mask_seed)?,
                CrossingModel::Snapshot(spec) => sample_snapshot(&graph, spec, mask_seed)?,
            };
            let good = crossing_exists(&graph, Some(&mask), &main)?;
            Ok(match variant {
                CrossingVariant::Good => good,
                CrossingVariant::Open => {
                    good && crossing_exists(&graph, Some(&mask), &left_square)?
                        && crossing_exists(&graph, Some(&mask), &right_square)?
                }
            })
        })
        .collect();
    let hits = hits?;
    let p_hat = hits.iter().filter(|h| **h).count() as f64 / replicates as f64;
    Ok((p_hat, stats::binomial_ci_halfwidth(p_hat, replicates)))
}

/// One row of a crossing-probability sweep over rectangle scales.
#[derive(Debug, Clone, Copy)]
pub struct CrossingSweepRow {
    pub d: f64,
    pub replicates: usize,
    pub p_hat: f64,
    pub ci: f64,
}

/// Write a crossing-probability sweep as CSV with columns
/// `(d, replicates, p_hat, ci)`.
pub fn write_crossing_sweep_csv(rows: &[CrossingSweepRow], path: &std::path::Path) -> Result<()> {
    use std::io::Write;
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "d,replicates,p_hat,ci")?;
    for r in rows {
        writeln!(f, "{},{},{},{}", r.d, r.replicates, r.p_hat, r.ci)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bond::MaskProvenance;
    use crate::geometry::{add_origin_node, sample_poisson};
    use crate::rng::rng_from_seed;
    use rand::RngExt;
    use std::collections::VecDeque;

    fn cloud_from_points(points: &[(f64, f64)], region: Region) -> crate::geometry::PointCloud {
        let mut cloud = sample_poisson(region, 0.0, 0).unwrap();
        for &(x, y) in points.iter().rev() {
            cloud = add_origin_node(&cloud, (x, y)).unwrap();
        }
        cloud
    }

    /// BFS flood-fill reference labeling.
    fn bfs_labels(graph: &GeoGraph, mask: Option<&LinkMask>) -> Vec<u32> {
        let n = graph.node_count();
        let mut labels = vec![u32::MAX; n];
        let mut next = 0u32;
        for start in 0..n {
            if labels[start] != u32::MAX {
                continue;
            }
            labels[start] = next;
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &k in graph.incident_links(u) {
                    if mask.is_some_and(|m| !m.is_active(k as usize)) {
                        continue;
                    }
                    let v = graph.other_endpoint(k as usize, u);
                    if labels[v] == u32::MAX {
                        labels[v] = next;
                        queue.push_back(v);
                    }
                }
            }
            next += 1;
        }
        labels
    }

    fn assert_same_partition(a: &[u32], b: &[u32]) {
        assert_eq!(a.len(), b.len());
        let mut map_ab = std::collections::HashMap::new();
        let mut map_ba = std::collections::HashMap::new();
        for (&x, &y) in a.iter().zip(b.iter()) {
            assert_eq!(*map_ab.entry(x).or_insert(y), y, "partition mismatch");
            assert_eq!(*map_ba.entry(y).or_insert(x), x, "partition mismatch");
        }
    }

    #[test]
    fn no_links_gives_singletons() {
        let region = Region::square(10.0).unwrap();
        let cloud = cloud_from_points(&[(1.0, 1.0), (5.0, 5.0), (9.0, 2.0)], region);
        let g = build_graph(&cloud, 1.0).unwrap();
        let lab = label_components(&g, None).unwrap();
        assert_eq!(lab.component_count(), 3);
        assert_eq!(lab.largest_size(), 1);
    }

    #[test]
    fn masked_chain_splits() {
        // chain a-b-c with link b-c masked off -> components {a, b}, {c}
        let region = Region::square(10.0).unwrap();
        let cloud = cloud_from_points(&[(1.0, 1.0), (1.8, 1.0), (2.6, 1.0)], region);
        let g = build_graph(&cloud, 1.0).unwrap();
        assert_eq!(g.link_count(), 2);
        let bc = g
            .links()
            .iter()
            .position(|l| (l.a, l.b) == (1, 2))
            .unwrap();
        let mut bits = vec![true; 2];
        bits[bc] = false;
        let mask = LinkMask::new(bits, MaskProvenance::Thinning, 0);
        let lab = label_components(&g, Some(&mask)).unwrap();
        assert_eq!(lab.component_count(), 2);
        assert_eq!(lab.component_of(0), lab.component_of(1));
        assert_ne!(lab.component_of(0), lab.component_of(2));
        assert_eq!(lab.largest_size(), 2);
    }

    #[test]
    fn mask_length_mismatch_rejected() {
        let region = Region::square(10.0).unwrap();
        let cloud = sample_poisson(region, 1.0, 1).unwrap();
        let g = build_graph(&cloud, 1.0).unwrap();
        let mask = LinkMask::new(vec![true; g.link_count() + 1], MaskProvenance::Thinning, 0);
        assert!(matches!(
            label_components(&g, Some(&mask)),
            Err(Error::MaskLengthMismatch { .. })
        ));
    }

    #[test]
    fn union_find_matches_bfs_oracle() {
        for seed in 0..5u64 {
            let region = Region::square(20.0).unwrap();
            let cloud = sample_poisson(region, 1.4, seed).unwrap();
            let g = build_graph(&cloud, 1.0).unwrap();
            let mut rng = rng_from_seed(seed + 100);
            let bits: Vec<bool> = (0..g.link_count()).map(|_| rng.random::<f64>() < 0.6).collect();
            let mask = LinkMask::new(bits, MaskProvenance::Thinning, 0);
            let lab = label_components(&g, Some(&mask)).unwrap();
            let oracle = bfs_labels(&g, Some(&mask));
            assert_same_partition(&lab.labels, &oracle);
            // sizes add up
            let total: usize = (0..lab.component_count())
                .map(|c| lab.size(c).unwrap())
                .sum();
            assert_eq!(total, g.node_count());
        }
    }

    #[test]
    fn extent_trivial_cases() {
        let region = Region::square(10.0).unwrap();
        let cloud = cloud_from_points(&[(1.0, 1.0), (1.0, 1.8), (6.0, 6.0)], region);
        let g = build_graph(&cloud, 1.0).unwrap();
        let lab = label_components(&g, None).unwrap();
        let singleton = lab.component_of(2);
        let ext = component_extent(&lab, &g, singleton).unwrap();
        assert_eq!(ext.value, 0.0);
        assert!(ext.exact);
        let pair = lab.component_of(0);
        let ext = component_extent(&lab, &g, pair).unwrap();
        assert!((ext.value - 0.8).abs() < 1e-12);
        assert!(ext.exact);
        assert!(component_extent(&lab, &g, 99).is_err());
    }

    #[test]
    fn extent_matches_all_pairs_oracle() {
        let region = Region::square(15.0).unwrap();
        let cloud = sample_poisson(region, 1.5, 3).unwrap();
        let g = build_graph(&cloud, 1.0).unwrap();
        let lab = label_components(&g, None).unwrap();
        let comp = lab.largest_id();
        let members = lab.members(comp);
        let pts = g.cloud().points();
        let mut best: f64 = 0.0;
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                best = best.max(pts[a].distance(&pts[b]));
            }
        }
        let ext = component_extent(&lab, &g, comp).unwrap();
        assert!(ext.exact);
        assert!((ext.value - best).abs() < 1e-12);
    }

    #[test]
    fn extent_of_giant_component_falls_back_to_bounding_box() {
        // components above 2000 nodes report the bounding-box diagonal,
        // flagged as a bound rather than an exact value
        let region = Region::square(60.0).unwrap();
        let cloud = sample_poisson(region, 2.0, 8).unwrap();
        let g = build_graph(&cloud, 1.0).unwrap();
        let lab = label_components(&g, None).unwrap();
        assert!(lab.largest_size() > 2000, "need a giant component");
        let ext = component_extent(&lab, &g, lab.largest_id()).unwrap();
        assert!(!ext.exact);
        // the bound dominates any sampled pairwise distance and cannot
        // exceed the region diagonal
        let members = lab.members(lab.largest_id());
        let pts = g.cloud().points();
        let sampled = pts[members[0]].distance(&pts[members[members.len() / 2]]);
        assert!(ext.value >= sampled);
        assert!(ext.value <= (2.0_f64 * 60.0 * 60.0).sqrt() + 1e-9);
    }

    #[test]
    fn crossing_on_empty_graph_is_false() {
        let region = Region::square(10.0).unwrap();
        let cloud = sample_poisson(region, 0.0, 0).unwrap();
        let g = build_graph(&cloud, 1.0).unwrap();
        let spec = CrossingSpec::new(region, Direction::LeftRight).unwrap();
        assert!(!crossing_exists(&g, None, &spec).unwrap());
    }

    #[test]
    fn explicit_chain_crosses() {
        // horizontal chain spaced 0.9 spanning the rect, end nodes within
        // one radius of each vertical side
        let region = Region::square(10.0).unwrap();
        let pts: Vec<(f64, f64)> = (0..11).map(|i| (0.5 + 0.9 * i as f64, 5.0)).collect();
        assert!(pts.last().unwrap().0 > 9.0);
        let cloud = cloud_from_points(&pts, region);
        let g = build_graph(&cloud, 1.0).unwrap();
        let spec = CrossingSpec::new(region, Direction::LeftRight).unwrap();
        assert!(crossing_exists(&g, None, &spec).unwrap());
        // a chain stopping short of the right margin does not cross
        let short = cloud_from_points(&pts[..9], region);
        let g2 = build_graph(&short, 1.0).unwrap();
        assert!(!crossing_exists(&g2, None, &spec).unwrap());
    }

    #[test]
    fn vertical_chain_crosses_top_bottom_only() {
        let region = Region::square(10.0).unwrap();
        let pts: Vec<(f64, f64)> = (0..11).map(|i| (5.0, 0.5 + 0.9 * i as f64)).collect();
        let cloud = cloud_from_points(&pts, region);
        let g = build_graph(&cloud, 1.0).unwrap();
        let tb = CrossingSpec::new(region, Direction::TopBottom).unwrap();
        let lr = CrossingSpec::new(region, Direction::LeftRight).unwrap();
        assert!(crossing_exists(&g, None, &tb).unwrap());
        assert!(!crossing_exists(&g, None, &lr).unwrap());
    }

    /// Oracle: restrict nodes to the rect, flood-fill over admitted links
    /// recomputed from scratch, then test side-margin membership per
    /// component.
    fn crossing_oracle(graph: &GeoGraph, mask: Option<&LinkMask>, spec: &CrossingSpec) -> bool {
        let pts = graph.cloud().points();
        let rect = &spec.rect;
        let inside: Vec<usize> = (0..graph.node_count())
            .filter(|&i| rect.contains(&pts[i]))
            .collect();
        let index_of: std::collections::HashMap<usize, usize> = inside
            .iter()
            .enumerate()
            .map(|(local, &node)| (node, local))
            .collect();
        let mut adj = vec![Vec::new(); inside.len()];
        for (k, l) in graph.links().iter().enumerate() {
            if mask.is_some_and(|m| !m.is_active(k)) {
                continue;
            }
            if let (Some(&u), Some(&v)) = (
                index_of.get(&(l.a as usize)),
                index_of.get(&(l.b as usize)),
            ) {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        let mut label = vec![usize::MAX; inside.len()];
        let mut next = 0;
        for s in 0..inside.len() {
            if label[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            label[s] = next;
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    if label[v] == usize::MAX {
                        label[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        let margin = graph.radius();
        let mut has_entry = vec![false; next];
        let mut has_exit = vec![false; next];
        for (local, &node) in inside.iter().enumerate() {
            let p = &pts[node];
            let (entry, exit) = match spec.direction {
                Direction::LeftRight => (
                    p.x - rect.x_min > 0.0 && p.x - rect.x_min < margin,
                    rect.x_max - p.x > 0.0 && rect.x_max - p.x < margin,
                ),
                Direction::TopBottom => (
                    rect.y_max - p.y > 0.0 && rect.y_max - p.y < margin,
                    p.y - rect.y_min > 0.0 && p.y - rect.y_min < margin,
                ),
            };
            has_entry[label[local]] |= entry;
            has_exit[label[local]] |= exit;
        }
        (0..next).any(|c| has_entry[c] && has_exit[c])
    }

    #[test]
    fn crossing_agrees_with_restriction_oracle() {
        // 200 random graphs around the crossing threshold, with random
        // masks and an off-center rectangle.
        let region = Region::square(14.0).unwrap();
        let rect = Region::new(2.0, 3.0, 12.0, 9.0).unwrap();
        for seed in 0..200u64 {
            let cloud = sample_poisson(region, 1.4, derive_seed(31, &[seed])).unwrap();
            let g = build_graph(&cloud, 1.0).unwrap();
            let mut rng = rng_from_seed(derive_seed(32, &[seed]));
            let bits: Vec<bool> = (0..g.link_count()).map(|_| rng.random::<f64>() < 0.8).collect();
            let mask = LinkMask::new(bits, MaskProvenance::Thinning, 0);
            for dir in [Direction::LeftRight, Direction::TopBottom] {
                let spec = CrossingSpec::new(rect, dir).unwrap();
                assert_eq!(
                    crossing_exists(&g, Some(&mask), &spec).unwrap(),
                    crossing_oracle(&g, Some(&mask), &spec),
                    "seed {seed}"
                );
            }
        }
    }

    #[test]
    fn admitting_more_links_is_monotone() {
        // More admitted links never shrink the largest component and never
        // turn a true crossing false (increasing events).
        let region = Region::square(16.0).unwrap();
        let spec = CrossingSpec::new(region, Direction::LeftRight).unwrap();
        for seed in 0..20u64 {
            let cloud = sample_poisson(region, 1.5, derive_seed(41, &[seed])).unwrap();
            let g = build_graph(&cloud, 1.0).unwrap();
            let strong =
                thin_links(&g, &LinkProbability::Constant(0.9), derive_seed(42, &[seed])).unwrap();
            let weak =
                thin_links(&g, &LinkProbability::Constant(0.4), derive_seed(42, &[seed])).unwrap();
            let lab_weak = label_components(&g, Some(&weak)).unwrap();
            let lab_strong = label_components(&g, Some(&strong)).unwrap();
            assert!(lab_strong.largest_size() >= lab_weak.largest_size());
            let crossed_weak = crossing_exists(&g, Some(&weak), &spec).unwrap();
            let crossed_strong = crossing_exists(&g, Some(&strong), &spec).unwrap();
            assert!(!crossed_weak || crossed_strong);
        }
    }

    #[test]
    fn crossing_sweep_csv_emits_schema() {
        let rows = [
            CrossingSweepRow {
                d: 4.0,
                replicates: 100,
                p_hat: 0.55,
                ci: 0.097,
            },
            CrossingSweepRow {
                d: 8.0,
                replicates: 100,
                p_hat: 0.71,
                ci: 0.089,
            },
        ];
        let path = std::env::temp_dir().join("perc_fpp_crossing_sweep_test.csv");
        write_crossing_sweep_csv(&rows, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "d,replicates,p_hat,ci");
        assert_eq!(lines[1], "4,100,0.55,0.097");
        assert_eq!(lines.len(), 3);
        let _ = std::fs::remove_file(&path);
    }

    #[test]
    fn crossing_prob_zero_density() {
        let (p, _) = estimate_crossing_prob(
            0.0,
            &CrossingModel::Static(LinkProbability::Constant(1.0)),
            12.0,
            4.0,
            CrossingVariant::Good,
            20,
            1,
        )
        .unwrap();
        assert_eq!(p, 0.0);
    }
}
