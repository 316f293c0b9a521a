//! Exact enumeration of square-lattice circuits surrounding the origin.
//!
//! The lattice has vertices at integer coordinates and the origin sits at
//! the center of a cell, at (1/2, 1/2). A circuit is a closed
//! self-avoiding path along lattice edges; it surrounds the origin when
//! the cell center lies inside the circuit by the even-odd rule. For
//! half-length `m` (edge count `2m`) the count is compared against the
//! combinatorial bound `4 (m - 1) 3^(2m - 3)`.
//!
//! Each circuit is generated exactly once: the walk starts at the
//! circuit's lexicographically smallest vertex, whose two incident
//! circuit edges necessarily point east and north, and the first step is
//! fixed to east. This canonical start and direction deduplicates
//! traversal directions and start points.

use crate::error::{Error, Result};

/// Result of a circuit enumeration for one half-length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircuitCount {
    /// Half-length: the circuit has `2m` edges.
    pub m: u32,
    /// Exact number of origin-surrounding circuits of length `2m`.
    pub count: u64,
    /// The bound `4 (m - 1) 3^(2m - 3)`.
    pub bound: u64,
}

/// `(4/27) (m - 1) 3^(2m) = 4 (m - 1) 3^(2m - 3)`, exact in u64 for m <= 8.
pub fn circuit_bound(m: u32) -> u64 {
    4 * (m as u64 - 1) * 3u64.pow(2 * m - 3)
}

/// Count origin-surrounding circuits with exactly `2m` edges by
/// exhaustive depth-first enumeration. `m` is limited to [2, 8] to guard
/// against combinatorial explosion.
pub fn enumerate_surrounding_circuits(m: u32) -> Result<CircuitCount> {
    if !(2..=8).contains(&m) {
        return Err(Error::CircuitSizeOutOfRange(m));
    }
    let count = count_circuits_of_length(2 * m as usize);
    Ok(CircuitCount {
        m,
        count,
        bound: circuit_bound(m),
    })
}

/// Count origin-surrounding circuits with exactly `len` edges. The
/// lattice is bipartite, so every odd `len` yields zero.
pub fn count_circuits_of_length(len: usize) -> u64 {
    let mut count = 0;
    for_each_circuit(len, |_| count += 1);
    count
}

/// Collect the vertex sequences of all origin-surrounding circuits with
/// `len` edges (first vertex = canonical start, not repeated at the end).
pub fn circuits_of_length(len: usize) -> Vec<Vec<(i32, i32)>> {
    let mut out = Vec::new();
    for_each_circuit(len, |path| out.push(path.to_vec()));
    out
}

fn for_each_circuit<F: FnMut(&[(i32, i32)])>(len: usize, mut visit: F) {
    if len < 4 {
        return;
    }
    let reach = len as i32 / 2;
    // The canonical start is the lex-smallest vertex of the circuit. A
    // circuit enclosing the cell [0,1]^2 has x_min <= 0 and y <= 0 cannot
    // be guaranteed for the start's y, so scan generously.
    for sx in -reach..=0 {
        for sy in -reach..=reach {
            let mut path = vec![(sx, sy)];
            dfs(&mut path, len, &mut visit);
        }
    }
}

const DIRS: [(i32, i32); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

fn dfs<F: FnMut(&[(i32, i32)])>(path: &mut Vec<(i32, i32)>, len: usize, visit: &mut F) {
    let start = path[0];
    let current = *path.last().unwrap();
    let steps_taken = path.len() - 1;
    let remaining = len - steps_taken;

    if remaining == 0 {
        return; // closure is handled below before stepping onto start
    }

    let candidate_dirs: &[(i32, i32)] = if steps_taken == 0 {
        // First step east; the north edge closes the circuit at the end.
        &DIRS[..1]
    } else {
        &DIRS
    };

    for &(dx, dy) in candidate_dirs {
        let next = (current.0 + dx, current.1 + dy);
        if next == start {
            // Closing edge: must use exactly all edges and arrive from the
            // north neighbor of the start, so the pair of incident edges
            // at the lex-smallest vertex is {east, north}.
            if remaining == 1 && current == (start.0, start.1 + 1) && surrounds_origin(path) {
                visit(path);
            }
            continue;
        }
        // Self-avoidance and the canonical-start constraint: no vertex may
        // be lexicographically smaller than the start.
        if (next.0, next.1) < (start.0, start.1) {
            continue;
        }
        if path.contains(&next) {
            continue;
        }
        // Must still be able to walk home in the remaining budget, with
        // matching parity.
        let manhattan = (next.0 - start.0).abs() + (next.1 - start.1).abs();
        let left = remaining as i32 - 1;
        if manhattan > left || (left - manhattan) % 2 != 0 {
            continue;
        }
        path.push(next);
        dfs(path, len, visit);
        path.pop();
    }
}

/// Even-odd containment test for the cell center (1/2, 1/2): cast a ray
/// in +x and count crossings with vertical circuit edges. Only edges
/// between (x, 0) and (x, 1) with x >= 1 intersect the ray, and no edge
/// endpoint can lie on it.
fn surrounds_origin(path: &[(i32, i32)]) -> bool {
    let mut crossings = 0;
    let n = path.len();
    for i in 0..n {
        let a = path[i];
        let b = path[(i + 1) % n];
        if a.0 == b.0 && a.0 >= 1 && a.1.min(b.1) == 0 && a.1.max(b.1) == 1 {
            crossings += 1;
        }
    }
    crossings % 2 == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn unit_square_is_the_only_length_four_circuit() {
        let c = enumerate_surrounding_circuits(2).unwrap();
        assert_eq!(c.count, 1);
        assert_eq!(c.bound, 12);
    }

    #[test]
    fn four_dominoes_at_length_six() {
        // 1x2 rectangles containing the origin cell: right, left, up, down.
        let c = enumerate_surrounding_circuits(3).unwrap();
        assert_eq!(c.count, 4);
        assert_eq!(c.bound, 216);
    }

    #[test]
    fn counts_stay_below_the_bound() {
        for m in 2..=6 {
            let c = enumerate_surrounding_circuits(m).unwrap();
            assert!(
                c.count <= c.bound,
                "m = {m}: count {} exceeds bound {}",
                c.count,
                c.bound
            );
            assert!(c.count > 0);
        }
    }

    #[test]
    fn counts_grow_with_length() {
        let mut prev = 0;
        for m in 2..=6 {
            let c = enumerate_surrounding_circuits(m).unwrap();
            assert!(c.count > prev);
            prev = c.count;
        }
    }

    #[test]
    fn odd_lengths_are_impossible() {
        for len in [5, 7, 9, 11] {
            assert_eq!(count_circuits_of_length(len), 0, "len {len}");
        }
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(enumerate_surrounding_circuits(1).is_err());
        assert!(enumerate_surrounding_circuits(9).is_err());
    }

    type EdgeSet = BTreeSet<((i32, i32), (i32, i32))>;

    fn edge_set(path: &[(i32, i32)]) -> EdgeSet {
        let n = path.len();
        (0..n)
            .map(|i| {
                let a = path[i];
                let b = path[(i + 1) % n];
                (a.min(b), a.max(b))
            })
            .collect()
    }

    fn transform(set: &EdgeSet, f: impl Fn((i32, i32)) -> (i32, i32)) -> EdgeSet {
        set.iter()
            .map(|&(a, b)| {
                let (ta, tb) = (f(a), f(b));
                (ta.min(tb), ta.max(tb))
            })
            .collect()
    }

    #[test]
    fn circuit_set_is_closed_under_the_eight_cell_symmetries() {
        // The dihedral symmetries fixing the cell center (1/2, 1/2) map
        // lattice circuits to lattice circuits, so the enumerated set is
        // invariant under each of them.
        for len in [4usize, 6, 8, 10] {
            let circuits: BTreeSet<EdgeSet> =
                circuits_of_length(len).iter().map(|p| edge_set(p)).collect();
            type Symmetry = Box<dyn Fn((i32, i32)) -> (i32, i32)>;
            let symmetries: Vec<Symmetry> = vec![
                Box::new(|(x, y)| (x, y)),
                Box::new(|(x, y)| (1 - y, x)),     // rot 90
                Box::new(|(x, y)| (1 - x, 1 - y)), // rot 180
                Box::new(|(x, y)| (y, 1 - x)),     // rot 270
                Box::new(|(x, y)| (1 - x, y)),     // mirror x = 1/2
                Box::new(|(x, y)| (x, 1 - y)),     // mirror y = 1/2
                Box::new(|(x, y)| (y, x)),         // diagonal
                Box::new(|(x, y)| (1 - y, 1 - x)), // anti-diagonal
            ];
            for f in &symmetries {
                let mapped: BTreeSet<EdgeSet> =
                    circuits.iter().map(|s| transform(s, f)).collect();
                assert_eq!(mapped, circuits, "len {len}");
            }
        }
    }

    #[test]
    fn every_enumerated_path_is_a_simple_even_cycle() {
        for len in [6usize, 8, 10] {
            for path in circuits_of_length(len) {
                assert_eq!(path.len(), len);
                let distinct: BTreeSet<_> = path.iter().collect();
                assert_eq!(distinct.len(), len, "vertices must not repeat");
                // consecutive vertices adjacent, including the closing edge
                let n = path.len();
                for i in 0..n {
                    let a = path[i];
                    let b = path[(i + 1) % n];
                    assert_eq!((a.0 - b.0).abs() + (a.1 - b.1).abs(), 1);
                }
            }
        }
    }
}
