//! Exact nearest-neighbor search over one point cloud.
//!
//! A balanced k-d tree with median splits on the widest axis. Queries return
//! exactly the brute-force nearest neighbor; distance ties are broken by the
//! lowest point index, so results are interchangeable with a linear scan.

use super::{dist2, PointCloud};

const LEAF_SIZE: usize = 16;

enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

/// Immutable space-partitioning index over one [`PointCloud`].
pub struct NnIndex {
    points: Vec<[f64; 3]>,
    /// Original indices, permuted so tree ranges are contiguous.
    order: Vec<u32>,
    nodes: Vec<Node>,
    root: usize,
}

impl NnIndex {
    pub fn new(cloud: &PointCloud) -> Self {
        let points: Vec<[f64; 3]> = cloud.points().to_vec();
        let mut order: Vec<u32> = (0..points.len() as u32).collect();
        let mut nodes = Vec::new();
        let n = points.len();
        let root = build(&points, &mut order, 0, n, &mut nodes);
        Self {
            points,
            order,
            nodes,
            root,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Exact nearest neighbor of `query`: `(point index, Euclidean distance)`.
    pub fn nearest(&self, query: &[f64; 3]) -> (usize, f64) {
        let (idx, d2) = self.nearest_d2(query);
        (idx, d2.sqrt())
    }

    /// Same as [`NnIndex::nearest`] but returns the squared distance.
    pub fn nearest_d2(&self, query: &[f64; 3]) -> (usize, f64) {
        let mut best_d2 = f64::INFINITY;
        let mut best_idx = u32::MAX;
        self.search(self.root, query, &mut best_d2, &mut best_idx);
        (best_idx as usize, best_d2)
    }

    fn search(&self, node: usize, q: &[f64; 3], best_d2: &mut f64, best_idx: &mut u32) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &idx in &self.order[start..end] {
                    let d2 = dist2(&self.points[idx as usize], q);
                    if d2 < *best_d2 || (d2 == *best_d2 && idx < *best_idx) {
                        *best_d2 = d2;
                        *best_idx = idx;
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = q[axis] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search(near, q, best_d2, best_idx);
                // Equal plane distance can still hide an equal-distance point
                // with a lower index, so only prune on strict excess.
                if diff * diff <= *best_d2 {
                    self.search(far, q, best_d2, best_idx);
                }
            }
        }
    }
}

fn build(
    points: &[[f64; 3]],
    order: &mut [u32],
    start: usize,
    end: usize,
    nodes: &mut Vec<Node>,
) -> usize {
    if end - start <= LEAF_SIZE {
        nodes.push(Node::Leaf { start, end });
        return nodes.len() - 1;
    }
    let slice = &mut order[start..end];
    // Split on the widest axis for balanced boxes.
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for &idx in slice.iter() {
        let p = &points[idx as usize];
        for a in 0..3 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let axis = (0..3)
        .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
        .unwrap();
    let mid = slice.len() / 2;
    slice.select_nth_unstable_by(mid, |&a, &b| {
        points[a as usize][axis]
            .total_cmp(&points[b as usize][axis])
            .then(a.cmp(&b))
    });
    let value = points[slice[mid] as usize][axis];
    let left = build(points, order, start, start + mid, nodes);
    let right = build(points, order, start + mid, end, nodes);
    nodes.push(Node::Split {
        axis,
        value,
        left,
        right,
    });
    nodes.len() - 1
}
