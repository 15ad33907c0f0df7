//! k-d tree over point coordinates supporting exact closed-ball range
//! queries and nearest-neighbour distances.

use crate::measure::Ball;

const LEAF_SIZE: usize = 16;

#[derive(Debug, Clone)]
struct Node {
    start: usize,
    end: usize,
    /// Children indices into `nodes`; `None` for leaves.
    children: Option<(usize, usize)>,
}

/// Static k-d tree. Coordinates are stored in tree order so leaf scans are
/// contiguous.
#[derive(Debug, Clone)]
pub struct SpatialIndex {
    dim: usize,
    /// `order[slot]` is the original point index stored at `slot`.
    order: Vec<usize>,
    coords: Vec<f64>,
    nodes: Vec<Node>,
    /// Per-node bounding boxes, `2 * dim` values each (lo then hi).
    boxes: Vec<f64>,
}

impl SpatialIndex {
    /// Builds the tree in `O(N log N)` (median splits on the widest axis).
    pub fn build(coords: &[f64], dim: usize) -> Self {
        assert!(dim > 0 && coords.len() % dim == 0);
        let len = coords.len() / dim;
        let mut order: Vec<usize> = (0..len).collect();
        let mut nodes = Vec::new();
        let mut boxes = Vec::new();
        if len > 0 {
            build_node(coords, dim, &mut order, 0, len, &mut nodes, &mut boxes);
        }
        let mut stored = Vec::with_capacity(coords.len());
        for &i in &order {
            stored.extend_from_slice(&coords[i * dim..(i + 1) * dim]);
        }
        SpatialIndex {
            dim,
            order,
            coords: stored,
            nodes,
            boxes,
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Indices of all points in the closed ball, in ascending order.
    pub fn range_query(&self, ball: &Ball) -> Vec<usize> {
        self.query(ball.center(), ball.radius())
    }

    /// Same as [`range_query`](Self::range_query) without constructing a [`Ball`].
    pub fn query(&self, center: &[f64], radius: f64) -> Vec<usize> {
        debug_assert_eq!(center.len(), self.dim);
        let mut out = Vec::new();
        if self.nodes.is_empty() {
            return out;
        }
        let r2 = radius * radius;
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            if self.box_dist2(id, center) > r2 {
                continue;
            }
            let node = &self.nodes[id];
            match node.children {
                Some((l, r)) => {
                    stack.push(r);
                    stack.push(l);
                }
                None => {
                    for slot in node.start..node.end {
                        if crate::measure::within_closed_ball(self.slot(slot), center, radius) {
                            out.push(self.order[slot]);
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Distance from `query` to the nearest indexed point other than
    /// `exclude`, or `None` when there is no other point.
    pub fn nearest_distance(&self, query: &[f64], exclude: Option<usize>) -> Option<f64> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best = f64::INFINITY;
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            if self.box_dist2(id, query) >= best {
                continue;
            }
            let node = &self.nodes[id];
            match node.children {
                Some((l, r)) => {
                    let dl = self.box_dist2(l, query);
                    let dr = self.box_dist2(r, query);
                    if dl <= dr {
                        stack.push(r);
                        stack.push(l);
                    } else {
                        stack.push(l);
                        stack.push(r);
                    }
                }
                None => {
                    for slot in node.start..node.end {
                        if Some(self.order[slot]) == exclude {
                            continue;
                        }
                        let d2 = crate::numeric::dist2(self.slot(slot), query);
                        if d2 < best {
                            best = d2;
                        }
                    }
                }
            }
        }
        best.is_finite().then(|| best.sqrt())
    }

    fn slot(&self, slot: usize) -> &[f64] {
        &self.coords[slot * self.dim..(slot + 1) * self.dim]
    }

    /// Squared distance from `p` to the node's box. Summed in coordinate
    /// order with zero contributions inside the slab, so it never exceeds the
    /// squared distance to any point in the box as computed by
    /// [`crate::numeric::dist2`]; pruning is therefore exact.
    fn box_dist2(&self, id: usize, p: &[f64]) -> f64 {
        let b = &self.boxes[id * 2 * self.dim..(id + 1) * 2 * self.dim];
        let (lo, hi) = b.split_at(self.dim);
        let mut d2 = 0.0;
        for k in 0..self.dim {
            let d = if p[k] < lo[k] {
                p[k] - lo[k]
            } else if p[k] > hi[k] {
                p[k] - hi[k]
            } else {
                0.0
            };
            d2 += d * d;
        }
        d2
    }
}

fn build_node(
    coords: &[f64],
    dim: usize,
    order: &mut [usize],
    start: usize,
    end: usize,
    nodes: &mut Vec<Node>,
    boxes: &mut Vec<f64>,
) -> usize {
    let id = nodes.len();
    nodes.push(Node {
        start,
        end,
        children: None,
    });
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for &i in &order[start..end] {
        for k in 0..dim {
            let c = coords[i * dim + k];
            lo[k] = lo[k].min(c);
            hi[k] = hi[k].max(c);
        }
    }
    boxes.extend_from_slice(&lo);
    boxes.extend_from_slice(&hi);

    if end - start > LEAF_SIZE {
        let axis = (0..dim)
            .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])).then(b.cmp(&a)))
            .unwrap_or(0);
        let mid = (end - start) / 2;
        order[start..end].select_nth_unstable_by(mid, |&a, &b| {
            coords[a * dim + axis]
                .total_cmp(&coords[b * dim + axis])
                .then(a.cmp(&b))
        });
        let left = build_node(coords, dim, order, start, start + mid, nodes, boxes);
        let right = build_node(coords, dim, order, start + mid, end, nodes, boxes);
        nodes[id].children = Some((left, right));
    }
    id
}
