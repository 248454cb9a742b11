//! Level-order tree growth over pre-sorted feature lists.
//!
//! Each level keeps, for every feature, the active rows grouped by node and
//! sorted by feature value. A split is chosen per node by a single scan with
//! running residual sums, then all feature lists are stably partitioned into
//! the child segments. Rows that land in finished leaves drop out of the
//! working set, so deep levels shrink.

use alloc::vec;
use alloc::vec::Vec;

use super::{FitContext, GBTParams};

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Node {
    Split { feature: u32, threshold: f64, left: u32, right: u32 },
    Leaf { value: f64 },
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RegressionTree {
    pub nodes: Vec<Node>,
}

impl RegressionTree {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut idx = 0usize;
        loop {
            match &self.nodes[idx] {
                Node::Leaf { value } => return *value,
                Node::Split { feature, threshold, left, right } => {
                    // Ties route right: value == threshold is not < threshold.
                    idx = if row[*feature as usize] < *threshold { *left as usize } else { *right as usize };
                }
            }
        }
    }

    /// Longest root-to-leaf path counted in split edges.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], idx: usize) -> usize {
            match &nodes[idx] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => {
                    1 + walk(nodes, *left as usize).max(walk(nodes, *right as usize))
                }
            }
        }
        walk(&self.nodes, 0)
    }
}

pub(crate) struct Workspace {
    rows: Vec<u32>,
    vals: Vec<f64>,
    rows_next: Vec<u32>,
    vals_next: Vec<f64>,
    go_left: Vec<bool>,
}

impl Workspace {
    pub(crate) fn new(n: usize, d: usize) -> Self {
        Workspace {
            rows: vec![0; n * d],
            vals: vec![0.0; n * d],
            rows_next: vec![0; n * d],
            vals_next: vec![0.0; n * d],
            go_left: vec![false; n],
        }
    }
}

#[derive(Clone, Copy)]
struct Segment {
    start: u32,
    end: u32,
    node: u32,
}

/// Decision taken for one segment during a level pass.
enum Decision {
    Leaf,
    Split { feature: usize, left_count: u32, threshold: f64 },
}

/// Grows one regression tree on the current residuals and applies the
/// leaf updates (`residual -= learning_rate * leaf_value`) in place.
pub(crate) fn grow(
    ctx: &FitContext,
    params: &GBTParams,
    residuals: &mut [f64],
    ws: &mut Workspace,
) -> RegressionTree {
    let n = ctx.n_rows();
    let d = ctx.n_features();
    let msl = params.min_samples_leaf;
    let recip = ctx.recip();

    for f in 0..d {
        let (rows, vals) = ctx.sorted_block(f);
        ws.rows[f * n..(f + 1) * n].copy_from_slice(rows);
        ws.vals[f * n..(f + 1) * n].copy_from_slice(vals);
    }

    let mut nodes: Vec<Node> = vec![Node::Leaf { value: 0.0 }];
    let mut segments = vec![Segment { start: 0, end: n as u32, node: 0 }];

    for level in 0..=params.max_depth {
        if segments.is_empty() {
            break;
        }
        let splitting = level < params.max_depth;
        let mut decisions: Vec<Decision> = Vec::with_capacity(segments.len());
        let mut next_segments: Vec<Segment> = Vec::new();
        let mut cursor: u32 = 0;

        for seg in &segments {
            let (start, end) = (seg.start as usize, seg.end as usize);
            let len = end - start;
            let rows0 = &ws.rows[start..end];

            let first = residuals[rows0[0] as usize];
            let mut sum = 0.0;
            let mut all_equal = true;
            for &row in rows0 {
                let r = residuals[row as usize];
                sum += r;
                all_equal &= r == first;
            }

            let mut decision = Decision::Leaf;
            if splitting && len >= 2 * msl && len >= 2 && !all_equal {
                let base_proxy = sum * sum * recip[len];
                let mut best_proxy = base_proxy;
                let mut best: Option<(usize, f64, u32)> = None;
                for f in 0..d {
                    let rows = &ws.rows[f * n + start..f * n + end];
                    let vals = &ws.vals[f * n + start..f * n + end];
                    let mut acc = 0.0;
                    for p in 0..len - 1 {
                        acc += residuals[rows[p] as usize];
                        let v = vals[p];
                        let vn = vals[p + 1];
                        if vn > v {
                            let k = p + 1;
                            if k < msl || len - k < msl {
                                continue;
                            }
                            let t = v + 0.5 * (vn - v);
                            // Guard against midpoints that collapse onto an
                            // endpoint for adjacent floats.
                            if !(t > v && t <= vn) {
                                continue;
                            }
                            let rest = sum - acc;
                            let proxy = acc * acc * recip[k] + rest * rest * recip[len - k];
                            if proxy > best_proxy {
                                best_proxy = proxy;
                                best = Some((f, t, k as u32));
                            }
                        }
                    }
                }
                if let Some((f, t, k)) = best {
                    decision = Decision::Split { feature: f, left_count: k, threshold: t };
                }
            }

            match decision {
                Decision::Leaf => {
                    let value = if all_equal { first } else { sum * recip[len] };
                    nodes[seg.node as usize] = Node::Leaf { value };
                    let step = params.learning_rate * value;
                    for &row in rows0 {
                        residuals[row as usize] -= step;
                    }
                }
                Decision::Split { feature, left_count, threshold } => {
                    let left_id = nodes.len() as u32;
                    nodes[seg.node as usize] =
                        Node::Split { feature: feature as u32, threshold, left: left_id, right: left_id + 1 };
                    nodes.push(Node::Leaf { value: 0.0 });
                    nodes.push(Node::Leaf { value: 0.0 });

                    let frows = &ws.rows[feature * n + start..feature * n + end];
                    for (p, &row) in frows.iter().enumerate() {
                        ws.go_left[row as usize] = (p as u32) < left_count;
                    }

                    next_segments.push(Segment { start: cursor, end: cursor + left_count, node: left_id });
                    next_segments.push(Segment {
                        start: cursor + left_count,
                        end: cursor + (len as u32),
                        node: left_id + 1,
                    });
                    cursor += len as u32;
                }
            }
            decisions.push(decision);
        }

        if next_segments.is_empty() {
            break;
        }

        // Stable partition of every feature list into the child layout.
        for f in 0..d {
            let base = f * n;
            let mut write = 0usize;
            for (seg, decision) in segments.iter().zip(&decisions) {
                let Decision::Split { left_count, .. } = decision else { continue };
                let (start, end) = (seg.start as usize, seg.end as usize);
                let mut wl = base + write;
                let mut wr = base + write + *left_count as usize;
                for p in start..end {
                    let row = ws.rows[base + p];
                    let v = ws.vals[base + p];
                    if ws.go_left[row as usize] {
                        ws.rows_next[wl] = row;
                        ws.vals_next[wl] = v;
                        wl += 1;
                    } else {
                        ws.rows_next[wr] = row;
                        ws.vals_next[wr] = v;
                        wr += 1;
                    }
                }
                write += end - start;
            }
        }
        core::mem::swap(&mut ws.rows, &mut ws.rows_next);
        core::mem::swap(&mut ws.vals, &mut ws.vals_next);
        segments = next_segments;
    }

    RegressionTree { nodes }
}
