//! Minimal depth-limited CART with Gini splitting, used only as a baseline
//! column in the benchmark tables.

use alloc::boxed::Box;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Label};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_DEPTH: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Leaf(Label),
    Split {
        feature: usize,
        threshold: f64,
        /// Taken when `x[feature] <= threshold`.
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub root: TreeNode,
    pub dim: usize,
}

impl TreeModel {
    pub fn fit(data: &Dataset, max_depth: usize) -> Result<Self> {
        if !data.has_both_classes() {
            return Err(Error::SingleClass);
        }
        let indices: Vec<usize> = (0..data.len()).collect();
        Ok(Self {
            root: grow(data, indices, max_depth),
            dim: data.dim(),
        })
    }

    pub fn predict(&self, x: &[f64]) -> Result<Label> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf(label) => return Ok(*label),
                TreeNode::Split { feature, threshold, left, right } => {
                    node = if x[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn depth(node: &TreeNode) -> usize {
            match node {
                TreeNode::Leaf(_) => 0,
                TreeNode::Split { left, right, .. } => 1 + depth(left).max(depth(right)),
            }
        }
        depth(&self.root)
    }
}

#[inline]
fn gini(pos: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p = pos as f64 / total as f64;
    2.0 * p * (1.0 - p)
}

fn majority(data: &Dataset, indices: &[usize]) -> Label {
    let pos = indices.iter().filter(|&&i| data.examples()[i].y == Label::Positive).count();
    // Ties go to +1, like sign(0).
    if 2 * pos >= indices.len() {
        Label::Positive
    } else {
        Label::Negative
    }
}

struct Split {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

fn best_split(data: &Dataset, indices: &[usize]) -> Option<Split> {
    let examples = data.examples();
    let total = indices.len();
    let total_pos = indices.iter().filter(|&&i| examples[i].y == Label::Positive).count();
    let mut best: Option<Split> = None;
    let mut order = indices.to_vec();
    for feature in 0..data.dim() {
        order.sort_by(|&a, &b| examples[a].x[feature].total_cmp(&examples[b].x[feature]).then(a.cmp(&b)));
        let mut left_pos = 0;
        for k in 1..total {
            if examples[order[k - 1]].y == Label::Positive {
                left_pos += 1;
            }
            let lo = examples[order[k - 1]].x[feature];
            let hi = examples[order[k]].x[feature];
            if lo == hi {
                continue;
            }
            let right = total - k;
            let impurity = (k as f64 * gini(left_pos, k) + right as f64 * gini(total_pos - left_pos, right))
                / total as f64;
            if best.as_ref().is_none_or(|b| impurity < b.impurity) {
                best = Some(Split { feature, threshold: 0.5 * (lo + hi), impurity });
            }
        }
    }
    best
}

fn grow(data: &Dataset, indices: Vec<usize>, depth_left: usize) -> TreeNode {
    let label = majority(data, &indices);
    let pos = indices.iter().filter(|&&i| data.examples()[i].y == Label::Positive).count();
    if depth_left == 0 || pos == 0 || pos == indices.len() {
        return TreeNode::Leaf(label);
    }
    let parent = gini(pos, indices.len());
    let Some(split) = best_split(data, &indices) else {
        return TreeNode::Leaf(label);
    };
    if split.impurity >= parent {
        return TreeNode::Leaf(label);
    }
    let (left, right): (Vec<usize>, Vec<usize>) = indices
        .into_iter()
        .partition(|&i| data.examples()[i].x[split.feature] <= split.threshold);
    TreeNode::Split {
        feature: split.feature,
        threshold: split.threshold,
        left: Box::new(grow(data, left, depth_left - 1)),
        right: Box::new(grow(data, right, depth_left - 1)),
    }
}
