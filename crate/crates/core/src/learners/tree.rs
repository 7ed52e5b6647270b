//! CART regression tree shared by the forest and the booster.
//!
//! Splits maximize `S_l^2 / n_l + S_r^2 / n_r` over target sums, which is
//! squared-error reduction and, for 0/1 targets, Gini impurity reduction.
//! Samples with `x[f] <= threshold` go left.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf(f64),
    Split {
        feature: u32,
        threshold: f64,
        left: u32,
        right: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    nodes: Vec<Node>,
}

#[derive(Debug, Clone, Copy)]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    /// Features drawn per split; `None` means all.
    pub max_features: Option<usize>,
}

struct Best {
    score: f64,
    feature: usize,
    threshold: f64,
}

impl Tree {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, left as usize).max(go(nodes, right as usize)),
            }
        }
        go(&self.nodes, 0)
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf(v) => return v,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[feature as usize] <= threshold { left } else { right } as usize,
            }
        }
    }

    /// Grows a tree over `rows` (repeats allowed, as in a bootstrap sample).
    /// `leaf` maps the rows reaching a leaf to its value.
    pub fn fit<F>(x: &Matrix, target: &[f64], rows: Vec<usize>, params: &TreeParams, rng: &mut impl Rng, leaf: F) -> Tree
    where
        F: Fn(&[usize]) -> f64,
    {
        let d = x.cols();
        let mut nodes: Vec<Node> = Vec::new();
        let mut features: Vec<usize> = (0..d).collect();
        let mut sorted: Vec<usize> = Vec::new();
        // (node slot, rows, depth)
        let mut stack: Vec<(usize, Vec<usize>, usize)> = Vec::new();
        nodes.push(Node::Leaf(0.0));
        stack.push((0, rows, 0));

        while let Some((slot, rows, depth)) = stack.pop() {
            let can_split = rows.len() >= params.min_samples_split.max(2)
                && params.max_depth.is_none_or(|m| depth < m)
                && !is_pure(target, &rows);
            let best = if can_split {
                find_split(x, target, &rows, params.max_features.unwrap_or(d), &mut features, &mut sorted, rng)
            } else {
                None
            };
            let Some(best) = best else {
                nodes[slot] = Node::Leaf(leaf(&rows));
                continue;
            };
            let (l_rows, r_rows): (Vec<usize>, Vec<usize>) =
                rows.iter().partition(|&&i| x.row(i)[best.feature] <= best.threshold);
            let left = nodes.len();
            nodes.push(Node::Leaf(0.0));
            nodes.push(Node::Leaf(0.0));
            nodes[slot] = Node::Split {
                feature: best.feature as u32,
                threshold: best.threshold,
                left: left as u32,
                right: left as u32 + 1,
            };
            // right first so the left subtree is numbered first
            stack.push((left + 1, r_rows, depth + 1));
            stack.push((left, l_rows, depth + 1));
        }
        Tree { nodes }
    }
}

fn is_pure(target: &[f64], rows: &[usize]) -> bool {
    let first = target[rows[0]];
    rows.iter().all(|&i| target[i] == first)
}

/// Features are visited in a random order. The first `max_features` are
/// always evaluated; if none of them separates the rows the search keeps
/// going through the remaining ones.
fn find_split(
    x: &Matrix,
    target: &[f64],
    rows: &[usize],
    max_features: usize,
    features: &mut [usize],
    sorted: &mut Vec<usize>,
    rng: &mut impl Rng,
) -> Option<Best> {
    let d = features.len();
    if max_features < d {
        features.shuffle(rng);
    }
    let total: f64 = rows.iter().map(|&i| target[i]).sum();
    let n = rows.len() as f64;
    let mut best: Option<Best> = None;

    for (visited, &f) in features.iter().enumerate() {
        if visited >= max_features && best.is_some() {
            break;
        }
        sorted.clear();
        sorted.extend_from_slice(rows);
        sorted.sort_by(|&a, &b| x.row(a)[f].total_cmp(&x.row(b)[f]));
        let mut s_left = 0.0;
        for k in 0..sorted.len() - 1 {
            s_left += target[sorted[k]];
            let (a, b) = (x.row(sorted[k])[f], x.row(sorted[k + 1])[f]);
            if a == b {
                continue;
            }
            let n_l = (k + 1) as f64;
            let s_right = total - s_left;
            let score = s_left * s_left / n_l + s_right * s_right / (n - n_l);
            if best.as_ref().is_none_or(|bst| score > bst.score) {
                let mid = a + (b - a) / 2.0;
                best = Some(Best {
                    score,
                    feature: f,
                    threshold: if mid < b { mid } else { a },
                });
            }
        }
    }
    best
}
