//! CART with Gini impurity.
//!
//! Candidate thresholds are midpoints between consecutive distinct values of
//! a feature among the samples in a node. Split quality is compared exactly
//! on integer counts, so equal-impurity candidates always resolve to the
//! lowest feature index and then the lowest threshold.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{Dataset, Prediction};
use crate::corpus::Label;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum TreeNode {
    Leaf {
        spam: u32,
        ham: u32,
    },
    /// Samples with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    /// Node 0 is the root.
    pub nodes: Vec<TreeNode>,
}

/// Gini impurity of a node holding `spam` and `ham` samples.
pub fn gini(spam: u32, ham: u32) -> f64 {
    let n = (spam + ham) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let (p, q) = (spam as f64 / n, ham as f64 / n);
    1.0 - p * p - q * q
}

/// `sum over children of (spam^2 + ham^2) / size`, as an exact fraction.
/// Larger means purer children (lower weighted Gini).
#[derive(Debug, Clone, Copy)]
struct Purity {
    num: u128,
    den: u128,
}

impl Purity {
    fn of_node(spam: u32, ham: u32) -> Self {
        let (s, h) = (spam as u128, ham as u128);
        Self {
            num: s * s + h * h,
            den: s + h,
        }
    }

    fn of_split(left: (u32, u32), right: (u32, u32)) -> Self {
        let l = Self::of_node(left.0, left.1);
        let r = Self::of_node(right.0, right.1);
        Self {
            num: l.num * r.den + r.num * l.den,
            den: l.den * r.den,
        }
    }

    fn cmp(&self, other: &Self) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

struct Candidate {
    feature: usize,
    threshold: f64,
    purity: Purity,
}

struct Builder<'a> {
    data: &'a Dataset,
    /// Per feature, the nonzero `(value, sample)` entries sorted by value.
    columns: Vec<Vec<(f64, u32)>>,
    in_node: Vec<bool>,
    max_depth: usize,
    nodes: Vec<TreeNode>,
    groups: Vec<(f64, u32, u32)>,
}

impl DecisionTree {
    pub(crate) fn fit(data: &Dataset, max_depth: usize) -> Self {
        let mut columns: Vec<Vec<(f64, u32)>> = vec![Vec::new(); data.dim];
        for (i, row) in data.rows.iter().enumerate() {
            for &(j, v) in row {
                if v != 0.0 {
                    columns[j].push((v, i as u32));
                }
            }
        }
        for col in &mut columns {
            col.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        }
        let mut builder = Builder {
            data,
            columns,
            in_node: vec![false; data.rows.len()],
            max_depth,
            nodes: Vec::new(),
            groups: Vec::new(),
        };
        let all: Vec<u32> = (0..data.rows.len() as u32).collect();
        builder.grow(&all, 0);
        Self {
            nodes: builder.nodes,
        }
    }

    /// The `(feature, threshold)` tested at the root, if it is not a leaf.
    pub fn root_split(&self) -> Option<(usize, f64)> {
        match self.nodes.first()? {
            TreeNode::Split {
                feature, threshold, ..
            } => Some((*feature, *threshold)),
            TreeNode::Leaf { .. } => None,
        }
    }

    pub fn num_splits(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, TreeNode::Split { .. }))
            .count()
    }

    fn value(x: &[(usize, f64)], feature: usize) -> f64 {
        x.binary_search_by_key(&feature, |&(j, _)| j)
            .map_or(0.0, |pos| x[pos].1)
    }

    pub(crate) fn predict(&self, x: &[(usize, f64)]) -> Prediction {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if Self::value(x, *feature) <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
                TreeNode::Leaf { spam, ham } => {
                    return Prediction {
                        label: if spam > ham {
                            Label::Spam
                        } else {
                            Label::Legitimate
                        },
                        score: *spam as f64 / (*spam + *ham).max(1) as f64,
                    };
                }
            }
        }
    }
}

impl Builder<'_> {
    fn counts(&self, samples: &[u32]) -> (u32, u32) {
        let spam = samples
            .iter()
            .filter(|&&i| self.data.labels[i as usize] == Label::Spam)
            .count() as u32;
        (spam, samples.len() as u32 - spam)
    }

    fn grow(&mut self, samples: &[u32], depth: usize) -> usize {
        let id = self.nodes.len();
        let (spam, ham) = self.counts(samples);
        self.nodes.push(TreeNode::Leaf { spam, ham });
        if spam == 0 || ham == 0 || depth >= self.max_depth || samples.len() < 2 {
            return id;
        }
        let Some(best) = self.best_split(samples, (spam, ham)) else {
            return id;
        };

        let (left, right): (Vec<u32>, Vec<u32>) = samples.iter().partition(|&&i| {
            DecisionTree::value(&self.data.rows[i as usize], best.feature) <= best.threshold
        });
        let l = self.grow(&left, depth + 1);
        let r = self.grow(&right, depth + 1);
        self.nodes[id] = TreeNode::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: l,
            right: r,
        };
        id
    }

    fn best_split(&mut self, samples: &[u32], totals: (u32, u32)) -> Option<Candidate> {
        for &i in samples {
            self.in_node[i as usize] = true;
        }
        let mut best: Option<Candidate> = None;
        for feature in 0..self.data.dim {
            self.collect_groups(feature, totals);
            let mut left = (0u32, 0u32);
            for g in 0..self.groups.len().saturating_sub(1) {
                let (value, s, h) = self.groups[g];
                left = (left.0 + s, left.1 + h);
                let right = (totals.0 - left.0, totals.1 - left.1);
                let purity = Purity::of_split(left, right);
                if best
                    .as_ref()
                    .is_none_or(|b| purity.cmp(&b.purity) == Ordering::Greater)
                {
                    let next = self.groups[g + 1].0;
                    let mut threshold = (value + next) / 2.0;
                    if threshold >= next {
                        threshold = value;
                    }
                    best = Some(Candidate {
                        feature,
                        threshold,
                        purity,
                    });
                }
            }
        }
        for &i in samples {
            self.in_node[i as usize] = false;
        }
        let parent = Purity::of_node(totals.0, totals.1);
        best.filter(|b| b.purity.cmp(&parent) == Ordering::Greater)
    }

    /// Distinct values of `feature` within the node, ascending, with per
    /// class counts. Implicit zeros form their own group.
    fn collect_groups(&mut self, feature: usize, totals: (u32, u32)) {
        self.groups.clear();
        let mut nonzero = (0u32, 0u32);
        let mut zero_at = None;
        for &(value, i) in &self.columns[feature] {
            if !self.in_node[i as usize] {
                continue;
            }
            let is_spam = self.data.labels[i as usize] == Label::Spam;
            if is_spam {
                nonzero.0 += 1;
            } else {
                nonzero.1 += 1;
            }
            if value > 0.0 && zero_at.is_none() {
                zero_at = Some(self.groups.len());
                self.groups.push((0.0, 0, 0));
            }
            match self.groups.last_mut() {
                Some(last) if last.0 == value => {
                    if is_spam {
                        last.1 += 1;
                    } else {
                        last.2 += 1;
                    }
                }
                _ => self
                    .groups
                    .push((value, u32::from(is_spam), u32::from(!is_spam))),
            }
        }
        let zeros = (totals.0 - nonzero.0, totals.1 - nonzero.1);
        match zero_at {
            Some(at) if zeros == (0, 0) => {
                self.groups.remove(at);
            }
            Some(at) => self.groups[at] = (0.0, zeros.0, zeros.1),
            None if zeros != (0, 0) => self.groups.push((0.0, zeros.0, zeros.1)),
            None => {}
        }
    }
}
