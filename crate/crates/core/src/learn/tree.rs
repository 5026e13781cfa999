//! CART decision trees with Gini impurity.

use std::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::record::{UserType, NUM_CLASSES};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    /// Parent Gini minus the size-weighted Gini of the children.
    pub impurity_decrease: f64,
}

pub fn gini(counts: &[usize; NUM_CLASSES]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

fn sum_sq(counts: &[usize; NUM_CLASSES]) -> u128 {
    counts.iter().map(|&c| (c as u128) * (c as u128)).sum()
}

/// Split quality as the exact fraction `Σ cL²/nL + Σ cR²/nR`. Larger is
/// better: weighted child Gini is `1 - value / n`.
#[derive(Debug, Clone, Copy)]
struct Score {
    num: u128,
    den: u128,
}

impl Score {
    fn new(left: &[usize; NUM_CLASSES], n_left: usize, right: &[usize; NUM_CLASSES], n_right: usize) -> Score {
        let (nl, nr) = (n_left as u128, n_right as u128);
        Score {
            num: sum_sq(left) * nr + sum_sq(right) * nl,
            den: nl * nr,
        }
    }

    fn cmp(&self, other: &Score) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }

    fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    feature: usize,
    threshold: f64,
    score: Score,
}

impl Candidate {
    /// Higher score first; then lower feature index; then lower threshold.
    fn beats(&self, other: &Candidate) -> bool {
        match self.score.cmp(&other.score) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => {
                self.feature < other.feature
                    || (self.feature == other.feature && self.threshold < other.threshold)
            }
        }
    }
}

fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) / 2.0;
    if mid >= hi {
        lo
    } else {
        mid
    }
}

enum FeatureOutcome {
    Constant,
    NoValidSplit,
    Best(Candidate),
}

fn best_on_feature(
    data: &[Vec<f64>],
    labels: &[UserType],
    rows: &[usize],
    feature: usize,
    min_leaf: usize,
    scratch: &mut Vec<(f64, usize)>,
) -> FeatureOutcome {
    let first = data[rows[0]][feature];
    if rows.iter().all(|&r| data[r][feature] == first) {
        return FeatureOutcome::Constant;
    }
    scratch.clear();
    scratch.extend(rows.iter().map(|&r| (data[r][feature], labels[r].index())));
    scratch.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = scratch.len();
    let mut right = [0usize; NUM_CLASSES];
    for &(_, c) in scratch.iter() {
        right[c] += 1;
    }
    let mut left = [0usize; NUM_CLASSES];
    let mut best: Option<Candidate> = None;
    for i in 0..n - 1 {
        let c = scratch[i].1;
        left[c] += 1;
        right[c] -= 1;
        let (lo, hi) = (scratch[i].0, scratch[i + 1].0);
        if lo == hi {
            continue;
        }
        let n_left = i + 1;
        if n_left < min_leaf || n - n_left < min_leaf {
            continue;
        }
        let cand = Candidate {
            feature,
            threshold: midpoint(lo, hi),
            score: Score::new(&left, n_left, &right, n - n_left),
        };
        if best.is_none_or(|b| cand.beats(&b)) {
            best = Some(cand);
        }
    }
    match best {
        Some(b) => FeatureOutcome::Best(b),
        None => FeatureOutcome::NoValidSplit,
    }
}

fn class_counts(labels: &[UserType], rows: &[usize]) -> [usize; NUM_CLASSES] {
    let mut counts = [0usize; NUM_CLASSES];
    for &r in rows {
        counts[labels[r].index()] += 1;
    }
    counts
}

fn to_split(best: Candidate, counts: &[usize; NUM_CLASSES], n: usize) -> Split {
    let n_f = n as f64;
    let parent_sq = sum_sq(counts) as f64 / (n_f * n_f);
    Split {
        feature: best.feature,
        threshold: best.threshold,
        impurity_decrease: best.score.value() / n_f - parent_sq,
    }
}

/// Best Gini split of `rows` over the candidate features, thresholds at
/// midpoints between consecutive distinct values. `None` when the rows are
/// pure, fewer than two, or constant on every candidate.
pub fn gini_best_split(
    data: &[Vec<f64>],
    labels: &[UserType],
    rows: &[usize],
    candidates: &[usize],
) -> Option<Split> {
    if rows.len() < 2 || candidates.is_empty() {
        return None;
    }
    let counts = class_counts(labels, rows);
    if counts.iter().filter(|&&c| c > 0).count() < 2 {
        return None;
    }
    let mut scratch = Vec::with_capacity(rows.len());
    let mut best: Option<Candidate> = None;
    for &f in candidates {
        if let FeatureOutcome::Best(c) = best_on_feature(data, labels, rows, f, 1, &mut scratch) {
            if best.is_none_or(|b| c.beats(&b)) {
                best = Some(c);
            }
        }
    }
    best.map(|b| to_split(b, &counts, rows.len()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Node {
    Leaf {
        class: UserType,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: u32,
        right: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeParams {
    /// Non-constant features examined per node.
    pub max_features: usize,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
}

/// Node 0 is the root. Samples with `x[feature] <= threshold` go left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

fn majority_class(counts: &[usize; NUM_CLASSES]) -> UserType {
    let mut best = 0;
    for c in 1..NUM_CLASSES {
        if counts[c] > counts[best] {
            best = c;
        }
    }
    UserType::ALL[best]
}

impl DecisionTree {
    /// Grow a tree on `rows` (indices into `data`, repeats allowed).
    pub fn fit<R: Rng>(
        data: &[Vec<f64>],
        labels: &[UserType],
        rows: Vec<usize>,
        params: &TreeParams,
        rng: &mut R,
    ) -> DecisionTree {
        let dim = data.first().map_or(0, Vec::len);
        let mut nodes = vec![Node::Leaf {
            class: UserType::Male,
        }];
        let mut stack = vec![(0usize, rows, 0usize)];
        let mut features: Vec<usize> = (0..dim).collect();
        let mut scratch = Vec::new();

        while let Some((slot, rows, depth)) = stack.pop() {
            let counts = class_counts(labels, &rows);
            let leaf = Node::Leaf {
                class: majority_class(&counts),
            };
            let pure = counts.iter().filter(|&&c| c > 0).count() < 2;
            let too_deep = params.max_depth.is_some_and(|d| depth >= d);
            if pure || too_deep || rows.len() < 2 * params.min_leaf.max(1) {
                nodes[slot] = leaf;
                continue;
            }

            // Partial Fisher-Yates: draw features until `max_features`
            // non-constant ones have been examined.
            let mut best: Option<Candidate> = None;
            let mut examined = 0;
            for i in 0..dim {
                if examined >= params.max_features {
                    break;
                }
                let j = rng.random_range(i..dim);
                features.swap(i, j);
                let f = features[i];
                match best_on_feature(data, labels, &rows, f, params.min_leaf, &mut scratch) {
                    FeatureOutcome::Constant => {}
                    FeatureOutcome::NoValidSplit => examined += 1,
                    FeatureOutcome::Best(c) => {
                        examined += 1;
                        if best.is_none_or(|b| c.beats(&b)) {
                            best = Some(c);
                        }
                    }
                }
            }

            let Some(best) = best else {
                nodes[slot] = leaf;
                continue;
            };
            let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
                .iter()
                .partition(|&&r| data[r][best.feature] <= best.threshold);
            let left = nodes.len();
            nodes.push(leaf.clone());
            let right = nodes.len();
            nodes.push(leaf);
            nodes[slot] = Node::Split {
                feature: best.feature,
                threshold: best.threshold,
                left: left as u32,
                right: right as u32,
            };
            stack.push((right, right_rows, depth + 1));
            stack.push((left, left_rows, depth + 1));
        }
        DecisionTree { nodes }
    }

    pub fn predict(&self, x: &[f64]) -> UserType {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { class } => return *class,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if x[*feature] <= *threshold {
                        *left as usize
                    } else {
                        *right as usize
                    };
                }
            }
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn from_nodes(nodes: Vec<Node>) -> DecisionTree {
        DecisionTree { nodes }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use UserType::*;

    #[test]
    fn two_points_split_at_midpoint() {
        let data = vec![vec![0.0], vec![1.0]];
        let labels = [Male, Female];
        let s = gini_best_split(&data, &labels, &[0, 1], &[0]).unwrap();
        assert_eq!(s.feature, 0);
        assert_eq!(s.threshold, 0.5);
        assert!((s.impurity_decrease - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pure_rows_do_not_split() {
        let data = vec![vec![0.0], vec![1.0], vec![2.0]];
        let labels = [Female; 3];
        assert!(gini_best_split(&data, &labels, &[0, 1, 2], &[0]).is_none());
    }

    #[test]
    fn identical_rows_do_not_split() {
        let data = vec![vec![3.0, 1.0], vec![3.0, 1.0]];
        let labels = [Male, Organization];
        assert!(gini_best_split(&data, &labels, &[0, 1], &[0, 1]).is_none());
    }

    #[test]
    fn ties_prefer_lower_feature_then_lower_threshold() {
        // Both features separate the classes perfectly.
        let data = vec![vec![0.0, 0.0], vec![1.0, 1.0]];
        let s = gini_best_split(&data, &[Male, Female], &[0, 1], &[1, 0]).unwrap();
        assert_eq!(s.feature, 0);
        // Two equally good thresholds on one feature.
        let data = vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]];
        let labels = [Male, Female, Male, Female];
        let s = gini_best_split(&data, &labels, &[0, 1, 2, 3], &[0]).unwrap();
        assert_eq!(s.threshold, 0.5);
    }

    #[test]
    fn midpoint_never_reaches_upper_value() {
        let lo = 1.0f64;
        let hi = f64::from_bits(lo.to_bits() + 1);
        let m = midpoint(lo, hi);
        assert!(lo <= m && m < hi);
    }

    #[test]
    fn single_tree_separates_two_points() {
        let data = vec![vec![0.0], vec![1.0]];
        let labels = [Male, Female];
        let params = TreeParams {
            max_features: 1,
            max_depth: None,
            min_leaf: 1,
        };
        let tree = DecisionTree::fit(&data, &labels, vec![0, 1], &params, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(tree.predict(&[0.0]), Male);
        assert_eq!(tree.predict(&[1.0]), Female);
    }

    #[test]
    fn tree_memorizes_distinct_points_even_with_narrow_sampling() {
        // Only feature 2 varies; the others are constant and must be skipped.
        let data: Vec<Vec<f64>> = (0..12).map(|i| vec![1.0, 1.0, i as f64, 1.0]).collect();
        let labels: Vec<UserType> = (0..12).map(|i| UserType::ALL[(i * 7) % 3]).collect();
        let params = TreeParams {
            max_features: 1,
            max_depth: None,
            min_leaf: 1,
        };
        let tree = DecisionTree::fit(&data, &labels, (0..12).collect(), &params, &mut ChaCha8Rng::seed_from_u64(9));
        for (x, y) in data.iter().zip(&labels) {
            assert_eq!(tree.predict(x), *y);
        }
    }

    #[test]
    fn max_depth_zero_is_a_majority_leaf() {
        let data = vec![vec![0.0], vec![1.0], vec![2.0]];
        let labels = [Organization, Female, Organization];
        let params = TreeParams {
            max_features: 1,
            max_depth: Some(0),
            min_leaf: 1,
        };
        let tree = DecisionTree::fit(&data, &labels, vec![0, 1, 2], &params, &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(tree.nodes().len(), 1);
        assert_eq!(tree.predict(&[1.0]), Organization);
    }
}
