use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{DecisionTree, TreeParams};
use super::{ForestParams, Prediction};
use crate::record::{UserType, NUM_CLASSES};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    trees: Vec<DecisionTree>,
}

/// Randomness for tree `index`: its own ChaCha stream under the forest seed,
/// so results do not depend on how trees are scheduled.
fn tree_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    rng
}

impl RandomForest {
    pub fn fit(data: &[Vec<f64>], labels: &[UserType], params: &ForestParams, seed: u64) -> RandomForest {
        let n = data.len();
        let dim = data.first().map_or(0, Vec::len);
        let tree_params = TreeParams {
            max_features: params
                .max_features
                .unwrap_or_else(|| (dim as f64).sqrt().ceil() as usize)
                .clamp(1, dim.max(1)),
            max_depth: params.max_depth,
            min_leaf: params.min_leaf,
        };
        let trees = (0..params.trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = tree_rng(seed, t);
                let rows = if params.bootstrap {
                    (0..n).map(|_| rng.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                DecisionTree::fit(data, labels, rows, &tree_params, &mut rng)
            })
            .collect();
        RandomForest { trees }
    }

    pub fn from_trees(trees: Vec<DecisionTree>) -> RandomForest {
        RandomForest { trees }
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    pub fn votes(&self, x: &[f64]) -> [usize; NUM_CLASSES] {
        let mut votes = [0; NUM_CLASSES];
        for tree in &self.trees {
            votes[tree.predict(x).index()] += 1;
        }
        votes
    }

    /// Plurality vote; ties go to the earliest class. Scores are vote shares.
    pub fn predict(&self, x: &[f64]) -> Prediction {
        let votes = self.votes(x);
        let total = self.trees.len().max(1) as f64;
        Prediction::argmax(votes.map(|v| v as f64 / total))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::tree::Node;
    use UserType::*;

    fn stump(class: UserType) -> DecisionTree {
        DecisionTree::from_nodes(vec![Node::Leaf { class }])
    }

    #[test]
    fn plurality_vote() {
        let f = RandomForest::from_trees(vec![stump(Male), stump(Female), stump(Male)]);
        assert_eq!(f.predict(&[0.0]).label, Male);
        assert_eq!(f.votes(&[0.0]), [2, 1, 0]);
    }

    #[test]
    fn three_way_tie_goes_to_male() {
        let f = RandomForest::from_trees(vec![stump(Organization), stump(Female), stump(Male)]);
        assert_eq!(f.predict(&[0.0]).label, Male);
    }

    #[test]
    fn vote_counts_sum_to_tree_count() {
        let data: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64, (i % 4) as f64]).collect();
        let labels: Vec<UserType> = (0..30).map(|i| UserType::ALL[i % 3]).collect();
        let params = ForestParams {
            trees: 17,
            ..ForestParams::default()
        };
        let f = RandomForest::fit(&data, &labels, &params, 5);
        for x in &data {
            assert_eq!(f.votes(x).iter().sum::<usize>(), 17);
        }
    }

    #[test]
    fn deterministic_for_a_seed() {
        let data: Vec<Vec<f64>> = (0..40).map(|i| vec![(i * 37 % 11) as f64, i as f64]).collect();
        let labels: Vec<UserType> = (0..40).map(|i| UserType::ALL[(i / 3) % 3]).collect();
        let p = ForestParams::default();
        assert_eq!(RandomForest::fit(&data, &labels, &p, 3), RandomForest::fit(&data, &labels, &p, 3));
        assert_ne!(RandomForest::fit(&data, &labels, &p, 3), RandomForest::fit(&data, &labels, &p, 4));
    }
}
