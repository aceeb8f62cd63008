use super::tree::{Tree, TreeParams};
use crate::seed;

/// Bagged CART trees with per-split feature subsampling.
///
/// A single-tree forest is grown on the full sample rather than on a
/// bootstrap draw, so with feature fraction 1.0 it equals plain CART.
#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    trees: Vec<Tree>,
}

impl Forest {
    pub(crate) fn fit(
        x: &[&[f64]],
        y: &[bool],
        trees: usize,
        max_depth: usize,
        feature_fraction: f64,
        rng_seed: u64,
    ) -> Self {
        use rand::Rng;
        let n = x.len();
        let params = TreeParams {
            max_depth,
            min_leaf: 1,
            feature_fraction,
        };
        let trees = (0..trees.max(1))
            .map(|t| {
                let tree_seed = seed::derive(rng_seed, t as u64);
                if trees <= 1 {
                    return Tree::fit(x, y, &params, tree_seed);
                }
                let mut rng = seed::rng(seed::derive(tree_seed, u64::MAX));
                let mut rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                // a bootstrap draw can miss a class entirely; the tree then
                // just predicts the class it saw
                rows.sort_unstable();
                Tree::fit_rows(x, y, rows, &params, tree_seed)
            })
            .collect();
        Forest { trees }
    }

    pub fn from_trees(trees: Vec<Tree>) -> Self {
        Forest { trees }
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    /// Mean of the trees' leaf frequencies.
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict(x)).sum::<f64>() / self.trees.len() as f64
    }
}
