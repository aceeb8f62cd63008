//! Classification tree grown by greedy Gini splits.

use rand::seq::index;

use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Share of features tried at each split; 1.0 tries all of them.
    pub feature_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf {
        positives: usize,
        total: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Nodes in a flat arena, root at index 0. Samples with
/// `x[feature] <= threshold` go left.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<Node>,
}

fn gini(pos: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p = pos as f64 / total as f64;
    2.0 * p * (1.0 - p)
}

struct Best {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

struct Builder<'a> {
    x: &'a [&'a [f64]],
    y: &'a [bool],
    params: TreeParams,
    nodes: Vec<Node>,
    rng: rand_chacha::ChaCha8Rng,
}

impl Builder<'_> {
    fn candidate_features(&mut self) -> Vec<usize> {
        let d = self.x[0].len();
        if self.params.feature_fraction >= 1.0 {
            return (0..d).collect();
        }
        let m = ((self.params.feature_fraction * d as f64).ceil() as usize).clamp(1, d);
        let mut feats = index::sample(&mut self.rng, d, m).into_vec();
        feats.sort_unstable();
        feats
    }

    fn best_split(&mut self, idx: &[usize], pos: usize) -> Option<Best> {
        let n = idx.len();
        let min_leaf = self.params.min_leaf.max(1);
        let parent = gini(pos, n);
        let mut best: Option<Best> = None;
        let mut sorted = idx.to_vec();
        for f in self.candidate_features() {
            sorted.sort_by(|&a, &b| self.x[a][f].total_cmp(&self.x[b][f]).then(a.cmp(&b)));
            let mut left_pos = 0;
            for i in 1..n {
                if self.y[sorted[i - 1]] {
                    left_pos += 1;
                }
                let (lo, hi) = (self.x[sorted[i - 1]][f], self.x[sorted[i]][f]);
                if lo == hi || i < min_leaf || n - i < min_leaf {
                    continue;
                }
                let impurity = (i as f64 * gini(left_pos, i)
                    + (n - i) as f64 * gini(pos - left_pos, n - i))
                    / n as f64;
                if impurity < best.as_ref().map_or(parent - 1e-12, |b| b.impurity) {
                    best = Some(Best {
                        feature: f,
                        threshold: lo + (hi - lo) / 2.0,
                        impurity,
                    });
                }
            }
        }
        best
    }

    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let pos = idx.iter().filter(|&&i| self.y[i]).count();
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf {
            positives: pos,
            total: idx.len(),
        });
        if depth >= self.params.max_depth || pos == 0 || pos == idx.len() {
            return id;
        }
        let Some(best) = self.best_split(&idx, pos) else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = idx
            .into_iter()
            .partition(|&i| self.x[i][best.feature] <= best.threshold);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        id
    }
}

impl Tree {
    /// Grow on the rows `idx` of `x` (all rows when `None`).
    pub(crate) fn fit_rows(
        x: &[&[f64]],
        y: &[bool],
        idx: Vec<usize>,
        params: &TreeParams,
        rng_seed: u64,
    ) -> Self {
        let mut b = Builder {
            x,
            y,
            params: *params,
            nodes: Vec::new(),
            rng: seed::rng(rng_seed),
        };
        b.grow(idx, 0);
        Tree { nodes: b.nodes }
    }

    pub(crate) fn fit(x: &[&[f64]], y: &[bool], params: &TreeParams, rng_seed: u64) -> Self {
        Tree::fit_rows(x, y, (0..x.len()).collect(), params, rng_seed)
    }

    pub fn from_nodes(nodes: Vec<Node>) -> Self {
        Tree { nodes }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, left).max(go(nodes, right)),
            }
        }
        go(&self.nodes, 0)
    }

    /// Positive frequency of the leaf `x` falls into.
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { positives, total } => return positives as f64 / total as f64,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[feature] <= threshold { left } else { right },
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Sample;
    use crate::learners::{train, LearnerSpec, Params, TrainedModel};
    use rand::Rng;

    /// XOR clusters with unequal sizes so the first split has positive gain.
    fn xor(seed: u64) -> Vec<Sample> {
        let mut rng = crate::seed::rng(seed);
        let mut out = Vec::new();
        for (cx, cy, n) in [(-1.0, -1.0, 40), (1.0, 1.0, 20), (-1.0, 1.0, 20), (1.0, -1.0, 40)] {
            let label = (cx > 0.0) != (cy > 0.0);
            for _ in 0..n {
                let x = cx + rng.random_range(-0.3..0.3);
                let y = cy + rng.random_range(-0.3..0.3);
                out.push(Sample::labeled(vec![x, y], label));
            }
        }
        out
    }

    #[test]
    fn depth_two_solves_xor() {
        let data = xor(3);
        let m = train(&LearnerSpec::Cart { max_depth: 2, min_leaf: 1 }, &data, 0).unwrap();
        let correct = data
            .iter()
            .filter(|s| (m.predict_proba(&s.features).unwrap() >= 0.5) == s.label.unwrap())
            .count();
        assert!(correct as f64 / data.len() as f64 >= 0.95);
        match m.params() {
            Params::Cart(t) => {
                let used: std::collections::HashSet<usize> = t
                    .nodes()
                    .iter()
                    .filter_map(|n| match n {
                        Node::Split { feature, .. } => Some(*feature),
                        _ => None,
                    })
                    .collect();
                assert_eq!(used.len(), 2);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn leaf_frequency() {
        let tree = Tree::from_nodes(vec![Node::Leaf {
            positives: 3,
            total: 4,
        }]);
        let m = TrainedModel::from_params(Params::Cart(tree), 2, 0);
        assert_eq!(m.predict_proba(&[0.0, 0.0]).unwrap(), 0.75);
    }

    #[test]
    fn respects_depth_and_min_leaf() {
        let data = xor(9);
        for depth in [2, 3, 5] {
            let m = train(&LearnerSpec::Cart { max_depth: depth, min_leaf: 7 }, &data, 0).unwrap();
            let Params::Cart(t) = m.params() else { unreachable!() };
            assert!(t.depth() <= depth);
            for n in t.nodes() {
                if let Node::Leaf { total, .. } = n {
                    assert!(*total >= 7);
                }
            }
        }
    }
}
