use rand::seq::SliceRandom;
use rand::Rng;

use super::logistic::sigmoid;
use crate::seed;

const BATCH: usize = 32;

/// One hidden layer of logistic units feeding a logistic output, trained
/// with mini-batch backpropagation on cross-entropy.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    /// `hidden x dim`, row-major.
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: f64,
    dim: usize,
}

impl Mlp {
    fn hidden(&self, x: &[f64], out: &mut [f64]) {
        for (j, h) in out.iter_mut().enumerate() {
            let row = &self.w1[j * self.dim..(j + 1) * self.dim];
            *h = sigmoid(row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.b1[j]);
        }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut h = vec![0.0; self.b1.len()];
        self.hidden(x, &mut h);
        sigmoid(h.iter().zip(&self.w2).map(|(a, w)| a * w).sum::<f64>() + self.b2)
    }

    pub(crate) fn fit(
        x: &[&[f64]],
        y: &[bool],
        hidden: usize,
        learning_rate: f64,
        epochs: usize,
        rng_seed: u64,
    ) -> Self {
        let dim = x[0].len();
        let mut rng = seed::rng(rng_seed);
        let r1 = 1.0 / (dim as f64).sqrt();
        let r2 = 1.0 / (hidden as f64).sqrt();
        let mut net = Mlp {
            w1: (0..hidden * dim).map(|_| rng.random_range(-r1..r1)).collect(),
            b1: vec![0.0; hidden],
            w2: (0..hidden).map(|_| rng.random_range(-r2..r2)).collect(),
            b2: 0.0,
            dim,
        };

        let mut order: Vec<usize> = (0..x.len()).collect();
        let mut h = vec![0.0; hidden];
        let mut g_w1 = vec![0.0; hidden * dim];
        let mut g_b1 = vec![0.0; hidden];
        let mut g_w2 = vec![0.0; hidden];
        for _ in 0..epochs {
            order.shuffle(&mut rng);
            for batch in order.chunks(BATCH) {
                g_w1.iter_mut().for_each(|g| *g = 0.0);
                g_b1.iter_mut().for_each(|g| *g = 0.0);
                g_w2.iter_mut().for_each(|g| *g = 0.0);
                let mut g_b2 = 0.0;
                for &i in batch {
                    net.hidden(x[i], &mut h);
                    let out = sigmoid(h.iter().zip(&net.w2).map(|(a, w)| a * w).sum::<f64>() + net.b2);
                    let delta = out - if y[i] { 1.0 } else { 0.0 };
                    g_b2 += delta;
                    for j in 0..hidden {
                        g_w2[j] += delta * h[j];
                        let dh = delta * net.w2[j] * h[j] * (1.0 - h[j]);
                        g_b1[j] += dh;
                        for (g, v) in g_w1[j * dim..(j + 1) * dim].iter_mut().zip(x[i]) {
                            *g += dh * v;
                        }
                    }
                }
                let step = learning_rate / batch.len() as f64;
                for (w, g) in net.w1.iter_mut().zip(&g_w1) {
                    *w -= step * g;
                }
                for (b, g) in net.b1.iter_mut().zip(&g_b1) {
                    *b -= step * g;
                }
                for (w, g) in net.w2.iter_mut().zip(&g_w2) {
                    *w -= step * g;
                }
                net.b2 -= step * g_b2;
            }
        }
        net
    }
}

#[cfg(test)]
mod tests {
    use crate::data::Sample;
    use crate::learners::{train, LearnerSpec};
    use rand::Rng;

    #[test]
    fn learns_a_nonlinear_boundary() {
        // positives inside the unit circle
        let mut rng = crate::seed::rng(12);
        let data: Vec<Sample> = (0..400)
            .map(|_| {
                let p = vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
                let inside = p[0] * p[0] + p[1] * p[1] < 1.2;
                Sample::labeled(p, inside)
            })
            .collect();
        let spec = LearnerSpec::Nn {
            hidden: 16,
            learning_rate: 0.1,
            epochs: 500,
        };
        let m = train(&spec, &data, 3).unwrap();
        let scores = m.predict_batch(&data).unwrap();
        let labels: Vec<bool> = data.iter().map(|s| s.label.unwrap()).collect();
        let auc = crate::metrics::auc(&scores, &labels).unwrap();
        assert!(auc > 0.9, "AUC {auc}");
    }
}
