/// Logistic regression fitted by full-batch gradient descent.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn dot(w: &[f64], x: &[f64]) -> f64 {
    w.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Mean logistic loss plus `l2 / 2 * |w|^2` (bias unpenalized), and its
/// gradient with respect to `(weights, bias)`.
pub fn logistic_objective(
    weights: &[f64],
    bias: f64,
    x: &[&[f64]],
    y: &[bool],
    l2: f64,
) -> (f64, Vec<f64>, f64) {
    let n = x.len() as f64;
    let mut loss = 0.0;
    let mut grad = vec![0.0; weights.len()];
    let mut grad_b = 0.0;
    for (xi, &yi) in x.iter().zip(y) {
        let z = dot(weights, xi) + bias;
        let t = if yi { 1.0 } else { 0.0 };
        loss += softplus(z) - t * z;
        let r = sigmoid(z) - t;
        for (g, v) in grad.iter_mut().zip(xi.iter()) {
            *g += r * v;
        }
        grad_b += r;
    }
    loss /= n;
    grad_b /= n;
    for (g, w) in grad.iter_mut().zip(weights) {
        *g = *g / n + l2 * w;
    }
    loss += 0.5 * l2 * dot(weights, weights);
    (loss, grad, grad_b)
}

impl LogisticModel {
    pub(crate) fn fit(x: &[&[f64]], y: &[bool], learning_rate: f64, epochs: usize, l2: f64) -> Self {
        let dim = x[0].len();
        let mut weights = vec![0.0; dim];
        let mut bias = 0.0;
        for _ in 0..epochs {
            let (_, grad, grad_b) = logistic_objective(&weights, bias, x, y, l2);
            for (w, g) in weights.iter_mut().zip(&grad) {
                *w -= learning_rate * g;
            }
            bias -= learning_rate * grad_b;
        }
        LogisticModel { weights, bias }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        sigmoid(dot(&self.weights, x) + self.bias)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Sample;
    use crate::learners::{train, LearnerSpec};
    use proptest::prelude::*;

    #[test]
    fn separable_points_rank_perfectly() {
        // Two clouds split by the line x + y = 0 with a margin of 0.5.
        let mut rng = crate::seed::rng(5);
        let mut samples = Vec::new();
        while samples.len() < 200 {
            use rand::Rng;
            let p: [f64; 2] = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
            let s = p[0] + p[1];
            if s.abs() < 0.5 {
                continue;
            }
            samples.push(Sample::labeled(p.to_vec(), s > 0.0));
        }
        let spec = LearnerSpec::Lr {
            learning_rate: 0.5,
            epochs: 200,
            l2: 0.0,
        };
        let m = train(&spec, &samples, 0).unwrap();
        let scores = m.predict_batch(&samples).unwrap();
        let labels: Vec<bool> = samples.iter().map(|s| s.label.unwrap()).collect();
        // pairwise oracle
        let (mut good, mut total) = (0.0f64, 0.0f64);
        for (i, si) in scores.iter().enumerate() {
            for (j, sj) in scores.iter().enumerate() {
                if labels[i] && !labels[j] {
                    total += 1.0;
                    good += if si > sj { 1.0 } else if si == sj { 0.5 } else { 0.0 };
                }
            }
        }
        assert!((good / total - 1.0).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn gradient_matches_central_differences(
            rows in prop::collection::vec((prop::collection::vec(-2.0f64..2.0, 3), any::<bool>()), 2..12),
            w in prop::collection::vec(-1.0f64..1.0, 3),
            b in -1.0f64..1.0,
            l2 in 0.0f64..0.1,
        ) {
            let x: Vec<&[f64]> = rows.iter().map(|r| r.0.as_slice()).collect();
            let y: Vec<bool> = rows.iter().map(|r| r.1).collect();
            let (_, grad, grad_b) = logistic_objective(&w, b, &x, &y, l2);
            let h = 1e-5;
            let rel = |a: f64, n: f64| (a - n).abs() / n.abs().max(a.abs()).max(1e-3);
            for k in 0..3 {
                let mut wp = w.clone();
                let mut wm = w.clone();
                wp[k] += h;
                wm[k] -= h;
                let num = (logistic_objective(&wp, b, &x, &y, l2).0 - logistic_objective(&wm, b, &x, &y, l2).0) / (2.0 * h);
                prop_assert!(rel(grad[k], num) < 1e-5, "w{}: {} vs {}", k, grad[k], num);
            }
            let num_b = (logistic_objective(&w, b + h, &x, &y, l2).0 - logistic_objective(&w, b - h, &x, &y, l2).0) / (2.0 * h);
            prop_assert!(rel(grad_b, num_b) < 1e-5);
        }
    }
}
