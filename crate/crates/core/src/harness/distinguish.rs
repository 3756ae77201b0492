//! Fixed, simple distinguishers used as empirical privacy proxies.
//!
//! None of these proves indistinguishability. They catch the gross failures
//! (a repeated field, a biased byte, a learnable pattern) that would make a
//! formal argument moot.

/// Maps bytes to centred features in `[-1, 1]`.
pub fn byte_features(bytes: &[u8]) -> Vec<f64> {
    bytes.iter().map(|&b| (b as f64 - 127.5) / 127.5).collect()
}

/// L2-regularised logistic regression trained by full-batch gradient
/// descent from zero weights. Deterministic for a given input.
#[derive(Clone, Debug)]
pub struct LogisticClassifier {
    weights: Vec<f64>,
    bias: f64,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

impl LogisticClassifier {
    pub fn train(x: &[Vec<f64>], y: &[bool], epochs: usize, lr: f64, l2: f64) -> Self {
        assert_eq!(x.len(), y.len());
        let dim = x.first().map_or(0, Vec::len);
        let mut model = Self {
            weights: vec![0.0; dim],
            bias: 0.0,
        };
        if x.is_empty() {
            return model;
        }
        let n = x.len() as f64;
        let mut grad = vec![0.0; dim];
        for _ in 0..epochs {
            grad.iter_mut().for_each(|g| *g = 0.0);
            let mut grad_b = 0.0;
            for (xi, &yi) in x.iter().zip(y) {
                let err = sigmoid(model.score(xi)) - if yi { 1.0 } else { 0.0 };
                for (g, v) in grad.iter_mut().zip(xi) {
                    *g += err * v;
                }
                grad_b += err;
            }
            for (w, g) in model.weights.iter_mut().zip(&grad) {
                *w -= lr * (g / n + l2 * *w);
            }
            model.bias -= lr * grad_b / n;
        }
        model
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        self.bias + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }

    pub fn predict(&self, x: &[f64]) -> bool {
        self.score(x) > 0.0
    }

    pub fn accuracy(&self, x: &[Vec<f64>], y: &[bool]) -> f64 {
        if x.is_empty() {
            return 0.5;
        }
        let hits = x
            .iter()
            .zip(y)
            .filter(|(xi, &yi)| self.predict(xi) == yi)
            .count();
        hits as f64 / x.len() as f64
    }
}

/// Trains on the first half of the labelled samples, returns accuracy on
/// the second half. Samples must all have the same length.
pub fn holdout_accuracy(samples: &[(Vec<u8>, bool)]) -> f64 {
    let split = samples.len() / 2;
    let (train, test) = samples.split_at(split);
    let feats = |s: &[(Vec<u8>, bool)]| -> (Vec<Vec<f64>>, Vec<bool>) {
        s.iter().map(|(b, l)| (byte_features(b), *l)).unzip()
    };
    let (xt, yt) = feats(train);
    let (xv, yv) = feats(test);
    let model = LogisticClassifier::train(&xt, &yt, 60, 0.5, 1e-3);
    model.accuracy(&xv, &yv)
}

/// Largest per-position |mean difference| between two equal-length sample
/// sets, in units of its standard error. Positions constant in both sets
/// and equal are skipped.
pub fn max_mean_difference_sigma(a: &[Vec<u8>], b: &[Vec<u8>]) -> f64 {
    let len = a.first().map_or(0, Vec::len);
    let stats = |s: &[Vec<u8>], i: usize| {
        let n = s.len() as f64;
        let mean = s.iter().map(|v| v[i] as f64).sum::<f64>() / n;
        let var = s.iter().map(|v| (v[i] as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, var / n)
    };
    (0..len)
        .map(|i| {
            let (ma, va) = stats(a, i);
            let (mb, vb) = stats(b, i);
            let se = (va + vb).sqrt();
            if se == 0.0 {
                if ma == mb {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                (ma - mb).abs() / se
            }
        })
        .fold(0.0, f64::max)
}
