use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{normalize, FeatureStats, FeatureVector, TrainingPair, NUM_FEATURES};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const RANKNET_CHECKPOINT_VERSION: &str = "ranknet-v1";

/// A `3 → hidden (tanh) → 1` scoring network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankNet<T> {
    pub hidden: usize,
    /// Input-to-hidden weights, row-major `[feature][unit]`.
    pub w1: Vec<T>,
    pub b1: Vec<T>,
    pub w2: Vec<T>,
    pub b2: T,
}

impl<T: Scalar> RankNet<T> {
    pub fn zeros(hidden: usize) -> Self {
        RankNet {
            hidden,
            w1: vec![T::zero(); NUM_FEATURES * hidden],
            b1: vec![T::zero(); hidden],
            w2: vec![T::zero(); hidden],
            b2: T::zero(),
        }
    }

    /// Uniform `±1/√fan_in` weights, zero biases.
    pub fn new<R: Rng>(hidden: usize, rng: &mut R) -> Result<Self> {
        if hidden == 0 {
            return Err(Error::InvalidArgument("hidden size must be at least 1".into()));
        }
        let mut net = RankNet::zeros(hidden);
        let s1 = 1.0 / (NUM_FEATURES as f64).sqrt();
        let s2 = 1.0 / (hidden as f64).sqrt();
        net.w1.iter_mut().for_each(|w| *w = T::of(rng.gen_range(-s1..s1)));
        net.w2.iter_mut().for_each(|w| *w = T::of(rng.gen_range(-s2..s2)));
        Ok(net)
    }

    pub fn tensor_names() -> [&'static str; 4] {
        ["w1", "b1", "w2", "b2"]
    }

    pub fn tensors(&self) -> [&[T]; 4] {
        [&self.w1, &self.b1, &self.w2, std::slice::from_ref(&self.b2)]
    }

    pub fn tensors_mut(&mut self) -> [&mut [T]; 4] {
        [
            &mut self.w1,
            &mut self.b1,
            &mut self.w2,
            std::slice::from_mut(&mut self.b2),
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|v| v.is_finite()))
    }

    fn hidden_activations(&self, x: &[T; NUM_FEATURES]) -> Vec<T> {
        (0..self.hidden)
            .map(|j| {
                let mut z = self.b1[j];
                for (i, xi) in x.iter().enumerate() {
                    z += *xi * self.w1[i * self.hidden + j];
                }
                z.tanh()
            })
            .collect()
    }

    pub fn score(&self, features: &FeatureVector<T>) -> T {
        let a = self.hidden_activations(&features.to_array());
        a.iter().zip(&self.w2).map(|(a, w)| *a * *w).sum::<T>() + self.b2
    }

    /// Adds `coef · ∂score/∂θ` at `features` into `grads`.
    fn accumulate_score_gradient(&self, features: &FeatureVector<T>, coef: T, grads: &mut RankNet<T>) {
        let x = features.to_array();
        let a = self.hidden_activations(&x);
        grads.b2 += coef;
        for j in 0..self.hidden {
            grads.w2[j] += coef * a[j];
            let dz = coef * self.w2[j] * (T::one() - a[j] * a[j]);
            grads.b1[j] += dz;
            for (i, xi) in x.iter().enumerate() {
                grads.w1[i * self.hidden + j] += dz * *xi;
            }
        }
    }

    /// Loss of one ordered pair and its gradient through both scores.
    pub fn pair_gradient(&self, pos: &FeatureVector<T>, neg: &FeatureVector<T>) -> (T, RankNet<T>) {
        let diff = self.score(pos) - self.score(neg);
        // dL/d(diff) = −σ(−diff)
        let d = -T::one() / (T::one() + diff.exp());
        let mut grads = RankNet::zeros(self.hidden);
        self.accumulate_score_gradient(pos, d, &mut grads);
        self.accumulate_score_gradient(neg, -d, &mut grads);
        (softplus(-diff), grads)
    }

    fn step(&mut self, grads: &RankNet<T>, learning_rate: T) {
        for (p, g) in self.tensors_mut().into_iter().zip(grads.tensors()) {
            for (p, g) in p.iter_mut().zip(g) {
                *p -= learning_rate * *g;
            }
        }
    }

    /// Mean pairwise loss over `pairs`.
    pub fn mean_loss(&self, pairs: &[TrainingPair<T>]) -> f64 {
        if pairs.is_empty() {
            return 0.0;
        }
        pairs
            .iter()
            .map(|p| pairwise_loss(self.score(&p.features_pos), self.score(&p.features_neg)).as_f64())
            .sum::<f64>()
            / pairs.len() as f64
    }
}

/// `ln(1 + eˣ)` without overflow.
fn softplus<T: Scalar>(x: T) -> T {
    x.max(T::zero()) + (-x.abs()).exp().ln_1p()
}

/// RankNet cross-entropy with target probability 1:
/// `ln(1 + exp(−(s_pos − s_neg)))`.
pub fn pairwise_loss<T: Scalar>(s_pos: T, s_neg: T) -> T {
    softplus(s_neg - s_pos)
}

/// Per-pair stochastic gradient descent, reshuffling the pairs each epoch
/// with a generator seeded by `seed`. Returns the mean pair loss after each
/// epoch.
pub fn train_ranknet<T: Scalar>(
    model: &mut RankNet<T>,
    pairs: &[TrainingPair<T>],
    epochs: usize,
    learning_rate: T,
    seed: u64,
) -> Result<Vec<f64>> {
    if pairs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    let mut history = Vec::with_capacity(epochs);
    for _ in 0..epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let (_, grads) = model.pair_gradient(&pairs[i].features_pos, &pairs[i].features_neg);
            model.step(&grads, learning_rate);
        }
        history.push(model.mean_loss(pairs));
    }
    Ok(history)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankNetConfig {
    pub hidden: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for RankNetConfig {
    fn default() -> Self {
        RankNetConfig {
            hidden: 8,
            epochs: 200,
            learning_rate: 0.05,
            seed: 42,
        }
    }
}

/// The deployable artifact: network plus the normalization it was trained
/// with.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranker<T> {
    pub model: RankNet<T>,
    pub stats: FeatureStats<T>,
}

#[derive(Serialize, Deserialize)]
struct Checkpoint<T> {
    version: String,
    hidden: usize,
    w1: Vec<T>,
    b1: Vec<T>,
    w2: Vec<T>,
    b2: T,
    stats: FeatureStats<T>,
}

impl<T: Scalar> Ranker<T> {
    /// Fits normalization on `stats_from`, then trains on the normalized
    /// pairs. Returns the ranker and per-epoch mean loss.
    pub fn fit<'a, I>(
        stats_from: I,
        pairs: &[TrainingPair<T>],
        config: &RankNetConfig,
    ) -> Result<(Self, Vec<f64>)>
    where
        I: IntoIterator<Item = &'a FeatureVector<T>>,
    {
        let stats = FeatureStats::fit(stats_from)?;
        let normalized: Vec<TrainingPair<T>> = pairs
            .iter()
            .map(|p| TrainingPair {
                query_id: p.query_id.clone(),
                features_pos: normalize(&p.features_pos, &stats),
                features_neg: normalize(&p.features_neg, &stats),
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut model = RankNet::new(config.hidden, &mut rng)?;
        let history = train_ranknet(
            &mut model,
            &normalized,
            config.epochs,
            T::of(config.learning_rate),
            config.seed,
        )?;
        Ok((Ranker { model, stats }, history))
    }

    pub fn score(&self, features: &FeatureVector<T>) -> T {
        self.model.score(&normalize(features, &self.stats))
    }

    pub fn to_json(&self) -> Result<String> {
        let m = &self.model;
        Ok(serde_json::to_string(&Checkpoint {
            version: RANKNET_CHECKPOINT_VERSION.to_string(),
            hidden: m.hidden,
            w1: m.w1.clone(),
            b1: m.b1.clone(),
            w2: m.w2.clone(),
            b2: m.b2,
            stats: self.stats,
        })?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let ck: Checkpoint<T> = serde_json::from_str(json)?;
        if ck.version != RANKNET_CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!(
                "expected version {RANKNET_CHECKPOINT_VERSION}, found {}",
                ck.version
            )));
        }
        let h = ck.hidden;
        if h == 0 || ck.w1.len() != NUM_FEATURES * h || ck.b1.len() != h || ck.w2.len() != h {
            return Err(Error::Checkpoint(format!(
                "weight shapes do not match hidden size {h}"
            )));
        }
        let model = RankNet {
            hidden: h,
            w1: ck.w1,
            b1: ck.b1,
            w2: ck.w2,
            b2: ck.b2,
        };
        if !model.is_finite() {
            return Err(Error::Checkpoint("non-finite weights".into()));
        }
        let stats = FeatureStats::new(ck.stats.min, ck.stats.max)
            .map_err(|e| Error::Checkpoint(e.to_string()))?;
        Ok(Ranker { model, stats })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fv(a: f64, b: f64, c: f64) -> FeatureVector<f64> {
        FeatureVector::new(a, b, c)
    }

    #[test]
    fn score_examples() {
        let zero = RankNet::<f64>::zeros(8);
        assert_eq!(zero.score(&fv(0.3, 0.9, 0.1)), 0.0);

        let mut bias_only = RankNet::<f64>::new(8, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        bias_only.w2.iter_mut().for_each(|w| *w = 0.0);
        bias_only.b2 = 0.7;
        assert_eq!(bias_only.score(&fv(0.3, 0.9, 0.1)), 0.7);

        let mut one = RankNet::<f64>::zeros(1);
        one.w1 = vec![1.0, 0.0, 0.0];
        one.w2 = vec![1.0];
        let s = one.score(&fv(0.5, 0.0, 0.0));
        assert!((s - 0.5f64.tanh()).abs() < 1e-15);
        assert!((s - 0.46212).abs() < 5e-6);
    }

    #[test]
    fn loss_examples() {
        assert!((pairwise_loss(0.3, 0.3) - std::f64::consts::LN_2).abs() <= 1e-12);
        assert!(pairwise_loss(20.0, 0.0) < 1e-8);
        let l = pairwise_loss(0.0, 1.0);
        assert!((l - (1.0 + std::f64::consts::E).ln()).abs() < 1e-12);
        assert!((l - 1.31326).abs() < 5e-6);
        assert!(pairwise_loss(-800.0f64, 800.0).is_finite());
    }

    #[test]
    fn training_edge_cases() {
        let mut m = RankNet::<f64>::new(4, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!(train_ranknet(&mut m, &[], 5, 0.05, 0).is_err());
        let before = m.clone();
        let pair = TrainingPair {
            query_id: "q".into(),
            features_pos: fv(1.0, 0.0, 0.0),
            features_neg: fv(0.0, 0.0, 0.0),
        };
        assert!(train_ranknet(&mut m, &[pair], 0, 0.05, 0).unwrap().is_empty());
        assert_eq!(m, before);
        assert!(RankNet::<f64>::new(0, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn checkpoint_round_trip() {
        let ranker = Ranker {
            model: RankNet::<f64>::new(8, &mut ChaCha8Rng::seed_from_u64(3)).unwrap(),
            stats: FeatureStats::new([0.0, -0.2, 0.0], [7.5, 0.9, 3.1]).unwrap(),
        };
        let json = ranker.to_json().unwrap();
        assert!(json.contains("\"version\":\"ranknet-v1\""));
        assert_eq!(Ranker::<f64>::from_json(&json).unwrap(), ranker);
        assert!(Ranker::<f64>::from_json(&json.replace("ranknet-v1", "lstm-v1")).is_err());
        let mut short = ranker.clone();
        short.model.w2.pop();
        assert!(Ranker::<f64>::from_json(&short.to_json().unwrap()).is_err());
    }

    proptest! {
        #[test]
        fn loss_antisymmetry(a in -30.0f64..30.0, b in -30.0f64..30.0) {
            let sum = pairwise_loss(a, b) + pairwise_loss(b, a);
            prop_assert!(sum >= 2.0 * std::f64::consts::LN_2 - 1e-12);
            if (a - b).abs() > 1e-4 {
                prop_assert!(sum > 2.0 * std::f64::consts::LN_2);
            }
        }

        #[test]
        fn loss_decreases_with_margin(a in -30.0f64..30.0, d in 0.01f64..5.0) {
            prop_assert!(pairwise_loss(a + d, 0.0) < pairwise_loss(a, 0.0));
            prop_assert!(pairwise_loss(a, 0.0) >= 0.0);
        }
    }
}
