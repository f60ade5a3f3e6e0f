//! Analytic LSTM gradients against central finite differences.

use plateful::sentiment::{loss, DropoutMasks, LstmConfig, LstmModel, LstmParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STEP: f64 = 1e-4;
const TOLERANCE: f64 = 1e-4;
// Seeds whose dense ReLU layer is not entirely inactive on the batch.
const SEEDS: [u64; 3] = [3, 4, 5];

fn toy_config() -> LstmConfig {
    LstmConfig {
        max_len: 6,
        embed_dim: 4,
        lstm_units: 3,
        hidden_dim: 3,
        dropout: 0.3,
        recurrent_dropout: 0.3,
        ..LstmConfig::default()
    }
}

/// Toy model with weights large enough that every gradient is well above
/// finite-difference round-off.
fn toy_model(seed: u64) -> LstmModel<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = LstmModel::new(toy_config(), 8, &mut rng).unwrap();
    for (i, t) in model.params.tensors_mut().into_iter().enumerate() {
        for (j, v) in t.data.iter_mut().enumerate() {
            if i == 0 && j < 4 {
                continue; // padding row
            }
            *v = rng.gen_range(-0.8..0.8);
        }
    }
    model
}

type Batch = Vec<(Vec<usize>, usize, DropoutMasks<f64>)>;

fn batch(model: &LstmModel<f64>, seed: u64) -> Batch {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vec![
        (vec![2, 5, 3, 7, 0, 0], 3, DropoutMasks::sample(&model.config, &mut rng)),
        (vec![4, 1, 6, 2, 5, 3], 0, DropoutMasks::sample(&model.config, &mut rng)),
    ]
}

fn total_loss(model: &LstmModel<f64>, batch: &Batch) -> f64 {
    batch
        .iter()
        .map(|(seq, label, masks)| {
            let cache = model.forward_with_masks(seq, masks.clone()).unwrap();
            loss(&cache.probabilities, *label).unwrap()
        })
        .sum()
}

fn analytic(model: &LstmModel<f64>, batch: &Batch) -> LstmParams<f64> {
    let mut sum = model.params.zeros_like();
    for (seq, label, masks) in batch {
        let cache = model.forward_with_masks(seq, masks.clone()).unwrap();
        sum.add_assign(&model.backward(&cache, *label).unwrap());
    }
    sum
}

/// Central differences over every parameter, computed on a private copy.
fn numeric(model: &LstmModel<f64>, batch: &Batch) -> LstmParams<f64> {
    let mut grads = model.params.zeros_like();
    let mut probe = model.clone();
    let n_tensors = model.params.tensors().len();
    for ti in 0..n_tensors {
        let len = model.params.tensors()[ti].len();
        for k in 0..len {
            let original = model.params.tensors()[ti].data[k];
            probe.params.tensors_mut()[ti].data[k] = original + STEP;
            let plus = total_loss(&probe, batch);
            probe.params.tensors_mut()[ti].data[k] = original - STEP;
            let minus = total_loss(&probe, batch);
            probe.params.tensors_mut()[ti].data[k] = original;
            grads.tensors_mut()[ti].data[k] = (plus - minus) / (2.0 * STEP);
        }
    }
    grads
}

fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na + nb == 0.0 {
        0.0
    } else {
        diff / (na + nb)
    }
}

#[test]
fn every_tensor_matches_finite_differences() {
    for seed in SEEDS {
        let model = toy_model(seed);
        let b = batch(&model, seed + 100);
        let a = analytic(&model, &b);
        let n = numeric(&model, &b);
        for ((name, ta), tn) in LstmParams::<f64>::names()
            .iter()
            .zip(a.tensors())
            .zip(n.tensors())
        {
            let err = relative_error(&ta.data, &tn.data);
            let largest = ta.data.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            assert!(largest > 1e-6, "seed {seed} {name}: gradient vanished");
            assert!(err <= TOLERANCE, "seed {seed} {name}: relative error {err:e}");
        }
    }
}

#[test]
fn duplicated_sample_doubles_gradients() {
    let model = toy_model(5);
    let b = batch(&model, 9);
    let single: Batch = vec![b[0].clone()];
    let double: Batch = vec![b[0].clone(), b[0].clone()];
    let g1 = analytic(&model, &single);
    let g2 = analytic(&model, &double);
    for (x, y) in g1.tensors().iter().zip(g2.tensors()) {
        for (a, b) in x.data.iter().zip(&y.data) {
            assert!((2.0 * a - b).abs() <= 1e-9);
        }
    }
}

