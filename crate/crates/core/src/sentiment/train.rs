use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::adam::AdamState;
use super::model::{argmax, loss, LstmModel};
use super::vocab::Vocabulary;
use crate::corpus::tokenize;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// An encoded sequence and its class.
pub type Sample = (Vec<usize>, usize);

/// Per-epoch loss and accuracy, measured in inference mode after the epoch.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct History {
    pub loss: Vec<f64>,
    pub accuracy: Vec<f64>,
}

/// Mini-batch Adam training on the mean cross-entropy of each batch.
pub fn train<T: Scalar, R: Rng + ?Sized>(
    model: &mut LstmModel<T>,
    dataset: &[Sample],
    epochs: usize,
    batch_size: usize,
    adam: &mut AdamState<T>,
    rng: &mut R,
) -> Result<History> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if batch_size == 0 {
        return Err(Error::InvalidArgument("batch_size must be positive".into()));
    }
    let mut history = History::default();
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    for _ in 0..epochs {
        order.shuffle(rng);
        for batch in order.chunks(batch_size) {
            let mut sum = model.params.zeros_like();
            for &i in batch {
                let (seq, label) = &dataset[i];
                let cache = model.forward(seq, true, rng)?;
                sum.add_assign(&model.backward(&cache, *label)?);
            }
            sum.scale(T::one() / T::of_usize(batch.len()));
            adam.update(&mut model.params, &sum);
        }
        let (l, a) = evaluate(model, dataset)?;
        history.loss.push(l);
        history.accuracy.push(a);
    }
    Ok(history)
}

/// Mean inference-mode loss and accuracy.
pub fn evaluate<T: Scalar>(model: &LstmModel<T>, dataset: &[Sample]) -> Result<(f64, f64)> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut total = 0.0;
    let mut correct = 0usize;
    for (seq, label) in dataset {
        let p = model.probabilities(seq)?;
        total += loss(&p, *label)?.as_f64();
        correct += usize::from(argmax(&p) == *label);
    }
    let n = dataset.len() as f64;
    Ok((total / n, correct as f64 / n))
}

/// Predicted class (ties to the smallest index) and its probabilities.
pub fn predict<T: Scalar>(
    model: &LstmModel<T>,
    vocab: &Vocabulary,
    text: &str,
) -> Result<(usize, Vec<T>)> {
    let seq = vocab.encode(&tokenize(text), model.config.max_len);
    let p = model.probabilities(&seq)?;
    Ok((argmax(&p), p))
}
