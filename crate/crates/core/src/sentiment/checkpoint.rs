use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::{LstmConfig, LstmModel, LstmParams};
use super::tensor::Tensor;
use super::vocab::Vocabulary;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const LSTM_CHECKPOINT_VERSION: &str = "lstm-v1";

#[derive(Serialize, Deserialize)]
struct NamedTensor<T> {
    name: String,
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

#[derive(Serialize, Deserialize)]
struct Checkpoint<T> {
    version: String,
    config: LstmConfig,
    vocabulary: Vocabulary,
    tensors: Vec<NamedTensor<T>>,
}

/// A trained classifier together with the vocabulary that feeds it.
#[derive(Debug, Clone, PartialEq)]
pub struct SentimentClassifier<T> {
    pub model: LstmModel<T>,
    pub vocab: Vocabulary,
}

impl<T: Scalar> SentimentClassifier<T> {
    pub fn to_json(&self) -> Result<String> {
        let tensors = LstmParams::<T>::names()
            .into_iter()
            .zip(self.model.params.tensors())
            .map(|(name, t)| NamedTensor {
                name,
                rows: t.rows,
                cols: t.cols,
                data: t.data.clone(),
            })
            .collect();
        let ck = Checkpoint {
            version: LSTM_CHECKPOINT_VERSION.to_string(),
            config: self.model.config.clone(),
            vocabulary: self.vocab.clone(),
            tensors,
        };
        Ok(serde_json::to_string(&ck)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let ck: Checkpoint<T> = serde_json::from_str(json)?;
        if ck.version != LSTM_CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!(
                "expected version {LSTM_CHECKPOINT_VERSION}, found {}",
                ck.version
            )));
        }
        ck.config.validate()?;
        let vocab_size = ck.vocabulary.size();
        // Build a correctly shaped model, then overwrite every tensor.
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(0);
        let mut model = LstmModel::<T>::new(ck.config, vocab_size, &mut rng)?;
        let names = LstmParams::<T>::names();
        let mut targets = model.params.tensors_mut();
        if ck.tensors.len() != targets.len() {
            return Err(Error::Checkpoint(format!(
                "expected {} tensors, found {}",
                targets.len(),
                ck.tensors.len()
            )));
        }
        for ((target, name), src) in targets.iter_mut().zip(&names).zip(ck.tensors) {
            if &src.name != name
                || src.rows != target.rows
                || src.cols != target.cols
                || src.data.len() != src.rows * src.cols
            {
                return Err(Error::Checkpoint(format!(
                    "tensor `{}` ({}x{}) does not match expected `{name}` ({}x{})",
                    src.name, src.rows, src.cols, target.rows, target.cols
                )));
            }
            **target = Tensor {
                rows: src.rows,
                cols: src.cols,
                data: src.data,
            };
        }
        if !model.params.is_finite() {
            return Err(Error::Checkpoint("non-finite parameter".into()));
        }
        Ok(SentimentClassifier {
            model,
            vocab: ck.vocabulary,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let json = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&json)
    }

    pub fn predict(&self, text: &str) -> Result<(usize, Vec<T>)> {
        super::train::predict(&self.model, &self.vocab, text)
    }
}
