//! Bidirectional LSTM review classifier over the five star classes.

mod adam;
mod checkpoint;
mod model;
mod tensor;
mod train;
mod vocab;

use serde::{Deserialize, Serialize};

pub use adam::AdamState;
pub use checkpoint::{SentimentClassifier, LSTM_CHECKPOINT_VERSION};
pub use model::{
    argmax, loss, valid_length, DirectionParams, DropoutMasks, ForwardCache, LstmConfig,
    LstmModel, LstmParams, GATES,
};
pub use tensor::Tensor;
pub use train::{evaluate, predict, train, History, Sample};
pub use vocab::{Vocabulary, PAD, UNK};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Negative,
    Neutral,
    Positive,
}

impl Polarity {
    /// Swaps positive and negative; neutral is unchanged.
    pub fn flip(self) -> Self {
        match self {
            Polarity::Negative => Polarity::Positive,
            Polarity::Neutral => Polarity::Neutral,
            Polarity::Positive => Polarity::Negative,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Negative => "negative",
            Polarity::Neutral => "neutral",
            Polarity::Positive => "positive",
        }
    }
}

impl std::fmt::Display for Polarity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Star classes 0-1 are negative, 2 neutral, 3-4 positive.
pub fn polarity(class: usize) -> Result<Polarity> {
    match class {
        0 | 1 => Ok(Polarity::Negative),
        2 => Ok(Polarity::Neutral),
        3 | 4 => Ok(Polarity::Positive),
        _ => Err(Error::LabelOutOfRange {
            label: class as i64,
            classes: crate::corpus::NUM_LABELS,
        }),
    }
}
