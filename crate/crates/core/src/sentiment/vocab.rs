use std::collections::HashMap;

use serde::{Deserialize, Serialize};

pub const PAD: usize = 0;
pub const UNK: usize = 1;

/// Word → index map. Index 0 is padding and 1 is the unknown word; real
/// words start at 2.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Builds from token lists, most frequent first, ties alphabetical.
    /// `max_words` caps the number of real words (excluding pad/unk).
    pub fn build<'a, I, S>(docs: I, max_words: Option<usize>) -> Self
    where
        I: IntoIterator<Item = &'a [S]>,
        S: AsRef<str> + 'a,
    {
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for doc in docs {
            for t in doc {
                *counts.entry(t.as_ref()).or_default() += 1;
            }
        }
        let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        if let Some(cap) = max_words {
            ranked.truncate(cap);
        }
        Vocabulary::from(ranked.into_iter().map(|(w, _)| w.to_string()).collect::<Vec<_>>())
    }

    /// Number of embedding rows needed, including padding and unknown.
    pub fn size(&self) -> usize {
        self.words.len() + 2
    }

    pub fn index_of(&self, word: &str) -> usize {
        self.index.get(word).copied().unwrap_or(UNK)
    }

    pub fn word(&self, index: usize) -> Option<&str> {
        index.checked_sub(2).and_then(|i| self.words.get(i)).map(String::as_str)
    }

    /// Maps tokens to indices, truncated or right-padded to `max_len`.
    pub fn encode<S: AsRef<str>>(&self, tokens: &[S], max_len: usize) -> Vec<usize> {
        let mut seq: Vec<usize> = tokens
            .iter()
            .take(max_len)
            .map(|t| self.index_of(t.as_ref()))
            .collect();
        seq.resize(max_len, PAD);
        seq
    }
}

impl From<Vec<String>> for Vocabulary {
    fn from(words: Vec<String>) -> Self {
        let mut index = HashMap::with_capacity(words.len());
        let mut kept = Vec::with_capacity(words.len());
        for w in words {
            if !index.contains_key(&w) {
                index.insert(w.clone(), kept.len() + 2);
                kept.push(w);
            }
        }
        Vocabulary { words: kept, index }
    }
}

impl From<Vocabulary> for Vec<String> {
    fn from(v: Vocabulary) -> Self {
        v.words
    }
}
