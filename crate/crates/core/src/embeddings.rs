//! Word vectors, averaged sentence vectors and cosine similarity.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable<T> {
    dim: usize,
    vectors: HashMap<String, Vec<T>>,
}

impl<T: Scalar> EmbeddingTable<T> {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "embedding dimension must be positive");
        EmbeddingTable {
            dim,
            vectors: HashMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[T]> {
        self.vectors.get(word).map(Vec::as_slice)
    }

    /// Inserts unless the word is already present; returns whether it was stored.
    pub fn insert(&mut self, word: impl Into<String>, vector: Vec<T>) -> Result<bool> {
        if vector.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: vector.len(),
            });
        }
        match self.vectors.entry(word.into()) {
            Entry::Occupied(_) => Ok(false),
            Entry::Vacant(v) => {
                v.insert(vector);
                Ok(true)
            }
        }
    }

    /// Loads the whitespace-separated `word v1 .. v_dim` text format.
    pub fn load(path: impl AsRef<Path>, expected_dim: usize) -> Result<Self> {
        let path = path.as_ref();
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut table = EmbeddingTable::new(expected_dim);
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let mut parts = line.split_whitespace();
            let Some(word) = parts.next() else { continue };
            let values = parts
                .map(|v| {
                    v.parse::<f64>()
                        .map(T::of)
                        .map_err(|_| Error::parse(path, i + 1, format!("unparsable float `{v}`")))
                })
                .collect::<Result<Vec<T>>>()?;
            if values.len() != expected_dim {
                return Err(Error::parse(
                    path,
                    i + 1,
                    format!("expected {expected_dim} values, found {}", values.len()),
                ));
            }
            table.insert(word, values)?;
        }
        Ok(table)
    }

    /// Mean of the in-vocabulary token vectors; zero vector when none match.
    pub fn embed<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<T> {
        let mut known: Vec<&str> = tokens
            .iter()
            .map(AsRef::as_ref)
            .filter(|t| self.vectors.contains_key(*t))
            .collect();
        let mut sum = vec![T::zero(); self.dim];
        if known.is_empty() {
            return sum;
        }
        // Fixed summation order makes the result independent of token order.
        known.sort_unstable();
        for t in &known {
            for (s, v) in sum.iter_mut().zip(&self.vectors[*t]) {
                *s += *v;
            }
        }
        let n = T::of_usize(known.len());
        sum.iter_mut().for_each(|s| *s /= n);
        sum
    }
}

/// `u·v / (‖u‖‖v‖)`, or 0 when either vector has zero norm.
pub fn cosine<T: Scalar>(u: &[T], v: &[T]) -> Result<T> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            actual: v.len(),
        });
    }
    let dot: T = u.iter().zip(v).map(|(a, b)| *a * *b).sum();
    let nu: T = u.iter().map(|a| *a * *a).sum::<T>().sqrt();
    let nv: T = v.iter().map(|a| *a * *a).sum::<T>().sqrt();
    if nu == T::zero() || nv == T::zero() {
        return Ok(T::zero());
    }
    Ok((dot / (nu * nv)).max(-T::one()).min(T::one()))
}

/// Loads precomputed `doc_id<TAB>v1,v2,...` document vectors.
pub fn load_doc_vectors<T: Scalar>(
    path: impl AsRef<Path>,
    expected_dim: usize,
) -> Result<HashMap<String, Vec<T>>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (id, values) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(path, i + 1, "expected doc_id<TAB>values"))?;
        let values = values
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map(T::of)
                    .map_err(|_| Error::parse(path, i + 1, format!("unparsable float `{v}`")))
            })
            .collect::<Result<Vec<T>>>()?;
        if values.len() != expected_dim {
            return Err(Error::parse(
                path,
                i + 1,
                format!("expected {expected_dim} values, found {}", values.len()),
            ));
        }
        out.insert(id.trim().to_string(), values);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Write;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn load_small_table() {
        let f = write_tmp("tasty 0.1 0.2 0.3\nnoodles -1 0 1e-2\ntasty 9 9 9\n");
        let t = EmbeddingTable::<f64>::load(f.path(), 3).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.dim(), 3);
        assert_eq!(t.get("tasty").unwrap(), &[0.1, 0.2, 0.3]);
    }

    #[test]
    fn wrong_dimension_reports_line() {
        let f = write_tmp("a 1 2 3\nb 1 2 3 4\n");
        match EmbeddingTable::<f64>::load(f.path(), 3) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let f = write_tmp("a 1 x 3\n");
        assert!(EmbeddingTable::<f64>::load(f.path(), 3).is_err());
    }

    #[test]
    fn empty_file_is_valid() {
        let f = write_tmp("");
        assert!(EmbeddingTable::<f32>::load(f.path(), 50).unwrap().is_empty());
    }

    fn ab() -> EmbeddingTable<f64> {
        let mut t = EmbeddingTable::new(2);
        t.insert("a", vec![1.0, 0.0]).unwrap();
        t.insert("b", vec![0.0, 1.0]).unwrap();
        t
    }

    #[test]
    fn sentence_embedding() {
        let t = ab();
        assert_eq!(t.embed(&["zzz", "qq"]), vec![0.0, 0.0]);
        assert_eq!(t.embed(&["a", "zzz"]), vec![1.0, 0.0]);
        assert_eq!(t.embed(&["a", "b"]), vec![0.5, 0.5]);
    }

    #[test]
    fn cosine_examples() {
        assert!((cosine::<f64>(&[0.3, -2.0, 5.0], &[0.3, -2.0, 5.0]).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        let c: f64 = cosine(&[1.0, 1.0], &[1.0, 0.0]).unwrap();
        assert!((c - 0.70711).abs() < 5e-6);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 0.0]).unwrap(), 0.0);
        assert!(cosine(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn doc_vectors_file() {
        let f = write_tmp("r1\t0.5,0.5\nr2\t1,0\n");
        let v = load_doc_vectors::<f64>(f.path(), 2).unwrap();
        assert_eq!(v["r1"], vec![0.5, 0.5]);
        let f = write_tmp("r1\t0.5\n");
        assert!(load_doc_vectors::<f64>(f.path(), 2).is_err());
    }

    fn vec3() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-10.0f64..10.0, 3)
    }

    proptest! {
        #[test]
        fn cosine_symmetric(u in vec3(), v in vec3()) {
            prop_assert_eq!(cosine(&u, &v).unwrap(), cosine(&v, &u).unwrap());
        }

        #[test]
        fn cosine_scale_invariant(u in vec3(), v in vec3(), c in 0.01f64..100.0) {
            let scaled: Vec<f64> = u.iter().map(|x| x * c).collect();
            let a = cosine(&scaled, &v).unwrap();
            let b = cosine(&u, &v).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
        }

        #[test]
        fn cosine_in_range(u in vec3(), v in vec3()) {
            prop_assert!(cosine(&u, &v).unwrap().abs() <= 1.0 + 1e-12);
        }

        #[test]
        fn embed_permutation_invariant(
            mut words in prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "x"]), 0..8)
        ) {
            let mut t = ab();
            t.insert("c", vec![0.1, 0.7]).unwrap();
            let before = t.embed(&words);
            words.reverse();
            prop_assert_eq!(before, t.embed(&words));
        }
    }
}
