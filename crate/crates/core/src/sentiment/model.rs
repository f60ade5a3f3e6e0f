//! Embedding → bidirectional LSTM → global max pool → dense ReLU → dropout →
//! softmax classifier with an analytic backward pass.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::tensor::Tensor;
use super::vocab::PAD;
use crate::corpus::NUM_LABELS;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const INIT_SCALE: f64 = 0.05;
const FORGET_BIAS: f64 = 1.0;

/// Gate order used by every per-gate array: input, forget, candidate, output.
pub const GATES: [&str; 4] = ["i", "f", "c", "o"];
const INPUT: usize = 0;
const FORGET: usize = 1;
const CANDIDATE: usize = 2;
const OUTPUT: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmConfig {
    pub max_len: usize,
    pub embed_dim: usize,
    /// Units per direction.
    pub lstm_units: usize,
    pub hidden_dim: usize,
    pub num_classes: usize,
    pub dropout: f64,
    pub recurrent_dropout: f64,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for LstmConfig {
    /// Desk-scale sizes; see [`LstmConfig::full_scale`] for the large variant.
    fn default() -> Self {
        LstmConfig {
            max_len: 32,
            embed_dim: 50,
            lstm_units: 8,
            hidden_dim: 8,
            num_classes: NUM_LABELS,
            dropout: 0.1,
            recurrent_dropout: 0.1,
            learning_rate: 1e-3,
            seed: 42,
        }
    }
}

impl LstmConfig {
    /// 500-token input, 50-d embeddings, 100 units per direction, 50 hidden.
    pub fn full_scale() -> Self {
        LstmConfig {
            max_len: 500,
            embed_dim: 50,
            lstm_units: 100,
            hidden_dim: 50,
            ..LstmConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("max_len", self.max_len),
            ("embed_dim", self.embed_dim),
            ("lstm_units", self.lstm_units),
            ("hidden_dim", self.hidden_dim),
            ("num_classes", self.num_classes),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::InvalidArgument(format!("{name} must be positive")));
        }
        for (name, p) in [("dropout", self.dropout), ("recurrent_dropout", self.recurrent_dropout)] {
            if !(0.0..1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!("{name} must lie in [0, 1)")));
            }
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::InvalidArgument("learning_rate must be positive".into()));
        }
        Ok(())
    }
}

/// Weights of one LSTM direction, indexed by gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionParams<T> {
    /// `embed_dim × units` per gate.
    pub w: [Tensor<T>; 4],
    /// `units × units` per gate.
    pub u: [Tensor<T>; 4],
    pub b: [Tensor<T>; 4],
}

/// Every trainable tensor. Gradients and Adam moments reuse this shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmParams<T> {
    /// `vocab_size × embed_dim`; row 0 is padding and stays zero.
    pub embedding: Tensor<T>,
    pub forward: DirectionParams<T>,
    pub backward: DirectionParams<T>,
    /// `2·units × hidden_dim`.
    pub dense_w: Tensor<T>,
    pub dense_b: Tensor<T>,
    /// `hidden_dim × num_classes`.
    pub out_w: Tensor<T>,
    pub out_b: Tensor<T>,
}

impl<T: Scalar> DirectionParams<T> {
    fn init<R: Rng + ?Sized>(embed: usize, units: usize, rng: &mut R) -> Self {
        let w = std::array::from_fn(|_| glorot(embed, units, rng));
        let u = std::array::from_fn(|_| glorot(units, units, rng));
        let b = std::array::from_fn(|g| {
            if g == FORGET {
                Tensor::filled(1, units, T::of(FORGET_BIAS))
            } else {
                Tensor::zeros(1, units)
            }
        });
        DirectionParams { w, u, b }
    }

    fn tensors(&self) -> impl Iterator<Item = &Tensor<T>> {
        self.w.iter().chain(&self.u).chain(&self.b)
    }

    fn tensors_mut(&mut self) -> impl Iterator<Item = &mut Tensor<T>> {
        self.w.iter_mut().chain(&mut self.u).chain(&mut self.b)
    }
}

impl<T: Scalar> LstmParams<T> {
    /// Tensor names, in the order of [`LstmParams::tensors`].
    pub fn names() -> Vec<String> {
        let mut names = vec!["embedding".to_string()];
        for dir in ["forward", "backward"] {
            for kind in ["w", "u", "b"] {
                for g in GATES {
                    names.push(format!("{dir}.{kind}_{g}"));
                }
            }
        }
        names.extend(["dense_w", "dense_b", "out_w", "out_b"].map(String::from));
        names
    }

    pub fn tensors(&self) -> Vec<&Tensor<T>> {
        std::iter::once(&self.embedding)
            .chain(self.forward.tensors())
            .chain(self.backward.tensors())
            .chain([&self.dense_w, &self.dense_b, &self.out_w, &self.out_b])
            .collect()
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Tensor<T>> {
        std::iter::once(&mut self.embedding)
            .chain(self.forward.tensors_mut())
            .chain(self.backward.tensors_mut())
            .chain([
                &mut self.dense_w,
                &mut self.dense_b,
                &mut self.out_w,
                &mut self.out_b,
            ])
            .collect()
    }

    pub fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        z.tensors_mut().into_iter().for_each(|t| *t = t.zeros_like());
        z
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.tensors_mut().into_iter().zip(other.tensors()) {
            a.add_assign(b);
        }
    }

    pub fn scale(&mut self, factor: T) {
        self.tensors_mut().into_iter().for_each(|t| t.scale(factor));
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.is_finite())
    }

    fn direction(&self, d: usize) -> &DirectionParams<T> {
        if d == 0 {
            &self.forward
        } else {
            &self.backward
        }
    }

    fn direction_mut(&mut self, d: usize) -> &mut DirectionParams<T> {
        if d == 0 {
            &mut self.forward
        } else {
            &mut self.backward
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmModel<T> {
    pub config: LstmConfig,
    pub params: LstmParams<T>,
}

/// Inverted-dropout masks: zeros for dropped units, `1/(1-p)` for kept ones.
#[derive(Debug, Clone, PartialEq)]
pub struct DropoutMasks<T> {
    /// One mask over the previous hidden state per direction, reused at
    /// every time step.
    pub recurrent: [Vec<T>; 2],
    pub dense: Vec<T>,
}

impl<T: Scalar> DropoutMasks<T> {
    /// All-ones masks: inference behaviour.
    pub fn identity(config: &LstmConfig) -> Self {
        let ones = |n| vec![T::one(); n];
        DropoutMasks {
            recurrent: [ones(config.lstm_units), ones(config.lstm_units)],
            dense: ones(config.hidden_dim),
        }
    }

    pub fn sample<R: Rng + ?Sized>(config: &LstmConfig, rng: &mut R) -> Self {
        fn mask<T: Scalar, R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Vec<T> {
            if p == 0.0 {
                return vec![T::one(); n];
            }
            let keep = T::of(1.0 / (1.0 - p));
            (0..n)
                .map(|_| if rng.gen::<f64>() < p { T::zero() } else { keep })
                .collect()
        }
        let recurrent = [
            mask(config.lstm_units, config.recurrent_dropout, rng),
            mask(config.lstm_units, config.recurrent_dropout, rng),
        ];
        let dense = mask(config.hidden_dim, config.dropout, rng);
        DropoutMasks { recurrent, dense }
    }
}

#[derive(Debug, Clone)]
struct StepCache<T> {
    pos: usize,
    token: usize,
    /// Previous hidden state after the recurrent mask.
    h_in: Vec<T>,
    c_prev: Vec<T>,
    gates: [Vec<T>; 4],
    tanh_c: Vec<T>,
}

/// Intermediate values of one forward pass, consumed by `backward`.
#[derive(Debug, Clone)]
pub struct ForwardCache<T> {
    tokens: Vec<usize>,
    steps: [Vec<StepCache<T>>; 2],
    /// Hidden outputs per direction, indexed by position.
    hidden: [Vec<Vec<T>>; 2],
    /// Time step that won the max pool, per pooled unit.
    argmax: Vec<Option<usize>>,
    pooled: Vec<T>,
    dense_pre: Vec<T>,
    dense_drop: Vec<T>,
    masks: DropoutMasks<T>,
    pub probabilities: Vec<T>,
}

/// Glorot-uniform: `U(±sqrt(6 / (fan_in + fan_out)))`.
fn glorot<T: Scalar, R: Rng + ?Sized>(fan_in: usize, fan_out: usize, rng: &mut R) -> Tensor<T> {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    Tensor::uniform(fan_in, fan_out, limit, rng)
}

fn sigmoid<T: Scalar>(x: T) -> T {
    T::one() / (T::one() + (-x).exp())
}

pub(crate) fn softmax<T: Scalar>(logits: &[T]) -> Vec<T> {
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let exps: Vec<T> = logits.iter().map(|&z| (z - max).exp()).collect();
    let total: T = exps.iter().copied().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Steps before the first padding index take part in the recurrence.
pub fn valid_length(sequence: &[usize]) -> usize {
    sequence.iter().position(|&t| t == PAD).unwrap_or(sequence.len())
}

impl<T: Scalar> LstmModel<T> {
    /// Random init: uniform(±0.05) embeddings, Glorot-uniform weight matrices,
    /// zero biases except the forget gate at 1.
    pub fn new<R: Rng + ?Sized>(config: LstmConfig, vocab_size: usize, rng: &mut R) -> Result<Self> {
        config.validate()?;
        if vocab_size < 2 {
            return Err(Error::InvalidArgument("vocabulary needs pad and unknown rows".into()));
        }
        let (e, u, h, k) = (
            config.embed_dim,
            config.lstm_units,
            config.hidden_dim,
            config.num_classes,
        );
        let mut embedding = Tensor::uniform(vocab_size, e, INIT_SCALE, rng);
        embedding.row_mut(PAD).fill(T::zero());
        let forward = DirectionParams::init(e, u, rng);
        let backward = DirectionParams::init(e, u, rng);
        let params = LstmParams {
            embedding,
            forward,
            backward,
            dense_w: glorot(2 * u, h, rng),
            dense_b: Tensor::zeros(1, h),
            out_w: glorot(h, k, rng),
            out_b: Tensor::zeros(1, k),
        };
        Ok(LstmModel { config, params })
    }

    pub fn vocab_size(&self) -> usize {
        self.params.embedding.rows
    }

    /// Copies pretrained vectors into the embedding rows of known words.
    /// Returns how many rows were set.
    pub fn load_pretrained(
        &mut self,
        vocab: &super::Vocabulary,
        table: &crate::embeddings::EmbeddingTable<T>,
    ) -> Result<usize> {
        if table.dim() != self.config.embed_dim {
            return Err(Error::DimensionMismatch {
                expected: self.config.embed_dim,
                actual: table.dim(),
            });
        }
        let mut set = 0;
        for row in 2..self.vocab_size().min(vocab.size()) {
            if let Some(v) = vocab.word(row).and_then(|w| table.get(w)) {
                self.params.embedding.row_mut(row).copy_from_slice(v);
                set += 1;
            }
        }
        Ok(set)
    }

    fn check_sequence(&self, sequence: &[usize]) -> Result<()> {
        if sequence.len() != self.config.max_len {
            return Err(Error::DimensionMismatch {
                expected: self.config.max_len,
                actual: sequence.len(),
            });
        }
        if let Some(&bad) = sequence.iter().find(|&&t| t >= self.vocab_size()) {
            return Err(Error::InvalidArgument(format!(
                "token index {bad} outside vocabulary of {}",
                self.vocab_size()
            )));
        }
        Ok(())
    }

    /// Forward pass. With `training` set, fresh dropout masks are drawn from
    /// `rng`; otherwise `rng` is untouched and the pass is deterministic.
    pub fn forward<R: Rng + ?Sized>(
        &self,
        sequence: &[usize],
        training: bool,
        rng: &mut R,
    ) -> Result<ForwardCache<T>> {
        let masks = if training {
            DropoutMasks::sample(&self.config, rng)
        } else {
            DropoutMasks::identity(&self.config)
        };
        self.forward_with_masks(sequence, masks)
    }

    /// Forward pass with explicit dropout masks.
    pub fn forward_with_masks(
        &self,
        sequence: &[usize],
        masks: DropoutMasks<T>,
    ) -> Result<ForwardCache<T>> {
        self.check_sequence(sequence)?;
        let cfg = &self.config;
        let units = cfg.lstm_units;
        let len = valid_length(sequence);

        let mut steps: [Vec<StepCache<T>>; 2] = [Vec::with_capacity(len), Vec::with_capacity(len)];
        let mut hidden: [Vec<Vec<T>>; 2] = [vec![Vec::new(); len], vec![Vec::new(); len]];
        for d in 0..2 {
            let p = self.params.direction(d);
            let mut h = vec![T::zero(); units];
            let mut c = vec![T::zero(); units];
            let order: Box<dyn Iterator<Item = usize>> = if d == 0 {
                Box::new(0..len)
            } else {
                Box::new((0..len).rev())
            };
            for pos in order {
                let token = sequence[pos];
                let x = self.params.embedding.row(token);
                let h_in: Vec<T> = h.iter().zip(&masks.recurrent[d]).map(|(a, m)| *a * *m).collect();
                let gates: [Vec<T>; 4] = std::array::from_fn(|g| {
                    let mut a = p.b[g].data.clone();
                    p.w[g].vec_mul_acc(x, &mut a);
                    p.u[g].vec_mul_acc(&h_in, &mut a);
                    if g == CANDIDATE {
                        a.iter_mut().for_each(|v| *v = v.tanh());
                    } else {
                        a.iter_mut().for_each(|v| *v = sigmoid(*v));
                    }
                    a
                });
                let c_prev = std::mem::take(&mut c);
                c = (0..units)
                    .map(|j| gates[FORGET][j] * c_prev[j] + gates[INPUT][j] * gates[CANDIDATE][j])
                    .collect();
                let tanh_c: Vec<T> = c.iter().map(|v| v.tanh()).collect();
                h = (0..units).map(|j| gates[OUTPUT][j] * tanh_c[j]).collect();
                hidden[d][pos] = h.clone();
                steps[d].push(StepCache {
                    pos,
                    token,
                    h_in,
                    c_prev,
                    gates,
                    tanh_c,
                });
            }
        }

        // Global max pool over valid steps of [forward ; backward].
        let mut pooled = vec![T::zero(); 2 * units];
        let mut argmax = vec![None; 2 * units];
        for j in 0..2 * units {
            let (d, k) = (j / units, j % units);
            for pos in 0..len {
                let v = hidden[d][pos][k];
                if argmax[j].is_none() || v > pooled[j] {
                    pooled[j] = v;
                    argmax[j] = Some(pos);
                }
            }
        }

        let mut dense_pre = self.params.dense_b.data.clone();
        self.params.dense_w.vec_mul_acc(&pooled, &mut dense_pre);
        let dense_drop: Vec<T> = dense_pre
            .iter()
            .zip(&masks.dense)
            .map(|(z, m)| z.max(T::zero()) * *m)
            .collect();
        let mut logits = self.params.out_b.data.clone();
        self.params.out_w.vec_mul_acc(&dense_drop, &mut logits);
        let probabilities = softmax(&logits);

        Ok(ForwardCache {
            tokens: sequence.to_vec(),
            steps,
            hidden,
            argmax,
            pooled,
            dense_pre,
            dense_drop,
            masks,
            probabilities,
        })
    }

    /// Gradients of `-ln p[label]` with respect to every parameter.
    pub fn backward(&self, cache: &ForwardCache<T>, label: usize) -> Result<LstmParams<T>> {
        check_label(label, self.config.num_classes)?;
        let units = self.config.lstm_units;
        let mut grads = self.params.zeros_like();

        let mut d_logits = cache.probabilities.clone();
        d_logits[label] -= T::one();
        grads.out_b.data.clone_from(&d_logits);
        grads.out_w.outer_acc(&cache.dense_drop, &d_logits);

        let mut d_drop = vec![T::zero(); self.config.hidden_dim];
        self.params.out_w.mul_vec_acc(&d_logits, &mut d_drop);
        let d_pre: Vec<T> = d_drop
            .iter()
            .zip(&cache.masks.dense)
            .zip(&cache.dense_pre)
            .map(|((g, m), z)| if *z > T::zero() { *g * *m } else { T::zero() })
            .collect();
        grads.dense_b.data.clone_from(&d_pre);
        grads.dense_w.outer_acc(&cache.pooled, &d_pre);

        let mut d_pooled = vec![T::zero(); 2 * units];
        self.params.dense_w.mul_vec_acc(&d_pre, &mut d_pooled);

        let len = cache.hidden[0].len();
        for d in 0..2 {
            // Gradient reaching each step's hidden output through the pool.
            let mut d_hidden = vec![vec![T::zero(); units]; len];
            for k in 0..units {
                if let Some(pos) = cache.argmax[d * units + k] {
                    d_hidden[pos][k] += d_pooled[d * units + k];
                }
            }
            let p = self.params.direction(d);
            let mask = &cache.masks.recurrent[d];
            let mut dh_next = vec![T::zero(); units];
            let mut dc_next = vec![T::zero(); units];
            let mut dx = vec![T::zero(); self.config.embed_dim];
            for step in cache.steps[d].iter().rev() {
                let [gi, gf, gc, go] = &step.gates;
                let mut da: [Vec<T>; 4] = std::array::from_fn(|_| vec![T::zero(); units]);
                for j in 0..units {
                    let dh = d_hidden[step.pos][j] + dh_next[j];
                    let tc = step.tanh_c[j];
                    let dc = dc_next[j] + dh * go[j] * (T::one() - tc * tc);
                    da[INPUT][j] = dc * gc[j] * gi[j] * (T::one() - gi[j]);
                    da[FORGET][j] = dc * step.c_prev[j] * gf[j] * (T::one() - gf[j]);
                    da[CANDIDATE][j] = dc * gi[j] * (T::one() - gc[j] * gc[j]);
                    da[OUTPUT][j] = dh * tc * go[j] * (T::one() - go[j]);
                    dc_next[j] = dc * gf[j];
                }
                let x = self.params.embedding.row(step.token);
                let g = grads.direction_mut(d);
                dx.fill(T::zero());
                let mut dh_in = vec![T::zero(); units];
                for k in 0..4 {
                    g.w[k].outer_acc(x, &da[k]);
                    g.u[k].outer_acc(&step.h_in, &da[k]);
                    for (b, v) in g.b[k].data.iter_mut().zip(&da[k]) {
                        *b += *v;
                    }
                    p.w[k].mul_vec_acc(&da[k], &mut dx);
                    p.u[k].mul_vec_acc(&da[k], &mut dh_in);
                }
                for j in 0..units {
                    dh_next[j] = dh_in[j] * mask[j];
                }
                for (e, v) in grads.embedding.row_mut(step.token).iter_mut().zip(&dx) {
                    *e += *v;
                }
            }
        }
        grads.embedding.row_mut(PAD).fill(T::zero());
        Ok(grads)
    }

    /// Inference-mode class probabilities.
    pub fn probabilities(&self, sequence: &[usize]) -> Result<Vec<T>> {
        Ok(self
            .forward_with_masks(sequence, DropoutMasks::identity(&self.config))?
            .probabilities)
    }
}

impl<T> ForwardCache<T> {
    pub fn tokens(&self) -> &[usize] {
        &self.tokens
    }
}

fn check_label(label: usize, classes: usize) -> Result<()> {
    if label >= classes {
        return Err(Error::LabelOutOfRange {
            label: label as i64,
            classes,
        });
    }
    Ok(())
}

/// Categorical cross-entropy `-ln p[label]`.
pub fn loss<T: Scalar>(probabilities: &[T], label: usize) -> Result<T> {
    check_label(label, probabilities.len())?;
    Ok(-probabilities[label].ln())
}

/// Index of the largest probability; ties go to the smallest index.
pub fn argmax<T: Scalar>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}
