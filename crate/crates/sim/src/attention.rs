//! Realized causal softmax attention with `tau/d` score scaling, and its
//! concentration onto the deterministic harmonic weights.

use attnspec_core::model::PoolWeights;
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::Dataset;
use crate::rng::{stage, substream};
use crate::Result;

/// Per-sequence pooled attention weights plus the mean distance to the
/// deterministic limit.
#[derive(Clone, Debug)]
pub struct AttentionOutcome {
    /// One pooled weight row per sequence.
    pub weights: Vec<Vec<f64>>,
    /// Mean over sequences of the Euclidean distance to the harmonic limit.
    pub deviation: f64,
}

/// Computes per-sequence attention pooling on a generated dataset: raw scores
/// `(tau/d) <X_t, X_s>`, causal mask (`s > t` forbidden), no-self mask except
/// the degenerate first row (`S_11 = 0`), row softmax, pooled column means.
pub fn empirical_causal_attention(data: &Dataset, tau: f64) -> Result<AttentionOutcome> {
    let (d, n, t) = (data.config.d, data.config.samples, data.config.t);
    let w0 = PoolWeights::<f64>::causal(t);
    let mut weights = Vec::with_capacity(n);
    let mut dev_acc = 0.0;
    let mut x = DMatrix::<f64>::zeros(d, t);
    for row in 0..n {
        for pos in 0..t {
            let tok = data.tokens[row * t + pos] as usize;
            x.column_mut(pos).copy_from(&data.embeddings.column(tok));
        }
        let gram = x.transpose() * &x;
        let w = pooled_attention_row(&gram, tau, d);
        dev_acc += l2_distance(&w, w0.as_slice());
        weights.push(w);
    }
    Ok(AttentionOutcome {
        weights,
        deviation: dev_acc / n as f64,
    })
}

/// Deviation study without materializing a full vocabulary: only the token
/// columns actually used are generated, each from its own substream, so the
/// result is identical to sampling from the full table.
pub fn attention_deviation_standalone(
    d: usize,
    vocab: usize,
    n_seq: usize,
    t: usize,
    tau: f64,
    mu_norm: f64,
    seed: u64,
    trial: u64,
) -> Result<f64> {
    let w0 = PoolWeights::<f64>::causal(t);
    let mut tok_rng = substream(seed, &[trial, stage::TOKENS]);
    let mut xi_rng = substream(seed, &[trial, stage::XI]);
    let half = (vocab / 2) as u32;
    let mut x = DMatrix::<f64>::zeros(d, t);
    let mut dev_acc = 0.0;
    for _ in 0..n_seq {
        for pos in 0..t {
            let sign = if xi_rng.gen::<bool>() { 1.0f64 } else { -1.0 };
            let idx = tok_rng.gen_range(0..half);
            let tok = if sign > 0.0 { idx } else { half + idx };
            fill_token_column(&mut x, pos, seed, trial, tok, sign, mu_norm);
        }
        let gram = x.transpose() * &x;
        let w = pooled_attention_row(&gram, tau, d);
        dev_acc += l2_distance(&w, w0.as_slice());
    }
    Ok(dev_acc / n_seq as f64)
}

fn fill_token_column(
    x: &mut DMatrix<f64>,
    pos: usize,
    seed: u64,
    trial: u64,
    tok: u32,
    sign: f64,
    mu_norm: f64,
) {
    let mut col_rng: ChaCha8Rng = substream(seed, &[trial, stage::EMBED, tok as u64]);
    let mut col = x.column_mut(pos);
    for v in col.iter_mut() {
        *v = col_rng.sample(StandardNormal);
    }
    col[0] += sign * mu_norm;
}

/// Row-softmax under the causal and no-self masks, then column means.
fn pooled_attention_row(gram: &DMatrix<f64>, tau: f64, d: usize) -> Vec<f64> {
    let t = gram.nrows();
    let scale = tau / d as f64;
    let mut pooled = vec![0.0f64; t];
    // first row is fully masked except the diagonal, fixed at score zero
    pooled[0] += 1.0;
    let mut row_buf = vec![0.0f64; t];
    for r in 1..t {
        let keys = &mut row_buf[..r];
        let mut max = f64::NEG_INFINITY;
        for (s, k) in keys.iter_mut().enumerate() {
            *k = scale * gram[(r, s)];
            max = max.max(*k);
        }
        let mut total = 0.0;
        for k in keys.iter_mut() {
            *k = (*k - max).exp();
            total += *k;
        }
        for (s, k) in keys.iter().enumerate() {
            pooled[s] += k / total;
        }
    }
    for p in pooled.iter_mut() {
        *p /= t as f64;
    }
    pooled
}

fn l2_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}
