//! Finite-dimensional realization of the sequence model: embedding table,
//! correlated position signs, token draws, and pooled columns.

use attnspec_core::matrix::SymMatrix;
use attnspec_core::model::CorrKind;
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::config::{NoiseKind, SimConfig, WeightSpec, XiMode};
use crate::error::SimError;
use crate::rng::{stage, substream};
use crate::Result;

/// One generated trial. Everything downstream (spectra, attention studies,
/// classification) reads from here.
pub struct Dataset {
    /// `d x V` embedding table `E`, column `v` equal to `signs[v] mu + z_v`.
    pub embeddings: DMatrix<f64>,
    /// Balanced `+/-1` class signs, `+1` on the first half.
    pub signs: Vec<i8>,
    /// `N x T` position factors (signs in binary mode, reals in factor mode).
    pub xi: DMatrix<f64>,
    /// Row-major `N x T` token indices.
    pub tokens: Vec<u32>,
    /// `d x N` pooled columns `C`.
    pub pooled: DMatrix<f64>,
    /// `+/-1` labels `sign(sum of the first L xi entries)`, ties to `+1`.
    pub labels: Vec<f64>,
    pub config: SimConfig,
    pub mu_norm: f64,
    xi_mode: XiMode,
}

/// Draws the dataset for one trial of `config`. Deterministic in
/// `(config.seed, trial)` and independent of scheduling.
pub fn generate(config: &SimConfig, trial: u64) -> Result<Dataset> {
    config.validate()?;
    let (d, v, n, t) = (config.d, config.vocab, config.samples, config.t);
    let r_model = config.r.build(t)?;
    let weights = match &config.weights {
        WeightSpec::EmpiricalCausal { .. } => None,
        other => Some(other.build(&r_model)?),
    };

    let mut signs = vec![1i8; v];
    for s in signs.iter_mut().skip(v / 2) {
        *s = -1;
    }

    // embedding noise, one column per vocabulary item
    let mut rng = substream(config.seed, &[trial, stage::EMBED]);
    let mut embeddings = DMatrix::<f64>::zeros(d, v);
    for col in 0..v {
        let mut c = embeddings.column_mut(col);
        match config.noise {
            NoiseKind::Gaussian => {
                for x in c.iter_mut() {
                    *x = rng.sample(StandardNormal);
                }
            }
            NoiseKind::Rademacher => {
                for x in c.iter_mut() {
                    *x = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                }
            }
        }
    }
    if config.center_classes {
        center_class_means(&mut embeddings, v);
    }
    // add the signal along the first coordinate: mu = mu_norm e_1
    for col in 0..v {
        embeddings[(0, col)] += signs[col] as f64 * config.mu_norm;
    }

    // position factors
    let mut rng = substream(config.seed, &[trial, stage::XI]);
    let xi = match config.xi_mode {
        XiMode::Binary => sample_binary_xi(&mut rng, &r_model, n)?,
        XiMode::GaussianFactor => sample_gaussian_xi(&mut rng, r_model.matrix(), n)?,
    };

    // token draws
    let mut rng = substream(config.seed, &[trial, stage::TOKENS]);
    let mut tokens = vec![0u32; n * t];
    match config.xi_mode {
        XiMode::Binary => {
            let half = (v / 2) as u32;
            for row in 0..n {
                for col in 0..t {
                    let idx = rng.gen_range(0..half);
                    tokens[row * t + col] = if xi[(row, col)] > 0.0 {
                        idx
                    } else {
                        half + idx
                    };
                }
            }
        }
        XiMode::GaussianFactor => {
            for slot in tokens.iter_mut() {
                *slot = rng.gen_range(0..v as u32);
            }
        }
    }

    let label_len = config.r.label_len(t);
    let mut labels = Vec::with_capacity(n);
    for row in 0..n {
        let s: f64 = (0..label_len).map(|c| xi[(row, c)]).sum();
        labels.push(if s >= 0.0 { 1.0 } else { -1.0 });
    }

    let mut data = Dataset {
        embeddings,
        signs,
        xi,
        tokens,
        pooled: DMatrix::zeros(d, n),
        labels,
        config: config.clone(),
        mu_norm: config.mu_norm,
        xi_mode: config.xi_mode,
    };
    match (&config.weights, weights) {
        (WeightSpec::EmpiricalCausal { tau }, _) => {
            // per-sequence realized attention weights
            let att = crate::attention::empirical_causal_attention(&data, *tau)?;
            data.pooled = data.pool_per_sequence(&att.weights);
        }
        (_, Some(w)) => data.pooled = data.pool_with(w.as_slice()),
        (_, None) => unreachable!("fixed strategies always build weights"),
    }
    Ok(data)
}

/// Pools the stored tokens with an arbitrary weight vector, returning the
/// `d x N` matrix of columns `sum_t w_t X_t^{(n)}`.
impl Dataset {
    pub fn pool_with(&self, w: &[f64]) -> DMatrix<f64> {
        let (d, n, t) = (self.config.d, self.config.samples, self.config.t);
        assert_eq!(w.len(), t);
        let mut pooled = DMatrix::<f64>::zeros(d, n);
        for row in 0..n {
            let mut col = pooled.column_mut(row);
            for (pos, &wt) in w.iter().enumerate() {
                if wt == 0.0 {
                    continue;
                }
                let tok = self.tokens[row * t + pos] as usize;
                col.axpy(wt, &self.embeddings.column(tok), 1.0);
            }
            match self.xi_mode {
                XiMode::Binary => {}
                XiMode::GaussianFactor => {
                    // signal enters through the real factor, not the token class
                    let a: f64 = w
                        .iter()
                        .enumerate()
                        .map(|(pos, &wt)| wt * self.xi[(row, pos)])
                        .sum();
                    // remove the sign the sampled tokens carried and add the factor signal
                    let carried: f64 = w
                        .iter()
                        .enumerate()
                        .map(|(pos, &wt)| {
                            wt * self.signs[self.tokens[row * t + pos] as usize] as f64
                        })
                        .sum();
                    col[0] += (a - carried) * self.mu_norm;
                }
            }
        }
        pooled
    }

    /// Pools with one weight row per sequence (realized attention weights).
    pub fn pool_per_sequence(&self, rows: &[Vec<f64>]) -> DMatrix<f64> {
        let (d, n, t) = (self.config.d, self.config.samples, self.config.t);
        assert_eq!(rows.len(), n);
        let mut pooled = DMatrix::<f64>::zeros(d, n);
        for (row, w) in rows.iter().enumerate() {
            assert_eq!(w.len(), t);
            let mut col = pooled.column_mut(row);
            for (pos, &wt) in w.iter().enumerate() {
                if wt == 0.0 {
                    continue;
                }
                let tok = self.tokens[row * t + pos] as usize;
                col.axpy(wt, &self.embeddings.column(tok), 1.0);
            }
            if self.xi_mode == XiMode::GaussianFactor {
                let a: f64 = w
                    .iter()
                    .enumerate()
                    .map(|(pos, &wt)| wt * self.xi[(row, pos)])
                    .sum();
                let carried: f64 = w
                    .iter()
                    .enumerate()
                    .map(|(pos, &wt)| wt * self.signs[self.tokens[row * t + pos] as usize] as f64)
                    .sum();
                col[0] += (a - carried) * self.mu_norm;
            }
        }
        pooled
    }

    /// The `N x d` matrix of position-`t` token embeddings (rows are samples),
    /// consistent with `pool_with`: pooling rows with `w` reproduces `C^T`.
    pub fn position_matrix(&self, pos: usize) -> DMatrix<f64> {
        let (d, n, t) = (self.config.d, self.config.samples, self.config.t);
        let mut x = DMatrix::<f64>::zeros(n, d);
        for row in 0..n {
            let tok = self.tokens[row * t + pos] as usize;
            for j in 0..d {
                x[(row, j)] = self.embeddings[(j, tok)];
            }
            if self.xi_mode == XiMode::GaussianFactor {
                x[(row, 0)] += (self.xi[(row, pos)] - self.signs[tok] as f64) * self.mu_norm;
            }
        }
        x
    }
}

fn center_class_means(z: &mut DMatrix<f64>, v: usize) {
    let d = z.nrows();
    let half = v / 2;
    for (lo, hi) in [(0, half), (half, v)] {
        for row in 0..d {
            let mut mean = 0.0;
            for col in lo..hi {
                mean += z[(row, col)];
            }
            mean /= (hi - lo) as f64;
            for col in lo..hi {
                z[(row, col)] -= mean;
            }
        }
    }
}

/// Signs with exact second moments `R`. The prefix model uses the
/// exchangeable construction (one shared sign on the block); general
/// realizable matrices go through a Gaussian copula with
/// `Sigma_g = sin(pi R / 2)`, for which `E[sign(g) sign(g)^T] = R` by the
/// arcsine law.
fn sample_binary_xi(
    rng: &mut ChaCha8Rng,
    r_model: &attnspec_core::model::CorrelationModel<f64>,
    n: usize,
) -> Result<DMatrix<f64>> {
    let t = r_model.t();
    let mut xi = DMatrix::<f64>::zeros(n, t);
    if let CorrKind::Prefix { len } = *r_model.kind() {
        for row in 0..n {
            let shared = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            for col in 0..len {
                xi[(row, col)] = shared;
            }
            for col in len..t {
                xi[(row, col)] = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            }
        }
        return Ok(xi);
    }
    // copula covariance, PSD-projected
    let r = r_model.matrix();
    let mut sigma = SymMatrix::<f64>::zeros(t);
    for i in 0..t {
        for j in 0..t {
            let v = (std::f64::consts::FRAC_PI_2 * r.get(i, j)).sin();
            sigma.set(i, j, v.clamp(-1.0, 1.0));
        }
    }
    let eig = sigma.eigen();
    let chol = psd_cholesky_from_eigen(&eig, t)?;
    let mut g = vec![0.0f64; t];
    for row in 0..n {
        for x in g.iter_mut() {
            *x = rng.sample(StandardNormal);
        }
        for col in 0..t {
            let mut acc = 0.0;
            for k in 0..t {
                acc += chol[col * t + k] * g[k];
            }
            xi[(row, col)] = if acc >= 0.0 { 1.0 } else { -1.0 };
        }
    }
    Ok(xi)
}

/// Real factors `xi ~ N(0, R)`.
fn sample_gaussian_xi(rng: &mut ChaCha8Rng, r: &SymMatrix<f64>, n: usize) -> Result<DMatrix<f64>> {
    let t = r.dim();
    let eig = r.eigen();
    let chol = psd_cholesky_from_eigen(&eig, t)?;
    let mut xi = DMatrix::<f64>::zeros(n, t);
    let mut g = vec![0.0f64; t];
    for row in 0..n {
        for x in g.iter_mut() {
            *x = rng.sample(StandardNormal);
        }
        for col in 0..t {
            let mut acc = 0.0;
            for k in 0..t {
                acc += chol[col * t + k] * g[k];
            }
            xi[(row, col)] = acc;
        }
    }
    Ok(xi)
}

/// Square-root factor `L` (row-major, `L L^T = A`) from an eigendecomposition
/// with negative eigenvalues floored at zero.
fn psd_cholesky_from_eigen(eig: &attnspec_core::matrix::Eigen<f64>, t: usize) -> Result<Vec<f64>> {
    for &v in &eig.values {
        if v < -1e-8 {
            return Err(SimError::Config(format!(
                "correlation-like matrix has negative eigenvalue {v}"
            )));
        }
    }
    let mut l = vec![0.0f64; t * t];
    for (k, (&val, vec)) in eig.values.iter().zip(&eig.vectors).enumerate() {
        let s = val.max(0.0).sqrt();
        for i in 0..t {
            l[i * t + k] = vec[i] * s;
        }
    }
    Ok(l)
}
