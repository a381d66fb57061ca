//! Ridge classification on pooled representations, with fixed pooling
//! strategies or pooling weights learned jointly with the classifier.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::config::WeightSpec;
use crate::dataset::Dataset;
use crate::error::SimError;
use crate::rng::{stage, substream};
use crate::Result;

/// Pooling strategy for a classification run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Mean,
    Causal,
    Optimal,
    /// `w = softmax(phi)` optimized jointly with the ridge solution.
    Learned,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Mean => "mean",
            Strategy::Causal => "causal",
            Strategy::Optimal => "optimal",
            Strategy::Learned => "learned",
        }
    }
}

/// Optimizer budget for the learned strategy.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LearnBudget {
    pub restarts: usize,
    pub iters: usize,
}

impl Default for LearnBudget {
    fn default() -> Self {
        // gradient descent with backtracking; the zero start (mean pooling)
        // is always included in addition to the random restarts
        Self {
            restarts: 5,
            iters: 200,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ClassifyOutcome {
    pub train_acc: f64,
    pub test_acc: f64,
    /// Final pooling weights for the learned strategy.
    pub learned_w: Option<Vec<f64>>,
}

/// Fits `beta = (X^T X + lambda N_tr I)^{-1} X^T y` on the train split and
/// reports sign-accuracy on both splits.
pub fn classify(
    data: &Dataset,
    strategy: Strategy,
    lambda_ridge: f64,
    split: f64,
) -> Result<ClassifyOutcome> {
    classify_with_budget(data, strategy, lambda_ridge, split, LearnBudget::default())
}

pub fn classify_with_budget(
    data: &Dataset,
    strategy: Strategy,
    lambda_ridge: f64,
    split: f64,
    budget: LearnBudget,
) -> Result<ClassifyOutcome> {
    let n = data.config.samples;
    let n_tr = (split * n as f64).floor() as usize;
    if n_tr == 0 || n_tr >= n {
        return Err(SimError::Config(format!(
            "split {split} leaves an empty train or test set (N = {n})"
        )));
    }
    let t = data.config.t;
    let r_model = data.config.r.build(t)?;
    let fixed_w: Option<Vec<f64>> = match strategy {
        Strategy::Mean => Some(WeightSpec::Mean.build(&r_model)?.as_slice().to_vec()),
        Strategy::Causal => Some(WeightSpec::Causal.build(&r_model)?.as_slice().to_vec()),
        Strategy::Optimal => Some(WeightSpec::Optimal.build(&r_model)?.as_slice().to_vec()),
        Strategy::Learned => None,
    };
    let y = DVector::from_column_slice(&data.labels);

    if let Some(w) = fixed_w {
        // fixed weights never need the per-position Gram blocks: pool once,
        // solve once
        let pooled = data.pool_with(&w); // d x N
        let x = pooled.transpose();
        let (train_acc, test_acc) = ridge_fit_and_score(&x, &y, n_tr, lambda_ridge)?;
        return Ok(ClassifyOutcome {
            train_acc,
            test_acc,
            learned_w: None,
        });
    }

    let positions: Vec<DMatrix<f64>> = (0..t).map(|p| data.position_matrix(p)).collect();
    let problem = RidgeProblem::new(&positions, &y, n_tr, lambda_ridge);
    let w = learn_weights(&problem, data, budget)?;
    let beta = problem.solve(&w)?;
    let (train_acc, test_acc) = problem.accuracies(&w, &beta);
    Ok(ClassifyOutcome {
        train_acc,
        test_acc,
        learned_w: Some(w),
    })
}

/// Ridge fit on the first `n_tr` rows of `x` with sign-accuracy on both
/// splits.
fn ridge_fit_and_score(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    n_tr: usize,
    lambda: f64,
) -> Result<(f64, f64)> {
    let d = x.ncols();
    let xtr = x.rows(0, n_tr);
    let ytr = y.rows(0, n_tr);
    let mut a = xtr.transpose() * xtr;
    for k in 0..d {
        a[(k, k)] += lambda * n_tr as f64;
    }
    let b = xtr.transpose() * ytr;
    let chol = Cholesky::new(a)
        .ok_or_else(|| SimError::Numeric("ridge normal matrix is not positive definite".into()))?;
    let beta = chol.solve(&b);
    let scores = x * &beta;
    let acc = |lo: usize, hi: usize| -> f64 {
        let mut hits = 0usize;
        for i in lo..hi {
            let pred = if scores[i] >= 0.0 { 1.0 } else { -1.0 };
            if pred == y[i] {
                hits += 1;
            }
        }
        hits as f64 / (hi - lo) as f64
    };
    Ok((acc(0, n_tr), acc(n_tr, y.len())))
}

/// Shared precomputation: position Gram blocks restricted to the train split
/// make the per-iteration ridge solve independent of `N`.
pub struct RidgeProblem<'a> {
    positions: &'a [DMatrix<f64>],
    y: &'a DVector<f64>,
    n_tr: usize,
    lambda: f64,
    gram: Vec<DMatrix<f64>>, // X_t^T X_s on train rows, index t * T + s
    xty: Vec<DVector<f64>>,  // X_t^T y on train rows
}

impl<'a> RidgeProblem<'a> {
    pub fn new(
        positions: &'a [DMatrix<f64>],
        y: &'a DVector<f64>,
        n_tr: usize,
        lambda: f64,
    ) -> Self {
        let t = positions.len();
        let tr: Vec<DMatrix<f64>> = positions.iter().map(|x| x.rows(0, n_tr).into()).collect();
        let ytr = y.rows(0, n_tr);
        let mut gram = Vec::with_capacity(t * t);
        for a in 0..t {
            for b in 0..t {
                if b < a {
                    gram.push(DMatrix::zeros(0, 0)); // filled from the transpose below
                } else {
                    gram.push(tr[a].transpose() * &tr[b]);
                }
            }
        }
        for a in 0..t {
            for b in 0..a {
                gram[a * t + b] = gram[b * t + a].transpose();
            }
        }
        let xty = tr.iter().map(|x| x.transpose() * ytr).collect();
        RidgeProblem {
            positions,
            y,
            n_tr,
            lambda,
            gram,
            xty,
        }
    }

    fn t(&self) -> usize {
        self.positions.len()
    }

    fn d(&self) -> usize {
        self.positions[0].ncols()
    }

    /// Closed-form ridge solution at pooling weights `w`.
    pub fn solve(&self, w: &[f64]) -> Result<DVector<f64>> {
        let t = self.t();
        let d = self.d();
        let mut a = DMatrix::<f64>::zeros(d, d);
        for i in 0..t {
            for j in 0..t {
                let c = w[i] * w[j];
                if c != 0.0 {
                    a += &self.gram[i * t + j] * c;
                }
            }
        }
        for k in 0..d {
            a[(k, k)] += self.lambda * self.n_tr as f64;
        }
        let mut b = DVector::<f64>::zeros(d);
        for i in 0..t {
            b.axpy(w[i], &self.xty[i], 1.0);
        }
        let chol = Cholesky::new(a).ok_or_else(|| {
            SimError::Numeric("ridge normal matrix is not positive definite".into())
        })?;
        Ok(chol.solve(&b))
    }

    /// Training objective `||y - C beta||^2 / N_tr + lambda ||beta||^2` and
    /// its gradient in `phi` (with `w = softmax(phi)`) by the envelope
    /// relations at the ridge optimum.
    fn loss_and_grad_phi(&self, phi: &[f64]) -> Result<(f64, Vec<f64>)> {
        let w = softmax(phi);
        let beta = self.solve(&w)?;
        let t = self.t();
        let n_tr = self.n_tr;
        // per-position predictions on the train rows
        let preds: Vec<DVector<f64>> = (0..t)
            .map(|p| self.positions[p].rows(0, n_tr) * &beta)
            .collect();
        let mut resid = self.y.rows(0, n_tr).clone_owned();
        for (p, pred) in preds.iter().enumerate() {
            resid.axpy(-w[p], pred, 1.0);
        }
        let loss = resid.norm_squared() / n_tr as f64 + self.lambda * beta.norm_squared();
        // dg/dw_t = -(2/N_tr) resid . (X_t beta)
        let grad_w: Vec<f64> = preds
            .iter()
            .map(|pred| -2.0 / n_tr as f64 * resid.dot(pred))
            .collect();
        let inner: f64 = grad_w.iter().zip(&w).map(|(g, wi)| g * wi).sum();
        let grad_phi: Vec<f64> = grad_w
            .iter()
            .zip(&w)
            .map(|(g, wi)| wi * (g - inner))
            .collect();
        Ok((loss, grad_phi))
    }

    fn accuracies(&self, w: &[f64], beta: &DVector<f64>) -> (f64, f64) {
        let t = self.t();
        let n = self.y.len();
        let mut scores = DVector::<f64>::zeros(n);
        for p in 0..t {
            if w[p] != 0.0 {
                scores += &self.positions[p] * beta * w[p];
            }
        }
        let acc = |lo: usize, hi: usize| -> f64 {
            let mut hits = 0usize;
            for i in lo..hi {
                let pred = if scores[i] >= 0.0 { 1.0 } else { -1.0 };
                if pred == self.y[i] {
                    hits += 1;
                }
            }
            hits as f64 / (hi - lo) as f64
        };
        (acc(0, self.n_tr), acc(self.n_tr, n))
    }
}

/// Softmax-parameterized weight learning: gradient descent with backtracking,
/// the zero start plus `budget.restarts` standard-normal starts, best
/// training loss kept.
fn learn_weights(problem: &RidgeProblem, data: &Dataset, budget: LearnBudget) -> Result<Vec<f64>> {
    let t = problem.t();
    let mut rng = substream(data.config.seed, &[stage::CLASSIFY]);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for restart in 0..=budget.restarts {
        let mut phi = vec![0.0f64; t];
        if restart > 0 {
            for x in phi.iter_mut() {
                *x = rng.sample(StandardNormal);
            }
        }
        let (mut loss, mut grad) = problem.loss_and_grad_phi(&phi)?;
        for _ in 0..budget.iters {
            let gnorm2: f64 = grad.iter().map(|g| g * g).sum();
            if gnorm2 < 1e-20 {
                break;
            }
            let mut step = 1.0f64;
            let mut accepted = false;
            for _ in 0..40 {
                let cand: Vec<f64> = phi.iter().zip(&grad).map(|(p, g)| p - step * g).collect();
                let (cand_loss, cand_grad) = problem.loss_and_grad_phi(&cand)?;
                if cand_loss <= loss - 1e-4 * step * gnorm2 {
                    phi = cand;
                    loss = cand_loss;
                    grad = cand_grad;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if best.as_ref().map_or(true, |(b, _)| loss < *b) {
            best = Some((loss, phi));
        }
    }
    let (_, phi) = best.expect("at least the zero start ran");
    Ok(softmax(&phi))
}

pub fn softmax(phi: &[f64]) -> Vec<f64> {
    let max = phi.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = phi.iter().map(|p| (p - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Finite-difference check of the envelope gradient; returns the worst
/// relative error over `probes` random points. Exposed for the verification
/// suite.
pub fn gradient_check(data: &Dataset, lambda_ridge: f64, split: f64, probes: usize) -> Result<f64> {
    let t = data.config.t;
    let n_tr = (split * data.config.samples as f64).floor() as usize;
    let positions: Vec<DMatrix<f64>> = (0..t).map(|p| data.position_matrix(p)).collect();
    let y = DVector::from_column_slice(&data.labels);
    let problem = RidgeProblem::new(&positions, &y, n_tr, lambda_ridge);
    let mut rng = substream(data.config.seed, &[stage::CLASSIFY, 77]);
    let mut worst: f64 = 0.0;
    let h = 1e-6;
    for _ in 0..probes {
        let phi: Vec<f64> = (0..t).map(|_| rng.sample(StandardNormal)).collect();
        let (_, grad) = problem.loss_and_grad_phi(&phi)?;
        let mut fd = vec![0.0f64; t];
        for i in 0..t {
            let mut plus = phi.clone();
            plus[i] += h;
            let mut minus = phi.clone();
            minus[i] -= h;
            let (lp, _) = problem.loss_and_grad_phi(&plus)?;
            let (lm, _) = problem.loss_and_grad_phi(&minus)?;
            fd[i] = (lp - lm) / (2.0 * h);
        }
        let num: f64 = grad
            .iter()
            .zip(&fd)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let den: f64 = fd.iter().map(|x| x * x).sum::<f64>().sqrt();
        worst = worst.max(num / den.max(1e-300));
    }
    Ok(worst)
}
