//! The study runners: each regenerates one figure's data as a plot-ready
//! table. Sweep points are independent jobs, scheduled over the rayon pool
//! and emitted in grid order.

use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;

use attnspec_core::bulk::BulkParams;
use attnspec_core::model::{pool_scalars, CorrelationModel, PoolWeights};
use attnspec_core::spike;
use attnspec_sim::attention::{attention_deviation_standalone, log_log_slope};
use attnspec_sim::classify::{classify_with_budget, LearnBudget, Strategy};
use attnspec_sim::dataset::generate;
use attnspec_sim::spectrum::{fd_bin_count, histogram, top_alignment_of_pooled};

use crate::error::ExpError;
use crate::spec::{default_mu_grid, ExperimentSpec};
use crate::table::{mean_se, Column, ResultTable};
use crate::Result;

/// Dispatches on `spec.name`.
pub fn run(spec: &ExperimentSpec) -> Result<ResultTable> {
    spec.validate()?;
    match spec.name.as_str() {
        "bulk" => run_bulk(spec),
        "align" => run_alignment(spec),
        "phase_diagram" => run_phase_diagram(spec),
        "thresholds" => run_thresholds(spec),
        "snr" => run_snr(spec),
        "classify" => run_classification(spec),
        "attn_concentration" => run_attn_concentration(spec),
        other => Err(ExpError::Config(format!("unknown experiment {other:?}"))),
    }
}

fn metadata(spec: &ExperimentSpec, extra: serde_json::Value, wall: f64) -> serde_json::Value {
    json!({
        "spec": spec,
        "seed": spec.base.seed,
        "version": env!("CARGO_PKG_VERSION"),
        "extra": extra,
        "wall_time_s": wall,
    })
}

fn strategy_weights(strategy: Strategy, r: &CorrelationModel<f64>) -> Result<PoolWeights<f64>> {
    Ok(match strategy {
        Strategy::Mean => PoolWeights::mean(r.t()),
        Strategy::Causal => PoolWeights::causal(r.t()),
        Strategy::Optimal => PoolWeights::optimal(r)?,
        Strategy::Learned => {
            return Err(ExpError::Config(
                "learned weights have no closed form; only the classification study supports them"
                    .into(),
            ))
        }
    })
}

/// Empirical eigenvalue histogram against the limiting density, with the
/// scaled Marchenko-Pastur curve (infinite-vocabulary limit) for contrast.
pub fn run_bulk(spec: &ExperimentSpec) -> Result<ResultTable> {
    let t0 = Instant::now();
    let base = &spec.base;
    let r = base.r.build(base.t)?;
    let w = base.weights.build(&r)?;
    let sc = pool_scalars(&w, &r, base.mu_norm)?;
    let (delta, gamma) = (base.delta(), base.gamma());
    let params = BulkParams::new(delta, gamma, sc.kappa)?;
    let lambda_plus = params.edge()?.edge_right;
    let mp_params = BulkParams::new(0.0, gamma, sc.kappa)?;
    let report = spike::spike_report_from_scalars(sc.alpha, sc.kappa, delta, gamma, base.mu_norm)?;

    let trials = spec.trials.unwrap_or(5);
    let eta = params.default_eta()?;
    let density_at = |x: f64| -> f64 {
        params
            .stieltjes(attnspec_core::num_complex::Complex::new(x, eta))
            .map(|v| (v.m.im / std::f64::consts::PI).max(0.0))
            .unwrap_or(0.0)
    };
    let mp_eta = mp_params.default_eta()?;
    let mp_at = |x: f64| -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        mp_params
            .stieltjes(attnspec_core::num_complex::Complex::new(x, mp_eta))
            .map(|v| (v.m.im / std::f64::consts::PI).max(0.0))
            .unwrap_or(0.0)
    };

    let (columns, extra) = if spec.theory_only {
        let grid = params.default_grid()?;
        let theory: Vec<f64> = grid.iter().map(|&x| density_at(x)).collect();
        let mp: Vec<f64> = grid.iter().map(|&x| mp_at(x)).collect();
        (
            vec![
                Column::new("x", grid),
                Column::new("theory", theory),
                Column::new("mp_limit", mp),
            ],
            json!({
                "lambda_plus": lambda_plus,
                "lambda_out_theory": report.lambda_out,
                "alpha": sc.alpha,
                "kappa": sc.kappa,
            }),
        )
    } else {
        let evals: Vec<Vec<f64>> = (0..trials as u64)
            .into_par_iter()
            .map(|trial| -> Result<Vec<f64>> {
                let data = generate(base, trial)?;
                let s = (&data.pooled * data.pooled.transpose()) / base.samples as f64;
                Ok(s.symmetric_eigenvalues().as_slice().to_vec())
            })
            .collect::<Result<_>>()?;
        let tops: Vec<f64> = evals
            .iter()
            .map(|e| e.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
            .collect();
        let pooled: Vec<f64> = evals.into_iter().flatten().collect();
        let top_max = tops.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let hi = 1.2 * top_max.max(lambda_plus);
        let bins = fd_bin_count(&pooled, 0.0, hi);
        let hist = histogram(&pooled, 0.0, hi, bins)?;
        let centers = hist.centers();
        let theory: Vec<f64> = centers.iter().map(|&x| density_at(x)).collect();
        let mp: Vec<f64> = centers.iter().map(|&x| mp_at(x)).collect();
        let (top_mean, top_se) = mean_se(&tops);
        (
            vec![
                Column::new("x", centers),
                Column::new("hist", hist.heights.clone()),
                Column::new("theory", theory),
                Column::new("mp_limit", mp),
            ],
            json!({
                "lambda_plus": lambda_plus,
                "lambda_out_theory": report.lambda_out,
                "lambda_1_empirical_mean": top_mean,
                "lambda_1_empirical_se": top_se,
                "lambda_1_per_trial": tops,
                "trials": trials,
                "alpha": sc.alpha,
                "kappa": sc.kappa,
            }),
        )
    };
    ResultTable::new(
        "bulk",
        columns,
        metadata(spec, extra, t0.elapsed().as_secs_f64()),
    )
}

/// Theory and Monte Carlo signal alignment against signal strength for the
/// configured pooling strategies.
pub fn run_alignment(spec: &ExperimentSpec) -> Result<ResultTable> {
    let t0 = Instant::now();
    let base = &spec.base;
    let r = base.r.build(base.t)?;
    let (delta, gamma) = (base.delta(), base.gamma());
    let strategies = spec.strategies.clone().unwrap_or(vec![
        Strategy::Mean,
        Strategy::Causal,
        Strategy::Optimal,
    ]);
    let weights: Vec<(Strategy, PoolWeights<f64>)> = strategies
        .iter()
        .map(|&s| Ok((s, strategy_weights(s, &r)?)))
        .collect::<Result<_>>()?;
    let grid = spec.grid_or(default_mu_grid());
    let trials = spec.trials.unwrap_or(20);

    // theory curves
    let mut theory: Vec<Vec<f64>> = Vec::new();
    for (_, w) in &weights {
        let sc = pool_scalars(w, &r, 1.0)?;
        let mut col = Vec::with_capacity(grid.len());
        for &mu in &grid {
            col.push(
                spike::spike_report_from_scalars(sc.alpha, sc.kappa, delta, gamma, mu)?
                    .total_alignment,
            );
        }
        theory.push(col);
    }

    // Monte Carlo: one dataset per (mu, trial), pooled per strategy
    let mut mc = vec![vec![0.0; grid.len()]; weights.len()];
    let mut se = vec![vec![0.0; grid.len()]; weights.len()];
    if !spec.theory_only {
        let jobs: Vec<(usize, usize)> = (0..grid.len())
            .flat_map(|g| (0..trials).map(move |t| (g, t)))
            .collect();
        let outcomes: Vec<Vec<f64>> = jobs
            .par_iter()
            .map(|&(g, trial)| -> Result<Vec<f64>> {
                let mut cfg = base.clone();
                cfg.mu_norm = grid[g];
                let data = generate(&cfg, trial as u64)?;
                let mut row = Vec::with_capacity(weights.len());
                for (_, w) in &weights {
                    let pooled = data.pool_with(w.as_slice());
                    let (_, align) = top_alignment_of_pooled(&pooled, cfg.samples, 300);
                    row.push(align);
                }
                Ok(row)
            })
            .collect::<Result<_>>()?;
        for (wi, _) in weights.iter().enumerate() {
            for g in 0..grid.len() {
                let vals: Vec<f64> = jobs
                    .iter()
                    .zip(&outcomes)
                    .filter(|((gg, _), _)| *gg == g)
                    .map(|(_, row)| row[wi])
                    .collect();
                let (m, s) = mean_se(&vals);
                mc[wi][g] = m;
                se[wi][g] = s;
            }
        }
    }

    let mut columns = vec![Column::new("mu", grid.clone())];
    for (wi, (s, _)) in weights.iter().enumerate() {
        columns.push(Column::new(
            format!("theory_{}", s.as_str()),
            theory[wi].clone(),
        ));
        if !spec.theory_only {
            columns.push(Column::new(format!("mc_{}", s.as_str()), mc[wi].clone()));
            columns.push(Column::new(format!("se_{}", s.as_str()), se[wi].clone()));
        }
    }
    columns.push(Column::new(
        "trials",
        vec![if spec.theory_only { 0.0 } else { trials as f64 }; grid.len()],
    ));
    ResultTable::new(
        "align",
        columns,
        metadata(spec, json!({"trials": trials}), t0.elapsed().as_secs_f64()),
    )
}

/// Theoretical alignment heatmap over the `(mu, delta)` plane for mean and
/// optimal pooling, with the sample-threshold boundary per delta.
pub fn run_phase_diagram(spec: &ExperimentSpec) -> Result<ResultTable> {
    let t0 = Instant::now();
    let base = &spec.base;
    let r = base.r.build(base.t)?;
    let gamma = base.gamma();
    let mu_grid = spec.grid_or((0..60).map(|i| 5.0 * (i as f64 + 0.5) / 60.0).collect());
    let delta_grid = spec
        .delta_grid
        .clone()
        .unwrap_or((0..60).map(|i| 0.05 + 1.95 * i as f64 / 59.0).collect());
    let panels = [
        (Strategy::Mean, strategy_weights(Strategy::Mean, &r)?),
        (Strategy::Optimal, strategy_weights(Strategy::Optimal, &r)?),
    ];
    let scalars: Vec<(f64, f64)> = panels
        .iter()
        .map(|(_, w)| {
            let sc = pool_scalars(w, &r, 1.0).unwrap();
            (sc.alpha, sc.kappa)
        })
        .collect();

    let rows: Vec<Vec<f64>> = delta_grid
        .par_iter()
        .map(|&delta| -> Result<Vec<f64>> {
            let mut out = Vec::with_capacity(mu_grid.len() * 6);
            let mut boundaries = [0.0f64; 2];
            for (pi, &(alpha, kappa)) in scalars.iter().enumerate() {
                let (_, ms) = spike::thresholds_from_scalars(alpha, kappa, delta, gamma)?;
                boundaries[pi] = ms;
            }
            for &mu in &mu_grid {
                let mut aligns = [0.0f64; 2];
                for (pi, &(alpha, kappa)) in scalars.iter().enumerate() {
                    aligns[pi] = spike::spike_report_from_scalars(alpha, kappa, delta, gamma, mu)?
                        .total_alignment;
                }
                out.extend_from_slice(&[
                    delta,
                    mu,
                    aligns[0],
                    aligns[1],
                    boundaries[0],
                    boundaries[1],
                ]);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    let n = flat.len() / 6;
    let col = |k: usize| -> Vec<f64> { (0..n).map(|i| flat[i * 6 + k]).collect() };
    let columns = vec![
        Column::new("delta", col(0)),
        Column::new("mu", col(1)),
        Column::new("align_mean", col(2)),
        Column::new("align_optimal", col(3)),
        Column::new("mu_samp_mean", col(4)),
        Column::new("mu_samp_optimal", col(5)),
    ];
    ResultTable::new(
        "phase_diagram",
        columns,
        metadata(spec, json!({"gamma": gamma}), t0.elapsed().as_secs_f64()),
    )
}

/// Detectability thresholds against prefix length for mean and causal
/// pooling at fixed sequence length.
pub fn run_thresholds(spec: &ExperimentSpec) -> Result<ResultTable> {
    let t0 = Instant::now();
    let base = &spec.base;
    let t = base.t;
    let (delta, gamma) = (base.delta(), base.gamma());
    let grid = spec.grid_or((1..=t).map(|l| l as f64).collect());
    let mean = PoolWeights::<f64>::mean(t);
    let causal = PoolWeights::<f64>::causal(t);
    let mut cols = vec![Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new()];
    for &lf in &grid {
        let l = lf as usize;
        let r = CorrelationModel::prefix(l, t)?;
        let (mp_m, ms_m) = spike::thresholds(&mean, &r, delta, gamma)?;
        let (mp_c, ms_c) = spike::thresholds(&causal, &r, delta, gamma)?;
        cols[0].push(lf);
        cols[1].push(mp_m);
        cols[2].push(ms_m);
        cols[3].push(mp_c);
        cols[4].push(ms_c);
    }
    let names = [
        "l",
        "mu_pop_mean",
        "mu_samp_mean",
        "mu_pop_causal",
        "mu_samp_causal",
    ];
    let columns = names
        .iter()
        .zip(cols)
        .map(|(n, v)| Column::new(*n, v))
        .collect();
    ResultTable::new(
        "thresholds",
        columns,
        metadata(spec, json!({"t": t}), t0.elapsed().as_secs_f64()),
    )
}

/// Effective signal-to-noise ratio against sequence length at fixed prefix
/// length, with the spectral ceiling `lambda_max(R)` for reference.
pub fn run_snr(spec: &ExperimentSpec) -> Result<ResultTable> {
    let t0 = Instant::now();
    let l = match spec.base.r {
        attnspec_sim::CorrSpec::Prefix { len } => len,
        _ => {
            return Err(ExpError::Config(
                "the snr study sweeps sequence length on the prefix model".into(),
            ))
        }
    };
    let grid = spec.grid_or((l.max(2)..=40).map(|t| t as f64).collect());
    let mut cols = vec![Vec::new(), Vec::new(), Vec::new(), Vec::new()];
    for &tf in &grid {
        let t = tf as usize;
        if t < l {
            return Err(ExpError::Config(format!(
                "sequence length {t} below prefix length {l}"
            )));
        }
        let r = CorrelationModel::prefix(l, t)?;
        let sm = pool_scalars(&PoolWeights::<f64>::mean(t), &r, 1.0)?;
        let sc = pool_scalars(&PoolWeights::<f64>::causal(t), &r, 1.0)?;
        cols[0].push(tf);
        cols[1].push(sm.snr);
        cols[2].push(sc.snr);
        cols[3].push(r.matrix().eigen().values[0]);
    }
    let names = ["t", "snr_mean", "snr_causal", "lambda_max"];
    let columns = names
        .iter()
        .zip(cols)
        .map(|(n, v)| Column::new(*n, v))
        .collect();
    ResultTable::new(
        "snr",
        columns,
        metadata(spec, json!({"l": l}), t0.elapsed().as_secs_f64()),
    )
}

/// Ridge classification accuracy against signal strength per pooling
/// strategy.
pub fn run_classification(spec: &ExperimentSpec) -> Result<ResultTable> {
    let t0 = Instant::now();
    let base = &spec.base;
    let strategies = spec.strategies.clone().unwrap_or(vec![
        Strategy::Mean,
        Strategy::Causal,
        Strategy::Optimal,
        Strategy::Learned,
    ]);
    let grid = spec.grid_or(default_mu_grid());
    let trials = spec.trials.unwrap_or(20);
    let lambda = spec.lambda_ridge.unwrap_or(1.0);
    let split = spec.split.unwrap_or(0.8);
    let budget = LearnBudget {
        restarts: spec.learn_restarts.unwrap_or(5),
        iters: spec.learn_iters.unwrap_or(200),
    };

    let jobs: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|g| (0..trials).map(move |t| (g, t)))
        .collect();
    let outcomes: Vec<Vec<f64>> = jobs
        .par_iter()
        .map(|&(g, trial)| -> Result<Vec<f64>> {
            let mut cfg = base.clone();
            cfg.mu_norm = grid[g];
            let data = generate(&cfg, trial as u64)?;
            let mut row = Vec::with_capacity(strategies.len());
            for &s in &strategies {
                let out = classify_with_budget(&data, s, lambda, split, budget)?;
                row.push(out.test_acc);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let mut columns = vec![Column::new("mu", grid.clone())];
    for (si, s) in strategies.iter().enumerate() {
        let mut means = Vec::with_capacity(grid.len());
        let mut ses = Vec::with_capacity(grid.len());
        for g in 0..grid.len() {
            let vals: Vec<f64> = jobs
                .iter()
                .zip(&outcomes)
                .filter(|((gg, _), _)| *gg == g)
                .map(|(_, row)| row[si])
                .collect();
            let (m, e) = mean_se(&vals);
            means.push(m);
            ses.push(e);
        }
        columns.push(Column::new(format!("acc_{}", s.as_str()), means));
        columns.push(Column::new(format!("se_{}", s.as_str()), ses));
    }
    columns.push(Column::new("trials", vec![trials as f64; grid.len()]));
    ResultTable::new(
        "classify",
        columns,
        metadata(
            spec,
            json!({"lambda_ridge": lambda, "split": split, "trials": trials}),
            t0.elapsed().as_secs_f64(),
        ),
    )
}

/// Attention-weight concentration: mean distance to the harmonic limit
/// against embedding dimension, with the fitted log-log slope.
pub fn run_attn_concentration(spec: &ExperimentSpec) -> Result<ResultTable> {
    let t0 = Instant::now();
    let base = &spec.base;
    let grid = spec.grid_or(vec![200.0, 400.0, 800.0, 1600.0, 3200.0]);
    let tau = spec.tau.unwrap_or(1.0);
    let vocab_factor = spec.vocab_factor.unwrap_or(4);
    let sequences = spec.sequences.unwrap_or(256);
    let devs: Vec<f64> = grid
        .par_iter()
        .map(|&df| -> Result<f64> {
            let d = df as usize;
            Ok(attention_deviation_standalone(
                d,
                vocab_factor * d,
                sequences,
                base.t,
                tau,
                base.mu_norm,
                base.seed,
                0,
            )?)
        })
        .collect::<Result<_>>()?;
    let slope = log_log_slope(&grid, &devs);
    let columns = vec![Column::new("d", grid), Column::new("deviation", devs)];
    ResultTable::new(
        "attn_concentration",
        columns,
        metadata(
            spec,
            json!({"slope": slope, "tau": tau, "sequences": sequences, "vocab_factor": vocab_factor}),
            t0.elapsed().as_secs_f64(),
        ),
    )
}
