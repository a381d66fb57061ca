//! Empirical spectra of pooled sample covariances, a structured power
//! iteration for big-dimension top eigenpairs, and histogram utilities.

use nalgebra::{DMatrix, DVector};

use crate::dataset::Dataset;
use crate::error::SimError;
use crate::rng::substream;
use crate::Result;
use rand::Rng;

/// Eigenvalues (descending) of `S = C C^T / N`, the squared overlap of the
/// top eigenvector with the signal direction `e_1`, and the top spectral gap.
#[derive(Clone, Debug)]
pub struct EmpiricalSpectrum {
    pub eigenvalues: Vec<f64>,
    pub alignment: f64,
    pub top_gap: f64,
}

/// Full symmetric eigendecomposition of the sample covariance.
pub fn empirical_spectrum(data: &Dataset) -> Result<EmpiricalSpectrum> {
    spectrum_of_pooled(&data.pooled, data.config.samples)
}

/// Spectrum of `(1/n) C C^T` for an explicit pooled matrix.
pub fn spectrum_of_pooled(pooled: &DMatrix<f64>, n: usize) -> Result<EmpiricalSpectrum> {
    let d = pooled.nrows();
    let mut s = pooled * pooled.transpose();
    s /= n as f64;
    let eig = s.symmetric_eigen();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let top = eig.eigenvectors.column(order[0]);
    let alignment = top[0] * top[0];
    let top_gap = if d > 1 {
        eigenvalues[0] - eigenvalues[1]
    } else {
        eigenvalues[0]
    };
    Ok(EmpiricalSpectrum {
        eigenvalues,
        alignment,
        top_gap,
    })
}

/// Top eigenpair of a symmetric operator given only as a mat-vec closure.
/// Deterministic: fixed seeded start vector, fixed iteration policy.
pub fn top_eigenpair<F>(dim: usize, iters: usize, matvec: F) -> (f64, Vec<f64>)
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let mut rng = substream(0x70_75_65_72, &[dim as u64]);
    let mut v = DVector::<f64>::from_fn(dim, |_, _| rng.gen::<f64>() - 0.5);
    v /= v.norm();
    for it in 0..iters {
        let av = matvec(&v);
        let norm = av.norm();
        if norm == 0.0 {
            break;
        }
        let next = av / norm;
        // residual check every few rounds keeps the loop cheap
        if it % 8 == 7 {
            let res = (matvec(&next) - &next * norm).norm();
            if res < 1e-11 * norm.abs().max(1.0) {
                v = next;
                break;
            }
        }
        v = next;
    }
    // Rayleigh quotient for the final estimate
    let av = matvec(&v);
    let lambda = v.dot(&av);
    (lambda, v.as_slice().to_vec())
}

/// Top eigenvalue of `(1/n) C C^T` and the squared first coordinate of its
/// eigenvector, via power iteration through the factor `C` (never forming the
/// covariance). A fixed iteration budget keeps the result deterministic.
pub fn top_alignment_of_pooled(pooled: &DMatrix<f64>, n: usize, iters: usize) -> (f64, f64) {
    let d = pooled.nrows();
    let scale = 1.0 / n as f64;
    let (lambda, v) = top_eigenpair(d, iters, |x| {
        let tmp = pooled.transpose() * x;
        (pooled * tmp) * scale
    });
    (lambda, v[0] * v[0])
}

/// Density histogram on `[lo, hi)` with equal bins. Heights integrate to the
/// fraction of samples inside the range.
#[derive(Clone, Debug)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub heights: Vec<f64>,
    pub total: usize,
}

impl Histogram {
    pub fn bin_width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }
}

/// Freedman-Diaconis bin count over `[lo, hi)`.
pub fn fd_bin_count(samples: &[f64], lo: f64, hi: f64) -> usize {
    let mut sorted: Vec<f64> = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q = |p: f64| -> f64 {
        let idx = (p * (sorted.len() - 1) as f64).round() as usize;
        sorted[idx.min(sorted.len() - 1)]
    };
    let iqr = q(0.75) - q(0.25);
    if iqr <= 0.0 {
        return 32;
    }
    let width = 2.0 * iqr / (sorted.len() as f64).cbrt();
    (((hi - lo) / width).ceil() as usize).clamp(4, 4096)
}

pub fn histogram(samples: &[f64], lo: f64, hi: f64, bins: usize) -> Result<Histogram> {
    if !(hi > lo) || bins == 0 {
        return Err(SimError::Config("bad histogram range".into()));
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in samples {
        if x >= lo && x < hi {
            let b = ((x - lo) / width) as usize;
            counts[b.min(bins - 1)] += 1;
        }
    }
    let norm = samples.len() as f64 * width;
    Ok(Histogram {
        edges: (0..=bins).map(|i| lo + width * i as f64).collect(),
        heights: counts.iter().map(|&c| c as f64 / norm).collect(),
        total: samples.len(),
    })
}

/// `sum_b |h_b - g_b| width_b` between two histograms on identical edges.
pub fn l1_between(a: &Histogram, b: &Histogram) -> f64 {
    assert_eq!(a.edges, b.edges);
    let w = a.bin_width();
    a.heights
        .iter()
        .zip(&b.heights)
        .map(|(x, y)| (x - y).abs() * w)
        .sum()
}

/// `sum_b |h_b - mean_b(f)| width_b` against a density sampled by 3-point
/// Simpson averaging over each bin.
pub fn l1_against_density<F: Fn(f64) -> f64>(hist: &Histogram, f: F) -> f64 {
    let w = hist.bin_width();
    hist.heights
        .iter()
        .enumerate()
        .map(|(i, &h)| {
            let (a, b) = (hist.edges[i], hist.edges[i + 1]);
            let avg = (f(a) + 4.0 * f(0.5 * (a + b)) + f(b)) / 6.0;
            (h - avg).abs() * w
        })
        .sum()
}
