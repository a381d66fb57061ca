//! Problem data: dimensions, positional correlation matrices, pooling weight
//! constructors, and the two scalars `alpha = w^T R w`, `kappa = ||w||^2`
//! that the whole spectral theory is expressed in.

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::matrix::SymMatrix;
use crate::scalar::{ksum, KahanSum, Scalar};
use crate::Result;

/// Symmetry tolerance for user-supplied correlation matrices; loose enough to
/// admit matrices round-tripped through text files.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Eigenvalue floor below which a matrix is rejected as not PSD.
pub const PSD_FLOOR: f64 = -1e-10;
/// Pooling weights must sum to one within this.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Asymptotic-regime parameters. Finite dimensions are optional; when present
/// they must be consistent with the stored ratios.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelDims<S> {
    /// Embedding dimension `d`, when finite.
    pub d: Option<usize>,
    /// Vocabulary size `V` (even), when finite.
    pub vocab: Option<usize>,
    /// Sample count `N`, when finite.
    pub samples: Option<usize>,
    /// Sequence length `T`.
    pub t: usize,
    /// Signal strength `||mu||`.
    pub mu_norm: S,
    /// Ratio `d/V`.
    pub delta: S,
    /// Ratio `d/N`.
    pub gamma: S,
}

impl<S: Scalar> ModelDims<S> {
    /// Finite-dimensional instance; the ratios are derived.
    pub fn finite(d: usize, vocab: usize, samples: usize, t: usize, mu_norm: S) -> Result<Self> {
        if d == 0 || vocab == 0 || samples == 0 || t == 0 {
            return Err(CoreError::invalid("dimensions d, V, N, T must be positive"));
        }
        if vocab % 2 != 0 {
            return Err(CoreError::invalid(format!(
                "vocabulary size must be even for balanced signs, got V = {vocab}"
            )));
        }
        if mu_norm < S::zero() {
            return Err(CoreError::invalid("mu_norm must be nonnegative"));
        }
        Ok(Self {
            d: Some(d),
            vocab: Some(vocab),
            samples: Some(samples),
            t,
            mu_norm,
            delta: S::of_usize(d) / S::of_usize(vocab),
            gamma: S::of_usize(d) / S::of_usize(samples),
        })
    }

    /// Ratio-only instance for theory evaluations.
    pub fn asymptotic(delta: S, gamma: S, t: usize, mu_norm: S) -> Result<Self> {
        if !(delta > S::zero()) || !(gamma > S::zero()) {
            return Err(CoreError::invalid("delta and gamma must be positive"));
        }
        if t == 0 {
            return Err(CoreError::invalid("T must be positive"));
        }
        if mu_norm < S::zero() {
            return Err(CoreError::invalid("mu_norm must be nonnegative"));
        }
        Ok(Self {
            d: None,
            vocab: None,
            samples: None,
            t,
            mu_norm,
            delta,
            gamma,
        })
    }
}

/// How a positional correlation matrix was built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum CorrKind<S> {
    /// Fully correlated block on the first `len` positions, identity after.
    Prefix { len: usize },
    /// `I_T + theta u u^T` with a unit vector `u`.
    Spiked { theta: S, u: Vec<S> },
    /// Arbitrary symmetric PSD matrix supplied by the caller.
    Custom,
}

/// A validated `T x T` positional correlation matrix.
#[derive(Clone, Debug)]
pub struct CorrelationModel<S> {
    kind: CorrKind<S>,
    matrix: SymMatrix<S>,
}

impl<S: Scalar> CorrelationModel<S> {
    /// Block-diagonal `ones(L) x ones(L)^T (+) I_{T-L}`.
    pub fn prefix(len: usize, t: usize) -> Result<Self> {
        if len == 0 || len > t {
            return Err(CoreError::invalid(format!(
                "prefix length must satisfy 1 <= L <= T, got L = {len}, T = {t}"
            )));
        }
        let mut m = SymMatrix::identity(t);
        for i in 0..len {
            for j in 0..len {
                m.set(i, j, S::one());
            }
        }
        Ok(Self {
            kind: CorrKind::Prefix { len },
            matrix: m,
        })
    }

    /// `I_T + theta u u^T`; `u` must be unit length.
    pub fn spiked(theta: S, u: Vec<S>) -> Result<Self> {
        if !(theta > S::zero()) {
            return Err(CoreError::invalid("spike strength theta must be positive"));
        }
        let norm2 = ksum(u.iter().map(|&x| x * x));
        if (norm2 - S::one()).abs() > S::tol(1e-8) {
            return Err(CoreError::invalid(format!(
                "spike direction must be unit length, got ||u||^2 = {}",
                norm2.as_f64()
            )));
        }
        let t = u.len();
        let mut m = SymMatrix::identity(t);
        for i in 0..t {
            for j in 0..t {
                let v = m.get(i, j) + theta * u[i] * u[j];
                m.set(i, j, v);
            }
        }
        Ok(Self {
            kind: CorrKind::Spiked { theta, u },
            matrix: m,
        })
    }

    /// Spiked model with `u` uniform on the first `support` positions, the
    /// configuration used by the phase-diagram and spiked-alignment studies.
    pub fn spiked_uniform(theta: S, support: usize, t: usize) -> Result<Self> {
        if support == 0 || support > t {
            return Err(CoreError::invalid(format!(
                "spike support must satisfy 1 <= L <= T, got L = {support}, T = {t}"
            )));
        }
        let mut u = vec![S::zero(); t];
        let val = S::one() / S::of_usize(support).sqrt();
        for x in u.iter_mut().take(support) {
            *x = val;
        }
        Self::spiked(theta, u)
    }

    /// Validates symmetry to 1e-12 and positive semidefiniteness to a -1e-10
    /// eigenvalue floor, naming the violated check on failure.
    pub fn custom(matrix: SymMatrix<S>) -> Result<Self> {
        let asym = matrix.asymmetry();
        if asym > S::tol(SYMMETRY_TOL) * S::one().max(matrix.max_abs()) {
            return Err(CoreError::invalid(format!(
                "correlation matrix failed symmetry check: max |a_ij - a_ji| = {}",
                asym.as_f64()
            )));
        }
        let evals = matrix.eigenvalues();
        let floor = S::tol(-PSD_FLOOR) * S::one().max(matrix.max_abs());
        if let Some(min) = evals.last() {
            if *min < -floor {
                return Err(CoreError::invalid(format!(
                    "correlation matrix failed PSD check: smallest eigenvalue = {}",
                    min.as_f64()
                )));
            }
        }
        Ok(Self {
            kind: CorrKind::Custom,
            matrix,
        })
    }

    pub fn kind(&self) -> &CorrKind<S> {
        &self.kind
    }

    pub fn t(&self) -> usize {
        self.matrix.dim()
    }

    /// The realized `T x T` matrix.
    pub fn matrix(&self) -> &SymMatrix<S> {
        &self.matrix
    }

    /// Whether `+/-1` signs with second moments `R` exist: unit diagonal and
    /// off-diagonal entries in `[-1, 1]`.
    pub fn binary_realizable(&self) -> bool {
        let t = self.t();
        for i in 0..t {
            if (self.matrix.get(i, i) - S::one()).abs() > S::tol(1e-9) {
                return false;
            }
            for j in 0..t {
                if self.matrix.get(i, j).abs() > S::one() + S::tol(1e-9) {
                    return false;
                }
            }
        }
        true
    }
}

/// Which constructor produced a weight vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolLabel {
    Mean,
    Causal,
    Optimal,
    Custom,
}

impl PoolLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            PoolLabel::Mean => "mean",
            PoolLabel::Causal => "causal",
            PoolLabel::Optimal => "optimal",
            PoolLabel::Custom => "custom",
        }
    }
}

/// A pooling weight vector on `T` positions, constrained to sum to one.
#[derive(Clone, Debug)]
pub struct PoolWeights<S> {
    w: Vec<S>,
    label: PoolLabel,
}

impl<S: Scalar> PoolWeights<S> {
    fn checked(w: Vec<S>, label: PoolLabel) -> Result<Self> {
        if w.is_empty() {
            return Err(CoreError::invalid("weight vector must be nonempty"));
        }
        let sum = ksum(w.iter().copied());
        if (sum - S::one()).abs() > S::tol(WEIGHT_SUM_TOL) {
            return Err(CoreError::invalid(format!(
                "pooling weights must sum to 1, got {}",
                sum.as_f64()
            )));
        }
        Ok(Self { w, label })
    }

    /// Uniform weights `1/T`.
    pub fn mean(t: usize) -> Self {
        let v = S::one() / S::of_usize(t);
        Self {
            w: vec![v; t],
            label: PoolLabel::Mean,
        }
    }

    /// Deterministic limit of masked softmax self-attention with `tau/d`
    /// score scaling: harmonic weights
    /// `w_1 = (1 + H_{T-1})/T`, `w_s = (H_{T-1} - H_{s-1})/T`.
    pub fn causal(t: usize) -> Self {
        let h = harmonic_numbers::<S>(t.saturating_sub(1));
        let tt = S::of_usize(t);
        let mut w = Vec::with_capacity(t);
        w.push((S::one() + h[t - 1]) / tt);
        for s in 2..=t {
            w.push((h[t - 1] - h[s - 1]) / tt);
        }
        Self {
            w,
            label: PoolLabel::Causal,
        }
    }

    /// The Rayleigh-quotient maximizer `v_max / (1^T v_max)`.
    ///
    /// The top eigenspace is resolved by a dense eigensolve; under degenerate
    /// top eigenvalues the all-ones vector is projected onto the eigenspace,
    /// which picks the maximizer of smallest `kappa` and reduces to the
    /// single-eigenvector formula when the top eigenvalue is simple. Errors
    /// with the supremum when the ones vector is orthogonal to the eigenspace.
    pub fn optimal(model: &CorrelationModel<S>) -> Result<Self> {
        let t = model.t();
        let eig = model.matrix().eigen();
        let lambda_max = eig.values[0];
        let tie = S::tol(1e-11) * S::one().max(lambda_max.abs());
        // project the ones vector onto the top eigenspace
        let mut proj = vec![S::zero(); t];
        for (val, vec) in eig.values.iter().zip(&eig.vectors) {
            if lambda_max - *val > tie {
                break;
            }
            let coeff = ksum(vec.iter().copied());
            for (p, &v) in proj.iter_mut().zip(vec) {
                *p += coeff * v;
            }
        }
        let norm = ksum(proj.iter().map(|&x| x * x)).sqrt();
        if norm <= S::tol(1e-10) * S::of_usize(t).sqrt() {
            return Err(CoreError::Unattainable {
                lambda_max: lambda_max.as_f64(),
            });
        }
        // 1^T proj = ||proj||^2 / 1 >= 0 by construction; renormalize to sum 1
        let sum = ksum(proj.iter().copied());
        let w: Vec<S> = proj.iter().map(|&x| x / sum).collect();
        Self::checked(w, PoolLabel::Optimal)
    }

    /// Arbitrary weights; must sum to one within 1e-12.
    pub fn custom(w: Vec<S>) -> Result<Self> {
        Self::checked(w, PoolLabel::Custom)
    }

    pub fn as_slice(&self) -> &[S] {
        &self.w
    }

    pub fn t(&self) -> usize {
        self.w.len()
    }

    pub fn label(&self) -> PoolLabel {
        self.label
    }

    /// `kappa = ||w||^2`.
    pub fn kappa(&self) -> S {
        ksum(self.w.iter().map(|&x| x * x))
    }
}

/// The derived scalars of a `(w, R, ||mu||)` triple.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoolScalars<S> {
    /// `w^T R w`: effective signal strength after pooling.
    pub alpha: S,
    /// `||w||^2`: effective noise scale after pooling.
    pub kappa: S,
    /// `alpha ||mu||^2 / kappa`: the population spike ratio.
    pub rho: S,
    /// `alpha / kappa`: the signal-to-noise ratio the weights control.
    pub snr: S,
}

/// Evaluates `alpha`, `kappa`, `rho`, `snr` for given weights and correlation
/// model.
pub fn pool_scalars<S: Scalar>(
    w: &PoolWeights<S>,
    r: &CorrelationModel<S>,
    mu_norm: S,
) -> Result<PoolScalars<S>> {
    if w.t() != r.t() {
        return Err(CoreError::invalid(format!(
            "weight length {} does not match correlation dimension {}",
            w.t(),
            r.t()
        )));
    }
    let alpha = r.matrix().quad_form(w.as_slice());
    let kappa = w.kappa();
    let snr = alpha / kappa;
    Ok(PoolScalars {
        alpha,
        kappa,
        rho: snr * mu_norm * mu_norm,
        snr,
    })
}

/// Harmonic numbers `H_0 = 0, H_1, ..., H_n` by compensated summation.
pub fn harmonic_numbers<S: Scalar>(n: usize) -> Vec<S> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = KahanSum::new();
    out.push(S::zero());
    for k in 1..=n {
        acc.add(S::one() / S::of_usize(k));
        out.push(acc.value());
    }
    out
}

/// Closed forms for the causal scalars on the prefix model:
/// `kappa = (2T - 1 + H_{T-1}) / T^2` and
/// `alpha = (L^2 + 2(T-L) + (2L(L-1)+1) D + L(L-1) D^2) / T^2`
/// with `D = H_{T-1} - H_{L-1}`.
pub fn causal_scalars_closed_form<S: Scalar>(
    t: usize,
    l: usize,
    mu_norm: S,
) -> Result<PoolScalars<S>> {
    if l == 0 || l > t {
        return Err(CoreError::invalid(format!(
            "prefix length must satisfy 1 <= L <= T, got L = {l}, T = {t}"
        )));
    }
    let h = harmonic_numbers::<S>(t.saturating_sub(1));
    let tt = S::of_usize(t);
    let ll = S::of_usize(l);
    let t2 = tt * tt;
    let kappa = (S::of(2.0) * tt - S::one() + h[t - 1]) / t2;
    let d = h[t - 1] - h[l - 1];
    let alpha = (ll * ll
        + S::of(2.0) * (tt - ll)
        + (S::of(2.0) * ll * (ll - S::one()) + S::one()) * d
        + ll * (ll - S::one()) * d * d)
        / t2;
    let snr = alpha / kappa;
    Ok(PoolScalars {
        alpha,
        kappa,
        rho: snr * mu_norm * mu_norm,
        snr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn prefix_small_cases() {
        let r = CorrelationModel::<f64>::prefix(1, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_eq!(r.matrix().get(i, j), want);
            }
        }
        let r = CorrelationModel::<f64>::prefix(3, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(r.matrix().get(i, j), 1.0);
            }
        }
    }

    #[test]
    fn spiked_on_basis_vector() {
        let r = CorrelationModel::<f64>::spiked(10.0, vec![1.0, 0.0]).unwrap();
        assert_eq!(r.matrix().get(0, 0), 11.0);
        assert_eq!(r.matrix().get(0, 1), 0.0);
        assert_eq!(r.matrix().get(1, 1), 1.0);
    }

    #[test]
    fn custom_rejects_asymmetry_and_indefiniteness() {
        let mut m = SymMatrix::<f64>::identity(2);
        m.set(0, 1, 0.5);
        let err = CorrelationModel::custom(m).unwrap_err();
        assert!(err.to_string().contains("symmetry"));

        let mut m = SymMatrix::<f64>::identity(2);
        m.set_sym(0, 1, 2.0); // eigenvalues 3, -1
        let err = CorrelationModel::custom(m).unwrap_err();
        assert!(err.to_string().contains("PSD"));
    }

    #[test]
    fn mean_weights_examples() {
        assert_eq!(PoolWeights::<f64>::mean(1).as_slice(), &[1.0]);
        assert_eq!(
            PoolWeights::<f64>::mean(4).as_slice(),
            &[0.25, 0.25, 0.25, 0.25]
        );
        assert!(close(PoolWeights::<f64>::mean(10).kappa(), 0.1, 1e-15));
    }

    #[test]
    fn pool_scalars_prefix_closed_form() {
        // w = 1/10 on Prefix(3, 10): alpha = (9 + 7)/100, kappa = 1/10
        let w = PoolWeights::<f64>::mean(10);
        let r = CorrelationModel::prefix(3, 10).unwrap();
        let s = pool_scalars(&w, &r, 1.0).unwrap();
        assert!(close(s.alpha, 0.16, 1e-14));
        assert!(close(s.kappa, 0.1, 1e-15));
        assert!(close(s.snr, 1.6, 1e-13));
    }

    #[test]
    fn pool_scalars_basis_vector() {
        let w = PoolWeights::<f64>::custom(vec![1.0, 0.0, 0.0]).unwrap();
        let r = CorrelationModel::prefix(2, 3).unwrap();
        let s = pool_scalars(&w, &r, 2.0).unwrap();
        assert_eq!(s.alpha, 1.0);
        assert_eq!(s.kappa, 1.0);
        assert_eq!(s.snr, 1.0);
        assert!(close(s.rho, 4.0, 1e-15));
    }

    #[test]
    fn pool_scalars_dimension_mismatch() {
        let w = PoolWeights::<f64>::mean(4);
        let r = CorrelationModel::prefix(1, 3).unwrap();
        assert!(pool_scalars(&w, &r, 1.0).is_err());
    }

    #[test]
    fn causal_weights_match_row_averaged_uniform_attention() {
        // Oracle: build the uniform causal attention matrix (row 1 puts all
        // mass on key 1, row t >= 2 is uniform on keys 1..t-1) and average
        // its rows.
        for t in 1..=64usize {
            let mut oracle = vec![0.0f64; t];
            oracle[0] += 1.0;
            for row in 2..=t {
                for key in 1..row {
                    oracle[key - 1] += 1.0 / (row as f64 - 1.0);
                }
            }
            for x in oracle.iter_mut() {
                *x /= t as f64;
            }
            let w = PoolWeights::<f64>::causal(t);
            for (a, b) in w.as_slice().iter().zip(&oracle) {
                assert!(close(*a, *b, 1e-12), "T = {t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn causal_weights_small_cases() {
        assert_eq!(PoolWeights::<f64>::causal(1).as_slice(), &[1.0]);
        let w2 = PoolWeights::<f64>::causal(2);
        assert!(close(w2.as_slice()[0], 1.0, 1e-15));
        assert!(close(w2.as_slice()[1], 0.0, 1e-15));
        let w3 = PoolWeights::<f64>::causal(3);
        assert!(close(w3.as_slice()[0], 5.0 / 6.0, 1e-15));
        assert!(close(w3.as_slice()[1], 1.0 / 6.0, 1e-15));
        assert!(close(w3.as_slice()[2], 0.0, 1e-15));
    }

    #[test]
    fn causal_weights_shape() {
        for t in 2..=64usize {
            let w = PoolWeights::<f64>::causal(t);
            let s = w.as_slice();
            assert!(close(s.iter().sum::<f64>(), 1.0, 1e-12));
            for k in 1..t {
                assert!(s[k - 1] >= s[k] - 1e-15, "not nonincreasing at T = {t}");
            }
            assert!(close(s[t - 1], 0.0, 1e-15));
        }
    }

    #[test]
    fn causal_kappa_t10() {
        let w = PoolWeights::<f64>::causal(10);
        let h9: f64 = (1..=9).map(|k| 1.0 / k as f64).sum();
        assert!(close(w.kappa(), (19.0 + h9) / 100.0, 1e-15));
        assert!(close(w.kappa(), 0.218290, 5e-7));
    }

    #[test]
    fn causal_closed_form_matches_vector_route() {
        for t in 1..=64usize {
            let w = PoolWeights::<f64>::causal(t);
            for l in 1..=t {
                let r = CorrelationModel::prefix(l, t).unwrap();
                let direct = pool_scalars(&w, &r, 1.0).unwrap();
                let closed = causal_scalars_closed_form::<f64>(t, l, 1.0).unwrap();
                assert!(
                    close(direct.alpha, closed.alpha, 1e-12),
                    "alpha T={t} L={l}: {} vs {}",
                    direct.alpha,
                    closed.alpha
                );
                assert!(close(direct.kappa, closed.kappa, 1e-12));
            }
        }
    }

    #[test]
    fn causal_closed_form_l_equals_t() {
        let s = causal_scalars_closed_form::<f64>(7, 7, 1.0).unwrap();
        assert!(close(s.alpha, 1.0, 1e-14));
        let s = causal_scalars_closed_form::<f64>(2, 1, 1.0).unwrap();
        assert!(close(s.alpha, 1.0, 1e-14)); // (1 + 2 + 1 + 0)/4
        assert!(causal_scalars_closed_form::<f64>(4, 5, 1.0).is_err());
    }

    #[test]
    fn optimal_weights_prefix() {
        let r = CorrelationModel::<f64>::prefix(3, 10).unwrap();
        let w = PoolWeights::optimal(&r).unwrap();
        for (i, &x) in w.as_slice().iter().enumerate() {
            let want = if i < 3 { 1.0 / 3.0 } else { 0.0 };
            assert!(close(x, want, 1e-10), "w[{i}] = {x}");
        }
        let s = pool_scalars(&w, &r, 1.0).unwrap();
        assert!(close(s.snr, 3.0, 1e-10));
    }

    #[test]
    fn optimal_weights_spiked() {
        let mut u = vec![0.0f64; 8];
        let val = 1.0 / (3.0f64).sqrt();
        for x in u.iter_mut().take(3) {
            *x = val;
        }
        let r = CorrelationModel::spiked(10.0, u).unwrap();
        let w = PoolWeights::optimal(&r).unwrap();
        let s = pool_scalars(&w, &r, 1.0).unwrap();
        assert!(close(s.snr, 11.0, 1e-10));
    }

    #[test]
    fn optimal_weights_degenerate_identity() {
        let r = CorrelationModel::<f64>::custom(SymMatrix::identity(5)).unwrap();
        let w = PoolWeights::optimal(&r).unwrap();
        let s = pool_scalars(&w, &r, 1.0).unwrap();
        assert!(close(s.snr, 1.0, 1e-12));
        // projection of the ones vector picks mean pooling here
        for &x in w.as_slice() {
            assert!(close(x, 0.2, 1e-12));
        }
    }

    #[test]
    fn optimal_weights_unattainable() {
        // top eigenvector (1, -1)/sqrt(2) is orthogonal to the ones vector
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let r = CorrelationModel::spiked(5.0, vec![s, -s]).unwrap();
        match PoolWeights::optimal(&r) {
            Err(CoreError::Unattainable { lambda_max }) => {
                assert!(close(lambda_max, 6.0, 1e-10));
            }
            other => panic!("expected unattainable error, got {other:?}"),
        }
    }

    #[test]
    fn harmonic_identities() {
        // sum H_k = (n+1) H_n - n ; sum H_k^2 = (n+1) H_n^2 - (2n+1) H_n + 2n
        let h = harmonic_numbers::<f64>(100);
        for n in 1..=100usize {
            let lhs1: f64 = (1..=n).map(|k| h[k]).sum();
            let rhs1 = (n as f64 + 1.0) * h[n] - n as f64;
            assert!(close(lhs1, rhs1, 1e-12 * rhs1.abs().max(1.0)));
            let lhs2: f64 = (1..=n).map(|k| h[k] * h[k]).sum();
            let rhs2 =
                (n as f64 + 1.0) * h[n] * h[n] - (2.0 * n as f64 + 1.0) * h[n] + 2.0 * n as f64;
            assert!(close(lhs2, rhs2, 1e-12 * rhs2.abs().max(1.0)));
        }
    }

    #[test]
    fn snr_scale_invariance() {
        let r = CorrelationModel::<f64>::prefix(4, 9).unwrap();
        let x = vec![0.9, -0.2, 0.4, 0.05, 0.1, 0.3, -0.15, 0.2, 0.4];
        let sum: f64 = x.iter().sum();
        let w1 = PoolWeights::custom(x.iter().map(|v| v / sum).collect()).unwrap();
        let scaled: Vec<f64> = x.iter().map(|v| v * 7.3).collect();
        let ssum: f64 = scaled.iter().sum();
        let w2 = PoolWeights::custom(scaled.iter().map(|v| v / ssum).collect()).unwrap();
        let s1 = pool_scalars(&w1, &r, 1.0).unwrap();
        let s2 = pool_scalars(&w2, &r, 1.0).unwrap();
        assert!(close(s1.snr, s2.snr, 1e-12));
    }

    #[test]
    fn causal_vs_mean_dominance_region() {
        // The early-position bias of the causal weights helps when the
        // correlated prefix is short. The true picture for Prefix(L, T):
        //   - L = 1: R is the identity, every weight vector has snr 1;
        //   - 2 <= L <= T/2: causal strictly beats mean (checked here up to
        //     T = 64; the winning region actually extends to ~0.6 T);
        //   - L close to T: mean wins, e.g. (T, L) = (3, 2) gives
        //     18/13 < 5/3, and at L = T - 1 mean wins for every T >= 3.
        for t in 2..=64usize {
            let mean = PoolWeights::<f64>::mean(t);
            let causal = PoolWeights::<f64>::causal(t);
            for l in 1..t {
                let r = CorrelationModel::prefix(l, t).unwrap();
                let sm = pool_scalars(&mean, &r, 1.0).unwrap();
                let sc = pool_scalars(&causal, &r, 1.0).unwrap();
                if l == 1 {
                    assert!(close(sc.snr, 1.0, 1e-12));
                    assert!(close(sm.snr, 1.0, 1e-12));
                } else if l <= t / 2 {
                    assert!(
                        sc.snr > sm.snr,
                        "causal should dominate at T = {t}, L = {l}: {} vs {}",
                        sc.snr,
                        sm.snr
                    );
                } else if l == t - 1 && t >= 3 {
                    assert!(
                        sm.snr > sc.snr,
                        "mean should dominate at T = {t}, L = T - 1: {} vs {}",
                        sm.snr,
                        sc.snr
                    );
                }
            }
        }
        // the smallest counterexample to blanket causal dominance
        let r = CorrelationModel::prefix(2, 3).unwrap();
        let sc = pool_scalars(&PoolWeights::<f64>::causal(3), &r, 1.0).unwrap();
        let sm = pool_scalars(&PoolWeights::<f64>::mean(3), &r, 1.0).unwrap();
        assert!(close(sc.snr, 18.0 / 13.0, 1e-12));
        assert!(close(sm.snr, 5.0 / 3.0, 1e-12));
    }

    #[test]
    fn dims_validation() {
        assert!(ModelDims::<f64>::finite(500, 800, 1000, 10, 2.5).is_ok());
        assert!(ModelDims::<f64>::finite(500, 801, 1000, 10, 2.5).is_err());
        assert!(ModelDims::<f64>::finite(0, 800, 1000, 10, 2.5).is_err());
        let dims = ModelDims::<f64>::finite(500, 800, 1000, 10, 2.5).unwrap();
        assert!(close(dims.delta, 0.625, 1e-15));
        assert!(close(dims.gamma, 0.5, 1e-15));
        assert!(ModelDims::<f64>::asymptotic(0.0, 0.5, 4, 1.0).is_err());
    }

    #[test]
    fn weight_sum_validation() {
        assert!(PoolWeights::<f64>::custom(vec![0.5, 0.6]).is_err());
        assert!(PoolWeights::<f64>::custom(vec![0.5, 0.5]).is_ok());
        // negative entries are allowed as long as the sum is one
        assert!(PoolWeights::<f64>::custom(vec![1.5, -0.5]).is_ok());
    }
}
