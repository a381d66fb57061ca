//! The limiting bulk law of the pooled sample covariance: a free
//! multiplicative convolution of two Marchenko-Pastur factors scaled by
//! `kappa`. Its Stieltjes transform `m(z)` solves the cubic
//!
//! ```text
//! delta gamma kappa z^2 m^3 - kappa z (delta + gamma - 2 delta gamma) m^2
//!     - (z + kappa (delta - 1)(1 - gamma)) m - 1 = 0
//! ```
//!
//! and the density is `rho(x) = Im m(x + i eta) / pi` as `eta -> 0`. The
//! analytic branch is pinned by a homotopy from high in the upper half-plane,
//! where the physical root is the one near `-1/z`; tracking the nearest root
//! while descending to the target makes the selection deterministic.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::scalar::Scalar;
use crate::Result;

/// Residual bound accepted for a solved Stieltjes value, relative to
/// `max(1, |z|^3)`.
pub const CUBIC_RESIDUAL_TOL: f64 = 1e-10;
/// Default spectral resolution used by [`BulkParams::density`] helpers.
pub const DEFAULT_GRID_POINTS: usize = 2048;
/// `q = delta * gamma` below which the trigonometric edge roots are repaired
/// by deflation (the closed form loses the two finite roots to cancellation
/// as the leading cubic coefficient vanishes).
const EDGE_DEFLATION_Q: f64 = 1e-4;

/// Parameters of the bulk law. `delta = 0` is the Marchenko-Pastur
/// degeneration (infinite vocabulary), handled by the quadratic branch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BulkParams<S> {
    pub delta: S,
    pub gamma: S,
    pub kappa: S,
}

/// One Stieltjes-transform evaluation.
#[derive(Clone, Copy, Debug)]
pub struct StieltjesValue<S> {
    pub z: Complex<S>,
    pub m: Complex<S>,
    /// `-(1 - gamma)/z + gamma m`, the transform of the Gram-side spectrum.
    pub m_companion: Complex<S>,
    /// `dm/dz` by implicit differentiation; absent at branch points.
    pub m_prime: Option<Complex<S>>,
    pub branch_ok: bool,
}

/// Sampled density with its support data.
#[derive(Clone, Debug)]
pub struct BulkLaw<S> {
    pub params: BulkParams<S>,
    pub grid: Vec<S>,
    pub density: Vec<S>,
    pub edge_right: S,
    pub edge_roots: [S; 3],
    /// Grid indices where the evaluation failed; density is zero there.
    pub invalid: Vec<usize>,
}

/// Right edge and the three candidate roots (in units of `z / kappa`).
#[derive(Clone, Copy, Debug)]
pub struct EdgeInfo<S> {
    pub edge_right: S,
    pub roots: [S; 3],
}

/// The double root of the cubic at the right edge and the companion value
/// there; `beta_crit = -1 / m_companion_edge`.
#[derive(Clone, Copy, Debug)]
pub struct EdgeStieltjes<S> {
    pub m_edge: S,
    pub m_companion_edge: S,
}

impl<S: Scalar> BulkParams<S> {
    pub fn new(delta: S, gamma: S, kappa: S) -> Result<Self> {
        if delta < S::zero() || !(gamma > S::zero()) || !(kappa > S::zero()) {
            return Err(CoreError::invalid(
                "bulk parameters require delta >= 0, gamma > 0, kappa > 0",
            ));
        }
        Ok(Self {
            delta,
            gamma,
            kappa,
        })
    }

    /// Coefficients `[c3, c2, c1, c0]` of the defining cubic in `m` at `z`.
    pub fn cubic_coeffs(&self, z: Complex<S>) -> [Complex<S>; 4] {
        let (d, g, k) = (self.delta, self.gamma, self.kappa);
        let c3 = z * z * (d * g * k);
        let c2 = z * (-(k * (d + g - S::of(2.0) * d * g)));
        let c1 = -(z + Complex::from(k * (d - S::one()) * (S::one() - g)));
        let c0 = Complex::from(-S::one());
        [c3, c2, c1, c0]
    }

    /// Cubic value at `(m, z)` by Horner evaluation.
    pub fn cubic_value(&self, m: Complex<S>, z: Complex<S>) -> Complex<S> {
        let c = self.cubic_coeffs(z);
        ((c[0] * m + c[1]) * m + c[2]) * m + c[3]
    }

    /// `dF/dm` at `(m, z)`.
    pub fn cubic_dm(&self, m: Complex<S>, z: Complex<S>) -> Complex<S> {
        let c = self.cubic_coeffs(z);
        (c[0] * m * S::of(3.0) + c[1] * S::of(2.0)) * m + c[2]
    }

    /// `dF/dz` at `(m, z)`:
    /// `2 delta gamma kappa z m^3 - kappa (delta + gamma - 2 delta gamma) m^2 - m`.
    pub fn cubic_dz(&self, m: Complex<S>, z: Complex<S>) -> Complex<S> {
        let (d, g, k) = (self.delta, self.gamma, self.kappa);
        z * m * m * m * (S::of(2.0) * d * g * k) - m * m * (k * (d + g - S::of(2.0) * d * g)) - m
    }

    /// All roots of the cubic in `m` at `z` (two when `delta = 0`).
    pub fn roots_at(&self, z: Complex<S>) -> Vec<Complex<S>> {
        let c = self.cubic_coeffs(z);
        let mut roots = poly_roots(c);
        for r in roots.iter_mut() {
            *r = polish(&c, *r, 4);
        }
        roots
    }

    fn companion(&self, z: Complex<S>, m: Complex<S>) -> Complex<S> {
        -Complex::from(S::one() - self.gamma) / z + m * self.gamma
    }

    /// Evaluates the analytic Stieltjes branch at `z`, which must lie in the
    /// open upper half-plane or on the real axis outside the support.
    pub fn stieltjes(&self, z: Complex<S>) -> Result<StieltjesValue<S>> {
        if z.norm() == S::zero() {
            return Err(CoreError::invalid("stieltjes transform undefined at z = 0"));
        }
        if z.im < S::zero() {
            return Err(CoreError::invalid(
                "evaluation point must have Im z >= 0 (lower half-plane values follow by conjugation)",
            ));
        }
        let edge = self.edge()?;
        if z.im == S::zero() {
            let x = z.re;
            let left = self.edge_left()?;
            let guard = S::tol(1e-12) * S::one().max(edge.edge_right);
            if x > left + guard && x < edge.edge_right - guard {
                return Err(CoreError::invalid(format!(
                    "real evaluation point {} lies inside the support [{}, {}]",
                    x.as_f64(),
                    left.as_f64(),
                    edge.edge_right.as_f64()
                )));
            }
        }
        let m = self.track_branch(z, edge.edge_right)?;
        let residual = self.cubic_value(m, z).norm();
        let z3 = z.norm() * z.norm() * z.norm();
        let bound = S::tol(CUBIC_RESIDUAL_TOL) * S::one().max(z3) * S::one().max(self.kappa);
        let herglotz_ok = z.im <= S::zero() || m.im > S::zero();
        if residual > bound || !herglotz_ok {
            let roots = self.roots_at(z);
            return Err(CoreError::BranchAmbiguous {
                z_re: z.re.as_f64(),
                z_im: z.im.as_f64(),
                roots: roots
                    .iter()
                    .map(|r| (r.re.as_f64(), r.im.as_f64()))
                    .collect(),
            });
        }
        let dm = self.cubic_dm(m, z);
        let m_prime = if dm.norm() <= S::tol(1e-12) * S::one().max(self.kappa) {
            None
        } else {
            Some(-self.cubic_dz(m, z) / dm)
        };
        Ok(StieltjesValue {
            z,
            m,
            m_companion: self.companion(z, m),
            m_prime,
            branch_ok: true,
        })
    }

    /// Homotopy in the imaginary direction: start at `z + i h0` where the
    /// physical root is the one nearest `-1/z`, then shrink the added height,
    /// following the nearest root at every step.
    fn track_branch(&self, z: Complex<S>, edge_right: S) -> Result<Complex<S>> {
        let scale = S::one().max(z.norm()).max(edge_right);
        let floor = S::tol(1e-13) * S::one().max(z.norm());
        let mut h = S::of(10.0) * scale;
        let z0 = Complex::new(z.re, z.im + h);
        let mut m = nearest(&self.roots_at(z0), -Complex::from(S::one()) / z0);
        while h > floor {
            h = h / S::of(1.7);
            let zz = Complex::new(z.re, z.im + h);
            m = nearest(&self.roots_at(zz), m);
        }
        let mut m = nearest(&self.roots_at(z), m);
        // final polish against the target-point cubic
        m = polish(&self.cubic_coeffs(z), m, 6);
        if z.im == S::zero() {
            // boundary value on the real axis outside the support is real
            if m.im.abs() > S::tol(1e-7) * S::one().max(m.norm()) {
                return Err(CoreError::internal(format!(
                    "expected a real Stieltjes value at real z = {}, got imaginary part {}",
                    z.re.as_f64(),
                    m.im.as_f64()
                )));
            }
            m = Complex::from(m.re);
            m = polish(&self.cubic_coeffs(z), m, 4);
            m = Complex::from(m.re);
        }
        Ok(m)
    }

    /// Density sampled on `grid` with smoothing `eta`: per-point failures are
    /// recorded, not fatal.
    pub fn density(&self, grid: &[S], eta: S) -> Result<BulkLaw<S>> {
        if !(eta > S::zero()) {
            return Err(CoreError::invalid("eta must be positive"));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CoreError::invalid("grid must be strictly ascending"));
        }
        let edge = self.edge()?;
        let mut density = Vec::with_capacity(grid.len());
        let mut invalid = Vec::new();
        for (i, &x) in grid.iter().enumerate() {
            match self.stieltjes(Complex::new(x, eta)) {
                Ok(v) => density.push((v.m.im / S::PI()).max(S::zero())),
                Err(_) => {
                    invalid.push(i);
                    density.push(S::zero());
                }
            }
        }
        Ok(BulkLaw {
            params: *self,
            grid: grid.to_vec(),
            density,
            edge_right: edge.edge_right,
            edge_roots: edge.roots,
            invalid,
        })
    }

    /// Default smoothing: `1e-6 * max(1, lambda_plus)`.
    pub fn default_eta(&self) -> Result<S> {
        Ok(S::tol(1e-6) * S::one().max(self.edge()?.edge_right))
    }

    /// 2048 uniform points on `[0, 1.15 lambda_plus]`, excluding 0.
    pub fn default_grid(&self) -> Result<Vec<S>> {
        let hi = S::of(1.15) * self.edge()?.edge_right;
        let n = DEFAULT_GRID_POINTS;
        Ok((1..=n)
            .map(|i| hi * S::of_usize(i) / S::of_usize(n))
            .collect())
    }

    /// Right support edge by the trigonometric closed form: with
    /// `q = delta gamma`, `r0 = delta + gamma + delta gamma`,
    /// `Delta_0 = r0 (r0^3 + 216 q^2)`,
    /// `Delta_1 = 2 (r0^6 - 540 q^2 r0^3 - 5832 q^4)`,
    /// `phi = arccos(Delta_1 / (2 Delta_0^{3/2}))`,
    /// the candidates are
    /// `x_k = -(r0^2 - 12 q r0 + 12 q^2 - 12 q + 2 sqrt(Delta_0) cos((phi + 2 pi k)/3)) / (12 q)`
    /// and `lambda_plus = kappa max_k x_k`.
    pub fn edge(&self) -> Result<EdgeInfo<S>> {
        let (d, g, k) = (self.delta, self.gamma, self.kappa);
        if d == S::zero() {
            // Marchenko-Pastur edge; the hard-edge candidate stands in for the
            // root that escapes to infinity as delta -> 0.
            let sg = g.sqrt();
            let hi = (S::one() + sg) * (S::one() + sg);
            let lo = (S::one() - sg) * (S::one() - sg);
            return Ok(EdgeInfo {
                edge_right: k * hi,
                roots: [hi, lo, S::zero()],
            });
        }
        let q = d * g;
        let r0 = d + g + q;
        let delta0 = r0 * (r0 * r0 * r0 + S::of(216.0) * q * q);
        let delta1 = S::of(2.0)
            * (r0.powi(6) - S::of(540.0) * q * q * r0.powi(3) - S::of(5832.0) * q.powi(4));
        let denom = S::of(2.0) * delta0.powf(S::of(1.5));
        let mut arg = delta1 / denom;
        if arg.abs() > S::one() + S::tol(1e-9) {
            return Err(CoreError::internal(format!(
                "edge formula arccos argument {} outside [-1, 1]; parameters (delta, gamma, kappa) = ({}, {}, {})",
                arg.as_f64(),
                d.as_f64(),
                g.as_f64(),
                k.as_f64()
            )));
        }
        arg = arg.min(S::one()).max(-S::one());
        let phi = arg.acos();
        let b = r0 * r0 - S::of(12.0) * q * r0 + S::of(12.0) * q * q - S::of(12.0) * q;
        let two_sqrt_d0 = S::of(2.0) * delta0.sqrt();
        let mut roots = [S::zero(); 3];
        for (kk, r) in roots.iter_mut().enumerate() {
            let angle = (phi + S::of(2.0) * S::PI() * S::of_usize(kk)) / S::of(3.0);
            *r = -(b + two_sqrt_d0 * angle.cos()) / (S::of(12.0) * q);
        }
        let coeffs = self.edge_poly_scaled();
        if q < S::tol(EDGE_DEFLATION_Q) {
            // cancellation repair: the extreme root is well conditioned, the
            // two finite ones are recovered from the deflated quadratic
            let mut hi = 0usize;
            for i in 1..3 {
                if roots[i].abs() > roots[hi].abs() {
                    hi = i;
                }
            }
            let s = newton_real(&coeffs, roots[hi], 12);
            // backward synthetic division: stable because |s| is large
            let a2 = coeffs[0];
            let c2 = -coeffs[3] / s;
            let b2 = (c2 - coeffs[2]) / s;
            let (r1, r2) = quad_roots_real(a2, b2, c2)?;
            roots = [s, r1, r2];
        } else {
            for r in roots.iter_mut() {
                *r = newton_real(&coeffs, *r, 4);
            }
        }
        let mut x_max = roots[0];
        for &r in &roots[1..] {
            if r > x_max {
                x_max = r;
            }
        }
        Ok(EdgeInfo {
            edge_right: k * x_max,
            roots,
        })
    }

    /// Coefficients of `r(x)`: the discriminant cubic in `x = z / kappa`.
    fn edge_poly_scaled(&self) -> [S; 4] {
        let (d, g) = (self.delta, self.gamma);
        let b = d * d * g * g - S::of(10.0) * d * d * g + d * d
            - S::of(10.0) * d * g * g
            - S::of(10.0) * d * g
            + g * g;
        let c = -S::of(2.0)
            * (d.powi(3) * g * g - S::of(4.0) * d.powi(3) * g
                + d.powi(3)
                + d * d * g.powi(3)
                + S::of(2.0) * d * d * g * g
                + S::of(2.0) * d * d * g
                + d * d
                - S::of(4.0) * d * g.powi(3)
                + S::of(2.0) * d * g * g
                - S::of(4.0) * d * g
                + g.powi(3)
                + g * g);
        let e = (d - S::one()).powi(2) * (g - S::one()).powi(2) * (d - g).powi(2);
        [S::of(4.0) * d * g, b, c, e]
    }

    /// Left support edge: the largest discriminant root strictly inside
    /// `(0, x_max)` when both ratios are below one, else the hard edge at 0.
    pub fn edge_left(&self) -> Result<S> {
        if self.delta >= S::one() || self.gamma >= S::one() {
            return Ok(S::zero());
        }
        if self.delta == S::zero() {
            let sg = self.gamma.sqrt();
            return Ok(self.kappa * (S::one() - sg) * (S::one() - sg));
        }
        let info = self.edge()?;
        let x_max = info.edge_right / self.kappa;
        let mut best = S::zero();
        for &r in &info.roots {
            if r > S::tol(1e-14) && r < x_max * (S::one() - S::tol(1e-12)) && r > best {
                best = r;
            }
        }
        Ok(self.kappa * best)
    }

    /// Solves for the repeated root of the cubic at `z = lambda_plus`
    /// (simultaneously `F = 0` and `dF/dm = 0`) and the companion value there.
    pub fn edge_stieltjes(&self) -> Result<EdgeStieltjes<S>> {
        let edge = self.edge()?;
        let lp = edge.edge_right;
        if self.delta == S::zero() {
            // scaled MP closed form at the edge
            let g = self.gamma;
            let sg = g.sqrt();
            let m_edge = -S::one() / (self.kappa * sg * (S::one() + sg));
            return Ok(EdgeStieltjes {
                m_edge,
                m_companion_edge: -(S::one() - g) / lp + g * m_edge,
            });
        }
        // The double root solves F = 0 and dF/dm = 0 jointly. The critical
        // points of the cubic come from the dF/dm quadratic, which stays well
        // conditioned as delta -> 0 (unlike the cubic's own root pattern), so
        // the double root is the critical point with vanishing F.
        let z = Complex::from(lp);
        let c = self.cubic_coeffs(z);
        let (q1, q2) = quad_roots_complex(c[0] * S::of(3.0), c[1] * S::of(2.0), c[2]);
        let pick = |m: Complex<S>| self.cubic_value(m, z).norm();
        let m_edge_c = if pick(q1) <= pick(q2) { q1 } else { q2 };
        if m_edge_c.im.abs() > S::tol(1e-6) * S::one().max(m_edge_c.norm()) {
            return Err(CoreError::internal(format!(
                "no near-double root at the computed edge {}: critical points are complex ({}, {})",
                lp.as_f64(),
                m_edge_c.re.as_f64(),
                m_edge_c.im.as_f64()
            )));
        }
        let m_edge = m_edge_c.re;
        let scale = S::one().max(lp.powi(3)) * S::one().max(self.kappa);
        let f = self.cubic_value(Complex::from(m_edge), z).norm();
        let fm = self.cubic_dm(Complex::from(m_edge), z).norm();
        if f > S::tol(1e-8) * scale || fm > S::tol(1e-8) * scale {
            return Err(CoreError::internal(format!(
                "no near-double root at the computed edge {}: residuals |F| = {}, |dF/dm| = {} signal edge/parameter inconsistency",
                lp.as_f64(),
                f.as_f64(),
                fm.as_f64()
            )));
        }
        Ok(EdgeStieltjes {
            m_edge,
            m_companion_edge: -(S::one() - self.gamma) / lp + self.gamma * m_edge,
        })
    }

    /// `beta_crit = -1 / m_companion(lambda_plus)`: the population spike size
    /// above which the sample covariance detaches an outlier.
    pub fn beta_crit(&self) -> Result<S> {
        let e = self.edge_stieltjes()?;
        if e.m_companion_edge >= S::zero() {
            return Err(CoreError::internal(
                "companion transform at the edge must be negative",
            ));
        }
        Ok(-S::one() / e.m_companion_edge)
    }
}

/// Nearest element of `roots` to `target`.
fn nearest<S: Scalar>(roots: &[Complex<S>], target: Complex<S>) -> Complex<S> {
    let mut best = roots[0];
    let mut dist = (roots[0] - target).norm();
    for &r in &roots[1..] {
        let d = (r - target).norm();
        if d < dist {
            dist = d;
            best = r;
        }
    }
    best
}

/// Newton polish of a polynomial root; keeps the iterate only while the
/// residual improves.
fn polish<S: Scalar>(c: &[Complex<S>; 4], mut m: Complex<S>, iters: usize) -> Complex<S> {
    let eval = |m: Complex<S>| ((c[0] * m + c[1]) * m + c[2]) * m + c[3];
    let deriv = |m: Complex<S>| (c[0] * m * S::of(3.0) + c[1] * S::of(2.0)) * m + c[2];
    let mut best = m;
    let mut best_res = eval(m).norm();
    for _ in 0..iters {
        let d = deriv(m);
        if d.norm() == S::zero() {
            break;
        }
        m = m - eval(m) / d;
        let res = eval(m).norm();
        if res < best_res {
            best_res = res;
            best = m;
        }
    }
    best
}

/// Roots of `c[0] m^3 + c[1] m^2 + c[2] m + c[3] = 0`; degenerates to the
/// quadratic (or linear) problem when leading coefficients vanish.
pub fn poly_roots<S: Scalar>(c: [Complex<S>; 4]) -> Vec<Complex<S>> {
    let scale = c.iter().fold(S::zero(), |a, x| a.max(x.norm()));
    if scale == S::zero() {
        return vec![];
    }
    let negligible = |x: Complex<S>| x.norm() <= scale * S::epsilon() * S::of(8.0);
    if negligible(c[0]) {
        if negligible(c[1]) {
            if negligible(c[2]) {
                return vec![];
            }
            return vec![-c[3] / c[2]];
        }
        let (r1, r2) = quad_roots_complex(c[1], c[2], c[3]);
        return vec![r1, r2];
    }
    // Strong scale separation (one root near -c2/c3 far beyond the others)
    // wrecks the depressed-cubic route by cancellation; peel the large root
    // off by Newton and deflate backward, which is stable for large |root|.
    if !negligible(c[1]) {
        let huge = c[1].norm() / c[0].norm();
        let moderate = (c[2].norm() / c[1].norm()).max((c[3].norm() / c[1].norm()).sqrt());
        if huge > S::of(1e6) * moderate.max(S::tol(1e-300)) {
            let mut r = -c[1] / c[0];
            for _ in 0..8 {
                let f = ((c[0] * r + c[1]) * r + c[2]) * r + c[3];
                let df = (c[0] * r * S::of(3.0) + c[1] * S::of(2.0)) * r + c[2];
                if df.norm() == S::zero() {
                    break;
                }
                r = r - f / df;
            }
            let cc = -c[3] / r;
            let bb = (cc - c[2]) / r;
            let (r1, r2) = quad_roots_complex(c[0], bb, cc);
            return vec![r, r1, r2];
        }
    }
    // depressed cubic t^3 + p t + q with m = t - c1/(3 c0)
    let a = c[1] / c[0];
    let b = c[2] / c[0];
    let d = c[3] / c[0];
    let third = S::one() / S::of(3.0);
    let shift = a * third;
    let p = b - a * a * third;
    let q = a * a * a * (S::of(2.0) / S::of(27.0)) - a * b * third + d;
    let disc = (q * q * S::of(0.25)) + (p * p * p / S::of(27.0));
    let s = disc.sqrt();
    // pick the better-conditioned cube-root argument
    let u3a = -q * S::of(0.5) + s;
    let u3b = -q * S::of(0.5) - s;
    let u3 = if u3a.norm() >= u3b.norm() { u3a } else { u3b };
    if u3.norm() == S::zero() {
        return vec![-shift, -shift, -shift];
    }
    let u = u3.cbrt();
    let omega = Complex::new(-S::of(0.5), S::of(3.0).sqrt() * S::of(0.5));
    let mut out = Vec::with_capacity(3);
    let mut uk = u;
    for _ in 0..3 {
        let t = uk - p / (uk * S::of(3.0));
        out.push(t - shift);
        uk = uk * omega;
    }
    out
}

/// Numerically stable quadratic roots (complex coefficients).
fn quad_roots_complex<S: Scalar>(
    a: Complex<S>,
    b: Complex<S>,
    c: Complex<S>,
) -> (Complex<S>, Complex<S>) {
    let disc = (b * b - a * c * S::of(4.0)).sqrt();
    // choose the sign that avoids cancellation in b +/- disc
    let q = if (b + disc).norm() >= (b - disc).norm() {
        -(b + disc) * S::of(0.5)
    } else {
        -(b - disc) * S::of(0.5)
    };
    (q / a, c / q)
}

/// Stable real quadratic roots; errors on a negative discriminant.
fn quad_roots_real<S: Scalar>(a: S, b: S, c: S) -> Result<(S, S)> {
    let disc = b * b - S::of(4.0) * a * c;
    if disc < S::zero() {
        return Err(CoreError::internal(format!(
            "negative discriminant {} in real quadratic",
            disc.as_f64()
        )));
    }
    let sq = disc.sqrt();
    let q = if b >= S::zero() {
        -(b + sq) * S::of(0.5)
    } else {
        -(b - sq) * S::of(0.5)
    };
    if q == S::zero() {
        return Ok((S::zero(), S::zero()));
    }
    Ok((q / a, c / q))
}

/// Newton iteration on a real cubic given as `[c3, c2, c1, c0]`.
fn newton_real<S: Scalar>(c: &[S; 4], mut x: S, iters: usize) -> S {
    let eval = |x: S| ((c[0] * x + c[1]) * x + c[2]) * x + c[3];
    let deriv = |x: S| (S::of(3.0) * c[0] * x + S::of(2.0) * c[1]) * x + c[2];
    let mut best = x;
    let mut best_res = eval(x).abs();
    for _ in 0..iters {
        let d = deriv(x);
        if d == S::zero() {
            break;
        }
        x = x - eval(x) / d;
        let r = eval(x).abs();
        if r < best_res {
            best_res = r;
            best = x;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn mp_stieltjes_real(gamma: f64, z: f64) -> f64 {
        // explicit MP formula on the real axis right of the support, with the
        // branch that makes m negative
        let t = z + gamma - 1.0;
        (-t + (t * t - 4.0 * gamma * z).sqrt()) / (2.0 * gamma * z)
    }

    #[test]
    fn mp_degeneration_real_axis() {
        let p = BulkParams::new(0.0, 0.5, 1.0).unwrap();
        let v = p.stieltjes(C::new(4.0, 0.0)).unwrap();
        let want = mp_stieltjes_real(0.5, 4.0);
        assert!(close(v.m.re, want, 1e-12), "{} vs {want}", v.m.re);
        assert!(v.m.re < 0.0);
        assert_eq!(v.m.im, 0.0);
    }

    #[test]
    fn herglotz_inside_support() {
        let p = BulkParams::new(0.625, 0.5, 0.218_289_682_539_682_55).unwrap();
        let edge = p.edge().unwrap();
        for i in 1..=20 {
            let x = edge.edge_right * (i as f64) / 21.0;
            let v = p.stieltjes(C::new(x, 1e-6)).unwrap();
            assert!(v.m.im > 0.0, "Im m should be positive at x = {x}");
        }
    }

    #[test]
    fn companion_identity() {
        let p = BulkParams::new(0.8, 1.3, 0.7).unwrap();
        let v = p.stieltjes(C::new(1.1, 0.35)).unwrap();
        let expect = -C::new(1.0 - 1.3, 0.0) / v.z + v.m * 1.3;
        assert!((v.m_companion - expect).norm() < 1e-14);
    }

    #[test]
    fn residual_bound_holds() {
        let p = BulkParams::new(1.7, 0.4, 2.2).unwrap();
        for (re, im) in [(0.3, 0.8), (2.5, 0.01), (9.0, 1e-5), (0.05, 2.0)] {
            let v = p.stieltjes(C::new(re, im)).unwrap();
            let res = p.cubic_value(v.m, v.z).norm();
            assert!(res < 1e-10 * f64::max(1.0, v.z.norm().powi(3)));
        }
    }

    #[test]
    fn real_axis_right_of_edge_is_negative() {
        let p = BulkParams::new(0.625, 0.5, 0.1).unwrap();
        let lp = p.edge().unwrap().edge_right;
        for f in [1.001, 1.01, 1.2, 2.0, 10.0] {
            let v = p.stieltjes(C::new(lp * f, 0.0)).unwrap();
            assert!(v.m.re < 0.0);
            assert_eq!(v.m.im, 0.0);
        }
    }

    #[test]
    fn inside_support_real_axis_errors() {
        let p = BulkParams::new(0.625, 0.5, 0.1).unwrap();
        let lp = p.edge().unwrap().edge_right;
        assert!(p.stieltjes(C::new(lp * 0.5, 0.0)).is_err());
    }

    #[test]
    fn edge_kappa_scaling_exact() {
        let a = BulkParams::new(0.7, 1.9, 0.35).unwrap().edge().unwrap();
        let b = BulkParams::new(0.7, 1.9, 0.70).unwrap().edge().unwrap();
        assert!(close(
            2.0 * a.edge_right,
            b.edge_right,
            1e-15 * b.edge_right
        ));
    }

    #[test]
    fn edge_symmetric_in_delta_gamma() {
        let a = BulkParams::new(0.3, 1.4, 1.0).unwrap().edge().unwrap();
        let b = BulkParams::new(1.4, 0.3, 1.0).unwrap().edge().unwrap();
        assert!(close(a.edge_right, b.edge_right, 1e-13));
    }

    #[test]
    fn edge_mp_limit_small_delta() {
        let p = BulkParams::new(1e-10, 0.5, 1.0).unwrap();
        let e = p.edge().unwrap();
        let want = (1.0 + 0.5f64.sqrt()).powi(2);
        assert!(
            close(e.edge_right, want, 1e-5 * want),
            "{} vs {want}",
            e.edge_right
        );
    }

    #[test]
    fn edge_fig2_causal_value() {
        // frozen from an independent Newton solve of the discriminant cubic
        let p = BulkParams::new(0.625, 0.5, 0.218_289_682_539_682_55).unwrap();
        let e = p.edge().unwrap();
        assert!(close(e.edge_right, 1.028_306_7, 2e-6));
    }

    #[test]
    fn edge_stieltjes_defining_equations() {
        for (d, g, k) in [
            (0.625, 0.5, 0.1),
            (1.3, 0.8, 0.6),
            (2.5, 2.5, 1.0),
            (0.08, 3.0, 2.0),
        ] {
            let p = BulkParams::new(d, g, k).unwrap();
            let lp = p.edge().unwrap().edge_right;
            let es = p.edge_stieltjes().unwrap();
            let m = C::new(es.m_edge, 0.0);
            let z = C::new(lp, 0.0);
            assert!(p.cubic_value(m, z).norm() < 1e-8);
            assert!(p.cubic_dm(m, z).norm() < 1e-8);
        }
    }

    #[test]
    fn beta_crit_mp_limit() {
        let p = BulkParams::new(1e-10, 0.5, 1.0).unwrap();
        let bc = p.beta_crit().unwrap();
        assert!(close(bc, 1.0 + 0.5f64.sqrt(), 1e-4), "{bc}");
        // exact delta = 0 branch
        let p0 = BulkParams::new(0.0, 0.5, 1.0).unwrap();
        let bc0 = p0.beta_crit().unwrap();
        assert!(close(bc0, 1.707_106_781_186_547_5, 1e-12), "{bc0}");
    }

    #[test]
    fn edge_stieltjes_continuity_probe() {
        let a = BulkParams::<f64>::new(0.1, 0.5, 1.0)
            .unwrap()
            .edge_stieltjes()
            .unwrap();
        let b = BulkParams::new(0.1001, 0.5, 1.0)
            .unwrap()
            .edge_stieltjes()
            .unwrap();
        assert!((a.m_edge - b.m_edge).abs() < 1e-2);
    }

    #[test]
    fn density_mp_degeneration_pointwise() {
        // near-MP parameters against the closed-form MP density
        let p = BulkParams::new(1e-8, 0.25, 1.0).unwrap();
        let lo = (1.0 - 0.5f64).powi(2);
        let hi = (1.0 + 0.5f64).powi(2);
        let grid: Vec<f64> = (0..200)
            .map(|i| lo + (hi - lo) * (i as f64) / 199.0)
            .collect();
        let law = p.density(&grid, 1e-7).unwrap();
        for (&x, &rho) in grid.iter().zip(&law.density) {
            let mp =
                ((hi - x) * (x - lo)).max(0.0).sqrt() / (2.0 * std::f64::consts::PI * 0.25 * x);
            assert!((rho - mp).abs() < 1e-3, "x = {x}: {rho} vs {mp}");
        }
    }

    #[test]
    fn density_vanishes_outside_support() {
        let p = BulkParams::<f64>::new(0.625, 0.5, 0.1).unwrap();
        let lp = p.edge().unwrap().edge_right;
        let law = p.density(&[1.2 * lp], p.default_eta().unwrap()).unwrap();
        assert!(law.density[0] < 1e-4);
        // the 1.01 lambda_plus probe needs eta well below the edge distance,
        // since the default smoothing leaks O(eta / (x - lambda_plus)^2)
        let law = p.density(&[1.01 * lp], 1e-9).unwrap();
        assert!(law.density[0] < 1e-6, "density = {}", law.density[0]);
    }

    #[test]
    fn density_integrates_to_one_when_full_rank() {
        let p = BulkParams::new(0.625, 0.5, 0.218_289_682_539_682_55).unwrap();
        let grid = p.default_grid().unwrap();
        let law = p.density(&grid, p.default_eta().unwrap()).unwrap();
        let mut integral = 0.0;
        for i in 1..grid.len() {
            integral += 0.5 * (law.density[i] + law.density[i - 1]) * (grid[i] - grid[i - 1]);
        }
        assert!(integral > 0.99 && integral < 1.01, "integral = {integral}");
        assert!(law.invalid.is_empty());
    }

    #[test]
    fn density_mass_deficit_when_rank_deficient() {
        // delta > 1: V < d, the covariance has a zero block of mass 1 - 1/delta
        let p = BulkParams::new(2.0, 0.5, 1.0).unwrap();
        let grid = p.default_grid().unwrap();
        let law = p.density(&grid, p.default_eta().unwrap()).unwrap();
        let mut integral = 0.0;
        for i in 1..grid.len() {
            integral += 0.5 * (law.density[i] + law.density[i - 1]) * (grid[i] - grid[i - 1]);
        }
        assert!(close(integral, 0.5, 0.02), "integral = {integral}");
    }

    #[test]
    fn edge_density_consistency() {
        let p = BulkParams::new(0.9, 0.7, 1.3).unwrap();
        let lp = p.edge().unwrap().edge_right;
        let eta = 1e-8;
        let inside = p.stieltjes(C::new(lp * (1.0 - 1e-3), eta)).unwrap();
        let outside = p.stieltjes(C::new(lp * (1.0 + 1e-3), eta)).unwrap();
        assert!(inside.m.im / std::f64::consts::PI > 0.0);
        assert!(outside.m.im / std::f64::consts::PI < 1e-4);
    }

    #[test]
    fn left_edge_positive_when_both_ratios_below_one() {
        let p = BulkParams::new(0.625, 0.5, 0.218_289_682_539_682_55).unwrap();
        let left = p.edge_left().unwrap();
        assert!(left > 0.0);
        // density positive just right of the left edge, tiny just left of it
        let vin = p.stieltjes(C::new(left * 1.05, 1e-8)).unwrap();
        let vout = p.stieltjes(C::new(left * 0.7, 1e-8)).unwrap();
        assert!(vin.m.im > 1e-3);
        assert!(vout.m.im < 1e-4);
        let p = BulkParams::new(2.0, 0.5, 1.0).unwrap();
        assert_eq!(p.edge_left().unwrap(), 0.0);
    }

    #[test]
    fn m_prime_matches_finite_difference() {
        let p = BulkParams::new(0.625, 0.5, 0.1).unwrap();
        let z = C::new(1.7, 0.2);
        let h = 1e-6;
        let v = p.stieltjes(z).unwrap();
        let vp = p.stieltjes(z + C::new(h, 0.0)).unwrap();
        let vm = p.stieltjes(z - C::new(h, 0.0)).unwrap();
        let fd = (vp.m - vm.m) / (2.0 * h);
        assert!((v.m_prime.unwrap() - fd).norm() < 1e-6);
    }

    #[test]
    fn f32_smoke() {
        let p = BulkParams::<f32>::new(0.625, 0.5, 0.1).unwrap();
        let e = p.edge().unwrap();
        assert!(e.edge_right > 0.0);
        let v = p
            .stieltjes(Complex::new(2.0f32 * e.edge_right, 0.0))
            .unwrap();
        assert!(v.m.re < 0.0);
    }
}
