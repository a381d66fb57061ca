//! Cross-module invariants exercised on randomized inputs with fixed seeds.

use attnspec_core::bulk::BulkParams;
use attnspec_core::matrix::SymMatrix;
use attnspec_core::model::{pool_scalars, CorrelationModel, PoolWeights};
use attnspec_core::spike;
use num_complex::Complex;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_simplex(rng: &mut ChaCha8Rng, t: usize) -> PoolWeights<f64> {
    // exponential spacings normalized to the simplex
    let mut v: Vec<f64> = (0..t).map(|_| -rng.gen::<f64>().ln()).collect();
    let s: f64 = v.iter().sum();
    for x in v.iter_mut() {
        *x /= s;
    }
    PoolWeights::custom(v).unwrap()
}

fn random_psd(rng: &mut ChaCha8Rng, t: usize) -> CorrelationModel<f64> {
    let g: Vec<Vec<f64>> = (0..t)
        .map(|_| {
            (0..t)
                .map(|_| rng.sample::<f64, _>(rand_distr_standard()))
                .collect()
        })
        .collect();
    let mut m = SymMatrix::zeros(t);
    for i in 0..t {
        for j in 0..t {
            let mut acc = 0.0;
            for row in &g {
                acc += row[i] * row[j];
            }
            m.set(i, j, acc / t as f64);
        }
    }
    CorrelationModel::custom(m).unwrap()
}

// Box-Muller over a uniform; avoids pulling rand_distr into dev-deps here.
fn rand_distr_standard() -> rand::distributions::Uniform<f64> {
    rand::distributions::Uniform::new(-1.0, 1.0)
}

#[test]
fn rayleigh_bound_over_thousand_simplex_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for r in [
        CorrelationModel::prefix(3, 10).unwrap(),
        CorrelationModel::spiked_uniform(10.0, 5, 12).unwrap(),
        random_psd(&mut rng, 8),
    ] {
        let lambda_max = r.matrix().eigen().values[0];
        for _ in 0..1000 {
            let w = random_simplex(&mut rng, r.t());
            let s = pool_scalars(&w, &r, 1.0).unwrap();
            assert!(
                s.snr <= lambda_max + 1e-9,
                "snr {} exceeded lambda_max {}",
                s.snr,
                lambda_max
            );
        }
        let w_opt = PoolWeights::optimal(&r).unwrap();
        let s = pool_scalars(&w_opt, &r, 1.0).unwrap();
        assert!((s.snr - lambda_max).abs() <= 1e-10 * lambda_max.max(1.0));
    }
}

#[test]
fn herglotz_on_random_upper_half_plane_probes() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let params = [
        BulkParams::new(0.625, 0.5, 0.1).unwrap(),
        BulkParams::new(1.8, 0.3, 1.0).unwrap(),
        BulkParams::new(0.2, 2.5, 0.7).unwrap(),
    ];
    for p in params {
        for _ in 0..100 {
            let re = rng.gen_range(-1.0..6.0);
            let im = 10f64.powf(rng.gen_range(-6.0..1.0));
            let v = p.stieltjes(Complex::new(re, im)).unwrap();
            assert!(v.m.im > 0.0, "Im m <= 0 at {re} + {im}i");
            assert!(v.branch_ok);
        }
    }
}

#[test]
fn companion_equation_ties_spike_to_bulk() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let delta: f64 = rng.gen_range(0.05..4.0);
        let gamma: f64 = rng.gen_range(0.05..4.0);
        let kappa: f64 = rng.gen_range(0.1..3.0);
        let p = BulkParams::new(delta, gamma, kappa).unwrap();
        let bc = p.beta_crit().unwrap();
        let beta = bc * rng.gen_range(1.2..4.0);
        let lam = spike::sample_spike(beta, delta, gamma, kappa)
            .unwrap()
            .unwrap();
        let v = p.stieltjes(Complex::new(lam, 0.0)).unwrap();
        assert!(
            (v.m_companion.re + 1.0 / beta).abs() < 1e-8,
            "companion equation violated at delta={delta}, gamma={gamma}, kappa={kappa}"
        );
        assert!(lam > p.edge().unwrap().edge_right);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weights_roundtrip_through_csv(t in 1usize..24, seed in 0u64..1u64 << 48) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_simplex(&mut rng, t);
        let mut buf = Vec::new();
        attnspec_core::io::write_weights(&mut buf, &w).unwrap();
        let back = attnspec_core::io::read_weights::<f64, _>(buf.as_slice()).unwrap();
        prop_assert_eq!(w.as_slice(), back.as_slice());
    }

    #[test]
    fn edge_symmetric_and_linear_in_kappa(
        delta in 0.05f64..4.0,
        gamma in 0.05f64..4.0,
        kappa in 0.05f64..3.0,
    ) {
        let a = BulkParams::new(delta, gamma, kappa).unwrap().edge().unwrap();
        let b = BulkParams::new(gamma, delta, kappa).unwrap().edge().unwrap();
        prop_assert!((a.edge_right - b.edge_right).abs() < 1e-11 * a.edge_right.max(1.0));
        let c = BulkParams::new(delta, gamma, 2.0 * kappa).unwrap().edge().unwrap();
        prop_assert!((c.edge_right - 2.0 * a.edge_right).abs() < 1e-12 * c.edge_right.max(1.0));
    }

    #[test]
    fn stieltjes_residual_everywhere(
        delta in 0.0f64..3.0,
        gamma in 0.05f64..3.0,
        kappa in 0.05f64..2.0,
        re in -2.0f64..8.0,
        log_im in -6.0f64..0.5,
    ) {
        let p = BulkParams::new(delta, gamma, kappa).unwrap();
        let z = Complex::new(re, 10f64.powf(log_im));
        let v = p.stieltjes(z).unwrap();
        let res = p.cubic_value(v.m, z).norm();
        prop_assert!(res < 1e-10 * z.norm().powi(3).max(1.0) * kappa.max(1.0));
        // companion identity to near machine precision
        let expect = -Complex::new(1.0 - gamma, 0.0) / z + v.m * gamma;
        prop_assert!((v.m_companion - expect).norm() < 1e-14 * v.m_companion.norm().max(1.0));
    }

    #[test]
    fn total_alignment_factorizes(
        delta in 0.1f64..2.0,
        gamma in 0.1f64..2.0,
        mu in 0.0f64..4.0,
    ) {
        let w = PoolWeights::<f64>::causal(8);
        let r = CorrelationModel::prefix(3, 8).unwrap();
        let rep = spike::spike_report(&w, &r, delta, gamma, mu).unwrap();
        prop_assert_eq!(rep.total_alignment, rep.sample_overlap * rep.pop_overlap);
        prop_assert!(rep.mu_samp >= rep.mu_pop);
        prop_assert!(rep.total_alignment >= 0.0 && rep.total_alignment <= 1.0);
    }
}
