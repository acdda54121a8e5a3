//! Cox construction with unit intensity: `τ = Θ` for an independent
//! `Θ ~ Exp(1)`, so `A°_t = 1 - e^{-t}` and `A°_τ = 1 - e^{-Θ}` should be
//! uniform on `[0, 1]`.

use rand::Rng;
use rand_distr::Exp1;

use super::{ks_uniform, simulate, Expectation, McReport};
use crate::error::{Error, Result};

/// Asymptotic 1% critical value of `√n · D_n`.
pub const KS_COEFFICIENT_1PCT: f64 = 1.63;

/// Below this sample size the asymptotic threshold is flagged as loose.
const KS_ASYMPTOTIC_FROM: u64 = 35;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoxParams {
    pub n_paths: u64,
    pub seed: u64,
}

fn ks_report(estimator: &str, samples: &[f64], seed: u64, expectation: Expectation) -> McReport {
    let n = samples.len() as u64;
    let d = ks_uniform(samples);
    let threshold = KS_COEFFICIENT_1PCT / (n as f64).sqrt();
    let passed = match expectation {
        Expectation::AcceptUniform => d < threshold,
        Expectation::RejectUniform => d >= threshold,
        Expectation::WithinTolerance => unreachable!("KS reports compare against a threshold"),
    };
    McReport {
        estimator: estimator.to_string(),
        n_paths: n,
        estimate: super::compensated_sum(samples.iter().copied()) / n as f64,
        stderr: (1.0 / 12.0 / n as f64).sqrt(),
        target: Some(0.5),
        ks_statistic: Some(d),
        ks_threshold: Some(threshold),
        seed,
        dt: None,
        expectation,
        passed,
        wide_tolerance: n < KS_ASYMPTOTIC_FROM,
        degenerate: false,
        extra: Default::default(),
    }
}

/// KS test of `1 - e^{-Θ}` against Uniform[0, 1], together with the
/// adversarial branch `1 - e^{-Θ²}` that must be rejected.
pub fn cox_uniformity(params: &CoxParams) -> Result<Vec<McReport>> {
    if params.n_paths < 10 {
        return Err(Error::InvalidParameter(format!(
            "n_paths must be at least 10, got {}",
            params.n_paths
        )));
    }
    let thetas = simulate(params.n_paths, params.seed, |rng| rng.sample::<f64, _>(Exp1));
    let barrier: Vec<f64> = thetas.iter().map(|t| -(-t).exp_m1()).collect();
    let adversarial: Vec<f64> = thetas.iter().map(|t| -(-t * t).exp_m1()).collect();
    Ok(vec![
        ks_report("cox: A°_tau ~ Uniform[0,1]", &barrier, params.seed, Expectation::AcceptUniform),
        ks_report(
            "cox adversarial: 1 - exp(-theta^2) rejected",
            &adversarial,
            params.seed,
            Expectation::RejectUniform,
        ),
    ])
}
