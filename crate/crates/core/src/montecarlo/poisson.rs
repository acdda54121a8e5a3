//! Poisson process `N` with intensity `λ`, first two jump times `T1 < T2`,
//! and `τ = (T1 + T2) / 2`. With the compensated martingale
//! `M_s = 1{T2 <= s} - λ(s ∧ T2 - s ∧ T1)` one has `M_τ = -λ(T2 - T1)/2`,
//! whose mean is `-1/2` for every `λ`, so `τ` is not pseudo-stopping.
//!
//! The survival process on `T1 <= t < T2` is `Z̃_t = exp(-λ(t - T1))`; it is
//! compared with a nested estimate of `P(τ > t | T1, T2 > t)` that redraws
//! `T2 = t + Exp(λ)`.

use rand::Rng;
use rand_distr::{Distribution, Exp};

use super::{path_rng, simulate, McReport, Moments};
use crate::error::{Error, Result};

/// Pathwise identities are asserted up to this relative error.
const IDENTITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonParams {
    pub lambda: f64,
    pub n_paths: u64,
    pub seed: u64,
    /// Number of `(T1, t)` points drawn from simulated paths.
    pub sampled_points: usize,
    /// Redraws per point in the nested estimate.
    pub inner_paths: u64,
}

impl PoissonParams {
    pub fn new(lambda: f64, n_paths: u64, seed: u64) -> Self {
        PoissonParams {
            lambda,
            n_paths,
            seed,
            sampled_points: 4,
            inner_paths: n_paths,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::InvalidParameter(format!("lambda must be positive, got {}", self.lambda)));
        }
        if self.n_paths < 1 || self.inner_paths < 1 {
            return Err(Error::InvalidParameter("path counts must be at least 1".into()));
        }
        Ok(())
    }
}

/// The compensated first-jump martingale at time `s`.
fn martingale(lambda: f64, t1: f64, t2: f64, s: f64) -> f64 {
    let jump = if t2 <= s { 1.0 } else { 0.0 };
    jump - lambda * (s.min(t2) - s.min(t1))
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct PoissonPath {
    t1: f64,
    t2: f64,
    m_tau: f64,
    m_t2: f64,
    identity_holds: bool,
}

fn poisson_path(lambda: f64, exp: &Exp<f64>, rng: &mut impl Rng) -> PoissonPath {
    let t1 = exp.sample(rng);
    let t2 = t1 + exp.sample(rng);
    let tau = 0.5 * (t1 + t2);
    let m_tau = martingale(lambda, t1, t2, tau);
    let closed = -lambda * (t2 - t1) / 2.0;
    PoissonPath {
        t1,
        t2,
        m_tau,
        m_t2: martingale(lambda, t1, t2, t2),
        identity_holds: (m_tau - closed).abs() <= IDENTITY_TOLERANCE * (1.0 + closed.abs()),
    }
}

fn nested_survival(lambda: f64, t1: f64, t: f64, inner: u64, seed: u64) -> Moments {
    let exp = Exp::new(lambda).expect("positive rate");
    let hits = simulate(inner, seed, |rng| {
        let t2 = t + exp.sample(rng);
        if 0.5 * (t1 + t2) > t {
            1.0
        } else {
            0.0
        }
    });
    Moments::of(&hits)
}

/// Estimates `E[M_τ]` against `-1/2`, the stopping-time branch `E[M_{T2}]`
/// against 0, and the closed form of `Z̃` at the fixed point
/// `(T1, t) = (0.3, 0.8)` and at points drawn from simulated paths.
pub fn poisson_example(params: &PoissonParams) -> Result<Vec<McReport>> {
    params.validate()?;
    let PoissonParams { lambda, n_paths, seed, .. } = *params;
    let exp = Exp::new(lambda).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let paths = simulate(n_paths, seed, |rng| poisson_path(lambda, &exp, rng));
    let violations = paths.iter().filter(|p| !p.identity_holds).count();

    let mut main = McReport::mean(
        "poisson: E[M_tau]",
        &Moments::of(&paths.iter().map(|p| p.m_tau).collect::<Vec<_>>()),
        -0.5,
        seed,
        None,
    )
    .with("lambda", lambda)
    .with("identity_violations", violations as f64);
    main.passed &= violations == 0;
    let mut reports = vec![
        main,
        McReport::mean(
            "poisson sanity: E[M_T2]",
            &Moments::of(&paths.iter().map(|p| p.m_t2).collect::<Vec<_>>()),
            0.0,
            seed,
            None,
        )
        .with("lambda", lambda),
    ];

    let mut points = vec![(0.3, 0.8)];
    let mut pick = path_rng(seed, u64::MAX);
    for p in paths.iter().take(params.sampled_points) {
        let u: f64 = pick.gen();
        points.push((p.t1, p.t1 + u * (p.t2 - p.t1)));
    }
    for (k, (t1, t)) in points.into_iter().enumerate() {
        let inner_seed = seed.wrapping_add(1 + k as u64);
        let stats = nested_survival(lambda, t1, t, params.inner_paths, inner_seed);
        let closed = (-lambda * (t - t1)).exp();
        reports.push(
            McReport::mean(format!("poisson: Z~ closed form, point {k}"), &stats, closed, inner_seed, None)
                .with("t1", t1)
                .with("t", t)
                .with("lambda", lambda),
        );
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn martingale_formula() {
        assert_eq!(martingale(1.0, 1.0, 3.0, 2.0), -1.0);
        assert_eq!(martingale(2.0, 1.0, 3.0, 3.0), 1.0 - 4.0);
        assert_eq!(martingale(1.0, 1.0, 3.0, 0.5), 0.0);
    }

    #[test]
    fn identity_on_every_path() {
        let exp = Exp::new(1.7).unwrap();
        for i in 0..500 {
            let p = poisson_path(1.7, &exp, &mut path_rng(2, i));
            assert!(p.identity_holds);
            assert!(p.t1 < p.t2);
        }
    }

    #[test]
    fn rejects_bad_lambda() {
        assert!(poisson_example(&PoissonParams::new(0.0, 10, 0)).is_err());
        assert!(poisson_example(&PoissonParams::new(-1.0, 10, 0)).is_err());
    }

    #[test]
    fn small_run_hits_targets() {
        let r = poisson_example(&PoissonParams::new(2.0, 20_000, 4)).unwrap();
        assert_eq!(r.len(), 7);
        assert_eq!(r[0].extra["identity_violations"], 0.0);
        assert!(r.iter().all(|x| x.passed), "{r:#?}");
        assert_eq!(r[2].extra["t1"], 0.3);
    }
}
