//! Brownian motion `B` from 0, `T1` its first hitting time of 1, `σ` the
//! last zero before `T1` and `τ` the last time `B` sits at its running
//! maximum before `σ`.
//!
//! Paths run on an Euler grid until they leave `(-1, 1)`. A path leaving at
//! `+1` has met `T1`, so `σ` and `τ` are read off the grid. A path leaving at
//! `-1` is completed by the strong Markov property: the maximum of `B` before
//! its last zero preceding `T1`, started afresh from the exit, is uniform on
//! `[0, 1]`, so with `m` the maximum so far, `τ` precedes the exit iff a
//! fresh uniform `U` satisfies `U <= m`, and otherwise `B_τ = U`.
//!
//! The plain grid reads maxima, zeros and exits at grid points only. The
//! bridge variant also samples the maximum and minimum of the Brownian
//! bridge across each step, which removes the `O(√dt)` bias of the grid
//! maximum from the bounded test martingales.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{simulate, McReport, Moments};
use crate::error::{Error, Result};

/// Steps coarser than this get the wide-tolerance flag.
const WIDE_DT: f64 = 0.01;

/// Separates the bridge paths' streams from the plain grid's.
const BRIDGE_STREAM_KEY: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Clone, Copy, PartialEq)]
struct WilliamsPath {
    /// `B^{T1}_τ`, equal to the running maximum of `B` at `σ`.
    b_t1_at_tau: f64,
    /// `B^{T±1}_τ`, with `T±1` the exit time of `(-1, 1)`.
    b_exit_at_tau: f64,
    /// `(B² - t)^{T±1}_τ`.
    square_exit_at_tau: f64,
    /// `B_{T±1}`, clamped to the exit level.
    b_at_exit: f64,
    exit_time: f64,
}

fn williams_path(dt: f64, rng: &mut impl Rng) -> WilliamsPath {
    let step = dt.sqrt();
    let mut b = 0.0f64;
    let mut k = 0u64;
    let (mut max, mut argmax) = (0.0f64, 0u64);
    let (mut max_at_zero, mut argmax_at_zero) = (0.0f64, 0u64);
    let up = loop {
        k += 1;
        let z: f64 = rng.sample(StandardNormal);
        b += step * z;
        if b >= 1.0 {
            break true;
        }
        if b <= -1.0 {
            break false;
        }
        if b >= max {
            max = b;
            argmax = k;
        }
        if b <= 0.0 {
            max_at_zero = max;
            argmax_at_zero = argmax;
        }
    };
    complete(up, (max, argmax), (max_at_zero, argmax_at_zero), k, dt, rng)
}

/// Extreme of a Brownian bridge from `a` to `b` over a step of variance
/// `dt`: the maximum for `sign = 1`, the minimum for `sign = -1`.
fn bridge_extreme(a: f64, b: f64, dt: f64, sign: f64, rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.gen();
    let spread = ((b - a) * (b - a) - 2.0 * dt * (1.0 - u).ln()).sqrt();
    0.5 * (a + b + sign * spread)
}

fn williams_path_bridge(dt: f64, rng: &mut impl Rng) -> WilliamsPath {
    let step = dt.sqrt();
    let mut b = 0.0f64;
    let mut k = 0u64;
    let (mut max, mut argmax) = (0.0f64, 0u64);
    let (mut max_at_zero, mut argmax_at_zero) = (0.0f64, 0u64);
    let up = loop {
        let a = b;
        let z: f64 = rng.sample(StandardNormal);
        b = a + step * z;
        k += 1;
        let hi = bridge_extreme(a, b, dt, 1.0, rng);
        let lo = bridge_extreme(a, b, dt, -1.0, rng);
        if lo <= 0.0 {
            max_at_zero = max;
            argmax_at_zero = argmax;
        }
        if hi >= 1.0 {
            break true;
        }
        if lo <= -1.0 {
            break false;
        }
        if hi >= max {
            max = hi;
            argmax = k;
        }
        if b <= 0.0 {
            max_at_zero = max;
            argmax_at_zero = argmax;
        }
    };
    complete(up, (max, argmax), (max_at_zero, argmax_at_zero), k, dt, rng)
}

fn complete(
    up: bool,
    (max, argmax): (f64, u64),
    (max_at_zero, argmax_at_zero): (f64, u64),
    k: u64,
    dt: f64,
    rng: &mut impl Rng,
) -> WilliamsPath {
    let exit_time = k as f64 * dt;
    if up {
        let tau = argmax_at_zero as f64 * dt;
        return WilliamsPath {
            b_t1_at_tau: max_at_zero,
            b_exit_at_tau: max_at_zero,
            square_exit_at_tau: max_at_zero * max_at_zero - tau,
            b_at_exit: 1.0,
            exit_time,
        };
    }
    let u: f64 = rng.gen();
    if u <= max {
        let tau = argmax as f64 * dt;
        WilliamsPath {
            b_t1_at_tau: max,
            b_exit_at_tau: max,
            square_exit_at_tau: max * max - tau,
            b_at_exit: -1.0,
            exit_time,
        }
    } else {
        WilliamsPath {
            b_t1_at_tau: u,
            b_exit_at_tau: -1.0,
            square_exit_at_tau: 1.0 - exit_time,
            b_at_exit: -1.0,
            exit_time,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilliamsParams {
    pub n_paths: u64,
    pub dt: f64,
    pub seed: u64,
    /// Also rerun at `dt / 2` and compare.
    pub refine: bool,
}

impl WilliamsParams {
    pub fn new(n_paths: u64, dt: f64, seed: u64) -> Self {
        WilliamsParams {
            n_paths,
            dt,
            seed,
            refine: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_paths < 1 {
            return Err(Error::InvalidParameter("n_paths must be at least 1".into()));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        Ok(())
    }
}

fn column(paths: &[WilliamsPath], f: impl Fn(&WilliamsPath) -> f64) -> Moments {
    Moments::of(&paths.iter().map(f).collect::<Vec<_>>())
}

/// Estimates `E[M_τ]` for `M = B^{T1}` on the plain grid together with the
/// stopping-time sanity branch `E[B_{T1}] = 1`, and for the bounded
/// martingales `B` and `B² - t` stopped at the exit of `(-1, 1)` on the
/// bridge-sampled grid together with the sanity branch at the exit time.
/// With `refine`, the plain-grid estimate is recomputed at `dt / 2`.
pub fn williams_tau(params: &WilliamsParams) -> Result<Vec<McReport>> {
    params.validate()?;
    let WilliamsParams { n_paths, dt, seed, .. } = *params;
    let grid = simulate(n_paths, seed, |rng| williams_path(dt, rng));
    let bridge = simulate(n_paths, seed ^ BRIDGE_STREAM_KEY, |rng| williams_path_bridge(dt, rng));
    let literal = column(&grid, |p| p.b_t1_at_tau);
    let mut reports = vec![
        McReport::mean("williams: E[B^T1_tau]", &literal, 0.0, seed, Some(dt)),
        McReport::mean("williams sanity: E[B^T1_T1]", &column(&grid, |_| 1.0), 1.0, seed, Some(dt)),
        McReport::mean(
            "williams bridge: E[B^(T-1,1)_tau]",
            &column(&bridge, |p| p.b_exit_at_tau),
            0.0,
            seed,
            Some(dt),
        ),
        McReport::mean(
            "williams bridge: E[(B^2 - t)^(T-1,1)_tau]",
            &column(&bridge, |p| p.square_exit_at_tau),
            0.0,
            seed,
            Some(dt),
        ),
        McReport::mean(
            "williams bridge sanity: E[B at exit of (-1,1)]",
            &column(&bridge, |p| p.b_at_exit),
            0.0,
            seed,
            Some(dt),
        ),
    ];
    reports[0].extra.insert("mean_exit_time".into(), column(&grid, |p| p.exit_time).mean);
    reports[2].extra.insert("mean_exit_time".into(), column(&bridge, |p| p.exit_time).mean);

    if params.refine {
        let fine_dt = dt / 2.0;
        let fine = column(&simulate(n_paths, seed, |rng| williams_path(fine_dt, rng)), |p| p.b_t1_at_tau);
        let diff = Moments {
            n: n_paths,
            mean: fine.mean - literal.mean,
            stderr: (fine.stderr.powi(2) + literal.stderr.powi(2)).sqrt(),
        };
        reports.push(
            McReport::mean("williams: grid refinement dt -> dt/2", &diff, 0.0, seed, Some(dt))
                .with("estimate_dt", literal.mean)
                .with("estimate_half_dt", fine.mean),
        );
    }
    for r in &mut reports {
        r.wide_tolerance |= dt > WIDE_DT;
    }
    Ok(reports)
}
