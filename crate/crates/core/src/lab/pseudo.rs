//! Pseudo-stopping times: the defining optional-stopping test, the five-way
//! characterization through the Azéma bundle, and the honest-time
//! proposition.

use crate::error::Result;
use crate::filtration::{
    basis_martingales, first_martingale_violation, first_stopping_violation, is_honest,
    progressive_enlargement, Filtration,
};
use crate::lab::enumerate::{count_stopping_times, for_each_stopping_time};
use crate::process::Process;
use crate::projections::azema_bundle;
use crate::rational::Rational;
use crate::report::{instance_digest, CheckReport, Verdict, Witness};
use crate::space::{cond_prob, SampleSpace};
use crate::time::{RandomTime, Time};
use std::ops::ControlFlow;

/// Precomputed basis martingales of `F`, weighted by outcome mass, so that
/// `E[M_τ]` is a sum of table lookups. Built once per filtration and reused
/// across many random times.
#[derive(Debug, Clone)]
pub struct PseudoStoppingTest {
    blocks: Vec<Vec<usize>>,
    /// `weighted[b][t][ω] = p(ω) · M^b_t(ω)`.
    weighted: Vec<Vec<Vec<Rational>>>,
    initial_means: Vec<Rational>,
    horizon: usize,
}

impl PseudoStoppingTest {
    pub fn new(f: &Filtration, space: &SampleSpace) -> Result<Self> {
        let basis = basis_martingales(f, space)?;
        let weighted: Vec<Vec<Vec<Rational>>> = basis
            .iter()
            .map(|m| {
                m.rows()
                    .iter()
                    .map(|row| row.iter().zip(space.probs()).map(|(v, p)| *v * *p).collect())
                    .collect()
            })
            .collect();
        let initial_means = weighted.iter().map(|w| w[0].iter().sum()).collect();
        Ok(PseudoStoppingTest {
            blocks: f.terminal().blocks().to_vec(),
            weighted,
            initial_means,
            horizon: f.horizon(),
        })
    }

    /// `E[M^b_τ]` for basis martingale `b`, with `M_∞ = M_T`.
    pub fn stopped_mean(&self, b: usize, tau: &RandomTime) -> Rational {
        let table = &self.weighted[b];
        (0..tau.len())
            .map(|w| table[tau.at(w).clamp(self.horizon)][w])
            .sum()
    }

    pub fn check(&self, tau: &RandomTime) -> Verdict {
        for (b, initial) in self.initial_means.iter().enumerate() {
            let stopped = self.stopped_mean(b, tau);
            if stopped != *initial {
                return Verdict::fail(
                    Witness::new("E[M_tau] = E[M_0]")
                        .block(&self.blocks[b])
                        .random_time(tau)
                        .value("E[M_tau]", stopped)
                        .value("E[M_0]", *initial),
                );
            }
        }
        Verdict::pass()
    }
}

/// `E[M_τ] = E[M_0]` for every basis martingale of `F`; by linearity this
/// covers every `F`-martingale on the grid.
pub fn is_pseudo_stopping(tau: &RandomTime, f: &Filtration, space: &SampleSpace) -> Result<Verdict> {
    tau.validate(space.len(), f.horizon())?;
    Ok(PseudoStoppingTest::new(f, space)?.check(tau))
}

/// Evaluates independently
///
/// * (i) `τ` is pseudo-stopping;
/// * (ii) `A°_T = P(τ < ∞ | F_T)`;
/// * (iii) `m ≡ 1`;
/// * (iv) each stopped basis martingale `M^τ` is an `F^τ`-martingale;
/// * (v') `Z̃_t` is `F_{t−1}`-measurable for `t ≥ 1`;
///
/// and, when all five hold, that `Z̃` is pathwise non-increasing.
pub fn ny2_check(tau: &RandomTime, f: &Filtration, space: &SampleSpace) -> Result<CheckReport> {
    let mut report = CheckReport::new("ny2", instance_digest(space, &[f], &[tau], &[]));
    let horizon = f.horizon();

    let cond_i = is_pseudo_stopping(tau, f, space)?;

    let bundle = azema_bundle(tau, f, space)?;
    let finite_prob = cond_prob(&tau.indicator_finite(), f.terminal(), space)?;
    let cond_ii = match (0..space.len()).find(|&w| bundle.ao.get(horizon, w) != finite_prob[w]) {
        None => Verdict::pass(),
        Some(w) => Verdict::fail(
            Witness::new("(ii) A°_T = P(tau < inf | F_T)")
                .at(horizon, w)
                .value("A°_T", bundle.ao.get(horizon, w))
                .value("P(tau<inf|F_T)", finite_prob[w]),
        ),
    };

    let one = Process::constant(horizon, space.len(), Rational::ONE);
    let cond_iii = match bundle.m.first_difference(&one) {
        None => Verdict::pass(),
        Some((t, w)) => Verdict::fail(
            Witness::new("(iii) m = 1")
                .at(t, w)
                .value("m", bundle.m.get(t, w)),
        ),
    };

    let enlarged = progressive_enlargement(f, tau);
    let mut cond_iv = Verdict::pass();
    for (b, m) in basis_martingales(f, space)?.iter().enumerate() {
        let stopped = m.stopped(tau);
        if let Some(v) = first_martingale_violation(&stopped, &enlarged, space)? {
            cond_iv = Verdict::fail(
                Witness::new("(iv) M^tau is an F^tau-martingale")
                    .at(v.time, v.outcome)
                    .block(&f.terminal().blocks()[b])
                    .value("E[M^tau_t | F^tau_t-1]", v.conditional)
                    .value("M^tau_t-1", v.previous),
            );
            break;
        }
    }

    let cond_v = match (1..=horizon).find_map(|t| {
        f.part(t - 1)
            .first_non_measurable(bundle.z_tilde.at(t))
            .map(|w| (t, w))
    }) {
        None => Verdict::pass(),
        Some((t, w)) => Verdict::fail(
            Witness::new("(v') Z~ predictable")
                .at(t, w)
                .block(f.part(t - 1).block_containing(w))
                .value("Z~_t", bundle.z_tilde.get(t, w)),
        ),
    };

    report
        .verdict("(i) pseudo-stopping", cond_i)
        .verdict("(ii) A°_T = P(tau < inf | F_T)", cond_ii)
        .verdict("(iii) m = 1", cond_iii)
        .verdict("(iv) M^tau is an F^tau-martingale", cond_iv)
        .verdict("(v') Z~ predictable", cond_v);
    report.fact("°A = A°", bundle.oa == bundle.ao);

    if report.all_true() {
        let increase = bundle.z_tilde.first_increase();
        if let Some((t, w)) = increase {
            report.offer_witness(
                Witness::new("(v) Z~ non-increasing")
                    .at(t, w)
                    .value("Z~_t-1", bundle.z_tilde.get(t - 1, w))
                    .value("Z~_t", bundle.z_tilde.get(t, w)),
            );
        }
        report.condition("(v) Z~ non-increasing", increase.is_none());
    }
    Ok(report)
}

/// `inf{t : A°_t > 0}`, `∞` where `A°` never leaves zero.
pub fn first_charge_time(ao: &Process) -> RandomTime {
    RandomTime::new(
        (0..ao.num_outcomes())
            .map(|w| {
                (0..=ao.horizon())
                    .find(|&t| ao.get(t, w).is_positive())
                    .map_or(Time::Infinite, Time::At)
            })
            .collect(),
    )
}

fn agrees_on_finite(tau: &RandomTime, sigma: &RandomTime) -> Option<usize> {
    (0..tau.len()).find(|&w| tau.at(w).is_finite() && tau.at(w) != sigma.at(w))
}

/// Default bound on the exhaustive stopping-time search in
/// [`honest_pseudo_check`].
pub const HONEST_SEARCH_CAP: u64 = 20_000;

/// Evaluates
///
/// * (a) some `F`-stopping time equals `τ` on `{τ < ∞}`, decided with the
///   candidate `σ = inf{t : A°_t > 0}`, and cross-checked by exhaustive
///   search when `F` has at most `search_cap` stopping times;
/// * (b) `τ` is honest and pseudo-stopping;
///
/// and, when (b) holds, that `τ = inf{t : A°_t > 0}` on `{τ < ∞}`.
pub fn honest_pseudo_check(tau: &RandomTime, f: &Filtration, space: &SampleSpace) -> Result<CheckReport> {
    honest_pseudo_check_with_cap(tau, f, space, HONEST_SEARCH_CAP)
}

pub fn honest_pseudo_check_with_cap(
    tau: &RandomTime,
    f: &Filtration,
    space: &SampleSpace,
    search_cap: u64,
) -> Result<CheckReport> {
    let mut report = CheckReport::new("honest-pseudo", instance_digest(space, &[f], &[tau], &[]));
    let bundle = azema_bundle(tau, f, space)?;
    let sigma = first_charge_time(&bundle.ao);

    let sigma_is_stopping = first_stopping_violation(&sigma, f);
    let mismatch = agrees_on_finite(tau, &sigma);
    let cond_a = sigma_is_stopping.is_none() && mismatch.is_none();
    if let Some(w) = mismatch {
        report.offer_witness(
            Witness::new("(a) tau equals an F-stopping time on {tau < inf}")
                .outcome(w)
                .random_time(&sigma),
        );
    }

    let honest = is_honest(tau, f);
    let pseudo = is_pseudo_stopping(tau, f, space)?;
    report
        .fact("honest", honest)
        .fact("pseudo-stopping", pseudo.holds)
        .fact("tau finite everywhere", tau.values().iter().all(|v| v.is_finite()));
    if let Some(w) = pseudo.witness.clone() {
        report.offer_witness(w.relabel("(b) pseudo-stopping"));
    }

    report.condition("(a) tau equals an F-stopping time on {tau < inf}", cond_a);
    if count_stopping_times(f) <= search_cap as u128 {
        let mut found = false;
        for_each_stopping_time(f, search_cap, |s| {
            if agrees_on_finite(tau, s).is_none() {
                found = true;
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })?;
        report.condition("(a') exhaustive search", found);
        report.note("search", "exhaustive");
    } else {
        report.note("search", "canonical candidate only");
    }
    report.condition("(b) honest and pseudo-stopping", honest && pseudo.holds);

    if honest && pseudo.holds {
        report.condition("tau = inf{t: A°_t > 0} on {tau < inf}", mismatch.is_none());
    }
    Ok(report)
}
