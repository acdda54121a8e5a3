//! `G`-stopping times under immersion: the split `τ = τ_c ∧ τ_d` along the
//! jumps of `A°`, the conditional law of `A°_τ` on the jump part, and the
//! barrier-hitting representation `τ = inf{t : A°_t ≥ A°_τ}`.
//!
//! On a finite grid every finite value of `τ` charges `A°` (the jump at
//! `τ(ω)` is at least `p(ω) / P(block)`), so `τ_c ≡ ∞` and `τ_d = τ`. The
//! continuous branch and its uniform barrier law live in the Monte Carlo
//! module.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::filtration::{is_stopping_time, FilteredPair, Filtration};
use crate::lab::immersion::is_immersed;
use crate::process::Process;
use crate::projections::dual_optional_projection;
use crate::rational::Rational;
use crate::report::{instance_digest, CheckReport, Verdict, Witness};
use crate::space::{cond_prob, SampleSpace};
use crate::time::{RandomTime, Time};

/// Grid level `t` of a jump of `A°`, with the `F`-stopping time
/// `σ = t` on `{ΔA°_t > 0}`, `∞` elsewhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JumpTime {
    pub level: usize,
    pub sigma: RandomTime,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    /// `A°` of `1_[τ,∞)` onto `F`.
    pub ao: Process,
    /// `τ` off `D = {τ < ∞, ΔA°_τ > 0}`, `∞` on `D`.
    pub tau_c: RandomTime,
    /// `τ` on `D`, `∞` off `D`.
    pub tau_d: RandomTime,
    pub jump_times: Vec<JumpTime>,
}

pub fn decompose_stopping_time(tau: &RandomTime, pair: &FilteredPair) -> Result<Decomposition> {
    tau.validate(pair.space.len(), pair.horizon())?;
    if !is_stopping_time(tau, &pair.g) {
        return Err(Error::Precondition("tau is not a G-stopping time".into()));
    }
    let a = Process::indicator_from(tau, pair.horizon());
    let ao = dual_optional_projection(&a, &pair.f, &pair.space)?;
    let jumps = ao.increments();

    let in_d: Vec<bool> = (0..tau.len())
        .map(|w| matches!(tau.at(w), Time::At(t) if jumps.get(t, w).is_positive()))
        .collect();
    let pick = |keep: bool| {
        RandomTime::new(
            (0..tau.len())
                .map(|w| if in_d[w] == keep { tau.at(w) } else { Time::Infinite })
                .collect(),
        )
    };
    let jump_times = (0..=pair.horizon())
        .filter(|&t| jumps.at(t).iter().any(|j| j.is_positive()))
        .map(|t| JumpTime {
            level: t,
            sigma: RandomTime::new(
                jumps
                    .at(t)
                    .iter()
                    .map(|j| if j.is_positive() { Time::At(t) } else { Time::Infinite })
                    .collect(),
            ),
        })
        .collect();
    Ok(Decomposition {
        tau_c: pick(false),
        tau_d: pick(true),
        ao,
        jump_times,
    })
}

/// Conditional law of the barrier on the jump part: for each value `u` of
/// `A^{d,o}_{τ_d}` on `{τ_d < ∞}`,
///
/// ```text
/// P(A^{d,o}_{τ_d} = u | F_T) = Σ_t 1{A^{d,o}_t = u} ΔA°_t
/// ```
///
/// pointwise. Requires `τ` to be a `G`-stopping time and `F` immersed in `G`.
pub fn gstoping_d_check(tau: &RandomTime, pair: &FilteredPair) -> Result<CheckReport> {
    let decomposition = decompose_stopping_time(tau, pair)?;
    if !is_immersed(pair)?.holds {
        return Err(Error::Precondition("F is not immersed in G".into()));
    }
    let digest = instance_digest(&pair.space, &[&pair.f, &pair.g], &[tau], &[]);
    let mut report = CheckReport::new("gstoping-d", digest);
    report.condition("precondition: G-stopping time under immersion", true);

    let horizon = pair.horizon();
    let tau_d = &decomposition.tau_d;
    let delta_ao = decomposition.ao.increments();
    let ado = dual_optional_projection(&Process::indicator_from(tau_d, horizon), &pair.f, &pair.space)?;
    let barrier = ado.value_at(tau_d);

    let levels: BTreeSet<Rational> = (0..tau.len())
        .filter(|&w| tau_d.at(w).is_finite())
        .map(|w| barrier[w])
        .collect();

    for u in &levels {
        let event: Vec<bool> = (0..tau.len())
            .map(|w| tau_d.at(w).is_finite() && barrier[w] == *u)
            .collect();
        let lhs = cond_prob(&event, pair.f.terminal(), &pair.space)?;
        let rhs: Vec<Rational> = (0..tau.len())
            .map(|w| {
                (0..=horizon)
                    .filter(|&t| ado.get(t, w) == *u)
                    .map(|t| delta_ao.get(t, w))
                    .sum()
            })
            .collect();
        let mismatch = (0..tau.len()).find(|&w| lhs[w] != rhs[w]);
        if let Some(w) = mismatch {
            report.offer_witness(
                Witness::new(format!("law at u={u}"))
                    .outcome(w)
                    .value("u", *u)
                    .value("P(A°_tau = u | F_T)", lhs[w])
                    .value("sum of jumps at level u", rhs[w]),
            );
        }
        report.condition(format!("law at u={u}"), mismatch.is_none());
    }
    report.note("levels", levels.len());

    let recombined = decomposition.tau_c.pointwise_min(&decomposition.tau_d);
    report.condition("tau = tau_c ∧ tau_d", recombined == *tau);
    let covered = (0..tau.len()).all(|w| match tau_d.at(w) {
        Time::At(t) => decomposition
            .jump_times
            .iter()
            .any(|j| j.level == t && j.sigma.at(w) == Time::At(t)),
        Time::Infinite => true,
    });
    report.condition("graph(tau_d) within jump times of A°", covered);
    report.fact("tau_c avoids the grid (≡ ∞)", decomposition.tau_c.is_everywhere_infinite());
    Ok(report)
}

/// `inf{t : A°_t(ω) ≥ A°_{τ(ω)}(ω)} = τ(ω)` for every `ω` with `τ(ω) < ∞`.
pub fn barrier_representation_check(tau: &RandomTime, f: &Filtration, space: &SampleSpace) -> Result<Verdict> {
    tau.validate(space.len(), f.horizon())?;
    let ao = dual_optional_projection(&Process::indicator_from(tau, f.horizon()), f, space)?;
    for w in 0..tau.len() {
        let Time::At(t) = tau.at(w) else { continue };
        let barrier = ao.get(t, w);
        let hit = (0..=f.horizon())
            .find(|&s| ao.get(s, w) >= barrier)
            .expect("A° reaches its own value at tau");
        if hit != t {
            return Ok(Verdict::fail(
                Witness::new("tau = inf{t: A°_t >= A°_tau}")
                    .at(t, w)
                    .value("A°_tau", barrier)
                    .value("first hit", Rational::from(hit)),
            ));
        }
    }
    Ok(Verdict::pass())
}
