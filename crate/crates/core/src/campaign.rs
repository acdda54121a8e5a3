//! Fuzz campaigns: every theorem check on every generated instance.
//!
//! Instance `i` of a campaign with seed `s` is generated from `s ^ i`, so
//! instances are independent and may be evaluated in any order. Summaries
//! merge associatively and commutatively.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filtration::{is_martingale, is_stopping_time, FilteredPair, Filtration};
use crate::lab::enumerate::count_stopping_times;
use crate::lab::generator::{gen_random_instance, random_raw_increasing, GeneratorParams, Mode};
use crate::lab::gstoping::{barrier_representation_check, decompose_stopping_time, gstoping_d_check};
use crate::lab::immersion::{immersion_cond_indep, is_immersed, pseudo_h_check_with, PseudoHOptions, StoppingTimeSource};
use crate::lab::pseudo::{honest_pseudo_check, is_pseudo_stopping, ny2_check};
use crate::process::Process;
use crate::projections::{azema_bundle, hloc_check};
use crate::rational::Rational;
use crate::report::{instance_digest, CheckReport, Witness};
use crate::space::SampleSpace;
use crate::time::{RandomTime, Time};

/// Mode of each generated instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeSelection {
    Single(Mode),
    /// Cycles through every mode by instance index.
    Mixed,
}

impl ModeSelection {
    pub fn mode_for(self, index: u64) -> Mode {
        match self {
            ModeSelection::Single(m) => m,
            ModeSelection::Mixed => Mode::ALL[(index % Mode::ALL.len() as u64) as usize],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModeSelection::Single(m) => m.name(),
            ModeSelection::Mixed => "mixed",
        }
    }
}

impl std::str::FromStr for ModeSelection {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "mixed" {
            Ok(ModeSelection::Mixed)
        } else {
            s.parse().map(ModeSelection::Single)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CampaignConfig {
    pub trials: u64,
    pub seed: u64,
    pub omega_max: usize,
    pub horizon_max: usize,
    pub mode: ModeSelection,
    /// Enumeration cap for `G`-stopping times.
    pub cap: u64,
    /// Bound on the stopping-time count of generated instances.
    pub max_stopping_times: u64,
    /// Random raw increasing processes per instance for the hloc check.
    pub raw_processes: usize,
    /// Samples used when enumeration exceeds the cap.
    pub fallback_samples: u64,
    /// Failing records kept in the summary.
    pub witness_limit: usize,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            trials: 100,
            seed: 0,
            omega_max: 8,
            horizon_max: 4,
            mode: ModeSelection::Mixed,
            cap: 100_000,
            max_stopping_times: 100_000,
            raw_processes: 2,
            fallback_samples: 2_000,
            witness_limit: 10,
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cap == 0 {
            return Err(Error::InvalidParameter("cap must be positive".into()));
        }
        self.generator(0).validate()
    }

    pub fn instance_seed(&self, index: u64) -> u64 {
        self.seed ^ index
    }

    pub fn generator(&self, index: u64) -> GeneratorParams {
        GeneratorParams {
            omega_max: self.omega_max,
            horizon_max: self.horizon_max,
            mode: self.mode.mode_for(index),
            seed: self.instance_seed(index),
            max_stopping_times: self.max_stopping_times,
        }
    }
}

/// Observations about an instance that are not theorem checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct InstanceFlags {
    pub immersed: bool,
    pub g_stopping: bool,
    pub pseudo_stopping: bool,
    pub honest: bool,
    /// `Z` pointwise non-increasing while `m` is not identically one.
    pub monotone_z_not_pseudo: bool,
    pub sampled_fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceOutcome {
    pub index: u64,
    pub seed: u64,
    pub mode: Mode,
    pub omega: usize,
    pub horizon: usize,
    pub stopping_times: u128,
    pub flags: InstanceFlags,
    pub records: Vec<CheckReport>,
}

impl InstanceOutcome {
    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| !r.agree).count()
    }
}

fn single_claim(name: &str, digest: &str, precondition: &str, claims: &[(&str, bool)]) -> CheckReport {
    let mut report = CheckReport::new(name, digest);
    report.condition(format!("precondition: {precondition}"), true);
    for (label, holds) in claims {
        report.condition(*label, *holds);
    }
    report
}

/// Barrier representation as a single-claim record, noting which filtration.
pub fn barrier_record(tau: &RandomTime, f: &Filtration, space: &SampleSpace, which: &str) -> Result<CheckReport> {
    let verdict = barrier_representation_check(tau, f, space)?;
    let digest = instance_digest(space, &[f], &[tau], &[]);
    let mut report = single_claim(
        "barrier",
        &digest,
        "any random time",
        &[("tau = inf{t: A°_t >= A°_tau} on {tau < inf}", verdict.holds)],
    );
    report.note("filtration", which);
    if let Some(w) = verdict.witness {
        report.offer_witness(w);
    }
    Ok(report)
}

/// Identities of the Azéma bundle that hold for every random time.
pub fn azema_identities(tau: &RandomTime, f: &Filtration, space: &SampleSpace) -> Result<CheckReport> {
    let bundle = azema_bundle(tau, f, space)?;
    let horizon = f.horizon();
    let n = space.len();
    let mut report = CheckReport::new("azema", instance_digest(space, &[f], &[tau], &[]));
    report.condition("precondition: any random time", true);

    let z_split = &bundle.m - &bundle.ao;
    let z_mismatch = bundle.z.first_difference(&z_split);
    if let Some((t, w)) = z_mismatch {
        report.offer_witness(
            Witness::new("Z = m - A°")
                .at(t, w)
                .value("Z", bundle.z.get(t, w))
                .value("m - A°", z_split.get(t, w)),
        );
    }
    report.condition("Z = m - A°", z_mismatch.is_none());

    let zt_split = Process::from_fn(horizon, n, |t, w| bundle.m.get(t, w) - bundle.ao.prev(t)[w]);
    let zt_mismatch = bundle.z_tilde.first_difference(&zt_split);
    if let Some((t, w)) = zt_mismatch {
        report.offer_witness(
            Witness::new("Z~_t = m_t - A°_t-1")
                .at(t, w)
                .value("Z~", bundle.z_tilde.get(t, w))
                .value("m - A°_-", zt_split.get(t, w)),
        );
    }
    report.condition("Z~_t = m_t - A°_t-1", zt_mismatch.is_none());

    report.condition("m is an F-martingale", is_martingale(&bundle.m, f, space)?);
    report.condition("m_0 = 1", bundle.m.at(0).iter().all(|v| *v == Rational::ONE));

    let lhs = space.expect(bundle.ao.at(horizon))?;
    let finite: Vec<usize> = (0..n).filter(|&w| tau.at(w).is_finite()).collect();
    let rhs = space.mass(&finite);
    if lhs != rhs {
        report.offer_witness(
            Witness::new("E[A°_T] = P(tau <= T)")
                .time(horizon)
                .value("E[A°_T]", lhs)
                .value("P(tau <= T)", rhs),
        );
    }
    report.condition("E[A°_T] = P(tau <= T)", lhs == rhs);
    Ok(report)
}

/// Immersion decided by martingale preservation and by conditional
/// independence.
pub fn immersion_oracles(pair: &FilteredPair) -> Result<CheckReport> {
    let digest = instance_digest(&pair.space, &[&pair.f, &pair.g], &[], &[]);
    let mut report = CheckReport::new("immersion-oracles", digest);
    report
        .verdict("F-martingales are G-martingales", is_immersed(pair)?)
        .condition("P(B | G_t) = P(B | F_t)", immersion_cond_indep(pair)?);
    Ok(report)
}

/// Pseudo-stopping decided by stopped basis martingales and by `m ≡ 1`.
pub fn pseudo_oracles(tau: &RandomTime, f: &Filtration, space: &SampleSpace) -> Result<CheckReport> {
    let mut report = CheckReport::new("pseudo-oracles", instance_digest(space, &[f], &[tau], &[]));
    let bundle = azema_bundle(tau, f, space)?;
    report
        .verdict("E[M_tau] = E[M_0] for basis martingales", is_pseudo_stopping(tau, f, space)?)
        .condition("m = 1", bundle.m.is_constant(Rational::ONE));
    Ok(report)
}

/// Structural invariants of `τ = τ_c ∧ τ_d` for a `G`-stopping time.
pub fn decomposition_record(tau: &RandomTime, pair: &FilteredPair) -> Result<CheckReport> {
    let d = decompose_stopping_time(tau, pair)?;
    let digest = instance_digest(&pair.space, &[&pair.f, &pair.g], &[tau], &[]);
    let covered = (0..tau.len()).all(|w| match d.tau_d.at(w) {
        Time::At(t) => d.jump_times.iter().any(|j| j.level == t && j.sigma.at(w).is_at(t)),
        Time::Infinite => true,
    });
    Ok(single_claim(
        "decompose",
        &digest,
        "G-stopping time",
        &[
            ("tau = min(tau_c, tau_d)", d.tau_c.pointwise_min(&d.tau_d) == *tau),
            ("graph(tau_d) within jump times of A°", covered),
            ("tau_c, tau_d are G-stopping times", is_stopping_time(&d.tau_c, &pair.g) && is_stopping_time(&d.tau_d, &pair.g)),
            ("jump times are F-stopping times", d.jump_times.iter().all(|j| is_stopping_time(&j.sigma, &pair.f))),
        ],
    ))
}

/// Runs the theorem suite on one generated instance.
pub fn run_instance(config: &CampaignConfig, index: u64) -> Result<InstanceOutcome> {
    let params = config.generator(index);
    let (pair, tau) = gen_random_instance(&params)?;
    let mut outcome = evaluate(&pair, &tau, config, params.seed)?;
    outcome.index = index;
    outcome.mode = params.mode;
    Ok(outcome)
}

/// Runs the theorem suite on an explicit pair and random time.
pub fn evaluate(pair: &FilteredPair, tau: &RandomTime, config: &CampaignConfig, seed: u64) -> Result<InstanceOutcome> {
    let (space, f) = (&pair.space, &pair.f);
    let mut records = Vec::new();
    let mut flags = InstanceFlags::default();

    let ny2 = ny2_check(tau, f, space)?;
    flags.pseudo_stopping = ny2.holds("(i) pseudo-stopping").unwrap_or(false);
    records.push(ny2);

    let a = Process::indicator_from(tau, pair.horizon());
    records.push(hloc_check(&a, f, space)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    for _ in 0..config.raw_processes {
        let v = random_raw_increasing(pair.horizon(), space.len(), &mut rng);
        records.push(hloc_check(&v, f, space)?);
    }

    let stopping_times = count_stopping_times(&pair.g);
    let source = if stopping_times <= config.cap as u128 {
        StoppingTimeSource::Enumerated { cap: config.cap }
    } else {
        flags.sampled_fallback = true;
        StoppingTimeSource::Sampled {
            samples: config.fallback_samples,
        }
    };
    let options = PseudoHOptions {
        source,
        random_processes: 4,
        seed,
    };
    records.push(pseudo_h_check_with(pair, &options)?);

    let honest = honest_pseudo_check(tau, f, space)?;
    flags.honest = honest.holds("honest").unwrap_or(false);
    records.push(honest);

    records.push(barrier_record(tau, f, space, "F")?);
    records.push(barrier_record(tau, &pair.g, space, "G")?);
    records.push(azema_identities(tau, f, space)?);

    let immersion = immersion_oracles(pair)?;
    flags.immersed = immersion.holds("F-martingales are G-martingales").unwrap_or(false);
    records.push(immersion);
    records.push(pseudo_oracles(tau, f, space)?);

    flags.g_stopping = is_stopping_time(tau, &pair.g);
    if flags.g_stopping {
        records.push(decomposition_record(tau, pair)?);
        if flags.immersed {
            records.push(gstoping_d_check(tau, pair)?);
        }
    }

    let bundle = azema_bundle(tau, f, space)?;
    flags.monotone_z_not_pseudo =
        bundle.z.first_increase().is_none() && !bundle.m.is_constant(Rational::ONE);

    Ok(InstanceOutcome {
        index: 0,
        seed,
        mode: Mode::Free,
        omega: space.len(),
        horizon: pair.horizon(),
        stopping_times,
        flags,
        records,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Tally {
    pub runs: u64,
    pub failures: u64,
}

/// A failing record together with the instance that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailureRecord {
    pub index: u64,
    pub seed: u64,
    pub report: CheckReport,
}

/// Order-independent aggregate of instance outcomes.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct CampaignSummary {
    pub trials: u64,
    pub failures: u64,
    pub failing_instances: u64,
    pub checks: BTreeMap<String, Tally>,
    pub flags: BTreeMap<String, u64>,
    pub max_stopping_times: u64,
    /// Failing records with the smallest instance indices.
    pub first_failures: Vec<FailureRecord>,
    witness_limit: usize,
}

impl CampaignSummary {
    pub fn new(witness_limit: usize) -> Self {
        CampaignSummary {
            witness_limit,
            ..CampaignSummary::default()
        }
    }

    pub fn flag(&self, name: &str) -> u64 {
        self.flags.get(name).copied().unwrap_or(0)
    }

    pub fn add(&mut self, outcome: &InstanceOutcome) {
        let mut single = CampaignSummary::new(self.witness_limit);
        single.trials = 1;
        single.max_stopping_times = u64::try_from(outcome.stopping_times).unwrap_or(u64::MAX);
        let f = outcome.flags;
        for (name, on) in [
            ("immersed", f.immersed),
            ("g_stopping", f.g_stopping),
            ("pseudo_stopping", f.pseudo_stopping),
            ("honest", f.honest),
            ("monotone_z_not_pseudo", f.monotone_z_not_pseudo),
            ("sampled_fallback", f.sampled_fallback),
        ] {
            single.flags.insert(name.to_string(), on as u64);
        }
        for record in &outcome.records {
            let tally = single.checks.entry(record.name.clone()).or_default();
            tally.runs += 1;
            if !record.agree {
                tally.failures += 1;
                single.failures += 1;
                single.first_failures.push(FailureRecord {
                    index: outcome.index,
                    seed: outcome.seed,
                    report: record.clone(),
                });
            }
        }
        single.failing_instances = (single.failures > 0) as u64;
        self.merge(single);
    }

    pub fn merge(&mut self, other: CampaignSummary) {
        self.trials += other.trials;
        self.failures += other.failures;
        self.failing_instances += other.failing_instances;
        self.max_stopping_times = self.max_stopping_times.max(other.max_stopping_times);
        for (name, t) in other.checks {
            let mine = self.checks.entry(name).or_default();
            mine.runs += t.runs;
            mine.failures += t.failures;
        }
        for (name, c) in other.flags {
            *self.flags.entry(name).or_default() += c;
        }
        self.witness_limit = self.witness_limit.max(other.witness_limit);
        self.first_failures.extend(other.first_failures);
        self.first_failures
            .sort_by(|a, b| (a.index, &a.report.name).cmp(&(b.index, &b.report.name)));
        self.first_failures.truncate(self.witness_limit);
    }
}

/// Evaluates every instance of the campaign in parallel; outcomes are
/// returned in index order.
pub fn run_campaign(config: &CampaignConfig) -> Result<Vec<InstanceOutcome>> {
    config.validate()?;
    (0..config.trials)
        .into_par_iter()
        .map(|i| run_instance(config, i))
        .collect()
}

pub fn summarize(config: &CampaignConfig, outcomes: &[InstanceOutcome]) -> CampaignSummary {
    let mut summary = CampaignSummary::new(config.witness_limit);
    for outcome in outcomes {
        summary.add(outcome);
    }
    summary
}
