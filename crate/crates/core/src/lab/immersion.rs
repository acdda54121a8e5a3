//! Immersion of `F` in `G` and its characterization by pseudo-stopping
//! times and by dual optional projections.

use std::ops::ControlFlow;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::filtration::{
    basis_martingales, first_adaptedness_violation, first_martingale_violation, FilteredPair,
};
use crate::lab::enumerate::for_each_stopping_time;
use crate::lab::pseudo::PseudoStoppingTest;
use crate::process::Process;
use crate::projections::{dual_optional_projection, optional_projection};
use crate::rational::Rational;
use crate::report::{instance_digest, CheckReport, Verdict, Witness};
use crate::space::cond_expect;
use crate::time::{RandomTime, Time};

/// Every basis `F`-martingale is a `G`-martingale.
pub fn is_immersed(pair: &FilteredPair) -> Result<Verdict> {
    let blocks = pair.f.terminal().blocks();
    for (b, m) in basis_martingales(&pair.f, &pair.space)?.iter().enumerate() {
        if let Some(v) = first_martingale_violation(m, &pair.g, &pair.space)? {
            return Ok(Verdict::fail(
                Witness::new("F-martingale is a G-martingale")
                    .at(v.time, v.outcome)
                    .block(&blocks[b])
                    .value("E[M_t | G_t-1]", v.conditional)
                    .value("M_t-1", v.previous),
            ));
        }
    }
    Ok(Verdict::pass())
}

/// `P(B | G_t) = P(B | F_t)` for every `t` and every block `B` of `F_T`.
pub fn immersion_cond_indep(pair: &FilteredPair) -> Result<bool> {
    let n = pair.space.len();
    for block in pair.f.terminal().blocks() {
        let mut indicator = vec![Rational::ZERO; n];
        for &w in block {
            indicator[w] = Rational::ONE;
        }
        for t in 0..=pair.horizon() {
            let given_g = cond_expect(&indicator, pair.g.part(t), &pair.space)?;
            let given_f = cond_expect(&indicator, pair.f.part(t), &pair.space)?;
            if given_g != given_f {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Random `G`-adapted nondecreasing process with small rational increments.
pub fn random_adapted_increasing(pair: &FilteredPair, rng: &mut impl Rng) -> Process {
    let horizon = pair.horizon();
    let n = pair.space.len();
    let rows = (0..=horizon)
        .map(|t| {
            let mut row = vec![Rational::ZERO; n];
            for block in pair.g.part(t).blocks() {
                let jump = Rational::new(rng.gen_range(0..=3), rng.gen_range(1..=3));
                for &w in block {
                    row[w] = jump;
                }
            }
            row
        })
        .collect();
    Process::cumulative(&Process::new(rows).expect("rectangular rows"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoppingTimeSource {
    /// Every `G`-stopping time, by exhaustive enumeration.
    Enumerated { cap: u64 },
    /// A seeded random sample of `G`-stopping times.
    Sampled { samples: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PseudoHOptions {
    pub source: StoppingTimeSource,
    /// Random `G`-adapted increasing processes tested in condition (iii).
    pub random_processes: usize,
    pub seed: u64,
}

impl PseudoHOptions {
    pub fn enumerated(cap: u64) -> Self {
        PseudoHOptions {
            source: StoppingTimeSource::Enumerated { cap },
            random_processes: 4,
            seed: 0,
        }
    }
}

/// `ᵒV = V°` for one nondecreasing process.
fn projections_coincide(v: &Process, pair: &FilteredPair) -> Result<Option<(usize, usize, Rational, Rational)>> {
    let ov = optional_projection(v, &pair.f, &pair.space)?;
    let vo = dual_optional_projection(v, &pair.f, &pair.space)?;
    Ok(ov
        .first_difference(&vo)
        .map(|(t, w)| (t, w, ov.get(t, w), vo.get(t, w))))
}

/// Random `G`-stopping time drawn by a random walk on `G`'s atom tree.
pub fn random_stopping_time(pair: &FilteredPair, rng: &mut impl Rng) -> RandomTime {
    let horizon = pair.horizon();
    let mut values = vec![Time::Infinite; pair.space.len()];
    let mut decided = vec![false; pair.space.len()];
    for t in 0..=horizon {
        for block in pair.g.part(t).blocks() {
            if decided[block[0]] {
                continue;
            }
            let stop = if t == horizon {
                rng.gen_bool(0.5).then_some(Time::At(t))
            } else {
                rng.gen_bool(0.35).then_some(Time::At(t))
            };
            if let Some(v) = stop {
                for &w in block {
                    values[w] = v;
                    decided[w] = true;
                }
            }
        }
    }
    RandomTime::new(values)
}

/// Evaluates for the pair `F ⊂ G`
///
/// * (i) `F` is immersed in `G`;
/// * (ii) every `G`-stopping time is `F`-pseudo-stopping;
/// * (iii) `ᵒV = V°` for `V = 1_[ν,∞)` over every `G`-stopping time `ν`, and
///   for a seeded sample of random `G`-adapted increasing processes.
///
/// With [`StoppingTimeSource::Enumerated`] the quantifier over stopping
/// times is exhaustive and the call fails with [`Error::CapExceeded`] when
/// `G` has too many; [`StoppingTimeSource::Sampled`] is the flagged fallback.
pub fn pseudo_h_check_with(pair: &FilteredPair, options: &PseudoHOptions) -> Result<CheckReport> {
    let digest = instance_digest(&pair.space, &[&pair.f, &pair.g], &[], &[]);
    let mut report = CheckReport::new("pseudoH", digest);
    let horizon = pair.horizon();

    let cond_i = is_immersed(pair)?;

    let test = PseudoStoppingTest::new(&pair.f, &pair.space)?;
    let mut cond_ii: Option<Witness> = None;
    let mut cond_iii: Option<Witness> = None;
    let mut examine = |nu: &RandomTime| -> Result<()> {
        if cond_ii.is_none() {
            if let Some(w) = test.check(nu).witness {
                cond_ii = Some(w.relabel("(ii) G-stopping times are F-pseudo-stopping"));
            }
        }
        if cond_iii.is_none() {
            let a = Process::indicator_from(nu, horizon);
            if let Some((t, w, ov, vo)) = projections_coincide(&a, pair)? {
                cond_iii = Some(
                    Witness::new("(iii) °V = V° for G-optional V")
                        .at(t, w)
                        .random_time(nu)
                        .value("°V", ov)
                        .value("V°", vo),
                );
            }
        }
        Ok(())
    };

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    match options.source {
        StoppingTimeSource::Enumerated { cap } => {
            let mut failure: Option<Error> = None;
            let count = for_each_stopping_time(&pair.g, cap, |nu| match examine(nu) {
                Ok(()) => ControlFlow::Continue(()),
                Err(e) => {
                    failure = Some(e);
                    ControlFlow::Break(())
                }
            })?;
            if let Some(e) = failure {
                return Err(e);
            }
            report.note("stopping_times", count).note("quantifier", "enumerated");
        }
        StoppingTimeSource::Sampled { samples } => {
            for _ in 0..samples {
                let nu = random_stopping_time(pair, &mut rng);
                examine(&nu)?;
            }
            report
                .note("stopping_times", samples)
                .note("quantifier", "sampled-fallback");
        }
    }

    for k in 0..options.random_processes {
        if cond_iii.is_some() {
            break;
        }
        let v = random_adapted_increasing(pair, &mut rng);
        debug_assert!(first_adaptedness_violation(&v, &pair.g)?.is_none());
        if let Some((t, w, ov, vo)) = projections_coincide(&v, pair)? {
            cond_iii = Some(
                Witness::new("(iii) °V = V° for G-optional V")
                    .at(t, w)
                    .value("°V", ov)
                    .value("V°", vo),
            );
            report.note("iii_failed_on_random_process", k);
        }
    }
    report.note("random_processes", options.random_processes);

    report.verdict("(i) F immersed in G", cond_i);
    report.verdict(
        "(ii) G-stopping times are F-pseudo-stopping",
        cond_ii.map_or(Verdict::pass(), Verdict::fail),
    );
    report.verdict(
        "(iii) °V = V° for G-optional V",
        cond_iii.map_or(Verdict::pass(), Verdict::fail),
    );
    Ok(report)
}

/// [`pseudo_h_check_with`] with exhaustive enumeration under `cap`.
pub fn pseudo_h_check(pair: &FilteredPair, cap: u64) -> Result<CheckReport> {
    pseudo_h_check_with(pair, &PseudoHOptions::enumerated(cap))
}
