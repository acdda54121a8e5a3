//! Seeded random instances for fuzzing the theorem checks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtration::{FilteredPair, Filtration};
use crate::lab::enumerate::count_stopping_times;
use crate::lab::immersion::random_stopping_time;
use crate::process::Process;
use crate::rational::Rational;
use crate::space::{Partition, SampleSpace};
use crate::time::{RandomTime, Time};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Random `F ⊂ G` and an arbitrary random time.
    Free,
    /// As `Free`, with the random time a `G`-stopping time.
    Refining,
    /// Product space: `F` from the first coordinate, `G = F ∨ H` with `H` from
    /// the independent second coordinate, and a `G`-stopping time. Immersion
    /// holds by construction.
    ProductImmersed,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Free, Mode::Refining, Mode::ProductImmersed];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Free => "free",
            Mode::Refining => "refining",
            Mode::ProductImmersed => "product_immersed",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free" => Ok(Mode::Free),
            "refining" => Ok(Mode::Refining),
            "product_immersed" => Ok(Mode::ProductImmersed),
            other => Err(Error::InvalidParameter(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GeneratorParams {
    pub omega_max: usize,
    pub horizon_max: usize,
    pub mode: Mode,
    pub seed: u64,
    /// Upper bound on the number of `G`-stopping times of a generated pair,
    /// so that exhaustive enumeration stays under the campaign's cap.
    pub max_stopping_times: u64,
}

impl GeneratorParams {
    pub fn new(omega_max: usize, horizon_max: usize, mode: Mode, seed: u64) -> Self {
        GeneratorParams {
            omega_max,
            horizon_max,
            mode,
            seed,
            max_stopping_times: 100_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.omega_max < 2 {
            return Err(Error::InvalidParameter("omega_max must be at least 2".into()));
        }
        if self.horizon_max < 1 {
            return Err(Error::InvalidParameter("horizon_max must be at least 1".into()));
        }
        if self.max_stopping_times < 2 {
            return Err(Error::InvalidParameter("max_stopping_times must be at least 2".into()));
        }
        Ok(())
    }
}

/// Splits each block in two with probability `split`.
fn random_refinement(part: &Partition, split: f64, rng: &mut impl Rng) -> Partition {
    let mut labels = vec![0u8; part.len()];
    for block in part.blocks() {
        if block.len() < 2 || !rng.gen_bool(split) {
            continue;
        }
        let mut members = block.clone();
        members.shuffle(rng);
        let cut = rng.gen_range(1..members.len());
        for &w in &members[cut..] {
            labels[w] = 1;
        }
    }
    part.refine_by(&labels)
}

fn random_filtration(n: usize, horizon: usize, split: f64, rng: &mut impl Rng) -> Filtration {
    let mut parts = Vec::with_capacity(horizon + 1);
    let start = if rng.gen_bool(0.75) {
        Partition::trivial(n)
    } else {
        random_refinement(&Partition::trivial(n), 1.0, rng)
    };
    parts.push(start);
    for t in 1..=horizon {
        let next = random_refinement(&parts[t - 1], split, rng);
        parts.push(next);
    }
    Filtration::new(parts).expect("refinements refine")
}

fn join(f: &Filtration, h: &Filtration) -> Filtration {
    Filtration::new(f.parts().iter().zip(h.parts()).map(|(a, b)| a.join(b)).collect())
        .expect("join of filtrations is a filtration")
}

fn random_weights(n: usize, rng: &mut impl Rng) -> Vec<u64> {
    (0..n).map(|_| rng.gen_range(1..=4)).collect()
}

/// Draws filtrations from `make` with a decreasing split probability until
/// the stopping-time count fits.
fn fitting_filtration(
    max: u64,
    rng: &mut ChaCha8Rng,
    mut make: impl FnMut(f64, &mut ChaCha8Rng) -> Filtration,
) -> Filtration {
    let mut split = rng.gen_range(0.2..0.8);
    loop {
        let f = make(split, rng);
        if count_stopping_times(&f) <= max as u128 {
            return f;
        }
        split *= 0.7;
    }
}

fn random_time(n: usize, horizon: usize, rng: &mut impl Rng) -> RandomTime {
    RandomTime::new(
        (0..n)
            .map(|_| {
                let v = rng.gen_range(0..=horizon + 1);
                if v > horizon {
                    Time::Infinite
                } else {
                    Time::At(v)
                }
            })
            .collect(),
    )
}

/// Deterministic in `params.seed`.
pub fn gen_random_instance(params: &GeneratorParams) -> Result<(FilteredPair, RandomTime)> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let horizon = rng.gen_range(1..=params.horizon_max);
    let max = params.max_stopping_times;

    match params.mode {
        Mode::Free | Mode::Refining => {
            let n = rng.gen_range(2..=params.omega_max);
            let space = SampleSpace::from_weights(&random_weights(n, &mut rng))?;
            let f = fitting_filtration(max, &mut rng, |s, r| random_filtration(n, horizon, s, r));
            let g = fitting_filtration(max, &mut rng, |s, r| join(&f, &random_filtration(n, horizon, s, r)));
            let pair = FilteredPair::new(space, f, g)?;
            let tau = if params.mode == Mode::Free {
                random_time(n, horizon, &mut rng)
            } else {
                random_stopping_time(&pair, &mut rng)
            };
            Ok((pair, tau))
        }
        Mode::ProductImmersed => {
            let n1 = rng.gen_range(1..=params.omega_max / 2);
            let lo = if n1 == 1 { 2 } else { 1 };
            let n2 = rng.gen_range(lo..=(params.omega_max / n1).max(lo));
            let n = n1 * n2;
            let w1 = random_weights(n1, &mut rng);
            let w2 = random_weights(n2, &mut rng);
            let weights: Vec<u64> = (0..n).map(|w| w1[w / n2] * w2[w % n2]).collect();
            let space = SampleSpace::from_weights(&weights)?;

            let lift = |part: &Partition, coord: fn(usize, usize) -> usize| {
                let labels: Vec<usize> = (0..n).map(|w| part.block_index(coord(w, n2))).collect();
                Partition::from_labels(&labels)
            };
            let lift_filtration = |base: &Filtration, coord: fn(usize, usize) -> usize| {
                Filtration::new(base.parts().iter().map(|p| lift(p, coord)).collect())
                    .expect("lifted filtration")
            };
            let f = fitting_filtration(max, &mut rng, |s, r| {
                lift_filtration(&random_filtration(n1, horizon, s, r), |w, n2| w / n2)
            });
            let g = fitting_filtration(max, &mut rng, |s, r| {
                join(&f, &lift_filtration(&random_filtration(n2, horizon, s, r), |w, n2| w % n2))
            });
            let pair = FilteredPair::new(space, f, g)?;
            let tau = random_stopping_time(&pair, &mut rng);
            Ok((pair, tau))
        }
    }
}

/// Random raw (not necessarily adapted) nondecreasing process with small
/// rational increments.
pub fn random_raw_increasing(horizon: usize, n: usize, rng: &mut impl Rng) -> Process {
    let increments = Process::from_fn(horizon, n, |_, _| {
        if rng.gen_bool(0.4) {
            Rational::ZERO
        } else {
            Rational::new(rng.gen_range(1..=4), rng.gen_range(1..=3))
        }
    });
    Process::cumulative(&increments)
}
