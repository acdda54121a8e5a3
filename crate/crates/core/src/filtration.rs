//! Discrete filtrations and the predicates built on them: adaptedness,
//! martingality, stopping times, honest times, and progressive enlargement.
//!
//! A filtration on the grid `0..=T` is a refining sequence of partitions.
//! `F_∞` is identified with `F_T`. Right-continuity and the usual conditions
//! carry no content on a finite grid with strictly positive masses.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::process::Process;
use crate::rational::Rational;
use crate::space::{cond_expect, refines, Partition, SampleSpace};
use crate::time::{RandomTime, Time};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Filtration {
    parts: Vec<Partition>,
}

impl Filtration {
    pub fn new(parts: Vec<Partition>) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Err(Error::InvalidFiltration("needs at least one partition".into()));
        };
        let n = first.len();
        for (t, part) in parts.iter().enumerate() {
            if part.len() != n {
                return Err(Error::InvalidFiltration(format!(
                    "partition at t={t} covers {} outcomes, expected {n}",
                    part.len()
                )));
            }
        }
        for t in 1..parts.len() {
            if !refines(&parts[t], &parts[t - 1])? {
                return Err(Error::InvalidFiltration(format!(
                    "partition at t={t} does not refine partition at t={}",
                    t - 1
                )));
            }
        }
        Ok(Filtration { parts })
    }

    /// Every `F_t` trivial.
    pub fn trivial(n: usize, horizon: usize) -> Self {
        Filtration {
            parts: vec![Partition::trivial(n); horizon + 1],
        }
    }

    pub fn horizon(&self) -> usize {
        self.parts.len() - 1
    }

    pub fn num_outcomes(&self) -> usize {
        self.parts[0].len()
    }

    pub fn parts(&self) -> &[Partition] {
        &self.parts
    }

    pub fn part(&self, t: usize) -> &Partition {
        &self.parts[t]
    }

    /// `F_∞ = F_T`.
    pub fn terminal(&self) -> &Partition {
        &self.parts[self.horizon()]
    }

    /// Whether `F_t ⊂ other_t` for every t, i.e. `other` refines `self`.
    pub fn is_contained_in(&self, other: &Filtration) -> Result<bool> {
        if self.horizon() != other.horizon() {
            return Ok(false);
        }
        for (f, g) in self.parts.iter().zip(&other.parts) {
            if !refines(g, f)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn check_process(&self, x: &Process) -> Result<()> {
        x.check_shape(self.horizon(), self.num_outcomes())
    }
}

/// A sample space with a filtration pair `F ⊂ G`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FilteredPair {
    pub space: SampleSpace,
    pub f: Filtration,
    pub g: Filtration,
}

impl FilteredPair {
    pub fn new(space: SampleSpace, f: Filtration, g: Filtration) -> Result<Self> {
        if f.num_outcomes() != space.len() || g.num_outcomes() != space.len() {
            return Err(Error::SizeMismatch {
                expected: space.len(),
                found: if f.num_outcomes() != space.len() {
                    f.num_outcomes()
                } else {
                    g.num_outcomes()
                },
            });
        }
        if f.horizon() != g.horizon() {
            return Err(Error::InvalidFiltration(format!(
                "horizons differ: F has {}, G has {}",
                f.horizon(),
                g.horizon()
            )));
        }
        for t in 0..=f.horizon() {
            if !refines(g.part(t), f.part(t))? {
                return Err(Error::InvalidFiltration(format!(
                    "G at t={t} does not refine F at t={t}"
                )));
            }
        }
        Ok(FilteredPair { space, f, g })
    }

    pub fn horizon(&self) -> usize {
        self.f.horizon()
    }
}

/// `X_t` constant on every block of `F_t`. Returns the first violation.
pub fn first_adaptedness_violation(x: &Process, f: &Filtration) -> Result<Option<(usize, usize)>> {
    f.check_process(x)?;
    Ok((0..=f.horizon()).find_map(|t| f.part(t).first_non_measurable(x.at(t)).map(|w| (t, w))))
}

pub fn is_adapted(x: &Process, f: &Filtration) -> Result<bool> {
    Ok(first_adaptedness_violation(x, f)?.is_none())
}

/// A failed martingale step `E[X_t | F_{t-1}](ω) ≠ X_{t-1}(ω)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MartingaleViolation {
    pub time: usize,
    pub outcome: usize,
    pub conditional: Rational,
    pub previous: Rational,
}

/// First `(t, ω)` where the one-step martingale identity fails. `x` must be
/// adapted to `f`.
pub fn first_martingale_violation(
    x: &Process,
    f: &Filtration,
    space: &SampleSpace,
) -> Result<Option<MartingaleViolation>> {
    if let Some((time, outcome)) = first_adaptedness_violation(x, f)? {
        return Err(Error::NotAdapted { time, outcome });
    }
    for t in 1..=f.horizon() {
        let conditional = cond_expect(x.at(t), f.part(t - 1), space)?;
        if let Some(w) = (0..space.len()).find(|&w| conditional[w] != x.get(t - 1, w)) {
            return Ok(Some(MartingaleViolation {
                time: t,
                outcome: w,
                conditional: conditional[w],
                previous: x.get(t - 1, w),
            }));
        }
    }
    Ok(None)
}

pub fn is_martingale(x: &Process, f: &Filtration, space: &SampleSpace) -> Result<bool> {
    Ok(first_martingale_violation(x, f, space)?.is_none())
}

/// `{τ = t}` is a union of `F_t`-blocks for every `t ≤ T`.
pub fn is_stopping_time(tau: &RandomTime, f: &Filtration) -> bool {
    first_stopping_violation(tau, f).is_none()
}

/// First `(t, ω)` where `1{τ = t}` is not `F_t`-measurable.
pub fn first_stopping_violation(tau: &RandomTime, f: &Filtration) -> Option<(usize, usize)> {
    (0..=f.horizon()).find_map(|t| {
        f.part(t)
            .first_non_measurable(&tau.indicator_eq(t))
            .map(|w| (t, w))
    })
}

/// `F^τ`: each `F_t` refined by the events `{τ = s}`, `s ≤ t`, and `{τ > t}`.
pub fn progressive_enlargement(f: &Filtration, tau: &RandomTime) -> Filtration {
    let parts = (0..=f.horizon())
        .map(|t| {
            let labels: Vec<Option<usize>> = tau
                .values()
                .iter()
                .map(|v| v.finite().filter(|&s| s <= t))
                .collect();
            f.part(t).refine_by(&labels)
        })
        .collect();
    Filtration { parts }
}

/// One closed martingale `M^B_t = P(B | F_t)` per block `B` of `F_T`, in
/// block order.
pub fn basis_martingales(f: &Filtration, space: &SampleSpace) -> Result<Vec<Process>> {
    space.check_len(f.num_outcomes())?;
    f.terminal()
        .blocks()
        .iter()
        .map(|block| {
            let mut terminal = vec![Rational::ZERO; space.len()];
            for &w in block {
                terminal[w] = Rational::ONE;
            }
            closed_martingale(&terminal, f, space)
        })
        .collect()
}

/// `M_t = E[ξ | F_t]`.
pub fn closed_martingale(terminal: &[Rational], f: &Filtration, space: &SampleSpace) -> Result<Process> {
    let rows = (0..=f.horizon())
        .map(|t| cond_expect(terminal, f.part(t), space))
        .collect::<Result<Vec<_>>>()?;
    Process::new(rows)
}

/// Honest-time test: for every `t` in `1..=T+1` and every block `C` of
/// `F_{min(t,T)}`, `τ` is constant on `C ∩ {τ < t}`. The level `t = T+1`
/// stands for `t = ∞`.
pub fn is_honest(tau: &RandomTime, f: &Filtration) -> bool {
    first_honesty_violation(tau, f).is_none()
}

/// First `(t, ω, ω')` with `ω, ω'` in one `F_{min(t,T)}`-block, both in
/// `{τ < t}`, and `τ(ω) ≠ τ(ω')`. `t = T+1` encodes infinity.
pub fn first_honesty_violation(tau: &RandomTime, f: &Filtration) -> Option<(usize, usize, usize)> {
    let horizon = f.horizon();
    for t in 1..=horizon + 1 {
        let part = f.part(t.min(horizon));
        for block in part.blocks() {
            let mut seen: Option<(usize, Time)> = None;
            for &w in block {
                let v = tau.at(w);
                if !v.lt(t) {
                    continue;
                }
                match seen {
                    None => seen = Some((w, v)),
                    Some((w0, v0)) if v0 != v => return Some((t, w0, w)),
                    Some(_) => {}
                }
            }
        }
    }
    None
}
