//! Real-valued processes on the grid `0..=T`, one row per time.
//!
//! Conventions: `X_{-1} = 0` and `X_∞ = X_T`.

use std::ops::{Add, Sub};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::time::RandomTime;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Process {
    rows: Vec<Vec<Rational>>,
}

impl Process {
    /// `rows[t][ω]`; requires at least one row and equal row lengths.
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::Dimension("process needs at least one time row".into()));
        };
        let n = first.len();
        if let Some(t) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::Dimension(format!(
                "row {t} has {} entries, expected {n}",
                rows[t].len()
            )));
        }
        Ok(Process { rows })
    }

    pub fn zeros(horizon: usize, n: usize) -> Self {
        Process::constant(horizon, n, Rational::ZERO)
    }

    pub fn constant(horizon: usize, n: usize, value: Rational) -> Self {
        Process {
            rows: vec![vec![value; n]; horizon + 1],
        }
    }

    pub fn from_fn(horizon: usize, n: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        Process {
            rows: (0..=horizon).map(|t| (0..n).map(|w| f(t, w)).collect()).collect(),
        }
    }

    /// `A_t = 1{τ ≤ t}`, the indicator process of `[τ, ∞)`.
    pub fn indicator_from(tau: &RandomTime, horizon: usize) -> Self {
        Process::from_fn(horizon, tau.len(), |t, w| {
            if tau.at(w).le(t) {
                Rational::ONE
            } else {
                Rational::ZERO
            }
        })
    }

    pub fn horizon(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn num_outcomes(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn at(&self, t: usize) -> &[Rational] {
        &self.rows[t]
    }

    pub fn get(&self, t: usize, outcome: usize) -> Rational {
        self.rows[t][outcome]
    }

    /// `X_{t-1}`, zero at `t = 0`.
    pub fn prev(&self, t: usize) -> Vec<Rational> {
        if t == 0 {
            vec![Rational::ZERO; self.num_outcomes()]
        } else {
            self.rows[t - 1].clone()
        }
    }

    /// Left-shifted process `X_-`, with `(X_-)_t = X_{t-1}` and `(X_-)_0 = 0`.
    pub fn left_limit(&self) -> Process {
        Process {
            rows: (0..=self.horizon()).map(|t| self.prev(t)).collect(),
        }
    }

    /// `ΔX_t = X_t - X_{t-1}` with `ΔX_0 = X_0`.
    pub fn increments(&self) -> Process {
        Process::from_fn(self.horizon(), self.num_outcomes(), |t, w| {
            let prev = if t == 0 { Rational::ZERO } else { self.rows[t - 1][w] };
            self.rows[t][w] - prev
        })
    }

    /// Running sum of rows; inverse of [`Process::increments`].
    pub fn cumulative(increments: &Process) -> Process {
        let mut rows = increments.rows.clone();
        for t in 1..rows.len() {
            for w in 0..rows[t].len() {
                let prev = rows[t - 1][w];
                rows[t][w] += prev;
            }
        }
        Process { rows }
    }

    /// First `(t, ω)` where some path decreases (including below 0 at `t=0`
    /// relative to `X_{-1} = 0`); `None` for nondecreasing processes.
    pub fn first_decrease(&self) -> Option<(usize, usize)> {
        for t in 0..=self.horizon() {
            for w in 0..self.num_outcomes() {
                let prev = if t == 0 { Rational::ZERO } else { self.rows[t - 1][w] };
                if self.rows[t][w] < prev {
                    return Some((t, w));
                }
            }
        }
        None
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.first_decrease().is_none()
    }

    pub(crate) fn require_nondecreasing(&self) -> Result<()> {
        match self.first_decrease() {
            Some((time, outcome)) => Err(Error::NotMonotone { time, outcome }),
            None => Ok(()),
        }
    }

    /// Pathwise non-increase in `t` (no comparison against `X_{-1}`).
    pub fn first_increase(&self) -> Option<(usize, usize)> {
        for t in 1..=self.horizon() {
            for w in 0..self.num_outcomes() {
                if self.rows[t][w] > self.rows[t - 1][w] {
                    return Some((t, w));
                }
            }
        }
        None
    }

    /// `X_τ` pathwise, with `X_∞ = X_T`.
    pub fn value_at(&self, tau: &RandomTime) -> Vec<Rational> {
        (0..self.num_outcomes())
            .map(|w| self.rows[tau.at(w).clamp(self.horizon())][w])
            .collect()
    }

    /// Stopped process `X^τ_t = X_{t ∧ τ}`.
    pub fn stopped(&self, tau: &RandomTime) -> Process {
        Process::from_fn(self.horizon(), self.num_outcomes(), |t, w| {
            let s = tau.at(w).clamp(self.horizon()).min(t);
            self.rows[s][w]
        })
    }

    pub fn is_constant(&self, value: Rational) -> bool {
        self.rows.iter().flatten().all(|v| *v == value)
    }

    /// First `(t, ω)` where `self` and `other` differ.
    pub fn first_difference(&self, other: &Process) -> Option<(usize, usize)> {
        for t in 0..=self.horizon() {
            for w in 0..self.num_outcomes() {
                if self.rows[t][w] != other.rows[t][w] {
                    return Some((t, w));
                }
            }
        }
        None
    }

    pub fn scale(&self, c: Rational) -> Process {
        Process {
            rows: self.rows.iter().map(|r| r.iter().map(|v| *v * c).collect()).collect(),
        }
    }

    pub(crate) fn check_shape(&self, horizon: usize, n: usize) -> Result<()> {
        if self.horizon() != horizon || self.num_outcomes() != n {
            return Err(Error::Dimension(format!(
                "process is {}x{}, expected {}x{}",
                self.horizon() + 1,
                self.num_outcomes(),
                horizon + 1,
                n
            )));
        }
        Ok(())
    }
}

fn zip_rows(a: &Process, b: &Process, op: impl Fn(Rational, Rational) -> Rational) -> Process {
    assert_eq!(a.horizon(), b.horizon(), "process horizons differ");
    assert_eq!(a.num_outcomes(), b.num_outcomes(), "process sizes differ");
    Process {
        rows: a
            .rows
            .iter()
            .zip(&b.rows)
            .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| op(*x, *y)).collect())
            .collect(),
    }
}

impl Add for &Process {
    type Output = Process;
    fn add(self, rhs: &Process) -> Process {
        zip_rows(self, rhs, |x, y| x + y)
    }
}

impl Sub for &Process {
    type Output = Process;
    fn sub(self, rhs: &Process) -> Process {
        zip_rows(self, rhs, |x, y| x - y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn indicator_and_stopping() {
        let tau = RandomTime::from_options(&[Some(1), Some(2), None, Some(0)]);
        let a = Process::indicator_from(&tau, 2);
        assert_eq!(a.at(0), &[0, 0, 0, 1].map(Rational::from));
        assert_eq!(a.at(1), &[1, 0, 0, 1].map(Rational::from));
        assert_eq!(a.at(2), &[1, 1, 0, 1].map(Rational::from));

        let x = Process::from_fn(2, 4, |t, w| Rational::from((10 * t + w) as i64));
        assert_eq!(x.value_at(&tau), [10, 21, 22, 3].map(Rational::from).to_vec());
        let stopped = x.stopped(&tau);
        assert_eq!(stopped.at(2), &[10, 21, 22, 3].map(Rational::from));
        assert_eq!(stopped.at(0), x.at(0));
    }

    #[test]
    fn increments_roundtrip() {
        let x = Process::from_fn(3, 2, |t, w| rat((t * t) as i128 + w as i128, 3));
        assert_eq!(Process::cumulative(&x.increments()), x);
        assert_eq!(x.left_limit().at(0), &[Rational::ZERO; 2]);
        assert_eq!(x.left_limit().at(2), x.at(1));
    }

    #[test]
    fn monotonicity() {
        let up = Process::from_fn(2, 2, |t, _| Rational::from(t));
        assert!(up.is_nondecreasing());
        let neg = Process::constant(2, 2, Rational::from(-1));
        assert_eq!(neg.first_decrease(), Some((0, 0)));
        let down = Process::from_fn(2, 2, |t, w| Rational::from(if w == 1 && t == 2 { 0 } else { 1 }));
        assert_eq!(down.first_decrease(), Some((2, 1)));
        assert!(Process::new(vec![vec![Rational::ONE], vec![]]).is_err());
    }
}
