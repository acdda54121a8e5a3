//! Exhaustive enumeration of the stopping times of a finite filtration.
//!
//! A stopping time is built by walking the atom tree of the filtration: at
//! each node `(t, B)` with `B` a block of `F_t`, either stop the whole block
//! at `t` or hand every child block of `F_{t+1}` its own decision. At `T`
//! the choices are `T` or `∞`. Every stopping time corresponds to exactly one
//! choice sequence, so the walk emits each once.

use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::filtration::Filtration;
use crate::time::{RandomTime, Time};

/// Block indices of `F_{t+1}` inside each block of `F_t`.
fn children_table(f: &Filtration) -> Vec<Vec<Vec<usize>>> {
    (0..f.horizon())
        .map(|t| {
            let fine = f.part(t + 1);
            f.part(t)
                .blocks()
                .iter()
                .map(|block| {
                    let mut kids: Vec<usize> = block.iter().map(|&w| fine.block_index(w)).collect();
                    kids.sort_unstable();
                    kids.dedup();
                    kids
                })
                .collect()
        })
        .collect()
}

/// Number of `F`-stopping times, saturating at `u128::MAX`.
pub fn count_stopping_times(f: &Filtration) -> u128 {
    let horizon = f.horizon();
    let children = children_table(f);
    let mut counts: Vec<u128> = vec![2; f.part(horizon).num_blocks()];
    for t in (0..horizon).rev() {
        counts = children[t]
            .iter()
            .map(|kids| {
                kids.iter()
                    .fold(1u128, |acc, &k| acc.saturating_mul(counts[k]))
                    .saturating_add(1)
            })
            .collect();
    }
    counts
        .iter()
        .fold(1u128, |acc, &c| acc.saturating_mul(c))
}

struct Walker<'a, F> {
    f: &'a Filtration,
    children: Vec<Vec<Vec<usize>>>,
    values: Vec<Time>,
    visit: F,
}

impl<F> Walker<'_, F>
where
    F: FnMut(&RandomTime) -> ControlFlow<()>,
{
    fn assign(&mut self, t: usize, block: usize, value: Time) {
        for &w in &self.f.part(t).blocks()[block] {
            self.values[w] = value;
        }
    }

    /// `frontier` holds undecided nodes; `pos` is the next one to decide.
    fn walk(&mut self, frontier: &mut Vec<(usize, usize)>, pos: usize) -> ControlFlow<()> {
        if pos == frontier.len() {
            let tau = RandomTime::new(self.values.clone());
            return (self.visit)(&tau);
        }
        let (t, block) = frontier[pos];
        if t == self.f.horizon() {
            for value in [Time::At(t), Time::Infinite] {
                self.assign(t, block, value);
                self.walk(frontier, pos + 1)?;
            }
            return ControlFlow::Continue(());
        }
        self.assign(t, block, Time::At(t));
        self.walk(frontier, pos + 1)?;

        let kids = self.children[t][block].clone();
        let saved = frontier[pos];
        frontier.splice(pos..=pos, kids.iter().map(|&k| (t + 1, k)));
        let flow = self.walk(frontier, pos);
        frontier.splice(pos..pos + kids.len(), std::iter::once(saved));
        flow
    }
}

/// Calls `visit` on every `F`-stopping time until it breaks. Fails up front
/// with [`Error::CapExceeded`] if there are more than `cap`.
pub fn for_each_stopping_time<F>(f: &Filtration, cap: u64, visit: F) -> Result<u64>
where
    F: FnMut(&RandomTime) -> ControlFlow<()>,
{
    let count = count_stopping_times(f);
    if count > cap as u128 {
        return Err(Error::CapExceeded { cap, count });
    }
    let mut emitted = 0u64;
    let mut visit = visit;
    let mut walker = Walker {
        f,
        children: children_table(f),
        values: vec![Time::Infinite; f.num_outcomes()],
        visit: |tau: &RandomTime| {
            emitted += 1;
            visit(tau)
        },
    };
    let mut frontier: Vec<(usize, usize)> = (0..f.part(0).num_blocks()).map(|b| (0, b)).collect();
    let _ = walker.walk(&mut frontier, 0);
    Ok(emitted)
}

/// All `F`-stopping times in walk order.
pub fn enumerate_stopping_times(f: &Filtration, cap: u64) -> Result<Vec<RandomTime>> {
    let mut out = Vec::new();
    for_each_stopping_time(f, cap, |tau| {
        out.push(tau.clone());
        ControlFlow::Continue(())
    })?;
    Ok(out)
}
