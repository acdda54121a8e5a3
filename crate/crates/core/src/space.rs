//! Finite sample spaces, partitions and conditional expectation.
//!
//! A sub-σ-algebra of a finite space is represented by the partition into its
//! atoms. Every outcome has strictly positive mass, so conditional
//! expectations are defined pointwise and identities hold everywhere rather
//! than almost surely.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Outcomes `0..n` with strictly positive rational masses summing to one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SampleSpace {
    probs: Vec<Rational>,
}

impl SampleSpace {
    pub fn new(probs: Vec<Rational>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidSpace("sample space must be nonempty".into()));
        }
        if let Some(i) = probs.iter().position(|p| !p.is_positive()) {
            return Err(Error::InvalidSpace(format!(
                "probability of outcome {i} is {}, must be > 0",
                probs[i]
            )));
        }
        let total: Rational = probs.iter().sum();
        if total != Rational::ONE {
            return Err(Error::InvalidSpace(format!(
                "probabilities sum to {total}, must sum to 1"
            )));
        }
        Ok(SampleSpace { probs })
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0);
        SampleSpace {
            probs: vec![Rational::new(1, n as i128); n],
        }
    }

    /// Normalizes positive integer weights into probabilities.
    pub fn from_weights(weights: &[u64]) -> Result<Self> {
        let total: u64 = weights.iter().sum();
        if total == 0 {
            return Err(Error::InvalidSpace("weights sum to zero".into()));
        }
        let probs = weights
            .iter()
            .map(|&w| Rational::new(w as i128, total as i128))
            .collect();
        SampleSpace::new(probs)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn prob(&self, outcome: usize) -> Rational {
        self.probs[outcome]
    }

    pub fn expect(&self, x: &[Rational]) -> Result<Rational> {
        self.check_len(x.len())?;
        Ok(self.probs.iter().zip(x).map(|(p, v)| *p * *v).sum())
    }

    /// Mass of a set of outcomes.
    pub fn mass(&self, outcomes: &[usize]) -> Rational {
        outcomes.iter().map(|&w| self.probs[w]).sum()
    }

    pub(crate) fn check_len(&self, found: usize) -> Result<()> {
        if found != self.len() {
            return Err(Error::SizeMismatch {
                expected: self.len(),
                found,
            });
        }
        Ok(())
    }
}

/// Partition of `0..n` into nonempty disjoint blocks.
///
/// Stored canonically: each block sorted ascending, blocks ordered by their
/// smallest element. Two partitions are equal iff they generate the same
/// σ-algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    #[serde(skip)]
    block_of: Vec<usize>,
}

impl Partition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut owner = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition(format!("block {b} is empty")));
            }
            for &w in block {
                if w >= n {
                    return Err(Error::InvalidPartition(format!(
                        "outcome {w} out of range for {n} outcomes"
                    )));
                }
                if owner[w] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "outcome {w} appears in more than one block"
                    )));
                }
                owner[w] = b;
            }
        }
        if let Some(w) = owner.iter().position(|&b| b == usize::MAX) {
            return Err(Error::InvalidPartition(format!(
                "outcome {w} is not covered by any block"
            )));
        }
        Ok(Partition::from_labels(&owner))
    }

    /// Groups outcomes with equal labels.
    pub fn from_labels<L: PartialEq>(labels: &[L]) -> Self {
        let n = labels.len();
        let mut block_of = vec![usize::MAX; n];
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for w in 0..n {
            if block_of[w] != usize::MAX {
                continue;
            }
            let b = blocks.len();
            let members: Vec<usize> = (w..n)
                .filter(|&v| block_of[v] == usize::MAX && labels[v] == labels[w])
                .collect();
            for &v in &members {
                block_of[v] = b;
            }
            blocks.push(members);
        }
        Partition { blocks, block_of }
    }

    pub fn trivial(n: usize) -> Self {
        Partition::from_labels(&vec![0u8; n])
    }

    pub fn discrete(n: usize) -> Self {
        Partition::from_labels(&(0..n).collect::<Vec<_>>())
    }

    pub fn len(&self) -> usize {
        self.block_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block_of.is_empty()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_index(&self, outcome: usize) -> usize {
        self.block_of[outcome]
    }

    pub fn block_containing(&self, outcome: usize) -> &[usize] {
        &self.blocks[self.block_of[outcome]]
    }

    /// Common refinement with the level sets of `labels`.
    pub fn refine_by<L: PartialEq>(&self, labels: &[L]) -> Self {
        assert_eq!(labels.len(), self.len());
        let keyed: Vec<(usize, &L)> = (0..self.len())
            .map(|w| (self.block_of[w], &labels[w]))
            .collect();
        Partition::from_labels(&keyed)
    }

    /// Coarsest common refinement of two partitions.
    pub fn join(&self, other: &Partition) -> Self {
        self.refine_by(&other.block_of)
    }

    /// Whether `values` is constant on every block.
    pub fn is_measurable<T: PartialEq>(&self, values: &[T]) -> bool {
        self.first_non_measurable(values).is_none()
    }

    /// First outcome whose value differs from the value at the smallest
    /// outcome of its block.
    pub fn first_non_measurable<T: PartialEq>(&self, values: &[T]) -> Option<usize> {
        (0..self.len()).find(|&w| values[w] != values[self.blocks[self.block_of[w]][0]])
    }

    /// Whether every block of `self` lies inside a block of `coarse`.
    pub fn refines(&self, coarse: &Partition) -> Result<bool> {
        refines(self, coarse)
    }
}

/// True iff every block of `fine` is contained in some block of `coarse`.
pub fn refines(fine: &Partition, coarse: &Partition) -> Result<bool> {
    if fine.len() != coarse.len() {
        return Err(Error::SizeMismatch {
            expected: coarse.len(),
            found: fine.len(),
        });
    }
    Ok(fine.blocks.iter().all(|block| {
        let owner = coarse.block_of[block[0]];
        block.iter().all(|&w| coarse.block_of[w] == owner)
    }))
}

/// `E[x | σ(part)]`: on each block, the probability-weighted average of `x`.
pub fn cond_expect(x: &[Rational], part: &Partition, space: &SampleSpace) -> Result<Vec<Rational>> {
    space.check_len(x.len())?;
    space.check_len(part.len())?;
    let mut out = vec![Rational::ZERO; x.len()];
    for block in &part.blocks {
        let mass = space.mass(block);
        let weighted: Rational = block.iter().map(|&w| space.prob(w) * x[w]).sum();
        let avg = weighted / mass;
        for &w in block {
            out[w] = avg;
        }
    }
    Ok(out)
}

/// `P(set | σ(part))` for a set given by its indicator.
pub fn cond_prob(indicator: &[bool], part: &Partition, space: &SampleSpace) -> Result<Vec<Rational>> {
    let x: Vec<Rational> = indicator
        .iter()
        .map(|&b| if b { Rational::ONE } else { Rational::ZERO })
        .collect();
    cond_expect(&x, part, space)
}
