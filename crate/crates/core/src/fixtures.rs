//! Small hand-checkable instances on four equally likely outcomes, `T = 2`.
//!
//! * `fix_a`: `F = (trivial, {{0,1},{2,3}}, {{0,1},{2,3}})`,
//!   `G = (trivial, discrete, discrete)`. `F` is immersed in `G`.
//! * `fix_b`: as `fix_a` but `F_2` discrete. `F` is not immersed in `G`.
//! * `fix_c_time`: `(1, 2, ∞, 1)`, pseudo-stopping for `fix_a`'s `F` and a
//!   `G`-stopping time.
//! * `fix_d_time`: `(2, 1, 1, 2)`, honest for `fix_b`'s `F` but neither a
//!   stopping time nor pseudo-stopping.

use crate::filtration::{FilteredPair, Filtration};
use crate::space::{Partition, SampleSpace};
use crate::time::RandomTime;

fn halves() -> Partition {
    Partition::new(4, vec![vec![0, 1], vec![2, 3]]).expect("valid partition")
}

fn g4() -> Filtration {
    Filtration::new(vec![
        Partition::trivial(4),
        Partition::discrete(4),
        Partition::discrete(4),
    ])
    .expect("valid filtration")
}

pub fn fix_a() -> (SampleSpace, Filtration, Filtration) {
    let f = Filtration::new(vec![Partition::trivial(4), halves(), halves()]).expect("valid filtration");
    (SampleSpace::uniform(4), f, g4())
}

pub fn fix_b() -> (SampleSpace, Filtration, Filtration) {
    let f = Filtration::new(vec![Partition::trivial(4), halves(), Partition::discrete(4)])
        .expect("valid filtration");
    (SampleSpace::uniform(4), f, g4())
}

pub fn fix_a_pair() -> FilteredPair {
    let (space, f, g) = fix_a();
    FilteredPair::new(space, f, g).expect("valid pair")
}

pub fn fix_b_pair() -> FilteredPair {
    let (space, f, g) = fix_b();
    FilteredPair::new(space, f, g).expect("valid pair")
}

pub fn fix_c_time() -> RandomTime {
    RandomTime::from_options(&[Some(1), Some(2), None, Some(1)])
}

pub fn fix_d_time() -> RandomTime {
    RandomTime::from_options(&[Some(2), Some(1), Some(1), Some(2)])
}

/// `(1, 2, 2, 2)`: a `G`-stopping time that is not pseudo-stopping for
/// `fix_b`'s `F`.
pub fn fix_b_witness_time() -> RandomTime {
    RandomTime::from_options(&[Some(1), Some(2), Some(2), Some(2)])
}
