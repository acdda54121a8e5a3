//! Invariants of the finite-space machinery on generated instances, checked
//! against brute-force oracles written from the definitions.

use proptest::prelude::*;
use pseudostop_core::filtration::{
    basis_martingales, is_martingale, is_stopping_time, progressive_enlargement,
};
use pseudostop_core::lab::{
    count_stopping_times, enumerate_stopping_times, gen_random_instance, is_immersed, GeneratorParams, Mode,
};
use pseudostop_core::projections::{azema_bundle, dual_optional_projection, hloc_check, optional_projection};
use pseudostop_core::space::cond_expect;
use pseudostop_core::{FilteredPair, Filtration, Process, RandomTime, Rational, SampleSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64, mode: Mode) -> (FilteredPair, RandomTime) {
    let mut params = GeneratorParams::new(6, 3, mode, seed);
    params.max_stopping_times = 5_000;
    gen_random_instance(&params).expect("valid generator parameters")
}

fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.gen_range(-6..=6), rng.gen_range(1..=4))
}

fn random_process(horizon: usize, n: usize, rng: &mut ChaCha8Rng) -> Process {
    Process::from_fn(horizon, n, |_, _| small_rational(rng))
}

fn random_increasing(horizon: usize, n: usize, rng: &mut ChaCha8Rng) -> Process {
    let jumps = Process::from_fn(horizon, n, |_, _| Rational::new(rng.gen_range(0..=3), rng.gen_range(1..=3)));
    Process::cumulative(&jumps)
}

/// `E[X | block of ω]` computed by summing over the block.
fn block_average(x: &[Rational], blocks: &[Vec<usize>], space: &SampleSpace, w: usize) -> Rational {
    let block = blocks.iter().find(|b| b.contains(&w)).expect("partition covers ω");
    let mass: Rational = block.iter().map(|&v| space.prob(v)).sum();
    let weighted: Rational = block.iter().map(|&v| space.prob(v) * x[v]).sum();
    weighted / mass
}

fn expectation(x: &[Rational], space: &SampleSpace) -> Rational {
    (0..space.len()).map(|w| space.prob(w) * x[w]).sum()
}

fn mode() -> impl Strategy<Value = Mode> {
    prop_oneof![Just(Mode::Free), Just(Mode::Refining), Just(Mode::ProductImmersed)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn tower_property(seed in any::<u64>(), mode in mode()) {
        let (pair, _) = instance(seed, mode);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<Rational> = (0..pair.space.len()).map(|_| small_rational(&mut rng)).collect();
        let f = &pair.f;
        for t in 0..=f.horizon() {
            let inner = cond_expect(&x, f.part(t), &pair.space).unwrap();
            for s in 0..=t {
                let outer = cond_expect(&inner, f.part(s), &pair.space).unwrap();
                prop_assert_eq!(&outer, &cond_expect(&x, f.part(s), &pair.space).unwrap());
            }
            prop_assert_eq!(expectation(&inner, &pair.space), expectation(&x, &pair.space));
        }
    }

    #[test]
    fn basis_martingales_are_martingales_summing_to_one(seed in any::<u64>(), mode in mode()) {
        let (pair, _) = instance(seed, mode);
        let basis = basis_martingales(&pair.f, &pair.space).unwrap();
        prop_assert_eq!(basis.len(), pair.f.terminal().num_blocks());
        for m in &basis {
            prop_assert!(is_martingale(m, &pair.f, &pair.space).unwrap());
        }
        for t in 0..=pair.horizon() {
            for w in 0..pair.space.len() {
                let total: Rational = basis.iter().map(|m| m.get(t, w)).sum();
                prop_assert_eq!(total, Rational::ONE);
            }
        }
    }

    #[test]
    fn progressive_enlargement_makes_tau_stopping(seed in any::<u64>(), mode in mode()) {
        let (pair, tau) = instance(seed, mode);
        let enlarged = progressive_enlargement(&pair.f, &tau);
        prop_assert!(is_stopping_time(&tau, &enlarged));
        prop_assert!(pair.f.is_contained_in(&enlarged).unwrap());
        if is_stopping_time(&tau, &pair.f) {
            prop_assert_eq!(&enlarged, &pair.f);
        }
    }

    #[test]
    fn optional_projection_matches_block_averages(seed in any::<u64>(), mode in mode()) {
        let (pair, _) = instance(seed, mode);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let v = random_process(pair.horizon(), pair.space.len(), &mut rng);
        let ov = optional_projection(&v, &pair.f, &pair.space).unwrap();
        for t in 0..=pair.horizon() {
            for w in 0..pair.space.len() {
                let oracle = block_average(v.at(t), pair.f.part(t).blocks(), &pair.space, w);
                prop_assert_eq!(ov.get(t, w), oracle);
            }
        }
    }

    #[test]
    fn projections_are_linear(seed in any::<u64>(), mode in mode()) {
        let (pair, _) = instance(seed, mode);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
        let (h, n) = (pair.horizon(), pair.space.len());
        let (f, space) = (&pair.f, &pair.space);
        let combine = |c: Rational, v: &Process, w: &Process| Process::from_fn(h, n, |t, x| c * v.get(t, x) + w.get(t, x));

        let v = random_process(h, n, &mut rng);
        let w = random_process(h, n, &mut rng);
        let c = small_rational(&mut rng);
        let lhs = optional_projection(&combine(c, &v, &w), f, space).unwrap();
        let rhs = combine(c, &optional_projection(&v, f, space).unwrap(), &optional_projection(&w, f, space).unwrap());
        prop_assert_eq!(lhs, rhs);

        let v = random_increasing(h, n, &mut rng);
        let w = random_increasing(h, n, &mut rng);
        let c = small_rational(&mut rng).abs();
        let lhs = dual_optional_projection(&combine(c, &v, &w), f, space).unwrap();
        let rhs = combine(
            c,
            &dual_optional_projection(&v, f, space).unwrap(),
            &dual_optional_projection(&w, f, space).unwrap(),
        );
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn dual_optional_projection_preserves_terminal_mean(seed in any::<u64>(), mode in mode()) {
        let (pair, _) = instance(seed, mode);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 3);
        let v = random_increasing(pair.horizon(), pair.space.len(), &mut rng);
        let vo = dual_optional_projection(&v, &pair.f, &pair.space).unwrap();
        let h = pair.horizon();
        prop_assert_eq!(expectation(vo.at(h), &pair.space), expectation(v.at(h), &pair.space));
        prop_assert!(vo.is_nondecreasing());
        let increments = v.increments();
        let vo_increments = vo.increments();
        for t in 0..=h {
            for w in 0..pair.space.len() {
                let oracle = block_average(increments.at(t), pair.f.part(t).blocks(), &pair.space, w);
                prop_assert_eq!(vo_increments.get(t, w), oracle);
            }
        }
    }

    #[test]
    fn hloc_agrees_on_raw_increasing_processes(seed in any::<u64>(), mode in mode()) {
        let (pair, tau) = instance(seed, mode);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 4);
        let v = random_increasing(pair.horizon(), pair.space.len(), &mut rng);
        prop_assert!(hloc_check(&v, &pair.f, &pair.space).unwrap().agree);
        let a = Process::indicator_from(&tau, pair.horizon());
        prop_assert!(hloc_check(&a, &pair.f, &pair.space).unwrap().agree);
    }

    #[test]
    fn azema_bundle_identities(seed in any::<u64>(), mode in mode()) {
        let (pair, tau) = instance(seed, mode);
        let (f, space) = (&pair.f, &pair.space);
        let b = azema_bundle(&tau, f, space).unwrap();
        let (h, n) = (pair.horizon(), space.len());
        prop_assert_eq!(&b.z, &Process::from_fn(h, n, |t, w| b.m.get(t, w) - b.ao.get(t, w)));
        for t in 1..=h {
            for w in 0..n {
                prop_assert_eq!(b.z_tilde.get(t, w), b.m.get(t, w) - b.ao.get(t - 1, w));
            }
        }
        prop_assert!(is_martingale(&b.m, f, space).unwrap());
        prop_assert!(is_martingale(&b.n, f, space).unwrap());
        prop_assert!(b.m.at(0).iter().all(|&x| x == Rational::ONE));
        let finite: Vec<usize> = (0..n).filter(|&w| tau.at(w).is_finite()).collect();
        prop_assert_eq!(expectation(b.ao.at(h), space), space.mass(&finite));
    }

    #[test]
    fn generator_modes_meet_their_contracts(seed in any::<u64>()) {
        let (pair, tau) = instance(seed, Mode::Refining);
        prop_assert!(is_stopping_time(&tau, &pair.g));
        let (pair, tau) = instance(seed, Mode::ProductImmersed);
        prop_assert!(is_immersed(&pair).unwrap().holds);
        prop_assert!(is_stopping_time(&tau, &pair.g));
        for mode in Mode::ALL {
            let (pair, tau) = instance(seed, mode);
            prop_assert!(pair.f.is_contained_in(&pair.g).unwrap());
            prop_assert!(tau.validate(pair.space.len(), pair.horizon()).is_ok());
            prop_assert!(count_stopping_times(&pair.g) <= 5_000);
        }
    }

    #[test]
    fn stopping_time_count_matches_enumeration(seed in any::<u64>(), mode in mode()) {
        let (pair, _) = instance(seed, mode);
        let all = enumerate_stopping_times(&pair.f, 5_000).unwrap();
        prop_assert_eq!(all.len() as u128, count_stopping_times(&pair.f));
        prop_assert!(all.iter().all(|nu| is_stopping_time(nu, &pair.f)));
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), all.len());
    }
}

#[test]
fn stopping_times_of_small_filtrations_by_brute_force() {
    let (_, f, g) = pseudostop_core::fixtures::fix_a();
    for filtration in [&f, &g, &Filtration::trivial(4, 2)] {
        let n = filtration.num_outcomes();
        let values = filtration.horizon() + 2;
        let mut brute = 0u128;
        for code in 0..values.pow(n as u32) {
            let mut c = code;
            let opts: Vec<Option<usize>> = (0..n)
                .map(|_| {
                    let d = c % values;
                    c /= values;
                    (d <= filtration.horizon()).then_some(d)
                })
                .collect();
            brute += is_stopping_time(&RandomTime::from_options(&opts), filtration) as u128;
        }
        assert_eq!(count_stopping_times(filtration), brute);
    }
    assert_eq!(count_stopping_times(&g), 82);
}
