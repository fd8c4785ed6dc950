mod common;

use common::*;
use esr_core::dominance::{
    esr_dominates, esr_dominates_cdf, esr_set, expected_utility, fsd_dominates,
    fsd_dominates_scalar, fsd_undominated_set, sample_monotone_utilities, utility_of_expectation,
};
use esr_core::environment::{load_environment, PRESET_NAMES};
use esr_core::motdrl::ucb_bonus_value;
use esr_core::{
    coverage_ratio, ks_distance, preset, Criterion, DiscreteDistribution, MonotoneUtility,
    ReturnLattice, RewardVector, ZTable,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn observations(dims: usize) -> impl Strategy<Value = Vec<RewardVector>> {
    prop::collection::vec(
        prop::collection::vec(0..=4i64, dims)
            .prop_map(|v| RewardVector(v.into_iter().map(|x| x as f64).collect())),
        1..60,
    )
}

fn table_case() -> impl Strategy<Value = (usize, Vec<RewardVector>)> {
    (1usize..=3).prop_flat_map(|d| (Just(d), observations(d)))
}

fn lattice(dims: usize) -> ReturnLattice {
    ReturnLattice::integer(0, 4, dims).unwrap()
}

fn leq(a: &RewardVector, b: &RewardVector) -> bool {
    a.0.iter().zip(&b.0).all(|(x, y)| x <= y)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pdf_sums_to_one((d, obs) in table_case()) {
        let t = ZTable::from_observations(lattice(d), &obs).unwrap();
        let total: f64 = lattice(d).points().map(|p| t.pdf(&p).unwrap()).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cdf_is_monotone_with_unit_top((d, obs) in table_case()) {
        let lat = lattice(d);
        let t = ZTable::from_observations(lat.clone(), &obs).unwrap();
        let points: Vec<_> = lat.points().collect();
        let values: Vec<f64> = points.iter().map(|p| t.cdf(p).unwrap()).collect();
        for (i, a) in points.iter().enumerate() {
            for (j, b) in points.iter().enumerate() {
                if leq(a, b) {
                    prop_assert!(values[i] <= values[j] + 1e-12);
                }
            }
        }
        prop_assert!((t.cdf(&RewardVector(vec![4.0; d])).unwrap() - 1.0).abs() < 1e-12);
        let dist = t.to_distribution().unwrap();
        let low: Vec<f64> = (0..d)
            .map(|k| dist.atoms().iter().map(|a| a.point[k]).fold(f64::INFINITY, f64::min) - 0.5)
            .collect();
        prop_assert_eq!(dist.cdf(&low).unwrap(), 0.0);
    }

    #[test]
    fn streaming_equals_batch((d, obs) in table_case()) {
        let lat = lattice(d);
        let mut streamed = ZTable::new(lat.clone());
        for o in &obs {
            streamed.update(o).unwrap();
        }
        let mut reordered = obs.clone();
        reordered.reverse();
        let batch = ZTable::from_observations(lat.clone(), &reordered).unwrap();
        prop_assert_eq!(&streamed, &batch);
        for p in lat.points() {
            prop_assert_eq!(streamed.pdf(&p).unwrap(), batch.pdf(&p).unwrap());
            prop_assert_eq!(streamed.cdf(&p).unwrap(), batch.cdf(&p).unwrap());
        }
    }

    #[test]
    fn shifted_view_translates_cdf((d, obs) in table_case(), bonus in 0.0f64..3.0) {
        let lat = lattice(d);
        let t = ZTable::from_observations(lat.clone(), &obs).unwrap();
        let raw = t.to_distribution().unwrap();
        let view = t.shifted_view(bonus).unwrap();
        for p in lat.points() {
            let v: Vec<f64> = p.0.iter().map(|x| x + 0.5).collect();
            let back: Vec<f64> = v.iter().map(|x| x - bonus).collect();
            prop_assert_eq!(view.cdf(&v).unwrap(), raw.cdf(&back).unwrap());
        }
    }

    #[test]
    fn ks_is_symmetric_and_separates((d, a) in table_case(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let b = ZTable::from_observations(
            lattice(d),
            &(0..a.len())
                .map(|_| RewardVector((0..d).map(|_| rand::Rng::random_range(&mut r, 0..=4) as f64).collect()))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let da = ZTable::from_observations(lattice(d), &a).unwrap().to_distribution().unwrap();
        let db = b.to_distribution().unwrap();
        let ab = ks_distance(&da, &db).unwrap();
        prop_assert_eq!(ab, ks_distance(&db, &da).unwrap());
        prop_assert_eq!(ks_distance(&da, &da).unwrap(), 0.0);
        let same = lattice(d).points().all(|p| (da.cdf(&p.0).unwrap() - db.cdf(&p.0).unwrap()).abs() < 1e-12);
        prop_assert_eq!(ab < 1e-12, same);
    }

    #[test]
    fn ztable_json_round_trip((d, obs) in table_case()) {
        let t = ZTable::from_observations(lattice(d), &obs).unwrap();
        prop_assert_eq!(ZTable::from_json(&t.to_json().unwrap()).unwrap(), t);
    }

    #[test]
    fn dominance_is_strict_and_asymmetric(seed in any::<u64>(), dims in 1usize..=3) {
        let mut r = rng(seed);
        let a = random_continuous(&mut r, dims, 4);
        let b = random_continuous(&mut r, dims, 4);
        for c in [Criterion::Cdf, Criterion::Pdf] {
            prop_assert!(!esr_dominates(&a, &a, c).unwrap());
            prop_assert!(!(esr_dominates(&a, &b, c).unwrap() && esr_dominates(&b, &a, c).unwrap()));
        }
        prop_assert!(fsd_dominates(&a, &a).unwrap());
    }

    #[test]
    fn transported_mass_dominates(seed in any::<u64>(), dims in 1usize..=3) {
        let (high, low) = upward_transport_pair(&mut rng(seed), dims, 4, 20);
        let (a, b) = (high.to_distribution(dims), low.to_distribution(dims));
        for c in [Criterion::Cdf, Criterion::Pdf] {
            prop_assert!(esr_dominates(&a, &b, c).unwrap());
            prop_assert!(!esr_dominates(&b, &a, c).unwrap());
        }
    }

    #[test]
    fn esr_set_properties(seed in any::<u64>(), dims in 1usize..=2, n in 2usize..7) {
        let mut r = rng(seed);
        let cands: Vec<DiscreteDistribution> = (0..n)
            .map(|_| random_units(&mut r, dims, 3, 4).to_distribution(dims))
            .collect();
        let fsd = fsd_undominated_set(&cands).unwrap();
        for c in [Criterion::Cdf, Criterion::Pdf] {
            let set = esr_set(&cands, c).unwrap();
            prop_assert!(!set.is_empty());
            if c == Criterion::Cdf {
                prop_assert!(set.iter().all(|i| fsd.contains(i)));
            }
            let mut perm: Vec<usize> = (0..n).collect();
            perm.rotate_left(seed as usize % n);
            perm.swap(0, n - 1);
            let permuted: Vec<_> = perm.iter().map(|&i| cands[i].clone()).collect();
            let mut mapped: Vec<usize> = esr_set(&permuted, c).unwrap().iter().map(|&k| perm[k]).collect();
            mapped.sort_unstable();
            prop_assert_eq!(mapped, set);
        }
    }

    #[test]
    fn scalar_fsd_orders_means(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = if seed % 2 == 0 {
            upward_transport_pair(&mut r, 1, 4, 12)
        } else {
            (random_units(&mut r, 1, 3, 12), random_units(&mut r, 1, 3, 12))
        };
        if fsd_dominates_scalar(&a.to_distribution(1), &b.to_distribution(1)).unwrap() {
            prop_assert!(
                a.scaled_first_moment() * b.total() as i128 >= b.scaled_first_moment() * a.total() as i128
            );
        }
    }

    #[test]
    fn separable_utilities_respect_esr_dominance(seed in any::<u64>()) {
        let (high, low) = upward_transport_pair(&mut rng(seed), 2, 4, 20);
        let (a, b) = (high.to_distribution(2), low.to_distribution(2));
        prop_assert!(esr_dominates_cdf(&a, &b).unwrap());
        for u in sample_monotone_utilities(20, 2, 0.0, seed, true) {
            prop_assert!(expected_utility(&a, &u).unwrap() > expected_utility(&b, &u).unwrap());
        }
    }

    #[test]
    fn linear_utilities_make_ser_and_esr_agree(seed in any::<u64>(), dims in 1usize..=3) {
        let mut r = rng(seed);
        let d = random_continuous(&mut r, dims, 5);
        let w: Vec<f64> = (0..dims).map(|_| rand::Rng::random_range(&mut r, 0.0..2.0)).collect();
        let u = MonotoneUtility::linear(w);
        prop_assert!((expected_utility(&d, &u).unwrap() - utility_of_expectation(&d, &u).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn coverage_invariants(seed in any::<u64>(), nf in 0usize..5, nt in 1usize..4) {
        let mut r = rng(seed);
        let pool: Vec<DiscreteDistribution> = (0..6).map(|_| random_units(&mut r, 2, 2, 3).to_distribution(2)).collect();
        let pick = |r: &mut ChaCha8Rng, n: usize| -> Vec<DiscreteDistribution> {
            (0..n).map(|_| pool[rand::Rng::random_range(r, 0..pool.len())].clone()).collect()
        };
        let found = pick(&mut r, nf);
        let truth = pick(&mut r, nt);
        let eps = 0.01;
        let base = coverage_ratio(&found, &truth, eps).unwrap();
        prop_assert!((0.0..=1.0).contains(&base.f1));

        let all_found = found.iter().all(|f| truth.iter().any(|t| ks_distance(f, t).unwrap() <= eps));
        let all_truth = truth.iter().all(|t| found.iter().any(|f| ks_distance(f, t).unwrap() <= eps));
        prop_assert_eq!(base.f1 == 1.0, !found.is_empty() && all_found && all_truth);

        let mut rf = found.clone();
        rf.reverse();
        let mut rt = truth.clone();
        rt.rotate_left(1);
        let p = coverage_ratio(&rf, &rt, eps).unwrap();
        prop_assert_eq!((p.precision, p.recall, p.f1), (base.precision, base.recall, base.f1));

        for extra in &pool {
            let mut more = found.clone();
            more.push(extra.clone());
            let m = coverage_ratio(&more, &truth, eps).unwrap();
            if truth.iter().any(|t| ks_distance(extra, t).unwrap() <= eps) {
                prop_assert!(m.recall >= base.recall);
            } else {
                prop_assert!(m.precision <= base.precision);
            }
        }
    }
}

#[test]
fn joint_strictness_without_marginal_gain() {
    // Strict joint-CDF dominance with identical marginals: separable utilities
    // tie, so only the weak inequality survives.
    let lat = ReturnLattice::integer(0, 1, 2).unwrap();
    let x = DiscreteDistribution::new(
        lat.clone(),
        [
            (RewardVector(vec![0., 1.]), 0.5),
            (RewardVector(vec![1., 0.]), 0.5),
        ],
    )
    .unwrap();
    let y = DiscreteDistribution::new(
        lat,
        [
            (RewardVector(vec![0., 0.]), 0.5),
            (RewardVector(vec![1., 1.]), 0.5),
        ],
    )
    .unwrap();
    assert!(esr_dominates_cdf(&x, &y).unwrap());
    for u in sample_monotone_utilities(50, 2, 0.0, 3, true) {
        let (ex, ey) = (
            expected_utility(&x, &u).unwrap(),
            expected_utility(&y, &u).unwrap(),
        );
        assert!((ex - ey).abs() < 1e-12);
    }
}

#[test]
fn presets_round_trip_and_match_declared_sets() {
    for name in PRESET_NAMES {
        let env = preset(name).unwrap();
        let back = load_environment(&env.to_json().unwrap()).unwrap();
        assert_eq!(back, env, "{name}");
        if let Some(declared) = env.declared_esr_set() {
            assert_eq!(
                env.computed_esr_set(Criterion::Cdf).unwrap(),
                declared,
                "{name}"
            );
            assert_eq!(
                env.computed_esr_set(Criterion::Pdf).unwrap(),
                declared,
                "{name}"
            );
        }
    }
}

#[test]
fn bonus_vanishes_for_heavily_pulled_arms() {
    let big = 1_000_000u64;
    let b = ucb_bonus_value(5 * big, big, 2, 2);
    assert!(b < 0.01, "{b}");
    let env = preset("momab5").unwrap();
    let tables: Vec<ZTable> = (0..5)
        .map(|arm| {
            let d = env.exact_distribution(arm).unwrap();
            let mut t = ZTable::new(env.lattice().clone());
            for a in d.atoms() {
                let p = RewardVector(a.point.clone());
                for _ in 0..(a.mass * big as f64).round() as u64 {
                    t.update(&p).unwrap();
                }
            }
            t
        })
        .collect();
    let state = esr_core::LearnerState::from_tables(tables, 5, 2, Criterion::Cdf).unwrap();
    assert_eq!(
        state.current_esr_set(true).unwrap(),
        state.current_esr_set(false).unwrap()
    );
    assert_eq!(state.current_esr_set(false).unwrap(), vec![0, 4]);
}

#[test]
fn random_utilities_are_monotone_on_lattice() {
    let lat = ReturnLattice::integer(0, 10, 2).unwrap();
    for (k, u) in sample_monotone_utilities(40, 2, 0.0, 11, false)
        .iter()
        .enumerate()
    {
        assert!(
            esr_core::dominance::spot_check_monotone(u, &lat, 300, k as u64),
            "{u:?}"
        );
    }
}

#[test]
fn criteria_disagreements_are_reported() {
    let mut r = rng(77);
    let (mut agree, mut disagree) = (0usize, 0usize);
    for _ in 0..3000 {
        let a = random_units(&mut r, 2, 3, 6).to_distribution(2);
        let b = random_units(&mut r, 2, 3, 6).to_distribution(2);
        let cdf = esr_dominates(&a, &b, Criterion::Cdf).unwrap();
        let pdf = esr_dominates(&a, &b, Criterion::Pdf).unwrap();
        if cdf == pdf {
            agree += 1;
        } else {
            disagree += 1;
        }
    }
    println!("CDF vs PDF dominance on 3000 random D=2 pairs: {agree} agree, {disagree} disagree");
    assert_eq!(agree + disagree, 3000);
}
