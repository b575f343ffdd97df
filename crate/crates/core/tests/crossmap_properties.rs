use echocausal::ccm::{
    align_window, analyze_pair, classify_peaks, cross_map_curve, cross_map_units, loo_cv_grid_search, Classification,
    GridSpec, LagGrid, UnitSeries,
};
use echocausal::esn::{build_reservoir, run_states_from, ReservoirConfig};
use echocausal::synth::{gen_ar1, gen_coupled_logistic, CoupledMapConfig};
use nalgebra::DVector;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn states_forget_initial_conditions(seed in any::<u64>(), radius in 0.05f64..0.95, leak in 0.3f64..1.0) {
        let cfg = ReservoirConfig {
            size: 40,
            spectral_radius: radius,
            leak,
            input_scale: 1.0,
            sparsity: 0.3,
            ridge: 0.1,
            seed,
            washout: 0,
        };
        let res = build_reservoir(&cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inputs: Vec<f64> = (0..2000).map(|_| rng.random_range(-2.0..2.0)).collect();
        let a = DVector::from_fn(40, |_, _| rng.random_range(-1.0..1.0));
        let b = DVector::from_fn(40, |_, _| rng.random_range(-1.0..1.0));
        let sa = run_states_from(&res, leak, &inputs, &a).unwrap();
        let sb = run_states_from(&res, leak, &inputs, &b).unwrap();
        let early = (sa.column(0) - sb.column(0)).norm();
        let late = (sa.column(1999) - sb.column(1999)).norm();
        prop_assert!(late < 1e-6 && late <= early);
    }

    #[test]
    fn window_length(len in 2usize..400, lag in -30i64..=30) {
        prop_assume!(lag.unsigned_abs() < len as u64);
        let w = align_window(len, lag).unwrap();
        prop_assert_eq!(w.len(), len - lag.unsigned_abs() as usize);
        prop_assert!(w.start >= 1 && (w.end as i64 + lag) as usize <= len && w.start as i64 + lag >= 1);
    }

    #[test]
    fn classify_depends_only_on_peaks(a in -30i64..=30, b in -30i64..=30, ra in 0.0f64..1.0, rb in 0.0f64..1.0) {
        let v = classify_peaks(a, b, ra, rb);
        prop_assert_eq!(&v, &classify_peaks(a, b, ra, rb));
        prop_assert_eq!(v.weak, ra < 0.2 && rb < 0.2);
        prop_assert_eq!(v.classification, classify_peaks(a.signum(), b.signum(), 0.5, 0.5).classification);
    }
}

#[test]
fn self_map_at_zero_lag() {
    let (x, _) = gen_coupled_logistic(&CoupledMapConfig::default()).unwrap();
    for seed in 0..3 {
        let cfg = ReservoirConfig::activity_to_sentiment().with_seed(seed);
        let c = cross_map_curve(&x, &x, &cfg, &LagGrid::default()).unwrap();
        assert!(c.rho_at(0).unwrap() >= 0.99, "{:?}", c.rho_at(0));
        assert_eq!(c.points.len(), 61);
    }
}

#[test]
fn curves_are_deterministic() {
    let (x, y) = gen_coupled_logistic(&CoupledMapConfig { seed: 5, ..Default::default() }).unwrap();
    let cfg = ReservoirConfig::default().with_seed(9);
    let a = cross_map_curve(&x, &y, &cfg, &LagGrid::default()).unwrap();
    let b = cross_map_curve(&x, &y, &cfg, &LagGrid::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn white_noise_null_is_small() {
    let mut peaks: Vec<f64> = (0..20u64)
        .map(|k| {
            let x = gen_ar1(0.0, 234, 2 * k).unwrap();
            let y = gen_ar1(0.0, 234, 2 * k + 1).unwrap();
            let c = cross_map_curve(&x, &y, &ReservoirConfig::default().with_seed(k), &LagGrid::default()).unwrap();
            c.points.iter().map(|p| p.rho.abs()).fold(0.0, f64::max)
        })
        .collect();
    peaks.sort_by(f64::total_cmp);
    assert!(peaks[10] < 0.3, "median max |rho| {}", peaks[10]);
}

#[test]
fn strong_coupling_recovers_driver() {
    // X drives Y one step ahead; mapping X from Y should peak well above chance.
    let mut rhos = Vec::new();
    for seed in 0..5u64 {
        let (x, y) = gen_coupled_logistic(&CoupledMapConfig { seed, c_yx: 0.3, ..Default::default() }).unwrap();
        let c = cross_map_curve(&y, &x, &ReservoirConfig::default().with_seed(seed), &LagGrid::default()).unwrap();
        rhos.push(c.peak_rho.unwrap());
        assert!(c.peak_lag.unwrap() < 0);
    }
    let mean = rhos.iter().sum::<f64>() / rhos.len() as f64;
    assert!(mean >= 0.5, "{rhos:?}");
}

#[test]
fn coupling_strength_monotone() {
    let grid = LagGrid::default();
    let mut means = Vec::new();
    for c in [0.05, 0.1, 0.2] {
        let mut avg = vec![0.0; 61];
        for seed in 0..20u64 {
            let (x, y) = gen_coupled_logistic(&CoupledMapConfig { seed, c_yx: c, ..Default::default() }).unwrap();
            let curve = cross_map_curve(&y, &x, &ReservoirConfig::default().with_seed(seed), &grid).unwrap();
            for p in &curve.points {
                avg[(p.lag + 30) as usize] += p.rho / 20.0;
            }
        }
        means.push(avg.iter().cloned().fold(f64::MIN, f64::max));
    }
    assert!(means.windows(2).all(|w| w[0] <= w[1]), "{means:?}");
}

#[test]
fn uncoupled_maps_stay_null() {
    let mut strong = 0;
    for k in 0..100u64 {
        let (x, _) = gen_coupled_logistic(&CoupledMapConfig { seed: 2 * k, c_yx: 0.0, ..Default::default() }).unwrap();
        let (_, y) = gen_coupled_logistic(&CoupledMapConfig { seed: 2 * k + 1, c_yx: 0.0, ..Default::default() }).unwrap();
        let units = vec![UnitSeries::new("u", x, y).unwrap()];
        let cfg = ReservoirConfig::default();
        let v = analyze_pair(&units, &cfg.with_seed(k), &cfg.with_seed(k + 1), &LagGrid::default(), "X", "Y")
            .unwrap()
            .verdict;
        if !v.weak && v.classification != Classification::Inconclusive {
            strong += 1;
        }
    }
    assert!(strong <= 20, "{strong}/100");
}

#[test]
fn delay_shifts_peak() {
    let cfg = ReservoirConfig::default();
    let mut shifts = Vec::new();
    for seed in 0..10u64 {
        let lag = |delay| {
            let (x, y) = gen_coupled_logistic(&CoupledMapConfig { seed, delay, ..Default::default() }).unwrap();
            cross_map_curve(&y, &x, &cfg.with_seed(seed), &LagGrid::default()).unwrap().peak_lag.unwrap()
        };
        shifts.push(lag(0) - lag(3));
    }
    shifts.sort();
    assert!((shifts[5] - 3).abs() <= 1, "{shifts:?}");
}

#[test]
fn pooled_units_share_one_readout() {
    let units: Vec<UnitSeries> = (0..3u64)
        .map(|k| {
            let (x, y) = gen_coupled_logistic(&CoupledMapConfig { seed: k, len: 120, ..Default::default() }).unwrap();
            UnitSeries::new(format!("c{k}"), x, y).unwrap()
        })
        .collect();
    let c = cross_map_units(&units, &ReservoirConfig::default(), &LagGrid::default(), "X", "Y").unwrap();
    assert_eq!(c.points.len(), 61);
    let mut reversed = units.clone();
    reversed.reverse();
    let r = cross_map_units(&reversed, &ReservoirConfig::default(), &LagGrid::default(), "X", "Y").unwrap();
    for (a, b) in c.points.iter().zip(&r.points) {
        assert!((a.rho - b.rho).abs() < 1e-9);
    }
}

#[test]
fn learnable_shift_beats_grid_median() {
    let units: Vec<UnitSeries> = (0..4u64)
        .map(|k| {
            let (x, _) = gen_coupled_logistic(&CoupledMapConfig { seed: 20 + k, len: 150, ..Default::default() }).unwrap();
            let mut y = vec![x[0]];
            y.extend_from_slice(&x[..x.len() - 1]);
            UnitSeries::new(format!("u{k}"), x, y).unwrap()
        })
        .collect();
    let grid = GridSpec {
        spectral_radius: vec![0.1, 0.9],
        leak: vec![0.1, 0.9],
        size: vec![20, 60],
        sparsity: vec![0.4],
        ridge: vec![0.1, 100.0],
        input_scale: vec![0.3, 0.9],
        seed: 1,
        washout: 0,
    }
    .expand();
    let rep = loo_cv_grid_search(&units, &grid, 0).unwrap();
    let mut scores: Vec<f64> = rep.scores.iter().flatten().copied().collect();
    scores.sort_by(f64::total_cmp);
    let best = rep.scores[rep.winner.unwrap()].unwrap();
    assert!(best < scores[scores.len() / 2]);
    assert_eq!(best, scores[0]);
}
