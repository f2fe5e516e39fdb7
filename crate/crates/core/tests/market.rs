use bess_planner::market::{eval_price, fit_price, net_demand, MarketState, PriceFit, PriceModel};
use bess_planner::profiles::{DayType, DayTypeMap, Profile, ProfileKind};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Closed-form 2×2 normal equations.
fn normal_equations(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (sxx, sxy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x * x, b + x * y));
    let det = n * sxx - sx * sx;
    ((n * sxy - sx * sy) / det, (sxx * sy - sx * sxy) / det)
}

#[test]
fn noisy_fit_matches_normal_equations() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let points: Vec<(f64, f64)> = (0..100)
        .map(|_| {
            let x = rng.random_range(15_000.0..45_000.0);
            (x, 0.002 * x + 5.0 + rng.random_range(-3.0..3.0))
        })
        .collect();
    let f = fit_price(&points, DayType::SWD).unwrap();
    let (a, b) = normal_equations(&points);
    assert!((f.alpha - a).abs() <= 1e-9 * a.abs());
    assert!((f.beta - b).abs() <= 1e-9 * b.abs().max(1.0));

    let mut shuffled = points.clone();
    shuffled.reverse();
    shuffled.rotate_left(37);
    assert_eq!(fit_price(&shuffled, DayType::SWD).unwrap(), f);
}

#[test]
fn year_long_evaluation_matches_an_elementwise_pass() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 96 * 365;
    let mk = |kind, lo: f64, hi: f64, rng: &mut ChaCha8Rng| {
        Profile::new(kind, 15, None, (0..n).map(|_| rng.random_range(lo..hi)).collect()).unwrap()
    };
    let state = MarketState {
        demand: mk(ProfileKind::Demand, 15_000.0, 45_000.0, &mut rng),
        solar: mk(ProfileKind::Solar, 0.0, 6_000.0, &mut rng),
        wind: mk(ProfileKind::Wind, 0.0, 2_000.0, &mut rng),
    };
    let net = net_demand(&state).unwrap();
    let model = PriceModel::constant(DayTypeMap::from_fn(|_| PriceFit { alpha: 0.0013, beta: -8.0, rmse: 0.0 }));
    let price = eval_price(&model, DayType::SED, &net);
    for k in 0..n {
        let nd = state.demand.values[k] - state.solar.values[k] - state.wind.values[k];
        assert_eq!(net.values[k], nd);
        assert!((price.values[k] - (0.0013 * nd - 8.0)).abs() < 1e-12 * nd.abs().max(1.0));
    }
}

proptest! {
    #[test]
    fn exact_affine_data_is_recovered(alpha in 0.0f64..0.01, beta in -50.0f64..50.0, xs in proptest::collection::btree_set(-20_000i64..60_000, 3..40)) {
        let points: Vec<(f64, f64)> = xs.iter().map(|&x| (x as f64, alpha * x as f64 + beta)).collect();
        let f = fit_price(&points, DayType::NSWD).unwrap();
        prop_assert!((f.alpha - alpha).abs() <= 1e-9);
        prop_assert!((f.beta - beta).abs() <= 1e-9 * beta.abs().max(1.0) + 1e-7);
    }

    #[test]
    fn evaluation_is_affine(x in -1e4f64..5e4, y in -1e4f64..5e4, a in 0.0f64..=1.0, alpha in 0.0f64..0.01, beta in -20.0f64..20.0) {
        let fit = PriceFit { alpha, beta, rmse: 0.0 };
        let lhs = fit.price(a * x + (1.0 - a) * y);
        let rhs = a * fit.price(x) + (1.0 - a) * fit.price(y);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (lhs.abs() + 1.0));
    }

    #[test]
    fn net_plus_renewables_is_demand(d in proptest::collection::vec((0.0f64..5e4, 0.0f64..1e4, 0.0f64..5e3), 24)) {
        let state = MarketState {
            demand: Profile::daily(ProfileKind::Demand, d.iter().map(|v| v.0).collect()).unwrap(),
            solar: Profile::daily(ProfileKind::Solar, d.iter().map(|v| v.1).collect()).unwrap(),
            wind: Profile::daily(ProfileKind::Wind, d.iter().map(|v| v.2).collect()).unwrap(),
        };
        let net = net_demand(&state).unwrap();
        for (k, v) in d.iter().enumerate() {
            prop_assert!((net.values[k] + v.1 + v.2 - v.0).abs() <= 1e-9 * v.0.max(1.0));
        }
    }
}
