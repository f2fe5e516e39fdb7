use bess_planner::growth::{compound_factor, grow_demand, grow_demand_years, grow_solar, grow_wind, Adgp};
use bess_planner::profiles::{Profile, ProfileKind};
use proptest::prelude::*;

fn repeated(rate: f64, years: usize) -> f64 {
    let mut f = 1.0;
    for _ in 0..years {
        f *= 1.0 + rate / 100.0;
    }
    f
}

#[test]
fn fifteen_years_at_seven_percent() {
    let s = Profile::daily(ProfileKind::Solar, vec![1.0; 96]).unwrap();
    let mut grown = s.clone();
    for _ in 0..15 {
        grown = grow_solar(&grown, 7.0);
    }
    let w = (0..15).fold(Profile::daily(ProfileKind::Wind, vec![1.0; 96]).unwrap(), |p, _| grow_wind(&p, 7.0));
    let oracle = repeated(7.0, 15);
    assert!((oracle - 2.759031).abs() < 1e-5);
    for v in grown.values.iter().chain(&w.values) {
        assert!((v - 2.759031).abs() < 1e-5);
    }
    assert!((compound_factor(7.0, 15) - oracle).abs() < 1e-12);
}

#[test]
fn peak_to_offpeak_ratio_compounds() {
    let mut rates = vec![1.0; 96];
    rates[70..80].iter_mut().for_each(|r| *r = 4.0);
    let d = Profile::daily(ProfileKind::Demand, vec![10.0; 96]).unwrap();
    let g = grow_demand_years(&d, &Adgp::Vector(rates), 15).unwrap();
    let ratio = g.values[75] / g.values[0];
    assert!((ratio - repeated(4.0, 15) / repeated(1.0, 15)).abs() < 1e-12);
    assert!((ratio - 1.5512).abs() < 1e-4);
}

proptest! {
    #[test]
    fn years_compose(values in proptest::collection::vec(0.0f64..100.0, 24), rate in -50.0f64..20.0, years in 0u32..20) {
        let d = Profile::daily(ProfileKind::Demand, values).unwrap();
        let stepwise = (0..years).fold(d.clone(), |p, _| grow_demand(&p, &Adgp::Scalar(rate)).unwrap());
        let once = grow_demand_years(&d, &Adgp::Scalar(rate), years).unwrap();
        for (a, b) in stepwise.values.iter().zip(&once.values) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300) + 1e-300);
            prop_assert!(*a >= 0.0);
        }
    }
}
