use bess_planner::profiles::{
    classify_day, day_counts, format_timeseries, parse_timeseries, resample, CalendarRule, ColumnMap, DayType, Profile,
    ProfileKind,
};
use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, Weekday};
use proptest::prelude::*;

fn start() -> Option<NaiveDateTime> {
    NaiveDate::from_ymd_opt(2015, 1, 1).unwrap().and_hms_opt(0, 0, 0)
}

#[test]
fn full_year_at_fifteen_minutes_has_365_days() {
    let mut text = String::from("timestamp,value\n");
    let mut t = start().unwrap();
    let mut rows = 0;
    while t.year() == 2015 {
        text.push_str(&format!("{},{}\n", t.format("%Y-%m-%dT%H:%M"), rows % 7));
        t += Duration::minutes(15);
        rows += 1;
    }
    let p = parse_timeseries(&text, "year.csv", &ColumnMap::default(), ProfileKind::Demand).unwrap();
    assert_eq!(p.len(), 365 * 96);
    assert_eq!(p.len(), rows);
    assert_eq!(p.days().unwrap().len(), 365);
}

#[test]
fn day_counts_match_a_direct_calendar_walk() {
    let rule = CalendarRule::default();
    for year in [2015, 2016, 2023] {
        let mut counts = [0u32; 4];
        let mut d = NaiveDate::from_ymd_opt(year, 1, 1).unwrap();
        while d.year() == year {
            let summer = (5..=10).contains(&d.month());
            let weekend = matches!(d.weekday(), Weekday::Sat | Weekday::Sun);
            counts[DayType::from_flags(summer, weekend).index()] += 1;
            d += Duration::days(1);
        }
        let got = day_counts(year, &rule);
        for dt in DayType::ALL {
            assert_eq!(*got.get(dt), counts[dt.index()], "{year} {dt}");
        }
    }
    let c = day_counts(2015, &rule);
    assert_eq!((c.swd, c.sed, c.nswd, c.nsed), (131, 53, 130, 51));
}

#[test]
fn calendar_examples() {
    let rule = CalendarRule::default();
    let d = |m, day| NaiveDate::from_ymd_opt(2015, m, day).unwrap();
    assert_eq!(classify_day(d(7, 15), &rule), DayType::SWD);
    assert_eq!(classify_day(d(12, 6), &rule), DayType::NSED);
    assert_eq!(classify_day(d(5, 1), &rule), DayType::SWD);
    assert_eq!(classify_day(d(10, 31), &rule), DayType::SED);
    assert_eq!(classify_day(d(11, 2), &rule), DayType::NSWD);
}

fn profile(values: Vec<f64>, step: u32) -> Profile {
    Profile::new(ProfileKind::Demand, step, start(), values).unwrap()
}

proptest! {
    #[test]
    fn resampling_preserves_energy(values in proptest::collection::vec(0.0f64..1e4, 96), target in prop::sample::select(vec![15u32, 30, 60, 120, 360, 1440, 5])) {
        let p = profile(values, 15);
        let q = resample(&p, target).unwrap();
        prop_assert!((q.energy() - p.energy()).abs() <= 1e-9 * p.energy().max(1.0));
    }

    #[test]
    fn hold_then_mean_round_trip(values in proptest::collection::vec(0.0f64..1e4, 24), fine in prop::sample::select(vec![5u32, 15, 20, 30])) {
        let p = profile(values, 60);
        let back = resample(&resample(&p, fine).unwrap(), 60).unwrap();
        for (a, b) in back.values.iter().zip(&p.values) {
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn write_then_read_is_lossless(values in proptest::collection::vec(-1e6f64..1e6, 2..200)) {
        let p = Profile::new(ProfileKind::Price, 15, start(), values).unwrap();
        let text = format_timeseries(&p).unwrap();
        let q = parse_timeseries(&text, "rt.csv", &ColumnMap::default(), ProfileKind::Price).unwrap();
        prop_assert_eq!(q, p);
    }

    #[test]
    fn every_date_has_one_day_type(offset in 0i64..3650) {
        let rule = CalendarRule::default();
        let date = NaiveDate::from_ymd_opt(2010, 1, 1).unwrap() + Duration::days(offset);
        let dt = classify_day(date, &rule);
        let summer = (5..=10).contains(&date.month());
        let weekend = matches!(date.weekday(), Weekday::Sat | Weekday::Sun);
        prop_assert_eq!(dt, DayType::from_flags(summer, weekend));
    }
}
