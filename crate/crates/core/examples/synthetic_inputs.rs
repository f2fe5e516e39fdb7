//! Generates the seeded synthetic year and summarizes it per day type.
//!
//! `cargo run --example synthetic_inputs -- [seed] [out_dir]` writes the six
//! series as `timestamp,value` CSVs when an output directory is given.

use std::path::PathBuf;

use bess_planner::pipeline::InputSeries;
use bess_planner::profiles::{classify_day, day_counts, write_timeseries, CalendarRule, DayType, DayTypeMap};
use bess_planner::synthetic::{generate, SyntheticSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2015);
    let out: Option<PathBuf> = args.next().map(PathBuf::from);

    let rule = CalendarRule::default();
    let spec = SyntheticSpec::default();
    let series = generate(&spec, &rule, seed);
    println!("{} samples at {} min from {:?}", series.demand.len(), series.demand.step_minutes, series.demand.start);
    println!("calendar day counts for {}: {:?}", spec.year, day_counts(spec.year, &rule));

    // Mean daily energy per day type for every series.
    let mut sums: DayTypeMap<[f64; 6]> = DayTypeMap::default();
    let mut days: DayTypeMap<usize> = DayTypeMap::default();
    let per_series: Vec<_> = series.all().iter().map(|p| p.days()).collect::<Result<_, _>>()?;
    for d in 0..per_series[0].len() {
        let dt = classify_day(per_series[0][d].0, &rule);
        *days.get_mut(dt) += 1;
        for (s, series_days) in per_series.iter().enumerate() {
            sums.get_mut(dt)[s] += series_days[d].1.mean();
        }
    }
    print!("{:<6} {:>5}", "day", "days");
    for name in InputSeries::NAMES {
        print!(" {name:>13}");
    }
    println!();
    for dt in DayType::ALL {
        print!("{:<6} {:>5}", dt.as_str(), days.get(dt));
        for s in 0..6 {
            print!(" {:>13.2}", sums.get(dt)[s] / *days.get(dt) as f64);
        }
        println!();
    }
    println!("(daily means: MW for power, $/MWh for price)");

    if let Some(dir) = out {
        std::fs::create_dir_all(&dir)?;
        for (name, p) in InputSeries::NAMES.iter().zip(series.all()) {
            write_timeseries(&dir.join(format!("{name}.csv")), p)?;
        }
        println!("wrote {}", dir.display());
    }
    Ok(())
}
