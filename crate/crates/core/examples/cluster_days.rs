//! Splits the synthetic year's solar and wind days into high and low
//! clusters and builds the per-day-type demand representatives.

use bess_planner::clustering::{demand_clusters, kmeans_two, level_probabilities};
use bess_planner::profiles::{CalendarRule, DayType, Profile};
use bess_planner::synthetic::{generate, SyntheticSpec};

fn sparkline(p: &Profile, width: usize) -> String {
    const BARS: [char; 8] = ['▁', '▂', '▃', '▄', '▅', '▆', '▇', '█'];
    let max = p.values.iter().cloned().fold(f64::MIN, f64::max).max(1e-12);
    let chunk = p.len() / width;
    (0..width)
        .map(|k| {
            let m = p.values[k * chunk..(k + 1) * chunk].iter().sum::<f64>() / chunk as f64;
            BARS[((m / max) * 7.0).round().clamp(0.0, 7.0) as usize]
        })
        .collect()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = 11;
    let rule = CalendarRule::default();
    let series = generate(&SyntheticSpec::default(), &rule, seed);

    for (name, p) in [("solar", &series.solar), ("wind", &series.wind)] {
        let days: Vec<Profile> = p.days()?.into_iter().map(|(_, d)| d).collect();
        let c = kmeans_two(&days, seed)?;
        let (high, low) = level_probabilities(&c);
        println!("{name}: share high {high:.3}, low {low:.3}; inertia {:.4e} after {} steps", c.inertia, c.history.len());
        println!("  high {} {:>9.1} MWh/day", sparkline(&c.high, 24), c.high.energy());
        println!("  low  {} {:>9.1} MWh/day", sparkline(&c.low, 24), c.low.energy());
    }

    let demand = demand_clusters(&series.demand.days()?, &rule)?;
    for dt in DayType::ALL {
        let p = demand.get(dt);
        println!("demand {:<4} {} peak {:>8.0} MW", dt.as_str(), sparkline(p, 24), p.values.iter().cloned().fold(0.0, f64::max));
    }
    Ok(())
}
