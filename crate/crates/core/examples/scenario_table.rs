//! The 16 joint scenarios and their probabilities for the default level
//! probabilities and day counts.

use bess_planner::scenarios::{build_scenarios, day_probabilities, LevelProbabilities};
use bess_planner::profiles::DayTypeMap;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let counts = DayTypeMap { swd: 96.0, sed: 36.0, nswd: 165.0, nsed: 68.0 };
    let scenarios = build_scenarios(&LevelProbabilities::default(), &day_probabilities(&counts)?)?;
    println!("{:>3}  {:<12} {:>8}", "id", "scenario", "prob %");
    for s in &scenarios {
        println!("{:>3}  {:<12} {:>8.2}", s.id, s.label(), 100.0 * s.probability);
    }
    let total: f64 = scenarios.iter().map(|s| s.probability).sum();
    println!("total {:.12}", total);
    Ok(())
}
