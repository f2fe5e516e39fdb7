//! Fits price = α·net + β per day type on the synthetic year and compares
//! the fit to the generator's true coefficients.

use bess_planner::market::{eval_price, net_demand, MarketState};
use bess_planner::pipeline::fit_price_model;
use bess_planner::profiles::{CalendarRule, DayType, Profile, ProfileKind};
use bess_planner::synthetic::{generate, SyntheticSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rule = CalendarRule::default();
    let spec = SyntheticSpec::default();
    let series = generate(&spec, &rule, 5);
    let model = fit_price_model(&series, &rule)?;

    println!("{:<5} {:>10} {:>10} {:>9} {:>9} {:>6}", "day", "alpha", "true", "beta", "true", "rmse");
    for dt in DayType::ALL {
        let f = model.base.get(dt);
        println!(
            "{:<5} {:>10.6} {:>10.6} {:>9.3} {:>9.3} {:>6.3}",
            dt.as_str(),
            f.alpha,
            spec.price_alpha.get(dt),
            f.beta,
            spec.price_beta.get(dt),
            f.rmse
        );
    }

    // Price along a stylized summer-weekday net-demand day.
    let net = net_demand(&MarketState {
        demand: Profile::daily(ProfileKind::Demand, (0..24).map(|h| 25_000.0 + 800.0 * h as f64).collect())?,
        solar: Profile::daily(ProfileKind::Solar, (0..24).map(|h| if (7..18).contains(&h) { 4_000.0 } else { 0.0 }).collect())?,
        wind: Profile::daily(ProfileKind::Wind, vec![1_000.0; 24])?,
    })?;
    let price = eval_price(&model, DayType::SWD, &net);
    let line: Vec<String> = price.values.iter().step_by(3).map(|p| format!("{p:.1}")).collect();
    println!("SWD prices every 3 h: {}", line.join(" "));
    Ok(())
}
