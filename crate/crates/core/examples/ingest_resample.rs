//! Reads an hourly `timestamp,value` CSV, resamples it to 15 minutes and
//! back, and shows that energy is preserved. Also shows the two kinds of
//! rejected input: a gap in the timestamps and a malformed row.

use bess_planner::profiles::{classify_day, parse_timeseries, resample, CalendarRule, ColumnMap, ProfileKind};

fn hourly_csv(days: usize) -> String {
    let mut text = String::from("timestamp,value\n");
    for d in 0..days {
        for h in 0..24 {
            let load = 30.0 + 8.0 * (std::f64::consts::PI * (h as f64 - 8.0) / 12.0).sin().max(0.0);
            text.push_str(&format!("2015-07-{:02}T{h:02}:00,{load:.3}\n", 14 + d));
        }
    }
    text
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cols = ColumnMap::default();
    let hourly = parse_timeseries(&hourly_csv(3), "hourly.csv", &cols, ProfileKind::Demand)?;
    let fine = resample(&hourly, 15)?;
    let back = resample(&fine, 60)?;
    println!("hourly: {} samples, energy {:.3} MWh", hourly.len(), hourly.energy());
    println!("15-min: {} samples, energy {:.3} MWh", fine.len(), fine.energy());
    println!("round trip equal: {}", back.values == hourly.values);

    let rule = CalendarRule::default();
    for (date, day) in fine.days()? {
        println!("{date} {:<4} peak {:.2} MW", classify_day(date, &rule).as_str(), day.values.iter().cloned().fold(0.0, f64::max));
    }

    let gap = "timestamp,value\n2015-07-14T00:00,1\n2015-07-14T01:00,2\n2015-07-14T03:00,3\n";
    match parse_timeseries(gap, "gap.csv", &cols, ProfileKind::Demand) {
        Err(e) => println!("gap rejected (exit {}): {e}", e.exit_code()),
        Ok(_) => println!("gap accepted?"),
    }
    let bad = "timestamp,value\n2015-07-14T00:00,1\n2015-07-14T01:00,oops\n";
    match parse_timeseries(bad, "bad.csv", &cols, ProfileKind::Demand) {
        Err(e) => println!("bad row rejected (exit {}): {e}", e.exit_code()),
        Ok(_) => println!("bad row accepted?"),
    }
    Ok(())
}
