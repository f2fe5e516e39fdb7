use bess_planner::clustering::{demand_clusters, kmeans_from, kmeans_two, level_probabilities, ClusterResult, Level};
use bess_planner::profiles::{classify_day, CalendarRule, DayType, Profile, ProfileKind};
use bess_planner::synthetic::{generate, SyntheticSpec};
use proptest::prelude::*;

fn day(values: Vec<f64>) -> Profile {
    Profile::daily(ProfileKind::Solar, values).unwrap()
}

fn bump(peak: f64, center: f64) -> Vec<f64> {
    (0..96).map(|t| peak * (-((t as f64 - center) / 12.0).powi(2)).exp()).collect()
}

fn sse(days: &[Profile], labels: &[bool]) -> f64 {
    let mut total = 0.0;
    for side in [true, false] {
        let members: Vec<&Profile> = days.iter().zip(labels).filter(|(_, &l)| l == side).map(|(d, _)| d).collect();
        if members.is_empty() {
            continue;
        }
        let n = members.len() as f64;
        for t in 0..96 {
            let mean = members.iter().map(|d| d.values[t]).sum::<f64>() / n;
            total += members.iter().map(|d| (d.values[t] - mean).powi(2)).sum::<f64>();
        }
    }
    total
}

/// Smallest within-cluster SSE over every non-trivial bipartition.
fn best_partition(days: &[Profile]) -> f64 {
    let n = days.len();
    (1..(1u32 << n) - 1)
        .map(|mask| sse(days, &(0..n).map(|k| mask & (1 << k) != 0).collect::<Vec<_>>()))
        .fold(f64::INFINITY, f64::min)
}

fn labels(r: &ClusterResult) -> Vec<bool> {
    r.assignments.iter().map(|l| *l == Level::High).collect()
}

#[test]
fn six_bump_days_reach_the_best_bipartition() {
    let days: Vec<Profile> = [(10.0, 40.0), (11.0, 44.0), (9.5, 48.0), (4.0, 50.0), (3.0, 46.0), (3.5, 52.0)]
        .iter()
        .map(|&(p, c)| day(bump(p, c)))
        .collect();
    let r = kmeans_two(&days, 1).unwrap();
    let best = best_partition(&days);
    assert!((r.inertia - best).abs() <= 1e-9 * best, "{} vs {best}", r.inertia);
    assert!((sse(&days, &labels(&r)) - r.inertia).abs() <= 1e-9 * best);
}

#[test]
fn demand_representatives_are_bucket_means() {
    let rule = CalendarRule::default();
    let series = generate(&SyntheticSpec::default(), &rule, 21);
    let days = series.demand.days().unwrap();
    let reps = demand_clusters(&days, &rule).unwrap();
    for dt in DayType::ALL {
        let members: Vec<&Profile> = days.iter().filter(|(d, _)| classify_day(*d, &rule) == dt).map(|(_, p)| p).collect();
        for t in 0..96 {
            let mut s = 0.0;
            for m in &members {
                s += m.values[t];
            }
            let mean = s / members.len() as f64;
            assert!((reps.get(dt).values[t] - mean).abs() <= 1e-9 * mean);
        }
    }
    let mut shuffled = days.clone();
    shuffled.reverse();
    let again = demand_clusters(&shuffled, &rule).unwrap();
    for dt in DayType::ALL {
        for (a, b) in again.get(dt).values.iter().zip(&reps.get(dt).values) {
            assert!((a - b).abs() <= 1e-9 * b.abs());
        }
    }
}

#[test]
fn label_frequencies() {
    let mut days: Vec<Profile> = (0..30).map(|_| day(vec![10.0; 96])).collect();
    days.extend((0..70).map(|_| day(vec![1.0; 96])));
    let r = kmeans_two(&days, 0).unwrap();
    let (h, l) = level_probabilities(&r);
    assert!((h - 0.30).abs() < 1e-12 && (l - 0.70).abs() < 1e-12);
}

fn arb_days() -> impl Strategy<Value = Vec<Profile>> {
    proptest::collection::vec((0.0f64..10.0, 20.0f64..70.0, 0.0f64..0.5), 4..12)
        .prop_map(|spec| spec.into_iter().map(|(p, c, noise)| day(bump(p, c).iter().map(|v| v + noise).collect())).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn converged_assignment_is_locally_optimal(days in arb_days()) {
        let r = match kmeans_two(&days, 3) {
            Ok(r) => r,
            Err(_) => return Ok(()),
        };
        prop_assert!(r.inertia >= 0.0);
        prop_assert!(r.high.energy() >= r.low.energy());
        prop_assert_eq!(r.assignments.len(), days.len());
        let base = labels(&r);
        for k in 0..days.len() {
            let mut moved = base.clone();
            moved[k] = !moved[k];
            if moved.iter().all(|&l| l) || moved.iter().all(|&l| !l) {
                continue;
            }
            prop_assert!(sse(&days, &moved) >= r.inertia - 1e-9 * r.inertia.max(1.0));
        }
        for w in r.history.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9 * w[0].max(1.0));
        }
    }

    #[test]
    fn initial_order_does_not_change_the_result(days in arb_days()) {
        let (a, b) = match (kmeans_from(&days, [0, 1]), kmeans_from(&days, [1, 0])) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return Ok(()),
        };
        prop_assert_eq!(a.high, b.high);
        prop_assert_eq!(a.low, b.low);
    }
}
