//! Two-cluster k-means on daily renewable profiles and per-day-type demand
//! averaging.

use chrono::NaiveDate;
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::{classify_day, CalendarRule, DayTypeMap, Profile, ProfileKind};

const MAX_ITERATIONS: usize = 100;
const SHIFT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Level {
    #[serde(rename = "H")]
    High,
    #[serde(rename = "L")]
    Low,
}

impl Level {
    pub fn as_char(self) -> char {
        match self {
            Level::High => 'H',
            Level::Low => 'L',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterResult {
    pub high: Profile,
    pub low: Profile,
    /// One label per input day, in input order.
    pub assignments: Vec<Level>,
    /// Within-cluster sum of squared distances.
    pub inertia: f64,
    /// Inertia after every assignment step, refinement moves included.
    pub history: Vec<f64>,
}

/// On-disk form: `{"high": [...], "low": [...], "assignments": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterFile {
    pub high: Vec<f64>,
    pub low: Vec<f64>,
    pub assignments: Vec<Level>,
}

impl ClusterResult {
    pub fn to_file(&self) -> ClusterFile {
        ClusterFile { high: self.high.values.clone(), low: self.low.values.clone(), assignments: self.assignments.clone() }
    }

    pub fn centroid(&self, level: Level) -> &Profile {
        match level {
            Level::High => &self.high,
            Level::Low => &self.low,
        }
    }
}

impl ClusterFile {
    pub fn centroids(&self, kind: ProfileKind) -> Result<(Profile, Profile)> {
        Ok((Profile::daily(kind, self.high.clone())?, Profile::daily(kind, self.low.clone())?))
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn mean_of(points: &[&[f64]], members: impl Iterator<Item = usize>, dim: usize) -> (Vec<f64>, usize) {
    let mut c = vec![0.0; dim];
    let mut n = 0;
    for k in members {
        for (ci, v) in c.iter_mut().zip(points[k]) {
            *ci += v;
        }
        n += 1;
    }
    if n > 0 {
        c.iter_mut().for_each(|v| *v /= n as f64);
    }
    (c, n)
}

fn inertia(points: &[&[f64]], labels: &[usize], centroids: &[Vec<f64>; 2]) -> f64 {
    points.iter().zip(labels).map(|(p, &l)| sq_dist(p, &centroids[l])).sum()
}

/// Index maximizing `key`, with exact ties broken by the seeded generator.
fn argmax_seeded(keys: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let best = keys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ties: Vec<usize> = (0..keys.len()).filter(|&k| keys[k] == best).collect();
    *ties.choose(rng).expect("non-empty")
}

/// k = 2 clustering under squared Euclidean distance.
///
/// Initialization is farthest-point: the day with the largest norm, then the
/// day farthest from it. The seed only breaks exact ties. Lloyd iterations are
/// followed by single-point moves until no move lowers the inertia.
pub fn kmeans_two(days: &[Profile], seed: u64) -> Result<ClusterResult> {
    validate_days(days)?;
    let points: Vec<&[f64]> = days.iter().map(|d| d.values.as_slice()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let norms: Vec<f64> = points.iter().map(|p| p.iter().map(|v| v * v).sum()).collect();
    let first = argmax_seeded(&norms, &mut rng);
    let dists: Vec<f64> = points.iter().map(|p| sq_dist(p, points[first])).collect();
    let second = argmax_seeded(&dists, &mut rng);
    kmeans_from(days, [first, second])
}

/// k-means started from the given pair of days as centroids.
pub fn kmeans_from(days: &[Profile], init: [usize; 2]) -> Result<ClusterResult> {
    validate_days(days)?;
    let points: Vec<&[f64]> = days.iter().map(|d| d.values.as_slice()).collect();
    let dim = points[0].len();
    let n = points.len();
    if init[0] >= n || init[1] >= n || sq_dist(points[init[0]], points[init[1]]) == 0.0 {
        return Err(Error::Degenerate("initial centroids must be two distinct days".into()));
    }
    let mut centroids = [points[init[0]].to_vec(), points[init[1]].to_vec()];
    let mut labels = vec![usize::MAX; n];
    let mut history = Vec::new();

    for _ in 0..MAX_ITERATIONS {
        let mut changed = false;
        for (k, p) in points.iter().enumerate() {
            let d0 = sq_dist(p, &centroids[0]);
            let d1 = sq_dist(p, &centroids[1]);
            let l = if d0 < d1 {
                0
            } else if d1 < d0 {
                1
            } else if labels[k] != usize::MAX {
                labels[k]
            } else {
                0
            };
            changed |= l != labels[k];
            labels[k] = l;
        }
        history.push(inertia(&points, &labels, &centroids));
        for c in 0..2 {
            if !labels.contains(&c) {
                // Reseed with the point farthest from the surviving centroid.
                let other = &centroids[1 - c];
                let far = (0..n)
                    .max_by(|&a, &b| sq_dist(points[a], other).total_cmp(&sq_dist(points[b], other)).then(b.cmp(&a)))
                    .expect("non-empty");
                labels[far] = c;
                changed = true;
            }
        }
        let mut shift = 0.0f64;
        for (c, centroid) in centroids.iter_mut().enumerate() {
            let (m, _) = mean_of(&points, (0..n).filter(|&k| labels[k] == c), dim);
            shift = shift.max(sq_dist(&m, centroid).sqrt());
            *centroid = m;
        }
        history.push(inertia(&points, &labels, &centroids));
        if !changed || shift < SHIFT_TOL {
            break;
        }
    }

    refine(&points, &mut labels, &mut centroids, &mut history);
    let inertia_final = inertia(&points, &labels, &centroids);

    let energy = |c: &Vec<f64>| c.iter().sum::<f64>();
    let (e0, e1) = (energy(&centroids[0]), energy(&centroids[1]));
    let high_idx = if e0 > e1 {
        0
    } else if e1 > e0 {
        1
    } else if centroids[0].partial_cmp(&centroids[1]) == Some(std::cmp::Ordering::Less) {
        1
    } else {
        0
    };
    let kind = days[0].kind;
    let step = days[0].step_minutes;
    let profile = |v: Vec<f64>| Profile { kind, step_minutes: step, start: None, values: v };
    let assignments = labels.iter().map(|&l| if l == high_idx { Level::High } else { Level::Low }).collect();
    let [c0, c1] = centroids;
    let (high, low) = if high_idx == 0 { (c0, c1) } else { (c1, c0) };
    Ok(ClusterResult { high: profile(high), low: profile(low), assignments, inertia: inertia_final, history })
}

/// Moves single points between clusters while that strictly lowers inertia.
fn refine(points: &[&[f64]], labels: &mut [usize], centroids: &mut [Vec<f64>; 2], history: &mut Vec<f64>) {
    let dim = centroids[0].len();
    let mut sizes = [labels.iter().filter(|&&l| l == 0).count(), 0];
    sizes[1] = labels.len() - sizes[0];
    loop {
        let mut best: Option<(usize, f64)> = None;
        for (k, p) in points.iter().enumerate() {
            let a = labels[k];
            let b = 1 - a;
            if sizes[a] <= 1 {
                continue;
            }
            let (na, nb) = (sizes[a] as f64, sizes[b] as f64);
            let delta = nb / (nb + 1.0) * sq_dist(p, &centroids[b]) - na / (na - 1.0) * sq_dist(p, &centroids[a]);
            let tol = 1e-12 * (1.0 + sq_dist(p, &centroids[a]));
            if delta < -tol && best.is_none_or(|(_, d)| delta < d) {
                best = Some((k, delta));
            }
        }
        let Some((k, _)) = best else { break };
        let a = labels[k];
        labels[k] = 1 - a;
        sizes[a] -= 1;
        sizes[1 - a] += 1;
        for (c, centroid) in centroids.iter_mut().enumerate() {
            *centroid = mean_of(points, (0..labels.len()).filter(|&j| labels[j] == c), dim).0;
        }
        history.push(inertia(points, labels, centroids));
    }
}

fn validate_days(days: &[Profile]) -> Result<()> {
    if days.len() < 2 {
        return Err(Error::Degenerate(format!("need at least 2 days, got {}", days.len())));
    }
    let dim = days[0].len();
    if days.iter().any(|d| d.len() != dim) {
        return Err(Error::Alignment("daily profiles differ in length".into()));
    }
    if days.iter().all(|d| d.values == days[0].values) {
        return Err(Error::Degenerate("fewer than 2 distinct profiles".into()));
    }
    Ok(())
}

/// Arithmetic mean profile per day type. Days are averaged in date order, so
/// the result does not depend on the input order.
pub fn demand_clusters(days: &[(NaiveDate, Profile)], rule: &CalendarRule) -> Result<DayTypeMap<Profile>> {
    let mut sorted: Vec<&(NaiveDate, Profile)> = days.iter().collect();
    sorted.sort_by_key(|(d, _)| *d);
    let dim = sorted.first().map(|(_, p)| p.len()).unwrap_or(0);
    if sorted.iter().any(|(_, p)| p.len() != dim) {
        return Err(Error::Alignment("daily demand profiles differ in length".into()));
    }
    let mut buckets: DayTypeMap<Vec<&Profile>> = DayTypeMap::default();
    for (date, p) in sorted {
        buckets.get_mut(classify_day(*date, rule)).push(p);
    }
    buckets.try_map(|dt, members| {
        let first = members.first().ok_or_else(|| Error::Coverage(format!("no {dt} days in the demand data")))?;
        let mut sum = vec![0.0; dim];
        for p in members {
            for (s, v) in sum.iter_mut().zip(&p.values) {
                *s += v;
            }
        }
        let n = members.len() as f64;
        Ok(Profile { kind: first.kind, step_minutes: first.step_minutes, start: None, values: sum.into_iter().map(|s| s / n).collect() })
    })
}

/// Empirical `(p_high, p_low)` label frequencies.
pub fn level_probabilities(result: &ClusterResult) -> (f64, f64) {
    let n = result.assignments.len() as f64;
    let high = result.assignments.iter().filter(|&&l| l == Level::High).count() as f64;
    (high / n, (n - high) / n)
}
