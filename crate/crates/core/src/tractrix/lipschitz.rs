use std::fmt::Write as _;
use std::sync::Arc;

use rand::Rng as _;

use crate::error::Result;
use crate::metric::{Point, Space};
use crate::sampling;

/// A map between two spaces, evaluated pointwise.
pub trait PointMap: Send + Sync {
    fn source(&self) -> &dyn Space;
    fn target(&self) -> &dyn Space;
    fn apply(&self, x: &Point) -> Result<Point>;

    /// Evaluates many points; implementations may share work across them.
    fn apply_many(&self, xs: &[Point]) -> Vec<Result<Point>> {
        xs.iter().map(|x| self.apply(x)).collect()
    }

    /// `d(x, map x)` when both live in one space.
    fn displacement(&self, x: &Point, fx: &Point) -> Result<Option<f64>> {
        if self.source().id() == self.target().id() {
            Ok(Some(self.source().distance(x, fx)?))
        } else {
            Ok(None)
        }
    }
}

type MapFn = dyn Fn(&Point) -> Result<Point> + Send + Sync;

/// A [`PointMap`] from a closure.
#[derive(Clone)]
pub struct FnMap {
    source: Arc<dyn Space>,
    target: Arc<dyn Space>,
    f: Arc<MapFn>,
}

impl FnMap {
    pub fn new(
        source: Arc<dyn Space>,
        target: Arc<dyn Space>,
        f: impl Fn(&Point) -> Result<Point> + Send + Sync + 'static,
    ) -> Self {
        FnMap {
            source,
            target,
            f: Arc::new(f),
        }
    }

    pub fn identity(space: Arc<dyn Space>) -> Self {
        FnMap::new(space.clone(), space, |x| Ok(x.clone()))
    }
}

impl PointMap for FnMap {
    fn source(&self) -> &dyn Space {
        &*self.source
    }

    fn target(&self) -> &dyn Space {
        &*self.target
    }

    fn apply(&self, x: &Point) -> Result<Point> {
        (self.f)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzOptions {
    /// Number of equal-width displacement bins.
    pub bins: usize,
    /// Bootstrap resamples for the confidence interval of ε̂.
    pub bootstrap: usize,
    pub seed: u64,
    /// Pairs closer than this are skipped.
    pub resolution: f64,
}

impl Default for LipschitzOptions {
    fn default() -> Self {
        LipschitzOptions {
            bins: 8,
            bootstrap: 1000,
            seed: 0,
            resolution: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzRecord {
    pub pair: usize,
    pub d_before: f64,
    pub d_after: f64,
    pub ratio: f64,
    /// Smaller of the two points' displacements `d(x, map x)`; NaN when the
    /// map changes spaces.
    pub displacement: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzReport {
    pub records: Vec<LipschitzRecord>,
    /// Pairs closer than the resolution.
    pub skipped: usize,
    /// Pairs where the map failed on a point.
    pub failures: usize,
    pub first_failure: Option<String>,
    pub max_ratio: f64,
    pub worst_pair: Option<usize>,
    /// Nonempty displacement bins in increasing order.
    pub bins: Vec<RatioBin>,
    /// Least-squares fit of `log ratio ≈ -ε·ℓ`.
    pub epsilon_hat: Option<f64>,
    /// Percentile bootstrap 95% interval for ε̂.
    pub epsilon_ci: Option<(f64, f64)>,
}

impl LipschitzReport {
    /// Whether the binned maximum ratios never increase (to 1e-12).
    pub fn bins_nonincreasing(&self) -> bool {
        self.bins.windows(2).all(|w| w[1].max_ratio <= w[0].max_ratio + 1e-12)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("pair,d_before,d_after,ratio,displacement\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.pair, r.d_before, r.d_after, r.ratio, r.displacement
            );
        }
        out
    }
}

/// Samples `d(map x, map y)/d(x, y)` over the given pairs.
pub fn estimate_lipschitz(
    map: &dyn PointMap,
    pairs: &[(Point, Point)],
    opts: &LipschitzOptions,
) -> Result<LipschitzReport> {
    let flat: Vec<Point> = pairs
        .iter()
        .flat_map(|(x, y)| [x.clone(), y.clone()])
        .collect();
    let images = map.apply_many(&flat);
    let mut report = LipschitzReport {
        records: Vec::with_capacity(pairs.len()),
        skipped: 0,
        failures: 0,
        first_failure: None,
        max_ratio: 0.0,
        worst_pair: None,
        bins: Vec::new(),
        epsilon_hat: None,
        epsilon_ci: None,
    };
    for (i, (x, y)) in pairs.iter().enumerate() {
        let d_before = map.source().distance(x, y)?;
        if d_before <= opts.resolution {
            report.skipped += 1;
            continue;
        }
        let (fx, fy) = match (&images[2 * i], &images[2 * i + 1]) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                report.failures += 1;
                report.first_failure.get_or_insert_with(|| format!("pair {i}: {e}"));
                continue;
            }
        };
        let d_after = map.target().distance(fx, fy)?;
        let displacement = match (map.displacement(x, fx)?, map.displacement(y, fy)?) {
            (Some(a), Some(b)) => a.min(b),
            _ => f64::NAN,
        };
        let ratio = d_after / d_before;
        if ratio > report.max_ratio || report.worst_pair.is_none() {
            report.max_ratio = ratio;
            report.worst_pair = Some(i);
        }
        report.records.push(LipschitzRecord {
            pair: i,
            d_before,
            d_after,
            ratio,
            displacement,
        });
    }
    report.bins = bin_ratios(&report.records, opts.bins);
    let fit: Vec<(f64, f64)> = report
        .records
        .iter()
        .filter(|r| r.displacement.is_finite() && r.ratio > 0.0)
        .map(|r| (r.displacement, r.ratio.ln()))
        .collect();
    report.epsilon_hat = fit_epsilon(&fit);
    if report.epsilon_hat.is_some() && opts.bootstrap > 0 {
        report.epsilon_ci = bootstrap_ci(&fit, opts.bootstrap, opts.seed);
    }
    Ok(report)
}

fn bin_ratios(records: &[LipschitzRecord], bins: usize) -> Vec<RatioBin> {
    let max_l = records
        .iter()
        .map(|r| r.displacement)
        .filter(|l| l.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    if bins == 0 || !max_l.is_finite() {
        return Vec::new();
    }
    let width = if max_l > 0.0 { max_l / bins as f64 } else { 1.0 };
    let mut out: Vec<RatioBin> = (0..bins)
        .map(|k| RatioBin {
            lo: k as f64 * width,
            hi: (k + 1) as f64 * width,
            count: 0,
            max_ratio: f64::NEG_INFINITY,
        })
        .collect();
    for r in records.iter().filter(|r| r.displacement.is_finite()) {
        let k = ((r.displacement / width) as usize).min(bins - 1);
        out[k].count += 1;
        out[k].max_ratio = out[k].max_ratio.max(r.ratio);
    }
    out.retain(|b| b.count > 0);
    out
}

fn fit_epsilon(pts: &[(f64, f64)]) -> Option<f64> {
    let sll: f64 = pts.iter().map(|(l, _)| l * l).sum();
    if !(sll > 0.0) {
        return None;
    }
    Some(-pts.iter().map(|(l, y)| l * y).sum::<f64>() / sll)
}

fn bootstrap_ci(pts: &[(f64, f64)], reps: usize, seed: u64) -> Option<(f64, f64)> {
    let mut rng = sampling::rng(seed);
    let n = pts.len();
    let mut estimates = Vec::with_capacity(reps);
    let mut sample = Vec::with_capacity(n);
    for _ in 0..reps {
        sample.clear();
        sample.extend((0..n).map(|_| pts[rng.gen_range(0..n)]));
        if let Some(e) = fit_epsilon(&sample) {
            estimates.push(e);
        }
    }
    if estimates.is_empty() {
        return None;
    }
    estimates.sort_by(f64::total_cmp);
    let q = |p: f64| estimates[((p * (estimates.len() - 1) as f64).round()) as usize];
    Some((q(0.025), q(0.975)))
}
