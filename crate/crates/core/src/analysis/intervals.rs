use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A maximal time interval on which a probability increases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BackflowInterval {
    pub t_start: f64,
    pub t_end: f64,
    /// `P(t_end) - P(t_start)`.
    pub probability_gain: f64,
    /// Where `P` peaks on the interval; equal to `t_end` unless the
    /// interval runs into the end of the scanned window.
    pub t_peak: f64,
}

/// Knobs of the interval detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorSettings {
    /// Uniform cells laid over `[0, t_max]` before refinement.
    pub initial_cells: usize,
    /// Cells are not split below this width.
    pub min_cell: f64,
    /// Endpoints are bisected to this resolution.
    pub time_resolution: f64,
    /// Step of the finite-difference derivative.
    pub derivative_step: f64,
}

impl Default for DetectorSettings {
    fn default() -> Self {
        Self {
            initial_cells: 2048,
            min_cell: 1e-4,
            time_resolution: 1e-6,
            derivative_step: 1e-3,
        }
    }
}

/// Default reporting threshold on the probability gain.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
struct Sample {
    t: f64,
    p: f64,
    rate: f64,
}

fn finite(value: f64, t: f64, what: &str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite {
            value,
            context: format!("{what} at t = {t}"),
        })
    }
}

/// Probability and rate evaluated together.
trait Curve {
    fn probability(&self, t: f64) -> Result<f64>;
    fn rate(&self, t: f64) -> Result<f64>;

    fn sample(&self, t: f64) -> Result<Sample> {
        Ok(Sample {
            t,
            p: finite(self.probability(t)?, t, "probability")?,
            rate: finite(self.rate(t)?, t, "probability rate")?,
        })
    }
}

struct WithRate<P, R> {
    prob: P,
    rate: R,
}

impl<P, R> Curve for WithRate<P, R>
where
    P: Fn(f64) -> Result<f64>,
    R: Fn(f64) -> Result<f64>,
{
    fn probability(&self, t: f64) -> Result<f64> {
        (self.prob)(t)
    }
    fn rate(&self, t: f64) -> Result<f64> {
        (self.rate)(t)
    }
}

/// Fourth-order differences, one-sided within two steps of the window ends.
struct Differenced<P> {
    prob: P,
    t_max: f64,
    h: f64,
}

impl<P> Curve for Differenced<P>
where
    P: Fn(f64) -> Result<f64>,
{
    fn probability(&self, t: f64) -> Result<f64> {
        (self.prob)(t)
    }

    fn rate(&self, t: f64) -> Result<f64> {
        let h = self.h;
        let p = |k: f64| (self.prob)(t + k * h);
        let d = if t - 2.0 * h < 0.0 {
            (-25.0 * p(0.0)? + 48.0 * p(1.0)? - 36.0 * p(2.0)? + 16.0 * p(3.0)? - 3.0 * p(4.0)?) / (12.0 * h)
        } else if t + 2.0 * h > self.t_max {
            (25.0 * p(0.0)? - 48.0 * p(-1.0)? + 36.0 * p(-2.0)? - 16.0 * p(-3.0)? + 3.0 * p(-4.0)?) / (12.0 * h)
        } else {
            (p(-2.0)? - 8.0 * p(-1.0)? + 8.0 * p(1.0)? - p(2.0)?) / (12.0 * h)
        };
        Ok(d)
    }
}

/// Maximal intervals of `[0, t_max]` on which `prob_fn` rises by more than
/// `tol`, with the derivative taken by finite differences.
pub fn find_backflow_intervals<P>(prob_fn: P, t_max: f64, tol: f64) -> Result<Vec<BackflowInterval>>
where
    P: Fn(f64) -> Result<f64>,
{
    find_backflow_intervals_with(prob_fn, t_max, tol, &DetectorSettings::default())
}

pub fn find_backflow_intervals_with<P>(
    prob_fn: P,
    t_max: f64,
    tol: f64,
    settings: &DetectorSettings,
) -> Result<Vec<BackflowInterval>>
where
    P: Fn(f64) -> Result<f64>,
{
    check_window(t_max, tol, settings)?;
    if 8.0 * settings.derivative_step > t_max {
        return Err(Error::InvalidParameter(format!(
            "window {t_max} too short for derivative step {}",
            settings.derivative_step
        )));
    }
    detect(
        &Differenced {
            prob: prob_fn,
            t_max,
            h: settings.derivative_step,
        },
        t_max,
        tol,
        settings,
    )
}

/// As [`find_backflow_intervals`], with the exact rate `dP/dt` supplied.
///
/// For one particle the rate is `-j(0, t)`, so the interval ends are the
/// sign changes of the current at the origin.
pub fn find_backflow_intervals_with_rate<P, R>(
    prob_fn: P,
    rate_fn: R,
    t_max: f64,
    tol: f64,
) -> Result<Vec<BackflowInterval>>
where
    P: Fn(f64) -> Result<f64>,
    R: Fn(f64) -> Result<f64>,
{
    let settings = DetectorSettings::default();
    check_window(t_max, tol, &settings)?;
    detect(
        &WithRate {
            prob: prob_fn,
            rate: rate_fn,
        },
        t_max,
        tol,
        &settings,
    )
}

fn check_window(t_max: f64, tol: f64, settings: &DetectorSettings) -> Result<()> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::Domain(format!("t_max must be positive and finite, got {t_max}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    if settings.initial_cells == 0 || !(settings.min_cell > 0.0) || !(settings.time_resolution > 0.0) {
        return Err(Error::InvalidParameter(format!("bad detector settings {settings:?}")));
    }
    Ok(())
}

fn rising(s: &Sample) -> bool {
    s.rate > 0.0
}

/// Whether a cell may hide structure its end samples do not show.
fn needs_split(left: &Sample, mid: &Sample, right: &Sample, tol: f64) -> bool {
    let w = right.t - left.t;
    // cubic Hermite interpolant of the end values and slopes, at the midpoint
    let predicted = 0.5 * (left.p + right.p) + w * (left.rate - right.rate) / 8.0;
    (mid.p - predicted).abs() > 0.1 * tol || rising(mid) != rising(left) || rising(mid) != rising(right)
}

fn refine<C: Curve>(curve: &C, left: Sample, right: Sample, tol: f64, settings: &DetectorSettings, out: &mut Vec<Sample>) -> Result<()> {
    // depth-first on an explicit stack keeps samples in time order
    let mut stack = vec![(left, right)];
    while let Some((a, b)) = stack.pop() {
        let mid = curve.sample(0.5 * (a.t + b.t))?;
        if b.t - a.t > 2.0 * settings.min_cell && needs_split(&a, &mid, &b, tol) {
            stack.push((mid, b));
            stack.push((a, mid));
        } else {
            out.push(mid);
            out.push(b);
        }
    }
    Ok(())
}

/// Time in `(a, b]` where the rate changes sign, to `time_resolution`.
fn bisect<C: Curve>(curve: &C, mut a: Sample, mut b: Sample, resolution: f64) -> Result<Sample> {
    while b.t - a.t > resolution {
        let mid = curve.sample(0.5 * (a.t + b.t))?;
        if rising(&mid) == rising(&a) {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(b)
}

fn detect<C: Curve>(curve: &C, t_max: f64, tol: f64, settings: &DetectorSettings) -> Result<Vec<BackflowInterval>> {
    let n = settings.initial_cells;
    let grid: Vec<Sample> = (0..=n)
        .map(|k| curve.sample(if k == n { t_max } else { t_max * k as f64 / n as f64 }))
        .collect::<Result<_>>()?;

    let mut samples = vec![grid[0]];
    for pair in grid.windows(2) {
        refine(curve, pair[0], pair[1], tol, settings, &mut samples)?;
    }

    let mut intervals = Vec::new();
    let mut start = rising(&samples[0]).then_some(samples[0]);
    for pair in samples.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if rising(&a) == rising(&b) {
            continue;
        }
        let edge = bisect(curve, a, b, settings.time_resolution)?;
        if rising(&b) {
            start = Some(edge);
        } else if let Some(s) = start.take() {
            push_interval(&mut intervals, s, edge, tol);
        }
    }
    if let Some(s) = start {
        push_interval(&mut intervals, s, *samples.last().expect("nonempty"), tol);
    }
    Ok(intervals)
}

fn push_interval(out: &mut Vec<BackflowInterval>, start: Sample, end: Sample, tol: f64) {
    let gain = end.p - start.p;
    if gain > tol && end.t > start.t {
        out.push(BackflowInterval {
            t_start: start.t,
            t_end: end.t,
            probability_gain: gain,
            t_peak: end.t,
        });
    }
}

/// Largest gain over the intervals; zero when there are none.
pub fn backflow_amount(intervals: &[BackflowInterval]) -> f64 {
    intervals.iter().map(|i| i.probability_gain).fold(0.0, f64::max)
}

/// Gain `P(t_m) - P(0)` of an interval that opens at `t = 0`; zero otherwise.
pub fn initial_backflow_amount(intervals: &[BackflowInterval]) -> f64 {
    let opening = DetectorSettings::default().time_resolution;
    intervals
        .first()
        .filter(|i| i.t_start <= opening)
        .map_or(0.0, |i| i.probability_gain)
}
