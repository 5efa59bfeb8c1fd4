//! Piecewise-constant functions on half-open intervals.
//!
//! A [`StepFunction`] takes the value `vᵢ` on `[tᵢ₋₁, tᵢ)`. Breakpoints are
//! stored explicitly so restriction, merging and rearrangement never lose
//! information; adjacent pieces with equal values are only merged by
//! [`StepFunction::normalized`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::weighted_means::{WeightedMean, WeightedSample};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStepFunction")]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<RawStepFunction> for StepFunction {
    type Error = Error;

    fn try_from(raw: RawStepFunction) -> Result<Self> {
        StepFunction::new(raw.breakpoints, raw.values)
    }
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::Argument(
                "a step function needs at least two breakpoints".into(),
            ));
        }
        if values.len() + 1 != breakpoints.len() {
            return Err(Error::Argument(format!(
                "{} breakpoints require {} values, got {}",
                breakpoints.len(),
                breakpoints.len() - 1,
                values.len()
            )));
        }
        if let Some(t) = breakpoints.iter().find(|t| !t.is_finite()) {
            return Err(Error::Argument(format!("non-finite breakpoint {t}")));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Argument(format!("non-finite value {v}")));
        }
        if let Some(w) = breakpoints.windows(2).find(|w| !(w[0] < w[1])) {
            return Err(Error::Argument(format!(
                "breakpoints must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(StepFunction {
            breakpoints,
            values,
        })
    }

    /// The constant `c` on `[a, b)`.
    pub fn constant(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(vec![a, b], vec![c])
    }

    /// `values.len()` equal pieces covering `[a, b)`.
    pub fn uniform(a: f64, b: f64, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Argument("no values".into()));
        }
        let n = values.len();
        let mut bp: Vec<f64> = (0..n)
            .map(|i| a + (b - a) * (i as f64 / n as f64))
            .collect();
        bp.push(b);
        Self::new(bp, values)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn num_pieces(&self) -> usize {
        self.values.len()
    }

    pub fn start(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn end(&self) -> f64 {
        self.breakpoints[self.breakpoints.len() - 1]
    }

    /// Lebesgue measure of the domain.
    pub fn measure(&self) -> f64 {
        self.end() - self.start()
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.breakpoints.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// `(start, end, value)` for every piece.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, &v)| (w[0], w[1], v))
    }

    /// Value at `t`, or `None` outside `[t₀, tₙ)`.
    pub fn eval(&self, t: f64) -> Option<f64> {
        if !(t >= self.start() && t < self.end()) {
            return None;
        }
        let i = self.breakpoints.partition_point(|&b| b <= t);
        Some(self.values[i - 1])
    }

    pub fn integral(&self) -> f64 {
        self.pieces().map(|(a, b, v)| v * (b - a)).sum()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// The smallest closed interval containing every value.
    pub fn range(&self) -> Interval {
        Interval {
            lo: self.min(),
            hi: self.max(),
        }
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] >= w[1])
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }

    /// Applies `g` to every value.
    pub fn map_values(&self, g: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            self.breakpoints.clone(),
            self.values.iter().map(|&v| g(v)).collect(),
        )
    }

    /// Merges adjacent pieces with equal values.
    pub fn normalized(&self) -> Self {
        let mut bp = vec![self.breakpoints[0]];
        let mut vals: Vec<f64> = Vec::with_capacity(self.values.len());
        for (_, b, v) in self.pieces() {
            if vals.last() == Some(&v) {
                *bp.last_mut().unwrap() = b;
            } else {
                vals.push(v);
                bp.push(b);
            }
        }
        StepFunction {
            breakpoints: bp,
            values: vals,
        }
    }

    /// The restriction to `[a, b)`, splitting boundary pieces exactly.
    pub fn restrict(&self, a: f64, b: f64) -> Result<Self> {
        if !(a < b) || a < self.start() || b > self.end() {
            return Err(Error::Argument(format!(
                "cannot restrict [{}, {}) to [{a}, {b})",
                self.start(),
                self.end()
            )));
        }
        let mut bp = vec![a];
        let mut vals = Vec::new();
        for (s, e, v) in self.pieces() {
            if e <= a || s >= b {
                continue;
            }
            vals.push(v);
            bp.push(e.min(b));
        }
        Self::new(bp, vals)
    }

    /// The nonincreasing function on `[0, measure)` equidistributed with
    /// `self`: pieces sorted by value, descending, each keeping its length.
    pub fn decreasing_rearrangement(&self) -> Self {
        let t0 = self.start();
        let mut order: Vec<usize> = (0..self.values.len()).collect();
        order.sort_by(|&i, &j| self.values[j].total_cmp(&self.values[i]));
        if order.iter().enumerate().all(|(k, &i)| k == i) {
            let bp = self.breakpoints.iter().map(|&t| t - t0).collect();
            return StepFunction {
                breakpoints: bp,
                values: self.values.clone(),
            };
        }
        let lengths = self.lengths();
        let mut bp = Vec::with_capacity(self.breakpoints.len());
        bp.push(0.0);
        let mut acc = 0.0;
        for &i in &order {
            acc += lengths[i];
            bp.push(acc);
        }
        StepFunction {
            breakpoints: bp,
            values: order.iter().map(|&i| self.values[i]).collect(),
        }
    }

    /// The affine reparametrization onto `[0, 1)`.
    pub fn canonical_reparam(&self) -> Self {
        let (t0, len) = (self.start(), self.measure());
        if t0 == 0.0 && len == 1.0 {
            return self.clone();
        }
        let n = self.breakpoints.len();
        let mut bp: Vec<f64> = self.breakpoints.iter().map(|&t| (t - t0) / len).collect();
        bp[0] = 0.0;
        bp[n - 1] = 1.0;
        StepFunction {
            breakpoints: bp,
            values: self.values.clone(),
        }
    }

    /// Exact `‖f − g‖₁` on the merged breakpoint grid.
    pub fn l1_distance(&self, other: &StepFunction) -> Result<f64> {
        if self.start() != other.start() || self.end() != other.end() {
            return Err(Error::Argument(format!(
                "domains differ: [{}, {}) vs [{}, {})",
                self.start(),
                self.end(),
                other.start(),
                other.end()
            )));
        }
        Ok(merged_l1(self, other))
    }

    /// Measure of `RG(self) ∖ f_range`, where `RG` is the smallest closed
    /// interval containing the values.
    pub fn range_excess(&self, f_range: Interval) -> f64 {
        let (lo, hi) = (self.min(), self.max());
        let below = (hi.min(f_range.lo) - lo).max(0.0);
        let above = (hi - lo.max(f_range.hi)).max(0.0);
        below + above
    }

    /// Whether the decreasing rearrangements of `self` and `other` agree up
    /// to an L¹ distance of `tol`. Domains of measure differing by more than
    /// `tol` are never equidistributed.
    pub fn is_equidistributed(&self, other: &StepFunction, tol: f64) -> bool {
        let (f, g) = (
            self.decreasing_rearrangement(),
            other.decreasing_rearrangement(),
        );
        if (f.measure() - g.measure()).abs() > tol {
            return false;
        }
        merged_l1(&f, &g) <= tol
    }

    /// The sample of piece values weighted by piece lengths.
    pub fn to_sample(&self) -> Result<WeightedSample> {
        WeightedSample::new(self.values.clone(), self.lengths())
    }

    /// `M((f|D₁,…,f|Dₙ), (|D₁|,…,|Dₙ|))` for the pieces `Dᵢ`.
    pub fn integral_mean(&self, mean: &dyn WeightedMean) -> Result<f64> {
        mean.evaluate(&self.to_sample()?)
    }
}

/// Free-function form of [`StepFunction::integral_mean`].
pub fn integral_mean_of_step(mean: &dyn WeightedMean, sf: &StepFunction) -> Result<f64> {
    sf.integral_mean(mean)
}

/// L¹ distance over the common part of two domains sharing a left endpoint;
/// whatever one function covers beyond the other's end counts as `|v|·len`.
fn merged_l1(f: &StepFunction, g: &StepFunction) -> f64 {
    let (fb, gb) = (f.breakpoints(), g.breakpoints());
    let (mut i, mut j) = (0, 0);
    let mut t = f.start().max(g.start());
    let mut total = 0.0;
    while i < f.values.len() && j < g.values.len() {
        let end = fb[i + 1].min(gb[j + 1]);
        if end > t {
            total += (f.values[i] - g.values[j]).abs() * (end - t);
            t = end;
        }
        if fb[i + 1] <= end {
            i += 1;
        }
        if gb[j + 1] <= end {
            j += 1;
        }
    }
    for (s, e, v) in f.pieces().skip(i).chain(g.pieces().skip(j)) {
        total += v.abs() * (e - s.max(t));
    }
    total
}
