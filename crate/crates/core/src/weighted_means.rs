//! Finite weighted means.
//!
//! Power means, Gini means in closed form, and deviation means obtained by
//! solving `λ₁E(x₁,y) + … + λₙE(xₙ,y) = 0` for `y` with bisection. Every
//! mean is evaluated on a canonically ordered copy of the sample, so
//! permuting entries together with their weights changes nothing, not even
//! the last bit.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::roots::Bisection;

/// Base-10 exponent magnitude beyond which power sums are accumulated in
/// log space.
const LOG_SPACE_THRESHOLD: f64 = 300.0;
/// Below this `|p − q|` the Gini mean is evaluated in near-diagonal form.
const NEAR_DIAGONAL: f64 = 0.5;
/// Below this `|p − q|` running prefix sums lose too many digits.
const PREFIX_NEAR_DIAGONAL: f64 = 0.05;

/// Probe points per entry when checking that a custom deviation decreases
/// in its second argument.
const MONOTONICITY_PROBES: usize = 16;

/// Entries paired with nonnegative weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSample {
    entries: Vec<f64>,
    weights: Vec<f64>,
}

impl WeightedSample {
    pub fn new(entries: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Argument("sample has no entries".into()));
        }
        if entries.len() != weights.len() {
            return Err(Error::Argument(format!(
                "{} entries but {} weights",
                entries.len(),
                weights.len()
            )));
        }
        if let Some(x) = entries.iter().find(|x| !x.is_finite()) {
            return Err(Error::Argument(format!("non-finite entry {x}")));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::Argument(format!("invalid weight {w}")));
        }
        if !(weights.iter().sum::<f64>() > 0.0) {
            return Err(Error::Argument("weights must have a positive sum".into()));
        }
        Ok(WeightedSample { entries, weights })
    }

    /// Equal unit weights.
    pub fn uniform(entries: Vec<f64>) -> Result<Self> {
        let weights = vec![1.0; entries.len()];
        Self::new(entries, weights)
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.entries.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.entries
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Positive-weight `(entry, weight)` pairs in a fixed total order.
    fn canonical_pairs(&self) -> Vec<(f64, f64)> {
        let mut pairs: Vec<(f64, f64)> = self
            .entries
            .iter()
            .copied()
            .zip(self.weights.iter().copied())
            .filter(|&(_, w)| w > 0.0)
            .collect();
        pairs.sort_by(|a, b| match a.0.total_cmp(&b.0) {
            Ordering::Equal => a.1.total_cmp(&b.1),
            o => o,
        });
        pairs
    }

    fn check_entries(&self, allowed: impl Fn(f64) -> bool, what: &str) -> Result<()> {
        match self.entries.iter().find(|&&x| !allowed(x)) {
            Some(x) => Err(Error::Domain(format!("entry {x} is not {what}"))),
            None => Ok(()),
        }
    }
}

/// `χ_{p,q}(x)`: `(x^p − x^q)/(p − q)`, or `x^p ln x` on the diagonal.
pub fn chi(p: f64, q: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("chi requires x > 0, got {x}")));
    }
    let v = if p == q {
        x.powf(p) * x.ln()
    } else {
        (x.powf(p) - x.powf(q)) / (p - q)
    };
    if v.is_nan() {
        return Err(Error::Domain(format!("chi({p}, {q}, {x}) is not a number")));
    }
    Ok(v)
}

/// The Gini deviation `E_{p,q}(x,y) = y^p χ_{p,q}(x/y)`.
pub fn gini_deviation(p: f64, q: f64, x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::Domain(format!(
            "Gini deviation requires positive arguments, got ({x}, {y})"
        )));
    }
    Ok(y.powf(p) * chi(p, q, x / y)?)
}

fn needs_log_space(pairs: &[(f64, f64)], exponents: &[f64]) -> bool {
    pairs.iter().any(|&(x, _)| {
        let l = x.log10().abs();
        exponents.iter().any(|&p| p.abs() * l > LOG_SPACE_THRESHOLD)
    })
}

/// `ln Σ exp(terms)`, ignoring `-inf` terms.
fn log_sum_exp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY || !m.is_finite() {
        return m;
    }
    m + terms.map(|t| (t - m).exp()).sum::<f64>().ln()
}

fn clamp_to(pairs: &[(f64, f64)], v: f64) -> f64 {
    let lo = pairs.first().map(|p| p.0).unwrap_or(v);
    let hi = pairs.last().map(|p| p.0).unwrap_or(v);
    v.clamp(lo, hi)
}

/// `exp(Σλ x^p ln x / Σλ x^p)`, the diagonal Gini mean.
fn diagonal_gini(pairs: &[(f64, f64)], p: f64) -> f64 {
    let logs: Vec<f64> = pairs.iter().map(|&(x, w)| w.ln() + p * x.ln()).collect();
    let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (num, den) = pairs
        .iter()
        .zip(&logs)
        .fold((0.0, 0.0), |(n, d), (&(x, _), &l)| {
            let w = (l - m).exp();
            (n + w * x.ln(), d + w)
        });
    (num / den).exp()
}

/// Weighted power mean of order `p`; `p = 0` is the geometric mean.
pub fn power_mean(p: f64, s: &WeightedSample) -> Result<f64> {
    if p.is_nan() {
        return Err(Error::Argument("power mean order is NaN".into()));
    }
    if p > 0.0 {
        s.check_entries(|x| x >= 0.0, "nonnegative")?;
    } else {
        s.check_entries(|x| x > 0.0, "positive (required for p <= 0)")?;
    }
    let pairs = s.canonical_pairs();
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    let v = if p == 0.0 {
        (pairs.iter().map(|&(x, w)| w * x.ln()).sum::<f64>() / total).exp()
    } else if needs_log_space(&pairs, &[p]) {
        let ln_sum = log_sum_exp(pairs.iter().map(|&(x, w)| w.ln() + p * x.ln()));
        ((ln_sum - total.ln()) / p).exp()
    } else {
        (pairs.iter().map(|&(x, w)| w * x.powf(p)).sum::<f64>() / total).powf(1.0 / p)
    };
    Ok(clamp_to(&pairs, v))
}

/// Closed-form Gini mean `G_{p,q}`.
pub fn gini_mean(p: f64, q: f64, s: &WeightedSample) -> Result<f64> {
    if p.is_nan() || q.is_nan() {
        return Err(Error::Argument("Gini parameters must not be NaN".into()));
    }
    s.check_entries(|x| x > 0.0, "positive")?;
    let pairs = s.canonical_pairs();
    let v = if p == q {
        diagonal_gini(&pairs, p)
    } else if (p - q).abs() < NEAR_DIAGONAL {
        near_diagonal_gini(&pairs, p, q)
    } else if needs_log_space(&pairs, &[p, q]) {
        let ln_num = log_sum_exp(pairs.iter().map(|&(x, w)| w.ln() + p * x.ln()));
        let ln_den = log_sum_exp(pairs.iter().map(|&(x, w)| w.ln() + q * x.ln()));
        ((ln_num - ln_den) / (p - q)).exp()
    } else {
        let (num, den) = pairs.iter().fold((0.0, 0.0), |(n, d), &(x, w)| {
            (n + w * x.powf(p), d + w * x.powf(q))
        });
        (num / den).powf(1.0 / (p - q))
    };
    Ok(clamp_to(&pairs, v))
}

/// `G_{p,q}` for `p ≈ q`. With `u = λx^q` and `d = p − q`,
/// `ln G = ln1p(Σu·expm1(d ln x) / Σu) / d`, which avoids raising a ratio
/// of nearly equal sums to the power `1/d`.
fn near_diagonal_gini(pairs: &[(f64, f64)], p: f64, q: f64) -> f64 {
    let d = p - q;
    let logs: Vec<f64> = pairs.iter().map(|&(x, w)| w.ln() + q * x.ln()).collect();
    let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (num, den) = pairs
        .iter()
        .zip(&logs)
        .fold((0.0, 0.0), |(n, s), (&(x, _), &l)| {
            let u = (l - m).exp();
            (n + u * (d * x.ln()).exp_m1(), s + u)
        });
    ((num / den).ln_1p() / d).exp()
}

/// Real function of one variable, shared between threads.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// Real function of two variables, shared between threads.
pub type BivariateFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// The shape of a deviation function.
#[derive(Clone)]
pub enum DeviationKind {
    /// `E_{p,q}(x,y) = y^p χ_{p,q}(x/y)`.
    Gini { p: f64, q: f64 },
    /// Power deviation, i.e. `Gini { p, q: 0 }`.
    Power { p: f64 },
    /// `E(x,y) = f(x/y)` for a strictly increasing concave `f` with `f(1) = 0`.
    RatioConcave(ScalarFn),
    /// Arbitrary user-supplied deviation.
    Custom(BivariateFn),
}

impl fmt::Debug for DeviationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeviationKind::Gini { p, q } => write!(f, "Gini({p}, {q})"),
            DeviationKind::Power { p } => write!(f, "Power({p})"),
            DeviationKind::RatioConcave(_) => f.write_str("RatioConcave(..)"),
            DeviationKind::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// A deviation `E` on an open interval `I`: `E(x,x) = 0` and `y ↦ E(x,y)`
/// strictly decreasing.
#[derive(Debug, Clone)]
pub struct DeviationSpec {
    kind: DeviationKind,
    domain: Interval,
}

impl DeviationSpec {
    pub fn gini(p: f64, q: f64) -> Self {
        DeviationSpec {
            kind: DeviationKind::Gini { p, q },
            domain: Interval::positive(),
        }
    }

    pub fn power(p: f64) -> Self {
        DeviationSpec {
            kind: DeviationKind::Power { p },
            domain: Interval::positive(),
        }
    }

    /// `E(x,y) = f(x/y)`; `f` is probed for monotonicity, concavity and
    /// `f(1) = 0` before it is accepted.
    pub fn ratio_concave(f: ScalarFn) -> Result<Self> {
        validate_ratio_function(f.as_ref())?;
        Ok(DeviationSpec {
            kind: DeviationKind::RatioConcave(f),
            domain: Interval::positive(),
        })
    }

    /// A user-supplied deviation on the open interval `domain`. The axioms
    /// are probed on every sample the deviation is applied to.
    pub fn custom(e: BivariateFn, domain: Interval) -> Self {
        DeviationSpec {
            kind: DeviationKind::Custom(e),
            domain,
        }
    }

    pub fn kind(&self) -> &DeviationKind {
        &self.kind
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// The Gini parameters this deviation corresponds to, if any.
    pub fn gini_parameters(&self) -> Option<(f64, f64)> {
        match self.kind {
            DeviationKind::Gini { p, q } => Some((p, q)),
            DeviationKind::Power { p } => Some((p, 0.0)),
            _ => None,
        }
    }

    /// `E(x, y)`; NaN outside the domain.
    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        match &self.kind {
            DeviationKind::Gini { p, q } => gini_deviation(*p, *q, x, y).unwrap_or(f64::NAN),
            DeviationKind::Power { p } => gini_deviation(*p, 0.0, x, y).unwrap_or(f64::NAN),
            DeviationKind::RatioConcave(f) => {
                if x > 0.0 && y > 0.0 {
                    f(x / y)
                } else {
                    f64::NAN
                }
            }
            DeviationKind::Custom(e) => e(x, y),
        }
    }

    /// Probes the deviation axioms at the given points: `E(x,x) = 0` exactly,
    /// and strict decrease in `y` over a grid spanning `[min, max]` of the
    /// points. Only custom deviations are probed; the closed-form kinds
    /// satisfy the axioms by construction.
    pub fn check_axioms_at(&self, points: &[f64]) -> Result<()> {
        if !matches!(self.kind, DeviationKind::Custom(_)) {
            return Ok(());
        }
        for &x in points {
            let e = self.evaluate(x, x);
            if e != 0.0 {
                return Err(Error::AxiomViolation(format!(
                    "E({x}, {x}) = {e}, expected 0"
                )));
            }
        }
        let lo = points.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = points.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(lo < hi) {
            return Ok(());
        }
        let step = (hi - lo) / (MONOTONICITY_PROBES - 1) as f64;
        for &x in points {
            let mut prev = self.evaluate(x, lo);
            for j in 1..MONOTONICITY_PROBES {
                let y = if j == MONOTONICITY_PROBES - 1 {
                    hi
                } else {
                    lo + step * j as f64
                };
                let cur = self.evaluate(x, y);
                if !(cur < prev) {
                    return Err(Error::AxiomViolation(format!(
                        "E({x}, y) is not strictly decreasing near y = {y}"
                    )));
                }
                prev = cur;
            }
        }
        Ok(())
    }
}

/// Probes `f` for the ratio-deviation requirements: `f(1) = 0`, strictly
/// increasing and concave on a geometric grid over `[1/64, 64]`.
pub fn validate_ratio_function(f: &dyn Fn(f64) -> f64) -> Result<()> {
    let at_one = f(1.0);
    if !(at_one.abs() <= 1e-12) {
        return Err(Error::AxiomViolation(format!(
            "f(1) = {at_one}, expected 0"
        )));
    }
    let xs: Vec<f64> = (-24..=24).map(|k| 2f64.powf(k as f64 / 4.0)).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    if let Some(i) = ys.iter().position(|y| !y.is_finite()) {
        return Err(Error::AxiomViolation(format!("f({}) is not finite", xs[i])));
    }
    for i in 1..xs.len() {
        if !(ys[i] > ys[i - 1]) {
            return Err(Error::AxiomViolation(format!(
                "f is not strictly increasing near x = {}",
                xs[i]
            )));
        }
    }
    let slopes: Vec<f64> = (1..xs.len())
        .map(|i| (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]))
        .collect();
    for i in 1..slopes.len() {
        if slopes[i] > slopes[i - 1] * (1.0 + 1e-9) + 1e-12 {
            return Err(Error::AxiomViolation(format!(
                "f is not concave near x = {}",
                xs[i]
            )));
        }
    }
    Ok(())
}

/// The deviation mean: the unique root of `y ↦ Σ λᵢ E(xᵢ, y)`.
///
/// The root lies in `[min entries, max entries]` and is located by bisection
/// to an absolute tolerance `tol`.
pub fn deviation_mean(e: &DeviationSpec, s: &WeightedSample, tol: f64) -> Result<f64> {
    deviation_mean_with(e, s, Bisection::with_tol(tol))
}

pub(crate) fn deviation_mean_with(
    e: &DeviationSpec,
    s: &WeightedSample,
    bisection: Bisection,
) -> Result<f64> {
    if !(bisection.tol > 0.0) {
        return Err(Error::Argument(format!(
            "tolerance must be positive, got {}",
            bisection.tol
        )));
    }
    let domain = e.domain();
    s.check_entries(|x| domain.contains_open(x), "inside the deviation domain")?;
    let pairs = s.canonical_pairs();
    let lo = pairs[0].0;
    let hi = pairs[pairs.len() - 1].0;
    e.check_axioms_at(s.entries())?;
    if lo == hi {
        return Ok(lo);
    }
    let residual = |y: f64| -> Result<f64> {
        let r: f64 = pairs.iter().map(|&(x, w)| w * e.evaluate(x, y)).sum();
        if r.is_nan() {
            Err(Error::Domain(format!(
                "deviation residual is NaN at y = {y}"
            )))
        } else {
            Ok(r)
        }
    };
    let r_lo = residual(lo)?;
    let r_hi = residual(hi)?;
    if r_lo < 0.0 || r_hi > 0.0 {
        return Err(Error::BracketFailure {
            lo,
            hi,
            lo_residual: r_lo,
            hi_residual: r_hi,
        });
    }
    if r_lo == 0.0 {
        return Ok(lo);
    }
    if r_hi == 0.0 {
        return Ok(hi);
    }
    let y = bisection.bisect_decreasing(residual, lo, hi)?;
    Ok(y.clamp(lo, hi))
}

/// Anything that maps a weighted sample to a mean value.
pub trait WeightedMean: Send + Sync {
    fn evaluate(&self, sample: &WeightedSample) -> Result<f64>;

    /// Means of every prefix `(x₁..xₙ, λ₁..λₙ)`, `n = 1..len`.
    fn prefix_means(&self, entries: &[f64], weights: &[f64]) -> Result<Vec<f64>> {
        (1..=entries.len())
            .map(|n| {
                let s = WeightedSample::new(entries[..n].to_vec(), weights[..n].to_vec())?;
                self.evaluate(&s)
            })
            .collect()
    }
}

/// Running power sums for prefix means, or `None` when log space would be
/// required or `p ≈ q` makes the ratio ill-conditioned.
fn running_gini_prefixes(p: f64, q: f64, entries: &[f64], weights: &[f64]) -> Option<Vec<f64>> {
    if (p - q).abs() < PREFIX_NEAR_DIAGONAL {
        return None;
    }
    let unsafe_exponent = entries.iter().any(|x| {
        let l = x.log10().abs();
        p.abs() * l > LOG_SPACE_THRESHOLD || q.abs() * l > LOG_SPACE_THRESHOLD || !l.is_finite()
    });
    if unsafe_exponent {
        return None;
    }
    let (mut num, mut den) = (0.0, 0.0);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut out = Vec::with_capacity(entries.len());
    for (&x, &w) in entries.iter().zip(weights) {
        if w > 0.0 {
            num += w * x.powf(p);
            den += w * x.powf(q);
            lo = lo.min(x);
            hi = hi.max(x);
        }
        if hi < lo {
            return None;
        }
        out.push((num / den).powf(1.0 / (p - q)).clamp(lo, hi));
    }
    Some(out)
}

fn check_prefix_input(entries: &[f64], weights: &[f64]) -> Result<()> {
    if entries.len() != weights.len() {
        return Err(Error::Argument(
            "entries and weights differ in length".into(),
        ));
    }
    Ok(())
}

/// Power mean of order `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerMean {
    pub p: f64,
}

impl WeightedMean for PowerMean {
    fn evaluate(&self, sample: &WeightedSample) -> Result<f64> {
        power_mean(self.p, sample)
    }

    fn prefix_means(&self, entries: &[f64], weights: &[f64]) -> Result<Vec<f64>> {
        check_prefix_input(entries, weights)?;
        let ok = entries.iter().all(|&x| x > 0.0) && self.p != 0.0;
        match ok
            .then(|| running_gini_prefixes(self.p, 0.0, entries, weights))
            .flatten()
        {
            Some(v) => Ok(v),
            None => (1..=entries.len())
                .map(|n| {
                    let s = WeightedSample::new(entries[..n].to_vec(), weights[..n].to_vec())?;
                    power_mean(self.p, &s)
                })
                .collect(),
        }
    }
}

/// Gini mean `G_{p,q}` in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GiniMean {
    pub p: f64,
    pub q: f64,
}

impl WeightedMean for GiniMean {
    fn evaluate(&self, sample: &WeightedSample) -> Result<f64> {
        gini_mean(self.p, self.q, sample)
    }

    fn prefix_means(&self, entries: &[f64], weights: &[f64]) -> Result<Vec<f64>> {
        check_prefix_input(entries, weights)?;
        if entries.iter().all(|&x| x > 0.0) {
            if let Some(v) = running_gini_prefixes(self.p, self.q, entries, weights) {
                return Ok(v);
            }
        }
        (1..=entries.len())
            .map(|n| {
                let s = WeightedSample::new(entries[..n].to_vec(), weights[..n].to_vec())?;
                gini_mean(self.p, self.q, &s)
            })
            .collect()
    }
}

/// Deviation mean solved by bisection.
#[derive(Debug, Clone)]
pub struct DeviationMean {
    pub spec: DeviationSpec,
    pub bisection: Bisection,
}

impl DeviationMean {
    pub fn new(spec: DeviationSpec, tol: f64) -> Self {
        DeviationMean {
            spec,
            bisection: Bisection::with_tol(tol),
        }
    }
}

impl WeightedMean for DeviationMean {
    fn evaluate(&self, sample: &WeightedSample) -> Result<f64> {
        deviation_mean_with(&self.spec, sample, self.bisection)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn sample(entries: &[f64], weights: &[f64]) -> WeightedSample {
        WeightedSample::new(entries.to_vec(), weights.to_vec()).unwrap()
    }

    #[test]
    fn chi_examples() {
        assert_eq!(chi(1.0, 0.0, 3.0).unwrap(), 2.0);
        for (p, q) in [(0.5, -2.0), (3.0, 3.0), (0.0, 0.0), (-1.0, 2.0)] {
            assert_eq!(chi(p, q, 1.0).unwrap(), 0.0);
        }
        assert!((chi(2.0, 2.0, E).unwrap() - E * E).abs() < 1e-14);
        assert!(matches!(chi(1.0, 0.0, 0.0), Err(Error::Domain(_))));
        assert!(chi(1.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn chi_is_continuous_across_the_diagonal() {
        let x = 2.7;
        let on = chi(0.7, 0.7, x).unwrap();
        let near = chi(0.7 + 1e-7, 0.7, x).unwrap();
        assert!((on - near).abs() < 1e-6);
    }

    #[test]
    fn gini_deviation_examples() {
        assert_eq!(gini_deviation(1.0, 0.0, 2.0, 2.0).unwrap(), 0.0);
        assert_eq!(gini_deviation(1.0, 0.0, 4.0, 2.0).unwrap(), 2.0);
        assert!((gini_deviation(0.0, 0.0, E, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(gini_deviation(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(gini_deviation(1.0, 0.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn sample_validation() {
        assert!(WeightedSample::new(vec![], vec![]).is_err());
        assert!(WeightedSample::new(vec![1.0], vec![1.0, 2.0]).is_err());
        assert!(WeightedSample::new(vec![1.0, 2.0], vec![0.0, 0.0]).is_err());
        assert!(WeightedSample::new(vec![1.0], vec![-1.0]).is_err());
        assert!(WeightedSample::new(vec![f64::NAN], vec![1.0]).is_err());
        assert!(WeightedSample::new(vec![1.0, 2.0], vec![0.0, 3.0]).is_ok());
    }

    #[test]
    fn power_mean_examples() {
        assert_eq!(
            power_mean(1.0, &sample(&[1.0, 3.0], &[1.0, 1.0])).unwrap(),
            2.0
        );
        assert!((power_mean(0.0, &sample(&[1.0, 4.0], &[1.0, 1.0])).unwrap() - 2.0).abs() < 1e-15);
        for p in [-3.0, -0.5, 0.0, 0.5, 2.0, 7.0] {
            assert_eq!(
                power_mean(p, &sample(&[1.7; 4], &[0.1, 2.0, 3.0, 1.0])).unwrap(),
                1.7
            );
        }
        assert!(matches!(
            power_mean(0.0, &sample(&[0.0, 1.0], &[1.0, 1.0])),
            Err(Error::Domain(_))
        ));
        assert!(power_mean(-1.0, &sample(&[0.0, 1.0], &[1.0, 1.0])).is_err());
        // zero entries are fine for positive orders
        assert_eq!(
            power_mean(1.0, &sample(&[0.0, 2.0], &[1.0, 1.0])).unwrap(),
            1.0
        );
    }

    #[test]
    fn gini_mean_examples() {
        assert_eq!(
            gini_mean(2.0, 1.0, &sample(&[1.0, 3.0], &[1.0, 1.0])).unwrap(),
            2.5
        );
        let s = sample(&[0.3, 2.0, 5.5], &[1.0, 0.25, 2.0]);
        for p in [-2.0, -0.3, 0.7, 3.0] {
            let g = gini_mean(p, 0.0, &s).unwrap();
            let pm = power_mean(p, &s).unwrap();
            assert!((g - pm).abs() <= 1e-14 * pm, "p = {p}: {g} vs {pm}");
        }
        assert_eq!(
            gini_mean(1.5, -0.5, &sample(&[3.3; 3], &[1.0, 2.0, 3.0])).unwrap(),
            3.3
        );
        // diagonal branch: exp(Σ x^p ln x / Σ x^p) for p = 0 is the geometric mean
        let g00 = gini_mean(0.0, 0.0, &sample(&[1.0, 4.0], &[1.0, 1.0])).unwrap();
        assert!((g00 - 2.0).abs() < 1e-15);
    }

    #[test]
    fn gini_mean_is_symmetric_in_parameters() {
        let s = sample(&[0.5, 1.5, 9.0], &[2.0, 1.0, 0.5]);
        let a = gini_mean(2.5, -1.0, &s).unwrap();
        let b = gini_mean(-1.0, 2.5, &s).unwrap();
        assert!((a - b).abs() < 1e-14 * a);
    }

    #[test]
    fn log_space_path_survives_huge_exponents() {
        let s = sample(&[1e-3, 2.0, 50.0], &[1.0, 1.0, 1.0]);
        let g = gini_mean(400.0, 350.0, &s).unwrap();
        // dominated by the largest entry
        assert!((g - 50.0).abs() < 1e-9, "{g}");
        let p = power_mean(-500.0, &s).unwrap();
        assert!((p - 1e-3).abs() / 1e-3 < 1e-2, "{p}");
        let d = gini_mean(200.0, 200.0, &s).unwrap();
        assert!((d - 50.0).abs() < 1e-9);
    }

    #[test]
    fn log_space_agrees_with_direct_path_near_threshold() {
        let s = sample(&[0.5, 1.5, 9.0], &[2.0, 1.0, 0.5]);
        let direct = gini_mean(300.0, 100.0, &s).unwrap();
        let pairs = s.canonical_pairs();
        let ln_num = log_sum_exp(pairs.iter().map(|&(x, w)| w.ln() + 300.0 * x.ln()));
        let ln_den = log_sum_exp(pairs.iter().map(|&(x, w)| w.ln() + 100.0 * x.ln()));
        let logged = ((ln_num - ln_den) / 200.0).exp();
        assert!((direct - logged).abs() < 1e-12 * direct);
    }

    #[test]
    fn deviation_mean_examples() {
        let arith = DeviationSpec::custom(Arc::new(|x, y| x - y), Interval::real_line());
        let s = sample(&[1.0, 3.0], &[1.0, 1.0]);
        assert!((deviation_mean(&arith, &s, 1e-12).unwrap() - 2.0).abs() < 1e-12);

        let s = sample(&[0.4, 1.0, 3.5, 7.0], &[1.0, 0.3, 2.0, 1.0]);
        let y = deviation_mean(&DeviationSpec::gini(2.0, 1.0), &s, 1e-13).unwrap();
        let g = gini_mean(2.0, 1.0, &s).unwrap();
        assert!((y - g).abs() < 1e-10);

        let c = sample(&[2.5; 3], &[1.0, 2.0, 3.0]);
        assert_eq!(
            deviation_mean(&DeviationSpec::gini(3.0, -1.0), &c, 1e-12).unwrap(),
            2.5
        );
    }

    #[test]
    fn deviation_mean_reports_axiom_violations() {
        // E(x,x) != 0
        let bad = DeviationSpec::custom(Arc::new(|x, y| x - y + 1.0), Interval::real_line());
        let s = sample(&[1.0, 3.0], &[1.0, 1.0]);
        assert!(matches!(
            deviation_mean(&bad, &s, 1e-12),
            Err(Error::AxiomViolation(_))
        ));
        // increasing in y
        let inc = DeviationSpec::custom(Arc::new(|x, y| y - x), Interval::real_line());
        assert!(matches!(
            deviation_mean(&inc, &s, 1e-12),
            Err(Error::AxiomViolation(_))
        ));
        // entry outside the domain
        assert!(matches!(
            deviation_mean(
                &DeviationSpec::gini(1.0, 0.0),
                &sample(&[-1.0, 1.0], &[1.0, 1.0]),
                1e-12
            ),
            Err(Error::Domain(_))
        ));
        assert!(deviation_mean(&DeviationSpec::gini(1.0, 0.0), &s, 0.0).is_err());
    }

    #[test]
    fn ratio_concave_validation() {
        assert!(DeviationSpec::ratio_concave(Arc::new(f64::ln)).is_ok());
        assert!(DeviationSpec::ratio_concave(Arc::new(|x: f64| (x.powf(0.5) - 1.0) / 0.5)).is_ok());
        // convex
        assert!(DeviationSpec::ratio_concave(Arc::new(|x: f64| x * x - 1.0)).is_err());
        // f(1) != 0
        assert!(DeviationSpec::ratio_concave(Arc::new(|x: f64| x.ln() + 1.0)).is_err());
        // decreasing
        assert!(DeviationSpec::ratio_concave(Arc::new(|x: f64| -x.ln())).is_err());
    }

    #[test]
    fn ratio_concave_log_gives_geometric_mean() {
        let spec = DeviationSpec::ratio_concave(Arc::new(f64::ln)).unwrap();
        let s = sample(&[1.0, 4.0], &[1.0, 1.0]);
        assert!((deviation_mean(&spec, &s, 1e-13).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_weight_entries_are_eliminated() {
        let with = sample(&[1.0, 100.0, 4.0], &[1.0, 0.0, 1.0]);
        let without = sample(&[1.0, 4.0], &[1.0, 1.0]);
        assert_eq!(
            gini_mean(2.0, -1.0, &with).unwrap(),
            gini_mean(2.0, -1.0, &without).unwrap()
        );
        assert_eq!(
            power_mean(0.5, &with).unwrap(),
            power_mean(0.5, &without).unwrap()
        );
    }

    #[test]
    fn prefix_means_match_direct_evaluation() {
        let xs = [3.0, 1.0, 0.5, 2.0, 0.25];
        let ws = [1.0, 2.0, 0.5, 1.0, 3.0];
        for mean in [
            Box::new(PowerMean { p: 0.5 }) as Box<dyn WeightedMean>,
            Box::new(PowerMean { p: 0.0 }),
            Box::new(GiniMean { p: 2.0, q: -1.0 }),
            Box::new(GiniMean { p: 0.3, q: 0.3 }),
        ] {
            let fast = mean.prefix_means(&xs, &ws).unwrap();
            for n in 1..=xs.len() {
                let s = sample(&xs[..n], &ws[..n]);
                let direct = mean.evaluate(&s).unwrap();
                assert!((fast[n - 1] - direct).abs() < 1e-13 * direct);
            }
        }
    }
}
