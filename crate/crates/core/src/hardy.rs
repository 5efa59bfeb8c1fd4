//! Hardy constants and the Hardy functional.
//!
//! The Hardy constant of a mean `M` is the smallest `C` with
//! `∫₀^∞ M(f|[0,t)) dt ≤ C ∫₀^∞ f(t) dt`. Null-homogeneous means reduce this
//! to a finite horizon `[0, s)`, which is where the functional is evaluated.

use std::f64::consts::E;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::fmt_num;
use crate::integral_means::{FunctionHandle, IntegralDeviation, IntegralGini, IntegralMean};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::roots::Bisection;
use crate::step_functions::StepFunction;
use crate::weighted_means::{validate_ratio_function, DeviationKind, DeviationSpec, WeightedMean};

/// Dyadic levels used by the step profile family.
const STEP_PROFILE_LEVELS: i32 = 20;
const MAX_BRACKET_DOUBLINGS: usize = 200;

/// A real number, `+∞`, or a value known only to be finite and bounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExtendedReal {
    Finite { value: f64 },
    PosInfinity,
    UnknownFinite { upper_bound: f64 },
}

impl ExtendedReal {
    pub fn finite(value: f64) -> Self {
        ExtendedReal::Finite { value }
    }

    /// The value when it is known exactly (`+∞` included).
    pub fn value(&self) -> Option<f64> {
        match *self {
            ExtendedReal::Finite { value } => Some(value),
            ExtendedReal::PosInfinity => Some(f64::INFINITY),
            ExtendedReal::UnknownFinite { .. } => None,
        }
    }

    /// The best certified upper bound.
    pub fn upper_bound(&self) -> f64 {
        match *self {
            ExtendedReal::Finite { value } => value,
            ExtendedReal::PosInfinity => f64::INFINITY,
            ExtendedReal::UnknownFinite { upper_bound } => upper_bound,
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, ExtendedReal::PosInfinity)
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ExtendedReal::Finite { value } => f.write_str(&fmt_num(value)),
            ExtendedReal::PosInfinity => f.write_str("inf"),
            ExtendedReal::UnknownFinite { upper_bound } => {
                write!(f, "unknown<={}", fmt_num(upper_bound))
            }
        }
    }
}

/// Hardy constant of the power mean `P_p`: `(1−p)^{−1/p}` for `p < 1`,
/// `p ≠ 0`; `e` for `p = 0`; `+∞` for `p ≥ 1`.
pub fn hardy_constant_power(p: f64) -> ExtendedReal {
    if p >= 1.0 {
        ExtendedReal::PosInfinity
    } else if p == 0.0 {
        ExtendedReal::finite(E)
    } else {
        ExtendedReal::finite((1.0 - p).powf(-1.0 / p))
    }
}

/// Hardy constant of the Gini mean `G_{p,q}`.
///
/// Finite and explicit when `min(p,q) ≤ 0 ≤ max(p,q) < 1`, infinite when
/// `min(p,q) > 0` or `max(p,q) ≥ 1`. For `max(p,q) < 0` the constant is
/// finite but unknown; it is bounded by Carleman's constant `e`.
pub fn hardy_constant_gini(p: f64, q: f64) -> ExtendedReal {
    let (lo, hi) = (p.min(q), p.max(q));
    if p == 0.0 && q == 0.0 {
        ExtendedReal::finite(E)
    } else if lo > 0.0 || hi >= 1.0 {
        ExtendedReal::PosInfinity
    } else if hi < 0.0 {
        ExtendedReal::UnknownFinite { upper_bound: E }
    } else if q == 0.0 || p == 0.0 {
        // G_{p,0} = G_{0,p} is the power mean
        hardy_constant_power(p + q)
    } else {
        ExtendedReal::finite(((1.0 - q) / (1.0 - p)).powf(1.0 / (p - q)))
    }
}

/// Hardy constant of the deviation mean generated by `E(x,y) = f(x/y)` with
/// `f` strictly increasing, concave and `f(1) = 0`: the positive root `c` of
/// `∫₀ᶜ f(1/t) dt = 0`, or `+∞` when `∫₀¹ f(1/t) dt` diverges.
pub fn concave_deviation_hardy_constant(
    f: &(dyn Fn(f64) -> f64 + Send + Sync),
    tol: f64,
    quad: &QuadratureConfig,
) -> Result<ExtendedReal> {
    if !(tol > 0.0) {
        return Err(Error::Argument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    validate_ratio_function(f)?;
    let g = |t: f64| -> Result<f64> {
        let v = f(1.0 / t);
        if v.is_nan() {
            return Err(Error::Domain(format!("f(1/t) is NaN at t = {t}")));
        }
        Ok(v)
    };
    // f(1/t) > 0 on (0,1), so the integral up to 1 is the positive head
    let head = match integrate(g, 0.0, 1.0, quad) {
        Ok(est) => est.value,
        Err(Error::Integrability(_)) => return Ok(ExtendedReal::PosInfinity),
        Err(e) => return Err(e),
    };
    if !head.is_finite() {
        return Ok(ExtendedReal::PosInfinity);
    }
    // beyond 1 the integrand is negative, so c ↦ head + ∫₁ᶜ is decreasing
    let big = |c: f64| -> Result<f64> { Ok(head + integrate(g, 1.0, c, quad)?.value) };
    let mut hi = 2.0;
    let mut found = false;
    for _ in 0..MAX_BRACKET_DOUBLINGS {
        if big(hi)? <= 0.0 {
            found = true;
            break;
        }
        hi *= 2.0;
    }
    if !found {
        return Err(Error::BracketFailure {
            lo: 1.0,
            hi,
            lo_residual: head,
            hi_residual: f64::NAN,
        });
    }
    let c = Bisection::with_tol(tol).bisect_decreasing(big, 1.0, hi)?;
    Ok(ExtendedReal::finite(c))
}

/// One evaluation of the Hardy functional on `[0, s)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardyReport {
    /// `∫₀ˢ M(f|[0,t)) dt`; the upper Riemann bound when certified.
    pub numerator: f64,
    /// `∫₀ˢ f`.
    pub denominator: f64,
    pub ratio: f64,
    pub reference_constant: Option<ExtendedReal>,
    /// `reference − ratio`, using the bound for unknown-finite constants.
    pub margin: f64,
    pub s: f64,
    pub grid: usize,
    /// Whether `numerator` is a rigorous upper bound (up to inner
    /// quadrature tolerance) rather than a midpoint estimate.
    pub certified: bool,
    /// Lower and upper Riemann bounds on the numerator when certified.
    pub numerator_bounds: Option<(f64, f64)>,
}

fn margin_of(reference: Option<ExtendedReal>, ratio: f64) -> f64 {
    reference.map_or(f64::NAN, |r| r.upper_bound() - ratio)
}

/// `F(0+)` for a nonincreasing `f`: the first value, or the declared
/// supremum when `f` is singular at the start.
fn initial_prefix_mean(f: &FunctionHandle) -> f64 {
    match f {
        FunctionHandle::Step(sf) => sf.values()[0],
        FunctionHandle::Analytic(_) => match f.eval(f.start()) {
            Ok(v) => v,
            Err(_) => f.declared_range().hi,
        },
    }
}

/// Evaluates `∫₀ˢ M(f|[0,t)) dt / ∫₀ˢ f` on a `grid`-cell partition (for
/// step functions, `grid` cells per piece).
///
/// Closed-form prefix means are used when the mean exposes them for `f`.
/// Otherwise, for nonincreasing `f` the prefix means are nonincreasing in `t`
/// and the left/right Riemann sums bracket the numerator; the upper sum is
/// reported. Other inputs get the midpoint sum and are flagged uncertified.
pub fn hardy_functional(
    imean: &dyn IntegralMean,
    f: &FunctionHandle,
    grid: usize,
    quad: &QuadratureConfig,
) -> Result<HardyReport> {
    if grid == 0 {
        return Err(Error::Argument("grid must be positive".into()));
    }
    if f.start() != 0.0 {
        return Err(Error::Argument(format!(
            "the Hardy functional needs a function on [0, s); domain starts at {}",
            f.start()
        )));
    }
    let s = f.length();
    let denominator = f.integral(quad)?;
    if !(denominator > 0.0 && denominator.is_finite()) {
        return Err(Error::Domain(format!(
            "∫f = {denominator} is not a positive number"
        )));
    }
    let reference = imean.hardy_constant();
    let report = |numerator: f64, certified: bool, bounds: Option<(f64, f64)>| {
        let ratio = numerator / denominator;
        HardyReport {
            numerator,
            denominator,
            ratio,
            reference_constant: reference,
            margin: margin_of(reference, ratio),
            s,
            grid,
            certified,
            numerator_bounds: bounds,
        }
    };

    if let Some(k) = imean.prefix_factor(f) {
        let numerator = k? * denominator;
        return Ok(report(numerator, true, Some((numerator, numerator))));
    }

    let h = s / grid as f64;
    let prefix_mean = |t: f64| imean.integral_mean(&f.prefix(t)?, quad);
    let nonincreasing = f.monotonicity() == crate::integral_means::Monotonicity::Nonincreasing;
    let f0 = initial_prefix_mean(f);
    if nonincreasing && f0.is_finite() {
        // step functions: every piece gets `grid` cells of its own, so tall
        // narrow pieces near 0 are resolved as finely as the rest
        let mut nodes: Vec<f64> = match f {
            FunctionHandle::Step(sf) => sf
                .pieces()
                .flat_map(|(a, b, _)| (1..=grid).map(move |i| a + (b - a) * i as f64 / grid as f64))
                .collect(),
            FunctionHandle::Analytic(_) => (1..=grid).map(|i| h * i as f64).collect(),
        };
        *nodes.last_mut().expect("grid ≥ 1") = s;
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        let inner: Vec<f64> = nodes
            .par_iter()
            .map(|&t| prefix_mean(t))
            .collect::<Result<_>>()?;
        let (mut lower, mut upper, mut left, mut prev) = (0.0, 0.0, 0.0, f0);
        for (&t, &v) in nodes.iter().zip(&inner) {
            upper += (t - left) * prev;
            lower += (t - left) * v;
            left = t;
            prev = v;
        }
        return Ok(report(upper, true, Some((lower, upper))));
    }
    let mids: Vec<f64> = (0..grid)
        .into_par_iter()
        .map(|i| prefix_mean(h * (i as f64 + 0.5)))
        .collect::<Result<_>>()?;
    Ok(report(h * mids.iter().sum::<f64>(), false, None))
}

/// Partial sums `Σλₙ M(x₁..xₙ)` and `Σλₙxₙ` up to `N`, and their ratio.
pub fn discrete_hardy_check(
    mean: &dyn WeightedMean,
    entries: &[f64],
    weights: &[f64],
    n: usize,
) -> Result<(f64, f64, f64)> {
    if n == 0 || n > entries.len() || entries.len() != weights.len() {
        return Err(Error::Argument(format!(
            "need 1 ≤ N ≤ {} with matching weights, got N = {n}",
            entries.len()
        )));
    }
    let (xs, ws) = (&entries[..n], &weights[..n]);
    let prefixes = mean.prefix_means(xs, ws)?;
    let lhs: f64 = ws.iter().zip(&prefixes).map(|(w, m)| w * m).sum();
    let rhs: f64 = ws.iter().zip(xs).map(|(w, x)| w * x).sum();
    if !(lhs.is_finite() && rhs.is_finite()) {
        return Err(Error::Domain("partial sums overflowed".into()));
    }
    Ok((lhs, rhs, lhs / rhs))
}

/// Which mean a sweep evaluates.
#[derive(Debug, Clone)]
pub enum MeanSpec {
    Gini { p: f64, q: f64 },
    Deviation(DeviationSpec),
}

impl MeanSpec {
    pub fn integral_mean(&self, root_tol: f64, max_iter: usize) -> Box<dyn IntegralMean> {
        match self {
            MeanSpec::Gini { p, q } => Box::new(IntegralGini { p: *p, q: *q }),
            MeanSpec::Deviation(spec) => {
                let mut m = IntegralDeviation::new(spec.clone(), root_tol);
                m.bisection.max_iter = max_iter;
                Box::new(m)
            }
        }
    }

    /// Gini parameters for reporting; NaN for other deviations.
    pub fn parameters(&self) -> (f64, f64) {
        match self {
            MeanSpec::Gini { p, q } => (*p, *q),
            MeanSpec::Deviation(spec) => spec.gini_parameters().unwrap_or((f64::NAN, f64::NAN)),
        }
    }
}

/// Test-function families for sharpness sweeps; each takes one parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `tᵃ`.
    PowerDecay,
    /// `e^{−βt}`.
    Exponential,
    /// Dyadic step approximation of `tᵃ`.
    StepProfile,
    /// The constant `c`.
    Const,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::PowerDecay => "power-decay",
            Family::Exponential => "exponential",
            Family::StepProfile => "step-profile",
            Family::Const => "const",
        }
    }

    pub fn handle(&self, param: f64, s: f64) -> Result<FunctionHandle> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Argument(format!(
                "horizon must be positive, got {s}"
            )));
        }
        match self {
            Family::PowerDecay => FunctionHandle::power_decay(param, s),
            Family::Exponential => FunctionHandle::exponential(param, s),
            Family::StepProfile => step_profile(param, s).map(FunctionHandle::step),
            Family::Const => FunctionHandle::constant(param, s),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        <Family as clap::ValueEnum>::from_str(s, true)
            .map_err(|_| Error::Argument(format!("unknown family '{s}'")))
    }
}

/// `tᵃ` sampled at the midpoint of each dyadic cell `[s2^{−k−1}, s2^{−k})`,
/// with a first cell `[0, s2^{−L})`.
pub fn step_profile(a: f64, s: f64) -> Result<StepFunction> {
    if !a.is_finite() {
        return Err(Error::Argument(format!("exponent must be finite, got {a}")));
    }
    let mut bp = vec![0.0];
    bp.extend((0..=STEP_PROFILE_LEVELS).rev().map(|k| s * 2f64.powi(-k)));
    let values = bp
        .windows(2)
        .map(|w| (0.5 * (w[0] + w[1])).powf(a))
        .collect();
    StepFunction::new(bp, values)
}

/// One row of a sweep; failed rows keep their error.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub mean_p: f64,
    pub mean_q: f64,
    pub family: Family,
    pub param: f64,
    pub s: f64,
    pub grid: usize,
    pub result: Result<HardyReport>,
}

pub const CSV_HEADER: &str =
    "mean_p,mean_q,family,param,s,grid,numerator,denominator,ratio,reference,margin,certified";

impl SweepRow {
    pub fn csv_line(&self) -> String {
        let lead = format!(
            "{},{},{},{},{},{}",
            fmt_num(self.mean_p),
            fmt_num(self.mean_q),
            self.family,
            fmt_num(self.param),
            fmt_num(self.s),
            self.grid
        );
        match &self.result {
            Ok(r) => format!(
                "{lead},{},{},{},{},{},{}",
                fmt_num(r.numerator),
                fmt_num(r.denominator),
                fmt_num(r.ratio),
                r.reference_constant.map_or("nan".into(), |c| c.to_string()),
                fmt_num(r.margin),
                if r.certified { 'Y' } else { 'N' }
            ),
            Err(_) => format!("{lead},nan,nan,nan,nan,nan,N"),
        }
    }
}

/// Evaluates the Hardy functional for every parameter, in parallel, keeping
/// the parameter order.
pub fn sharpness_sweep(
    mean: &MeanSpec,
    family: Family,
    params: &[f64],
    s: f64,
    grid: usize,
    quad: &QuadratureConfig,
    bisection: Bisection,
) -> Vec<SweepRow> {
    let imean = mean.integral_mean(bisection.tol, bisection.max_iter);
    let (mean_p, mean_q) = mean.parameters();
    params
        .par_iter()
        .map(|&param| SweepRow {
            mean_p,
            mean_q,
            family,
            param,
            s,
            grid,
            result: family
                .handle(param, s)
                .and_then(|f| hardy_functional(imean.as_ref(), &f, grid, quad)),
        })
        .collect()
}

/// Largest ratio among successful rows, the reference constant of that row,
/// and whether every ratio respects its finite reference up to `outer_tol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSummary {
    pub max_ratio: f64,
    pub reference: Option<ExtendedReal>,
    pub within_bound: bool,
    pub failed_rows: usize,
}

pub fn summarize(rows: &[SweepRow], outer_tol: f64) -> SweepSummary {
    let mut max_ratio = f64::NAN;
    let mut reference = None;
    let mut within_bound = true;
    let mut failed_rows = 0;
    for row in rows {
        match &row.result {
            Ok(r) => {
                if !(r.ratio <= max_ratio) {
                    max_ratio = r.ratio;
                    reference = r.reference_constant;
                }
                if let Some(ExtendedReal::Finite { value }) = r.reference_constant {
                    within_bound &= r.ratio <= value + outer_tol;
                }
            }
            Err(_) => failed_rows += 1,
        }
    }
    SweepSummary {
        max_ratio,
        reference,
        within_bound,
        failed_rows,
    }
}

/// The Hardy constant a mean is known to have, if any.
pub(crate) fn reference_for_deviation(spec: &DeviationSpec) -> Option<ExtendedReal> {
    match spec.kind() {
        DeviationKind::Gini { p, q } => Some(hardy_constant_gini(*p, *q)),
        DeviationKind::Power { p } => Some(hardy_constant_power(*p)),
        DeviationKind::RatioConcave(f) => {
            concave_deviation_hardy_constant(f.as_ref(), 1e-12, &QuadratureConfig::default()).ok()
        }
        DeviationKind::Custom(_) => None,
    }
}
