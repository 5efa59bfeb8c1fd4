//! Integral means of functions that are not step functions.
//!
//! Three routes are provided: lower/upper step envelopes for monotone
//! functions, which sandwich the integral mean between two finite weighted
//! means; the integral deviation equation `∫E(f(t),y)dt = 0` solved by
//! bisection with quadrature inside; and the closed-form integral Gini mean.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hardy::{hardy_constant_gini, reference_for_deviation, ExtendedReal};
use crate::interval::Interval;
use crate::quadrature::{integrate, QuadratureConfig};
use crate::roots::Bisection;
use crate::step_functions::StepFunction;
use crate::weighted_means::{
    deviation_mean_with, gini_mean, DeviationKind, DeviationSpec, ScalarFn, WeightedMean,
};

/// Values sampled when probing a custom deviation against a function.
const AXIOM_PROBES: usize = 16;
/// Doublings allowed when the declared range is unbounded above.
const MAX_BRACKET_DOUBLINGS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Nonincreasing,
    Nondecreasing,
    Unknown,
}

/// Closed-form shapes that unlock exact prefix means.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// `f(t) = scale·(t − t₀)^a` with `t₀` the left end of the domain.
    PowerDecay { a: f64, scale: f64 },
}

/// A function given by an evaluator on `[start, end)`.
#[derive(Clone)]
pub struct AnalyticFunction {
    evaluator: ScalarFn,
    start: f64,
    end: f64,
    monotonicity: Monotonicity,
    declared_range: Interval,
    profile: Option<Profile>,
}

impl fmt::Debug for AnalyticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticFunction")
            .field("start", &self.start)
            .field("end", &self.end)
            .field("monotonicity", &self.monotonicity)
            .field("declared_range", &self.declared_range)
            .field("profile", &self.profile)
            .finish_non_exhaustive()
    }
}

/// An integrand on a bounded half-open interval.
///
/// The declared range of an analytic handle plays the role of the essential
/// range: every sampled value must lie in it, and bracketing uses it.
#[derive(Debug, Clone)]
pub enum FunctionHandle {
    Analytic(AnalyticFunction),
    Step(StepFunction),
}

impl FunctionHandle {
    pub fn analytic(
        evaluator: ScalarFn,
        start: f64,
        end: f64,
        monotonicity: Monotonicity,
        declared_range: Interval,
    ) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && start < end) {
            return Err(Error::Argument(format!("invalid domain [{start}, {end})")));
        }
        Ok(FunctionHandle::Analytic(AnalyticFunction {
            evaluator,
            start,
            end,
            monotonicity,
            declared_range,
            profile: None,
        }))
    }

    pub fn step(sf: StepFunction) -> Self {
        FunctionHandle::Step(sf)
    }

    /// `t ↦ tᵃ` on `[0, s)`.
    pub fn power_decay(a: f64, s: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::Argument(format!("exponent must be finite, got {a}")));
        }
        let edge = s.powf(a);
        let (monotonicity, range) = if a < 0.0 {
            (
                Monotonicity::Nonincreasing,
                Interval::new(edge, f64::INFINITY)?,
            )
        } else if a > 0.0 {
            (Monotonicity::Nondecreasing, Interval::new(0.0, edge)?)
        } else {
            (Monotonicity::Nonincreasing, Interval::new(1.0, 1.0)?)
        };
        let mut h = Self::analytic(
            Arc::new(move |t: f64| t.powf(a)),
            0.0,
            s,
            monotonicity,
            range,
        )?;
        if let FunctionHandle::Analytic(af) = &mut h {
            af.profile = Some(Profile::PowerDecay { a, scale: 1.0 });
        }
        Ok(h)
    }

    /// `t ↦ e^{−βt}` on `[0, s)`.
    pub fn exponential(beta: f64, s: f64) -> Result<Self> {
        if !beta.is_finite() {
            return Err(Error::Argument(format!("rate must be finite, got {beta}")));
        }
        let edge = (-beta * s).exp();
        let (monotonicity, range) = if beta >= 0.0 {
            (Monotonicity::Nonincreasing, Interval::new(edge, 1.0)?)
        } else {
            (Monotonicity::Nondecreasing, Interval::new(1.0, edge)?)
        };
        Self::analytic(
            Arc::new(move |t: f64| (-beta * t).exp()),
            0.0,
            s,
            monotonicity,
            range,
        )
    }

    /// The constant `c` on `[0, s)`, held exactly as a one-piece step function.
    pub fn constant(c: f64, s: f64) -> Result<Self> {
        Ok(FunctionHandle::Step(StepFunction::constant(0.0, s, c)?))
    }

    pub fn start(&self) -> f64 {
        match self {
            FunctionHandle::Analytic(af) => af.start,
            FunctionHandle::Step(sf) => sf.start(),
        }
    }

    pub fn end(&self) -> f64 {
        match self {
            FunctionHandle::Analytic(af) => af.end,
            FunctionHandle::Step(sf) => sf.end(),
        }
    }

    pub fn length(&self) -> f64 {
        self.end() - self.start()
    }

    pub fn monotonicity(&self) -> Monotonicity {
        match self {
            FunctionHandle::Analytic(af) => af.monotonicity,
            FunctionHandle::Step(sf) if sf.is_nonincreasing() => Monotonicity::Nonincreasing,
            FunctionHandle::Step(sf) if sf.is_nondecreasing() => Monotonicity::Nondecreasing,
            FunctionHandle::Step(_) => Monotonicity::Unknown,
        }
    }

    pub fn declared_range(&self) -> Interval {
        match self {
            FunctionHandle::Analytic(af) => af.declared_range,
            FunctionHandle::Step(sf) => sf.range(),
        }
    }

    pub fn profile(&self) -> Option<Profile> {
        match self {
            FunctionHandle::Analytic(af) => af.profile,
            FunctionHandle::Step(_) => None,
        }
    }

    /// `f(t)`, checked against the declared range.
    pub fn eval(&self, t: f64) -> Result<f64> {
        match self {
            FunctionHandle::Step(sf) => sf.eval(t).ok_or_else(|| {
                Error::Domain(format!("t = {t} is outside the step function domain"))
            }),
            FunctionHandle::Analytic(af) => {
                let v = (af.evaluator)(t);
                let r = af.declared_range;
                if !v.is_finite() || !r.contains(v) {
                    return Err(Error::RangeViolation {
                        t,
                        value: v,
                        lo: r.lo,
                        hi: r.hi,
                    });
                }
                Ok(v)
            }
        }
    }

    /// The restriction to `[start, start + x)`.
    pub fn prefix(&self, x: f64) -> Result<Self> {
        if !(x > 0.0 && x <= self.length()) {
            return Err(Error::Argument(format!(
                "prefix length {x} outside (0, {}]",
                self.length()
            )));
        }
        match self {
            FunctionHandle::Step(sf) => Ok(FunctionHandle::Step(
                sf.restrict(sf.start(), sf.start() + x)?,
            )),
            FunctionHandle::Analytic(af) => {
                let mut out = af.clone();
                out.end = if x == self.length() {
                    af.end
                } else {
                    af.start + x
                };
                Ok(FunctionHandle::Analytic(out))
            }
        }
    }

    /// `t ↦ f(start + α(t − start))` on `[start, start + length/α)`.
    pub fn rescaled(&self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Argument(format!(
                "scale factor must be positive, got {alpha}"
            )));
        }
        match self {
            FunctionHandle::Step(sf) => {
                let t0 = sf.start();
                let bp = sf
                    .breakpoints()
                    .iter()
                    .map(|&t| t0 + (t - t0) / alpha)
                    .collect();
                Ok(FunctionHandle::Step(StepFunction::new(
                    bp,
                    sf.values().to_vec(),
                )?))
            }
            FunctionHandle::Analytic(af) => {
                let inner = af.evaluator.clone();
                let t0 = af.start;
                let monotonicity = af.monotonicity;
                let mut out = AnalyticFunction {
                    evaluator: Arc::new(move |t: f64| inner(t0 + alpha * (t - t0))),
                    start: t0,
                    end: t0 + (af.end - t0) / alpha,
                    monotonicity,
                    declared_range: af.declared_range,
                    profile: None,
                };
                out.profile =
                    af.profile
                        .map(|Profile::PowerDecay { a, scale }| Profile::PowerDecay {
                            a,
                            scale: scale * alpha.powf(a),
                        });
                Ok(FunctionHandle::Analytic(out))
            }
        }
    }

    /// `∫ g(f(t)) dt` over the domain. Step functions are summed exactly;
    /// analytic handles are integrated on the canonical interval `[0, 1)`.
    pub fn integrate_composed<G>(&self, g: G, quad: &QuadratureConfig) -> Result<f64>
    where
        G: Fn(f64) -> f64,
    {
        match self {
            FunctionHandle::Step(sf) => Ok(sf.pieces().map(|(a, b, v)| g(v) * (b - a)).sum()),
            FunctionHandle::Analytic(af) => {
                let (t0, len) = (af.start, af.end - af.start);
                let est = integrate(|u| Ok(g(self.eval(t0 + len * u)?)), 0.0, 1.0, quad)?;
                Ok(est.value * len)
            }
        }
    }

    /// `∫ f`, in closed form for power-decay profiles.
    pub fn integral(&self, quad: &QuadratureConfig) -> Result<f64> {
        if let Some(Profile::PowerDecay { a, scale }) = self.profile() {
            if a <= -1.0 {
                return Err(Error::Integrability(format!(
                    "t^{a} is not integrable at 0"
                )));
            }
            return Ok(scale * self.length().powf(a + 1.0) / (a + 1.0));
        }
        self.integrate_composed(|v| v, quad)
    }

    /// Node value for envelope sampling, with the declared range standing in
    /// for singular endpoints.
    fn node_value(&self, t: f64, at_start: bool, at_end: bool) -> Result<f64> {
        match self {
            FunctionHandle::Step(sf) => Ok(sf.eval(t).unwrap_or(sf.values()[sf.num_pieces() - 1])),
            FunctionHandle::Analytic(af) => {
                let v = (af.evaluator)(t);
                let r = af.declared_range;
                if v.is_finite() {
                    if !r.contains(v) {
                        return Err(Error::RangeViolation {
                            t,
                            value: v,
                            lo: r.lo,
                            hi: r.hi,
                        });
                    }
                    return Ok(v);
                }
                match (af.monotonicity, at_start, at_end) {
                    (Monotonicity::Nonincreasing, true, _) => Ok(r.hi),
                    (Monotonicity::Nonincreasing, _, true) => Ok(r.lo),
                    (Monotonicity::Nondecreasing, true, _) => Ok(r.lo),
                    (Monotonicity::Nondecreasing, _, true) => Ok(r.hi),
                    _ => Err(Error::RangeViolation {
                        t,
                        value: v,
                        lo: r.lo,
                        hi: r.hi,
                    }),
                }
            }
        }
    }

    fn envelope_nodes(&self, k: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        if k == 0 {
            return Err(Error::Argument(
                "envelope grid size must be positive".into(),
            ));
        }
        let dir = self.monotonicity();
        if dir == Monotonicity::Unknown {
            return Err(Error::Argument(
                "envelopes need a declared monotonicity; pass general functions as step functions"
                    .into(),
            ));
        }
        let (a, b) = (self.start(), self.end());
        let nodes: Vec<f64> = (0..=k)
            .map(|i| {
                if i == k {
                    b
                } else {
                    a + (b - a) * (i as f64 / k as f64)
                }
            })
            .collect();
        let values = nodes
            .iter()
            .enumerate()
            .map(|(i, &t)| self.node_value(t, i == 0, i == k))
            .collect::<Result<Vec<f64>>>()?;
        for (i, w) in values.windows(2).enumerate() {
            let ok = match dir {
                Monotonicity::Nonincreasing => w[0] >= w[1],
                _ => w[0] <= w[1],
            };
            if !ok {
                return Err(Error::MonotonicityViolation(nodes[i + 1]));
            }
        }
        Ok((nodes, values))
    }

    fn envelope(&self, k: usize, pick: fn(f64, f64) -> f64) -> Result<StepFunction> {
        let (nodes, values) = self.envelope_nodes(k)?;
        let cell_values: Vec<f64> = values.windows(2).map(|w| pick(w[0], w[1])).collect();
        if let Some(v) = cell_values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("envelope value {v} is not finite")));
        }
        StepFunction::new(nodes, cell_values)
    }
}

/// Lower step envelope: `K` equal cells, each holding the smaller endpoint
/// value of `f`. Lies below `f` for monotone `f`.
pub fn lower_envelope(f: &FunctionHandle, k: usize) -> Result<StepFunction> {
    f.envelope(k, f64::min)
}

/// Upper step envelope: the larger endpoint value per cell.
pub fn upper_envelope(f: &FunctionHandle, k: usize) -> Result<StepFunction> {
    f.envelope(k, f64::max)
}

/// Means of the lower and upper envelopes at one grid size.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EnvelopeEstimate {
    pub lower: f64,
    pub upper: f64,
    pub grid_size: usize,
    pub gap: f64,
}

impl EnvelopeEstimate {
    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

/// Envelope brackets of `M f` for each grid size in `schedule`.
pub fn estimate_integral_mean(
    mean: &dyn WeightedMean,
    f: &FunctionHandle,
    schedule: &[usize],
) -> Result<Vec<EnvelopeEstimate>> {
    schedule
        .iter()
        .map(|&k| {
            let lower = lower_envelope(f, k)?.integral_mean(mean)?;
            let upper = upper_envelope(f, k)?.integral_mean(mean)?;
            Ok(EnvelopeEstimate {
                lower,
                upper,
                grid_size: k,
                gap: (upper - lower).max(0.0),
            })
        })
        .collect()
}

/// The doubling schedule `2, 4, …, max_k`.
pub fn doubling_schedule(max_k: usize) -> Vec<usize> {
    std::iter::successors(Some(2usize), |&k| k.checked_mul(2))
        .take_while(|&k| k <= max_k)
        .collect()
}

fn probe_custom_axioms(e: &DeviationSpec, f: &FunctionHandle) -> Result<()> {
    if !matches!(e.kind(), DeviationKind::Custom(_)) {
        return Ok(());
    }
    let (a, len) = (f.start(), f.length());
    let values = (0..AXIOM_PROBES)
        .map(|i| f.eval(a + len * (i as f64 + 0.5) / AXIOM_PROBES as f64))
        .collect::<Result<Vec<f64>>>()?;
    e.check_axioms_at(&values)
}

/// Solves `∫E(f(t), y) dt = 0` for `y` by bisection inside the declared
/// range; the left side is strictly decreasing in `y`.
pub fn integral_deviation_mean(
    e: &DeviationSpec,
    f: &FunctionHandle,
    quad: &QuadratureConfig,
    tol: f64,
) -> Result<f64> {
    integral_deviation_mean_with(e, f, quad, Bisection::with_tol(tol))
}

fn integral_deviation_mean_with(
    e: &DeviationSpec,
    f: &FunctionHandle,
    quad: &QuadratureConfig,
    bisection: Bisection,
) -> Result<f64> {
    if let FunctionHandle::Step(sf) = f {
        return deviation_mean_with(e, &sf.to_sample()?, bisection);
    }
    if !(bisection.tol > 0.0) {
        return Err(Error::Argument(format!(
            "tolerance must be positive, got {}",
            bisection.tol
        )));
    }
    let range = f.declared_range();
    let domain = e.domain();
    if range.lo < domain.lo || range.hi > domain.hi {
        return Err(Error::Domain(format!(
            "declared range {range} is not inside the deviation domain {domain}"
        )));
    }
    probe_custom_axioms(e, f)?;
    if range.lo == range.hi {
        return Ok(range.lo);
    }
    let residual = |y: f64| -> Result<f64> {
        let v = f.integrate_composed(|x| e.evaluate(x, y), quad)?;
        if v.is_nan() {
            return Err(Error::Domain(format!(
                "deviation integral is NaN at y = {y}"
            )));
        }
        Ok(v)
    };
    let lo = range.lo;
    if domain.contains_open(lo) {
        let r = residual(lo)?;
        if r < 0.0 {
            return Err(Error::BracketFailure {
                lo,
                hi: range.hi,
                lo_residual: r,
                hi_residual: f64::NAN,
            });
        }
        if r == 0.0 {
            return Ok(lo);
        }
    }
    let hi = if range.hi.is_finite() {
        if domain.contains_open(range.hi) {
            let r = residual(range.hi)?;
            if r > 0.0 {
                return Err(Error::BracketFailure {
                    lo,
                    hi: range.hi,
                    lo_residual: f64::NAN,
                    hi_residual: r,
                });
            }
            if r == 0.0 {
                return Ok(range.hi);
            }
        }
        range.hi
    } else {
        let mut y = if lo > 0.0 {
            2.0 * lo
        } else {
            lo.abs().max(1.0)
        };
        let mut found = None;
        for _ in 0..MAX_BRACKET_DOUBLINGS {
            if residual(y)? <= 0.0 {
                found = Some(y);
                break;
            }
            y *= 2.0;
        }
        found.ok_or(Error::BracketFailure {
            lo,
            hi: y,
            lo_residual: f64::NAN,
            hi_residual: f64::NAN,
        })?
    };
    let y = bisection.bisect_decreasing(residual, lo, hi)?;
    Ok(y.clamp(range.lo, range.hi))
}

/// Integral Gini mean: `(∫f^p / ∫f^q)^{1/(p−q)}`, or
/// `exp(∫f^p ln f / ∫f^p)` when `p = q`.
pub fn integral_gini(p: f64, q: f64, f: &FunctionHandle, quad: &QuadratureConfig) -> Result<f64> {
    if p.is_nan() || q.is_nan() {
        return Err(Error::Argument("Gini parameters must not be NaN".into()));
    }
    if let FunctionHandle::Step(sf) = f {
        return gini_mean(p, q, &sf.to_sample()?);
    }
    let range = f.declared_range();
    if range.lo < 0.0 {
        return Err(Error::Domain(format!(
            "integral Gini means need positive functions; declared range is {range}"
        )));
    }
    // homogeneity: G(f) = c·G(f/c), with c a typical value to keep powers finite
    let c = f.eval(f.start() + 0.5 * f.length())?;
    if !(c > 0.0) {
        return Err(Error::Domain(format!("function value {c} is not positive")));
    }
    let positive = |v: f64| if v > 0.0 { v / c } else { f64::NAN };
    let v = if p == q {
        let num = f.integrate_composed(
            |v| {
                let u = positive(v);
                u.powf(p) * u.ln()
            },
            quad,
        )?;
        let den = f.integrate_composed(|v| positive(v).powf(p), quad)?;
        c * (num / den).exp()
    } else {
        let num = f.integrate_composed(|v| positive(v).powf(p), quad)?;
        let den = f.integrate_composed(|v| positive(v).powf(q), quad)?;
        c * (num / den).powf(1.0 / (p - q))
    };
    if !v.is_finite() {
        return Err(Error::Integrability(format!(
            "integral Gini mean G({p}, {q}) is not finite"
        )));
    }
    Ok(v.clamp(range.lo, range.hi))
}

/// An integral mean: maps a function handle to a value.
pub trait IntegralMean: Send + Sync {
    fn integral_mean(&self, f: &FunctionHandle, quad: &QuadratureConfig) -> Result<f64>;

    /// The factor `k` with `M(f|[0,x)) = k·f(x)` for every `x`, when the
    /// handle's profile makes it available in closed form.
    fn prefix_factor(&self, _f: &FunctionHandle) -> Option<Result<f64>> {
        None
    }

    /// The mean's Hardy constant, when known.
    fn hardy_constant(&self) -> Option<ExtendedReal> {
        None
    }
}

/// Closed-form integral Gini mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralGini {
    pub p: f64,
    pub q: f64,
}

/// Prefix factor of the Gini mean for `scale·tᵃ`: the prefix mean on `[0, x)`
/// equals `xᵃ` times this value times `scale`.
pub fn power_decay_gini_factor(p: f64, q: f64, a: f64) -> Result<f64> {
    let (ap, aq) = (a * p + 1.0, a * q + 1.0);
    if !(ap > 0.0 && aq > 0.0) {
        return Err(Error::Integrability(format!(
            "t^({a}·{p}) or t^({a}·{q}) is not integrable at 0"
        )));
    }
    Ok(if p == q {
        (-a / ap).exp()
    } else {
        (aq / ap).powf(1.0 / (p - q))
    })
}

impl IntegralMean for IntegralGini {
    fn integral_mean(&self, f: &FunctionHandle, quad: &QuadratureConfig) -> Result<f64> {
        integral_gini(self.p, self.q, f, quad)
    }

    fn prefix_factor(&self, f: &FunctionHandle) -> Option<Result<f64>> {
        match f.profile()? {
            Profile::PowerDecay { a, .. } => Some(power_decay_gini_factor(self.p, self.q, a)),
        }
    }

    fn hardy_constant(&self) -> Option<ExtendedReal> {
        Some(hardy_constant_gini(self.p, self.q))
    }
}

/// Integral deviation mean solved by bisection over quadrature.
#[derive(Debug, Clone)]
pub struct IntegralDeviation {
    pub spec: DeviationSpec,
    pub bisection: Bisection,
}

impl IntegralDeviation {
    pub fn new(spec: DeviationSpec, tol: f64) -> Self {
        IntegralDeviation {
            spec,
            bisection: Bisection::with_tol(tol),
        }
    }
}

impl IntegralMean for IntegralDeviation {
    fn integral_mean(&self, f: &FunctionHandle, quad: &QuadratureConfig) -> Result<f64> {
        integral_deviation_mean_with(&self.spec, f, quad, self.bisection)
    }

    /// Gini-type deviations share the closed-form prefix means of `G_{p,q}`.
    fn prefix_factor(&self, f: &FunctionHandle) -> Option<Result<f64>> {
        let (p, q) = self.spec.gini_parameters()?;
        IntegralGini { p, q }.prefix_factor(f)
    }

    fn hardy_constant(&self) -> Option<ExtendedReal> {
        reference_for_deviation(&self.spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weighted_means::PowerMean;
    use std::f64::consts::E;

    fn quad() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn identity() -> FunctionHandle {
        FunctionHandle::power_decay(1.0, 1.0).unwrap()
    }

    #[test]
    fn envelope_examples() {
        let f = identity();
        assert_eq!(lower_envelope(&f, 2).unwrap().values(), &[0.0, 0.5]);
        assert_eq!(upper_envelope(&f, 2).unwrap().values(), &[0.5, 1.0]);
        let c = FunctionHandle::constant(3.0, 1.0).unwrap();
        for k in [1, 3, 8] {
            assert!(lower_envelope(&c, k)
                .unwrap()
                .values()
                .iter()
                .all(|&v| v == 3.0));
            assert!(upper_envelope(&c, k)
                .unwrap()
                .values()
                .iter()
                .all(|&v| v == 3.0));
        }
        let ex = FunctionHandle::exponential(1.0, 1.0).unwrap();
        let lo = lower_envelope(&ex, 2).unwrap();
        assert_eq!(lo.values(), &[(-0.5f64).exp(), (-1.0f64).exp()]);
    }

    #[test]
    fn upper_envelope_refines_monotonically() {
        let f = FunctionHandle::exponential(2.0, 1.0).unwrap();
        let coarse = upper_envelope(&f, 4).unwrap();
        let fine = upper_envelope(&f, 8).unwrap();
        for i in 0..1000 {
            let t = i as f64 / 1000.0;
            assert!(fine.eval(t).unwrap() <= coarse.eval(t).unwrap());
        }
    }

    #[test]
    fn envelopes_need_declared_monotonicity() {
        let f = FunctionHandle::analytic(
            Arc::new(|t: f64| (6.0 * t).sin() + 2.0),
            0.0,
            1.0,
            Monotonicity::Unknown,
            Interval::new(1.0, 3.0).unwrap(),
        )
        .unwrap();
        assert!(matches!(lower_envelope(&f, 4), Err(Error::Argument(_))));
        let lying = FunctionHandle::analytic(
            Arc::new(|t: f64| (6.0 * t).sin() + 2.0),
            0.0,
            1.0,
            Monotonicity::Nondecreasing,
            Interval::new(1.0, 3.0).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            upper_envelope(&lying, 8),
            Err(Error::MonotonicityViolation(_))
        ));
        assert!(lower_envelope(&identity(), 0).is_err());
    }

    #[test]
    fn singular_start_uses_declared_range() {
        let f = FunctionHandle::power_decay(-0.5, 1.0).unwrap();
        let lo = lower_envelope(&f, 4).unwrap();
        assert_eq!(lo.values()[0], 0.25f64.powf(-0.5));
        assert!(matches!(upper_envelope(&f, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn range_violations_are_reported() {
        let f = FunctionHandle::analytic(
            Arc::new(|t: f64| 2.0 * t),
            0.0,
            1.0,
            Monotonicity::Nondecreasing,
            Interval::new(0.0, 1.0).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            upper_envelope(&f, 2),
            Err(Error::RangeViolation { .. })
        ));
        assert!(matches!(
            integral_gini(2.0, 1.0, &f, &quad()),
            Err(Error::RangeViolation { .. })
        ));
    }

    #[test]
    fn estimate_examples() {
        let arith = PowerMean { p: 1.0 };
        let est = estimate_integral_mean(&arith, &identity(), &[2, 4]).unwrap();
        assert_eq!((est[0].lower, est[0].upper), (0.25, 0.75));
        assert_eq!((est[1].lower, est[1].upper), (0.375, 0.625));
        let c = FunctionHandle::constant(1.5, 2.0).unwrap();
        for e in estimate_integral_mean(&arith, &c, &[1, 2, 64]).unwrap() {
            assert_eq!((e.lower, e.upper, e.gap), (1.5, 1.5, 0.0));
        }
        let quadratic =
            estimate_integral_mean(&PowerMean { p: 2.0 }, &identity(), &[1024]).unwrap();
        assert!(quadratic[0].gap < 2e-3);
        assert!(quadratic[0].contains(1.0 / 3f64.sqrt()));
    }

    #[test]
    fn doubling_schedule_shape() {
        assert_eq!(doubling_schedule(16), vec![2, 4, 8, 16]);
        assert_eq!(doubling_schedule(1), Vec::<usize>::new());
    }

    #[test]
    fn integral_deviation_examples() {
        let arith = DeviationSpec::custom(Arc::new(|x, y| x - y), Interval::real_line());
        let y = integral_deviation_mean(&arith, &identity(), &quad(), 1e-12).unwrap();
        assert!((y - 0.5).abs() < 1e-10);
        let g =
            integral_deviation_mean(&DeviationSpec::gini(2.0, 1.0), &identity(), &quad(), 1e-12)
                .unwrap();
        assert!((g - 2.0 / 3.0).abs() < 1e-10, "{g}");
        let c = FunctionHandle::constant(2.5, 1.0).unwrap();
        assert_eq!(
            integral_deviation_mean(&DeviationSpec::gini(-1.0, 3.0), &c, &quad(), 1e-12).unwrap(),
            2.5
        );
    }

    #[test]
    fn integral_deviation_expands_unbounded_brackets() {
        let f = FunctionHandle::power_decay(-0.5, 1.0).unwrap();
        // arithmetic mean of t^-1/2 on [0,1) is 2
        let y = integral_deviation_mean(&DeviationSpec::power(1.0), &f, &quad(), 1e-12).unwrap();
        assert!((y - 2.0).abs() < 1e-8, "{y}");
    }

    #[test]
    fn integral_deviation_rejects_ranges_outside_the_domain() {
        let f = FunctionHandle::analytic(
            Arc::new(|t: f64| t - 0.5),
            0.0,
            1.0,
            Monotonicity::Nondecreasing,
            Interval::new(-0.5, 0.5).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            integral_deviation_mean(&DeviationSpec::gini(1.0, 0.0), &f, &quad(), 1e-12),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn integral_gini_examples() {
        let f = identity();
        assert!((integral_gini(2.0, 1.0, &f, &quad()).unwrap() - 2.0 / 3.0).abs() < 1e-10);
        assert!((integral_gini(1.0, 0.0, &f, &quad()).unwrap() - 0.5).abs() < 1e-10);
        assert!((integral_gini(0.0, 0.0, &f, &quad()).unwrap() - (-1.0f64).exp()).abs() < 1e-10);
        let g = FunctionHandle::power_decay(-1.5, 1.0).unwrap();
        assert!(matches!(
            integral_gini(1.0, 0.0, &g, &quad()),
            Err(Error::Integrability(_))
        ));
    }

    #[test]
    fn integral_gini_of_power_decay_matches_prefix_factor() {
        for (p, q, a) in [
            (0.5, 0.0, -0.9),
            (0.0, 0.0, -0.5),
            (2.0, -1.0, 0.5),
            (0.3, -0.7, -0.8),
        ] {
            let f = FunctionHandle::power_decay(a, 1.0).unwrap();
            let quadrature = integral_gini(p, q, &f, &quad()).unwrap();
            let closed = power_decay_gini_factor(p, q, a).unwrap();
            assert!(
                (quadrature - closed).abs() < 1e-8 * closed,
                "{p} {q} {a}: {quadrature} vs {closed}"
            );
        }
    }

    #[test]
    fn geometric_prefix_factor_is_carleman_type() {
        let k = power_decay_gini_factor(0.0, 0.0, -0.99).unwrap();
        assert!((k - 0.99f64.exp()).abs() < 1e-15);
        assert!((power_decay_gini_factor(0.0, 0.0, -1.0 + 1e-12).unwrap() - E).abs() < 1e-9);
    }

    #[test]
    fn prefix_and_rescale() {
        let f = FunctionHandle::exponential(1.0, 2.0).unwrap();
        let p = f.prefix(0.5).unwrap();
        assert_eq!((p.start(), p.end()), (0.0, 0.5));
        assert!(f.prefix(2.5).is_err());
        let r = f.rescaled(4.0).unwrap();
        assert_eq!(r.end(), 0.5);
        assert!((r.eval(0.25).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        let pd = FunctionHandle::power_decay(-0.5, 1.0)
            .unwrap()
            .rescaled(4.0)
            .unwrap();
        assert_eq!(
            pd.profile(),
            Some(Profile::PowerDecay {
                a: -0.5,
                scale: 0.5
            })
        );
        assert!((pd.integral(&quad()).unwrap() - 0.5).abs() < 1e-15);
    }
}
