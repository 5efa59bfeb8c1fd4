//! Quadrature for integrands with an integrable singularity at the left
//! endpoint.
//!
//! `[a, b)` is split into geometrically graded cells
//! `[a + h·rᵏ⁺¹, a + h·rᵏ)` accumulating at `a`. Each cell is integrated by
//! the composite midpoint rule with Richardson extrapolation (midpoint
//! Romberg), so the singular endpoint itself is never evaluated. The
//! sequence of partial sums over cells is then extrapolated to its limit
//! with Wynn's epsilon algorithm, which is exact for tails that behave like
//! finite sums of powers `tᵝ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance and grading for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Relative tolerance, measured against `∫|g|`.
    pub tol: f64,
    /// Number of graded cells before giving up.
    pub max_depth: usize,
    /// Ratio between consecutive cell widths, in `(0, 1)`.
    pub grading_ratio: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            tol: 1e-10,
            max_depth: 24,
            grading_ratio: 0.5,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Argument(format!(
                "quadrature tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_depth < MIN_DEPTH {
            return Err(Error::Argument(format!(
                "quadrature max_depth must be at least {MIN_DEPTH}, got {}",
                self.max_depth
            )));
        }
        if !(self.grading_ratio > 0.0 && self.grading_ratio < 1.0) {
            return Err(Error::Argument(format!(
                "grading ratio must lie in (0, 1), got {}",
                self.grading_ratio
            )));
        }
        Ok(())
    }
}

/// Cells integrated before the first convergence check.
const MIN_DEPTH: usize = 6;
/// Finest midpoint level per cell: `2^ROMBERG_LEVELS` subintervals.
const ROMBERG_LEVELS: usize = 8;
/// Bisections allowed when Romberg stalls on a cell (kinks, jumps).
const MAX_SPLITS: usize = 40;
/// Consecutive cell ratios above this are treated as a non-decaying tail.
const DIVERGENT_RATIO: f64 = 1.0 - 1e-6;
/// Partial sums fed to the epsilon table.
const EPSILON_TERMS: usize = 13;

/// Value and error estimate of a converged integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate {
    pub value: f64,
    pub error: f64,
    /// `∫|g|` over the integrated cells.
    pub abs_mass: f64,
    pub depth: usize,
}

struct Cell {
    value: f64,
    abs_value: f64,
    error: f64,
}

fn midpoint_sum<G>(g: &mut G, lo: f64, hi: f64, n: usize) -> Result<(f64, f64)>
where
    G: FnMut(f64) -> Result<f64>,
{
    let h = (hi - lo) / n as f64;
    let (mut s, mut sa) = (0.0, 0.0);
    for i in 0..n {
        let v = g(lo + (i as f64 + 0.5) * h)?;
        if !v.is_finite() {
            return Err(Error::Integrability(format!(
                "integrand is not finite at t = {}",
                lo + (i as f64 + 0.5) * h
            )));
        }
        s += v;
        sa += v.abs();
    }
    Ok((s * h, sa * h))
}

fn romberg_cell<G>(g: &mut G, lo: f64, hi: f64, tol: f64) -> Result<Cell>
where
    G: FnMut(f64) -> Result<f64>,
{
    let mut prev_row: Vec<f64> = Vec::with_capacity(ROMBERG_LEVELS + 1);
    let (m0, mut abs_value) = midpoint_sum(g, lo, hi, 1)?;
    prev_row.push(m0);
    let mut error = f64::INFINITY;
    for level in 1..=ROMBERG_LEVELS {
        let (m, sa) = midpoint_sum(g, lo, hi, 1 << level)?;
        abs_value = sa;
        let mut row = Vec::with_capacity(level + 1);
        row.push(m);
        let mut factor = 1.0;
        for j in 1..=level {
            factor *= 4.0;
            let better = row[j - 1] + (row[j - 1] - prev_row[j - 1]) / (factor - 1.0);
            row.push(better);
        }
        error = (row[level] - prev_row[level - 1]).abs();
        prev_row = row;
        if level >= 2 && error <= tol * abs_value.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(Cell {
        value: prev_row[prev_row.len() - 1],
        abs_value,
        error,
    })
}

/// Romberg on `[lo, hi)`, bisecting recursively where it fails to settle.
fn adaptive_cell<G>(g: &mut G, lo: f64, hi: f64, tol: f64, splits: usize) -> Result<Cell>
where
    G: FnMut(f64) -> Result<f64>,
{
    let cell = romberg_cell(g, lo, hi, tol)?;
    let mid = 0.5 * (lo + hi);
    if cell.error <= tol * cell.abs_value.max(f64::MIN_POSITIVE)
        || splits == 0
        || !(lo < mid && mid < hi)
    {
        return Ok(cell);
    }
    let left = adaptive_cell(g, lo, mid, tol, splits - 1)?;
    let right = adaptive_cell(g, mid, hi, tol, splits - 1)?;
    Ok(Cell {
        value: left.value + right.value,
        abs_value: left.abs_value + right.abs_value,
        error: left.error + right.error,
    })
}

/// Limit of a sequence of partial sums by Wynn's epsilon algorithm.
///
/// Returns the entry of the even column whose two most recent entries agree
/// best, together with that disagreement as the error estimate.
pub(crate) fn wynn_epsilon(sums: &[f64]) -> (f64, f64) {
    let n = sums.len();
    let last = sums[n - 1];
    if n < 2 {
        return (last, f64::INFINITY);
    }
    let terms = &sums[n - n.min(EPSILON_TERMS)..];
    let spread = |col: &[f64]| (col[col.len() - 1] - col[col.len() - 2]).abs();
    let (mut best, mut best_err) = (last, spread(terms));
    let mut prev: Vec<f64> = vec![0.0; terms.len() + 1];
    let mut cur: Vec<f64> = terms.to_vec();
    for k in 1..terms.len() {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d == 0.0 || !d.is_finite() {
                break;
            }
            next.push(prev[i + 1] + 1.0 / d);
        }
        if next.len() != cur.len() - 1 || next.iter().any(|v| !v.is_finite()) {
            break;
        }
        if k % 2 == 0 && next.len() >= 2 {
            let err = spread(&next);
            if err < best_err {
                best = next[next.len() - 1];
                best_err = err;
            }
        }
        prev = cur;
        cur = next;
    }
    (best, best_err)
}

fn looks_divergent(cells: &[Cell], sums: &[f64]) -> bool {
    let n = cells.len();
    if n < MIN_DEPTH {
        return false;
    }
    let ratios_flat = (n - 3..n).all(|k| {
        let (a, b) = (cells[k - 1].value, cells[k].value);
        a != 0.0 && b / a >= DIVERGENT_RATIO
    });
    let doubling = (n - 3..n).all(|k| sums[k].abs() > 2.0 * sums[k - 1].abs());
    ratios_flat || doubling
}

/// `∫_a^b g(t) dt` for `g` possibly singular at `a`.
///
/// Fails with [`Error::Integrability`] when the graded cell integrals stop
/// decaying, and with [`Error::QuadratureNonConvergence`] when the depth cap
/// is reached before two successive extrapolations agree to `cfg.tol`.
pub fn integrate<G>(mut g: G, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<QuadEstimate>
where
    G: FnMut(f64) -> Result<f64>,
{
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::Argument(format!(
            "invalid integration range [{a}, {b})"
        )));
    }
    let h = b - a;
    let r = cfg.grading_ratio;
    let mut cells: Vec<Cell> = Vec::with_capacity(cfg.max_depth);
    let mut sums: Vec<f64> = Vec::with_capacity(cfg.max_depth);
    let mut partial = 0.0;
    let mut mass = 0.0;
    let mut cell_error = 0.0;
    let mut scale_hi = 1.0;
    let mut prev_estimate: Option<f64> = None;
    let mut last = (f64::NAN, f64::INFINITY);
    for depth in 1..=cfg.max_depth {
        let scale_lo = scale_hi * r;
        let cell = adaptive_cell(
            &mut g,
            a + h * scale_lo,
            a + h * scale_hi,
            cfg.tol,
            MAX_SPLITS,
        )?;
        scale_hi = scale_lo;
        partial += cell.value;
        mass += cell.abs_value;
        cell_error += cell.error;
        cells.push(cell);
        sums.push(partial);
        if looks_divergent(&cells, &sums) {
            return Err(Error::Integrability(format!(
                "graded cell integrals stop decaying (partial sum {partial:e} after {depth} cells)"
            )));
        }
        if depth < MIN_DEPTH {
            continue;
        }
        let (estimate, extrap_error) = wynn_epsilon(&sums);
        let yardstick = mass.max(estimate.abs()).max(f64::MIN_POSITIVE);
        let error = cell_error + extrap_error;
        last = (estimate, error);
        if let Some(prev) = prev_estimate {
            if (estimate - prev).abs() <= cfg.tol * yardstick && error <= cfg.tol * yardstick {
                return Ok(QuadEstimate {
                    value: estimate,
                    error: error.max((estimate - prev).abs()),
                    abs_mass: mass,
                    depth,
                });
            }
        }
        prev_estimate = Some(estimate);
    }
    let (estimate, error) = last;
    let yardstick = mass.max(estimate.abs()).max(f64::MIN_POSITIVE);
    if error <= cfg.tol * yardstick {
        return Ok(QuadEstimate {
            value: estimate,
            error,
            abs_mass: mass,
            depth: cfg.max_depth,
        });
    }
    Err(Error::QuadratureNonConvergence { residual: error })
}
