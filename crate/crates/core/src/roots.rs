//! Bracketed bisection for strictly decreasing functions.

use crate::error::{Error, Result};

/// Default absolute tolerance on the argument.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Default iteration cap.
pub const DEFAULT_MAX_ITER: usize = 200;

/// Settings for [`bisect_decreasing`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for Bisection {
    fn default() -> Self {
        Bisection {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

impl Bisection {
    pub fn with_tol(tol: f64) -> Self {
        Bisection {
            tol,
            ..Default::default()
        }
    }

    /// Locates the root of a decreasing `g` inside `[lo, hi]`.
    ///
    /// The caller guarantees `g(lo) >= 0 >= g(hi)`; endpoints are never
    /// evaluated here. Iteration stops once the bracket is narrower than
    /// `tol` or can no longer be split in floating point.
    pub fn bisect_decreasing<G>(&self, mut g: G, mut lo: f64, mut hi: f64) -> Result<f64>
    where
        G: FnMut(f64) -> Result<f64>,
    {
        if !(self.tol > 0.0) {
            return Err(Error::Argument(format!(
                "root tolerance must be positive, got {}",
                self.tol
            )));
        }
        if !(lo <= hi) {
            return Err(Error::Argument(format!("inverted bracket [{lo}, {hi}]")));
        }
        for _ in 0..self.max_iter {
            if hi - lo <= self.tol {
                return Ok(lo + 0.5 * (hi - lo));
            }
            let mid = lo + 0.5 * (hi - lo);
            if mid <= lo || mid >= hi {
                return Ok(mid);
            }
            let v = g(mid)?;
            if v.is_nan() {
                return Err(Error::Domain(format!("residual is NaN at {mid}")));
            }
            if v == 0.0 {
                return Ok(mid);
            }
            if v > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if hi - lo <= self.tol {
            return Ok(lo + 0.5 * (hi - lo));
        }
        Err(Error::IterationLimit {
            last: lo + 0.5 * (hi - lo),
            width: hi - lo,
        })
    }
}
