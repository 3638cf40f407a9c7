//! Safeguarded Newton iteration for scalar roots inside a sign-change bracket.

use std::fmt;

#[derive(Debug, Clone, Copy)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RootError {
    NoSignChange { lo: f64, hi: f64 },
    MaxIterations { last: f64, residual: f64 },
}

impl fmt::Display for RootError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootError::NoSignChange { lo, hi } => write!(f, "no sign change on [{lo}, {hi}]"),
            RootError::MaxIterations { last, residual } => {
                write!(
                    f,
                    "iteration limit reached at {last} (residual {residual:e})"
                )
            }
        }
    }
}

/// Newton's method that falls back to bisection whenever a step would leave
/// the current bracket or fails to halve the bracket. `f` returns the value
/// and the derivative. Stops when `|f| <= f_tol` or the last step is below
/// `x_tol` relative to the iterate.
pub fn safeguarded_newton<F>(
    mut f: F,
    guess: f64,
    bracket: Bracket,
    f_tol: f64,
    x_tol: f64,
    max_iter: usize,
) -> Result<f64, RootError>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    let (f_lo, _) = f(lo);
    let (f_hi, _) = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(RootError::NoSignChange { lo, hi });
    }
    let lo_positive = f_lo > 0.0;

    let mut x = guess.clamp(lo, hi);
    let mut last_step = hi - lo;
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let (fx, dfx) = f(x);
        residual = fx.abs();
        if residual <= f_tol {
            return Ok(x);
        }
        if (fx > 0.0) == lo_positive {
            lo = x;
        } else {
            hi = x;
        }
        let newton = if dfx != 0.0 { x - fx / dfx } else { f64::NAN };
        let step_ok = newton.is_finite()
            && newton > lo
            && newton < hi
            && (newton - x).abs() < 0.5 * last_step;
        let next = if step_ok { newton } else { 0.5 * (lo + hi) };
        last_step = (next - x).abs();
        x = next;
        if last_step <= x_tol * x.abs().max(1.0) {
            return Ok(x);
        }
    }
    Err(RootError::MaxIterations { last: x, residual })
}
