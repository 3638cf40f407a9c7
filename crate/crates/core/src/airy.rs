//! Airy function of the first kind and its zeros.
//!
//! Four regimes are stitched together:
//!
//! * `x < -7`: oscillatory asymptotic expansion,
//! * `-7 <= x <= 2.5`: Maclaurin series,
//! * `2.5 < x < 7`: the Laplace-type representation
//!   `Ai(x) = e^{-ζ}/π ∫₀^∞ exp(-√x t²) cos(t³/3) dt`, `ζ = (2/3) x^{3/2}`,
//! * `x >= 7`: exponentially scaled asymptotic expansion.
//!
//! Neighbouring regimes agree to better than 1e-12 at each switch point.
//! The series alone loses ~e^{2ζ} relative digits on the positive axis, so
//! it is not used past 2.5.

use std::f64::consts::{FRAC_PI_4, PI};
use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::quadrature::{self, QuadValue, Tolerance};
use crate::roots::{self, Bracket};

/// Ai(0) = 3^(-2/3) / Γ(2/3)
pub const AI_ZERO: f64 = 0.355_028_053_887_817_2;
/// -Ai'(0) = 3^(-1/3) / Γ(1/3)
pub const AI_PRIME_ZERO_NEG: f64 = 0.258_819_403_792_806_8;

const NEG_ASYMPTOTIC_BELOW: f64 = -7.0;
const SERIES_UP_TO: f64 = 2.5;
const POS_ASYMPTOTIC_FROM: f64 = 7.0;
/// Largest |x| accepted by the checked entry points.
pub const MAX_ABS_ARG: f64 = 200.0;
/// Beyond this Ai(x) underflows to zero in f64.
const UNDERFLOW_ARG: f64 = 105.0;

const N_ASYMPTOTIC: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryPair {
    pub ai: f64,
    pub ai_prime: f64,
}

fn check(x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::domain(format!(
            "Airy argument must be finite, got {x}"
        )));
    }
    if x.abs() > MAX_ABS_ARG {
        return Err(Error::domain(format!(
            "Airy argument {x} outside supported range |x| <= {MAX_ABS_ARG}"
        )));
    }
    Ok(())
}

pub fn airy_ai(x: f64) -> Result<f64> {
    check(x)?;
    Ok(ai_pair(x).ai)
}

pub fn airy_ai_prime(x: f64) -> Result<f64> {
    check(x)?;
    Ok(ai_pair(x).ai_prime)
}

pub fn airy_pair(x: f64) -> Result<AiryPair> {
    check(x)?;
    Ok(ai_pair(x))
}

/// `e^{ζ}·Ai(x)` for `x > 0`; plain `Ai(x)` otherwise.
pub fn airy_ai_scaled(x: f64) -> Result<f64> {
    check(x)?;
    Ok(if x <= 0.0 {
        ai_pair(x).ai
    } else if x <= SERIES_UP_TO {
        series(x).ai * zeta(x).exp()
    } else if x < POS_ASYMPTOTIC_FROM {
        laplace_scaled(x).ai
    } else {
        asymptotic_positive_scaled(x).ai
    })
}

/// Unchecked evaluation used in quadrature loops. Any finite `x` is accepted;
/// arguments past the underflow point return exact zeros.
pub(crate) fn ai_pair(x: f64) -> AiryPair {
    if x < NEG_ASYMPTOTIC_BELOW {
        asymptotic_negative(x)
    } else if x <= SERIES_UP_TO {
        series(x)
    } else if x >= UNDERFLOW_ARG {
        AiryPair {
            ai: 0.0,
            ai_prime: 0.0,
        }
    } else {
        let scaled = if x < POS_ASYMPTOTIC_FROM {
            laplace_scaled(x)
        } else {
            asymptotic_positive_scaled(x)
        };
        let decay = (-zeta(x)).exp();
        AiryPair {
            ai: scaled.ai * decay,
            ai_prime: scaled.ai_prime * decay,
        }
    }
}

fn zeta(x: f64) -> f64 {
    2.0 / 3.0 * x.abs().powf(1.5)
}

/// Maclaurin series `Ai = c1·f − c2·g` with
/// `f = Σ 3^k (1/3)_k x^{3k}/(3k)!`, `g = Σ 3^k (2/3)_k x^{3k+1}/(3k+1)!`.
fn series(x: f64) -> AiryPair {
    let x3 = x * x * x;
    // f and f'
    let mut f = 1.0;
    let mut f_term = 1.0;
    let mut df = 0.0;
    let mut df_term = 0.0;
    // g and g'
    let mut g = x;
    let mut g_term = x;
    let mut dg = 1.0;
    let mut dg_term = 1.0;
    for k in 1..200 {
        let k3 = (3 * k) as f64;
        f_term *= x3 / ((k3 - 1.0) * k3);
        f += f_term;
        df_term = if k == 1 {
            0.5 * x * x
        } else {
            df_term * x3 / (3.0 * (k as f64 - 1.0) * (k3 - 1.0))
        };
        df += df_term;
        g_term *= x3 / (k3 * (k3 + 1.0));
        g += g_term;
        dg_term *= x3 / (k3 * (k3 - 2.0));
        dg += dg_term;
        let small = |t: f64, s: f64| t.abs() <= 1e-17 * s.abs().max(1e-300);
        if small(f_term, f) && small(df_term, df) && small(g_term, g) && small(dg_term, dg) {
            break;
        }
    }
    AiryPair {
        ai: AI_ZERO * f - AI_PRIME_ZERO_NEG * g,
        ai_prime: AI_ZERO * df - AI_PRIME_ZERO_NEG * dg,
    }
}

/// Coefficients u_k and v_k of the Airy asymptotic expansions.
fn asymptotic_coefficients() -> &'static ([f64; N_ASYMPTOTIC], [f64; N_ASYMPTOTIC]) {
    static COEFFS: OnceLock<([f64; N_ASYMPTOTIC], [f64; N_ASYMPTOTIC])> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut u = [0.0; N_ASYMPTOTIC];
        let mut v = [0.0; N_ASYMPTOTIC];
        u[0] = 1.0;
        v[0] = 1.0;
        for k in 1..N_ASYMPTOTIC {
            let kf = k as f64;
            u[k] = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
                / ((2.0 * kf - 1.0) * 216.0 * kf);
            v[k] = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u[k];
        }
        (u, v)
    })
}

/// Sums `Σ s_k c_k / ζ^k` with `s_k` given by `sign`, truncated at the
/// smallest term. Returns the partial sums over even and odd `k` separately.
fn truncated_sums(coeffs: &[f64], z: f64, sign: impl Fn(usize) -> f64) -> (f64, f64) {
    let mut even = 0.0;
    let mut odd = 0.0;
    let mut previous = f64::INFINITY;
    let mut power = 1.0;
    for (k, c) in coeffs.iter().enumerate() {
        let term = c * power;
        if term.abs() > previous {
            break;
        }
        previous = term.abs();
        if k % 2 == 0 {
            even += sign(k) * term;
        } else {
            odd += sign(k) * term;
        }
        if term.abs() < 1e-17 {
            break;
        }
        power /= z;
    }
    (even, odd)
}

fn asymptotic_negative(x: f64) -> AiryPair {
    let y = -x;
    let z = zeta(y);
    let (u, v) = asymptotic_coefficients();
    // (-1)^{floor(k/2)} realises Σ(-1)^k c_{2k} and Σ(-1)^k c_{2k+1}.
    let sign = |k: usize| if (k / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    let (u_even, u_odd) = truncated_sums(u, z, sign);
    let (v_even, v_odd) = truncated_sums(v, z, sign);
    let (s, c) = (z - FRAC_PI_4).sin_cos();
    let y4 = y.powf(0.25);
    let sqrt_pi = PI.sqrt();
    AiryPair {
        ai: (c * u_even + s * u_odd) / (sqrt_pi * y4),
        ai_prime: y4 / sqrt_pi * (s * v_even - c * v_odd),
    }
}

fn asymptotic_positive_scaled(x: f64) -> AiryPair {
    let z = zeta(x);
    let (u, v) = asymptotic_coefficients();
    let alt = |k: usize| if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let (ue, uo) = truncated_sums(u, z, alt);
    let (ve, vo) = truncated_sums(v, z, alt);
    let x4 = x.powf(0.25);
    let norm = 2.0 * PI.sqrt();
    AiryPair {
        ai: (ue + uo) / (norm * x4),
        ai_prime: -x4 * (ve + vo) / norm,
    }
}

#[derive(Clone, Copy)]
struct Pair(f64, f64);

impl Add for Pair {
    type Output = Pair;
    fn add(self, o: Pair) -> Pair {
        Pair(self.0 + o.0, self.1 + o.1)
    }
}
impl Sub for Pair {
    type Output = Pair;
    fn sub(self, o: Pair) -> Pair {
        Pair(self.0 - o.0, self.1 - o.1)
    }
}
impl Mul<f64> for Pair {
    type Output = Pair;
    fn mul(self, s: f64) -> Pair {
        Pair(self.0 * s, self.1 * s)
    }
}
impl QuadValue for Pair {
    fn zero() -> Self {
        Pair(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.0.abs().max(self.1.abs())
    }
}

/// Scaled Ai and Ai' from the Laplace-type integral and its x-derivative.
fn laplace_scaled(x: f64) -> AiryPair {
    let root = x.sqrt();
    // exp(-√x t²) < 1e-20 past this point
    let t_max = (46.0 / root).sqrt();
    let bp = quadrature::uniform_breakpoints(0.0, t_max, 0.5);
    let tol = Tolerance {
        abs: 1e-17,
        rel: 1e-15,
        max_segments: 2_000,
    };
    let est = quadrature::integrate_panels(
        |t: f64| {
            let w = (-root * t * t).exp() * (t * t * t / 3.0).cos();
            Pair(w, t * t * w)
        },
        &bp,
        tol,
    )
    .expect("smooth Laplace integrand converges");
    let Pair(i0, i2) = est.value;
    AiryPair {
        ai: i0 / PI,
        ai_prime: (-root * i0 - i2 / (2.0 * root)) / PI,
    }
}

/// Semiclassical seed `(3π(4n−1)/8)^{2/3}` for the n-th zero magnitude.
pub fn bohr_sommerfeld_seed(n: usize) -> f64 {
    (3.0 * PI * (4.0 * n as f64 - 1.0) / 8.0).powf(2.0 / 3.0)
}

/// Magnitude λ_n of the n-th (negative) zero of Ai, so that `Ai(-λ_n) = 0`.
pub fn airy_zero(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("Airy zeros are indexed from 1"));
    }
    let seed = bohr_sommerfeld_seed(n);
    if seed > MAX_ABS_ARG {
        return Err(Error::domain(format!(
            "Airy zero {n} lies beyond |x| = {MAX_ABS_ARG}"
        )));
    }
    // Quarter of the local zero spacing π/√λ keeps neighbours out of the bracket.
    let half_width = (0.01 * seed).min(0.25 * PI / seed.sqrt());
    let bracket = Bracket::new(seed - half_width, seed + half_width);
    let f = |lam: f64| {
        let p = ai_pair(-lam);
        (p.ai, -p.ai_prime)
    };
    let root = roots::safeguarded_newton(f, seed, bracket, 1e-12, 1e-14, 100)
        .map_err(|e| Error::Convergence(format!("Airy zero {n}: {e}")))?;
    Ok(root)
}
