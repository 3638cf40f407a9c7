//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! The integrand may be real or complex. Integration starts from a caller
//! supplied set of breakpoints so that oscillatory integrands can be split
//! into panels of roughly one local wavelength before any refinement.

// node and weight tables are kept at their published precision
#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// 7-point Gauss weights, paired with the odd Kronrod nodes XGK[1], XGK[3], ...
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Values the integrator can accumulate.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_segments: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-9,
            rel: 1e-12,
            max_segments: 20_000,
        }
    }
}

impl Tolerance {
    pub fn absolute(abs: f64) -> Self {
        Self {
            abs,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// One Gauss–Kronrod 7/15 pass on `[a, b]`: (Kronrod value, |Kronrod − Gauss|).
pub fn gk15<T, F>(f: &mut F, a: f64, b: f64) -> (T, f64)
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    let (value, error, _) = gk15_abs(f, a, b);
    (value, error)
}

/// [`gk15`] plus the Kronrod estimate of `∫|f|`, used for the round-off floor.
fn gk15_abs<T, F>(f: &mut F, a: f64, b: f64) -> (T, f64, f64)
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = fc.magnitude() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (lo, hi) = (f(center - dx), f(center + dx));
        abs += (lo.magnitude() + hi.magnitude()) * WGK[j];
        let pair = lo + hi;
        kronrod = kronrod + pair * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    (kronrod, (kronrod - gauss).magnitude(), abs * half.abs())
}

/// Integrate over `[a, b]` with no interior breakpoints.
pub fn integrate<T, F>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    integrate_panels(f, &[a, b], tol)
}

/// Integrate over the union of consecutive panels `[p0,p1], [p1,p2], ...`.
pub fn integrate_panels<T, F>(mut f: F, breakpoints: &[f64], tol: Tolerance) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    if breakpoints.len() < 2 {
        return Err(Error::domain("quadrature needs at least two breakpoints"));
    }
    if breakpoints.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("quadrature limits must be finite"));
    }

    let mut heap = BinaryHeap::with_capacity(breakpoints.len() * 2);
    let mut evaluations = 0;
    let mut abs_total = 0.0;
    let (mut value_running, mut err_running) = (T::zero(), 0.0);
    for w in breakpoints.windows(2) {
        let (value, error, abs) = gk15_abs(&mut f, w[0], w[1]);
        evaluations += 15;
        abs_total += abs;
        value_running = value_running + value;
        err_running += error;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value,
            error,
        });
    }

    // Cancellation in the sum cannot be resolved below this.
    let floor = 100.0 * f64::EPSILON * abs_total;
    let target_for = |v: &T| tol.abs.max(tol.rel * v.magnitude()).max(floor);
    loop {
        let at_limit = heap.len() >= tol.max_segments;
        if err_running <= target_for(&value_running) || at_limit || !err_running.is_finite() {
            // running sums drift; decide on the ordered sum
            let (total, err) = totals(&heap);
            let target = target_for(&total);
            if err <= target {
                return Ok(Estimate {
                    value: total,
                    error: err,
                    evaluations,
                });
            }
            if at_limit || !err.is_finite() {
                return Err(Error::Convergence(format!(
                    "quadrature error {err:.3e} above target {target:.3e} after {} segments",
                    heap.len()
                )));
            }
            value_running = total;
            err_running = err;
        }
        let worst = heap.pop().expect("heap is never empty");
        err_running -= worst.error;
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval exhausted at machine resolution; accept what we have.
            heap.push(Segment {
                error: 0.0,
                ..worst
            });
            continue;
        }
        value_running = value_running - worst.value;
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error, _) = gk15_abs(&mut f, a, b);
            evaluations += 15;
            value_running = value_running + value;
            err_running += error;
            heap.push(Segment { a, b, value, error });
        }
    }
}

fn totals<T: QuadValue>(heap: &BinaryHeap<Segment<T>>) -> (T, f64) {
    // Sum left to right so the result does not depend on heap layout.
    let mut segs: Vec<&Segment<T>> = heap.iter().collect();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    segs.iter()
        .fold((T::zero(), 0.0), |(v, e), s| (v + s.value, e + s.error))
}

/// Breakpoints splitting `[a, b]` into equal panels no wider than `max_width`.
pub fn uniform_breakpoints(a: f64, b: f64, max_width: f64) -> Vec<f64> {
    let n = (((b - a) / max_width).ceil() as usize).max(1);
    let h = (b - a) / n as f64;
    (0..=n)
        .map(|i| if i == n { b } else { a + h * i as f64 })
        .collect()
}
