//! Adaptive Gauss-Kronrod (7/15) quadrature.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = half * XGK[i];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * half, (kronrod - gauss).abs() * half)
}

fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: (f64, f64),
    tol: f64,
    depth: u32,
) -> Result<QuadResult> {
    let (value, err) = whole;
    if !value.is_finite() {
        return Err(Error::Domain {
            func: "integrate",
            detail: format!("non-finite integrand on [{a}, {b}]"),
        });
    }
    if err <= tol || err <= 4.0 * f64::EPSILON * value.abs() {
        return Ok(QuadResult {
            value,
            error_estimate: err,
        });
    }
    if depth >= MAX_DEPTH {
        return Err(Error::NoConvergence {
            func: "integrate",
            iterations: depth as usize,
        });
    }
    let mid = 0.5 * (a + b);
    let left = adapt(f, a, mid, kronrod(f, a, mid), 0.5 * tol, depth + 1)?;
    let right = adapt(f, mid, b, kronrod(f, mid, b), 0.5 * tol, depth + 1)?;
    Ok(QuadResult {
        value: left.value + right.value,
        error_estimate: left.error_estimate + right.error_estimate,
    })
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error_estimate: 0.0,
        });
    }
    // Pre-split so that narrow features are not missed by the first panel.
    const PANELS: usize = 8;
    let width = (b - a) / PANELS as f64;
    let mut total = QuadResult {
        value: 0.0,
        error_estimate: 0.0,
    };
    for i in 0..PANELS {
        let lo = a + width * i as f64;
        let hi = if i + 1 == PANELS { b } else { lo + width };
        let r = adapt(&f, lo, hi, kronrod(&f, lo, hi), tol / PANELS as f64, 0)?;
        total.value += r.value;
        total.error_estimate += r.error_estimate;
    }
    Ok(total)
}

/// Integrates `f` over `[a, ∞)` through the map `x = a + t/(1−t)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, tol: f64) -> Result<QuadResult> {
    integrate(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let s = 1.0 - t;
            let v = f(a + t / s) / (s * s);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        tol,
    )
}

/// Nested adaptive quadrature over a rectangle.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(
    f: F,
    (x0, x1): (f64, f64),
    (y0, y1): (f64, f64),
    tol: f64,
) -> Result<f64> {
    let inner_tol = tol / (x1 - x0).abs().max(1.0);
    let failure = std::cell::Cell::new(None);
    let outer = integrate(
        |x| match integrate(|y| f(x, y), y0, y1, inner_tol) {
            Ok(r) => r.value,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        },
        x0,
        x1,
        tol,
    )?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(outer.value),
    }
}
