//! Exponential functionals `A(t) = ∫₀ᵗ exp(Σ_j ρ_j W_j(r) + δ r) dr` and
//! their first crossings.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::paths::{BrownianPath, SimGrid};

/// Integrand exponents above this (≈ ln 1e300) saturate the accumulation.
pub const OVERFLOW_EXPONENT: f64 = 690.775_527_898_213_7;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Term {
    pub coeffs: Vec<f64>,
    pub drift: f64,
}

impl Term {
    pub fn new(coeffs: Vec<f64>, drift: f64) -> Self {
        Self { coeffs, drift }
    }

    fn exponent(&self, path: &BrownianPath, k: usize, t: f64) -> f64 {
        let mut e = self.drift * t;
        for (j, c) in self.coeffs.iter().enumerate() {
            if *c != 0.0 {
                e += c * path.values[j][k];
            }
        }
        e
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Combine {
    Single,
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionalSpec {
    pub terms: Vec<Term>,
    pub combine: Combine,
}

impl FunctionalSpec {
    pub fn single(coeffs: Vec<f64>, drift: f64) -> Self {
        Self {
            terms: vec![Term::new(coeffs, drift)],
            combine: Combine::Single,
        }
    }

    pub fn min(terms: Vec<Term>) -> Self {
        Self {
            terms,
            combine: Combine::Min,
        }
    }

    pub fn max(terms: Vec<Term>) -> Self {
        Self {
            terms,
            combine: Combine::Max,
        }
    }

    pub fn validate(&self, dims: usize) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::InvalidParameter("a functional needs at least one term".into()));
        }
        if self.combine == Combine::Single && self.terms.len() != 1 {
            return Err(Error::InvalidParameter(format!(
                "a single functional takes one term, got {}",
                self.terms.len()
            )));
        }
        for t in &self.terms {
            if t.coeffs.len() != dims {
                return Err(Error::InvalidParameter(format!(
                    "term has {} coefficients but the path has {dims} components",
                    t.coeffs.len()
                )));
            }
        }
        Ok(())
    }

    /// Combined exponent at node `k`; exp is monotone so combining exponents
    /// is the same as combining the integrands.
    pub fn exponent_at(&self, path: &BrownianPath, k: usize) -> f64 {
        let t = path.grid.time(k);
        let mut it = self.terms.iter().map(|term| term.exponent(path, k, t));
        let first = it.next().expect("validated spec has a term");
        match self.combine {
            Combine::Single => first,
            Combine::Min => it.fold(first, f64::min),
            Combine::Max => it.fold(first, f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Accumulated {
    pub values: Vec<f64>,
    pub overflowed: bool,
}

impl Accumulated {
    pub fn at_end(&self) -> f64 {
        *self.values.last().expect("at least one node")
    }
}

/// Trapezoidal accumulation on the path grid.
pub fn accumulate(path: &BrownianPath, spec: &FunctionalSpec) -> Result<Accumulated> {
    spec.validate(path.dims())?;
    let grid = &path.grid;
    let mut values = Vec::with_capacity(grid.n_nodes());
    values.push(0.0);
    let mut acc = 0.0;
    let mut prev = spec.exponent_at(path, 0);
    let mut overflowed = prev > OVERFLOW_EXPONENT;
    for k in 1..grid.n_nodes() {
        if overflowed {
            values.push(f64::MAX);
            continue;
        }
        let cur = spec.exponent_at(path, k);
        if cur > OVERFLOW_EXPONENT {
            overflowed = true;
            values.push(f64::MAX);
            continue;
        }
        acc += 0.5 * grid.step(k) * (prev.exp() + cur.exp());
        values.push(acc);
        prev = cur;
    }
    Ok(Accumulated { values, overflowed })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StoppingStatus {
    Crossed,
    Censored,
}

impl StoppingStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            StoppingStatus::Crossed => "crossed",
            StoppingStatus::Censored => "censored",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StoppingOutcome {
    pub status: StoppingStatus,
    pub time: f64,
    pub functional_at_end: f64,
}

impl StoppingOutcome {
    pub fn crossed(&self) -> bool {
        self.status == StoppingStatus::Crossed
    }

    /// Censored outcomes compare as +∞.
    pub fn time_or_inf(&self) -> f64 {
        if self.crossed() {
            self.time
        } else {
            f64::INFINITY
        }
    }
}

/// First time `A` reaches `threshold`, linearly interpolated between the
/// bracketing nodes.
pub fn first_crossing(a: &[f64], threshold: f64, grid: &SimGrid) -> StoppingOutcome {
    let end = *a.last().expect("at least one node");
    let k = a.partition_point(|v| *v < threshold);
    if k == a.len() {
        return StoppingOutcome {
            status: StoppingStatus::Censored,
            time: grid.horizon,
            functional_at_end: end,
        };
    }
    let time = if k == 0 {
        0.0
    } else {
        let (a0, a1) = (a[k - 1], a[k]);
        let t0 = grid.time(k - 1);
        let frac = ((threshold - a0) / (a1 - a0)).clamp(0.0, 1.0);
        t0 + frac * grid.step(k)
    };
    StoppingOutcome {
        status: StoppingStatus::Crossed,
        time,
        functional_at_end: end,
    }
}

pub fn crossing(path: &BrownianPath, spec: &FunctionalSpec, threshold: f64) -> Result<StoppingOutcome> {
    let acc = accumulate(path, spec)?;
    Ok(first_crossing(&acc.values, threshold, &path.grid))
}

/// Earliest crossing over several functional/threshold pairs.
pub fn multi_crossing(
    path: &BrownianPath,
    pairs: &[(FunctionalSpec, f64)],
) -> Result<StoppingOutcome> {
    let mut best: Option<StoppingOutcome> = None;
    for (spec, threshold) in pairs {
        let out = crossing(path, spec, *threshold)?;
        best = match best {
            None => Some(out),
            Some(b) if out.crossed() && (!b.crossed() || out.time < b.time) => Some(out),
            keep => keep,
        };
    }
    best.ok_or_else(|| Error::InvalidParameter("multi_crossing needs at least one pair".into()))
}
