//! Blow-up detection for the random ODE systems whose solutions bound the
//! ψ-weighted masses from below.

use serde::Serialize;

use crate::bounds::{lower_thresholds, upper_threshold, UpperOptions};
use crate::error::{Error, Result};
use crate::functionals::StoppingOutcome;
use crate::model::{
    check_rho_conditions, check_rho_conditions_2d, classify_case, ModelParams, ModelParams2D,
    RhoCheck, RhoCheck2D,
};
use crate::paths::BrownianPath;
use crate::spectral::{initial_mass, SpectralData};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OdeSystemKind {
    /// `h₁' = e^{ρ₁W}(h₁^{1+m} + h₂^{1+n})`, `h₂' = e^{ρ₂W}(h₁^{1+p} + h₂^{1+q})`.
    Plain,
    /// One exponential per nonlinear term, from the general intensities.
    GeneralK,
    /// `Plain` with `−μ h_i` added.
    Damped,
    /// Two-noise system with damping `λ + l₁ + l₂`.
    Damped2D,
}

/// `h_i' = −damping·h_i + Σ_j coeff[2i+j] · exp(noise[2i+j]·W) · h_j^{power[2i+j]}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OdeSystem {
    pub kind: OdeSystemKind,
    pub damping: f64,
    pub powers: [f64; 4],
    pub coeff: [f64; 4],
    pub noise: [Vec<f64>; 4],
}

impl OdeSystem {
    fn powers(exps: [f64; 4]) -> [f64; 4] {
        exps.map(|e| 1.0 + e)
    }

    pub fn plain(params: &ModelParams) -> Result<Self> {
        let (rho1, rho2) = consistent_rhos(params)?;
        Ok(Self {
            kind: OdeSystemKind::Plain,
            damping: 0.0,
            powers: Self::powers(params.exponents()),
            coeff: [1.0; 4],
            noise: [vec![rho1], vec![rho1], vec![rho2], vec![rho2]],
        })
    }

    pub fn general_k(params: &ModelParams) -> Self {
        // general_exponents() order: (1+n)k₂−k₁, m k₁, (1+p)k₁−k₂, q k₂.
        let e = params.general_exponents();
        Self {
            kind: OdeSystemKind::GeneralK,
            damping: 0.0,
            powers: Self::powers(params.exponents()),
            coeff: [1.0; 4],
            noise: [vec![e[1]], vec![e[0]], vec![e[2]], vec![e[3]]],
        }
    }

    pub fn damped(params: &ModelParams, spectral: &SpectralData) -> Result<Self> {
        let mut sys = Self::plain(params)?;
        sys.kind = OdeSystemKind::Damped;
        sys.damping = params.mu(spectral);
        Ok(sys)
    }

    pub fn damped_2d(params: &ModelParams2D, spectral: &SpectralData) -> Result<Self> {
        let rho = match check_rho_conditions_2d(params) {
            RhoCheck2D::Consistent { rho } => rho,
            RhoCheck2D::Violated { mismatch } => {
                return Err(Error::InvalidParameter(format!(
                    "two-noise rho conditions violated, mismatches {mismatch:?}"
                )))
            }
        };
        let c = params.coeff;
        Ok(Self {
            kind: OdeSystemKind::Damped2D,
            damping: spectral.lambda + params.l1() + params.l2(),
            powers: Self::powers(params.exponents()),
            coeff: [c[0][0], c[0][1], c[1][0], c[1][1]],
            noise: [
                rho[0].to_vec(),
                rho[0].to_vec(),
                rho[1].to_vec(),
                rho[1].to_vec(),
            ],
        })
    }

    /// The undamped sub-solution system matching the parameters: `Plain`
    /// when the ρ-identities hold, `GeneralK` otherwise.
    pub fn for_params(params: &ModelParams) -> Self {
        Self::plain(params).unwrap_or_else(|_| Self::general_k(params))
    }

    fn dims(&self) -> usize {
        self.noise[0].len()
    }

    fn prefactors(&self, w: &[f64]) -> [f64; 4] {
        std::array::from_fn(|i| {
            let e: f64 = self.noise[i].iter().zip(w).map(|(c, x)| c * x).sum();
            self.coeff[i] * e.exp()
        })
    }

    /// Right-hand side in the chosen coordinates (`log` means `y = ln h`).
    fn rhs(&self, y: [f64; 2], w: &[f64], log: bool) -> [f64; 2] {
        let a = self.prefactors(w);
        let h = if log { [y[0].exp(), y[1].exp()] } else { y };
        let p = &self.powers;
        let f1 = -self.damping * h[0] + a[0] * h[0].powf(p[0]) + a[1] * h[1].powf(p[1]);
        let f2 = -self.damping * h[1] + a[2] * h[0].powf(p[2]) + a[3] * h[1].powf(p[3]);
        if log {
            [f1 / h[0], f2 / h[1]]
        } else {
            [f1, f2]
        }
    }
}

fn consistent_rhos(params: &ModelParams) -> Result<(f64, f64)> {
    match check_rho_conditions(params) {
        RhoCheck::Consistent { rho1, rho2 } => Ok((rho1, rho2)),
        RhoCheck::Violated { mismatch1, mismatch2 } => Err(Error::InvalidParameter(format!(
            "rho conditions violated (mismatches {mismatch1}, {mismatch2})"
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OdeSettings {
    pub blowup_cap: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Switch to log coordinates once a component exceeds this.
    pub log_switch: f64,
    /// Smallest admissible sub-step as a fraction of the grid step.
    pub min_step_fraction: f64,
}

impl Default for OdeSettings {
    fn default() -> Self {
        Self {
            blowup_cap: 1e12,
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            log_switch: 1e6,
            min_step_fraction: 2f64.powi(-20),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OdeStatus {
    BlewUp,
    Survived,
}

impl OdeStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            OdeStatus::BlewUp => "blew_up",
            OdeStatus::Survived => "survived",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlowupResult {
    pub status: OdeStatus,
    pub time: f64,
    pub peak: f64,
    pub step_exhausted: bool,
}

impl BlowupResult {
    pub fn blew_up(&self) -> bool {
        self.status == OdeStatus::BlewUp
    }

    pub fn time_or_inf(&self) -> f64 {
        if self.blew_up() {
            self.time
        } else {
            f64::INFINITY
        }
    }
}

fn rk4_step(
    sys: &OdeSystem,
    y: [f64; 2],
    h: f64,
    w_at: &dyn Fn(f64) -> [f64; 2],
    t: f64,
    log: bool,
) -> [f64; 2] {
    let dims = sys.dims();
    let w0 = w_at(t);
    let wm = w_at(t + 0.5 * h);
    let w1 = w_at(t + h);
    let add = |a: [f64; 2], k: [f64; 2], s: f64| [a[0] + s * k[0], a[1] + s * k[1]];
    let k1 = sys.rhs(y, &w0[..dims], log);
    let k2 = sys.rhs(add(y, k1, 0.5 * h), &wm[..dims], log);
    let k3 = sys.rhs(add(y, k2, 0.5 * h), &wm[..dims], log);
    let k4 = sys.rhs(add(y, k3, h), &w1[..dims], log);
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

fn mass(y: [f64; 2], log: bool) -> f64 {
    if log {
        y[0].exp() + y[1].exp()
    } else {
        y[0] + y[1]
    }
}

/// Integrates `sys` from `initial` along `path` with step-doubling RK4 inside
/// each grid interval; `W` is linear between grid nodes.
pub fn integrate(
    sys: &OdeSystem,
    initial: [f64; 2],
    path: &BrownianPath,
    settings: &OdeSettings,
) -> Result<BlowupResult> {
    if !(initial[0] > 0.0 && initial[1] > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "initial values must be positive, got {initial:?}"
        )));
    }
    if sys.dims() != path.dims() {
        return Err(Error::InvalidParameter(format!(
            "system uses {} noise components, path has {}",
            sys.dims(),
            path.dims()
        )));
    }
    let grid = &path.grid;
    let min_step = grid.dt * settings.min_step_fraction;
    let mut y = initial;
    let mut log = false;
    let mut peak = mass(y, log);
    let mut last_h = grid.dt;

    for k in 1..grid.n_nodes() {
        let (t0, t1) = (grid.time(k - 1), grid.time(k));
        let w0: [f64; 2] = std::array::from_fn(|j| if j < path.dims() { path.values[j][k - 1] } else { 0.0 });
        let w1: [f64; 2] = std::array::from_fn(|j| if j < path.dims() { path.values[j][k] } else { 0.0 });
        let span = t1 - t0;
        let w_at = move |t: f64| -> [f64; 2] {
            let s = if span > 0.0 { ((t - t0) / span).clamp(0.0, 1.0) } else { 0.0 };
            [w0[0] + s * (w1[0] - w0[0]), w0[1] + s * (w1[1] - w0[1])]
        };
        let mut t = t0;
        let mut h = last_h.min(span);
        while t < t1 {
            h = h.min(t1 - t);
            let full = rk4_step(sys, y, h, &w_at, t, log);
            let half = rk4_step(sys, y, 0.5 * h, &w_at, t, log);
            let two = rk4_step(sys, half, 0.5 * h, &w_at, t + 0.5 * h, log);
            let finite = full.iter().chain(two.iter()).all(|v| v.is_finite());
            let err = if finite {
                (0..2)
                    .map(|i| {
                        (two[i] - full[i]).abs()
                            / (settings.abs_tol + settings.rel_tol * two[i].abs())
                    })
                    .fold(0.0, f64::max)
            } else {
                f64::INFINITY
            };
            let positive = log || (two[0] > 0.0 && two[1] > 0.0);
            if err <= 1.0 && positive {
                // Richardson extrapolation of the two half steps.
                let mut next = [
                    two[0] + (two[0] - full[0]) / 15.0,
                    two[1] + (two[1] - full[1]) / 15.0,
                ];
                if !log && !(next[0] > 0.0 && next[1] > 0.0) {
                    next = two;
                }
                y = next;
                t += h;
                let e = mass(y, log);
                peak = peak.max(e);
                if e >= settings.blowup_cap || !e.is_finite() {
                    return Ok(BlowupResult {
                        status: OdeStatus::BlewUp,
                        time: t,
                        peak: e.max(settings.blowup_cap),
                        step_exhausted: false,
                    });
                }
                if !log && (y[0] > settings.log_switch || y[1] > settings.log_switch) {
                    y = [y[0].ln(), y[1].ln()];
                    log = true;
                }
                let grow = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 4.0 };
                h *= grow.clamp(1.0, 4.0);
                last_h = h;
            } else {
                h *= if finite { (0.9 * err.powf(-0.2)).clamp(0.1, 0.5) } else { 0.25 };
                if h < min_step {
                    // Exhaustion means blow-up only if the solution is about
                    // to leave every scale: e-folding time within ~1000
                    // minimal steps.
                    let hv = if log { [y[0].exp(), y[1].exp()] } else { y };
                    let f = sys.rhs(hv, &w_at(t)[..sys.dims()], false);
                    let growth = (f[0] + f[1]) / (hv[0] + hv[1]);
                    if !(growth * 1e3 * min_step >= 1.0) {
                        return Err(Error::NoConvergence {
                            func: "ode step control",
                            iterations: k,
                        });
                    }
                    return Ok(BlowupResult {
                        status: OdeStatus::BlewUp,
                        time: t,
                        peak,
                        step_exhausted: true,
                    });
                }
            }
        }
    }
    Ok(BlowupResult {
        status: OdeStatus::Survived,
        time: grid.horizon,
        peak,
        step_exhausted: false,
    })
}

/// Relative shift of the blow-up time when the cap is lowered to `1e10`.
pub fn cap_sensitivity(
    sys: &OdeSystem,
    initial: [f64; 2],
    path: &BrownianPath,
    settings: &OdeSettings,
) -> Result<Option<f64>> {
    let base = integrate(sys, initial, path, settings)?;
    let lowered = integrate(
        sys,
        initial,
        path,
        &OdeSettings {
            blowup_cap: 1e10,
            ..*settings
        },
    )?;
    if base.blew_up() && lowered.blew_up() {
        Ok(Some((base.time - lowered.time).abs() / base.time))
    } else {
        Ok(None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichReport {
    pub lower: StoppingOutcome,
    pub ode: BlowupResult,
    pub upper: StoppingOutcome,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

impl SandwichReport {
    pub fn ok(&self) -> bool {
        self.lower_ok && self.upper_ok
    }
}

/// Checks `τ_lower ≤ τ_ode ≤ τ_upper` on one path with tolerance `2·dt`.
/// Censored bounds count as +∞; a surviving ODE is only known to blow up
/// after the horizon.
pub fn sandwich_check(
    params: &ModelParams,
    spectral: &SpectralData,
    path: &BrownianPath,
    opts: UpperOptions,
    settings: &OdeSettings,
) -> Result<SandwichReport> {
    let lower = lower_thresholds(params, spectral)?;
    let upper = upper_threshold(params, spectral, classify_case(params), opts)?;
    let sys = OdeSystem::for_params(params);
    let mass = initial_mass(params, spectral);
    let lo = lower.crossing(path)?;
    let up = upper.crossing(path)?;
    let ode = integrate(&sys, [mass.h1_0, mass.h2_0], path, settings)?;
    Ok(sandwich_from_outcomes(lo, ode, up, path.grid.dt, path.grid.horizon))
}

pub fn sandwich_from_outcomes(
    lower: StoppingOutcome,
    ode: BlowupResult,
    upper: StoppingOutcome,
    dt: f64,
    horizon: f64,
) -> SandwichReport {
    let tol = 2.0 * dt;
    let lower_ok = !lower.crossed() || !ode.blew_up() || lower.time <= ode.time + tol;
    let upper_ok = if !upper.crossed() {
        true
    } else if ode.blew_up() {
        ode.time <= upper.time + tol
    } else {
        horizon <= upper.time + tol
    };
    SandwichReport {
        lower,
        ode,
        upper,
        lower_ok,
        upper_ok,
    }
}
