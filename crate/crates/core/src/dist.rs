//! Gamma-law blow-up probabilities, their Monte Carlo counterparts, the
//! perpetuity (Yor) oracle and the two-noise comparison predicate.
//!
//! All three probability cases reduce to the same object: the drifted
//! functional `A = ∫₀^∞ exp(ρW_s − d·s) ds` against a threshold `N`. Scaling
//! time by `4/ρ²` turns `A` into `2/(ρ² Z_a)` with `Z_a ~ Gamma(a, 1)` and
//! `a = 2d/ρ²`, so `P(A ≤ N) = Q(a, 2/(ρ²N))`.

use serde::Serialize;

use crate::bounds::{upper_threshold, UpperOptions};
use crate::error::{Error, Result};
use crate::functionals::{accumulate, FunctionalSpec, OVERFLOW_EXPONENT};
use crate::mc::{map_paths, neumaier_sum};
use crate::model::{check_rho_conditions, classify_case, CaseTag, ModelParams, RhoCheck};
use crate::paths::{BrownianPath, BrownianStream, PathSource, SimGrid};
use crate::special::{ln_gamma, reg_gamma_lower, reg_gamma_upper};
use crate::spectral::SpectralData;

/// Relative size of the neglected tail `∫_T^∞` allowed when truncating.
pub const TAIL_TOLERANCE: f64 = 1e-4;

/// Gamma law with shape `a` and scale `δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaParams {
    pub shape: f64,
    pub scale: f64,
}

impl GammaParams {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape.is_finite() && shape > 0.0 && scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma law needs positive finite shape and scale, got ({shape}, {scale})"
            )));
        }
        Ok(Self { shape, scale })
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        reg_gamma_lower(self.shape, (x / self.scale).max(0.0))
    }

    pub fn sf(&self, x: f64) -> Result<f64> {
        reg_gamma_upper(self.shape, (x / self.scale).max(0.0))
    }

    pub fn mean(&self) -> f64 {
        self.shape * self.scale
    }
}

/// Density of `A = 2/(ρ² Z_a)`:
/// `h(y) = (c/y)^a e^{−c/y} / (y Γ(a))` with `c = 2/ρ²`.
pub fn blowup_density(y: f64, shape: f64, rho: f64) -> f64 {
    if !(y > 0.0) || !y.is_finite() {
        return 0.0;
    }
    let c = 2.0 / (rho * rho);
    let u = c / y;
    (shape * u.ln() - u - y.ln() - ln_gamma(shape)).exp()
}

/// `P(A ≤ n) = Q(a, 2/(ρ²n))`.
pub fn functional_cdf(shape: f64, rho: f64, n: f64) -> Result<f64> {
    if !(n > 0.0) {
        return Err(Error::InvalidParameter(format!("threshold must be positive, got {n}")));
    }
    if n.is_infinite() {
        return Ok(1.0);
    }
    reg_gamma_upper(shape, 2.0 / (rho * rho * n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProbabilityCase {
    /// `m = n = p = q = β`, noise `ρ₁`.
    Equal,
    /// `β = m = p > γ = n = q`, noise `ρ₂`, threshold shifted by `1/(μγ)`.
    TwoLevel,
    /// `m > n > p > q`, noise `ρ₂`, threshold shifted by `1/(μq)`.
    StrictChain,
}

impl ProbabilityCase {
    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(Self::Equal),
            2 => Ok(Self::TwoLevel),
            3 => Ok(Self::StrictChain),
            _ => Err(Error::InvalidParameter(format!("probability case must be 1, 2 or 3, got {i}"))),
        }
    }

    pub fn index(&self) -> u8 {
        match self {
            Self::Equal => 1,
            Self::TwoLevel => 2,
            Self::StrictChain => 3,
        }
    }

    fn matches(&self, tag: CaseTag) -> bool {
        matches!(
            (self, tag),
            (Self::Equal, CaseTag::EqualExponents)
                | (Self::TwoLevel, CaseTag::TwoLevel { .. })
                | (Self::StrictChain, CaseTag::StrictChain)
        )
    }

    fn expected(&self) -> &'static str {
        match self {
            Self::Equal => "equal",
            Self::TwoLevel => "two-level",
            Self::StrictChain => "strict-chain",
        }
    }
}

/// The drifted functional and threshold behind one probability case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbabilitySetup {
    pub case: u8,
    pub mu: f64,
    pub rho: f64,
    /// `d` in `exp(ρW_s − d·s)`.
    pub drift: f64,
    /// `a = 2d/ρ²`.
    pub shape: f64,
    pub threshold: f64,
}

impl ProbabilitySetup {
    /// Setup from raw scalars, used for the degenerate-threshold checks.
    pub fn from_scalars(rho: f64, drift: f64, threshold: f64) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0 && drift.is_finite() && drift > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need rho > 0 and drift > 0, got ({rho}, {drift})"
            )));
        }
        if !(threshold > 0.0) {
            return Err(Error::Vacuous(format!("threshold {threshold} is not positive")));
        }
        Ok(Self {
            case: 0,
            mu: f64::NAN,
            rho,
            drift,
            shape: 2.0 * drift / (rho * rho),
            threshold,
        })
    }
}

pub fn probability_setup(
    params: &ModelParams,
    spectral: &SpectralData,
    case: ProbabilityCase,
    opts: UpperOptions,
) -> Result<ProbabilitySetup> {
    let tag = classify_case(params);
    if !case.matches(tag) {
        return Err(Error::InvalidParameter(format!(
            "probability case {} needs {} exponents, got {}",
            case.index(),
            case.expected(),
            tag.name()
        )));
    }
    let (rho1, rho2) = match check_rho_conditions(params) {
        RhoCheck::Consistent { rho1, rho2 } => (rho1, rho2),
        RhoCheck::Violated { .. } => {
            return Err(Error::InvalidParameter(
                "the probability formulas need the rho conditions to hold".into(),
            ))
        }
    };
    if case != ProbabilityCase::Equal && !(params.k2 > params.k1) {
        return Err(Error::InvalidParameter(format!(
            "probability case {} needs k2 > k1, got k1 = {}, k2 = {}",
            case.index(),
            params.k1,
            params.k2
        )));
    }
    let mu = params.mu(spectral);
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter(format!("damping mu must be positive, got {mu}")));
    }
    let upper = upper_threshold(params, spectral, tag, opts)?;
    let base = upper.pair.threshold;
    let (rho, exponent, threshold) = match case {
        ProbabilityCase::Equal => (rho1, params.m, base),
        ProbabilityCase::TwoLevel => (rho2, params.n, base - 1.0 / (mu * params.n)),
        ProbabilityCase::StrictChain => (rho2, params.q, base - 1.0 / (mu * params.q)),
    };
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter(format!("noise intensity must be positive, got {rho}")));
    }
    if !(threshold > 0.0) {
        return Err(Error::Vacuous(format!(
            "shifted threshold {threshold} is not positive (upper threshold {base}, mu {mu})"
        )));
    }
    let drift = mu * exponent;
    Ok(ProbabilitySetup {
        case: case.index(),
        mu,
        rho,
        drift,
        shape: 2.0 * drift / (rho * rho),
        threshold,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedForm {
    /// `P(τ** = ∞) = P(A ≤ N)`.
    pub p_infinite: f64,
    /// `1 − P(τ** = ∞)`.
    pub complement: f64,
}

pub fn closed_form(setup: &ProbabilitySetup) -> Result<ClosedForm> {
    let p = functional_cdf(setup.shape, setup.rho, setup.threshold)?;
    Ok(ClosedForm {
        p_infinite: p,
        complement: 1.0 - p,
    })
}

pub fn blowup_probability_closed_form(
    params: &ModelParams,
    spectral: &SpectralData,
    case: ProbabilityCase,
    opts: UpperOptions,
) -> Result<ClosedForm> {
    closed_form(&probability_setup(params, spectral, case, opts)?)
}

/// Truncation horizon `T` and tail bound `e^{(ρ²/2−d)T}/((d−ρ²/2)N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Truncation {
    pub horizon: f64,
    /// Expected neglected tail relative to the threshold.
    pub tail_bound: f64,
}

pub fn truncation_horizon(setup: &ProbabilitySetup, min_horizon: f64) -> Result<Truncation> {
    let excess = setup.drift - 0.5 * setup.rho * setup.rho;
    if !(excess > 0.0) {
        return Err(Error::Truncation(format!(
            "drift {} does not exceed rho^2/2 = {}, the neglected tail has no finite bound",
            setup.drift,
            0.5 * setup.rho * setup.rho
        )));
    }
    let tail = |t: f64| (-excess * t).exp() / (excess * setup.threshold);
    let needed = if setup.threshold.is_infinite() {
        0.0
    } else {
        ((1.0 / (TAIL_TOLERANCE * excess * setup.threshold)).ln() / excess).max(0.0)
    };
    let horizon = needed.max(min_horizon);
    Ok(Truncation {
        horizon,
        tail_bound: if setup.threshold.is_infinite() { 0.0 } else { tail(horizon) },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityReport {
    pub setup: ProbabilitySetup,
    pub closed_form: f64,
    pub complement: f64,
    pub mc_estimate: f64,
    pub mc_stderr: f64,
    pub abs_diff: f64,
    pub n_paths: u64,
    pub dt: f64,
    pub truncation_horizon: f64,
    pub tail_bound: f64,
    pub warning: Option<String>,
}

/// Whether the truncated drifted functional stays at or below the threshold.
/// Stops as soon as the running integral exceeds it.
fn stays_below(setup: &ProbabilitySetup, grid: &SimGrid, source: &PathSource, id: u64) -> bool {
    let mut stream = BrownianStream::for_path(grid, source.seed, id, 0);
    let mut w = || if source.zero_noise { stream.next().map(|_| 0.0) } else { stream.next() };
    let mut prev = setup.rho * w().unwrap_or(0.0);
    let mut acc = 0.0;
    for k in 1..grid.n_nodes() {
        let e = setup.rho * w().unwrap_or(0.0) - setup.drift * grid.time(k);
        if e > OVERFLOW_EXPONENT {
            return false;
        }
        acc += 0.5 * grid.step(k) * (prev.exp() + e.exp());
        if acc > setup.threshold {
            return false;
        }
        prev = e;
    }
    true
}

pub fn blowup_probability_mc(
    setup: &ProbabilitySetup,
    n_paths: u64,
    dt: f64,
    min_horizon: f64,
    source: PathSource,
    workers: usize,
) -> Result<ProbabilityReport> {
    if n_paths == 0 {
        return Err(Error::InvalidParameter("n_paths must be positive".into()));
    }
    let trunc = truncation_horizon(setup, min_horizon.max(dt))?;
    let grid = SimGrid::new(dt, trunc.horizon)?;
    let below = map_paths(n_paths, workers, |id| stays_below(setup, &grid, &source, id));
    let hits = below.iter().filter(|b| **b).count();
    let p = hits as f64 / n_paths as f64;
    let stderr = (p * (1.0 - p) / n_paths as f64).sqrt();
    let cf = closed_form(setup)?;
    // A sample with no spread still resolves probabilities only to 1/n.
    let resolution = stderr.max(1.0 / n_paths as f64);
    let warning = (trunc.tail_bound > resolution).then(|| {
        format!(
            "truncation tail bound {:.3e} exceeds the Monte Carlo standard error {:.3e}",
            trunc.tail_bound, stderr
        )
    });
    Ok(ProbabilityReport {
        setup: *setup,
        closed_form: cf.p_infinite,
        complement: cf.complement,
        mc_estimate: p,
        mc_stderr: stderr,
        abs_diff: (cf.p_infinite - p).abs(),
        n_paths,
        dt,
        truncation_horizon: grid.horizon,
        tail_bound: trunc.tail_bound,
        warning,
    })
}

/// Largest gap between the empirical CDF of `sample` and `cdf`.
pub fn ks_distance(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs: Vec<f64> = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, x)| {
            let f = cdf(*x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value `1.63/√n`.
pub fn ks_critical(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

/// Allowance for the O(dt) bias of the simulated sample.
pub const KS_ALLOWANCE: f64 = 0.005;

/// `∫₀^T e^{2(W_t − νt)} dt` on the path's own grid.
pub fn yor_functional(path: &BrownianPath, nu: f64) -> Result<f64> {
    Ok(accumulate(path, &FunctionalSpec::single(vec![2.0], -2.0 * nu))?.at_end())
}

fn yor_functional_streamed(nu: f64, grid: &SimGrid, source: &PathSource, id: u64) -> f64 {
    let stream = BrownianStream::for_path(grid, source.seed, id, 0);
    let mut prev = 1.0;
    let mut acc = 0.0;
    for (k, w) in stream.enumerate().skip(1) {
        let w = if source.zero_noise { 0.0 } else { w };
        let cur = (2.0 * (w - nu * grid.time(k))).exp();
        acc += 0.5 * grid.step(k) * (prev + cur);
        prev = cur;
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanComparison {
    pub sample_mean: f64,
    pub stderr: f64,
    pub theory: f64,
    pub abs_diff: f64,
    /// `|mean − theory| ≤ 3·stderr + 0.005`.
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YorReport {
    pub nu: f64,
    pub n_paths: u64,
    pub dt: f64,
    pub horizon: f64,
    pub tail_bound: f64,
    pub ks_distance: f64,
    pub ks_critical: f64,
    pub ks_allowance: f64,
    pub ks_pass: bool,
    pub mean_vs_theory: MeanComparison,
}

/// Neglected mean `∫_T^∞ e^{2(1−ν)t} dt`.
pub fn yor_tail_bound(nu: f64, horizon: f64) -> f64 {
    (-2.0 * (nu - 1.0) * horizon).exp() / (2.0 * (nu - 1.0))
}

/// Samples `T_i = ∫₀^T e^{2(W−νt)}dt` and compares `1/(2T_i)` with
/// Gamma(ν, 1) and the sample mean of `T_i` with `1/(2(ν−1))`.
pub fn yor_oracle(
    nu: f64,
    n_paths: u64,
    grid: &SimGrid,
    source: PathSource,
    workers: usize,
) -> Result<YorReport> {
    if !(nu.is_finite() && nu > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "nu must exceed 1 for a finite mean and tail bound, got {nu}"
        )));
    }
    if n_paths < 2 {
        return Err(Error::InvalidParameter("yor oracle needs at least 2 paths".into()));
    }
    let tail_bound = yor_tail_bound(nu, grid.horizon);
    if tail_bound >= TAIL_TOLERANCE {
        return Err(Error::Truncation(format!(
            "horizon {} leaves a tail of {tail_bound:.3e}, need below {TAIL_TOLERANCE:e}",
            grid.horizon
        )));
    }
    let ts = map_paths(n_paths, workers, |id| yor_functional_streamed(nu, grid, &source, id));
    let law = GammaParams::new(nu, 1.0)?;
    let vs: Vec<f64> = ts.iter().map(|t| 0.5 / t).collect();
    let ks = ks_distance(&vs, |v| law.cdf(v).unwrap_or(f64::NAN));
    let mean_vs_theory = mean_comparison(&ts, 0.5 / (nu - 1.0));
    let critical = ks_critical(ts.len());
    Ok(YorReport {
        nu,
        n_paths,
        dt: grid.dt,
        horizon: grid.horizon,
        tail_bound,
        ks_distance: ks,
        ks_critical: critical,
        ks_allowance: KS_ALLOWANCE,
        ks_pass: ks < critical + KS_ALLOWANCE,
        mean_vs_theory,
    })
}

fn mean_comparison(xs: &[f64], theory: f64) -> MeanComparison {
    let n = xs.len() as f64;
    let mean = neumaier_sum(xs.iter().copied()) / n;
    let var = neumaier_sum(xs.iter().map(|x| (x - mean).powi(2))) / (n - 1.0);
    let stderr = (var / n).sqrt();
    let abs_diff = (mean - theory).abs();
    MeanComparison {
        sample_mean: mean,
        stderr,
        theory,
        abs_diff,
        within: abs_diff <= 3.0 * stderr + KS_ALLOWANCE,
    }
}

/// Scalars of the two-noise comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompareScalars {
    pub rho1: f64,
    pub rho2: f64,
    pub l1: f64,
    pub l2: f64,
    pub lambda: f64,
    pub beta: f64,
    pub gamma: f64,
    pub eps0: f64,
    #[serde(rename = "E0")]
    pub e0: f64,
    #[serde(rename = "C3")]
    pub c3: f64,
}

impl CompareScalars {
    pub fn reference() -> Self {
        Self {
            rho1: 1.0,
            rho2: 1.0,
            l1: 0.5,
            l2: 0.5,
            lambda: 1.0,
            beta: 3.0,
            gamma: 1.0,
            eps0: 1.0,
            e0: 2.0,
            c3: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hypothesis {
    pub name: &'static str,
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailPair {
    pub shape1: f64,
    pub shape2: f64,
    /// `P(σ₁* = ∞) = P(K ≤ ρ₁² X₁)`.
    pub p_sigma1_infinite: f64,
    /// `P(σ₂* = ∞) = P(K ≤ (ρ₁²+ρ₂²) X₂)`.
    pub p_sigma2_infinite: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub scalars: CompareScalars,
    pub gamma_bar: f64,
    pub k3: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    #[serde(rename = "Lambda")]
    pub lambda_ratio: f64,
    pub hypotheses: Vec<Hypothesis>,
    /// All hypotheses hold, so `P(σ₁* < ∞) > P(σ₂* < ∞)`.
    pub certified: bool,
    /// `K = 2γ(ε₀E^γ − E⁻¹C₃ε₀^{(1+β)/(β−γ)})`.
    #[serde(rename = "K")]
    pub k: f64,
    /// Tails with `X(α, 1)` read as Gamma(α+1, 1).
    pub tails_shape_alpha_plus_one: TailPair,
    /// Tails with the perpetuity shape Gamma(α, 1).
    pub tails_shape_alpha: TailPair,
}

/// Grid for the `x₀` witness, log-spaced over `[1e-6, 1e6]`.
fn x0_grid() -> impl Iterator<Item = f64> {
    (0..=120).map(|i| 10f64.powf(-6.0 + 0.1 * i as f64))
}

pub fn compare_noise_predicate(s: &CompareScalars) -> Result<CompareReport> {
    let all = [s.rho1, s.rho2, s.l1, s.l2, s.lambda, s.beta, s.gamma, s.eps0, s.e0, s.c3];
    if all.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("comparison scalars must be finite".into()));
    }
    if !(s.gamma > 0.0) || !(s.rho1 != 0.0) || !(s.e0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need gamma > 0, rho1 != 0 and E0 > 0, got gamma = {}, rho1 = {}, E0 = {}",
            s.gamma, s.rho1, s.e0
        )));
    }
    let d1 = s.rho1 * s.rho1;
    let d2 = d1 + s.rho2 * s.rho2;
    let gamma_bar = s.rho2 * s.rho2 / (d1 * d2);
    let k3 = 2.0 * (s.l1 * s.rho2 * s.rho2 - s.l2 * d1) * s.gamma / (d1 * d2);
    let alpha1 = 2.0 * (s.lambda + s.l1) * s.gamma / d1;
    let alpha2 = 2.0 * (s.lambda + s.l1 + s.l2) * s.gamma / d2;
    let ln_lambda = ln_gamma(alpha2 + 1.0) + (alpha2 + 1.0) * d2.ln()
        - ln_gamma(alpha1 + 1.0)
        - (alpha1 + 1.0) * d1.ln();
    let lambda_ratio = ln_lambda.exp();

    let mut hypotheses = Vec::with_capacity(4);
    let lhs = s.l2 * d1 - s.l1 * s.rho2 * s.rho2;
    let rhs = s.lambda * s.rho2 * s.rho2;
    hypotheses.push(Hypothesis {
        name: "noise_balance",
        holds: lhs < rhs,
        lhs,
        rhs,
    });

    let power = 2.0 * s.lambda * s.gamma * gamma_bar + k3;
    let base = 2.0 * s.lambda * s.gamma + k3 / gamma_bar;
    let ln_rhs = if base > 0.0 { ln_lambda + power * base.ln() } else { f64::NAN };
    hypotheses.push(Hypothesis {
        name: "gamma_ratio",
        holds: ln_rhs.is_finite() && power < ln_rhs,
        lhs: power.exp(),
        rhs: ln_rhs.exp(),
    });

    let gap = s.beta - s.gamma;
    let eps_cap = if gap > 0.0 && s.c3 > 0.0 {
        (s.e0.powf(1.0 + s.gamma) / s.c3).powf(gap / (s.gamma + 1.0))
    } else {
        f64::NAN
    };
    hypotheses.push(Hypothesis {
        name: "eps0_range",
        holds: s.eps0 > 0.0 && s.eps0 < eps_cap,
        lhs: s.eps0,
        rhs: eps_cap,
    });

    let young = if gap > 0.0 && s.eps0 > 0.0 {
        s.eps0.powf((1.0 + s.beta) / gap)
    } else {
        f64::NAN
    };
    let witness_lhs = s.gamma * (s.eps0 * s.e0.powf(s.gamma) - s.c3 * young / s.e0);
    let witness = x0_grid().filter(|x0| witness_lhs > *x0).last();
    hypotheses.push(Hypothesis {
        name: "x0_witness",
        holds: witness.is_some(),
        lhs: witness_lhs,
        rhs: witness.unwrap_or(f64::NAN),
    });

    let certified = hypotheses.iter().all(|h| h.holds);
    let k = 2.0 * witness_lhs;
    let tails = |shift: f64| -> Result<TailPair> {
        let (a1, a2) = (alpha1 + shift, alpha2 + shift);
        Ok(TailPair {
            shape1: a1,
            shape2: a2,
            p_sigma1_infinite: gamma_tail_at_least(a1, k / d1)?,
            p_sigma2_infinite: gamma_tail_at_least(a2, k / d2)?,
        })
    };
    Ok(CompareReport {
        scalars: *s,
        gamma_bar,
        k3,
        alpha1,
        alpha2,
        lambda_ratio,
        hypotheses,
        certified,
        k,
        tails_shape_alpha_plus_one: tails(1.0)?,
        tails_shape_alpha: tails(0.0)?,
    })
}

/// `P(X ≥ x)` for `X ~ Gamma(a, 1)`; `NaN` if `a ≤ 0` or `K` is not finite.
fn gamma_tail_at_least(a: f64, x: f64) -> Result<f64> {
    if !(a > 0.0) || x.is_nan() {
        return Ok(f64::NAN);
    }
    if x <= 0.0 {
        return Ok(1.0);
    }
    reg_gamma_upper(a, x)
}
