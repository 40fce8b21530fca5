//! Closed-form thresholds for the lower and upper blow-up time bounds and
//! the functionals they are compared against.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::{accumulate, multi_crossing, FunctionalSpec, StoppingOutcome, Term};
use crate::model::{
    check_rho_conditions, check_rho_conditions_2d, classify_case, classify_exponents,
    epsilon_report, CaseTag, EpsilonReport, ModelParams, ModelParams2D, RhoCheck, RhoCheck2D,
};
use crate::paths::BrownianPath;
use crate::spectral::{initial_mass, initial_mass_2d, InitialMass, SpectralData};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdPair {
    pub spec: FunctionalSpec,
    pub threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Both ρ-identities hold; functionals use ρ₁, ρ₂.
    RhoConsistent,
    /// Identities fail; functionals use the four general exponents.
    GeneralIntensity,
    /// Two-component noise.
    TwoNoise,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBound {
    pub route: Route,
    pub pairs: Vec<ThresholdPair>,
    pub t1: f64,
    pub t2: f64,
    /// Two-noise only: `T₂` with `‖ψ‖^{q−1}` in place of `‖ψ‖^q`.
    pub t2_q_minus_one: Option<f64>,
}

impl LowerBound {
    pub fn theta(&self) -> f64 {
        self.t1.min(self.t2)
    }

    pub fn as_pairs(&self) -> Vec<(FunctionalSpec, f64)> {
        self.pairs.iter().map(|p| (p.spec.clone(), p.threshold)).collect()
    }

    pub fn crossing(&self, path: &BrownianPath) -> Result<StoppingOutcome> {
        multi_crossing(path, &self.as_pairs())
    }
}

fn single(coeff: f64) -> FunctionalSpec {
    FunctionalSpec::single(vec![coeff], 0.0)
}

fn positive_threshold(name: &str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be finite and positive, got {value}"
        )))
    }
}

/// `T₁ = 1/[(m+n+1)(C₁^m‖ψ‖^m + C₁^n‖ψ‖^n)]` and the analogous `T₂`.
pub fn lower_t1_t2(params: &ModelParams, spectral: &SpectralData) -> Result<(f64, f64)> {
    let s = spectral.sup_norm;
    let (m, n, p, q) = (params.m, params.n, params.p, params.q);
    let (c1, c2) = (params.c1, params.c2);
    let t1 = 1.0 / ((m + n + 1.0) * ((c1 * s).powf(m) + (c1 * s).powf(n)));
    let t2 = 1.0 / ((p + q + 1.0) * ((c2 * s).powf(p) + (c2 * s).powf(q)));
    Ok((positive_threshold("T1", t1)?, positive_threshold("T2", t2)?))
}

pub fn lower_thresholds(params: &ModelParams, spectral: &SpectralData) -> Result<LowerBound> {
    let (t1, t2) = lower_t1_t2(params, spectral)?;
    match check_rho_conditions(params) {
        RhoCheck::Consistent { rho1, rho2 } => {
            let theta = t1.min(t2);
            Ok(LowerBound {
                route: Route::RhoConsistent,
                pairs: vec![
                    ThresholdPair {
                        spec: single(rho1),
                        threshold: theta,
                    },
                    ThresholdPair {
                        spec: single(rho2),
                        threshold: theta,
                    },
                ],
                t1,
                t2,
                t2_q_minus_one: None,
            })
        }
        RhoCheck::Violated { .. } => {
            let pairs = params
                .general_exponents()
                .iter()
                .zip([t1, t1, t2, t2])
                .map(|(e, t)| ThresholdPair {
                    spec: single(*e),
                    threshold: t,
                })
                .collect();
            Ok(LowerBound {
                route: Route::GeneralIntensity,
                pairs,
                t1,
                t2,
                t2_q_minus_one: None,
            })
        }
    }
}

/// Max-combine of the four general exponentials against `min(T₁, T₂)`;
/// always crosses no later than the four-way lower bound.
pub fn tau_prime(params: &ModelParams, spectral: &SpectralData) -> Result<ThresholdPair> {
    let (t1, t2) = lower_t1_t2(params, spectral)?;
    let terms = params
        .general_exponents()
        .iter()
        .map(|e| Term::new(vec![*e], 0.0))
        .collect();
    Ok(ThresholdPair {
        spec: FunctionalSpec::max(terms),
        threshold: t1.min(t2),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct UpperOptions {
    /// Use `(2^{−(1+n)} + 2^{−(1+q)})ε₀` in the strict-chain rate.
    pub tight_rate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UpperBound {
    pub route: Route,
    pub case: CaseTag,
    pub pair: ThresholdPair,
    /// The bracketed growth rate of the comparison ODE (not used in the
    /// equal-exponent case).
    pub rate: Option<f64>,
    pub epsilon: Option<EpsilonReport>,
}

impl UpperBound {
    pub fn crossing(&self, path: &BrownianPath) -> Result<StoppingOutcome> {
        multi_crossing(path, &[(self.pair.spec.clone(), self.pair.threshold)])
    }
}

/// Threshold scaffolding shared by the one- and two-noise upper bounds.
/// `weights` are `(σ₁, σ₂)` for the two-noise system and `None` otherwise.
struct UpperScalars {
    threshold: f64,
    rate: Option<f64>,
    epsilon: Option<EpsilonReport>,
}

fn upper_scalars(
    case: CaseTag,
    exps: [f64; 4],
    mass: InitialMass,
    weights: Option<(f64, f64)>,
    opts: UpperOptions,
) -> Result<UpperScalars> {
    let [m, n, p, q] = exps;
    let e0 = mass.e0;
    if !(e0 > 0.0) {
        return Err(Error::UpperUnavailable(format!("E(0) must be positive, got {e0}")));
    }
    let (s1, s2) = weights.unwrap_or((1.0, 1.0));
    let sigma_sum = s1 + s2;
    if weights.is_some() && !(sigma_sum > 0.0) {
        return Err(Error::UpperUnavailable(format!(
            "sigma1 + sigma2 must be positive, got {sigma_sum}"
        )));
    }
    let (threshold, rate, epsilon) = match case {
        CaseTag::EqualExponents => {
            let t = match weights {
                None => 2f64.powf(m) / m * e0.powf(-m),
                Some(_) => 2f64.powf(1.0 + m) / (m * sigma_sum) * e0.powf(-m),
            };
            (t, None, None)
        }
        CaseTag::TwoLevel { beta, gamma } => {
            let rep = epsilon_report(case, exps, mass.h1_0, mass.h2_0)?;
            if !rep.all_hold() {
                return Err(Error::UpperUnavailable(
                    "two-level epsilon condition violated".into(),
                ));
            }
            let d3 = rep.d3.expect("two-level report carries D3");
            let eps = rep.eps0;
            let rate = eps / 2f64.powf(1.0 + gamma)
                - eps.powf((1.0 + beta) / (beta - gamma)) * d3 / e0.powf(1.0 + gamma);
            let scaled = if weights.is_some() { sigma_sum * rate } else { rate };
            (1.0 / (gamma * e0.powf(gamma) * scaled), Some(rate), Some(rep))
        }
        CaseTag::StrictChain => {
            let rep = epsilon_report(case, exps, mass.h1_0, mass.h2_0)?;
            if !rep.all_hold() {
                return Err(Error::UpperUnavailable(
                    "strict-chain epsilon conditions violated".into(),
                ));
            }
            let (d1, d2) = (rep.d1.expect("D1"), rep.d2.expect("D2"));
            let eps = rep.eps0;
            let lead = if opts.tight_rate {
                (2f64.powf(-(1.0 + n)) + 2f64.powf(-(1.0 + q))) * eps
            } else {
                eps / 2f64.powf(n)
            };
            let c1 = eps.powf((1.0 + m) / (m - n)) * d1;
            let c2 = eps.powf((1.0 + p) / (p - q)) * d2;
            let rate = match weights {
                Some(_) => sigma_sum * lead - (s1 * c1 + s2 * c2) / e0.powf(1.0 + q),
                None => lead - (c1 + c2) / e0.powf(1.0 + q),
            };
            (1.0 / (q * e0.powf(q) * rate), Some(rate), Some(rep))
        }
        CaseTag::General => {
            return Err(Error::UpperUnavailable(
                "no upper bound is available for general exponents".into(),
            ))
        }
    };
    if let Some(r) = rate {
        if !(r > 0.0) {
            return Err(Error::UpperUnavailable(format!(
                "{} growth rate {r} is not positive",
                case.name()
            )));
        }
    }
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(Error::UpperUnavailable(format!(
            "threshold {threshold} is not finite and positive"
        )));
    }
    Ok(UpperScalars {
        threshold,
        rate,
        epsilon,
    })
}

pub fn upper_threshold(
    params: &ModelParams,
    spectral: &SpectralData,
    case: CaseTag,
    opts: UpperOptions,
) -> Result<UpperBound> {
    if case != classify_case(params) {
        return Err(Error::InvalidParameter(format!(
            "case {} does not match the exponents",
            case.name()
        )));
    }
    let scalars = upper_scalars(case, params.exponents(), initial_mass(params, spectral), None, opts)?;
    let (route, spec) = match check_rho_conditions(params) {
        RhoCheck::Consistent { rho1, rho2 } => {
            let spec = if case == CaseTag::EqualExponents {
                single(rho1)
            } else {
                FunctionalSpec::min(vec![Term::new(vec![rho1], 0.0), Term::new(vec![rho2], 0.0)])
            };
            (Route::RhoConsistent, spec)
        }
        RhoCheck::Violated { .. } => {
            let terms = params
                .general_exponents()
                .iter()
                .map(|e| Term::new(vec![*e], 0.0))
                .collect();
            (Route::GeneralIntensity, FunctionalSpec::min(terms))
        }
    };
    Ok(UpperBound {
        route,
        case,
        pair: ThresholdPair {
            spec,
            threshold: scalars.threshold,
        },
        rate: scalars.rate,
        epsilon: scalars.epsilon,
    })
}

fn two_noise_rho(params: &ModelParams2D) -> Result<[[f64; 2]; 2]> {
    match check_rho_conditions_2d(params) {
        RhoCheck2D::Consistent { rho } => Ok(rho),
        RhoCheck2D::Violated { mismatch } => Err(Error::InvalidParameter(format!(
            "two-noise rho conditions violated, mismatches {mismatch:?}"
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LowerVariant {
    /// `‖ψ‖^q` in both minima.
    #[default]
    Symmetric,
    /// `‖ψ‖^{q−1}` in the second minimum.
    QMinusOne,
}

pub fn lower_thresholds_2d(
    params: &ModelParams2D,
    spectral: &SpectralData,
    variant: LowerVariant,
) -> Result<LowerBound> {
    let rho = two_noise_rho(params)?;
    let s = spectral.sup_norm;
    let (m, n, p, q) = (params.m, params.n, params.p, params.q);
    let (m1, m2) = (params.m1, params.m2);
    let (eta1, eta2) = (params.eta(0), params.eta(1));
    let t1 = 1.0 / (eta1 * (m + n + 1.0) * ((m1 * s).powf(m) + (m1 * s).powf(n)));
    let t2 = 1.0 / (eta2 * (p + q + 1.0) * ((m2 * s).powf(p) + (m2 * s).powf(q)));
    let t2_alt =
        1.0 / (eta2 * (p + q + 1.0) * ((m2 * s).powf(p) + m2.powf(q) * s.powf(q - 1.0)));
    let t1 = positive_threshold("T1", t1)?;
    let t2 = positive_threshold("T2", t2)?;
    let t2_alt = positive_threshold("T2 (q-1 variant)", t2_alt)?;
    let second = match variant {
        LowerVariant::Symmetric => t1.min(t2),
        LowerVariant::QMinusOne => t1.min(t2_alt),
    };
    Ok(LowerBound {
        route: Route::TwoNoise,
        pairs: vec![
            ThresholdPair {
                spec: FunctionalSpec::single(vec![rho[0][0], rho[0][1]], 0.0),
                threshold: t1.min(t2),
            },
            ThresholdPair {
                spec: FunctionalSpec::single(vec![rho[1][0], rho[1][1]], 0.0),
                threshold: second,
            },
        ],
        t1,
        t2,
        t2_q_minus_one: Some(t2_alt),
    })
}

/// Upper bound for the two-noise system. In the two-level case the pair
/// `ρ̂₁ = ρ₁₁ = ρ₂₁`, `ρ̂₂ = ρ₁₂ = ρ₂₂` cannot hold together with the
/// ρ-conditions unless β = γ, so the minimum runs over all four
/// single-component exponentials, which reduces to that pair when those
/// equalities do hold.
pub fn upper_threshold_2d(
    params: &ModelParams2D,
    spectral: &SpectralData,
    opts: UpperOptions,
) -> Result<UpperBound> {
    let rho = two_noise_rho(params)?;
    let [m, n, p, q] = params.exponents();
    let case = classify_exponents(m, n, p, q);
    let weights = (params.sigma(0), params.sigma(1));
    let scalars = upper_scalars(
        case,
        params.exponents(),
        initial_mass_2d(params, spectral),
        Some(weights),
        opts,
    )?;
    let spec = match case {
        CaseTag::EqualExponents => FunctionalSpec::single(vec![rho[0][0], rho[0][1]], 0.0),
        _ => FunctionalSpec::min(vec![
            Term::new(vec![rho[0][0], 0.0], 0.0),
            Term::new(vec![0.0, rho[0][1]], 0.0),
            Term::new(vec![rho[1][0], 0.0], 0.0),
            Term::new(vec![0.0, rho[1][1]], 0.0),
        ]),
    };
    Ok(UpperBound {
        route: Route::TwoNoise,
        case,
        pair: ThresholdPair {
            spec,
            threshold: scalars.threshold,
        },
        rate: scalars.rate,
        epsilon: scalars.epsilon,
    })
}

/// The constants reported by the `thresholds` command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Constants {
    pub rho1: Option<f64>,
    pub rho2: Option<f64>,
    #[serde(rename = "D1")]
    pub d1: Option<f64>,
    #[serde(rename = "D2")]
    pub d2: Option<f64>,
    #[serde(rename = "D3")]
    pub d3: Option<f64>,
    pub eps0: Option<f64>,
    #[serde(rename = "E0")]
    pub e0: f64,
    #[serde(rename = "T1")]
    pub t1: f64,
    #[serde(rename = "T2")]
    pub t2: f64,
    pub theta_lower: f64,
    pub theta_upper: Option<f64>,
    pub case: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSet {
    pub lower: LowerBound,
    pub upper: std::result::Result<UpperBound, Error>,
    pub constants: Constants,
}

impl ThresholdSet {
    pub fn upper_available(&self) -> bool {
        self.upper.is_ok()
    }
}

fn epsilon_constants(case: CaseTag, exps: [f64; 4], mass: InitialMass) -> Option<EpsilonReport> {
    match case {
        CaseTag::TwoLevel { .. } | CaseTag::StrictChain => {
            epsilon_report(case, exps, mass.h1_0, mass.h2_0).ok()
        }
        _ => None,
    }
}

pub fn threshold_set(
    params: &ModelParams,
    spectral: &SpectralData,
    opts: UpperOptions,
) -> Result<ThresholdSet> {
    let case = classify_case(params);
    let lower = lower_thresholds(params, spectral)?;
    let upper = upper_threshold(params, spectral, case, opts);
    let mass = initial_mass(params, spectral);
    let eps = epsilon_constants(case, params.exponents(), mass);
    let rhos = check_rho_conditions(params).rhos();
    let constants = Constants {
        rho1: rhos.map(|r| r.0),
        rho2: rhos.map(|r| r.1),
        d1: eps.as_ref().and_then(|e| e.d1),
        d2: eps.as_ref().and_then(|e| e.d2),
        d3: eps.as_ref().and_then(|e| e.d3),
        eps0: eps.as_ref().map(|e| e.eps0),
        e0: mass.e0,
        t1: lower.t1,
        t2: lower.t2,
        theta_lower: lower.theta(),
        theta_upper: upper.as_ref().ok().map(|u| u.pair.threshold),
        case: case.name().to_string(),
    };
    Ok(ThresholdSet {
        lower,
        upper,
        constants,
    })
}

/// Two-noise variant; `rho1`/`rho2` report `ρ₁₁`/`ρ₂₁` and `T₁`/`T₂` are the
/// η-weighted lower thresholds.
pub fn threshold_set_2d(
    params: &ModelParams2D,
    spectral: &SpectralData,
    variant: LowerVariant,
    opts: UpperOptions,
) -> Result<ThresholdSet> {
    let [m, n, p, q] = params.exponents();
    let case = classify_exponents(m, n, p, q);
    let lower = lower_thresholds_2d(params, spectral, variant)?;
    let upper = upper_threshold_2d(params, spectral, opts);
    let mass = initial_mass_2d(params, spectral);
    let eps = epsilon_constants(case, params.exponents(), mass);
    let rho = two_noise_rho(params)?;
    let constants = Constants {
        rho1: Some(rho[0][0]),
        rho2: Some(rho[1][0]),
        d1: eps.as_ref().and_then(|e| e.d1),
        d2: eps.as_ref().and_then(|e| e.d2),
        d3: eps.as_ref().and_then(|e| e.d3),
        eps0: eps.as_ref().map(|e| e.eps0),
        e0: mass.e0,
        t1: lower.t1,
        t2: lower.t2,
        theta_lower: lower.theta(),
        theta_upper: upper.as_ref().ok().map(|u| u.pair.threshold),
        case: case.name().to_string(),
    };
    Ok(ThresholdSet {
        lower,
        upper,
        constants,
    })
}

/// True when the global-existence inequality holds up to the path horizon for
/// both subsystems, i.e. no blow-up is certified on this path.
pub fn global_solution_check(
    params: &ModelParams,
    spectral: &SpectralData,
    path: &BrownianPath,
) -> Result<bool> {
    let (t1, t2) = lower_t1_t2(params, spectral)?;
    let groups: Vec<(Vec<f64>, f64)> = match check_rho_conditions(params) {
        RhoCheck::Consistent { rho1, rho2 } => vec![(vec![rho1], t1), (vec![rho2], t2)],
        RhoCheck::Violated { .. } => {
            let e = params.general_exponents();
            vec![(vec![e[0], e[1]], t1), (vec![e[2], e[3]], t2)]
        }
    };
    for (exps, t) in groups {
        for e in exps {
            let acc = accumulate(path, &single(e))?;
            // (β+γ+1)(C^β‖ψ‖^β + C^γ‖ψ‖^γ)·A < 1  ⇔  A < T
            if acc.overflowed || acc.at_end() / t >= 1.0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
