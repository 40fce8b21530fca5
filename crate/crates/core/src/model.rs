//! Run parameters, case classification and the structural conditions on
//! exponents and noise intensities.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{DomainSpec, SpectralData};

/// Relative tolerance for the algebraic ρ-identities.
pub const RHO_REL_TOL: f64 = 1e-12;

/// Parameters of the one-noise system with eigenfunction initial data
/// `f_i = C_i ψ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelParams {
    pub m: f64,
    pub n: f64,
    pub p: f64,
    pub q: f64,
    pub k1: f64,
    pub k2: f64,
    pub c1: f64,
    pub c2: f64,
    pub domain: DomainSpec,
    /// Replaces the domain eigenvalue where a run needs a different λ.
    pub lambda_override: Option<f64>,
}

impl ModelParams {
    pub fn new(
        exponents: [f64; 4],
        noise: [f64; 2],
        init: [f64; 2],
        domain: DomainSpec,
    ) -> Result<Self> {
        let [m, n, p, q] = exponents;
        let params = Self {
            m,
            n,
            p,
            q,
            k1: noise[0],
            k2: noise[1],
            c1: init[0],
            c2: init[1],
            domain,
            lambda_override: None,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_lambda_override(mut self, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda_override must be finite and nonnegative, got {lambda}"
            )));
        }
        self.lambda_override = Some(lambda);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        validate_exponents(self.m, self.n, self.p, self.q)?;
        for (name, k) in [("k1", self.k1), ("k2", self.k2)] {
            if !k.is_finite() || k == 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and nonzero, got {k}"
                )));
            }
        }
        for (name, c) in [("C1", self.c1), ("C2", self.c2)] {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and positive, got {c}"
                )));
            }
        }
        self.domain.validate()
    }

    pub fn exponents(&self) -> [f64; 4] {
        [self.m, self.n, self.p, self.q]
    }

    pub fn lambda(&self, spectral: &SpectralData) -> f64 {
        self.lambda_override.unwrap_or(spectral.lambda)
    }

    /// Potentials `V_i = λ + k_i²/2` used by the undamped systems.
    pub fn potentials(&self, spectral: &SpectralData) -> [f64; 2] {
        let lambda = self.lambda(spectral);
        [
            lambda + 0.5 * self.k1 * self.k1,
            lambda + 0.5 * self.k2 * self.k2,
        ]
    }

    /// Damping rate `μ = λ + (k₁² + k₂²)/2` of the `V_i = 0` system.
    pub fn mu(&self, spectral: &SpectralData) -> f64 {
        self.lambda(spectral) + 0.5 * (self.k1 * self.k1 + self.k2 * self.k2)
    }

    /// The four exponents of the general-intensity functionals, in the order
    /// `(1+n)k₂−k₁, m·k₁, (1+p)k₁−k₂, q·k₂`.
    pub fn general_exponents(&self) -> [f64; 4] {
        [
            (1.0 + self.n) * self.k2 - self.k1,
            self.m * self.k1,
            (1.0 + self.p) * self.k1 - self.k2,
            self.q * self.k2,
        ]
    }

    /// Swaps the roles of the two subsystems: `(m,n,k₁,C₁) ↔ (q,p,k₂,C₂)`.
    pub fn relabeled(&self) -> Self {
        Self {
            m: self.q,
            n: self.p,
            p: self.n,
            q: self.m,
            k1: self.k2,
            k2: self.k1,
            c1: self.c2,
            c2: self.c1,
            domain: self.domain.clone(),
            lambda_override: self.lambda_override,
        }
    }
}

fn validate_exponents(m: f64, n: f64, p: f64, q: f64) -> Result<()> {
    if ![m, n, p, q].iter().all(|x| x.is_finite()) {
        return Err(Error::InvalidParameter("exponents must be finite".into()));
    }
    // The two-level pattern m = p > n = q is admitted alongside the chain.
    let chain = m >= n && n >= p && p >= q;
    let two_level = m == p && n == q && m > n;
    if !(q > 0.0 && n > 0.0 && (chain || two_level)) {
        return Err(Error::InvalidParameter(format!(
            "exponents must satisfy m >= n >= p >= q > 0 or m = p > n = q > 0, \
             got m={m}, n={n}, p={p}, q={q}"
        )));
    }
    Ok(())
}

/// Parameters of the system driven by a two-dimensional Brownian motion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelParams2D {
    pub m: f64,
    pub n: f64,
    pub p: f64,
    pub q: f64,
    /// `k[i][j]` multiplies `u_{i+1} dW_{j+1}`.
    pub k: [[f64; 2]; 2],
    /// `coeff[i][j]` is `C_{(i+1)(j+1)}`.
    pub coeff: [[f64; 2]; 2],
    pub m1: f64,
    pub m2: f64,
    pub domain: DomainSpec,
}

impl ModelParams2D {
    pub fn new(
        exponents: [f64; 4],
        k: [[f64; 2]; 2],
        coeff: [[f64; 2]; 2],
        init: [f64; 2],
        domain: DomainSpec,
    ) -> Result<Self> {
        let params = Self::new_allowing_zero_noise(exponents, k, coeff, init, domain)?;
        for (i, row) in params.k.iter().enumerate() {
            for (j, kij) in row.iter().enumerate() {
                if *kij == 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "k{}{} must be nonzero",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(params)
    }

    /// Same as [`ModelParams2D::new`] but accepts zero intensities, as in the
    /// comparison between one- and two-component noise.
    pub fn new_allowing_zero_noise(
        exponents: [f64; 4],
        k: [[f64; 2]; 2],
        coeff: [[f64; 2]; 2],
        init: [f64; 2],
        domain: DomainSpec,
    ) -> Result<Self> {
        let [m, n, p, q] = exponents;
        validate_exponents(m, n, p, q)?;
        if !k.iter().flatten().chain(coeff.iter().flatten()).all(|x| x.is_finite()) {
            return Err(Error::InvalidParameter(
                "noise intensities and coefficients must be finite".into(),
            ));
        }
        for (name, v) in [("M1", init[0]), ("M2", init[1])] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        domain.validate()?;
        Ok(Self {
            m,
            n,
            p,
            q,
            k,
            coeff,
            m1: init[0],
            m2: init[1],
            domain,
        })
    }

    pub fn exponents(&self) -> [f64; 4] {
        [self.m, self.n, self.p, self.q]
    }

    /// `η_i = max{C_{i1}, C_{i2}}`.
    pub fn eta(&self, i: usize) -> f64 {
        self.coeff[i][0].max(self.coeff[i][1])
    }

    /// `σ_i = min{C_{i1}, C_{i2}}`.
    pub fn sigma(&self, i: usize) -> f64 {
        self.coeff[i][0].min(self.coeff[i][1])
    }

    /// `l₁ = (k₁₁² + k₂₁²)/2`.
    pub fn l1(&self) -> f64 {
        0.5 * (self.k[0][0].powi(2) + self.k[1][0].powi(2))
    }

    /// `l₂ = (k₁₂² + k₂₂²)/2`.
    pub fn l2(&self) -> f64 {
        0.5 * (self.k[0][1].powi(2) + self.k[1][1].powi(2))
    }
}

/// Which upper-bound construction applies to the exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CaseTag {
    EqualExponents,
    TwoLevel { beta: f64, gamma: f64 },
    StrictChain,
    General,
}

impl CaseTag {
    pub fn name(&self) -> &'static str {
        match self {
            CaseTag::EqualExponents => "equal_exponents",
            CaseTag::TwoLevel { .. } => "two_level",
            CaseTag::StrictChain => "strict_chain",
            CaseTag::General => "general",
        }
    }
}

/// Exact comparison on purpose: the user declares the case through the
/// exponents they supply.
pub fn classify_exponents(m: f64, n: f64, p: f64, q: f64) -> CaseTag {
    if m == n && n == p && p == q {
        CaseTag::EqualExponents
    } else if m == p && n == q && m > n && n > 0.0 {
        CaseTag::TwoLevel { beta: m, gamma: n }
    } else if m > n && n > p && p > q && q > 0.0 {
        CaseTag::StrictChain
    } else {
        CaseTag::General
    }
}

pub fn classify_case(params: &ModelParams) -> CaseTag {
    classify_exponents(params.m, params.n, params.p, params.q)
}

/// Outcome of checking the identities that make the two ρ-functionals exact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RhoCheck {
    Consistent { rho1: f64, rho2: f64 },
    Violated { mismatch1: f64, mismatch2: f64 },
}

impl RhoCheck {
    pub fn rhos(&self) -> Option<(f64, f64)> {
        match *self {
            RhoCheck::Consistent { rho1, rho2 } => Some((rho1, rho2)),
            RhoCheck::Violated { .. } => None,
        }
    }
}

pub(crate) fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

pub fn check_rho_conditions(params: &ModelParams) -> RhoCheck {
    let (m, n, p, q, k1, k2) = (params.m, params.n, params.p, params.q, params.k1, params.k2);
    let lhs1 = (1.0 + m) * k1 - k1;
    let rhs1 = (1.0 + n) * k2 - k1;
    let lhs2 = (1.0 + p) * k1 - k2;
    let rhs2 = (1.0 + q) * k2 - k2;
    if rel_close(lhs1, rhs1, RHO_REL_TOL) && rel_close(lhs2, rhs2, RHO_REL_TOL) {
        RhoCheck::Consistent {
            rho1: m * k1,
            rho2: lhs2,
        }
    } else {
        RhoCheck::Violated {
            mismatch1: (lhs1 - rhs1).abs(),
            mismatch2: (lhs2 - rhs2).abs(),
        }
    }
}

/// The four `ρ_{ij}` of the two-noise system, `rho[i][j]` pairing equation
/// `i` with noise component `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RhoCheck2D {
    Consistent { rho: [[f64; 2]; 2] },
    Violated { mismatch: [[f64; 2]; 2] },
}

pub fn check_rho_conditions_2d(params: &ModelParams2D) -> RhoCheck2D {
    let (m, n, p, q) = (params.m, params.n, params.p, params.q);
    let k = &params.k;
    let mut rho = [[0.0; 2]; 2];
    let mut mismatch = [[0.0; 2]; 2];
    let mut ok = true;
    for j in 0..2 {
        let a = m * k[0][j];
        let b = (1.0 + n) * k[1][j] - k[0][j];
        let c = q * k[1][j];
        let d = (1.0 + p) * k[0][j] - k[1][j];
        rho[0][j] = a;
        rho[1][j] = c;
        mismatch[0][j] = (a - b).abs();
        mismatch[1][j] = (c - d).abs();
        ok &= rel_close(a, b, RHO_REL_TOL) && rel_close(c, d, RHO_REL_TOL);
    }
    if ok {
        RhoCheck2D::Consistent { rho }
    } else {
        RhoCheck2D::Violated { mismatch }
    }
}

/// Young-inequality constant `((hi−lo)/(1+hi)) · ((1+hi)/(1+lo))^{(1+lo)/(hi−lo)}`
/// making `x^{1+hi} ≥ ε x^{1+lo} − D ε^{(1+hi)/(hi−lo)}`.
pub fn young_constant(hi: f64, lo: f64) -> f64 {
    let gap = hi - lo;
    (gap / (1.0 + hi)) * ((1.0 + hi) / (1.0 + lo)).powf((1.0 + lo) / gap)
}

/// Candidates whose minimum is ε₀ for one (hi, lo) exponent pair:
/// `(h₁(0)/D^{1/(1+lo)})^{hi−lo}` and `(2^{−(1+lo)} E(0)^{1+lo}/D)^{(hi−lo)/(1+hi)}`.
pub fn eps0_candidates(hi: f64, lo: f64, d: f64, h1_0: f64, e0: f64) -> [f64; 2] {
    let gap = hi - lo;
    [
        (h1_0 / d.powf(1.0 / (1.0 + lo))).powf(gap),
        (2f64.powf(-(1.0 + lo)) * e0.powf(1.0 + lo) / d).powf(gap / (1.0 + hi)),
    ]
}

/// `2^{−(1+lo)} ε₀ E(0)^{1+lo} − ε₀^{(1+hi)/(hi−lo)} D`; nonnegative when the
/// corresponding condition holds.
pub fn eps_condition_margin(hi: f64, lo: f64, d: f64, eps0: f64, e0: f64) -> f64 {
    2f64.powf(-(1.0 + lo)) * eps0 * e0.powf(1.0 + lo) - eps0.powf((1.0 + hi) / (hi - lo)) * d
}

/// Whether an ε-condition margin is nonnegative. ε₀ often sits exactly on the
/// entry that makes the condition an equality, so round-off is forgiven
/// relative to the positive term.
pub fn eps_condition_holds(lo: f64, eps0: f64, e0: f64, margin: f64) -> bool {
    let scale = 2f64.powf(-(1.0 + lo)) * eps0 * e0.powf(1.0 + lo);
    margin >= -RHO_REL_TOL * scale
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedCheck {
    pub name: String,
    pub holds: bool,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonReport {
    pub case: CaseTag,
    pub d1: Option<f64>,
    pub d2: Option<f64>,
    pub d3: Option<f64>,
    pub eps0: f64,
    /// Every entry of the minimum defining ε₀, the constant 1 first.
    pub eps0_candidates: Vec<f64>,
    pub h1_0: f64,
    pub h2_0: f64,
    pub e0: f64,
    pub conditions: Vec<NamedCheck>,
    /// Both `∫f_iψ` exceed the largest relevant `D^{1/(1+lo)}`.
    pub remark_sufficient: bool,
}

impl EpsilonReport {
    pub fn all_hold(&self) -> bool {
        self.conditions.iter().all(|c| c.holds)
    }
}

/// Evaluates ε₀ and the conditions under which the two-level and strict-chain
/// upper bounds are claimed.
pub fn epsilon_report(
    case: CaseTag,
    [m, n, p, q]: [f64; 4],
    h1_0: f64,
    h2_0: f64,
) -> Result<EpsilonReport> {
    let e0 = h1_0 + h2_0;
    match case {
        CaseTag::TwoLevel { beta, gamma } => {
            let d3 = young_constant(beta, gamma);
            let mut candidates = vec![1.0];
            candidates.extend(eps0_candidates(beta, gamma, d3, h1_0, e0));
            let eps0 = candidates.iter().copied().fold(f64::INFINITY, f64::min);
            let margin = eps_condition_margin(beta, gamma, d3, eps0, e0);
            let root = d3.powf(1.0 / (1.0 + gamma));
            Ok(EpsilonReport {
                case,
                d1: None,
                d2: None,
                d3: Some(d3),
                eps0,
                eps0_candidates: candidates,
                h1_0,
                h2_0,
                e0,
                conditions: vec![NamedCheck {
                    name: "two_level_eps".into(),
                    holds: eps_condition_holds(gamma, eps0, e0, margin),
                    margin,
                }],
                remark_sufficient: h1_0 > root && h2_0 > root,
            })
        }
        CaseTag::StrictChain => {
            let d1 = young_constant(m, n);
            let d2 = young_constant(p, q);
            let mut candidates = vec![1.0];
            candidates.extend(eps0_candidates(m, n, d1, h1_0, e0));
            candidates.extend(eps0_candidates(p, q, d2, h1_0, e0));
            let eps0 = candidates.iter().copied().fold(f64::INFINITY, f64::min);
            let margin1 = eps_condition_margin(m, n, d1, eps0, e0);
            let margin2 = eps_condition_margin(p, q, d2, eps0, e0);
            let root = d1.powf(1.0 / (1.0 + n)).max(d2.powf(1.0 / (1.0 + q)));
            Ok(EpsilonReport {
                case,
                d1: Some(d1),
                d2: Some(d2),
                d3: None,
                eps0,
                eps0_candidates: candidates,
                h1_0,
                h2_0,
                e0,
                conditions: vec![
                    NamedCheck {
                        name: "strict_chain_eps_mn".into(),
                        holds: eps_condition_holds(n, eps0, e0, margin1),
                        margin: margin1,
                    },
                    NamedCheck {
                        name: "strict_chain_eps_pq".into(),
                        holds: eps_condition_holds(q, eps0, e0, margin2),
                        margin: margin2,
                    },
                ],
                remark_sufficient: h1_0 > root && h2_0 > root,
            })
        }
        other => Err(Error::InvalidParameter(format!(
            "epsilon conditions apply to two_level and strict_chain cases only, got {}",
            other.name()
        ))),
    }
}

pub fn check_epsilon_conditions(
    params: &ModelParams,
    spectral: &SpectralData,
) -> Result<EpsilonReport> {
    let mass = crate::spectral::initial_mass(params, spectral);
    epsilon_report(classify_case(params), params.exponents(), mass.h1_0, mass.h2_0)
}
