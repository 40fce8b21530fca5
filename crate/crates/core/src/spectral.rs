//! First Dirichlet eigenpair of `−Δ` on intervals and boxes, normalized to
//! unit L¹ mass, and the ψ-weighted initial masses.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, ModelParams2D};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Interval,
    Box,
}

/// `(0, L)` for an interval, `∏_j (0, L_j)` for a box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub lengths: Vec<f64>,
}

impl DomainSpec {
    pub fn interval(length: f64) -> Result<Self> {
        Self::new(DomainKind::Interval, vec![length])
    }

    pub fn cube(lengths: &[f64]) -> Result<Self> {
        Self::new(DomainKind::Box, lengths.to_vec())
    }

    pub fn new(kind: DomainKind, lengths: Vec<f64>) -> Result<Self> {
        let d = Self { kind, lengths };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            DomainKind::Interval if self.lengths.len() != 1 => {
                return Err(Error::InvalidDomain(format!(
                    "an interval takes exactly one length, got {}",
                    self.lengths.len()
                )))
            }
            DomainKind::Box if self.lengths.is_empty() => {
                return Err(Error::InvalidDomain("a box needs at least one length".into()))
            }
            _ => {}
        }
        if let Some(bad) = self.lengths.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(Error::InvalidDomain(format!(
                "lengths must be finite and positive, got {bad}"
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lengths.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralData {
    pub lambda: f64,
    /// Amplitude making `∫_D ψ = 1`; equals the sup-norm for sine products.
    pub amp: f64,
    pub sup_norm: f64,
    pub psi_sq_integral: f64,
    pub lengths: Vec<f64>,
}

impl SpectralData {
    /// `ψ(x) = amp · ∏_j sin(π x_j / L_j)`.
    pub fn psi(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.lengths.len());
        self.amp
            * x.iter()
                .zip(&self.lengths)
                .map(|(xi, l)| (PI * xi / l).sin())
                .product::<f64>()
    }
}

pub fn solve_eigenpair(domain: &DomainSpec) -> Result<SpectralData> {
    domain.validate()?;
    let lambda = domain.lengths.iter().map(|l| (PI / l).powi(2)).sum();
    let amp = domain.lengths.iter().map(|l| PI / (2.0 * l)).product();
    // ∫₀^L (π/(2L))² sin²(πx/L) dx = π²/(8L)
    let psi_sq_integral = domain.lengths.iter().map(|l| PI * PI / (8.0 * l)).product();
    Ok(SpectralData {
        lambda,
        amp,
        sup_norm: amp,
        psi_sq_integral,
        lengths: domain.lengths.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InitialMass {
    pub h1_0: f64,
    pub h2_0: f64,
    pub e0: f64,
}

/// `h_i(0) = ∫ f_i ψ = C_i ∫ψ²` for `f_i = C_i ψ`.
pub fn initial_mass(params: &ModelParams, spectral: &SpectralData) -> InitialMass {
    mass_from_multipliers(params.c1, params.c2, spectral)
}

pub fn initial_mass_2d(params: &ModelParams2D, spectral: &SpectralData) -> InitialMass {
    mass_from_multipliers(params.m1, params.m2, spectral)
}

fn mass_from_multipliers(c1: f64, c2: f64, spectral: &SpectralData) -> InitialMass {
    let h1_0 = c1 * spectral.psi_sq_integral;
    let h2_0 = c2 * spectral.psi_sq_integral;
    InitialMass {
        h1_0,
        h2_0,
        e0: h1_0 + h2_0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, integrate_2d};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    #[test]
    fn interval_of_length_pi() {
        let s = solve_eigenpair(&DomainSpec::interval(PI).unwrap()).unwrap();
        assert_relative_eq!(s.lambda, 1.0, max_relative = 1e-15);
        assert_relative_eq!(s.amp, 0.5, max_relative = 1e-15);
        assert_relative_eq!(s.sup_norm, 0.5, max_relative = 1e-15);
        assert_relative_eq!(s.psi_sq_integral, PI / 8.0, max_relative = 1e-15);
    }

    #[test]
    fn square_of_side_pi() {
        let s = solve_eigenpair(&DomainSpec::cube(&[PI, PI]).unwrap()).unwrap();
        assert_relative_eq!(s.lambda, 2.0, max_relative = 1e-15);
        assert_relative_eq!(s.sup_norm, 0.25, max_relative = 1e-15);
    }

    #[test]
    fn interval_of_length_two_pi() {
        let s = solve_eigenpair(&DomainSpec::interval(2.0 * PI).unwrap()).unwrap();
        assert_relative_eq!(s.lambda, 0.25, max_relative = 1e-15);
    }

    #[test]
    fn rejects_bad_domains() {
        assert!(DomainSpec::interval(0.0).is_err());
        assert!(DomainSpec::interval(-1.0).is_err());
        assert!(DomainSpec::new(DomainKind::Interval, vec![1.0, 2.0]).is_err());
        assert!(DomainSpec::cube(&[]).is_err());
        assert!(DomainSpec::cube(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn initial_masses() {
        let domain = DomainSpec::interval(PI).unwrap();
        let s = solve_eigenpair(&domain).unwrap();
        let p = ModelParams::new([1.0; 4], [1.0, 1.0], [1.0, 1.0], domain.clone()).unwrap();
        let m = initial_mass(&p, &s);
        assert_relative_eq!(m.h1_0, PI / 8.0, max_relative = 1e-15);
        assert_relative_eq!(m.e0, PI / 4.0, max_relative = 1e-15);
        let p = ModelParams::new([1.0; 4], [1.0, 1.0], [2.0, 6.0], domain).unwrap();
        assert_relative_eq!(initial_mass(&p, &s).e0, PI, max_relative = 1e-15);
    }

    #[test]
    fn zero_multiplier_is_rejected() {
        let domain = DomainSpec::interval(PI).unwrap();
        assert!(ModelParams::new([1.0; 4], [1.0, 1.0], [0.0, 1.0], domain).is_err());
    }

    fn domains() -> Vec<DomainSpec> {
        vec![
            DomainSpec::interval(PI).unwrap(),
            DomainSpec::interval(1.0).unwrap(),
            DomainSpec::interval(2.5).unwrap(),
            DomainSpec::cube(&[PI, PI]).unwrap(),
            DomainSpec::cube(&[1.0, 3.0]).unwrap(),
        ]
    }

    #[test]
    fn quadrature_reproduces_unit_mass_and_psi_squared() {
        for d in domains() {
            let s = solve_eigenpair(&d).unwrap();
            let (mass, sq) = match d.dim() {
                1 => {
                    let l = d.lengths[0];
                    (
                        integrate(|x| s.psi(&[x]), 0.0, l, 1e-12).unwrap().value,
                        integrate(|x| s.psi(&[x]).powi(2), 0.0, l, 1e-12).unwrap().value,
                    )
                }
                _ => {
                    let (a, b) = (d.lengths[0], d.lengths[1]);
                    (
                        integrate_2d(|x, y| s.psi(&[x, y]), (0.0, a), (0.0, b), 1e-12)
                            .unwrap(),
                        integrate_2d(|x, y| s.psi(&[x, y]).powi(2), (0.0, a), (0.0, b), 1e-12)
                            .unwrap(),
                    )
                }
            };
            assert!((mass - 1.0).abs() < 1e-10, "{d:?}: mass {mass}");
            assert!((sq - s.psi_sq_integral).abs() < 1e-10, "{d:?}: {sq}");
            assert!(s.psi_sq_integral <= s.sup_norm);
            assert!(s.lambda > 0.0);
        }
    }

    #[test]
    fn finite_difference_laplacian_matches_eigenvalue() {
        let mut rng = rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64(7);
        for d in domains() {
            let s = solve_eigenpair(&d).unwrap();
            for _ in 0..100 {
                let x: Vec<f64> = d.lengths.iter().map(|l| rng.random_range(0.0..*l)).collect();
                let second = |j: usize, h: f64| {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[j] += h;
                    xm[j] -= h;
                    (s.psi(&xp) - 2.0 * s.psi(&x) + s.psi(&xm)) / (h * h)
                };
                // Richardson step removes the O(h²) stencil error.
                let lap: f64 = (0..x.len())
                    .map(|j| {
                        let h = 1e-3 * d.lengths[j];
                        (4.0 * second(j, 0.5 * h) - second(j, h)) / 3.0
                    })
                    .sum();
                let residual = (-lap - s.lambda * s.psi(&x)).abs();
                assert!(
                    residual <= 1e-8 * s.lambda * s.sup_norm,
                    "{d:?} at {x:?}: residual {residual}"
                );
            }
        }
    }
}
