//! Partially coherent Gibbs states of a `d`-level ladder `E_j = jε`,
//! `j = 1..d`, and the temperature `τ*` that maximizes their coherence
//! dispersion.
//!
//! Temperatures are dimensionless, `τ = 4 k_B T / ε`, so `βε = 4/τ`. The
//! equilibrium purity is `Π_eq(τ) = tanh(2/τ) coth(2d/τ)` and
//! `1/Π_eq(2τ) = coth(1/τ) tanh(d/τ)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::density::{DensityMatrix, PsdCheck, PureState, Tolerances, C64};
use crate::error::{Error, Result};
use crate::hyperbolic::{self, ln_sinh, ln_tanh};
use crate::logscalar::{ln_expm1, LogScalar};
use crate::multicopy::{dispersion_difference, ln_pair_count};
use crate::optimize::{argmax, golden_section_max, log_grid};

/// Boltzmann constant in eV/K (CODATA 2018).
pub const BOLTZMANN_EV_PER_K: f64 = 8.617333262e-5;
/// Energy released by one ATP → ADP conversion, in eV.
pub const ATP_ADP_GAP_EV: f64 = 0.316;
pub const ZERO_CELSIUS_K: f64 = 273.15;

/// Which composite state the dispersion refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DispersionModel {
    /// `G^{⊗n}`.
    #[default]
    Plain,
    /// `G^{⊗n} ⊗ ρ_G^{⊗(N-n)}`.
    Buffered,
}

impl fmt::Display for DispersionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DispersionModel::Plain => "plain",
            DispersionModel::Buffered => "buffered",
        })
    }
}

impl FromStr for DispersionModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(DispersionModel::Plain),
            "buffered" => Ok(DispersionModel::Buffered),
            other => Err(Error::config("model", format!("unknown model `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalParams {
    /// Number of levels.
    pub d: usize,
    /// Level spacing in eV.
    pub epsilon_ev: f64,
    /// Coherence level.
    pub lambda: f64,
    /// Number of coherent ECSs.
    pub n: u64,
    /// Total number of ECSs, coherent plus thermal buffer.
    pub total_n: Option<u64>,
}

impl ThermalParams {
    pub fn new(d: usize, lambda: f64, n: u64) -> Self {
        ThermalParams {
            d,
            epsilon_ev: ATP_ADP_GAP_EV,
            lambda,
            n,
            total_n: None,
        }
    }

    pub fn with_epsilon(mut self, epsilon_ev: f64) -> Self {
        self.epsilon_ev = epsilon_ev;
        self
    }

    pub fn with_total(mut self, total_n: u64) -> Self {
        self.total_n = Some(total_n);
        self
    }

    /// `N`, defaulting to `n` when no buffer is configured.
    pub fn total(&self) -> u64 {
        self.total_n.unwrap_or(self.n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::DimensionTooSmall { dim: self.d, min: 2 });
        }
        if !(self.epsilon_ev > 0.0 && self.epsilon_ev.is_finite()) {
            return Err(Error::ParamOutOfRange {
                name: "epsilon_ev",
                value: self.epsilon_ev,
                reason: "must be positive",
            });
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::ParamOutOfRange {
                name: "lambda",
                value: self.lambda,
                reason: "must lie in [0, 1]",
            });
        }
        if self.n == 0 {
            return Err(Error::ParamOutOfRange {
                name: "n",
                value: 0.0,
                reason: "need at least one coherent ECS",
            });
        }
        if self.total() < self.n {
            return Err(Error::BufferSmallerThanCoherent {
                total: self.total(),
                coherent: self.n,
            });
        }
        Ok(())
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange {
            name: "tau",
            value: tau,
            reason: "must be positive and finite",
        })
    }
}

/// `βε = 4/τ`.
pub fn beta_eps(tau: f64) -> f64 {
    4.0 / tau
}

/// `ln Z` for `E_j = jε`, `j = 1..d`, as a function of `βε`.
pub fn ln_partition_function(beta_eps: f64, d: usize) -> f64 {
    let df = d as f64;
    -0.5 * beta_eps * (df + 1.0) + ln_sinh(0.5 * beta_eps * df) - ln_sinh(0.5 * beta_eps)
}

/// `Z = e^{-βε(d+1)/2} sinh(βεd/2) / sinh(βε/2)`.
pub fn partition_function(beta_eps: f64, d: usize) -> f64 {
    ln_partition_function(beta_eps, d).exp()
}

/// `Π_eq(τ) = tanh(2/τ) coth(2d/τ)`.
pub fn equilibrium_purity(tau: f64, d: usize) -> f64 {
    hyperbolic::tanh(2.0 / tau) * hyperbolic::coth(2.0 * d as f64 / tau)
}

/// `ln Π_eq(τ)`, never positive.
pub fn ln_equilibrium_purity(tau: f64, d: usize) -> f64 {
    (ln_tanh(2.0 / tau) - ln_tanh(2.0 * d as f64 / tau)).min(0.0)
}

/// `ln(1/Π_eq(2τ)) = ln tanh(d/τ) - ln tanh(1/τ)`, never negative.
pub fn ln_inverse_purity_at_double(tau: f64, d: usize) -> f64 {
    (ln_tanh(d as f64 / tau) - ln_tanh(1.0 / tau)).max(0.0)
}

/// Maxwell-Boltzmann populations `p_j ∝ e^{-jβε}`.
pub fn gibbs_populations(d: usize, tau: f64) -> Vec<f64> {
    let b = beta_eps(tau);
    let weights: Vec<f64> = (0..d).map(|j| (-(j as f64) * b).exp()).collect();
    let z: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / z).collect()
}

/// Thermal state `ρ_G`.
pub fn gibbs_state(d: usize, tau: f64) -> Result<DensityMatrix> {
    check_tau(tau)?;
    DensityMatrix::diagonal(&gibbs_populations(d, tau))
}

/// Coherent Gibbs state `|Ψ_G⟩ = Σ_j √p_j |j⟩`.
pub fn coherent_gibbs_state(d: usize, tau: f64) -> Result<PureState> {
    check_tau(tau)?;
    let amps: Vec<f64> = gibbs_populations(d, tau).into_iter().map(f64::sqrt).collect();
    let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
    PureState::from_real(&amps.iter().map(|a| a / norm).collect::<Vec<_>>())
}

/// `G = λ |Ψ_G⟩⟨Ψ_G| + (1-λ) ρ_G`: populations `p_j`, coherences
/// `λ √(p_j p_k)`.
pub fn partially_coherent_gibbs(params: &ThermalParams, tau: f64) -> Result<DensityMatrix> {
    check_tau(tau)?;
    params.validate()?;
    let p = gibbs_populations(params.d, tau);
    let d = params.d;
    let entries = (0..d * d)
        .map(|k| {
            let (i, j) = (k / d, k % d);
            if i == j {
                C64::new(p[i], 0.0)
            } else {
                C64::new(params.lambda * (p[i] * p[j]).sqrt(), 0.0)
            }
        })
        .collect();
    DensityMatrix::with_tolerances(d, entries, PsdCheck::Skip, &Tolerances::default())
}

/// Single-copy dispersion
/// `λ²(1 - Π_eq(τ)) - λ²/(d²-d) · (1 - 1/Π_eq(2τ))²`.
pub fn single_copy_dispersion(params: &ThermalParams, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    params.validate()?;
    let d = params.d;
    let mixedness = -ln_equilibrium_purity(tau, d).exp_m1();
    let excess = ln_inverse_purity_at_double(tau, d).exp_m1();
    let penalty = excess * excess / (d * d - d) as f64;
    let lambda_sq = params.lambda * params.lambda;
    let value = lambda_sq * (mixedness - penalty);
    if value.abs() <= 1e-12 * lambda_sq * mixedness.max(penalty) {
        Ok(0.0)
    } else {
        Ok(value)
    }
}

/// Dispersion of `G^{⊗n} ⊗ ρ_G^{⊗(N-n)}`:
///
/// `Π_eq^{N-n} [(λ² + (1-λ²)Π_eq)^n - Π_eq^n]
///  - ((1 - λ + λ/Π_eq(2τ))^n - 1)² / (d^{2N} - d^N)`.
fn gibbs_dispersion(d: usize, lambda: f64, n: u64, total: u64, tau: f64) -> Result<LogScalar> {
    let (nf, total_f) = (n as f64, total as f64);
    let ln_purity = ln_equilibrium_purity(tau, d);
    // (λ² + (1-λ²)Π)^n - Π^n = Π^n [(1 + λ²(1-Π)/Π)^n - 1]
    let odds = (-ln_purity).exp_m1();
    let lambda_sq = lambda * lambda;
    let populated = LogScalar::from_ln(total_f * ln_purity + ln_expm1(nf * (lambda_sq * odds).ln_1p()));
    let excess = ln_inverse_purity_at_double(tau, d).exp_m1();
    let ln_l1 = ln_expm1(nf * (lambda * excess).ln_1p());
    let penalty = LogScalar::from_ln(2.0 * ln_l1 - ln_pair_count((d as f64).ln(), total));
    dispersion_difference(populated, penalty)
}

/// Dispersion of `G^{⊗n}`.
pub fn ncopy_gibbs_dispersion(params: &ThermalParams, tau: f64) -> Result<LogScalar> {
    check_tau(tau)?;
    params.validate()?;
    gibbs_dispersion(params.d, params.lambda, params.n, params.n, tau)
}

/// Dispersion of `G^{⊗n} ⊗ ρ_G^{⊗(N-n)}` with `N = params.total()`.
pub fn buffered_dispersion(params: &ThermalParams, tau: f64) -> Result<LogScalar> {
    check_tau(tau)?;
    params.validate()?;
    gibbs_dispersion(params.d, params.lambda, params.n, params.total(), tau)
}

pub fn model_dispersion(params: &ThermalParams, model: DispersionModel, tau: f64) -> Result<LogScalar> {
    match model {
        DispersionModel::Plain => ncopy_gibbs_dispersion(params, tau),
        DispersionModel::Buffered => buffered_dispersion(params, tau),
    }
}

/// `T = τ ε / (4 k_B)` in kelvin.
pub fn tau_to_kelvin(tau: f64, epsilon_ev: f64) -> f64 {
    tau * epsilon_ev / (4.0 * BOLTZMANN_EV_PER_K)
}

pub fn kelvin_to_tau(kelvin: f64, epsilon_ev: f64) -> f64 {
    4.0 * BOLTZMANN_EV_PER_K * kelvin / epsilon_ev
}

pub fn kelvin_to_celsius(kelvin: f64) -> f64 {
    kelvin - ZERO_CELSIUS_K
}

/// Coarse grid plus golden-section refinement settings for [`find_tau_star`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauSearch {
    pub tau_min: f64,
    pub tau_max: f64,
    pub grid_points: usize,
    pub tolerance: f64,
}

impl Default for TauSearch {
    fn default() -> Self {
        TauSearch {
            tau_min: 1e-2,
            tau_max: 10.0,
            grid_points: 200,
            tolerance: 1e-6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TauStarResult {
    pub tau_star: f64,
    pub log_dispersion_at_max: LogScalar,
    pub kelvin: f64,
    pub celsius: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// `ln Δc` at `τ`, `-inf` where the dispersion vanishes.
pub fn log_objective(params: &ThermalParams, model: DispersionModel, tau: f64) -> Result<f64> {
    model_dispersion(params, model, tau).map(|v| v.ln_abs())
}

pub fn find_tau_star(params: &ThermalParams, model: DispersionModel) -> Result<TauStarResult> {
    find_tau_star_with(params, model, &TauSearch::default())
}

/// Temperature of maximum dispersion on `[tau_min, tau_max]`.
pub fn find_tau_star_with(params: &ThermalParams, model: DispersionModel, search: &TauSearch) -> Result<TauStarResult> {
    params.validate()?;
    if !(search.tau_min > 0.0 && search.tau_max > search.tau_min && search.grid_points >= 3) {
        return Err(Error::config(
            "tau search",
            "need 0 < tau_min < tau_max and at least 3 grid points",
        ));
    }
    // single-copy qubit dispersion vanishes identically
    if params.d == 2 && params.total() == 1 {
        return Err(Error::FlatObjective);
    }
    let grid = log_grid(search.tau_min, search.tau_max, search.grid_points);
    let values = grid
        .iter()
        .map(|&t| log_objective(params, model, t))
        .collect::<Result<Vec<_>>>()?;
    let best = argmax(&values).ok_or(Error::FlatObjective)?;
    if values[best] == f64::NEG_INFINITY || best == 0 || best == grid.len() - 1 {
        return Err(Error::FlatObjective);
    }
    let bracket = (grid[best - 1], grid[best + 1]);
    let objective = |t: f64| log_objective(params, model, t).unwrap_or(f64::NEG_INFINITY);
    let refined = golden_section_max(objective, bracket.0, bracket.1, search.tolerance);
    let (tau_star, ln_value) = if refined.value >= values[best] {
        (refined.x, refined.value)
    } else {
        (grid[best], values[best])
    };
    let kelvin = tau_to_kelvin(tau_star, params.epsilon_ev);
    Ok(TauStarResult {
        tau_star,
        log_dispersion_at_max: LogScalar::from_ln(ln_value),
        kelvin,
        celsius: kelvin_to_celsius(kelvin),
        bracket,
        iterations: refined.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_partition(beta_eps: f64, d: usize) -> f64 {
        (1..=d).map(|j| (-(j as f64) * beta_eps).exp()).sum()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn partition_function_matches_direct_sum() {
        let l2 = 2f64.ln();
        assert!(rel(partition_function(l2, 2), 0.75) < 1e-14);
        assert!(rel(partition_function(1.0, 5), direct_partition(1.0, 5)) < 1e-12);
        for d in [2, 3, 17] {
            assert!(rel(partition_function(1e-8, d), d as f64) < 1e-6);
        }
        assert!(partition_function(2000.0, 3) >= 0.0);
    }

    #[test]
    fn equilibrium_purity_limits_and_oracle() {
        assert!((equilibrium_purity(1e-3, 3) - 1.0).abs() < 1e-9);
        assert!((equilibrium_purity(1e6, 4) - 0.25).abs() < 1e-5);
        let p = gibbs_populations(2, 1.0);
        let direct: f64 = p.iter().map(|x| x * x).sum();
        assert!(rel(equilibrium_purity(1.0, 2), direct) < 1e-12);
        assert!((ln_equilibrium_purity(1.0, 2).exp() - direct).abs() < 1e-14);
    }

    #[test]
    fn energy_shift_cancels_in_purity() {
        // ground level at 0 instead of ε
        let b = beta_eps(0.7);
        let shifted: Vec<f64> = (0..4).map(|j| (-(j as f64) * b).exp()).collect();
        let z0: f64 = shifted.iter().sum();
        let z1 = direct_partition(b, 4);
        assert!(rel(z1, z0 * (-b).exp()) < 1e-14);
        let purity: f64 = shifted.iter().map(|w| (w / z0).powi(2)).sum();
        assert!(rel(equilibrium_purity(0.7, 4), purity) < 1e-13);
    }

    #[test]
    fn gibbs_family_shapes() {
        let g0 = partially_coherent_gibbs(&ThermalParams::new(3, 0.0, 1), 1.0).unwrap();
        assert_eq!(g0.coherence_dispersion(), 0.0);
        assert_eq!(g0.l1_coherence(), 0.0);
        let g1 = partially_coherent_gibbs(&ThermalParams::new(3, 1.0, 1), 1.0).unwrap();
        assert!((g1.purity() - 1.0).abs() < 1e-14);
        let rho = gibbs_state(3, 1.0).unwrap();
        assert_eq!(rho.coherence_dispersion(), 0.0);
        assert_eq!(rho.populations(), gibbs_populations(3, 1.0));
    }

    #[test]
    fn single_copy_examples() {
        for tau in [0.1, 0.5, 1.0, 3.0] {
            for lambda in [0.0, 0.3, 1.0] {
                let p = ThermalParams::new(2, lambda, 1);
                assert_eq!(single_copy_dispersion(&p, tau).unwrap(), 0.0, "τ={tau} λ={lambda}");
            }
        }
        let p = ThermalParams::new(3, 0.1, 1);
        let g = partially_coherent_gibbs(&p, 1.0).unwrap();
        let got = single_copy_dispersion(&p, 1.0).unwrap();
        assert!(rel(got, g.coherence_dispersion()) < 1e-10);
    }

    #[test]
    fn temperature_conversion() {
        assert!((tau_to_kelvin(1.0, 0.316) - 917.0).abs() < 1.0);
        let t = tau_to_kelvin(0.257, 0.316);
        assert!((t - 236.0).abs() < 1.0);
        assert!((kelvin_to_celsius(t) + 37.0).abs() < 1.0);
        assert!((tau_to_kelvin(0.434, 0.632) - 796.0).abs() < 1.0);
        assert!(rel(kelvin_to_tau(tau_to_kelvin(0.3, 0.5), 0.5), 0.3) < 1e-15);
    }

    #[test]
    fn params_validation() {
        assert!(ThermalParams::new(1, 0.1, 1).validate().is_err());
        assert!(ThermalParams::new(2, 1.1, 1).validate().is_err());
        assert!(ThermalParams::new(2, 0.1, 0).validate().is_err());
        assert!(matches!(
            ThermalParams::new(2, 0.1, 10).with_total(5).validate(),
            Err(Error::BufferSmallerThanCoherent { total: 5, coherent: 10 })
        ));
        assert!(matches!(
            single_copy_dispersion(&ThermalParams::new(3, 0.1, 1), -1.0),
            Err(Error::ParamOutOfRange { name: "tau", .. })
        ));
    }

    #[test]
    fn tau_star_guards() {
        assert!(matches!(
            find_tau_star(&ThermalParams::new(2, 0.1, 1), DispersionModel::Plain),
            Err(Error::FlatObjective)
        ));
        assert!(matches!(
            find_tau_star(&ThermalParams::new(3, 0.0, 100), DispersionModel::Plain),
            Err(Error::FlatObjective)
        ));
    }

    #[test]
    fn tau_star_at_five_thousand() {
        let r = find_tau_star(&ThermalParams::new(2, 0.1, 5000), DispersionModel::Plain).unwrap();
        assert!((r.tau_star - 0.434).abs() < 0.005, "{}", r.tau_star);
        assert!(r.bracket.0 < r.tau_star && r.tau_star < r.bracket.1);
        assert!(r.log_dispersion_at_max.ln_abs().is_finite());
        assert!(rel(r.kelvin, tau_to_kelvin(r.tau_star, ATP_ADP_GAP_EV)) < 1e-15);
    }
}
