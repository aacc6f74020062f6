//! Closed-form n-copy scaling of `P²`, `Π`, `C1` and `Δc`.
//!
//! For `ρ^{⊗n}` with `ρ` a `d×d` state:
//!
//! * `Π(ρ^{⊗n}) = Π^n`
//! * `P²(ρ^{⊗n}) = (P² + 1/d)^n - d^{-n}`
//! * `C1(ρ^{⊗n}) = (1 + C1)^n - 1`
//! * `Δc(ρ^{⊗n}) = Π^n - (P² + 1/d)^n - [(1 + C1)^n - 1]² / (d^{2n} - d^n)`
//!
//! Every term is carried as a [`LogScalar`]; the explicit Kronecker power in
//! [`kron_power`] exists to check these formulas on small instances.

use serde::{Deserialize, Serialize};

use crate::density::{DensityMatrix, Tolerances};
use crate::error::{Error, Result};
use crate::logscalar::{ln_expm1, ln_one_minus_exp, LogScalar};

/// Largest explicit tensor-power dimension [`kron_power`] will build.
pub const KRON_DIM_LIMIT: usize = 4096;

/// Below this fraction of the largest term a difference counts as roundoff.
pub const CANCELLATION_FLOOR: f64 = 1e-12;
/// Negative results beyond this fraction of the largest term are errors.
pub const NEGATIVE_TOLERANCE: f64 = 1e-6;

/// The 1-scalable quantities of a single copy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleCopySummary {
    pub dim: usize,
    pub purity: f64,
    pub predictability_sq: f64,
    pub c1: f64,
}

impl SingleCopySummary {
    /// Checks ranges only: `d ≥ 1`, `Π ∈ (0, 1]`, `P² ≥ 0`, `C1 ≥ 0`, and
    /// that the implied `C2 = Π - P² - 1/d` is not negative.
    pub fn new(dim: usize, purity: f64, predictability_sq: f64, c1: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        if !(purity > 0.0 && purity <= 1.0 + 1e-12) {
            return Err(Error::ParamOutOfRange {
                name: "purity",
                value: purity,
                reason: "must lie in (0, 1]",
            });
        }
        if predictability_sq.is_nan() || predictability_sq < 0.0 {
            return Err(Error::ParamOutOfRange {
                name: "predictability_sq",
                value: predictability_sq,
                reason: "must be non-negative",
            });
        }
        if c1.is_nan() || c1 < 0.0 {
            return Err(Error::ParamOutOfRange {
                name: "c1",
                value: c1,
                reason: "must be non-negative",
            });
        }
        let summary = SingleCopySummary {
            dim,
            purity,
            predictability_sq,
            c1,
        };
        if summary.implied_c2() < -1e-10 {
            return Err(Error::ComplementarityViolation {
                residual: summary.implied_c2(),
                tolerance: 1e-10,
            });
        }
        Ok(summary)
    }

    /// Summary of an explicit state, checked against its own `C2`.
    pub fn from_state(state: &DensityMatrix) -> Result<Self> {
        let stats = state.stats_with(&Tolerances::default())?;
        Ok(SingleCopySummary {
            dim: stats.dim,
            purity: stats.purity,
            predictability_sq: stats.predictability_sq,
            c1: stats.c1,
        })
    }

    /// `C2 = Π - P² - 1/d` from complementarity.
    pub fn implied_c2(&self) -> f64 {
        self.purity - self.predictability_sq - 1.0 / self.dim as f64
    }

    fn ln_dim(&self) -> f64 {
        (self.dim as f64).ln()
    }
}

/// `(P² + 1/d)^n - d^{-n} = d^{-n} [(1 + d P²)^n - 1]`.
pub fn ncopy_predictability_sq(summary: &SingleCopySummary, n: u64) -> LogScalar {
    let d = summary.dim as f64;
    let growth = n as f64 * (d * summary.predictability_sq).ln_1p();
    LogScalar::from_ln(ln_expm1(growth) - n as f64 * summary.ln_dim())
}

/// `Π^n`.
pub fn ncopy_purity(summary: &SingleCopySummary, n: u64) -> LogScalar {
    LogScalar::from_f64(summary.purity).powu(n)
}

/// `(1 + C1)^n - 1`.
pub fn ncopy_l1(summary: &SingleCopySummary, n: u64) -> LogScalar {
    LogScalar::from_ln(ln_expm1(n as f64 * summary.c1.ln_1p()))
}

/// `ln(d^{2N} - d^N)`.
pub(crate) fn ln_pair_count(ln_dim: f64, copies: u64) -> f64 {
    let ln_dn = copies as f64 * ln_dim;
    2.0 * ln_dn + ln_one_minus_exp(-ln_dn)
}

/// Combines `populated - penalty` where both are non-negative, snapping
/// roundoff-level differences to zero and rejecting clearly negative ones.
pub(crate) fn dispersion_difference(populated: LogScalar, penalty: LogScalar) -> Result<LogScalar> {
    let scale = if populated >= penalty { populated } else { penalty };
    if scale.is_zero() {
        return Ok(LogScalar::ZERO);
    }
    let diff = populated - penalty;
    let relative = (diff / scale).to_f64();
    if relative < -NEGATIVE_TOLERANCE {
        return Err(Error::NegativeDispersion {
            value: diff.to_f64(),
            scale: scale.to_f64(),
        });
    }
    if relative <= CANCELLATION_FLOOR {
        return Ok(LogScalar::ZERO);
    }
    Ok(diff)
}

/// n-copy coherence dispersion.
///
/// The first two terms are combined as `Π^n [1 - (1 - C2/Π)^n]`, which keeps
/// full relative precision when `C2 ≪ Π`.
pub fn ncopy_dispersion(summary: &SingleCopySummary, n: u64) -> Result<LogScalar> {
    let nf = n as f64;
    let c2 = summary.implied_c2().max(0.0);
    let ln_purity = summary.purity.ln();
    let populated = if c2 == 0.0 {
        LogScalar::ZERO
    } else {
        let ln_ratio = (-c2 / summary.purity).ln_1p();
        LogScalar::from_ln(nf * ln_purity + ln_one_minus_exp(nf * ln_ratio))
    };
    let ln_l1 = ln_expm1(nf * summary.c1.ln_1p());
    let penalty = LogScalar::from_ln(2.0 * ln_l1 - ln_pair_count(summary.ln_dim(), n));
    dispersion_difference(populated, penalty)
}

/// Explicit `ρ^{⊗n}`, refused above [`KRON_DIM_LIMIT`].
pub fn kron_power(state: &DensityMatrix, n: u32) -> Result<DensityMatrix> {
    if n == 0 {
        return Err(Error::ParamOutOfRange {
            name: "n",
            value: 0.0,
            reason: "need at least one copy",
        });
    }
    let dim = (state.dim() as u128).checked_pow(n).unwrap_or(u128::MAX);
    if dim > KRON_DIM_LIMIT as u128 {
        return Err(Error::DimensionGuardExceeded {
            dim,
            limit: KRON_DIM_LIMIT,
        });
    }
    let mut out = state.clone();
    for _ in 1..n {
        out = out.tensor(state);
    }
    Ok(out)
}

/// `ρ^{(1)} ⊗ … ⊗ ρ^{(k)}`, refused above [`KRON_DIM_LIMIT`].
pub fn tensor_product(states: &[DensityMatrix]) -> Result<DensityMatrix> {
    let (first, rest) = states.split_first().ok_or(Error::EmptyDimension)?;
    let dim = states
        .iter()
        .try_fold(1u128, |acc, s| acc.checked_mul(s.dim() as u128))
        .unwrap_or(u128::MAX);
    if dim > KRON_DIM_LIMIT as u128 {
        return Err(Error::DimensionGuardExceeded {
            dim,
            limit: KRON_DIM_LIMIT,
        });
    }
    Ok(rest.iter().fold(first.clone(), |acc, s| acc.tensor(s)))
}

/// The state with entries `e^{i(φ_i - φ_j)} ρ_ij`, i.e. conjugation by the
/// diagonal unitary `diag(e^{iφ_k})`.
pub fn local_phase_variant(state: &DensityMatrix, phases: &[f64]) -> DensityMatrix {
    state.with_local_phases(phases)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::PureState;

    fn rel(a: f64, b: f64) -> f64 {
        if b == 0.0 {
            a.abs()
        } else {
            (a - b).abs() / b.abs()
        }
    }

    fn qubit_superposition() -> DensityMatrix {
        PureState::from_real(&[0.8f64.sqrt(), 0.2f64.sqrt()])
            .unwrap()
            .projector()
    }

    #[test]
    fn maximally_mixed_qubit_has_no_predictability() {
        let s = SingleCopySummary::new(2, 0.5, 0.0, 0.0).unwrap();
        for n in [1, 5, 1_000_000] {
            assert!(ncopy_predictability_sq(&s, n).is_zero());
        }
    }

    #[test]
    fn predictability_scaling_examples() {
        let s = SingleCopySummary::new(2, 0.68, 0.18, 0.0).unwrap();
        assert!(rel(ncopy_predictability_sq(&s, 2).to_f64(), 0.2124) < 1e-14);
        assert!(rel(ncopy_predictability_sq(&s, 1).to_f64(), 0.18) < 1e-14);
        let ket = SingleCopySummary::new(2, 1.0, 0.5, 0.0).unwrap();
        assert!(rel(ncopy_predictability_sq(&ket, 3).to_f64(), 0.875) < 1e-14);
    }

    #[test]
    fn purity_scaling_examples() {
        let pure = SingleCopySummary::new(3, 1.0, 0.2, 0.5).unwrap();
        assert_eq!(ncopy_purity(&pure, 1000).to_f64(), 1.0);
        let s = SingleCopySummary::new(2, 0.68, 0.18, 0.0).unwrap();
        assert!(rel(ncopy_purity(&s, 2).to_f64(), 0.4624) < 1e-14);
        let big = ncopy_purity(&s, 1_000_000);
        assert_eq!(big.sign(), 1);
        assert!(rel(big.ln_abs(), 1e6 * 0.68f64.ln()) < 1e-14);
    }

    #[test]
    fn l1_scaling_examples() {
        let inc = SingleCopySummary::new(2, 0.68, 0.18, 0.0).unwrap();
        assert!(ncopy_l1(&inc, 7).is_zero());
        let s = SingleCopySummary::from_state(&qubit_superposition()).unwrap();
        assert!(rel(ncopy_l1(&s, 2).to_f64(), 2.24) < 1e-14);
        let plus = SingleCopySummary::from_state(&PureState::uniform(2).unwrap().projector()).unwrap();
        assert!(rel(ncopy_l1(&plus, 2).to_f64(), 3.0) < 1e-14);
    }

    #[test]
    fn qubit_single_copy_dispersion_vanishes() {
        let s = SingleCopySummary::from_state(&qubit_superposition()).unwrap();
        assert!(ncopy_dispersion(&s, 1).unwrap().is_zero());
        let plus = SingleCopySummary::from_state(&PureState::uniform(2).unwrap().projector()).unwrap();
        assert!(ncopy_dispersion(&plus, 2).unwrap().is_zero());
    }

    #[test]
    fn two_copy_superposition_value() {
        // ρ⊗ρ off-diagonal magnitudes: 0.32, 0.16, 0.08, four of each
        let c1 = 4.0 * (0.32 + 0.16 + 0.08);
        let c2 = 4.0 * (0.32f64.powi(2) + 0.16f64.powi(2) + 0.08f64.powi(2));
        let expected = c2 - c1 * c1 / 12.0;
        let s = SingleCopySummary::from_state(&qubit_superposition()).unwrap();
        let got = ncopy_dispersion(&s, 2).unwrap().to_f64();
        assert!(rel(got, expected) < 1e-12, "{got} vs {expected}");
        assert!((got - 0.119466).abs() < 1e-6);
    }

    #[test]
    fn kron_guard() {
        let q = qubit_superposition();
        assert_eq!(kron_power(&q, 3).unwrap().dim(), 8);
        assert!(matches!(kron_power(&q, 13), Err(Error::DimensionGuardExceeded { .. })));
        assert!(kron_power(&q, 0).is_err());
    }

    #[test]
    fn zero_phases_leave_state_unchanged() {
        let q = qubit_superposition();
        assert_eq!(local_phase_variant(&q, &[0.0, 0.0]), q);
    }

    #[test]
    fn summary_rejects_inconsistent_inputs() {
        assert!(SingleCopySummary::new(2, 1.5, 0.0, 0.0).is_err());
        assert!(SingleCopySummary::new(2, 0.5, -0.1, 0.0).is_err());
        // C2 = 0.5 - 0.3 - 0.5 < 0
        assert!(SingleCopySummary::new(2, 0.5, 0.3, 0.0).is_err());
    }
}
