//! Maximum-dispersion pure states and the optimal rank `r(D)`.
//!
//! Among pure states of rank `r` the dispersion is maximized by equal
//! magnitudes `1/√r` on `r` basis kets, giving
//! `Δc(r) = (1 - 1/r)(1 - (r² - r)/(D² - D))`. Treating `r` as continuous,
//! the stationary point solves `s³ - s² = (D² - D)/2`; the optimal integer
//! rank is whichever neighbour of `s` gives the larger `Δc(r)`.

use serde::Serialize;

use crate::density::{PureState, C64};
use crate::error::{Error, Result};

/// `Δc` of the equal-amplitude rank-`r` pure state in dimension `D`.
pub fn dispersion_at_rank(dim: usize, rank: usize) -> Result<f64> {
    if dim < 2 {
        return Err(Error::DimensionTooSmall { dim, min: 2 });
    }
    if rank == 0 || rank > dim {
        return Err(Error::RankOutOfRange { dim, rank });
    }
    let r = rank as f64;
    let pairs = (dim * dim - dim) as f64;
    Ok((1.0 - 1.0 / r) * (1.0 - (r * r - r) / pairs))
}

fn require_dim3(dim: usize) -> Result<()> {
    if dim < 3 {
        Err(Error::DimensionTooSmall { dim, min: 3 })
    } else {
        Ok(())
    }
}

/// Real root `s` of `s³ - s² = (D² - D)/2` together with the cube-root
/// intermediate `ξ` of the closed form `s = (1 + ξ/2 + 2/ξ)/3`.
pub fn continuous_optimal_rank(dim: usize) -> Result<(f64, f64)> {
    require_dim3(dim)?;
    let d = dim as f64;
    let pairs = d * d - d;
    // Cardano: ξ³ = 8 + 54P + 6√(P(15/4 + 81(D - 1/2)²)), P = D² - D
    let xi = (8.0 + 54.0 * pairs + 6.0 * (pairs * (3.75 + 81.0 * (d - 0.5).powi(2))).sqrt()).cbrt();
    let mut s = (1.0 + xi / 2.0 + 2.0 / xi) / 3.0;
    // one Newton step on the defining cubic absorbs cube-root rounding
    let f = s * s * s - s * s - pairs / 2.0;
    let df = 3.0 * s * s - 2.0 * s;
    s -= f / df;
    Ok((s, xi))
}

/// Large-`D` approximation `r(D) ≈ 2^{-1/3} D^{2/3}`.
pub fn approximate_optimal_rank(dim: usize) -> f64 {
    (dim as f64).powf(2.0 / 3.0) / 2f64.cbrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OptimalRankResult {
    pub dim: usize,
    pub s_continuous: f64,
    pub xi: f64,
    /// `X = Δc(⌈s⌉) - Δc(⌊s⌋)`; its sign selects the rank.
    pub gap: f64,
    pub rank: usize,
    pub dispersion_at_rank: f64,
}

/// `r(D) = ⌊s⌋ + (1 + sign X)/2`, with `X = 0` resolved to the smaller rank.
pub fn optimal_rank(dim: usize) -> Result<OptimalRankResult> {
    let (s, xi) = continuous_optimal_rank(dim)?;
    let lo = (s.floor() as usize).max(1);
    let hi = (s.ceil() as usize).max(lo);
    let pairs = (dim * dim - dim) as f64;
    let gap = if hi == lo {
        0.0
    } else {
        let (f, c) = (lo as f64, hi as f64);
        1.0 / (c * f) - (c + f) / pairs + 2.0 / pairs
    };
    let rank = if gap > 0.0 { hi } else { lo };
    Ok(OptimalRankResult {
        dim,
        s_continuous: s,
        xi,
        gap,
        rank,
        dispersion_at_rank: dispersion_at_rank(dim, rank)?,
    })
}

/// `|Φ_M⟩ = r^{-1/2} Σ_{j<r} e^{iφ_j} |j⟩` with `r = r(D)`.
pub fn max_dispersion_state(dim: usize, phases: Option<&[f64]>) -> Result<PureState> {
    let rank = optimal_rank(dim)?.rank;
    if let Some(p) = phases {
        if p.len() < rank {
            return Err(Error::ParamOutOfRange {
                name: "phases",
                value: p.len() as f64,
                reason: "need at least r(D) phases",
            });
        }
    }
    let amp = (rank as f64).recip().sqrt();
    let amplitudes = (0..dim)
        .map(|j| {
            if j >= rank {
                C64::new(0.0, 0.0)
            } else {
                let phi = phases.map_or(0.0, |p| p[j]);
                C64::from_polar(amp, phi)
            }
        })
        .collect();
    PureState::new(amplitudes)
}

/// `|ψ_x⟩ = a(x)|0⟩ + b(x) Σ_{i>0} |i⟩` with `a(x) = 1 - x(1 - D^{-1/2})`
/// and `b(x) = √((1 - a²)/(D - 1))`: a basis ket at `x = 0`, the uniform
/// superposition `|f⟩` at `x = 1`.
pub fn interpolating_state(dim: usize, x: f64) -> Result<PureState> {
    if dim < 2 {
        return Err(Error::DimensionTooSmall { dim, min: 2 });
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::ParamOutOfRange {
            name: "x",
            value: x,
            reason: "must lie in [0, 1]",
        });
    }
    if x == 1.0 {
        return PureState::uniform(dim);
    }
    let d = dim as f64;
    let t = x * (1.0 - d.recip().sqrt());
    let a = 1.0 - t;
    // 1 - a² = t(2 - t)
    let b = (t * (2.0 - t) / (d - 1.0)).sqrt();
    let mut amps = vec![b; dim];
    amps[0] = a;
    let norm = amps.iter().map(|v| v * v).sum::<f64>().sqrt();
    PureState::from_real(&amps.iter().map(|v| v / norm).collect::<Vec<_>>())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub x: f64,
    pub rel_entropy_coherence: f64,
    pub dispersion: f64,
}

/// `(x, S_c, Δc)` of `|ψ_x⟩` on a uniform grid over `[0, 1]`.
pub fn complexity_entropy_curve(dim: usize, grid_size: usize) -> Result<Vec<CurvePoint>> {
    if grid_size < 2 {
        return Err(Error::ParamOutOfRange {
            name: "grid_size",
            value: grid_size as f64,
            reason: "need at least 2 points",
        });
    }
    (0..grid_size)
        .map(|k| {
            let x = k as f64 / (grid_size - 1) as f64;
            let psi = interpolating_state(dim, x)?;
            Ok(CurvePoint {
                x,
                rel_entropy_coherence: psi.rel_entropy_coherence(),
                dispersion: psi.coherence_dispersion(),
            })
        })
        .collect()
}
