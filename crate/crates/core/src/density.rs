//! Validated density matrices and the single-state statistics built on them:
//! populations, predictability, ℓ1/ℓ2 coherence, purity, coherence
//! dispersion and the relative entropy of coherence.
//!
//! The computational basis is always the storage basis.

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Numerical tolerances used when validating states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Absolute per-entry bound on `|ρ_ij - conj(ρ_ji)|`.
    pub hermiticity: f64,
    pub trace: f64,
    pub population: f64,
    /// Smallest admissible eigenvalue is `-psd`.
    pub psd: f64,
    pub complementarity: f64,
    pub normalization: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermiticity: 1e-12,
            trace: 1e-12,
            population: 1e-12,
            psd: 1e-10,
            complementarity: 1e-10,
            normalization: 1e-12,
        }
    }
}

/// Whether [`DensityMatrix::new`] runs the eigenvalue-based PSD check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsdCheck {
    Check,
    Skip,
}

impl From<bool> for PsdCheck {
    fn from(check: bool) -> Self {
        if check {
            PsdCheck::Check
        } else {
            PsdCheck::Skip
        }
    }
}

/// Base of the logarithm used when reporting entropies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum EntropyUnit {
    #[default]
    Nats,
    Bits,
}

impl EntropyUnit {
    pub fn from_nats(self, value: f64) -> f64 {
        match self {
            EntropyUnit::Nats => value,
            EntropyUnit::Bits => value / std::f64::consts::LN_2,
        }
    }
}

/// Shannon entropy in nats with `0 log 0 = 0`.
pub fn shannon_entropy(probabilities: impl IntoIterator<Item = f64>) -> f64 {
    probabilities
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum()
}

/// A Hermitian, unit-trace, positive semidefinite `D×D` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    m: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates `entries` (row-major, `dim*dim` values) as a density matrix.
    pub fn new(dim: usize, entries: Vec<C64>, psd: PsdCheck) -> Result<Self> {
        Self::with_tolerances(dim, entries, psd, &Tolerances::default())
    }

    pub fn with_tolerances(dim: usize, entries: Vec<C64>, psd: PsdCheck, tol: &Tolerances) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        if entries.len() != dim * dim {
            return Err(Error::ShapeMismatch {
                dim,
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Self::from_matrix(DMatrix::from_row_slice(dim, dim, &entries), psd, tol)
    }

    pub fn from_matrix(m: DMatrix<C64>, psd: PsdCheck, tol: &Tolerances) -> Result<Self> {
        let dim = m.nrows();
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        if m.ncols() != dim {
            return Err(Error::ShapeMismatch {
                dim,
                expected: dim * dim,
                got: dim * m.ncols(),
            });
        }
        for row in 0..dim {
            for col in row..dim {
                let deviation = (m[(row, col)] - m[(col, row)].conj()).norm();
                if deviation.is_nan() || deviation > tol.hermiticity {
                    return Err(Error::HermiticityViolation { row, col, deviation });
                }
            }
        }
        let trace: f64 = (0..dim).map(|i| m[(i, i)].re).sum();
        if trace.is_nan() || (trace - 1.0).abs() > tol.trace {
            return Err(Error::TraceViolation { trace });
        }
        for index in 0..dim {
            let value = m[(index, index)].re;
            if value < -tol.population || value > 1.0 + tol.population {
                return Err(Error::PopulationOutOfRange { index, value });
            }
        }
        let state = DensityMatrix { m };
        if psd == PsdCheck::Check {
            let eigenvalue = state.min_eigenvalue();
            if eigenvalue < -tol.psd {
                return Err(Error::NotPositiveSemidefinite { eigenvalue });
            }
        }
        Ok(state)
    }

    /// Diagonal state with the given populations.
    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        let d = populations.len();
        let m = DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                C64::new(populations[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Self::from_matrix(m, PsdCheck::Skip, &Tolerances::default()).and_then(|s| {
            match populations.iter().position(|&p| p < 0.0) {
                Some(i) => Err(Error::NotPositiveSemidefinite {
                    eigenvalue: populations[i],
                }),
                None => Ok(s),
            }
        })
    }

    /// `I/D`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::diagonal(&vec![1.0 / dim as f64; dim])
    }

    /// Wraps a matrix that is valid by construction (products and
    /// conjugations of validated states).
    pub(crate) fn from_trusted(m: DMatrix<C64>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        DensityMatrix { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.m[(row, col)]
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<C64> {
        let d = self.dim();
        (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| self.m[(i, j)])
            .collect()
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.m[(i, i)].re).collect()
    }

    /// Absolute values of all `D²-D` off-diagonal entries, row-major.
    pub fn off_diagonal_magnitudes(&self) -> Vec<f64> {
        let d = self.dim();
        let mut out = Vec::with_capacity(d * d - d);
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    out.push(self.m[(i, j)].norm());
                }
            }
        }
        out
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.m.clone().symmetric_eigenvalues().iter().copied().collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Mean population, always `1/D`.
    pub fn mean_population(&self) -> f64 {
        1.0 / self.dim() as f64
    }

    /// `P² = Σ ρ_ii² - 1/D`.
    pub fn predictability_sq(&self) -> f64 {
        let d = self.dim() as f64;
        let mean = 1.0 / d;
        // D times the population variance; avoids cancellation near 1/D.
        self.populations().into_iter().map(|p| (p - mean) * (p - mean)).sum()
    }

    /// `C1 = Σ_{i≠j} |ρ_ij|`.
    pub fn l1_coherence(&self) -> f64 {
        self.off_diagonal_magnitudes().iter().sum()
    }

    /// Mean absolute off-diagonal value `C1/(D²-D)`; zero for `D = 1`.
    pub fn mean_coherence(&self) -> f64 {
        let d = self.dim();
        if d < 2 {
            return 0.0;
        }
        self.l1_coherence() / (d * d - d) as f64
    }

    /// `C2 = Σ_{i≠j} |ρ_ij|²`.
    pub fn l2_coherence(&self) -> f64 {
        self.off_diagonal_magnitudes().iter().map(|x| x * x).sum()
    }

    /// `Π = Tr ρ² = Σ_ij |ρ_ij|²`.
    pub fn purity(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `Δc = C2 - C1²/(D²-D)`, evaluated as `D²-D` times the variance of
    /// the off-diagonal magnitudes.
    pub fn coherence_dispersion(&self) -> f64 {
        magnitude_dispersion(&self.off_diagonal_magnitudes())
    }

    /// Von Neumann entropy in nats.
    pub fn von_neumann_entropy(&self) -> f64 {
        shannon_entropy(self.eigenvalues())
    }

    /// `S_c = S(ρ_diag) - S(ρ)` in nats.
    pub fn rel_entropy_coherence(&self) -> f64 {
        let diag = shannon_entropy(self.populations());
        (diag - self.von_neumann_entropy()).max(0.0)
    }

    pub fn stats(&self) -> Result<CoherenceStats> {
        self.stats_with(&Tolerances::default())
    }

    pub fn stats_with(&self, tol: &Tolerances) -> Result<CoherenceStats> {
        let stats = CoherenceStats {
            dim: self.dim(),
            mean_population: self.mean_population(),
            predictability_sq: self.predictability_sq(),
            c1: self.l1_coherence(),
            c2: self.l2_coherence(),
            purity: self.purity(),
            dispersion: self.coherence_dispersion(),
            rel_entropy_coherence: self.rel_entropy_coherence(),
        };
        let residual = stats.complementarity_residual();
        if residual.is_nan() || residual.abs() > tol.complementarity {
            return Err(Error::ComplementarityViolation {
                residual,
                tolerance: tol.complementarity,
            });
        }
        Ok(stats)
    }

    /// `U ρ U†` with `U = diag(e^{iφ_k})`: entry `(i, j)` picks up
    /// `e^{i(φ_i - φ_j)}`. Missing trailing phases are taken as zero.
    pub fn with_local_phases(&self, phases: &[f64]) -> DensityMatrix {
        let d = self.dim();
        let phase = |k: usize| phases.get(k).copied().unwrap_or(0.0);
        let m = DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                self.m[(i, j)]
            } else {
                self.m[(i, j)] * C64::from_polar(1.0, phase(i) - phase(j))
            }
        });
        DensityMatrix::from_trusted(m)
    }

    /// Simultaneous row/column permutation: new entry `(i, j)` is old
    /// `(perm[i], perm[j])`.
    pub fn permuted(&self, perm: &[usize]) -> Result<DensityMatrix> {
        let d = self.dim();
        let mut seen = vec![false; d];
        if perm.len() != d || perm.iter().any(|&p| p >= d || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::config("perm", format!("not a permutation of 0..{d}")));
        }
        Ok(DensityMatrix::from_trusted(DMatrix::from_fn(d, d, |i, j| {
            self.m[(perm[i], perm[j])]
        })))
    }

    /// `ρ ⊗ σ`.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix::from_trusted(self.m.kronecker(&other.m))
    }

    /// Mixture `p ρ + (1-p) σ`.
    pub fn mix(&self, other: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::config("other", "dimension mismatch"));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ParamOutOfRange {
                name: "p",
                value: p,
                reason: "must lie in [0, 1]",
            });
        }
        let a = C64::new(p, 0.0);
        let b = C64::new(1.0 - p, 0.0);
        Ok(DensityMatrix::from_trusted(
            self.m.map(|z| z * a) + other.m.map(|z| z * b),
        ))
    }
}

/// `Σ_k (x_k - x̄)²` over the supplied off-diagonal magnitudes, i.e.
/// `C2 - C1²/len`. Exactly zero when every value is equal.
pub(crate) fn magnitude_dispersion(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
        (lo.min(x), hi.max(x))
    });
    if lo == hi {
        return 0.0;
    }
    let n = values.len() as f64;
    let mut mean = values.iter().sum::<f64>() / n;
    mean += values.iter().map(|x| x - mean).sum::<f64>() / n;
    values.iter().map(|x| (x - mean) * (x - mean)).sum()
}

/// Dispersion of the above-diagonal magnitude vector `x` of a `D`-level
/// state: `2 Σ x_j² - 4 (Σ x_j)² / (D² - D)`.
pub fn vectorized_dispersion(x: &[f64], dim: usize) -> f64 {
    let pairs = (dim * dim - dim) as f64;
    let sum: f64 = x.iter().sum();
    let sum_sq: f64 = x.iter().map(|v| v * v).sum();
    2.0 * sum_sq - 4.0 * sum * sum / pairs
}

/// Degree-`k` leading principal minor of the Hessian of
/// [`vectorized_dispersion`]: `4^k (1 - k/M)`, `M = (D² - D)/2`.
pub fn hessian_minor_determinant(dim: usize, k: usize) -> f64 {
    let m = ((dim * dim - dim) / 2) as f64;
    4f64.powi(k as i32) * (1.0 - k as f64 / m)
}

/// A normalized ket in the computational basis.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyDimension);
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq.is_nan() || (norm_sq - 1.0).abs() > Tolerances::default().normalization {
            return Err(Error::NormalizationViolation { norm_sq });
        }
        Ok(PureState { amplitudes })
    }

    /// Real, non-negative amplitudes.
    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    /// `|i⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::RankOutOfRange { dim, rank: index + 1 });
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Self::new(amps)
    }

    /// `|f⟩ = D^{-1/2} Σ_i |i⟩`.
    pub fn uniform(dim: usize) -> Result<Self> {
        Self::from_real(&vec![(dim as f64).recip().sqrt(); dim])
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> DensityMatrix {
        let d = self.dim();
        let a = &self.amplitudes;
        DensityMatrix::from_trusted(DMatrix::from_fn(d, d, |i, j| a[i] * a[j].conj()))
    }

    /// For pure states `S(ψ) = 0`, so `S_c` is the Shannon entropy of the
    /// populations.
    pub fn rel_entropy_coherence(&self) -> f64 {
        shannon_entropy(self.populations())
    }

    pub fn coherence_dispersion(&self) -> f64 {
        self.projector().coherence_dispersion()
    }
}

/// Scalar figures of merit of one state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherenceStats {
    pub dim: usize,
    pub mean_population: f64,
    pub predictability_sq: f64,
    pub c1: f64,
    pub c2: f64,
    pub purity: f64,
    pub dispersion: f64,
    pub rel_entropy_coherence: f64,
}

impl CoherenceStats {
    /// `C2 + P² - Π + 1/D`, zero for every valid state.
    pub fn complementarity_residual(&self) -> f64 {
        self.c2 + self.predictability_sq - self.purity + self.mean_population
    }

    pub fn mean_coherence(&self) -> f64 {
        if self.dim < 2 {
            0.0
        } else {
            self.c1 / (self.dim * self.dim - self.dim) as f64
        }
    }
}
