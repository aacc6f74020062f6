//! Random states and reference implementations shared by the integration
//! tests. The references work from definitions by enumeration and never
//! call into the closed forms they check.

#![allow(dead_code)]

use cohdisp::{DensityMatrix, PsdCheck, PureState, C64};
use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

/// `G G† / tr` for a `dim × rank` complex Ginibre `G` with random rank.
pub fn random_matrix(rng: &mut ChaCha8Rng, dim: usize) -> DMatrix<C64> {
    let rank = rng.gen_range(1..=dim);
    let g = DMatrix::from_fn(dim, rank, |_, _| C64::new(gaussian(rng), gaussian(rng)));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    let m = m.map(|z| z / tr);
    // exact Hermiticity and unit trace after rounding
    let mut h = DMatrix::from_fn(dim, dim, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let tr: f64 = (0..dim).map(|i| h[(i, i)].re).sum();
    for i in 0..dim {
        h[(i, i)] = C64::new(h[(i, i)].re / tr, 0.0);
    }
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                h[(i, j)] /= tr;
            }
        }
    }
    h
}

pub fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
    let m = random_matrix(rng, dim);
    let entries = row_major(&m);
    DensityMatrix::new(dim, entries, PsdCheck::Check).expect("random state is valid")
}

pub fn random_pure_amplitudes(rng: &mut ChaCha8Rng, dim: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| C64::new(gaussian(rng), gaussian(rng))).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

pub fn row_major(m: &DMatrix<C64>) -> Vec<C64> {
    let d = m.nrows();
    (0..d * d).map(|k| m[(k / d, k % d)]).collect()
}

/// Kronecker product by explicit index arithmetic.
pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let (p, q) = (a.nrows(), b.nrows());
    DMatrix::from_fn(p * q, p * q, |r, c| a[(r / q, c / q)] * b[(r % q, c % q)])
}

pub fn kron_all(factors: &[DMatrix<C64>]) -> DMatrix<C64> {
    let mut out = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for f in factors {
        out = kron(&out, f);
    }
    out
}

#[derive(Clone, Copy, Debug)]
pub struct Reference {
    pub predictability_sq: f64,
    pub c1: f64,
    pub c2: f64,
    pub purity: f64,
    pub dispersion: f64,
}

/// Statistics by direct enumeration: purity from `Tr(ρ ρ)` by matrix
/// product, dispersion as the summed squared deviation of the off-diagonal
/// magnitudes from their mean.
pub fn reference(m: &DMatrix<C64>) -> Reference {
    let d = m.nrows();
    let pops: Vec<f64> = (0..d).map(|i| m[(i, i)].re).collect();
    let predictability_sq = pops.iter().map(|p| (p - 1.0 / d as f64).powi(2)).sum::<f64>();
    let mut offs = Vec::with_capacity(d * d - d);
    for i in 0..d {
        for j in 0..d {
            if i != j {
                offs.push(m[(i, j)].norm());
            }
        }
    }
    let c1: f64 = offs.iter().sum();
    let c2: f64 = offs.iter().map(|x| x * x).sum();
    let purity = (m * m).trace().re;
    let dispersion = if offs.is_empty() {
        0.0
    } else {
        let mean = c1 / offs.len() as f64;
        offs.iter().map(|x| (x - mean).powi(2)).sum()
    };
    Reference {
        predictability_sq,
        c1,
        c2,
        purity,
        dispersion,
    }
}

/// Populations `∝ e^{-j βε}`, `j = 1..d`, by direct summation.
pub fn boltzmann(d: usize, tau: f64) -> Vec<f64> {
    let beta_eps = 4.0 / tau;
    let w: Vec<f64> = (1..=d).map(|j| (-(j as f64) * beta_eps).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

/// `λ |Ψ⟩⟨Ψ| + (1-λ) diag(p)` with `Ψ_j = √p_j`.
pub fn gibbs_reference(d: usize, tau: f64, lambda: f64) -> DMatrix<C64> {
    let p = boltzmann(d, tau);
    DMatrix::from_fn(d, d, |i, j| {
        let coherent = (p[i] * p[j]).sqrt();
        let v = if i == j { p[i] } else { lambda * coherent };
        C64::new(v, 0.0)
    })
}

pub fn rel_close(a: f64, b: f64, rel: f64, floor: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(floor)
}

/// Projected gradient ascent on real non-negative amplitudes
/// `a = u/|u|`; phases are irrelevant to the dispersion.
pub fn ascend(dim: usize, mut a: Vec<f64>) -> Vec<f64> {
    let pairs = (dim * dim - dim) as f64;
    let mut step = 0.05;
    let value = |a: &[f64]| {
        let s1: f64 = a.iter().sum();
        let s4: f64 = a.iter().map(|x| x.powi(4)).sum();
        1.0 - s4 - (s1 * s1 - 1.0).powi(2) / pairs
    };
    let mut f = value(&a);
    for _ in 0..400 {
        let s1: f64 = a.iter().sum();
        let common = 4.0 * (s1 * s1 - 1.0) * s1 / pairs;
        let mut next: Vec<f64> = a
            .iter()
            .map(|&x| (x + step * (-4.0 * x.powi(3) - common)).max(0.0))
            .collect();
        let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        next.iter_mut().for_each(|x| *x /= norm);
        let g = value(&next);
        if g >= f {
            a = next;
            f = g;
        } else {
            step *= 0.5;
            if step < 1e-10 {
                break;
            }
        }
    }
    a
}

/// Best dispersion over `restarts` ascents from uniformly random starts,
/// evaluated on the resulting state.
pub fn random_search_max(rng: &mut ChaCha8Rng, dim: usize, restarts: usize) -> f64 {
    let mut best: f64 = 0.0;
    for _ in 0..restarts {
        let u: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        let a = ascend(dim, u.into_iter().map(|x| x / norm).collect());
        best = best.max(PureState::from_real(&a).unwrap().coherence_dispersion());
    }
    best
}
