//! Hyperbolic functions that stay finite at the extreme arguments produced
//! by `2d/τ` when `τ → 0` and `2/τ` when `τ → ∞`.

/// Above this argument `tanh` and `coth` are exactly 1 in double precision.
pub const SATURATION: f64 = 350.0;
/// Below this argument leading-order series are used.
pub const SERIES: f64 = 1e-8;

pub fn tanh(a: f64) -> f64 {
    if a > SATURATION {
        1.0
    } else if a.abs() < SERIES {
        a - a * a * a / 3.0
    } else {
        a.tanh()
    }
}

pub fn coth(a: f64) -> f64 {
    if a > SATURATION {
        1.0
    } else if a.abs() < SERIES {
        1.0 / a + a / 3.0
    } else {
        1.0 / a.tanh()
    }
}

/// `ln tanh(a)` for `a > 0`.
pub fn ln_tanh(a: f64) -> f64 {
    if a > SATURATION {
        0.0
    } else if a < SERIES {
        a.ln() - a * a / 3.0
    } else if a < 0.5 {
        a.tanh().ln()
    } else {
        // tanh a = (1 - u)/(1 + u) with u = e^{-2a} ≤ 1/e
        -2.0 * (-2.0 * a).exp().atanh()
    }
}

/// `ln sinh(a)` for `a > 0`.
pub fn ln_sinh(a: f64) -> f64 {
    if a > 20.0 {
        a - std::f64::consts::LN_2 + (-(-2.0 * a).exp()).ln_1p()
    } else if a < SERIES {
        a.ln() + a * a / 6.0
    } else {
        a.sinh().ln()
    }
}
