//! Special functions not covered by `statrs`.
//!
//! `statrs` supplies the gamma function family for positive shape parameters,
//! the digamma function and the regularized incomplete beta. The tail masses
//! of the jump intensities additionally need the upper incomplete gamma
//! function with a negative shape (generalized gamma), the exponential
//! integral, and the tail of the beta intensity `c (1-u)^(c-1) / u`.

use statrs::function::{beta as sbeta, gamma as sgamma};

use super::quadrature::{integrate, Tolerance};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082;

const FPMIN: f64 = 1e-300;
const SERIES_EPS: f64 = 1e-17;

pub fn ln_gamma(x: f64) -> f64 {
    sgamma::ln_gamma(x)
}

pub fn gamma(x: f64) -> f64 {
    sgamma::gamma(x)
}

pub fn digamma(x: f64) -> f64 {
    sgamma::digamma(x)
}

/// Rising factorial `(x)_n = x (x+1) ... (x+n-1)`, with `(x)_0 = 1`.
pub fn pochhammer(x: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (x + k as f64))
}

/// Lower incomplete gamma `γ(a, z) = ∫_0^z t^(a-1) e^(-t) dt` for `a > 0`.
pub fn lower_gamma(a: f64, z: f64) -> f64 {
    debug_assert!(a > 0.0);
    if z <= 0.0 {
        return 0.0;
    }
    sgamma::gamma_li(a, z)
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn beta_reg(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        sbeta::beta_reg(a, b, x)
    }
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    sbeta::ln_beta(a, b)
}

/// Exponential integral `E1(z) = ∫_z^∞ e^(-t)/t dt` for `z > 0`.
pub fn exp_integral_e1(z: f64) -> f64 {
    ln_exp_integral_e1(z).exp()
}

/// Natural log of `E1(z)`, finite for every `z > 0` including large `z`.
pub fn ln_exp_integral_e1(z: f64) -> f64 {
    ln_upper_gamma(0.0, z)
}

/// Upper incomplete gamma `Γ(a, z)` for `z > 0` and any real `a` that is
/// not a negative integer.
pub fn upper_gamma(a: f64, z: f64) -> f64 {
    ln_upper_gamma(a, z).exp()
}

/// Natural log of `Γ(a, z)`.
///
/// Uses the power series for `z < 1` and the Legendre continued fraction
/// (modified Lentz) otherwise. The continued fraction form keeps the result
/// representable far beyond the underflow point of `Γ(a, z)` itself.
pub fn ln_upper_gamma(a: f64, z: f64) -> f64 {
    assert!(z > 0.0, "upper incomplete gamma needs z > 0, got {z}");
    assert!(
        !(a < 0.0 && a == a.round()),
        "upper incomplete gamma undefined for negative integer a = {a}"
    );
    if z < 1.0 {
        upper_gamma_series(a, z).ln()
    } else {
        -z + a * z.ln() + upper_gamma_cf(a, z).ln()
    }
}

fn upper_gamma_series(a: f64, z: f64) -> f64 {
    if a == 0.0 {
        // E1(z) = -γ - ln z - Σ (-z)^n / (n n!)
        let mut term = 1.0;
        let mut sum = 0.0;
        for n in 1..200 {
            term *= -z / n as f64;
            let contrib = term / n as f64;
            sum += contrib;
            if contrib.abs() < SERIES_EPS * sum.abs().max(1e-300) {
                break;
            }
        }
        return -EULER_GAMMA - z.ln() - sum;
    }
    // Γ(a, z) = Γ(a) - Σ (-1)^n z^(a+n) / (n! (a+n))
    let za = z.powf(a);
    let mut coef = 1.0;
    let mut sum = 1.0 / a;
    for n in 1..200 {
        coef *= -z / n as f64;
        let contrib = coef / (a + n as f64);
        sum += contrib;
        if contrib.abs() < SERIES_EPS * sum.abs() {
            break;
        }
    }
    gamma(a) - za * sum
}

/// Continued fraction factor `h` with `Γ(a, z) = e^(-z) z^a h`.
fn upper_gamma_cf(a: f64, z: f64) -> f64 {
    let mut b = z + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// Tail of the beta intensity, `∫_v^1 c (1-u)^(c-1) / u du` for `0 < v < 1`.
///
/// Zero at and beyond `v = 1`.
pub fn beta_tail(c: f64, v: f64) -> f64 {
    assert!(c > 0.0 && v > 0.0);
    if v >= 1.0 {
        return 0.0;
    }
    if v > 0.5 {
        return c * beta_tail_upper_series(c, v);
    }
    if c > 8.0 {
        // the binomial series cancels badly for large c; split at 1/2
        let inner = integrate(
            |u: f64| ((c - 1.0) * (-u).ln_1p()).exp() / u,
            v,
            0.5,
            Tolerance::relative(1e-14),
        );
        return c * inner.value + c * beta_tail_upper_series(c, 0.5);
    }
    // Σ_{n≥1} (1-c)_n v^n / (n! n)
    let mut r = 1.0;
    let mut sum = 0.0;
    for n in 1..2000 {
        let nf = n as f64;
        r *= (nf - c) * v / nf;
        let contrib = r / nf;
        sum += contrib;
        if contrib.abs() < SERIES_EPS * (sum.abs() + 1.0) && nf > c {
            break;
        }
    }
    c * (-v.ln() - digamma(c) - EULER_GAMMA - sum)
}

/// `Σ_m (1-v)^(c+m) / (c+m)`, the tail integral divided by `c`, for `v ≥ 1/2`.
fn beta_tail_upper_series(c: f64, v: f64) -> f64 {
    let w = 1.0 - v;
    let mut p = w.powf(c);
    let mut sum = 0.0;
    for m in 0..4000 {
        let contrib = p / (c + m as f64);
        sum += contrib;
        if contrib < SERIES_EPS * sum {
            break;
        }
        p *= w;
    }
    sum
}
