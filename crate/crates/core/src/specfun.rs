//! Special functions needed by the SINR distributions and the error model.
//!
//! `J0` and the Gaussian tail come from `libm` (FreeBSD msun ports). `K1` and
//! `Ei(-x)` are implemented here with a power series for small arguments and
//! a continued fraction for large ones. Both also have exponentially scaled
//! variants, which the fused `exp(a) * f(b)` helpers use so that a huge
//! exponential times a tiny special-function value never overflows.

use crate::{Error, Result};
use core::f64::consts::{FRAC_1_SQRT_2, PI};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const MAX_ITER: usize = 500;

// Below this argument the series is used for K1, above it Steed's CF2.
const K1_SERIES_MAX: f64 = 2.0;
// Below this argument the series is used for E1, above it a continued fraction.
const E1_SERIES_MAX: f64 = 1.0;

/// Convergence target for the iterative kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accuracy {
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for Accuracy {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-300,
        }
    }
}

impl Accuracy {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Result<Self> {
        if !(rel_tol > 0.0) {
            return Err(Error::invalid("rel_tol", "must be positive"));
        }
        if !(abs_tol > 0.0) {
            return Err(Error::invalid("abs_tol", "must be positive"));
        }
        Ok(Self { rel_tol, abs_tol })
    }

    fn converged(&self, term: f64, sum: f64) -> bool {
        term.abs() <= self.abs_tol.max(self.rel_tol * sum.abs())
    }
}

fn domain(function: &'static str, value: f64, expected: &'static str) -> Error {
    Error::Domain {
        function,
        value,
        expected,
    }
}

/// Bessel function of the first kind, order zero.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain("bessel_j0", x, "finite"));
    }
    // msun's j0 is written for |x|; make the symmetry exact.
    Ok(libm::j0(x.abs()))
}

/// Gaussian tail probability `Q(x) = P(N(0,1) > x)`.
pub fn gaussian_q(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain("gaussian_q", x, "finite"));
    }
    let tail = 0.5 * libm::erfc(x.abs() * FRAC_1_SQRT_2);
    Ok(if x < 0.0 { 1.0 - tail } else { tail })
}

/// Modified Bessel function of the second kind, order one.
pub fn bessel_k1(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_infinite() {
        return Err(domain("bessel_k1", x, "x > 0"));
    }
    if x <= K1_SERIES_MAX {
        Ok(k1_series(x, &Accuracy::default()))
    } else {
        Ok(k1_scaled_cf(x, &Accuracy::default()) * libm::exp(-x))
    }
}

/// `exp(x) * K1(x)`.
pub fn bessel_k1_scaled(x: f64) -> Result<f64> {
    bessel_k1_scaled_with(x, &Accuracy::default())
}

pub fn bessel_k1_scaled_with(x: f64, acc: &Accuracy) -> Result<f64> {
    if !(x > 0.0) || x.is_infinite() {
        return Err(domain("bessel_k1_scaled", x, "x > 0"));
    }
    if x <= K1_SERIES_MAX {
        Ok(k1_series(x, acc) * libm::exp(x))
    } else {
        Ok(k1_scaled_cf(x, acc))
    }
}

// K1(x) = 1/x + (x/2) sum_k t_k [ln(x/2) - (psi(k+1) + psi(k+2)) / 2],
// t_k = (x^2/4)^k / (k! (k+1)!).
fn k1_series(x: f64, acc: &Accuracy) -> f64 {
    let q = 0.25 * x * x;
    let log_half = libm::log(0.5 * x);
    let mut t = 1.0;
    let mut psi_a = -EULER_GAMMA; // psi(k+1)
    let mut psi_b = 1.0 - EULER_GAMMA; // psi(k+2)
    let mut sum = t * (log_half - 0.5 * (psi_a + psi_b));
    for k in 1..MAX_ITER {
        let kf = k as f64;
        t *= q / (kf * (kf + 1.0));
        psi_a += 1.0 / kf;
        psi_b += 1.0 / (kf + 1.0);
        let term = t * (log_half - 0.5 * (psi_a + psi_b));
        sum += term;
        if acc.converged(term, sum) {
            break;
        }
    }
    1.0 / x + 0.5 * x * sum
}

// Steed's method for the second continued fraction (Temme), order zero,
// followed by the K0 -> K1 step. Returns exp(x) * K1(x).
fn k1_scaled_cf(x: f64, acc: &Accuracy) -> f64 {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 0.01 * acc.rel_tol {
            break;
        }
    }
    let h = a1 * h;
    let k0_scaled = libm::sqrt(PI / (2.0 * x)) / s;
    k0_scaled * (x + 0.5 - h) / x
}

/// `Ei(-x)` for `x > 0`, i.e. `-E1(x)`.
pub fn expint_ei_neg(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_infinite() {
        return Err(domain("expint_ei_neg", x, "x > 0"));
    }
    let acc = Accuracy::default();
    if x <= E1_SERIES_MAX {
        Ok(-e1_series(x, &acc))
    } else {
        Ok(-e1_scaled_cf(x, &acc) * libm::exp(-x))
    }
}

/// `exp(x) * E1(x)` for `x > 0`.
pub fn expint_e1_scaled(x: f64) -> Result<f64> {
    expint_e1_scaled_with(x, &Accuracy::default())
}

pub fn expint_e1_scaled_with(x: f64, acc: &Accuracy) -> Result<f64> {
    if !(x > 0.0) || x.is_infinite() {
        return Err(domain("expint_e1_scaled", x, "x > 0"));
    }
    if x <= E1_SERIES_MAX {
        Ok(e1_series(x, acc) * libm::exp(x))
    } else {
        Ok(e1_scaled_cf(x, acc))
    }
}

// E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
fn e1_series(x: f64, acc: &Accuracy) -> f64 {
    let mut fact = 1.0;
    let mut sum = 0.0;
    for k in 1..MAX_ITER {
        let kf = k as f64;
        fact *= -x / kf;
        let term = fact / kf;
        sum += term;
        if acc.converged(term, sum) {
            break;
        }
    }
    -EULER_GAMMA - libm::log(x) - sum
}

// Modified Lentz evaluation of exp(x) E1(x) = 1/(x+1- 1/(x+3- 4/(x+5- ...))).
fn e1_scaled_cf(x: f64, acc: &Accuracy) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        let an = -fi * fi;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < acc.rel_tol {
            break;
        }
    }
    h
}

/// `exp(a) * Ei(-b)` for `b > 0`, evaluated as `-exp(a - b) * [exp(b) E1(b)]`.
pub fn exp_times_ei_neg(a: f64, b: f64) -> Result<f64> {
    if a.is_nan() {
        return Err(domain("exp_times_ei_neg", a, "a not NaN"));
    }
    let scaled = expint_e1_scaled(b)?;
    Ok(-libm::exp(a - b) * scaled)
}

/// `exp(a) * K1(b)` for `b > 0`, evaluated as `exp(a - b) * [exp(b) K1(b)]`.
pub fn exp_times_k1(a: f64, b: f64) -> Result<f64> {
    if a.is_nan() {
        return Err(domain("exp_times_k1", a, "a not NaN"));
    }
    let scaled = bessel_k1_scaled(b)?;
    Ok(libm::exp(a - b) * scaled)
}
