//! Finite-blocklength error model and the analytic average block error rates.
//!
//! The instantaneous error probability of a block of `L` channel uses at rate
//! `R` is the normal approximation `Q((C(g) - R) / sqrt(V(g) / L))`. Replacing
//! it by a linear ramp between `theta_lo` and `sigma_hi` turns the average over
//! the SINR distribution into `eta sqrt(L) * int_{theta_lo}^{sigma_hi} F(x) dx`,
//! which is evaluated either at the midpoint (`F(psi)`) or by Gauss-Chebyshev
//! quadrature.

use crate::config::{Scenario, Theorem1Mode, CLAMP_SLACK};
use crate::sinr::{cdf_g_c, cdf_g_f, cdf_g_n, coeffs_for_user, User};
use crate::specfun::gaussian_q;
use crate::{Error, Result};
use alloc::format;
use core::f64::consts::{LN_2, PI};

/// Smallest blocklength for which the normal approximation is used.
pub const MIN_BLOCKLENGTH: u32 = 100;

pub const DEFAULT_CHEBYSHEV_NODES: usize = 30;

/// Rate, blocklength and the constants of the linearized error ramp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketSpec {
    pub rate: f64,
    pub blocklength: u32,
    /// Slope scale `1 / sqrt(2 pi (2^(2R) - 1))`.
    pub eta: f64,
    /// SINR threshold `2^R - 1`.
    pub psi: f64,
    /// Lower ramp knot `psi - 1 / (2 eta sqrt L)`; may be negative for tiny rates.
    pub theta_lo: f64,
    /// Upper ramp knot `psi + 1 / (2 eta sqrt L)`.
    pub sigma_hi: f64,
}

impl PacketSpec {
    pub fn new(rate: f64, blocklength: u32) -> Result<Self> {
        if blocklength <= MIN_BLOCKLENGTH {
            return Err(Error::invalid(
                "blocklength",
                format!("blocklength must exceed {MIN_BLOCKLENGTH} (got {blocklength})"),
            ));
        }
        Self::build(rate, blocklength)
    }

    fn build(rate: f64, blocklength: u32) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::invalid("rate", "must be finite and > 0"));
        }
        if blocklength == 0 {
            return Err(Error::invalid("blocklength", "must be positive"));
        }
        let eta = 1.0 / libm::sqrt(2.0 * PI * libm::expm1(2.0 * rate * LN_2));
        let psi = libm::expm1(rate * LN_2);
        let half_width = 1.0 / (2.0 * eta * libm::sqrt(f64::from(blocklength)));
        Ok(Self {
            rate,
            blocklength,
            eta,
            psi,
            theta_lo: psi - half_width,
            sigma_hi: psi + half_width,
        })
    }

    /// Packet carrying the same payload in half the channel uses.
    ///
    /// Used by the orthogonal baseline, whose slots may fall to exactly the
    /// minimum blocklength, so the blocklength floor is not enforced here.
    pub fn half_slot(&self) -> Result<Self> {
        Self::build(2.0 * self.rate, self.blocklength / 2)
    }

    /// `eta * sqrt(L)`, the magnitude of the ramp slope.
    pub fn slope(&self) -> f64 {
        self.eta * libm::sqrt(f64::from(self.blocklength))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Riemann,
    GaussChebyshev { nodes: usize },
    MonteCarlo,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Riemann => "riemann",
            Method::GaussChebyshev { .. } => "gauss-chebyshev",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

/// Averaging rule for the analytic engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Quadrature {
    #[default]
    Riemann,
    GaussChebyshev(usize),
}

impl Quadrature {
    pub fn method(self) -> Method {
        match self {
            Quadrature::Riemann => Method::Riemann,
            Quadrature::GaussChebyshev(n) => Method::GaussChebyshev { nodes: n },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlerResult {
    pub value: f64,
    pub method: Method,
    pub trials: Option<u64>,
    /// Half-width of the 95% normal interval (Monte Carlo only).
    pub ci_halfwidth: Option<f64>,
}

impl BlerResult {
    pub fn analytic(value: f64, method: Method) -> Self {
        Self {
            value,
            method,
            trials: None,
            ci_halfwidth: None,
        }
    }

    pub fn monte_carlo(value: f64, trials: u64) -> Self {
        let p = value.clamp(0.0, 1.0);
        Self {
            value: p,
            method: Method::MonteCarlo,
            trials: Some(trials),
            ci_halfwidth: Some(confidence_halfwidth(p, trials)),
        }
    }

    /// False when a Monte Carlo estimate rests on fewer than ~100 error events
    /// and should not be read as a value.
    pub fn resolvable(&self) -> bool {
        match self.trials {
            Some(n) => self.value * n as f64 >= 100.0,
            None => true,
        }
    }
}

/// `1.96 sqrt(p (1 - p) / n)`.
pub fn confidence_halfwidth(p: f64, trials: u64) -> f64 {
    1.96 * libm::sqrt(p * (1.0 - p) / trials as f64)
}

pub fn shannon_capacity(g: f64) -> f64 {
    libm::log1p(g) / LN_2
}

/// `V(g) = (1 - 1/(1+g)^2) / ln^2 2`.
pub fn channel_dispersion(g: f64) -> f64 {
    let inv = 1.0 / (1.0 + g);
    (1.0 - inv * inv) / (LN_2 * LN_2)
}

/// Normal-approximation block error probability at SINR `g`.
pub fn instantaneous_bler(g: f64, p: &PacketSpec) -> f64 {
    if !(g > 0.0) {
        return 1.0;
    }
    let num = shannon_capacity(g) - p.rate;
    if num == 0.0 {
        return 0.5;
    }
    let den = libm::sqrt(channel_dispersion(g) / f64::from(p.blocklength));
    // Arguments are finite for g > 0.
    gaussian_q(num / den).unwrap_or(0.5)
}

/// Piecewise-linear approximation of [`instantaneous_bler`].
pub fn linearized_bler(g: f64, p: &PacketSpec) -> f64 {
    if g < p.theta_lo {
        1.0
    } else if g > p.sigma_hi {
        0.0
    } else {
        (0.5 - p.slope() * (g - p.psi)).clamp(0.0, 1.0)
    }
}

/// Average BLER from the midpoint rule: `F(psi)`.
pub fn avg_bler_riemann<F>(cdf: F, p: &PacketSpec) -> Result<BlerResult>
where
    F: Fn(f64) -> Result<f64>,
{
    Ok(BlerResult::analytic(
        cdf(p.psi)?.clamp(0.0, 1.0),
        Method::Riemann,
    ))
}

/// Chebyshev nodes `z_i = cos((2i - 1) pi / 2n)`, `i = 1..=n`.
pub fn chebyshev_node(i: usize, n: usize) -> f64 {
    libm::cos((2 * i - 1) as f64 * PI / (2 * n) as f64)
}

/// Average BLER from `n`-point Gauss-Chebyshev quadrature of the ramp integral.
///
/// SINRs are nonnegative, so the CDF is taken as zero at any node below 0.
pub fn avg_bler_gauss_chebyshev<F>(cdf: F, p: &PacketSpec, n: usize) -> Result<BlerResult>
where
    F: Fn(f64) -> Result<f64>,
{
    if n == 0 {
        return Err(Error::invalid("nodes", "Gauss-Chebyshev needs n >= 1"));
    }
    let scale = 2.0 * p.slope();
    let w = PI / (2 * n) as f64;
    let mut acc = 0.0;
    for i in 1..=n {
        let z = chebyshev_node(i, n);
        let x = (z + 1.0) / scale + p.theta_lo;
        if x > 0.0 {
            acc += w * cdf(x)? * libm::sqrt(1.0 - z * z);
        }
    }
    Ok(BlerResult::analytic(
        acc.clamp(0.0, 1.0),
        Method::GaussChebyshev { nodes: n },
    ))
}

pub fn avg_bler<F>(cdf: F, p: &PacketSpec, q: Quadrature) -> Result<BlerResult>
where
    F: Fn(f64) -> Result<f64>,
{
    match q {
        Quadrature::Riemann => avg_bler_riemann(cdf, p),
        Quadrature::GaussChebyshev(n) => avg_bler_gauss_chebyshev(cdf, p, n),
    }
}

/// Average BLERs of the three SIC stages at the near user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageBlers {
    /// Decoding the far-user stream.
    pub far: f64,
    /// Decoding the near user's own stream.
    pub near: f64,
    /// Decoding the backscatter stream.
    pub backscatter: f64,
}

impl StageBlers {
    /// Failure probability of the success chain F -> N -> C with independent stages.
    pub fn chain(&self) -> f64 {
        1.0 - (1.0 - self.far) * (1.0 - self.near) * (1.0 - self.backscatter)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearBler {
    pub total: BlerResult,
    pub stages: StageBlers,
}

/// End-to-end average BLER at the near user.
pub fn e2e_bler_near(sc: &Scenario, q: Quadrature) -> Result<NearBler> {
    let far = avg_bler(|u| cdf_g_f(u, User::Near, sc), &sc.packet_far, q)?.value;
    let near = avg_bler(|u| cdf_g_n(u, sc), &sc.packet_near, q)?.value;
    let backscatter = avg_bler(|u| cdf_g_c(u, sc), &sc.packet_backscatter, q)?.value;
    let stages = StageBlers {
        far,
        near,
        backscatter,
    };
    let cap = coeffs_for_user(User::Near, sc).cap();
    let value = match sc.config.theorem1_mode {
        Theorem1Mode::PaperLiteral if sc.packet_far.psi >= cap => {
            // Closed form without the first-stage factor: 1 + F2 F3 with
            // F2 = near - 1 and F3 = backscatter - 1.
            let raw = 1.0 + (near - 1.0) * (backscatter - 1.0);
            if sc.strict && raw > 1.0 + CLAMP_SLACK {
                return Err(Error::ClampExcursion {
                    quantity: "e2e_bler_near (paper-literal)",
                    raw,
                });
            }
            raw.clamp(0.0, 1.0)
        }
        _ => stages.chain(),
    };
    Ok(NearBler {
        total: BlerResult::analytic(value, q.method()),
        stages,
    })
}

/// End-to-end average BLER at the far user.
pub fn e2e_bler_far(sc: &Scenario, q: Quadrature) -> Result<BlerResult> {
    avg_bler(|u| cdf_g_f(u, User::Far, sc), &sc.packet_far, q)
}
