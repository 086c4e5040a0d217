//! Per-user SINR coefficients, instantaneous SINRs, and the closed-form CDFs
//! of the three SINRs seen at the near user and the one seen at the far user.
//!
//! Notation used below, per user `m`:
//!
//! * `X = |h_hat_Rm(1)|^2 ~ Exp(omega_hat_Rm)`, `Y = |h_hat_Bm(1)|^2 ~ Exp(omega_hat_Bm)`,
//!   `Z = |h_RB|^2 ~ Exp(omega_RB)`;
//! * `A = r a_F`, `G = r a_N` with `r = rho^(2(t-1))` on the direct link;
//! * `C = r_B beta^2` and `D = Omega_xi beta^2` on the backscatter path.
//!
//! `g_F = A X g / (g (G X + Oxi + Z (C Y + D)) + 1)` is capped at `A / G`, so its
//! CDF is exactly one from there on.

use crate::channel::{ChannelDraw, Link};
use crate::config::{DTermMode, Scenario, CLAMP_SLACK};
use crate::specfun::{exp_times_k1, expint_e1_scaled};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum User {
    Near,
    Far,
}

impl User {
    pub fn direct_link(self) -> Link {
        match self {
            User::Near => Link::RsuNear,
            User::Far => Link::RsuFar,
        }
    }

    pub fn backscatter_link(self) -> Link {
        match self {
            User::Near => Link::BdNear,
            User::Far => Link::BdFar,
        }
    }
}

/// Coefficient group for one user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrCoeffs {
    pub a: f64,
    pub g: f64,
    pub c: f64,
    pub d: f64,
    /// Effective-noise variance of the RSU to user link.
    pub omega_xi_r: f64,
    pub beta: f64,
}

impl SinrCoeffs {
    /// SINR ceiling of the far-user stream, `A / G`.
    pub fn cap(&self) -> f64 {
        self.a / self.g
    }
}

/// Coefficients using the scenario's configured `D` convention.
pub fn coeffs_for_user(user: User, sc: &Scenario) -> SinrCoeffs {
    coeffs_with_mode(user, sc, sc.config.d_term_mode)
}

pub fn coeffs_with_mode(user: User, sc: &Scenario, mode: DTermMode) -> SinrCoeffs {
    let direct = sc.link(user.direct_link());
    let bd = sc.link(user.backscatter_link());
    let beta = sc.beta();
    let beta2 = beta * beta;
    let r = direct.retained_power();
    let d_noise = match (mode, user) {
        (DTermMode::AsPrinted, User::Near) => direct.omega_xi,
        _ => bd.omega_xi,
    };
    SinrCoeffs {
        a: r * sc.config.power.far,
        g: r * sc.config.power.near,
        c: bd.retained_power() * beta2,
        d: d_noise * beta2,
        omega_xi_r: direct.omega_xi,
        beta,
    }
}

/// Squared channel magnitudes entering one user's SINRs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gains {
    /// `|h_hat_Rm(1)|^2`
    pub direct: f64,
    /// `|h_hat_Bm(1)|^2`
    pub backscatter: f64,
    /// `|h_RB|^2`
    pub relay: f64,
}

/// SINRs of one trial. The far user only decodes its own stream, so `g_n`
/// and `g_c` are zero there.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SinrSample {
    pub g_f: f64,
    pub g_n: f64,
    pub g_c: f64,
}

/// Evaluates the SINR expressions for given gains and linear SNR `gamma`.
pub fn sinrs_from_gains(user: User, k: &SinrCoeffs, gains: &Gains, gamma: f64) -> SinrSample {
    let Gains {
        direct: x,
        backscatter: y,
        relay: z,
    } = *gains;
    let interference = k.omega_xi_r + z * (k.c * y + k.d);
    let g_f = k.a * x * gamma / (gamma * (k.g * x + interference) + 1.0);
    match user {
        User::Far => SinrSample {
            g_f,
            ..SinrSample::default()
        },
        User::Near => SinrSample {
            g_f,
            g_n: k.g * x * gamma / (gamma * interference + 1.0),
            g_c: z * y * k.c * gamma / (gamma * (k.omega_xi_r + z * k.d) + 1.0),
        },
    }
}

/// Channel draws keyed by link.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DrawSet {
    draws: [Option<ChannelDraw>; 5],
}

impl DrawSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, link: Link, draw: ChannelDraw) {
        self.draws[link.index()] = Some(draw);
    }

    pub fn get(&self, link: Link) -> Result<&ChannelDraw> {
        self.draws[link.index()]
            .as_ref()
            .ok_or(Error::MissingDraw(link.name()))
    }
}

/// Instantaneous SINRs of `user` for one set of channel draws.
pub fn instantaneous_sinrs(user: User, draws: &DrawSet, sc: &Scenario) -> Result<SinrSample> {
    let gains = Gains {
        direct: draws.get(user.direct_link())?.h_hat_1.norm_sqr(),
        backscatter: draws.get(user.backscatter_link())?.h_hat_1.norm_sqr(),
        relay: draws.get(Link::RsuBd)?.h_t.norm_sqr(),
    };
    Ok(sinrs_from_gains(
        user,
        &coeffs_for_user(user, sc),
        &gains,
        sc.gamma,
    ))
}

fn finish(raw: f64, strict: bool, quantity: &'static str) -> Result<f64> {
    if raw.is_nan() {
        return Err(Error::ClampExcursion { quantity, raw });
    }
    if strict && !(-CLAMP_SLACK..=1.0 + CLAMP_SLACK).contains(&raw) {
        return Err(Error::ClampExcursion { quantity, raw });
    }
    Ok(raw.clamp(0.0, 1.0))
}

fn check_u(u: f64, function: &'static str) -> Result<()> {
    if !(u >= 0.0) {
        return Err(Error::Domain {
            function,
            value: u,
            expected: "u >= 0",
        });
    }
    Ok(())
}

// Shared shape of the g_F and g_N distributions:
//   P(g > u) = E_Z[ exp(-c0 - u D Z / (omega_hat_R s)) / (1 + u C Z omega_hat_B / (s omega_hat_R)) ]
// with s the effective signal coefficient (A - uG, or G).
fn ratio_cdf(u: f64, signal: f64, k: &SinrCoeffs, sc: &Scenario, user: User) -> Result<f64> {
    let omega_r = sc.link(user.direct_link()).omega_hat;
    let omega_b = sc.link(user.backscatter_link()).omega_hat;
    let omega_rb = sc.link(Link::RsuBd).omega_hat;
    let gamma = sc.gamma;
    let denom = omega_r * signal;
    let noise_term = u * k.omega_xi_r / denom;
    let thermal_term = u / (denom * gamma);
    if k.c > 0.0 {
        let chi1 = denom / (u * omega_rb * omega_b * k.c);
        let chi2 = chi1 * (u * omega_rb * k.d / denom + 1.0);
        // exp(chi3) Ei(-chi2) = -exp(chi3 - chi2) [exp(chi2) E1(chi2)], with the
        // exponent difference taken directly to avoid cancellation.
        let offset = -(noise_term + thermal_term);
        Ok(1.0 - chi1 * libm::exp(offset) * expint_e1_scaled(chi2)?)
    } else {
        // No backscattered signal power: only the D term fluctuates with Z.
        let survive = libm::exp(-(noise_term + thermal_term)) / (1.0 + u * k.d * omega_rb / denom);
        Ok(1.0 - survive)
    }
}

/// CDF of the SINR with which `user` decodes the far-user stream.
pub fn cdf_g_f(u: f64, user: User, sc: &Scenario) -> Result<f64> {
    check_u(u, "cdf_g_f")?;
    let k = coeffs_for_user(user, sc);
    if k.a == 0.0 || u >= k.cap() {
        return Ok(1.0);
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    let raw = ratio_cdf(u, k.a - u * k.g, &k, sc, user)?;
    finish(raw, sc.strict, "cdf_g_f")
}

/// CDF of the SINR with which the near user decodes its own stream after SIC.
pub fn cdf_g_n(u: f64, sc: &Scenario) -> Result<f64> {
    check_u(u, "cdf_g_n")?;
    let k = coeffs_for_user(User::Near, sc);
    if k.g == 0.0 {
        return Ok(1.0);
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    let raw = ratio_cdf(u, k.g, &k, sc, User::Near)?;
    finish(raw, sc.strict, "cdf_g_n")
}

/// CDF of the SINR with which the near user decodes the backscatter stream.
pub fn cdf_g_c(u: f64, sc: &Scenario) -> Result<f64> {
    check_u(u, "cdf_g_c")?;
    let k = coeffs_for_user(User::Near, sc);
    if u == 0.0 {
        return Ok(0.0);
    }
    if k.c == 0.0 {
        return Ok(1.0);
    }
    let omega_b = sc.link(Link::BdNear).omega_hat;
    let omega_rb = sc.link(Link::RsuBd).omega_hat;
    let gamma = sc.gamma;
    let w1 =
        2.0 * libm::sqrt(u * (gamma * k.omega_xi_r + 1.0) / (omega_b * omega_rb * k.c * gamma));
    let w2 = u * k.d / (omega_b * k.c);
    let raw = 1.0 - w1 * exp_times_k1(-w2, w1)?;
    finish(raw, sc.strict, "cdf_g_c")
}

/// The four SINR random variables with a closed-form CDF.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SinrStream {
    /// Far-user stream decoded at the near user (first SIC stage).
    NearF,
    /// Near-user stream at the near user.
    NearN,
    /// Backscatter stream at the near user.
    NearC,
    /// Far-user stream at the far user.
    FarF,
}

impl SinrStream {
    pub const ALL: [SinrStream; 4] = [
        SinrStream::NearF,
        SinrStream::NearN,
        SinrStream::NearC,
        SinrStream::FarF,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SinrStream::NearF => "sF_N",
            SinrStream::NearN => "sN",
            SinrStream::NearC => "sC",
            SinrStream::FarF => "sF_F",
        }
    }

    pub fn user(self) -> User {
        match self {
            SinrStream::FarF => User::Far,
            _ => User::Near,
        }
    }

    pub fn pick(self, s: &SinrSample) -> f64 {
        match self {
            SinrStream::NearF | SinrStream::FarF => s.g_f,
            SinrStream::NearN => s.g_n,
            SinrStream::NearC => s.g_c,
        }
    }

    pub fn cdf(self, u: f64, sc: &Scenario) -> Result<f64> {
        match self {
            SinrStream::NearF => cdf_g_f(u, User::Near, sc),
            SinrStream::NearN => cdf_g_n(u, sc),
            SinrStream::NearC => cdf_g_c(u, sc),
            SinrStream::FarF => cdf_g_f(u, User::Far, sc),
        }
    }
}
