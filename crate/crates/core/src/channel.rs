//! Mobility, time-selective correlation and estimation-error statistics, plus
//! the counter-based channel sampler used by the Monte Carlo engine.
//!
//! A link observed at time instant `t` after a single MMSE estimate at `t = 1`
//! is `h(t) = rho^(t-1) * h_hat(1) + xi`, where `xi` lumps the outdated-estimate
//! error and the AR(1) innovation accumulated since the estimate. Only the
//! variance of `xi` matters for the SINR formulas, so the per-step innovations
//! are never simulated.

use crate::specfun::bessel_j0;
use crate::{Error, Result};
use core::f64::consts::PI;
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 2.998e8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilityProfile {
    /// Vehicle speed in km/h.
    pub speed_kmh: f64,
    pub carrier_hz: f64,
    pub symbol_s: f64,
    /// Time-instant index `t >= 1`; the estimate is taken at `t = 1`.
    pub time_index: u32,
}

impl MobilityProfile {
    pub fn new(speed_kmh: f64, carrier_hz: f64, symbol_s: f64, time_index: u32) -> Result<Self> {
        let m = Self {
            speed_kmh,
            carrier_hz,
            symbol_s,
            time_index,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.speed_kmh >= 0.0) || !self.speed_kmh.is_finite() {
            return Err(Error::invalid("speed", "must be finite and >= 0"));
        }
        if !(self.carrier_hz > 0.0) || !self.carrier_hz.is_finite() {
            return Err(Error::invalid("carrier_hz", "must be > 0"));
        }
        if !(self.symbol_s > 0.0) || !self.symbol_s.is_finite() {
            return Err(Error::invalid("symbol_s", "must be > 0"));
        }
        if self.time_index < 1 {
            return Err(Error::invalid("t", "time index must be >= 1"));
        }
        Ok(())
    }

    /// Maximum Doppler shift `f_c v / c` in Hz, with `v` converted from km/h.
    pub fn doppler_shift(&self) -> f64 {
        self.carrier_hz * (self.speed_kmh / 3.6) / SPEED_OF_LIGHT
    }

    /// Jakes correlation `J0(2 pi f_D T_s)` between consecutive symbols.
    pub fn correlation(&self) -> f64 {
        let arg = 2.0 * PI * self.doppler_shift() * self.symbol_s;
        // The argument is finite for any validated profile.
        bessel_j0(arg).unwrap_or(f64::NAN)
    }
}

/// `rho^(2(t-1))`, the fraction of channel power still explained by the
/// estimate at instant `t`.
pub fn retained_power(rho: f64, t: u32) -> f64 {
    libm::pow(rho, 2.0 * f64::from(t - 1))
}

/// `Omega_xi = (1 - rho^(2(t-1))) Omega_e + rho^(2(t-1)) Omega_eps`.
pub fn effective_noise_variance(omega_e: f64, omega_eps: f64, rho: f64, t: u32) -> f64 {
    let r = retained_power(rho, t);
    (1.0 - r) * omega_e + r * omega_eps
}

/// Second-order statistics of one link at a given time instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkStat {
    pub omega: f64,
    pub omega_e: f64,
    pub omega_eps: f64,
    pub rho: f64,
    /// Variance of the MMSE estimate, `omega - omega_eps`.
    pub omega_hat: f64,
    pub omega_xi: f64,
    pub time_index: u32,
}

impl LinkStat {
    pub fn new(omega: f64, omega_e: f64, omega_eps: f64, rho: f64, t: u32) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::invalid("omega", "channel power must be > 0"));
        }
        if !(omega_e >= 0.0) || !omega_e.is_finite() {
            return Err(Error::invalid("omega_e", "must be >= 0"));
        }
        if !(omega_eps >= 0.0) || !(omega_eps < omega) {
            return Err(Error::invalid(
                "omega_eps",
                "estimation-error variance must satisfy 0 <= omega_eps < omega",
            ));
        }
        if !(rho.abs() <= 1.0) {
            return Err(Error::invalid("rho", "correlation must lie in [-1, 1]"));
        }
        if t < 1 {
            return Err(Error::invalid("t", "time index must be >= 1"));
        }
        Ok(Self {
            omega,
            omega_e,
            omega_eps,
            rho,
            omega_hat: omega - omega_eps,
            omega_xi: effective_noise_variance(omega_e, omega_eps, rho, t),
            time_index: t,
        })
    }

    /// A link that never changes and is known exactly (the RSU to BD hop).
    pub fn fixed(omega: f64) -> Result<Self> {
        Self::new(omega, 0.0, 0.0, 1.0, 1)
    }

    pub fn effective_noise_variance(&self, t: u32) -> f64 {
        effective_noise_variance(self.omega_e, self.omega_eps, self.rho, t)
    }

    /// `rho^(2(t-1))` at this link's time instant.
    pub fn retained_power(&self) -> f64 {
        retained_power(self.rho, self.time_index)
    }
}

/// One realization of a link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDraw {
    pub h_hat_1: Complex64,
    pub xi: Complex64,
    pub h_t: Complex64,
}

impl ChannelDraw {
    pub fn compose(h_hat_1: Complex64, xi: Complex64, rho: f64, t: u32) -> Self {
        let scale = libm::pow(rho, f64::from(t - 1));
        Self {
            h_hat_1,
            xi,
            h_t: h_hat_1 * scale + xi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Link {
    RsuNear,
    RsuFar,
    RsuBd,
    BdNear,
    BdFar,
}

impl Link {
    pub const ALL: [Link; 5] = [
        Link::RsuNear,
        Link::RsuFar,
        Link::RsuBd,
        Link::BdNear,
        Link::BdFar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Link::RsuNear => "RN",
            Link::RsuFar => "RF",
            Link::RsuBd => "RB",
            Link::BdNear => "BN",
            Link::BdFar => "BF",
        }
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

// 64 bytes of keystream per (link, trial): two complex normals need 4 words.
const WORDS_PER_TRIAL: u128 = 16;

/// Deterministic random stream addressed by `(seed, link, trial)`.
///
/// Every draw is a pure function of its address, so trials can be handed to
/// any number of workers in any order without changing results.
#[derive(Debug, Clone)]
pub struct ChannelStream {
    base: ChaCha8Rng,
}

impl ChannelStream {
    pub fn new(seed: u64) -> Self {
        Self {
            base: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform words for an arbitrary `(stream, trial)` address.
    pub fn words(&self, stream: u64, trial: u64) -> [u64; 4] {
        let mut rng = self.base.clone();
        rng.set_stream(stream);
        rng.set_word_pos(u128::from(trial) * WORDS_PER_TRIAL);
        [
            rng.next_u64(),
            rng.next_u64(),
            rng.next_u64(),
            rng.next_u64(),
        ]
    }

    /// Draws `h_hat(1) ~ CN(0, omega_hat)` and `xi ~ CN(0, omega_xi)`.
    pub fn sample_channel(&self, link: Link, trial: u64, stat: &LinkStat) -> ChannelDraw {
        let w = self.words(link.index() as u64, trial);
        let h_hat = unit_complex_normal(w[0], w[1]) * libm::sqrt(stat.omega_hat);
        let xi = unit_complex_normal(w[2], w[3]) * libm::sqrt(stat.omega_xi);
        ChannelDraw::compose(h_hat, xi, stat.rho, stat.time_index)
    }
}

/// Maps 64 random bits to the open interval (0, 1).
pub fn open_unit(word: u64) -> f64 {
    ((word >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

// Box-Muller: |z|^2 = -ln u1 is exactly Exp(1), the phase is uniform.
fn unit_complex_normal(w1: u64, w2: u64) -> Complex64 {
    let r = libm::sqrt(-libm::log(open_unit(w1)));
    let theta = 2.0 * PI * open_unit(w2);
    Complex64::new(r * libm::cos(theta), r * libm::sin(theta))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v2x(speed: f64) -> MobilityProfile {
        MobilityProfile::new(speed, 5.9e9, 2e-4, 2).unwrap()
    }

    #[test]
    fn doppler() {
        assert_eq!(v2x(0.0).doppler_shift(), 0.0);
        assert!((v2x(70.0).doppler_shift() - 382.7).abs() < 0.05);
        assert_eq!(v2x(140.0).doppler_shift(), 2.0 * v2x(70.0).doppler_shift());
    }

    #[test]
    fn correlation() {
        assert_eq!(v2x(0.0).correlation(), 1.0);
        assert!((v2x(70.0).correlation() - 0.943_02).abs() < 5e-6);
        for v in 0..=500 {
            assert!(v2x(v as f64).correlation().abs() <= 1.0);
        }
    }

    #[test]
    fn profile_validation() {
        assert!(MobilityProfile::new(-1.0, 5.9e9, 2e-4, 2).is_err());
        assert!(MobilityProfile::new(1.0, 0.0, 2e-4, 2).is_err());
        assert!(MobilityProfile::new(1.0, 5.9e9, 0.0, 2).is_err());
        assert!(MobilityProfile::new(1.0, 5.9e9, 2e-4, 0).is_err());
    }

    #[test]
    fn effective_noise() {
        assert_eq!(effective_noise_variance(0.01, 0.001, 0.9427, 1), 0.001);
        for t in 1..20 {
            let v = effective_noise_variance(0.001, 0.001, 0.9427, t);
            assert!((v - 0.001).abs() < 1e-18);
        }
        let r2 = 0.9427f64 * 0.9427;
        let expected = (1.0 - r2) * 0.01 + r2 * 0.001;
        let v = effective_noise_variance(0.01, 0.001, 0.9427, 2);
        assert!((v - expected).abs() < 1e-15);
        assert!((v - 0.0020).abs() < 1e-4);
        // Long after the estimate only the innovation remains.
        let late = effective_noise_variance(0.01, 0.001, 0.9427, 2000);
        assert!((late - 0.01).abs() < 1e-12);
    }

    #[test]
    fn link_stat_rejects_error_above_power() {
        assert!(LinkStat::new(1.0, 0.0, 1.0, 0.9, 2).is_err());
        assert!(LinkStat::new(0.0, 0.0, 0.0, 0.9, 2).is_err());
        assert!(LinkStat::new(1.0, 0.0, 0.1, 1.5, 2).is_err());
        let s = LinkStat::new(20.0, 0.001, 0.001, 0.9427, 2).unwrap();
        assert_eq!(s.omega_hat, 20.0 - 0.001);
        let rb = LinkStat::fixed(1.0).unwrap();
        assert_eq!((rb.omega_hat, rb.omega_xi, rb.rho), (1.0, 0.0, 1.0));
    }

    #[test]
    fn zero_noise_draw_is_scaled_estimate() {
        let stat = LinkStat::new(2.0, 0.0, 0.0, 0.8, 3).unwrap();
        let stream = ChannelStream::new(7);
        for trial in 0..100 {
            let d = stream.sample_channel(Link::RsuNear, trial, &stat);
            assert_eq!(d.xi, Complex64::new(0.0, 0.0));
            assert_eq!(d.h_t, d.h_hat_1 * (0.8f64 * 0.8));
        }
    }

    #[test]
    fn draws_are_addressable() {
        let stat = LinkStat::new(2.0, 0.01, 0.01, 0.9, 2).unwrap();
        let a = ChannelStream::new(11);
        let b = ChannelStream::new(11);
        let forward: alloc::vec::Vec<_> = (0..50)
            .map(|i| a.sample_channel(Link::BdFar, i, &stat))
            .collect();
        for i in (0..50).rev() {
            assert_eq!(b.sample_channel(Link::BdFar, i, &stat), forward[i as usize]);
        }
        assert_ne!(
            a.sample_channel(Link::BdNear, 3, &stat),
            a.sample_channel(Link::BdFar, 3, &stat)
        );
    }
}
