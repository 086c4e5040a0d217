//! Scenario description and its validated, resolved form.

use crate::channel::{Link, LinkStat, MobilityProfile};
use crate::fbl::PacketSpec;
use crate::{Error, Result};

/// Which effective-noise variance scales the backscatter noise term `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DTermMode {
    /// `D_m = Omega_xi(BD->m) * beta^2` for both users, as the signal model implies.
    #[default]
    DerivationConsistent,
    /// `D_N = Omega_xi(RSU->N) * beta^2`, `D_F = Omega_xi(BD->F) * beta^2`.
    AsPrinted,
}

/// How the near-user end-to-end error is formed when the first SIC stage
/// can never succeed (`psi_F >= A_N / G_N`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Theorem1Mode {
    /// Success-chain composition; a certain first-stage failure gives 1.
    #[default]
    Composition,
    /// The closed form `1 + F2 * F3`, clamped into [0, 1].
    PaperLiteral,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerAllocation {
    pub near: f64,
    pub far: f64,
}

impl PowerAllocation {
    /// Builds the split from the near-user share; the far user gets the rest.
    pub fn from_near(near: f64) -> Result<Self> {
        let p = Self {
            near,
            far: 1.0 - near,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.near > 0.0) {
            return Err(Error::invalid("a_N", "a_N > 0 violated"));
        }
        if !(self.far > self.near) {
            return Err(Error::invalid("a_N", "a_F > a_N violated"));
        }
        if (self.near + self.far - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("a_F", "a_N + a_F = 1 violated"));
        }
        Ok(())
    }
}

/// Per-link inputs: average power and the two error levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkInput {
    pub omega: f64,
    pub omega_e: f64,
    pub omega_eps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Links {
    pub rsu_near: LinkInput,
    pub rsu_far: LinkInput,
    /// Static link; only its power is configurable.
    pub rsu_bd: f64,
    pub bd_near: LinkInput,
    pub bd_far: LinkInput,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketInput {
    pub rate: f64,
    pub blocklength: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Packets {
    pub near: PacketInput,
    pub far: PacketInput,
    pub backscatter: PacketInput,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    pub power: PowerAllocation,
    pub mobility: MobilityProfile,
    pub links: Links,
    pub beta: f64,
    pub gamma_db: f64,
    pub packets: Packets,
    pub d_term_mode: DTermMode,
    pub theorem1_mode: Theorem1Mode,
}

impl Default for SystemConfig {
    fn default() -> Self {
        let err = 0.001;
        let link = |omega| LinkInput {
            omega,
            omega_e: err,
            omega_eps: err,
        };
        let packet = |rate| PacketInput {
            rate,
            blocklength: 500,
        };
        Self {
            power: PowerAllocation {
                near: 0.3,
                far: 0.7,
            },
            mobility: MobilityProfile {
                speed_kmh: 70.0,
                carrier_hz: 5.9e9,
                symbol_s: 0.2e-3,
                time_index: 2,
            },
            links: Links {
                rsu_near: link(20.0),
                rsu_far: link(5.0),
                rsu_bd: 1.0,
                bd_near: link(1.5),
                bd_far: link(0.5),
            },
            beta: 0.45,
            gamma_db: 10.0,
            packets: Packets {
                near: packet(0.1),
                far: packet(0.1),
                backscatter: packet(0.005),
            },
            d_term_mode: DTermMode::default(),
            theorem1_mode: Theorem1Mode::default(),
        }
    }
}

impl SystemConfig {
    /// Sets `Omega_e = Omega_eps = level` on every time-varying link.
    pub fn with_error_level(mut self, level: f64) -> Self {
        for l in [
            &mut self.links.rsu_near,
            &mut self.links.rsu_far,
            &mut self.links.bd_near,
            &mut self.links.bd_far,
        ] {
            l.omega_e = level;
            l.omega_eps = level;
        }
        self
    }

    pub fn with_blocklength(mut self, blocklength: u32) -> Self {
        self.packets.near.blocklength = blocklength;
        self.packets.far.blocklength = blocklength;
        self.packets.backscatter.blocklength = blocklength;
        self
    }

    pub fn validate(&self) -> Result<()> {
        Scenario::new(self).map(|_| ())
    }
}

/// A validated configuration with every derived quantity resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: SystemConfig,
    pub rho: f64,
    /// Linear transmit SNR.
    pub gamma: f64,
    stats: [LinkStat; 5],
    pub packet_near: PacketSpec,
    pub packet_far: PacketSpec,
    pub packet_backscatter: PacketSpec,
    /// Fail instead of clamping when a closed form leaves [0, 1] by more
    /// than [`CLAMP_SLACK`].
    pub strict: bool,
}

pub const CLAMP_SLACK: f64 = 1e-9;

fn link_stat(field: &'static str, input: &LinkInput, rho: f64, t: u32) -> Result<LinkStat> {
    LinkStat::new(input.omega, input.omega_e, input.omega_eps, rho, t).map_err(|e| match e {
        Error::Invalid { reason, .. } => Error::Invalid { field, reason },
        other => other,
    })
}

fn packet(field: &'static str, p: &PacketInput) -> Result<PacketSpec> {
    PacketSpec::new(p.rate, p.blocklength).map_err(|e| match e {
        Error::Invalid { reason, .. } => Error::Invalid { field, reason },
        other => other,
    })
}

impl Scenario {
    pub fn new(config: &SystemConfig) -> Result<Self> {
        config.power.validate()?;
        config.mobility.validate()?;
        if !(0.0..=1.0).contains(&config.beta) {
            return Err(Error::invalid(
                "beta",
                "reflection efficiency must lie in [0, 1]",
            ));
        }
        if !config.gamma_db.is_finite() {
            return Err(Error::invalid("gamma_db", "must be finite"));
        }
        let rho = config.mobility.correlation();
        let t = config.mobility.time_index;
        let l = &config.links;
        if !(l.rsu_bd > 0.0) || !l.rsu_bd.is_finite() {
            return Err(Error::invalid("omega_RB", "channel power must be > 0"));
        }
        let stats = [
            link_stat("RN link", &l.rsu_near, rho, t)?,
            link_stat("RF link", &l.rsu_far, rho, t)?,
            LinkStat::fixed(l.rsu_bd)?,
            link_stat("BN link", &l.bd_near, rho, t)?,
            link_stat("BF link", &l.bd_far, rho, t)?,
        ];
        Ok(Self {
            config: *config,
            rho,
            gamma: libm::pow(10.0, config.gamma_db / 10.0),
            stats,
            packet_near: packet("L_sN/R_sN", &config.packets.near)?,
            packet_far: packet("L_sF/R_sF", &config.packets.far)?,
            packet_backscatter: packet("L_sC/R_sC", &config.packets.backscatter)?,
            strict: false,
        })
    }

    pub fn with_strict(mut self, strict: bool) -> Self {
        self.strict = strict;
        self
    }

    pub fn link(&self, link: Link) -> &LinkStat {
        &self.stats[link.index()]
    }

    pub fn beta(&self) -> f64 {
        self.config.beta
    }

    /// Same scenario at a different transmit SNR.
    pub fn at_gamma_db(&self, gamma_db: f64) -> Result<Self> {
        let mut cfg = self.config;
        cfg.gamma_db = gamma_db;
        Ok(Self::new(&cfg)?.with_strict(self.strict))
    }
}
