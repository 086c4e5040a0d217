//! Parameter sweeps over one configuration axis.

use crate::output::{fmt_opt_prob, fmt_prob, fmt_value};
use crate::{CliError, Result};
use ambc_noma::fbl::{e2e_bler_far, e2e_bler_near, Quadrature, DEFAULT_CHEBYSHEV_NODES};
use ambc_noma::montecarlo::{mc_average_bler, ChunkRunner, McPlan, Scheme};
use ambc_noma::sinr::User;
use ambc_noma::{Scenario, SystemConfig};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    GammaDb,
    Beta,
    Blocklength,
    Speed,
}

impl Axis {
    /// CSV header of the axis column, with its unit.
    pub fn column(self) -> &'static str {
        match self {
            Axis::GammaDb => "gamma_db",
            Axis::Beta => "beta",
            Axis::Blocklength => "blocklength_cu",
            Axis::Speed => "speed_kmh",
        }
    }

    /// `config` with this axis set to `value`.
    pub fn apply(self, config: &SystemConfig, value: f64) -> SystemConfig {
        let mut c = *config;
        match self {
            Axis::GammaDb => c.gamma_db = value,
            Axis::Beta => c.beta = value,
            Axis::Blocklength => c = c.with_blocklength(value as u32),
            Axis::Speed => c.mobility.speed_kmh = value,
        }
        c
    }

    /// Current value of this axis in `config`, if the axis is a single number.
    pub fn read(self, config: &SystemConfig) -> f64 {
        match self {
            Axis::GammaDb => config.gamma_db,
            Axis::Beta => config.beta,
            Axis::Blocklength => f64::from(config.packets.near.blocklength),
            Axis::Speed => config.mobility.speed_kmh,
        }
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "gamma_db" | "gamma" | "snr" => Ok(Axis::GammaDb),
            "beta" => Ok(Axis::Beta),
            "blocklength" | "L" => Ok(Axis::Blocklength),
            "speed" | "speed_kmh" => Ok(Axis::Speed),
            _ => Err(format!(
                "unknown axis `{s}` (expected gamma_db, beta, blocklength or speed)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Engine {
    Riemann,
    GaussChebyshev,
    MonteCarlo,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::Riemann, Engine::GaussChebyshev, Engine::MonteCarlo];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Riemann => "riemann",
            Engine::GaussChebyshev => "gauss-chebyshev",
            Engine::MonteCarlo => "monte-carlo",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "riemann" => Ok(Engine::Riemann),
            "gauss-chebyshev" | "gc" => Ok(Engine::GaussChebyshev),
            "monte-carlo" | "mc" => Ok(Engine::MonteCarlo),
            _ => Err(format!(
                "unknown engine `{s}` (expected riemann, gauss-chebyshev or monte-carlo)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<f64>,
    /// Deduplicated, in canonical engine order.
    pub engines: Vec<Engine>,
}

impl SweepSpec {
    pub fn new(axis: Axis, values: Vec<f64>, engines: &[Engine]) -> Result<Self> {
        if values.is_empty() {
            return Err(CliError::Usage("sweep needs at least one value".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(CliError::Usage(format!("sweep value {v} is not finite")));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Usage(
                "sweep values must be strictly ascending".into(),
            ));
        }
        if axis == Axis::Blocklength {
            if let Some(v) = values
                .iter()
                .find(|&&v| v.fract() != 0.0 || v <= 100.0 || v > f64::from(u32::MAX))
            {
                return Err(CliError::Usage(format!(
                    "blocklength values must be integers above 100 (got {v})"
                )));
            }
        }
        let mut engines = engines.to_vec();
        engines.sort();
        engines.dedup();
        if engines.is_empty() {
            return Err(CliError::Usage("at least one engine is required".into()));
        }
        Ok(Self {
            axis,
            values,
            engines,
        })
    }
}

/// Parses `a,b,c` or an inclusive range `start:step:stop`.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let bad = |t: &str| CliError::Usage(format!("cannot parse sweep value `{t}`"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad(t));
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, step, stop] => {
            let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
            if !(step > 0.0 && stop >= start) {
                return Err(CliError::Usage(format!(
                    "range `{text}` needs step > 0 and stop >= start"
                )));
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            if n > 1_000_000 {
                return Err(CliError::Usage(format!("range `{text}` is too long")));
            }
            Ok((0..=n).map(|i| start + i as f64 * step).collect())
        }
        [_] => text.split(',').map(num).collect(),
        _ => Err(bad(text)),
    }
}

pub fn parse_engines(text: &str) -> Result<Vec<Engine>> {
    text.split(',')
        .map(|s| s.trim().parse::<Engine>().map_err(CliError::Usage))
        .collect()
}

/// Settings shared by every evaluated point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub nodes: usize,
    pub strict: bool,
    pub plan: McPlan,
}

impl EvalOptions {
    pub fn new(plan: McPlan) -> Self {
        Self {
            nodes: DEFAULT_CHEBYSHEV_NODES,
            strict: false,
            plan,
        }
    }
}

/// One output row: both users' BLERs from one engine at one axis value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointResult {
    pub axis_value: f64,
    pub engine: Engine,
    pub scheme: Scheme,
    pub bler_near: f64,
    pub bler_far: f64,
    pub stage_far: f64,
    pub stage_near: f64,
    pub stage_backscatter: f64,
    pub trials: Option<u64>,
    pub ci_near: Option<f64>,
    pub ci_far: Option<f64>,
    /// Monte Carlo only: whether both BLERs are large enough to resolve.
    pub resolvable: Option<bool>,
}

fn scenario(config: &SystemConfig, opts: &EvalOptions) -> Result<Scenario> {
    Ok(Scenario::new(config)?.with_strict(opts.strict))
}

/// Evaluates one configuration with one engine. Analytic engines always
/// describe the NOMA scheme; the Monte Carlo engine follows the plan's scheme.
pub fn evaluate_point<R: ChunkRunner>(
    config: &SystemConfig,
    engine: Engine,
    opts: &EvalOptions,
    runner: &R,
) -> Result<PointResult> {
    let sc = scenario(config, opts)?;
    let blank = PointResult {
        axis_value: f64::NAN,
        engine,
        scheme: Scheme::Noma,
        bler_near: 0.0,
        bler_far: 0.0,
        stage_far: 0.0,
        stage_near: 0.0,
        stage_backscatter: 0.0,
        trials: None,
        ci_near: None,
        ci_far: None,
        resolvable: None,
    };
    let quadrature = match engine {
        Engine::Riemann => Quadrature::Riemann,
        Engine::GaussChebyshev => Quadrature::GaussChebyshev(opts.nodes),
        Engine::MonteCarlo => {
            let near = mc_average_bler(User::Near, &sc, &opts.plan, runner)?;
            let far = mc_average_bler(User::Far, &sc, &opts.plan, runner)?;
            let stages = near.stages.expect("near-user result carries stages");
            return Ok(PointResult {
                scheme: opts.plan.mode,
                bler_near: near.total.value,
                bler_far: far.total.value,
                stage_far: stages.far,
                stage_near: stages.near,
                stage_backscatter: stages.backscatter,
                trials: Some(opts.plan.trials),
                ci_near: near.total.ci_halfwidth,
                ci_far: far.total.ci_halfwidth,
                resolvable: Some(near.total.resolvable() && far.total.resolvable()),
                ..blank
            });
        }
    };
    let near = e2e_bler_near(&sc, quadrature)?;
    let far = e2e_bler_far(&sc, quadrature)?;
    Ok(PointResult {
        bler_near: near.total.value,
        bler_far: far.value,
        stage_far: near.stages.far,
        stage_near: near.stages.near,
        stage_backscatter: near.stages.backscatter,
        ..blank
    })
}

/// Rows ordered by axis value, then engine.
pub fn run_sweep<R: ChunkRunner>(
    config: &SystemConfig,
    sweep: &SweepSpec,
    opts: &EvalOptions,
    runner: &R,
) -> Result<Vec<PointResult>> {
    let mut rows = Vec::with_capacity(sweep.values.len() * sweep.engines.len());
    for &value in &sweep.values {
        let point = sweep.axis.apply(config, value);
        for &engine in &sweep.engines {
            let mut row = evaluate_point(&point, engine, opts, runner)
                .map_err(|e| e.context(format!("{} = {}", sweep.axis.column(), value)))?;
            row.axis_value = value;
            rows.push(row);
        }
    }
    Ok(rows)
}

pub const SWEEP_COLUMNS: [&str; 11] = [
    "engine",
    "scheme",
    "bler_near",
    "bler_far",
    "bler_near_stage_far",
    "bler_near_stage_near",
    "bler_near_stage_backscatter",
    "trials",
    "ci_near",
    "ci_far",
    "mc_resolvable",
];

fn scheme_name(s: Scheme) -> &'static str {
    match s {
        Scheme::Noma => "noma",
        Scheme::Oma => "oma",
    }
}

pub fn write_sweep_csv<W: Write>(out: W, axis: Axis, rows: &[PointResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![axis.column()];
    header.extend(SWEEP_COLUMNS);
    w.write_record(&header)?;
    for r in rows {
        w.write_record([
            fmt_value(r.axis_value),
            r.engine.name().to_string(),
            scheme_name(r.scheme).to_string(),
            fmt_prob(r.bler_near),
            fmt_prob(r.bler_far),
            fmt_prob(r.stage_far),
            fmt_prob(r.stage_near),
            fmt_prob(r.stage_backscatter),
            r.trials.map(|n| n.to_string()).unwrap_or_default(),
            fmt_opt_prob(r.ci_near),
            fmt_opt_prob(r.ci_far),
            r.resolvable.map(|b| b.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
