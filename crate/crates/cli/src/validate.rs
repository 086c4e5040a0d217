//! Cross-validation of the analytic engines against Monte Carlo.
//!
//! For every SNR on the grid the report compares the midpoint and
//! Gauss-Chebyshev averages with the simulated BLERs, and the closed-form
//! SINR CDFs with empirical ones.

use crate::output::{fmt_opt_prob, fmt_prob, fmt_value};
use crate::sweep::{evaluate_point, Axis, Engine, EvalOptions, PointResult};
use crate::Result;
use ambc_noma::montecarlo::{empirical_cdfs, ChunkRunner, Scheme};
use ambc_noma::sinr::{coeffs_for_user, SinrStream};
use ambc_noma::{Scenario, SystemConfig};
use std::fmt::Write as _;
use std::io::Write;

pub const DEFAULT_GAMMAS_DB: [f64; 7] = [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0];
/// Analytic vs simulated end-to-end BLER: `max(10 % of MC, 5e-4)`.
pub const E2E_REL_TOL: f64 = 0.1;
pub const E2E_ABS_TOL: f64 = 5e-4;
/// Simulated BLERs below this are not compared.
pub const UNRESOLVABLE_BELOW: f64 = 1e-4;
pub const QUADRATURE_TOL: f64 = 5e-3;
pub const CDF_TOL: f64 = 0.005;
pub const CDF_GRID_POINTS: usize = 50;
const CDF_GRID_LO: f64 = 1e-4;
const CDF_GRID_HI: f64 = 1e2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Simulated value too small to compare.
    Exempt,
    /// Reported without a tolerance.
    Info,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Exempt => "EXEMPT",
            Verdict::Info => "INFO",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    BlerNear,
    BlerFar,
    StageFar,
    StageNear,
    StageBackscatter,
}

impl Quantity {
    pub const ALL: [Quantity; 5] = [
        Quantity::BlerNear,
        Quantity::BlerFar,
        Quantity::StageFar,
        Quantity::StageNear,
        Quantity::StageBackscatter,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::BlerNear => "bler_near",
            Quantity::BlerFar => "bler_far",
            Quantity::StageFar => "bler_near_stage_far",
            Quantity::StageNear => "bler_near_stage_near",
            Quantity::StageBackscatter => "bler_near_stage_backscatter",
        }
    }

    fn pick(self, r: &PointResult) -> f64 {
        match self {
            Quantity::BlerNear => r.bler_near,
            Quantity::BlerFar => r.bler_far,
            Quantity::StageFar => r.stage_far,
            Quantity::StageNear => r.stage_near,
            Quantity::StageBackscatter => r.stage_backscatter,
        }
    }

    fn is_end_to_end(self) -> bool {
        matches!(self, Quantity::BlerNear | Quantity::BlerFar)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlerCheck {
    pub gamma_db: f64,
    pub quantity: Quantity,
    pub riemann: f64,
    pub gauss_chebyshev: f64,
    pub monte_carlo: f64,
    pub mc_ci: Option<f64>,
    /// `|riemann - monte_carlo|`
    pub mc_gap: f64,
    pub mc_tolerance: Option<f64>,
    /// `|riemann - gauss_chebyshev|`
    pub quadrature_gap: f64,
    pub quadrature_tolerance: Option<f64>,
    pub verdict: Verdict,
}

impl BlerCheck {
    fn new(gamma_db: f64, quantity: Quantity, rows: &[PointResult; 3]) -> Self {
        let [r, gc, mc] = rows.map(|row| quantity.pick(&row));
        let mc_ci = match quantity {
            Quantity::BlerNear => rows[2].ci_near,
            Quantity::BlerFar => rows[2].ci_far,
            _ => None,
        };
        let mc_gap = (r - mc).abs();
        let quadrature_gap = (r - gc).abs();
        let mut check = Self {
            gamma_db,
            quantity,
            riemann: r,
            gauss_chebyshev: gc,
            monte_carlo: mc,
            mc_ci,
            mc_gap,
            mc_tolerance: None,
            quadrature_gap,
            quadrature_tolerance: None,
            verdict: Verdict::Info,
        };
        if quantity.is_end_to_end() {
            let tol = (E2E_REL_TOL * mc).max(E2E_ABS_TOL);
            check.mc_tolerance = Some(tol);
            check.quadrature_tolerance = Some(QUADRATURE_TOL);
            check.verdict = if quadrature_gap > QUADRATURE_TOL {
                Verdict::Fail
            } else if mc < UNRESOLVABLE_BELOW {
                Verdict::Exempt
            } else if mc_gap <= tol {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
        }
        check
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfCheck {
    pub gamma_db: f64,
    pub stream: SinrStream,
    pub sup_gap: f64,
    /// Grid point where the gap is largest.
    pub at: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub blers: Vec<BlerCheck>,
    pub cdfs: Vec<CdfCheck>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.blers.iter().all(|c| c.verdict != Verdict::Fail)
            && self.cdfs.iter().all(|c| c.verdict != Verdict::Fail)
    }

    pub fn failures(&self) -> usize {
        self.blers
            .iter()
            .map(|c| c.verdict)
            .chain(self.cdfs.iter().map(|c| c.verdict))
            .filter(|v| *v == Verdict::Fail)
            .count()
    }

    /// Human-readable tables.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:>8}  {:<28} {:>11} {:>11} {:>11} {:>10} {:>10}  verdict",
            "gamma_db", "quantity", "riemann", "gauss-cheb", "monte-carlo", "mc gap", "quad gap"
        );
        for c in &self.blers {
            let _ = writeln!(
                s,
                "{:>8.1}  {:<28} {:>11.4e} {:>11.4e} {:>11.4e} {:>10.2e} {:>10.2e}  {}",
                c.gamma_db,
                c.quantity.name(),
                c.riemann,
                c.gauss_chebyshev,
                c.monte_carlo,
                c.mc_gap,
                c.quadrature_gap,
                c.verdict.name()
            );
        }
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "{:>8}  {:<8} {:>10} {:>11}  verdict",
            "gamma_db", "stream", "sup gap", "at u"
        );
        for c in &self.cdfs {
            let _ = writeln!(
                s,
                "{:>8.1}  {:<8} {:>10.2e} {:>11.4e}  {}",
                c.gamma_db,
                c.stream.name(),
                c.sup_gap,
                c.at,
                c.verdict.name()
            );
        }
        let _ = writeln!(
            s,
            "\n{}: {} failing check(s)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.failures()
        );
        s
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "gamma_db",
            "quantity",
            "riemann",
            "gauss_chebyshev",
            "monte_carlo",
            "mc_ci",
            "mc_gap",
            "mc_tolerance",
            "quadrature_gap",
            "quadrature_tolerance",
            "verdict",
        ])?;
        let gammas = {
            let mut g: Vec<f64> = Vec::new();
            for v in self
                .blers
                .iter()
                .map(|c| c.gamma_db)
                .chain(self.cdfs.iter().map(|c| c.gamma_db))
            {
                if !g.contains(&v) {
                    g.push(v);
                }
            }
            g
        };
        for gamma in gammas {
            for c in self.blers.iter().filter(|c| c.gamma_db == gamma) {
                w.write_record([
                    fmt_value(c.gamma_db),
                    c.quantity.name().to_string(),
                    fmt_prob(c.riemann),
                    fmt_prob(c.gauss_chebyshev),
                    fmt_prob(c.monte_carlo),
                    fmt_opt_prob(c.mc_ci),
                    fmt_prob(c.mc_gap),
                    fmt_opt_prob(c.mc_tolerance),
                    fmt_prob(c.quadrature_gap),
                    fmt_opt_prob(c.quadrature_tolerance),
                    c.verdict.name().to_string(),
                ])?;
            }
            for c in self.cdfs.iter().filter(|c| c.gamma_db == gamma) {
                w.write_record([
                    fmt_value(c.gamma_db),
                    format!("cdf_{}", c.stream.name()),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    fmt_prob(c.sup_gap),
                    fmt_prob(CDF_TOL),
                    String::new(),
                    String::new(),
                    c.verdict.name().to_string(),
                ])?;
            }
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

/// Log-spaced SINR grid for a stream's CDF comparison. Far-stream grids end
/// at the SIC ceiling, where both CDFs reach one.
pub fn cdf_grid(stream: SinrStream, sc: &Scenario) -> Vec<f64> {
    let hi = match stream {
        SinrStream::NearF | SinrStream::FarF => coeffs_for_user(stream.user(), sc).cap(),
        SinrStream::NearN | SinrStream::NearC => CDF_GRID_HI,
    };
    let hi = if hi.is_finite() { hi } else { CDF_GRID_HI };
    let n = CDF_GRID_POINTS;
    (0..n)
        .map(|i| CDF_GRID_LO * (hi / CDF_GRID_LO).powf(i as f64 / (n - 1) as f64))
        .collect()
}

fn cdf_checks<R: ChunkRunner>(
    gamma_db: f64,
    sc: &Scenario,
    opts: &EvalOptions,
    runner: &R,
) -> Result<Vec<CdfCheck>> {
    let mut out = Vec::new();
    let groups = [
        [SinrStream::NearF, SinrStream::FarF],
        [SinrStream::NearN, SinrStream::NearC],
    ];
    for group in groups {
        let grid = cdf_grid(group[0], sc);
        debug_assert_eq!(grid, cdf_grid(group[1], sc));
        let empirical = empirical_cdfs(&group, &grid, sc, &opts.plan, runner)?;
        for (stream, mc) in group.into_iter().zip(empirical) {
            let mut sup_gap = 0.0f64;
            let mut at = grid[0];
            for (&u, m) in grid.iter().zip(&mc) {
                let gap = (stream.cdf(u, sc)? - m).abs();
                if gap > sup_gap {
                    sup_gap = gap;
                    at = u;
                }
            }
            out.push(CdfCheck {
                gamma_db,
                stream,
                sup_gap,
                at,
                verdict: if sup_gap <= CDF_TOL {
                    Verdict::Pass
                } else {
                    Verdict::Fail
                },
            });
        }
    }
    out.sort_by_key(|c| SinrStream::ALL.iter().position(|s| *s == c.stream));
    Ok(out)
}

/// Runs every comparison on the SNR grid. Monte Carlo always simulates the
/// NOMA scheme here, whatever the plan's scheme says.
pub fn validate<R: ChunkRunner>(
    config: &SystemConfig,
    gammas_db: &[f64],
    opts: &EvalOptions,
    runner: &R,
) -> Result<Report> {
    let mut opts = *opts;
    opts.plan.mode = Scheme::Noma;
    let mut report = Report::default();
    for &gamma_db in gammas_db {
        let point = Axis::GammaDb.apply(config, gamma_db);
        let ctx = |e: crate::CliError| e.context(format!("gamma_db = {gamma_db}"));
        let rows = [Engine::Riemann, Engine::GaussChebyshev, Engine::MonteCarlo]
            .map(|engine| evaluate_point(&point, engine, &opts, runner).map_err(ctx));
        let [a, b, c] = rows;
        let rows = [a?, b?, c?];
        report
            .blers
            .extend(Quantity::ALL.map(|q| BlerCheck::new(gamma_db, q, &rows)));
        let sc = Scenario::new(&point)?.with_strict(opts.strict);
        report
            .cdfs
            .extend(cdf_checks(gamma_db, &sc, &opts, runner).map_err(ctx)?);
    }
    Ok(report)
}
