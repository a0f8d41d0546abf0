//! Experiment definitions, PDE runs with TV monitoring, and verdicts.

use std::fmt;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::dg::{cell_means, compute_dt, heun_step, project_dg, DGState, FluxModel};
use crate::dual::{default_mu, tv_dual, DualTvParams, EdgeVectorField, GradField};
use crate::error::{Error, Result};
use crate::grid::{Bounds, CellField, Grid};
use crate::limiter::{moment_limit, DEFAULT_ALPHA};
use crate::shape::ShapeSpec;
use crate::tv::{tv_anisotropic, tv_isotropic};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExperimentId {
    ConsistencyGaussian,
    IsotropyPulse,
    HillRotation,
    EllipseRotation,
    PulseRotation,
    Burgers,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 6] = [
        ExperimentId::ConsistencyGaussian,
        ExperimentId::IsotropyPulse,
        ExperimentId::HillRotation,
        ExperimentId::EllipseRotation,
        ExperimentId::PulseRotation,
        ExperimentId::Burgers,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::ConsistencyGaussian => "consistency_gaussian",
            ExperimentId::IsotropyPulse => "isotropy_pulse",
            ExperimentId::HillRotation => "hill_rotation",
            ExperimentId::EllipseRotation => "ellipse_rotation",
            ExperimentId::PulseRotation => "pulse_rotation",
            ExperimentId::Burgers => "burgers",
        }
    }

    /// Whether the experiment time-steps a PDE.
    pub fn is_pde(self) -> bool {
        !matches!(
            self,
            ExperimentId::ConsistencyGaussian | ExperimentId::IsotropyPulse
        )
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment '{s}'")))
    }
}

/// Snapshot times `k/128` for the rotating hill.
pub fn hill_snapshot_times() -> Vec<f64> {
    [0.0, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0]
        .iter()
        .map(|k| k / 128.0)
        .collect()
}

/// Snapshot times `2k/128` for the rotating pulse.
pub fn pulse_snapshot_times() -> Vec<f64> {
    (0..=8).map(|k| 2.0 * k as f64 / 128.0).collect()
}

pub fn burgers_snapshot_times() -> Vec<f64> {
    vec![0.0, 0.05, 0.1, 0.15, 0.1592, 0.17, 0.2, 0.25, 0.5]
}

/// When TV is evaluated during a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TvMonitor {
    /// No TV at all.
    Off,
    /// Only at snapshot times.
    Snapshots,
    /// Every step for the first 20, then every `k`-th step, plus snapshots.
    Stride(usize),
}

impl TvMonitor {
    fn wants(self, step: usize) -> bool {
        match self {
            TvMonitor::Off | TvMonitor::Snapshots => false,
            TvMonitor::Stride(k) => step <= 20 || step % k.max(1) == 0,
        }
    }
}

/// Everything needed to run one experiment at one resolution.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub experiment: ExperimentId,
    pub flux: FluxModel,
    pub shape: ShapeSpec,
    pub n: usize,
    pub domain: Bounds,
    pub cfl: f64,
    pub t_final: f64,
    pub limiter: bool,
    pub limiter_alpha: f64,
    pub monitor: TvMonitor,
    /// `None` picks the per-grid default.
    pub mu: Option<f64>,
    pub dual: DualTvParams,
    /// Reuse the previous dual solution as the starting point.
    pub warm_start: bool,
    pub snapshot_times: Vec<f64>,
    pub out_dir: Option<PathBuf>,
}

impl RunConfig {
    /// The standard setup of each experiment.
    pub fn for_experiment(id: ExperimentId) -> Self {
        let base = RunConfig {
            experiment: id,
            flux: FluxModel::Rotation,
            shape: ShapeSpec::cosine_hill(),
            n: 80,
            domain: Bounds::symmetric(1.0),
            cfl: 0.2,
            t_final: 0.125,
            limiter: true,
            limiter_alpha: DEFAULT_ALPHA,
            monitor: TvMonitor::Stride(10),
            mu: None,
            dual: DualTvParams::default(),
            warm_start: false,
            snapshot_times: Vec::new(),
            out_dir: None,
        };
        match id {
            ExperimentId::ConsistencyGaussian => RunConfig {
                shape: ShapeSpec::gaussian(),
                n: 20,
                ..base
            },
            ExperimentId::IsotropyPulse => RunConfig {
                shape: ShapeSpec::isotropy_pulse(),
                n: 20,
                domain: Bounds::symmetric(2.0),
                ..base
            },
            ExperimentId::HillRotation => RunConfig {
                snapshot_times: hill_snapshot_times(),
                ..base
            },
            ExperimentId::EllipseRotation => RunConfig {
                shape: ShapeSpec::elliptic_hill(),
                ..base
            },
            ExperimentId::PulseRotation => RunConfig {
                shape: ShapeSpec::rotation_pulse(),
                snapshot_times: pulse_snapshot_times(),
                ..base
            },
            ExperimentId::Burgers => RunConfig {
                flux: FluxModel::Burgers,
                shape: ShapeSpec::burgers_hill(),
                t_final: 0.5,
                snapshot_times: burgers_snapshot_times(),
                ..base
            },
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n, self.domain)
    }

    /// Dual solver parameters with `mu` resolved for this grid.
    pub fn dual_params(&self) -> DualTvParams {
        DualTvParams {
            mu: self.mu.unwrap_or_else(|| default_mu(self.n)),
            warm_start: None,
            ..self.dual.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return bad(format!("cfl must lie in (0, 1), got {}", self.cfl));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return bad(format!("t_final must be positive, got {}", self.t_final));
        }
        if !(self.limiter_alpha > 0.0 && self.limiter_alpha.is_finite()) {
            return bad(format!("limiter alpha must be positive, got {}", self.limiter_alpha));
        }
        if let TvMonitor::Stride(0) = self.monitor {
            return bad("tv stride must be positive".into());
        }
        self.shape.validate()?;
        self.dual_params().validate(self.n)?;
        self.grid()?;
        Ok(())
    }

    /// `key=value` lines describing the run.
    pub fn manifest(&self) -> String {
        let mut s = String::new();
        let p = self.dual_params();
        let _ = writeln!(s, "experiment={}", self.experiment);
        let _ = writeln!(s, "n={}", self.n);
        let b = self.domain;
        let _ = writeln!(s, "domain={},{},{},{}", b.xmin, b.xmax, b.ymin, b.ymax);
        let _ = writeln!(s, "flux={:?}", self.flux);
        let _ = writeln!(s, "shape={:?}", self.shape);
        let _ = writeln!(s, "cfl={}", self.cfl);
        let _ = writeln!(s, "t_final={}", self.t_final);
        let _ = writeln!(s, "limiter={}", self.limiter);
        let _ = writeln!(s, "limiter.alpha={}", self.limiter_alpha);
        let _ = writeln!(s, "tv.monitor={:?}", self.monitor);
        let _ = writeln!(s, "tv.mu={}", p.mu);
        let _ = writeln!(s, "tv.gamma={}", p.gamma);
        let _ = writeln!(s, "tv.epsilon={}", p.epsilon);
        let _ = writeln!(s, "tv.max_iter={}", p.max_iter);
        let _ = writeln!(s, "tv.feas_tol={}", p.feas_tol);
        let _ = writeln!(s, "tv.gap_tol={}", p.gap_tol);
        let _ = writeln!(s, "tv.warm_start={}", self.warm_start);
        s
    }
}

/// One row of a TV time series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TvRow {
    pub step: usize,
    pub t: f64,
    pub tv_a: f64,
    pub tv_is: f64,
    pub tv_d: f64,
    pub tv_d_iters: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TvTimeSeries {
    pub rows: Vec<TvRow>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TvColumn {
    Anisotropic,
    Isotropic,
    Dual,
}

impl TvRow {
    pub fn get(&self, c: TvColumn) -> f64 {
        match c {
            TvColumn::Anisotropic => self.tv_a,
            TvColumn::Isotropic => self.tv_is,
            TvColumn::Dual => self.tv_d,
        }
    }
}

impl TvTimeSeries {
    pub const HEADER: &'static str = "step,t,tv_a,tv_is,tv_d,tv_d_iters,converged";

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                r.step, r.t, r.tv_a, r.tv_is, r.tv_d, r.tv_d_iters, r.converged as u8
            );
        }
        s
    }

    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }

    /// Row recorded at time `t`, if any.
    pub fn at_time(&self, t: f64) -> Option<&TvRow> {
        self.rows.iter().find(|r| (r.t - t).abs() <= 1e-12)
    }

    /// Rows with `step <= max_step`.
    pub fn first_steps(&self, max_step: usize) -> TvTimeSeries {
        TvTimeSeries {
            rows: self.rows.iter().filter(|r| r.step <= max_step).copied().collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TvdVerdict {
    pub is_tvd: bool,
    /// `(step, increase)` of the first consecutive increase above the slack.
    pub first_violation: Option<(usize, f64)>,
}

/// TVD iff no consecutive increase in `column` exceeds `slack`.
pub fn tvd_verdict(series: &TvTimeSeries, column: TvColumn, slack: f64) -> TvdVerdict {
    let first_violation = series.rows.windows(2).find_map(|w| {
        let inc = w[1].get(column) - w[0].get(column);
        (inc > slack).then_some((w[1].step, inc))
    });
    TvdVerdict {
        is_tvd: first_violation.is_none(),
        first_violation,
    }
}

/// `log2(e_prev / e)` for consecutive entries; `n` must double each time.
pub fn convergence_rates(errors: &[(usize, f64)]) -> Result<Vec<f64>> {
    for w in errors.windows(2) {
        if w[1].0 != 2 * w[0].0 {
            return Err(Error::NonDoublingSequence {
                prev: w[0].0,
                next: w[1].0,
            });
        }
    }
    Ok(errors.windows(2).map(|w| (w[0].1 / w[1].1).log2()).collect())
}

/// Outcome of a PDE run.
#[derive(Clone, Debug)]
pub struct PdeRun {
    pub series: TvTimeSeries,
    /// Means at each snapshot time.
    pub snapshots: Vec<(f64, CellField)>,
    pub final_state: DGState,
    pub steps: usize,
    pub dt_first: f64,
    pub dt_min: f64,
}

impl PdeRun {
    /// Config manifest plus step statistics.
    pub fn manifest(&self, cfg: &RunConfig) -> String {
        let mut s = cfg.manifest();
        let _ = writeln!(s, "steps={}", self.steps);
        let _ = writeln!(s, "dt_first={}", self.dt_first);
        let _ = writeln!(s, "dt_min={}", self.dt_min);
        let _ = writeln!(s, "all_converged={}", self.series.all_converged());
        s
    }
}

struct Monitor {
    params: DualTvParams,
    warm: bool,
    last: Option<(GradField, EdgeVectorField)>,
}

impl Monitor {
    fn row(&mut self, state: &DGState, step: usize, t: f64) -> Result<TvRow> {
        let means = cell_means(state);
        let mut p = self.params.clone();
        if self.warm {
            p.warm_start = self.last.take();
        }
        let r = tv_dual(&means, &p)?;
        if self.warm {
            self.last = Some((r.v, r.phi));
        }
        Ok(TvRow {
            step,
            t,
            tv_a: tv_anisotropic(&means),
            tv_is: tv_isotropic(&means),
            tv_d: r.value,
            tv_d_iters: r.iterations,
            converged: r.converged,
        })
    }
}

/// Time-steps the configured problem to `t_final`.
///
/// Steps are shortened to land exactly on snapshot times. With the limiter
/// on, the projected initial state is limited too.
pub fn run_pde(cfg: &RunConfig) -> Result<PdeRun> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let alpha = cfg.limiter.then_some(cfg.limiter_alpha);
    let mut state = project_dg(&cfg.shape, &grid)?;
    if let Some(a) = alpha {
        state = moment_limit(&state, a);
    }
    let mut monitor = Monitor {
        params: cfg.dual_params(),
        warm: cfg.warm_start,
        last: None,
    };

    let mut targets: Vec<f64> = cfg
        .snapshot_times
        .iter()
        .copied()
        .filter(|&t| t > 0.0 && t < cfg.t_final)
        .collect();
    targets.push(cfg.t_final);
    targets.sort_by(f64::total_cmp);
    targets.dedup();
    let is_snapshot = |t: f64| cfg.snapshot_times.iter().any(|&s| (s - t).abs() <= 1e-12);

    let mut series = TvTimeSeries::default();
    let mut snapshots = Vec::new();
    if cfg.monitor != TvMonitor::Off {
        series.rows.push(monitor.row(&state, 0, 0.0)?);
    }
    if is_snapshot(0.0) {
        snapshots.push((0.0, cell_means(&state)));
    }

    let (mut t, mut step) = (0.0f64, 0usize);
    let (mut dt_first, mut dt_min) = (f64::NAN, f64::INFINITY);
    for &target in &targets {
        while t < target {
            let remaining = target - t;
            let dt = compute_dt(&state, &cfg.flux, cfg.cfl, remaining)?;
            state = heun_step(&state, &cfg.flux, dt, alpha)?;
            step += 1;
            // Snap onto the target when the step was cut to reach it.
            t = if dt >= remaining || target - (t + dt) <= 1e-12 * target {
                target
            } else {
                t + dt
            };
            if step == 1 {
                dt_first = dt;
            }
            dt_min = dt_min.min(dt);
            let snap = t == target && is_snapshot(t);
            let last = t == cfg.t_final;
            if cfg.monitor != TvMonitor::Off && (cfg.monitor.wants(step) || snap || last) {
                series.rows.push(monitor.row(&state, step, t)?);
            }
            if snap {
                snapshots.push((t, cell_means(&state)));
            }
        }
    }

    Ok(PdeRun {
        series,
        snapshots,
        final_state: state,
        steps: step,
        dt_first,
        dt_min,
    })
}

/// Runs the hill rotation for `n` with the limiter `on`/off and returns the
/// L1 error at `t_final`.
pub fn rotation_l1_error(n: usize, limiter: bool, t_final: f64, cfl: f64) -> Result<f64> {
    let cfg = RunConfig {
        n,
        limiter,
        cfl,
        t_final,
        monitor: TvMonitor::Off,
        snapshot_times: Vec::new(),
        ..RunConfig::for_experiment(ExperimentId::HillRotation)
    };
    let run = run_pde(&cfg)?;
    crate::dg::l1_error(&run.final_state, &cfg.shape, &cfg.flux, t_final)
}
