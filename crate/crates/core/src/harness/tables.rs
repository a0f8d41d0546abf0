//! Table-shaped CSV output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::ConfigFile;
use super::experiment::{
    convergence_rates, rotation_l1_error, run_pde, ExperimentId, RunConfig, TvMonitor,
};
use crate::dual::{default_mu, tv_dual, DualTvParams};
use crate::error::{Error, Result};
use crate::grid::{Bounds, Grid};
use crate::shape::{project_cell_averages, ShapeSpec, DEFAULT_QUAD_ORDER};
use crate::tv::{gaussian_tv_exact, gaussian_tva_exact, tv_anisotropic, tv_isotropic};

pub const STATIC_NS: [usize; 4] = [20, 40, 80, 160];
pub const CONVERGENCE_NS: [usize; 4] = [40, 80, 160, 320];
pub const SNAPSHOT_NS: [usize; 3] = [40, 80, 160];

/// Writes through a temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Table1Row {
    pub n: usize,
    pub tv_a: f64,
    pub delta_tv_a: f64,
    pub tv_is: f64,
    pub delta_tv_is: f64,
    pub tv_d: f64,
    pub delta_tv_d: f64,
    pub mu: f64,
    pub converged: bool,
}

pub const TABLE1_HEADER: &str = "n,tv_a,delta_tv_a,tv_is,delta_tv_is,tv_d,delta_tv_d,mu,converged";

/// Gaussian on `[-1, 1]^2`: the three TVs and their distance to the
/// analytic values.
pub fn table1_row(n: usize, base: &DualTvParams, mu: Option<f64>) -> Result<Table1Row> {
    let spec = ShapeSpec::gaussian();
    let width = match spec {
        ShapeSpec::Gaussian { width, .. } => width,
        _ => unreachable!(),
    };
    let grid = Grid::new(n, Bounds::symmetric(1.0))?;
    let u = project_cell_averages(&spec, &grid, DEFAULT_QUAD_ORDER)?;
    let mu = mu.unwrap_or_else(|| default_mu(n));
    let r = tv_dual(&u, &DualTvParams { mu, ..base.clone() })?;
    let (tv_a, tv_is) = (tv_anisotropic(&u), tv_isotropic(&u));
    let exact = gaussian_tv_exact(width);
    Ok(Table1Row {
        n,
        tv_a,
        delta_tv_a: (tv_a - gaussian_tva_exact(width)).abs(),
        tv_is,
        delta_tv_is: (tv_is - exact).abs(),
        tv_d: r.value,
        delta_tv_d: (r.value - exact).abs(),
        mu,
        converged: r.converged,
    })
}

pub fn table1_csv(rows: &[Table1Row]) -> String {
    let mut s = format!("{TABLE1_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.n, r.tv_a, r.delta_tv_a, r.tv_is, r.delta_tv_is, r.tv_d, r.delta_tv_d, r.mu, r.converged as u8
        );
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Table2Row {
    pub n: usize,
    pub tv_a_u: f64,
    pub tv_a_v: f64,
    pub tv_is_u: f64,
    pub tv_is_v: f64,
    pub tv_d_u: f64,
    pub tv_d_v: f64,
    pub delta_tv_d: f64,
    pub converged: bool,
}

pub const TABLE2_HEADER: &str = "n,tv_a_u,tv_a_v,tv_is_u,tv_is_v,tv_d_u,tv_d_v,delta_tv_d,converged";

/// Unit pulse `U` and its pi/4 rotation `V` on `[-2, 2]^2`.
pub fn table2_row(n: usize, base: &DualTvParams, mu: Option<f64>) -> Result<Table2Row> {
    let grid = Grid::new(n, Bounds::symmetric(2.0))?;
    let u = project_cell_averages(&ShapeSpec::isotropy_pulse(), &grid, DEFAULT_QUAD_ORDER)?;
    let v = project_cell_averages(&ShapeSpec::isotropy_pulse_rotated(), &grid, DEFAULT_QUAD_ORDER)?;
    let p = DualTvParams {
        mu: mu.unwrap_or_else(|| default_mu(n)),
        ..base.clone()
    };
    let (du, dv) = rayon::join(|| tv_dual(&u, &p), || tv_dual(&v, &p));
    let (du, dv) = (du?, dv?);
    Ok(Table2Row {
        n,
        tv_a_u: tv_anisotropic(&u),
        tv_a_v: tv_anisotropic(&v),
        tv_is_u: tv_isotropic(&u),
        tv_is_v: tv_isotropic(&v),
        tv_d_u: du.value,
        tv_d_v: dv.value,
        delta_tv_d: (du.value - dv.value).abs(),
        converged: du.converged && dv.converged,
    })
}

pub fn table2_csv(rows: &[Table2Row]) -> String {
    let mut s = format!("{TABLE2_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.n, r.tv_a_u, r.tv_a_v, r.tv_is_u, r.tv_is_v, r.tv_d_u, r.tv_d_v, r.delta_tv_d, r.converged as u8
        );
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Table3Row {
    pub n: usize,
    pub l1_unlimited: f64,
    pub l1_limited: f64,
    pub rate_unlimited: Option<f64>,
    pub rate_limited: Option<f64>,
}

pub const TABLE3_HEADER: &str = "n,l1_unlimited,l1_limited,rate_unlimited,rate_limited";

/// L1 errors of the rotating hill at `t = 0.125`, with and without limiter.
pub fn table3_rows(ns: &[usize], cfl: f64) -> Result<Vec<Table3Row>> {
    let mut unl = Vec::new();
    let mut lim = Vec::new();
    for &n in ns {
        unl.push((n, rotation_l1_error(n, false, 0.125, cfl)?));
        lim.push((n, rotation_l1_error(n, true, 0.125, cfl)?));
    }
    let ru = convergence_rates(&unl)?;
    let rl = convergence_rates(&lim)?;
    Ok(ns
        .iter()
        .enumerate()
        .map(|(k, &n)| Table3Row {
            n,
            l1_unlimited: unl[k].1,
            l1_limited: lim[k].1,
            rate_unlimited: k.checked_sub(1).map(|p| ru[p]),
            rate_limited: k.checked_sub(1).map(|p| rl[p]),
        })
        .collect())
}

pub fn table3_csv(rows: &[Table3Row]) -> String {
    let opt = |r: Option<f64>| r.map(|x| x.to_string()).unwrap_or_default();
    let mut s = format!("{TABLE3_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.n,
            r.l1_unlimited,
            r.l1_limited,
            opt(r.rate_unlimited),
            opt(r.rate_limited)
        );
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnapshotRow {
    pub n: usize,
    pub t: f64,
    pub tv_a: f64,
    pub tv_is: f64,
    pub tv_d: f64,
    pub tv_d_iters: usize,
    pub converged: bool,
}

pub const SNAPSHOT_HEADER: &str = "n,t,tv_a,tv_is,tv_d,tv_d_iters,converged";

/// TVs at the snapshot times of `id` for each `n`.
pub fn snapshot_rows(id: ExperimentId, limiter: bool, ns: &[usize]) -> Result<Vec<SnapshotRow>> {
    let mut rows = Vec::new();
    for &n in ns {
        let cfg = RunConfig {
            n,
            limiter,
            monitor: TvMonitor::Snapshots,
            ..RunConfig::for_experiment(id)
        };
        let run = run_pde(&cfg)?;
        for r in &run.series.rows {
            rows.push(SnapshotRow {
                n,
                t: r.t,
                tv_a: r.tv_a,
                tv_is: r.tv_is,
                tv_d: r.tv_d,
                tv_d_iters: r.tv_d_iters,
                converged: r.converged,
            });
        }
    }
    Ok(rows)
}

pub fn snapshot_csv(rows: &[SnapshotRow]) -> String {
    let mut s = format!("{SNAPSHOT_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.n, r.t, r.tv_a, r.tv_is, r.tv_d, r.tv_d_iters, r.converged as u8
        );
    }
    s
}

/// Files written and whether every dual solve converged.
#[derive(Clone, Debug, Default)]
pub struct Output {
    pub files: Vec<PathBuf>,
    pub all_converged: bool,
}

/// Writes `table<which>.csv` into `out_dir`.
pub fn write_table(which: usize, out_dir: &Path) -> Result<Output> {
    fs::create_dir_all(out_dir)?;
    let base = DualTvParams::default();
    let (csv, all_converged) = match which {
        1 => {
            let rows = STATIC_NS
                .par_iter()
                .map(|&n| table1_row(n, &base, None))
                .collect::<Result<Vec<_>>>()?;
            (table1_csv(&rows), rows.iter().all(|r| r.converged))
        }
        2 => {
            let rows = STATIC_NS
                .par_iter()
                .map(|&n| table2_row(n, &base, None))
                .collect::<Result<Vec<_>>>()?;
            (table2_csv(&rows), rows.iter().all(|r| r.converged))
        }
        3 => (table3_csv(&table3_rows(&CONVERGENCE_NS, 0.2)?), true),
        4 | 5 | 6 => {
            let (id, limiter) = match which {
                4 => (ExperimentId::HillRotation, false),
                5 => (ExperimentId::PulseRotation, true),
                _ => (ExperimentId::Burgers, true),
            };
            let rows = snapshot_rows(id, limiter, &SNAPSHOT_NS)?;
            (snapshot_csv(&rows), rows.iter().all(|r| r.converged))
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "table number must be 1..6, got {other}"
            )))
        }
    };
    let path = out_dir.join(format!("table{which}.csv"));
    write_atomic(&path, &csv)?;
    Ok(Output {
        files: vec![path],
        all_converged,
    })
}

/// Runs a configured experiment and writes its outputs.
///
/// Stationary experiments write a table-shaped CSV (all standard
/// resolutions unless the config fixed `n`); PDE experiments write the TV
/// series, a manifest and snapshot fields.
pub fn run_experiment(cfg: &ConfigFile, default_out: &Path) -> Result<Output> {
    let run = &cfg.run;
    let out_dir = run.out_dir.clone().unwrap_or_else(|| default_out.to_path_buf());
    fs::create_dir_all(&out_dir)?;
    let ns: Vec<usize> = if cfg.n_given {
        vec![run.n]
    } else {
        STATIC_NS.to_vec()
    };
    let id = run.experiment;
    let mut out = Output {
        files: Vec::new(),
        all_converged: true,
    };
    match id {
        ExperimentId::ConsistencyGaussian => {
            let rows = ns
                .par_iter()
                .map(|&n| table1_row(n, &run.dual, run.mu))
                .collect::<Result<Vec<_>>>()?;
            out.all_converged = rows.iter().all(|r| r.converged);
            let path = out_dir.join(format!("{id}.csv"));
            write_atomic(&path, &table1_csv(&rows))?;
            out.files.push(path);
        }
        ExperimentId::IsotropyPulse => {
            let rows = ns
                .par_iter()
                .map(|&n| table2_row(n, &run.dual, run.mu))
                .collect::<Result<Vec<_>>>()?;
            out.all_converged = rows.iter().all(|r| r.converged);
            let path = out_dir.join(format!("{id}.csv"));
            write_atomic(&path, &table2_csv(&rows))?;
            out.files.push(path);
        }
        _ => {
            let pde = run_pde(run)?;
            let stem = format!("{id}_n{}", run.n);
            let series = out_dir.join(format!("{stem}_series.csv"));
            write_atomic(&series, &pde.series.to_csv())?;
            let manifest = out_dir.join(format!("{stem}_manifest.txt"));
            write_atomic(&manifest, &pde.manifest(run))?;
            out.files.extend([series, manifest]);
            if !pde.snapshots.is_empty() {
                let snap_dir = out_dir.join("snapshots");
                fs::create_dir_all(&snap_dir)?;
                for (t, field) in &pde.snapshots {
                    let p = snap_dir.join(format!("{stem}_t{t:.6}.txt"));
                    write_atomic(&p, &field.to_text())?;
                    out.files.push(p);
                }
            }
            out.all_converged = pde.series.all_converged();
        }
    }
    Ok(out)
}
