use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tvdlab::dual::{mu_search, tv_dual, DualTvParams, Sweep, Threshold};
use tvdlab::harness::{read_config, run_experiment, tables::write_atomic, write_table};
use tvdlab::shape::DEFAULT_QUAD_ORDER;
use tvdlab::{project_cell_averages, tv_anisotropic, tv_isotropic, Bounds, CellField, Grid, ShapeKind};

#[derive(Parser)]
#[command(name = "tvdlab", version, about = "Discrete total variation and TVD monitoring for DG runs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Project a shape onto cell averages and write the field file.
    Project {
        #[arg(long)]
        shape: ShapeKind,
        #[arg(long)]
        n: usize,
        /// x0,x1,y0,y1
        #[arg(long, value_parser = parse_domain, allow_hyphen_values = true)]
        domain: Bounds,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate one TV functional on a field file.
    Tv {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        feas_tol: Option<f64>,
        /// Relative duality-gap tolerance; off unless given.
        #[arg(long)]
        gap_tol: Option<f64>,
        #[arg(long, value_enum, default_value_t = SweepArg::Alternating)]
        sweep: SweepArg,
        #[arg(long, value_enum, default_value_t = ThresholdArg::Updated)]
        threshold: ThresholdArg,
        /// Write the per-iteration convergence trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Pick mu on a 0.05-style grid to match a reference TV.
    MuSearch {
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "ref")]
        reference: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long)]
        max_iter: Option<usize>,
    },
    /// Run an experiment described by a config file.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Output directory when the config does not set `out_dir`.
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// Regenerate one of the result tables as CSV.
    Tables {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=6))]
        which: u8,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Aniso,
    Iso,
    Dual,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepArg {
    Alternating,
    Jacobi,
}

#[derive(Clone, Copy, ValueEnum)]
enum ThresholdArg {
    Updated,
    Previous,
}

enum Outcome {
    Converged,
    Unconverged,
}

fn parse_domain(s: &str) -> Result<Bounds, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [x0, x1, y0, y1] => Ok(Bounds::new(x0, x1, y0, y1)),
        _ => Err(format!("expected x0,x1,y0,y1, got {} values", v.len())),
    }
}

fn dual_params(
    n: usize,
    mu: Option<f64>,
    gamma: Option<f64>,
    eps: Option<f64>,
    max_iter: Option<usize>,
) -> DualTvParams {
    let mut p = DualTvParams::for_grid(n);
    if let Some(m) = mu {
        p.mu = m;
    }
    if let Some(g) = gamma {
        p.gamma = g;
    }
    if let Some(e) = eps {
        p.epsilon = e;
    }
    if let Some(k) = max_iter {
        p.max_iter = k;
    }
    p
}

fn run(cmd: Cmd) -> tvdlab::Result<Outcome> {
    match cmd {
        Cmd::Project { shape, n, domain, out } => {
            let grid = Grid::new(n, domain)?;
            let field = project_cell_averages(&shape.default_spec(), &grid, DEFAULT_QUAD_ORDER)?;
            field.write_file(&out)?;
            println!("wrote {} ({n}x{n}, {shape})", out.display());
            Ok(Outcome::Converged)
        }
        Cmd::Tv {
            input,
            method,
            mu,
            gamma,
            eps,
            max_iter,
            feas_tol,
            gap_tol,
            sweep,
            threshold,
            trace,
        } => {
            let field = CellField::read_file(&input)?;
            match method {
                Method::Aniso => {
                    println!("tv_a={}", tv_anisotropic(&field));
                    Ok(Outcome::Converged)
                }
                Method::Iso => {
                    println!("tv_is={}", tv_isotropic(&field));
                    Ok(Outcome::Converged)
                }
                Method::Dual => {
                    let mut p = dual_params(field.n(), mu, gamma, eps, max_iter);
                    if let Some(f) = feas_tol {
                        p.feas_tol = f;
                    }
                    if let Some(g) = gap_tol {
                        p.gap_tol = g;
                    }
                    p.sweep = match sweep {
                        SweepArg::Alternating => Sweep::Alternating,
                        SweepArg::Jacobi => Sweep::Jacobi,
                    };
                    p.threshold = match threshold {
                        ThresholdArg::Updated => Threshold::Updated,
                        ThresholdArg::Previous => Threshold::PreviousIterate,
                    };
                    p.trace = trace.is_some();
                    let r = tv_dual(&field, &p)?;
                    if let Some(path) = trace {
                        let mut csv = String::from("iter,primal_norm,dual_objective,residual\n");
                        for t in &r.trace {
                            let _ = writeln!(
                                csv,
                                "{},{},{},{}",
                                t.iter, t.primal_norm, t.dual_objective, t.residual
                            );
                        }
                        write_atomic(&path, &csv)?;
                    }
                    println!("{}", r.summary_line());
                    Ok(if r.converged {
                        Outcome::Converged
                    } else {
                        Outcome::Unconverged
                    })
                }
            }
        }
        Cmd::MuSearch {
            input,
            reference,
            step,
            max_iter,
        } => {
            let field = CellField::read_file(&input)?;
            let base = dual_params(field.n(), None, None, None, max_iter);
            let r = mu_search(&field, reference, step, &base)?;
            for (mu, tv, conv) in &r.evaluations {
                println!("mu={mu:.4} tv_d={tv} converged={}", *conv as u8);
            }
            println!("best mu={} delta={:e}", r.mu, r.delta);
            Ok(if r.evaluations.iter().all(|e| e.2) {
                Outcome::Converged
            } else {
                Outcome::Unconverged
            })
        }
        Cmd::Solve { config, out_dir } => {
            let cfg = read_config(&config)?;
            let out = run_experiment(&cfg, &out_dir)?;
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            Ok(if out.all_converged {
                Outcome::Converged
            } else {
                Outcome::Unconverged
            })
        }
        Cmd::Tables { which, out_dir } => {
            let out = write_table(which as usize, &out_dir)?;
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            Ok(if out.all_converged {
                Outcome::Converged
            } else {
                Outcome::Unconverged
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(Outcome::Converged) => ExitCode::SUCCESS,
        Ok(Outcome::Unconverged) => {
            eprintln!("warning: at least one dual solve hit max_iter without converging");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
