//! Degree-one tensor-product DG on square cells.
//!
//! On the reference square `xi, eta in [-1, 1]` the solution is
//! `c00 + c10 xi + c01 eta + c11 xi eta`; the basis is orthogonal with mass
//! `diag(4, 4/3, 4/3, 4/9)`, so `c00` is the cell mean.

use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{CellField, Grid};
use crate::limiter::moment_limit;
use crate::quadrature::GaussLegendre;
use crate::shape::ShapeSpec;

/// Reference mass matrix diagonal.
pub const REF_MASS: [f64; 4] = [4.0, 4.0 / 3.0, 4.0 / 3.0, 4.0 / 9.0];

/// Modal coefficients `[c00, c10, c01, c11]` per cell, row-major like
/// [`CellField`].
#[derive(Clone, Debug, PartialEq)]
pub struct DGState {
    grid: Grid,
    pub coeffs: Vec<[f64; 4]>,
}

#[inline]
fn basis(xi: f64, eta: f64) -> [f64; 4] {
    [1.0, xi, eta, xi * eta]
}

#[inline]
fn eval(c: &[f64; 4], xi: f64, eta: f64) -> f64 {
    c[0] + c[1] * xi + c[2] * eta + c[3] * xi * eta
}

impl DGState {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![[0.0; 4]; grid.num_cells()],
        }
    }

    pub fn from_coeffs(grid: Grid, coeffs: Vec<[f64; 4]>) -> Result<Self> {
        if coeffs.len() != grid.num_cells() {
            return Err(Error::FieldSize {
                expected: grid.num_cells(),
                got: coeffs.len(),
            });
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn cell(&self, i: usize, j: usize) -> &[f64; 4] {
        &self.coeffs[self.grid.idx(i, j)]
    }

    /// Value of the cell polynomial at reference coordinates.
    pub fn eval_ref(&self, i: usize, j: usize, xi: f64, eta: f64) -> f64 {
        eval(self.cell(i, j), xi, eta)
    }

    /// `s + c r`.
    pub fn axpy(&self, c: f64, r: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&r.coeffs)
            .map(|(a, b)| std::array::from_fn(|m| a[m] + c * b[m]))
            .collect();
        Self {
            grid: self.grid,
            coeffs,
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|a| a.map(|x| c * x)).collect(),
        }
    }

    /// `sum c00 * dx^2`.
    pub fn mass(&self) -> f64 {
        let dx = self.grid.dx();
        self.coeffs.iter().map(|c| c[0]).sum::<f64>() * dx * dx
    }
}

/// Flux of the scalar law `u_t + f(u)_x + g(u)_y = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FluxModel {
    /// Solid-body rotation `a = (-2 pi y, 2 pi x)`, one turn per unit time.
    Rotation,
    /// The saddle field `a = (2 pi x, -2 pi y)`. Comparison only.
    Saddle,
    /// Constant velocity.
    Uniform { ax: f64, ay: f64 },
    /// `f = g = u^2 / 2`.
    Burgers,
}

impl FluxModel {
    /// Velocity of the linear models; `None` for Burgers.
    #[inline]
    pub fn velocity(&self, x: f64, y: f64) -> Option<(f64, f64)> {
        match *self {
            FluxModel::Rotation => Some((-TAU * y, TAU * x)),
            FluxModel::Saddle => Some((TAU * x, -TAU * y)),
            FluxModel::Uniform { ax, ay } => Some((ax, ay)),
            FluxModel::Burgers => None,
        }
    }

    #[inline]
    fn physical(&self, x: f64, y: f64, u: f64) -> (f64, f64) {
        match self.velocity(x, y) {
            Some((a1, a2)) => (a1 * u, a2 * u),
            None => (0.5 * u * u, 0.5 * u * u),
        }
    }

    /// Numerical flux through an edge with unit normal along axis `dir`
    /// (0 = x, 1 = y), from state `um` (behind) to `up` (ahead).
    #[inline]
    fn numerical(&self, x: f64, y: f64, dir: usize, um: f64, up: f64) -> f64 {
        match self.velocity(x, y) {
            Some(a) => {
                let an = if dir == 0 { a.0 } else { a.1 };
                if an >= 0.0 {
                    an * um
                } else {
                    an * up
                }
            }
            None => 0.25 * (um * um + up * up) - 0.5 * um.abs().max(up.abs()) * (up - um),
        }
    }
}

/// L2 projection onto the cell basis with `quad_order` Gauss points per
/// direction.
pub fn project_dg_with(spec: &ShapeSpec, grid: &Grid, quad_order: usize) -> Result<DGState> {
    spec.validate()?;
    let q = GaussLegendre::new(quad_order.max(1));
    let n = grid.n();
    let h = 0.5 * grid.dx();
    let coeffs = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (xc, yc) = grid.center(k / n, k % n);
            let mut acc = [0.0; 4];
            for (xi, wx) in q.nodes.iter().zip(&q.weights) {
                for (eta, wy) in q.nodes.iter().zip(&q.weights) {
                    let u = spec.eval(xc + h * xi, yc + h * eta);
                    let b = basis(*xi, *eta);
                    for m in 0..4 {
                        acc[m] += wx * wy * u * b[m];
                    }
                }
            }
            std::array::from_fn(|m| acc[m] / REF_MASS[m])
        })
        .collect();
    Ok(DGState {
        grid: *grid,
        coeffs,
    })
}

/// [`project_dg_with`] using a 4x4 rule.
pub fn project_dg(spec: &ShapeSpec, grid: &Grid) -> Result<DGState> {
    project_dg_with(spec, grid, 4)
}

/// Weak-form right-hand side `du/dt` in modal coefficients.
///
/// Volume terms use a 2x2 Gauss rule, edges a 2-point rule. Boundary edges
/// take the exterior trace equal to the interior one.
pub fn spatial_residual(state: &DGState, flux: &FluxModel) -> Result<DGState> {
    let grid = state.grid;
    let n = grid.n();
    let dx = grid.dx();
    let h = 0.5 * dx;
    let g = 1.0 / 3f64.sqrt();
    let pts = [-g, g];

    let rates: Vec<[f64; 4]> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / n, k % n);
            let c = state.cell(i, j);
            let (xc, yc) = grid.center(i, j);
            let mut acc = [0.0; 4];

            for &xi in &pts {
                for &eta in &pts {
                    let u = eval(c, xi, eta);
                    let (f, gg) = flux.physical(xc + h * xi, yc + h * eta, u);
                    acc[1] += f;
                    acc[2] += gg;
                    acc[3] += f * eta + gg * xi;
                }
            }

            // Right (xi = 1) and left (xi = -1) edges, flux along +x.
            for &s in &pts {
                let y = yc + h * s;
                let here_r = eval(c, 1.0, s);
                let there_r = if i + 1 < n {
                    state.eval_ref(i + 1, j, -1.0, s)
                } else {
                    here_r
                };
                let fr = flux.numerical(xc + h, y, 0, here_r, there_r);
                let here_l = eval(c, -1.0, s);
                let there_l = if i > 0 {
                    state.eval_ref(i - 1, j, 1.0, s)
                } else {
                    here_l
                };
                let fl = flux.numerical(xc - h, y, 0, there_l, here_l);
                let (br, bl) = (basis(1.0, s), basis(-1.0, s));
                for m in 0..4 {
                    acc[m] -= fr * br[m] - fl * bl[m];
                }
            }

            // Top (eta = 1) and bottom (eta = -1) edges, flux along +y.
            for &s in &pts {
                let x = xc + h * s;
                let here_t = eval(c, s, 1.0);
                let there_t = if j + 1 < n {
                    state.eval_ref(i, j + 1, s, -1.0)
                } else {
                    here_t
                };
                let ft = flux.numerical(x, yc + h, 1, here_t, there_t);
                let here_b = eval(c, s, -1.0);
                let there_b = if j > 0 {
                    state.eval_ref(i, j - 1, s, 1.0)
                } else {
                    here_b
                };
                let fb = flux.numerical(x, yc - h, 1, there_b, here_b);
                let (bt, bb) = (basis(s, 1.0), basis(s, -1.0));
                for m in 0..4 {
                    acc[m] -= ft * bt[m] - fb * bb[m];
                }
            }

            std::array::from_fn(|m| acc[m] / (h * REF_MASS[m]))
        })
        .collect();

    if let Some(k) = rates.iter().position(|r| r.iter().any(|v| !v.is_finite())) {
        return Err(Error::NonFiniteRate { i: k / n, j: k % n });
    }
    Ok(DGState { grid, coeffs: rates })
}

/// Largest signal speed used by [`compute_dt`].
///
/// Linear models: `max(|a1| + |a2|)` over cell centers. Burgers: `2 max|u|`
/// over cell vertices.
pub fn max_speed(state: &DGState, flux: &FluxModel) -> f64 {
    let grid = state.grid;
    let n = grid.n();
    match flux {
        FluxModel::Burgers => {
            2.0 * state
                .coeffs
                .iter()
                .map(|c| {
                    [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)]
                        .iter()
                        .fold(0.0f64, |m, &(a, b)| m.max(eval(c, a, b).abs()))
                })
                .fold(0.0, f64::max)
        }
        _ => {
            let mut lam = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    let (x, y) = grid.center(i, j);
                    let (a1, a2) = flux.velocity(x, y).unwrap_or((0.0, 0.0));
                    lam = lam.max(a1.abs() + a2.abs());
                }
            }
            lam
        }
    }
}

/// `cfl dx / lambda_max`, never more than `cap`.
pub fn compute_dt(state: &DGState, flux: &FluxModel, cfl: f64, cap: f64) -> Result<f64> {
    if !(cfl > 0.0 && cfl < 1.0) {
        return Err(Error::InvalidParameter(format!("cfl must lie in (0, 1), got {cfl}")));
    }
    if !(cap > 0.0) {
        return Err(Error::InvalidParameter(format!("time-step cap must be positive, got {cap}")));
    }
    let lam = max_speed(state, flux);
    if lam > 0.0 {
        Ok((cfl * state.grid.dx() / lam).min(cap))
    } else {
        Ok(cap)
    }
}

/// One Heun step, limiting after each stage when `limiter` is given
/// (`Some(alpha)`).
pub fn heun_step(state: &DGState, flux: &FluxModel, dt: f64, limiter: Option<f64>) -> Result<DGState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let limit = |s: DGState| match limiter {
        Some(alpha) => moment_limit(&s, alpha),
        None => s,
    };
    let r0 = spatial_residual(state, flux)?;
    let s1 = limit(state.axpy(dt, &r0));
    let r1 = spatial_residual(&s1, flux)?;
    let s2 = state.axpy(1.0, &s1.axpy(dt, &r1)).scaled(0.5);
    Ok(limit(s2))
}

/// Cell means `c00`.
pub fn cell_means(state: &DGState) -> CellField {
    let n = state.grid.n();
    CellField::from_fn(state.grid, |i, j| state.coeffs[i * n + j][0])
}

/// `u0` carried to time `t` by the flow of `flux`, where that is known in
/// closed form (rotation and uniform translation).
pub fn exact_solution(spec: &ShapeSpec, flux: &FluxModel, t: f64, x: f64, y: f64) -> Option<f64> {
    match *flux {
        FluxModel::Rotation => {
            let (s, c) = (-TAU * t).sin_cos();
            Some(spec.eval(c * x - s * y, s * x + c * y))
        }
        FluxModel::Uniform { ax, ay } => Some(spec.eval(x - ax * t, y - ay * t)),
        _ => None,
    }
}

/// `sum over cells of int |u_h - u_exact|` with a 4x4 Gauss rule per cell.
pub fn l1_error(state: &DGState, spec: &ShapeSpec, flux: &FluxModel, t: f64) -> Result<f64> {
    if exact_solution(spec, flux, t, 0.0, 0.0).is_none() {
        return Err(Error::InvalidParameter(
            "no closed-form solution for this flux".into(),
        ));
    }
    let grid = state.grid;
    let n = grid.n();
    let h = 0.5 * grid.dx();
    let q = GaussLegendre::new(4);
    let total: f64 = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / n, k % n);
            let (xc, yc) = grid.center(i, j);
            let c = state.cell(i, j);
            let mut acc = 0.0;
            for (xi, wx) in q.nodes.iter().zip(&q.weights) {
                for (eta, wy) in q.nodes.iter().zip(&q.weights) {
                    let ue = exact_solution(spec, flux, t, xc + h * xi, yc + h * eta).unwrap_or(0.0);
                    acc += wx * wy * (eval(c, *xi, *eta) - ue).abs();
                }
            }
            acc * h * h
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    Ok(total)
}
