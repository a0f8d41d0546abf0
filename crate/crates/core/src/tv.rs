//! Anisotropic and isotropic discrete total variation.
//!
//! Forward differences that would reach outside the grid are dropped, which
//! amounts to extending the field by a constant across the boundary.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::grid::CellField;

/// `sum dx (|U[i+1,j] - U[i,j]| + |U[i,j+1] - U[i,j]|)`.
pub fn tv_anisotropic(field: &CellField) -> f64 {
    let n = field.n();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let u = field.get(i, j);
            if i + 1 < n {
                acc += (field.get(i + 1, j) - u).abs();
            }
            if j + 1 < n {
                acc += (field.get(i, j + 1) - u).abs();
            }
        }
    }
    acc * field.dx()
}

/// `sum dx sqrt((U[i+1,j] - U[i,j])^2 + (U[i,j+1] - U[i,j])^2)`.
pub fn tv_isotropic(field: &CellField) -> f64 {
    let n = field.n();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let u = field.get(i, j);
            let a = if i + 1 < n { field.get(i + 1, j) - u } else { 0.0 };
            let b = if j + 1 < n { field.get(i, j + 1) - u } else { 0.0 };
            acc += a.hypot(b);
        }
    }
    acc * field.dx()
}

/// Analytic TV of `exp(-r^2 / w^2)` over the plane: `pi^(3/2) w`.
pub fn gaussian_tv_exact(width: f64) -> f64 {
    PI.powf(1.5) * width
}

/// Analytic `int |u_x| + |u_y|` of `exp(-r^2 / w^2)`: `4 sqrt(pi) w`.
pub fn gaussian_tva_exact(width: f64) -> f64 {
    4.0 * PI.sqrt() * width
}

/// Closed-form TVs of the unit pulse and its pi/4 rotation on `[-2, 2]^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SquarePulseOracles {
    /// Axis-aligned pulse, anisotropic.
    pub tva_u: f64,
    /// Rotated pulse, anisotropic.
    pub tva_v: f64,
    /// Rotated pulse, isotropic.
    pub tvis_v: f64,
}

/// Closed forms for the pulse experiment with `dx = 4/n`.
///
/// `tvis_v` is `((3 sqrt 2 + 2) N/4 - 3 sqrt 2 + 2) dx`, obtained by counting
/// the forward-difference patterns along the staircase of half cells.
pub fn square_pulse_tv_oracles(n: usize) -> Result<SquarePulseOracles> {
    if n == 0 || n % 4 != 0 {
        return Err(Error::NotMultipleOfFour(n));
    }
    let nf = n as f64;
    let dx = 4.0 / nf;
    let a = nf / (4.0 * SQRT_2);
    let (fl, fr) = (a.floor(), a - a.floor());
    Ok(SquarePulseOracles {
        tva_u: 4.0 * (2.0 * fl + 2.0 * fr) * dx,
        tva_v: (2.0 * nf - 4.0) * dx,
        tvis_v: ((3.0 * SQRT_2 + 2.0) * nf / 4.0 - 3.0 * SQRT_2 + 2.0) * dx,
    })
}
