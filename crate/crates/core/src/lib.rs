//! Discrete total variation (anisotropic, isotropic, dual) on Cartesian cell
//! averages, and a degree-one DG solver whose means are monitored for the
//! TVD property.

pub mod dg;
pub mod dual;
pub mod error;
pub mod grid;
pub mod harness;
pub mod limiter;
pub mod quadrature;
pub mod shape;
pub mod tv;

pub use error::{Error, Result};
pub use grid::{Bounds, CellField, Grid};
pub use shape::{project_cell_averages, ShapeKind, ShapeSpec};
pub use tv::{square_pulse_tv_oracles, tv_anisotropic, tv_isotropic};
