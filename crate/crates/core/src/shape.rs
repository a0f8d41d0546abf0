//! Analytic initial/test shapes and their projection onto cell averages.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{CellField, Grid};
use crate::quadrature::GaussLegendre;

/// Quadrature order per direction used for smooth shapes.
pub const DEFAULT_QUAD_ORDER: usize = 4;

/// The shape catalogue.
///
/// Hills are compactly supported: the circular hill is `cos(pi r / (2 R))` for
/// `r <= R` (with `R = 1/4` this is `cos(2 pi r)`), the elliptic hill is
/// `cos(2 pi q)` with `q = a (x-cx)^2 + b (y-cy)^2` for `q <= level`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ShapeSpec {
    Gaussian {
        center: (f64, f64),
        width: f64,
    },
    SquarePulse {
        center: (f64, f64),
        half_width: f64,
    },
    /// Square pulse rotated counterclockwise by `angle` about its center.
    RotatedSquarePulse {
        center: (f64, f64),
        half_width: f64,
        angle: f64,
    },
    CosineHill {
        center: (f64, f64),
        radius: f64,
    },
    EllipticHill {
        center: (f64, f64),
        coeffs: (f64, f64),
        level: f64,
    },
    /// Circular cosine hill used as Burgers initial data.
    BurgersHill {
        center: (f64, f64),
        radius: f64,
    },
    Constant(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ShapeKind {
    Gaussian,
    SquarePulse,
    RotatedSquarePulse,
    CosineHill,
    EllipticHill,
    BurgersHill,
    Constant,
}

impl ShapeKind {
    pub const ALL: [ShapeKind; 7] = [
        ShapeKind::Gaussian,
        ShapeKind::SquarePulse,
        ShapeKind::RotatedSquarePulse,
        ShapeKind::CosineHill,
        ShapeKind::EllipticHill,
        ShapeKind::BurgersHill,
        ShapeKind::Constant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ShapeKind::Gaussian => "gaussian",
            ShapeKind::SquarePulse => "square_pulse",
            ShapeKind::RotatedSquarePulse => "rotated_square_pulse",
            ShapeKind::CosineHill => "cosine_hill",
            ShapeKind::EllipticHill => "elliptic_hill",
            ShapeKind::BurgersHill => "burgers_hill",
            ShapeKind::Constant => "constant",
        }
    }

    /// Standard parameters for each kind.
    pub fn default_spec(self) -> ShapeSpec {
        match self {
            ShapeKind::Gaussian => ShapeSpec::gaussian(),
            ShapeKind::SquarePulse => ShapeSpec::isotropy_pulse(),
            ShapeKind::RotatedSquarePulse => ShapeSpec::isotropy_pulse_rotated(),
            ShapeKind::CosineHill => ShapeSpec::cosine_hill(),
            ShapeKind::EllipticHill => ShapeSpec::elliptic_hill(),
            ShapeKind::BurgersHill => ShapeSpec::burgers_hill(),
            ShapeKind::Constant => ShapeSpec::Constant(1.0),
        }
    }
}

impl fmt::Display for ShapeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ShapeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ShapeKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown shape kind '{s}'")))
    }
}

impl ShapeSpec {
    /// `exp(-(x^2 + y^2) / 0.15^2)`.
    pub fn gaussian() -> Self {
        ShapeSpec::Gaussian {
            center: (0.0, 0.0),
            width: 0.15,
        }
    }

    /// Unit pulse on `[-1/sqrt 2, 1/sqrt 2]^2`.
    pub fn isotropy_pulse() -> Self {
        ShapeSpec::SquarePulse {
            center: (0.0, 0.0),
            half_width: FRAC_1_SQRT_2,
        }
    }

    /// [`Self::isotropy_pulse`] rotated by pi/4: the diamond `|x| + |y| <= 1`.
    pub fn isotropy_pulse_rotated() -> Self {
        ShapeSpec::RotatedSquarePulse {
            center: (0.0, 0.0),
            half_width: FRAC_1_SQRT_2,
            angle: FRAC_PI_4,
        }
    }

    /// Unit pulse on `[-1/4, 1/4]^2`, the rotating-pulse initial data.
    pub fn rotation_pulse() -> Self {
        ShapeSpec::SquarePulse {
            center: (0.0, 0.0),
            half_width: 0.25,
        }
    }

    /// `cos(2 pi r)` for `r <= 1/4` around `(1/4, 1/4)`.
    pub fn cosine_hill() -> Self {
        ShapeSpec::CosineHill {
            center: (0.25, 0.25),
            radius: 0.25,
        }
    }

    /// `cos 2 pi (0.5 x^2 + 1.5 y^2)` where the quadratic form is `<= 1/4`.
    pub fn elliptic_hill() -> Self {
        ShapeSpec::EllipticHill {
            center: (0.0, 0.0),
            coeffs: (0.5, 1.5),
            level: 0.25,
        }
    }

    /// `cos(2 pi r)` for `r <= 1/4` around `(-1/2, -1/2)`.
    pub fn burgers_hill() -> Self {
        ShapeSpec::BurgersHill {
            center: (-0.5, -0.5),
            radius: 0.25,
        }
    }

    pub fn kind(&self) -> ShapeKind {
        match self {
            ShapeSpec::Gaussian { .. } => ShapeKind::Gaussian,
            ShapeSpec::SquarePulse { .. } => ShapeKind::SquarePulse,
            ShapeSpec::RotatedSquarePulse { .. } => ShapeKind::RotatedSquarePulse,
            ShapeSpec::CosineHill { .. } => ShapeKind::CosineHill,
            ShapeSpec::EllipticHill { .. } => ShapeKind::EllipticHill,
            ShapeSpec::BurgersHill { .. } => ShapeKind::BurgersHill,
            ShapeSpec::Constant(_) => ShapeKind::Constant,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
            }
        };
        match *self {
            ShapeSpec::Gaussian { width, .. } => positive("width", width),
            ShapeSpec::SquarePulse { half_width, .. } => positive("half_width", half_width),
            ShapeSpec::RotatedSquarePulse {
                half_width, angle, ..
            } => {
                positive("half_width", half_width)?;
                if angle.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter("angle must be finite".into()))
                }
            }
            ShapeSpec::CosineHill { radius, .. } | ShapeSpec::BurgersHill { radius, .. } => {
                positive("radius", radius)
            }
            ShapeSpec::EllipticHill { coeffs, level, .. } => {
                positive("coeffs.0", coeffs.0)?;
                positive("coeffs.1", coeffs.1)?;
                positive("level", level)
            }
            ShapeSpec::Constant(c) => {
                if c.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter("constant must be finite".into()))
                }
            }
        }
    }

    /// Point value at `(x, y)`.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match *self {
            ShapeSpec::Gaussian { center, width } => {
                let (dx, dy) = (x - center.0, y - center.1);
                (-(dx * dx + dy * dy) / (width * width)).exp()
            }
            ShapeSpec::SquarePulse { center, half_width } => {
                if (x - center.0).abs() <= half_width && (y - center.1).abs() <= half_width {
                    1.0
                } else {
                    0.0
                }
            }
            ShapeSpec::RotatedSquarePulse {
                center,
                half_width,
                angle,
            } => {
                let (s, c) = angle.sin_cos();
                let (dx, dy) = (x - center.0, y - center.1);
                let xr = dx * c + dy * s;
                let yr = -dx * s + dy * c;
                if xr.abs() <= half_width && yr.abs() <= half_width {
                    1.0
                } else {
                    0.0
                }
            }
            ShapeSpec::CosineHill { center, radius } | ShapeSpec::BurgersHill { center, radius } => {
                let r = (x - center.0).hypot(y - center.1);
                if r <= radius {
                    (0.5 * PI * r / radius).cos()
                } else {
                    0.0
                }
            }
            ShapeSpec::EllipticHill {
                center,
                coeffs,
                level,
            } => {
                let (dx, dy) = (x - center.0, y - center.1);
                let q = coeffs.0 * dx * dx + coeffs.1 * dy * dy;
                if q <= level {
                    (2.0 * PI * q * (0.25 / level)).cos()
                } else {
                    0.0
                }
            }
            ShapeSpec::Constant(c) => c,
        }
    }

    /// Average over the axis-aligned box `[x0, x1] x [y0, y1]`.
    ///
    /// Pulses use exact overlap areas; everything else uses a tensor
    /// Gauss–Legendre rule of `quad` points per direction.
    pub fn box_average(&self, x0: f64, x1: f64, y0: f64, y1: f64, quad: &GaussLegendre) -> f64 {
        let area = (x1 - x0) * (y1 - y0);
        match *self {
            ShapeSpec::Constant(c) => c,
            ShapeSpec::SquarePulse { center, half_width } => {
                let ox = overlap(x0, x1, center.0 - half_width, center.0 + half_width);
                let oy = overlap(y0, y1, center.1 - half_width, center.1 + half_width);
                ox * oy / area
            }
            ShapeSpec::RotatedSquarePulse {
                center,
                half_width,
                angle,
            } => {
                let (s, c) = angle.sin_cos();
                // Corners of the rotated square, counterclockwise.
                let poly: Vec<(f64, f64)> = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
                    .iter()
                    .map(|&(u, v)| {
                        let (u, v) = (u * half_width, v * half_width);
                        (center.0 + u * c - v * s, center.1 + u * s + v * c)
                    })
                    .collect();
                clipped_area(&poly, x0, x1, y0, y1) / area
            }
            _ => {
                let (hx, hy) = (0.5 * (x1 - x0), 0.5 * (y1 - y0));
                let (mx, my) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
                let mut acc = 0.0;
                for (a, wa) in quad.nodes.iter().zip(&quad.weights) {
                    let x = mx + hx * a;
                    for (b, wb) in quad.nodes.iter().zip(&quad.weights) {
                        acc += wa * wb * self.eval(x, my + hy * b);
                    }
                }
                0.25 * acc
            }
        }
    }

    pub fn is_discontinuous_pulse(&self) -> bool {
        matches!(
            self,
            ShapeSpec::SquarePulse { .. } | ShapeSpec::RotatedSquarePulse { .. }
        )
    }
}

/// Cell averages of `spec` on `grid`.
pub fn project_cell_averages(spec: &ShapeSpec, grid: &Grid, quad_order: usize) -> Result<CellField> {
    if quad_order == 0 {
        return Err(Error::InvalidParameter("quad_order must be at least 1".into()));
    }
    spec.validate()?;
    let quad = GaussLegendre::new(quad_order);
    let dx = grid.dx();
    Ok(CellField::from_fn(*grid, |i, j| {
        let (x0, y0) = grid.corner(i, j);
        spec.box_average(x0, x0 + dx, y0, y0 + dx, &quad)
    }))
}

fn overlap(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    (a1.min(b1) - a0.max(b0)).max(0.0)
}

/// Area of a convex polygon clipped to a rectangle (Sutherland–Hodgman).
fn clipped_area(poly: &[(f64, f64)], x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    let mut pts = poly.to_vec();
    // Each half-plane as (signed distance fn).
    let planes: [&dyn Fn((f64, f64)) -> f64; 4] = [
        &|p| p.0 - x0,
        &|p| x1 - p.0,
        &|p| p.1 - y0,
        &|p| y1 - p.1,
    ];
    for side in planes {
        if pts.is_empty() {
            break;
        }
        let mut out = Vec::with_capacity(pts.len() + 2);
        for k in 0..pts.len() {
            let p = pts[k];
            let q = pts[(k + 1) % pts.len()];
            let (dp, dq) = (side(p), side(q));
            if dp >= 0.0 {
                out.push(p);
            }
            if (dp >= 0.0) != (dq >= 0.0) {
                let t = dp / (dp - dq);
                out.push((p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1)));
            }
        }
        pts = out;
    }
    if pts.len() < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for k in 0..pts.len() {
        let (a, b) = (pts[k], pts[(k + 1) % pts.len()]);
        twice += a.0 * b.1 - b.0 * a.1;
    }
    0.5 * twice.abs()
}
