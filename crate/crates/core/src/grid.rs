//! Square Cartesian grids and per-cell scalar fields.
//!
//! Cells are indexed 0-based internally as `(i, j)` with `i` along x and `j`
//! along y; values are stored row-major with `i` as the outer index. The text
//! file format uses 1-based indices.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Axis-aligned rectangle `[xmin, xmax] x [ymin, ymax]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Bounds {
    pub const fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Self {
        Self {
            xmin,
            xmax,
            ymin,
            ymax,
        }
    }

    /// `[-h, h]^2`.
    pub const fn symmetric(h: f64) -> Self {
        Self::new(-h, h, -h, h)
    }
}

/// An `n x n` partition of a rectangle into square cells of width `dx`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    n: usize,
    bounds: Bounds,
    dx: f64,
}

impl Grid {
    pub fn new(n: usize, bounds: Bounds) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewCells(n));
        }
        let Bounds {
            xmin,
            xmax,
            ymin,
            ymax,
        } = bounds;
        if ![xmin, xmax, ymin, ymax].iter().all(|v| v.is_finite()) || xmax <= xmin || ymax <= ymin {
            return Err(Error::InvalidBounds(format!(
                "[{xmin}, {xmax}] x [{ymin}, {ymax}]"
            )));
        }
        let dx = (xmax - xmin) / n as f64;
        let dy = (ymax - ymin) / n as f64;
        if (dx - dy).abs() > 1e-12 * dx.max(dy) {
            return Err(Error::NonSquareCells { dx, dy });
        }
        Ok(Self { n, bounds, dx })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn num_cells(&self) -> usize {
        self.n * self.n
    }

    /// Centroid of cell `(i, j)` (0-based).
    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.bounds.xmin + (i as f64 + 0.5) * self.dx,
            self.bounds.ymin + (j as f64 + 0.5) * self.dx,
        )
    }

    /// Lower-left corner of cell `(i, j)`.
    pub fn corner(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.bounds.xmin + i as f64 * self.dx,
            self.bounds.ymin + j as f64 * self.dx,
        )
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }
}

/// Cell averages `U[i][j]` over a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct CellField {
    grid: Grid,
    values: Vec<f64>,
}

impl CellField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.num_cells()],
        }
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.num_cells() {
            return Err(Error::FieldSize {
                expected: grid.num_cells(),
                got: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteField {
                i: k / grid.n(),
                j: k % grid.n(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: FnMut(usize, usize) -> f64>(grid: Grid, mut f: F) -> Self {
        let n = grid.n();
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                values.push(f(i, j));
            }
        }
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn dx(&self) -> f64 {
        self.grid.dx()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.grid.idx(i, j);
        self.values[k] = v;
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// Cell-wise sum. Panics if the grids differ.
    pub fn added(&self, other: &Self) -> Self {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// `sum(U) * dx^2`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.dx() * self.dx()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Serialize in the plain-text cell-field format.
    pub fn to_text(&self) -> String {
        let b = self.grid.bounds();
        let n = self.n();
        let mut out = String::with_capacity(32 * n * n);
        let _ = writeln!(
            out,
            "# n={} xmin={} xmax={} ymin={} ymax={}",
            n, b.xmin, b.xmax, b.ymin, b.ymax
        );
        for i in 0..n {
            for j in 0..n {
                let _ = writeln!(out, "{},{},{}", i + 1, j + 1, self.get(i, j));
            }
        }
        out
    }

    pub fn parse_text(text: &str, path: &Path) -> Result<Self> {
        let perr = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hl, header) = lines.next().ok_or_else(|| perr(1, "empty file".into()))?;
        let header = header
            .trim()
            .strip_prefix('#')
            .ok_or_else(|| perr(hl + 1, "missing '#' header".into()))?;
        let mut n = None;
        let mut bnd = [None; 4];
        for tok in header.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| perr(hl + 1, format!("bad header token '{tok}'")))?;
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| perr(hl + 1, format!("bad value for {k}: {e}")))
            };
            match k {
                "n" => {
                    n = Some(
                        v.parse::<usize>()
                            .map_err(|e| perr(hl + 1, format!("bad n: {e}")))?,
                    )
                }
                "xmin" => bnd[0] = Some(num(v)?),
                "xmax" => bnd[1] = Some(num(v)?),
                "ymin" => bnd[2] = Some(num(v)?),
                "ymax" => bnd[3] = Some(num(v)?),
                other => return Err(perr(hl + 1, format!("unknown header key '{other}'"))),
            }
        }
        let n = n.ok_or_else(|| perr(hl + 1, "header lacks n".into()))?;
        let [Some(xmin), Some(xmax), Some(ymin), Some(ymax)] = bnd else {
            return Err(perr(hl + 1, "header lacks bounds".into()));
        };
        let grid = Grid::new(n, Bounds::new(xmin, xmax, ymin, ymax))?;
        let mut values = vec![f64::NAN; n * n];
        let mut seen = 0usize;
        for (ln, line) in lines {
            let mut parts = line.trim().split(',');
            let mut next = |what: &str| {
                parts
                    .next()
                    .map(str::trim)
                    .ok_or_else(|| perr(ln + 1, format!("missing {what}")))
            };
            let i: usize = next("i")?
                .parse()
                .map_err(|e| perr(ln + 1, format!("bad i: {e}")))?;
            let j: usize = next("j")?
                .parse()
                .map_err(|e| perr(ln + 1, format!("bad j: {e}")))?;
            let v: f64 = next("value")?
                .parse()
                .map_err(|e| perr(ln + 1, format!("bad value: {e}")))?;
            if i == 0 || j == 0 || i > n || j > n {
                return Err(perr(ln + 1, format!("index ({i},{j}) out of range")));
            }
            values[grid.idx(i - 1, j - 1)] = v;
            seen += 1;
        }
        if seen != n * n {
            return Err(Error::FieldSize {
                expected: n * n,
                got: seen,
            });
        }
        Self::from_values(grid, values)
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::parse_text(&text, path)
    }
}
