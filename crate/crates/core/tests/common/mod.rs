//! Shared helpers: an independent dense solve of the dual TV minimization.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use tvdlab::{Bounds, CellField, Grid};

pub fn field(n: usize, vals: Vec<f64>) -> CellField {
    CellField::from_values(Grid::new(n, Bounds::symmetric(1.0)).unwrap(), vals).unwrap()
}

/// Gradient-field unknowns ordered as (node, component) pairs, with the
/// node's position in half-cell units; constraint rows are interior edges.
pub struct Layout {
    pub nodes: Vec<(f64, f64)>,
    pub edges: Vec<((f64, f64), usize)>,
    /// Block (1, 2, 3) of each node.
    pub block: Vec<usize>,
}

pub fn layout(n: usize) -> Layout {
    let mut nodes = Vec::new();
    let mut block = Vec::new();
    for a in 0..=n {
        for j in 0..n {
            nodes.push((a as f64, j as f64 + 0.5));
            block.push(1);
        }
    }
    for i in 0..n {
        for b in 0..=n {
            nodes.push((i as f64 + 0.5, b as f64));
            block.push(2);
        }
    }
    for i in 0..n {
        for j in 0..n {
            nodes.push((i as f64 + 0.5, j as f64 + 0.5));
            block.push(3);
        }
    }
    let mut edges = Vec::new();
    for a in 1..n {
        for j in 0..n {
            edges.push(((a as f64, j as f64 + 0.5), 0));
        }
    }
    for i in 0..n {
        for b in 1..n {
            edges.push(((i as f64 + 0.5, b as f64), 1));
        }
    }
    Layout { nodes, edges, block }
}

/// The constraint matrix built from geometry: an edge collects the matching
/// component of the node on it (weight 1), of the four diagonal neighbours
/// of the other edge family (1/4), and of the two adjacent cell centres (1/2).
pub fn constraint_matrix(n: usize) -> DMatrix<f64> {
    let l = layout(n);
    let mut a = DMatrix::zeros(l.edges.len(), 2 * l.nodes.len());
    for (r, &((ex, ey), comp)) in l.edges.iter().enumerate() {
        for (c, &(nx, ny)) in l.nodes.iter().enumerate() {
            let (dx, dy) = ((nx - ex).abs(), (ny - ey).abs());
            let own = if comp == 0 { 1 } else { 2 };
            let other = 3 - own;
            let w = match l.block[c] {
                b if b == own && dx == 0.0 && dy == 0.0 => 1.0,
                b if b == other && dx == 0.5 && dy == 0.5 => 0.25,
                3 if comp == 0 && dx == 0.5 && dy == 0.0 => 0.5,
                3 if comp == 1 && dx == 0.0 && dy == 0.5 => 0.5,
                _ => 0.0,
            };
            a[(r, 2 * c + comp)] = w;
        }
    }
    a
}

pub fn edge_rhs(f: &CellField) -> DVector<f64> {
    let n = f.n();
    let mut d = Vec::new();
    for a in 1..n {
        for j in 0..n {
            d.push(f.get(a, j) - f.get(a - 1, j));
        }
    }
    for i in 0..n {
        for b in 1..n {
            d.push(f.get(i, b) - f.get(i, b - 1));
        }
    }
    DVector::from_vec(d)
}

/// `min sum |v_node|` s.t. `A v = d` by Newton on `sum sqrt(|v|^2 + delta^2)`
/// over the null space of `A`, with `delta` driven to zero.
pub fn brute_force_min(a: &DMatrix<f64>, d: &DVector<f64>) -> f64 {
    let cols = a.ncols();
    // Null space from the zero eigenvalues of A^T A (the SVD here is thin).
    let eig = (a.transpose() * a).symmetric_eigen();
    let null: Vec<usize> = (0..cols).filter(|&k| eig.eigenvalues[k].abs() < 1e-10).collect();
    let basis = DMatrix::from_fn(cols, null.len(), |r, c| eig.eigenvectors[(r, null[c])]);
    let v0 = a.clone().svd(true, true).solve(d, 1e-12).unwrap();
    let nodes = cols / 2;
    let objective = |v: &DVector<f64>, delta: f64| -> f64 {
        (0..nodes).map(|k| (v[2 * k].powi(2) + v[2 * k + 1].powi(2) + delta * delta).sqrt()).sum()
    };
    let mut z = DVector::zeros(basis.ncols());
    let mut delta = 1e-1;
    while delta > 1e-11 {
        for _ in 0..100 {
            let v = &v0 + &basis * &z;
            let mut g = DVector::zeros(cols);
            let mut h = DMatrix::zeros(cols, cols);
            for k in 0..nodes {
                let (x, y) = (v[2 * k], v[2 * k + 1]);
                let s = (x * x + y * y + delta * delta).sqrt();
                g[2 * k] = x / s;
                g[2 * k + 1] = y / s;
                let s3 = s * s * s;
                h[(2 * k, 2 * k)] = (y * y + delta * delta) / s3;
                h[(2 * k + 1, 2 * k + 1)] = (x * x + delta * delta) / s3;
                h[(2 * k, 2 * k + 1)] = -x * y / s3;
                h[(2 * k + 1, 2 * k)] = -x * y / s3;
            }
            let gz = basis.transpose() * &g;
            if gz.norm() < 1e-13 {
                break;
            }
            let mut hz = basis.transpose() * &h * &basis;
            for i in 0..hz.nrows() {
                hz[(i, i)] += 1e-14;
            }
            let step = hz.lu().solve(&(-&gz)).unwrap();
            let f0 = objective(&v, delta);
            let mut t = 1.0;
            while t > 1e-12 {
                let cand = &z + &step * t;
                if objective(&(&v0 + &basis * &cand), delta) <= f0 + 1e-4 * t * gz.dot(&step) {
                    z = cand;
                    break;
                }
                t *= 0.5;
            }
            if t <= 1e-12 {
                break;
            }
        }
        delta *= 0.1;
    }
    objective(&(&v0 + &basis * &z), 0.0)
}

pub fn lcg(seed: u64) -> impl FnMut() -> f64 {
    let mut s = seed;
    move || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (s >> 11) as f64 / (1u64 << 53) as f64
    }
}
