//! Dual (Raviart–Thomas) discrete total variation.
//!
//! The value is the optimum of the primal problem
//! `min dx * sum |v_node|_2  subject to  F v = D U`, solved with an
//! alternating proximal gradient iteration. The multiplier `phi` is the
//! discrete test field; at the optimum `dx <D U, phi>` equals the primal value.
//!
//! Layouts (0-based):
//! * [`EdgeVectorField`]: `h[a, j]` sits on the vertical edge `x = xmin + a dx`
//!   of row `j` (`a = 0..=n`), `v[i, b]` on the horizontal edge
//!   `y = ymin + b dx` of column `i` (`b = 0..=n`). Boundary entries are zero.
//! * [`GradField`]: `v1` on vertical edges (`(n+1) x n`, boundary edges
//!   included), `v2` on horizontal edges (`n x (n+1)`), `v3` on cells.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::CellField;

/// Test-field layout: normal components on edge midpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeVectorField {
    n: usize,
    pub h: Vec<f64>,
    pub v: Vec<f64>,
}

impl EdgeVectorField {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            h: vec![0.0; (n + 1) * n],
            v: vec![0.0; n * (n + 1)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn hidx(&self, a: usize, j: usize) -> usize {
        a * self.n + j
    }

    #[inline]
    pub fn vidx(&self, i: usize, b: usize) -> usize {
        i * (self.n + 1) + b
    }

    pub fn h_at(&self, a: usize, j: usize) -> f64 {
        self.h[self.hidx(a, j)]
    }

    pub fn v_at(&self, i: usize, b: usize) -> f64 {
        self.v[self.vidx(i, b)]
    }

    /// Whether all boundary entries vanish.
    pub fn has_zero_trace(&self) -> bool {
        let n = self.n;
        (0..n).all(|j| self.h_at(0, j) == 0.0 && self.h_at(n, j) == 0.0)
            && (0..n).all(|i| self.v_at(i, 0) == 0.0 && self.v_at(i, n) == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.h
            .iter()
            .chain(&self.v)
            .fold(0.0, |m: f64, x| m.max(x.abs()))
    }

    /// `sum h*h' + v*v'`.
    pub fn dot(&self, other: &Self) -> f64 {
        let a: f64 = self.h.iter().zip(&other.h).map(|(x, y)| x * y).sum();
        let b: f64 = self.v.iter().zip(&other.v).map(|(x, y)| x * y).sum();
        a + b
    }
}

/// A field of 2-vectors on one node set.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeVectors {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl NodeVectors {
    pub fn zeros(len: usize) -> Self {
        Self {
            x: vec![0.0; len],
            y: vec![0.0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// `sum |w|_2` over nodes.
    pub fn norm_sum(&self) -> f64 {
        self.x.iter().zip(&self.y).map(|(a, b)| a.hypot(*b)).sum()
    }
}

/// Gradient field `(v1, v2, v3)`; see the module docs for the layouts.
#[derive(Clone, Debug, PartialEq)]
pub struct GradField {
    n: usize,
    pub v1: NodeVectors,
    pub v2: NodeVectors,
    pub v3: NodeVectors,
}

impl GradField {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            v1: NodeVectors::zeros((n + 1) * n),
            v2: NodeVectors::zeros(n * (n + 1)),
            v3: NodeVectors::zeros(n * n),
        }
    }

    /// `((D1 U, 0), (0, D2 U), (0, 0))`, which satisfies `F v = D U`.
    pub fn initial(du: &EdgeVectorField) -> Self {
        let mut g = Self::zeros(du.n);
        g.v1.x.copy_from_slice(&du.h);
        g.v2.y.copy_from_slice(&du.v);
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn block(&self, k: usize) -> &NodeVectors {
        match k {
            1 => &self.v1,
            2 => &self.v2,
            _ => &self.v3,
        }
    }

    fn block_mut(&mut self, k: usize) -> &mut NodeVectors {
        match k {
            1 => &mut self.v1,
            2 => &mut self.v2,
            _ => &mut self.v3,
        }
    }

    /// `||v||_{1,1,2}`: the sum of node 2-norms over all three node sets.
    pub fn mixed_norm(&self) -> f64 {
        self.v1.norm_sum() + self.v2.norm_sum() + self.v3.norm_sum()
    }

    pub fn is_finite(&self) -> bool {
        [&self.v1, &self.v2, &self.v3]
            .iter()
            .all(|b| b.x.iter().chain(&b.y).all(|v| v.is_finite()))
    }

    pub fn scaled(&self, c: f64) -> Self {
        let s = |b: &NodeVectors| NodeVectors {
            x: b.x.iter().map(|v| c * v).collect(),
            y: b.y.iter().map(|v| c * v).collect(),
        };
        Self {
            n: self.n,
            v1: s(&self.v1),
            v2: s(&self.v2),
            v3: s(&self.v3),
        }
    }
}

/// `D U`: forward differences on interior edges, zero on the boundary.
pub fn forward_differences(field: &CellField) -> EdgeVectorField {
    let n = field.n();
    let mut out = EdgeVectorField::zeros(n);
    for a in 1..n {
        for j in 0..n {
            let k = out.hidx(a, j);
            out.h[k] = field.get(a, j) - field.get(a - 1, j);
        }
    }
    for i in 0..n {
        for b in 1..n {
            let k = out.vidx(i, b);
            out.v[k] = field.get(i, b) - field.get(i, b - 1);
        }
    }
    out
}

/// Interpolation `P^k` of a test field onto node set `k` (1, 2 or 3).
pub fn apply_p(k: usize, phi: &EdgeVectorField) -> Result<NodeVectors> {
    let n = phi.n;
    let mut out = match k {
        1 => NodeVectors::zeros((n + 1) * n),
        2 => NodeVectors::zeros(n * (n + 1)),
        3 => NodeVectors::zeros(n * n),
        other => return Err(Error::InvalidOperator(other)),
    };
    p_into(k, phi, &mut out);
    Ok(out)
}

fn p_into(k: usize, phi: &EdgeVectorField, out: &mut NodeVectors) {
    let n = phi.n;
    let m = n + 1;
    let (h, v) = (&phi.h, &phi.v);
    match k {
        1 => {
            for a in 0..=n {
                for j in 0..n {
                    let idx = a * n + j;
                    out.x[idx] = h[idx];
                    let mut s = 0.0;
                    if a >= 1 {
                        s += v[(a - 1) * m + j] + v[(a - 1) * m + j + 1];
                    }
                    if a < n {
                        s += v[a * m + j] + v[a * m + j + 1];
                    }
                    out.y[idx] = 0.25 * s;
                }
            }
        }
        2 => {
            for i in 0..n {
                for b in 0..=n {
                    let idx = i * m + b;
                    let mut s = 0.0;
                    if b >= 1 {
                        s += h[i * n + b - 1] + h[(i + 1) * n + b - 1];
                    }
                    if b < n {
                        s += h[i * n + b] + h[(i + 1) * n + b];
                    }
                    out.x[idx] = 0.25 * s;
                    out.y[idx] = v[idx];
                }
            }
        }
        _ => {
            for i in 0..n {
                for j in 0..n {
                    let idx = i * n + j;
                    out.x[idx] = 0.5 * (h[i * n + j] + h[(i + 1) * n + j]);
                    out.y[idx] = 0.5 * (v[i * m + j] + v[i * m + j + 1]);
                }
            }
        }
    }
}

/// Adds `F_k v_k` to `out` (interior entries only).
fn f_block_add(k: usize, n: usize, w: &NodeVectors, out: &mut EdgeVectorField) {
    let m = n + 1;
    match k {
        1 => {
            for a in 1..n {
                for j in 0..n {
                    out.h[a * n + j] += w.x[a * n + j];
                }
            }
            for i in 0..n {
                for b in 1..n {
                    let s = w.y[i * n + b - 1]
                        + w.y[i * n + b]
                        + w.y[(i + 1) * n + b - 1]
                        + w.y[(i + 1) * n + b];
                    out.v[i * m + b] += 0.25 * s;
                }
            }
        }
        2 => {
            for a in 1..n {
                for j in 0..n {
                    let s = w.x[(a - 1) * m + j]
                        + w.x[(a - 1) * m + j + 1]
                        + w.x[a * m + j]
                        + w.x[a * m + j + 1];
                    out.h[a * n + j] += 0.25 * s;
                }
            }
            for i in 0..n {
                for b in 1..n {
                    out.v[i * m + b] += w.y[i * m + b];
                }
            }
        }
        _ => {
            for a in 1..n {
                for j in 0..n {
                    out.h[a * n + j] += 0.5 * (w.x[(a - 1) * n + j] + w.x[a * n + j]);
                }
            }
            for i in 0..n {
                for b in 1..n {
                    out.v[i * m + b] += 0.5 * (w.y[i * n + b - 1] + w.y[i * n + b]);
                }
            }
        }
    }
}

/// `F v`, the constraint operator; the adjoint of `(P^1, P^2, P^3)` on
/// interior edge components.
pub fn apply_f(v: &GradField) -> EdgeVectorField {
    let mut out = EdgeVectorField::zeros(v.n);
    for k in 1..=3 {
        f_block_add(k, v.n, v.block(k), &mut out);
    }
    out
}

/// `w (1 - 1 / max(|w| / t, 1))`: zero when `|w| <= t`, else shortened by `t`.
#[inline]
pub fn vector_shrink(w: (f64, f64), threshold: f64) -> (f64, f64) {
    let m = w.0.hypot(w.1);
    let f = 1.0 - 1.0 / (m / threshold).max(1.0);
    (w.0 * f, w.1 * f)
}

/// Order in which the three node sets and the multiplier are updated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Sweep {
    /// Each block update is followed immediately by a multiplier update.
    #[default]
    Alternating,
    /// All blocks from the same residual, then one multiplier update.
    Jacobi,
}

/// Which magnitude the shrink factor is computed from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Threshold {
    /// The proximal step: threshold the updated argument.
    #[default]
    Updated,
    /// Scale the update by a factor computed from the previous iterate.
    /// Kept for comparison; it does not solve the minimization.
    PreviousIterate,
}

#[derive(Clone, Debug)]
pub struct DualTvParams {
    pub mu: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub max_iter: usize,
    /// Also require `max |F v - D U| <= feas_tol * max(1, max |D U|)` before
    /// stopping. `f64::INFINITY` keeps only the objective-change test.
    pub feas_tol: f64,
    /// Also require `|dx ||v|| - dx <D U, phi>| <= gap_tol * max(1, dx ||v||)`.
    /// The objective-change test alone can stop well short of the minimum
    /// on slowly converging fields; off (`INFINITY`) by default.
    pub gap_tol: f64,
    pub sweep: Sweep,
    pub threshold: Threshold,
    pub warm_start: Option<(GradField, EdgeVectorField)>,
    pub trace: bool,
}

impl Default for DualTvParams {
    fn default() -> Self {
        Self {
            mu: 0.5,
            gamma: 0.33,
            epsilon: 1e-7,
            max_iter: 20_000,
            feas_tol: 1e-5,
            gap_tol: f64::INFINITY,
            sweep: Sweep::default(),
            threshold: Threshold::default(),
            warm_start: None,
            trace: false,
        }
    }
}

impl DualTvParams {
    /// Defaults with `mu` chosen for an `n x n` grid.
    pub fn for_grid(n: usize) -> Self {
        Self {
            mu: default_mu(n),
            ..Self::default()
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return bad(format!("mu must be positive, got {}", self.mu));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must be positive, got {}", self.gamma));
        }
        if !(self.epsilon > 0.0) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        if !(self.feas_tol > 0.0) {
            return bad(format!("feas_tol must be positive, got {}", self.feas_tol));
        }
        if !(self.gap_tol > 0.0) {
            return bad(format!("gap_tol must be positive, got {}", self.gap_tol));
        }
        if let Some((v, phi)) = &self.warm_start {
            if v.n != n || phi.n != n {
                return bad(format!("warm start is for n={}, field has n={n}", v.n));
            }
        }
        Ok(())
    }
}

/// Per-grid `mu`: 0.5, 0.3, 0.1, 0.05 for n = 20, 40, 80, 160, nearest n
/// (ties to the coarser entry) otherwise.
pub fn default_mu(n: usize) -> f64 {
    const TABLE: [(usize, f64); 4] = [(20, 0.5), (40, 0.3), (80, 0.1), (160, 0.05)];
    TABLE
        .iter()
        .min_by_key(|(m, _)| m.abs_diff(n))
        .map(|&(_, mu)| mu)
        .unwrap_or(0.5)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub primal_norm: f64,
    pub dual_objective: f64,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct DualTvResult {
    /// `dx * primal_norm`.
    pub value: f64,
    pub iterations: usize,
    /// `||v||_{1,1,2}` without the `dx` factor.
    pub primal_norm: f64,
    /// `dx * <D U, phi>`.
    pub dual_objective: f64,
    /// `max |F v - D U|`.
    pub feasibility_residual: f64,
    pub converged: bool,
    pub v: GradField,
    pub phi: EdgeVectorField,
    pub trace: Vec<TraceRow>,
}

impl DualTvResult {
    /// `tv_d=<v> iters=<k> residual=<r> converged=<0|1>`.
    pub fn summary_line(&self) -> String {
        format!(
            "tv_d={} iters={} residual={:e} converged={}",
            self.value, self.iterations, self.feasibility_residual, self.converged as u8
        )
    }
}

/// Per-block images `F_k v_k`, kept so a single block update only
/// recomputes its own contribution.
struct BlockImages {
    parts: [EdgeVectorField; 3],
    total: EdgeVectorField,
}

impl BlockImages {
    fn new(v: &GradField) -> Self {
        let n = v.n;
        let parts = [1, 2, 3].map(|k| {
            let mut e = EdgeVectorField::zeros(n);
            f_block_add(k, n, v.block(k), &mut e);
            e
        });
        let mut me = Self {
            parts,
            total: EdgeVectorField::zeros(n),
        };
        me.sum();
        me
    }

    fn refresh(&mut self, k: usize, w: &NodeVectors) {
        let part = &mut self.parts[k - 1];
        part.h.fill(0.0);
        part.v.fill(0.0);
        f_block_add(k, part.n, w, part);
        self.sum();
    }

    fn sum(&mut self) {
        let [a, b, c] = &self.parts;
        for (t, ((x, y), z)) in self.total.h.iter_mut().zip(a.h.iter().zip(&b.h).zip(&c.h)) {
            *t = x + y + z;
        }
        for (t, ((x, y), z)) in self.total.v.iter_mut().zip(a.v.iter().zip(&b.v).zip(&c.v)) {
            *t = x + y + z;
        }
    }
}

/// `phi += (D U - F v) / mu`.
fn multiplier_step(phi: &mut EdgeVectorField, du: &EdgeVectorField, fv: &EdgeVectorField, mu: f64) {
    for ((p, d), f) in phi.h.iter_mut().zip(&du.h).zip(&fv.h) {
        *p += (d - f) / mu;
    }
    for ((p, d), f) in phi.v.iter_mut().zip(&du.v).zip(&fv.v) {
        *p += (d - f) / mu;
    }
}

/// `D U - F v + mu phi`.
fn shifted_residual(
    out: &mut EdgeVectorField,
    du: &EdgeVectorField,
    fv: &EdgeVectorField,
    phi: &EdgeVectorField,
    mu: f64,
) {
    for (((o, d), f), p) in out.h.iter_mut().zip(&du.h).zip(&fv.h).zip(&phi.h) {
        *o = d - f + mu * p;
    }
    for (((o, d), f), p) in out.v.iter_mut().zip(&du.v).zip(&fv.v).zip(&phi.v) {
        *o = d - f + mu * p;
    }
}

fn max_diff(a: &EdgeVectorField, b: &EdgeVectorField) -> f64 {
    a.h.iter()
        .zip(&b.h)
        .chain(a.v.iter().zip(&b.v))
        .fold(0.0, |m: f64, (x, y)| m.max((x - y).abs()))
}

/// `w <- shrink(w + gamma p)` node by node.
fn block_update(w: &mut NodeVectors, p: &NodeVectors, gamma: f64, t: f64, threshold: Threshold) {
    for idx in 0..w.len() {
        let arg = (w.x[idx] + gamma * p.x[idx], w.y[idx] + gamma * p.y[idx]);
        let (nx, ny) = match threshold {
            Threshold::Updated => vector_shrink(arg, t),
            Threshold::PreviousIterate => {
                let m = w.x[idx].hypot(w.y[idx]);
                let f = 1.0 - 1.0 / (m / t).max(1.0);
                (arg.0 * f, arg.1 * f)
            }
        };
        w.x[idx] = nx;
        w.y[idx] = ny;
    }
}

/// Dual TV of a cell field.
///
/// Hitting `max_iter` is reported through `converged = false`; a non-finite
/// iterate is an error.
pub fn tv_dual(field: &CellField, params: &DualTvParams) -> Result<DualTvResult> {
    let n = field.n();
    params.validate(n)?;
    let dx = field.dx();
    let du = forward_differences(field);
    let feas_bound = params.feas_tol * du.max_abs().max(1.0);
    let (mu, gamma) = (params.mu, params.gamma);
    let t = gamma * mu;

    let (mut v, mut phi) = match &params.warm_start {
        Some((v, phi)) => (v.clone(), phi.clone()),
        None => (GradField::initial(&du), EdgeVectorField::zeros(n)),
    };
    let mut images = BlockImages::new(&v);
    let mut r = EdgeVectorField::zeros(n);
    let mut p = [
        NodeVectors::zeros((n + 1) * n),
        NodeVectors::zeros(n * (n + 1)),
        NodeVectors::zeros(n * n),
    ];

    let mut prev = v.mixed_norm();
    let mut trace = Vec::new();
    let mut cur = prev;
    let mut residual = max_diff(&images.total, &du);
    let mut iterations = 0;
    let mut converged = false;

    for it in 1..=params.max_iter {
        iterations = it;
        match params.sweep {
            Sweep::Alternating => {
                for k in 1..=3 {
                    shifted_residual(&mut r, &du, &images.total, &phi, mu);
                    p_into(k, &r, &mut p[k - 1]);
                    let w = v.block_mut(k);
                    block_update(w, &p[k - 1], gamma, t, params.threshold);
                    images.refresh(k, v.block(k));
                    multiplier_step(&mut phi, &du, &images.total, mu);
                }
            }
            Sweep::Jacobi => {
                shifted_residual(&mut r, &du, &images.total, &phi, mu);
                for k in 1..=3 {
                    p_into(k, &r, &mut p[k - 1]);
                }
                for k in 1..=3 {
                    block_update(v.block_mut(k), &p[k - 1], gamma, t, params.threshold);
                }
                images = BlockImages::new(&v);
                multiplier_step(&mut phi, &du, &images.total, mu);
            }
        }
        cur = v.mixed_norm();
        residual = max_diff(&images.total, &du);
        if !cur.is_finite() || !residual.is_finite() {
            return Err(Error::DualNonFinite { iteration: it });
        }
        if params.trace {
            trace.push(TraceRow {
                iter: it,
                primal_norm: cur,
                dual_objective: dx * du.dot(&phi),
                residual,
            });
        }
        let gap_ok = params.gap_tol.is_infinite() || {
            let value = dx * cur;
            (value - dx * du.dot(&phi)).abs() <= params.gap_tol * value.max(1.0)
        };
        if (cur - prev).abs() <= params.epsilon && residual <= feas_bound && gap_ok {
            converged = true;
            break;
        }
        prev = cur;
    }

    Ok(DualTvResult {
        value: dx * cur,
        iterations,
        primal_norm: cur,
        dual_objective: dx * du.dot(&phi),
        feasibility_residual: residual,
        converged,
        v,
        phi,
        trace,
    })
}

/// Outcome of a grid search over `mu`.
#[derive(Clone, Debug)]
pub struct MuSearchResult {
    pub mu: f64,
    pub delta: f64,
    /// `(mu, tv_d, converged)` for every candidate.
    pub evaluations: Vec<(f64, f64, bool)>,
}

/// Candidates `step, 2 step, ...` strictly below 1.
pub fn mu_candidates(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step < 1.0) {
        return Err(Error::InvalidParameter(format!("mu step must lie in (0, 1), got {step}")));
    }
    Ok((1..)
        .map(|k| k as f64 * step)
        .take_while(|&m| m < 1.0 - 1e-12)
        .collect())
}

/// The `mu` minimizing `|tv_d - tv_reference|` over [`mu_candidates`].
/// Other solver settings come from `base`. Ties keep the smaller `mu`.
pub fn mu_search(
    field: &CellField,
    tv_reference: f64,
    step: f64,
    base: &DualTvParams,
) -> Result<MuSearchResult> {
    let candidates = mu_candidates(step)?;
    let evaluations = candidates
        .par_iter()
        .map(|&mu| {
            let params = DualTvParams {
                mu,
                ..base.clone()
            };
            tv_dual(field, &params).map(|r| (mu, r.value, r.converged))
        })
        .collect::<Result<Vec<_>>>()?;
    let (mu, delta) = evaluations
        .iter()
        .map(|&(mu, tv, _)| (mu, (tv - tv_reference).abs()))
        .fold((f64::NAN, f64::INFINITY), |best, cand| {
            if cand.1 < best.1 {
                cand
            } else {
                best
            }
        });
    Ok(MuSearchResult {
        mu,
        delta,
        evaluations,
    })
}
