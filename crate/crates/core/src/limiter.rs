//! Hierarchical moment limiter for the degree-one DG basis.

use crate::dg::DGState;

/// Default scaling of neighbour differences; exact for bilinear data.
pub const DEFAULT_ALPHA: f64 = 0.5;

/// The argument of least magnitude if all share a strict sign, else 0.
pub fn minmod(args: &[f64]) -> f64 {
    let Some(&first) = args.first() else {
        return 0.0;
    };
    if first > 0.0 && args.iter().all(|&a| a > 0.0) {
        args.iter().copied().fold(f64::INFINITY, f64::min)
    } else if first < 0.0 && args.iter().all(|&a| a < 0.0) {
        args.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    } else {
        0.0
    }
}

/// Limits `c11` against scaled neighbour differences of `c01` (in x) and
/// `c10` (in y). Only if that changes `c11` are `c10` and `c01` limited
/// against differences of the means. Missing neighbours drop their argument;
/// `c00` is never touched.
pub fn moment_limit(state: &DGState, alpha: f64) -> DGState {
    let grid = *state.grid();
    let n = grid.n();
    let c = |i: usize, j: usize| state.cell(i, j);
    let mut out = state.clone();
    let mut args = Vec::with_capacity(5);

    for i in 0..n {
        for j in 0..n {
            let me = c(i, j);
            args.clear();
            args.push(me[3]);
            if i + 1 < n {
                args.push(alpha * (c(i + 1, j)[2] - me[2]));
            }
            if i > 0 {
                args.push(alpha * (me[2] - c(i - 1, j)[2]));
            }
            if j + 1 < n {
                args.push(alpha * (c(i, j + 1)[1] - me[1]));
            }
            if j > 0 {
                args.push(alpha * (me[1] - c(i, j - 1)[1]));
            }
            let c11 = minmod(&args);
            if c11 == me[3] {
                continue;
            }

            args.clear();
            args.push(me[1]);
            if i + 1 < n {
                args.push(alpha * (c(i + 1, j)[0] - me[0]));
            }
            if i > 0 {
                args.push(alpha * (me[0] - c(i - 1, j)[0]));
            }
            let c10 = minmod(&args);

            args.clear();
            args.push(me[2]);
            if j + 1 < n {
                args.push(alpha * (c(i, j + 1)[0] - me[0]));
            }
            if j > 0 {
                args.push(alpha * (me[0] - c(i, j - 1)[0]));
            }
            let c01 = minmod(&args);

            out.coeffs[grid.idx(i, j)] = [me[0], c10, c01, c11];
        }
    }
    out
}
