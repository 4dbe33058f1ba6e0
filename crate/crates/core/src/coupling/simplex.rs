//! Feasibility of small equality systems `A x = b, x >= 0`.
//!
//! The LP is handed to `minilp`; the returned vertex is re-solved from the
//! original data to remove accumulated factorization error.

/// Outcome of [`feasible_point`].
#[derive(Debug, Clone)]
pub struct Phase1 {
    /// Solution vector (meaningful only when `infeasibility` is negligible).
    pub x: Vec<f64>,
    /// Smallest achievable `|A x - b|_1` over `x >= 0`; zero for feasible systems.
    pub infeasibility: f64,
    /// Largest absolute residual of `A x - b`.
    pub residual: f64,
}

/// Find a nonnegative solution of `A x = b`. Rows of `a` are dense.
///
/// Solves `min |A x - b|_1` over `x >= 0` with split residual variables, so
/// the LP is always feasible and its optimum measures infeasibility.
pub fn feasible_point(a: &[Vec<f64>], b: &[f64]) -> Phase1 {
    use minilp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem};
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let xs: Vec<_> = (0..n).map(|_| lp.add_var(0.0, (0.0, f64::INFINITY))).collect();
    for (row, &rhs) in a.iter().zip(b) {
        let up = lp.add_var(1.0, (0.0, f64::INFINITY));
        let down = lp.add_var(1.0, (0.0, f64::INFINITY));
        let mut e = LinearExpr::empty();
        for (j, &c) in row.iter().enumerate() {
            if c != 0.0 {
                e.add(xs[j], c);
            }
        }
        e.add(up, 1.0);
        e.add(down, -1.0);
        lp.add_constraint(e, ComparisonOp::Eq, rhs);
    }
    let mut x = vec![0.0; n];
    let infeasibility = match lp.solve() {
        Ok(sol) => {
            for (j, v) in xs.iter().enumerate() {
                x[j] = sol[*v].max(0.0);
            }
            sol.objective().max(0.0)
        }
        // the residual variables keep the LP feasible and bounded
        Err(_) => b.iter().map(|v| v.abs()).sum(),
    };
    let support: Vec<usize> = (0..n).filter(|&j| x[j] > 0.0).collect();
    refine(a, b, &support, &mut x);
    let residual = residual(a, b, &x);
    Phase1 { x, infeasibility, residual }
}

/// Re-solve the support columns against the original system by least squares
/// on the normal equations of the support submatrix, keeping other entries at zero.
fn refine(a: &[Vec<f64>], b: &[f64], support: &[usize], x: &mut [f64]) {
    let cols = support;
    let k = cols.len();
    if k == 0 {
        return;
    }
    let m = a.len();
    // Gram matrix and right-hand side.
    let mut g = vec![vec![0.0; k + 1]; k];
    for (p, &cp) in cols.iter().enumerate() {
        for (q, &cq) in cols.iter().enumerate() {
            g[p][q] = (0..m).map(|i| a[i][cp] * a[i][cq]).sum();
        }
        g[p][k] = (0..m).map(|i| a[i][cp] * b[i]).sum();
    }
    let Some(sol) = solve_dense(g) else {
        return;
    };
    if sol.iter().any(|v| !v.is_finite() || *v < -1e-12) {
        return;
    }
    let mut cand = x.to_vec();
    for (p, &cp) in cols.iter().enumerate() {
        cand[cp] = sol[p].max(0.0);
    }
    if residual(a, b, &cand) <= residual(a, b, x) {
        x.copy_from_slice(&cand);
    }
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn solve_dense(mut g: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let k = g.len();
    for c in 0..k {
        let p = (c..k).max_by(|&i, &j| g[i][c].abs().total_cmp(&g[j][c].abs()))?;
        if g[p][c].abs() < 1e-300 {
            return None;
        }
        g.swap(c, p);
        for i in c + 1..k {
            let f = g[i][c] / g[c][c];
            if f != 0.0 {
                for j in c..=k {
                    g[i][j] -= f * g[c][j];
                }
            }
        }
    }
    let mut x = vec![0.0; k];
    for c in (0..k).rev() {
        let s: f64 = (c + 1..k).map(|j| g[c][j] * x[j]).sum();
        x[c] = (g[c][k] - s) / g[c][c];
    }
    Some(x)
}

/// Largest absolute residual of `A x - b`.
pub fn residual(a: &[Vec<f64>], b: &[f64], x: &[f64]) -> f64 {
    a.iter().zip(b).map(|(row, bi)| (row.iter().zip(x).map(|(r, v)| r * v).sum::<f64>() - bi).abs()).fold(0.0, f64::max)
}
