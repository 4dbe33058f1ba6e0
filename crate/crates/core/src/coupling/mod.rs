//! Order-statistic laws on signal grids, mean-preserving-contraction checks,
//! signal-window solving and martingale couplings.

pub mod simplex;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::prior::PriorStats;
use crate::util::binom;

/// Tolerance of the contraction check and of coupling constraints.
pub const MPC_TOL: f64 = 1e-9;

/// Number of halvings tried by the window search.
pub const MAX_HALVINGS: usize = 40;

/// Finite distribution on ascending atoms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteDist {
    pub atoms: Vec<f64>,
    pub pmf: Vec<f64>,
}

/// Law of the second-highest signal given a designated winner.
pub type SecmaxDistribution = DiscreteDist;

impl DiscreteDist {
    /// Build from (atom, mass) pairs, merging equal atoms and sorting.
    pub fn from_pairs(mut pairs: Vec<(f64, f64)>) -> Self {
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut atoms: Vec<f64> = Vec::new();
        let mut pmf: Vec<f64> = Vec::new();
        for (x, p) in pairs {
            if atoms.last() == Some(&x) {
                *pmf.last_mut().expect("aligned") += p;
            } else {
                atoms.push(x);
                pmf.push(p);
            }
        }
        DiscreteDist { atoms, pmf }
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().zip(&self.pmf).map(|(x, p)| x * p).sum()
    }

    pub fn total(&self) -> f64 {
        self.pmf.iter().sum()
    }

    /// `E[max(0, x - X)]`, the integrated CDF at `x`.
    pub fn integrated_cdf(&self, x: f64) -> f64 {
        self.atoms.iter().zip(&self.pmf).map(|(a, p)| p * (x - a).max(0.0)).sum()
    }

    /// Number of atoms with positive mass.
    pub fn support_size(&self) -> usize {
        self.pmf.iter().filter(|p| **p > 0.0).count()
    }
}

/// Atoms `ŝ + k L / (K + 1)` for `k = 1..=K`, strictly inside `(ŝ, ŝ + L)`.
pub fn window_grid(s_hat: f64, len: f64, k: usize) -> Vec<f64> {
    let h = len / (k as f64 + 1.0);
    (1..=k).map(|j| s_hat + j as f64 * h).collect()
}

/// Exact pmf of the second-highest of `n` iid uniform draws on `grid`, which is
/// also its law conditional on a designated bidder winning under a uniform
/// tie-break.
pub fn secmax_dist_uniform(n: usize, grid: &[f64]) -> SecmaxDistribution {
    let pmf = secmax_pmf_counts(n, grid.len());
    DiscreteDist { atoms: grid.to_vec(), pmf }
}

/// Second-order-statistic pmf over grid indices `0..k`.
fn secmax_pmf_counts(n: usize, k: usize) -> Vec<f64> {
    // Number of profiles whose second-highest index is at most j.
    let at_most = |j: i64| -> u128 {
        if j < 0 {
            return 0;
        }
        let f = (j + 1) as u128;
        let above = k as u128 - f;
        f.pow(n as u32) + n as u128 * f.pow(n as u32 - 1) * above
    };
    let total = (k as u128).pow(n as u32) as f64;
    (0..k as i64).map(|j| (at_most(j) - at_most(j - 1)) as f64 / total).collect()
}

/// `E[secmax] - ŝ` on the `K`-atom window grid of length `L` for `n` bidders.
pub fn mean_offset(n: usize, len: f64, k: usize) -> f64 {
    let h = len / (k as f64 + 1.0);
    secmax_pmf_counts(n, k).iter().enumerate().map(|(j, p)| p * (j as f64 + 1.0) * h).sum()
}

/// Result of [`mpc_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MpcReport {
    pub ok: bool,
    /// `mean(F) - mean(G)`.
    pub mean_gap: f64,
    /// Largest `E[(x - G)^+] - E[(x - F)^+]` over merged atoms, floored at 0.
    pub worst_sosd_violation: f64,
}

/// Whether `g` is a mean-preserving contraction of `f`.
pub fn mpc_check(f: &DiscreteDist, g: &DiscreteDist) -> MpcReport {
    let mean_gap = f.mean() - g.mean();
    let mut worst: f64 = 0.0;
    for &x in f.atoms.iter().chain(&g.atoms) {
        worst = worst.max(g.integrated_cdf(x) - f.integrated_cdf(x));
    }
    MpcReport { ok: mean_gap.abs() <= MPC_TOL && worst <= MPC_TOL, mean_gap, worst_sosd_violation: worst }
}

/// A solved signal window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignalWindow {
    /// Lower end `ŝ`.
    pub s_hat: f64,
    /// Length `L`.
    pub len: f64,
    /// Number of grid atoms.
    pub k: usize,
    /// Halvings performed before success.
    pub halvings: usize,
}

impl SignalWindow {
    pub fn grid(&self) -> Vec<f64> {
        window_grid(self.s_hat, self.len, self.k)
    }

    /// Upper end `ŝ + L`.
    pub fn s_bar(&self) -> f64 {
        self.s_hat + self.len
    }
}

/// The modified prior as a distribution over the value set.
pub fn modified_prior_dist(stats: &PriorStats, values: &[f64]) -> DiscreteDist {
    DiscreteDist { atoms: values.to_vec(), pmf: stats.modified_prior.clone() }
}

/// Largest `L` in `ε_cap, ε_cap/2, …` whose secmax law on `(ŝ, ŝ + L)`, with
/// `ŝ` chosen to match means, is a contraction of the modified prior.
pub fn solve_signal_window(
    stats: &PriorStats,
    values: &[f64],
    n: usize,
    eps_cap: f64,
    k: usize,
) -> Result<SignalWindow> {
    solve_window_with(stats, values, eps_cap, k, |s_hat, len| {
        let g = secmax_dist_uniform(n, &window_grid(s_hat, len, k));
        (g, mean_offset(n, len, k))
    })
}

/// Window search with a caller-supplied target law. `target(ŝ, L)` returns the
/// target distribution and its mean offset from `ŝ`; the offset must not
/// depend on `ŝ`.
pub fn solve_window_with<F>(
    stats: &PriorStats,
    values: &[f64],
    eps_cap: f64,
    k: usize,
    target: F,
) -> Result<SignalWindow>
where
    F: Fn(f64, f64) -> (DiscreteDist, f64),
{
    if !(eps_cap > 0.0) || k < 2 {
        return Err(Error::InvalidParameter(format!("need eps_cap > 0 and K >= 2, got {eps_cap}, {k}")));
    }
    let f = modified_prior_dist(stats, values);
    let top = f.atoms.iter().zip(&f.pmf).filter(|(_, p)| **p > 0.0).map(|(a, _)| *a).fold(f64::NEG_INFINITY, f64::max);
    let mut len = eps_cap;
    for halvings in 0..=MAX_HALVINGS {
        let (_, offset) = target(0.0, len);
        let s_hat = stats.v_hat - offset;
        if s_hat >= 0.0 && s_hat + len <= top {
            let (g, _) = target(s_hat, len);
            if mpc_check(&f, &g).ok {
                return Ok(SignalWindow { s_hat, len, k, halvings });
            }
        }
        len /= 2.0;
    }
    Err(Error::WindowUnderflow { halvings: MAX_HALVINGS, last_len: 2.0 * len })
}

/// Joint mass linking target atoms to value atoms with per-atom mean constraints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MartingaleCoupling {
    /// Target (signal or posterior-mean) atoms.
    pub signal_atoms: Vec<f64>,
    /// Value atoms, aligned with the source distribution.
    pub value_atoms: Vec<f64>,
    /// `q[t][v]`.
    pub q: Vec<Vec<f64>>,
}

/// Constraint residuals of a coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingResiduals {
    pub min_entry: f64,
    pub row_mass: f64,
    pub row_mean: f64,
    pub column_mass: f64,
}

impl CouplingResiduals {
    pub fn max(&self) -> f64 {
        (-self.min_entry).max(0.0).max(self.row_mass).max(self.row_mean).max(self.column_mass)
    }
}

impl MartingaleCoupling {
    /// Residuals against the marginals `f` (values) and `g` (targets).
    pub fn residuals(&self, f: &DiscreteDist, g: &DiscreteDist) -> CouplingResiduals {
        let mut r = CouplingResiduals { min_entry: 0.0, row_mass: 0.0, row_mean: 0.0, column_mass: 0.0 };
        for (t, row) in self.q.iter().enumerate() {
            let mass: f64 = row.iter().sum();
            let mean: f64 = row.iter().zip(&self.value_atoms).map(|(q, v)| q * v).sum();
            r.row_mass = r.row_mass.max((mass - g.pmf[t]).abs());
            r.row_mean = r.row_mean.max((mean - g.atoms[t] * g.pmf[t]).abs());
            r.min_entry = r.min_entry.min(row.iter().copied().fold(0.0, f64::min));
        }
        for (v, fv) in f.pmf.iter().enumerate() {
            let col: f64 = self.q.iter().map(|row| row[v]).sum();
            r.column_mass = r.column_mass.max((col - fv).abs());
        }
        r
    }

    /// Conditional value law at target atom `t` (zero row gives zeros).
    pub fn conditional(&self, t: usize) -> Vec<f64> {
        let mass: f64 = self.q[t].iter().sum();
        if mass > 0.0 {
            self.q[t].iter().map(|x| x / mass).collect()
        } else {
            vec![0.0; self.value_atoms.len()]
        }
    }
}

/// Solve for a martingale coupling between values `f` and targets `g`.
pub fn martingale_coupling(f: &DiscreteDist, g: &DiscreteDist) -> Result<MartingaleCoupling> {
    let rows: Vec<usize> = (0..g.atoms.len()).filter(|&t| g.pmf[t] > 0.0).collect();
    let cols: Vec<usize> = (0..f.atoms.len()).filter(|&v| f.pmf[v] > 0.0).collect();
    let nv = cols.len();
    let nvar = rows.len() * nv;
    let mut a: Vec<Vec<f64>> = Vec::new();
    let mut b: Vec<f64> = Vec::new();
    for (r, &t) in rows.iter().enumerate() {
        let mut mass = vec![0.0; nvar];
        let mut mean = vec![0.0; nvar];
        for (c, &v) in cols.iter().enumerate() {
            mass[r * nv + c] = 1.0;
            mean[r * nv + c] = f.atoms[v];
        }
        a.push(mass);
        b.push(g.pmf[t]);
        a.push(mean);
        b.push(g.atoms[t] * g.pmf[t]);
    }
    for (c, &v) in cols.iter().enumerate() {
        let mut col = vec![0.0; nvar];
        for r in 0..rows.len() {
            col[r * nv + c] = 1.0;
        }
        a.push(col);
        b.push(f.pmf[v]);
    }
    let sol = simplex::feasible_point(&a, &b);
    let mut q = vec![vec![0.0; f.atoms.len()]; g.atoms.len()];
    for (r, &t) in rows.iter().enumerate() {
        for (c, &v) in cols.iter().enumerate() {
            q[t][v] = sol.x[r * nv + c];
        }
    }
    let coupling = MartingaleCoupling { signal_atoms: g.atoms.clone(), value_atoms: f.atoms.clone(), q };
    let residual = coupling.residuals(f, g).max();
    let mass_outside: f64 = (f.total() - g.total()).abs();
    if sol.infeasibility > MPC_TOL || residual > MPC_TOL || mass_outside > MPC_TOL {
        return Err(Error::CouplingInfeasible { residual: residual.max(sol.infeasibility) });
    }
    Ok(coupling)
}

/// Kink of the strict value target: `(s_i + ŝ) / 2`.
pub fn kink(s_i: f64, s_hat: f64) -> f64 {
    (s_i + s_hat) / 2.0
}

/// Winner posterior-mean target at own signal `s_i` and second-highest signal `y`.
pub fn strict_value_target(s_i: f64, y: f64, s_hat: f64, eps: f64, n: usize) -> Result<f64> {
    if !(s_hat < y && y <= s_i) {
        return Err(Error::OutOfWindow(format!("need ŝ < y <= s_i, got ŝ={s_hat}, y={y}, s_i={s_i}")));
    }
    Ok(strict_target_branch(s_i, y, s_hat, eps, n, y < kink(s_i, s_hat)))
}

/// Strict target with the branch chosen by the caller: `below_kink` selects the
/// losing region.
fn strict_target_branch(s_i: f64, y: f64, s_hat: f64, eps: f64, n: usize, below_kink: bool) -> f64 {
    let n = n as f64;
    if below_kink {
        y - (y - s_hat) * eps / (2.0 * n)
    } else {
        y + (s_i - y) * eps / n
    }
}

/// Strict-construction target law resolved by (own grid index, second-highest grid index).
#[derive(Debug, Clone, PartialEq)]
pub struct StrictTarget {
    /// `(top, sec)` grid indices with `top >= sec`; equal indices are ties.
    pub pairs: Vec<(usize, usize)>,
    /// Target posterior mean per pair.
    pub y: Vec<f64>,
    /// Probability per pair given the designated winner.
    pub pmf: Vec<f64>,
}

impl StrictTarget {
    pub fn dist(&self) -> DiscreteDist {
        DiscreteDist::from_pairs(self.y.iter().copied().zip(self.pmf.iter().copied()).collect())
    }

    pub fn mean(&self) -> f64 {
        self.y.iter().zip(&self.pmf).map(|(y, p)| y * p).sum()
    }
}

/// Target pairs on a window grid for `n` bidders.
pub fn strict_target(n: usize, grid: &[f64], s_hat: f64, eps: f64) -> StrictTarget {
    let k = grid.len();
    let total = (k as f64).powi(n as i32);
    let mut out = StrictTarget { pairs: Vec::new(), y: Vec::new(), pmf: Vec::new() };
    for top in 0..k {
        for sec in 0..=top {
            let count = if top > sec {
                // opponents all at most `sec`, at least one equal
                ((sec + 1) as f64).powi(n as i32 - 1) - (sec as f64).powi(n as i32 - 1)
            } else {
                // `j` opponents tie at the top, the rest strictly below
                (1..n).map(|j| binom(n - 1, j) * (top as f64).powi((n - 1 - j) as i32) / (j + 1) as f64).sum()
            };
            if count == 0.0 {
                continue;
            }
            let y = if top == sec {
                grid[top]
            } else {
                // grid offsets from ŝ are (j + 1) h, so the kink test is exact on indices
                strict_target_branch(grid[top], grid[sec], s_hat, eps, n, 2 * (sec + 1) < top + 1)
            };
            out.pairs.push((top, sec));
            out.y.push(y);
            out.pmf.push(n as f64 * count / total);
        }
    }
    out
}

/// Pushforward of `(s_i, secmax)` under the strict value target, given a designated winner.
pub fn strict_target_distribution(n: usize, grid: &[f64], s_hat: f64, eps: f64) -> DiscreteDist {
    strict_target(n, grid, s_hat, eps).dist()
}

/// Knots `ŝ + j h`, `j = 0..=K+1`, bracketing every window grid atom and target.
pub fn knots(window: &SignalWindow) -> Vec<f64> {
    let h = window.len / (window.k as f64 + 1.0);
    (0..=window.k + 1).map(|j| window.s_hat + j as f64 * h).collect()
}

/// Barycentric split of `y` onto its two bracketing knots: `(lower index, upper weight)`.
pub fn bracket(knots: &[f64], y: f64) -> (usize, f64) {
    let last = knots.len() - 2;
    let j = knots.partition_point(|&x| x <= y).saturating_sub(1).min(last);
    let w = ((y - knots[j]) / (knots[j + 1] - knots[j])).clamp(0.0, 1.0);
    (j, w)
}

/// Mean-preserving spread of a target law onto the knots.
pub fn project_to_knots(knots: &[f64], target: &StrictTarget) -> DiscreteDist {
    let mut pmf = vec![0.0; knots.len()];
    for (y, p) in target.y.iter().zip(&target.pmf) {
        let (j, w) = bracket(knots, *y);
        pmf[j] += p * (1.0 - w);
        pmf[j + 1] += p * w;
    }
    DiscreteDist { atoms: knots.to_vec(), pmf }
}

/// Mean offset of the strict target from `ŝ`, for window length `L`.
pub fn strict_mean_offset(n: usize, len: f64, k: usize, eps: f64) -> f64 {
    strict_target(n, &window_grid(0.0, len, k), 0.0, eps).mean()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::prior::compute_stats;
    use crate::util::{argmax_set, decode};

    /// Brute force: enumerate all profiles, credit bidder 0 with weight 1/m when it is top.
    fn secmax_brute(n: usize, grid: &[f64]) -> Vec<f64> {
        let k = grid.len();
        let mut pmf = vec![0.0; k];
        let total = (k as u64).pow(n as u32);
        let mut win = 0.0;
        for id in 0..total {
            let s = decode(id, &vec![k; n]);
            let top = argmax_set(&s);
            if top.contains(&0) {
                let w = 1.0 / top.len() as f64;
                let mut sorted = s.clone();
                sorted.sort_unstable();
                pmf[sorted[n - 2]] += w;
                win += w;
            }
        }
        pmf.iter().map(|p| p / win).collect()
    }

    #[test]
    fn degenerate_split_is_coupled() {
        // every atom split in two; once failed from a roundoff-negative ratio
        let base = DiscreteDist::from_pairs(vec![
            (0.8, 5.0 / 17.0),
            (0.65, 2.0 / 17.0),
            (0.1, 5.0 / 17.0),
            (0.85, 5.0 / 17.0),
        ]);
        let spread = DiscreteDist::from_pairs(
            base.atoms.iter().zip(&base.pmf).flat_map(|(&x, &p)| [(x - 0.01, p / 2.0), (x + 0.01, p / 2.0)]).collect(),
        );
        let c = martingale_coupling(&spread, &base).unwrap();
        assert!(c.residuals(&spread, &base).max() < 1e-9);
    }

    #[test]
    fn secmax_matches_enumeration() {
        for n in 2..=4 {
            for k in [2usize, 3, 5, 8] {
                let grid = window_grid(0.1, 0.4, k);
                let closed = secmax_dist_uniform(n, &grid);
                let brute = secmax_brute(n, &grid);
                for (a, b) in closed.pmf.iter().zip(&brute) {
                    assert!((a - b).abs() < 1e-14, "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn two_atom_hand_enumeration() {
        // profiles (a,a),(a,b),(b,a),(b,b): secmax is b only on (b,b)
        let g = secmax_dist_uniform(2, &[0.2, 0.6]);
        assert_eq!(g.pmf, vec![0.75, 0.25]);
    }

    #[test]
    fn two_bidder_closed_form() {
        let k = 10;
        let g = secmax_dist_uniform(2, &window_grid(0.0, 1.0, k));
        for (j, p) in g.pmf.iter().enumerate() {
            let expect = (2 * k - 2 * j - 1) as f64 / (k * k) as f64;
            assert!((p - expect).abs() < 1e-15);
        }
        assert!(g.pmf.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn mean_offset_converges() {
        for (n, limit) in [(2usize, 1.0 / 3.0), (3, 0.5), (5, 2.0 / 3.0)] {
            let mut prev = f64::INFINITY;
            for k in [8usize, 32, 128] {
                let err = (mean_offset(n, 1.0, k) - limit).abs();
                assert!(err < 2.0 / k as f64, "n={n} k={k} err={err}");
                assert!(err <= prev + 1e-15);
                prev = err;
            }
        }
        assert!((mean_offset(2, 0.3, 4096) - 0.1).abs() < 1e-3);
        assert!(mean_offset(2, 1e-12, 64) < 1e-12);
    }

    #[test]
    fn mpc_examples() {
        let f = DiscreteDist { atoms: vec![0.0, 1.0], pmf: vec![0.25, 0.75] };
        let g = secmax_dist_uniform(2, &window_grid(0.75 - mean_offset(2, 0.1, 16), 0.1, 16));
        assert!(mpc_check(&f, &g).ok);
        let point = DiscreteDist { atoms: vec![0.75], pmf: vec![1.0] };
        let spread = DiscreteDist { atoms: vec![0.7, 0.8], pmf: vec![0.5, 0.5] };
        let r = mpc_check(&point, &spread);
        assert!(!r.ok);
        assert!(r.worst_sosd_violation > 0.01);
        let same = mpc_check(&f, &f);
        assert!(same.ok && same.mean_gap == 0.0);
    }

    #[test]
    fn window_on_p1() {
        let prior = fixtures::p1();
        let stats = compute_stats(&prior);
        let w = solve_signal_window(&stats, prior.values(), 2, 0.3, 64).unwrap();
        assert!(w.len > 0.0 && w.len <= 0.3);
        assert!((w.s_hat - (0.75 - mean_offset(2, w.len, 64))).abs() < 1e-15);
        let again = solve_signal_window(&stats, prior.values(), 2, 0.3, 64).unwrap();
        assert_eq!(w, again);
    }

    #[test]
    fn window_underflow_on_point_mass() {
        let prior = fixtures::constant(3, 1.0);
        let stats = compute_stats(&prior);
        let e = solve_signal_window(&stats, prior.values(), 3, 0.3, 16).unwrap_err();
        assert!(matches!(e, Error::WindowUnderflow { .. }));
    }

    #[test]
    fn coupling_examples() {
        let f = DiscreteDist { atoms: vec![0.0, 1.0], pmf: vec![0.25, 0.75] };
        let g = DiscreteDist { atoms: vec![0.75], pmf: vec![1.0] };
        let c = martingale_coupling(&f, &g).unwrap();
        assert!((c.q[0][0] - 0.25).abs() < 1e-12 && (c.q[0][1] - 0.75).abs() < 1e-12);

        let f = DiscreteDist { atoms: vec![0.0, 1.0], pmf: vec![0.5, 0.5] };
        let g = DiscreteDist { atoms: vec![0.25, 0.75], pmf: vec![0.5, 0.5] };
        let c = martingale_coupling(&f, &g).unwrap();
        let expect = [[0.375, 0.125], [0.125, 0.375]];
        for t in 0..2 {
            for v in 0..2 {
                assert!((c.q[t][v] - expect[t][v]).abs() < 1e-12);
            }
        }

        let f = DiscreteDist { atoms: vec![0.2, 0.5, 0.9], pmf: vec![0.3, 0.3, 0.4] };
        let c = martingale_coupling(&f, &f).unwrap();
        for t in 0..3 {
            for v in 0..3 {
                let d = if t == v { f.pmf[t] } else { 0.0 };
                assert!((c.q[t][v] - d).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn coupling_rejects_spread() {
        let f = DiscreteDist { atoms: vec![0.75], pmf: vec![1.0] };
        let g = DiscreteDist { atoms: vec![0.7, 0.8], pmf: vec![0.5, 0.5] };
        assert!(matches!(martingale_coupling(&f, &g), Err(Error::CouplingInfeasible { .. })));
    }

    #[test]
    fn strict_target_examples() {
        let y = strict_value_target(0.8, 0.72, 0.7, 0.1, 2).unwrap();
        assert!((y - 0.7195).abs() < 1e-12);
        let y = strict_value_target(0.8, 0.78, 0.7, 0.1, 2).unwrap();
        assert!((y - 0.781).abs() < 1e-12);
        // boundary goes to the upper branch
        let y = strict_value_target(0.8, 0.75, 0.7, 0.1, 2).unwrap();
        assert!((y - (0.75 + 0.05 * 0.1 / 2.0)).abs() < 1e-12);
        assert!(matches!(strict_value_target(0.8, 0.7, 0.7, 0.1, 2), Err(Error::OutOfWindow(_))));
        assert!((kink(0.8, 0.7) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn strict_target_eps_zero_is_secmax() {
        for n in [2usize, 3] {
            let grid = window_grid(0.5, 0.2, 6);
            let a = strict_target_distribution(n, &grid, 0.5, 0.0);
            let b = secmax_dist_uniform(n, &grid);
            assert_eq!(a.atoms, b.atoms);
            for (x, y) in a.pmf.iter().zip(&b.pmf) {
                assert!((x - y).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn strict_target_two_atoms_by_hand() {
        // grid {a, b}; designated bidder 0, n = 2
        // (a,a) tie w/2, (b,a) y(b,a), (b,b) tie w/2 ; each profile 1/4, P(win)=1/2
        let (s_hat, eps) = (0.0, 0.1);
        let grid = [0.3, 0.6];
        let t = strict_target(2, &grid, s_hat, eps);
        let y_ba = strict_value_target(0.6, 0.3, s_hat, eps, 2).unwrap();
        let mut table: Vec<(f64, f64)> = t.y.iter().copied().zip(t.pmf.iter().copied()).collect();
        table.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut expect = vec![(0.3, 0.25), (y_ba, 0.5), (0.6, 0.25)];
        expect.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (a, b) in table.iter().zip(&expect) {
            assert!((a.0 - b.0).abs() < 1e-15 && (a.1 - b.1).abs() < 1e-15);
        }
    }

    #[test]
    fn strict_mean_offset_bounded() {
        for eps in [0.05, 0.1, 0.3] {
            let len = 0.2;
            let d = (strict_mean_offset(2, len, 16, eps) - mean_offset(2, len, 16)).abs();
            assert!(d <= eps * len);
        }
    }

    #[test]
    fn strict_sign_pattern() {
        let (s_hat, s_i, eps) = (0.5, 0.7, 0.1);
        for j in 1..100 {
            let y = s_hat + (s_i - s_hat) * j as f64 / 100.0;
            let d = strict_value_target(s_i, y, s_hat, eps, 3).unwrap() - y;
            if y < kink(s_i, s_hat) {
                assert!(d < 0.0);
            } else if y > kink(s_i, s_hat) && y < s_i {
                assert!(d > 0.0);
            }
        }
    }

    #[test]
    fn knot_projection_preserves_mean() {
        let w = SignalWindow { s_hat: 0.6, len: 0.1, k: 8, halvings: 0 };
        let t = strict_target(2, &w.grid(), w.s_hat, 0.1);
        let p = project_to_knots(&knots(&w), &t);
        assert!((p.mean() - t.mean()).abs() < 1e-14);
        assert!((p.total() - 1.0).abs() < 1e-14);
        assert!(mpc_check(&p, &t.dist()).ok);
    }

    #[test]
    fn strict_offset_is_translation_invariant() {
        for k in [16, 32, 64] {
            for s_hat in [0.0, 0.3, 0.716181490384615, 0.9] {
                let off = strict_mean_offset(2, 0.1, k, 0.1);
                let t = strict_target(2, &window_grid(s_hat, 0.1, k), s_hat, 0.1);
                assert!((t.mean() - s_hat - off).abs() < 1e-12, "K={k} s_hat={s_hat}");
            }
        }
    }
}
