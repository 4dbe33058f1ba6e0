//! Symmetric private-private structures built from a designated-winner
//! martingale coupling: exact full extraction and its strict perturbation.

use serde_json::json;

use crate::coupling::{
    bracket, knots, martingale_coupling, modified_prior_dist, project_to_knots, secmax_dist_uniform,
    solve_signal_window, solve_window_with, strict_mean_offset, strict_target, SignalWindow,
};
use crate::error::{Error, Result};
use crate::prior::{classify_prior, compute_stats, PriorClass, PriorStats, SymmetricPrior};
use crate::structure::{Alphabet, InfoStructure, JointBuilder};
use crate::util::decode;

fn reject_degenerate_max(prior: &SymmetricPrior) -> Result<()> {
    let found = classify_prior(prior);
    if found == PriorClass::DegenerateMax {
        return Err(Error::WrongPriorClass {
            expected: "BidderSurplusFriendly or General".into(),
            found: found.to_string(),
        });
    }
    Ok(())
}

/// Full-extraction structure on a `k`-atom window of length at most `eps_cap`.
///
/// Truthful bidding is a Bayes-Nash equilibrium whose revenue equals the
/// expected maximum value up to the tie mass of the grid.
pub fn build_full_extraction(prior: &SymmetricPrior, k: usize, eps_cap: f64) -> Result<InfoStructure> {
    reject_degenerate_max(prior)?;
    let n = prior.n();
    let stats = compute_stats(prior);
    let window = solve_signal_window(&stats, prior.values(), n, eps_cap, k)?;
    let grid = window.grid();
    let f = modified_prior_dist(&stats, prior.values());
    let coupling = martingale_coupling(&f, &secmax_dist_uniform(n, &grid))?;
    let rows: Vec<Vec<f64>> = (0..k).map(|t| coupling.conditional(t)).collect();
    let mut laws = vec![Vec::new(); k * k];
    for top in 0..k {
        for sec in 0..=top {
            laws[top * k + sec] = rows[sec].clone();
        }
    }
    let params = window_params(&window, json!({"K": k, "eps_cap": eps_cap}));
    Ok(assemble(prior, &stats, grid, &laws)?.with_construction("full-extraction", params))
}

/// Strict near-extraction structure: winner posterior means follow the
/// piecewise-linear strict target, so every allocation-changing deviation
/// strictly loses on no-tie events. Total bidder surplus is at most `eps`.
pub fn build_strict_eps(prior: &SymmetricPrior, eps: f64, k: usize) -> Result<InfoStructure> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("strict construction needs eps in (0, 1), got {eps}")));
    }
    reject_degenerate_max(prior)?;
    let n = prior.n();
    let stats = compute_stats(prior);
    let window = solve_window_with(&stats, prior.values(), eps, k, |s_hat, len| {
        let w = SignalWindow { s_hat, len, k, halvings: 0 };
        let target = strict_target(n, &w.grid(), s_hat, eps);
        (project_to_knots(&knots(&w), &target), strict_mean_offset(n, len, k, eps))
    })?;
    let grid = window.grid();
    let knots = knots(&window);
    let target = strict_target(n, &grid, window.s_hat, eps);
    let f = modified_prior_dist(&stats, prior.values());
    let coupling = martingale_coupling(&f, &project_to_knots(&knots, &target))?;
    let rows: Vec<Vec<f64>> = (0..knots.len()).map(|t| coupling.conditional(t)).collect();
    let mut laws = vec![Vec::new(); k * k];
    for (&(top, sec), &y) in target.pairs.iter().zip(&target.y) {
        let (j, w) = bracket(&knots, y);
        laws[top * k + sec] = rows[j].iter().zip(&rows[j + 1]).map(|(a, b)| (1.0 - w) * a + w * b).collect();
    }
    let params = window_params(&window, json!({"K": k, "eps": eps}));
    Ok(assemble(prior, &stats, grid, &laws)?.with_construction("strict-eps", params))
}

fn window_params(window: &SignalWindow, mut base: serde_json::Value) -> serde_json::Value {
    base["s_hat"] = json!(window.s_hat);
    base["L"] = json!(window.len);
    base["halvings"] = json!(window.halvings);
    base
}

/// Completion row: opponent-profile draw given the designated winner's value,
/// stored as value-profile ids for each choice of designated bidder.
#[derive(Debug, Clone)]
struct Draw {
    ids: Vec<u32>,
    p: f64,
}

/// Per designated-winner-value laws of the full value profile, by tie set.
struct Completion {
    /// `[mask][a]`, for masks containing bidder 0 with at least two members.
    tie: Vec<Vec<Vec<Draw>>>,
    /// `[a]` for profiles with a unique top signal.
    unique: Vec<Vec<Draw>>,
}

/// Split the tie-weighted prior between tie classes and unique-top profiles.
///
/// Tie demand for a set `T` at winner value `a` is filled first from profiles
/// where every member of `T` holds `a`, largest sets first, proportionally and
/// scaled by a common factor when supply runs short. Unmet demand is filled
/// proportionally from the remaining supply; whatever is left is the
/// unique-top law.
fn complete(prior: &SymmetricPrior, stats: &PriorStats, tie_demand: &[Vec<f64>], builder: &JointBuilder) -> Completion {
    let n = prior.n();
    let nv = prior.values().len();
    let full = 1usize << n;
    let mut supply: Vec<Vec<(Vec<usize>, f64)>> = vec![Vec::new(); nv];
    for (v, w) in &stats.tie_weighted {
        supply[v[0]].push((v.clone(), w / n as f64));
    }
    let to_draws = |rows: &[(Vec<usize>, f64)], scale: f64| -> Vec<Draw> {
        rows.iter()
            .filter(|(_, p)| *p > 0.0)
            .map(|(v, p)| Draw {
                ids: (0..n)
                    .map(|w| {
                        let mut u = v.clone();
                        u.swap(0, w);
                        builder.value_id(&u)
                    })
                    .collect(),
                p: p / scale,
            })
            .collect()
    };
    let mut tie = vec![vec![Vec::new(); nv]; full];
    let mut unique = vec![Vec::new(); nv];
    for a in 0..nv {
        let rows = &supply[a];
        if rows.is_empty() {
            continue;
        }
        let mut rem: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let mut grant: Vec<Vec<f64>> = vec![vec![0.0; rows.len()]; full];
        let mut leftover = vec![0.0; full];
        for m in (2..=n).rev() {
            let demand = tie_demand[m][a];
            let masks: Vec<usize> = (0..full).filter(|&t| t & 1 == 1 && t.count_ones() as usize == m).collect();
            if demand <= 0.0 {
                continue;
            }
            let mut request = vec![0.0; rows.len()];
            let mut req_by_mask: Vec<Vec<f64>> = Vec::with_capacity(masks.len());
            for &t in &masks {
                let compatible: Vec<bool> =
                    rows.iter().map(|(v, _)| (0..n).all(|j| t >> j & 1 == 0 || v[j] == a)).collect();
                let pool: f64 = rem.iter().zip(&compatible).filter(|(_, c)| **c).map(|(r, _)| r).sum();
                let req: Vec<f64> = rem
                    .iter()
                    .zip(&compatible)
                    .map(|(r, c)| if *c && pool > 0.0 { demand * r / pool } else { 0.0 })
                    .collect();
                for (x, r) in request.iter_mut().zip(&req) {
                    *x += r;
                }
                req_by_mask.push(req);
            }
            let theta = rem.iter().zip(&request).filter(|(_, q)| **q > 0.0).map(|(r, q)| r / q).fold(1.0, f64::min);
            for (&t, req) in masks.iter().zip(&req_by_mask) {
                let mut got = 0.0;
                for (idx, r) in req.iter().enumerate() {
                    let g = theta * r;
                    grant[t][idx] += g;
                    rem[idx] = (rem[idx] - g).max(0.0);
                    got += g;
                }
                leftover[t] = (demand - got).max(0.0);
            }
        }
        let pool: f64 = rem.iter().sum();
        let unmet: f64 = leftover.iter().sum();
        if unmet > 0.0 && pool > 0.0 {
            let scale = (unmet / pool).min(1.0);
            for t in 0..full {
                if leftover[t] > 0.0 {
                    for (idx, r) in rem.iter().enumerate() {
                        grant[t][idx] += leftover[t] / unmet * scale * r;
                    }
                }
            }
            for r in rem.iter_mut() {
                *r *= 1.0 - scale;
            }
        }
        for t in 0..full {
            let total: f64 = grant[t].iter().sum();
            if total > 0.0 {
                let g: Vec<(Vec<usize>, f64)> = rows.iter().zip(&grant[t]).map(|((v, _), g)| (v.clone(), *g)).collect();
                tie[t][a] = to_draws(&g, total);
            }
        }
        let total: f64 = rem.iter().sum();
        if total > 0.0 {
            let g: Vec<(Vec<usize>, f64)> = rows.iter().zip(&rem).map(|((v, _), r)| (v.clone(), *r)).collect();
            unique[a] = to_draws(&g, total);
        }
    }
    Completion { tie, unique }
}

/// Mix designated-winner components over the uniform product signal law.
///
/// `laws[top * K + sec]` is the winner's value law when its grid index is
/// `top` and the second-highest index is `sec`; ties use `sec == top`.
/// Designated winners among tied top signals are drawn uniformly.
fn assemble(prior: &SymmetricPrior, stats: &PriorStats, grid: Vec<f64>, laws: &[Vec<f64>]) -> Result<InfoStructure> {
    let n = prior.n();
    let k = grid.len();
    let nv = prior.values().len();
    let alphabet = Alphabet::numeric(grid)?;
    let mut builder = JointBuilder::new(prior, vec![alphabet; n])?;
    let total = (k as f64).powi(n as i32);
    let count = (k as u64).pow(n as u32);
    if count > u32::MAX as u64 {
        return Err(Error::InvalidParameter(format!("K^N = {count} signal profiles is too many")));
    }
    // Demand of one tie set of size m containing bidder 0, by winner value.
    let mut tie_demand = vec![vec![0.0; nv]; n + 1];
    for (m, row) in tie_demand.iter_mut().enumerate().skip(2) {
        for top in 0..k {
            let weight = (top as f64).powi((n - m) as i32) / total / m as f64;
            if weight == 0.0 {
                continue;
            }
            for (a, q) in laws[top * k + top].iter().enumerate() {
                row[a] += weight * q;
            }
        }
    }
    let completion = complete(prior, stats, &tie_demand, &builder);
    let radices = vec![k; n];
    for sid in 0..count {
        let s = decode(sid, &radices);
        let top = *s.iter().max().expect("n >= 2");
        let mask: usize = (0..n).filter(|&j| s[j] == top).map(|j| 1 << j).sum();
        let m = mask.count_ones() as usize;
        let sec = if m >= 2 { top } else { s.iter().copied().filter(|&x| x != top).max().expect("n >= 2") };
        let law = &laws[top * k + sec];
        let weight = 1.0 / (total * m as f64);
        for w in (0..n).filter(|&j| mask >> j & 1 == 1) {
            // transposition (0 w) maps the tie set to one containing bidder 0
            let b0 = mask & 1;
            let bw = mask >> w & 1;
            let swapped = (mask & !(1 | 1 << w)) | bw | (b0 << w);
            for (a, &q) in law.iter().enumerate() {
                if q <= 0.0 {
                    continue;
                }
                let draws = if m >= 2 { &completion.tie[swapped][a] } else { &completion.unique[a] };
                for d in draws {
                    builder.add_ids(d.ids[w], sid as u32, weight * q * d.p);
                }
            }
        }
    }
    builder.finish()
}
