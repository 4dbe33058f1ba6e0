//! General (correlated-signal) structures at the vertices of the feasible
//! payoff region and exact mixtures reaching any point inside it.

use serde::Serialize;
use serde_json::json;

use super::{build_degenerate_max, build_full_extraction};
use crate::coupling::simplex::feasible_point;
use crate::equilibrium::{evaluate, StrategyProfile};
use crate::error::{Error, Result};
use crate::prior::{classify_prior, compute_stats, PriorClass, SymmetricPrior};
use crate::structure::{Alphabet, InfoStructure, JointBuilder};
use crate::util::argmax_set;

/// Slack on the feasibility test of a target payoff.
const REGION_TOL: f64 = 1e-12;

/// Grid size of the full-extraction component used in mixtures.
const MIXTURE_GRID: usize = 16;

/// Window cap of the full-extraction component used in mixtures.
const MIXTURE_EPS: f64 = 0.1;

fn argmin_set(v: &[usize]) -> Vec<usize> {
    let lo = *v.iter().min().expect("n >= 2");
    (0..v.len()).filter(|&i| v[i] == lo).collect()
}

/// Winner (uniform among value maximizers) observes its value, everyone else 0.
/// Truthful bidding gives `(BS, Rev) = (wel_max, 0)`.
pub fn build_point_a(prior: &SymmetricPrior) -> Result<InfoStructure> {
    let mut atoms = vec![0.0];
    atoms.extend(prior.values().iter().copied());
    atoms.sort_by(f64::total_cmp);
    atoms.dedup();
    let index: Vec<usize> =
        prior.values().iter().map(|x| atoms.iter().position(|a| a == x).expect("present")).collect();
    let zero = 0;
    let n = prior.n();
    let mut builder = JointBuilder::new(prior, vec![Alphabet::numeric(atoms)?; n])?;
    for (v, p) in prior.support() {
        let top = argmax_set(v);
        for &w in &top {
            let mut s = vec![zero; n];
            s[w] = index[v[w]];
            builder.add(v, &s, p / top.len() as f64);
        }
    }
    Ok(builder.finish()?.with_construction("point-a", json!({})))
}

/// Lowest-value bidder (uniform among minimizers) observes `v̄`, everyone else 0.
/// Truthful bidding gives `(BS, Rev) = (wel_min, 0)`.
pub fn build_point_c(prior: &SymmetricPrior) -> Result<InfoStructure> {
    let v_bar = prior.v_bar();
    let atoms = if v_bar > 0.0 { vec![0.0, v_bar] } else { vec![0.0] };
    let high = atoms.len() - 1;
    let n = prior.n();
    let mut builder = JointBuilder::new(prior, vec![Alphabet::numeric(atoms)?; n])?;
    for (v, p) in prior.support() {
        let low = argmin_set(v);
        for &w in &low {
            let mut s = vec![0; n];
            s[w] = high;
            builder.add(v, &s, p / low.len() as f64);
        }
    }
    Ok(builder.finish()?.with_construction("point-c", json!({})))
}

/// Signal labels of point D: `null` (bid 0), `W` (bid `v̄`) and `P:x` (bid `x`).
fn point_d_alphabet(prior: &SymmetricPrior) -> Result<Alphabet> {
    let mut labels = vec!["null".to_string(), "W".to_string()];
    let mut bids = vec![0.0, prior.v_bar()];
    for &x in prior.values() {
        labels.push(format!("P:{x}"));
        bids.push(x);
    }
    Alphabet::labeled(labels, bids)
}

/// Lowest-value bidder gets `W`, a highest-value bidder gets `P:v_min`, others
/// `null`; the prescribed bids give `(BS, Rev) = (0, wel_min)`.
pub fn build_point_d(prior: &SymmetricPrior) -> Result<InfoStructure> {
    let n = prior.n();
    let alphabet = point_d_alphabet(prior)?;
    let mut builder = JointBuilder::new(prior, vec![alphabet; n])?;
    for (v, p) in prior.support() {
        let low = argmin_set(v);
        let high = argmax_set(v);
        let constant = v.iter().all(|&x| x == v[0]);
        let price = 2 + v[low[0]];
        for &w in &low {
            let payers: Vec<usize> = if constant { (0..n).filter(|&j| j != w).collect() } else { high.clone() };
            let mass = p / (low.len() * payers.len()) as f64;
            for &j in &payers {
                let mut s = vec![0; n];
                s[w] = 1;
                s[j] = price;
                builder.add(v, &s, mass);
            }
        }
    }
    Ok(builder.finish()?.with_construction("point-d", json!({})))
}

/// Convex weights over the vertex structures `[A, B, C, D]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixtureWeights {
    pub weights: [f64; 4],
    /// `(BS, Rev)` of each vertex used to solve the weights.
    pub vertices: [(f64, f64); 4],
}

fn check_region(prior: &SymmetricPrior, revenue: f64, surplus: f64) -> Result<()> {
    let stats = compute_stats(prior);
    let sum = revenue + surplus;
    let inside = revenue >= -REGION_TOL
        && surplus >= -REGION_TOL
        && sum >= stats.wel_min - REGION_TOL
        && sum <= stats.wel_max + REGION_TOL;
    if !(inside && revenue.is_finite() && surplus.is_finite()) {
        return Err(Error::OutsideTrapezoid { revenue, surplus });
    }
    Ok(())
}

fn solve_weights(vertices: [(f64, f64); 4], revenue: f64, surplus: f64) -> Result<MixtureWeights> {
    let a =
        vec![vertices.iter().map(|v| v.0).collect::<Vec<_>>(), vertices.iter().map(|v| v.1).collect(), vec![1.0; 4]];
    let sol = feasible_point(&a, &[surplus, revenue, 1.0]);
    if sol.infeasibility > 1e-9 || sol.residual > 1e-9 {
        return Err(Error::OutsideTrapezoid { revenue, surplus });
    }
    let mut weights = [0.0; 4];
    let total: f64 = sol.x.iter().sum();
    for (w, x) in weights.iter_mut().zip(&sol.x) {
        *w = x / total;
    }
    Ok(MixtureWeights { weights, vertices })
}

/// Weights over the ideal vertices `(wel_max, 0)`, `(0, wel_max)`, `(wel_min, 0)`, `(0, wel_min)`.
pub fn mixture_weights(prior: &SymmetricPrior, revenue: f64, surplus: f64) -> Result<MixtureWeights> {
    check_region(prior, revenue, surplus)?;
    let s = compute_stats(prior);
    solve_weights([(s.wel_max, 0.0), (0.0, s.wel_max), (s.wel_min, 0.0), (0.0, s.wel_min)], revenue, surplus)
}

/// Zero-surplus vertex with revenue `wel_max`: full extraction when the prior
/// admits it, otherwise the closest available structure.
fn revenue_vertex(prior: &SymmetricPrior) -> Result<InfoStructure> {
    let stats = compute_stats(prior);
    if stats.wel_max - stats.wel_min <= REGION_TOL {
        return build_point_d(prior);
    }
    match build_full_extraction(prior, MIXTURE_GRID, MIXTURE_EPS) {
        Ok(s) => Ok(s),
        Err(e) if classify_prior(prior) == PriorClass::DegenerateMax => {
            log::debug!("full extraction unavailable ({e}); using the degenerate-max structure");
            build_degenerate_max(prior, 1e-3)
        }
        Err(e) => Err(e),
    }
}

/// One structure with payoffs `(BS, Rev) = (surplus, revenue)` under its
/// prescribed strategies: a latent vertex label is drawn with the solved
/// weights and revealed to every bidder together with that vertex's signal.
pub fn build_target_payoff(prior: &SymmetricPrior, revenue: f64, surplus: f64) -> Result<InfoStructure> {
    check_region(prior, revenue, surplus)?;
    let parts = [build_point_a(prior)?, revenue_vertex(prior)?, build_point_c(prior)?, build_point_d(prior)?];
    let mut vertices = [(0.0, 0.0); 4];
    for (v, s) in vertices.iter_mut().zip(&parts) {
        let p = evaluate(s, &StrategyProfile::truthful(s))?;
        *v = (p.bidder_surplus, p.revenue);
    }
    let mix = solve_weights(vertices, revenue, surplus)?;
    let tags = ["A", "B", "C", "D"];
    let n = prior.n();
    let used: Vec<usize> = (0..4).filter(|&c| mix.weights[c] > 0.0).collect();
    // per bidder: offset of each used component's atoms in the merged alphabet
    let mut alphabets = Vec::with_capacity(n);
    let mut offsets = vec![vec![0usize; 4]; n];
    for i in 0..n {
        let (mut labels, mut bids) = (Vec::new(), Vec::new());
        for &c in &used {
            offsets[i][c] = labels.len();
            let a = &parts[c].alphabets()[i];
            for k in 0..a.len() {
                labels.push(format!("{}:{}", tags[c], a.label(k)));
                bids.push(a.atoms()[k]);
            }
        }
        alphabets.push(Alphabet::labeled(labels, bids)?);
    }
    let mut builder = JointBuilder::new(prior, alphabets)?;
    for &c in &used {
        let part = &parts[c];
        for e in part.entries() {
            let s: Vec<usize> = part.signal_profile(e.s).iter().enumerate().map(|(i, &k)| offsets[i][c] + k).collect();
            builder.add_ids(e.v, builder.signal_id(&s), e.p * mix.weights[c]);
        }
    }
    Ok(builder.finish()?.with_construction(
        "target-payoff",
        json!({"revenue": revenue, "surplus": surplus, "weights": mix.weights, "vertices": mix.vertices}),
    ))
}
